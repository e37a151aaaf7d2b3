//! Piecewise-constant drifts on `[0, 1]` and the shift `I(θ)(1) = ∫₀¹⟨∇⟩^{-1}θ(t)dt`.

use crate::error::{Error, Result};
use crate::fields::WienerPath;
use crate::lattice::{self, Shape};
use crate::spectral::FourierField;

/// `θ(t) = θ_k` on `[k/K, (k+1)/K)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftPath {
    values: Vec<FourierField>,
    adapted: bool,
}

impl DriftPath {
    pub fn zeros(cutoff: usize, shape: Shape, steps: usize) -> Self {
        Self { values: vec![FourierField::zeros(cutoff, shape, true); steps], adapted: true }
    }

    /// A deterministic drift; deterministic drifts are trivially adapted.
    pub fn from_values(values: Vec<FourierField>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("a drift needs at least one interval".into()));
        }
        Ok(Self { values, adapted: true })
    }

    /// The time-constant drift `θ ≡ f`.
    pub fn constant(f: &FourierField, steps: usize) -> Self {
        Self { values: vec![f.clone(); steps], adapted: true }
    }

    pub fn steps(&self) -> usize {
        self.values.len()
    }
    pub fn dt(&self) -> f64 {
        1.0 / self.steps() as f64
    }
    pub fn is_adapted(&self) -> bool {
        self.adapted
    }
    pub fn value(&self, k: usize) -> &FourierField {
        &self.values[k]
    }
    pub fn values(&self) -> &[FourierField] {
        &self.values
    }

    /// `½∫₀¹‖θ(t)‖²_{L²}dt`.
    pub fn cost(&self) -> f64 {
        0.5 * self.dt() * self.values.iter().map(|v| v.norm_sq()).sum::<f64>()
    }

    /// `∫₀^{t_k}⟨∇⟩^{-1}θ(t)dt`.
    pub fn integral_until(&self, k: usize) -> FourierField {
        let h = self.dt();
        let mut acc = FourierField::zeros(self.values[0].cutoff(), self.values[0].shape(), true);
        for v in &self.values[..k] {
            acc = acc.axpy(h, &v.multiplier(|n| 1.0 / lattice::bracket(n)));
        }
        acc
    }
}

/// `I(θ)(1)`.
pub fn i_theta(drift: &DriftPath) -> FourierField {
    drift.integral_until(drift.steps())
}

/// Read access to the Wiener increments strictly before interval `k`.
pub struct Past<'a> {
    path: &'a WienerPath,
    k: usize,
}

impl<'a> Past<'a> {
    pub fn interval(&self) -> usize {
        self.k
    }
    /// `ΔB_j`; reading `j ≥ k` is a violation of adaptedness.
    pub fn increment(&self, j: usize) -> Result<&'a FourierField> {
        if j >= self.k {
            return Err(Error::Config(format!(
                "drift on interval {} reads the increment of interval {j}, which is not in the past",
                self.k
            )));
        }
        Ok(self.path.increment(j))
    }
    /// `Y(t_k)`.
    pub fn y_now(&self) -> FourierField {
        self.path.y(self.k)
    }
}

/// Builds a drift interval by interval from a policy that only sees [`Past`] increments.
pub fn build_adapted(path: &WienerPath, mut policy: impl FnMut(&Past<'_>) -> Result<FourierField>) -> Result<DriftPath> {
    let values = (0..path.steps()).map(|k| policy(&Past { path, k })).collect::<Result<Vec<_>>>()?;
    Ok(DriftPath { values, adapted: true })
}
