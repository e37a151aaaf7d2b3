//! Binary snapshot of a ball-supported field.
//!
//! Layout: `b"HP43"`, `u16` version, `u32` cutoff, `u8` reality flag, then
//! little-endian `f64` pairs `(re, im)` for every `|n| ≤ N` in lexicographic order.

use std::io::{Read, Write};

use super::field::{FourierField, C64};
use crate::error::{Error, Result};
use crate::lattice::Shape;

pub const MAGIC: &[u8; 4] = b"HP43";
pub const VERSION: u16 = 1;

pub fn write_snapshot<W: Write>(u: &FourierField, mut w: W) -> Result<()> {
    if u.shape() != Shape::Ball {
        return Err(Error::Format("snapshots store ball-supported fields only".into()));
    }
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(u.cutoff() as u32).to_le_bytes())?;
    w.write_all(&[u.is_real() as u8])?;
    for (_, v) in u.iter() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<FourierField> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let mut b2 = [0u8; 2];
    r.read_exact(&mut b2)?;
    let version = u16::from_le_bytes(b2);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let cutoff = u32::from_le_bytes(b4) as usize;
    let mut b1 = [0u8; 1];
    r.read_exact(&mut b1)?;
    let real = match b1[0] {
        0 => false,
        1 => true,
        x => return Err(Error::Format(format!("bad reality flag {x}"))),
    };
    let mut u = FourierField::zeros(cutoff, Shape::Ball, real);
    let mut b8 = [0u8; 8];
    let mut err = None;
    u.fill_with(|_, _| {
        let mut read = || -> Result<f64> {
            r.read_exact(&mut b8)?;
            Ok(f64::from_le_bytes(b8))
        };
        match (read(), read()) {
            (Ok(re), Ok(im)) => C64::new(re, im),
            (Err(e), _) | (_, Err(e)) => {
                err.get_or_insert(e);
                C64::new(0.0, 0.0)
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(u)
}
