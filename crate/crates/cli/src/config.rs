//! Flat JSON configs: defaults, then the `--config` file, then command-line flags.

use hartree_core::{Error, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

/// Declares a config struct together with the clap flags that override it.
/// Every field gets a JSON key equal to its long flag name.
macro_rules! experiment_config {
    ($cfg:ident, $flags:ident { $( $(#[$arg:meta])* $field:ident : $ty:ty = $default:expr, $key:literal; )* }) => {
        #[derive(clap::Args, serde::Serialize, Debug, Default)]
        pub struct $flags {
            $(
                $(#[$arg])*
                #[arg(long = $key, allow_negative_numbers = true)]
                #[serde(rename = $key, skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }

        #[derive(serde::Serialize, serde::Deserialize, Clone, Debug, PartialEq)]
        #[serde(deny_unknown_fields)]
        pub struct $cfg {
            $(
                #[serde(rename = $key)]
                pub $field: $ty,
            )*
        }

        impl Default for $cfg {
            fn default() -> Self {
                Self { $( $field: $default, )* }
            }
        }
    };
}
pub(crate) use experiment_config;

fn bad(e: serde_json::Error) -> Error {
    Error::Config(e.to_string())
}

pub fn read_file(path: &std::path::Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    match serde_json::from_str(&text).map_err(bad)? {
        Value::Object(m) => Ok(m),
        _ => Err(Error::Config("the config file must hold a JSON object".into())),
    }
}

/// Layers `file` and then `flags` over `C::default()`.
pub fn resolve<C, F>(file: &Map<String, Value>, flags: &F) -> Result<C>
where
    C: Serialize + DeserializeOwned + Default,
    F: Serialize,
{
    let mut v = serde_json::to_value(C::default()).map_err(bad)?;
    let target = v.as_object_mut().expect("configs serialize to objects");
    for (k, x) in file {
        target.insert(k.clone(), x.clone());
    }
    if let Value::Object(m) = serde_json::to_value(flags).map_err(bad)? {
        for (k, x) in m {
            target.insert(k, x);
        }
    }
    serde_json::from_value(v).map_err(bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    experiment_config!(Demo, DemoFlags {
        n: usize = 4, "N";
        beta: f64 = 1.5, "beta";
        ms: Vec<usize> = vec![8, 16], "M";
    });

    #[test]
    fn flags_beat_file_beat_defaults() {
        let mut file = Map::new();
        file.insert("N".into(), Value::from(6));
        file.insert("beta".into(), Value::from(0.5));
        let flags = DemoFlags { beta: Some(2.0), ..Default::default() };
        let c: Demo = resolve(&file, &flags).unwrap();
        assert_eq!(c, Demo { n: 6, beta: 2.0, ms: vec![8, 16] });
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut file = Map::new();
        file.insert("nope".into(), Value::from(1));
        let r: Result<Demo> = resolve(&file, &DemoFlags::default());
        assert!(matches!(r, Err(Error::Config(_))));
    }
}
