//! Versioned experiment configs. Each subcommand's parameters are one struct
//! used both as clap flags and as the JSON `params` object.

use crate::commands::*;
use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const CONFIG_VERSION: u32 = 1;

/// A config problem; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_err(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(ConfigError(msg.into()))
}

#[derive(Parser)]
struct Defaults<T: Args> {
    #[command(flatten)]
    inner: T,
}

/// Parameter defaults are the clap defaults.
pub fn defaults<T: Args>() -> T {
    Defaults::<T>::parse_from(["stdmap"]).inner
}

macro_rules! params {
    ($($variant:ident($ty:ty) = $name:literal),* $(,)?) => {
        $(impl Default for $ty {
            fn default() -> Self {
                defaults()
            }
        })*

        #[derive(Clone, Debug)]
        pub enum Command {
            $($variant($ty),)*
        }

        impl Command {
            pub fn name(&self) -> &'static str {
                match self {
                    $(Command::$variant(_) => $name,)*
                }
            }

            pub fn params_json(&self) -> Value {
                match self {
                    $(Command::$variant(p) => serde_json::to_value(p).expect("params serialize"),)*
                }
            }

            pub fn from_json(name: &str, params: Value) -> anyhow::Result<Self> {
                match name {
                    $($name => serde_json::from_value(params).map(Command::$variant).map_err(|e| config_err(format!("{}: {}", name, e))),)*
                    other => Err(config_err(format!("unknown subcommand {:?}", other))),
                }
            }
        }
    };
}

params! {
    Lyapunov(LyapunovParams) = "lyapunov",
    Bounds(BoundsParams) = "bounds",
    Lax(LaxParams) = "lax",
    Spectrum(SpectrumParams) = "spectrum",
    WSpectrum(WSpectrumParams) = "wspectrum",
    Dos(DosParams) = "dos",
    Thouless(ThoulessParams) = "thouless",
    DetProd(DetProdParams) = "detprod",
    Jensen(JensenParams) = "jensen",
    Harmonic(HarmonicParams) = "harmonic",
    Wiener(WienerParams) = "wiener",
    Duality(DualityParams) = "duality",
    Diffusion(DiffusionParams) = "diffusion",
    Distribution(DistributionParams) = "distribution",
    Herman(HermanParams) = "herman",
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    version: u32,
    subcommand: String,
    #[serde(default = "empty_object")]
    params: Value,
    #[serde(default)]
    deterministic: bool,
    #[serde(default)]
    threads: Option<usize>,
    #[serde(default)]
    out: Option<PathBuf>,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub command: Command,
    pub deterministic: bool,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
}

/// The part of a config that determines the output bytes.
#[derive(Serialize)]
struct Canonical<'a> {
    version: u32,
    subcommand: &'a str,
    params: Value,
    deterministic: bool,
}

impl ExperimentConfig {
    pub fn parse_json(text: &str) -> anyhow::Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        if raw.version != CONFIG_VERSION {
            bail!(ConfigError(format!("unsupported config version {} (expected {})", raw.version, CONFIG_VERSION)));
        }
        if raw.threads == Some(0) {
            bail!(ConfigError("threads must be positive".into()));
        }
        let command = Command::from_json(&raw.subcommand, raw.params)?;
        Ok(ExperimentConfig { command, deterministic: raw.deterministic, threads: raw.threads, out: raw.out })
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(|e| config_err(format!("{:#}", e)))?;
        Self::parse_json(&text)
    }

    /// Full config as JSON, suitable for `run`.
    pub fn to_json(&self) -> Value {
        let mut v = serde_json::json!({
            "version": CONFIG_VERSION,
            "subcommand": self.command.name(),
            "params": self.command.params_json(),
            "deterministic": self.deterministic,
        });
        if let Some(t) = self.threads {
            v["threads"] = t.into();
        }
        if let Some(o) = &self.out {
            v["out"] = o.display().to_string().into();
        }
        v
    }

    /// SHA-256 of the canonical config; thread count and output paths are
    /// excluded since they do not change the results.
    pub fn hash(&self) -> String {
        let c = Canonical { version: CONFIG_VERSION, subcommand: self.command.name(), params: self.command.params_json(), deterministic: self.deterministic };
        let bytes = serde_json::to_vec(&c).expect("canonical config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{:02x}", b)).collect()
    }
}

/// `start:stop:step`, inclusive of stop up to rounding.
pub fn parse_range(s: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| config_err(format!("bad range {:?}", s)))?;
    match nums.as_slice() {
        [a] => Ok(vec![*a]),
        [a, b, h] if *h > 0.0 && b >= a => {
            let n = ((b - a) / h + 1e-9).floor() as usize;
            Ok((0..=n).map(|k| a + k as f64 * h).collect())
        }
        _ => Err(config_err(format!("range must be start:stop:step with step > 0, got {:?}", s))),
    }
}

/// Complex number written `re,im` or `re`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "CxRepr", into = "[f64; 2]")]
pub struct Cx(pub f64, pub f64);

#[derive(Deserialize)]
#[serde(untagged)]
enum CxRepr {
    Pair([f64; 2]),
    Real(f64),
}

impl From<CxRepr> for Cx {
    fn from(r: CxRepr) -> Self {
        match r {
            CxRepr::Pair([a, b]) => Cx(a, b),
            CxRepr::Real(a) => Cx(a, 0.0),
        }
    }
}

impl From<Cx> for [f64; 2] {
    fn from(c: Cx) -> Self {
        [c.0, c.1]
    }
}

impl std::str::FromStr for Cx {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> anyhow::Result<Self> {
        let v: Vec<f64> = s.split(',').map(|p| p.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| anyhow!("expected re or re,im, got {:?}", s))?;
        match v.as_slice() {
            [a] => Ok(Cx(*a, 0.0)),
            [a, b] => Ok(Cx(*a, *b)),
            _ => Err(anyhow!("expected re or re,im, got {:?}", s)),
        }
    }
}

impl std::fmt::Display for Cx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{}", self.0, self.1)
    }
}

impl Cx {
    pub fn c64(self) -> stdmap::C64 {
        stdmap::C64::new(self.0, self.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_json() {
        let cfg = ExperimentConfig { command: Command::Lyapunov(LyapunovParams::default()), deterministic: true, threads: None, out: None };
        let back = ExperimentConfig::parse_json(&cfg.to_json().to_string()).unwrap();
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(back.command.params_json(), cfg.command.params_json());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = r#"{"version":1,"subcommand":"lyapunov","params":{"lamda":3}}"#;
        assert!(ExperimentConfig::parse_json(bad).unwrap_err().downcast_ref::<ConfigError>().is_some());
        let bad_top = r#"{"version":1,"subcommand":"lyapunov","colour":1}"#;
        assert!(ExperimentConfig::parse_json(bad_top).is_err());
    }

    #[test]
    fn version_is_checked() {
        assert!(ExperimentConfig::parse_json(r#"{"version":2,"subcommand":"bounds"}"#).is_err());
        assert!(ExperimentConfig::parse_json(r#"{"version":1,"subcommand":"bounds"}"#).is_ok());
    }

    #[test]
    fn hash_ignores_threads_and_out() {
        let a = ExperimentConfig::parse_json(r#"{"version":1,"subcommand":"bounds","threads":4,"out":"x"}"#).unwrap();
        let b = ExperimentConfig::parse_json(r#"{"version":1,"subcommand":"bounds"}"#).unwrap();
        let c = ExperimentConfig::parse_json(r#"{"version":1,"subcommand":"bounds","deterministic":true}"#).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(b.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn ranges() {
        let r = parse_range("0.5:1.0:0.1").unwrap();
        assert_eq!(r.len(), 6);
        assert!((r[5] - 1.0).abs() < 1e-12);
        assert_eq!(parse_range("2").unwrap(), vec![2.0]);
        assert!(parse_range("1:0:0.1").is_err());
        assert!(parse_range("a:b").is_err());
    }

    #[test]
    fn complex_forms() {
        assert_eq!("1.5,-2".parse::<Cx>().unwrap(), Cx(1.5, -2.0));
        assert_eq!("3".parse::<Cx>().unwrap(), Cx(3.0, 0.0));
        assert_eq!(serde_json::from_str::<Cx>("[1,2]").unwrap(), Cx(1.0, 2.0));
        assert_eq!(serde_json::from_str::<Cx>("4").unwrap(), Cx(4.0, 0.0));
        assert_eq!(serde_json::to_string(&Cx(1.0, 2.0)).unwrap(), "[1.0,2.0]");
    }
}
