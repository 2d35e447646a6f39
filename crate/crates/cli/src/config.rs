use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use moran_core::auxiliary::JointCase;
use moran_core::config::{ConfigError, KvDocument};
use moran_core::model::{Word, MODEL_KEYS};
use moran_core::{AuxTarget, ModelParams};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Spectra,
    LocalDim,
    Lq,
    Ld,
    Aux,
    Sample,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Spectra => "spectra",
            Command::LocalDim => "localdim",
            Command::Lq => "lq",
            Command::Ld => "ld",
            Command::Aux => "aux",
            Command::Sample => "sample",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "validate" => Command::Validate,
            "spectra" => Command::Spectra,
            "localdim" => Command::LocalDim,
            "lq" => Command::Lq,
            "ld" => Command::Ld,
            "aux" => Command::Aux,
            "sample" => Command::Sample,
            other => {
                return Err(format!(
                    "unknown command '{other}' (expected validate, spectra, localdim, lq, ld, aux or sample)"
                ))
            }
        })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Keys under `[run]`.
const RUN_KEYS: &[&str] = &[
    "command",
    "seed",
    "grid",
    "joint_grid",
    "depth_index",
    "n_samples",
    "out",
    "s",
    "alpha",
    "alpha_prime",
    "beta",
    "epsilon",
    "target",
    "case",
    "address",
];

const DEFAULT_S: &str = "-2,-0.5,0,0.5,2,4";

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: ModelParams,
    pub command: Command,
    pub seed: u64,
    pub grid: usize,
    pub joint_grid: usize,
    pub depth_index: usize,
    pub n_samples: usize,
    pub out: PathBuf,
    pub s_values: Vec<f64>,
    pub alpha: Option<f64>,
    pub alpha_prime: Option<f64>,
    pub beta: Option<f64>,
    pub epsilon: f64,
    pub target: String,
    pub case: Option<JointCase>,
    pub address: Word,
    /// Every computation-relevant key with defaults filled in; `run.out` is left out.
    pub resolved: BTreeMap<String, String>,
}

fn allowed_keys() -> Vec<String> {
    MODEL_KEYS.iter().map(|k| format!("model.{k}")).chain(RUN_KEYS.iter().map(|k| format!("run.{k}"))).collect()
}

fn parse_or<T: FromStr>(doc: &KvDocument, key: &str, default: T) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    match doc.get(key) {
        Some(e) => e.value.parse().map_err(|err: T::Err| doc.invalid(key, err.to_string())),
        None => Ok(default),
    }
}

fn optional_f64(doc: &KvDocument, key: &str) -> Result<Option<f64>, ConfigError> {
    doc.get(key).map(|_| doc.get_f64(key)).transpose()
}

impl RunConfig {
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let doc = KvDocument::parse(text)?;
        doc.check_known(&allowed_keys())?;
        let model = ModelParams::from_kv(&doc, "model")?;
        let command: Command = doc.get_str("run.command")?.parse().map_err(|e: String| doc.invalid("run.command", e))?;
        let seed = parse_or(&doc, "run.seed", 0u64)?;
        let grid = parse_or(&doc, "run.grid", 200usize)?;
        let joint_grid = parse_or(&doc, "run.joint_grid", 100usize)?;
        let max_depth = model.schedule().all_breakpoints().len();
        let depth_index = parse_or(&doc, "run.depth_index", max_depth.min(8))?;
        if depth_index == 0 || depth_index > max_depth {
            return Err(doc.invalid("run.depth_index", format!("must lie in 1..={max_depth}")));
        }
        let n_samples = parse_or(&doc, "run.n_samples", 1000usize)?;
        let out = PathBuf::from(parse_or(&doc, "run.out", "out".to_string())?);
        let s_text = parse_or(&doc, "run.s", DEFAULT_S.to_string())?;
        let s_values = s_text
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| doc.invalid("run.s", e.to_string()))?;
        let alpha = optional_f64(&doc, "run.alpha")?;
        let alpha_prime = optional_f64(&doc, "run.alpha_prime")?;
        let beta = optional_f64(&doc, "run.beta")?;
        let epsilon = parse_or(&doc, "run.epsilon", 0.01f64)?;
        let target = parse_or(&doc, "run.target", "mu".to_string())?;
        let case = doc.get("run.case").map(|e| e.value.parse::<JointCase>()).transpose().map_err(|e| doc.invalid("run.case", e))?;
        let address_text = parse_or(&doc, "run.address", "0".to_string())?;
        let digits: Vec<u8> = address_text
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).filter(|&d| d <= 1))
            .collect::<Option<Vec<_>>>()
            .filter(|d| !d.is_empty())
            .ok_or_else(|| doc.invalid("run.address", "expected a non-empty string of 0s and 1s"))?;
        let address = Word::new(digits).map_err(|e| doc.invalid("run.address", e.to_string()))?;

        let mut resolved: BTreeMap<String, String> =
            doc.entries().filter(|(k, _)| *k != "run.out").map(|(k, e)| (k.to_string(), e.value.clone())).collect();
        let mut default = |k: &str, v: String| {
            resolved.entry(k.to_string()).or_insert(v);
        };
        default("model.schedule.kind", model.schedule().kind().as_str().to_string());
        default("run.seed", seed.to_string());
        default("run.grid", grid.to_string());
        default("run.joint_grid", joint_grid.to_string());
        default("run.depth_index", depth_index.to_string());
        default("run.n_samples", n_samples.to_string());
        default("run.s", s_text.clone());
        default("run.epsilon", epsilon.to_string());
        default("run.target", target.clone());
        default("run.address", address_text.clone());

        Ok(RunConfig {
            model,
            command,
            seed,
            grid,
            joint_grid,
            depth_index,
            n_samples,
            out,
            s_values,
            alpha,
            alpha_prime,
            beta,
            epsilon,
            target,
            case,
            address,
            resolved,
        })
    }

    /// `key = value` lines of the resolved configuration, sorted by key.
    pub fn canonical(&self) -> String {
        self.resolved.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn hash(&self) -> String {
        hex(&Sha256::digest(self.canonical().as_bytes()))
    }

    fn need(&self, v: Option<f64>, key: &str) -> anyhow::Result<f64> {
        v.ok_or_else(|| anyhow::anyhow!("run.{key} is required for target '{}'", self.target))
    }

    pub fn aux_target(&self) -> anyhow::Result<AuxTarget> {
        let a = || self.need(self.alpha, "alpha");
        let joint = || -> anyhow::Result<(f64, f64)> { Ok((a()?, self.need(self.alpha_prime, "alpha_prime")?)) };
        Ok(match self.target.as_str() {
            "mu" => AuxTarget::Mu,
            "uniform" => AuxTarget::Uniform,
            "lower_h" => AuxTarget::LowerH(a()?),
            "lower_h_linear" => AuxTarget::LowerHLinear(a()?),
            "upper_h" => AuxTarget::UpperH(a()?),
            "upper_p_linear" => AuxTarget::UpperPLinear(a()?),
            "upper_p_curved" => AuxTarget::UpperPCurved(a()?),
            "joint_h" => {
                let (alpha, alpha_prime) = joint()?;
                AuxTarget::JointH { alpha, alpha_prime, case: self.case }
            }
            "joint_p" => {
                let (alpha, alpha_prime) = joint()?;
                AuxTarget::JointP { alpha, alpha_prime, case: self.case }
            }
            other => anyhow::bail!("unknown run.target '{other}'"),
        })
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const P0: &str = "[model]\nA = 16\nB = 2.2\np = 0.4\nq = 0.45\n[run]\ncommand = validate\n";

    #[test]
    fn defaults_are_resolved() {
        let c = RunConfig::from_text(P0).unwrap();
        assert_eq!(c.command, Command::Validate);
        assert_eq!(c.depth_index, 8);
        assert_eq!(c.resolved["model.schedule.kind"], "two_pow_i_squared");
        assert_eq!(c.s_values.len(), 6);
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn out_does_not_change_the_hash() {
        let a = RunConfig::from_text(P0).unwrap();
        let b = RunConfig::from_text(&format!("{P0}out = elsewhere\n")).unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig::from_text(&format!("{P0}seed = 3\n")).unwrap();
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn unknown_key_names_key_and_line() {
        let err = RunConfig::from_text(&format!("{P0}gamma = 1\n")).unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey { key: "run.gamma".into(), line: 8 });
    }

    #[test]
    fn bad_values_are_reported() {
        assert!(RunConfig::from_text(&P0.replace("validate", "plot")).is_err());
        assert!(RunConfig::from_text(&format!("{P0}address = 012\n")).is_err());
        assert!(RunConfig::from_text(&format!("{P0}depth_index = 40\n")).is_err());
        assert!(matches!(RunConfig::from_text(&P0.replace("0.45", "0.7")), Err(ConfigError::Infeasible(_))));
    }

    #[test]
    fn aux_targets_need_their_parameters() {
        let c = RunConfig::from_text(&format!("{P0}target = lower_h\n")).unwrap();
        assert!(c.aux_target().is_err());
        let c = RunConfig::from_text(&format!("{P0}target = joint_p\nalpha = 0.25\nalpha_prime = 0.8\ncase = linear\n"))
            .unwrap();
        assert!(matches!(c.aux_target().unwrap(), AuxTarget::JointP { case: Some(JointCase::Linear), .. }));
    }
}
