//! The two-phase Moran construction and its general level-dependent form.

mod cylinder;
mod params;
mod schedule;
mod validate;

use thiserror::Error;

pub use cylinder::{ball_cylinder_bounds, cylinder, locate, BallCylinderBounds, LogCylinder, Word};
pub use params::{GeneralParams, LevelRule, ModelParams, MoranModel, Run};
pub use schedule::{Level, LevelSchedule, Phase, PhaseRun, ScheduleKind};
pub use validate::{
    validate, Check, CheckStatus, ValidationReport, CHECK_GROWTH, CHECK_ORDER, CHECK_P, CHECK_Q, CHECK_SEPARATION,
};

use crate::config::{ConfigError, KvDocument};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("bad schedule: {0}")]
    BadSchedule(String),
    #[error("levels start at 1")]
    LevelZero,
    #[error("schedule too short: level {level} beyond last breakpoint {last}")]
    ScheduleTooShort { level: u128, last: u128 },
    #[error("parameter constraint violated: {0}")]
    Constraint(String),
    #[error("point {x} not in level-{level} union (last covered at level {deepest})")]
    PointNotInUnion { x: f64, level: usize, deepest: usize },
    #[error("degenerate base probability {0}")]
    DegenerateProbability(f64),
    #[error("address of depth {depth} too shallow, need at least {needed} digits")]
    AddressTooShallow { depth: usize, needed: usize },
    #[error("radius {0} outside (0, 1)")]
    BadRadius(f64),
    #[error("digits must be 0 or 1")]
    BadDigit,
}

/// `H(p̃, p) = -p̃ ln p - (1 - p̃) ln(1 - p)` in nats.
pub fn mixed_entropy(pt: f64, p: f64) -> Result<f64, ModelError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(ModelError::DegenerateProbability(p));
    }
    Ok(-crate::numerics::xlogx(pt, p) - crate::numerics::xlogx(1.0 - pt, 1.0 - p))
}

impl ModelParams {
    /// Reads `A`, `B`, `p`, `q`, `schedule.kind`, `schedule.explicit` and
    /// `schedule.max_index` under `section`.
    pub fn from_kv(doc: &KvDocument, section: &str) -> Result<Self, ConfigError> {
        let key = |k: &str| format!("{section}.{k}");
        let a = doc.get_f64(&key("A"))?;
        let b = doc.get_f64(&key("B"))?;
        let p = doc.get_f64(&key("p"))?;
        let q = doc.get_f64(&key("q"))?;
        let kind_key = key("schedule.kind");
        let kind: ScheduleKind = match doc.get(&kind_key) {
            Some(v) => v.value.parse().map_err(|e: ModelError| doc.invalid(&kind_key, e.to_string()))?,
            None => ScheduleKind::TwoPowISquared,
        };
        let explicit_key = key("schedule.explicit");
        let explicit = match doc.get(&explicit_key) {
            Some(v) => Some(
                v.value
                    .split(',')
                    .map(|t| t.trim().parse::<Level>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| doc.invalid(&explicit_key, e.to_string()))?,
            ),
            None => None,
        };
        let mut schedule =
            LevelSchedule::from_kind(kind, explicit).map_err(|e| doc.invalid(&kind_key, e.to_string()))?;
        let mi_key = key("schedule.max_index");
        if doc.get(&mi_key).is_some() {
            let mi = doc.get_u64(&mi_key)? as usize;
            schedule = schedule.with_max_index(mi).map_err(|e| doc.invalid(&mi_key, e.to_string()))?;
        }
        ModelParams::new(a, b, p, q, schedule).map_err(|e| ConfigError::Infeasible(e.to_string()))
    }
}

/// Keys [`ModelParams::from_kv`] understands, relative to its section.
pub const MODEL_KEYS: &[&str] = &["A", "B", "p", "q", "schedule.kind", "schedule.explicit", "schedule.max_index"];
