//! Auxiliary measures μ′ from the lower-bound constructions: segment tables,
//! deterministic strong-law ratios and seeded Monte Carlo sampling.

mod build;
mod sampling;
mod strong_law;

use std::fmt;

use thiserror::Error;

use crate::ext::ExtReal;
use crate::model::{Level, LevelRule, ModelError, MoranModel, Phase, Run};
use crate::spectra::{BetaFunction, SpectraError};
use crate::table::{fmt_f64, Table};

pub use build::{build_aux, AuxTarget, JointCase};
pub use sampling::{monte_carlo_local_dims, sample_point, McRow, McSummary, SampleStats, MAX_EXPLICIT_DEPTH};
pub use strong_law::{strong_law_sequence, StrongLawPoint, StrongLawSeq, TargetMeasure};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AuxError {
    #[error("{target}: {value} outside {range}")]
    OutOfRange { target: &'static str, value: f64, range: String },
    #[error("{target}: case {requested} does not apply here, the point belongs to case {found}")]
    CaseMismatch { target: &'static str, requested: JointCase, found: JointCase },
    #[error("depth {depth} exceeds the limit {limit}")]
    TooDeep { depth: Level, limit: Level },
    #[error("auxiliary measure was built for other contraction ratios")]
    ParamsMismatch,
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// `base^{β(s)} p^s`, the left-child weight of the tilted measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GibbsWeight {
    pub value: f64,
    /// Exact `0` or `1`: every point follows a single branch.
    pub degenerate: bool,
}

pub fn gibbs_weight(f: &BetaFunction, s: ExtReal) -> GibbsWeight {
    let value = f.gibbs(s);
    GibbsWeight { value, degenerate: value == 0.0 || value == 1.0 }
}

/// Where a segment's weight comes from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightRole {
    /// Tilted `β₁` weight at the given `s`.
    Gibbs1(ExtReal),
    /// Tilted `β₂` weight at the given `s`.
    Gibbs2(ExtReal),
    Half,
    /// The A-phase weight `p` of μ.
    BaseP,
    /// The B-phase weight `q` of μ.
    BaseQ,
}

impl fmt::Display for WeightRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightRole::Gibbs1(s) => write!(f, "gibbs1(s={s})"),
            WeightRole::Gibbs2(s) => write!(f, "gibbs2(s={s})"),
            WeightRole::Half => f.write_str("half"),
            WeightRole::BaseP => f.write_str("p"),
            WeightRole::BaseQ => f.write_str("q"),
        }
    }
}

/// Levels `(lo, hi]` with constant weight `p′`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuxSegment {
    pub lo: Level,
    pub hi: Level,
    pub phase: Phase,
    pub weight: f64,
    pub role: WeightRole,
}

impl AuxSegment {
    pub fn len(&self) -> Level {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }
}

/// The rule `n ↦ p′_n` of an auxiliary measure, over the contraction ratios
/// of the base model.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxSpec {
    a: f64,
    b: f64,
    segments: Vec<AuxSegment>,
    provenance: String,
}

impl AuxSpec {
    pub(crate) fn from_segments(a: f64, b: f64, segments: Vec<AuxSegment>, provenance: String) -> Self {
        debug_assert!(segments.first().is_none_or(|s| s.lo == 0));
        debug_assert!(segments.windows(2).all(|w| w[0].hi == w[1].lo));
        debug_assert!(segments.iter().all(|s| s.lo < s.hi && (0.0..=1.0).contains(&s.weight)));
        AuxSpec { a, b, segments, provenance }
    }

    pub fn segments(&self) -> &[AuxSegment] {
        &self.segments
    }

    /// Which construction produced the rule, with its parameters.
    pub fn provenance_tag(&self) -> &str {
        &self.provenance
    }

    pub fn contractions(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Some segment carries an exact `0` or `1` weight.
    pub fn is_degenerate(&self) -> bool {
        self.segments.iter().any(|s| s.weight == 0.0 || s.weight == 1.0)
    }

    pub fn depth(&self) -> Level {
        self.segments.last().map_or(0, |s| s.hi)
    }

    /// Segment ends, strictly increasing.
    pub fn boundaries(&self) -> Vec<Level> {
        self.segments.iter().map(|s| s.hi).collect()
    }

    fn segment_index(&self, n: Level) -> Result<usize, ModelError> {
        if n == 0 {
            return Err(ModelError::LevelZero);
        }
        let idx = self.segments.partition_point(|s| s.hi < n);
        if idx == self.segments.len() {
            return Err(ModelError::ScheduleTooShort { level: n, last: self.depth() });
        }
        Ok(idx)
    }

    pub fn weight_at(&self, n: Level) -> Result<f64, ModelError> {
        Ok(self.segments[self.segment_index(n)?].weight)
    }

    /// Number of levels in `1..=n` whose segment role satisfies `pred`.
    pub fn count_levels(&self, n: Level, pred: impl Fn(&WeightRole) -> bool) -> Level {
        self.segments.iter().filter(|s| s.lo < n && pred(&s.role)).map(|s| s.hi.min(n) - s.lo).sum()
    }

    fn contraction(&self, phase: Phase) -> f64 {
        match phase {
            Phase::A => self.a,
            Phase::B => self.b,
        }
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["lo", "hi", "phase", "weight", "role"]);
        for s in &self.segments {
            t.push(vec![s.lo.to_string(), s.hi.to_string(), s.phase.to_string(), fmt_f64(s.weight), s.role.to_string()]);
        }
        t
    }
}

impl MoranModel for AuxSpec {
    fn rule(&self, n: Level) -> Result<LevelRule, ModelError> {
        let s = &self.segments[self.segment_index(n)?];
        Ok(LevelRule { contraction: self.contraction(s.phase), prob: s.weight })
    }

    fn runs_between(&self, lo: Level, hi: Level) -> Result<Vec<Run>, ModelError> {
        let mut out = Vec::new();
        if hi <= lo {
            return Ok(out);
        }
        let last = self.segment_index(hi)?;
        let mut idx = self.segments.partition_point(|s| s.hi <= lo);
        let mut start = lo;
        while idx <= last {
            let s = &self.segments[idx];
            let end = s.hi.min(hi);
            out.push(Run { lo: start, hi: end, rule: LevelRule { contraction: self.contraction(s.phase), prob: s.weight } });
            start = end;
            idx += 1;
        }
        Ok(out)
    }

    fn contraction_bounds(&self) -> (f64, f64) {
        (self.b, self.a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::numerics::log_add_exp;
    use crate::spectra::Spectra;
    use proptest::prelude::*;

    #[test]
    fn gibbs_weight_anchors() {
        let sp = Spectra::new(&ModelParams::reference());
        let half = gibbs_weight(&sp.beta1, ExtReal::Finite(0.0));
        assert!((half.value - 0.5).abs() < 1e-15 && !half.degenerate);
        assert!((gibbs_weight(&sp.beta1, ExtReal::Finite(1.0)).value - 0.4).abs() < 1e-15);
        assert!((gibbs_weight(&sp.beta2, ExtReal::Finite(1.0)).value - 0.45).abs() < 1e-15);
        let top = gibbs_weight(&sp.beta1, ExtReal::PosInf);
        assert_eq!((top.value, top.degenerate), (0.0, true));
        assert_eq!(gibbs_weight(&sp.beta1, ExtReal::NegInf).value, 1.0);
    }

    #[test]
    fn runs_follow_segments() {
        let m = ModelParams::reference();
        let aux = build_aux(&m, AuxTarget::Mu).unwrap();
        let runs = aux.runs_between(1, 20).unwrap();
        assert_eq!(runs.iter().map(|r| (r.lo, r.hi)).collect::<Vec<_>>(), vec![(1, 2), (2, 16), (16, 20)]);
        assert_eq!(runs[1].rule, LevelRule { contraction: 2.2, prob: 0.45 });
        assert_eq!(aux.weight_at(17).unwrap(), 0.4);
        assert!(aux.weight_at(0).is_err());
        assert_eq!(aux.count_levels(20, |r| *r == WeightRole::BaseQ), 14);
    }

    proptest! {
        #[test]
        fn gibbs_complement_identity(s in -30.0f64..30.0, base in 2.05f64..40.0, p in 0.02f64..0.5) {
            let f = BetaFunction::new(base, p);
            let w = gibbs_weight(&f, ExtReal::Finite(s)).value;
            let log_scale = f.log_base() * f.value(s);
            let total = (log_scale + log_add_exp(s * p.ln(), s * (1.0 - p).ln())).exp();
            prop_assert!((total - 1.0).abs() < 1e-14);
            prop_assert!((w + (log_scale + s * (1.0 - p).ln()).exp() - 1.0).abs() < 1e-14);
        }
    }
}
