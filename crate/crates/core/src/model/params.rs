use super::schedule::{Level, LevelSchedule, Phase};
use super::ModelError;

/// One level's contraction divisor and left-child mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelRule {
    pub contraction: f64,
    pub prob: f64,
}

/// Levels `(lo, hi]` sharing one [`LevelRule`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Run {
    pub lo: Level,
    pub hi: Level,
    pub rule: LevelRule,
}

impl Run {
    pub fn len(&self) -> Level {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }
}

/// Any Moran construction whose level rules are piecewise constant.
pub trait MoranModel {
    fn rule(&self, n: Level) -> Result<LevelRule, ModelError>;

    /// Constant runs partitioning `(lo, hi]`.
    fn runs_between(&self, lo: Level, hi: Level) -> Result<Vec<Run>, ModelError>;

    /// `(inf A_n, sup A_n)`.
    fn contraction_bounds(&self) -> (f64, f64);

    fn runs_until(&self, n: Level) -> Result<Vec<Run>, ModelError> {
        self.runs_between(0, n)
    }
}

/// The two-phase parameters `(A, B, p, q, 𝒩)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    a: f64,
    b: f64,
    p: f64,
    q: f64,
    schedule: LevelSchedule,
}

impl ModelParams {
    /// Enforces the hard constraints `A > B > 2` and `p, q ∈ (0, 1/2]`.
    ///
    /// The soft inequality `-ln p/ln A < -ln(1-q)/ln B` is only reported by
    /// [`super::validate`].
    pub fn new(a: f64, b: f64, p: f64, q: f64, schedule: LevelSchedule) -> Result<Self, ModelError> {
        let report = super::validate(a, b, p, q, &schedule);
        if let Some(failed) = report.first_hard_failure() {
            return Err(ModelError::Constraint(failed.to_string()));
        }
        Ok(ModelParams { a, b, p, q, schedule })
    }

    /// The reference parameter set `A = 16, B = 2.2, p = 0.4, q = 0.45`,
    /// `N_i = 2^(i^2)`.
    pub fn reference() -> Self {
        ModelParams::new(16.0, 2.2, 0.4, 0.45, LevelSchedule::two_pow_i_squared()).expect("valid reference params")
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn schedule(&self) -> &LevelSchedule {
        &self.schedule
    }

    pub fn with_schedule(&self, schedule: LevelSchedule) -> Self {
        ModelParams { schedule, ..self.clone() }
    }

    pub fn phase_rule(&self, phase: Phase) -> LevelRule {
        match phase {
            Phase::A => LevelRule { contraction: self.a, prob: self.p },
            Phase::B => LevelRule { contraction: self.b, prob: self.q },
        }
    }

    pub fn level_counts(&self, n: Level) -> Result<(Level, Level), ModelError> {
        self.schedule.level_counts(n)
    }

    /// `ln |I_w|` shared by every level-`n` cylinder.
    pub fn log_length(&self, n: Level) -> Result<f64, ModelError> {
        let (k1, k2) = self.level_counts(n)?;
        Ok(-(k1 as f64 * self.a.ln() + k2 as f64 * self.b.ln()))
    }

    pub fn validation_report(&self) -> super::ValidationReport {
        super::validate(self.a, self.b, self.p, self.q, &self.schedule)
    }
}

impl MoranModel for ModelParams {
    fn rule(&self, n: Level) -> Result<LevelRule, ModelError> {
        Ok(self.phase_rule(self.schedule.regime(n)?))
    }

    fn runs_between(&self, lo: Level, hi: Level) -> Result<Vec<Run>, ModelError> {
        Ok(self
            .schedule
            .runs_between(lo, hi)?
            .into_iter()
            .map(|r| Run { lo: r.lo, hi: r.hi, rule: self.phase_rule(r.phase) })
            .collect())
    }

    fn contraction_bounds(&self) -> (f64, f64) {
        (self.b, self.a)
    }
}

/// The general model: level-dependent `A_n ∈ [A_min, A_max]`, `p_n ∈ [a, b]`,
/// stored as a table of constant segments.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralParams {
    /// `(last level of the segment, rule)`, ends strictly increasing.
    segments: Vec<(Level, LevelRule)>,
}

impl GeneralParams {
    pub fn new(segments: Vec<(Level, LevelRule)>) -> Result<Self, ModelError> {
        if segments.is_empty() {
            return Err(ModelError::Constraint("general model needs at least one segment".into()));
        }
        let mut prev = 0;
        for &(end, rule) in &segments {
            if end <= prev {
                return Err(ModelError::Constraint("segment ends must be strictly increasing".into()));
            }
            if !(rule.contraction > 2.0 && rule.contraction.is_finite()) {
                return Err(ModelError::Constraint(format!("A_n = {} must exceed 2", rule.contraction)));
            }
            if !(rule.prob > 0.0 && rule.prob < 1.0) {
                return Err(ModelError::Constraint(format!("p_n = {} must lie in (0, 1)", rule.prob)));
            }
            prev = end;
        }
        Ok(GeneralParams { segments })
    }

    /// Per-level rules for levels `1..=rules.len()`.
    pub fn from_levels(rules: &[LevelRule]) -> Result<Self, ModelError> {
        GeneralParams::new(rules.iter().enumerate().map(|(i, &r)| (i as Level + 1, r)).collect())
    }

    pub fn depth(&self) -> Level {
        self.segments.last().map(|s| s.0).unwrap_or(0)
    }

    /// `(a, b)` with `a ≤ p_n ≤ b`.
    pub fn prob_bounds(&self) -> (f64, f64) {
        self.segments.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, r)| {
            (lo.min(r.prob), hi.max(r.prob))
        })
    }
}

impl MoranModel for GeneralParams {
    fn rule(&self, n: Level) -> Result<LevelRule, ModelError> {
        if n == 0 {
            return Err(ModelError::LevelZero);
        }
        let idx = self.segments.partition_point(|s| s.0 < n);
        self.segments
            .get(idx)
            .map(|s| s.1)
            .ok_or(ModelError::ScheduleTooShort { level: n, last: self.depth() })
    }

    fn runs_between(&self, lo: Level, hi: Level) -> Result<Vec<Run>, ModelError> {
        let mut out = Vec::new();
        if hi <= lo {
            return Ok(out);
        }
        if hi > self.depth() {
            return Err(ModelError::ScheduleTooShort { level: hi, last: self.depth() });
        }
        let mut idx = self.segments.partition_point(|s| s.0 <= lo);
        let mut start = lo;
        while start < hi {
            let (end, rule) = self.segments[idx];
            let end = end.min(hi);
            out.push(Run { lo: start, hi: end, rule });
            start = end;
            idx += 1;
        }
        Ok(out)
    }

    fn contraction_bounds(&self) -> (f64, f64) {
        self.segments.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, r)| {
            (lo.min(r.contraction), hi.max(r.contraction))
        })
    }
}
