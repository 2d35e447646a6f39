use std::fmt;
use std::str::FromStr;

use super::ModelError;

/// Level index. Depths reach `2^64` and beyond, so levels are 128-bit.
pub type Level = u128;

/// Which contraction/weight pair governs a level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    A,
    B,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::A => "A",
            Phase::B => "B",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleKind {
    /// `N_i = i!`
    Factorial,
    /// `N_i = 2^(i^2)`
    TwoPowISquared,
    Explicit,
}

impl ScheduleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScheduleKind::Factorial => "factorial",
            ScheduleKind::TwoPowISquared => "two_pow_i_squared",
            ScheduleKind::Explicit => "explicit",
        }
    }
}

impl FromStr for ScheduleKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "factorial" => Ok(ScheduleKind::Factorial),
            "two_pow_i_squared" => Ok(ScheduleKind::TwoPowISquared),
            "explicit" => Ok(ScheduleKind::Explicit),
            other => Err(ModelError::BadSchedule(format!("unknown schedule kind '{other}'"))),
        }
    }
}

/// A maximal run of consecutive levels `(lo, hi]` sharing one phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseRun {
    pub lo: Level,
    pub hi: Level,
    pub phase: Phase,
    /// Breakpoint index `i` with `N_{i-1} = lo`-side and `N_i ≥ hi`.
    pub index: usize,
}

impl PhaseRun {
    pub fn len(&self) -> Level {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }
}

/// The increasing breakpoint sequence `N_1 < N_2 < …` with `N_0 = 0`.
///
/// Level `n` is in the A-phase iff `N_{2i} < n ≤ N_{2i+1}` for some `i ≥ 0`.
/// Generator schedules are materialised up to the last breakpoint that fits
/// in a `u128`; `max_index` only truncates what reporting code iterates over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSchedule {
    kind: ScheduleKind,
    breakpoints: Vec<Level>,
    max_index: usize,
}

impl LevelSchedule {
    pub fn factorial() -> Self {
        let mut bps = Vec::new();
        let mut acc: Level = 1;
        for i in 1u128.. {
            match acc.checked_mul(i) {
                Some(v) => {
                    acc = v;
                    bps.push(v);
                }
                None => break,
            }
        }
        // 1! = 1, 2! = 2: strictly increasing from i = 1
        let n = bps.len();
        LevelSchedule { kind: ScheduleKind::Factorial, breakpoints: bps, max_index: n }
    }

    pub fn two_pow_i_squared() -> Self {
        let bps: Vec<Level> = (1u32..).map(|i| i * i).take_while(|&e| e < 128).map(|e| 1u128 << e).collect();
        let n = bps.len();
        LevelSchedule { kind: ScheduleKind::TwoPowISquared, breakpoints: bps, max_index: n }
    }

    pub fn explicit(breakpoints: Vec<Level>) -> Result<Self, ModelError> {
        if breakpoints.is_empty() {
            return Err(ModelError::BadSchedule("explicit schedule needs at least one breakpoint".into()));
        }
        if breakpoints[0] == 0 || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ModelError::BadSchedule("breakpoints must be positive and strictly increasing".into()));
        }
        let n = breakpoints.len();
        Ok(LevelSchedule { kind: ScheduleKind::Explicit, breakpoints, max_index: n })
    }

    pub fn from_kind(kind: ScheduleKind, explicit: Option<Vec<Level>>) -> Result<Self, ModelError> {
        match kind {
            ScheduleKind::Factorial => Ok(Self::factorial()),
            ScheduleKind::TwoPowISquared => Ok(Self::two_pow_i_squared()),
            ScheduleKind::Explicit => Self::explicit(
                explicit.ok_or_else(|| ModelError::BadSchedule("explicit schedule without breakpoints".into()))?,
            ),
        }
    }

    /// Restricts the reported breakpoints to `N_1..=N_max_index`.
    pub fn with_max_index(mut self, max_index: usize) -> Result<Self, ModelError> {
        if max_index == 0 || max_index > self.breakpoints.len() {
            return Err(ModelError::BadSchedule(format!(
                "max_index {max_index} outside 1..={}",
                self.breakpoints.len()
            )));
        }
        self.max_index = max_index;
        if self.kind == ScheduleKind::Explicit {
            self.breakpoints.truncate(max_index);
        }
        Ok(self)
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    /// `N_i`, with `N_0 = 0`.
    pub fn breakpoint(&self, i: usize) -> Option<Level> {
        if i == 0 {
            Some(0)
        } else {
            self.breakpoints.get(i - 1).copied()
        }
    }

    /// `N_1..=N_max_index`.
    pub fn breakpoints(&self) -> &[Level] {
        &self.breakpoints[..self.max_index]
    }

    /// Every breakpoint the schedule can produce.
    pub fn all_breakpoints(&self) -> &[Level] {
        &self.breakpoints
    }

    /// Deepest level the schedule covers.
    pub fn coverage(&self) -> Level {
        *self.breakpoints.last().expect("non-empty schedule")
    }

    /// Index `i ≥ 1` with `N_{i-1} < n ≤ N_i`.
    pub fn phase_index(&self, n: Level) -> Result<usize, ModelError> {
        if n == 0 {
            return Err(ModelError::LevelZero);
        }
        let idx = self.breakpoints.partition_point(|&b| b < n);
        if idx == self.breakpoints.len() {
            return Err(ModelError::ScheduleTooShort { level: n, last: self.coverage() });
        }
        Ok(idx + 1)
    }

    pub fn regime(&self, n: Level) -> Result<Phase, ModelError> {
        Ok(phase_of_index(self.phase_index(n)?))
    }

    /// `(k1, k2)`: number of A-levels and B-levels in `1..=n`.
    pub fn level_counts(&self, n: Level) -> Result<(Level, Level), ModelError> {
        let mut k = (0, 0);
        for run in self.runs_until(n)? {
            match run.phase {
                Phase::A => k.0 += run.len(),
                Phase::B => k.1 += run.len(),
            }
        }
        Ok(k)
    }

    /// Phase runs partitioning `(0, n]`, clipped at `n`.
    pub fn runs_until(&self, n: Level) -> Result<Vec<PhaseRun>, ModelError> {
        self.runs_between(0, n)
    }

    /// Phase runs partitioning `(lo, hi]`.
    pub fn runs_between(&self, lo: Level, hi: Level) -> Result<Vec<PhaseRun>, ModelError> {
        let mut out = Vec::new();
        if hi <= lo {
            return Ok(out);
        }
        if hi > self.coverage() {
            return Err(ModelError::ScheduleTooShort { level: hi, last: self.coverage() });
        }
        let mut i = self.phase_index(lo + 1)?;
        let mut start = lo;
        while start < hi {
            let end = self.breakpoints[i - 1].min(hi);
            out.push(PhaseRun { lo: start, hi: end, phase: phase_of_index(i), index: i });
            start = end;
            i += 1;
        }
        Ok(out)
    }

    /// Successive ratios `N_{i+1}/N_i` over the truncated schedule.
    pub fn growth_ratios(&self) -> Vec<f64> {
        self.breakpoints().windows(2).map(|w| w[1] as f64 / w[0] as f64).collect()
    }
}

fn phase_of_index(i: usize) -> Phase {
    // (N_{i-1}, N_i] is an A-run when i is odd
    if i % 2 == 1 {
        Phase::A
    } else {
        Phase::B
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slow_counts(s: &LevelSchedule, n: Level) -> (Level, Level) {
        let mut k = (0, 0);
        for m in 1..=n {
            match s.regime(m).unwrap() {
                Phase::A => k.0 += 1,
                Phase::B => k.1 += 1,
            }
        }
        k
    }

    #[test]
    fn regimes_on_factorial() {
        let s = LevelSchedule::factorial();
        assert_eq!(&s.breakpoints()[..5], &[1, 2, 6, 24, 120]);
        assert_eq!(s.regime(1).unwrap(), Phase::A);
        assert_eq!(s.regime(2).unwrap(), Phase::B);
        assert_eq!(s.regime(3).unwrap(), Phase::A);
        assert_eq!(s.regime(7).unwrap(), Phase::B);
        assert_eq!(s.regime(0), Err(ModelError::LevelZero));
    }

    #[test]
    fn factorial_counts_at_24() {
        let s = LevelSchedule::factorial();
        assert_eq!(s.level_counts(24).unwrap(), (5, 19));
        assert_eq!(s.level_counts(0).unwrap(), (0, 0));
    }

    #[test]
    fn two_pow_counts_at_n7() {
        let s = LevelSchedule::two_pow_i_squared();
        let n7 = s.breakpoint(7).unwrap();
        assert_eq!(n7, 1u128 << 49);
        let (k1, k2) = s.level_counts(n7).unwrap();
        assert_eq!(k2, 14 + 65024 + ((1u128 << 36) - (1u128 << 25)));
        assert_eq!(k1 + k2, n7);
        assert_eq!(s.all_breakpoints().len(), 11);
    }

    #[test]
    fn breakpoint_arithmetic_matches_loop() {
        let schedules = [
            LevelSchedule::factorial(),
            LevelSchedule::two_pow_i_squared(),
            LevelSchedule::explicit(vec![3, 10, 11, 50, 400, 5_000, 100_000]).unwrap(),
        ];
        for s in &schedules {
            let top = s.coverage().min(100_000);
            let mut k = (0u128, 0u128);
            for m in 1..=top {
                match s.regime(m).unwrap() {
                    Phase::A => k.0 += 1,
                    Phase::B => k.1 += 1,
                }
                assert_eq!(s.level_counts(m).unwrap(), k, "n = {m}");
            }
        }
        let s = LevelSchedule::factorial();
        assert_eq!(s.level_counts(720).unwrap(), slow_counts(&s, 720));
    }

    #[test]
    fn exhausted_explicit_schedule() {
        let s = LevelSchedule::explicit(vec![2, 5]).unwrap();
        assert!(matches!(s.regime(6), Err(ModelError::ScheduleTooShort { .. })));
        assert!(LevelSchedule::explicit(vec![3, 3]).is_err());
        assert!(LevelSchedule::explicit(vec![0, 3]).is_err());
    }

    #[test]
    fn runs_partition_interval() {
        let s = LevelSchedule::factorial();
        let runs = s.runs_between(4, 30).unwrap();
        assert_eq!(runs.first().unwrap().lo, 4);
        assert_eq!(runs.last().unwrap().hi, 30);
        assert!(runs.windows(2).all(|w| w[0].hi == w[1].lo && w[0].phase != w[1].phase));
    }
}
