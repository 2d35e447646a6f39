//! Finite-scale estimators: local-dimension trajectories, partition sums and
//! L^q estimates, large-deviation cylinder counts.

mod address;
mod deviation;
mod levels;

pub use address::{Address, PeriodicAddress, RateAddress};
pub use deviation::{
    deviation_table, large_deviation_count, large_deviation_count_log_window, ld_spectrum_estimate, CountMethod,
    DeviationCount,
    LdEstimate,
};
pub use levels::LevelSampler;

use crate::model::{Level, ModelError, ModelParams, MoranModel};
use crate::numerics::log_add_exp;
use crate::table::{fmt_f64, Table};

/// `d(ν, x, n) = ln ν(I_n(x)) / ln |I_n(x)|` along increasing levels.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub levels: Vec<Level>,
    pub values: Vec<f64>,
    /// Indices into `levels` that fall on a checkpoint level.
    pub checkpoints: Vec<usize>,
}

impl Trajectory {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["n", "d", "checkpoint"]);
        for (i, (n, d)) in self.levels.iter().zip(&self.values).enumerate() {
            t.push(vec![n.to_string(), fmt_f64(*d), self.checkpoints.contains(&i).to_string()]);
        }
        t
    }
}

/// `(ln ν(I_n(x)), ln |I_n(x)|)` for every level in `levels` (sorted ascending).
pub fn log_mass_and_length<M: MoranModel + ?Sized, X: Address + ?Sized>(
    model: &M,
    address: &X,
    levels: &[Level],
) -> Result<Vec<(f64, f64)>, ModelError> {
    debug_assert!(levels.windows(2).all(|w| w[0] <= w[1]));
    let mut out = Vec::with_capacity(levels.len());
    let (mut log_mass, mut log_len) = (0.0f64, 0.0f64);
    let mut at = 0;
    for &n in levels {
        for run in model.runs_between(at, n)? {
            let zeros = address
                .zeros_in(run.lo, run.hi)
                .ok_or(ModelError::AddressTooShallow { depth: address.depth() as usize, needed: run.hi as usize })?;
            log_mass += run_log_mass(zeros, run.len(), run.rule.prob);
            log_len -= run.len() as f64 * run.rule.contraction.ln();
        }
        at = n;
        out.push((log_mass, log_len));
    }
    Ok(out)
}

/// `ln` of the mass factor of `len` consecutive levels holding `zeros` zeros.
///
/// At `p = 1/2` the factor does not depend on `zeros`, and is computed so.
pub(crate) fn run_log_mass(zeros: Level, len: Level, p: f64) -> f64 {
    if p == 0.5 {
        return len as f64 * -std::f64::consts::LN_2;
    }
    weighted_log(zeros, p) + weighted_log(len - zeros, 1.0 - p)
}

/// `k ln p`, with `0 · ln 0 = 0`.
fn weighted_log(k: Level, p: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * p.ln()
    }
}

/// Local-dimension trajectory of `model` at the point `address`.
pub fn local_dim_trajectory<M: MoranModel + ?Sized, X: Address + ?Sized>(
    model: &M,
    address: &X,
    levels: &[Level],
    checkpoint_levels: &[Level],
) -> Result<Trajectory, ModelError> {
    let mut levels = levels.to_vec();
    levels.sort_unstable();
    levels.dedup();
    levels.retain(|&n| n > 0);
    let values = log_mass_and_length(model, address, &levels)?.into_iter().map(|(m, l)| m / l).collect();
    let checkpoints = levels.iter().enumerate().filter(|(_, n)| checkpoint_levels.contains(n)).map(|(i, _)| i).collect();
    Ok(Trajectory { levels, values, checkpoints })
}

/// `ln Σ_{|w| = n} ν(I_w)^s` in closed form.
pub fn partition_sum<M: MoranModel + ?Sized>(model: &M, n: Level, s: f64) -> Result<f64, ModelError> {
    if s == 1.0 {
        // mass conservation, exact rather than a sum of rounding errors
        model.runs_until(n)?;
        return Ok(0.0);
    }
    let mut total = 0.0;
    for run in model.runs_until(n)? {
        let p = run.rule.prob;
        total += run.len() as f64 * log_add_exp(s * p.ln(), s * (1.0 - p).ln());
    }
    Ok(total)
}

/// `ln |I_w|` at level `n`.
pub fn log_scale<M: MoranModel + ?Sized>(model: &M, n: Level) -> Result<f64, ModelError> {
    Ok(-model.runs_until(n)?.iter().map(|r| r.len() as f64 * r.rule.contraction.ln()).sum::<f64>())
}

/// `ln Σ ν(I_w)^s / ln r` at level `n`.
pub fn tau_estimate<M: MoranModel + ?Sized>(model: &M, n: Level, s: f64) -> Result<f64, ModelError> {
    Ok(partition_sum(model, n, s)? / log_scale(model, n)?)
}

/// Extremes of a sequence over sampled levels, with the levels attaining them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extremes {
    pub lower: f64,
    pub lower_level: Level,
    pub upper: f64,
    pub upper_level: Level,
}

impl Extremes {
    pub fn of(points: impl IntoIterator<Item = (Level, f64)>) -> Option<Self> {
        let mut it = points.into_iter();
        let (n0, v0) = it.next()?;
        let mut e = Extremes { lower: v0, lower_level: n0, upper: v0, upper_level: n0 };
        for (n, v) in it {
            if v < e.lower {
                e.lower = v;
                e.lower_level = n;
            }
            if v > e.upper {
                e.upper = v;
                e.upper_level = n;
            }
        }
        Some(e)
    }
}

/// Estimates of `(τ̲(s), τ̄(s))` as min/max of [`tau_estimate`] over the
/// breakpoints `N_1..=N_depth` and their geometric midpoints.
pub fn tau_liminf_limsup(params: &ModelParams, s: f64, breakpoint_depth: usize) -> Result<Extremes, ModelError> {
    let levels = LevelSampler::new(params.schedule(), breakpoint_depth)?.levels();
    let mut pts = Vec::with_capacity(levels.len());
    for n in levels {
        pts.push((n, tau_estimate(params, n, s)?));
    }
    Ok(Extremes::of(pts).expect("at least one breakpoint"))
}

pub fn tau_table(params: &ModelParams, s_values: &[f64], levels: &[Level]) -> Result<Table, ModelError> {
    let mut t = Table::new(&["n", "s", "tau_estimate"]);
    for &n in levels {
        for &s in s_values {
            t.push(vec![n.to_string(), fmt_f64(s), fmt_f64(tau_estimate(params, n, s)?)]);
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{cylinder, LevelSchedule, Word};
    use crate::spectra::Spectra;

    fn p0_factorial() -> ModelParams {
        ModelParams::new(16.0, 2.2, 0.4, 0.45, LevelSchedule::factorial()).unwrap()
    }

    #[test]
    fn single_level_all_zeros() {
        let t = local_dim_trajectory(&ModelParams::reference(), &Word::zeros(1), &[1], &[]).unwrap();
        assert!((t.values[0] - 0.330_482_023_721_840_6).abs() < 1e-15);
    }

    #[test]
    fn uniform_weights_give_length_ratio() {
        let m = ModelParams::new(16.0, 2.2, 0.5, 0.5, LevelSchedule::factorial()).unwrap();
        let addr = PeriodicAddress::new("0111".parse().unwrap());
        let t = local_dim_trajectory(&m, &addr, &[1, 2, 6, 24, 100], &[]).unwrap();
        assert_eq!(t.values[0], 0.25);
        for (n, d) in t.levels.iter().zip(&t.values) {
            let (k1, k2) = m.level_counts(*n).unwrap();
            let expect = (*n as f64) * 2f64.ln() / (k1 as f64 * 16f64.ln() + k2 as f64 * 2.2f64.ln());
            assert!((d - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn alternating_matches_cylinder() {
        let m = p0_factorial();
        let w: Word = "010101".parse().unwrap();
        let t = local_dim_trajectory(&m, &PeriodicAddress::new("01".parse().unwrap()), &[6], &[6]).unwrap();
        let c = cylinder(&m, &w).unwrap();
        assert!((t.values[0] - c.log_measure / c.log_length).abs() < 1e-14);
        assert_eq!(t.checkpoints, vec![0]);
    }

    #[test]
    fn partition_sum_examples() {
        let m = p0_factorial();
        assert!((partition_sum(&m, 2, 2.0).unwrap() - 0.2626f64.ln()).abs() < 1e-14);
        assert!(partition_sum(&m, 500, 1.0).unwrap().abs() < 1e-12);
        assert!((partition_sum(&m, 10, 0.0).unwrap() - 10.0 * 2f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn tau_at_deep_breakpoints() {
        let m = ModelParams::reference();
        let n7 = m.schedule().breakpoint(7).unwrap();
        let n8 = m.schedule().breakpoint(8).unwrap();
        assert!((tau_estimate(&m, n7, 2.0).unwrap() - 0.235_876_001_234_604_7).abs() < 1e-9);
        assert!((tau_estimate(&m, n8, 2.0).unwrap() - 0.866_430_493_473_826).abs() < 1e-9);
        assert_eq!(tau_estimate(&m, n8, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn tau_extremes_against_closed_form() {
        let m = ModelParams::reference();
        let sp = Spectra::new(&m);
        for s in [-2.0, -0.5, 0.0, 0.5, 2.0, 4.0] {
            let e = tau_liminf_limsup(&m, s, 8).unwrap();
            let (b1, b2) = (sp.beta1.value(s), sp.beta2.value(s));
            assert!((e.lower - b1.min(b2)).abs() < 1e-3, "s = {s}");
            assert!((e.upper - b1.max(b2)).abs() < 1e-3, "s = {s}");
        }
        let one = tau_liminf_limsup(&m, 1.0, 8).unwrap();
        assert_eq!((one.lower, one.upper), (0.0, 0.0));
    }
}
