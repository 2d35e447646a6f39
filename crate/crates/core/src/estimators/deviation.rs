use crate::model::{Level, ModelError, ModelParams};
use crate::numerics::{binomial_exact, bisect, ln_binomial, log_add_exp};
use crate::table::{fmt_f64, Table};

use super::{log_scale, Extremes, LevelSampler};

/// Largest `(k₁+1)(k₂+1)` summed term by term in log space.
const LOG_SUM_PAIRS: u128 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMethod {
    /// Integer sum of binomial products, `n < 128`.
    Exact,
    /// Log-gamma binomials summed in log space.
    LogSum,
    /// Leading-order entropy maximisation under the window constraint.
    Entropy,
}

impl CountMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CountMethod::Exact => "exact",
            CountMethod::LogSum => "log_sum",
            CountMethod::Entropy => "entropy",
        }
    }
}

/// Number of level-`n` cylinders whose mass lies in a window.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviationCount {
    pub n: Level,
    /// `ln` of the mass window `[lo, hi]`.
    pub log_window: (f64, f64),
    pub count: Option<Level>,
    /// `-inf` for an empty count.
    pub log_count: f64,
    /// `ln r`, the common log-length at level `n`.
    pub log_scale: f64,
    pub method: CountMethod,
}

impl DeviationCount {
    /// `ln count / (-ln r)`.
    pub fn rate(&self) -> f64 {
        self.log_count / -self.log_scale
    }
}

/// `ln μ(I_w)` for `j₁` zeros among `k₁` A-levels and `j₂` among `k₂` B-levels.
struct MassForm {
    k1: Level,
    k2: Level,
    lp: (f64, f64),
    lq: (f64, f64),
}

impl MassForm {
    fn new(params: &ModelParams, n: Level) -> Result<Self, ModelError> {
        let (k1, k2) = params.level_counts(n)?;
        Ok(MassForm {
            k1,
            k2,
            lp: (params.p().ln(), (1.0 - params.p()).ln()),
            lq: (params.q().ln(), (1.0 - params.q()).ln()),
        })
    }

    fn log_mass(&self, j1: Level, j2: Level) -> f64 {
        j1 as f64 * self.lp.0
            + (self.k1 - j1) as f64 * self.lp.1
            + j2 as f64 * self.lq.0
            + (self.k2 - j2) as f64 * self.lq.1
    }
}

/// Inclusive with a relative slack of `1e-9`, so rounding never decides membership.
pub(crate) fn in_window(v: f64, lo: f64, hi: f64) -> bool {
    let tol = 1e-9 * (1.0 + v.abs());
    v >= lo - tol && v <= hi + tol
}

fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.ln() - (1.0 - x) * (1.0 - x).ln()
    }
}

/// Counts level-`n` cylinders with `ln μ(I_w) ∈ [log_lo, log_hi]`.
pub fn large_deviation_count_log_window(
    params: &ModelParams,
    n: Level,
    log_lo: f64,
    log_hi: f64,
) -> Result<DeviationCount, ModelError> {
    let form = MassForm::new(params, n)?;
    let scale = log_scale(params, n)?;
    let mk = |count: Option<Level>, log_count: f64, method| DeviationCount {
        n,
        log_window: (log_lo, log_hi),
        count,
        log_count,
        log_scale: scale,
        method,
    };
    let (k1, k2) = (form.k1, form.k2);
    if log_lo > log_hi {
        return Ok(mk(Some(0), f64::NEG_INFINITY, CountMethod::Exact));
    }
    if n < 128 {
        let mut total: Level = 0;
        for j1 in 0..=k1 {
            let c1 = binomial_exact(k1 as u32, j1 as u32).expect("fits for n < 128");
            for j2 in 0..=k2 {
                if in_window(form.log_mass(j1, j2), log_lo, log_hi) {
                    total += c1 * binomial_exact(k2 as u32, j2 as u32).expect("fits for n < 128");
                }
            }
        }
        let log_count = if total == 0 { f64::NEG_INFINITY } else { (total as f64).ln() };
        return Ok(mk(Some(total), log_count, CountMethod::Exact));
    }
    if (k1 + 1).saturating_mul(k2 + 1) <= LOG_SUM_PAIRS {
        let mut acc = f64::NEG_INFINITY;
        for j1 in 0..=k1 {
            let c1 = ln_binomial(k1, j1);
            for j2 in 0..=k2 {
                if in_window(form.log_mass(j1, j2), log_lo, log_hi) {
                    acc = log_add_exp(acc, c1 + ln_binomial(k2, j2));
                }
            }
        }
        return Ok(mk(None, acc, CountMethod::LogSum));
    }
    Ok(mk(None, entropy_count(&form, log_lo, log_hi), CountMethod::Entropy))
}

/// `max k₁h(x₁) + k₂h(x₂)` over zero-frequencies whose mass lands in the window.
fn entropy_count(form: &MassForm, lo: f64, hi: f64) -> f64 {
    let (k1, k2) = (form.k1 as f64, form.k2 as f64);
    let (a1, c1) = (form.lp.0 - form.lp.1, form.lp.1);
    let (a2, c2) = (form.lq.0 - form.lq.1, form.lq.1);
    let mass = |x1: f64, x2: f64| k1 * (c1 + a1 * x1) + k2 * (c2 + a2 * x2);
    let ent = |x1: f64, x2: f64| k1 * binary_entropy(x1) + k2 * binary_entropy(x2);
    // a ≤ 0: more zeros means less mass
    let (l_min, l_max) = (mass(1.0, 1.0), mass(0.0, 0.0));
    if hi < l_min || lo > l_max {
        return f64::NEG_INFINITY;
    }
    let centre = mass(0.5, 0.5);
    if in_window(centre, lo, hi) {
        return ent(0.5, 0.5);
    }
    let target = if centre > hi { hi } else { lo };
    let x_of = |lambda: f64, a: f64| 1.0 / (1.0 + (lambda * a).exp());
    let f = |lambda: f64| mass(x_of(lambda, a1), x_of(lambda, a2)) - target;
    let span = 800.0 / a1.abs().max(a2.abs()).max(1e-300);
    match bisect(f, -span, span, 1e-14 * span) {
        Some(lambda) => ent(x_of(lambda, a1), x_of(lambda, a2)),
        // the target sits at a vertex of the feasible box
        None => {
            if target <= l_min {
                ent(1.0, 1.0)
            } else {
                ent(0.0, 0.0)
            }
        }
    }
}

/// Cylinders with `r^{β+ε} ≤ μ(I_w) ≤ r^{α-ε}` at level `n`, `r = |I_w|`.
pub fn large_deviation_count(
    params: &ModelParams,
    n: Level,
    alpha: f64,
    beta: f64,
    eps: f64,
) -> Result<DeviationCount, ModelError> {
    let lr = log_scale(params, n)?;
    large_deviation_count_log_window(params, n, (beta + eps) * lr, (alpha - eps) * lr)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LdEstimate {
    pub eps: f64,
    /// `ε = 0` sits on the boundary of the definition.
    pub boundary: bool,
    pub extremes: Extremes,
    pub counts: Vec<DeviationCount>,
}

/// `ln count / (-ln r)` over sampled levels from breakpoint `first_index`
/// through `breakpoint_depth`; min and max stand in for liminf and limsup.
pub fn ld_spectrum_estimate(
    params: &ModelParams,
    alpha: f64,
    beta: f64,
    eps: f64,
    breakpoint_depth: usize,
    first_index: usize,
) -> Result<LdEstimate, ModelError> {
    let levels = LevelSampler::new(params.schedule(), breakpoint_depth)?.first_index(first_index).levels();
    let mut counts = Vec::with_capacity(levels.len());
    for n in levels {
        counts.push(large_deviation_count(params, n, alpha, beta, eps)?);
    }
    let extremes = Extremes::of(counts.iter().map(|c| (c.n, c.rate()))).expect("non-empty level set");
    Ok(LdEstimate { eps, boundary: eps == 0.0, extremes, counts })
}

pub fn deviation_table(counts: &[DeviationCount]) -> Table {
    let mut t = Table::new(&["n", "count", "log_count", "log_count_over_neg_log_r", "method"]);
    for c in counts {
        t.push(vec![
            c.n.to_string(),
            c.count.map(|v| v.to_string()).unwrap_or_default(),
            fmt_f64(c.log_count),
            fmt_f64(c.rate()),
            c.method.as_str().to_string(),
        ]);
    }
    t
}
