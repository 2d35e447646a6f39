use std::fmt;
use std::str::FromStr;

use crate::ext::ExtReal;
use crate::model::{mixed_entropy, Level, ModelParams, Phase};
use crate::numerics::isqrt;
use crate::spectra::{tangent_g, tangent_h, DimKind, Region, Spectra, SpectraError};

use super::{gibbs_weight, AuxError, AuxSegment, AuxSpec, WeightRole};

/// Relative slack kept on the balance inequalities so that any reasonable
/// re-evaluation in floating point still sees them hold.
const BALANCE_SLACK: f64 = 1e-12;

/// Sub-case of the joint constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum JointCase {
    /// Tilted weights on both phases.
    TwoGibbs,
    /// A phase split into a fixed-weight stretch and a filler, balanced against the other phase.
    Linear,
    /// Phase split at the geometric mean between a maximiser and the target weight.
    Curved,
    /// Split driven by the tangent point `g(α')` or `h(α)`.
    Tangent,
}

impl JointCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            JointCase::TwoGibbs => "two_gibbs",
            JointCase::Linear => "linear",
            JointCase::Curved => "curved",
            JointCase::Tangent => "tangent",
        }
    }
}

impl fmt::Display for JointCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for JointCase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two_gibbs" => Ok(JointCase::TwoGibbs),
            "linear" => Ok(JointCase::Linear),
            "curved" => Ok(JointCase::Curved),
            "tangent" => Ok(JointCase::Tangent),
            other => Err(format!("unknown joint case {other:?}")),
        }
    }
}

/// Which auxiliary measure to build.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AuxTarget {
    /// μ itself: `p` on A-phases, `q` on B-phases.
    Mu,
    /// `1/2` everywhere.
    Uniform,
    LowerH(f64),
    LowerHLinear(f64),
    UpperH(f64),
    UpperPLinear(f64),
    UpperPCurved(f64),
    /// `case = None` picks the case from the region of `(α, α')`.
    JointH { alpha: f64, alpha_prime: f64, case: Option<JointCase> },
    JointP { alpha: f64, alpha_prime: f64, case: Option<JointCase> },
}

impl AuxTarget {
    pub fn name(&self) -> &'static str {
        match self {
            AuxTarget::Mu => "mu",
            AuxTarget::Uniform => "uniform",
            AuxTarget::LowerH(_) => "lower_H",
            AuxTarget::LowerHLinear(_) => "lower_H_linear",
            AuxTarget::UpperH(_) => "upper_H",
            AuxTarget::UpperPLinear(_) => "upper_P_linear",
            AuxTarget::UpperPCurved(_) => "upper_P_curved",
            AuxTarget::JointH { .. } => "joint_H",
            AuxTarget::JointP { .. } => "joint_P",
        }
    }
}

/// A weight together with its μ-ratio `x/b` on the phase it is used in.
#[derive(Clone, Copy, Debug)]
struct Weight {
    role: WeightRole,
    value: f64,
    ratio: f64,
}

enum Plan {
    Whole(Weight),
    /// `first` on a stretch whose length keeps `l·|α - first.ratio|·ln c ≤ L·|other - α|·ln c'`,
    /// where `L` counts the levels of the other phase seen so far; `rest` afterwards.
    Balance { first: Weight, rest: Weight, alpha: f64, other_ratio: f64 },
    /// `first` until the running μ-ratio would pass `alpha`, `rest` afterwards.
    Crossing { first: Weight, rest: Weight, alpha: f64 },
    /// `first` on `(N_{j-1}, ⌊√(N_{j-1} N_j)⌋]`, `rest` afterwards.
    Sqrt { first: Weight, rest: Weight },
}

struct Ctx<'a> {
    params: &'a ModelParams,
    sp: Spectra,
}

impl Ctx<'_> {
    fn weight(&self, phase: Phase, role: WeightRole) -> Weight {
        let (base, ln_c) = match phase {
            Phase::A => (self.params.p(), self.params.a().ln()),
            Phase::B => (self.params.q(), self.params.b().ln()),
        };
        let value = match role {
            WeightRole::Gibbs1(s) => gibbs_weight(&self.sp.beta1, s).value,
            WeightRole::Gibbs2(s) => gibbs_weight(&self.sp.beta2, s).value,
            WeightRole::Half => 0.5,
            WeightRole::BaseP => self.params.p(),
            WeightRole::BaseQ => self.params.q(),
        };
        let ratio = mixed_entropy(value, base).expect("base weight in (0, 1)") / ln_c;
        Weight { role, value, ratio }
    }

    fn gibbs1(&self, alpha: f64) -> Result<Weight, AuxError> {
        Ok(self.weight(Phase::A, WeightRole::Gibbs1(self.sp.beta1.prime_inverse(alpha)?)))
    }

    fn gibbs2(&self, alpha: f64) -> Result<Weight, AuxError> {
        Ok(self.weight(Phase::B, WeightRole::Gibbs2(self.sp.beta2.prime_inverse(alpha)?)))
    }
}

fn out_of_range(target: &'static str, value: f64, range: String) -> AuxError {
    AuxError::OutOfRange { target, value, range }
}

/// Walks the schedule phase by phase and lays out the segments of each plan.
fn lay_out(params: &ModelParams, plan_a: Plan, plan_b: Plan, provenance: String) -> Result<AuxSpec, AuxError> {
    let schedule = params.schedule();
    let ln = [params.a().ln(), params.b().ln()];
    let mut segs: Vec<AuxSegment> = Vec::new();
    // levels per phase, and levels spent on the `first` weight of each phase
    let mut total = [0 as Level; 2];
    let mut split = [0 as Level; 2];
    let (mut sum_x, mut sum_b) = (0.0f64, 0.0f64);
    for run in schedule.runs_until(schedule.coverage())? {
        let (k, other, plan) = match run.phase {
            Phase::A => (0, 1, &plan_a),
            Phase::B => (1, 0, &plan_b),
        };
        let len = run.len();
        let (first, rest, first_len) = match *plan {
            Plan::Whole(w) => (w, w, len),
            Plan::Balance { first, rest, alpha, other_ratio } => {
                let x = (alpha - first.ratio).abs() * ln[k];
                let y = (other_ratio - alpha).abs() * ln[other] * (1.0 - BALANCE_SLACK);
                let ok = |l: Level| l == 0 || l as f64 * x <= total[other] as f64 * y;
                let budget = total[other] as f64 * y / x;
                let mut l = if budget.is_nan() { 0 } else { (budget as Level).saturating_sub(split[k]).min(len) };
                while l > 0 && !ok(split[k] + l) {
                    let step = (((split[k] + l) as f64) * 1e-13).max(1.0) as Level;
                    l = l.saturating_sub(step);
                }
                (first, rest, l)
            }
            Plan::Crossing { first, rest, alpha } => {
                let room = (alpha * sum_b - sum_x) * (1.0 - BALANCE_SLACK);
                let per_level = (first.ratio - alpha) * ln[k];
                let l = if room <= 0.0 || per_level <= 0.0 { 0 } else { ((room / per_level) as Level).min(len) };
                (first, rest, l)
            }
            Plan::Sqrt { first, rest } => {
                let mid = match run.lo.checked_mul(run.hi) {
                    Some(v) => isqrt(v),
                    None => ((run.lo as f64).sqrt() * (run.hi as f64).sqrt()) as Level,
                }
                .clamp(run.lo, run.hi);
                (first, rest, mid - run.lo)
            }
        };
        let mut push = |lo: Level, hi: Level, w: Weight| {
            if hi > lo {
                segs.push(AuxSegment { lo, hi, phase: run.phase, weight: w.value, role: w.role });
                sum_x += (hi - lo) as f64 * w.ratio * ln[k];
                sum_b += (hi - lo) as f64 * ln[k];
            }
        };
        push(run.lo, run.lo + first_len, first);
        push(run.lo + first_len, run.hi, rest);
        total[k] += len;
        split[k] += first_len;
    }
    Ok(AuxSpec::from_segments(params.a(), params.b(), segs, provenance))
}

fn joint_case(sp: &Spectra, alpha: f64, alpha_p: f64, kind: DimKind) -> Result<(JointCase, Region), AuxError> {
    let (b1, b2) = (&sp.beta1, &sp.beta2);
    if b1.is_degenerate() || b2.is_degenerate() {
        return Err(SpectraError::Degenerate("joint constructions need p, q < 1/2").into());
    }
    let (region, _) = sp.classify(alpha, alpha_p, kind).ok_or_else(|| {
        out_of_range(
            "joint",
            alpha,
            format!(
                "[{}, {}] x [{}, {}] (alpha' = {alpha_p})",
                b1.alpha_min(),
                b1.alpha_max(),
                b2.alpha_min(),
                b2.alpha_max()
            ),
        )
    })?;
    let one1 = b1.prime(ExtReal::Finite(1.0));
    let zero1 = b1.prime(ExtReal::Finite(0.0));
    let one2 = b2.prime(ExtReal::Finite(1.0));
    let case = match (kind, region) {
        (DimKind::Hausdorff, Region::I) => {
            if alpha < one1 || alpha > zero1 {
                JointCase::TwoGibbs
            } else {
                JointCase::Linear
            }
        }
        (DimKind::Packing, Region::I) => {
            if alpha_p >= one2 {
                JointCase::Curved
            } else {
                JointCase::Linear
            }
        }
        (_, Region::II) => JointCase::Tangent,
        (_, Region::III) => JointCase::TwoGibbs,
    };
    Ok((case, region))
}

/// Segment table of the auxiliary measure for `target`.
pub fn build_aux(params: &ModelParams, target: AuxTarget) -> Result<AuxSpec, AuxError> {
    let ctx = Ctx { params, sp: Spectra::new(params) };
    let (b1, b2) = (ctx.sp.beta1, ctx.sp.beta2);
    let one1 = b1.prime(ExtReal::Finite(1.0));
    let zero1 = b1.prime(ExtReal::Finite(0.0));
    let one2 = b2.prime(ExtReal::Finite(1.0));
    let zero2 = b2.prime(ExtReal::Finite(0.0));
    let half_a = ctx.weight(Phase::A, WeightRole::Half);
    let half_b = ctx.weight(Phase::B, WeightRole::Half);
    let base_p = ctx.weight(Phase::A, WeightRole::BaseP);
    let base_q = ctx.weight(Phase::B, WeightRole::BaseQ);
    let name = target.name();
    match target {
        AuxTarget::Mu => lay_out(params, Plan::Whole(base_p), Plan::Whole(base_q), "mu: p on A, q on B".into()),
        AuxTarget::Uniform => {
            lay_out(params, Plan::Whole(half_a), Plan::Whole(half_b), "uniform: 1/2 on A and B".into())
        }
        AuxTarget::LowerH(alpha) => {
            let w = ctx.gibbs1(alpha)?;
            let tag = format!("lower_H(alpha={alpha}): {} on A, 1/2 on B", w.role);
            lay_out(params, Plan::Whole(w), Plan::Whole(half_b), tag)
        }
        AuxTarget::LowerHLinear(alpha) => {
            if !(alpha > one1 && alpha < zero1) {
                return Err(out_of_range(name, alpha, format!("({one1}, {zero1})")));
            }
            let plan = Plan::Balance { first: base_p, rest: half_a, alpha, other_ratio: base_q.ratio };
            let tag = format!("lower_H_linear(alpha={alpha}): p then 1/2 on A (floor balance), q on B");
            lay_out(params, plan, Plan::Whole(base_q), tag)
        }
        AuxTarget::UpperH(alpha) => {
            let w = ctx.gibbs2(alpha)?;
            let tag = format!("upper_H(alpha={alpha}): 1/2 on A, {} on B", w.role);
            lay_out(params, Plan::Whole(half_a), Plan::Whole(w), tag)
        }
        AuxTarget::UpperPLinear(alpha) => {
            if !(alpha >= b2.alpha_min() && alpha < one2) {
                return Err(out_of_range(name, alpha, format!("[{}, {one2})", b2.alpha_min())));
            }
            let w = ctx.gibbs2(alpha)?;
            // q-stretch length from the A-levels seen so far, so the running ratio climbs to α
            let plan = Plan::Balance { first: base_q, rest: w, alpha, other_ratio: base_p.ratio };
            let tag = format!("upper_P_linear(alpha'={alpha}): p on A, q then {} on B (floor balance)", w.role);
            lay_out(params, Plan::Whole(base_p), plan, tag)
        }
        AuxTarget::UpperPCurved(alpha) => {
            if !(alpha > one2 && alpha <= b2.alpha_max()) {
                return Err(out_of_range(name, alpha, format!("({one2}, {}]", b2.alpha_max())));
            }
            let w = ctx.gibbs2(alpha)?;
            let w0 = ctx.gibbs2(alpha.min(zero2))?;
            let tag = format!(
                "upper_P_curved(alpha={alpha}): 1/2 on A, {} then {} on B split at the geometric mean; phase-matched",
                w0.role, w.role
            );
            lay_out(params, Plan::Whole(half_a), Plan::Sqrt { first: w0, rest: w }, tag)
        }
        AuxTarget::JointH { alpha, alpha_prime, case } => {
            let (found, region) = joint_case(&ctx.sp, alpha, alpha_prime, DimKind::Hausdorff)?;
            if let Some(requested) = case.filter(|c| *c != found) {
                return Err(AuxError::CaseMismatch { target: name, requested, found });
            }
            let w2 = ctx.gibbs2(alpha_prime)?;
            let head = format!("joint_H(alpha={alpha}, alpha'={alpha_prime}) region {region} case {found}");
            match found {
                JointCase::Linear => {
                    let plan = Plan::Balance { first: base_p, rest: half_a, alpha, other_ratio: w2.ratio };
                    let tag = format!("{head}: p then 1/2 on A balanced against {} on B; phase-matched", w2.role);
                    lay_out(params, plan, Plan::Whole(w2), tag)
                }
                JointCase::Tangent => {
                    let g = tangent_g(params, alpha_prime)?;
                    let w1 = ctx.weight(Phase::A, WeightRole::Gibbs1(g.s));
                    let plan = Plan::Balance { first: w1, rest: half_a, alpha, other_ratio: w2.ratio };
                    let tag = format!("{head}: {} then 1/2 on A (g = {}), {} on B", w1.role, g.alpha_tangent, w2.role);
                    lay_out(params, plan, Plan::Whole(w2), tag)
                }
                _ => {
                    let w1 = ctx.gibbs1(alpha)?;
                    let tag = format!("{head}: {} on A, {} on B", w1.role, w2.role);
                    lay_out(params, Plan::Whole(w1), Plan::Whole(w2), tag)
                }
            }
        }
        AuxTarget::JointP { alpha, alpha_prime, case } => {
            let (found, region) = joint_case(&ctx.sp, alpha, alpha_prime, DimKind::Packing)?;
            if let Some(requested) = case.filter(|c| *c != found) {
                return Err(AuxError::CaseMismatch { target: name, requested, found });
            }
            let w1 = ctx.gibbs1(alpha)?;
            let w2 = ctx.gibbs2(alpha_prime)?;
            let head = format!("joint_P(alpha={alpha}, alpha'={alpha_prime}) region {region} case {found}");
            match found {
                JointCase::Curved => {
                    let w0 = ctx.gibbs2(alpha_prime.min(zero2))?;
                    let tag = format!(
                        "{head}: {} on A, {} then {} on B split at the geometric mean; phase-matched",
                        w1.role, w0.role, w2.role
                    );
                    lay_out(params, Plan::Whole(w1), Plan::Sqrt { first: w0, rest: w2 }, tag)
                }
                JointCase::Linear => {
                    let tag = format!(
                        "{head}: {} then p on A split at the geometric mean, q then {} on B split at the crossing of alpha'",
                        w1.role, w2.role
                    );
                    let plan_b = Plan::Crossing { first: base_q, rest: w2, alpha: alpha_prime };
                    lay_out(params, Plan::Sqrt { first: w1, rest: base_p }, plan_b, tag)
                }
                JointCase::Tangent => {
                    let h = tangent_h(params, alpha)?;
                    let wh = ctx.weight(Phase::B, WeightRole::Gibbs2(h.s));
                    let tag = format!(
                        "{head}: {} on A, {} (h = {}) then {} on B split at the crossing of alpha'",
                        w1.role, wh.role, h.alpha_tangent, w2.role
                    );
                    let plan_b = Plan::Crossing { first: wh, rest: w2, alpha: alpha_prime };
                    lay_out(params, Plan::Whole(w1), plan_b, tag)
                }
                JointCase::TwoGibbs => {
                    let tag = format!("{head}: {} on A, {} on B", w1.role, w2.role);
                    lay_out(params, Plan::Whole(w1), Plan::Whole(w2), tag)
                }
            }
        }
    }
}
