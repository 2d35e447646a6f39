use std::fmt;

use crate::estimators::Extremes;
use crate::model::{mixed_entropy, Level, ModelError, ModelParams, Phase};
use crate::numerics::xlogx;
use crate::table::{fmt_f64, Table};

use super::{AuxError, AuxSegment, AuxSpec};

/// Whose local dimension the sequence tracks along μ′-typical points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetMeasure {
    /// `x_k = -p′_k ln p_k - (1 - p′_k) ln(1 - p_k)`.
    Mu,
    /// `y_k = -p′_k ln p′_k - (1 - p′_k) ln(1 - p′_k)`.
    MuPrime,
}

impl fmt::Display for TargetMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetMeasure::Mu => "mu",
            TargetMeasure::MuPrime => "mu_prime",
        })
    }
}

/// Running sums up to level `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrongLawPoint {
    pub n: Level,
    pub sum_x: f64,
    pub sum_b: f64,
    /// `R(n) = Σx_k / Σb_k`.
    pub ratio: f64,
    /// Smallest and largest `x_k / b_k` over `k ≤ n`.
    pub term_min: f64,
    pub term_max: f64,
}

impl StrongLawPoint {
    /// `term_min ≤ R(n) ≤ term_max`, allowing only the rounding of the two sums.
    pub fn mediant_holds(&self) -> bool {
        let tol = 1e-12 * self.ratio.abs().max(1e-300);
        self.ratio >= self.term_min - tol && self.ratio <= self.term_max + tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrongLawSeq {
    pub target: TargetMeasure,
    /// One point per requested level, ascending.
    pub points: Vec<StrongLawPoint>,
    /// Points at the schedule breakpoints up to the deepest requested level.
    pub snapshots: Vec<StrongLawPoint>,
}

impl StrongLawSeq {
    pub fn ratio_at(&self, n: Level) -> Option<f64> {
        self.points.iter().chain(&self.snapshots).find(|p| p.n == n).map(|p| p.ratio)
    }

    /// Min and max of `R` over the requested levels.
    pub fn extremes(&self) -> Option<Extremes> {
        Extremes::of(self.points.iter().map(|p| (p.n, p.ratio)))
    }

    pub fn mediant_holds(&self) -> bool {
        self.points.iter().chain(&self.snapshots).all(StrongLawPoint::mediant_holds)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["n", "target", "ratio", "term_min", "term_max"]);
        for p in &self.points {
            t.push(vec![
                p.n.to_string(),
                self.target.to_string(),
                fmt_f64(p.ratio),
                fmt_f64(p.term_min),
                fmt_f64(p.term_max),
            ]);
        }
        t
    }
}

fn entropy(w: f64) -> f64 {
    -xlogx(w, w) - xlogx(1.0 - w, 1.0 - w)
}

/// `(x_k, b_k)` on a segment.
pub(crate) fn segment_terms(params: &ModelParams, seg: &AuxSegment, target: TargetMeasure) -> (f64, f64) {
    let (base, b) = match seg.phase {
        Phase::A => (params.p(), params.a().ln()),
        Phase::B => (params.q(), params.b().ln()),
    };
    let x = match target {
        TargetMeasure::Mu => mixed_entropy(seg.weight, base).expect("base weight in (0, 1)"),
        TargetMeasure::MuPrime => entropy(seg.weight),
    };
    (x, b)
}

/// Deterministic `R(n)` at each level; constant segments are summed in closed form.
pub fn strong_law_sequence(
    params: &ModelParams,
    aux: &AuxSpec,
    target: TargetMeasure,
    levels: &[Level],
) -> Result<StrongLawSeq, AuxError> {
    if aux.contractions() != (params.a(), params.b()) {
        return Err(AuxError::ParamsMismatch);
    }
    let mut levels = levels.to_vec();
    levels.sort_unstable();
    levels.dedup();
    if levels.first() == Some(&0) {
        return Err(ModelError::LevelZero.into());
    }
    let Some(&top) = levels.last() else {
        return Ok(StrongLawSeq { target, points: Vec::new(), snapshots: Vec::new() });
    };
    if top > aux.depth() {
        return Err(ModelError::ScheduleTooShort { level: top, last: aux.depth() }.into());
    }
    let breakpoints: Vec<Level> = params.schedule().all_breakpoints().iter().copied().filter(|&n| n <= top).collect();
    let mut events: Vec<Level> = levels.iter().chain(&breakpoints).copied().collect();
    events.sort_unstable();
    events.dedup();

    let segs = aux.segments();
    let (mut idx, mut at) = (0usize, 0 as Level);
    let (mut sum_x, mut sum_b) = (0.0f64, 0.0f64);
    let (mut term_min, mut term_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut points, mut snapshots) = (Vec::new(), Vec::new());
    for n in events {
        while at < n {
            let seg = &segs[idx];
            let hi = seg.hi.min(n);
            let (x, b) = segment_terms(params, seg, target);
            let len = (hi - at) as f64;
            sum_x += len * x;
            sum_b += len * b;
            term_min = term_min.min(x / b);
            term_max = term_max.max(x / b);
            at = hi;
            if hi == seg.hi {
                idx += 1;
            }
        }
        let p = StrongLawPoint { n, sum_x, sum_b, ratio: sum_x / sum_b, term_min, term_max };
        if levels.binary_search(&n).is_ok() {
            points.push(p);
        }
        if breakpoints.binary_search(&n).is_ok() {
            snapshots.push(p);
        }
    }
    Ok(StrongLawSeq { target, points, snapshots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auxiliary::{build_aux, AuxTarget};
    use crate::spectra::Spectra;
    use crate::ExtReal;

    #[test]
    fn uniform_on_first_a_phase() {
        let m = ModelParams::reference();
        let aux = build_aux(&m, AuxTarget::Uniform).unwrap();
        let seq = strong_law_sequence(&m, &aux, TargetMeasure::Mu, &[1, 2]).unwrap();
        // H(1/2, p) / ln A
        for p in &seq.points {
            assert!((p.ratio - 0.257_361_743_668_258_3).abs() < 1e-7, "{}", p.ratio);
        }
        assert_eq!(seq.snapshots.iter().map(|p| p.n).collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn lower_h_reaches_alpha_at_n7() {
        let m = ModelParams::reference();
        let sp = Spectra::new(&m);
        let alpha = sp.beta1.prime(ExtReal::Finite(3.0));
        let aux = build_aux(&m, AuxTarget::LowerH(alpha)).unwrap();
        let n7 = m.schedule().breakpoint(7).unwrap();
        let seq = strong_law_sequence(&m, &aux, TargetMeasure::Mu, &[n7]).unwrap();
        assert!((seq.ratio_at(n7).unwrap() - alpha).abs() < 1e-3);
    }

    #[test]
    fn mu_itself_at_deep_breakpoints() {
        let m = ModelParams::reference();
        let aux = build_aux(&m, AuxTarget::Mu).unwrap();
        let (n7, n8) = (m.schedule().breakpoint(7).unwrap(), m.schedule().breakpoint(8).unwrap());
        let seq = strong_law_sequence(&m, &aux, TargetMeasure::Mu, &[n7, n8]).unwrap();
        assert!((seq.ratio_at(n7).unwrap() - 0.242_737_6).abs() < 1e-3);
        assert!((seq.ratio_at(n8).unwrap() - 0.872_766_6).abs() < 1e-3);
        assert!(seq.mediant_holds());
        // the two targets coincide when μ′ = μ
        let prime = strong_law_sequence(&m, &aux, TargetMeasure::MuPrime, &[n7, n8]).unwrap();
        assert_eq!(prime.points, seq.points);
    }

    #[test]
    fn rejects_levels_beyond_coverage() {
        let m = ModelParams::reference();
        let aux = build_aux(&m, AuxTarget::Mu).unwrap();
        assert!(strong_law_sequence(&m, &aux, TargetMeasure::Mu, &[0]).is_err());
        assert!(strong_law_sequence(&m, &aux, TargetMeasure::Mu, &[aux.depth() + 1]).is_err());
    }
}
