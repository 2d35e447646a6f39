use crate::ext::ExtReal;
use crate::model::mixed_entropy;
use crate::numerics::{golden_min, log_add_exp};

use super::SpectraError;

/// `β(s) = -ln(prob^s + (1-prob)^s) / log_base`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaFunction {
    log_base: f64,
    prob: f64,
    ln_p: f64,
    ln_q: f64,
}

/// What `β` looks like at a point of the extended line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BetaValue {
    Finite(f64),
    /// `β(s) ≈ slope·s + intercept` as `s → ±∞`.
    Asymptote { slope: f64, intercept: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Revision {
    /// Chord on `(0, 1)`.
    One,
    /// Tangent lines outside `[0, 1]`.
    Two,
}

impl BetaFunction {
    /// `base > 1`, `prob ∈ (0, 1/2]`.
    pub fn new(base: f64, prob: f64) -> Self {
        assert!(base > 1.0 && prob > 0.0 && prob <= 0.5, "invalid beta parameters");
        BetaFunction { log_base: base.ln(), prob, ln_p: prob.ln(), ln_q: (1.0 - prob).ln() }
    }

    pub fn log_base(&self) -> f64 {
        self.log_base
    }

    pub fn prob(&self) -> f64 {
        self.prob
    }

    /// `prob = 1/2`: `β` is affine and `β'` constant.
    pub fn is_degenerate(&self) -> bool {
        self.prob == 0.5
    }

    pub fn value(&self, s: f64) -> f64 {
        if s == 0.0 {
            return -std::f64::consts::LN_2 / self.log_base;
        }
        -log_add_exp(s * self.ln_p, s * self.ln_q) / self.log_base
    }

    pub fn eval(&self, s: ExtReal) -> BetaValue {
        match s {
            ExtReal::Finite(v) => BetaValue::Finite(self.value(v)),
            end => {
                let intercept = if self.is_degenerate() { -std::f64::consts::LN_2 / self.log_base } else { 0.0 };
                BetaValue::Asymptote { slope: self.prime(end), intercept }
            }
        }
    }

    /// Weight `p^s / (p^s + (1-p)^s)` of the left child under the tilted measure.
    pub fn gibbs(&self, s: ExtReal) -> f64 {
        match s {
            ExtReal::PosInf if !self.is_degenerate() => 0.0,
            ExtReal::NegInf if !self.is_degenerate() => 1.0,
            ExtReal::Finite(v) => 1.0 / (1.0 + (v * (self.ln_q - self.ln_p)).exp()),
            _ => 0.5,
        }
    }

    pub fn prime(&self, s: ExtReal) -> f64 {
        let w = self.gibbs(s);
        mixed_entropy(w, self.prob).expect("prob in (0, 1)") / self.log_base
    }

    /// `β'(+∞)`, the smallest admissible α.
    pub fn alpha_min(&self) -> f64 {
        self.prime(ExtReal::PosInf)
    }

    /// `β'(-∞)`, the largest admissible α.
    pub fn alpha_max(&self) -> f64 {
        self.prime(ExtReal::NegInf)
    }

    pub fn contains(&self, alpha: f64) -> bool {
        alpha >= self.alpha_min() && alpha <= self.alpha_max()
    }

    fn check_range(&self, alpha: f64) -> Result<(), SpectraError> {
        if self.contains(alpha) {
            Ok(())
        } else {
            Err(SpectraError::AlphaOutOfRange { alpha, lo: self.alpha_min(), hi: self.alpha_max() })
        }
    }

    /// `s` with `β'(s) = α`; the interval endpoints map to `±∞`.
    pub fn prime_inverse(&self, alpha: f64) -> Result<ExtReal, SpectraError> {
        if self.is_degenerate() {
            return Err(SpectraError::Degenerate("beta-prime constant"));
        }
        self.check_range(alpha)?;
        if alpha == self.alpha_min() {
            return Ok(ExtReal::PosInf);
        }
        if alpha == self.alpha_max() {
            return Ok(ExtReal::NegInf);
        }
        // β'(s) = H(w, p)/L is affine in the Gibbs weight w, which inverts in closed form
        let r = self.ln_q - self.ln_p;
        let w = (alpha * self.log_base + self.ln_q) / r;
        let mut s = ((1.0 - w) / w).ln() / r;
        // one Newton step on β'(s) - α; β''(s) = -w(1-w) r² / L
        for _ in 0..2 {
            let ws = self.gibbs(ExtReal::Finite(s));
            let d2 = -ws * (1.0 - ws) * r * r / self.log_base;
            let f = self.prime(ExtReal::Finite(s)) - alpha;
            if d2 != 0.0 && f != 0.0 {
                let step = f / d2;
                if step.is_finite() {
                    s -= step;
                }
            }
        }
        Ok(ExtReal::Finite(s))
    }

    /// `β*(α) = inf_s (αs - β(s))` in closed form.
    pub fn legendre(&self, alpha: f64) -> Result<f64, SpectraError> {
        if self.is_degenerate() {
            let only = std::f64::consts::LN_2 / self.log_base;
            return if (alpha - only).abs() <= 1e-12 * only {
                Ok(only)
            } else {
                Err(SpectraError::AlphaOutOfRange { alpha, lo: only, hi: only })
            };
        }
        match self.prime_inverse(alpha)? {
            ExtReal::Finite(s) => Ok(s * alpha - self.value(s)),
            end => match self.eval(end) {
                BetaValue::Asymptote { intercept, .. } => Ok(-intercept),
                BetaValue::Finite(_) => unreachable!(),
            },
        }
    }

    /// Grid-infimum Legendre transform over `s ∈ [-60, 60]`.
    ///
    /// Independent of [`Self::prime_inverse`]; used to cross-check [`Self::legendre`].
    pub fn legendre_grid(&self, alpha: f64) -> f64 {
        legendre_numeric(|s| self.value(s), alpha, &[-60.0, 60.0])
    }

    /// `β̃₁` (chord) or `β̃₂` (tangent extensions).
    pub fn revised(&self, which: Revision, s: f64) -> f64 {
        match which {
            Revision::One => {
                if s > 0.0 && s < 1.0 {
                    (1.0 - s) * self.value(0.0) + s * self.value(1.0)
                } else {
                    self.value(s)
                }
            }
            Revision::Two => {
                if s < 0.0 {
                    self.value(0.0) + s * self.prime(ExtReal::Finite(0.0))
                } else if s > 1.0 {
                    self.value(1.0) + (s - 1.0) * self.prime(ExtReal::Finite(1.0))
                } else {
                    self.value(s)
                }
            }
        }
    }

    /// Grid-infimum Legendre transform of the revised function on `[-60, 60]`.
    pub fn revised_legendre_grid(&self, which: Revision, alpha: f64) -> f64 {
        legendre_numeric(|s| self.revised(which, s), alpha, &[-60.0, 0.0, 1.0, 60.0])
    }
}

/// `inf_{s ∈ [knots₀, knots_last]} (αs - f(s))` for `f` concave between
/// consecutive knots.
///
/// Each piece is scanned on a uniform grid and the best cell is refined by
/// golden section.
pub fn legendre_numeric<F: Fn(f64) -> f64>(f: F, alpha: f64, knots: &[f64]) -> f64 {
    const CELLS: usize = 4000;
    let obj = |s: f64| alpha * s - f(s);
    let mut best = f64::INFINITY;
    for piece in knots.windows(2) {
        let (lo, hi) = (piece[0], piece[1]);
        let h = (hi - lo) / CELLS as f64;
        let mut k_best = 0;
        let mut v_best = f64::INFINITY;
        for k in 0..=CELLS {
            let v = obj(lo + k as f64 * h);
            if v < v_best {
                v_best = v;
                k_best = k;
            }
        }
        let a = lo + k_best.saturating_sub(1) as f64 * h;
        let b = (lo + (k_best + 1) as f64 * h).min(hi);
        let (_, v) = golden_min(obj, a, b, 1e-12);
        best = best.min(v).min(v_best);
    }
    best
}
