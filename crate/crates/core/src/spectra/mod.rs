//! Closed-form spectra: β functions, Legendre transforms, level-set and
//! joint level-set dimensions.

mod beta;
mod curve;
mod joint;

use std::fmt;

use thiserror::Error;

use crate::ext::ExtReal;
use crate::model::ModelParams;

pub use beta::{legendre_numeric, BetaFunction, BetaValue, Revision};
pub use curve::{joint_grid, joint_table, level_set_curve, JointSample, SpectrumCurve, SpectrumSample};
pub use joint::{dim_joint, joint_region_value, tangent_g, tangent_h, JointDim, Region, TangencyResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("alpha {alpha} out of range [{lo}, {hi}]")]
    AlphaOutOfRange { alpha: f64, lo: f64, hi: f64 },
    #[error("degenerate: {0}")]
    Degenerate(&'static str),
    #[error("no admissible tangency: {0}")]
    NoTangency(String),
}

/// A dimension value or the empty-set sentinel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Dim {
    Empty,
    Value(f64),
}

impl Dim {
    pub fn value(self) -> Option<f64> {
        match self {
            Dim::Value(v) => Some(v),
            Dim::Empty => None,
        }
    }

    pub fn is_empty(self) -> bool {
        self == Dim::Empty
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dim::Empty => f.write_str("empty"),
            // dimensions are non-negative; print a zero endpoint without its sign
            Dim::Value(v) => write!(f, "{:?}", v + 0.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DimKind {
    Hausdorff,
    Packing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Lower,
    Upper,
}

/// The pair `β₁` (from `A, p`) and `β₂` (from `B, q`) of a parameter set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spectra {
    pub beta1: BetaFunction,
    pub beta2: BetaFunction,
}

impl Spectra {
    pub fn new(params: &ModelParams) -> Self {
        Spectra { beta1: BetaFunction::new(params.a(), params.p()), beta2: BetaFunction::new(params.b(), params.q()) }
    }

    /// `log 2 / log A`.
    pub fn dim_h_x(&self) -> f64 {
        std::f64::consts::LN_2 / self.beta1.log_base()
    }

    /// `log 2 / log B`.
    pub fn dim_p_x(&self) -> f64 {
        std::f64::consts::LN_2 / self.beta2.log_base()
    }

    /// `min` or `max` of `β₁(s), β₂(s)`.
    pub fn tau_closed(&self, s: f64, which: Bound) -> f64 {
        let (a, b) = (self.beta1.value(s), self.beta2.value(s));
        match which {
            Bound::Lower => a.min(b),
            Bound::Upper => a.max(b),
        }
    }

    /// Dimension of the set of points with lower local dimension `α`.
    pub fn dim_lower_level_set(&self, alpha: f64, kind: DimKind) -> Dim {
        let b1 = &self.beta1;
        if b1.is_degenerate() {
            let only = self.dim_h_x();
            if (alpha - only).abs() > 1e-12 * only {
                return Dim::Empty;
            }
            return match kind {
                DimKind::Hausdorff => Dim::Value(only),
                DimKind::Packing => Dim::Value(self.dim_p_x()),
            };
        }
        if !b1.contains(alpha) {
            return Dim::Empty;
        }
        match kind {
            DimKind::Packing => Dim::Value(self.dim_p_x()),
            DimKind::Hausdorff => {
                let lo = b1.prime(ExtReal::Finite(1.0));
                let hi = b1.prime(ExtReal::Finite(0.0));
                if alpha >= lo && alpha < hi {
                    Dim::Value(alpha.min(self.dim_h_x()))
                } else {
                    Dim::Value(b1.legendre(alpha).expect("alpha in range"))
                }
            }
        }
    }

    /// Dimension of the set of points with upper local dimension `α`.
    pub fn dim_upper_level_set(&self, alpha: f64, kind: DimKind) -> Dim {
        let b2 = &self.beta2;
        if b2.is_degenerate() {
            let only = self.dim_p_x();
            if (alpha - only).abs() > 1e-12 * only {
                return Dim::Empty;
            }
            return match kind {
                DimKind::Hausdorff => Dim::Value(only.min(self.dim_h_x())),
                DimKind::Packing => Dim::Value(only),
            };
        }
        if !b2.contains(alpha) {
            return Dim::Empty;
        }
        let star = b2.legendre(alpha).expect("alpha in range");
        match kind {
            DimKind::Hausdorff => Dim::Value(self.dim_h_x().min(star)),
            DimKind::Packing => {
                let one = b2.prime(ExtReal::Finite(1.0));
                let zero = b2.prime(ExtReal::Finite(0.0));
                if alpha < one {
                    Dim::Value(alpha)
                } else if alpha < zero {
                    Dim::Value(star)
                } else {
                    Dim::Value(self.dim_p_x())
                }
            }
        }
    }

    /// `p = 1/2` or `q = 1/2`: the corresponding level-set spectrum collapses to a point.
    pub fn degeneracy(&self) -> (bool, bool) {
        (self.beta1.is_degenerate(), self.beta2.is_degenerate())
    }
}

pub fn tau_closed(params: &ModelParams, s: f64, which: Bound) -> f64 {
    Spectra::new(params).tau_closed(s, which)
}

pub fn dim_lower_level_set(params: &ModelParams, alpha: f64, kind: DimKind) -> Dim {
    Spectra::new(params).dim_lower_level_set(alpha, kind)
}

pub fn dim_upper_level_set(params: &ModelParams, alpha: f64, kind: DimKind) -> Dim {
    Spectra::new(params).dim_upper_level_set(alpha, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p0() -> Spectra {
        Spectra::new(&ModelParams::reference())
    }

    #[test]
    fn whole_set_dims() {
        let s = p0();
        assert_eq!(s.dim_h_x(), 0.25);
        assert!((s.dim_p_x() - 0.879_118_155_786_774_3).abs() < 1e-15);
    }

    #[test]
    fn tau_closed_values() {
        let s = p0();
        assert_eq!(s.tau_closed(1.0, Bound::Lower), 0.0);
        assert_eq!(s.tau_closed(1.0, Bound::Upper), 0.0);
        assert!((s.tau_closed(2.0, Bound::Lower) - 0.235_854_117_908_408_13).abs() < 1e-15);
        assert!((s.tau_closed(0.0, Bound::Lower) + 0.879_118_155_786_774_3).abs() < 1e-15);
        assert_eq!(s.tau_closed(0.0, Bound::Upper), -0.25);
    }

    #[test]
    fn lower_level_set_examples() {
        let s = p0();
        let a1 = s.beta1.prime(ExtReal::Finite(1.0));
        let a0 = s.beta1.prime(ExtReal::Finite(0.0));
        assert_eq!(s.dim_lower_level_set(a1, DimKind::Hausdorff), Dim::Value(a1));
        let at0 = s.dim_lower_level_set(a0, DimKind::Hausdorff).value().unwrap();
        assert!((at0 - 0.25).abs() < 1e-12);
        assert_eq!(s.dim_lower_level_set(0.1, DimKind::Hausdorff), Dim::Empty);
        assert_eq!(s.dim_lower_level_set(0.3, DimKind::Packing), Dim::Value(s.dim_p_x()));
    }

    #[test]
    fn upper_level_set_examples() {
        let s = p0();
        let a1 = s.beta2.prime(ExtReal::Finite(1.0));
        let a0 = s.beta2.prime(ExtReal::Finite(0.0));
        let left = s.dim_upper_level_set(a1 - 1e-12, DimKind::Packing).value().unwrap();
        let right = s.dim_upper_level_set(a1, DimKind::Packing).value().unwrap();
        assert!((left - right).abs() < 1e-9 && (right - 0.872_766_047_101_983_8).abs() < 1e-12);
        assert_eq!(s.dim_upper_level_set(a0, DimKind::Packing), Dim::Value(s.dim_p_x()));
        assert_eq!(s.dim_upper_level_set(s.beta2.alpha_max(), DimKind::Hausdorff), Dim::Value(0.0));
        assert_eq!(s.dim_upper_level_set(1.5, DimKind::Packing), Dim::Empty);
    }

    #[test]
    fn half_weight_is_degenerate() {
        let m = ModelParams::new(16.0, 2.2, 0.5, 0.45, crate::model::LevelSchedule::factorial()).unwrap();
        let s = Spectra::new(&m);
        assert_eq!(s.degeneracy(), (true, false));
        assert_eq!(s.dim_lower_level_set(0.25, DimKind::Hausdorff), Dim::Value(0.25));
        assert_eq!(s.dim_lower_level_set(0.26, DimKind::Hausdorff), Dim::Empty);
    }

    fn beta_strategy() -> impl Strategy<Value = BetaFunction> {
        (2.05f64..50.0, 0.02f64..0.49).prop_map(|(b, p)| BetaFunction::new(b, p))
    }

    proptest! {
        #[test]
        fn beta_is_concave(b in beta_strategy(), s in -30.0f64..30.0, t in -30.0f64..30.0) {
            prop_assert!(b.value(0.5 * (s + t)) >= 0.5 * (b.value(s) + b.value(t)) - 1e-12);
        }

        #[test]
        fn derivative_chain(b in beta_strategy()) {
            let at = |s: f64| b.prime(ExtReal::Finite(s));
            prop_assert!(b.alpha_min() <= at(1.0));
            prop_assert!(at(1.0) <= at(0.0));
            prop_assert!(at(0.0) <= b.alpha_max());
        }

        #[test]
        fn conjugacy_round_trip(b in beta_strategy(), s in -20.0f64..20.0) {
            let alpha = b.prime(ExtReal::Finite(s));
            let closed = s * alpha - b.value(s);
            prop_assert!((b.legendre(alpha).unwrap() - closed).abs() < 1e-6);
            prop_assert!((b.legendre_grid(alpha) - closed).abs() < 1e-6);
        }

        #[test]
        fn gibbs_normalisation(b in beta_strategy(), s in -30.0f64..30.0) {
            let w = b.gibbs(ExtReal::Finite(s));
            let lhs = (b.log_base() * b.value(s)).exp() * (b.prob().powf(s) + (1.0 - b.prob()).powf(s));
            prop_assert!((lhs - 1.0).abs() < 1e-12);
            let direct = (b.log_base() * b.value(s) + s * b.prob().ln()).exp();
            prop_assert!((w - direct).abs() < 1e-12);
        }
    }
}
