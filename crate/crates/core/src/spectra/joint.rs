use std::fmt;

use crate::ext::ExtReal;
use crate::model::ModelParams;
use crate::numerics::bisect;

use super::{BetaFunction, Dim, DimKind, SpectraError, Spectra};

const ROOT_WIDTH: f64 = 1e-13;

/// A tangent line `y = s·x - β(s)` through a prescribed anchor point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangencyResult {
    pub s: ExtReal,
    /// `g(α')` or `h(α)`: the abscissa of the point of tangency.
    pub alpha_tangent: f64,
    /// Height of the tangent line at the anchor.
    pub value: f64,
    /// `s·α_anchor - β(s) - target`.
    pub residual: f64,
    /// `g(α') ≤ β₁'(0)`; always true for `h`.
    pub admissible: bool,
}

/// Bracketed root of a monotone `f` on `[lo, ∞)` or `(-∞, hi]`, expanding outward.
fn expanding_root<F: Fn(f64) -> f64>(f: &F, anchor: f64, dir: f64) -> Option<f64> {
    let f0 = f(anchor);
    if f0 == 0.0 {
        return Some(anchor);
    }
    let mut step = 1.0;
    let mut near = anchor;
    while step < 1e6 {
        let far = anchor + dir * step;
        let ff = f(far);
        if ff.signum() != f0.signum() || ff == 0.0 {
            let (lo, hi) = if dir > 0.0 { (near, far) } else { (far, near) };
            return bisect(f, lo, hi, ROOT_WIDTH);
        }
        near = far;
        step *= 2.0;
    }
    None
}

fn tangent_through(beta: &BetaFunction, anchor: f64, target: f64, dir: f64) -> Result<(ExtReal, f64), SpectraError> {
    let f = |s: f64| s * anchor - beta.value(s) - target;
    match expanding_root(&f, 1.0, dir) {
        Some(s) => Ok((ExtReal::Finite(s), f(s))),
        None => {
            // the tangency sits at the asymptote s = ±∞
            let end = if dir > 0.0 { ExtReal::PosInf } else { ExtReal::NegInf };
            let slope = beta.prime(end);
            if (anchor - slope).abs() <= 1e-12 {
                Ok((end, 0.0))
            } else {
                Err(SpectraError::NoTangency(format!("anchor {anchor}, target {target}")))
            }
        }
    }
}

/// Tangent to `β₁*` through `(α', β₂*(α'))`; `s₁` solves `s₁α' - β₁(s₁) = β₂*(α')`.
///
/// The root is sought on `(-∞, 1]`; it lands in `[0, 1]` exactly when the
/// tangency point `g(α') ≤ β₁'(0)`.
pub fn tangent_g(params: &ModelParams, alpha_p: f64) -> Result<TangencyResult, SpectraError> {
    tangent_g_with(&Spectra::new(params), alpha_p)
}

pub(crate) fn tangent_g_with(sp: &Spectra, alpha_p: f64) -> Result<TangencyResult, SpectraError> {
    let (b1, b2) = (&sp.beta1, &sp.beta2);
    if b1.is_degenerate() {
        return Err(SpectraError::Degenerate("beta1 is affine"));
    }
    let hi = b2.prime(ExtReal::Finite(1.0));
    if !(alpha_p >= b2.alpha_min() && alpha_p < hi) {
        return Err(SpectraError::AlphaOutOfRange { alpha: alpha_p, lo: b2.alpha_min(), hi });
    }
    let target = b2.legendre(alpha_p)?;
    let (s, residual) = tangent_through(b1, alpha_p, target, -1.0)?;
    let alpha_tangent = b1.prime(s);
    let admissible = s.to_f64() >= 0.0;
    Ok(TangencyResult { s, alpha_tangent, value: target, residual, admissible })
}

/// Tangent to `β₂*` through `(α, β₁*(α))`; `s₂ ∈ [1, ∞]` solves `s₂α - β₂(s₂) = β₁*(α)`.
pub fn tangent_h(params: &ModelParams, alpha: f64) -> Result<TangencyResult, SpectraError> {
    tangent_h_with(&Spectra::new(params), alpha)
}

pub(crate) fn tangent_h_with(sp: &Spectra, alpha: f64) -> Result<TangencyResult, SpectraError> {
    let (b1, b2) = (&sp.beta1, &sp.beta2);
    if b2.is_degenerate() {
        return Err(SpectraError::Degenerate("beta2 is affine"));
    }
    let lo = b1.prime(ExtReal::Finite(1.0));
    if !(alpha >= lo && alpha <= b1.alpha_max()) {
        return Err(SpectraError::AlphaOutOfRange { alpha, lo, hi: b1.alpha_max() });
    }
    let target = b1.legendre(alpha)?;
    let (s, residual) = tangent_through(b2, alpha, target, 1.0)?;
    Ok(TangencyResult { s, alpha_tangent: b2.prime(s), value: target, residual, admissible: true })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    I,
    II,
    III,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::I => "I",
            Region::II => "II",
            Region::III => "III",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointDim {
    pub value: Dim,
    pub region: Option<Region>,
    /// Within `1e-9` of a region boundary or on a half-open edge.
    pub boundary: bool,
    /// `p = 1/2` or `q = 1/2`.
    pub degenerate: bool,
}

/// Dimension of `{x : lower dim = α, upper dim = α'}` with its region tag.
pub fn dim_joint(params: &ModelParams, alpha: f64, alpha_p: f64, kind: DimKind) -> JointDim {
    Spectra::new(params).dim_joint(alpha, alpha_p, kind)
}

/// Evaluates the formula attached to `region` at `(α, α')`, ignoring which region
/// the point actually falls in. Used to compare one-sided limits at boundaries.
pub fn joint_region_value(
    params: &ModelParams,
    alpha: f64,
    alpha_p: f64,
    kind: DimKind,
    region: Region,
) -> Option<f64> {
    Spectra::new(params).joint_region_value(alpha, alpha_p, kind, region)
}

const EDGE: f64 = 1e-9;

impl Spectra {
    fn in_rectangle(&self, alpha: f64, alpha_p: f64) -> bool {
        let (b1, b2) = (&self.beta1, &self.beta2);
        let ok1 = if b1.is_degenerate() { (alpha - self.dim_h_x()).abs() <= 1e-12 } else { b1.contains(alpha) };
        let ok2 = if b2.is_degenerate() { (alpha_p - self.dim_p_x()).abs() <= 1e-12 } else { b2.contains(alpha_p) };
        ok1 && ok2
    }

    pub fn classify(&self, alpha: f64, alpha_p: f64, kind: DimKind) -> Option<(Region, bool)> {
        if !self.in_rectangle(alpha, alpha_p) {
            return None;
        }
        let (b1, b2) = (&self.beta1, &self.beta2);
        let a1_one = b1.prime(ExtReal::Finite(1.0));
        let a1_zero = b1.prime(ExtReal::Finite(0.0));
        let a2_one = b2.prime(ExtReal::Finite(1.0));
        let near = |x: f64, y: f64| (x - y).abs() <= EDGE;
        let in_strip = alpha_p >= b2.alpha_min() && alpha_p < a2_one;
        let strip_edge = near(alpha_p, a2_one);
        match kind {
            DimKind::Hausdorff => {
                let in_box = alpha >= a1_one && alpha <= a1_zero && in_strip;
                let mut edge = strip_edge || near(alpha, a1_one) || near(alpha, a1_zero);
                if !in_box {
                    return Some((Region::I, edge));
                }
                if let Ok(g) = super::joint::tangent_g_with(self, alpha_p) {
                    edge |= near(alpha, g.alpha_tangent) || near(g.alpha_tangent, a1_zero);
                    if g.admissible && alpha >= g.alpha_tangent && alpha < a1_zero {
                        return Some((Region::II, edge));
                    }
                }
                Some((Region::III, edge))
            }
            DimKind::Packing => {
                let in_box = alpha >= a1_one && alpha <= b1.alpha_max() && in_strip;
                let mut edge = strip_edge || near(alpha, a1_one);
                if !in_box {
                    return Some((Region::I, edge));
                }
                if let Ok(h) = super::joint::tangent_h_with(self, alpha) {
                    edge |= near(alpha_p, h.alpha_tangent);
                    if alpha_p < h.alpha_tangent {
                        return Some((Region::II, edge));
                    }
                }
                Some((Region::III, edge))
            }
        }
    }

    pub fn joint_region_value(&self, alpha: f64, alpha_p: f64, kind: DimKind, region: Region) -> Option<f64> {
        let (b1, b2) = (&self.beta1, &self.beta2);
        match (kind, region) {
            (DimKind::Hausdorff, Region::I) => Some(
                self.dim_lower_level_set(alpha, DimKind::Hausdorff)
                    .value()?
                    .min(self.dim_upper_level_set(alpha_p, DimKind::Hausdorff).value()?),
            ),
            (DimKind::Hausdorff, Region::II) => {
                let g = super::joint::tangent_g_with(self, alpha_p).ok()?;
                let s1 = g.s.finite()?;
                Some(self.dim_h_x().min(s1 * alpha - b1.value(s1)))
            }
            (DimKind::Hausdorff, Region::III) => Some(b1.legendre(alpha).ok()?.min(b2.legendre(alpha_p).ok()?)),
            (DimKind::Packing, Region::I) => self.dim_upper_level_set(alpha_p, DimKind::Packing).value(),
            (DimKind::Packing, Region::II) => {
                let h = super::joint::tangent_h_with(self, alpha).ok()?;
                let s2 = h.s.finite()?;
                Some(s2 * alpha_p - b2.value(s2))
            }
            (DimKind::Packing, Region::III) => b2.legendre(alpha_p).ok(),
        }
    }

    pub fn dim_joint(&self, alpha: f64, alpha_p: f64, kind: DimKind) -> JointDim {
        let degenerate = self.beta1.is_degenerate() || self.beta2.is_degenerate();
        match self.classify(alpha, alpha_p, kind) {
            None => JointDim { value: Dim::Empty, region: None, boundary: false, degenerate },
            Some((region, boundary)) => {
                let v = self
                    .joint_region_value(alpha, alpha_p, kind, region)
                    .expect("region formula defined inside its region");
                JointDim { value: Dim::Value(v), region: Some(region), boundary, degenerate }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p0() -> ModelParams {
        ModelParams::reference()
    }

    #[test]
    fn g_at_reference_point() {
        let m = p0();
        let t = tangent_g(&m, 0.80).unwrap();
        assert!(t.residual.abs() <= 1e-9);
        let sp = Spectra::new(&m);
        let s1 = t.s.finite().unwrap();
        // dense scan oracle: the residual changes sign exactly once near s1
        let f = |s: f64| s * 0.80 - sp.beta1.value(s) - t.value;
        assert!(f(s1 - 1e-6) < 0.0 && f(s1 + 1e-6) > 0.0);
        assert!(t.admissible);
        assert!(t.alpha_tangent >= sp.beta1.prime(ExtReal::Finite(1.0)));
        assert!(t.alpha_tangent <= sp.beta1.prime(ExtReal::Finite(0.0)));
    }

    #[test]
    fn g_limit_at_strip_edge() {
        let m = p0();
        let sp = Spectra::new(&m);
        let a2 = sp.beta2.prime(ExtReal::Finite(1.0));
        let t = tangent_g(&m, a2 - 1e-9).unwrap();
        assert!((t.alpha_tangent - sp.beta1.prime(ExtReal::Finite(1.0))).abs() < 1e-6);
        assert!(tangent_g(&m, a2).is_err());
    }

    #[test]
    fn h_at_reference_point() {
        let m = p0();
        let sp = Spectra::new(&m);
        let t = tangent_h(&m, 0.30).unwrap();
        assert!(t.residual.abs() <= 1e-9);
        assert!(t.s.to_f64() > 1.0);
        assert!(t.alpha_tangent >= sp.beta2.alpha_min() && t.alpha_tangent < sp.beta2.prime(ExtReal::Finite(1.0)));
        let edge = tangent_h(&m, sp.beta1.prime(ExtReal::Finite(1.0)) + 1e-9).unwrap();
        assert!((edge.alpha_tangent - sp.beta2.prime(ExtReal::Finite(1.0))).abs() < 1e-6);
    }

    #[test]
    fn corner_is_region_one() {
        let m = p0();
        let sp = Spectra::new(&m);
        let a = sp.beta1.prime(ExtReal::Finite(1.0));
        let ap = sp.beta2.prime(ExtReal::Finite(1.0));
        let j = dim_joint(&m, a, ap, DimKind::Hausdorff);
        assert_eq!(j.region, Some(Region::I));
        assert!((j.value.value().unwrap() - a).abs() < 1e-12);
        assert_eq!(dim_joint(&m, a, 1.2, DimKind::Hausdorff).value, Dim::Empty);
        assert_eq!(dim_joint(&m, a, 1.2, DimKind::Packing).region, None);
    }
}
