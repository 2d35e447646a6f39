use rayon::prelude::*;

use crate::table::{fmt_f64, Table};

use super::{Dim, DimKind, Region, Spectra};

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSample {
    pub alpha: f64,
    pub dim_hausdorff: Dim,
    pub dim_packing: Dim,
    pub region: Option<String>,
}

/// Samples ordered by strictly increasing α.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpectrumCurve {
    pub samples: Vec<SpectrumSample>,
}

impl SpectrumCurve {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["alpha", "dim_hausdorff", "dim_packing", "region"]);
        for s in &self.samples {
            t.push(vec![
                fmt_f64(s.alpha),
                s.dim_hausdorff.to_string(),
                s.dim_packing.to_string(),
                s.region.clone().unwrap_or_default(),
            ]);
        }
        t
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Level-set spectrum of the lower (`upper = false`) or upper local dimension
/// on `n` equispaced α covering the admissible interval.
pub fn level_set_curve(sp: &Spectra, upper: bool, n: usize) -> SpectrumCurve {
    let f = if upper { &sp.beta2 } else { &sp.beta1 };
    let samples = grid(f.alpha_min(), f.alpha_max(), n)
        .into_par_iter()
        .map(|alpha| {
            let (h, p) = if upper {
                (sp.dim_upper_level_set(alpha, DimKind::Hausdorff), sp.dim_upper_level_set(alpha, DimKind::Packing))
            } else {
                (sp.dim_lower_level_set(alpha, DimKind::Hausdorff), sp.dim_lower_level_set(alpha, DimKind::Packing))
            };
            SpectrumSample { alpha, dim_hausdorff: h, dim_packing: p, region: None }
        })
        .collect();
    SpectrumCurve { samples }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointSample {
    pub alpha: f64,
    pub alpha_prime: f64,
    pub dim_hausdorff: Dim,
    pub region_hausdorff: Option<Region>,
    pub dim_packing: Dim,
    pub region_packing: Option<Region>,
    pub boundary: bool,
}

/// `n × n` grid over the admissible rectangle, row-major in α.
pub fn joint_grid(sp: &Spectra, n: usize) -> Vec<JointSample> {
    let alphas = grid(sp.beta1.alpha_min(), sp.beta1.alpha_max(), n);
    let alphas_p = grid(sp.beta2.alpha_min(), sp.beta2.alpha_max(), n);
    alphas
        .par_iter()
        .flat_map_iter(|&alpha| {
            alphas_p.iter().map(move |&alpha_prime| {
                let h = sp.dim_joint(alpha, alpha_prime, DimKind::Hausdorff);
                let p = sp.dim_joint(alpha, alpha_prime, DimKind::Packing);
                JointSample {
                    alpha,
                    alpha_prime,
                    dim_hausdorff: h.value,
                    region_hausdorff: h.region,
                    dim_packing: p.value,
                    region_packing: p.region,
                    boundary: h.boundary || p.boundary,
                }
            })
        })
        .collect()
}

pub fn joint_table(samples: &[JointSample]) -> Table {
    let mut t = Table::new(&[
        "alpha",
        "alpha_prime",
        "dim_hausdorff",
        "region_hausdorff",
        "dim_packing",
        "region_packing",
        "boundary",
    ]);
    let tag = |r: Option<Region>| r.map(|r| r.to_string()).unwrap_or_default();
    for s in samples {
        t.push(vec![
            fmt_f64(s.alpha),
            fmt_f64(s.alpha_prime),
            s.dim_hausdorff.to_string(),
            tag(s.region_hausdorff),
            s.dim_packing.to_string(),
            tag(s.region_packing),
            s.boundary.to_string(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    #[test]
    fn curve_is_monotone_in_alpha() {
        let sp = Spectra::new(&ModelParams::reference());
        let c = level_set_curve(&sp, false, 500);
        assert_eq!(c.samples.len(), 500);
        assert!(c.samples.windows(2).all(|w| w[0].alpha < w[1].alpha));
        let t = c.to_table();
        assert_eq!(t.header, vec!["alpha", "dim_hausdorff", "dim_packing", "region"]);
        assert_eq!(t.rows.len(), 500);
    }

    #[test]
    fn joint_grid_shape() {
        let sp = Spectra::new(&ModelParams::reference());
        let g = joint_grid(&sp, 7);
        assert_eq!(g.len(), 49);
        assert!(g.iter().all(|s| s.region_hausdorff.is_some() && s.region_packing.is_some()));
        assert_eq!(joint_table(&g).rows.len(), 49);
    }
}
