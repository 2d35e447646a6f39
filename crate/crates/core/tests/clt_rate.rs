use moran_core::auxiliary::{build_aux, monte_carlo_local_dims};
use moran_core::model::Level;
use moran_core::{AuxTarget, ModelParams};

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

#[test]
fn sample_spread_shrinks_like_inverse_square_root() {
    let m = ModelParams::reference();
    let aux = build_aux(&m, AuxTarget::Mu).unwrap();
    // one long A-phase: levels (512, 65536]
    let checkpoints: Vec<Level> = (12..=16).map(|k| 1 << k).collect();
    let mc = monte_carlo_local_dims(&m, &aux, 1 << 16, &checkpoints, 4000, 3).unwrap();
    let xs: Vec<f64> = mc.rows.iter().map(|r| (r.level as f64).ln()).collect();
    let ys: Vec<f64> = mc.rows.iter().map(|r| r.d_mu.sd.ln()).collect();
    let rate = -slope(&xs, &ys);
    assert!((0.4..=0.6).contains(&rate), "spread decays like n^-{rate}");
    assert!(mc.rows.iter().all(|r| r.agrees(4.0)));
}

#[test]
fn standard_error_shrinks_with_sample_count() {
    let m = ModelParams::reference();
    let aux = build_aux(&m, AuxTarget::Mu).unwrap();
    let counts = [250usize, 1000, 4000, 16000];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &k in &counts {
        let mc = monte_carlo_local_dims(&m, &aux, 4096, &[4096], k, 17).unwrap();
        xs.push((k as f64).ln());
        ys.push(mc.rows[0].d_mu.std_error().ln());
    }
    let rate = -slope(&xs, &ys);
    assert!((0.45..=0.55).contains(&rate), "standard error decays like k^-{rate}");
}
