//! Brute-force references built by enumerating every level-`n` cylinder.
#![allow(dead_code)]

use moran_core::model::{Level, ModelParams, Phase};

/// `ln μ(I_w)` for all `2^n` words of length `n`, in lexicographic order.
pub fn enumerate_log_masses(params: &ModelParams, n: Level) -> Vec<f64> {
    let mut out = vec![0.0f64];
    for k in 1..=n {
        let w = match params.schedule().regime(k).unwrap() {
            Phase::A => params.p(),
            Phase::B => params.q(),
        };
        let (l0, l1) = (w.ln(), (1.0 - w).ln());
        out = out.iter().flat_map(|&m| [m + l0, m + l1]).collect();
    }
    out
}

/// `μ(I_w)` as plain products.
pub fn enumerate_masses(params: &ModelParams, n: Level) -> Vec<f64> {
    let mut out = vec![1.0f64];
    for k in 1..=n {
        let w = match params.schedule().regime(k).unwrap() {
            Phase::A => params.p(),
            Phase::B => params.q(),
        };
        out = out.iter().flat_map(|&m| [m * w, m * (1.0 - w)]).collect();
    }
    out
}

pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Cylinders with `ln μ ∈ [lo, hi]`, with the same relative slack as the library.
pub fn brute_count(log_masses: &[f64], lo: f64, hi: f64) -> u128 {
    log_masses
        .iter()
        .filter(|&&v| {
            let tol = 1e-9 * (1.0 + v.abs());
            v >= lo - tol && v <= hi + tol
        })
        .count() as u128
}

/// `ln |I_w|` at level `n`.
pub fn log_length(params: &ModelParams, n: Level) -> f64 {
    let (k1, k2) = params.level_counts(n).unwrap();
    -(k1 as f64) * params.a().ln() - k2 as f64 * params.b().ln()
}

/// Prints and records one acceptance line.
pub struct Report {
    failures: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Report { failures: Vec::new() }
    }

    pub fn line(&mut self, id: &str, pass: bool, detail: impl AsRef<str>, started: std::time::Instant) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {id}: {} ({:.2?})", detail.as_ref(), started.elapsed());
        if !pass {
            self.failures.push(id.to_string());
        }
    }

    pub fn failures(&self) -> &[String] {
        &self.failures
    }
}
