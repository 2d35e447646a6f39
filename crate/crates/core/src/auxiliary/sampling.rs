use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::estimators::run_log_mass;
use crate::model::{Level, ModelError, ModelParams, Phase, Word};
use crate::table::{fmt_f64, Table};

use super::{strong_law_sequence, AuxError, AuxSpec, TargetMeasure};

/// Deepest word [`sample_point`] materialises digit by digit.
pub const MAX_EXPLICIT_DEPTH: Level = 1_000_000;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A μ′-random word: digit `k` is `0` with probability `p′_k`.
pub fn sample_point(aux: &AuxSpec, depth: Level, seed: u64) -> Result<Word, AuxError> {
    if depth > MAX_EXPLICIT_DEPTH {
        return Err(AuxError::TooDeep { depth, limit: MAX_EXPLICIT_DEPTH });
    }
    if depth > aux.depth() {
        return Err(ModelError::ScheduleTooShort { level: depth, last: aux.depth() }.into());
    }
    let mut rng = rng_for(seed, 0);
    let mut digits = Vec::with_capacity(depth as usize);
    for seg in aux.segments() {
        if seg.lo >= depth {
            break;
        }
        for _ in seg.lo..seg.hi.min(depth) {
            digits.push(if rng.gen_bool(seg.weight) { 0 } else { 1 });
        }
    }
    Ok(Word::new(digits)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleStats {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator).
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl SampleStats {
    pub fn std_error(&self) -> f64 {
        self.sd / (self.count as f64).sqrt()
    }

    /// `|mean - expected| ≤ k·se`; a zero spread only admits rounding.
    pub fn agrees_with(&self, expected: f64, k: f64) -> bool {
        let gap = (self.mean - expected).abs();
        gap <= k * self.std_error() || gap <= 1e-12 * (1.0 + expected.abs())
    }
}

#[derive(Clone, Copy, Debug)]
struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
    min: f64,
    max: f64,
}

impl Welford {
    fn new() -> Self {
        Welford { n: 0, mean: 0.0, m2: 0.0, min: f64::INFINITY, max: f64::NEG_INFINITY }
    }

    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    fn finish(&self) -> SampleStats {
        let sd = if self.n > 1 { (self.m2 / (self.n - 1) as f64).sqrt() } else { 0.0 };
        SampleStats { count: self.n, mean: self.mean, sd, min: self.min, max: self.max }
    }
}

/// Empirical `d(μ, x, n)` and `d(μ′, x, n)` at one checkpoint, beside the
/// deterministic strong-law values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McRow {
    pub level: Level,
    pub d_mu: SampleStats,
    pub d_mu_prime: SampleStats,
    pub r_mu: f64,
    pub r_mu_prime: f64,
}

impl McRow {
    pub fn agrees(&self, k: f64) -> bool {
        self.d_mu.agrees_with(self.r_mu, k) && self.d_mu_prime.agrees_with(self.r_mu_prime, k)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct McSummary {
    pub seed: u64,
    pub n_samples: usize,
    pub rows: Vec<McRow>,
}

impl McSummary {
    pub fn to_table(&self) -> Table {
        let mut t =
            Table::new(&["level", "mean_d_mu", "sd_d_mu", "mean_d_muprime", "sd_d_muprime", "deterministic_R"]);
        for r in &self.rows {
            t.push(vec![
                r.level.to_string(),
                fmt_f64(r.d_mu.mean),
                fmt_f64(r.d_mu.sd),
                fmt_f64(r.d_mu_prime.mean),
                fmt_f64(r.d_mu_prime.sd),
                fmt_f64(r.r_mu),
            ]);
        }
        t
    }
}

/// A stretch of constant weight between consecutive cut levels.
struct Piece {
    len: u64,
    weight: f64,
    base: f64,
    ends_at_checkpoint: bool,
    binomial: Binomial,
}

/// Local dimensions of μ and μ′ at `checkpoints` over `n_samples` μ′-random points.
///
/// Only zero counts per constant stretch matter, so each stretch draws one
/// binomial count instead of its digits; sample `i` uses stream `i` of the
/// master seed, which keeps the output independent of the thread count.
pub fn monte_carlo_local_dims(
    params: &ModelParams,
    aux: &AuxSpec,
    depth: Level,
    checkpoints: &[Level],
    n_samples: usize,
    seed: u64,
) -> Result<McSummary, AuxError> {
    if aux.contractions() != (params.a(), params.b()) {
        return Err(AuxError::ParamsMismatch);
    }
    if depth > aux.depth() {
        return Err(ModelError::ScheduleTooShort { level: depth, last: aux.depth() }.into());
    }
    if depth > u64::MAX as Level {
        return Err(AuxError::TooDeep { depth, limit: u64::MAX as Level });
    }
    let mut checks: Vec<Level> = checkpoints.to_vec();
    checks.sort_unstable();
    checks.dedup();
    if checks.first() == Some(&0) {
        return Err(ModelError::LevelZero.into());
    }
    if let Some(&last) = checks.last() {
        if last > depth {
            return Err(ModelError::ScheduleTooShort { level: last, last: depth }.into());
        }
    }

    let mut cuts: Vec<Level> = aux.boundaries().into_iter().filter(|&n| n < depth).collect();
    cuts.extend(&checks);
    cuts.push(depth);
    cuts.sort_unstable();
    cuts.dedup();
    let mut pieces = Vec::with_capacity(cuts.len());
    let mut log_len = Vec::with_capacity(checks.len());
    let (mut lo, mut acc_len) = (0 as Level, 0.0f64);
    for &hi in &cuts {
        let seg = aux.segments()[aux.segments().partition_point(|s| s.hi < hi)];
        let (base, ln_c) = match seg.phase {
            Phase::A => (params.p(), params.a().ln()),
            Phase::B => (params.q(), params.b().ln()),
        };
        let len = (hi - lo) as u64;
        acc_len -= len as f64 * ln_c;
        let ends_at_checkpoint = checks.binary_search(&hi).is_ok();
        if ends_at_checkpoint {
            log_len.push(acc_len);
        }
        let binomial = Binomial::new(len, seg.weight).expect("weight in [0, 1]");
        pieces.push(Piece { len, weight: seg.weight, base, ends_at_checkpoint, binomial });
        lo = hi;
    }

    let draws: Vec<Vec<(f64, f64)>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let (mut lm, mut lmp) = (0.0f64, 0.0f64);
            let mut out = Vec::with_capacity(log_len.len());
            for piece in &pieces {
                let zeros = piece.binomial.sample(&mut rng);
                lm += run_log_mass(zeros as Level, piece.len as Level, piece.base);
                lmp += run_log_mass(zeros as Level, piece.len as Level, piece.weight);
                if piece.ends_at_checkpoint {
                    let ll = log_len[out.len()];
                    out.push((lm / ll, lmp / ll));
                }
            }
            out
        })
        .collect();

    let r_mu = strong_law_sequence(params, aux, TargetMeasure::Mu, &checks)?;
    let r_prime = strong_law_sequence(params, aux, TargetMeasure::MuPrime, &checks)?;
    let mut rows = Vec::with_capacity(checks.len());
    for (j, &level) in checks.iter().enumerate() {
        let (mut a, mut b) = (Welford::new(), Welford::new());
        for d in &draws {
            a.push(d[j].0);
            b.push(d[j].1);
        }
        rows.push(McRow {
            level,
            d_mu: a.finish(),
            d_mu_prime: b.finish(),
            r_mu: r_mu.points[j].ratio,
            r_mu_prime: r_prime.points[j].ratio,
        });
    }
    Ok(McSummary { seed, n_samples, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auxiliary::{build_aux, AuxTarget};
    use crate::model::LevelSchedule;

    #[test]
    fn certain_weights_give_all_zeros() {
        let m = ModelParams::reference();
        let sp = crate::spectra::Spectra::new(&m);
        let aux = build_aux(&m, AuxTarget::LowerH(sp.beta1.alpha_max())).unwrap();
        // weight 1 on A-phases, 1/2 on B: the first two digits are forced
        let w = sample_point(&aux, 2, 7).unwrap();
        assert_eq!(w.digits(), &[0, 0]);
        assert!(aux.is_degenerate());
    }

    #[test]
    fn uniform_zero_count_concentrates() {
        let m = ModelParams::new(16.0, 2.2, 0.4, 0.45, LevelSchedule::factorial()).unwrap();
        let aux = build_aux(&m, AuxTarget::Uniform).unwrap();
        for seed in 0..5 {
            let w = sample_point(&aux, 10_000, seed).unwrap();
            let zeros = w.digits().iter().filter(|&&d| d == 0).count();
            assert!((4700..=5300).contains(&zeros), "{zeros}");
        }
        assert_eq!(sample_point(&aux, 500, 3).unwrap(), sample_point(&aux, 500, 3).unwrap());
        assert_ne!(sample_point(&aux, 500, 3).unwrap(), sample_point(&aux, 500, 4).unwrap());
        assert!(matches!(sample_point(&aux, MAX_EXPLICIT_DEPTH + 1, 0), Err(AuxError::TooDeep { .. })));
    }

    #[test]
    fn uniform_mu_prime_has_no_spread() {
        let m = ModelParams::reference();
        let aux = build_aux(&m, AuxTarget::Uniform).unwrap();
        let s = monte_carlo_local_dims(&m, &aux, 4096, &[16, 512, 4096], 50, 1).unwrap();
        for row in &s.rows {
            assert_eq!(row.d_mu_prime.sd, 0.0);
            let (k1, k2) = m.level_counts(row.level).unwrap();
            let expect = row.level as f64 * 2f64.ln() / (k1 as f64 * 16f64.ln() + k2 as f64 * 2.2f64.ln());
            assert!((row.d_mu_prime.mean - expect).abs() < 1e-12);
            assert!(row.agrees(3.0));
        }
    }

    #[test]
    fn summaries_are_seeded() {
        let m = ModelParams::reference();
        let aux = build_aux(&m, AuxTarget::Mu).unwrap();
        let a = monte_carlo_local_dims(&m, &aux, 512, &[16, 512], 200, 11).unwrap();
        let b = monte_carlo_local_dims(&m, &aux, 512, &[16, 512], 200, 11).unwrap();
        let c = monte_carlo_local_dims(&m, &aux, 512, &[16, 512], 200, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.rows[1].d_mu.mean, c.rows[1].d_mu.mean);
        assert!(a.rows.iter().all(|r| r.agrees(4.0)) && c.rows.iter().all(|r| r.agrees(4.0)));
    }
}
