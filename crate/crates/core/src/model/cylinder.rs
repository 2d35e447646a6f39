use std::fmt;
use std::str::FromStr;

use super::params::MoranModel;
use super::schedule::Level;
use super::ModelError;

/// A finite word over `{0, 1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    digits: Vec<u8>,
}

impl Word {
    pub fn new(digits: Vec<u8>) -> Result<Self, ModelError> {
        if digits.iter().any(|&d| d > 1) {
            return Err(ModelError::BadDigit);
        }
        Ok(Word { digits })
    }

    pub fn zeros(n: usize) -> Self {
        Word { digits: vec![0; n] }
    }

    pub fn ones(n: usize) -> Self {
        Word { digits: vec![1; n] }
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn push(&mut self, d: u8) -> Result<(), ModelError> {
        if d > 1 {
            return Err(ModelError::BadDigit);
        }
        self.digits.push(d);
        Ok(())
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word { digits: self.digits[..n.min(self.len())].to_vec() }
    }

    /// All `2^n` words of length `n` in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Word> {
        assert!(n < 64);
        (0u64..1 << n).map(move |bits| Word {
            digits: (0..n).map(|k| ((bits >> (n - 1 - k)) & 1) as u8).collect(),
        })
    }
}

impl FromStr for Word {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(ModelError::BadDigit),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(|digits| Word { digits })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// `I_w` in log coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LogCylinder {
    pub word: Word,
    /// Left endpoint `x_w`.
    pub left: f64,
    pub log_length: f64,
    pub log_measure: f64,
}

impl LogCylinder {
    pub fn length(&self) -> f64 {
        self.log_length.exp()
    }

    pub fn measure(&self) -> f64 {
        self.log_measure.exp()
    }

    pub fn right(&self) -> f64 {
        self.left + self.length()
    }
}

/// Geometry and mass of `I_w`.
pub fn cylinder<M: MoranModel + ?Sized>(model: &M, w: &Word) -> Result<LogCylinder, ModelError> {
    let mut left = 0.0;
    let mut length = 1.0f64;
    let mut log_length = 0.0;
    let mut log_measure = 0.0;
    let mut digits = w.digits().iter();
    for run in model.runs_until(w.len() as Level)? {
        let (a, p) = (run.rule.contraction, run.rule.prob);
        let (ln_a, ln_p, ln_q) = (a.ln(), p.ln(), (1.0 - p).ln());
        for _ in 0..run.len() {
            let d = *digits.next().expect("runs cover the word");
            if d == 1 {
                left += length - length / a;
                log_measure += ln_q;
            } else {
                log_measure += ln_p;
            }
            length /= a;
            log_length -= ln_a;
        }
    }
    Ok(LogCylinder { word: w.clone(), left, log_length, log_measure })
}

/// The level-`n` word whose cylinder contains `x`.
///
/// Points on a shared boundary resolve to the left child.
pub fn locate<M: MoranModel + ?Sized>(model: &M, x: f64, n: usize) -> Result<Word, ModelError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(ModelError::PointNotInUnion { x, level: 0, deepest: 0 });
    }
    let mut left = 0.0;
    let mut length = 1.0f64;
    let mut digits = Vec::with_capacity(n);
    for run in model.runs_until(n as Level)? {
        let a = run.rule.contraction;
        for _ in 0..run.len() {
            let child = length / a;
            if x <= left + child {
                digits.push(0);
            } else if x >= left + length - child {
                digits.push(1);
                left += length - child;
            } else {
                let level = digits.len() + 1;
                return Err(ModelError::PointNotInUnion { x, level, deepest: level - 1 });
            }
            length = child;
        }
    }
    Ok(Word { digits })
}

/// Ball/cylinder comparison at a point of the attractor.
#[derive(Clone, Debug, PartialEq)]
pub struct BallCylinderBounds {
    /// Smallest level with `I_n(x) ⊂ B(x, r)`.
    pub n: usize,
    /// Largest level with `B(x, r) ∩ X ⊂ I_{n'}(x)`.
    pub n_prime: usize,
    pub len_n: f64,
    pub len_n_prime: f64,
    /// `r / A_max ≤ r / A_n ≤ |I_n(x)| ≤ 2r` and `|I_n'(x)| ≤ 2 A_min r / (A_min - 2)`.
    pub bound_check: bool,
}

/// Locates the cylinders sandwiching `B(x, r)`.
///
/// `x` is the point with address `address` followed by zeros, i.e. the
/// left endpoint of `I_address`. Both levels must be resolvable within the
/// given digits.
pub fn ball_cylinder_bounds<M: MoranModel + ?Sized>(
    model: &M,
    address: &Word,
    r: f64,
) -> Result<BallCylinderBounds, ModelError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(ModelError::BadRadius(r));
    }
    let depth = address.len();
    let x = cylinder(model, address)?.left;
    let mut rules = Vec::with_capacity(depth);
    for run in model.runs_until(depth as Level)? {
        for _ in 0..run.len() {
            rules.push(run.rule.contraction);
        }
    }

    let mut left = 0.0;
    let mut length = 1.0f64;
    let mut n = None;
    let mut n_prime = None;
    let mut lens = vec![1.0];
    for (k, &a) in rules.iter().enumerate() {
        let child = length / a;
        let d = address.digits()[k];
        // the sibling's nearest point to x is its facing endpoint
        let sibling_gap = if d == 0 { left + length - child - x } else { x - (left + child) };
        if n_prime.is_none() && sibling_gap <= r {
            n_prime = Some(k);
        }
        if d == 1 {
            left += length - child;
        }
        length = child;
        lens.push(length);
        if n.is_none() && left >= x - r && left + length <= x + r {
            n = Some(k + 1);
        }
        if n.is_some() && n_prime.is_some() {
            break;
        }
    }
    let (n, n_prime) = match (n, n_prime) {
        (Some(n), Some(np)) => (n, np),
        _ => return Err(ModelError::AddressTooShallow { depth, needed: depth + 1 }),
    };
    let (a_min, a_max) = model.contraction_bounds();
    let len_n = lens[n];
    let len_n_prime = lens[n_prime];
    let a_n = rules[n - 1];
    let bound_check = r / a_max <= r / a_n
        && r / a_n <= len_n * (1.0 + 1e-12)
        && len_n <= 2.0 * r
        && len_n_prime <= 2.0 * a_min * r / (a_min - 2.0) * (1.0 + 1e-12);
    Ok(BallCylinderBounds { n, n_prime, len_n, len_n_prime, bound_check })
}
