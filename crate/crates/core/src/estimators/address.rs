use crate::model::{Level, Word};

/// A point of the attractor given by its digit sequence.
///
/// Only zero counts over level ranges are needed, so addresses that are
/// described arithmetically can be queried at any depth.
pub trait Address: Sync {
    /// Number of zero digits among levels `(lo, hi]`, or `None` if the
    /// address does not reach `hi`.
    fn zeros_in(&self, lo: Level, hi: Level) -> Option<Level>;

    /// Deepest level the address supplies.
    fn depth(&self) -> Level;
}

impl Address for Word {
    fn zeros_in(&self, lo: Level, hi: Level) -> Option<Level> {
        if hi > self.len() as Level {
            return None;
        }
        Some(self.digits()[lo as usize..hi as usize].iter().filter(|&&d| d == 0).count() as Level)
    }

    fn depth(&self) -> Level {
        self.len() as Level
    }
}

/// `pattern` repeated forever.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicAddress {
    pattern: Word,
    prefix_zeros: Vec<Level>,
}

impl PeriodicAddress {
    pub fn new(pattern: Word) -> Self {
        assert!(!pattern.is_empty(), "empty period");
        let mut prefix_zeros = vec![0];
        for &d in pattern.digits() {
            prefix_zeros.push(prefix_zeros.last().unwrap() + (d == 0) as Level);
        }
        PeriodicAddress { pattern, prefix_zeros }
    }

    fn zeros_upto(&self, n: Level) -> Level {
        let len = self.pattern.len() as Level;
        (n / len) * self.prefix_zeros[len as usize] + self.prefix_zeros[(n % len) as usize]
    }
}

impl Address for PeriodicAddress {
    fn zeros_in(&self, lo: Level, hi: Level) -> Option<Level> {
        Some(self.zeros_upto(hi) - self.zeros_upto(lo))
    }

    fn depth(&self) -> Level {
        Level::MAX
    }
}

/// Zero digits placed with a prescribed density on each segment.
///
/// On the segment ending at `end` with rate `num/den`, level `k` carries a
/// zero iff `⌊k·num/den⌋ > ⌊(k-1)·num/den⌋`, so any range of levels holds
/// the rounded share of zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateAddress {
    /// `(last level, num, den)` with increasing ends and `num ≤ den`.
    segments: Vec<(Level, u64, u64)>,
}

fn floor_mul_div(h: Level, num: u64, den: u64) -> Level {
    let (num, den) = (num as Level, den as Level);
    (h / den) * num + ((h % den) * num) / den
}

impl RateAddress {
    pub fn new(segments: Vec<(Level, u64, u64)>) -> Self {
        let mut prev = 0;
        for &(end, num, den) in &segments {
            assert!(end > prev && den > 0 && num <= den, "bad rate segment");
            prev = end;
        }
        RateAddress { segments }
    }

    pub fn segments(&self) -> &[(Level, u64, u64)] {
        &self.segments
    }
}

impl Address for RateAddress {
    fn zeros_in(&self, lo: Level, hi: Level) -> Option<Level> {
        if hi > self.depth() {
            return None;
        }
        let mut total = 0;
        let mut start = 0;
        for &(end, num, den) in &self.segments {
            let (a, b) = (lo.max(start), hi.min(end));
            if a < b {
                total += floor_mul_div(b, num, den) - floor_mul_div(a, num, den);
            }
            start = end;
            if start >= hi {
                break;
            }
        }
        Some(total)
    }

    fn depth(&self) -> Level {
        self.segments.last().map_or(0, |s| s.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_zero_counts() {
        let w: Word = "0110100".parse().unwrap();
        assert_eq!(w.zeros_in(0, 7), Some(4));
        assert_eq!(w.zeros_in(2, 5), Some(1));
        assert_eq!(w.zeros_in(0, 8), None);
    }

    #[test]
    fn periodic_matches_expansion() {
        let p = PeriodicAddress::new("011".parse().unwrap());
        let w = Word::new((0..300).map(|k| if k % 3 == 0 { 0 } else { 1 }).collect()).unwrap();
        for (lo, hi) in [(0, 300), (5, 17), (1, 2), (299, 300)] {
            assert_eq!(p.zeros_in(lo, hi), w.zeros_in(lo, hi));
        }
        assert_eq!(p.zeros_in(0, 3 << 100), Some(1 << 100));
    }

    #[test]
    fn rate_address_is_digit_consistent() {
        let r = RateAddress::new(vec![(10, 1, 3), (25, 4, 5), (1 << 100, 1, 2)]);
        let mut run = 0;
        for k in 1..=200u128 {
            let z = r.zeros_in(k - 1, k).unwrap();
            assert!(z <= 1);
            run += z;
            assert_eq!(r.zeros_in(0, k), Some(run));
        }
        assert_eq!(r.zeros_in(25, 1 << 100), Some((1 << 99) - 12));
    }
}
