use crate::model::{Level, LevelSchedule, ModelError};

/// Finite stand-in for liminf/limsup: breakpoints plus geometric midpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelSampler {
    breakpoints: Vec<Level>,
    first_index: usize,
    midpoints: usize,
    extra: Vec<Level>,
}

impl LevelSampler {
    /// Breakpoints `N_1..=N_depth` with 8 geometric midpoints per phase.
    pub fn new(schedule: &LevelSchedule, depth: usize) -> Result<Self, ModelError> {
        let all = schedule.all_breakpoints();
        if depth == 0 || depth > all.len() {
            return Err(ModelError::BadSchedule(format!("breakpoint depth {depth} outside 1..={}", all.len())));
        }
        Ok(LevelSampler { breakpoints: all[..depth].to_vec(), first_index: 1, midpoints: 8, extra: Vec::new() })
    }

    /// Drops levels below `N_{first_index}` so only the tail is sampled.
    pub fn first_index(mut self, i: usize) -> Self {
        self.first_index = i.max(1);
        self
    }

    pub fn midpoints(mut self, k: usize) -> Self {
        self.midpoints = k;
        self
    }

    /// Additional levels (e.g. segment boundaries of an auxiliary measure).
    pub fn with_extra(mut self, levels: impl IntoIterator<Item = Level>) -> Self {
        self.extra.extend(levels);
        self
    }

    pub fn levels(&self) -> Vec<Level> {
        let top = *self.breakpoints.last().expect("non-empty");
        let bottom = self.breakpoints[(self.first_index - 1).min(self.breakpoints.len() - 1)];
        let mut out = Vec::new();
        for (idx, &hi) in self.breakpoints.iter().enumerate() {
            if idx + 1 < self.first_index {
                continue;
            }
            out.push(hi);
            if idx == 0 || idx + 1 == self.first_index {
                continue;
            }
            let lo = self.breakpoints[idx - 1];
            let ratio = (hi as f64 / lo as f64).ln();
            for k in 1..=self.midpoints {
                let m = (lo as f64 * (ratio * k as f64 / (self.midpoints + 1) as f64).exp()).round() as Level;
                if m > lo && m < hi {
                    out.push(m);
                }
            }
        }
        out.extend(self.extra.iter().copied().filter(|&n| n >= bottom && n <= top));
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn breakpoints_and_midpoints() {
        let s = LevelSchedule::two_pow_i_squared();
        let lv = LevelSampler::new(&s, 3).unwrap().levels();
        // N1 = 2, N2 = 16, N3 = 512
        assert!(lv.contains(&2) && lv.contains(&16) && lv.contains(&512));
        // rounding merges some midpoints of the short first phase
        assert!(lv.len() > 3 + 8 && lv.len() <= 3 + 8 + 8);
        assert!(lv.windows(2).all(|w| w[0] < w[1]));
        let tail = LevelSampler::new(&s, 3).unwrap().first_index(2).with_extra([1, 100, 1000]).levels();
        assert_eq!(tail.first(), Some(&16));
        assert!(tail.contains(&100) && !tail.contains(&1000));
        assert!(LevelSampler::new(&s, 12).is_err());
    }
}
