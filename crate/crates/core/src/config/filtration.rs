//! Weight histograms at a fixed level and the counting function they define.

use std::collections::BTreeMap;

/// `dim V_λ` for each integer weight `λ` at level `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiltrationTable {
    pub level: u64,
    /// Sorted by weight; every dimension is positive.
    pub entries: Vec<(i64, u64)>,
}

impl FiltrationTable {
    pub fn from_weights(level: u64, weights: impl IntoIterator<Item = i64>) -> Self {
        let mut hist: BTreeMap<i64, u64> = BTreeMap::new();
        for w in weights {
            *hist.entry(w).or_default() += 1;
        }
        FiltrationTable { level, entries: hist.into_iter().collect() }
    }

    /// Rebuilds the histogram from a non-increasing counting function by
    /// successive differences `f(λ) - f(λ + 1)` on `[lo, hi]`.
    pub fn from_counting(level: u64, lo: i64, hi: i64, mut f: impl FnMut(i64) -> u64) -> Self {
        let mut entries = Vec::new();
        let mut next = f(hi + 1);
        for lambda in (lo..=hi).rev() {
            let cur = f(lambda);
            if cur > next {
                entries.push((lambda, cur - next));
            }
            next = cur;
        }
        entries.reverse();
        FiltrationTable { level, entries }
    }

    /// `f_k(λ) = Σ_{λ' ≥ λ} dim V_λ'`.
    pub fn counting(&self, lambda: i64) -> u64 {
        self.entries.iter().filter(|(w, _)| *w >= lambda).map(|(_, d)| d).sum()
    }

    pub fn total_dim(&self) -> u64 {
        self.entries.iter().map(|(_, d)| d).sum()
    }

    pub fn total_weight(&self) -> i128 {
        self.entries.iter().map(|(w, d)| *w as i128 * *d as i128).sum()
    }

    pub fn min_weight(&self) -> Option<i64> {
        self.entries.first().map(|e| e.0)
    }

    pub fn max_weight(&self) -> Option<i64> {
        self.entries.last().map(|e| e.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_and_counting() {
        let t = FiltrationTable::from_weights(4, [-2, -1, 0, 0, 0]);
        assert_eq!(t.entries, vec![(-2, 1), (-1, 1), (0, 3)]);
        assert_eq!(t.counting(-5), 5);
        assert_eq!(t.counting(-1), 4);
        assert_eq!(t.counting(1), 0);
        assert_eq!(t.total_weight(), -3);
        let back = FiltrationTable::from_counting(4, -4, 2, |l| t.counting(l));
        assert_eq!(back, t);
    }
}
