use super::{policy, State};

/// Q-table over a uniform `bins x bins` grid of the two normalized state
/// features (clamped to [0, 1]).
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    bins: usize,
    kappa: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn new(bins: usize, kappa: usize) -> Self {
        let bins = bins.max(1);
        Self { bins, kappa, values: vec![0.0; bins * bins * kappa] }
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn num_states(&self) -> usize {
        self.bins * self.bins
    }

    pub fn bin_of(&self, s: &State) -> usize {
        let cell = |x: f64| {
            let x = if x.is_finite() { x.clamp(0.0, 1.0) } else { 0.0 };
            ((x * self.bins as f64) as usize).min(self.bins - 1)
        };
        cell(s.0[0]) * self.bins + cell(s.0[1])
    }

    pub fn row(&self, bin: usize) -> &[f64] {
        &self.values[bin * self.kappa..(bin + 1) * self.kappa]
    }

    pub fn get(&self, bin: usize, action: usize) -> f64 {
        self.values[bin * self.kappa + action]
    }

    pub fn max_value(&self, bin: usize) -> f64 {
        self.row(bin).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn greedy(&self, bin: usize) -> usize {
        policy::argmax(self.row(bin))
    }

    /// Sample-based Bellman update
    /// `Q(s,a) += alpha (r + lambda max_a' Q(s',a') - Q(s,a))`.
    /// `next = None` marks a terminal step (no bootstrap).
    pub fn update(&mut self, bin: usize, action: usize, reward: f64, next: Option<usize>, lambda: f64, alpha: f64) {
        let boot = next.map_or(0.0, |n| lambda * self.max_value(n));
        let q = &mut self.values[bin * self.kappa + action];
        *q += alpha * (reward + boot - *q);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_rate_freezes() {
        let mut t = QTable::new(4, 3);
        let before = t.clone();
        t.update(0, 1, 5.0, Some(3), 0.9, 0.0);
        assert_eq!(t, before);
    }

    #[test]
    fn single_full_step() {
        let mut t = QTable::new(4, 3);
        t.update(2, 1, 1.0, Some(5), 0.9, 1.0);
        assert_eq!(t.get(2, 1), 1.0);
    }

    #[test]
    fn converges_to_fixed_point() {
        let mut t = QTable::new(4, 3);
        t.values[5 * 3 + 2] = 4.0; // max_a' Q(s', a') = 4
        for _ in 0..500 {
            t.update(0, 0, 1.0, Some(5), 0.9, 0.1);
        }
        assert_relative_eq!(t.get(0, 0), 1.0 + 0.9 * 4.0, max_relative = 1e-9);
    }

    #[test]
    fn binning() {
        let t = QTable::new(16, 4);
        assert_eq!(t.bin_of(&State([0.0, 0.0])), 0);
        assert_eq!(t.bin_of(&State([1.0, 1.0])), 255);
        assert_eq!(t.bin_of(&State([7.5, -3.0])), 15 * 16);
        assert_eq!(t.bin_of(&State([0.5, 0.26])), 8 * 16 + 4);
        assert_eq!(t.num_states(), 256);
    }
}
