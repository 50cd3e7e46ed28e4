//! Sum tree over per-node intensities for `O(log N)` update and sampling.

#[derive(Debug, Clone)]
pub(crate) struct RateTree {
    leaves: usize,
    tree: Vec<f64>,
}

impl RateTree {
    pub fn new(n: usize) -> Self {
        let leaves = n.max(1).next_power_of_two();
        RateTree {
            leaves,
            tree: vec![0.0; 2 * leaves],
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.tree[self.leaves + i]
    }

    /// Parents are recomputed from their children, so no rounding drift builds up.
    pub fn set(&mut self, i: usize, rate: f64) {
        let mut p = self.leaves + i;
        self.tree[p] = rate;
        p /= 2;
        while p >= 1 {
            self.tree[p] = self.tree[2 * p] + self.tree[2 * p + 1];
            p /= 2;
        }
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.tree[1]
    }

    /// Leaf whose cumulative interval contains `u ∈ [0, total)`. Never returns a
    /// zero-rate leaf while `total > 0`.
    pub fn find(&self, mut u: f64) -> usize {
        let mut p = 1;
        while p < self.leaves {
            let left = self.tree[2 * p];
            let right = self.tree[2 * p + 1];
            if (u < left || right == 0.0) && left > 0.0 {
                p *= 2;
            } else {
                u -= left;
                p = 2 * p + 1;
            }
        }
        p - self.leaves
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_and_lookup() {
        let mut t = RateTree::new(5);
        for (i, r) in [1.0, 0.0, 2.0, 0.5, 0.0].into_iter().enumerate() {
            t.set(i, r);
        }
        assert_eq!(t.total(), 3.5);
        assert_eq!(t.find(0.0), 0);
        assert_eq!(t.find(0.99), 0);
        assert_eq!(t.find(1.0), 2);
        assert_eq!(t.find(2.99), 2);
        assert_eq!(t.find(3.2), 3);
        // Rounding overshoot must not land on an empty leaf.
        assert_eq!(t.find(3.5 + 1e-12), 3);
        t.set(2, 0.0);
        assert_eq!(t.total(), 1.5);
        assert_eq!(t.find(1.2), 3);
    }

    #[test]
    fn single_leaf() {
        let mut t = RateTree::new(1);
        t.set(0, 2.0);
        assert_eq!(t.total(), 2.0);
        assert_eq!(t.find(1.0), 0);
    }
}
