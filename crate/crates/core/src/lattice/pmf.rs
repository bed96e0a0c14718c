use crate::numeric::compensated_sum;

/// Non-negative weights on a contiguous integer range starting at `offset`,
/// together with the mass that has left the range (`deficit`).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LatticePmf {
    pub offset: i64,
    pub weights: Vec<f64>,
    pub deficit: f64,
}

impl LatticePmf {
    pub fn new(offset: i64, weights: Vec<f64>, deficit: f64) -> Self {
        Self {
            offset,
            weights,
            deficit,
        }
    }

    pub fn delta(at: i64) -> Self {
        Self::new(at, vec![1.0], 0.0)
    }

    pub fn empty(offset: i64) -> Self {
        Self::new(offset, Vec::new(), 0.0)
    }

    pub fn mass(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    pub fn get(&self, z: i64) -> f64 {
        let idx = z - self.offset;
        if idx < 0 || idx >= self.weights.len() as i64 {
            0.0
        } else {
            self.weights[idx as usize]
        }
    }

    /// One past the last stored index.
    pub fn end(&self) -> i64 {
        self.offset + self.weights.len() as i64
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, w)| (self.offset + i as i64, *w))
    }

    pub fn mean(&self) -> f64 {
        compensated_sum(self.iter().map(|(z, w)| z as f64 * w))
    }

    /// Drops exact zeros at both ends without changing any stored value.
    pub fn trim(&mut self) {
        while self.weights.last() == Some(&0.0) {
            self.weights.pop();
        }
        let lead = self.weights.iter().take_while(|w| **w == 0.0).count();
        if lead > 0 {
            self.weights.drain(..lead);
            self.offset += lead as i64;
        }
    }
}
