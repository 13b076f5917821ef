use std::collections::BTreeMap;

use crate::rmatrix::WEIGHTS;
use crate::theta::C64;

/// `V(z_1) (x) ... (x) V(z_n)` with its h-weight grading.
///
/// Basis index of `e_{a_1} (x) ... (x) e_{a_n}` is `sum a_s 3^{n-1-s}`, site 1
/// most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSpace {
    z: Vec<C64>,
    weights: Vec<i32>,
}

impl WeightedSpace {
    pub fn new(z: Vec<C64>) -> Self {
        let n = z.len();
        let dim = 3usize.pow(n as u32);
        let weights = (0..dim)
            .map(|idx| letters_of(idx, n).iter().map(|&a| WEIGHTS[a]).sum())
            .collect();
        Self { z, weights }
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn z(&self) -> &[C64] {
        &self.z
    }

    pub fn weight(&self, index: usize) -> i32 {
        self.weights[index]
    }

    pub fn weights(&self) -> &[i32] {
        &self.weights
    }

    /// Site letters (zero-based) of a basis index.
    pub fn letters(&self, index: usize) -> Vec<usize> {
        letters_of(index, self.n())
    }

    pub fn indices_of_weight(&self, weight: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.weights[i] == weight).collect()
    }

    /// Dimension of every weight subspace, keyed by weight.
    pub fn weight_dimensions(&self) -> BTreeMap<i32, usize> {
        let mut m = BTreeMap::new();
        for &w in &self.weights {
            *m.entry(w).or_insert(0) += 1;
        }
        m
    }

    /// Concatenation of sites, `self` first.
    pub fn tensor(&self, other: &WeightedSpace) -> WeightedSpace {
        let mut z = self.z.clone();
        z.extend_from_slice(&other.z);
        WeightedSpace::new(z)
    }
}

fn letters_of(mut index: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for s in (0..n).rev() {
        out[s] = index % 3;
        index /= 3;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(n: usize) -> WeightedSpace {
        WeightedSpace::new((0..n).map(|i| C64::new(0.1 * i as f64, 0.0)).collect())
    }

    #[test]
    fn zero_weight_dimensions() {
        assert_eq!(space(2).indices_of_weight(0).len(), 3);
        assert_eq!(space(3).indices_of_weight(0).len(), 7);
    }

    #[test]
    fn weight_range_and_total() {
        for n in 1..=4 {
            let d = space(n).weight_dimensions();
            assert_eq!(d.values().sum::<usize>(), 3usize.pow(n as u32));
            assert_eq!(*d.keys().next().unwrap(), -(n as i32));
            assert_eq!(*d.keys().last().unwrap(), n as i32);
        }
    }

    #[test]
    fn letters_roundtrip() {
        let s = space(3);
        assert_eq!(s.letters(5), vec![0, 1, 2]);
        assert_eq!(s.weight(5), 0);
        assert_eq!(s.weight(0), 3);
    }
}
