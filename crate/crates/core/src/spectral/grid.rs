use std::sync::Arc;

use ndarray::Array3;

use crate::{Error, Result};

/// Wavenumber tables for a Galerkin truncation of order `n`.
///
/// Modes with every component in `[-n, n]` are stored. `physical_points` is the
/// collocation resolution used for products; it must be at least `3n + 1` for
/// the quadratic nonlinearity to be alias-free.
#[derive(Debug)]
pub struct WavenumberGrid {
    n: usize,
    physical_points: usize,
    k_sq: Array3<f64>,
    k_norm: Array3<f64>,
}

impl PartialEq for WavenumberGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.physical_points == other.physical_points
    }
}

impl WavenumberGrid {
    /// Grid with the default dealiasing resolution `3n + 2`.
    pub fn new(n: usize) -> Result<Arc<Self>> {
        Self::with_points(n, Self::default_points(n))
    }

    pub fn with_points(n: usize, physical_points: usize) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::Truncation(0));
        }
        let required = Self::min_sampling_points(n);
        if physical_points < required {
            return Err(Error::Resolution { points: physical_points, required });
        }
        let side = 2 * n + 1;
        let k_sq = Array3::from_shape_fn((side, side, side), |(i, j, l)| {
            let (a, b, c) = (i as i64 - n as i64, j as i64 - n as i64, l as i64 - n as i64);
            (a * a + b * b + c * c) as f64
        });
        let k_norm = k_sq.mapv(f64::sqrt);
        Ok(Arc::new(Self { n, physical_points, k_sq, k_norm }))
    }

    pub fn default_points(n: usize) -> usize {
        3 * n + 2
    }

    /// Smallest resolution at which a product of two fields truncated at `n`
    /// has no aliased contribution on the retained modes.
    pub fn min_dealias_points(n: usize) -> usize {
        3 * n + 1
    }

    /// Smallest resolution accepted for synthesis of a field truncated at `n`.
    pub fn min_sampling_points(n: usize) -> usize {
        2 * n + 2
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored wavenumbers along each axis, `2n + 1`.
    pub fn side(&self) -> usize {
        2 * self.n + 1
    }

    pub fn physical_points(&self) -> usize {
        self.physical_points
    }

    pub fn mode_count(&self) -> usize {
        self.side().pow(3)
    }

    /// `|k|²` per stored mode (exact integers held in `f64`).
    pub fn k_sq(&self) -> &Array3<f64> {
        &self.k_sq
    }

    /// Euclidean `|k|` per stored mode.
    pub fn k_norm(&self) -> &Array3<f64> {
        &self.k_norm
    }

    /// Wavenumber of a storage index along one axis.
    #[inline]
    pub fn wavenumber(&self, index: usize) -> i64 {
        index as i64 - self.n as i64
    }

    #[inline]
    pub fn wavevector(&self, (i, j, l): (usize, usize, usize)) -> [i64; 3] {
        [self.wavenumber(i), self.wavenumber(j), self.wavenumber(l)]
    }

    pub fn index_of(&self, k: [i64; 3]) -> Option<(usize, usize, usize)> {
        let n = self.n as i64;
        if k.iter().any(|c| c.abs() > n) {
            return None;
        }
        Some(((k[0] + n) as usize, (k[1] + n) as usize, (k[2] + n) as usize))
    }

    /// Storage index of `-k`.
    #[inline]
    pub fn negate(&self, (i, j, l): (usize, usize, usize)) -> (usize, usize, usize) {
        let m = 2 * self.n;
        (m - i, m - j, m - l)
    }

    /// All stored wavevectors in storage order.
    pub fn modes(&self) -> impl Iterator<Item = ([i64; 3], (usize, usize, usize))> + '_ {
        let side = self.side();
        (0..side).flat_map(move |i| {
            (0..side).flat_map(move |j| {
                (0..side).map(move |l| (self.wavevector((i, j, l)), (i, j, l)))
            })
        })
    }

    /// Distinct values of `|k|²` present on the grid, ascending.
    pub fn distinct_k_sq(&self) -> Vec<u64> {
        let max = 3 * (self.n as u64).pow(2);
        let mut present = vec![false; max as usize + 1];
        for &v in self.k_sq.iter() {
            present[v as usize] = true;
        }
        present
            .iter()
            .enumerate()
            .filter_map(|(v, &p)| p.then_some(v as u64))
            .collect()
    }

    /// Builds a per-mode table from a function of `|k|²`, evaluating it once
    /// per distinct value.
    pub fn radial_table(&self, f: impl Fn(f64) -> f64) -> Array3<f64> {
        let distinct = self.distinct_k_sq();
        let max = *distinct.last().unwrap_or(&0) as usize;
        let mut lut = vec![0.0; max + 1];
        for v in distinct {
            lut[v as usize] = f(v as f64);
        }
        self.k_sq.mapv(|v| lut[v as usize])
    }

    pub(crate) fn same_truncation(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GridMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_norm_is_exact_for_integer_vectors() {
        let g = WavenumberGrid::new(4).unwrap();
        for (k, idx) in g.modes() {
            let expected = ((k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).sqrt();
            assert_eq!(g.k_norm()[idx], expected);
        }
    }

    #[test]
    fn index_set_is_closed_under_negation() {
        let g = WavenumberGrid::new(3).unwrap();
        for (k, idx) in g.modes() {
            let neg = g.negate(idx);
            assert_eq!(g.wavevector(neg), [-k[0], -k[1], -k[2]]);
            assert_eq!(g.index_of([-k[0], -k[1], -k[2]]), Some(neg));
        }
    }

    #[test]
    fn rejects_undersampled_grid() {
        assert!(matches!(
            WavenumberGrid::with_points(4, 9),
            Err(Error::Resolution { points: 9, required: 10 })
        ));
        assert!(WavenumberGrid::new(0).is_err());
        assert_eq!(WavenumberGrid::new(8).unwrap().physical_points(), 26);
    }

    #[test]
    fn radial_table_matches_direct_evaluation() {
        let g = WavenumberGrid::new(3).unwrap();
        let t = g.radial_table(|k2| (-k2).exp());
        for (_, idx) in g.modes() {
            assert_eq!(t[idx], (-g.k_sq()[idx]).exp());
        }
    }
}
