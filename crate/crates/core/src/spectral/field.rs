use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use ndarray::{s, Array3, Array4, ArrayView3, ArrayView4, Axis, Zip};
use num_complex::Complex64;

use super::grid::WavenumberGrid;
use super::transform::{analyze_real_pair, synthesize_real_pair, Transform3};
use crate::{Error, Result, TORUS_VOLUME};

/// Real vector field on the torus given by its truncated Fourier series.
///
/// Coefficients are stored component-major as a `(3, 2n+1, 2n+1, 2n+1)` array.
#[derive(Debug, Clone)]
pub struct SpectralVectorField {
    grid: Arc<WavenumberGrid>,
    coeffs: Array4<Complex64>,
}

/// Collocation values of a vector field on `points³` uniform nodes of
/// `[0, 2π)³`, stored as `(3, points, points, points)` with `x₁` slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct RealVectorSample {
    points: usize,
    values: Array4<f64>,
}

impl SpectralVectorField {
    pub fn zeros(grid: &Arc<WavenumberGrid>) -> Self {
        let side = grid.side();
        Self { grid: grid.clone(), coeffs: Array4::zeros((3, side, side, side)) }
    }

    pub fn from_coeffs(grid: &Arc<WavenumberGrid>, coeffs: Array4<Complex64>) -> Result<Self> {
        let side = grid.side();
        if coeffs.dim() != (3, side, side, side) {
            return Err(Error::Parameter(format!(
                "coefficient array has shape {:?}, expected (3, {side}, {side}, {side})",
                coeffs.dim()
            )));
        }
        Ok(Self { grid: grid.clone(), coeffs })
    }

    /// The constant field `c`.
    pub fn constant(grid: &Arc<WavenumberGrid>, c: [f64; 3]) -> Self {
        let mut f = Self::zeros(grid);
        let n = grid.n();
        for (comp, &v) in c.iter().enumerate() {
            f.coeffs[[comp, n, n, n]] = Complex64::new(v, 0.0);
        }
        f
    }

    /// `amplitude · cos(k·x)`; for `k = 0` this is the constant `amplitude`.
    pub fn cosine_mode(grid: &Arc<WavenumberGrid>, k: [i64; 3], amplitude: [f64; 3]) -> Result<Self> {
        let idx = grid
            .index_of(k)
            .ok_or_else(|| Error::Parameter(format!("mode {k:?} outside truncation {}", grid.n())))?;
        let neg = grid.negate(idx);
        let mut f = Self::zeros(grid);
        for (comp, &a) in amplitude.iter().enumerate() {
            if idx == neg {
                f.coeffs[[comp, idx.0, idx.1, idx.2]] = Complex64::new(a, 0.0);
            } else {
                f.coeffs[[comp, idx.0, idx.1, idx.2]] = Complex64::new(0.5 * a, 0.0);
                f.coeffs[[comp, neg.0, neg.1, neg.2]] = Complex64::new(0.5 * a, 0.0);
            }
        }
        Ok(f)
    }

    pub fn grid(&self) -> &Arc<WavenumberGrid> {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn coeffs(&self) -> ArrayView4<'_, Complex64> {
        self.coeffs.view()
    }

    pub fn into_coeffs(self) -> Array4<Complex64> {
        self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut Array4<Complex64> {
        &mut self.coeffs
    }

    pub fn component(&self, c: usize) -> ArrayView3<'_, Complex64> {
        self.coeffs.index_axis(Axis(0), c)
    }

    /// Coefficient vector `û_k`, if `k` is stored.
    pub fn coefficient(&self, k: [i64; 3]) -> Option<[Complex64; 3]> {
        let (i, j, l) = self.grid.index_of(k)?;
        Some([0, 1, 2].map(|c| self.coeffs[[c, i, j, l]]))
    }

    /// Largest violation of `û(−k) = conj(û(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let m = 2 * self.n();
        let mut worst = 0.0_f64;
        for ((c, i, j, l), z) in self.coeffs.indexed_iter() {
            let mirror = self.coeffs[[c, m - i, m - j, m - l]];
            worst = worst.max((z - mirror.conj()).norm());
        }
        worst
    }

    /// Real part of the field, i.e. the average of `û(k)` and `conj(û(−k))`.
    pub fn symmetrize(&self) -> Self {
        let m = 2 * self.n();
        let coeffs = Array4::from_shape_fn(self.coeffs.raw_dim(), |(c, i, j, l)| {
            0.5 * (self.coeffs[[c, i, j, l]] + self.coeffs[[c, m - i, m - j, m - l]].conj())
        });
        Self { grid: self.grid.clone(), coeffs }
    }

    /// Collocation values on `points³` nodes. Exact for the trigonometric
    /// polynomial up to round-off.
    pub fn to_physical(&self, points: usize) -> Result<RealVectorSample> {
        let reduced = self.reduced_physical(points)?;
        let values = reduced
            .broadcast((3, points, points, points))
            .expect("collapsed axes have length one")
            .to_owned();
        Ok(RealVectorSample { points, values })
    }

    /// Axes along which the field actually varies: axis `a` is inactive when
    /// every coefficient with `k_a ≠ 0` vanishes.
    pub(crate) fn active_axes(&self) -> [bool; 3] {
        let n = self.n();
        let mut active = [false; 3];
        for ((_, i, j, l), z) in self.coeffs.indexed_iter() {
            if *z != Complex64::new(0.0, 0.0) {
                active[0] |= i != n;
                active[1] |= j != n;
                active[2] |= l != n;
            }
        }
        active
    }

    /// One component restricted to the box spanned by `active` axes.
    pub(crate) fn active_box(&self, c: usize, active: [bool; 3]) -> ArrayView3<'_, Complex64> {
        let (n, side) = (self.n(), self.grid.side());
        let [a, b, c3] = active.map(|on| if on { 0..side } else { n..n + 1 });
        self.component(c).slice_move(s![a, b, c3])
    }

    /// Values on `points` nodes per active axis and a single node along
    /// inactive ones; shape `(3, N1, N2, N3)`.
    pub(crate) fn reduced_physical(&self, points: usize) -> Result<Array4<f64>> {
        let required = WavenumberGrid::min_sampling_points(self.n());
        if points < required {
            return Err(Error::Resolution { points, required });
        }
        let active = self.active_axes();
        let t = Transform3::reduced(self.n(), points, active);
        let (u0, u1) =
            synthesize_real_pair(&t, self.active_box(0, active), Some(self.active_box(1, active)));
        let (u2, _) = synthesize_real_pair(&t, self.active_box(2, active), None);
        let u1 = u1.expect("paired synthesis");
        let [a, b, c] = t.grid_dims();
        let mut values = Array4::zeros((3, a, b, c));
        values.index_axis_mut(Axis(0), 0).assign(&u0);
        values.index_axis_mut(Axis(0), 1).assign(&u1);
        values.index_axis_mut(Axis(0), 2).assign(&u2);
        Ok(values)
    }

    /// Inverse of [`Self::reduced_physical`]: values of shape `(3, N1, N2, N3)`
    /// where a length-one axis means the field does not depend on it. The
    /// other axes must share one resolution `points`.
    pub(crate) fn from_reduced_physical(grid: &Arc<WavenumberGrid>, values: &Array4<f64>) -> Result<Self> {
        let (_, a, b, c) = values.dim();
        let points = a.max(b).max(c);
        if [a, b, c].iter().any(|&d| d != 1 && d != points) {
            return Err(Error::Parameter(format!("inconsistent sample shape {:?}", values.dim())));
        }
        let required = WavenumberGrid::min_sampling_points(grid.n());
        if points < required {
            return Err(Error::Resolution { points, required });
        }
        let active = [a, b, c].map(|d| d > 1);
        let t = Transform3::reduced(grid.n(), points, active);
        let comp = |i| values.index_axis(Axis(0), i);
        let (x, y) = analyze_real_pair(&t, comp(0), Some(comp(1)));
        let (z, _) = analyze_real_pair(&t, comp(2), None);
        let mut out = Self::zeros(grid);
        let (n, side) = (grid.n(), grid.side());
        let [r0, r1, r2] = active.map(|on| if on { 0..side } else { n..n + 1 });
        for (i, part) in [x, y.expect("paired analysis"), z].into_iter().enumerate() {
            out.coeffs.slice_mut(s![i, r0.clone(), r1.clone(), r2.clone()]).assign(&part);
        }
        Ok(out)
    }

    pub fn lambda_pow(&self, s: f64) -> Result<Self> {
        if s < 0.0 || s.is_nan() {
            return Err(Error::NegativeOrder(s));
        }
        let weights = self.grid.radial_table(|k2| if s == 0.0 { 1.0 } else { k2.powf(0.5 * s) });
        Ok(self.scale_modes(&weights))
    }

    /// `‖Λ^s f‖_{L²}` including the box volume `8π³`.
    ///
    /// # Panics
    /// If `s` is negative.
    pub fn seminorm(&self, s: f64) -> f64 {
        assert!(s >= 0.0, "seminorm order must be nonnegative, got {s}");
        let weights = self.grid.radial_table(|k2| k2.powf(s));
        let mut sum = 0.0;
        for c in 0..3 {
            Zip::from(self.component(c)).and(&weights).for_each(|z, &w| sum += w * z.norm_sqr());
        }
        (TORUS_VOLUME * sum).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.seminorm(0.0)
    }

    /// `(f, g)_{L²} = 8π³ Re Σ_k f̂_k · conj(ĝ_k)`.
    pub fn inner_l2(&self, other: &Self) -> Result<f64> {
        self.grid.same_truncation(&other.grid)?;
        let sum: f64 = Zip::from(&self.coeffs)
            .and(&other.coeffs)
            .fold(0.0, |acc, a, b| acc + (a * b.conj()).re);
        Ok(TORUS_VOLUME * sum)
    }

    /// `∫ f dx = 8π³ f̂_0`.
    pub fn mean(&self) -> [f64; 3] {
        let n = self.n();
        [0, 1, 2].map(|c| TORUS_VOLUME * self.coeffs[[c, n, n, n]].re)
    }

    /// Keeps the modes with Euclidean `|k| ≤ m`.
    pub fn project(&self, m: i64) -> Result<Self> {
        if m < 0 || m as usize > self.n() {
            return Err(Error::Truncation(m));
        }
        let cutoff = (m * m) as f64;
        let mask = self.grid.k_sq().mapv(|k2| if k2 <= cutoff { 1.0 } else { 0.0 });
        Ok(self.scale_modes(&mask))
    }

    /// `P_n` for the grid's own truncation order.
    pub fn project_ball(&self) -> Self {
        self.project(self.n() as i64).expect("own truncation order is valid")
    }

    /// `Σ_i w_i ⊙ f_i` with per-mode real weights, formed in a single pass.
    ///
    /// # Panics
    /// If `terms` is empty or the fields do not share a truncation order.
    pub fn combine(terms: &[(&Array3<f64>, &SpectralVectorField)]) -> Self {
        let (_, first) = terms[0];
        let side = first.grid.side();
        let block = side * side * side;
        for (w, f) in terms {
            assert_eq!(f.n(), first.n(), "combine needs a common truncation");
            assert_eq!(w.len(), block, "weight table has the wrong size");
        }
        let weights: Vec<&[f64]> =
            terms.iter().map(|(w, _)| w.as_slice().expect("standard layout")).collect();
        let fields: Vec<&[Complex64]> =
            terms.iter().map(|(_, f)| f.coeffs.as_slice().expect("standard layout")).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); 3 * block];
        for (p, z) in out.iter_mut().enumerate() {
            let m = p % block;
            let mut acc = Complex64::new(0.0, 0.0);
            for (w, f) in weights.iter().zip(&fields) {
                acc += f[p] * w[m];
            }
            *z = acc;
        }
        let coeffs = Array4::from_shape_vec((3, side, side, side), out).expect("shape matches");
        Self { grid: first.grid.clone(), coeffs }
    }

    /// Multiplies every component by a per-mode real weight.
    pub fn scale_modes(&self, weights: &Array3<f64>) -> Self {
        let mut coeffs = self.coeffs.clone();
        for mut comp in coeffs.axis_iter_mut(Axis(0)) {
            Zip::from(&mut comp).and(weights).for_each(|z, &w| *z *= w);
        }
        Self { grid: self.grid.clone(), coeffs }
    }

    /// `∂f/∂x_axis`.
    pub fn derivative(&self, axis: usize) -> Self {
        let grid = &self.grid;
        let mut coeffs = self.coeffs.clone();
        for ((_, i, j, l), z) in coeffs.indexed_iter_mut() {
            let k = grid.wavevector((i, j, l))[axis] as f64;
            *z *= Complex64::new(0.0, k);
        }
        Self { grid: grid.clone(), coeffs }
    }

    pub fn laplacian(&self) -> Self {
        let weights = self.grid.k_sq().mapv(|k2| -k2);
        self.scale_modes(&weights)
    }

    pub fn curl(&self) -> Self {
        let d = |c: usize, axis: usize| {
            let g = self.grid.as_ref();
            Array3::from_shape_fn(self.component(c).raw_dim(), |idx| {
                let k = g.wavevector(idx)[axis] as f64;
                self.coeffs[[c, idx.0, idx.1, idx.2]] * Complex64::new(0.0, k)
            })
        };
        let side = self.grid.side();
        let mut coeffs = Array4::zeros((3, side, side, side));
        coeffs.index_axis_mut(Axis(0), 0).assign(&(d(2, 1) - d(1, 2)));
        coeffs.index_axis_mut(Axis(0), 1).assign(&(d(0, 2) - d(2, 0)));
        coeffs.index_axis_mut(Axis(0), 2).assign(&(d(1, 0) - d(0, 1)));
        Self { grid: self.grid.clone(), coeffs }
    }

    /// Copies the overlapping modes onto another truncation.
    pub fn retruncate(&self, grid: &Arc<WavenumberGrid>) -> Self {
        let mut out = Self::zeros(grid);
        let (a, b) = (self.n(), grid.n());
        let m = a.min(b);
        let src = s![.., a - m..=a + m, a - m..=a + m, a - m..=a + m];
        let dst = s![.., b - m..=b + m, b - m..=b + m, b - m..=b + m];
        out.coeffs.slice_mut(dst).assign(&self.coeffs.slice(src));
        out
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { grid: self.grid.clone(), coeffs: self.coeffs.mapv(|z| z * a) }
    }

    /// `self + a · other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        debug_assert_eq!(self.n(), other.n());
        let coeffs = Zip::from(&self.coeffs).and(&other.coeffs).map_collect(|&x, &y| x + y * a);
        Self { grid: self.grid.clone(), coeffs }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        Zip::from(&self.coeffs)
            .and(&other.coeffs)
            .fold(0.0_f64, |acc, a, b| acc.max((a - b).norm()))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Fraction of `Σ|û_k|²` carried by modes with `|k| > 2n/3`.
    pub fn tail_fraction(&self) -> f64 {
        let cutoff = 2.0 * self.n() as f64 / 3.0;
        let (mut tail, mut total) = (0.0, 0.0);
        for c in 0..3 {
            Zip::from(self.component(c)).and(self.grid.k_norm()).for_each(|z, &k| {
                let e = z.norm_sqr();
                total += e;
                if k > cutoff {
                    tail += e;
                }
            });
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }
}

impl Add for &SpectralVectorField {
    type Output = SpectralVectorField;
    fn add(self, rhs: Self) -> SpectralVectorField {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &SpectralVectorField {
    type Output = SpectralVectorField;
    fn sub(self, rhs: Self) -> SpectralVectorField {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<&SpectralVectorField> for f64 {
    type Output = SpectralVectorField;
    fn mul(self, rhs: &SpectralVectorField) -> SpectralVectorField {
        rhs.scaled(self)
    }
}

impl RealVectorSample {
    pub fn from_values(values: Array4<f64>) -> Result<Self> {
        let (c, a, b, d) = values.dim();
        if c != 3 || a != b || b != d || a == 0 {
            return Err(Error::Parameter(format!("sample array has shape {:?}", values.dim())));
        }
        Ok(Self { points: a, values })
    }

    /// Samples `f` at the nodes `x_j = 2π i_j / points`.
    pub fn from_fn(points: usize, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let h = 2.0 * std::f64::consts::PI / points as f64;
        let mut values = Array4::zeros((3, points, points, points));
        for i in 0..points {
            for j in 0..points {
                for l in 0..points {
                    let v = f([i as f64 * h, j as f64 * h, l as f64 * h]);
                    for c in 0..3 {
                        values[[c, i, j, l]] = v[c];
                    }
                }
            }
        }
        Self { points, values }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn values(&self) -> ArrayView4<'_, f64> {
        self.values.view()
    }

    pub fn component(&self, c: usize) -> ArrayView3<'_, f64> {
        self.values.index_axis(Axis(0), c)
    }

    /// Forward transform truncated at order `n`, on a grid with the default
    /// dealiasing resolution.
    pub fn to_spectral(&self, n: usize) -> Result<SpectralVectorField> {
        let grid = WavenumberGrid::new(n)?;
        self.to_spectral_on(&grid)
    }

    pub fn to_spectral_on(&self, grid: &Arc<WavenumberGrid>) -> Result<SpectralVectorField> {
        let required = WavenumberGrid::min_sampling_points(grid.n());
        if self.points < required {
            return Err(Error::Resolution { points: self.points, required });
        }
        let t = Transform3::new(grid.n(), self.points);
        let (a, b) = analyze_real_pair(&t, self.component(0), Some(self.component(1)));
        let (c, _) = analyze_real_pair(&t, self.component(2), None);
        let side = grid.side();
        let mut coeffs = Array4::zeros((3, side, side, side));
        coeffs.index_axis_mut(Axis(0), 0).assign(&a);
        coeffs.index_axis_mut(Axis(0), 1).assign(&b.expect("paired analysis"));
        coeffs.index_axis_mut(Axis(0), 2).assign(&c);
        SpectralVectorField::from_coeffs(grid, coeffs)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        Zip::from(&self.values)
            .and(&other.values)
            .fold(0.0_f64, |acc, a, b| acc.max((a - b).abs()))
    }

    /// `max_x |v(x)|` over the nodes, with the Euclidean norm pointwise.
    pub fn max_magnitude(&self) -> f64 {
        let mut worst = 0.0_f64;
        let (u, v, w) = (self.component(0), self.component(1), self.component(2));
        Zip::from(&u).and(&v).and(&w).for_each(|a, b, c| {
            worst = worst.max((a * a + b * b + c * c).sqrt());
        });
        worst
    }

    /// Rectangle-rule `‖v‖_{L²}` (spectrally accurate for smooth periodic data).
    pub fn l2_quadrature(&self) -> f64 {
        let cell = TORUS_VOLUME / (self.points as f64).powi(3);
        (self.values.iter().map(|x| x * x).sum::<f64>() * cell).sqrt()
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.points != other.points {
            return Err(Error::Resolution { points: other.points, required: self.points });
        }
        Ok(Self { points: self.points, values: &self.values - &other.values })
    }
}
