//! Pruned three-dimensional FFTs between the truncated coefficient cube and a
//! uniform collocation grid.
//!
//! Every stage transforms the slowest axis and rotates it to the fastest
//! position, so each line FFT runs on contiguous memory. Synthesis pads one
//! axis at a time (`s³ → s²N → sN² → N³`) and analysis truncates in the
//! reverse order; lines that are identically zero are skipped.
//!
//! An axis can be collapsed to the single wavenumber `0` and a single node.
//! For data independent of that coordinate this gives the same values as the
//! full grid at a fraction of the cost.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use ndarray::{Array3, ArrayView3};
use rayon::prelude::*;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type Plan = Arc<dyn Fft<f64>>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Lines handled together by one rotation tile.
const BLOCK: usize = 32;

struct PlanCache {
    planner: FftPlanner<f64>,
    plans: HashMap<(usize, bool), Plan>,
}

fn plan(len: usize, inverse: bool) -> Plan {
    static CACHE: OnceLock<Mutex<PlanCache>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| {
        Mutex::new(PlanCache { planner: FftPlanner::new(), plans: HashMap::new() })
    });
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    let PlanCache { planner, plans } = &mut *guard;
    plans
        .entry((len, inverse))
        .or_insert_with(|| {
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

/// Recycled work buffers. Large transform buffers would otherwise be mapped
/// fresh from the OS on every call and page-faulted in again.
static POOL: Mutex<Vec<Vec<Complex64>>> = Mutex::new(Vec::new());
const POOL_LIMIT: usize = 12;

fn pooled(len: usize) -> Option<Vec<Complex64>> {
    let mut pool = POOL.lock().expect("buffer pool poisoned");
    // Smallest buffer that fits, so large ones stay available.
    let best = pool
        .iter()
        .enumerate()
        .filter(|(_, b)| b.capacity() >= len)
        .min_by_key(|(_, b)| b.capacity())
        .map(|(i, _)| i)?;
    Some(pool.swap_remove(best))
}

/// A buffer of length `len` with unspecified contents.
fn take_dirty(len: usize) -> Vec<Complex64> {
    match pooled(len) {
        Some(mut b) => {
            b.resize(len, ZERO);
            b.truncate(len);
            b
        }
        None => vec![ZERO; len],
    }
}

pub(crate) fn recycle(buffer: Vec<Complex64>) {
    let mut pool = POOL.lock().expect("buffer pool poisoned");
    if pool.len() < POOL_LIMIT {
        pool.push(buffer);
    }
}

/// One axis of a transform: wavenumbers `-n..=n` and `points` nodes.
struct AxisPlan {
    n: usize,
    points: usize,
    forward: Plan,
    inverse: Plan,
}

impl AxisPlan {
    fn new(n: usize, points: usize) -> Self {
        debug_assert!(points > 2 * n);
        Self { n, points, forward: plan(points, false), inverse: plan(points, true) }
    }

    fn side(&self) -> usize {
        2 * self.n + 1
    }

    /// FFT position of storage index `a`.
    #[inline]
    fn slot(&self, a: usize) -> usize {
        if a >= self.n {
            a - self.n
        } else {
            self.points + a - self.n
        }
    }
}

pub(crate) struct Transform3 {
    axes: [AxisPlan; 3],
}

impl Transform3 {
    pub(crate) fn new(n: usize, points: usize) -> Self {
        Self::reduced(n, points, [true; 3])
    }

    /// Inactive axes keep only wavenumber `0` and a single node.
    pub(crate) fn reduced(n: usize, points: usize, active: [bool; 3]) -> Self {
        let axis = |on: bool| if on { AxisPlan::new(n, points) } else { AxisPlan::new(0, 1) };
        Self { axes: active.map(axis) }
    }

    /// Coefficient box `[s1, s2, s3]`.
    pub(crate) fn cube_dims(&self) -> [usize; 3] {
        [0, 1, 2].map(|a| self.axes[a].side())
    }

    /// Node counts `[N1, N2, N3]`.
    pub(crate) fn grid_dims(&self) -> [usize; 3] {
        [0, 1, 2].map(|a| self.axes[a].points)
    }

    /// `Σ_k c_k e^{ik·x}` on the grid `x_j = 2π i_j / N`.
    #[cfg(test)]
    pub(crate) fn synthesize(&self, cube: ArrayView3<Complex64>) -> Array3<Complex64> {
        let input = cube.as_standard_layout();
        let values = self.synthesize_flat(input.as_slice().expect("standard layout"));
        let [a, b, c] = self.grid_dims();
        Array3::from_shape_vec((a, b, c), values).expect("shape matches")
    }

    /// Fourier coefficients `N⁻³ Σ_x f(x) e^{-ik·x}` on the coefficient box.
    #[cfg(test)]
    pub(crate) fn analyze(&self, values: ArrayView3<Complex64>) -> Array3<Complex64> {
        let mut flat = take_dirty(values.len());
        flat.iter_mut().zip(values.iter()).for_each(|(d, s)| *d = *s);
        let [a, b, c] = self.cube_dims();
        Array3::from_shape_vec((a, b, c), self.analyze_flat(flat)).expect("shape matches")
    }

    /// Flat form of [`Self::synthesize`]: input `[k1][k2][k3]`, output
    /// `[x1][x2][x3]`, both with the last index fastest.
    pub(crate) fn synthesize_flat(&self, cube: &[Complex64]) -> Vec<Complex64> {
        let [s1, s2, s3] = self.cube_dims();
        let [n1, n2, _] = self.grid_dims();
        let a = expand_rotate(&self.axes[0], cube, s2 * s3);
        let b = expand_rotate(&self.axes[1], &a, s3 * n1);
        recycle(a);
        let c = expand_rotate(&self.axes[2], &b, n1 * n2);
        recycle(b);
        debug_assert_eq!(cube.len(), s1 * s2 * s3);
        c
    }

    /// Flat form of [`Self::analyze`]; consumes the physical values.
    pub(crate) fn analyze_flat(&self, values: Vec<Complex64>) -> Vec<Complex64> {
        let [_, s2, s3] = self.cube_dims();
        let [n1, n2, n3] = self.grid_dims();
        let a = truncate_rotate(&self.axes[2], values, n1 * n2);
        let b = truncate_rotate(&self.axes[1], a, s3 * n1);
        let mut c = truncate_rotate(&self.axes[0], b, s2 * s3);
        let scale = ((n1 * n2 * n3) as f64).recip();
        c.iter_mut().for_each(|z| *z *= scale);
        c
    }
}

/// Input `[a][p]` with `a` the retained wavenumbers of `axis`; output `[p][x]`
/// with the synthesized axis fastest.
fn expand_rotate(axis: &AxisPlan, input: &[Complex64], lines: usize) -> Vec<Complex64> {
    let (big, n, na) = (axis.points, axis.n, axis.side());
    let fft = &axis.inverse;
    let scratch_len = fft.get_inplace_scratch_len();
    let mut out = take_dirty(lines * big);
    out.par_chunks_mut(BLOCK * big).enumerate().for_each_init(
        || vec![ZERO; scratch_len],
        |scratch, (block, dst)| {
            let p0 = block * BLOCK;
            let width = dst.len() / big;
            // Wavenumbers 0..=n go to slots 0..=n, negative ones to the top of
            // the line; the gap in between is zero padding.
            let mut support = [0u8; BLOCK];
            for pp in 0..width {
                dst[pp * big + n + 1..pp * big + big - n].fill(ZERO);
            }
            for a in 0..na {
                let slot = axis.slot(a);
                let row = &input[a * lines + p0..a * lines + p0 + width];
                for (pp, &z) in row.iter().enumerate() {
                    dst[pp * big + slot] = z;
                    if z != ZERO {
                        support[pp] = support[pp].max(if a == n { 1 } else { 2 });
                    }
                }
            }
            for (line, &kind) in dst.chunks_mut(big).zip(support.iter()) {
                match kind {
                    0 => {}
                    1 => {
                        let c = line[0];
                        line.fill(c);
                    }
                    _ => fft.process_with_scratch(line, scratch),
                }
            }
        },
    );
    out
}

/// Input `[p][x]` with the physical axis fastest; output `[a][p]` holding the
/// retained wavenumbers of `axis` slowest.
fn truncate_rotate(axis: &AxisPlan, input: Vec<Complex64>, lines: usize) -> Vec<Complex64> {
    let (big, side) = (axis.points, axis.side());
    let fft = &axis.forward;
    let scratch_len = fft.get_inplace_scratch_len();
    let slots: Vec<usize> = (0..side).map(|a| axis.slot(a)).collect();
    // Per block of lines: FFT a cached copy of each line and keep the retained
    // wavenumbers as an `[a][pp]` tile.
    let blocks = lines.div_ceil(BLOCK);
    let mut tiles = take_dirty(blocks * side * BLOCK);
    input.par_chunks(BLOCK * big).zip(tiles.par_chunks_mut(side * BLOCK)).for_each_init(
        || (vec![ZERO; big], vec![ZERO; scratch_len]),
        |(buf, scratch), (src, tile)| {
            for (pp, line) in src.chunks(big).enumerate() {
                let first = line[0];
                if line.iter().all(|z| *z == first) {
                    for (a, &slot) in slots.iter().enumerate() {
                        tile[a * BLOCK + pp] = if slot == 0 { first * big as f64 } else { ZERO };
                    }
                    continue;
                }
                buf.copy_from_slice(line);
                fft.process_with_scratch(buf, scratch);
                for (a, &slot) in slots.iter().enumerate() {
                    tile[a * BLOCK + pp] = buf[slot];
                }
            }
        },
    );
    recycle(input);
    let mut out = take_dirty(side * lines);
    out.par_chunks_mut(lines).enumerate().for_each(|(a, row)| {
        for (block, chunk) in row.chunks_mut(BLOCK).enumerate() {
            let start = (block * side + a) * BLOCK;
            chunk.copy_from_slice(&tiles[start..start + chunk.len()]);
        }
    });
    recycle(tiles);
    out
}

/// Packs `a + i b` into a flat pooled buffer.
pub(crate) fn pack_pair(a: ArrayView3<Complex64>, b: Option<ArrayView3<Complex64>>) -> Vec<Complex64> {
    let mut packed = take_dirty(a.len());
    match b {
        Some(b) => {
            for ((d, x), y) in packed.iter_mut().zip(a.iter()).zip(b.iter()) {
                *d = x + Complex64::i() * y;
            }
        }
        None => packed.iter_mut().zip(a.iter()).for_each(|(d, x)| *d = *x),
    }
    packed
}

/// Separates the spectra of a packed real pair on the box `dims` through
/// `û(−k) = conj(û(k))`. The outputs are exactly Hermitian.
pub(crate) fn split_pair(dims: [usize; 3], spec: &[Complex64]) -> (Array3<Complex64>, Array3<Complex64>) {
    let [s1, s2, s3] = dims;
    let at = |i: usize, j: usize, l: usize| spec[(i * s2 + j) * s3 + l];
    let mut first = Array3::zeros((s1, s2, s3));
    let mut second = Array3::zeros((s1, s2, s3));
    for i in 0..s1 {
        for j in 0..s2 {
            for l in 0..s3 {
                let (z, w) = (at(i, j, l), at(s1 - 1 - i, s2 - 1 - j, s3 - 1 - l).conj());
                first[[i, j, l]] = 0.5 * (z + w);
                second[[i, j, l]] = (z - w) * Complex64::new(0.0, -0.5);
            }
        }
    }
    (first, second)
}

/// Synthesizes up to two real fields with one complex transform by packing
/// them as `a + i b`.
pub(crate) fn synthesize_real_pair(
    t: &Transform3,
    a: ArrayView3<Complex64>,
    b: Option<ArrayView3<Complex64>>,
) -> (Array3<f64>, Option<Array3<f64>>) {
    let has_second = b.is_some();
    let packed = pack_pair(a, b);
    let values = t.synthesize_flat(&packed);
    recycle(packed);
    let [n1, n2, n3] = t.grid_dims();
    let shape = (n1, n2, n3);
    let re = Array3::from_shape_vec(shape, values.iter().map(|z| z.re).collect());
    let im = has_second.then(|| Array3::from_shape_vec(shape, values.iter().map(|z| z.im).collect()));
    recycle(values);
    (re.expect("shape matches"), im.map(|v| v.expect("shape matches")))
}

/// Analyzes up to two real fields with one complex transform.
pub(crate) fn analyze_real_pair(
    t: &Transform3,
    a: ArrayView3<f64>,
    b: Option<ArrayView3<f64>>,
) -> (Array3<Complex64>, Option<Array3<Complex64>>) {
    let mut packed = take_dirty(a.len());
    match b {
        Some(b) => {
            for ((d, x), y) in packed.iter_mut().zip(a.iter()).zip(b.iter()) {
                *d = Complex64::new(*x, *y);
            }
        }
        None => packed.iter_mut().zip(a.iter()).for_each(|(d, x)| *d = Complex64::new(*x, 0.0)),
    }
    let spec = t.analyze_flat(packed);
    let (first, second) = split_pair(t.cube_dims(), &spec);
    recycle(spec);
    (first, b.map(|_| second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn direct_synthesis(n: usize, points: usize, cube: &Array3<Complex64>) -> Array3<Complex64> {
        let side = 2 * n + 1;
        Array3::from_shape_fn((points, points, points), |(a, b, c)| {
            let x = [a, b, c].map(|v| 2.0 * PI * v as f64 / points as f64);
            let mut acc = ZERO;
            for i in 0..side {
                for j in 0..side {
                    for l in 0..side {
                        let k = [i, j, l].map(|v| v as f64 - n as f64);
                        let phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
                        acc += cube[[i, j, l]] * Complex64::from_polar(1.0, phase);
                    }
                }
            }
            acc
        })
    }

    #[test]
    fn pruned_synthesis_matches_direct_sum() {
        let (n, points) = (2, 7);
        let side = 2 * n + 1;
        let cube = Array3::from_shape_fn((side, side, side), |(i, j, l)| {
            Complex64::new((i * 7 + j * 3 + l) as f64 * 0.01, (i + 2 * j + 5 * l) as f64 * -0.02)
        });
        let t = Transform3::new(n, points);
        let fast = t.synthesize(cube.view());
        let slow = direct_synthesis(n, points, &cube);
        for (a, b) in fast.iter().zip(slow.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
        let back = t.analyze(fast.view());
        for (a, b) in back.iter().zip(cube.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn collapsed_axis_matches_full_grid() {
        // Coefficients confined to k3 = 0: values are independent of x3.
        let (n, points) = (3, 10);
        let side = 2 * n + 1;
        let plane = Array3::from_shape_fn((side, side, 1), |(i, j, _)| {
            Complex64::new((i * 5 + j) as f64 * 0.1, (i as f64 - j as f64) * 0.03)
        });
        let mut cube = Array3::zeros((side, side, side));
        cube.slice_mut(ndarray::s![.., .., n..=n]).assign(&plane);
        let full = Transform3::new(n, points).synthesize(cube.view());
        let t = Transform3::reduced(n, points, [true, true, false]);
        assert_eq!(t.grid_dims(), [points, points, 1]);
        let reduced = t.synthesize(plane.view());
        for ((i, j, l), z) in full.indexed_iter() {
            assert!((z - reduced[[i, j, 0]]).norm() < 1e-12, "{i} {j} {l}");
        }
        let back = t.analyze(reduced.view());
        for (a, b) in back.iter().zip(plane.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}

