//! Physical-space norms evaluated on an oversampled collocation grid.
//!
//! `‖·‖_{L^∞}` of a trigonometric polynomial is not attained on any fixed grid,
//! so the grid maximum is refined by Newton iterations on `|u(x)|²` using
//! direct evaluation of the Fourier series around the best nodes.

use ndarray::{Axis, Zip};
use num_complex::Complex64;

use super::field::SpectralVectorField;
use crate::{Result, TORUS_VOLUME};

/// Options for the sup-norm evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinfOptions {
    /// Nodes per axis; `None` means `4n`.
    pub points: Option<usize>,
    /// Refine the best grid nodes to a local maximum of `|u|²`.
    pub refine: bool,
    /// Number of well-separated nodes to refine.
    pub candidates: usize,
}

impl Default for LinfOptions {
    fn default() -> Self {
        Self { points: None, refine: true, candidates: 4 }
    }
}

fn evaluation_points(f: &SpectralVectorField, points: Option<usize>) -> usize {
    points.unwrap_or(4 * f.n()).max(2 * f.n() + 2)
}

/// `∫ |u(x)| dx` by the rectangle rule on `points³` nodes (default `4n`).
pub fn l1_norm(f: &SpectralVectorField, points: Option<usize>) -> Result<f64> {
    let values = f.reduced_physical(evaluation_points(f, points))?;
    let (u, v, w) = (values.index_axis(Axis(0), 0), values.index_axis(Axis(0), 1), values.index_axis(Axis(0), 2));
    let mut sum = 0.0;
    Zip::from(&u).and(&v).and(&w).for_each(|a, b, c| sum += (a * a + b * b + c * c).sqrt());
    Ok(sum * TORUS_VOLUME / u.len() as f64)
}

/// `sup_x |u(x)|` with default options.
pub fn linf_norm(f: &SpectralVectorField, points: Option<usize>) -> Result<f64> {
    linf_norm_with(f, LinfOptions { points, ..LinfOptions::default() })
}

pub fn linf_norm_with(f: &SpectralVectorField, opts: LinfOptions) -> Result<f64> {
    let points = evaluation_points(f, opts.points);
    // Coordinates the field does not depend on are sampled at a single node.
    let values = f.reduced_physical(points)?;
    let (u, v, w) = (values.index_axis(Axis(0), 0), values.index_axis(Axis(0), 1), values.index_axis(Axis(0), 2));
    let dims = [u.len_of(Axis(0)), u.len_of(Axis(1)), u.len_of(Axis(2))];
    let mag2 = Zip::from(&u).and(&v).and(&w).map_collect(|a, b, c| a * a + b * b + c * c);
    let grid_max = mag2.iter().cloned().fold(0.0_f64, f64::max);
    if !opts.refine || grid_max == 0.0 {
        return Ok(grid_max.sqrt());
    }

    // Best nodes, keeping only ones at least two cells apart (periodically).
    let mut ranked: Vec<(f64, [usize; 3])> = mag2
        .indexed_iter()
        .filter(|(_, &m)| m >= 0.25 * grid_max)
        .map(|((i, j, l), &m)| (m, [i, j, l]))
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let periodic_gap = |axis: usize, a: usize, b: usize| {
        let d = a.abs_diff(b);
        d.min(dims[axis] - d)
    };
    let mut starts: Vec<[usize; 3]> = Vec::new();
    for (_, idx) in ranked {
        if starts.len() >= opts.candidates.max(1) {
            break;
        }
        if starts.iter().all(|s| (0..3).any(|a| periodic_gap(a, s[a], idx[a]) > 2)) {
            starts.push(idx);
        }
    }

    let active = dims.map(|d| d > 1);
    let eval = PointEvaluator::new(f);
    let h = 2.0 * std::f64::consts::PI / points as f64;
    let mut best = grid_max;
    for s in starts {
        let x0 = s.map(|i| i as f64 * h);
        best = best.max(eval.maximize(x0, h, active));
    }
    Ok(best.sqrt())
}

/// Direct evaluation of a truncated Fourier series together with its first
/// and second derivatives.
struct PointEvaluator {
    modes: Vec<([f64; 3], [usize; 3], [Complex64; 3])>,
    n: usize,
}

struct Jet {
    value: f64,
    gradient: [f64; 3],
    hessian: [[f64; 3]; 3],
}

impl PointEvaluator {
    fn new(f: &SpectralVectorField) -> Self {
        let grid = f.grid();
        let n = grid.n();
        let modes = grid
            .modes()
            .filter_map(|(k, idx)| {
                let c = [0, 1, 2].map(|c| f.coeffs()[[c, idx.0, idx.1, idx.2]]);
                let nonzero = c.iter().any(|z| z.norm_sqr() > 0.0);
                nonzero.then(|| (k.map(|v| v as f64), [idx.0, idx.1, idx.2], c))
            })
            .collect();
        Self { modes, n }
    }

    /// `|u|²` with gradient and Hessian at `x`.
    fn jet(&self, x: [f64; 3]) -> Jet {
        let side = 2 * self.n + 1;
        let tables: Vec<Vec<Complex64>> = x
            .iter()
            .map(|&xa| {
                (0..side)
                    .map(|i| Complex64::from_polar(1.0, (i as f64 - self.n as f64) * xa))
                    .collect()
            })
            .collect();
        let mut u = [0.0; 3];
        let mut du = [[0.0; 3]; 3];
        let mut ddu = [[[0.0; 3]; 3]; 3];
        for (k, idx, c) in &self.modes {
            let phase = tables[0][idx[0]] * tables[1][idx[1]] * tables[2][idx[2]];
            for comp in 0..3 {
                let z = c[comp] * phase;
                u[comp] += z.re;
                for a in 0..3 {
                    du[comp][a] -= k[a] * z.im;
                    for b in 0..3 {
                        ddu[comp][a][b] -= k[a] * k[b] * z.re;
                    }
                }
            }
        }
        let mut jet = Jet { value: 0.0, gradient: [0.0; 3], hessian: [[0.0; 3]; 3] };
        for comp in 0..3 {
            jet.value += u[comp] * u[comp];
            for a in 0..3 {
                jet.gradient[a] += 2.0 * u[comp] * du[comp][a];
                for b in 0..3 {
                    jet.hessian[a][b] += 2.0 * (du[comp][a] * du[comp][b] + u[comp] * ddu[comp][a][b]);
                }
            }
        }
        jet
    }

    /// Damped Newton ascent on `|u|²` from `x`, with steps capped at `h`.
    /// Only `active` coordinates move.
    fn maximize(&self, mut x: [f64; 3], h: f64, active: [bool; 3]) -> f64 {
        let restrict = |mut jet: Jet| {
            for a in (0..3).filter(|&a| !active[a]) {
                jet.gradient[a] = 0.0;
                for b in 0..3 {
                    jet.hessian[a][b] = 0.0;
                    jet.hessian[b][a] = 0.0;
                }
                jet.hessian[a][a] = -1.0;
            }
            jet
        };
        let mut jet = restrict(self.jet(x));
        for _ in 0..40 {
            let g = jet.gradient;
            let gnorm = norm3(g);
            if gnorm == 0.0 {
                break;
            }
            let mut step = solve3(jet.hessian, g.map(|v| -v))
                .filter(|s| dot3(*s, g) > 0.0)
                .unwrap_or_else(|| g.map(|v| v * h / gnorm));
            let len = norm3(step);
            if len > h {
                step = step.map(|v| v * h / len);
            }
            let mut accepted = false;
            for _ in 0..30 {
                let trial = [x[0] + step[0], x[1] + step[1], x[2] + step[2]];
                let tj = restrict(self.jet(trial));
                if tj.value > jet.value {
                    x = trial;
                    jet = tj;
                    accepted = true;
                    break;
                }
                step = step.map(|v| 0.5 * v);
            }
            if !accepted || norm3(step) < 1e-14 {
                break;
            }
        }
        jet.value
    }
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

fn solve3(m: [[f64; 3]; 3], r: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-300 || !d.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, o) in out.iter_mut().enumerate() {
        let mut mm = m;
        for row in 0..3 {
            mm[row][col] = r[row];
        }
        *o = det(mm) / d;
    }
    out.iter().all(|v| v.is_finite()).then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::WavenumberGrid;
    use std::f64::consts::PI;

    #[test]
    fn constant_field_norms() {
        let g = WavenumberGrid::new(2).unwrap();
        let f = SpectralVectorField::constant(&g, [3.0, 0.0, 0.0]);
        assert!((linf_norm(&f, None).unwrap() - 3.0).abs() < 1e-14);
        assert!((l1_norm(&f, None).unwrap() - TORUS_VOLUME * 3.0).abs() < 1e-10);
        assert!((f.l2_norm() - TORUS_VOLUME.sqrt() * 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_field_norms() {
        let g = WavenumberGrid::new(2).unwrap();
        let f = SpectralVectorField::zeros(&g);
        assert_eq!(linf_norm(&f, None).unwrap(), 0.0);
        assert_eq!(l1_norm(&f, None).unwrap(), 0.0);
        assert_eq!(f.l2_norm(), 0.0);
    }

    #[test]
    fn cos_x1_norms() {
        let g = WavenumberGrid::new(2).unwrap();
        let f = SpectralVectorField::cosine_mode(&g, [1, 0, 0], [1.0, 0.0, 0.0]).unwrap();
        assert!((linf_norm(&f, None).unwrap() - 1.0).abs() < 1e-10);
        // ∫|cos x₁| over the box is 4 · 4π²; the kink of |cos| limits the
        // rectangle rule to second order.
        let oracle = 4.0 * 4.0 * PI * PI;
        let e64 = (l1_norm(&f, Some(64)).unwrap() - oracle).abs();
        let e128 = (l1_norm(&f, Some(128)).unwrap() - oracle).abs();
        assert!(e64 < 2e-3 * oracle);
        assert!(e64 / e128 > 3.5 && e64 / e128 < 4.5, "{e64} {e128}");
    }

    #[test]
    fn refinement_finds_off_grid_maximum() {
        // Peak of cos(x₁ - 0.3) sits between the nodes of an 8-point grid.
        let g = WavenumberGrid::new(2).unwrap();
        let mut f = SpectralVectorField::zeros(&g);
        let (idx, neg) = (g.index_of([1, 0, 0]).unwrap(), g.index_of([-1, 0, 0]).unwrap());
        f.coeffs_mut()[[0, idx.0, idx.1, idx.2]] = 0.5 * Complex64::from_polar(1.0, -0.3);
        f.coeffs_mut()[[0, neg.0, neg.1, neg.2]] = 0.5 * Complex64::from_polar(1.0, 0.3);
        let coarse = linf_norm_with(&f, LinfOptions { refine: false, ..Default::default() }).unwrap();
        let refined = linf_norm(&f, None).unwrap();
        assert!(coarse < 1.0 - 1e-3);
        assert!((refined - 1.0).abs() < 1e-13);
    }
}
