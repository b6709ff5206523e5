//! Exponential integrators for `u' = Lu + N(u, t)` with the diagonal heat
//! operator `L = −ν|k|²` treated exactly.

use std::collections::BTreeMap;
use std::sync::Arc;

use ndarray::Array3;
use num_complex::Complex64;

use crate::spectral::{SpectralVectorField, WavenumberGrid};
use crate::{Error, Result};

/// Nonlinear part `N(u, t)` of the right-hand side.
pub type NonlinearFn<'a> = dyn FnMut(&SpectralVectorField, f64) -> Result<SpectralVectorField> + 'a;

/// A time-stepping scheme, constructed per step size.
pub trait Integrator: Send + Sync {
    fn name(&self) -> &'static str;
    /// Classical order of accuracy.
    fn order(&self) -> u32;
    fn stepper(&self, grid: &Arc<WavenumberGrid>, nu: f64, h: f64) -> Box<dyn Stepper>;
}

/// One step of fixed size `h` for a fixed grid and viscosity.
pub trait Stepper: Send + Sync {
    fn step(
        &self,
        u: &SpectralVectorField,
        t: f64,
        nonlinear: &mut NonlinearFn<'_>,
    ) -> Result<SpectralVectorField>;
    fn h(&self) -> f64;
}

/// Name-keyed set of available integrators.
pub struct IntegratorRegistry {
    entries: BTreeMap<&'static str, Arc<dyn Integrator>>,
}

impl IntegratorRegistry {
    pub fn empty() -> Self {
        Self { entries: BTreeMap::new() }
    }

    /// `etdrk4` and `if_rk4`.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(Etdrk4));
        r.register(Arc::new(IfRk4));
        r
    }

    pub fn register(&mut self, integrator: Arc<dyn Integrator>) {
        self.entries.insert(integrator.name(), integrator);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Integrator>> {
        self.entries.get(name).cloned().ok_or_else(|| Error::UnknownIntegrator {
            name: name.to_string(),
            available: self.names().join(", "),
        })
    }
}

/// Fourth-order exponential time differencing (Cox–Matthews), with the
/// φ-function coefficients evaluated by contour integrals.
pub struct Etdrk4;

/// Fourth-order integrating-factor Runge–Kutta.
pub struct IfRk4;

impl Integrator for Etdrk4 {
    fn name(&self) -> &'static str {
        "etdrk4"
    }

    fn order(&self) -> u32 {
        4
    }

    fn stepper(&self, grid: &Arc<WavenumberGrid>, nu: f64, h: f64) -> Box<dyn Stepper> {
        let coeffs = |f: fn(Complex64) -> Complex64| grid.radial_table(|k2| h * contour_mean(-nu * k2 * h, f));
        Box::new(Etdrk4Stepper {
            h,
            e: grid.radial_table(|k2| (-nu * k2 * h).exp()),
            e2: grid.radial_table(|k2| (-0.5 * nu * k2 * h).exp()),
            q: coeffs(|z| ((0.5 * z).exp() - 1.0) / z),
            f1: coeffs(|z| (-4.0 - z + z.exp() * (4.0 - 3.0 * z + z * z)) / z.powi(3)),
            f2: coeffs(|z| (2.0 + z + z.exp() * (z - 2.0)) / z.powi(3)),
            f3: coeffs(|z| (-4.0 - 3.0 * z - z * z + z.exp() * (4.0 - z)) / z.powi(3)),
        })
    }
}

impl Integrator for IfRk4 {
    fn name(&self) -> &'static str {
        "if_rk4"
    }

    fn order(&self) -> u32 {
        4
    }

    fn stepper(&self, grid: &Arc<WavenumberGrid>, nu: f64, h: f64) -> Box<dyn Stepper> {
        Box::new(IfRk4Stepper {
            h,
            e: grid.radial_table(|k2| (-nu * k2 * h).exp()),
            e2: grid.radial_table(|k2| (-0.5 * nu * k2 * h).exp()),
            one: grid.radial_table(|_| 1.0),
            sixth: grid.radial_table(|_| h / 6.0),
            third: grid.radial_table(|_| h / 3.0),
        })
    }
}

/// Mean of `f` over a circle of radius one around the real point `z`. The
/// functions used are real on the real axis, so only the real part is kept.
fn contour_mean(z: f64, f: fn(Complex64) -> Complex64) -> f64 {
    const POINTS: usize = 64;
    let sum: f64 = (0..POINTS)
        .map(|j| {
            let theta = std::f64::consts::PI * (j as f64 + 0.5) / POINTS as f64;
            f(Complex64::new(z, 0.0) + Complex64::from_polar(1.0, theta)).re
        })
        .sum();
    // Points in the upper half plane only; conjugate symmetry covers the rest.
    sum / POINTS as f64
}

struct Etdrk4Stepper {
    h: f64,
    e: Array3<f64>,
    e2: Array3<f64>,
    q: Array3<f64>,
    f1: Array3<f64>,
    f2: Array3<f64>,
    f3: Array3<f64>,
}

impl Stepper for Etdrk4Stepper {
    fn step(
        &self,
        u: &SpectralVectorField,
        t: f64,
        nonlinear: &mut NonlinearFn<'_>,
    ) -> Result<SpectralVectorField> {
        let h = self.h;
        let c = SpectralVectorField::combine;
        let nu_ = nonlinear(u, t)?;
        let a = c(&[(&self.e2, u), (&self.q, &nu_)]);
        let na = nonlinear(&a, t + 0.5 * h)?;
        let b = c(&[(&self.e2, u), (&self.q, &na)]);
        let nb = nonlinear(&b, t + 0.5 * h)?;
        // c = E2 a + Q (2 N(b) − N(u))
        let two_nb_minus_nu = nb.axpy(-0.5, &nu_);
        let two_q = self.q.mapv(|v| 2.0 * v);
        let cc = c(&[(&self.e2, &a), (&two_q, &two_nb_minus_nu)]);
        let nc = nonlinear(&cc, t + h)?;
        let two_f2 = self.f2.mapv(|v| 2.0 * v);
        Ok(c(&[
            (&self.e, u),
            (&self.f1, &nu_),
            (&two_f2, &na),
            (&two_f2, &nb),
            (&self.f3, &nc),
        ]))
    }

    fn h(&self) -> f64 {
        self.h
    }
}

struct IfRk4Stepper {
    h: f64,
    e: Array3<f64>,
    e2: Array3<f64>,
    one: Array3<f64>,
    sixth: Array3<f64>,
    third: Array3<f64>,
}

impl Stepper for IfRk4Stepper {
    fn step(
        &self,
        u: &SpectralVectorField,
        t: f64,
        nonlinear: &mut NonlinearFn<'_>,
    ) -> Result<SpectralVectorField> {
        let h = self.h;
        let c = SpectralVectorField::combine;
        // Stage slopes k_i = N(·); the classical form uses a = h k1 etc.
        let k1 = nonlinear(u, t)?;
        let half_h = self.one.mapv(|v| 0.5 * h * v);
        let e2_half_h = self.e2.mapv(|v| 0.5 * h * v);
        let s2 = c(&[(&self.e2, u), (&e2_half_h, &k1)]);
        let k2 = nonlinear(&s2, t + 0.5 * h)?;
        let s3 = c(&[(&self.e2, u), (&half_h, &k2)]);
        let k3 = nonlinear(&s3, t + 0.5 * h)?;
        let h_e2 = self.e2.mapv(|v| h * v);
        let s4 = c(&[(&self.e, u), (&h_e2, &k3)]);
        let k4 = nonlinear(&s4, t + h)?;
        let e_sixth = Array3::from_shape_fn(self.e.raw_dim(), |i| self.e[i] * self.sixth[i]);
        let e2_third = Array3::from_shape_fn(self.e.raw_dim(), |i| self.e2[i] * self.third[i]);
        Ok(c(&[
            (&self.e, u),
            (&e_sixth, &k1),
            (&e2_third, &k2),
            (&e2_third, &k3),
            (&self.sixth, &k4),
        ]))
    }

    fn h(&self) -> f64 {
        self.h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lists_and_rejects() {
        let r = IntegratorRegistry::builtin();
        assert_eq!(r.names(), vec!["etdrk4", "if_rk4"]);
        assert_eq!(r.get("if_rk4").unwrap().order(), 4);
        match r.get("euler") {
            Err(Error::UnknownIntegrator { available, .. }) => assert_eq!(available, "etdrk4, if_rk4"),
            other => panic!("unexpected {:?}", other.map(|i| i.name())),
        }
    }

    #[test]
    fn contour_coefficients_match_series_near_zero() {
        // Q/h → 1/2, f1/h → 1/6, f2/h → 1/6, f3/h → 1/6 as z → 0.
        let f1 = contour_mean(0.0, |z| (-4.0 - z + z.exp() * (4.0 - 3.0 * z + z * z)) / z.powi(3));
        let f2 = contour_mean(0.0, |z| (2.0 + z + z.exp() * (z - 2.0)) / z.powi(3));
        let q = contour_mean(0.0, |z| ((0.5 * z).exp() - 1.0) / z);
        assert!((f1 - 1.0 / 6.0).abs() < 1e-14);
        assert!((f2 - 1.0 / 6.0).abs() < 1e-14);
        assert!((q - 0.5).abs() < 1e-14);
        // Away from zero the direct formula is accurate.
        let z = -3.0_f64;
        let direct = (2.0 + z + z.exp() * (z - 2.0)) / z.powi(3);
        let viac = contour_mean(z, |z| (2.0 + z + z.exp() * (z - 2.0)) / z.powi(3));
        assert!((direct - viac).abs() < 1e-14);
    }
}
