//! Incident fields, the fundamental solution, Herglotz wave functions and the
//! scaled complex-exponential probe.

use crate::error::{Error, Result};
use crate::geometry::{Direction, Point2};
use crate::real::Real;
use crate::specialfun::jy01;
use num_complex::{Complex, Complex64};
use std::f64::consts::TAU;

pub type Vec2<T> = [T; 2];

#[inline]
pub fn lift<T: Real>(p: Point2) -> Vec2<T> {
    [T::from_f64(p.x), T::from_f64(p.y)]
}

#[inline]
fn dot<T: Real>(a: Vec2<T>, p: Point2) -> T {
    a[0] * p.x + a[1] * p.y
}

#[inline]
fn cis<T: Real>(phase: T) -> Complex<T> {
    let (s, c) = phase.sin_cos();
    Complex::new(c, s)
}

/// Φ_0(x, y) = (i/4) H_0(k|x − y|) and its x-gradient, given `dx = x − y`.
pub fn fundamental_with_gradient<T: Real>(k: f64, dx: Vec2<T>) -> Result<(Complex<T>, Vec2<Complex<T>>)> {
    let r2 = dx[0] * dx[0] + dx[1] * dx[1];
    if !(r2.to_f64() > 0.0) {
        return Err(Error::Singularity("fundamental solution evaluated at its source point".into()));
    }
    let r = r2.sqrt();
    let b = jy01(r * k);
    let quarter = 0.25;
    let value = Complex::new(-b.y0 * quarter, b.j0 * quarter);
    // (ik/4) (dx/r) H_0' = (k/4) (dx/r) (Y_1 − i J_1)
    let radial = Complex::new(b.y1 * (k * quarter), -b.j1 * (k * quarter));
    let g = [radial * (dx[0] / r), radial * (dx[1] / r)];
    Ok((value, g))
}

pub fn fundamental_solution(k: f64, x: Point2, y: Point2) -> Result<Complex64> {
    Ok(fundamental_with_gradient::<f64>(k, lift(x - y))?.0)
}

pub fn fundamental_solution_gradient(k: f64, x: Point2, y: Point2) -> Result<Vec2<Complex64>> {
    Ok(fundamental_with_gradient::<f64>(k, lift(x - y))?.1)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IncidentField {
    /// e^{ik x·d}
    PlaneWave { d: Direction },
    /// Φ_0(x, y)
    PointSource { y: Point2 },
    /// (x_0 − x)·ϑ e^{−ik x·d} with ϑ⊥ = d, i.e. ϑ = (−d_y, d_x).
    ModulatedPlane { x0: Point2, d: Direction },
}

impl IncidentField {
    pub fn singular_point(&self) -> Option<Point2> {
        match self {
            IncidentField::PointSource { y } => Some(*y),
            _ => None,
        }
    }

    /// Value and gradient at `x`, in the precision of `T`.
    pub fn eval_with_gradient_in<T: Real>(&self, k: f64, x: Vec2<T>) -> Result<(Complex<T>, Vec2<Complex<T>>)> {
        match *self {
            IncidentField::PlaneWave { d } => {
                let u = cis(dot(x, d.omega()) * k);
                let iku = Complex::new(-u.im, u.re) * T::from_f64(k);
                Ok((u, [iku * T::from_f64(d.omega().x), iku * T::from_f64(d.omega().y)]))
            }
            IncidentField::PointSource { y } => {
                fundamental_with_gradient(k, [x[0] - y.x, x[1] - y.y])
            }
            IncidentField::ModulatedPlane { x0, d } => {
                let th = modulation_axis(&d);
                let f = (T::from_f64(x0.x) - x[0]) * th.x + (T::from_f64(x0.y) - x[1]) * th.y;
                let g = cis(-(dot(x, d.omega()) * k));
                // ∇(f g) = −ϑ g − ik d f g
                let ikfg = Complex::new(-g.im, g.re) * (f * k);
                let grad = [
                    -(g * T::from_f64(th.x)) - ikfg * T::from_f64(d.omega().x),
                    -(g * T::from_f64(th.y)) - ikfg * T::from_f64(d.omega().y),
                ];
                Ok((g * f, grad))
            }
        }
    }

    pub fn eval(&self, k: f64, x: Point2) -> Result<Complex64> {
        Ok(self.eval_with_gradient_in::<f64>(k, lift(x))?.0)
    }

    pub fn eval_gradient(&self, k: f64, x: Point2) -> Result<Vec2<Complex64>> {
        Ok(self.eval_with_gradient_in::<f64>(k, lift(x))?.1)
    }
}

/// ϑ with ϑ⊥ = d.
pub fn modulation_axis(d: &Direction) -> Point2 {
    Point2::new(-d.omega().y, d.omega().x)
}

/// Parameters of the probe e^{x·(τω + i√(τ²+k²) ω⊥)}, evaluated with the
/// magnitude shifted by e^{−τ t_ref}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeParams {
    pub omega: Direction,
    pub tau: f64,
    pub k: f64,
    pub t_ref: f64,
}

impl ProbeParams {
    pub fn new(omega: Direction, tau: f64, k: f64, t_ref: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!("tau must be positive, got {tau}")));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Domain(format!("k must be positive, got {k}")));
        }
        if !t_ref.is_finite() {
            return Err(Error::Domain("t_ref must be finite".into()));
        }
        Ok(ProbeParams { omega, tau, k, t_ref })
    }

    /// √(τ² + k²)
    pub fn oscillation(&self) -> f64 {
        self.tau.hypot(self.k)
    }

    /// s = √(τ² + k²) + τ
    pub fn s(&self) -> f64 {
        self.oscillation() + self.tau
    }

    /// Scaled value and gradient at `x`, in the precision of `T`.
    pub fn eval_with_gradient_in<T: Real>(&self, x: Vec2<T>) -> (Complex<T>, Vec2<Complex<T>>) {
        let tau = T::from_f64(self.tau);
        let osc = (tau * tau + T::from_f64(self.k * self.k)).sqrt();
        let mag = (tau * (dot(x, self.omega.omega()) - T::from_f64(self.t_ref))).exp();
        let v = cis(osc * dot(x, self.omega.perp())) * mag;
        let (w, p) = (self.omega.omega(), self.omega.perp());
        let gx = Complex::new(tau * w.x, osc * p.x);
        let gy = Complex::new(tau * w.y, osc * p.y);
        (v, [v * gx, v * gy])
    }

    pub fn eval(&self, x: Point2) -> Complex64 {
        self.eval_with_gradient_in::<f64>(lift(x)).0
    }

    pub fn eval_gradient(&self, x: Point2) -> Vec2<Complex64> {
        self.eval_with_gradient_in::<f64>(lift(x)).1
    }

    /// log|v| including the shift: τ(x·ω − t_ref).
    pub fn log_magnitude(&self, x: Point2) -> f64 {
        self.tau * (x.dot(self.omega.omega()) - self.t_ref)
    }
}

/// Trapezoid approximation of ∫_{S¹} e^{ik x·d} g(d) ds(d), with `g` sampled
/// at the angles 2πj/N.
pub fn herglotz_wave(g: &[Complex64], k: f64, x: Point2) -> Result<Complex64> {
    let n = g.len();
    if n < 8 {
        return Err(Error::Resolution(format!("Herglotz density needs at least 8 samples, got {n}")));
    }
    let w = TAU / n as f64;
    Ok(g
        .iter()
        .zip(Direction::uniform_grid(n))
        .map(|(gj, d)| gj * Complex64::cis(k * x.dot(d.omega())))
        .sum::<Complex64>()
        * w)
}
