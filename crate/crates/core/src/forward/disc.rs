//! Separation-of-variables solution for a sound-hard disc, used as an oracle.

use crate::error::{Error, Result};
use crate::fields::IncidentField;
use crate::geometry::{Direction, Point2};
use crate::specialfun::{bessel_j_seq, bessel_y_seq, hankel1_seq};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

const TAIL: f64 = 1e-12;

/// Mode n coefficient of the incident field, given H_0..H_cap at the source radius.
type IncidentCoeff = Box<dyn Fn(usize, &[Complex64]) -> Complex64>;

/// −J_n'(ka) / H_n'(ka) for n = 0..=nmax.
pub fn disc_scattering_coefficients(nmax: usize, ka: f64) -> Vec<Complex64> {
    let j = bessel_j_seq(nmax + 1, ka);
    let y = bessel_y_seq(nmax + 1, ka);
    (0..=nmax)
        .map(|n| {
            let (jp, yp) = if n == 0 {
                (-j[1], -y[1])
            } else {
                (0.5 * (j[n - 1] - j[n + 1]), 0.5 * (y[n - 1] - y[n + 1]))
            };
            -Complex64::new(jp, 0.0) / Complex64::new(jp, yp)
        })
        .collect()
}

/// Scattered field w = Σ_n ε_n β_n H_n(k r) cos(n(θ − θ_ref)) about the disc center.
#[derive(Clone, Debug)]
pub struct DiscSeries {
    center: Point2,
    radius: f64,
    k: f64,
    incident: IncidentField,
    ref_angle: f64,
    coeffs: Vec<Complex64>,
}

pub fn disc_series_solution(center: Point2, radius: f64, k: f64, incident: IncidentField) -> Result<DiscSeries> {
    if !(radius > 0.0) || !(k > 0.0) {
        return Err(Error::Domain("disc radius and wavenumber must be positive".into()));
    }
    let ka = k * radius;
    let base = (ka + 40.0 + 12.0 * ka.cbrt()).ceil() as usize;
    let (cap, ref_angle, incident_coeff): (usize, f64, IncidentCoeff) = match incident {
        IncidentField::PlaneWave { d } => {
            let phase = Complex64::cis(k * center.dot(d.omega()));
            let ipow = [Complex64::new(1.0, 0.0), Complex64::i(), Complex64::new(-1.0, 0.0), -Complex64::i()];
            (base, d.angle(), Box::new(move |n, _| phase * ipow[n % 4]))
        }
        IncidentField::PointSource { y } => {
            let rho = y.dist(center);
            if rho <= radius {
                return Err(Error::Domain("point source must lie outside the disc".into()));
            }
            let extra = (30.0 / (rho / radius).ln()).ceil() as usize;
            let cap = base.max(extra + (k * rho) as usize + 20);
            let d = y - center;
            (cap, d.y.atan2(d.x), Box::new(move |n, hy: &[Complex64]| Complex64::new(0.0, 0.25) * hy[n]))
        }
        IncidentField::ModulatedPlane { .. } => {
            return Err(Error::Domain("disc series oracle supports plane waves and point sources only".into()));
        }
    };
    let rho = match incident {
        IncidentField::PointSource { y } => y.dist(center),
        _ => radius,
    };
    let hy = hankel1_seq(cap, k * rho);
    let ha = hankel1_seq(cap, ka);
    let a = disc_scattering_coefficients(cap, ka);
    let mut coeffs = Vec::new();
    let mut head = 0.0f64;
    let mut quiet = 0;
    for n in 0..=cap {
        let beta = incident_coeff(n, &hy) * a[n];
        let size = (beta * ha[n]).norm();
        if !size.is_finite() || !beta.is_finite() {
            break;
        }
        coeffs.push(beta);
        head = head.max(size);
        if n as f64 > ka && size < TAIL * head {
            quiet += 1;
            if quiet == 2 {
                return Ok(DiscSeries { center, radius, k, incident, ref_angle, coeffs });
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Resolution(format!(
        "disc series did not reach a tail below {TAIL:e} within {} terms in double precision",
        coeffs.len()
    )))
}

impl DiscSeries {
    pub fn terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn incident(&self) -> &IncidentField {
        &self.incident
    }

    fn polar(&self, x: Point2) -> Result<(f64, f64, Point2)> {
        let d = x - self.center;
        let r = d.norm();
        if r < self.radius * (1.0 - 1e-14) {
            return Err(Error::Domain("evaluation point inside the disc".into()));
        }
        Ok((r, d.y.atan2(d.x) - self.ref_angle, d * (1.0 / r)))
    }

    pub fn eval_scattered_with_gradient(&self, x: Point2) -> Result<(Complex64, [Complex64; 2])> {
        let (r, phi, er) = self.polar(x)?;
        let n = self.coeffs.len();
        let h = hankel1_seq(n, self.k * r);
        let (mut w, mut dr, mut dphi) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for (m, beta) in self.coeffs.iter().enumerate() {
            let eps = if m == 0 { 1.0 } else { 2.0 };
            let hp = if m == 0 { -h[1] } else { h[m - 1] - h[m] * (m as f64 / (self.k * r)) };
            let (s, c) = (m as f64 * phi).sin_cos();
            w += beta * h[m] * (eps * c);
            dr += beta * hp * (eps * c * self.k);
            dphi += beta * h[m] * (-eps * m as f64 * s);
        }
        let et = Point2::new(-er.y, er.x);
        let grad = [dr * er.x + dphi * (et.x / r), dr * er.y + dphi * (et.y / r)];
        Ok((w, grad))
    }

    pub fn eval_scattered(&self, x: Point2) -> Result<Complex64> {
        Ok(self.eval_scattered_with_gradient(x)?.0)
    }

    pub fn eval_total(&self, x: Point2) -> Result<Complex64> {
        Ok(self.incident.eval(self.k, x)? + self.eval_scattered(x)?)
    }

    pub fn eval_total_gradient(&self, x: Point2) -> Result<[Complex64; 2]> {
        let (_, gw) = self.eval_scattered_with_gradient(x)?;
        let gu = self.incident.eval_gradient(self.k, x)?;
        Ok([gu[0] + gw[0], gu[1] + gw[1]])
    }

    /// Far-field pattern in direction φ, normalized so w ≈ e^{ik|x|}/√|x| F(φ).
    pub fn far_field(&self, dir: &Direction) -> Complex64 {
        let phi = dir.angle() - self.ref_angle;
        let ipow = [Complex64::new(1.0, 0.0), -Complex64::i(), Complex64::new(-1.0, 0.0), Complex64::i()];
        let s: Complex64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, b)| b * ipow[m % 4] * ((if m == 0 { 1.0 } else { 2.0 }) * (m as f64 * phi).cos()))
            .sum();
        let shift = Complex64::cis(-self.k * self.center.dot(dir.omega()));
        shift * Complex64::from_polar((2.0 / (PI * self.k)).sqrt(), -FRAC_PI_4) * s
    }
}
