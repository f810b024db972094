//! Cauchy data of the total field on the measurement circle ∂B_R, taken either
//! straight from the solver or rebuilt from Dirichlet data alone through the
//! exterior Dirichlet-to-Neumann map of the circle.
//!
//! All values are carried in double-double: the indicator pairs these data
//! with an exponentially growing probe, and the integral it needs is many
//! orders of magnitude below the integrand.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::fields::{lift, IncidentField, Vec2};
use crate::forward::ScatterSolution;
use crate::geometry::Point2;
use crate::specialfun::jy01;
use num_complex::Complex;
use std::io::{self, Write};

pub type CDd = Complex<Dd>;

/// Harmonic tail of the scattered trace must fall below this fraction of its head.
pub const TAIL_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Direct,
    Recovered,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Direct => "direct",
            Provenance::Recovered => "recovered",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TraceData {
    center: Point2,
    radius: f64,
    k: f64,
    incident: IncidentField,
    provenance: Provenance,
    normals: Vec<Vec2<Dd>>,
    positions: Vec<Vec2<Dd>>,
    values: Vec<CDd>,
    normal_derivatives: Vec<CDd>,
}

pub(crate) fn cabs(z: CDd) -> f64 {
    z.re.to_f64().hypot(z.im.to_f64())
}

/// Unit vectors at the angles 2πj/n, in double-double.
pub fn circle_normals(n: usize) -> Vec<Vec2<Dd>> {
    (0..n)
        .map(|j| {
            let (s, c) = (Dd::PI * (2.0 * j as f64 / n as f64)).sin_cos();
            [c, s]
        })
        .collect()
}

fn check_node_count(n: usize) -> Result<()> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::Domain(format!("trace node count must be a power of two and at least 8, got {n}")));
    }
    Ok(())
}

fn check_source(incident: &IncidentField, center: Point2, radius: f64) -> Result<()> {
    if let Some(y) = incident.singular_point() {
        let distance = (y.dist(center) - radius).abs();
        if distance <= 1e-9 * radius {
            return Err(Error::SourceOnCircle { distance });
        }
    }
    Ok(())
}

impl TraceData {
    /// Wraps externally supplied Cauchy data sampled at the angles 2πj/N.
    pub fn from_values(
        center: Point2,
        radius: f64,
        k: f64,
        incident: IncidentField,
        provenance: Provenance,
        values: Vec<CDd>,
        normal_derivatives: Vec<CDd>,
    ) -> Result<Self> {
        let n = values.len();
        check_node_count(n)?;
        if normal_derivatives.len() != n {
            return Err(Error::Domain("Dirichlet and Neumann traces differ in length".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) || !(k > 0.0 && k.is_finite()) || !center.is_finite() {
            return Err(Error::Domain("trace circle needs a finite center, positive radius and wavenumber".into()));
        }
        check_source(&incident, center, radius)?;
        let finite = |z: &CDd| z.re.is_finite() && z.im.is_finite();
        if !values.iter().chain(&normal_derivatives).all(finite) {
            return Err(Error::Domain("trace contains non-finite values".into()));
        }
        let normals = circle_normals(n);
        let c = lift::<Dd>(center);
        let positions = normals.iter().map(|e| [c[0] + e[0] * radius, c[1] + e[1] * radius]).collect();
        Ok(TraceData { center, radius, k, incident, provenance, normals, positions, values, normal_derivatives })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn center(&self) -> Point2 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn incident(&self) -> &IncidentField {
        &self.incident
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn angle(&self, j: usize) -> f64 {
        std::f64::consts::TAU * j as f64 / self.n() as f64
    }

    pub fn position(&self, j: usize) -> Point2 {
        Point2::new(self.positions[j][0].to_f64(), self.positions[j][1].to_f64())
    }

    pub fn positions(&self) -> &[Vec2<Dd>] {
        &self.positions
    }

    /// Outward (radial) unit normals.
    pub fn normals(&self) -> &[Vec2<Dd>] {
        &self.normals
    }

    pub fn values(&self) -> &[CDd] {
        &self.values
    }

    pub fn normal_derivatives(&self) -> &[CDd] {
        &self.normal_derivatives
    }

    /// CSV rows: angle, Re u, Im u, Re ∂u, Im ∂u.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "angle,re_u,im_u,re_du,im_du")?;
        for j in 0..self.n() {
            let (u, du) = (self.values[j], self.normal_derivatives[j]);
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                self.angle(j),
                u.re.to_f64(),
                u.im.to_f64(),
                du.re.to_f64(),
                du.im.to_f64()
            )?;
        }
        Ok(())
    }
}

/// Total field and its radial derivative at N equispaced points of the circle,
/// evaluated from the layer representation in double-double.
pub fn trace_direct(sol: &ScatterSolution, center: Point2, radius: f64, n: usize) -> Result<TraceData> {
    check_node_count(n)?;
    check_source(sol.incident(), center, radius)?;
    for (i, o) in sol.mesh().obstacles().iter().enumerate() {
        if o.vertices().iter().any(|v| v.dist(center) >= radius) {
            return Err(Error::NearField(format!("obstacle {i} is not strictly inside the measurement circle")));
        }
    }
    let normals = circle_normals(n);
    let c = lift::<Dd>(center);
    let mut values = Vec::with_capacity(n);
    let mut derivs = Vec::with_capacity(n);
    for e in &normals {
        let x = [c[0] + e[0] * radius, c[1] + e[1] * radius];
        sol.mesh().check_target(Point2::new(x[0].to_f64(), x[1].to_f64()))?;
        let (u, g) = sol.total_with_gradient_in::<Dd>(x)?;
        values.push(u);
        derivs.push(g[0] * e[0] + g[1] * e[1]);
    }
    TraceData::from_values(center, radius, sol.k(), *sol.incident(), Provenance::Direct, values, derivs)
}

/// k H_n'(kR) / H_n(kR) for n = 0..=nmax, from the upward ratio recurrence
/// g_{n+1} = 1 / (2n/x − g_n), g_n = H_{n−1}/H_n, which never forms H_n itself.
pub fn dtn_multipliers(nmax: usize, k: f64, radius: f64) -> Vec<CDd> {
    let x = Dd::from_f64(k) * radius;
    let b = jy01(x);
    let h0 = CDd::new(b.j0, b.y0);
    let h1 = CDd::new(b.j1, b.y1);
    let kd = Dd::from_f64(k);
    let mut out = Vec::with_capacity(nmax + 1);
    let mut g = h0 / h1;
    out.push(-(h1 / h0) * kd);
    for n in 1..=nmax {
        let nx = Dd::from_f64(n as f64) / x;
        out.push((g - CDd::new(nx, Dd::ZERO)) * kd);
        g = CDd::new(Dd::ONE, Dd::ZERO) / (CDd::new(nx * 2.0, Dd::ZERO) - g);
    }
    out
}

/// Neumann trace rebuilt from Dirichlet data: the scattered part u − u^inc is
/// expanded in circular harmonics and continued as a radiating solution
/// outside the circle, whose normal derivative is applied mode by mode.
pub fn recover_neumann_values(
    values: &[CDd],
    center: Point2,
    radius: f64,
    k: f64,
    incident: &IncidentField,
) -> Result<Vec<CDd>> {
    let n = values.len();
    check_node_count(n)?;
    check_source(incident, center, radius)?;
    let normals = circle_normals(n);
    let c = lift::<Dd>(center);
    let mut scattered = Vec::with_capacity(n);
    let mut incident_dn = Vec::with_capacity(n);
    for (e, u) in normals.iter().zip(values) {
        let x = [c[0] + e[0] * radius, c[1] + e[1] * radius];
        let (ui, gi) = incident.eval_with_gradient_in::<Dd>(k, x)?;
        scattered.push(*u - ui);
        incident_dn.push(gi[0] * e[0] + gi[1] * e[1]);
    }

    // twiddle[m] = e^{2πim/N}; normals already hold (cos, sin) of these angles
    let twiddle: Vec<CDd> = normals.iter().map(|e| CDd::new(e[0], e[1])).collect();
    let half = n / 2;
    let modes: Vec<i64> = (-(half as i64) + 1..=half as i64).collect();
    let inv_n = Dd::ONE / Dd::from_f64(n as f64);
    let coeffs: Vec<CDd> = modes
        .iter()
        .map(|&m| {
            let mut acc = CDd::new(Dd::ZERO, Dd::ZERO);
            for (j, w) in scattered.iter().enumerate() {
                let t = twiddle[(m * j as i64).rem_euclid(n as i64) as usize];
                acc = acc + *w * t.conj();
            }
            acc * inv_n
        })
        .collect();

    let head = coeffs.iter().map(|z| cabs(*z)).fold(0.0, f64::max);
    if head > 0.0 {
        let tail = modes
            .iter()
            .zip(&coeffs)
            .filter(|(m, _)| m.unsigned_abs() as usize >= n / 4)
            .map(|(_, z)| cabs(*z))
            .fold(0.0, f64::max);
        if !(tail < TAIL_TOLERANCE * head) {
            return Err(Error::Resolution(format!(
                "harmonic tail of the scattered trace is {:.2e} of its head with N = {n}; refine the trace",
                tail / head
            )));
        }
    }

    let mult = dtn_multipliers(half, k, radius);
    let scaled: Vec<CDd> = modes.iter().zip(&coeffs).map(|(m, z)| *z * mult[m.unsigned_abs() as usize]).collect();
    Ok((0..n)
        .map(|j| {
            let mut acc = incident_dn[j];
            for (m, z) in modes.iter().zip(&scaled) {
                acc = acc + *z * twiddle[(m * j as i64).rem_euclid(n as i64) as usize];
            }
            acc
        })
        .collect())
}

/// Same Dirichlet data with the Neumann trace replaced by the recovered one.
pub fn recover_neumann(trace: &TraceData) -> Result<TraceData> {
    let derivs = recover_neumann_values(&trace.values, trace.center, trace.radius, trace.k, &trace.incident)?;
    TraceData::from_values(
        trace.center,
        trace.radius,
        trace.k,
        trace.incident,
        Provenance::Recovered,
        trace.values.clone(),
        derivs,
    )
}
