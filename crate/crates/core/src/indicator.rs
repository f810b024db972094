//! The enclosure indicator: pairs measured Cauchy data on ∂B_R with the
//! growing probe, reads the support function off the exponential rate in τ
//! and assembles a convex hull from the per-direction estimates.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::fields::{IncidentField, ProbeParams};
use crate::forward::{BoundaryOperator, ScatterSolution};
use crate::geometry::{
    convex_hull_from_supports, default_regularity_tol, is_regular, Direction, Point2, Polygon, Regularity, SupportHull,
};
use crate::trace::{cabs, TraceData, CDd};
use faer::Mat;
use num_complex::Complex64;
use std::io::{self, Write};

pub const DEFAULT_TAU_MIN: f64 = 8.0;
pub const DEFAULT_TAU_MAX: f64 = 40.0;
pub const DEFAULT_TAU_COUNT: usize = 16;
/// Samples with |Ĵ| below this are treated as underflowed.
pub const UNDERFLOW_LIMIT: f64 = 1e-290;
/// Samples with |Ĵ| below this fraction of the integrand scale are at the
/// rounding floor of the double-double quadrature.
pub const NOISE_FLOOR: f64 = 1e-27;
/// Fit residual (in nepers) above which an estimate is not used; near-tie
/// directions, where a second vertex still beats against the first, land above it.
pub const DEFAULT_RMS_THRESHOLD: f64 = 0.35;
pub const DEFAULT_SLOPE_TOL: f64 = 0.01;
pub const MIN_SAMPLES: usize = 8;

/// Geometrically spaced τ values.
pub fn tau_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max > min && max.is_finite()) || count < 2 {
        return Err(Error::Domain(format!("invalid tau grid: [{min}, {max}] with {count} points")));
    }
    let ratio = (max / min).ln() / (count - 1) as f64;
    Ok((0..count).map(|i| if i + 1 == count { max } else { min * (ratio * i as f64).exp() }).collect())
}

/// Trapezoid nodes needed on a circle of the given radius: four per probe
/// oscillation plus a margin.
pub fn required_trace_nodes(tau: f64, k: f64, radius: f64) -> usize {
    4 * (tau.hypot(k) * radius).ceil() as usize + 32
}

/// Smallest power of two that resolves every τ up to `tau_max`, and at least 256.
pub fn auto_trace_nodes(tau_max: f64, k: f64, radius: f64) -> usize {
    required_trace_nodes(tau_max, k, radius).max(256).next_power_of_two()
}

/// c·ω + R: the largest value of x·ω on the measurement circle, so every
/// scaled probe value on it is at most one.
pub fn default_t_ref(center: Point2, radius: f64, omega: &Direction) -> f64 {
    center.dot(omega.omega()) + radius
}

/// Indicator sample. `value` is J e^{−τ t_0} with t_0 = c·ω + R, the scaling
/// under which the integral is evaluated; `log_magnitude` and `phase` refer
/// to Ĵ = J e^{−τ t_ref} for the requested t_ref, so they depend on t_ref
/// only through the exact shift −τ(t_ref − t_0).
#[derive(Clone, Copy, Debug)]
pub struct IndicatorValue {
    pub value: CDd,
    pub evaluation_t_ref: f64,
    pub log_magnitude: f64,
    pub phase: f64,
    /// Integral of the absolute integrand under the same scaling as `value`.
    pub scale: f64,
}

impl IndicatorValue {
    /// |value| relative to the integrand scale; small ratios sit at the rounding floor.
    pub fn relative_magnitude(&self) -> f64 {
        cabs(self.value) / self.scale
    }
}

/// ∫_{∂B_R} (∂_ν u v − ∂_ν v u) ds by the trapezoid rule in double-double,
/// with the probe scaled so it never exceeds one on the circle.
pub fn compute_indicator(trace: &TraceData, omega: &Direction, tau: f64, t_ref: f64) -> Result<IndicatorValue> {
    if !t_ref.is_finite() {
        return Err(Error::Domain("t_ref must be finite".into()));
    }
    let t0 = default_t_ref(trace.center(), trace.radius(), omega);
    let probe = ProbeParams::new(*omega, tau, trace.k(), t0)?;
    let need = required_trace_nodes(tau, trace.k(), trace.radius());
    if trace.n() < need {
        return Err(Error::Resolution(format!(
            "tau = {tau} needs at least {need} trace nodes on radius {}, have {}",
            trace.radius(),
            trace.n()
        )));
    }
    let mut acc = CDd::new(Dd::ZERO, Dd::ZERO);
    let mut scale = 0.0;
    for j in 0..trace.n() {
        let (v, g) = probe.eval_with_gradient_in::<Dd>(trace.positions()[j]);
        let e = trace.normals()[j];
        let dv = g[0] * e[0] + g[1] * e[1];
        let term = trace.normal_derivatives()[j] * v - dv * trace.values()[j];
        scale += cabs(term);
        acc = acc + term;
    }
    let weight = Dd::TWO_PI * trace.radius() / Dd::from_f64(trace.n() as f64);
    let value = acc * weight;
    let (re, im) = (value.re.to_f64(), value.im.to_f64());
    Ok(IndicatorValue {
        value,
        evaluation_t_ref: t0,
        log_magnitude: re.hypot(im).ln() - tau * (t_ref - t0),
        phase: im.atan2(re),
        scale: scale * weight.to_f64(),
    })
}

/// −Σ_j c_j v(z_j) over the weighted layer density: by Green's identity this
/// is the indicator of any trace taken on a circle enclosing the obstacles,
/// provided the incident field is regular inside that circle.
pub fn indicator_from_density(sol: &ScatterSolution, omega: &Direction, tau: f64, t_ref: f64) -> Result<CDd> {
    let probe = ProbeParams::new(*omega, tau, sol.k(), t_ref)?;
    let mut acc = CDd::new(Dd::ZERO, Dd::ZERO);
    for (node, c) in sol.mesh().nodes().iter().zip(sol.weighted_density()) {
        let (v, _) = probe.eval_with_gradient_in::<Dd>([Dd::from_f64(node.pos.x), Dd::from_f64(node.pos.y)]);
        acc = acc - v * CDd::new(Dd::from_f64(c.re), Dd::from_f64(c.im));
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleFlag {
    Ok,
    Underflow,
    Noise,
}

#[derive(Clone, Debug)]
pub struct IndicatorSamples {
    pub omega: Direction,
    pub t_ref: f64,
    pub k: f64,
    pub incident: Option<IncidentField>,
    pub taus: Vec<f64>,
    /// log|Ĵ(τ)|
    pub log_magnitude: Vec<f64>,
    pub phase: Vec<f64>,
    pub flags: Vec<SampleFlag>,
}

fn check_tau_grid(taus: &[f64]) -> Result<()> {
    if taus.len() < MIN_SAMPLES {
        return Err(Error::Domain(format!("need at least {MIN_SAMPLES} tau values, got {}", taus.len())));
    }
    if !(taus[0] > 0.0) || taus.windows(2).any(|w| !(w[1] > w[0])) || !taus[taus.len() - 1].is_finite() {
        return Err(Error::Domain("tau grid must be positive and strictly increasing".into()));
    }
    Ok(())
}

impl IndicatorSamples {
    /// Wraps given log-magnitudes; every finite sample is marked usable.
    pub fn from_log_magnitudes(omega: Direction, t_ref: f64, k: f64, taus: Vec<f64>, log_magnitude: Vec<f64>) -> Result<Self> {
        check_tau_grid(&taus)?;
        if log_magnitude.len() != taus.len() {
            return Err(Error::Domain("one log-magnitude per tau is required".into()));
        }
        let flags = log_magnitude.iter().map(|l| if l.is_finite() { SampleFlag::Ok } else { SampleFlag::Underflow }).collect();
        let phase = vec![0.0; taus.len()];
        Ok(IndicatorSamples { omega, t_ref, k, incident: None, taus, log_magnitude, phase, flags })
    }

    pub fn usable(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.taus
            .iter()
            .zip(&self.log_magnitude)
            .zip(&self.flags)
            .filter(|(_, f)| **f == SampleFlag::Ok)
            .map(|((t, l), _)| (*t, *l))
    }

    /// CSV rows: tau, log|Ĵ|, phase, flag.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "tau,log_abs_j,phase,flag")?;
        for i in 0..self.taus.len() {
            let flag = match self.flags[i] {
                SampleFlag::Ok => "ok",
                SampleFlag::Underflow => "underflow",
                SampleFlag::Noise => "noise",
            };
            writeln!(w, "{:.17e},{:.17e},{:.17e},{flag}", self.taus[i], self.log_magnitude[i], self.phase[i])?;
        }
        Ok(())
    }
}

pub fn sample_indicator(trace: &TraceData, omega: &Direction, taus: &[f64], t_ref: f64) -> Result<IndicatorSamples> {
    check_tau_grid(taus)?;
    let mut log_magnitude = Vec::with_capacity(taus.len());
    let mut phase = Vec::with_capacity(taus.len());
    let mut flags = Vec::with_capacity(taus.len());
    for &tau in taus {
        let v = compute_indicator(trace, omega, tau, t_ref)?;
        flags.push(if !(cabs(v.value) >= UNDERFLOW_LIMIT) {
            SampleFlag::Underflow
        } else if v.relative_magnitude() < NOISE_FLOOR {
            SampleFlag::Noise
        } else {
            SampleFlag::Ok
        });
        log_magnitude.push(v.log_magnitude);
        phase.push(v.phase);
    }
    Ok(IndicatorSamples {
        omega: *omega,
        t_ref,
        k: trace.k(),
        incident: Some(*trace.incident()),
        taus: taus.to_vec(),
        log_magnitude,
        phase,
        flags,
    })
}

/// Fit of log|Ĵ(τ)| ≈ aτ + b log s(τ) + c with s = √(τ²+k²) + τ.
#[derive(Clone, Copy, Debug)]
pub struct SupportEstimate {
    pub omega: Direction,
    /// a + t_ref
    pub h_hat: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub t_ref: f64,
    pub rms: f64,
    pub samples_used: usize,
    pub regularity: Option<Regularity>,
    pub usable: bool,
}

impl SupportEstimate {
    /// Folds in the geometric regularity of ω; an irregular direction is never usable.
    pub fn with_regularity(mut self, reg: Regularity) -> Self {
        self.usable &= reg.regular;
        self.regularity = Some(reg);
        self
    }
}

pub fn estimate_support(samples: &IndicatorSamples, rms_threshold: f64) -> Result<SupportEstimate> {
    let pts: Vec<(f64, f64)> = samples.usable().collect();
    if pts.len() < MIN_SAMPLES {
        return Err(Error::Fit(format!(
            "only {} of {} samples are usable (underflow or noise floor); need {MIN_SAMPLES}",
            pts.len(),
            samples.taus.len()
        )));
    }
    let (tmin, tmax) = (pts[0].0, pts[pts.len() - 1].0);
    if tmax < 3.0 * tmin {
        return Err(Error::Fit(format!("usable tau range [{tmin}, {tmax}] is narrower than a factor of 3")));
    }
    let k = samples.k;
    // columns scaled to comparable size; τ/τmax and log s / log s_max
    let lmax = (tmax.hypot(k) + tmax).ln();
    let design = Mat::<f64>::from_fn(pts.len(), 3, |i, j| {
        let t = pts[i].0;
        match j {
            0 => t / tmax,
            1 => (t.hypot(k) + t).ln() / lmax,
            _ => 1.0,
        }
    });
    let svd = design.thin_svd().map_err(|e| Error::Fit(format!("least-squares SVD failed: {e:?}")))?;
    let s = svd.S().column_vector();
    let (smax, smin) = (s[0], s[2]);
    if !(smin > 1e-10 * smax) {
        return Err(Error::Fit(format!("fit design is rank deficient (singular values {smax:.3e}, {smin:.3e})")));
    }
    let (u, v) = (svd.U(), svd.V());
    let mut x = [0.0; 3];
    for m in 0..3 {
        let proj: f64 = (0..pts.len()).map(|i| u[(i, m)] * pts[i].1).sum::<f64>() / s[m];
        for (r, xr) in x.iter_mut().enumerate() {
            *xr += v[(r, m)] * proj;
        }
    }
    let (a, b, c) = (x[0] / tmax, x[1] / lmax, x[2]);
    let rms = (pts
        .iter()
        .map(|(t, l)| {
            let r = a * t + b * (t.hypot(k) + t).ln() + c - l;
            r * r
        })
        .sum::<f64>()
        / pts.len() as f64)
        .sqrt();
    Ok(SupportEstimate {
        omega: samples.omega,
        h_hat: a + samples.t_ref,
        a,
        b,
        c,
        t_ref: samples.t_ref,
        rms,
        samples_used: pts.len(),
        regularity: None,
        usable: rms < rms_threshold,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Threshold {
    Decays,
    BlowsUp,
    Inconclusive,
}

/// Sign of the growth rate of log|J e^{−τt}| over the upper half of the τ
/// grid. Too few usable samples give `Inconclusive`.
pub fn classify_threshold(samples: &IndicatorSamples, t: f64, tol_slope: f64) -> Threshold {
    let pts: Vec<(f64, f64)> = samples.usable().collect();
    if pts.len() < MIN_SAMPLES {
        return Threshold::Inconclusive;
    }
    let upper = &pts[pts.len() / 2..];
    let g: Vec<(f64, f64)> = upper.iter().map(|(tau, l)| (*tau, l + tau * (samples.t_ref - t))).collect();
    let m = g.len() as f64;
    let (mt, mg) = (g.iter().map(|p| p.0).sum::<f64>() / m, g.iter().map(|p| p.1).sum::<f64>() / m);
    let num: f64 = g.iter().map(|(x, y)| (x - mt) * (y - mg)).sum();
    let den: f64 = g.iter().map(|(x, _)| (x - mt) * (x - mt)).sum();
    let slope = num / den;
    if slope < -tol_slope {
        Threshold::Decays
    } else if slope > tol_slope {
        Threshold::BlowsUp
    } else {
        Threshold::Inconclusive
    }
}

/// Source of Cauchy data for a given probe direction.
pub trait TraceProvider {
    fn trace_for(&self, omega: &Direction) -> Result<&TraceData>;
}

impl TraceProvider for TraceData {
    fn trace_for(&self, _omega: &Direction) -> Result<&TraceData> {
        Ok(self)
    }
}

#[derive(Clone, Debug)]
pub struct DirectionResult {
    pub omega: Direction,
    pub samples: Option<IndicatorSamples>,
    pub estimate: Option<SupportEstimate>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct HullReconstruction {
    pub polygon: Polygon,
    pub directions: Vec<DirectionResult>,
    /// Directions dropped before any computation because a tie makes them irregular.
    pub filtered: Vec<(Direction, Regularity)>,
}

impl HullReconstruction {
    pub fn usable(&self) -> impl Iterator<Item = &SupportEstimate> {
        self.directions.iter().filter_map(|d| d.estimate.as_ref()).filter(|e| e.usable)
    }

    /// CSV rows: angle, h_hat, rms, usable, per retained direction.
    pub fn write_supports_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "angle,h_hat,a,b,c,rms,usable")?;
        for d in &self.directions {
            match &d.estimate {
                Some(e) => writeln!(
                    w,
                    "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}",
                    d.omega.angle(),
                    e.h_hat,
                    e.a,
                    e.b,
                    e.c,
                    e.rms,
                    e.usable
                )?,
                None => writeln!(w, "{:.17e},nan,nan,nan,nan,nan,false", d.omega.angle())?,
            }
        }
        Ok(())
    }
}

/// Per-direction support estimates over the regular members of `directions`,
/// intersected into a convex polygon.
pub fn reconstruct_hull<P: TraceProvider + ?Sized>(
    provider: &P,
    obstacles: &[Polygon],
    directions: &[Direction],
    taus: &[f64],
    rms_threshold: f64,
) -> Result<HullReconstruction> {
    let tol = default_regularity_tol(obstacles);
    let mut filtered = Vec::new();
    let mut results = Vec::new();
    let mut clip = None;
    for omega in directions {
        let reg = is_regular(obstacles, omega, tol)?;
        if !reg.regular {
            filtered.push((*omega, reg));
            continue;
        }
        let trace = provider.trace_for(omega)?;
        clip.get_or_insert((trace.center(), trace.radius()));
        let t_ref = default_t_ref(trace.center(), trace.radius(), omega);
        let samples = sample_indicator(trace, omega, taus, t_ref)?;
        match estimate_support(&samples, rms_threshold) {
            Ok(e) => results.push(DirectionResult {
                omega: *omega,
                samples: Some(samples),
                estimate: Some(e.with_regularity(reg)),
                error: None,
            }),
            Err(e) => results.push(DirectionResult {
                omega: *omega,
                samples: Some(samples),
                estimate: None,
                error: Some(e.to_string()),
            }),
        }
    }
    let supports: Vec<(Direction, f64)> = results
        .iter()
        .filter_map(|r| r.estimate.as_ref())
        .filter(|e| e.usable)
        .map(|e| (e.omega, e.h_hat))
        .collect();
    if supports.len() < 3 {
        return Err(Error::Reconstruction(format!(
            "only {} usable directions out of {} ({} filtered as irregular)",
            supports.len(),
            directions.len(),
            filtered.len()
        )));
    }
    let (center, radius) = clip.expect("at least one direction was processed");
    match convex_hull_from_supports(&supports, center, radius) {
        Ok(SupportHull { polygon: Some(polygon), .. }) => Ok(HullReconstruction { polygon, directions: results, filtered }),
        Ok(SupportHull { diagnostic, .. }) => Err(Error::Reconstruction(diagnostic.unwrap_or_default())),
        Err(e) => Err(Error::Reconstruction(e.to_string())),
    }
}

/// Total field at `y` for the incident (x_0 − x)·ϑ e^{−ik x·d} with x_0 a
/// vertex of the scene: a nonzero value confirms the hypothesis under which
/// the indicator also works for this modulated incidence.
pub fn modulated_nonvanishing_check(op: &BoundaryOperator, x0: Point2, d: Direction, y: Point2) -> Result<Complex64> {
    let is_vertex = op.mesh().obstacles().iter().any(|o| o.vertices().iter().any(|v| v.dist(x0) <= 1e-12 * (1.0 + v.norm())));
    if !op.mesh().obstacles().is_empty() && !is_vertex {
        return Err(Error::Domain(format!("({}, {}) is not a vertex of the scene", x0.x, x0.y)));
    }
    let sol = op.solve(&IncidentField::ModulatedPlane { x0, d })?;
    sol.eval_total(y)
}
