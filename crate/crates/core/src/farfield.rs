//! Far-field patterns, the point-source/plane-wave far-field relation, the
//! far-field operator and Tikhonov-regularized solutions of the far-field
//! equation used by linear sampling.

use crate::error::{Error, Result};
use crate::fields::IncidentField;
use crate::forward::{disc_series_solution, BoundaryOperator, ScatterSolution};
use crate::geometry::{Direction, Point2};
use faer::Mat;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::io::{self, Write};

type C = Complex64;

/// e^{iπ/4}/√(8πk): far-field coefficient of the fundamental solution.
pub fn far_field_constant(k: f64) -> C {
    C::from_polar(1.0 / (8.0 * PI * k).sqrt(), FRAC_PI_4)
}

/// F(φ) = e^{iπ/4}/√(8πk) ∫ e^{−ikφ·z} φ(z) ds(z) for the single-layer density of `sol`.
pub fn far_field_pattern(sol: &ScatterSolution, directions: &[Direction]) -> Vec<C> {
    let k = sol.k();
    let c = far_field_constant(k);
    directions
        .iter()
        .map(|d| {
            let w = d.omega();
            let s: C = sol
                .mesh()
                .nodes()
                .iter()
                .zip(sol.weighted_density())
                .map(|(n, q)| q * C::cis(-k * w.dot(n.pos)))
                .sum();
            c * s
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct FarFieldCheck {
    pub directions: Vec<Direction>,
    /// Far field of Φ_D(·, y) in each direction d.
    pub far_field: Vec<C>,
    /// e^{iπ/4}/√(8πk) · u(y; −d, k).
    pub scaled_total: Vec<C>,
    pub max_relative: f64,
}

/// Compares the far field of the point-source solution Φ_D(·, y) with the
/// total plane-wave field u(y; −d, k) times the fundamental far-field constant.
pub fn point_source_far_field_check(op: &BoundaryOperator, y: Point2, directions: &[Direction]) -> Result<FarFieldCheck> {
    let k = op.k();
    let c = far_field_constant(k);
    let ps = op.solve(&IncidentField::PointSource { y })?;
    let scattered = far_field_pattern(&ps, directions);
    let far_field: Vec<C> = directions
        .iter()
        .zip(&scattered)
        .map(|(d, w)| c * C::cis(-k * d.omega().dot(y)) + w)
        .collect();
    let mut scaled_total = Vec::with_capacity(directions.len());
    for d in directions {
        let sol = op.solve(&IncidentField::PlaneWave { d: d.reversed() })?;
        scaled_total.push(c * sol.eval_total(y)?);
    }
    let scale = far_field.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let max_relative = far_field
        .iter()
        .zip(&scaled_total)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / scale;
    Ok(FarFieldCheck { directions: directions.to_vec(), far_field, scaled_total, max_relative })
}

/// F[i, j] = F_D(φ_i; d_j, k) on uniform observation and incidence grids.
#[derive(Clone, Debug)]
pub struct FarFieldOperator {
    k: f64,
    observation: Vec<Direction>,
    incidence: Vec<Direction>,
    matrix: Mat<C>,
}

impl FarFieldOperator {
    pub fn from_matrix(k: f64, matrix: Mat<C>) -> Result<Self> {
        if matrix.nrows() < 2 || matrix.ncols() < 2 || !(k > 0.0) {
            return Err(Error::Domain("far-field operator needs positive k and at least 2×2 samples".into()));
        }
        Ok(FarFieldOperator {
            k,
            observation: Direction::uniform_grid(matrix.nrows()),
            incidence: Direction::uniform_grid(matrix.ncols()),
            matrix,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn observation(&self) -> &[Direction] {
        &self.observation
    }

    pub fn incidence(&self) -> &[Direction] {
        &self.incidence
    }

    pub fn matrix(&self) -> &Mat<C> {
        &self.matrix
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.matrix.ncols() {
            for z in self.matrix.col_as_slice(j) {
                m = m.max(z.norm());
            }
        }
        m
    }

    /// max |F(φ, d) − F(−d, −φ)| / max|F|, available when both grids have the
    /// same even size (so they are closed under negation).
    pub fn reciprocity_defect(&self) -> Option<f64> {
        let n = self.matrix.nrows();
        if n != self.matrix.ncols() || !n.is_multiple_of(2) {
            return None;
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            return Some(0.0);
        }
        let half = n / 2;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let a = self.matrix[(i, j)];
                let b = self.matrix[((j + half) % n, (i + half) % n)];
                worst = worst.max((a - b).norm());
            }
        }
        Some(worst / scale)
    }

    /// CSV rows: obs_angle, inc_angle, re, im.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "obs_angle,inc_angle,re,im")?;
        for (i, o) in self.observation.iter().enumerate() {
            for (j, d) in self.incidence.iter().enumerate() {
                let z = self.matrix[(i, j)];
                writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e}", o.angle(), d.angle(), z.re, z.im)?;
            }
        }
        Ok(())
    }
}

/// One plane-wave solve per incidence direction, all with the same factorization.
pub fn assemble_far_field_operator(op: &BoundaryOperator, n_obs: usize, n_inc: usize) -> Result<FarFieldOperator> {
    let obs = Direction::uniform_grid(n_obs);
    let inc = Direction::uniform_grid(n_inc);
    let mut matrix = Mat::<C>::zeros(n_obs, n_inc);
    for (j, d) in inc.iter().enumerate() {
        let sol = op
            .solve(&IncidentField::PlaneWave { d: *d })
            .map_err(|e| e.context(&format!("incidence column {j}")))?;
        for (i, f) in far_field_pattern(&sol, &obs).into_iter().enumerate() {
            matrix[(i, j)] = f;
        }
    }
    FarFieldOperator::from_matrix(op.k(), matrix)
}

/// Far-field operator of a sound-hard disc built from its series solution.
pub fn disc_far_field_operator(center: Point2, radius: f64, k: f64, n_obs: usize, n_inc: usize) -> Result<FarFieldOperator> {
    let obs = Direction::uniform_grid(n_obs);
    let mut matrix = Mat::<C>::zeros(n_obs, n_inc);
    for (j, d) in Direction::uniform_grid(n_inc).iter().enumerate() {
        let series = disc_series_solution(center, radius, k, IncidentField::PlaneWave { d: *d })?;
        for (i, o) in obs.iter().enumerate() {
            matrix[(i, j)] = series.far_field(o);
        }
    }
    FarFieldOperator::from_matrix(k, matrix)
}

#[derive(Clone, Debug)]
pub struct FarFieldSolution {
    /// Density g_α sampled on the incidence grid.
    pub density: Vec<C>,
    /// Discrete L²(S¹) norm with the 2π/N weight.
    pub norm: f64,
    /// ‖F g_α − rhs‖ / ‖rhs‖ in the same weighted norm.
    pub residual: f64,
}

/// SVD of the far-field operator in weighted coordinates, reusable for every
/// sampling point and regularization parameter.
///
/// With A g = (2π/N_inc) Σ_j F[·, j] g_j, the map g ↦ A g between the
/// weighted spaces becomes B = √(w_obs w_inc) F in Euclidean coordinates.
pub struct Tikhonov {
    k: f64,
    observation: Vec<Direction>,
    w_obs: f64,
    w_inc: f64,
    b: Mat<C>,
    u: Mat<C>,
    s: Vec<f64>,
    v: Mat<C>,
}

impl Tikhonov {
    pub fn new(f: &FarFieldOperator) -> Result<Self> {
        let (m, n) = (f.matrix.nrows(), f.matrix.ncols());
        let (w_obs, w_inc) = (TAU / m as f64, TAU / n as f64);
        let scale = (w_obs * w_inc).sqrt();
        let b = Mat::<C>::from_fn(m, n, |i, j| f.matrix[(i, j)] * scale);
        let svd = b.thin_svd().map_err(|e| Error::Solver(format!("SVD of the far-field operator failed: {e:?}")))?;
        let s = svd.S().column_vector().iter().map(|z| z.re).collect::<Vec<f64>>();
        Ok(Tikhonov {
            k: f.k,
            observation: f.observation.clone(),
            w_obs,
            w_inc,
            u: svd.U().to_owned(),
            v: svd.V().to_owned(),
            s,
            b,
        })
    }

    /// Singular values of the weighted operator, descending.
    pub fn singular_values(&self) -> &[f64] {
        &self.s
    }

    /// Right-hand side e^{iπ/4}/√(8πk) e^{−ikφ·y} on the observation grid.
    pub fn rhs(&self, y: Point2) -> Vec<C> {
        let c = far_field_constant(self.k);
        self.observation.iter().map(|o| c * C::cis(-self.k * o.omega().dot(y))).collect()
    }

    pub fn solve(&self, y: Point2, alpha: f64) -> Result<FarFieldSolution> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("regularization parameter must be positive, got {alpha}")));
        }
        let sw = self.w_obs.sqrt();
        let r: Vec<C> = self.rhs(y).into_iter().map(|z| z * sw).collect();
        let (m, n) = (self.b.nrows(), self.b.ncols());
        let mut gt = vec![C::new(0.0, 0.0); n];
        for (l, &sigma) in self.s.iter().enumerate() {
            let beta: C = (0..m).map(|i| self.u[(i, l)].conj() * r[i]).sum();
            let f = beta * (sigma / (sigma * sigma + alpha));
            for (j, g) in gt.iter_mut().enumerate() {
                *g += self.v[(j, l)] * f;
            }
        }
        let norm = gt.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let rnorm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let res = (0..m)
            .map(|i| {
                let bg: C = (0..n).map(|j| self.b[(i, j)] * gt[j]).sum();
                (bg - r[i]).norm_sqr()
            })
            .sum::<f64>()
            .sqrt();
        let density = gt.iter().map(|z| z / self.w_inc.sqrt()).collect();
        Ok(FarFieldSolution { density, norm, residual: res / rnorm })
    }
}

pub fn solve_far_field_equation(f: &FarFieldOperator, y: Point2, alpha: f64) -> Result<FarFieldSolution> {
    Tikhonov::new(f)?.solve(y, alpha)
}

/// α = 10^{−e} for e from `first` to `last` decades, one value per decade.
pub fn alpha_decades(first: i32, last: i32) -> Vec<f64> {
    (first..=last).map(|e| 10f64.powi(-e)).collect()
}

#[derive(Clone, Debug)]
pub struct GrowthReport {
    pub y: Point2,
    pub alphas: Vec<f64>,
    pub norms: Vec<f64>,
    pub residuals: Vec<f64>,
    /// −d log‖g_α‖ / d log α by least squares over the whole sweep.
    pub growth_slope: f64,
    /// ‖g_α‖ increases by more than a factor 2 per decade across the last three decades.
    pub no_plateau: bool,
}

impl GrowthReport {
    pub fn to_json(&self) -> String {
        let nums = |v: &[f64]| v.iter().map(|x| format!("{x:.17e}")).collect::<Vec<_>>().join(", ");
        format!(
            "{{\"y\": [{:.17e}, {:.17e}], \"alphas\": [{}], \"norms\": [{}], \"residuals\": [{}], \"growth_slope\": {:.17e}, \"no_plateau\": {}}}",
            self.y.x,
            self.y.y,
            nums(&self.alphas),
            nums(&self.norms),
            nums(&self.residuals),
            self.growth_slope,
            self.no_plateau
        )
    }
}

fn check_sweep(alphas: &[f64]) -> Result<()> {
    if alphas.len() < 5 || alphas.iter().any(|a| !(*a > 0.0)) || alphas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Domain("alpha sweep needs at least 5 positive, strictly decreasing values".into()));
    }
    if (alphas[0] / alphas[alphas.len() - 1]).log10() < 4.0 - 1e-9 {
        return Err(Error::Domain("alpha sweep must span at least four decades".into()));
    }
    Ok(())
}

pub fn unsolvability_diagnostic(t: &Tikhonov, y: Point2, alphas: &[f64]) -> Result<GrowthReport> {
    check_sweep(alphas)?;
    let mut norms = Vec::with_capacity(alphas.len());
    let mut residuals = Vec::with_capacity(alphas.len());
    for &a in alphas {
        let s = t.solve(y, a)?;
        norms.push(s.norm);
        residuals.push(s.residual);
    }
    let xs: Vec<f64> = alphas.iter().map(|a| a.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let smallest = alphas[alphas.len() - 1];
    let tail: Vec<usize> = (0..alphas.len()).filter(|&i| alphas[i] <= smallest * 1e3 * (1.0 + 1e-9)).collect();
    let no_plateau = tail.len() >= 2
        && tail.windows(2).all(|w| {
            let (i, j) = (w[0], w[1]);
            let decades = (alphas[i] / alphas[j]).log10();
            norms[j] > norms[i] && (norms[j] / norms[i]).powf(1.0 / decades) > 2.0
        });
    Ok(GrowthReport { y, alphas: alphas.to_vec(), norms, residuals, growth_slope: -num / den, no_plateau })
}

/// 1e-6 · ‖F‖², with ‖F‖ the largest singular value in weighted coordinates.
pub fn default_lsm_alpha(t: &Tikhonov) -> f64 {
    1e-6 * t.singular_values().first().copied().unwrap_or(0.0).powi(2)
}

/// 1/‖g_α(y)‖ at each sampling point. A zero operator (no scatterer) has no
/// range to sample and gives an identically zero map.
pub fn lsm_indicator_map(t: &Tikhonov, points: &[Point2], alpha: f64) -> Result<Vec<f64>> {
    if t.singular_values().first().is_none_or(|s| *s == 0.0) {
        return Ok(vec![0.0; points.len()]);
    }
    points.iter().map(|&p| t.solve(p, alpha).map(|s| 1.0 / s.norm)).collect()
}

/// CSV rows: x, y, value.
pub fn write_map_csv<W: Write>(mut w: W, points: &[Point2], values: &[f64]) -> io::Result<()> {
    writeln!(w, "x,y,value")?;
    for (p, v) in points.iter().zip(values) {
        writeln!(w, "{:.17e},{:.17e},{:.17e}", p.x, p.y, v)?;
    }
    Ok(())
}
