use super::mesh::BoundaryMesh;
use crate::error::{Error, Result};
use crate::fields::{fundamental_with_gradient, lift, IncidentField, Vec2};
use crate::geometry::{Point2, Scene};
use crate::real::Real;
use crate::specialfun::hankel01;
use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::prelude::*;
use faer::Mat;
use num_complex::{Complex, Complex64};
use std::sync::Arc;

/// Condition estimates above this are treated as a spurious resonance.
pub const MAX_CONDITION: f64 = 1e10;
/// Relative boundary residual every solve must reach.
pub const MAX_RESIDUAL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveDiagnostics {
    /// 1-norm condition estimate of the collocation matrix.
    pub condition_estimate: f64,
    /// max_i |((−½I + K')φ + ∂_ν u^inc)_i| / max_i |∂_ν u^inc_i|.
    pub residual: f64,
    pub rhs_max: f64,
}

/// Assembled and factored collocation matrix of −½I + K', reusable for any
/// number of incident fields at a fixed wavenumber.
pub struct BoundaryOperator {
    mesh: Arc<BoundaryMesh>,
    k: f64,
    matrix: Mat<c64>,
    lu: Option<PartialPivLu<c64>>,
    condition: f64,
}

impl std::fmt::Debug for BoundaryOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundaryOperator")
            .field("nodes", &self.mesh.len())
            .field("k", &self.k)
            .field("condition", &self.condition)
            .finish()
    }
}

fn one_norm(m: &Mat<c64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.col_as_slice(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Hager's estimate of ‖A⁻¹‖₁ from a handful of solves with A and Aᴴ.
fn inverse_one_norm_estimate(lu: &PartialPivLu<c64>, n: usize) -> f64 {
    let mut x = Mat::<c64>::from_fn(n, 1, |_, _| c64::new(1.0 / n as f64, 0.0));
    let mut est = 0.0;
    let mut last_j = usize::MAX;
    for _ in 0..5 {
        let mut y = x.clone();
        lu.solve_in_place(y.as_mut());
        est = y.col_as_slice(0).iter().map(|z| z.norm()).sum::<f64>();
        let mut xi = Mat::<c64>::from_fn(n, 1, |i, _| {
            let z = y[(i, 0)];
            let a = z.norm();
            if a > 0.0 { z / a } else { c64::new(1.0, 0.0) }
        });
        lu.solve_adjoint_in_place(xi.as_mut());
        let z = xi.col_as_slice(0);
        let (j, zmax) = z
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .fold((0, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        let ztx: c64 = z.iter().zip(x.col_as_slice(0)).map(|(a, b)| a.conj() * b).sum();
        if zmax <= ztx.re || j == last_j {
            break;
        }
        last_j = j;
        x = Mat::<c64>::zeros(n, 1);
        x[(j, 0)] = c64::new(1.0, 0.0);
    }
    est
}

impl BoundaryOperator {
    pub fn new(mesh: Arc<BoundaryMesh>, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Domain(format!("wavenumber must be positive, got {k}")));
        }
        let n = mesh.len();
        let nodes = mesh.nodes();
        // K'(x, z) = ∂_ν(x) Φ_0(x, z) = −(ik/4) H_1(k r) (x − z)·ν(x) / r, zero on a shared edge.
        let factor = c64::new(0.0, -0.25 * k);
        let matrix = Mat::<c64>::from_fn(n, n, |i, j| {
            let (xi, zj) = (&nodes[i], &nodes[j]);
            let mut a = if i == j { c64::new(-0.5, 0.0) } else { c64::new(0.0, 0.0) };
            if xi.edge != zj.edge {
                let d = xi.pos - zj.pos;
                let r = d.norm();
                let (_, h1) = hankel01(k * r);
                a += factor * h1 * (d.dot(xi.normal) / r * zj.weight);
            }
            a
        });
        if n == 0 {
            return Ok(BoundaryOperator { mesh, k, matrix, lu: None, condition: 1.0 });
        }
        let lu = matrix.partial_piv_lu();
        let condition = one_norm(&matrix) * inverse_one_norm_estimate(&lu, n);
        if !(condition <= MAX_CONDITION) {
            return Err(Error::Resonance { condition, k });
        }
        Ok(BoundaryOperator { mesh, k, matrix, lu: Some(lu), condition })
    }

    pub fn mesh(&self) -> &Arc<BoundaryMesh> {
        &self.mesh
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn solve(&self, incident: &IncidentField) -> Result<ScatterSolution> {
        if let Some(y) = incident.singular_point() {
            let tol = 1e-12 * crate::geometry::diameter(self.mesh.obstacles()).max(1.0);
            if self.mesh.obstacles().iter().any(|o| o.contains(y) || o.boundary_distance(y) <= tol) {
                return Err(Error::Domain(format!(
                    "point source ({}, {}) lies in the closure of an obstacle",
                    y.x, y.y
                )));
            }
        }
        let mut data = Vec::with_capacity(self.mesh.len());
        for node in self.mesh.nodes() {
            let g = incident.eval_gradient(self.k, node.pos)?;
            data.push(-(g[0] * node.normal.x + g[1] * node.normal.y));
        }
        let (density, diagnostics) = self.solve_neumann_data(&data)?;
        let weighted = density.iter().zip(self.mesh.nodes()).map(|(p, nd)| p * nd.weight).collect();
        Ok(ScatterSolution { mesh: self.mesh.clone(), k: self.k, incident: *incident, density, weighted, diagnostics })
    }

    /// Solves (−½I + K')φ = g for nodal data g.
    pub fn solve_neumann_data(&self, data: &[c64]) -> Result<(Vec<c64>, SolveDiagnostics)> {
        let n = self.mesh.len();
        if data.len() != n {
            return Err(Error::Domain(format!("expected {n} boundary values, got {}", data.len())));
        }
        let rhs = Mat::<c64>::from_fn(n, 1, |i, _| data[i]);
        let rhs_max = data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !rhs_max.is_finite() {
            return Err(Error::Solver("boundary data is not finite".into()));
        }
        let zero = SolveDiagnostics { condition_estimate: self.condition, residual: 0.0, rhs_max };
        if rhs_max == 0.0 {
            return Ok((vec![c64::new(0.0, 0.0); n], zero));
        }
        let mut density = rhs.clone();
        if let Some(lu) = &self.lu {
            lu.solve_in_place(density.as_mut());
        }
        let r = &self.matrix * &density - &rhs;
        let residual = r.col_as_slice(0).iter().map(|z| z.norm()).fold(0.0, f64::max) / rhs_max;
        if !(residual < MAX_RESIDUAL) {
            return Err(Error::Solver(format!("boundary residual {residual:.3e} exceeds {MAX_RESIDUAL:e}")));
        }
        Ok((density.col_as_slice(0).to_vec(), SolveDiagnostics { residual, ..zero }))
    }
}

/// Single-layer density solving (−½I + K')φ = −∂_ν u^inc, with potential
/// evaluation of w = Sφ and of the total field u^inc + w.
#[derive(Clone, Debug)]
pub struct ScatterSolution {
    mesh: Arc<BoundaryMesh>,
    k: f64,
    incident: IncidentField,
    density: Vec<Complex64>,
    weighted: Vec<Complex64>,
    diagnostics: SolveDiagnostics,
}

/// One-shot solve: assembles, factors and solves for a single incident field.
pub fn solve_scattering(scene: &Scene, incident: &IncidentField, mesh: Arc<BoundaryMesh>) -> Result<ScatterSolution> {
    BoundaryOperator::new(mesh, scene.k)?.solve(incident)
}

impl ScatterSolution {
    pub fn mesh(&self) -> &BoundaryMesh {
        &self.mesh
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn incident(&self) -> &IncidentField {
        &self.incident
    }

    pub fn density(&self) -> &[Complex64] {
        &self.density
    }

    /// Quadrature weight times density at each node.
    pub fn weighted_density(&self) -> &[Complex64] {
        &self.weighted
    }

    pub fn diagnostics(&self) -> &SolveDiagnostics {
        &self.diagnostics
    }

    /// Scattered field and gradient in the precision of `T`. The caller is
    /// responsible for the near-field rule (see [`BoundaryMesh::check_target`]).
    pub fn scattered_with_gradient_in<T: Real>(&self, x: Vec2<T>) -> Result<(Complex<T>, Vec2<Complex<T>>)> {
        let zero = Complex::new(T::zero(), T::zero());
        let mut u = zero;
        let mut g = [zero, zero];
        for (node, c) in self.mesh.nodes().iter().zip(&self.weighted) {
            let (phi, grad) = fundamental_with_gradient(self.k, [x[0] - node.pos.x, x[1] - node.pos.y])?;
            let c = Complex::new(T::from_f64(c.re), T::from_f64(c.im));
            u = u + phi * c;
            g[0] = g[0] + grad[0] * c;
            g[1] = g[1] + grad[1] * c;
        }
        Ok((u, g))
    }

    pub fn total_with_gradient_in<T: Real>(&self, x: Vec2<T>) -> Result<(Complex<T>, Vec2<Complex<T>>)> {
        let (w, gw) = self.scattered_with_gradient_in(x)?;
        let (u, gu) = self.incident.eval_with_gradient_in(self.k, x)?;
        Ok((u + w, [gu[0] + gw[0], gu[1] + gw[1]]))
    }

    pub fn eval_scattered(&self, x: Point2) -> Result<Complex64> {
        self.mesh.check_target(x)?;
        let mut u = Complex64::new(0.0, 0.0);
        for (node, c) in self.mesh.nodes().iter().zip(&self.weighted) {
            let (h0, _) = hankel01(self.k * x.dist(node.pos));
            u += h0 * c;
        }
        Ok(u * Complex64::new(0.0, 0.25))
    }

    pub fn eval_scattered_gradient(&self, x: Point2) -> Result<Vec2<Complex64>> {
        self.mesh.check_target(x)?;
        Ok(self.scattered_with_gradient_in::<f64>(lift(x))?.1)
    }

    pub fn eval_total(&self, x: Point2) -> Result<Complex64> {
        Ok(self.incident.eval(self.k, x)? + self.eval_scattered(x)?)
    }

    pub fn eval_total_gradient(&self, x: Point2) -> Result<Vec2<Complex64>> {
        self.mesh.check_target(x)?;
        Ok(self.total_with_gradient_in::<f64>(lift(x))?.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::disc::disc_series_solution;
    use crate::forward::mesh::build_mesh_for;
    use crate::geometry::{Direction, Polygon};

    fn unit_square() -> Vec<Polygon> {
        let h = 0.5;
        vec![Polygon::new(vec![Point2::new(-h, -h), Point2::new(h, -h), Point2::new(h, h), Point2::new(-h, h)]).unwrap()]
    }

    fn operator(obs: &[Polygon], npe: usize, k: f64) -> BoundaryOperator {
        BoundaryOperator::new(Arc::new(build_mesh_for(obs, npe, 4.0).unwrap()), k).unwrap()
    }

    #[test]
    fn zero_data_gives_zero_density() {
        let op = operator(&unit_square(), 32, 2.0);
        let (phi, diag) = op.solve_neumann_data(&vec![c64::new(0.0, 0.0); op.mesh().len()]).unwrap();
        assert!(phi.iter().all(|z| *z == c64::new(0.0, 0.0)));
        assert_eq!(diag.residual, 0.0);
        assert!(op.solve_neumann_data(&[c64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn square_plane_wave_converges() {
        let inc = IncidentField::PlaneWave { d: Direction::from_angle(0.3) };
        let coarse = operator(&unit_square(), 64, 2.0).solve(&inc).unwrap();
        let fine = operator(&unit_square(), 128, 2.0).solve(&inc).unwrap();
        assert!(fine.diagnostics().residual < MAX_RESIDUAL);
        assert!(fine.diagnostics().condition_estimate < 1e4);
        for th in [0.0, 1.3, 2.9, 4.4] {
            let x = Point2::from_polar(2.0, th);
            let (a, b) = (coarse.eval_scattered(x).unwrap(), fine.eval_scattered(x).unwrap());
            assert!((a - b).norm() < 1e-4 * b.norm(), "{th}: {}", (a - b).norm());
        }
    }

    #[test]
    fn many_sided_polygon_approaches_disc() {
        let poly = vec![Polygon::regular(Point2::ORIGIN, 1.0, 64, 0.0).unwrap()];
        let y = Point2::new(3.0, 1.0);
        let sol = operator(&poly, 16, 1.5).solve(&IncidentField::PointSource { y }).unwrap();
        let disc = disc_series_solution(Point2::ORIGIN, 1.0, 1.5, IncidentField::PointSource { y }).unwrap();
        for th in [0.5, 2.0, 3.5, 5.0] {
            let x = Point2::from_polar(2.5, th);
            let (a, b) = (sol.eval_scattered(x).unwrap(), disc.eval_scattered(x).unwrap());
            assert!((a - b).norm() < 1e-2 * b.norm(), "{th}: {a} vs {b}");
        }
    }

    #[test]
    fn radiation_condition() {
        let sol = operator(&unit_square(), 32, 2.0).solve(&IncidentField::PlaneWave { d: Direction::from_angle(1.0) }).unwrap();
        let e = Point2::from_polar(1.0, 0.7);
        let defects: Vec<f64> = [50.0, 100.0, 200.0]
            .iter()
            .map(|&r| {
                let x = e * r;
                let w = sol.eval_scattered(x).unwrap();
                let g = sol.eval_scattered_gradient(x).unwrap();
                let dr = g[0] * e.x + g[1] * e.y;
                r.powf(1.5) * (dr - Complex64::new(0.0, 2.0) * w).norm()
            })
            .collect();
        let spread = defects.iter().cloned().fold(0.0, f64::max) / defects.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 1.2, "{defects:?}");
    }

    #[test]
    fn point_source_reciprocity() {
        let op = operator(&unit_square(), 64, 2.0);
        let (y1, y2) = (Point2::new(2.0, 0.4), Point2::new(-1.1, 1.7));
        let w12 = op.solve(&IncidentField::PointSource { y: y1 }).unwrap().eval_scattered(y2).unwrap();
        let w21 = op.solve(&IncidentField::PointSource { y: y2 }).unwrap().eval_scattered(y1).unwrap();
        assert!((w12 - w21).norm() < 1e-4 * w12.norm(), "{w12} {w21}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let sol = operator(&unit_square(), 32, 2.0).solve(&IncidentField::PlaneWave { d: Direction::from_angle(-0.4) }).unwrap();
        let x = Point2::new(2.2, -1.3);
        let g = sol.eval_total_gradient(x).unwrap();
        let h = 1e-5;
        for (i, e) in [Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)].into_iter().enumerate() {
            let fd = (sol.eval_total(x + e * h).unwrap() - sol.eval_total(x - e * h).unwrap()) / (2.0 * h);
            assert!((fd - g[i]).norm() < 1e-7 * g[i].norm().max(1.0));
        }
    }

    #[test]
    fn dd_evaluation_matches_f64() {
        use crate::dd::Dd;
        let sol = operator(&unit_square(), 32, 2.0).solve(&IncidentField::PointSource { y: Point2::new(3.0, 0.0) }).unwrap();
        let x = Point2::new(-1.9, 1.4);
        let (w, _) = sol.scattered_with_gradient_in::<Dd>([Dd::from_f64(x.x), Dd::from_f64(x.y)]).unwrap();
        let w64 = sol.eval_scattered(x).unwrap();
        assert!((Complex64::new(w.re.to_f64(), w.im.to_f64()) - w64).norm() < 1e-13 * w64.norm());
    }

    #[test]
    fn rejects_sources_on_obstacles_and_near_targets() {
        let op = operator(&unit_square(), 32, 2.0);
        assert!(op.solve(&IncidentField::PointSource { y: Point2::new(0.5, 0.1) }).is_err());
        assert!(op.solve(&IncidentField::PointSource { y: Point2::new(0.1, 0.1) }).is_err());
        let sol = op.solve(&IncidentField::PlaneWave { d: Direction::from_angle(0.0) }).unwrap();
        assert!(matches!(sol.eval_scattered(Point2::new(0.52, 0.0)), Err(Error::NearField(_))));
        assert!(BoundaryOperator::new(op.mesh().clone(), -1.0).is_err());
    }

    #[test]
    fn interior_eigenvalue_is_flagged() {
        // lowest Dirichlet eigenvalue of the unit square: k = π√2
        let mesh = Arc::new(build_mesh_for(&unit_square(), 64, 4.0).unwrap());
        let k = std::f64::consts::PI * std::f64::consts::SQRT_2;
        assert!(matches!(BoundaryOperator::new(mesh.clone(), k), Err(Error::Resonance { .. })));
        assert!(BoundaryOperator::new(mesh, k - 0.003).unwrap().condition_estimate() < 1e7);
    }
}
