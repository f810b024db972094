use crate::error::{domain, Error, Result};
use crate::geometry::{point_segment_distance, Point2, Polygon, Scene};
use std::ops::Range;

/// Gauss-Legendre nodes per panel.
pub const NODES_PER_PANEL: usize = 8;

/// Gauss-Legendre rule on [0, 1]: (nodes, weights), nodes ascending.
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; q];
    let mut w = vec![0.0; q];
    for i in 0..q {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for n in 2..=q {
                let p2 = ((2 * n - 1) as f64 * t * p1 - (n - 1) as f64 * p0) / n as f64;
                p0 = p1;
                p1 = p2;
            }
            if q == 1 {
                p0 = 1.0;
                p1 = t;
            }
            dp = q as f64 * (t * p1 - p0) / (t * t - 1.0);
            let step = p1 / dp;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        // descending t on [-1, 1] -> ascending on [0, 1]
        x[i] = 0.5 * (1.0 - t);
        w[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshNode {
    pub pos: Point2,
    /// Unit normal pointing out of the obstacle.
    pub normal: Point2,
    pub weight: f64,
    /// Global edge id (edges numbered consecutively over all obstacles).
    pub edge: usize,
    pub obstacle: usize,
    /// Position along the edge as a fraction of its length.
    pub param: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Panel {
    pub edge: usize,
    pub start: Point2,
    pub end: Point2,
    pub length: f64,
    pub nodes: Range<usize>,
}

/// Composite Gauss-Legendre discretization of every obstacle boundary with
/// panels graded algebraically toward both ends of each edge.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMesh {
    obstacles: Vec<Polygon>,
    nodes: Vec<MeshNode>,
    panels: Vec<Panel>,
    edge_lengths: Vec<f64>,
    nodes_per_edge: usize,
    p_grade: f64,
}

/// Panel breakpoints on [0, 1]: ½(j/M)^p for j = 0..M, mirrored about ½.
pub fn graded_breakpoints(panels_per_half: usize, p_grade: f64) -> Vec<f64> {
    let m = panels_per_half as f64;
    let half: Vec<f64> = (0..=panels_per_half).map(|j| 0.5 * (j as f64 / m).powf(p_grade)).collect();
    let mut out = half.clone();
    out.extend(half.iter().rev().skip(1).map(|h| 1.0 - h));
    out
}

pub fn build_mesh(scene: &Scene, nodes_per_edge: usize, p_grade: f64) -> Result<BoundaryMesh> {
    build_mesh_for(&scene.obstacles, nodes_per_edge, p_grade)
}

pub fn build_mesh_for(obstacles: &[Polygon], nodes_per_edge: usize, p_grade: f64) -> Result<BoundaryMesh> {
    let per_half = 2 * NODES_PER_PANEL;
    if nodes_per_edge < per_half || !nodes_per_edge.is_multiple_of(per_half) {
        return domain(format!("nodes per edge must be a positive multiple of {per_half}, got {nodes_per_edge}"));
    }
    if !(p_grade >= 2.0) || !p_grade.is_finite() {
        return domain(format!("grading exponent must be at least 2, got {p_grade}"));
    }
    let breaks = graded_breakpoints(nodes_per_edge / per_half, p_grade);
    let (gx, gw) = gauss_legendre(NODES_PER_PANEL);
    let mut nodes = Vec::new();
    let mut panels = Vec::new();
    let mut edge_lengths = Vec::new();
    let mut edge_id = 0;
    for (oi, poly) in obstacles.iter().enumerate() {
        for e in 0..poly.len() {
            let (a, b) = poly.edge(e);
            let len = a.dist(b);
            if !(len > 1e-12) {
                return domain(format!("obstacle {oi} edge {e} is degenerate"));
            }
            let t = (b - a) * (1.0 / len);
            let normal = Point2::new(t.y, -t.x);
            for w in breaks.windows(2) {
                let (t0, t1) = (w[0], w[1]);
                let first = nodes.len();
                for (x, wt) in gx.iter().zip(&gw) {
                    let s = t0 + (t1 - t0) * x;
                    nodes.push(MeshNode {
                        pos: a + (b - a) * s,
                        normal,
                        weight: wt * (t1 - t0) * len,
                        edge: edge_id,
                        obstacle: oi,
                        param: s,
                    });
                }
                panels.push(Panel {
                    edge: edge_id,
                    start: a + (b - a) * t0,
                    end: a + (b - a) * t1,
                    length: (t1 - t0) * len,
                    nodes: first..nodes.len(),
                });
            }
            edge_lengths.push(len);
            edge_id += 1;
        }
    }
    Ok(BoundaryMesh { obstacles: obstacles.to_vec(), nodes, panels, edge_lengths, nodes_per_edge, p_grade })
}

impl BoundaryMesh {
    pub fn nodes(&self) -> &[MeshNode] {
        &self.nodes
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn obstacles(&self) -> &[Polygon] {
        &self.obstacles
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes_per_edge(&self) -> usize {
        self.nodes_per_edge
    }

    pub fn nodes_per_panel(&self) -> usize {
        NODES_PER_PANEL
    }

    pub fn p_grade(&self) -> f64 {
        self.p_grade
    }

    pub fn max_panel_length(&self) -> f64 {
        self.panels.iter().map(|p| p.length).fold(0.0, f64::max)
    }

    /// Rejects targets inside an obstacle or within three panel lengths of
    /// any panel, where the panel quadrature is no longer accurate.
    pub fn check_target(&self, x: Point2) -> Result<()> {
        if self.obstacles.iter().any(|o| o.contains(x)) {
            return Err(Error::NearField(format!("target ({}, {}) lies inside an obstacle", x.x, x.y)));
        }
        for p in &self.panels {
            let d = point_segment_distance(x, p.start, p.end);
            if d < 3.0 * p.length {
                return Err(Error::NearField(format!(
                    "target ({}, {}) is {d:.3e} from a panel of length {:.3e}; need at least three panel lengths",
                    x.x, x.y, p.length
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_scene_obstacles() -> Vec<Polygon> {
        vec![Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap()]
    }

    #[test]
    fn gauss_rule_is_exact_for_degree_15() {
        let (x, w) = gauss_legendre(8);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        for deg in 0..16 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            assert!((q - 1.0 / (deg as f64 + 1.0)).abs() < 1e-15, "degree {deg}");
        }
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        // known first node of the 8-point rule on [-1, 1]: -0.9602898564975363
        assert!((2.0 * x[0] - 1.0 + 0.9602898564975363).abs() < 1e-15);
    }

    #[test]
    fn square_mesh_counts_and_weights() {
        let m = build_mesh_for(&square_scene_obstacles(), 32, 4.0).unwrap();
        assert_eq!(m.len(), 128);
        for e in 0..4 {
            let s: f64 = m.nodes().iter().filter(|n| n.edge == e).map(|n| n.weight).sum();
            assert!((s - 1.0).abs() < 1e-10);
        }
        for n in m.nodes() {
            assert!(n.weight > 0.0);
            assert!((n.normal.norm() - 1.0).abs() < 1e-12);
            let (a, b) = m.obstacles()[0].edge(n.edge);
            assert!(n.normal.dot(b - a).abs() < 1e-12);
        }
        // outward: the normal of the bottom edge points down
        assert_eq!(m.nodes()[0].normal, Point2::new(0.0, -1.0));
    }

    #[test]
    fn panels_shrink_toward_corners() {
        let m = build_mesh_for(&square_scene_obstacles(), 64, 4.0).unwrap();
        let lens: Vec<f64> = m.panels().iter().filter(|p| p.edge == 0).map(|p| p.length).collect();
        let half = lens.len() / 2;
        assert!(lens[..half].windows(2).all(|w| w[0] < w[1]));
        assert!(lens[half..].windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn smallest_panel_bound() {
        let tri = vec![Polygon::regular(Point2::ORIGIN, 0.5, 3, 0.3).unwrap()];
        for npe in [32, 64, 128] {
            let m = build_mesh_for(&tri, npe, 4.0).unwrap();
            let levels = ((npe / 16) as f64).log2();
            let edge = m.edge_lengths()[0];
            let smallest = m.panels().iter().map(|p| p.length).fold(f64::INFINITY, f64::min);
            assert!(smallest <= 0.5f64.powf(4.0 * levels) * edge * (1.0 + 1e-12), "{npe}");
        }
    }

    #[test]
    fn refinement_shrinks_largest_panel() {
        let obs = square_scene_obstacles();
        let sizes: Vec<f64> = [32, 64, 128, 256]
            .iter()
            .map(|&n| build_mesh_for(&obs, n, 4.0).unwrap().max_panel_length())
            .collect();
        for w in sizes.windows(2) {
            assert!(w[1] < 0.75 * w[0]);
        }
    }

    #[test]
    fn invalid_parameters() {
        let obs = square_scene_obstacles();
        assert!(build_mesh_for(&obs, 8, 4.0).is_err());
        assert!(build_mesh_for(&obs, 24, 4.0).is_err());
        assert!(build_mesh_for(&obs, 32, 1.5).is_err());
        assert!(build_mesh_for(&[], 32, 4.0).unwrap().is_empty());
    }

    #[test]
    fn near_field_rule() {
        let m = build_mesh_for(&square_scene_obstacles(), 64, 4.0).unwrap();
        assert!(m.check_target(Point2::new(0.5, 0.5)).is_err());
        assert!(m.check_target(Point2::new(1.05, 0.5)).is_err());
        assert!(m.check_target(Point2::new(3.0, 0.5)).is_ok());
    }
}
