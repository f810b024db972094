//! Polygonal scenes, support functions, direction regularity, corner angles
//! and convex hulls assembled from support-line data.

use crate::error::{domain, Error, Result};
use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Point2::new(r * c, r * s)
    }

    #[inline]
    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product.
    #[inline]
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Unit vector ω together with ω⊥ = (ω_y, −ω_x), so that det(ω⊥, ω) = +1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    omega: Point2,
    perp: Point2,
}

impl Direction {
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_unit(Point2::new(c, s))
    }

    /// Normalizes `v`; errors on a zero or non-finite vector.
    pub fn new(v: Point2) -> Result<Self> {
        let n = v.norm();
        if !(n > 0.0) || !n.is_finite() {
            return domain("direction vector must be nonzero and finite");
        }
        Ok(Self::from_unit(v * (1.0 / n)))
    }

    fn from_unit(omega: Point2) -> Self {
        Direction { omega, perp: Point2::new(omega.y, -omega.x) }
    }

    #[inline]
    pub fn omega(&self) -> Point2 {
        self.omega
    }

    #[inline]
    pub fn perp(&self) -> Point2 {
        self.perp
    }

    pub fn angle(&self) -> f64 {
        self.omega.y.atan2(self.omega.x)
    }

    pub fn reversed(&self) -> Self {
        Self::from_unit(-self.omega)
    }

    /// `n` directions at angles 2πj/n.
    pub fn uniform_grid(n: usize) -> Vec<Direction> {
        (0..n).map(|j| Direction::from_angle(TAU * j as f64 / n as f64)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point2>,
}

fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    let on = |p: Point2, q: Point2, r: Point2, o: f64| {
        o == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(a, b, c, o1) || on(a, b, d, o2) || on(c, d, a, o3) || on(c, d, b, o4)
}

/// Distance from `p` to the segment [a, b].
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 > 0.0 { ((p - a).dot(ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    p.dist(a + ab * t)
}

fn segment_distance(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

impl Polygon {
    /// Validates: at least 3 vertices, finite, no coincident consecutive
    /// vertices, strictly counterclockwise and simple.
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return domain(format!("polygon needs at least 3 vertices, got {n}"));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return domain("polygon vertex is not finite");
        }
        for i in 0..n {
            if vertices[i].dist(vertices[(i + 1) % n]) <= 1e-12 {
                return domain(format!("polygon vertices {i} and {} coincide", (i + 1) % n));
            }
        }
        let p = Polygon { vertices };
        if !(p.signed_area() > 0.0) {
            return domain("polygon must be strictly counterclockwise (positive signed area)");
        }
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                let (a, b) = p.edge(i);
                let (c, d) = p.edge(j);
                if segments_intersect(a, b, c, d) {
                    return domain(format!("polygon is not simple: edges {i} and {j} intersect"));
                }
            }
        }
        Ok(p)
    }

    pub fn regular(center: Point2, circumradius: f64, n: usize, phase: f64) -> Result<Self> {
        Polygon::new(
            (0..n)
                .map(|j| center + Point2::from_polar(circumradius, phase + TAU * j as f64 / n as f64))
                .collect(),
        )
    }

    #[inline]
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1`.
    #[inline]
    pub fn edge(&self, i: usize) -> (Point2, Point2) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.vertices.len();
        0.5 * (0..n).map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n])).sum::<f64>()
    }

    pub fn centroid(&self) -> Point2 {
        let n = self.vertices.len();
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..n {
            let (a, b) = self.edge(i);
            let w = a.cross(b);
            cx += (a.x + b.x) * w;
            cy += (a.y + b.y) * w;
        }
        let s = 1.0 / (6.0 * self.signed_area());
        Point2::new(cx * s, cy * s)
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.len()).map(|i| {
            let (a, b) = self.edge(i);
            a.dist(b)
        }).sum()
    }

    pub fn diameter(&self) -> f64 {
        diameter(std::slice::from_ref(self))
    }

    /// Strict interior test (even-odd rule); boundary points count as outside.
    pub fn contains(&self, p: Point2) -> bool {
        if self.boundary_distance(p) == 0.0 {
            return false;
        }
        let mut inside = false;
        let n = self.len();
        for i in 0..n {
            let (a, b) = self.edge(i);
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn boundary_distance(&self, p: Point2) -> f64 {
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                point_segment_distance(p, a, b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Interior angle at vertex `i`, in (0, 2π).
    pub fn interior_angle(&self, i: usize) -> Result<f64> {
        let n = self.len();
        if i >= n {
            return domain(format!("vertex index {i} out of range for {n} vertices"));
        }
        let v = self.vertices[i];
        let next = self.vertices[(i + 1) % n] - v;
        let prev = self.vertices[(i + n - 1) % n] - v;
        let mut a = next.cross(prev).atan2(next.dot(prev));
        if a < 0.0 {
            a += TAU;
        }
        if (a - PI).abs() <= 1e-12 {
            return domain(format!("vertex {i} is collinear with its neighbours"));
        }
        Ok(a)
    }

    /// Outside angle Θ = 2π − interior angle, with λ_min = π/Θ.
    pub fn exterior_angle(&self, i: usize) -> Result<CornerAngle> {
        let exterior = TAU - self.interior_angle(i)?;
        Ok(CornerAngle { exterior, lambda_min: PI / exterior })
    }

    pub fn translated(&self, b: Point2) -> Polygon {
        Polygon { vertices: self.vertices.iter().map(|&v| v + b).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerAngle {
    /// Θ in radians.
    pub exterior: f64,
    /// Smallest corner exponent π/Θ.
    pub lambda_min: f64,
}

/// Largest distance between any two vertices of the obstacle set.
pub fn diameter(obstacles: &[Polygon]) -> f64 {
    let pts: Vec<Point2> = obstacles.iter().flat_map(|p| p.vertices.iter().copied()).collect();
    let mut d = 0.0f64;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            d = d.max(a.dist(*b));
        }
    }
    d
}

/// h_D(ω) = max over all vertices of v·ω.
pub fn support_function(obstacles: &[Polygon], omega: &Direction) -> Result<f64> {
    if obstacles.is_empty() {
        return domain("support function of an empty obstacle set");
    }
    Ok(obstacles
        .iter()
        .flat_map(|p| p.vertices.iter())
        .map(|v| v.dot(omega.omega()))
        .fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Regularity {
    pub regular: bool,
    /// The maximizing vertex x_0.
    pub vertex: Point2,
    pub obstacle: usize,
    pub vertex_index: usize,
    /// h_D(ω) minus the largest value of v·ω over all other vertices.
    pub margin: f64,
}

/// Default tie tolerance for [`is_regular`]: 1e-9 times the obstacle diameter.
pub fn default_regularity_tol(obstacles: &[Polygon]) -> f64 {
    1e-9 * diameter(obstacles).max(f64::MIN_POSITIVE)
}

/// A direction is regular when exactly one vertex attains h_D(ω) within `tol`.
pub fn is_regular(obstacles: &[Polygon], omega: &Direction, tol: f64) -> Result<Regularity> {
    if obstacles.is_empty() {
        return domain("regularity test on an empty obstacle set");
    }
    if !(tol > 0.0) {
        return domain(format!("tie tolerance must be positive, got {tol}"));
    }
    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    let mut second = f64::NEG_INFINITY;
    for (oi, p) in obstacles.iter().enumerate() {
        for (vi, v) in p.vertices.iter().enumerate() {
            let s = v.dot(omega.omega());
            if s > best.0 {
                second = best.0;
                best = (s, oi, vi);
            } else if s > second {
                second = s;
            }
        }
    }
    let margin = best.0 - second;
    Ok(Regularity {
        regular: margin > tol,
        vertex: obstacles[best.1].vertices[best.2],
        obstacle: best.1,
        vertex_index: best.2,
        margin,
    })
}

/// Convex hull by the monotone-chain algorithm, counterclockwise, collinear
/// points dropped.
pub fn convex_hull_of_points(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point2>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b - a).cross(p - a) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Hausdorff distance between the convex hulls of two polygons, computed as
/// the maximum over directions of |h_A(ω) − h_B(ω)|. The maximum is attained
/// at an edge normal of either hull or along ±(p − q) for a vertex pair.
pub fn hausdorff_convex(a: &Polygon, b: &Polygon) -> f64 {
    let ha = convex_hull_of_points(a.vertices());
    let hb = convex_hull_of_points(b.vertices());
    let support = |pts: &[Point2], w: Point2| pts.iter().map(|v| v.dot(w)).fold(f64::NEG_INFINITY, f64::max);
    let mut candidates: Vec<Point2> = Vec::new();
    for pts in [&ha, &hb] {
        let n = pts.len();
        for i in 0..n {
            let e = pts[(i + 1) % n] - pts[i];
            candidates.push(Point2::new(e.y, -e.x));
        }
    }
    for p in &ha {
        for q in &hb {
            let d = *p - *q;
            candidates.push(d);
            candidates.push(-d);
        }
    }
    candidates
        .into_iter()
        .filter_map(|w| {
            let n = w.norm();
            (n > 0.0).then(|| w * (1.0 / n))
        })
        .map(|w| (support(&ha, w) - support(&hb, w)).abs())
        .fold(0.0, f64::max)
}

/// Result of intersecting support half-planes. `polygon` is `None` when the
/// intersection is empty or degenerate, with the reason in `diagnostic`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportHull {
    pub polygon: Option<Polygon>,
    pub diagnostic: Option<String>,
}

/// Number of sides of the polygon circumscribing the clip disc.
const CLIP_SIDES: usize = 360;

fn clip_half_plane(poly: &[Point2], w: Point2, h: f64) -> Vec<Point2> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let fp = p.dot(w) - h;
        let fq = q.dot(w) - h;
        if fp <= 0.0 {
            out.push(p);
        }
        if (fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0) {
            let t = fp / (fp - fq);
            out.push(p + (q - p) * t);
        }
    }
    out
}

/// Intersection of the half-planes {x·ω ≤ h(ω)}, clipped to the disc of the
/// given center and radius first, so sparse data still gives a bounded set.
pub fn convex_hull_from_supports(samples: &[(Direction, f64)], center: Point2, radius: f64) -> Result<SupportHull> {
    if samples.len() < 3 {
        return domain(format!("need at least 3 support samples, got {}", samples.len()));
    }
    if !(radius > 0.0) {
        return domain("clip radius must be positive");
    }
    if samples.iter().any(|(_, h)| !h.is_finite()) {
        return domain("support value is not finite");
    }
    let mut angles: Vec<f64> = samples.iter().map(|(d, _)| d.angle().rem_euclid(TAU)).collect();
    angles.sort_by(f64::total_cmp);
    let max_gap = angles
        .windows(2)
        .map(|w| w[1] - w[0])
        .chain(std::iter::once(angles[0] + TAU - angles[angles.len() - 1]))
        .fold(0.0, f64::max);
    if max_gap >= PI {
        return domain("support directions do not span more than a half-circle");
    }
    let outer = radius / (PI / CLIP_SIDES as f64).cos();
    let mut poly: Vec<Point2> = (0..CLIP_SIDES)
        .map(|j| center + Point2::from_polar(outer, TAU * (j as f64 + 0.5) / CLIP_SIDES as f64))
        .collect();
    for (d, h) in samples {
        poly = clip_half_plane(&poly, d.omega(), *h);
        if poly.is_empty() {
            return Ok(SupportHull {
                polygon: None,
                diagnostic: Some(format!(
                    "half-plane intersection is empty (direction angle {:.6}, h = {h})",
                    d.angle()
                )),
            });
        }
    }
    let scale = radius.max(1.0);
    let mut cleaned: Vec<Point2> = Vec::with_capacity(poly.len());
    for p in poly {
        if cleaned.last().is_none_or(|q: &Point2| q.dist(p) > 1e-10 * scale) {
            cleaned.push(p);
        }
    }
    while cleaned.len() > 1 && cleaned[0].dist(*cleaned.last().unwrap()) <= 1e-10 * scale {
        cleaned.pop();
    }
    // drop vertices on a straight run
    let mut changed = true;
    while changed && cleaned.len() >= 3 {
        changed = false;
        let n = cleaned.len();
        for i in 0..n {
            let a = cleaned[(i + n - 1) % n];
            let b = cleaned[i];
            let c = cleaned[(i + 1) % n];
            if (b - a).cross(c - b).abs() <= 1e-14 * scale * scale {
                cleaned.remove(i);
                changed = true;
                break;
            }
        }
    }
    match Polygon::new(cleaned) {
        Ok(p) => Ok(SupportHull { polygon: Some(p), diagnostic: None }),
        Err(Error::Domain(msg)) => Ok(SupportHull {
            polygon: None,
            diagnostic: Some(format!("half-plane intersection is degenerate: {msg}")),
        }),
        Err(e) => Err(e),
    }
}

/// Obstacles, measurement circle ∂B_R, source circle ∂B_R1 with source y on
/// it, and wavenumber k.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub obstacles: Vec<Polygon>,
    pub center: Point2,
    pub radius_r: f64,
    pub radius_r1: f64,
    pub source: Point2,
    pub k: f64,
}

impl Scene {
    pub fn new(
        obstacles: Vec<Polygon>,
        center: Point2,
        radius_r: f64,
        radius_r1: f64,
        source: Point2,
        k: f64,
    ) -> Result<Self> {
        if !(radius_r > 0.0 && radius_r.is_finite()) {
            return domain(format!("R must be positive, got {radius_r}"));
        }
        if !(radius_r1 > radius_r && radius_r1.is_finite()) {
            return domain(format!("R1 must exceed R = {radius_r}, got {radius_r1}"));
        }
        if !(k > 0.0 && k.is_finite()) {
            return domain(format!("wavenumber must be positive, got {k}"));
        }
        if !center.is_finite() || !source.is_finite() {
            return domain("center and source must be finite");
        }
        let ys = source.dist(center);
        if (ys - radius_r1).abs() > 1e-10 * radius_r1.max(1.0) {
            return domain(format!("source must lie on the circle of radius R1 = {radius_r1}; |y - center| = {ys}"));
        }
        for (i, p) in obstacles.iter().enumerate() {
            for v in p.vertices() {
                if v.dist(center) >= radius_r {
                    return domain(format!("obstacle {i} vertex ({}, {}) is not inside B_R", v.x, v.y));
                }
            }
        }
        for i in 0..obstacles.len() {
            for j in i + 1..obstacles.len() {
                if obstacle_distance(&obstacles[i], &obstacles[j]) <= 0.0 {
                    return domain(format!("obstacles {i} and {j} touch, overlap or are nested"));
                }
            }
        }
        Ok(Scene { obstacles, center, radius_r, radius_r1, source, k })
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.obstacles)
    }

    /// Distance from the obstacle set to ∂B_R1.
    pub fn distance_to_source_circle(&self) -> f64 {
        let far = self
            .obstacles
            .iter()
            .flat_map(|p| p.vertices().iter())
            .map(|v| v.dist(self.center))
            .fold(0.0, f64::max);
        self.radius_r1 - far
    }

    /// diam D < dist(D, ∂B_R1).
    pub fn source_circle_is_far(&self) -> bool {
        self.diameter() < self.distance_to_source_circle()
    }

    /// True if `p` lies in the closure of some obstacle.
    pub fn in_obstacle_closure(&self, p: Point2) -> bool {
        self.obstacles.iter().any(|o| o.contains(p) || o.boundary_distance(p) == 0.0)
    }

    pub fn boundary_distance(&self, p: Point2) -> f64 {
        self.obstacles.iter().map(|o| o.boundary_distance(p)).fold(f64::INFINITY, f64::min)
    }

    /// Rigid translation of obstacles, circle center and source.
    pub fn translated(&self, b: Point2) -> Scene {
        Scene {
            obstacles: self.obstacles.iter().map(|o| o.translated(b)).collect(),
            center: self.center + b,
            source: self.source + b,
            ..self.clone()
        }
    }

    /// Same scene with another source point on ∂B_R1 (given by its angle).
    pub fn with_source_angle(&self, theta: f64) -> Scene {
        Scene { source: self.center + Point2::from_polar(self.radius_r1, theta), ..self.clone() }
    }

    pub fn with_k(&self, k: f64) -> Scene {
        Scene { k, ..self.clone() }
    }
}

fn obstacle_distance(a: &Polygon, b: &Polygon) -> f64 {
    if a.contains(b.vertices()[0]) || b.contains(a.vertices()[0]) {
        return 0.0;
    }
    let mut d = f64::INFINITY;
    for i in 0..a.len() {
        let (p, q) = a.edge(i);
        for j in 0..b.len() {
            let (r, s) = b.edge(j);
            d = d.min(segment_distance(p, q, r, s));
        }
    }
    d
}
