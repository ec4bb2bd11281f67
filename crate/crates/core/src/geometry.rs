//! Polygonal curves in R^3, projection directions, planar projection and
//! regular-projection screening.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use serde::Serialize;
use thiserror::Error;

pub type Point3 = [f64; 3];
pub type Point2 = [f64; 2];

/// Default regularity tolerance, relative to the curve's bounding-box diagonal.
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("a curve needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("points {0} and {1} coincide")]
    RepeatedPoint(usize, usize),
    #[error("closed curve repeats its first point at the end; the closing edge is implicit")]
    ExplicitClosure,
    #[error("non-finite coordinate at point {0}")]
    NonFinite(usize),
    #[error("direction vector must be non-zero and finite")]
    ZeroDirection,
    #[error("number of directions must be at least 1")]
    NoDirections,
}

fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: Point3) -> f64 {
    dot(a, a).sqrt()
}

/// An ordered polygonal curve, open or closed. Closed curves carry an
/// implicit edge from the last point back to the first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve3D {
    points: Vec<Point3>,
    closed: bool,
}

impl Curve3D {
    pub fn new(points: Vec<Point3>, closed: bool) -> Result<Self, GeometryError> {
        if points.len() < 3 {
            return Err(GeometryError::TooFewPoints(points.len()));
        }
        if let Some(i) = points.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(GeometryError::NonFinite(i));
        }
        let diag = bbox_diagonal(points.iter().copied());
        let tol = 1e-12 * diag.max(f64::MIN_POSITIVE);
        for i in 0..points.len() - 1 {
            if norm(sub(points[i + 1], points[i])) <= tol {
                return Err(GeometryError::RepeatedPoint(i, i + 1));
            }
        }
        if closed && norm(sub(points[points.len() - 1], points[0])) <= tol {
            return Err(GeometryError::ExplicitClosure);
        }
        Ok(Curve3D { points, closed })
    }

    pub fn open(points: Vec<Point3>) -> Result<Self, GeometryError> {
        Self::new(points, false)
    }

    pub fn closed(points: Vec<Point3>) -> Result<Self, GeometryError> {
        Self::new(points, true)
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn n_edges(&self) -> usize {
        if self.closed {
            self.points.len()
        } else {
            self.points.len() - 1
        }
    }

    pub fn bbox_diagonal(&self) -> f64 {
        bbox_diagonal(self.points.iter().copied())
    }

    /// Same points with the closed flag replaced.
    pub fn with_closed(&self, closed: bool) -> Result<Self, GeometryError> {
        Self::new(self.points.clone(), closed)
    }

    /// Reflection through the plane `z = 0`.
    pub fn mirrored(&self) -> Self {
        Curve3D {
            points: self.points.iter().map(|p| [p[0], p[1], -p[2]]).collect(),
            closed: self.closed,
        }
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Curve3D { points, closed: self.closed }
    }

    /// Applies a 3x3 matrix (row-major) to every point.
    pub fn transformed(&self, m: &[[f64; 3]; 3]) -> Self {
        Curve3D {
            points: self.points.iter().map(|p| apply(m, *p)).collect(),
            closed: self.closed,
        }
    }
}

pub(crate) fn apply(m: &[[f64; 3]; 3], p: Point3) -> Point3 {
    [dot(m[0], p), dot(m[1], p), dot(m[2], p)]
}

fn bbox_diagonal<I: Iterator<Item = Point3>>(points: I) -> f64 {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    norm(sub(hi, lo))
}

/// A unit vector in R^3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Direction([f64; 3]);

impl Direction {
    /// Normalizes `v`.
    pub fn new(v: Point3) -> Result<Self, GeometryError> {
        let n = norm(v);
        if !n.is_finite() || n == 0.0 {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(Direction([v[0] / n, v[1] / n, v[2] / n]))
    }

    pub const Z: Direction = Direction([0.0, 0.0, 1.0]);

    pub fn vector(&self) -> Point3 {
        self.0
    }

    pub fn transformed(&self, m: &[[f64; 3]; 3]) -> Result<Self, GeometryError> {
        Direction::new(apply(m, self.0))
    }

    /// Orthonormal basis `(e1, e2)` of the plane normal to this direction,
    /// right-handed so that `e1 x e2 = self`. `e1` comes from Gram-Schmidt on
    /// the coordinate axis least aligned with the direction.
    pub fn plane_basis(&self) -> (Point3, Point3) {
        let d = self.0;
        let mut axis = 0;
        for k in 1..3 {
            if d[k].abs() < d[axis].abs() {
                axis = k;
            }
        }
        let mut e = [0.0; 3];
        e[axis] = 1.0;
        let proj = dot(e, d);
        let e1 = sub(e, [proj * d[0], proj * d[1], proj * d[2]]);
        let n1 = norm(e1);
        let e1 = [e1[0] / n1, e1[1] / n1, e1[2] / n1];
        let e2 = cross3(d, e1);
        (e1, e2)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653; // pi * (3 - sqrt 5)

/// `n` near-uniform directions on the golden-angle spiral. A single direction
/// is the `z` axis.
pub fn fibonacci_sphere(n: usize) -> Result<Vec<Direction>, GeometryError> {
    match n {
        0 => Err(GeometryError::NoDirections),
        1 => Ok(vec![Direction::Z]),
        _ => Ok((0..n)
            .map(|i| {
                let y = 1.0 - 2.0 * i as f64 / (n - 1) as f64;
                let r = (1.0 - y * y).max(0.0).sqrt();
                let theta = GOLDEN_ANGLE * i as f64;
                Direction::new([theta.cos() * r, y, theta.sin() * r]).expect("unit by construction")
            })
            .collect()),
    }
}

/// `n` i.i.d. uniform directions from a seeded generator.
pub fn random_directions(n: usize, seed: u64) -> Result<Vec<Direction>, GeometryError> {
    if n == 0 {
        return Err(GeometryError::NoDirections);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let v: [f64; 3] = UnitSphere.sample(&mut rng);
            Direction::new(v).expect("sphere sample is non-zero")
        })
        .collect())
}

/// A curve projected to the plane normal to a direction; `heights` keeps the
/// signed distance of each point along the direction.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarPolyline {
    pub points2d: Vec<Point2>,
    pub heights: Vec<f64>,
    pub closed: bool,
}

impl PlanarPolyline {
    pub fn n_edges(&self) -> usize {
        if self.closed {
            self.points2d.len()
        } else {
            self.points2d.len() - 1
        }
    }

    /// Endpoints of edge `i` in the plane.
    pub fn edge(&self, i: usize) -> (Point2, Point2) {
        let j = (i + 1) % self.points2d.len();
        (self.points2d[i], self.points2d[j])
    }

    fn edge_heights(&self, i: usize) -> (f64, f64) {
        let j = (i + 1) % self.heights.len();
        (self.heights[i], self.heights[j])
    }

    pub fn are_adjacent(&self, i: usize, j: usize) -> bool {
        let n = self.n_edges();
        let next = |k: usize| if self.closed { Some((k + 1) % n) } else if k + 1 < n { Some(k + 1) } else { None };
        next(i) == Some(j) || next(j) == Some(i)
    }

    fn scale(&self) -> f64 {
        bbox_diagonal(
            self.points2d
                .iter()
                .zip(&self.heights)
                .map(|(p, h)| [p[0], p[1], *h]),
        )
    }
}

pub fn project(curve: &Curve3D, dir: &Direction) -> PlanarPolyline {
    let (e1, e2) = dir.plane_basis();
    let d = dir.vector();
    PlanarPolyline {
        points2d: curve.points().iter().map(|p| [dot(*p, e1), dot(*p, e2)]).collect(),
        heights: curve.points().iter().map(|p| dot(*p, d)).collect(),
        closed: curve.is_closed(),
    }
}

/// Why a projection was discarded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Irregularity {
    /// An edge collapses to (nearly) a point in the projection.
    DegenerateEdge { edge: usize },
    /// An edge meets another edge at or near one of its endpoints.
    EndpointIncidence { edge_a: usize, edge_b: usize },
    /// Two crossings on one edge (nearly) coincide.
    NearTriplePoint { edge: usize },
    /// Edges overlap or cross at a vanishing angle.
    NearParallel { edge_a: usize, edge_b: usize },
    /// The strands meet in 3D at the crossing.
    HeightTangency { edge_a: usize, edge_b: usize },
}

impl fmt::Display for Irregularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Irregularity::DegenerateEdge { edge } => write!(f, "edge {edge} degenerates to a point"),
            Irregularity::EndpointIncidence { edge_a, edge_b } => {
                write!(f, "edges {edge_a} and {edge_b} meet at an endpoint")
            }
            Irregularity::NearTriplePoint { edge } => write!(f, "near triple point on edge {edge}"),
            Irregularity::NearParallel { edge_a, edge_b } => {
                write!(f, "edges {edge_a} and {edge_b} are near-parallel where they meet")
            }
            Irregularity::HeightTangency { edge_a, edge_b } => {
                write!(f, "edges {edge_a} and {edge_b} touch in 3D")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Regularity {
    Accept,
    Reject(Irregularity),
}

impl Regularity {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Regularity::Accept)
    }
}

/// A transversal crossing between two non-adjacent edges `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarCrossing {
    pub edge_a: usize,
    pub edge_b: usize,
    /// Parameters in (0, 1) along each edge.
    pub t_a: f64,
    pub t_b: f64,
    pub height_a: f64,
    pub height_b: f64,
    /// 2D determinant of the two edge direction vectors `(dir_a, dir_b)`.
    pub det: f64,
}

fn cross2(a: Point2, b: Point2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub2(a: Point2, b: Point2) -> Point2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm2(a: Point2) -> f64 {
    (a[0] * a[0] + a[1] * a[1]).sqrt()
}

fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = sub2(b, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len2).clamp(0.0, 1.0)
    };
    norm2(sub2(p, [a[0] + t * ab[0], a[1] + t * ab[1]]))
}

/// Finds every crossing of a projection, or the first reason it is not
/// regular. `eps` is relative to the bounding-box diagonal for distances and
/// absolute for the normalized-determinant angle test.
pub fn scan_crossings(p: &PlanarPolyline, eps: f64) -> Result<Vec<PlanarCrossing>, Irregularity> {
    let n = p.n_edges();
    let tol = eps * p.scale();
    for i in 0..n {
        let (a, b) = p.edge(i);
        if norm2(sub2(b, a)) <= tol {
            return Err(Irregularity::DegenerateEdge { edge: i });
        }
    }
    let mut found = Vec::new();
    for i in 0..n {
        let (p1, q1) = p.edge(i);
        let d1 = sub2(q1, p1);
        let l1 = norm2(d1);
        for j in i + 1..n {
            let (p2, q2) = p.edge(j);
            let d2 = sub2(q2, p2);
            let l2 = norm2(d2);
            let denom = cross2(d1, d2);
            let sin = denom.abs() / (l1 * l2);
            if p.are_adjacent(i, j) {
                // Shared vertex; reject only a fold-back onto the other edge.
                let dotp = d1[0] * d2[0] + d1[1] * d2[1];
                if sin < eps && dotp < 0.0 {
                    return Err(Irregularity::NearParallel { edge_a: i, edge_b: j });
                }
                continue;
            }
            if sin < eps {
                let gap = [
                    point_segment_distance(p1, p2, q2),
                    point_segment_distance(q1, p2, q2),
                    point_segment_distance(p2, p1, q1),
                    point_segment_distance(q2, p1, q1),
                ]
                .into_iter()
                .fold(f64::INFINITY, f64::min);
                if gap <= tol {
                    return Err(Irregularity::NearParallel { edge_a: i, edge_b: j });
                }
                continue;
            }
            let w = sub2(p2, p1);
            let t = cross2(w, d2) / denom;
            let s = cross2(w, d1) / denom;
            let (tol_t, tol_s) = (tol / l1, tol / l2);
            if t <= -tol_t || t >= 1.0 + tol_t || s <= -tol_s || s >= 1.0 + tol_s {
                continue;
            }
            if t <= tol_t || t >= 1.0 - tol_t || s <= tol_s || s >= 1.0 - tol_s {
                return Err(Irregularity::EndpointIncidence { edge_a: i, edge_b: j });
            }
            let (ha0, ha1) = p.edge_heights(i);
            let (hb0, hb1) = p.edge_heights(j);
            let height_a = ha0 + t * (ha1 - ha0);
            let height_b = hb0 + s * (hb1 - hb0);
            if (height_a - height_b).abs() <= tol {
                return Err(Irregularity::HeightTangency { edge_a: i, edge_b: j });
            }
            found.push(PlanarCrossing { edge_a: i, edge_b: j, t_a: t, t_b: s, height_a, height_b, det: denom });
        }
    }
    // Two crossings on one edge at (nearly) the same point.
    let mut per_edge: Vec<Vec<f64>> = vec![Vec::new(); n];
    for c in &found {
        per_edge[c.edge_a].push(c.t_a);
        per_edge[c.edge_b].push(c.t_b);
    }
    for (edge, ts) in per_edge.iter_mut().enumerate() {
        ts.sort_by(|x, y| x.total_cmp(y));
        let (a, b) = p.edge(edge);
        let len = norm2(sub2(b, a));
        if ts.windows(2).any(|w| (w[1] - w[0]) * len <= tol) {
            return Err(Irregularity::NearTriplePoint { edge });
        }
    }
    Ok(found)
}

pub fn check_regular(p: &PlanarPolyline, eps: f64) -> Regularity {
    match scan_crossings(p, eps) {
        Ok(_) => Regularity::Accept,
        Err(reason) => Regularity::Reject(reason),
    }
}
