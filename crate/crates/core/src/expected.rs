//! Jones polynomial of a curve averaged over projection directions.
//!
//! Closed curves give the same polynomial from every regular projection, so
//! one direction suffices. Open curves give direction-dependent values; their
//! average over the sphere is the invariant, approximated here by a finite
//! direction set.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::bracket::{evaluate, BracketError, Engine, EngineOptions};
use crate::diagram::{build_diagram_with_eps, DiagramError};
use crate::geometry::{fibonacci_sphere, project, random_directions, Curve3D, Direction, GeometryError, Irregularity, DEFAULT_EPS};
use crate::laurent::{LaurentPoly, QuarterPoly};
use crate::par;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpectedError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Bracket(#[from] BracketError),
    #[error("all {n} projections were rejected as irregular; first reason: {first}")]
    AllRejected { n: usize, first: Irregularity },
    #[error("an explicit direction gives a single projection, but {0} were requested")]
    ExplicitWithMany(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirectionSource {
    /// Fibonacci lattice on the sphere (the single direction `(0, 0, 1)` for
    /// `n = 1`).
    Fibonacci,
    /// Independent uniform directions from a seeded generator.
    Seeded(u64),
    Explicit(Direction),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedOptions {
    pub directions: DirectionSource,
    pub engine: Engine,
    pub engine_options: EngineOptions,
    /// Regularity tolerance, see [`crate::geometry::scan_crossings`].
    pub eps: f64,
}

impl Default for ExpectedOptions {
    fn default() -> Self {
        ExpectedOptions {
            directions: DirectionSource::Fibonacci,
            engine: Engine::Split,
            engine_options: EngineOptions::default(),
            eps: DEFAULT_EPS,
        }
    }
}

/// What happened to one projection direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Accepted { crossings: usize, evaluated_crossings: usize, writhe: i64 },
    Rejected { reason: Irregularity },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionRecord {
    pub direction: [f64; 3],
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedJonesResult {
    /// Average in `t`.
    pub poly_t: QuarterPoly,
    /// Average in `A`, before substituting `A = t^(-1/4)`.
    pub poly_a: LaurentPoly,
    pub n_requested: usize,
    pub n_accepted: usize,
    /// One record per requested direction, in direction order.
    pub projections: Vec<ProjectionRecord>,
    /// Wall time of the polynomial computation.
    pub elapsed: Duration,
}

impl ExpectedJonesResult {
    pub fn rejected_reasons(&self) -> impl Iterator<Item = (&[f64; 3], &Irregularity)> + '_ {
        self.projections.iter().filter_map(|p| match &p.verdict {
            Verdict::Rejected { reason } => Some((&p.direction, reason)),
            Verdict::Accepted { .. } => None,
        })
    }
}

/// The `n` directions a source yields.
pub fn directions(source: DirectionSource, n: usize) -> Result<Vec<Direction>, ExpectedError> {
    match source {
        DirectionSource::Fibonacci => Ok(fibonacci_sphere(n)?),
        DirectionSource::Seeded(seed) => Ok(random_directions(n, seed)?),
        DirectionSource::Explicit(d) if n == 1 => Ok(vec![d]),
        DirectionSource::Explicit(_) => Err(ExpectedError::ExplicitWithMany(n)),
    }
}

pub fn expected_jones(curve: &Curve3D, n: usize, opts: &ExpectedOptions) -> Result<ExpectedJonesResult, ExpectedError> {
    let dirs = directions(opts.directions, n)?;
    expected_jones_over(curve, &dirs, opts)
}

/// Averages over the given directions. Each direction is evaluated
/// independently; the sum is formed in direction order.
pub fn expected_jones_over(curve: &Curve3D, dirs: &[Direction], opts: &ExpectedOptions) -> Result<ExpectedJonesResult, ExpectedError> {
    if dirs.is_empty() {
        return Err(GeometryError::NoDirections.into());
    }
    let start = Instant::now();
    let outcomes = par::map_ordered(opts.engine_options.parallelism, dirs, |dir| {
        let planar = project(curve, dir);
        match build_diagram_with_eps(&planar, opts.eps) {
            Err(DiagramError::Irregular(reason)) => Ok((Verdict::Rejected { reason }, None)),
            Err(DiagramError::Inconsistent(msg)) => unreachable!("built diagrams are consistent: {msg}"),
            Ok(d) => {
                let ev = evaluate(&d, opts.engine, &opts.engine_options)?;
                let verdict = Verdict::Accepted {
                    crossings: ev.crossings,
                    evaluated_crossings: ev.evaluated_crossings,
                    writhe: ev.writhe,
                };
                Ok((verdict, Some(ev.poly)))
            }
        }
    });
    let mut sum = LaurentPoly::zero();
    let mut n_accepted = 0usize;
    let mut projections = Vec::with_capacity(dirs.len());
    for (dir, outcome) in dirs.iter().zip(outcomes) {
        let (verdict, poly) = outcome.map_err(ExpectedError::Bracket)?;
        if let Some(p) = poly {
            sum = sum + p;
            n_accepted += 1;
        }
        projections.push(ProjectionRecord { direction: dir.vector(), verdict });
    }
    if n_accepted == 0 {
        let first = match &projections[0].verdict {
            Verdict::Rejected { reason } => *reason,
            Verdict::Accepted { .. } => unreachable!("no projection was accepted"),
        };
        return Err(ExpectedError::AllRejected { n: dirs.len(), first });
    }
    let poly_a = sum
        .divide(&BigRational::from_integer(BigInt::from(n_accepted)))
        .expect("non-zero divisor");
    let elapsed = start.elapsed();
    Ok(ExpectedJonesResult {
        poly_t: poly_a.to_t(),
        poly_a,
        n_requested: dirs.len(),
        n_accepted,
        projections,
        elapsed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::trefoil_points;

    fn trefoil_t() -> [QuarterPoly; 2] {
        let j = QuarterPoly::from_int_terms(&[(-4, -1), (-3, 1), (-1, 1)]);
        [j.clone(), j.invert_variable()]
    }

    #[test]
    fn straight_line_is_one() {
        let c = Curve3D::open((0..5).map(|i| [i as f64, 0.5 * i as f64, 0.25 * i as f64]).collect()).unwrap();
        let r = expected_jones(&c, 10, &ExpectedOptions::default()).unwrap();
        assert_eq!(r.poly_t, QuarterPoly::from_int_terms(&[(0, 1)]));
        assert_eq!((r.n_requested, r.n_accepted), (10, 10));
    }

    #[test]
    fn closed_trefoil_average_is_exact() {
        let c = Curve3D::closed(trefoil_points(60)).unwrap();
        let r = expected_jones(&c, 5, &ExpectedOptions::default()).unwrap();
        assert!(r.n_accepted >= 1);
        assert!(trefoil_t().contains(&r.poly_t), "{}", r.poly_t);
    }

    #[test]
    fn explicit_direction_is_single() {
        let c = Curve3D::closed(trefoil_points(30)).unwrap();
        let opts = ExpectedOptions { directions: DirectionSource::Explicit(Direction::Z), ..Default::default() };
        assert_eq!(expected_jones(&c, 3, &opts).unwrap_err(), ExpectedError::ExplicitWithMany(3));
        let r = expected_jones(&c, 1, &opts).unwrap();
        assert_eq!(r.projections[0].direction, [0.0, 0.0, 1.0]);
    }

    #[test]
    fn all_rejected_is_an_error() {
        // every edge vertical: the projection along z collapses each edge
        let c = Curve3D::open(vec![[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 3.0]]).unwrap();
        let opts = ExpectedOptions { directions: DirectionSource::Explicit(Direction::Z), ..Default::default() };
        assert!(matches!(
            expected_jones(&c, 1, &opts).unwrap_err(),
            ExpectedError::AllRejected { n: 1, first: Irregularity::DegenerateEdge { .. } }
        ));
    }

    #[test]
    fn seeded_runs_repeat() {
        let mut pts = trefoil_points(24);
        pts.pop();
        let c = Curve3D::open(pts).unwrap();
        let opts = ExpectedOptions { directions: DirectionSource::Seeded(5), ..Default::default() };
        let a = expected_jones(&c, 12, &opts).unwrap();
        let b = expected_jones(&c, 12, &opts).unwrap();
        assert_eq!((a.poly_a, a.projections), (b.poly_a, b.projections));
    }

    #[test]
    fn average_lies_between_projection_values() {
        let mut pts = trefoil_points(24);
        pts.truncate(20);
        let c = Curve3D::open(pts).unwrap();
        let dirs = fibonacci_sphere(16).unwrap();
        let opts = ExpectedOptions::default();
        let avg = expected_jones_over(&c, &dirs, &opts).unwrap();
        let singles: Vec<LaurentPoly> = dirs
            .iter()
            .filter_map(|d| expected_jones_over(&c, std::slice::from_ref(d), &opts).ok())
            .map(|r| r.poly_a)
            .collect();
        assert_eq!(singles.len(), avg.n_accepted);
        let exps: std::collections::BTreeSet<i64> =
            singles.iter().chain([&avg.poly_a]).flat_map(|p| p.terms().map(|(e, _)| e).collect::<Vec<_>>()).collect();
        for e in exps {
            let cs: Vec<BigRational> = singles.iter().map(|p| p.coeff(e)).collect();
            let (lo, hi) = (cs.iter().min().unwrap(), cs.iter().max().unwrap());
            let c = avg.poly_a.coeff(e);
            assert!(&c >= lo && &c <= hi);
        }
    }
}
