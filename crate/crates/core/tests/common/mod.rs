#![allow(dead_code)]

use jones_core::diagram::{build_diagram, crossing_count, Diagram};
use jones_core::geometry::{project, random_directions, Curve3D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random polygon with `n` vertices in the unit cube.
pub fn random_curve(rng: &mut ChaCha8Rng, n: usize, closed: bool) -> Curve3D {
    let pts = (0..n).map(|_| [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()]).collect();
    Curve3D::new(pts, closed).unwrap()
}

/// Diagrams of random 8 to 14 vertex polygons, open and closed, projected
/// along random directions; irregular projections and diagrams with more than
/// `max_crossings` crossings are skipped.
pub fn corpus(seed: u64, count: usize, max_crossings: usize) -> Vec<(Curve3D, Diagram)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.random_range(8..=14);
        let closed = rng.random_bool(0.5);
        let curve = random_curve(&mut rng, n, closed);
        let dir = random_directions(1, rng.random()).unwrap()[0];
        if let Ok(d) = build_diagram(&project(&curve, &dir)) {
            if crossing_count(&d) <= max_crossings {
                out.push((curve, d));
            }
        }
    }
    out
}
