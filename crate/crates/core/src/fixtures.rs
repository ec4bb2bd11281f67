//! Hand-built curves with known knot types, used by tests, benches and the
//! examples in the documentation.

use std::f64::consts::TAU;

use crate::geometry::{Curve3D, Point3};

fn sample(n: usize, f: impl Fn(f64) -> Point3) -> Vec<Point3> {
    (0..n).map(|i| f(TAU * i as f64 / n as f64)).collect()
}

/// Regular planar decagon (unknot).
pub fn decagon() -> Curve3D {
    Curve3D::closed(sample(10, |t| [t.cos(), t.sin(), 0.0])).expect("valid polygon")
}

/// `n` samples of the trefoil `(sin t + 2 sin 2t, cos t - 2 cos 2t, -sin 3t)`.
pub fn trefoil_points(n: usize) -> Vec<Point3> {
    sample(n, |t| [t.sin() + 2.0 * (2.0 * t).sin(), t.cos() - 2.0 * (2.0 * t).cos(), -(3.0 * t).sin()])
}

pub fn trefoil(n: usize) -> Curve3D {
    Curve3D::closed(trefoil_points(n)).expect("valid polygon")
}

/// `n` samples of the figure-eight knot
/// `((2 + cos 2t) cos 3t, (2 + cos 2t) sin 3t, sin 4t)`.
pub fn figure_eight_points(n: usize) -> Vec<Point3> {
    sample(n, |t| {
        let r = 2.0 + (2.0 * t).cos();
        [r * (3.0 * t).cos(), r * (3.0 * t).sin(), (4.0 * t).sin()]
    })
}

pub fn figure_eight(n: usize) -> Curve3D {
    Curve3D::closed(figure_eight_points(n)).expect("valid polygon")
}

/// Closed curve whose `(0, 0, 1)` projection is a single kink.
pub fn kink() -> Curve3D {
    Curve3D::closed(vec![[0.5, 0.0, 0.0], [0.0, 0.5, 0.0], [-0.5, 1.0, 0.5], [0.0, 0.0, 1.0], [0.5, 0.5, 1.0]])
        .expect("valid polygon")
}

/// Open curve whose `(0, 0, 1)` projection is one strand pushed under
/// another, two crossings.
pub fn poke() -> Curve3D {
    Curve3D::open(vec![[0.0, 0.0, 1.0], [4.0, 0.0, 1.0], [4.0, 3.0, 1.0], [1.5, 3.0, 0.0], [2.0, -1.0, 0.0], [2.5, 2.5, 0.0]])
        .expect("valid polygon")
}

/// A kink followed by a poke, three crossings under `(0, 0, 1)`.
pub fn kink_and_poke() -> Curve3D {
    Curve3D::open(vec![
        [-6.0, 0.2, 0.0],
        [-3.0, 0.0, 0.0],
        [-4.0, 1.0, 0.5],
        [-4.5, -1.0, 1.0],
        [0.0, 0.0, 1.0],
        [4.0, 0.0, 1.0],
        [4.0, 3.0, 1.0],
        [1.5, 3.0, 0.0],
        [2.0, -1.0, 0.0],
        [2.5, 2.5, 0.0],
    ])
    .expect("valid polygon")
}

/// Three strands bounding a triangle under `(0, 0, 1)`, the top strand
/// passing over both others. The top and middle strands are bent so that
/// each of their two crossings sits on a different edge.
pub fn triangle() -> Curve3D {
    Curve3D::open(vec![
        [-1.0, 1.0, 2.0],
        [2.0, 1.1, 2.0],
        [5.0, 1.0, 2.0],
        [4.0, 0.0, 0.0],
        [2.5, 1.5, 0.0],
        [0.0, 4.0, 0.0],
        [4.0, 4.0, 1.0],
        [1.5, 1.5, 1.0],
        [0.0, 0.0, 1.0],
    ])
    .expect("valid polygon")
}
