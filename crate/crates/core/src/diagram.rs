//! Edge-indexed crossing matrices of a projected curve.
//!
//! Edge `i` joins vertex `i` to vertex `i + 1` (wrapping for closed curves).
//! Alongside the `cross`/`over`/`sign` matrices the diagram keeps, for every
//! edge, the order in which its crossings are met when walking the edge; the
//! state-sum engines need that order to know how strands connect.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{scan_crossings, Irregularity, PlanarPolyline, DEFAULT_EPS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiagramError {
    #[error("projection is not regular: {0}")]
    Irregular(Irregularity),
    #[error("inconsistent diagram: {0}")]
    Inconsistent(String),
}

/// One crossing, named by the edge passing over and the edge passing under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Crossing {
    pub over: usize,
    pub under: usize,
    pub sign: i8,
}

impl Crossing {
    /// The unordered edge pair, smaller index first.
    pub fn key(&self) -> (usize, usize) {
        (self.over.min(self.under), self.over.max(self.under))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    pub(crate) n_edges: usize,
    pub(crate) closed: bool,
    pub(crate) cross: Vec<Vec<bool>>,
    pub(crate) over: Vec<Vec<bool>>,
    pub(crate) sign: Vec<Vec<i8>>,
    /// Partner edges of each edge's crossings, in the order they are met.
    pub(crate) order: Vec<Vec<usize>>,
}

impl Diagram {
    /// A diagram with no crossings.
    pub fn empty(n_edges: usize, closed: bool) -> Self {
        Diagram {
            n_edges,
            closed,
            cross: vec![vec![false; n_edges]; n_edges],
            over: vec![vec![false; n_edges]; n_edges],
            sign: vec![vec![0; n_edges]; n_edges],
            order: vec![Vec::new(); n_edges],
        }
    }

    /// Assembles a diagram from combinatorial data. `order[e]` lists the
    /// partner edges of `e` in the order they are met along `e`.
    pub fn from_parts(
        n_edges: usize,
        closed: bool,
        crossings: &[Crossing],
        order: Vec<Vec<usize>>,
    ) -> Result<Self, DiagramError> {
        let mut d = Diagram::empty(n_edges, closed);
        for c in crossings {
            if c.over >= n_edges || c.under >= n_edges {
                return Err(DiagramError::Inconsistent(format!("edge out of range in {c:?}")));
            }
            if d.cross[c.over][c.under] {
                return Err(DiagramError::Inconsistent(format!("edges {:?} cross twice", c.key())));
            }
            d.insert_crossing(*c);
        }
        d.order = order;
        d.validate()?;
        Ok(d)
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn succ(&self, i: usize) -> Option<usize> {
        if self.closed {
            Some((i + 1) % self.n_edges)
        } else if i + 1 < self.n_edges {
            Some(i + 1)
        } else {
            None
        }
    }

    pub fn pred(&self, i: usize) -> Option<usize> {
        if self.closed {
            Some((i + self.n_edges - 1) % self.n_edges)
        } else {
            i.checked_sub(1)
        }
    }

    pub fn are_adjacent(&self, i: usize, j: usize) -> bool {
        self.succ(i) == Some(j) || self.succ(j) == Some(i)
    }

    pub fn crosses(&self, i: usize, j: usize) -> bool {
        self.cross[i][j]
    }

    pub fn is_over(&self, i: usize, j: usize) -> bool {
        self.over[i][j]
    }

    pub fn sign_of(&self, i: usize, j: usize) -> i8 {
        self.sign[i][j]
    }

    pub fn edge_order(&self, e: usize) -> &[usize] {
        &self.order[e]
    }

    pub fn cross_matrix(&self) -> &[Vec<bool>] {
        &self.cross
    }

    pub fn over_matrix(&self) -> &[Vec<bool>] {
        &self.over
    }

    pub fn sign_matrix(&self) -> &[Vec<i8>] {
        &self.sign
    }

    /// All crossings, sorted by their edge pair.
    pub fn crossings(&self) -> Vec<Crossing> {
        let mut out = Vec::new();
        for i in 0..self.n_edges {
            for j in i + 1..self.n_edges {
                if self.cross[i][j] {
                    let (over, under) = if self.over[i][j] { (i, j) } else { (j, i) };
                    out.push(Crossing { over, under, sign: self.sign[i][j] });
                }
            }
        }
        out
    }

    pub(crate) fn insert_crossing(&mut self, c: Crossing) {
        let (o, u) = (c.over, c.under);
        self.cross[o][u] = true;
        self.cross[u][o] = true;
        self.over[o][u] = true;
        self.over[u][o] = false;
        self.sign[o][u] = c.sign;
        self.sign[u][o] = c.sign;
    }

    /// Drops the crossing between edges `i` and `j` from the matrices and the
    /// per-edge order lists.
    pub(crate) fn remove_crossing(&mut self, i: usize, j: usize) {
        self.cross[i][j] = false;
        self.cross[j][i] = false;
        self.over[i][j] = false;
        self.over[j][i] = false;
        self.sign[i][j] = 0;
        self.sign[j][i] = 0;
        self.order[i].retain(|&k| k != j);
        self.order[j].retain(|&k| k != i);
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<(), DiagramError> {
        let n = self.n_edges;
        let bad = |msg: String| Err(DiagramError::Inconsistent(msg));
        if self.order.len() != n {
            return bad("order list length".into());
        }
        for i in 0..n {
            if self.cross[i][i] {
                return bad(format!("edge {i} crosses itself"));
            }
            for j in 0..n {
                if self.cross[i][j] != self.cross[j][i] || self.sign[i][j] != self.sign[j][i] {
                    return bad(format!("asymmetric entry at ({i}, {j})"));
                }
                if self.cross[i][j] {
                    if self.over[i][j] == self.over[j][i] {
                        return bad(format!("over/under undefined at ({i}, {j})"));
                    }
                    if self.sign[i][j] != 1 && self.sign[i][j] != -1 {
                        return bad(format!("sign at ({i}, {j}) is {}", self.sign[i][j]));
                    }
                    if self.are_adjacent(i, j) {
                        return bad(format!("adjacent edges {i} and {j} cross"));
                    }
                } else if self.over[i][j] || self.sign[i][j] != 0 {
                    return bad(format!("entry without crossing at ({i}, {j})"));
                }
            }
            let mut listed = self.order[i].clone();
            listed.sort_unstable();
            let expected: Vec<usize> = (0..n).filter(|&j| self.cross[i][j]).collect();
            if listed != expected {
                return bad(format!("order list of edge {i} does not match its crossings"));
            }
        }
        Ok(())
    }

    /// Mirror image: every crossing switches which strand is on top.
    pub fn mirrored(&self) -> Self {
        let mut d = self.clone();
        for i in 0..self.n_edges {
            for j in 0..self.n_edges {
                if self.cross[i][j] {
                    d.over[i][j] = !self.over[i][j];
                    d.sign[i][j] = -self.sign[i][j];
                }
            }
        }
        d
    }

    pub fn dump(&self) -> DiagramDump {
        DiagramDump {
            n_edges: self.n_edges,
            closed: self.closed,
            cross: self.cross.clone(),
            over: self.over.clone(),
            sign: self.sign.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.dump()).expect("plain data serializes")
    }
}

/// JSON debug form of a diagram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramDump {
    pub n_edges: usize,
    pub closed: bool,
    pub cross: Vec<Vec<bool>>,
    pub over: Vec<Vec<bool>>,
    pub sign: Vec<Vec<i8>>,
}

pub fn build_diagram(p: &PlanarPolyline) -> Result<Diagram, DiagramError> {
    build_diagram_with_eps(p, DEFAULT_EPS)
}

pub fn build_diagram_with_eps(p: &PlanarPolyline, eps: f64) -> Result<Diagram, DiagramError> {
    let found = scan_crossings(p, eps).map_err(DiagramError::Irregular)?;
    let mut d = Diagram::empty(p.n_edges(), p.closed);
    let mut along: Vec<Vec<(f64, usize)>> = vec![Vec::new(); d.n_edges];
    for c in &found {
        let a_over = c.height_a > c.height_b;
        let (over, under) = if a_over { (c.edge_a, c.edge_b) } else { (c.edge_b, c.edge_a) };
        // sign of det(over direction, under direction)
        let det = if a_over { c.det } else { -c.det };
        d.insert_crossing(Crossing { over, under, sign: if det > 0.0 { 1 } else { -1 } });
        along[c.edge_a].push((c.t_a, c.edge_b));
        along[c.edge_b].push((c.t_b, c.edge_a));
    }
    for (e, list) in along.iter_mut().enumerate() {
        list.sort_by(|x, y| x.0.total_cmp(&y.0));
        d.order[e] = list.iter().map(|&(_, j)| j).collect();
    }
    Ok(d)
}

/// Algebraic sum of the crossing signs.
pub fn writhe(d: &Diagram) -> i64 {
    d.crossings().iter().map(|c| c.sign as i64).sum()
}

pub fn crossing_count(d: &Diagram) -> usize {
    d.cross.iter().flatten().filter(|&&b| b).count() / 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{project, Curve3D, Direction};

    fn diagram_of(points: Vec<[f64; 3]>, closed: bool) -> Diagram {
        let c = Curve3D::new(points, closed).unwrap();
        build_diagram(&project(&c, &Direction::Z)).unwrap()
    }

    #[test]
    fn four_point_curve() {
        let d = diagram_of(vec![[0., 0., 0.], [1., 1., 0.], [1., 0., 1.], [0., 1., 1.]], false);
        assert!(d.crosses(0, 2) && d.crosses(2, 0));
        assert!(d.is_over(2, 0));
        assert!(!d.is_over(0, 2));
        assert_eq!(crossing_count(&d), 1);
        // over edge 2 runs (1,0)->(0,1), under edge 0 runs (0,0)->(1,1)
        // det((-1,1),(1,1)) = -2
        assert_eq!(d.sign_of(0, 2), -1);
        assert_eq!(writhe(&d), -1);
        assert!(d.validate().is_ok());
    }

    #[test]
    fn convex_hexagon_has_no_crossings() {
        let pts = (0..6)
            .map(|k| {
                let a = k as f64 * std::f64::consts::PI / 3.0;
                [a.cos(), a.sin(), 0.0]
            })
            .collect();
        let d = diagram_of(pts, true);
        assert_eq!(crossing_count(&d), 0);
        assert_eq!(writhe(&d), 0);
        assert!(d.cross_matrix().iter().flatten().all(|b| !b));
    }

    #[test]
    fn positive_crossing_of_reference_figure() {
        // Over strand runs (0,0)->(0.5,0.5); under strand runs (0.5,0)->(0,0.5).
        let d = diagram_of(
            vec![[0.5, 0., 0.], [0., 0.5, 0.], [-0.5, 1.0, 0.5], [0., 0., 1.], [0.5, 0.5, 1.]],
            false,
        );
        assert_eq!(crossing_count(&d), 1);
        assert!(d.is_over(3, 0));
        assert_eq!(writhe(&d), 1);
    }

    #[test]
    fn closed_successor_is_a_cycle() {
        let d = Diagram::empty(7, true);
        let mut e = 0;
        for _ in 0..7 {
            e = d.succ(e).unwrap();
        }
        assert_eq!(e, 0);
        let mut seen = [false; 7];
        let mut e = 0;
        for _ in 0..7 {
            seen[e] = true;
            e = d.succ(e).unwrap();
        }
        assert!(seen.iter().all(|&s| s));
        let open = Diagram::empty(4, false);
        assert_eq!(open.succ(3), None);
        assert_eq!(open.pred(0), None);
    }

    #[test]
    fn irregular_projection_is_refused() {
        let c = Curve3D::open(vec![[0., 0., 0.], [2., 2., 0.], [2., 0., 0.], [0., 2., 0.]]).unwrap();
        assert!(matches!(
            build_diagram(&project(&c, &Direction::Z)),
            Err(DiagramError::Irregular(Irregularity::HeightTangency { .. }))
        ));
    }

    #[test]
    fn json_dump_keys() {
        let d = diagram_of(vec![[0., 0., 0.], [1., 1., 0.], [1., 0., 1.], [0., 1., 1.]], false);
        let v: serde_json::Value = serde_json::from_str(&d.to_json()).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["closed", "cross", "n_edges", "over", "sign"]);
        assert_eq!(v["cross"][0][2], serde_json::Value::Bool(true));
        assert_eq!(v["sign"][2][0], serde_json::json!(-1));
        let back: DiagramDump = serde_json::from_value(v).unwrap();
        assert_eq!(back, d.dump());
    }

    #[test]
    fn from_parts_rejects_bad_data() {
        let bad = Diagram::from_parts(4, true, &[Crossing { over: 0, under: 1, sign: 1 }], vec![vec![1], vec![0], vec![], vec![]]);
        assert!(matches!(bad, Err(DiagramError::Inconsistent(_))));
        let bad_order = Diagram::from_parts(4, true, &[Crossing { over: 0, under: 2, sign: 1 }], vec![vec![], vec![], vec![0], vec![]]);
        assert!(bad_order.is_err());
        let ok = Diagram::from_parts(4, true, &[Crossing { over: 0, under: 2, sign: 1 }], vec![vec![2], vec![], vec![0], vec![]]);
        assert!(ok.is_ok());
    }
}
