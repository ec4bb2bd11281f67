//! Crossing-reducing Reidemeister moves on diagrams.
//!
//! Moves are found on the sequence of crossing visits in curve order. Every
//! candidate is also checked locally before it is applied: the bracket of the
//! affected region, taken per pairing of the region's boundary points and
//! normalized by the region's writhe, must be the same before and after the
//! move. A candidate failing the check is skipped.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagram::{Crossing, Diagram};
use crate::laurent::{delta_power, writhe_factor, LaurentPoly};
use crate::tangle::{smoothing_pairs, PortGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    Rm1,
    Rm2,
    Rm3,
}

/// Pipeline applied by [`simplify`].
pub const DEFAULT_SEQUENCE: [Move; 5] = [Move::Rm1, Move::Rm2, Move::Rm3, Move::Rm1, Move::Rm2];

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Move::Rm1 => "RM1",
            Move::Rm2 => "RM2",
            Move::Rm3 => "RM3",
        })
    }
}

impl FromStr for Move {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rm1" | "1" => Ok(Move::Rm1),
            "rm2" | "2" => Ok(Move::Rm2),
            "rm3" | "3" => Ok(Move::Rm3),
            other => Err(format!("unknown move `{other}` (expected RM1, RM2 or RM3)")),
        }
    }
}

/// Parses a comma-separated move list such as `RM1,RM2,RM3`. An empty
/// string is the empty sequence.
pub fn parse_sequence(s: &str) -> Result<Vec<Move>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(str::parse).collect()
}

pub fn apply(d: &Diagram, m: Move) -> Diagram {
    match m {
        Move::Rm1 => rm1(d),
        Move::Rm2 => rm2(d),
        Move::Rm3 => rm3(d),
    }
}

/// RM1, RM2, RM3, RM1, RM2.
pub fn simplify(d: &Diagram) -> Diagram {
    simplify_with(d, &DEFAULT_SEQUENCE)
}

pub fn simplify_with(d: &Diagram, sequence: &[Move]) -> Diagram {
    sequence.iter().fold(d.clone(), |cur, &m| apply(&cur, m))
}

/// Removes kinks until none is left.
pub fn rm1(d: &Diagram) -> Diagram {
    let mut cur = d.clone();
    while let Some(next) = rm1_step(&cur) {
        cur = next;
    }
    cur
}

/// Removes pokes until none is left.
pub fn rm2(d: &Diagram) -> Diagram {
    let mut cur = d.clone();
    while let Some(next) = rm2_step(&cur) {
        cur = next;
    }
    cur
}

/// Performs at most one triangle slide.
pub fn rm3(d: &Diagram) -> Diagram {
    rm3_step(d).unwrap_or_else(|| d.clone())
}

/// Crossing visits in curve order as `(edge, partner edge)`.
struct Visits {
    seq: Vec<(usize, usize)>,
    at: HashMap<(usize, usize), [usize; 2]>,
    closed: bool,
}

impl Visits {
    fn of(d: &Diagram) -> Self {
        let mut seq = Vec::new();
        let mut at: HashMap<(usize, usize), [usize; 2]> = HashMap::new();
        for e in 0..d.n_edges() {
            for &p in d.edge_order(e) {
                let key = (e.min(p), e.max(p));
                at.entry(key).or_insert([usize::MAX; 2])[usize::from(e > p)] = seq.len();
                seq.push((e, p));
            }
        }
        Visits { seq, at, closed: d.is_closed() }
    }

    fn len(&self) -> usize {
        self.seq.len()
    }

    fn next(&self, i: usize) -> Option<usize> {
        if i + 1 < self.len() {
            Some(i + 1)
        } else if self.closed {
            Some(0)
        } else {
            None
        }
    }

    fn prev(&self, i: usize) -> Option<usize> {
        if i > 0 {
            Some(i - 1)
        } else if self.closed {
            Some(self.len() - 1)
        } else {
            None
        }
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && (self.next(i) == Some(j) || self.prev(i) == Some(j))
    }

    fn key(&self, i: usize) -> (usize, usize) {
        let (e, p) = self.seq[i];
        (e.min(p), e.max(p))
    }

    fn other(&self, i: usize) -> usize {
        let [a, b] = self.at[&self.key(i)];
        if a == i {
            b
        } else {
            a
        }
    }
}

fn sorted_keys(d: &Diagram) -> Vec<(usize, usize)> {
    d.crossings().iter().map(Crossing::key).collect()
}

fn rm1_step(d: &Diagram) -> Option<Diagram> {
    let v = Visits::of(d);
    for key in sorted_keys(d) {
        let [p, q] = v.at[&key];
        if !v.adjacent(p, q) {
            continue;
        }
        let mut after = d.clone();
        after.remove_crossing(key.0, key.1);
        if locally_equivalent(d, &after, &[key], &[]) {
            return Some(after);
        }
    }
    None
}

fn rm2_step(d: &Diagram) -> Option<Diagram> {
    let v = Visits::of(d);
    let keys = sorted_keys(d);
    for (ix, &x) in keys.iter().enumerate() {
        for &y in &keys[ix + 1..] {
            if d.sign_of(x.0, x.1) == d.sign_of(y.0, y.1) {
                continue;
            }
            let [p1, p2] = v.at[&x];
            let [q1, q2] = v.at[&y];
            let matched = [(q1, q2), (q2, q1)].into_iter().any(|(a, b)| {
                v.adjacent(p1, a) && v.adjacent(p2, b) && same_level(d, &v, p1, a) && same_level(d, &v, p2, b)
            });
            if !matched {
                continue;
            }
            let mut after = d.clone();
            after.remove_crossing(x.0, x.1);
            after.remove_crossing(y.0, y.1);
            if locally_equivalent(d, &after, &[x, y], &[]) {
                return Some(after);
            }
        }
    }
    None
}

fn is_over_visit(d: &Diagram, v: &Visits, i: usize) -> bool {
    let (e, p) = v.seq[i];
    d.is_over(e, p)
}

fn same_level(d: &Diagram, v: &Visits, i: usize, j: usize) -> bool {
    is_over_visit(d, v, i) == is_over_visit(d, v, j)
}

/// A triangle slide candidate. The sliding piece runs from visit `i` to
/// visit `i + 1`; `j1`/`j2` are the other visits of those two crossings, and
/// `n1`/`m` the visits of the third crossing next to them.
struct Triangle {
    i: usize,
    i2: usize,
    j1: usize,
    j2: usize,
    n1: usize,
    m: usize,
}

type Key = (usize, usize);

fn triangles(d: &Diagram, v: &Visits) -> Vec<(Key, Key, Key, Triangle)> {
    let mut out = Vec::new();
    for i in 0..v.len() {
        let Some(i2) = v.next(i) else { continue };
        let (c1, c2) = (v.key(i), v.key(i2));
        if c1 == c2 || !same_level(d, v, i, i2) {
            continue;
        }
        let (j1, j2) = (v.other(i), v.other(i2));
        for n1 in [v.prev(j1), v.next(j1)].into_iter().flatten() {
            let c3 = v.key(n1);
            if c3 == c1 || c3 == c2 {
                continue;
            }
            let m = v.other(n1);
            if !v.adjacent(m, j2) {
                continue;
            }
            out.push((c1, c2, c3, Triangle { i, i2, j1, j2, n1, m }));
        }
    }
    out.sort_by_key(|t| {
        let mut k = [t.0, t.1, t.2];
        k.sort_unstable();
        (k, t.3.i)
    });
    out
}

fn rm3_step(d: &Diagram) -> Option<Diagram> {
    let v = Visits::of(d);
    for (c1, c2, c3, t) in triangles(d, &v) {
        if let Some(after) = slide(d, &v, &t) {
            let new_keys = {
                let (xa, _) = v.seq[t.i];
                let (xb, _) = v.seq[t.i2];
                let (yc, zc) = v.seq[t.n1];
                [(xb.min(yc), xb.max(yc)), (xa.min(zc), xa.max(zc)), c3]
            };
            if locally_equivalent(d, &after, &[c1, c2, c3], &new_keys) {
                return Some(after);
            }
        }
    }
    None
}

/// Moves the sliding piece across the third crossing. The crossing of the
/// slider with each other strand moves to that strand's edge at the third
/// crossing, on its far side, and the order along the slider swaps.
fn slide(d: &Diagram, v: &Visits, t: &Triangle) -> Option<Diagram> {
    let (xa, ya) = v.seq[t.i];
    let (xb, zb) = v.seq[t.i2];
    let (yc, zc) = v.seq[t.n1];
    let x_over = d.is_over(xa, ya);
    let (s1, s2) = (d.sign_of(xa, ya), d.sign_of(xb, zb));

    let mut after = d.clone();
    for (a, b) in [(xa, ya), (xb, zb)] {
        after.cross[a][b] = false;
        after.cross[b][a] = false;
        after.over[a][b] = false;
        after.over[b][a] = false;
        after.sign[a][b] = 0;
        after.sign[b][a] = 0;
    }
    for (a, b) in [(xb, yc), (xa, zc)] {
        if a == b || after.are_adjacent(a, b) || after.cross[a][b] {
            return None;
        }
    }
    let place = |x: usize, other: usize, sign: i8| {
        let (over, under) = if x_over { (x, other) } else { (other, x) };
        Crossing { over, under, sign }
    };
    after.insert_crossing(place(xb, yc, s1));
    after.insert_crossing(place(xa, zc, s2));

    let y_forward = v.next(t.j1) == Some(t.n1);
    let z_forward = v.next(t.j2) == Some(t.m);
    let mut seq = Vec::with_capacity(v.len());
    for p in 0..v.len() {
        if p == t.j1 || p == t.j2 {
            continue;
        }
        let mut before = Vec::new();
        let mut behind = Vec::new();
        if p == t.n1 {
            if y_forward { &mut behind } else { &mut before }.push((yc, xb));
        }
        if p == t.m {
            if z_forward { &mut behind } else { &mut before }.push((zc, xa));
        }
        let visit = if p == t.i {
            (xa, zc)
        } else if p == t.i2 {
            (xb, yc)
        } else {
            v.seq[p]
        };
        seq.extend(before);
        seq.push(visit);
        seq.extend(behind);
    }
    for list in after.order.iter_mut() {
        list.clear();
    }
    for (e, p) in seq {
        after.order[e].push(p);
    }
    after.validate().ok()?;
    Some(after)
}

/// Boundary point of a region, named independently of crossing numbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum PortName {
    Port { key: (usize, usize), kind: usize },
    Start,
    End,
}

/// Region bracket per boundary pairing. Labels are indices into the sorted
/// boundary set.
type LocalValue = BTreeMap<Vec<(usize, usize)>, LaurentPoly>;

fn port_name(g: &PortGraph, port: usize) -> PortName {
    let k = g.crossings.len();
    if !g.closed && port == 4 * k {
        PortName::Start
    } else if !g.closed && port == 4 * k + 1 {
        PortName::End
    } else {
        PortName::Port { key: g.crossings[port / 4].key(), kind: port % 4 }
    }
}

/// Local graph of a region: for every region port its piece neighbour, and
/// for every boundary label its piece neighbour.
struct Local {
    /// Region crossings as indices into the port graph.
    region: Vec<usize>,
    writhe: i64,
    /// Neighbour of local port `4 * r + kind` along its piece.
    port_link: Vec<Node>,
    /// Neighbour of each label along its piece.
    label_link: Vec<Node>,
    signs: Vec<i8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Port(usize),
    Label(usize),
}

/// Builds the local graph. With `boundary` given, labels must match it
/// exactly; otherwise the boundary is read off the region.
fn local_graph(d: &Diagram, keys: &[(usize, usize)], boundary: Option<&[PortName]>) -> Option<(Local, Vec<PortName>)> {
    let g = PortGraph::from_diagram(d);
    let mut region = Vec::with_capacity(keys.len());
    for key in keys {
        region.push(g.crossings.iter().position(|c| c.key() == *key)?);
    }
    let local_of = |port: usize| -> Option<usize> {
        if port >= 4 * g.crossings.len() {
            return None;
        }
        region.iter().position(|&c| c == port / 4).map(|r| 4 * r + port % 4)
    };
    let labels: Vec<PortName> = match boundary {
        Some(b) => b.to_vec(),
        None => {
            let mut set = BTreeSet::new();
            for &c in &region {
                for kind in 0..4 {
                    let q = g.piece_partner(4 * c + kind);
                    if local_of(q).is_none() {
                        set.insert(port_name(&g, q));
                    }
                }
            }
            set.into_iter().collect()
        }
    };
    let label_index: BTreeMap<PortName, usize> = labels.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let by_name: HashMap<PortName, usize> = (0..g.n_ports()).map(|p| (port_name(&g, p), p)).collect();
    let node_of = |port: usize| -> Option<Node> {
        match local_of(port) {
            Some(l) => Some(Node::Port(l)),
            None => label_index.get(&port_name(&g, port)).map(|&i| Node::Label(i)),
        }
    };
    let mut port_link = Vec::with_capacity(4 * region.len());
    for &c in &region {
        for kind in 0..4 {
            port_link.push(node_of(g.piece_partner(4 * c + kind))?);
        }
    }
    let mut label_link = Vec::with_capacity(labels.len());
    for name in &labels {
        let port = *by_name.get(name)?;
        label_link.push(node_of(g.piece_partner(port))?);
    }
    // links must be symmetric
    for (i, n) in label_link.iter().enumerate() {
        let back = match *n {
            Node::Port(l) => port_link[l],
            Node::Label(j) => label_link[j],
        };
        if back != Node::Label(i) {
            return None;
        }
    }
    let signs: Vec<i8> = region.iter().map(|&c| g.crossings[c].sign).collect();
    let writhe = signs.iter().map(|&s| s as i64).sum();
    Some((Local { region, writhe, port_link, label_link, signs }, labels))
}

fn local_value(l: &Local, closed_without_boundary: bool) -> LocalValue {
    let r = l.region.len();
    let mut out = LocalValue::new();
    if r == 0 && l.label_link.is_empty() {
        // the whole curve is one crossing-free loop
        if closed_without_boundary {
            out.insert(Vec::new(), delta_power(1).expect("positive power"));
        }
        return out;
    }
    let mut smooth = vec![0usize; 4 * r];
    for state in 0u32..1 << r {
        for (i, &sign) in l.signs.iter().enumerate() {
            for (p, q) in smoothing_pairs(sign, state >> i & 1 == 0) {
                smooth[4 * i + p] = 4 * i + q;
                smooth[4 * i + q] = 4 * i + p;
            }
        }
        let mut seen = vec![false; 4 * r];
        let mut pairs = Vec::new();
        for start in 0..l.label_link.len() {
            let mut node = l.label_link[start];
            let end = loop {
                match node {
                    Node::Label(j) => break j,
                    Node::Port(p) => {
                        let q = smooth[p];
                        seen[p] = true;
                        seen[q] = true;
                        node = l.port_link[q];
                    }
                }
            };
            if start < end {
                pairs.push((start, end));
            }
        }
        let mut loops = 0i64;
        for s in 0..4 * r {
            if seen[s] {
                continue;
            }
            let mut p = s;
            while !seen[p] {
                seen[p] = true;
                let q = smooth[p];
                seen[q] = true;
                match l.port_link[q] {
                    Node::Port(next) => p = next,
                    Node::Label(_) => unreachable!("labels are reached only from labels"),
                }
            }
            loops += 1;
        }
        let a_exp = r as i64 - 2 * state.count_ones() as i64;
        let term = &LaurentPoly::int_monomial(a_exp, 1) * &delta_power(loops).expect("non-negative power");
        let slot = out.entry(pairs).or_insert_with(LaurentPoly::zero);
        *slot = &*slot + &term;
    }
    let w = writhe_factor(l.writhe);
    out.into_iter()
        .map(|(k, v)| (k, &w * &v))
        .filter(|(_, v)| !v.is_zero())
        .collect()
}

/// Whether replacing the crossings `before_keys` of `before` by the crossings
/// `after_keys` of `after` leaves the Jones polynomial unchanged, judged on
/// the region alone.
fn locally_equivalent(before: &Diagram, after: &Diagram, before_keys: &[(usize, usize)], after_keys: &[(usize, usize)]) -> bool {
    let Some((lb, labels)) = local_graph(before, before_keys, None) else {
        return false;
    };
    let Some((la, _)) = local_graph(after, after_keys, Some(&labels)) else {
        return false;
    };
    let whole = labels.is_empty() && before.is_closed();
    local_value(&lb, whole) == local_value(&la, whole)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::{jones_of_diagram, Engine};
    use crate::diagram::{build_diagram, crossing_count, writhe};
    use crate::fixtures;
    use crate::geometry::{project, Curve3D, Direction};

    fn jones(d: &Diagram) -> LaurentPoly {
        jones_of_diagram(d, Engine::Oracle).unwrap()
    }

    fn trefoil() -> Diagram {
        let crossings = [
            Crossing { over: 0, under: 3, sign: 1 },
            Crossing { over: 4, under: 1, sign: 1 },
            Crossing { over: 2, under: 5, sign: 1 },
        ];
        Diagram::from_parts(6, true, &crossings, (0..6).map(|e| vec![(e + 3) % 6]).collect()).unwrap()
    }

    fn fixture(c: Curve3D) -> Diagram {
        build_diagram(&project(&c, &Direction::Z)).unwrap()
    }

    fn kink() -> Diagram {
        fixture(fixtures::kink())
    }

    fn poke() -> Diagram {
        fixture(fixtures::poke())
    }

    fn kink_and_poke() -> Diagram {
        fixture(fixtures::kink_and_poke())
    }

    fn triangle() -> Diagram {
        fixture(fixtures::triangle())
    }

    #[test]
    fn parses_sequences() {
        assert_eq!(parse_sequence("RM1,rm2, 3").unwrap(), vec![Move::Rm1, Move::Rm2, Move::Rm3]);
        assert_eq!(parse_sequence("").unwrap(), vec![]);
        assert!(parse_sequence("RM4").is_err());
        assert_eq!(Move::Rm2.to_string().parse::<Move>().unwrap(), Move::Rm2);
    }

    #[test]
    fn rm1_removes_kink() {
        let d = kink();
        assert_eq!(crossing_count(&d), 1);
        let out = rm1(&d);
        assert_eq!(crossing_count(&out), 0);
        assert_eq!(writhe(&d) - writhe(&out), d.crossings()[0].sign as i64);
        assert_eq!(jones(&out), jones(&d));
        let open = kink().clone();
        assert_eq!(crossing_count(&rm1(&Diagram { closed: false, ..open })), 0);
    }

    #[test]
    fn trefoil_is_left_alone() {
        let t = trefoil();
        assert_eq!(rm1(&t), t);
        assert_eq!(rm2(&t), t);
        assert_eq!(rm3(&t), t);
        assert_eq!(simplify(&t), t);
    }

    #[test]
    fn empty_diagram_is_left_alone() {
        let d = Diagram::empty(6, true);
        for m in [Move::Rm1, Move::Rm2, Move::Rm3] {
            assert_eq!(apply(&d, m), d);
        }
    }

    #[test]
    fn rm2_removes_poke() {
        let d = poke();
        assert_eq!(crossing_count(&d), 2);
        assert_eq!(rm1(&d), d);
        let out = rm2(&d);
        assert_eq!(crossing_count(&out), 0);
        assert_eq!(writhe(&out), writhe(&d));
        assert_eq!(jones(&out), jones(&d));
    }

    #[test]
    fn rm2_needs_same_strand_over() {
        // switch one crossing of the poke: no longer removable
        let mut d = poke();
        let c = d.crossings()[0];
        d.remove_crossing(c.over, c.under);
        let order = d.order.clone();
        d.insert_crossing(Crossing { over: c.under, under: c.over, sign: -c.sign });
        d.order = order;
        d.order[c.over].push(c.under);
        d.order[c.under].push(c.over);
        d.order[c.over].sort_unstable();
        d.order[c.under].sort_unstable();
        d.validate().unwrap();
        assert_eq!(crossing_count(&rm2(&d)), 2);
    }

    #[test]
    fn kink_and_poke_simplify_to_nothing() {
        let d = kink_and_poke();
        assert_eq!(crossing_count(&d), 3);
        let out = simplify(&d);
        assert_eq!(crossing_count(&out), 0);
        assert_eq!(jones(&out), jones(&d));
    }

    #[test]
    fn rm3_slides_triangle() {
        let d = triangle();
        assert_eq!(crossing_count(&d), 3);
        let out = rm3(&d);
        assert_eq!(crossing_count(&out), 3);
        let keys = |d: &Diagram| d.crossings().iter().map(Crossing::key).collect::<Vec<_>>();
        assert_ne!(keys(&out), keys(&d));
        assert_eq!(writhe(&out), writhe(&d));
        assert_eq!(jones(&out), jones(&d));
    }

    #[test]
    fn rm3_requires_slider_over_or_under_both() {
        // make the three strands overlap cyclically, so no strand is over
        // or under both others
        let d = triangle();
        let c = d.crossings().into_iter().find(|c| c.key() == (1, 3)).unwrap();
        let mut alt = d.clone();
        alt.over[c.over][c.under] = false;
        alt.over[c.under][c.over] = true;
        alt.sign[c.over][c.under] = -c.sign;
        alt.sign[c.under][c.over] = -c.sign;
        alt.validate().unwrap();
        assert_eq!(rm3(&alt), alt);
    }

    #[test]
    fn moves_are_idempotent_at_fixpoint() {
        for d in [kink(), poke(), kink_and_poke(), triangle(), trefoil()] {
            let a = rm1(&d);
            assert_eq!(rm1(&a), a);
            let b = rm2(&d);
            assert_eq!(rm2(&b), b);
        }
    }

    #[test]
    fn local_check_rejects_a_wrong_removal() {
        // dropping one crossing of the trefoil is not a Reidemeister move
        let t = trefoil();
        let mut after = t.clone();
        after.remove_crossing(0, 3);
        assert!(!locally_equivalent(&t, &after, &[(0, 3)], &[]));
    }
}
