//! Kauffman bracket and Jones polynomial of a diagram.
//!
//! Two independent routes compute the bracket:
//!
//! * [`bracket_oracle`] enumerates all `2^n` smoothing states of the whole
//!   diagram and counts components directly;
//! * [`split`] cuts the diagram into two sub-tangles, [`partial_poly`]
//!   enumerates each one's states as (A-exponent, endpoint pairing) terms on
//!   two concurrent workers, and [`glue`] recombines every pair of terms by
//!   merging their pairings and counting components.
//!
//! Both return `sum_states A^a d^(components - 1)` with `d = -A^2 - A^-2`.
//! An open curve's single open component counts like any other component.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{crossing_count, writhe, Diagram};
use crate::laurent::{delta_power, writhe_factor, LaurentPoly};
use crate::par::{self, Parallelism};
use crate::reidemeister::{simplify_with, Move, DEFAULT_SEQUENCE};
use crate::tangle::{count_components, smoothing_pairs, PortGraph};

/// Default ceiling on the number of crossings a state sum will enumerate.
pub const DEFAULT_MAX_CROSSINGS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BracketError {
    #[error("diagram has {crossings} crossings, above the state-sum cap of {cap}")]
    CapExceeded { crossings: usize, cap: usize },
    #[error("cannot split a diagram without crossings")]
    NoCrossings,
    #[error("partial polynomials do not come from complementary parts of one diagram: {0}")]
    LabelMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Brute-force state sum over the whole diagram.
    Oracle,
    /// Split into two sub-tangles, evaluate both concurrently, glue.
    Split,
    /// Reidemeister simplification, then the split engine.
    SplitRm,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Oracle, Engine::Split, Engine::SplitRm];

    pub fn name(&self) -> &'static str {
        match self {
            Engine::Oracle => "oracle",
            Engine::Split => "split",
            Engine::SplitRm => "split-rm",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Engine {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "oracle" => Ok(Engine::Oracle),
            "split" => Ok(Engine::Split),
            "split-rm" => Ok(Engine::SplitRm),
            other => Err(format!("unknown engine `{other}` (expected oracle, split or split-rm)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineOptions {
    /// Largest crossing count a state sum may enumerate. Gluing visits
    /// `2^n` term pairs, so the split engines honor the cap as well.
    pub max_crossings: usize,
    pub parallelism: Parallelism,
    /// Moves applied by the `split-rm` engine, in order.
    pub rm_sequence: Vec<Move>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            max_crossings: DEFAULT_MAX_CROSSINGS,
            parallelism: Parallelism::default(),
            rm_sequence: DEFAULT_SEQUENCE.to_vec(),
        }
    }
}

/// Dense tally of states by (A-exponent, component count).
#[derive(Clone)]
struct StateTable {
    max_exp: i64,
    max_components: usize,
    counts: Vec<u64>,
}

impl StateTable {
    fn new(max_exp: usize, max_components: usize) -> Self {
        StateTable {
            max_exp: max_exp as i64,
            max_components,
            counts: vec![0; (2 * max_exp + 1) * (max_components + 1)],
        }
    }

    fn add(&mut self, a_exp: i64, components: usize, n: u64) {
        debug_assert!(a_exp.abs() <= self.max_exp && components <= self.max_components);
        let row = (a_exp + self.max_exp) as usize;
        self.counts[row * (self.max_components + 1) + components] += n;
    }

    fn merge(mut self, other: StateTable) -> StateTable {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self
    }

    fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn into_bracket(self) -> LaurentPoly {
        let width = self.max_components + 1;
        let mut loop_factors: Vec<Option<LaurentPoly>> = vec![None; width];
        let mut out = LaurentPoly::zero();
        for (idx, &n) in self.counts.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let a_exp = (idx / width) as i64 - self.max_exp;
            let components = idx % width;
            debug_assert!(components >= 1);
            let factor = loop_factors[components]
                .get_or_insert_with(|| delta_power(components as i64 - 1).expect("components >= 1"));
            let term = LaurentPoly::monomial(a_exp, BigRational::from_integer(BigInt::from(n)));
            out = out + &term * factor;
        }
        out
    }
}

fn check_cap(crossings: usize, cap: usize) -> Result<(), BracketError> {
    if crossings > cap {
        Err(BracketError::CapExceeded { crossings, cap })
    } else {
        Ok(())
    }
}

/// Full state sum with the default options.
pub fn bracket_oracle(d: &Diagram) -> Result<LaurentPoly, BracketError> {
    bracket_oracle_with(d, &EngineOptions::default())
}

pub fn bracket_oracle_with(d: &Diagram, opts: &EngineOptions) -> Result<LaurentPoly, BracketError> {
    let g = PortGraph::from_diagram(d);
    let k = g.crossings.len();
    check_cap(k, opts.max_crossings)?;
    if k == 0 {
        return Ok(LaurentPoly::one());
    }
    let n_ports = g.n_ports();
    let table = par::fold_range(
        opts.parallelism,
        1u64 << k,
        || (StateTable::new(k, k + 1), vec![0usize; n_ports], vec![false; n_ports]),
        |(mut table, mut partner, mut seen), state| {
            let comps = count_components(&g, state, &mut partner, &mut seen);
            let a_exp = k as i64 - 2 * state.count_ones() as i64;
            table.add(a_exp, comps as usize, 1);
            (table, partner, seen)
        },
        |a, b| (a.0.merge(b.0), a.1, a.2),
    )
    .0;
    debug_assert_eq!(table.total(), 1u64 << k);
    Ok(table.into_bracket())
}

/// One part of a split diagram.
#[derive(Debug, Clone)]
pub struct SubTangle {
    arc_set: Vec<usize>,
    matrices: Diagram,
    owned: Vec<usize>,
    graph: Arc<PortGraph>,
}

impl SubTangle {
    /// Edges belonging to this part.
    pub fn arc_set(&self) -> &[usize] {
        &self.arc_set
    }

    /// The diagram's matrices with every crossing this part does not own
    /// erased.
    pub fn matrices(&self) -> &Diagram {
        &self.matrices
    }

    pub fn crossing_count(&self) -> usize {
        self.owned.len()
    }
}

/// Splits along a contiguous run of edges.
///
/// The run starts at the lowest-index edge carrying a crossing and grows
/// along the successor map until the crossings with both edges inside the run
/// first reach `ceil(n / 2)`. The first part owns exactly those crossings;
/// the second owns the rest, including every crossing between the two runs.
pub fn split(d: &Diagram) -> Result<(SubTangle, SubTangle), BracketError> {
    let crossings = d.crossings();
    let n = crossings.len();
    if n == 0 {
        return Err(BracketError::NoCrossings);
    }
    let target = n.div_ceil(2);
    let start = (0..d.n_edges())
        .find(|&e| !d.edge_order(e).is_empty())
        .expect("a crossing has an edge");
    let mut in_run = vec![false; d.n_edges()];
    let mut run = vec![start];
    in_run[start] = true;
    let mut interior = 0;
    let mut last = start;
    while interior < target {
        match d.succ(last) {
            Some(next) if next != start => {
                interior += d.edge_order(next).iter().filter(|&&j| in_run[j]).count();
                in_run[next] = true;
                run.push(next);
                last = next;
            }
            _ => break,
        }
    }
    run.sort_unstable();
    let rest: Vec<usize> = (0..d.n_edges()).filter(|&e| !in_run[e]).collect();

    let graph = Arc::new(PortGraph::from_diagram(d));
    let (mut owned1, mut owned2) = (Vec::new(), Vec::new());
    for (idx, c) in graph.crossings.iter().enumerate() {
        if in_run[c.over] && in_run[c.under] {
            owned1.push(idx);
        } else {
            owned2.push(idx);
        }
    }
    let restrict = |owned: &[usize]| {
        let mut m = d.clone();
        for (idx, c) in graph.crossings.iter().enumerate() {
            if !owned.contains(&idx) {
                m.remove_crossing(c.over, c.under);
            }
        }
        m
    };
    let l1 = SubTangle { arc_set: run, matrices: restrict(&owned1), owned: owned1, graph: graph.clone() };
    let l2 = SubTangle { arc_set: rest, matrices: restrict(&owned2), owned: owned2, graph };
    Ok((l1, l2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    Tail,
    Head,
}

/// One end of a strand piece. Pieces are the stretches of curve between
/// consecutive crossing visits, numbered in curve order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EndpointLabel {
    pub arc: usize,
    pub end: End,
}

/// A term of a partial bracket: `A^a_exp` times the connectivity `pairing`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialState {
    pub a_exp: i64,
    /// Disjoint sets of endpoint labels joined by the part's smoothings.
    pub pairing: Vec<Vec<EndpointLabel>>,
}

/// All `2^k` terms of one sub-tangle together with the label universe they
/// range over.
#[derive(Debug, Clone)]
pub struct PartialBracket {
    pub states: Vec<PartialState>,
    /// Pieces whose endpoints appear in the pairings.
    pieces: Vec<usize>,
    owned: Vec<usize>,
    graph: Arc<PortGraph>,
}

impl PartialBracket {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn pieces(&self) -> &[usize] {
        &self.pieces
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Enumerates every smoothing of the sub-tangle's crossings.
pub fn partial_poly(t: &SubTangle) -> PartialBracket {
    partial_poly_with(t, Parallelism::default())
}

pub fn partial_poly_with(t: &SubTangle, par: Parallelism) -> PartialBracket {
    let g = &t.graph;
    let in_arc_set = |e: usize| t.arc_set.binary_search(&e).is_ok();
    let mut included = vec![false; g.pieces.len()];
    for &c in &t.owned {
        for k in 0..4 {
            included[g.piece_at(4 * c + k)] = true;
        }
    }
    for (p, &(tail, _)) in g.pieces.iter().enumerate() {
        let home_edge = if tail / 4 < g.crossings.len() {
            g.visits.iter().find(|v| v.out_port() == tail).map(|v| v.edge)
        } else {
            Some(0)
        };
        if home_edge.is_some_and(in_arc_set) {
            included[p] = true;
        }
    }
    let pieces: Vec<usize> = (0..g.pieces.len()).filter(|&p| included[p]).collect();
    let mut local = vec![usize::MAX; g.pieces.len()];
    for (i, &p) in pieces.iter().enumerate() {
        local[p] = i;
    }
    // label 2i is the tail of local piece i, 2i + 1 its head
    let label_of_port = |port: usize| {
        if g.piece_into[port] != usize::MAX {
            2 * local[g.piece_into[port]] + 1
        } else {
            2 * local[g.piece_from[port]]
        }
    };
    let k = t.owned.len();
    let indices: Vec<u64> = (0..1u64 << k).collect();
    let states = par::map_ordered(par, &indices, |&state| {
        let mut uf = UnionFind::new(2 * pieces.len());
        for i in 0..pieces.len() {
            uf.union(2 * i, 2 * i + 1);
        }
        for (bit, &c) in t.owned.iter().enumerate() {
            let a_smoothing = state >> bit & 1 == 0;
            for (p, q) in smoothing_pairs(g.crossings[c].sign, a_smoothing) {
                uf.union(label_of_port(4 * c + p), label_of_port(4 * c + q));
            }
        }
        let mut sets: Vec<Vec<EndpointLabel>> = Vec::new();
        let mut slot = vec![usize::MAX; 2 * pieces.len()];
        for label in 0..2 * pieces.len() {
            let root = uf.find(label);
            if slot[root] == usize::MAX {
                slot[root] = sets.len();
                sets.push(Vec::new());
            }
            sets[slot[root]].push(EndpointLabel {
                arc: pieces[label / 2],
                end: if label % 2 == 0 { End::Tail } else { End::Head },
            });
        }
        PartialState { a_exp: k as i64 - 2 * state.count_ones() as i64, pairing: sets }
    });
    PartialBracket { states, pieces, owned: t.owned.clone(), graph: t.graph.clone() }
}

/// Pairing reduced to the pieces both parts share: `rep[i]` is the smallest
/// shared index in the same set as `i`.
struct Compact {
    a_exp: i64,
    rep: Vec<u16>,
    roots: u32,
    isolated: u32,
}

fn compact(b: &PartialBracket, shared_index: &[usize]) -> Vec<Compact> {
    let n_shared = shared_index.iter().filter(|&&i| i != usize::MAX).count();
    b.states
        .iter()
        .map(|s| {
            let mut rep = vec![u16::MAX; n_shared];
            let (mut roots, mut isolated) = (0, 0);
            for set in &s.pairing {
                let mut ids: Vec<usize> = set
                    .iter()
                    .map(|l| shared_index[l.arc])
                    .filter(|&i| i != usize::MAX)
                    .collect();
                if ids.is_empty() {
                    isolated += 1;
                    continue;
                }
                ids.sort_unstable();
                roots += 1;
                for &i in &ids {
                    rep[i] = ids[0] as u16;
                }
            }
            debug_assert!(rep.iter().all(|&r| r != u16::MAX));
            Compact { a_exp: s.a_exp, rep, roots, isolated }
        })
        .collect()
}

/// Result of gluing two partial brackets.
#[derive(Debug, Clone, PartialEq)]
pub struct GlueOutcome {
    pub bracket: LaurentPoly,
    /// Number of (term, term) pairs combined.
    pub pairs_examined: u64,
}

pub fn glue(s1: &PartialBracket, s2: &PartialBracket) -> Result<LaurentPoly, BracketError> {
    glue_with(s1, s2, Parallelism::default()).map(|o| o.bracket)
}

/// Combines every term of `s1` with every term of `s2`: the pairings are
/// merged wherever they share a label, and each pair contributes
/// `A^(a1 + a2) d^(components - 1)`.
pub fn glue_with(s1: &PartialBracket, s2: &PartialBracket, par: Parallelism) -> Result<GlueOutcome, BracketError> {
    let g = &s1.graph;
    if !Arc::ptr_eq(g, &s2.graph)
        && (g.crossings != s2.graph.crossings || g.pieces != s2.graph.pieces)
    {
        return Err(BracketError::LabelMismatch("different diagrams".into()));
    }
    let mut owner = vec![0u8; g.crossings.len()];
    for &c in s1.owned.iter().chain(&s2.owned) {
        owner[c] += 1;
    }
    if owner.iter().any(|&n| n != 1) {
        return Err(BracketError::LabelMismatch("crossings are not split between the parts".into()));
    }
    let mut seen = vec![0u8; g.pieces.len()];
    for &p in s1.pieces.iter().chain(&s2.pieces) {
        seen[p] += 1;
    }
    if let Some(p) = seen.iter().position(|&n| n == 0) {
        return Err(BracketError::LabelMismatch(format!("piece {p} belongs to neither part")));
    }
    let mut shared_index = vec![usize::MAX; g.pieces.len()];
    let mut n_shared = 0;
    for (p, &n) in seen.iter().enumerate() {
        if n == 2 {
            shared_index[p] = n_shared;
            n_shared += 1;
        }
    }
    assert!(n_shared < u16::MAX as usize, "too many shared pieces");
    let left = compact(s1, &shared_index);
    let right = compact(s2, &shared_index);
    // Union steps of each right-hand term.
    let right_links: Vec<Vec<(u16, u16)>> = right
        .iter()
        .map(|c| {
            c.rep
                .iter()
                .enumerate()
                .filter(|&(i, &r)| r as usize != i)
                .map(|(i, &r)| (i as u16, r))
                .collect()
        })
        .collect();

    let k_total = g.crossings.len();
    let max_components = g.pieces.len() + 1;
    let table = par::fold_range(
        par,
        left.len() as u64,
        || (StateTable::new(k_total, max_components), vec![0u16; n_shared]),
        |(mut table, mut parent), i| {
            let l = &left[i as usize];
            for (r, links) in right.iter().zip(&right_links) {
                parent.copy_from_slice(&l.rep);
                let mut merges = 0;
                for &(a, b) in links {
                    let (ra, rb) = (find16(&mut parent, a), find16(&mut parent, b));
                    if ra != rb {
                        parent[ra.max(rb) as usize] = ra.min(rb);
                        merges += 1;
                    }
                }
                let components = (l.roots - merges + l.isolated + r.isolated) as usize;
                table.add(l.a_exp + r.a_exp, components, 1);
            }
            (table, parent)
        },
        |a, b| (a.0.merge(b.0), a.1),
    )
    .0;
    let pairs_examined = table.total();
    debug_assert_eq!(pairs_examined, (left.len() * right.len()) as u64);
    Ok(GlueOutcome { bracket: table.into_bracket(), pairs_examined })
}

fn find16(parent: &mut [u16], mut x: u16) -> u16 {
    while parent[x as usize] != x {
        let up = parent[parent[x as usize] as usize];
        parent[x as usize] = up;
        x = up;
    }
    x
}

/// Bracket by splitting, concurrent partial evaluation and gluing.
pub fn bracket_split(d: &Diagram, opts: &EngineOptions) -> Result<LaurentPoly, BracketError> {
    let n = crossing_count(d);
    check_cap(n, opts.max_crossings)?;
    if n == 0 {
        return Ok(LaurentPoly::one());
    }
    let (l1, l2) = split(d)?;
    let (p1, p2) = par::join(
        opts.parallelism,
        || partial_poly_with(&l1, opts.parallelism),
        || partial_poly_with(&l2, opts.parallelism),
    );
    Ok(glue_with(&p1, &p2, opts.parallelism)?.bracket)
}

/// A Jones polynomial (in `A`) with the diagram sizes behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct JonesEvaluation {
    pub poly: LaurentPoly,
    /// Crossings of the diagram handed in.
    pub crossings: usize,
    /// Crossings of the diagram the bracket was computed on.
    pub evaluated_crossings: usize,
    pub writhe: i64,
}

pub fn jones_of_diagram(d: &Diagram, engine: Engine) -> Result<LaurentPoly, BracketError> {
    evaluate(d, engine, &EngineOptions::default()).map(|e| e.poly)
}

/// `(-A^3)^(-w) <D>`, with the writhe taken on the diagram the bracket is
/// computed on.
pub fn evaluate(d: &Diagram, engine: Engine, opts: &EngineOptions) -> Result<JonesEvaluation, BracketError> {
    let crossings = crossing_count(d);
    let simplified;
    let target = match engine {
        Engine::SplitRm => {
            simplified = simplify_with(d, &opts.rm_sequence);
            &simplified
        }
        _ => d,
    };
    let bracket = match engine {
        Engine::Oracle => bracket_oracle_with(target, opts)?,
        Engine::Split | Engine::SplitRm => bracket_split(target, opts)?,
    };
    let w = writhe(target);
    Ok(JonesEvaluation {
        poly: &writhe_factor(w) * &bracket,
        crossings,
        evaluated_crossings: crossing_count(target),
        writhe: w,
    })
}
