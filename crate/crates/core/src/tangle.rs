//! Strand connectivity of a diagram: crossing visits in curve order, the
//! curve pieces between consecutive visits, and the smoothing rule.
//!
//! Each crossing `c` owns four ports `4c + k`, where `k` is one of
//! [`O_IN`], [`O_OUT`], [`U_IN`], [`U_OUT`]. Open curves add two more ports
//! for the curve's start and end. Every piece joins an out-port (or the
//! start) to the next in-port (or the end).

use crate::diagram::{Crossing, Diagram};

pub(crate) const O_IN: usize = 0;
pub(crate) const O_OUT: usize = 1;
pub(crate) const U_IN: usize = 2;
pub(crate) const U_OUT: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Visit {
    pub crossing: usize,
    pub over: bool,
    /// Edge on which the visit happens.
    pub edge: usize,
}

impl Visit {
    pub fn in_port(&self) -> usize {
        4 * self.crossing + if self.over { O_IN } else { U_IN }
    }

    pub fn out_port(&self) -> usize {
        4 * self.crossing + if self.over { O_OUT } else { U_OUT }
    }
}

/// The two port pairs joined by smoothing a crossing of the given sign.
/// `a_smoothing` selects the smoothing weighted by `A` (the other carries
/// `A^-1`). Ports are local indices 0..4.
pub(crate) fn smoothing_pairs(sign: i8, a_smoothing: bool) -> [(usize, usize); 2] {
    match (sign > 0, a_smoothing) {
        (true, true) => [(U_OUT, O_IN), (U_IN, O_OUT)],
        (true, false) => [(O_OUT, U_OUT), (O_IN, U_IN)],
        (false, true) => [(U_IN, O_IN), (U_OUT, O_OUT)],
        (false, false) => [(O_OUT, U_IN), (O_IN, U_OUT)],
    }
}

#[derive(Debug, Clone)]
pub(crate) struct PortGraph {
    pub crossings: Vec<Crossing>,
    pub visits: Vec<Visit>,
    pub closed: bool,
    /// `(tail port, head port)` of each piece.
    pub pieces: Vec<(usize, usize)>,
    /// Piece ending at each port, and piece starting at each port.
    pub piece_into: Vec<usize>,
    pub piece_from: Vec<usize>,
}

impl PortGraph {
    pub fn from_diagram(d: &Diagram) -> Self {
        let crossings = d.crossings();
        let index_of = |i: usize, j: usize| {
            let key = (i.min(j), i.max(j));
            crossings
                .binary_search_by(|c| c.key().cmp(&key))
                .expect("ordered partner is a crossing")
        };
        let mut visits = Vec::with_capacity(2 * crossings.len());
        for e in 0..d.n_edges() {
            for &partner in d.edge_order(e) {
                visits.push(Visit { crossing: index_of(e, partner), over: d.is_over(e, partner), edge: e });
            }
        }
        Self::from_visits(crossings, visits, d.is_closed())
    }

    pub fn from_visits(crossings: Vec<Crossing>, visits: Vec<Visit>, closed: bool) -> Self {
        let k = crossings.len();
        let n_ports = if closed { 4 * k } else { 4 * k + 2 };
        let mut pieces = Vec::with_capacity(visits.len() + 1);
        let v = visits.len();
        if closed {
            for i in 0..v {
                pieces.push((visits[i].out_port(), visits[(i + 1) % v].in_port()));
            }
        } else {
            let (start, end) = (4 * k, 4 * k + 1);
            if v == 0 {
                pieces.push((start, end));
            } else {
                pieces.push((start, visits[0].in_port()));
                for i in 1..v {
                    pieces.push((visits[i - 1].out_port(), visits[i].in_port()));
                }
                pieces.push((visits[v - 1].out_port(), end));
            }
        }
        let mut piece_into = vec![usize::MAX; n_ports];
        let mut piece_from = vec![usize::MAX; n_ports];
        for (p, &(tail, head)) in pieces.iter().enumerate() {
            piece_from[tail] = p;
            piece_into[head] = p;
        }
        PortGraph { crossings, visits, closed, pieces, piece_into, piece_from }
    }

    pub fn n_ports(&self) -> usize {
        self.piece_into.len()
    }

    /// Piece attached to a port (the one entering an in-port or leaving an
    /// out-port; the start port has only an outgoing piece, the end port only
    /// an incoming one).
    pub fn piece_at(&self, port: usize) -> usize {
        if self.piece_into[port] != usize::MAX {
            self.piece_into[port]
        } else {
            self.piece_from[port]
        }
    }

    /// The port at the other end of the piece attached to `port`.
    pub fn piece_partner(&self, port: usize) -> usize {
        let (tail, head) = self.pieces[self.piece_at(port)];
        if tail == port {
            head
        } else {
            tail
        }
    }
}

/// Counts the components of the curve after smoothing every crossing;
/// bit `c` of `state` set means crossing `c` takes its `A^-1` smoothing.
/// `partner` is scratch space of length `n_ports`.
pub(crate) fn count_components(g: &PortGraph, state: u64, partner: &mut [usize], seen: &mut [bool]) -> u32 {
    for (c, x) in g.crossings.iter().enumerate() {
        let a_smoothing = state >> c & 1 == 0;
        for (p, q) in smoothing_pairs(x.sign, a_smoothing) {
            partner[4 * c + p] = 4 * c + q;
            partner[4 * c + q] = 4 * c + p;
        }
    }
    seen.iter_mut().for_each(|s| *s = false);
    let mut components = 0;
    if !g.closed {
        // The only open component runs from the start port to the end port.
        let k = g.crossings.len();
        let (start, end) = (4 * k, 4 * k + 1);
        let mut port = start;
        loop {
            seen[port] = true;
            let next = g.piece_partner(port);
            seen[next] = true;
            if next == end {
                break;
            }
            port = partner[next];
        }
        components += 1;
    }
    for s in 0..seen.len() {
        if seen[s] {
            continue;
        }
        let mut port = s;
        while !seen[port] {
            seen[port] = true;
            let next = g.piece_partner(port);
            seen[next] = true;
            port = partner[next];
        }
        components += 1;
    }
    components
}
