//! Oriented link diagrams given by planar-diagram (PD) codes.
//!
//! A crossing lists its four edge ends counterclockwise, starting from the
//! incoming under-strand, so the under-strand runs from position 0 to
//! position 2. The over-strand enters at position 1 or 3; entering at 3 makes
//! the crossing positive. Crossingless unknotted components are carried as
//! explicit [`FreeLoop`]s sitting in a face of the rest of the diagram.
//!
//! Faces are the complementary regions of each connected piece of the
//! crossing graph. Corner `q` of a crossing is the region between positions
//! `q` and `q + 1`. All pieces, and every loop without an explicit face, share
//! one common outer region.

mod parse;
mod resolution;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use parse::{parse_braid, parse_input, parse_pd, DiagramInput};
pub use resolution::{Circle, Resolution};

use crate::error::{Error, Result};

pub type EdgeId = usize;
pub type FaceId = usize;

/// An end of an edge at a crossing: `(crossing index, position 0..4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub crossing: usize,
    pub pos: u8,
}

impl Slot {
    pub fn new(crossing: usize, pos: u8) -> Self {
        Slot { crossing, pos }
    }
    pub fn corner(self) -> usize {
        4 * self.crossing + self.pos as usize
    }
    /// The corner clockwise-adjacent to this position (between `pos - 1` and `pos`).
    pub fn corner_before(self) -> usize {
        4 * self.crossing + ((self.pos + 3) % 4) as usize
    }
    pub fn opposite(self) -> Slot {
        Slot::new(self.crossing, (self.pos + 2) % 4)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Crossing {
    /// Edge ids counterclockwise from the incoming under-strand.
    pub edges: [EdgeId; 4],
    /// Position (1 or 3) where the over-strand enters.
    pub over_in: u8,
}

impl Crossing {
    pub fn new(edges: [EdgeId; 4], over_in: u8) -> Self {
        debug_assert!(over_in == 1 || over_in == 3);
        Crossing { edges, over_in }
    }

    pub fn sign(&self) -> Sign {
        if self.over_in == 3 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    /// Whether the edge end at `pos` points into the crossing.
    pub fn is_incoming(&self, pos: u8) -> bool {
        pos == 0 || pos == self.over_in
    }

    /// The same crossing with over- and under-strand exchanged.
    pub fn switched(&self) -> Crossing {
        let o = self.over_in as usize;
        Crossing {
            edges: std::array::from_fn(|k| self.edges[(o + k) % 4]),
            over_in: 4 - self.over_in,
        }
    }

    /// Builds a crossing from ends listed counterclockwise starting anywhere,
    /// each with its direction, given which pair of opposite positions
    /// (0 for the pair starting at index 0 or 2, 1 otherwise) is the under-strand.
    pub fn from_ccw(ends: [(EdgeId, bool); 4], under_pair: usize) -> Crossing {
        let start = [under_pair, under_pair + 2]
            .into_iter()
            .find(|&k| ends[k].1)
            .expect("under strand has an incoming end");
        let edges = std::array::from_fn(|k| ends[(start + k) % 4].0);
        let over_in = (1..4)
            .step_by(2)
            .find(|&k| ends[(start + k) % 4].1)
            .expect("over strand has an incoming end") as u8;
        Crossing { edges, over_in }
    }
}

impl fmt::Display for Crossing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = self.edges;
        write!(f, "X[{},{},{},{}]", e[0], e[1], e[2], e[3])
    }
}

/// A crossingless unknotted component.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeLoop {
    pub edge: EdgeId,
    /// Face of the crossing part that contains the loop; `None` is the outer region.
    pub face: Option<FaceId>,
    /// Orientation: true when the loop's exterior lies on its left
    /// (clockwise in the plane).
    pub exterior_on_left: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Edges in order of travel along the orientation, starting at the smallest.
    pub edges: Vec<EdgeId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct EdgeEnds {
    tail: Slot,
    head: Slot,
}

/// A validated oriented link diagram.
#[derive(Clone, Debug)]
pub struct LinkDiagram {
    crossings: Vec<Crossing>,
    loops: Vec<FreeLoop>,
    /// at most one face per piece, fixing that piece's outer face
    outer_hints: Vec<FaceId>,
    ends: BTreeMap<EdgeId, EdgeEnds>,
    components: Vec<Component>,
    component_of: BTreeMap<EdgeId, usize>,
    /// corner index -> face id
    corner_face: Vec<FaceId>,
    n_faces: usize,
    /// piece index of every crossing
    piece_of: Vec<usize>,
    /// per piece: its outer face
    piece_outer: Vec<FaceId>,
}

impl PartialEq for LinkDiagram {
    fn eq(&self, other: &Self) -> bool {
        self.crossings == other.crossings
            && self.loops == other.loops
            && self.outer_hints == other.outer_hints
    }
}

impl LinkDiagram {
    pub fn empty() -> Self {
        Self::new(Vec::new(), Vec::new(), None).expect("empty diagram")
    }

    /// Validates and indexes a diagram.
    pub fn new(crossings: Vec<Crossing>, loops: Vec<FreeLoop>, outer_hint: Option<FaceId>) -> Result<Self> {
        Self::with_outer_faces(crossings, loops, outer_hint.into_iter().collect())
    }

    /// Like [`LinkDiagram::new`], with an outer face fixed for several pieces.
    pub fn with_outer_faces(crossings: Vec<Crossing>, loops: Vec<FreeLoop>, outer_hints: Vec<FaceId>) -> Result<Self> {
        let mut slots: BTreeMap<EdgeId, Vec<Slot>> = BTreeMap::new();
        for (c, x) in crossings.iter().enumerate() {
            if x.over_in != 1 && x.over_in != 3 {
                return Err(Error::Diagram(format!("crossing {x}: bad over-strand position")));
            }
            for (p, &e) in x.edges.iter().enumerate() {
                slots.entry(e).or_default().push(Slot::new(c, p as u8));
            }
        }
        let mut ends = BTreeMap::new();
        for (&e, s) in &slots {
            if s.len() != 2 {
                return Err(Error::Diagram(format!(
                    "edge {e} appears {} times (in {}); every edge must appear exactly twice",
                    s.len(),
                    crossings[s[0].crossing]
                )));
            }
            let inc: Vec<bool> = s.iter().map(|sl| crossings[sl.crossing].is_incoming(sl.pos)).collect();
            let (tail, head) = match (inc[0], inc[1]) {
                (false, true) => (s[0], s[1]),
                (true, false) => (s[1], s[0]),
                _ => {
                    return Err(Error::Diagram(format!(
                        "inconsistent orientation on edge {e} at {} and {}",
                        crossings[s[0].crossing], crossings[s[1].crossing]
                    )))
                }
            };
            ends.insert(e, EdgeEnds { tail, head });
        }
        let mut seen = BTreeSet::new();
        for l in &loops {
            if slots.contains_key(&l.edge) || !seen.insert(l.edge) {
                return Err(Error::Diagram(format!("loop edge {} is not unique", l.edge)));
            }
        }

        let mut d = LinkDiagram {
            crossings,
            loops,
            outer_hints,
            ends,
            components: Vec::new(),
            component_of: BTreeMap::new(),
            corner_face: Vec::new(),
            n_faces: 0,
            piece_of: Vec::new(),
            piece_outer: Vec::new(),
        };
        d.index_components();
        d.index_faces()?;
        for &h in &d.outer_hints {
            if h >= d.n_faces.max(1) {
                return Err(Error::Diagram(format!("outer face {h} does not exist")));
            }
        }
        for l in &d.loops {
            if let Some(f) = l.face {
                if f >= d.n_faces.max(1) {
                    return Err(Error::Diagram(format!("loop {} placed in unknown face {f}", l.edge)));
                }
            }
        }
        d.choose_outer_faces()?;
        Ok(d)
    }

    fn index_components(&mut self) {
        let mut comps: Vec<(EdgeId, Component)> = Vec::new();
        let mut visited = BTreeSet::new();
        for &e0 in self.ends.keys() {
            if visited.contains(&e0) {
                continue;
            }
            let mut edges = Vec::new();
            let mut e = e0;
            loop {
                visited.insert(e);
                edges.push(e);
                let head = self.ends[&e].head;
                let next = self.crossings[head.crossing].edges[head.opposite().pos as usize];
                if next == e0 {
                    break;
                }
                e = next;
            }
            comps.push((e0, Component { edges }));
        }
        for l in &self.loops {
            comps.push((l.edge, Component { edges: vec![l.edge] }));
        }
        comps.sort_by_key(|c| c.0);
        self.components = comps.into_iter().map(|c| c.1).collect();
        self.component_of = self
            .components
            .iter()
            .enumerate()
            .flat_map(|(i, c)| c.edges.iter().map(move |&e| (e, i)))
            .collect();
    }

    fn index_faces(&mut self) -> Result<()> {
        let n = self.crossings.len();
        let mut uf = UnionFind::new(4 * n);
        let mut piece = UnionFind::new(n);
        for ee in self.ends.values() {
            // walking tail -> head: left side is corner(tail), ends at corner_before(head)
            uf.union(ee.tail.corner(), ee.head.corner_before());
            uf.union(ee.head.corner(), ee.tail.corner_before());
            piece.union(ee.tail.crossing, ee.head.crossing);
        }
        // face ids by first appearance: edges ascending, left side then right side
        let mut id_of_root: BTreeMap<usize, FaceId> = BTreeMap::new();
        for ee in self.ends.values() {
            for c in [ee.tail.corner(), ee.tail.corner_before()] {
                let r = uf.find(c);
                let next = id_of_root.len();
                id_of_root.entry(r).or_insert(next);
            }
        }
        self.corner_face = (0..4 * n).map(|c| id_of_root[&uf.find(c)]).collect();
        self.n_faces = id_of_root.len();

        let mut piece_ids: BTreeMap<usize, usize> = BTreeMap::new();
        self.piece_of = (0..n)
            .map(|c| {
                let r = piece.find(c);
                let next = piece_ids.len();
                *piece_ids.entry(r).or_insert(next)
            })
            .collect();
        // Euler characteristic of each piece must be that of a sphere: F = V + 2.
        let pieces = piece_ids.len();
        let mut v = vec![0usize; pieces];
        let mut faces: Vec<BTreeSet<FaceId>> = vec![BTreeSet::new(); pieces];
        for c in 0..n {
            v[self.piece_of[c]] += 1;
            for q in 0..4 {
                faces[self.piece_of[c]].insert(self.corner_face[4 * c + q]);
            }
        }
        for p in 0..pieces {
            if faces[p].len() != v[p] + 2 {
                return Err(Error::Diagram(format!(
                    "not planar: a piece with {} crossings has {} faces (expected {})",
                    v[p],
                    faces[p].len(),
                    v[p] + 2
                )));
            }
        }
        Ok(())
    }

    fn choose_outer_faces(&mut self) -> Result<()> {
        let pieces = self.piece_of.iter().copied().max().map_or(0, |m| m + 1);
        let mut outer = vec![usize::MAX; pieces];
        for &h in &self.outer_hints {
            if let Some(c) = self.corner_face.iter().position(|&f| f == h) {
                let p = self.piece_of[c / 4];
                if outer[p] != usize::MAX {
                    return Err(Error::Diagram(format!("two outer faces given for the piece of face {h}")));
                }
                outer[p] = h;
            }
        }
        // default: left face of the lowest-numbered edge of the piece
        for ee in self.ends.values() {
            let p = self.piece_of[ee.tail.crossing];
            if outer[p] == usize::MAX {
                outer[p] = self.corner_face[ee.tail.corner()];
            }
        }
        self.piece_outer = outer;
        Ok(())
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }
    pub fn loops(&self) -> &[FreeLoop] {
        &self.loops
    }
    pub fn n_crossings(&self) -> usize {
        self.crossings.len()
    }
    pub fn n_plus(&self) -> usize {
        self.crossings.iter().filter(|x| x.sign() == Sign::Positive).count()
    }
    pub fn n_minus(&self) -> usize {
        self.n_crossings() - self.n_plus()
    }
    pub fn writhe(&self) -> i64 {
        self.n_plus() as i64 - self.n_minus() as i64
    }
    pub fn components(&self) -> &[Component] {
        &self.components
    }
    pub fn n_components(&self) -> usize {
        self.components.len()
    }
    pub fn component_of(&self, e: EdgeId) -> usize {
        self.component_of[&e]
    }
    pub fn outer_hint(&self) -> Option<FaceId> {
        self.outer_hints.first().copied()
    }
    pub fn outer_hints(&self) -> &[FaceId] {
        &self.outer_hints
    }
    pub fn with_outer_hint(&self, hint: Option<FaceId>) -> Result<Self> {
        Self::new(self.crossings.clone(), self.loops.clone(), hint)
    }
    /// Number of faces of the crossing part (at least 1: the plane itself).
    pub fn n_faces(&self) -> usize {
        self.n_faces.max(1)
    }
    pub fn is_loop(&self, e: EdgeId) -> bool {
        self.loops.iter().any(|l| l.edge == e)
    }
    pub fn free_loop(&self, e: EdgeId) -> Option<&FreeLoop> {
        self.loops.iter().find(|l| l.edge == e)
    }
    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.component_of.contains_key(&e)
    }
    /// All edge ids, ascending.
    pub fn edges(&self) -> Vec<EdgeId> {
        self.component_of.keys().copied().collect()
    }
    pub fn max_edge(&self) -> EdgeId {
        self.component_of.keys().next_back().copied().unwrap_or(0)
    }
    pub fn tail(&self, e: EdgeId) -> Option<Slot> {
        self.ends.get(&e).map(|x| x.tail)
    }
    pub fn head(&self, e: EdgeId) -> Option<Slot> {
        self.ends.get(&e).map(|x| x.head)
    }
    pub fn edge_at(&self, s: Slot) -> EdgeId {
        self.crossings[s.crossing].edges[s.pos as usize]
    }
    pub fn corner_face(&self, corner: usize) -> FaceId {
        self.corner_face[corner]
    }
    /// Face on the left of a crossing edge, walking along its orientation.
    pub fn left_face(&self, e: EdgeId) -> Option<FaceId> {
        self.tail(e).map(|t| self.corner_face[t.corner()])
    }
    pub fn right_face(&self, e: EdgeId) -> Option<FaceId> {
        self.tail(e).map(|t| self.corner_face[t.corner_before()])
    }
    /// Whether the face is (part of) the common outer region.
    pub fn is_outer_face(&self, f: FaceId) -> bool {
        self.crossings.is_empty() || self.piece_outer.contains(&f)
    }
    /// Outer face of every piece of the crossing part.
    pub fn piece_outer_faces(&self) -> &[FaceId] {
        &self.piece_outer
    }
    /// The face a free loop sits in, resolving `None` to the outer region.
    pub fn loop_face(&self, l: &FreeLoop) -> Option<FaceId> {
        l.face.filter(|f| !self.is_outer_face(*f))
    }

    /// Piece index of a crossing.
    pub fn piece_of(&self, c: usize) -> usize {
        self.piece_of[c]
    }
    pub fn n_pieces(&self) -> usize {
        self.piece_outer.len()
    }

    /// Crossing `c`'s under- and over-strand components.
    pub fn strand_components(&self, c: usize) -> (usize, usize) {
        let x = &self.crossings[c];
        (self.component_of(x.edges[0]), self.component_of(x.edges[1]))
    }

    /// All crossings switched. Loop orientations and faces are unchanged.
    pub fn mirror(&self) -> LinkDiagram {
        let crossings = self.crossings.iter().map(Crossing::switched).collect();
        LinkDiagram::with_outer_faces(crossings, self.loops.clone(), self.outer_hints.clone())
            .expect("mirror of a valid diagram is valid")
    }

    /// PD text with sign annotations and loop records.
    pub fn to_pd_string(&self) -> String {
        let mut parts: Vec<String> = self
            .crossings
            .iter()
            .map(|x| format!("{x}{}", if x.sign() == Sign::Positive { "+" } else { "-" }))
            .collect();
        for l in &self.loops {
            let mut s = format!("O[{}", l.edge);
            if let Some(f) = l.face {
                s.push_str(&format!(",{f}"));
            }
            s.push(']');
            if l.exterior_on_left {
                s.push_str("cw");
            }
            parts.push(s);
        }
        parts.join(" ")
    }

    /// Human-readable listing of edges and faces, used by movie dry runs.
    pub fn describe(&self) -> String {
        let mut out = format!(
            "pd: {}\ncrossings: {} (n+ = {}, n- = {}), components: {}\n",
            self.to_pd_string(),
            self.n_crossings(),
            self.n_plus(),
            self.n_minus(),
            self.n_components()
        );
        for e in self.edges() {
            match (self.left_face(e), self.right_face(e)) {
                (Some(l), Some(r)) => out.push_str(&format!("  edge {e}: left face {l}, right face {r}\n")),
                _ => out.push_str(&format!("  edge {e}: free loop\n")),
            }
        }
        out.push_str(&format!(
            "  outer faces: {:?}\n",
            if self.crossings.is_empty() { vec![0] } else { self.piece_outer.clone() }
        ));
        out
    }
}

impl fmt::Display for LinkDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pd_string())
    }
}

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }
    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[cfg(test)]
mod tests;
