//! Maps induced by elementary link cobordisms.
//!
//! A movie is a start diagram and a list of moves. Every move comes with a
//! chain map between the cube complexes of the diagrams before and after it:
//! unit, counit, multiplication or comultiplication for Morse moves, and the
//! homotopy equivalences of the Reidemeister I and II invariance proofs. A
//! map is stored as one matrix per homological degree. Its declared q-degree
//! is minus the Euler characteristic of the cobordism: `q(F v) <= q(v) - χ`.

mod moves;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::{FrobeniusParams, Q};
use crate::canonical::{canonical_generators, CanonicalGenerator, CanonicalState};
use crate::complex::{edge_map, edge_sign, match_circles, CircleMatch, FilteredComplex, Generator};
use crate::diagram::{EdgeId, LinkDiagram, Resolution, UnionFind};
use crate::error::{Error, Result};
use crate::exactla::{solve_modulo, SparseMatrix, SparseVec, Subspace};
use crate::par_map;

pub use moves::{FaceRef, Move, R2Kind, Side};
use moves::Site;

fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn insert_bit(v: u64, pos: usize, bit: bool) -> u64 {
    let low = v & ((1u64 << pos) - 1);
    low | (bit as u64) << pos | (v >> pos) << (pos + 1)
}

fn remove_bit(v: u64, pos: usize) -> u64 {
    let low = v & ((1u64 << pos) - 1);
    low | (v >> (pos + 1)) << pos
}

/// Index of the circle of `to` holding the circle `j` of `from`, found
/// through the first edge of `j` that the target diagram still has.
fn carry_circle(from: &Resolution, j: usize, to: &Resolution, target: &LinkDiagram) -> Option<usize> {
    from.circles[j]
        .edges
        .iter()
        .find(|&&e| target.has_edge(e))
        .map(|&e| to.circle_of(e))
}

/// Relabels the circles of `from` listed in `carry` (target index per circle,
/// `usize::MAX` to drop) into a label mask of the target.
fn carry_labels(labels: u64, carry: &[usize]) -> u64 {
    let mut out = 0;
    for (j, &t) in carry.iter().enumerate() {
        if t != usize::MAX && labels >> j & 1 == 1 {
            out |= 1 << t;
        }
    }
    out
}

/// Multiplication by `X` on circle `s`: `X·1 = X`, `X·X = hX + a`.
fn times_x(p: &FrobeniusParams, labels: u64, s: usize) -> Vec<(u64, Q)> {
    if labels >> s & 1 == 0 {
        vec![(labels | 1 << s, qi(1))]
    } else {
        vec![(labels, p.h().clone()), (labels & !(1 << s), p.a().clone())]
    }
}

type Image = Vec<(u64, u64, Q)>;

/// A chain map with one matrix per homological degree of the source.
#[derive(Clone, Debug)]
pub struct InducedMap {
    blocks: BTreeMap<i64, SparseMatrix>,
    target_dims: BTreeMap<i64, usize>,
    /// declared q-degree, minus the Euler characteristic
    pub degree: i64,
}

fn dims(c: &FilteredComplex) -> BTreeMap<i64, usize> {
    c.degrees().map(|r| (r, c.dim(r))).collect()
}

impl InducedMap {
    pub fn identity(c: &FilteredComplex) -> InducedMap {
        InducedMap {
            blocks: c.degrees().map(|r| (r, SparseMatrix::identity(c.dim(r)))).collect(),
            target_dims: dims(c),
            degree: 0,
        }
    }

    /// Builds the map generator by generator. `image(v, res, labels)` lists
    /// `(target vertex, target labels, coefficient)`.
    fn assemble<F>(c0: &FilteredComplex, c1: &FilteredComplex, degree: i64, image: F) -> Result<InducedMap>
    where
        F: Fn(u64, &Resolution, u64) -> Result<Image> + Sync + Send,
    {
        let mut blocks = BTreeMap::new();
        for r in c0.degrees() {
            let g0 = c0.group(r).expect("source degree");
            let cols: Vec<Result<Vec<SparseVec>>> = par_map(g0.vertices().len(), |k| {
                let v = g0.vertices()[k];
                let res = g0.resolution(v).expect("source vertex");
                let mut out = Vec::with_capacity(1 << res.n_circles());
                for labels in 0..1u64 << res.n_circles() {
                    let mut entries = Vec::new();
                    for (w, l, coeff) in image(v, res, labels)? {
                        if num_traits::Zero::is_zero(&coeff) {
                            continue;
                        }
                        if c1.degree_of_vertex(w) != r {
                            return Err(Error::Internal(format!(
                                "map sends degree {r} to vertex {w:b} of degree {}",
                                c1.degree_of_vertex(w)
                            )));
                        }
                        let idx = c1
                            .group(r)
                            .and_then(|g| g.index_of(Generator { vertex: w, labels: l }))
                            .ok_or_else(|| Error::Internal(format!("no generator {l:b} at vertex {w:b}")))?;
                        entries.push((idx, coeff));
                    }
                    out.push(SparseVec::from_entries(entries));
                }
                Ok(out)
            });
            let mut columns = Vec::with_capacity(g0.dim());
            for c in cols {
                columns.extend(c?);
            }
            blocks.insert(r, SparseMatrix::from_columns(c1.dim(r), columns));
        }
        Ok(InducedMap {
            blocks,
            target_dims: dims(c1),
            degree,
        })
    }

    fn target_dim(&self, r: i64) -> usize {
        self.target_dims.get(&r).copied().unwrap_or(0)
    }

    /// The matrix on degree `r` (target dimension by source dimension).
    pub fn block(&self, r: i64) -> Option<&SparseMatrix> {
        self.blocks.get(&r)
    }

    pub fn apply(&self, r: i64, v: &SparseVec) -> SparseVec {
        self.blocks.get(&r).map_or_else(SparseVec::new, |m| m.apply(v))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &InducedMap) -> InducedMap {
        let blocks = self
            .blocks
            .iter()
            .map(|(&r, m)| {
                let composed = match next.blocks.get(&r) {
                    Some(n) => n.mul(m),
                    None => SparseMatrix::zeros(next.target_dim(r), m.ncols()),
                };
                (r, composed)
            })
            .collect();
        InducedMap {
            blocks,
            target_dims: next.target_dims.clone(),
            degree: self.degree + next.degree,
        }
    }

    /// Whether `d1 F = F d0` holds exactly in every degree.
    pub fn is_chain_map(&self, c0: &FilteredComplex, c1: &FilteredComplex) -> bool {
        let zero = |rows, cols| SparseMatrix::zeros(rows, cols);
        for r in c0.degrees() {
            let f = &self.blocks[&r];
            let left = c1.differential(r).mul(f);
            let right = match self.blocks.get(&(r + 1)) {
                Some(g) => g.mul(&c0.differential(r)),
                None => zero(c1.dim(r + 1), c0.dim(r)),
            };
            if left.nrows() != right.nrows() || !left.sub(&right).is_zero() {
                return false;
            }
        }
        true
    }

    /// Largest `q(target) - q(source)` over the nonzero entries.
    pub fn max_q_shift(&self, c0: &FilteredComplex, c1: &FilteredComplex) -> Option<i64> {
        let mut best: Option<i64> = None;
        for (&r, m) in &self.blocks {
            for (j, col) in m.columns().iter().enumerate() {
                let q0 = c0.q_grading(r, j).expect("source index");
                for (i, _) in col.entries() {
                    let q1 = c1.q_grading(r, *i).expect("target index");
                    best = Some(best.map_or(q1 - q0, |b: i64| b.max(q1 - q0)));
                }
            }
        }
        best
    }

    /// Whether the map respects the filtration with its declared degree.
    pub fn is_filtered(&self, c0: &FilteredComplex, c1: &FilteredComplex) -> bool {
        self.max_q_shift(c0, c1).is_none_or(|s| s <= self.degree)
    }

    /// Rank of the map induced on homology, summed over degrees.
    pub fn homology_rank(&self, c0: &FilteredComplex, c1: &FilteredComplex) -> Result<usize> {
        let mut total = 0;
        for r in c0.degrees() {
            let z = c0.differential(r).kernel();
            let b1 = c1.differential(r - 1).image();
            let mut span = b1.clone();
            for v in z.basis() {
                span.add_vector(&self.apply(r, v));
            }
            total += span.quotient_dim(&b1)?;
        }
        Ok(total)
    }
}

/// Chain map of one move between the complexes before and after it.
fn elementary_map(
    site: &Site,
    euler: i64,
    c0: &FilteredComplex,
    c1: &FilteredComplex,
) -> Result<InducedMap> {
    let p = c0.params().clone();
    let (d0, d1) = (c0.diagram(), c1.diagram());
    match *site {
        Site::Birth { .. } => InducedMap::assemble(c0, c1, -euler, |v, res, labels| {
            let to = c1.group(c0.degree_of_vertex(v)).unwrap().resolution(v).unwrap();
            let carry: Vec<usize> = (0..res.n_circles()).map(|j| carry_circle(res, j, to, d1).unwrap()).collect();
            Ok(vec![(v, carry_labels(labels, &carry), qi(1))])
        }),
        Site::Death { edge } => InducedMap::assemble(c0, c1, -euler, |v, res, labels| {
            let to = c1.group(c0.degree_of_vertex(v)).unwrap().resolution(v).unwrap();
            let o = res.circle_of(edge);
            if labels >> o & 1 == 0 {
                return Ok(Vec::new());
            }
            let carry: Vec<usize> = (0..res.n_circles())
                .map(|j| if j == o { usize::MAX } else { carry_circle(res, j, to, d1).unwrap() })
                .collect();
            Ok(vec![(v, carry_labels(labels, &carry), qi(1))])
        }),
        Site::Saddle { edges } => InducedMap::assemble(c0, c1, -euler, |v, res, labels| {
            let to = c1.group(c0.degree_of_vertex(v)).unwrap().resolution(v).unwrap();
            let mut src: Vec<usize> = edges.iter().map(|&e| res.circle_of(e)).collect();
            src.sort();
            src.dedup();
            let mut dst: Vec<usize> = edges.iter().filter(|&&e| d1.has_edge(e)).map(|&e| to.circle_of(e)).collect();
            dst.sort();
            dst.dedup();
            if src.len() + dst.len() != 3 {
                return Err(Error::Internal(format!(
                    "saddle turns {} circles into {} at vertex {v:b}",
                    src.len(),
                    dst.len()
                )));
            }
            let carry = (0..res.n_circles())
                .map(|j| if src.contains(&j) { usize::MAX } else { carry_circle(res, j, to, d1).unwrap() })
                .collect();
            let m = CircleMatch { src, dst, carry };
            Ok(edge_map(&p, &m, labels, false).into_iter().map(|(l, c)| (v, l, c)).collect())
        }),
        Site::Kink {
            crossing,
            kink,
            strand,
            added,
        } => {
            let kinked = if added { d1 } else { d0 };
            let bit = kinked.crossings()[crossing].sign() == crate::diagram::Sign::Positive;
            if added {
                InducedMap::assemble(c0, c1, 0, |v, res, labels| {
                    kink_in(&p, c1, res, v, labels, crossing, kink, strand, bit, d1)
                })
            } else {
                InducedMap::assemble(c0, c1, 0, |v, res, labels| {
                    kink_out(&p, c1, res, v, labels, crossing, kink, strand, bit, d1)
                })
            }
        }
        Site::Bigon { crossings, bigon, added } => {
            if added {
                InducedMap::assemble(c0, c1, 0, |v, res, labels| bigon_in(&p, c1, res, v, labels, crossings, bigon, d1))
            } else {
                InducedMap::assemble(c0, c1, 0, |v, res, labels| bigon_out(&p, c0, c1, res, v, labels, crossings, bigon))
            }
        }
    }
}

/// Sign making the slice where the new crossings contribute one 1-bit at
/// `pos` isomorphic to the smaller complex: `(-1)^(1-bits above pos)`.
fn twist(v_big: u64, pos: usize) -> Q {
    qi(if (v_big >> (pos + 1)).count_ones().is_multiple_of(2) { 1 } else { -1 })
}

fn resolution_at(c: &FilteredComplex, v: u64) -> &Resolution {
    c.group(c.degree_of_vertex(v)).unwrap().resolution(v).unwrap()
}

/// Plain diagram into the kinked one. Positive kink: `w ↦ 1_O ⊗ w` on the
/// slice where the kink circle splits off; negative kink:
/// `w ↦ X_O ⊗ w - 1_O ⊗ X w`, with `X` acting on the strand's circle.
#[allow(clippy::too_many_arguments)]
fn kink_in(
    p: &FrobeniusParams,
    c1: &FilteredComplex,
    res: &Resolution,
    v: u64,
    labels: u64,
    crossing: usize,
    kink: EdgeId,
    strand: EdgeId,
    bit: bool,
    d1: &LinkDiagram,
) -> Result<Image> {
    let w = insert_bit(v, crossing, bit);
    let to = resolution_at(c1, w);
    let carry: Vec<usize> = (0..res.n_circles()).map(|j| carry_circle(res, j, to, d1).unwrap()).collect();
    let base = carry_labels(labels, &carry);
    let o = to.circle_of(kink);
    let sign = if bit { twist(w, crossing) } else { qi(1) };
    if bit {
        return Ok(vec![(w, base, sign)]);
    }
    let s = to.circle_of(strand);
    let mut out = vec![(w, base | 1 << o, sign.clone())];
    for (l, c) in times_x(p, base, s) {
        out.push((w, l, -c * &sign));
    }
    Ok(out)
}

/// Kinked diagram onto the plain one. Positive kink: `1_O ⊗ w ↦ w`,
/// `X_O ⊗ w ↦ (h - X) w` on the split slice; negative kink: `ℓ ⊗ w ↦ ε(ℓ) w`.
#[allow(clippy::too_many_arguments)]
fn kink_out(
    p: &FrobeniusParams,
    c1: &FilteredComplex,
    res: &Resolution,
    v: u64,
    labels: u64,
    crossing: usize,
    kink: EdgeId,
    strand: EdgeId,
    bit: bool,
    d1: &LinkDiagram,
) -> Result<Image> {
    if (v >> crossing & 1 == 1) != bit {
        return Ok(Vec::new());
    }
    let w = remove_bit(v, crossing);
    let to = resolution_at(c1, w);
    let o = res.circle_of(kink);
    let carry: Vec<usize> = (0..res.n_circles())
        .map(|j| if j == o { usize::MAX } else { carry_circle(res, j, to, d1).unwrap() })
        .collect();
    let base = carry_labels(labels, &carry);
    let x_on_kink = labels >> o & 1 == 1;
    if !bit {
        return Ok(if x_on_kink { vec![(w, base, qi(1))] } else { Vec::new() });
    }
    let sign = twist(v, crossing);
    if !x_on_kink {
        return Ok(vec![(w, base, sign)]);
    }
    let s = to.circle_of(strand);
    let mut out = vec![(w, base, p.h().clone() * &sign)];
    for (l, c) in times_x(p, base, s) {
        out.push((w, l, -c * &sign));
    }
    Ok(out)
}

/// The four slices of a bigon at a vertex of the smaller diagram.
struct BigonSlices {
    a: u64,
    id: u64,
    lp: u64,
    c: u64,
    /// crossing flipped from `a` to `id` (and from `lp` to `c`)
    pos_id: usize,
    /// crossing flipped from `a` to `lp` (and from `id` to `c`)
    pos_lp: usize,
}

fn bigon_slices(big: &FilteredComplex, v_small: u64, crossings: [usize; 2], bigon: [EdgeId; 2]) -> BigonSlices {
    let [p1, p2] = crossings;
    let at = |b1: bool, b2: bool| insert_bit(insert_bit(v_small, p1, b1), p2, b2);
    let a = at(false, false);
    let c = at(true, true);
    let (u, w) = (at(true, false), at(false, true));
    let is_loop = |x: u64| {
        let res = resolution_at(big, x);
        let k = res.circle_of(bigon[0]);
        k == res.circle_of(bigon[1]) && res.circles[k].edges.len() == 2
    };
    if is_loop(u) {
        BigonSlices { a, id: w, lp: u, c, pos_id: p2, pos_lp: p1 }
    } else {
        debug_assert!(is_loop(w));
        BigonSlices { a, id: u, lp: w, c, pos_id: p1, pos_lp: p2 }
    }
}

/// Small diagram into the bigon one: the identity onto the slice where the
/// strands pass straight, plus `-(s_id→c / s_loop→c) 1_O ⊗ (id→c map)(w)` on
/// the slice with the bigon circle.
#[allow(clippy::too_many_arguments)]
fn bigon_in(
    p: &FrobeniusParams,
    c1: &FilteredComplex,
    res: &Resolution,
    v: u64,
    labels: u64,
    crossings: [usize; 2],
    bigon: [EdgeId; 2],
    d1: &LinkDiagram,
) -> Result<Image> {
    let s = bigon_slices(c1, v, crossings, bigon);
    let (r_id, r_lp, r_c) = (resolution_at(c1, s.id), resolution_at(c1, s.lp), resolution_at(c1, s.c));
    let eps = twist(s.id, s.pos_id);
    let carry: Vec<usize> = (0..res.n_circles()).map(|j| carry_circle(res, j, r_id, d1).unwrap()).collect();
    let base = carry_labels(labels, &carry);
    let mut out = vec![(s.id, base, eps.clone())];
    let k = -qi(edge_sign(s.id, s.pos_lp)) / qi(edge_sign(s.lp, s.pos_id));
    let m = match_circles(d1, s.pos_lp, r_id, r_c);
    // circles of c back to the non-bigon circles of the loop slice
    let o = r_lp.circle_of(bigon[0]);
    let mut back = vec![usize::MAX; r_c.n_circles()];
    for j in 0..r_lp.n_circles() {
        if j != o {
            back[r_c.circle_of(r_lp.circles[j].smallest_edge())] = j;
        }
    }
    for (l, c) in edge_map(p, &m, base, false) {
        out.push((s.lp, carry_labels(l, &back), c * &k * &eps));
    }
    Ok(out)
}

/// Bigon diagram onto the small one: the identity on the straight slice and
/// `ℓ ⊗ t ↦ -(s_a→id / s_a→loop) ε(ℓ) (a→id map)(t)` on the loop slice.
#[allow(clippy::too_many_arguments)]
fn bigon_out(
    p: &FrobeniusParams,
    c0: &FilteredComplex,
    c1: &FilteredComplex,
    res: &Resolution,
    v: u64,
    labels: u64,
    crossings: [usize; 2],
    bigon: [EdgeId; 2],
) -> Result<Image> {
    let (d1, d0) = (c1.diagram(), c0.diagram());
    let [p1, p2] = crossings;
    let w = remove_bit(remove_bit(v, p2), p1);
    let s = bigon_slices(c0, w, crossings, bigon);
    let to = resolution_at(c1, w);
    let eps = twist(s.id, s.pos_id);
    if v == s.id {
        let carry: Vec<usize> = (0..res.n_circles()).map(|j| carry_circle(res, j, to, d1).unwrap()).collect();
        return Ok(vec![(w, carry_labels(labels, &carry), eps)]);
    }
    if v != s.lp {
        return Ok(Vec::new());
    }
    let o = res.circle_of(bigon[0]);
    if labels >> o & 1 == 0 {
        return Ok(Vec::new());
    }
    let (r_a, r_id) = (resolution_at(c0, s.a), resolution_at(c0, s.id));
    let to_a: Vec<usize> = (0..res.n_circles())
        .map(|j| if j == o { usize::MAX } else { r_a.circle_of(res.circles[j].smallest_edge()) })
        .collect();
    let t = carry_labels(labels, &to_a);
    let k = -qi(edge_sign(s.a, s.pos_id)) / qi(edge_sign(s.a, s.pos_lp));
    let m = match_circles(d0, s.pos_id, r_a, r_id);
    let carry: Vec<usize> = (0..r_id.n_circles()).map(|j| carry_circle(r_id, j, to, d1).unwrap()).collect();
    Ok(edge_map(p, &m, t, false)
        .into_iter()
        .map(|(l, c)| (w, carry_labels(l, &carry), c * &k * &eps))
        .collect())
}

/// One move of a movie with the diagrams on both sides.
#[derive(Clone, Debug)]
pub struct Event {
    pub mv: Move,
    pub before: LinkDiagram,
    pub after: LinkDiagram,
    site: Site,
}

impl Event {
    pub fn new(before: &LinkDiagram, mv: Move) -> Result<Event> {
        let applied = moves::apply(before, &mv)?;
        Ok(Event {
            mv,
            before: before.clone(),
            after: applied.diagram,
            site: applied.site,
        })
    }

    pub fn euler(&self) -> i64 {
        self.mv.euler()
    }

    /// The chain map between complexes built on `before` and `after`.
    pub fn induced_map(&self, c0: &FilteredComplex, c1: &FilteredComplex) -> Result<InducedMap> {
        if c0.diagram() != &self.before || c1.diagram() != &self.after {
            return Err(Error::Contract("complexes do not match the move's diagrams".into()));
        }
        elementary_map(&self.site, self.euler(), c0, c1)
    }
}

/// A start diagram and a sequence of moves.
#[derive(Clone, Debug)]
pub struct Movie {
    pub start: LinkDiagram,
    pub events: Vec<Event>,
}

impl Movie {
    pub fn new(start: LinkDiagram) -> Movie {
        Movie {
            start,
            events: Vec::new(),
        }
    }

    pub fn end(&self) -> &LinkDiagram {
        self.events.last().map_or(&self.start, |e| &e.after)
    }

    pub fn push(&mut self, mv: Move) -> Result<()> {
        let event = Event::new(self.end(), mv)?;
        self.events.push(event);
        Ok(())
    }

    /// One move per line (or `;`-separated); `#` starts a comment.
    pub fn parse(start: LinkDiagram, text: &str) -> Result<Movie> {
        let mut movie = Movie::new(start);
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for part in line.split(';') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let mv = Move::parse(part).map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))?;
                movie.push(mv).map_err(|e| match e {
                    Error::Move(m) => Error::Move(format!("line {}: `{part}`: {m}", n + 1)),
                    other => other,
                })?;
            }
        }
        Ok(movie)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.events.iter().map(Event::euler).sum()
    }

    /// Every intermediate diagram with its edge and face numbering.
    pub fn dry_run(&self) -> String {
        let mut out = format!("start\n{}", self.start.describe());
        for (k, e) in self.events.iter().enumerate() {
            out.push_str(&format!("after {}: {}\n{}", k + 1, e.mv, e.after.describe()));
        }
        out
    }

    /// Complexes of all diagrams and the elementary maps between them.
    pub fn evaluate(&self, p: &FrobeniusParams, max_crossings: usize) -> Result<MovieMaps> {
        let mut complexes = vec![FilteredComplex::build_capped(&self.start, p, max_crossings)?];
        let mut steps = Vec::with_capacity(self.events.len());
        for e in &self.events {
            let next = FilteredComplex::build_capped(&e.after, p, max_crossings)?;
            steps.push(e.induced_map(complexes.last().unwrap(), &next)?);
            complexes.push(next);
        }
        Ok(MovieMaps { complexes, steps })
    }

    /// Connected components of the cobordism surface, as a union-find over
    /// `(diagram index, link component)` flattened to one index each.
    fn surface(&self) -> (Vec<usize>, UnionFind) {
        let diagrams: Vec<&LinkDiagram> =
            std::iter::once(&self.start).chain(self.events.iter().map(|e| &e.after)).collect();
        let mut offsets = Vec::with_capacity(diagrams.len());
        let mut total = 0;
        for d in &diagrams {
            offsets.push(total);
            total += d.n_components();
        }
        let mut uf = UnionFind::new(total);
        for (k, e) in self.events.iter().enumerate() {
            let (b, a) = (diagrams[k], diagrams[k + 1]);
            for e2 in a.edges() {
                if b.has_edge(e2) {
                    uf.union(offsets[k] + b.component_of(e2), offsets[k + 1] + a.component_of(e2));
                }
            }
            if let Site::Saddle { edges } = e.site {
                uf.union(offsets[k] + b.component_of(edges[0]), offsets[k] + b.component_of(edges[1]));
            }
        }
        (offsets, uf)
    }

    /// Whether a labelling of the start and one of the end extend to a
    /// labelling of the surface that is constant on its components.
    pub fn compatible(&self, start: CanonicalState, end: CanonicalState) -> bool {
        let (offsets, mut uf) = self.surface();
        let last = offsets.len() - 1;
        let mut label: BTreeMap<usize, bool> = BTreeMap::new();
        let pairs = (0..self.start.n_components())
            .map(|i| (offsets[0] + i, start >> i & 1 == 1))
            .chain((0..self.end().n_components()).map(|i| (offsets[last] + i, end >> i & 1 == 1)));
        for (node, l) in pairs {
            let root = uf.find(node);
            if *label.entry(root).or_insert(l) != l {
                return false;
            }
        }
        true
    }

    /// Whether the surface has a component with no boundary at either end.
    pub fn has_closed_components(&self) -> bool {
        let (offsets, mut uf) = self.surface();
        let last = offsets.len() - 1;
        let total = offsets[last] + self.end().n_components();
        let mut boundary = std::collections::BTreeSet::new();
        for i in 0..self.start.n_components() {
            boundary.insert(uf.find(offsets[0] + i));
        }
        for i in 0..self.end().n_components() {
            boundary.insert(uf.find(offsets[last] + i));
        }
        (0..total).any(|n| !boundary.contains(&uf.find(n)))
    }
}

/// Complexes along a movie with the elementary maps between consecutive ones.
pub struct MovieMaps {
    pub complexes: Vec<FilteredComplex>,
    pub steps: Vec<InducedMap>,
}

impl MovieMaps {
    pub fn source(&self) -> &FilteredComplex {
        &self.complexes[0]
    }
    pub fn target(&self) -> &FilteredComplex {
        self.complexes.last().unwrap()
    }

    /// Composite of all steps.
    pub fn composite(&self) -> InducedMap {
        self.steps
            .iter()
            .fold(InducedMap::identity(self.source()), |acc, s| acc.then(s))
    }
}

/// Image of a canonical generator written in the canonical basis of the target.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorImage {
    pub state: CanonicalState,
    pub r: i64,
    /// nonzero coefficients by target state
    pub coefficients: Vec<(CanonicalState, Q)>,
}

/// Expands `F(h_φ)` for every canonical generator of the source.
pub fn expand_generators(map: &InducedMap, c0: &FilteredComplex, c1: &FilteredComplex) -> Result<Vec<GeneratorImage>> {
    let gens0 = canonical_generators(c0)?;
    let gens1 = canonical_generators(c1)?;
    gens0.iter().map(|g| expand_one(map, c1, &gens1, g)).collect()
}

fn expand_one(
    map: &InducedMap,
    c1: &FilteredComplex,
    gens1: &[CanonicalGenerator],
    g: &CanonicalGenerator,
) -> Result<GeneratorImage> {
    let image = map.apply(g.r, &g.vector);
    let here: Vec<&CanonicalGenerator> = gens1.iter().filter(|h| h.r == g.r).collect();
    let mut coefficients = Vec::new();
    if !image.is_zero() {
        let boundaries: Subspace = c1.differential(g.r - 1).image();
        let vectors: Vec<SparseVec> = here.iter().map(|h| h.vector.clone()).collect();
        let coeffs = solve_modulo(c1.dim(g.r), &vectors, &boundaries, &image).ok_or_else(|| {
            Error::Internal(format!("image of state {:b} is not a combination of canonical classes", g.state))
        })?;
        for (h, c) in here.iter().zip(coeffs) {
            if !num_traits::Zero::is_zero(&c) {
                coefficients.push((h.state, c));
            }
        }
    }
    Ok(GeneratorImage {
        state: g.state,
        r: g.r,
        coefficients,
    })
}

pub const MOVIE_REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct StepJson {
    #[serde(rename = "move")]
    pub mv: String,
    pub pd: String,
    pub euler: i64,
    pub chain_map: bool,
    pub filtered: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ImageJson {
    pub state: String,
    pub hdeg: i64,
    /// `(target state, coefficient)`
    pub image: Vec<(String, String)>,
    pub compatible: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MovieReport {
    pub version: u32,
    pub start: String,
    pub end: String,
    pub euler: i64,
    pub degree: i64,
    pub steps: Vec<StepJson>,
    pub chain_map: bool,
    pub filtered: bool,
    pub homology_rank: usize,
    pub closed_components: bool,
    pub generators: Vec<ImageJson>,
}

fn state_string(s: CanonicalState, n: usize) -> String {
    (0..n).map(|i| if s >> i & 1 == 1 { 'b' } else { 'a' }).collect()
}

impl MovieReport {
    pub fn compute(movie: &Movie, p: &FrobeniusParams, max_crossings: usize) -> Result<MovieReport> {
        let maps = movie.evaluate(p, max_crossings)?;
        let mut steps = Vec::new();
        for (k, (e, m)) in movie.events.iter().zip(&maps.steps).enumerate() {
            let (c0, c1) = (&maps.complexes[k], &maps.complexes[k + 1]);
            steps.push(StepJson {
                mv: e.mv.to_string(),
                pd: e.after.to_pd_string(),
                euler: e.euler(),
                chain_map: m.is_chain_map(c0, c1),
                filtered: m.is_filtered(c0, c1),
            });
        }
        let total = maps.composite();
        let (c0, c1) = (maps.source(), maps.target());
        let n0 = movie.start.n_components();
        let n1 = movie.end().n_components();
        let generators = expand_generators(&total, c0, c1)?
            .into_iter()
            .map(|g| ImageJson {
                state: state_string(g.state, n0),
                hdeg: g.r,
                compatible: g.coefficients.iter().all(|(s, _)| movie.compatible(g.state, *s)),
                image: g
                    .coefficients
                    .iter()
                    .map(|(s, c)| (state_string(*s, n1), c.to_string()))
                    .collect(),
            })
            .collect();
        Ok(MovieReport {
            version: MOVIE_REPORT_VERSION,
            start: movie.start.to_pd_string(),
            end: movie.end().to_pd_string(),
            euler: movie.euler_characteristic(),
            degree: total.degree,
            chain_map: steps.iter().all(|s| s.chain_map) && total.is_chain_map(c0, c1),
            filtered: total.is_filtered(c0, c1),
            steps,
            homology_rank: total.homology_rank(c0, c1)?,
            closed_components: movie.has_closed_components(),
            generators,
        })
    }
}
