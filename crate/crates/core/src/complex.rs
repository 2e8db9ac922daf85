//! The filtered cube complex of a diagram.
//!
//! Generators at a cube vertex are labellings of its circles by `1` or `X`,
//! stored as a bitmask over the circles (bit set = `X`). Circles are ordered
//! by their smallest edge, so the index of a generator within its vertex
//! block is the mask itself.

use serde::Serialize;

use crate::algebra::{FrobeniusParams, Q};
use crate::diagram::{LinkDiagram, Resolution};
use crate::error::{Error, Result};
use crate::exactla::{SparseMatrix, SparseVec};
use crate::par_map;

pub const DEFAULT_MAX_CROSSINGS: usize = 14;

/// One standard basis vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Generator {
    pub vertex: u64,
    /// bit `j` set when circle `j` carries `X`
    pub labels: u64,
}

/// Chain group in one homological degree.
#[derive(Clone, Debug)]
pub struct ChainGroup {
    pub r: i64,
    vertices: Vec<u64>,
    offsets: Vec<usize>,
    resolutions: Vec<Resolution>,
    q: Vec<i64>,
}

impl ChainGroup {
    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn vertices(&self) -> &[u64] {
        &self.vertices
    }

    pub fn resolution(&self, vertex: u64) -> Option<&Resolution> {
        self.vertex_slot(vertex).map(|k| &self.resolutions[k])
    }

    fn vertex_slot(&self, vertex: u64) -> Option<usize> {
        self.vertices.binary_search(&vertex).ok()
    }

    pub fn generator(&self, i: usize) -> Generator {
        let k = self.offsets.partition_point(|&o| o <= i) - 1;
        Generator {
            vertex: self.vertices[k],
            labels: (i - self.offsets[k]) as u64,
        }
    }

    pub fn index_of(&self, g: Generator) -> Option<usize> {
        let k = self.vertex_slot(g.vertex)?;
        let n = self.resolutions[k].n_circles();
        (g.labels < 1u64 << n).then(|| self.offsets[k] + g.labels as usize)
    }

    /// q-grading of every basis vector, in basis order.
    pub fn q(&self) -> &[i64] {
        &self.q
    }

    /// Basis indices of the vertex block.
    pub fn block(&self, vertex: u64) -> Option<std::ops::Range<usize>> {
        let k = self.vertex_slot(vertex)?;
        let end = self.offsets.get(k + 1).copied().unwrap_or(self.q.len());
        Some(self.offsets[k]..end)
    }
}

/// The complex together with its full and degree-preserving differentials.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    diagram: LinkDiagram,
    params: FrobeniusParams,
    n_plus: usize,
    n_minus: usize,
    groups: Vec<ChainGroup>,
    d: Vec<SparseMatrix>,
    d_top: Vec<SparseMatrix>,
}

/// `(-1)^(number of 1-bits of v below position i)`.
pub fn edge_sign(v: u64, i: usize) -> i64 {
    if (v & ((1u64 << i) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// How the circles of `v` correspond to those of `w = v + e_i`.
pub(crate) struct CircleMatch {
    /// circles of the source touching the changed crossing
    pub src: Vec<usize>,
    /// circles of the target touching the changed crossing
    pub dst: Vec<usize>,
    /// target index of every untouched source circle (`usize::MAX` for touched ones)
    pub carry: Vec<usize>,
}

pub(crate) fn match_circles(diagram: &LinkDiagram, c: usize, from: &Resolution, to: &Resolution) -> CircleMatch {
    let edges = diagram.crossings()[c].edges;
    let mut src: Vec<usize> = edges.iter().map(|&e| from.circle_of(e)).collect();
    src.sort();
    src.dedup();
    let mut dst: Vec<usize> = edges.iter().map(|&e| to.circle_of(e)).collect();
    dst.sort();
    dst.dedup();
    let carry = from
        .circles
        .iter()
        .enumerate()
        .map(|(j, circ)| {
            if src.contains(&j) {
                usize::MAX
            } else {
                to.circle_of(circ.smallest_edge())
            }
        })
        .collect();
    CircleMatch { src, dst, carry }
}

impl CircleMatch {
    fn base(&self, labels: u64) -> u64 {
        let mut out = 0;
        for (j, &t) in self.carry.iter().enumerate() {
            if t != usize::MAX && labels >> j & 1 == 1 {
                out |= 1 << t;
            }
        }
        out
    }
}

/// Image of one generator under a cube edge map, as `(target labels, coefficient)`.
/// `top` selects the degree-preserving maps.
pub(crate) fn edge_map(
    params: &FrobeniusParams,
    m: &CircleMatch,
    labels: u64,
    top: bool,
) -> Vec<(u64, Q)> {
    let base = m.base(labels);
    let bit = |j: usize| (labels >> j & 1) as usize;
    let mut out = Vec::new();
    match (m.src.len(), m.dst.len()) {
        (2, 1) => {
            let (la, lb) = (bit(m.src[0]), bit(m.src[1]));
            let t = m.dst[0];
            if top {
                if let Some(k) = params.top_mult(la, lb) {
                    out.push((base | (k as u64) << t, Q::from_integer(1.into())));
                }
            } else {
                let p = params.mult(&crate::algebra::Elem::basis(la), &crate::algebra::Elem::basis(lb));
                for (k, c) in p.c.iter().enumerate() {
                    if !num_traits::Zero::is_zero(c) {
                        out.push((base | (k as u64) << t, c.clone()));
                    }
                }
            }
        }
        (1, 2) => {
            let l = bit(m.src[0]);
            let (t0, t1) = (m.dst[0], m.dst[1]);
            if top {
                for (x, y) in params.top_comult(l) {
                    out.push((base | (x as u64) << t0 | (y as u64) << t1, Q::from_integer(1.into())));
                }
            } else {
                let cm = params.comult(&crate::algebra::Elem::basis(l));
                for x in 0..2 {
                    for y in 0..2 {
                        let c = &cm.c[x][y];
                        if !num_traits::Zero::is_zero(c) {
                            out.push((base | (x as u64) << t0 | (y as u64) << t1, c.clone()));
                        }
                    }
                }
            }
        }
        (a, b) => panic!("a cube edge changes {a} circles into {b}"),
    }
    out
}

fn monomial_degree(labels: u64, n_circles: usize) -> i64 {
    let x = labels.count_ones() as i64;
    2 * x - n_circles as i64
}

impl FilteredComplex {
    pub fn build(diagram: &LinkDiagram, params: &FrobeniusParams) -> Result<Self> {
        Self::build_capped(diagram, params, DEFAULT_MAX_CROSSINGS)
    }

    pub fn build_capped(diagram: &LinkDiagram, params: &FrobeniusParams, max_crossings: usize) -> Result<Self> {
        let n = diagram.n_crossings();
        if n > max_crossings {
            return Err(Error::Resource(format!(
                "{n} crossings exceeds the cap of {max_crossings}"
            )));
        }
        if n > 40 {
            return Err(Error::Resource(format!("{n} crossings is beyond any practical cube")));
        }
        let n_plus = diagram.n_plus();
        let n_minus = diagram.n_minus();
        let all: Vec<Resolution> = par_map(1usize << n, |v| diagram.resolve(v as u64));
        let mut groups = Vec::with_capacity(n + 1);
        let mut slots: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for v in 0..1usize << n {
            slots[v.count_ones() as usize].push(v);
        }
        let mut all: Vec<Option<Resolution>> = all.into_iter().map(Some).collect();
        for (h, vs) in slots.into_iter().enumerate() {
            let r = h as i64 - n_plus as i64;
            let mut offsets = Vec::with_capacity(vs.len());
            let mut resolutions = Vec::with_capacity(vs.len());
            let mut q = Vec::new();
            for &v in &vs {
                let res = all[v].take().expect("each vertex once");
                offsets.push(q.len());
                let k = res.n_circles();
                for labels in 0..1u64 << k {
                    q.push(monomial_degree(labels, k) - r + n_plus as i64 - n_minus as i64);
                }
                resolutions.push(res);
            }
            groups.push(ChainGroup {
                r,
                vertices: vs.into_iter().map(|v| v as u64).collect(),
                offsets,
                resolutions,
                q,
            });
        }
        let mut d = Vec::with_capacity(n);
        let mut d_top = Vec::with_capacity(n);
        for h in 0..n {
            let (full, top) = Self::differential_between(diagram, params, &groups[h], &groups[h + 1]);
            d.push(full);
            d_top.push(top);
        }
        Ok(FilteredComplex {
            diagram: diagram.clone(),
            params: params.clone(),
            n_plus,
            n_minus,
            groups,
            d,
            d_top,
        })
    }

    fn differential_between(
        diagram: &LinkDiagram,
        params: &FrobeniusParams,
        src: &ChainGroup,
        dst: &ChainGroup,
    ) -> (SparseMatrix, SparseMatrix) {
        let n = diagram.n_crossings();
        let per_vertex: Vec<(Vec<SparseVec>, Vec<SparseVec>)> = par_map(src.vertices.len(), |k| {
            let v = src.vertices[k];
            let res = &src.resolutions[k];
            let nc = 1usize << res.n_circles();
            let mut full: Vec<Vec<(usize, Q)>> = vec![Vec::new(); nc];
            let mut top: Vec<Vec<(usize, Q)>> = vec![Vec::new(); nc];
            for i in 0..n {
                if v >> i & 1 == 1 {
                    continue;
                }
                let w = v | 1 << i;
                let sign = Q::from_integer(edge_sign(v, i).into());
                let wk = dst.vertex_slot(w).expect("target vertex");
                let wres = &dst.resolutions[wk];
                let off = dst.offsets[wk];
                let m = match_circles(diagram, i, res, wres);
                for labels in 0..nc as u64 {
                    for (t, c) in edge_map(params, &m, labels, false) {
                        full[labels as usize].push((off + t as usize, c * &sign));
                    }
                    for (t, c) in edge_map(params, &m, labels, true) {
                        top[labels as usize].push((off + t as usize, c * &sign));
                    }
                }
            }
            (
                full.into_iter().map(SparseVec::from_entries).collect(),
                top.into_iter().map(SparseVec::from_entries).collect(),
            )
        });
        let mut full_cols = Vec::with_capacity(src.dim());
        let mut top_cols = Vec::with_capacity(src.dim());
        for (f, t) in per_vertex {
            full_cols.extend(f);
            top_cols.extend(t);
        }
        (
            SparseMatrix::from_columns(dst.dim(), full_cols),
            SparseMatrix::from_columns(dst.dim(), top_cols),
        )
    }

    pub fn diagram(&self) -> &LinkDiagram {
        &self.diagram
    }
    pub fn params(&self) -> &FrobeniusParams {
        &self.params
    }
    pub fn n_plus(&self) -> usize {
        self.n_plus
    }
    pub fn n_minus(&self) -> usize {
        self.n_minus
    }
    pub fn n_components(&self) -> usize {
        self.diagram.n_components()
    }

    pub fn min_degree(&self) -> i64 {
        -(self.n_plus as i64)
    }
    pub fn max_degree(&self) -> i64 {
        self.diagram.n_crossings() as i64 - self.n_plus as i64
    }
    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.min_degree()..=self.max_degree()
    }

    /// Homological degree of a cube vertex.
    pub fn degree_of_vertex(&self, v: u64) -> i64 {
        v.count_ones() as i64 - self.n_plus as i64
    }

    pub fn group(&self, r: i64) -> Option<&ChainGroup> {
        let h = r - self.min_degree();
        if h < 0 {
            return None;
        }
        self.groups.get(h as usize)
    }

    pub fn dim(&self, r: i64) -> usize {
        self.group(r).map_or(0, ChainGroup::dim)
    }

    pub fn total_dim(&self) -> usize {
        self.groups.iter().map(ChainGroup::dim).sum()
    }

    fn block_index(&self, r: i64) -> Option<usize> {
        let h = r - self.min_degree();
        (h >= 0 && (h as usize) < self.d.len()).then_some(h as usize)
    }

    /// `d : C^r -> C^{r+1}`; a zero map at the ends of the cube.
    pub fn differential(&self, r: i64) -> SparseMatrix {
        match self.block_index(r) {
            Some(h) => self.d[h].clone(),
            None => SparseMatrix::zeros(self.dim(r + 1), self.dim(r)),
        }
    }

    pub fn differential_ref(&self, r: i64) -> Option<&SparseMatrix> {
        self.block_index(r).map(|h| &self.d[h])
    }

    /// The degree-preserving part of `d`, built from `m'` and `Δ'`.
    pub fn top_differential(&self, r: i64) -> SparseMatrix {
        match self.block_index(r) {
            Some(h) => self.d_top[h].clone(),
            None => SparseMatrix::zeros(self.dim(r + 1), self.dim(r)),
        }
    }

    pub fn q_grading(&self, r: i64, index: usize) -> Option<i64> {
        self.group(r)?.q.get(index).copied()
    }

    pub fn q_of(&self, g: Generator) -> Option<i64> {
        let r = self.degree_of_vertex(g.vertex);
        let grp = self.group(r)?;
        grp.index_of(g).map(|i| grp.q[i])
    }

    /// Basis vectors of `C^r` with `q <= k`; they span `F^k C^r`.
    pub fn filtration_basis(&self, k: i64, r: i64) -> Vec<usize> {
        self.group(r).map_or_else(Vec::new, |g| {
            (0..g.dim()).filter(|&i| g.q[i] <= k).collect()
        })
    }

    /// Smallest and largest q over the whole complex.
    pub fn q_range(&self) -> Option<(i64, i64)> {
        let all = self.groups.iter().flat_map(|g| g.q.iter().copied());
        let (lo, hi) = all.fold((i64::MAX, i64::MIN), |(lo, hi), x| (lo.min(x), hi.max(x)));
        (lo <= hi).then_some((lo, hi))
    }

    /// Debug listing of the basis and the differential.
    pub fn dump(&self) -> ComplexDump {
        let degrees = self
            .groups
            .iter()
            .map(|g| DegreeDump {
                r: g.r,
                basis: (0..g.dim())
                    .map(|i| {
                        let gen = g.generator(i);
                        BasisDump {
                            vertex: format!("{:0width$b}", gen.vertex, width = self.diagram.n_crossings()),
                            labels: label_string(gen.labels, g.resolution(gen.vertex).unwrap().n_circles()),
                            q: g.q[i],
                        }
                    })
                    .collect(),
                differential: self
                    .differential_ref(g.r)
                    .map(|m| {
                        m.triplets()
                            .into_iter()
                            .map(|(i, j, v)| (i, j, v.to_string()))
                            .collect()
                    })
                    .unwrap_or_default(),
            })
            .collect();
        ComplexDump {
            params: self.params.to_string(),
            n_plus: self.n_plus,
            n_minus: self.n_minus,
            components: self.n_components(),
            sign_convention: crate::SIGN_CONVENTION,
            degrees,
        }
    }
}

/// Labels of the circles in order, `1` or `X`.
pub fn label_string(labels: u64, n_circles: usize) -> String {
    (0..n_circles)
        .map(|j| if labels >> j & 1 == 1 { 'X' } else { '1' })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisDump {
    pub vertex: String,
    pub labels: String,
    pub q: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeDump {
    pub r: i64,
    pub basis: Vec<BasisDump>,
    /// `(row, column, value)` of `d : C^r -> C^{r+1}`
    pub differential: Vec<(usize, usize, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexDump {
    pub params: String,
    pub n_plus: usize,
    pub n_minus: usize,
    pub components: usize,
    pub sign_convention: &'static str,
    pub degrees: Vec<DegreeDump>,
}

#[cfg(test)]
mod tests;
