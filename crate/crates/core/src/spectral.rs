//! Pages of the spectral sequence of the q-filtration.
//!
//! Pages are indexed by the q-drop of their differential: `E_0` is the
//! associated graded, `E_1` is the homology of the degree-preserving part of
//! `d`, and `d_k` lowers q by exactly `k`.
//!
//! The production route reduces every `d^r` with rows and columns sorted by q
//! and reads the pages off the resulting pairs: a pair whose source sits `k`
//! levels above its target survives on `E_0 .. E_k` and is cancelled by `d_k`.
//! [`page_by_subspaces`] evaluates the textbook subquotient formula directly
//! and serves as an independent check on small complexes.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;
use serde::Serialize;

use crate::algebra::Q;
use crate::complex::FilteredComplex;
use crate::error::Result;
use crate::exactla::{SparseMatrix, SparseVec, Subspace};
use crate::par_map;

/// Bigraded dimensions keyed by `(r, q)`; zero entries are not stored.
pub type Cells = BTreeMap<(i64, i64), usize>;

/// A source/target pair cancelled by some `d_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Pair {
    /// homological degree of the source
    pub r: i64,
    pub q_src: i64,
    pub q_dst: i64,
    /// basis index of the source in `C^r`
    pub src: usize,
    /// basis index of the target in `C^{r+1}`
    pub dst: usize,
}

impl Pair {
    pub fn drop(&self) -> i64 {
        self.q_src - self.q_dst
    }
}

/// A class that survives to the limit page.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Essential {
    pub r: i64,
    pub q: i64,
    pub index: usize,
}

/// Pairing of the whole complex.
#[derive(Clone, Debug)]
pub struct Persistence {
    pub pairs: Vec<Pair>,
    pub essential: Vec<Essential>,
    chain: Cells,
    q_spread: i64,
}

/// Column reduction; columns are sparse over row positions, the pivot is the
/// largest row position. Returns the pivot of every column.
fn reduce_columns(cols: Vec<SparseVec>, skip: &[bool], nrows: usize) -> Vec<Option<usize>> {
    let mut owner: Vec<Option<usize>> = vec![None; nrows];
    let mut reduced: Vec<SparseVec> = Vec::with_capacity(cols.len());
    let mut pivots = Vec::with_capacity(cols.len());
    for (j, mut v) in cols.into_iter().enumerate() {
        if skip[j] {
            reduced.push(SparseVec::new());
            pivots.push(None);
            continue;
        }
        while let Some((p, val)) = v.last().cloned() {
            match owner[p] {
                Some(o) => v.axpy(&-val, &reduced[o]),
                None => break,
            }
        }
        match v.last().cloned() {
            Some((p, val)) => {
                if !val.is_one() {
                    v.scale(&(Q::one() / val));
                }
                owner[p] = Some(j);
                pivots.push(Some(p));
            }
            None => pivots.push(None),
        }
        reduced.push(v);
    }
    pivots
}

struct DegreeOrder {
    /// basis index at each position
    order: Vec<usize>,
    /// position of each basis index
    pos: Vec<usize>,
}

fn q_order(qs: &[i64]) -> DegreeOrder {
    let mut order: Vec<usize> = (0..qs.len()).collect();
    order.sort_by_key(|&i| (qs[i], i));
    let mut pos = vec![0; qs.len()];
    for (k, &i) in order.iter().enumerate() {
        pos[i] = k;
    }
    DegreeOrder { order, pos }
}

impl Persistence {
    pub fn compute(c: &FilteredComplex) -> Self {
        let degrees: Vec<i64> = c.degrees().collect();
        let qs: Vec<Vec<i64>> = degrees
            .iter()
            .map(|&r| c.group(r).map(|g| g.q().to_vec()).unwrap_or_default())
            .collect();
        let orders: Vec<DegreeOrder> = qs.iter().map(|q| q_order(q)).collect();
        let nd = degrees.len();
        let columns = |h: usize| -> Vec<SparseVec> {
            let d = c.differential_ref(degrees[h]).expect("interior degree");
            let (src, dst) = (&orders[h], &orders[h + 1]);
            src.order
                .iter()
                .map(|&j| {
                    SparseVec::from_entries(
                        d.col(j)
                            .entries()
                            .iter()
                            .map(|(i, v)| (dst.pos[*i], v.clone()))
                            .collect(),
                    )
                })
                .collect()
        };
        let n_maps = nd.saturating_sub(1);
        let mut pivots: Vec<Vec<Option<usize>>> = vec![Vec::new(); n_maps];
        // even maps first, in parallel; odd maps then skip columns already
        // known to be boundaries
        let evens: Vec<usize> = (0..n_maps).step_by(2).collect();
        let done = par_map(evens.len(), |k| {
            let h = evens[k];
            let skip = vec![false; orders[h].order.len()];
            reduce_columns(columns(h), &skip, orders[h + 1].order.len())
        });
        for (h, p) in evens.iter().zip(done) {
            pivots[*h] = p;
        }
        let odds: Vec<usize> = (1..n_maps).step_by(2).collect();
        let done = par_map(odds.len(), |k| {
            let h = odds[k];
            let mut skip = vec![false; orders[h].order.len()];
            for p in pivots[h - 1].iter().flatten() {
                skip[*p] = true;
            }
            reduce_columns(columns(h), &skip, orders[h + 1].order.len())
        });
        for (h, p) in odds.iter().zip(done) {
            pivots[*h] = p;
        }

        let mut pairs = Vec::new();
        let mut essential = Vec::new();
        let mut chain = Cells::new();
        for h in 0..nd {
            let r = degrees[h];
            let ord = &orders[h];
            let mut alive = vec![true; ord.order.len()];
            if h < n_maps {
                for (j, p) in pivots[h].iter().enumerate() {
                    if let Some(p) = p {
                        alive[j] = false;
                        let (src, dst) = (ord.order[j], orders[h + 1].order[*p]);
                        pairs.push(Pair {
                            r,
                            q_src: qs[h][src],
                            q_dst: qs[h + 1][dst],
                            src,
                            dst,
                        });
                    }
                }
            }
            if h > 0 {
                for p in pivots[h - 1].iter().flatten() {
                    alive[*p] = false;
                }
            }
            for (k, a) in alive.iter().enumerate() {
                let index = ord.order[k];
                *chain.entry((r, qs[h][index])).or_insert(0) += 1;
                if *a {
                    essential.push(Essential {
                        r,
                        q: qs[h][index],
                        index,
                    });
                }
            }
        }
        let q_spread = c.q_range().map_or(0, |(lo, hi)| hi - lo);
        Persistence {
            pairs,
            essential,
            chain,
            q_spread,
        }
    }

    /// Dimensions of the chain groups by `(r, q)`.
    pub fn chain_cells(&self) -> &Cells {
        &self.chain
    }

    pub fn max_drop(&self) -> Option<i64> {
        self.pairs.iter().map(Pair::drop).max()
    }

    /// `E_k` for `k >= 0`.
    pub fn page(&self, k: usize) -> SpectralPage {
        let k = k as i64;
        let mut cells = Cells::new();
        let mut dranks = Cells::new();
        for e in &self.essential {
            *cells.entry((e.r, e.q)).or_insert(0) += 1;
        }
        for p in &self.pairs {
            if p.drop() >= k {
                *cells.entry((p.r, p.q_src)).or_insert(0) += 1;
                *cells.entry((p.r + 1, p.q_dst)).or_insert(0) += 1;
            }
            if p.drop() == k {
                *dranks.entry((p.r, p.q_src)).or_insert(0) += 1;
            }
        }
        SpectralPage {
            k: k as usize,
            cells,
            dranks,
            collapsed: self.max_drop().is_none_or(|m| m < k),
        }
    }

    /// Pages up to the first one from which nothing changes, and at least `E_1`.
    pub fn all_pages(&self) -> Vec<SpectralPage> {
        let last = self.last_page();
        (0..=last).map(|k| self.page(k)).collect()
    }

    /// Index of the first page equal to the limit, never below 1.
    pub fn last_page(&self) -> usize {
        let last = self.max_drop().map_or(1, |m| (m + 1).max(1) as usize);
        debug_assert!(last as i64 <= self.q_spread + 1);
        last
    }

    /// Limit page dims summed over q.
    pub fn limit_by_degree(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for e in &self.essential {
            *out.entry(e.r).or_insert(0) += 1;
        }
        out
    }
}

/// One page of the spectral sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralPage {
    pub k: usize,
    pub cells: Cells,
    /// rank of `d_k` out of each `(r, q)`
    pub dranks: Cells,
    /// true when `d_j = 0` for every `j >= k`
    pub collapsed: bool,
}

impl SpectralPage {
    pub fn total(&self) -> usize {
        self.cells.values().sum()
    }

    pub fn dim(&self, r: i64, q: i64) -> usize {
        self.cells.get(&(r, q)).copied().unwrap_or(0)
    }

    pub fn by_degree(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for (&(r, _), &d) in &self.cells {
            *out.entry(r).or_insert(0) += d;
        }
        out
    }

    pub fn to_json(&self) -> PageJson {
        PageJson {
            k: self.k,
            cells: self.cells.iter().map(|(&(r, q), &d)| [r, q, d as i64]).collect(),
            dranks: self.dranks.iter().map(|(&(r, q), &d)| [r, q, d as i64]).collect(),
            collapsed: self.collapsed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PageJson {
    pub k: usize,
    pub cells: Vec<[i64; 3]>,
    pub dranks: Vec<[i64; 3]>,
    pub collapsed: bool,
}

pub fn page(c: &FilteredComplex, k: usize) -> SpectralPage {
    Persistence::compute(c).page(k)
}

pub fn all_pages(c: &FilteredComplex) -> Vec<SpectralPage> {
    Persistence::compute(c).all_pages()
}

/// Result of comparing the pages of two complexes.
#[derive(Clone, Debug, Serialize)]
pub struct PageComparison {
    pub equal: bool,
    /// `(k, equal)` for every compared page, starting at `E_1`
    pub pages: Vec<(usize, bool)>,
}

/// Compares `E_k` for every `k >= 1`; pages past the last computed one equal the limit.
pub fn compare_pages(c1: &FilteredComplex, c2: &FilteredComplex) -> PageComparison {
    let (p1, p2) = (Persistence::compute(c1), Persistence::compute(c2));
    compare_persistence(&p1, &p2)
}

pub fn compare_persistence(p1: &Persistence, p2: &Persistence) -> PageComparison {
    let last = p1.last_page().max(p2.last_page());
    let pages: Vec<(usize, bool)> = (1..=last)
        .map(|k| (k, p1.page(k).cells == p2.page(k).cells))
        .collect();
    PageComparison {
        equal: pages.iter().all(|p| p.1),
        pages,
    }
}

// ---- subquotient oracle ----

/// `{x in F^p C^r : dx in F^(p-k) C^(r+1)}`.
fn cycles_to_level(c: &FilteredComplex, r: i64, p: i64, k: i64) -> Subspace {
    let n = c.dim(r);
    let cols = c.filtration_basis(p, r);
    let rows: Vec<usize> = match c.group(r + 1) {
        Some(g) => (0..g.dim()).filter(|&i| g.q()[i] > p - k).collect(),
        None => Vec::new(),
    };
    let sub = c.differential(r).submatrix(&rows, &cols);
    let ker = sub.kernel();
    Subspace::from_vectors(
        n,
        ker.basis().iter().map(|v| v.permuted(&cols)),
    )
}

fn image_of(d: &SparseMatrix, s: &Subspace) -> Subspace {
    Subspace::from_vectors(d.nrows(), s.basis().iter().map(|v| d.apply(v)))
}

/// `Z_(k-1)^(p-1) + d Z_(k-1)^(p+k-1)` inside `C^r`.
fn page_boundaries(c: &FilteredComplex, r: i64, p: i64, k: i64) -> Result<Subspace> {
    let low = cycles_to_level(c, r, p - 1, k - 1);
    let from_below = cycles_to_level(c, r - 1, p + k - 1, k - 1);
    let dprev = c.differential(r - 1);
    low.sum(&image_of(&dprev, &from_below))
}

/// `E_k` from the subquotient formula, with ranks of `d_k` from
/// `ker d_k = (Z_(k+1)^p + Z_(k-1)^(p-1)) / B`.
pub fn page_by_subspaces(c: &FilteredComplex, k: usize) -> Result<SpectralPage> {
    let k = k as i64;
    let mut cells = Cells::new();
    let mut dranks = Cells::new();
    for r in c.degrees() {
        let levels: BTreeSet<i64> = c.group(r).map(|g| g.q().iter().copied().collect()).unwrap_or_default();
        for &p in &levels {
            let z = cycles_to_level(c, r, p, k);
            let b = page_boundaries(c, r, p, k)?;
            let dim = z.quotient_dim(&b)?;
            if dim > 0 {
                cells.insert((r, p), dim);
            }
            let kernel = cycles_to_level(c, r, p, k + 1).sum(&cycles_to_level(c, r, p - 1, k - 1))?;
            let rank = z.quotient_dim(&kernel)?;
            if rank > 0 {
                dranks.insert((r, p), rank);
            }
        }
    }
    // only says that this page's differential vanishes
    let collapsed = dranks.is_empty();
    Ok(SpectralPage {
        k: k as usize,
        cells,
        dranks,
        collapsed,
    })
}

#[cfg(test)]
mod tests;
