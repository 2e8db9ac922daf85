//! Exact sparse linear algebra over the rationals.
//!
//! Vectors are sorted `(index, value)` lists with no stored zeros. Subspaces
//! keep a semi-echelon basis: every basis vector has a distinct pivot, and the
//! pivot is the first nonzero entry of that vector in the subspace's
//! coordinate order. The coordinate order is a permutation chosen once per
//! elimination, with sparse rows first.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::algebra::Q;
use crate::error::{Error, Result};

/// A sparse vector: strictly increasing indices, nonzero values.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseVec {
    entries: Vec<(usize, Q)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec::default()
    }

    /// Builds from unsorted entries; repeated indices are summed and zeros dropped.
    pub fn from_entries(mut entries: Vec<(usize, Q)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut out: Vec<(usize, Q)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match out.last_mut() {
                Some((j, w)) if *j == i => *w += v,
                _ => out.push((i, v)),
            }
        }
        out.retain(|(_, v)| !v.is_zero());
        SparseVec { entries: out }
    }

    pub fn unit(i: usize) -> Self {
        SparseVec {
            entries: vec![(i, Q::one())],
        }
    }

    pub fn entries(&self) -> &[(usize, Q)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, Q)> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize) -> Option<&Q> {
        self.entries
            .binary_search_by_key(&i, |e| e.0)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn first(&self) -> Option<&(usize, Q)> {
        self.entries.first()
    }

    pub fn last(&self) -> Option<&(usize, Q)> {
        self.entries.last()
    }

    pub fn scale(&mut self, c: &Q) {
        if c.is_zero() {
            self.entries.clear();
        } else {
            for (_, v) in self.entries.iter_mut() {
                *v *= c;
            }
        }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: &Q, other: &SparseVec) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let mut a = std::mem::take(&mut self.entries).into_iter().peekable();
        let mut b = other.entries.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, _)), Some((j, _))) if i < j => out.push(a.next().unwrap()),
                (Some((i, _)), Some((j, _))) if i > j => {
                    let (j, w) = b.next().unwrap();
                    out.push((*j, c * w));
                }
                (Some(_), Some(_)) => {
                    let (i, v) = a.next().unwrap();
                    let (_, w) = b.next().unwrap();
                    let s = v + c * w;
                    if !s.is_zero() {
                        out.push((i, s));
                    }
                }
                (Some(_), None) => out.push(a.next().unwrap()),
                (None, Some(_)) => {
                    let (j, w) = b.next().unwrap();
                    out.push((*j, c * w));
                }
                (None, None) => break,
            }
        }
        self.entries = out;
    }

    pub fn dot_dense(&self, dense: &[Q]) -> Q {
        self.entries
            .iter()
            .fold(Q::zero(), |acc, (i, v)| acc + v * &dense[*i])
    }

    /// Applies an index map; the map must be injective on the support.
    pub fn permuted(&self, perm: &[usize]) -> SparseVec {
        SparseVec::from_entries(self.entries.iter().map(|(i, v)| (perm[*i], v.clone())).collect())
    }
}

/// Column-major sparse matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols: vec![SparseVec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            rows: n,
            cols: (0..n).map(SparseVec::unit).collect(),
        }
    }

    pub fn from_columns(rows: usize, cols: Vec<SparseVec>) -> Self {
        debug_assert!(cols
            .iter()
            .all(|c| c.last().is_none_or(|(i, _)| *i < rows)));
        SparseMatrix { rows, cols }
    }

    /// `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(rows: usize, ncols: usize, triplets: Vec<(usize, usize, Q)>) -> Self {
        let mut per_col: Vec<Vec<(usize, Q)>> = vec![Vec::new(); ncols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < ncols, "triplet out of range");
            per_col[c].push((r, v));
        }
        SparseMatrix {
            rows,
            cols: per_col.into_iter().map(SparseVec::from_entries).collect(),
        }
    }

    pub fn from_dense(rows: &[Vec<Q>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut trip = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    trip.push((i, j, v.clone()));
                }
            }
        }
        Self::from_triplets(nrows, ncols, trip)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }
    pub fn ncols(&self) -> usize {
        self.cols.len()
    }
    pub fn col(&self, j: usize) -> &SparseVec {
        &self.cols[j]
    }
    pub fn columns(&self) -> &[SparseVec] {
        &self.cols
    }
    pub fn nnz(&self) -> usize {
        self.cols.iter().map(SparseVec::nnz).sum()
    }
    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(SparseVec::is_zero)
    }

    pub fn get(&self, i: usize, j: usize) -> Q {
        self.cols[j].get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn triplets(&self) -> Vec<(usize, usize, Q)> {
        let mut out = Vec::with_capacity(self.nnz());
        for (j, c) in self.cols.iter().enumerate() {
            for (i, v) in c.entries() {
                out.push((*i, j, v.clone()));
            }
        }
        out.sort_by_key(|t| (t.0, t.1));
        out
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, c) in v.entries() {
            out.axpy(c, &self.cols[*j]);
        }
        out
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols(), other.nrows(), "dimension mismatch in product");
        SparseMatrix {
            rows: self.rows,
            cols: other.cols.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.nrows(), self.ncols()), (other.nrows(), other.ncols()));
        let m1 = -Q::one();
        SparseMatrix {
            rows: self.rows,
            cols: self
                .cols
                .iter()
                .zip(&other.cols)
                .map(|(a, b)| {
                    let mut a = a.clone();
                    a.axpy(&m1, b);
                    a
                })
                .collect(),
        }
    }

    pub fn transpose(&self) -> SparseMatrix {
        let trip = self.triplets().into_iter().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.ncols(), self.nrows(), trip)
    }

    /// Keeps the given rows and columns, renumbered in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut row_map = vec![usize::MAX; self.rows];
        for (k, &r) in rows.iter().enumerate() {
            row_map[r] = k;
        }
        let cols = cols
            .iter()
            .map(|&j| {
                SparseVec::from_entries(
                    self.cols[j]
                        .entries()
                        .iter()
                        .filter(|(i, _)| row_map[*i] != usize::MAX)
                        .map(|(i, v)| (row_map[*i], v.clone()))
                        .collect(),
                )
            })
            .collect();
        SparseMatrix {
            rows: rows.len(),
            cols,
        }
    }

    /// Coordinate order with sparse rows first, ties broken by index.
    fn sparse_row_order(&self) -> Vec<usize> {
        let mut count = vec![0usize; self.rows];
        for c in &self.cols {
            for (i, _) in c.entries() {
                count[*i] += 1;
            }
        }
        let mut order: Vec<usize> = (0..self.rows).collect();
        order.sort_by_key(|&i| (count[i], i));
        order
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::with_order(self.rows, self.sparse_row_order());
        self.cols.iter().filter(|c| ech.insert(c)).count()
    }

    /// Null space of the matrix as a subspace of the column space coordinates.
    pub fn kernel(&self) -> Subspace {
        let n = self.ncols();
        let mut ech = Echelon::with_order(self.rows, self.sparse_row_order());
        let mut combos: Vec<SparseVec> = Vec::new();
        let mut kernel = Vec::new();
        for (j, col) in self.cols.iter().enumerate() {
            let mut v = col.clone();
            let mut combo = SparseVec::unit(j);
            ech.reduce_tracking(&mut v, &mut combo, &combos);
            if v.is_zero() {
                kernel.push(combo);
            } else {
                let inv = ech.push_reduced(v);
                combo.scale(&inv);
                combos.push(combo);
            }
        }
        Subspace::from_vectors(n, kernel)
    }

    pub fn image(&self) -> Subspace {
        Subspace::from_vectors(self.rows, self.cols.clone())
    }
}

/// Incremental semi-echelon form with respect to a coordinate order.
#[derive(Clone, Debug)]
struct Echelon {
    /// `rank_of[i]` = position of coordinate `i` in the elimination order.
    rank_of: Vec<usize>,
    /// basis vectors, each normalized to pivot coefficient 1
    basis: Vec<SparseVec>,
    /// coordinate -> basis index
    pivot_of: HashMap<usize, usize>,
}

impl Echelon {
    fn with_order(dim: usize, order: Vec<usize>) -> Self {
        let mut rank_of = vec![0; dim];
        for (k, i) in order.into_iter().enumerate() {
            rank_of[i] = k;
        }
        Echelon {
            rank_of,
            basis: Vec::new(),
            pivot_of: HashMap::new(),
        }
    }

    fn natural(dim: usize) -> Self {
        Self::with_order(dim, (0..dim).collect())
    }

    fn leading(&self, v: &SparseVec) -> Option<usize> {
        v.entries()
            .iter()
            .map(|(i, _)| *i)
            .min_by_key(|i| self.rank_of[*i])
    }

    fn reduce_tracking(&self, v: &mut SparseVec, combo: &mut SparseVec, combos: &[SparseVec]) {
        loop {
            let hit = v
                .entries()
                .iter()
                .filter_map(|(i, _)| self.pivot_of.get(i).map(|b| (*i, *b)))
                .min_by_key(|(i, _)| self.rank_of[*i]);
            match hit {
                Some((i, b)) => {
                    let c = -v.get(i).unwrap().clone();
                    v.axpy(&c, &self.basis[b]);
                    combo.axpy(&c, &combos[b]);
                }
                None => return,
            }
        }
    }

    /// Adds an already-reduced nonzero vector, normalized to pivot 1;
    /// returns the normalizing factor.
    fn push_reduced(&mut self, mut v: SparseVec) -> Q {
        let lead = self.leading(&v).expect("nonzero vector");
        let inv = Q::one() / v.get(lead).unwrap();
        v.scale(&inv);
        self.pivot_of.insert(lead, self.basis.len());
        self.basis.push(v);
        inv
    }

    /// Returns true if `v` was independent and got added.
    fn insert(&mut self, v: &SparseVec) -> bool {
        let mut w = v.clone();
        self.reduce_full(&mut w);
        if w.is_zero() {
            false
        } else {
            self.push_reduced(w);
            true
        }
    }

    /// Clears every pivot coordinate of `v`.
    fn reduce_full(&self, v: &mut SparseVec) {
        loop {
            let hit = v
                .entries()
                .iter()
                .filter_map(|(i, _)| self.pivot_of.get(i).map(|b| (*i, *b)))
                .min_by_key(|(i, _)| self.rank_of[*i]);
            match hit {
                Some((i, b)) => {
                    let c = -v.get(i).unwrap().clone();
                    v.axpy(&c, &self.basis[b]);
                }
                None => return,
            }
        }
    }
}

/// A linear subspace of `Q^ambient`, stored by a semi-echelon basis.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    ech: Echelon,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            ech: Echelon::natural(ambient),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_vectors(ambient, (0..ambient).map(SparseVec::unit))
    }

    pub fn from_vectors(ambient: usize, vectors: impl IntoIterator<Item = SparseVec>) -> Self {
        let mut s = Self::zero(ambient);
        for v in vectors {
            s.add_vector(&v);
        }
        s
    }

    /// Returns true if the dimension grew.
    pub fn add_vector(&mut self, v: &SparseVec) -> bool {
        debug_assert!(v.last().is_none_or(|(i, _)| *i < self.ambient));
        // Semi-echelon with the natural order: pivots are leading entries,
        // and reduction only ever clears pivot coordinates.
        self.ech.insert(v)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.ech.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.ech.basis
    }

    pub fn member(&self, v: &SparseVec) -> bool {
        let mut w = v.clone();
        self.ech.reduce_full(&mut w);
        w.is_zero()
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        other.basis().iter().all(|v| self.member(v))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut s = self.clone();
        for v in other.basis() {
            s.add_vector(v);
        }
        Ok(s)
    }

    /// Intersection via the kernel of `[U | -V]`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let du = self.dim();
        let m1 = -Q::one();
        let mut cols: Vec<SparseVec> = self.basis().to_vec();
        cols.extend(other.basis().iter().map(|v| {
            let mut w = v.clone();
            w.scale(&m1);
            w
        }));
        let stacked = SparseMatrix::from_columns(self.ambient, cols);
        let ker = stacked.kernel();
        let vectors = ker.basis().iter().map(|k| {
            let mut out = SparseVec::new();
            for (j, c) in k.entries() {
                if *j < du {
                    out.axpy(c, &self.basis()[*j]);
                }
            }
            out
        });
        Ok(Subspace::from_vectors(self.ambient, vectors))
    }

    /// `dim(self / sub)`, requiring `sub ⊆ self`.
    pub fn quotient_dim(&self, sub: &Subspace) -> Result<usize> {
        self.check_ambient(sub)?;
        if !self.contains(sub) {
            return Err(Error::Contract("quotient by a non-subspace".into()));
        }
        Ok(self.dim() - sub.dim())
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::Contract(format!(
                "ambient dimensions differ: {} vs {}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }
}

/// Solves `sum_i x_i * vectors[i] ≡ target (mod modulo)` for the `x_i`, when a
/// solution exists. `vectors` must be independent modulo `modulo` for the
/// solution to be unique; the returned one is the unique solution in that case.
pub fn solve_modulo(
    ambient: usize,
    vectors: &[SparseVec],
    modulo: &Subspace,
    target: &SparseVec,
) -> Option<Vec<Q>> {
    let n = vectors.len();
    let mut cols: Vec<SparseVec> = vectors.to_vec();
    cols.extend(modulo.basis().iter().cloned());
    let mut ech = Echelon::natural(ambient);
    let mut combos: Vec<SparseVec> = Vec::new();
    for (j, c) in cols.iter().enumerate() {
        let mut v = c.clone();
        let mut combo = SparseVec::unit(j);
        ech.reduce_tracking(&mut v, &mut combo, &combos);
        if !v.is_zero() {
            let inv = ech.push_reduced(v);
            combo.scale(&inv);
            combos.push(combo);
        }
    }
    let mut v = target.clone();
    let mut combo = SparseVec::new();
    ech.reduce_tracking(&mut v, &mut combo, &combos);
    if !v.is_zero() {
        return None;
    }
    // target - sum(c_j col_j) = 0 with combo = -c
    let mut x = vec![Q::zero(); n];
    for (j, c) in combo.entries() {
        if *j < n {
            x[*j] = -c.clone();
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> SparseMatrix {
        SparseMatrix::from_dense(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| q(x)).collect())
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn zero_and_identity() {
        assert_eq!(SparseMatrix::zeros(3, 3).rank(), 0);
        assert_eq!(SparseMatrix::identity(4).kernel().dim(), 0);
        assert_eq!(SparseMatrix::identity(4).rank(), 4);
        assert_eq!(SparseMatrix::zeros(3, 5).kernel().dim(), 5);
    }

    #[test]
    fn rank_nullity_small() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.dim(), 1);
        for v in k.basis() {
            assert!(m.apply(v).is_zero());
        }
    }

    #[test]
    fn subspace_basics() {
        let u = Subspace::from_vectors(
            4,
            vec![
                SparseVec::from_entries(vec![(0, q(1)), (1, q(1))]),
                SparseVec::from_entries(vec![(2, q(3))]),
            ],
        );
        let full = Subspace::full(4);
        assert_eq!(u.intersect(&full).unwrap().dim(), u.dim());
        assert!(u.member(&SparseVec::new()));
        assert!(u.member(&SparseVec::from_entries(vec![(0, q(2)), (1, q(2)), (2, q(1))])));
        assert!(!u.member(&SparseVec::unit(0)));
        assert_eq!(full.quotient_dim(&u).unwrap(), 2);
        assert!(matches!(u.quotient_dim(&full), Err(Error::Contract(_))));
        assert!(u.sum(&Subspace::zero(3)).is_err());
    }

    #[test]
    fn solve_modulo_finds_coefficients() {
        let vs = vec![SparseVec::unit(0), SparseVec::unit(1)];
        let modulo = Subspace::from_vectors(3, vec![SparseVec::unit(2)]);
        let t = SparseVec::from_entries(vec![(0, q(3)), (1, q(-2)), (2, q(7))]);
        assert_eq!(solve_modulo(3, &vs, &modulo, &t), Some(vec![q(3), q(-2)]));
        let modulo = Subspace::zero(3);
        assert_eq!(solve_modulo(3, &vs, &modulo, &t), None);
    }

    fn arb_matrix(r: usize, c: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        proptest::collection::vec(
            proptest::collection::vec(prop_oneof![4 => Just(0i64), 1 => -3i64..=3], c),
            r,
        )
    }

    fn to_sparse(rows: &[Vec<i64>]) -> SparseMatrix {
        SparseMatrix::from_dense(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| q(x)).collect())
                .collect::<Vec<_>>(),
        )
    }

    /// Independent dense rank by fraction-free elimination on i128.
    fn dense_rank(rows: &[Vec<i64>]) -> usize {
        let mut m: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        let (nr, nc) = (m.len(), m.first().map_or(0, Vec::len));
        let mut rank = 0;
        for col in 0..nc {
            let Some(p) = (rank..nr).find(|&i| m[i][col] != 0) else {
                continue;
            };
            m.swap(rank, p);
            for i in 0..nr {
                if i != rank && m[i][col] != 0 {
                    let (a, b) = (m[rank][col], m[i][col]);
                    for k in 0..nc {
                        m[i][k] = m[i][k] * a - m[rank][k] * b;
                    }
                    let g = m[i].iter().fold(0i128, |g, &x| num_integer::gcd(g, x));
                    if g > 1 {
                        for x in m[i].iter_mut() {
                            *x /= g;
                        }
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn rank_plus_nullity_is_columns(rows in arb_matrix(7, 9)) {
            let m = to_sparse(&rows);
            let k = m.kernel();
            prop_assert_eq!(m.rank() + k.dim(), m.ncols());
            prop_assert_eq!(m.rank(), dense_rank(&rows));
            prop_assert_eq!(m.image().dim(), m.rank());
            for v in k.basis() {
                prop_assert!(m.apply(v).is_zero());
            }
        }

        #[test]
        fn rank_is_permutation_invariant(rows in arb_matrix(6, 8), seed in any::<u64>()) {
            let m = to_sparse(&rows);
            let mut rp: Vec<usize> = (0..6).collect();
            let mut cp: Vec<usize> = (0..8).collect();
            // deterministic shuffle from the seed
            let mut s = seed;
            for v in [&mut rp, &mut cp] {
                for i in (1..v.len()).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    v.swap(i, (s >> 33) as usize % (i + 1));
                }
            }
            let p = m.submatrix(&rp, &cp);
            prop_assert_eq!(p.rank(), m.rank());
            prop_assert_eq!(p.kernel().dim(), m.kernel().dim());
        }

        #[test]
        fn dimension_formula(a in arb_matrix(20, 6), b in arb_matrix(20, 7)) {
            let u = to_sparse(&a).image();
            let v = to_sparse(&b).image();
            let s = u.sum(&v).unwrap();
            let i = u.intersect(&v).unwrap();
            prop_assert_eq!(s.dim() + i.dim(), u.dim() + v.dim());
            prop_assert!(u.contains(&i) && v.contains(&i));
            prop_assert!(s.contains(&u) && s.contains(&v));
            prop_assert_eq!(s.quotient_dim(&u).unwrap(), s.dim() - u.dim());
        }
    }
}
