//! Shared fixtures and an independent dense-matrix Khovanov oracle.

#![allow(dead_code)]

use std::collections::BTreeMap;

use filtkh::algebra::FrobeniusParams;
use filtkh::diagram::{parse_braid, parse_pd, LinkDiagram, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

pub const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
pub const FIGURE8: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";
pub const HOPF: &str = "X[4,1,3,2] X[2,3,1,4]";

pub fn presets() -> Vec<(&'static str, FrobeniusParams)> {
    vec![("lee", FrobeniusParams::lee()), ("bar-natan", FrobeniusParams::bar_natan())]
}

pub fn t25() -> LinkDiagram {
    parse_braid(&[1; 5], 2).unwrap()
}

/// Corpus: name, diagram. Mirrors are included for the chiral ones.
pub fn corpus() -> Vec<(String, LinkDiagram)> {
    let base = vec![
        ("unknot", parse_pd("O[1]").unwrap()),
        ("unknot-1", parse_braid(&[1], 2).unwrap()),
        ("unknot-2", parse_braid(&[1, -2], 3).unwrap()),
        ("unlink", parse_pd("O[1] O[2]").unwrap()),
        ("hopf", parse_pd(HOPF).unwrap()),
        ("trefoil", parse_pd(TREFOIL).unwrap()),
        ("figure-8", parse_pd(FIGURE8).unwrap()),
        ("T(2,5)", t25()),
    ];
    let mut out = Vec::new();
    for (name, d) in base {
        if d.n_crossings() > 0 && name != "figure-8" {
            out.push((format!("{name}!"), d.mirror()));
        }
        out.push((name.to_string(), d));
    }
    out
}

/// The four edge labels of every crossing, as written.
pub fn pd_tuples(d: &LinkDiagram) -> Vec<[usize; 4]> {
    let text = d.to_pd_string();
    text.split_whitespace()
        .filter(|t| t.starts_with('X'))
        .map(|t| {
            let body = &t[t.find('[').unwrap() + 1..t.find(']').unwrap()];
            let v: Vec<usize> = body.split(',').map(|x| x.trim().parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect()
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let n = parent[y];
        parent[y] = r;
        y = n;
    }
    r
}

/// Circles of a smoothing, as a map from edge label to circle index.
/// Bit 1 at a crossing joins its labels 0-1 and 2-3, bit 0 joins 1-2 and 3-0.
fn circles(tuples: &[[usize; 4]], loops: &[usize], max_label: usize, v: usize) -> (usize, Vec<usize>) {
    let mut parent: Vec<usize> = (0..=max_label).collect();
    for (i, t) in tuples.iter().enumerate() {
        let pairs = if v >> i & 1 == 1 { [(0, 1), (2, 3)] } else { [(1, 2), (3, 0)] };
        for (a, b) in pairs {
            let (x, y) = (find(&mut parent, t[a]), find(&mut parent, t[b]));
            parent[x] = y;
        }
    }
    let mut used: Vec<usize> = tuples.iter().flatten().copied().chain(loops.iter().copied()).collect();
    used.sort();
    used.dedup();
    let mut index = BTreeMap::new();
    let mut of = vec![usize::MAX; max_label + 1];
    for e in used {
        let r = find(&mut parent, e);
        let n = index.len();
        of[e] = *index.entry(r).or_insert(n);
    }
    (index.len(), of)
}

type Dense = Vec<Vec<BigRational>>;

pub fn dense_rank(mut m: Dense) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c].clone() / &pivot;
                for k in c..cols {
                    let sub = m[rank][k].clone() * &f;
                    m[r][k] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Khovanov homology `(r, q) -> dim` by dense linear algebra over the
/// degree-preserving differential, graded as `r = |v| - n+` and
/// `q = (#X - #1) - r + n+ - n-`.
pub fn dense_khovanov(d: &LinkDiagram) -> BTreeMap<(i64, i64), usize> {
    let tuples = pd_tuples(d);
    let n = tuples.len();
    assert!(n <= 6, "the dense oracle is for small diagrams");
    let loops: Vec<usize> = d.loops().iter().map(|l| l.edge).collect();
    let max_label = tuples.iter().flatten().chain(loops.iter()).copied().max().unwrap_or(0);
    let n_plus = d.crossings().iter().filter(|x| x.sign() == Sign::Positive).count() as i64;
    let n_minus = n as i64 - n_plus;
    // generators: (vertex, labels), grouped by (r, q)
    let mut basis: BTreeMap<(i64, i64), Vec<(usize, u64)>> = BTreeMap::new();
    let circ: Vec<(usize, Vec<usize>)> = (0..1usize << n).map(|v| circles(&tuples, &loops, max_label, v)).collect();
    for v in 0..1usize << n {
        let k = circ[v].0;
        let r = v.count_ones() as i64 - n_plus;
        for labels in 0..1u64 << k {
            let xs = labels.count_ones() as i64;
            let q = (2 * xs - k as i64) - r + n_plus - n_minus;
            basis.entry((r, q)).or_default().push((v, labels));
        }
    }
    let index: BTreeMap<(usize, u64), usize> = basis
        .values()
        .flat_map(|b| b.iter().enumerate().map(|(i, &g)| (g, i)))
        .collect();
    // d: (r, q) -> (r + 1, q)
    let matrix = |r: i64, q: i64| -> Option<Dense> {
        let src = basis.get(&(r, q))?;
        let dst = basis.get(&(r + 1, q))?;
        let mut m = vec![vec![BigRational::zero(); src.len()]; dst.len()];
        for (j, &(v, labels)) in src.iter().enumerate() {
            for i in 0..n {
                if v >> i & 1 == 1 {
                    continue;
                }
                let w = v | 1 << i;
                let sign = if (v >> (i + 1)).count_ones() % 2 == 0 { 1 } else { -1 };
                let (from, to) = (&circ[v].1, &circ[w].1);
                let t = tuples[i];
                let label = |l: u64, c: usize| l >> c & 1 == 1;
                // circle correspondence through edge labels
                let mut images: Vec<u64> = Vec::new();
                let (kv, kw) = (circ[v].0, circ[w].0);
                let touched_v: Vec<usize> = {
                    let mut x: Vec<usize> = t.iter().map(|&e| from[e]).collect();
                    x.sort();
                    x.dedup();
                    x
                };
                let touched_w: Vec<usize> = {
                    let mut x: Vec<usize> = t.iter().map(|&e| to[e]).collect();
                    x.sort();
                    x.dedup();
                    x
                };
                let mut base = 0u64;
                for c in 0..kv {
                    if touched_v.contains(&c) || !label(labels, c) {
                        continue;
                    }
                    let e = (0..=max_label).find(|&e| from[e] == c).unwrap();
                    base |= 1 << to[e];
                }
                if kw < kv {
                    // merge: 1·1 = 1, 1·X = X, X·X = 0
                    let xs = touched_v.iter().filter(|&&c| label(labels, c)).count();
                    match xs {
                        0 => images.push(base),
                        1 => images.push(base | 1 << touched_w[0]),
                        _ => {}
                    }
                } else {
                    // split: 1 -> 1⊗X + X⊗1, X -> X⊗X
                    let (a, b) = (touched_w[0], touched_w[1]);
                    if label(labels, touched_v[0]) {
                        images.push(base | 1 << a | 1 << b);
                    } else {
                        images.push(base | 1 << a);
                        images.push(base | 1 << b);
                    }
                }
                for l in images {
                    let row = index[&(w, l)];
                    m[row][j] += BigRational::from_integer(BigInt::from(sign));
                }
            }
        }
        Some(m)
    };
    let rank = |r: i64, q: i64| matrix(r, q).map_or(0, dense_rank);
    let mut out = BTreeMap::new();
    for (&(r, q), b) in &basis {
        let dim = b.len() - rank(r, q) - rank(r - 1, q);
        if dim > 0 {
            out.insert((r, q), dim);
        }
    }
    out
}
