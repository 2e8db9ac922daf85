use super::*;
use crate::algebra::{q, q_frac};
use crate::diagram::{parse_braid, parse_pd};
use num_traits::Zero;

const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
const FIGURE8: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";
const HOPF: &str = "X[4,1,3,2] X[2,3,1,4]";

fn all_params() -> Vec<FrobeniusParams> {
    vec![
        FrobeniusParams::lee(),
        FrobeniusParams::bar_natan(),
        FrobeniusParams::from_roots(q_frac(3, 2), q(-2)).unwrap(),
    ]
}

fn test_diagrams() -> Vec<LinkDiagram> {
    vec![
        parse_pd("O[1]").unwrap(),
        parse_braid(&[1], 2).unwrap(),
        parse_braid(&[-1], 2).unwrap(),
        parse_pd(HOPF).unwrap(),
        parse_pd(TREFOIL).unwrap(),
        parse_pd(FIGURE8).unwrap(),
        parse_braid(&[1, -2, 1, -2], 3).unwrap(),
        parse_braid(&[1, 1, 1, 1, 1], 2).unwrap(),
    ]
}

/// Circle count at a vertex from a slot union-find, independent of the resolution code.
fn circles_oracle(d: &LinkDiagram, v: u64) -> usize {
    let n = d.n_crossings();
    let mut parent: Vec<usize> = (0..4 * n).collect();
    fn find(p: &mut Vec<usize>, x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let join = |p: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (find(p, a), find(p, b));
        p[ra] = rb;
    };
    for e in d.edges() {
        if let (Some(t), Some(h)) = (d.tail(e), d.head(e)) {
            join(&mut parent, t.corner(), h.corner());
        }
    }
    for c in 0..n {
        let (a, b, x, y) = if v >> c & 1 == 1 { (0, 1, 2, 3) } else { (1, 2, 3, 0) };
        join(&mut parent, 4 * c + a, 4 * c + b);
        join(&mut parent, 4 * c + x, 4 * c + y);
    }
    let mut roots: Vec<usize> = (0..4 * n).map(|i| find(&mut parent, i)).collect();
    roots.sort();
    roots.dedup();
    roots.len() + d.loops().len()
}

fn check_square_zero(c: &FilteredComplex, top: bool) {
    for r in c.degrees() {
        let (a, b) = if top {
            (c.top_differential(r), c.top_differential(r + 1))
        } else {
            (c.differential(r), c.differential(r + 1))
        };
        assert!(b.mul(&a).is_zero(), "d^2 != 0 at r={r} (top={top})");
    }
}

#[test]
fn unknot_without_crossings() {
    let c = FilteredComplex::build(&parse_pd("O[1]").unwrap(), &FrobeniusParams::lee()).unwrap();
    assert_eq!(c.degrees(), 0..=0);
    assert_eq!(c.dim(0), 2);
    assert_eq!(c.group(0).unwrap().q(), &[-1, 1]);
    assert!(c.differential(0).is_zero());
    assert!(c.top_differential(0).is_zero());
    assert_eq!(c.filtration_basis(-1, 0), vec![0]);
    assert_eq!(c.filtration_basis(100, 0), vec![0, 1]);
    assert!(c.filtration_basis(-2, 0).is_empty());
}

#[test]
fn positive_kink_unknot() {
    let d = parse_braid(&[1], 2).unwrap();
    let c = FilteredComplex::build(&d, &FrobeniusParams::lee()).unwrap();
    assert_eq!(c.degrees(), -1..=0);
    assert_eq!((c.dim(-1), c.dim(0)), (2, 4));
    // 1⊗X at the two-circle vertex: deg 0, r = 0, n+ = 1
    let g = Generator { vertex: 1, labels: 0b10 };
    assert_eq!(c.q_of(g), Some(1));
    assert_eq!(c.top_differential(-1).rank(), 2);
    check_square_zero(&c, false);
    // Lee: d(1) = 1X + X1, d(X) = XX + 1·11 at the one-crossing edge
    let dm = c.differential(-1);
    let col0: Vec<(usize, Q)> = dm.col(0).entries().to_vec();
    assert_eq!(col0, vec![(1, q(1)), (2, q(1))]);
    let col1: Vec<(usize, Q)> = dm.col(1).entries().to_vec();
    assert_eq!(col1, vec![(0, q(1)), (3, q(1))]);
}

#[test]
fn trefoil_total_dimension() {
    let d = parse_pd(TREFOIL).unwrap();
    let c = FilteredComplex::build(&d, &FrobeniusParams::bar_natan()).unwrap();
    let expected: usize = (0..8u64).map(|v| 1usize << circles_oracle(&d, v)).sum();
    assert_eq!(c.total_dim(), expected);
    // 2 circles at the oriented vertex, 3 at the opposite one, 2 and 1 in between
    assert_eq!(expected, 4 + 3 * 2 + 3 * 4 + 8);
}

#[test]
fn crossing_cap_is_a_resource_error() {
    let d = parse_braid(&[1, 1, 1], 2).unwrap();
    let err = FilteredComplex::build_capped(&d, &FrobeniusParams::lee(), 2).unwrap_err();
    assert!(matches!(err, Error::Resource(_)));
}

#[test]
fn square_zero_everywhere() {
    for d in test_diagrams() {
        for p in all_params() {
            let c = FilteredComplex::build(&d, &p).unwrap();
            check_square_zero(&c, false);
            check_square_zero(&c, true);
        }
    }
}

#[test]
fn filtration_shape_of_the_differential() {
    for d in test_diagrams() {
        for p in all_params() {
            let c = FilteredComplex::build(&d, &p).unwrap();
            for r in c.degrees() {
                let qs = c.group(r).unwrap().q().to_vec();
                let qt = c.group(r + 1).map(|g| g.q().to_vec()).unwrap_or_default();
                let full = c.differential(r);
                let top = c.top_differential(r);
                for (i, j, v) in top.triplets() {
                    assert_eq!(qt[i], qs[j]);
                    assert_eq!(full.get(i, j), v);
                }
                let rest = full.sub(&top);
                for (i, j, _) in rest.triplets() {
                    let drop = qs[j] - qt[i];
                    assert!(drop == 2 || drop == 4, "drop {drop}");
                    if p.h().is_zero() {
                        assert_eq!(drop, 4);
                    }
                    if p.a().is_zero() {
                        assert_eq!(drop, 2);
                    }
                }
            }
        }
    }
}

#[test]
fn mirror_reflects_chain_degrees() {
    for d in test_diagrams() {
        let p = FrobeniusParams::lee();
        let c = FilteredComplex::build(&d, &p).unwrap();
        let m = FilteredComplex::build(&d.mirror(), &p).unwrap();
        for r in -6..=6 {
            assert_eq!(c.dim(r), m.dim(-r), "r={r}");
        }
    }
}

#[test]
fn generator_indexing_round_trips() {
    let c = FilteredComplex::build(&parse_pd(FIGURE8).unwrap(), &FrobeniusParams::lee()).unwrap();
    for r in c.degrees() {
        let g = c.group(r).unwrap();
        for i in 0..g.dim() {
            let gen = g.generator(i);
            assert_eq!(g.index_of(gen), Some(i));
            assert_eq!(c.degree_of_vertex(gen.vertex), r);
        }
    }
}

#[test]
fn dump_is_json() {
    let c = FilteredComplex::build(&parse_braid(&[1], 2).unwrap(), &FrobeniusParams::lee()).unwrap();
    let s = serde_json::to_string(&c.dump()).unwrap();
    assert!(s.contains("\"labels\":\"1X\""));
    assert!(s.contains("sign_convention"));
}
