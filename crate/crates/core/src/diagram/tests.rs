use super::*;
use proptest::prelude::*;

const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";

/// Independent circle count: union-find over edge ends, glued along edges
/// and through the smoothing at every crossing.
fn circle_count_oracle(d: &LinkDiagram, vertex: u64) -> usize {
    let n = d.n_crossings();
    let mut uf = UnionFind::new(4 * n);
    for e in d.edges() {
        if let (Some(t), Some(h)) = (d.tail(e), d.head(e)) {
            uf.union(t.corner(), h.corner());
        }
    }
    for c in 0..n {
        let pairs: [(usize, usize); 2] = if vertex >> c & 1 == 1 { [(0, 1), (2, 3)] } else { [(1, 2), (3, 0)] };
        for (a, b) in pairs {
            uf.union(4 * c + a, 4 * c + b);
        }
    }
    let mut roots: Vec<usize> = (0..4 * n).map(|i| uf.find(i)).collect();
    roots.sort();
    roots.dedup();
    roots.len() + d.loops().len()
}

fn faces_with_corners(d: &LinkDiagram) -> BTreeMap<FaceId, usize> {
    let mut m = BTreeMap::new();
    for c in 0..4 * d.n_crossings() {
        *m.entry(d.corner_face(c)).or_insert(0) += 1;
    }
    m
}

#[test]
fn parse_trefoil() {
    let d = parse_pd(TREFOIL).unwrap();
    assert_eq!(d.n_crossings(), 3);
    assert_eq!(d.n_components(), 1);
    assert_eq!(d.n_plus() + d.n_minus(), 3);
    // labels increase along the orientation: this is the left-handed trefoil
    assert_eq!(d.n_minus(), 3);
    assert_eq!(d.n_faces(), 5);
}

#[test]
fn parse_empty_and_malformed() {
    let d = parse_pd("").unwrap();
    assert_eq!(d.n_crossings(), 0);
    assert_eq!(d.n_components(), 0);
    assert!(matches!(parse_pd("X[1,2,3]"), Err(Error::Parse(m)) if m.contains("X[1,2,3]")));
    assert!(parse_pd("X[1,2,3,4]").is_err());
    assert!(parse_pd("Y[1,2,3,4]").is_err());
    assert!(parse_pd("X[1,a,2,3]").is_err());
}

#[test]
fn inconsistent_orientation_is_rejected() {
    // edge 1 enters both crossings as the under-strand
    let err = parse_pd("X[1,2,3,4] X[1,4,3,2]").unwrap_err();
    assert!(err.to_string().contains("orientation") || err.to_string().contains("appears"));
    // sign annotation contradicting the under-strand direction
    let err = parse_pd("X[1,4,2,5]+ X[3,6,4,1] X[5,2,6,3]").unwrap_err();
    assert!(err.to_string().contains("inconsistent orientation"), "{err}");
}

#[test]
fn annotations_agree_with_inference() {
    let d = parse_pd("X[1,4,2,5]- X[3,6,4,1]- X[5,2,6,3]-").unwrap();
    assert_eq!(d, parse_pd(TREFOIL).unwrap());
}

#[test]
fn hopf_link_components() {
    let d = parse_pd("X[4,1,3,2] X[2,3,1,4]").unwrap();
    assert_eq!(d.n_components(), 2);
    assert_eq!(d.n_crossings(), 2);
    assert!(d.n_plus() == 2 || d.n_minus() == 2);
}

#[test]
fn non_planar_code_is_rejected() {
    // one crossing whose strands each close up through the opposite end:
    // a virtual diagram, not drawable on the sphere
    let err = parse_pd("X[1,2,1,2]").unwrap_err();
    assert!(matches!(err, Error::Diagram(_)), "{err}");
    // the planar one-crossing kinks are accepted
    assert_eq!(parse_pd("X[1,1,2,2]").unwrap().n_faces(), 3);
    assert_eq!(parse_pd("X[2,1,1,2]").unwrap().n_faces(), 3);
}

/// Components of a braid closure, by the cycles of its permutation.
fn permutation_cycles(word: &[i64], strands: usize) -> usize {
    let mut perm: Vec<usize> = (0..strands).collect();
    for &k in word {
        let p = k.unsigned_abs() as usize - 1;
        perm.swap(p, p + 1);
    }
    let mut seen = vec![false; strands];
    let mut cycles = 0;
    for s in 0..strands {
        if !seen[s] {
            cycles += 1;
            let mut t = s;
            while !seen[t] {
                seen[t] = true;
                t = perm[t];
            }
        }
    }
    cycles
}

#[test]
fn braid_examples() {
    let d = parse_braid(&[1, 1, 1], 2).unwrap();
    assert_eq!(d.n_components(), permutation_cycles(&[1, 1, 1], 2));
    assert_eq!(d.n_components(), 1);
    assert_eq!((d.n_crossings(), d.n_plus()), (3, 3));

    let d = parse_braid(&[], 1).unwrap();
    assert_eq!(d.n_crossings(), 0);
    assert_eq!(d.n_components(), 1);

    let d = parse_braid(&[1], 2).unwrap();
    assert_eq!((d.n_components(), d.n_plus()), (1, 1));

    let d = parse_braid(&[-1, -1], 2).unwrap();
    assert_eq!((d.n_components(), d.n_minus()), (2, 2));

    assert!(parse_braid(&[2], 2).is_err());
    assert!(parse_braid(&[0], 3).is_err());
}

#[test]
fn mirror_examples() {
    assert_eq!(LinkDiagram::empty().mirror(), LinkDiagram::empty());
    let t = parse_braid(&[1, 1, 1], 2).unwrap();
    let m = t.mirror();
    assert_eq!((m.n_plus(), m.n_minus()), (0, 3));
    assert_eq!(m.mirror(), t);
}

#[test]
fn resolve_trefoil_counts() {
    let d = parse_pd(TREFOIL).unwrap();
    assert_eq!(circle_count_oracle(&d, 0b000), 2);
    assert_eq!(circle_count_oracle(&d, 0b111), 3);
    assert_eq!(d.resolve(0b000).n_circles(), 2);
    assert_eq!(d.resolve(0b111).n_circles(), 3);
    let u = parse_pd("O[1]").unwrap();
    assert_eq!(u.resolve(0).n_circles(), 1);
}

#[test]
fn unknot_circle_depth_and_rotation() {
    let u = parse_pd("O[1]").unwrap();
    let r = u.resolve(0);
    assert_eq!(r.circle_depths(None).unwrap(), vec![0]);
    assert!(!r.is_clockwise(0, true, None).unwrap());
    assert!(r.is_clockwise(0, false, None).unwrap());
    let cw = parse_pd("O[1]cw").unwrap().resolve(0);
    assert!(cw.is_clockwise(0, true, None).unwrap());
    assert!(r.circle_depths(Some(7)).is_err());
}

#[test]
fn two_free_loops_side_by_side() {
    let d = parse_pd("O[1] O[2]").unwrap();
    let r = d.resolve(0);
    assert_eq!(r.circle_depths(None).unwrap(), vec![0, 0]);
}

#[test]
fn kink_seifert_circles_nested_or_side_by_side() {
    let d = parse_braid(&[1], 2).unwrap();
    let r = d.resolve(1); // oriented smoothing of the positive crossing
    assert_eq!(r.n_circles(), 2);
    let mut nested_seen = false;
    for f in 0..d.n_faces() {
        let depths = r.circle_depths(Some(f)).unwrap();
        let mut s = depths.clone();
        s.sort();
        assert!(s == vec![0, 1] || s == vec![0, 0], "{s:?}");
        // both circles travelled along the link orientation
        let cw: Vec<bool> = (0..2)
            .map(|c| r.is_clockwise(c, r.circles[c].forward[0], Some(f)).unwrap())
            .collect();
        if s == vec![0, 1] {
            nested_seen = true;
            // concentric Seifert circles of a braid closure turn the same way
            assert_eq!(cw[0], cw[1]);
        } else {
            assert_ne!(cw[0], cw[1]);
        }
    }
    assert!(nested_seen);
}

#[test]
fn trefoil_nonoriented_smoothing_depths() {
    // the three circles sit in a ring; seen from inside one of the bigons,
    // that circle surrounds the other two
    let d = parse_braid(&[1, 1, 1], 2).unwrap();
    let r = d.resolve(0);
    assert_eq!(r.n_circles(), 3);
    let corners = faces_with_corners(&d);
    assert_eq!(corners.len(), 5);
    for (&f, &k) in &corners {
        let mut s = r.circle_depths(Some(f)).unwrap();
        s.sort();
        if k == 2 {
            assert_eq!(s, vec![0, 1, 1], "face {f}");
        } else {
            assert_eq!(s, vec![0, 0, 0], "face {f}");
        }
    }
}

fn arb_braid() -> impl Strategy<Value = (Vec<i64>, usize)> {
    (2usize..5).prop_flat_map(|s| {
        let letter = (1..s as i64).prop_flat_map(|k| prop_oneof![Just(k), Just(-k)]);
        (proptest::collection::vec(letter, 0..7), Just(s))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn braid_components_match_permutation((word, s) in arb_braid()) {
        let d = parse_braid(&word, s).unwrap();
        prop_assert_eq!(d.n_components(), permutation_cycles(&word, s));
        prop_assert_eq!(d.n_plus() + d.n_minus(), word.len());
        prop_assert_eq!(d.n_plus(), word.iter().filter(|&&k| k > 0).count());
    }

    #[test]
    fn resolution_invariants((word, s) in arb_braid(), v in any::<u64>()) {
        let d = parse_braid(&word, s).unwrap();
        let vertex = if d.n_crossings() == 0 { 0 } else { v & ((1u64 << d.n_crossings()) - 1) };
        let r = d.resolve(vertex);
        prop_assert_eq!(r.n_circles(), circle_count_oracle(&d, vertex));
        prop_assert_eq!(r.n_arcs(), d.edges().len());
        // regions of a circle arrangement on the sphere: one more than circles
        prop_assert_eq!(r.n_regions(), r.n_circles() + 1);
        let depth = r.region_depths(r.outer_region());
        let cdepth = r.circle_depths(None).unwrap();
        for (i, c) in r.circles.iter().enumerate() {
            prop_assert_ne!(c.left, c.right);
            let (lo, hi) = (depth[c.left].min(depth[c.right]), depth[c.left].max(depth[c.right]));
            prop_assert_eq!(hi, lo + 1);
            prop_assert_eq!(cdepth[i], lo);
            let a = r.is_clockwise(i, true, None).unwrap();
            prop_assert_ne!(a, r.is_clockwise(i, false, None).unwrap());
        }
        // across a region, its bounding circle is one shallower than the circles inside it
        for reg in 0..r.n_regions() {
            let touching: Vec<usize> = (0..r.n_circles())
                .filter(|&i| r.circles[i].left == reg || r.circles[i].right == reg)
                .collect();
            for &i in &touching {
                for &j in &touching {
                    let (di, dj) = (cdepth[i] as i64, cdepth[j] as i64);
                    prop_assert!((di - dj).abs() <= 1);
                }
            }
            let outer_boundary: Vec<usize> = touching.iter().copied().filter(|&i| cdepth[i] < depth[reg]).collect();
            prop_assert!(outer_boundary.len() <= 1);
            for &i in &touching {
                if !outer_boundary.contains(&i) && !outer_boundary.is_empty() {
                    prop_assert_eq!(cdepth[i], cdepth[outer_boundary[0]] + 1);
                }
            }
        }
    }

    #[test]
    fn mirror_is_involution((word, s) in arb_braid()) {
        let d = parse_braid(&word, s).unwrap();
        let m = d.mirror();
        prop_assert_eq!(m.n_plus(), d.n_minus());
        prop_assert_eq!(&m.mirror(), &d);
        let neg: Vec<i64> = word.iter().map(|k| -k).collect();
        let dm = parse_braid(&neg, s).unwrap();
        prop_assert_eq!(dm.n_plus(), m.n_plus());
    }
}
