use super::*;
use crate::algebra::FrobeniusParams;
use crate::complex::match_circles;
use crate::diagram::{parse_braid, parse_pd};

const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
const FIGURE8: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";
const HOPF: &str = "X[4,1,3,2] X[2,3,1,4]";

fn corpus() -> Vec<LinkDiagram> {
    vec![
        parse_pd("O[1]").unwrap(),
        parse_pd("O[1]cw O[2]").unwrap(),
        parse_braid(&[1], 2).unwrap(),
        parse_braid(&[-1], 2).unwrap(),
        parse_pd(HOPF).unwrap(),
        parse_pd(HOPF).unwrap().mirror(),
        parse_pd(TREFOIL).unwrap(),
        parse_braid(&[1, 1, 1], 2).unwrap(),
        parse_pd(FIGURE8).unwrap(),
        parse_braid(&[1, 1, 1, 1], 2).unwrap(),
        parse_braid(&[1, -2, 1, 2], 3).unwrap(),
        parse_braid(&[1, 2, 1, 2], 3).unwrap(),
    ]
}

fn with_every_outer_face(d: &LinkDiagram) -> Vec<LinkDiagram> {
    let mut out = vec![d.clone()];
    for f in 0..d.n_faces() {
        out.push(d.with_outer_hint(Some(f)).unwrap());
    }
    out
}

#[test]
fn state_counts() {
    assert_eq!(canonical_states(&parse_pd(TREFOIL).unwrap()).len(), 2);
    assert_eq!(canonical_states(&parse_pd(HOPF).unwrap()).len(), 4);
    assert_eq!(canonical_states(&LinkDiagram::empty()), vec![0]);
}

#[test]
fn canonical_vertices() {
    let t = parse_braid(&[1, 1, 1], 2).unwrap();
    assert_eq!(canonical_vertex(&t, 0), 0b111);
    assert_eq!(canonical_vertex(&t, 1), 0b111);
    let lh = parse_pd(TREFOIL).unwrap();
    assert_eq!(canonical_vertex(&lh, 0), 0);
    let c = FilteredComplex::build(&t, &FrobeniusParams::lee()).unwrap();
    assert_eq!(c.degree_of_vertex(canonical_vertex(&t, 0)), 0);
    let hopf = parse_pd(HOPF).unwrap();
    let all_oriented = canonical_vertex(&hopf, 0);
    assert_eq!(canonical_vertex(&hopf, 0b11), all_oriented);
    assert_eq!(canonical_vertex(&hopf, 0b01), all_oriented ^ 0b11);
    assert_eq!(canonical_vertex(&hopf, 0b10), all_oriented ^ 0b11);
}

#[test]
fn round_unknot_bits() {
    let d = parse_pd("O[1]").unwrap();
    let res = d.resolve(0);
    assert_eq!(circle_invariant(&d, &res, 0, 0, None).unwrap(), 0);
    assert_eq!(circle_invariant(&d, &res, 0, 1, None).unwrap(), 1);
    let cw = parse_pd("O[1]cw").unwrap();
    assert_eq!(circle_invariant(&cw, &cw.resolve(0), 0, 0, None).unwrap(), 1);
}

#[test]
fn kink_seifert_circles_get_opposite_bits() {
    let d = parse_braid(&[1], 2).unwrap();
    for dd in with_every_outer_face(&d) {
        let v = canonical_vertex(&dd, 0);
        let res = dd.resolve(v);
        assert_eq!(res.n_circles(), 2);
        let b0 = circle_invariant(&dd, &res, 0, 0, dd.outer_hint()).unwrap();
        let b1 = circle_invariant(&dd, &res, 1, 0, dd.outer_hint()).unwrap();
        assert_ne!(b0, b1);
    }
}

#[test]
fn generators_are_cycles_and_a_basis() {
    for d in corpus() {
        for p in [FrobeniusParams::lee(), FrobeniusParams::bar_natan()] {
            for dd in with_every_outer_face(&d) {
                let c = FilteredComplex::build(&dd, &p).unwrap();
                let gens = canonical_generators(&c).unwrap();
                assert_eq!(gens.len(), 1 << d.n_components());
                assert!(classes_independent(&c, &gens).unwrap(), "{}", dd.to_pd_string());
                for g in &gens {
                    let top = g.vector.entries().iter().map(|(i, _)| c.q_grading(g.r, *i).unwrap()).max();
                    assert_eq!(top, Some(g.q_level));
                }
            }
        }
    }
}

#[test]
fn merging_edges_join_opposite_idempotents() {
    for d in corpus() {
        let c = FilteredComplex::build(&d, &FrobeniusParams::lee()).unwrap();
        for g in canonical_generators(&c).unwrap() {
            let from = d.resolve(g.vertex);
            for i in 0..d.n_crossings() {
                let w = g.vertex ^ (1 << i);
                let m = match_circles(&d, i, &from, &d.resolve(w));
                if m.src.len() == 2 {
                    assert_ne!(g.idempotents[m.src[0]], g.idempotents[m.src[1]]);
                }
            }
        }
    }
}

#[test]
fn complementary_states_swap_idempotents() {
    for d in corpus() {
        let c = FilteredComplex::build(&d, &FrobeniusParams::lee()).unwrap();
        let full = (1u64 << d.n_components()) - 1;
        for s in canonical_states(&d) {
            let a = canonical_generator(&c, s).unwrap();
            let b = canonical_generator(&c, full ^ s).unwrap();
            assert_eq!(a.vertex, b.vertex);
            let swapped: Vec<Idempotent> = a.idempotents.iter().map(|i| i.other()).collect();
            assert_eq!(swapped, b.idempotents);
        }
    }
}

#[test]
fn span_does_not_depend_on_the_outer_face() {
    for d in corpus() {
        let p = FrobeniusParams::bar_natan();
        let base = FilteredComplex::build(&d, &p).unwrap();
        let gens = canonical_generators(&base).unwrap();
        for dd in with_every_outer_face(&d) {
            let c = FilteredComplex::build(&dd, &p).unwrap();
            let other = canonical_generators(&c).unwrap();
            for r in c.degrees() {
                let (x, y) = (span_in_degree(&base, &gens, r), span_in_degree(&c, &other, r));
                assert!(x.contains(&y) && y.contains(&x));
            }
        }
    }
}

#[test]
fn small_examples() {
    let c = FilteredComplex::build(&parse_pd("O[1]").unwrap(), &FrobeniusParams::lee()).unwrap();
    let gens = canonical_generators(&c).unwrap();
    assert_eq!(gens[0].idempotents, vec![Idempotent::Z1]);
    assert_eq!(gens[1].idempotents, vec![Idempotent::Z2]);
    let t = FilteredComplex::build(&parse_pd(TREFOIL).unwrap(), &FrobeniusParams::lee()).unwrap();
    let gens = canonical_generators(&t).unwrap();
    assert!(gens.iter().all(|g| g.r == 0));
    let h = FilteredComplex::build(&parse_pd(HOPF).unwrap(), &FrobeniusParams::lee()).unwrap();
    let gens = canonical_generators(&h).unwrap();
    let degs: std::collections::BTreeSet<i64> = gens.iter().map(|g| g.r).collect();
    assert_eq!(degs.len(), 2);
    let json = serde_json::to_string(&generator_json(&h, &gens[1])).unwrap();
    assert!(json.contains("\"state\":\"ba\""));
}
