use super::*;
use crate::algebra::{q, q_frac, FrobeniusParams};
use crate::diagram::{parse_braid, parse_pd, LinkDiagram};

const TREFOIL: &str = "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]";
const FIGURE8: &str = "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]";
const HOPF: &str = "X[4,1,3,2] X[2,3,1,4]";

fn params() -> Vec<FrobeniusParams> {
    vec![
        FrobeniusParams::lee(),
        FrobeniusParams::bar_natan(),
        FrobeniusParams::from_roots(q_frac(5, 2), q(-1)).unwrap(),
    ]
}

fn small_diagrams() -> Vec<LinkDiagram> {
    vec![
        parse_pd("O[1]").unwrap(),
        parse_pd("O[1] O[2]").unwrap(),
        parse_braid(&[1], 2).unwrap(),
        parse_braid(&[-1], 2).unwrap(),
        parse_pd(HOPF).unwrap(),
        parse_pd(TREFOIL).unwrap(),
        parse_pd(TREFOIL).unwrap().mirror(),
        parse_pd(FIGURE8).unwrap(),
        parse_braid(&[1, -2], 3).unwrap(),
    ]
}

fn build(d: &LinkDiagram, p: &FrobeniusParams) -> FilteredComplex {
    FilteredComplex::build(d, p).unwrap()
}

#[test]
fn zeroth_page_is_the_chain_complex() {
    for d in small_diagrams() {
        let c = build(&d, &FrobeniusParams::lee());
        let pers = Persistence::compute(&c);
        let e0 = pers.page(0);
        let mut chain = Cells::new();
        for r in c.degrees() {
            for &qv in c.group(r).unwrap().q() {
                *chain.entry((r, qv)).or_insert(0) += 1;
            }
        }
        assert_eq!(e0.cells, chain);
        assert_eq!(pers.chain_cells(), &chain);
    }
}

#[test]
fn unknot_pages() {
    let c = build(&parse_pd("O[1]").unwrap(), &FrobeniusParams::lee());
    let pages = all_pages(&c);
    assert_eq!(pages.len(), 2);
    let e1 = &pages[1];
    assert_eq!(e1.cells, Cells::from([((0, -1), 1), ((0, 1), 1)]));
    assert!(e1.collapsed && pages[0].collapsed);
}

#[test]
fn persistence_matches_subquotient_formula() {
    for d in small_diagrams() {
        for p in params() {
            let c = build(&d, &p);
            let pers = Persistence::compute(&c);
            for k in 0..=6 {
                let fast = pers.page(k);
                let slow = page_by_subspaces(&c, k).unwrap();
                assert_eq!(fast.cells, slow.cells, "{} k={k} {p}", d.to_pd_string());
                assert_eq!(fast.dranks, slow.dranks, "{} k={k} {p}", d.to_pd_string());
            }
        }
    }
}

#[test]
fn page_bookkeeping() {
    for d in small_diagrams() {
        for p in params() {
            let pers = Persistence::compute(&build(&d, &p));
            let pages = pers.all_pages();
            for w in pages.windows(2) {
                let (e, next) = (&w[0], &w[1]);
                let k = e.k as i64;
                assert!(next.total() <= e.total());
                let keys: BTreeSet<(i64, i64)> = e.cells.keys().chain(next.cells.keys()).copied().collect();
                for (r, qv) in keys {
                    let out = e.dranks.get(&(r, qv)).copied().unwrap_or(0);
                    let into = e.dranks.get(&(r - 1, qv + k)).copied().unwrap_or(0);
                    assert_eq!(next.dim(r, qv) + out + into, e.dim(r, qv));
                }
                if k % 2 == 1 {
                    assert!(e.dranks.is_empty(), "odd differential d_{k}");
                }
            }
            let limit = pages.last().unwrap();
            assert!(limit.collapsed);
            assert_eq!(limit.total(), 1 << d.n_components());
            assert_eq!(limit.by_degree(), pers.limit_by_degree());
        }
    }
}

#[test]
fn trefoil_higher_differentials() {
    let d = parse_pd(TREFOIL).unwrap();
    let lee = Persistence::compute(&build(&d, &FrobeniusParams::lee()));
    let first = |p: &Persistence| (1..).find(|&k| !p.page(k).dranks.is_empty()).unwrap();
    assert_eq!(first(&lee), 4);
    assert_eq!(lee.page(1).total(), 4);
    assert_eq!(lee.page(5).total(), 2);
    // the only E_1 cells in adjacent degrees are the knight-move pair, 4 apart
    // in q, so the h-terms alone (drop 2) cannot cancel anything on E_2
    let bn = Persistence::compute(&build(&d, &FrobeniusParams::bar_natan()));
    assert!(bn.page(2).dranks.is_empty());
    assert_eq!(first(&bn), 4);
    assert_eq!(bn.page(3).total(), 4);
    assert_eq!(bn.page(5).total(), 2);
}

#[test]
fn stabilised_braids_have_equal_pages() {
    let p = FrobeniusParams::lee();
    let t = build(&parse_braid(&[1, 1, 1], 2).unwrap(), &p);
    let t_stab = build(&parse_braid(&[1, 1, 1, 2], 3).unwrap(), &p);
    let t_neg = build(&parse_braid(&[1, 1, 1, -2], 3).unwrap(), &p);
    assert!(compare_pages(&t, &t_stab).equal);
    assert!(compare_pages(&t, &t_neg).equal);
    let u0 = build(&parse_pd("O[1]").unwrap(), &p);
    let u1 = build(&parse_braid(&[1], 2).unwrap(), &p);
    let u2 = build(&parse_braid(&[1, -2], 3).unwrap(), &p);
    assert!(compare_pages(&u0, &u1).equal);
    assert!(compare_pages(&u1, &u2).equal);
    // different knots are told apart on E_1
    let cmp = compare_pages(&t, &u1);
    assert!(!cmp.equal);
    assert_eq!(cmp.pages[0], (1, false));
}
