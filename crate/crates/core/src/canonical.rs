//! Canonical generators of the filtered homology.
//!
//! A state labels every component `α` or `β` (bit 0 or 1 of a mask over the
//! components). Its canonical vertex smooths each crossing in the oriented
//! way when both strands carry the same label and the other way otherwise.
//! Each circle there gets an idempotent from a parity rule: depth below the
//! outer region, plus one if it turns clockwise, plus one if it is labelled `β`.

use serde::Serialize;

use crate::algebra::{Idempotent, Q};
use crate::complex::{label_string, FilteredComplex, Generator};
use crate::diagram::{LinkDiagram, Resolution, Sign};
use crate::error::{Error, Result};
use crate::exactla::{SparseVec, Subspace};
use crate::par_map;

/// Bitmask over components, bit set = `β`.
pub type CanonicalState = u64;

/// All `2^n` states of an `n`-component link, in increasing mask order.
pub fn canonical_states(d: &LinkDiagram) -> Vec<CanonicalState> {
    (0..1u64 << d.n_components()).collect()
}

fn label(state: CanonicalState, component: usize) -> bool {
    state >> component & 1 == 1
}

/// Oriented smoothing for equal labels, the other one for different labels.
pub fn canonical_vertex(d: &LinkDiagram, state: CanonicalState) -> u64 {
    let mut v = 0;
    for (c, x) in d.crossings().iter().enumerate() {
        let (a, b) = d.strand_components(c);
        let same = label(state, a) == label(state, b);
        let oriented_bit = x.sign() == Sign::Positive;
        if same == oriented_bit {
            v |= 1 << c;
        }
    }
    v
}

/// Label and travel direction a circle takes for the parity rule.
/// Mixed circles count as `α`, travelled along their `α`-arcs.
fn circle_label_direction(
    d: &LinkDiagram,
    res: &Resolution,
    circle: usize,
    state: CanonicalState,
) -> Result<(bool, bool)> {
    let circ = &res.circles[circle];
    let labels: Vec<bool> = circ.edges.iter().map(|&e| label(state, d.component_of(e))).collect();
    let beta = labels.iter().all(|&l| l);
    let keep = !beta && labels.iter().any(|&l| l);
    let mut dir = None;
    for (k, &l) in labels.iter().enumerate() {
        if keep && l {
            continue;
        }
        match dir {
            None => dir = Some(circ.forward[k]),
            Some(f) if f != circ.forward[k] => {
                return Err(Error::Internal(format!(
                    "circle through edge {} is not coherently oriented",
                    circ.smallest_edge()
                )))
            }
            _ => {}
        }
    }
    Ok((beta, dir.expect("nonempty circle")))
}

/// Parity bit of a circle: 0 selects `z1`, 1 selects `z2`.
pub fn circle_invariant(
    d: &LinkDiagram,
    res: &Resolution,
    circle: usize,
    state: CanonicalState,
    outer: Option<usize>,
) -> Result<u8> {
    let (beta, forward) = circle_label_direction(d, res, circle, state)?;
    let depth = res.circle_depths(outer)?[circle];
    let cw = res.is_clockwise(circle, forward, outer)?;
    Ok(((depth + cw as usize + beta as usize) % 2) as u8)
}

#[derive(Clone, Debug)]
pub struct CanonicalGenerator {
    pub state: CanonicalState,
    pub vertex: u64,
    /// homological degree
    pub r: i64,
    pub idempotents: Vec<Idempotent>,
    /// the chain in the standard basis of `C^r`
    pub vector: SparseVec,
    pub q_level: i64,
}

/// `h_φ` for one state, checked to be a cycle.
pub fn canonical_generator(c: &FilteredComplex, state: CanonicalState) -> Result<CanonicalGenerator> {
    let d = c.diagram();
    if state >> d.n_components() != 0 {
        return Err(Error::Input(format!("state {state:b} has too many components")));
    }
    let vertex = canonical_vertex(d, state);
    let r = c.degree_of_vertex(vertex);
    let group = c.group(r).ok_or_else(|| Error::Internal("missing chain group".into()))?;
    let res = group
        .resolution(vertex)
        .ok_or_else(|| Error::Internal("missing cube vertex".into()))?;
    let outer = d.outer_hint();
    let k = res.n_circles();
    let mut idempotents = Vec::with_capacity(k);
    for j in 0..k {
        idempotents.push(match circle_invariant(d, res, j, state, outer)? {
            0 => Idempotent::Z1,
            _ => Idempotent::Z2,
        });
    }
    let p = c.params();
    let factors: Vec<[Q; 2]> = idempotents.iter().map(|&i| p.idempotent(i).c).collect();
    let mut entries = Vec::with_capacity(1 << k);
    for mask in 0..1u64 << k {
        let mut coeff = Q::from_integer(1.into());
        for (j, f) in factors.iter().enumerate() {
            coeff *= &f[(mask >> j & 1) as usize];
        }
        let idx = group
            .index_of(Generator { vertex, labels: mask })
            .expect("labels within the vertex block");
        entries.push((idx, coeff));
    }
    let vector = SparseVec::from_entries(entries);
    if !c.differential(r).apply(&vector).is_zero() {
        return Err(Error::Internal(format!(
            "canonical chain of state {state:b} at vertex {vertex:b} is not a cycle"
        )));
    }
    let q_level = k as i64 - r + c.n_plus() as i64 - c.n_minus() as i64;
    Ok(CanonicalGenerator {
        state,
        vertex,
        r,
        idempotents,
        vector,
        q_level,
    })
}

pub fn canonical_generators(c: &FilteredComplex) -> Result<Vec<CanonicalGenerator>> {
    let states = canonical_states(c.diagram());
    par_map(states.len(), |i| canonical_generator(c, states[i]))
        .into_iter()
        .collect()
}

/// Whether the classes of the given cycles are independent in homology.
pub fn classes_independent(c: &FilteredComplex, gens: &[CanonicalGenerator]) -> Result<bool> {
    for r in c.degrees() {
        let here: Vec<&CanonicalGenerator> = gens.iter().filter(|g| g.r == r).collect();
        if here.is_empty() {
            continue;
        }
        let b = c.differential(r - 1).image();
        let mut span = b.clone();
        for g in &here {
            span.add_vector(&g.vector);
        }
        if span.dim() - b.dim() != here.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Subspace of `C^r` spanned by the given chains.
pub fn span_in_degree(c: &FilteredComplex, gens: &[CanonicalGenerator], r: i64) -> Subspace {
    Subspace::from_vectors(
        c.dim(r),
        gens.iter().filter(|g| g.r == r).map(|g| g.vector.clone()),
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct CircleJson {
    pub id: usize,
    /// smallest edge of the circle
    pub edge: usize,
    pub idempotent: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorJson {
    /// one letter per component, `a` or `b`
    pub state: String,
    pub vertex: String,
    pub circles: Vec<CircleJson>,
    pub hdeg: i64,
    pub qlevel: i64,
    /// nonzero coordinates as `(labels, coefficient)`
    pub chain: Vec<(String, String)>,
}

pub fn generator_json(c: &FilteredComplex, g: &CanonicalGenerator) -> GeneratorJson {
    let d = c.diagram();
    let group = c.group(g.r).expect("generator degree");
    let res = group.resolution(g.vertex).expect("generator vertex");
    GeneratorJson {
        state: (0..d.n_components())
            .map(|i| if label(g.state, i) { 'b' } else { 'a' })
            .collect(),
        vertex: format!("{:0w$b}", g.vertex, w = d.n_crossings()),
        circles: g
            .idempotents
            .iter()
            .enumerate()
            .map(|(j, i)| CircleJson {
                id: j,
                edge: res.circles[j].smallest_edge(),
                idempotent: match i {
                    Idempotent::Z1 => "z1",
                    Idempotent::Z2 => "z2",
                },
            })
            .collect(),
        hdeg: g.r,
        qlevel: g.q_level,
        chain: g
            .vector
            .entries()
            .iter()
            .map(|(i, v)| {
                let gen = group.generator(*i);
                (label_string(gen.labels, res.n_circles()), v.to_string())
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests;
