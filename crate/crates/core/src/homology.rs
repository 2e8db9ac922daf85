//! Khovanov homology, filtered homology and its filtration levels.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::algebra::{q, Q};
use crate::complex::FilteredComplex;
use crate::error::{Error, Result};
use crate::exactla::Subspace;
use crate::par_map;
use crate::spectral::{Cells, Persistence};

/// Dimensions keyed by `(r, q)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BigradedDims(pub Cells);

impl BigradedDims {
    pub fn get(&self, r: i64, q: i64) -> usize {
        self.0.get(&(r, q)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn by_degree(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for (&(r, _), &d) in &self.0 {
            *out.entry(r).or_insert(0) += d;
        }
        out
    }

    pub fn triples(&self) -> Vec<[i64; 3]> {
        self.0.iter().map(|(&(r, q), &d)| [r, q, d as i64]).collect()
    }
}

fn q_blocks(qs: &[i64]) -> BTreeMap<i64, Vec<usize>> {
    let mut out: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &qv) in qs.iter().enumerate() {
        out.entry(qv).or_default().push(i);
    }
    out
}

/// Homology of the degree-preserving differential, split by q.
pub fn khovanov_homology(c: &FilteredComplex) -> BigradedDims {
    let degrees: Vec<i64> = c.degrees().collect();
    // rank of d_top out of every (r, q) block
    let ranks: Vec<BTreeMap<i64, usize>> = par_map(degrees.len(), |h| {
        let r = degrees[h];
        let top = c.top_differential(r);
        let src = q_blocks(c.group(r).map(|g| g.q()).unwrap_or(&[]));
        let dst = q_blocks(c.group(r + 1).map(|g| g.q()).unwrap_or(&[]));
        src.iter()
            .map(|(&qv, cols)| {
                let rank = dst.get(&qv).map_or(0, |rows| top.submatrix(rows, cols).rank());
                (qv, rank)
            })
            .collect()
    });
    let mut cells = Cells::new();
    for (h, &r) in degrees.iter().enumerate() {
        for (qv, idx) in q_blocks(c.group(r).unwrap().q()) {
            let out = ranks[h].get(&qv).copied().unwrap_or(0);
            let into = if h > 0 { ranks[h - 1].get(&qv).copied().unwrap_or(0) } else { 0 };
            let dim = idx.len() - out - into;
            if dim > 0 {
                cells.insert((r, qv), dim);
            }
        }
    }
    BigradedDims(cells)
}

/// `dim H^r = dim ker d^r - rank d^(r-1)` for every degree.
pub fn filtered_homology(c: &FilteredComplex) -> BTreeMap<i64, usize> {
    let degrees: Vec<i64> = c.degrees().collect();
    let ranks: Vec<usize> = par_map(degrees.len(), |h| c.differential(degrees[h]).rank());
    let mut out = BTreeMap::new();
    for (h, &r) in degrees.iter().enumerate() {
        let before = if h > 0 { ranks[h - 1] } else { 0 };
        let dim = c.dim(r) - ranks[h] - before;
        if dim > 0 {
            out.insert(r, dim);
        }
    }
    out
}

/// Filtration levels of the filtered homology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SInvariants {
    pub s_min: i64,
    pub s_max: i64,
    pub components: usize,
    /// `dim H^r` per degree
    pub totals: BTreeMap<i64, usize>,
    /// `(k, dim F^k H^r)` per degree, for every q-level of the complex
    pub profiles: BTreeMap<i64, Vec<(i64, usize)>>,
}

impl SInvariants {
    /// `(s_max + s_min) / 2`, for knots only.
    pub fn s_bar(&self) -> Option<Q> {
        (self.components == 1).then(|| Q::new((self.s_max + self.s_min).into(), 2.into()))
    }

    /// `dim F^k H` summed over all degrees.
    pub fn level_dim(&self, k: i64) -> usize {
        self.profiles
            .values()
            .map(|p| p.iter().take_while(|(lvl, _)| *lvl <= k).last().map_or(0, |x| x.1))
            .sum()
    }

    fn from_profiles(
        components: usize,
        totals: BTreeMap<i64, usize>,
        profiles: BTreeMap<i64, Vec<(i64, usize)>>,
    ) -> Result<Self> {
        let levels: BTreeSet<i64> = profiles.values().flat_map(|p| p.iter().map(|x| x.0)).collect();
        let total: usize = totals.values().sum();
        if total == 0 {
            return Err(Error::Internal("filtered homology vanishes".into()));
        }
        let mut s = SInvariants {
            s_min: 0,
            s_max: 0,
            components,
            totals,
            profiles,
        };
        s.s_min = *levels
            .iter()
            .find(|&&k| s.level_dim(k) > 0)
            .ok_or_else(|| Error::Internal("no nonzero filtration level".into()))?;
        s.s_max = *levels
            .iter()
            .find(|&&k| s.level_dim(k) == total)
            .ok_or_else(|| Error::Internal("filtration never exhausts homology".into()))?;
        Ok(s)
    }
}

fn q_levels(c: &FilteredComplex) -> Vec<i64> {
    let set: BTreeSet<i64> = c
        .degrees()
        .flat_map(|r| c.group(r).unwrap().q().to_vec())
        .collect();
    set.into_iter().collect()
}

/// Filtration levels from the persistence pairing: a class surviving to the
/// limit page at level q lies in `F^k H` exactly when `q <= k`.
pub fn filtration_levels(c: &FilteredComplex) -> Result<SInvariants> {
    levels_from_persistence(c, &Persistence::compute(c))
}

pub fn levels_from_persistence(c: &FilteredComplex, pers: &Persistence) -> Result<SInvariants> {
    let levels = q_levels(c);
    let mut by_degree: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for e in &pers.essential {
        by_degree.entry(e.r).or_default().push(e.q);
    }
    let mut totals = BTreeMap::new();
    let mut profiles = BTreeMap::new();
    for (r, qs) in by_degree {
        totals.insert(r, qs.len());
        let prof = levels
            .iter()
            .map(|&k| (k, qs.iter().filter(|&&qv| qv <= k).count()))
            .collect();
        profiles.insert(r, prof);
    }
    SInvariants::from_profiles(c.n_components(), totals, profiles)
}

/// Same levels from `dim((Z^r ∩ F^k) + B^r) - dim B^r`, by subspace arithmetic.
pub fn filtration_levels_by_subspaces(c: &FilteredComplex) -> Result<SInvariants> {
    let levels = q_levels(c);
    let mut totals = BTreeMap::new();
    let mut profiles = BTreeMap::new();
    for r in c.degrees() {
        let n = c.dim(r);
        let z = c.differential(r).kernel();
        let b = c.differential(r - 1).image();
        let total = z.quotient_dim(&b)?;
        if total == 0 {
            continue;
        }
        totals.insert(r, total);
        let mut prof = Vec::with_capacity(levels.len());
        for &k in &levels {
            let fk = Subspace::from_vectors(
                n,
                c.filtration_basis(k, r).into_iter().map(crate::exactla::SparseVec::unit),
            );
            let zk = z.intersect(&fk)?.sum(&b)?;
            prof.push((k, zk.quotient_dim(&b)?));
        }
        profiles.insert(r, prof);
    }
    SInvariants::from_profiles(c.n_components(), totals, profiles)
}

/// Lower bounds certified by the filtration levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceBounds {
    /// `s_max` bounds the slice Euler characteristic from below
    pub chi: i64,
    /// `|s_bar| / 2` bounds the slice genus from below (knots only)
    pub genus: Option<Q>,
}

pub fn slice_bounds(s: &SInvariants) -> SliceBounds {
    SliceBounds {
        chi: s.s_max,
        genus: s.s_bar().map(|sb| num_traits::Signed::abs(&sb) / q(2)),
    }
}

// ---- JSON report ----

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct DiagramMeta {
    pub crossings: usize,
    pub components: usize,
    pub n_plus: usize,
    pub n_minus: usize,
    pub writhe: i64,
    pub pd: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamsMeta {
    pub a: String,
    pub h: String,
    pub alpha: String,
    pub beta: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SJson {
    pub smin: i64,
    pub smax: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sbar: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsJson {
    pub chi: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConventionJson {
    pub sign: &'static str,
    pub mirror: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyReport {
    pub version: u32,
    pub diagram: DiagramMeta,
    pub params: ParamsMeta,
    pub kh: Vec<[i64; 3]>,
    pub filtered: Vec<[i64; 2]>,
    pub s: SJson,
    pub bounds: BoundsJson,
    pub convention: ConventionJson,
}

pub fn q_to_f64(x: &Q) -> f64 {
    num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
}

pub fn diagram_meta(c: &FilteredComplex) -> DiagramMeta {
    let d = c.diagram();
    DiagramMeta {
        crossings: d.n_crossings(),
        components: d.n_components(),
        n_plus: d.n_plus(),
        n_minus: d.n_minus(),
        writhe: d.writhe(),
        pd: d.to_pd_string(),
    }
}

pub fn params_meta(c: &FilteredComplex) -> ParamsMeta {
    let p = c.params();
    ParamsMeta {
        a: p.a().to_string(),
        h: p.h().to_string(),
        alpha: p.alpha().to_string(),
        beta: p.beta().to_string(),
    }
}

impl HomologyReport {
    pub fn compute(c: &FilteredComplex, mirrored: bool) -> Result<Self> {
        let pers = Persistence::compute(c);
        let kh = khovanov_homology(c);
        let s = levels_from_persistence(c, &pers)?;
        let bounds = slice_bounds(&s);
        Ok(HomologyReport {
            version: REPORT_VERSION,
            diagram: diagram_meta(c),
            params: params_meta(c),
            kh: kh.triples(),
            filtered: s.totals.iter().map(|(&r, &d)| [r, d as i64]).collect(),
            s: SJson {
                smin: s.s_min,
                smax: s.s_max,
                sbar: s.s_bar().map(|x| q_to_f64(&x)),
            },
            bounds: BoundsJson {
                chi: bounds.chi,
                genus: bounds.genus.map(|x| q_to_f64(&x)),
            },
            convention: ConventionJson {
                sign: crate::SIGN_CONVENTION,
                mirror: mirrored,
            },
        })
    }
}
