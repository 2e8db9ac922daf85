//! The rank-two Frobenius algebra `A = Q[X]/(X^2 - hX - a)` at fixed rational
//! parameters with distinct rational roots.
//!
//! Elements are stored in the `{1, X}` basis. The idempotent basis
//! `z1 = (X - alpha)/(beta - alpha)`, `z2 = (X - beta)/(alpha - beta)` is
//! available through [`FrobeniusParams::idempotents`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Exact rational scalar used throughout the crate.
pub type Q = num_rational::BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-2"`, `"1/2"`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Input(format!("not a rational number: `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// Exact square root of a nonnegative rational, if it is a square.
fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let rn = n.sqrt();
    let rd = d.sqrt();
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Q::new(rn, rd))
}

/// Parameters of the Frobenius system. Always satisfies `alpha > beta`,
/// `a = -alpha*beta`, `h = alpha + beta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusParams {
    alpha: Q,
    beta: Q,
    a: Q,
    h: Q,
}

impl FrobeniusParams {
    pub fn from_ah(a: Q, h: Q) -> Result<Self> {
        let disc = &h * &h + q(4) * &a;
        if disc.is_zero() {
            return Err(Error::Params(format!(
                "h^2 + 4a = 0 for (a, h) = ({a}, {h}): repeated root"
            )));
        }
        let root = rational_sqrt(&disc).ok_or_else(|| {
            Error::Params(format!(
                "h^2 + 4a = {disc} is not the square of a rational; only parameters \
                 with rational roots are supported in exact arithmetic"
            ))
        })?;
        let two = q(2);
        let alpha = (&h + &root) / &two;
        let beta = (&h - &root) / &two;
        Ok(FrobeniusParams { alpha, beta, a, h })
    }

    pub fn from_roots(r1: Q, r2: Q) -> Result<Self> {
        if r1 == r2 {
            return Err(Error::Params(format!("roots must be distinct, got {r1} twice")));
        }
        let (alpha, beta) = if r1 > r2 { (r1, r2) } else { (r2, r1) };
        let a = -(&alpha * &beta);
        let h = &alpha + &beta;
        Ok(FrobeniusParams { alpha, beta, a, h })
    }

    /// `(a, h) = (1, 0)`, roots `±1`.
    pub fn lee() -> Self {
        Self::from_ah(q(1), q(0)).expect("lee preset")
    }

    /// `(a, h) = (0, 1)`, roots `1, 0`.
    pub fn bar_natan() -> Self {
        Self::from_ah(q(0), q(1)).expect("bar-natan preset")
    }

    pub fn alpha(&self) -> &Q {
        &self.alpha
    }
    pub fn beta(&self) -> &Q {
        &self.beta
    }
    pub fn a(&self) -> &Q {
        &self.a
    }
    pub fn h(&self) -> &Q {
        &self.h
    }

    pub fn one(&self) -> Elem {
        Elem::one()
    }

    pub fn mult(&self, u: &Elem, v: &Elem) -> Elem {
        // (u0 + u1 X)(v0 + v1 X) with X^2 = hX + a
        let xx = &u.c[1] * &v.c[1];
        Elem::new(
            &u.c[0] * &v.c[0] + &xx * &self.a,
            &u.c[0] * &v.c[1] + &u.c[1] * &v.c[0] + &xx * &self.h,
        )
    }

    pub fn comult(&self, u: &Elem) -> Tensor2 {
        let mut t = Tensor2::zero();
        // Δ(1) = 1⊗X + X⊗1 − h 1⊗1
        if !u.c[0].is_zero() {
            let c = &u.c[0];
            t.c[0][1] += c;
            t.c[1][0] += c;
            t.c[0][0] -= c * &self.h;
        }
        // Δ(X) = X⊗X + a 1⊗1
        if !u.c[1].is_zero() {
            let c = &u.c[1];
            t.c[1][1] += c;
            t.c[0][0] += c * &self.a;
        }
        t
    }

    pub fn unit(&self) -> Elem {
        Elem::one()
    }

    pub fn counit(&self, u: &Elem) -> Q {
        u.c[1].clone()
    }

    /// Multiplication on the tensor product `u⊗v ↦ m(u⊗v)`.
    pub fn mult_tensor(&self, t: &Tensor2) -> Elem {
        let mut out = Elem::zero();
        for i in 0..2 {
            for j in 0..2 {
                if !t.c[i][j].is_zero() {
                    let p = self.mult(&Elem::basis(i), &Elem::basis(j));
                    out = out.add(&p.scale(&t.c[i][j]));
                }
            }
        }
        out
    }

    /// `(z1, z2)`.
    pub fn idempotents(&self) -> (Elem, Elem) {
        let ba = &self.beta - &self.alpha;
        let ab = &self.alpha - &self.beta;
        let z1 = Elem::new(-(&self.alpha) / &ba, Q::one() / &ba);
        let z2 = Elem::new(-(&self.beta) / &ab, Q::one() / &ab);
        (z1, z2)
    }

    pub fn idempotent(&self, i: Idempotent) -> Elem {
        let (z1, z2) = self.idempotents();
        match i {
            Idempotent::Z1 => z1,
            Idempotent::Z2 => z2,
        }
    }

    /// Coordinates `(c1, c2)` with `u = c1 z1 + c2 z2`.
    pub fn to_idempotent_basis(&self, u: &Elem) -> (Q, Q) {
        // z1 + z2 = 1, alpha-value at z2... evaluate u at the roots:
        // z1(beta) = 1, z1(alpha) = 0, z2(alpha) = 1, z2(beta) = 0.
        let at = |r: &Q| &u.c[0] + &u.c[1] * r;
        (at(&self.beta), at(&self.alpha))
    }

    pub fn from_idempotent_basis(&self, c1: &Q, c2: &Q) -> Elem {
        let (z1, z2) = self.idempotents();
        z1.scale(c1).add(&z2.scale(c2))
    }

    /// `(X ⊗ 1 ...)` degree data: `deg(1) = -1`, `deg(X) = 1`.
    pub fn basis_degree(i: usize) -> i32 {
        if i == 0 {
            -1
        } else {
            1
        }
    }

    /// `m'`: the degree-preserving part of `m`.
    pub fn top_mult(&self, i: usize, j: usize) -> Option<usize> {
        match (i, j) {
            (0, 0) => Some(0),
            (0, 1) | (1, 0) => Some(1),
            _ => None,
        }
    }

    /// `Δ'`: the degree-preserving part of `Δ` on a basis element.
    pub fn top_comult(&self, i: usize) -> Vec<(usize, usize)> {
        if i == 0 {
            vec![(0, 1), (1, 0)]
        } else {
            vec![(1, 1)]
        }
    }
}

impl fmt::Display for FrobeniusParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a={}, h={} (alpha={}, beta={})",
            self.a, self.h, self.alpha, self.beta
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Idempotent {
    Z1,
    Z2,
}

impl Idempotent {
    pub fn other(self) -> Self {
        match self {
            Idempotent::Z1 => Idempotent::Z2,
            Idempotent::Z2 => Idempotent::Z1,
        }
    }
}

/// An element `c0 + c1 X` of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elem {
    pub c: [Q; 2],
}

impl Elem {
    pub fn new(c0: Q, c1: Q) -> Self {
        Elem { c: [c0, c1] }
    }
    pub fn zero() -> Self {
        Elem::new(Q::zero(), Q::zero())
    }
    pub fn one() -> Self {
        Elem::new(Q::one(), Q::zero())
    }
    pub fn x() -> Self {
        Elem::new(Q::zero(), Q::one())
    }
    pub fn basis(i: usize) -> Self {
        if i == 0 {
            Self::one()
        } else {
            Self::x()
        }
    }
    pub fn is_zero(&self) -> bool {
        self.c[0].is_zero() && self.c[1].is_zero()
    }
    pub fn add(&self, o: &Elem) -> Elem {
        Elem::new(&self.c[0] + &o.c[0], &self.c[1] + &o.c[1])
    }
    pub fn sub(&self, o: &Elem) -> Elem {
        Elem::new(&self.c[0] - &o.c[0], &self.c[1] - &o.c[1])
    }
    pub fn scale(&self, s: &Q) -> Elem {
        Elem::new(&self.c[0] * s, &self.c[1] * s)
    }
    /// Largest monomial degree present, `None` for zero.
    pub fn degree(&self) -> Option<i32> {
        if !self.c[1].is_zero() {
            Some(1)
        } else if !self.c[0].is_zero() {
            Some(-1)
        } else {
            None
        }
    }
}

/// An element of `A ⊗ A`; `c[i][j]` is the coefficient of `b_i ⊗ b_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor2 {
    pub c: [[Q; 2]; 2],
}

impl Tensor2 {
    pub fn zero() -> Self {
        Tensor2 {
            c: [[Q::zero(), Q::zero()], [Q::zero(), Q::zero()]],
        }
    }
    pub fn pure(u: &Elem, v: &Elem) -> Self {
        let mut t = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                t.c[i][j] = &u.c[i] * &v.c[j];
            }
        }
        t
    }
    pub fn add(&self, o: &Tensor2) -> Tensor2 {
        let mut t = self.clone();
        for i in 0..2 {
            for j in 0..2 {
                t.c[i][j] += &o.c[i][j];
            }
        }
        t
    }
    pub fn scale(&self, s: &Q) -> Tensor2 {
        let mut t = self.clone();
        for row in t.c.iter_mut() {
            for e in row.iter_mut() {
                *e *= s;
            }
        }
        t
    }
    pub fn is_zero(&self) -> bool {
        self.c.iter().flatten().all(Zero::is_zero)
    }
}
