//! Ground fields. Every computation in the crate is exact: prime fields use
//! reduced `u32` residues, the rationals use arbitrary-precision fractions.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Which field a presentation lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    Prime(u32),
    Rational,
}

impl FieldKind {
    pub fn characteristic(&self) -> u32 {
        match self {
            FieldKind::Prime(p) => *p,
            FieldKind::Rational => 0,
        }
    }
}

impl Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Prime(p) => write!(f, "F{p}"),
            FieldKind::Rational => write!(f, "Q"),
        }
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Arithmetic of a field whose elements are plain values.
///
/// The field object carries the parameters (the prime) and elements are
/// manipulated through it, so matrices stay simple `Vec`s of elements.
pub trait Field: Clone + Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    fn kind(&self) -> FieldKind;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Panics on zero.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn from_bigint(&self, n: &BigInt) -> Self::Elem;
    fn format(&self, a: &Self::Elem) -> String;

    fn characteristic(&self) -> u32 {
        self.kind().characteristic()
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// `dst += c * src`, skipping the work when `c` is zero.
    fn axpy(&self, dst: &mut [Self::Elem], c: &Self::Elem, src: &[Self::Elem]) {
        if self.is_zero(c) {
            return;
        }
        for (d, s) in dst.iter_mut().zip(src) {
            if !self.is_zero(s) {
                *d = self.add(d, &self.mul(c, s));
            }
        }
    }

    fn scale(&self, v: &mut [Self::Elem], c: &Self::Elem) {
        for x in v.iter_mut() {
            *x = self.mul(x, c);
        }
    }

    fn sign(&self, negative: bool) -> Self::Elem {
        if negative {
            self.neg(&self.one())
        } else {
            self.one()
        }
    }
}

/// The prime field F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u32,
}

impl Fp {
    /// Returns `None` unless `p` is a prime below 2^31.
    pub fn new(p: u32) -> Option<Self> {
        (is_prime(p) && p < (1 << 31)).then_some(Fp { p })
    }

    pub fn prime(&self) -> u32 {
        self.p
    }
}

impl Field for Fp {
    type Elem = u32;

    fn kind(&self) -> FieldKind {
        FieldKind::Prime(self.p)
    }
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        let s = *a + *b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u32) -> u32 {
        assert!(*a != 0, "inverse of zero in F{}", self.p);
        // Fermat: a^(p-2)
        let mut base = *a as u64;
        let mut e = self.p - 2;
        let mut acc = 1u64;
        let p = self.p as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc as u32
    }
    fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }
    fn from_bigint(&self, n: &BigInt) -> u32 {
        let p = BigInt::from(self.p);
        let r = ((n % &p) + &p) % &p;
        u32::try_from(r).expect("residue fits in u32")
    }
    fn format(&self, a: &u32) -> String {
        a.to_string()
    }

    fn axpy(&self, dst: &mut [u32], c: &u32, src: &[u32]) {
        if *c == 0 {
            return;
        }
        let p = self.p as u64;
        let c = *c as u64;
        for (d, s) in dst.iter_mut().zip(src) {
            if *s != 0 {
                *d = ((*d as u64 + c * *s as u64) % p) as u32;
            }
        }
    }
}

/// The rational numbers with exact big-integer fractions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn kind(&self) -> FieldKind {
        FieldKind::Rational
    }
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero in Q");
        a.recip()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_bigint(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
    fn format(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else if a.is_negative() {
            format!("-{}/{}", a.numer().abs(), a.denom())
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }
}
