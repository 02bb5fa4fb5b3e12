//! Exact arithmetic in GF(p^m).
//!
//! Elements are packed as integers: the polynomial `a_0 + a_1 x + ... + a_{m-1} x^{m-1}`
//! is stored as `sum a_i p^i`. Multiplication goes through discrete log/exp tables built
//! from the field's primitive element, so every operation is a table lookup or a small
//! digit loop.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest field order accepted unless a caller passes its own guard.
pub const DEFAULT_FIELD_GUARD: u64 = 1 << 20;

/// Addition tables are materialized for extension fields up to this order.
const ADD_TABLE_MAX_ORDER: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{m} exceeds the size guard {guard}")]
    TooLarge { p: u64, m: u32, guard: u64 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("element code {code} is out of range for GF({q})")]
    OutOfRange { code: u64, q: u32 },
    #[error("modulus must be monic of degree {m} with coefficients below {p}")]
    BadModulus { p: u32, m: u32 },
    #[error("modulus is reducible over GF({0})")]
    Reducible(u32),
    #[error("element {0} is not primitive")]
    NotPrimitive(u32),
}

/// A field element, identified by its packed code in `[0, q)`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Elem(u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub const fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Wraps a code without checking it against a field. Callers guarantee `code < q`.
    #[inline]
    pub(crate) const fn from_code(code: u32) -> Elem {
        Elem(code)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Plain-data description of a field, the JSON form `{"p", "m", "modulus", "gamma"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub m: u32,
    pub modulus: Vec<u32>,
    pub gamma: u32,
}

/// An immutable finite field. Cloning is cheap; all clones share the same tables.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "FieldSpec", into = "FieldSpec")]
pub struct Field(Arc<Inner>);

struct Inner {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u32>,
    gamma: Elem,
    // exp has length 2(q-1) so that log a + log b never needs a reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

impl Field {
    /// `GF(p^m)` with the default size guard.
    pub fn new(p: u64, m: u32) -> Result<Field, GfError> {
        Field::with_guard(p, m, DEFAULT_FIELD_GUARD)
    }

    /// `GF(p^m)` with the lexicographically smallest monic irreducible modulus
    /// (coefficients compared from the constant term up) and the smallest primitive element.
    pub fn with_guard(p: u64, m: u32, guard: u64) -> Result<Field, GfError> {
        let p32 = check_order(p, m, guard)?;
        let modulus = smallest_irreducible(p32, m);
        let q = p32.pow(m);
        let gamma = smallest_primitive(p32, m, q, &modulus);
        Ok(Field::build(p32, m, modulus, gamma))
    }

    /// Rebuilds a field from its serialized description, validating every invariant.
    pub fn from_spec(spec: &FieldSpec) -> Result<Field, GfError> {
        Field::from_spec_with_guard(spec, DEFAULT_FIELD_GUARD)
    }

    pub fn from_spec_with_guard(spec: &FieldSpec, guard: u64) -> Result<Field, GfError> {
        let p = check_order(spec.p as u64, spec.m, guard)?;
        let m = spec.m;
        if spec.modulus.len() != m as usize + 1
            || spec.modulus[m as usize] != 1
            || spec.modulus.iter().any(|&c| c >= p)
        {
            return Err(GfError::BadModulus { p, m });
        }
        if !is_irreducible(p, &spec.modulus) {
            return Err(GfError::Reducible(p));
        }
        let q = p.pow(m);
        if spec.gamma >= q {
            return Err(GfError::OutOfRange {
                code: spec.gamma as u64,
                q,
            });
        }
        if !is_primitive(p, m, q, &spec.modulus, spec.gamma) {
            return Err(GfError::NotPrimitive(spec.gamma));
        }
        Ok(Field::build(p, m, spec.modulus.clone(), spec.gamma))
    }

    fn build(p: u32, m: u32, modulus: Vec<u32>, gamma: u32) -> Field {
        let q = p.pow(m);
        let order = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * order.max(1)];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..order {
            exp[i] = x;
            exp[i + order] = x;
            log[x as usize] = i as u32;
            x = slow_mul(p, m, &modulus, x, gamma);
        }
        let neg = (0..q).map(|a| digit_neg(p, m, a)).collect::<Vec<_>>();
        let add = (m > 1 && q <= ADD_TABLE_MAX_ORDER).then(|| {
            let mut t = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    t[(a * q + b) as usize] = digit_add(p, m, a, b);
                }
            }
            t
        });
        Field(Arc::new(Inner {
            p,
            m,
            q,
            modulus,
            gamma: Elem(gamma),
            exp,
            log,
            neg,
            add,
        }))
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.0.m
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.0.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// The designated primitive element.
    #[inline]
    pub fn gamma(&self) -> Elem {
        self.0.gamma
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.0.p,
            m: self.0.m,
            modulus: self.0.modulus.clone(),
            gamma: self.0.gamma.0,
        }
    }

    pub fn elem(&self, code: u64) -> Result<Elem, GfError> {
        if code < self.0.q as u64 {
            Ok(Elem(code as u32))
        } else {
            Err(GfError::OutOfRange { code, q: self.0.q })
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> Elem {
        Elem(v.rem_euclid(self.0.p as i64) as u32)
    }

    /// All `q` elements in increasing code order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone + 'static {
        (0..self.0.q).map(Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let f = &*self.0;
        if f.m == 1 {
            let s = a.0 + b.0;
            Elem(if s >= f.p { s - f.p } else { s })
        } else if let Some(t) = &f.add {
            Elem(t[(a.0 * f.q + b.0) as usize])
        } else {
            Elem(digit_add(f.p, f.m, a.0, b.0))
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.0.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        let f = &*self.0;
        Elem(f.exp[(f.log[a.0 as usize] + f.log[b.0 as usize]) as usize])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, GfError> {
        if a.0 == 0 {
            return Err(GfError::ZeroInverse);
        }
        let f = &*self.0;
        let order = f.q - 1;
        Ok(Elem(
            f.exp[((order - f.log[a.0 as usize]) % order) as usize],
        ))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e`, with `0^0 = 1`.
    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.0 == 0 {
            return Elem::ZERO;
        }
        let f = &*self.0;
        let order = (f.q - 1) as u64;
        let l = (f.log[a.0 as usize] as u64 * (e % order)) % order;
        Elem(f.exp[l as usize])
    }

    /// `gamma^e` for any integer exponent.
    pub fn gamma_pow(&self, e: i64) -> Elem {
        let order = (self.0.q - 1) as i64;
        let l = e.rem_euclid(order) as u64;
        self.pow(self.0.gamma, l)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Elem) -> Result<u64, GfError> {
        if a.0 == 0 {
            return Err(GfError::ZeroInverse);
        }
        let n = (self.0.q - 1) as u64;
        let l = self.0.log[a.0 as usize] as u64;
        Ok(n / gcd(n, l))
    }

    /// Square-and-multiply reference path that does not touch the log tables.
    pub fn pow_by_squaring(&self, a: Elem, mut e: u64) -> Elem {
        let f = &*self.0;
        let mut base = a.0;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = slow_mul(f.p, f.m, &f.modulus, acc, base);
            }
            base = slow_mul(f.p, f.m, &f.modulus, base, base);
            e >>= 1;
        }
        Elem(acc)
    }

    /// Polynomial product reduced by the modulus, computed digit by digit.
    pub fn mul_by_polynomial(&self, a: Elem, b: Elem) -> Elem {
        let f = &*self.0;
        Elem(slow_mul(f.p, f.m, &f.modulus, a.0, b.0))
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p
                && self.0.m == other.0.m
                && self.0.modulus == other.0.modulus
                && self.0.gamma == other.0.gamma)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.0.p)
            .field("m", &self.0.m)
            .field("modulus", &self.0.modulus)
            .field("gamma", &self.0.gamma.0)
            .finish()
    }
}

impl TryFrom<FieldSpec> for Field {
    type Error = GfError;

    fn try_from(spec: FieldSpec) -> Result<Field, GfError> {
        Field::from_spec(&spec)
    }
}

impl From<Field> for FieldSpec {
    fn from(f: Field) -> FieldSpec {
        f.spec()
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn check_order(p: u64, m: u32, guard: u64) -> Result<u32, GfError> {
    if !is_prime(p) {
        return Err(GfError::NotPrime(p));
    }
    if m == 0 {
        return Err(GfError::ZeroDegree);
    }
    let too_large = GfError::TooLarge { p, m, guard };
    let q = p.checked_pow(m).ok_or(too_large.clone())?;
    if q > guard || q > u32::MAX as u64 {
        return Err(too_large);
    }
    Ok(p as u32)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn digits(p: u32, m: u32, mut a: u32) -> Vec<u32> {
    let mut d = Vec::with_capacity(m as usize);
    for _ in 0..m {
        d.push(a % p);
        a /= p;
    }
    d
}

fn pack(p: u32, d: &[u32]) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn digit_add(p: u32, m: u32, a: u32, b: u32) -> u32 {
    let (da, db) = (digits(p, m, a), digits(p, m, b));
    let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
    pack(p, &s)
}

fn digit_neg(p: u32, m: u32, a: u32) -> u32 {
    let d: Vec<u32> = digits(p, m, a).iter().map(|&x| (p - x) % p).collect();
    pack(p, &d)
}

fn slow_mul(p: u32, m: u32, modulus: &[u32], a: u32, b: u32) -> u32 {
    let (da, db) = (digits(p, m, a), digits(p, m, b));
    let p64 = p as u64;
    let mut prod = vec![0u64; 2 * m as usize];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p64;
        }
    }
    let m = m as usize;
    for deg in (m..prod.len()).rev() {
        let c = prod[deg];
        if c == 0 {
            continue;
        }
        // x^deg = -(modulus lower terms) * x^(deg-m)
        for (i, &mc) in modulus[..m].iter().enumerate() {
            let t = prod[deg - m + i] + (p64 - mc as u64) * c;
            prod[deg - m + i] = t % p64;
        }
        prod[deg] = 0;
    }
    let low: Vec<u32> = prod[..m].iter().map(|&c| c as u32).collect();
    pack(p, &low)
}

/// Remainder of `a` modulo the monic polynomial `b` (coefficients low-degree first).
fn poly_rem(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
    let p64 = p as u64;
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &bc) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p64 - bc as u64) * lead) % p64;
            }
        }
        r.pop();
    }
    r.into_iter().map(|c| c as u32).collect()
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible(p: u32, f: &[u32]) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        for low in 0..p.pow(d as u32) {
            let mut g = digits(p, d as u32, low);
            g.push(1);
            if poly_rem(p, f, &g).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, m: u32) -> Vec<u32> {
    // Counting with the constant term as the most significant digit walks the
    // candidates in low-degree-first lexicographic order.
    for idx in 0..p.pow(m) {
        let mut coeffs = digits(p, m, idx);
        coeffs.reverse();
        coeffs.push(1);
        if is_irreducible(p, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over a prime field")
}

fn slow_pow(p: u32, m: u32, modulus: &[u32], a: u32, mut e: u64) -> u32 {
    let mut base = a;
    let mut acc = 1u32;
    while e > 0 {
        if e & 1 == 1 {
            acc = slow_mul(p, m, modulus, acc, base);
        }
        base = slow_mul(p, m, modulus, base, base);
        e >>= 1;
    }
    acc
}

fn is_primitive(p: u32, m: u32, q: u32, modulus: &[u32], g: u32) -> bool {
    if g == 0 {
        return false;
    }
    let n = (q - 1) as u64;
    slow_pow(p, m, modulus, g, n) == 1
        && prime_factors(n)
            .into_iter()
            .all(|r| slow_pow(p, m, modulus, g, n / r) != 1)
}

fn smallest_primitive(p: u32, m: u32, q: u32, modulus: &[u32]) -> u32 {
    (1..q)
        .find(|&g| is_primitive(p, m, q, modulus, g))
        .expect("the multiplicative group of a finite field is cyclic")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    // Order of g computed by repeated multiplication, independent of the log tables.
    fn brute_order(f: &Field, g: Elem) -> u64 {
        let mut x = g;
        let mut n = 1;
        while x != Elem::ONE {
            x = f.mul_by_polynomial(x, g);
            n += 1;
        }
        n
    }

    #[test]
    fn small_prime_fields_pick_smallest_primitive() {
        assert_eq!(Field::new(5, 1).unwrap().gamma().code(), 2);
        assert_eq!(Field::new(7, 1).unwrap().gamma().code(), 3);
        assert_eq!(Field::new(2, 1).unwrap().gamma().code(), 1);
        let f7 = Field::new(7, 1).unwrap();
        assert_eq!(brute_order(&f7, Elem(2)), 3);
        assert_eq!(brute_order(&f7, Elem(3)), 6);
    }

    #[test]
    fn gf4_modulus_and_gamma() {
        let f = Field::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        assert_eq!(f.gamma().code(), 2);
        // x * x = x + 1
        assert_eq!(f.mul(Elem(2), Elem(2)), Elem(3));
    }

    #[test]
    fn gf8_and_gf9_moduli() {
        // Comparing from the constant term up, x^3 + x^2 + 1 = (1,0,1,1) precedes x^3 + x + 1 = (1,1,0,1).
        assert_eq!(Field::new(2, 3).unwrap().modulus(), &[1, 0, 1, 1]);
        // x^2 + 1 is the smallest irreducible monic quadratic over F_3.
        assert_eq!(Field::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn prime_field_products() {
        let f = Field::new(5, 1).unwrap();
        assert_eq!(f.mul(Elem(2), Elem(3)), Elem(1));
        assert_eq!(f.add(Elem(4), Elem(3)), Elem(2));
        assert_eq!(f.sub(Elem(1), Elem(3)), Elem(3));
        assert_eq!(f.neg(Elem(0)), Elem(0));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(Field::new(6, 1).unwrap_err(), GfError::NotPrime(6));
        assert_eq!(Field::new(5, 0).unwrap_err(), GfError::ZeroDegree);
        assert!(matches!(Field::new(2, 21), Err(GfError::TooLarge { .. })));
        assert!(matches!(
            Field::with_guard(2, 6, 32),
            Err(GfError::TooLarge { .. })
        ));
        assert!(Field::with_guard(2, 6, 64).is_ok());
        let f = Field::new(3, 1).unwrap();
        assert_eq!(f.inv(Elem::ZERO), Err(GfError::ZeroInverse));
        assert!(f.elem(3).is_err());
    }

    #[test]
    fn elements_listed_in_code_order() {
        let f = Field::new(3, 1).unwrap();
        assert_eq!(
            f.elements().map(Elem::code).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
        let f = Field::new(2, 2).unwrap();
        assert_eq!(
            f.elements().map(Elem::code).collect::<Vec<_>>(),
            vec![0, 1, 2, 3]
        );
        assert_eq!(Field::new(5, 2).unwrap().elements().count(), 25);
    }

    #[test]
    fn axioms_hold_exhaustively_for_small_fields() {
        for (p, m) in [
            (2, 1),
            (3, 1),
            (5, 1),
            (7, 1),
            (2, 2),
            (2, 3),
            (3, 2),
            (2, 4),
            (5, 2),
            (2, 6),
            (7, 2),
        ] {
            let f = Field::new(p, m).unwrap();
            let els: Vec<Elem> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), Elem::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Elem::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul_by_polynomial(a, b));
                    if f.q() <= 64 {
                        for &c in &els {
                            let lhs = f.mul(a, f.add(b, c));
                            let rhs = f.add(f.mul(a, b), f.mul(a, c));
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn gamma_generates_the_multiplicative_group() {
        for (p, m) in [
            (2, 1),
            (3, 1),
            (5, 1),
            (7, 1),
            (11, 1),
            (13, 1),
            (23, 1),
            (2, 2),
            (2, 3),
            (3, 2),
            (3, 3),
            (5, 2),
        ] {
            let f = Field::new(p, m).unwrap();
            let powers: HashSet<Elem> = (0..f.q() - 1)
                .map(|i| f.pow_by_squaring(f.gamma(), i as u64))
                .collect();
            assert_eq!(powers.len() as u32, f.q() - 1);
            assert_eq!(f.pow(f.gamma(), (f.q() - 1) as u64), Elem::ONE);
            assert_eq!(f.order(f.gamma()).unwrap(), (f.q() - 1) as u64);
            // no smaller code is primitive
            for c in 1..f.gamma().code() {
                assert!(brute_order(&f, Elem(c)) < (f.q() - 1) as u64);
            }
        }
    }

    #[test]
    fn pow_matches_square_and_multiply() {
        let f = Field::new(3, 3).unwrap();
        for a in f.elements() {
            for e in [0u64, 1, 2, 5, 26, 27, 100] {
                assert_eq!(f.pow(a, e), f.pow_by_squaring(a, e));
            }
        }
    }

    #[test]
    fn construction_is_deterministic_and_round_trips() {
        let a = Field::new(3, 3).unwrap();
        let b = Field::new(3, 3).unwrap();
        assert_eq!(a.spec(), b.spec());
        // x^3 + 2x^2 + 1 is the first irreducible cubic in low-degree-first order over F_3.
        assert_eq!(a.modulus(), &[1, 0, 2, 1]);
        let json = serde_json::to_string(&a).unwrap();
        assert!(json.starts_with(r#"{"p":3,"m":3,"modulus":[1,0,2,1],"gamma":"#));
        let back: Field = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn spec_validation_catches_bad_inputs() {
        let reducible = FieldSpec {
            p: 2,
            m: 2,
            modulus: vec![1, 0, 1],
            gamma: 2,
        };
        assert_eq!(
            Field::from_spec(&reducible).unwrap_err(),
            GfError::Reducible(2)
        );
        let not_primitive = FieldSpec {
            p: 7,
            m: 1,
            modulus: vec![0, 1],
            gamma: 2,
        };
        assert_eq!(
            Field::from_spec(&not_primitive).unwrap_err(),
            GfError::NotPrimitive(2)
        );
        let other_gamma = FieldSpec {
            p: 7,
            m: 1,
            modulus: vec![0, 1],
            gamma: 5,
        };
        let f = Field::from_spec(&other_gamma).unwrap();
        assert_eq!(f.gamma().code(), 5);
        assert_ne!(f, Field::new(7, 1).unwrap());
    }
}
