//! Exact sparse Laurent polynomials in the bracket variable `A`, and their
//! image in the Jones variable `t` under `A = t^(-1/4)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("loop-value power must be non-negative, got {0}")]
    NegativeLoopPower(i64),
    #[error("cannot scale by zero")]
    ZeroScale,
}

/// Laurent polynomial in `A` with exact rational coefficients.
///
/// Stored as exponent -> coefficient with no zero coefficients, so two equal
/// polynomials always have identical maps.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigRational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, BigRational::one())
    }

    pub fn monomial(exp: i64, coeff: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentPoly { terms }
    }

    pub fn int_monomial(exp: i64, coeff: i64) -> Self {
        Self::monomial(exp, BigRational::from_integer(coeff.into()))
    }

    /// Builds a polynomial from `(exponent, integer coefficient)` pairs; like
    /// terms are summed.
    pub fn from_int_terms(terms: &[(i64, i64)]) -> Self {
        let mut p = Self::zero();
        for &(e, c) in terms {
            p.add_term(e, BigRational::from_integer(c.into()));
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigRational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> BigRational {
        self.terms.get(&exp).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &BigRational)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn add_term(&mut self, exp: i64, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(BigRational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Divides every coefficient by `divisor`; used to average over projections.
    pub fn divide(&self, divisor: &BigRational) -> Result<Self, PolyError> {
        if divisor.is_zero() {
            return Err(PolyError::ZeroScale);
        }
        Ok(self.scale(&divisor.recip()))
    }

    /// Substitutes `A -> A^-1`.
    pub fn invert_variable(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `A = t^(-1/4)`: the term `c A^e` becomes `c t^(-e/4)`.
    pub fn to_t(&self) -> QuarterPoly {
        QuarterPoly {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Largest absolute coefficient difference against `other`, as `f64`.
    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        let diff = self - other;
        diff.terms
            .values()
            .map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }
}

/// The loop value `d = -A^2 - A^-2`.
pub fn loop_value() -> LaurentPoly {
    LaurentPoly::from_int_terms(&[(2, -1), (-2, -1)])
}

/// `(-A^2 - A^-2)^k`.
pub fn delta_power(k: i64) -> Result<LaurentPoly, PolyError> {
    if k < 0 {
        return Err(PolyError::NegativeLoopPower(k));
    }
    // Binomial expansion: sum_i C(k,i) (-1)^k A^(2k - 4i).
    let mut p = LaurentPoly::zero();
    let mut binom = BigInt::one();
    let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    for i in 0..=k {
        p.add_term(2 * k - 4 * i, BigRational::from_integer(&binom * &sign));
        binom = binom * BigInt::from(k - i) / BigInt::from(i + 1);
    }
    Ok(p)
}

/// `(-A^3)^(-w)`, the monomial `(-1)^w A^(-3w)`.
pub fn writhe_factor(w: i64) -> LaurentPoly {
    let c = if w.rem_euclid(2) == 0 { 1 } else { -1 };
    LaurentPoly::int_monomial(-3 * w, c)
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl std::iter::Sum for LaurentPoly {
    fn sum<I: Iterator<Item = LaurentPoly>>(iter: I) -> Self {
        iter.fold(LaurentPoly::zero(), |acc, p| acc + p)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms.iter().map(|(e, c)| (c, a_power(*e)));
        write_terms(f, terms)
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

fn a_power(e: i64) -> Option<String> {
    match e {
        0 => None,
        1 => Some("A".to_string()),
        _ => Some(format!("A^{e}")),
    }
}

/// Polynomial in `t` whose exponents are multiples of 1/4, stored as the
/// exponent times four.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct QuarterPoly {
    terms: BTreeMap<i64, BigRational>,
}

impl QuarterPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds from `(exponent in quarters, coefficient)` pairs.
    pub fn from_quarter_terms<I: IntoIterator<Item = (i64, BigRational)>>(terms: I) -> Self {
        let mut terms_map: BTreeMap<i64, BigRational> = BTreeMap::new();
        for (q, c) in terms {
            *terms_map.entry(q).or_insert_with(BigRational::zero) += c;
        }
        terms_map.retain(|_, c| !c.is_zero());
        QuarterPoly { terms: terms_map }
    }

    /// Builds from integer `t` exponents with integer coefficients.
    pub fn from_int_terms(terms: &[(i64, i64)]) -> Self {
        Self::from_quarter_terms(
            terms
                .iter()
                .map(|&(e, c)| (4 * e, BigRational::from_integer(c.into()))),
        )
    }

    pub fn coeff_quarters(&self, q: i64) -> BigRational {
        self.terms.get(&q).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Terms as `(exponent in quarters, coefficient)`, ascending.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &BigRational)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every exponent is an integer.
    pub fn has_integer_exponents(&self) -> bool {
        self.terms.keys().all(|q| q % 4 == 0)
    }

    /// Substitutes `t -> t^-1`.
    pub fn invert_variable(&self) -> Self {
        QuarterPoly {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        let mut keys: Vec<i64> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .map(|q| {
                (self.coeff_quarters(q) - other.coeff_quarters(q))
                    .abs()
                    .to_f64()
                    .unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max)
    }
}

impl Mul for &QuarterPoly {
    type Output = QuarterPoly;
    fn mul(self, rhs: &QuarterPoly) -> QuarterPoly {
        QuarterPoly::from_quarter_terms(
            self.terms
                .iter()
                .flat_map(|(e1, c1)| rhs.terms.iter().map(move |(e2, c2)| (e1 + e2, c1 * c2))),
        )
    }
}

impl fmt::Display for QuarterPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms.iter().map(|(q, c)| (c, t_power(*q)));
        write_terms(f, terms)
    }
}

impl fmt::Debug for QuarterPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuarterPoly({self})")
    }
}

fn t_power(q: i64) -> Option<String> {
    if q == 0 {
        return None;
    }
    if q % 4 == 0 {
        let e = q / 4;
        return Some(if e == 1 { "t".to_string() } else { format!("t^{e}") });
    }
    let g = gcd(q.unsigned_abs(), 4) as i64;
    Some(format!("t^({}/{})", q / g, 4 / g))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Shared renderer: ascending exponents, `A^0` as the bare coefficient, unit
/// coefficients elided, `*` between a non-unit coefficient and the variable.
fn write_terms<'a, I>(f: &mut fmt::Formatter<'_>, terms: I) -> fmt::Result
where
    I: Iterator<Item = (&'a BigRational, Option<String>)>,
{
    let mut first = true;
    for (c, var) in terms {
        let negative = c.is_negative();
        let mag = c.abs();
        if first {
            if negative {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if negative { " - " } else { " + " })?;
        }
        first = false;
        match var {
            None => write!(f, "{mag}")?,
            Some(v) if mag.is_one() => f.write_str(&v)?,
            Some(v) => write!(f, "{mag}*{v}")?,
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// Serializable view of a polynomial: its rendered text plus exact terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyRecord {
    pub text: String,
    /// `[exponent, coefficient]` pairs; exponents and coefficients are
    /// rendered as exact fractions.
    pub terms: Vec<(String, String)>,
}

impl From<&LaurentPoly> for PolyRecord {
    fn from(p: &LaurentPoly) -> Self {
        PolyRecord {
            text: p.to_string(),
            terms: p.terms().map(|(e, c)| (e.to_string(), c.to_string())).collect(),
        }
    }
}

impl From<&QuarterPoly> for PolyRecord {
    fn from(p: &QuarterPoly) -> Self {
        PolyRecord {
            text: p.to_string(),
            terms: p
                .terms()
                .map(|(q, c)| (BigRational::new(q.into(), 4.into()).to_string(), c.to_string()))
                .collect(),
        }
    }
}
