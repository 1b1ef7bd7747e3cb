//! Exact arithmetic of rational numbers and their normalized absolute
//! values at all places of Q.
//!
//! Everything in this module is exact: the product formula is an identity
//! of rationals, not a float that happens to be close to one. Finite
//! places carry verified primes, and absolute values at finite places are
//! integer powers of p.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlaceError {
    #[error("valuation of zero undefined")]
    ZeroValuation,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("absolute value of zero undefined")]
    ZeroInput,
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("prime set S must be nonempty")]
    EmptySupportSet,
    #[error("window radius must be positive")]
    NonPositiveRadius,
    #[error("cannot parse {0:?} as a rational")]
    Parse(String),
    #[error("factorization of {0} exceeds the supported range")]
    FactorRange(BigInt),
}

/// Exact arbitrary-precision fraction, the scalar of all number-theoretic
/// computation in this crate.
///
/// Invariants: numerator and denominator are coprime, the denominator is
/// positive, and zero is stored as 0/1. All of this is maintained by the
/// backing [`BigRational`].
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Result<Self, PlaceError> {
        if denom == 0 {
            return Err(PlaceError::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(numer.into(), denom.into())))
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Result<Self, PlaceError> {
        if denom.is_zero() {
            return Err(PlaceError::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self, PlaceError> {
        if self.is_zero() {
            return Err(PlaceError::ZeroDenominator);
        }
        Ok(Rational(self.0.recip()))
    }

    /// p^e as an exact rational, for any sign of e.
    pub fn prime_power(p: u64, e: i64) -> Self {
        let base = BigInt::from(p);
        if e >= 0 {
            Rational(BigRational::from_integer(base.pow(e as u32)))
        } else {
            Rational(BigRational::new(BigInt::one(), base.pow((-e) as u32)))
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // out-of-range ratio; fall back to separate conversions
            let n = self.0.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.0.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FromStr for Rational {
    type Err = PlaceError;

    /// Accepts `"a"` and `"a/b"` with optional leading sign.
    fn from_str(s: &str) -> Result<Self, PlaceError> {
        let bad = || PlaceError::Parse(s.to_string());
        match s.split_once('/') {
            None => {
                let n = BigInt::from_str(s.trim()).map_err(|_| bad())?;
                Ok(Rational(BigRational::from_integer(n)))
            }
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(PlaceError::ZeroDenominator);
                }
                Ok(Rational(BigRational::new(n, d)))
            }
        }
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
    };
}

rational_binop!(Add, add);
rational_binop!(Sub, sub);
rational_binop!(Mul, mul);
rational_binop!(Div, div);

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0.clone())
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

/// A place of Q: finite (a verified prime) or the single infinite place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Finite(u64),
    Infinite,
}

impl Place {
    pub fn finite(p: u64) -> Result<Self, PlaceError> {
        if is_prime(p) {
            Ok(Place::Finite(p))
        } else {
            Err(PlaceError::NotPrime(p))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{}", p),
            Place::Infinite => write!(f, "inf"),
        }
    }
}

/// A normalized absolute value |q|_s, kept exact. At a finite place this
/// is an integer power of p; at the infinite place it is |q| itself,
/// which for rational q is again rational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbsValue {
    pub place_desc: String,
    pub value: Rational,
}

impl AbsValue {
    pub fn approx(&self) -> f64 {
        self.value.to_f64()
    }
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut base: u64, mut exp: u64| {
        let mut acc = 1u64;
        base %= n;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            exp >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Multiplicity of the prime p in a nonzero integer.
fn multiplicity(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut v = 0i64;
    let mut cur = n.abs();
    loop {
        let (q, r) = cur.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        cur = q;
    }
}

/// The p-adic valuation v with q = p^v * (unit at p).
pub fn valuation(q: &Rational, p: u64) -> Result<i64, PlaceError> {
    if q.is_zero() {
        return Err(PlaceError::ZeroValuation);
    }
    if !is_prime(p) {
        return Err(PlaceError::NotPrime(p));
    }
    Ok(multiplicity(q.numer(), p) - multiplicity(q.denom(), p))
}

/// Normalized absolute value |q|_s: p^(-v_p(q)) at a finite place,
/// ordinary |q| at the infinite place. Exact in both cases.
pub fn normalized_abs(q: &Rational, place: Place) -> Result<AbsValue, PlaceError> {
    if q.is_zero() {
        return Err(PlaceError::ZeroInput);
    }
    let value = match place {
        Place::Finite(p) => {
            let v = valuation(q, p)?;
            Rational::prime_power(p, -v)
        }
        Place::Infinite => q.abs(),
    };
    Ok(AbsValue {
        place_desc: place.to_string(),
        value,
    })
}

/// Distinct prime factors of a nonzero integer, with multiplicities.
///
/// Trial division below 10^6 plus a Miller-Rabin check on the cofactor;
/// this fully factors anything whose square-free part fits the 10^12
/// scale this crate works at, and reports an error beyond that.
pub fn prime_support(n: &BigInt) -> Result<Vec<(u64, u32)>, PlaceError> {
    if n.is_zero() {
        return Err(PlaceError::ZeroValuation);
    }
    let mut out = Vec::new();
    let mut rest = match n.abs().to_u64() {
        Some(v) => v,
        None => return Err(PlaceError::FactorRange(n.clone())),
    };
    let mut push = |p: u64, rest: &mut u64| {
        let mut e = 0u32;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut rest);
    push(3, &mut rest);
    let mut p = 5u64;
    while p <= 1_000_000 && p * p <= rest {
        // once the cofactor is prime there is nothing left to divide
        if is_prime(rest) {
            break;
        }
        while p <= 1_000_000 && p * p <= rest {
            let before = rest;
            push(p, &mut rest);
            push(p + 2, &mut rest);
            p += 6;
            if rest != before {
                break;
            }
        }
    }
    if rest > 1 {
        if is_prime(rest) {
            out.push((rest, 1));
        } else {
            return Err(PlaceError::FactorRange(n.clone()));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// The places where |q|_s can differ from 1: the primes dividing the
/// numerator or denominator, plus the infinite place.
pub fn support(q: &Rational) -> Result<Vec<Place>, PlaceError> {
    if q.is_zero() {
        return Err(PlaceError::ZeroInput);
    }
    let mut primes: Vec<u64> = prime_support(q.numer())
        .and_then(|mut num_p| {
            let den_p = prime_support(q.denom())?;
            num_p.extend(den_p);
            Ok(num_p)
        })?
        .into_iter()
        .map(|(p, _)| p)
        .collect();
    primes.sort_unstable();
    primes.dedup();
    let mut places: Vec<Place> = primes.into_iter().map(Place::Finite).collect();
    places.push(Place::Infinite);
    Ok(places)
}

/// The product of |q|_s over the support of q, computed exactly.
/// For every nonzero rational this equals 1.
pub fn product_formula(q: &Rational) -> Result<Rational, PlaceError> {
    if q.is_zero() {
        return Err(PlaceError::ZeroInput);
    }
    let mut acc = Rational::one();
    for place in support(q)? {
        acc = &acc * &normalized_abs(q, place)?.value;
    }
    Ok(acc)
}

/// S-integer window membership: |q|_p <= 1 at every finite prime p
/// outside S, and |q|_inf <= c. Total on rationals (zero passes).
pub fn s_integer_window_test(
    q: &Rational,
    s: &[u64],
    c: &Rational,
) -> Result<bool, PlaceError> {
    if s.is_empty() {
        return Err(PlaceError::EmptySupportSet);
    }
    for &p in s {
        if !is_prime(p) {
            return Err(PlaceError::NotPrime(p));
        }
    }
    if c.is_zero() || c.is_negative() {
        return Err(PlaceError::NonPositiveRadius);
    }
    if q.is_zero() {
        return Ok(true);
    }
    // |q|_p <= 1 for all p outside S iff every prime of the denominator is in S
    for (p, _) in prime_support(q.denom())? {
        if !s.contains(&p) {
            return Ok(false);
        }
    }
    Ok(q.abs().cmp(c) != Ordering::Greater)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn valuation_reads_off_prime_content() {
        assert_eq!(valuation(&q("3/2"), 2).unwrap(), -1);
        assert_eq!(valuation(&q("2000"), 5).unwrap(), 3);
        assert_eq!(valuation(&q("1"), 7).unwrap(), 0);
    }

    #[test]
    fn valuation_rejects_zero_and_composites() {
        assert_eq!(
            valuation(&Rational::zero(), 3),
            Err(PlaceError::ZeroValuation)
        );
        assert_eq!(valuation(&q("5"), 6), Err(PlaceError::NotPrime(6)));
        assert_eq!(valuation(&q("5"), 1), Err(PlaceError::NotPrime(1)));
    }

    #[test]
    fn normalized_abs_examples() {
        let two = Place::finite(2).unwrap();
        assert_eq!(normalized_abs(&q("3/2"), two).unwrap().value, q("2"));
        assert_eq!(
            normalized_abs(&q("3/2"), Place::Infinite).unwrap().value,
            q("3/2")
        );
        assert_eq!(normalized_abs(&q("1"), two).unwrap().value, q("1"));
        assert_eq!(
            normalized_abs(&q("1"), Place::Infinite).unwrap().value,
            q("1")
        );
        assert_eq!(
            normalized_abs(&Rational::zero(), two),
            Err(PlaceError::ZeroInput)
        );
    }

    #[test]
    fn product_formula_examples() {
        assert_eq!(product_formula(&q("3/2")).unwrap(), Rational::one());
        assert_eq!(product_formula(&q("-1")).unwrap(), Rational::one());
        // 2250 = 2 * 3^2 * 5^3, 77 = 7 * 11
        assert_eq!(product_formula(&q("2250/77")).unwrap(), Rational::one());
        assert!(product_formula(&Rational::zero()).is_err());
    }

    #[test]
    fn product_formula_fuzz_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let n: i64 = rng.gen_range(-1_000_000_000_000i64..=1_000_000_000_000);
            let d: i64 = rng.gen_range(1..=1_000_000_000_000i64);
            if n == 0 {
                continue;
            }
            let x = Rational::new(n, d).unwrap();
            assert_eq!(product_formula(&x).unwrap(), Rational::one(), "x = {x}");
        }
    }

    #[test]
    fn abs_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let places = [Place::Finite(2), Place::Finite(13), Place::Infinite];
        for _ in 0..300 {
            let a = Rational::new(rng.gen_range(-5000i64..5000), rng.gen_range(1..5000)).unwrap();
            let b = Rational::new(rng.gen_range(-5000i64..5000), rng.gen_range(1..5000)).unwrap();
            if a.is_zero() || b.is_zero() {
                continue;
            }
            let ab = &a * &b;
            for place in places {
                let lhs = normalized_abs(&ab, place).unwrap().value;
                let rhs = &normalized_abs(&a, place).unwrap().value
                    * &normalized_abs(&b, place).unwrap().value;
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn ultrametric_inequality_with_equality_case() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let p = 5u64;
        for _ in 0..500 {
            let a = Rational::new(rng.gen_range(-2000i64..2000), rng.gen_range(1..2000)).unwrap();
            let b = Rational::new(rng.gen_range(-2000i64..2000), rng.gen_range(1..2000)).unwrap();
            let sum = &a + &b;
            if a.is_zero() || b.is_zero() || sum.is_zero() {
                continue;
            }
            let na = normalized_abs(&a, Place::Finite(p)).unwrap().value;
            let nb = normalized_abs(&b, Place::Finite(p)).unwrap().value;
            let ns = normalized_abs(&sum, Place::Finite(p)).unwrap().value;
            let max = na.clone().max(nb.clone());
            assert!(ns <= max);
            if na != nb {
                assert_eq!(ns, max);
            }
        }
    }

    #[test]
    fn window_examples() {
        let one = Rational::one();
        assert!(s_integer_window_test(&q("1/5"), &[5], &one).unwrap());
        assert!(!s_integer_window_test(&q("1/3"), &[5], &one).unwrap());
        assert!(s_integer_window_test(&q("7/25"), &[5], &one).unwrap());
        assert_eq!(
            s_integer_window_test(&q("1"), &[], &one),
            Err(PlaceError::EmptySupportSet)
        );
        assert_eq!(
            s_integer_window_test(&q("1"), &[5], &Rational::zero()),
            Err(PlaceError::NonPositiveRadius)
        );
    }

    #[test]
    fn window_is_symmetric_and_unital() {
        let c = Rational::one();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let x = Rational::new(rng.gen_range(-500i64..500), rng.gen_range(1..500)).unwrap();
            let pos = s_integer_window_test(&x, &[3, 7], &c).unwrap();
            let neg = s_integer_window_test(&(-&x), &[3, 7], &c).unwrap();
            assert_eq!(pos, neg);
        }
        assert!(s_integer_window_test(&Rational::zero(), &[3], &c).unwrap());
        assert!(s_integer_window_test(&Rational::one(), &[3], &c).unwrap());
    }

    #[test]
    fn prime_support_handles_large_prime_cofactors() {
        // 999999999989 is prime
        let n = BigInt::from(999_999_999_989u64) * 4;
        let f = prime_support(&n).unwrap();
        assert_eq!(f, vec![(2, 2), (999_999_999_989, 1)]);
    }

    #[test]
    fn rational_display_and_parse_round_trip() {
        for s in ["3/2", "-7", "0", "22/7", "-5/9"] {
            assert_eq!(q(s).to_string(), s);
        }
        assert_eq!(q("4/6"), q("2/3"));
        assert_eq!(q("-4/-6"), q("2/3"));
    }
}
