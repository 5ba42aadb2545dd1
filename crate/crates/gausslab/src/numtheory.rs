//! Exact integer arithmetic: gcd, modular inverses, totients, divisor
//! counts, primality, Jacobi symbols and the ±1/±i sign factors that appear
//! in closed-form Gauss sum evaluations.
//!
//! Everything here is a pure function of 64-bit integers; products are
//! widened to 128 bits before reduction, so no operation overflows for the
//! moduli this crate targets (q up to ~10^7).

use crate::{Complex, Error, Result};

/// gcd(|a|, |b|); gcd(0, 0) = 0.
pub fn gcd(a: i64, b: i64) -> u64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extended gcd on nonnegative inputs: returns (g, x, y) with a*x + b*y = g.
fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if a == 0 {
        return (b, 0, 1);
    }
    let (g, x, y) = extended_gcd(b.rem_euclid(a), a);
    (g, y - (b / a) * x, x)
}

/// Inverse of `a` modulo `m`, in [0, m).
pub fn mod_inverse(a: i64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::ZeroDenominator);
    }
    if m == 1 {
        return Ok(0);
    }
    let a_red = a.rem_euclid(m as i64);
    let (g, x, _) = extended_gcd(a_red, m as i64);
    if g != 1 {
        return Err(Error::NotInvertible { a, m });
    }
    Ok(x.rem_euclid(m as i64) as u64)
}

/// Euler totient by trial-division factorisation.
pub fn totient(q: u64) -> u64 {
    assert!(q >= 1, "totient is defined for q >= 1");
    let mut n = q;
    let mut phi = q;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            phi -= phi / p;
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

/// Number of positive divisors tau(q).
pub fn divisor_count(q: u64) -> u64 {
    assert!(q >= 1, "divisor_count is defined for q >= 1");
    let mut n = q;
    let mut tau = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0u64;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            tau *= e + 1;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        tau *= 2;
    }
    tau
}

/// Deterministic Miller-Rabin for the full 64-bit range.
pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if q == p {
            return true;
        }
        if q % p == 0 {
            return false;
        }
    }
    let mut d = q - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // This witness set is deterministic for all q < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, q);
        if x == 1 || x == q - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, q);
            if x == q - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// One of {+1, -1, +i, -i, 0}: the value group of Jacobi symbols and
/// epsilon factors, closed under multiplication with 0 absorbing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignFactor {
    Zero,
    One,
    I,
    MinusOne,
    MinusI,
}

impl SignFactor {
    /// i^k for k taken mod 4.
    pub fn from_power_of_i(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => SignFactor::One,
            1 => SignFactor::I,
            2 => SignFactor::MinusOne,
            _ => SignFactor::MinusI,
        }
    }

    /// Exponent k with self = i^k, or None for Zero.
    pub fn power_of_i(self) -> Option<u32> {
        match self {
            SignFactor::Zero => None,
            SignFactor::One => Some(0),
            SignFactor::I => Some(1),
            SignFactor::MinusOne => Some(2),
            SignFactor::MinusI => Some(3),
        }
    }

    pub fn from_sign(s: i32) -> Self {
        match s.signum() {
            1 => SignFactor::One,
            -1 => SignFactor::MinusOne,
            _ => SignFactor::Zero,
        }
    }

    pub fn conj(self) -> Self {
        match self.power_of_i() {
            None => SignFactor::Zero,
            Some(k) => SignFactor::from_power_of_i(-(k as i64)),
        }
    }

    /// Multiplicative inverse; for the unimodular values this is the
    /// complex conjugate. Zero has no inverse and maps to Zero.
    pub fn inverse(self) -> Self {
        self.conj()
    }

    pub fn as_complex(self) -> Complex {
        match self {
            SignFactor::Zero => Complex::new(0.0, 0.0),
            SignFactor::One => Complex::new(1.0, 0.0),
            SignFactor::I => Complex::new(0.0, 1.0),
            SignFactor::MinusOne => Complex::new(-1.0, 0.0),
            SignFactor::MinusI => Complex::new(0.0, -1.0),
        }
    }

    /// Real value for the ±1 cases; panics on imaginary values.
    pub fn as_real(self) -> f64 {
        match self {
            SignFactor::Zero => 0.0,
            SignFactor::One => 1.0,
            SignFactor::MinusOne => -1.0,
            _ => panic!("sign factor {self} is not real"),
        }
    }
}

impl std::ops::Mul for SignFactor {
    type Output = SignFactor;

    fn mul(self, rhs: SignFactor) -> SignFactor {
        match (self.power_of_i(), rhs.power_of_i()) {
            (Some(a), Some(b)) => SignFactor::from_power_of_i(a as i64 + b as i64),
            _ => SignFactor::Zero,
        }
    }
}

impl std::fmt::Display for SignFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SignFactor::Zero => "0",
            SignFactor::One => "+1",
            SignFactor::I => "+i",
            SignFactor::MinusOne => "-1",
            SignFactor::MinusI => "-i",
        };
        f.write_str(s)
    }
}

/// Generalized quadratic residue (Jacobi) symbol (a/b) for odd b, possibly
/// negative, with (a/-1) = sgn a and (0/±1) = 1.
pub fn jacobi_symbol(a: i64, b: i64) -> Result<SignFactor> {
    if b % 2 == 0 {
        return Err(Error::EvenDenominator(b));
    }
    let mut acc = 1i32;
    let mut den = b;
    if den < 0 {
        den = -den;
        if a < 0 {
            acc = -acc; // (a/-1) = sgn a; (0/-1) = 1 is covered below
        }
    }
    if den == 1 {
        return Ok(SignFactor::from_sign(acc));
    }
    let mut num = a.rem_euclid(den) as u64;
    let mut den = den as u64;
    loop {
        num %= den;
        if num == 0 {
            return Ok(if den == 1 {
                SignFactor::from_sign(acc)
            } else {
                SignFactor::Zero
            });
        }
        while num % 2 == 0 {
            num /= 2;
            if den % 8 == 3 || den % 8 == 5 {
                acc = -acc;
            }
        }
        if num == 1 {
            return Ok(SignFactor::from_sign(acc));
        }
        // quadratic reciprocity for odd coprime num, den
        if num % 4 == 3 && den % 4 == 3 {
            acc = -acc;
        }
        std::mem::swap(&mut num, &mut den);
    }
}

/// epsilon_a = 1 for a ≡ 1 mod 4 and i for a ≡ 3 mod 4.
pub fn epsilon(a: i64) -> Result<SignFactor> {
    match a.rem_euclid(4) {
        1 => Ok(SignFactor::One),
        3 => Ok(SignFactor::I),
        _ => Err(Error::EvenArgument(a)),
    }
}

/// Reduced fraction num/den with den >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: u64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd(num, den).max(1);
        Ok(Self {
            num: num / g as i64,
            den: (den / g as i64) as u64,
        })
    }

    pub fn from_integer(n: i64) -> Self {
        Self { num: n, den: 1 }
    }

    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn numerator(&self) -> i64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    fn cmp_exact(&self, other: &Rational) -> std::cmp::Ordering {
        let lhs = self.num as i128 * other.den as i128;
        let rhs = other.num as i128 * self.den as i128;
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp_exact(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.cmp_exact(other)
    }
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl std::str::FromStr for Rational {
    type Err = Error;

    /// Parses "p/q", integers, and finite decimals ("0.25") exactly.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidConfig(format!("cannot parse rational from {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            return Rational::new(p, q);
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.len() > 17 || frac.chars().any(|c| !c.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.trim_start().starts_with('-');
            let int: i64 = if int.is_empty() || int == "-" {
                0
            } else {
                int.parse().map_err(|_| bad())?
            };
            let scale = 10i64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
            let frac_num: i64 = if frac.is_empty() {
                0
            } else {
                frac.parse().map_err(|_| bad())?
            };
            let signed_frac = if negative { -frac_num } else { frac_num };
            let num = int.checked_mul(scale).and_then(|v| v.checked_add(signed_frac));
            return Rational::new(num.ok_or_else(bad)?, scale);
        }
        let n: i64 = s.parse().map_err(|_| bad())?;
        Ok(Rational::from_integer(n))
    }
}

/// A finite union of half-open intervals [lo, hi) inside the unit torus,
/// with exact rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorusSet {
    intervals: Vec<(Rational, Rational)>,
}

impl TorusSet {
    /// The full torus [0, 1).
    pub fn full() -> Self {
        Self {
            intervals: vec![(Rational::ZERO, Rational::ONE)],
        }
    }

    /// Build from half-open intervals; they are sorted, merged and must lie
    /// inside [0, 1].
    pub fn from_intervals(intervals: Vec<(Rational, Rational)>) -> Result<Self> {
        let mut iv: Vec<_> = intervals
            .into_iter()
            .filter(|(lo, hi)| lo < hi)
            .collect();
        for (lo, hi) in &iv {
            if *lo < Rational::ZERO || *hi > Rational::ONE {
                return Err(Error::InvalidConfig(format!(
                    "interval [{lo}, {hi}) is not inside the unit torus"
                )));
            }
        }
        iv.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(iv.len());
        for (lo, hi) in iv {
            match merged.last_mut() {
                Some((_, last_hi)) if lo <= *last_hi => {
                    if hi > *last_hi {
                        *last_hi = hi;
                    }
                }
                _ => merged.push((lo, hi)),
            }
        }
        if merged.is_empty() {
            return Err(Error::InvalidConfig("empty torus subset".into()));
        }
        Ok(Self { intervals: merged })
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    /// Exact membership test for the fraction p/q.
    pub fn contains_fraction(&self, p: u64, q: u64) -> bool {
        debug_assert!(q >= 1);
        let r = Rational::new(p as i64, q as i64).expect("q >= 1");
        self.intervals
            .iter()
            .any(|(lo, hi)| *lo <= r && r < *hi)
    }

    /// Lebesgue measure of the set.
    pub fn measure(&self) -> f64 {
        self.intervals
            .iter()
            .map(|(lo, hi)| hi.as_f64() - lo.as_f64())
            .sum()
    }
}

impl std::str::FromStr for TorusSet {
    type Err = Error;

    /// Parses "lo:hi[,lo:hi...]" with rational or decimal endpoints,
    /// e.g. "0:1", "0:1/2,3/4:1", "0.25:0.75".
    fn from_str(s: &str) -> Result<Self> {
        let mut intervals = Vec::new();
        for part in s.split(',') {
            let (lo, hi) = part.split_once(':').ok_or_else(|| {
                Error::InvalidConfig(format!("interval {part:?} must look like lo:hi"))
            })?;
            intervals.push((lo.parse()?, hi.parse()?));
        }
        TorusSet::from_intervals(intervals)
    }
}

/// All p in [0, q) with gcd(p, q) = 1 and p/q in D, in increasing order.
///
/// For q = 1 this yields the single residue 0, so the count always equals
/// the totient on the full torus.
pub fn coprime_residues(q: u64, d: &TorusSet) -> Vec<u64> {
    assert!(q >= 1);
    (0..q)
        .filter(|&p| gcd(p as i64, q as i64) == 1 && d.contains_fraction(p, q))
        .collect()
}
