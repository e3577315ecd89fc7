//! Scalar algebra backing every tensor entry, encoding coefficient and
//! interpolation weight.
//!
//! Three backends share the [`Field`] trait: IEEE doubles ([`RealField`]),
//! complex doubles ([`ComplexField`]) and residues modulo a 64-bit prime
//! ([`PrimeField`]). Only the prime field is exact; it is the backend used for
//! decode verification. The default modulus is the Mersenne prime 2^61 - 1,
//! which gets a shift-and-add reduction path.
//!
//! The real backend evaluates on Chebyshev nodes and loses accuracy quickly
//! once the interpolation degree passes ~20.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// 2^61 - 1.
pub const MERSENNE_61: u64 = (1u64 << 61) - 1;

/// Runtime selection of a scalar backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldKind {
    Real64,
    Complex128,
    Prime(u64),
}

impl FieldKind {
    pub fn is_exact(&self) -> bool {
        matches!(self, FieldKind::Prime(_))
    }
}

impl Default for FieldKind {
    fn default() -> Self {
        FieldKind::Prime(MERSENNE_61)
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Real64 => write!(f, "f64"),
            FieldKind::Complex128 => write!(f, "c128"),
            FieldKind::Prime(p) => write!(f, "gf:{p}"),
        }
    }
}

impl FromStr for FieldKind {
    type Err = Error;

    /// Parses `f64`, `c128`, `gf` or `gf:<modulus>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "f64" => Ok(FieldKind::Real64),
            "c128" => Ok(FieldKind::Complex128),
            "gf" => Ok(FieldKind::Prime(MERSENNE_61)),
            other => {
                let modulus = other
                    .strip_prefix("gf:")
                    .and_then(|m| m.trim().parse::<u64>().ok())
                    .ok_or_else(|| Error::InvalidField(other.to_string()))?;
                if !is_prime(modulus) {
                    return Err(Error::NotPrime(modulus));
                }
                Ok(FieldKind::Prime(modulus))
            }
        }
    }
}

/// Field operations over a copyable element type.
///
/// A `Field` value is a small context (the prime backend carries its modulus);
/// elements never carry their field.
pub trait Field: Copy + Send + Sync + fmt::Debug + PartialEq + 'static {
    type Elem: Copy + Send + Sync + fmt::Debug + PartialEq + 'static;

    fn kind(&self) -> FieldKind;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: Self::Elem) -> bool;

    /// Multiplicative inverse; zero is rejected.
    fn inv(&self, a: Self::Elem) -> Result<Self::Elem>;

    /// Embeds a small non-negative integer.
    fn from_u64(&self, v: u64) -> Self::Elem;

    /// Embeds a signed integer.
    fn from_i64(&self, v: i64) -> Self::Elem {
        if v >= 0 {
            self.from_u64(v as u64)
        } else {
            self.neg(self.from_u64(v.unsigned_abs()))
        }
    }

    /// `count` pairwise-distinct evaluation points.
    fn evaluation_points(&self, count: usize) -> Result<Vec<Self::Elem>>;

    /// Rejects point sets this backend cannot interpolate on reliably.
    fn check_interpolation_points(&self, _points: &[Self::Elem]) -> Result<()> {
        Ok(())
    }

    /// Distance used for oracle comparison. The prime field uses the discrete
    /// metric (0 when equal, 1 otherwise).
    fn distance(&self, a: Self::Elem, b: Self::Elem) -> f64;

    fn magnitude(&self, a: Self::Elem) -> f64 {
        self.distance(a, self.zero())
    }

    /// Uniform integer in `[lo, hi]` mapped into the field (complex: both parts).
    fn sample_int<R: Rng + ?Sized>(&self, rng: &mut R, lo: i64, hi: i64) -> Self::Elem;

    fn elem_to_json(&self, a: Self::Elem) -> Value;
    fn elem_from_json(&self, v: &Value) -> Result<Self::Elem>;

    fn is_exact(&self) -> bool {
        self.kind().is_exact()
    }

    fn pow(&self, base: Self::Elem, mut exp: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut b = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    fn div(&self, a: Self::Elem, b: Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }
}

/// Real doubles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RealField;

/// Complex doubles. Evaluation points are roots of unity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ComplexField;

/// Integers modulo a prime `p < 2^64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    modulus: u64,
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField {
            modulus: MERSENNE_61,
        }
    }
}

impl PrimeField {
    pub fn new(modulus: u64) -> Result<Self> {
        if !is_prime(modulus) {
            return Err(Error::NotPrime(modulus));
        }
        Ok(PrimeField { modulus })
    }

    pub fn mersenne61() -> Self {
        Self::default()
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Reduces an arbitrary integer into `[0, p)`.
    pub fn reduce(&self, v: u64) -> u64 {
        v % self.modulus
    }
}

fn json_number(v: &Value) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::SpecFile(format!("expected a number, found {v}")))
}

impl Field for RealField {
    type Elem = f64;

    fn kind(&self) -> FieldKind {
        FieldKind::Real64
    }
    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    #[inline]
    fn add(&self, a: f64, b: f64) -> f64 {
        a + b
    }
    #[inline]
    fn sub(&self, a: f64, b: f64) -> f64 {
        a - b
    }
    #[inline]
    fn mul(&self, a: f64, b: f64) -> f64 {
        a * b
    }
    fn neg(&self, a: f64) -> f64 {
        -a
    }
    fn is_zero(&self, a: f64) -> bool {
        a == 0.0
    }
    fn inv(&self, a: f64) -> Result<f64> {
        if a == 0.0 {
            return Err(Error::DivisionByZero);
        }
        Ok(1.0 / a)
    }
    fn from_u64(&self, v: u64) -> f64 {
        v as f64
    }

    /// Chebyshev nodes of the first kind. For odd counts the node at zero is
    /// replaced by taking `count + 1` nodes and dropping the middle one.
    fn evaluation_points(&self, count: usize) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(Error::NoPoints);
        }
        let n = if count % 2 == 1 { count + 1 } else { count };
        let nodes = (0..n).map(|k| ((2 * k + 1) as f64 * PI / (2 * n) as f64).cos());
        if n == count {
            Ok(nodes.collect())
        } else {
            let mid = n / 2;
            Ok(nodes
                .enumerate()
                .filter(|(k, _)| *k != mid)
                .map(|(_, x)| x)
                .collect())
        }
    }

    fn distance(&self, a: f64, b: f64) -> f64 {
        (a - b).abs()
    }
    fn sample_int<R: Rng + ?Sized>(&self, rng: &mut R, lo: i64, hi: i64) -> f64 {
        rng.gen_range(lo..=hi) as f64
    }
    fn elem_to_json(&self, a: f64) -> Value {
        serde_json::Number::from_f64(a)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
    fn elem_from_json(&self, v: &Value) -> Result<f64> {
        json_number(v)
    }
}

impl Field for ComplexField {
    type Elem = Complex64;

    fn kind(&self) -> FieldKind {
        FieldKind::Complex128
    }
    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn one(&self) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }
    #[inline]
    fn add(&self, a: Complex64, b: Complex64) -> Complex64 {
        a + b
    }
    #[inline]
    fn sub(&self, a: Complex64, b: Complex64) -> Complex64 {
        a - b
    }
    #[inline]
    fn mul(&self, a: Complex64, b: Complex64) -> Complex64 {
        a * b
    }
    fn neg(&self, a: Complex64) -> Complex64 {
        -a
    }
    fn is_zero(&self, a: Complex64) -> bool {
        a.re == 0.0 && a.im == 0.0
    }
    fn inv(&self, a: Complex64) -> Result<Complex64> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(a.inv())
    }
    fn from_u64(&self, v: u64) -> Complex64 {
        Complex64::new(v as f64, 0.0)
    }

    /// The `count`-th roots of unity, `exp(2 pi i k / count)`.
    fn evaluation_points(&self, count: usize) -> Result<Vec<Complex64>> {
        if count == 0 {
            return Err(Error::NoPoints);
        }
        Ok((0..count)
            .map(|k| {
                // Exact values on the axes keep small cases free of rounding.
                let (num, den) = (4 * k, count);
                if num % den == 0 {
                    match (num / den) % 4 {
                        0 => Complex64::new(1.0, 0.0),
                        1 => Complex64::new(0.0, 1.0),
                        2 => Complex64::new(-1.0, 0.0),
                        _ => Complex64::new(0.0, -1.0),
                    }
                } else {
                    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / count as f64)
                }
            })
            .collect())
    }

    fn check_interpolation_points(&self, points: &[Complex64]) -> Result<()> {
        match points.iter().position(|p| (p.norm() - 1.0).abs() > 1e-12) {
            Some(i) => Err(Error::PointFamily(format!(
                "complex decoding expects roots of unity; point {i} = {} has modulus {}",
                points[i],
                points[i].norm()
            ))),
            None => Ok(()),
        }
    }

    fn distance(&self, a: Complex64, b: Complex64) -> f64 {
        (a - b).norm()
    }
    fn sample_int<R: Rng + ?Sized>(&self, rng: &mut R, lo: i64, hi: i64) -> Complex64 {
        let re = rng.gen_range(lo..=hi) as f64;
        let im = rng.gen_range(lo..=hi) as f64;
        Complex64::new(re, im)
    }
    fn elem_to_json(&self, a: Complex64) -> Value {
        if a.im == 0.0 {
            RealField.elem_to_json(a.re)
        } else {
            Value::Array(vec![RealField.elem_to_json(a.re), RealField.elem_to_json(a.im)])
        }
    }
    fn elem_from_json(&self, v: &Value) -> Result<Complex64> {
        match v {
            Value::Array(parts) if parts.len() == 2 => {
                Ok(Complex64::new(json_number(&parts[0])?, json_number(&parts[1])?))
            }
            other => Ok(Complex64::new(json_number(other)?, 0.0)),
        }
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn kind(&self) -> FieldKind {
        FieldKind::Prime(self.modulus)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.modulus
    }
    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let (s, carry) = a.overflowing_add(b);
        if carry || s >= self.modulus {
            s.wrapping_sub(self.modulus)
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a.wrapping_sub(b).wrapping_add(self.modulus)
        }
    }
    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        let wide = a as u128 * b as u128;
        if self.modulus == MERSENNE_61 {
            // 2^61 = 1 (mod p)
            let lo = (wide as u64) & MERSENNE_61;
            let hi = (wide >> 61) as u64;
            let s = lo + hi;
            let s = (s & MERSENNE_61) + (s >> 61);
            if s >= MERSENNE_61 {
                s - MERSENNE_61
            } else {
                s
            }
        } else {
            (wide % self.modulus as u128) as u64
        }
    }
    fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }
    fn is_zero(&self, a: u64) -> bool {
        a == 0
    }
    fn inv(&self, a: u64) -> Result<u64> {
        if a.is_multiple_of(self.modulus) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.modulus - 2))
    }
    fn from_u64(&self, v: u64) -> u64 {
        v % self.modulus
    }

    /// Residues `1, 2, ..., count`.
    fn evaluation_points(&self, count: usize) -> Result<Vec<u64>> {
        if count == 0 {
            return Err(Error::NoPoints);
        }
        if count as u64 >= self.modulus {
            return Err(Error::TooManyPoints {
                requested: count as u64,
                modulus: self.modulus,
            });
        }
        Ok((1..=count as u64).collect())
    }

    fn distance(&self, a: u64, b: u64) -> f64 {
        if a == b {
            0.0
        } else {
            1.0
        }
    }
    fn sample_int<R: Rng + ?Sized>(&self, rng: &mut R, lo: i64, hi: i64) -> u64 {
        self.from_i64(rng.gen_range(lo..=hi))
    }
    fn elem_to_json(&self, a: u64) -> Value {
        Value::from(a)
    }
    fn elem_from_json(&self, v: &Value) -> Result<u64> {
        if let Some(u) = v.as_u64() {
            Ok(self.from_u64(u))
        } else if let Some(i) = v.as_i64() {
            Ok(self.from_i64(i))
        } else {
            Err(Error::SpecFile(format!(
                "prime-field entries must be integers, found {v}"
            )))
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
