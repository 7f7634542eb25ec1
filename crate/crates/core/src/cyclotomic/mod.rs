//! Exact arithmetic in cyclotomic fields.
//!
//! A [`CycNum`] is an element of Q(ζ_n) stored by its coordinates in the power
//! basis `1, ζ, …, ζ^{φ(n)-1}` after reduction modulo the n-th cyclotomic
//! polynomial. Equal values of equal order have identical coordinates, so
//! equality and zero tests are coefficient comparisons.

mod field;
pub(crate) mod ring;

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
pub use field::euler_phi;
pub(crate) use field::{field, Field};

/// An exact element of the cyclotomic field Q(ζ_order).
#[derive(Clone, Debug)]
pub struct CycNum {
    order: u32,
    coeffs: Vec<BigRational>,
}

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl CycNum {
    pub fn zero(order: u32) -> Self {
        let phi = field(order).phi;
        CycNum {
            order,
            coeffs: vec![BigRational::zero(); phi],
        }
    }

    pub fn one(order: u32) -> Self {
        Self::from_rational(order, BigRational::one())
    }

    pub fn from_int(order: u32, v: i64) -> Self {
        Self::from_rational(order, rat(v))
    }

    pub fn from_bigint(order: u32, v: BigInt) -> Self {
        Self::from_rational(order, BigRational::from_integer(v))
    }

    pub fn from_rational(order: u32, v: BigRational) -> Self {
        let mut z = Self::zero(order);
        z.coeffs[0] = v;
        z
    }

    /// Builds a value from power-basis coordinates; the length must be φ(order).
    pub fn from_coeffs(order: u32, coeffs: Vec<BigRational>) -> Result<Self> {
        let phi = field(order).phi;
        if coeffs.len() != phi {
            return Err(Error::InvalidData(format!(
                "Q(zeta_{order}) needs {phi} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(CycNum { order, coeffs })
    }

    /// ζ_order^k for any integer k.
    pub fn root(order: u32, k: i64) -> Self {
        let f = field(order);
        let j = k.rem_euclid(order as i64) as usize;
        CycNum {
            order,
            coeffs: f.powers[j].iter().map(|&c| rat(c)).collect(),
        }
    }

    /// Σ_k mult_k · ζ_order^k from integer multiplicities indexed by exponent.
    pub fn from_exponent_counts(order: u32, counts: &[BigInt]) -> Self {
        let f = field(order);
        let mut acc = vec![BigInt::zero(); f.phi];
        for (k, c) in counts.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (a, &p) in acc.iter_mut().zip(&f.powers[k % order as usize]) {
                if p != 0 {
                    *a += c * p;
                }
            }
        }
        CycNum {
            order,
            coeffs: acc.into_iter().map(BigRational::from_integer).collect(),
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value when the element lies in Q.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// The integer value when the element lies in Z.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.to_rational()
            .filter(|r| r.is_integer())
            .map(|r| r.to_integer())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(Error::OrderMismatch {
                left: self.order,
                right: other.order,
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(CycNum {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(CycNum {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let f = field(self.order);
        let phi = f.phi;
        let mut prod = vec![BigRational::zero(); 2 * phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Ok(CycNum {
            order: self.order,
            coeffs: reduce(&f, prod),
        })
    }

    /// Multiplication by a rational scalar.
    pub fn scale(&self, s: &BigRational) -> Self {
        CycNum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Multiplicative inverse, by solving the power-basis linear system.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.to_rational() {
            return Ok(Self::from_rational(self.order, r.recip()));
        }
        let f = field(self.order);
        let phi = f.phi;
        // column c of the matrix is self * x^c
        let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(phi);
        let mut cur = self.clone();
        let x = Self::root(self.order, 1);
        for _ in 0..phi {
            cols.push(cur.coeffs.clone());
            cur = &cur * &x;
        }
        let mut m: Vec<Vec<BigRational>> = (0..phi)
            .map(|r| {
                let mut row: Vec<BigRational> = (0..phi).map(|c| cols[c][r].clone()).collect();
                row.push(if r == 0 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                });
                row
            })
            .collect();
        for col in 0..phi {
            let piv = (col..phi)
                .find(|&r| !m[r][col].is_zero())
                .ok_or(Error::DivisionByZero)?;
            m.swap(col, piv);
            let p = m[col][col].recip();
            for v in m[col].iter_mut() {
                *v *= &p;
            }
            let pivot_row = m[col].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != col && !row[col].is_zero() {
                    let factor = row[col].clone();
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= &factor * pv;
                    }
                }
            }
        }
        Ok(CycNum {
            order: self.order,
            coeffs: m.into_iter().map(|row| row[phi].clone()).collect(),
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        self.try_mul(&other.inv()?)
    }

    /// Integer power; negative exponents go through the inverse.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.order);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// The Galois automorphism ζ ↦ ζ^k (k coprime to the order).
    pub fn galois(&self, k: i64) -> Result<Self> {
        let n = self.order as i64;
        if n.gcd(&k) != 1 {
            return Err(Error::InvalidData(format!(
                "{k} is not a unit modulo {n}"
            )));
        }
        let f = field(self.order);
        let mut out = vec![BigRational::zero(); f.phi];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = (j as i64 * k).rem_euclid(n) as usize;
            for (o, &p) in out.iter_mut().zip(&f.powers[idx]) {
                if p != 0 {
                    *o += c * rat(p);
                }
            }
        }
        Ok(CycNum {
            order: self.order,
            coeffs: out,
        })
    }

    /// Complex conjugation σ_{-1}.
    pub fn conj(&self) -> Self {
        self.galois(-1).expect("-1 is always a unit")
    }

    /// The same element viewed in Q(ζ_target); requires order | target.
    pub fn embed(&self, target: u32) -> Result<Self> {
        if !target.is_multiple_of(self.order) {
            return Err(Error::OrderMismatch {
                left: self.order,
                right: target,
            });
        }
        if target == self.order {
            return Ok(self.clone());
        }
        let step = (target / self.order) as usize;
        let f = field(target);
        let mut out = vec![BigRational::zero(); f.phi];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(&f.powers[(j * step) % target as usize]) {
                if p != 0 {
                    *o += c * rat(p);
                }
            }
        }
        Ok(CycNum {
            order: target,
            coeffs: out,
        })
    }

    /// Order of the group of roots of unity in Q(ζ_n): n for even n, 2n otherwise.
    pub fn roots_of_unity_count(order: u32) -> u64 {
        if order.is_multiple_of(2) {
            order as u64
        } else {
            2 * order as u64
        }
    }

    /// Minimal m with self^m = 1, or `None` when self is not a root of unity.
    pub fn root_of_unity_order(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let m = Self::roots_of_unity_count(self.order);
        if !self.pow(m as i64).ok()?.is_one() {
            return None;
        }
        divisors(m)
            .into_iter()
            .find(|&d| self.pow(d as i64).map(|v| v.is_one()).unwrap_or(false))
    }

    /// Writes a root of unity as ζ_M^k with M = roots_of_unity_count(order);
    /// returns (M, k) or `None`.
    pub fn root_of_unity_exponent(&self) -> Option<(u64, u64)> {
        let m = Self::roots_of_unity_count(self.order);
        let big = if m == self.order as u64 {
            self.clone()
        } else {
            self.embed(m as u32).ok()?
        };
        (0..m)
            .find(|&k| big == Self::root(m as u32, k as i64))
            .map(|k| (m, k))
    }

    /// Canonical token `n:[c0,c1,...]`.
    pub fn to_token(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(fmt_rational).collect();
        format!("{}:[{}]", self.order, parts.join(","))
    }

    /// Parses a token produced by [`CycNum::to_token`].
    pub fn parse_token(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let (n, rest) = s
            .split_once(':')
            .ok_or_else(|| format!("missing ':' in cyclotomic token {s:?}"))?;
        let order: u32 = n
            .trim()
            .parse()
            .map_err(|_| format!("bad conductor {n:?}"))?;
        if order == 0 {
            return Err("conductor must be positive".into());
        }
        let body = rest
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| format!("coefficients must be bracketed in {s:?}"))?;
        let coeffs = body
            .split(',')
            .map(|c| parse_rational(c.trim()))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        CycNum::from_coeffs(order, coeffs).map_err(|e| e.to_string())
    }

    /// Floating-point value (re, im), for display only.
    pub fn approx(&self) -> (f64, f64) {
        let (mut re, mut im) = (0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = c.to_f64().unwrap_or(f64::NAN);
            let angle = std::f64::consts::TAU * j as f64 / self.order as f64;
            re += v * angle.cos();
            im += v * angle.sin();
        }
        (re, im)
    }

    /// Human-readable sum of powers of ζ.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let z = match j {
                0 => String::new(),
                1 => format!("ζ{}", self.order),
                _ => format!("ζ{}^{}", self.order, j),
            };
            if j == 0 || !mag.is_one() {
                out.push_str(&fmt_rational(&mag));
            }
            out.push_str(&z);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let bad = || format!("bad rational {s:?}");
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

fn reduce(f: &Field, prod: Vec<BigRational>) -> Vec<BigRational> {
    let phi = f.phi;
    let mut out: Vec<BigRational> = Vec::with_capacity(phi);
    let mut it = prod.into_iter();
    out.extend(it.by_ref().take(phi));
    for (k, c) in it.enumerate() {
        if c.is_zero() {
            continue;
        }
        let row = &f.powers[(k + phi) % f.n as usize];
        for (o, &p) in out.iter_mut().zip(row) {
            if p != 0 {
                *o += &c * rat(p);
            }
        }
    }
    out
}

/// Positive divisors in increasing order.
pub(crate) fn divisors(m: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= m {
        if m.is_multiple_of(d) {
            small.push(d);
            if d * d != m {
                large.push(m / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// The positive square root of `n`, assembled from √2 = ζ₈ + ζ₈⁻¹ and the
/// quadratic Gauss sums Σ_x ζ_p^{x²} (equal to √p or i√p).
pub fn sqrt_of_integer(n: u64) -> CycNum {
    assert!(n >= 1, "square root of a positive integer");
    let mut rest = n;
    let mut square_root_of_square = 1i64;
    let mut radical = CycNum::one(1);
    let mut p = 2u64;
    while rest > 1 {
        if p * p > rest {
            p = rest;
        }
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        square_root_of_square *= (p as i64).pow(e / 2);
        if e % 2 == 1 {
            let root = if p == 2 {
                &CycNum::root(8, 1) + &CycNum::root(8, -1)
            } else {
                let mut counts = vec![BigInt::zero(); p as usize];
                for x in 0..p {
                    counts[(x * x % p) as usize] += 1;
                }
                let gauss = CycNum::from_exponent_counts(p as u32, &counts);
                if p % 4 == 1 {
                    gauss
                } else {
                    let four_p = 4 * p as u32;
                    &gauss.embed(four_p).expect("p divides 4p") * &CycNum::root(four_p, -(p as i64))
                }
            };
            let l = lcm_order(radical.order, root.order);
            radical = &radical.embed(l).expect("lcm") * &root.embed(l).expect("lcm");
        }
        p += 1;
    }
    radical.scale(&rat(square_root_of_square))
}

/// Least common multiple of two conductors.
pub fn lcm_order(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let l = lcm_order(self.order, other.order);
        match (self.embed(l), other.embed(l)) {
            (Ok(a), Ok(b)) => a.coeffs == b.coeffs,
            _ => false,
        }
    }
}

impl Eq for CycNum {}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_token())
    }
}

// Operator forms require equal orders and panic otherwise; use the `try_` methods
// where the orders are not known to agree.
impl<'a> Add<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        self.try_add(rhs).expect("CycNum addition across orders")
    }
}

impl<'a> Sub<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        self.try_sub(rhs).expect("CycNum subtraction across orders")
    }
}

impl<'a> Mul<&'a CycNum> for &'a CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        self.try_mul(rhs).expect("CycNum multiplication across orders")
    }
}

impl Add for CycNum {
    type Output = CycNum;
    fn add(self, rhs: CycNum) -> CycNum {
        &self + &rhs
    }
}

impl Sub for CycNum {
    type Output = CycNum;
    fn sub(self, rhs: CycNum) -> CycNum {
        &self - &rhs
    }
}

impl Mul for CycNum {
    type Output = CycNum;
    fn mul(self, rhs: CycNum) -> CycNum {
        &self * &rhs
    }
}

impl AddAssign<&CycNum> for CycNum {
    fn add_assign(&mut self, rhs: &CycNum) {
        assert_eq!(self.order, rhs.order, "CycNum addition across orders");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

/// Embeds every value into the lcm of their orders.
pub fn common_order(values: &[&CycNum]) -> u32 {
    values.iter().fold(1, |acc, v| lcm_order(acc, v.order()))
}
