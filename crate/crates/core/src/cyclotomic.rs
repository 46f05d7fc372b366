//! Exact arithmetic in cyclotomic fields `Q(zeta_m)`.
//!
//! An element is stored as a rational polynomial of degree below `phi(m)`,
//! reduced modulo the cyclotomic polynomial `Phi_m`. Two elements with
//! different conductors are compared and combined inside `Q(zeta_lcm)`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

type PolyCache = Mutex<HashMap<u64, Arc<Vec<BigInt>>>>;

fn cache() -> &'static PolyCache {
    static CACHE: OnceLock<PolyCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (lowest degree first) of the cyclotomic polynomial `Phi_m`.
///
/// Computed as `(x^m - 1) / prod_{d | m, d < m} Phi_d`, memoised per `m`.
pub fn cyclotomic_polynomial(m: u64) -> Arc<Vec<BigInt>> {
    assert!(m >= 1, "conductor must be positive");
    if let Some(poly) = cache().lock().unwrap().get(&m) {
        return Arc::clone(poly);
    }
    let mut num: Vec<BigInt> = vec![BigInt::zero(); m as usize + 1];
    num[0] = -BigInt::one();
    num[m as usize] = BigInt::one();
    for d in (1..m).filter(|d| m.is_multiple_of(*d)) {
        let divisor = cyclotomic_polynomial(d);
        num = divide_monic_exact(&num, &divisor);
    }
    let poly = Arc::new(num);
    cache()
        .lock()
        .unwrap()
        .entry(m)
        .or_insert_with(|| Arc::clone(&poly));
    poly
}

fn divide_monic_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "division was not exact");
    quot
}

/// Euler's totient, which is the degree of `Phi_m`.
pub fn totient(m: u64) -> usize {
    cyclotomic_polynomial(m).len() - 1
}

/// An exact element of `Q(zeta_m)`.
#[derive(Clone)]
pub struct CycNumber {
    conductor: u64,
    coeffs: Vec<BigRational>,
}

impl CycNumber {
    /// Reduces an arbitrary polynomial in `zeta_m` (coefficients indexed by exponent).
    fn from_poly(conductor: u64, poly: Vec<BigRational>) -> Self {
        let m = conductor as usize;
        let phi = cyclotomic_polynomial(conductor);
        let deg = phi.len() - 1;
        // Fold exponents modulo m first, using zeta^m = 1.
        let mut folded = vec![BigRational::zero(); m.max(deg)];
        for (i, c) in poly.into_iter().enumerate() {
            if !c.is_zero() {
                folded[i % m] += c;
            }
        }
        for i in (deg..folded.len()).rev() {
            let c = std::mem::take(&mut folded[i]);
            if c.is_zero() {
                continue;
            }
            for (j, pj) in phi.iter().enumerate().take(deg) {
                if !pj.is_zero() {
                    folded[i - deg + j] -= &c * BigRational::from_integer(pj.clone());
                }
            }
        }
        folded.truncate(deg);
        Self {
            conductor,
            coeffs: folded,
        }
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Self {
            conductor: 1,
            coeffs: vec![r],
        }
    }

    /// `zeta_m^k`.
    pub fn root_of_unity(m: u64, k: i64) -> Self {
        assert!(m >= 1, "conductor must be positive");
        let e = k.rem_euclid(m as i64) as usize;
        let mut poly = vec![BigRational::zero(); e + 1];
        poly[e] = BigRational::one();
        Self::from_poly(m, poly)
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Coefficients with respect to `1, zeta_m, ..., zeta_m^(phi(m)-1)`.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The rational value, when the element lies in `Q`.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.coeffs.iter().skip(1).all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Drops to conductor 1 when the element is rational.
    pub fn simplify(self) -> Self {
        match self.to_rational() {
            Some(r) if self.conductor != 1 => Self::from_rational(r),
            _ => self,
        }
    }

    /// Image in `Q(zeta_n)` for a multiple `n` of the conductor.
    pub fn embed(&self, n: u64) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(self.conductor) {
            return Err(Error::ConductorMismatch(self.conductor, n));
        }
        if n == self.conductor {
            return Ok(self.clone());
        }
        let step = (n / self.conductor) as usize;
        let mut poly = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[i * step] = c.clone();
        }
        Ok(Self::from_poly(n, poly))
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let n = self.conductor.lcm(&other.conductor);
        (
            self.embed(n).expect("lcm is a multiple"),
            other.embed(n).expect("lcm is a multiple"),
        )
    }

    /// Image under `zeta_m -> zeta_m^{-1}` (complex conjugation).
    pub fn conjugate(&self) -> Self {
        let m = self.conductor as usize;
        let mut poly = vec![BigRational::zero(); m];
        for (i, c) in self.coeffs.iter().enumerate() {
            poly[(m - i) % m] += c;
        }
        Self::from_poly(self.conductor, poly)
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(n)))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Addition that refuses to embed into a larger field.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.conductor != other.conductor {
            return Err(Error::ConductorMismatch(self.conductor, other.conductor));
        }
        Ok(self + other)
    }

    /// Multiplication that refuses to embed into a larger field.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.conductor != other.conductor {
            return Err(Error::ConductorMismatch(self.conductor, other.conductor));
        }
        Ok(self * other)
    }

    /// Approximate complex value, for display only.
    pub fn to_complex_approx(&self) -> (f64, f64) {
        let m = self.conductor as f64;
        self.coeffs
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(re, im), (i, c)| {
                let v = ratio_to_f64(c);
                let t = std::f64::consts::TAU * i as f64 / m;
                (re + v * t.cos(), im + v * t.sin())
            })
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    let n: f64 = r.numer().to_string().parse().unwrap_or(f64::NAN);
    let d: f64 = r.denom().to_string().parse().unwrap_or(f64::NAN);
    n / d
}

impl PartialEq for CycNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycNumber {}

impl From<i64> for CycNumber {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigRational> for CycNumber {
    fn from(r: BigRational) -> Self {
        Self::from_rational(r)
    }
}

impl<'a> Add<&'a CycNumber> for &'a CycNumber {
    type Output = CycNumber;

    fn add(self, rhs: &CycNumber) -> CycNumber {
        if self.conductor != rhs.conductor {
            let (a, b) = self.common(rhs);
            return &a + &b;
        }
        CycNumber {
            conductor: self.conductor,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }
}

impl<'a> Mul<&'a CycNumber> for &'a CycNumber {
    type Output = CycNumber;

    fn mul(self, rhs: &CycNumber) -> CycNumber {
        if self.conductor != rhs.conductor {
            let (a, b) = self.common(rhs);
            return &a * &b;
        }
        let mut poly = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    poly[i + j] += x * y;
                }
            }
        }
        CycNumber::from_poly(self.conductor, poly)
    }
}

impl Neg for &CycNumber {
    type Output = CycNumber;

    fn neg(self) -> CycNumber {
        CycNumber {
            conductor: self.conductor,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl<'a> Sub<&'a CycNumber> for &'a CycNumber {
    type Output = CycNumber;

    fn sub(self, rhs: &CycNumber) -> CycNumber {
        self + &(-rhs)
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for CycNumber {
            type Output = CycNumber;

            fn $method(self, rhs: CycNumber) -> CycNumber {
                (&self).$method(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for CycNumber {
    type Output = CycNumber;

    fn neg(self) -> CycNumber {
        -&self
    }
}

impl std::iter::Sum for CycNumber {
    fn sum<I: Iterator<Item = CycNumber>>(iter: I) -> Self {
        iter.fold(CycNumber::zero(), |acc, x| &acc + &x)
    }
}

impl fmt::Display for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "z{}^{}", self.conductor, i)?,
                (_, false) => write!(f, "{mag}*z{}^{}", self.conductor, i)?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNumber[m={}]({})", self.conductor, self)
    }
}

impl Serialize for CycNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("CycNumber", 3)?;
        st.serialize_field("conductor", &self.conductor)?;
        let coeffs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        st.serialize_field("coeffs", &coeffs)?;
        st.serialize_field("text", &self.to_string())?;
        st.end()
    }
}
