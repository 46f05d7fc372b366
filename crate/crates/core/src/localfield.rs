//! Truncated arithmetic in the ring of integers of `Q_p`, together with the
//! two quadratic sign characters used throughout the crate.
//!
//! Every element is a residue modulo `p^N`. Anything whose answer depends on
//! digits beyond the working precision (the valuation of a zero residue, for
//! instance) is reported as an error instead of being guessed.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The base field `Q_p` at a fixed working precision.
///
/// The uniformizer is always `p` and the residue field has `q = p` elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldConfig {
    p: u64,
    precision: u32,
    eps: u64,
    modulus: u64,
}

impl FieldConfig {
    /// Smallest working precision accepted.
    pub const MIN_PRECISION: u32 = 4;

    /// Builds the configuration with `eps` the smallest positive non-residue mod `p`.
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        check_prime(p)?;
        let eps = (2..p)
            .find(|&u| legendre(u, p) == Ok(-1))
            .expect("odd primes have non-residues");
        Self::with_eps(p, precision, eps)
    }

    /// Builds the configuration with an explicit non-square unit `eps`.
    pub fn with_eps(p: u64, precision: u32, eps: u64) -> Result<Self> {
        check_prime(p)?;
        if precision < Self::MIN_PRECISION {
            return Err(Error::InvalidConfig(format!(
                "precision {precision} is below the minimum {}",
                Self::MIN_PRECISION
            )));
        }
        // Residues are multiplied in u128, and signed values such as f must fit an i64.
        let modulus = p
            .checked_pow(precision)
            .filter(|&m| m < (1u64 << 62))
            .ok_or_else(|| {
                Error::InvalidConfig(format!("{p}^{precision} does not fit in 62 bits"))
            })?;
        if legendre(eps % p, p) != Ok(-1) {
            return Err(Error::InvalidConfig(format!(
                "eps = {eps} is not a non-residue mod {p}"
            )));
        }
        Ok(Self {
            p,
            precision,
            eps: eps % p,
            modulus,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Cardinality of the residue field.
    pub fn q(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn eps(&self) -> u64 {
        self.eps
    }

    /// `p^N`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn element(&self, x: i64) -> PadicNumber {
        PadicNumber::from_i64(*self, x)
    }

    pub fn zero(&self) -> PadicNumber {
        self.element(0)
    }

    pub fn one(&self) -> PadicNumber {
        self.element(1)
    }

    pub fn eps_element(&self) -> PadicNumber {
        PadicNumber::from_residue(*self, self.eps)
    }

    /// The uniformizer `p`.
    pub fn uniformizer(&self) -> PadicNumber {
        PadicNumber::from_residue(*self, self.p)
    }

    /// `p^k` as an exact integer; `k` must be below the working precision.
    pub fn q_pow(&self, k: u32) -> i64 {
        debug_assert!(k < self.precision);
        self.p.pow(k) as i64
    }
}

fn check_prime(p: u64) -> Result<()> {
    if p < 3 || p.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!("{p} is not an odd prime")));
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return Err(Error::InvalidConfig(format!("{p} is not prime")));
        }
        d += 2;
    }
    Ok(())
}

/// Legendre symbol `(u / p)` for an odd prime `p`, via Euler's criterion.
pub fn legendre(u: u64, p: u64) -> Result<i8> {
    let u = u % p;
    if u == 0 {
        return Err(Error::ZeroInput);
    }
    Ok(if pow_mod(u, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    })
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
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

/// One of the four classes of `F^x / (F^x)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SquareClass {
    One,
    Eps,
    Uniformizer,
    EpsUniformizer,
}

impl SquareClass {
    fn from_parts(unit_is_square: bool, odd_valuation: bool) -> Self {
        match (unit_is_square, odd_valuation) {
            (true, false) => SquareClass::One,
            (false, false) => SquareClass::Eps,
            (true, true) => SquareClass::Uniformizer,
            (false, true) => SquareClass::EpsUniformizer,
        }
    }

    fn parts(self) -> (bool, bool) {
        match self {
            SquareClass::One => (true, false),
            SquareClass::Eps => (false, false),
            SquareClass::Uniformizer => (true, true),
            SquareClass::EpsUniformizer => (false, true),
        }
    }

    /// Group law of the Klein four-group `F^x / (F^x)^2`.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Self) -> Self {
        let (sa, oa) = self.parts();
        let (sb, ob) = other.parts();
        Self::from_parts(sa == sb, oa != ob)
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SquareClass::One => "1",
            SquareClass::Eps => "eps",
            SquareClass::Uniformizer => "varpi",
            SquareClass::EpsUniformizer => "eps*varpi",
        })
    }
}

/// An element of `Z_p` known modulo `p^N`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicNumber {
    residue: u64,
    cfg: FieldConfig,
}

impl PadicNumber {
    pub fn from_residue(cfg: FieldConfig, residue: u64) -> Self {
        Self {
            residue: residue % cfg.modulus,
            cfg,
        }
    }

    pub fn from_i64(cfg: FieldConfig, x: i64) -> Self {
        let m = cfg.modulus as i128;
        let r = (x as i128).rem_euclid(m) as u64;
        Self { residue: r, cfg }
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn config(&self) -> &FieldConfig {
        &self.cfg
    }

    /// The residue as a signed integer in `(-p^N/2, p^N/2]`.
    pub fn centered(&self) -> i64 {
        let m = self.cfg.modulus;
        if self.residue > m / 2 {
            self.residue as i64 - m as i64
        } else {
            self.residue as i64
        }
    }

    /// Image in the residue field `F_p`.
    pub fn reduce(&self) -> u64 {
        self.residue % self.cfg.p
    }

    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    pub fn valuation(&self) -> Result<u32> {
        if self.residue == 0 {
            return Err(Error::IndistinguishableFromZero {
                precision: self.cfg.precision,
            });
        }
        let mut r = self.residue;
        let mut v = 0;
        while r.is_multiple_of(self.cfg.p) {
            r /= self.cfg.p;
            v += 1;
        }
        Ok(v)
    }

    /// Splits `x = p^v * u`, returning `(v, u mod p)`.
    fn unit_residue(&self) -> Result<(u32, u64)> {
        let v = self.valuation()?;
        let u = (self.residue / self.cfg.p.pow(v)) % self.cfg.p;
        Ok((v, u))
    }

    pub fn is_unit(&self) -> bool {
        self.reduce() != 0
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = self.cfg.one();
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a unit.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotInvertible);
        }
        let m = self.cfg.modulus as i128;
        let (mut old_r, mut r) = (self.residue as i128, m);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        debug_assert_eq!(old_r, 1);
        Ok(Self {
            residue: old_s.rem_euclid(m) as u64,
            cfg: self.cfg,
        })
    }

    /// Exact division by `p^k`; fails when the residue is not divisible.
    pub fn div_uniformizer_pow(&self, k: u32) -> Result<Self> {
        let v = self.valuation()?;
        if v < k {
            return Err(Error::InvalidArgument(format!(
                "valuation {v} is below the requested shift {k}"
            )));
        }
        // The top k digits of the quotient are unknown; they are filled with zeros.
        Ok(Self::from_residue(
            self.cfg,
            self.residue / self.cfg.p.pow(k),
        ))
    }

    /// `sgn_eps(x) = (-1)^v(x)`, the character of `F^x` attached to `F(sqrt eps)`.
    pub fn sgn_eps(&self) -> Result<i8> {
        Ok(if self.valuation()? % 2 == 0 { 1 } else { -1 })
    }

    /// The quadratic character of `F^x` whose kernel is the norm group of `F(sqrt p)`.
    ///
    /// The norm group is generated by `-p` and the unit squares, so for
    /// `x = u p^n` the value is `(u/p) * ((-1)/p)^n`.
    pub fn sgn_pi(&self) -> Result<i8> {
        let (v, u) = self.unit_residue()?;
        let unit = legendre(u, self.cfg.p)?;
        let minus_one = legendre(self.cfg.p - 1, self.cfg.p)?;
        Ok(if v % 2 == 0 { unit } else { unit * minus_one })
    }

    pub fn square_class(&self) -> Result<SquareClass> {
        let (v, u) = self.unit_residue()?;
        Ok(SquareClass::from_parts(
            legendre(u, self.cfg.p)? == 1,
            v % 2 == 1,
        ))
    }

    /// A square root modulo `p^N`, lifted by Newton iteration from the
    /// smallest square root of the unit part modulo `p`. The other root is its
    /// negative.
    pub fn hensel_sqrt(&self) -> Result<Self> {
        let (v, u0) = self.unit_residue()?;
        let p = self.cfg.p;
        if v % 2 == 1 || legendre(u0, p)? != 1 {
            return Err(Error::NotASquare);
        }
        let half = v / 2;
        let unit = Self::from_residue(self.cfg, self.residue / p.pow(v));
        let r0 = (1..p)
            .find(|&r| mul_mod(r, r, p) == u0)
            .expect("residue symbol +1 guarantees a root");
        let mut r = Self::from_residue(self.cfg, r0);
        let two = self.cfg.element(2);
        // Each step doubles the number of correct digits.
        let mut correct = 1;
        while correct < self.cfg.precision {
            let step = (r * r - unit) * (two * r).inverse()?;
            r = r - step;
            correct *= 2;
        }
        Ok(r * self.cfg.uniformizer().pow(half as u64))
    }
}

impl fmt::Debug for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (mod {}^{})",
            self.centered(),
            self.cfg.p,
            self.cfg.precision
        )
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.centered())
    }
}

fn same_field(a: &PadicNumber, b: &PadicNumber) {
    assert_eq!(a.cfg, b.cfg, "mixing p-adic numbers from different fields");
}

impl Add for PadicNumber {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        same_field(&self, &rhs);
        let m = self.cfg.modulus;
        Self {
            residue: ((self.residue as u128 + rhs.residue as u128) % m as u128) as u64,
            cfg: self.cfg,
        }
    }
}

impl Sub for PadicNumber {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for PadicNumber {
    type Output = Self;

    fn neg(self) -> Self {
        let m = self.cfg.modulus;
        Self {
            residue: (m - self.residue) % m,
            cfg: self.cfg,
        }
    }
}

impl Mul for PadicNumber {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        same_field(&self, &rhs);
        Self {
            residue: mul_mod(self.residue, rhs.residue, self.cfg.modulus),
            cfg: self.cfg,
        }
    }
}
