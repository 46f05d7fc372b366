//! The norm-one subgroup of `F_{q^2}^x = F_p(sqrt eps)^x`, which is cyclic of
//! order `q + 1`, and the depth-zero characters of the elliptic torus that
//! factor through it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycNumber;
use crate::error::{Error, Result};
use crate::localfield::{mul_mod, FieldConfig};

/// A point `a + b sqrt(eps)` of the residue norm-one group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResTorusPoint {
    pub a: u64,
    pub b: u64,
}

impl fmt::Display for ResTorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// A character of the norm-one group, named by its exponent against the
/// canonical generator: `k` sends the generator to `zeta_{q+1}^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharacterLevel {
    k: u64,
    modulus: u64,
}

impl CharacterLevel {
    pub fn new(k: i64, cfg: &FieldConfig) -> Self {
        let modulus = cfg.q() + 1;
        Self {
            k: k.rem_euclid(modulus as i64) as u64,
            modulus,
        }
    }

    /// The unique character of order two.
    pub fn quadratic(cfg: &FieldConfig) -> Self {
        Self::new((cfg.q() / 2 + 1) as i64, cfg)
    }

    /// Checks regularity (`psi != psi^{-1}`).
    pub fn regular(k: i64, cfg: &FieldConfig) -> Result<Self> {
        let level = Self::new(k, cfg);
        if !level.is_regular() {
            return Err(Error::NonRegularLevel {
                level: level.k,
                modulus: level.modulus,
            });
        }
        Ok(level)
    }

    /// Every regular level for the given field, in increasing order.
    pub fn all_regular(cfg: &FieldConfig) -> Vec<Self> {
        (0..=cfg.q() as i64)
            .map(|k| Self::new(k, cfg))
            .filter(Self::is_regular)
            .collect()
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_regular(&self) -> bool {
        self.k != 0 && 2 * self.k != self.modulus
    }

    pub fn is_quadratic(&self) -> bool {
        2 * self.k == self.modulus
    }

    /// The inverse character `psi^{-1}`.
    pub fn inverse(&self) -> Self {
        Self {
            k: (self.modulus - self.k) % self.modulus,
            modulus: self.modulus,
        }
    }
}

/// The residue norm-one group with its canonical generator.
#[derive(Debug, Clone)]
pub struct NormOneGroup {
    p: u64,
    eps: u64,
    points: Vec<ResTorusPoint>,
    generator: ResTorusPoint,
    powers: Vec<ResTorusPoint>,
}

impl NormOneGroup {
    pub fn new(cfg: &FieldConfig) -> Self {
        let (p, eps) = (cfg.p(), cfg.eps());
        let points = enumerate_norm_one(p, eps);
        let order = points.len() as u64;
        debug_assert_eq!(order, p + 1);
        let generator = *points
            .iter()
            .find(|&&pt| point_order(pt, p, eps) == order)
            .expect("the norm-one group is cyclic");
        let mut powers = Vec::with_capacity(points.len());
        let mut cur = ResTorusPoint { a: 1, b: 0 };
        for _ in 0..order {
            powers.push(cur);
            cur = group_mul(cur, generator, p, eps);
        }
        Self {
            p,
            eps,
            points,
            generator,
            powers,
        }
    }

    /// All `q + 1` points, ordered by `(b, a)`.
    pub fn points(&self) -> &[ResTorusPoint] {
        &self.points
    }

    pub fn order(&self) -> u64 {
        self.points.len() as u64
    }

    pub fn generator(&self) -> ResTorusPoint {
        self.generator
    }

    pub fn contains(&self, pt: ResTorusPoint) -> bool {
        on_curve(pt, self.p, self.eps)
    }

    pub fn mul(&self, x: ResTorusPoint, y: ResTorusPoint) -> ResTorusPoint {
        group_mul(x, y, self.p, self.eps)
    }

    pub fn inverse(&self, x: ResTorusPoint) -> ResTorusPoint {
        ResTorusPoint {
            a: x.a,
            b: (self.p - x.b) % self.p,
        }
    }

    /// `generator^e`.
    pub fn power_of_generator(&self, e: u64) -> ResTorusPoint {
        self.powers[(e % self.order()) as usize]
    }

    /// Discrete logarithm to the canonical generator, by scanning its powers.
    pub fn dlog(&self, pt: ResTorusPoint) -> Result<u64> {
        self.powers
            .iter()
            .position(|&x| x == pt)
            .map(|e| e as u64)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("{pt} is not in the norm-one group mod {}", self.p))
            })
    }

    /// `psi_k(pt) = zeta_{q+1}^{k * dlog(pt)}`.
    pub fn eval_character(&self, level: CharacterLevel, pt: ResTorusPoint) -> Result<CycNumber> {
        let e = self.dlog(pt)?;
        let m = self.order();
        Ok(CycNumber::root_of_unity(m, ((level.k() * e) % m) as i64))
    }
}

fn on_curve(pt: ResTorusPoint, p: u64, eps: u64) -> bool {
    let lhs = (mul_mod(pt.a, pt.a, p) + p - mul_mod(eps, mul_mod(pt.b, pt.b, p), p)) % p;
    pt.a < p && pt.b < p && lhs == 1
}

fn group_mul(x: ResTorusPoint, y: ResTorusPoint, p: u64, eps: u64) -> ResTorusPoint {
    ResTorusPoint {
        a: (mul_mod(x.a, y.a, p) + mul_mod(eps, mul_mod(x.b, y.b, p), p)) % p,
        b: (mul_mod(x.a, y.b, p) + mul_mod(x.b, y.a, p)) % p,
    }
}

fn point_order(pt: ResTorusPoint, p: u64, eps: u64) -> u64 {
    let one = ResTorusPoint { a: 1, b: 0 };
    let mut cur = pt;
    let mut n = 1;
    while cur != one {
        cur = group_mul(cur, pt, p, eps);
        n += 1;
    }
    n
}

fn enumerate_norm_one(p: u64, eps: u64) -> Vec<ResTorusPoint> {
    (0..p)
        .flat_map(|b| (0..p).map(move |a| ResTorusPoint { a, b }))
        .filter(|&pt| on_curve(pt, p, eps))
        .collect()
}
