//! Elements of the unramified elliptic torus `T^eps` and of its
//! `GL_2`-conjugate `T^{eps,varpi}`, stored through their common avatar
//! `a + b sqrt(eps)` in the norm-one group `E^1`.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localfield::{FieldConfig, PadicNumber};
use crate::residue::ResTorusPoint;

/// Which of the two conjugacy classes of tori the matrix lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorusVariant {
    /// `T^eps`: matrices `(a b; eps*b a)`.
    Unramified,
    /// `T^{eps,varpi} = g T^eps g^{-1}` with `g = diag(1, varpi)`.
    Conjugated,
}

impl TorusVariant {
    pub fn toggled(self) -> Self {
        match self {
            TorusVariant::Unramified => TorusVariant::Conjugated,
            TorusVariant::Conjugated => TorusVariant::Unramified,
        }
    }
}

/// Position of a regular element relative to the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// In `G_{0+}`: `v(b) >= 1` and `a = 1 mod p`.
    Near,
    /// In `-G_{0+}`: `v(b) >= 1` and `a = -1 mod p`.
    AntiNear,
    /// Outside `Z(G) G_{0+}`: `v(b) = 0`.
    Far,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Near => "near",
            Classification::AntiNear => "anti_near",
            Classification::Far => "far",
        })
    }
}

/// A matrix entry of the form `unit * varpi^shift` with `unit` in `Z_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaledEntry {
    pub value: PadicNumber,
    pub varpi_shift: i32,
}

impl ScaledEntry {
    fn plain(value: PadicNumber) -> Self {
        Self {
            value,
            varpi_shift: 0,
        }
    }

    fn shifted(self, by: i32) -> Self {
        Self {
            value: self.value,
            varpi_shift: self.varpi_shift + by,
        }
    }
}

/// A norm-one element `a + b sqrt(eps)` viewed in one of the two tori.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TorusElement {
    a: PadicNumber,
    b: PadicNumber,
    variant: TorusVariant,
}

impl TorusElement {
    pub fn new(a: PadicNumber, b: PadicNumber, variant: TorusVariant) -> Result<Self> {
        let cfg = a.config();
        if a * a - cfg.eps_element() * b * b != cfg.one() {
            return Err(Error::NotOnTorus {
                a: a.residue(),
                b: b.residue(),
            });
        }
        Ok(Self { a, b, variant })
    }

    pub fn from_ints(cfg: &FieldConfig, a: i64, b: i64, variant: TorusVariant) -> Result<Self> {
        Self::new(cfg.element(a), cfg.element(b), variant)
    }

    pub fn identity(cfg: &FieldConfig) -> Self {
        Self {
            a: cfg.one(),
            b: cfg.zero(),
            variant: TorusVariant::Unramified,
        }
    }

    pub fn a(&self) -> PadicNumber {
        self.a
    }

    pub fn b(&self) -> PadicNumber {
        self.b
    }

    pub fn variant(&self) -> TorusVariant {
        self.variant
    }

    pub fn config(&self) -> &FieldConfig {
        self.a.config()
    }

    /// `Im_eps(a + b sqrt(eps)) = b`.
    pub fn im_eps(&self) -> PadicNumber {
        self.b
    }

    pub fn is_regular(&self) -> bool {
        !self.b.is_zero()
    }

    fn b_valuation(&self) -> Result<u32> {
        self.b.valuation().map_err(|_| {
            Error::PrecisionExhausted(format!(
                "Im_eps is zero mod {}^{}",
                self.config().p(),
                self.config().precision()
            ))
        })
    }

    /// `v(b)`, which is also `-log_q D^G(gamma)`.
    pub fn valuation_b(&self) -> Result<u32> {
        self.b_valuation()
    }

    /// Definitional test for membership in `T^eps_1`: `a in 1 + p`, `b in p`.
    pub fn in_first_filtration(&self) -> bool {
        let p = self.config().p();
        self.a.residue() % p == 1 && self.b.residue().is_multiple_of(p)
    }

    pub fn classify(&self) -> Result<Classification> {
        let v = self.b_valuation()?;
        if v == 0 {
            return Ok(Classification::Far);
        }
        let p = self.config().p();
        let a0 = self.a.reduce();
        if a0 == 1 {
            Ok(Classification::Near)
        } else {
            debug_assert_eq!(a0, p - 1, "a^2 = 1 + eps b^2 forces a = +-1 mod p");
            Ok(Classification::AntiNear)
        }
    }

    /// `f(gamma) = (-q)^{v(b)}`.
    pub fn f_direct(&self) -> Result<i64> {
        let v = self.b_valuation()?;
        let q = self.config().q() as i64;
        Ok((-q).pow(v))
    }

    /// `f(gamma) = sgn_eps(Im_eps(gamma)) / |D_G(gamma)|^{1/2}`, with
    /// `|D_G|^{1/2}` read off the discriminant itself.
    pub fn f_via_disc(&self) -> Result<i64> {
        let sign = self
            .im_eps()
            .sgn_eps()
            .map_err(|_| Error::PrecisionExhausted("Im_eps is zero at precision".into()))?;
        let half = self.weyl_half_norm_exponent()?;
        Ok(sign as i64 * self.config().q_pow(half))
    }

    /// `D_G(gamma) = (trace)^2 - 4 = 4 a^2 - 4 = 4 eps b^2`.
    pub fn weyl_dg(&self) -> PadicNumber {
        let cfg = self.config();
        let two_a = cfg.element(2) * self.a;
        two_a * two_a - cfg.element(4)
    }

    /// The exponent `e` with `|D_G(gamma)|^{1/2} = q^{-e}`.
    pub fn weyl_half_norm_exponent(&self) -> Result<u32> {
        let v = self.weyl_dg().valuation().map_err(|_| {
            Error::PrecisionExhausted("Weyl discriminant is zero at precision".into())
        })?;
        if v % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "discriminant of an elliptic element has odd valuation {v}"
            )));
        }
        Ok(v / 2)
    }

    /// The inverse, which for norm-one elements is the Galois conjugate `a - b sqrt(eps)`.
    pub fn invert(&self) -> Self {
        Self {
            a: self.a,
            b: -self.b,
            variant: self.variant,
        }
    }

    pub fn galois_conj(&self) -> Self {
        self.invert()
    }

    /// `g . gamma = g gamma g^{-1}`: moves between the two tori, fixing the avatar.
    pub fn g_conjugate(&self) -> Self {
        Self {
            variant: self.variant.toggled(),
            ..*self
        }
    }

    pub fn negate(&self) -> Self {
        Self {
            a: -self.a,
            b: -self.b,
            variant: self.variant,
        }
    }

    /// Group law in `E^1`. Both factors must lie in the same torus.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.variant != other.variant {
            return Err(Error::InvalidArgument(
                "cannot multiply elements of different tori".into(),
            ));
        }
        let eps = self.config().eps_element();
        Ok(Self {
            a: self.a * other.a + eps * self.b * other.b,
            b: self.a * other.b + self.b * other.a,
            variant: self.variant,
        })
    }

    /// Image in the residue norm-one group.
    pub fn residue_point(&self) -> ResTorusPoint {
        ResTorusPoint {
            a: self.a.reduce(),
            b: self.b.reduce(),
        }
    }

    /// The 2x2 matrix, `(a b; eps*b a)` or `(a b/varpi; eps*b*varpi a)`.
    pub fn matrix(&self) -> [[ScaledEntry; 2]; 2] {
        let eps_b = self.config().eps_element() * self.b;
        let base = [
            [ScaledEntry::plain(self.a), ScaledEntry::plain(self.b)],
            [ScaledEntry::plain(eps_b), ScaledEntry::plain(self.a)],
        ];
        match self.variant {
            TorusVariant::Unramified => base,
            TorusVariant::Conjugated => [
                [base[0][0], base[0][1].shifted(-1)],
                [base[1][0].shifted(1), base[1][1]],
            ],
        }
    }

    /// `c^{-1}(gamma)` for the Cayley transform `c(X) = (1 + X/2)/(1 - X/2)`.
    pub fn cayley_inverse(&self) -> Result<LieElement> {
        if self.classify()? != Classification::Near {
            return Err(Error::NotNear);
        }
        let cfg = self.config();
        let a1 = self.a + cfg.one();
        let den = a1 * a1 - cfg.eps_element() * self.b * self.b;
        let y = cfg.element(4) * self.b * den.inverse()?;
        Ok(LieElement {
            y,
            variant: self.variant,
        })
    }
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.variant {
            TorusVariant::Unramified => "T^eps",
            TorusVariant::Conjugated => "T^{eps,varpi}",
        };
        write!(f, "{} + {}*sqrt(eps) in {}", self.a, self.b, tag)
    }
}

/// The Lie-algebra element `y sqrt(eps)` of the torus, i.e. `(0 y; eps*y 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LieElement {
    y: PadicNumber,
    variant: TorusVariant,
}

impl LieElement {
    pub fn new(y: PadicNumber, variant: TorusVariant) -> Self {
        Self { y, variant }
    }

    pub fn y(&self) -> PadicNumber {
        self.y
    }

    pub fn variant(&self) -> TorusVariant {
        self.variant
    }

    pub fn im_eps(&self) -> PadicNumber {
        self.y
    }

    pub fn valuation(&self) -> Result<u32> {
        self.y
            .valuation()
            .map_err(|_| Error::PrecisionExhausted("Lie element is zero at precision".into()))
    }

    /// `D_g(Y)`, the squared eigenvalue difference `(2 y sqrt(eps))^2 = 4 eps y^2`.
    pub fn weyl_dg(&self) -> PadicNumber {
        let cfg = self.y.config();
        cfg.element(4) * cfg.eps_element() * self.y * self.y
    }

    /// `c(Y) = (1 + Y/2)/(1 - Y/2)`; requires `v(y) >= 1`.
    pub fn cayley(&self) -> Result<TorusElement> {
        let cfg = *self.y.config();
        if self.valuation()? == 0 {
            return Err(Error::InvalidArgument(
                "Cayley transform needs v(y) >= 1".into(),
            ));
        }
        let quarter = cfg.element(4).inverse()?;
        let e = cfg.eps_element() * self.y * self.y * quarter;
        let den = (cfg.one() - e).inverse()?;
        let a = (cfg.one() + e) * den;
        let b = self.y * den;
        TorusElement::new(a, b, self.variant)
    }
}

/// Default number of rejection-sampling attempts.
pub const DEFAULT_SAMPLING_BUDGET: u32 = 64;

/// Draws a regular element of `T^eps` with the requested classification and `v(b)`.
pub fn sample_regular(
    cfg: &FieldConfig,
    class: Classification,
    v_target: u32,
    seed: u64,
) -> Result<TorusElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_regular_with(cfg, class, v_target, &mut rng, DEFAULT_SAMPLING_BUDGET)
}

/// As [`sample_regular`], drawing from a caller-owned generator.
pub fn sample_regular_with<R: Rng + ?Sized>(
    cfg: &FieldConfig,
    class: Classification,
    v_target: u32,
    rng: &mut R,
    budget: u32,
) -> Result<TorusElement> {
    match class {
        Classification::Far if v_target != 0 => {
            return Err(Error::InvalidArgument("far elements have v(b) = 0".into()))
        }
        Classification::Near | Classification::AntiNear if v_target == 0 => {
            return Err(Error::InvalidArgument(
                "near elements have v(b) >= 1".into(),
            ))
        }
        _ => {}
    }
    if v_target + 2 >= cfg.precision() {
        return Err(Error::PrecisionExhausted(format!(
            "v(b) = {v_target} leaves fewer than two digits at precision {}",
            cfg.precision()
        )));
    }
    let p = cfg.p();
    let scale = cfg.uniformizer().pow(v_target as u64);
    for _ in 0..budget {
        let u = loop {
            let u = rng.gen_range(1..cfg.modulus());
            if u % p != 0 {
                break u;
            }
        };
        let b = scale * PadicNumber::from_residue(*cfg, u);
        let a_sq = cfg.one() + cfg.eps_element() * b * b;
        let Ok(root) = a_sq.hensel_sqrt() else {
            continue;
        };
        let a = match class {
            Classification::Near if root.reduce() == 1 => root,
            Classification::Near => -root,
            Classification::AntiNear if root.reduce() == p - 1 => root,
            Classification::AntiNear => -root,
            Classification::Far if rng.gen_bool(0.5) => root,
            Classification::Far => -root,
        };
        let gamma = TorusElement::new(a, b, TorusVariant::Unramified)?;
        debug_assert_eq!(gamma.classify(), Ok(class));
        return Ok(gamma);
    }
    Err(Error::SamplingBudgetExceeded { attempts: budget })
}
