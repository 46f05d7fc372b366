//! Character values of the depth-zero supercuspidal packets on the
//! unramified elliptic torus.
//!
//! The trusted engine ([`CharacterEngine`]) never exposes the individual
//! characters `Theta_1 .. Theta_4` of the non-regular packet near the
//! identity, only the sums `Theta_1 + Theta_2` and `Theta_3 + Theta_4`. The
//! competing closed forms that do assign individual values live in
//! [`adss152`] and are only consumed by the falsification harness.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycNumber;
use crate::error::{Error, Result};
use crate::localfield::FieldConfig;
use crate::packets::{iota, virtual_coeffs, z2_char, Klein4Element, PacketKind};
use crate::residue::{CharacterLevel, NormOneGroup, ResTorusPoint};
use crate::torus::{Classification, LieElement, TorusElement, TorusVariant};

/// Constant term `c_0(pi)` of the near-identity expansion for depth-zero `pi`.
pub const CONSTANT_TERM_C0: i64 = -1;

/// `H(Lambda', F(sqrt eps))` for an additive character `Lambda'` of depth zero.
pub const H_UNRAMIFIED: i64 = -1;

/// Kottwitz sign of `SL_2(F)`.
pub const KOTTWITZ_SIGN_SPLIT: i64 = 1;

/// Kottwitz sign of the anisotropic inner form `SL_1(D)`.
pub const KOTTWITZ_SIGN_INNER: i64 = -1;

/// Multiplicity of `pi_5` in the restriction from `GL_1(D)` to `SL_1(D)`:
/// the dimension of the two-dimensional irreducible of the quaternion group.
pub const INNER_FORM_MULTIPLICITY: i64 = 2;

/// The two members of a regular packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularMember {
    /// `pi+`, induced from `G_{x_0}`; the generic member.
    Plus,
    /// `pi- = g . pi+`.
    Minus,
}

impl RegularMember {
    fn twisted(self) -> Self {
        match self {
            RegularMember::Plus => RegularMember::Minus,
            RegularMember::Minus => RegularMember::Plus,
        }
    }

    fn index(self) -> usize {
        match self {
            RegularMember::Plus => 1,
            RegularMember::Minus => 2,
        }
    }
}

/// A depth-zero supercuspidal packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PacketSpec {
    /// The two-element packet of a character `psi` with `psi != psi^{-1}`.
    Regular(CharacterLevel),
    /// The four-element packet of the quadratic character `psi_0`.
    NonRegular,
}

impl PacketSpec {
    pub fn regular(k: i64, cfg: &FieldConfig) -> Result<Self> {
        Ok(PacketSpec::Regular(CharacterLevel::regular(k, cfg)?))
    }

    pub fn kind(&self) -> PacketKind {
        match self {
            PacketSpec::Regular(_) => PacketKind::Regular,
            PacketSpec::NonRegular => PacketKind::NonRegular,
        }
    }

    /// The torus character whose packet this is.
    pub fn level(&self, cfg: &FieldConfig) -> CharacterLevel {
        match self {
            PacketSpec::Regular(level) => *level,
            PacketSpec::NonRegular => CharacterLevel::quadratic(cfg),
        }
    }
}

/// Which `eta` in `{1, varpi}` selects the torus in the orbital-integral bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Eta {
    One,
    Uniformizer,
}

/// The bracket `[A; B_1, B_eps, B_varpi, B_{eps varpi}]_{eps,0}` restricted to
/// the unramified torus, where only `A` and `B_eps` contribute.
///
/// `B_eps` is the function `h * q * sgn_eps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitalBracket {
    pub a: i64,
    pub h: i64,
}

impl OrbitalBracket {
    /// The coefficients `[-1; 1, B_eps, 0, 0]` of the nilpotent orbit `X_1^{eps,1}`.
    pub fn exceptional() -> Self {
        Self {
            a: -1,
            h: H_UNRAMIFIED,
        }
    }
}

/// `mu-hat` evaluated on a regular Lie element `Y = y sqrt(eps)` with `v(y) >= 1`:
/// `|eps|^{1/2} A + q^{-1} D^g(Y)^{-1} B_eps(eta^{-1} Im_eps(Y))`.
pub fn mu_hat_orbital(y: &LieElement, bracket: OrbitalBracket, eta: Eta) -> Result<CycNumber> {
    let cfg = *y.y().config();
    let v = y.valuation()?;
    if v == 0 {
        return Err(Error::InvalidArgument(
            "orbital values are only tabulated on g_{0+}".into(),
        ));
    }
    let shifted = match eta {
        Eta::One => y.im_eps(),
        Eta::Uniformizer => y.im_eps().div_uniformizer_pow(1)?,
    };
    let sign = shifted.sgn_eps()? as i64;
    let q = BigInt::from(cfg.q());
    // |eps| = 1 for a unit; D^g(Y) = |y| = q^{-v}.
    let inv_disc = BigRational::from_integer(q.pow(v));
    let b_eps = BigRational::from_integer(BigInt::from(bracket.h) * &q * sign);
    let value = BigRational::from_integer(BigInt::from(bracket.a))
        + BigRational::new(BigInt::from(1), q) * inv_disc * b_eps;
    Ok(CycNumber::from_rational(value))
}

/// The unique quadratic character of `E^1` in its closed form:
/// `sgn_varpi(lambda + 1/lambda + 2)` off `lambda = -1`, and `-sgn_varpi(-1)` there.
pub fn psi0_sign_route(gamma: &TorusElement) -> Result<i8> {
    let cfg = gamma.config();
    if gamma.b().is_zero() && gamma.a() == -cfg.one() {
        return Ok(-(-cfg.one()).sgn_pi()?);
    }
    // lambda + lambda^{-1} = 2a for norm-one lambda.
    let arg = cfg.element(2) * (gamma.a() + cfg.one());
    arg.sgn_pi()
        .map_err(|_| Error::PrecisionExhausted("lambda + 1/lambda + 2 is zero at precision".into()))
}

/// [`psi0_sign_route`] on a residue point, using the integer representative of `a`.
pub fn psi0_sign_route_residue(cfg: &FieldConfig, pt: ResTorusPoint) -> Result<i8> {
    let p = cfg.p();
    if pt.b == 0 && pt.a == p - 1 {
        return Ok(-cfg.element(-1).sgn_pi()?);
    }
    cfg.element(2 * (pt.a as i64 + 1)).sgn_pi()
}

/// Character evaluation for one field configuration.
#[derive(Debug, Clone)]
pub struct CharacterEngine {
    cfg: FieldConfig,
    group: NormOneGroup,
}

impl CharacterEngine {
    pub fn new(cfg: FieldConfig) -> Self {
        let group = NormOneGroup::new(&cfg);
        Self { cfg, group }
    }

    pub fn config(&self) -> &FieldConfig {
        &self.cfg
    }

    pub fn group(&self) -> &NormOneGroup {
        &self.group
    }

    /// `psi_k(gamma)`, through the residue norm-one group.
    pub fn torus_character(
        &self,
        level: CharacterLevel,
        gamma: &TorusElement,
    ) -> Result<CycNumber> {
        self.group.eval_character(level, gamma.residue_point())
    }

    /// `psi_0(gamma)`: `1` near the identity (depth zero), otherwise the sign route.
    pub fn psi0(&self, gamma: &TorusElement) -> Result<i8> {
        if gamma.classify()? == Classification::Near {
            return Ok(1);
        }
        psi0_sign_route(gamma)
    }

    /// Brings `gamma` to `T^eps`, reporting whether a `g`-twist was undone.
    fn pull_back(gamma: &TorusElement) -> (TorusElement, bool) {
        match gamma.variant() {
            TorusVariant::Unramified => (*gamma, false),
            TorusVariant::Conjugated => (gamma.g_conjugate(), true),
        }
    }

    fn near_or_far(gamma: &TorusElement) -> Result<Classification> {
        match gamma.classify()? {
            Classification::AntiNear => Err(Error::AntiNearUnsupported),
            c => Ok(c),
        }
    }

    /// `Theta_{pi+}` or `Theta_{pi-}` of the regular packet of `level`.
    pub fn theta_regular(
        &self,
        member: RegularMember,
        level: CharacterLevel,
        gamma: &TorusElement,
    ) -> Result<CycNumber> {
        if !level.is_regular() {
            return Err(Error::NonRegularLevel {
                level: level.k(),
                modulus: level.modulus(),
            });
        }
        let (gamma, twisted) = Self::pull_back(gamma);
        let member = if twisted { member.twisted() } else { member };
        match (Self::near_or_far(&gamma)?, member) {
            (Classification::Far, RegularMember::Plus) => {
                let fwd = self.torus_character(level, &gamma)?;
                let back = self.torus_character(level, &gamma.invert())?;
                Ok(-(&fwd + &back))
            }
            (Classification::Far, RegularMember::Minus) => Ok(CycNumber::zero()),
            (_, RegularMember::Plus) => Ok(CycNumber::from_integer(
                CONSTANT_TERM_C0 - gamma.f_direct()?,
            )),
            (_, RegularMember::Minus) => Ok(CycNumber::from_integer(
                CONSTANT_TERM_C0 + gamma.f_direct()?,
            )),
        }
    }

    /// `Theta_j(gamma)` of the non-regular packet, far from the identity.
    pub fn theta_nonregular_far(&self, j: usize, gamma: &TorusElement) -> Result<CycNumber> {
        if !(1..=4).contains(&j) {
            return Err(Error::InvalidArgument(format!("no member pi_{j}")));
        }
        let (gamma, twisted) = Self::pull_back(gamma);
        if gamma.classify()? != Classification::Far {
            return Err(Error::NotFar);
        }
        // pi_3 = g.pi_1 and pi_4 = g.pi_2.
        let j = if twisted { (j + 1) % 4 + 1 } else { j };
        match j {
            1 | 2 => Ok(CycNumber::from_integer(-(self.psi0(&gamma)? as i64))),
            _ => Ok(CycNumber::zero()),
        }
    }

    /// `(Theta_1 + Theta_2, Theta_3 + Theta_4)` near the identity.
    pub fn theta_nonregular_near_sums(
        &self,
        gamma: &TorusElement,
    ) -> Result<(CycNumber, CycNumber)> {
        let (gamma, twisted) = Self::pull_back(gamma);
        if gamma.classify()? != Classification::Near {
            return Err(Error::NotNear);
        }
        let y = gamma.cayley_inverse()?;
        let bracket = OrbitalBracket::exceptional();
        // Theta_1 + Theta_2 at gamma, and Theta_1 + Theta_2 at g.gamma = Theta_3 + Theta_4 at gamma.
        let first = mu_hat_orbital(&y, bracket, Eta::One)?;
        let second = mu_hat_orbital(&y, bracket, Eta::Uniformizer)?;
        Ok(if twisted {
            (second, first)
        } else {
            (first, second)
        })
    }

    /// `Theta_{phi,s} = sum_pi trace(iota(pi))(s) Theta_pi`.
    pub fn theta_virtual(
        &self,
        packet: PacketSpec,
        s: Klein4Element,
        gamma: &TorusElement,
    ) -> Result<CycNumber> {
        match packet {
            PacketSpec::Regular(level) => {
                let mut total = CycNumber::zero();
                for member in [RegularMember::Plus, RegularMember::Minus] {
                    let rho = iota(PacketKind::Regular, member.index())?;
                    let weight = z2_char(rho, s)? as i64;
                    total = &total + &self.theta_regular(member, level, gamma)?.scale_int(weight);
                }
                Ok(total)
            }
            PacketSpec::NonRegular => {
                let coeffs = virtual_coeffs(s);
                let (base, _) = Self::pull_back(gamma);
                match Self::near_or_far(&base)? {
                    Classification::Far => {
                        let mut total = CycNumber::zero();
                        for (j, &c) in (1..=4).zip(coeffs.iter()) {
                            let w = iota(PacketKind::NonRegular, j)?;
                            debug_assert_eq!(w, j);
                            total =
                                &total + &self.theta_nonregular_far(j, gamma)?.scale_int(c as i64);
                        }
                        Ok(total)
                    }
                    _ => {
                        if coeffs[0] != coeffs[1] || coeffs[2] != coeffs[3] {
                            return Err(Error::Undetermined(format!(
                                "Theta_(phi,{s}) near the identity needs Theta_1 - Theta_2"
                            )));
                        }
                        let (s12, s34) = self.theta_nonregular_near_sums(gamma)?;
                        Ok(&s12.scale_int(coeffs[0] as i64) + &s34.scale_int(coeffs[2] as i64))
                    }
                }
            }
        }
    }

    /// `Theta_5(delta)` for the inner-form member, at the element `gamma` related to `delta`.
    pub fn theta5(&self, gamma: &TorusElement) -> Result<CycNumber> {
        let (gamma, _) = Self::pull_back(gamma);
        Self::near_or_far(&gamma)?;
        Ok(CycNumber::from_integer(self.psi0(&gamma)? as i64))
    }

    /// `Theta_1 + Theta_2 + Theta_3 + Theta_4` of the non-regular packet.
    pub fn stable_sum_nonregular(&self, gamma: &TorusElement) -> Result<CycNumber> {
        let (base, _) = Self::pull_back(gamma);
        match Self::near_or_far(&base)? {
            Classification::Far => (1..=4).map(|j| self.theta_nonregular_far(j, gamma)).sum(),
            _ => {
                let (a, b) = self.theta_nonregular_near_sums(gamma)?;
                Ok(&a + &b)
            }
        }
    }

    /// `(S Theta_{phi,0}(gamma), S Theta_{phi,1}(delta))`, each assembled with its Kottwitz sign.
    pub fn kottwitz_stable(&self, gamma: &TorusElement) -> Result<(CycNumber, CycNumber)> {
        let split = self
            .stable_sum_nonregular(gamma)?
            .scale_int(KOTTWITZ_SIGN_SPLIT);
        let inner = self
            .theta5(gamma)?
            .scale_int(INNER_FORM_MULTIPLICITY * KOTTWITZ_SIGN_INNER);
        Ok((split, inner))
    }
}

/// Individual near-identity values as predicted by the published closed form
/// that is incompatible with the endoscopic identity. Used only to exhibit
/// the contradictions.
pub mod adss152 {
    use super::*;

    fn half(n: i64) -> CycNumber {
        CycNumber::from_rational(BigRational::new(BigInt::from(n), BigInt::from(2)))
    }

    /// `((-f-1)/2, (f-1)/2, (f-1)/2, (-f-1)/2)` for `j = 1..4`.
    pub fn theta(j: usize, gamma: &TorusElement) -> Result<CycNumber> {
        let (base, twisted) = CharacterEngine::pull_back(gamma);
        if base.classify()? != Classification::Near {
            return Err(Error::NotNear);
        }
        let j = if twisted { (j + 1) % 4 + 1 } else { j };
        let f = base.f_direct()?;
        match j {
            1 | 4 => Ok(half(-f - 1)),
            2 | 3 => Ok(half(f - 1)),
            _ => Err(Error::InvalidArgument(format!("no member pi_{j}"))),
        }
    }

    /// `Theta_{phi,s}` assembled from the individual values above.
    pub fn theta_virtual(s: Klein4Element, gamma: &TorusElement) -> Result<CycNumber> {
        let coeffs = virtual_coeffs(s);
        (1..=4)
            .zip(coeffs)
            .map(|(j, c)| theta(j, gamma).map(|t| t.scale_int(c as i64)))
            .sum()
    }

    /// `Theta_1 + Theta_2`.
    pub fn theta_sum12(gamma: &TorusElement) -> Result<CycNumber> {
        Ok(&theta(1, gamma)? + &theta(2, gamma)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::sample_regular;

    fn engine(p: u64, n: u32) -> CharacterEngine {
        CharacterEngine::new(FieldConfig::new(p, n).unwrap())
    }

    fn int(n: i64) -> CycNumber {
        CycNumber::from_integer(n)
    }

    fn near(e: &CharacterEngine, v: u32, seed: u64) -> TorusElement {
        sample_regular(e.config(), Classification::Near, v, seed).unwrap()
    }

    fn far(e: &CharacterEngine, seed: u64) -> TorusElement {
        sample_regular(e.config(), Classification::Far, 0, seed).unwrap()
    }

    #[test]
    fn psi0_on_the_basic_far_element() {
        let e = engine(3, 6);
        let g = TorusElement::from_ints(e.config(), 3, -2, TorusVariant::Unramified).unwrap();
        // 2(a + 1) = 8 = 2 mod 3, a non-residue.
        assert_eq!(psi0_sign_route(&g), Ok(-1));
        assert_eq!(e.psi0(&g), Ok(-1));
        let level = CharacterLevel::quadratic(e.config());
        assert_eq!(e.torus_character(level, &g).unwrap(), int(-1));
        assert_eq!(e.theta_nonregular_far(1, &g).unwrap(), int(1));
        assert_eq!(e.theta_nonregular_far(2, &g).unwrap(), int(1));
        assert_eq!(e.theta_nonregular_far(3, &g).unwrap(), int(0));
        assert_eq!(e.theta_nonregular_far(4, &g).unwrap(), int(0));
        assert_eq!(
            e.theta_virtual(PacketSpec::NonRegular, Klein4Element::S1, &g)
                .unwrap(),
            int(2)
        );
        assert_eq!(
            e.theta_virtual(PacketSpec::NonRegular, Klein4Element::S2, &g)
                .unwrap(),
            int(0)
        );
        assert_eq!(
            e.theta_virtual(PacketSpec::NonRegular, Klein4Element::S3, &g)
                .unwrap(),
            int(0)
        );
        assert_eq!(e.theta5(&g).unwrap(), int(-1));
        assert_eq!(e.kottwitz_stable(&g).unwrap(), (int(2), int(2)));
    }

    #[test]
    fn regular_far_values() {
        let e = engine(5, 6);
        for seed in 0..10 {
            let g = far(&e, seed);
            let m = e.group().dlog(g.residue_point()).unwrap() as i64;
            for level in CharacterLevel::all_regular(e.config()) {
                let k = level.k() as i64;
                let expected =
                    -(&CycNumber::root_of_unity(6, k * m) + &CycNumber::root_of_unity(6, -k * m));
                assert_eq!(
                    e.theta_regular(RegularMember::Plus, level, &g).unwrap(),
                    expected
                );
                assert!(e
                    .theta_regular(RegularMember::Minus, level, &g)
                    .unwrap()
                    .is_zero());
                assert_eq!(
                    e.theta_virtual(PacketSpec::Regular(level), Klein4Element::S1, &g)
                        .unwrap(),
                    expected
                );
            }
        }
    }

    #[test]
    fn regular_near_values() {
        let e = engine(3, 8);
        let g = near(&e, 1, 4);
        let level = CharacterLevel::regular(1, e.config()).unwrap();
        assert_eq!(
            e.theta_regular(RegularMember::Plus, level, &g).unwrap(),
            int(2)
        );
        assert_eq!(
            e.theta_regular(RegularMember::Minus, level, &g).unwrap(),
            int(-4)
        );
        assert_eq!(
            e.theta_virtual(PacketSpec::Regular(level), Klein4Element::S1, &g)
                .unwrap(),
            int(6)
        );
        assert_eq!(
            e.theta_virtual(PacketSpec::Regular(level), Klein4Element::One, &g)
                .unwrap(),
            int(-2)
        );
        assert!(e
            .theta_virtual(PacketSpec::Regular(level), Klein4Element::S2, &g)
            .is_err());
        let psi0 = CharacterLevel::quadratic(e.config());
        assert!(matches!(
            e.theta_regular(RegularMember::Plus, psi0, &g),
            Err(Error::NonRegularLevel { .. })
        ));
    }

    #[test]
    fn near_sums_and_virtual_values() {
        let e = engine(3, 8);
        let g = near(&e, 1, 9);
        assert_eq!(e.theta_nonregular_near_sums(&g).unwrap(), (int(2), int(-4)));
        assert_eq!(
            e.theta_virtual(PacketSpec::NonRegular, Klein4Element::One, &g)
                .unwrap(),
            int(-2)
        );
        assert_eq!(
            e.theta_virtual(PacketSpec::NonRegular, Klein4Element::S1, &g)
                .unwrap(),
            int(6)
        );
        for s in [Klein4Element::S2, Klein4Element::S3] {
            assert!(matches!(
                e.theta_virtual(PacketSpec::NonRegular, s, &g),
                Err(Error::Undetermined(_))
            ));
        }
        assert_eq!(e.theta5(&g).unwrap(), int(1));
        assert_eq!(e.kottwitz_stable(&g).unwrap(), (int(-2), int(-2)));
        let f = far(&e, 1);
        assert_eq!(e.theta_nonregular_near_sums(&f), Err(Error::NotNear));
        assert_eq!(e.theta_nonregular_far(1, &g), Err(Error::NotFar));
    }

    #[test]
    fn mu_hat_examples() {
        let e = engine(3, 8);
        let g = near(&e, 1, 2);
        let y = g.cayley_inverse().unwrap();
        let br = OrbitalBracket::exceptional();
        assert_eq!(mu_hat_orbital(&y, br, Eta::One).unwrap(), int(2));
        assert_eq!(mu_hat_orbital(&y, br, Eta::Uniformizer).unwrap(), int(-4));
        let e5 = engine(5, 8);
        let g = near(&e5, 2, 2);
        let y = g.cayley_inverse().unwrap();
        assert_eq!(mu_hat_orbital(&y, br, Eta::One).unwrap(), int(-26));
        assert_eq!(mu_hat_orbital(&y, br, Eta::Uniformizer).unwrap(), int(24));
    }

    #[test]
    fn adss152_values() {
        let e = engine(3, 8);
        let g = near(&e, 1, 3);
        assert_eq!(adss152::theta(1, &g).unwrap(), int(1));
        assert_eq!(adss152::theta(2, &g).unwrap(), int(-2));
        let total: CycNumber = (1..=4).map(|j| adss152::theta(j, &g).unwrap()).sum();
        assert_eq!(total, int(-2));
        assert_eq!(
            adss152::theta_virtual(Klein4Element::S1, &g).unwrap(),
            int(0)
        );
        assert_eq!(
            adss152::theta_virtual(Klein4Element::S2, &g).unwrap(),
            int(0)
        );
        assert_eq!(
            adss152::theta_virtual(Klein4Element::S3, &g).unwrap(),
            int(6)
        );
        assert_eq!(adss152::theta_sum12(&g).unwrap(), int(-1));
        let e5 = engine(5, 8);
        let g5 = near(&e5, 1, 1);
        assert_eq!(
            adss152::theta(1, &g5).unwrap(),
            CycNumber::from_rational(BigRational::new(BigInt::from(4), BigInt::from(2)))
        );
        assert_eq!(adss152::theta(1, &far(&e, 0)), Err(Error::NotNear));
    }

    #[test]
    fn anti_near_is_refused() {
        let e = engine(5, 8);
        let g = sample_regular(e.config(), Classification::AntiNear, 1, 0).unwrap();
        let level = CharacterLevel::regular(1, e.config()).unwrap();
        assert_eq!(
            e.theta_regular(RegularMember::Plus, level, &g),
            Err(Error::AntiNearUnsupported)
        );
        assert_eq!(
            e.theta_virtual(PacketSpec::NonRegular, Klein4Element::S1, &g),
            Err(Error::AntiNearUnsupported)
        );
        assert_eq!(e.theta5(&g), Err(Error::AntiNearUnsupported));
    }

    #[test]
    fn conjugated_tori_pull_back_to_twisted_members() {
        let e = engine(7, 8);
        let level = CharacterLevel::regular(2, e.config()).unwrap();
        for seed in 0..5 {
            for g in [far(&e, seed), near(&e, 1 + seed as u32 % 3, seed)] {
                let h = g.g_conjugate();
                assert_eq!(
                    e.theta_regular(RegularMember::Plus, level, &h).unwrap(),
                    e.theta_regular(RegularMember::Minus, level, &g).unwrap()
                );
                if g.classify().unwrap() == Classification::Far {
                    for j in 1..=4 {
                        let twin = (j + 1) % 4 + 1;
                        assert_eq!(
                            e.theta_nonregular_far(j, &h).unwrap(),
                            e.theta_nonregular_far(twin, &g).unwrap()
                        );
                    }
                } else {
                    let (a, b) = e.theta_nonregular_near_sums(&g).unwrap();
                    assert_eq!(e.theta_nonregular_near_sums(&h).unwrap(), (b, a));
                }
            }
        }
    }

    #[test]
    fn regular_branches_share_one_expression() {
        // -f(gamma) (psi(gamma) + psi(1/gamma)) reproduces both Theta_{phi,s1} branches.
        for p in [5, 7, 11] {
            let e = engine(p, 8);
            for seed in 0..8 {
                for g in [far(&e, seed), near(&e, 1 + seed as u32 % 3, seed)] {
                    for level in CharacterLevel::all_regular(e.config()) {
                        let psi = &e.torus_character(level, &g).unwrap()
                            + &e.torus_character(level, &g.invert()).unwrap();
                        let unified = psi.scale_int(-g.f_direct().unwrap());
                        assert_eq!(
                            e.theta_virtual(PacketSpec::Regular(level), Klein4Element::S1, &g)
                                .unwrap(),
                            unified
                        );
                    }
                }
            }
        }
    }
}
