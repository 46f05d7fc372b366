//! Endoscopic data for the depth-zero packets, transfer factors built from
//! their constituents, and the character-identity checks.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::charformulas::{adss152, psi0_sign_route, CharacterEngine, PacketSpec};
use crate::cyclotomic::CycNumber;
use crate::error::{Error, Result};
use crate::localfield::FieldConfig;
use crate::packets::Klein4Element;
use crate::residue::CharacterLevel;
use crate::torus::{Classification, TorusElement, TorusVariant};

/// The endoscopic datum `(H, calH, s, xi)` with `H = E^1`, reduced to what the
/// identity consumes: the element `s` and the character `psi` (or `psi_0`) of
/// `H` that is the stable character `S Theta_{phi^H}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EndoscopicDatum {
    eps: u64,
    s: Klein4Element,
    character: CharacterLevel,
}

impl EndoscopicDatum {
    pub fn for_packet(cfg: &FieldConfig, packet: PacketSpec) -> Self {
        Self {
            eps: cfg.eps(),
            s: Klein4Element::S1,
            character: packet.level(cfg),
        }
    }

    pub fn s(&self) -> Klein4Element {
        self.s
    }

    pub fn character(&self) -> CharacterLevel {
        self.character
    }

    /// `(H, s)`, identifying the endoscopic group and the semisimple element.
    pub fn fingerprint(&self) -> (String, Klein4Element) {
        (format!("E^1 in Q_p(sqrt {})", self.eps), self.s)
    }

    /// `S Theta_{phi^H}(delta)`.
    pub fn stable_character(
        &self,
        engine: &CharacterEngine,
        delta: &TorusElement,
    ) -> Result<CycNumber> {
        engine.torus_character(self.character, delta)
    }
}

/// `epsilon(1/2, C, psi) = epsilon(sgn_eps, 1/2, psi) = sgn_eps(varpi)^{-1}` for
/// a level-one additive character.
pub fn epsilon_factor(cfg: &FieldConfig) -> i64 {
    let chi_varpi = cfg
        .uniformizer()
        .sgn_eps()
        .expect("the uniformizer has valuation one") as i64;
    // chi takes values +-1, so its inverse is itself.
    chi_varpi
}

/// `kappa_{E/F}((c - cbar) / (2 eta))` with `eta = sqrt(eps)`, i.e. `sgn_eps(b)`.
pub fn kappa_term(delta: &TorusElement) -> Result<i64> {
    // c - cbar = 2 b sqrt(eps), so the quotient is b itself.
    let ratio = delta.b();
    ratio
        .sgn_eps()
        .map(i64::from)
        .map_err(|_| Error::PrecisionExhausted("c - cbar is zero at precision".into()))
}

/// `|c - cbar|_F^{-1} = q^{v(2 b sqrt(eps))} = q^{v(b)}`.
pub fn inverted_discriminant_norm(delta: &TorusElement) -> Result<i64> {
    let v = delta.valuation_b()?;
    Ok(delta.config().q_pow(v))
}

/// Which of the two admissible embeddings relates `delta` to `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelatedTag {
    /// `delta = gamma^H`.
    Direct,
    /// `delta = 1/gamma^H`.
    Inverse,
}

/// `[(gamma^H, gamma), (1/gamma^H, gamma)]` as `E^1` avatars.
pub fn related_elements(gamma: &TorusElement) -> [(RelatedTag, TorusElement); 2] {
    let base = match gamma.variant() {
        TorusVariant::Unramified => *gamma,
        TorusVariant::Conjugated => gamma.g_conjugate(),
    };
    [
        (RelatedTag::Direct, base),
        (RelatedTag::Inverse, base.invert()),
    ]
}

/// `Delta[w, e](delta, gamma) = epsilon * kappa(delta) * |c - cbar|^{-1}`, the
/// normalization with the Weyl discriminant in the denominator.
pub fn transfer_factor(delta: &TorusElement, gamma: &TorusElement) -> Result<i64> {
    if !gamma.is_regular() {
        return Err(Error::PrecisionExhausted(
            "gamma is not regular at precision".into(),
        ));
    }
    let eps = epsilon_factor(delta.config());
    // In T^{eps,varpi} the off-diagonal entry carries varpi^{-1}, and sgn_eps(varpi) = -1.
    let twist = match gamma.variant() {
        TorusVariant::Unramified => 1,
        TorusVariant::Conjugated => -1,
    };
    Ok(twist * eps * kappa_term(delta)? * inverted_discriminant_norm(delta)?)
}

/// `sum_{gamma^H} Delta(gamma^H, gamma) S Theta_{phi^H}(gamma^H)` as the literal two-term sum.
pub fn rhs_endoscopic(
    engine: &CharacterEngine,
    datum: &EndoscopicDatum,
    gamma: &TorusElement,
) -> Result<CycNumber> {
    if gamma.classify()? == Classification::AntiNear {
        return Err(Error::AntiNearUnsupported);
    }
    let mut total = CycNumber::zero();
    for (_, delta) in related_elements(gamma) {
        let delta_factor = transfer_factor(&delta, gamma)?;
        let value = datum.stable_character(engine, &delta)?;
        total = &total + &value.scale_int(delta_factor);
    }
    Ok(total)
}

/// `-f(gamma) (psi(gamma) + psi(1/gamma))`.
pub fn rhs_closed_form_regular(
    engine: &CharacterEngine,
    level: CharacterLevel,
    gamma: &TorusElement,
) -> Result<CycNumber> {
    let sum =
        &engine.torus_character(level, gamma)? + &engine.torus_character(level, &gamma.invert())?;
    Ok(sum.scale_int(-gamma.f_direct()?))
}

/// `-2 f(gamma) psi_0(gamma)`, with `psi_0` through `sgn_varpi`.
pub fn rhs_closed_form_nonregular(gamma: &TorusElement) -> Result<CycNumber> {
    let psi0 = psi0_sign_route(gamma)? as i64;
    Ok(CycNumber::from_integer(-2 * gamma.f_direct()? * psi0))
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    Unequal,
    Skipped(String),
}

impl Verdict {
    fn compare(lhs: &CycNumber, rhs: &CycNumber) -> Self {
        if lhs == rhs {
            Verdict::Equal
        } else {
            Verdict::Unequal
        }
    }

    pub fn is_skipped(&self) -> bool {
        matches!(self, Verdict::Skipped(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Equal => f.write_str("equal"),
            Verdict::Unequal => f.write_str("unequal"),
            Verdict::Skipped(reason) => write!(f, "skipped: {reason}"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Names the field keys of a serialized [`VerificationReport`], in order.
pub const REPORT_FIELDS: [&str; 13] = [
    "p",
    "N",
    "eps",
    "packet",
    "level",
    "s",
    "a",
    "b",
    "valuation_b",
    "classification",
    "lhs",
    "rhs",
    "verdict",
];

/// One identity check with its inputs and both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub p: u64,
    #[serde(rename = "N")]
    pub n: u32,
    pub eps: u64,
    pub packet: String,
    pub level: u64,
    pub s: String,
    pub a: i64,
    pub b: i64,
    pub valuation_b: Option<u32>,
    pub classification: Option<Classification>,
    pub lhs: Option<CycNumber>,
    pub rhs: Option<CycNumber>,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn new(cfg: &FieldConfig, packet: &str, level: u64, s: &str, gamma: &TorusElement) -> Self {
        Self {
            p: cfg.p(),
            n: cfg.precision(),
            eps: cfg.eps(),
            packet: packet.to_string(),
            level,
            s: s.to_string(),
            a: gamma.a().centered(),
            b: gamma.b().centered(),
            valuation_b: gamma.valuation_b().ok(),
            classification: gamma.classify().ok(),
            lhs: None,
            rhs: None,
            verdict: Verdict::Skipped("not evaluated".into()),
        }
    }

    /// Fills both sides, or records why they could not be computed.
    pub fn settle(mut self, sides: Result<(CycNumber, CycNumber)>) -> Self {
        match sides {
            Ok((lhs, rhs)) => {
                self.verdict = Verdict::compare(&lhs, &rhs);
                self.lhs = Some(lhs.simplify());
                self.rhs = Some(rhs.simplify());
            }
            Err(e) => self.verdict = Verdict::Skipped(e.to_string()),
        }
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports always serialize")
    }
}

fn packet_name(packet: PacketSpec) -> &'static str {
    match packet {
        PacketSpec::Regular(_) => "regular",
        PacketSpec::NonRegular => "nonregular",
    }
}

/// The identity check at `s`.
///
/// For `s = s1` this is the endoscopic identity against the datum of the
/// packet. For `s = 1` and the non-regular packet it compares the stable
/// character with `-2 psi_0` (far) or `-2` (near).
pub fn verify_identity(
    engine: &CharacterEngine,
    packet: PacketSpec,
    s: Klein4Element,
    gamma: &TorusElement,
) -> VerificationReport {
    let cfg = engine.config();
    let level = packet.level(cfg).k();
    let report = VerificationReport::new(cfg, packet_name(packet), level, &s.to_string(), gamma);
    let sides = (|| {
        let lhs = engine.theta_virtual(packet, s, gamma)?;
        let rhs = match (s, packet) {
            (Klein4Element::S1, _) => {
                let datum = EndoscopicDatum::for_packet(cfg, packet);
                rhs_endoscopic(engine, &datum, gamma)?
            }
            (Klein4Element::One, PacketSpec::NonRegular) => stable_closed_form(engine, gamma)?,
            (Klein4Element::One, PacketSpec::Regular(_)) => {
                return Err(Error::Undetermined(
                    "no stable identity is checked for the regular packet".into(),
                ))
            }
            _ => {
                return Err(Error::Undetermined(format!(
                    "no endoscopic datum is attached to {s}"
                )))
            }
        };
        Ok((lhs, rhs))
    })();
    report.settle(sides)
}

/// `-2 psi_0(gamma)` far from the identity and `-2` near it.
fn stable_closed_form(engine: &CharacterEngine, gamma: &TorusElement) -> Result<CycNumber> {
    let base = related_elements(gamma)[0].1;
    match base.classify()? {
        Classification::Far => Ok(CycNumber::from_integer(-2 * psi0_sign_route(&base)? as i64)),
        Classification::Near => Ok(CycNumber::from_integer(-2)),
        Classification::AntiNear => {
            let _ = engine;
            Err(Error::AntiNearUnsupported)
        }
    }
}

/// The two contradictions implied by the published near-identity closed form:
/// its `Theta_{phi,s1} = 0` against the endoscopic side `-2 f`, and its
/// `Theta_1 + Theta_2 = -1` against `-1 - f`.
pub fn falsify_adss152(
    engine: &CharacterEngine,
    gamma: &TorusElement,
) -> Result<(VerificationReport, VerificationReport)> {
    if gamma.classify()? != Classification::Near {
        return Err(Error::NotNear);
    }
    let cfg = engine.config();
    let packet = PacketSpec::NonRegular;
    let level = packet.level(cfg).k();
    let datum = EndoscopicDatum::for_packet(cfg, packet);

    let identity = VerificationReport::new(cfg, "adss152", level, "s1", gamma).settle((|| {
        Ok((
            adss152::theta_virtual(Klein4Element::S1, gamma)?,
            rhs_endoscopic(engine, &datum, gamma)?,
        ))
    })());
    let sums = VerificationReport::new(cfg, "adss152", level, "pi1+pi2", gamma).settle((|| {
        Ok((
            adss152::theta_sum12(gamma)?,
            engine.theta_nonregular_near_sums(gamma)?.0,
        ))
    })());
    Ok((identity, sums))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::sample_regular;

    fn engine(p: u64) -> CharacterEngine {
        CharacterEngine::new(FieldConfig::new(p, 8).unwrap())
    }

    fn int(n: i64) -> CycNumber {
        CycNumber::from_integer(n)
    }

    #[test]
    fn epsilon_factor_is_minus_one() {
        for p in [3, 5, 7, 11, 13] {
            for n in [4, 6, 8] {
                let cfg = FieldConfig::new(p, n).unwrap();
                assert_eq!(epsilon_factor(&cfg), -1);
                assert_eq!(
                    epsilon_factor(&cfg),
                    cfg.uniformizer().sgn_eps().unwrap() as i64
                );
            }
        }
    }

    #[test]
    fn kappa_examples() {
        let e = engine(3);
        let g = TorusElement::from_ints(e.config(), 3, -2, TorusVariant::Unramified).unwrap();
        assert_eq!(kappa_term(&g), Ok(1));
        let n = sample_regular(e.config(), Classification::Near, 1, 0).unwrap();
        assert_eq!(kappa_term(&n), Ok(-1));
        assert!(kappa_term(&TorusElement::identity(e.config())).is_err());
    }

    #[test]
    fn transfer_factor_examples() {
        let e = engine(3);
        let g = TorusElement::from_ints(e.config(), 3, -2, TorusVariant::Unramified).unwrap();
        assert_eq!(transfer_factor(&g, &g), Ok(-1));
        let n = sample_regular(e.config(), Classification::Near, 1, 0).unwrap();
        let [(_, d1), (_, d2)] = related_elements(&n);
        assert_eq!(transfer_factor(&d1, &n), Ok(3));
        assert_eq!(transfer_factor(&d2, &n), Ok(3));
    }

    #[test]
    fn related_pairs() {
        let e = engine(3);
        let g = TorusElement::from_ints(e.config(), 3, -2, TorusVariant::Unramified).unwrap();
        let [(t1, d1), (t2, d2)] = related_elements(&g);
        assert_eq!((t1, t2), (RelatedTag::Direct, RelatedTag::Inverse));
        assert_eq!((d1.a().centered(), d1.b().centered()), (3, -2));
        assert_eq!((d2.a().centered(), d2.b().centered()), (3, 2));
        assert_eq!(d1.classify(), d2.classify());
    }

    #[test]
    fn rhs_examples() {
        let e = engine(5);
        let n = sample_regular(e.config(), Classification::Near, 2, 3).unwrap();
        let nonreg = EndoscopicDatum::for_packet(e.config(), PacketSpec::NonRegular);
        assert_eq!(rhs_endoscopic(&e, &nonreg, &n).unwrap(), int(-50));
        for level in CharacterLevel::all_regular(e.config()) {
            let datum = EndoscopicDatum::for_packet(e.config(), PacketSpec::Regular(level));
            assert_eq!(rhs_endoscopic(&e, &datum, &n).unwrap(), int(-50));
            assert_eq!(datum.fingerprint(), nonreg.fingerprint());
        }
        let anti = sample_regular(e.config(), Classification::AntiNear, 1, 3).unwrap();
        assert_eq!(
            rhs_endoscopic(&e, &nonreg, &anti),
            Err(Error::AntiNearUnsupported)
        );
    }

    #[test]
    fn verify_examples() {
        let e = engine(3);
        let n = sample_regular(e.config(), Classification::Near, 1, 5).unwrap();
        let r = verify_identity(&e, PacketSpec::NonRegular, Klein4Element::S1, &n);
        assert_eq!(r.verdict, Verdict::Equal);
        assert_eq!(r.lhs, Some(int(6)));
        let r = verify_identity(&e, PacketSpec::NonRegular, Klein4Element::One, &n);
        assert_eq!(r.verdict, Verdict::Equal);
        assert_eq!(r.rhs, Some(int(-2)));
        let r = verify_identity(&e, PacketSpec::NonRegular, Klein4Element::S2, &n);
        assert!(r.verdict.is_skipped());
        assert!(r.verdict.to_string().contains("not determined"));
        let level = CharacterLevel::regular(1, e.config()).unwrap();
        let f = sample_regular(e.config(), Classification::Far, 0, 5).unwrap();
        let r = verify_identity(&e, PacketSpec::Regular(level), Klein4Element::S1, &f);
        assert_eq!(r.verdict, Verdict::Equal);
    }

    #[test]
    fn falsify_examples() {
        let e = engine(3);
        let n = sample_regular(e.config(), Classification::Near, 1, 5).unwrap();
        let (a, b) = falsify_adss152(&e, &n).unwrap();
        assert_eq!((a.lhs.clone(), a.rhs.clone()), (Some(int(0)), Some(int(6))));
        assert_eq!(a.verdict, Verdict::Unequal);
        assert_eq!(
            (b.lhs.clone(), b.rhs.clone()),
            (Some(int(-1)), Some(int(2)))
        );
        assert_eq!(b.verdict, Verdict::Unequal);
        let e5 = engine(5);
        let n5 = sample_regular(e5.config(), Classification::Near, 2, 1).unwrap();
        let (a, _) = falsify_adss152(&e5, &n5).unwrap();
        assert_eq!((a.lhs, a.rhs), (Some(int(0)), Some(int(-50))));
        let f = sample_regular(e.config(), Classification::Far, 0, 5).unwrap();
        assert_eq!(falsify_adss152(&e, &f).err(), Some(Error::NotNear));
    }

    #[test]
    fn conjugated_torus() {
        let e = engine(5);
        for class in [Classification::Far, Classification::Near] {
            for seed in 0..10 {
                let v = if class == Classification::Far {
                    0
                } else {
                    1 + seed as u32 % 3
                };
                let g = sample_regular(e.config(), class, v, seed)
                    .unwrap()
                    .g_conjugate();
                let d = related_elements(&g)[0].1;
                assert_eq!(transfer_factor(&d, &g), Ok(g.f_direct().unwrap()));
                let r = verify_identity(&e, PacketSpec::NonRegular, Klein4Element::S1, &g);
                assert_eq!(r.verdict, Verdict::Equal);
                let level = CharacterLevel::regular(2, e.config()).unwrap();
                let r = verify_identity(&e, PacketSpec::Regular(level), Klein4Element::S1, &g);
                assert_eq!(r.verdict, Verdict::Equal);
            }
        }
    }

    #[test]
    fn report_schema() {
        let e = engine(3);
        let n = sample_regular(e.config(), Classification::Near, 1, 5).unwrap();
        let r = verify_identity(&e, PacketSpec::NonRegular, Klein4Element::S1, &n);
        let v: serde_json::Value = serde_json::from_str(&r.to_json_line()).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        let mut expected: Vec<&str> = REPORT_FIELDS.to_vec();
        expected.sort_unstable();
        let mut got: Vec<&str> = keys.iter().map(|k| k.as_str()).collect();
        got.sort_unstable();
        assert_eq!(got, expected);
        assert_eq!(v["verdict"], "equal");
        assert_eq!(v["classification"], "near");
        assert_eq!(v["lhs"]["text"], "6");
    }
}
