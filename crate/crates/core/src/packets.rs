//! Component groups of the two depth-zero parameters, their character
//! tables, the projective images of the parameters, and the parametrization
//! of packet members by characters.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycNumber;
use crate::error::{Error, Result};
use crate::residue::CharacterLevel;

/// An element of the Klein four-group `{1, s1, s2, s3 = s1 s2}`.
///
/// The component group of the regular parameter is the subgroup `{1, s1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Klein4Element {
    One,
    S1,
    S2,
    S3,
}

impl Klein4Element {
    pub const ALL: [Klein4Element; 4] = [
        Klein4Element::One,
        Klein4Element::S1,
        Klein4Element::S2,
        Klein4Element::S3,
    ];

    fn index(self) -> usize {
        self as usize
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Self) -> Self {
        Self::ALL[self.index() ^ other.index()]
    }
}

impl fmt::Display for Klein4Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Klein4Element::One => "1",
            Klein4Element::S1 => "s1",
            Klein4Element::S2 => "s2",
            Klein4Element::S3 => "s3",
        })
    }
}

impl FromStr for Klein4Element {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "one" => Ok(Klein4Element::One),
            "s" | "s1" => Ok(Klein4Element::S1),
            "s2" => Ok(Klein4Element::S2),
            "s3" | "s1s2" => Ok(Klein4Element::S3),
            _ => Err(Error::InvalidArgument(format!("unknown element {s:?}"))),
        }
    }
}

// Rows rho_1..rho_4, columns 1, s1, s2, s1 s2.
const KLEIN4_TABLE: [[i8; 4]; 4] = [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]];

/// `rho_j(s)` for `j` in `1..=4`.
pub fn klein4_char(j: usize, s: Klein4Element) -> Result<i8> {
    if !(1..=4).contains(&j) {
        return Err(Error::InvalidArgument(format!("no character rho_{j}")));
    }
    Ok(KLEIN4_TABLE[j - 1][s.index()])
}

/// Characters of `Z/2 = {1, s1}`: index 0 is trivial, index 1 is the sign.
pub fn z2_char(j: usize, s: Klein4Element) -> Result<i8> {
    match (j, s) {
        (0, Klein4Element::One | Klein4Element::S1) => Ok(1),
        (1, Klein4Element::One) => Ok(1),
        (1, Klein4Element::S1) => Ok(-1),
        (0 | 1, _) => Err(Error::InvalidArgument(format!(
            "{s} is not in the component group {{1, s1}}"
        ))),
        _ => Err(Error::InvalidArgument(format!(
            "no character rho_{j} of Z/2"
        ))),
    }
}

/// Signs `(rho_1(s), .., rho_4(s))` weighting `Theta_1 .. Theta_4` in `Theta_{phi,s}`.
pub fn virtual_coeffs(s: Klein4Element) -> [i8; 4] {
    [1, 2, 3, 4].map(|j| KLEIN4_TABLE[j - 1][s.index()])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PacketKind {
    /// Packet `{pi+, pi-}` of a regular character `psi`.
    Regular,
    /// Packet `{pi_1, .., pi_4}` of the quadratic character `psi_0`.
    NonRegular,
}

/// The character `iota(pi_j)` of the component group attached to a member.
///
/// Regular packets number their members `1 = pi+`, `2 = pi-` and return a
/// `Z/2` character index; the non-regular packet returns `j` itself.
pub fn iota(kind: PacketKind, j: usize) -> Result<usize> {
    match kind {
        PacketKind::Regular if (1..=2).contains(&j) => Ok(j - 1),
        PacketKind::NonRegular if (1..=4).contains(&j) => Ok(j),
        _ => Err(Error::InvalidArgument(format!(
            "packet {kind:?} has no member {j}"
        ))),
    }
}

/// Which component group a parameter has.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentGroup {
    Z2,
    Klein4,
    /// The pull-back of the Klein four-group to `SL_2(C)`.
    Q8,
}

impl ComponentGroup {
    pub fn order(self) -> usize {
        match self {
            ComponentGroup::Z2 => 2,
            ComponentGroup::Klein4 => 4,
            ComponentGroup::Q8 => 8,
        }
    }

    pub fn irreducible_dims(self) -> Vec<i64> {
        match self {
            ComponentGroup::Z2 => vec![1, 1],
            ComponentGroup::Klein4 => vec![1, 1, 1, 1],
            ComponentGroup::Q8 => vec![1, 1, 1, 1, 2],
        }
    }

    /// Character values, one row per irreducible and one column per group element.
    pub fn character_table(self) -> Vec<Vec<i64>> {
        match self {
            ComponentGroup::Z2 => (0..2)
                .map(|j| {
                    [Klein4Element::One, Klein4Element::S1]
                        .iter()
                        .map(|&s| z2_char(j, s).unwrap() as i64)
                        .collect()
                })
                .collect(),
            ComponentGroup::Klein4 => KLEIN4_TABLE
                .iter()
                .map(|row| row.iter().map(|&x| x as i64).collect())
                .collect(),
            ComponentGroup::Q8 => {
                let elements = Quaternion::all();
                let mut rows: Vec<Vec<i64>> = (1..=4)
                    .map(|j| {
                        elements
                            .iter()
                            .map(|q| klein4_char(j, q.project()).unwrap() as i64)
                            .collect()
                    })
                    .collect();
                rows.push(elements.iter().map(|q| q.two_dim_trace()).collect());
                rows
            }
        }
    }
}

/// An element `sign * unit` of the quaternion group, `unit` in `{1, i, j, k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Quaternion {
    pub negative: bool,
    pub unit: Klein4Element,
}

impl Quaternion {
    pub fn all() -> Vec<Quaternion> {
        [false, true]
            .iter()
            .flat_map(|&negative| {
                Klein4Element::ALL
                    .iter()
                    .map(move |&unit| Quaternion { negative, unit })
            })
            .collect()
    }

    /// Image in `Q8 / {+-1}`, identifying `i, j, k` with `s1, s2, s3`.
    pub fn project(self) -> Klein4Element {
        self.unit
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: Self) -> Self {
        use Klein4Element::*;
        // ij = k, jk = i, ki = j; the reversed products pick up a sign; x^2 = -1.
        let extra_sign = match (self.unit, other.unit) {
            (One, _) | (_, One) => false,
            (a, b) if a == b => true,
            (S1, S2) | (S2, S3) | (S3, S1) => false,
            _ => true,
        };
        Quaternion {
            negative: self.negative ^ other.negative ^ extra_sign,
            unit: self.unit.mul(other.unit),
        }
    }

    /// Trace in the two-dimensional irreducible representation.
    pub fn two_dim_trace(self) -> i64 {
        match (self.unit, self.negative) {
            (Klein4Element::One, false) => 2,
            (Klein4Element::One, true) => -2,
            _ => 0,
        }
    }
}

/// A 2x2 matrix over a cyclotomic field, considered modulo nonzero scalars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjMatrix {
    entries: [[CycNumber; 2]; 2],
}

impl ProjMatrix {
    pub fn new(entries: [[CycNumber; 2]; 2]) -> Result<Self> {
        let m = Self { entries };
        if m.det().is_zero() {
            return Err(Error::InvalidArgument("singular matrix".into()));
        }
        Ok(m)
    }

    pub fn from_ints(e: [[i64; 2]; 2]) -> Result<Self> {
        Self::new(e.map(|row| row.map(CycNumber::from_integer)))
    }

    pub fn identity() -> Self {
        Self::from_ints([[1, 0], [0, 1]]).unwrap()
    }

    pub fn s1() -> Self {
        Self::from_ints([[1, 0], [0, -1]]).unwrap()
    }

    pub fn s2() -> Self {
        Self::from_ints([[0, 1], [-1, 0]]).unwrap()
    }

    pub fn s3() -> Self {
        Self::from_ints([[0, 1], [1, 0]]).unwrap()
    }

    pub fn of(s: Klein4Element) -> Self {
        match s {
            Klein4Element::One => Self::identity(),
            Klein4Element::S1 => Self::s1(),
            Klein4Element::S2 => Self::s2(),
            Klein4Element::S3 => Self::s3(),
        }
    }

    pub fn entries(&self) -> &[[CycNumber; 2]; 2] {
        &self.entries
    }

    pub fn det(&self) -> CycNumber {
        let e = &self.entries;
        &(&e[0][0] * &e[1][1]) - &(&e[0][1] * &e[1][0])
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.entries, &other.entries);
        let entry = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
        Self {
            entries: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]],
        }
    }

    /// `self = lambda * other` for some nonzero scalar `lambda`.
    pub fn equiv_mod_scalars(&self, other: &Self) -> bool {
        let a: Vec<&CycNumber> = self.entries.iter().flatten().collect();
        let b: Vec<&CycNumber> = other.entries.iter().flatten().collect();
        // Proportional vectors: every 2x2 minor of the stacked 2x4 matrix vanishes.
        (0..4).all(|i| (i + 1..4).all(|j| (a[i] * b[j]) == (a[j] * b[i])))
    }

    pub fn is_scalar(&self) -> bool {
        self.equiv_mod_scalars(&Self::identity())
    }

    /// Order in `PGL_2`, searched up to `bound`.
    pub fn order_mod_scalars(&self, bound: u32) -> Option<u32> {
        let mut cur = self.clone();
        for n in 1..=bound {
            if cur.is_scalar() {
                return Some(n);
            }
            cur = cur.mul(self);
        }
        None
    }
}

/// `x g = g x` modulo scalars for every `g` in `gens`.
pub fn centralizes(x: &ProjMatrix, gens: &[ProjMatrix]) -> bool {
    gens.iter().all(|g| x.mul(g).equiv_mod_scalars(&g.mul(x)))
}

/// The image `{1, s1, s2, s1 s2}` of the non-regular parameter.
pub fn nonregular_image() -> Vec<ProjMatrix> {
    let s1 = ProjMatrix::s1();
    let s2 = ProjMatrix::s2();
    let s1s2 = s1.mul(&s2);
    vec![ProjMatrix::identity(), s1, s2, s1s2]
}

/// Generators `diag(zeta^k, 1)` and `antidiag(1, 1)` of the image of a regular parameter.
pub fn regular_image_generators(level: CharacterLevel) -> Result<(ProjMatrix, ProjMatrix)> {
    if !level.is_regular() {
        return Err(Error::NonRegularLevel {
            level: level.k(),
            modulus: level.modulus(),
        });
    }
    let zeta = CycNumber::root_of_unity(level.modulus(), level.k() as i64);
    let diag = ProjMatrix::new([
        [zeta, CycNumber::zero()],
        [CycNumber::zero(), CycNumber::one()],
    ])?;
    Ok((diag, ProjMatrix::s3()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::FieldConfig;

    #[test]
    fn klein4_table_entries() {
        for s in Klein4Element::ALL {
            assert_eq!(klein4_char(1, s), Ok(1));
        }
        assert_eq!(klein4_char(3, Klein4Element::S1), Ok(-1));
        assert_eq!(
            klein4_char(4, Klein4Element::S1.mul(Klein4Element::S2)),
            Ok(1)
        );
        assert!(klein4_char(0, Klein4Element::One).is_err());
        assert!(klein4_char(5, Klein4Element::One).is_err());
    }

    #[test]
    fn virtual_coefficient_rows() {
        assert_eq!(virtual_coeffs(Klein4Element::One), [1, 1, 1, 1]);
        assert_eq!(virtual_coeffs(Klein4Element::S1), [1, 1, -1, -1]);
        assert_eq!(virtual_coeffs(Klein4Element::S2), [1, -1, 1, -1]);
        assert_eq!(virtual_coeffs(Klein4Element::S3), [1, -1, -1, 1]);
    }

    #[test]
    fn iota_assignment() {
        assert_eq!(iota(PacketKind::NonRegular, 2), Ok(2));
        assert_eq!(iota(PacketKind::Regular, 1), Ok(0));
        assert_eq!(iota(PacketKind::Regular, 2), Ok(1));
        assert!(iota(PacketKind::Regular, 3).is_err());
        assert_eq!(z2_char(1, Klein4Element::S1), Ok(-1));
        assert!(z2_char(1, Klein4Element::S2).is_err());
    }

    #[test]
    fn image_relations() {
        let img = nonregular_image();
        let (s1, s2, s3) = (ProjMatrix::s1(), ProjMatrix::s2(), ProjMatrix::s3());
        assert!(s1.mul(&s2).equiv_mod_scalars(&s3));
        assert!(!s1.mul(&s2).equiv_mod_scalars(&s1));
        assert!(s1.mul(&s1).is_scalar());
        assert!(s1.mul(&s2).equiv_mod_scalars(&s2.mul(&s1)));
        // They anticommute as honest matrices.
        assert_ne!(s1.mul(&s2), s2.mul(&s1));
        for x in &img {
            for y in &img {
                let xy = x.mul(y);
                assert!(img.iter().any(|z| z.equiv_mod_scalars(&xy)));
            }
        }
        for x in &img[1..] {
            assert_eq!(x.order_mod_scalars(8), Some(2));
        }
        assert!(ProjMatrix::from_ints([[1, 1], [1, 1]]).is_err());
    }

    #[test]
    fn centralizer_membership() {
        let cfg = FieldConfig::new(7, 6).unwrap();
        let img = nonregular_image();
        for x in &img {
            assert!(centralizes(x, &img));
        }
        for level in CharacterLevel::all_regular(&cfg) {
            let (d, w) = regular_image_generators(level).unwrap();
            let gens = [d, w];
            assert!(centralizes(&ProjMatrix::s1(), &gens));
            assert!(!centralizes(&ProjMatrix::s2(), &gens));
        }
        let psi0 = CharacterLevel::quadratic(&cfg);
        assert!(regular_image_generators(psi0).is_err());
        // At the quadratic level the diagonal generator would square to a scalar.
        let z = CycNumber::root_of_unity(psi0.modulus(), psi0.k() as i64);
        let d = ProjMatrix::new([
            [z, CycNumber::zero()],
            [CycNumber::zero(), CycNumber::one()],
        ])
        .unwrap();
        assert!(d.mul(&d).is_scalar());
    }

    #[test]
    fn quaternion_group_law() {
        let all = Quaternion::all();
        let one = Quaternion {
            negative: false,
            unit: Klein4Element::One,
        };
        let minus_one = Quaternion {
            negative: true,
            unit: Klein4Element::One,
        };
        for &x in &all {
            for &y in &all {
                // Projection to the Klein four-group is a homomorphism.
                assert_eq!(x.mul(y).project(), x.project().mul(y.project()));
            }
            if x.unit != Klein4Element::One {
                assert_eq!(x.mul(x), minus_one);
            }
        }
        let i = Quaternion {
            negative: false,
            unit: Klein4Element::S1,
        };
        let j = Quaternion {
            negative: false,
            unit: Klein4Element::S2,
        };
        assert_eq!(
            i.mul(j),
            Quaternion {
                negative: false,
                unit: Klein4Element::S3
            }
        );
        assert_eq!(
            j.mul(i),
            Quaternion {
                negative: true,
                unit: Klein4Element::S3
            }
        );
        assert_eq!(minus_one.mul(minus_one), one);
    }

    #[test]
    fn lifts_to_sl2_generate_q8() {
        let i = CycNumber::root_of_unity(4, 1);
        let lift1 =
            ProjMatrix::new([[i.clone(), CycNumber::zero()], [CycNumber::zero(), -&i]]).unwrap();
        let lift2 = ProjMatrix::s2();
        assert_eq!(lift1.det(), CycNumber::one());
        assert_eq!(lift2.det(), CycNumber::one());
        let mut group = vec![ProjMatrix::identity()];
        loop {
            let mut grown = group.clone();
            for x in &group {
                for g in [&lift1, &lift2] {
                    let y = x.mul(g);
                    if !grown.contains(&y) {
                        grown.push(y);
                    }
                }
            }
            if grown.len() == group.len() {
                break;
            }
            group = grown;
        }
        assert_eq!(group.len(), ComponentGroup::Q8.order());
        let minus = ProjMatrix::from_ints([[-1, 0], [0, -1]]).unwrap();
        assert_eq!(lift1.mul(&lift1), minus);
        assert_eq!(lift1.mul(&lift2), minus.mul(&lift2.mul(&lift1)));
    }

    #[test]
    fn parse_and_display() {
        for s in Klein4Element::ALL {
            assert_eq!(s.to_string().parse::<Klein4Element>(), Ok(s));
        }
        assert!("s4".parse::<Klein4Element>().is_err());
    }
}
