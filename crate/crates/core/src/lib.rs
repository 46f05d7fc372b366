//! Exact character values of the depth-zero supercuspidal L-packets of
//! `SL_2(Q_p)`, the transfer factors of their elliptic endoscopic data, and
//! checks of the resulting character identities.
//!
//! Field elements are `Q_p` truncated at `p^N`; character values live in
//! cyclotomic fields and are compared exactly.

pub mod charformulas;
pub mod cyclotomic;
pub mod endoscopy;
pub mod error;
pub mod localfield;
pub mod packets;
pub mod residue;
pub mod sweep;
pub mod torus;

pub use charformulas::{CharacterEngine, PacketSpec, RegularMember};
pub use cyclotomic::CycNumber;
pub use endoscopy::{
    falsify_adss152, transfer_factor, verify_identity, EndoscopicDatum, Verdict, VerificationReport,
};
pub use error::{Error, Result};
pub use localfield::{FieldConfig, PadicNumber};
pub use packets::Klein4Element;
pub use residue::{CharacterLevel, NormOneGroup, ResTorusPoint};
pub use torus::{sample_regular, Classification, LieElement, TorusElement, TorusVariant};
