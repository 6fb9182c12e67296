//! Ciphertext-policy hierarchical attribute-based encryption (CP-HABE) over
//! a supersingular pairing, together with the key-recovery attacks that break
//! its key delegation and an indistinguishability-game harness that
//! demonstrates them winning with probability 1.
//!
//! The crate is organized bottom-up:
//!
//! * [`field`] / [`fp2`] — arbitrary-precision residue arithmetic in F_p,
//!   Z_q and F_p².
//! * [`curve`] / [`pairing`] — the curve y² = x³ + x, the symmetric Tate
//!   pairing with distortion map, parameter generation and hash-to-group.
//! * [`oracles`] — the random-oracle suite H₁, H₂, H_A and the per-domain
//!   family H_dm, all built from SHA-256 in counter mode.
//! * [`policy`] — DNF access structures: grammar, parser, satisfaction,
//!   attribute/domain registry.
//! * [`scheme`] — Setup, CreateDM, CreateUser, Encrypt, Decrypt.
//! * [`attacks`] — recovery of a domain master key element from one or two
//!   issued attribute keys, and universal decryption with the result.
//! * [`game`] — the five-phase indistinguishability game with pluggable
//!   adversaries.
//! * [`wire`] — canonical JSON documents for every key, ciphertext and
//!   result type.
//!
//! Parameters are desk-scale demonstrations only and provide no security.
//! With the default `parallel` feature, independent trials (game runs,
//! randomized checks) are distributed over a rayon thread pool; disabling
//! the feature gives a fully sequential build with identical outputs.

pub mod attacks;
pub mod curve;
pub mod error;
pub mod field;
pub mod fp2;
pub mod game;
pub mod oracles;
pub mod pairing;
pub mod policy;
pub mod scheme;
pub mod wire;
mod xof;

pub use crate::attacks::{
    attack1_recover, attack2_recover, universal_decrypt, RecoveredDomainKey,
};
pub use crate::curve::G1Point;
pub use crate::error::{Error, Result};
pub use crate::field::{FpElement, PrimeModulus};
pub use crate::fp2::Fp2Element;
pub use crate::game::{
    attack1_adversary, attack2_adversary, random_adversary, run_game, run_game_sequential,
    Adversary, GameResult,
};
pub use crate::oracles::OracleSuite;
pub use crate::pairing::{hash_to_g1, pairing, GtElement, PairingParams, Preset};
pub use crate::policy::{parse, satisfies, AccessStructure, AttributeId, Registry};
pub use crate::scheme::{
    create_dm, create_user, decrypt, encrypt, setup, Ciphertext, DomainMasterKey, DomainParent,
    RootMasterKey, SystemParams, UserAttributeKey, UserIdentityKey,
};
