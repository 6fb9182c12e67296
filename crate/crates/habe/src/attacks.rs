//! Key-recovery attacks against the scheme's key delegation, and universal
//! decryption with the recovered material.
//!
//! The identity key hands every user the domain's Q-tuple prefix together
//! with mk_u·Q_i, and mk_u = H_A(PK_u) is publicly computable, so any user
//! can unmask Q_i. From there:
//!
//! * with a single attribute key, H_dm(PK_a)·(mk_i·mk_u·P₀) equals the blind
//!   mk_i·mk_u·P_a exactly, and subtracting it exposes SK_i;
//! * with two attribute keys for the same domain, the difference of the keys
//!   is (H_dm(PK_{a1}) − H_dm(PK_{a2}))·(mk_i·mk_u·P₀), which the known
//!   oracle values invert back to the blind of the first key.
//!
//! A recovered SK_i decrypts *every* ciphertext whose clause routes through
//! the domain, because the pad source ê(Q₀, r·n_A·P₁) telescopes into
//! ê(n_A·U₀, SK_i)·Π_j ê(−n_A·Q_j, U_{(j+1)}) — all quantities the holder of
//! this struct knows.
//!
//! Everything here consumes only public system values, public oracle
//! evaluations and the adversary's own issued keys. The module deliberately
//! never touches root or domain master-key types; white-box comparisons
//! against ground truth live in test code.

use num_bigint::BigUint;

use crate::curve::G1Point;
use crate::error::{Error, Result};
use crate::oracles::{h2_bytes, h_a_scalar, h_dm_scalar};
use crate::pairing::pairing;
use crate::scheme::{xor_bytes, Ciphertext, UserAttributeKey, UserIdentityKey};

/// Domain master-key material reconstructed by an adversary: the domain's
/// SK_i plus the full Q-tuple (prefix from the identity key, last entry
/// unmasked). The path identifies which ciphertext clauses it opens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveredDomainKey {
    pub domain_public_key: Vec<u8>,
    pub domain_path: Vec<Vec<u8>>,
    pub sk: G1Point,
    pub q_tuple: Vec<G1Point>,
}

impl RecoveredDomainKey {
    /// Digest of the recovered material, for transcripts and reports.
    pub fn digest(&self) -> [u8; 32] {
        let mut input = crate::xof::XofInput::new().field(0x52, &self.domain_public_key);
        for pk in &self.domain_path {
            input = input.field(0x53, pk);
        }
        input = input.field(0x54, &point_bytes(&self.sk));
        for q in &self.q_tuple {
            input = input.field(0x55, &point_bytes(q));
        }
        input.digest()
    }
}

fn point_bytes(p: &G1Point) -> Vec<u8> {
    match p.coords() {
        None => b"infinity".to_vec(),
        Some((x, y)) => {
            let mut out = x.value().to_bytes_be();
            out.push(b',');
            out.extend(y.value().to_bytes_be());
            out
        }
    }
}

/// Strip the user blind from the identity key's last component:
/// mk_u⁻¹ · (mk_u·Q_i) = Q_i.
pub fn unmask_q(identity: &UserIdentityKey) -> Result<G1Point> {
    let ctx = identity.masked_q.modulus().clone();
    let mk_u = h_a_scalar(&ctx, &identity.user_public_key);
    let inverse = mk_u.inv()?; // nonzero by oracle construction
    Ok(identity.masked_q.scalar_mul(inverse.value()))
}

fn full_q_tuple(identity: &UserIdentityKey) -> Result<Vec<G1Point>> {
    let mut q_tuple = identity.q_tuple_prefix.clone();
    q_tuple.push(unmask_q(identity)?);
    Ok(q_tuple)
}

fn check_same_issuer(identity: &UserIdentityKey, attr_key: &UserAttributeKey) -> Result<()> {
    if identity.domain_path != attr_key.domain_path {
        return Err(Error::MixedDomainKeys);
    }
    Ok(())
}

/// Outcome of the single-key attack, with the intermediate values a
/// transcript wants to show.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingleKeyRecovery {
    pub recovered: RecoveredDomainKey,
    /// The reconstructed blind mk_i·mk_u·P_a that was subtracted.
    pub attr_blind: G1Point,
    pub unmasked_q: G1Point,
}

/// Recover the domain secret from one identity key and one attribute key:
/// SK_i = key_a − H_dm(PK_a)·(mk_i·mk_u·P₀).
pub fn attack1_recover(
    identity: &UserIdentityKey,
    attr_key: &UserAttributeKey,
) -> Result<SingleKeyRecovery> {
    check_same_issuer(identity, attr_key)?;
    let ctx = identity.masked_q.modulus().clone();
    let domain_pk = identity.domain_public_key();

    let oracle = h_dm_scalar(&ctx, domain_pk, &attr_key.attribute.public_key);
    let attr_blind = identity.masked_q.scalar_mul(oracle.value());
    let sk = attr_key.key.sub(&attr_blind)?;

    Ok(SingleKeyRecovery {
        recovered: RecoveredDomainKey {
            domain_public_key: domain_pk.to_vec(),
            domain_path: identity.domain_path.clone(),
            sk,
            q_tuple: full_q_tuple(identity)?,
        },
        attr_blind,
        unmasked_q: unmask_q(identity)?,
    })
}

/// Outcome of the two-key attack with its intermediates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPairRecovery {
    pub recovered: RecoveredDomainKey,
    /// B = key₁ − key₂ = mk_i·mk_u·(P_{a1} − P_{a2}).
    pub key_difference: G1Point,
    /// C = h₁·(h₁ − h₂)⁻¹·B = mk_i·mk_u·P_{a1}.
    pub attr_blind: G1Point,
    pub unmasked_q: G1Point,
}

/// Recover the domain secret from two attribute keys of the same user and
/// domain, without consulting the masked Q entry for the blind itself.
pub fn attack2_recover(
    identity: &UserIdentityKey,
    first: &UserAttributeKey,
    second: &UserAttributeKey,
) -> Result<KeyPairRecovery> {
    check_same_issuer(identity, first)?;
    check_same_issuer(identity, second)?;
    if first.attribute.public_key == second.attribute.public_key {
        return Err(Error::InvalidInput(
            "the two attribute keys must cover distinct attributes".into(),
        ));
    }
    let ctx = identity.masked_q.modulus().clone();
    let domain_pk = identity.domain_public_key();

    let h1 = h_dm_scalar(&ctx, domain_pk, &first.attribute.public_key);
    let h2 = h_dm_scalar(&ctx, domain_pk, &second.attribute.public_key);
    if h1 == h2 {
        return Err(Error::OracleCollision);
    }

    let key_difference = first.key.sub(&second.key)?;
    let gap_inverse = h1.sub(&h2)?.inv()?;
    let attr_blind = key_difference.scalar_mul(h1.mul(&gap_inverse)?.value());
    let sk = first.key.sub(&attr_blind)?;

    Ok(KeyPairRecovery {
        recovered: RecoveredDomainKey {
            domain_public_key: domain_pk.to_vec(),
            domain_path: identity.domain_path.clone(),
            sk,
            q_tuple: full_q_tuple(identity)?,
        },
        key_difference,
        attr_blind,
        unmasked_q: unmask_q(identity)?,
    })
}

/// Decrypt an arbitrary ciphertext with a recovered domain key, regardless
/// of which attributes anyone holds:
/// M = V ⊕ H₂(ê(n_A·U₀, SK_i) · Π_{j=1}^{t−1} ê(−n_A·Q_j, U_{(j+1)})).
///
/// The recovered domain must match the clause path of some clause exactly
/// (lowest such clause is used); a first-level recovered key needs no path
/// components and opens every ciphertext of the system.
pub fn universal_decrypt(ct: &Ciphertext, recovered: &RecoveredDomainKey) -> Result<Vec<u8>> {
    let n_a: BigUint = ct.structure.n_a().clone();
    let matching = ct
        .clauses
        .iter()
        .find(|clause| clause.domain_path == recovered.domain_path);

    let u_path: &[G1Point] = match matching {
        Some(clause) => &clause.u_path,
        None => {
            let is_first_level = recovered.domain_path.len() == 1
                && ct
                    .clauses
                    .iter()
                    .all(|c| c.domain_path.first() == Some(&recovered.domain_public_key));
            if !is_first_level {
                return Err(Error::NoMatchingClause);
            }
            &[]
        }
    };
    if recovered.q_tuple.len() < u_path.len() + 1 {
        return Err(Error::InvalidInput("Q-tuple shorter than the path".into()));
    }

    let mut pad_source = pairing(&ct.u0.scalar_mul(&n_a), &recovered.sk)?;
    for (j, u_component) in u_path.iter().enumerate() {
        // u_path[j] = U_{(j+2)}; its partner is Q_{j+1}
        let q_entry = &recovered.q_tuple[j + 1];
        let term = pairing(&q_entry.neg().scalar_mul(&n_a), u_component)?;
        pad_source = pad_source.mul(&term)?;
    }

    let pad = h2_bytes(&pad_source, ct.n_bits());
    Ok(xor_bytes(&ct.v, &pad))
}
