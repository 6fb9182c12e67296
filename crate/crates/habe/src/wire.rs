//! Canonical JSON documents for every key, ciphertext and registry type.
//!
//! Integers serialize as lowercase big-endian hex with no leading zeros
//! (except `"0"`); byte strings (public keys, message blocks) as fixed-width
//! lowercase hex; points as `{"x": …, "y": …}` or the literal string
//! `"infinity"`. Every document carries the format tag `habe-v1` and a
//! `kind` discriminator. Deserialization revalidates everything it can:
//! format, modulus primality, curve membership, structural lengths.

use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::curve::G1Point;
use crate::error::{Error, Result};
use crate::field::PrimeModulus;
use crate::pairing::PairingParams;
use crate::policy::{AccessStructure, AttributeId, ConjunctionClause, Registry};
use crate::scheme::{
    Ciphertext, CiphertextClause, DomainMasterKey, RootMasterKey, SystemParams, UserAttributeKey,
    UserIdentityKey,
};

pub const FORMAT: &str = "habe-v1";

pub const KIND_PARAMS: &str = "params";
pub const KIND_ROOT_KEY: &str = "root-master-key";
pub const KIND_DOMAIN_KEY: &str = "domain-master-key";
pub const KIND_IDENTITY_KEY: &str = "user-identity-key";
pub const KIND_ATTRIBUTE_KEY: &str = "user-attribute-key";
pub const KIND_CIPHERTEXT: &str = "ciphertext";
pub const KIND_REGISTRY: &str = "registry";

/// Canonical integer hex: lowercase, big-endian, no leading zeros.
pub fn int_to_hex(value: &BigUint) -> String {
    value.to_str_radix(16)
}

pub fn int_from_hex(s: &str) -> Result<BigUint> {
    let canonical = !s.is_empty()
        && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
        && (s == "0" || !s.starts_with('0'));
    if !canonical {
        return Err(Error::MalformedDocument(format!(
            "`{s}` is not canonical integer hex"
        )));
    }
    BigUint::parse_bytes(s.as_bytes(), 16)
        .ok_or_else(|| Error::MalformedDocument(format!("unparseable integer `{s}`")))
}

/// Byte-string hex: fixed width, leading zeros preserved.
pub fn bytes_to_hex(bytes: &[u8]) -> String {
    hex::encode(bytes)
}

pub fn bytes_from_hex(s: &str) -> Result<Vec<u8>> {
    hex::decode(s).map_err(|e| Error::MalformedDocument(format!("bad byte hex: {e}")))
}

fn check_header(format: &str, kind: &str, expected_kind: &str) -> Result<()> {
    if format != FORMAT {
        return Err(Error::WrongVersion(format.to_string()));
    }
    if kind != expected_kind {
        return Err(Error::MalformedDocument(format!(
            "expected kind `{expected_kind}`, found `{kind}`"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ModulusDoc {
    pub p: String,
    pub q: String,
    pub h: String,
}

impl ModulusDoc {
    pub fn from_modulus(m: &PrimeModulus) -> Self {
        Self {
            p: int_to_hex(m.p()),
            q: int_to_hex(m.q()),
            h: int_to_hex(m.h()),
        }
    }

    /// Revalidates primality and the cofactor relation.
    pub fn to_modulus(&self) -> Result<Arc<PrimeModulus>> {
        Ok(Arc::new(PrimeModulus::new(
            int_from_hex(&self.p)?,
            int_from_hex(&self.q)?,
            int_from_hex(&self.h)?,
        )?))
    }
}

/// `{"x": …, "y": …}` or the string `"infinity"`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum PointDoc {
    Infinity(String),
    Coords { x: String, y: String },
}

impl PointDoc {
    pub fn from_point(p: &G1Point) -> Self {
        match p.coords() {
            None => PointDoc::Infinity("infinity".to_string()),
            Some((x, y)) => PointDoc::Coords {
                x: int_to_hex(x.value()),
                y: int_to_hex(y.value()),
            },
        }
    }

    pub fn to_point(&self, ctx: &Arc<PrimeModulus>) -> Result<G1Point> {
        match self {
            PointDoc::Infinity(tag) if tag == "infinity" => Ok(G1Point::infinity(ctx.clone())),
            PointDoc::Infinity(tag) => Err(Error::MalformedDocument(format!(
                "unexpected point literal `{tag}`"
            ))),
            PointDoc::Coords { x, y } => {
                G1Point::new(ctx.clone(), int_from_hex(x)?, int_from_hex(y)?)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ParamsDoc {
    pub format: String,
    pub kind: String,
    pub modulus: ModulusDoc,
    pub n_bits: usize,
    pub p0: PointDoc,
    pub q0: PointDoc,
}

impl ParamsDoc {
    pub fn from_params(params: &SystemParams) -> Self {
        Self {
            format: FORMAT.to_string(),
            kind: KIND_PARAMS.to_string(),
            modulus: ModulusDoc::from_modulus(params.modulus()),
            n_bits: params.n_bits(),
            p0: PointDoc::from_point(params.generator()),
            q0: PointDoc::from_point(params.q0()),
        }
    }

    pub fn to_params(&self) -> Result<SystemParams> {
        check_header(&self.format, &self.kind, KIND_PARAMS)?;
        let ctx = self.modulus.to_modulus()?;
        let p0 = self.p0.to_point(&ctx)?;
        let pairing = PairingParams::from_parts(ctx.clone(), p0)?;
        let q0 = self.q0.to_point(&ctx)?;
        SystemParams::new(pairing, q0, self.n_bits)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RootKeyDoc {
    pub format: String,
    pub kind: String,
    pub params: ParamsDoc,
    pub mk0: String,
}

impl RootKeyDoc {
    pub fn from_key(params: &SystemParams, key: &RootMasterKey) -> Self {
        Self {
            format: FORMAT.to_string(),
            kind: KIND_ROOT_KEY.to_string(),
            params: ParamsDoc::from_params(params),
            mk0: int_to_hex(key.mk0().value()),
        }
    }

    pub fn to_key(&self) -> Result<(SystemParams, RootMasterKey)> {
        check_header(&self.format, &self.kind, KIND_ROOT_KEY)?;
        let params = self.params.to_params()?;
        let mk0 = params.modulus().zq(int_from_hex(&self.mk0)?);
        let key = RootMasterKey::new(mk0)?;
        if &params.generator().scalar_mul(key.mk0().value()) != params.q0() {
            return Err(Error::MalformedDocument("mk0 does not match Q0".into()));
        }
        Ok((params, key))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct DomainKeyDoc {
    pub format: String,
    pub kind: String,
    pub params: ParamsDoc,
    pub level: usize,
    pub public_key: String,
    pub mk: String,
    pub sk: PointDoc,
    pub q_tuple: Vec<PointDoc>,
    pub path: Vec<String>,
}

impl DomainKeyDoc {
    pub fn from_key(params: &SystemParams, key: &DomainMasterKey) -> Self {
        Self {
            format: FORMAT.to_string(),
            kind: KIND_DOMAIN_KEY.to_string(),
            params: ParamsDoc::from_params(params),
            level: key.level(),
            public_key: bytes_to_hex(key.public_key()),
            mk: int_to_hex(key.mk().value()),
            sk: PointDoc::from_point(key.sk()),
            q_tuple: key.q_tuple().iter().map(PointDoc::from_point).collect(),
            path: key.path().iter().map(|p| bytes_to_hex(p)).collect(),
        }
    }

    pub fn to_key(&self) -> Result<(SystemParams, DomainMasterKey)> {
        check_header(&self.format, &self.kind, KIND_DOMAIN_KEY)?;
        let params = self.params.to_params()?;
        let ctx = params.modulus();
        let key = DomainMasterKey::from_parts(
            self.level,
            bytes_from_hex(&self.public_key)?,
            ctx.zq(int_from_hex(&self.mk)?),
            self.sk.to_point(ctx)?,
            self.q_tuple
                .iter()
                .map(|p| p.to_point(ctx))
                .collect::<Result<_>>()?,
            self.path
                .iter()
                .map(|p| bytes_from_hex(p))
                .collect::<Result<_>>()?,
        )?;
        Ok((params, key))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct IdentityKeyDoc {
    pub format: String,
    pub kind: String,
    pub modulus: ModulusDoc,
    pub user_public_key: String,
    pub domain_path: Vec<String>,
    pub q_tuple_prefix: Vec<PointDoc>,
    pub masked_q: PointDoc,
}

impl IdentityKeyDoc {
    pub fn from_key(key: &UserIdentityKey) -> Self {
        Self {
            format: FORMAT.to_string(),
            kind: KIND_IDENTITY_KEY.to_string(),
            modulus: ModulusDoc::from_modulus(key.masked_q.modulus()),
            user_public_key: bytes_to_hex(&key.user_public_key),
            domain_path: key.domain_path.iter().map(|p| bytes_to_hex(p)).collect(),
            q_tuple_prefix: key
                .q_tuple_prefix
                .iter()
                .map(PointDoc::from_point)
                .collect(),
            masked_q: PointDoc::from_point(&key.masked_q),
        }
    }

    pub fn to_key(&self) -> Result<UserIdentityKey> {
        check_header(&self.format, &self.kind, KIND_IDENTITY_KEY)?;
        let ctx = self.modulus.to_modulus()?;
        if self.domain_path.is_empty() || self.domain_path.len() != self.q_tuple_prefix.len() {
            return Err(Error::MalformedDocument(
                "domain path and Q-tuple prefix lengths disagree".into(),
            ));
        }
        Ok(UserIdentityKey {
            user_public_key: bytes_from_hex(&self.user_public_key)?,
            domain_path: self
                .domain_path
                .iter()
                .map(|p| bytes_from_hex(p))
                .collect::<Result<_>>()?,
            q_tuple_prefix: self
                .q_tuple_prefix
                .iter()
                .map(|p| p.to_point(&ctx))
                .collect::<Result<_>>()?,
            masked_q: self.masked_q.to_point(&ctx)?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct AttributeRefDoc {
    pub name: String,
    pub public_key: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct AttributeKeyDoc {
    pub format: String,
    pub kind: String,
    pub modulus: ModulusDoc,
    pub attribute: AttributeRefDoc,
    pub domain_path: Vec<String>,
    pub key: PointDoc,
}

impl AttributeKeyDoc {
    pub fn from_key(key: &UserAttributeKey) -> Self {
        Self {
            format: FORMAT.to_string(),
            kind: KIND_ATTRIBUTE_KEY.to_string(),
            modulus: ModulusDoc::from_modulus(key.key.modulus()),
            attribute: AttributeRefDoc {
                name: key.attribute.name.clone(),
                public_key: bytes_to_hex(&key.attribute.public_key),
            },
            domain_path: key.domain_path.iter().map(|p| bytes_to_hex(p)).collect(),
            key: PointDoc::from_point(&key.key),
        }
    }

    pub fn to_key(&self) -> Result<UserAttributeKey> {
        check_header(&self.format, &self.kind, KIND_ATTRIBUTE_KEY)?;
        let ctx = self.modulus.to_modulus()?;
        if self.domain_path.is_empty() {
            return Err(Error::MalformedDocument("empty domain path".into()));
        }
        Ok(UserAttributeKey {
            attribute: AttributeId {
                name: self.attribute.name.clone(),
                public_key: bytes_from_hex(&self.attribute.public_key)?,
            },
            domain_path: self
                .domain_path
                .iter()
                .map(|p| bytes_from_hex(p))
                .collect::<Result<_>>()?,
            key: self.key.to_point(&ctx)?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CiphertextClauseDoc {
    pub attributes: Vec<AttributeRefDoc>,
    pub domain_id: String,
    pub domain_path: Vec<String>,
    pub u_path: Vec<PointDoc>,
    pub u_attrs: PointDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CiphertextDoc {
    pub format: String,
    pub kind: String,
    pub modulus: ModulusDoc,
    pub policy: String,
    pub registry_digest: String,
    pub v: String,
    pub u0: PointDoc,
    pub clauses: Vec<CiphertextClauseDoc>,
}

impl CiphertextDoc {
    pub fn from_ciphertext(ct: &Ciphertext) -> Self {
        Self {
            format: FORMAT.to_string(),
            kind: KIND_CIPHERTEXT.to_string(),
            modulus: ModulusDoc::from_modulus(ct.u0.modulus()),
            policy: ct.structure.text().to_string(),
            registry_digest: bytes_to_hex(&ct.registry_digest),
            v: bytes_to_hex(&ct.v),
            u0: PointDoc::from_point(&ct.u0),
            clauses: ct
                .structure
                .clauses()
                .iter()
                .zip(&ct.clauses)
                .map(|(clause, data)| CiphertextClauseDoc {
                    attributes: clause
                        .attributes
                        .iter()
                        .map(|a| AttributeRefDoc {
                            name: a.name.clone(),
                            public_key: bytes_to_hex(&a.public_key),
                        })
                        .collect(),
                    domain_id: clause.domain_id.clone(),
                    domain_path: data.domain_path.iter().map(|p| bytes_to_hex(p)).collect(),
                    u_path: data.u_path.iter().map(PointDoc::from_point).collect(),
                    u_attrs: PointDoc::from_point(&data.u_attrs),
                })
                .collect(),
        }
    }

    pub fn to_ciphertext(&self) -> Result<Ciphertext> {
        check_header(&self.format, &self.kind, KIND_CIPHERTEXT)?;
        let ctx = self.modulus.to_modulus()?;
        let mut structure_clauses = Vec::with_capacity(self.clauses.len());
        let mut data_clauses = Vec::with_capacity(self.clauses.len());
        for clause in &self.clauses {
            if clause.domain_path.len() != clause.u_path.len() + 1 {
                return Err(Error::MalformedDocument(
                    "clause path components do not match the domain depth".into(),
                ));
            }
            structure_clauses.push(ConjunctionClause {
                attributes: clause
                    .attributes
                    .iter()
                    .map(|a| {
                        Ok(AttributeId {
                            name: a.name.clone(),
                            public_key: bytes_from_hex(&a.public_key)?,
                        })
                    })
                    .collect::<Result<_>>()?,
                domain_id: clause.domain_id.clone(),
            });
            data_clauses.push(CiphertextClause {
                domain_path: clause
                    .domain_path
                    .iter()
                    .map(|p| bytes_from_hex(p))
                    .collect::<Result<_>>()?,
                u_path: clause
                    .u_path
                    .iter()
                    .map(|p| p.to_point(&ctx))
                    .collect::<Result<_>>()?,
                u_attrs: clause.u_attrs.to_point(&ctx)?,
            });
        }
        let structure = AccessStructure::from_clauses(structure_clauses)?;
        if structure.text() != self.policy {
            return Err(Error::MalformedDocument(
                "policy text does not match the embedded clauses".into(),
            ));
        }
        let digest_bytes = bytes_from_hex(&self.registry_digest)?;
        let registry_digest: [u8; 32] = digest_bytes
            .try_into()
            .map_err(|_| Error::MalformedDocument("registry digest must be 32 bytes".into()))?;
        Ok(Ciphertext {
            structure,
            registry_digest,
            v: bytes_from_hex(&self.v)?,
            u0: self.u0.to_point(&ctx)?,
            clauses: data_clauses,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RegistryDomainDoc {
    pub id: String,
    pub public_key: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RegistryAttributeDoc {
    pub name: String,
    pub public_key: String,
    pub domain: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RegistryAuthorizationDoc {
    pub user_public_key: String,
    pub attributes: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RegistryDoc {
    pub format: String,
    pub kind: String,
    pub domains: Vec<RegistryDomainDoc>,
    pub attributes: Vec<RegistryAttributeDoc>,
    #[serde(default)]
    pub authorizations: Vec<RegistryAuthorizationDoc>,
}

impl RegistryDoc {
    pub fn from_registry(registry: &Registry) -> Self {
        Self {
            format: FORMAT.to_string(),
            kind: KIND_REGISTRY.to_string(),
            domains: registry
                .domains()
                .map(|d| RegistryDomainDoc {
                    id: d.id.clone(),
                    public_key: bytes_to_hex(&d.public_key),
                    parent: d.parent.clone(),
                })
                .collect(),
            attributes: registry
                .attributes()
                .map(|a| RegistryAttributeDoc {
                    name: a.name.clone(),
                    public_key: bytes_to_hex(&a.public_key),
                    domain: a.domain_id.clone(),
                })
                .collect(),
            authorizations: registry
                .authorizations()
                .map(|(user, attrs)| RegistryAuthorizationDoc {
                    user_public_key: bytes_to_hex(user),
                    attributes: attrs.iter().cloned().collect(),
                })
                .collect(),
        }
    }

    pub fn to_registry(&self) -> Result<Registry> {
        check_header(&self.format, &self.kind, KIND_REGISTRY)?;
        let mut registry = Registry::new();
        for d in &self.domains {
            registry.add_domain(d.id.clone(), bytes_from_hex(&d.public_key)?, d.parent.clone())?;
        }
        for a in &self.attributes {
            registry.add_attribute(a.name.clone(), bytes_from_hex(&a.public_key)?, a.domain.clone())?;
        }
        for auth in &self.authorizations {
            let user = bytes_from_hex(&auth.user_public_key)?;
            for attr in &auth.attributes {
                registry.authorize(&user, attr.clone());
            }
        }
        registry.validate()?;
        Ok(registry)
    }
}

/// Pretty-printed JSON with a trailing newline; field order is fixed by the
/// document structs, so equal values always serialize to equal bytes.
pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

pub fn from_json<'a, T: Deserialize<'a>>(s: &'a str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::MalformedDocument(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::Preset;
    use crate::policy::parse;
    use crate::scheme::test_support::{random_message, toy_fixture, USER_PK};
    use crate::scheme::{create_user, encrypt};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn integer_hex_is_canonical() {
        assert_eq!(int_to_hex(&BigUint::from(0u32)), "0");
        assert_eq!(int_to_hex(&BigUint::from(255u32)), "ff");
        assert_eq!(int_from_hex("ff").unwrap(), BigUint::from(255u32));
        assert_eq!(int_from_hex("0").unwrap(), BigUint::from(0u32));
        for bad in ["", "0f", "FF", "0x1", "g1"] {
            assert!(int_from_hex(bad).is_err(), "accepted `{bad}`");
        }
    }

    #[test]
    fn params_round_trip() {
        let (params, root) = crate::scheme::setup(&Preset::Toy, 256, b"wire").unwrap();
        let doc = ParamsDoc::from_params(&params);
        let json = to_json(&doc);
        let back: ParamsDoc = from_json(&json).unwrap();
        assert_eq!(back.to_params().unwrap(), params);

        let key_doc = RootKeyDoc::from_key(&params, &root);
        let (p2, r2) = from_json::<RootKeyDoc>(&to_json(&key_doc))
            .unwrap()
            .to_key()
            .unwrap();
        assert_eq!(p2, params);
        assert_eq!(r2, root);
    }

    #[test]
    fn ciphertext_round_trip_and_tampering() {
        let mut rng = ChaCha20Rng::from_seed([9u8; 32]);
        let f = toy_fixture(&mut rng);
        let structure = parse("(a1&a2)|(a3&a4)", &f.registry).unwrap();
        let message = random_message(&f.params, &mut rng);
        let ct = encrypt(&f.params, &message, &structure, &f.registry, &mut rng).unwrap();

        let json = to_json(&CiphertextDoc::from_ciphertext(&ct));
        let back = from_json::<CiphertextDoc>(&json)
            .unwrap()
            .to_ciphertext()
            .unwrap();
        assert_eq!(back, ct);

        // determinism: re-serializing gives identical bytes
        assert_eq!(json, to_json(&CiphertextDoc::from_ciphertext(&back)));

        // truncated document
        assert!(matches!(
            from_json::<CiphertextDoc>(&json[..json.len() / 2]),
            Err(Error::MalformedDocument(_))
        ));

        // a point moved off the curve fails validation
        let mut doc: CiphertextDoc = from_json(&json).unwrap();
        if let PointDoc::Coords { x, .. } = &mut doc.u0 {
            *x = int_to_hex(&(int_from_hex(x).unwrap() + 1u32));
        }
        assert!(matches!(
            doc.to_ciphertext(),
            Err(Error::OffCurvePoint) | Err(Error::MalformedDocument(_))
        ));

        // wrong version tag
        let mut doc: CiphertextDoc = from_json(&json).unwrap();
        doc.format = "habe-v0".into();
        assert_eq!(doc.to_ciphertext(), Err(Error::WrongVersion("habe-v0".into())));
    }

    #[test]
    fn key_documents_round_trip() {
        let mut rng = ChaCha20Rng::from_seed([10u8; 32]);
        let f = toy_fixture(&mut rng);
        let (identity, attr_key) =
            create_user(&f.params, &f.dm3, USER_PK, "a1", &f.registry).unwrap();

        let id_doc = IdentityKeyDoc::from_key(&identity);
        assert_eq!(
            from_json::<IdentityKeyDoc>(&to_json(&id_doc))
                .unwrap()
                .to_key()
                .unwrap(),
            identity
        );

        let ak_doc = AttributeKeyDoc::from_key(&attr_key);
        assert_eq!(
            from_json::<AttributeKeyDoc>(&to_json(&ak_doc))
                .unwrap()
                .to_key()
                .unwrap(),
            attr_key
        );

        let dm_doc = DomainKeyDoc::from_key(&f.params, &f.dm3);
        let (params_back, dm_back) = from_json::<DomainKeyDoc>(&to_json(&dm_doc))
            .unwrap()
            .to_key()
            .unwrap();
        assert_eq!(params_back, f.params);
        assert_eq!(dm_back, f.dm3);
    }

    #[test]
    fn registry_round_trip() {
        let mut rng = ChaCha20Rng::from_seed([11u8; 32]);
        let f = toy_fixture(&mut rng);
        let doc = RegistryDoc::from_registry(&f.registry);
        let back = from_json::<RegistryDoc>(&to_json(&doc))
            .unwrap()
            .to_registry()
            .unwrap();
        assert_eq!(back, f.registry);
        assert_eq!(back.digest(), f.registry.digest());
    }

    #[test]
    fn infinity_literal_is_strict() {
        let (params, _) = crate::scheme::setup(&Preset::Toy, 256, b"wire-inf").unwrap();
        let ctx = params.modulus();
        let inf = PointDoc::Infinity("infinity".into());
        assert!(inf.to_point(ctx).unwrap().is_infinity());
        let bogus = PointDoc::Infinity("INFINITY".into());
        assert!(matches!(
            bogus.to_point(ctx),
            Err(Error::MalformedDocument(_))
        ));
    }
}
