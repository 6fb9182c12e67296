//! DNF access structures and the attribute/domain registry.
//!
//! Policy grammar (whitespace insignificant):
//!
//! ```text
//! policy := clause ('|' clause)*
//! clause := '(' attr ('&' attr)* ')' | attr
//! attr   := [A-Za-z0-9_]+
//! ```
//!
//! A clause is a conjunction over attributes that must all be administered
//! by a single domain authority; the policy is the disjunction of its
//! clauses. `n_A` is the least common multiple of the clause sizes and feeds
//! the exponents used by encryption and decryption.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// A registered attribute: token name plus its public key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeId {
    pub name: String,
    pub public_key: Vec<u8>,
}

/// One conjunction clause: an ordered duplicate-free attribute set, all
/// administered by `domain_id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjunctionClause {
    pub attributes: Vec<AttributeId>,
    pub domain_id: String,
}

impl ConjunctionClause {
    pub fn size(&self) -> usize {
        self.attributes.len()
    }

    pub fn attribute_names(&self) -> impl Iterator<Item = &str> {
        self.attributes.iter().map(|a| a.name.as_str())
    }
}

/// A parsed DNF policy with its clause-size LCM and canonical text form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessStructure {
    clauses: Vec<ConjunctionClause>,
    n_a: BigUint,
    text: String,
}

impl AccessStructure {
    pub fn from_clauses(clauses: Vec<ConjunctionClause>) -> Result<Self> {
        if clauses.is_empty() {
            return Err(Error::InvalidInput("policy has no clauses".into()));
        }
        let sizes: Vec<u64> = clauses.iter().map(|c| c.size() as u64).collect();
        let n_a = lcm_of(&sizes)?;
        let text = render(&clauses);
        Ok(Self { clauses, n_a, text })
    }

    pub fn clauses(&self) -> &[ConjunctionClause] {
        &self.clauses
    }

    pub fn n_a(&self) -> &BigUint {
        &self.n_a
    }

    /// Canonical text form; parsing it again yields the same structure.
    pub fn text(&self) -> &str {
        &self.text
    }
}

impl std::fmt::Display for AccessStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.text)
    }
}

fn render(clauses: &[ConjunctionClause]) -> String {
    clauses
        .iter()
        .map(|c| {
            let inner = c
                .attribute_names()
                .collect::<Vec<_>>()
                .join("&");
            format!("({inner})")
        })
        .collect::<Vec<_>>()
        .join("|")
}

/// Exact least common multiple by gcd folding.
pub fn lcm_of(sizes: &[u64]) -> Result<BigUint> {
    if sizes.is_empty() {
        return Err(Error::InvalidInput("lcm of an empty list".into()));
    }
    let mut acc = BigUint::one();
    for &s in sizes {
        if s == 0 {
            return Err(Error::InvalidInput("clause size must be positive".into()));
        }
        let s = BigUint::from(s);
        let g = acc.gcd(&s);
        acc = acc / g * s;
    }
    Ok(acc)
}

/// Smallest clause index whose attribute set is covered by `user_attrs`,
/// or `None` when no clause is satisfied.
pub fn satisfies(user_attrs: &BTreeSet<String>, structure: &AccessStructure) -> Option<usize> {
    structure
        .clauses
        .iter()
        .position(|c| c.attribute_names().all(|a| user_attrs.contains(a)))
}

/// Registered domain authority. `parent` is `None` for the single
/// first-level domain created directly by the root master.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainEntry {
    pub id: String,
    pub public_key: Vec<u8>,
    pub parent: Option<String>,
}

/// Registered attribute with its administering domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeEntry {
    pub name: String,
    pub public_key: Vec<u8>,
    pub domain_id: String,
}

/// The public registry: the domain tree, the attribute universe partitioned
/// among domains, and the per-user authorization lists. Read-only once
/// loaded.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    domains: BTreeMap<String, DomainEntry>,
    attributes: BTreeMap<String, AttributeEntry>,
    authorizations: BTreeMap<Vec<u8>, BTreeSet<String>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_domain(
        &mut self,
        id: impl Into<String>,
        public_key: Vec<u8>,
        parent: Option<String>,
    ) -> Result<()> {
        let id = id.into();
        if self.domains.contains_key(&id) {
            return Err(Error::InvalidRegistry(format!("duplicate domain `{id}`")));
        }
        self.domains.insert(
            id.clone(),
            DomainEntry {
                id,
                public_key,
                parent,
            },
        );
        Ok(())
    }

    pub fn add_attribute(
        &mut self,
        name: impl Into<String>,
        public_key: Vec<u8>,
        domain_id: impl Into<String>,
    ) -> Result<()> {
        let name = name.into();
        if !is_token(&name) {
            return Err(Error::InvalidRegistry(format!(
                "attribute name `{name}` is not a [A-Za-z0-9_]+ token"
            )));
        }
        if self.attributes.contains_key(&name) {
            return Err(Error::InvalidRegistry(format!("duplicate attribute `{name}`")));
        }
        self.attributes.insert(
            name.clone(),
            AttributeEntry {
                name,
                public_key,
                domain_id: domain_id.into(),
            },
        );
        Ok(())
    }

    pub fn authorize(&mut self, user_public_key: &[u8], attribute: impl Into<String>) {
        self.authorizations
            .entry(user_public_key.to_vec())
            .or_default()
            .insert(attribute.into());
    }

    pub fn is_authorized(&self, user_public_key: &[u8], attribute: &str) -> bool {
        self.authorizations
            .get(user_public_key)
            .is_some_and(|s| s.contains(attribute))
    }

    pub fn domains(&self) -> impl Iterator<Item = &DomainEntry> {
        self.domains.values()
    }

    pub fn attributes(&self) -> impl Iterator<Item = &AttributeEntry> {
        self.attributes.values()
    }

    pub fn authorizations(&self) -> impl Iterator<Item = (&Vec<u8>, &BTreeSet<String>)> {
        self.authorizations.iter()
    }

    pub fn attribute(&self, name: &str) -> Result<&AttributeEntry> {
        self.attributes
            .get(name)
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    pub fn domain(&self, id: &str) -> Result<&DomainEntry> {
        self.domains
            .get(id)
            .ok_or_else(|| Error::UnknownDomain(id.to_string()))
    }

    pub fn attributes_of_domain(&self, id: &str) -> Vec<&AttributeEntry> {
        self.attributes
            .values()
            .filter(|a| a.domain_id == id)
            .collect()
    }

    /// The unique first-level domain.
    pub fn first_level_domain(&self) -> Result<&DomainEntry> {
        let mut roots = self.domains.values().filter(|d| d.parent.is_none());
        let root = roots
            .next()
            .ok_or_else(|| Error::InvalidRegistry("no first-level domain".into()))?;
        if roots.next().is_some() {
            return Err(Error::InvalidRegistry(
                "more than one first-level domain".into(),
            ));
        }
        Ok(root)
    }

    /// Domain ids along the unique path from the first-level domain to `id`.
    pub fn domain_path(&self, id: &str) -> Result<Vec<String>> {
        let mut path = vec![];
        let mut cursor = Some(id.to_string());
        while let Some(current) = cursor {
            let entry = self.domain(&current)?;
            path.push(entry.id.clone());
            if path.len() > self.domains.len() {
                return Err(Error::InvalidRegistry("domain parent cycle".into()));
            }
            cursor = entry.parent.clone();
        }
        path.reverse();
        Ok(path)
    }

    /// Public keys along the same path.
    pub fn domain_path_keys(&self, id: &str) -> Result<Vec<Vec<u8>>> {
        self.domain_path(id)?
            .iter()
            .map(|d| Ok(self.domain(d)?.public_key.clone()))
            .collect()
    }

    /// Structural checks: a unique first-level domain, acyclic parent links,
    /// attributes referencing known domains, distinct public keys.
    pub fn validate(&self) -> Result<()> {
        self.first_level_domain()?;
        for d in self.domains.values() {
            self.domain_path(&d.id)?;
            if let Some(parent) = &d.parent {
                self.domain(parent)?;
            }
        }
        let mut keys = BTreeSet::new();
        for d in self.domains.values() {
            if !keys.insert(d.public_key.clone()) {
                return Err(Error::InvalidRegistry(format!(
                    "domain `{}` reuses a public key",
                    d.id
                )));
            }
        }
        for a in self.attributes.values() {
            self.domain(&a.domain_id)?;
            if !keys.insert(a.public_key.clone()) {
                return Err(Error::InvalidRegistry(format!(
                    "attribute `{}` reuses a public key",
                    a.name
                )));
            }
        }
        Ok(())
    }

    /// Digest over a canonical byte rendering of the registry content,
    /// embedded in ciphertexts so a policy is bound to the registry that
    /// resolved it.
    pub fn digest(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        let mut feed = |tag: u8, bytes: &[u8]| {
            hasher.update([tag]);
            hasher.update((bytes.len() as u32).to_be_bytes());
            hasher.update(bytes);
        };
        for d in self.domains.values() {
            feed(b'D', d.id.as_bytes());
            feed(b'K', &d.public_key);
            feed(b'P', d.parent.as_deref().unwrap_or("").as_bytes());
        }
        for a in self.attributes.values() {
            feed(b'A', a.name.as_bytes());
            feed(b'K', &a.public_key);
            feed(b'M', a.domain_id.as_bytes());
        }
        for (user, attrs) in &self.authorizations {
            feed(b'U', user);
            for attr in attrs {
                feed(b'G', attr.as_bytes());
            }
        }
        hasher.finalize().into()
    }
}

fn is_token(s: &str) -> bool {
    !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Parse a DNF policy against the registry, enforcing the per-clause
/// single-domain rule and rejecting duplicate attributes inside a clause.
pub fn parse(policy_text: &str, registry: &Registry) -> Result<AccessStructure> {
    let mut parser = Parser {
        bytes: policy_text.as_bytes(),
        pos: 0,
    };
    let mut clauses = vec![parser.clause(registry)?];
    parser.skip_ws();
    while parser.peek() == Some(b'|') {
        parser.pos += 1;
        clauses.push(parser.clause(registry)?);
        parser.skip_ws();
    }
    if parser.pos != parser.bytes.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    AccessStructure::from_clauses(clauses)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::PolicySyntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self
            .peek()
            .is_some_and(|b| b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn token(&mut self) -> Result<&str> {
        self.skip_ws();
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|b| b.is_ascii_alphanumeric() || b == b'_')
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("expected an attribute name"));
        }
        Ok(std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii token"))
    }

    fn clause(&mut self, registry: &Registry) -> Result<ConjunctionClause> {
        self.skip_ws();
        let parenthesized = self.peek() == Some(b'(');
        if parenthesized {
            self.pos += 1;
        }
        let mut names = vec![self.token()?.to_string()];
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'&') => {
                    self.pos += 1;
                    names.push(self.token()?.to_string());
                }
                Some(b')') if parenthesized => {
                    self.pos += 1;
                    break;
                }
                None if parenthesized => return Err(self.error("unclosed parenthesis")),
                _ if parenthesized => return Err(self.error("expected '&' or ')'")),
                _ => break,
            }
        }

        let mut seen = BTreeSet::new();
        let mut attributes = Vec::with_capacity(names.len());
        let mut domain_id: Option<String> = None;
        for name in names {
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateAttribute(name));
            }
            let entry = registry.attribute(&name)?;
            match &domain_id {
                None => domain_id = Some(entry.domain_id.clone()),
                Some(d) if *d != entry.domain_id => {
                    return Err(Error::MultiDomainClause(d.clone(), entry.domain_id.clone()))
                }
                _ => {}
            }
            attributes.push(AttributeId {
                name: entry.name.clone(),
                public_key: entry.public_key.clone(),
            });
        }
        Ok(ConjunctionClause {
            attributes,
            domain_id: domain_id.expect("clause is non-empty"),
        })
    }
}
