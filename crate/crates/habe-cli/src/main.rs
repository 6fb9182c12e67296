//! Command-line front end: setup, key issuance, encryption, decryption, the
//! two key-recovery attacks and the indistinguishability game, all working
//! over the canonical `.habe` JSON documents.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation or parse error,
//! 3 cryptographic contract violation (for example "not authorized").

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::json;
use sha2::{Digest, Sha256};

use habe::wire::{
    self, AttributeKeyDoc, CiphertextDoc, DomainKeyDoc, IdentityKeyDoc, ParamsDoc, RegistryDoc,
    RootKeyDoc,
};
use habe::{
    attack1_recover, attack2_recover, run_game, universal_decrypt, Ciphertext, DomainParent,
    Error, G1Point, Preset, Registry, SystemParams, UserAttributeKey, UserIdentityKey,
};

#[derive(Parser)]
#[command(name = "habe", version, about = "CP-HABE scheme, attacks and game harness")]
struct Cli {
    /// Emit machine-readable JSON instead of human-readable transcripts.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate system parameters and the root master key.
    Setup {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        seed: String,
        /// Output directory for params.habe and rootmk.habe.
        #[arg(long)]
        out: PathBuf,
    },
    /// Create a domain authority under the root master or a parent domain.
    CreateDm {
        /// rootmk.habe or a dm-*.habe file.
        #[arg(long)]
        parent: PathBuf,
        /// Public key of the new domain, as hex bytes.
        #[arg(long)]
        pk: String,
        #[arg(long)]
        out: PathBuf,
        /// Optional seed for reproducible key material; OS randomness
        /// otherwise.
        #[arg(long)]
        seed: Option<String>,
    },
    /// Issue a user's identity and attribute keys for one attribute.
    CreateUser {
        #[arg(long)]
        dm: PathBuf,
        #[arg(long)]
        user_pk: String,
        #[arg(long)]
        attr: String,
        #[arg(long)]
        registry: PathBuf,
        /// Output directory for the two key files.
        #[arg(long)]
        out: PathBuf,
    },
    /// Encrypt a single n-bit message block under a DNF policy.
    Encrypt {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        policy: String,
        #[arg(long)]
        registry: PathBuf,
        /// Message as exactly n/4 hex digits.
        #[arg(long)]
        msg_hex: String,
        #[arg(long)]
        out: PathBuf,
        /// Optional seed for a reproducible ciphertext; OS randomness
        /// otherwise.
        #[arg(long)]
        seed: Option<String>,
    },
    /// Decrypt with an identity key and attribute keys.
    Decrypt {
        #[arg(long)]
        ct: PathBuf,
        #[arg(long)]
        identity: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        attr_keys: Vec<PathBuf>,
    },
    /// Recover the issuing domain's master key element from one attribute
    /// key, then decrypt the ciphertext with it.
    Attack1 {
        #[arg(long)]
        identity: PathBuf,
        #[arg(long)]
        attr_key: PathBuf,
        #[arg(long)]
        ct: PathBuf,
        /// Known plaintext to compare against, for the transcript verdict.
        #[arg(long)]
        expect_hex: Option<String>,
    },
    /// Recover the domain's master key element from two attribute keys.
    Attack2 {
        #[arg(long)]
        identity: PathBuf,
        #[arg(long)]
        attr_key1: PathBuf,
        #[arg(long)]
        attr_key2: PathBuf,
        #[arg(long)]
        ct: PathBuf,
        #[arg(long)]
        expect_hex: Option<String>,
    },
    /// Run the indistinguishability game against a built-in adversary.
    Game {
        #[arg(long, value_enum)]
        adversary: AdversaryKind,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: String,
        #[arg(long, default_value = "small")]
        preset: String,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AdversaryKind {
    Attack1,
    Attack2,
    Random,
}

enum CliError {
    Habe(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Habe(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Habe(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 2,
            CliError::Habe(e) => match e {
                Error::NotAuthorized
                | Error::IssuanceRefused(_)
                | Error::ForeignAttribute(_)
                | Error::MixedDomainKeys
                | Error::OracleCollision
                | Error::NoMatchingClause => 3,
                _ => 2,
            },
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            std::process::exit(1);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Setup { preset, seed, out } => cmd_setup(&preset, &seed, &out, cli.json),
        Command::CreateDm {
            parent,
            pk,
            out,
            seed,
        } => cmd_create_dm(&parent, &pk, &out, seed.as_deref(), cli.json),
        Command::CreateUser {
            dm,
            user_pk,
            attr,
            registry,
            out,
        } => cmd_create_user(&dm, &user_pk, &attr, &registry, &out, cli.json),
        Command::Encrypt {
            params,
            policy,
            registry,
            msg_hex,
            out,
            seed,
        } => cmd_encrypt(&params, &policy, &registry, &msg_hex, &out, seed.as_deref(), cli.json),
        Command::Decrypt {
            ct,
            identity,
            attr_keys,
        } => cmd_decrypt(&ct, &identity, &attr_keys, cli.json),
        Command::Attack1 {
            identity,
            attr_key,
            ct,
            expect_hex,
        } => cmd_attack1(&identity, &attr_key, &ct, expect_hex.as_deref(), cli.json),
        Command::Attack2 {
            identity,
            attr_key1,
            attr_key2,
            ct,
            expect_hex,
        } => cmd_attack2(
            &identity,
            &attr_key1,
            &attr_key2,
            &ct,
            expect_hex.as_deref(),
            cli.json,
        ),
        Command::Game {
            adversary,
            trials,
            seed,
            preset,
        } => cmd_game(adversary, trials, &seed, &preset, cli.json),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
        }
    }
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn parse_preset(name: &str) -> Result<Preset, CliError> {
    Ok(name.parse::<Preset>()?)
}

/// Deterministic randomness for commands run with --seed.
fn seeded_rng(seed: &str) -> ChaCha20Rng {
    let digest: [u8; 32] = Sha256::digest(seed.as_bytes()).into();
    ChaCha20Rng::from_seed(digest)
}

fn rng_from(seed: Option<&str>) -> ChaCha20Rng {
    match seed {
        Some(s) => seeded_rng(s),
        None => ChaCha20Rng::from_rng(rand::thread_rng()).expect("OS randomness available"),
    }
}

fn load_registry(path: &Path) -> Result<Registry, CliError> {
    Ok(wire::from_json::<RegistryDoc>(&read_text(path)?)?.to_registry()?)
}

fn load_params(path: &Path) -> Result<SystemParams, CliError> {
    Ok(wire::from_json::<ParamsDoc>(&read_text(path)?)?.to_params()?)
}

fn load_identity(path: &Path) -> Result<UserIdentityKey, CliError> {
    Ok(wire::from_json::<IdentityKeyDoc>(&read_text(path)?)?.to_key()?)
}

fn load_attr_key(path: &Path) -> Result<UserAttributeKey, CliError> {
    Ok(wire::from_json::<AttributeKeyDoc>(&read_text(path)?)?.to_key()?)
}

fn load_ciphertext(path: &Path) -> Result<Ciphertext, CliError> {
    Ok(wire::from_json::<CiphertextDoc>(&read_text(path)?)?.to_ciphertext()?)
}

fn hex_bytes(s: &str) -> Result<Vec<u8>, CliError> {
    Ok(wire::bytes_from_hex(s)?)
}

const GAME_N_BITS: usize = 256;

fn cmd_setup(preset: &str, seed: &str, out: &Path, json: bool) -> Result<(), CliError> {
    let preset = parse_preset(preset)?;
    let (params, root) = habe::setup(&preset, GAME_N_BITS, seed.as_bytes())?;
    let params_path = out.join("params.habe");
    let root_path = out.join("rootmk.habe");
    write_text(&params_path, &wire::to_json(&ParamsDoc::from_params(&params)))?;
    write_text(&root_path, &wire::to_json(&RootKeyDoc::from_key(&params, &root)))?;
    if json {
        println!(
            "{}",
            json!({
                "params": params_path.display().to_string(),
                "root_master_key": root_path.display().to_string(),
                "preset": preset.name(),
            })
        );
    } else {
        println!("wrote {}", params_path.display());
        println!("wrote {}", root_path.display());
    }
    Ok(())
}

fn cmd_create_dm(
    parent: &Path,
    pk_hex: &str,
    out: &Path,
    seed: Option<&str>,
    json: bool,
) -> Result<(), CliError> {
    let child_pk = hex_bytes(pk_hex)?;
    let text = read_text(parent)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Habe(Error::MalformedDocument(e.to_string())))?;
    let kind = value.get("kind").and_then(|k| k.as_str()).unwrap_or("");
    let mut rng = rng_from(seed);

    let (params, dm) = match kind {
        wire::KIND_ROOT_KEY => {
            let (params, root) = wire::from_json::<RootKeyDoc>(&text)?.to_key()?;
            let dm = habe::create_dm(&params, DomainParent::Root(&root), &child_pk, &mut rng)?;
            (params, dm)
        }
        wire::KIND_DOMAIN_KEY => {
            let (params, parent_dm) = wire::from_json::<DomainKeyDoc>(&text)?.to_key()?;
            let dm = habe::create_dm(&params, DomainParent::Domain(&parent_dm), &child_pk, &mut rng)?;
            (params, dm)
        }
        other => {
            return Err(CliError::Habe(Error::MalformedDocument(format!(
                "parent file must be a root or domain master key, found kind `{other}`"
            ))))
        }
    };
    write_text(out, &wire::to_json(&DomainKeyDoc::from_key(&params, &dm)))?;
    if json {
        println!(
            "{}",
            json!({
                "domain_key": out.display().to_string(),
                "level": dm.level(),
                "public_key": wire::bytes_to_hex(dm.public_key()),
            })
        );
    } else {
        println!("wrote {} (level {})", out.display(), dm.level());
    }
    Ok(())
}

fn short_tag(bytes: &[u8]) -> String {
    let h = wire::bytes_to_hex(bytes);
    h[..h.len().min(8)].to_string()
}

fn cmd_create_user(
    dm_path: &Path,
    user_pk_hex: &str,
    attr: &str,
    registry_path: &Path,
    out: &Path,
    json: bool,
) -> Result<(), CliError> {
    let (params, dm) = wire::from_json::<DomainKeyDoc>(&read_text(dm_path)?)?.to_key()?;
    let registry = load_registry(registry_path)?;
    let user_pk = hex_bytes(user_pk_hex)?;
    let (identity, attr_key) = habe::create_user(&params, &dm, &user_pk, attr, &registry)?;

    let domain_id = registry
        .domains()
        .find(|d| d.public_key == dm.public_key())
        .map(|d| d.id.clone())
        .unwrap_or_else(|| short_tag(dm.public_key()));
    let identity_path = out.join(format!("user-{}-{}.identity.habe", short_tag(&user_pk), domain_id));
    let attr_path = out.join(format!(
        "user-{}-{}-{}.attr.habe",
        short_tag(&user_pk),
        domain_id,
        attr
    ));
    write_text(&identity_path, &wire::to_json(&IdentityKeyDoc::from_key(&identity)))?;
    write_text(&attr_path, &wire::to_json(&AttributeKeyDoc::from_key(&attr_key)))?;
    if json {
        println!(
            "{}",
            json!({
                "identity_key": identity_path.display().to_string(),
                "attribute_key": attr_path.display().to_string(),
                "attribute": attr,
            })
        );
    } else {
        println!("wrote {}", identity_path.display());
        println!("wrote {}", attr_path.display());
    }
    Ok(())
}

fn cmd_encrypt(
    params_path: &Path,
    policy: &str,
    registry_path: &Path,
    msg_hex: &str,
    out: &Path,
    seed: Option<&str>,
    json: bool,
) -> Result<(), CliError> {
    let params = load_params(params_path)?;
    let registry = load_registry(registry_path)?;
    let message = hex_bytes(msg_hex)?;
    let structure = habe::parse(policy, &registry)?;
    let mut rng = rng_from(seed);
    let ct = habe::encrypt(&params, &message, &structure, &registry, &mut rng)?;
    write_text(out, &wire::to_json(&CiphertextDoc::from_ciphertext(&ct)))?;
    if json {
        println!(
            "{}",
            json!({
                "ciphertext": out.display().to_string(),
                "policy": structure.text(),
            })
        );
    } else {
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_decrypt(
    ct_path: &Path,
    identity_path: &Path,
    attr_key_paths: &[PathBuf],
    json: bool,
) -> Result<(), CliError> {
    let ct = load_ciphertext(ct_path)?;
    let identity = load_identity(identity_path)?;
    let attr_keys = attr_key_paths
        .iter()
        .map(|p| load_attr_key(p))
        .collect::<Result<Vec<_>, _>>()?;
    let message = habe::decrypt(&ct, &identity, &attr_keys)?;
    if json {
        println!("{}", json!({ "message_hex": wire::bytes_to_hex(&message) }));
    } else {
        println!("{}", wire::bytes_to_hex(&message));
    }
    Ok(())
}

fn fmt_point(p: &G1Point) -> String {
    match p.coords() {
        None => "infinity".to_string(),
        Some((x, y)) => format!(
            "(x={}, y={})",
            wire::int_to_hex(x.value()),
            wire::int_to_hex(y.value())
        ),
    }
}

fn verdict(plaintext: &[u8], expect_hex: Option<&str>) -> Result<String, CliError> {
    Ok(match expect_hex {
        None => "no expected plaintext provided".to_string(),
        Some(h) => {
            if hex_bytes(h)? == plaintext {
                "match".to_string()
            } else {
                "MISMATCH".to_string()
            }
        }
    })
}

fn cmd_attack1(
    identity_path: &Path,
    attr_key_path: &Path,
    ct_path: &Path,
    expect_hex: Option<&str>,
    json: bool,
) -> Result<(), CliError> {
    let identity = load_identity(identity_path)?;
    let attr_key = load_attr_key(attr_key_path)?;
    let ct = load_ciphertext(ct_path)?;

    let outcome = attack1_recover(&identity, &attr_key)?;
    let plaintext = universal_decrypt(&ct, &outcome.recovered)?;
    let verdict = verdict(&plaintext, expect_hex)?;

    if json {
        println!(
            "{}",
            json!({
                "attack": "attack1",
                "inputs": {
                    "identity_key": identity_path.display().to_string(),
                    "attribute_key": attr_key_path.display().to_string(),
                    "ciphertext": ct_path.display().to_string(),
                    "attribute": attr_key.attribute.name,
                },
                "unmasked_q": fmt_point(&outcome.unmasked_q),
                "attribute_blind": fmt_point(&outcome.attr_blind),
                "recovered_key_digest": wire::bytes_to_hex(&outcome.recovered.digest()),
                "plaintext_hex": wire::bytes_to_hex(&plaintext),
                "verdict": verdict,
            })
        );
    } else {
        println!("attack 1: single-key domain recovery");
        println!("  inputs consumed:");
        println!("    identity key : {}", identity_path.display());
        println!("    attribute key: {} ({})", attr_key_path.display(), attr_key.attribute.name);
        println!("    ciphertext   : {}", ct_path.display());
        println!("  unmasked Q      : {}", fmt_point(&outcome.unmasked_q));
        println!("  blind A         : {}", fmt_point(&outcome.attr_blind));
        println!(
            "  recovered digest: {}",
            wire::bytes_to_hex(&outcome.recovered.digest())
        );
        println!("  plaintext       : {}", wire::bytes_to_hex(&plaintext));
        println!("  verdict         : {verdict}");
    }
    Ok(())
}

fn cmd_attack2(
    identity_path: &Path,
    attr_key1_path: &Path,
    attr_key2_path: &Path,
    ct_path: &Path,
    expect_hex: Option<&str>,
    json: bool,
) -> Result<(), CliError> {
    let identity = load_identity(identity_path)?;
    let key1 = load_attr_key(attr_key1_path)?;
    let key2 = load_attr_key(attr_key2_path)?;
    let ct = load_ciphertext(ct_path)?;

    let outcome = attack2_recover(&identity, &key1, &key2)?;
    let plaintext = universal_decrypt(&ct, &outcome.recovered)?;
    let verdict = verdict(&plaintext, expect_hex)?;

    if json {
        println!(
            "{}",
            json!({
                "attack": "attack2",
                "inputs": {
                    "identity_key": identity_path.display().to_string(),
                    "attribute_key_1": attr_key1_path.display().to_string(),
                    "attribute_key_2": attr_key2_path.display().to_string(),
                    "ciphertext": ct_path.display().to_string(),
                    "attributes": [key1.attribute.name, key2.attribute.name],
                },
                "unmasked_q": fmt_point(&outcome.unmasked_q),
                "key_difference": fmt_point(&outcome.key_difference),
                "attribute_blind": fmt_point(&outcome.attr_blind),
                "recovered_key_digest": wire::bytes_to_hex(&outcome.recovered.digest()),
                "plaintext_hex": wire::bytes_to_hex(&plaintext),
                "verdict": verdict,
            })
        );
    } else {
        println!("attack 2: two-key domain recovery");
        println!("  inputs consumed:");
        println!("    identity key   : {}", identity_path.display());
        println!(
            "    attribute key 1: {} ({})",
            attr_key1_path.display(),
            key1.attribute.name
        );
        println!(
            "    attribute key 2: {} ({})",
            attr_key2_path.display(),
            key2.attribute.name
        );
        println!("    ciphertext     : {}", ct_path.display());
        println!("  unmasked Q      : {}", fmt_point(&outcome.unmasked_q));
        println!("  difference B    : {}", fmt_point(&outcome.key_difference));
        println!("  blind C         : {}", fmt_point(&outcome.attr_blind));
        println!(
            "  recovered digest: {}",
            wire::bytes_to_hex(&outcome.recovered.digest())
        );
        println!("  plaintext       : {}", wire::bytes_to_hex(&plaintext));
        println!("  verdict         : {verdict}");
    }
    Ok(())
}

fn cmd_game(
    adversary: AdversaryKind,
    trials: u64,
    seed: &str,
    preset: &str,
    json: bool,
) -> Result<(), CliError> {
    let preset = parse_preset(preset)?;
    let result = match adversary {
        AdversaryKind::Attack1 => run_game(
            &habe::attack1_adversary(),
            &preset,
            trials,
            seed.as_bytes(),
        )?,
        AdversaryKind::Attack2 => run_game(
            &habe::attack2_adversary(),
            &preset,
            trials,
            seed.as_bytes(),
        )?,
        AdversaryKind::Random => run_game(
            &habe::random_adversary(),
            &preset,
            trials,
            seed.as_bytes(),
        )?,
    };
    if json {
        print!("{}", wire::to_json(&result));
    } else {
        println!("trials {}", result.trials);
        println!("wins {}", result.wins);
        println!("win_rate {:?}", result.win_rate);
        let audited = result
            .verdicts
            .iter()
            .filter(|v| v.white_box_ok == Some(true))
            .count();
        if audited > 0 {
            println!("white_box_matches {audited}/{}", result.trials);
        }
    }
    Ok(())
}
