//! End-to-end pipeline through the compiled binary: setup → create-dm →
//! create-user → encrypt → attack1/attack2/decrypt, plus the game command.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const REGISTRY: &str = r#"{
  "format": "habe-v1",
  "kind": "registry",
  "domains": [
    { "id": "dm1", "public_key": "11aa" },
    { "id": "dm2", "public_key": "22bb", "parent": "dm1" }
  ],
  "attributes": [
    { "name": "a1", "public_key": "a1a1", "domain": "dm2" },
    { "name": "a2", "public_key": "a2a2", "domain": "dm2" },
    { "name": "a3", "public_key": "a3a3", "domain": "dm2" },
    { "name": "top", "public_key": "0f0f", "domain": "dm1" }
  ],
  "authorizations": [
    { "user_public_key": "d00d", "attributes": ["a1", "a2", "a3"] }
  ]
}
"#;

const MSG: &str = "abababababababababababababababababababababababababababababababab";

struct Workspace {
    dir: PathBuf,
}

impl Workspace {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("habe-pipeline-{}-{tag}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).expect("create workspace");
        fs::write(dir.join("registry.habe"), REGISTRY).expect("write registry");
        Self { dir }
    }

    fn path(&self, name: &str) -> String {
        self.dir.join(name).display().to_string()
    }

    fn habe(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_habe"))
            .current_dir(&self.dir)
            .args(args)
            .output()
            .expect("binary runs")
    }

    fn habe_ok(&self, args: &[&str]) -> String {
        let out = self.habe(args);
        assert!(
            out.status.success(),
            "habe {args:?} failed:\n{}",
            String::from_utf8_lossy(&out.stderr)
        );
        String::from_utf8(out.stdout).expect("utf-8 output")
    }
}

impl Drop for Workspace {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.dir);
    }
}

fn setup_system(ws: &Workspace) {
    ws.habe_ok(&["setup", "--preset", "toy", "--seed", "pipeline", "--out", "keys"]);
    ws.habe_ok(&[
        "create-dm", "--parent", &ws.path("keys/rootmk.habe"), "--pk", "11aa",
        "--out", &ws.path("keys/dm-1.habe"), "--seed", "dm1",
    ]);
    ws.habe_ok(&[
        "create-dm", "--parent", &ws.path("keys/dm-1.habe"), "--pk", "22bb",
        "--out", &ws.path("keys/dm-2.habe"), "--seed", "dm2",
    ]);
    for attr in ["a1", "a2"] {
        ws.habe_ok(&[
            "create-user", "--dm", &ws.path("keys/dm-2.habe"), "--user-pk", "d00d",
            "--attr", attr, "--registry", &ws.path("registry.habe"), "--out", "keys",
        ]);
    }
    ws.habe_ok(&[
        "encrypt", "--params", &ws.path("keys/params.habe"),
        "--policy", "(a1&a2&a3)", "--registry", &ws.path("registry.habe"),
        "--msg-hex", MSG, "--out", &ws.path("msg.ct.habe"), "--seed", "ct",
    ]);
}

#[test]
fn scripted_attack1_recovers_the_plaintext() {
    let ws = Workspace::new("attack1");
    setup_system(&ws);
    // the policy needs all of a1, a2, a3; the attacker holds only a1
    let out = ws.habe_ok(&[
        "attack1",
        "--identity", &ws.path("keys/user-d00d-dm2.identity.habe"),
        "--attr-key", &ws.path("keys/user-d00d-dm2-a1.attr.habe"),
        "--ct", &ws.path("msg.ct.habe"),
        "--expect-hex", MSG,
    ]);
    assert!(out.contains(MSG), "transcript must print the message:\n{out}");
    assert!(out.contains("verdict         : match"), "{out}");
}

#[test]
fn scripted_attack2_recovers_the_plaintext() {
    let ws = Workspace::new("attack2");
    setup_system(&ws);
    let out = ws.habe_ok(&[
        "attack2",
        "--identity", &ws.path("keys/user-d00d-dm2.identity.habe"),
        "--attr-key1", &ws.path("keys/user-d00d-dm2-a1.attr.habe"),
        "--attr-key2", &ws.path("keys/user-d00d-dm2-a2.attr.habe"),
        "--ct", &ws.path("msg.ct.habe"),
        "--expect-hex", MSG,
    ]);
    assert!(out.contains(MSG), "{out}");
    assert!(out.contains("verdict         : match"), "{out}");
}

#[test]
fn decrypt_succeeds_with_a_covering_key_set() {
    let ws = Workspace::new("decrypt");
    setup_system(&ws);
    ws.habe_ok(&[
        "create-user", "--dm", &ws.path("keys/dm-2.habe"), "--user-pk", "d00d",
        "--attr", "a3", "--registry", &ws.path("registry.habe"), "--out", "keys",
    ]);
    let out = ws.habe_ok(&[
        "decrypt", "--ct", &ws.path("msg.ct.habe"),
        "--identity", &ws.path("keys/user-d00d-dm2.identity.habe"),
        "--attr-keys",
        &ws.path("keys/user-d00d-dm2-a1.attr.habe"),
        &ws.path("keys/user-d00d-dm2-a2.attr.habe"),
        &ws.path("keys/user-d00d-dm2-a3.attr.habe"),
    ]);
    assert_eq!(out.trim(), MSG);
}

#[test]
fn decrypt_without_coverage_exits_with_the_contract_code() {
    let ws = Workspace::new("unauthorized");
    setup_system(&ws);
    let out = ws.habe(&[
        "decrypt", "--ct", &ws.path("msg.ct.habe"),
        "--identity", &ws.path("keys/user-d00d-dm2.identity.habe"),
        "--attr-keys", &ws.path("keys/user-d00d-dm2-a1.attr.habe"),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not authorized"));
}

#[test]
fn usage_and_validation_exit_codes() {
    let ws = Workspace::new("codes");
    // unknown flag → usage error 1
    let out = ws.habe(&["decrypt", "--nope"]);
    assert_eq!(out.status.code(), Some(1));
    // malformed input file → validation error 2
    fs::write(ws.dir.join("broken.habe"), "{ not json").unwrap();
    let out = ws.habe(&[
        "decrypt", "--ct", &ws.path("broken.habe"),
        "--identity", &ws.path("broken.habe"),
        "--attr-keys", &ws.path("broken.habe"),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn game_reports_perfect_win_rate_for_attack_adversaries() {
    let ws = Workspace::new("game");
    let out = ws.habe_ok(&[
        "game", "--adversary", "attack1", "--trials", "25",
        "--seed", "cli-game", "--preset", "toy",
    ]);
    assert!(out.contains("win_rate 1.0"), "{out}");
    assert!(out.contains("white_box_matches 25/25"), "{out}");

    // deterministic under the seed, byte for byte
    let repeat = ws.habe_ok(&[
        "game", "--adversary", "attack1", "--trials", "25",
        "--seed", "cli-game", "--preset", "toy", "--json",
    ]);
    let repeat2 = ws.habe_ok(&[
        "game", "--adversary", "attack1", "--trials", "25",
        "--seed", "cli-game", "--preset", "toy", "--json",
    ]);
    assert_eq!(repeat, repeat2);
}

#[test]
fn setup_is_deterministic_under_the_seed() {
    let ws = Workspace::new("determinism");
    ws.habe_ok(&["setup", "--preset", "toy", "--seed", "same", "--out", "a"]);
    ws.habe_ok(&["setup", "--preset", "toy", "--seed", "same", "--out", "b"]);
    let read = |p: &str| fs::read_to_string(Path::new(&ws.path(p))).unwrap();
    assert_eq!(read("a/params.habe"), read("b/params.habe"));
    assert_eq!(read("a/rootmk.habe"), read("b/rootmk.habe"));
}
