//! Criterion benchmarks for the pairing primitives, the scheme operations
//! and the game harness, including a sequential-versus-parallel comparison
//! of the trial loop.

use std::hint::black_box;
use std::sync::OnceLock;

use criterion::{criterion_group, criterion_main, Criterion};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use habe::game::{run_game, run_game_sequential};
use habe::pairing::pairing;
use habe::policy::parse;
use habe::scheme::{create_dm, create_user, decrypt, encrypt, setup, DomainParent};
use habe::{Preset, Registry};

fn small_params() -> &'static (habe::SystemParams, habe::RootMasterKey) {
    static CACHE: OnceLock<(habe::SystemParams, habe::RootMasterKey)> = OnceLock::new();
    CACHE.get_or_init(|| setup(&Preset::Small, 256, b"bench").expect("setup"))
}

fn bench_pairing(c: &mut Criterion) {
    let mut group = c.benchmark_group("pairing");

    let toy = habe::PairingParams::from_preset(&Preset::Toy, b"bench").unwrap();
    let t0 = toy.generator().clone();
    group.bench_function("toy", |b| {
        b.iter(|| pairing(black_box(&t0), black_box(&t0)).unwrap())
    });

    let (params, _) = small_params();
    let p0 = params.generator().clone();
    let p1 = p0.scalar_mul(&BigUint::from(7u32));
    group.sample_size(20);
    group.bench_function("small", |b| {
        b.iter(|| pairing(black_box(&p0), black_box(&p1)).unwrap())
    });

    let k = BigUint::parse_bytes(b"ffffffffffffffffffff", 16).unwrap();
    group.bench_function("small_scalar_mul", |b| {
        b.iter(|| black_box(&p0).scalar_mul(black_box(&k)))
    });
    group.finish();
}

fn bench_scheme(c: &mut Criterion) {
    let mut group = c.benchmark_group("scheme");
    group.sample_size(10);

    let (params, root) = small_params();
    let mut rng = ChaCha20Rng::from_seed([1u8; 32]);

    let mut registry = Registry::new();
    registry.add_domain("dm1", b"bench-dm1".to_vec(), None).unwrap();
    registry
        .add_domain("dm2", b"bench-dm2".to_vec(), Some("dm1".into()))
        .unwrap();
    for (name, pk) in [("a1", "k1"), ("a2", "k2"), ("a3", "k3")] {
        registry
            .add_attribute(name, pk.as_bytes().to_vec(), "dm2")
            .unwrap();
        registry.authorize(b"bench-user", name);
    }
    registry.validate().unwrap();
    let dm1 = create_dm(params, DomainParent::Root(root), b"bench-dm1", &mut rng).unwrap();
    let dm2 = create_dm(params, DomainParent::Domain(&dm1), b"bench-dm2", &mut rng).unwrap();
    let structure = parse("(a1&a2)|(a3)", &registry).unwrap();
    let message = vec![0x5au8; params.n_bytes()];

    group.bench_function("encrypt_two_clauses", |b| {
        b.iter(|| {
            encrypt(
                params,
                black_box(&message),
                &structure,
                &registry,
                &mut rng,
            )
            .unwrap()
        })
    });

    let ct = encrypt(params, &message, &structure, &registry, &mut rng).unwrap();
    let (identity, k1) = create_user(params, &dm2, b"bench-user", "a1", &registry).unwrap();
    let (_, k2) = create_user(params, &dm2, b"bench-user", "a2", &registry).unwrap();
    let keys = vec![k1, k2];
    group.bench_function("decrypt_depth_two", |b| {
        b.iter(|| decrypt(black_box(&ct), &identity, &keys).unwrap())
    });
    group.finish();
}

/// The same 8-trial attack game run through the rayon-backed path and the
/// forced-sequential path; with the `parallel` feature disabled both legs
/// measure the sequential implementation. Toy trials are too short to
/// amortize fork-join overhead, so the comparison uses mid-size parameters
/// where each trial carries real pairing work.
fn bench_game(c: &mut Criterion) {
    let preset = Preset::Custom {
        q_bits: 32,
        p_bits: 96,
    };
    let mut group = c.benchmark_group("game_attack1_mid8");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| {
            run_game(
                &habe::attack1_adversary(),
                &preset,
                8,
                black_box(b"bench-game"),
            )
            .unwrap()
        })
    });
    group.bench_function("sequential", |b| {
        b.iter(|| {
            run_game_sequential(
                &habe::attack1_adversary(),
                &preset,
                8,
                black_box(b"bench-game"),
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_pairing, bench_scheme, bench_game);
criterion_main!(benches);
