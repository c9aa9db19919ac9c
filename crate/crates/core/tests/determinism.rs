mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use tlseq::geometry::McConfig;
use tlseq::matrices::{Matrix, MatrixDocument};
use tlseq::norms::{norm, CoefficientSequence, Method, NormConfig};
use tlseq::orbit::SpaceDocument;
use tlseq::witnesses::{verify_norm_law, FamilyKind, LawTarget, WitnessManifest};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

fn mc(samples: u64, seed: u64) -> NormConfig {
    NormConfig {
        method: Method::Mc,
        mc: McConfig { samples, seed },
        ..Default::default()
    }
}

#[test]
fn monte_carlo_norms_ignore_thread_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = &matrices(2)[3];
    for (p, q) in [("1", "2"), ("1/2", "inf"), ("inf", "1")] {
        let s = space(a, 0.25, p, q);
        let c: CoefficientSequence = random_sequence(&mut rng, 2, -2, 2, 12).into();
        let run = |threads| in_pool(threads, || norm(&c, &s, &mc(300_000, 11)).unwrap());
        let (one, many) = (run(1), run(4));
        assert_eq!(one.value.to_bits(), many.value.to_bits(), "p={p} q={q}");
        assert_eq!(one.error_bound.to_bits(), many.error_bound.to_bits());
    }
}

#[test]
fn law_reports_ignore_thread_count() {
    let doc = SpaceDocument {
        matrix: MatrixDocument::from_matrix(&Matrix::diag_int(&[2, 2])),
        alpha: serde_json::json!(0.0),
        p: exponent("1"),
        q: exponent("2"),
    };
    let m = WitnessManifest::new(FamilyKind::Multiscale, doc, 1);
    let run = |threads| {
        in_pool(threads, || {
            let r = verify_norm_law(&m, &[2, 3], LawTarget::A, &mc(200_000, 0)).unwrap();
            serde_json::to_string(&r).unwrap()
        })
    };
    assert_eq!(run(1), run(4));
}
