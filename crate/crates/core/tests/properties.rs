use std::path::Path;
use std::time::{Duration, Instant};

use flatcg::analysis::{run_analysis, run_analysis_observed, AnalysisOptions};
use flatcg::check::{check_soundness, fingerprint, lattice_bound, permuted, GrowthLog};
use flatcg::frontend::{lower, parse_ast};
use flatcg::oracle::{Outcome, DEFAULT_STEP_BUDGET};
use flatcg::synth::generate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hand_written() -> Vec<(String, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/sound");
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "py"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    v.push((
        "bananas.py".into(),
        include_str!("../fixtures/bananas.py").into(),
    ));
    v.sort();
    v
}

fn corpus() -> Vec<(String, String)> {
    let mut v = hand_written();
    v.extend((0..40).map(|s| (format!("generated-{s}"), generate(s))));
    v
}

#[test]
fn hand_written_fixtures_run_to_completion() {
    for (name, src) in hand_written() {
        let ast = parse_ast(&src).unwrap_or_else(|e| panic!("{name}: {e}"));
        let p = lower(&ast).unwrap();
        for &e in p.entry_points() {
            let r = flatcg::oracle::interpret(&p, &ast, e, DEFAULT_STEP_BUDGET);
            assert_eq!(r.outcome, Outcome::Completed, "{name}");
            assert!(r.calls.graph.edge_count() > 0, "{name}");
        }
    }
}

#[test]
fn oracle_behavior_is_contained_in_the_analysis() {
    let corpus = corpus();
    assert!(corpus.len() >= 30);
    for (name, src) in corpus {
        let ast = parse_ast(&src).unwrap();
        let p = lower(&ast).unwrap();
        for &e in p.entry_points() {
            let r = check_soundness(&p, &ast, e, AnalysisOptions::default(), DEFAULT_STEP_BUDGET)
                .unwrap();
            assert!(r.is_sound(), "{name}: {r:?}\n{src}");
        }
    }
}

#[test]
fn statement_order_does_not_matter() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut trials = 0;
    for (name, src) in corpus() {
        let p = lower(&parse_ast(&src).unwrap()).unwrap();
        let base =
            fingerprint(&run_analysis(&p, p.entry_points(), AnalysisOptions::default()).unwrap());
        for _ in 0..3 {
            let q = permuted(&p, &mut rng);
            let r = run_analysis(&q, q.entry_points(), AnalysisOptions::default()).unwrap();
            assert!(fingerprint(&r) == base, "{name}");
            trials += 1;
        }
    }
    assert!(trials >= 100);
}

#[test]
fn states_only_grow_and_stay_within_the_lattice_height() {
    for (name, src) in corpus() {
        let p = lower(&parse_ast(&src).unwrap()).unwrap();
        let opts = AnalysisOptions::default();
        let mut log = GrowthLog::default();
        let start = Instant::now();
        let r = run_analysis_observed(&p, p.entry_points(), opts, &mut log).unwrap();
        assert!(start.elapsed() < Duration::from_secs(10), "{name}");
        assert!(log.shrinks.is_empty(), "{name}: {:?}", log.shrinks);
        assert!(
            log.max_updates() <= lattice_bound(&p, &r.env, opts.literal_limit),
            "{name}"
        );
    }
}

#[test]
fn summaries_are_coherent_and_transfers_idempotent() {
    use flatcg::analysis::{reapply_transfers, replay_summary};
    for (name, src) in corpus() {
        let p = lower(&parse_ast(&src).unwrap()).unwrap();
        let opts = AnalysisOptions::default();
        let r = run_analysis(&p, p.entry_points(), opts).unwrap();
        for ctx in 0..r.tables.contexts.len() {
            if let Some(s) = r.tables.summary.get(&ctx) {
                assert_eq!(
                    &replay_summary(&p, opts, &r, ctx),
                    s,
                    "{name}: context {ctx}"
                );
            }
        }
        assert_eq!(reapply_transfers(&p, opts, &r), vec![], "{name}");
    }
}
