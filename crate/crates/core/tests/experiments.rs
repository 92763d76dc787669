use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use noveltest::experiments::*;
use noveltest::games::dsl::*;
use noveltest::neat::NeatParams;
use noveltest::search::{CoverageTimeline, Mode, SearchConfig, TimelinePoint, TIMELINE_HEADER};
use noveltest::vm::GameInstance;

/// Two-sided exact permutation p-value, straight from the definition:
/// every split of the pooled sample, U counted pairwise.
fn permutation_oracle(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let (n, m) = (xs.len(), ys.len());
    let u = |a: &[f64], b: &[f64]| {
        let mut s = 0.0;
        for x in a {
            for y in b {
                s += if x > y { 1.0 } else if x == y { 0.5 } else { 0.0 };
            }
        }
        s
    };
    let observed = u(xs, ys);
    let mean = (n * m) as f64 / 2.0;
    let (mut hits, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << pooled.len()) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let (a, b): (Vec<(usize, f64)>, Vec<(usize, f64)>) =
            pooled.iter().copied().enumerate().partition(|(i, _)| mask & (1 << i) != 0);
        let a: Vec<f64> = a.into_iter().map(|p| p.1).collect();
        let b: Vec<f64> = b.into_iter().map(|p| p.1).collect();
        total += 1;
        if (u(&a, &b) - mean).abs() >= (observed - mean).abs() - 1e-9 {
            hits += 1;
        }
    }
    (observed, hits as f64 / total as f64)
}

#[test]
fn a12_fixtures() {
    assert_eq!(vargha_delaney_a12(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap(), 0.0);
    assert_eq!(vargha_delaney_a12(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 0.5);
    assert_eq!(vargha_delaney_a12(&[2.0], &[1.0]).unwrap(), 1.0);
    assert_eq!(vargha_delaney_a12(&[1.0, 1.0], &[1.0, 0.0]).unwrap(), 0.75);
    assert!(matches!(vargha_delaney_a12(&[], &[1.0]), Err(ExperimentError::EmptySample)));
}

#[test]
fn u_fixtures() {
    let r = mann_whitney_u(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
    assert_eq!((r.u_x, r.u_y), (0.0, 4.0));
    assert!(r.exact);
    // 2 of 6 splits are as extreme
    assert!((r.p - 1.0 / 3.0).abs() < 1e-12);

    let same = [0.3, 0.5, 0.5, 0.9];
    assert!((mann_whitney_u(&same, &same).unwrap().p - 1.0).abs() < 1e-12);
    let flat: Vec<f64> = vec![0.4; 12];
    let r = mann_whitney_u(&flat, &flat[..10]).unwrap();
    assert!(!r.exact);
    assert_eq!(r.p, 1.0);
    assert_eq!(vargha_delaney_a12(&flat, &flat).unwrap(), 0.5);

    assert!(matches!(mann_whitney_u(&[1.0], &[]), Err(ExperimentError::EmptySample)));
}

#[test]
fn separated_samples_are_significant() {
    let xs: Vec<f64> = (1..=10).map(f64::from).collect();
    let ys: Vec<f64> = (11..=20).map(f64::from).collect();
    let r = mann_whitney_u(&xs, &ys).unwrap();
    assert_eq!(r.u_x, 0.0);
    assert!(r.p < 0.01);
    // the exact permutation p is 2 / C(20, 10)
    let (u, exact) = permutation_oracle(&xs, &ys);
    assert_eq!(u, 0.0);
    assert!((exact - 2.0 / 184_756.0).abs() < 1e-15);
    assert!(exact < 0.01);
}

#[test]
fn normal_approximation_with_ties() {
    // reference values from an independent statistics package
    let xs = [0.5, 0.55, 0.55, 0.6, 0.6, 0.6, 0.7, 0.8, 0.85, 0.9];
    let ys = [0.4, 0.5, 0.5, 0.55, 0.6, 0.62, 0.65, 0.65, 0.7, 0.75, 0.3];
    let r = mann_whitney_u(&xs, &ys).unwrap();
    assert!(!r.exact);
    assert_eq!(r.u_x, 71.0);
    assert!((r.p - 0.27192755421839876).abs() < 1e-9, "{}", r.p);
}

#[test]
fn exact_test_matches_permutation_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 1..=EXACT_LIMIT {
        for m in 1..=EXACT_LIMIT {
            for trial in 0..2 {
                // coarse values force ties on the second trial
                let levels = if trial == 0 { 1000 } else { 4 };
                let xs: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64 / 10.0).collect();
                let ys: Vec<f64> = (0..m).map(|_| rng.random_range(0..levels) as f64 / 10.0).collect();
                let r = mann_whitney_u(&xs, &ys).unwrap();
                let (u, p) = permutation_oracle(&xs, &ys);
                assert!(r.exact);
                assert_eq!(r.u_x, u, "{xs:?} {ys:?}");
                assert!((r.p - p).abs() < 1e-9, "{xs:?} {ys:?}: {} vs {p}", r.p);
                assert_eq!(r.u_x + r.u_y, (n * m) as f64);
            }
        }
    }
}

proptest! {
    #[test]
    fn a12_complements(xs in prop::collection::vec(0u8..6, 1..12), ys in prop::collection::vec(0u8..6, 1..12)) {
        let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
        let ys: Vec<f64> = ys.into_iter().map(f64::from).collect();
        let a = vargha_delaney_a12(&xs, &ys).unwrap();
        let b = vargha_delaney_a12(&ys, &xs).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((a + b - 1.0).abs() < 1e-12);
        // strictly monotone transform
        let t = |v: &Vec<f64>| v.iter().map(|x| (x * 0.7).exp() - 3.0).collect::<Vec<f64>>();
        prop_assert!((vargha_delaney_a12(&t(&xs), &t(&ys)).unwrap() - a).abs() < 1e-12);
        let r = mann_whitney_u(&xs, &ys).unwrap();
        prop_assert!((r.u_x + r.u_y - (xs.len() * ys.len()) as f64).abs() < 1e-9);
        prop_assert!((r.u_x / (xs.len() * ys.len()) as f64 - a).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&r.p));
    }
}

fn win_game() -> GameInstance {
    GameInstance::load(game("win", 1, &[], Vec::new(), vec![on_start("stage", vec![win()])])).unwrap()
}

fn quick() -> SearchConfig {
    SearchConfig {
        budget_generations: Some(5),
        neat: NeatParams { population_size: 20, ..NeatParams::default() },
        ..SearchConfig::default()
    }
}

#[test]
fn saturated_game_compares_evenly() {
    let inst = win_game();
    let report = run_comparison(&inst, &quick(), 2, 3).unwrap();
    assert_eq!(report.coverage_samples[&Mode::Fitness], [1.0, 1.0]);
    assert_eq!(report.coverage_samples[&Mode::Novelty], [1.0, 1.0]);
    assert_eq!(report.a12, 0.5);
    assert_eq!(report.p, 1.0);
    assert!(!report.significant);
    assert_eq!(report.runs.len(), 4);
    assert_eq!(report.median(Mode::Novelty), 1.0);
    assert!(matches!(run_comparison(&inst, &quick(), 1, 3), Err(ExperimentError::TooFewRepetitions(1))));
}

#[test]
fn comparison_is_deterministic() {
    let inst = GameInstance::load(noveltest::games::build_maze_world()).unwrap();
    let a = run_comparison(&inst, &quick(), 2, 17).unwrap();
    let b = run_comparison(&inst, &quick(), 2, 17).unwrap();
    assert_eq!(stats_json(&a), stats_json(&b));
    assert_eq!(timelines_csv(&a), timelines_csv(&b));
    let seeds: Vec<u64> = a.runs.iter().map(|r| r.seed).collect();
    assert_eq!(seeds[0], repetition_seed(17, Mode::Fitness, 0));
    assert_eq!(seeds.iter().collect::<std::collections::BTreeSet<_>>().len(), 4);
    assert_eq!(a.events[&Mode::Fitness].keys().collect::<Vec<_>>(), ["level1_advance", "level2_advance"]);
    let stats: serde_json::Value = serde_json::from_str(&stats_json(&a)).unwrap();
    for key in ["game", "modes", "repetitions", "coverage_samples", "a12", "u", "p", "significant", "events", "seed", "config"] {
        assert!(stats.get(key).is_some(), "{key}");
    }
    assert_eq!(stats["seed"], 17);
    assert_eq!(stats["config"]["seed"], 17);
    assert_eq!(stats["coverage_samples"]["novelty"].as_array().unwrap().len(), 2);
}

fn timeline(covered: &[usize], total: usize) -> CoverageTimeline {
    CoverageTimeline {
        points: covered
            .iter()
            .enumerate()
            .map(|(g, &c)| TimelinePoint { generation: g as u64, elapsed_ms: 100 * (g as u64 + 1), covered: c, total })
            .collect(),
    }
}

fn toy_report() -> ComparisonReport {
    let runs = [
        (Mode::Fitness, 0, vec![1, 2, 2, 3], vec!["level1_advance"]),
        (Mode::Fitness, 1, vec![1, 1, 2], vec![]),
        (Mode::Novelty, 0, vec![1, 3, 4, 6, 7], vec!["level1_advance", "level2_advance"]),
        (Mode::Novelty, 1, vec![2, 2, 5, 5], vec!["level1_advance"]),
    ];
    let runs: Vec<RunSummary> = runs
        .into_iter()
        .map(|(mode, rep, cov, events)| RunSummary {
            mode,
            repetition: rep,
            seed: 100 + rep as u64,
            covered: *cov.last().unwrap(),
            total: 10,
            coverage: *cov.last().unwrap() as f64 / 10.0,
            events: events.into_iter().map(String::from).collect(),
            timeline: timeline(&cov, 10),
        })
        .collect();
    let mut samples = BTreeMap::new();
    samples.insert(Mode::Fitness, vec![0.3, 0.2]);
    samples.insert(Mode::Novelty, vec![0.7, 0.5]);
    let mut events = BTreeMap::new();
    events.insert(Mode::Fitness, BTreeMap::from([("level1_advance".to_string(), 1), ("level2_advance".to_string(), 0)]));
    events.insert(Mode::Novelty, BTreeMap::from([("level1_advance".to_string(), 2), ("level2_advance".to_string(), 1)]));
    ComparisonReport {
        game: "toy".into(),
        modes: Mode::ALL.to_vec(),
        repetitions: 2,
        seed: 9,
        config: serde_json::json!({"seed": 9, "budget_generations": 5}),
        coverage_samples: samples,
        a12: 1.0,
        u: 4.0,
        p: 1.0 / 3.0,
        significant: false,
        events,
        runs,
    }
}

fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, actual).unwrap();
    }
    let expected = fs::read_to_string(&path).unwrap();
    assert!(expected == actual, "{} is stale; rerun with UPDATE_GOLDEN=1 and review", path.display());
}

#[test]
fn median_curves_hold_finished_runs() {
    let r = toy_report();
    let close = |a: Vec<f64>, b: &[f64]| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12);
    assert!(close(median_curve(&r, Mode::Fitness), &[0.1, 0.15, 0.2, 0.25]));
    assert!(close(median_curve(&r, Mode::Novelty), &[0.15, 0.25, 0.45, 0.55, 0.6]));
}

#[test]
fn report_files_match_goldens() {
    let r = toy_report();
    let cov = coverage_svg(&r);
    let boxes = box_svg(&r);
    assert_eq!(cov.matches(r#"class="series""#).count(), 2);
    assert_eq!(boxes.matches(r#"class="series""#).count(), 2);
    golden("coverage_over_time.svg", &cov);
    golden("box.svg", &boxes);
    golden("stats.json", &stats_json(&r));
}

#[test]
fn write_report_creates_the_directory() {
    let r = toy_report();
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("a/b");
    let written = write_report(&r, &dir).unwrap();
    assert_eq!(written.len(), 4);
    let csv = fs::read_to_string(dir.join(TIMELINES_FILE)).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(TIMELINE_HEADER));
    let rows: usize = r.runs.iter().map(|x| x.timeline.points.len()).sum();
    assert_eq!(lines.count(), rows);
    assert!(csv.contains("\nnovelty-1,novelty,3,400,5,10\n"));
    assert_eq!(fs::read_to_string(dir.join(STATS_FILE)).unwrap(), stats_json(&r));

    let blocked = tmp.path().join("file");
    fs::write(&blocked, "x").unwrap();
    match write_report(&r, &blocked.join("sub")) {
        Err(ExperimentError::Io { path, .. }) => assert!(path.starts_with(&blocked)),
        other => panic!("{other:?}"),
    }
}
