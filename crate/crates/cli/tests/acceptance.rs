//! End-to-end acceptance checks. Runs without the libtest harness and
//! prints one PASS/FAIL line per criterion; pass criterion numbers as
//! arguments to run a subset.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use noveltest::experiments::{mann_whitney_u, run_comparison, vargha_delaney_a12, write_report, EXACT_LIMIT};
use noveltest::games::dsl::*;
use noveltest::games::{build_clicker, build_maze_world, maze_layout, maze_milestones};
use noveltest::neat::{crossover, evolve_generation, init_population, Genome, InnovationLedger, NeatParams};
use noveltest::novelty::{behavior_distance, generation_novelty, BehaviorArchive};
use noveltest::objectives::{branch_distance, evaluate, normalize, statement_fitness, CdgNode, ControlDependenceGraph, ObjectiveResult};
use noveltest::search::{neatest_search, rank_candidates, EvaluationRecord, Mode, SearchConfig};
use noveltest::vm::{
    compare_distance, Action, BehaviorVector, CmpOp, EpisodeConfig, GameInstance, GameState, Predicate, StmtKind, Value, K,
};

type Check = fn() -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Check, u64); 10] = [
        (1, "novelty matches brute-force kNN oracle", novelty_oracle, 30),
        (2, "cosine distance laws", cosine_laws, 5),
        (3, "branch distance properties", branch_distances, 10),
        (4, "fitness dominance", fitness_dominance, 5),
        (5, "NEAT structural invariants", neat_invariants, 30),
        (6, "generate is deterministic", determinism, 120),
        (7, "scaled maze experiment", maze_experiment, 900),
        (8, "clicker plateau detection", clicker_plateau, 300),
        (9, "statistics oracle", statistics, 10),
        (10, "suite soundness", suite_soundness, 120),
    ];
    let wanted: BTreeSet<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, name, check, limit) in criteria {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let result = match result {
            Ok(d) if took > Duration::from_secs(limit) => Err(format!("{d}; took longer than {limit}s")),
            other => other,
        };
        match result {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail} [{:.1}s]", took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {why} [{:.1}s]", took.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

// 1 -------------------------------------------------------------------------

fn cosine_oracle(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.5;
    }
    1.0 - ((dot / (na * nb)).clamp(-1.0, 1.0) + 1.0) / 2.0
}

fn novelty_oracle() -> Result<String, String> {
    let mut r = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for case in 0..100 {
        let dim = r.random_range(1..=64);
        let n = r.random_range(1..=1000);
        let k = [1, 5, 15][case % 3];
        let vecs: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
        // some members go into an archive first
        let archived = r.random_range(0..=n / 4);
        let mut archive = BehaviorArchive::new(1.0, case as u64);
        for v in &vecs[..archived] {
            archive.update(&BehaviorVector(v.clone())).map_err(|e| e.to_string())?;
        }
        let generation: Vec<BehaviorVector> = vecs[archived..].iter().cloned().map(BehaviorVector).collect();
        let got = generation_novelty(&generation, &archive, k);
        for (i, b) in generation.iter().enumerate() {
            let mut d: Vec<f64> = generation
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, o)| cosine_oracle(&b.0, &o.0))
                .chain(vecs[..archived].iter().map(|o| cosine_oracle(&b.0, o)))
                .collect();
            let expected = if d.is_empty() {
                1.0
            } else {
                d.sort_by(f64::total_cmp);
                let take = k.min(d.len());
                d[..take].iter().sum::<f64>() / take as f64
            };
            worst = worst.max((got[i] - expected).abs());
            points += 1;
        }
    }
    ensure!(worst <= 1e-12, "max deviation {worst:e}");
    Ok(format!("100 instances, {points} scores, max deviation {worst:e}"))
}

// 2 -------------------------------------------------------------------------

fn cosine_laws() -> Result<String, String> {
    let d = |a: &[f64], b: &[f64]| behavior_distance(&BehaviorVector(a.to_vec()), &BehaviorVector(b.to_vec())).unwrap();
    ensure!(d(&[0.2, 0.7, 0.1], &[0.2, 0.7, 0.1]) == 0.0, "identical");
    ensure!(d(&[1.0, 0.0], &[0.0, 1.0]) == 0.5, "orthogonal");
    ensure!(d(&[0.3, -0.4], &[-0.3, 0.4]) == 1.0, "opposite");
    let mut r = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let dim = r.random_range(1..=32);
        let a: Vec<f64> = (0..dim).map(|_| r.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..dim).map(|_| r.random_range(-1.0..1.0)).collect();
        let x = d(&a, &b);
        ensure!((0.0..=1.0).contains(&x), "{x} out of range");
        ensure!(x == d(&b, &a), "asymmetric: {x} vs {}", d(&b, &a));
        let s = r.random_range(0.01..100.0);
        let scaled: Vec<f64> = a.iter().map(|v| v * s).collect();
        ensure!((d(&scaled, &b) - x).abs() < 1e-12, "scale {s} changed {x}");
        ensure!(d(&a, &a) < 1e-12, "self distance");
    }
    Ok("identical 0, orthogonal 0.5, opposite 1; 10000 random pairs symmetric and scale invariant".into())
}

// 3 -------------------------------------------------------------------------

fn probe_game() -> GameInstance {
    let scripts = vec![
        on_start("stage", vec![set("menu", text("Main"))]),
        on_key("A", "space", vec![if_(touching_colour("A", "orange"), vec![say("hit")])]),
    ];
    let sprites = vec![sprite("A", 0.0, 0.0, &[(20.0, 20.0, "blue")]), sprite("B", 0.0, 0.0, &[(20.0, 20.0, "orange")])];
    GameInstance::load(game("probe", 1, &[("menu", Value::Str("Main".into()))], sprites, scripts)).unwrap()
}

fn interval_gap(a_lo: f64, a_hi: f64, b_lo: f64, b_hi: f64) -> f64 {
    (a_lo - b_hi).max(b_lo - a_hi).max(0.0)
}

/// Closest-point distance between two boxes given by centre and size.
fn box_gap(a: (f64, f64, f64), b: (f64, f64, f64)) -> f64 {
    let edge = |c: f64, s: f64| (c - s / 2.0, c + s / 2.0);
    let (ax0, ax1) = edge(a.0, a.2);
    let (ay0, ay1) = edge(a.1, a.2);
    let (bx0, bx1) = edge(b.0, b.2);
    let (by0, by1) = edge(b.1, b.2);
    let dx = interval_gap(ax0, ax1, bx0, bx1);
    let dy = interval_gap(ay0, ay1, by0, by1);
    (dx * dx + dy * dy).sqrt()
}

fn place(st: &mut GameState, i: usize, x: f64, y: f64, side: f64) {
    st.sprites[i].x = x;
    st.sprites[i].y = y;
    st.sprites[i].size = side / 20.0 * 100.0;
}

fn interval_distance(x: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        lo - x
    } else if x > hi {
        x - hi
    } else {
        0.0
    }
}

/// Distance from `a` to the set of values making `a op b` equal `desired`.
fn distance_to_region(op: CmpOp, a: f64, b: f64, desired: bool) -> f64 {
    let inf = f64::INFINITY;
    match (op, desired) {
        (CmpOp::Lt, true) | (CmpOp::Le, true) | (CmpOp::Gt, false) | (CmpOp::Ge, false) => interval_distance(a, -inf, b),
        (CmpOp::Gt, true) | (CmpOp::Ge, true) | (CmpOp::Lt, false) | (CmpOp::Le, false) => interval_distance(a, b, inf),
        (CmpOp::Eq, true) => (a - b).abs(),
        (CmpOp::Eq, false) => 0.0,
    }
}

fn branch_distances() -> Result<String, String> {
    let ops = [CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge, CmpOp::Eq];
    let mut r = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let op = ops[r.random_range(0..ops.len())];
        let desired = r.random_bool(0.5);
        let b = r.random_range(-50.0..50.0_f64).round();
        let a1 = r.random_range(-100.0..100.0_f64).round();
        let a2 = r.random_range(-100.0..100.0_f64).round();
        let (d1, d2) = (compare_distance(op, a1, b, desired), compare_distance(op, a2, b, desired));
        ensure!((d1 == 0.0) == (op.eval(a1, b) == desired), "{a1} {op:?} {b} desired {desired}: {d1}");
        ensure!(d1 >= 0.0 && d2 >= 0.0, "negative distance");
        let (r1, r2) = (distance_to_region(op, a1, b, desired), distance_to_region(op, a2, b, desired));
        if r1 < r2 {
            ensure!(d1 <= d2, "{op:?} {b} desired {desired}: {a1} is closer than {a2} but {d1} > {d2}");
        }
    }

    let inst = probe_game();
    let st = inst.initial_state(0);
    let menu = Predicate::StringEquals { var: "menu".into(), literal: "Bonus".into() };
    for wrong in ["Main", "Shop", "Bonu", "", "bonus"] {
        let mut s = st.clone();
        s.globals[0] = Value::Str(wrong.into());
        let d = branch_distance(&inst, &menu, None, &s, true).map_err(|e| e.to_string())?;
        ensure!(d == K, "string `{wrong}` gave {d}");
    }
    let mut s = st.clone();
    s.globals[0] = Value::Str("Bonus".into());
    ensure!(branch_distance(&inst, &menu, None, &s, true).unwrap() == 0.0, "satisfied string");
    let key = Predicate::KeyPressed { key: "space".into() };
    ensure!(branch_distance(&inst, &key, None, &st, true).unwrap() == K, "key not held");
    let held = inst.step(st.clone(), &Action::PressKey { key: "space".into(), ticks: 5 });
    ensure!(branch_distance(&inst, &key, None, &held, true).unwrap() == 0.0, "key held");

    let touching = Predicate::TouchingColour { sprite: "A".into(), colour: "orange".into() };
    let mut fixtures = vec![((0.0, 0.0, 20.0), (50.0, 60.0, 20.0))];
    while fixtures.len() < 20 {
        let a = (r.random_range(-150.0..150.0), r.random_range(-120.0..120.0), r.random_range(4.0..60.0));
        let b = (r.random_range(-150.0..150.0), r.random_range(-120.0..120.0), r.random_range(4.0..60.0));
        fixtures.push((a, b));
    }
    let mut touching_seen = 0;
    for (i, (a, b)) in fixtures.iter().enumerate() {
        let mut s = st.clone();
        place(&mut s, 0, a.0, a.1, a.2);
        place(&mut s, 1, b.0, b.1, b.2);
        let d = branch_distance(&inst, &touching, Some("A"), &s, true).unwrap();
        let expected = box_gap(*a, *b);
        ensure!((d - expected).abs() < 1e-9, "fixture {i}: {d} vs {expected}");
        let hit = evaluate(&inst, &touching, Some("A"), &s).unwrap();
        ensure!((d == 0.0) == hit, "fixture {i}: zero iff touching");
        touching_seen += usize::from(hit);
        if i == 0 {
            ensure!(d == 50.0, "3-4-5 fixture gave {d}");
        }
    }
    Ok(format!("1000 compare triples, flat K for strings and keys, 20 touching fixtures ({touching_seen} overlapping), 3-4-5 -> 50"))
}

// 4 -------------------------------------------------------------------------

fn fitness_dominance() -> Result<String, String> {
    let mut r = ChaCha8Rng::seed_from_u64(4);
    let special = [0.0, 1.0, 600.0, 1e9, 1e15, 1e300, f64::MAX, f64::INFINITY];
    for i in 0..20_000 {
        let b = if i < special.len() { special[i] } else { 10f64.powf(r.random_range(-6.0..20.0)) };
        let w = normalize(b);
        ensure!((0.0..1.0).contains(&w), "omega({b}) = {w}");
        let (a1, a2) = (r.random_range(0..8u32), r.random_range(0..8u32));
        let b2 = if i % 2 == 0 { 0.0 } else { 10f64.powf(r.random_range(-6.0..20.0)) };
        let (f1, f2) = (ObjectiveResult::new(a1, b).fitness, ObjectiveResult::new(a2, b2).fitness);
        if a1 < a2 {
            ensure!(f1 < f2, "A {a1} B {b} gave {f1}, A {a2} B {b2} gave {f2}");
        }
    }

    let inst = GameInstance::load(build_maze_world()).unwrap();
    let cdg = ControlDependenceGraph::build(inst.spec());
    let cfg = EpisodeConfig::default();
    let mut traces = 0;
    let policies: [fn(&GameInstance, &GameState) -> Action; 4] = [
        |_, _| Action::Noop,
        |_, _| Action::PressKey { key: "right".into(), ticks: 10 },
        |_, _| Action::PressKey { key: "up".into(), ticks: 10 },
        maze_walk,
    ];
    for (p, policy) in policies.iter().enumerate() {
        for seed in 0..3 {
            let mut pol = |_: &BehaviorVector, st: &GameState| policy(&inst, st);
            let result = inst.run_episode(&mut pol, seed, cfg);
            for id in inst.statement_ids() {
                let o = statement_fitness(&result, &inst, id, &cdg);
                ensure!((o.fitness == 0.0) == result.covered(&inst, id), "policy {p} seed {seed} statement {id}: f = {}", o.fitness);
                ensure!(o.covered == result.covered(&inst, id), "covered flag");
            }
            traces += 1;
        }
    }
    Ok(format!("20000 (A, B) pairs, omega < 1 up to infinity; f = 0 iff covered on {traces} maze traces"))
}

/// Reaches the portal on both levels.
fn maze_walk(inst: &GameInstance, st: &GameState) -> Action {
    let p = st.sprite(inst, maze_layout::PLAYER).unwrap();
    let level = st.global(inst, "level").map(Value::as_num).unwrap_or(1.0);
    let key = if level >= 2.0 && p.y < 165.0 { "up" } else { "right" };
    Action::PressKey { key: key.into(), ticks: 10 }
}

// 5 -------------------------------------------------------------------------

fn innovations(g: &Genome) -> BTreeSet<u32> {
    g.connections.iter().map(|c| c.innovation).collect()
}

fn neat_invariants() -> Result<String, String> {
    let mut generations = 0;
    let mut crossovers = 0;
    for run in 0..10u64 {
        let mut r = ChaCha8Rng::seed_from_u64(100 + run);
        let (inputs, outputs) = (4, 3);
        let params = NeatParams {
            population_size: 30 + 5 * run as usize,
            add_connection_rate: 0.3,
            add_node_rate: 0.15,
            compatibility_threshold: 1.5,
            stagnation_limit: 4,
            ..NeatParams::default()
        };
        let mut ledger = InnovationLedger::new(inputs, outputs);
        let mut pop = init_population(&params, inputs, outputs, &mut ledger, &mut r, None).map_err(|e| e.to_string())?;
        let mut by_pair: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for _ in 0..20 {
            ensure!(pop.genomes.len() == params.population_size, "population size {}", pop.genomes.len());
            let ids: Vec<u64> = pop.genomes.iter().map(|g| g.id).collect();
            let distinct: BTreeSet<u64> = ids.iter().copied().collect();
            ensure!(distinct.len() == ids.len(), "duplicate genome ids");
            let mut members: Vec<u64> = pop.species.iter().flat_map(|s| s.members.iter().copied()).collect();
            members.sort_unstable();
            let mut sorted = ids.clone();
            sorted.sort_unstable();
            ensure!(members == sorted, "species do not partition the population");
            ensure!(pop.species.iter().all(|s| !s.members.is_empty()), "empty species");
            for g in &pop.genomes {
                g.check(inputs, outputs).map_err(|e| e.to_string())?;
                for c in &g.connections {
                    let first = *by_pair.entry((c.source, c.target)).or_insert(c.innovation);
                    ensure!(first == c.innovation, "pair ({}, {}) has innovations {first} and {}", c.source, c.target, c.innovation);
                }
                let inn: Vec<u32> = g.connections.iter().map(|c| c.innovation).collect();
                ensure!(inn.windows(2).all(|w| w[0] < w[1]), "genes out of order in genome {}", g.id);
            }
            for _ in 0..5 {
                let mut a = pop.genomes[r.random_range(0..pop.genomes.len())].clone();
                let mut b = pop.genomes[r.random_range(0..pop.genomes.len())].clone();
                a.fitness = r.random();
                b.fitness = r.random();
                let child = crossover(&a, &b, &mut r);
                let (ia, ib) = (innovations(&a), innovations(&b));
                let fitter = if a.fitness > b.fitness { &ia } else if b.fitness > a.fitness { &ib } else { &ia };
                for c in &child.connections {
                    let from_a = a.connections.iter().find(|x| x.innovation == c.innovation);
                    let from_b = b.connections.iter().find(|x| x.innovation == c.innovation);
                    ensure!(from_a.is_some() || from_b.is_some(), "gene {} has no parent", c.innovation);
                    let w = c.weight;
                    ensure!(from_a.is_some_and(|x| x.weight == w) || from_b.is_some_and(|x| x.weight == w), "weight of gene {} is invented", c.innovation);
                }
                if a.fitness != b.fitness {
                    ensure!(innovations(&child) == *fitter, "child genes differ from the fitter parent's");
                }
                crossovers += 1;
            }
            let mut rank: Vec<u64> = ids.clone();
            for g in &mut pop.genomes {
                g.fitness = r.random();
            }
            rank.sort_by(|x, y| {
                let fx = pop.genome(*x).unwrap().fitness;
                let fy = pop.genome(*y).unwrap().fitness;
                fy.total_cmp(&fx).then(x.cmp(y))
            });
            pop = evolve_generation(&pop, &params, &mut ledger, &rank, &mut r).map_err(|e| e.to_string())?;
            generations += 1;
        }
    }
    Ok(format!("{generations} generations over 10 runs, {crossovers} crossovers checked"))
}

// 6 -------------------------------------------------------------------------

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_noveltest"));
    c.env_remove("NOVELTEST_WORKERS");
    c
}

fn run_generate(dir: &Path, tag: &str, extra: &[&str]) -> Result<(Vec<u8>, Vec<u8>), String> {
    let suite = dir.join(format!("{tag}.json"));
    let timeline = dir.join(format!("{tag}.csv"));
    let status = bin()
        .args(["generate", "--game", "builtin:maze", "--seed", "42", "--quiet", "--out"])
        .arg(&suite)
        .arg("--timeline")
        .arg(&timeline)
        .args(extra)
        .status()
        .map_err(|e| e.to_string())?;
    ensure!(status.success(), "generate exited with {status}");
    Ok((fs::read(&suite).map_err(|e| e.to_string())?, fs::read(&timeline).map_err(|e| e.to_string())?))
}

fn determinism() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = run_generate(dir.path(), "a", &[])?;
    let again = run_generate(dir.path(), "b", &[])?;
    ensure!(first == again, "two runs differ");
    let one = run_generate(dir.path(), "w1", &["--workers", "1"])?;
    let four = run_generate(dir.path(), "w4", &["--workers", "4"])?;
    ensure!(one == four, "--workers 1 and 4 differ");
    ensure!(one == first, "worker count changed the output");
    let suite: serde_json::Value = serde_json::from_slice(&first.0).map_err(|e| e.to_string())?;
    let covered = suite["tests"].as_object().map_or(0, |t| t.len());
    Ok(format!("suite ({} bytes, {covered} targets) and timeline identical across runs and --workers 1/4", first.0.len()))
}

// 7 -------------------------------------------------------------------------

fn maze_experiment() -> Result<String, String> {
    let inst = GameInstance::load(build_maze_world()).unwrap();
    let base = SearchConfig {
        budget_generations: Some(150),
        target_generations: 25,
        neat: NeatParams { population_size: 50, ..NeatParams::default() },
        ..SearchConfig::default()
    };
    let report = run_comparison(&inst, &base, 10, 2024).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    write_report(&report, dir.path()).map_err(|e| e.to_string())?;
    let reach = |m| report.event_count(m, "level2_advance");
    let (fit, nov) = (reach(Mode::Fitness), reach(Mode::Novelty));
    let (mf, mn) = (report.median(Mode::Fitness), report.median(Mode::Novelty));
    let detail = format!(
        "level 2 escaped fitness {fit}/10 novelty {nov}/10; median coverage fitness {mf:.4} novelty {mn:.4}; A12 {:.3} p {:.3}",
        report.a12, report.p
    );
    ensure!(nov >= fit, "{detail}");
    ensure!(mn >= mf, "{detail}");
    Ok(detail)
}

// 8 -------------------------------------------------------------------------

fn string_guarded(inst: &GameInstance, cdg: &ControlDependenceGraph, target: u32) -> bool {
    let Some((CdgNode::Stmt(guard), _)) = cdg.parent(CdgNode::Stmt(target)) else {
        return false;
    };
    matches!(
        inst.spec().statement(guard).map(|s| &s.kind),
        Some(StmtKind::If { cond: Predicate::StringEquals { .. }, .. })
    )
}

fn clicker_plateau() -> Result<String, String> {
    let inst = GameInstance::load(build_clicker()).unwrap();
    let cdg = ControlDependenceGraph::build(inst.spec());
    let cfg = |mode| SearchConfig {
        mode,
        seed: 8,
        budget_generations: Some(60),
        record_generations: true,
        neat: NeatParams { population_size: 60, ..NeatParams::default() },
        ..SearchConfig::default()
    };
    let fitness = neatest_search(&inst, &cfg(Mode::Fitness)).map_err(|e| e.to_string())?;
    let plateau = fitness.generations.iter().find(|g| {
        string_guarded(&inst, &cdg, g.target) && g.fitness.iter().all(|f| *f == g.fitness[0])
    });
    let Some(plateau) = plateau else {
        return Err("no string-guarded generation with a flat objective".into());
    };
    // shifted by the first value so identical samples give exactly zero
    let shift = plateau.fitness[0];
    let n = plateau.fitness.len() as f64;
    let sum: f64 = plateau.fitness.iter().map(|f| f - shift).sum();
    let squares: f64 = plateau.fitness.iter().map(|f| (f - shift).powi(2)).sum();
    let variance = (squares - sum * sum / n) / n;
    ensure!(variance == 0.0, "variance {variance}");
    // fitness mode falls back to id order on the plateau
    let mut by_id = plateau.genome_ids.clone();
    by_id.sort_unstable();
    ensure!(plateau.rank == by_id, "fitness ranking is not id order on the plateau");

    let novelty = neatest_search(&inst, &cfg(Mode::Novelty)).map_err(|e| e.to_string())?;
    let same = novelty
        .generations
        .iter()
        .find(|g| g.generation == plateau.generation)
        .ok_or("novelty run is shorter")?;
    let groups = novelty_driven(same)?;

    // the plateau generation itself, ranked the novelty way
    let records: Vec<EvaluationRecord> = (0..plateau.genome_ids.len())
        .map(|i| EvaluationRecord {
            genome_id: plateau.genome_ids[i],
            fitness: plateau.fitness[i],
            objective: ObjectiveResult::new(0, K),
            novelty: plateau.novelty[i],
            behavior: plateau.behaviors[i].clone(),
            covered: BTreeSet::new(),
            fired_scripts: Vec::new(),
            seed: 0,
            ticks: 0,
        })
        .collect();
    let order: Vec<u64> = rank_candidates(&records, Mode::Novelty).iter().map(|&i| records[i].genome_id).collect();
    let distinct: BTreeSet<String> = plateau.behaviors.iter().map(|b| format!("{:?}", b.0)).collect();
    ensure!(distinct.len() >= 2, "plateau behaviours are all identical");
    ensure!(order != plateau.rank, "novelty did not reorder the plateau");
    let novelty_sorted = order.windows(2).all(|w| {
        let n = |id: u64| records.iter().find(|r| r.genome_id == id).unwrap().novelty;
        n(w[0]) >= n(w[1])
    });
    ensure!(novelty_sorted, "plateau not ordered by novelty");
    Ok(format!(
        "generation {} (target {}) flat at F = {:.4} over {} genomes, {} distinct behaviours; novelty run orders {groups} tied groups by novelty",
        plateau.generation,
        plateau.target,
        plateau.fitness[0],
        plateau.fitness.len(),
        distinct.len()
    ))
}

/// Checks every tied group with at least two distinct behaviours is ranked
/// by novelty (then id); returns how many such groups there were.
fn novelty_driven(g: &noveltest::search::GenerationLog) -> Result<usize, String> {
    let idx: BTreeMap<u64, usize> = g.genome_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut groups = 0;
    let mut start = 0;
    while start < g.rank.len() {
        let head = g.fitness[idx[&g.rank[start]]];
        let mut end = start + 1;
        while end < g.rank.len() && head - g.fitness[idx[&g.rank[end]]] <= 1e-9 {
            end += 1;
        }
        let members = &g.rank[start..end];
        let behaviours: BTreeSet<String> = members.iter().map(|id| format!("{:?}", g.behaviors[idx[id]].0)).collect();
        if behaviours.len() >= 2 {
            groups += 1;
            for w in members.windows(2) {
                let (a, b) = (g.novelty[idx[&w[0]]], g.novelty[idx[&w[1]]]);
                ensure!(a > b || (a == b && w[0] < w[1]), "generation {}: {} before {} against novelty", g.generation, w[0], w[1]);
            }
        }
        start = end;
    }
    ensure!(groups > 0, "generation {} has no tied group with distinct behaviours", g.generation);
    Ok(groups)
}

// 9 -------------------------------------------------------------------------

fn permutation_p(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let u = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().map(|x| b.iter().map(|y| if x > y { 1.0 } else if x == y { 0.5 } else { 0.0 }).sum::<f64>()).sum()
    };
    let mean = (xs.len() * ys.len()) as f64 / 2.0;
    let observed = u(xs, ys);
    let (mut hits, mut total) = (0.0, 0.0);
    for mask in 0u32..(1 << pooled.len()) {
        if mask.count_ones() as usize != xs.len() {
            continue;
        }
        let a: Vec<f64> = (0..pooled.len()).filter(|i| mask >> i & 1 == 1).map(|i| pooled[i]).collect();
        let b: Vec<f64> = (0..pooled.len()).filter(|i| mask >> i & 1 == 0).map(|i| pooled[i]).collect();
        total += 1.0;
        if (u(&a, &b) - mean).abs() >= (observed - mean).abs() - 1e-9 {
            hits += 1.0;
        }
    }
    (observed, hits / total)
}

fn statistics() -> Result<String, String> {
    let a12 = |x: &[f64], y: &[f64]| vargha_delaney_a12(x, y).unwrap();
    ensure!(a12(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]) == 0.0, "A12 separated");
    ensure!(a12(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]) == 0.5, "A12 identical");
    ensure!(a12(&[2.0], &[1.0]) == 1.0, "A12 single");
    let same = mann_whitney_u(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
    ensure!((same.p - 1.0).abs() < 1e-12, "identical samples p = {}", same.p);
    let hand = mann_whitney_u(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
    ensure!(hand.u_x == 0.0 && hand.u_y == 4.0, "U for [1,2] vs [3,4]");
    let wide = mann_whitney_u(&(1..=10).map(f64::from).collect::<Vec<_>>(), &(11..=20).map(f64::from).collect::<Vec<_>>()).unwrap();
    ensure!(wide.p < 0.01, "separated tens p = {}", wide.p);

    let mut r = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in 1..=EXACT_LIMIT {
        for m in 1..=EXACT_LIMIT {
            for levels in [5, 1000] {
                let xs: Vec<f64> = (0..n).map(|_| r.random_range(0..levels) as f64).collect();
                let ys: Vec<f64> = (0..m).map(|_| r.random_range(0..levels) as f64).collect();
                let got = mann_whitney_u(&xs, &ys).unwrap();
                let (u, p) = permutation_p(&xs, &ys);
                ensure!(got.u_x == u, "U {} vs {u} for {xs:?} {ys:?}", got.u_x);
                ensure!(got.u_x + got.u_y == (n * m) as f64, "U_x + U_y");
                worst = worst.max((got.p - p).abs());
                cases += 1;
            }
        }
    }
    ensure!(worst <= 1e-9, "exact p off by {worst:e}");
    Ok(format!("fixtures hold; {cases} samples up to 8x8 match the permutation oracle (max p error {worst:e})"))
}

// 10 ------------------------------------------------------------------------

fn suite_soundness() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut summary = Vec::new();
    for (game, seed) in [("builtin:maze", "1"), ("builtin:clicker", "2")] {
        let suite = dir.path().join(format!("{}.json", &game[8..]));
        let status = bin()
            .args(["generate", "--game", game, "--seed", seed, "--budget-gens", "60", "--quiet", "--out"])
            .arg(&suite)
            .status()
            .map_err(|e| e.to_string())?;
        ensure!(status.success(), "{game}: generate exited with {status}");
        let out = bin().args(["replay", "--game", game, "--reps", "10", "--suite"]).arg(&suite).output().map_err(|e| e.to_string())?;
        let stdout = String::from_utf8_lossy(&out.stdout);
        ensure!(out.status.success(), "{game}: replay exited with {}\n{stdout}", out.status);
        let last = stdout.lines().last().unwrap_or("").to_string();
        let rows = stdout.lines().filter(|l| l.ends_with("pass")).count();
        ensure!(stdout.lines().filter(|l| l.contains("10/10")).count() == rows, "{game}: not every target replayed 10/10");
        summary.push(format!("{game} {last}"));
    }
    // a recoloured portal must be caught
    let mut spec = build_maze_world();
    let portal = spec.sprites.iter_mut().find(|s| s.name == maze_layout::PORTAL).unwrap();
    portal.costumes[0].colour = "red".into();
    let mutated = dir.path().join("mutated.json");
    fs::write(&mutated, spec.to_json()).map_err(|e| e.to_string())?;
    let out = bin()
        .args(["replay", "--reps", "10", "--game"])
        .arg(&mutated)
        .arg("--suite")
        .arg(dir.path().join("maze.json"))
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.code() == Some(1), "mutated maze replay exited with {}", out.status);
    let level1 = maze_milestones(&build_maze_world()).level1_advance.to_string();
    let stdout = String::from_utf8_lossy(&out.stdout);
    let failing: Vec<&str> = stdout.lines().filter(|l| l.ends_with("FAIL")).filter_map(|l| l.split_whitespace().next()).collect();
    ensure!(failing.contains(&level1.as_str()), "level-1 advance not listed as failing: {failing:?}");
    Ok(format!("{}; recoloured portal fails with exit 1", summary.join("; ")))
}
