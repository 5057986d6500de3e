//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use common::{ref_eval, symbol, word_of, RefMachine, Symbol};
use daia_core::eval::{evaluate, memoryless_label};
use daia_core::features::{evaluate_bank, extract_features, ClassifierVector, ThresholdConfig, BANK_SIZE};
use daia_core::fst::{LabeledFrame, Machine};
use daia_core::guard::{
    compile, default_table, format, parse, parse_guard, CompiledGuard, FstSpec, GuardExpr, Rule, TemporalOp,
    CANONICAL_SPEC, DEFAULT_SPEC,
};
use daia_core::intent::{accuracy, build_training_set, train, Hyperparams, IntentModel};
use daia_core::pipeline::{label_frames, percentile, signal_words, Engine, Pipeline};
use daia_core::skeleton::io::{parse_frame_record, write_frame_record};
use daia_core::skeleton::suite::{benchmark_suite, game_session, raise_hand_scenario};
use daia_core::skeleton::synth::generate_scenario;
use daia_core::skeleton::{Frame, JointId, Joints, Vec3};
use daia_core::EngagementState;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const JITTER_MM: f64 = 15.0;
const LATENCY_FRAMES: usize = 10_000;
const LATENCY_BUDGET_MS: f64 = 10.0;
const SUITE_TOTAL_MIN: f64 = 0.92;
const SUITE_STATE_MIN: f64 = 0.85;
const FST_MARGIN_MIN: f64 = 0.03;
const INTENT_TRAIN_FRAMES: usize = 5_000;
const INTENT_TEST_FRAMES: usize = 18_000;
const INTENT_MIN: f64 = 0.86;
const RELABEL_SCENARIOS: usize = 20;
const RELABEL_TOLERANCE: usize = 2;
const PROPERTY_CASES: u32 = 10_000;

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, ok: bool, name: &str, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures += 1;
        }
    }
}

fn engine() -> Arc<Engine> {
    let (frames, phases) = game_session(42, INTENT_TRAIN_FRAMES, JITTER_MM).unwrap();
    let cfg = Default::default();
    let data = build_training_set(&frames, &phases, &cfg).unwrap();
    let model = train(&data, &Hyperparams::default()).unwrap();
    Arc::new(Engine::new(cfg, model, default_table()))
}

fn latency(r: &mut Report, engine: &Arc<Engine>) {
    let (frames, _) = game_session(7, LATENCY_FRAMES, JITTER_MM).unwrap();
    let mut p = Pipeline::new(engine.clone());
    for f in &frames {
        p.process(f).unwrap();
    }
    let median = percentile(p.latencies(), 50.0).unwrap().as_secs_f64() * 1e3;
    let p99 = percentile(p.latencies(), 99.0).unwrap().as_secs_f64() * 1e3;
    r.line(
        median < LATENCY_BUDGET_MS,
        "latency",
        format!("median {median:.4} ms, p99 {p99:.4} ms over {LATENCY_FRAMES} frames (budget < {LATENCY_BUDGET_MS} ms)"),
    );
}

fn suite(r: &mut Report, engine: &Arc<Engine>) {
    let mut pred = Vec::new();
    let mut base = Vec::new();
    let mut truth = Vec::new();
    for scenario in benchmark_suite(42, JITTER_MM) {
        let (frames, labels) = generate_scenario(&scenario).unwrap();
        pred.extend(label_frames(engine, &frames).unwrap());
        base.extend(signal_words(engine, &frames).unwrap().into_iter().map(memoryless_label));
        truth.extend(labels);
    }
    let rep = evaluate(&pred, &truth).unwrap();
    let per_state: Vec<String> = EngagementState::ALL
        .iter()
        .map(|&s| format!("{} {:.1}%", s.code(), 100.0 * rep.accuracy_of(s).unwrap_or(0.0)))
        .collect();
    let states_ok = EngagementState::ALL
        .iter()
        .all(|&s| rep.accuracy_of(s).is_some_and(|a| a >= SUITE_STATE_MIN));
    r.line(
        rep.total_accuracy >= SUITE_TOTAL_MIN && states_ok,
        "suite accuracy",
        format!(
            "total {:.1}% (min {:.0}%), {} (min {:.0}% each), {} frames, boundary MAE {:.1}",
            100.0 * rep.total_accuracy,
            100.0 * SUITE_TOTAL_MIN,
            per_state.join(", "),
            100.0 * SUITE_STATE_MIN,
            rep.frame_count,
            rep.action_boundary_mae_frames,
        ),
    );

    let b = evaluate(&base, &truth).unwrap();
    let gain = rep.total_accuracy - b.total_accuracy;
    r.line(
        gain >= FST_MARGIN_MIN,
        "fst vs memoryless",
        format!(
            "fst {:.1}% vs memoryless {:.1}%, gain {:.1} pp (min {:.0} pp)",
            100.0 * rep.total_accuracy,
            100.0 * b.total_accuracy,
            100.0 * gain,
            100.0 * FST_MARGIN_MIN
        ),
    );
}

fn intent(r: &mut Report, engine: &Arc<Engine>) {
    let (frames, phases) = game_session(2024, INTENT_TEST_FRAMES, JITTER_MM).unwrap();
    let data = build_training_set(&frames, &phases, &engine.thresholds).unwrap();
    let acc = accuracy(&engine.model, &data);
    r.line(
        acc >= INTENT_MIN,
        "intent classifier",
        format!(
            "held-out accuracy {:.2}% on {INTENT_TEST_FRAMES} frames, trained on {INTENT_TRAIN_FRAMES} (min {:.0}%)",
            100.0 * acc,
            100.0 * INTENT_MIN
        ),
    );
}

fn relabel_boundary(r: &mut Report, engine: &Arc<Engine>) {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = 0usize;
    let mut misses = Vec::new();
    for k in 0..RELABEL_SCENARIOS {
        let frames_n = rng.random_range(10..=25u32);
        let travel = rng.random_range(420.0..650.0f64).min(66.0 * f64::from(frames_n));
        let speed = 1.5 * travel / f64::from(frames_n);
        let (scenario, onset) = raise_hand_scenario(k as u64, frames_n, speed, 0.0);
        let (frames, _) = generate_scenario(&scenario).unwrap();
        let labels = label_frames(engine, &frames).unwrap();
        match labels.iter().position(|&s| s == EngagementState::Action) {
            Some(first) => {
                let off = first.abs_diff(onset);
                worst = worst.max(off);
                if off > RELABEL_TOLERANCE {
                    misses.push(format!("N={frames_n} v={speed:.0}: {first}"));
                }
            }
            None => misses.push(format!("N={frames_n} v={speed:.0}: no Action")),
        }
    }
    r.line(
        misses.is_empty(),
        "relabel boundary",
        format!(
            "worst offset {worst} frames over {RELABEL_SCENARIOS} noiseless raises (tolerance ±{RELABEL_TOLERANCE}){}",
            if misses.is_empty() {
                String::new()
            } else {
                format!("; misses: {}", misses.join(", "))
            }
        ),
    );
}

const GUARD_SIGNALS: [&str; 4] = ["intent", "facing", "both_stopped", "any_moving"];
const RANDOM_GUARDS: usize = 300;

const SMALL_WINDOW_SPEC: &str = "\
initial Disengagement
state Disengagement {
  on facing && !special_any -> Attention
}
state Attention {
  on !facing -> Disengagement
  on intent && sustained(any_moving, 2) -> Action relabel speed_onset
  on intent && any_in(both_stopped, 3) -> Intention
}
state Intention {
  on !facing -> Disengagement
  on sustained(!intent, 3) -> Attention relabel intent_offset
  on none_in(both_stopped, 2) -> Action relabel speed_onset
}
state Action {
  on !facing -> Disengagement relabel motion_end
  on intent && sustained(both_stopped, 2) -> Intention relabel motion_end
  on sustained(!intent, 3) -> Attention relabel motion_end
}
";

fn random_guard(rng: &mut ChaCha8Rng, depth: u32, temporal: bool) -> GuardExpr {
    let leaf = |rng: &mut ChaCha8Rng| GuardExpr::signal(GUARD_SIGNALS[rng.random_range(0..4)]);
    if depth == 0 {
        return leaf(rng);
    }
    match rng.random_range(0..if temporal { 5 } else { 4 }) {
        0 => leaf(rng),
        1 => GuardExpr::not(random_guard(rng, depth - 1, temporal)),
        2 => GuardExpr::and(random_guard(rng, depth - 1, temporal), random_guard(rng, depth - 1, temporal)),
        3 => GuardExpr::or(random_guard(rng, depth - 1, temporal), random_guard(rng, depth - 1, temporal)),
        _ => GuardExpr::temporal(
            TemporalOp::ALL[rng.random_range(0..3)],
            random_guard(rng, depth - 1, false),
            rng.random_range(1..=4),
        ),
    }
}

/// All 16 combinations of the four guard signals.
fn full_alphabet() -> Vec<Symbol> {
    (0..16u32)
        .map(|c| (0..4).filter(|b| c >> b & 1 == 1).map(|b| GUARD_SIGNALS[b]).collect())
        .collect()
}

/// Returns (guards, histories checked, first mismatch).
fn guard_oracle() -> (usize, u64, Option<String>) {
    let mut guards: Vec<GuardExpr> = [
        "intent",
        "!facing || both_stopped",
        "sustained(intent, 4)",
        "any_in(both_stopped && facing, 3)",
        "none_in(any_moving, 4) && intent",
        "!sustained(!intent, 2) || none_in(facing, 1)",
        "sustained(intent || any_moving, 1) && any_in(!both_stopped, 4)",
    ]
    .iter()
    .map(|s| parse_guard(s).unwrap())
    .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    guards.extend((0..RANDOM_GUARDS).map(|_| random_guard(&mut rng, 4, true)));

    let alphabet = full_alphabet();
    let mut checked = 0u64;
    for g in &guards {
        let c = CompiledGuard::compile(g).unwrap();
        for len in 1..=4u32 {
            for code in 0..16u32.pow(len) {
                let syms: Vec<Symbol> = (0..len).map(|i| alphabet[(code >> (4 * i) & 15) as usize].clone()).collect();
                let words: Vec<u64> = syms.iter().map(word_of).collect();
                checked += 1;
                if c.eval(&words[..]) != ref_eval(g, &syms, syms.len() - 1) {
                    return (guards.len(), checked, Some(format!("`{g}` on {syms:?}")));
                }
            }
        }
    }
    (guards.len(), checked, None)
}

#[derive(Default)]
struct DfsStats {
    streams: u64,
    mismatch: Option<String>,
    chain_violation: Option<String>,
}

fn machine_labels(emitted: &[LabeledFrame], m: &Machine) -> Vec<EngagementState> {
    emitted.iter().copied().chain(m.pending()).map(|l| l.state).collect()
}

/// Enumerates every stream over `alphabet` up to `remaining` more frames,
/// comparing the machine with the reference after each step.
fn dfs(
    m: &Machine,
    emitted: &mut Vec<LabeledFrame>,
    r: &RefMachine,
    alphabet: &[Symbol],
    remaining: usize,
    stats: &mut DfsStats,
) {
    if remaining == 0 || stats.mismatch.is_some() {
        return;
    }
    for s in alphabet {
        let mut m2 = m.clone();
        let mut r2 = r.clone();
        let t = r.frames.len();
        let out = m2.step(t as u64, word_of(s));
        r2.push(s.clone());
        stats.streams += 1;
        if out.before == EngagementState::Disengagement
            && !matches!(out.state, EngagementState::Disengagement | EngagementState::Attention)
            && stats.chain_violation.is_none()
        {
            stats.chain_violation = Some(format!("D -> {} after {:?}", out.state, r2.frames));
        }
        let mark = emitted.len();
        emitted.extend(out.finalized.iter().copied());
        let in_order = emitted.iter().enumerate().all(|(i, l)| l.frame_index == i as u64);
        let got = machine_labels(emitted, &m2);
        if !in_order || got != r2.labels {
            stats.mismatch = Some(format!("{:?}: machine {got:?}, reference {:?}", r2.frames, r2.labels));
            return;
        }
        dfs(&m2, emitted, &r2, alphabet, remaining - 1, stats);
        emitted.truncate(mark);
    }
}

fn fst_oracle(spec_text: &str, depth: usize, alphabet: &[Symbol], max_len: usize) -> DfsStats {
    let spec = parse(spec_text).unwrap();
    let table = Arc::new(compile(&spec).unwrap());
    let m = Machine::with_depth(table, depth);
    let r = RefMachine::new(&spec, depth);
    let mut stats = DfsStats::default();
    dfs(&m, &mut Vec::new(), &r, alphabet, max_len, &mut stats);
    stats
}

fn oracle(r: &mut Report) {
    let (n_guards, histories, guard_miss) = guard_oracle();

    let reduced3 = [
        symbol(&["facing", "intent", "any_moving"]),
        symbol(&["facing", "intent", "both_stopped"]),
        symbol(&["facing", "both_stopped"]),
    ];
    let mut reduced4 = reduced3.to_vec();
    reduced4.push(symbol(&["both_stopped"]));
    let full = full_alphabet();
    let runs: [(&str, &str, usize, &[Symbol], usize); 7] = [
        ("canonical/3x12", CANONICAL_SPEC, 60, &reduced3, 12),
        ("canonical/4x9", CANONICAL_SPEC, 60, &reduced4, 9),
        ("canonical/16x5", CANONICAL_SPEC, 60, &full, 5),
        ("default/3x12", DEFAULT_SPEC, 60, &reduced3, 12),
        ("default/4x9", DEFAULT_SPEC, 60, &reduced4, 9),
        ("small-window M=4/4x10", SMALL_WINDOW_SPEC, 4, &reduced4, 10),
        ("small-window M=1/16x4", SMALL_WINDOW_SPEC, 1, &full, 4),
    ];
    let mut streams = 0;
    let mut misses = Vec::new();
    if let Some(m) = guard_miss {
        misses.push(format!("guard {m}"));
    }
    for (name, text, depth, alphabet, len) in runs {
        let st = fst_oracle(text, depth, alphabet, len);
        streams += st.streams;
        if let Some(m) = st.mismatch {
            misses.push(format!("{name}: {m}"));
        }
        if text == CANONICAL_SPEC {
            if let Some(v) = st.chain_violation {
                misses.push(format!("{name}: ordered chain {v}"));
            }
        }
    }
    r.line(
        misses.is_empty(),
        "oracle equivalence",
        format!(
            "{n_guards} guards over {histories} histories, {streams} stream prefixes across 7 spec/alphabet runs{}",
            if misses.is_empty() { String::new() } else { format!("; mismatches: {}", misses.join("; ")) }
        ),
    );
}

fn runner() -> TestRunner {
    let config = Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    TestRunner::new_with_rng(config, rng)
}

/// Integer-coordinate upper body at `origin`, turned by `yaw` degrees, with
/// per-joint offsets.
fn body(origin: [i32; 3], yaw: f64, offsets: [[i32; 3]; 10], frame_index: u64) -> Frame {
    let template = [
        (JointId::Head, [0.0, 500.0, 0.0]),
        (JointId::LeftShoulder, [200.0, 200.0, 0.0]),
        (JointId::RightShoulder, [-200.0, 200.0, 0.0]),
        (JointId::LeftElbow, [250.0, -50.0, 0.0]),
        (JointId::RightElbow, [-250.0, -50.0, 0.0]),
        (JointId::LeftHand, [250.0, -250.0, 0.0]),
        (JointId::RightHand, [-250.0, -250.0, 0.0]),
        (JointId::Torso, [0.0, 0.0, 0.0]),
        (JointId::LeftHip, [120.0, -250.0, 0.0]),
        (JointId::RightHip, [-120.0, -250.0, 0.0]),
    ];
    let (sin, cos) = yaw.to_radians().sin_cos();
    let mut joints = Joints::default();
    for (j, [x, y, z]) in template {
        let o = offsets[j.index()].map(f64::from);
        let (x, y, z) = (x + o[0], y + o[1], z + o[2]);
        let p = [x * cos + z * sin, y, -x * sin + z * cos];
        joints[j] = Vec3::new(
            (p[0].round()) + f64::from(origin[0]),
            (p[1].round()) + f64::from(origin[1]),
            (p[2].round()) + f64::from(origin[2]),
        );
    }
    Frame {
        frame_index,
        timestamp_ms: frame_index * 33,
        user_id: 1,
        joints,
    }
}

fn body_pair() -> impl Strategy<Value = (Frame, Frame, [i32; 3])> {
    let offsets = || prop::array::uniform10(prop::array::uniform3(-40i32..=40));
    let hand_moves = prop::array::uniform2(prop::array::uniform3(-500i32..=500));
    (
        prop::array::uniform3(-3000i32..=3000),
        -180.0f64..180.0,
        offsets(),
        offsets(),
        hand_moves,
        prop::array::uniform3(-100_000i32..=100_000),
    )
        .prop_map(|(origin, yaw, o1, mut o2, moves, shift)| {
            o2[JointId::RightHand.index()] = moves[0];
            o2[JointId::LeftHand.index()] = moves[1];
            (body(origin, yaw, o1, 0), body(origin, yaw, o2, 1), shift)
        })
}

fn classify(frame: &Frame, prev: &Frame, cfg: &ThresholdConfig) -> Option<ClassifierVector> {
    extract_features(frame, Some(prev), cfg).ok().map(|f| evaluate_bank(&f, cfg))
}

fn ones(b: &[bool]) -> usize {
    b.iter().filter(|&&x| x).count()
}

fn guard_strategy() -> BoxedStrategy<GuardExpr> {
    let names = prop::sample::select(vec!["facing", "intent", "a1", "r_hand_below_head", "sustained", "any_in"]);
    let plain = names.prop_map(GuardExpr::signal).prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(GuardExpr::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| GuardExpr::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| GuardExpr::or(a, b)),
        ]
    });
    let temporal = (prop::sample::select(TemporalOp::ALL.to_vec()), plain.clone(), 1u32..=1000)
        .prop_map(|(op, e, k)| GuardExpr::temporal(op, e, k));
    prop_oneof![plain.clone(), temporal].prop_recursive(2, 16, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(GuardExpr::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| GuardExpr::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| GuardExpr::or(a, b)),
        ]
    })
    .boxed()
}

fn spec_strategy() -> impl Strategy<Value = FstSpec> {
    let state = || prop::sample::select(EngagementState::ALL.to_vec());
    let policy = prop::option::of(prop::sample::select(vec![
        "speed_onset".to_string(),
        "motion_end".to_string(),
        "intent_offset".to_string(),
    ]));
    let rule = (guard_strategy(), state(), policy).prop_map(|(guard, target, relabel)| Rule {
        guard,
        target,
        relabel,
    })
    .boxed();
    let rules = || prop::collection::vec(rule.clone(), 0..4);
    (rules(), rules(), rules(), rules()).prop_map(|(a, b, c, d)| FstSpec {
        initial: EngagementState::Disengagement,
        rules: [a, b, c, d],
    })
}

fn finite_f64() -> impl Strategy<Value = f64> {
    use proptest::num::f64::{NEGATIVE, NORMAL, POSITIVE, SUBNORMAL, ZERO};
    POSITIVE | NEGATIVE | NORMAL | SUBNORMAL | ZERO
}

fn properties(r: &mut Report) {
    let cfg = ThresholdConfig::default();
    let canonical = Arc::new(compile(&parse(CANONICAL_SPEC).unwrap()).unwrap());
    let mut results: Vec<(&str, Result<(), String>)> = Vec::new();

    let chain = runner().run(
        &prop::collection::vec(0u64..1 << 42, 1..200),
        |words| {
            let mut m = Machine::new(canonical.clone());
            let mut emitted = Vec::new();
            for (i, &w) in words.iter().enumerate() {
                let out = m.step(i as u64, w);
                if out.before == EngagementState::Disengagement {
                    prop_assert!(
                        matches!(out.state, EngagementState::Disengagement | EngagementState::Attention),
                        "D -> {}",
                        out.state
                    );
                }
                emitted.extend(out.finalized.iter().map(|l| l.frame_index));
            }
            emitted.extend(m.flush().iter().map(|l| l.frame_index));
            prop_assert_eq!(emitted, (0..words.len() as u64).collect::<Vec<_>>());
            Ok(())
        },
    );
    results.push(("ordered chain + exactly-once emission", chain.map_err(|e| e.to_string())));

    let bands = runner().run(&body_pair(), |(prev, frame, _)| {
        let Some(g) = classify(&frame, &prev, &cfg) else {
            return Err(TestCaseError::reject("degenerate body"));
        };
        for hand in 0..2 {
            prop_assert_eq!(ones(&g.hand_horizontal(hand)), 1);
            prop_assert!(ones(&g.hand_vertical(hand)) <= 1);
            prop_assert_eq!(ones(&g.hand_depth(hand)), 1);
            prop_assert_eq!(ones(&g.hand_speed(hand)), 1);
        }
        prop_assert_eq!(ones(&g.leaning()), 1);
        Ok(())
    });
    results.push(("banded exclusivity", bands.map_err(|e| e.to_string())));

    let shift = |f: &Frame, d: [i32; 3]| {
        let mut f = *f;
        let d = Vec3::new(f64::from(d[0]), f64::from(d[1]), f64::from(d[2]));
        for p in f.joints.0.iter_mut() {
            *p = *p + d;
        }
        f
    };
    let translation = runner().run(&body_pair(), |(prev, frame, d)| {
        let Some(g) = classify(&frame, &prev, &cfg) else {
            return Err(TestCaseError::reject("degenerate body"));
        };
        let moved = classify(&shift(&frame, d), &shift(&prev, d), &cfg);
        prop_assert_eq!(moved, Some(g), "shift {:?}", d);
        Ok(())
    });
    results.push(("translation invariance", translation.map_err(|e| e.to_string())));

    let score = runner().run(
        &(prop::array::uniform32(finite_f64()), prop::array::uniform5(finite_f64()), finite_f64(), 0u64..1 << BANK_SIZE),
        |(w32, w5, bias, bits)| {
            let mut weights = [0.0; BANK_SIZE];
            weights[..32].copy_from_slice(&w32);
            weights[32..].copy_from_slice(&w5);
            let model = IntentModel {
                weights,
                bias,
                threshold: 0.5,
            };
            let s = model.score(ClassifierVector::from_bits(bits)).value();
            prop_assert!((0.0..=1.0).contains(&s), "score {}", s);
            Ok(())
        },
    );
    results.push(("score in [0,1]", score.map_err(|e| e.to_string())));

    let spec_rt = runner().run(&spec_strategy(), |spec| {
        let text = format(&spec);
        prop_assert_eq!(parse(&text).map_err(|e| TestCaseError::fail(e.to_string()))?, spec);
        Ok(())
    });
    results.push(("parse/format round trip", spec_rt.map_err(|e| e.to_string())));

    let frame_rt = runner().run(
        &(any::<u64>(), any::<u64>(), any::<u32>(), prop::array::uniform30(finite_f64())),
        |(i, t, u, c)| {
            let mut joints = Joints::default();
            for (k, p) in joints.0.iter_mut().enumerate() {
                *p = Vec3::new(c[3 * k], c[3 * k + 1], c[3 * k + 2]);
            }
            let f = Frame {
                frame_index: i,
                timestamp_ms: t,
                user_id: u,
                joints,
            };
            let back = parse_frame_record(&write_frame_record(&f)).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(
                back.frame_index == f.frame_index
                    && back.timestamp_ms == f.timestamp_ms
                    && back.user_id == f.user_id
                    && back.joints.0.iter().zip(f.joints.0.iter()).all(|(a, b)| a.to_array().map(f64::to_bits)
                        == b.to_array().map(f64::to_bits)),
                "{:?} -> {:?}",
                f,
                back
            );
            Ok(())
        },
    );
    results.push(("frame read/write round trip", frame_rt.map_err(|e| e.to_string())));

    let failed: Vec<String> = results
        .iter()
        .filter_map(|(n, res)| res.as_ref().err().map(|e| format!("{n}: {e}")))
        .collect();
    let names: Vec<&str> = results.iter().map(|(n, _)| *n).collect();
    r.line(
        failed.is_empty(),
        "structural properties",
        format!(
            "{} properties x {PROPERTY_CASES} cases ({}){}",
            results.len(),
            names.join(", "),
            if failed.is_empty() { String::new() } else { format!("; failures: {}", failed.join("; ")) }
        ),
    );
}

fn main() -> ExitCode {
    let mut r = Report { failures: 0 };
    let t = Instant::now();
    let engine = engine();
    latency(&mut r, &engine);
    suite(&mut r, &engine);
    intent(&mut r, &engine);
    relabel_boundary(&mut r, &engine);
    oracle(&mut r);
    properties(&mut r);
    eprintln!("acceptance finished in {:.1} s", t.elapsed().as_secs_f64());
    if r.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
