mod common;

use common::{daia, model, ok, p, scratch};
use daia_core::guard::{parse, CANONICAL_SPEC};
use daia_core::skeleton::read_labels;
use daia_core::EngagementState;

const RAISE_600: &str = "\
seed 7
jitter 15
face_sensor 30
idle 30
raise_right_hand 20 40
idle 40
swipe_lr 40 30
swipe_rl 40 30
swipe_lr 40 30
swipe_rl 40 30
lower_hand 30
idle 60
raise_right_hand 20 40
idle 40
swipe_lr 50 30
swipe_rl 50 30
swipe_lr 70 30
";

#[test]
fn run_labels_every_frame_and_ends_in_action() {
    let dir = scratch();
    let (script, stream, truth, labels, trace) = (
        dir.join("raise.txt"),
        dir.join("raise.ndjson"),
        dir.join("truth.ndjson"),
        dir.join("labels.ndjson"),
        dir.join("trace.txt"),
    );
    std::fs::write(&script, RAISE_600).unwrap();
    ok(&["synth", "--input", p(&script), "--out", p(&stream), "--truth", p(&truth)]);
    let stdout = ok(&[
        "run", "--input", p(&stream), "--model", p(model()), "--out", p(&labels), "--trace", p(&trace),
    ]);
    assert!(stdout.contains("labelled 600 frames") && stdout.contains("p50"), "{stdout}");

    let got = read_labels(&std::fs::read_to_string(&labels).unwrap()).unwrap();
    assert_eq!(got.len(), 600);
    assert!(got.iter().enumerate().all(|(i, (idx, _))| *idx == i as u64));
    let tail: Vec<_> = got[580..].iter().map(|(_, s)| *s).collect();
    assert!(tail.iter().all(|&s| s == EngagementState::Action), "{tail:?}");

    let trace = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(trace.lines().count(), 600);
    assert!(trace.lines().next().unwrap().starts_with("0 D "));

    let report = ok(&["eval", "--input", p(&labels), "--truth", p(&truth)]);
    assert!(report.contains("Total"), "{report}");
}

#[test]
fn run_is_deterministic() {
    let dir = scratch();
    let (script, stream) = (dir.join("s.txt"), dir.join("s.ndjson"));
    std::fs::write(&script, "seed 3\nface_sensor 30\nraise_left_hand 15 40\nidle 30\n").unwrap();
    ok(&["synth", "--input", p(&script), "--out", p(&stream)]);
    let outs: Vec<String> = (0..2)
        .map(|k| {
            let out = dir.join(format!("labels{k}.ndjson"));
            ok(&["run", "--input", p(&stream), "--model", p(model()), "--out", p(&out)]);
            std::fs::read_to_string(out).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn missing_model_is_an_io_error_naming_the_path() {
    let dir = scratch();
    let stream = dir.join("s.ndjson");
    let script = dir.join("s.txt");
    std::fs::write(&script, "face_sensor 10\n").unwrap();
    ok(&["synth", "--input", p(&script), "--out", p(&stream)]);
    let missing = dir.join("no_such_model.txt");
    let out = daia(&["run", "--input", p(&stream), "--model", p(&missing), "--out", p(&dir.join("l"))]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(p(&missing)), "{err}");
}

#[test]
fn invalid_inputs_are_validation_errors() {
    let dir = scratch();
    let bad_stream = dir.join("bad.ndjson");
    std::fs::write(&bad_stream, "{\"i\":0,\"t\":0,\"u\":1,\"j\":[[0,0,0]]}\n").unwrap();
    let out = daia(&["run", "--input", p(&bad_stream), "--model", p(model()), "--out", p(&dir.join("l"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("joints"));

    let bad_spec = dir.join("bad.fst");
    std::fs::write(&bad_spec, "initial Disengagement\nstate Disengagement { on facing && -> Attention }\n").unwrap();
    let out = daia(&["fst-check", "--fst", p(&bad_spec)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("2:36"));
}

#[test]
fn train_reaches_held_out_floor() {
    let dir = scratch();
    let (game, phases, m) = (dir.join("g.ndjson"), dir.join("p.ndjson"), dir.join("m.txt"));
    ok(&["synth", "--game", "5000", "--seed", "9", "--out", p(&game), "--phases", p(&phases)]);
    let out = ok(&["train", "--input", p(&game), "--phases", p(&phases), "--out", p(&m)]);
    let acc: f64 = out
        .split("held-out accuracy ")
        .nth(1)
        .and_then(|s| s.split_whitespace().next())
        .and_then(|s| s.parse().ok())
        .unwrap_or_else(|| panic!("no accuracy in {out}"));
    assert!(acc >= 0.86, "{out}");
    assert!(std::fs::read_to_string(m).unwrap().contains("threshold"));
}

#[test]
fn eval_identity_is_perfect() {
    let dir = scratch();
    let (script, stream, truth) = (dir.join("s.txt"), dir.join("s.ndjson"), dir.join("t.ndjson"));
    std::fs::write(&script, "face_sensor 30\nraise_right_hand 15 40\nidle 20\nturn_away 20\n").unwrap();
    ok(&["synth", "--input", p(&script), "--out", p(&stream), "--truth", p(&truth)]);
    let report = ok(&["eval", "--input", p(&truth), "--truth", p(&truth)]);
    let total = report.lines().find(|l| l.starts_with("Total")).unwrap();
    assert!(total.ends_with("100.0%"), "{report}");
}

#[test]
fn eval_rejects_mismatched_lengths() {
    let dir = scratch();
    let (a, b) = (dir.join("a"), dir.join("b"));
    std::fs::write(&a, "{\"i\":0,\"state\":\"A\"}\n").unwrap();
    std::fs::write(&b, "{\"i\":0,\"state\":\"A\"}\n{\"i\":1,\"state\":\"D\"}\n").unwrap();
    assert_eq!(daia(&["eval", "--input", p(&a), "--truth", p(&b)]).status.code(), Some(1));
}

#[test]
fn fst_check_prints_formatted_spec() {
    let dir = scratch();
    let spec = dir.join("canonical.fst");
    std::fs::write(&spec, CANONICAL_SPEC).unwrap();
    let out = ok(&["fst-check", "--fst", p(&spec)]);
    assert_eq!(parse(&out).unwrap(), parse(CANONICAL_SPEC).unwrap());
    assert!(out.starts_with("initial Disengagement"));
}
