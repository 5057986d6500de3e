use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use daia_core::eval::{evaluate, render_report};
use daia_core::features::ThresholdConfig;
use daia_core::guard::{compile, default_table, format, parse, TransitionTable, DEFAULT_SPEC};
use daia_core::intent::{accuracy, build_training_set, train, Hyperparams, IntentModel};
use daia_core::pipeline::{percentile, Engine, Pipeline};
use daia_core::skeleton::script::parse_script;
use daia_core::skeleton::suite::{game_session, GamePhase};
use daia_core::skeleton::synth::generate_scenario;
use daia_core::skeleton::{read_frames, read_labels, write_frame_record, write_label_record, Frame};
use daia_core::EngagementState;
use serde::{Deserialize, Serialize};

use crate::args::{EngineArgs, EvalArgs, FstCheckArgs, RunArgs, SynthArgs, TrainArgs};
use crate::error::{read_file, write_file, CliError};

pub fn load_thresholds(path: Option<&Path>) -> Result<ThresholdConfig, CliError> {
    match path {
        Some(p) => ThresholdConfig::parse(&read_file(p)?).map_err(|e| CliError::invalid(p, e)),
        None => Ok(ThresholdConfig::default()),
    }
}

pub fn load_table(path: Option<&Path>) -> Result<(TransitionTable, String), CliError> {
    let Some(p) = path else {
        return Ok((default_table(), DEFAULT_SPEC.to_string()));
    };
    let text = read_file(p)?;
    let spec = parse(&text).map_err(|e| CliError::invalid(p, e))?;
    let table = compile(&spec).map_err(|e| CliError::invalid(p, e))?;
    Ok((table, format(&spec)))
}

pub fn load_engine(args: &EngineArgs) -> Result<Arc<Engine>, CliError> {
    let model = IntentModel::from_text(&read_file(&args.model)?).map_err(|e| CliError::invalid(&args.model, e))?;
    let thresholds = load_thresholds(args.thresholds.as_deref())?;
    let (table, _) = load_table(args.fst.as_deref())?;
    let mut engine = Engine::new(thresholds, model, table);
    engine.buffer_depth = args.depth;
    Ok(Arc::new(engine))
}

fn load_frames(path: &Path) -> Result<Vec<Frame>, CliError> {
    read_frames(&read_file(path)?).map_err(|e| CliError::invalid(path, e))
}

fn ms(d: Option<std::time::Duration>) -> f64 {
    d.map_or(0.0, |d| d.as_secs_f64() * 1e3)
}

pub fn run(args: &RunArgs) -> Result<String, CliError> {
    let engine = load_engine(&args.engine)?;
    let frames = load_frames(&args.input)?;
    let mut pipeline = Pipeline::new(engine);
    let mut labels = String::new();
    let mut trace = String::new();
    for f in &frames {
        let r = pipeline
            .process(f)
            .map_err(|e| CliError::invalid(&args.input, e))?;
        for l in &r.step.finalized {
            labels.push_str(&write_label_record(l.frame_index, l.state));
            labels.push('\n');
        }
        trace.push_str(&r.step.trace_line());
        trace.push('\n');
    }
    for (_, l) in pipeline.finish() {
        labels.push_str(&write_label_record(l.frame_index, l.state));
        labels.push('\n');
    }
    write_file(&args.out, &labels)?;
    if let Some(p) = &args.trace {
        write_file(p, &trace)?;
    }
    let lat = pipeline.latencies();
    Ok(format!(
        "labelled {} frames; latency ms p50 {:.4} p90 {:.4} p99 {:.4} max {:.4}\n",
        frames.len(),
        ms(percentile(lat, 50.0)),
        ms(percentile(lat, 90.0)),
        ms(percentile(lat, 99.0)),
        ms(percentile(lat, 100.0)),
    ))
}

#[derive(Debug, Serialize, Deserialize)]
struct PhaseRecord {
    i: u64,
    phase: String,
}

fn read_phases(path: &Path) -> Result<Vec<GamePhase>, CliError> {
    let text = read_file(path)?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |m: String| CliError::invalid(path, format!("line {}: {m}", n + 1));
        let rec: PhaseRecord = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        out.push(rec.phase.parse().map_err(bad)?);
    }
    Ok(out)
}

pub fn train_cmd(args: &TrainArgs) -> Result<String, CliError> {
    if !(args.split > 0.0 && args.split < 1.0) {
        return Err(CliError::Validation(format!("--split {} must be in (0, 1)", args.split)));
    }
    let cfg = load_thresholds(args.thresholds.as_deref())?;
    let frames = load_frames(&args.input)?;
    let phases = read_phases(&args.phases)?;
    let data = build_training_set(&frames, &phases, &cfg).map_err(|e| CliError::Validation(e.to_string()))?;
    let cut = (data.len() as f64 * args.split) as usize;
    let (fit, held) = data.split_at(cut);
    if fit.is_empty() || held.is_empty() {
        return Err(CliError::Validation(format!("{} frames is too few to split", data.len())));
    }
    let hp = Hyperparams {
        seed: args.seed,
        ..Hyperparams::default()
    };
    let model = train(fit, &hp).map_err(|e| CliError::Validation(e.to_string()))?;
    write_file(&args.out, &model.to_text())?;
    Ok(format!(
        "trained on {} frames; held-out accuracy {:.4} on {} frames\n",
        fit.len(),
        accuracy(&model, held),
        held.len()
    ))
}

fn load_labels(path: &Path) -> Result<Vec<(u64, EngagementState)>, CliError> {
    read_labels(&read_file(path)?).map_err(|e| CliError::invalid(path, e))
}

pub fn eval_cmd(args: &EvalArgs) -> Result<String, CliError> {
    let pred = load_labels(&args.input)?;
    let truth = load_labels(&args.truth)?;
    if pred.len() != truth.len() {
        return Err(CliError::Validation(format!(
            "{} predicted labels but {} ground-truth labels",
            pred.len(),
            truth.len()
        )));
    }
    if let Some(((p, _), (t, _))) = pred.iter().zip(&truth).find(|((p, _), (t, _))| p != t) {
        return Err(CliError::Validation(format!("frame index {p} in predictions against {t} in ground truth")));
    }
    let p: Vec<_> = pred.into_iter().map(|(_, s)| s).collect();
    let t: Vec<_> = truth.into_iter().map(|(_, s)| s).collect();
    let report = evaluate(&p, &t).map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(render_report(&report))
}

fn frames_text(frames: &[Frame]) -> String {
    let mut s = String::new();
    for f in frames {
        s.push_str(&write_frame_record(f));
        s.push('\n');
    }
    s
}

pub fn synth_cmd(args: &SynthArgs) -> Result<String, CliError> {
    if let Some(n) = args.game {
        let Some(phases_path) = &args.phases else {
            return Err(CliError::Validation("--game needs --phases".into()));
        };
        let (frames, phases) =
            game_session(args.seed.unwrap_or(0), n, args.jitter).map_err(|e| CliError::Validation(e.to_string()))?;
        write_file(&args.out, &frames_text(&frames))?;
        let mut text = String::new();
        for (f, p) in frames.iter().zip(&phases) {
            let rec = PhaseRecord {
                i: f.frame_index,
                phase: p.name().to_string(),
            };
            let _ = writeln!(text, "{}", serde_json::to_string(&rec).expect("phase record serializes"));
        }
        write_file(phases_path, &text)?;
        return Ok(format!("wrote {} game frames\n", frames.len()));
    }

    let path = args.input.as_deref().expect("clap requires --input or --game");
    let mut scenario = parse_script(&read_file(path)?).map_err(|e| CliError::invalid(path, e))?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    let (frames, truth) = generate_scenario(&scenario).map_err(|e| CliError::invalid(path, e))?;
    write_file(&args.out, &frames_text(&frames))?;
    if let Some(p) = &args.truth {
        let mut text = String::new();
        for (f, s) in frames.iter().zip(&truth) {
            text.push_str(&write_label_record(f.frame_index, *s));
            text.push('\n');
        }
        write_file(p, &text)?;
    }
    Ok(format!("wrote {} frames\n", frames.len()))
}

pub fn fst_check(args: &FstCheckArgs) -> Result<String, CliError> {
    let (table, text) = load_table(args.fst.as_deref())?;
    let rules: usize = EngagementState::ALL.iter().map(|&s| table.rules(s).len()).sum();
    eprintln!("ok: {rules} rules, max window {}", table.max_window());
    Ok(text)
}
