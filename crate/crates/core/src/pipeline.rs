//! Per-frame wiring of features, classifier bank, intent model and
//! transducer, with one independent session per user.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::features::{evaluate_bank, extract_features, ClassifierVector, FeatureError, ThresholdConfig};
use crate::fst::{LabeledFrame, Machine, StepOutput, DEFAULT_BUFFER_DEPTH};
use crate::guard::{signals, TransitionTable};
use crate::intent::{EngagementScore, IntentModel};
use crate::skeleton::Frame;

/// Immutable artifacts shared by every session.
#[derive(Debug, Clone)]
pub struct Engine {
    pub thresholds: ThresholdConfig,
    pub model: IntentModel,
    pub table: Arc<TransitionTable>,
    pub buffer_depth: usize,
}

impl Engine {
    pub fn new(thresholds: ThresholdConfig, model: IntentModel, table: TransitionTable) -> Self {
        Engine {
            thresholds,
            model,
            table: Arc::new(table),
            buffer_depth: DEFAULT_BUFFER_DEPTH,
        }
    }

    pub fn session(self: &Arc<Self>) -> Session {
        Session {
            machine: Machine::with_depth(self.table.clone(), self.buffer_depth),
            engine: self.clone(),
            prev: None,
        }
    }

    /// Classifier vector, score and intent for one frame.
    pub fn classify(
        &self,
        frame: &Frame,
        prev: Option<&Frame>,
    ) -> Result<(ClassifierVector, EngagementScore, bool, [f64; 2]), FeatureError> {
        let f = extract_features(frame, prev, &self.thresholds)?;
        let g = evaluate_bank(&f, &self.thresholds);
        let (score, intent) = self.model.intent(g);
        Ok((g, score, intent, [f.hands[0].speed, f.hands[1].speed]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameResult {
    pub g: ClassifierVector,
    pub word: u64,
    pub score: EngagementScore,
    pub intent: bool,
    /// `[right, left]` hand speed, mm/frame; zero on a user's first frame.
    pub speed: [f64; 2],
    pub step: StepOutput,
}

/// One user's stream state.
#[derive(Debug, Clone)]
pub struct Session {
    engine: Arc<Engine>,
    machine: Machine,
    prev: Option<Frame>,
}

impl Session {
    pub fn machine(&self) -> &Machine {
        &self.machine
    }

    pub fn process(&mut self, frame: &Frame) -> Result<FrameResult, FeatureError> {
        let (g, score, intent, speed) = self.engine.classify(frame, self.prev.as_ref())?;
        self.prev = Some(*frame);
        let word = signals::signal_word(g, intent);
        let step = self.machine.step(frame.frame_index, word);
        Ok(FrameResult {
            g,
            word,
            score,
            intent,
            speed,
            step,
        })
    }

    pub fn flush(&mut self) -> Vec<LabeledFrame> {
        self.machine.flush()
    }

    pub fn reset(&mut self) {
        self.machine.reset();
        self.prev = None;
    }
}

/// Routes a mixed stream to per-user sessions and collects finalized labels.
#[derive(Debug)]
pub struct Pipeline {
    engine: Arc<Engine>,
    sessions: BTreeMap<u32, Session>,
    latencies: Vec<Duration>,
}

impl Pipeline {
    pub fn new(engine: Arc<Engine>) -> Self {
        Pipeline {
            engine,
            sessions: BTreeMap::new(),
            latencies: Vec::new(),
        }
    }

    /// Processes one frame and records its wall-clock latency.
    pub fn process(&mut self, frame: &Frame) -> Result<FrameResult, FeatureError> {
        let start = Instant::now();
        let engine = &self.engine;
        let session = self
            .sessions
            .entry(frame.user_id)
            .or_insert_with(|| engine.session());
        let out = session.process(frame);
        self.latencies.push(start.elapsed());
        out
    }

    /// Flushes every session, in user id order.
    pub fn finish(&mut self) -> Vec<(u32, LabeledFrame)> {
        let mut out = Vec::new();
        for (&user, s) in &mut self.sessions {
            out.extend(s.flush().into_iter().map(|f| (user, f)));
        }
        out
    }

    pub fn latencies(&self) -> &[Duration] {
        &self.latencies
    }
}

/// Nearest-rank percentile of `samples`; `None` when empty.
pub fn percentile(samples: &[Duration], p: f64) -> Option<Duration> {
    if samples.is_empty() {
        return None;
    }
    let mut v = samples.to_vec();
    v.sort_unstable();
    let rank = ((p / 100.0) * v.len() as f64).ceil().max(1.0) as usize;
    Some(v[rank.min(v.len()) - 1])
}

/// Labels a single-user stream end to end: one final label per frame, in
/// input order.
pub fn label_frames(engine: &Arc<Engine>, frames: &[Frame]) -> Result<Vec<crate::EngagementState>, FeatureError> {
    let mut s = engine.session();
    let mut out = Vec::with_capacity(frames.len());
    for f in frames {
        out.extend(s.process(f)?.step.finalized.iter().map(|l| l.state));
    }
    out.extend(s.flush().iter().map(|l| l.state));
    Ok(out)
}

/// Signal words of a single-user stream, for analysis without the machine.
pub fn signal_words(engine: &Engine, frames: &[Frame]) -> Result<Vec<u64>, FeatureError> {
    let mut prev = None;
    frames
        .iter()
        .map(|f| {
            let (g, _, intent, _) = engine.classify(f, prev)?;
            prev = Some(f);
            Ok(signals::signal_word(g, intent))
        })
        .collect()
}
