use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::ast::{FstSpec, GuardExpr, TemporalOp};
use super::signals::{self, signal_index};
use crate::EngagementState;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("unknown signal `{0}`")]
    UnknownSignal(String),
    #[error("unknown relabel policy `{0}`")]
    UnknownRelabelPolicy(String),
}

/// Recent signal words, newest at lag 0. `len` may be shorter than a guard's
/// window at the start of a stream.
pub trait History {
    fn len(&self) -> usize;
    fn at(&self, lag: usize) -> u64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Oldest first, so the current frame is the last element.
impl History for [u64] {
    fn len(&self) -> usize {
        <[u64]>::len(self)
    }
    fn at(&self, lag: usize) -> u64 {
        self[<[u64]>::len(self) - 1 - lag]
    }
}

impl History for VecDeque<u64> {
    fn len(&self) -> usize {
        VecDeque::len(self)
    }
    fn at(&self, lag: usize) -> u64 {
        self[VecDeque::len(self) - 1 - lag]
    }
}

/// A guard with every signal resolved to its bit in the signal word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompiledGuard {
    Signal(usize),
    Not(Box<CompiledGuard>),
    And(Box<CompiledGuard>, Box<CompiledGuard>),
    Or(Box<CompiledGuard>, Box<CompiledGuard>),
    Temporal {
        op: TemporalOp,
        expr: Box<CompiledGuard>,
        window: usize,
    },
}

impl CompiledGuard {
    pub fn compile(e: &GuardExpr) -> Result<Self, CompileError> {
        Ok(match e {
            GuardExpr::Signal(name) => {
                CompiledGuard::Signal(signal_index(name).ok_or_else(|| CompileError::UnknownSignal(name.clone()))?)
            }
            GuardExpr::Not(a) => CompiledGuard::Not(Box::new(Self::compile(a)?)),
            GuardExpr::And(a, b) => CompiledGuard::And(Box::new(Self::compile(a)?), Box::new(Self::compile(b)?)),
            GuardExpr::Or(a, b) => CompiledGuard::Or(Box::new(Self::compile(a)?), Box::new(Self::compile(b)?)),
            GuardExpr::Temporal { op, expr, window } => CompiledGuard::Temporal {
                op: *op,
                expr: Box::new(Self::compile(expr)?),
                window: *window as usize,
            },
        })
    }

    /// Value at `lag` frames back. Temporal operators only look at frames
    /// that exist: `sustained` is false until `k` frames have been seen,
    /// `any_in` scans what is available.
    pub fn eval_at<H: History + ?Sized>(&self, h: &H, lag: usize) -> bool {
        match self {
            CompiledGuard::Signal(i) => signals::get(h.at(lag), *i),
            CompiledGuard::Not(a) => !a.eval_at(h, lag),
            CompiledGuard::And(a, b) => a.eval_at(h, lag) && b.eval_at(h, lag),
            CompiledGuard::Or(a, b) => a.eval_at(h, lag) || b.eval_at(h, lag),
            CompiledGuard::Temporal { op, expr, window } => {
                let avail = h.len() - lag;
                match op {
                    TemporalOp::Sustained => {
                        avail >= *window && (lag..lag + window).all(|l| expr.eval_at(h, l))
                    }
                    TemporalOp::AnyIn => (lag..lag + (*window).min(avail)).any(|l| expr.eval_at(h, l)),
                    TemporalOp::NoneIn => !(lag..lag + (*window).min(avail)).any(|l| expr.eval_at(h, l)),
                }
            }
        }
    }

    /// Value on the newest frame. `h` must not be empty.
    pub fn eval<H: History + ?Sized>(&self, h: &H) -> bool {
        self.eval_at(h, 0)
    }

    pub fn max_window(&self) -> usize {
        match self {
            CompiledGuard::Signal(_) => 1,
            CompiledGuard::Not(a) => a.max_window(),
            CompiledGuard::And(a, b) | CompiledGuard::Or(a, b) => a.max_window().max(b.max_window()),
            CompiledGuard::Temporal { expr, window, .. } => (*window).max(expr.max_window()),
        }
    }
}

/// How a transition back-dates its target label over the unfinalized buffer.
/// Each policy names an anchor: the scan walks back from the frame before the
/// transition to the most recent anchor frame (the last frame of a run of
/// [`RelabelPolicy::min_run`] anchor frames), and every frame after it takes
/// the new state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelabelPolicy {
    /// Anchor: both hands stopped. Back-dates an Action to the motion onset.
    SpeedOnset,
    /// Anchor: a hand still moving. Back-dates the end of an Action.
    MotionEnd,
    /// Anchor: intent present. Back-dates the loss of intent.
    IntentOffset,
}

impl RelabelPolicy {
    pub const ALL: [RelabelPolicy; 3] = [
        RelabelPolicy::SpeedOnset,
        RelabelPolicy::MotionEnd,
        RelabelPolicy::IntentOffset,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelabelPolicy::SpeedOnset => "speed_onset",
            RelabelPolicy::MotionEnd => "motion_end",
            RelabelPolicy::IntentOffset => "intent_offset",
        }
    }

    /// Consecutive anchor frames needed to count as an anchor. Motion must
    /// last two frames so that a single jitter spike is not taken as the end
    /// of a gesture.
    pub fn min_run(self) -> usize {
        match self {
            RelabelPolicy::MotionEnd => 2,
            RelabelPolicy::SpeedOnset | RelabelPolicy::IntentOffset => 1,
        }
    }

    pub fn is_anchor(self, word: u64) -> bool {
        match self {
            RelabelPolicy::SpeedOnset => signals::get(word, signals::BOTH_STOPPED),
            RelabelPolicy::MotionEnd => !signals::get(word, signals::BOTH_STOPPED),
            RelabelPolicy::IntentOffset => signals::get(word, signals::INTENT),
        }
    }
}

impl fmt::Display for RelabelPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelabelPolicy {
    type Err = CompileError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| CompileError::UnknownRelabelPolicy(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledRule {
    /// `C<from><to>` with states numbered 1..4, plus a letter suffix when a
    /// state has several rules to the same target.
    pub id: String,
    pub from: EngagementState,
    pub guard: CompiledGuard,
    pub target: EngagementState,
    pub relabel: Option<RelabelPolicy>,
}

/// Executable transition function. Immutable once built and safe to share
/// between machines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionTable {
    initial: EngagementState,
    rules: [Vec<CompiledRule>; 4],
    max_window: usize,
}

impl TransitionTable {
    pub fn initial(&self) -> EngagementState {
        self.initial
    }

    pub fn rules(&self, state: EngagementState) -> &[CompiledRule] {
        &self.rules[state.index()]
    }

    /// Longest window any guard looks at; the history a machine must keep.
    pub fn max_window(&self) -> usize {
        self.max_window
    }

    /// First rule of `state` whose guard holds on `h`; `None` is a self-loop.
    pub fn fire<H: History + ?Sized>(&self, state: EngagementState, h: &H) -> Option<&CompiledRule> {
        self.rules(state).iter().find(|r| r.guard.eval(h))
    }

    pub fn next<H: History + ?Sized>(&self, state: EngagementState, h: &H) -> EngagementState {
        self.fire(state, h).map_or(state, |r| r.target)
    }
}

pub fn compile(spec: &FstSpec) -> Result<TransitionTable, CompileError> {
    let mut rules: [Vec<CompiledRule>; 4] = Default::default();
    let mut max_window = 1;
    for from in EngagementState::ALL {
        for rule in spec.rules_of(from) {
            let guard = CompiledGuard::compile(&rule.guard)?;
            let relabel = rule.relabel.as_deref().map(str::parse).transpose()?;
            max_window = max_window.max(guard.max_window());
            let base = format!("C{}{}", from.index() + 1, rule.target.index() + 1);
            let dup = rules[from.index()]
                .iter()
                .filter(|r: &&CompiledRule| r.target == rule.target)
                .count();
            let id = if dup == 0 {
                base
            } else {
                format!("{base}{}", (b'a' + dup as u8) as char)
            };
            rules[from.index()].push(CompiledRule {
                id,
                from,
                guard,
                target: rule.target,
                relabel,
            });
        }
    }
    Ok(TransitionTable {
        initial: spec.initial,
        rules,
        max_window,
    })
}
