//! The engagement transducer: runs a [`TransitionTable`] over per-frame
//! signal words, keeps a buffer of not-yet-final labels that transitions may
//! rewrite, and emits frames once they leave the buffer.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use crate::guard::{RelabelPolicy, TransitionTable};
use crate::EngagementState;

/// Frames kept open for relabeling (2 s at 30 fps).
pub const DEFAULT_BUFFER_DEPTH: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabeledFrame {
    pub frame_index: u64,
    pub state: EngagementState,
    pub finalized: bool,
}

/// Frames `from..=to` were rewritten to `state`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelabelEvent {
    pub from: u64,
    pub to: u64,
    pub state: EngagementState,
    pub policy: RelabelPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutput {
    pub frame_index: u64,
    pub before: EngagementState,
    pub state: EngagementState,
    /// Id of the rule that fired, `None` for a self-loop.
    pub rule: Option<String>,
    pub relabel: Option<RelabelEvent>,
    pub finalized: Vec<LabeledFrame>,
}

impl StepOutput {
    /// One trace line: `index before rule after relabel`, with `-` for
    /// absent fields and the relabel span as `from..to`.
    pub fn trace_line(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for StepOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {}",
            self.frame_index,
            self.before.code(),
            self.rule.as_deref().unwrap_or("-"),
            self.state.code()
        )?;
        match &self.relabel {
            Some(r) => write!(f, " {}..{}", r.from, r.to),
            None => f.write_str(" -"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    frame_index: u64,
    word: u64,
    state: EngagementState,
}

/// One user's transducer. Single owner; build one per stream.
#[derive(Debug, Clone)]
pub struct Machine {
    table: Arc<TransitionTable>,
    state: EngagementState,
    history: VecDeque<u64>,
    buffer: VecDeque<Slot>,
    depth: usize,
}

impl Machine {
    pub fn new(table: Arc<TransitionTable>) -> Self {
        Self::with_depth(table, DEFAULT_BUFFER_DEPTH)
    }

    pub fn with_depth(table: Arc<TransitionTable>, depth: usize) -> Self {
        let state = table.initial();
        let window = table.max_window();
        Machine {
            table,
            state,
            history: VecDeque::with_capacity(window + 1),
            buffer: VecDeque::with_capacity(depth + 1),
            depth,
        }
    }

    pub fn state(&self) -> EngagementState {
        self.state
    }

    pub fn buffer_depth(&self) -> usize {
        self.depth
    }

    pub fn table(&self) -> &Arc<TransitionTable> {
        &self.table
    }

    /// Current labels of the frames still open for relabeling, oldest first.
    pub fn pending(&self) -> impl Iterator<Item = LabeledFrame> + '_ {
        self.buffer.iter().map(|s| LabeledFrame {
            frame_index: s.frame_index,
            state: s.state,
            finalized: false,
        })
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    /// Back to the initial state with empty history, dropping the buffer.
    pub fn reset(&mut self) {
        self.state = self.table.initial();
        self.history.clear();
        self.buffer.clear();
    }

    pub fn step(&mut self, frame_index: u64, word: u64) -> StepOutput {
        if self.history.len() == self.table.max_window() {
            self.history.pop_front();
        }
        self.history.push_back(word);

        let before = self.state;
        let fired = self.table.fire(before, &self.history);
        let (rule, relabel_policy) = match fired {
            Some(r) => {
                self.state = r.target;
                (Some(r.id.clone()), r.relabel)
            }
            None => (None, None),
        };

        self.buffer.push_back(Slot {
            frame_index,
            word,
            state: self.state,
        });
        let mut finalized = Vec::new();
        while self.buffer.len() > self.depth.max(1) {
            let s = self.buffer.pop_front().expect("non-empty buffer");
            finalized.push(LabeledFrame {
                frame_index: s.frame_index,
                state: s.state,
                finalized: true,
            });
        }
        let relabel = relabel_policy.map(|p| self.relabel(p));
        if self.depth == 0 {
            finalized.extend(self.flush());
        }

        StepOutput {
            frame_index,
            before,
            state: self.state,
            rule,
            relabel,
            finalized,
        }
    }

    /// Relabels every buffered frame after the most recent anchor frame
    /// preceding the transition frame (the whole buffer if there is none).
    fn relabel(&mut self, policy: RelabelPolicy) -> RelabelEvent {
        let last = self.buffer.len() - 1;
        let run = policy.min_run();
        let start = (0..last)
            .rev()
            .find(|&p| p + 1 >= run && (p + 1 - run..=p).all(|q| policy.is_anchor(self.buffer[q].word)))
            .map_or(0, |p| p + 1);
        let state = self.state;
        for s in self.buffer.range_mut(start..) {
            s.state = state;
        }
        RelabelEvent {
            from: self.buffer[start].frame_index,
            to: self.buffer[last].frame_index,
            state,
            policy,
        }
    }

    /// Finalizes and returns everything still buffered.
    pub fn flush(&mut self) -> Vec<LabeledFrame> {
        self.buffer
            .drain(..)
            .map(|s| LabeledFrame {
                frame_index: s.frame_index,
                state: s.state,
                finalized: true,
            })
            .collect()
    }
}

/// Runs a fresh machine over `words` (frame indices 0..) and returns the
/// final label of every frame.
pub fn label_stream(table: Arc<TransitionTable>, depth: usize, words: &[u64]) -> Vec<EngagementState> {
    let mut m = Machine::with_depth(table, depth);
    let mut out = Vec::with_capacity(words.len());
    for (i, &w) in words.iter().enumerate() {
        out.extend(m.step(i as u64, w).finalized.iter().map(|f| f.state));
    }
    out.extend(m.flush().iter().map(|f| f.state));
    out
}
