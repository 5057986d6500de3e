//! Reference interpreters written straight from the semantics, independent
//! of the compiled guard and machine code.
#![allow(dead_code)]

use std::collections::BTreeSet;

use daia_core::guard::signals::signal_index;
use daia_core::guard::{FstSpec, GuardExpr, TemporalOp};
use daia_core::EngagementState;

/// One frame as the set of signal names that are true.
pub type Symbol = BTreeSet<&'static str>;

pub fn symbol(names: &[&'static str]) -> Symbol {
    names.iter().copied().collect()
}

/// The packed word the machine sees for a symbol.
pub fn word_of(s: &Symbol) -> u64 {
    s.iter()
        .map(|n| 1u64 << signal_index(n).expect("known signal"))
        .fold(0, |a, b| a | b)
}

/// Value of `e` at frame `t` of `frames`.
pub fn ref_eval(e: &GuardExpr, frames: &[Symbol], t: usize) -> bool {
    match e {
        GuardExpr::Signal(name) => frames[t].contains(name.as_str()),
        GuardExpr::Not(a) => !ref_eval(a, frames, t),
        GuardExpr::And(a, b) => ref_eval(a, frames, t) && ref_eval(b, frames, t),
        GuardExpr::Or(a, b) => ref_eval(a, frames, t) || ref_eval(b, frames, t),
        GuardExpr::Temporal { op, expr, window } => {
            let k = *window as usize;
            let first = (t + 1).saturating_sub(k);
            let mut hits = 0;
            for j in first..=t {
                if ref_eval(expr, frames, j) {
                    hits += 1;
                }
            }
            let seen = t + 1 - first;
            match op {
                TemporalOp::Sustained => t + 1 >= k && hits == k,
                TemporalOp::AnyIn => hits > 0,
                TemporalOp::NoneIn => hits == 0 && seen > 0,
            }
        }
    }
}

fn anchor(policy: &str, s: &Symbol) -> bool {
    match policy {
        "speed_onset" => s.contains("both_stopped"),
        "motion_end" => !s.contains("both_stopped"),
        "intent_offset" => s.contains("intent"),
        other => panic!("unknown policy {other}"),
    }
}

fn anchor_run(policy: &str) -> usize {
    if policy == "motion_end" {
        2
    } else {
        1
    }
}

/// Spec interpreter: keeps every frame and label, relabels within the last
/// `depth` frames.
#[derive(Clone)]
pub struct RefMachine<'a> {
    pub spec: &'a FstSpec,
    pub depth: usize,
    pub frames: Vec<Symbol>,
    pub state: EngagementState,
    pub labels: Vec<EngagementState>,
}

impl<'a> RefMachine<'a> {
    pub fn new(spec: &'a FstSpec, depth: usize) -> Self {
        RefMachine {
            spec,
            depth,
            frames: Vec::new(),
            state: spec.initial,
            labels: Vec::new(),
        }
    }

    pub fn push(&mut self, s: Symbol) {
        self.frames.push(s);
        let t = self.frames.len() - 1;
        let mut policy = None;
        for rule in self.spec.rules_of(self.state) {
            if ref_eval(&rule.guard, &self.frames, t) {
                self.state = rule.target;
                policy = rule.relabel.clone();
                break;
            }
        }
        self.labels.push(self.state);
        if let Some(p) = policy {
            let open_from = (t + 1).saturating_sub(self.depth.max(1));
            let run = anchor_run(&p);
            let mut start = open_from;
            let mut p_idx = t;
            while p_idx > open_from {
                p_idx -= 1;
                if p_idx + 1 >= open_from + run
                    && (p_idx + 1 - run..=p_idx).all(|q| anchor(&p, &self.frames[q]))
                {
                    start = p_idx + 1;
                    break;
                }
            }
            for l in &mut self.labels[start..=t] {
                *l = self.state;
            }
        }
    }
}

/// Final labels of a whole stream under the reference semantics.
pub fn oracle_labels(spec: &FstSpec, depth: usize, frames: &[Symbol]) -> Vec<EngagementState> {
    let mut m = RefMachine::new(spec, depth);
    for s in frames {
        m.push(s.clone());
    }
    m.labels
}
