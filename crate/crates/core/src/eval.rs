//! Scoring predicted label sequences against ground truth.

use std::fmt::Write as _;

use thiserror::Error;

use crate::guard::signals;
use crate::EngagementState;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("prediction has {pred} frames but truth has {truth}")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("no frames to evaluate")]
    EmptyInput,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Recall per true state; `None` when the state never occurs in truth.
    pub per_state_accuracy: [Option<f64>; 4],
    pub total_accuracy: f64,
    /// `confusion[truth][pred]`.
    pub confusion: [[u64; 4]; 4],
    pub action_boundary_mae_frames: f64,
    pub frame_count: u64,
}

impl EvalReport {
    pub fn accuracy_of(&self, s: EngagementState) -> Option<f64> {
        self.per_state_accuracy[s.index()]
    }

    pub fn truth_count(&self, s: EngagementState) -> u64 {
        self.confusion[s.index()].iter().sum()
    }
}

pub fn evaluate(pred: &[EngagementState], truth: &[EngagementState]) -> Result<EvalReport, EvalError> {
    if pred.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut confusion = [[0u64; 4]; 4];
    for (p, t) in pred.iter().zip(truth) {
        confusion[t.index()][p.index()] += 1;
    }
    let per_state_accuracy = std::array::from_fn(|i| {
        let n: u64 = confusion[i].iter().sum();
        (n > 0).then(|| confusion[i][i] as f64 / n as f64)
    });
    let correct: u64 = (0..4).map(|i| confusion[i][i]).sum();
    Ok(EvalReport {
        per_state_accuracy,
        total_accuracy: correct as f64 / pred.len() as f64,
        confusion,
        action_boundary_mae_frames: boundary_mae(&segments(pred), &segments(truth)),
        frame_count: pred.len() as u64,
    })
}

/// Maximal runs of Action as inclusive `(start, end)` frame offsets.
pub fn action_segments(labels: &[EngagementState]) -> Vec<(usize, usize)> {
    segments(labels)
}

fn segments(labels: &[EngagementState]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &s) in labels.iter().enumerate() {
        match (s == EngagementState::Action, start) {
            (true, None) => start = Some(i),
            (false, Some(b)) => {
                out.push((b, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(b) = start {
        out.push((b, labels.len() - 1));
    }
    out
}

/// Greedy nearest-start matching: repeatedly pair the closest unmatched
/// predicted and true starts. A matched pair contributes its start and end
/// offsets; an unmatched segment contributes its length for both.
fn boundary_mae(pred: &[(usize, usize)], truth: &[(usize, usize)]) -> f64 {
    let mut pairs: Vec<(usize, usize, usize)> = Vec::with_capacity(pred.len() * truth.len());
    for (i, p) in pred.iter().enumerate() {
        for (j, t) in truth.iter().enumerate() {
            pairs.push((p.0.abs_diff(t.0), i, j));
        }
    }
    pairs.sort_unstable();
    let mut pred_used = vec![false; pred.len()];
    let mut truth_used = vec![false; truth.len()];
    let mut sum = 0.0;
    let mut terms = 0usize;
    for (d, i, j) in pairs {
        if pred_used[i] || truth_used[j] {
            continue;
        }
        pred_used[i] = true;
        truth_used[j] = true;
        sum += (d + pred[i].1.abs_diff(truth[j].1)) as f64;
        terms += 2;
    }
    let unmatched = pred
        .iter()
        .zip(&pred_used)
        .chain(truth.iter().zip(&truth_used))
        .filter(|(_, used)| !**used);
    for (seg, _) in unmatched {
        sum += 2.0 * (seg.1 - seg.0 + 1) as f64;
        terms += 2;
    }
    if terms == 0 {
        0.0
    } else {
        sum / terms as f64
    }
}

fn percent(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| format!("{:.1}%", 100.0 * v))
}

/// Fixed-width accuracy table with a Total row, then the confusion matrix.
pub fn render_report(r: &EvalReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<14} {:>8} {:>9}", "State", "Frames", "Accuracy");
    for state in EngagementState::ALL {
        let _ = writeln!(
            s,
            "{:<14} {:>8} {:>9}",
            state.name(),
            r.truth_count(state),
            percent(r.accuracy_of(state))
        );
    }
    let _ = writeln!(
        s,
        "{:<14} {:>8} {:>9}",
        "Total",
        r.frame_count,
        percent(Some(r.total_accuracy))
    );
    let _ = writeln!(s);
    let _ = writeln!(s, "Action boundary MAE: {:.1} frames", r.action_boundary_mae_frames);
    let _ = writeln!(s);
    let _ = write!(s, "{:<14}", "truth\\pred");
    for state in EngagementState::ALL {
        let _ = write!(s, " {:>8}", state.code());
    }
    let _ = writeln!(s);
    for state in EngagementState::ALL {
        let _ = write!(s, "{:<14}", state.name());
        for n in r.confusion[state.index()] {
            let _ = write!(s, " {n:>8}");
        }
        let _ = writeln!(s);
    }
    s
}

/// Newline-delimited `key value` form of a report.
pub fn report_key_values(r: &EvalReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "frame_count {}", r.frame_count);
    let _ = writeln!(s, "total_accuracy {}", r.total_accuracy);
    for state in EngagementState::ALL {
        let v = r.accuracy_of(state).map_or("nan".to_string(), |v| v.to_string());
        let _ = writeln!(s, "accuracy.{} {v}", state.name());
    }
    let _ = writeln!(s, "action_boundary_mae_frames {}", r.action_boundary_mae_frames);
    for t in EngagementState::ALL {
        for p in EngagementState::ALL {
            let _ = writeln!(s, "confusion.{}.{} {}", t.code(), p.code(), r.confusion[t.index()][p.index()]);
        }
    }
    s
}

/// Per-frame labeling with no transducer: the facing and intent bits mapped
/// straight to a state.
pub fn memoryless_label(word: u64) -> EngagementState {
    use signals::{get, ANY_MOVING, FACING, INTENT, SPECIAL_ANY};
    if !get(word, FACING) || get(word, SPECIAL_ANY) {
        EngagementState::Disengagement
    } else if get(word, INTENT) && get(word, ANY_MOVING) {
        EngagementState::Action
    } else if get(word, INTENT) {
        EngagementState::Intention
    } else {
        EngagementState::Attention
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use EngagementState::*;

    #[test]
    fn identity_is_perfect() {
        let labels = [Disengagement, Attention, Intention, Action, Action, Attention];
        let r = evaluate(&labels, &labels).unwrap();
        assert_eq!(r.total_accuracy, 1.0);
        assert!(r.per_state_accuracy.iter().all(|a| *a == Some(1.0)));
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(r.confusion[i][j], 0);
                }
            }
        }
        assert_eq!(r.action_boundary_mae_frames, 0.0);
        let text = render_report(&r);
        assert_eq!(text.matches("100.0%").count(), 5);
        assert_eq!(text, render_report(&r));
    }

    #[test]
    fn half_attention() {
        let truth = [Attention; 4];
        let pred = [Attention, Attention, Intention, Intention];
        let r = evaluate(&pred, &truth).unwrap();
        assert_eq!(r.accuracy_of(Attention), Some(0.5));
        assert_eq!(r.accuracy_of(Action), None);
        assert!(render_report(&r).contains("n/a"));
    }

    #[test]
    fn errors() {
        assert_eq!(evaluate(&[], &[]), Err(EvalError::EmptyInput));
        assert_eq!(
            evaluate(&[Action], &[]),
            Err(EvalError::LengthMismatch { pred: 1, truth: 0 })
        );
    }

    #[test]
    fn boundary_error_counts_offsets_and_misses() {
        let truth = [Attention, Action, Action, Action, Attention, Attention, Attention];
        let pred = [Attention, Attention, Action, Action, Action, Attention, Action];
        let r = evaluate(&pred, &truth).unwrap();
        // matched: start 1 vs 2, end 3 vs 4; unmatched [6,6]: 1 + 1
        assert_eq!(r.action_boundary_mae_frames, (1.0 + 1.0 + 1.0 + 1.0) / 4.0);
        assert_eq!(action_segments(&pred), [(2, 4), (6, 6)]);
    }

    #[test]
    fn baseline_mapping() {
        use signals::{ANY_MOVING, FACING, INTENT, SPECIAL_ANY};
        let w = |bits: &[usize]| bits.iter().fold(0u64, |w, &b| w | 1 << b);
        assert_eq!(memoryless_label(w(&[INTENT, ANY_MOVING])), Disengagement);
        assert_eq!(memoryless_label(w(&[FACING, SPECIAL_ANY])), Disengagement);
        assert_eq!(memoryless_label(w(&[FACING])), Attention);
        assert_eq!(memoryless_label(w(&[FACING, INTENT])), Intention);
        assert_eq!(memoryless_label(w(&[FACING, INTENT, ANY_MOVING])), Action);
    }

    #[test]
    fn key_values_list_every_cell() {
        let r = evaluate(&[Action, Attention], &[Action, Intention]).unwrap();
        let kv = report_key_values(&r);
        assert_eq!(kv.lines().filter(|l| l.starts_with("confusion.")).count(), 16);
        assert!(kv.contains("confusion.I.A 1"));
    }
}
