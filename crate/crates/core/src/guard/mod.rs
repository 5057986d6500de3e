//! Text DSL for the engagement transducer: guards over classifier signals with
//! temporal window operators, parsed into an [`FstSpec`] and compiled into a
//! [`TransitionTable`].

mod ast;
mod compile;
mod parser;
pub mod signals;

pub use ast::{format, FstSpec, GuardExpr, Rule, TemporalOp};
pub use compile::{compile, CompileError, CompiledGuard, CompiledRule, History, RelabelPolicy, TransitionTable};
pub use parser::{parse, parse_guard, ParseError};

/// The nine rules of the reference transducer, verbatim.
///
/// Once a hand is lowered in `Action` (intent drops) nothing here leads back
/// to `Attention`, so the engine ships [`DEFAULT_SPEC`] instead.
pub const CANONICAL_SPEC: &str = "\
initial Disengagement

state Disengagement {
  on facing && !special_any -> Attention
}

state Attention {
  on !facing || special_any -> Disengagement
  on intent && any_in(both_stopped, 10) -> Intention
  on intent && sustained(any_moving, 5) -> Action relabel speed_onset
}

state Intention {
  on !facing || special_any -> Disengagement
  on sustained(!intent, 15) -> Attention
  on intent && sustained(any_moving, 5) -> Action relabel speed_onset
}

state Action {
  on !facing || special_any -> Disengagement
  on intent && sustained(both_stopped, 10) -> Intention
}
";

/// Engine default: [`CANONICAL_SPEC`] plus an `Action -> Attention` exit once
/// intent has been absent for 15 frames, and back-dating relabels on the
/// Action and Intention exits.
pub const DEFAULT_SPEC: &str = "\
initial Disengagement

state Disengagement {
  on facing && !special_any -> Attention
}

state Attention {
  on !facing || special_any -> Disengagement
  on intent && sustained(any_moving, 5) -> Action relabel speed_onset
  on intent && any_in(both_stopped, 10) -> Intention
}

state Intention {
  on !facing || special_any -> Disengagement
  on sustained(!intent, 15) -> Attention relabel intent_offset
  on sustained(any_moving, 5) -> Action relabel speed_onset
}

state Action {
  on !facing || special_any -> Disengagement
  on intent && sustained(both_stopped, 10) -> Intention relabel motion_end
  on sustained(!intent, 15) -> Attention relabel motion_end
}
";

/// Parses and compiles [`DEFAULT_SPEC`].
pub fn default_table() -> TransitionTable {
    compile(&parse(DEFAULT_SPEC).expect("default spec parses")).expect("default spec compiles")
}
