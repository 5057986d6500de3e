use std::fmt;

use crate::EngagementState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemporalOp {
    /// Holds on each of the last `k` frames.
    Sustained,
    /// Holds on at least one of the last `k` frames.
    AnyIn,
    /// Holds on none of the last `k` frames.
    NoneIn,
}

impl TemporalOp {
    pub const ALL: [TemporalOp; 3] = [TemporalOp::Sustained, TemporalOp::AnyIn, TemporalOp::NoneIn];

    pub fn keyword(self) -> &'static str {
        match self {
            TemporalOp::Sustained => "sustained",
            TemporalOp::AnyIn => "any_in",
            TemporalOp::NoneIn => "none_in",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|op| op.keyword() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GuardExpr {
    Signal(String),
    Not(Box<GuardExpr>),
    And(Box<GuardExpr>, Box<GuardExpr>),
    Or(Box<GuardExpr>, Box<GuardExpr>),
    Temporal {
        op: TemporalOp,
        expr: Box<GuardExpr>,
        window: u32,
    },
}

impl GuardExpr {
    pub fn signal(name: &str) -> Self {
        GuardExpr::Signal(name.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: GuardExpr) -> Self {
        GuardExpr::Not(Box::new(e))
    }

    pub fn and(a: GuardExpr, b: GuardExpr) -> Self {
        GuardExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: GuardExpr, b: GuardExpr) -> Self {
        GuardExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn temporal(op: TemporalOp, e: GuardExpr, window: u32) -> Self {
        GuardExpr::Temporal {
            op,
            expr: Box::new(e),
            window,
        }
    }

    /// Signal names in first-occurrence order.
    pub fn signals(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.visit_signals(&mut |s| {
            if !out.contains(&s) {
                out.push(s)
            }
        });
        out
    }

    fn visit_signals<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        match self {
            GuardExpr::Signal(s) => f(s),
            GuardExpr::Not(e) | GuardExpr::Temporal { expr: e, .. } => e.visit_signals(f),
            GuardExpr::And(a, b) | GuardExpr::Or(a, b) => {
                a.visit_signals(f);
                b.visit_signals(f);
            }
        }
    }

    /// Largest temporal window, 1 for a purely instantaneous guard.
    pub fn max_window(&self) -> u32 {
        match self {
            GuardExpr::Signal(_) => 1,
            GuardExpr::Not(e) => e.max_window(),
            GuardExpr::And(a, b) | GuardExpr::Or(a, b) => a.max_window().max(b.max_window()),
            GuardExpr::Temporal { expr, window, .. } => (*window).max(expr.max_window()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            GuardExpr::Or(..) => 1,
            GuardExpr::And(..) => 2,
            GuardExpr::Not(_) => 3,
            GuardExpr::Signal(_) | GuardExpr::Temporal { .. } => 4,
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Prints with the fewest parentheses that re-parse to the same tree
/// (binary operators associate to the left).
impl fmt::Display for GuardExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuardExpr::Signal(s) => f.write_str(s),
            GuardExpr::Not(e) => {
                f.write_str("!")?;
                e.fmt_operand(f, 3)
            }
            GuardExpr::And(a, b) => {
                a.fmt_operand(f, 2)?;
                f.write_str(" && ")?;
                b.fmt_operand(f, 3)
            }
            GuardExpr::Or(a, b) => {
                a.fmt_operand(f, 1)?;
                f.write_str(" || ")?;
                b.fmt_operand(f, 2)
            }
            GuardExpr::Temporal { op, expr, window } => {
                write!(f, "{}({expr}, {window})", op.keyword())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub guard: GuardExpr,
    pub target: EngagementState,
    pub relabel: Option<String>,
}

/// Parsed transducer description: an initial state and, for every state, its
/// rules in priority order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FstSpec {
    pub initial: EngagementState,
    pub rules: [Vec<Rule>; 4],
}

impl FstSpec {
    pub fn rules_of(&self, state: EngagementState) -> &[Rule] {
        &self.rules[state.index()]
    }

    pub fn rule_count(&self) -> usize {
        self.rules.iter().map(Vec::len).sum()
    }
}

impl fmt::Display for FstSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "initial {}", self.initial)?;
        for state in EngagementState::ALL {
            writeln!(f)?;
            writeln!(f, "state {state} {{")?;
            for rule in self.rules_of(state) {
                write!(f, "  on {} -> {}", rule.guard, rule.target)?;
                if let Some(p) = &rule.relabel {
                    write!(f, " relabel {p}")?;
                }
                writeln!(f)?;
            }
            writeln!(f, "}}")?;
        }
        Ok(())
    }
}

/// Canonical text of a spec; `parse(&format(s)) == s`.
pub fn format(spec: &FstSpec) -> String {
    spec.to_string()
}
