use std::fmt;
use std::str::FromStr;

/// The four engagement levels, ordered from least to most engaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EngagementState {
    Disengagement,
    Attention,
    Intention,
    Action,
}

impl EngagementState {
    pub const ALL: [EngagementState; 4] = [
        EngagementState::Disengagement,
        EngagementState::Attention,
        EngagementState::Intention,
        EngagementState::Action,
    ];

    /// Position in [`EngagementState::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    /// Single-letter code used by label files and the session protocol.
    pub fn code(self) -> &'static str {
        match self {
            EngagementState::Disengagement => "D",
            EngagementState::Attention => "A",
            EngagementState::Intention => "I",
            EngagementState::Action => "X",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "D" => Some(EngagementState::Disengagement),
            "A" => Some(EngagementState::Attention),
            "I" => Some(EngagementState::Intention),
            "X" => Some(EngagementState::Action),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EngagementState::Disengagement => "Disengagement",
            EngagementState::Attention => "Attention",
            EngagementState::Intention => "Intention",
            EngagementState::Action => "Action",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

impl fmt::Display for EngagementState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown engagement state `{0}`")]
pub struct ParseStateError(pub String);

impl FromStr for EngagementState {
    type Err = ParseStateError;

    /// Accepts either the full name or the one-letter code.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_name(s)
            .or_else(|| Self::from_code(s))
            .ok_or_else(|| ParseStateError(s.to_string()))
    }
}
