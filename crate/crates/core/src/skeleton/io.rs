//! Newline-delimited frame and label records.
//!
//! A frame record is one JSON object per line:
//!
//! ```text
//! {"i":12,"t":400,"u":1,"j":[[x,y,z], ... 10 triples in JointId order]}
//! ```
//!
//! Coordinates are written with shortest round-trip precision, so
//! `parse_frame_record(&write_frame_record(f)) == f` bit for bit. Bare
//! `NaN` / `Infinity` tokens, as emitted by some JSON writers, are accepted
//! by the reader only so that they can be reported as [`StreamError::NonFinite`].
//!
//! Label records are `{"i":12,"state":"X"}` with the one-letter state codes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Frame, JointId, Joints, Vec3};
use crate::EngagementState;

#[derive(Debug, Error, PartialEq)]
pub enum StreamError {
    #[error("record has {found} joints, expected 10")]
    MissingJoint { found: usize },
    #[error("non-finite coordinate on joint {joint}")]
    NonFinite { joint: JointId },
    #[error("malformed record: {0}")]
    Malformed(String),
    #[error("frame index {index} does not follow {previous}")]
    NonMonotonicIndex { previous: u64, index: u64 },
    #[error("timestamp {timestamp} precedes {previous}")]
    NonMonotonicTimestamp { previous: u64, timestamp: u64 },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<StreamError>,
    },
}

impl StreamError {
    fn at_line(self, line: usize) -> StreamError {
        StreamError::AtLine {
            line,
            source: Box::new(self),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrame {
    i: u64,
    t: u64,
    u: u32,
    j: Vec<Vec<Option<f64>>>,
}

#[derive(Serialize)]
struct OutFrame<'a> {
    i: u64,
    t: u64,
    u: u32,
    j: &'a [[f64; 3]; JointId::COUNT],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelRecord<'a> {
    i: u64,
    state: &'a str,
}

/// Replaces non-JSON float literals outside string literals with `null`.
fn neutralize_float_literals(line: &str) -> std::borrow::Cow<'_, str> {
    const TOKENS: [&str; 5] = ["-Infinity", "Infinity", "NaN", "-inf", "inf"];
    if !TOKENS.iter().any(|t| line.contains(t)) {
        return std::borrow::Cow::Borrowed(line);
    }
    let mut out = String::with_capacity(line.len());
    let mut in_string = false;
    let mut escaped = false;
    let mut rest = line;
    while let Some(c) = rest.chars().next() {
        if in_string {
            out.push(c);
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
            }
            rest = &rest[c.len_utf8()..];
            continue;
        }
        if c == '"' {
            in_string = true;
            out.push(c);
            rest = &rest[1..];
            continue;
        }
        if let Some(tok) = TOKENS.iter().find(|t| rest.starts_with(**t)) {
            out.push_str("null");
            rest = &rest[tok.len()..];
            continue;
        }
        out.push(c);
        rest = &rest[c.len_utf8()..];
    }
    std::borrow::Cow::Owned(out)
}

pub fn parse_frame_record(line: &str) -> Result<Frame, StreamError> {
    let text = neutralize_float_literals(line.trim());
    let raw: RawFrame =
        serde_json::from_str(&text).map_err(|e| StreamError::Malformed(e.to_string()))?;
    if raw.j.len() < JointId::COUNT {
        return Err(StreamError::MissingJoint { found: raw.j.len() });
    }
    if raw.j.len() > JointId::COUNT {
        return Err(StreamError::Malformed(format!(
            "{} joints, expected 10",
            raw.j.len()
        )));
    }
    let mut joints = Joints::default();
    for (joint, triple) in JointId::ALL.into_iter().zip(&raw.j) {
        if triple.len() != 3 {
            return Err(StreamError::Malformed(format!(
                "joint {joint} has {} coordinates",
                triple.len()
            )));
        }
        let mut xyz = [0.0; 3];
        for (dst, src) in xyz.iter_mut().zip(triple) {
            match src {
                Some(v) if v.is_finite() => *dst = *v,
                _ => return Err(StreamError::NonFinite { joint }),
            }
        }
        joints[joint] = Vec3::from(xyz);
    }
    Ok(Frame {
        frame_index: raw.i,
        timestamp_ms: raw.t,
        user_id: raw.u,
        joints,
    })
}

/// Canonical single-line encoding of a frame, without trailing newline.
pub fn write_frame_record(frame: &Frame) -> String {
    let j = frame.joints.0.map(Vec3::to_array);
    serde_json::to_string(&OutFrame {
        i: frame.frame_index,
        t: frame.timestamp_ms,
        u: frame.user_id,
        j: &j,
    })
    .expect("frame serialization is infallible")
}

/// Parses a whole stream, checking index and timestamp ordering per user.
/// Blank lines are skipped.
pub fn read_frames(text: &str) -> Result<Vec<Frame>, StreamError> {
    let mut frames: Vec<Frame> = Vec::new();
    let mut last: std::collections::HashMap<u32, (u64, u64)> = Default::default();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let frame = parse_frame_record(line).map_err(|e| e.at_line(n + 1))?;
        if let Some(&(prev_i, prev_t)) = last.get(&frame.user_id) {
            if frame.frame_index <= prev_i {
                return Err(StreamError::NonMonotonicIndex {
                    previous: prev_i,
                    index: frame.frame_index,
                }
                .at_line(n + 1));
            }
            if frame.timestamp_ms < prev_t {
                return Err(StreamError::NonMonotonicTimestamp {
                    previous: prev_t,
                    timestamp: frame.timestamp_ms,
                }
                .at_line(n + 1));
            }
        }
        last.insert(frame.user_id, (frame.frame_index, frame.timestamp_ms));
        frames.push(frame);
    }
    Ok(frames)
}

pub fn write_label_record(index: u64, state: EngagementState) -> String {
    serde_json::to_string(&LabelRecord {
        i: index,
        state: state.code(),
    })
    .expect("label serialization is infallible")
}

pub fn parse_label_record(line: &str) -> Result<(u64, EngagementState), StreamError> {
    let rec: LabelRecord<'_> =
        serde_json::from_str(line.trim()).map_err(|e| StreamError::Malformed(e.to_string()))?;
    let state = EngagementState::from_code(rec.state)
        .ok_or_else(|| StreamError::Malformed(format!("unknown state code `{}`", rec.state)))?;
    Ok((rec.i, state))
}

pub fn read_labels(text: &str) -> Result<Vec<(u64, EngagementState)>, StreamError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| parse_label_record(l).map_err(|e| e.at_line(n + 1)))
        .collect()
}
