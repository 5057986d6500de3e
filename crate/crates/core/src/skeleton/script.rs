//! Line-oriented scenario scripts.
//!
//! ```text
//! # comment
//! seed 42
//! fps 30
//! jitter 5
//! start away            # or `facing`
//! face_sensor 30
//! raise_right_hand 15 40
//! idle 30
//! ```

use thiserror::Error;

use super::synth::{Primitive, PrimitiveKind, Scenario, StartPose, SynthError};

#[derive(Debug, Error, PartialEq)]
pub enum ScriptError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Primitive {
        line: usize,
        #[source]
        source: SynthError,
    },
}

fn syntax(line: usize, message: impl Into<String>) -> ScriptError {
    ScriptError::Syntax {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(line: usize, what: &str, tok: Option<&str>) -> Result<T, ScriptError> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| syntax(line, format!("invalid {what} `{tok}`")))
}

pub fn parse_script(text: &str) -> Result<Scenario, ScriptError> {
    let mut scenario = Scenario::default();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut toks = content.split_whitespace();
        let head = toks.next().expect("non-empty line has a token");
        match head {
            "seed" => scenario.seed = number(line, "seed", toks.next())?,
            "fps" => {
                scenario.fps = number(line, "fps", toks.next())?;
                if scenario.fps == 0 {
                    return Err(syntax(line, "fps must be positive"));
                }
            }
            "jitter" => {
                let v: f64 = number(line, "jitter", toks.next())?;
                if !v.is_finite() || v < 0.0 {
                    return Err(syntax(line, "jitter must be a non-negative number"));
                }
                scenario.jitter_sigma_mm = v;
            }
            "start" => {
                scenario.start = match toks.next() {
                    Some("away") => StartPose::Away,
                    Some("facing") => StartPose::Facing,
                    other => {
                        return Err(syntax(
                            line,
                            format!("start expects `away` or `facing`, got {other:?}"),
                        ))
                    }
                }
            }
            "user" => scenario.user_id = number(line, "user id", toks.next())?,
            kind => {
                let kind: PrimitiveKind = kind
                    .parse()
                    .map_err(|source| ScriptError::Primitive { line, source })?;
                let duration_frames = number(line, "duration", toks.next())?;
                let peak_speed = match toks.next() {
                    Some(tok) => {
                        let v: f64 = number(line, "peak speed", Some(tok))?;
                        if !v.is_finite() || v < 0.0 {
                            return Err(ScriptError::Primitive {
                                line,
                                source: SynthError::BadSpeed(v, kind),
                            });
                        }
                        Some(v)
                    }
                    None => None,
                };
                scenario.steps.push(Primitive {
                    kind,
                    duration_frames,
                    peak_speed,
                });
            }
        }
        if let Some(extra) = toks.next() {
            return Err(syntax(line, format!("unexpected token `{extra}`")));
        }
    }
    Ok(scenario)
}

pub fn format_script(scenario: &Scenario) -> String {
    let mut out = format!(
        "seed {}\nfps {}\njitter {}\nstart {}\nuser {}\n",
        scenario.seed,
        scenario.fps,
        scenario.jitter_sigma_mm,
        match scenario.start {
            StartPose::Away => "away",
            StartPose::Facing => "facing",
        },
        scenario.user_id,
    );
    for p in &scenario.steps {
        match p.peak_speed {
            Some(v) => out.push_str(&format!("{} {} {}\n", p.kind, p.duration_frames, v)),
            None => out.push_str(&format!("{} {}\n", p.kind, p.duration_frames)),
        }
    }
    out
}
