//! Interactive sessions over TCP. Each connection gets its own synthetic body
//! and pipeline session, ticked at a fixed frame rate by the server; client
//! control messages are applied between ticks.
//!
//! Client to server, one JSON object per line:
//!
//! ```text
//! {"type":"gesture","name":"raise_right_hand","frames":15,"speed":40}
//! {"type":"pose","joint":"right_hand","target":[x,y,z],"frames":10}
//! {"type":"reset"}
//! ```
//!
//! Server to client, one update per frame, and an error object for any
//! message that cannot be applied:
//!
//! ```text
//! {"i":12,"state":"A","score":0.1,"g":"0100...","speed_r":3.2,"speed_l":0.4,"relabel":null}
//! {"type":"error","message":"..."}
//! ```

use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::mpsc::{self, TryRecvError};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use daia_core::pipeline::{Engine, Session};
use daia_core::skeleton::synth::{Primitive, PrimitiveKind, StartPose, Step, SynthConfig, Synthesizer};
use daia_core::skeleton::{JointId, Vec3};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Control {
    Gesture {
        name: String,
        frames: u32,
        speed: Option<f64>,
    },
    Pose {
        joint: String,
        target: [f64; 3],
        frames: u32,
    },
    Reset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Update {
    pub i: u64,
    pub state: String,
    pub score: f64,
    pub g: String,
    pub speed_r: f64,
    pub speed_l: f64,
    pub relabel: Option<[u64; 2]>,
}

#[derive(Debug, Serialize)]
struct ErrorReply<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    message: &'a str,
}

pub fn error_line(message: &str) -> String {
    serde_json::to_string(&ErrorReply {
        kind: "error",
        message,
    })
    .expect("error reply serializes")
}

#[derive(Debug, Clone, Copy)]
pub struct SessionConfig {
    pub fps: u32,
    pub seed: u64,
    pub jitter_sigma_mm: f64,
}

/// One client's body and pipeline, without any I/O.
pub struct LiveSession {
    config: SessionConfig,
    engine: Arc<Engine>,
    synth: Synthesizer,
    session: Session,
    next_index: u64,
}

impl LiveSession {
    pub fn new(engine: Arc<Engine>, config: SessionConfig) -> Result<Self, CliError> {
        let synth = Self::synthesizer(&config)?;
        Ok(LiveSession {
            config,
            session: engine.session(),
            engine,
            synth,
            next_index: 0,
        })
    }

    fn synthesizer(config: &SessionConfig) -> Result<Synthesizer, CliError> {
        Synthesizer::new(SynthConfig {
            seed: config.seed,
            fps: config.fps,
            jitter_sigma_mm: config.jitter_sigma_mm,
            start: StartPose::Facing,
            user_id: 1,
        })
        .map_err(|e| CliError::Validation(e.to_string()))
    }

    /// Applies one client line. Blank lines are ignored.
    pub fn handle(&mut self, line: &str) -> Result<(), CliError> {
        if line.trim().is_empty() {
            return Ok(());
        }
        let msg: Control = serde_json::from_str(line).map_err(|e| CliError::Protocol(e.to_string()))?;
        let proto = |e: &dyn std::fmt::Display| CliError::Protocol(e.to_string());
        match msg {
            Control::Gesture { name, frames, speed } => {
                let kind: PrimitiveKind = name.parse().map_err(|e| proto(&e))?;
                let p = match speed {
                    Some(v) => Primitive::with_speed(kind, frames, v),
                    None => Primitive::new(kind, frames),
                };
                self.synth.push(p).map_err(|e| proto(&e))
            }
            Control::Pose { joint, target, frames } => {
                let joint: JointId = joint.parse().map_err(|e| proto(&e))?;
                self.synth
                    .push(Step::MoveJoint {
                        joint,
                        target: Vec3::from(target),
                        frames,
                    })
                    .map_err(|e| proto(&e))
            }
            Control::Reset => {
                self.synth = Self::synthesizer(&self.config)?;
                self.session.reset();
                Ok(())
            }
        }
    }

    /// Synthesizes and processes the next frame. Frame indices keep counting
    /// across resets.
    pub fn tick(&mut self) -> Result<Update, CliError> {
        let mut frame = self.synth.next_frame().frame;
        frame.frame_index = self.next_index;
        self.next_index += 1;
        let r = self
            .session
            .process(&frame)
            .map_err(|e| CliError::Protocol(e.to_string()))?;
        Ok(Update {
            i: frame.frame_index,
            state: r.step.state.code().to_string(),
            score: r.score.value(),
            g: r.g.to_string(),
            speed_r: r.speed[0],
            speed_l: r.speed[1],
            relabel: r.step.relabel.as_ref().map(|e| [e.from, e.to]),
        })
    }

    pub fn engine(&self) -> &Arc<Engine> {
        &self.engine
    }
}

enum Inbound {
    Line(String),
    Closed,
}

fn write_line(out: &mut impl Write, line: &str) -> io::Result<()> {
    out.write_all(line.as_bytes())?;
    out.write_all(b"\n")?;
    out.flush()
}

/// Runs one connection until the client disconnects.
pub fn run_connection(stream: TcpStream, engine: Arc<Engine>, config: SessionConfig) -> Result<(), CliError> {
    let mut live = LiveSession::new(engine, config)?;
    let reader = stream.try_clone()?;
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        for line in BufReader::new(reader).lines() {
            match line {
                Ok(l) => {
                    if tx.send(Inbound::Line(l)).is_err() {
                        return;
                    }
                }
                Err(_) => break,
            }
        }
        let _ = tx.send(Inbound::Closed);
    });

    let mut out = BufWriter::new(stream);
    let period = Duration::from_secs_f64(1.0 / f64::from(config.fps.max(1)));
    let mut deadline = Instant::now();
    loop {
        loop {
            match rx.try_recv() {
                Ok(Inbound::Line(l)) => {
                    if let Err(e) = live.handle(&l) {
                        write_line(&mut out, &error_line(&e.to_string()))?;
                    }
                }
                Ok(Inbound::Closed) | Err(TryRecvError::Disconnected) => return Ok(()),
                Err(TryRecvError::Empty) => break,
            }
        }
        let line = match live.tick() {
            Ok(u) => serde_json::to_string(&u).expect("update serializes"),
            Err(e) => error_line(&e.to_string()),
        };
        if write_line(&mut out, &line).is_err() {
            return Ok(());
        }
        deadline += period;
        let now = Instant::now();
        if deadline > now {
            thread::sleep(deadline - now);
        } else {
            deadline = now;
        }
    }
}

/// Accepts connections forever, one thread per session.
pub fn serve(listener: TcpListener, engine: Arc<Engine>, config: SessionConfig) -> Result<(), CliError> {
    if config.fps == 0 {
        return Err(CliError::Validation("--fps must be positive".into()));
    }
    for conn in listener.incoming() {
        let stream = match conn {
            Ok(s) => s,
            Err(e) => {
                eprintln!("accept failed: {e}");
                continue;
            }
        };
        let peer = stream.peer_addr().map(|a| a.to_string()).unwrap_or_default();
        let engine = engine.clone();
        thread::spawn(move || {
            if let Err(e) = run_connection(stream, engine, config) {
                eprintln!("session {peer}: {e}");
            }
        });
    }
    Ok(())
}
