//! Canned synthetic workloads: the "catch the box" game used to train the
//! intent model, the mixed-gesture benchmark suite, and single raise-hand
//! scenarios.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::synth::{
    Primitive, PrimitiveKind, Scenario, StartPose, Step, SynthConfig, SynthError, Synthesizer,
};
use super::{Frame, JointId, Vec3};

/// Stage of the training game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GamePhase {
    Ready,
    Play,
    Stop,
}

impl GamePhase {
    pub fn name(self) -> &'static str {
        match self {
            GamePhase::Ready => "ready",
            GamePhase::Play => "play",
            GamePhase::Stop => "stop",
        }
    }
}

impl fmt::Display for GamePhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GamePhase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ready" => Ok(GamePhase::Ready),
            "play" => Ok(GamePhase::Play),
            "stop" => Ok(GamePhase::Stop),
            _ => Err(format!("unknown game phase `{s}`")),
        }
    }
}

/// Camera-space position of a body-frame offset for the default facing body.
fn facing_point(local: Vec3) -> Vec3 {
    Vec3::new(local.x, 1200.0 + local.y, 2000.0 - local.z)
}

/// Raise distance and peak speed so that the hand ends well above the torso.
fn random_raise(rng: &mut ChaCha8Rng) -> (u32, f64) {
    let frames = rng.random_range(10..=20u32);
    let travel = rng.random_range(420.0..620.0);
    (frames, 1.5 * travel / f64::from(frames))
}

fn raise(rng: &mut ChaCha8Rng) -> Primitive {
    let kind = if rng.random_bool(0.6) {
        PrimitiveKind::RaiseRightHand
    } else {
        PrimitiveKind::RaiseLeftHand
    };
    let (frames, speed) = random_raise(rng);
    Primitive::with_speed(kind, frames, speed)
}

fn swipe(rng: &mut ChaCha8Rng) -> Primitive {
    let kind = if rng.random_bool(0.5) {
        PrimitiveKind::SwipeLr
    } else {
        PrimitiveKind::SwipeRl
    };
    let frames = rng.random_range(10..=18u32);
    let travel = rng.random_range(250.0..450.0);
    Primitive::with_speed(kind, frames, 1.5 * travel / f64::from(frames))
}

fn idle(rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> Primitive {
    Primitive::new(PrimitiveKind::Idle, rng.random_range(lo..=hi))
}

fn timed(kind: PrimitiveKind, rng: &mut ChaCha8Rng, lo: u32, hi: u32) -> Primitive {
    Primitive::new(kind, rng.random_range(lo..=hi))
}

/// Rounds of Ready → Play → Stop, truncated to exactly `frames` frames.
/// During Play a raised hand chases random targets in front of the body.
pub fn game_session(
    seed: u64,
    frames: usize,
    jitter_sigma_mm: f64,
) -> Result<(Vec<Frame>, Vec<GamePhase>), SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6761_6d65);
    let mut synth = Synthesizer::new(SynthConfig {
        seed,
        fps: 30,
        jitter_sigma_mm,
        start: StartPose::Away,
        user_id: 1,
    })?;
    let mut out_frames = Vec::with_capacity(frames + 512);
    let mut phases = Vec::with_capacity(frames + 512);
    let mut run = |synth: &mut Synthesizer,
                   phases: &mut Vec<GamePhase>,
                   step: Step,
                   phase: GamePhase|
     -> Result<(), SynthError> {
        for f in synth.render(step)? {
            out_frames.push(f.frame);
            phases.push(phase);
        }
        Ok(())
    };

    let mut first = true;
    while phases.len() < frames {
        use PrimitiveKind::*;
        if first {
            run(&mut synth, &mut phases, idle(&mut rng, 15, 40).into(), GamePhase::Ready)?;
            run(&mut synth, &mut phases, timed(FaceSensor, &mut rng, 20, 35).into(), GamePhase::Ready)?;
            first = false;
        }
        run(&mut synth, &mut phases, idle(&mut rng, 30, 90).into(), GamePhase::Ready)?;

        let raise = raise(&mut rng);
        let side = if raise.kind == RaiseRightHand { -1.0 } else { 1.0 };
        let joint = if side < 0.0 {
            JointId::RightHand
        } else {
            JointId::LeftHand
        };
        run(&mut synth, &mut phases, raise.into(), GamePhase::Play)?;
        for _ in 0..rng.random_range(4..=9) {
            let target = facing_point(Vec3::new(
                side * rng.random_range(80.0..420.0),
                rng.random_range(60.0..380.0),
                rng.random_range(150.0..380.0),
            ));
            let step = Step::MoveJoint {
                joint,
                target,
                frames: rng.random_range(8..=25),
            };
            run(&mut synth, &mut phases, step, GamePhase::Play)?;
            run(&mut synth, &mut phases, idle(&mut rng, 3, 30).into(), GamePhase::Play)?;
        }

        run(&mut synth, &mut phases, timed(LowerHand, &mut rng, 12, 20).into(), GamePhase::Stop)?;
        run(&mut synth, &mut phases, idle(&mut rng, 30, 80).into(), GamePhase::Stop)?;
        if rng.random_bool(0.3) {
            // fidgeting between rounds
            let pose = if rng.random_bool(0.6) { FoldHands } else { HandsOnHead };
            run(&mut synth, &mut phases, timed(pose, &mut rng, 15, 28).into(), GamePhase::Stop)?;
            run(&mut synth, &mut phases, idle(&mut rng, 20, 60).into(), GamePhase::Stop)?;
            run(&mut synth, &mut phases, timed(Unfold, &mut rng, 15, 28).into(), GamePhase::Stop)?;
            run(&mut synth, &mut phases, idle(&mut rng, 20, 40).into(), GamePhase::Stop)?;
        }
        if rng.random_bool(0.25) {
            run(&mut synth, &mut phases, timed(TurnAway, &mut rng, 20, 35).into(), GamePhase::Stop)?;
            run(&mut synth, &mut phases, idle(&mut rng, 20, 60).into(), GamePhase::Stop)?;
            run(&mut synth, &mut phases, timed(FaceSensor, &mut rng, 20, 35).into(), GamePhase::Ready)?;
        }
    }
    out_frames.truncate(frames);
    phases.truncate(frames);
    Ok((out_frames, phases))
}

/// Number of scenarios in [`benchmark_suite`].
pub const SUITE_SIZE: usize = 30;
/// Approximate length of each benchmark scenario.
pub const SUITE_SCENARIO_FRAMES: usize = 2000;

/// One benchmark scenario: start turned away, face the sensor, then a random
/// sequence of commands (raise/hold/lower, raise/swipe/lower, fold, hands on
/// head, turn away and back) with rests in between.
pub fn benchmark_scenario(seed: u64, jitter_sigma_mm: f64) -> Scenario {
    use PrimitiveKind::*;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7375_6974);
    let mut steps = vec![
        idle(&mut rng, 20, 60),
        timed(FaceSensor, &mut rng, 20, 35),
        idle(&mut rng, 20, 50),
    ];
    let total = |steps: &[Primitive]| steps.iter().map(|p| p.duration_frames as usize).sum::<usize>();
    while total(&steps) < SUITE_SCENARIO_FRAMES - 100 {
        let pick = rng.random_range(0..100);
        match pick {
            0..30 => {
                steps.push(raise(&mut rng));
                steps.push(idle(&mut rng, 20, 50));
                steps.push(timed(LowerHand, &mut rng, 12, 20));
                steps.push(idle(&mut rng, 25, 60));
            }
            30..60 => {
                steps.push(raise(&mut rng));
                steps.push(idle(&mut rng, 15, 40));
                for _ in 0..rng.random_range(1..=2) {
                    steps.push(swipe(&mut rng));
                    steps.push(idle(&mut rng, 15, 40));
                }
                steps.push(timed(LowerHand, &mut rng, 12, 20));
                steps.push(idle(&mut rng, 25, 60));
            }
            60..75 => {
                steps.push(timed(FoldHands, &mut rng, 15, 25));
                steps.push(idle(&mut rng, 30, 70));
                steps.push(timed(Unfold, &mut rng, 15, 25));
                steps.push(idle(&mut rng, 25, 50));
            }
            75..85 => {
                steps.push(timed(HandsOnHead, &mut rng, 18, 28));
                steps.push(idle(&mut rng, 25, 50));
                steps.push(timed(Unfold, &mut rng, 18, 28));
                steps.push(idle(&mut rng, 25, 50));
            }
            _ => {
                steps.push(timed(TurnAway, &mut rng, 20, 35));
                steps.push(idle(&mut rng, 30, 80));
                steps.push(timed(FaceSensor, &mut rng, 20, 35));
                steps.push(idle(&mut rng, 25, 50));
            }
        }
    }
    Scenario {
        seed,
        fps: 30,
        steps,
        jitter_sigma_mm,
        start: StartPose::Away,
        user_id: 1,
    }
}

/// The fixed 30-scenario benchmark.
pub fn benchmark_suite(seed: u64, jitter_sigma_mm: f64) -> Vec<Scenario> {
    (0..SUITE_SIZE as u64)
        .map(|k| benchmark_scenario(seed.wrapping_mul(1000).wrapping_add(k), jitter_sigma_mm))
        .collect()
}

/// Face the sensor, rest, raise the right hand, hold. Returns the scenario
/// and the index of the first frame of the raise.
pub fn raise_hand_scenario(
    seed: u64,
    raise_frames: u32,
    peak_speed: f64,
    jitter_sigma_mm: f64,
) -> (Scenario, usize) {
    use PrimitiveKind::*;
    let steps = vec![
        Primitive::new(FaceSensor, 30),
        Primitive::new(Idle, 30),
        Primitive::with_speed(RaiseRightHand, raise_frames, peak_speed),
        Primitive::new(Idle, 40),
    ];
    (
        Scenario {
            seed,
            fps: 30,
            steps,
            jitter_sigma_mm,
            start: StartPose::Away,
            user_id: 1,
        },
        60,
    )
}
