//! Scripted synthetic skeleton streams with per-frame ground truth.
//!
//! A simple kinematic body (fixed torso, head, shoulders and hips; movable
//! hands; yaw about the vertical axis) is driven by gesture primitives. Each
//! primitive interpolates from the current pose to a target pose with a
//! smoothstep profile, so a primitive moving a hand a distance `D` over `N`
//! frames peaks at `1.5 * D / N` mm/frame; the primitive's `peak_speed` fixes
//! `D` for the raise and swipe gestures.
//!
//! Sensor noise is a per-joint, per-axis stationary Gauss-Markov process with
//! marginal standard deviation `jitter_sigma_mm` and lag-one correlation
//! [`JITTER_CORRELATION`].
//!
//! Ground truth is computed from the noiseless pose:
//! * not facing (|yaw| above [`FACING_LABEL_DEG`]) or in a special posture
//!   → Disengagement,
//! * a hand commanded to move whose start or end position is above the
//!   torso → Action,
//! * a hand held above the torso → Intention,
//! * otherwise → Attention.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use super::{Frame, JointId, Joints, Vec3};
use crate::features::{special_postures, ThresholdConfig};
use crate::EngagementState;

/// Lag-one autocorrelation of the joint noise process.
pub const JITTER_CORRELATION: f64 = 0.98;
/// Body yaw beyond which the scripted person counts as turned away.
pub const FACING_LABEL_DEG: f64 = 30.0;
/// Peak speed used when a raise or swipe primitive omits it.
pub const DEFAULT_PEAK_SPEED: f64 = 40.0;
/// Yaw of the turned-away pose.
pub const AWAY_YAW_DEG: f64 = 90.0;

const ROOT: Vec3 = Vec3::new(0.0, 1200.0, 2000.0);
const RIGHT_REST: Vec3 = Vec3::new(-270.0, -320.0, 30.0);
const LEFT_REST: Vec3 = Vec3::new(270.0, -320.0, 30.0);
const RIGHT_FOLDED: Vec3 = Vec3::new(-60.0, -80.0, 150.0);
const LEFT_FOLDED: Vec3 = Vec3::new(60.0, -80.0, 150.0);
const RIGHT_ON_HEAD: Vec3 = Vec3::new(-120.0, 430.0, 60.0);
const LEFT_ON_HEAD: Vec3 = Vec3::new(120.0, 430.0, 60.0);
/// Forward swing at the midpoint of a lowering, so the hand passes in front
/// of the body instead of through it.
const LOWER_ARC_MM: f64 = 150.0;
/// Up and slightly toward the sensor.
const RAISE_DIRECTION: Vec3 = Vec3::new(0.0, 0.9, 0.435_889_894_354_067_3);

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("unknown primitive `{0}`")]
    UnknownPrimitive(String),
    #[error("invalid peak speed {0} for {1}")]
    BadSpeed(f64, PrimitiveKind),
    #[error("invalid jitter sigma {0}")]
    BadJitter(f64),
    #[error("joint {0} cannot be posed directly")]
    NotPosable(JointId),
    #[error("non-finite pose target")]
    NonFiniteTarget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrimitiveKind {
    Idle,
    FaceSensor,
    TurnAway,
    RaiseRightHand,
    RaiseLeftHand,
    LowerHand,
    SwipeLr,
    SwipeRl,
    FoldHands,
    HandsOnHead,
    Unfold,
}

impl PrimitiveKind {
    pub const ALL: [PrimitiveKind; 11] = [
        PrimitiveKind::Idle,
        PrimitiveKind::FaceSensor,
        PrimitiveKind::TurnAway,
        PrimitiveKind::RaiseRightHand,
        PrimitiveKind::RaiseLeftHand,
        PrimitiveKind::LowerHand,
        PrimitiveKind::SwipeLr,
        PrimitiveKind::SwipeRl,
        PrimitiveKind::FoldHands,
        PrimitiveKind::HandsOnHead,
        PrimitiveKind::Unfold,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrimitiveKind::Idle => "idle",
            PrimitiveKind::FaceSensor => "face_sensor",
            PrimitiveKind::TurnAway => "turn_away",
            PrimitiveKind::RaiseRightHand => "raise_right_hand",
            PrimitiveKind::RaiseLeftHand => "raise_left_hand",
            PrimitiveKind::LowerHand => "lower_hand",
            PrimitiveKind::SwipeLr => "swipe_lr",
            PrimitiveKind::SwipeRl => "swipe_rl",
            PrimitiveKind::FoldHands => "fold_hands",
            PrimitiveKind::HandsOnHead => "hands_on_head",
            PrimitiveKind::Unfold => "unfold",
        }
    }

    /// Whether the travel distance comes from the peak speed.
    pub fn uses_speed(self) -> bool {
        matches!(
            self,
            PrimitiveKind::RaiseRightHand
                | PrimitiveKind::RaiseLeftHand
                | PrimitiveKind::SwipeLr
                | PrimitiveKind::SwipeRl
        )
    }
}

impl fmt::Display for PrimitiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrimitiveKind {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SynthError::UnknownPrimitive(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub kind: PrimitiveKind,
    pub duration_frames: u32,
    /// mm/frame; only meaningful for raise and swipe primitives.
    pub peak_speed: Option<f64>,
}

impl Primitive {
    pub fn new(kind: PrimitiveKind, duration_frames: u32) -> Self {
        Primitive {
            kind,
            duration_frames,
            peak_speed: None,
        }
    }

    pub fn with_speed(kind: PrimitiveKind, duration_frames: u32, peak_speed: f64) -> Self {
        Primitive {
            kind,
            duration_frames,
            peak_speed: Some(peak_speed),
        }
    }

    /// Distance covered by a speed-driven primitive.
    pub fn travel_mm(&self) -> f64 {
        let speed = self.peak_speed.unwrap_or(DEFAULT_PEAK_SPEED);
        speed * f64::from(self.duration_frames) / 1.5
    }

    fn validate(&self) -> Result<(), SynthError> {
        if let Some(v) = self.peak_speed {
            if !v.is_finite() || v < 0.0 {
                return Err(SynthError::BadSpeed(v, self.kind));
            }
        }
        Ok(())
    }
}

/// One scheduled motion: a gesture primitive, or a single joint driven to a
/// camera-space target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    Primitive(Primitive),
    MoveJoint {
        joint: JointId,
        target: Vec3,
        frames: u32,
    },
}

impl Step {
    /// Hand gestures, as opposed to turning or moving into or out of a
    /// special posture.
    pub fn is_gesture(&self) -> bool {
        use PrimitiveKind::*;
        match self {
            Step::MoveJoint { .. } => true,
            Step::Primitive(p) => matches!(
                p.kind,
                RaiseRightHand | RaiseLeftHand | LowerHand | SwipeLr | SwipeRl | Idle
            ),
        }
    }

    pub fn frames(&self) -> u32 {
        match self {
            Step::Primitive(p) => p.duration_frames,
            Step::MoveJoint { frames, .. } => *frames,
        }
    }
}

impl From<Primitive> for Step {
    fn from(p: Primitive) -> Self {
        Step::Primitive(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StartPose {
    /// Turned away from the sensor, hands at rest.
    #[default]
    Away,
    /// Facing the sensor, hands at rest.
    Facing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub seed: u64,
    pub fps: u32,
    pub steps: Vec<Primitive>,
    pub jitter_sigma_mm: f64,
    pub start: StartPose,
    pub user_id: u32,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            seed: 0,
            fps: 30,
            steps: Vec::new(),
            jitter_sigma_mm: 5.0,
            start: StartPose::Away,
            user_id: 1,
        }
    }
}

impl Scenario {
    pub fn total_frames(&self) -> usize {
        self.steps.iter().map(|s| s.duration_frames as usize).sum()
    }
}

/// One generated sample with its ground truth and the noiseless hand
/// displacement that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthFrame {
    pub frame: Frame,
    pub truth: EngagementState,
    /// Noiseless per-frame hand displacement (right, left), mm.
    pub commanded_speed: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct BodyPose {
    root: Vec3,
    yaw_deg: f64,
    /// Body-frame offsets from the torso: x toward the left shoulder, y up,
    /// z forward. Elbows are derived from the hands.
    local: [Vec3; JointId::COUNT],
}

impl BodyPose {
    fn rest(start: StartPose) -> Self {
        let mut local = [Vec3::ZERO; JointId::COUNT];
        local[JointId::Head.index()] = Vec3::new(0.0, 450.0, 0.0);
        local[JointId::LeftShoulder.index()] = Vec3::new(200.0, 200.0, 0.0);
        local[JointId::RightShoulder.index()] = Vec3::new(-200.0, 200.0, 0.0);
        local[JointId::LeftHip.index()] = Vec3::new(150.0, -250.0, 0.0);
        local[JointId::RightHip.index()] = Vec3::new(-150.0, -250.0, 0.0);
        local[JointId::RightHand.index()] = RIGHT_REST;
        local[JointId::LeftHand.index()] = LEFT_REST;
        BodyPose {
            root: ROOT,
            yaw_deg: match start {
                StartPose::Away => AWAY_YAW_DEG,
                StartPose::Facing => 0.0,
            },
            local,
        }
    }

    fn hand(&self, side: Side) -> Vec3 {
        self.local[side.hand().index()]
    }

    fn set_hand(&mut self, side: Side, p: Vec3) {
        self.local[side.hand().index()] = p;
    }

    fn lerp(&self, to: &BodyPose, t: f64) -> BodyPose {
        let mut local = self.local;
        for (dst, (a, b)) in local.iter_mut().zip(self.local.iter().zip(&to.local)) {
            *dst = a.lerp(*b, t);
        }
        BodyPose {
            root: self.root.lerp(to.root, t),
            yaw_deg: self.yaw_deg + (to.yaw_deg - self.yaw_deg) * t,
            local,
        }
    }

    fn axes(&self) -> (Vec3, Vec3) {
        let th = self.yaw_deg.to_radians();
        let lateral = Vec3::new(th.cos(), 0.0, th.sin());
        let forward = Vec3::new(th.sin(), 0.0, -th.cos());
        (lateral, forward)
    }

    fn to_world(self, local: Vec3) -> Vec3 {
        let (lateral, forward) = self.axes();
        self.root + lateral * local.x + Vec3::UP * local.y + forward * local.z
    }

    fn to_local(self, world: Vec3) -> Vec3 {
        let (lateral, forward) = self.axes();
        let d = world - self.root;
        Vec3::new(d.dot(lateral), d.y, d.dot(forward))
    }

    fn world_joints(&self) -> Joints {
        let mut joints = Joints::default();
        for j in JointId::ALL {
            joints[j] = self.to_world(self.local[j.index()]);
        }
        for side in [Side::Right, Side::Left] {
            let shoulder = self.local[side.shoulder().index()];
            let hand = self.hand(side);
            let outward = Vec3::new(side.outward() * 60.0, 0.0, -20.0);
            let elbow = shoulder.lerp(hand, 0.5) + outward;
            joints[side.elbow()] = self.to_world(elbow);
        }
        joints
    }

    fn is_raised(&self, side: Side) -> bool {
        self.hand(side).y > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Right,
    Left,
}

impl Side {
    fn hand(self) -> JointId {
        match self {
            Side::Right => JointId::RightHand,
            Side::Left => JointId::LeftHand,
        }
    }
    fn shoulder(self) -> JointId {
        match self {
            Side::Right => JointId::RightShoulder,
            Side::Left => JointId::LeftShoulder,
        }
    }
    fn elbow(self) -> JointId {
        match self {
            Side::Right => JointId::RightElbow,
            Side::Left => JointId::LeftElbow,
        }
    }
    fn outward(self) -> f64 {
        match self {
            Side::Right => -1.0,
            Side::Left => 1.0,
        }
    }
    fn index(self) -> usize {
        match self {
            Side::Right => 0,
            Side::Left => 1,
        }
    }
}

fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

#[derive(Debug, Clone)]
struct Motion {
    from: BodyPose,
    to: BodyPose,
    frames: u32,
    done: u32,
    /// Per hand: a commanded gesture that starts or ends with the hand above
    /// the torso.
    engaged: [bool; 2],
    arc_mm: f64,
}

impl Motion {
    fn new(from: BodyPose, to: BodyPose, frames: u32, gesture: bool, arc_mm: f64) -> Self {
        let engaged = [Side::Right, Side::Left]
            .map(|s| gesture && (from.is_raised(s) || to.is_raised(s)));
        Motion {
            from,
            to,
            frames,
            done: 0,
            engaged,
            arc_mm,
        }
    }

    fn finished(&self) -> bool {
        self.done >= self.frames
    }

    fn pose_at(&self, k: u32) -> BodyPose {
        if k == 0 {
            return self.from;
        }
        let u = f64::from(k) / f64::from(self.frames);
        let s = smoothstep(u);
        let mut pose = self.from.lerp(&self.to, s);
        if self.arc_mm != 0.0 {
            for side in [Side::Right, Side::Left] {
                if self.from.hand(side).distance(self.to.hand(side)) > 1.0 {
                    let swing = Vec3::new(0.0, 0.0, self.arc_mm * 4.0 * s * (1.0 - s));
                    pose.set_hand(side, pose.hand(side) + swing);
                }
            }
        }
        pose
    }
}

/// Configuration of a [`Synthesizer`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub fps: u32,
    pub jitter_sigma_mm: f64,
    pub start: StartPose,
    pub user_id: u32,
}

impl From<&Scenario> for SynthConfig {
    fn from(s: &Scenario) -> Self {
        SynthConfig {
            seed: s.seed,
            fps: s.fps,
            jitter_sigma_mm: s.jitter_sigma_mm,
            start: s.start,
            user_id: s.user_id,
        }
    }
}

/// Incremental frame generator: queue steps, then pull frames one at a time.
/// With an empty queue the body holds its pose.
#[derive(Debug, Clone)]
pub struct Synthesizer {
    config: SynthConfig,
    pose: BodyPose,
    queue: VecDeque<Step>,
    active: Option<Motion>,
    rng: ChaCha8Rng,
    noise: [Vec3; JointId::COUNT],
    next_index: u64,
    thresholds: ThresholdConfig,
}

impl Synthesizer {
    pub fn new(config: SynthConfig) -> Result<Self, SynthError> {
        if !config.jitter_sigma_mm.is_finite() || config.jitter_sigma_mm < 0.0 {
            return Err(SynthError::BadJitter(config.jitter_sigma_mm));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let sigma = config.jitter_sigma_mm;
        let noise = [(); JointId::COUNT].map(|_| gaussian3(&mut rng) * sigma);
        Ok(Synthesizer {
            config,
            pose: BodyPose::rest(config.start),
            queue: VecDeque::new(),
            active: None,
            rng,
            noise,
            next_index: 0,
            thresholds: ThresholdConfig::default(),
        })
    }

    pub fn config(&self) -> &SynthConfig {
        &self.config
    }

    pub fn push(&mut self, step: impl Into<Step>) -> Result<(), SynthError> {
        let step = step.into();
        match step {
            Step::Primitive(p) => p.validate()?,
            Step::MoveJoint { joint, target, .. } => {
                if matches!(joint, JointId::LeftElbow | JointId::RightElbow) {
                    return Err(SynthError::NotPosable(joint));
                }
                if !target.is_finite() {
                    return Err(SynthError::NonFiniteTarget);
                }
            }
        }
        self.queue.push_back(step);
        Ok(())
    }

    /// No queued or running motion.
    pub fn is_idle(&self) -> bool {
        self.queue.is_empty() && self.active.as_ref().is_none_or(Motion::finished)
    }

    /// Frames still scheduled, including the remainder of the running step.
    pub fn pending_frames(&self) -> u64 {
        let running = self
            .active
            .as_ref()
            .map_or(0, |m| u64::from(m.frames - m.done.min(m.frames)));
        running + self.queue.iter().map(|s| u64::from(s.frames())).sum::<u64>()
    }

    fn target_for(&self, step: &Step) -> BodyPose {
        let mut to = self.pose;
        match *step {
            Step::MoveJoint { joint, target, .. } => {
                if joint == JointId::Torso {
                    to.root = target;
                } else {
                    to.local[joint.index()] = self.pose.to_local(target);
                }
            }
            Step::Primitive(p) => match p.kind {
                PrimitiveKind::Idle => {}
                PrimitiveKind::FaceSensor => to.yaw_deg = 0.0,
                PrimitiveKind::TurnAway => to.yaw_deg = AWAY_YAW_DEG,
                PrimitiveKind::RaiseRightHand | PrimitiveKind::RaiseLeftHand => {
                    let side = if p.kind == PrimitiveKind::RaiseRightHand {
                        Side::Right
                    } else {
                        Side::Left
                    };
                    to.set_hand(side, self.pose.hand(side) + RAISE_DIRECTION * p.travel_mm());
                }
                PrimitiveKind::SwipeLr | PrimitiveKind::SwipeRl => {
                    let side = self.swipe_hand();
                    // right-to-left from the user's view moves toward their left
                    let dir = if p.kind == PrimitiveKind::SwipeRl { 1.0 } else { -1.0 };
                    let delta = Vec3::new(dir * p.travel_mm(), 0.0, 0.0);
                    to.set_hand(side, self.pose.hand(side) + delta);
                }
                PrimitiveKind::LowerHand | PrimitiveKind::Unfold => {
                    to.set_hand(Side::Right, RIGHT_REST);
                    to.set_hand(Side::Left, LEFT_REST);
                }
                PrimitiveKind::FoldHands => {
                    to.set_hand(Side::Right, RIGHT_FOLDED);
                    to.set_hand(Side::Left, LEFT_FOLDED);
                }
                PrimitiveKind::HandsOnHead => {
                    to.set_hand(Side::Right, RIGHT_ON_HEAD);
                    to.set_hand(Side::Left, LEFT_ON_HEAD);
                }
            },
        }
        to
    }

    /// Highest raised hand, else the right hand.
    fn swipe_hand(&self) -> Side {
        let r = self.pose.hand(Side::Right);
        let l = self.pose.hand(Side::Left);
        match (self.pose.is_raised(Side::Right), self.pose.is_raised(Side::Left)) {
            (false, true) => Side::Left,
            (true, true) if l.y > r.y => Side::Left,
            _ => Side::Right,
        }
    }

    fn start_next(&mut self) {
        while self.active.as_ref().is_none_or(Motion::finished) {
            let Some(step) = self.queue.pop_front() else {
                self.active = None;
                return;
            };
            if step.frames() == 0 {
                continue;
            }
            let to = self.target_for(&step);
            let arc = match step {
                Step::Primitive(p) if p.kind == PrimitiveKind::LowerHand => LOWER_ARC_MM,
                _ => 0.0,
            };
            self.active = Some(Motion::new(self.pose, to, step.frames(), step.is_gesture(), arc));
        }
    }

    /// Produces the next frame; holds the current pose when nothing is queued.
    pub fn next_frame(&mut self) -> SynthFrame {
        self.start_next();
        let before = self.pose;
        let (pose, engaged) = match self.active.as_mut() {
            Some(m) => {
                m.done += 1;
                (m.pose_at(m.done), m.engaged)
            }
            None => (self.pose, [false; 2]),
        };
        self.pose = pose;

        let commanded = [Side::Right, Side::Left]
            .map(|s| pose.to_world(pose.hand(s)).distance(before.to_world(before.hand(s))));
        let truth = self.truth(&pose, commanded, engaged);

        let sigma = self.config.jitter_sigma_mm;
        let innovation = (1.0 - JITTER_CORRELATION * JITTER_CORRELATION).sqrt() * sigma;
        let mut joints = pose.world_joints();
        for (n, p) in self.noise.iter_mut().zip(joints.0.iter_mut()) {
            *n = *n * JITTER_CORRELATION + gaussian3(&mut self.rng) * innovation;
            *p = *p + *n;
        }

        let index = self.next_index;
        self.next_index += 1;
        let fps = u64::from(self.config.fps.max(1));
        SynthFrame {
            frame: Frame {
                frame_index: index,
                timestamp_ms: (index * 1000 + fps / 2) / fps,
                user_id: self.config.user_id,
                joints,
            },
            truth,
            commanded_speed: commanded,
        }
    }

    /// Queues `step` and returns exactly its frames. Anything already queued
    /// runs first and is returned too.
    pub fn render(&mut self, step: impl Into<Step>) -> Result<Vec<SynthFrame>, SynthError> {
        self.push(step)?;
        let n = self.pending_frames();
        Ok((0..n).map(|_| self.next_frame()).collect())
    }

    fn truth(&self, pose: &BodyPose, commanded: [f64; 2], engaged: [bool; 2]) -> EngagementState {
        let facing = pose.yaw_deg.abs() <= FACING_LABEL_DEG;
        let world = pose.world_joints();
        let special = special_postures(
            world[JointId::RightHand],
            world[JointId::LeftHand],
            world[JointId::Head],
            world[JointId::Torso],
            &self.thresholds,
        );
        if !facing || special.iter().any(|&b| b) {
            return EngagementState::Disengagement;
        }
        let acting = [Side::Right, Side::Left]
            .into_iter()
            .any(|s| commanded[s.index()] > 0.0 && engaged[s.index()]);
        if acting {
            EngagementState::Action
        } else if pose.is_raised(Side::Right) || pose.is_raised(Side::Left) {
            EngagementState::Intention
        } else {
            EngagementState::Attention
        }
    }
}

fn gaussian3(rng: &mut ChaCha8Rng) -> Vec3 {
    let x: f64 = StandardNormal.sample(rng);
    let y: f64 = StandardNormal.sample(rng);
    let z: f64 = StandardNormal.sample(rng);
    Vec3::new(x, y, z)
}

/// Renders a whole scenario: one frame and one ground-truth label per
/// scheduled frame.
pub fn generate_scenario(
    scenario: &Scenario,
) -> Result<(Vec<Frame>, Vec<EngagementState>), SynthError> {
    let frames = generate_detailed(scenario)?;
    Ok(frames.into_iter().map(|f| (f.frame, f.truth)).unzip())
}

/// Like [`generate_scenario`], keeping the commanded hand speeds.
pub fn generate_detailed(scenario: &Scenario) -> Result<Vec<SynthFrame>, SynthError> {
    let mut synth = Synthesizer::new(SynthConfig::from(scenario))?;
    let mut out = Vec::with_capacity(scenario.total_frames());
    for step in &scenario.steps {
        out.extend(synth.render(*step)?);
    }
    Ok(out)
}
