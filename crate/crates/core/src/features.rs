//! Per-frame pose features and the bank of 37 binary posture classifiers.
//!
//! Geometry is expressed in a body frame anchored at the torso joint:
//!
//! * `lateral` points from the right shoulder to the left shoulder (camera +x
//!   for a person facing the sensor),
//! * `up` is the torso→shoulder-midpoint direction made orthogonal to
//!   `lateral`,
//! * `forward = up × lateral` is the normal of the shoulder/torso plane and
//!   points toward the sensor when the person faces it.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::skeleton::{Frame, JointId, Vec3};

/// Number of binary classifiers in the bank.
pub const BANK_SIZE: usize = 37;

/// Registry indices of the individual classifiers.
pub mod bit {
    /// Offset of the left-hand block; right-hand bits start at 0.
    pub const LEFT_HAND: usize = 14;

    pub const HAND_RIGHT_OF_BODY: usize = 0;
    pub const HAND_CLOSE_HORIZONTAL: usize = 1;
    pub const HAND_LEFT_OF_BODY: usize = 2;
    pub const HAND_BELOW_HIP: usize = 3;
    pub const HAND_BELOW_TORSO: usize = 4;
    pub const HAND_BELOW_SHOULDER: usize = 5;
    pub const HAND_BELOW_HEAD: usize = 6;
    pub const HAND_BACK_OF_BODY: usize = 7;
    pub const HAND_CLOSE_DEPTH: usize = 8;
    pub const HAND_FRONT_OF_BODY: usize = 9;
    pub const SPEED_STOPPED: usize = 10;
    pub const SPEED_SLOW: usize = 11;
    pub const SPEED_FAST: usize = 12;
    pub const SPEED_TOO_FAST: usize = 13;

    pub const FACING_SENSOR: usize = 28;
    pub const LEAN_BACK: usize = 29;
    pub const NO_LEAN: usize = 30;
    pub const LEAN_FORWARD: usize = 31;
    pub const HANDS_FOLDED: usize = 32;
    pub const R_HAND_ON_HEAD: usize = 33;
    pub const L_HAND_ON_HEAD: usize = 34;
    pub const R_HAND_ON_TORSO: usize = 35;
    pub const L_HAND_ON_TORSO: usize = 36;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassifierGroup {
    HandHorizontal,
    HandVertical,
    HandDepth,
    HandSpeed,
    BodyDirection,
    Leaning,
    SpecialPosture,
}

impl ClassifierGroup {
    pub fn name(self) -> &'static str {
        match self {
            ClassifierGroup::HandHorizontal => "hand_horizontal",
            ClassifierGroup::HandVertical => "hand_vertical",
            ClassifierGroup::HandDepth => "hand_depth",
            ClassifierGroup::HandSpeed => "hand_speed",
            ClassifierGroup::BodyDirection => "body_direction",
            ClassifierGroup::Leaning => "leaning",
            ClassifierGroup::SpecialPosture => "special_posture",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassifierInfo {
    pub index: usize,
    pub name: &'static str,
    pub group: ClassifierGroup,
}

macro_rules! registry {
    ($($name:literal => $group:ident),* $(,)?) => {{
        let names: &[(&str, ClassifierGroup)] = &[$(($name, ClassifierGroup::$group)),*];
        names
    }};
}

const REGISTRY_NAMES: &[(&str, ClassifierGroup)] = registry![
    "r_hand_right_of_body" => HandHorizontal,
    "r_hand_close_horizontal" => HandHorizontal,
    "r_hand_left_of_body" => HandHorizontal,
    "r_hand_below_hip" => HandVertical,
    "r_hand_below_torso" => HandVertical,
    "r_hand_below_shoulder" => HandVertical,
    "r_hand_below_head" => HandVertical,
    "r_hand_back_of_body" => HandDepth,
    "r_hand_close_depth" => HandDepth,
    "r_hand_front_of_body" => HandDepth,
    "r_speed_stopped" => HandSpeed,
    "r_speed_slow" => HandSpeed,
    "r_speed_fast" => HandSpeed,
    "r_speed_too_fast" => HandSpeed,
    "l_hand_right_of_body" => HandHorizontal,
    "l_hand_close_horizontal" => HandHorizontal,
    "l_hand_left_of_body" => HandHorizontal,
    "l_hand_below_hip" => HandVertical,
    "l_hand_below_torso" => HandVertical,
    "l_hand_below_shoulder" => HandVertical,
    "l_hand_below_head" => HandVertical,
    "l_hand_back_of_body" => HandDepth,
    "l_hand_close_depth" => HandDepth,
    "l_hand_front_of_body" => HandDepth,
    "l_speed_stopped" => HandSpeed,
    "l_speed_slow" => HandSpeed,
    "l_speed_fast" => HandSpeed,
    "l_speed_too_fast" => HandSpeed,
    "facing_sensor" => BodyDirection,
    "lean_back" => Leaning,
    "no_lean" => Leaning,
    "lean_forward" => Leaning,
    "hands_folded" => SpecialPosture,
    "r_hand_on_head" => SpecialPosture,
    "l_hand_on_head" => SpecialPosture,
    "r_hand_on_torso" => SpecialPosture,
    "l_hand_on_torso" => SpecialPosture,
];

static REGISTRY: std::sync::LazyLock<Vec<ClassifierInfo>> = std::sync::LazyLock::new(|| {
    REGISTRY_NAMES
        .iter()
        .enumerate()
        .map(|(index, &(name, group))| ClassifierInfo { index, name, group })
        .collect()
});

/// The fixed, ordered classifier registry.
pub fn bank_registry() -> &'static [ClassifierInfo] {
    &REGISTRY
}

pub fn registry_index(name: &str) -> Option<usize> {
    REGISTRY_NAMES.iter().position(|(n, _)| *n == name)
}

/// Tunable thresholds for the classifier bank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdConfig {
    /// Upper bound of the stopped band, mm/frame.
    pub speed_stopped: f64,
    pub speed_slow: f64,
    pub speed_fast: f64,
    pub facing_deg: f64,
    pub lean_deg: f64,
    pub depth_margin_mm: f64,
    pub folded_distance_mm: f64,
    pub folded_torso_radius_mm: f64,
    pub on_head_radius_mm: f64,
    pub on_torso_radius_mm: f64,
    /// Minimum shoulder/torso triangle area, mm².
    pub degenerate_area_mm2: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            speed_stopped: 10.0,
            speed_slow: 40.0,
            speed_fast: 100.0,
            facing_deg: 30.0,
            lean_deg: 15.0,
            depth_margin_mm: 150.0,
            folded_distance_mm: 150.0,
            folded_torso_radius_mm: 250.0,
            on_head_radius_mm: 200.0,
            on_torso_radius_mm: 200.0,
            degenerate_area_mm2: 1e3,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value for `{key}`")]
    BadValue { line: usize, key: String },
    #[error("speed bands must be increasing: {0} < {1} < {2}")]
    UnorderedSpeeds(f64, f64, f64),
}

impl ThresholdConfig {
    const KEYS: [&'static str; 11] = [
        "speed_stopped",
        "speed_slow",
        "speed_fast",
        "facing_deg",
        "lean_deg",
        "depth_margin_mm",
        "folded_distance_mm",
        "folded_torso_radius_mm",
        "on_head_radius_mm",
        "on_torso_radius_mm",
        "degenerate_area_mm2",
    ];

    fn slot(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "speed_stopped" => &mut self.speed_stopped,
            "speed_slow" => &mut self.speed_slow,
            "speed_fast" => &mut self.speed_fast,
            "facing_deg" => &mut self.facing_deg,
            "lean_deg" => &mut self.lean_deg,
            "depth_margin_mm" => &mut self.depth_margin_mm,
            "folded_distance_mm" => &mut self.folded_distance_mm,
            "folded_torso_radius_mm" => &mut self.folded_torso_radius_mm,
            "on_head_radius_mm" => &mut self.on_head_radius_mm,
            "on_torso_radius_mm" => &mut self.on_torso_radius_mm,
            "degenerate_area_mm2" => &mut self.degenerate_area_mm2,
            _ => return None,
        })
    }

    /// Parses `key value` lines over the defaults; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ThresholdConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut toks = content.split_whitespace();
            let key = toks.next().unwrap_or_default();
            let value = toks.next();
            let slot = cfg.slot(key).ok_or_else(|| ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            })?;
            let bad = || ConfigError::BadValue {
                line,
                key: key.to_string(),
            };
            let v: f64 = value.ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if !v.is_finite() || v < 0.0 || toks.next().is_some() {
                return Err(bad());
            }
            *slot = v;
        }
        if !(cfg.speed_stopped < cfg.speed_slow && cfg.speed_slow < cfg.speed_fast) {
            return Err(ConfigError::UnorderedSpeeds(
                cfg.speed_stopped,
                cfg.speed_slow,
                cfg.speed_fast,
            ));
        }
        Ok(cfg)
    }

    pub fn format(&self) -> String {
        let mut copy = *self;
        Self::KEYS
            .iter()
            .map(|k| format!("{k} {}\n", copy.slot(k).map(|v| *v).unwrap_or_default()))
            .collect()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("frame {frame_index}: shoulders and torso are (nearly) collinear, area {area_mm2:.1} mm²")]
    DegenerateBody { frame_index: u64, area_mm2: f64 },
}

/// Orthonormal body frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyAxes {
    pub lateral: Vec3,
    pub up: Vec3,
    pub forward: Vec3,
}

impl BodyAxes {
    pub fn to_body(&self, offset: Vec3) -> Vec3 {
        Vec3::new(
            offset.dot(self.lateral),
            offset.dot(self.up),
            offset.dot(self.forward),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandFeatures {
    /// Camera-space position.
    pub position: Vec3,
    /// Offset from the torso in body-frame coordinates.
    pub body: Vec3,
    /// Distance moved since the previous frame, mm/frame.
    pub speed: f64,
}

/// Reference heights (camera y) used by the vertical bands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Levels {
    pub hip: f64,
    pub torso: f64,
    pub shoulder: f64,
    pub head: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureFrame {
    pub frame_index: u64,
    pub body_origin: Vec3,
    pub body_axes: BodyAxes,
    pub head: Vec3,
    pub shoulder_half_width: f64,
    pub levels: Levels,
    /// `[right, left]`.
    pub hands: [HandFeatures; 2],
    pub has_predecessor: bool,
    /// Negative when leaning forward.
    pub lean_angle_deg: f64,
    pub facing_angle_deg: f64,
}

impl FeatureFrame {
    pub fn right(&self) -> &HandFeatures {
        &self.hands[0]
    }
    pub fn left(&self) -> &HandFeatures {
        &self.hands[1]
    }
}

fn body_axes(frame: &Frame, min_area: f64) -> Result<BodyAxes, FeatureError> {
    let rs = frame.joint(JointId::RightShoulder);
    let ls = frame.joint(JointId::LeftShoulder);
    let torso = frame.joint(JointId::Torso);
    let area = 0.5 * (ls - rs).cross(torso - rs).norm();
    let degenerate = || FeatureError::DegenerateBody {
        frame_index: frame.frame_index,
        area_mm2: area,
    };
    if area.is_nan() || area < min_area {
        return Err(degenerate());
    }
    let lateral = (ls - rs).normalized().ok_or_else(degenerate)?;
    let mid = (ls + rs) * 0.5 - torso;
    let up = (mid - lateral * mid.dot(lateral))
        .normalized()
        .ok_or_else(degenerate)?;
    let forward = up.cross(lateral);
    Ok(BodyAxes {
        lateral,
        up,
        forward,
    })
}

pub fn extract_features(
    frame: &Frame,
    prev: Option<&Frame>,
    cfg: &ThresholdConfig,
) -> Result<FeatureFrame, FeatureError> {
    let axes = body_axes(frame, cfg.degenerate_area_mm2)?;
    let torso = frame.joint(JointId::Torso);
    let head = frame.joint(JointId::Head);
    let rs = frame.joint(JointId::RightShoulder);
    let ls = frame.joint(JointId::LeftShoulder);

    let hand = |id: JointId| {
        let position = frame.joint(id);
        HandFeatures {
            position,
            body: axes.to_body(position - torso),
            speed: prev.map_or(0.0, |p| position.distance(p.joint(id))),
        }
    };

    let toward_sensor = Vec3::new(0.0, 0.0, -1.0);
    let facing_angle_deg = axes.forward.dot(toward_sensor).clamp(-1.0, 1.0).acos().to_degrees();

    let spine = head - torso;
    let horizontal_forward = Vec3::new(axes.forward.x, 0.0, axes.forward.z)
        .normalized()
        .unwrap_or(axes.forward);
    let lean_angle_deg = (-spine.dot(horizontal_forward))
        .atan2(spine.dot(Vec3::UP))
        .to_degrees();

    Ok(FeatureFrame {
        frame_index: frame.frame_index,
        body_origin: torso,
        body_axes: axes,
        head,
        shoulder_half_width: ls.distance(rs) / 2.0,
        levels: Levels {
            hip: (frame.joint(JointId::LeftHip).y + frame.joint(JointId::RightHip).y) / 2.0,
            torso: torso.y,
            shoulder: (ls.y + rs.y) / 2.0,
            head: head.y,
        },
        hands: [hand(JointId::RightHand), hand(JointId::LeftHand)],
        has_predecessor: prev.is_some(),
        lean_angle_deg,
        facing_angle_deg,
    })
}

/// `[hands_folded, r_on_head, l_on_head, r_on_torso, l_on_torso]` from
/// camera-space positions.
pub fn special_postures(
    right_hand: Vec3,
    left_hand: Vec3,
    head: Vec3,
    torso: Vec3,
    cfg: &ThresholdConfig,
) -> [bool; 5] {
    let folded = right_hand.distance(left_hand) < cfg.folded_distance_mm
        && right_hand.distance(torso) < cfg.folded_torso_radius_mm
        && left_hand.distance(torso) < cfg.folded_torso_radius_mm;
    [
        folded,
        right_hand.distance(head) < cfg.on_head_radius_mm,
        left_hand.distance(head) < cfg.on_head_radius_mm,
        !folded && right_hand.distance(torso) < cfg.on_torso_radius_mm,
        !folded && left_hand.distance(torso) < cfg.on_torso_radius_mm,
    ]
}

/// Speed band index: 0 stopped, 1 slow, 2 fast, 3 too fast.
pub fn speed_band(speed: f64, cfg: &ThresholdConfig) -> usize {
    if speed <= cfg.speed_stopped {
        0
    } else if speed <= cfg.speed_slow {
        1
    } else if speed <= cfg.speed_fast {
        2
    } else {
        3
    }
}

/// The 37 classifier outputs for one frame, in registry order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ClassifierVector(u64);

impl ClassifierVector {
    const MASK: u64 = (1 << BANK_SIZE) - 1;

    pub fn from_bits(bits: u64) -> Self {
        ClassifierVector(bits & Self::MASK)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn get(self, index: usize) -> bool {
        index < BANK_SIZE && self.0 >> index & 1 == 1
    }

    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < BANK_SIZE, "classifier index {index} out of range");
        if value {
            self.0 |= 1 << index;
        } else {
            self.0 &= !(1 << index);
        }
    }

    pub fn iter(self) -> impl Iterator<Item = bool> {
        (0..BANK_SIZE).map(move |i| self.get(i))
    }

    pub fn count_ones(self) -> u32 {
        self.0.count_ones()
    }

    fn slice<const N: usize>(self, start: usize) -> [bool; N] {
        std::array::from_fn(|i| self.get(start + i))
    }

    /// `[right_of_body, close, left_of_body]` for the right (0) or left (1) hand.
    pub fn hand_horizontal(self, hand: usize) -> [bool; 3] {
        self.slice(hand * bit::LEFT_HAND + bit::HAND_RIGHT_OF_BODY)
    }
    /// `[below_hip, below_torso, below_shoulder, below_head]`.
    pub fn hand_vertical(self, hand: usize) -> [bool; 4] {
        self.slice(hand * bit::LEFT_HAND + bit::HAND_BELOW_HIP)
    }
    /// `[back, close, front]`.
    pub fn hand_depth(self, hand: usize) -> [bool; 3] {
        self.slice(hand * bit::LEFT_HAND + bit::HAND_BACK_OF_BODY)
    }
    /// `[stopped, slow, fast, too_fast]`.
    pub fn hand_speed(self, hand: usize) -> [bool; 4] {
        self.slice(hand * bit::LEFT_HAND + bit::SPEED_STOPPED)
    }
    pub fn facing(self) -> bool {
        self.get(bit::FACING_SENSOR)
    }
    /// `[back, none, forward]`.
    pub fn leaning(self) -> [bool; 3] {
        self.slice(bit::LEAN_BACK)
    }
    /// `[folded, r_on_head, l_on_head, r_on_torso, l_on_torso]`.
    pub fn special(self) -> [bool; 5] {
        self.slice(bit::HANDS_FOLDED)
    }
}

impl fmt::Display for ClassifierVector {
    /// 37 characters of `0`/`1`, registry index 0 first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for ClassifierVector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() != BANK_SIZE {
            return Err(format!("expected {BANK_SIZE} characters, got {}", s.len()));
        }
        let mut v = ClassifierVector::default();
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => return Err(format!("invalid character `{c}`")),
            }
        }
        Ok(v)
    }
}

pub fn evaluate_bank(f: &FeatureFrame, cfg: &ThresholdConfig) -> ClassifierVector {
    let mut g = ClassifierVector::default();
    let s = f.shoulder_half_width;
    let lv = f.levels;

    for (h, hand) in f.hands.iter().enumerate() {
        let base = h * bit::LEFT_HAND;
        let x = hand.body.x;
        let horizontal = if x < -s {
            bit::HAND_RIGHT_OF_BODY
        } else if x > s {
            bit::HAND_LEFT_OF_BODY
        } else {
            bit::HAND_CLOSE_HORIZONTAL
        };
        g.set(base + horizontal, true);

        let y = hand.position.y;
        let vertical = if y < lv.hip {
            Some(bit::HAND_BELOW_HIP)
        } else if y < lv.torso {
            Some(bit::HAND_BELOW_TORSO)
        } else if y < lv.shoulder {
            Some(bit::HAND_BELOW_SHOULDER)
        } else if y < lv.head {
            Some(bit::HAND_BELOW_HEAD)
        } else {
            None
        };
        if let Some(v) = vertical {
            g.set(base + v, true);
        }

        let d = hand.body.z;
        let depth = if d < -cfg.depth_margin_mm {
            bit::HAND_BACK_OF_BODY
        } else if d > cfg.depth_margin_mm {
            bit::HAND_FRONT_OF_BODY
        } else {
            bit::HAND_CLOSE_DEPTH
        };
        g.set(base + depth, true);

        if f.has_predecessor {
            g.set(base + bit::SPEED_STOPPED + speed_band(hand.speed, cfg), true);
        }
    }

    g.set(bit::FACING_SENSOR, f.facing_angle_deg <= cfg.facing_deg);

    let lean = if f.lean_angle_deg < -cfg.lean_deg {
        bit::LEAN_FORWARD
    } else if f.lean_angle_deg > cfg.lean_deg {
        bit::LEAN_BACK
    } else {
        bit::NO_LEAN
    };
    g.set(lean, true);

    let special = special_postures(
        f.hands[0].position,
        f.hands[1].position,
        f.head,
        f.body_origin,
        cfg,
    );
    for (i, b) in special.into_iter().enumerate() {
        g.set(bit::HANDS_FOLDED + i, b);
    }
    g
}
