//! Skeleton data model: joints, frames and the small vector type used for
//! joint positions.
//!
//! Coordinates are camera-space millimeters with x to the right, y up and z
//! pointing away from the sensor.

pub mod io;
pub mod script;
pub mod suite;
pub mod synth;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};
use std::str::FromStr;

pub use io::{
    parse_frame_record, parse_label_record, read_frames, read_labels, write_frame_record,
    write_label_record, StreamError,
};

/// A point or direction in camera space, millimeters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const UP: Vec3 = Vec3::new(0.0, 1.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    /// Unit vector in the same direction, or `None` for (near-)zero input.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 1e-12).then(|| self * (1.0 / n))
    }

    pub fn lerp(self, other: Vec3, t: f64) -> Vec3 {
        self + (other - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.x * k, self.y * k, self.z * k)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// The ten upper-body joints the classifiers use. The discriminant is the
/// stable on-disk encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JointId {
    Head = 0,
    LeftShoulder = 1,
    RightShoulder = 2,
    LeftElbow = 3,
    RightElbow = 4,
    LeftHand = 5,
    RightHand = 6,
    Torso = 7,
    LeftHip = 8,
    RightHip = 9,
}

impl JointId {
    pub const COUNT: usize = 10;

    pub const ALL: [JointId; JointId::COUNT] = [
        JointId::Head,
        JointId::LeftShoulder,
        JointId::RightShoulder,
        JointId::LeftElbow,
        JointId::RightElbow,
        JointId::LeftHand,
        JointId::RightHand,
        JointId::Torso,
        JointId::LeftHip,
        JointId::RightHip,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<JointId> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            JointId::Head => "head",
            JointId::LeftShoulder => "left_shoulder",
            JointId::RightShoulder => "right_shoulder",
            JointId::LeftElbow => "left_elbow",
            JointId::RightElbow => "right_elbow",
            JointId::LeftHand => "left_hand",
            JointId::RightHand => "right_hand",
            JointId::Torso => "torso",
            JointId::LeftHip => "left_hip",
            JointId::RightHip => "right_hip",
        }
    }
}

impl fmt::Display for JointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for JointId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|j| j.name() == s)
            .ok_or_else(|| format!("unknown joint `{s}`"))
    }
}

/// Joint positions for one frame, indexed by [`JointId`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Joints(pub [Vec3; JointId::COUNT]);

impl Index<JointId> for Joints {
    type Output = Vec3;
    fn index(&self, j: JointId) -> &Vec3 {
        &self.0[j.index()]
    }
}

impl IndexMut<JointId> for Joints {
    fn index_mut(&mut self, j: JointId) -> &mut Vec3 {
        &mut self.0[j.index()]
    }
}

impl Joints {
    pub fn translated(&self, offset: Vec3) -> Joints {
        Joints(self.0.map(|p| p + offset))
    }
}

/// One timestamped skeleton sample for one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub frame_index: u64,
    pub timestamp_ms: u64,
    pub user_id: u32,
    pub joints: Joints,
}

impl Frame {
    pub fn joint(&self, j: JointId) -> Vec3 {
        self.joints[j]
    }

    pub fn is_finite(&self) -> bool {
        self.joints.0.iter().all(|p| p.is_finite())
    }
}
