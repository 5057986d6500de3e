//! Layout of the per-frame signal word the guards read: the 37 classifier
//! bits followed by the derived signals.

use crate::features::{bit, registry_index, ClassifierVector, BANK_SIZE};

pub const INTENT: usize = BANK_SIZE;
/// Same value as `facing_sensor`.
pub const FACING: usize = BANK_SIZE + 1;
/// Any of the five special postures.
pub const SPECIAL_ANY: usize = BANK_SIZE + 2;
/// Both hands in the stopped band.
pub const BOTH_STOPPED: usize = BANK_SIZE + 3;
/// Either hand slow or fast. Too-fast does not count.
pub const ANY_MOVING: usize = BANK_SIZE + 4;
pub const SIGNAL_COUNT: usize = BANK_SIZE + 5;

pub const DERIVED: [(&str, usize); 5] = [
    ("intent", INTENT),
    ("facing", FACING),
    ("special_any", SPECIAL_ANY),
    ("both_stopped", BOTH_STOPPED),
    ("any_moving", ANY_MOVING),
];

/// Registry name or derived signal name to bit position.
pub fn signal_index(name: &str) -> Option<usize> {
    registry_index(name).or_else(|| DERIVED.iter().find(|(n, _)| *n == name).map(|&(_, i)| i))
}

pub fn signal_name(index: usize) -> Option<&'static str> {
    if index < BANK_SIZE {
        return crate::features::bank_registry().get(index).map(|c| c.name);
    }
    DERIVED.iter().find(|&&(_, i)| i == index).map(|&(n, _)| n)
}

/// Packs one frame's classifier vector and intent decision.
pub fn signal_word(g: ClassifierVector, intent: bool) -> u64 {
    let [r, l] = [0, 1].map(|h| g.hand_speed(h));
    let mut w = g.bits();
    let mut put = |i: usize, v: bool| w |= u64::from(v) << i;
    put(INTENT, intent);
    put(FACING, g.facing());
    put(SPECIAL_ANY, g.special().iter().any(|&b| b));
    put(BOTH_STOPPED, r[0] && l[0]);
    put(ANY_MOVING, r[1] || r[2] || l[1] || l[2]);
    debug_assert_eq!(g.get(bit::FACING_SENSOR), w >> FACING & 1 == 1);
    w
}

#[inline]
pub fn get(word: u64, index: usize) -> bool {
    word >> index & 1 == 1
}
