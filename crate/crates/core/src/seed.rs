/// Mixes a run seed with a byte label into a new 64-bit seed (FNV-1a followed
/// by a splitmix64 finalizer).
///
/// Used wherever a sub-computation needs its own stream that must not depend on
/// the order in which other sub-computations consume randomness.
pub fn derive_seed(seed: u64, label: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in seed.to_le_bytes().iter().chain(label) {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}
