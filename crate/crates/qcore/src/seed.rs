//! Seed derivation. Every random stream in the pipeline is derived from one
//! global seed through this function, keyed by a stage label and an index,
//! so runs are reproducible and parallel workers get independent streams.

/// Derives a child seed from (seed, label, index) with splitmix64-style
/// mixing. Stable across runs and platforms.
pub fn derive_seed(seed: u64, label: &str, index: u64) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for &b in label.as_bytes() {
        h = mix(h ^ b as u64);
    }
    mix(mix(h ^ index))
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
