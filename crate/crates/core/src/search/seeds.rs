//! Seed derivation. Every random stream of a run is a pure function of the
//! master seed and a few integer coordinates.

pub const NEAT_STREAM: u64 = 1;
pub const ARCHIVE_STREAM: u64 = 2;
pub const EPISODE_STREAM: u64 = 3;
pub const ROBUST_STREAM: u64 = 4;
pub const REPETITION_STREAM: u64 = 5;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x6A09_E667_F3BC_C909, |h, &p| splitmix(h ^ p))
}

pub fn episode_seed(master: u64, generation: u64, genome: u64) -> u64 {
    derive_seed(&[master, EPISODE_STREAM, generation, genome])
}

/// `r` replay seeds for one genome.
pub fn robustness_seeds(master: u64, genome: u64, r: u32) -> Vec<u64> {
    let base = derive_seed(&[master, ROBUST_STREAM, genome]);
    (0..r as u64).map(|i| derive_seed(&[base, i])).collect()
}
