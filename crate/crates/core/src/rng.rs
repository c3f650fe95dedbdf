//! Seeded randomness.
//!
//! Everything randomized in this crate draws from SplitMix64 (Steele,
//! Lea & Flood's `splitmix64`, the same generator used to seed
//! xoshiro/xoroshiro): state advances by the 64-bit golden-ratio constant
//! and is finalized by two xor-shift multiplies. It is a counter-based
//! generator, so a seed fully determines the stream on any platform and is
//! trivial to reimplement in another language. Parallel routines never
//! share a stream; they derive one substream per logical worker with
//! [`SplitMix64::substream`], which is a pure function of (seed, index).

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Substream `index` of `seed`: an independent generator that is a pure
    /// function of its arguments. Used to give each logical worker its own
    /// stream so results do not depend on scheduling.
    pub fn substream(seed: u64, index: u64) -> Self {
        SplitMix64::new(seed ^ mix(index.wrapping_add(1).wrapping_mul(GAMMA)))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    /// Uniform draw from [0, n) by rejection, so the distribution is exact
    /// and the stream consumption is deterministic for a fixed seed.
    #[inline]
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0) is empty");
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// Sorted sample of `k` distinct values from [0, m), by partial
    /// Fisher-Yates on a scratch index vector.
    pub fn subset(&mut self, m: u64, k: usize) -> Vec<u32> {
        assert!(k as u64 <= m, "subset larger than universe");
        assert!(m <= u32::MAX as u64, "universe too large for u32 indices");
        let mut pool: Vec<u32> = (0..m as u32).collect();
        for i in 0..k {
            let j = i + self.below(m - i as u64) as usize;
            pool.swap(i, j);
        }
        let mut out = pool[..k].to_vec();
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference outputs of the published splitmix64 algorithm, computed
    // independently (matches e.g. the xoshiro project's seeding utility).
    #[test]
    fn matches_reference_vectors() {
        let cases: [(u64, [u64; 4]); 3] = [
            (0, [0xe220a8397b1dcdaf, 0x6e789e6aa1b965f4, 0x06c45d188009454f, 0xf88bb8a8724c81ec]),
            (1, [0x910a2dec89025cc1, 0xbeeb8da1658eec67, 0xf893a2eefb32555e, 0x71c18690ee42c90b]),
            (
                0x0123456789abcdef,
                [0x157a3807a48faa9d, 0xd573529b34a1d093, 0x2f90b72e996dccbe, 0xa2d419334c4667ec],
            ),
        ];
        for (seed, expect) in cases {
            let mut g = SplitMix64::new(seed);
            for e in expect {
                assert_eq!(g.next_u64(), e, "seed {seed:#x}");
            }
        }
    }

    #[test]
    fn below_is_uniform_enough_and_in_range() {
        let mut g = SplitMix64::new(42);
        let mut counts = [0u32; 7];
        for _ in 0..70_000 {
            counts[g.below(7) as usize] += 1;
        }
        for c in counts {
            assert!((c as i64 - 10_000).abs() < 500, "counts {counts:?}");
        }
    }

    #[test]
    fn subset_is_sorted_distinct_and_seed_stable() {
        let mut g = SplitMix64::new(7);
        let s = g.subset(100, 10);
        assert_eq!(s.len(), 10);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        let s2 = SplitMix64::new(7).subset(100, 10);
        assert_eq!(s, s2);
        let all = SplitMix64::new(9).subset(12, 12);
        assert_eq!(all, (0..12).collect::<Vec<u32>>());
    }

    #[test]
    fn substreams_differ_from_each_other_and_the_base() {
        let a: Vec<u64> = (0..8).map(|i| SplitMix64::substream(5, i).next_u64()).collect();
        for i in 0..8 {
            for j in 0..i {
                assert_ne!(a[i], a[j]);
            }
        }
        assert_ne!(SplitMix64::new(5).next_u64(), a[0]);
    }
}
