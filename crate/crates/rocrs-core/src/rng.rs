//! Deterministic randomness: a SplitMix64 generator plus keyed coin streams.
//!
//! Every random decision in a trial is derived from `(trial_seed, edge, tag)`,
//! so activity, exclusion, and sample membership are three independent coin
//! streams per edge. Trials are reproducible and can be aggregated in any
//! order or across any number of workers.

/// SplitMix64 (Steele, Lea, Flood). Small state, passes BigCrush, `no_std`.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        finalize(self.state)
    }

    /// Uniform integer in `[0, n)` via rejection sampling. Panics if `n == 0`.
    pub fn uniform_below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        if n.is_power_of_two() {
            return self.next_u64() & (n - 1);
        }
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let r = self.next_u64();
            if r < zone {
                return r % n;
            }
        }
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.uniform_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// Stateless mixing of a seed with two keys; used to derive independent
/// substreams (one per `(edge, tag)`) from a single trial seed.
#[inline]
pub fn mix(seed: u64, a: u64, b: u64) -> u64 {
    finalize(
        finalize(seed.wrapping_add(GOLDEN))
            ^ finalize(a.wrapping_mul(GOLDEN).wrapping_add(0x6a09_e667_f3bc_c909))
            ^ finalize(b.wrapping_mul(0xbb67_ae85_84ca_a73b).wrapping_add(GOLDEN)),
    )
}

/// Coin stream tags. One tag per kind of random decision.
pub mod tag {
    pub const ACTIVE: u64 = 1;
    pub const EXCLUDE: u64 = 2;
    pub const SAMPLE: u64 = 3;
    pub const BINOMIAL: u64 = 4;
    pub const LABELING: u64 = 5;
    pub const ARRIVAL: u64 = 6;
}

/// Per-trial source of independent biased coins.
#[derive(Debug, Clone, Copy)]
pub struct CoinBox {
    trial_seed: u64,
}

impl CoinBox {
    pub fn new(trial_seed: u64) -> CoinBox {
        CoinBox { trial_seed }
    }

    /// Derives the canonical seed for trial `index` under `master_seed`.
    pub fn for_trial(master_seed: u64, index: u64) -> CoinBox {
        CoinBox::new(mix(master_seed, index, 0x7472_6961_6c00))
    }

    /// A biased coin that lands `true` with probability `num/den`
    /// (exact up to 2^-64), independent across `(edge, tag)` pairs.
    #[inline]
    pub fn coin(&self, edge: usize, tag: u64, num: i64, den: i64) -> bool {
        debug_assert!(den > 0 && num >= 0);
        if num >= den {
            return true;
        }
        if num == 0 {
            return false;
        }
        let threshold = (((num as u128) << 64) / den as u128) as u64;
        mix(self.trial_seed, edge as u64, tag) < threshold
    }

    /// A sequential generator for decisions that are not per-edge coins
    /// (labeling positions, arrival shuffles).
    pub fn stream(&self, tag: u64) -> SplitMix64 {
        SplitMix64::new(mix(self.trial_seed, 0, tag))
    }

    /// Binomial(m, num/den) by summing `m` independent indexed coins.
    pub fn binomial(&self, m: usize, num: i64, den: i64) -> usize {
        (0..m).filter(|&i| self.coin(i, tag::BINOMIAL, num, den)).count()
    }
}
