//! Experience sampling orders: sequential, random, and strided.
//!
//! One episode visits `chunk_len` experiences. SEQ and STR emit every chunk
//! index exactly once; RAN draws with replacement so all strategies do the
//! same amount of update work per episode.

use super::rng::RngState;

/// How a core walks its chunk within one episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingStrategy {
    /// In-order pass: 0, 1, ..., len-1.
    Seq,
    /// `len` uniform draws with replacement.
    Ran,
    /// Stride-interleaved pass: all residues offset by `stride` in turn, so
    /// every index is still visited exactly once even when the stride shares
    /// a factor with the chunk length.
    Str { stride: usize },
}

impl SamplingStrategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            SamplingStrategy::Seq => "seq",
            SamplingStrategy::Ran => "ran",
            SamplingStrategy::Str { .. } => "str",
        }
    }
}

/// Fill `out` with the visit order for one episode.
pub fn sample_order_into(
    strategy: SamplingStrategy,
    chunk_len: usize,
    rng: &mut RngState,
    out: &mut Vec<u32>,
) {
    assert!(chunk_len >= 1, "empty chunk");
    assert!(
        chunk_len <= u32::MAX as usize,
        "chunk too large for u32 indices"
    );
    out.clear();
    out.reserve(chunk_len);
    match strategy {
        SamplingStrategy::Seq => out.extend(0..chunk_len as u32),
        SamplingStrategy::Str { stride } => {
            assert!(stride >= 1, "stride must be >= 1");
            for offset in 0..stride.min(chunk_len) {
                let mut i = offset;
                while i < chunk_len {
                    out.push(i as u32);
                    i += stride;
                }
            }
        }
        SamplingStrategy::Ran => {
            for _ in 0..chunk_len {
                out.push(rng.below(chunk_len as u32));
            }
        }
    }
}

/// Allocating form of [`sample_order_into`].
pub fn sample_order(strategy: SamplingStrategy, chunk_len: usize, rng: &mut RngState) -> Vec<u32> {
    let mut out = Vec::new();
    sample_order_into(strategy, chunk_len, rng, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn seq_is_identity() {
        let mut rng = RngState::from_seed(1);
        assert_eq!(
            sample_order(SamplingStrategy::Seq, 5, &mut rng),
            vec![0, 1, 2, 3, 4]
        );
        // SEQ never touches the generator.
        assert_eq!(rng, RngState::from_seed(1));
    }

    #[test]
    fn str_interleaves_offsets() {
        let mut rng = RngState::from_seed(1);
        let order = sample_order(SamplingStrategy::Str { stride: 4 }, 8, &mut rng);
        assert_eq!(order, vec![0, 4, 1, 5, 2, 6, 3, 7]);
    }

    #[test]
    fn str_handles_stride_beyond_len() {
        let mut rng = RngState::from_seed(1);
        let order = sample_order(SamplingStrategy::Str { stride: 50 }, 3, &mut rng);
        assert_eq!(order, vec![0, 1, 2]);
    }

    #[test]
    fn ran_replays_the_lcg_trace() {
        let mut rng = RngState::from_seed(1);
        let order = sample_order(SamplingStrategy::Ran, 8, &mut rng);

        let mut replay = RngState::from_seed(1);
        let expected: Vec<u32> = (0..8).map(|_| replay.below(8)).collect();
        assert_eq!(order, expected);
        assert_eq!(rng, replay);
    }

    proptest! {
        #[test]
        fn seq_and_str_are_permutations(
            len in 1usize..200,
            stride in 1usize..60,
            seed in 0u64..1_000,
        ) {
            let mut rng = RngState::from_seed(seed);
            for strategy in [SamplingStrategy::Seq, SamplingStrategy::Str { stride }] {
                let mut order = sample_order(strategy, len, &mut rng);
                prop_assert_eq!(order.len(), len);
                order.sort_unstable();
                let sorted: Vec<u32> = (0..len as u32).collect();
                prop_assert_eq!(order, sorted);
            }
        }

        #[test]
        fn ran_has_episode_length(len in 1usize..200, seed in 0u64..1_000) {
            let mut rng = RngState::from_seed(seed);
            let order = sample_order(SamplingStrategy::Ran, len, &mut rng);
            prop_assert_eq!(order.len(), len);
            prop_assert!(order.iter().all(|&i| (i as usize) < len));
        }
    }
}
