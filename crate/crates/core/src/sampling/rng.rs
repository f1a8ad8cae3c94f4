use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator handed to samplers. ChaCha is counter-based, so any
/// `(seed, stream, word position)` is directly addressable.
pub type StreamRng = ChaCha8Rng;

/// Addressable family of independent random streams under one seed.
///
/// Stream ids are built from a level index and a per-level sample counter, so
/// the draws that make up a sample depend only on `(seed, level, index)` and
/// not on worker count or scheduling.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    base: ChaCha8Rng,
}

const LEVEL_BITS: u32 = 8;

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, base: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Stream id for sample `index` of `level`.
    pub fn stream_id(level: usize, index: u64) -> u64 {
        assert!(level < (1 << LEVEL_BITS), "level index out of range");
        assert!(index < (1 << (64 - LEVEL_BITS)), "sample index out of range");
        ((level as u64) << (64 - LEVEL_BITS)) | index
    }

    pub fn stream(&self, stream_id: u64) -> StreamRng {
        let mut rng = self.base.clone();
        rng.set_stream(stream_id);
        rng.set_word_pos(0);
        rng
    }

    pub fn for_sample(&self, level: usize, index: u64) -> StreamRng {
        self.stream(Self::stream_id(level, index))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn replay_is_identical() {
        let a = RngStream::new(42);
        let b = RngStream::new(42);
        let xa: Vec<u64> = (0..8).map(|_| a.for_sample(1, 17).random()).collect();
        let mut ra = a.for_sample(1, 17);
        let mut rb = b.for_sample(1, 17);
        for _ in 0..100 {
            assert_eq!(ra.random::<u64>(), rb.random::<u64>());
        }
        assert!(xa.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn streams_differ() {
        let s = RngStream::new(1);
        let x: u64 = s.for_sample(0, 0).random();
        let y: u64 = s.for_sample(0, 1).random();
        let z: u64 = s.for_sample(1, 0).random();
        assert!(x != y && x != z && y != z);
        let other: u64 = RngStream::new(2).for_sample(0, 0).random();
        assert_ne!(x, other);
    }

    #[test]
    fn known_first_draw_is_stable() {
        // Frozen value guards against silent changes in stream derivation.
        let v: u64 = RngStream::new(0).for_sample(0, 0).random();
        let again: u64 = RngStream::new(0).stream(0).random();
        assert_eq!(v, again);
        assert_eq!(v, 13080132717333068652);
        let w: u64 = RngStream::new(2018).for_sample(3, 12345).random();
        assert_eq!(w, 14621055958649551942);
    }
}
