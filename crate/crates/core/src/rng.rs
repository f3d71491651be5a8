//! Counter-based random streams.
//!
//! Every stream is a ChaCha8 keystream keyed by the run seed and selected by a
//! 64-bit stream id, so the deviates a history sees depend only on
//! `(seed, stream_id, draw_index)` and never on thread scheduling.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Purpose tag folded into a stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamKind {
    /// Flights, collisions and emission directions of one history.
    Physics = 0,
    /// Roulette decisions of one history.
    Window = 1,
    /// Source sampling of one time step.
    Source = 2,
    /// Population-control comb offset of one time step.
    Comb = 3,
}

/// Packs `(step, kind, index)` into a stream id: 20 bits step, 4 bits kind, 40 bits index.
pub fn stream_id(step: usize, kind: StreamKind, index: u64) -> u64 {
    debug_assert!(step < (1 << 20) && index < (1 << 40));
    ((step as u64) << 44) | ((kind as u64) << 40) | (index & ((1 << 40) - 1))
}

#[derive(Clone, Debug)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

/// Opens the stream `stream_id` of the run keyed by `seed`.
pub fn spawn_stream(seed: u64, stream_id: u64) -> RngStream {
    let mut key = [0u8; 32];
    let mut s = seed;
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
    }
    let mut inner = ChaCha8Rng::from_seed(key);
    inner.set_stream(stream_id);
    RngStream { inner }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    /// Uniform deviate in the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}
