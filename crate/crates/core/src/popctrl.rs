//! Uniform combing of the census bank.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::transport::{Particle, ParticleBank};

#[derive(Debug, Clone, PartialEq)]
pub struct CombResult {
    pub bank: ParticleBank,
    pub input_count: usize,
    pub output_count: usize,
    pub input_weight: f64,
    pub output_weight: f64,
    /// Weight of every emitted particle.
    pub tooth_weight: f64,
}

/// Places `target` equally spaced teeth on the cumulative-weight axis of the
/// bank (in bank order) with one random offset; each tooth emits a copy of the
/// particle whose interval contains it, with weight `W / target`.
pub fn uniform_comb(bank: &ParticleBank, target: usize, rng: &mut RngStream) -> Result<CombResult> {
    if bank.is_empty() {
        return Err(Error::InvalidArgument("cannot comb an empty bank".into()));
    }
    if target == 0 {
        return Err(Error::InvalidArgument("comb target must be positive".into()));
    }
    let total = bank.total_weight();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::NonFinite(format!("bank weight {total}")));
    }
    let s = total / target as f64;
    let offset = rng.uniform() * s;
    let mut out = Vec::with_capacity(target);
    let mut cum = 0.0;
    let mut m = 0usize;
    let last = bank.len() - 1;
    for (k, p) in bank.particles.iter().enumerate() {
        cum += p.w;
        // the final particle absorbs round-off in the cumulative sum
        while m < target && (k == last || offset + m as f64 * s < cum) {
            out.push(Particle { w: s, ..*p });
            m += 1;
        }
        if m == target {
            break;
        }
    }
    Ok(CombResult {
        input_count: bank.len(),
        output_count: out.len(),
        input_weight: total,
        output_weight: s * out.len() as f64,
        tooth_weight: s,
        bank: ParticleBank::new(out),
    })
}

/// Places `target` equally spaced teeth on the particle-index axis with one random
/// offset, so every particle has the same chance of selection regardless of its
/// weight. Selected copies keep their weight scaled by `N / target`; the total
/// weight is preserved in expectation rather than exactly.
pub fn particle_comb(bank: &ParticleBank, target: usize, rng: &mut RngStream) -> Result<CombResult> {
    if bank.is_empty() {
        return Err(Error::InvalidArgument("cannot comb an empty bank".into()));
    }
    if target == 0 {
        return Err(Error::InvalidArgument("comb target must be positive".into()));
    }
    let total = bank.total_weight();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::NonFinite(format!("bank weight {total}")));
    }
    let n = bank.len();
    let s = n as f64 / target as f64;
    let offset = rng.uniform() * s;
    let out: Vec<Particle> = (0..target)
        .map(|m| {
            let k = ((offset + m as f64 * s) as usize).min(n - 1);
            let p = bank.particles[k];
            Particle { w: p.w * s, ..p }
        })
        .collect();
    let bank_out = ParticleBank::new(out);
    Ok(CombResult {
        input_count: n,
        output_count: target,
        input_weight: total,
        output_weight: bank_out.total_weight(),
        tooth_weight: s,
        bank: bank_out,
    })
}
