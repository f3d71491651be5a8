//! Noise filters for the grid functions that feed the low-order solve.
//!
//! Both filters are linear. The Monte Carlo estimate itself is never filtered;
//! only the closures and initial conditions of the auxiliary problem pass through here.

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterSpec {
    #[default]
    None,
    /// Centred moving average with half-width `k`.
    MovingAverage(usize),
    /// Keep the Fourier modes with `min(j, M - j) <= cutoff`.
    FourierLowpass(usize),
}

impl FilterSpec {
    pub fn apply<T: Real>(&self, g: &[T]) -> Vec<T> {
        match *self {
            FilterSpec::None => g.to_vec(),
            FilterSpec::MovingAverage(k) => moving_average(g, k),
            FilterSpec::FourierLowpass(cutoff) => fourier_lowpass(g, cutoff),
        }
    }
}

/// Moving average whose half-width shrinks near the ends so the window stays inside.
pub fn moving_average<T: Real>(g: &[T], k: usize) -> Vec<T> {
    let m = g.len();
    if k == 0 || m == 0 {
        return g.to_vec();
    }
    // prefix sums keep this O(M) for any k
    let mut prefix = Vec::with_capacity(m + 1);
    prefix.push(T::zero());
    let mut acc = T::zero();
    for &v in g {
        acc += v;
        prefix.push(acc);
    }
    (0..m)
        .map(|i| {
            let km = k.min(i).min(m - 1 - i);
            if km == 0 {
                return g[i];
            }
            // direct sum for short windows avoids prefix cancellation on large data
            let lo = i - km;
            let hi = i + km;
            let sum: T = if km <= 16 {
                g[lo..=hi].iter().copied().sum()
            } else {
                prefix[hi + 1] - prefix[lo]
            };
            sum / T::count(2 * km + 1)
        })
        .collect()
}

/// Real low-pass through a directly summed DFT with conjugate-symmetric mode retention.
pub fn fourier_lowpass<T: Real>(g: &[T], cutoff: usize) -> Vec<T> {
    let m = g.len();
    if m == 0 {
        return Vec::new();
    }
    if 2 * cutoff >= m {
        return g.to_vec();
    }
    let two_pi_over_m = T::TAU() / T::count(m);
    let cos_tab: Vec<T> = (0..m).map(|r| (two_pi_over_m * T::count(r)).cos()).collect();
    let sin_tab: Vec<T> = (0..m).map(|r| (two_pi_over_m * T::count(r)).sin()).collect();

    let retained: Vec<usize> = (0..m).filter(|&j| j.min(m - j) <= cutoff).collect();
    let mut spectrum = Vec::with_capacity(retained.len());
    for &j in &retained {
        let (mut re, mut im) = (T::zero(), T::zero());
        for (idx, &v) in g.iter().enumerate() {
            let r = (j * idx) % m;
            re += v * cos_tab[r];
            im -= v * sin_tab[r];
        }
        spectrum.push((j, re, im));
    }
    let inv_m = T::one() / T::count(m);
    (0..m)
        .map(|idx| {
            let mut re = T::zero();
            for &(j, sr, si) in &spectrum {
                let r = (j * idx) % m;
                // real part of (sr + i si)(cos + i sin)
                re += sr * cos_tab[r] - si * sin_tab[r];
            }
            re * inv_m
        })
        .collect()
}

/// Cell and edge grid functions that enter the low-order solve of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct LowOrderInputs<T> {
    /// Closure at the new layer (cell averages); absent for the start-of-step solve.
    pub closure_now: Option<Vec<T>>,
    /// Closure at the previous layer (cell averages).
    pub closure_prev: Vec<T>,
    /// Scalar flux at the previous layer (cell averages).
    pub phi_prev: Vec<T>,
    /// Current at the previous layer (edge values).
    pub current_prev: Vec<T>,
}

impl<T: Real> LowOrderInputs<T> {
    pub fn check(&self) -> Result<()> {
        let cells = self.phi_prev.len();
        let shape = |what: &str, expected: usize, found: usize| -> Result<()> {
            if expected != found {
                Err(Error::Shape {
                    what: what.into(),
                    expected,
                    found,
                })
            } else {
                Ok(())
            }
        };
        shape("previous closure", cells, self.closure_prev.len())?;
        shape("previous edge current", cells + 1, self.current_prev.len())?;
        if let Some(f) = &self.closure_now {
            shape("closure", cells, f.len())?;
        }
        Ok(())
    }
}

/// Filters every grid function of `inputs` independently with the same filter.
pub fn apply_filter_pipeline<T: Real>(inputs: &LowOrderInputs<T>, spec: FilterSpec) -> Result<LowOrderInputs<T>> {
    inputs.check()?;
    Ok(LowOrderInputs {
        closure_now: inputs.closure_now.as_ref().map(|f| spec.apply(f)),
        closure_prev: spec.apply(&inputs.closure_prev),
        phi_prev: spec.apply(&inputs.phi_prev),
        current_prev: spec.apply(&inputs.current_prev),
    })
}
