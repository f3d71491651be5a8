use crate::error::{Error, Result};
use crate::real::Real;

/// One-group macroscopic material data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material<T> {
    /// Total cross section [1/cm].
    pub sigma_t: T,
    /// Scattering cross section [1/cm].
    pub sigma_s: T,
    /// Fission cross section [1/cm].
    pub sigma_f: T,
    /// Mean neutrons per fission.
    pub nu_f: T,
    /// Particle speed [cm/s].
    pub speed: T,
}

impl<T: Real> Material<T> {
    pub fn new(sigma_t: T, sigma_s: T, sigma_f: T, nu_f: T, speed: T) -> Result<Self> {
        let m = Self {
            sigma_t,
            sigma_s,
            sigma_f,
            nu_f,
            speed,
        };
        m.validate()?;
        Ok(m)
    }

    /// Supercritical infinite-medium benchmark: `Σ_t = 1`, `Σ_s = Σ_f = 1/3`, `ν = 2.3`, `v = 1`.
    pub fn benchmark() -> Self {
        Self {
            sigma_t: T::one(),
            sigma_s: T::one() / T::lit(3.0),
            sigma_f: T::one() / T::lit(3.0),
            nu_f: T::lit(2.3),
            speed: T::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let z = T::zero();
        let all = [self.sigma_t, self.sigma_s, self.sigma_f, self.nu_f, self.speed];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMaterial("all fields must be finite".into()));
        }
        if !(self.sigma_t > z) {
            return Err(Error::InvalidMaterial("sigma_t must be > 0".into()));
        }
        if self.sigma_s < z || self.sigma_s > self.sigma_t {
            return Err(Error::InvalidMaterial("sigma_s must lie in [0, sigma_t]".into()));
        }
        if self.sigma_f < z || self.sigma_f > self.sigma_t {
            return Err(Error::InvalidMaterial("sigma_f must lie in [0, sigma_t]".into()));
        }
        // allow round-off in 1/3 + 1/3 style inputs
        if self.sigma_s + self.sigma_f > self.sigma_t * (T::one() + T::epsilon() * T::lit(4.0)) {
            return Err(Error::InvalidMaterial("sigma_s + sigma_f must not exceed sigma_t".into()));
        }
        if self.nu_f < z {
            return Err(Error::InvalidMaterial("nu_f must be >= 0".into()));
        }
        if !(self.speed > z) {
            return Err(Error::InvalidMaterial("speed must be > 0".into()));
        }
        Ok(())
    }

    /// Net removal `Σ_t − Σ_s − ν_f Σ_f`; negative for a multiplying medium.
    pub fn sigma_removal(&self) -> T {
        self.sigma_t - self.sigma_s - self.nu_f * self.sigma_f
    }

    /// Isotropic production `Σ_s + ν_f Σ_f`.
    pub fn sigma_production(&self) -> T {
        self.sigma_s + self.nu_f * self.sigma_f
    }

    pub fn sigma_capture(&self) -> T {
        self.sigma_t - self.sigma_s - self.sigma_f
    }

    /// Infinite-medium population growth rate `v (Σ_s + ν_f Σ_f − Σ_t)` [1/s].
    pub fn growth_rate(&self) -> T {
        -self.speed * self.sigma_removal()
    }
}
