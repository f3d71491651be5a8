//! Run configuration and its validation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::FilterSpec;
use crate::material::Material;
use crate::mesh::{build_uniform_mesh, Mesh1D, TimeGrid};
use crate::real::Real;

/// Variance-reduction mode of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// No weight windows.
    Analog,
    /// Windows centred on the previous step's track-length flux.
    Lww,
    /// Windows centred on the hybrid low-order solution.
    Hww,
    /// Hybrid windows with moving-average filtered low-order inputs.
    HwwMa,
    /// Hybrid windows with Fourier low-pass filtered low-order inputs.
    HwwFourier,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::Analog, Mode::Lww, Mode::Hww, Mode::HwwMa, Mode::HwwFourier];

    pub fn is_hybrid(self) -> bool {
        matches!(self, Mode::Hww | Mode::HwwMa | Mode::HwwFourier)
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Analog => "analog",
            Mode::Lww => "lww",
            Mode::Hww => "hww",
            Mode::HwwMa => "hww_ma",
            Mode::HwwFourier => "hww_fourier",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Mode::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode '{s}' (expected one of analog, lww, hww, hww_ma, hww_fourier)"))
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Population-control variant applied to the census bank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombKind {
    /// Teeth on the cumulative-weight axis; every survivor gets weight `W / H`.
    #[default]
    Weight,
    /// Teeth on the particle-index axis; survivors keep their relative weights.
    Particle,
}

/// Isotropic point pulse emitted at `t0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub x0: f64,
    pub strength: f64,
    pub t0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    pub sigma_t: f64,
    pub sigma_s: f64,
    pub sigma_f: f64,
    pub nu_f: f64,
    pub speed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    pub t0: f64,
    pub dt: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    pub histories_per_step: usize,
    pub theta: f64,
    pub rho: f64,
    pub eps_min: f64,
    pub u_ww: usize,
    pub update_fractions: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ma_base: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fourier_cutoff: Option<usize>,
    pub batches: usize,
    pub seed: u64,
    pub target_population: usize,
    /// Threshold of the low-flux norm.
    #[serde(default = "default_phi_star")]
    pub phi_star: f64,
    #[serde(default = "default_event_cap")]
    pub max_events_per_history: u64,
    #[serde(default)]
    pub comb: CombKind,
    pub source: SourceSpec,
    pub material: MaterialSpec,
    pub mesh: MeshSpec,
    pub time: TimeSpec,
}

fn default_phi_star() -> f64 {
    1e-3
}

fn default_event_cap() -> u64 {
    1_000_000
}

impl RunConfig {
    /// The supercritical point-pulse benchmark with hybrid windows (CN, ρ = 1.25,
    /// ε_min = 1e-3, three updates at quarter fractions, 10^4 histories per step).
    pub fn benchmark() -> Self {
        Self {
            mode: Mode::Hww,
            histories_per_step: 10_000,
            theta: 0.5,
            rho: 1.25,
            eps_min: 1e-3,
            u_ww: 3,
            update_fractions: vec![0.25, 0.5, 0.75],
            ma_base: Some(3),
            fourier_cutoff: Some(30),
            batches: 20,
            seed: 1,
            target_population: 10_000,
            phi_star: default_phi_star(),
            max_events_per_history: default_event_cap(),
            comb: CombKind::Weight,
            source: SourceSpec {
                x0: 0.0,
                strength: 1.0,
                t0: 0.0,
            },
            material: MaterialSpec {
                sigma_t: 1.0,
                sigma_s: 1.0 / 3.0,
                sigma_f: 1.0 / 3.0,
                nu_f: 2.3,
                speed: 1.0,
            },
            mesh: MeshSpec {
                x_min: -20.5,
                x_max: 20.5,
                cells: 201,
            },
            time: TimeSpec {
                t0: 0.0,
                dt: 1.0,
                steps: 20,
            },
        }
    }

    /// Checks every field invariant and returns all violations at once.
    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut v = Vec::new();
        if self.histories_per_step == 0 {
            v.push("histories_per_step must be positive".to_string());
        }
        if !(self.theta >= 0.5 && self.theta <= 1.0) {
            v.push(format!("theta must lie in [1/2, 1] (got {})", self.theta));
        }
        if !(self.rho >= 1.0) {
            v.push("rho must be ≥ 1".to_string());
        }
        if !(self.eps_min > 0.0 && self.eps_min < 1.0) {
            v.push(format!("eps_min must lie in (0, 1) (got {})", self.eps_min));
        }
        if self.update_fractions.len() != self.u_ww {
            v.push(format!(
                "u_ww = {} but {} update fractions given",
                self.u_ww,
                self.update_fractions.len()
            ));
        }
        if self.update_fractions.iter().any(|f| !(*f > 0.0 && *f < 1.0)) {
            v.push("update fractions must lie in (0, 1)".to_string());
        }
        if self.update_fractions.windows(2).any(|w| !(w[1] > w[0])) {
            v.push("update fractions must increase".to_string());
        }
        if self.batches < 2 {
            v.push("batches must be at least 2".to_string());
        }
        if self.target_population == 0 {
            v.push("target_population must be positive".to_string());
        }
        if !(self.phi_star >= 0.0) {
            v.push("phi_star must be nonnegative".to_string());
        }
        if self.max_events_per_history == 0 {
            v.push("max_events_per_history must be positive".to_string());
        }
        match self.mode {
            Mode::HwwMa if self.ma_base.is_none() => {
                v.push("mode hww_ma requires ma_base".to_string())
            }
            Mode::HwwFourier if self.fourier_cutoff.is_none() => {
                v.push("mode hww_fourier requires fourier_cutoff".to_string())
            }
            _ => {}
        }
        if self.source.strength <= 0.0 || !self.source.strength.is_finite() {
            v.push("source strength must be positive".to_string());
        }
        if let Err(e) = self.material::<f64>() {
            v.push(e.to_string());
        }
        match self.mesh::<f64>() {
            Err(e) => v.push(e.to_string()),
            Ok(mesh) => {
                if mesh.cell_index(self.source.x0).is_none() {
                    v.push(format!("source position {} lies outside the mesh", self.source.x0));
                }
            }
        }
        if let Err(e) = self.time_grid::<f64>() {
            v.push(e.to_string());
        }
        if self.time.steps == 0 {
            v.push("at least one time step required".to_string());
        }
        if (self.source.t0 - self.time.t0).abs() > 0.0 {
            v.push("source t0 must coincide with the first time layer".to_string());
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }

    pub fn validated(&self) -> Result<()> {
        self.validate().map_err(Error::Config)
    }

    pub fn material<T: Real>(&self) -> Result<Material<T>> {
        let m = &self.material;
        Material::new(T::lit(m.sigma_t), T::lit(m.sigma_s), T::lit(m.sigma_f), T::lit(m.nu_f), T::lit(m.speed))
    }

    pub fn mesh<T: Real>(&self) -> Result<Mesh1D<T>> {
        build_uniform_mesh(T::lit(self.mesh.x_min), T::lit(self.mesh.x_max), self.mesh.cells)
    }

    pub fn time_grid<T: Real>(&self) -> Result<TimeGrid<T>> {
        TimeGrid::uniform(T::lit(self.time.t0), T::lit(self.time.dt), self.time.steps)
    }

    /// Filter applied to the low-order inputs in this mode.
    pub fn filter_spec(&self) -> FilterSpec {
        match self.mode {
            Mode::HwwMa => FilterSpec::MovingAverage(self.ma_base.unwrap_or(0)),
            Mode::HwwFourier => FilterSpec::FourierLowpass(self.fourier_cutoff.unwrap_or(0)),
            _ => FilterSpec::None,
        }
    }
}
