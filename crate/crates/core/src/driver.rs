//! Per-step driver: combing, low-order solves, window updates, transport, metrics.
//!
//! Particle weights are carried relative to a per-step unit: after combing
//! every source particle has weight one and `unit` holds its physical weight.
//! Window centers, which peak at one, therefore sit on the scale of a source
//! particle.

use std::time::Instant;

use crate::config::{CombKind, Mode, RunConfig};
use crate::error::{Error, Result};
use crate::filters::{apply_filter_pipeline, FilterSpec, LowOrderInputs};
use crate::losm::{assemble_solve, edge_currents_from_census, with_boundary, ClosureInput, LosmProblem, LosmState};
use crate::material::Material;
use crate::mesh::{Mesh1D, TimeGrid};
use crate::metrics::{self, StepMetrics};
use crate::popctrl::{particle_comb, uniform_comb};
use crate::reference::ReferenceSolution;
use crate::rng::{spawn_stream, stream_id, StreamKind};
use crate::tally::{TallyGeometry, TallyReport, TallySet};
use crate::transport::{run_segment, sample_pulse_source, Counters, HistoryContext, Particle, ParticleBank};
use crate::ww::{build_centers, lww_centers, schedule, WeightWindowGrid};

/// One low-order solve of a step.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridSolve {
    /// Histories completed when the solve ran (0 for the start-of-step solve).
    pub histories: u64,
    /// Cell-average scalar flux at the new layer, `None` if the solve failed.
    pub phi: Option<Vec<f64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombStats {
    pub input_count: usize,
    pub output_count: usize,
    /// Physical weights.
    pub input_weight: f64,
    pub output_weight: f64,
}

#[derive(Debug, Clone)]
pub struct StepRecord {
    pub n: usize,
    pub t: f64,
    pub report: TallyReport,
    pub hybrid: Vec<HybridSolve>,
    /// Centers in force at the end of the step.
    pub centers: Option<Vec<f64>>,
    pub comb: Option<CombStats>,
    pub counters: Counters,
    pub metrics: StepMetrics,
    /// Raw and filtered new-layer closure of the last implicit solve.
    pub closure_raw: Option<Vec<f64>>,
    pub closure_filtered: Option<Vec<f64>>,
}

impl StepRecord {
    /// Flux of the last successful low-order solve.
    pub fn last_hybrid(&self) -> Option<&[f64]> {
        self.hybrid.iter().rev().find_map(|h| h.phi.as_deref())
    }
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config: RunConfig,
    pub steps: Vec<StepRecord>,
    pub total_runtime_s: f64,
    pub reference: Option<String>,
}

/// State carried from one step to the next.
#[derive(Debug, Clone)]
pub struct StepState {
    pub bank: ParticleBank,
    /// Physical weight of relative weight one.
    pub unit: f64,
    pub prev_report: Option<TallyReport>,
    pub windows: Option<WeightWindowGrid<f64>>,
}

struct LowOrderStart {
    inputs: LowOrderInputs<f64>,
    p: (f64, f64),
    /// Source density applied at both time levels.
    source: Vec<f64>,
}

/// Immutable data of a run.
pub struct Simulation {
    pub config: RunConfig,
    pub mesh: Mesh1D<f64>,
    pub materials: Vec<Material<f64>>,
    pub grid: TimeGrid<f64>,
    filter: FilterSpec,
}

impl Simulation {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validated()?;
        let mesh = config.mesh::<f64>()?;
        let material = config.material::<f64>()?;
        let materials = vec![material; mesh.cells()];
        let grid = config.time_grid::<f64>()?;
        let filter = config.filter_spec();
        Ok(Self {
            config,
            mesh,
            materials,
            grid,
            filter,
        })
    }

    /// Initial state: the pulse bank at `t0`.
    pub fn initial_state(&self) -> Result<StepState> {
        let c = &self.config;
        let mut rng = spawn_stream(c.seed, stream_id(1, StreamKind::Source, 0));
        let bank = sample_pulse_source(c.histories_per_step, c.source.x0, c.histories_per_step as f64, c.source.t0, &mut rng)?;
        Ok(StepState {
            bank,
            unit: c.source.strength / c.histories_per_step as f64,
            prev_report: None,
            windows: None,
        })
    }

    /// Low-order data at the start of step `n`: previous census tallies, or for
    /// the first step the empty initial state and the pulse spread over the step
    /// as a constant source density.
    fn previous_layer(&self, state: &StepState) -> Result<LowOrderStart> {
        let cells = self.mesh.cells();
        match &state.prev_report {
            Some(r) => Ok(LowOrderStart {
                inputs: LowOrderInputs {
                    closure_now: None,
                    closure_prev: r.f_census.clone(),
                    phi_prev: r.phi_census.clone(),
                    current_prev: edge_currents_from_census(&r.j_census, &self.mesh)?,
                },
                p: (r.p_left, r.p_right),
                source: vec![0.0; cells],
            }),
            None => {
                let c = &self.config;
                let mut source = vec![0.0; cells];
                let i = self
                    .mesh
                    .cell_index(c.source.x0)
                    .ok_or_else(|| Error::InvalidArgument("source outside the mesh".into()))?;
                let (ta, tb) = self.grid.interval(1);
                source[i] = c.source.strength / ((tb - ta) * self.mesh.width(i));
                Ok(LowOrderStart {
                    inputs: LowOrderInputs {
                        closure_now: None,
                        closure_prev: vec![0.0; cells],
                        phi_prev: vec![0.0; cells],
                        current_prev: vec![0.0; cells + 1],
                    },
                    p: (0.0, 0.0),
                    source,
                })
            }
        }
    }

    /// Filters the inputs and solves the low-order system of step `n`.
    /// Returns the solution and the filtered new-layer closure (if any).
    fn hybrid_solve(
        &self,
        n: usize,
        start: &LowOrderStart,
        now: Option<(&[f64], f64, f64)>,
    ) -> Result<(LosmState<f64>, Option<Vec<f64>>)> {
        let inputs = LowOrderInputs {
            closure_now: now.map(|(f, _, _)| f.to_vec()),
            ..start.inputs.clone()
        };
        let filtered = apply_filter_pipeline(&inputs, self.filter)?;
        let prev = LosmState::from_cells(&filtered.phi_prev, filtered.current_prev.clone(), &filtered.closure_prev, start.p.0, start.p.1);
        let closures = match (now, &filtered.closure_now) {
            (Some((_, pl, pr)), Some(f)) => ClosureInput::Implicit {
                closure: with_boundary(f),
                p_left: pl,
                p_right: pr,
            },
            _ => ClosureInput::Lagged,
        };
        let problem = LosmProblem::new(&self.mesh, &self.materials, self.config.theta);
        let out = assemble_solve(&problem, &prev, &closures, self.grid.dt(n), &start.source, &start.source)?;
        if out.phi.iter().chain(&out.current).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("low-order solution of step {n}")));
        }
        Ok((out, filtered.closure_now))
    }

    fn windows_from(&self, solve: &Result<(LosmState<f64>, Option<Vec<f64>>)>) -> Option<WeightWindowGrid<f64>> {
        let (s, _) = solve.as_ref().ok()?;
        match build_centers(s.phi_cells(), self.config.rho, self.config.eps_min) {
            Ok(g) => Some(g),
            Err(e) => {
                log::warn!("window construction failed: {e}");
                None
            }
        }
    }

    /// Runs step `n` from `state`, leaving the next step's state behind.
    pub fn run_step(&self, n: usize, state: &mut StepState, reference: Option<&ReferenceSolution>) -> Result<StepRecord> {
        let c = &self.config;
        let cells = self.mesh.cells();
        let (ta, tb) = self.grid.interval(n);

        // (1) population control
        let comb = if n > 1 {
            let mut rng = spawn_stream(c.seed, stream_id(n, StreamKind::Comb, 0));
            let r = match c.comb {
                CombKind::Weight => uniform_comb(&state.bank, c.target_population, &mut rng)?,
                CombKind::Particle => particle_comb(&state.bank, c.target_population, &mut rng)?,
            };
            let stats = CombStats {
                input_count: r.input_count,
                output_count: r.output_count,
                input_weight: r.input_weight * state.unit,
                output_weight: r.output_weight * state.unit,
            };
            log::info!(
                "step {n}: comb {} -> {} particles, weight {:.6e} -> {:.6e}",
                stats.input_count,
                stats.output_count,
                stats.input_weight,
                stats.output_weight
            );
            match c.comb {
                CombKind::Weight => {
                    state.unit *= r.tooth_weight;
                    state.bank = ParticleBank::new(r.bank.particles.into_iter().map(|p| Particle { w: 1.0, ..p }).collect());
                }
                CombKind::Particle => state.bank = r.bank,
            }
            Some(stats)
        } else {
            None
        };
        let h = state.bank.len() as u64;
        if h == 0 {
            return Err(Error::InvalidArgument(format!("step {n} has no source particles")));
        }
        let source_weight = state.unit * h as f64;
        let clock = Instant::now();

        // (2)-(3) start-of-step windows
        let mut hybrid = Vec::new();
        let mut closure_raw = None;
        let mut closure_filtered = None;
        let base = if c.mode.is_hybrid() { Some(self.previous_layer(state)?) } else { None };
        let mut windows: Option<WeightWindowGrid<f64>> = match c.mode {
            Mode::Analog => None,
            Mode::Lww => match &state.prev_report {
                Some(r) => Some(lww_centers(Some(&r.phi_track), cells, c.rho, c.eps_min)?),
                None => None,
            },
            _ => {
                let solve = self.hybrid_solve(n, base.as_ref().expect("hybrid base"), None);
                let grid = self.windows_from(&solve);
                hybrid.push(record_solve(0, &solve));
                match grid {
                    Some(g) => Some(g),
                    None => {
                        log::warn!("step {n}: start-of-step low-order solve failed; keeping previous windows");
                        state.windows.clone()
                    }
                }
            }
        };

        // (4) transport in segments separated by window updates
        let thresholds = if c.mode.is_hybrid() && c.u_ww > 0 {
            match schedule(h, &c.update_fractions) {
                Ok(s) => s.thresholds,
                Err(e) => {
                    log::warn!("step {n}: no window updates ({e})");
                    Vec::new()
                }
            }
        } else {
            Vec::new()
        };
        let geo = TallyGeometry::new(&self.mesh, tb - ta, c.material.speed)?;
        let mut tallies = TallySet::new(cells, c.batches, h)?;
        let mut counters = Counters::new(cells);
        let mut census = Vec::new();
        let mut start = 0u64;
        for &stop in thresholds.iter().chain(std::iter::once(&h)) {
            let ctx = HistoryContext {
                mesh: &self.mesh,
                materials: &self.materials,
                geometry: &geo,
                t_end: tb,
                windows: windows.as_ref(),
                max_events: c.max_events_per_history,
            };
            let out = run_segment(&state.bank.particles[start as usize..stop as usize], start, n, c.seed, &ctx, &mut tallies);
            counters.merge(&out.counters);
            census.extend(out.census.particles);
            start = stop;
            if stop < h {
                let snap = tallies.partial_snapshot(source_weight)?;
                let start = base.as_ref().expect("hybrid base");
                let solve = self.hybrid_solve(n, start, Some((&snap.f_census, snap.p_left, snap.p_right)));
                hybrid.push(record_solve(stop, &solve));
                if let Ok((_, f)) = &solve {
                    closure_raw = Some(snap.f_census.clone());
                    closure_filtered = f.clone();
                }
                match self.windows_from(&solve) {
                    Some(g) => windows = Some(g),
                    None => log::warn!("step {n}: low-order update after {stop} histories failed; keeping previous windows"),
                }
            }
        }
        let runtime = clock.elapsed().as_secs_f64().max(1e-9);

        // (5) finalize
        let report = tallies.finalize(source_weight)?;
        let census_sigma = tallies.census_weight_sigma(source_weight);
        let metrics = self.step_metrics(n, tb, runtime, &report, census_sigma, &counters, &hybrid, state, reference)?;
        let record = StepRecord {
            n,
            t: tb,
            report: report.clone(),
            hybrid,
            centers: windows.as_ref().map(|w| w.centers().to_vec()),
            comb,
            counters,
            metrics,
            closure_raw,
            closure_filtered,
        };
        state.bank = ParticleBank::new(census);
        state.prev_report = Some(report);
        state.windows = windows;
        Ok(record)
    }

    #[allow(clippy::too_many_arguments)]
    fn step_metrics(
        &self,
        n: usize,
        t: f64,
        runtime: f64,
        report: &TallyReport,
        census_sigma: Option<f64>,
        counters: &Counters,
        hybrid: &[HybridSolve],
        state: &StepState,
        reference: Option<&ReferenceSolution>,
    ) -> Result<StepMetrics> {
        let mesh = &self.mesh;
        let phi_star = self.config.phi_star;
        let mut m = StepMetrics {
            step: n,
            t,
            runtime_s: runtime,
            census_weight: report.census_weight,
            census_weight_sigma: census_sigma,
            histories: report.histories,
            occupied_cells: counters.tracks.iter().filter(|&&k| k > 0).count(),
            ..Default::default()
        };
        if let Some(sigma) = &report.sigma {
            let norm = metrics::l2_norm(&report.phi_track, mesh);
            if norm > 0.0 {
                m.relative_sigma_l2 = Some(metrics::l2_norm(sigma, mesh) / norm);
            }
        }
        if let Some(prev) = &state.prev_report {
            m.alpha = metrics::relative_change(&report.phi_track, &prev.phi_track, mesh).ok();
        }
        if let Some(r) = reference {
            if n <= r.steps() {
                let avg = &r.phi_interval[n - 1];
                let layer = &r.phi_layer[n - 1];
                m.rel_l2_error = metrics::relative_l2_error(&report.phi_track, avg, mesh).ok();
                m.rel_modified_l2_error = metrics::relative_modified_l2_error(&report.phi_track, avg, mesh, avg, phi_star);
                m.rel_l2_error_census = metrics::relative_l2_error(&report.phi_census, layer, mesh).ok();
                if let Some(hy) = hybrid.iter().rev().find_map(|h| h.phi.as_deref()) {
                    m.rel_l2_error_hybrid = metrics::relative_l2_error(hy, layer, mesh).ok();
                }
                let err: Vec<f64> = report.phi_track.iter().zip(avg).map(|(a, b)| a - b).collect();
                let f = metrics::fom(&err, runtime, mesh, avg, phi_star)?;
                m.fom_err_l2 = f.l2;
                m.fom_err_modified = f.modified;
                if let Some(sigma) = &report.sigma {
                    let f = metrics::fom(sigma, runtime, mesh, avg, phi_star)?;
                    m.fom_sigma_l2 = f.l2;
                    m.fom_sigma_modified = f.modified;
                }
            }
        } else if let Some(sigma) = &report.sigma {
            let f = metrics::fom(sigma, runtime, mesh, &report.phi_track, phi_star)?;
            m.fom_sigma_l2 = f.l2;
            m.fom_sigma_modified = f.modified;
        }
        Ok(m)
    }

    /// Runs every step, handing each record to `sink` as soon as it is complete.
    pub fn run_with(
        &self,
        reference: Option<&ReferenceSolution>,
        mut sink: impl FnMut(&StepRecord) -> Result<()>,
    ) -> Result<RunRecord> {
        if let Some(r) = reference {
            r.check_shape(self.mesh.cells(), self.grid.steps())?;
        }
        let clock = Instant::now();
        let mut state = self.initial_state()?;
        let mut steps = Vec::with_capacity(self.grid.steps());
        for n in 1..=self.grid.steps() {
            let rec = self.run_step(n, &mut state, reference)?;
            log::info!(
                "step {n}: {} histories, census weight {:.6e}, {:.3} s",
                rec.report.histories,
                rec.report.census_weight,
                rec.metrics.runtime_s
            );
            sink(&rec)?;
            steps.push(rec);
        }
        Ok(RunRecord {
            config: self.config.clone(),
            steps,
            total_runtime_s: clock.elapsed().as_secs_f64(),
            reference: reference.map(|r| r.description.clone()),
        })
    }
}

fn record_solve(histories: u64, solve: &Result<(LosmState<f64>, Option<Vec<f64>>)>) -> HybridSolve {
    match solve {
        Ok((s, _)) => HybridSolve {
            histories,
            phi: Some(s.phi_cells().to_vec()),
            error: None,
        },
        Err(e) => HybridSolve {
            histories,
            phi: None,
            error: Some(e.to_string()),
        },
    }
}

/// Runs `config` to completion without writing files.
pub fn run(config: &RunConfig, reference: Option<&ReferenceSolution>) -> Result<RunRecord> {
    Simulation::new(config.clone())?.run_with(reference, |_| Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(mode: Mode) -> RunConfig {
        let mut c = RunConfig::benchmark();
        c.mode = mode;
        c.histories_per_step = 400;
        c.target_population = 400;
        c.time.steps = 3;
        c.mesh.cells = 41;
        c.mesh.x_min = -5.0;
        c.mesh.x_max = 5.0;
        c
    }

    #[test]
    fn one_record_per_step() {
        for mode in Mode::ALL {
            let r = run(&toy(mode), None).unwrap();
            assert_eq!(r.steps.len(), 3);
            for s in &r.steps {
                assert_eq!(s.report.histories, 400);
                assert!(s.report.census_weight > 0.0);
            }
            assert_eq!(r.steps[0].hybrid.len(), if mode.is_hybrid() { 4 } else { 0 });
        }
    }

    #[test]
    fn deterministic() {
        let a = run(&toy(Mode::Hww), None).unwrap();
        let b = run(&toy(Mode::Hww), None).unwrap();
        for (x, y) in a.steps.iter().zip(&b.steps) {
            assert_eq!(x.report, y.report);
            assert_eq!(x.centers, y.centers);
        }
    }

    #[test]
    fn comb_holds_population() {
        let r = run(&toy(Mode::Analog), None).unwrap();
        for s in &r.steps[1..] {
            let c = s.comb.as_ref().unwrap();
            assert_eq!(c.output_count, 400);
            assert!((c.output_weight - c.input_weight).abs() <= 1e-12 * c.input_weight);
        }
    }
}
