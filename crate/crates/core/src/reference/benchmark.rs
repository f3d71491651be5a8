//! Reference flux of the point-pulse benchmark on the tally grid.
//!
//! The pulse is split into its uncollided part, known in closed form, and the
//! collided remainder, which the S_N solver computes from the first-collision
//! source. This avoids ray effects from a delta source on a discrete angle set.

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::material::Material;
use crate::mesh::{build_uniform_mesh, Mesh1D};

use super::quadrature::{gauss_legendre, Quadrature};
use super::sn::{sn_solve, SnConfig, SnProblem};

/// How the delta pulse enters the S_N calculation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseTreatment {
    /// Analytic uncollided flux plus S_N for the collided flux.
    FirstCollision,
    /// Whole pulse placed in the fine cell containing `x0` as an isotropic initial condition.
    CenterCell,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSettings {
    pub order: usize,
    /// Fine cells per tally cell.
    pub refinement: usize,
    pub dt: f64,
    pub tol: f64,
    pub treatment: PulseTreatment,
}

impl Default for ReferenceSettings {
    fn default() -> Self {
        Self {
            order: 16,
            refinement: 4,
            dt: 0.02,
            tol: 1e-10,
            treatment: PulseTreatment::FirstCollision,
        }
    }
}

/// Reference cell averages on the tally mesh for layers `1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub t_layers: Vec<f64>,
    pub x_centers: Vec<f64>,
    /// `phi_layer[n-1][i]`: flux at `t^n`.
    pub phi_layer: Vec<Vec<f64>>,
    /// `phi_interval[n-1][i]`: time average over `[t^{n-1}, t^n]`.
    pub phi_interval: Vec<Vec<f64>>,
    pub description: String,
}

impl ReferenceSolution {
    pub fn steps(&self) -> usize {
        self.t_layers.len()
    }

    pub fn cells(&self) -> usize {
        self.x_centers.len()
    }

    /// Checks that the solution matches a run grid.
    pub fn check_shape(&self, cells: usize, steps: usize) -> Result<()> {
        if self.cells() != cells {
            return Err(Error::Shape {
                what: "reference cells".into(),
                expected: cells,
                found: self.cells(),
            });
        }
        if self.steps() < steps {
            return Err(Error::Shape {
                what: "reference time layers".into(),
                expected: steps,
                found: self.steps(),
            });
        }
        Ok(())
    }
}

/// Length of `[a, b] ∩ [x0 − r, x0 + r]`.
fn overlap(a: f64, b: f64, x0: f64, r: f64) -> f64 {
    ((b.min(x0 + r)) - (a.max(x0 - r))).max(0.0)
}

/// Closed-form uncollided flux of the pulse `S δ(x − x0) δ(t − t0)` in an infinite
/// medium, averaged over `[a, b]` at time `t`.
pub fn uncollided_cell_average(m: &Material<f64>, strength: f64, x0: f64, t0: f64, a: f64, b: f64, t: f64) -> f64 {
    let s = t - t0;
    if s <= 0.0 {
        return 0.0;
    }
    let r = m.speed * s;
    strength * (-m.sigma_t * r).exp() / (2.0 * s) * overlap(a, b, x0, r) / (b - a)
}

/// Time average over `[t1, t2]` of [`uncollided_cell_average`], by Gauss–Legendre
/// quadrature on the pieces between the instants the front passes the cell edges.
pub fn uncollided_interval_average(
    m: &Material<f64>,
    strength: f64,
    x0: f64,
    t0: f64,
    a: f64,
    b: f64,
    t1: f64,
    t2: f64,
    quad: &Quadrature,
) -> f64 {
    let v = m.speed;
    let reach = t0 + (a - x0).abs().min((b - x0).abs()) / v;
    let inside = a <= x0 && x0 <= b;
    if !inside && reach >= t2 {
        return 0.0;
    }
    let mut cuts = vec![t1.max(t0), t2];
    for e in [a, b] {
        let tk = t0 + (e - x0).abs() / v;
        if tk > cuts[0] && tk < t2 {
            cuts.push(tk);
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            total += quad.integrate(w[0], w[1], |t| uncollided_cell_average(m, strength, x0, t0, a, b, t));
        }
    }
    total / (t2 - t1)
}

/// Conservative overlap-weighted averaging of fine cell values onto a coarse mesh.
pub fn project(fine: &[f64], fine_mesh: &Mesh1D<f64>, coarse_mesh: &Mesh1D<f64>) -> Result<Vec<f64>> {
    if fine.len() != fine_mesh.cells() {
        return Err(Error::Shape {
            what: "fine values".into(),
            expected: fine_mesh.cells(),
            found: fine.len(),
        });
    }
    if fine_mesh.x_max() <= coarse_mesh.x_min() || fine_mesh.x_min() >= coarse_mesh.x_max() {
        return Err(Error::InvalidArgument("fine and coarse meshes do not overlap".into()));
    }
    let fe = fine_mesh.edges();
    let ce = coarse_mesh.edges();
    let mut out = vec![0.0; coarse_mesh.cells()];
    let mut j = 0;
    for (i, o) in out.iter_mut().enumerate() {
        let (a, b) = (ce[i], ce[i + 1]);
        while j > 0 && fe[j] > a {
            j -= 1;
        }
        let mut k = j;
        let mut s = 0.0;
        while k < fine.len() && fe[k] < b {
            let ov = fe[k + 1].min(b) - fe[k].max(a);
            if ov > 0.0 {
                s += fine[k] * ov;
            }
            k += 1;
        }
        *o = s / (b - a);
        j = k.saturating_sub(1);
    }
    Ok(out)
}

/// Computes the benchmark reference for the mesh, material, source and time grid of `run`.
pub fn benchmark_reference(run: &RunConfig, settings: &ReferenceSettings) -> Result<ReferenceSolution> {
    if settings.refinement == 0 {
        return Err(Error::InvalidArgument("refinement must be positive".into()));
    }
    let material = run.material::<f64>()?;
    let coarse = run.mesh::<f64>()?;
    let fine = build_uniform_mesh(run.mesh.x_min, run.mesh.x_max, run.mesh.cells * settings.refinement)?;
    let per_step = (run.time.dt / settings.dt).round().max(1.0) as usize;
    let dt = run.time.dt / per_step as f64;
    let steps = per_step * run.time.steps;
    let sn = SnConfig {
        order: settings.order,
        dt,
        steps,
        tol: settings.tol,
        max_iterations: 1000,
        record_every: per_step,
    };
    let (x0, s, t0) = (run.source.x0, run.source.strength, run.source.t0);
    let quad = gauss_legendre(16)?;
    let production = material.sigma_s + material.nu_f * material.sigma_f;
    let fe = fine.edges().to_vec();
    let ce = coarse.edges().to_vec();

    let first_collision = |t1: f64, t2: f64| -> Vec<f64> {
        (0..fe.len() - 1)
            .map(|i| production * uncollided_interval_average(&material, s, x0, t0, fe[i], fe[i + 1], t1, t2, &quad))
            .collect()
    };
    let mut problem = SnProblem::new(&fine, material);
    problem.t0 = run.time.t0;
    match settings.treatment {
        PulseTreatment::FirstCollision => problem.source = Some(&first_collision),
        PulseTreatment::CenterCell => {
            let c = fine
                .cell_index(x0)
                .ok_or_else(|| Error::InvalidArgument("pulse position outside the mesh".into()))?;
            let mut psi = vec![vec![0.0; fine.cells()]; settings.order];
            for row in psi.iter_mut() {
                row[c] = material.speed * s / (2.0 * fine.width(c));
            }
            problem.initial = Some(psi);
        }
    }
    let tr = sn_solve(&problem, &sn)?;

    let grid = run.time_grid::<f64>()?;
    let mut phi_layer = Vec::with_capacity(run.time.steps);
    let mut phi_interval = Vec::with_capacity(run.time.steps);
    for n in 1..=run.time.steps {
        let (ta, tb) = grid.interval(n);
        let mut layer = project(&tr.layers[n].phi, &fine, &coarse)?;
        let mut avg = project(&tr.interval_phi[n - 1], &fine, &coarse)?;
        if settings.treatment == PulseTreatment::FirstCollision {
            for i in 0..coarse.cells() {
                layer[i] += uncollided_cell_average(&material, s, x0, t0, ce[i], ce[i + 1], tb);
                avg[i] += uncollided_interval_average(&material, s, x0, t0, ce[i], ce[i + 1], ta, tb, &quad);
            }
        }
        phi_layer.push(layer);
        phi_interval.push(avg);
    }
    Ok(ReferenceSolution {
        t_layers: grid.layers()[1..].to_vec(),
        x_centers: coarse.centers(),
        phi_layer,
        phi_interval,
        description: format!(
            "S{} diamond difference, {} fine cells, dt = {}, {:?}",
            settings.order,
            fine.cells(),
            dt,
            settings.treatment
        ),
    })
}
