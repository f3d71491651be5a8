//! Time-dependent discrete ordinates: diamond difference in space, backward
//! Euler in time, source iteration on the isotropic scattering plus fission source.

use crate::error::{Error, Result};
use crate::material::Material;
use crate::mesh::Mesh1D;

use super::quadrature::{gauss_legendre, Quadrature};

#[derive(Debug, Clone, PartialEq)]
pub struct SnConfig {
    /// Number of Gauss–Legendre directions (even).
    pub order: usize,
    pub dt: f64,
    pub steps: usize,
    /// Source iteration stops when the max-norm change of φ, relative to max φ, is below this.
    pub tol: f64,
    pub max_iterations: usize,
    /// Moments are recorded every this many steps (and at the start).
    pub record_every: usize,
}

impl SnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.order < 2 || !self.order.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("S_N order must be even and ≥ 2, got {}", self.order)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("S_N tolerance must be positive".into()));
        }
        if !(self.dt > 0.0) || self.record_every == 0 || self.max_iterations == 0 {
            return Err(Error::InvalidArgument("S_N time step, record interval and iteration cap must be positive".into()));
        }
        Ok(())
    }
}

/// Isotropic source density (total over angle), averaged over each cell and over `[t0, t1]`.
pub type SourceFn<'a> = dyn Fn(f64, f64) -> Vec<f64> + Sync + 'a;

pub struct SnProblem<'a> {
    pub mesh: &'a Mesh1D<f64>,
    pub material: Material<f64>,
    pub t0: f64,
    /// Initial cell-average angular flux per direction; `None` is zero.
    pub initial: Option<Vec<Vec<f64>>>,
    pub source: Option<&'a SourceFn<'a>>,
    /// Incoming angular flux per direction (used for directions entering at each side).
    pub incoming_left: Option<Vec<f64>>,
    pub incoming_right: Option<Vec<f64>>,
}

impl<'a> SnProblem<'a> {
    pub fn new(mesh: &'a Mesh1D<f64>, material: Material<f64>) -> Self {
        Self {
            mesh,
            material,
            t0: 0.0,
            initial: None,
            source: None,
            incoming_left: None,
            incoming_right: None,
        }
    }
}

/// Angular moments of one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct SnMoments {
    pub t: f64,
    pub phi: Vec<f64>,
    pub current: Vec<f64>,
    pub closure: Vec<f64>,
    pub phi_edge: Vec<f64>,
    pub current_edge: Vec<f64>,
    pub closure_edge: Vec<f64>,
    /// `∫ (1/2 − |μ|) ψ dμ` over the outgoing directions at each boundary.
    pub p_left: f64,
    pub p_right: f64,
}

#[derive(Debug, Clone)]
pub struct SnTrajectory {
    /// Recorded layers, the first being the initial condition.
    pub layers: Vec<SnMoments>,
    /// Trapezoid-rule time average of φ between consecutive recorded layers.
    pub interval_phi: Vec<Vec<f64>>,
    /// Relative particle-balance residual of every step.
    pub balance: Vec<f64>,
    pub iterations: Vec<usize>,
    pub final_psi: Vec<Vec<f64>>,
}

/// `φ, J, F` of cell-average angular fluxes `psi[direction][cell]`.
pub fn moments(psi: &[Vec<f64>], quad: &Quadrature) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let cells = psi.first().map_or(0, |p| p.len());
    let mut phi = vec![0.0; cells];
    let mut j = vec![0.0; cells];
    let mut f = vec![0.0; cells];
    for (d, row) in psi.iter().enumerate() {
        let (mu, w) = (quad.nodes[d], quad.weights[d]);
        let k = 1.0 / 3.0 - mu * mu;
        for i in 0..cells {
            phi[i] += w * row[i];
            j[i] += w * mu * row[i];
            f[i] += w * k * row[i];
        }
    }
    (phi, j, f)
}

struct Sweep {
    psi: Vec<Vec<f64>>,
    edge: Vec<Vec<f64>>,
    leakage: f64,
}

fn sweep(
    mesh: &Mesh1D<f64>,
    quad: &Quadrature,
    sigma_star: f64,
    emission: &[f64],
    psi_prev: &[Vec<f64>],
    inv_vdt: f64,
    in_left: Option<&[f64]>,
    in_right: Option<&[f64]>,
) -> Sweep {
    let n = mesh.cells();
    let dx = mesh.widths();
    let mut psi = vec![vec![0.0; n]; quad.len()];
    let mut edge = vec![vec![0.0; n + 1]; quad.len()];
    let mut leakage = 0.0;
    for d in 0..quad.len() {
        let mu = quad.nodes[d];
        let a = mu.abs();
        let src = |i: usize| emission[i] + psi_prev[d][i] * inv_vdt;
        if mu > 0.0 {
            let mut inflow = in_left.map_or(0.0, |v| v[d]);
            edge[d][0] = inflow;
            for i in 0..n {
                let c = 2.0 * a / dx[i];
                let avg = (src(i) + c * inflow) / (sigma_star + c);
                inflow = 2.0 * avg - inflow;
                psi[d][i] = avg;
                edge[d][i + 1] = inflow;
            }
            leakage += quad.weights[d] * a * inflow;
        } else {
            let mut inflow = in_right.map_or(0.0, |v| v[d]);
            edge[d][n] = inflow;
            for i in (0..n).rev() {
                let c = 2.0 * a / dx[i];
                let avg = (src(i) + c * inflow) / (sigma_star + c);
                inflow = 2.0 * avg - inflow;
                psi[d][i] = avg;
                edge[d][i] = inflow;
            }
            leakage += quad.weights[d] * a * inflow;
        }
    }
    Sweep { psi, edge, leakage }
}

fn layer_moments(t: f64, psi: &[Vec<f64>], edge: &[Vec<f64>], quad: &Quadrature) -> SnMoments {
    let (phi, current, closure) = moments(psi, quad);
    let (phi_edge, current_edge, closure_edge) = moments(edge, quad);
    let last = edge.first().map_or(0, |e| e.len().saturating_sub(1));
    let (mut p_left, mut p_right) = (0.0, 0.0);
    for (d, e) in edge.iter().enumerate() {
        let (mu, w) = (quad.nodes[d], quad.weights[d]);
        let k = 0.5 - mu.abs();
        if mu < 0.0 {
            p_left += w * k * e[0];
        } else {
            p_right += w * k * e[last];
        }
    }
    SnMoments {
        t,
        phi,
        current,
        closure,
        phi_edge,
        current_edge,
        closure_edge,
        p_left,
        p_right,
    }
}

/// Marches the problem `config.steps` steps and records moments.
pub fn sn_solve(problem: &SnProblem<'_>, config: &SnConfig) -> Result<SnTrajectory> {
    config.validate()?;
    let quad = gauss_legendre(config.order)?;
    let mesh = problem.mesh;
    let n = mesh.cells();
    let m = &problem.material;
    let nd = quad.len();
    let mut psi = match &problem.initial {
        Some(p) => {
            if p.len() != nd || p.iter().any(|r| r.len() != n) {
                return Err(Error::Shape {
                    what: "initial angular flux".into(),
                    expected: nd * n,
                    found: p.iter().map(|r| r.len()).sum(),
                });
            }
            p.clone()
        }
        None => vec![vec![0.0; n]; nd],
    };
    for (what, v) in [("left incoming flux", &problem.incoming_left), ("right incoming flux", &problem.incoming_right)] {
        if let Some(v) = v {
            if v.len() != nd {
                return Err(Error::Shape {
                    what: what.into(),
                    expected: nd,
                    found: v.len(),
                });
            }
        }
    }
    let inv_vdt = 1.0 / (m.speed * config.dt);
    let sigma_star = m.sigma_t + inv_vdt;
    let production = m.sigma_s + m.nu_f * m.sigma_f;
    let dx = mesh.widths();

    // initial edge values: average of adjacent cells, boundaries copy
    let init_edges: Vec<Vec<f64>> = psi
        .iter()
        .map(|row| {
            let mut e = Vec::with_capacity(n + 1);
            e.push(row[0]);
            e.extend(row.windows(2).map(|w| 0.5 * (w[0] + w[1])));
            e.push(row[n - 1]);
            e
        })
        .collect();
    let mut layers = vec![layer_moments(problem.t0, &psi, &init_edges, &quad)];
    let mut interval_phi = Vec::new();
    let mut acc = vec![0.0; n];
    let mut balance = Vec::with_capacity(config.steps);
    let mut iterations = Vec::with_capacity(config.steps);
    let mut phi_prev_layer = layers[0].phi.clone();

    for step in 1..=config.steps {
        let t0 = problem.t0 + (step - 1) as f64 * config.dt;
        let t1 = t0 + config.dt;
        let q = match problem.source {
            Some(f) => {
                let q = f(t0, t1);
                if q.len() != n {
                    return Err(Error::Shape {
                        what: "S_N source".into(),
                        expected: n,
                        found: q.len(),
                    });
                }
                q
            }
            None => vec![0.0; n],
        };
        let (phi_old, _, _) = moments(&psi, &quad);
        let mut phi = phi_old.clone();
        let mut it = 0;
        let result = loop {
            it += 1;
            let emission: Vec<f64> = (0..n).map(|i| 0.5 * (production * phi[i] + q[i])).collect();
            let sw = sweep(
                mesh,
                &quad,
                sigma_star,
                &emission,
                &psi,
                inv_vdt,
                problem.incoming_left.as_deref(),
                problem.incoming_right.as_deref(),
            );
            let (new_phi, _, _) = moments(&sw.psi, &quad);
            let scale = new_phi.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let change = new_phi.iter().zip(&phi).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            phi = new_phi;
            if change <= config.tol * scale || scale == 0.0 {
                break sw;
            }
            if it >= config.max_iterations {
                return Err(Error::NotConverged {
                    iterations: it,
                    residual: change / scale,
                });
            }
        };
        iterations.push(it);

        // particle balance with the converged sweep, source term from the last iterate
        let (phi_new, _, _) = moments(&result.psi, &quad);
        let incoming: f64 = (0..nd)
            .map(|d| {
                let mu = quad.nodes[d];
                let w = quad.weights[d] * mu.abs();
                if mu > 0.0 {
                    w * problem.incoming_left.as_ref().map_or(0.0, |v| v[d])
                } else {
                    w * problem.incoming_right.as_ref().map_or(0.0, |v| v[d])
                }
            })
            .sum();
        let mut terms = [0.0f64; 5];
        for i in 0..n {
            terms[0] += dx[i] * (phi_new[i] - phi_old[i]) * inv_vdt;
            terms[1] += dx[i] * m.sigma_t * phi_new[i];
            terms[2] -= dx[i] * production * phi[i];
            terms[3] -= dx[i] * q[i];
        }
        terms[4] = result.leakage - incoming;
        let scale = terms.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let res = terms.iter().sum::<f64>().abs();
        balance.push(if scale > 0.0 { res / scale } else { res });

        let mom = layer_moments(t1, &result.psi, &result.edge, &quad);
        for i in 0..n {
            acc[i] += 0.5 * (phi_prev_layer[i] + mom.phi[i]);
        }
        phi_prev_layer = mom.phi.clone();
        psi = result.psi;
        if step % config.record_every == 0 {
            interval_phi.push(acc.iter().map(|a| a / config.record_every as f64).collect());
            acc.iter_mut().for_each(|a| *a = 0.0);
            layers.push(mom);
        }
    }
    Ok(SnTrajectory {
        layers,
        interval_phi,
        balance,
        iterations,
        final_psi: psi,
    })
}
