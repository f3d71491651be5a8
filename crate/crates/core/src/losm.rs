//! Low-order second-moment equations on a slab: θ-scheme in time, finite
//! volumes in space, closed by externally supplied `F` and boundary factors.
//!
//! Arrays follow the mathematical indexing: `phi` and `closure` have length
//! `I + 2` (entry `0` and `I + 1` are boundary point values, `1..=I` cell
//! averages), `current` has length `I + 1` with entry `i` at edge `x_i`.
//! Cell `i` of the math is cell `i - 1` of [`Mesh1D`].
//!
//! The unknowns are interleaved as `(φ_0, J_0, φ_1, J_1, …, J_I, φ_{I+1})`,
//! which puts every equation on the tridiagonal band.

use std::io::Write;

use crate::banded::BandedMatrix;
use crate::error::{Error, Result};
use crate::material::Material;
use crate::mesh::{Mesh1D, TimeGrid};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct LosmState<T> {
    pub phi: Vec<T>,
    pub current: Vec<T>,
    pub closure: Vec<T>,
    pub p_left: T,
    pub p_right: T,
    pub j_in_left: T,
    pub j_in_right: T,
}

impl<T: Real> LosmState<T> {
    pub fn zeros(cells: usize) -> Self {
        Self {
            phi: vec![T::zero(); cells + 2],
            current: vec![T::zero(); cells + 1],
            closure: vec![T::zero(); cells + 2],
            p_left: T::zero(),
            p_right: T::zero(),
            j_in_left: T::zero(),
            j_in_right: T::zero(),
        }
    }

    /// Builds a state from cell averages, extrapolating the boundary point values
    /// from the adjacent cells.
    pub fn from_cells(phi_cells: &[T], current_edges: Vec<T>, closure_cells: &[T], p_left: T, p_right: T) -> Self {
        Self {
            phi: with_boundary(phi_cells),
            current: current_edges,
            closure: with_boundary(closure_cells),
            p_left,
            p_right,
            j_in_left: T::zero(),
            j_in_right: T::zero(),
        }
    }

    pub fn cells(&self) -> usize {
        self.phi.len() - 2
    }

    /// Cell-average scalar flux without the boundary point values.
    pub fn phi_cells(&self) -> &[T] {
        &self.phi[1..self.phi.len() - 1]
    }

    fn check(&self, cells: usize, what: &str) -> Result<()> {
        let shape = |part: &str, expected: usize, found: usize| -> Result<()> {
            if expected != found {
                return Err(Error::Shape {
                    what: format!("{what} {part}"),
                    expected,
                    found,
                });
            }
            Ok(())
        };
        shape("phi", cells + 2, self.phi.len())?;
        shape("current", cells + 1, self.current.len())?;
        shape("closure", cells + 2, self.closure.len())?;
        let finite = self.phi.iter().chain(&self.current).chain(&self.closure).all(|v| v.is_finite())
            && self.p_left.is_finite()
            && self.p_right.is_finite();
        if !finite {
            return Err(Error::NonFinite(what.to_string()));
        }
        Ok(())
    }
}

/// Pads cell averages with constant-extrapolated boundary values.
pub fn with_boundary<T: Real>(cells: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(cells.len() + 2);
    out.push(cells.first().copied().unwrap_or(T::zero()));
    out.extend_from_slice(cells);
    out.push(cells.last().copied().unwrap_or(T::zero()));
    out
}

/// Closures used at the new time layer.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosureInput<T> {
    /// Fully implicit: new-layer closure grid `F^n` (length `I + 2`) and boundary factors.
    Implicit { closure: Vec<T>, p_left: T, p_right: T },
    /// Semi-implicit: the previous layer's closures stand in for the new ones.
    Lagged,
}

/// Material and source data of one low-order problem.
#[derive(Debug, Clone)]
pub struct LosmProblem<'a, T> {
    pub mesh: &'a Mesh1D<T>,
    /// Per-cell materials at the new layer.
    pub materials: &'a [Material<T>],
    /// Per-cell materials at the previous layer; `None` means static.
    pub materials_prev: Option<&'a [Material<T>]>,
    pub theta: T,
    /// Incoming partial currents at the new layer.
    pub j_in_left: T,
    pub j_in_right: T,
}

impl<'a, T: Real> LosmProblem<'a, T> {
    pub fn new(mesh: &'a Mesh1D<T>, materials: &'a [Material<T>], theta: T) -> Self {
        Self {
            mesh,
            materials,
            materials_prev: None,
            theta,
            j_in_left: T::zero(),
            j_in_right: T::zero(),
        }
    }

    fn materials_prev(&self) -> &'a [Material<T>] {
        self.materials_prev.unwrap_or(self.materials)
    }

    fn validate(&self) -> Result<()> {
        let cells = self.mesh.cells();
        if self.materials.len() != cells {
            return Err(Error::Shape {
                what: "materials".into(),
                expected: cells,
                found: self.materials.len(),
            });
        }
        if self.materials_prev().len() != cells {
            return Err(Error::Shape {
                what: "previous materials".into(),
                expected: cells,
                found: self.materials_prev().len(),
            });
        }
        if !(self.theta >= T::lit(0.5) && self.theta <= T::one()) {
            return Err(Error::InvalidArgument(format!("theta must lie in [1/2, 1], got {}", self.theta)));
        }
        Ok(())
    }
}

/// Assembled linear system with per-row term magnitudes for residual checks.
#[derive(Debug, Clone)]
pub struct LosmSystem<T> {
    pub matrix: BandedMatrix<T>,
    pub rhs: Vec<T>,
    rhs_scale: Vec<T>,
    cells: usize,
}

impl<T: Real> LosmSystem<T> {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// Packs `(φ, J)` of a state into the interleaved unknown vector.
    pub fn pack(&self, state: &LosmState<T>) -> Vec<T> {
        let mut x = vec![T::zero(); self.dim()];
        for (i, &p) in state.phi.iter().enumerate() {
            x[2 * i] = p;
        }
        for (i, &j) in state.current.iter().enumerate() {
            x[2 * i + 1] = j;
        }
        x
    }

    /// Per-equation residual divided by the largest single term of that equation.
    pub fn relative_residuals(&self, x: &[T]) -> Vec<T> {
        (0..self.dim())
            .map(|r| {
                let mut lhs = T::zero();
                let mut scale = self.rhs_scale[r];
                for (c, a) in self.matrix.row(r) {
                    let term = a * x[c];
                    lhs += term;
                    scale = scale.max(term.abs());
                }
                let res = (lhs - self.rhs[r]).abs();
                if scale > T::zero() {
                    res / scale
                } else {
                    res
                }
            })
            .collect()
    }

    /// Plain-text dump: `row col value` triplets, then `rhs row value` lines.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# losm system: {} cells, {} unknowns", self.cells, self.dim())?;
        for r in 0..self.dim() {
            for (c, a) in self.matrix.row(r) {
                writeln!(w, "{r} {c} {a}")?;
            }
        }
        for (r, b) in self.rhs.iter().enumerate() {
            writeln!(w, "rhs {r} {b}")?;
        }
        Ok(())
    }

    fn unpack(&self, x: &[T]) -> (Vec<T>, Vec<T>) {
        let phi = (0..self.cells + 2).map(|i| x[2 * i]).collect();
        let current = (0..self.cells + 1).map(|i| x[2 * i + 1]).collect();
        (phi, current)
    }
}

/// Assembles the discrete balance, first-moment and boundary equations of one step.
///
/// `source_prev` and `source_now` are cell-average isotropic source densities;
/// they enter the balance equation integrated over each cell.
pub fn assemble<T: Real>(
    problem: &LosmProblem<'_, T>,
    prev: &LosmState<T>,
    closures: &ClosureInput<T>,
    dt: T,
    source_prev: &[T],
    source_now: &[T],
) -> Result<LosmSystem<T>> {
    problem.validate()?;
    let mesh = problem.mesh;
    let ni = mesh.cells();
    prev.check(ni, "previous state")?;
    for (what, q) in [("previous source", source_prev), ("source", source_now)] {
        if q.len() != ni {
            return Err(Error::Shape {
                what: what.into(),
                expected: ni,
                found: q.len(),
            });
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(what.into()));
        }
    }
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    let (f_now, p_left, p_right): (&[T], T, T) = match closures {
        ClosureInput::Implicit { closure, p_left, p_right } => {
            if closure.len() != ni + 2 {
                return Err(Error::Shape {
                    what: "closure".into(),
                    expected: ni + 2,
                    found: closure.len(),
                });
            }
            if closure.iter().any(|v| !v.is_finite()) || !p_left.is_finite() || !p_right.is_finite() {
                return Err(Error::NonFinite("closure".into()));
            }
            (closure, *p_left, *p_right)
        }
        ClosureInput::Lagged => (&prev.closure, prev.p_left, prev.p_right),
    };

    let theta = problem.theta;
    let lag = theta - T::one();
    let third = T::one() / T::lit(3.0);
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let mats = problem.materials;
    let mats_prev = problem.materials_prev();
    let f_prev = &prev.closure;
    let phi_prev = &prev.phi;
    let j_prev = &prev.current;

    let n = 2 * ni + 3;
    let mut a = BandedMatrix::zeros(n, 1, 1);
    let mut rhs = vec![T::zero(); n];
    let mut rhs_scale = vec![T::zero(); n];
    let mut put_rhs = |row: usize, terms: &[T]| {
        rhs[row] = terms.iter().copied().sum();
        rhs_scale[row] = terms.iter().fold(T::zero(), |m, t| m.max(t.abs()));
    };

    // left boundary: J_0 + φ_0/2 = 2 J_L + P_L
    a.add(0, 0, half);
    a.add(0, 1, T::one());
    put_rhs(0, &[two * problem.j_in_left, p_left]);

    // first-moment equations on the half cells around each edge
    for i in 0..=ni {
        let row = 2 * i + 1;
        let (mut time_coef, mut sig_now, mut sig_prev) = (T::zero(), T::zero(), T::zero());
        for cell in [i, i + 1] {
            let dx = mesh.ghost_width(cell);
            if dx > T::zero() {
                let m = &mats[cell - 1];
                let mp = &mats_prev[cell - 1];
                time_coef += half * dx / (m.speed * dt);
                sig_now += half * m.sigma_t * dx;
                sig_prev += half * mp.sigma_t * dx;
            }
        }
        a.add(row, 2 * i + 1, time_coef + theta * sig_now);
        a.add(row, 2 * i, -theta * third);
        a.add(row, 2 * i + 2, theta * third);
        put_rhs(
            row,
            &[
                time_coef * j_prev[i],
                theta * f_now[i + 1],
                -theta * f_now[i],
                lag * third * phi_prev[i + 1],
                -lag * third * phi_prev[i],
                lag * sig_prev * j_prev[i],
                -lag * (f_prev[i + 1] - f_prev[i]),
            ],
        );
    }

    // balance equations over the cells
    for i in 1..=ni {
        let row = 2 * i;
        let dx = mesh.ghost_width(i);
        let m = &mats[i - 1];
        let mp = &mats_prev[i - 1];
        let time_coef = dx / (m.speed * dt);
        a.add(row, 2 * i, time_coef + theta * m.sigma_removal() * dx);
        a.add(row, 2 * i + 1, theta);
        a.add(row, 2 * i - 1, -theta);
        put_rhs(
            row,
            &[
                time_coef * phi_prev[i],
                theta * source_now[i - 1] * dx,
                lag * j_prev[i],
                -lag * j_prev[i - 1],
                lag * mp.sigma_removal() * dx * phi_prev[i],
                -lag * source_prev[i - 1] * dx,
            ],
        );
    }

    // right boundary: J_I − φ_{I+1}/2 = 2 J_R − P_R
    let last = n - 1;
    a.add(last, 2 * ni + 1, T::one());
    a.add(last, 2 * ni + 2, -half);
    put_rhs(last, &[two * problem.j_in_right, -p_right]);

    Ok(LosmSystem {
        matrix: a,
        rhs,
        rhs_scale,
        cells: ni,
    })
}

/// Solves one time step and returns the new layer.
pub fn assemble_solve<T: Real>(
    problem: &LosmProblem<'_, T>,
    prev: &LosmState<T>,
    closures: &ClosureInput<T>,
    dt: T,
    source_prev: &[T],
    source_now: &[T],
) -> Result<LosmState<T>> {
    let system = assemble(problem, prev, closures, dt, source_prev, source_now)?;
    let x = system.matrix.solve(&system.rhs)?;
    let (phi, current) = system.unpack(&x);
    let (closure, p_left, p_right) = match closures {
        ClosureInput::Implicit { closure, p_left, p_right } => (closure.clone(), *p_left, *p_right),
        ClosureInput::Lagged => (prev.closure.clone(), prev.p_left, prev.p_right),
    };
    Ok(LosmState {
        phi,
        current,
        closure,
        p_left,
        p_right,
        j_in_left: problem.j_in_left,
        j_in_right: problem.j_in_right,
    })
}

/// Marches `closures.len()` steps over `grid`, feeding each solution back as the next
/// initial condition. `sources[n]` is the source at layer `n`; an empty slice means none.
pub fn march<T: Real>(
    problem: &LosmProblem<'_, T>,
    initial: &LosmState<T>,
    closures: &[ClosureInput<T>],
    grid: &TimeGrid<T>,
    sources: &[Vec<T>],
) -> Result<Vec<LosmState<T>>> {
    if closures.len() != grid.steps() {
        return Err(Error::Shape {
            what: "closure sequence".into(),
            expected: grid.steps(),
            found: closures.len(),
        });
    }
    if !sources.is_empty() && sources.len() != grid.steps() + 1 {
        return Err(Error::Shape {
            what: "source sequence".into(),
            expected: grid.steps() + 1,
            found: sources.len(),
        });
    }
    let zero = vec![T::zero(); problem.mesh.cells()];
    let src = |n: usize| -> &[T] {
        if sources.is_empty() {
            &zero
        } else {
            &sources[n]
        }
    };
    let mut out = Vec::with_capacity(closures.len());
    let mut prev = initial.clone();
    for (k, closure) in closures.iter().enumerate() {
        let n = k + 1;
        let next = assemble_solve(problem, &prev, closure, grid.dt(n), src(n - 1), src(n))?;
        out.push(next.clone());
        prev = next;
    }
    Ok(out)
}

/// Edge currents from census cell-average currents: linear interpolation between
/// adjacent cell midpoints inside, constant extrapolation at the two domain ends.
pub fn edge_currents_from_census<T: Real>(census_current: &[T], mesh: &Mesh1D<T>) -> Result<Vec<T>> {
    let ni = mesh.cells();
    if census_current.len() != ni {
        return Err(Error::Shape {
            what: "census current".into(),
            expected: ni,
            found: census_current.len(),
        });
    }
    if ni < 2 {
        return Err(Error::InvalidArgument("edge interpolation needs at least two cells".into()));
    }
    let w = mesh.widths();
    let mut out = Vec::with_capacity(ni + 1);
    out.push(census_current[0]);
    for e in 1..ni {
        let (wl, wr) = (w[e - 1], w[e]);
        out.push((census_current[e - 1] * wr + census_current[e] * wl) / (wl + wr));
    }
    out.push(census_current[ni - 1]);
    Ok(out)
}
