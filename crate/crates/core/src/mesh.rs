//! Spatial mesh, time grid and grid functions.
//!
//! Cells are indexed from zero in code: cell `i` spans `[edges[i], edges[i + 1]]`.
//! Edge `e` is `edges[e]`, so edge `0` is the left domain boundary and edge
//! `cells()` the right one.

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D<T> {
    edges: Vec<T>,
    widths: Vec<T>,
}

impl<T: Real> Mesh1D<T> {
    /// Builds a mesh from strictly increasing edge coordinates.
    pub fn from_edges(edges: Vec<T>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::InvalidMesh("at least one cell (two edges) required".into()));
        }
        if edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidMesh("edges must be finite".into()));
        }
        let widths: Vec<T> = edges.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(i) = widths.iter().position(|&w| w <= T::zero()) {
            return Err(Error::InvalidMesh(format!(
                "edges must be strictly increasing (cell {i} has width {})",
                widths[i]
            )));
        }
        Ok(Self { edges, widths })
    }

    pub fn uniform(x_min: T, x_max: T, cells: usize) -> Result<Self> {
        build_uniform_mesh(x_min, x_max, cells)
    }

    pub fn cells(&self) -> usize {
        self.widths.len()
    }

    pub fn edges(&self) -> &[T] {
        &self.edges
    }

    pub fn widths(&self) -> &[T] {
        &self.widths
    }

    pub fn width(&self, cell: usize) -> T {
        self.widths[cell]
    }

    /// Cell width with the ghost convention: index `0` and `cells() + 1` are
    /// zero-width ghosts, index `i` in `1..=cells()` is cell `i - 1`.
    pub fn ghost_width(&self, i: usize) -> T {
        if i == 0 || i > self.cells() {
            T::zero()
        } else {
            self.widths[i - 1]
        }
    }

    pub fn x_min(&self) -> T {
        self.edges[0]
    }

    pub fn x_max(&self) -> T {
        self.edges[self.edges.len() - 1]
    }

    pub fn length(&self) -> T {
        self.x_max() - self.x_min()
    }

    pub fn centers(&self) -> Vec<T> {
        let half = T::lit(0.5);
        self.edges.windows(2).map(|w| half * (w[0] + w[1])).collect()
    }

    /// Cell containing `x`; the right domain end belongs to the last cell.
    pub fn cell_index(&self, x: T) -> Option<usize> {
        let n = self.cells();
        if !(x >= self.x_min() && x <= self.x_max()) {
            return None;
        }
        if x == self.x_max() {
            return Some(n - 1);
        }
        // first edge strictly greater than x
        let upper = self.edges.partition_point(|&e| e <= x);
        Some(upper - 1)
    }

    pub fn is_uniform(&self, rel_tol: T) -> bool {
        let w0 = self.widths[0];
        self.widths.iter().all(|&w| (w - w0).abs() <= rel_tol * w0)
    }
}

/// Equispaced mesh over `[x_min, x_max]`.
pub fn build_uniform_mesh<T: Real>(x_min: T, x_max: T, cells: usize) -> Result<Mesh1D<T>> {
    if cells == 0 {
        return Err(Error::InvalidMesh("cell count must be positive".into()));
    }
    if !(x_min < x_max) {
        return Err(Error::InvalidMesh(format!("inverted bounds [{x_min}, {x_max}]")));
    }
    let n = T::count(cells);
    let edges = (0..=cells)
        .map(|i| {
            if i == cells {
                x_max
            } else {
                x_min + (x_max - x_min) * T::count(i) / n
            }
        })
        .collect();
    Mesh1D::from_edges(edges)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T> {
    layers: Vec<T>,
}

impl<T: Real> TimeGrid<T> {
    pub fn from_layers(layers: Vec<T>) -> Result<Self> {
        if layers.len() < 2 {
            return Err(Error::InvalidTimeGrid("at least one step required".into()));
        }
        if let Some(n) = layers.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTimeGrid(format!("step {} is not positive", n + 1)));
        }
        Ok(Self { layers })
    }

    /// `steps` equal steps of length `dt` starting at `t0`.
    pub fn uniform(t0: T, dt: T, steps: usize) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::InvalidTimeGrid("dt must be positive".into()));
        }
        Self::from_layers((0..=steps).map(|n| t0 + dt * T::count(n)).collect())
    }

    pub fn steps(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn layers(&self) -> &[T] {
        &self.layers
    }

    /// Time layer `t^n`, `n` in `0..=steps()`.
    pub fn t(&self, n: usize) -> T {
        self.layers[n]
    }

    /// Step length `t^n - t^{n-1}` for `n` in `1..=steps()`.
    pub fn dt(&self, n: usize) -> T {
        self.layers[n] - self.layers[n - 1]
    }

    pub fn interval(&self, n: usize) -> (T, T) {
        (self.layers[n - 1], self.layers[n])
    }
}

/// Where the values of a grid function live.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// One value per cell (length `I`).
    Cell,
    /// Cell averages plus the two boundary point values (length `I + 2`).
    CellWithBoundary,
    /// One value per cell edge (length `I + 1`).
    Edge,
}

impl Placement {
    pub fn len(self, cells: usize) -> usize {
        match self {
            Placement::Cell => cells,
            Placement::CellWithBoundary => cells + 2,
            Placement::Edge => cells + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    pub values: Vec<T>,
    pub placement: Placement,
}

impl<T: Real> GridFunction<T> {
    pub fn new(values: Vec<T>, placement: Placement) -> Self {
        Self { values, placement }
    }

    pub fn zeros(cells: usize, placement: Placement) -> Self {
        Self::new(vec![T::zero(); placement.len(cells)], placement)
    }

    pub fn cells(values: Vec<T>) -> Self {
        Self::new(values, Placement::Cell)
    }

    pub fn edges(values: Vec<T>) -> Self {
        Self::new(values, Placement::Edge)
    }

    /// Checks the length against `mesh`.
    pub fn check(&self, mesh: &Mesh1D<T>, what: &str) -> Result<()> {
        let expected = self.placement.len(mesh.cells());
        if self.values.len() != expected {
            return Err(Error::Shape {
                what: what.to_string(),
                expected,
                found: self.values.len(),
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::new(self.values.iter().map(|&v| f(v)).collect(), self.placement)
    }
}
