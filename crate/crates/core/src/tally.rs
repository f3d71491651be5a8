//! Track-length, census-crossing and edge-crossing estimators with batch statistics.
//!
//! Scores are accumulated in relative particle weight. A report multiplies
//! by the physical source weight of the step and divides by the number of
//! completed histories, so partial and final reports share one normalization.

use crate::error::{Error, Result};
use crate::mesh::Mesh1D;

/// Directions with `|μ|` below this are not scored at domain boundaries.
pub const GRAZING_CUTOFF: f64 = 1e-10;

/// Per-mesh constants shared by every scoring call of one step.
#[derive(Debug, Clone)]
pub struct TallyGeometry {
    inv_dx: Vec<f64>,
    dt: f64,
    speed: f64,
}

impl TallyGeometry {
    pub fn new(mesh: &Mesh1D<f64>, dt: f64, speed: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument(format!("tally time step must be positive, got {dt}")));
        }
        if !(speed > 0.0) {
            return Err(Error::InvalidArgument(format!("speed must be positive, got {speed}")));
        }
        Ok(Self {
            inv_dx: mesh.widths().iter().map(|w| 1.0 / w).collect(),
            dt,
            speed,
        })
    }

    pub fn cells(&self) -> usize {
        self.inv_dx.len()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
}

/// Raw accumulators of one batch (or of one worker chunk inside a batch).
#[derive(Debug, Clone, PartialEq)]
pub struct TallyBlock {
    pub track: Vec<f64>,
    pub census_phi: Vec<f64>,
    pub census_j: Vec<f64>,
    pub census_f: Vec<f64>,
    pub edge_current: Vec<f64>,
    pub p_left: f64,
    pub p_right: f64,
    pub census_weight: f64,
    pub histories: u64,
    pub grazing_discards: u64,
}

impl TallyBlock {
    pub fn new(cells: usize) -> Self {
        Self {
            track: vec![0.0; cells],
            census_phi: vec![0.0; cells],
            census_j: vec![0.0; cells],
            census_f: vec![0.0; cells],
            edge_current: vec![0.0; cells + 1],
            p_left: 0.0,
            p_right: 0.0,
            census_weight: 0.0,
            histories: 0,
            grazing_discards: 0,
        }
    }

    pub fn cells(&self) -> usize {
        self.track.len()
    }

    #[inline]
    pub fn score_track(&mut self, geo: &TallyGeometry, cell: usize, w: f64, length: f64) {
        debug_assert!(length >= 0.0);
        self.track[cell] += w * length * geo.inv_dx[cell] / geo.dt;
    }

    #[inline]
    pub fn score_census(&mut self, geo: &TallyGeometry, cell: usize, w: f64, mu: f64) {
        let s = geo.speed * w * geo.inv_dx[cell];
        self.census_phi[cell] += s;
        self.census_j[cell] += s * mu;
        self.census_f[cell] += s * (1.0 / 3.0 - mu * mu);
        self.census_weight += w;
    }

    /// Scores a crossing of `edge`; edges `0` and `cells()` are the domain boundaries.
    #[inline]
    pub fn score_edge_crossing(&mut self, geo: &TallyGeometry, edge: usize, w: f64, mu: f64) {
        debug_assert!(mu != 0.0);
        self.edge_current[edge] += w * mu.signum() / geo.dt;
        let last = self.edge_current.len() - 1;
        if edge == 0 || edge == last {
            let a = mu.abs();
            if a < GRAZING_CUTOFF {
                self.grazing_discards += 1;
                return;
            }
            let p = w * (0.5 - a) / (a * geo.dt);
            if edge == 0 {
                self.p_left += p;
            } else {
                self.p_right += p;
            }
        }
    }

    /// Adds `other` into `self` element by element.
    pub fn merge(&mut self, other: &TallyBlock) {
        let add = |a: &mut [f64], b: &[f64]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.track, &other.track);
        add(&mut self.census_phi, &other.census_phi);
        add(&mut self.census_j, &other.census_j);
        add(&mut self.census_f, &other.census_f);
        add(&mut self.edge_current, &other.edge_current);
        self.p_left += other.p_left;
        self.p_right += other.p_right;
        self.census_weight += other.census_weight;
        self.histories += other.histories;
        self.grazing_discards += other.grazing_discards;
    }

    fn scaled(&self, s: f64) -> TallyReport {
        let sc = |v: &[f64]| v.iter().map(|x| x * s).collect::<Vec<_>>();
        TallyReport {
            phi_track: sc(&self.track),
            sigma: None,
            phi_census: sc(&self.census_phi),
            j_census: sc(&self.census_j),
            f_census: sc(&self.census_f),
            edge_current: sc(&self.edge_current),
            p_left: self.p_left * s,
            p_right: self.p_right * s,
            census_weight: self.census_weight * s,
            histories: self.histories,
            grazing_discards: self.grazing_discards,
        }
    }
}

/// Normalized estimates of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct TallyReport {
    /// Space-time average flux per cell.
    pub phi_track: Vec<f64>,
    /// Standard deviation of `phi_track`; `None` with fewer than two scored batches.
    pub sigma: Option<Vec<f64>>,
    pub phi_census: Vec<f64>,
    pub j_census: Vec<f64>,
    pub f_census: Vec<f64>,
    pub edge_current: Vec<f64>,
    pub p_left: f64,
    pub p_right: f64,
    /// Physical weight alive at the end of the step.
    pub census_weight: f64,
    pub histories: u64,
    pub grazing_discards: u64,
}

/// Batched accumulators of one step: one block per history batch.
#[derive(Debug, Clone)]
pub struct TallySet {
    blocks: Vec<TallyBlock>,
    histories_planned: u64,
}

impl TallySet {
    pub fn new(cells: usize, batches: usize, histories_planned: u64) -> Result<Self> {
        if batches < 2 {
            return Err(Error::InvalidArgument(format!("at least two batches required, got {batches}")));
        }
        if histories_planned == 0 {
            return Err(Error::InvalidArgument("histories_planned must be positive".into()));
        }
        Ok(Self {
            blocks: vec![TallyBlock::new(cells); batches],
            histories_planned,
        })
    }

    pub fn batches(&self) -> usize {
        self.blocks.len()
    }

    pub fn histories_planned(&self) -> u64 {
        self.histories_planned
    }

    pub fn histories_scored(&self) -> u64 {
        self.blocks.iter().map(|b| b.histories).sum()
    }

    /// Batch that history `h` (0-based) belongs to; batches are contiguous ranges.
    pub fn batch_of(&self, h: u64) -> usize {
        ((h as u128 * self.blocks.len() as u128) / self.histories_planned as u128) as usize
    }

    /// First history of `batch`.
    pub fn batch_start(&self, batch: usize) -> u64 {
        let b = self.blocks.len() as u128;
        (batch as u128 * self.histories_planned as u128).div_ceil(b) as u64
    }

    pub fn block(&self, batch: usize) -> &TallyBlock {
        &self.blocks[batch]
    }

    pub fn block_mut(&mut self, batch: usize) -> &mut TallyBlock {
        &mut self.blocks[batch]
    }

    pub fn score_track(&mut self, geo: &TallyGeometry, batch: usize, cell: usize, w: f64, length: f64) -> Result<()> {
        if !(length >= 0.0) {
            return Err(Error::InvalidArgument(format!("negative track length {length}")));
        }
        self.check_cell(cell)?;
        self.blocks[batch].score_track(geo, cell, w, length);
        Ok(())
    }

    pub fn score_census(&mut self, geo: &TallyGeometry, batch: usize, cell: usize, w: f64, mu: f64) -> Result<()> {
        self.check_cell(cell)?;
        self.blocks[batch].score_census(geo, cell, w, mu);
        Ok(())
    }

    pub fn score_edge_crossing(&mut self, geo: &TallyGeometry, batch: usize, edge: usize, w: f64, mu: f64) -> Result<()> {
        if mu == 0.0 {
            return Err(Error::InvalidArgument("a direction with μ = 0 cannot cross an edge".into()));
        }
        if edge > self.blocks[0].cells() {
            return Err(Error::InvalidArgument(format!("edge {edge} out of range")));
        }
        self.blocks[batch].score_edge_crossing(geo, edge, w, mu);
        Ok(())
    }

    /// Merges a worker block into its batch.
    pub fn merge(&mut self, batch: usize, block: &TallyBlock) {
        self.blocks[batch].merge(block);
    }

    fn check_cell(&self, cell: usize) -> Result<()> {
        if cell >= self.blocks[0].cells() {
            return Err(Error::InvalidArgument(format!("cell {cell} out of range")));
        }
        Ok(())
    }

    fn total(&self) -> TallyBlock {
        let mut t = TallyBlock::new(self.blocks[0].cells());
        for b in &self.blocks {
            t.merge(b);
        }
        t
    }

    /// Estimates from the histories completed so far, scaled to a step whose
    /// source carries physical weight `source_weight`. Never mutates the set.
    pub fn partial_snapshot(&self, source_weight: f64) -> Result<TallyReport> {
        let total = self.total();
        if total.histories == 0 {
            return Ok(TallyBlock::new(total.cells()).scaled(0.0));
        }
        Ok(total.scaled(source_weight / total.histories as f64))
    }

    /// Final estimates with batch standard deviations. Requires every planned history.
    pub fn finalize(&self, source_weight: f64) -> Result<TallyReport> {
        let done = self.histories_scored();
        if done != self.histories_planned {
            return Err(Error::InvalidArgument(format!(
                "finalize after {done} of {} histories",
                self.histories_planned
            )));
        }
        let mut report = self.partial_snapshot(source_weight)?;
        report.sigma = self.batch_sigma(source_weight);
        Ok(report)
    }

    /// Standard deviation of the mean track-length flux from the per-batch means.
    pub fn batch_sigma(&self, source_weight: f64) -> Option<Vec<f64>> {
        let scored: Vec<&TallyBlock> = self.blocks.iter().filter(|b| b.histories > 0).collect();
        let nb = scored.len();
        if nb < 2 {
            return None;
        }
        let cells = scored[0].cells();
        let mut sigma = vec![0.0; cells];
        for (i, s) in sigma.iter_mut().enumerate() {
            let est: Vec<f64> = scored.iter().map(|b| b.track[i] * source_weight / b.histories as f64).collect();
            let mean = est.iter().sum::<f64>() / nb as f64;
            let var = est.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (nb - 1) as f64;
            *s = (var / nb as f64).sqrt();
        }
        Some(sigma)
    }

    /// Standard deviation of the physical census weight from the per-batch means.
    pub fn census_weight_sigma(&self, source_weight: f64) -> Option<f64> {
        let est: Vec<f64> = self
            .blocks
            .iter()
            .filter(|b| b.histories > 0)
            .map(|b| b.census_weight * source_weight / b.histories as f64)
            .collect();
        let nb = est.len();
        if nb < 2 {
            return None;
        }
        let mean = est.iter().sum::<f64>() / nb as f64;
        let var = est.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (nb - 1) as f64;
        Some((var / nb as f64).sqrt())
    }
}
