//! Monte Carlo histories on the slab: streaming, collisions, census, leakage,
//! with weight-window checks at collisions and cell entries.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::material::Material;
use crate::mesh::Mesh1D;
use crate::rng::{spawn_stream, stream_id, RngStream, StreamKind};
use crate::tally::{TallyBlock, TallyGeometry, TallySet};
use crate::ww::{WeightWindowGrid, WindowOutcome};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub x: f64,
    pub mu: f64,
    pub w: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParticleBank {
    pub particles: Vec<Particle>,
}

impl ParticleBank {
    pub fn new(particles: Vec<Particle>) -> Self {
        Self { particles }
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.particles.iter().map(|p| p.w).sum()
    }
}

/// `h` isotropic particles at `x0`, each carrying `total_weight / h`.
pub fn sample_pulse_source(h: usize, x0: f64, total_weight: f64, t0: f64, rng: &mut RngStream) -> Result<ParticleBank> {
    if h == 0 {
        return Err(Error::InvalidArgument("pulse source needs at least one particle".into()));
    }
    let w = total_weight / h as f64;
    let particles = (0..h)
        .map(|_| Particle {
            x: x0,
            mu: sample_isotropic_direction(rng),
            w,
            t: t0,
        })
        .collect();
    Ok(ParticleBank { particles })
}

/// Exponential flight length `−ln ξ / σ_t`.
pub fn distance_to_collision(sigma_t: f64, rng: &mut RngStream) -> Result<f64> {
    if !(sigma_t > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma_t must be positive, got {sigma_t}")));
    }
    Ok(flight(sigma_t, rng))
}

#[inline]
fn flight(sigma_t: f64, rng: &mut RngStream) -> f64 {
    -rng.uniform().ln() / sigma_t
}

#[inline]
pub fn sample_isotropic_direction(rng: &mut RngStream) -> f64 {
    2.0 * rng.uniform() - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Collision {
    Scatter,
    Fission(u32),
    Capture,
}

/// Picks the reaction channel; fission yields `⌊ν⌋` plus a Bernoulli extra.
#[inline]
pub fn sample_collision(m: &Material<f64>, rng: &mut RngStream) -> Collision {
    let xi = rng.uniform() * m.sigma_t;
    if xi < m.sigma_s {
        Collision::Scatter
    } else if xi < m.sigma_s + m.sigma_f {
        let base = m.nu_f.floor();
        let extra = if rng.uniform() < m.nu_f - base { 1 } else { 0 };
        Collision::Fission(base as u32 + extra)
    } else {
        Collision::Capture
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Counters {
    pub collisions: u64,
    pub fissions: u64,
    pub splits: u64,
    pub split_daughters: u64,
    pub roulette_kills: u64,
    pub roulette_survivals: u64,
    pub leakage_weight: f64,
    pub census_particles: u64,
    pub aborted_histories: u64,
    pub histories: u64,
    /// Track segments per cell.
    pub tracks: Vec<u64>,
}

impl Counters {
    pub fn new(cells: usize) -> Self {
        Self {
            tracks: vec![0; cells],
            ..Default::default()
        }
    }

    pub fn merge(&mut self, o: &Counters) {
        self.collisions += o.collisions;
        self.fissions += o.fissions;
        self.splits += o.splits;
        self.split_daughters += o.split_daughters;
        self.roulette_kills += o.roulette_kills;
        self.roulette_survivals += o.roulette_survivals;
        self.leakage_weight += o.leakage_weight;
        self.census_particles += o.census_particles;
        self.aborted_histories += o.aborted_histories;
        self.histories += o.histories;
        if self.tracks.len() < o.tracks.len() {
            self.tracks.resize(o.tracks.len(), 0);
        }
        self.tracks.iter_mut().zip(&o.tracks).for_each(|(a, b)| *a += b);
    }
}

/// Census bank and counters of a step or a part of it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepOutcome {
    pub census: ParticleBank,
    pub counters: Counters,
}

/// Read-only data shared by every history of one step.
#[derive(Debug, Clone, Copy)]
pub struct HistoryContext<'a> {
    pub mesh: &'a Mesh1D<f64>,
    pub materials: &'a [Material<f64>],
    pub geometry: &'a TallyGeometry,
    pub t_end: f64,
    pub windows: Option<&'a WeightWindowGrid<f64>>,
    pub max_events: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistoryStatus {
    Completed,
    /// Aborted: outside the mesh, non-finite state, or too many events.
    Aborted,
}

#[derive(Clone, Copy)]
struct Live {
    p: Particle,
    cell: usize,
}

/// Applies the window of `cell` to `live` and pushes split daughters. Returns
/// false when the particle was rouletted away.
#[inline]
fn window_check(live: &mut Live, ctx: &HistoryContext<'_>, stack: &mut Vec<Live>, counters: &mut Counters, wrng: &mut RngStream) -> bool {
    let Some(ww) = ctx.windows else { return true };
    match ww.apply(live.p.w, live.cell, wrng) {
        WindowOutcome::Unchanged => true,
        WindowOutcome::Split { count, weight } => {
            counters.splits += 1;
            counters.split_daughters += count;
            live.p.w = weight;
            for _ in 1..count {
                stack.push(*live);
            }
            true
        }
        WindowOutcome::RouletteKilled => {
            counters.roulette_kills += 1;
            false
        }
        WindowOutcome::RouletteSurvived(w) => {
            counters.roulette_survivals += 1;
            live.p.w = w;
            true
        }
    }
}

/// Follows one source particle and all of its progeny to census, leakage or death.
///
/// `prng` drives flights and collisions, `wrng` the roulette decisions.
pub fn advance_history(
    p: Particle,
    ctx: &HistoryContext<'_>,
    tallies: &mut TallyBlock,
    counters: &mut Counters,
    census: &mut Vec<Particle>,
    prng: &mut RngStream,
    wrng: &mut RngStream,
) -> HistoryStatus {
    counters.histories += 1;
    let mesh = ctx.mesh;
    let edges = mesh.edges();
    let last_cell = mesh.cells() - 1;
    let Some(cell) = (if p.x.is_finite() { mesh.cell_index(p.x) } else { None }) else {
        log::warn!("history starts outside the mesh at x = {}", p.x);
        counters.aborted_histories += 1;
        return HistoryStatus::Aborted;
    };
    let mut stack = vec![Live { p, cell }];
    let mut events: u64 = 0;
    while let Some(mut live) = stack.pop() {
        loop {
            events += 1;
            let p = &mut live.p;
            if events > ctx.max_events || !(p.w.is_finite() && p.w > 0.0 && p.x.is_finite() && p.t.is_finite()) {
                if events > ctx.max_events {
                    log::warn!("history aborted after {} events", ctx.max_events);
                } else {
                    log::warn!("history aborted on non-finite state {p:?}");
                }
                counters.aborted_histories += 1;
                return HistoryStatus::Aborted;
            }
            let cell = live.cell;
            let m = &ctx.materials[cell];
            let d_census = m.speed * (ctx.t_end - p.t);
            let d_coll = flight(m.sigma_t, prng);
            let d_edge = if p.mu > 0.0 {
                (edges[cell + 1] - p.x) / p.mu
            } else if p.mu < 0.0 {
                (edges[cell] - p.x) / p.mu
            } else {
                f64::INFINITY
            };
            counters.tracks[cell] += 1;
            if d_census <= d_coll && d_census <= d_edge {
                tallies.score_track(ctx.geometry, cell, p.w, d_census.max(0.0));
                p.x += p.mu * d_census;
                p.t = ctx.t_end;
                tallies.score_census(ctx.geometry, cell, p.w, p.mu);
                counters.census_particles += 1;
                census.push(*p);
                break;
            }
            if d_edge < d_coll {
                let d = d_edge.max(0.0);
                tallies.score_track(ctx.geometry, cell, p.w, d);
                p.t += d / m.speed;
                let (edge, next) = if p.mu > 0.0 {
                    (cell + 1, if cell == last_cell { None } else { Some(cell + 1) })
                } else {
                    (cell, cell.checked_sub(1))
                };
                p.x = edges[edge];
                tallies.score_edge_crossing(ctx.geometry, edge, p.w, p.mu);
                match next {
                    None => {
                        counters.leakage_weight += p.w;
                        break;
                    }
                    Some(c) => {
                        live.cell = c;
                        if !window_check(&mut live, ctx, &mut stack, counters, wrng) {
                            break;
                        }
                    }
                }
                continue;
            }
            tallies.score_track(ctx.geometry, cell, p.w, d_coll);
            p.x += p.mu * d_coll;
            p.t += d_coll / m.speed;
            counters.collisions += 1;
            match sample_collision(m, prng) {
                Collision::Capture => break,
                Collision::Scatter => {
                    p.mu = sample_isotropic_direction(prng);
                }
                Collision::Fission(n) => {
                    counters.fissions += 1;
                    if n == 0 {
                        break;
                    }
                    for _ in 1..n {
                        let mut s = live;
                        s.p.mu = sample_isotropic_direction(prng);
                        if window_check(&mut s, ctx, &mut stack, counters, wrng) {
                            stack.push(s);
                        }
                    }
                    live.p.mu = sample_isotropic_direction(prng);
                }
            }
            if !window_check(&mut live, ctx, &mut stack, counters, wrng) {
                break;
            }
        }
    }
    HistoryStatus::Completed
}

/// Histories per worker chunk. Fixed so that results do not depend on the pool size.
pub const CHUNK_HISTORIES: u64 = 64;

/// Runs the histories `first .. first + sources.len()` of step `step` in parallel.
///
/// Chunks never straddle a tally batch; chunk results are merged in chunk order
/// so tallies, counters and the census order are bit-identical for any number
/// of threads.
pub fn run_segment(
    sources: &[Particle],
    first: u64,
    step: usize,
    seed: u64,
    ctx: &HistoryContext<'_>,
    tallies: &mut TallySet,
) -> StepOutcome {
    let end = first + sources.len() as u64;
    let mut chunks = Vec::new();
    let mut a = first;
    while a < end {
        let batch = tallies.batch_of(a);
        let batch_end = if batch + 1 < tallies.batches() {
            tallies.batch_start(batch + 1)
        } else {
            u64::MAX
        };
        let b = end.min(batch_end).min(a + CHUNK_HISTORIES);
        chunks.push((batch, a, b));
        a = b;
    }
    let cells = ctx.mesh.cells();
    let results: Vec<(usize, TallyBlock, Counters, Vec<Particle>)> = chunks
        .par_iter()
        .map(|&(batch, a, b)| {
            let mut block = TallyBlock::new(cells);
            let mut counters = Counters::new(cells);
            let mut census = Vec::new();
            for h in a..b {
                let p = sources[(h - first) as usize];
                let mut prng = spawn_stream(seed, stream_id(step, StreamKind::Physics, h));
                let mut wrng = spawn_stream(seed, stream_id(step, StreamKind::Window, h));
                advance_history(p, ctx, &mut block, &mut counters, &mut census, &mut prng, &mut wrng);
            }
            block.histories = b - a;
            (batch, block, counters, census)
        })
        .collect();
    let mut out = StepOutcome {
        census: ParticleBank::default(),
        counters: Counters::new(cells),
    };
    for (batch, block, counters, census) in results {
        tallies.merge(batch, &block);
        out.counters.merge(&counters);
        out.census.particles.extend(census);
    }
    out
}
