//! Weight windows: centers from an auxiliary flux, split/roulette, update schedule.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightWindowGrid<T> {
    centers: Vec<T>,
    rho: T,
    eps_min: T,
    fallback: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window<T> {
    pub floor: T,
    pub center: T,
    pub ceiling: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowOutcome {
    Unchanged,
    Split { count: u64, weight: f64 },
    RouletteKilled,
    RouletteSurvived(f64),
}

fn check_params<T: Real>(rho: T, eps_min: T) -> Result<()> {
    if !(rho >= T::one()) {
        return Err(Error::InvalidArgument(format!("rho must be ≥ 1, got {rho}")));
    }
    if !(eps_min > T::zero() && eps_min < T::one()) {
        return Err(Error::InvalidArgument(format!("eps_min must lie in (0, 1), got {eps_min}")));
    }
    Ok(())
}

impl<T: Real> WeightWindowGrid<T> {
    /// Every center equal to one.
    pub fn uniform(cells: usize, rho: T, eps_min: T) -> Result<Self> {
        check_params(rho, eps_min)?;
        Ok(Self {
            centers: vec![T::one(); cells],
            rho,
            eps_min,
            fallback: true,
        })
    }

    /// Grid with explicit centers, each clamped into `[ε_min, 1]`.
    pub fn from_centers(centers: Vec<T>, rho: T, eps_min: T) -> Result<Self> {
        check_params(rho, eps_min)?;
        if centers.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("window centers".into()));
        }
        Ok(Self {
            centers: centers.into_iter().map(|c| c.max(eps_min).min(T::one())).collect(),
            rho,
            eps_min,
            fallback: false,
        })
    }

    pub fn centers(&self) -> &[T] {
        &self.centers
    }

    pub fn rho(&self) -> T {
        self.rho
    }

    pub fn eps_min(&self) -> T {
        self.eps_min
    }

    pub fn cells(&self) -> usize {
        self.centers.len()
    }

    /// True when the grid is the uniform fallback rather than built from a flux.
    pub fn is_fallback(&self) -> bool {
        self.fallback
    }

    pub fn window_of(&self, cell: usize) -> Window<T> {
        let center = self.centers[cell];
        Window {
            floor: center / self.rho,
            center,
            ceiling: center * self.rho,
        }
    }
}

/// Centers `[max(φ̃, 0) / max φ̃](1 − ε_min) + ε_min`.
///
/// An identically zero or all-negative (or non-finite) auxiliary flux gives the
/// uniform fallback with a warning.
pub fn build_centers<T: Real>(phi_tilde: &[T], rho: T, eps_min: T) -> Result<WeightWindowGrid<T>> {
    check_params(rho, eps_min)?;
    if phi_tilde.is_empty() {
        return Err(Error::InvalidArgument("auxiliary flux is empty".into()));
    }
    let max = phi_tilde.iter().fold(T::zero(), |m, &v| if v > m { v } else { m });
    if !(max > T::zero()) || !max.is_finite() || phi_tilde.iter().any(|v| v.is_nan()) {
        log::warn!("auxiliary flux has no positive finite maximum; using uniform weight windows");
        return WeightWindowGrid::uniform(phi_tilde.len(), rho, eps_min);
    }
    let span = T::one() - eps_min;
    let centers = phi_tilde
        .iter()
        .map(|&v| {
            let c = (v.max(T::zero()) / max) * span + eps_min;
            c.min(T::one()).max(eps_min)
        })
        .collect();
    Ok(WeightWindowGrid {
        centers,
        rho,
        eps_min,
        fallback: false,
    })
}

/// Lagged windows from the previous step's track-length flux; uniform on the first step.
pub fn lww_centers<T: Real>(prev_step_flux: Option<&[T]>, cells: usize, rho: T, eps_min: T) -> Result<WeightWindowGrid<T>> {
    match prev_step_flux {
        Some(f) => {
            if f.len() != cells {
                return Err(Error::Shape {
                    what: "lagged flux".into(),
                    expected: cells,
                    found: f.len(),
                });
            }
            build_centers(f, rho, eps_min)
        }
        None => WeightWindowGrid::uniform(cells, rho, eps_min),
    }
}

impl WeightWindowGrid<f64> {
    /// Splits above the ceiling, roulettes below the floor.
    #[inline]
    pub fn apply(&self, w: f64, cell: usize, rng: &mut RngStream) -> WindowOutcome {
        let win = self.window_of(cell);
        if w > win.ceiling {
            let count = (w / win.center).ceil() as u64;
            WindowOutcome::Split {
                count,
                weight: w / count as f64,
            }
        } else if w < win.floor {
            if rng.uniform() < w / win.center {
                WindowOutcome::RouletteSurvived(win.center)
            } else {
                WindowOutcome::RouletteKilled
            }
        } else {
            WindowOutcome::Unchanged
        }
    }
}

/// History counts at which windows are rebuilt within a step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateSchedule {
    pub thresholds: Vec<u64>,
}

/// Thresholds `⌈f_p H⌉`.
pub fn schedule(histories: u64, fractions: &[f64]) -> Result<UpdateSchedule> {
    if fractions.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("update fractions must increase".into()));
    }
    if fractions.iter().any(|f| !(*f > 0.0 && *f < 1.0)) {
        return Err(Error::InvalidArgument("update fractions must lie in (0, 1)".into()));
    }
    let thresholds: Vec<u64> = fractions.iter().map(|f| (f * histories as f64).ceil() as u64).collect();
    if thresholds.windows(2).any(|w| w[1] <= w[0]) || thresholds.iter().any(|&t| t >= histories || t == 0) {
        return Err(Error::InvalidArgument(format!(
            "update thresholds {thresholds:?} are not strictly increasing below {histories}"
        )));
    }
    Ok(UpdateSchedule { thresholds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::spawn_stream;

    #[test]
    fn centers_arithmetic() {
        let g = build_centers::<f64>(&[0.0, 0.5, 1.0], 1.25, 1e-3).unwrap();
        let expect = [0.001, 0.5005, 1.0];
        for (c, e) in g.centers().iter().zip(expect) {
            assert!((c - e).abs() < 1e-15);
        }
        assert!(!g.is_fallback());
    }

    #[test]
    fn constant_flux_unit_centers() {
        let g = build_centers::<f64>(&[2.5; 5], 1.25, 1e-3).unwrap();
        assert!(g.centers().iter().all(|&c| c == 1.0));
    }

    #[test]
    fn negative_undershoot_clamped() {
        let g = build_centers::<f64>(&[1.0, -0.2, 0.5], 1.25, 1e-3).unwrap();
        assert_eq!(g.centers()[1], 1e-3);
    }

    #[test]
    fn degenerate_flux_falls_back() {
        assert!(build_centers::<f64>(&[0.0; 4], 1.25, 1e-3).unwrap().is_fallback());
        let g = build_centers::<f64>(&[-1.0, -2.0], 1.25, 1e-3).unwrap();
        assert!(g.is_fallback());
        assert_eq!(g.centers(), &[1.0, 1.0]);
    }

    #[test]
    fn window_bounds() {
        let g = WeightWindowGrid::<f64>::from_centers(vec![0.4, 1.0], 1.25, 1e-3).unwrap();
        let w = g.window_of(0);
        assert!((w.floor - 0.32).abs() < 1e-15 && (w.ceiling - 0.5).abs() < 1e-15);
        let d = build_centers::<f64>(&[0.4, 1.0], 1.0, 1e-3).unwrap().window_of(0);
        assert!(d.floor == d.center && d.center == d.ceiling);
        let lo = build_centers::<f64>(&[0.0, 1.0], 1.25, 1e-3).unwrap().window_of(0);
        assert!((lo.floor - 8e-4).abs() < 1e-18);
    }

    #[test]
    fn split_and_roulette() {
        let g = WeightWindowGrid::from_centers(vec![0.3, 1.0], 1.25, 1e-3).unwrap();
        let c = g.centers()[0];
        let mut rng = spawn_stream(1, 1);
        match g.apply(1.0, 0, &mut rng) {
            WindowOutcome::Split { count, weight } => {
                assert_eq!(count, 4);
                assert_eq!(weight, 0.25);
            }
            o => panic!("{o:?}"),
        }
        assert_eq!(g.apply(c, 0, &mut rng), WindowOutcome::Unchanged);
        match g.apply(0.1, 0, &mut rng) {
            WindowOutcome::RouletteSurvived(w) => assert_eq!(w, c),
            WindowOutcome::RouletteKilled => {}
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infinite_rho_never_triggers() {
        let g = build_centers::<f64>(&[0.01, 1.0], f64::INFINITY, 1e-3).unwrap();
        let mut rng = spawn_stream(1, 1);
        assert_eq!(g.apply(1e6, 0, &mut rng), WindowOutcome::Unchanged);
        assert_eq!(g.apply(1e-12, 0, &mut rng), WindowOutcome::Unchanged);
    }

    #[test]
    fn schedule_thresholds() {
        assert_eq!(schedule(10_000, &[0.25, 0.5, 0.75]).unwrap().thresholds, vec![2500, 5000, 7500]);
        assert!(schedule(10_000, &[]).unwrap().thresholds.is_empty());
        assert_eq!(schedule(10, &[0.25, 0.5]).unwrap().thresholds, vec![3, 5]);
        assert!(schedule(10, &[0.5, 0.25]).is_err());
        assert!(schedule(10, &[0.11, 0.12]).is_err());
    }

    #[test]
    fn lagged_windows() {
        assert!(lww_centers::<f64>(None, 3, 1.25, 1e-3).unwrap().is_fallback());
        let g = lww_centers(Some(&[2.0, 2.0][..]), 2, 1.25, 1e-3).unwrap();
        assert_eq!(g.centers(), &[1.0, 1.0]);
        assert!(lww_centers(Some(&[1.0][..]), 2, 1.25, 1e-3).is_err());
    }

    #[test]
    fn invalid_parameters() {
        assert!(build_centers::<f64>(&[1.0], 0.5, 1e-3).is_err());
        assert!(build_centers::<f64>(&[1.0], 1.25, 0.0).is_err());
        assert!(build_centers::<f64>(&[], 1.25, 1e-3).is_err());
    }
}
