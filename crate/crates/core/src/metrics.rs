//! Norms, relative errors, figures of merit and the relative change rate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::Mesh1D;
use crate::real::Real;

/// `√(Σ f_i² Δx_i)`.
pub fn l2_norm<T: Real>(f: &[T], mesh: &Mesh1D<T>) -> T {
    f.iter().zip(mesh.widths()).map(|(&v, &dx)| v * v * dx).sum::<T>().sqrt()
}

/// The L2 norm restricted to cells where `mask_i < φ*`. The flag is false when no cell qualifies.
pub fn modified_l2_norm<T: Real>(f: &[T], mesh: &Mesh1D<T>, mask: &[T], phi_star: T) -> (T, bool) {
    let mut s = T::zero();
    let mut any = false;
    for ((&v, &dx), &m) in f.iter().zip(mesh.widths()).zip(mask) {
        if m < phi_star {
            s += v * v * dx;
            any = true;
        }
    }
    (s.sqrt(), any)
}

/// `‖a − b‖ / ‖b‖`.
pub fn relative_l2_error<T: Real>(a: &[T], b: &[T], mesh: &Mesh1D<T>) -> Result<T> {
    let diff: Vec<T> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
    let nb = l2_norm(b, mesh);
    if !(nb > T::zero()) {
        return Err(Error::InvalidArgument("reference has zero norm".into()));
    }
    Ok(l2_norm(&diff, mesh) / nb)
}

/// Relative error on the low-flux cells of the mask, `None` when none qualify.
pub fn relative_modified_l2_error<T: Real>(a: &[T], b: &[T], mesh: &Mesh1D<T>, mask: &[T], phi_star: T) -> Option<T> {
    let diff: Vec<T> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
    let (nd, any) = modified_l2_norm(&diff, mesh, mask, phi_star);
    let (nb, _) = modified_l2_norm(b, mesh, mask, phi_star);
    if !any || !(nb > T::zero()) {
        return None;
    }
    Some(nd / nb)
}

/// `α = ‖φ^n − φ^{n−1}‖ / ‖φ^n‖`.
pub fn relative_change<T: Real>(phi_now: &[T], phi_prev: &[T], mesh: &Mesh1D<T>) -> Result<T> {
    if phi_now.len() != phi_prev.len() {
        return Err(Error::Shape {
            what: "previous flux".into(),
            expected: phi_now.len(),
            found: phi_prev.len(),
        });
    }
    let n = l2_norm(phi_now, mesh);
    if !(n > T::zero()) {
        return Err(Error::InvalidArgument("relative change of a zero flux".into()));
    }
    let d: Vec<T> = phi_now.iter().zip(phi_prev).map(|(&a, &b)| a - b).collect();
    Ok(l2_norm(&d, mesh) / n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fom<T> {
    /// `1 / (τ v_i²)`, `None` where `v_i = 0`.
    pub per_cell: Vec<Option<T>>,
    /// `1 / (τ ‖v‖²)`.
    pub l2: Option<T>,
    /// `1 / (τ ‖v‖²_{φ*})`.
    pub modified: Option<T>,
    pub excluded: usize,
}

/// Figures of merit of per-cell deviations `values` (standard deviations or errors).
/// Aggregates take the squared (modified) L2 norm of the nonzero entries.
pub fn fom<T: Real>(values: &[T], tau: T, mesh: &Mesh1D<T>, mask: &[T], phi_star: T) -> Result<Fom<T>> {
    if !(tau > T::zero()) {
        return Err(Error::InvalidArgument(format!("runtime must be positive, got {tau}")));
    }
    let per_cell: Vec<Option<T>> = values
        .iter()
        .map(|&v| if v != T::zero() { Some(T::one() / (tau * v * v)) } else { None })
        .collect();
    let excluded = per_cell.iter().filter(|v| v.is_none()).count();
    let n = l2_norm(values, mesh);
    let l2 = (n > T::zero()).then(|| T::one() / (tau * n * n));
    let (m, any) = modified_l2_norm(values, mesh, mask, phi_star);
    let modified = (any && m > T::zero()).then(|| T::one() / (tau * m * m));
    Ok(Fom {
        per_cell,
        l2,
        modified,
        excluded,
    })
}

/// One row of the run summary.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StepMetrics {
    pub step: usize,
    pub t: f64,
    pub runtime_s: f64,
    pub rel_l2_error: Option<f64>,
    pub rel_modified_l2_error: Option<f64>,
    pub rel_l2_error_census: Option<f64>,
    pub rel_l2_error_hybrid: Option<f64>,
    pub fom_err_l2: Option<f64>,
    pub fom_err_modified: Option<f64>,
    pub fom_sigma_l2: Option<f64>,
    pub fom_sigma_modified: Option<f64>,
    pub relative_sigma_l2: Option<f64>,
    pub alpha: Option<f64>,
    pub census_weight: f64,
    pub census_weight_sigma: Option<f64>,
    pub histories: u64,
    pub occupied_cells: usize,
}
