//! Two-step processor allocation: pick the fastest allocation whose area stays
//! within `alpha` times the minimum, then cap it at `ceil(mu * P)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Area, ModelKind, SpeedupSpec};

/// Slack on the area-ratio feasibility test. `alpha` is irrational for some
/// rows while `g(p)` is computed in floating point.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AllocationParams {
    /// Cap on `area / a_min` for the initial allocation.
    pub alpha: f64,
    /// Bound on `time / t_min` achieved by the initial allocation.
    pub beta: f64,
    /// Fraction of the platform a single task may hold after adjustment.
    pub mu: f64,
}

impl AllocationParams {
    /// Competitive ratio `1 / mu`.
    pub fn ratio(&self) -> f64 {
        1.0 / self.mu
    }

    /// `|beta + alpha / (1 - mu) - 1 / mu|`.
    pub fn defining_residual(&self) -> f64 {
        (self.beta + self.alpha / (1.0 - self.mu) - 1.0 / self.mu).abs()
    }

    /// `beta >= mu (alpha - 1) / (1 - mu)^2`.
    pub fn side_condition_holds(&self) -> bool {
        self.beta >= self.mu * (self.alpha - 1.0) / (1.0 - self.mu).powi(2)
    }
}

/// Closed-form parameter row for a model family. Tabulated laws share the
/// general row.
pub fn params_for(kind: ModelKind) -> AllocationParams {
    let sqrt2 = std::f64::consts::SQRT_2;
    match kind {
        ModelKind::Roofline => AllocationParams {
            alpha: 1.0,
            beta: 1.0,
            mu: (3.0 - 5f64.sqrt()) / 2.0,
        },
        ModelKind::Communication => AllocationParams {
            alpha: 4.0 / 3.0,
            beta: 1.5,
            mu: (23.0 - 313f64.sqrt()) / 18.0,
        },
        ModelKind::Amdahl => AllocationParams {
            alpha: (sqrt2 + 1.0 + (2.0 * sqrt2 - 1.0).sqrt()) / 2.0,
            beta: (1.0 + (4.0 * sqrt2 + 5.0).sqrt()) / 2.0,
            mu: (1.0 - (8.0 * sqrt2 - 11.0).sqrt()) / 2.0,
        },
        ModelKind::General | ModelKind::Tabulated => AllocationParams {
            alpha: 2.0,
            beta: 27.0 / 13.0,
            mu: (33.0 - 738f64.sqrt()) / 27.0,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioFromParams {
    pub mu: f64,
    pub ratio: f64,
    pub constraint_ok: bool,
}

/// Solves `beta + alpha / (1 - mu) = 1 / mu` for the smaller root `mu` and
/// reports the resulting ratio and whether the side condition holds.
pub fn ratio_from(alpha: f64, beta: f64) -> Result<RatioFromParams> {
    if !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::Domain(format!(
            "non-finite parameters alpha={alpha}, beta={beta}"
        )));
    }
    if alpha < 1.0 || beta <= 0.0 {
        return Err(Error::Domain(format!(
            "need alpha >= 1 and beta > 0, got alpha={alpha}, beta={beta}"
        )));
    }
    let s = alpha + beta + 1.0;
    let disc = s * s - 4.0 * beta;
    if disc < 0.0 {
        return Err(Error::Domain(format!("negative discriminant {disc}")));
    }
    let mu = (s - disc.sqrt()) / (2.0 * beta);
    let constraint_ok = beta >= mu * (alpha - 1.0) / (1.0 - mu).powi(2);
    Ok(RatioFromParams {
        mu,
        ratio: 1.0 / mu,
        constraint_ok,
    })
}

fn area_ratio_ok(spec: &SpeedupSpec, p: usize, a_min: Area, alpha: f64) -> bool {
    let a = spec.area_unchecked(p);
    if a_min == 0.0 {
        return a == 0.0;
    }
    a / a_min <= alpha + FEASIBILITY_SLACK
}

/// Initial (step-one) allocation. Closed forms use a binary search for the
/// largest feasible `p` in `[1, p_max]`; tabulated laws fall back to a scan.
pub fn initial_allocation(
    spec: &SpeedupSpec,
    procs: usize,
    params: &AllocationParams,
) -> Result<usize> {
    if !spec.is_closed_form() {
        return initial_allocation_exhaustive(spec, procs, params);
    }
    let stats = spec.extremal_stats(procs)?;
    let (mut lo, mut hi) = (1usize, stats.p_max);
    // `lo` is always feasible: g(1) = 1 <= alpha.
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if area_ratio_ok(spec, mid, stats.a_min, params.alpha) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

/// Exhaustive form of the step-one problem: among allocations whose area
/// ratio is within `alpha`, the fastest one, smallest `p` on ties. Closed
/// forms scan `[1, p_max]`, tabulated laws scan `[1, P]`.
pub fn initial_allocation_exhaustive(
    spec: &SpeedupSpec,
    procs: usize,
    params: &AllocationParams,
) -> Result<usize> {
    let stats = spec.extremal_stats(procs)?;
    let upper = if spec.is_closed_form() {
        stats.p_max
    } else {
        procs
    };
    let mut best = 1usize;
    let mut best_time = spec.time_unchecked(1);
    for p in 2..=upper {
        if !area_ratio_ok(spec, p, stats.a_min, params.alpha) {
            continue;
        }
        let t = spec.time_unchecked(p);
        if t < best_time {
            best = p;
            best_time = t;
        }
    }
    Ok(best)
}

/// `ceil(mu * P)`, never below one processor.
pub fn allocation_cap(procs: usize, mu: f64) -> usize {
    ((mu * procs as f64).ceil() as usize).max(1)
}

/// Step two: reduce `p` to `ceil(mu * P)` when it exceeds that cap.
pub fn adjust_allocation(p: usize, procs: usize, mu: f64) -> usize {
    let cap = allocation_cap(procs, mu);
    if p > cap {
        cap
    } else {
        p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    /// Step-one allocation before the cap.
    pub initial: usize,
    pub procs: usize,
    pub exec_time: f64,
    pub area: Area,
}

pub fn allocate(spec: &SpeedupSpec, procs: usize, params: &AllocationParams) -> Result<Allocation> {
    let initial = initial_allocation(spec, procs, params)?;
    let p = adjust_allocation(initial, procs, params.mu);
    Ok(Allocation {
        initial,
        procs: p,
        exec_time: spec.exec_time(p, procs)?,
        area: spec.area(p, procs)?,
    })
}
