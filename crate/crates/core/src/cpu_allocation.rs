//! Edge-server CPU partitioning under per-UE execution-time caps.
//!
//! Every request needs `F_n >= D_n / t_cap` to finish in time and the shares
//! must use the whole capacity `F`. Both objectives have closed forms once the
//! binding lower bounds are known, so they are solved by iterative pinning:
//! compute the unconstrained split on the free set, pin every request whose
//! share falls below its bound, repeat. Pinning only shrinks the budget left
//! for the free set, so a pinned request never becomes free again and the
//! loop ends in at most `len` rounds.

use crate::error::{Result, SimError};

/// Relative slack allowed on the budget check.
const BUDGET_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpuRequest {
    pub ue: usize,
    pub cycles: f64,
    /// Latest acceptable execution time; may be `INFINITY`.
    pub t_cap_s: f64,
}

impl CpuRequest {
    pub fn lower_bound_hz(&self) -> f64 {
        if self.t_cap_s <= 0.0 {
            f64::INFINITY
        } else {
            self.cycles / self.t_cap_s
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    MinMax,
    MinSum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CpuAllocation {
    /// Share of each request, in request order.
    pub f: Vec<f64>,
    pub objective: f64,
}

pub fn max_exec_time(requests: &[CpuRequest], f: &[f64]) -> f64 {
    requests
        .iter()
        .zip(f)
        .map(|(r, &f)| r.cycles / f)
        .fold(0.0, f64::max)
}

pub fn sum_exec_time(requests: &[CpuRequest], f: &[f64]) -> f64 {
    requests.iter().zip(f).map(|(r, &f)| r.cycles / f).sum()
}

pub fn feasible(requests: &[CpuRequest], capacity_hz: f64) -> bool {
    if requests.iter().any(|r| !(r.t_cap_s > 0.0)) {
        return false;
    }
    let need: f64 = requests.iter().map(CpuRequest::lower_bound_hz).sum();
    need <= capacity_hz * (1.0 + BUDGET_RTOL)
}

fn check(requests: &[CpuRequest], capacity_hz: f64) -> Result<()> {
    if requests.is_empty() || !feasible(requests, capacity_hz) {
        let required = requests.iter().map(CpuRequest::lower_bound_hz).sum();
        return Err(SimError::InfeasibleAllocation {
            required,
            capacity: capacity_hz,
        });
    }
    Ok(())
}

/// Pinning loop shared by both objectives.
///
/// `weight(r)` gives the unconstrained share proportions on the free set.
fn pin_and_split(
    requests: &[CpuRequest],
    capacity_hz: f64,
    weight: impl Fn(&CpuRequest) -> f64,
) -> Vec<f64> {
    let n = requests.len();
    let lower: Vec<f64> = requests.iter().map(CpuRequest::lower_bound_hz).collect();
    let mut pinned = vec![false; n];
    let mut f = vec![0.0; n];
    loop {
        let budget = capacity_hz - (0..n).filter(|&i| pinned[i]).map(|i| lower[i]).sum::<f64>();
        let free: Vec<usize> = (0..n).filter(|&i| !pinned[i]).collect();
        if free.is_empty() {
            // All bounds bind exactly (budget within rounding of zero); spread
            // the residue proportionally so the shares still sum to capacity.
            let total: f64 = lower.iter().sum();
            return lower.iter().map(|&l| l * capacity_hz / total).collect();
        }
        let wsum: f64 = free.iter().map(|&i| weight(&requests[i])).sum();
        let mut newly = false;
        for &i in &free {
            f[i] = budget * weight(&requests[i]) / wsum;
            if f[i] < lower[i] {
                pinned[i] = true;
                newly = true;
            }
        }
        if !newly {
            for i in (0..n).filter(|&i| pinned[i]) {
                f[i] = lower[i];
            }
            return f;
        }
    }
}

/// Minimizes the largest execution time `max D_n / F_n`.
pub fn allocate_minmax(requests: &[CpuRequest], capacity_hz: f64) -> Result<CpuAllocation> {
    check(requests, capacity_hz)?;
    let f = pin_and_split(requests, capacity_hz, |r| r.cycles);
    let objective = max_exec_time(requests, &f);
    Ok(CpuAllocation { f, objective })
}

/// Minimizes the total execution time `sum D_n / F_n`.
///
/// Stationarity gives `F_n = max(L_n, sqrt(D_n) / nu)`, so free shares are
/// proportional to `sqrt(D_n)`.
pub fn allocate_minsum(requests: &[CpuRequest], capacity_hz: f64) -> Result<CpuAllocation> {
    check(requests, capacity_hz)?;
    let f = pin_and_split(requests, capacity_hz, |r| r.cycles.sqrt());
    let objective = sum_exec_time(requests, &f);
    Ok(CpuAllocation { f, objective })
}

/// Even split `F / len`, rejected if it misses any cap.
pub fn allocate_equal(requests: &[CpuRequest], capacity_hz: f64) -> Result<CpuAllocation> {
    check(requests, capacity_hz)?;
    let share = capacity_hz / requests.len() as f64;
    if requests.iter().any(|r| r.lower_bound_hz() > share) {
        let required = requests.iter().map(CpuRequest::lower_bound_hz).sum();
        return Err(SimError::InfeasibleAllocation {
            required,
            capacity: capacity_hz,
        });
    }
    let f = vec![share; requests.len()];
    let objective = sum_exec_time(requests, &f);
    Ok(CpuAllocation { f, objective })
}
