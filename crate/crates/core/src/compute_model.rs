//! Local and edge-server computing overheads.
//!
//! Overheads scalarize time (s) and energy (J) with the UE's weights. No unit
//! normalization is applied. `f64::INFINITY` marks an infeasible option.

use crate::error::{Result, SimError};
use crate::scenario::Ue;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOverhead {
    pub time_s: f64,
    pub energy_j: f64,
    pub overhead: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffloadOverhead {
    pub rate_bps: f64,
    pub t_off_s: f64,
    pub e_off_j: f64,
    pub t_exe_s: f64,
    pub t_total_s: f64,
    pub overhead: f64,
}

pub fn scalarize(ue: &Ue, time_s: f64, energy_j: f64) -> f64 {
    ue.weight_time * time_s + ue.weight_energy * energy_j
}

pub fn local_overhead(ue: &Ue) -> LocalOverhead {
    let time_s = ue.task.cycles / ue.local_speed_hz;
    let energy_j = ue.energy_coeff_j_per_cycle * ue.task.cycles;
    LocalOverhead {
        time_s,
        energy_j,
        overhead: scalarize(ue, time_s, energy_j),
    }
}

pub fn upload_time(ue: &Ue, rate_bps: f64) -> f64 {
    ue.task.input_bits / rate_bps
}

pub fn upload_energy(ue: &Ue, rate_bps: f64) -> f64 {
    ue.tx_power_w * ue.task.input_bits / rate_bps
}

pub fn offload_overhead(ue: &Ue, rate_bps: f64, f_assigned_hz: f64) -> Result<OffloadOverhead> {
    if !(rate_bps > 0.0) {
        return Err(SimError::ZeroRate(rate_bps));
    }
    if !(f_assigned_hz > 0.0) {
        return Err(SimError::InvalidConfig(format!(
            "assigned server speed must be positive, got {f_assigned_hz}"
        )));
    }
    let t_off_s = upload_time(ue, rate_bps);
    let e_off_j = upload_energy(ue, rate_bps);
    let t_exe_s = ue.task.cycles / f_assigned_hz;
    let t_total_s = t_off_s + t_exe_s;
    Ok(OffloadOverhead {
        rate_bps,
        t_off_s,
        e_off_j,
        t_exe_s,
        t_total_s,
        overhead: scalarize(ue, t_total_s, e_off_j),
    })
}
