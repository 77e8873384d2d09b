//! Per-UE, interference-free estimate of the offloading demand.
//!
//! Each UE derives the rate it needs for offloading to beat local execution
//! (assuming an even split of the server) and the smallest PRB count that
//! delivers that rate on its own serving link.

use crate::compute_model::{local_overhead, LocalOverhead};
use crate::scenario::{ChannelGains, RadioParams, Scenario, Ue};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcedLocalReason {
    /// Even with zero upload time the server share cannot beat local execution.
    Deadline,
    /// The required rate is unreachable with all K PRBs.
    PrbDemand,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateRequirement {
    Required { t_exe_est_s: f64, min_rate_bps: f64 },
    ForcedLocal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrbDemand {
    Prbs(usize),
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Demand {
    Offloadable {
        w: usize,
        min_rate_bps: f64,
        t_exe_est_s: f64,
    },
    ForcedLocal(ForcedLocalReason),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadEstimate {
    pub ue: usize,
    pub local: LocalOverhead,
    pub demand: Demand,
}

impl LoadEstimate {
    pub fn can_offload(&self) -> bool {
        matches!(self.demand, Demand::Offloadable { .. })
    }

    pub fn prbs(&self) -> Option<usize> {
        match self.demand {
            Demand::Offloadable { w, .. } => Some(w),
            Demand::ForcedLocal(_) => None,
        }
    }
}

pub fn min_rate_requirement(ue: &Ue, mec_capacity_hz: f64, n_total: usize) -> RateRequirement {
    let t_local = ue.task.cycles / ue.local_speed_hz;
    let t_exe_est_s = ue.task.cycles / (mec_capacity_hz / n_total as f64);
    let slack = t_local - t_exe_est_s;
    if slack <= 0.0 {
        return RateRequirement::ForcedLocal;
    }
    RateRequirement::Required {
        t_exe_est_s,
        min_rate_bps: ue.task.input_bits / slack,
    }
}

/// Achievable rate with `w` PRBs when the whole transmit power is spread over them.
pub fn demand_rate(w: usize, snr_total: f64, radio: &RadioParams) -> f64 {
    let w = w as f64;
    w * radio.prb_bandwidth_hz() * (1.0 + snr_total / w).log2()
}

/// Smallest PRB count in `1..=K` whose interference-free rate meets `min_rate_bps`.
pub fn min_prbs(ue: &Ue, serving_gain: f64, radio: &RadioParams, min_rate_bps: f64) -> PrbDemand {
    let snr_total = ue.tx_power_w * serving_gain / radio.noise_per_prb_w;
    let meets = |w: usize| demand_rate(w, snr_total, radio) >= min_rate_bps;
    let k = radio.num_prbs;
    if !meets(k) {
        return PrbDemand::Infeasible;
    }
    // Invariant: meets(hi) holds; everything below lo fails.
    let (mut lo, mut hi) = (1, k);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if meets(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    PrbDemand::Prbs(hi)
}

pub fn estimate_ue(n: usize, scenario: &Scenario, gains: &ChannelGains) -> LoadEstimate {
    let ue = &scenario.ues[n];
    let local = local_overhead(ue);
    let demand = match min_rate_requirement(ue, scenario.mec_capacity_hz, scenario.len()) {
        RateRequirement::ForcedLocal => Demand::ForcedLocal(ForcedLocalReason::Deadline),
        RateRequirement::Required {
            t_exe_est_s,
            min_rate_bps,
        } => match min_prbs(ue, gains.serving(n), &scenario.radio, min_rate_bps) {
            PrbDemand::Prbs(w) => Demand::Offloadable {
                w,
                min_rate_bps,
                t_exe_est_s,
            },
            PrbDemand::Infeasible => Demand::ForcedLocal(ForcedLocalReason::PrbDemand),
        },
    };
    LoadEstimate {
        ue: n,
        local,
        demand,
    }
}

pub fn estimate_all(scenario: &Scenario, gains: &ChannelGains) -> Vec<LoadEstimate> {
    (0..scenario.len())
        .map(|n| estimate_ue(n, scenario, gains))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compute_model::tests::table_one_ue;
    use proptest::prelude::*;

    fn linear_scan(snr: f64, radio: &RadioParams, r: f64) -> PrbDemand {
        for w in 1..=radio.num_prbs {
            let wf = w as f64;
            if wf * (radio.bandwidth_hz / radio.num_prbs as f64) * (1.0 + snr / wf).log2() >= r {
                return PrbDemand::Prbs(w);
            }
        }
        PrbDemand::Infeasible
    }

    fn radio(k: usize) -> RadioParams {
        RadioParams {
            bandwidth_hz: 20e6,
            num_prbs: k,
            noise_per_prb_w: 1e-13,
        }
    }

    #[test]
    fn table_one_rate_requirement() {
        match min_rate_requirement(&table_one_ue(), 100e9, 9) {
            RateRequirement::Required {
                t_exe_est_s,
                min_rate_bps,
            } => {
                assert!((t_exe_est_s - 0.09).abs() < 1e-15);
                assert!((min_rate_bps / 2_570_382.070_437_567 - 1.0).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn server_share_equal_to_local_speed_forces_local() {
        // F / N = 0.7 GHz, same cycles on both sides.
        let r = min_rate_requirement(&table_one_ue(), 0.7e9 * 4.0, 4);
        assert_eq!(r, RateRequirement::ForcedLocal);
    }

    #[test]
    fn infinite_server_limit() {
        let ue = table_one_ue();
        match min_rate_requirement(&ue, f64::INFINITY, 9) {
            RateRequirement::Required {
                min_rate_bps,
                t_exe_est_s,
            } => {
                assert_eq!(t_exe_est_s, 0.0);
                assert_eq!(min_rate_bps, ue.task.input_bits / (1e9 / 0.7e9));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn min_prbs_reference_cases() {
        // P * H / sigma^2 = 0.1 * 1e-10 / 1e-13 = 100.
        let ue = table_one_ue();
        let r = radio(100);
        assert_eq!(min_prbs(&ue, 1e-10, &r, 1e6), PrbDemand::Prbs(1));
        assert_eq!(min_prbs(&ue, 1e-10, &r, 2.5e6), PrbDemand::Prbs(3));
        let cap = demand_rate(100, 100.0, &r);
        assert_eq!(
            min_prbs(&ue, 1e-10, &r, cap * 1.000_001),
            PrbDemand::Infeasible
        );
        assert_eq!(min_prbs(&ue, 1e-10, &r, cap), PrbDemand::Prbs(100));
    }

    #[test]
    fn saturating_demand_is_infeasible() {
        // w * log2(1 + c / w) never exceeds c / ln 2.
        let r = radio(100);
        let limit = r.prb_bandwidth_hz() * 5.0 / std::f64::consts::LN_2;
        let ue = table_one_ue();
        assert_eq!(min_prbs(&ue, 5e-12, &r, limit), PrbDemand::Infeasible);
    }

    #[test]
    fn estimate_marks_forced_local() {
        use crate::config::ScenarioConfig;
        use crate::scenario::{build_scenario, channel_gains};
        let cfg = ScenarioConfig {
            mec_ghz: 0.7 * 9.0 * 0.5,
            ..Default::default()
        };
        let s = build_scenario(&cfg, 0).unwrap();
        let g = channel_gains(&s).unwrap();
        let est = estimate_all(&s, &g);
        assert!(est
            .iter()
            .all(|e| e.demand == Demand::ForcedLocal(ForcedLocalReason::Deadline)));
    }

    proptest! {
        #[test]
        fn binary_search_matches_scan(
            snr in 1.0f64..1e4,
            frac in 0.01f64..1.2,
            k_idx in 0usize..3,
        ) {
            let r = radio([10, 50, 100][k_idx]);
            let rbar = frac * demand_rate(r.num_prbs, snr, &r);
            let ue = Ue { tx_power_w: 1.0, ..table_one_ue() };
            let got = min_prbs(&ue, snr * r.noise_per_prb_w, &r, rbar);
            prop_assert_eq!(got, linear_scan(snr, &r, rbar));
            if let PrbDemand::Prbs(w) = got {
                prop_assert!(demand_rate(w, snr, &r) >= rbar);
                prop_assert!(w == 1 || demand_rate(w - 1, snr, &r) < rbar);
            }
        }
    }
}
