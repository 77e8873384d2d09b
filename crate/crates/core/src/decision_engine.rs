//! End-to-end offloading decision and resource allocation.
//!
//! The pipeline runs in this order:
//!
//! 1. Per-UE load estimation (local overhead, minimum PRB demand).
//! 2. An interference-free estimate of each UE's offloading overhead with the
//!    spectrum split orthogonally in proportion to demand.
//! 3. Initial decision: offload whenever the estimate beats local execution.
//! 4. Greedy reallocation: local UEs are tentatively flipped to offloading in
//!    order of increasing estimated overhead, each flip evaluated through the
//!    full coloring and CPU-allocation pipeline and kept only on strict
//!    improvement of the system overhead.

use crate::compute_model::{offload_overhead, scalarize, upload_time};
use crate::cpu_allocation::{
    allocate_equal, allocate_minmax, allocate_minsum, CpuAllocation, CpuRequest, Objective,
};
use crate::error::{Result, SimError};
use crate::load_estimation::{estimate_all, Demand, LoadEstimate};
use crate::prb_coloring::{
    association_rates, build_interference_graph, color, normalize_prbs, ColoringStep,
};
use crate::radio::{InterferenceTable, OffloadDecision, PrbAssociation};
use crate::scenario::{ChannelGains, Scenario};

/// How the edge server's capacity is split among offloading UEs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpuPolicy {
    Optimized(Objective),
    Equal,
}

impl CpuPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            CpuPolicy::Optimized(Objective::MinMax) => "minmax",
            CpuPolicy::Optimized(Objective::MinSum) => "minsum",
            CpuPolicy::Equal => "equal",
        }
    }

    fn allocate(&self, requests: &[CpuRequest], capacity_hz: f64) -> Result<CpuAllocation> {
        match self {
            CpuPolicy::Optimized(Objective::MinMax) => allocate_minmax(requests, capacity_hz),
            CpuPolicy::Optimized(Objective::MinSum) => allocate_minsum(requests, capacity_hz),
            CpuPolicy::Equal => allocate_equal(requests, capacity_hz),
        }
    }
}

/// How PRBs are handed to the offloading set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrbScheme {
    /// Reuse-scaled targets and graph coloring.
    Coloring,
    /// Floored proportional shares laid out as disjoint contiguous blocks.
    Orthogonal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalEstimate {
    /// Real-valued PRB share.
    pub m_tilde: f64,
    pub rate_bps: f64,
    pub t_off_s: f64,
    pub e_off_j: f64,
    pub t_exe_s: f64,
    pub t_total_s: f64,
    pub overhead: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationReport {
    pub estimates: Vec<LoadEstimate>,
    /// `Some` exactly for UEs in the hypothesized offloading set.
    pub offload: Vec<Option<OrthogonalEstimate>>,
}

impl EstimationReport {
    pub fn overhead(&self, n: usize) -> Option<f64> {
        self.offload[n].map(|e| e.overhead)
    }

    /// Estimated system overhead: local overhead outside the set, estimate inside.
    pub fn system_overhead(&self) -> f64 {
        self.estimates
            .iter()
            .zip(&self.offload)
            .map(|(est, off)| off.map_or(est.local.overhead, |o| o.overhead))
            .sum()
    }
}

pub fn orthogonal_estimate(
    estimates: &[LoadEstimate],
    offload_set: &[usize],
    scenario: &Scenario,
    gains: &ChannelGains,
) -> Result<EstimationReport> {
    if offload_set.is_empty() {
        return Err(SimError::EmptyOffloadSet);
    }
    let mut demand = Vec::with_capacity(offload_set.len());
    for &n in offload_set {
        match estimates[n].demand {
            Demand::Offloadable { w, t_exe_est_s, .. } => demand.push((n, w, t_exe_est_s)),
            Demand::ForcedLocal(reason) => {
                return Err(SimError::InvalidConfig(format!(
                    "UE {n} is forced local ({reason:?}) and cannot be estimated as offloading"
                )))
            }
        }
    }
    let k = scenario.radio.num_prbs as f64;
    let total_w: usize = demand.iter().map(|&(_, w, _)| w).sum();
    let radio = &scenario.radio;
    let mut offload = vec![None; scenario.len()];
    for (n, w, t_exe_s) in demand {
        let ue = &scenario.ues[n];
        let m_tilde = k * w as f64 / total_w as f64;
        let snr = ue.tx_power_w * gains.serving(n) / (m_tilde * radio.noise_per_prb_w);
        let rate_bps = m_tilde * radio.prb_bandwidth_hz() * (1.0 + snr).log2();
        let t_off_s = ue.task.input_bits / rate_bps;
        let e_off_j = ue.tx_power_w * ue.task.input_bits / rate_bps;
        let t_total_s = t_off_s + t_exe_s;
        offload[n] = Some(OrthogonalEstimate {
            m_tilde,
            rate_bps,
            t_off_s,
            e_off_j,
            t_exe_s,
            t_total_s,
            overhead: scalarize(ue, t_total_s, e_off_j),
        });
    }
    Ok(EstimationReport {
        estimates: estimates.to_vec(),
        offload,
    })
}

/// Offload iff the local overhead strictly exceeds the orthogonal estimate.
pub fn initial_decision(estimates: &[LoadEstimate], report: &EstimationReport) -> OffloadDecision {
    OffloadDecision::new(
        estimates
            .iter()
            .enumerate()
            .map(|(n, est)| {
                est.can_offload() && report.overhead(n).is_some_and(|z| est.local.overhead > z)
            })
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    /// An offloading UE ended up with zero uplink rate.
    ZeroRate(usize),
    /// The CPU caps cannot all be met by the server.
    CpuInfeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationOutcome {
    pub decision: OffloadDecision,
    /// `M_n` per UE, zero for local UEs.
    pub prb_targets: Vec<usize>,
    pub c: PrbAssociation,
    pub o: InterferenceTable,
    pub coloring_steps: Vec<ColoringStep>,
    pub rates: Vec<f64>,
    /// Upload time per UE, zero for local UEs.
    pub t_off: Vec<f64>,
    /// Server share per UE, zero for local UEs and for rejected outcomes.
    pub cpu_hz: Vec<f64>,
    pub cpu_objective: Option<f64>,
    pub per_ue_overhead: Vec<f64>,
    pub system_overhead: f64,
    pub policy: CpuPolicy,
    pub rejection: Option<Rejection>,
}

impl AllocationOutcome {
    pub fn is_feasible(&self) -> bool {
        self.rejection.is_none()
    }

    pub fn num_offloading(&self) -> usize {
        self.decision.num_offloading()
    }

    pub fn prb_slots(&self) -> usize {
        self.prb_targets.iter().sum()
    }

    pub fn mean_rate(&self) -> f64 {
        let set = self.decision.offload_set();
        if set.is_empty() {
            0.0
        } else {
            set.iter().map(|&n| self.rates[n]).sum::<f64>() / set.len() as f64
        }
    }

    pub fn sum_cpu_hz(&self) -> f64 {
        self.cpu_hz.iter().sum()
    }

    /// CPU lower bound `D_n / t_cap` implied by the realized upload time.
    fn cpu_lower_bound(&self, scenario: &Scenario, n: usize) -> f64 {
        let t_cap = scenario.ues[n].task.cycles / scenario.ues[n].local_speed_hz - self.t_off[n];
        if self.rates[n] <= 0.0 || t_cap <= 0.0 {
            f64::INFINITY
        } else {
            scenario.ues[n].task.cycles / t_cap
        }
    }
}

/// One tentative flip of the greedy loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipTrial {
    pub ue: usize,
    pub system_overhead: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyRun {
    pub outcome: AllocationOutcome,
    /// System overhead of the initial decision as evaluated by the full pipeline.
    pub initial_overhead: f64,
    /// UEs forced back to local to make the initial decision feasible.
    pub repaired: Vec<usize>,
    pub trials: Vec<FlipTrial>,
}

/// Holds one scenario with its gains and per-UE estimates.
#[derive(Debug, Clone)]
pub struct Planner<'a> {
    pub scenario: &'a Scenario,
    pub gains: &'a ChannelGains,
    pub estimates: Vec<LoadEstimate>,
    powers: Vec<f64>,
}

impl<'a> Planner<'a> {
    pub fn new(scenario: &'a Scenario, gains: &'a ChannelGains) -> Self {
        Self {
            scenario,
            gains,
            estimates: estimate_all(scenario, gains),
            powers: scenario.tx_powers(),
        }
    }

    pub fn candidates(&self) -> Vec<usize> {
        self.estimates
            .iter()
            .filter(|e| e.can_offload())
            .map(|e| e.ue)
            .collect()
    }

    /// Orthogonal estimate over every UE allowed to offload, `None` if there is none.
    pub fn candidate_report(&self) -> Option<EstimationReport> {
        let set = self.candidates();
        if set.is_empty() {
            return None;
        }
        orthogonal_estimate(&self.estimates, &set, self.scenario, self.gains).ok()
    }

    pub fn initial_decision(&self) -> OffloadDecision {
        match self.candidate_report() {
            Some(report) => initial_decision(&self.estimates, &report),
            None => OffloadDecision::all_local(self.scenario.len()),
        }
    }

    fn prb_demand(&self) -> Vec<usize> {
        self.estimates
            .iter()
            .map(|e| e.prbs().unwrap_or(0))
            .collect()
    }

    pub fn evaluate(&self, decision: &OffloadDecision, objective: Objective) -> AllocationOutcome {
        self.evaluate_with(
            decision,
            CpuPolicy::Optimized(objective),
            PrbScheme::Coloring,
        )
    }

    pub fn evaluate_with(
        &self,
        decision: &OffloadDecision,
        policy: CpuPolicy,
        prbs: PrbScheme,
    ) -> AllocationOutcome {
        let s = self.scenario;
        let n = s.len();
        let k = s.radio.num_prbs;
        let local: Vec<f64> = self.estimates.iter().map(|e| e.local.overhead).collect();
        let set = decision.offload_set();
        let mut outcome = AllocationOutcome {
            decision: decision.clone(),
            prb_targets: vec![0; n],
            c: PrbAssociation::zeros(n, k),
            o: InterferenceTable::zeros(n, k),
            coloring_steps: Vec::new(),
            rates: vec![0.0; n],
            t_off: vec![0.0; n],
            cpu_hz: vec![0.0; n],
            cpu_objective: None,
            per_ue_overhead: local,
            system_overhead: 0.0,
            policy,
            rejection: None,
        };
        if set.is_empty() {
            outcome.system_overhead = outcome.per_ue_overhead.iter().sum();
            return outcome;
        }
        debug_assert!(set.iter().all(|&i| self.estimates[i].can_offload()));

        let w = self.prb_demand();
        match prbs {
            PrbScheme::Coloring => {
                let m =
                    normalize_prbs(&w, &set, k, s.reuse_lambda).expect("offload set is non-empty");
                let graph =
                    build_interference_graph(self.gains, &m, &self.powers, &set, s.edge_threshold);
                let state = color(&graph, &m, self.gains, &self.powers, &s.radio);
                outcome.prb_targets = m;
                outcome.c = state.c;
                outcome.o = state.o;
                outcome.coloring_steps = state.steps;
            }
            PrbScheme::Orthogonal => {
                let (m, c) = orthogonal_blocks(&w, &set, k);
                outcome.o = crate::radio::interference_table(&c, self.gains, &self.powers);
                outcome.prb_targets = m;
                outcome.c = c;
            }
        }
        outcome.rates = association_rates(
            &outcome.c,
            &outcome.prb_targets,
            self.gains,
            &self.powers,
            &s.radio,
        );

        let mut requests = Vec::with_capacity(set.len());
        for &i in &set {
            let ue = &s.ues[i];
            let rate = outcome.rates[i];
            if !(rate > 0.0) {
                return reject(outcome, &set, Rejection::ZeroRate(i));
            }
            outcome.t_off[i] = upload_time(ue, rate);
            let t_cap_s = self.estimates[i].local.time_s - outcome.t_off[i];
            requests.push(CpuRequest {
                ue: i,
                cycles: ue.task.cycles,
                t_cap_s,
            });
        }
        let alloc = match policy.allocate(&requests, s.mec_capacity_hz) {
            Ok(a) => a,
            Err(_) => return reject(outcome, &set, Rejection::CpuInfeasible),
        };
        for (req, &f) in requests.iter().zip(&alloc.f) {
            let i = req.ue;
            outcome.cpu_hz[i] = f;
            // rate and share are both positive here
            let off =
                offload_overhead(&s.ues[i], outcome.rates[i], f).expect("positive rate and share");
            outcome.per_ue_overhead[i] = off.overhead;
        }
        outcome.cpu_objective = Some(alloc.objective);
        outcome.system_overhead = outcome.per_ue_overhead.iter().sum();
        outcome
    }

    /// Greedy flip search starting from `a_init`.
    pub fn greedy_reallocate(&self, a_init: &OffloadDecision, policy: CpuPolicy) -> GreedyRun {
        let mut best = self.evaluate_with(a_init, policy, PrbScheme::Coloring);
        let initial_overhead = best.system_overhead;
        // An infeasible all-ones start still goes through repair below.
        if a_init.all_ones() && best.is_feasible() {
            return GreedyRun {
                outcome: best,
                initial_overhead,
                repaired: Vec::new(),
                trials: Vec::new(),
            };
        }

        let mut repaired = Vec::new();
        while !best.is_feasible() {
            // Drop the UE with the heaviest server demand and try again.
            let set = best.decision.offload_set();
            let worst = set
                .iter()
                .copied()
                .max_by(|&a, &b| {
                    best.cpu_lower_bound(self.scenario, a)
                        .total_cmp(&best.cpu_lower_bound(self.scenario, b))
                        .then(b.cmp(&a))
                })
                .expect("infeasible outcome has offloaders");
            let mut next = best.decision.clone();
            next.set(worst, false);
            repaired.push(worst);
            best = self.evaluate_with(&next, policy, PrbScheme::Coloring);
        }

        let mut trials = Vec::new();
        let report = self.candidate_report();
        let mut order: Vec<usize> = best
            .decision
            .local_set()
            .into_iter()
            .filter(|&i| self.estimates[i].can_offload())
            .collect();
        if let Some(report) = &report {
            order.sort_by(|&a, &b| {
                let za = report.overhead(a).unwrap_or(f64::INFINITY);
                let zb = report.overhead(b).unwrap_or(f64::INFINITY);
                za.total_cmp(&zb).then(a.cmp(&b))
            });
        }
        for ue in order {
            let mut trial = best.decision.clone();
            trial.set(ue, true);
            let candidate = self.evaluate_with(&trial, policy, PrbScheme::Coloring);
            let accepted = candidate.system_overhead < best.system_overhead;
            trials.push(FlipTrial {
                ue,
                system_overhead: candidate.system_overhead,
                accepted,
            });
            if accepted {
                best = candidate;
            }
        }
        GreedyRun {
            outcome: best,
            initial_overhead,
            repaired,
            trials,
        }
    }

    /// Initial decision followed by greedy reallocation.
    pub fn propose(&self, policy: CpuPolicy) -> GreedyRun {
        self.greedy_reallocate(&self.initial_decision(), policy)
    }

    pub fn run_baseline(&self, kind: Baseline) -> AllocationOutcome {
        let n = self.scenario.len();
        match kind {
            Baseline::AllLocal => self.evaluate_with(
                &OffloadDecision::all_local(n),
                CpuPolicy::Equal,
                PrbScheme::Coloring,
            ),
            Baseline::AllOffloadOrthogonal => {
                let decision = OffloadDecision::new(
                    self.estimates
                        .iter()
                        .map(LoadEstimate::can_offload)
                        .collect(),
                );
                self.evaluate_with(&decision, CpuPolicy::Equal, PrbScheme::Orthogonal)
            }
            Baseline::EqualCpu => self.propose(CpuPolicy::Equal).outcome,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    AllLocal,
    /// Every feasible UE offloads on disjoint PRB blocks with an even CPU split.
    AllOffloadOrthogonal,
    /// Proposed decision and coloring, even CPU split.
    EqualCpu,
}

fn reject(mut outcome: AllocationOutcome, set: &[usize], why: Rejection) -> AllocationOutcome {
    for &i in set {
        outcome.per_ue_overhead[i] = f64::INFINITY;
        outcome.cpu_hz[i] = 0.0;
    }
    outcome.cpu_objective = None;
    outcome.system_overhead = f64::INFINITY;
    outcome.rejection = Some(why);
    outcome
}

/// Floored proportional PRB shares (at least one each) placed as consecutive
/// blocks in UE order. Blocks wrap around when the floors exceed `k`, which
/// only happens with more offloaders than PRBs.
pub fn orthogonal_blocks(w: &[usize], set: &[usize], k: usize) -> (Vec<usize>, PrbAssociation) {
    let total: usize = set.iter().map(|&n| w[n]).sum();
    let mut m = vec![0; w.len()];
    let mut c = PrbAssociation::zeros(w.len(), k);
    let mut next = 0;
    for &n in set {
        let share = ((k as f64 * w[n] as f64 / total as f64).floor() as usize).clamp(1, k);
        m[n] = share;
        for _ in 0..share {
            c.set(n, next % k, true);
            next += 1;
        }
    }
    (m, c)
}
