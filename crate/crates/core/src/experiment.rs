//! Seeded experiment runs and CSV emission.

use std::fmt::{self, Write as _};
use std::io::{self, Write};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::cpu_allocation::Objective;
use crate::decision_engine::{AllocationOutcome, Baseline, CpuPolicy, Planner};
use crate::error::{Result, SimError};
use crate::radio::PrbAssociation;
use crate::scenario::{build_scenario, channel_gains};

pub const CSV_HEADER: &str = "seed,n_cells,scheme,lambda,objective,system_overhead,n_offload,mean_rate_bps,sum_cpu_assigned_hz,prb_slots_assigned,wall_time_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    ProposedMinMax,
    ProposedMinSum,
    AllLocal,
    AllOffloadOrth,
    EqualCpu,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::ProposedMinMax,
        Scheme::ProposedMinSum,
        Scheme::AllLocal,
        Scheme::AllOffloadOrth,
        Scheme::EqualCpu,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::ProposedMinMax => "proposed_minmax",
            Scheme::ProposedMinSum => "proposed_minsum",
            Scheme::AllLocal => "all_local",
            Scheme::AllOffloadOrth => "all_offload_orth",
            Scheme::EqualCpu => "equal_cpu",
        }
    }

    /// CPU split used by the scheme, as written to the `objective` column.
    pub fn objective_label(&self) -> &'static str {
        match self {
            Scheme::ProposedMinMax => "minmax",
            Scheme::ProposedMinSum => "minsum",
            Scheme::AllLocal => "none",
            Scheme::AllOffloadOrth | Scheme::EqualCpu => "equal",
        }
    }

    pub fn proposed(objective: Objective) -> Self {
        match objective {
            Objective::MinMax => Scheme::ProposedMinMax,
            Objective::MinSum => Scheme::ProposedMinSum,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scheme `{s}`"))
    }
}

pub fn run_scheme(planner: &Planner<'_>, scheme: Scheme) -> AllocationOutcome {
    match scheme {
        Scheme::ProposedMinMax => {
            planner
                .propose(CpuPolicy::Optimized(Objective::MinMax))
                .outcome
        }
        Scheme::ProposedMinSum => {
            planner
                .propose(CpuPolicy::Optimized(Objective::MinSum))
                .outcome
        }
        Scheme::AllLocal => planner.run_baseline(Baseline::AllLocal),
        Scheme::AllOffloadOrth => planner.run_baseline(Baseline::AllOffloadOrthogonal),
        Scheme::EqualCpu => planner.run_baseline(Baseline::EqualCpu),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub n_cells: usize,
    pub scheme: Scheme,
    pub lambda: f64,
    pub system_overhead: f64,
    pub n_offload: usize,
    pub mean_rate_bps: f64,
    pub sum_cpu_assigned_hz: f64,
    pub prb_slots_assigned: usize,
    pub wall_time_ms: f64,
}

impl RunRecord {
    pub fn from_outcome(
        config: &ScenarioConfig,
        seed: u64,
        scheme: Scheme,
        outcome: &AllocationOutcome,
        wall_time_ms: f64,
    ) -> Self {
        Self {
            seed,
            n_cells: config.n_cells,
            scheme,
            lambda: config.reuse_lambda,
            system_overhead: outcome.system_overhead,
            n_offload: outcome.num_offloading(),
            mean_rate_bps: outcome.mean_rate(),
            sum_cpu_assigned_hz: outcome.sum_cpu_hz(),
            prb_slots_assigned: outcome.prb_slots(),
            wall_time_ms,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.seed,
            self.n_cells,
            self.scheme.name(),
            num(self.lambda),
            self.scheme.objective_label(),
            num(self.system_overhead),
            self.n_offload,
            num(self.mean_rate_bps),
            num(self.sum_cpu_assigned_hz),
            self.prb_slots_assigned,
            num(self.wall_time_ms),
        )
    }
}

/// Shortest round-trip decimal; infinities as `inf`.
fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v}")
    }
}

/// Builds the scenario for `(config, seed)` and runs one scheme.
///
/// Wall time is only measured when `timing` is set so that default output is
/// reproducible byte for byte.
pub fn run_once(
    config: &ScenarioConfig,
    seed: u64,
    scheme: Scheme,
    timing: bool,
) -> Result<(RunRecord, AllocationOutcome)> {
    let start = Instant::now();
    let scenario = build_scenario(config, seed)?;
    let gains = channel_gains(&scenario)?;
    let planner = Planner::new(&scenario, &gains);
    let outcome = run_scheme(&planner, scheme);
    let wall = if timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    Ok((
        RunRecord::from_outcome(config, seed, scheme, &outcome, wall),
        outcome,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKey {
    Cells,
    Lambda,
    MecGhz,
}

impl FromStr for SweepKey {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "cells" | "n_cells" => Ok(SweepKey::Cells),
            "lambda" | "reuse_lambda" => Ok(SweepKey::Lambda),
            "mec_ghz" => Ok(SweepKey::MecGhz),
            other => Err(format!(
                "cannot sweep over `{other}` (expected cells, lambda or mec_ghz)"
            )),
        }
    }
}

impl SweepKey {
    pub fn apply(&self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut cfg = base.clone();
        match self {
            SweepKey::Cells => {
                if value.fract() != 0.0 || value < 1.0 {
                    return Err(SimError::InvalidConfig(format!(
                        "n_cells must be a positive integer, got {value}"
                    )));
                }
                cfg.n_cells = value as usize;
            }
            SweepKey::Lambda => cfg.reuse_lambda = value,
            SweepKey::MecGhz => cfg.mec_ghz = value,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub key: SweepKey,
    pub values: Vec<f64>,
    pub seeds: Vec<u64>,
    pub schemes: Vec<Scheme>,
}

/// Runs every `(value, seed, scheme)` combination. Rows come back ordered by
/// value (as listed), then seed (as listed), then scheme (as listed),
/// regardless of how the work was scheduled.
pub fn sweep(base: &ScenarioConfig, spec: &SweepSpec, timing: bool) -> Result<Vec<RunRecord>> {
    if spec.values.is_empty() || spec.seeds.is_empty() || spec.schemes.is_empty() {
        return Err(SimError::InvalidConfig(
            "sweep needs at least one value, seed and scheme".into(),
        ));
    }
    let configs = spec
        .values
        .iter()
        .map(|&v| spec.key.apply(base, v))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(&ScenarioConfig, u64)> = configs
        .iter()
        .flat_map(|cfg| spec.seeds.iter().map(move |&seed| (cfg, seed)))
        .collect();
    let per_job: Vec<Vec<RunRecord>> = jobs
        .par_iter()
        .map(|&(cfg, seed)| {
            let scenario = build_scenario(cfg, seed)?;
            let gains = channel_gains(&scenario)?;
            let planner = Planner::new(&scenario, &gains);
            Ok(spec
                .schemes
                .iter()
                .map(|&scheme| {
                    let start = Instant::now();
                    let outcome = run_scheme(&planner, scheme);
                    let wall = if timing {
                        start.elapsed().as_secs_f64() * 1e3
                    } else {
                        0.0
                    };
                    RunRecord::from_outcome(cfg, seed, scheme, &outcome, wall)
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_job.into_iter().flatten().collect())
}

pub fn write_csv<W: Write>(out: &mut W, records: &[RunRecord]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Per-cell PRB list, one line per cell: `cell,prb_count,prbs` with the PRB
/// indices separated by spaces. Local cells have an empty list.
pub fn prb_dump(c: &PrbAssociation) -> String {
    let mut s = String::from("cell,prb_count,prbs\n");
    for n in 0..c.num_cells() {
        let colors: Vec<String> = c.colors(n).iter().map(usize::to_string).collect();
        let _ = writeln!(s, "{n},{},{}", colors.len(), colors.join(" "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("proposed".parse::<Scheme>().is_err());
    }

    #[test]
    fn csv_formatting() {
        let r = RunRecord {
            seed: 3,
            n_cells: 9,
            scheme: Scheme::AllLocal,
            lambda: 2.0,
            system_overhead: f64::INFINITY,
            n_offload: 0,
            mean_rate_bps: 0.0,
            sum_cpu_assigned_hz: 0.0,
            prb_slots_assigned: 0,
            wall_time_ms: 0.0,
        };
        assert_eq!(r.csv_row(), "3,9,all_local,2,none,inf,0,0,0,0,0");
        assert_eq!(
            CSV_HEADER.split(',').count(),
            r.csv_row().split(',').count()
        );
    }

    #[test]
    fn sweep_row_count_and_order() {
        let spec = SweepSpec {
            key: SweepKey::Cells,
            values: vec![3.0, 2.0],
            seeds: vec![5, 1],
            schemes: vec![Scheme::AllLocal, Scheme::ProposedMinSum],
        };
        let rows = sweep(&ScenarioConfig::default(), &spec, false).unwrap();
        assert_eq!(rows.len(), 8);
        let keys: Vec<(usize, u64, Scheme)> =
            rows.iter().map(|r| (r.n_cells, r.seed, r.scheme)).collect();
        assert_eq!(keys[0], (3, 5, Scheme::AllLocal));
        assert_eq!(keys[1], (3, 5, Scheme::ProposedMinSum));
        assert_eq!(keys[2], (3, 1, Scheme::AllLocal));
        assert_eq!(keys[4], (2, 5, Scheme::AllLocal));
    }

    #[test]
    fn sweep_rejects_bad_inputs() {
        let mut spec = SweepSpec {
            key: SweepKey::Cells,
            values: vec![3.0],
            seeds: vec![],
            schemes: Scheme::ALL.to_vec(),
        };
        assert!(sweep(&ScenarioConfig::default(), &spec, false).is_err());
        spec.seeds = vec![0];
        spec.values = vec![2.5];
        assert!(sweep(&ScenarioConfig::default(), &spec, false).is_err());
    }

    #[test]
    fn sweep_rows_replay_as_single_runs() {
        let spec = SweepSpec {
            key: SweepKey::Lambda,
            values: vec![1.0, 3.0],
            seeds: vec![7],
            schemes: Scheme::ALL.to_vec(),
        };
        let base = ScenarioConfig {
            n_cells: 5,
            ..Default::default()
        };
        for row in sweep(&base, &spec, false).unwrap() {
            let cfg = SweepKey::Lambda.apply(&base, row.lambda).unwrap();
            let (single, _) = run_once(&cfg, row.seed, row.scheme, false).unwrap();
            assert_eq!(single, row);
        }
    }

    #[test]
    fn dump_lists_colors() {
        let c = PrbAssociation::from_rows(&[vec![true, false, true], vec![false, false, false]]);
        assert_eq!(prb_dump(&c), "cell,prb_count,prbs\n0,2,0 2\n1,0,\n");
    }
}
