//! System-level simulator for joint computation offloading and uplink
//! interference management in a small-cell network with one edge server.
//!
//! The modules follow the processing chain:
//!
//! - [`scenario`]: seeded topology, tasks and channel gains
//! - [`radio`]: uplink rates, PRB association and interference tables
//! - [`compute_model`]: local and offloading overheads
//! - [`load_estimation`]: per-UE rate requirement and PRB demand
//! - [`prb_coloring`]: PRB targets with reuse and the graph-coloring allocator
//! - [`cpu_allocation`]: min-max and min-sum server CPU splits
//! - [`decision_engine`]: initial decision, greedy reallocation, baselines
//! - [`experiment`]: seeded runs, sweeps and CSV output

pub mod compute_model;
pub mod config;
pub mod cpu_allocation;
pub mod decision_engine;
pub mod error;
pub mod experiment;
pub mod load_estimation;
pub mod prb_coloring;
pub mod radio;
pub mod scenario;

pub use config::ScenarioConfig;
pub use cpu_allocation::Objective;
pub use decision_engine::{AllocationOutcome, Baseline, CpuPolicy, Planner};
pub use error::{Result, SimError};
pub use experiment::{RunRecord, Scheme};
pub use scenario::{build_scenario, channel_gains, ChannelGains, Scenario};
