//! Flat key-value scenario configuration.
//!
//! Files are TOML with one key per parameter; every key is optional and
//! missing keys fall back to the defaults below. Unknown keys
//! are rejected so typos surface as config errors instead of silent defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_cells: usize,
    /// Side of the square deployment area.
    pub area_m: f64,
    /// UEs are dropped uniformly in a disk of this radius around their SeNB.
    pub ue_radius_m: f64,
    pub bandwidth_hz: f64,
    pub num_prbs: usize,
    /// Noise power per PRB.
    pub noise_dbm: f64,
    pub tx_power_mw: f64,
    pub input_kb: f64,
    /// Bytes per "KB" when converting `input_kb` to bits (1024 or 1000).
    pub kb_bytes: f64,
    pub task_megacycles: f64,
    pub local_ghz: f64,
    pub mec_ghz: f64,
    pub gamma_t: f64,
    pub gamma_e: f64,
    /// Energy per CPU cycle. When absent it is derived as 1e-11 * (local GHz)^2.
    pub energy_coeff_j_per_cycle: Option<f64>,
    pub reuse_lambda: f64,
    /// Linear gain-ratio threshold for interference-graph edges.
    pub edge_threshold: f64,
    pub pl0_db: f64,
    pub pl_exponent: f64,
    /// Log-normal shadowing standard deviation; 0 disables it.
    pub shadowing_db: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_cells: 9,
            area_m: 120.0,
            ue_radius_m: 20.0,
            bandwidth_hz: 20e6,
            num_prbs: 100,
            noise_dbm: -100.0,
            tx_power_mw: 100.0,
            input_kb: 420.0,
            kb_bytes: 1024.0,
            task_megacycles: 1000.0,
            local_ghz: 0.7,
            mec_ghz: 100.0,
            gamma_t: 0.5,
            gamma_e: 0.5,
            energy_coeff_j_per_cycle: None,
            reuse_lambda: 2.0,
            edge_threshold: 0.1,
            pl0_db: 30.0,
            pl_exponent: 3.7,
            shadowing_db: 0.0,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::InvalidConfig(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(SimError::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        }
        if self.n_cells == 0 {
            return Err(SimError::InvalidConfig("n_cells must be at least 1".into()));
        }
        if self.num_prbs == 0 {
            return Err(SimError::InvalidConfig(
                "num_prbs must be at least 1".into(),
            ));
        }
        positive("area_m", self.area_m)?;
        positive("ue_radius_m", self.ue_radius_m)?;
        positive("bandwidth_hz", self.bandwidth_hz)?;
        positive("tx_power_mw", self.tx_power_mw)?;
        positive("input_kb", self.input_kb)?;
        positive("kb_bytes", self.kb_bytes)?;
        positive("task_megacycles", self.task_megacycles)?;
        positive("local_ghz", self.local_ghz)?;
        positive("mec_ghz", self.mec_ghz)?;
        positive("edge_threshold", self.edge_threshold)?;
        positive("pl_exponent", self.pl_exponent)?;
        if let Some(v) = self.energy_coeff_j_per_cycle {
            positive("energy_coeff_j_per_cycle", v)?;
        }
        if !self.noise_dbm.is_finite() || !self.pl0_db.is_finite() {
            return Err(SimError::InvalidConfig(
                "noise_dbm and pl0_db must be finite".into(),
            ));
        }
        for (name, g) in [("gamma_t", self.gamma_t), ("gamma_e", self.gamma_e)] {
            if !(0.0..=1.0).contains(&g) {
                return Err(SimError::InvalidConfig(format!(
                    "{name} must lie in [0, 1], got {g}"
                )));
            }
        }
        if !(self.reuse_lambda.is_finite() && self.reuse_lambda >= 1.0) {
            return Err(SimError::InvalidConfig(format!(
                "reuse_lambda must be >= 1, got {}",
                self.reuse_lambda
            )));
        }
        if !(self.shadowing_db.is_finite() && self.shadowing_db >= 0.0) {
            return Err(SimError::InvalidConfig("shadowing_db must be >= 0".into()));
        }
        Ok(())
    }

    pub fn noise_per_prb_w(&self) -> f64 {
        dbm_to_watt(self.noise_dbm)
    }

    pub fn input_bits(&self) -> f64 {
        self.input_kb * self.kb_bytes * 8.0
    }

    pub fn energy_coeff(&self) -> f64 {
        self.energy_coeff_j_per_cycle
            .unwrap_or(1e-11 * self.local_ghz * self.local_ghz)
    }
}

pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}
