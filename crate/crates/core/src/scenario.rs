//! Network topology, tasks and channel gains.
//!
//! A [`Scenario`] is a pure function of a [`ScenarioConfig`] and a seed: SeNB
//! positions are i.i.d. uniform over the square deployment area and each UE is
//! dropped uniformly inside an annulus `[1 m, ue_radius_m]` around its SeNB.
//! Gains follow a log-distance path-loss law with optional log-normal
//! shadowing drawn from a second stream of the same seeded generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Result, SimError};

/// Distances are clamped to this value before path loss is evaluated.
pub const MIN_DISTANCE_M: f64 = 1.0;

const TOPOLOGY_STREAM: u64 = 0;
const SHADOWING_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    pub bandwidth_hz: f64,
    pub num_prbs: usize,
    pub noise_per_prb_w: f64,
}

impl RadioParams {
    pub fn prb_bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz / self.num_prbs as f64
    }

    /// Shannon rate of a single PRB at the given received power and interference.
    pub fn prb_rate(&self, received_w: f64, interference_w: f64) -> f64 {
        self.prb_bandwidth_hz()
            * (1.0 + received_w / (self.noise_per_prb_w + interference_w)).log2()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub input_bits: f64,
    pub cycles: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ue {
    pub id: usize,
    pub position: Position,
    pub tx_power_w: f64,
    pub task: Task,
    pub local_speed_hz: f64,
    pub weight_time: f64,
    pub weight_energy: f64,
    pub energy_coeff_j_per_cycle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallCell {
    pub id: usize,
    pub position: Position,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLoss {
    pub pl0_db: f64,
    pub exponent: f64,
    pub shadowing_db: f64,
}

impl PathLoss {
    /// Mean path loss in dB at distance `d` (meters), 1 m reference.
    pub fn loss_db(&self, d: f64) -> f64 {
        self.pl0_db + 10.0 * self.exponent * d.max(MIN_DISTANCE_M).log10()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub cells: Vec<SmallCell>,
    /// `ues[i]` is served by `cells[i]`.
    pub ues: Vec<Ue>,
    pub radio: RadioParams,
    pub mec_capacity_hz: f64,
    pub reuse_lambda: f64,
    pub edge_threshold: f64,
    pub path_loss: PathLoss,
    pub seed: u64,
    pub area_m: f64,
}

impl Scenario {
    pub fn len(&self) -> usize {
        self.ues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ues.is_empty()
    }

    pub fn tx_powers(&self) -> Vec<f64> {
        self.ues.iter().map(|u| u.tx_power_w).collect()
    }
}

/// Linear power gains, `get(m, n)` is the gain from UE `m` to SeNB `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGains {
    n: usize,
    h: Vec<f64>,
}

impl ChannelGains {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut h = Vec::with_capacity(n * n);
        for m in 0..n {
            for k in 0..n {
                h.push(f(m, k));
            }
        }
        Self { n, h }
    }

    /// Row-major `rows[m][n]`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(
            rows.iter().all(|r| r.len() == n),
            "gain matrix must be square"
        );
        Self::from_fn(n, |m, k| rows[m][k])
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, from_ue: usize, to_cell: usize) -> f64 {
        self.h[from_ue * self.n + to_cell]
    }

    pub fn serving(&self, n: usize) -> f64 {
        self.get(n, n)
    }
}

pub fn build_scenario(config: &ScenarioConfig, seed: u64) -> Result<Scenario> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(TOPOLOGY_STREAM);

    let n = config.n_cells;
    let area = config.area_m;
    let radius = config.ue_radius_m.max(MIN_DISTANCE_M);

    let mut cells = Vec::with_capacity(n);
    let mut ues = Vec::with_capacity(n);
    for id in 0..n {
        let cell_pos = Position {
            x: rng.random_range(0.0..=area),
            y: rng.random_range(0.0..=area),
        };
        // Uniform over the annulus: r^2 is uniform on [r_min^2, r_max^2].
        let r2_min = MIN_DISTANCE_M * MIN_DISTANCE_M;
        let r2 = r2_min + rng.random::<f64>() * (radius * radius - r2_min);
        let r = r2.sqrt();
        let angle = rng.random::<f64>() * std::f64::consts::TAU;
        let ue_pos = Position {
            x: cell_pos.x + r * angle.cos(),
            y: cell_pos.y + r * angle.sin(),
        };
        cells.push(SmallCell {
            id,
            position: cell_pos,
        });
        ues.push(Ue {
            id,
            position: ue_pos,
            tx_power_w: config.tx_power_mw * 1e-3,
            task: Task {
                input_bits: config.input_bits(),
                cycles: config.task_megacycles * 1e6,
            },
            local_speed_hz: config.local_ghz * 1e9,
            weight_time: config.gamma_t,
            weight_energy: config.gamma_e,
            energy_coeff_j_per_cycle: config.energy_coeff(),
        });
    }

    Ok(Scenario {
        cells,
        ues,
        radio: RadioParams {
            bandwidth_hz: config.bandwidth_hz,
            num_prbs: config.num_prbs,
            noise_per_prb_w: config.noise_per_prb_w(),
        },
        mec_capacity_hz: config.mec_ghz * 1e9,
        reuse_lambda: config.reuse_lambda,
        edge_threshold: config.edge_threshold,
        path_loss: PathLoss {
            pl0_db: config.pl0_db,
            exponent: config.pl_exponent,
            shadowing_db: config.shadowing_db,
        },
        seed,
        area_m: area,
    })
}

pub fn channel_gains(s: &Scenario) -> Result<ChannelGains> {
    if s.cells.len() != s.ues.len() || s.is_empty() {
        return Err(SimError::InvalidConfig(
            "scenario needs one UE per cell and at least one cell".into(),
        ));
    }
    let n = s.len();
    let shadow = if s.path_loss.shadowing_db > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
        rng.set_stream(SHADOWING_STREAM);
        let normal = Normal::new(0.0, s.path_loss.shadowing_db)
            .map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        (0..n * n).map(|_| normal.sample(&mut rng)).collect()
    } else {
        vec![0.0; n * n]
    };
    Ok(ChannelGains::from_fn(n, |m, k| {
        let d = s.ues[m].position.distance(&s.cells[k].position);
        let loss = s.path_loss.loss_db(d) + shadow[m * n + k];
        10f64.powf(-loss / 10.0)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gains_for(s: &Scenario) -> ChannelGains {
        channel_gains(s).unwrap()
    }

    #[test]
    fn table_one_defaults_nine_cells() {
        let s = build_scenario(&ScenarioConfig::default(), 42).unwrap();
        assert_eq!(s.cells.len(), 9);
        assert_eq!(s.ues.len(), 9);
        for c in &s.cells {
            assert!((0.0..=120.0).contains(&c.position.x));
            assert!((0.0..=120.0).contains(&c.position.y));
        }
        for (u, c) in s.ues.iter().zip(&s.cells) {
            let d = u.position.distance(&c.position);
            assert!(
                (MIN_DISTANCE_M - 1e-9..=20.0 + 1e-9).contains(&d),
                "d = {d}"
            );
        }
    }

    #[test]
    fn single_cell() {
        let cfg = ScenarioConfig {
            n_cells: 1,
            ..Default::default()
        };
        let s = build_scenario(&cfg, 7).unwrap();
        assert_eq!(s.len(), 1);
        let g = gains_for(&s);
        assert_eq!(g.len(), 1);
        assert!(g.serving(0) > 0.0);
    }

    #[test]
    fn determinism_and_seed_sensitivity() {
        let cfg = ScenarioConfig::default();
        let a = build_scenario(&cfg, 1).unwrap();
        let b = build_scenario(&cfg, 1).unwrap();
        let c = build_scenario(&cfg, 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        assert_ne!(a.cells[0].position, c.cells[0].position);
    }

    #[test]
    fn rejects_invalid_config() {
        let cfg = ScenarioConfig {
            n_cells: 0,
            ..Default::default()
        };
        assert!(matches!(
            build_scenario(&cfg, 0),
            Err(SimError::InvalidConfig(_))
        ));
        let cfg = ScenarioConfig {
            bandwidth_hz: 0.0,
            ..Default::default()
        };
        assert!(build_scenario(&cfg, 0).is_err());
    }

    #[test]
    fn path_loss_reference_points() {
        let pl = PathLoss {
            pl0_db: 30.0,
            exponent: 3.7,
            shadowing_db: 0.0,
        };
        assert_eq!(pl.loss_db(1.0), 30.0);
        assert_eq!(pl.loss_db(0.2), 30.0);
        let h1 = 10f64.powf(-pl.loss_db(1.0) / 10.0);
        assert!((h1 - 1e-3).abs() < 1e-18);
        // 30 + 37 * log10(100) = 104 dB
        let h100 = 10f64.powf(-pl.loss_db(100.0) / 10.0);
        assert!((h100 / 10f64.powf(-10.4) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gains_symmetric_for_mirrored_positions() {
        let cfg = ScenarioConfig {
            n_cells: 2,
            ..Default::default()
        };
        let mut s = build_scenario(&cfg, 3).unwrap();
        // UE 0 at cell 1's spot and vice versa makes d(0->1) = d(1->0).
        s.cells[0].position = Position { x: 10.0, y: 10.0 };
        s.cells[1].position = Position { x: 60.0, y: 40.0 };
        s.ues[0].position = Position { x: 15.0, y: 10.0 };
        s.ues[1].position = Position { x: 55.0, y: 40.0 };
        let g = gains_for(&s);
        let d01 = s.ues[0].position.distance(&s.cells[1].position);
        let d10 = s.ues[1].position.distance(&s.cells[0].position);
        assert!((d01 - d10).abs() < 1e-12);
        assert!((g.get(0, 1) / g.get(1, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shadowing_is_seeded() {
        let cfg = ScenarioConfig {
            shadowing_db: 8.0,
            ..Default::default()
        };
        let s = build_scenario(&cfg, 11).unwrap();
        let g1 = gains_for(&s);
        let g2 = gains_for(&s);
        assert_eq!(g1, g2);
        let plain = gains_for(&build_scenario(&ScenarioConfig::default(), 11).unwrap());
        assert_ne!(g1, plain);
        for m in 0..g1.len() {
            for n in 0..g1.len() {
                assert!(g1.get(m, n).is_finite() && g1.get(m, n) > 0.0);
            }
        }
    }

    #[test]
    fn serving_link_usually_strongest() {
        let cfg = ScenarioConfig::default();
        let mut hits = 0;
        let mut total = 0;
        for seed in 0..100 {
            let s = build_scenario(&cfg, seed).unwrap();
            let g = gains_for(&s);
            for i in 0..g.len() {
                let col_max = (0..g.len()).map(|m| g.get(m, i)).fold(0.0, f64::max);
                if g.serving(i) == col_max {
                    hits += 1;
                }
                total += 1;
            }
        }
        // Uniform 9-cell drops in 120 m put the serving UE on top about 75% of the time.
        assert!(hits as f64 >= 0.7 * total as f64, "{hits}/{total}");
    }
}
