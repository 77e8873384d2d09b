//! Uplink rates and interference bookkeeping.

use crate::error::{Result, SimError};
use crate::scenario::{ChannelGains, RadioParams};

/// Binary offloading profile, `true` means the UE ships its task to the server.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OffloadDecision(Vec<bool>);

impl OffloadDecision {
    pub fn new(flags: Vec<bool>) -> Self {
        Self(flags)
    }

    pub fn all_local(n: usize) -> Self {
        Self(vec![false; n])
    }

    pub fn all_offload(n: usize) -> Self {
        Self(vec![true; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_offloading(&self, n: usize) -> bool {
        self.0[n]
    }

    pub fn set(&mut self, n: usize, offload: bool) {
        self.0[n] = offload;
    }

    pub fn flags(&self) -> &[bool] {
        &self.0
    }

    pub fn offload_set(&self) -> Vec<usize> {
        (0..self.len()).filter(|&n| self.0[n]).collect()
    }

    pub fn local_set(&self) -> Vec<usize> {
        (0..self.len()).filter(|&n| !self.0[n]).collect()
    }

    pub fn num_offloading(&self) -> usize {
        self.0.iter().filter(|&&a| a).count()
    }

    pub fn all_ones(&self) -> bool {
        self.0.iter().all(|&a| a)
    }
}

/// `N x K` binary PRB association table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrbAssociation {
    cells: usize,
    prbs: usize,
    c: Vec<bool>,
}

impl PrbAssociation {
    pub fn zeros(cells: usize, prbs: usize) -> Self {
        Self {
            cells,
            prbs,
            c: vec![false; cells * prbs],
        }
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Self {
        let cells = rows.len();
        let prbs = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|r| r.len() == prbs),
            "ragged association table"
        );
        Self {
            cells,
            prbs,
            c: rows.concat(),
        }
    }

    pub fn num_cells(&self) -> usize {
        self.cells
    }

    pub fn num_prbs(&self) -> usize {
        self.prbs
    }

    #[inline]
    pub fn get(&self, n: usize, k: usize) -> bool {
        self.c[n * self.prbs + k]
    }

    pub fn set(&mut self, n: usize, k: usize, on: bool) {
        self.c[n * self.prbs + k] = on;
    }

    pub fn row(&self, n: usize) -> &[bool] {
        &self.c[n * self.prbs..(n + 1) * self.prbs]
    }

    /// PRB indices held by cell `n`, ascending.
    pub fn colors(&self, n: usize) -> Vec<usize> {
        (0..self.prbs).filter(|&k| self.get(n, k)).collect()
    }

    /// `M_n`, the number of PRBs held by cell `n`.
    pub fn count(&self, n: usize) -> usize {
        self.row(n).iter().filter(|&&b| b).count()
    }

    pub fn counts(&self) -> Vec<usize> {
        (0..self.cells).map(|n| self.count(n)).collect()
    }

    pub fn total_assigned(&self) -> usize {
        self.c.iter().filter(|&&b| b).count()
    }

    pub fn is_all_zero(&self) -> bool {
        !self.c.iter().any(|&b| b)
    }
}

/// `N x K` aggregate received interference (Watt) per SeNB and PRB.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceTable {
    cells: usize,
    prbs: usize,
    o: Vec<f64>,
}

impl InterferenceTable {
    pub fn zeros(cells: usize, prbs: usize) -> Self {
        Self {
            cells,
            prbs,
            o: vec![0.0; cells * prbs],
        }
    }

    pub fn num_cells(&self) -> usize {
        self.cells
    }

    pub fn num_prbs(&self) -> usize {
        self.prbs
    }

    #[inline]
    pub fn get(&self, n: usize, k: usize) -> f64 {
        self.o[n * self.prbs + k]
    }

    pub fn add(&mut self, n: usize, k: usize, w: f64) {
        self.o[n * self.prbs + k] += w;
    }

    pub fn values(&self) -> &[f64] {
        &self.o
    }

    /// Largest entrywise relative deviation from `other` (absolute where both are zero).
    pub fn max_relative_error(&self, other: &InterferenceTable) -> f64 {
        assert_eq!((self.cells, self.prbs), (other.cells, other.prbs));
        self.o
            .iter()
            .zip(&other.o)
            .map(|(&a, &b)| {
                let scale = a.abs().max(b.abs());
                if scale == 0.0 {
                    0.0
                } else {
                    (a - b).abs() / scale
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Per-PRB transmit power of a cell holding `m` PRBs.
#[inline]
pub fn per_prb_power(tx_power_w: f64, m: usize) -> f64 {
    tx_power_w / m as f64
}

/// Uplink rate of UE `n` for profile `a` and association `c`.
///
/// Transmit power is split evenly over the UE's PRBs and each PRB sees the
/// co-channel interference of every other offloading UE holding it.
pub fn uplink_rate(
    n: usize,
    a: &OffloadDecision,
    c: &PrbAssociation,
    gains: &ChannelGains,
    powers: &[f64],
    radio: &RadioParams,
) -> Result<f64> {
    check_consistent(a, c)?;
    if !a.is_offloading(n) {
        return Ok(0.0);
    }
    let counts = c.counts();
    let signal = per_prb_power(powers[n], counts[n]) * gains.serving(n);
    let mut rate = 0.0;
    for k in 0..c.num_prbs() {
        if !c.get(n, k) {
            continue;
        }
        let interference: f64 = (0..c.num_cells())
            .filter(|&m| m != n && a.is_offloading(m) && c.get(m, k))
            .map(|m| per_prb_power(powers[m], counts[m]) * gains.get(m, n))
            .sum();
        rate += radio.prb_rate(signal, interference);
    }
    Ok(rate)
}

fn check_consistent(a: &OffloadDecision, c: &PrbAssociation) -> Result<()> {
    if a.len() != c.num_cells() {
        return Err(SimError::InconsistentTables(format!(
            "decision has {} entries but table has {} rows",
            a.len(),
            c.num_cells()
        )));
    }
    for n in 0..a.len() {
        let held = c.count(n);
        match (a.is_offloading(n), held) {
            (false, h) if h > 0 => {
                return Err(SimError::InconsistentTables(format!(
                    "local UE {n} holds {h} PRBs"
                )));
            }
            (true, 0) => {
                return Err(SimError::InconsistentTables(format!(
                    "offloading UE {n} holds no PRB"
                )));
            }
            _ => {}
        }
    }
    Ok(())
}

/// Interference table recomputed from scratch from `c`.
///
/// Every nonzero row of `c` is treated as an offloading cell.
pub fn interference_table(
    c: &PrbAssociation,
    gains: &ChannelGains,
    powers: &[f64],
) -> InterferenceTable {
    let cells = c.num_cells();
    let prbs = c.num_prbs();
    let counts = c.counts();
    let mut o = InterferenceTable::zeros(cells, prbs);
    for m in 0..cells {
        if counts[m] == 0 {
            continue;
        }
        let p = per_prb_power(powers[m], counts[m]);
        for k in 0..prbs {
            if !c.get(m, k) {
                continue;
            }
            for n in 0..cells {
                if n != m {
                    o.add(n, k, p * gains.get(m, n));
                }
            }
        }
    }
    o
}
