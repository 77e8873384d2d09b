//! PRB allocation by weighted graph coloring.
//!
//! One color is one PRB. Offloading cells are colored one at a time, most
//! interfered first; each cell takes the `M_n` colors that maximize the
//! network sum rate given the colors already placed. Colors held by other
//! cells stay eligible, which is how frequency reuse happens.

use crate::error::{Result, SimError};
use crate::radio::{per_prb_power, InterferenceTable, PrbAssociation};
use crate::scenario::{ChannelGains, RadioParams};

/// Per-cell PRB targets with frequency reuse.
///
/// Returns a length-`w.len()` vector, zero outside `offload_set`.
pub fn normalize_prbs(
    w: &[usize],
    offload_set: &[usize],
    k: usize,
    lambda: f64,
) -> Result<Vec<usize>> {
    if offload_set.is_empty() {
        return Err(SimError::EmptyOffloadSet);
    }
    let total: usize = offload_set.iter().map(|&n| w[n]).sum();
    let mut m = vec![0; w.len()];
    for &n in offload_set {
        let share = k as f64 * w[n] as f64 / total as f64;
        let scaled = (lambda * share).round_ties_even();
        m[n] = (scaled as usize).min(k).max(1);
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    /// Interference power the `from` UE puts on one PRB at the `to` SeNB.
    pub weight: f64,
}

/// Directed interference graph over the offloading cells.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceGraph {
    pub nodes: Vec<usize>,
    pub edges: Vec<Edge>,
}

impl InterferenceGraph {
    /// Sum of ingoing edge weights of `n`.
    pub fn in_weight(&self, n: usize) -> f64 {
        self.edges
            .iter()
            .filter(|e| e.to == n)
            .map(|e| e.weight)
            .sum()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.iter().any(|e| e.from == from && e.to == to)
    }
}

pub fn build_interference_graph(
    gains: &ChannelGains,
    m: &[usize],
    powers: &[f64],
    offload_set: &[usize],
    theta: f64,
) -> InterferenceGraph {
    let mut edges = Vec::new();
    for &to in offload_set {
        for &from in offload_set {
            if from == to {
                continue;
            }
            if gains.get(from, to) / gains.serving(to) > theta {
                edges.push(Edge {
                    from,
                    to,
                    weight: per_prb_power(powers[from], m[from]) * gains.get(from, to),
                });
            }
        }
    }
    InterferenceGraph {
        nodes: offload_set.to_vec(),
        edges,
    }
}

/// One iteration of the colorer: which cell was colored and with which PRBs.
#[derive(Debug, Clone, PartialEq)]
pub struct ColoringStep {
    pub node: usize,
    pub colors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColoringState {
    pub c: PrbAssociation,
    pub o: InterferenceTable,
    /// Cells still waiting for colors, in graph node order.
    pub uncolored: Vec<usize>,
    /// Steps in the order they were taken.
    pub steps: Vec<ColoringStep>,
}

impl ColoringState {
    pub fn color_set(&self, n: usize) -> Vec<usize> {
        self.c.colors(n)
    }
}

/// Picks the next cell: largest ingoing weight, then smallest `M_n`, then lowest index.
fn most_interfered(uncolored: &[usize], in_weight: &[f64], m: &[usize]) -> usize {
    let mut best = uncolored[0];
    for &n in &uncolored[1..] {
        let better = match in_weight[n].total_cmp(&in_weight[best]) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => (m[n], n) < (m[best], best),
        };
        if better {
            best = n;
        }
    }
    best
}

/// Indices of the `count` largest scores; ties go to the lower index.
pub fn top_indices(scores: &[f64], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(count);
    order.sort_unstable();
    order
}

/// Incremental colorer; [`color`] drives it to completion.
#[derive(Debug, Clone)]
pub struct Colorer<'a> {
    graph: &'a InterferenceGraph,
    m: &'a [usize],
    gains: &'a ChannelGains,
    powers: &'a [f64],
    radio: &'a RadioParams,
    in_weight: Vec<f64>,
    state: ColoringState,
}

impl<'a> Colorer<'a> {
    /// `m` holds the PRB target of every cell (indexed by cell id); only the
    /// graph's nodes are colored. Tables span all `gains.len()` cells.
    pub fn new(
        graph: &'a InterferenceGraph,
        m: &'a [usize],
        gains: &'a ChannelGains,
        powers: &'a [f64],
        radio: &'a RadioParams,
    ) -> Self {
        let cells = gains.len();
        let k = radio.num_prbs;
        let mut in_weight = vec![0.0; cells];
        for e in &graph.edges {
            in_weight[e.to] += e.weight;
        }
        let state = ColoringState {
            c: PrbAssociation::zeros(cells, k),
            o: InterferenceTable::zeros(cells, k),
            uncolored: graph.nodes.clone(),
            steps: Vec::with_capacity(graph.nodes.len()),
        };
        Self {
            graph,
            m,
            gains,
            powers,
            radio,
            in_weight,
            state,
        }
    }

    pub fn state(&self) -> &ColoringState {
        &self.state
    }

    /// Ordering key of a node: summed weight of its ingoing graph edges.
    pub fn in_weight(&self, n: usize) -> f64 {
        self.in_weight[n]
    }

    /// Sum-rate change from handing color `j` to `target` on top of the current tables.
    ///
    /// The hypothetical network sum rate is this value plus the current sum
    /// rate, a constant across `j`, so both rank colors identically.
    pub fn color_gain(&self, j: usize, target: usize) -> f64 {
        let (m, gains, radio, st) = (self.m, self.gains, self.radio, &self.state);
        let target_power = per_prb_power(self.powers[target], m[target]);
        let mut gain = radio.prb_rate(target_power * gains.serving(target), st.o.get(target, j));
        for &n in &self.graph.nodes {
            if n == target || !st.c.get(n, j) {
                continue;
            }
            let signal = per_prb_power(self.powers[n], m[n]) * gains.serving(n);
            let now = st.o.get(n, j);
            let extra = target_power * gains.get(target, n);
            gain += radio.prb_rate(signal, now + extra) - radio.prb_rate(signal, now);
        }
        gain
    }

    /// Colors the next node, or returns `None` once every node is colored.
    pub fn step(&mut self) -> Option<&ColoringStep> {
        if self.state.uncolored.is_empty() {
            return None;
        }
        let target = most_interfered(&self.state.uncolored, &self.in_weight, self.m);
        let scores: Vec<f64> = (0..self.radio.num_prbs)
            .map(|j| self.color_gain(j, target))
            .collect();
        let chosen = top_indices(&scores, self.m[target]);

        let p = per_prb_power(self.powers[target], self.m[target]);
        let st = &mut self.state;
        for &j in &chosen {
            st.c.set(target, j, true);
            for n in (0..self.gains.len()).filter(|&n| n != target) {
                st.o.add(n, j, p * self.gains.get(target, n));
            }
        }
        st.uncolored.retain(|&n| n != target);
        st.steps.push(ColoringStep {
            node: target,
            colors: chosen,
        });
        st.steps.last()
    }

    pub fn finish(mut self) -> ColoringState {
        while self.step().is_some() {}
        self.state
    }
}

/// Runs the greedy colorer to completion.
pub fn color(
    graph: &InterferenceGraph,
    m: &[usize],
    gains: &ChannelGains,
    powers: &[f64],
    radio: &RadioParams,
) -> ColoringState {
    Colorer::new(graph, m, gains, powers, radio).finish()
}

/// Achieved uplink rate of each cell under the final association table.
///
/// Cells without PRBs get rate 0. `m` must match the table's row sums.
pub fn realized_rates(
    state: &ColoringState,
    m: &[usize],
    gains: &ChannelGains,
    powers: &[f64],
    radio: &RadioParams,
) -> Vec<f64> {
    association_rates(&state.c, m, gains, powers, radio)
}

/// Per-cell rate for any association table whose nonzero rows are the offloaders.
pub fn association_rates(
    c: &PrbAssociation,
    m: &[usize],
    gains: &ChannelGains,
    powers: &[f64],
    radio: &RadioParams,
) -> Vec<f64> {
    (0..c.num_cells())
        .map(|n| {
            if m[n] == 0 {
                return 0.0;
            }
            let signal = per_prb_power(powers[n], m[n]) * gains.serving(n);
            c.colors(n)
                .into_iter()
                .map(|j| {
                    let interference: f64 = (0..c.num_cells())
                        .filter(|&q| q != n && c.get(q, j))
                        .map(|q| per_prb_power(powers[q], m[q]) * gains.get(q, n))
                        .sum();
                    radio.prb_rate(signal, interference)
                })
                .sum()
        })
        .collect()
}
