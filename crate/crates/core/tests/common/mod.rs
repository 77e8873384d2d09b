//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use mecsim::cpu_allocation::CpuRequest;
use mecsim::radio::PrbAssociation;
use mecsim::scenario::{ChannelGains, RadioParams};

/// Smallest `w` in `1..=K` meeting the rate target by linear scan.
pub fn scan_min_prbs(snr_total: f64, radio: &RadioParams, target: f64) -> Option<usize> {
    let per = radio.bandwidth_hz / radio.num_prbs as f64;
    (1..=radio.num_prbs).find(|&w| {
        let wf = w as f64;
        wf * per * (1.0 + snr_total / wf).log2() >= target
    })
}

/// Minimizes `objective` over CPU splits `F_n = L_n + x_n (F - sum L)` with
/// `x` on the unit simplex, by grid search refined around the incumbent.
///
/// Lower bounds sit on grid lines (`x_n = 0`), so binding caps are hit exactly.
pub fn grid_search_cpu(
    requests: &[CpuRequest],
    capacity: f64,
    objective: impl Fn(&[f64]) -> f64,
) -> (f64, Vec<f64>) {
    let n = requests.len();
    let lower: Vec<f64> = requests.iter().map(|r| r.cycles / r.t_cap_s).collect();
    let spare = capacity - lower.iter().sum::<f64>();
    let shares = |x: &[f64]| -> Vec<f64> { (0..n).map(|i| lower[i] + x[i] * spare).collect() };
    let eval = |x: &[f64]| objective(&shares(x));

    if n == 1 {
        return (eval(&[1.0]), shares(&[1.0]));
    }

    // Coarse pass: every composition of `steps` into n parts.
    let steps = 40usize;
    let mut best_x = vec![1.0 / n as f64; n];
    let mut best = eval(&best_x);
    let mut parts = vec![0usize; n];
    loop {
        let used: usize = parts[..n - 1].iter().sum();
        if used <= steps {
            parts[n - 1] = steps - used;
            let x: Vec<f64> = parts.iter().map(|&p| p as f64 / steps as f64).collect();
            let v = eval(&x);
            if v < best {
                best = v;
                best_x = x;
            }
        }
        // odometer over the first n-1 coordinates
        let mut i = 0;
        loop {
            if i == n - 1 {
                return refine(n, best, best_x, 1.0 / steps as f64, &eval, &shares);
            }
            parts[i] += 1;
            if parts[i] <= steps {
                break;
            }
            parts[i] = 0;
            i += 1;
        }
    }
}

fn refine(
    n: usize,
    mut best: f64,
    mut best_x: Vec<f64>,
    mut h: f64,
    eval: &impl Fn(&[f64]) -> f64,
    shares: &impl Fn(&[f64]) -> Vec<f64>,
) -> (f64, Vec<f64>) {
    const HALF: i64 = 10;
    while h > 1e-10 {
        let fine = h / 5.0;
        let center = best_x.clone();
        let mut offs = vec![-HALF; n - 1];
        loop {
            let mut x = vec![0.0; n];
            let mut ok = true;
            for i in 0..n - 1 {
                x[i] = center[i] + offs[i] as f64 * fine;
                if x[i] < 0.0 {
                    // snap onto the boundary so bounds stay reachable
                    x[i] = 0.0;
                }
                if x[i] > 1.0 {
                    ok = false;
                }
            }
            let rest = 1.0 - x[..n - 1].iter().sum::<f64>();
            if ok && rest >= -1e-15 {
                x[n - 1] = rest.max(0.0);
                let v = eval(&x);
                if v < best {
                    best = v;
                    best_x = x;
                }
            }
            let mut i = 0;
            loop {
                if i == n - 1 {
                    break;
                }
                offs[i] += 1;
                if offs[i] <= HALF {
                    break;
                }
                offs[i] = -HALF;
                i += 1;
            }
            if i == n - 1 {
                break;
            }
        }
        h = fine;
    }
    (best, shares(&best_x))
}

/// Hypothetical network sum rate if `target` also held color `j`, computed
/// from scratch from the association table and the PRB targets `m`.
pub fn hypothetical_sum_rate(
    c: &PrbAssociation,
    target: usize,
    j: usize,
    nodes: &[usize],
    m: &[usize],
    gains: &ChannelGains,
    powers: &[f64],
    radio: &RadioParams,
) -> f64 {
    let holds = |n: usize, q: usize| (n == target && q == j) || c.get(n, q);
    let per = radio.bandwidth_hz / radio.num_prbs as f64;
    let mut total = 0.0;
    for &n in nodes {
        for q in 0..radio.num_prbs {
            if !holds(n, q) {
                continue;
            }
            let mut interference = 0.0;
            for &other in nodes {
                if other != n && holds(other, q) {
                    interference += powers[other] / m[other] as f64 * gains.get(other, n);
                }
            }
            let sinr =
                powers[n] / m[n] as f64 * gains.get(n, n) / (radio.noise_per_prb_w + interference);
            total += per * (1.0 + sinr).log2();
        }
    }
    total
}

/// Aggregate interference per (cell, PRB) straight from the definition.
pub fn interference_from_scratch(
    c: &PrbAssociation,
    m: &[usize],
    gains: &ChannelGains,
    powers: &[f64],
) -> Vec<f64> {
    let (cells, prbs) = (c.num_cells(), c.num_prbs());
    let mut o = vec![0.0; cells * prbs];
    for n in 0..cells {
        for k in 0..prbs {
            for other in 0..cells {
                if other != n && c.get(other, k) {
                    o[n * prbs + k] += powers[other] / m[other] as f64 * gains.get(other, n);
                }
            }
        }
    }
    o
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub fn report(id: u32, pass: bool, what: &str) {
    println!(
        "[{}] criterion {id}: {what}",
        if pass { "PASS" } else { "FAIL" }
    );
}
