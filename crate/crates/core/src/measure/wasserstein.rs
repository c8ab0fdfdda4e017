use super::EmpiricalMeasure;
use crate::complex::euclidean;
use crate::error::{Error, Result};

/// Largest support size accepted by [`wasserstein2`].
pub const MAX_TRANSPORT_SUPPORT: usize = 64;

const MASS_EPS: f64 = 1e-15;

/// Exact 2-Wasserstein distance between two empirical measures.
///
/// Solves the transportation problem with squared Euclidean cost by
/// successive shortest augmenting paths (Dijkstra with node potentials on
/// the dense residual bipartite graph).
pub fn wasserstein2(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<f64> {
    if mu.dim() != nu.dim() {
        return Err(Error::dims(mu.dim(), nu.dim()));
    }
    for m in [mu, nu] {
        if m.len() > MAX_TRANSPORT_SUPPORT {
            return Err(Error::Guard {
                what: "transport support",
                limit: MAX_TRANSPORT_SUPPORT,
                actual: m.len(),
            });
        }
    }
    let n = mu.len();
    let k = nu.len();
    let cost: Vec<Vec<f64>> = mu
        .points()
        .iter()
        .map(|p| nu.points().iter().map(|q| euclidean(p, q).powi(2)).collect())
        .collect();
    let flow = min_cost_transport(mu.masses(), nu.masses(), &cost);
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..k {
            total += flow[i][j] * cost[i][j];
        }
    }
    Ok(total.max(0.0).sqrt())
}

/// Returns an optimal coupling of `supply` and `demand` for `cost`.
pub(crate) fn min_cost_transport(supply: &[f64], demand: &[f64], cost: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = supply.len();
    let k = demand.len();
    let mut left = supply.to_vec();
    let mut right = demand.to_vec();
    let mut flow = vec![vec![0.0; k]; n];
    // Node ids: sources 0..n, sinks n..n+k.
    let mut potential = vec![0.0; n + k];
    let total = n + k;
    loop {
        if left.iter().all(|&s| s <= MASS_EPS) || right.iter().all(|&d| d <= MASS_EPS) {
            break;
        }
        let mut dist = vec![f64::INFINITY; total];
        let mut prev = vec![usize::MAX; total];
        let mut done = vec![false; total];
        for i in 0..n {
            if left[i] > MASS_EPS {
                dist[i] = 0.0;
            }
        }
        loop {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..total {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            if u < n {
                for j in 0..k {
                    let v = n + j;
                    let reduced = cost[u][j] + potential[u] - potential[v];
                    let cand = dist[u] + reduced.max(0.0);
                    if cand < dist[v] {
                        dist[v] = cand;
                        prev[v] = u;
                    }
                }
            } else {
                let j = u - n;
                for i in 0..n {
                    if flow[i][j] > MASS_EPS {
                        let reduced = -cost[i][j] + potential[u] - potential[i];
                        let cand = dist[u] + reduced.max(0.0);
                        if cand < dist[i] {
                            dist[i] = cand;
                            prev[i] = u;
                        }
                    }
                }
            }
        }
        let target = (0..k)
            .filter(|&j| right[j] > MASS_EPS && dist[n + j].is_finite())
            .min_by(|&a, &b| dist[n + a].total_cmp(&dist[n + b]));
        let Some(j_star) = target else { break };
        let t = n + j_star;
        let cap = dist[t];
        for v in 0..total {
            potential[v] += dist[v].min(cap);
        }
        // Walk back to the originating source, collecting the bottleneck.
        let mut amount = right[j_star];
        let mut v = t;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u >= n {
                // Reverse arc sink u -> source v cancels flow[v][u - n].
                amount = amount.min(flow[v][u - n]);
            }
            v = u;
        }
        let source = v;
        amount = amount.min(left[source]);
        let mut v = t;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u < n {
                flow[u][v - n] += amount;
            } else {
                flow[v][u - n] -= amount;
            }
            v = u;
        }
        left[source] -= amount;
        right[j_star] -= amount;
    }
    flow
}
