use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::par::{self, Execution};

use super::PayoffTable;

pub const DEFAULT_POPULATION: usize = 50;
pub const DAMPING: f64 = 1e-10;
pub const GRID_POINTS: usize = 25;
const TOP_TOLERANCE: f64 = 1e-6;

/// Probability that a single mutant with payoff advantage `delta` takes
/// over a population of size `m`.
pub fn fixation_probability(delta: f64, alpha: f64, m: usize) -> f64 {
    let x = alpha * delta;
    let m = m as f64;
    if x == 0.0 {
        1.0 / m
    } else if x > 0.0 {
        (-x).exp_m1() / (-m * x).exp_m1()
    } else {
        ((m - 1.0) * x).exp() * x.exp_m1() / (m * x).exp_m1()
    }
}

/// Row-stochastic chain over profiles `(i, j)`, indexed `i * n + j`, where
/// `i` plays player one and `j` player two. Player one earns the table's win
/// rate, player two its complement.
pub fn transition_matrix(table: &PayoffTable, alpha: f64, m: usize) -> Vec<Vec<f64>> {
    let n = table.len();
    let size = n * n;
    let w = &table.rates;
    let mut c = vec![vec![0.0; size]; size];
    let alternatives = 2 * (n - 1);
    let eta = if alternatives == 0 { 0.0 } else { 1.0 / alternatives as f64 };
    for i in 0..n {
        for j in 0..n {
            let p = i * n + j;
            let mut out = 0.0;
            for k in (0..n).filter(|&k| k != i) {
                let t = eta * fixation_probability(w[k][j] - w[i][j], alpha, m);
                c[p][k * n + j] = t;
                out += t;
            }
            for k in (0..n).filter(|&k| k != j) {
                let t = eta * fixation_probability(w[i][j] - w[i][k], alpha, m);
                c[p][i * n + k] = t;
                out += t;
            }
            c[p][p] = 1.0 - out;
        }
    }
    c
}

/// Stationary distribution of an irreducible row-stochastic matrix by
/// Grassmann-Taksar-Heyman elimination.
pub fn stationary(mut p: Vec<Vec<f64>>) -> Result<Vec<f64>> {
    let n = p.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    for k in (1..n).rev() {
        let s: f64 = p[k][..k].iter().sum();
        if s <= 0.0 {
            return Err(Error::ZeroProbability);
        }
        let (top, bottom) = p.split_at_mut(k);
        let row_k = &bottom[0];
        for row in top.iter_mut() {
            row[k] /= s;
            let f = row[k];
            if f != 0.0 {
                for (x, y) in row[..k].iter_mut().zip(&row_k[..k]) {
                    *x += f * y;
                }
            }
        }
    }
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for k in 1..n {
        pi[k] = (0..k).map(|i| pi[i] * p[i][k]).sum();
    }
    let total: f64 = pi.iter().sum();
    if !total.is_finite() || total <= 0.0 {
        return Err(Error::NonFinite("stationary distribution"));
    }
    Ok(pi.into_iter().map(|x| x / total).collect())
}

/// `max_k |(pi C)_k - pi_k|`.
pub fn residual(pi: &[f64], c: &[Vec<f64>]) -> f64 {
    (0..pi.len())
        .map(|k| {
            let v: f64 = pi.iter().zip(c).map(|(p, row)| p * row[k]).sum();
            (v - pi[k]).abs()
        })
        .fold(0.0, f64::max)
}

fn damp(c: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let u = DAMPING / c.len() as f64;
    c.iter()
        .map(|row| row.iter().map(|x| (1.0 - DAMPING) * x + u).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaRankResult {
    pub agents: Vec<String>,
    pub alpha: f64,
    pub population: usize,
    /// Stationary mass of profile `(i, j)` at index `i * n + j`.
    pub masses: Vec<f64>,
    /// Marginal mass of each agent in each role.
    pub role_mass: [Vec<f64>; 2],
    /// Average of the two role marginals; sums to 1.
    pub agent_mass: Vec<f64>,
    /// `max |pi C - pi|` on the undamped chain.
    pub residual: f64,
    /// Set by a sweep that found no stable top set.
    pub warning: bool,
}

impl AlphaRankResult {
    pub fn profile_mass(&self, i: usize, j: usize) -> f64 {
        self.masses[i * self.agents.len() + j]
    }

    /// Heaviest profile; the first one wins ties.
    pub fn top_profile(&self) -> (usize, usize) {
        let n = self.agents.len();
        let mut best = 0;
        for (k, &m) in self.masses.iter().enumerate() {
            if m > self.masses[best] {
                best = k;
            }
        }
        (best / n, best % n)
    }

    /// Profiles whose mass is within a relative `1e-6` of the maximum.
    pub fn top_set(&self) -> Vec<usize> {
        let max = self.masses.iter().cloned().fold(0.0, f64::max);
        (0..self.masses.len())
            .filter(|&k| self.masses[k] >= max * (1.0 - TOP_TOLERANCE))
            .collect()
    }

    /// `(i, j, mass, rank)` by decreasing mass; tied masses share a rank.
    pub fn ranking(&self) -> Vec<(usize, usize, f64, usize)> {
        let n = self.agents.len();
        let mut order: Vec<usize> = (0..self.masses.len()).collect();
        order.sort_by(|&a, &b| self.masses[b].total_cmp(&self.masses[a]).then(a.cmp(&b)));
        order
            .iter()
            .map(|&k| {
                let rank = 1 + self.masses.iter().filter(|&&m| m > self.masses[k]).count();
                (k / n, k % n, self.masses[k], rank)
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("player1,player2,mass,rank\n");
        for (i, j, mass, rank) in self.ranking() {
            let _ = writeln!(out, "{},{},{:?},{}", self.agents[i], self.agents[j], mass, rank);
        }
        out
    }
}

pub fn alpha_rank(table: &PayoffTable, alpha: f64, population: usize) -> Result<AlphaRankResult> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidConfig(format!("alpha must be positive, got {alpha}")));
    }
    if population < 2 {
        return Err(Error::InvalidConfig("population must be at least 2".into()));
    }
    let n = table.len();
    let c = transition_matrix(table, alpha, population);
    let masses = stationary(damp(&c))?;
    let residual = residual(&masses, &c);
    let mut role_mass = [vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        for j in 0..n {
            role_mass[0][i] += masses[i * n + j];
            role_mass[1][j] += masses[i * n + j];
        }
    }
    let agent_mass = (0..n).map(|k| 0.5 * (role_mass[0][k] + role_mass[1][k])).collect();
    Ok(AlphaRankResult {
        agents: table.agents.clone(),
        alpha,
        population,
        masses,
        role_mass,
        agent_mass,
        residual,
        warning: false,
    })
}

/// 25 geometrically spaced values from `1e-2` to `1e4`.
pub fn alpha_grid() -> Vec<f64> {
    (0..GRID_POINTS)
        .map(|k| 10f64.powf(-2.0 + 6.0 * k as f64 / (GRID_POINTS - 1) as f64))
        .collect()
}

/// Result at the smallest grid alpha from which the top profile set stays
/// the same for the rest of the grid (at least two points). Without such a
/// plateau, returns the largest-alpha result with `warning` set.
pub fn alpha_sweep(table: &PayoffTable, population: usize, exec: Execution) -> Result<AlphaRankResult> {
    let grid = alpha_grid();
    let mut results = par::try_map(exec, &grid, |&a| alpha_rank(table, a, population))?;
    let tops: Vec<Vec<usize>> = results.iter().map(|r| r.top_set()).collect();
    let last = tops.len() - 1;
    let mut start = last;
    while start > 0 && tops[start - 1] == tops[last] {
        start -= 1;
    }
    if start == last {
        let mut r = results.pop().expect("grid is not empty");
        r.warning = true;
        return Ok(r);
    }
    Ok(results.swap_remove(start))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub name: String,
    /// Number of (game, role) slots where the agent is in the top profile.
    pub top_ranks: usize,
    /// Role-averaged mass, averaged over games.
    pub mean_mass: f64,
}

/// Text before the first `@`, so checkpoints of one run share a row.
fn group_name(agent: &str) -> &str {
    agent.split('@').next().unwrap_or(agent)
}

/// Cross-game summary: top-rank counts and average strategy mass, with all
/// checkpoints of one variant added together.
pub fn aggregate(results: &[AlphaRankResult]) -> Vec<AggregateRow> {
    let mut rows: Vec<AggregateRow> = Vec::new();
    let slot = |name: &str, rows: &mut Vec<AggregateRow>| -> usize {
        let g = group_name(name);
        match rows.iter().position(|r| r.name == g) {
            Some(k) => k,
            None => {
                rows.push(AggregateRow {
                    name: g.to_string(),
                    top_ranks: 0,
                    mean_mass: 0.0,
                });
                rows.len() - 1
            }
        }
    };
    for r in results {
        let (i, j) = r.top_profile();
        for agent in [i, j] {
            let k = slot(&r.agents[agent], &mut rows);
            rows[k].top_ranks += 1;
        }
        for (agent, m) in r.agents.iter().zip(&r.agent_mass) {
            let k = slot(agent, &mut rows);
            rows[k].mean_mass += m / results.len() as f64;
        }
    }
    rows
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from("agent,top_ranks,avg_strategy_mass\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{:?}", r.name, r.top_ranks, r.mean_mass);
    }
    out
}
