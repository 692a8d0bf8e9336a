//! Evaluation: tournaments between agents, payoff tables with Agresti-Coull
//! intervals, and two-population alpha-rank.

mod alpha_rank;
mod matches;

pub use alpha_rank::{
    aggregate, aggregate_csv, alpha_grid, alpha_rank, alpha_sweep, fixation_probability, residual, stationary,
    transition_matrix, AggregateRow, AlphaRankResult, DAMPING, DEFAULT_POPULATION,
};
pub use matches::{
    dedupe_names, play_match, tournament, unordered_pairs, AgentSpec, GameRecord, MatchSpec, DEFAULT_GAMES_PER_PAIR,
};

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const Z_95: f64 = 1.96;

/// Agresti-Coull interval for `wins` successes out of `n`, clipped to [0, 1].
pub fn agresti_coull(wins: u64, n: u64, z: f64) -> Result<(f64, f64)> {
    if wins > n {
        return Err(Error::WinsExceedGames { wins, n });
    }
    agresti_coull_score(wins as f64, n, z)
}

/// Same interval for a fractional score (draws counted as half a win).
pub fn agresti_coull_score(score: f64, n: u64, z: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if !(0.0..=n as f64).contains(&score) {
        return Err(Error::InvalidConfig(format!("score {score} outside [0, {n}]")));
    }
    let z2 = z * z;
    let n_adj = n as f64 + z2;
    let p = (score + z2 / 2.0) / n_adj;
    let half = z * (p * (1.0 - p) / n_adj).sqrt();
    Ok(((p - half).max(0.0), (p + half).min(1.0)))
}

/// Results of all games for one ordered seating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub games: u32,
    pub p1_wins: u32,
    pub draws: u32,
}

impl Tally {
    pub fn p2_wins(&self) -> u32 {
        self.games - self.p1_wins - self.draws
    }

    /// Player-one score with draws counted as half.
    pub fn score(&self) -> f64 {
        self.p1_wins as f64 + 0.5 * self.draws as f64
    }

    pub fn win_rate(&self) -> Option<f64> {
        (self.games > 0).then(|| self.score() / self.games as f64)
    }
}

/// Win rates of the row agent as player one against the column agent as
/// player two.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffTable {
    pub agents: Vec<String>,
    pub rates: Vec<Vec<f64>>,
    /// Per-cell counts; absent for tables read back from CSV.
    pub tallies: Option<Vec<Vec<Tally>>>,
}

impl PayoffTable {
    pub fn new(agents: Vec<String>, rates: Vec<Vec<f64>>) -> Result<Self> {
        let m = agents.len();
        if m == 0 {
            return Err(Error::EmptyInput);
        }
        if rates.len() != m || rates.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                actual: rates.len(),
            });
        }
        if rates.iter().flatten().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::InvalidConfig("win rates must lie in [0, 1]".into()));
        }
        Ok(PayoffTable {
            agents,
            rates,
            tallies: None,
        })
    }

    pub fn from_tallies(agents: Vec<String>, tallies: Vec<Vec<Tally>>) -> Result<Self> {
        let rates = tallies
            .iter()
            .map(|row| {
                row.iter()
                    .map(|t| t.win_rate().ok_or_else(|| Error::InvalidConfig("payoff cell has no games".into())))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut table = PayoffTable::new(agents, rates)?;
        table.tallies = Some(tallies);
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("agent");
        for a in &self.agents {
            let _ = write!(out, ",{a}");
        }
        out.push('\n');
        for (a, row) in self.agents.iter().zip(&self.rates) {
            out.push_str(a);
            for r in row {
                let _ = write!(out, ",{r:?}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::parse(1, "empty payoff table"))?;
        let mut cols = header.split(',').map(str::trim);
        if cols.next() != Some("agent") {
            return Err(Error::parse(1, "header must start with 'agent'"));
        }
        let agents: Vec<String> = cols.map(String::from).collect();
        if agents.is_empty() || agents.iter().any(|a| a.is_empty()) {
            return Err(Error::parse(1, "header needs at least one agent name"));
        }
        let mut rates = Vec::with_capacity(agents.len());
        for (n, line) in lines {
            let line_no = n + 1;
            let mut fields = line.split(',').map(str::trim);
            let name = fields.next().unwrap_or("");
            let expected = agents.get(rates.len()).ok_or_else(|| Error::parse(line_no, "too many rows"))?;
            if name != expected {
                return Err(Error::parse(line_no, format!("expected row '{expected}', got '{name}'")));
            }
            let row: Vec<f64> = fields
                .map(|f| {
                    f.parse::<f64>()
                        .ok()
                        .filter(|v| (0.0..=1.0).contains(v))
                        .ok_or_else(|| Error::parse(line_no, format!("bad win rate '{f}'")))
                })
                .collect::<Result<_>>()?;
            if row.len() != agents.len() {
                return Err(Error::parse(
                    line_no,
                    format!("expected {} values, got {}", agents.len(), row.len()),
                ));
            }
            rates.push(row);
        }
        if rates.len() != agents.len() {
            return Err(Error::parse(
                text.lines().count().max(1),
                format!("expected {} rows, got {}", agents.len(), rates.len()),
            ));
        }
        PayoffTable::new(agents, rates)
    }

    /// One line per ordered seating with counts and a 95% interval on the
    /// player-one score. Empty when the table carries no counts.
    pub fn interval_report(&self) -> Result<String> {
        let mut out = String::from("player1,player2,games,p1_wins,draws,p2_wins,p1_score_rate,ci_low,ci_high\n");
        let Some(tallies) = &self.tallies else {
            return Ok(out);
        };
        for (i, row) in tallies.iter().enumerate() {
            for (j, t) in row.iter().enumerate() {
                let (lo, hi) = agresti_coull_score(t.score(), t.games as u64, Z_95)?;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{:?},{:?},{:?}",
                    self.agents[i],
                    self.agents[j],
                    t.games,
                    t.p1_wins,
                    t.draws,
                    t.p2_wins(),
                    self.rates[i][j],
                    lo,
                    hi
                );
            }
        }
        Ok(out)
    }

    /// Seat-combined score of each agent against each other agent, with a
    /// 95% interval. Empty when the table carries no counts.
    pub fn head_to_head_report(&self) -> Result<String> {
        let mut out = String::from("agent,opponent,games,score,score_rate,ci_low,ci_high\n");
        let Some(t) = &self.tallies else {
            return Ok(out);
        };
        for i in 0..self.len() {
            for j in (0..self.len()).filter(|&j| j != i) {
                let (games, score) = head_to_head(&t[i][j], &t[j][i]);
                let (lo, hi) = agresti_coull_score(score, games as u64, Z_95)?;
                let _ = writeln!(
                    out,
                    "{},{},{},{:?},{:?},{:?},{:?}",
                    self.agents[i],
                    self.agents[j],
                    games,
                    score,
                    score / games as f64,
                    lo,
                    hi
                );
            }
        }
        Ok(out)
    }
}

/// Games and score of an agent from its tally as player one against an
/// opponent and the opponent's tally as player one against it.
pub fn head_to_head(as_first: &Tally, as_second: &Tally) -> (u32, f64) {
    let games = as_first.games + as_second.games;
    (games, as_first.score() + (as_second.games as f64 - as_second.score()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agresti_coull_hand_value() {
        let (lo, hi) = agresti_coull(60, 120, Z_95).unwrap();
        let n: f64 = 120.0 + 1.96 * 1.96;
        let half = 1.96 * (0.25 / n).sqrt();
        assert!((lo - (0.5 - half)).abs() < 1e-12);
        assert!((hi - (0.5 + half)).abs() < 1e-12);
        assert!((lo - 0.4120).abs() < 1e-4 && (hi - 0.5880).abs() < 1e-4);
    }

    #[test]
    fn agresti_coull_clipping_and_symmetry() {
        let (_, hi) = agresti_coull(1000, 1000, Z_95).unwrap();
        assert_eq!(hi, 1.0);
        let (lo, _) = agresti_coull(0, 1000, Z_95).unwrap();
        assert_eq!(lo, 0.0);
        for x in 0..=17u64 {
            let (a_lo, a_hi) = agresti_coull(x, 17, Z_95).unwrap();
            let (b_lo, b_hi) = agresti_coull(17 - x, 17, Z_95).unwrap();
            assert!((a_lo - (1.0 - b_hi)).abs() < 1e-12);
            assert!((a_hi - (1.0 - b_lo)).abs() < 1e-12);
        }
        assert!(matches!(agresti_coull(5, 4, Z_95), Err(Error::WinsExceedGames { .. })));
        assert!(agresti_coull(0, 0, Z_95).is_err());
    }

    #[test]
    fn payoff_csv_round_trip() {
        let t = PayoffTable::new(
            vec!["a".into(), "b@51".into()],
            vec![vec![0.5, 0.25], vec![1.0, 0.125]],
        )
        .unwrap();
        let back = PayoffTable::from_csv(&t.to_csv()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn payoff_csv_errors_carry_line_numbers() {
        let err = PayoffTable::from_csv("agent,a,b\na,0.5,0.5\nb,0.5,oops\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = PayoffTable::from_csv("agent,a\na,1.5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(PayoffTable::from_csv("name,a\na,0.5\n").is_err());
        assert!(PayoffTable::from_csv("agent,a,b\na,0.5,0.5\n").is_err());
    }

    #[test]
    fn tallies_count_draws_as_half() {
        let t = Tally {
            games: 4,
            p1_wins: 1,
            draws: 2,
        };
        assert_eq!(t.win_rate(), Some(0.5));
        assert_eq!(t.p2_wins(), 1);
        let table = PayoffTable::from_tallies(vec!["x".into()], vec![vec![t]]).unwrap();
        let report = table.interval_report().unwrap();
        assert_eq!(report.lines().count(), 2);
        assert!(report.lines().nth(1).unwrap().starts_with("x,x,4,1,2,1,0.5,"));
    }

    #[test]
    fn head_to_head_combines_seats() {
        let first = Tally { games: 2, p1_wins: 2, draws: 0 };
        let second = Tally { games: 2, p1_wins: 0, draws: 1 };
        assert_eq!(head_to_head(&first, &second), (4, 3.5));
        let cell = Tally { games: 2, p1_wins: 1, draws: 0 };
        let table = PayoffTable::from_tallies(
            vec!["a".into(), "b".into()],
            vec![vec![cell, first], vec![second, cell]],
        )
        .unwrap();
        let report = table.head_to_head_report().unwrap();
        assert!(report.lines().nth(1).unwrap().starts_with("a,b,4,3.5,0.875,"));
        assert!(report.lines().nth(2).unwrap().starts_with("b,a,4,0.5,0.125,"));
    }
}
