//! Self-play training: PUCT experts generate episodes, the apprentice takes
//! one optimizer step after every move, and episodes are stored per player.
//!
//! Three optional manipulations of the training distribution:
//! - episode-duration weighting: each tuple is weighted by `T_hat / T`;
//! - prioritized replay: batches are drawn by priority and corrected with
//!   max-normalized IS ratios;
//! - cross-entropy exploration: moves are drawn from `0.9 M + 0.1 mu`, with
//!   `mu` trained by REINFORCE on expert/apprentice disagreement, and tuples
//!   optionally corrected by truncated products of IS ratios.
//!
//! All active weights multiply and enter the gradient in weighted (WIS) form.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::checkpoint::Checkpoint;
use crate::error::{Error, Result};
use crate::features::FeatureSets;
use crate::game::{Action, GameKind, GameState, Outcome, Player};
use crate::io;
use crate::policy::{
    cross_entropy, cross_entropy_gradient, reinforce_update, rmsprop_step, OptimizerState, PolicyParams,
    ReinforceStep, RmsPropConfig,
};
use crate::replay::{
    abs_difference, per_is_ratios, wed_ratio, DurationTracker, ExperienceBuffer, ExperienceTuple, Sampled,
};
use crate::search::{sample_index, AgentKind, Guide, SearchConfig, SearchTree};
use crate::seed::{self, tags, Rng};

pub const DEFAULT_CHECKPOINTS: [usize; 5] = [1, 51, 101, 151, 200];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Exit,
    Wed,
    Per,
    Cee,
    CeeNoIs,
    WedPerCeeNoIs,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Exit,
        Variant::Wed,
        Variant::Per,
        Variant::Cee,
        Variant::CeeNoIs,
        Variant::WedPerCeeNoIs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Exit => "exit",
            Variant::Wed => "wed",
            Variant::Per => "per",
            Variant::Cee => "cee",
            Variant::CeeNoIs => "cee-nois",
            Variant::WedPerCeeNoIs => "wed-per-cee-nois",
        }
    }

    pub fn flags(self) -> VariantFlags {
        let (wed, per, cee, cee_is) = match self {
            Variant::Exit => (false, false, false, false),
            Variant::Wed => (true, false, false, false),
            Variant::Per => (false, true, false, false),
            Variant::Cee => (false, false, true, true),
            Variant::CeeNoIs => (false, false, true, false),
            Variant::WedPerCeeNoIs => (true, true, true, false),
        };
        VariantFlags { wed, per, cee, cee_is }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown variant '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VariantFlags {
    pub wed: bool,
    pub per: bool,
    pub cee: bool,
    pub cee_is: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub game: GameKind,
    /// Label written into checkpoints.
    pub label: String,
    pub flags: VariantFlags,
    pub episodes: usize,
    pub iterations: usize,
    pub c_puct: f64,
    pub capacity: usize,
    pub batch_size: usize,
    pub alpha: f64,
    pub beta: f64,
    pub cee_mix: f64,
    pub cee_gamma: f64,
    pub cee_learning_rate: f64,
    pub truncation: (f64, f64),
    pub checkpoints: Vec<usize>,
    pub seed: u64,
    pub optimizer: RmsPropConfig,
}

impl TrainConfig {
    pub fn new(game: GameKind, variant: Variant) -> Self {
        TrainConfig {
            game,
            label: variant.name().to_string(),
            flags: variant.flags(),
            episodes: 200,
            iterations: crate::search::DEFAULT_ITERATIONS,
            c_puct: crate::search::DEFAULT_C_PUCT,
            capacity: crate::replay::DEFAULT_CAPACITY,
            batch_size: crate::replay::DEFAULT_BATCH,
            alpha: 0.5,
            beta: 0.5,
            cee_mix: 0.1,
            cee_gamma: 0.99,
            cee_learning_rate: 0.005,
            truncation: (0.1, 2.0),
            checkpoints: DEFAULT_CHECKPOINTS.to_vec(),
            seed: 0,
            optimizer: RmsPropConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(0.0..=1.0).contains(&self.cee_mix) {
            return bad("cee_mix must lie in [0, 1]");
        }
        if !(self.truncation.0 < self.truncation.1) || self.truncation.0 < 0.0 {
            return bad("truncation bounds must satisfy 0 <= low < high");
        }
        if self.iterations == 0 || self.batch_size == 0 || self.capacity == 0 {
            return bad("iterations, batch_size and capacity must be positive");
        }
        if self.flags.cee_is && !self.flags.cee {
            return bad("cee_is requires cee");
        }
        if self.alpha < 0.0 || self.beta < 0.0 {
            return bad("alpha and beta must be non-negative");
        }
        Ok(())
    }

    /// Applies one `key = value` setting. Keys mirror the field names;
    /// `variant` resets the label and flags to a preset.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::InvalidConfig(format!("bad value '{v}' for '{key}'")))
        }
        let key_norm = key.replace('-', "_");
        match key_norm.as_str() {
            "game" => self.game = value.parse()?,
            "variant" => {
                let v: Variant = value.parse()?;
                self.flags = v.flags();
                self.label = v.name().to_string();
            }
            "label" => self.label = value.to_string(),
            "wed" => self.flags.wed = num(key, value)?,
            "per" => self.flags.per = num(key, value)?,
            "cee" => self.flags.cee = num(key, value)?,
            "cee_is" => self.flags.cee_is = num(key, value)?,
            "episodes" => self.episodes = num(key, value)?,
            "iterations" => self.iterations = num(key, value)?,
            "c_puct" => self.c_puct = num(key, value)?,
            "capacity" => self.capacity = num(key, value)?,
            "batch_size" => self.batch_size = num(key, value)?,
            "alpha" => self.alpha = num(key, value)?,
            "beta" => self.beta = num(key, value)?,
            "cee_mix" => self.cee_mix = num(key, value)?,
            "cee_gamma" => self.cee_gamma = num(key, value)?,
            "cee_learning_rate" => self.cee_learning_rate = num(key, value)?,
            "truncation_low" => self.truncation.0 = num(key, value)?,
            "truncation_high" => self.truncation.1 = num(key, value)?,
            "checkpoints" => {
                self.checkpoints = value
                    .split(',')
                    .map(|s| s.trim())
                    .filter(|s| !s.is_empty())
                    .map(|s| num(key, s))
                    .collect::<Result<_>>()?
            }
            "seed" => self.seed = num(key, value)?,
            "learning_rate" => self.optimizer.learning_rate = num(key, value)?,
            "decay" => self.optimizer.decay = num(key, value)?,
            "epsilon" => self.optimizer.epsilon = num(key, value)?,
            _ => return Err(Error::InvalidConfig(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(n + 1, format!("expected key = value, got '{line}'")))?;
            self.set(k.trim(), v.trim()).map_err(|e| Error::parse(n + 1, e.to_string()))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let f = &self.flags;
        let cps: Vec<String> = self.checkpoints.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "game = {}", self.game);
        let _ = writeln!(out, "label = {}", self.label);
        let _ = writeln!(out, "wed = {}", f.wed);
        let _ = writeln!(out, "per = {}", f.per);
        let _ = writeln!(out, "cee = {}", f.cee);
        let _ = writeln!(out, "cee_is = {}", f.cee_is);
        let _ = writeln!(out, "episodes = {}", self.episodes);
        let _ = writeln!(out, "iterations = {}", self.iterations);
        let _ = writeln!(out, "c_puct = {}", self.c_puct);
        let _ = writeln!(out, "capacity = {}", self.capacity);
        let _ = writeln!(out, "batch_size = {}", self.batch_size);
        let _ = writeln!(out, "alpha = {}", self.alpha);
        let _ = writeln!(out, "beta = {}", self.beta);
        let _ = writeln!(out, "cee_mix = {}", self.cee_mix);
        let _ = writeln!(out, "cee_gamma = {}", self.cee_gamma);
        let _ = writeln!(out, "cee_learning_rate = {}", self.cee_learning_rate);
        let _ = writeln!(out, "truncation_low = {}", self.truncation.0);
        let _ = writeln!(out, "truncation_high = {}", self.truncation.1);
        let _ = writeln!(out, "checkpoints = {}", cps.join(","));
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "learning_rate = {}", self.optimizer.learning_rate);
        let _ = writeln!(out, "decay = {}", self.optimizer.decay);
        let _ = writeln!(out, "epsilon = {}", self.optimizer.epsilon);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeStep {
    pub state: GameState,
    pub action: Action,
    /// Index of `action` in the state's legal actions.
    pub action_index: usize,
    pub expert: Vec<f64>,
    pub apprentice: Vec<f64>,
    /// Distribution the move was sampled from.
    pub behaviour: Vec<f64>,
    /// Exploration reward, present iff exploration is enabled.
    pub reward: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    pub steps: Vec<EpisodeStep>,
    pub outcome: Outcome,
    pub duration: u32,
    /// Loss reported by each training step taken during the episode.
    pub losses: Vec<f64>,
}

/// Exploration reward: total absolute disagreement of expert and apprentice.
pub fn cee_reward(expert: &[f64], apprentice: &[f64]) -> Result<f64> {
    abs_difference(expert, apprentice)
}

/// Mixture `(1 - w) M + w mu`.
pub fn behaviour_distribution(expert: &[f64], mu: &[f64], mix: f64) -> Result<Vec<f64>> {
    if expert.len() != mu.len() {
        return Err(Error::SupportMismatch(expert.len(), mu.len()));
    }
    Ok(expert.iter().zip(mu).map(|(m, u)| (1.0 - mix) * m + mix * u).collect())
}

/// Per-step truncated products of `M(S_t, A_t) / b(S_t, A_t)` up to and
/// including each step.
pub fn cee_is_factors(steps: &[EpisodeStep], truncation: (f64, f64)) -> Vec<f64> {
    let ratios: Vec<f64> = steps
        .iter()
        .map(|s| s.expert[s.action_index] / s.behaviour[s.action_index])
        .collect();
    truncated_products(&ratios, truncation)
}

pub fn truncated_products(ratios: &[f64], (low, high): (f64, f64)) -> Vec<f64> {
    let mut acc = 1.0;
    ratios
        .iter()
        .map(|r| {
            acc *= r;
            acc.clamp(low, high)
        })
        .collect()
}

/// `sum_i w_i g_i / sum_i w_i`.
pub fn wis_gradient(samples: &[(f64, Vec<f64>)]) -> Result<Vec<f64>> {
    let total: f64 = samples.iter().map(|(w, _)| w).sum();
    if total <= 0.0 {
        return Err(Error::ZeroTotalWeight);
    }
    let dim = samples.first().map_or(0, |(_, g)| g.len());
    let mut acc = vec![0.0; dim];
    for (w, g) in samples {
        for (a, gi) in acc.iter_mut().zip(g) {
            *a += w * gi;
        }
    }
    Ok(acc.into_iter().map(|a| a / total).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchGradient {
    pub gradient: Vec<f64>,
    pub weights: Vec<f64>,
    /// Apprentice distribution of each sample before the update.
    pub apprentice: Vec<Vec<f64>>,
    /// Weighted mean cross-entropy.
    pub loss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossReport {
    pub player: Player,
    pub loss: f64,
    pub batch: usize,
}

/// Per-episode metrics row.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeSummary {
    pub episode: usize,
    pub duration: u32,
    pub mean_loss: Option<f64>,
    pub mean_priority: Option<f64>,
    pub duration_estimate: f64,
}

impl EpisodeSummary {
    pub const CSV_HEADER: &'static str = "episode,duration,mean_loss,mean_priority,duration_estimate";

    pub fn csv_row(&self) -> String {
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:?}"));
        format!(
            "{},{},{},{},{:?}",
            self.episode,
            self.duration,
            opt(self.mean_loss),
            opt(self.mean_priority),
            self.duration_estimate
        )
    }
}

/// Mutable state of one training run.
#[derive(Debug, Clone)]
pub struct Trainer {
    pub config: TrainConfig,
    pub features: FeatureSets,
    pub params: [PolicyParams; 2],
    pub optimizers: [OptimizerState; 2],
    pub mu: [PolicyParams; 2],
    pub buffers: [ExperienceBuffer; 2],
    pub trackers: [DurationTracker; 2],
    pub episodes_done: usize,
}

impl Trainer {
    pub fn new(config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let features = FeatureSets::atomic(config.game);
        let dims = Player::BOTH.map(|p| features.get(p).dim());
        Ok(Trainer {
            params: Player::BOTH.map(|p| PolicyParams::zeros(dims[p.index()], p)),
            optimizers: dims.map(|d| OptimizerState::new(d, config.optimizer)),
            mu: Player::BOTH.map(|p| PolicyParams::zeros(dims[p.index()], p)),
            buffers: [0, 1].map(|_| ExperienceBuffer::new(config.capacity, config.alpha)),
            trackers: [DurationTracker::new(); 2],
            episodes_done: 0,
            features,
            config,
        })
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            game: self.config.game,
            variant: self.config.label.clone(),
            episodes: self.episodes_done,
            features: self.features.clone(),
            params: self.params.clone(),
        }
    }

    /// Per-sample training weights: duration ratio, PER ratio and the
    /// exploration correction, each only when enabled.
    pub fn sample_weights(&self, player: Player, samples: &[Sampled]) -> Result<Vec<f64>> {
        let flags = self.config.flags;
        let buffer = &self.buffers[player.index()];
        let per = if flags.per {
            let probs: Vec<f64> = samples.iter().map(|s| s.probability).collect();
            per_is_ratios(&probs, buffer.len(), self.config.beta)?
        } else {
            vec![1.0; samples.len()]
        };
        samples
            .iter()
            .zip(per)
            .map(|(s, per_w)| {
                let tuple = buffer.tuple(s.index);
                let wed = if flags.wed {
                    wed_ratio(&self.trackers[player.index()], tuple)?
                } else {
                    1.0
                };
                Ok(wed * per_w * tuple.cee_factor)
            })
            .collect()
    }

    pub fn batch_gradient(&self, player: Player, samples: &[Sampled]) -> Result<BatchGradient> {
        let weights = self.sample_weights(player, samples)?;
        let buffer = &self.buffers[player.index()];
        let params = &self.params[player.index()];
        let mut weighted = Vec::with_capacity(samples.len());
        let mut apprentice = Vec::with_capacity(samples.len());
        let mut loss = 0.0;
        for (s, &w) in samples.iter().zip(&weights) {
            let tuple = buffer.tuple(s.index);
            let (g, pi) = cross_entropy_gradient(&tuple.features, &tuple.expert, params)?;
            loss += w * cross_entropy(&tuple.expert, &pi)?;
            weighted.push((w, g));
            apprentice.push(pi);
        }
        let gradient = wis_gradient(&weighted)?;
        let total: f64 = weights.iter().sum();
        Ok(BatchGradient {
            gradient,
            weights,
            apprentice,
            loss: loss / total,
        })
    }

    /// One optimizer step for `player` from its own buffer. Returns `None`
    /// while that buffer is still empty.
    pub fn train_step(&mut self, player: Player, rng: &mut Rng) -> Result<Option<LossReport>> {
        let buffer = &self.buffers[player.index()];
        if buffer.is_empty() {
            return Ok(None);
        }
        let samples = if self.config.flags.per {
            buffer.per_sample(self.config.batch_size, rng)?
        } else {
            buffer.sample_uniform(self.config.batch_size, rng)?
        };
        let batch = self.batch_gradient(player, &samples)?;
        let i = player.index();
        rmsprop_step(&mut self.params[i], &mut self.optimizers[i], &batch.gradient)?;
        if self.config.flags.per {
            for (s, pi) in samples.iter().zip(&batch.apprentice) {
                let expert = self.buffers[i].tuple(s.index).expert.clone();
                self.buffers[i].per_update_priority(s.index, &expert, pi)?;
            }
        }
        Ok(Some(LossReport {
            player,
            loss: batch.loss,
            batch: samples.len(),
        }))
    }

    /// Plays one self-play game, training after every move, then stores the
    /// episode's tuples and updates the duration estimates and the
    /// exploration policy.
    pub fn self_play_episode(&mut self) -> Result<EpisodeRecord> {
        let episode = self.episodes_done as u64;
        let ep_seed = seed::derive(self.config.seed, tags::EPISODE, episode);
        let mut rng = seed::rng(ep_seed);
        let mut train_rng = seed::rng(seed::derive(ep_seed, tags::TRAIN, 0));
        let search_config = SearchConfig {
            c_puct: self.config.c_puct,
            ..SearchConfig::new(AgentKind::Exit)
        };
        let flags = self.config.flags;

        let mut state = GameState::new(self.config.game);
        let mut trees: [Option<SearchTree>; 2] = [None, None];
        let mut pending: [Vec<Action>; 2] = [Vec::new(), Vec::new()];
        let mut steps = Vec::new();
        let mut staged = Vec::new();
        let mut trajectory = Vec::new();
        let mut losses = Vec::new();

        while !state.is_terminal() {
            let mover = state.mover();
            let i = mover.index();
            let tree = match trees[i].take() {
                Some(mut t) => {
                    for a in pending[i].drain(..) {
                        t.advance(a)?;
                    }
                    t
                }
                None => SearchTree::new(state.clone()),
            };
            pending[i].clear();
            let mut tree = tree;
            debug_assert_eq!(tree.root_state(), &state);
            let mut search_rng = seed::rng(seed::derive(ep_seed, tags::SEARCH, steps.len() as u64));
            let result = {
                let guide = Guide::new(&self.features, &self.params);
                tree.search(self.config.iterations, &search_config, Some(guide), &mut search_rng)?
            };
            trees[i] = Some(tree);
            let expert = result.policy()?;
            let actions = result.actions;
            let features = self.features.get(mover).featurize_all(&state, &actions);
            let apprentice = self.params[i].distribution(&features);
            let (behaviour, reward) = if flags.cee {
                let mu = self.mu[i].distribution(&features);
                (
                    behaviour_distribution(&expert, &mu, self.config.cee_mix)?,
                    Some(cee_reward(&expert, &apprentice)?),
                )
            } else {
                (expert.clone(), None)
            };
            let action_index = sample_index(&behaviour, &mut rng);
            let action = actions[action_index];
            if let Some(r) = reward {
                trajectory.push(ReinforceStep {
                    player: mover,
                    features: features.clone(),
                    action: action_index,
                    reward: r,
                });
            }
            staged.push(ExperienceTuple::new(mover, features, expert.clone()));
            let next = state.apply(action)?;
            steps.push(EpisodeStep {
                state,
                action,
                action_index,
                expert,
                apprentice,
                behaviour,
                reward,
            });
            state = next;
            for p in &mut pending {
                p.push(action);
            }
            if let Some(report) = self.train_step(mover, &mut train_rng)? {
                losses.push(report.loss);
            }
        }

        let duration = steps.len() as u32;
        let factors = if flags.cee && flags.cee_is {
            cee_is_factors(&steps, self.config.truncation)
        } else {
            vec![1.0; steps.len()]
        };
        for (mut tuple, factor) in staged.into_iter().zip(factors) {
            tuple.duration = Some(duration);
            tuple.cee_factor = factor;
            let player = tuple.player;
            self.buffers[player.index()].add(tuple);
        }
        for tracker in &mut self.trackers {
            tracker.update(duration);
        }
        if flags.cee {
            reinforce_update(
                &trajectory,
                &mut self.mu,
                self.config.cee_gamma,
                self.config.cee_learning_rate,
            )?;
        }
        self.episodes_done += 1;
        Ok(EpisodeRecord {
            steps,
            outcome: state.utilities()?,
            duration,
            losses,
        })
    }

    pub fn summary(&self, record: &EpisodeRecord) -> EpisodeSummary {
        let mean_loss =
            (!record.losses.is_empty()).then(|| record.losses.iter().sum::<f64>() / record.losses.len() as f64);
        let n: usize = self.buffers.iter().map(|b| b.len()).sum();
        let mean_priority = (n > 0).then(|| {
            self.buffers
                .iter()
                .flat_map(|b| b.iter().map(|t| t.priority))
                .sum::<f64>()
                / n as f64
        });
        EpisodeSummary {
            episode: self.episodes_done,
            duration: record.duration,
            mean_loss,
            mean_priority,
            duration_estimate: self.trackers[0].estimate().unwrap_or(0.0),
        }
    }
}

pub fn checkpoint_path(dir: &Path, episode: usize) -> PathBuf {
    dir.join(format!("checkpoint_{episode:04}.txt"))
}

pub const METRICS_FILE: &str = "metrics.csv";

/// Runs `config.episodes` self-play games, writing checkpoints on schedule
/// and `metrics.csv` into `out_dir`. Returns the checkpoint paths.
pub fn run_training(config: &TrainConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    run_training_with(config, out_dir, |_| {})
}

pub fn run_training_with(
    config: &TrainConfig,
    out_dir: &Path,
    mut on_episode: impl FnMut(&EpisodeSummary),
) -> Result<Vec<PathBuf>> {
    let mut trainer = Trainer::new(config.clone())?;
    let mut paths = Vec::new();
    let mut csv = format!("{}\n", EpisodeSummary::CSV_HEADER);
    for _ in 0..config.episodes {
        let record = trainer.self_play_episode()?;
        let summary = trainer.summary(&record);
        csv.push_str(&summary.csv_row());
        csv.push('\n');
        on_episode(&summary);
        if config.checkpoints.contains(&trainer.episodes_done) {
            let path = checkpoint_path(out_dir, trainer.episodes_done);
            trainer.checkpoint().save(&path)?;
            paths.push(path);
        }
    }
    io::write_atomic(&out_dir.join(METRICS_FILE), csv.as_bytes())?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(game: GameKind, variant: Variant) -> TrainConfig {
        TrainConfig {
            iterations: 40,
            seed: 11,
            ..TrainConfig::new(game, variant)
        }
    }

    #[test]
    fn defaults_match_the_experimental_protocol() {
        let c = TrainConfig::new(GameKind::Hex5, Variant::Exit);
        assert_eq!(c.episodes, 200);
        assert_eq!(c.iterations, 800);
        assert_eq!(c.c_puct, 2.5);
        assert_eq!(c.capacity, 2500);
        assert_eq!(c.batch_size, 30);
        assert_eq!((c.alpha, c.beta), (0.5, 0.5));
        assert_eq!(c.cee_mix, 0.1);
        assert_eq!(c.cee_gamma, 0.99);
        assert_eq!(c.truncation, (0.1, 2.0));
        assert_eq!(c.checkpoints, vec![1, 51, 101, 151, 200]);
    }

    #[test]
    fn variant_presets() {
        assert_eq!(Variant::WedPerCeeNoIs.flags(), VariantFlags { wed: true, per: true, cee: true, cee_is: false });
        assert_eq!(Variant::Cee.flags(), VariantFlags { wed: false, per: false, cee: true, cee_is: true });
        assert!("bogus".parse::<Variant>().is_err());
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
    }

    #[test]
    fn config_text_round_trip_and_validation() {
        let mut c = TrainConfig::new(GameKind::Gomoku9, Variant::Per);
        c.seed = 99;
        c.checkpoints = vec![1, 3];
        let mut back = TrainConfig::new(GameKind::TicTacToe, Variant::Exit);
        back.apply_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
        let mut bad = c.clone();
        bad.cee_mix = 1.5;
        assert!(bad.validate().is_err());
        let mut bad = c.clone();
        bad.truncation = (2.0, 0.1);
        assert!(bad.validate().is_err());
        assert!(back.apply_text("nonsense line").is_err());
        assert!(back.set("unknown_key", "1").is_err());
    }

    #[test]
    fn reward_and_mixture_values() {
        assert_eq!(cee_reward(&[0.2, 0.8], &[0.2, 0.8]).unwrap(), 0.0);
        assert_eq!(cee_reward(&[1.0, 0.0], &[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(cee_reward(&[0.0, 1.0], &[1.0, 0.0]).unwrap(), 2.0);
        assert!(cee_reward(&[1.0], &[0.5, 0.5]).is_err());
        let b = behaviour_distribution(&[0.5, 0.5, 0.0], &[0.0, 0.0, 1.0], 0.1).unwrap();
        assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert_eq!(b[2], 0.1);
    }

    #[test]
    fn truncated_products_cases() {
        assert_eq!(truncated_products(&[1.0, 1.0, 1.0], (0.1, 2.0)), vec![1.0; 3]);
        assert_eq!(truncated_products(&[1.0, 0.0, 1.5], (0.1, 2.0)), vec![1.0, 0.1, 0.1]);
        let r = truncated_products(&[1.5, 1.5, 1.5], (0.1, 2.0));
        assert_eq!(r[1], 2.0);
        assert_eq!(r[2], 2.0);
        assert!((1.5f64 * 1.5 * 1.5 - 3.375).abs() < 1e-15);
    }

    #[test]
    fn wis_gradient_fixture() {
        let samples = vec![(1.0, vec![1.0, 0.0]), (2.0, vec![0.0, 3.0]), (0.5, vec![-2.0, 2.0])];
        let g = wis_gradient(&samples).unwrap();
        // (1*1 + 0 - 1) / 3.5 = 0; (0 + 6 + 1) / 3.5 = 2
        assert!((g[0] - 0.0).abs() < 1e-12);
        assert!((g[1] - 2.0).abs() < 1e-12);
        let zero_weight = vec![(1.0, vec![1.0]), (0.0, vec![100.0])];
        assert_eq!(wis_gradient(&zero_weight).unwrap(), vec![1.0]);
        assert!(wis_gradient(&[(0.0, vec![1.0])]).is_err());
    }

    #[test]
    fn tictactoe_episode_bounds_and_buffer_split() {
        let mut t = Trainer::new(small(GameKind::TicTacToe, Variant::Exit)).unwrap();
        let rec = t.self_play_episode().unwrap();
        assert!((5..=9).contains(&rec.duration));
        assert_eq!(rec.steps.len() as u32, rec.duration);
        let ones = rec.steps.iter().filter(|s| s.state.mover() == Player::One).count();
        assert_eq!(t.buffers[0].len(), ones);
        assert_eq!(t.buffers[1].len(), rec.steps.len() - ones);
        for p in Player::BOTH {
            assert!(t.buffers[p.index()].iter().all(|tu| tu.player == p && tu.duration == Some(rec.duration)));
        }
        assert!(rec.steps.iter().all(|s| s.behaviour == s.expert && s.reward.is_none()));
        assert!(rec.losses.is_empty(), "buffers are empty during the first episode");
    }

    #[test]
    fn episodes_are_deterministic() {
        let cfg = small(GameKind::TicTacToe, Variant::WedPerCeeNoIs);
        let mut a = Trainer::new(cfg.clone()).unwrap();
        let mut b = Trainer::new(cfg).unwrap();
        for _ in 0..3 {
            assert_eq!(a.self_play_episode().unwrap(), b.self_play_episode().unwrap());
        }
        assert_eq!(a.params, b.params);
    }

    #[test]
    fn cee_records_rewards_and_mixture() {
        let mut t = Trainer::new(small(GameKind::TicTacToe, Variant::Cee)).unwrap();
        for _ in 0..3 {
            let rec = t.self_play_episode().unwrap();
            for s in &rec.steps {
                assert!(s.reward.is_some());
                assert!((s.behaviour.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
        for b in &t.buffers {
            assert!(b.iter().all(|tu| (0.1..=2.0).contains(&tu.cee_factor)));
        }
    }

    #[test]
    fn plain_variant_uses_the_unweighted_batch_mean() {
        let mut t = Trainer::new(small(GameKind::TicTacToe, Variant::Exit)).unwrap();
        for _ in 0..2 {
            t.self_play_episode().unwrap();
        }
        let mut rng = seed::rng(5);
        let samples = t.buffers[0].sample_uniform(30, &mut rng).unwrap();
        let batch = t.batch_gradient(Player::One, &samples).unwrap();
        assert!(batch.weights.iter().all(|&w| w == 1.0));
        let dim = t.params[0].dim();
        let mut plain = vec![0.0; dim];
        for s in &samples {
            let tu = t.buffers[0].tuple(s.index);
            let pi = t.params[0].distribution(&tu.features);
            for ((phi, p), m) in tu.features.iter().zip(&pi).zip(&tu.expert) {
                for &k in phi.indices() {
                    plain[k as usize] += p - m;
                }
            }
        }
        for (g, p) in batch.gradient.iter().zip(&plain) {
            assert!((g - p / 30.0).abs() < 1e-12);
        }
    }

    #[test]
    fn train_step_skips_empty_buffer() {
        let mut t = Trainer::new(small(GameKind::Hex5, Variant::Wed)).unwrap();
        assert!(t.train_step(Player::Two, &mut seed::rng(0)).unwrap().is_none());
    }

    #[test]
    fn run_training_writes_schedule_entries() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = TrainConfig {
            episodes: 2,
            iterations: 10,
            ..TrainConfig::new(GameKind::TicTacToe, Variant::Per)
        };
        let paths = run_training(&cfg, dir.path()).unwrap();
        assert_eq!(paths, vec![checkpoint_path(dir.path(), 1)]);
        let ck = Checkpoint::load(&paths[0]).unwrap();
        assert_eq!(ck.episodes, 1);
        let csv = std::fs::read_to_string(dir.path().join(METRICS_FILE)).unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert_eq!(csv.lines().next().unwrap(), EpisodeSummary::CSV_HEADER);
    }
}
