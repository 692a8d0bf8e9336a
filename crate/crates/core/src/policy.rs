//! Linear softmax policies, the cross-entropy objective, centred RMSProp and
//! REINFORCE.

use crate::error::{Error, Result};
use crate::features::{FeatureSet, FeatureVector};
use crate::game::{GameState, Player};

/// Logs are clamped here when reporting losses.
pub const LOG_FLOOR: f64 = -27.631_021_115_928_547; // ln(1e-12)

/// Numerically stable softmax; writes into `out`.
pub fn softmax_into(logits: &[f64], out: &mut Vec<f64>) {
    out.clear();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    out.extend(logits.iter().map(|z| (z - max).exp()));
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= total);
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(logits.len());
    softmax_into(logits, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParams {
    pub theta: Vec<f64>,
    pub player: Player,
}

impl PolicyParams {
    pub fn zeros(dim: usize, player: Player) -> Self {
        PolicyParams {
            theta: vec![0.0; dim],
            player,
        }
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn is_finite(&self) -> bool {
        self.theta.iter().all(|x| x.is_finite())
    }

    /// Softmax over `theta . phi` for the given per-action features.
    pub fn distribution(&self, features: &[FeatureVector]) -> Vec<f64> {
        let logits: Vec<f64> = features.iter().map(|f| f.dot(&self.theta)).collect();
        softmax(&logits)
    }
}

/// Apprentice distribution over `state.legal_actions()`.
pub fn action_distribution(state: &GameState, params: &PolicyParams, fs: &FeatureSet) -> Result<Vec<f64>> {
    if state.is_terminal() {
        return Err(Error::TerminalState);
    }
    if params.dim() != fs.dim() {
        return Err(Error::DimensionMismatch {
            expected: fs.dim(),
            actual: params.dim(),
        });
    }
    if state.mover() != fs.player() {
        return Err(Error::InvalidConfig(format!(
            "feature set of player {} used with mover {}",
            fs.player(),
            state.mover()
        )));
    }
    let actions = state.legal_actions();
    let mut logits = Vec::new();
    fs.logits_into(state, &actions, &params.theta, &mut logits);
    Ok(softmax(&logits))
}

fn check_support(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::SupportMismatch(a.len(), b.len()));
    }
    Ok(())
}

/// `-M . log(pi)` for one sample, with logs clamped at ln(1e-12).
pub fn cross_entropy(expert: &[f64], apprentice: &[f64]) -> Result<f64> {
    check_support(expert, apprentice)?;
    Ok(-expert
        .iter()
        .zip(apprentice)
        .filter(|(m, _)| **m > 0.0)
        .map(|(m, p)| m * p.ln().max(LOG_FLOOR))
        .sum::<f64>())
}

/// Weighted mean of per-sample cross-entropies, `sum w_i l_i / sum w_i`.
pub fn cross_entropy_loss(batch: &[(&[f64], &[f64])], weights: &[f64]) -> Result<f64> {
    if batch.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: batch.len(),
            actual: weights.len(),
        });
    }
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return Err(Error::ZeroTotalWeight);
    }
    let mut acc = 0.0;
    for ((m, p), w) in batch.iter().zip(weights) {
        acc += w * cross_entropy(m, p)?;
    }
    Ok(acc / total)
}

/// Per-sample cross-entropy gradient `sum_a (pi(a) - M(a)) phi(a)`, dense over
/// `theta`. Also returns the apprentice distribution it was computed with.
pub fn cross_entropy_gradient(
    features: &[FeatureVector],
    expert: &[f64],
    params: &PolicyParams,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if expert.len() != features.len() {
        return Err(Error::SupportMismatch(expert.len(), features.len()));
    }
    if let Some(f) = features.iter().find(|f| f.dim() != params.dim()) {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            actual: f.dim(),
        });
    }
    let pi = params.distribution(features);
    let mut grad = vec![0.0; params.dim()];
    for ((phi, p), m) in features.iter().zip(&pi).zip(expert) {
        phi.add_scaled_to(&mut grad, p - m);
    }
    Ok((grad, pi))
}

/// `grad log pi(s, a) = phi(a) - sum_b pi(b) phi(b)`.
pub fn grad_log_policy(features: &[FeatureVector], probs: &[f64], action: usize, dim: usize) -> Vec<f64> {
    let mut g = vec![0.0; dim];
    features[action].add_scaled_to(&mut g, 1.0);
    for (phi, p) in features.iter().zip(probs) {
        phi.add_scaled_to(&mut g, -p);
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmsPropConfig {
    pub learning_rate: f64,
    pub decay: f64,
    pub epsilon: f64,
}

impl Default for RmsPropConfig {
    fn default() -> Self {
        RmsPropConfig {
            learning_rate: 0.005,
            decay: 0.9,
            epsilon: 1e-8,
        }
    }
}

/// Centred RMSProp accumulators.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub config: RmsPropConfig,
    pub grad_mean: Vec<f64>,
    pub sq_mean: Vec<f64>,
}

impl OptimizerState {
    pub fn new(dim: usize, config: RmsPropConfig) -> Self {
        OptimizerState {
            config,
            grad_mean: vec![0.0; dim],
            sq_mean: vec![0.0; dim],
        }
    }
}

/// One centred RMSProp step. Nothing is modified if any result would be
/// non-finite.
pub fn rmsprop_step(params: &mut PolicyParams, opt: &mut OptimizerState, gradient: &[f64]) -> Result<()> {
    let dim = params.dim();
    if gradient.len() != dim || opt.grad_mean.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: gradient.len(),
        });
    }
    if gradient.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite("gradient"));
    }
    let RmsPropConfig {
        learning_rate,
        decay,
        epsilon,
    } = opt.config;
    let mut theta = params.theta.clone();
    let mut mean = opt.grad_mean.clone();
    let mut sq = opt.sq_mean.clone();
    for i in 0..dim {
        let g = gradient[i];
        mean[i] = decay * mean[i] + (1.0 - decay) * g;
        sq[i] = decay * sq[i] + (1.0 - decay) * g * g;
        // n >= g~^2 holds exactly; rounding can break it by a few ulps.
        let var = (sq[i] - mean[i] * mean[i]).max(0.0);
        theta[i] -= learning_rate * g / (var + epsilon).sqrt();
    }
    if theta.iter().chain(&mean).chain(&sq).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("rmsprop step"));
    }
    params.theta = theta;
    opt.grad_mean = mean;
    opt.sq_mean = sq;
    Ok(())
}

/// One step of an exploration trajectory.
#[derive(Debug, Clone)]
pub struct ReinforceStep {
    pub player: Player,
    /// Features of every legal action at the step's state.
    pub features: Vec<FeatureVector>,
    pub action: usize,
    /// Reward received after the step.
    pub reward: f64,
}

/// Discounted returns `G_t = sum_{k >= t} gamma^{k-t} R_{k+1}`.
pub fn discounted_returns(rewards: &[f64], gamma: f64) -> Vec<f64> {
    let mut out = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for t in (0..rewards.len()).rev() {
        acc = rewards[t] + gamma * acc;
        out[t] = acc;
    }
    out
}

/// Plain REINFORCE over a whole trajectory: every step's term
/// `lr * gamma^t * G_t * grad log mu(S_t, A_t)` is computed with the
/// parameters from before the update, then applied to the mover's weights.
pub fn reinforce_update(
    trajectory: &[ReinforceStep],
    mu: &mut [PolicyParams; 2],
    gamma: f64,
    learning_rate: f64,
) -> Result<()> {
    if trajectory.is_empty() {
        return Ok(());
    }
    let rewards: Vec<f64> = trajectory.iter().map(|s| s.reward).collect();
    let returns = discounted_returns(&rewards, gamma);
    let mut deltas = [vec![0.0; mu[0].dim()], vec![0.0; mu[1].dim()]];
    let mut discount = 1.0;
    for (step, ret) in trajectory.iter().zip(&returns) {
        let params = &mu[step.player.index()];
        let scale = learning_rate * discount * ret;
        discount *= gamma;
        if scale == 0.0 {
            continue;
        }
        let probs = params.distribution(&step.features);
        let g = grad_log_policy(&step.features, &probs, step.action, params.dim());
        for (d, gi) in deltas[step.player.index()].iter_mut().zip(g) {
            *d += scale * gi;
        }
    }
    let updated: Vec<Vec<f64>> = mu
        .iter()
        .zip(&deltas)
        .map(|(p, d)| p.theta.iter().zip(d).map(|(t, d)| t + d).collect())
        .collect();
    if updated.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("reinforce update"));
    }
    for (p, theta) in mu.iter_mut().zip(updated) {
        p.theta = theta;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Action, GameKind};

    fn fv(indices: &[u32], dim: usize) -> FeatureVector {
        FeatureVector::new(indices.to_vec(), dim)
    }

    #[test]
    fn zero_weights_give_uniform_distribution() {
        let s = GameKind::Hex5.initial_state();
        let fs = FeatureSet::atomic(GameKind::Hex5, Player::One);
        let p = action_distribution(&s, &PolicyParams::zeros(fs.dim(), Player::One), &fs).unwrap();
        assert_eq!(p.len(), 25);
        assert!(p.iter().all(|x| (x - 1.0 / 25.0).abs() < 1e-15));
    }

    #[test]
    fn softmax_of_ln2_and_zero() {
        let p = softmax(&[2f64.ln(), 0.0]);
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((p[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_legal_action_has_probability_one() {
        let s = GameState::from_text("tictactoe XOX/XOO/OX. 1 8").unwrap();
        let fs = FeatureSet::atomic(GameKind::TicTacToe, Player::One);
        let mut params = PolicyParams::zeros(fs.dim(), Player::One);
        params.theta[3] = 4.0;
        assert_eq!(action_distribution(&s, &params, &fs).unwrap(), vec![1.0]);
    }

    #[test]
    fn terminal_state_has_no_distribution() {
        let s = GameState::from_text("tictactoe XXX/OO./... 2 5").unwrap();
        let fs = FeatureSet::atomic(GameKind::TicTacToe, Player::Two);
        let params = PolicyParams::zeros(fs.dim(), Player::Two);
        assert!(matches!(action_distribution(&s, &params, &fs), Err(Error::TerminalState)));
    }

    #[test]
    fn cross_entropy_values() {
        assert_eq!(cross_entropy(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        let l = cross_entropy(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((l - 2f64.ln()).abs() < 1e-12);
        assert!(cross_entropy(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn weighted_loss_with_unit_weights_is_plain_mean() {
        let a: (&[f64], &[f64]) = (&[1.0, 0.0], &[0.5, 0.5]);
        let b: (&[f64], &[f64]) = (&[0.5, 0.5], &[0.25, 0.75]);
        let plain = (cross_entropy(a.0, a.1).unwrap() + cross_entropy(b.0, b.1).unwrap()) / 2.0;
        assert!((cross_entropy_loss(&[a, b], &[1.0, 1.0]).unwrap() - plain).abs() < 1e-15);
        assert!(matches!(cross_entropy_loss(&[a, b], &[0.0, 0.0]), Err(Error::ZeroTotalWeight)));
    }

    #[test]
    fn clamped_loss_stays_finite() {
        assert!(cross_entropy(&[1.0, 0.0], &[0.0, 1.0]).unwrap().is_finite());
    }

    #[test]
    fn gradient_vanishes_when_apprentice_matches_expert() {
        let features = vec![fv(&[0, 1], 3), fv(&[0, 2], 3)];
        let params = PolicyParams {
            theta: vec![0.3, 0.7, -0.2],
            player: Player::One,
        };
        let expert = params.distribution(&features);
        let (g, _) = cross_entropy_gradient(&features, &expert, &params).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn gradient_two_actions_hand_value() {
        // phi(a) = {0, 1}, phi(b) = {0}; pi = (0.5, 0.5), M = (1, 0).
        let features = vec![fv(&[0, 1], 2), fv(&[0], 2)];
        let params = PolicyParams::zeros(2, Player::One);
        let (g, _) = cross_entropy_gradient(&features, &[1.0, 0.0], &params).unwrap();
        assert!((g[0] - 0.0).abs() < 1e-15);
        assert!((g[1] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn gradient_rejects_mismatched_dimensions() {
        let features = vec![fv(&[0, 1], 2)];
        let params = PolicyParams::zeros(3, Player::One);
        assert!(cross_entropy_gradient(&features, &[1.0], &params).is_err());
        let params = PolicyParams::zeros(2, Player::One);
        assert!(cross_entropy_gradient(&features, &[0.5, 0.5], &params).is_err());
    }

    #[test]
    fn rmsprop_zero_gradient_leaves_theta() {
        let mut p = PolicyParams {
            theta: vec![1.5, -2.0],
            player: Player::One,
        };
        let mut opt = OptimizerState::new(2, RmsPropConfig::default());
        rmsprop_step(&mut p, &mut opt, &[0.0, 0.0]).unwrap();
        assert_eq!(p.theta, vec![1.5, -2.0]);
    }

    #[test]
    fn rmsprop_first_step_hand_value() {
        let mut p = PolicyParams::zeros(1, Player::One);
        let mut opt = OptimizerState::new(1, RmsPropConfig::default());
        rmsprop_step(&mut p, &mut opt, &[1.0]).unwrap();
        assert!((opt.sq_mean[0] - 0.1).abs() < 1e-15);
        assert!((opt.grad_mean[0] - 0.1).abs() < 1e-15);
        let expected = -0.005 / (0.1f64 - 0.01 + 1e-8).sqrt();
        assert!((p.theta[0] - expected).abs() < 1e-12);
        assert!((p.theta[0] + 0.005 / 0.3).abs() < 1e-6);
    }

    #[test]
    fn rmsprop_constant_gradient_trend() {
        let cfg = RmsPropConfig::default();
        let mut p = PolicyParams::zeros(1, Player::One);
        let mut opt = OptimizerState::new(1, cfg);
        let mut steps = Vec::new();
        for _ in 0..1000 {
            let before = p.theta[0];
            rmsprop_step(&mut p, &mut opt, &[1.0]).unwrap();
            steps.push((p.theta[0] - before).abs());
        }
        // n - g~^2 = g^2 (1 - r^t) r^t peaks near r^t = 1/2 and then decays,
        // so step sizes grow monotonically towards the eps-guarded bound.
        for w in steps[7..].windows(2) {
            assert!(w[1] >= w[0] * (1.0 - 1e-9));
        }
        let bound = cfg.learning_rate / cfg.epsilon.sqrt();
        assert!(steps.iter().all(|s| *s <= bound * (1.0 + 1e-12)));
        assert!((steps[999] - bound).abs() / bound < 1e-6);
    }

    #[test]
    fn rmsprop_rejects_non_finite() {
        let mut p = PolicyParams::zeros(1, Player::One);
        let mut opt = OptimizerState::new(1, RmsPropConfig::default());
        assert!(rmsprop_step(&mut p, &mut opt, &[f64::NAN]).is_err());
        assert_eq!(p.theta, vec![0.0]);
    }

    #[test]
    fn reinforce_zero_rewards_is_noop() {
        let step = ReinforceStep {
            player: Player::One,
            features: vec![fv(&[0, 1], 3), fv(&[0, 2], 3)],
            action: 0,
            reward: 0.0,
        };
        let mut mu = [PolicyParams::zeros(3, Player::One), PolicyParams::zeros(3, Player::Two)];
        reinforce_update(&[step.clone(), step], &mut mu, 0.99, 0.01).unwrap();
        assert!(mu.iter().all(|p| p.theta.iter().all(|x| *x == 0.0)));
        reinforce_update(&[], &mut mu, 0.99, 0.01).unwrap();
    }

    #[test]
    fn reinforce_single_step_hand_value() {
        let step = ReinforceStep {
            player: Player::One,
            features: vec![fv(&[0, 1], 3), fv(&[0, 2], 3)],
            action: 0,
            reward: 1.0,
        };
        let mut mu = [PolicyParams::zeros(3, Player::One), PolicyParams::zeros(3, Player::Two)];
        reinforce_update(&[step], &mut mu, 0.99, 0.01).unwrap();
        // 0.01 * (phi(a) - 0.5 phi(a) - 0.5 phi(b)) = 0.01 * (0, 0.5, -0.5)
        let expect = [0.0, 0.005, -0.005];
        for (t, e) in mu[0].theta.iter().zip(expect) {
            assert!((t - e).abs() < 1e-15);
        }
        assert!(mu[1].theta.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn discounted_return_recursion() {
        let g = discounted_returns(&[1.0, 0.0, 2.0], 0.5);
        assert_eq!(g, vec![1.5, 1.0, 2.0]);
    }

    #[test]
    fn distribution_matches_features_path() {
        let s = GameKind::Gomoku9.initial_state().apply(Action::place(40)).unwrap();
        let fs = FeatureSet::atomic(GameKind::Gomoku9, Player::Two);
        let params = PolicyParams {
            theta: (0..fs.dim()).map(|i| (i as f64).cos()).collect(),
            player: Player::Two,
        };
        let a = action_distribution(&s, &params, &fs).unwrap();
        let b = params.distribution(&fs.featurize_all(&s, &s.legal_actions()));
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-15);
        }
    }
}
