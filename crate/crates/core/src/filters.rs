//! Exact information states and the joint-distribution oracle.
//!
//! - `Ξ_t^k[i]`: law of `(X_t, Λ_t^{-k})` given `I_t^k = i`.
//! - `Π_t[δ]`: law of `X_{t-T}` given `Δ_t = δ` (defined for `t > T`).
//! - `Θ_t[δ]`: law of `(X_t, Λ_t^(K))` given `Δ_t = δ`.
//!
//! Beliefs are flat vectors indexed `x * size + tuple`, where `tuple` is the
//! mixed-radix code of the private-component codes of the controllers
//! involved, in increasing controller order.
//!
//! Conditioning on an event of probability below [`ZERO_MASS`] yields `None`
//! (unreachable), never NaN.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::info::{InfoSet, InfoStructure, JointStep, StrategyTuple};
use crate::model::ValidatedProblem;

/// Mass below this is treated as exactly zero.
pub const ZERO_MASS: f64 = 1e-14;

/// Grid used to turn beliefs into grouping keys.
pub const QUANTUM: f64 = 1e-9;

pub fn quantize(probs: &[f64]) -> Vec<i64> {
    probs.iter().map(|p| (p / QUANTUM).round() as i64).collect()
}

/// Mixed-radix code over a list of digit ranges, first digit most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedRadix {
    pub radices: Vec<usize>,
    pub size: usize,
}

impl MixedRadix {
    pub fn new(radices: Vec<usize>) -> Self {
        let size = radices.iter().product();
        MixedRadix { radices, size }
    }

    #[inline]
    pub fn encode(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&d, &r)| acc * r + d)
    }

    #[inline]
    pub fn decode_into(&self, mut index: usize, out: &mut [usize]) {
        for (slot, &r) in out.iter_mut().zip(&self.radices).rev() {
            *slot = index % r;
            index /= r;
        }
    }
}

/// Controllers whose private components index a belief, with their layout.
#[derive(Debug, Clone)]
pub struct TupleLayout {
    pub controllers: Vec<usize>,
    pub codes: MixedRadix,
}

impl TupleLayout {
    /// `Λ_t^{-k}`.
    pub fn others(info: &InfoStructure, t: usize, k: usize) -> Self {
        let controllers: Vec<usize> = (0..info.num_controllers).filter(|&j| j != k).collect();
        let radices = controllers.iter().map(|&j| info.num_private(t, j)).collect();
        TupleLayout {
            controllers,
            codes: MixedRadix::new(radices),
        }
    }

    /// `Λ_t^(K)`.
    pub fn all(info: &InfoStructure, t: usize) -> Self {
        let controllers: Vec<usize> = (0..info.num_controllers).collect();
        let radices = controllers.iter().map(|&j| info.num_private(t, j)).collect();
        TupleLayout {
            controllers,
            codes: MixedRadix::new(radices),
        }
    }

    pub fn size(&self) -> usize {
        self.codes.size
    }

    fn obs_layout(&self, info: &InfoStructure) -> MixedRadix {
        MixedRadix::new(self.controllers.iter().map(|&j| info.obs_size(j)).collect())
    }
}

/// `Ξ_t^k[i]` over `X × Λ_t^{-k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivateBelief {
    pub t: usize,
    pub k: usize,
    pub probs: Vec<f64>,
}

/// `Π_t[δ]` over `X` (the state at `t - T`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralBeliefPi {
    pub t: usize,
    pub probs: Vec<f64>,
}

/// `Θ_t[δ]` over `X × Λ_t^(K)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralBeliefTheta {
    pub t: usize,
    pub probs: Vec<f64>,
}

/// Marginal over the state of a belief laid out as `x * size + tuple`.
pub fn state_marginal(probs: &[f64], state_size: usize) -> Vec<f64> {
    let size = probs.len() / state_size;
    probs.chunks(size).map(|c| c.iter().sum()).collect()
}

/// Writes `(index, probability)` rows.
pub fn write_belief_csv<W: Write>(probs: &[f64], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["index", "probability"])?;
    for (i, p) in probs.iter().enumerate() {
        w.write_record([i.to_string(), format!("{p:e}")])?;
    }
    w.flush()?;
    Ok(())
}

/// Normalizes in place; `None` when the mass is below [`ZERO_MASS`].
pub fn normalize(mut probs: Vec<f64>) -> Option<(Vec<f64>, f64)> {
    let mass: f64 = probs.iter().sum();
    if mass < ZERO_MASS {
        return None;
    }
    probs.iter_mut().for_each(|p| *p /= mass);
    Some((probs, mass))
}

/// Actions `γ_t^j(δ_t, λ^j)` of other controllers at a fixed common component.
pub trait ActionSlice {
    fn action(&self, j: usize, private: usize) -> usize;
}

/// The slice of a strategy tuple at `(t, δ_t)`.
#[derive(Debug, Clone, Copy)]
pub struct CommonSlice<'a> {
    pub info: &'a InfoStructure,
    pub strategies: &'a StrategyTuple,
    pub t: usize,
    pub common: usize,
}

impl ActionSlice for CommonSlice<'_> {
    #[inline]
    fn action(&self, j: usize, private: usize) -> usize {
        self.strategies
            .action(self.t, j, self.info.join_code(self.t, j, self.common, private))
    }
}

/// Explicit decision rules: `table[j][private]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTable(pub Vec<Vec<usize>>);

impl ActionSlice for DecisionTable {
    fn action(&self, j: usize, private: usize) -> usize {
        self.0[j][private]
    }
}

impl DecisionTable {
    /// Materializes a slice for every controller.
    pub fn from_slice<S: ActionSlice>(info: &InfoStructure, t: usize, slice: &S) -> Self {
        DecisionTable(
            (0..info.num_controllers)
                .map(|j| (0..info.num_private(t, j)).map(|p| slice.action(j, p)).collect())
                .collect(),
        )
    }
}

/// `Ξ_1^k` for observation `y_1^k`: proportional to
/// `p(x) Π_j q_1^j(y^j | x)` with `y^k` fixed. `None` if `y_1^k` is impossible.
pub fn private_belief_init(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    k: usize,
    y1: usize,
) -> Option<PrivateBelief> {
    private_belief_init_with_mass(problem, info, k, y1).map(|(b, _)| b)
}

/// [`private_belief_init`] together with `P(y_1^k)`.
pub fn private_belief_init_with_mass(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    k: usize,
    y1: usize,
) -> Option<(PrivateBelief, f64)> {
    let layout = TupleLayout::others(info, 1, k);
    let mut probs = vec![0.0; problem.state_size * layout.size()];
    let mut ys = vec![0; layout.controllers.len()];
    for x in 0..problem.state_size {
        let base = problem.initial_dist[x] * problem.obs_prob(1, k, x, 0, y1);
        for (idx, p) in probs[x * layout.size()..(x + 1) * layout.size()].iter_mut().enumerate() {
            // at t = 1 a private code is the observation itself
            layout.codes.decode_into(idx, &mut ys);
            *p = layout
                .controllers
                .iter()
                .zip(&ys)
                .fold(base, |acc, (&j, &y)| acc * problem.obs_prob(1, j, x, 0, y));
        }
    }
    normalize(probs).map(|(probs, mass)| (PrivateBelief { t: 1, k, probs }, mass))
}

/// Unnormalized private update. `revealed` is the joint step of epoch
/// `t - T + 1` that becomes common at `t + 1` (required exactly when
/// `t >= T`); entries of controllers other than `k` must be consistent with
/// `Λ_t^{-k}` for mass to survive.
pub fn private_belief_update_unnormalized<S: ActionSlice>(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    xi: &PrivateBelief,
    y_next: usize,
    u_own: usize,
    revealed: Option<&JointStep>,
    slice: &S,
) -> Vec<f64> {
    let (t, k) = (xi.t, xi.k);
    let nx = problem.state_size;
    let src = TupleLayout::others(info, t, k);
    let dst = TupleLayout::others(info, t + 1, k);
    let obs = src.obs_layout(info);
    let others = &src.controllers;
    let m = others.len();

    let mut out = vec![0.0; nx * dst.size()];
    let mut lam = vec![0; m];
    let mut lam_next = vec![0; m];
    let mut ys = vec![0; m];
    let mut u = vec![0; info.num_controllers];
    u[k] = u_own;

    for x in 0..nx {
        for li in 0..src.size() {
            let mass = xi.probs[x * src.size() + li];
            if mass == 0.0 {
                continue;
            }
            src.codes.decode_into(li, &mut lam);
            for (idx, &j) in others.iter().enumerate() {
                u[j] = slice.action(j, lam[idx]);
            }
            if let Some(step) = revealed {
                let consistent = others.iter().enumerate().all(|(idx, &j)| {
                    info.private_oldest_obs(t, j, lam[idx]) == step.obs[j]
                        && info.revealed_action(t, j, lam[idx], u[j]) == step.actions[j]
                });
                if !consistent {
                    continue;
                }
            }
            let ua = info.joint_action_index(&u);
            for xn in 0..nx {
                let own = problem.obs_prob(t + 1, k, xn, ua, y_next);
                let predicted = own * problem.transition_prob(t, x, ua, xn) * mass;
                if predicted == 0.0 {
                    continue;
                }
                for oc in 0..obs.size {
                    obs.decode_into(oc, &mut ys);
                    let mut w = 1.0;
                    for (idx, &j) in others.iter().enumerate() {
                        w *= problem.obs_prob(t + 1, j, xn, ua, ys[idx]);
                        lam_next[idx] = info.roll_private(t, j, lam[idx], ys[idx], u[j]);
                    }
                    if w == 0.0 {
                        continue;
                    }
                    out[xn * dst.size() + dst.codes.encode(&lam_next)] += w * predicted;
                }
            }
        }
    }
    out
}

/// `Ξ_{t+1}^k` from `Ξ_t^k`; `None` when `(y_{t+1}^k, revealed)` has zero
/// probability given `ξ` and the slice.
pub fn private_belief_update<S: ActionSlice>(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    xi: &PrivateBelief,
    y_next: usize,
    u_own: usize,
    revealed: Option<&JointStep>,
    slice: &S,
) -> Option<PrivateBelief> {
    let raw = private_belief_update_unnormalized(problem, info, xi, y_next, u_own, revealed, slice);
    normalize(raw).map(|(probs, _)| PrivateBelief {
        t: xi.t + 1,
        k: xi.k,
        probs,
    })
}

/// `Π_{T+1}`: law of `X_1` given the first shared joint observation.
pub fn pi_init(problem: &ValidatedProblem, y1: &[usize]) -> Option<CentralBeliefPi> {
    let probs = (0..problem.state_size)
        .map(|x| {
            y1.iter()
                .enumerate()
                .fold(problem.initial_dist[x], |acc, (j, &y)| acc * problem.obs_prob(1, j, x, 0, y))
        })
        .collect();
    normalize(probs).map(|(probs, _)| CentralBeliefPi {
        t: problem.delay + 1,
        probs,
    })
}

/// `Π_{t+1}` from `Π_t`, the newly shared joint observation `y_{t-T+1}` and
/// the joint action `u_{t-T}` recorded in `Δ_t`. No strategy enters.
pub fn pi_update(
    problem: &ValidatedProblem,
    pi: &CentralBeliefPi,
    y_shared: &[usize],
    u_prev: &[usize],
) -> Option<CentralBeliefPi> {
    let lag = pi.t - problem.delay;
    let ua = problem.joint_action_index(u_prev);
    let nx = problem.state_size;
    let mut out = vec![0.0; nx];
    for (x, &p) in pi.probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for (xn, slot) in out.iter_mut().enumerate() {
            let predicted = problem.transition_prob(lag, x, ua, xn) * p;
            *slot += y_shared
                .iter()
                .enumerate()
                .fold(predicted, |acc, (j, &y)| acc * problem.obs_prob(lag + 1, j, xn, ua, y));
        }
    }
    normalize(out).map(|(probs, _)| CentralBeliefPi { t: pi.t + 1, probs })
}

/// `Θ_1 = P(X_1, Y_1^(K))`.
pub fn theta_init(problem: &ValidatedProblem, info: &InfoStructure) -> CentralBeliefTheta {
    let layout = TupleLayout::all(info, 1);
    let mut ys = vec![0; info.num_controllers];
    let mut probs = vec![0.0; problem.state_size * layout.size()];
    for x in 0..problem.state_size {
        for idx in 0..layout.size() {
            layout.codes.decode_into(idx, &mut ys);
            probs[x * layout.size() + idx] = ys
                .iter()
                .enumerate()
                .fold(problem.initial_dist[x], |acc, (j, &y)| acc * problem.obs_prob(1, j, x, 0, y));
        }
    }
    CentralBeliefTheta { t: 1, probs }
}

/// `Θ_{t+1}` from `Θ_t`: select every controller's action through the slice,
/// predict, roll all private components forward and condition on the joint
/// step that becomes common (if any).
pub fn theta_update<S: ActionSlice>(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    theta: &CentralBeliefTheta,
    revealed: Option<&JointStep>,
    slice: &S,
) -> Option<CentralBeliefTheta> {
    let t = theta.t;
    let nx = problem.state_size;
    let kk = info.num_controllers;
    let src = TupleLayout::all(info, t);
    let dst = TupleLayout::all(info, t + 1);
    let obs = src.obs_layout(info);
    let mut lam = vec![0; kk];
    let mut lam_next = vec![0; kk];
    let mut ys = vec![0; kk];
    let mut u = vec![0; kk];
    let mut out = vec![0.0; nx * dst.size()];
    for x in 0..nx {
        for li in 0..src.size() {
            let mass = theta.probs[x * src.size() + li];
            if mass == 0.0 {
                continue;
            }
            src.codes.decode_into(li, &mut lam);
            for j in 0..kk {
                u[j] = slice.action(j, lam[j]);
            }
            if let Some(step) = revealed {
                let consistent = (0..kk).all(|j| {
                    info.private_oldest_obs(t, j, lam[j]) == step.obs[j]
                        && info.revealed_action(t, j, lam[j], u[j]) == step.actions[j]
                });
                if !consistent {
                    continue;
                }
            }
            let ua = info.joint_action_index(&u);
            for xn in 0..nx {
                let predicted = problem.transition_prob(t, x, ua, xn) * mass;
                if predicted == 0.0 {
                    continue;
                }
                for oc in 0..obs.size {
                    obs.decode_into(oc, &mut ys);
                    let mut w = 1.0;
                    for j in 0..kk {
                        w *= problem.obs_prob(t + 1, j, xn, ua, ys[j]);
                        lam_next[j] = info.roll_private(t, j, lam[j], ys[j], u[j]);
                    }
                    if w == 0.0 {
                        continue;
                    }
                    out[xn * dst.size() + dst.codes.encode(&lam_next)] += w * predicted;
                }
            }
        }
    }
    normalize(out).map(|(probs, _)| CentralBeliefTheta { t: t + 1, probs })
}

/// `Ξ^k` for every information set of controller `k`, chained through
/// [`private_belief_update`] with the other controllers playing `strategies`.
///
/// `beliefs[t-1][code]` is `None` for sets of probability zero even when `k`
/// chooses its recorded actions. `likelihood[t-1][code]` is the probability of
/// the observations and other controllers' actions in the set given `k`'s
/// recorded actions; `on_policy` marks sets whose recorded actions agree with
/// `strategies`' own entry for `k`. `transitions[t-1][code]` lists
/// `(u, next code, P(next | code, u))` for every successor of positive mass.
#[derive(Debug, Clone)]
pub struct PrivateBeliefTree {
    pub k: usize,
    pub beliefs: Vec<Vec<Option<PrivateBelief>>>,
    pub likelihood: Vec<Vec<f64>>,
    pub on_policy: Vec<Vec<bool>>,
    pub transitions: Vec<Vec<Vec<(usize, usize, f64)>>>,
}

impl PrivateBeliefTree {
    pub fn belief(&self, t: usize, code: usize) -> Option<&PrivateBelief> {
        self.beliefs[t - 1][code].as_ref()
    }

    /// `P(I_t^k = code)` under the strategy tuple the tree was built with.
    pub fn probability(&self, t: usize, code: usize) -> f64 {
        if self.on_policy[t - 1][code] {
            self.likelihood[t - 1][code]
        } else {
            0.0
        }
    }

    /// Codes with a defined belief at `t`, ascending.
    pub fn reachable(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        self.beliefs[t - 1]
            .iter()
            .enumerate()
            .filter_map(|(c, b)| b.as_ref().map(|_| c))
    }
}

/// Joint step revealed when moving `I_t^k` forward, given the other
/// controllers' observations at the revealed epoch. Controller `k`'s entries
/// come from its own private component and action.
#[allow(clippy::too_many_arguments)]
fn revealed_step(
    info: &InfoStructure,
    strategies: &StrategyTuple,
    t: usize,
    k: usize,
    common: usize,
    private: usize,
    u_own: usize,
    others_obs: &[usize],
) -> JointStep {
    let s = t + 1 - info.delay;
    let mut obs = others_obs.to_vec();
    let mut actions = vec![0; info.num_controllers];
    obs[k] = info.private_oldest_obs(t, k, private);
    actions[k] = info.revealed_action(t, k, private, u_own);
    for j in (0..info.num_controllers).filter(|&j| j != k) {
        actions[j] = strategies.action(s, j, info.other_args_code(t, common, j, obs[j]));
    }
    JointStep { obs, actions }
}

/// Every successor `(u, y', revealed step, next code)` of `I_t^k = code`.
pub(crate) fn successors(
    info: &InfoStructure,
    strategies: &StrategyTuple,
    t: usize,
    k: usize,
    code: usize,
) -> Vec<(usize, usize, Option<JointStep>, usize)> {
    let (common, private) = info.split_code(t, k, code);
    let others_obs = MixedRadix::new((0..info.num_controllers).map(|j| if j == k { 1 } else { info.obs_size(j) }).collect());
    let mut buf = vec![0; info.num_controllers];
    let mut out = Vec::new();
    for u in 0..info.action_size(k) {
        for y in 0..info.obs_size(k) {
            let private_next = info.roll_private(t, k, private, y, u);
            match info.revealed_epoch(t) {
                None => {
                    let next = info.join_code(t + 1, k, common, private_next);
                    out.push((u, y, None, next));
                }
                Some(_) => {
                    for oc in 0..others_obs.size {
                        others_obs.decode_into(oc, &mut buf);
                        let step = revealed_step(info, strategies, t, k, common, private, u, &buf);
                        let c_next = info.next_common_code(t, common, info.step_code(&step.obs, &step.actions));
                        let next = info.join_code(t + 1, k, c_next, private_next);
                        out.push((u, y, Some(step), next));
                    }
                }
            }
        }
    }
    out
}

pub fn private_belief_tree(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    strategies: &StrategyTuple,
    k: usize,
) -> PrivateBeliefTree {
    let n = info.horizon;
    let mut beliefs: Vec<Vec<Option<PrivateBelief>>> = Vec::with_capacity(n);
    let mut likelihood: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut on_policy: Vec<Vec<bool>> = Vec::with_capacity(n);

    let size1 = info.num_infosets(1, k);
    let mut b1 = vec![None; size1];
    let mut l1 = vec![0.0; size1];
    for y in 0..info.obs_size(k) {
        if let Some((b, mass)) = private_belief_init_with_mass(problem, info, k, y) {
            b1[y] = Some(b);
            l1[y] = mass;
        }
    }
    beliefs.push(b1);
    likelihood.push(l1);
    on_policy.push(vec![true; size1]);

    let mut transitions: Vec<Vec<Vec<(usize, usize, f64)>>> = Vec::with_capacity(n.saturating_sub(1));
    for t in 1..n {
        let expanded: Vec<Vec<(usize, usize, PrivateBelief, f64)>> = (0..info.num_infosets(t, k))
            .into_par_iter()
            .map(|code| {
                let Some(xi) = beliefs[t - 1][code].as_ref() else {
                    return Vec::new();
                };
                let slice = CommonSlice {
                    info,
                    strategies,
                    t,
                    common: info.split_code(t, k, code).0,
                };
                successors(info, strategies, t, k, code)
                    .into_iter()
                    .filter_map(|(u, y, step, next)| {
                        let raw = private_belief_update_unnormalized(problem, info, xi, y, u, step.as_ref(), &slice);
                        normalize(raw).map(|(probs, mass)| (u, next, PrivateBelief { t: t + 1, k, probs }, mass))
                    })
                    .collect()
            })
            .collect();
        let size = info.num_infosets(t + 1, k);
        let mut bn = vec![None; size];
        let mut ln = vec![0.0; size];
        let mut pn = vec![false; size];
        let mut tr = Vec::with_capacity(expanded.len());
        for (code, children) in expanded.into_iter().enumerate() {
            let chosen = strategies.action(t, k, code);
            let mut edges = Vec::with_capacity(children.len());
            for (u, next, belief, mass) in children {
                bn[next] = Some(belief);
                ln[next] = likelihood[t - 1][code] * mass;
                pn[next] = on_policy[t - 1][code] && u == chosen;
                edges.push((u, next, mass));
            }
            tr.push(edges);
        }
        beliefs.push(bn);
        likelihood.push(ln);
        on_policy.push(pn);
        transitions.push(tr);
    }
    PrivateBeliefTree {
        k,
        beliefs,
        likelihood,
        on_policy,
        transitions,
    }
}

/// `Π_t[δ]` for every common code; `pis[t-1]` is empty for `t <= T`.
#[derive(Debug, Clone)]
pub struct PiTree {
    pub delay: usize,
    pub pis: Vec<Vec<Option<CentralBeliefPi>>>,
}

impl PiTree {
    /// `None` when undefined (`t <= T`) or unreachable.
    pub fn get(&self, t: usize, common: usize) -> Option<&CentralBeliefPi> {
        self.pis[t - 1].get(common).and_then(|p| p.as_ref())
    }
}

pub fn pi_tree(problem: &ValidatedProblem, info: &InfoStructure) -> PiTree {
    let n = info.horizon;
    let big_t = info.delay;
    let mut pis: Vec<Vec<Option<CentralBeliefPi>>> = vec![Vec::new(); n];
    if big_t + 1 > n {
        return PiTree { delay: big_t, pis };
    }
    pis[big_t] = (0..info.num_common(big_t + 1))
        .map(|c| {
            let step = info.decode_step(info.common_step(big_t + 1, c, 1));
            pi_init(problem, &step.obs)
        })
        .collect();
    for t in big_t + 1..n {
        let next: Vec<Option<CentralBeliefPi>> = (0..info.num_common(t + 1))
            .map(|c_next| {
                let c = c_next / info.step_radix();
                let pi = pis[t - 1][c].as_ref()?;
                let shared = info.decode_step(c_next % info.step_radix());
                let prev = info.decode_step(info.common_step(t, c, t - big_t));
                pi_update(problem, pi, &shared.obs, &prev.actions)
            })
            .collect();
        pis[t] = next;
    }
    PiTree { delay: big_t, pis }
}

/// `Θ_t[δ]` for every common code under a strategy tuple; `None` where `δ`
/// is unreachable.
pub fn theta_tree(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    strategies: &StrategyTuple,
) -> Vec<Vec<Option<CentralBeliefTheta>>> {
    let n = info.horizon;
    let mut out: Vec<Vec<Option<CentralBeliefTheta>>> = Vec::with_capacity(n);
    out.push(vec![Some(theta_init(problem, info))]);
    for t in 1..n {
        let next = (0..info.num_common(t + 1))
            .map(|c_next| {
                let (c, revealed) = match info.revealed_epoch(t) {
                    None => (c_next, None),
                    Some(_) => (
                        c_next / info.step_radix(),
                        Some(info.decode_step(c_next % info.step_radix())),
                    ),
                };
                let theta = out[t - 1][c].as_ref()?;
                let slice = CommonSlice {
                    info,
                    strategies,
                    t,
                    common: c,
                };
                theta_update(problem, info, theta, revealed.as_ref(), &slice)
            })
            .collect();
        out.push(next);
    }
    out
}

/// One trajectory prefix `(x_{1..t}, y_{1..t}, u_{1..t})` with its weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub prob: f64,
    pub states: Vec<usize>,
    pub obs: Vec<Vec<usize>>,
    pub actions: Vec<Vec<usize>>,
}

/// Exact law of trajectory prefixes through epoch `t`, zero-probability
/// branches pruned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub t: usize,
    pub paths: Vec<Path>,
}

impl JointDistribution {
    pub fn total_mass(&self) -> f64 {
        self.paths.iter().map(|p| p.prob).sum()
    }

    pub fn state_marginal(&self, epoch: usize, state_size: usize) -> Vec<f64> {
        let mut out = vec![0.0; state_size];
        for p in &self.paths {
            out[p.states[epoch - 1]] += p.prob;
        }
        out
    }
}

/// Forward chain-rule expansion. `choose(s, j, code)` returns the actions
/// controller `j` takes at epoch `s` in information set `code`; a single
/// action is a Dirac selection, several are branched with weight one each.
fn expand<F>(problem: &ValidatedProblem, info: &InfoStructure, t: usize, choose: F) -> JointDistribution
where
    F: Fn(usize, usize, usize) -> Vec<usize>,
{
    let kk = info.num_controllers;
    let nx = problem.state_size;
    let joint_obs: Vec<Vec<usize>> = (0..problem.joint_obs_count()).map(|i| info.decode_joint_obs(i)).collect();

    let mut paths: Vec<Path> = Vec::new();
    for x in 0..nx {
        for ys in &joint_obs {
            let p = ys
                .iter()
                .enumerate()
                .fold(problem.initial_dist[x], |acc, (j, &y)| acc * problem.obs_prob(1, j, x, 0, y));
            if p > 0.0 {
                paths.push(Path {
                    prob: p,
                    states: vec![x],
                    obs: vec![ys.clone()],
                    actions: Vec::new(),
                });
            }
        }
    }
    for s in 1..=t {
        // act at epoch s
        let mut acted = Vec::with_capacity(paths.len());
        for path in paths {
            let mut profiles: Vec<Vec<usize>> = vec![Vec::with_capacity(kk)];
            for j in 0..kk {
                let c = info.common_code_from_history(s, &path.obs, &path.actions);
                let p = info.private_code_from_history(s, j, &path.obs, &path.actions);
                let options = choose(s, j, info.join_code(s, j, c, p));
                profiles = profiles
                    .into_iter()
                    .flat_map(|prefix| {
                        options.iter().map(move |&u| {
                            let mut v = prefix.clone();
                            v.push(u);
                            v
                        })
                    })
                    .collect();
            }
            for profile in profiles {
                let mut next = path.clone();
                next.actions.push(profile);
                acted.push(next);
            }
        }
        if s == t {
            return JointDistribution { t, paths: acted };
        }
        // move to epoch s + 1
        let mut moved = Vec::new();
        for path in acted {
            let x = path.states[s - 1];
            let ua = info.joint_action_index(&path.actions[s - 1]);
            for xn in 0..nx {
                let p1 = path.prob * problem.transition_prob(s, x, ua, xn);
                if p1 == 0.0 {
                    continue;
                }
                for ys in &joint_obs {
                    let p = ys
                        .iter()
                        .enumerate()
                        .fold(p1, |acc, (j, &y)| acc * problem.obs_prob(s + 1, j, xn, ua, y));
                    if p == 0.0 {
                        continue;
                    }
                    let mut next = path.clone();
                    next.prob = p;
                    next.states.push(xn);
                    next.obs.push(ys.clone());
                    moved.push(next);
                }
            }
        }
        paths = moved;
    }
    unreachable!("loop returns at s == t")
}

/// Law of `(x_{1..t}, y_{1..t}, u_{1..t})` under a strategy tuple.
pub fn joint_distribution(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    strategies: &StrategyTuple,
    t: usize,
) -> JointDistribution {
    expand(problem, info, t, |s, j, code| vec![strategies.action(s, j, code)])
}

/// Like [`joint_distribution`] but controller `k` branches over every action
/// at epochs before `free_before` (weight one per branch). Conditioning on
/// `I_t^k` with `t >= free_before - 1` then gives laws in which `k`'s past
/// actions are fixed by the conditioning event rather than by `γ^k`.
pub fn intervened_joint_distribution(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    strategies: &StrategyTuple,
    k: usize,
    free_before: usize,
    t: usize,
) -> JointDistribution {
    expand(problem, info, t, |s, j, code| {
        if j == k && s < free_before {
            (0..info.action_size(k)).collect()
        } else {
            vec![strategies.action(s, j, code)]
        }
    })
}

/// `P(X_t, Λ_t^{-k} | I_t^k = set)` by direct summation over the joint law.
pub fn conditional_from_joint(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    joint: &JointDistribution,
    set: &InfoSet,
) -> Option<PrivateBelief> {
    let (t, k) = (set.t(), set.k());
    let target = info.infoset_code(set);
    let layout = TupleLayout::others(info, t, k);
    let mut probs = vec![0.0; problem.state_size * layout.size()];
    let mut lam = vec![0; layout.controllers.len()];
    for path in &joint.paths {
        let c = info.common_code_from_history(t, &path.obs, &path.actions);
        let p = info.private_code_from_history(t, k, &path.obs, &path.actions);
        if info.join_code(t, k, c, p) != target {
            continue;
        }
        for (idx, &j) in layout.controllers.iter().enumerate() {
            lam[idx] = info.private_code_from_history(t, j, &path.obs, &path.actions);
        }
        probs[path.states[t - 1] * layout.size() + layout.codes.encode(&lam)] += path.prob;
    }
    normalize(probs).map(|(probs, _)| PrivateBelief { t, k, probs })
}

/// [`conditional_from_joint`] for every information set of `k` at the
/// joint's epoch, together with `P(I_t^k)` (joint mass of the set).
pub fn private_conditionals(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    joint: &JointDistribution,
    k: usize,
) -> Vec<Option<(PrivateBelief, f64)>> {
    let t = joint.t;
    let layout = TupleLayout::others(info, t, k);
    let mut acc = vec![vec![0.0; problem.state_size * layout.size()]; info.num_infosets(t, k)];
    let mut lam = vec![0; layout.controllers.len()];
    for path in &joint.paths {
        let c = info.common_code_from_history(t, &path.obs, &path.actions);
        let p = info.private_code_from_history(t, k, &path.obs, &path.actions);
        for (idx, &j) in layout.controllers.iter().enumerate() {
            lam[idx] = info.private_code_from_history(t, j, &path.obs, &path.actions);
        }
        acc[info.join_code(t, k, c, p)][path.states[t - 1] * layout.size() + layout.codes.encode(&lam)] +=
            path.prob;
    }
    acc.into_iter()
        .map(|v| normalize(v).map(|(probs, mass)| (PrivateBelief { t, k, probs }, mass)))
        .collect()
}

/// `P(X_{t-T} | Δ_t)` for every common code, by direct summation. All
/// `None` for `t <= T`.
pub fn pi_conditionals(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    joint: &JointDistribution,
) -> Vec<Option<CentralBeliefPi>> {
    let t = joint.t;
    if t <= info.delay {
        return vec![None; info.num_common(t)];
    }
    let lag = t - info.delay;
    let mut acc = vec![vec![0.0; problem.state_size]; info.num_common(t)];
    for path in &joint.paths {
        let c = info.common_code_from_history(t, &path.obs, &path.actions);
        acc[c][path.states[lag - 1]] += path.prob;
    }
    acc.into_iter()
        .map(|v| normalize(v).map(|(probs, _)| CentralBeliefPi { t, probs }))
        .collect()
}

/// `P(X_t, Λ_t^(K) | Δ_t)` for every common code, by direct summation.
pub fn theta_conditionals(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    joint: &JointDistribution,
) -> Vec<Option<CentralBeliefTheta>> {
    let t = joint.t;
    let layout = TupleLayout::all(info, t);
    let mut acc = vec![vec![0.0; problem.state_size * layout.size()]; info.num_common(t)];
    let mut lam = vec![0; info.num_controllers];
    for path in &joint.paths {
        let c = info.common_code_from_history(t, &path.obs, &path.actions);
        for (j, slot) in lam.iter_mut().enumerate() {
            *slot = info.private_code_from_history(t, j, &path.obs, &path.actions);
        }
        acc[c][path.states[t - 1] * layout.size() + layout.codes.encode(&lam)] += path.prob;
    }
    acc.into_iter()
        .map(|v| normalize(v).map(|(probs, _)| CentralBeliefTheta { t, probs }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::Strategy;
    use crate::model::{random_validated, validate_problem, Dims, ProblemSpec};
    use proptest::prelude::*;

    fn identity_row(x: usize) -> Vec<f64> {
        let mut row = vec![0.0; 2];
        row[x] = 1.0;
        row
    }

    /// Binary state that never moves; every controller sees it exactly.
    fn noiseless(horizon: usize, controllers: usize, delay: usize, initial: Vec<f64>) -> ValidatedProblem {
        let na = 1 << controllers;
        let kernel: Vec<Vec<Vec<f64>>> = (0..2).map(|x| vec![identity_row(x); na]).collect();
        validate_problem(ProblemSpec {
            horizon,
            num_controllers: controllers,
            delay,
            state_size: 2,
            obs_sizes: vec![2; controllers],
            action_sizes: vec![2; controllers],
            initial_dist: initial,
            initial_obs_kernel: vec![(0..2).map(identity_row).collect(); controllers],
            obs_kernels: vec![vec![kernel.clone(); horizon - 1]; controllers],
            transition_kernels: vec![kernel; horizon - 1],
            stage_cost: vec![vec![vec![0.0; na]; 2]; horizon],
        })
        .unwrap()
    }

    /// Uniform everything: observations carry no information and the state
    /// forgets its past.
    fn uniform(horizon: usize, controllers: usize, delay: usize) -> ValidatedProblem {
        let na = 1 << controllers;
        let half = vec![0.5, 0.5];
        let kernel = vec![vec![half.clone(); na]; 2];
        validate_problem(ProblemSpec {
            horizon,
            num_controllers: controllers,
            delay,
            state_size: 2,
            obs_sizes: vec![2; controllers],
            action_sizes: vec![2; controllers],
            initial_dist: half.clone(),
            initial_obs_kernel: vec![vec![half.clone(); 2]; controllers],
            obs_kernels: vec![vec![kernel.clone(); horizon - 1]; controllers],
            transition_kernels: vec![kernel; horizon - 1],
            stage_cost: vec![vec![vec![0.0; na]; 2]; horizon],
        })
        .unwrap()
    }

    #[test]
    fn quantize_uses_the_grid() {
        assert_eq!(quantize(&[0.5, 1e-10, 0.3 + 4e-10]), vec![500_000_000, 0, 300_000_000]);
    }

    #[test]
    fn normalize_rejects_negligible_mass() {
        assert!(normalize(vec![1e-15, 0.0]).is_none());
        let (v, m) = normalize(vec![1.0, 3.0]).unwrap();
        assert_eq!(v, vec![0.25, 0.75]);
        assert_eq!(m, 4.0);
    }

    #[test]
    fn init_noiseless_is_a_point_mass() {
        let p = noiseless(2, 2, 1, vec![0.5, 0.5]);
        let info = InfoStructure::new(&p);
        let xi = private_belief_init(&p, &info, 0, 1).unwrap();
        // index x * |Y^1| + y^1
        assert_eq!(xi.probs, vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn init_with_uninformative_observation_factorizes() {
        let mut spec = random_validated(3, &Dims::desk(2, 1)).unwrap().into_inner();
        spec.initial_obs_kernel[0] = vec![vec![0.5, 0.5]; 2];
        let p = validate_problem(spec).unwrap();
        let info = InfoStructure::new(&p);
        for y in 0..2 {
            let xi = private_belief_init(&p, &info, 0, y).unwrap();
            for x in 0..2 {
                for y1 in 0..2 {
                    let expected = p.initial_dist[x] * p.initial_obs_kernel[1][x][y1];
                    assert!((xi.probs[x * 2 + y1] - expected).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn impossible_first_observation_is_unreachable() {
        let p = noiseless(2, 1, 1, vec![1.0, 0.0]);
        let info = InfoStructure::new(&p);
        assert!(private_belief_init(&p, &info, 0, 1).is_none());
    }

    #[test]
    fn update_noiseless_is_a_point_mass() {
        let p = noiseless(2, 2, 1, vec![0.5, 0.5]);
        let info = InfoStructure::new(&p);
        let tuple = StrategyTuple::zeros(&info);
        let xi = private_belief_init(&p, &info, 0, 1).unwrap();
        let slice = CommonSlice {
            info: &info,
            strategies: &tuple,
            t: 1,
            common: 0,
        };
        let step = JointStep {
            obs: vec![1, 1],
            actions: vec![0, 0],
        };
        let next = private_belief_update(&p, &info, &xi, 1, 0, Some(&step), &slice).unwrap();
        assert_eq!(next.t, 2);
        assert_eq!(next.probs, vec![0.0, 0.0, 0.0, 1.0]);
        // an observation that contradicts the state has probability zero
        assert!(private_belief_update(&p, &info, &xi, 0, 0, Some(&step), &slice).is_none());
        // so does a shared step inconsistent with the other controller
        let wrong = JointStep {
            obs: vec![1, 0],
            actions: vec![0, 0],
        };
        assert!(private_belief_update(&p, &info, &xi, 1, 0, Some(&wrong), &slice).is_none());
    }

    #[test]
    fn update_uniform_stays_uniform() {
        for delay in [1, 2, 3] {
            let p = uniform(3, 2, delay);
            let info = InfoStructure::new(&p);
            let tuple = StrategyTuple::seeded(&info, 9);
            let tree = private_belief_tree(&p, &info, &tuple, 1);
            for t in 1..=3 {
                for code in tree.reachable(t) {
                    let probs = &tree.belief(t, code).unwrap().probs;
                    // x is uniform and independent of the others' history
                    let marginal = state_marginal(probs, 2);
                    assert!((marginal[0] - 0.5).abs() < 1e-12, "t={t} delay={delay}");
                }
            }
        }
    }

    #[test]
    fn pi_tracks_the_lagged_state_when_noiseless() {
        let p = noiseless(3, 2, 1, vec![0.3, 0.7]);
        let info = InfoStructure::new(&p);
        let pi = pi_init(&p, &[1, 1]).unwrap();
        assert_eq!(pi.t, 2);
        assert_eq!(pi.probs, vec![0.0, 1.0]);
        let next = pi_update(&p, &pi, &[1, 1], &[0, 1]).unwrap();
        assert_eq!(next.probs, vec![0.0, 1.0]);
        assert!(pi_update(&p, &pi, &[0, 0], &[0, 1]).is_none());
        let tree = pi_tree(&p, &info);
        assert!(tree.get(1, 0).is_none());
        let reachable = tree.pis[1].iter().flatten().count();
        // only steps where both controllers saw the same state survive
        assert_eq!(reachable, 2 * 4);
    }

    #[test]
    fn pi_uniform_stays_uniform() {
        let p = uniform(3, 2, 1);
        let pi = pi_init(&p, &[0, 1]).unwrap();
        let next = pi_update(&p, &pi, &[1, 1], &[1, 0]).unwrap();
        assert_eq!(next.probs, vec![0.5, 0.5]);
    }

    #[test]
    fn pi_ignores_strategies() {
        // only numbers enter the update; the tree is built without a strategy
        let p = random_validated(4, &Dims::desk(3, 1)).unwrap();
        let info = InfoStructure::new(&p);
        let tree = pi_tree(&p, &info);
        for c_next in 0..info.num_common(3) {
            let c = c_next / info.step_radix();
            let shared = info.decode_step(c_next % info.step_radix());
            let prev = info.decode_step(info.common_step(2, c, 1));
            let direct = pi_update(&p, tree.get(2, c).unwrap(), &shared.obs, &prev.actions).unwrap();
            assert_eq!(&direct, tree.get(3, c_next).unwrap());
        }
    }

    #[test]
    fn theta_noiseless_is_a_point_mass() {
        let p = noiseless(3, 2, 2, vec![0.0, 1.0]);
        let info = InfoStructure::new(&p);
        let tuple = StrategyTuple::seeded(&info, 1);
        for (t0, thetas) in theta_tree(&p, &info, &tuple).iter().enumerate() {
            for theta in thetas.iter().flatten() {
                assert_eq!(theta.probs.iter().filter(|&&v| v == 1.0).count(), 1, "t={}", t0 + 1);
            }
        }
    }

    #[test]
    fn theta_single_controller_is_the_classical_filter() {
        let p = random_validated(5, &Dims::uniform(2, 1, 1, 2, 2, 2)).unwrap();
        let info = InfoStructure::new(&p);
        let tuple = StrategyTuple::seeded(&info, 2);
        let thetas = theta_tree(&p, &info, &tuple);
        for y1 in 0..2 {
            let u1 = tuple.action(1, 0, y1);
            let prior: Vec<f64> = (0..2).map(|x| p.initial_dist[x] * p.initial_obs_kernel[0][x][y1]).collect();
            let mut joint = vec![0.0; 4];
            for xn in 0..2 {
                let predicted: f64 = (0..2).map(|x| prior[x] * p.transition_kernels[0][x][u1][xn]).sum();
                for y2 in 0..2 {
                    joint[xn * 2 + y2] = predicted * p.obs_kernels[0][0][xn][u1][y2];
                }
            }
            let total: f64 = joint.iter().sum();
            let step = info.step_code(&[y1], &[u1]);
            let theta = thetas[1][step].as_ref().unwrap();
            for (a, b) in theta.probs.iter().zip(&joint) {
                assert!((a - b / total).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn deterministic_chain_has_one_trajectory() {
        let p = noiseless(3, 2, 1, vec![1.0, 0.0]);
        let info = InfoStructure::new(&p);
        let joint = joint_distribution(&p, &info, &StrategyTuple::seeded(&info, 3), 3);
        assert_eq!(joint.paths.len(), 1);
        assert_eq!(joint.paths[0].prob, 1.0);
        assert_eq!(joint.paths[0].states, vec![0, 0, 0]);
    }

    #[test]
    fn noiseless_conditional_is_a_point_mass() {
        let p = noiseless(2, 2, 1, vec![0.5, 0.5]);
        let info = InfoStructure::new(&p);
        let joint = joint_distribution(&p, &info, &StrategyTuple::zeros(&info), 2);
        let set = info.infoset_from_history(2, 0, &[vec![1, 1], vec![1, 1]], &[vec![0, 0]]);
        let xi = conditional_from_joint(&p, &info, &joint, &set).unwrap();
        assert_eq!(xi.probs, vec![0.0, 0.0, 0.0, 1.0]);
        let impossible = info.infoset_from_history(2, 0, &[vec![1, 1], vec![0, 1]], &[vec![0, 0]]);
        assert!(conditional_from_joint(&p, &info, &joint, &impossible).is_none());
    }

    #[test]
    fn belief_csv_has_one_row_per_entry() {
        let mut buf = Vec::new();
        write_belief_csv(&[0.25, 0.75], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "index,probability\n0,2.5e-1\n1,7.5e-1\n");
    }

    #[test]
    fn operator_depends_only_on_its_arguments() {
        // two information sets with the same belief and common component
        // move to the same beliefs
        let p = uniform(3, 2, 1);
        let info = InfoStructure::new(&p);
        let tuple = StrategyTuple::seeded(&info, 5);
        let tree = private_belief_tree(&p, &info, &tuple, 0);
        let t = 2;
        let codes: Vec<usize> = tree.reachable(t).collect();
        let mut pairs = 0;
        for (a, &ca) in codes.iter().enumerate() {
            for &cb in &codes[a + 1..] {
                let (xa, xb) = (tree.belief(t, ca).unwrap(), tree.belief(t, cb).unwrap());
                let (da, db) = (info.split_code(t, 0, ca).0, info.split_code(t, 0, cb).0);
                if da != db || quantize(&xa.probs) != quantize(&xb.probs) {
                    continue;
                }
                pairs += 1;
                let slice = CommonSlice {
                    info: &info,
                    strategies: &tuple,
                    t,
                    common: da,
                };
                for u in 0..2 {
                    for y in 0..2 {
                        for s in 0..info.step_radix() {
                            let step = info.decode_step(s);
                            let ua = private_belief_update(&p, &info, xa, y, u, Some(&step), &slice);
                            let ub = private_belief_update(&p, &info, xb, y, u, Some(&step), &slice);
                            match (ua, ub) {
                                (Some(ua), Some(ub)) => assert_eq!(quantize(&ua.probs), quantize(&ub.probs)),
                                (None, None) => {}
                                _ => panic!("reachability differs"),
                            }
                        }
                    }
                }
            }
        }
        assert!(pairs > 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn mixed_radix_round_trips(radices in prop::collection::vec(1usize..5, 0..5), seed in any::<u64>()) {
            let layout = MixedRadix::new(radices);
            let index = (seed as usize) % layout.size;
            let mut digits = vec![0; layout.radices.len()];
            layout.decode_into(index, &mut digits);
            prop_assert_eq!(layout.encode(&digits), index);
        }

        #[test]
        fn joint_mass_is_one(seed in 0u64..1000, delay in 1usize..=3) {
            let p = random_validated(seed, &Dims::desk(3, delay)).unwrap();
            let info = InfoStructure::new(&p);
            let joint = joint_distribution(&p, &info, &StrategyTuple::seeded(&info, seed), 3);
            prop_assert!((joint.total_mass() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn tree_beliefs_are_normalized(seed in 0u64..1000, delay in 1usize..=3, k in 0usize..2) {
            let p = random_validated(seed, &Dims::desk(3, delay)).unwrap();
            let info = InfoStructure::new(&p);
            let tree = private_belief_tree(&p, &info, &StrategyTuple::seeded(&info, seed + 1), k);
            for t in 1..=3 {
                for code in tree.reachable(t) {
                    let sum: f64 = tree.belief(t, code).unwrap().probs.iter().sum();
                    prop_assert!((sum - 1.0).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn conditionals_recover_the_state_marginal(seed in 0u64..1000, delay in 1usize..=2, t in 1usize..=3) {
            let p = random_validated(seed, &Dims::desk(3, delay)).unwrap();
            let info = InfoStructure::new(&p);
            let joint = joint_distribution(&p, &info, &StrategyTuple::seeded(&info, seed), t);
            let mut recovered = [0.0; 2];
            for (xi, mass) in private_conditionals(&p, &info, &joint, 0).into_iter().flatten() {
                for (x, m) in state_marginal(&xi.probs, 2).into_iter().enumerate() {
                    recovered[x] += mass * m;
                }
            }
            let direct = joint.state_marginal(t, 2);
            prop_assert!((recovered[0] - direct[0]).abs() < 1e-12);
            prop_assert!((recovered[1] - direct[1]).abs() < 1e-12);
        }

        #[test]
        fn own_strategy_does_not_move_private_beliefs(seed in 0u64..1000, delay in 1usize..=2, k in 0usize..2) {
            let p = random_validated(seed, &Dims::desk(3, delay)).unwrap();
            let info = InfoStructure::new(&p);
            let base = StrategyTuple::seeded(&info, seed);
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            let alt = base.with_replaced(k, Strategy::random(&info, k, &mut rng));
            for t in 1..=3 {
                let a = private_conditionals(&p, &info, &joint_distribution(&p, &info, &base, t), k);
                let b = private_conditionals(&p, &info, &joint_distribution(&p, &info, &alt, t), k);
                for (a, b) in a.iter().zip(&b) {
                    if let (Some((a, _)), Some((b, _))) = (a, b) {
                        for (x, y) in a.probs.iter().zip(&b.probs) {
                            prop_assert!((x - y).abs() <= 1e-12);
                        }
                    }
                }
            }
        }
    }
}
