//! Information patterns of the T-step delayed sharing structure.
//!
//! At epoch `t` controller `k` knows the common component
//! `Δ_t = (y_{1..t-T}, u_{1..t-T})` (all controllers, joint) and its private
//! component `Λ_t^k = (y^k_{t-T+1..t}, u^k_{t-T+1..t-1})`.
//!
//! Every component has a dense canonical code:
//! - one joint step `(y^(K), u^(K))` is `y_code * |U^(K)| + u_code`, each a
//!   mixed-radix code with controller 0 most significant;
//! - a common component is the mixed-radix code of its steps, oldest first;
//! - a private component is `obs_code * |U^k|^{#actions} + action_code`,
//!   oldest entries most significant;
//! - an information set is `common_code * #private(t, k) + private_code`.
//!
//! Enumeration in code order is lexicographic order.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ProblemSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InfoError {
    #[error("successor of epoch {t} for controller {k}: {detail}")]
    InconsistentHistory { t: usize, k: usize, detail: String },
    #[error("strategy arguments at epoch {t} need t - delay + 1 >= 1 (delay {delay})")]
    Index { t: usize, delay: usize },
    #[error("{0}")]
    OutOfRange(String),
}

/// One epoch of joint data `(y^(K), u^(K))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointStep {
    pub obs: Vec<usize>,
    pub actions: Vec<usize>,
}

/// Common component `Δ_t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CommonInfo {
    pub t: usize,
    /// `y^(K)_{1..t-T}`, each entry a K-tuple.
    pub joint_obs: Vec<Vec<usize>>,
    /// `u^(K)_{1..t-T}`.
    pub joint_actions: Vec<Vec<usize>>,
}

/// Private component `Λ_t^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrivateInfo {
    pub t: usize,
    pub k: usize,
    /// `y^k_{t-T+1..t}`, truncated at epoch 1.
    pub own_obs: Vec<usize>,
    /// `u^k_{t-T+1..t-1}`, truncated at epoch 1.
    pub own_actions: Vec<usize>,
}

/// Information set `I_t^k = (Δ_t, Λ_t^k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InfoSet {
    pub common: CommonInfo,
    pub private: PrivateInfo,
}

impl InfoSet {
    pub fn t(&self) -> usize {
        self.common.t
    }

    pub fn k(&self) -> usize {
        self.private.k
    }

    /// The information set as `(epoch, variable, controller) -> value`
    /// assignments. Variables are `'y'` and `'u'`.
    pub fn assignments(&self, delay: usize) -> Vec<(usize, char, usize, usize)> {
        let mut out = Vec::new();
        for (s, (obs, acts)) in self
            .common
            .joint_obs
            .iter()
            .zip(&self.common.joint_actions)
            .enumerate()
        {
            for (j, &y) in obs.iter().enumerate() {
                out.push((s + 1, 'y', j, y));
            }
            for (j, &u) in acts.iter().enumerate() {
                out.push((s + 1, 'u', j, u));
            }
        }
        let t = self.t();
        let first = (t + 1).saturating_sub(delay).max(1);
        let k = self.k();
        for (i, &y) in self.private.own_obs.iter().enumerate() {
            out.push((first + i, 'y', k, y));
        }
        for (i, &u) in self.private.own_actions.iter().enumerate() {
            out.push((first + i, 'u', k, u));
        }
        out.sort_unstable();
        out
    }
}

/// Sizes and code arithmetic for the information patterns of one problem.
#[derive(Debug, Clone)]
pub struct InfoStructure {
    pub horizon: usize,
    pub delay: usize,
    pub num_controllers: usize,
    obs_sizes: Vec<usize>,
    action_sizes: Vec<usize>,
    joint_obs: usize,
    joint_actions: usize,
}

fn pow(base: usize, exp: usize) -> usize {
    base.pow(exp as u32)
}

impl InfoStructure {
    pub fn new(spec: &ProblemSpec) -> Self {
        InfoStructure {
            horizon: spec.horizon,
            delay: spec.delay,
            num_controllers: spec.num_controllers,
            obs_sizes: spec.obs_sizes.clone(),
            action_sizes: spec.action_sizes.clone(),
            joint_obs: spec.joint_obs_count(),
            joint_actions: spec.joint_action_count(),
        }
    }

    pub fn obs_size(&self, k: usize) -> usize {
        self.obs_sizes[k]
    }

    pub fn action_size(&self, k: usize) -> usize {
        self.action_sizes[k]
    }

    pub fn joint_action_count(&self) -> usize {
        self.joint_actions
    }

    /// Number of distinct joint steps `(y^(K), u^(K))`.
    pub fn step_radix(&self) -> usize {
        self.joint_obs * self.joint_actions
    }

    /// Length of `Δ_t`.
    pub fn common_len(&self, t: usize) -> usize {
        t.saturating_sub(self.delay)
    }

    pub fn private_obs_len(&self, t: usize) -> usize {
        self.delay.min(t)
    }

    pub fn private_action_len(&self, t: usize) -> usize {
        (self.delay - 1).min(t - 1)
    }

    pub fn num_common(&self, t: usize) -> usize {
        pow(self.step_radix(), self.common_len(t))
    }

    pub fn num_private(&self, t: usize, k: usize) -> usize {
        pow(self.obs_sizes[k], self.private_obs_len(t))
            * pow(self.action_sizes[k], self.private_action_len(t))
    }

    pub fn num_infosets(&self, t: usize, k: usize) -> usize {
        self.num_common(t) * self.num_private(t, k)
    }

    /// First epoch whose data is still private at `t` (clamped at 1).
    pub fn first_private_epoch(&self, t: usize) -> usize {
        (t + 1).saturating_sub(self.delay).max(1)
    }

    /// Epoch whose joint step becomes common when moving from `t` to `t + 1`.
    pub fn revealed_epoch(&self, t: usize) -> Option<usize> {
        (t + 1).checked_sub(self.delay).filter(|&s| s >= 1)
    }

    pub fn joint_obs_index(&self, obs: &[usize]) -> usize {
        obs.iter()
            .zip(&self.obs_sizes)
            .fold(0, |acc, (&y, &size)| acc * size + y)
    }

    pub fn decode_joint_obs(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.num_controllers];
        for k in (0..self.num_controllers).rev() {
            out[k] = index % self.obs_sizes[k];
            index /= self.obs_sizes[k];
        }
        out
    }

    pub fn joint_action_index(&self, actions: &[usize]) -> usize {
        actions
            .iter()
            .zip(&self.action_sizes)
            .fold(0, |acc, (&u, &size)| acc * size + u)
    }

    pub fn decode_joint_action(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.num_controllers];
        for k in (0..self.num_controllers).rev() {
            out[k] = index % self.action_sizes[k];
            index /= self.action_sizes[k];
        }
        out
    }

    pub fn step_code(&self, obs: &[usize], actions: &[usize]) -> usize {
        self.joint_obs_index(obs) * self.joint_actions + self.joint_action_index(actions)
    }

    pub fn decode_step(&self, code: usize) -> JointStep {
        JointStep {
            obs: self.decode_joint_obs(code / self.joint_actions),
            actions: self.decode_joint_action(code % self.joint_actions),
        }
    }

    /// Code of `Δ_{t+1}` given the code of `Δ_t` and the step revealed in
    /// between (ignored while nothing is revealed).
    pub fn next_common_code(&self, t: usize, common: usize, step: usize) -> usize {
        if self.revealed_epoch(t).is_some() {
            common * self.step_radix() + step
        } else {
            common
        }
    }

    /// Code of `Δ_s` for `s <= t`, a prefix of `Δ_t`.
    pub fn common_prefix_code(&self, t: usize, common: usize, s: usize) -> usize {
        let drop = self.common_len(t) - self.common_len(s);
        common / pow(self.step_radix(), drop)
    }

    /// The joint step of epoch `s` recorded in `Δ_t`.
    pub fn common_step(&self, t: usize, common: usize, s: usize) -> usize {
        let len = self.common_len(t);
        debug_assert!(s >= 1 && s <= len);
        (common / pow(self.step_radix(), len - s)) % self.step_radix()
    }

    pub fn encode_common(&self, info: &CommonInfo) -> usize {
        info.joint_obs
            .iter()
            .zip(&info.joint_actions)
            .fold(0, |acc, (y, u)| acc * self.step_radix() + self.step_code(y, u))
    }

    pub fn decode_common(&self, t: usize, code: usize) -> CommonInfo {
        let len = self.common_len(t);
        let mut joint_obs = Vec::with_capacity(len);
        let mut joint_actions = Vec::with_capacity(len);
        for s in 1..=len {
            let step = self.decode_step(self.common_step(t, code, s));
            joint_obs.push(step.obs);
            joint_actions.push(step.actions);
        }
        CommonInfo {
            t,
            joint_obs,
            joint_actions,
        }
    }

    fn action_block(&self, t: usize, k: usize) -> usize {
        pow(self.action_sizes[k], self.private_action_len(t))
    }

    pub fn encode_private(&self, info: &PrivateInfo) -> usize {
        let ny = self.obs_sizes[info.k];
        let nu = self.action_sizes[info.k];
        let obs = info.own_obs.iter().fold(0, |acc, &y| acc * ny + y);
        let act = info.own_actions.iter().fold(0, |acc, &u| acc * nu + u);
        obs * self.action_block(info.t, info.k) + act
    }

    pub fn decode_private(&self, t: usize, k: usize, code: usize) -> PrivateInfo {
        let ny = self.obs_sizes[k];
        let nu = self.action_sizes[k];
        let block = self.action_block(t, k);
        let (mut obs, mut act) = (code / block, code % block);
        let mut own_obs = vec![0; self.private_obs_len(t)];
        for slot in own_obs.iter_mut().rev() {
            *slot = obs % ny;
            obs /= ny;
        }
        let mut own_actions = vec![0; self.private_action_len(t)];
        for slot in own_actions.iter_mut().rev() {
            *slot = act % nu;
            act /= nu;
        }
        PrivateInfo {
            t,
            k,
            own_obs,
            own_actions,
        }
    }

    pub fn infoset_code(&self, info: &InfoSet) -> usize {
        let (t, k) = (info.t(), info.k());
        self.encode_common(&info.common) * self.num_private(t, k) + self.encode_private(&info.private)
    }

    /// Splits an information set code into `(common, private)` codes.
    #[inline]
    pub fn split_code(&self, t: usize, k: usize, code: usize) -> (usize, usize) {
        let np = self.num_private(t, k);
        (code / np, code % np)
    }

    #[inline]
    pub fn join_code(&self, t: usize, k: usize, common: usize, private: usize) -> usize {
        common * self.num_private(t, k) + private
    }

    pub fn decode_infoset(&self, t: usize, k: usize, code: usize) -> InfoSet {
        let (c, p) = self.split_code(t, k, code);
        InfoSet {
            common: self.decode_common(t, c),
            private: self.decode_private(t, k, p),
        }
    }

    /// Most recent own observation `y_t^k`.
    #[inline]
    pub fn private_latest_obs(&self, t: usize, k: usize, private: usize) -> usize {
        (private / self.action_block(t, k)) % self.obs_sizes[k]
    }

    /// Oldest observation of `Λ_t^k`; it belongs to epoch `t - T + 1` once
    /// `t >= T`.
    #[inline]
    pub fn private_oldest_obs(&self, t: usize, k: usize, private: usize) -> usize {
        let len = self.private_obs_len(t);
        (private / self.action_block(t, k)) / pow(self.obs_sizes[k], len - 1)
    }

    /// Oldest recorded action of `Λ_t^k`, if any.
    #[inline]
    pub fn private_oldest_action(&self, t: usize, k: usize, private: usize) -> Option<usize> {
        let len = self.private_action_len(t);
        (len > 0).then(|| (private % self.action_block(t, k)) / pow(self.action_sizes[k], len - 1))
    }

    /// `Λ_{t+1}^k` from `Λ_t^k`, the new observation `y_{t+1}^k` and the
    /// current action `u_t^k`.
    #[inline]
    pub fn roll_private(&self, t: usize, k: usize, private: usize, y_next: usize, u_now: usize) -> usize {
        let ny = self.obs_sizes[k];
        let nu = self.action_sizes[k];
        let block = self.action_block(t, k);
        let (obs, act) = (private / block, private % block);
        let (lo, lo_next) = (self.private_obs_len(t), self.private_obs_len(t + 1));
        let obs_next = if lo_next > lo {
            obs * ny + y_next
        } else {
            (obs % pow(ny, lo - 1)) * ny + y_next
        };
        let (la, la_next) = (self.private_action_len(t), self.private_action_len(t + 1));
        let act_next = if la_next == 0 {
            0
        } else if la_next > la {
            act * nu + u_now
        } else {
            (act % pow(nu, la - 1)) * nu + u_now
        };
        obs_next * self.action_block(t + 1, k) + act_next
    }

    /// Value of `u_{t-T+1}^j` as seen from `Λ_t^j`: the oldest recorded action
    /// when `T >= 2`, otherwise the current action itself.
    #[inline]
    pub fn revealed_action(&self, t: usize, j: usize, private: usize, u_now: usize) -> usize {
        if self.delay >= 2 {
            self.private_oldest_action(t, j, private)
                .expect("recorded action exists once something is revealed")
        } else {
            u_now
        }
    }

    /// All common components at `t` in lexicographic order.
    pub fn enumerate_common(&self, t: usize) -> Vec<CommonInfo> {
        (0..self.num_common(t))
            .map(|c| self.decode_common(t, c))
            .collect()
    }

    /// All private components of controller `k` at `t` in lexicographic order.
    pub fn enumerate_private(&self, t: usize, k: usize) -> Vec<PrivateInfo> {
        (0..self.num_private(t, k))
            .map(|p| self.decode_private(t, k, p))
            .collect()
    }

    /// Builds `I_t^k` from a full history of joint observations and actions
    /// (index 0 is epoch 1). `obs` must cover epochs `1..=t`, `actions`
    /// epochs `1..t`.
    pub fn infoset_from_history(
        &self,
        t: usize,
        k: usize,
        obs: &[Vec<usize>],
        actions: &[Vec<usize>],
    ) -> InfoSet {
        let m = self.common_len(t);
        let first = self.first_private_epoch(t);
        InfoSet {
            common: CommonInfo {
                t,
                joint_obs: obs[..m].to_vec(),
                joint_actions: actions[..m].to_vec(),
            },
            private: PrivateInfo {
                t,
                k,
                own_obs: (first..=t).map(|s| obs[s - 1][k]).collect(),
                own_actions: (first..t).map(|s| actions[s - 1][k]).collect(),
            },
        }
    }

    /// Code of `Δ_t` computed from a history, as in [`Self::infoset_from_history`].
    pub fn common_code_from_history(&self, t: usize, obs: &[Vec<usize>], actions: &[Vec<usize>]) -> usize {
        (0..self.common_len(t)).fold(0, |acc, s| {
            acc * self.step_radix() + self.step_code(&obs[s], &actions[s])
        })
    }

    /// Code of `Λ_t^k` computed from a history.
    pub fn private_code_from_history(
        &self,
        t: usize,
        k: usize,
        obs: &[Vec<usize>],
        actions: &[Vec<usize>],
    ) -> usize {
        let first = self.first_private_epoch(t);
        let ny = self.obs_sizes[k];
        let nu = self.action_sizes[k];
        let o = (first..=t).fold(0, |acc, s| acc * ny + obs[s - 1][k]);
        let a = (first..t).fold(0, |acc, s| acc * nu + actions[s - 1][k]);
        o * self.action_block(t, k) + a
    }

    /// `I_{t+1}^k` from `I_t^k`, the new own observation `y_{t+1}^k`, the own
    /// action `u_t^k` and, once `t - T + 1 >= 1`, the joint step of epoch
    /// `t - T + 1` that becomes common. Controller `k`'s entries of that step
    /// must match what `I_t^k` already records.
    pub fn successor_infoset(
        &self,
        info: &InfoSet,
        y_next: usize,
        u_now: usize,
        revealed: Option<&JointStep>,
    ) -> Result<InfoSet, InfoError> {
        let t = info.t();
        let k = info.k();
        let inconsistent = |detail: String| InfoError::InconsistentHistory { t, k, detail };
        if t >= self.horizon {
            return Err(InfoError::OutOfRange(format!(
                "no successor after the horizon {}",
                self.horizon
            )));
        }
        if y_next >= self.obs_sizes[k] || u_now >= self.action_sizes[k] {
            return Err(InfoError::OutOfRange(format!(
                "observation {y_next} or action {u_now} out of range for controller {k}"
            )));
        }
        let mut common = info.common.clone();
        common.t = t + 1;
        match (self.revealed_epoch(t), revealed) {
            (None, None) => {}
            (None, Some(_)) => {
                return Err(inconsistent("nothing is shared at this epoch".into()));
            }
            (Some(s), None) => {
                return Err(inconsistent(format!("epoch {s} must be shared")));
            }
            (Some(_), Some(step)) => {
                if step.obs.len() != self.num_controllers || step.actions.len() != self.num_controllers {
                    return Err(inconsistent("shared step has the wrong arity".into()));
                }
                let recorded_y = info.private.own_obs[0];
                let recorded_u = if self.delay >= 2 {
                    info.private.own_actions[0]
                } else {
                    u_now
                };
                if step.obs[k] != recorded_y {
                    return Err(inconsistent(format!(
                        "shared observation {} disagrees with recorded {recorded_y}",
                        step.obs[k]
                    )));
                }
                if step.actions[k] != recorded_u {
                    return Err(inconsistent(format!(
                        "shared action {} disagrees with recorded {recorded_u}",
                        step.actions[k]
                    )));
                }
                for j in 0..self.num_controllers {
                    if step.obs[j] >= self.obs_sizes[j] || step.actions[j] >= self.action_sizes[j] {
                        return Err(InfoError::OutOfRange(format!(
                            "shared step entry for controller {j} out of range"
                        )));
                    }
                }
                common.joint_obs.push(step.obs.clone());
                common.joint_actions.push(step.actions.clone());
            }
        }
        let mut own_obs = info.private.own_obs.clone();
        own_obs.push(y_next);
        if own_obs.len() > self.private_obs_len(t + 1) {
            own_obs.remove(0);
        }
        let mut own_actions = info.private.own_actions.clone();
        own_actions.push(u_now);
        while own_actions.len() > self.private_action_len(t + 1) {
            own_actions.remove(0);
        }
        Ok(InfoSet {
            common,
            private: PrivateInfo {
                t: t + 1,
                k,
                own_obs,
                own_actions,
            },
        })
    }

    /// Arguments `(Δ_s, Λ_s^j)` of `γ_s^j` for every `j != k`, where
    /// `s = t - T + 1`, reconstructed from `Δ_t` and the free observations
    /// `y_s^j` (`others_obs[j]`; the entry for `k` is ignored).
    pub fn other_strategy_args(
        &self,
        k: usize,
        common: &CommonInfo,
        others_obs: &[usize],
    ) -> Result<Vec<(usize, InfoSet)>, InfoError> {
        let t = common.t;
        let s = self
            .revealed_epoch(t)
            .filter(|&s| s <= t)
            .ok_or(InfoError::Index { t, delay: self.delay })?;
        let m = self.common_len(s);
        let first = self.first_private_epoch(s);
        Ok((0..self.num_controllers)
            .filter(|&j| j != k)
            .map(|j| {
                let mut own_obs: Vec<usize> = (first..s).map(|e| common.joint_obs[e - 1][j]).collect();
                own_obs.push(others_obs[j]);
                let own_actions = (first..s).map(|e| common.joint_actions[e - 1][j]).collect();
                let info = InfoSet {
                    common: CommonInfo {
                        t: s,
                        joint_obs: common.joint_obs[..m].to_vec(),
                        joint_actions: common.joint_actions[..m].to_vec(),
                    },
                    private: PrivateInfo {
                        t: s,
                        k: j,
                        own_obs,
                        own_actions,
                    },
                };
                (j, info)
            })
            .collect())
    }

    /// Code-level [`Self::other_strategy_args`] for one controller `j`:
    /// information set code of `j` at `s = t - T + 1`.
    #[inline]
    pub fn other_args_code(&self, t: usize, common: usize, j: usize, y_s: usize) -> usize {
        let s = t + 1 - self.delay;
        let first = self.first_private_epoch(s);
        let ny = self.obs_sizes[j];
        let nu = self.action_sizes[j];
        let mut obs = 0;
        let mut act = 0;
        for e in first..s {
            let step = self.decode_step(self.common_step(t, common, e));
            obs = obs * ny + step.obs[j];
            act = act * nu + step.actions[j];
        }
        obs = obs * ny + y_s;
        let private = obs * self.action_block(s, j) + act;
        self.join_code(s, j, self.common_prefix_code(t, common, s), private)
    }
}

/// A deterministic strategy `γ^k`: per epoch, one action per information set
/// code.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Strategy {
    pub controller: usize,
    /// `epochs[t-1][code]`.
    pub epochs: Vec<Vec<usize>>,
}

impl Strategy {
    pub fn constant(info: &InfoStructure, k: usize, action: usize) -> Strategy {
        Strategy {
            controller: k,
            epochs: (1..=info.horizon)
                .map(|t| vec![action; info.num_infosets(t, k)])
                .collect(),
        }
    }

    pub fn zeros(info: &InfoStructure, k: usize) -> Strategy {
        Self::constant(info, k, 0)
    }

    pub fn random<R: Rng>(info: &InfoStructure, k: usize, rng: &mut R) -> Strategy {
        let nu = info.action_size(k);
        Strategy {
            controller: k,
            epochs: (1..=info.horizon)
                .map(|t| (0..info.num_infosets(t, k)).map(|_| rng.gen_range(0..nu)).collect())
                .collect(),
        }
    }

    #[inline]
    pub fn action(&self, t: usize, code: usize) -> usize {
        self.epochs[t - 1][code]
    }

    pub fn action_at(&self, info: &InfoStructure, set: &InfoSet) -> usize {
        self.action(set.t(), info.infoset_code(set))
    }

    /// Totality and range check against the information structure.
    pub fn check(&self, info: &InfoStructure) -> Result<(), InfoError> {
        let k = self.controller;
        if k >= info.num_controllers {
            return Err(InfoError::OutOfRange(format!("controller {k}")));
        }
        if self.epochs.len() != info.horizon {
            return Err(InfoError::OutOfRange(format!(
                "strategy for controller {k} has {} epochs, expected {}",
                self.epochs.len(),
                info.horizon
            )));
        }
        for (ti, table) in self.epochs.iter().enumerate() {
            let expected = info.num_infosets(ti + 1, k);
            if table.len() != expected {
                return Err(InfoError::OutOfRange(format!(
                    "controller {k} epoch {}: {} entries, expected {expected}",
                    ti + 1,
                    table.len()
                )));
            }
            if let Some(bad) = table.iter().find(|&&u| u >= info.action_size(k)) {
                return Err(InfoError::OutOfRange(format!(
                    "controller {k} epoch {}: action {bad} out of range",
                    ti + 1
                )));
            }
        }
        Ok(())
    }
}

/// One strategy per controller, in controller order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyTuple {
    pub strategies: Vec<Strategy>,
}

impl StrategyTuple {
    pub fn zeros(info: &InfoStructure) -> StrategyTuple {
        StrategyTuple {
            strategies: (0..info.num_controllers).map(|k| Strategy::zeros(info, k)).collect(),
        }
    }

    pub fn random<R: Rng>(info: &InfoStructure, rng: &mut R) -> StrategyTuple {
        StrategyTuple {
            strategies: (0..info.num_controllers)
                .map(|k| Strategy::random(info, k, rng))
                .collect(),
        }
    }

    pub fn seeded(info: &InfoStructure, seed: u64) -> StrategyTuple {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Self::random(info, &mut rng)
    }

    pub fn get(&self, k: usize) -> &Strategy {
        &self.strategies[k]
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn with_replaced(&self, k: usize, strategy: Strategy) -> StrategyTuple {
        let mut out = self.clone();
        out.strategies[k] = strategy;
        out
    }

    #[inline]
    pub fn action(&self, t: usize, k: usize, code: usize) -> usize {
        self.strategies[k].action(t, code)
    }

    pub fn check(&self, info: &InfoStructure) -> Result<(), InfoError> {
        if self.strategies.len() != info.num_controllers {
            return Err(InfoError::OutOfRange(format!(
                "{} strategies for {} controllers",
                self.strategies.len(),
                info.num_controllers
            )));
        }
        for (k, s) in self.strategies.iter().enumerate() {
            if s.controller != k {
                return Err(InfoError::OutOfRange(format!(
                    "strategy at position {k} is labelled controller {}",
                    s.controller
                )));
            }
            s.check(info)?;
        }
        Ok(())
    }
}
