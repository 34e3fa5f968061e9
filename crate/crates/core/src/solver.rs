//! Expected costs, person-by-person best responses, PbP iteration and
//! verification, and value tables grouped by information states.
//!
//! Minimizations pick the lowest action index among exact ties. Information
//! sets with zero probability (even when controller `k` chooses its recorded
//! actions) get value 0, action 0 and `reachable = false`.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filters::{
    pi_tree, private_belief_tree, quantize, theta_tree, PrivateBelief, PrivateBeliefTree, TupleLayout,
};
use crate::info::{InfoError, InfoStructure, Strategy, StrategyTuple};
use crate::model::ValidatedProblem;
use crate::TOLERANCE;

pub const DEFAULT_BUDGET: u128 = 10_000_000;
pub const DEFAULT_EPSILON: f64 = 1e-9;
pub const DEFAULT_MAX_ITERS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("controller {k} has {count} strategies to enumerate, budget is {budget}")]
    BudgetExceeded { k: usize, count: u128, budget: u128 },
    #[error("{backend} grouping at t={t}: info sets {first} and {second} disagree ({detail})")]
    SeparationViolation {
        backend: &'static str,
        t: usize,
        first: usize,
        second: usize,
        detail: String,
    },
    #[error("strategy of controller {j} does not factor through {backend} at t={t}: info sets {first} and {second} choose different actions")]
    NotSeparated {
        backend: &'static str,
        j: usize,
        t: usize,
        first: usize,
        second: usize,
    },
    #[error(transparent)]
    Info(#[from] InfoError),
}

/// Lowest index among the minimal entries.
pub fn argmin(values: &[f64]) -> (usize, f64) {
    let mut best = (0, values[0]);
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct FullState {
    x: usize,
    common: usize,
    private: Vec<usize>,
}

type Particles = BTreeMap<FullState, f64>;

struct Dynamics<'a> {
    problem: &'a ValidatedProblem,
    info: &'a InfoStructure,
    joint_obs: Vec<Vec<usize>>,
}

impl<'a> Dynamics<'a> {
    fn new(problem: &'a ValidatedProblem, info: &'a InfoStructure) -> Self {
        let joint_obs = (0..problem.joint_obs_count()).map(|i| info.decode_joint_obs(i)).collect();
        Dynamics {
            problem,
            info,
            joint_obs,
        }
    }

    fn initial(&self) -> Particles {
        let mut out = Particles::new();
        for x in 0..self.problem.state_size {
            for ys in &self.joint_obs {
                let p = ys.iter().enumerate().fold(self.problem.initial_dist[x], |acc, (j, &y)| {
                    acc * self.problem.obs_prob(1, j, x, 0, y)
                });
                if p > 0.0 {
                    out.insert(
                        FullState {
                            x,
                            common: 0,
                            private: ys.clone(),
                        },
                        p,
                    );
                }
            }
        }
        out
    }

    /// Expected stage cost at `t` and, if `next`, the particles at `t + 1`,
    /// with controller `j` acting `act(j, code)` at information set `code`.
    fn advance<F: Fn(usize, usize) -> usize>(
        &self,
        t: usize,
        particles: &Particles,
        act: F,
        next: bool,
    ) -> (f64, Particles) {
        let (problem, info) = (self.problem, self.info);
        let kk = info.num_controllers;
        let mut cost = 0.0;
        let mut out = Particles::new();
        let mut u = vec![0; kk];
        let mut obs = vec![0; kk];
        let mut acts = vec![0; kk];
        for (s, &p) in particles {
            for (j, slot) in u.iter_mut().enumerate() {
                *slot = act(j, info.join_code(t, j, s.common, s.private[j]));
            }
            let ua = info.joint_action_index(&u);
            cost += p * problem.cost(t, s.x, ua);
            if !next {
                continue;
            }
            let common = match info.revealed_epoch(t) {
                None => s.common,
                Some(_) => {
                    for j in 0..kk {
                        obs[j] = info.private_oldest_obs(t, j, s.private[j]);
                        acts[j] = info.revealed_action(t, j, s.private[j], u[j]);
                    }
                    info.next_common_code(t, s.common, info.step_code(&obs, &acts))
                }
            };
            for xn in 0..problem.state_size {
                let p1 = p * problem.transition_prob(t, s.x, ua, xn);
                if p1 == 0.0 {
                    continue;
                }
                for ys in &self.joint_obs {
                    let w = ys
                        .iter()
                        .enumerate()
                        .fold(p1, |acc, (j, &y)| acc * problem.obs_prob(t + 1, j, xn, ua, y));
                    if w == 0.0 {
                        continue;
                    }
                    let private = (0..kk)
                        .map(|j| info.roll_private(t, j, s.private[j], ys[j], u[j]))
                        .collect();
                    *out.entry(FullState { x: xn, common, private }).or_insert(0.0) += w;
                }
            }
        }
        (cost, out)
    }
}

/// `E Σ_t ℓ(t, X_t, U_t)` under a strategy tuple, by forward propagation of
/// the law of `(X_t, Δ_t, Λ_t^(K))`.
pub fn expected_total_cost(problem: &ValidatedProblem, info: &InfoStructure, strategies: &StrategyTuple) -> f64 {
    let dynamics = Dynamics::new(problem, info);
    let mut particles = dynamics.initial();
    let mut total = 0.0;
    for t in 1..=info.horizon {
        let (cost, next) = dynamics.advance(t, &particles, |j, code| strategies.action(t, j, code), t < info.horizon);
        total += cost;
        particles = next;
    }
    total
}

/// `Σ_{x, λ^{-k}} ξ(x, λ^{-k}) ℓ(t, x, u, γ_t^{-k}(δ, λ^{-k}))` for every `u`.
pub fn stage_costs(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    strategies: &StrategyTuple,
    k: usize,
    t: usize,
    code: usize,
    xi: &PrivateBelief,
) -> Vec<f64> {
    let common = info.split_code(t, k, code).0;
    let layout = TupleLayout::others(info, t, k);
    let mut lam = vec![0; layout.controllers.len()];
    let mut u = vec![0; info.num_controllers];
    let mut q = vec![0.0; info.action_size(k)];
    for li in 0..layout.size() {
        layout.codes.decode_into(li, &mut lam);
        for (idx, &j) in layout.controllers.iter().enumerate() {
            u[j] = strategies.action(t, j, info.join_code(t, j, common, lam[idx]));
        }
        for (uk, slot) in q.iter_mut().enumerate() {
            u[k] = uk;
            let ua = info.joint_action_index(&u);
            for x in 0..problem.state_size {
                let p = xi.probs[x * layout.size() + li];
                if p != 0.0 {
                    *slot += p * problem.cost(t, x, ua);
                }
            }
        }
    }
    q
}

/// The payoff as `Σ_t Σ_i P(i) E[ℓ | I_t^k = i]` with the conditional laws
/// given by `Ξ^k`.
pub fn expected_cost_via_beliefs(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    strategies: &StrategyTuple,
    k: usize,
) -> f64 {
    let tree = private_belief_tree(problem, info, strategies, k);
    let mut total = 0.0;
    for t in 1..=info.horizon {
        for code in tree.reachable(t).collect::<Vec<_>>() {
            let p = tree.probability(t, code);
            if p == 0.0 {
                continue;
            }
            let xi = tree.belief(t, code).expect("reachable");
            let q = stage_costs(problem, info, strategies, k, t, code, xi);
            total += p * q[strategies.action(t, k, code)];
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Raw,
    SemiSeparated,
    SeparatedPi,
    InfoStateTheta,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Raw => "raw",
            Backend::SemiSeparated => "xi-delta-lambda",
            Backend::SeparatedPi => "xi-pi-lambda",
            Backend::InfoStateTheta => "xi-theta",
        }
    }
}

/// Values of one epoch indexed by information set code.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EpochValues {
    pub values: Vec<f64>,
    pub actions: Vec<usize>,
    pub reachable: Vec<bool>,
    /// Cost-to-go of every action; empty on unreachable sets.
    #[serde(skip)]
    pub q: Vec<Vec<f64>>,
}

/// Cost-to-go of controller `k` on raw information sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueTable {
    pub k: usize,
    pub backend: Backend,
    pub epochs: Vec<EpochValues>,
}

impl ValueTable {
    pub fn value(&self, t: usize, code: usize) -> f64 {
        self.epochs[t - 1].values[code]
    }

    pub fn action(&self, t: usize, code: usize) -> usize {
        self.epochs[t - 1].actions[code]
    }

    pub fn is_reachable(&self, t: usize, code: usize) -> bool {
        self.epochs[t - 1].reachable[code]
    }

    pub fn q(&self, t: usize, code: usize) -> &[f64] {
        &self.epochs[t - 1].q[code]
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "code", "reachable", "value", "action"])?;
        for (t0, epoch) in self.epochs.iter().enumerate() {
            for code in 0..epoch.values.len() {
                w.write_record([
                    (t0 + 1).to_string(),
                    code.to_string(),
                    epoch.reachable[code].to_string(),
                    format!("{:e}", epoch.values[code]),
                    epoch.actions[code].to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Result of [`best_response_dp`].
#[derive(Debug, Clone)]
pub struct BestResponse {
    pub k: usize,
    pub table: ValueTable,
    pub strategy: Strategy,
    /// `J(γ^k_best, γ^{-k}) = Σ_{y_1^k} P(y_1^k) V_1(y_1^k)`.
    pub payoff: f64,
    pub tree: PrivateBeliefTree,
}

/// Backward induction over raw information sets of controller `k` with the
/// other controllers fixed to `strategies`.
pub fn best_response_dp(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    strategies: &StrategyTuple,
    k: usize,
) -> BestResponse {
    let n = info.horizon;
    let tree = private_belief_tree(problem, info, strategies, k);
    let mut epochs = vec![EpochValues::default(); n];
    for t in (1..=n).rev() {
        let later = (t < n).then(|| &epochs[t].values);
        let rows: Vec<(f64, usize, bool, Vec<f64>)> = (0..info.num_infosets(t, k))
            .into_par_iter()
            .map(|code| {
                let Some(xi) = tree.belief(t, code) else {
                    return (0.0, 0, false, Vec::new());
                };
                let mut q = stage_costs(problem, info, strategies, k, t, code, xi);
                if let Some(later) = later {
                    for &(u, next, w) in &tree.transitions[t - 1][code] {
                        q[u] += w * later[next];
                    }
                }
                let (a, v) = argmin(&q);
                (v, a, true, q)
            })
            .collect();
        let mut epoch = EpochValues::default();
        for (v, a, r, q) in rows {
            epoch.values.push(v);
            epoch.actions.push(a);
            epoch.reachable.push(r);
            epoch.q.push(q);
        }
        epochs[t - 1] = epoch;
    }
    let payoff = tree.likelihood[0]
        .iter()
        .zip(&epochs[0].values)
        .map(|(p, v)| p * v)
        .sum();
    let strategy = Strategy {
        controller: k,
        epochs: epochs.iter().map(|e| e.actions.clone()).collect(),
    };
    BestResponse {
        k,
        table: ValueTable {
            k,
            backend: Backend::Raw,
            epochs,
        },
        strategy,
        payoff,
        tree,
    }
}

/// Result of [`best_response_bruteforce`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForce {
    pub k: usize,
    pub payoff: f64,
    pub strategy: Strategy,
    /// Number of strategies enumerated.
    pub count: u128,
}

/// Number of strategies [`best_response_bruteforce`] enumerates: distinct
/// assignments on the sets reached by epochs `1..n-1` of each assignment,
/// with the last epoch chosen pointwise.
pub fn strategy_count(info: &InfoStructure, tree: &PrivateBeliefTree) -> u128 {
    let n = info.horizon;
    let k = tree.k;
    let mut later = vec![1u128; info.num_infosets(n, k)];
    for t in (1..n).rev() {
        let mut here = vec![1u128; info.num_infosets(t, k)];
        for code in tree.reachable(t).collect::<Vec<_>>() {
            let mut per_action = vec![1u128; info.action_size(k)];
            for &(u, next, _) in &tree.transitions[t - 1][code] {
                per_action[u] = per_action[u].saturating_mul(later[next]);
            }
            here[code] = per_action.into_iter().fold(0u128, |a, b| a.saturating_add(b));
        }
        later = here;
    }
    tree.reachable(1).fold(1u128, |acc, code| acc.saturating_mul(later[code]))
}

type Plan = Vec<Vec<(usize, usize)>>;

struct Search<'a> {
    dynamics: Dynamics<'a>,
    strategies: &'a StrategyTuple,
    tree: &'a PrivateBeliefTree,
    k: usize,
}

impl Search<'_> {
    fn reached(&self, t: usize, particles: &mut Particles) -> Vec<usize> {
        let info = self.dynamics.info;
        let k = self.k;
        particles.retain(|s, _| self.tree.belief(t, info.join_code(t, k, s.common, s.private[k])).is_some());
        let mut codes: Vec<usize> = particles
            .keys()
            .map(|s| info.join_code(t, k, s.common, s.private[k]))
            .collect();
        codes.sort_unstable();
        codes.dedup();
        codes
    }

    fn assignment(&self, codes: &[usize], mut index: usize) -> Vec<usize> {
        let nu = self.dynamics.info.action_size(self.k);
        let mut out = vec![0; codes.len()];
        for slot in out.iter_mut().rev() {
            *slot = index % nu;
            index /= nu;
        }
        out
    }

    fn step(&self, t: usize, particles: &Particles, codes: &[usize], assign: &[usize]) -> (f64, Particles) {
        let last = t == self.dynamics.info.horizon;
        self.dynamics.advance(
            t,
            particles,
            |j, code| {
                if j == self.k {
                    assign[codes.binary_search(&code).expect("reached code")]
                } else {
                    self.strategies.action(t, j, code)
                }
            },
            !last,
        )
    }

    /// Pointwise minimization at the final epoch.
    fn finish(&self, particles: &Particles, codes: &[usize]) -> (f64, Vec<usize>) {
        let info = self.dynamics.info;
        let problem = self.dynamics.problem;
        let (n, k) = (info.horizon, self.k);
        let nu = info.action_size(k);
        let mut q = vec![vec![0.0; nu]; codes.len()];
        let mut u = vec![0; info.num_controllers];
        for (s, &p) in particles {
            let code = info.join_code(n, k, s.common, s.private[k]);
            let row = &mut q[codes.binary_search(&code).expect("reached code")];
            for (j, slot) in u.iter_mut().enumerate() {
                if j != k {
                    *slot = self.strategies.action(n, j, info.join_code(n, j, s.common, s.private[j]));
                }
            }
            for (uk, cell) in row.iter_mut().enumerate() {
                u[k] = uk;
                *cell += p * problem.cost(n, s.x, info.joint_action_index(&u));
            }
        }
        let mut total = 0.0;
        let mut chosen = Vec::with_capacity(codes.len());
        for row in &q {
            let (a, v) = argmin(row);
            total += v;
            chosen.push(a);
        }
        (total, chosen)
    }

    fn run(&self, t: usize, mut particles: Particles, acc: f64, plan: &mut Plan, best: &mut Option<(f64, Plan)>) {
        let codes = self.reached(t, &mut particles);
        if t == self.dynamics.info.horizon {
            let (cost, chosen) = self.finish(&particles, &codes);
            let total = acc + cost;
            if best.as_ref().is_none_or(|b| total < b.0) {
                let mut full = plan.clone();
                full.push(codes.iter().copied().zip(chosen).collect());
                *best = Some((total, full));
            }
            return;
        }
        let nu = self.dynamics.info.action_size(self.k);
        let combos = nu.pow(codes.len() as u32);
        for index in 0..combos {
            let assign = self.assignment(&codes, index);
            let (cost, next) = self.step(t, &particles, &codes, &assign);
            plan.push(codes.iter().copied().zip(assign).collect());
            self.run(t + 1, next, acc + cost, plan, best);
            plan.pop();
        }
    }
}

/// Exhaustive minimization of `J(γ^k, γ^{-k})` over the strategies of
/// controller `k`, in lexicographic order of the assignments, keeping the
/// first strict minimum. Sets never reached get action 0.
pub fn best_response_bruteforce(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    strategies: &StrategyTuple,
    k: usize,
    budget: u128,
) -> Result<BruteForce, SolverError> {
    let tree = private_belief_tree(problem, info, strategies, k);
    let count = strategy_count(info, &tree);
    if count > budget {
        return Err(SolverError::BudgetExceeded { k, count, budget });
    }
    let search = Search {
        dynamics: Dynamics::new(problem, info),
        strategies,
        tree: &tree,
        k,
    };
    let mut particles = search.dynamics.initial();
    let best = if info.horizon == 1 {
        let mut best = None;
        search.run(1, particles, 0.0, &mut Vec::new(), &mut best);
        best
    } else {
        let codes = search.reached(1, &mut particles);
        let combos = info.action_size(k).pow(codes.len() as u32);
        let branches: Vec<Option<(f64, Plan)>> = (0..combos)
            .into_par_iter()
            .map(|index| {
                let assign = search.assignment(&codes, index);
                let (cost, next) = search.step(1, &particles, &codes, &assign);
                let mut plan = vec![codes.iter().copied().zip(assign).collect()];
                let mut best = None;
                search.run(2, next, cost, &mut plan, &mut best);
                best
            })
            .collect();
        branches.into_iter().flatten().fold(None, |acc: Option<(f64, Plan)>, b| match acc {
            Some(a) if a.0 <= b.0 => Some(a),
            _ => Some(b),
        })
    };
    let (payoff, plan) = best.expect("at least one strategy");
    let mut strategy = Strategy::zeros(info, k);
    for (t0, assigned) in plan.into_iter().enumerate() {
        for (code, a) in assigned {
            strategy.epochs[t0][code] = a;
        }
    }
    Ok(BruteForce {
        k,
        payoff,
        strategy,
        count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PbpOptions {
    pub epsilon: f64,
    pub max_iters: usize,
}

impl Default for PbpOptions {
    fn default() -> Self {
        PbpOptions {
            epsilon: DEFAULT_EPSILON,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PbpResult {
    pub strategies: StrategyTuple,
    pub payoff: f64,
    /// Rounds run.
    pub iterations: usize,
    pub converged: bool,
    /// Payoff before the first round and after every round.
    pub trace: Vec<f64>,
    /// Controller replaced at each accepted swap, in order.
    pub accepted: Vec<usize>,
}

/// Round-robin best responses; a swap is accepted only if it lowers the
/// payoff by more than `epsilon`.
pub fn pbp_solve(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    initial: &StrategyTuple,
    options: PbpOptions,
) -> Result<PbpResult, SolverError> {
    initial.check(info)?;
    let mut current = initial.clone();
    let mut payoff = expected_total_cost(problem, info, &current);
    let mut trace = vec![payoff];
    let mut accepted = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < options.max_iters {
        iterations += 1;
        let mut improved = false;
        for k in 0..info.num_controllers {
            let br = best_response_dp(problem, info, &current, k);
            if payoff - br.payoff > options.epsilon {
                current = current.with_replaced(k, br.strategy);
                payoff = expected_total_cost(problem, info, &current);
                accepted.push(k);
                improved = true;
            }
        }
        trace.push(payoff);
        if !improved {
            converged = true;
            break;
        }
    }
    Ok(PbpResult {
        strategies: current,
        payoff,
        iterations,
        converged,
        trace,
        accepted,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub k: usize,
    pub payoff: f64,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub holds: bool,
    pub payoff: f64,
    /// Largest payoff decrease any unilateral deviation achieves.
    pub worst_gap: f64,
    /// Per controller: `J(γ) - min_{γ^k} J(γ^k, γ^{-k})`.
    pub gaps: Vec<f64>,
    pub witness: Option<Witness>,
}

/// Checks by enumeration that no controller can lower the payoff by more
/// than the tolerance through a unilateral deviation.
pub fn verify_pbp(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    strategies: &StrategyTuple,
    budget: u128,
) -> Result<Verification, SolverError> {
    strategies.check(info)?;
    let payoff = expected_total_cost(problem, info, strategies);
    let mut gaps = Vec::with_capacity(info.num_controllers);
    let mut witness: Option<Witness> = None;
    let mut worst_gap = f64::NEG_INFINITY;
    for k in 0..info.num_controllers {
        let bf = best_response_bruteforce(problem, info, strategies, k, budget)?;
        let gap = payoff - bf.payoff;
        gaps.push(gap);
        if gap > worst_gap {
            worst_gap = gap;
            if gap > TOLERANCE {
                witness = Some(Witness {
                    k,
                    payoff: bf.payoff,
                    strategy: bf.strategy,
                });
            }
        }
    }
    Ok(Verification {
        holds: worst_gap <= TOLERANCE,
        payoff,
        worst_gap,
        gaps,
        witness,
    })
}

/// Grouping key of an information set. Probabilities are quantized with
/// [`quantize`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BeliefKey {
    pub xi: Vec<i64>,
    pub common: Option<usize>,
    pub central: Option<Vec<i64>>,
    pub private: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub key: BeliefKey,
    pub value: f64,
    pub action: usize,
    /// Raw information set codes, ascending.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupedTable {
    pub k: usize,
    pub backend: Backend,
    /// `epochs[t-1]` in key order.
    pub epochs: Vec<Vec<Group>>,
}

impl GroupedTable {
    pub fn group_of(&self, t: usize, code: usize) -> Option<&Group> {
        self.epochs[t - 1].iter().find(|g| g.members.binary_search(&code).is_ok())
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "group", "value", "action", "members"])?;
        for (t0, groups) in self.epochs.iter().enumerate() {
            for (g, group) in groups.iter().enumerate() {
                let members: Vec<String> = group.members.iter().map(|m| m.to_string()).collect();
                w.write_record([
                    (t0 + 1).to_string(),
                    g.to_string(),
                    format!("{:e}", group.value),
                    group.action.to_string(),
                    members.join(" "),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Groups the reachable entries of a raw table. Members of a group must share
/// the value, and the representative's action must be optimal for every
/// member, both within the tolerance.
fn group_table<F>(br: &BestResponse, info: &InfoStructure, backend: Backend, key: F) -> Result<GroupedTable, SolverError>
where
    F: Fn(usize, usize, &PrivateBelief) -> Option<BeliefKey>,
{
    let k = br.k;
    let mut epochs = Vec::with_capacity(info.horizon);
    for t in 1..=info.horizon {
        let mut groups: BTreeMap<BeliefKey, Vec<usize>> = BTreeMap::new();
        for code in br.tree.reachable(t) {
            if let Some(key) = key(t, code, br.tree.belief(t, code).expect("reachable")) {
                groups.entry(key).or_default().push(code);
            }
        }
        let mut out = Vec::with_capacity(groups.len());
        for (key, members) in groups {
            let rep = members[0];
            let value = br.table.value(t, rep);
            let action = br.table.action(t, rep);
            for &m in &members[1..] {
                let v = br.table.value(t, m);
                let violation = |detail: String| SolverError::SeparationViolation {
                    backend: backend.name(),
                    t,
                    first: rep,
                    second: m,
                    detail,
                };
                if (v - value).abs() > TOLERANCE {
                    return Err(violation(format!("values {value} and {v}")));
                }
                if br.table.q(t, m)[action] > v + TOLERANCE {
                    return Err(violation(format!("action {action} is not optimal for {m}")));
                }
            }
            out.push(Group {
                key,
                value,
                action,
                members,
            });
        }
        epochs.push(out);
    }
    Ok(GroupedTable { k, backend, epochs })
}

/// Requires every other controller's action to be a function of `key` on
/// the information sets it reaches under `tuple`.
fn check_factoring<F>(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    tuple: &StrategyTuple,
    k: usize,
    backend: Backend,
    key: F,
) -> Result<(), SolverError>
where
    F: Fn(usize, usize, usize, &PrivateBelief) -> Option<BeliefKey>,
{
    for j in (0..info.num_controllers).filter(|&j| j != k) {
        let tree = private_belief_tree(problem, info, tuple, j);
        for t in 1..=info.horizon {
            let mut seen: BTreeMap<BeliefKey, (usize, usize)> = BTreeMap::new();
            for code in tree.reachable(t).filter(|&c| tree.on_policy[t - 1][c]) {
                let Some(key) = key(t, j, code, tree.belief(t, code).expect("reachable")) else {
                    continue;
                };
                let action = tuple.action(t, j, code);
                match seen.get(&key) {
                    Some(&(first, a)) if a != action => {
                        return Err(SolverError::NotSeparated {
                            backend: backend.name(),
                            j,
                            t,
                            first,
                            second: code,
                        })
                    }
                    Some(_) => {}
                    None => {
                        seen.insert(key, (code, action));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Raw values grouped by `(Ξ, Δ, Λ^k)`.
pub fn semi_separated_table(info: &InfoStructure, br: &BestResponse) -> Result<GroupedTable, SolverError> {
    let k = br.k;
    group_table(br, info, Backend::SemiSeparated, |t, code, xi| {
        let (c, p) = info.split_code(t, k, code);
        Some(BeliefKey {
            xi: quantize(&xi.probs),
            common: Some(c),
            central: None,
            private: Some(p),
        })
    })
}

/// Raw values grouped by `(Ξ, Π, Λ^k)`; `Π` is absent for `t <= T`. The
/// other controllers must factor through `(Ξ^j, Π, Λ^j)` when controller `k`
/// plays `br`.
pub fn separated_pi_table(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    strategies: &StrategyTuple,
    br: &BestResponse,
) -> Result<GroupedTable, SolverError> {
    let k = br.k;
    let pis = pi_tree(problem, info);
    let central = |t: usize, c: usize| -> Option<Option<Vec<i64>>> {
        if t <= info.delay {
            Some(None)
        } else {
            pis.get(t, c).map(|pi| Some(quantize(&pi.probs)))
        }
    };
    let tuple = strategies.with_replaced(k, br.strategy.clone());
    check_factoring(problem, info, &tuple, k, Backend::SeparatedPi, |t, j, code, xi| {
        let (c, p) = info.split_code(t, j, code);
        Some(BeliefKey {
            xi: quantize(&xi.probs),
            common: None,
            central: central(t, c)?,
            private: Some(p),
        })
    })?;
    group_table(br, info, Backend::SeparatedPi, |t, code, xi| {
        let (c, p) = info.split_code(t, k, code);
        Some(BeliefKey {
            xi: quantize(&xi.probs),
            common: None,
            central: central(t, c)?,
            private: Some(p),
        })
    })
}

/// Raw values grouped by `(Ξ, Θ)`, with `Θ` computed under `strategies`.
/// Only sets whose common component is reachable under `strategies` are
/// keyed. The other controllers must factor through `(Ξ^j, Θ)`.
pub fn info_state_theta_table(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    strategies: &StrategyTuple,
    br: &BestResponse,
) -> Result<GroupedTable, SolverError> {
    let k = br.k;
    let thetas = theta_tree(problem, info, strategies);
    let central = |t: usize, c: usize| thetas[t - 1][c].as_ref().map(|th| quantize(&th.probs));
    check_factoring(problem, info, strategies, k, Backend::InfoStateTheta, |t, j, code, xi| {
        let c = info.split_code(t, j, code).0;
        Some(BeliefKey {
            xi: quantize(&xi.probs),
            common: None,
            central: Some(central(t, c)?),
            private: None,
        })
    })?;
    group_table(br, info, Backend::InfoStateTheta, |t, code, xi| {
        let c = info.split_code(t, k, code).0;
        Some(BeliefKey {
            xi: quantize(&xi.probs),
            common: None,
            central: Some(central(t, c)?),
            private: None,
        })
    })
}
