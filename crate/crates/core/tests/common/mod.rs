//! Oracles written without the library's filters or solvers: plain
//! recursive enumeration of trajectories and a textbook POMDP solver.

#![allow(dead_code)]

use pbp_core::info::{InfoSet, InfoStructure, StrategyTuple};
use pbp_core::model::ProblemSpec;

pub struct Trajectory {
    pub prob: f64,
    pub states: Vec<usize>,
    pub obs: Vec<Vec<usize>>,
    pub actions: Vec<Vec<usize>>,
}

impl Trajectory {
    pub fn cost_from(&self, p: &ProblemSpec, t: usize) -> f64 {
        (t..=p.horizon)
            .map(|s| p.cost(s, self.states[s - 1], p.joint_action_index(&self.actions[s - 1])))
            .sum()
    }
}

/// Every tuple of per-controller observations, controller 0 slowest.
pub fn all_joint_obs(p: &ProblemSpec) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for &ny in &p.obs_sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..ny).map(move |y| {
                    let mut v = prefix.clone();
                    v.push(y);
                    v
                })
            })
            .collect();
    }
    out
}

fn cartesian(options: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for opts in options {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |&u| {
                    let mut v = prefix.clone();
                    v.push(u);
                    v
                })
            })
            .collect();
    }
    out
}

/// Full trajectories. `choose(t, j, set)` lists the actions controller `j`
/// may take at `set`; several actions are branched with weight one each.
pub fn trajectories(
    p: &ProblemSpec,
    info: &InfoStructure,
    choose: &dyn Fn(usize, usize, &InfoSet) -> Vec<usize>,
) -> Vec<Trajectory> {
    let joint = all_joint_obs(p);
    let mut out = Vec::new();
    for x in 0..p.state_size {
        for ys in &joint {
            let mut prob = p.initial_dist[x];
            for (j, &y) in ys.iter().enumerate() {
                prob *= p.initial_obs_kernel[j][x][y];
            }
            if prob > 0.0 {
                walk(p, info, choose, &joint, 1, prob, vec![x], vec![ys.clone()], Vec::new(), &mut out);
            }
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn walk(
    p: &ProblemSpec,
    info: &InfoStructure,
    choose: &dyn Fn(usize, usize, &InfoSet) -> Vec<usize>,
    joint: &[Vec<usize>],
    t: usize,
    prob: f64,
    states: Vec<usize>,
    obs: Vec<Vec<usize>>,
    actions: Vec<Vec<usize>>,
    out: &mut Vec<Trajectory>,
) {
    let options: Vec<Vec<usize>> = (0..p.num_controllers)
        .map(|j| choose(t, j, &info.infoset_from_history(t, j, &obs, &actions)))
        .collect();
    for profile in cartesian(&options) {
        let mut actions = actions.clone();
        actions.push(profile.clone());
        if t == p.horizon {
            out.push(Trajectory {
                prob,
                states: states.clone(),
                obs: obs.clone(),
                actions,
            });
            continue;
        }
        let x = states[t - 1];
        let a = p.joint_action_index(&profile);
        for xn in 0..p.state_size {
            let moved = prob * p.transition_kernels[t - 1][x][a][xn];
            for ys in joint {
                let mut q = moved;
                for (j, &y) in ys.iter().enumerate() {
                    q *= p.obs_kernels[j][t - 1][xn][a][y];
                }
                if q == 0.0 {
                    continue;
                }
                let mut states = states.clone();
                states.push(xn);
                let mut obs = obs.clone();
                obs.push(ys.clone());
                walk(p, info, choose, joint, t + 1, q, states, obs, actions.clone(), out);
            }
        }
    }
}

pub fn follow<'a>(
    info: &'a InfoStructure,
    strategies: &'a StrategyTuple,
) -> impl Fn(usize, usize, &InfoSet) -> Vec<usize> + 'a {
    move |_, j, set| vec![strategies.get(j).action_at(info, set)]
}

/// Expected total cost by enumerating every trajectory.
pub fn enumerated_cost(p: &ProblemSpec, info: &InfoStructure, strategies: &StrategyTuple) -> f64 {
    let choose = follow(info, strategies);
    trajectories(p, info, &choose)
        .iter()
        .map(|tr| tr.prob * tr.cost_from(p, 1))
        .sum()
}

/// `E[Σ_{s >= t} ℓ | I_t^k = i]` for every code `i` at `t`, with controller
/// `k`'s actions before `t` fixed by `i` and later ones by `strategies`.
/// `None` where the set has zero probability.
pub fn cost_to_go(
    p: &ProblemSpec,
    info: &InfoStructure,
    strategies: &StrategyTuple,
    k: usize,
    t: usize,
) -> Vec<Option<f64>> {
    let choose = |s: usize, j: usize, set: &InfoSet| {
        if j == k && s < t {
            (0..p.action_sizes[k]).collect()
        } else {
            vec![strategies.get(j).action_at(info, set)]
        }
    };
    let size = info.num_infosets(t, k);
    let mut mass = vec![0.0; size];
    let mut weighted = vec![0.0; size];
    for tr in trajectories(p, info, &choose) {
        let code = info.infoset_code(&info.infoset_from_history(t, k, &tr.obs, &tr.actions));
        mass[code] += tr.prob;
        weighted[code] += tr.prob * tr.cost_from(p, t);
    }
    mass.iter()
        .zip(&weighted)
        .map(|(&m, &w)| (m > 1e-14).then(|| w / m))
        .collect()
}

/// Optimal value of a single-controller instance by value iteration over the
/// tree of reachable beliefs on the state.
pub fn pomdp_value(p: &ProblemSpec) -> f64 {
    assert_eq!(p.num_controllers, 1);
    let mut total = 0.0;
    for y in 0..p.obs_sizes[0] {
        let b: Vec<f64> = (0..p.state_size)
            .map(|x| p.initial_dist[x] * p.initial_obs_kernel[0][x][y])
            .collect();
        let m: f64 = b.iter().sum();
        if m > 0.0 {
            let b: Vec<f64> = b.iter().map(|v| v / m).collect();
            total += m * pomdp_belief_value(p, 1, &b);
        }
    }
    total
}

fn pomdp_belief_value(p: &ProblemSpec, t: usize, b: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    for u in 0..p.action_sizes[0] {
        let mut v: f64 = (0..p.state_size).map(|x| b[x] * p.stage_cost[t - 1][x][u]).sum();
        if t < p.horizon {
            for y in 0..p.obs_sizes[0] {
                let next: Vec<f64> = (0..p.state_size)
                    .map(|xn| {
                        (0..p.state_size)
                            .map(|x| b[x] * p.transition_kernels[t - 1][x][u][xn])
                            .sum::<f64>()
                            * p.obs_kernels[0][t - 1][xn][u][y]
                    })
                    .collect();
                let m: f64 = next.iter().sum();
                if m > 0.0 {
                    let next: Vec<f64> = next.iter().map(|v| v / m).collect();
                    v += m * pomdp_belief_value(p, t + 1, &next);
                }
            }
        }
        if v < best {
            best = v;
        }
    }
    best
}

/// Replaces every observation kernel with the uniform law, so observations
/// carry no information.
pub fn blind(mut p: ProblemSpec) -> ProblemSpec {
    for k in 0..p.num_controllers {
        let flat = vec![1.0 / p.obs_sizes[k] as f64; p.obs_sizes[k]];
        for row in p.initial_obs_kernel[k].iter_mut() {
            *row = flat.clone();
        }
        for row in p.obs_kernels[k].iter_mut().flatten().flatten() {
            *row = flat.clone();
        }
    }
    p
}
