//! Finite decentralized stochastic network instances.
//!
//! A [`ProblemSpec`] stores every kernel as nested row-major arrays exactly as
//! they appear in problem files. Joint actions `u^(K)` are flattened with a
//! mixed-radix code where controller 0 is the most significant digit.

use std::ops::Deref;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Absolute tolerance for kernel row sums.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("{what} must be at least 1")]
    ZeroSize { what: String },
    #[error("delay {delay} outside 1..={horizon}")]
    Delay { delay: usize, horizon: usize },
    #[error("{what}: expected length {expected}, found {found}")]
    Shape {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("{what}: probability {value} outside [0, 1]")]
    Probability { what: String, value: f64 },
    #[error("{what}: row sums to {sum}, not 1")]
    RowSum { what: String, sum: f64 },
    #[error("stage_cost[{t}][{x}][{action}] is not finite")]
    NonFiniteCost { t: usize, x: usize, action: usize },
    #[error("problem file: {0}")]
    Io(String),
    #[error("problem file: {0}")]
    Parse(String),
}

impl ValidationError {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            ValidationError::ZeroSize { .. } => "zero-size",
            ValidationError::Delay { .. } => "delay",
            ValidationError::Shape { .. } => "size-mismatch",
            ValidationError::Probability { .. } => "probability-range",
            ValidationError::RowSum { .. } => "row-sum",
            ValidationError::NonFiniteCost { .. } => "non-finite-cost",
            ValidationError::Io(_) => "io",
            ValidationError::Parse(_) => "parse",
        }
    }
}

/// A finite decentralized network with a T-step delayed sharing pattern.
///
/// Epochs are `1..=horizon`; controllers and all space elements are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub horizon: usize,
    pub num_controllers: usize,
    pub delay: usize,
    pub state_size: usize,
    pub obs_sizes: Vec<usize>,
    pub action_sizes: Vec<usize>,
    /// Law of `X_1`.
    pub initial_dist: Vec<f64>,
    /// `[k][x][y]`: `q_1^k(y | x)`.
    pub initial_obs_kernel: Vec<Vec<Vec<f64>>>,
    /// `[k][t-2][x][u][y]`: `q_t^k(y | x_t, u_{t-1})` for `t = 2..=n`.
    pub obs_kernels: Vec<Vec<Vec<Vec<Vec<f64>>>>>,
    /// `[t-1][x][u][x']`: `s_{t+1}(x' | x_t, u_t)` for `t = 1..n`.
    pub transition_kernels: Vec<Vec<Vec<Vec<f64>>>>,
    /// `[t-1][x][u]`: `ℓ(t, x, u)` for `t = 1..=n`.
    pub stage_cost: Vec<Vec<Vec<f64>>>,
}

/// Sizes for [`random_problem`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub horizon: usize,
    pub num_controllers: usize,
    pub delay: usize,
    pub state_size: usize,
    pub obs_sizes: Vec<usize>,
    pub action_sizes: Vec<usize>,
}

impl Dims {
    /// Same sizes for every controller.
    pub fn uniform(
        horizon: usize,
        num_controllers: usize,
        delay: usize,
        state_size: usize,
        obs_size: usize,
        action_size: usize,
    ) -> Self {
        Dims {
            horizon,
            num_controllers,
            delay,
            state_size,
            obs_sizes: vec![obs_size; num_controllers],
            action_sizes: vec![action_size; num_controllers],
        }
    }

    /// The desk-scale grid instance: two controllers, binary spaces.
    pub fn desk(horizon: usize, delay: usize) -> Self {
        Dims::uniform(horizon, 2, delay, 2, 2, 2)
    }

    fn check(&self) -> Result<(), ValidationError> {
        check_sizes(
            self.horizon,
            self.num_controllers,
            self.delay,
            self.state_size,
            &self.obs_sizes,
            &self.action_sizes,
        )
    }
}

fn check_sizes(
    horizon: usize,
    num_controllers: usize,
    delay: usize,
    state_size: usize,
    obs_sizes: &[usize],
    action_sizes: &[usize],
) -> Result<(), ValidationError> {
    let zero = |what: &str| ValidationError::ZeroSize {
        what: what.to_string(),
    };
    if horizon == 0 {
        return Err(zero("horizon"));
    }
    if num_controllers == 0 {
        return Err(zero("num_controllers"));
    }
    if delay == 0 || delay > horizon {
        return Err(ValidationError::Delay { delay, horizon });
    }
    if state_size == 0 {
        return Err(zero("state_size"));
    }
    shape("obs_sizes", num_controllers, obs_sizes.len())?;
    shape("action_sizes", num_controllers, action_sizes.len())?;
    for (k, &s) in obs_sizes.iter().enumerate() {
        if s == 0 {
            return Err(zero(&format!("obs_sizes[{k}]")));
        }
    }
    for (k, &s) in action_sizes.iter().enumerate() {
        if s == 0 {
            return Err(zero(&format!("action_sizes[{k}]")));
        }
    }
    Ok(())
}

fn shape(what: &str, expected: usize, found: usize) -> Result<(), ValidationError> {
    if expected != found {
        return Err(ValidationError::Shape {
            what: what.to_string(),
            expected,
            found,
        });
    }
    Ok(())
}

fn check_row(what: &str, row: &[f64], len: usize) -> Result<(), ValidationError> {
    shape(what, len, row.len())?;
    for (i, &p) in row.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(ValidationError::Probability {
                what: format!("{what}[{i}]"),
                value: p,
            });
        }
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
        return Err(ValidationError::RowSum {
            what: what.to_string(),
            sum,
        });
    }
    Ok(())
}

fn normalize_row(row: &mut [f64]) {
    let sum: f64 = row.iter().sum();
    if sum > 0.0 {
        row.iter_mut().for_each(|p| *p /= sum);
    }
}

impl ProblemSpec {
    pub fn joint_action_count(&self) -> usize {
        self.action_sizes.iter().product()
    }

    pub fn joint_obs_count(&self) -> usize {
        self.obs_sizes.iter().product()
    }

    /// Mixed-radix code of a joint action, controller 0 most significant.
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

    /// Observation probability `q_t^k(y | x, u_{t-1})`; the joint action is
    /// ignored at `t = 1`.
    #[inline]
    pub fn obs_prob(&self, t: usize, k: usize, x: usize, prev_action: usize, y: usize) -> f64 {
        if t == 1 {
            self.initial_obs_kernel[k][x][y]
        } else {
            self.obs_kernels[k][t - 2][x][prev_action][y]
        }
    }

    /// Transition probability `s_{t+1}(x' | x_t = x, u_t)`.
    #[inline]
    pub fn transition_prob(&self, t: usize, x: usize, action: usize, next: usize) -> f64 {
        self.transition_kernels[t - 1][x][action][next]
    }

    #[inline]
    pub fn cost(&self, t: usize, x: usize, action: usize) -> f64 {
        self.stage_cost[t - 1][x][action]
    }

    /// Checks every invariant, returning the first violation found.
    pub fn validate(&self) -> Result<(), ValidationError> {
        check_sizes(
            self.horizon,
            self.num_controllers,
            self.delay,
            self.state_size,
            &self.obs_sizes,
            &self.action_sizes,
        )?;
        let n = self.horizon;
        let nx = self.state_size;
        let na = self.joint_action_count();
        check_row("initial_dist", &self.initial_dist, nx)?;

        shape("initial_obs_kernel", self.num_controllers, self.initial_obs_kernel.len())?;
        for (k, kernel) in self.initial_obs_kernel.iter().enumerate() {
            shape(&format!("initial_obs_kernel[{k}]"), nx, kernel.len())?;
            for (x, row) in kernel.iter().enumerate() {
                check_row(&format!("initial_obs_kernel[{k}][{x}]"), row, self.obs_sizes[k])?;
            }
        }

        shape("obs_kernels", self.num_controllers, self.obs_kernels.len())?;
        for (k, per_t) in self.obs_kernels.iter().enumerate() {
            shape(&format!("obs_kernels[{k}]"), n - 1, per_t.len())?;
            for (ti, kernel) in per_t.iter().enumerate() {
                shape(&format!("obs_kernels[{k}][{ti}]"), nx, kernel.len())?;
                for (x, rows) in kernel.iter().enumerate() {
                    shape(&format!("obs_kernels[{k}][{ti}][{x}]"), na, rows.len())?;
                    for (u, row) in rows.iter().enumerate() {
                        check_row(
                            &format!("obs_kernels[{k}][{ti}][{x}][{u}]"),
                            row,
                            self.obs_sizes[k],
                        )?;
                    }
                }
            }
        }

        shape("transition_kernels", n - 1, self.transition_kernels.len())?;
        for (ti, kernel) in self.transition_kernels.iter().enumerate() {
            shape(&format!("transition_kernels[{ti}]"), nx, kernel.len())?;
            for (x, rows) in kernel.iter().enumerate() {
                shape(&format!("transition_kernels[{ti}][{x}]"), na, rows.len())?;
                for (u, row) in rows.iter().enumerate() {
                    check_row(&format!("transition_kernels[{ti}][{x}][{u}]"), row, nx)?;
                }
            }
        }

        shape("stage_cost", n, self.stage_cost.len())?;
        for (ti, table) in self.stage_cost.iter().enumerate() {
            shape(&format!("stage_cost[{ti}]"), nx, table.len())?;
            for (x, row) in table.iter().enumerate() {
                shape(&format!("stage_cost[{ti}][{x}]"), na, row.len())?;
                if let Some(u) = row.iter().position(|c| !c.is_finite()) {
                    return Err(ValidationError::NonFiniteCost { t: ti, x, action: u });
                }
            }
        }
        Ok(())
    }

    /// Copy with every kernel row divided by its sum.
    pub fn normalized(&self) -> ProblemSpec {
        let mut out = self.clone();
        normalize_row(&mut out.initial_dist);
        out.initial_obs_kernel
            .iter_mut()
            .flatten()
            .for_each(|row| normalize_row(row));
        out.obs_kernels
            .iter_mut()
            .flatten()
            .flatten()
            .flatten()
            .for_each(|row| normalize_row(row));
        out.transition_kernels
            .iter_mut()
            .flatten()
            .flatten()
            .for_each(|row| normalize_row(row));
        out
    }

    /// SHA-256 of the canonical JSON encoding, hex encoded.
    pub fn instance_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("problem spec serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn from_json_str(text: &str) -> Result<ProblemSpec, ValidationError> {
        serde_json::from_str(text).map_err(|e| ValidationError::Parse(e.to_string()))
    }

    pub fn from_json_file(path: &Path) -> Result<ProblemSpec, ValidationError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ValidationError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// One controller, one epoch, singleton spaces, zero cost.
    pub fn singleton() -> ProblemSpec {
        ProblemSpec {
            horizon: 1,
            num_controllers: 1,
            delay: 1,
            state_size: 1,
            obs_sizes: vec![1],
            action_sizes: vec![1],
            initial_dist: vec![1.0],
            initial_obs_kernel: vec![vec![vec![1.0]]],
            obs_kernels: vec![vec![]],
            transition_kernels: vec![],
            stage_cost: vec![vec![vec![0.0]]],
        }
    }
}

/// A problem that has passed [`validate_problem`]. Immutable.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ValidatedProblem(ProblemSpec);

impl ValidatedProblem {
    pub fn spec(&self) -> &ProblemSpec {
        &self.0
    }

    pub fn into_inner(self) -> ProblemSpec {
        self.0
    }
}

impl Deref for ValidatedProblem {
    type Target = ProblemSpec;

    fn deref(&self) -> &ProblemSpec {
        &self.0
    }
}

pub fn validate_problem(spec: ProblemSpec) -> Result<ValidatedProblem, ValidationError> {
    spec.validate()?;
    Ok(ValidatedProblem(spec))
}

fn random_row(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    // (0, 1] so a row can never be all zeros
    let mut row: Vec<f64> = (0..len).map(|_| 1.0 - rng.gen::<f64>()).collect();
    normalize_row(&mut row);
    row
}

/// Deterministic random instance. Kernel rows are uniform draws normalized to
/// sum to one; costs are uniform on `[0, 1)`.
pub fn random_problem(seed: u64, dims: &Dims) -> Result<ProblemSpec, ValidationError> {
    dims.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nx = dims.state_size;
    let na: usize = dims.action_sizes.iter().product();
    let n = dims.horizon;

    let initial_dist = random_row(&mut rng, nx);
    let initial_obs_kernel = dims
        .obs_sizes
        .iter()
        .map(|&ny| (0..nx).map(|_| random_row(&mut rng, ny)).collect())
        .collect();
    let obs_kernels = dims
        .obs_sizes
        .iter()
        .map(|&ny| {
            (1..n)
                .map(|_| {
                    (0..nx)
                        .map(|_| (0..na).map(|_| random_row(&mut rng, ny)).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    let transition_kernels = (1..n)
        .map(|_| {
            (0..nx)
                .map(|_| (0..na).map(|_| random_row(&mut rng, nx)).collect())
                .collect()
        })
        .collect();
    let stage_cost = (0..n)
        .map(|_| {
            (0..nx)
                .map(|_| (0..na).map(|_| rng.gen::<f64>()).collect())
                .collect()
        })
        .collect();

    Ok(ProblemSpec {
        horizon: n,
        num_controllers: dims.num_controllers,
        delay: dims.delay,
        state_size: nx,
        obs_sizes: dims.obs_sizes.clone(),
        action_sizes: dims.action_sizes.clone(),
        initial_dist,
        initial_obs_kernel,
        obs_kernels,
        transition_kernels,
        stage_cost,
    })
}

/// [`random_problem`] followed by validation.
pub fn random_validated(seed: u64, dims: &Dims) -> Result<ValidatedProblem, ValidationError> {
    validate_problem(random_problem(seed, dims)?)
}
