//! `oracle-compare`: filters against joint-distribution conditionals, DP
//! against enumeration, PbP output against verification, and the grouped
//! tables against the raw one.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{csv_text, emit, load_problem, report_json, CliError, Format, RunConfig};
use crate::filters::{
    intervened_joint_distribution, joint_distribution, pi_conditionals, pi_tree, private_belief_tree,
    private_conditionals, theta_conditionals, theta_tree,
};
use crate::info::{InfoStructure, StrategyTuple};
use crate::model::{random_validated, Dims, ValidatedProblem};
use crate::solver::{
    best_response_bruteforce, best_response_dp, expected_cost_via_beliefs, expected_total_cost,
    info_state_theta_table, pbp_solve, semi_separated_table, separated_pi_table, verify_pbp, GroupedTable,
    PbpOptions, SolverError,
};
use crate::TOLERANCE;

pub const GRID_SEEDS: std::ops::RangeInclusive<u64> = 1..=20;
pub const GRID_DELAYS: [usize; 2] = [1, 2];
pub const GRID_HORIZON: usize = 3;

pub const CHECKS: [&str; 5] = [
    "filters",
    "dp-vs-enumeration",
    "pbp-verify",
    "payoff-via-beliefs",
    "separation",
];

#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub check: &'static str,
    pub pass: bool,
    pub max_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub seed: u64,
    pub delay: usize,
    pub instance_hash: String,
    pub cells: Vec<Cell>,
}

impl Row {
    pub fn pass(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn cell(check: &'static str, max_error: f64, consistent: bool) -> Cell {
    Cell {
        check,
        pass: consistent && max_error <= TOLERANCE,
        max_error,
    }
}

/// Ξ, Π and Θ recursions against conditionals of the exact joint law.
pub fn check_filters(problem: &ValidatedProblem, info: &InfoStructure, tuple: &StrategyTuple) -> Cell {
    let mut err: f64 = 0.0;
    let mut consistent = true;
    for k in 0..info.num_controllers {
        let tree = private_belief_tree(problem, info, tuple, k);
        for t in 1..=info.horizon {
            let joint = intervened_joint_distribution(problem, info, tuple, k, t, t);
            for (code, oracle) in private_conditionals(problem, info, &joint, k).iter().enumerate() {
                match (tree.belief(t, code), oracle) {
                    (Some(a), Some((b, _))) => err = err.max(max_diff(&a.probs, &b.probs)),
                    (None, None) => {}
                    _ => consistent = false,
                }
            }
        }
    }
    let pis = pi_tree(problem, info);
    let thetas = theta_tree(problem, info, tuple);
    for t in 1..=info.horizon {
        let joint = joint_distribution(problem, info, tuple, t);
        if t > info.delay {
            for (c, oracle) in pi_conditionals(problem, info, &joint).iter().enumerate() {
                if let Some(oracle) = oracle {
                    match pis.get(t, c) {
                        Some(pi) => err = err.max(max_diff(&pi.probs, &oracle.probs)),
                        None => consistent = false,
                    }
                }
            }
        }
        for (c, oracle) in theta_conditionals(problem, info, &joint).iter().enumerate() {
            match (&thetas[t - 1][c], oracle) {
                (Some(a), Some(b)) => err = err.max(max_diff(&a.probs, &b.probs)),
                (None, None) => {}
                _ => consistent = false,
            }
        }
    }
    cell("filters", err, consistent)
}

pub fn check_dp_enumeration(
    problem: &ValidatedProblem,
    info: &InfoStructure,
    tuple: &StrategyTuple,
    budget: u128,
) -> Result<Cell, SolverError> {
    let mut err: f64 = 0.0;
    for k in 0..info.num_controllers {
        let dp = best_response_dp(problem, info, tuple, k);
        let bf = best_response_bruteforce(problem, info, tuple, k, budget)?;
        err = err.max((dp.payoff - bf.payoff).abs());
    }
    Ok(cell("dp-vs-enumeration", err, true))
}

/// Grouped tables at `tuple` against the raw tables.
pub fn check_separation(problem: &ValidatedProblem, info: &InfoStructure, tuple: &StrategyTuple) -> Cell {
    let mut err: f64 = 0.0;
    let mut consistent = true;
    for k in 0..info.num_controllers {
        let br = best_response_dp(problem, info, tuple, k);
        let tables: Vec<Result<GroupedTable, SolverError>> = vec![
            semi_separated_table(info, &br),
            separated_pi_table(problem, info, tuple, &br),
            info_state_theta_table(problem, info, tuple, &br),
        ];
        for table in tables {
            let Ok(table) = table else {
                consistent = false;
                continue;
            };
            for t in 1..=info.horizon {
                for group in &table.epochs[t - 1] {
                    for &m in &group.members {
                        err = err.max((group.value - br.table.value(t, m)).abs());
                    }
                }
            }
        }
    }
    cell("separation", err, consistent)
}

/// Every check on one instance; strategies for the filter and enumeration
/// checks are drawn from `seed`.
pub fn compare_instance(problem: &ValidatedProblem, seed: u64, budget: u128) -> Result<Row, SolverError> {
    let info = InfoStructure::new(problem);
    let tuple = StrategyTuple::seeded(&info, seed);
    let mut cells = vec![
        check_filters(problem, &info, &tuple),
        check_dp_enumeration(problem, &info, &tuple, budget)?,
    ];

    let pbp = pbp_solve(problem, &info, &StrategyTuple::zeros(&info), PbpOptions::default())?;
    let verification = verify_pbp(problem, &info, &pbp.strategies, budget)?;
    let monotone = pbp.trace.windows(2).all(|w| w[1] <= w[0]);
    cells.push(cell("pbp-verify", verification.worst_gap.max(0.0), verification.holds && monotone));

    let mut err: f64 = 0.0;
    for strategies in [&tuple, &pbp.strategies] {
        let direct = expected_total_cost(problem, &info, strategies);
        for k in 0..info.num_controllers {
            err = err.max((expected_cost_via_beliefs(problem, &info, strategies, k) - direct).abs());
        }
    }
    cells.push(cell("payoff-via-beliefs", err, true));
    cells.push(check_separation(problem, &info, &pbp.strategies));

    Ok(Row {
        seed,
        delay: problem.delay,
        instance_hash: problem.instance_hash(),
        cells,
    })
}

/// The desk grid: two controllers, binary spaces, horizon 3.
pub fn grid_rows(budget: u128) -> Result<Vec<Row>, SolverError> {
    let jobs: Vec<(usize, u64)> = GRID_DELAYS
        .iter()
        .flat_map(|&d| GRID_SEEDS.map(move |s| (d, s)))
        .collect();
    jobs.into_par_iter()
        .map(|(delay, seed)| {
            let problem = random_validated(seed, &Dims::desk(GRID_HORIZON, delay)).expect("desk dims are valid");
            compare_instance(&problem, seed, budget)
        })
        .collect()
}

pub fn run(config: &RunConfig) -> Result<(), CliError> {
    let rows = match &config.problem_path {
        Some(_) => {
            let problem = load_problem(config)?;
            vec![compare_instance(&problem, config.seed, config.budget)?]
        }
        None => grid_rows(config.budget)?,
    };
    let all_pass = rows.iter().all(Row::pass);
    let text = match config.format {
        Format::Json => report_json(
            config,
            None,
            json!({
                "checks": CHECKS,
                "rows": rows,
                "all_pass": all_pass,
            }),
        ),
        Format::Csv => csv_text(|buf| {
            let mut w = csv::Writer::from_writer(buf);
            let mut header = vec!["seed", "delay"];
            header.extend(CHECKS);
            w.write_record(&header)?;
            for row in &rows {
                let mut record = vec![row.seed.to_string(), row.delay.to_string()];
                record.extend(row.cells.iter().map(|c| if c.pass { "pass" } else { "fail" }.to_string()));
                w.write_record(&record)?;
            }
            w.flush()?;
            Ok(())
        }),
    };
    emit(config, text)?;
    if !all_pass {
        let failing: Vec<_> = rows
            .iter()
            .filter(|r| !r.pass())
            .map(|r| json!({"seed": r.seed, "delay": r.delay}))
            .collect();
        return Err(CliError::Failed {
            kind: "comparison",
            message: format!("{} of {} instances failed", failing.len(), rows.len()),
            detail: json!(failing),
        });
    }
    Ok(())
}
