//! Derivative-free variational optimization of the forged ground state.
//!
//! Nelder-Mead over the hop angles plus one Schmidt angle phi with
//! lambda = (cos phi, sin phi), so the Schmidt normalization holds
//! exactly at every evaluation. Deterministic restarts are drawn from
//! the configured seed.

use rand::Rng;

use super::evaluator::{forged_expectation, ExecutionMode};
use super::{ForgedAnsatz, ForgedError};
use crate::bipartite::BipartiteOperator;
use crate::seeding;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Nelder-Mead iterations per start.
    pub max_iterations: usize,
    /// Additional randomized starts after the deterministic one.
    pub restarts: usize,
    pub seed: u64,
    /// Convergence threshold on the simplex energy spread, Hartree.
    pub tolerance: f64,
    /// Initial simplex displacement, radians.
    pub step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iterations: 400,
            restarts: 3,
            seed: 0,
            tolerance: 1e-8,
            step: 0.2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizationResult {
    /// The template with the best angles and Schmidt coefficients found.
    pub ansatz: ForgedAnsatz,
    pub energy: f64,
    pub sigma: f64,
    pub converged: bool,
    pub n_evaluations: usize,
}

fn ansatz_with(template: &ForgedAnsatz, x: &[f64]) -> ForgedAnsatz {
    let n_theta = template.thetas.len();
    let phi = x[n_theta];
    template.with_parameters(&x[..n_theta], &[phi.cos(), phi.sin()])
}

/// Variational minimization of the forged energy. Returns the best
/// parameters over all starts; `converged` reports whether the winning
/// start met the tolerance.
pub fn optimize_ground_state(
    template: &ForgedAnsatz,
    hamiltonian: &BipartiteOperator,
    mode: &ExecutionMode,
    config: &OptimizerConfig,
) -> Result<OptimizationResult, ForgedError> {
    template.validate()?;
    if template.bitstrings.len() != 2 {
        return Err(ForgedError::InvalidAnsatz(
            "optimization expects the two-bitstring ansatz".into(),
        ));
    }
    let n_theta = template.thetas.len();
    let dim = n_theta + 1;
    let mut n_evaluations = 0usize;

    let mut objective = |x: &[f64]| -> Result<f64, ForgedError> {
        n_evaluations += 1;
        let candidate = ansatz_with(template, x);
        Ok(forged_expectation(&candidate, hamiltonian, mode)?.value)
    };

    let phi0 = template.schmidt[1].atan2(template.schmidt[0]);
    let mut base = template.thetas.clone();
    base.push(phi0);

    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for start in 0..=config.restarts {
        let x0 = if start == 0 {
            base.clone()
        } else {
            let mut rng = seeding::rng_for(config.seed, &[start as u64]);
            base.iter()
                .map(|&v| v + rng.random_range(-0.6..0.6))
                .collect()
        };
        let (x, f, converged) = nelder_mead(&mut objective, &x0, dim, config)?;
        let better = match &best {
            None => true,
            Some((_, fb, _)) => f < *fb,
        };
        if better {
            best = Some((x, f, converged));
        }
    }

    let (x, _, converged) = best.expect("at least one start");
    let ansatz = ansatz_with(template, &x);
    let final_measure = forged_expectation(&ansatz, hamiltonian, mode)?;
    Ok(OptimizationResult {
        ansatz,
        energy: final_measure.value,
        sigma: final_measure.sigma,
        converged,
        n_evaluations,
    })
}

fn nelder_mead<F>(
    objective: &mut F,
    x0: &[f64],
    dim: usize,
    config: &OptimizerConfig,
) -> Result<(Vec<f64>, f64, bool), ForgedError>
where
    F: FnMut(&[f64]) -> Result<f64, ForgedError>,
{
    const ALPHA: f64 = 1.0;
    const GAMMA: f64 = 2.0;
    const RHO: f64 = 0.5;
    const SIGMA: f64 = 0.5;

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), objective(x0)?));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += config.step;
        let f = objective(&x)?;
        simplex.push((x, f));
    }

    let mut converged = false;
    for _ in 0..config.max_iterations {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let spread = simplex[dim].1 - simplex[0].1;
        if spread.abs() < config.tolerance {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let reflected: Vec<f64> = (0..dim)
            .map(|j| centroid[j] + ALPHA * (centroid[j] - worst.0[j]))
            .collect();
        let f_reflected = objective(&reflected)?;

        if f_reflected < simplex[0].1 {
            let expanded: Vec<f64> = (0..dim)
                .map(|j| centroid[j] + GAMMA * (reflected[j] - centroid[j]))
                .collect();
            let f_expanded = objective(&expanded)?;
            simplex[dim] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < simplex[dim - 1].1 {
            simplex[dim] = (reflected, f_reflected);
            continue;
        }
        let contracted: Vec<f64> = if f_reflected < worst.1 {
            (0..dim)
                .map(|j| centroid[j] + RHO * (reflected[j] - centroid[j]))
                .collect()
        } else {
            (0..dim)
                .map(|j| centroid[j] + RHO * (worst.0[j] - centroid[j]))
                .collect()
        };
        let f_contracted = objective(&contracted)?;
        if f_contracted < f_reflected.min(worst.1) {
            simplex[dim] = (contracted, f_contracted);
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            for j in 0..dim {
                vertex.0[j] = best[j] + SIGMA * (vertex.0[j] - best[j]);
            }
            vertex.1 = objective(&vertex.0)?;
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let (x, f) = simplex.swap_remove(0);
    Ok((x, f, converged))
}
