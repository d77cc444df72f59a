//! FISTA: proximal gradient descent with Nesterov momentum.
//!
//! Gradient steps of length `1 / L` are taken from an extrapolated point,
//! where `L = lipschitz_margin * ||A||_2^2` bounds the gradient Lipschitz
//! constant of the data-fit term. The momentum sequence is the classical
//! `t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2`.

use std::time::Instant;

use crate::linalg::{spectral_norm_estimate, SPECTRAL_NORM_MAX_ITER, SPECTRAL_NORM_TOL};
use crate::prox::prox_2oscar;
use crate::solvers::{
    converged, gradient, initial_iterate, objective_checked, Problem, SolverConfig, SolverError,
    SolverResult,
};

pub(crate) fn solve(problem: &Problem, config: &SolverConfig) -> Result<SolverResult, SolverError> {
    config.validate()?;
    let start = Instant::now();

    let sigma = spectral_norm_estimate(problem.a(), SPECTRAL_NORM_TOL, SPECTRAL_NORM_MAX_ITER);
    let mut lipschitz = config.fista.lipschitz_margin * sigma.value * sigma.value;
    if lipschitz <= 0.0 {
        // Zero sensing matrix: the smooth term is constant and any positive
        // step length turns the iteration into a pure prox fixed-point loop.
        lipschitz = 1.0;
    }

    let mut x = initial_iterate(problem, config)?;
    let mut extrapolated = x.clone();
    let mut t = 1.0_f64;
    let mut trace = vec![objective_checked(problem, &x, 0)?];

    let mut iterations = 0;
    let mut did_converge = false;

    for k in 1..=config.max_iter {
        let grad = gradient(problem, &extrapolated)?;
        let x_next = prox_2oscar(
            &extrapolated.sub(&grad.scale(1.0 / lipschitz)),
            problem.params(),
            lipschitz,
        )?;
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let momentum = (t - 1.0) / t_next;
        extrapolated = x_next.add(&x_next.sub(&x).scale(momentum));

        trace.push(objective_checked(problem, &x_next, k)?);
        let check = converged(&x, &x_next, config.tol);
        x = x_next;
        t = t_next;
        iterations = k;
        if check.converged {
            did_converge = true;
            break;
        }
    }

    Ok(SolverResult {
        x_hat: x,
        iterations,
        objective_trace: trace,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        converged: did_converge,
        backtracking_exhausted: false,
    })
}
