//! Small dense Levenberg–Marquardt solver.
//!
//! Minimizes `½‖r(p)‖²` given residuals and an analytic Jacobian, with
//! Marquardt diagonal scaling and Nielsen's damping update. Parameters are
//! passed through a projection after every step, which is how box
//! constraints such as `b ≥ 0` are imposed.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmConfig {
    /// Stop when `‖δ‖ ≤ step_tol·(‖p‖ + step_tol)`.
    pub step_tol: f64,
    /// Stop when an accepted step changes RSS by at most this fraction.
    pub rss_rel_tol: f64,
    pub max_iterations: usize,
    /// `converged` additionally requires `‖Jᵀr‖∞ ≤ gradient_tol·(1 + RSS)`.
    pub gradient_tol: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        LmConfig {
            step_tol: 1e-10,
            rss_rel_tol: 1e-12,
            max_iterations: 1000,
            gradient_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    SmallGradient,
    SmallStep,
    SmallRssChange,
    MaxIterations,
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmOutcome {
    pub params: DVector<f64>,
    pub rss: f64,
    pub initial_rss: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub stop: StopReason,
    pub converged: bool,
}

/// A least-squares problem: residuals and their Jacobian at a point.
pub trait Problem {
    fn residuals(&self, params: &DVector<f64>) -> DVector<f64>;
    fn jacobian(&self, params: &DVector<f64>) -> DMatrix<f64>;
    fn project(&self, _params: &mut DVector<f64>) {}
}

fn rss_of(r: &DVector<f64>) -> f64 {
    r.norm_squared()
}

pub fn minimize<P: Problem>(problem: &P, init: DVector<f64>, config: &LmConfig) -> LmOutcome {
    let mut params = init;
    problem.project(&mut params);
    let mut residuals = problem.residuals(&params);
    let mut rss = rss_of(&residuals);
    let initial_rss = rss;
    let n = params.len();

    let finish = |params: DVector<f64>, rss: f64, iterations, stop, problem: &P| {
        let r = problem.residuals(&params);
        let gradient_norm = (problem.jacobian(&params).transpose() * r).amax();
        let converged = !matches!(stop, StopReason::MaxIterations | StopReason::NonFinite)
            && gradient_norm <= config.gradient_tol * (1.0 + rss);
        LmOutcome {
            params,
            rss,
            initial_rss,
            iterations,
            gradient_norm,
            stop,
            converged,
        }
    };

    if !rss.is_finite() {
        return finish(params, rss, 0, StopReason::NonFinite, problem);
    }

    let mut lambda: f64 = 1e-3;
    let mut nu = 2.0;
    let mut iterations = 0;
    while iterations < config.max_iterations {
        iterations += 1;
        let jac = problem.jacobian(&params);
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * &residuals;
        if grad.amax() == 0.0 || rss == 0.0 {
            return finish(params, rss, iterations, StopReason::SmallGradient, problem);
        }
        let max_diag = jtj.diagonal().amax();
        let scale = jtj
            .diagonal()
            .map(|d| d.max(max_diag * 1e-12).max(f64::MIN_POSITIVE));

        // retry with heavier damping until a step reduces RSS
        loop {
            if !lambda.is_finite() {
                return finish(params, rss, iterations, StopReason::SmallStep, problem);
            }
            let mut damped = jtj.clone();
            for i in 0..n {
                damped[(i, i)] += lambda * scale[i];
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= nu;
                nu *= 2.0;
                continue;
            };
            let step = chol.solve(&(-&grad));
            let step_small = step.norm() <= config.step_tol * (params.norm() + config.step_tol);
            let mut candidate = &params + &step;
            problem.project(&mut candidate);
            let cand_res = problem.residuals(&candidate);
            let cand_rss = rss_of(&cand_res);
            // model reduction of the undamped quadratic, in RSS units
            let predicted = step.dot(&(step.component_mul(&scale) * lambda - &grad));
            let actual = rss - cand_rss;
            if cand_rss.is_finite() && actual > 0.0 && predicted > 0.0 {
                let rho = actual / predicted;
                lambda *= (1.0 / 3.0f64).max(1.0 - (2.0 * rho - 1.0).powi(3));
                nu = 2.0;
                let rel_change = actual / rss;
                params = candidate;
                residuals = cand_res;
                rss = cand_rss;
                if step_small {
                    return finish(params, rss, iterations, StopReason::SmallStep, problem);
                }
                if rel_change <= config.rss_rel_tol {
                    return finish(params, rss, iterations, StopReason::SmallRssChange, problem);
                }
                break;
            }
            if step_small {
                return finish(params, rss, iterations, StopReason::SmallStep, problem);
            }
            lambda *= nu;
            nu *= 2.0;
        }
    }
    finish(params, rss, iterations, StopReason::MaxIterations, problem)
}
