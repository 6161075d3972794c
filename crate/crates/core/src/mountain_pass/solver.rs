//! Path-based mountain-pass solver.
//!
//! The path runs from `0` along the ray of the current max node `u` out to radius `R`, along
//! the chord `R((1-s)û + s v̂)` and back down the ray of `v0` to the fixed endpoint `e = t0 v0`.
//! `u` sits at the maximum of its own ray, so it is the max node of the path. Each iteration
//! pushes `u` along `-discrete_gradient(u)`, re-lifts it to the maximum of its new ray and
//! accepts the step under the Armijo condition on the max-node energy. The path is rebuilt
//! around the new max node every iteration; `R` is re-chosen every `reparam_every` iterations.

use serde::{Deserialize, Serialize};

use super::tmax::{fit_tmax, RayProfile, T_MAX};
use crate::error::{invalid, Result};
use crate::field::{ComplexField, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub path_nodes: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub reparam_every: usize,
    /// Armijo sufficient-decrease constant.
    pub c1: f64,
    /// Backtracking factor.
    pub shrink: f64,
    pub initial_step: f64,
    /// Keep every this many iterates for Palais–Smale diagnostics.
    pub history_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            path_nodes: 33,
            tol: 1e-6,
            max_iter: 20_000,
            reparam_every: 10,
            c1: 1e-4,
            shrink: 0.5,
            initial_step: 1e-2,
            history_every: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathState {
    pub nodes: Vec<ComplexField>,
    pub energies: Vec<f64>,
    pub max_index: usize,
    pub gradient_norm_at_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub iter: usize,
    pub level: f64,
    pub residual: f64,
    pub step_size: f64,
    pub max_index: usize,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub u: ComplexField,
    pub level: f64,
    /// Grid `L²` norm of `discrete_gradient(u)`.
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
    pub t0: f64,
    pub path: PathState,
    pub log: Vec<LogEntry>,
    /// Sampled `(iterate, level)` pairs, ending with the returned iterate.
    pub history: Vec<(ComplexField, f64)>,
    /// Largest max-norm distance of the first and last path nodes from `0` and `t0 v0` over
    /// all iterations.
    pub endpoint_drift: f64,
}

struct PathPlan {
    nodes: usize,
    /// Index of the max node on the first ray.
    max_slot: usize,
    /// Last index of the first ray.
    ray_end: usize,
    chord: usize,
}

impl PathPlan {
    fn new(nodes: usize) -> Result<Self> {
        if nodes < 7 {
            return Err(invalid(format!("a path needs at least 7 nodes, got {nodes}")));
        }
        let ray = nodes / 2;
        let chord = nodes / 4;
        Ok(PathPlan {
            nodes,
            max_slot: ray / 2,
            ray_end: ray - 1,
            chord,
        })
    }
}

fn lin(a: f64, b: f64, s: f64) -> f64 {
    a + (b - a) * s
}

fn assemble(
    u: &ComplexField,
    endpoint: &ComplexField,
    problem: &Problem,
    plan: &PathPlan,
    radius: f64,
) -> Result<Vec<ComplexField>> {
    let (ru, re) = (problem.norm(u)?, problem.norm(endpoint)?);
    let du = u.scale(1.0 / ru);
    let dv = endpoint.scale(1.0 / re);
    let mut nodes = Vec::with_capacity(plan.nodes);
    nodes.push(ComplexField::zeros(*u.grid()));
    for j in 1..=plan.ray_end {
        if j == plan.max_slot {
            nodes.push(u.clone());
        } else if j < plan.max_slot {
            nodes.push(u.scale(j as f64 / plan.max_slot as f64));
        } else {
            let s = (j - plan.max_slot) as f64 / (plan.ray_end - plan.max_slot) as f64;
            nodes.push(du.scale(lin(ru, radius, s)));
        }
    }
    for k in 1..=plan.chord {
        let s = k as f64 / (plan.chord + 1) as f64;
        nodes.push(du.scale(radius * (1.0 - s)).axpy(radius * s, &dv)?);
    }
    let back = plan.nodes - nodes.len();
    for k in 0..back {
        if k + 1 == back {
            nodes.push(endpoint.clone());
        } else {
            let s = k as f64 / (back - 1) as f64;
            nodes.push(dv.scale(lin(radius, re, s)));
        }
    }
    Ok(nodes)
}

fn energies(nodes: &[ComplexField], problem: &Problem) -> Result<Vec<f64>> {
    nodes.iter().map(|u| Ok(problem.energy(u)?.total)).collect()
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Smallest `R = 2^k max(2‖u‖, ‖e‖)` for which `u` is the strict max node of the path.
fn choose_radius(
    u: &ComplexField,
    endpoint: &ComplexField,
    problem: &Problem,
    plan: &PathPlan,
) -> Result<(f64, Vec<ComplexField>, Vec<f64>)> {
    let mut radius = (2.0 * problem.norm(u)?).max(problem.norm(endpoint)?);
    for _ in 0..60 {
        let nodes = assemble(u, endpoint, problem, plan, radius)?;
        let e = energies(&nodes, problem)?;
        let top = e[plan.max_slot];
        if e.iter().enumerate().all(|(i, &x)| i == plan.max_slot || x < top) {
            return Ok((radius, nodes, e));
        }
        radius *= 2.0;
    }
    Err(invalid("no path radius keeps the max node on the lifted ray"))
}

/// Endpoint scale: `t0 = 2^k t*(v0)`, the first with `J(t0 v0) < 0`.
pub fn endpoint_scale(v0: &ComplexField, problem: &Problem) -> Result<f64> {
    let fit = fit_tmax(v0, problem)?;
    let ray = RayProfile::new(v0, problem)?;
    let mut t = 2.0 * fit.t_star;
    while ray.phi(t) >= 0.0 {
        t *= 2.0;
        if t > T_MAX {
            return Err(invalid("J(t v0) stays nonnegative up to t = 1e6"));
        }
    }
    Ok(t)
}

pub fn mountain_pass_solve(v0: &ComplexField, problem: &Problem, opts: &SolverOptions) -> Result<SolveOutcome> {
    if v0.is_zero() {
        return Err(invalid("v0 must be nonzero"));
    }
    if !(opts.tol > 0.0 && opts.c1 > 0.0 && opts.c1 < 1.0 && opts.shrink > 0.0 && opts.shrink < 1.0) {
        return Err(invalid("solver tolerances must satisfy tol > 0, 0 < c1 < 1, 0 < shrink < 1"));
    }
    let plan = PathPlan::new(opts.path_nodes)?;
    let t0 = endpoint_scale(v0, problem)?;
    let endpoint = v0.scale(t0);
    let fit = fit_tmax(v0, problem)?;
    let mut u = v0.scale(fit.t_star);
    let mut level = fit.value_at_max;
    let (mut radius, mut nodes, mut path_e) = choose_radius(&u, &endpoint, problem, &plan)?;
    let mut step = opts.initial_step;
    let mut log = Vec::new();
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut grad = problem.gradient(&u)?;
    let mut residual = grad.grid_l2_norm();
    let origin = ComplexField::zeros(*v0.grid());
    let mut endpoint_drift = 0.0f64;
    loop {
        let first = nodes[0].max_distance(&origin)?;
        let last = nodes[nodes.len() - 1].max_distance(&endpoint)?;
        endpoint_drift = endpoint_drift.max(first).max(last);
        log.push(LogEntry {
            iter: iterations,
            level,
            residual,
            step_size: step,
            max_index: argmax(&path_e),
        });
        if opts.history_every > 0 && iterations % opts.history_every == 0 {
            history.push((u.clone(), level));
        }
        if residual < opts.tol {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        // Armijo backtracking on the lifted max-node energy
        let mut s = step;
        let mut accepted = None;
        while s > 1e-16 {
            let trial = u.axpy(-s, &grad)?;
            if !trial.is_zero() {
                if let Ok(f) = fit_tmax(&trial, problem) {
                    if f.value_at_max <= level - opts.c1 * s * residual * residual {
                        accepted = Some((trial.scale(f.t_star), f.value_at_max));
                        break;
                    }
                }
            }
            s *= opts.shrink;
        }
        let Some((next, next_level)) = accepted else {
            break;
        };
        u = next;
        level = next_level;
        step = (2.0 * s).min(1e3 * opts.initial_step);
        iterations += 1;
        if iterations % opts.reparam_every.max(1) == 0 {
            (radius, nodes, path_e) = choose_radius(&u, &endpoint, problem, &plan)?;
        } else {
            nodes = assemble(&u, &endpoint, problem, &plan, radius)?;
            path_e = energies(&nodes, problem)?;
            if argmax(&path_e) != plan.max_slot {
                (radius, nodes, path_e) = choose_radius(&u, &endpoint, problem, &plan)?;
            }
        }
        grad = problem.gradient(&u)?;
        residual = grad.grid_l2_norm();
    }
    if history.last().is_none_or(|(h, _)| *h != u) {
        history.push((u.clone(), level));
    }
    let max_index = argmax(&path_e);
    Ok(SolveOutcome {
        level,
        residual,
        converged,
        iterations,
        t0,
        path: PathState {
            nodes,
            energies: path_e,
            max_index,
            gradient_norm_at_max: residual,
        },
        log,
        history,
        endpoint_drift,
        u,
    })
}
