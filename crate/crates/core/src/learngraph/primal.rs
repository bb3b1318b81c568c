//! Certified-feasibility primal solver: alternating minimization between
//! per-block minimum-energy electrical flows (given weights) and the closed
//! KKT weight form (given flows). Global optimality is not claimed; the
//! returned solution is exactly feasible and validated by weak duality.

use super::{build_edge_set, EdgeSetP};
use crate::certstruct::CertificateStructure;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub max_rounds: usize,
    pub rel_tol: f64,
    pub weight_floor: f64,
    /// inner fixed-point iterations for the weight-step multipliers
    pub lambda_iters: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_rounds: 500, rel_tol: 1e-6, weight_floor: 1e-12, lambda_iters: 80 }
    }
}

#[derive(Debug, Clone)]
pub struct PrimalSolution {
    pub n: usize,
    pub p: usize,
    pub edges: EdgeSetP,
    pub weights: Vec<f64>,
    /// flows[block][edge], oriented from S to S u J
    pub flows: Vec<Vec<f64>>,
    pub objective: f64,
    pub converged: bool,
    pub rounds: usize,
}

impl PrimalSolution {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn block_energy(&self, block: usize) -> f64 {
        self.flows[block]
            .iter()
            .zip(&self.weights)
            .map(|(&th, &w)| if th == 0.0 { 0.0 } else { th * th / w })
            .sum()
    }

    pub fn edge_index(&self) -> HashMap<(u32, u32), usize> {
        self.edges.edges.iter().enumerate().map(|(i, e)| ((e.s, e.j), i)).collect()
    }
}

/// Minimum-energy unit flow from the empty stage into {S : M within S},
/// solved as an electrical network with conductances w. Returns the flow per
/// edge and its energy. Vertices containing M are merged into one ground
/// node; the Laplacian restricted to the rest is positive definite because
/// every weight is kept above the floor and every stage reaches ground.
fn min_energy_flow(edges: &EdgeSetP, w: &[f64], block: u32) -> (Vec<f64>, f64) {
    let size = 1usize << edges.n;
    let mut local = vec![usize::MAX; size];
    let mut count = 0usize;
    for s in 0..size as u32 {
        if block & !s != 0 {
            local[s as usize] = count;
            count += 1;
        }
    }
    let mut lap = DMatrix::<f64>::zeros(count, count);
    for (ei, e) in edges.edges.iter().enumerate() {
        let c = w[ei];
        let si = local[e.s as usize];
        if si == usize::MAX {
            continue; // edge leaves the absorbing region, carries no flow
        }
        let t = e.target();
        let ti = local[t as usize];
        lap[(si, si)] += c;
        if ti != usize::MAX {
            lap[(ti, ti)] += c;
            lap[(si, ti)] -= c;
            lap[(ti, si)] -= c;
        }
    }
    let mut b = DVector::<f64>::zeros(count);
    b[local[0]] = 1.0;
    let phi = solve_spd(lap, b);
    let mut theta = vec![0.0; edges.edges.len()];
    let mut energy = 0.0;
    for (ei, e) in edges.edges.iter().enumerate() {
        let si = local[e.s as usize];
        if si == usize::MAX {
            continue;
        }
        let ti = local[e.target() as usize];
        let drop = if ti == usize::MAX { phi[si] } else { phi[si] - phi[ti] };
        theta[ei] = w[ei] * drop;
        energy += w[ei] * drop * drop;
    }
    (theta, energy)
}

fn solve_spd(lap: DMatrix<f64>, b: DVector<f64>) -> DVector<f64> {
    if let Some(ch) = lap.clone().cholesky() {
        return ch.solve(&b);
    }
    if let Some(sol) = lap.clone().lu().solve(&b) {
        return sol;
    }
    // near-singular from floor-level conductances: regularize slightly
    let dim = lap.nrows();
    let ridge = 1e-14 * lap.diagonal().max();
    let reg = lap + DMatrix::identity(dim, dim) * ridge;
    reg.lu().solve(&b).expect("regularized Laplacian solve failed")
}

/// Weight step: minimize total weight subject to every block energy <= 1,
/// for fixed flows. The KKT form is w_e = sqrt(sum_M lambda_M theta_e(M)^2);
/// multipliers follow the fixed point lambda_M <- lambda_M * E_M, then the
/// weights are rescaled so the largest energy is exactly 1.
fn weight_step(
    flows: &[Vec<f64>],
    lambda: &mut [f64],
    num_edges: usize,
    opts: &SolveOptions,
) -> Vec<f64> {
    let mut w = vec![opts.weight_floor; num_edges];
    for _ in 0..opts.lambda_iters {
        for (ei, we) in w.iter_mut().enumerate() {
            let s: f64 = flows.iter().zip(lambda.iter()).map(|(th, &l)| l * th[ei] * th[ei]).sum();
            *we = s.sqrt().max(opts.weight_floor);
        }
        for (bi, l) in lambda.iter_mut().enumerate() {
            let e: f64 = flows[bi].iter().zip(&w).map(|(&th, &we)| th * th / we).sum();
            *l = (*l * e).max(1e-300);
        }
    }
    rescale_feasible(flows, &mut w, opts.weight_floor);
    w
}

/// Scales weights by the maximum block energy so every energy lands at or
/// below 1, then re-applies the floor.
fn rescale_feasible(flows: &[Vec<f64>], w: &mut [f64], floor: f64) {
    let max_e = flows
        .iter()
        .map(|th| th.iter().zip(w.iter()).map(|(&t, &we)| t * t / we).sum::<f64>())
        .fold(0.0f64, f64::max);
    if max_e > 0.0 {
        for we in w.iter_mut() {
            *we = (*we * max_e).max(floor);
        }
    }
}

/// Alternating minimization for the p-parallel primal program over the given
/// structure. The returned solution is exactly feasible (energies rechecked
/// after a final rescale); `converged` reports whether the relative objective
/// change fell below the tolerance before the round cap.
pub fn solve_primal(
    structure: &CertificateStructure,
    p: usize,
    opts: &SolveOptions,
) -> Result<PrimalSolution> {
    let n = structure.n;
    if n > 8 || structure.blocks.len() > 70 {
        return Err(Error::limit("primal solver is bounded at n <= 8 and at most 70 blocks"));
    }
    if p == 0 || p > n {
        return Err(Error::invalid("need 1 <= p <= n"));
    }
    let edges = build_edge_set(n, p, n)?;
    let ne = edges.edges.len();
    let nb = structure.blocks.len();
    let mut w = vec![1.0; ne];
    let mut lambda = vec![1.0; nb];
    let mut flows: Vec<Vec<f64>> = Vec::new();
    let mut prev_obj = f64::INFINITY;
    let mut converged = false;
    let mut rounds = 0;
    let mut best: Option<(Vec<f64>, Vec<Vec<f64>>, f64)> = None;

    for round in 1..=opts.max_rounds {
        rounds = round;
        flows = structure
            .blocks
            .par_iter()
            .map(|&m| min_energy_flow(&edges, &w, m).0)
            .collect();
        w = weight_step(&flows, &mut lambda, ne, opts);
        let obj = w.iter().sum::<f64>().sqrt();
        if best.as_ref().is_none_or(|(_, _, b)| obj < *b) {
            best = Some((w.clone(), flows.clone(), obj));
        }
        if (prev_obj - obj).abs() <= opts.rel_tol * obj.max(1e-30) {
            converged = true;
            break;
        }
        prev_obj = obj;
    }

    let (mut w, mut flows, _) = best.unwrap_or((w, flows, f64::INFINITY));
    // certify: recompute energies exactly and rescale once more if any
    // floating-point drift pushed one above 1
    rescale_feasible(&flows, &mut w, opts.weight_floor);
    for th in &mut flows {
        for (t, &we) in th.iter_mut().zip(&w) {
            if we <= opts.weight_floor && t.abs() < 1e-15 {
                *t = 0.0; // no flow may ride a zero-weight edge
            }
        }
    }
    let objective = w.iter().sum::<f64>().sqrt();
    Ok(PrimalSolution { n, p, edges, weights: w, flows, objective, converged, rounds })
}

#[derive(Debug, Clone)]
pub struct PrimalFeasibility {
    pub max_energy: f64,
    pub max_conservation_violation: f64,
    pub source_flow_error: f64,
    pub feasible: bool,
}

/// Exact feasibility audit: per-block energies, flow conservation at every
/// interior stage, and unit outflow from the empty stage.
pub fn verify_primal_feasibility(
    sol: &PrimalSolution,
    structure: &CertificateStructure,
) -> Result<PrimalFeasibility> {
    if structure.n != sol.n || structure.blocks.len() != sol.flows.len() {
        return Err(Error::invalid("solution and structure shapes disagree"));
    }
    let size = 1usize << sol.n;
    let mut max_energy = 0.0f64;
    let mut max_violation = 0.0f64;
    let mut source_err = 0.0f64;
    for (bi, &m) in structure.blocks.iter().enumerate() {
        max_energy = max_energy.max(sol.block_energy(bi));
        let mut net = vec![0.0f64; size];
        for (ei, e) in sol.edges.edges.iter().enumerate() {
            let th = sol.flows[bi][ei];
            if m & !e.s == 0 {
                if th != 0.0 {
                    max_violation = f64::INFINITY; // flow on an edge past a sink
                }
                continue;
            }
            net[e.s as usize] -= th;
            net[e.target() as usize] += th;
        }
        source_err = source_err.max((net[0] + 1.0).abs());
        for s in 1..size as u32 {
            if m & !s != 0 {
                max_violation = max_violation.max(net[s as usize].abs());
            }
        }
    }
    Ok(PrimalFeasibility {
        max_energy,
        max_conservation_violation: max_violation,
        source_flow_error: source_err,
        feasible: max_energy <= 1.0 + 1e-9 && max_violation <= 1e-9 && source_err <= 1e-9,
    })
}
