//! Adversary witness vectors assembled from a feasible primal solution.
//!
//! For a 1-input x with certifying block M and a 0-input y, each query group
//! J gets a pair of sparse vectors indexed by (stage, assignment on stage):
//! the x-side carries theta / sqrt(w) on (S, x_S), the y-side carries sqrt(w)
//! on (S, y_S). Summing inner products over the groups where x and y differ
//! telescopes the unit source flow, which is the identity checked here.

use super::primal::PrimalSolution;
use crate::certstruct::InducedFunction;
use crate::error::{Error, Result};
use crate::subsets::mask_indices;
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct WitnessReport {
    /// sum over J with x_J != y_J of <u_{x,J}, u_{y,J}>; identity value is 1
    pub cut_sum: f64,
    /// sum over all J of |u_{x,J}|^2; bounded by the block energy, hence 1
    pub x_norm_sq: f64,
    /// sum over all J of |u_{y,J}|^2; equals the total weight exactly
    pub y_norm_sq: f64,
    pub total_weight: f64,
    pub witness_block: usize,
}

type SparseVec = HashMap<(u32, Vec<u32>), f64>;

fn assignment_on(mask: u32, input: &[u32]) -> Vec<u32> {
    mask_indices(mask).into_iter().map(|i| input[i]).collect()
}

fn dot(a: &SparseVec, b: &SparseVec) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().filter_map(|(k, &va)| large.get(k).map(|&vb| va * vb)).sum()
}

fn norm_sq(a: &SparseVec) -> f64 {
    a.values().map(|v| v * v).sum()
}

/// Builds the witness pair for (x, y) from the solution's weights and the
/// flows of x's certifying block, then reports the cut identity and norm
/// budgets. Fails unless f(x) = 1 and f(y) = 0 under the induced function.
pub fn witness_from_primal(
    sol: &PrimalSolution,
    func: &InducedFunction,
    x: &[u32],
    y: &[u32],
) -> Result<WitnessReport> {
    if func.structure.n != sol.n {
        return Err(Error::invalid("function and solution arities disagree"));
    }
    let (fx, wx) = func.evaluate(x)?;
    if !fx {
        return Err(Error::invalid("x must be a 1-input"));
    }
    let (fy, _) = func.evaluate(y)?;
    if fy {
        return Err(Error::invalid("y must be a 0-input"));
    }
    let block = wx.expect("1-input carries a witness block");
    let theta = &sol.flows[block];

    // group edges by their query set J
    let mut groups: HashMap<u32, Vec<usize>> = HashMap::new();
    for (ei, e) in sol.edges.edges.iter().enumerate() {
        groups.entry(e.j).or_default().push(ei);
    }

    let mut cut_sum = 0.0;
    let mut x_norm_sq = 0.0;
    let mut y_norm_sq = 0.0;
    for (&j, eis) in &groups {
        let mut ux: SparseVec = HashMap::new();
        let mut uy: SparseVec = HashMap::new();
        for &ei in eis {
            let e = &sol.edges.edges[ei];
            let w = sol.weights[ei];
            if w > 0.0 {
                let cx = theta[ei] / w.sqrt();
                if cx != 0.0 {
                    *ux.entry((e.s, assignment_on(e.s, x))).or_insert(0.0) += cx;
                }
                *uy.entry((e.s, assignment_on(e.s, y))).or_insert(0.0) += w.sqrt();
            }
        }
        x_norm_sq += norm_sq(&ux);
        y_norm_sq += norm_sq(&uy);
        let differs = mask_indices(j).into_iter().any(|i| x[i] != y[i]);
        if differs {
            cut_sum += dot(&ux, &uy);
        }
    }
    Ok(WitnessReport {
        cut_sum,
        x_norm_sq,
        y_norm_sq,
        total_weight: sol.total_weight(),
        witness_block: block,
    })
}
