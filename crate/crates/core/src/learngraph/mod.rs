//! The p-parallel learning-graph programs: the edge set over stages S with
//! batched loads J (|J| <= p), symmetric dual certificates for element
//! distinctness and k-sum, exact feasibility verification, a certified
//! primal solver, and the witness vectors tying primal solutions to the
//! parallel adversary dual.

pub mod primal;
pub mod witness;

pub use primal::{solve_primal, PrimalSolution, SolveOptions};
pub use witness::{witness_from_primal, WitnessReport};

use crate::certstruct::CertificateStructure;
use crate::error::{Error, Result};
use crate::subsets::{binomial, format_mask, k_subsets, subsets_up_to};
use rayon::prelude::*;
use std::collections::HashMap;

/// One learning-graph edge: stage S (indices already loaded) plus a batch J
/// of 1..=p fresh indices loaded in parallel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub s: u32,
    pub j: u32,
}

impl Edge {
    pub fn target(&self) -> u32 {
        self.s | self.j
    }

    /// Serialization key, e.g. "{1,3}|{2}" ; "{}" for the empty stage.
    pub fn key(&self) -> String {
        format!("{}|{}", format_mask(self.s), format_mask(self.j))
    }
}

#[derive(Debug, Clone)]
pub struct EdgeSetP {
    pub n: usize,
    pub p: usize,
    pub stage_cap: usize,
    pub edges: Vec<Edge>,
}

/// Number of edges (S, J) with |S| <= cap, 1 <= |J| <= min(p, n-|S|).
pub fn predicted_edge_count(n: usize, p: usize, stage_cap: usize) -> f64 {
    let mut total = 0.0;
    for s in 0..=stage_cap.min(n) {
        let mut inner = 0.0;
        for j in 1..=p.min(n - s) {
            inner += binomial(n - s, j);
        }
        total += binomial(n, s) * inner;
    }
    total
}

/// Enumerates the full p-parallel edge set up to the stage cap. Edges with
/// J = {} are excluded: they load nothing and can carry no useful weight.
pub fn build_edge_set(n: usize, p: usize, stage_cap: usize) -> Result<EdgeSetP> {
    if n == 0 || n > 28 {
        return Err(Error::invalid("n out of range for edge enumeration"));
    }
    if p == 0 || p > n {
        return Err(Error::invalid("need 1 <= p <= n"));
    }
    if stage_cap > n {
        return Err(Error::invalid("stage cap cannot exceed n"));
    }
    let predicted = predicted_edge_count(n, p, stage_cap);
    if predicted > 1e7 {
        return Err(Error::limit(format!(
            "edge set would have {predicted:.3e} edges (limit 1e7); lower n, p, or the stage cap"
        )));
    }
    let ground = ((1u64 << n) - 1) as u32;
    let mut edges = Vec::with_capacity(predicted as usize);
    for s_size in 0..=stage_cap {
        for s in k_subsets(n, s_size) {
            let complement = ground & !s;
            for j in subsets_up_to(complement, p) {
                edges.push(Edge { s, j });
            }
        }
    }
    debug_assert_eq!(edges.len() as f64, predicted);
    Ok(EdgeSetP { n, p, stage_cap, edges })
}

/// Dual variables alpha_S(M). The symmetric form stores one value per stage
/// size and applies to complete k-uniform structures; the general form is a
/// sparse map for hand-built duals.
#[derive(Debug, Clone)]
pub enum DualForm {
    Symmetric { alpha: Vec<f64> },
    General { alpha: HashMap<(u32, usize), f64> },
}

#[derive(Debug, Clone)]
pub struct DualSolution {
    pub n: usize,
    pub p: usize,
    /// block size of the intended complete k-uniform structure
    pub k: usize,
    pub form: DualForm,
}

impl DualSolution {
    pub fn symmetric(n: usize, p: usize, k: usize, alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() != n + 1 {
            return Err(Error::invalid("symmetric dual needs one alpha per stage size 0..=n"));
        }
        Ok(DualSolution { n, p, k, form: DualForm::Symmetric { alpha } })
    }

    /// General duals are validated against the structure: alpha_S(M) must be
    /// absent (zero) whenever M is a subset of S.
    pub fn general(
        n: usize,
        p: usize,
        structure: &CertificateStructure,
        alpha: HashMap<(u32, usize), f64>,
    ) -> Result<Self> {
        for (&(s, idx), &v) in &alpha {
            if idx >= structure.blocks.len() {
                return Err(Error::invalid("dual entry references a block out of range"));
            }
            let m = structure.blocks[idx];
            if m & !s == 0 && v != 0.0 {
                return Err(Error::invalid("alpha_S(M) must vanish when M is contained in S"));
            }
        }
        Ok(DualSolution { n, p, k: structure.k_bound, form: DualForm::General { alpha } })
    }

    /// alpha_S(M): zero when M is contained in S, else the stored value.
    pub fn alpha_at(&self, s: u32, block_mask: u32, block_idx: usize) -> f64 {
        if block_mask & !s == 0 {
            return 0.0;
        }
        match &self.form {
            DualForm::Symmetric { alpha } => alpha[s.count_ones() as usize],
            DualForm::General { alpha } => *alpha.get(&(s, block_idx)).unwrap_or(&0.0),
        }
    }

    pub fn alpha_stage(&self, stage: usize) -> Option<f64> {
        match &self.form {
            DualForm::Symmetric { alpha } => alpha.get(stage).copied(),
            DualForm::General { .. } => None,
        }
    }

    /// sqrt(sum over blocks of alpha_empty(M)^2); for the symmetric form over
    /// the complete k-uniform family this is sqrt(C(n,k)) * alpha_0 and needs
    /// no block enumeration.
    pub fn objective(&self) -> f64 {
        match &self.form {
            DualForm::Symmetric { alpha } => binomial(self.n, self.k).sqrt() * alpha[0],
            DualForm::General { alpha } => alpha
                .iter()
                .filter(|(&(s, _), _)| s == 0)
                .map(|(_, &v)| v * v)
                .sum::<f64>()
                .sqrt(),
        }
    }

    /// Largest stage size with a nonzero coefficient (symmetric form), used
    /// as the natural verification cap: edges whose stage lies entirely past
    /// the support contribute L = 0.
    pub fn support_cap(&self) -> usize {
        match &self.form {
            DualForm::Symmetric { alpha } => {
                alpha.iter().rposition(|&a| a != 0.0).unwrap_or(0)
            }
            DualForm::General { alpha } => alpha
                .iter()
                .filter(|&(_, &v)| v != 0.0)
                .map(|(&(s, _), _)| s.count_ones() as usize)
                .max()
                .unwrap_or(0),
        }
    }
}

/// Element-distinctness dual certificate:
/// alpha_j = (1/2n) * max((n/p)^(2/3) - j/p, 0).
pub fn ed_dual_certificate(n: usize, p: usize) -> Result<DualSolution> {
    if n < 2 || p == 0 || p > n {
        return Err(Error::invalid("need n >= 2 and 1 <= p <= n"));
    }
    let scale = 1.0 / (2.0 * n as f64);
    let peak = (n as f64 / p as f64).powf(2.0 / 3.0);
    let alpha = (0..=n).map(|j| scale * (peak - j as f64 / p as f64).max(0.0)).collect();
    DualSolution::symmetric(n, p, 2, alpha)
}

/// k-sum dual certificate:
/// alpha_j = (1/2n^(k/2)) * max((n/p)^(k/(k+1)) - j/p, 0).
/// At k = 2 this coincides with the element-distinctness certificate.
pub fn ksum_dual_certificate(n: usize, k: usize, p: usize) -> Result<DualSolution> {
    if k < 2 || k > n || p == 0 || p > n {
        return Err(Error::invalid("need 2 <= k <= n and 1 <= p <= n"));
    }
    let scale = 1.0 / (2.0 * (n as f64).powf(k as f64 / 2.0));
    let peak = (n as f64 / p as f64).powf(k as f64 / (k as f64 + 1.0));
    let alpha = (0..=n).map(|j| scale * (peak - j as f64 / p as f64).max(0.0)).collect();
    DualSolution::symmetric(n, p, k, alpha)
}

#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub max_l: f64,
    pub worst_edge: Option<Edge>,
    pub feasible: bool,
    pub edges_checked: usize,
}

const FEASIBILITY_TOL: f64 = 1e-9;

/// L for one edge via exact enumeration over every block.
fn edge_l_naive(d: &DualSolution, structure: &CertificateStructure, e: Edge) -> f64 {
    let t = e.target();
    structure
        .blocks
        .iter()
        .enumerate()
        .map(|(idx, &m)| {
            let diff = d.alpha_at(e.s, m, idx) - d.alpha_at(t, m, idx);
            diff * diff
        })
        .sum()
}

/// L for one edge of a symmetric dual over the complete k-uniform family,
/// grouping blocks by (i, j) = (|M n S|, |M n J|) and counting each group
/// with binomial coefficients. Blocks with i = k are contained in S on both
/// endpoints (zero term); blocks with i + j = k, i < k lose their coefficient
/// at the target (term alpha_s^2); all others contribute the stage
/// difference squared.
fn edge_l_grouped(alpha: &[f64], n: usize, k: usize, s_size: usize, t_size: usize) -> f64 {
    let a_s = alpha[s_size];
    let a_st = alpha[s_size + t_size];
    let diff2 = (a_s - a_st) * (a_s - a_st);
    let mut l = 0.0;
    for i in 0..=k.min(s_size) {
        for j in 0..=(k - i).min(t_size) {
            let rem = k - i - j;
            if rem > n - s_size - t_size {
                continue;
            }
            let count =
                binomial(s_size, i) * binomial(t_size, j) * binomial(n - s_size - t_size, rem);
            let term = if i == k {
                0.0
            } else if i + j == k {
                a_s * a_s
            } else {
                diff2
            };
            l += count * term;
        }
    }
    l
}

fn feasibility_over<F>(edges: &EdgeSetP, edge_l: F) -> FeasibilityReport
where
    F: Fn(Edge) -> f64 + Sync,
{
    let (max_l, worst_edge) = edges
        .edges
        .par_iter()
        .map(|&e| (edge_l(e), Some(e)))
        .reduce(|| (f64::NEG_INFINITY, None), |a, b| if a.0 >= b.0 { a } else { b });
    let max_l = if worst_edge.is_none() { 0.0 } else { max_l };
    FeasibilityReport {
        max_l,
        worst_edge,
        feasible: max_l <= 1.0 + FEASIBILITY_TOL,
        edges_checked: edges.edges.len(),
    }
}

/// Exact feasibility check of the batched dual constraint
/// sum_M (alpha_S(M) - alpha_{S u J}(M))^2 <= 1 over every edge. Symmetric
/// duals over complete k-uniform structures take the binomial-grouping path;
/// everything else enumerates blocks directly.
pub fn verify_dual_feasibility(
    d: &DualSolution,
    edges: &EdgeSetP,
    structure: &CertificateStructure,
) -> Result<FeasibilityReport> {
    if structure.n != edges.n || d.n != edges.n {
        return Err(Error::invalid("dual, edge set, and structure must share n"));
    }
    match &d.form {
        DualForm::Symmetric { alpha } if structure.is_complete_uniform() => {
            let (n, k) = (d.n, structure.k_bound);
            if k != d.k {
                return Err(Error::invalid("dual block size does not match the structure"));
            }
            Ok(feasibility_over(edges, |e| {
                edge_l_grouped(alpha, n, k, e.s.count_ones() as usize, e.j.count_ones() as usize)
            }))
        }
        _ => Ok(verify_dual_feasibility_naive(d, edges, structure)?),
    }
}

/// Per-block enumeration path, also used as the oracle for the grouped path.
pub fn verify_dual_feasibility_naive(
    d: &DualSolution,
    edges: &EdgeSetP,
    structure: &CertificateStructure,
) -> Result<FeasibilityReport> {
    if structure.n != edges.n || d.n != edges.n {
        return Err(Error::invalid("dual, edge set, and structure must share n"));
    }
    Ok(feasibility_over(edges, |e| edge_l_naive(d, structure, e)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_set_counts() {
        assert_eq!(build_edge_set(3, 1, 3).unwrap().edges.len(), 12);
        let e = build_edge_set(2, 2, 2).unwrap();
        assert_eq!(e.edges.len(), 5);
        let expected: Vec<Edge> = vec![
            Edge { s: 0, j: 0b01 },
            Edge { s: 0, j: 0b10 },
            Edge { s: 0, j: 0b11 },
            Edge { s: 0b01, j: 0b10 },
            Edge { s: 0b10, j: 0b01 },
        ];
        for ex in expected {
            assert!(e.edges.contains(&ex), "missing edge {}", ex.key());
        }
        assert_eq!(build_edge_set(3, 3, 0).unwrap().edges.len(), 7);
        assert_eq!(
            predicted_edge_count(12, 4, 12),
            build_edge_set(12, 4, 12).unwrap().edges.len() as f64
        );
    }

    #[test]
    fn edge_set_rejects_bad_parameters() {
        assert!(build_edge_set(3, 0, 3).is_err());
        assert!(build_edge_set(3, 4, 3).is_err());
        assert!(build_edge_set(3, 1, 4).is_err());
    }

    #[test]
    fn edge_keys() {
        let e = Edge { s: 0b101, j: 0b010 };
        assert_eq!(e.key(), "{1,3}|{2}");
        assert_eq!(e.target(), 0b111);
        assert_eq!(Edge { s: 0, j: 1 }.key(), "{}|{1}");
    }

    #[test]
    fn ed_certificate_values() {
        let d = ed_dual_certificate(8, 2).unwrap();
        let a0 = d.alpha_stage(0).unwrap();
        assert!((a0 - 4.0f64.powf(2.0 / 3.0) / 16.0).abs() < 1e-15);
        assert!((a0 - 0.15749013123685915).abs() < 1e-15);
        assert!((d.objective() - 0.833359442399309).abs() < 1e-12);
        // exact identity: sqrt(n(n-1)/2) * (n/p)^(2/3) / (2n)
        for n in 2..=24usize {
            for p in 1..=n {
                let d = ed_dual_certificate(n, p).unwrap();
                let reference = (n as f64 * (n as f64 - 1.0) / 2.0).sqrt()
                    * (n as f64 / p as f64).powf(2.0 / 3.0)
                    / (2.0 * n as f64);
                assert!(
                    (d.objective() - reference).abs() <= 1e-12 * reference.max(1.0),
                    "n={n} p={p}"
                );
            }
        }
    }

    #[test]
    fn ed_certificate_at_n_equals_p() {
        let n = 16;
        let d = ed_dual_certificate(n, n).unwrap();
        assert!((d.alpha_stage(0).unwrap() - 1.0 / (2.0 * n as f64)).abs() < 1e-15);
        // objective sqrt(C(n,2))/(2n) -> 1/(2 sqrt 2) for large n
        let limit = 1.0 / (2.0 * 2.0f64.sqrt());
        assert!((d.objective() - limit).abs() < 0.02);
    }

    #[test]
    fn ksum_certificate_values() {
        let d = ksum_dual_certificate(9, 3, 1).unwrap();
        let expected = 9.0f64.powf(0.75) / 54.0;
        assert!((d.alpha_stage(0).unwrap() - expected).abs() < 1e-15);
        assert!((d.alpha_stage(0).unwrap() - 0.09622504486493763).abs() < 1e-15);
        let d9 = ksum_dual_certificate(9, 3, 9).unwrap();
        assert!((d9.alpha_stage(0).unwrap() - 1.0 / 54.0).abs() < 1e-15);
        // k = 2 coincides with the ED certificate
        let a = ksum_dual_certificate(7, 2, 2).unwrap();
        let b = ed_dual_certificate(7, 2).unwrap();
        for j in 0..=7 {
            assert_eq!(a.alpha_stage(j), b.alpha_stage(j));
        }
    }

    #[test]
    fn ed_objective_monotone_in_p() {
        let n = 12;
        let mut prev = f64::INFINITY;
        for p in 1..=n {
            let obj = ed_dual_certificate(n, p).unwrap().objective();
            assert!(obj <= prev + 1e-15);
            prev = obj;
        }
    }

    #[test]
    fn ed_dual_feasible_small() {
        let n = 8;
        let p = 2;
        let d = ed_dual_certificate(n, p).unwrap();
        let edges = build_edge_set(n, p, n).unwrap();
        let structure = CertificateStructure::ed(n).unwrap();
        let rep = verify_dual_feasibility(&d, &edges, &structure).unwrap();
        assert!(rep.feasible, "max L = {}", rep.max_l);
        assert!(rep.max_l <= 1.0 + 1e-9);
        assert_eq!(rep.edges_checked, edges.edges.len());
    }

    #[test]
    fn scaled_dual_detected_infeasible() {
        let n = 8;
        let p = 2;
        let d = ed_dual_certificate(n, p).unwrap();
        // the certificate has slack (max L well below 1), so scale past it
        let DualForm::Symmetric { alpha } = &d.form else { unreachable!() };
        let scaled: Vec<f64> = alpha.iter().map(|a| 3.0 * a).collect();
        let d2 = DualSolution::symmetric(n, p, 2, scaled).unwrap();
        let edges = build_edge_set(n, p, n).unwrap();
        let structure = CertificateStructure::ed(n).unwrap();
        let rep = verify_dual_feasibility(&d2, &edges, &structure).unwrap();
        assert!(!rep.feasible);
        assert!(rep.worst_edge.is_some());
    }

    #[test]
    fn all_zero_dual_has_zero_l() {
        let n = 5;
        let d = DualSolution::symmetric(n, 1, 2, vec![0.0; n + 1]).unwrap();
        let edges = build_edge_set(n, 1, n).unwrap();
        let structure = CertificateStructure::ed(n).unwrap();
        let rep = verify_dual_feasibility(&d, &edges, &structure).unwrap();
        assert_eq!(rep.max_l, 0.0);
        assert!(rep.feasible);
    }

    #[test]
    fn grouped_matches_naive() {
        for n in 3..=8usize {
            for p in 1..=2usize.min(n) {
                let d = ed_dual_certificate(n, p).unwrap();
                let edges = build_edge_set(n, p, n).unwrap();
                let structure = CertificateStructure::ed(n).unwrap();
                let fast = verify_dual_feasibility(&d, &edges, &structure).unwrap();
                let slow = verify_dual_feasibility_naive(&d, &edges, &structure).unwrap();
                assert!(
                    (fast.max_l - slow.max_l).abs() < 1e-12,
                    "n={n} p={p}: {} vs {}",
                    fast.max_l,
                    slow.max_l
                );
            }
        }
        // and for a k-sum instance
        let d = ksum_dual_certificate(7, 3, 2).unwrap();
        let edges = build_edge_set(7, 2, 7).unwrap();
        let structure = CertificateStructure::uniform(7, 3).unwrap();
        let fast = verify_dual_feasibility(&d, &edges, &structure).unwrap();
        let slow = verify_dual_feasibility_naive(&d, &edges, &structure).unwrap();
        assert!((fast.max_l - slow.max_l).abs() < 1e-12);
    }

    #[test]
    fn general_dual_round_trip() {
        let structure = CertificateStructure::ed(3).unwrap();
        let mut alpha = HashMap::new();
        alpha.insert((0u32, 0usize), 0.5);
        alpha.insert((0b100u32, 0usize), 0.25); // S={3}, M={1,2}
        let d = DualSolution::general(3, 1, &structure, alpha).unwrap();
        assert!((d.objective() - 0.5).abs() < 1e-15);
        assert_eq!(d.alpha_at(0b011, 0b011, 0), 0.0); // M inside S
        assert_eq!(d.alpha_at(0b100, 0b011, 0), 0.25);
        assert_eq!(d.support_cap(), 1);

        let mut bad = HashMap::new();
        bad.insert((0b011u32, 0usize), 0.1); // M = S, must be zero
        assert!(DualSolution::general(3, 1, &structure, bad).is_err());
    }

    #[test]
    fn support_cap_matches_formula() {
        let d = ed_dual_certificate(12, 3).unwrap();
        // alpha_j > 0 iff j < p (n/p)^{2/3}
        let bound = 3.0 * 4.0f64.powf(2.0 / 3.0);
        let expect = (0..=12).filter(|&j| (j as f64) < bound).count() - 1;
        assert_eq!(d.support_cap(), expect);
    }
}
