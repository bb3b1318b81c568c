//! Johnson-graph walk spectra, product-graph gaps, marked fractions under
//! the stationary distribution, and the quantum-walk cost model.

use crate::certstruct::InducedFunction;
use crate::error::{Error, Result};
use crate::subsets::{binomial, k_subsets};
use nalgebra::DMatrix;
use std::collections::HashMap;

/// densest explicit walk matrix the cross-checks will build
pub const EXPLICIT_VERTEX_LIMIT: usize = 5000;
/// enumeration budget for exact marked fractions
pub const ENUMERATION_LIMIT: f64 = 1e7;

#[derive(Debug, Clone, Copy)]
pub struct JohnsonWalk {
    pub n: usize,
    pub r: usize,
    /// mix the step with identity, (I + P) / 2
    pub lazy: bool,
}

impl JohnsonWalk {
    pub fn new(n: usize, r: usize, lazy: bool) -> Result<Self> {
        if r == 0 || r >= n {
            return Err(Error::invalid("need 1 <= r <= n - 1"));
        }
        Ok(JohnsonWalk { n, r, lazy })
    }

    /// Closed-form spectrum, descending, as (eigenvalue, multiplicity):
    /// lambda_i = ((r-i)(n-r-i) - i) / (r(n-r)) for i up to min(r, n-r),
    /// multiplicity C(n,i) - C(n,i-1). Lazy walks map it through (1+x)/2.
    pub fn spectrum(&self) -> Vec<(f64, f64)> {
        let (n, r) = (self.n as f64, self.r as f64);
        let top = r.min(n - r) as usize;
        (0..=top)
            .map(|i| {
                let fi = i as f64;
                let lam = ((r - fi) * (n - r - fi) - fi) / (r * (n - r));
                let mult = binomial(self.n, i) - if i == 0 { 0.0 } else { binomial(self.n, i - 1) };
                (if self.lazy { (1.0 + lam) / 2.0 } else { lam }, mult)
            })
            .collect()
    }

    /// 1 minus the second-largest eigenvalue; n/(r(n-r)) non-lazy, halved lazy.
    pub fn gap(&self) -> f64 {
        let s = self.spectrum();
        1.0 - s[1].0
    }

    /// Explicit transition matrix over the r-subsets: one uniform element
    /// replacement, P = A / (r(n-r)).
    pub fn transition_matrix(&self) -> Result<DMatrix<f64>> {
        let verts = k_subsets(self.n, self.r);
        if verts.len() > EXPLICIT_VERTEX_LIMIT {
            return Err(Error::limit("vertex count exceeds the explicit matrix bound"));
        }
        let deg = (self.r * (self.n - self.r)) as f64;
        let mut m = DMatrix::from_fn(verts.len(), verts.len(), |a, b| {
            f64::from((verts[a] ^ verts[b]).count_ones() == 2) / deg
        });
        if self.lazy {
            m = (m + DMatrix::identity(verts.len(), verts.len())) / 2.0;
        }
        Ok(m)
    }
}

pub fn johnson_spectrum(n: usize, r: usize) -> Result<Vec<(f64, f64)>> {
    Ok(JohnsonWalk::new(n, r, false)?.spectrum())
}

#[derive(Debug, Clone)]
pub struct ProductSpectrum {
    /// distinct eigenvalues of the p-fold product walk, descending
    pub eigenvalues: Vec<(f64, f64)>,
    pub second_largest: f64,
    pub gap: f64,
}

/// All p-fold products of the single-copy spectrum, with multiplicities. The
/// pointwise tensor walk has exactly these eigenvalues.
pub fn product_spectrum(w: &JohnsonWalk, p: usize) -> Result<ProductSpectrum> {
    if p == 0 {
        return Err(Error::invalid("need p >= 1"));
    }
    let single = w.spectrum();
    let mut acc: HashMap<u64, (f64, f64)> = HashMap::new();
    acc.insert(1.0f64.to_bits(), (1.0, 1.0));
    for _ in 0..p {
        let mut next: HashMap<u64, (f64, f64)> = HashMap::new();
        for (&_bits, &(v, m)) in &acc {
            for &(sv, sm) in &single {
                let nv = v * sv;
                let e = next.entry(nv.to_bits()).or_insert((nv, 0.0));
                e.1 += m * sm;
            }
        }
        acc = next;
    }
    let mut eigenvalues: Vec<(f64, f64)> = acc.into_values().collect();
    eigenvalues.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let top = eigenvalues[0];
    // a repeated top eigenvalue means the product walk does not mix at all
    let second_largest = if top.1 > 1.0 + 1e-9 {
        top.0
    } else {
        eigenvalues.get(1).map_or(top.0, |e| e.0)
    };
    Ok(ProductSpectrum { eigenvalues, second_largest, gap: 1.0 - second_largest })
}

#[derive(Debug, Clone)]
pub struct MarkedFraction {
    /// exact probability under the stationary product measure
    pub exact: f64,
    /// the analytic floor (r/n)^k quoted by the cost analysis
    pub lower_bound_expr: f64,
    pub zero_input: bool,
}

/// Probability, under p independent uniform (r/p)-subsets, that the union of
/// the copies contains a witness block of x. Exact enumeration.
pub fn marked_fraction(
    func: &InducedFunction,
    x: &[u32],
    r: usize,
    p: usize,
) -> Result<MarkedFraction> {
    let n = func.structure.n;
    if p == 0 || r == 0 || r > n {
        return Err(Error::invalid("need 1 <= r <= n and p >= 1"));
    }
    if !r.is_multiple_of(p) {
        return Err(Error::invalid("p must divide r"));
    }
    let per_copy = r / p;
    let count = binomial(n, per_copy);
    if count.powi(p as i32) > ENUMERATION_LIMIT {
        return Err(Error::limit("state enumeration exceeds the budget"));
    }
    let k = func.structure.k_bound;
    let lower_bound_expr = (r as f64 / n as f64).powi(k as i32);
    let witnesses: Vec<u32> = (0..func.structure.blocks.len())
        .filter(|&bi| func.certifies(bi, x))
        .map(|bi| func.structure.blocks[bi])
        .collect();
    if witnesses.is_empty() {
        return Ok(MarkedFraction { exact: 0.0, lower_bound_expr, zero_input: true });
    }
    let subsets = k_subsets(n, per_copy);
    let mut marked = 0u64;
    let mut stack = vec![(0usize, 0u32)];
    while let Some((depth, union)) = stack.pop() {
        if depth == p {
            if witnesses.iter().any(|&m| m & !union == 0) {
                marked += 1;
            }
            continue;
        }
        for &s in &subsets {
            stack.push((depth + 1, union | s));
        }
    }
    let total = (subsets.len() as f64).powi(p as i32);
    Ok(MarkedFraction { exact: marked as f64 / total, lower_bound_expr, zero_input: false })
}

#[derive(Debug, Clone, Copy)]
pub struct WalkCostModel {
    pub setup: f64,
    pub update: f64,
    pub check: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub total: f64,
}

/// S + (1/sqrt(eps)) (U/sqrt(delta) + C).
pub fn mnrs_cost(setup: f64, update: f64, check: f64, epsilon: f64, delta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) || epsilon == 0.0 || !(0.0..=1.0).contains(&delta) || delta == 0.0
    {
        return Err(Error::invalid("epsilon and delta must lie in (0, 1]"));
    }
    if setup < 0.0 || update < 0.0 || check < 0.0 {
        return Err(Error::invalid("costs must be nonnegative"));
    }
    Ok(setup + (update / delta.sqrt() + check) / epsilon.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkProblem {
    Ed,
    Ksum { k: usize },
}

impl WalkProblem {
    pub fn k(&self) -> usize {
        match self {
            WalkProblem::Ed => 2,
            WalkProblem::Ksum { k } => *k,
        }
    }
}

/// The walk over p copies of J(n, r/p): setup r/p, update 2, check 0,
/// epsilon (r/n)^k, delta p/r.
pub fn instantiate_cost(problem: WalkProblem, n: usize, p: usize, r: usize) -> Result<WalkCostModel> {
    let k = problem.k();
    if k < 2 {
        return Err(Error::invalid("need k >= 2"));
    }
    if p == 0 || p > n || r == 0 || r > n || !r.is_multiple_of(p) || r / p > n - 1 {
        return Err(Error::invalid("need p | r, 1 <= r/p <= n - 1"));
    }
    let (nf, rf, pf) = (n as f64, r as f64, p as f64);
    let setup = rf / pf;
    let update = 2.0;
    let check = 0.0;
    let epsilon = (rf / nf).powi(k as i32).min(1.0);
    let delta = (pf / rf).min(1.0);
    let total = mnrs_cost(setup, update, check, epsilon, delta)?;
    Ok(WalkCostModel { setup, update, check, epsilon, delta, total })
}

#[derive(Debug, Clone)]
pub struct OptimizedR {
    pub r: usize,
    pub model: WalkCostModel,
    /// the analytic optimum n^(k/(k+1)) p^(1/(k+1))
    pub closed_form_r: f64,
}

/// Grid search over multiples of p. The minimizer is checked against the
/// analytic optimum (within a factor 2) and against the cost ceiling
/// 4 (n/p)^(k/(k+1)); straying past either is a property failure.
pub fn optimize_r(problem: WalkProblem, n: usize, p: usize) -> Result<OptimizedR> {
    if p == 0 || p > n {
        return Err(Error::invalid("need 1 <= p <= n"));
    }
    let k = problem.k();
    let mut best: Option<(usize, WalkCostModel)> = None;
    let mut m = 1;
    while m * p <= n {
        if m < n {
            let r = m * p;
            let model = instantiate_cost(problem, n, p, r)?;
            if best.as_ref().is_none_or(|(_, b)| model.total < b.total) {
                best = Some((r, model));
            }
        }
        m += 1;
    }
    let (r, model) = best.ok_or_else(|| Error::invalid("empty search grid"))?;
    let kf = k as f64;
    let closed_form_r = (n as f64).powf(kf / (kf + 1.0)) * (p as f64).powf(1.0 / (kf + 1.0));
    let factor = (r as f64 / closed_form_r).max(closed_form_r / r as f64);
    if factor > 2.0 {
        return Err(Error::property(format!(
            "grid optimum r = {r} strays from the analytic optimum {closed_form_r:.3}"
        )));
    }
    let ceiling = 4.0 * (n as f64 / p as f64).powf(kf / (kf + 1.0));
    if model.total > ceiling {
        return Err(Error::property(format!(
            "optimized cost {} exceeds the ceiling {ceiling}",
            model.total
        )));
    }
    Ok(OptimizedR { r, model, closed_form_r })
}
