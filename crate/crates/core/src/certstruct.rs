//! Certificate structures, orthogonal arrays, and the functions they induce
//! over alphabets [q]: element distinctness (equality arrays on pairs) and
//! k-sum (zero-sum arrays on k-subsets).

use crate::error::{Error, Result};
use crate::subsets::{binomial_u64, k_subsets, mask_indices};

/// A family of pairwise incomparable index subsets of [n], each a potential
/// 1-certificate location.
#[derive(Debug, Clone)]
pub struct CertificateStructure {
    pub n: usize,
    /// bitmasks, lexicographic in index-tuple order
    pub blocks: Vec<u32>,
    pub k_bound: usize,
}

impl CertificateStructure {
    pub fn new(n: usize, blocks: Vec<u32>) -> Result<Self> {
        if n == 0 || n > 32 {
            return Err(Error::invalid("ground-set size out of range"));
        }
        let ground = ((1u64 << n) - 1) as u32;
        for &b in &blocks {
            if b == 0 || b & !ground != 0 {
                return Err(Error::invalid("block out of ground-set range or empty"));
            }
        }
        for (i, &a) in blocks.iter().enumerate() {
            for &b in &blocks[i + 1..] {
                if a & b == a || a & b == b {
                    return Err(Error::invalid("blocks must be pairwise incomparable"));
                }
            }
        }
        let k_bound = blocks.iter().map(|b| b.count_ones() as usize).max().unwrap_or(0);
        Ok(CertificateStructure { n, blocks, k_bound })
    }

    /// All 2-subsets of [n]: the element-distinctness structure.
    pub fn ed(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("element distinctness needs n >= 2"));
        }
        Self::new(n, k_subsets(n, 2))
    }

    /// All k-subsets of [n].
    pub fn uniform(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::invalid("block size k must satisfy 1 <= k <= n"));
        }
        Self::new(n, k_subsets(n, k))
    }

    /// True when blocks are exactly all k-subsets for k = k_bound, which
    /// enables binomial-counting fast paths.
    pub fn is_complete_uniform(&self) -> bool {
        self.blocks.iter().all(|b| b.count_ones() as usize == self.k_bound)
            && self.blocks.len() as u64 == binomial_u64(self.n, self.k_bound)
    }
}

/// Orthogonal array of length k over [q]: fixing any k-1 coordinates leaves
/// exactly one completion inside the array. Stored as a membership predicate
/// plus a completion rule, so evaluation never enumerates q^k tuples.
#[derive(Debug, Clone)]
pub enum OrthogonalArray {
    /// {(v,v,...,v)}: the equality array (element distinctness uses k=2).
    Equality { k: usize, q: u32 },
    /// {(v_1..v_k) : sum v_i = 0 mod q}.
    ZeroSum { k: usize, q: u32 },
}

impl OrthogonalArray {
    pub fn len_k(&self) -> usize {
        match self {
            OrthogonalArray::Equality { k, .. } | OrthogonalArray::ZeroSum { k, .. } => *k,
        }
    }

    pub fn alphabet(&self) -> u32 {
        match self {
            OrthogonalArray::Equality { q, .. } | OrthogonalArray::ZeroSum { q, .. } => *q,
        }
    }

    pub fn contains(&self, tuple: &[u32]) -> bool {
        match self {
            OrthogonalArray::Equality { k, .. } => {
                tuple.len() == *k && tuple.iter().all(|&v| v == tuple[0])
            }
            OrthogonalArray::ZeroSum { k, q } => {
                tuple.len() == *k && tuple.iter().map(|&v| v as u64).sum::<u64>() % *q as u64 == 0
            }
        }
    }

    /// The unique value completing the tuple at position `hole`.
    pub fn complete(&self, tuple: &[u32], hole: usize) -> u32 {
        match self {
            OrthogonalArray::Equality { k, .. } => {
                // any other coordinate carries the common value
                let other = if hole == 0 { 1 } else { 0 };
                debug_assert!(*k >= 2);
                tuple[other]
            }
            OrthogonalArray::ZeroSum { q, .. } => {
                let s: u64 = tuple
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != hole)
                    .map(|(_, &v)| v as u64)
                    .sum();
                ((*q as u64 - s % *q as u64) % *q as u64) as u32
            }
        }
    }

    /// Exhaustive check of the exactly-one-completion property.
    pub fn verify(&self) -> Result<bool> {
        let k = self.len_k();
        let q = self.alphabet() as u64;
        let total = q.checked_pow(k as u32).ok_or_else(|| Error::limit("q^k overflows"))?;
        if total > 10_000_000 {
            return Err(Error::limit(format!("orthogonal-array verification needs q^k <= 1e7, got {total}")));
        }
        for i in 0..k {
            // enumerate assignments of the other k-1 coordinates
            let others = total / q;
            for idx in 0..others {
                let mut tuple = vec![0u32; k];
                let mut rest = idx;
                for (pos, slot) in tuple.iter_mut().enumerate() {
                    if pos == i {
                        continue;
                    }
                    *slot = (rest % q) as u32;
                    rest /= q;
                }
                let mut completions = 0;
                for v in 0..q as u32 {
                    tuple[i] = v;
                    if self.contains(&tuple) {
                        completions += 1;
                    }
                }
                if completions != 1 {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// The function on [q]^n induced by a certificate structure with one
/// orthogonal array per block: f(x) = 1 iff some block's projection of x
/// lies in that block's array.
#[derive(Debug, Clone)]
pub struct InducedFunction {
    pub structure: CertificateStructure,
    pub arrays: Vec<OrthogonalArray>,
    pub q: u32,
    /// q >= 2|blocks|, required by the lower-bound theorems; construction
    /// is still permitted below the threshold for exploratory runs.
    pub theorem_precondition_met: bool,
}

impl InducedFunction {
    pub fn new(structure: CertificateStructure, arrays: Vec<OrthogonalArray>, q: u32) -> Result<Self> {
        if arrays.len() != structure.blocks.len() {
            return Err(Error::invalid("one orthogonal array per block required"));
        }
        for (b, a) in structure.blocks.iter().zip(&arrays) {
            if a.len_k() != b.count_ones() as usize {
                return Err(Error::invalid("array length must equal its block size"));
            }
            if a.alphabet() != q {
                return Err(Error::invalid("array alphabet must match q"));
            }
        }
        let theorem_precondition_met = q as u64 >= 2 * structure.blocks.len() as u64;
        Ok(InducedFunction { structure, arrays, q, theorem_precondition_met })
    }

    /// Element distinctness on [q]^n.
    pub fn ed(n: usize, q: u32) -> Result<Self> {
        let structure = CertificateStructure::ed(n)?;
        let arrays = structure.blocks.iter().map(|_| OrthogonalArray::Equality { k: 2, q }).collect();
        Self::new(structure, arrays, q)
    }

    /// k-sum on [q]^n: f(x)=1 iff some k entries sum to 0 mod q.
    pub fn ksum(n: usize, k: usize, q: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid("k-sum needs k >= 2"));
        }
        let structure = CertificateStructure::uniform(n, k)?;
        let arrays = structure.blocks.iter().map(|_| OrthogonalArray::ZeroSum { k, q }).collect();
        Self::new(structure, arrays, q)
    }

    pub fn n(&self) -> usize {
        self.structure.n
    }

    fn check_input(&self, x: &[u32]) -> Result<()> {
        if x.len() != self.structure.n {
            return Err(Error::invalid("input arity mismatch"));
        }
        if let Some(&bad) = x.iter().find(|&&v| v >= self.q) {
            return Err(Error::invalid(format!("entry {bad} outside alphabet [0,{})", self.q)));
        }
        Ok(())
    }

    /// Whether block `idx` is a 1-certificate for x (x's projection lies in
    /// the block's array).
    pub fn certifies(&self, idx: usize, x: &[u32]) -> bool {
        let tuple: Vec<u32> =
            mask_indices(self.structure.blocks[idx]).iter().map(|&i| x[i]).collect();
        self.arrays[idx].contains(&tuple)
    }

    /// f(x) with the first witnessing block (canonical order), if any.
    pub fn evaluate(&self, x: &[u32]) -> Result<(bool, Option<usize>)> {
        self.check_input(x)?;
        for idx in 0..self.structure.blocks.len() {
            if self.certifies(idx, x) {
                return Ok((true, Some(idx)));
            }
        }
        Ok((false, None))
    }
}
