//! Total Boolean functions on n bits stored as truth tables, with exact
//! classical complexity measures: block sensitivity, certificate complexity,
//! and the parallel decision-tree upper bound built from them.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Inputs are little-endian integers: bit i of the input index is variable
/// x_{i+1}. Exact-measure enumeration is capped at n = 16.
pub const MAX_EXACT_ARITY: usize = 16;

#[derive(Debug, Clone)]
pub struct BooleanFunction {
    n: usize,
    table: Vec<bool>,
}

impl BooleanFunction {
    pub fn new(n: usize, table: Vec<bool>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("arity must be at least 1"));
        }
        if table.len() != 1 << n {
            return Err(Error::invalid(format!(
                "truth table must have 2^{n} = {} entries, got {}",
                1usize << n,
                table.len()
            )));
        }
        Ok(BooleanFunction { n, table })
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> bool) -> Result<Self> {
        if n == 0 || n > 30 {
            return Err(Error::invalid("arity out of range"));
        }
        Ok(BooleanFunction { n, table: (0..1usize << n).map(f).collect() })
    }

    pub fn or(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| x != 0)
    }

    pub fn and(n: usize) -> Result<Self> {
        Self::from_fn(n, move |x| x == (1usize << n) - 1)
    }

    pub fn parity(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| x.count_ones() % 2 == 1)
    }

    pub fn random(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_fn(n, |_| rng.gen_bool(0.5))
    }

    /// Parses built-in names: "or:n", "and:n", "parity:n", "random:n:seed",
    /// or "hex:n:DEADBEEF" for explicit tables.
    pub fn from_name(name: &str) -> Result<Self> {
        let parts: Vec<&str> = name.split(':').collect();
        let arity = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| Error::invalid(format!("bad arity in function name '{name}'")))
        };
        match parts.as_slice() {
            ["or", n] => Self::or(arity(n)?),
            ["and", n] => Self::and(arity(n)?),
            ["parity", n] => Self::parity(arity(n)?),
            ["random", n, seed] => {
                let seed: u64 =
                    seed.parse().map_err(|_| Error::invalid(format!("bad seed in '{name}'")))?;
                Self::random(arity(n)?, seed)
            }
            ["hex", n, hex] => Self::from_hex(arity(n)?, hex),
            _ => Err(Error::invalid(format!(
                "unknown function '{name}' (expected or:n, and:n, parity:n, random:n:seed, hex:n:HEX)"
            ))),
        }
    }

    /// Truth table as a hex string of 2^n bits, MSB = input index 2^n - 1.
    pub fn to_hex(&self) -> String {
        let bits = 1usize << self.n;
        let digits = bits.div_ceil(4);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nibble = 0u8;
            for b in 0..4 {
                let idx = d * 4 + b;
                if idx < bits && self.table[idx] {
                    nibble |= 1 << b;
                }
            }
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        let hex = hex.trim().trim_start_matches("0x");
        let bits = 1usize
            .checked_shl(n as u32)
            .ok_or_else(|| Error::invalid("arity out of range"))?;
        let digits = bits.div_ceil(4);
        if hex.len() != digits {
            return Err(Error::invalid(format!(
                "hex table for n={n} must have {digits} digits, got {}",
                hex.len()
            )));
        }
        let mut table = vec![false; bits];
        for (pos, ch) in hex.chars().enumerate() {
            let nibble =
                ch.to_digit(16).ok_or_else(|| Error::invalid(format!("bad hex digit '{ch}'")))? as u8;
            let d = digits - 1 - pos;
            for b in 0..4 {
                let idx = d * 4 + b;
                if idx < bits {
                    table[idx] = nibble >> b & 1 == 1;
                } else if nibble >> b & 1 == 1 {
                    return Err(Error::invalid("hex table has set padding bits beyond 2^n"));
                }
            }
        }
        BooleanFunction::new(n, table)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn evaluate(&self, x: usize) -> bool {
        self.table[x]
    }

    pub fn negated(&self) -> BooleanFunction {
        BooleanFunction { n: self.n, table: self.table.iter().map(|b| !b).collect() }
    }

    pub fn is_constant(&self) -> bool {
        self.table.iter().all(|&b| b == self.table[0])
    }

    fn check_enumerable(&self) -> Result<()> {
        if self.n > MAX_EXACT_ARITY {
            return Err(Error::limit(format!(
                "exact measures require n <= {MAX_EXACT_ARITY}, got {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Minimal sensitive blocks at x: nonempty B with f(x^B) != f(x) and no
    /// sensitive proper subset. Any maximum disjoint family of sensitive
    /// blocks can be taken among minimal ones, and a set S is a certificate
    /// at x iff it intersects every minimal sensitive block.
    fn minimal_sensitive_blocks(&self, x: usize) -> Vec<u32> {
        let fx = self.table[x];
        let size = 1usize << self.n;
        // hs[b]: some nonempty subset of b is sensitive at x; filled in
        // ascending mask order so one-element-removed entries already exist
        let mut hs = vec![false; size];
        let mut minimal = Vec::new();
        for b in 1..size {
            let sensitive = self.table[x ^ b] != fx;
            let mut sub_hit = false;
            let mut t = b;
            while t != 0 {
                let low = t & t.wrapping_neg();
                if hs[b & !low] {
                    sub_hit = true;
                    break;
                }
                t &= !low;
            }
            hs[b] = sensitive || sub_hit;
            if sensitive && !sub_hit {
                minimal.push(b as u32);
            }
        }
        minimal
    }

    /// bs(f, x): maximum number of disjoint sensitive blocks at x.
    pub fn block_sensitivity_at(&self, x: usize) -> Result<usize> {
        self.check_enumerable()?;
        let minimal = self.minimal_sensitive_blocks(x);
        Ok(max_disjoint_packing(&minimal, self.n))
    }

    /// bs(f) = max_x bs(f, x); 0 for constant functions.
    pub fn block_sensitivity(&self) -> Result<usize> {
        self.check_enumerable()?;
        (0..1usize << self.n)
            .into_par_iter()
            .map(|x| self.block_sensitivity_at(x))
            .try_reduce(|| 0, |a, b| Ok(a.max(b)))
    }

    /// C(f, x): size of a smallest certificate at x (minimum hitting set of
    /// the minimal sensitive blocks).
    pub fn certificate_complexity_at(&self, x: usize) -> Result<usize> {
        self.check_enumerable()?;
        let minimal = self.minimal_sensitive_blocks(x);
        Ok(min_hitting_set(&minimal, self.n))
    }

    /// C(f), C^0(f) or C^1(f) depending on `side`; 0 for constant functions
    /// restricted to an empty side.
    pub fn certificate_complexity(&self, side: CertSide) -> Result<usize> {
        self.check_enumerable()?;
        (0..1usize << self.n)
            .into_par_iter()
            .filter(|&x| match side {
                CertSide::Both => true,
                CertSide::Zero => !self.table[x],
                CertSide::One => self.table[x],
            })
            .map(|x| self.certificate_complexity_at(x))
            .try_reduce(|| 0, |a, b| Ok(a.max(b)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertSide {
    Zero,
    One,
    Both,
}

/// Exact maximum set packing over the given blocks, by memoized recursion on
/// the set of still-available coordinates. Singleton blocks are split off
/// first: every minimal block of size >= 2 is disjoint from all sensitive
/// singletons, so singletons always join a maximum packing.
fn max_disjoint_packing(blocks: &[u32], n: usize) -> usize {
    let singles: u32 = blocks.iter().filter(|b| b.count_ones() == 1).fold(0, |m, &b| m | b);
    let larger: Vec<u32> =
        blocks.iter().copied().filter(|b| b.count_ones() >= 2 && b & singles == 0).collect();
    let base = singles.count_ones() as usize;
    if larger.is_empty() {
        return base;
    }
    let avail = (((1u64 << n) - 1) as u32) & !singles;
    let mut memo = std::collections::HashMap::new();
    base + pack_rec(&larger, avail, &mut memo)
}

fn pack_rec(blocks: &[u32], avail: u32, memo: &mut std::collections::HashMap<u32, usize>) -> usize {
    // lowest available coordinate that some fitting block uses
    let mut pivot = None;
    for &b in blocks {
        if b & !avail == 0 {
            let low = b & b.wrapping_neg();
            pivot = Some(match pivot {
                None => low,
                Some(p) if low < p => low,
                Some(p) => p,
            });
        }
    }
    let Some(pivot) = pivot else { return 0 };
    if let Some(&v) = memo.get(&avail) {
        return v;
    }
    // either pivot's coordinate goes unused, or some block containing it is packed
    let mut best = pack_rec(blocks, avail & !pivot, memo);
    for &b in blocks {
        if b & pivot != 0 && b & !avail == 0 {
            best = best.max(1 + pack_rec(blocks, avail & !b, memo));
        }
    }
    memo.insert(avail, best);
    best
}

/// Exact minimum hitting set by branch and bound on an unhit block.
fn min_hitting_set(blocks: &[u32], n: usize) -> usize {
    if blocks.is_empty() {
        return 0;
    }
    let mut best = n;
    hit_rec(blocks, 0, 0, &mut best);
    best
}

fn hit_rec(blocks: &[u32], chosen: u32, count: usize, best: &mut usize) {
    let unhit = blocks.iter().find(|&&b| b & chosen == 0);
    match unhit {
        None => *best = (*best).min(count),
        Some(&b) => {
            if count + 1 >= *best {
                return; // even one more element cannot beat the incumbent
            }
            for i in 0..32 {
                if b >> i & 1 == 1 {
                    hit_rec(blocks, chosen | 1 << i, count + 1, best);
                }
            }
        }
    }
}

/// Which orientation (f or its negation) produced `dpar_upper`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    Direct,
    Negated,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexityReport {
    pub n: usize,
    pub p: usize,
    pub bs: usize,
    pub c: usize,
    pub c1: usize,
    pub dpar_upper: usize,
    pub dpar_orientation: Orientation,
    /// sqrt(bs/p); order-of-growth only, no constant is claimed.
    pub q_lower: f64,
}

impl ComplexityReport {
    pub fn compute(f: &BooleanFunction, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("p must be at least 1"));
        }
        let bs = f.block_sensitivity()?;
        let c = f.certificate_complexity(CertSide::Both)?;
        let c1 = f.certificate_complexity(CertSide::One)?;
        let (dpar_upper, dpar_orientation) = dpar_upper_bound(f, p)?;
        Ok(ComplexityReport {
            n: f.arity(),
            p,
            bs,
            c,
            c1,
            dpar_upper,
            dpar_orientation,
            q_lower: q_parallel_lower_bs(bs, p),
        })
    }
}

/// ceil(C1(f)/p) * bs(f); when C(f) != C1(f) the same bound for the negated
/// function is also available and the smaller of the two is returned.
pub fn dpar_upper_bound(f: &BooleanFunction, p: usize) -> Result<(usize, Orientation)> {
    if p == 0 {
        return Err(Error::invalid("p must be at least 1"));
    }
    let bs = f.block_sensitivity()?;
    if bs == 0 {
        return Ok((0, Orientation::Direct)); // constant function
    }
    let c = f.certificate_complexity(CertSide::Both)?;
    let c1 = f.certificate_complexity(CertSide::One)?;
    let direct = c1.div_ceil(p) * bs;
    if c == c1 {
        return Ok((direct, Orientation::Direct));
    }
    let neg = f.negated();
    let c1_neg = neg.certificate_complexity(CertSide::One)?;
    let flipped = c1_neg.div_ceil(p) * bs; // bs is invariant under negation
    if flipped < direct {
        Ok((flipped, Orientation::Negated))
    } else {
        Ok((direct, Orientation::Direct))
    }
}

/// sqrt(bs/p), the argument of the parallel quantum lower bound.
pub fn q_parallel_lower_bs(bs: usize, p: usize) -> f64 {
    (bs as f64 / p as f64).sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct PolynomialRelationReport {
    pub bs: usize,
    pub c1: usize,
    pub p: usize,
    pub c_exponent: f64,
    /// p <= bs^{1/c} required for the relation to apply.
    pub precondition_ok: bool,
    pub lhs: usize,
    /// lhs <= k * bs^3 / p with this observed k.
    pub observed_constant: f64,
    /// 6 + 4/(c-1), the exponent in the derived polynomial relation.
    pub exponent: f64,
}

/// Evaluates the inequality chain behind the polynomial relation between
/// parallel deterministic and quantum complexities, for a concrete f.
pub fn polynomial_relation_check(
    f: &BooleanFunction,
    p: usize,
    c: f64,
) -> Result<PolynomialRelationReport> {
    if c <= 1.0 {
        return Err(Error::invalid("exponent parameter c must exceed 1"));
    }
    if p == 0 {
        return Err(Error::invalid("p must be at least 1"));
    }
    let bs = f.block_sensitivity()?;
    let c1 = f.certificate_complexity(CertSide::One)?;
    let precondition_ok = (p as f64) <= (bs as f64).powf(1.0 / c) + 1e-12;
    let lhs = c1.div_ceil(p) * bs;
    let bs3_over_p = (bs as f64).powi(3) / p as f64;
    let observed_constant = if bs3_over_p > 0.0 { lhs as f64 / bs3_over_p } else { 0.0 };
    Ok(PolynomialRelationReport {
        bs,
        c1,
        p,
        c_exponent: c,
        precondition_ok,
        lhs,
        observed_constant,
        exponent: 6.0 + 4.0 / (c - 1.0),
    })
}
