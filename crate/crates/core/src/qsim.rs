//! State-vector simulations of the two explicit procedures: parallel oracle
//! interrogation by phase kickback, and block-parallel Grover search.

use crate::error::{Error, Result};
use crate::subsets::binomial;
use num_complex::Complex64;

pub const MAX_INTERROGATION_QUBITS: usize = 24;

#[derive(Debug, Clone)]
pub struct StateVector {
    pub n: usize,
    pub amps: Vec<Complex64>,
}

impl StateVector {
    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probability_of(&self, basis: usize) -> f64 {
        self.amps[basis].norm_sqr()
    }

    /// In-place Hadamard on every qubit.
    pub fn hadamard_all(&mut self) {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        for q in 0..self.n {
            let bit = 1usize << q;
            for i in 0..self.amps.len() {
                if i & bit == 0 {
                    let (a, b) = (self.amps[i], self.amps[i | bit]);
                    self.amps[i] = (a + b) * inv;
                    self.amps[i | bit] = (a - b) * inv;
                }
            }
        }
    }
}

/// Per-round query batches; index 0 is the no-op slot, real positions are
/// 1-based.
#[derive(Debug, Clone)]
pub struct ParallelQueryLog {
    pub p: usize,
    pub n: usize,
    pub rounds: Vec<Vec<usize>>,
}

impl ParallelQueryLog {
    pub fn new(p: usize, n: usize) -> Self {
        ParallelQueryLog { p, n, rounds: Vec::new() }
    }

    pub fn record(&mut self, batch: Vec<usize>) -> Result<()> {
        if batch.len() > self.p {
            return Err(Error::invalid("batch exceeds the parallelism budget"));
        }
        if batch.iter().any(|&i| i > self.n) {
            return Err(Error::invalid("query index out of range"));
        }
        self.rounds.push(batch);
        Ok(())
    }

    pub fn total_rounds(&self) -> usize {
        self.rounds.len()
    }

    pub fn max_batch(&self) -> usize {
        self.rounds.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Hoeffding-calibrated cutoff: the binomial weight above
/// n/2 + sqrt(n ln(1/eps) / 2) is below eps.
pub fn interrogation_t(n: usize, eps: f64) -> Result<usize> {
    if !(0.0 < eps && eps < 1.0) {
        return Err(Error::invalid("eps must lie in (0, 1)"));
    }
    let nf = n as f64;
    let t = (nf / 2.0 + (nf * (1.0 / eps).ln() / 2.0).sqrt()).ceil() as usize;
    Ok(t.min(n))
}

#[derive(Debug, Clone)]
pub struct InterrogationResult {
    pub n: usize,
    pub p: usize,
    pub t: usize,
    /// number of strings of weight at most t
    pub b: f64,
    pub simulated_success: f64,
    pub closed_form: f64,
    pub rounds: usize,
    pub log: ParallelQueryLog,
    pub final_norm: f64,
}

/// Full interrogation at an explicit cutoff t: prepare the uniform
/// superposition over |y| <= t, apply the phase (-1)^(x.y), Hadamard every
/// qubit, and read off the amplitude of x. The batching puts the first p
/// query positions in round one, the next p in round two, and so on.
pub fn interrogate_with_t(x: &[bool], p: usize, t: usize) -> Result<InterrogationResult> {
    let n = x.len();
    if n == 0 || n > MAX_INTERROGATION_QUBITS {
        return Err(Error::limit("qubit count out of the simulable range"));
    }
    if p == 0 || p > n {
        return Err(Error::invalid("need 1 <= p <= n"));
    }
    if t > n {
        return Err(Error::invalid("cutoff exceeds the string length"));
    }
    let size = 1usize << n;
    let b: f64 = (0..=t).map(|i| binomial(n, i)).sum();
    let coeff = Complex64::new(1.0 / b.sqrt(), 0.0);
    let x_index: usize = x
        .iter()
        .enumerate()
        .filter(|&(_, &bit)| bit)
        .fold(0, |acc, (j, _)| acc | 1 << j);

    let mut state = StateVector {
        n,
        amps: (0..size)
            .map(|y| if y.count_ones() as usize <= t { coeff } else { Complex64::new(0.0, 0.0) })
            .collect(),
    };
    for (y, amp) in state.amps.iter_mut().enumerate() {
        if (y & x_index).count_ones() % 2 == 1 {
            *amp = -*amp;
        }
    }
    state.hadamard_all();

    let rounds = t.div_ceil(p).max(1);
    let mut log = ParallelQueryLog::new(p, n);
    for round in 0..rounds {
        // positions round*p+1 ..= min((round+1)p, t), padded with no-ops
        let mut batch: Vec<usize> =
            (round * p + 1..=((round + 1) * p).min(t)).collect();
        batch.resize(p, 0);
        log.record(batch)?;
    }
    Ok(InterrogationResult {
        n,
        p,
        t,
        b,
        simulated_success: state.probability_of(x_index),
        closed_form: b / size as f64,
        rounds,
        final_norm: state.norm_sq(),
        log,
    })
}

/// Interrogation with the cutoff chosen from the error budget.
pub fn interrogate(x: &[bool], p: usize, eps: f64) -> Result<InterrogationResult> {
    let t = interrogation_t(x.len(), eps)?;
    interrogate_with_t(x, p, t)
}

#[derive(Debug, Clone)]
pub struct RoundsRow {
    pub p: usize,
    pub t: usize,
    pub rounds: usize,
}

/// Rounds as a function of p at fixed (n, eps); checks the ceiling algebra
/// (rounds never exceed t, one round once p reaches t).
pub fn interrogation_rounds_table(n: usize, p_values: &[usize], eps: f64) -> Result<Vec<RoundsRow>> {
    let t = interrogation_t(n, eps)?;
    let mut rows = Vec::with_capacity(p_values.len());
    for &p in p_values {
        if p == 0 || p > n {
            return Err(Error::invalid("need 1 <= p <= n"));
        }
        let rounds = t.div_ceil(p).max(1);
        if rounds > t.max(1) || (p >= t && rounds != 1) {
            return Err(Error::property(format!("round accounting broke at p = {p}")));
        }
        rows.push(RoundsRow { p, t, rounds });
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct GroverResult {
    pub n: usize,
    pub p: usize,
    pub block_size: usize,
    pub t: usize,
    pub simulated_success: f64,
    pub closed_form: f64,
    /// t iterations plus the final parallel verification round
    pub rounds: usize,
    pub log: ParallelQueryLog,
    pub final_norm: f64,
    pub degenerate: bool,
}

/// Block-parallel Grover: the database splits into p blocks of n/p cells,
/// each copy searches its own block, one batch of p parallel queries drives
/// all copies through one iteration, and a final parallel round verifies the
/// p candidates. Success is owned by the copy holding the marked cell.
pub fn grover_parallel(
    n: usize,
    p: usize,
    marked: usize,
    rounds: Option<usize>,
) -> Result<GroverResult> {
    if p == 0 || n == 0 || !n.is_multiple_of(p) {
        return Err(Error::invalid("p must divide n"));
    }
    if marked >= n {
        return Err(Error::invalid("marked index out of range"));
    }
    let m = n / p;
    if m == 1 {
        // one cell per copy: a single parallel round reads the whole input
        let mut log = ParallelQueryLog::new(p, n);
        log.record((1..=n).collect())?;
        return Ok(GroverResult {
            n,
            p,
            block_size: 1,
            t: 0,
            simulated_success: 1.0,
            closed_form: 1.0,
            rounds: 1,
            log,
            final_norm: 1.0,
            degenerate: true,
        });
    }
    let t = rounds.unwrap_or_else(|| {
        ((std::f64::consts::FRAC_PI_4) * (m as f64).sqrt() - 0.5).round().max(0.0) as usize
    });
    let owner = marked / m;
    let offset = marked % m;

    // p independent block states; copies without the marked cell keep the
    // uniform state under oracle + diffusion
    let mut blocks: Vec<Vec<f64>> = vec![vec![1.0 / (m as f64).sqrt(); m]; p];
    let mut log = ParallelQueryLog::new(p, n);
    for _ in 0..t {
        for (bi, amps) in blocks.iter_mut().enumerate() {
            if bi == owner {
                amps[offset] = -amps[offset];
            }
            let mean = amps.iter().sum::<f64>() / m as f64;
            for a in amps.iter_mut() {
                *a = 2.0 * mean - *a;
            }
        }
        // one oracle call per copy, addressed at its block
        log.record((0..p).map(|bi| bi * m + 1).collect())?;
    }
    // classical parallel verification of the p measured candidates
    log.record((0..p).map(|bi| bi * m + 1).collect())?;

    let simulated_success = blocks[owner][offset].powi(2);
    let theta = (1.0 / m as f64).sqrt().asin();
    let closed_form = ((2 * t + 1) as f64 * theta).sin().powi(2);
    let final_norm = blocks.iter().map(|b| b.iter().map(|a| a * a).sum::<f64>()).sum::<f64>()
        / p as f64;
    Ok(GroverResult {
        n,
        p,
        block_size: m,
        t,
        simulated_success,
        closed_form,
        rounds: t + 1,
        log,
        final_norm,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_bits(n: usize, rng: &mut ChaCha8Rng) -> Vec<bool> {
        (0..n).map(|_| rng.gen_bool(0.5)).collect()
    }

    #[test]
    fn interrogation_n8_t6() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let x = random_bits(8, &mut rng);
            let r = interrogate_with_t(&x, 3, 6).unwrap();
            assert!((r.closed_form - 247.0 / 256.0).abs() < 1e-15);
            assert!((r.simulated_success - r.closed_form).abs() <= 1e-12, "{r:?}");
            assert_eq!(r.rounds, 2);
            assert!((r.final_norm - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn interrogation_closed_form_all_small_cutoffs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=12usize {
            for t in 0..=n {
                let x = random_bits(n, &mut rng);
                let r = interrogate_with_t(&x, 1, t).unwrap();
                assert!(
                    (r.simulated_success - r.closed_form).abs() <= 1e-12,
                    "n={n} t={t}: {} vs {}",
                    r.simulated_success,
                    r.closed_form
                );
            }
        }
        // spot-check the largest acceptance size
        let x16 = random_bits(16, &mut rng);
        for t in [0usize, 7, 13, 16] {
            let r = interrogate_with_t(&x16, 4, t).unwrap();
            assert!((r.simulated_success - r.closed_form).abs() <= 1e-12);
        }
    }

    #[test]
    fn full_cutoff_succeeds_exactly() {
        let x = vec![true, false, true, true, false, false];
        let r = interrogate_with_t(&x, 2, 6).unwrap();
        assert!((r.simulated_success - 1.0).abs() <= 1e-12);
        assert!((r.closed_form - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hoeffding_cutoff_meets_error_budget() {
        for n in [8usize, 12, 16, 20] {
            for eps in [0.2, 0.1, 0.05] {
                let t = interrogation_t(n, eps).unwrap();
                let x = vec![true; n];
                let r = interrogate_with_t(&x, 1, t).unwrap();
                assert!(
                    r.closed_form >= 1.0 - eps,
                    "n={n} eps={eps}: success {} with t={t}",
                    r.closed_form
                );
                assert!((r.simulated_success - r.closed_form).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn frozen_cutoff_example() {
        // n=16, eps=0.1: 8 + sqrt(16 ln 10 / 2) = 8 + 4.29... -> 13
        assert_eq!(interrogation_t(16, 0.1).unwrap(), 13);
        let rows = interrogation_rounds_table(16, &[1, 2, 3, 4, 13, 16], 0.1).unwrap();
        assert_eq!(rows[0].rounds, 13); // p = 1 pays the full cutoff
        assert_eq!(rows[4].rounds, 1); // p = t needs a single round
        assert_eq!(rows[5].rounds, 1);
        for w in rows.windows(2) {
            assert!(w[1].rounds <= w[0].rounds, "rounds must not grow with p");
        }
    }

    #[test]
    fn interrogation_batches_follow_positions() {
        let x = vec![false; 8];
        let r = interrogate_with_t(&x, 3, 6).unwrap();
        assert_eq!(r.log.rounds.len(), 2);
        assert_eq!(r.log.rounds[0], vec![1, 2, 3]);
        assert_eq!(r.log.rounds[1], vec![4, 5, 6]);
        assert!(r.log.max_batch() <= 3);
    }

    #[test]
    fn interrogation_validation() {
        assert!(interrogation_t(8, 0.0).is_err());
        assert!(interrogation_t(8, 1.0).is_err());
        assert!(interrogate(&[true; 25], 1, 0.1).is_err());
        assert!(interrogate_with_t(&[true; 4], 5, 2).is_err());
        assert!(interrogate_with_t(&[true; 4], 1, 5).is_err());
    }

    #[test]
    fn grover_blocks_of_16() {
        let r = grover_parallel(64, 4, 17, None).unwrap();
        assert_eq!(r.block_size, 16);
        assert_eq!(r.t, 3);
        assert!((r.closed_form - 0.96129).abs() < 1e-4);
        assert!((r.simulated_success - r.closed_form).abs() <= 1e-9);
        assert_eq!(r.rounds, 4);
        assert!((r.final_norm - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn grover_exact_at_block_four() {
        let r = grover_parallel(8, 2, 5, None).unwrap();
        assert_eq!(r.block_size, 4);
        assert_eq!(r.t, 1);
        assert!((r.simulated_success - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn grover_degenerate_blocks_of_one() {
        let r = grover_parallel(4, 4, 2, None).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.rounds, 1);
        assert_eq!(r.simulated_success, 1.0);
        assert_eq!(r.log.total_rounds(), 1);
        assert_eq!(r.log.max_batch(), 4);
    }

    #[test]
    fn grover_matches_closed_form_across_block_sizes() {
        for m in [4usize, 8, 16, 32] {
            for p in [1usize, 2, 4] {
                let n = m * p;
                let marked = n - 1;
                let r = grover_parallel(n, p, marked, None).unwrap();
                assert!(
                    (r.simulated_success - r.closed_form).abs() <= 1e-9,
                    "m={m} p={p}: {} vs {}",
                    r.simulated_success,
                    r.closed_form
                );
                let ceiling = (std::f64::consts::FRAC_PI_4 * (m as f64).sqrt()).ceil() as usize + 1;
                assert!(r.rounds <= ceiling, "m={m}: {} > {ceiling}", r.rounds);
                assert!(r.log.max_batch() <= p);
                assert_eq!(r.log.total_rounds(), r.rounds);
            }
        }
    }

    #[test]
    fn grover_explicit_round_override() {
        // overshooting past the optimum lowers the success probability
        let best = grover_parallel(32, 2, 3, None).unwrap();
        let over = grover_parallel(32, 2, 3, Some(best.t + 3)).unwrap();
        assert!(over.simulated_success < best.simulated_success);
        assert!((over.simulated_success - over.closed_form).abs() <= 1e-9);
    }

    #[test]
    fn grover_validation() {
        assert!(grover_parallel(10, 3, 0, None).is_err());
        assert!(grover_parallel(8, 2, 8, None).is_err());
    }

    #[test]
    fn query_log_validation() {
        let mut log = ParallelQueryLog::new(2, 8);
        assert!(log.record(vec![1, 0]).is_ok());
        assert!(log.record(vec![1, 2, 3]).is_err());
        assert!(log.record(vec![9, 1]).is_err());
        assert_eq!(log.total_rounds(), 1);
    }
}
