//! Adversary matrices on explicit input labels, p-parallel difference masks,
//! the spectral ratio bound, the block-string bijection, and the dense
//! stacked-projector construction that certifies the dual lower-bound chain
//! at desk scale.

use crate::certstruct::InducedFunction;
use crate::error::{Error, Result};
use crate::learngraph::DualSolution;
use crate::linalg::{hadamard, spectral_norm};
use crate::subsets::{k_subsets, mask_indices, subsets_up_to};
use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fs;
use std::io::Write as _;
use std::path::Path;

/// densest matrix accepted per side by the ratio computation
pub const DENSE_SIDE_LIMIT: usize = 4000;
/// dense bound on q^n for the stacked-projector construction
pub const PROJECTOR_DIM_LIMIT: usize = 1296;

pub fn encode_input(x: &[u32], q: u32) -> usize {
    x.iter().fold(0usize, |acc, &d| acc * q as usize + d as usize)
}

pub fn decode_input(mut i: usize, n: usize, q: u32) -> Vec<u32> {
    let mut x = vec![0u32; n];
    for j in (0..n).rev() {
        x[j] = (i % q as usize) as u32;
        i /= q as usize;
    }
    x
}

#[derive(Debug, Clone)]
pub struct AdversaryInstance {
    pub gamma: DMatrix<f64>,
    /// one input string per row; duplicated labels are allowed
    pub row_labels: Vec<Vec<u32>>,
    pub col_labels: Vec<Vec<u32>>,
    pub n: usize,
    pub q: u32,
}

impl AdversaryInstance {
    pub fn new(
        gamma: DMatrix<f64>,
        row_labels: Vec<Vec<u32>>,
        col_labels: Vec<Vec<u32>>,
        n: usize,
        q: u32,
    ) -> Result<Self> {
        if gamma.nrows() != row_labels.len() || gamma.ncols() != col_labels.len() {
            return Err(Error::invalid("matrix shape does not match label counts"));
        }
        if q < 2 {
            return Err(Error::invalid("alphabet must have at least two symbols"));
        }
        for lab in row_labels.iter().chain(&col_labels) {
            if lab.len() != n || lab.iter().any(|&d| d >= q) {
                return Err(Error::invalid("label is not a valid input string"));
            }
        }
        Ok(AdversaryInstance { gamma, row_labels, col_labels, n, q })
    }

    /// The OR adversary: the single 0-input against the n weight-1 inputs,
    /// all entries 1.
    pub fn or_instance(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("OR needs at least one variable"));
        }
        let cols: Vec<Vec<u32>> = (0..n)
            .map(|i| (0..n).map(|j| u32::from(i == j)).collect())
            .collect();
        Self::new(DMatrix::from_element(1, n, 1.0), vec![vec![0; n]], cols, n, 2)
    }
}

/// Delta_J over explicit labels: 1 at (x, y) iff some index of J separates
/// x from y. The empty J yields the all-zero matrix.
pub fn delta_mask(rows: &[Vec<u32>], cols: &[Vec<u32>], j: u32) -> DMatrix<f64> {
    let idx = mask_indices(j);
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| {
        f64::from(idx.iter().any(|&i| rows[r][i] != cols[c][i]))
    })
}

#[derive(Debug, Clone)]
pub struct RatioReport {
    pub p: usize,
    /// true when the maximization ranged over |J| = p only
    pub exact_size: bool,
    pub gamma_norm: f64,
    pub max_masked_norm: f64,
    pub worst_j: Option<u32>,
    pub ratio: f64,
    pub infinite: bool,
}

fn ratio_over(a: &AdversaryInstance, p: usize, exact_size: bool, js: &[u32]) -> Result<RatioReport> {
    if a.gamma.nrows() > DENSE_SIDE_LIMIT || a.gamma.ncols() > DENSE_SIDE_LIMIT {
        return Err(Error::limit("adversary matrix exceeds the dense norm bound"));
    }
    let gamma_norm = spectral_norm(&a.gamma);
    // tie-break on the smaller mask so the winner is reduction-order free
    let (max_masked_norm, worst_j) = js
        .par_iter()
        .map(|&j| (spectral_norm(&hadamard(&a.gamma, &delta_mask(&a.row_labels, &a.col_labels, j))), j))
        .reduce(
            || (f64::NEG_INFINITY, u32::MAX),
            |x, y| if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x },
        );
    let infinite = max_masked_norm <= 1e-15 * gamma_norm.max(1.0);
    Ok(RatioReport {
        p,
        exact_size,
        gamma_norm,
        max_masked_norm: max_masked_norm.max(0.0),
        worst_j: if infinite { None } else { Some(worst_j) },
        ratio: if infinite { f64::INFINITY } else { gamma_norm / max_masked_norm },
        infinite,
    })
}

/// |Gamma| / max over |J| = p of |Gamma o Delta_J|.
pub fn adversary_ratio(a: &AdversaryInstance, p: usize) -> Result<RatioReport> {
    if p == 0 || p > a.n {
        return Err(Error::invalid("need 1 <= p <= n"));
    }
    ratio_over(a, p, true, &k_subsets(a.n, p))
}

/// The <=p variant: maximization over all nonempty J with |J| <= p. Within a
/// factor 2 of the exact-size ratio.
pub fn adversary_ratio_up_to(a: &AdversaryInstance, p: usize) -> Result<RatioReport> {
    if p == 0 || p > a.n {
        return Err(Error::invalid("need 1 <= p <= n"));
    }
    let full = ((1u64 << a.n) - 1) as u32;
    ratio_over(a, p, false, &subsets_up_to(full, p))
}

/// Random-instance stress of the subset monotonicity fact: for J inside K,
/// |Gamma o Delta_J| never exceeds twice |Gamma o Delta_K|. Returns the
/// largest observed ratio; a violation is a property failure carrying the
/// reproducer seed.
pub fn check_fact1(trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = 0.0f64;
    for trial in 0..trials {
        let n = rng.gen_range(2..=5usize);
        let q = rng.gen_range(2..=3u32);
        let nr = rng.gen_range(2..=8usize);
        let nc = rng.gen_range(2..=8usize);
        let sample = |rng: &mut ChaCha8Rng| -> Vec<Vec<u32>> {
            (0..nr.max(nc)).map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect()).collect()
        };
        let rows: Vec<Vec<u32>> = sample(&mut rng).into_iter().take(nr).collect();
        let cols: Vec<Vec<u32>> = sample(&mut rng).into_iter().take(nc).collect();
        let gamma = DMatrix::from_fn(nr, nc, |_, _| rng.gen_range(-1.0..=1.0));
        let full = (1u32 << n) - 1;
        let k = rng.gen_range(1..=full);
        let j = k & rng.gen_range(0..=full); // random submask of k
        let norm_k = spectral_norm(&hadamard(&gamma, &delta_mask(&rows, &cols, k)));
        let norm_j = spectral_norm(&hadamard(&gamma, &delta_mask(&rows, &cols, j)));
        if norm_k <= 1e-12 {
            // support containment makes the masked product vanish too
            if norm_j > 1e-9 {
                return Err(Error::property(format!(
                    "mask support containment violated at trial {trial}, seed {seed}"
                )));
            }
            continue;
        }
        if norm_j > 2.0 * norm_k + 1e-9 {
            return Err(Error::property(format!(
                "factor-2 mask bound violated at trial {trial}, seed {seed}: {norm_j} > 2*{norm_k}"
            )));
        }
        max_ratio = max_ratio.max(norm_j / norm_k);
    }
    Ok(max_ratio)
}

/// One coordinate of the block string: the tuple x_J, valid only for |J| <= p.
pub fn block_bijection_query(x: &[u32], j: u32, p: usize) -> Result<Vec<u32>> {
    let idx = mask_indices(j);
    if idx.len() > p {
        return Err(Error::invalid("query set larger than the parallelism budget"));
    }
    if idx.iter().any(|&i| i >= x.len()) {
        return Err(Error::invalid("query set leaves the input range"));
    }
    Ok(idx.into_iter().map(|i| x[i]).collect())
}

/// The full block string X of x: one coordinate per nonempty J with |J| <= p.
/// One query to X is one p-parallel query to x by construction.
pub fn block_string(x: &[u32], p: usize) -> Result<Vec<(u32, Vec<u32>)>> {
    if p == 0 || p > x.len() {
        return Err(Error::invalid("need 1 <= p <= n"));
    }
    let full = ((1u64 << x.len()) - 1) as u32;
    subsets_up_to(full, p)
        .into_iter()
        .map(|j| Ok((j, block_bijection_query(x, j, p)?)))
        .collect()
}

/// Inverts the bijection through the singleton coordinates.
pub fn input_from_block_string(blocks: &[(u32, Vec<u32>)], n: usize) -> Result<Vec<u32>> {
    let mut x = vec![None; n];
    for (j, tuple) in blocks {
        if j.count_ones() == 1 {
            let i = j.trailing_zeros() as usize;
            if i >= n || tuple.len() != 1 {
                return Err(Error::invalid("malformed block string"));
            }
            x[i] = Some(tuple[0]);
        }
    }
    x.into_iter()
        .collect::<Option<Vec<u32>>>()
        .ok_or_else(|| Error::invalid("block string misses a singleton coordinate"))
}

/// E_S as a dense q^n x q^n matrix: tensor product with the uniform projector
/// on coordinates outside S and its complement inside. Index convention is
/// big-endian, i = sum_j x_j q^(n-1-j).
#[derive(Debug, Clone)]
pub struct ProjectorFamily {
    pub q: u32,
    pub n: usize,
}

impl ProjectorFamily {
    pub fn new(q: u32, n: usize) -> Result<Self> {
        if q < 2 || n == 0 {
            return Err(Error::invalid("need q >= 2 and n >= 1"));
        }
        let dim = (q as usize).checked_pow(n as u32).unwrap_or(usize::MAX);
        if dim > PROJECTOR_DIM_LIMIT {
            return Err(Error::limit("q^n exceeds the dense projector bound"));
        }
        Ok(ProjectorFamily { q, n })
    }

    pub fn dim(&self) -> usize {
        (self.q as usize).pow(self.n as u32)
    }

    pub fn e_s(&self, s: u32) -> DMatrix<f64> {
        let q = self.q as usize;
        let inv_q = 1.0 / q as f64;
        let dim = self.dim();
        let n = self.n;
        DMatrix::from_fn(dim, dim, |r, c| {
            let mut v = 1.0;
            let (mut rr, mut cc) = (r, c);
            for j in (0..n).rev() {
                let (a, b) = (rr % q, cc % q);
                rr /= q;
                cc /= q;
                v *= if s >> j & 1 == 1 {
                    f64::from(a == b) - inv_q
                } else {
                    inv_q
                };
            }
            v
        })
    }
}

/// The stacked matrix over the blocks of a dual solution, its restriction to
/// certified rows and 0-input columns, and the substitution map used to bound
/// masked norms.
pub struct GammaTilde {
    pub alpha: DualSolution,
    pub func: InducedFunction,
    pub family: ProjectorFamily,
    /// G_M per block, in structure block order
    pub blocks: Vec<DMatrix<f64>>,
    /// vertical stack of the blocks
    pub tilde: DMatrix<f64>,
    /// restricted row labels (block index, input index), block-major
    pub row_labels: Vec<(usize, usize)>,
    /// column indices with f(y) = 0
    pub col_indices: Vec<usize>,
}

pub fn build_gamma_tilde(alpha: &DualSolution, func: &InducedFunction) -> Result<GammaTilde> {
    let n = func.structure.n;
    if alpha.n != n {
        return Err(Error::invalid("dual and function arities disagree"));
    }
    let family = ProjectorFamily::new(func.q, n)?;
    let dim = family.dim();
    let nb = func.structure.blocks.len();

    let all_s: Vec<u32> = (0..1u32 << n).collect();
    let e_mats: Vec<DMatrix<f64>> = all_s.par_iter().map(|&s| family.e_s(s)).collect();
    let blocks: Vec<DMatrix<f64>> = (0..nb)
        .into_par_iter()
        .map(|bi| {
            let m = func.structure.blocks[bi];
            let mut g = DMatrix::<f64>::zeros(dim, dim);
            for (si, &s) in all_s.iter().enumerate() {
                let a = alpha.alpha_at(s, m, bi);
                if a != 0.0 {
                    g += &e_mats[si] * a;
                }
            }
            g
        })
        .collect();

    let mut tilde = DMatrix::<f64>::zeros(nb * dim, dim);
    for (bi, g) in blocks.iter().enumerate() {
        tilde.view_mut((bi * dim, 0), (dim, dim)).copy_from(g);
    }

    let mut row_labels = Vec::new();
    let mut col_indices = Vec::new();
    for i in 0..dim {
        let x = decode_input(i, n, func.q);
        for bi in 0..nb {
            if func.certifies(bi, &x) {
                row_labels.push((bi, i));
            }
        }
        if !func.evaluate(&x)?.0 {
            col_indices.push(i);
        }
    }
    Ok(GammaTilde { alpha: alpha.clone(), func: func.clone(), family, blocks, tilde, row_labels, col_indices })
}

impl GammaTilde {
    /// Plain submatrix of the stack: rows (x, M) with M certifying x, columns
    /// with f(y) = 0. A genuine submatrix, so masked norms never exceed the
    /// stacked ones.
    pub fn restricted(&self) -> DMatrix<f64> {
        let dim = self.family.dim();
        DMatrix::from_fn(self.row_labels.len(), self.col_indices.len(), |r, c| {
            let (bi, xi) = self.row_labels[r];
            self.tilde[(bi * dim + xi, self.col_indices[c])]
        })
    }

    /// The sqrt(q)-rescaled restriction. The certified rows of each block
    /// carry a 1/q fraction of its mass, so this scaling restores the norm
    /// floor sqrt(sum alpha_empty^2 / 2) that the lower-bound chain quotes.
    pub fn restricted_mass_preserving(&self) -> DMatrix<f64> {
        self.restricted() * (self.func.q as f64).sqrt()
    }

    fn decoded_inputs(&self) -> Vec<Vec<u32>> {
        let n = self.func.structure.n;
        (0..self.family.dim()).map(|i| decode_input(i, n, self.func.q)).collect()
    }

    /// Delta over the full stack: the mask at ((M, x), y) depends only on x.
    pub fn delta_tilde(&self, j: u32) -> DMatrix<f64> {
        let dim = self.family.dim();
        let idx = mask_indices(j);
        let inputs = self.decoded_inputs();
        DMatrix::from_fn(self.tilde.nrows(), dim, |r, c| {
            let (x, y) = (&inputs[r % dim], &inputs[c]);
            f64::from(idx.iter().any(|&i| x[i] != y[i]))
        })
    }

    /// Delta over the restricted labels.
    pub fn delta_restricted(&self, j: u32) -> DMatrix<f64> {
        let idx = mask_indices(j);
        let inputs = self.decoded_inputs();
        DMatrix::from_fn(self.row_labels.len(), self.col_indices.len(), |r, c| {
            let (x, y) = (&inputs[self.row_labels[r].1], &inputs[self.col_indices[c]]);
            f64::from(idx.iter().any(|&i| x[i] != y[i]))
        })
    }

    /// beta_S(M) = alpha_S(M) - alpha_{S u J}(M).
    pub fn beta(&self, s: u32, block_idx: usize, j: u32) -> f64 {
        let m = self.func.structure.blocks[block_idx];
        self.alpha.alpha_at(s, m, block_idx) - self.alpha.alpha_at(s | j, m, block_idx)
    }

    /// The substitution map applied literally: E_S stays put when J is not
    /// inside S, otherwise it becomes minus the sum of E_{S'} over proper
    /// subsets S' of S containing S minus J.
    pub fn phi_j(&self, j: u32) -> DMatrix<f64> {
        let n = self.func.structure.n;
        let dim = self.family.dim();
        let nb = self.blocks.len();
        let e_mats: Vec<DMatrix<f64>> = (0..1u32 << n).map(|s| self.family.e_s(s)).collect();
        let mut out = DMatrix::<f64>::zeros(nb * dim, dim);
        for bi in 0..nb {
            let m = self.func.structure.blocks[bi];
            let mut coeff = vec![0.0f64; 1 << n];
            for s in 0..1u32 << n {
                let a = self.alpha.alpha_at(s, m, bi);
                if a == 0.0 {
                    continue;
                }
                if j & !s != 0 {
                    coeff[s as usize] += a;
                } else if j != 0 {
                    // S' = (S \ J) u T over proper submasks T of J
                    let base = s & !j;
                    let mut t = (j - 1) & j; // largest proper submask
                    loop {
                        coeff[(base | t) as usize] -= a;
                        if t == 0 {
                            break;
                        }
                        t = (t - 1) & j;
                    }
                }
                // j = 0 substitutes the empty sum, dropping the block
            }
            let mut g = DMatrix::<f64>::zeros(dim, dim);
            for (s, &c) in coeff.iter().enumerate() {
                if c != 0.0 {
                    g += &e_mats[s] * c;
                }
            }
            out.view_mut((bi * dim, 0), (dim, dim)).copy_from(&g);
        }
        out
    }

    /// Same map through the closed form: G_M goes to sum_S beta_S(M) E_S.
    pub fn phi_j_beta_form(&self, j: u32) -> DMatrix<f64> {
        let n = self.func.structure.n;
        let dim = self.family.dim();
        let nb = self.blocks.len();
        let e_mats: Vec<DMatrix<f64>> = (0..1u32 << n).map(|s| self.family.e_s(s)).collect();
        let mut out = DMatrix::<f64>::zeros(nb * dim, dim);
        for bi in 0..nb {
            let mut g = DMatrix::<f64>::zeros(dim, dim);
            for s in 0..1u32 << n {
                let b = self.beta(s, bi, j);
                if b != 0.0 {
                    g += &e_mats[s as usize] * b;
                }
            }
            out.view_mut((bi * dim, 0), (dim, dim)).copy_from(&g);
        }
        out
    }

    /// max over S of sqrt(sum over blocks of beta_S(M)^2); equals the norm of
    /// the substituted stack because the projectors are orthogonal.
    pub fn phi_j_closed_norm(&self, j: u32) -> f64 {
        let n = self.func.structure.n;
        (0..1u32 << n)
            .map(|s| {
                (0..self.blocks.len()).map(|bi| self.beta(s, bi, j).powi(2)).sum::<f64>()
            })
            .fold(0.0f64, f64::max)
            .sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct PhiReport {
    pub j: u32,
    pub explicit_norm: f64,
    pub closed_norm: f64,
    /// largest entrywise deviation between the masked stack and the masked
    /// substituted stack
    pub masked_equality_max_dev: f64,
    /// masked norm of the plain restricted submatrix
    pub masked_gamma_norm: f64,
    pub chain_ok: bool,
}

/// Runs the three checks behind the masked-norm bound for one J: masked
/// equality of the stack and its substitution, agreement of the explicit and
/// closed-form norms, and the factor-2 chain on the restricted submatrix.
pub fn phi_j_report(gt: &GammaTilde, j: u32) -> Result<PhiReport> {
    let phi = gt.phi_j(j);
    let delta = gt.delta_tilde(j);
    let masked_stack = hadamard(&gt.tilde, &delta);
    let masked_phi = hadamard(&phi, &delta);
    let masked_equality_max_dev = (&masked_stack - &masked_phi).abs().max();
    let explicit_norm = spectral_norm(&phi);
    let closed_norm = gt.phi_j_closed_norm(j);
    let masked_gamma_norm =
        spectral_norm(&hadamard(&gt.restricted(), &gt.delta_restricted(j)));
    let chain_ok = masked_equality_max_dev <= 1e-12
        && (explicit_norm - closed_norm).abs() <= 1e-6
        && masked_gamma_norm <= 2.0 * explicit_norm + 1e-9;
    let report = PhiReport {
        j,
        explicit_norm,
        closed_norm,
        masked_equality_max_dev,
        masked_gamma_norm,
        chain_ok,
    };
    if !chain_ok {
        return Err(Error::property(format!("masked-norm chain failed: {report:?}")));
    }
    Ok(report)
}

/// Packages the restricted submatrix as an adversary instance with duplicated
/// row labels, ready for the ratio computation.
impl GammaTilde {
    pub fn gamma_instance(&self, mass_preserving: bool) -> Result<AdversaryInstance> {
        let n = self.func.structure.n;
        let q = self.func.q;
        let gamma =
            if mass_preserving { self.restricted_mass_preserving() } else { self.restricted() };
        let rows = self.row_labels.iter().map(|&(_, xi)| decode_input(xi, n, q)).collect();
        let cols = self.col_indices.iter().map(|&yi| decode_input(yi, n, q)).collect();
        AdversaryInstance::new(gamma, rows, cols, n, q)
    }
}

/// Dense binary export: 16-byte header (magic "PQQM", u32 rows, u32 cols,
/// u32 reserved zero, all little-endian), then row-major 64-bit floats.
pub fn write_matrix_binary(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut buf = Vec::with_capacity(16 + 8 * m.len());
    buf.extend_from_slice(b"PQQM");
    buf.extend_from_slice(&(m.nrows() as u32).to_le_bytes());
    buf.extend_from_slice(&(m.ncols() as u32).to_le_bytes());
    buf.extend_from_slice(&0u32.to_le_bytes());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            buf.extend_from_slice(&m[(r, c)].to_le_bytes());
        }
    }
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_matrix_binary(path: &Path) -> Result<DMatrix<f64>> {
    let data = fs::read(path)?;
    if data.len() < 16 || &data[0..4] != b"PQQM" {
        return Err(Error::invalid("not a matrix file: bad magic"));
    }
    let rows = u32::from_le_bytes(data[4..8].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(data[8..12].try_into().unwrap()) as usize;
    if data.len() != 16 + 8 * rows * cols {
        return Err(Error::invalid("matrix file length does not match header"));
    }
    let mut m = DMatrix::<f64>::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let off = 16 + 8 * (r * cols + c);
            m[(r, c)] = f64::from_le_bytes(data[off..off + 8].try_into().unwrap());
        }
    }
    Ok(m)
}

pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut out = Vec::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if c > 0 {
                out.push(b',');
            }
            write!(out, "{}", m[(r, c)]).expect("vec write");
        }
        out.push(b'\n');
    }
    fs::write(path, out)?;
    Ok(())
}
