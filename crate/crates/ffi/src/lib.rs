//! C ABI for the workbench.
//!
//! Conventions: every fallible function returns a [`ParqqStatus`] and writes
//! its result through an out pointer. Handles (`ParqqBoolFn`, `ParqqDual`)
//! are opaque; free them with the matching `_free` function. On any
//! non-`Ok` status, [`parqq_last_error`] returns a message for the calling
//! thread, valid until the next failing call on that thread. All functions
//! catch panics at the boundary and report them as `Panic` rather than
//! unwinding into C.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use parqq::adversary::{adversary_ratio, AdversaryInstance};
use parqq::boolfn::{BooleanFunction, ComplexityReport, Orientation};
use parqq::certstruct::CertificateStructure;
use parqq::learngraph::{
    build_edge_set, ed_dual_certificate, ksum_dual_certificate, verify_dual_feasibility,
    DualSolution,
};
use parqq::qsim::{grover_parallel, interrogate};
use parqq::walks::{optimize_r, JohnsonWalk, WalkProblem};

/// Result of every fallible call in this ABI.
#[repr(C)]
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum ParqqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    ResourceLimit = 3,
    PropertyFailure = 4,
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let owned = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = owned);
}

fn status_of(e: &parqq::Error) -> ParqqStatus {
    match e {
        parqq::Error::ResourceLimit(_) => ParqqStatus::ResourceLimit,
        parqq::Error::PropertyFailure(_) => ParqqStatus::PropertyFailure,
        _ => ParqqStatus::InvalidParameter,
    }
}

/// Runs a fallible body with a panic shield; fills the thread-local error on
/// any failure.
fn guard(f: impl FnOnce() -> parqq::Result<()>) -> ParqqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ParqqStatus::Ok,
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            ParqqStatus::Panic
        }
    }
}

macro_rules! require_non_null {
    ($($ptr:expr),+) => {
        $(if $ptr.is_null() {
            set_error(concat!("null pointer: ", stringify!($ptr)));
            return ParqqStatus::NullPointer;
        })+
    };
}

/// Message describing the most recent failure on this thread. Never null;
/// empty before the first failure. The pointer stays valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn parqq_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn parqq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

// ---------------------------------------------------------------------------
// Boolean functions

/// Opaque handle to a Boolean function.
pub struct ParqqBoolFn {
    inner: BooleanFunction,
}

/// Classical measures and parallel query bounds of one function.
#[repr(C)]
pub struct ParqqComplexity {
    pub n: u32,
    pub p: u32,
    pub block_sensitivity: u32,
    pub certificate_complexity: u32,
    pub one_certificate_complexity: u32,
    pub dpar_upper: u32,
    /// true when the depth bound is achieved on the negated function
    pub dpar_negated: bool,
    /// parallel quantum query lower bound sqrt(bs / p)
    pub q_lower: f64,
}

/// Parses a function spec (`or:N`, `and:N`, `parity:N`, `random:N:SEED`,
/// `hex:N:DIGITS`) into a new handle owned by the caller.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn parqq_boolfn_parse(
    spec: *const c_char,
    out: *mut *mut ParqqBoolFn,
) -> ParqqStatus {
    require_non_null!(spec, out);
    guard(|| {
        let spec = CStr::from_ptr(spec)
            .to_str()
            .map_err(|_| parqq::Error::invalid("spec is not valid UTF-8"))?;
        let inner = BooleanFunction::from_name(spec)?;
        *out = Box::into_raw(Box::new(ParqqBoolFn { inner }));
        Ok(())
    })
}

/// Frees a handle returned by [`parqq_boolfn_parse`]. Null is a no-op.
///
/// # Safety
/// `f` must be a pointer previously returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn parqq_boolfn_free(f: *mut ParqqBoolFn) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of input bits.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn parqq_boolfn_arity(f: *const ParqqBoolFn, out: *mut u32) -> ParqqStatus {
    require_non_null!(f, out);
    guard(|| {
        *out = (*f).inner.arity() as u32;
        Ok(())
    })
}

/// Computes block sensitivity, certificate complexities, the p-parallel
/// decision-tree upper bound, and the quantum lower bound.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn parqq_boolfn_complexity(
    f: *const ParqqBoolFn,
    p: u32,
    out: *mut ParqqComplexity,
) -> ParqqStatus {
    require_non_null!(f, out);
    guard(|| {
        let rep = ComplexityReport::compute(&(*f).inner, p as usize)?;
        *out = ParqqComplexity {
            n: rep.n as u32,
            p: rep.p as u32,
            block_sensitivity: rep.bs as u32,
            certificate_complexity: rep.c as u32,
            one_certificate_complexity: rep.c1 as u32,
            dpar_upper: rep.dpar_upper as u32,
            dpar_negated: rep.dpar_orientation == Orientation::Negated,
            q_lower: rep.q_lower,
        };
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Dual certificates

/// Opaque handle to a dual certificate together with its certificate
/// structure, ready for feasibility checks.
pub struct ParqqDual {
    dual: DualSolution,
    structure: CertificateStructure,
}

/// Outcome of a full-edge-set feasibility check.
#[repr(C)]
pub struct ParqqDualReport {
    pub objective: f64,
    pub max_l: f64,
    pub edges_checked: u64,
    pub feasible: bool,
}

unsafe fn dual_out(
    out: *mut *mut ParqqDual,
    dual: parqq::Result<DualSolution>,
    structure: parqq::Result<CertificateStructure>,
) -> parqq::Result<()> {
    let handle = ParqqDual { dual: dual?, structure: structure? };
    *out = Box::into_raw(Box::new(handle));
    Ok(())
}

/// Builds the element-distinctness dual certificate for n positions at
/// parallelism p. The caller owns the handle.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn parqq_dual_ed(n: u32, p: u32, out: *mut *mut ParqqDual) -> ParqqStatus {
    require_non_null!(out);
    guard(|| {
        dual_out(
            out,
            ed_dual_certificate(n as usize, p as usize),
            CertificateStructure::ed(n as usize),
        )
    })
}

/// Builds the k-sum dual certificate. The caller owns the handle.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn parqq_dual_ksum(
    n: u32,
    k: u32,
    p: u32,
    out: *mut *mut ParqqDual,
) -> ParqqStatus {
    require_non_null!(out);
    guard(|| {
        dual_out(
            out,
            ksum_dual_certificate(n as usize, k as usize, p as usize),
            CertificateStructure::uniform(n as usize, k as usize),
        )
    })
}

/// Frees a handle returned by the dual constructors. Null is a no-op.
///
/// # Safety
/// `d` must be a pointer previously returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn parqq_dual_free(d: *mut ParqqDual) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Objective value of the certificate (the lower bound it certifies).
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn parqq_dual_objective(d: *const ParqqDual, out: *mut f64) -> ParqqStatus {
    require_non_null!(d, out);
    guard(|| {
        *out = (*d).dual.objective();
        Ok(())
    })
}

/// Checks the per-edge constraints over the full edge set.
///
/// # Safety
/// `d` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn parqq_dual_verify(
    d: *const ParqqDual,
    out: *mut ParqqDualReport,
) -> ParqqStatus {
    require_non_null!(d, out);
    guard(|| {
        let h = &*d;
        let edges = build_edge_set(h.dual.n, h.dual.p, h.dual.n)?;
        let rep = verify_dual_feasibility(&h.dual, &edges, &h.structure)?;
        *out = ParqqDualReport {
            objective: h.dual.objective(),
            max_l: rep.max_l,
            edges_checked: rep.edges_checked as u64,
            feasible: rep.feasible,
        };
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Walks, adversary, simulations

/// Optimized quantum walk cost model.
#[repr(C)]
pub struct ParqqWalkCost {
    pub r: u64,
    pub setup: f64,
    pub update: f64,
    pub check: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub total: f64,
    /// analytic minimizer n^(k/(k+1)) p^(1/(k+1))
    pub closed_form_r: f64,
}

/// Spectral gap of the Johnson graph walk J(n, r), optionally lazy.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn parqq_johnson_gap(
    n: u32,
    r: u32,
    lazy: bool,
    out: *mut f64,
) -> ParqqStatus {
    require_non_null!(out);
    guard(|| {
        *out = JohnsonWalk::new(n as usize, r as usize, lazy)?.gap();
        Ok(())
    })
}

/// Walk search cost for the k-subset certificate problem (k = 2 is element
/// distinctness), minimized over the vertex size r.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn parqq_walk_cost(
    k: u32,
    n: u32,
    p: u32,
    out: *mut ParqqWalkCost,
) -> ParqqStatus {
    require_non_null!(out);
    guard(|| {
        let problem =
            if k == 2 { WalkProblem::Ed } else { WalkProblem::Ksum { k: k as usize } };
        let opt = optimize_r(problem, n as usize, p as usize)?;
        *out = ParqqWalkCost {
            r: opt.r as u64,
            setup: opt.model.setup,
            update: opt.model.update,
            check: opt.model.check,
            epsilon: opt.model.epsilon,
            delta: opt.model.delta,
            total: opt.model.total,
            closed_form_r: opt.closed_form_r,
        };
        Ok(())
    })
}

/// p-parallel adversary ratio of the all-ones OR instance; equals
/// sqrt(n / p) whenever p divides n.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn parqq_or_adversary_ratio(n: u32, p: u32, out: *mut f64) -> ParqqStatus {
    require_non_null!(out);
    guard(|| {
        let inst = AdversaryInstance::or_instance(n as usize)?;
        *out = adversary_ratio(&inst, p as usize)?.ratio;
        Ok(())
    })
}

/// Result of the oracle-interrogation simulation.
#[repr(C)]
pub struct ParqqInterrogation {
    pub t: u32,
    pub rounds: u32,
    pub simulated_success: f64,
    pub closed_form: f64,
}

/// Simulates interrogation of the hidden n-bit string given by the low n
/// bits of `x_bits` (bit j is position j), with failure target eps.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn parqq_interrogate(
    x_bits: u64,
    n: u32,
    p: u32,
    eps: f64,
    out: *mut ParqqInterrogation,
) -> ParqqStatus {
    require_non_null!(out);
    guard(|| {
        if n == 0 || n > 24 {
            return Err(parqq::Error::invalid("need 1 <= n <= 24"));
        }
        let x: Vec<bool> = (0..n as usize).map(|j| (x_bits >> j) & 1 == 1).collect();
        let res = interrogate(&x, p as usize, eps)?;
        *out = ParqqInterrogation {
            t: res.t as u32,
            rounds: res.rounds as u32,
            simulated_success: res.simulated_success,
            closed_form: res.closed_form,
        };
        Ok(())
    })
}

/// Result of the block-parallel Grover simulation.
#[repr(C)]
pub struct ParqqGrover {
    pub block_size: u32,
    pub t: u32,
    pub rounds: u32,
    pub degenerate: bool,
    pub simulated_success: f64,
    pub closed_form: f64,
}

/// Simulates Grover search for `marked` over n items split into p blocks,
/// using the optimal iteration count for the block size.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn parqq_grover(
    n: u32,
    p: u32,
    marked: u32,
    out: *mut ParqqGrover,
) -> ParqqStatus {
    require_non_null!(out);
    guard(|| {
        let res = grover_parallel(n as usize, p as usize, marked as usize, None)?;
        *out = ParqqGrover {
            block_size: res.block_size as u32,
            t: res.t as u32,
            rounds: res.rounds as u32,
            degenerate: res.degenerate,
            simulated_success: res.simulated_success,
            closed_form: res.closed_form,
        };
        Ok(())
    })
}
