//! C ABI over chiral-chain. Objects live behind opaque handles; every fallible call returns a
//! `CcStatus` and leaves a message for `cc_last_error`.

use chiral_chain::bae::{energy_from_roots, momentum_from_roots, solve_bae, RootSet};
use chiral_chain::lattice::ModelParams;
use chiral_chain::spectrum::{
    eigenvalue_functions, joint_eigenbasis, EigenvalueFunction, ExactSpectrum,
};
use chiral_chain::thermo::{excitation, ground_energy_density, ExcitationKind, ThermoParams};
use chiral_chain::verify::{run_suite, VerifyOptions};
use chiral_chain::{Error, ErrorKind, C64};
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CcStatus {
    Ok = 0,
    Domain = 1,
    Convergence = 2,
    Io = 3,
    Verification = 4,
    NullPointer = 5,
    BufferTooSmall = 6,
    OutOfRange = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CcComplex {
    pub re: f64,
    pub im: f64,
}

impl From<CcComplex> for C64 {
    fn from(c: CcComplex) -> C64 {
        C64::new(c.re, c.im)
    }
}

impl From<C64> for CcComplex {
    fn from(z: C64) -> CcComplex {
        CcComplex { re: z.re, im: z.im }
    }
}

pub struct CcModel {
    params: ModelParams,
}

pub struct CcSpectrum {
    spec: ExactSpectrum,
    functions: OnceLock<std::result::Result<Vec<EigenvalueFunction>, String>>,
}

pub struct CcThermo {
    params: ThermoParams,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CcStatus {
    match e.kind() {
        ErrorKind::Domain => CcStatus::Domain,
        ErrorKind::Convergence => CcStatus::Convergence,
        ErrorKind::Io => CcStatus::Io,
        ErrorKind::Verification => CcStatus::Verification,
    }
}

fn fail(status: CcStatus, msg: impl Into<String>) -> CcStatus {
    set_error(msg.into());
    status
}

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> std::result::Result<(), CcStatus>) -> CcStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CcStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(CcStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: chiral_chain::Result<T>) -> std::result::Result<T, CcStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> std::result::Result<&'a T, CcStatus> {
    p.as_ref()
        .ok_or_else(|| fail(CcStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> std::result::Result<(), CcStatus> {
    if out.is_null() {
        return Err(fail(CcStatus::NullPointer, format!("{what} is null")));
    }
    out.write(value);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated, NUL-terminated) and
/// returns the full length including the terminator; 0 when there is no message.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes_with_nul();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len);
                std::ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
                *buf.add(n - 1) = 0;
            }
            bytes.len()
        }
    })
}

/// Creates a chain of 2 * `half_size` sites.
///
/// # Safety
/// `out` must be a valid pointer; the handle is released with `cc_model_free`.
#[no_mangle]
pub unsafe extern "C" fn cc_model_new(
    half_size: usize,
    a: CcComplex,
    eta: CcComplex,
    out: *mut *mut CcModel,
) -> CcStatus {
    guard(|| {
        let params = lift(ModelParams::new(half_size, a.into(), eta.into()))?;
        put(out, Box::into_raw(Box::new(CcModel { params })), "out")
    })
}

/// # Safety
/// `m` must be null or a handle from `cc_model_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cc_model_free(m: *mut CcModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of sites, 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live model handle.
#[no_mangle]
pub unsafe extern "C" fn cc_model_sites(m: *const CcModel) -> usize {
    m.as_ref().map_or(0, |m| m.params.sites())
}

/// Runs the identity suite. `failed` receives the number of failing checks; the status is
/// `CC_STATUS_VERIFICATION` when it is nonzero.
///
/// # Safety
/// `m` must be a live model handle and `failed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_model_verify(
    m: *const CcModel,
    seed: u64,
    failed: *mut usize,
) -> CcStatus {
    guard(|| {
        let m = get(m, "model")?;
        let opts = VerifyOptions {
            seed,
            ..VerifyOptions::default()
        };
        let report = lift(run_suite(&m.params, &opts))?;
        let bad = report.failures();
        put(failed, bad.len(), "failed")?;
        if let Some(c) = bad.first() {
            return Err(fail(
                CcStatus::Verification,
                format!(
                    "{} residual {:.3e} (tolerance {:.0e})",
                    c.name, c.residual, c.tolerance
                ),
            ));
        }
        Ok(())
    })
}

/// Diagonalizes the model.
///
/// # Safety
/// `m` must be a live model handle and `out` a valid pointer; release with `cc_spectrum_free`.
#[no_mangle]
pub unsafe extern "C" fn cc_spectrum_new(
    m: *const CcModel,
    seed: u64,
    out: *mut *mut CcSpectrum,
) -> CcStatus {
    guard(|| {
        let m = get(m, "model")?;
        let spec = lift(joint_eigenbasis(&m.params, seed))?;
        let h = CcSpectrum {
            spec,
            functions: OnceLock::new(),
        };
        put(out, Box::into_raw(Box::new(h)), "out")
    })
}

/// # Safety
/// `s` must be null or a handle from `cc_spectrum_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cc_spectrum_free(s: *mut CcSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of states, 0 for a null handle.
///
/// # Safety
/// `s` must be null or a live spectrum handle.
#[no_mangle]
pub unsafe extern "C" fn cc_spectrum_state_count(s: *const CcSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.spec.state_count())
}

/// Energy of every state, indexed by state.
///
/// # Safety
/// `s` must be a live spectrum handle and `out` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn cc_spectrum_energies(
    s: *const CcSpectrum,
    out: *mut f64,
    len: usize,
) -> CcStatus {
    guard(|| {
        let s = get(s, "spectrum")?;
        let n = s.spec.state_count();
        if out.is_null() {
            return Err(fail(CcStatus::NullPointer, "out is null"));
        }
        if len < n {
            return Err(fail(
                CcStatus::BufferTooSmall,
                format!("need {n} entries, got {len}"),
            ));
        }
        for k in 0..n {
            *out.add(k) = s.spec.energy_of_state(k);
        }
        Ok(())
    })
}

fn function_of(s: &CcSpectrum, state: usize) -> std::result::Result<&EigenvalueFunction, CcStatus> {
    if state >= s.spec.state_count() {
        return Err(fail(
            CcStatus::OutOfRange,
            format!(
                "state {state} out of range (count {})",
                s.spec.state_count()
            ),
        ));
    }
    let fs = s
        .functions
        .get_or_init(|| eigenvalue_functions(&s.spec).map_err(|e| e.to_string()));
    match fs {
        Ok(v) => Ok(&v[state]),
        Err(msg) => Err(fail(CcStatus::Convergence, msg.clone())),
    }
}

/// Zero roots of one state's transfer eigenvalue: `z` receives sites - 1 values, `w` sites
/// values, and `lambda0_sq` the constant of the quadratic factor.
///
/// # Safety
/// `s` must be a live spectrum handle; `z` and `w` must hold `z_len` and `w_len` entries.
#[no_mangle]
pub unsafe extern "C" fn cc_spectrum_roots(
    s: *const CcSpectrum,
    state: usize,
    z: *mut CcComplex,
    z_len: usize,
    w: *mut CcComplex,
    w_len: usize,
    lambda0_sq: *mut CcComplex,
) -> CcStatus {
    guard(|| {
        let s = get(s, "spectrum")?;
        let f = function_of(s, state)?;
        if z.is_null() || w.is_null() {
            return Err(fail(CcStatus::NullPointer, "root buffer is null"));
        }
        if z_len < f.z.len() || w_len < f.w.len() {
            return Err(fail(
                CcStatus::BufferTooSmall,
                format!("need {} z and {} w entries", f.z.len(), f.w.len()),
            ));
        }
        for (k, &v) in f.z.iter().enumerate() {
            *z.add(k) = v.into();
        }
        for (k, &v) in f.w.iter().enumerate() {
            *w.add(k) = v.into();
        }
        put(lambda0_sq, f.lambda0_sq.into(), "lambda0_sq")
    })
}

/// Refines the state's roots against the Bethe equations and reports the energy, momentum and
/// final residual computed from the solution.
///
/// # Safety
/// `s` must be a live spectrum handle and the outputs valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cc_spectrum_solve_bae(
    s: *const CcSpectrum,
    state: usize,
    energy: *mut f64,
    momentum: *mut f64,
    residual: *mut f64,
) -> CcStatus {
    guard(|| {
        let s = get(s, "spectrum")?;
        let p = &s.spec.params;
        let f = function_of(s, state)?;
        let seed = lift(RootSet::from_eigenvalue_function(f, p))?;
        let r = lift(solve_bae(&seed, p))?;
        put(energy, lift(energy_from_roots(&r.z, p))?, "energy")?;
        put(momentum, lift(momentum_from_roots(&r.z, p))?, "momentum")?;
        put(residual, r.residual_norm, "residual")
    })
}

/// Thermodynamic limit at real `a` and anisotropy `gamma`; `tol` <= 0 selects the default.
///
/// # Safety
/// `out` must be a valid pointer; release with `cc_thermo_free`.
#[no_mangle]
pub unsafe extern "C" fn cc_thermo_new(
    a: f64,
    gamma: f64,
    tol: f64,
    out: *mut *mut CcThermo,
) -> CcStatus {
    guard(|| {
        let params = if tol > 0.0 {
            lift(ThermoParams::with_tol(a, gamma, tol))?
        } else {
            lift(ThermoParams::new(a, gamma))?
        };
        put(out, Box::into_raw(Box::new(CcThermo { params })), "out")
    })
}

/// # Safety
/// `t` must be null or a handle from `cc_thermo_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cc_thermo_free(t: *mut CcThermo) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Ground-state energy per site.
///
/// # Safety
/// `t` must be a live thermo handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cc_thermo_ground_energy(t: *const CcThermo, out: *mut f64) -> CcStatus {
    guard(|| {
        let t = get(t, "thermo")?;
        put(out, lift(ground_energy_density(&t.params))?, "out")
    })
}

/// One point of an excitation branch: `kind` is 1, 2 or 3, `n` the string length for kind 3.
///
/// # Safety
/// `t` must be a live thermo handle and the outputs valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cc_thermo_excitation(
    t: *const CcThermo,
    kind: u32,
    n: usize,
    lambda: f64,
    delta_e: *mut f64,
    k: *mut f64,
) -> CcStatus {
    guard(|| {
        let t = get(t, "thermo")?;
        let kind = match kind {
            1 => ExcitationKind::I,
            2 => ExcitationKind::II,
            3 => ExcitationKind::III { n },
            other => {
                return Err(fail(
                    CcStatus::Domain,
                    format!("unknown excitation type {other}"),
                ))
            }
        };
        let x = lift(excitation(kind, lambda, &t.params))?;
        put(delta_e, x.delta_e, "delta_e")?;
        put(k, x.k, "k")
    })
}
