//! C interface. Objects are opaque handles created by the constructor calls
//! and released with the matching `tc_*_free`. Every call returns a
//! [`TcStatus`]; details of the last failure on the calling thread are
//! available from [`tc_last_error`] until the next successful call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tubecenter::center::{analyze, CenterAnalysis};
use tubecenter::fusion::{self, FusionCategoryData};
use tubecenter::group_double::{build_double, cross_check_vs_tube, GroupDoubleAlgebra, GroupSpec, HopfModularData};
use tubecenter::report::{Input, Report};
use tubecenter::{catalog, Error, Tolerance};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    SchemaError = 4,
    IoError = 5,
    /// Input data failed validation.
    ValidationFailed = 6,
    /// A numerical step of the pipeline failed.
    NumericalError = 7,
    NoMatching = 8,
    OutOfRange = 9,
    InvalidArgument = 10,
    Panic = 11,
}

/// A fusion category.
pub struct TcCategory {
    cat: FusionCategoryData,
}

/// The double of a category: simples and modular data.
pub struct TcDouble {
    an: CenterAnalysis,
    tolerance: f64,
    seed: u64,
}

/// `D(G)` for a finite group with its Hopf-side modular data.
pub struct TcGroupDouble {
    double: GroupDoubleAlgebra,
    data: HopfModularData,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).unwrap_or_default());
}

fn status_of(e: &Error) -> TcStatus {
    match e {
        Error::ParseError(_) => TcStatus::ParseError,
        Error::SchemaError(_) => TcStatus::SchemaError,
        Error::Io(_) => TcStatus::IoError,
        Error::NoMatching(_) => TcStatus::NoMatching,
        Error::ShapeMismatch(_) => TcStatus::InvalidArgument,
        _ => TcStatus::NumericalError,
    }
}

fn guard(f: impl FnOnce() -> Result<(), TcStatus>) -> TcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            TcStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            TcStatus::Panic
        }
    }
}

fn fail(e: Error) -> TcStatus {
    set_error(e.to_string());
    status_of(&e)
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, TcStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(TcStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("argument is not UTF-8");
        TcStatus::InvalidUtf8
    })
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, TcStatus> {
    p.as_ref().ok_or_else(|| {
        set_error("null handle");
        TcStatus::NullPointer
    })
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T, TcStatus> {
    p.as_mut().ok_or_else(|| {
        set_error("null output pointer");
        TcStatus::NullPointer
    })
}

fn tolerance(eps: f64) -> Result<Tolerance, TcStatus> {
    if eps.is_finite() && eps > 0.0 && eps < 1.0 {
        Ok(Tolerance::new(eps))
    } else {
        set_error(format!("tolerance {eps} is not in (0, 1)"));
        Err(TcStatus::InvalidArgument)
    }
}

fn index(i: usize, n: usize) -> Result<usize, TcStatus> {
    if i < n {
        Ok(i)
    } else {
        set_error(format!("index {i} out of range 0..{n}"));
        Err(TcStatus::OutOfRange)
    }
}

fn put_complex(z: tubecenter::C64, re: *mut f64, im: *mut f64) -> Result<(), TcStatus> {
    unsafe {
        *out_arg(re)? = z.re;
        *out_arg(im)? = z.im;
    }
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn tc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn tc_status_string(s: TcStatus) -> *const c_char {
    let msg: &'static [u8] = match s {
        TcStatus::Ok => b"ok\0",
        TcStatus::NullPointer => b"null pointer\0",
        TcStatus::InvalidUtf8 => b"invalid UTF-8\0",
        TcStatus::ParseError => b"parse error\0",
        TcStatus::SchemaError => b"schema error\0",
        TcStatus::IoError => b"i/o error\0",
        TcStatus::ValidationFailed => b"validation failed\0",
        TcStatus::NumericalError => b"numerical error\0",
        TcStatus::NoMatching => b"no matching\0",
        TcStatus::OutOfRange => b"index out of range\0",
        TcStatus::InvalidArgument => b"invalid argument\0",
        TcStatus::Panic => b"internal panic\0",
    };
    msg.as_ptr() as *const c_char
}

fn boxed<T>(v: T, out: *mut *mut T) -> Result<(), TcStatus> {
    unsafe { *out_arg(out)? = Box::into_raw(Box::new(v)) };
    Ok(())
}

/// Parses a category from its JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_category_from_json(json: *const c_char, out: *mut *mut TcCategory) -> TcStatus {
    guard(|| {
        let text = str_arg(json)?;
        let cat = fusion::parse_category(text).map_err(fail)?;
        boxed(TcCategory { cat }, out)
    })
}

/// Loads a category file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_category_load(path: *const c_char, out: *mut *mut TcCategory) -> TcStatus {
    guard(|| {
        let p = str_arg(path)?;
        let cat = fusion::load_category(p).map_err(fail)?;
        boxed(TcCategory { cat }, out)
    })
}

/// One of the bundled categories by file stem (`"fibonacci"`, `"vec_s3"`, ...).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_category_bundled(name: *const c_char, out: *mut *mut TcCategory) -> TcStatus {
    guard(|| {
        let n = str_arg(name)?;
        let cat = catalog::by_name(n).ok_or_else(|| {
            set_error(format!("no bundled category {n}"));
            TcStatus::InvalidArgument
        })?;
        boxed(TcCategory { cat }, out)
    })
}

/// # Safety
/// `cat` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_category_free(cat: *mut TcCategory) {
    if !cat.is_null() {
        drop(Box::from_raw(cat));
    }
}

/// # Safety
/// `cat` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_category_rank(cat: *const TcCategory, out: *mut usize) -> TcStatus {
    guard(|| {
        *out_arg(out)? = ref_arg(cat)?.cat.rank();
        Ok(())
    })
}

/// Runs the full validation; `passed` receives 1 or 0 and `pentagon` the
/// pentagon residual.
///
/// # Safety
/// `cat` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_category_validate(
    cat: *const TcCategory,
    eps: f64,
    passed: *mut i32,
    pentagon: *mut f64,
) -> TcStatus {
    guard(|| {
        let c = &ref_arg(cat)?.cat;
        let cert = fusion::validate(c, tolerance(eps)?);
        *out_arg(passed)? = cert.pass() as i32;
        *out_arg(pentagon)? = cert.get("pentagon").map(|c| c.residual).unwrap_or(f64::NAN);
        Ok(())
    })
}

/// Tube algebra, simples of the double and modular data. Fails with
/// `ValidationFailed` if the input does not validate.
///
/// # Safety
/// `cat` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_double_compute(cat: *const TcCategory, eps: f64, seed: u64, out: *mut *mut TcDouble) -> TcStatus {
    guard(|| {
        let c = &ref_arg(cat)?.cat;
        let tol = tolerance(eps)?;
        let cert = fusion::validate(c, tol);
        if let Some(f) = cert.first_failure() {
            set_error(format!("validation failed: {}", f.name));
            return Err(TcStatus::ValidationFailed);
        }
        let an = analyze(c, seed, tol).map_err(fail)?;
        boxed(
            TcDouble {
                an,
                tolerance: eps,
                seed,
            },
            out,
        )
    })
}

/// # Safety
/// `d` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_double_free(d: *mut TcDouble) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of simples.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_double_rank(d: *const TcDouble, out: *mut usize) -> TcStatus {
    guard(|| {
        *out_arg(out)? = ref_arg(d)?.an.simples.len();
        Ok(())
    })
}

/// 1 if every certificate of the analysis passes.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_double_certified(d: *const TcDouble, out: *mut i32) -> TcStatus {
    guard(|| {
        let cert = ref_arg(d)?.an.certificate();
        *out_arg(out)? = cert.pass() as i32;
        Ok(())
    })
}

/// Dimension of simple `x`.
///
/// # Safety
/// `d` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_double_dim(d: *const TcDouble, x: usize, re: *mut f64, im: *mut f64) -> TcStatus {
    guard(|| {
        let md = &ref_arg(d)?.an.modular;
        put_complex(md.dims[index(x, md.rank())?], re, im)
    })
}

/// Twist of simple `x`.
///
/// # Safety
/// `d` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_double_twist(d: *const TcDouble, x: usize, re: *mut f64, im: *mut f64) -> TcStatus {
    guard(|| {
        let md = &ref_arg(d)?.an.modular;
        put_complex(md.t[index(x, md.rank())?], re, im)
    })
}

/// Unnormalized `S(x, y)`, with `S(0, y) = d(y)`.
///
/// # Safety
/// `d` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_double_s(d: *const TcDouble, x: usize, y: usize, re: *mut f64, im: *mut f64) -> TcStatus {
    guard(|| {
        let md = &ref_arg(d)?.an.modular;
        let n = md.rank();
        put_complex(md.s[(index(x, n)?, index(y, n)?)], re, im)
    })
}

/// Multiplicity of input simple `i` in double simple `x`.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_double_multiplicity(d: *const TcDouble, x: usize, i: usize, out: *mut usize) -> TcStatus {
    guard(|| {
        let s = &ref_arg(d)?.an.simples;
        let m = &s[index(x, s.len())?].mult;
        *out_arg(out)? = m[index(i, m.len())?];
        Ok(())
    })
}

/// Gauss sums `Δ±` and the global dimension of the double.
///
/// # Safety
/// `d` must be a live handle; all outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_double_gauss(
    d: *const TcDouble,
    plus_re: *mut f64,
    plus_im: *mut f64,
    minus_re: *mut f64,
    minus_im: *mut f64,
    dim_re: *mut f64,
    dim_im: *mut f64,
) -> TcStatus {
    guard(|| {
        let md = &ref_arg(d)?.an.modular;
        put_complex(md.delta_plus, plus_re, plus_im)?;
        put_complex(md.delta_minus, minus_re, minus_im)?;
        put_complex(md.dim_double, dim_re, dim_im)
    })
}

/// JSON report of the analysis. Release the string with [`tc_string_free`].
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_double_report_json(d: *const TcDouble, out: *mut *mut c_char) -> TcStatus {
    guard(|| {
        let d = ref_arg(d)?;
        let cat = d.an.tube.cat();
        let input = Input {
            kind: "category".into(),
            name: cat.name.clone(),
            source: "ffi".into(),
            rank: cat.rank(),
        };
        let mut rep = Report::new("double", input, d.tolerance, Some(d.seed));
        rep.add_section("simples", d.an.simple_checks.clone());
        rep.add_section("modularity", d.an.modularity.clone());
        rep.add_section("gauss", d.an.gauss.clone());
        rep.add_section("count", d.an.count.certificate.clone());
        rep.add_section("induction", d.an.induction.clone());
        rep.add_center(&d.an);
        let s = CString::new(rep.to_json()).map_err(|_| TcStatus::Panic)?;
        *out_arg(out)? = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn group_double(g: GroupSpec, eps: f64, seed: u64, out: *mut *mut TcGroupDouble) -> Result<(), TcStatus> {
    let tol = tolerance(eps)?;
    let double = build_double(&g, tol).map_err(fail)?;
    let data = double.hopf_smatrix(seed, tol).map_err(fail)?;
    boxed(TcGroupDouble { double, data }, out)
}

/// `D(Z_n)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_group_double_cyclic(n: usize, eps: f64, seed: u64, out: *mut *mut TcGroupDouble) -> TcStatus {
    guard(|| {
        if n == 0 {
            set_error("cyclic group of order 0");
            return Err(TcStatus::InvalidArgument);
        }
        group_double(GroupSpec::cyclic(n), eps, seed, out)
    })
}

/// `D(S_n)` for `1 <= n <= 4`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_group_double_symmetric(n: usize, eps: f64, seed: u64, out: *mut *mut TcGroupDouble) -> TcStatus {
    guard(|| {
        if !(1..=4).contains(&n) {
            set_error(format!("symmetric group S_{n} not supported"));
            return Err(TcStatus::InvalidArgument);
        }
        group_double(GroupSpec::symmetric(n), eps, seed, out)
    })
}

/// `D(G)` from a group JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_group_double_from_json(json: *const c_char, eps: f64, seed: u64, out: *mut *mut TcGroupDouble) -> TcStatus {
    guard(|| {
        let g = GroupSpec::parse_json(str_arg(json)?).map_err(fail)?;
        group_double(g, eps, seed, out)
    })
}

/// # Safety
/// `g` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tc_group_double_free(g: *mut TcGroupDouble) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of irreps.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_group_double_rank(g: *const TcGroupDouble, out: *mut usize) -> TcStatus {
    guard(|| {
        *out_arg(out)? = ref_arg(g)?.data.dims.len();
        Ok(())
    })
}

/// Dimension and twist of irrep `x`.
///
/// # Safety
/// `g` must be a live handle; the outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_group_double_irrep(
    g: *const TcGroupDouble,
    x: usize,
    dim: *mut f64,
    twist_re: *mut f64,
    twist_im: *mut f64,
) -> TcStatus {
    guard(|| {
        let h = &ref_arg(g)?.data;
        let x = index(x, h.dims.len())?;
        *out_arg(dim)? = h.dims[x];
        put_complex(h.twists[x], twist_re, twist_im)
    })
}

/// `(Tr_x ⊗ Tr_y)(R_21 R_12)`.
///
/// # Safety
/// `g` must be a live handle; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_group_double_s(g: *const TcGroupDouble, x: usize, y: usize, re: *mut f64, im: *mut f64) -> TcStatus {
    guard(|| {
        let h = &ref_arg(g)?.data;
        let n = h.dims.len();
        put_complex(h.s[(index(x, n)?, index(y, n)?)], re, im)
    })
}

/// 1 if every Hopf-side certificate passes.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tc_group_double_certified(g: *const TcGroupDouble, out: *mut i32) -> TcStatus {
    guard(|| {
        *out_arg(out)? = ref_arg(g)?.data.certificate.pass() as i32;
        Ok(())
    })
}

/// Matches the double of a `Vec_G` category with `D(G)`. On success `perm`
/// (length = rank, may be null) receives the irrep matched to each simple.
/// Returns `NoMatching` if the data do not agree within `tol`.
///
/// # Safety
/// Handles must be live; `perm` must be null or hold `rank` entries.
#[no_mangle]
pub unsafe extern "C" fn tc_compare(d: *const TcDouble, g: *const TcGroupDouble, tol: f64, perm: *mut usize) -> TcStatus {
    guard(|| {
        let d = ref_arg(d)?;
        let g = ref_arg(g)?;
        if !(tol.is_finite() && tol > 0.0) {
            set_error("tolerance must be positive");
            return Err(TcStatus::InvalidArgument);
        }
        let (p, cert) = cross_check_vs_tube(&g.double, &g.data, &d.an, tol).map_err(fail)?;
        if !cert.pass() {
            set_error("cross-check certificate failed");
            return Err(TcStatus::NoMatching);
        }
        if !perm.is_null() {
            for (k, v) in p.iter().enumerate() {
                *perm.add(k) = *v;
            }
        }
        Ok(())
    })
}
