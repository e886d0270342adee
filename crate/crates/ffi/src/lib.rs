//! C interface to `bs_tiler`: opaque handles, status codes and
//! library-allocated strings released with [`bs_string_free`].

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bs_tiler::alphabet::Pattern;
use bs_tiler::checker::{check_pattern, harvest_tables, Tables};
use bs_tiler::codec::encode;
use bs_tiler::group::{normalize, parse_word, rectangle};
use bs_tiler::render::{render_tiling_svg, RenderSpec};
use bs_tiler::robinson::structure_check;
use bs_tiler::substitution::{expanding_eigen, normalize_unique_size, EigenData, Substitution};
use bs_tiler::tiling::{grow_window, ChoicePolicy, TilingWindow};
use bs_tiler::Error;

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BsStatus {
    /// Success.
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// A string argument was not UTF-8.
    InvalidUtf8 = 2,
    /// A word, element or JSON document could not be parsed.
    Parse = 3,
    /// An argument was rejected.
    InvalidInput = 4,
    /// The computation failed.
    Failed = 5,
    /// A panic was caught at the boundary.
    Panic = 6,
}

impl From<&Error> for BsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse(_) | Error::Json(_) => BsStatus::Parse,
            Error::Input(_) | Error::UnknownLetter(_) | Error::RuleIndex { .. } | Error::Substitution(_) | Error::BaseMismatch(..) => {
                BsStatus::InvalidInput
            }
            _ => BsStatus::Failed,
        }
    }
}

/// A normalized substitution with its eigendata.
pub struct BsSubstitution {
    sigma: Substitution,
    eigen: EigenData,
}

/// Local-rule tables harvested for a substitution.
pub struct BsTables(Tables);

/// A finite patch of a tiling with its generator.
pub struct BsWindow(TilingWindow);

/// A pattern on a finite subset of the group.
pub struct BsPattern(Pattern);

fn guard(f: impl FnOnce() -> BsStatus) -> BsStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(BsStatus::Panic)
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, BsStatus> {
    if s.is_null() {
        return Err(BsStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| BsStatus::InvalidUtf8)
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> BsStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            BsStatus::Ok
        }
        Err(_) => BsStatus::Failed,
    }
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> BsStatus {
    *out = Box::into_raw(Box::new(value));
    BsStatus::Ok
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return BsStatus::from(&e),
        }
    };
}

macro_rules! arg {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn bs_status_message(status: BsStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        BsStatus::Ok => b"ok\0",
        BsStatus::NullPointer => b"null pointer\0",
        BsStatus::InvalidUtf8 => b"invalid UTF-8\0",
        BsStatus::Parse => b"parse error\0",
        BsStatus::InvalidInput => b"invalid input\0",
        BsStatus::Failed => b"computation failed\0",
        BsStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` is null or a string from this library not yet released.
#[no_mangle]
pub unsafe extern "C" fn bs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Normal form of a word over `a, A, t, T` in base `n`, as `t^i a^j t^-k`.
///
/// # Safety
/// `word` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bs_normalize(word: *const c_char, n: u32, out: *mut *mut c_char) -> BsStatus {
    guard(|| {
        if out.is_null() {
            return BsStatus::NullPointer;
        }
        if n < 2 {
            return BsStatus::InvalidInput;
        }
        let w = tri!(parse_word(arg!(text(word))));
        put_string(out, normalize(&w, n).to_string())
    })
}

/// Parses a substitution from JSON and normalizes it to the unique size
/// property.
///
/// # Safety
/// `json` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bs_substitution_from_json(json: *const c_char, out: *mut *mut BsSubstitution) -> BsStatus {
    guard(|| {
        if out.is_null() {
            return BsStatus::NullPointer;
        }
        let s = tri!(Substitution::from_json(arg!(text(json))));
        let e = tri!(expanding_eigen(&s));
        let (sigma, eigen) = tri!(normalize_unique_size(&s, &e));
        put(out, BsSubstitution { sigma, eigen })
    })
}

/// Expanding eigenvalue of the normalized substitution.
///
/// # Safety
/// `s` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bs_substitution_lambda(s: *const BsSubstitution, out: *mut f64) -> BsStatus {
    if s.is_null() || out.is_null() {
        return BsStatus::NullPointer;
    }
    *out = (*s).eigen.lambda;
    BsStatus::Ok
}

/// Releases a substitution.
///
/// # Safety
/// `s` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bs_substitution_free(s: *mut BsSubstitution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Grows a window around a seed tile of letter index `letter`.
///
/// # Safety
/// `s` is a live handle; `out` is writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn bs_window_grow(
    s: *const BsSubstitution,
    letter: usize,
    up: usize,
    down: usize,
    half_width: f64,
    y0: f64,
    seed: u64,
    out: *mut *mut BsWindow,
) -> BsStatus {
    guard(|| {
        if s.is_null() || out.is_null() {
            return BsStatus::NullPointer;
        }
        let s = &*s;
        if letter >= s.sigma.size() {
            return BsStatus::InvalidInput;
        }
        let w = tri!(grow_window(&s.sigma, &s.eigen, letter, up, down, half_width, &ChoicePolicy::Seeded(seed), y0));
        put(out, BsWindow(w))
    })
}

/// Number of tiles in a window.
///
/// # Safety
/// `w` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bs_window_tile_count(w: *const BsWindow, out: *mut usize) -> BsStatus {
    if w.is_null() || out.is_null() {
        return BsStatus::NullPointer;
    }
    *out = (*w).0.rows.iter().map(|r| r.tiles.len()).sum();
    BsStatus::Ok
}

/// SVG picture of a window over its own viewport.
///
/// # Safety
/// `w` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bs_window_render_svg(w: *const BsWindow, scale: f64, out: *mut *mut c_char) -> BsStatus {
    guard(|| {
        if w.is_null() || out.is_null() {
            return BsStatus::NullPointer;
        }
        let w = &(*w).0;
        let svg = tri!(render_tiling_svg(w, &RenderSpec::new(w.viewport, scale)));
        put_string(out, svg)
    })
}

/// Releases a window.
///
/// # Safety
/// `w` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bs_window_free(w: *mut BsWindow) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Encodes a window on `R_{k,ℓ}`.
///
/// # Safety
/// `w` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bs_encode(w: *const BsWindow, k: u32, ell: u32, out: *mut *mut BsPattern) -> BsStatus {
    guard(|| {
        if w.is_null() || out.is_null() {
            return BsStatus::NullPointer;
        }
        let w = &(*w).0;
        let n = tri!(w.generator()).n();
        let p = tri!(encode(w, &rectangle(k, ell, n)));
        put(out, BsPattern(p))
    })
}

/// Number of cells of a pattern.
///
/// # Safety
/// `p` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bs_pattern_len(p: *const BsPattern, out: *mut usize) -> BsStatus {
    if p.is_null() || out.is_null() {
        return BsStatus::NullPointer;
    }
    *out = (*p).0.len();
    BsStatus::Ok
}

/// JSON form of a pattern.
///
/// # Safety
/// `p` and `s` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bs_pattern_to_json(p: *const BsPattern, s: *const BsSubstitution, out: *mut *mut c_char) -> BsStatus {
    guard(|| {
        if p.is_null() || s.is_null() || out.is_null() {
            return BsStatus::NullPointer;
        }
        put_string(out, (*p).0.to_json(&(*s).sigma).to_string())
    })
}

/// Releases a pattern.
///
/// # Safety
/// `p` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bs_pattern_free(p: *mut BsPattern) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Harvests local-rule tables from `samples` random windows.
///
/// # Safety
/// `s` is a live handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bs_tables_harvest(s: *const BsSubstitution, samples: usize, seed: u64, out: *mut *mut BsTables) -> BsStatus {
    guard(|| {
        if s.is_null() || out.is_null() {
            return BsStatus::NullPointer;
        }
        let s = &*s;
        let t = tri!(harvest_tables(&s.sigma, &s.eigen, samples, seed));
        put(out, BsTables(t))
    })
}

/// Releases tables.
///
/// # Safety
/// `t` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bs_tables_free(t: *mut BsTables) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of local-rule violations of a pattern.
///
/// # Safety
/// `p` and `t` are live handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bs_check(p: *const BsPattern, t: *const BsTables, out: *mut usize) -> BsStatus {
    guard(|| {
        if p.is_null() || t.is_null() || out.is_null() {
            return BsStatus::NullPointer;
        }
        *out = tri!(check_pattern(&(*p).0, &(*t).0)).len();
        BsStatus::Ok
    })
}

/// Checks newline-separated A/B/C/D/E rows; `out` receives the number of
/// violations.
///
/// # Safety
/// `rows` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn bs_robinson_check(rows: *const c_char, out: *mut usize) -> BsStatus {
    guard(|| {
        if out.is_null() {
            return BsStatus::NullPointer;
        }
        let lines: Vec<&str> = arg!(text(rows)).lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        *out = structure_check(&lines).violations.len();
        BsStatus::Ok
    })
}
