//! C ABI over the einclass engine.
//!
//! Every entry point returns an [`EinclassStatus`]; on failure the message is
//! available from [`einclass_last_error`] on the same thread. Metrics are
//! opaque handles released with [`einclass_metric_free`]; strings returned by
//! the library are released with [`einclass_string_free`].

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use einclass::metrics::{catalog, load_metric, MetricError, MetricSpec, SamplePlan};
use einclass::omega::{ClassLabel, Tolerances};
use einclass::report::{analyze_point, classify_region, ReportError};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EinclassStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// unknown catalog name, bad parameter, unparsable metric text
    Metric = 3,
    /// point outside the domain box or wrong signature there
    Domain = 4,
    /// internal identity check failed; no verdict is produced
    Identity = 5,
    InvalidArgument = 6,
    Panic = 7,
}

/// Class label of `∇T`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EinclassLabel {
    Parallel = 0,
    O1 = 1,
    O2 = 2,
    O3 = 3,
    O12 = 4,
    O13 = 5,
    O23 = 6,
    Generic = 7,
}

impl From<ClassLabel> for EinclassLabel {
    fn from(l: ClassLabel) -> Self {
        match l {
            ClassLabel::Parallel => EinclassLabel::Parallel,
            ClassLabel::O1 => EinclassLabel::O1,
            ClassLabel::O2 => EinclassLabel::O2,
            ClassLabel::O3 => EinclassLabel::O3,
            ClassLabel::O12 => EinclassLabel::O12,
            ClassLabel::O13 => EinclassLabel::O13,
            ClassLabel::O23 => EinclassLabel::O23,
            ClassLabel::Generic => EinclassLabel::Generic,
        }
    }
}

/// Opaque metric handle.
pub struct EinclassMetric {
    spec: MetricSpec,
}

/// Verdict at one point.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EinclassVerdict {
    pub label: EinclassLabel,
    pub scalar: f64,
    pub nabla_t_norm: f64,
    /// frame norms of the three projections of `∇T`
    pub projection_norms: [f64; 3],
    /// nonzero when the energy-momentum tensor itself vanishes
    pub vacuum: u8,
}

/// Tensors at one point, row-major with the derivative index first.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EinclassComponents {
    pub g: [f64; 16],
    pub g_inv: [f64; 16],
    /// `Γ^k_ij` at `[k*16 + i*4 + j]`
    pub christoffel: [f64; 64],
    pub ricci: [f64; 16],
    pub scalar: f64,
    pub t: [f64; 16],
    /// `∇_k T_ij` at `[k*16 + i*4 + j]`
    pub nabla_t: [f64; 64],
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn metric_status(e: &MetricError) -> EinclassStatus {
    match e {
        MetricError::OutsideDomain { .. } | MetricError::Signature { .. } | MetricError::Eval { .. } => EinclassStatus::Domain,
        _ => EinclassStatus::Metric,
    }
}

fn report_status(e: &ReportError) -> EinclassStatus {
    match e {
        ReportError::Identity { .. } => EinclassStatus::Identity,
        ReportError::Metric(m) => metric_status(m),
        ReportError::Input(_) => EinclassStatus::InvalidArgument,
        _ => EinclassStatus::Domain,
    }
}

struct Failure(EinclassStatus, String);

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        Failure(report_status(&e), e.to_string())
    }
}

impl From<MetricError> for Failure {
    fn from(e: MetricError) -> Self {
        Failure(metric_status(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> EinclassStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            EinclassStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            EinclassStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(EinclassStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(EinclassStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn metric_ref<'a>(m: *const EinclassMetric) -> Result<&'a MetricSpec, Failure> {
    m.as_ref().map(|m| &m.spec).ok_or(Failure(EinclassStatus::NullPointer, "metric handle is null".into()))
}

unsafe fn point(p: *const f64) -> Result<[f64; 4], Failure> {
    if p.is_null() {
        return Err(Failure(EinclassStatus::NullPointer, "point is null".into()));
    }
    Ok(*(p as *const [f64; 4]))
}

fn tolerances(tol_rel: f64, tol_floor: f64) -> Result<Tolerances, Failure> {
    let d = Tolerances::default();
    let pick = |v: f64, d: f64| if v == 0.0 { d } else { v };
    let t = Tolerances { tol_rel: pick(tol_rel, d.tol_rel), tol_floor: pick(tol_floor, d.tol_floor) };
    if !(t.tol_rel > 0.0 && t.tol_floor > 0.0) {
        return Err(Failure(EinclassStatus::InvalidArgument, "tolerances must be positive".into()));
    }
    Ok(t)
}

fn store<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(EinclassStatus::NullPointer, "output pointer is null".into()));
    }
    unsafe { out.write(value) };
    Ok(())
}

fn store_metric(out: *mut *mut EinclassMetric, spec: MetricSpec) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(EinclassStatus::NullPointer, "output pointer is null".into()));
    }
    store(out, Box::into_raw(Box::new(EinclassMetric { spec })))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn einclass_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn einclass_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Build a catalog metric. `params` is `key=value` pairs separated by `;`
/// (e.g. `"m=2"`, `"spatial=1,0,0,1,0,1"`), or null for defaults.
///
/// # Safety
/// `name` and `params` must be null or NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn einclass_metric_from_catalog(
    name: *const c_char,
    params: *const c_char,
    out: *mut *mut EinclassMetric,
) -> EinclassStatus {
    guard(|| {
        let name = text(name, "name")?;
        let mut args = BTreeMap::new();
        if !params.is_null() {
            for pair in text(params, "params")?.split(';').filter(|s| !s.trim().is_empty()) {
                let (k, v) = pair
                    .split_once('=')
                    .ok_or_else(|| Failure(EinclassStatus::InvalidArgument, format!("parameter `{pair}` is not key=value")))?;
                args.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        let spec = catalog(name, &args)?;
        store_metric(out, spec)
    })
}

/// Build a metric from the text file format.
///
/// # Safety
/// `source` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn einclass_metric_from_text(source: *const c_char, out: *mut *mut EinclassMetric) -> EinclassStatus {
    guard(|| {
        let spec = load_metric(text(source, "source")?)?;
        store_metric(out, spec)
    })
}

/// # Safety
/// `metric` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn einclass_metric_free(metric: *mut EinclassMetric) {
    if !metric.is_null() {
        drop(Box::from_raw(metric));
    }
}

/// Classify `∇T` at `point[4]`. Zero tolerances select the defaults.
///
/// # Safety
/// `metric` must be a live handle, `point` must hold four doubles, `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn einclass_classify_point(
    metric: *const EinclassMetric,
    point_ptr: *const f64,
    tol_rel: f64,
    tol_floor: f64,
    out: *mut EinclassVerdict,
) -> EinclassStatus {
    guard(|| {
        let spec = metric_ref(metric)?;
        let p = point(point_ptr)?;
        if !spec.contains(&p) {
            return Err(MetricError::OutsideDomain { point: p }.into());
        }
        let a = analyze_point(spec, &p, &tolerances(tol_rel, tol_floor)?)?;
        store(
            out,
            EinclassVerdict {
                label: a.record.verdict.into(),
                scalar: a.record.scalar,
                nabla_t_norm: a.record.nabla_t_norm,
                projection_norms: a.record.projection_norms,
                vacuum: a.record.note.is_some() as u8,
            },
        )
    })
}

/// Metric, connection and curvature values at `point[4]`.
///
/// # Safety
/// `metric` must be a live handle, `point` must hold four doubles, `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn einclass_components(
    metric: *const EinclassMetric,
    point_ptr: *const f64,
    out: *mut EinclassComponents,
) -> EinclassStatus {
    guard(|| {
        let spec = metric_ref(metric)?;
        let p = point(point_ptr)?;
        if !spec.contains(&p) {
            return Err(MetricError::OutsideDomain { point: p }.into());
        }
        let pg = einclass::curvature::PointGeometry::compute(spec, &p).map_err(ReportError::from)?;
        let f2 = |m: &[[f64; 4]; 4]| -> [f64; 16] { std::array::from_fn(|n| m[n / 4][n % 4]) };
        let f3 = |t: &[[[f64; 4]; 4]; 4]| -> [f64; 64] { std::array::from_fn(|n| t[n / 16][(n / 4) % 4][n % 4]) };
        store(
            out,
            EinclassComponents {
                g: f2(&pg.g),
                g_inv: f2(&pg.g_inv),
                christoffel: f3(&pg.gamma),
                ricci: f2(&pg.ricci),
                scalar: pg.scalar,
                t: f2(&pg.t),
                nabla_t: f3(&pg.nabla_t),
            },
        )
    })
}

/// Classify over a uniform grid with `n` points per axis and return the JSON report.
/// Release the string with [`einclass_string_free`].
///
/// # Safety
/// `metric` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn einclass_classify_grid_json(
    metric: *const EinclassMetric,
    n: u32,
    tol_rel: f64,
    tol_floor: f64,
    out: *mut *mut c_char,
) -> EinclassStatus {
    guard(|| {
        let spec = metric_ref(metric)?;
        if n == 0 {
            return Err(Failure(EinclassStatus::InvalidArgument, "grid size must be positive".into()));
        }
        let plan = SamplePlan::default_grid(spec, [n as usize; 4]);
        let report = classify_region(spec, &plan, &tolerances(tol_rel, tol_floor)?)?;
        let json = serde_json::to_string(&report).expect("reports serialise");
        store(out, CString::new(json).expect("JSON has no NUL").into_raw())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn einclass_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
