//! Region classification runs and their serialisable reports.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{GeometryError, IdentityNorms, PointGeometry, Vec4, T3, T4};
use crate::frame::FrameError;
use crate::geodesics::{integrate, quadratic_integral_drift, GeodesicError, GeodesicState, IntegralDriftReport, IntegralField};
use crate::linalg::Mat4;
use crate::metrics::{MetricError, MetricSpec, SamplePlan};
use crate::omega::{
    classify, classify_tensor, cross_check, project, project_raw, residual_norms, ClassLabel, Condition, CrossCheck, Decomposition,
    OmegaError, OmegaTensor, Tolerances, VACUUM_NOTE,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Omega(#[from] OmegaError),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal identity check failed at {point:?}: {detail}")]
    Identity { point: Vec4, detail: String },
}

impl ReportError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            ReportError::Identity { .. } => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ReportError::Metric(_) => "metric",
            ReportError::Geometry(_) => "geometry",
            ReportError::Omega(_) => "omega",
            ReportError::Geodesic(_) => "geodesic",
            ReportError::Input(_) => "input",
            ReportError::Identity { .. } => "identity",
        }
    }
}

impl From<FrameError> for ReportError {
    fn from(e: FrameError) -> Self {
        ReportError::Geometry(GeometryError::Frame(e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricInfo {
    pub name: String,
    pub description: String,
    pub coords: [String; 4],
    pub params: BTreeMap<String, f64>,
}

impl MetricInfo {
    pub fn of(spec: &MetricSpec) -> Self {
        MetricInfo {
            name: spec.name.clone(),
            description: spec.description.clone(),
            coords: spec.coords.clone(),
            params: spec.params.clone(),
        }
    }
}

/// Frame norms of the six class residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualNorms {
    pub killing: f64,
    pub codazzi: f64,
    pub trace_shape: f64,
    pub constant_scalar: f64,
    pub harmonic_weyl: f64,
    pub conformal_killing: f64,
}

impl ResidualNorms {
    pub fn from_array(a: [f64; 6]) -> Self {
        ResidualNorms {
            killing: a[0],
            codazzi: a[1],
            trace_shape: a[2],
            constant_scalar: a[3],
            harmonic_weyl: a[4],
            conformal_killing: a[5],
        }
    }

    pub fn get(&self, c: Condition) -> f64 {
        match c {
            Condition::Killing => self.killing,
            Condition::Codazzi => self.codazzi,
            Condition::TraceShape => self.trace_shape,
            Condition::ConstantScalar => self.constant_scalar,
            Condition::HarmonicWeyl => self.harmonic_weyl,
            Condition::ConformalKilling => self.conformal_killing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub point: Vec4,
    pub scalar: f64,
    pub nabla_t_norm: f64,
    pub projection_norms: [f64; 3],
    pub residual_norms: ResidualNorms,
    pub identity_norms: IdentityNorms,
    pub verdict: ClassLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub schema_version: u32,
    pub engine_version: String,
    pub metric: MetricInfo,
    pub sample: SamplePlan,
    pub tolerances: Tolerances,
    pub points: Vec<PointRecord>,
    pub aggregate: ClassLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Full per-point analysis: geometry, decomposition, verdict and cross-check.
#[derive(Debug, Clone)]
pub struct PointAnalysis {
    pub geometry: PointGeometry,
    pub decomposition: Decomposition,
    pub cross_check: CrossCheck,
    pub record: PointRecord,
}

pub fn analyze_point(spec: &MetricSpec, point: &Vec4, tol: &Tolerances) -> Result<PointAnalysis, ReportError> {
    let geometry = PointGeometry::compute(spec, point)?;
    let frame = geometry.frame()?;
    let identity_norms = geometry.identity_norms()?;
    if !identity_norms.passes() {
        return Err(ReportError::Identity { point: *point, detail: format!("{identity_norms:?}") });
    }
    let nabla_t = OmegaTensor::new(geometry.nabla_t);
    // membership of ∇T is the conservation law, already checked above
    let [pi1, pi2, pi3] = project_raw(&nabla_t, &geometry.g, &geometry.g_inv);
    let norm = frame.norm_lower(nabla_t.flat());
    let norms = [pi1, pi2, pi3].map(|p| frame.norm_lower(p.flat()));
    let rest = nabla_t.sub(&pi1).sub(&pi2).sub(&pi3);
    let decomposition = Decomposition {
        pi1,
        pi2,
        pi3,
        norm,
        norms,
        theta: nabla_t.free_trace(&geometry.g_inv),
        completeness: frame.norm_lower(rest.flat()),
    };
    let residuals = geometry.residuals();
    let cc = cross_check(&decomposition, &residuals, &geometry.g, tol)?;
    if !cc.all_agree() {
        let bad: Vec<&str> = cc.equivalences.iter().filter(|e| !e.agree).map(|e| e.condition.name()).collect();
        return Err(ReportError::Identity {
            point: *point,
            detail: format!("projection and residual class conditions disagree for {bad:?}"),
        });
    }
    let verdict = classify(&geometry, tol)?;
    let record = PointRecord {
        point: *point,
        scalar: geometry.scalar,
        nabla_t_norm: norm,
        projection_norms: norms,
        residual_norms: ResidualNorms::from_array(residual_norms(&residuals, &frame)),
        identity_norms,
        verdict: verdict.label,
        note: verdict.note,
    };
    Ok(PointAnalysis { geometry, decomposition, cross_check: cc, record })
}

/// Classify every point of the plan; points are evaluated in parallel and reported in lexicographic order.
pub fn classify_region(spec: &MetricSpec, plan: &SamplePlan, tol: &Tolerances) -> Result<ClassificationReport, ReportError> {
    let pts = plan.points(spec)?;
    let records = pts.par_iter().map(|p| analyze_point(spec, p, tol).map(|a| a.record)).collect::<Result<Vec<_>, _>>()?;
    let aggregate = ClassLabel::aggregate(records.iter().map(|r| r.verdict));
    let vacuum = !records.is_empty() && records.iter().all(|r| r.note.as_deref() == Some(VACUUM_NOTE));
    Ok(ClassificationReport {
        schema_version: SCHEMA_VERSION,
        engine_version: ENGINE_VERSION.to_string(),
        metric: MetricInfo::of(spec),
        sample: plan.clone(),
        tolerances: *tol,
        points: records,
        aggregate,
        note: vacuum.then(|| VACUUM_NOTE.to_string()),
    })
}

/// Everything computed at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentsDump {
    pub schema_version: u32,
    pub engine_version: String,
    pub metric: MetricInfo,
    pub point: Vec4,
    pub g: Mat4,
    pub g_inv: Mat4,
    pub christoffel: T3,
    pub ricci: Mat4,
    pub scalar: f64,
    pub t: Mat4,
    pub nabla_t: T3,
    pub projective_weyl: T4,
    pub projection_norms: [f64; 3],
    pub residual_norms: ResidualNorms,
    pub identity_norms: IdentityNorms,
    pub verdict: ClassLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ComponentsDump {
    pub fn compute(spec: &MetricSpec, point: &Vec4, tol: &Tolerances) -> Result<Self, ReportError> {
        if !spec.contains(point) {
            return Err(MetricError::OutsideDomain { point: *point }.into());
        }
        let a = analyze_point(spec, point, tol)?;
        let g = &a.geometry;
        Ok(ComponentsDump {
            schema_version: SCHEMA_VERSION,
            engine_version: ENGINE_VERSION.to_string(),
            metric: MetricInfo::of(spec),
            point: *point,
            g: g.g,
            g_inv: g.g_inv,
            christoffel: g.gamma,
            ricci: g.ricci,
            scalar: g.scalar,
            t: g.t,
            nabla_t: g.nabla_t,
            projective_weyl: g.p,
            projection_norms: a.record.projection_norms,
            residual_norms: a.record.residual_norms,
            identity_norms: a.record.identity_norms,
            verdict: a.record.verdict,
            note: a.record.note,
        })
    }
}

/// Input of the `decompose` command: a tensor at a point of a catalog metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFixture {
    pub metric: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    pub point: Vec4,
    /// `Ω_{kij}` flattened with `k` slowest
    pub omega: Vec<f64>,
}

impl TensorFixture {
    pub fn tensor(&self) -> Result<OmegaTensor, ReportError> {
        let arr: &[f64; 64] = self
            .omega
            .as_slice()
            .try_into()
            .map_err(|_| ReportError::Input(format!("omega must have 64 entries, found {}", self.omega.len())))?;
        Ok(OmegaTensor::from_flat(arr))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeReport {
    pub schema_version: u32,
    pub engine_version: String,
    pub metric: MetricInfo,
    pub point: Vec4,
    pub theta: Vec4,
    pub pi1: OmegaTensor,
    pub pi2: OmegaTensor,
    pub pi3: OmegaTensor,
    pub norm: f64,
    pub projection_norms: [f64; 3],
    pub completeness: f64,
    pub verdict: ClassLabel,
}

pub fn decompose_at(spec: &MetricSpec, point: &Vec4, omega: &OmegaTensor, tol: &Tolerances) -> Result<DecomposeReport, ReportError> {
    let g = spec.values(point)?;
    spec.metric_jets(point)?;
    let g_inv = crate::linalg::inverse(&g).ok_or_else(|| ReportError::Input("metric is singular at the point".into()))?;
    let d = project(omega, &g, &g_inv)?;
    let verdict = classify_tensor(omega, &g, &g_inv, tol)?;
    Ok(DecomposeReport {
        schema_version: SCHEMA_VERSION,
        engine_version: ENGINE_VERSION.to_string(),
        metric: MetricInfo::of(spec),
        point: *point,
        theta: d.theta,
        pi1: d.pi1,
        pi2: d.pi2,
        pi3: d.pi3,
        norm: d.norm,
        projection_norms: d.norms,
        completeness: d.completeness,
        verdict: verdict.label,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicReport {
    pub schema_version: u32,
    pub engine_version: String,
    pub metric: MetricInfo,
    pub x0: Vec4,
    pub v0: Vec4,
    pub drift: IntegralDriftReport,
    /// `g`-integral drift on the same trajectory, the integrator error scale
    pub metric_drift: IntegralDriftReport,
    pub final_state: GeodesicState,
}

pub fn geodesic_run(spec: &MetricSpec, x0: Vec4, v0: Vec4, h: f64, n: usize, field: IntegralField) -> Result<GeodesicReport, ReportError> {
    let tr = integrate(spec, x0, v0, h, n)?;
    let metric_drift = quadratic_integral_drift(spec, &tr, IntegralField::G)?;
    let drift = match field {
        IntegralField::G => metric_drift,
        IntegralField::Ric => quadratic_integral_drift(spec, &tr, field)?,
    };
    Ok(GeodesicReport {
        schema_version: SCHEMA_VERSION,
        engine_version: ENGINE_VERSION.to_string(),
        metric: MetricInfo::of(spec),
        x0,
        v0,
        drift,
        metric_drift,
        final_state: *tr.last().expect("n >= 1"),
    })
}
