//! Fixed-step RK4 geodesics and drift of quadratic first integrals.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{christoffel_at, ricci_at, GeometryError, Vec4};
use crate::jets::DIM;
use crate::linalg::Mat4;
use crate::metrics::{MetricError, MetricSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeodesicError {
    #[error("step size must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("step count must be at least 1")]
    NoSteps,
    #[error("geodesic left the domain during step {step} at {point:?}")]
    DomainExit { step: usize, point: Vec4 },
    #[error("state became non-finite during step {step}")]
    NonFinite { step: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    pub x: Vec4,
    pub v: Vec4,
    pub s_param: f64,
}

/// Tensor field whose quadratic form is tracked along a geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegralField {
    /// `g_{ij}`: conserved on every geodesic
    G,
    /// `R_{ij}`: conserved when the Ricci tensor is Killing
    Ric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralDriftReport {
    pub field: IntegralField,
    pub q0: f64,
    pub max_drift: f64,
    pub steps: usize,
    pub step_size: f64,
}

fn acceleration(spec: &MetricSpec, x: &Vec4, v: &Vec4, step: usize) -> Result<Vec4, GeodesicError> {
    let gamma = christoffel_at(spec, x).map_err(|e| match e {
        GeometryError::Metric(MetricError::OutsideDomain { .. }) => GeodesicError::DomainExit { step, point: *x },
        other => GeodesicError::Geometry(other),
    })?;
    let mut a = [0.0; DIM];
    for (k, ak) in a.iter_mut().enumerate() {
        for i in 0..DIM {
            for j in 0..DIM {
                *ak -= gamma[k][i][j] * v[i] * v[j];
            }
        }
    }
    Ok(a)
}

fn axpy(x: &Vec4, h: f64, d: &Vec4) -> Vec4 {
    std::array::from_fn(|i| x[i] + h * d[i])
}

/// `n` RK4 steps of `ẍ^k = −Γ^k_{ij} ẋ^i ẋ^j`; returns the `n + 1` states.
pub fn integrate(spec: &MetricSpec, x0: Vec4, v0: Vec4, h: f64, n: usize) -> Result<Vec<GeodesicState>, GeodesicError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(GeodesicError::BadStep(h));
    }
    if n == 0 {
        return Err(GeodesicError::NoSteps);
    }
    if !spec.contains(&x0) {
        return Err(GeodesicError::DomainExit { step: 0, point: x0 });
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut st = GeodesicState { x: x0, v: v0, s_param: 0.0 };
    out.push(st);
    for step in 1..=n {
        let (x, v) = (st.x, st.v);
        let k1x = v;
        let k1v = acceleration(spec, &x, &v, step)?;
        let x2 = axpy(&x, 0.5 * h, &k1x);
        let k2x = axpy(&v, 0.5 * h, &k1v);
        let k2v = acceleration(spec, &x2, &k2x, step)?;
        let x3 = axpy(&x, 0.5 * h, &k2x);
        let k3x = axpy(&v, 0.5 * h, &k2v);
        let k3v = acceleration(spec, &x3, &k3x, step)?;
        let x4 = axpy(&x, h, &k3x);
        let k4x = axpy(&v, h, &k3v);
        let k4v = acceleration(spec, &x4, &k4x, step)?;
        let nx: Vec4 = std::array::from_fn(|i| x[i] + h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]));
        let nv: Vec4 = std::array::from_fn(|i| v[i] + h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]));
        if nx.iter().chain(&nv).any(|c| !c.is_finite()) {
            return Err(GeodesicError::NonFinite { step });
        }
        if !spec.contains(&nx) {
            return Err(GeodesicError::DomainExit { step, point: nx });
        }
        st = GeodesicState { x: nx, v: nv, s_param: step as f64 * h };
        out.push(st);
    }
    Ok(out)
}

fn quadratic(a: &Mat4, v: &Vec4) -> f64 {
    let mut q = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            q += a[i][j] * v[i] * v[j];
        }
    }
    q
}

/// `Q(s) = a_{ij} ẋ^i ẋ^j` at every state.
pub fn quadratic_integral(spec: &MetricSpec, trajectory: &[GeodesicState], field: IntegralField) -> Result<Vec<f64>, GeodesicError> {
    trajectory
        .par_iter()
        .map(|st| {
            let a = match field {
                IntegralField::G => spec.values(&st.x)?,
                IntegralField::Ric => ricci_at(spec, &st.x)?.1,
            };
            Ok(quadratic(&a, &st.v))
        })
        .collect::<Result<Vec<f64>, GeometryError>>()
        .map_err(GeodesicError::from)
}

pub fn quadratic_integral_drift(
    spec: &MetricSpec,
    trajectory: &[GeodesicState],
    field: IntegralField,
) -> Result<IntegralDriftReport, GeodesicError> {
    let q = quadratic_integral(spec, trajectory, field)?;
    let q0 = q[0];
    let step_size = trajectory.get(1).map_or(0.0, |s| s.s_param);
    Ok(IntegralDriftReport {
        field,
        q0,
        max_drift: q.iter().fold(0.0, |m, x| m.max((x - q0).abs())),
        steps: trajectory.len() - 1,
        step_size,
    })
}

/// Initial data for the circular timelike orbit of radius `r` in the equatorial plane
/// of the catalog Schwarzschild chart.
pub fn schwarzschild_circular(m: f64, r: f64, t0: f64, phi0: f64) -> (Vec4, Vec4) {
    let omega = (m / r.powi(3)).sqrt();
    let vt = 1.0 / (1.0 - 3.0 * m / r).sqrt();
    ([t0, r, std::f64::consts::FRAC_PI_2, phi0], [vt, 0.0, 0.0, omega * vt])
}
