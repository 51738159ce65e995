//! Pointwise curvature of a metric and the class-condition residuals.
//!
//! Index conventions (all arrays are row-major, derivative index first):
//!
//! - `gamma[k][i][j] = Γ^k_{ij}`, `dgamma[k][i][j][m] = ∂_m Γ^k_{ij}`
//! - `riemann[k][l][i][j] = R^k_{lij}` with `R^k_{lij} X^l = ∇_i∇_j X^k − ∇_j∇_i X^k`
//! - `ricci[i][j] = R^k_{ikj}`, `scalar = g^{ij} R_{ij}`
//! - `nabla_t[k][i][j] = ∇_k T_{ij}`, `nabla_riemann[m][k][l][i][j] = ∇_m R^k_{lij}`
//! - `p[l][i][j][k] = P_{lijk}`, the projective curvature
//!
//! With these conventions de Sitter space has `s = 12H² > 0`.

use thiserror::Error;

use crate::frame::{Frame, FrameError, Slot};
use crate::jets::{jet_matrix_inverse, Jet3, JetError, DIM};
use crate::linalg::Mat4;
use crate::metrics::{MetricError, MetricSpec};

pub type Vec4 = [f64; DIM];
pub type T3 = [[[f64; DIM]; DIM]; DIM];
pub type T4 = [[[[f64; DIM]; DIM]; DIM]; DIM];
pub type T5 = [[[[[f64; DIM]; DIM]; DIM]; DIM]; DIM];

const Z3: T3 = [[[0.0; DIM]; DIM]; DIM];
const Z4: T4 = [[[[0.0; DIM]; DIM]; DIM]; DIM];
const Z5: T5 = [[[[[0.0; DIM]; DIM]; DIM]; DIM]; DIM];

pub fn flat2(t: &Mat4) -> &[f64] {
    t.as_flattened()
}
pub fn flat3(t: &T3) -> &[f64] {
    t.as_flattened().as_flattened()
}
pub fn flat4(t: &T4) -> &[f64] {
    t.as_flattened().as_flattened().as_flattened()
}
pub fn flat5(t: &T5) -> &[f64] {
    t.as_flattened().as_flattened().as_flattened().as_flattened()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("metric is degenerate at {point:?}: {source}")]
    Singular { point: Vec4, source: JetError },
    #[error(transparent)]
    Frame(#[from] FrameError),
}

/// All geometric data at one event.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub point: Vec4,
    pub g: Mat4,
    pub g_inv: Mat4,
    /// `dg[k][i][j] = ∂_k g_{ij}`
    pub dg: T3,
    pub gamma: T3,
    pub dgamma: T4,
    /// `d2gamma[k][i][j][m][n] = ∂_m ∂_n Γ^k_{ij}`
    pub d2gamma: T5,
    pub riemann: T4,
    /// `d_riemann[m][k][l][i][j] = ∂_m R^k_{lij}`
    pub d_riemann: T5,
    pub nabla_riemann: T5,
    pub ricci: Mat4,
    /// `d_ricci[k][i][j] = ∂_k R_{ij}`
    pub d_ricci: T3,
    pub nabla_ricci: T3,
    pub scalar: f64,
    pub ds: Vec4,
    pub t: Mat4,
    pub nabla_t: T3,
    pub p: T4,
    /// `nabla_p[m][l][i][j][k] = ∇_m P_{lijk}`
    pub nabla_p: T5,
    /// `(d*P)_{ijk} = −g^{lm} ∇_m P_{lijk}` from the contraction of `nabla_p`.
    pub dstar_p_direct: T3,
    /// `−(2/3) (dRic)_{ijk}` with `(dRic)_{ijk} = ∇_j R_{ik} − ∇_k R_{ij}`.
    pub dstar_p_from_ricci: T3,
}

/// Christoffel symbols as jets, valid through order 2.
pub fn christoffel_jets(g: &[[Jet3; DIM]; DIM], g_inv: &[[Jet3; DIM]; DIM]) -> [[[Jet3; DIM]; DIM]; DIM] {
    let dg: [[[Jet3; DIM]; DIM]; DIM] = std::array::from_fn(|m| std::array::from_fn(|i| std::array::from_fn(|j| g[i][j].derivative(m))));
    let mut lower = [[[Jet3::zero(); DIM]; DIM]; DIM];
    for l in 0..DIM {
        for i in 0..DIM {
            for j in i..DIM {
                let v = (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]).scale(0.5);
                lower[l][i][j] = v;
                lower[l][j][i] = v;
            }
        }
    }
    let mut gamma = [[[Jet3::zero(); DIM]; DIM]; DIM];
    for k in 0..DIM {
        for i in 0..DIM {
            for j in i..DIM {
                let mut acc = Jet3::zero();
                for l in 0..DIM {
                    acc += g_inv[k][l] * lower[l][i][j];
                }
                let acc = acc.truncate(2);
                gamma[k][i][j] = acc;
                gamma[k][j][i] = acc;
            }
        }
    }
    gamma
}

/// `Γ^k_{ij}` values only, from order-1 data of the metric.
pub fn christoffel_values(g: &[[Jet3; DIM]; DIM], g_inv: &Mat4) -> T3 {
    let mut lower = Z3;
    for l in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                lower[l][i][j] = 0.5 * (g[l][j].d1(i) + g[l][i].d1(j) - g[i][j].d1(l));
            }
        }
    }
    let mut gamma = Z3;
    for k in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                gamma[k][i][j] = (0..DIM).map(|l| g_inv[k][l] * lower[l][i][j]).sum();
            }
        }
    }
    gamma
}

/// `R^k_{lij}` from Γ and ∂Γ.
pub fn riemann_from(gamma: &T3, dgamma: &T4) -> T4 {
    let mut r = Z4;
    for k in 0..DIM {
        for l in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    let mut v = dgamma[k][j][l][i] - dgamma[k][i][l][j];
                    for m in 0..DIM {
                        v += gamma[k][i][m] * gamma[m][j][l] - gamma[k][j][m] * gamma[m][i][l];
                    }
                    r[k][l][i][j] = v;
                }
            }
        }
    }
    r
}

/// `R_{ij} = R^k_{ikj}`
pub fn ricci_from(riemann: &T4) -> Mat4 {
    let mut ric = [[0.0; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            ric[i][j] = (0..DIM).map(|k| riemann[k][i][k][j]).sum();
        }
    }
    ric
}

pub fn scalar_curvature(ricci: &Mat4, g_inv: &Mat4) -> f64 {
    let mut s = 0.0;
    for i in 0..DIM {
        for j in 0..DIM {
            s += g_inv[i][j] * ricci[i][j];
        }
    }
    s
}

/// `T = Ric − ½ s g`
pub fn energy_momentum(ricci: &Mat4, s: f64, g: &Mat4) -> Mat4 {
    let mut t = [[0.0; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            t[i][j] = ricci[i][j] - 0.5 * s * g[i][j];
        }
    }
    t
}

/// `∇_k b_{ij} = ∂_k b_{ij} − Γ^l_{ki} b_{lj} − Γ^l_{kj} b_{il}` with `db[k][i][j] = ∂_k b_{ij}`.
pub fn covariant_derivative_sym2(b: &Mat4, db: &T3, gamma: &T3) -> T3 {
    let mut out = Z3;
    for k in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                let mut v = db[k][i][j];
                for l in 0..DIM {
                    v -= gamma[l][k][i] * b[l][j] + gamma[l][k][j] * b[i][l];
                }
                out[k][i][j] = v;
            }
        }
    }
    out
}

/// `g^{ik} ∇_i T_{kj}`; vanishes identically for a Levi-Civita `T`.
pub fn conservation_check(nabla_t: &T3, g_inv: &Mat4) -> Vec4 {
    let mut out = [0.0; DIM];
    for (j, o) in out.iter_mut().enumerate() {
        for i in 0..DIM {
            for k in 0..DIM {
                *o += g_inv[i][k] * nabla_t[i][k][j];
            }
        }
    }
    out
}

/// `∇_k T_{ij} + ∇_i T_{jk} + ∇_j T_{ki}`
pub fn residual_sym(nabla_t: &T3) -> T3 {
    let mut r = Z3;
    for k in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                r[k][i][j] = nabla_t[k][i][j] + nabla_t[i][j][k] + nabla_t[j][k][i];
            }
        }
    }
    r
}

/// `∇_k T_{ij} − ∇_i T_{kj}`
pub fn residual_codazzi(nabla_t: &T3) -> T3 {
    let mut r = Z3;
    for k in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                r[k][i][j] = nabla_t[k][i][j] - nabla_t[i][k][j];
            }
        }
    }
    r
}

/// `∇_k R_{ij} − (1/18)(4 ∂_k s g_{ij} + ∂_i s g_{kj} + ∂_j s g_{ik})`
pub fn residual_omega3(nabla_ric: &T3, ds: &Vec4, g: &Mat4) -> T3 {
    let mut r = Z3;
    for k in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                let rhs = (4.0 * ds[k] * g[i][j] + ds[i] * g[k][j] + ds[j] * g[i][k]) / 18.0;
                r[k][i][j] = nabla_ric[k][i][j] - rhs;
            }
        }
    }
    r
}

/// `∇_k B_{ij} − ∇_i B_{kj}` for `B = Ric − (1/6) s g`.
pub fn residual_23(nabla_ric: &T3, ds: &Vec4, g: &Mat4) -> T3 {
    let nabla_b = |k: usize, i: usize, j: usize| nabla_ric[k][i][j] - ds[k] * g[i][j] / 6.0;
    let mut r = Z3;
    for k in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                r[k][i][j] = nabla_b(k, i, j) - nabla_b(i, k, j);
            }
        }
    }
    r
}

/// `d*W = −½ · residual_23` in four dimensions.
pub fn dstar_weyl(r23: &T3) -> T3 {
    r23.map(|a| a.map(|b| b.map(|x| -0.5 * x)))
}

/// `∇_k R_{ij} + ∇_i R_{jk} + ∇_j R_{ki} − (1/3)(∂_k s g_{ij} + ∂_i s g_{jk} + ∂_j s g_{ki})`
pub fn residual_13(nabla_ric: &T3, ds: &Vec4, g: &Mat4) -> T3 {
    let mut r = Z3;
    for k in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                let lhs = nabla_ric[k][i][j] + nabla_ric[i][j][k] + nabla_ric[j][k][i];
                let rhs = (ds[k] * g[i][j] + ds[i] * g[j][k] + ds[j] * g[k][i]) / 3.0;
                r[k][i][j] = lhs - rhs;
            }
        }
    }
    r
}

/// `(dRic)_{ijk} = ∇_j R_{ik} − ∇_k R_{ij}`
pub fn d_ricci(nabla_ric: &T3) -> T3 {
    let mut r = Z3;
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                r[i][j][k] = nabla_ric[j][i][k] - nabla_ric[k][i][j];
            }
        }
    }
    r
}

/// Class-condition residuals at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSet {
    pub sym: T3,
    pub codazzi: T3,
    pub omega3: T3,
    pub ds: Vec4,
    pub r23: T3,
    pub dstar_w: T3,
    pub r13: T3,
    pub parallel: T3,
}

impl ResidualSet {
    pub fn new(nabla_t: &T3, nabla_ric: &T3, ds: &Vec4, g: &Mat4) -> Self {
        let r23 = residual_23(nabla_ric, ds, g);
        ResidualSet {
            sym: residual_sym(nabla_t),
            codazzi: residual_codazzi(nabla_t),
            omega3: residual_omega3(nabla_ric, ds, g),
            ds: *ds,
            dstar_w: dstar_weyl(&r23),
            r23,
            r13: residual_13(nabla_ric, ds, g),
            parallel: *nabla_t,
        }
    }
}

/// Residuals of the differential identities every Levi-Civita curvature satisfies.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResiduals {
    /// `[k][l][i][j][m]`: `∇_m R^k_{lij} + ∇_i R^k_{ljm} + ∇_j R^k_{lmi}`
    pub bianchi: T5,
    /// `[l][i][j]`: `∇_k R^k_{lij} + ∇_j R_{li} − ∇_i R_{lj}`
    pub yang_mills: T3,
    /// `2 g^{kj} ∇_j R_{ki} − ∂_i s`
    pub contracted: Vec4,
    /// `g^{ik} ∇_i T_{kj}`
    pub conservation: Vec4,
    /// difference of the two `d*P` routes
    pub dstar_p: T3,
}

/// Frame norms of [`IdentityResiduals`] plus the scale they are judged against.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IdentityNorms {
    pub bianchi: f64,
    pub yang_mills: f64,
    pub contracted: f64,
    pub conservation: f64,
    pub dstar_p: f64,
    /// `‖∇R‖`
    pub nabla_riemann: f64,
    /// `‖∇Ric‖`
    pub nabla_ricci: f64,
}

/// Relative tolerance of the identity suite: residual `< IDENTITY_TOL · (1 + scale)`.
pub const IDENTITY_TOL: f64 = 1e-9;

impl IdentityNorms {
    /// Bianchi, Yang–Mills, contracted Bianchi, conservation and the `d*P` consistency within tolerance.
    pub fn passes(&self) -> bool {
        let bound = IDENTITY_TOL * (1.0 + self.nabla_riemann);
        let bound_p = IDENTITY_TOL * (1.0 + self.nabla_ricci);
        self.bianchi < bound && self.yang_mills < bound && self.contracted < bound && self.conservation < bound && self.dstar_p < bound_p
    }
}

/// `Γ` values at a point.
pub fn christoffel_at(spec: &MetricSpec, point: &Vec4) -> Result<T3, GeometryError> {
    let gj = spec.metric_jets(point)?;
    let g = gj.map(|r| r.map(|j| j.value()));
    let g_inv = crate::linalg::inverse(&g)
        .ok_or(GeometryError::Singular { point: *point, source: JetError::SingularMatrix { column: 0, pivot: 0.0 } })?;
    Ok(christoffel_values(&gj, &g_inv))
}

/// Metric and Ricci values at a point, skipping the derivative towers.
pub fn ricci_at(spec: &MetricSpec, point: &Vec4) -> Result<(Mat4, Mat4), GeometryError> {
    let gj = spec.metric_jets(point)?;
    let ginv_j = jet_matrix_inverse(&gj).map_err(|source| GeometryError::Singular { point: *point, source })?;
    let gamma_j = christoffel_jets(&gj, &ginv_j);
    let mut gamma = Z3;
    let mut dgamma = Z4;
    for k in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                gamma[k][i][j] = gamma_j[k][i][j].value();
                for m in 0..DIM {
                    dgamma[k][i][j][m] = gamma_j[k][i][j].d1(m);
                }
            }
        }
    }
    Ok((gj.map(|r| r.map(|j| j.value())), ricci_from(&riemann_from(&gamma, &dgamma))))
}

impl PointGeometry {
    pub fn compute(spec: &MetricSpec, point: &Vec4) -> Result<PointGeometry, GeometryError> {
        let g = spec.metric_jets(point)?;
        PointGeometry::from_metric_jets(*point, &g)
    }

    pub fn from_metric_jets(point: Vec4, gj: &[[Jet3; DIM]; DIM]) -> Result<PointGeometry, GeometryError> {
        let ginv_j = jet_matrix_inverse(gj).map_err(|source| GeometryError::Singular { point, source })?;
        let gamma_j = christoffel_jets(gj, &ginv_j);

        let g = gj.map(|r| r.map(|j| j.value()));
        let g_inv = ginv_j.map(|r| r.map(|j| j.value()));
        let mut dg = Z3;
        let mut dg_inv = Z3;
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    dg[k][i][j] = gj[i][j].d1(k);
                    dg_inv[k][i][j] = ginv_j[i][j].d1(k);
                }
            }
        }

        let mut gamma = Z3;
        let mut dgamma = Z4;
        let mut d2gamma = Z5;
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    let jet = &gamma_j[k][i][j];
                    gamma[k][i][j] = jet.value();
                    for m in 0..DIM {
                        dgamma[k][i][j][m] = jet.d1(m);
                        for n in 0..DIM {
                            d2gamma[k][i][j][m][n] = jet.partial_axes(&[m, n]).expect("order 2");
                        }
                    }
                }
            }
        }

        let riemann = riemann_from(&gamma, &dgamma);
        let mut d_riemann = Z5;
        for n in 0..DIM {
            for k in 0..DIM {
                for l in 0..DIM {
                    for i in 0..DIM {
                        for j in 0..DIM {
                            let mut v = d2gamma[k][j][l][i][n] - d2gamma[k][i][l][j][n];
                            for m in 0..DIM {
                                v += dgamma[k][i][m][n] * gamma[m][j][l] + gamma[k][i][m] * dgamma[m][j][l][n]
                                    - dgamma[k][j][m][n] * gamma[m][i][l]
                                    - gamma[k][j][m] * dgamma[m][i][l][n];
                            }
                            d_riemann[n][k][l][i][j] = v;
                        }
                    }
                }
            }
        }

        let ricci = ricci_from(&riemann);
        let mut d_ric = Z3;
        for n in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    d_ric[n][i][j] = (0..DIM).map(|k| d_riemann[n][k][i][k][j]).sum();
                }
            }
        }
        let scalar = scalar_curvature(&ricci, &g_inv);
        let mut ds = [0.0; DIM];
        for (n, d) in ds.iter_mut().enumerate() {
            for i in 0..DIM {
                for j in 0..DIM {
                    *d += dg_inv[n][i][j] * ricci[i][j] + g_inv[i][j] * d_ric[n][i][j];
                }
            }
        }
        let nabla_ricci = covariant_derivative_sym2(&ricci, &d_ric, &gamma);

        let t = energy_momentum(&ricci, scalar, &g);
        let mut dt = Z3;
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    dt[k][i][j] = d_ric[k][i][j] - 0.5 * (ds[k] * g[i][j] + scalar * dg[k][i][j]);
                }
            }
        }
        let nabla_t = covariant_derivative_sym2(&t, &dt, &gamma);

        let mut nabla_riemann = Z5;
        for m in 0..DIM {
            for k in 0..DIM {
                for l in 0..DIM {
                    for i in 0..DIM {
                        for j in 0..DIM {
                            let mut v = d_riemann[m][k][l][i][j];
                            for n in 0..DIM {
                                v += gamma[k][m][n] * riemann[n][l][i][j]
                                    - gamma[n][m][l] * riemann[k][n][i][j]
                                    - gamma[n][m][i] * riemann[k][l][n][j]
                                    - gamma[n][m][j] * riemann[k][l][i][n];
                            }
                            nabla_riemann[m][k][l][i][j] = v;
                        }
                    }
                }
            }
        }

        // P_{lijk} = g_{lm} R^m_{ijk} − (1/3)(g_{lj} R_{ik} − g_{lk} R_{ij}) and its
        // coordinate derivative by the product rule
        let mut p = Z4;
        let mut dp = Z5;
        for l in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    for k in 0..DIM {
                        let low: f64 = (0..DIM).map(|m| g[l][m] * riemann[m][i][j][k]).sum();
                        p[l][i][j][k] = low - (g[l][j] * ricci[i][k] - g[l][k] * ricci[i][j]) / 3.0;
                        for n in 0..DIM {
                            let dlow: f64 = (0..DIM).map(|m| dg[n][l][m] * riemann[m][i][j][k] + g[l][m] * d_riemann[n][m][i][j][k]).sum();
                            let dcorr =
                                dg[n][l][j] * ricci[i][k] + g[l][j] * d_ric[n][i][k] - dg[n][l][k] * ricci[i][j] - g[l][k] * d_ric[n][i][j];
                            dp[n][l][i][j][k] = dlow - dcorr / 3.0;
                        }
                    }
                }
            }
        }
        let mut nabla_p = Z5;
        for m in 0..DIM {
            for l in 0..DIM {
                for i in 0..DIM {
                    for j in 0..DIM {
                        for k in 0..DIM {
                            let mut v = dp[m][l][i][j][k];
                            for n in 0..DIM {
                                v -= gamma[n][m][l] * p[n][i][j][k]
                                    + gamma[n][m][i] * p[l][n][j][k]
                                    + gamma[n][m][j] * p[l][i][n][k]
                                    + gamma[n][m][k] * p[l][i][j][n];
                            }
                            nabla_p[m][l][i][j][k] = v;
                        }
                    }
                }
            }
        }
        let mut dstar_p_direct = Z3;
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    let mut v = 0.0;
                    for l in 0..DIM {
                        for m in 0..DIM {
                            v -= g_inv[l][m] * nabla_p[m][l][i][j][k];
                        }
                    }
                    dstar_p_direct[i][j][k] = v;
                }
            }
        }
        let dstar_p_from_ricci = d_ricci(&nabla_ricci).map(|a| a.map(|b| b.map(|x| -2.0 / 3.0 * x)));

        Ok(PointGeometry {
            point,
            g,
            g_inv,
            dg,
            gamma,
            dgamma,
            d2gamma,
            riemann,
            d_riemann,
            nabla_riemann,
            ricci,
            d_ricci: d_ric,
            nabla_ricci,
            scalar,
            ds,
            t,
            nabla_t,
            p,
            nabla_p,
            dstar_p_direct,
            dstar_p_from_ricci,
        })
    }

    pub fn frame(&self) -> Result<Frame, FrameError> {
        Frame::new(&self.g)
    }

    pub fn residuals(&self) -> ResidualSet {
        ResidualSet::new(&self.nabla_t, &self.nabla_ricci, &self.ds, &self.g)
    }

    pub fn identity_residuals(&self) -> IdentityResiduals {
        let nr = &self.nabla_riemann;
        let mut bianchi = Z5;
        for k in 0..DIM {
            for l in 0..DIM {
                for i in 0..DIM {
                    for j in 0..DIM {
                        for m in 0..DIM {
                            bianchi[k][l][i][j][m] = nr[m][k][l][i][j] + nr[i][k][l][j][m] + nr[j][k][l][m][i];
                        }
                    }
                }
            }
        }
        let nric = &self.nabla_ricci;
        let mut yang_mills = Z3;
        for l in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    let div: f64 = (0..DIM).map(|k| nr[k][k][l][i][j]).sum();
                    yang_mills[l][i][j] = div + nric[j][l][i] - nric[i][l][j];
                }
            }
        }
        let mut contracted = [0.0; DIM];
        for (i, c) in contracted.iter_mut().enumerate() {
            let mut v = 0.0;
            for k in 0..DIM {
                for j in 0..DIM {
                    v += self.g_inv[k][j] * nric[j][k][i];
                }
            }
            *c = 2.0 * v - self.ds[i];
        }
        let mut dstar_p = Z3;
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    dstar_p[i][j][k] = self.dstar_p_direct[i][j][k] - self.dstar_p_from_ricci[i][j][k];
                }
            }
        }
        IdentityResiduals { bianchi, yang_mills, contracted, conservation: conservation_check(&self.nabla_t, &self.g_inv), dstar_p }
    }

    pub fn identity_norms(&self) -> Result<IdentityNorms, FrameError> {
        let f = self.frame()?;
        let id = self.identity_residuals();
        let mixed5 = [Slot::Upper, Slot::Lower, Slot::Lower, Slot::Lower, Slot::Lower];
        let nabla_r = [Slot::Lower, Slot::Upper, Slot::Lower, Slot::Lower, Slot::Lower];
        Ok(IdentityNorms {
            bianchi: f.norm(flat5(&id.bianchi), &mixed5),
            yang_mills: f.norm_lower(flat3(&id.yang_mills)),
            contracted: f.norm_lower(&id.contracted),
            conservation: f.norm_lower(&id.conservation),
            dstar_p: f.norm_lower(flat3(&id.dstar_p)),
            nabla_riemann: f.norm(flat5(&self.nabla_riemann), &nabla_r),
            nabla_ricci: f.norm_lower(flat3(&self.nabla_ricci)),
        })
    }

    /// Frame norm of `∇T`.
    pub fn nabla_t_norm(&self) -> Result<f64, FrameError> {
        Ok(self.frame()?.norm_lower(flat3(&self.nabla_t)))
    }
}
