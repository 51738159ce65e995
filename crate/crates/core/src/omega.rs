//! Pointwise irreducible splitting of `Ω(M)` and the class verdict.
//!
//! `Ω(M)` is the fiber of 3-tensors `Ω_{kij}` symmetric in `(i, j)` whose
//! metric trace over the first pair vanishes, `u_j = g^{ki} Ω_{kij} = 0`.
//! It is 36-dimensional and splits as
//!
//! - `π₃(Ω)_{kij} = (1/18)(5 t_k g_{ij} − t_i g_{kj} − t_j g_{ik})` with `t_k = g^{ij} Ω_{kij}` (rank 4)
//! - `π₂(Ω)` = total symmetrisation of `Ω − π₃(Ω)` (rank 16)
//! - `π₁(Ω) = Ω − π₂(Ω) − π₃(Ω)` (rank 16)
//!
//! For `Ω = ∇T` the vanishing pattern of the three pieces is the class of
//! the Einstein equations at that point.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::{flat3, PointGeometry, ResidualSet, Vec4, T3};
use crate::frame::{Frame, FrameError};
use crate::jets::DIM;
use crate::linalg::Mat4;

pub const DEFAULT_TOL_REL: f64 = 1e-8;
pub const DEFAULT_TOL_FLOOR: f64 = 1e-12;
/// Relative bound on the trace vector for membership.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OmegaError {
    #[error("tensor is not symmetric in its last two slots: Ω[{k}][{i}][{j}] − Ω[{k}][{j}][{i}] = {gap}")]
    NotSymmetric { k: usize, i: usize, j: usize, gap: f64 },
    #[error(
        "tensor is not in Ω(M): the trace g^ki Ω_kij = {trace:?} has frame norm {norm} (bound {bound}); \
         for Ω = ∇Ric this trace is ½ ∂s by the contracted Bianchi identity, so ∇Ric is a member only when ds = 0"
    )]
    NotMember { trace: Vec4, norm: f64, bound: f64 },
    #[error(transparent)]
    Frame(#[from] FrameError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol_rel: f64,
    pub tol_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { tol_rel: DEFAULT_TOL_REL, tol_floor: DEFAULT_TOL_FLOOR }
    }
}

impl Tolerances {
    /// Absolute threshold below which a piece of a tensor of size `scale` is zero.
    pub fn threshold(&self, scale: f64) -> f64 {
        self.tol_rel * scale.max(self.tol_floor)
    }
}

/// A 3-tensor `Ω_{kij}` stored as `components[k][i][j]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaTensor {
    pub components: T3,
}

impl OmegaTensor {
    pub const ZERO: OmegaTensor = OmegaTensor { components: [[[0.0; DIM]; DIM]; DIM] };

    pub fn new(components: T3) -> Self {
        OmegaTensor { components }
    }

    pub fn from_flat(v: &[f64; 64]) -> Self {
        let mut c = [[[0.0; DIM]; DIM]; DIM];
        for (n, x) in v.iter().enumerate() {
            c[n / 16][(n / 4) % 4][n % 4] = *x;
        }
        OmegaTensor { components: c }
    }

    pub fn flat(&self) -> &[f64] {
        flat3(&self.components)
    }

    pub fn scale(&self, c: f64) -> Self {
        OmegaTensor { components: self.components.map(|a| a.map(|b| b.map(|x| c * x))) }
    }

    pub fn add(&self, o: &OmegaTensor) -> Self {
        let mut c = self.components;
        for (k, ck) in c.iter_mut().enumerate() {
            for (i, ci) in ck.iter_mut().enumerate() {
                for (j, x) in ci.iter_mut().enumerate() {
                    *x += o.components[k][i][j];
                }
            }
        }
        OmegaTensor { components: c }
    }

    pub fn sub(&self, o: &OmegaTensor) -> Self {
        self.add(&o.scale(-1.0))
    }

    pub fn check_symmetry(&self) -> Result<(), OmegaError> {
        let c = &self.components;
        let scale = 1.0 + self.flat().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        for k in 0..DIM {
            for i in 0..DIM {
                for j in i + 1..DIM {
                    let gap = c[k][i][j] - c[k][j][i];
                    if !(gap.abs() <= SYMMETRY_TOL * scale) {
                        return Err(OmegaError::NotSymmetric { k, i, j, gap });
                    }
                }
            }
        }
        Ok(())
    }

    /// `u_j = g^{ki} Ω_{kij}`
    pub fn membership_trace(&self, g_inv: &Mat4) -> Vec4 {
        let mut u = [0.0; DIM];
        for (j, uj) in u.iter_mut().enumerate() {
            for k in 0..DIM {
                for i in 0..DIM {
                    *uj += g_inv[k][i] * self.components[k][i][j];
                }
            }
        }
        u
    }

    /// `t_k = g^{ij} Ω_{kij}`
    pub fn free_trace(&self, g_inv: &Mat4) -> Vec4 {
        let mut t = [0.0; DIM];
        for (k, tk) in t.iter_mut().enumerate() {
            for i in 0..DIM {
                for j in 0..DIM {
                    *tk += g_inv[i][j] * self.components[k][i][j];
                }
            }
        }
        t
    }

    /// Orthogonal-complement correction onto the fiber: symmetrise in `(i, j)`
    /// and subtract `(1/5)(g_{ki} u_j + g_{kj} u_i)`.
    pub fn project_to_fiber(&self, g: &Mat4, g_inv: &Mat4) -> OmegaTensor {
        let mut c = [[[0.0; DIM]; DIM]; DIM];
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    c[k][i][j] = 0.5 * (self.components[k][i][j] + self.components[k][j][i]);
                }
            }
        }
        let s = OmegaTensor { components: c };
        let u = s.membership_trace(g_inv);
        for k in 0..DIM {
            for i in 0..DIM {
                for j in 0..DIM {
                    c[k][i][j] -= (g[k][i] * u[j] + g[k][j] * u[i]) / 5.0;
                }
            }
        }
        OmegaTensor { components: c }
    }
}

/// Trace vector `g^{ki} Ω_{kij}` after the structural symmetry check; the
/// caller decides membership against its tolerance (see [`check_membership`]).
pub fn validate_membership(omega: &OmegaTensor, g_inv: &Mat4) -> Result<Vec4, OmegaError> {
    omega.check_symmetry()?;
    Ok(omega.membership_trace(g_inv))
}

/// Membership under the frame norm: `‖u‖ ≤ MEMBERSHIP_TOL · (1 + ‖Ω‖)`.
pub fn check_membership(omega: &OmegaTensor, g: &Mat4, g_inv: &Mat4) -> Result<Vec4, OmegaError> {
    let trace = validate_membership(omega, g_inv)?;
    let frame = Frame::new(g)?;
    let norm = frame.norm_lower(&trace);
    let bound = MEMBERSHIP_TOL * (1.0 + frame.norm_lower(omega.flat()));
    if norm <= bound {
        Ok(trace)
    } else {
        Err(OmegaError::NotMember { trace, norm, bound })
    }
}

pub fn pi3(omega: &OmegaTensor, g: &Mat4, g_inv: &Mat4) -> OmegaTensor {
    let t = omega.free_trace(g_inv);
    let mut c = [[[0.0; DIM]; DIM]; DIM];
    for k in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                c[k][i][j] = (5.0 * t[k] * g[i][j] - t[i] * g[k][j] - t[j] * g[i][k]) / 18.0;
            }
        }
    }
    OmegaTensor { components: c }
}

/// `(1/3)(A_{kij} + A_{ijk} + A_{jki})`; for `A` symmetric in its last pair this is the full symmetrisation.
pub fn symmetrize(a: &OmegaTensor) -> OmegaTensor {
    let a = &a.components;
    let mut c = [[[0.0; DIM]; DIM]; DIM];
    for k in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                c[k][i][j] = (a[k][i][j] + a[i][j][k] + a[j][k][i]) / 3.0;
            }
        }
    }
    OmegaTensor { components: c }
}

/// Result of [`project`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub pi1: OmegaTensor,
    pub pi2: OmegaTensor,
    pub pi3: OmegaTensor,
    /// frame norms of `Ω`, `π₁`, `π₂`, `π₃`
    pub norm: f64,
    pub norms: [f64; 3],
    pub theta: Vec4,
    /// frame norm of `Ω − π₁ − π₂ − π₃`
    pub completeness: f64,
}

/// The three projections without membership or frame checks.
pub fn project_raw(omega: &OmegaTensor, g: &Mat4, g_inv: &Mat4) -> [OmegaTensor; 3] {
    let p3 = pi3(omega, g, g_inv);
    let p2 = symmetrize(&omega.sub(&p3));
    let p1 = omega.sub(&p2).sub(&p3);
    [p1, p2, p3]
}

pub fn project(omega: &OmegaTensor, g: &Mat4, g_inv: &Mat4) -> Result<Decomposition, OmegaError> {
    check_membership(omega, g, g_inv)?;
    decompose_unchecked(omega, g, g_inv)
}

fn decompose_unchecked(omega: &OmegaTensor, g: &Mat4, g_inv: &Mat4) -> Result<Decomposition, OmegaError> {
    let frame = Frame::new(g)?;
    let [pi1, pi2, pi3] = project_raw(omega, g, g_inv);
    let rest = omega.sub(&pi1).sub(&pi2).sub(&pi3);
    Ok(Decomposition {
        norm: frame.norm_lower(omega.flat()),
        norms: [pi1, pi2, pi3].map(|p| frame.norm_lower(p.flat())),
        theta: omega.free_trace(g_inv),
        completeness: frame.norm_lower(rest.flat()),
        pi1,
        pi2,
        pi3,
    })
}

/// `⟨A, B⟩ = g^{kk'} g^{ii'} g^{jj'} A_{kij} B_{k'i'j'}`; indefinite.
pub fn invariant_pairing(a: &OmegaTensor, b: &OmegaTensor, g_inv: &Mat4) -> f64 {
    let mut raised = [[[0.0; DIM]; DIM]; DIM];
    for k in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                let mut v = 0.0;
                for kk in 0..DIM {
                    for ii in 0..DIM {
                        for jj in 0..DIM {
                            v += g_inv[k][kk] * g_inv[i][ii] * g_inv[j][jj] * b.components[kk][ii][jj];
                        }
                    }
                }
                raised[k][i][j] = v;
            }
        }
    }
    flat3(&a.components).iter().zip(flat3(&raised)).map(|(x, y)| x * y).sum()
}

/// Class label from the set of nonzero projections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ClassLabel {
    Parallel,
    O1,
    O2,
    O3,
    O12,
    O13,
    O23,
    Generic,
}

impl ClassLabel {
    pub fn from_nonzero(nonzero: [bool; 3]) -> ClassLabel {
        match nonzero {
            [false, false, false] => ClassLabel::Parallel,
            [true, false, false] => ClassLabel::O1,
            [false, true, false] => ClassLabel::O2,
            [false, false, true] => ClassLabel::O3,
            [true, true, false] => ClassLabel::O12,
            [true, false, true] => ClassLabel::O13,
            [false, true, true] => ClassLabel::O23,
            [true, true, true] => ClassLabel::Generic,
        }
    }

    pub fn nonzero(self) -> [bool; 3] {
        match self {
            ClassLabel::Parallel => [false, false, false],
            ClassLabel::O1 => [true, false, false],
            ClassLabel::O2 => [false, true, false],
            ClassLabel::O3 => [false, false, true],
            ClassLabel::O12 => [true, true, false],
            ClassLabel::O13 => [true, false, true],
            ClassLabel::O23 => [false, true, true],
            ClassLabel::Generic => [true, true, true],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::Parallel => "PARALLEL",
            ClassLabel::O1 => "O1",
            ClassLabel::O2 => "O2",
            ClassLabel::O3 => "O3",
            ClassLabel::O12 => "O12",
            ClassLabel::O13 => "O13",
            ClassLabel::O23 => "O23",
            ClassLabel::Generic => "GENERIC",
        }
    }

    /// Region label: a class holds on the region only if it holds at every point.
    pub fn aggregate<I: IntoIterator<Item = ClassLabel>>(labels: I) -> ClassLabel {
        let mut nz = [false; 3];
        for l in labels {
            for (a, b) in nz.iter_mut().zip(l.nonzero()) {
                *a |= b;
            }
        }
        ClassLabel::from_nonzero(nz)
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Note attached to a verdict when the energy-momentum tensor itself vanishes.
pub const VACUUM_NOTE: &str = "T ≡ 0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassVerdict {
    pub label: ClassLabel,
    pub nabla_t_norm: f64,
    /// `‖πₐ‖ / ‖∇T‖`, zero when `∇T` is below the floor
    pub relative_norms: [f64; 3],
    /// absolute cut used for the projections
    pub threshold: f64,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Verdict for an arbitrary fiber member.
pub fn classify_tensor(omega: &OmegaTensor, g: &Mat4, g_inv: &Mat4, tol: &Tolerances) -> Result<ClassVerdict, OmegaError> {
    let d = decompose_unchecked(omega, g, g_inv)?;
    let threshold = tol.threshold(d.norm);
    let parallel = d.norm <= tol.tol_floor;
    let nonzero = if parallel { [false; 3] } else { d.norms.map(|n| n > threshold) };
    let relative_norms = if parallel { [0.0; 3] } else { d.norms.map(|n| n / d.norm) };
    Ok(ClassVerdict {
        label: ClassLabel::from_nonzero(nonzero),
        nabla_t_norm: d.norm,
        relative_norms,
        threshold,
        tolerances: *tol,
        note: None,
    })
}

/// Verdict for `∇T` at one point.
pub fn classify(geometry: &PointGeometry, tol: &Tolerances) -> Result<ClassVerdict, OmegaError> {
    let mut v = classify_tensor(&OmegaTensor::new(geometry.nabla_t), &geometry.g, &geometry.g_inv, tol)?;
    if t_vanishes(geometry, tol)? {
        v.note = Some(VACUUM_NOTE.to_string());
    }
    Ok(v)
}

pub fn t_vanishes(geometry: &PointGeometry, tol: &Tolerances) -> Result<bool, FrameError> {
    let f = Frame::new(&geometry.g)?;
    Ok(f.norm_lower(crate::curvature::flat2(&geometry.t)) <= tol.tol_floor)
}

/// The six equivalences between projection flags and residual conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// cyclic sum of `∇T` vanishes; `π₂ = π₃ = 0`
    Killing,
    /// `∇_k T_{ij} = ∇_i T_{kj}`; `π₁ = π₃ = 0`
    Codazzi,
    /// `∇Ric` of pure trace shape; `π₁ = π₂ = 0`
    TraceShape,
    /// `ds = 0`; `π₃ = 0`
    ConstantScalar,
    /// `d*W = 0`; `π₁ = 0`
    HarmonicWeyl,
    /// Ricci is a conformal Killing tensor; `π₂ = 0`
    ConformalKilling,
}

impl Condition {
    pub const ALL: [Condition; 6] = [
        Condition::Killing,
        Condition::Codazzi,
        Condition::TraceShape,
        Condition::ConstantScalar,
        Condition::HarmonicWeyl,
        Condition::ConformalKilling,
    ];

    /// Projections required to vanish.
    pub fn projections(self) -> &'static [usize] {
        match self {
            Condition::Killing => &[1, 2],
            Condition::Codazzi => &[0, 2],
            Condition::TraceShape => &[0, 1],
            Condition::ConstantScalar => &[2],
            Condition::HarmonicWeyl => &[0],
            Condition::ConformalKilling => &[1],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Condition::Killing => "killing",
            Condition::Codazzi => "codazzi",
            Condition::TraceShape => "trace_shape",
            Condition::ConstantScalar => "constant_scalar",
            Condition::HarmonicWeyl => "harmonic_weyl",
            Condition::ConformalKilling => "conformal_killing",
        }
    }
}

/// Frame norms of the residual tensors, keyed like [`Condition::ALL`].
pub fn residual_norms(res: &ResidualSet, frame: &Frame) -> [f64; 6] {
    [
        frame.norm_lower(flat3(&res.sym)),
        frame.norm_lower(flat3(&res.codazzi)),
        frame.norm_lower(flat3(&res.omega3)),
        frame.norm_lower(&res.ds),
        frame.norm_lower(flat3(&res.r23)),
        frame.norm_lower(flat3(&res.r13)),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equivalence {
    pub condition: Condition,
    /// largest of the projection norms the condition requires to vanish
    pub projection_norm: f64,
    pub residual_norm: f64,
    pub projection_holds: bool,
    pub residual_holds: bool,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub equivalences: Vec<Equivalence>,
}

impl CrossCheck {
    pub fn all_agree(&self) -> bool {
        self.equivalences.iter().all(|e| e.agree)
    }

    pub fn disagreements(&self) -> usize {
        self.equivalences.iter().filter(|e| !e.agree).count()
    }
}

/// Compare the projection-based and residual-based class conditions under the shared threshold.
pub fn cross_check(decomposition: &Decomposition, residuals: &ResidualSet, g: &Mat4, tol: &Tolerances) -> Result<CrossCheck, OmegaError> {
    let frame = Frame::new(g)?;
    let threshold = tol.threshold(decomposition.norm);
    let parallel = decomposition.norm <= tol.tol_floor;
    let rnorms = residual_norms(residuals, &frame);
    let equivalences = Condition::ALL
        .iter()
        .zip(rnorms)
        .map(|(&condition, residual_norm)| {
            let projection_norm = condition.projections().iter().map(|&a| decomposition.norms[a]).fold(0.0, f64::max);
            let (projection_holds, residual_holds) =
                if parallel { (true, residual_norm <= tol.tol_floor) } else { (projection_norm <= threshold, residual_norm <= threshold) };
            Equivalence {
                condition,
                projection_norm,
                residual_norm,
                projection_holds,
                residual_holds,
                agree: projection_holds == residual_holds,
            }
        })
        .collect();
    Ok(CrossCheck { equivalences })
}

/// Residuals for a synthetic `∇T`: `ds = −t(Ω)` and `∇Ric = Ω + ½ ds ⊗ g`.
pub fn synthetic_residuals(omega: &OmegaTensor, g: &Mat4, g_inv: &Mat4) -> ResidualSet {
    let t = omega.free_trace(g_inv);
    let ds = t.map(|x| -x);
    let mut nric = omega.components;
    for k in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                nric[k][i][j] += 0.5 * ds[k] * g[i][j];
            }
        }
    }
    ResidualSet::new(&omega.components, &nric, &ds, g)
}

/// Labels of the classes a region verdict contains, e.g. `{1, 2}` for `O12`.
pub fn summands(label: ClassLabel) -> BTreeSet<usize> {
    label.nonzero().iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i + 1).collect()
}
