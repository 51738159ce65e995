#![allow(dead_code)]

use std::collections::BTreeMap;

use einclass::curvature::{Vec4, T3};
use einclass::frame::Frame;
use einclass::linalg::{inverse, Mat4};
use einclass::metrics::{catalog, MetricSpec, CATALOG_NAMES};
use einclass::omega::OmegaTensor;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn spec(name: &str, args: &[(&str, &str)]) -> MetricSpec {
    let args: BTreeMap<String, String> = args.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    catalog(name, &args).unwrap()
}

/// Every catalog entry with its default parameters.
pub fn catalog_specs() -> Vec<MetricSpec> {
    CATALOG_NAMES.iter().map(|n| spec(n, &[])).collect()
}

/// Catalog entries plus a few non-default parameter choices.
pub fn extended_specs() -> Vec<MetricSpec> {
    let mut v = catalog_specs();
    v.push(spec("conformally_flat", &[("phi", "log(1+0.1*x1)")]));
    v.push(spec("conformally_flat", &[("phi", "0.2*sin(x0)+0.1*x1*x3")]));
    v.push(spec("perturbed_minkowski", &[("eps", "0.1"), ("seed", "3")]));
    v.push(spec("sinyukov_warped", &[("f", "1+0.3*x0^2"), ("spatial", "1+0.1*x1^2,0,0.05*x3,1,0,1+0.1*x2")]));
    v.push(spec("flrw", &[("a", "exp(0.3*t)")]));
    v.push(spec("schwarzschild", &[("m", "2")]));
    v
}

/// `g = Lᵀ η L` with `L` a random perturbation of the identity; `g_00 < 0`.
pub fn random_lorentz(rng: &mut ChaCha8Rng) -> (Mat4, Mat4) {
    loop {
        let l = DMatrix::<f64>::from_fn(4, 4, |i, j| f64::from(u8::from(i == j)) + rng.gen_range(-0.4..0.4));
        let eta = DMatrix::<f64>::from_diagonal(&DVector::from_vec(vec![-1.0, 1.0, 1.0, 1.0]));
        let g = l.transpose() * eta * &l;
        let g: Mat4 = std::array::from_fn(|i| std::array::from_fn(|j| g[(i, j)]));
        if g[0][0] < -0.2 && Frame::new(&g).is_ok() {
            if let Some(gi) = inverse(&g) {
                return (g, gi);
            }
        }
    }
}

/// Linear constraints cutting the fiber out of all 3-tensors: symmetry in the
/// last pair and `g^{ki} Ω_{kij} = 0`.
pub fn fiber_constraints(g_inv: &Mat4) -> DMatrix<f64> {
    let idx = |k: usize, i: usize, j: usize| 16 * k + 4 * i + j;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for k in 0..4 {
        for i in 0..4 {
            for j in i + 1..4 {
                let mut r = vec![0.0; 64];
                r[idx(k, i, j)] = 1.0;
                r[idx(k, j, i)] = -1.0;
                rows.push(r);
            }
        }
    }
    for j in 0..4 {
        let mut r = vec![0.0; 64];
        for k in 0..4 {
            for i in 0..4 {
                r[idx(k, i, j)] += g_inv[k][i];
            }
        }
        rows.push(r);
    }
    DMatrix::from_fn(rows.len(), 64, |r, c| rows[r][c])
}

/// Orthonormal basis of the fiber as the columns of a 64 × d matrix.
pub fn fiber_basis(g_inv: &Mat4) -> DMatrix<f64> {
    let c = fiber_constraints(g_inv);
    let eig = SymmetricEigen::new(c.transpose() * &c);
    let cols: Vec<DVector<f64>> =
        (0..64).filter(|&i| eig.eigenvalues[i].abs() < 1e-9).map(|i| eig.eigenvectors.column(i).into_owned()).collect();
    DMatrix::from_columns(&cols)
}

pub fn tensor_from(v: &[f64]) -> OmegaTensor {
    let a: [f64; 64] = v.try_into().unwrap();
    OmegaTensor::from_flat(&a)
}

pub fn random_member(rng: &mut ChaCha8Rng, basis: &DMatrix<f64>) -> OmegaTensor {
    let c = DVector::<f64>::from_fn(basis.ncols(), |_, _| rng.gen_range(-1.0..1.0));
    tensor_from((basis * c).as_slice())
}

pub fn random_point(rng: &mut ChaCha8Rng, s: &MetricSpec) -> Vec4 {
    std::array::from_fn(|k| {
        let iv = s.domain[k];
        let pad = 0.01 * iv.width();
        rng.gen_range(iv.lo + pad..=iv.hi - pad)
    })
}

/// Central-difference weights `(offset, weight)` in units of `h`.
fn stencil(order: usize) -> &'static [(f64, f64)] {
    match order {
        1 => &[(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)],
        2 => &[(-2.0, -1.0 / 12.0), (-1.0, 16.0 / 12.0), (0.0, -30.0 / 12.0), (1.0, 16.0 / 12.0), (2.0, -1.0 / 12.0)],
        3 => &[(-3.0, 1.0 / 8.0), (-2.0, -1.0), (-1.0, 13.0 / 8.0), (1.0, -13.0 / 8.0), (2.0, 1.0), (3.0, -1.0 / 8.0)],
        _ => unreachable!(),
    }
}

/// `∂^α g_{ij}` by tensor products of one-dimensional fourth-order central stencils.
pub fn fd_partial(s: &MetricSpec, point: &Vec4, alpha: [u8; 4], h: f64) -> Mat4 {
    let axes: Vec<(usize, usize)> = (0..4).filter(|&a| alpha[a] > 0).map(|a| (a, alpha[a] as usize)).collect();
    let mut acc = [[0.0; 4]; 4];
    let mut offsets = vec![0usize; axes.len()];
    loop {
        let mut x = *point;
        let mut w = 1.0;
        for (n, &(axis, ord)) in axes.iter().enumerate() {
            let (o, wt) = stencil(ord)[offsets[n]];
            x[axis] += o * h;
            w *= wt / h.powi(ord as i32);
        }
        let gv = s.values(&x).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                acc[i][j] += w * gv[i][j];
            }
        }
        let mut n = 0;
        loop {
            if n == axes.len() {
                return acc;
            }
            offsets[n] += 1;
            if offsets[n] < stencil(axes[n].1).len() {
                break;
            }
            offsets[n] = 0;
            n += 1;
        }
    }
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn t3_sub(a: &T3, b: &T3) -> T3 {
    std::array::from_fn(|k| std::array::from_fn(|i| std::array::from_fn(|j| a[k][i][j] - b[k][i][j])))
}
