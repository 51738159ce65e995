//! Regenerates the tensor fixtures used by the CLI tests:
//!
//! ```text
//! cargo run -p einclass --example make_fixtures -- crates/core/fixtures
//! ```
//!
//! Fiber members are drawn from a null-space basis of the membership
//! constraints computed with nalgebra, independent of the library projectors.

use std::collections::BTreeMap;
use std::path::PathBuf;

use einclass::curvature::PointGeometry;
use einclass::linalg::inverse;
use einclass::metrics::catalog;
use einclass::omega::project_raw;
use einclass::report::TensorFixture;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fiber_member(g_inv: &[[f64; 4]; 4], rng: &mut ChaCha8Rng) -> Vec<f64> {
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
    let c = DMatrix::from_fn(rows.len(), 64, |r, col| rows[r][col]);
    let eig = SymmetricEigen::new(c.transpose() * &c);
    let mut v = DVector::<f64>::zeros(64);
    for i in (0..64).filter(|&i| eig.eigenvalues[i].abs() < 1e-9) {
        v += eig.eigenvectors.column(i) * rng.gen_range(-1.0..1.0);
    }
    v.iter().copied().collect()
}

fn write(dir: &std::path::Path, name: &str, f: &TensorFixture) {
    let text = serde_json::to_string_pretty(f).unwrap() + "\n";
    std::fs::write(dir.join(name), text).unwrap();
    println!("wrote {name}");
}

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "crates/core/fixtures".into()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let no_params = BTreeMap::new();

    write(
        &dir,
        "zero.json",
        &TensorFixture { metric: "minkowski".into(), params: no_params.clone(), point: [0.0; 4], omega: vec![0.0; 64] },
    );

    let point = [0.0, 6.0, 1.2, 0.5];
    let spec = catalog("schwarzschild", &no_params).unwrap();
    let g = spec.values(&point).unwrap();
    let g_inv = inverse(&g).unwrap();
    let omega = fiber_member(&g_inv, &mut rng);
    write(
        &dir,
        "random_member.json",
        &TensorFixture { metric: "schwarzschild".into(), params: no_params.clone(), point, omega: omega.clone() },
    );

    let t = einclass::omega::OmegaTensor::from_flat(&omega.clone().try_into().unwrap());
    let [_, pi2, _] = project_raw(&t, &g, &g_inv);
    write(
        &dir,
        "codazzi_slice.json",
        &TensorFixture { metric: "schwarzschild".into(), params: no_params.clone(), point, omega: pi2.flat().to_vec() },
    );

    let mut skew = omega;
    skew[idx_of(0, 1, 2)] += 0.5;
    write(&dir, "not_symmetric.json", &TensorFixture { metric: "schwarzschild".into(), params: no_params.clone(), point, omega: skew });

    // ∇Ric of a metric with non-constant scalar curvature fails the trace condition
    let point = [0.1, 0.3, -0.2, 0.4];
    let spec = catalog("conformally_flat", &no_params).unwrap();
    let pg = PointGeometry::compute(&spec, &point).unwrap();
    let omega = pg.nabla_ricci.iter().flatten().flatten().copied().collect();
    write(&dir, "nabla_ricci.json", &TensorFixture { metric: "conformally_flat".into(), params: no_params, point, omega });
}

fn idx_of(k: usize, i: usize, j: usize) -> usize {
    16 * k + 4 * i + j
}
