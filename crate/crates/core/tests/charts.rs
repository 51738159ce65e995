//! Verdicts do not depend on the chart a metric is written in.

use einclass::curvature::{flat2, PointGeometry};
use einclass::metrics::{load_metric, SamplePlan};
use einclass::omega::{ClassLabel, Tolerances, VACUUM_NOTE};
use einclass::report::classify_region;

const ISOTROPIC_SCHWARZSCHILD: &str = "\
name = schwarzschild_isotropic
coords = t, x, y, z
param m = 1
g[0][0] = -((1 - m/(2*sqrt(x^2+y^2+z^2)))/(1 + m/(2*sqrt(x^2+y^2+z^2))))^2
g[1][1] = (1 + m/(2*sqrt(x^2+y^2+z^2)))^4
g[2][2] = (1 + m/(2*sqrt(x^2+y^2+z^2)))^4
g[3][3] = (1 + m/(2*sqrt(x^2+y^2+z^2)))^4
domain t = [-10, 10]
domain x = [3, 6]
domain y = [-2, 2]
domain z = [-2, 2]
";

const STATIC_DE_SITTER: &str = "\
name = de_sitter_static
coords = t, r, theta, phi
g[0][0] = -(1 - r^2)
g[1][1] = 1/(1 - r^2)
g[2][2] = r^2
g[3][3] = r^2*sin(theta)^2
domain t = [-5, 5]
domain r = [0.2, 0.8]
domain theta = [0.4, 2.7]
domain phi = [-3, 3]
";

#[test]
fn isotropic_schwarzschild_is_vacuum() {
    let spec = load_metric(ISOTROPIC_SCHWARZSCHILD).unwrap();
    let rep = classify_region(&spec, &SamplePlan::random(&spec, 30, 5), &Tolerances::default()).unwrap();
    assert_eq!(rep.aggregate, ClassLabel::Parallel);
    assert_eq!(rep.note.as_deref(), Some(VACUUM_NOTE));
    for p in &rep.points {
        let pg = PointGeometry::compute(&spec, &p.point).unwrap();
        assert!(pg.frame().unwrap().norm_lower(flat2(&pg.ricci)) < 1e-9);
    }
}

#[test]
fn static_de_sitter_matches_flat_slicing() {
    let spec = load_metric(STATIC_DE_SITTER).unwrap();
    let rep = classify_region(&spec, &SamplePlan::random(&spec, 30, 6), &Tolerances::default()).unwrap();
    assert_eq!(rep.aggregate, ClassLabel::Parallel);
    assert!(rep.note.is_none());
    for p in &rep.points {
        assert!((p.scalar - 12.0).abs() < 1e-8, "{}", p.scalar);
    }
}
