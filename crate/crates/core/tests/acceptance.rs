#![allow(clippy::needless_range_loop)]

//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, Output};
use std::time::Instant;

use einclass::curvature::{flat2, flat3, flat4, PointGeometry};
use einclass::frame::Frame;
use einclass::geodesics::{integrate, quadratic_integral_drift, schwarzschild_circular, IntegralField};
use einclass::jets::MultiIndex;
use einclass::metrics::{MetricSpec, SamplePlan};
use einclass::omega::{
    classify_tensor, cross_check, project, project_raw, synthetic_residuals, ClassLabel, OmegaTensor, Tolerances, VACUUM_NOTE,
};
use einclass::report::{
    analyze_point, classify_region, ClassificationReport, ComponentsDump, DecomposeReport, GeodesicReport, ReportError,
};
use nalgebra::DMatrix;

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn identity_suite() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for (si, s) in catalog_specs().iter().enumerate() {
        let mut r = rng(100 + si as u64);
        for _ in 0..20 {
            let p = random_point(&mut r, s);
            let pg = PointGeometry::compute(s, &p).map_err(|e| format!("{}: {e}", s.name))?;
            let norms = pg.identity_norms().map_err(|e| e.to_string())?;
            let bound = 1e-9 * (1.0 + norms.nabla_riemann);
            for (what, v) in [
                ("bianchi", norms.bianchi),
                ("yang_mills", norms.yang_mills),
                ("contracted", norms.contracted),
                ("conservation", norms.conservation),
            ] {
                ensure(v < bound, || format!("{} at {p:?}: {what} {v:e} ≥ {bound:e}", s.name))?;
                worst = worst.max(v / bound);
            }
            let bound_t = 1e-9 * (1.0 + pg.nabla_t_norm().map_err(|e| e.to_string())?);
            ensure(norms.conservation < bound_t, || format!("{} at {p:?}: conservation {:e} ≥ {bound_t:e}", s.name, norms.conservation))?;
            n += 1;
        }
    }
    Ok(format!("{n} points, worst residual/bound {worst:.2e}"))
}

fn jet_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (si, s) in extended_specs().iter().enumerate() {
        let mut r = rng(200 + si as u64);
        for _ in 0..4 {
            let p = random_point(&mut r, s);
            let jets = s.metric_jets(&p).map_err(|e| e.to_string())?;
            for m in MultiIndex::all().iter().filter(|m| m.order() >= 1) {
                let h = if m.order() == 3 { 1e-2 } else { 1e-3 };
                let fd = fd_partial(s, &p, m.0, h);
                for i in 0..4 {
                    for j in i..4 {
                        let jet = jets[i][j].partial(m).unwrap();
                        let err = (fd[i][j] - jet).abs() / jet.abs().max(1.0);
                        ensure(err < 1e-5, || format!("{} g[{i}][{j}] ∂^{:?} at {p:?}: jet {jet}, fd {}", s.name, m.0, fd[i][j]))?;
                        worst = worst.max(err);
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} partials, worst relative error {worst:.2e}"))
}

fn projector_matrix(basis: &DMatrix<f64>, g: &[[f64; 4]; 4], gi: &[[f64; 4]; 4], a: usize) -> DMatrix<f64> {
    let d = basis.ncols();
    let mut images = DMatrix::<f64>::zeros(64, d);
    for c in 0..d {
        let t = tensor_from(basis.column(c).as_slice());
        let p = &project_raw(&t, g, gi)[a];
        for (r, x) in p.flat().iter().enumerate() {
            images[(r, c)] = *x;
        }
    }
    basis.transpose() * images
}

fn rank(m: &DMatrix<f64>) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.max();
    sv.iter().filter(|&&x| x > 1e-8 * top).count()
}

fn projector_suite() -> Outcome {
    let mut r = rng(300);
    let mut members = 0;
    let mut worst_alg: f64 = 0.0;
    let mut worst_pair: f64 = 0.0;
    for _ in 0..20 {
        let (g, gi) = random_lorentz(&mut r);
        let frame = Frame::new(&g).map_err(|e| e.to_string())?;
        let basis = fiber_basis(&gi);
        ensure(basis.ncols() == 36, || format!("fiber dimension {}", basis.ncols()))?;
        let m: Vec<DMatrix<f64>> = (0..3).map(|a| projector_matrix(&basis, &g, &gi, a)).collect();
        let ranks: Vec<usize> = m.iter().map(rank).collect();
        ensure(ranks == [16, 16, 4], || format!("ranks {ranks:?}"))?;
        let id = DMatrix::<f64>::identity(36, 36);
        worst_alg = worst_alg.max((&m[0] + &m[1] + &m[2] - &id).amax());
        for a in 0..3 {
            for b in 0..3 {
                let prod = &m[a] * &m[b];
                let want = if a == b { m[a].clone() } else { DMatrix::zeros(36, 36) };
                worst_alg = worst_alg.max((prod - want).amax());
            }
        }
        for _ in 0..50 {
            let om = random_member(&mut r, &basis);
            let other = random_member(&mut r, &basis);
            let n = frame.norm_lower(om.flat());
            let n2 = frame.norm_lower(other.flat());
            let p = project_raw(&om, &g, &gi);
            let q = project_raw(&other, &g, &gi);
            let rest = om.sub(&p[0]).sub(&p[1]).sub(&p[2]);
            worst_alg = worst_alg.max(frame.norm_lower(rest.flat()) / n);
            for a in 0..3 {
                let again = project_raw(&p[a], &g, &gi);
                for (b, pb) in again.iter().enumerate() {
                    let err = if a == b { pb.sub(&p[a]) } else { *pb };
                    worst_alg = worst_alg.max(frame.norm_lower(err.flat()) / n);
                }
                for b in 0..3 {
                    if a != b {
                        let pair = einclass::omega::invariant_pairing(&p[a], &q[b], &gi);
                        worst_pair = worst_pair.max(pair.abs() / (n * n2));
                    }
                }
            }
            members += 1;
        }
    }
    ensure(worst_alg <= 1e-10, || format!("projector algebra residual {worst_alg:e}"))?;
    ensure(worst_pair <= 1e-9, || format!("cross pairing {worst_pair:e}"))?;
    Ok(format!("{members} members, ranks (16, 16, 4), algebra {worst_alg:.2e}, pairing {worst_pair:.2e}"))
}

fn equivalence_suite() -> Outcome {
    let t = tol();
    let mut points = 0;
    let mut disagreements = 0;
    for (si, s) in extended_specs().iter().enumerate() {
        let mut r = rng(400 + si as u64);
        for _ in 0..20 {
            let p = random_point(&mut r, s);
            match analyze_point(s, &p, &t) {
                Ok(a) => disagreements += a.cross_check.disagreements(),
                Err(ReportError::Identity { detail, .. }) => return Err(format!("{} at {p:?}: {detail}", s.name)),
                Err(e) => return Err(format!("{} at {p:?}: {e}", s.name)),
            }
            points += 1;
        }
    }
    let mut r = rng(401);
    let mut slices = 0;
    for _ in 0..20 {
        let (g, gi) = random_lorentz(&mut r);
        let basis = fiber_basis(&gi);
        let parts = project_raw(&random_member(&mut r, &basis), &g, &gi);
        for mask in 0..8usize {
            let present = [mask & 1 != 0, mask & 2 != 0, mask & 4 != 0];
            let mut om = OmegaTensor::ZERO;
            for a in 0..3 {
                if present[a] {
                    om = om.add(&parts[a].scale(einclass_scale(&mut r)));
                }
            }
            let d = project(&om, &g, &gi).map_err(|e| e.to_string())?;
            let cc = cross_check(&d, &synthetic_residuals(&om, &g, &gi), &g, &t).map_err(|e| e.to_string())?;
            disagreements += cc.disagreements();
            for e in &cc.equivalences {
                let expect = e.condition.projections().iter().all(|&a| !present[a]);
                ensure(e.residual_holds == expect, || format!("{:?} on slice {present:?}: residual {:e}", e.condition, e.residual_norm))?;
            }
            let label = classify_tensor(&om, &g, &gi, &t).map_err(|e| e.to_string())?.label;
            ensure(label == ClassLabel::from_nonzero(present), || format!("slice {present:?} classified {label}"))?;
            slices += 1;
        }
    }
    ensure(disagreements == 0, || format!("{disagreements} disagreements"))?;
    Ok(format!("{points} catalog points, {slices} synthetic slices, {} pairings, 0 disagreements", 6 * (points + slices)))
}

fn einclass_scale(r: &mut rand_chacha::ChaCha8Rng) -> f64 {
    use rand::Rng;
    r.gen_range(0.5..2.0)
}

fn grid(s: &MetricSpec) -> SamplePlan {
    SamplePlan::default_grid(s, [3, 3, 3, 3])
}

fn named_verdicts() -> Outcome {
    let t = tol();
    let mink = spec("minkowski", &[]);
    let rep = classify_region(&mink, &grid(&mink), &t).map_err(|e| e.to_string())?;
    ensure(rep.aggregate == ClassLabel::Parallel, || format!("minkowski {}", rep.aggregate))?;
    for p in &rep.points {
        let all = [p.scalar, p.nabla_t_norm].into_iter().chain(p.projection_norms);
        ensure(all.into_iter().all(|x| x == 0.0), || format!("minkowski nonzero at {:?}", p.point))?;
    }

    let ds = spec("de_sitter_flat", &[("H", "1")]);
    let rep = classify_region(&ds, &grid(&ds), &t).map_err(|e| e.to_string())?;
    ensure(rep.aggregate == ClassLabel::Parallel, || format!("de_sitter_flat {}", rep.aggregate))?;
    let mut ric_err: f64 = 0.0;
    for p in &rep.points {
        ensure((p.scalar - 12.0).abs() <= 1e-8, || format!("de_sitter_flat s = {}", p.scalar))?;
        let pg = PointGeometry::compute(&ds, &p.point).map_err(|e| e.to_string())?;
        let diff: [[f64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| pg.ricci[i][j] - 3.0 * pg.g[i][j]));
        ric_err = ric_err.max(pg.frame().unwrap().norm_lower(flat2(&diff)));
    }
    ensure(ric_err <= 1e-9, || format!("de_sitter_flat |Ric − 3g| = {ric_err:e}"))?;

    let sch = spec("schwarzschild", &[("m", "1")]);
    let rep = classify_region(&sch, &grid(&sch), &t).map_err(|e| e.to_string())?;
    ensure(rep.aggregate == ClassLabel::Parallel, || format!("schwarzschild {}", rep.aggregate))?;
    ensure(rep.note.as_deref() == Some(VACUUM_NOTE), || format!("schwarzschild note {:?}", rep.note))?;
    let mut ric_max: f64 = 0.0;
    for p in &rep.points {
        let pg = PointGeometry::compute(&sch, &p.point).map_err(|e| e.to_string())?;
        ric_max = ric_max.max(pg.frame().unwrap().norm_lower(flat2(&pg.ricci)));
    }
    ensure(ric_max < 1e-9, || format!("schwarzschild |Ric| = {ric_max:e}"))?;

    let cf = spec("conformally_flat", &[]);
    let rep = classify_region(&cf, &grid(&cf), &t).map_err(|e| e.to_string())?;
    ensure(rep.aggregate == ClassLabel::O23, || format!("conformally_flat {}", rep.aggregate))?;
    let (mut p1, mut p23): (f64, f64) = (0.0, f64::INFINITY);
    for p in &rep.points {
        ensure(p.verdict == ClassLabel::O23, || format!("conformally_flat {} at {:?}", p.verdict, p.point))?;
        let [a, b, c] = p.projection_norms.map(|x| x / p.nabla_t_norm);
        p1 = p1.max(a);
        p23 = p23.min(b.min(c));
    }
    ensure(p1 < 1e-8 && p23 > 1e-3, || format!("conformally_flat |π1|/|∇T| ≤ {p1:e}, min |π2|,|π3| ratio {p23:e}"))?;

    let pm = spec("perturbed_minkowski", &[("eps", "0.01")]);
    let rep = classify_region(&pm, &grid(&pm), &t).map_err(|e| e.to_string())?;
    ensure(rep.aggregate == ClassLabel::Generic, || format!("perturbed_minkowski {}", rep.aggregate))?;
    Ok(format!(
        "minkowski PARALLEL, de_sitter_flat PARALLEL (|Ric−3g| {ric_err:.1e}), schwarzschild PARALLEL {VACUUM_NOTE} (|Ric| {ric_max:.1e}), \
         conformally_flat O23 (π1 ratio {p1:.1e}, π2/π3 ratio ≥ {p23:.2e}), perturbed_minkowski GENERIC"
    ))
}

fn projective_weyl_checks() -> Outcome {
    let mut worst: f64 = 0.0;
    for (si, s) in extended_specs().iter().enumerate() {
        let mut r = rng(600 + si as u64);
        for _ in 0..20 {
            let p = random_point(&mut r, s);
            let pg = PointGeometry::compute(s, &p).map_err(|e| e.to_string())?;
            let frame = pg.frame().unwrap();
            let n = pg.identity_norms().unwrap();
            let bound = 1e-9 * (1.0 + n.nabla_ricci);
            // −(2/3) d Ric with (d Ric)_{ijk} = ∇_j R_{ik} − ∇_k R_{ij}
            let nr = &pg.nabla_ricci;
            let from_ric: einclass::curvature::T3 =
                std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| -2.0 / 3.0 * (nr[j][i][k] - nr[k][i][j]))));
            let gap = frame.norm_lower(flat3(&t3_sub(&pg.dstar_p_direct, &from_ric)));
            ensure(gap <= bound, || format!("{} at {p:?}: d*P gap {gap:e} > {bound:e}", s.name))?;
            ensure(n.dstar_p <= bound, || format!("{} at {p:?}: d*P routes {:e}", s.name, n.dstar_p))?;
            ensure(n.yang_mills <= bound, || format!("{} at {p:?}: Yang–Mills {:e} > {bound:e}", s.name, n.yang_mills))?;
            worst = worst.max(gap / bound).max(n.yang_mills / bound);
        }
    }
    let ds = spec("de_sitter_flat", &[]);
    let mut r = rng(650);
    let mut pmax: f64 = 0.0;
    for _ in 0..20 {
        let p = random_point(&mut r, &ds);
        let pg = PointGeometry::compute(&ds, &p).map_err(|e| e.to_string())?;
        pmax = pmax.max(pg.frame().unwrap().norm_lower(flat4(&pg.p)));
    }
    ensure(pmax <= 1e-9, || format!("de_sitter_flat |P| = {pmax:e}"))?;
    Ok(format!("worst d*P / Yang–Mills residual/bound {worst:.2e}, de_sitter_flat |P| ≤ {pmax:.1e}"))
}

/// Bound eccentric equatorial orbit with unit speed.
fn eccentric_orbit(h: f64, n: usize) -> Vec<einclass::geodesics::GeodesicState> {
    let s = spec("schwarzschild", &[]);
    let (x0, mut v0) = schwarzschild_circular(1.0, 20.0, 0.0, -10.0);
    v0[3] *= 0.9;
    // re-normalise so the orbit stays timelike with unit speed
    let g = s.values(&x0).unwrap();
    v0[0] = ((1.0 + g[3][3] * v0[3] * v0[3]) / -g[0][0]).sqrt();
    integrate(&s, x0, v0, h, n).unwrap()
}

fn eccentric_final(h: f64, s_end: f64) -> [f64; 8] {
    let last = *eccentric_orbit(h, (s_end / h).round() as usize).last().unwrap();
    std::array::from_fn(|i| if i < 4 { last.x[i] } else { last.v[i - 4] })
}

fn geodesic_suite() -> Outcome {
    let sch = spec("schwarzschild", &[]);
    let (x0, v0) = schwarzschild_circular(1.0, 10.0, 0.0, -3.0);
    let tr = integrate(&sch, x0, v0, 1e-3, 10_000).map_err(|e| e.to_string())?;
    let qg = quadratic_integral_drift(&sch, &tr, IntegralField::G).map_err(|e| e.to_string())?;
    ensure(qg.max_drift < 1e-8, || format!("Schwarzschild Q_g drift {:e}", qg.max_drift))?;
    let ecc = quadratic_integral_drift(&sch, &eccentric_orbit(1e-3, 10_000), IntegralField::G).map_err(|e| e.to_string())?;
    ensure(ecc.max_drift < 1e-8, || format!("eccentric Schwarzschild Q_g drift {:e}", ecc.max_drift))?;

    // observed order from successive differences of the h, h/2, h/4 solutions
    let runs: Vec<[f64; 8]> = [2.0, 1.0, 0.5, 0.25].iter().map(|&h| eccentric_final(h, 300.0)).collect();
    let diffs: Vec<f64> = runs.windows(2).map(|w| (0..8).map(|i| (w[0][i] - w[1][i]).powi(2)).sum::<f64>().sqrt()).collect();
    let rates: Vec<f64> = diffs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    ensure(rates.iter().all(|p| (3.7..=4.3).contains(p)), || format!("convergence exponents {rates:?} from differences {diffs:?}"))?;

    let es = spec("einstein_static", &[]);
    let x0 = [0.0, 1.2, 1.3, 0.0];
    let v0 = [1.0, 0.3, 0.2, 0.25];
    let tr = integrate(&es, x0, v0, 0.05, 200).map_err(|e| e.to_string())?;
    let es_g = quadratic_integral_drift(&es, &tr, IntegralField::G).map_err(|e| e.to_string())?;
    let es_r = quadratic_integral_drift(&es, &tr, IntegralField::Ric).map_err(|e| e.to_string())?;
    ensure(es_r.max_drift < 10.0 * es_g.max_drift, || format!("einstein_static Q_Ric {:e} vs Q_g {:e}", es_r.max_drift, es_g.max_drift))?;

    let pm = spec("perturbed_minkowski", &[("eps", "0.01")]);
    let tr = integrate(&pm, [0.0, -0.8, -0.5, 0.2], [1.0, 0.3, 0.2, -0.1], 1e-2, 500).map_err(|e| e.to_string())?;
    let pm_r = quadratic_integral_drift(&pm, &tr, IntegralField::Ric).map_err(|e| e.to_string())?;
    ensure(pm_r.max_drift > 1e-3, || format!("perturbed_minkowski Q_Ric drift {:e}", pm_r.max_drift))?;
    Ok(format!(
        "Q_g drift {:.2e} circular, {:.2e} eccentric; exponents {:.3}, {:.3}; einstein_static Q_Ric {:.2e} vs Q_g {:.2e}; perturbed_minkowski Q_Ric {:.2e}",
        qg.max_drift, ecc.max_drift, rates[0], rates[1], es_r.max_drift, es_g.max_drift, pm_r.max_drift
    ))
}

fn scale_invariance() -> Outcome {
    let t = tol();
    let mut compared = 0;
    for phi in ["0.1*x1+0.05*x2^2", "log(1+0.1*x1)", "0.2*sin(x0)+0.1*x1*x3"] {
        let base = spec("conformally_flat", &[("phi", phi)]);
        let plan = grid(&base);
        let reference = classify_region(&base, &plan, &t).map_err(|e| e.to_string())?;
        for (c, factor) in [("log(10)", 1e-3), ("log(0.1)", 1e3)] {
            let scaled = spec("conformally_flat", &[("phi", &format!("{phi}+{c}"))]);
            let rep = classify_region(&scaled, &plan, &t).map_err(|e| e.to_string())?;
            for (a, b) in reference.points.iter().zip(&rep.points) {
                let ratio = b.nabla_t_norm / a.nabla_t_norm;
                ensure((ratio / factor - 1.0).abs() < 1e-6, || format!("φ = {phi}: |∇T| ratio {ratio:e}, expected {factor:e}"))?;
                ensure(a.verdict == b.verdict, || format!("φ = {phi}+{c} at {:?}: {} vs {}", a.point, a.verdict, b.verdict))?;
                compared += 1;
            }
        }
    }
    for (si, s) in extended_specs().iter().enumerate() {
        let mut r = rng(800 + si as u64);
        for _ in 0..5 {
            let p = random_point(&mut r, s);
            let pg = PointGeometry::compute(s, &p).map_err(|e| e.to_string())?;
            let nt = OmegaTensor::new(pg.nabla_t);
            let base = classify_tensor(&nt, &pg.g, &pg.g_inv, &t).map_err(|e| e.to_string())?;
            // scaling must keep ∇T on the same side of the absolute floor
            if base.nabla_t_norm < 1e-6 {
                continue;
            }
            for c in [1e-3, 1e3] {
                let v = classify_tensor(&nt.scale(c), &pg.g, &pg.g_inv, &t).map_err(|e| e.to_string())?;
                ensure(v.label == base.label, || format!("{} at {p:?}: {} vs {} under ×{c:e}", s.name, v.label, base.label))?;
                compared += 1;
            }
        }
    }
    Ok(format!("{compared} rescaled verdicts unchanged"))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_einclass"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn einclass")
}

fn exit_code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn stderr_code(o: &Output) -> Option<i64> {
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).ok()?;
    v["exit_code"].as_i64()
}

fn round_trip<T: serde::Serialize + serde::de::DeserializeOwned>(o: &Output) -> Result<(), String> {
    let text = String::from_utf8(o.stdout.clone()).map_err(|e| e.to_string())?;
    let parsed: T = serde_json::from_str(&text).map_err(|e| format!("parse: {e}"))?;
    let again = serde_json::to_string_pretty(&parsed).unwrap();
    ensure(again.trim_end() == text.trim_end(), || "re-serialised report differs".into())
}

fn cli_contract() -> Outcome {
    let dir = std::env::temp_dir().join(format!("einclass-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;

    let start = Instant::now();
    let o = run(&["classify", "--metric", "minkowski"]);
    let elapsed = start.elapsed().as_secs_f64();
    ensure(exit_code(&o) == 0, || format!("classify minkowski exit {}", exit_code(&o)))?;
    ensure(elapsed < 1.0, || format!("classify minkowski took {elapsed:.3} s"))?;

    for args in [
        &["classify", "--metric", "minkowski", "--points", "0,20,0,0"][..],
        &["classify", "--metric", "no_such_metric"][..],
        &["components", "--metric", "schwarzschild", "--point", "0,1,1,0"][..],
        &["geodesic", "--metric", "minkowski", "--x0", "0,0,0,0", "--v0", "1,3,0,0", "--h", "0.5", "--n", "100"][..],
    ] {
        let o = run(args);
        ensure(exit_code(&o) == 2 && stderr_code(&o) == Some(2), || {
            format!("{args:?}: exit {} stderr {}", exit_code(&o), String::from_utf8_lossy(&o.stderr))
        })?;
    }

    let polar = dir.join("polar.metric");
    std::fs::write(
        &polar,
        "name = polar_near_axis\ncoords = t, r, th, z\ng[0][0] = -1\ng[1][1] = 1\ng[2][2] = r^2\ng[3][3] = 1\n\
         domain t = [-1, 1]\ndomain r = [1e-5, 1e-4]\ndomain th = [-1, 1]\ndomain z = [-1, 1]\n",
    )
    .map_err(|e| e.to_string())?;
    let o = run(&["classify", "--metric-file", polar.to_str().unwrap(), "--grid", "2"]);
    ensure(exit_code(&o) == 3 && stderr_code(&o) == Some(3), || format!("near-axis chart: exit {}", exit_code(&o)))?;

    let o = run(&["classify", "--metric", "perturbed_minkowski", "--grid", "2", "--format", "json"]);
    ensure(exit_code(&o) == 0, || "classify json".into())?;
    round_trip::<ClassificationReport>(&o)?;
    let o = run(&["components", "--metric", "de_sitter_flat", "--point", "0.1,0.2,0.3,0.4", "--format", "json"]);
    ensure(exit_code(&o) == 0, || "components json".into())?;
    round_trip::<ComponentsDump>(&o)?;
    let o = run(&[
        "geodesic",
        "--metric",
        "schwarzschild",
        "--x0",
        "0,10,1.5707963267948966,0",
        "--v0",
        "1.2,0,0,0.03",
        "--n",
        "50",
        "--format",
        "json",
    ]);
    ensure(exit_code(&o) == 0, || format!("geodesic json: {}", String::from_utf8_lossy(&o.stderr)))?;
    round_trip::<GeodesicReport>(&o)?;
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/random_member.json");
    let o = run(&["decompose", "--tensor", fixture, "--format", "json"]);
    ensure(exit_code(&o) == 0, || format!("decompose json: {}", String::from_utf8_lossy(&o.stderr)))?;
    round_trip::<DecomposeReport>(&o)?;

    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("exit codes 0/2/3 observed, 4 JSON reports round-trip, classify minkowski {elapsed:.3} s"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("identity suite", identity_suite),
        ("jet oracle", jet_oracle),
        ("projector suite", projector_suite),
        ("equivalence suite", equivalence_suite),
        ("named verdicts", named_verdicts),
        ("projective Weyl checks", projective_weyl_checks),
        ("geodesic suite", geodesic_suite),
        ("scale invariance", scale_invariance),
        ("CLI contract", cli_contract),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.2} s]", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} [{secs:.2} s]", n + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
