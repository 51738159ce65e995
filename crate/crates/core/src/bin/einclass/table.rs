//! Human-readable tables; numbers carry six significant digits.

use std::fmt::Write;

use einclass::metrics::Interval;
use einclass::omega::OmegaTensor;
use einclass::report::{ClassificationReport, ComponentsDump, DecomposeReport, GeodesicReport, MetricInfo, ResidualNorms};

pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let e = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&e) {
        format!("{x:.5e}")
    } else {
        format!("{x:.*}", (5 - e) as usize)
    }
}

fn vec4(v: &[f64; 4]) -> String {
    format!("({})", v.map(sig6).join(", "))
}

fn grid(out: &mut String, header: &[String], rows: &[Vec<String>]) {
    let mut w: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            w[i] = w[i].max(c.chars().count());
        }
    }
    let line =
        |cells: &[String]| -> String { cells.iter().zip(&w).map(|(c, w)| format!("{c:>w$}", w = *w)).collect::<Vec<_>>().join("  ") };
    writeln!(out, "{}", line(header)).unwrap();
    for r in rows {
        writeln!(out, "{}", line(r)).unwrap();
    }
}

fn matrix(out: &mut String, title: &str, m: &[[f64; 4]; 4]) {
    writeln!(out, "{title}").unwrap();
    let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|x| sig6(*x)).collect()).collect();
    let header: Vec<String> = (0..4).map(|j| format!("[{j}]")).collect();
    grid(out, &header, &rows);
}

fn metric_header(out: &mut String, m: &MetricInfo) {
    writeln!(out, "metric: {} ({})", m.name, m.description).unwrap();
    writeln!(out, "coords: {}", m.coords.join(", ")).unwrap();
    if !m.params.is_empty() {
        let p: Vec<String> = m.params.iter().map(|(k, v)| format!("{k} = {}", sig6(*v))).collect();
        writeln!(out, "params: {}", p.join(", ")).unwrap();
    }
}

fn residual_lines(out: &mut String, r: &ResidualNorms) {
    writeln!(out, "residual norms").unwrap();
    for (name, v) in [
        ("killing", r.killing),
        ("codazzi", r.codazzi),
        ("trace_shape", r.trace_shape),
        ("constant_scalar", r.constant_scalar),
        ("harmonic_weyl", r.harmonic_weyl),
        ("conformal_killing", r.conformal_killing),
    ] {
        writeln!(out, "  {name:<18} {}", sig6(v)).unwrap();
    }
}

fn tensor3(out: &mut String, title: &str, t: &[[[f64; 4]; 4]; 4]) {
    for (k, m) in t.iter().enumerate() {
        matrix(out, &format!("{title}[{k}]"), m);
    }
}

pub fn catalog(entries: &[(&str, &str, &[String; 4], &[Interval; 4])]) -> String {
    let mut out = String::new();
    let rows: Vec<Vec<String>> = entries
        .iter()
        .map(|(n, d, c, dom)| {
            let box_ =
                c.iter().zip(dom.iter()).map(|(c, iv)| format!("{c} [{}, {}]", sig6(iv.lo), sig6(iv.hi))).collect::<Vec<_>>().join(", ");
            vec![n.to_string(), box_, d.to_string()]
        })
        .collect();
    let header = ["name", "domain", "description"].map(String::from);
    grid(&mut out, &header, &rows);
    out
}

pub fn classification(r: &ClassificationReport) -> String {
    let mut out = String::new();
    metric_header(&mut out, &r.metric);
    writeln!(out, "tolerances: rel {}, floor {}", sig6(r.tolerances.tol_rel), sig6(r.tolerances.tol_floor)).unwrap();
    writeln!(out, "points: {}", r.points.len()).unwrap();
    let header = ["point", "s", "|∇T|", "|π1|", "|π2|", "|π3|", "verdict"].map(String::from);
    let rows: Vec<Vec<String>> = r
        .points
        .iter()
        .map(|p| {
            let mut row = vec![vec4(&p.point), sig6(p.scalar), sig6(p.nabla_t_norm)];
            row.extend(p.projection_norms.iter().map(|x| sig6(*x)));
            let verdict = match &p.note {
                Some(n) => format!("{} ({n})", p.verdict),
                None => p.verdict.to_string(),
            };
            row.push(verdict);
            row
        })
        .collect();
    grid(&mut out, &header, &rows);
    match &r.note {
        Some(n) => writeln!(out, "aggregate verdict: {} ({n})", r.aggregate).unwrap(),
        None => writeln!(out, "aggregate verdict: {}", r.aggregate).unwrap(),
    }
    out
}

pub fn components(d: &ComponentsDump) -> String {
    let mut out = String::new();
    metric_header(&mut out, &d.metric);
    writeln!(out, "point: {}", vec4(&d.point)).unwrap();
    matrix(&mut out, "g", &d.g);
    matrix(&mut out, "g^-1", &d.g_inv);
    tensor3(&mut out, "Γ^k_ij, k=", &d.christoffel);
    matrix(&mut out, "Ric", &d.ricci);
    writeln!(out, "s = {:.6}", d.scalar).unwrap();
    matrix(&mut out, "T", &d.t);
    tensor3(&mut out, "∇_k T_ij, k=", &d.nabla_t);
    for (l, block) in d.projective_weyl.iter().enumerate() {
        for (i, m) in block.iter().enumerate() {
            matrix(&mut out, &format!("P_lijk, l={l} i={i}"), m);
        }
    }
    writeln!(
        out,
        "projection norms: |π1| {}  |π2| {}  |π3| {}",
        sig6(d.projection_norms[0]),
        sig6(d.projection_norms[1]),
        sig6(d.projection_norms[2])
    )
    .unwrap();
    residual_lines(&mut out, &d.residual_norms);
    let n = &d.identity_norms;
    writeln!(out, "identity norms").unwrap();
    for (name, v) in [
        ("bianchi", n.bianchi),
        ("yang_mills", n.yang_mills),
        ("contracted", n.contracted),
        ("conservation", n.conservation),
        ("dstar_p", n.dstar_p),
        ("|∇R|", n.nabla_riemann),
    ] {
        writeln!(out, "  {name:<18} {}", sig6(v)).unwrap();
    }
    match &d.note {
        Some(n) => writeln!(out, "verdict: {} ({n})", d.verdict).unwrap(),
        None => writeln!(out, "verdict: {}", d.verdict).unwrap(),
    }
    out
}

pub fn geodesic(r: &GeodesicReport) -> String {
    let mut out = String::new();
    metric_header(&mut out, &r.metric);
    writeln!(out, "x0: {}", vec4(&r.x0)).unwrap();
    writeln!(out, "v0: {}", vec4(&r.v0)).unwrap();
    writeln!(out, "steps: {}  h: {}", r.drift.steps, sig6(r.drift.step_size)).unwrap();
    let name = match r.drift.field {
        einclass::geodesics::IntegralField::G => "g",
        einclass::geodesics::IntegralField::Ric => "ric",
    };
    writeln!(out, "integral {name}: q0 {}  max drift {}", sig6(r.drift.q0), sig6(r.drift.max_drift)).unwrap();
    writeln!(out, "integral g:   q0 {}  max drift {}", sig6(r.metric_drift.q0), sig6(r.metric_drift.max_drift)).unwrap();
    writeln!(out, "final x: {}", vec4(&r.final_state.x)).unwrap();
    writeln!(out, "final v: {}", vec4(&r.final_state.v)).unwrap();
    out
}

fn omega(out: &mut String, title: &str, o: &OmegaTensor) {
    tensor3(out, title, &o.components);
}

pub fn decomposition(d: &DecomposeReport) -> String {
    let mut out = String::new();
    metric_header(&mut out, &d.metric);
    writeln!(out, "point: {}", vec4(&d.point)).unwrap();
    writeln!(out, "t_k: {}", vec4(&d.theta)).unwrap();
    omega(&mut out, "π1, k=", &d.pi1);
    omega(&mut out, "π2, k=", &d.pi2);
    omega(&mut out, "π3, k=", &d.pi3);
    writeln!(
        out,
        "|Ω| {}  |π1| {}  |π2| {}  |π3| {}",
        sig6(d.norm),
        sig6(d.projection_norms[0]),
        sig6(d.projection_norms[1]),
        sig6(d.projection_norms[2])
    )
    .unwrap();
    writeln!(out, "completeness residual: {}", sig6(d.completeness)).unwrap();
    writeln!(out, "verdict: {}", d.verdict).unwrap();
    out
}
