//! Lorentzian metrics in coordinates: the built-in catalog, the text file
//! format, sample plans and order-3 jets of the components at a point.
//!
//! Metric file format:
//!
//! ```text
//! # comments start with '#'
//! name = schwarzschild
//! description = Schwarzschild exterior
//! coords = t, r, theta, phi
//! param m = 1
//! domain t = [-1000, 1000]
//! domain r = [3, 50]
//! domain theta = [0.3, 2.84]
//! domain phi = [-12.5, 12.5]
//! g[0][0] = -(1 - 2*m/r)
//! g[1][1] = 1/(1 - 2*m/r)
//! g[2][2] = r^2
//! g[3][3] = r^2*sin(theta)^2
//! ```
//!
//! Off-diagonal components that are not listed are zero; `g[j][i]` is accepted
//! for `g[i][j]`. Every diagonal component and every coordinate's domain must
//! be present.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, Expr, Params, ParseError, SymbolTable};
use crate::jets::{Jet3, JetMatrix, DIM};
use crate::linalg::{symmetric_eigenvalues, Mat4};

/// Eigenvalues with magnitude below this (relative to `max(1, max|λ|)`) count as zero.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Upper-triangle component pairs in storage order.
pub const COMPONENT_PAIRS: [(usize, usize); 10] = [(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];

pub fn component_slot(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    COMPONENT_PAIRS.iter().position(|&p| p == (a, b)).expect("indices below 4")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("unknown catalog metric `{0}`")]
    UnknownCatalog(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("line {line}: {message}")]
    File { line: usize, message: String },
    #[error("missing {0}")]
    Missing(String),
    #[error("signature violation at {point:?}: expected one negative eigenvalue, found {found} (eigenvalues {eigenvalues:?})")]
    Signature { point: [f64; DIM], found: String, eigenvalues: [f64; DIM] },
    #[error("point {point:?} lies outside the domain box")]
    OutsideDomain { point: [f64; DIM] },
    #[error("evaluating g[{i}][{j}] at {point:?}: {source}")]
    Eval { i: usize, j: usize, point: [f64; DIM], source: EvalError },
}

/// Closed coordinate interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub name: String,
    pub description: String,
    pub coords: [String; DIM],
    pub params: Params,
    /// `g_{ij}` for `i ≤ j` in [`COMPONENT_PAIRS`] order.
    pub components: [Expr; 10],
    pub domain: [Interval; DIM],
}

impl MetricSpec {
    pub fn symbols(&self) -> SymbolTable {
        SymbolTable { coords: self.coords.to_vec(), params: self.params.keys().cloned().collect() }
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        &self.components[component_slot(i, j)]
    }

    pub fn contains(&self, point: &[f64; DIM]) -> bool {
        self.domain.iter().zip(point).all(|(iv, x)| iv.contains(*x))
    }

    pub fn center(&self) -> [f64; DIM] {
        self.domain.map(|iv| iv.mid())
    }

    /// Component values at a point (no domain or signature check).
    pub fn values(&self, point: &[f64; DIM]) -> Result<Mat4, MetricError> {
        let mut g = [[0.0; DIM]; DIM];
        for (&(i, j), e) in COMPONENT_PAIRS.iter().zip(&self.components) {
            let v = e.eval_real(point, &self.params).map_err(|source| MetricError::Eval { i, j, point: *point, source })?;
            g[i][j] = v;
            g[j][i] = v;
        }
        Ok(g)
    }

    /// Order-3 jets of every component at `point`, after domain and signature checks.
    pub fn metric_jets(&self, point: &[f64; DIM]) -> Result<JetMatrix, MetricError> {
        if !self.contains(point) {
            return Err(MetricError::OutsideDomain { point: *point });
        }
        let mut g = [[Jet3::zero(); DIM]; DIM];
        for (&(i, j), e) in COMPONENT_PAIRS.iter().zip(&self.components) {
            let v = e.eval_jet(point, &self.params).map_err(|source| MetricError::Eval { i, j, point: *point, source })?;
            g[i][j] = v;
            g[j][i] = v;
        }
        check_signature(&g.map(|row| row.map(|j| j.value())), point)?;
        Ok(g)
    }

    /// Text in the metric file format; [`load_metric`] reads it back.
    pub fn to_file_text(&self) -> String {
        let symbols = self.symbols();
        let mut out = String::new();
        out.push_str(&format!("name = {}\n", self.name));
        if !self.description.is_empty() {
            out.push_str(&format!("description = {}\n", self.description));
        }
        out.push_str(&format!("coords = {}\n", self.coords.join(", ")));
        for (k, v) in &self.params {
            out.push_str(&format!("param {k} = {v:?}\n"));
        }
        for (c, iv) in self.coords.iter().zip(&self.domain) {
            out.push_str(&format!("domain {c} = [{:?}, {:?}]\n", iv.lo, iv.hi));
        }
        for (&(i, j), e) in COMPONENT_PAIRS.iter().zip(&self.components) {
            if i == j || *e != Expr::Number(0.0) {
                out.push_str(&format!("g[{i}][{j}] = {}\n", e.to_text(&symbols)));
            }
        }
        out
    }
}

fn count_word(n: usize) -> String {
    match n {
        0 => "zero".into(),
        1 => "one".into(),
        2 => "two".into(),
        3 => "three".into(),
        4 => "four".into(),
        n => n.to_string(),
    }
}

/// Requires exactly one negative and no (numerically) zero eigenvalue.
pub fn check_signature(g: &Mat4, point: &[f64; DIM]) -> Result<(), MetricError> {
    if g.iter().flatten().any(|x| !x.is_finite()) {
        return Err(MetricError::Signature { point: *point, found: "non-finite components".into(), eigenvalues: [f64::NAN; DIM] });
    }
    let ev = symmetric_eigenvalues(g);
    let scale = ev.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    let zero = ev.iter().filter(|x| x.abs() <= DEGENERACY_TOL * scale).count();
    let negative = ev.iter().filter(|x| **x < 0.0 && x.abs() > DEGENERACY_TOL * scale).count();
    if negative == 1 && zero == 0 {
        return Ok(());
    }
    let found = if zero > 0 { format!("{} (and {} degenerate)", count_word(negative), count_word(zero)) } else { count_word(negative) };
    Err(MetricError::Signature { point: *point, found, eigenvalues: ev })
}

/// Parses and validates a metric file; the signature is checked at the domain-box center.
pub fn load_metric(text: &str) -> Result<MetricSpec, MetricError> {
    let mut name = None;
    let mut description = String::new();
    let mut coords: Option<[String; DIM]> = None;
    let mut params = Params::new();
    let mut domains: BTreeMap<String, (usize, Interval)> = BTreeMap::new();
    let mut comps: Vec<(usize, usize, usize, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| MetricError::File { line: line_no, message };
        let Some((lhs, rhs)) = line.split_once('=') else {
            return Err(bad(format!("expected `key = value`, found `{line}`")));
        };
        let (lhs, rhs) = (lhs.trim(), rhs.trim());
        if let Some(rest) = lhs.strip_prefix("g[") {
            let (i, j) = parse_component_key(rest).ok_or_else(|| bad(format!("malformed component key `{lhs}`")))?;
            comps.push((line_no, i, j, rhs.to_string()));
        } else if let Some(p) = lhs.strip_prefix("param ") {
            let value: f64 = rhs.parse().map_err(|_| bad(format!("parameter value `{rhs}` is not a number")))?;
            params.insert(p.trim().to_string(), value);
        } else if let Some(c) = lhs.strip_prefix("domain ") {
            let iv = parse_interval(rhs).ok_or_else(|| bad(format!("malformed interval `{rhs}`")))?;
            if !(iv.lo < iv.hi) {
                return Err(bad(format!("empty interval `{rhs}`")));
            }
            domains.insert(c.trim().to_string(), (line_no, iv));
        } else {
            match lhs {
                "name" => name = Some(rhs.to_string()),
                "description" => description = rhs.to_string(),
                "coords" => {
                    let names: Vec<String> =
                        rhs.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::to_string).collect();
                    coords =
                        Some(names.try_into().map_err(|v: Vec<String>| bad(format!("expected 4 coordinate names, found {}", v.len())))?);
                }
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
    }

    let name = name.ok_or_else(|| MetricError::Missing("`name`".into()))?;
    let coords = coords.unwrap_or_else(|| ["x0", "x1", "x2", "x3"].map(String::from));
    let mut domain = [Interval::new(0.0, 0.0); DIM];
    for (k, c) in coords.iter().enumerate() {
        let canonical = format!("x{k}");
        let (_, iv) = domains
            .remove(c)
            .or_else(|| domains.remove(&canonical))
            .ok_or_else(|| MetricError::Missing(format!("domain for coordinate `{c}`")))?;
        domain[k] = iv;
    }
    if let Some((c, (line, _))) = domains.into_iter().next() {
        return Err(MetricError::File { line, message: format!("domain given for unknown coordinate `{c}`") });
    }

    let symbols = SymbolTable { coords: coords.to_vec(), params: params.keys().cloned().collect() };
    let mut components: [Option<Expr>; 10] = Default::default();
    for (line, i, j, text) in comps {
        let slot = component_slot(i, j);
        if components[slot].is_some() {
            return Err(MetricError::File { line, message: format!("component g[{i}][{j}] given twice") });
        }
        components[slot] = Some(Expr::parse(&text, &symbols).map_err(|source| MetricError::Parse { line, source })?);
    }
    for k in 0..DIM {
        if components[component_slot(k, k)].is_none() {
            return Err(MetricError::Missing(format!("component g[{k}][{k}]")));
        }
    }
    let components = components.map(|c| c.unwrap_or(Expr::Number(0.0)));
    let spec = MetricSpec { name, description, coords, params, components, domain };
    let center = spec.center();
    check_signature(&spec.values(&center)?, &center)?;
    Ok(spec)
}

fn parse_component_key(rest: &str) -> Option<(usize, usize)> {
    // rest looks like "0][1]"
    let (i, rest) = rest.split_once(']')?;
    let rest = rest.trim_start().strip_prefix('[')?;
    let (j, tail) = rest.split_once(']')?;
    if !tail.trim().is_empty() {
        return None;
    }
    let (i, j): (usize, usize) = (i.trim().parse().ok()?, j.trim().parse().ok()?);
    (i < DIM && j < DIM).then_some((i, j))
}

fn parse_interval(text: &str) -> Option<Interval> {
    let inner = text.trim().strip_prefix('[')?.strip_suffix(']')?;
    let (lo, hi) = inner.split_once(',')?;
    Some(Interval::new(lo.trim().parse().ok()?, hi.trim().parse().ok()?))
}

/// Named constructors of the built-in metrics.
#[derive(Debug, Clone, PartialEq)]
pub enum Catalog {
    Minkowski,
    Schwarzschild {
        m: f64,
    },
    DeSitterFlat {
        h: f64,
    },
    /// Flat spatial slices with scale factor `a(x0)`.
    Flrw {
        scale_factor: String,
    },
    EinsteinStatic {
        a: f64,
    },
    /// `e^{2φ} η`.
    ConformallyFlat {
        phi: String,
    },
    /// `g00(x0) dx0² + f(x0) g_ab(x1,x2,x3) dxᵃ dxᵇ`; `spatial` holds
    /// `g11 g12 g13 g22 g23 g33`.
    SinyukovWarped {
        g00: String,
        f: String,
        spatial: [String; 6],
    },
    PerturbedMinkowski {
        eps: f64,
        seed: u64,
    },
}

pub const CATALOG_NAMES: [&str; 8] = [
    "minkowski",
    "schwarzschild",
    "de_sitter_flat",
    "flrw",
    "einstein_static",
    "conformally_flat",
    "sinyukov_warped",
    "perturbed_minkowski",
];

pub const DEFAULT_PHI: &str = "0.1*x1+0.05*x2^2";

impl Catalog {
    /// Builds an entry from string arguments, filling defaults for anything not given.
    ///
    /// Recognised keys: `m`, `H`, `a`, `phi`, `g00`, `f`, `spatial` (six
    /// comma- or semicolon-separated expressions), `eps`, `seed`.
    pub fn from_args(name: &str, args: &BTreeMap<String, String>) -> Result<Catalog, MetricError> {
        let number = |key: &str, default: f64| -> Result<f64, MetricError> {
            match args.get(key) {
                None => Ok(default),
                Some(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| MetricError::InvalidParameter { name: key.into(), reason: format!("`{v}` is not a number") }),
            }
        };
        let text = |key: &str, default: &str| args.get(key).cloned().unwrap_or_else(|| default.to_string());
        let known: &[&str] = match name {
            "minkowski" => &[],
            "schwarzschild" => &["m"],
            "de_sitter_flat" => &["H"],
            "flrw" => &["a"],
            "einstein_static" => &["a"],
            "conformally_flat" => &["phi"],
            "sinyukov_warped" => &["g00", "f", "spatial"],
            "perturbed_minkowski" => &["eps", "seed"],
            other => return Err(MetricError::UnknownCatalog(other.to_string())),
        };
        if let Some(k) = args.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(MetricError::InvalidParameter { name: k.clone(), reason: format!("not a parameter of `{name}`") });
        }
        Ok(match name {
            "minkowski" => Catalog::Minkowski,
            "schwarzschild" => Catalog::Schwarzschild { m: number("m", 1.0)? },
            "de_sitter_flat" => Catalog::DeSitterFlat { h: number("H", 1.0)? },
            "flrw" => Catalog::Flrw { scale_factor: text("a", "t^(2/3)") },
            "einstein_static" => Catalog::EinsteinStatic { a: number("a", 1.0)? },
            "conformally_flat" => Catalog::ConformallyFlat { phi: text("phi", DEFAULT_PHI) },
            "sinyukov_warped" => {
                let spatial_text = text("spatial", "1,0,0,1,0,1");
                let parts: Vec<String> = spatial_text.split([',', ';']).map(|s| s.trim().to_string()).collect();
                let spatial: [String; 6] = parts.try_into().map_err(|v: Vec<String>| MetricError::InvalidParameter {
                    name: "spatial".into(),
                    reason: format!("expected 6 expressions (g11 g12 g13 g22 g23 g33), found {}", v.len()),
                })?;
                Catalog::SinyukovWarped { g00: text("g00", "-1"), f: text("f", "exp(2*x0)"), spatial }
            }
            "perturbed_minkowski" => {
                let seed = number("seed", 7.0)?;
                if seed < 0.0 || seed.fract() != 0.0 {
                    return Err(MetricError::InvalidParameter { name: "seed".into(), reason: "must be a non-negative integer".into() });
                }
                Catalog::PerturbedMinkowski { eps: number("eps", 0.01)?, seed: seed as u64 }
            }
            _ => unreachable!(),
        })
    }

    pub fn build(&self) -> Result<MetricSpec, MetricError> {
        let spec = match self {
            Catalog::Minkowski => assemble(
                "minkowski",
                "flat space-time",
                ["t", "x", "y", "z"],
                Params::new(),
                &[(0, 0, "-1"), (1, 1, "1"), (2, 2, "1"), (3, 3, "1")],
                [(-10.0, 10.0); 4],
            )?,
            Catalog::Schwarzschild { m } => {
                positive("m", *m)?;
                assemble(
                    "schwarzschild",
                    "Schwarzschild exterior in Schwarzschild coordinates",
                    ["t", "r", "theta", "phi"],
                    Params::from([("m".to_string(), *m)]),
                    &[(0, 0, "-(1 - 2*m/r)"), (1, 1, "1/(1 - 2*m/r)"), (2, 2, "r^2"), (3, 3, "r^2*sin(theta)^2")],
                    [(-1000.0 * m, 1000.0 * m), (3.0 * m, 50.0 * m), (0.3, PI - 0.3), (-4.0 * PI, 4.0 * PI)],
                )?
            }
            Catalog::DeSitterFlat { h } => {
                positive("H", *h)?;
                let t = 1.0 / h;
                assemble(
                    "de_sitter_flat",
                    "de Sitter in flat slicing",
                    ["t", "x", "y", "z"],
                    Params::from([("H".to_string(), *h)]),
                    &[(0, 0, "-1"), (1, 1, "exp(2*H*t)"), (2, 2, "exp(2*H*t)"), (3, 3, "exp(2*H*t)")],
                    [(-t, t), (-t, t), (-t, t), (-t, t)],
                )?
            }
            Catalog::Flrw { scale_factor } => {
                let a = format!("({scale_factor})^2");
                assemble(
                    "flrw",
                    &format!("spatially flat Robertson-Walker, a(t) = {scale_factor}"),
                    ["t", "x", "y", "z"],
                    Params::new(),
                    &[(0, 0, "-1"), (1, 1, &a), (2, 2, &a), (3, 3, &a)],
                    [(0.5, 2.0), (-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)],
                )?
            }
            Catalog::EinsteinStatic { a } => {
                positive("a", *a)?;
                assemble(
                    "einstein_static",
                    "Einstein static universe R x S^3",
                    ["t", "chi", "theta", "phi"],
                    Params::from([("a".to_string(), *a)]),
                    &[(0, 0, "-1"), (1, 1, "a^2"), (2, 2, "a^2*sin(chi)^2"), (3, 3, "a^2*sin(chi)^2*sin(theta)^2")],
                    [(-100.0, 100.0), (0.3, PI - 0.3), (0.3, PI - 0.3), (-4.0 * PI, 4.0 * PI)],
                )?
            }
            Catalog::ConformallyFlat { phi } => {
                let w = format!("exp(2*({phi}))");
                let neg = format!("-exp(2*({phi}))");
                assemble(
                    "conformally_flat",
                    &format!("exp(2 phi) times Minkowski, phi = {phi}"),
                    ["t", "x", "y", "z"],
                    Params::new(),
                    &[(0, 0, &neg), (1, 1, &w), (2, 2, &w), (3, 3, &w)],
                    [(-1.0, 1.0); 4],
                )?
            }
            Catalog::SinyukovWarped { g00, f, spatial } => sinyukov_warped(g00, f, spatial)?,
            Catalog::PerturbedMinkowski { eps, seed } => perturbed_minkowski(*eps, *seed)?,
        };
        let center = spec.center();
        check_signature(&spec.values(&center)?, &center)?;
        Ok(spec)
    }
}

/// Shorthand for `Catalog::from_args(name, args)?.build()`.
pub fn catalog(name: &str, args: &BTreeMap<String, String>) -> Result<MetricSpec, MetricError> {
    Catalog::from_args(name, args)?.build()
}

fn positive(name: &str, v: f64) -> Result<(), MetricError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(MetricError::InvalidParameter { name: name.into(), reason: format!("must be positive, got {v}") })
    }
}

fn assemble(
    name: &str,
    description: &str,
    coords: [&str; DIM],
    params: Params,
    entries: &[(usize, usize, &str)],
    domain: [(f64, f64); DIM],
) -> Result<MetricSpec, MetricError> {
    let coords = coords.map(String::from);
    let symbols = SymbolTable { coords: coords.to_vec(), params: params.keys().cloned().collect() };
    let mut components: [Expr; 10] = std::array::from_fn(|_| Expr::Number(0.0));
    for &(i, j, text) in entries {
        components[component_slot(i, j)] = Expr::parse(text, &symbols)
            .map_err(|e| MetricError::InvalidParameter { name: format!("g[{i}][{j}]"), reason: format!("`{text}`: {e}") })?;
    }
    Ok(MetricSpec {
        name: name.to_string(),
        description: description.to_string(),
        coords,
        params,
        components,
        domain: domain.map(|(lo, hi)| Interval::new(lo, hi)),
    })
}

fn coordinates_used(e: &Expr, out: &mut BTreeSet<usize>) {
    match e {
        Expr::Coord(i) => {
            out.insert(*i);
        }
        Expr::Number(_) | Expr::Param(_) => {}
        Expr::Neg(a) | Expr::Call(_, a) => coordinates_used(a, out),
        Expr::Binary(_, a, b) => {
            coordinates_used(a, out);
            coordinates_used(b, out);
        }
    }
}

fn sinyukov_warped(g00: &str, f: &str, spatial: &[String; 6]) -> Result<MetricSpec, MetricError> {
    let symbols = SymbolTable::new(&["x0", "x1", "x2", "x3"], &[]);
    let check = |key: &str, text: &str, allowed: &[usize]| -> Result<(), MetricError> {
        let e = Expr::parse(text, &symbols)
            .map_err(|err| MetricError::InvalidParameter { name: key.into(), reason: format!("`{text}`: {err}") })?;
        let mut used = BTreeSet::new();
        coordinates_used(&e, &mut used);
        if let Some(bad) = used.iter().find(|c| !allowed.contains(c)) {
            return Err(MetricError::InvalidParameter { name: key.into(), reason: format!("`{text}` may not depend on x{bad}") });
        }
        Ok(())
    };
    check("g00", g00, &[0])?;
    check("f", f, &[0])?;
    for s in spatial {
        check("spatial", s, &[1, 2, 3])?;
    }
    let pairs = [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)];
    let spatial_terms: Vec<(usize, usize, String)> =
        pairs.iter().zip(spatial).filter(|(_, s)| s.trim() != "0").map(|(&(i, j), s)| (i, j, format!("({f})*({s})"))).collect();
    let mut entries: Vec<(usize, usize, &str)> = vec![(0, 0, g00)];
    entries.extend(spatial_terms.iter().map(|(i, j, s)| (*i, *j, s.as_str())));
    let mut spec = assemble(
        "sinyukov_warped",
        &format!("warped product g00 = {g00}, f = {f}"),
        ["x0", "x1", "x2", "x3"],
        Params::new(),
        &entries,
        [(-1.0, 1.0); 4],
    )?;
    for k in 1..DIM {
        if spec.components[component_slot(k, k)] == Expr::Number(0.0) {
            return Err(MetricError::InvalidParameter { name: "spatial".into(), reason: format!("g{k}{k} is identically zero") });
        }
    }
    spec.description = format!("{}, spatial = [{}]", spec.description, spatial.join(", "));
    Ok(spec)
}

/// `η + eps·h` with `h_ij = Σ A sin(k·x + p)` over two seeded random modes per component.
fn perturbed_minkowski(eps: f64, seed: u64) -> Result<MetricSpec, MetricError> {
    if !(eps.abs() <= 0.1) {
        return Err(MetricError::InvalidParameter { name: "eps".into(), reason: format!("|eps| must be at most 0.1, got {eps}") });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = ["t", "x", "y", "z"];
    let mut texts = Vec::with_capacity(10);
    for &(i, j) in COMPONENT_PAIRS.iter() {
        let eta = if i != j {
            0.0
        } else if i == 0 {
            -1.0
        } else {
            1.0
        };
        let mut modes = Vec::new();
        for _ in 0..2 {
            let amp: f64 = rng.gen_range(0.5..1.0);
            let k: [f64; DIM] = std::array::from_fn(|_| rng.gen_range(-1.5..1.5));
            let phase: f64 = rng.gen_range(0.0..2.0 * PI);
            let arg = k.iter().zip(coords).map(|(kc, c)| format!("{kc:?}*{c}")).collect::<Vec<_>>().join("+");
            modes.push(format!("{amp:?}*sin({arg}+{phase:?})"));
        }
        texts.push((i, j, format!("{eta:?}+eps*({})", modes.join("+"))));
    }
    let entries: Vec<(usize, usize, &str)> = texts.iter().map(|(i, j, s)| (*i, *j, s.as_str())).collect();
    assemble(
        "perturbed_minkowski",
        &format!("Minkowski plus a seeded smooth perturbation (eps = {eps}, seed = {seed})"),
        coords,
        Params::from([("eps".to_string(), eps)]),
        &entries,
        [(-10.0, 10.0); 4],
    )
}

/// Where to evaluate a metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplePlan {
    Points(Vec<[f64; DIM]>),
    /// Per axis `(start, stop, count)`; `count == 1` samples `start`.
    Grid([(f64, f64, usize); DIM]),
}

impl SamplePlan {
    /// `n` points per axis, uniformly spaced over the box shrunk 10% from each side.
    pub fn default_grid(spec: &MetricSpec, n: [usize; DIM]) -> SamplePlan {
        let mut axes = [(0.0, 0.0, 0); DIM];
        for (k, iv) in spec.domain.iter().enumerate() {
            let pad = 0.1 * iv.width();
            axes[k] = if n[k] == 1 { (iv.mid(), iv.mid(), 1) } else { (iv.lo + pad, iv.hi - pad, n[k]) };
        }
        SamplePlan::Grid(axes)
    }

    /// `n` points drawn uniformly from the domain box shrunk 1% from each side.
    pub fn random(spec: &MetricSpec, n: usize, seed: u64) -> SamplePlan {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..n)
            .map(|_| {
                std::array::from_fn(|k| {
                    let iv = spec.domain[k];
                    let pad = 0.01 * iv.width();
                    rng.gen_range(iv.lo + pad..=iv.hi - pad)
                })
            })
            .collect();
        SamplePlan::Points(pts)
    }

    /// Points in lexicographic order; errors if any lies outside the domain box.
    pub fn points(&self, spec: &MetricSpec) -> Result<Vec<[f64; DIM]>, MetricError> {
        let mut pts = match self {
            SamplePlan::Points(p) => p.clone(),
            SamplePlan::Grid(axes) => {
                let lin = |(a, b, n): (f64, f64, usize)| -> Vec<f64> {
                    match n {
                        0 => vec![],
                        1 => vec![a],
                        n => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
                    }
                };
                let ax: Vec<Vec<f64>> = axes.iter().map(|&a| lin(a)).collect();
                let mut out = Vec::new();
                for &p0 in &ax[0] {
                    for &p1 in &ax[1] {
                        for &p2 in &ax[2] {
                            for &p3 in &ax[3] {
                                out.push([p0, p1, p2, p3]);
                            }
                        }
                    }
                }
                out
            }
        };
        pts.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
        if let Some(p) = pts.iter().find(|p| !spec.contains(p)) {
            return Err(MetricError::OutsideDomain { point: *p });
        }
        Ok(pts)
    }
}
