//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet3`] holds the Taylor coefficients `∂^α f / α!` of a scalar function of
//! four coordinates at one point, for every multi-index with `|α| ≤ 3`. Products
//! are truncated Cauchy convolutions, so every third-order partial of a metric
//! component comes out exact up to rounding.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::LazyLock;

use thiserror::Error;

/// Number of coordinates.
pub const DIM: usize = 4;
/// Highest derivative order carried.
pub const MAX_ORDER: usize = 3;
/// Number of multi-indices with `|α| ≤ 3` in four variables.
pub const N_COEFFS: usize = 35;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("coordinate index {0} out of range 0..4")]
    IndexOutOfRange(usize),
    #[error("multi-index order {0} exceeds 3")]
    OrderTooHigh(usize),
    #[error("division by a jet with zero value part")]
    DivisionByZero,
    #[error("{func} is undefined at {value}")]
    Domain { func: &'static str, value: f64 },
    #[error("value-part matrix is singular (pivot {pivot:e} in column {column})")]
    SingularMatrix { column: usize, pivot: f64 },
}

/// Exponents `(α₀, α₁, α₂, α₃)` of a mixed partial derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub [u8; DIM]);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex([0; DIM]);

    pub fn new(exponents: [u8; DIM]) -> Result<Self, JetError> {
        let m = MultiIndex(exponents);
        if m.order() > MAX_ORDER {
            return Err(JetError::OrderTooHigh(m.order()));
        }
        Ok(m)
    }

    /// Unit multi-index `eᵢ`.
    pub fn unit(axis: usize) -> Result<Self, JetError> {
        if axis >= DIM {
            return Err(JetError::IndexOutOfRange(axis));
        }
        let mut e = [0; DIM];
        e[axis] = 1;
        Ok(MultiIndex(e))
    }

    /// Multi-index counting how often each axis occurs in `axes`.
    pub fn from_axes(axes: &[usize]) -> Result<Self, JetError> {
        let mut e = [0u8; DIM];
        for &a in axes {
            if a >= DIM {
                return Err(JetError::IndexOutOfRange(a));
            }
            e[a] += 1;
        }
        MultiIndex::new(e)
    }

    pub fn order(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// `α! = Π αᵢ!`
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&e| (1..=e as u32).product::<u32>() as f64).product()
    }

    /// Slot of this multi-index in the dense coefficient array.
    pub fn slot(&self) -> usize {
        TABLES.slot_of[lookup_key(self)] as usize
    }

    /// All 35 multi-indices in graded order (the storage order of [`Jet3`]).
    pub fn all() -> &'static [MultiIndex] {
        &TABLES.indices
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a},{b},{c},{d})")
    }
}

fn lookup_key(m: &MultiIndex) -> usize {
    m.0.iter().fold(0, |acc, &e| acc * 4 + e as usize)
}

struct Tables {
    indices: Vec<MultiIndex>,
    slot_of: [u8; 256],
    factorial: [f64; N_COEFFS],
    /// `(a, b, out)` slot triples with `α_a + α_b = α_out`.
    products: Vec<(u8, u8, u8)>,
    /// For each axis and slot `s` with `|α_s| ≤ 2`: slot of `α_s + e_axis`.
    raise: [[u8; N_COEFFS]; DIM],
}

const NO_SLOT: u8 = u8::MAX;

static TABLES: LazyLock<Tables> = LazyLock::new(|| {
    let mut indices = Vec::with_capacity(N_COEFFS);
    for order in 0..=MAX_ORDER {
        // reverse-lexicographic within an order: x0 varies slowest
        let mut block = Vec::new();
        for a in 0..=order {
            for b in 0..=order - a {
                for c in 0..=order - a - b {
                    let d = order - a - b - c;
                    block.push(MultiIndex([a as u8, b as u8, c as u8, d as u8]));
                }
            }
        }
        block.sort_by_key(|x| std::cmp::Reverse(x.0));
        indices.extend(block);
    }
    assert_eq!(indices.len(), N_COEFFS);

    let mut slot_of = [NO_SLOT; 256];
    for (s, m) in indices.iter().enumerate() {
        slot_of[lookup_key(m)] = s as u8;
    }
    let mut factorial = [0.0; N_COEFFS];
    for (s, m) in indices.iter().enumerate() {
        factorial[s] = m.factorial();
    }

    let mut products = Vec::new();
    for (ia, a) in indices.iter().enumerate() {
        for (ib, b) in indices.iter().enumerate() {
            let sum = [a.0[0] + b.0[0], a.0[1] + b.0[1], a.0[2] + b.0[2], a.0[3] + b.0[3]];
            let m = MultiIndex(sum);
            if m.order() <= MAX_ORDER {
                products.push((ia as u8, ib as u8, slot_of[lookup_key(&m)]));
            }
        }
    }

    let mut raise = [[NO_SLOT; N_COEFFS]; DIM];
    for (axis, row) in raise.iter_mut().enumerate() {
        for (s, m) in indices.iter().enumerate() {
            if m.order() < MAX_ORDER {
                let mut e = m.0;
                e[axis] += 1;
                row[s] = slot_of[lookup_key(&MultiIndex(e))];
            }
        }
    }

    Tables { indices, slot_of, factorial, products, raise }
});

/// Elementary functions that can be composed with a jet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Elementary {
    Sin,
    Cos,
    Exp,
    Log,
    Sinh,
    Cosh,
    Sqrt,
}

impl Elementary {
    pub fn name(self) -> &'static str {
        match self {
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Exp => "exp",
            Elementary::Log => "log",
            Elementary::Sinh => "sinh",
            Elementary::Cosh => "cosh",
            Elementary::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Elementary::Sin,
            "cos" => Elementary::Cos,
            "exp" => Elementary::Exp,
            "log" | "ln" => Elementary::Log,
            "sinh" => Elementary::Sinh,
            "cosh" => Elementary::Cosh,
            "sqrt" => Elementary::Sqrt,
            _ => return None,
        })
    }

    /// Plain real evaluation with the same domain rules as [`Elementary::derivatives`].
    pub fn eval(self, x: f64) -> Result<f64, JetError> {
        self.derivatives(x).map(|d| d[0])
    }

    /// `f, f', f'', f'''` at `x`.
    pub fn derivatives(self, x: f64) -> Result<[f64; 4], JetError> {
        let domain = |ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(JetError::Domain { func: self.name(), value: x })
            }
        };
        Ok(match self {
            Elementary::Sin => {
                let (s, c) = x.sin_cos();
                [s, c, -s, -c]
            }
            Elementary::Cos => {
                let (s, c) = x.sin_cos();
                [c, -s, -c, s]
            }
            Elementary::Exp => {
                let e = x.exp();
                [e; 4]
            }
            Elementary::Log => {
                domain(x > 0.0)?;
                let r = 1.0 / x;
                [x.ln(), r, -r * r, 2.0 * r * r * r]
            }
            Elementary::Sinh => {
                let (s, c) = (x.sinh(), x.cosh());
                [s, c, s, c]
            }
            Elementary::Cosh => {
                let (s, c) = (x.sinh(), x.cosh());
                [c, s, c, s]
            }
            Elementary::Sqrt => {
                domain(x > 0.0)?;
                let r = x.sqrt();
                [r, 0.5 / r, -0.25 / (r * x), 0.375 / (r * x * x)]
            }
        })
    }
}

/// Order-3 Taylor jet of a scalar function of four coordinates.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet3 {
    coeffs: [f64; N_COEFFS],
}

impl fmt::Debug for Jet3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (m, c) in MultiIndex::all().iter().zip(&self.coeffs) {
            if *c != 0.0 {
                map.entry(&format_args!("{m}"), c);
            }
        }
        map.finish()
    }
}

impl Default for Jet3 {
    fn default() -> Self {
        Jet3::zero()
    }
}

impl Jet3 {
    pub const fn zero() -> Self {
        Jet3 { coeffs: [0.0; N_COEFFS] }
    }

    pub fn constant(value: f64) -> Self {
        let mut j = Jet3::zero();
        j.coeffs[0] = value;
        j
    }

    /// Jet of the coordinate function `x^axis` at a point where it equals `value`.
    pub fn var(axis: usize, value: f64) -> Result<Self, JetError> {
        let e = MultiIndex::unit(axis)?;
        let mut j = Jet3::constant(value);
        j.coeffs[e.slot()] = 1.0;
        Ok(j)
    }

    /// Builds a jet from Taylor-normalised coefficients in [`MultiIndex::all`] order.
    pub fn from_coeffs(coeffs: [f64; N_COEFFS]) -> Self {
        Jet3 { coeffs }
    }

    pub fn coeffs(&self) -> &[f64; N_COEFFS] {
        &self.coeffs
    }

    pub fn coeff(&self, m: &MultiIndex) -> f64 {
        self.coeffs[m.slot()]
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `∂^α f` at the expansion point.
    pub fn partial(&self, m: &MultiIndex) -> Result<f64, JetError> {
        if m.order() > MAX_ORDER {
            return Err(JetError::OrderTooHigh(m.order()));
        }
        let s = m.slot();
        Ok(self.coeffs[s] * TABLES.factorial[s])
    }

    /// Partial derivative along the listed axes, e.g. `&[1, 1]` for `∂₁∂₁`.
    pub fn partial_axes(&self, axes: &[usize]) -> Result<f64, JetError> {
        self.partial(&MultiIndex::from_axes(axes)?)
    }

    /// First partial `∂_axis f`.
    pub fn d1(&self, axis: usize) -> f64 {
        // the first-order block is (1,0,0,0), (0,1,0,0), ...
        self.coeffs[1 + axis]
    }

    /// Jet of `∂_axis f`. Only orders ≤ 2 of the result are meaningful; the
    /// order-3 slots are left at zero.
    pub fn derivative(&self, axis: usize) -> Jet3 {
        let raise = &TABLES.raise[axis];
        let mut out = Jet3::zero();
        for (s, &up) in raise.iter().enumerate() {
            if up != NO_SLOT {
                let k = TABLES.indices[up as usize].0[axis] as f64;
                out.coeffs[s] = k * self.coeffs[up as usize];
            }
        }
        out
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Jet3 {
        let mut out = *self;
        for (c, m) in out.coeffs.iter_mut().zip(MultiIndex::all()) {
            if m.order() > order {
                *c = 0.0;
            }
        }
        out
    }

    pub fn scale(&self, k: f64) -> Jet3 {
        let mut out = *self;
        out.coeffs.iter_mut().for_each(|c| *c *= k);
        out
    }

    /// The unique jet `c` with `rhs · c = self` to order 3, solved order by order.
    pub fn checked_div(&self, rhs: &Jet3) -> Result<Jet3, JetError> {
        let b0 = rhs.coeffs[0];
        if b0 == 0.0 || !b0.is_finite() {
            return Err(JetError::DivisionByZero);
        }
        let mut out = Jet3::zero();
        // slots are in graded order, so c_s is final once every b_β·c_{s-β}
        // with β ≠ 0 has been subtracted from acc[s]
        let mut acc = self.coeffs;
        for s in 0..N_COEFFS {
            let cs = acc[s] / b0;
            out.coeffs[s] = cs;
            if cs == 0.0 {
                continue;
            }
            for &(ib, io) in PRODUCTS_BY_RIGHT[s].iter() {
                if ib != 0 {
                    acc[io as usize] -= rhs.coeffs[ib as usize] * cs;
                }
            }
        }
        Ok(out)
    }

    pub fn recip(&self) -> Result<Jet3, JetError> {
        Jet3::constant(1.0).checked_div(self)
    }

    /// Composition `f ∘ self` from the derivatives of `f` at the value part.
    pub fn compose(&self, f: Elementary) -> Result<Jet3, JetError> {
        let d = f.derivatives(self.value())?;
        Ok(self.taylor_compose(&d))
    }

    fn taylor_compose(&self, d: &[f64; 4]) -> Jet3 {
        let mut h = *self;
        h.coeffs[0] = 0.0;
        let h2 = h * h;
        let h3 = h2 * h;
        let mut out = Jet3::constant(d[0]);
        for s in 1..N_COEFFS {
            out.coeffs[s] = d[1] * h.coeffs[s] + d[2] / 2.0 * h2.coeffs[s] + d[3] / 6.0 * h3.coeffs[s];
        }
        out
    }

    /// Integer power by repeated squaring; negative powers go through [`Jet3::recip`].
    pub fn powi(&self, n: i32) -> Result<Jet3, JetError> {
        let mut base = if n < 0 { self.recip()? } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = Jet3::constant(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// `self^c` for a constant exponent. Integer exponents use [`Jet3::powi`];
    /// anything else is `exp(c · log self)` and needs a positive value part.
    pub fn powf(&self, c: f64) -> Result<Jet3, JetError> {
        if let Some(n) = integer_exponent(c) {
            return self.powi(n);
        }
        self.compose(Elementary::Log)?.scale(c).compose(Elementary::Exp)
    }
}

/// `Some(n)` when `c` is an integer small enough to expand by multiplication.
pub fn integer_exponent(c: f64) -> Option<i32> {
    (c.fract() == 0.0 && c.abs() <= 64.0).then_some(c as i32)
}

/// For each right-operand slot, the `(left, out)` slot pairs of the product table.
static PRODUCTS_BY_RIGHT: LazyLock<Vec<Vec<(u8, u8)>>> = LazyLock::new(|| {
    let mut by = vec![Vec::new(); N_COEFFS];
    for &(ia, ib, io) in TABLES.products.iter() {
        by[ib as usize].push((ia, io));
    }
    by
});

impl Add for Jet3 {
    type Output = Jet3;
    fn add(mut self, rhs: Jet3) -> Jet3 {
        self += rhs;
        self
    }
}

impl AddAssign for Jet3 {
    fn add_assign(&mut self, rhs: Jet3) {
        self.coeffs.iter_mut().zip(rhs.coeffs).for_each(|(a, b)| *a += b);
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(mut self, rhs: Jet3) -> Jet3 {
        self -= rhs;
        self
    }
}

impl SubAssign for Jet3 {
    fn sub_assign(&mut self, rhs: Jet3) {
        self.coeffs.iter_mut().zip(rhs.coeffs).for_each(|(a, b)| *a -= b);
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        self.scale(-1.0)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: Jet3) -> Jet3 {
        let mut out = Jet3::zero();
        for &(ia, ib, io) in TABLES.products.iter() {
            out.coeffs[io as usize] += self.coeffs[ia as usize] * rhs.coeffs[ib as usize];
        }
        out
    }
}

impl Mul<f64> for Jet3 {
    type Output = Jet3;
    fn mul(self, k: f64) -> Jet3 {
        self.scale(k)
    }
}

/// 4×4 matrix of jets.
pub type JetMatrix = [[Jet3; DIM]; DIM];

/// Inverse of a jet matrix by Gauss–Jordan elimination over the jet ring,
/// pivoting on value parts.
pub fn jet_matrix_inverse(m: &JetMatrix) -> Result<JetMatrix, JetError> {
    let scale = m.iter().flatten().map(|j| j.value().abs()).fold(0.0_f64, f64::max);
    let mut a = *m;
    let mut inv = [[Jet3::zero(); DIM]; DIM];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = Jet3::constant(1.0);
    }
    for col in 0..DIM {
        let pivot_row = (col..DIM).max_by(|&x, &y| a[x][col].value().abs().total_cmp(&a[y][col].value().abs())).unwrap_or(col);
        let pivot = a[pivot_row][col].value();
        if pivot.abs() <= 1e-14 * scale || !pivot.is_finite() {
            return Err(JetError::SingularMatrix { column: col, pivot });
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let p = a[col][col].recip()?;
        for k in 0..DIM {
            a[col][k] = a[col][k] * p;
            inv[col][k] = inv[col][k] * p;
        }
        for r in 0..DIM {
            if r == col {
                continue;
            }
            let factor = a[r][col];
            if factor.coeffs.iter().all(|&c| c == 0.0) {
                continue;
            }
            for k in 0..DIM {
                let (ak, ik) = (a[col][k], inv[col][k]);
                a[r][k] -= factor * ak;
                inv[r][k] -= factor * ik;
            }
        }
    }
    Ok(inv)
}
