//! Normal-ordered operator expressions.
//!
//! A term is `K(r, s) * x^a * p^b` with every momentum to the right and the
//! last coordinate carrying degree at most one (`x_N^2 = r^2 - sum x_i^2`).
//! Coefficients live in [`RadialCoefficient`]; `hbar = 1`, `[x_i, p_j] = i delta_ij`.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use super::coeff::Coeff;
use super::gauss::{GaussianRational, Rational};
use super::radial::{Lambda, RadialCoefficient};
use super::AlgebraError;

pub const MAX_DIM: usize = 6;

/// Exponent multi-index over `N <= MAX_DIM` coordinates.
pub type Exps = [u8; MAX_DIM];

fn exps_add(a: &Exps, b: &Exps) -> Exps {
    let mut out = [0u8; MAX_DIM];
    for k in 0..MAX_DIM {
        out[k] = a[k] + b[k];
    }
    out
}

fn exps_total(a: &Exps) -> u32 {
    a.iter().map(|&e| e as u32).sum()
}

fn unit(i: usize) -> Exps {
    let mut e = [0u8; MAX_DIM];
    e[i] = 1;
    e
}

/// Dimension and deformation parameter shared by all operands of an operation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ctx {
    pub dim: usize,
    pub lambda: Lambda,
}

impl Ctx {
    pub fn new(dim: usize, lambda: Lambda) -> Result<Self, AlgebraError> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(AlgebraError::UnsupportedDimension(dim));
        }
        Ok(Self { dim, lambda })
    }

    pub fn symbolic(dim: usize) -> Self {
        Self::new(dim, Lambda::Symbolic).expect("dimension in range")
    }

    pub fn with_value(dim: usize, q: Rational) -> Self {
        Self::new(dim, Lambda::Value(q)).expect("dimension in range")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono {
    pub x: Exps,
    pub p: Exps,
}

impl Mono {
    pub const ONE: Mono = Mono {
        x: [0; MAX_DIM],
        p: [0; MAX_DIM],
    };

    pub fn p_degree(&self) -> u32 {
        exps_total(&self.p)
    }

    pub fn x_degree(&self) -> u32 {
        exps_total(&self.x)
    }
}

/// Borrowed view of one normal-ordered term.
#[derive(Clone, Copy, Debug)]
pub struct Term<'a> {
    pub coeff: &'a RadialCoefficient,
    pub x_exp: &'a Exps,
    pub p_exp: &'a Exps,
}

/// Generators accepted by [`OperatorExpr::atom`].
#[derive(Clone, Debug)]
pub enum Atom {
    /// `x_i`, 1-based.
    X(usize),
    /// `p_i`, 1-based.
    P(usize),
    R(i32),
    S(i64),
    Constant(Coeff),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorExpr {
    ctx: Ctx,
    terms: BTreeMap<Mono, RadialCoefficient>,
}

/// A function of the coordinates: `sum_a K_a(r) x^a` in reduced form.
type Func = BTreeMap<Exps, RadialCoefficient>;

fn func_add(f: &mut Func, x: Exps, c: RadialCoefficient) {
    if c.is_zero() {
        return;
    }
    match f.get_mut(&x) {
        Some(v) => {
            *v = v.add(&c);
            if v.is_zero() {
                f.remove(&x);
            }
        }
        None => {
            f.insert(x, c);
        }
    }
}

impl OperatorExpr {
    pub fn zero(ctx: &Ctx) -> Self {
        Self {
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::scalar(ctx, RadialCoefficient::one())
    }

    pub fn scalar(ctx: &Ctx, c: RadialCoefficient) -> Self {
        let mut out = Self::zero(ctx);
        let c = c.normalized(&ctx.lambda);
        if !c.is_zero() {
            out.terms.insert(Mono::ONE, c);
        }
        out
    }

    pub fn constant(ctx: &Ctx, c: GaussianRational) -> Self {
        Self::scalar(ctx, RadialCoefficient::constant(c))
    }

    pub fn atom(kind: Atom, ctx: &Ctx) -> Result<Self, AlgebraError> {
        let check = |i: usize| -> Result<usize, AlgebraError> {
            if i == 0 || i > ctx.dim {
                Err(AlgebraError::IndexOutOfRange { index: i, dim: ctx.dim })
            } else {
                Ok(i - 1)
            }
        };
        Ok(match kind {
            Atom::X(i) => {
                let k = check(i)?;
                Self::from_mono(ctx, Mono { x: unit(k), p: [0; MAX_DIM] }, RadialCoefficient::one())
            }
            Atom::P(i) => {
                let k = check(i)?;
                Self::from_mono(ctx, Mono { x: [0; MAX_DIM], p: unit(k) }, RadialCoefficient::one())
            }
            Atom::R(a) => Self::scalar(ctx, RadialCoefficient::r_pow(a)),
            Atom::S(b) => Self::scalar(ctx, RadialCoefficient::s_pow(b, &ctx.lambda)),
            Atom::Constant(c) => Self::scalar(ctx, RadialCoefficient::from_coeff(c)),
        })
    }

    pub fn x(i: usize, ctx: &Ctx) -> Self {
        Self::atom(Atom::X(i), ctx).expect("coordinate index in range")
    }

    pub fn p(i: usize, ctx: &Ctx) -> Self {
        Self::atom(Atom::P(i), ctx).expect("momentum index in range")
    }

    /// Builds `c * x^x * p^p`, reducing `x_N` powers.
    pub fn from_mono(ctx: &Ctx, mono: Mono, c: RadialCoefficient) -> Self {
        let mut out = Self::zero(ctx);
        for (x, k) in reduce_x(ctx, mono.x, c) {
            out.add_term(Mono { x, p: mono.p }, k);
        }
        out
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim
    }

    pub fn lambda(&self) -> &Lambda {
        &self.ctx.lambda
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = Term<'_>> {
        self.terms.iter().map(|(m, c)| Term {
            coeff: c,
            x_exp: &m.x,
            p_exp: &m.p,
        })
    }

    pub(crate) fn raw_terms(&self) -> &BTreeMap<Mono, RadialCoefficient> {
        &self.terms
    }

    /// Coefficient of a given normal-ordered monomial (zero if absent).
    pub fn coefficient(&self, mono: &Mono) -> RadialCoefficient {
        self.terms.get(mono).cloned().unwrap_or_default()
    }

    pub fn max_p_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.p_degree()).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Mono, c: RadialCoefficient) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_ctx(&self, o: &Self) -> Result<(), AlgebraError> {
        if self.ctx.dim != o.ctx.dim {
            return Err(AlgebraError::DimensionMismatch(self.ctx.dim, o.ctx.dim));
        }
        if self.ctx.lambda != o.ctx.lambda {
            return Err(AlgebraError::LambdaMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.check_ctx(o)?;
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.try_add(&-o)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ctx);
        }
        Self {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, k)| (*m, k.scale(c))).collect(),
        }
    }

    /// Left multiplication by a function of `r` (no reordering needed).
    pub fn scale_radial(&self, c: &RadialCoefficient) -> Self {
        let mut out = Self::zero(&self.ctx);
        for (m, k) in &self.terms {
            out.add_term(*m, c.mul(k, &self.ctx.lambda).normalized(&self.ctx.lambda));
        }
        out
    }

    pub fn scale_coeff(&self, c: &Coeff) -> Self {
        self.scale_radial(&RadialCoefficient::from_coeff(c.clone()))
    }

    /// Canonical product `self * o`.
    pub fn try_mul(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.check_ctx(o)?;
        Ok(product(&self.ctx, &self.terms, &o.terms))
    }

    pub fn commutator(&self, o: &Self) -> Result<Self, AlgebraError> {
        Ok(self.try_mul(o)?.try_sub(&o.try_mul(self)?)?)
    }

    pub fn anticommutator(&self, o: &Self) -> Result<Self, AlgebraError> {
        Ok(self.try_mul(o)?.try_add(&o.try_mul(self)?)?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Hermitian conjugate: reverse factor order and conjugate coefficients.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(&self.ctx);
        // group by momentum part: sum_b p^b * (sum_a conj(K) x^a)
        let mut by_p: BTreeMap<Exps, Func> = BTreeMap::new();
        for (m, c) in &self.terms {
            func_add(by_p.entry(m.p).or_default(), m.x, c.conj());
        }
        let mut left: BTreeMap<Mono, RadialCoefficient> = BTreeMap::new();
        for (p, func) in by_p {
            left.clear();
            left.insert(
                Mono {
                    x: [0; MAX_DIM],
                    p,
                },
                RadialCoefficient::one(),
            );
            let right: BTreeMap<Mono, RadialCoefficient> = func
                .into_iter()
                .map(|(x, c)| (Mono { x, p: [0; MAX_DIM] }, c))
                .collect();
            let prod = product(&self.ctx, &left, &right);
            for (m, c) in prod.terms {
                out.add_term(m, c);
            }
        }
        out
    }

    pub fn is_self_adjoint(&self) -> bool {
        (&self.adjoint() - self).is_zero()
    }

    /// Exact equality (difference canonicalizes to zero).
    pub fn equals(&self, o: &Self) -> bool {
        match self.try_sub(o) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }

    /// Replaces the symbolic deformation parameter by `q`.
    pub fn subst_lambda(&self, q: &Rational) -> Result<Self, AlgebraError> {
        let ctx = match &self.ctx.lambda {
            Lambda::Symbolic => Ctx::new(self.ctx.dim, Lambda::Value(q.clone()))?,
            Lambda::Value(v) if v == q => return Ok(self.clone()),
            Lambda::Value(_) => return Err(AlgebraError::LambdaMismatch),
        };
        let mut out = Self::zero(&ctx);
        for (m, c) in &self.terms {
            let c = c
                .subst_lam(q)
                .ok_or_else(|| AlgebraError::DegenerateSubstitution(super::gauss::fmt_rational(q)))?;
            out.add_term(*m, c);
        }
        Ok(out)
    }

    /// Largest `lam` degree among all coefficients.
    pub fn max_lam_degree(&self) -> u32 {
        self.terms.values().map(|c| c.max_lam_degree()).max().unwrap_or(0)
    }
}

/// Reduces `c * x^x` so that the last coordinate has degree <= 1.
fn reduce_x(ctx: &Ctx, x: Exps, c: RadialCoefficient) -> Vec<(Exps, RadialCoefficient)> {
    let n = ctx.dim - 1;
    if x[n] < 2 {
        return vec![(x, c)];
    }
    let mut base = x;
    base[n] -= 2;
    let mut out = Vec::with_capacity(n + 1);
    out.extend(reduce_x(ctx, base, c.shift_r(2)));
    for i in 0..n {
        let mut xi = base;
        xi[i] += 2;
        out.extend(reduce_x(ctx, xi, c.neg()));
    }
    out
}

fn func_mul_mono(ctx: &Ctx, out: &mut Func, f: &Func, x: &Exps, k: &RadialCoefficient) {
    for (a, c) in f {
        let coeff = k.mul(c, &ctx.lambda);
        for (xr, cr) in reduce_x(ctx, exps_add(a, x), coeff) {
            func_add(out, xr, cr);
        }
    }
}

/// `d/dx_j` of a reduced function.
fn func_deriv(ctx: &Ctx, f: &Func, j: usize) -> Func {
    let mut out = Func::new();
    for (a, c) in f {
        // d/dx_j K(r) = K'(r) x_j / r
        let dk = c.deriv_r(&ctx.lambda);
        if !dk.is_zero() {
            let mut xa = *a;
            xa[j] += 1;
            for (xr, cr) in reduce_x(ctx, xa, dk.shift_r(-1)) {
                func_add(&mut out, xr, cr);
            }
        }
        if a[j] > 0 {
            let mut xa = *a;
            xa[j] -= 1;
            func_add(&mut out, xa, c.scale(&GaussianRational::from_int(a[j] as i64)));
        }
    }
    out
}

fn binomial(n: u8, k: u8) -> i64 {
    let mut acc: i64 = 1;
    for t in 0..k as i64 {
        acc = acc * (n as i64 - t) / (t + 1);
    }
    acc
}

/// All multi-indices `g <= b`.
fn sub_indices(b: &Exps, dim: usize) -> Vec<Exps> {
    let mut out = vec![[0u8; MAX_DIM]];
    for j in 0..dim {
        let mut next = Vec::with_capacity(out.len() * (b[j] as usize + 1));
        for g in &out {
            for v in 0..=b[j] {
                let mut h = *g;
                h[j] = v;
                next.push(h);
            }
        }
        out = next;
    }
    out
}

/// Normal-ordered product via the Leibniz rule
/// `p^b f = sum_{g <= b} C(b, g) (-i)^{|g|} (d^g f) p^{b-g}`.
fn product(
    ctx: &Ctx,
    a: &BTreeMap<Mono, RadialCoefficient>,
    b: &BTreeMap<Mono, RadialCoefficient>,
) -> OperatorExpr {
    let mut out = OperatorExpr::zero(ctx);
    if a.is_empty() || b.is_empty() {
        return out;
    }
    // Left terms grouped by momentum exponent: sum_a K x^a p^beta.
    let mut left: BTreeMap<Exps, Func> = BTreeMap::new();
    for (m, c) in a {
        func_add(left.entry(m.p).or_default(), m.x, c.clone());
    }
    // Right terms grouped by momentum exponent as well.
    let mut right: BTreeMap<Exps, Func> = BTreeMap::new();
    for (m, c) in b {
        func_add(right.entry(m.p).or_default(), m.x, c.clone());
    }
    let mut acc: HashMap<Mono, RadialCoefficient> = HashMap::new();
    for (pd, phi) in &right {
        let mut derivs: HashMap<Exps, Func> = HashMap::new();
        derivs.insert([0; MAX_DIM], phi.clone());
        for (pb, psi) in &left {
            for g in sub_indices(pb, ctx.dim) {
                let dphi = derivative(ctx, &mut derivs, &g).clone();
                if dphi.is_empty() {
                    continue;
                }
                let mut weight: i64 = 1;
                for j in 0..ctx.dim {
                    weight *= binomial(pb[j], g[j]);
                }
                let w = &GaussianRational::neg_i_pow(exps_total(&g)) * &GaussianRational::from_int(weight);
                let mut pnew = [0u8; MAX_DIM];
                for j in 0..MAX_DIM {
                    pnew[j] = pb[j] - g[j] + pd[j];
                }
                let mut prod = Func::new();
                for (x, k) in psi {
                    func_mul_mono(ctx, &mut prod, &dphi, x, &k.scale(&w));
                }
                for (x, c) in prod {
                    let key = Mono { x, p: pnew };
                    match acc.get_mut(&key) {
                        Some(v) => *v = v.add(&c),
                        None => {
                            acc.insert(key, c);
                        }
                    }
                }
            }
        }
    }
    for (m, c) in acc {
        let c = c.normalized(&ctx.lambda);
        if !c.is_zero() {
            out.terms.insert(m, c);
        }
    }
    out
}

fn derivative<'a>(ctx: &Ctx, cache: &'a mut HashMap<Exps, Func>, g: &Exps) -> &'a Func {
    if !cache.contains_key(g) {
        let j = (0..ctx.dim).find(|&j| g[j] > 0).expect("nonzero index");
        let mut lower = *g;
        lower[j] -= 1;
        let base = derivative(ctx, cache, &lower).clone();
        let d = func_deriv(ctx, &base, j);
        cache.insert(*g, d);
    }
    &cache[g]
}

impl Add for &OperatorExpr {
    type Output = OperatorExpr;
    fn add(self, o: &OperatorExpr) -> OperatorExpr {
        self.try_add(o).expect("operands share dimension and lambda")
    }
}

impl Sub for &OperatorExpr {
    type Output = OperatorExpr;
    fn sub(self, o: &OperatorExpr) -> OperatorExpr {
        self.try_sub(o).expect("operands share dimension and lambda")
    }
}

impl Mul for &OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, o: &OperatorExpr) -> OperatorExpr {
        self.try_mul(o).expect("operands share dimension and lambda")
    }
}

impl Neg for &OperatorExpr {
    type Output = OperatorExpr;
    fn neg(self) -> OperatorExpr {
        OperatorExpr {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }
}

impl Add for OperatorExpr {
    type Output = OperatorExpr;
    fn add(self, o: OperatorExpr) -> OperatorExpr {
        &self + &o
    }
}

impl Sub for OperatorExpr {
    type Output = OperatorExpr;
    fn sub(self, o: OperatorExpr) -> OperatorExpr {
        &self - &o
    }
}

impl Mul for OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, o: OperatorExpr) -> OperatorExpr {
        &self * &o
    }
}

impl Neg for OperatorExpr {
    type Output = OperatorExpr;
    fn neg(self) -> OperatorExpr {
        -&self
    }
}

/// `sum_i a_i` for a non-empty iterator (zero in `ctx` otherwise).
pub fn sum<'a>(ctx: &Ctx, it: impl IntoIterator<Item = &'a OperatorExpr>) -> OperatorExpr {
    it.into_iter().fold(OperatorExpr::zero(ctx), |acc, e| &acc + e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gauss::rat;

    fn ctx2() -> Ctx {
        Ctx::symbolic(2)
    }

    #[test]
    fn canonical_commutator() {
        let c = ctx2();
        let x1 = OperatorExpr::x(1, &c);
        let p1 = OperatorExpr::p(1, &c);
        let d = &(&p1 * &x1) - &(&x1 * &p1);
        assert_eq!(d, OperatorExpr::constant(&c, -GaussianRational::i()));
        let x2 = OperatorExpr::x(2, &c);
        assert!(x1.commutator(&x2).unwrap().is_zero());
        assert!(!x1.is_zero());
    }

    #[test]
    fn x_last_reduction() {
        let c = ctx2();
        let x1 = OperatorExpr::x(1, &c);
        let x2 = OperatorExpr::x(2, &c);
        let s = &(&x1 * &x1) + &(&x2 * &x2);
        assert_eq!(s, OperatorExpr::atom(Atom::R(2), &c).unwrap());
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn momentum_past_inverse_radius() {
        let c = ctx2();
        let p1 = OperatorExpr::p(1, &c);
        let rinv = OperatorExpr::atom(Atom::R(-1), &c).unwrap();
        let got = &p1 * &rinv;
        let x1 = OperatorExpr::x(1, &c);
        let r3 = OperatorExpr::atom(Atom::R(-3), &c).unwrap();
        let expect = &(&rinv * &p1) + &(&r3 * &x1).scale(&GaussianRational::i());
        assert_eq!(got, expect);
    }

    #[test]
    fn s_atoms() {
        let c = ctx2();
        let s2 = OperatorExpr::atom(Atom::S(2), &c).unwrap();
        let sm2 = OperatorExpr::atom(Atom::S(-2), &c).unwrap();
        assert!((&s2 * &sm2).equals(&OperatorExpr::one(&c)));
        let s1 = OperatorExpr::atom(Atom::S(1), &c).unwrap();
        assert!(s1.subst_lambda(&rat(0, 1)).unwrap().equals(&OperatorExpr::one(&Ctx::with_value(2, rat(0, 1)))));
    }

    #[test]
    fn index_errors() {
        let c = ctx2();
        assert!(OperatorExpr::atom(Atom::X(3), &c).is_err());
        assert!(OperatorExpr::atom(Atom::P(0), &c).is_err());
        let c3 = Ctx::symbolic(3);
        assert!(OperatorExpr::x(1, &c).try_mul(&OperatorExpr::x(1, &c3)).is_err());
    }

    #[test]
    fn adjoint_basics() {
        let c = ctx2();
        let x1 = OperatorExpr::x(1, &c);
        let p1 = OperatorExpr::p(1, &c);
        let ix = x1.scale(&GaussianRational::i());
        assert_eq!(ix.adjoint(), x1.scale(&-GaussianRational::i()));
        let xp = &x1 * &p1;
        let expect = &xp - &OperatorExpr::constant(&c, GaussianRational::i());
        assert_eq!(xp.adjoint(), expect);
        assert_eq!(xp.adjoint(), &p1 * &x1);
    }
}
