//! Exact linear fits of an operator against a finite basis with
//! coefficients polynomial in `lam`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::{
    print, Coeff, GaussianRational, Lambda, Mono, Monomial, OperatorExpr, Poly, Rational,
};
use crate::systems::{GeneratorSet, LsqConvention};

use super::SymmetryError;

/// Bounds for [`fit_scalar`]: total degree in `(H, Lsq, L12)` and degree in `lam`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeBounds {
    pub total: u32,
    pub lambda: u32,
}

impl Default for DegreeBounds {
    fn default() -> Self {
        Self { total: 3, lambda: 4 }
    }
}

/// Solution of `target = sum_k c_k(lam) basis_k`.
#[derive(Clone, Debug)]
pub struct LinearFit {
    /// One polynomial in `lam` per basis element (`r` exponent always 0).
    pub coeffs: Vec<Poly>,
    /// Free unknowns were set to zero.
    pub ambiguous: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Key {
    mono: Mono,
    s: bool,
}

fn split(e: &OperatorExpr) -> BTreeMap<Key, Coeff> {
    let mut out = BTreeMap::new();
    for t in e.terms() {
        let mono = Mono {
            x: *t.x_exp,
            p: *t.p_exp,
        };
        if !t.coeff.plain.is_zero() {
            out.insert(Key { mono, s: false }, t.coeff.plain.clone());
        }
        if !t.coeff.s_part.is_zero() {
            out.insert(Key { mono, s: true }, t.coeff.s_part.clone());
        }
    }
    out
}

/// Sparse row of an augmented system.
type Row = BTreeMap<usize, GaussianRational>;

struct Eliminator {
    pivots: BTreeMap<usize, (Row, GaussianRational)>,
    columns: BTreeSet<usize>,
}

impl Eliminator {
    fn new() -> Self {
        Self {
            pivots: BTreeMap::new(),
            columns: BTreeSet::new(),
        }
    }

    fn reduce(&self, row: &mut Row, rhs: &mut GaussianRational) {
        loop {
            let col = row.keys().copied().find(|c| self.pivots.contains_key(c));
            let Some(col) = col else { return };
            let factor = row[&col].clone();
            let (prow, prhs) = &self.pivots[&col];
            for (c, v) in prow {
                let e = row.entry(*c).or_insert_with(GaussianRational::zero);
                *e -= &(&factor * v);
                if e.is_zero() {
                    row.remove(c);
                }
            }
            *rhs -= &(&factor * prhs);
        }
    }

    /// Returns false when the row is inconsistent with earlier rows.
    fn push(&mut self, mut row: Row, mut rhs: GaussianRational) -> bool {
        row.retain(|_, v| !v.is_zero());
        self.columns.extend(row.keys().copied());
        self.reduce(&mut row, &mut rhs);
        let Some((&col, lead)) = row.iter().next() else {
            return rhs.is_zero();
        };
        let inv = lead.inv().expect("nonzero pivot");
        let row: Row = row.iter().map(|(c, v)| (*c, v * &inv)).collect();
        let rhs = &rhs * &inv;
        // keep reduced echelon form
        for (prow, prhs) in self.pivots.values_mut() {
            if let Some(f) = prow.get(&col).cloned() {
                for (c, v) in &row {
                    let e = prow.entry(*c).or_insert_with(GaussianRational::zero);
                    *e -= &(&f * v);
                    if e.is_zero() {
                        prow.remove(c);
                    }
                }
                *prhs -= &(&f * &rhs);
            }
        }
        self.pivots.insert(col, (row, rhs));
        true
    }

    /// Basic solution (free unknowns zero) and whether any were free.
    fn solve(&self, n: usize) -> (Vec<GaussianRational>, bool) {
        let mut x = vec![GaussianRational::zero(); n];
        for (col, (_, rhs)) in &self.pivots {
            x[*col] = rhs.clone();
        }
        let ambiguous = self.columns.iter().any(|c| !self.pivots.contains_key(c));
        (x, ambiguous)
    }
}

fn lcm_denominator<'a>(cs: impl IntoIterator<Item = &'a Coeff>) -> Poly {
    let mut max: BTreeMap<Poly, u32> = BTreeMap::new();
    for c in cs {
        for (f, e) in c.denominator() {
            let v = max.entry(f.clone()).or_insert(0);
            *v = (*v).max(e);
        }
    }
    let mut d = Poly::one();
    for (f, e) in max {
        d = &d * &f.pow(e);
    }
    d
}

/// `lam^t * op` in the operator's context.
fn lam_power(c: &Coeff, lam: &Lambda, t: u32) -> Coeff {
    let mut out = c.clone();
    for _ in 0..t {
        out = out.mul(&lam.coeff());
    }
    out
}

/// Solves `target = sum_k c_k(lam) basis_k` exactly, `deg c_k <= lam_degree`.
///
/// Each normal-ordered coefficient is brought over a common denominator and
/// the numerators are matched monomial by monomial in `(lam, r)`. With a
/// fixed `lam` the coefficients are constants.
pub fn fit_linear(
    target: &OperatorExpr,
    basis: &[OperatorExpr],
    lam_degree: u32,
) -> Result<LinearFit, SymmetryError> {
    let lam = target.lambda().clone();
    let tdeg = if matches!(lam, Lambda::Symbolic) { lam_degree } else { 0 };
    let width = tdeg as usize + 1;
    let nunk = basis.len() * width;

    let tsplit = split(target);
    let bsplit: Vec<_> = basis.iter().map(split).collect();
    let mut keys: BTreeSet<&Key> = tsplit.keys().collect();
    for b in &bsplit {
        keys.extend(b.keys());
    }

    let mut elim = Eliminator::new();
    for key in keys {
        let mut present: Vec<&Coeff> = bsplit.iter().filter_map(|b| b.get(key)).collect();
        let tc = tsplit.get(key);
        if let Some(t) = tc {
            present.push(t);
        }
        let d = Coeff::from_poly(lcm_denominator(present));
        let numer = |c: &Coeff| -> Poly {
            let n = c.mul(&d);
            debug_assert!(!n.has_denominator());
            n.numerator().clone()
        };
        // rows indexed by (lam^a r^b) of the cleared equation
        let mut rows: BTreeMap<Monomial, (Row, GaussianRational)> = BTreeMap::new();
        for (k, b) in bsplit.iter().enumerate() {
            let Some(c) = b.get(key) else { continue };
            let n = numer(c);
            for t in 0..=tdeg {
                for (m, v) in n.terms() {
                    let mm = Monomial::new(m.lam + t, m.r);
                    let e = rows.entry(mm).or_insert_with(|| (Row::new(), GaussianRational::zero()));
                    let slot = e.0.entry(k * width + t as usize).or_insert_with(GaussianRational::zero);
                    *slot += v;
                }
            }
        }
        if let Some(t) = tc {
            for (m, v) in numer(t).terms() {
                let e = rows.entry(*m).or_insert_with(|| (Row::new(), GaussianRational::zero()));
                e.1 += v;
            }
        }
        for (_, (row, rhs)) in rows {
            if !elim.push(row, rhs) {
                return Err(SymmetryError::NoFit(format!(
                    "inconsistent equations at term {}",
                    key_label(key, target.dim())
                )));
            }
        }
    }
    let (x, ambiguous) = elim.solve(nunk);
    let coeffs: Vec<Poly> = (0..basis.len())
        .map(|k| {
            Poly::from_terms((0..width).map(|t| (Monomial::new(t as u32, 0), x[k * width + t].clone())))
        })
        .collect();

    // the definition of success: exact zero residual
    let mut rebuilt = OperatorExpr::zero(target.ctx());
    for (b, c) in basis.iter().zip(&coeffs) {
        rebuilt = &rebuilt + &b.scale_coeff(&lam_poly_coeff(c, &lam));
    }
    let residual = &rebuilt - target;
    if !residual.is_zero() {
        return Err(SymmetryError::NoFit(format!("residual {}", print(&residual))));
    }
    Ok(LinearFit { coeffs, ambiguous })
}

fn key_label(k: &Key, dim: usize) -> String {
    let mut parts = Vec::new();
    for i in 0..dim {
        if k.mono.x[i] > 0 {
            parts.push(format!("x{}^{}", i + 1, k.mono.x[i]));
        }
    }
    for i in 0..dim {
        if k.mono.p[i] > 0 {
            parts.push(format!("p{}^{}", i + 1, k.mono.p[i]));
        }
    }
    if k.s {
        parts.push("s".into());
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// A polynomial in `lam` as a coefficient in the given context.
pub fn lam_poly_coeff(p: &Poly, lam: &Lambda) -> Coeff {
    let mut out = Coeff::zero();
    for (m, v) in p.terms() {
        out = out.add(&lam_power(&Coeff::constant(v.clone()), lam, m.lam));
    }
    out
}

/// Exponents `(a, b, c)` of `H^a Lsq^b L12^c`.
pub type BasisExps = (u32, u32, u32);

#[derive(Clone, Debug)]
pub struct FitTerm {
    pub exps: BasisExps,
    pub coeff: Poly,
}

/// A target written as `sum coeff(lam) H^a Lsq^b L12^c`.
#[derive(Clone, Debug)]
pub struct FitResult {
    pub terms: Vec<FitTerm>,
    pub convention: LsqConvention,
    pub ambiguous: bool,
    /// Always zero for a returned fit; kept for reporting.
    pub residual: OperatorExpr,
}

impl FitResult {
    /// Specializes to a polynomial in `(E, m)` on a 2-D weight-`m` state,
    /// where `L12 -> m` and `Lsq -> k m^2` (`k` from the convention).
    pub fn to_em(&self, lam: &Rational) -> EmPoly {
        let k = Rational::from_integer(self.convention.factor().into());
        let mut out = EmPoly::default();
        for t in &self.terms {
            let c = t.coeff.subst_lam(lam);
            let v = c.coeff(Monomial::new(0, 0));
            if v.is_zero() {
                continue;
            }
            let (a, b, cexp) = t.exps;
            let scale = num_traits::pow(k.clone(), b as usize);
            out.add(a, 2 * b + cexp, &v.scale(&scale));
        }
        out
    }
}

fn basis_label(e: BasisExps) -> String {
    let mut parts = Vec::new();
    for (name, k) in [("H", e.0), ("Lsq", e.1), ("L12", e.2)] {
        match k {
            0 => {}
            1 => parts.push(name.to_string()),
            _ => parts.push(format!("{name}^{k}")),
        }
    }
    parts.join("*")
}

fn lam_poly_label(p: &Poly) -> String {
    p.terms()
        .map(|(m, v)| {
            let mut f = Vec::new();
            if !(v.is_one() && m.lam > 0) {
                f.push(v.to_string());
            }
            match m.lam {
                0 => {}
                1 => f.push("lam".into()),
                k => f.push(format!("lam^{k}")),
            }
            f.join("*")
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

impl fmt::Display for FitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let c = if t.coeff.len() > 1 {
                    format!("({})", lam_poly_label(&t.coeff))
                } else {
                    lam_poly_label(&t.coeff)
                };
                let b = basis_label(t.exps);
                match (c.as_str(), b.is_empty()) {
                    (_, true) => c,
                    ("1", false) => b,
                    _ => format!("{c}*{b}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Basis monomials `H^a Lsq^b L12^c` up to the bounds, pruned by the
/// momentum degree of the target. In 2-D `Lsq` is a multiple of `L12^2`,
/// so only `c <= 1` is used there; in higher dimensions `L12` is omitted.
pub fn scalar_basis(gens: &GeneratorSet, bounds: DegreeBounds, max_p: u32) -> Vec<(BasisExps, OperatorExpr)> {
    let ctx = gens.ctx();
    let l12 = gens.angular(1, 2);
    let cmax = if ctx.dim == 2 { 1 } else { 0 };
    let mut out = Vec::new();
    let mut hpow = vec![OperatorExpr::one(ctx)];
    let mut lpow = vec![OperatorExpr::one(ctx)];
    for k in 1..=bounds.total {
        if 2 * k <= max_p {
            hpow.push(&hpow[k as usize - 1] * &gens.h);
            lpow.push(&lpow[k as usize - 1] * &gens.lsq);
        }
    }
    for a in 0..=bounds.total {
        for b in 0..=(bounds.total - a) {
            for c in 0..=cmax.min(bounds.total - a - b) {
                if 2 * a + 2 * b + c > max_p {
                    continue;
                }
                let mut e = &hpow[a as usize] * &lpow[b as usize];
                if c == 1 {
                    e = &e * &l12;
                }
                out.push(((a, b, c), e));
            }
        }
    }
    out
}

/// Writes `target` as a polynomial in `(H, Lsq, L12)` with coefficients
/// polynomial in `lam`.
pub fn fit_scalar(
    target: &OperatorExpr,
    gens: &GeneratorSet,
    bounds: DegreeBounds,
) -> Result<FitResult, SymmetryError> {
    if target.dim() != gens.ctx().dim || target.lambda() != &gens.ctx().lambda {
        return Err(SymmetryError::Algebra(crate::algebra::AlgebraError::LambdaMismatch));
    }
    let basis = scalar_basis(gens, bounds, target.max_p_degree());
    let ops: Vec<OperatorExpr> = basis.iter().map(|(_, e)| e.clone()).collect();
    let fit = fit_linear(target, &ops, bounds.lambda)?;
    let terms = basis
        .iter()
        .zip(fit.coeffs)
        .filter(|(_, c)| !c.is_zero())
        .map(|((e, _), c)| FitTerm { exps: *e, coeff: c })
        .collect();
    Ok(FitResult {
        terms,
        convention: gens.spec.convention,
        ambiguous: fit.ambiguous,
        residual: OperatorExpr::zero(gens.ctx()),
    })
}

/// Polynomial in `(E, m)` with Gaussian-rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EmPoly {
    /// `(deg E, deg m) -> coefficient`
    pub terms: BTreeMap<(u32, u32), GaussianRational>,
}

impl EmPoly {
    pub fn add(&mut self, e: u32, m: u32, v: &GaussianRational) {
        let slot = self.terms.entry((e, m)).or_insert_with(GaussianRational::zero);
        *slot += v;
        if slot.is_zero() {
            self.terms.remove(&(e, m));
        }
    }

    pub fn from_terms(it: impl IntoIterator<Item = ((u32, u32), GaussianRational)>) -> Self {
        let mut p = Self::default();
        for ((e, m), v) in it {
            p.add(e, m, &v);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sum(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for ((e, m), v) in &o.terms {
            out.add(*e, *m, v);
        }
        out
    }

    pub fn difference(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for ((e, m), v) in &o.terms {
            out.add(*e, *m, &-v);
        }
        out
    }

    /// Coefficients in `E` (index = power) at a fixed weight `m`.
    pub fn at_m(&self, m: &Rational) -> Vec<GaussianRational> {
        let deg = self.terms.keys().map(|k| k.0).max().unwrap_or(0) as usize;
        let mut out = vec![GaussianRational::zero(); deg + 1];
        for ((e, mk), v) in &self.terms {
            let mv = num_traits::pow(m.clone(), *mk as usize);
            out[*e as usize] += &v.scale(&mv);
        }
        out
    }

    pub fn eval(&self, e: &Rational, m: &Rational) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for ((de, dm), v) in &self.terms {
            let f = num_traits::pow(e.clone(), *de as usize) * num_traits::pow(m.clone(), *dm as usize);
            acc += &v.scale(&f);
        }
        acc
    }

    pub fn eval_f64(&self, e: f64, m: f64) -> num_complex::Complex64 {
        self.terms
            .iter()
            .map(|((de, dm), v)| v.to_complex() * e.powi(*de as i32) * m.powi(*dm as i32))
            .sum()
    }
}

impl fmt::Display for EmPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((e, m), v)| {
                let mut fs = Vec::new();
                if !v.is_one() || (*e == 0 && *m == 0) {
                    fs.push(v.to_string());
                }
                for (name, k) in [("E", *e), ("m", *m)] {
                    match k {
                        0 => {}
                        1 => fs.push(name.to_string()),
                        _ => fs.push(format!("{name}^{k}")),
                    }
                }
                fs.join("*")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Ctx};
    use crate::systems::{build, Family, SystemSpec};

    #[test]
    fn identity_fit_of_hamiltonian() {
        let spec = SystemSpec::new(Family::Coulomb, 2, Lambda::Symbolic, LsqConvention::Half).unwrap();
        let g = build(&spec).unwrap();
        let fit = fit_scalar(&g.h, &g, DegreeBounds::default()).unwrap();
        assert_eq!(fit.to_string(), "H");
        assert!(!fit.ambiguous);
    }

    #[test]
    fn linear_fit_reports_no_fit() {
        let ctx = Ctx::symbolic(2);
        let x1 = OperatorExpr::x(1, &ctx);
        let p1 = OperatorExpr::p(1, &ctx);
        assert!(matches!(fit_linear(&x1, &[p1.clone()], 2), Err(SymmetryError::NoFit(_))));
        let target = p1.scale_coeff(&Coeff::lam());
        let fit = fit_linear(&target, &[p1], 2).unwrap();
        assert_eq!(fit.coeffs[0], Poly::lam());
    }

    #[test]
    fn em_polynomial_evaluation() {
        let p = EmPoly::from_terms([((1, 2), GaussianRational::from_int(4)), ((0, 0), GaussianRational::from_int(2))]);
        assert_eq!(p.eval(&rat(1, 2), &rat(3, 1)), GaussianRational::from_int(20));
        assert_eq!(p.at_m(&rat(1, 1)), vec![GaussianRational::from_int(2), GaussianRational::from_int(4)]);
    }
}
