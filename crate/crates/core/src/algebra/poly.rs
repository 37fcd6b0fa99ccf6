//! Sparse polynomials in the deformation parameter `lam` (non-negative
//! powers) and the radius `r` (Laurent: negative powers allowed), with
//! Gaussian-rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gauss::{GaussianRational, Rational};

/// Exponent pair `lam^lam * r^r`. Ordered by `lam` first, then `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    pub lam: u32,
    pub r: i32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { lam: 0, r: 0 };

    pub fn new(lam: u32, r: i32) -> Self {
        Self { lam, r }
    }

    fn mul(self, o: Monomial) -> Monomial {
        Monomial {
            lam: self.lam + o.lam,
            r: self.r + o.r,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::monomial(c, Monomial::ONE)
    }

    pub fn monomial(c: GaussianRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn lam() -> Self {
        Self::monomial(GaussianRational::one(), Monomial::new(1, 0))
    }

    pub fn r_pow(k: i32) -> Self {
        Self::monomial(GaussianRational::one(), Monomial::new(0, k))
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, GaussianRational)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::ONE)
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    /// The constant value when the polynomial has no `lam` or `r` dependence.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.len() {
            0 => Some(GaussianRational::zero()),
            1 => self.terms.get(&Monomial::ONE).cloned(),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Monomial) -> GaussianRational {
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: Monomial, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn leading(&self) -> Option<(Monomial, &GaussianRational)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c))
    }

    pub fn max_lam_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.lam).max().unwrap_or(0)
    }

    pub fn min_r(&self) -> i32 {
        self.terms.keys().map(|m| m.r).min().unwrap_or(0)
    }

    pub fn max_r(&self) -> i32 {
        self.terms.keys().map(|m| m.r).max().unwrap_or(0)
    }

    pub fn min_lam(&self) -> u32 {
        self.terms.keys().map(|m| m.lam).min().unwrap_or(0)
    }

    pub fn scale(&self, c: &GaussianRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    /// Multiplies by `lam^dl * r^dr`.
    pub fn shift(&self, dl: u32, dr: i32) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial::new(m.lam + dl, m.r + dr), c.clone()))
                .collect(),
        }
    }

    pub fn conj(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, c.conj())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn deriv_r(&self) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if m.r != 0 {
                out.add_term(
                    Monomial::new(m.lam, m.r - 1),
                    &c.scale(&Rational::from_integer(m.r.into())),
                );
            }
        }
        out
    }

    /// Replaces `lam` by the rational value `q`.
    pub fn subst_lam(&self, q: &Rational) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut f = Rational::one();
            for _ in 0..m.lam {
                f *= q;
            }
            out.add_term(Monomial::new(0, m.r), &c.scale(&f));
        }
        out
    }

    /// Exact quotient `self / d` in the Laurent ring, or `None` when `d`
    /// does not divide `self`. `d` must have non-negative `r` powers.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm_d, lc_d) = d.leading()?;
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let lc_inv = lc_d.inv()?;
        let shift = self.min_r().min(0);
        let mut rem = self.shift(0, -shift);
        let mut quot = Poly::zero();
        while let Some((lm, lc)) = rem.leading() {
            if lm.lam < lm_d.lam || lm.r < lm_d.r {
                return None;
            }
            let qm = Monomial::new(lm.lam - lm_d.lam, lm.r - lm_d.r);
            let qc = lc * &lc_inv;
            let sub = d.shift(qm.lam, qm.r).scale(&qc);
            rem = &rem - &sub;
            quot.add_term(qm, &qc);
        }
        Some(quot.shift(0, shift))
    }

    /// Evaluates at numeric `lam` and `r`.
    pub fn eval(&self, lam: f64, r: f64) -> num_complex::Complex64 {
        self.terms
            .iter()
            .map(|(m, c)| c.to_complex() * lam.powi(m.lam as i32) * r.powi(m.r))
            .sum()
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, &-c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.add_term(ma.mul(*mb), &(ca * cb));
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

/// Writes one monomial body (`lam^a*r^b`) without the coefficient.
pub(crate) fn monomial_factors(m: &Monomial) -> Vec<String> {
    let mut out = Vec::new();
    match m.lam {
        0 => {}
        1 => out.push("lam".to_string()),
        k => out.push(format!("lam^{k}")),
    }
    if m.r != 0 {
        out.push(format!("r^{}", m.r));
    }
    out
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut factors = Vec::new();
                let body = monomial_factors(m);
                if !c.is_one() || body.is_empty() {
                    factors.push(c.to_string());
                }
                factors.extend(body);
                factors.join("*")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gauss::rat;

    fn d() -> Poly {
        // 1 + lam r^2
        &Poly::one() + &Poly::monomial(GaussianRational::one(), Monomial::new(1, 2))
    }

    #[test]
    fn exact_division_by_deformation_factor() {
        let p = &(&d() * &d()) * &Poly::r_pow(-3);
        let q = p.div_exact(&d()).unwrap();
        assert_eq!(q, &d() * &Poly::r_pow(-3));
        assert!(Poly::r_pow(2).div_exact(&d()).is_none());
        assert!((&d() + &Poly::one()).div_exact(&d()).is_none());
    }

    #[test]
    fn derivative_and_substitution() {
        let p = &d() * &Poly::r_pow(-1);
        // d/dr (1/r + lam r) = -1/r^2 + lam
        let dp = p.deriv_r();
        let expect = &Poly::lam() - &Poly::r_pow(-2);
        assert_eq!(dp, expect);
        let s = d().subst_lam(&rat(1, 10));
        assert_eq!(s.coeff(Monomial::new(0, 2)), GaussianRational::from_ratio(1, 10));
        assert_eq!(s.max_lam_degree(), 0);
    }
}
