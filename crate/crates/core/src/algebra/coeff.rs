//! Rational functions of `(lam, r)`: a numerator polynomial over a product
//! of normalized denominator factors.
//!
//! Powers of `r` live in the (Laurent) numerator. The remaining denominator
//! factors are kept pairwise coprime in practice (the engine only ever
//! creates `1 + lam r^2`, its specializations and pure `lam` powers), and a
//! factor is cancelled whenever it divides the numerator. Zero is decided
//! exactly: a coefficient is zero iff its numerator is.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::gauss::{GaussianRational, Rational};
use super::poly::{monomial_factors, Monomial, Poly};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coeff {
    num: Poly,
    den: BTreeMap<Poly, u32>,
}

impl Coeff {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn from_poly(num: Poly) -> Self {
        Self {
            num,
            den: BTreeMap::new(),
        }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn rational(q: Rational) -> Self {
        Self::constant(GaussianRational::real(q))
    }

    pub fn int(n: i64) -> Self {
        Self::constant(GaussianRational::from_int(n))
    }

    pub fn lam() -> Self {
        Self::from_poly(Poly::lam())
    }

    pub fn r_pow(k: i32) -> Self {
        Self::from_poly(Poly::r_pow(k))
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> impl Iterator<Item = (&Poly, u32)> {
        self.den.iter().map(|(f, e)| (f, *e))
    }

    pub fn has_denominator(&self) -> bool {
        !self.den.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.is_one()
    }

    pub fn as_constant(&self) -> Option<GaussianRational> {
        if self.den.is_empty() {
            self.num.as_constant()
        } else {
            None
        }
    }

    fn canonical(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let factors: Vec<Poly> = self.den.keys().cloned().collect();
        for f in factors {
            let e = self.den.get_mut(&f).unwrap();
            while *e > 0 {
                match self.num.div_exact(&f) {
                    Some(q) => {
                        self.num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
            if *e == 0 {
                self.den.remove(&f);
            }
        }
        self
    }

    /// Splits a polynomial into `c * r^k * lam^a * rest` with `rest`
    /// normalized (leading coefficient 1, no monomial content).
    fn normalize_factor(p: &Poly) -> (GaussianRational, i32, u32, Poly) {
        let k = p.min_r();
        let a = p.min_lam();
        let rest = p.shift(0, -k);
        let rest = Poly::from_terms(
            rest.terms()
                .map(|(m, c)| (Monomial::new(m.lam - a, m.r), c.clone())),
        );
        let lc = rest.leading().map(|(_, c)| c.clone()).unwrap_or_default();
        let rest = rest.scale(&lc.inv().expect("nonzero factor"));
        (lc, k, a, rest)
    }

    /// `1 / p` for a nonzero polynomial.
    pub fn inv_poly(p: &Poly) -> Option<Coeff> {
        if p.is_zero() {
            return None;
        }
        let (c, k, a, rest) = Self::normalize_factor(p);
        let mut den = BTreeMap::new();
        if a > 0 {
            den.insert(Poly::lam(), a);
        }
        if !rest.is_one() {
            den.insert(rest, 1);
        }
        let num = Poly::r_pow(-k).scale(&c.inv()?);
        Some(Coeff { num, den }.canonical())
    }

    pub fn inv(&self) -> Option<Coeff> {
        let mut out = Self::inv_poly(&self.num)?;
        for (f, e) in &self.den {
            out = &out * &Coeff::from_poly(f.pow(*e));
        }
        Some(out)
    }

    pub fn add(&self, o: &Coeff) -> Coeff {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        if self.den == o.den {
            return Coeff {
                num: &self.num + &o.num,
                den: self.den.clone(),
            }
            .canonical();
        }
        let mut lcm = self.den.clone();
        for (f, e) in &o.den {
            let v = lcm.entry(f.clone()).or_insert(0);
            *v = (*v).max(*e);
        }
        let lift = |c: &Coeff| -> Poly {
            let mut n = c.num.clone();
            for (f, e) in &lcm {
                let have = c.den.get(f).copied().unwrap_or(0);
                if *e > have {
                    n = &n * &f.pow(e - have);
                }
            }
            n
        };
        let num = &lift(self) + &lift(o);
        Coeff { num, den: lcm }.canonical()
    }

    pub fn sub(&self, o: &Coeff) -> Coeff {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Coeff {
        Coeff {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &Coeff) -> Coeff {
        if self.is_zero() || o.is_zero() {
            return Coeff::zero();
        }
        let mut den = self.den.clone();
        for (f, e) in &o.den {
            *den.entry(f.clone()).or_insert(0) += e;
        }
        let c = Coeff {
            num: &self.num * &o.num,
            den,
        };
        if self.den.is_empty() && o.den.is_empty() {
            c
        } else {
            c.canonical()
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Coeff {
        if c.is_zero() {
            return Coeff::zero();
        }
        Coeff {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Multiplies by `r^k`; the denominator never contains `r`.
    pub fn shift_r(&self, k: i32) -> Coeff {
        Coeff {
            num: self.num.shift(0, k),
            den: self.den.clone(),
        }
    }

    pub fn conj(&self) -> Coeff {
        // Denominator factors are built from real data (lam, r and rationals).
        Coeff {
            num: self.num.conj(),
            den: self.den.iter().map(|(f, e)| (f.conj(), *e)).collect(),
        }
        .canonical()
    }

    pub fn deriv_r(&self) -> Coeff {
        let mut out = Coeff {
            num: self.num.deriv_r(),
            den: self.den.clone(),
        }
        .canonical();
        for (f, e) in &self.den {
            // d(f^-e) = -e f' f^(-e-1)
            let fp = f.deriv_r();
            if fp.is_zero() {
                continue;
            }
            let mut den = self.den.clone();
            *den.get_mut(f).unwrap() += 1;
            let term = Coeff {
                num: (&self.num * &fp).scale(&GaussianRational::from_int(-(*e as i64))),
                den,
            }
            .canonical();
            out = out.add(&term);
        }
        out
    }

    /// Substitutes `lam = q`. Returns `None` when a denominator factor
    /// vanishes identically.
    pub fn subst_lam(&self, q: &Rational) -> Option<Coeff> {
        let mut out = Coeff::from_poly(self.num.subst_lam(q));
        for (f, e) in &self.den {
            let fs = f.subst_lam(q);
            let inv = Self::inv_poly(&fs)?;
            for _ in 0..*e {
                out = out.mul(&inv);
            }
        }
        Some(out)
    }

    pub fn max_lam_degree(&self) -> u32 {
        self.den
            .keys()
            .map(|f| f.max_lam_degree())
            .chain(std::iter::once(self.num.max_lam_degree()))
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, lam: f64, r: f64) -> num_complex::Complex64 {
        let mut v = self.num.eval(lam, r);
        for (f, e) in &self.den {
            v /= f.eval(lam, r).powi(*e as i32);
        }
        v
    }

    /// Printed factors of the denominator, e.g. `(lam*r^2 + 1)^-1`.
    pub(crate) fn denominator_factors(&self) -> Vec<String> {
        self.den
            .iter()
            .map(|(f, e)| {
                if f.len() == 1 {
                    // monomial factor, only `lam` in practice
                    let (m, _) = f.leading().unwrap();
                    let body = monomial_factors(&m).join("*");
                    format!("{body}^-{e}")
                } else {
                    format!("({f})^-{e}")
                }
            })
            .collect()
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})*{}", self.num, self.denominator_factors().join("*"))
    }
}

impl From<GaussianRational> for Coeff {
    fn from(c: GaussianRational) -> Self {
        Coeff::constant(c)
    }
}

impl One for Coeff {
    fn one() -> Self {
        Coeff::one()
    }
    fn is_one(&self) -> bool {
        Coeff::is_one(self)
    }
}

impl std::ops::Mul for Coeff {
    type Output = Coeff;
    fn mul(self, o: Coeff) -> Coeff {
        Coeff::mul(&self, &o)
    }
}

impl std::ops::Mul<&Coeff> for &Coeff {
    type Output = Coeff;
    fn mul(self, o: &Coeff) -> Coeff {
        Coeff::mul(self, o)
    }
}

impl std::ops::Add<&Coeff> for &Coeff {
    type Output = Coeff;
    fn add(self, o: &Coeff) -> Coeff {
        Coeff::add(self, o)
    }
}

impl std::ops::Sub<&Coeff> for &Coeff {
    type Output = Coeff;
    fn sub(self, o: &Coeff) -> Coeff {
        Coeff::sub(self, o)
    }
}

impl Zero for Coeff {
    fn zero() -> Self {
        Coeff::zero()
    }
    fn is_zero(&self) -> bool {
        Coeff::is_zero(self)
    }
}

impl std::ops::Add for Coeff {
    type Output = Coeff;
    fn add(self, o: Coeff) -> Coeff {
        Coeff::add(&self, &o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gauss::rat;

    fn d() -> Poly {
        &Poly::one() + &Poly::monomial(GaussianRational::one(), Monomial::new(1, 2))
    }

    #[test]
    fn inverse_cancels() {
        let c = Coeff::from_poly(&d() * &Poly::r_pow(3));
        let inv = c.inv().unwrap();
        assert!(inv.has_denominator());
        assert!(c.mul(&inv).is_one());
    }

    #[test]
    fn addition_over_common_denominator_reduces() {
        // lam r^2/(1+lam r^2) + 1/(1+lam r^2) = 1
        let inv_d = Coeff::inv_poly(&d()).unwrap();
        let a = inv_d.mul(&Coeff::from_poly(Poly::monomial(
            GaussianRational::one(),
            Monomial::new(1, 2),
        )));
        let s = a.add(&inv_d);
        assert!(s.is_one());
    }

    #[test]
    fn derivative_of_reciprocal() {
        // d/dr 1/(1+lam r^2) = -2 lam r/(1+lam r^2)^2
        let inv_d = Coeff::inv_poly(&d()).unwrap();
        let got = inv_d.deriv_r();
        let expect = inv_d
            .mul(&inv_d)
            .mul(&Coeff::from_poly(Poly::monomial(
                GaussianRational::from_int(-2),
                Monomial::new(1, 1),
            )));
        assert!(got.sub(&expect).is_zero());
        // numerical spot check
        let v = got.eval(0.3, 1.7).re;
        let h = 1e-6;
        let fd = (inv_d.eval(0.3, 1.7 + h).re - inv_d.eval(0.3, 1.7 - h).re) / (2.0 * h);
        assert!((v - fd).abs() < 1e-8);
    }

    #[test]
    fn substitution_detects_vanishing_denominator() {
        let inv_lam = Coeff::inv_poly(&Poly::lam()).unwrap();
        assert!(inv_lam.subst_lam(&rat(0, 1)).is_none());
        let inv_d = Coeff::inv_poly(&d()).unwrap();
        let at0 = inv_d.subst_lam(&rat(0, 1)).unwrap();
        assert!(at0.is_one());
        let at = inv_d.subst_lam(&rat(1, 10)).unwrap();
        assert!((at.eval(0.0, 2.0).re - 1.0 / 1.4).abs() < 1e-12);
    }
}
