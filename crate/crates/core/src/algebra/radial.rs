//! Radial coefficient functions `plain(lam, r) + s_part(lam, r) * s` with
//! `s = sqrt(1 + lam r^2)`.

use std::fmt;

use num_traits::{One, Zero};

use super::coeff::Coeff;
use super::gauss::{GaussianRational, Rational};
use super::poly::{Monomial, Poly};

/// The deformation parameter: kept symbolic or fixed to an exact rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Lambda {
    #[default]
    Symbolic,
    Value(Rational),
}

impl Lambda {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            Lambda::Symbolic => None,
            Lambda::Value(q) => Some(q),
        }
    }

    /// `lam` as a coefficient.
    pub fn coeff(&self) -> Coeff {
        match self {
            Lambda::Symbolic => Coeff::lam(),
            Lambda::Value(q) => Coeff::rational(q.clone()),
        }
    }

    /// `s^2 = 1 + lam r^2` as a polynomial.
    pub fn s_squared(&self) -> Poly {
        let lr2 = match self {
            Lambda::Symbolic => Poly::monomial(GaussianRational::one(), Monomial::new(1, 2)),
            Lambda::Value(q) => Poly::monomial(GaussianRational::real(q.clone()), Monomial::new(0, 2)),
        };
        &Poly::one() + &lr2
    }

    /// True when `s` collapses to 1.
    pub fn s_is_trivial(&self) -> bool {
        matches!(self, Lambda::Value(q) if q.is_zero())
    }

    pub fn as_f64(&self) -> Option<f64> {
        self.value().map(super::gauss::rational_to_f64)
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda::Symbolic => write!(f, "sym"),
            Lambda::Value(q) => write!(f, "{}", super::gauss::fmt_rational(q)),
        }
    }
}

/// Element of the field extension `K(s)`, `s^2 = 1 + lam r^2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RadialCoefficient {
    pub plain: Coeff,
    pub s_part: Coeff,
}

impl RadialCoefficient {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_coeff(Coeff::one())
    }

    pub fn from_coeff(plain: Coeff) -> Self {
        Self {
            plain,
            s_part: Coeff::zero(),
        }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_coeff(Coeff::constant(c))
    }

    pub fn s(lam: &Lambda) -> Self {
        Self {
            plain: Coeff::zero(),
            s_part: Coeff::one(),
        }
        .normalized(lam)
    }

    /// `s^b` for any integer `b`, reduced to s-degree 0 or 1.
    pub fn s_pow(b: i64, lam: &Lambda) -> Self {
        let d = Coeff::from_poly(lam.s_squared());
        let half = b.div_euclid(2);
        let odd = b.rem_euclid(2) == 1;
        let mut factor = Coeff::one();
        let base = if half >= 0 { d } else { d.inv().expect("s^2 is nonzero") };
        for _ in 0..half.unsigned_abs() {
            factor = factor.mul(&base);
        }
        let out = if odd {
            Self {
                plain: Coeff::zero(),
                s_part: factor,
            }
        } else {
            Self::from_coeff(factor)
        };
        out.normalized(lam)
    }

    pub fn r_pow(k: i32) -> Self {
        Self::from_coeff(Coeff::r_pow(k))
    }

    pub fn is_zero(&self) -> bool {
        self.plain.is_zero() && self.s_part.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.s_part.is_zero() && self.plain.is_one()
    }

    pub fn as_constant(&self) -> Option<GaussianRational> {
        if self.s_part.is_zero() {
            self.plain.as_constant()
        } else {
            None
        }
    }

    /// Folds the `s` part when `s = 1`.
    pub fn normalized(self, lam: &Lambda) -> Self {
        if lam.s_is_trivial() && !self.s_part.is_zero() {
            Self::from_coeff(self.plain.add(&self.s_part))
        } else {
            self
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            plain: self.plain.add(&o.plain),
            s_part: self.s_part.add(&o.s_part),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            plain: self.plain.sub(&o.plain),
            s_part: self.s_part.sub(&o.s_part),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            plain: self.plain.neg(),
            s_part: self.s_part.neg(),
        }
    }

    pub fn mul(&self, o: &Self, lam: &Lambda) -> Self {
        let mut plain = self.plain.mul(&o.plain);
        let mut s_part = Coeff::zero();
        if !o.s_part.is_zero() {
            s_part = self.plain.mul(&o.s_part);
        }
        if !self.s_part.is_zero() {
            s_part = s_part.add(&self.s_part.mul(&o.plain));
            if !o.s_part.is_zero() {
                let ss = self.s_part.mul(&o.s_part);
                plain = plain.add(&ss.mul(&Coeff::from_poly(lam.s_squared())));
            }
        }
        Self { plain, s_part }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self {
            plain: self.plain.scale(c),
            s_part: self.s_part.scale(c),
        }
    }

    pub fn mul_coeff(&self, c: &Coeff) -> Self {
        Self {
            plain: self.plain.mul(c),
            s_part: self.s_part.mul(c),
        }
    }

    pub fn shift_r(&self, k: i32) -> Self {
        Self {
            plain: self.plain.shift_r(k),
            s_part: self.s_part.shift_r(k),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            plain: self.plain.conj(),
            s_part: self.s_part.conj(),
        }
    }

    /// `d/dr`, with `ds/dr = lam r s / (1 + lam r^2)`.
    pub fn deriv_r(&self, lam: &Lambda) -> Self {
        let plain = self.plain.deriv_r();
        let mut s_part = self.s_part.deriv_r();
        if !self.s_part.is_zero() {
            let ds = lam
                .coeff()
                .shift_r(1)
                .mul(&Coeff::inv_poly(&lam.s_squared()).expect("s^2 is nonzero"));
            s_part = s_part.add(&self.s_part.mul(&ds));
        }
        Self { plain, s_part }.normalized(lam)
    }

    /// Multiplicative inverse: `(a - b s) / (a^2 - b^2 s^2)`.
    pub fn inv(&self, lam: &Lambda) -> Option<Self> {
        if self.s_part.is_zero() {
            return Some(Self::from_coeff(self.plain.inv()?));
        }
        let norm = self
            .plain
            .mul(&self.plain)
            .sub(&self.s_part.mul(&self.s_part).mul(&Coeff::from_poly(lam.s_squared())));
        let ninv = norm.inv()?;
        Some(
            Self {
                plain: self.plain.mul(&ninv),
                s_part: self.s_part.neg().mul(&ninv),
            }
            .normalized(lam),
        )
    }

    /// Substitutes `lam = q` in both parts.
    pub fn subst_lam(&self, q: &Rational) -> Option<Self> {
        Some(
            Self {
                plain: self.plain.subst_lam(q)?,
                s_part: self.s_part.subst_lam(q)?,
            }
            .normalized(&Lambda::Value(q.clone())),
        )
    }

    pub fn max_lam_degree(&self) -> u32 {
        self.plain.max_lam_degree().max(self.s_part.max_lam_degree())
    }

    /// Numerical value at `(lam, r)`.
    pub fn eval(&self, lam: f64, r: f64) -> num_complex::Complex64 {
        let mut v = self.plain.eval(lam, r);
        if !self.s_part.is_zero() {
            v += self.s_part.eval(lam, r) * (1.0 + lam * r * r).sqrt();
        }
        v
    }
}

impl fmt::Display for RadialCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.plain.is_zero(), self.s_part.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.plain),
            (true, false) => write!(f, "({})*s^1", self.s_part),
            (false, false) => write!(f, "{} + ({})*s^1", self.plain, self.s_part),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gauss::rat;

    #[test]
    fn s_powers_reduce() {
        let lam = Lambda::Symbolic;
        let s2 = RadialCoefficient::s_pow(2, &lam);
        assert!(s2.s_part.is_zero());
        let sm2 = RadialCoefficient::s_pow(-2, &lam);
        assert!(s2.mul(&sm2, &lam).is_one());
        let s3 = RadialCoefficient::s_pow(3, &lam);
        let sm3 = RadialCoefficient::s_pow(-3, &lam);
        assert!(s3.mul(&sm3, &lam).is_one());
        let s1 = RadialCoefficient::s(&lam);
        assert_eq!(s1.mul(&s1, &lam), s2);
    }

    #[test]
    fn derivative_of_s_matches_finite_difference() {
        let lam = Lambda::Symbolic;
        let f = RadialCoefficient::s_pow(1, &lam).mul(&RadialCoefficient::r_pow(-1), &lam);
        let df = f.deriv_r(&lam);
        let (l, r, h) = (0.37, 1.3, 1e-6);
        let fd = (f.eval(l, r + h) - f.eval(l, r - h)) / (2.0 * h);
        assert!((df.eval(l, r) - fd).norm() < 1e-8);
    }

    #[test]
    fn general_inverse() {
        let lam = Lambda::Symbolic;
        let a = RadialCoefficient::one().add(&RadialCoefficient::s(&lam));
        let inv = a.inv(&lam).unwrap();
        assert!(a.mul(&inv, &lam).is_one());
    }

    #[test]
    fn trivial_s_at_zero_lambda() {
        let lam = Lambda::Value(rat(0, 1));
        let s = RadialCoefficient::s(&lam);
        assert!(s.is_one());
        let sym = RadialCoefficient::s(&Lambda::Symbolic);
        assert!(sym.subst_lam(&rat(0, 1)).unwrap().is_one());
    }
}
