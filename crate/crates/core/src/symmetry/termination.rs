//! Finite ladder multiplets: energies fixed by `(G - F)(E, m_high) = 0` and
//! `(G + F)(E, m_low) = 0`.

use std::fmt;

use nalgebra::DMatrix;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::algebra::{fmt_rational, rational_sqrt, rational_to_f64, GaussianRational, Rational};

use super::fit::EmPoly;
use super::SymmetryError;

/// An energy, exact when it is rational.
#[derive(Clone, Debug, PartialEq)]
pub enum Energy {
    Exact(Rational),
    Approx(f64),
}

impl Energy {
    pub fn as_f64(&self) -> f64 {
        match self {
            Energy::Exact(q) => rational_to_f64(q),
            Energy::Approx(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Energy::Exact(q) => Some(q),
            Energy::Approx(_) => None,
        }
    }
}

impl fmt::Display for Energy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Energy::Exact(q) => write!(f, "{}", fmt_rational(q)),
            Energy::Approx(v) => write!(f, "{v:.12e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TerminationSolution {
    pub n: u32,
    pub energy: Energy,
    pub m_high: i64,
    pub m_low: i64,
    pub degeneracy: u64,
    /// All intermediate norms `(G - F)/2` and `(G + F)/2` are positive.
    pub unitary: bool,
}

/// Weight search range `|m| <= n + extra`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TerminationWindow {
    pub extra: i64,
}

impl Default for TerminationWindow {
    fn default() -> Self {
        Self { extra: 10 }
    }
}

fn is_real_poly(c: &[GaussianRational]) -> bool {
    c.iter().all(|v| v.is_real())
}

fn trim(mut c: Vec<Rational>) -> Vec<Rational> {
    while c.len() > 1 && c.last().map(|v| v.is_zero()).unwrap_or(false) {
        c.pop();
    }
    c
}

/// Real roots of a polynomial with rational coefficients (index = power).
fn real_roots(c: &[Rational]) -> Vec<Energy> {
    let c = trim(c.to_vec());
    match c.len() {
        0 | 1 => Vec::new(),
        2 => vec![Energy::Exact(-&c[0] / &c[1])],
        3 => {
            let (a, b, k) = (&c[2], &c[1], &c[0]);
            let disc = b * b - Rational::from_integer(4.into()) * a * k;
            if disc.is_negative() {
                return Vec::new();
            }
            let two_a = a * Rational::from_integer(2.into());
            if let Some(sq) = rational_sqrt(&disc) {
                let mut out = vec![Energy::Exact((-b - &sq) / &two_a)];
                if !sq.is_zero() {
                    out.push(Energy::Exact((-b + sq) / two_a));
                }
                out
            } else {
                let (fa, fb, fd) = (rational_to_f64(a), rational_to_f64(b), rational_to_f64(&disc).sqrt());
                // numerically stable pair
                let q = -0.5 * (fb + fb.signum() * fd);
                let k = rational_to_f64(k);
                vec![Energy::Approx(q / fa), Energy::Approx(k / q)]
            }
        }
        _ => {
            let n = c.len() - 1;
            let lead = rational_to_f64(&c[n]);
            let mut comp = DMatrix::<f64>::zeros(n, n);
            for i in 1..n {
                comp[(i, i - 1)] = 1.0;
            }
            for i in 0..n {
                comp[(i, n - 1)] = -rational_to_f64(&c[i]) / lead;
            }
            let f: Vec<f64> = c.iter().map(rational_to_f64).collect();
            comp.complex_eigenvalues()
                .iter()
                .filter(|z| z.im.abs() < 1e-8 * (1.0 + z.re.abs()))
                .map(|z| Energy::Approx(polish(&f, z.re)))
                .collect()
        }
    }
}

fn horner(f: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut d = 0.0;
    for c in f.iter().rev() {
        d = d * x + p;
        p = p * x + c;
    }
    (p, d)
}

fn polish(f: &[f64], mut x: f64) -> f64 {
    for _ in 0..50 {
        let (p, d) = horner(f, x);
        if d == 0.0 {
            break;
        }
        let dx = p / d;
        x -= dx;
        if dx.abs() <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

fn real_parts(c: &[GaussianRational]) -> Vec<Rational> {
    c.iter().map(|v| v.re.clone()).collect()
}

fn imag_parts(c: &[GaussianRational]) -> Vec<Rational> {
    c.iter().map(|v| v.im.clone()).collect()
}

/// Roots of a Gaussian-coefficient polynomial that are real.
fn gaussian_real_roots(c: &[GaussianRational]) -> Option<Vec<Energy>> {
    if c.iter().all(|v| v.is_zero()) {
        return None; // every E works
    }
    let re = real_parts(c);
    let im = imag_parts(c);
    let base = if trim(re.clone()).len() > 1 || is_real_poly(c) { re } else { im.clone() };
    let roots = real_roots(&base);
    if is_real_poly(c) {
        return Some(roots);
    }
    let imf: Vec<f64> = im.iter().map(rational_to_f64).collect();
    let ref_scale = c.iter().map(|v| v.to_complex().norm()).fold(0.0, f64::max);
    Some(
        roots
            .into_iter()
            .filter(|e| match e {
                Energy::Exact(q) => eval_rat(&im, q).is_zero(),
                Energy::Approx(x) => horner(&imf, *x).0.abs() <= 1e-9 * ref_scale.max(1.0),
            })
            .collect(),
    )
}

fn eval_rat(c: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for v in c.iter().rev() {
        acc = acc * x + v;
    }
    acc
}

fn vanishes(p: &EmPoly, e: &Energy, m: i64) -> bool {
    let mr = Rational::from_integer(m.into());
    match e {
        Energy::Exact(q) => p.eval(q, &mr).is_zero(),
        Energy::Approx(x) => {
            let v = p.eval_f64(*x, m as f64).norm();
            let scale = p
                .terms
                .iter()
                .map(|((de, dm), c)| c.to_complex().norm() * x.abs().powi(*de as i32) * (m as f64).abs().powi(*dm as i32))
                .fold(1.0, f64::max);
            v <= 1e-10 * scale
        }
    }
}

fn positive(p: &EmPoly, e: &Energy, m: i64) -> bool {
    let mr = Rational::from_integer(m.into());
    match e {
        Energy::Exact(q) => {
            let v = p.eval(q, &mr);
            v.im.is_zero() && v.re.is_positive()
        }
        Energy::Approx(x) => {
            let v = p.eval_f64(*x, m as f64);
            v.re > 1e-10 && v.im.abs() < 1e-9
        }
    }
}

fn same_energy(a: &Energy, b: &Energy) -> bool {
    match (a, b) {
        (Energy::Exact(x), Energy::Exact(y)) => x == y,
        _ => (a.as_f64() - b.as_f64()).abs() <= 1e-10 * (1.0 + a.as_f64().abs()),
    }
}

/// `det` of the Sylvester matrix of two polynomials in `E` (f64).
fn resultant(a: &[f64], b: &[f64]) -> f64 {
    let trim = |v: &[f64]| {
        let mut v = v.to_vec();
        while v.len() > 1 && *v.last().unwrap() == 0.0 {
            v.pop();
        }
        v
    };
    let (a, b) = (trim(a), trim(b));
    let (da, db) = (a.len() - 1, b.len() - 1);
    let n = da + db;
    if n == 0 {
        return 1.0;
    }
    let mut s = DMatrix::<f64>::zeros(n, n);
    for i in 0..db {
        for (k, v) in a.iter().rev().enumerate() {
            s[(i, i + k)] = *v;
        }
    }
    for i in 0..da {
        for (k, v) in b.iter().rev().enumerate() {
            s[(db + i, i + k)] = *v;
        }
    }
    s.determinant()
}

fn coeffs_f64(p: &EmPoly, m: f64) -> Vec<f64> {
    let deg = p.terms.keys().map(|k| k.0).max().unwrap_or(0) as usize;
    let mut out = vec![0.0; deg + 1];
    for ((e, dm), v) in &p.terms {
        out[*e as usize] += v.re.to_f64().unwrap_or(0.0) * m.powi(*dm as i32);
    }
    out
}

/// Off-lattice search: real `mu` with a common root of `(G-F)(E, mu)` and
/// `(G+F)(E, mu - 2n)`. Returns the first such `mu` found in the window.
fn continuous_weight(minus: &EmPoly, plus: &EmPoly, n: u32, w: i64) -> Option<f64> {
    let spread = 2.0 * n as f64;
    let f = |mu: f64| resultant(&coeffs_f64(minus, mu), &coeffs_f64(plus, mu - spread));
    let steps = 4000;
    let (lo, hi) = (-(w as f64), w as f64);
    let h = (hi - lo) / steps as f64;
    let mut prev = (lo, f(lo));
    for k in 1..=steps {
        let x = lo + k as f64 * h;
        let v = f(x);
        if prev.1 == 0.0 {
            return Some(prev.0);
        }
        if prev.1.signum() != v.signum() {
            let (mut a, mut b, mut fa) = (prev.0, x, prev.1);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = f(mid);
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            return Some(0.5 * (a + b));
        }
        prev = (x, v);
    }
    None
}

/// All multiplets of level `n` (weight spread `2n`) whose extremal weights
/// lie on the lattice `m in Z`. `step` is the weight shift of the ladder;
/// the degeneracy is `2n/step + 1`.
pub fn solve_termination(
    f: &EmPoly,
    g: &EmPoly,
    step: u32,
    n: u32,
    window: TerminationWindow,
) -> Result<Vec<TerminationSolution>, SymmetryError> {
    if step == 0 {
        return Err(SymmetryError::NoSolution("step must be positive".into()));
    }
    if f.is_zero() && g.is_zero() {
        return Err(SymmetryError::NoSolution("F and G vanish identically".into()));
    }
    let spread = 2 * n as i64;
    if spread % step as i64 != 0 {
        return Err(SymmetryError::NoSolution(format!(
            "spread {spread} is not a multiple of step {step}"
        )));
    }
    let minus = g.difference(f);
    let plus = g.sum(f);
    let w = n as i64 + window.extra;
    let mut out: Vec<TerminationSolution> = Vec::new();
    for m_high in (-w + spread)..=w {
        let m_low = m_high - spread;
        let ch = minus.at_m(&Rational::from_integer(m_high.into()));
        let cl = plus.at_m(&Rational::from_integer(m_low.into()));
        let candidates = match (gaussian_real_roots(&ch), gaussian_real_roots(&cl)) {
            (Some(r), _) => r.into_iter().filter(|e| vanishes(&plus, e, m_low)).collect::<Vec<_>>(),
            (None, Some(r)) => r,
            (None, None) => continue,
        };
        for e in candidates {
            if out.iter().any(|s| s.m_high == m_high && same_energy(&s.energy, &e)) {
                continue;
            }
            let s = step as i64;
            let unitary = (0..spread / s).all(|k| {
                let m = m_low + k * s;
                positive(&minus, &e, m) && positive(&plus, &e, m + s)
            });
            out.push(TerminationSolution {
                n,
                energy: e,
                m_high,
                m_low,
                degeneracy: (spread / s + 1) as u64,
                unitary,
            });
        }
    }
    if out.is_empty() {
        if let Some(mu) = continuous_weight(&minus, &plus, n, w) {
            if (mu - mu.round()).abs() > 1e-9 {
                return Err(SymmetryError::NonLatticeWeights(format!(
                    "level {n}: extremal weight m_high = {mu:.12} is not an integer"
                )));
            }
        }
        return Err(SymmetryError::NoSolution(format!(
            "level {n}: no extremal weights with |m| <= {w}"
        )));
    }
    // unitary multiplets first, then by energy
    out.sort_by(|a, b| {
        b.unitary
            .cmp(&a.unitary)
            .then(a.energy.as_f64().partial_cmp(&b.energy.as_f64()).unwrap())
            .then(b.m_high.cmp(&a.m_high))
    });
    Ok(out)
}

/// The multiplet that represents level `n`: unitary ones first, then the
/// energy closest to the undeformed level, then the higher top weight.
pub fn select_level(solutions: &[TerminationSolution], undeformed: f64) -> Option<&TerminationSolution> {
    solutions.iter().min_by(|a, b| {
        b.unitary
            .cmp(&a.unitary)
            .then((a.energy.as_f64() - undeformed).abs().total_cmp(&(b.energy.as_f64() - undeformed).abs()))
            .then(b.m_high.cmp(&a.m_high))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn hydrogen() -> (EmPoly, EmPoly) {
        let g = |v: i64| GaussianRational::from_int(v);
        let f = EmPoly::from_terms([((1, 1), g(-4))]);
        let gg = EmPoly::from_terms([((1, 2), g(4)), ((1, 0), g(1)), ((0, 0), g(2))]);
        (f, gg)
    }

    #[test]
    fn hydrogen_levels() {
        let (f, g) = hydrogen();
        let s = solve_termination(&f, &g, 1, 2, TerminationWindow::default()).unwrap();
        assert_eq!(s[0].energy, Energy::Exact(rat(-2, 25)));
        assert_eq!((s[0].m_high, s[0].m_low, s[0].degeneracy), (2, -2, 5));
        let s = solve_termination(&f, &g, 1, 0, TerminationWindow::default()).unwrap();
        assert_eq!(s[0].energy, Energy::Exact(rat(-2, 1)));
        assert_eq!(s[0].degeneracy, 1);
    }

    #[test]
    fn degenerate_input() {
        let z = EmPoly::default();
        assert!(matches!(
            solve_termination(&z, &z, 1, 1, TerminationWindow::default()),
            Err(SymmetryError::NoSolution(_))
        ));
    }

    #[test]
    fn irrational_roots_are_numeric() {
        let r = real_roots(&[rat(-2, 1), rat(0, 1), rat(1, 1)]);
        assert!(matches!(r[0], Energy::Approx(v) if (v + 2f64.sqrt()).abs() < 1e-14));
        let r = real_roots(&[rat(-6, 1), rat(11, 1), rat(-6, 1), rat(1, 1)]);
        let mut v: Vec<f64> = r.iter().map(|e| e.as_f64()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((v[0] - 1.0).abs() < 1e-12 && (v[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn off_lattice_weights_are_reported() {
        // G - F = E + 2m - 1 and G + F = E - 2m + 1 share a root only at m = 1/2
        let g = |v: i64| GaussianRational::from_int(v);
        let f = EmPoly::from_terms([((0, 1), g(-2)), ((0, 0), g(1))]);
        let gg = EmPoly::from_terms([((1, 0), g(1))]);
        let r = solve_termination(&f, &gg, 1, 0, TerminationWindow::default());
        assert!(matches!(r, Err(SymmetryError::NonLatticeWeights(_))), "{r:?}");
    }
}
