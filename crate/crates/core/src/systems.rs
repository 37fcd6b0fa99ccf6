//! Generators and Hamiltonians of the deformed Coulomb-like and
//! oscillator-like systems, built as exact [`OperatorExpr`] values.
//!
//! Both families share the deformed momentum
//! `pi_i = (s p_i + p_i s) / 2`, `s = sqrt(1 + lam r^2)`, and the kinetic term
//! `pi^2/2 - lam L^2/2`; the effective mass is `M(r) = 1/(1 + lam r^2)`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::{
    angular, lsq_half, sum, AlgebraError, Atom, Coeff, Ctx, GaussianRational, Lambda,
    OperatorExpr, RadialCoefficient,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Coulomb,
    Oscillator,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Coulomb => write!(f, "coulomb"),
            Family::Oscillator => write!(f, "oscillator"),
        }
    }
}

/// Index range of the scalar `L^2 = L_ij L_ij`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LsqConvention {
    /// `sum_{i<j} L_ij L_ij`
    Half,
    /// `sum_{i,j} L_ij L_ij`, twice the half convention.
    Full,
}

impl LsqConvention {
    /// Multiple of the half-convention scalar.
    pub fn factor(self) -> i64 {
        match self {
            LsqConvention::Half => 1,
            LsqConvention::Full => 2,
        }
    }
}

impl fmt::Display for LsqConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LsqConvention::Half => write!(f, "half"),
            LsqConvention::Full => write!(f, "full"),
        }
    }
}

#[derive(Debug, Error)]
pub enum SystemError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("dimension {0} is not supported (need 2 <= N <= 6)")]
    Dimension(usize),
    #[error("generator {0} requires N = 2")]
    TwoDimensionalOnly(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemSpec {
    pub family: Family,
    pub ctx: Ctx,
    pub convention: LsqConvention,
}

impl SystemSpec {
    pub fn new(family: Family, dim: usize, lambda: Lambda, convention: LsqConvention) -> Result<Self, SystemError> {
        if !(2..=6).contains(&dim) {
            return Err(SystemError::Dimension(dim));
        }
        Ok(Self {
            family,
            ctx: Ctx::new(dim, lambda)?,
            convention,
        })
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim
    }

    /// Position-dependent effective mass `(1 + lam r^2)^-1`.
    pub fn effective_mass(&self) -> RadialCoefficient {
        RadialCoefficient::s_pow(-2, &self.ctx.lambda)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    /// `L_ij`, 1-based, `i != j`.
    L(usize, usize),
    /// `pi_i`, 1-based.
    Pi(usize),
    Lsq,
}

fn check_index(i: usize, dim: usize) -> Result<(), SystemError> {
    if i == 0 || i > dim {
        Err(AlgebraError::IndexOutOfRange { index: i, dim }.into())
    } else {
        Ok(())
    }
}

fn radial(ctx: &Ctx, c: RadialCoefficient) -> OperatorExpr {
    OperatorExpr::scalar(ctx, c)
}

fn s_op(ctx: &Ctx) -> OperatorExpr {
    OperatorExpr::atom(Atom::S(1), ctx).expect("scalar atom")
}

fn half(e: &OperatorExpr) -> OperatorExpr {
    e.scale(&GaussianRational::from_ratio(1, 2))
}

/// `(a b + b a) / 2`
pub fn symmetrized(a: &OperatorExpr, b: &OperatorExpr) -> OperatorExpr {
    half(&(&(a * b) + &(b * a)))
}

pub fn build_generator(kind: GeneratorKind, spec: &SystemSpec) -> Result<OperatorExpr, SystemError> {
    let ctx = &spec.ctx;
    match kind {
        GeneratorKind::L(i, j) => {
            check_index(i, ctx.dim)?;
            check_index(j, ctx.dim)?;
            Ok(angular(i, j, ctx))
        }
        GeneratorKind::Pi(i) => {
            check_index(i, ctx.dim)?;
            let s = s_op(ctx);
            let p = OperatorExpr::p(i, ctx);
            Ok(symmetrized(&s, &p))
        }
        GeneratorKind::Lsq => Ok(lsq_half(ctx).scale(&GaussianRational::from_int(spec.convention.factor()))),
    }
}

/// Which symmetrization of the N-dimensional vector was selected.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorForm {
    /// `R_i = sum_j (L_ij pi_j + pi_j L_ij)/2 - x_i/r`
    Symmetrized,
    /// `R_i = sum_j (L_ij pi_j - pi_j L_ij)/2 - x_i/r`
    Antisymmetrized,
}

impl fmt::Display for VectorForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorForm::Symmetrized => write!(f, "symmetrized (L_ij pi_j + pi_j L_ij)/2"),
            VectorForm::Antisymmetrized => write!(f, "antisymmetrized (L_ij pi_j - pi_j L_ij)/2"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CoulombVectors {
    /// Selected Runge-Lenz-type components `R_1..R_N`.
    pub r: Vec<OperatorExpr>,
    pub form: VectorForm,
    /// The components of the other symmetrization, kept for reporting.
    pub alternative: Vec<OperatorExpr>,
    /// 2-D only: the first ansatz `((s p_2 L_12 + L_12 p_2 s)/2 - x_1/r, ...)`
    /// written with bare momenta.
    pub ansatz: Option<Vec<OperatorExpr>>,
}

#[derive(Clone, Debug)]
pub struct OscillatorTensors {
    /// `S_ij` for `i <= j` (1-based keys).
    pub s: BTreeMap<(usize, usize), OperatorExpr>,
    /// 2-D only: `Q_xy = S_12`.
    pub qxy: Option<OperatorExpr>,
    /// 2-D only: `Q_1 = (S_11 - S_22)/2`.
    pub q1: Option<OperatorExpr>,
    /// 2-D only: the first ansatz with `f = 1 + lam r^2`, `g = 1/(1 + lam r^2)`
    /// and bare momenta, as `(Q_xy, Q_1)`.
    pub ansatz: Option<(OperatorExpr, OperatorExpr)>,
}

impl OscillatorTensors {
    pub fn get(&self, i: usize, j: usize) -> &OperatorExpr {
        let key = if i <= j { (i, j) } else { (j, i) };
        &self.s[&key]
    }
}

#[derive(Clone, Debug)]
pub enum LadderGenerators {
    Coulomb(CoulombVectors),
    Oscillator(OscillatorTensors),
}

#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub spec: SystemSpec,
    /// `L_ij` for `i < j` (1-based keys).
    pub l: BTreeMap<(usize, usize), OperatorExpr>,
    /// `pi_1..pi_N`.
    pub pi: Vec<OperatorExpr>,
    pub ladder: LadderGenerators,
    pub h: OperatorExpr,
    pub lsq: OperatorExpr,
    /// Construction notes (e.g. which vector symmetrization was selected).
    pub log: Vec<String>,
}

impl GeneratorSet {
    pub fn ctx(&self) -> &Ctx {
        &self.spec.ctx
    }

    /// `L_ij` for any ordered pair (`L_ji = -L_ij`, `L_ii = 0`).
    pub fn angular(&self, i: usize, j: usize) -> OperatorExpr {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.l[&(i, j)].clone(),
            Greater => -&self.l[&(j, i)],
            Equal => OperatorExpr::zero(self.ctx()),
        }
    }

    pub fn coulomb(&self) -> Option<&CoulombVectors> {
        match &self.ladder {
            LadderGenerators::Coulomb(c) => Some(c),
            _ => None,
        }
    }

    pub fn oscillator(&self) -> Option<&OscillatorTensors> {
        match &self.ladder {
            LadderGenerators::Oscillator(o) => Some(o),
            _ => None,
        }
    }

    /// Every generator with a label, for hermiticity sweeps.
    pub fn labelled(&self) -> Vec<(String, &OperatorExpr)> {
        let mut out: Vec<(String, &OperatorExpr)> = Vec::new();
        for ((i, j), l) in &self.l {
            out.push((format!("L{i}{j}"), l));
        }
        for (k, p) in self.pi.iter().enumerate() {
            out.push((format!("pi{}", k + 1), p));
        }
        match &self.ladder {
            LadderGenerators::Coulomb(c) => {
                for (k, r) in c.r.iter().enumerate() {
                    out.push((format!("R{}", k + 1), r));
                }
            }
            LadderGenerators::Oscillator(o) => {
                for ((i, j), s) in &o.s {
                    out.push((format!("S{i}{j}"), s));
                }
                if let Some(q) = &o.qxy {
                    out.push(("Qxy".into(), q));
                }
                if let Some(q) = &o.q1 {
                    out.push(("Q1".into(), q));
                }
            }
        }
        out.push(("H".into(), &self.h));
        out.push(("Lsq".into(), &self.lsq));
        out
    }
}

struct Common {
    l: BTreeMap<(usize, usize), OperatorExpr>,
    pi: Vec<OperatorExpr>,
    lsq: OperatorExpr,
    kinetic: OperatorExpr,
}

fn common(spec: &SystemSpec) -> Result<Common, SystemError> {
    let ctx = &spec.ctx;
    let n = ctx.dim;
    let mut l = BTreeMap::new();
    for i in 1..=n {
        for j in (i + 1)..=n {
            l.insert((i, j), build_generator(GeneratorKind::L(i, j), spec)?);
        }
    }
    let pi = (1..=n)
        .map(|i| build_generator(GeneratorKind::Pi(i), spec))
        .collect::<Result<Vec<_>, _>>()?;
    let lsq = build_generator(GeneratorKind::Lsq, spec)?;
    let pi_sq: Vec<_> = pi.iter().map(|p| p * p).collect();
    let lam_half = ctx.lambda.coeff().scale(&GaussianRational::from_ratio(1, 2));
    let kinetic = &half(&sum(ctx, &pi_sq)) - &lsq.scale_coeff(&lam_half);
    Ok(Common { l, pi, lsq, kinetic })
}

fn angular_of(l: &BTreeMap<(usize, usize), OperatorExpr>, i: usize, j: usize, ctx: &Ctx) -> OperatorExpr {
    use std::cmp::Ordering::*;
    match i.cmp(&j) {
        Less => l[&(i, j)].clone(),
        Greater => -&l[&(j, i)],
        Equal => OperatorExpr::zero(ctx),
    }
}

/// `R_i = sum_{j != i} (L_ij pi_j ± pi_j L_ij)/2 - x_i/r`.
fn coulomb_vector(
    ctx: &Ctx,
    l: &BTreeMap<(usize, usize), OperatorExpr>,
    pi: &[OperatorExpr],
    form: VectorForm,
) -> Vec<OperatorExpr> {
    let rinv = radial(ctx, RadialCoefficient::r_pow(-1));
    (1..=ctx.dim)
        .map(|i| {
            let mut acc = OperatorExpr::zero(ctx);
            for j in 1..=ctx.dim {
                if j == i {
                    continue;
                }
                let lij = angular_of(l, i, j, ctx);
                let a = &lij * &pi[j - 1];
                let b = &pi[j - 1] * &lij;
                let t = match form {
                    VectorForm::Symmetrized => &a + &b,
                    VectorForm::Antisymmetrized => &a - &b,
                };
                acc = &acc + &half(&t);
            }
            &acc - &(&rinv * &OperatorExpr::x(i, ctx))
        })
        .collect()
}

/// Coulomb-like system: `H = pi^2/2 - lam L^2/2 - s/r` and its vector.
///
/// Both symmetrizations of `R_i` are built; the one whose first component
/// is self-adjoint and commutes with `H` is selected and the choice logged.
pub fn build_coulomb(spec: &SystemSpec) -> Result<GeneratorSet, SystemError> {
    let ctx = &spec.ctx;
    let Common { l, pi, lsq, kinetic } = common(spec)?;
    let potential = radial(
        ctx,
        RadialCoefficient::s(&ctx.lambda).mul(&RadialCoefficient::r_pow(-1), &ctx.lambda),
    );
    let h = &kinetic - &potential;

    let sym = coulomb_vector(ctx, &l, &pi, VectorForm::Symmetrized);
    let anti = coulomb_vector(ctx, &l, &pi, VectorForm::Antisymmetrized);
    let mut log = Vec::new();
    let qualifies = |v: &[OperatorExpr]| -> (bool, bool) {
        let herm = v[0].is_self_adjoint();
        let cons = herm && h.commutator(&v[0]).map(|c| c.is_zero()).unwrap_or(false);
        (herm, cons)
    };
    let (sh, sc) = qualifies(&sym);
    let (form, r, alternative) = if sh && sc {
        log.push(format!(
            "vector form: {} (self-adjoint: yes, conserved: yes)",
            VectorForm::Symmetrized
        ));
        (VectorForm::Symmetrized, sym, anti)
    } else {
        let (ah, ac) = qualifies(&anti);
        log.push(format!(
            "vector form: symmetrized self-adjoint={sh} conserved={sc}; antisymmetrized self-adjoint={ah} conserved={ac}"
        ));
        if ah && ac {
            (VectorForm::Antisymmetrized, anti, sym)
        } else {
            (VectorForm::Symmetrized, sym, anti)
        }
    };

    let ansatz = if ctx.dim == 2 {
        let s = s_op(ctx);
        let rinv = radial(ctx, RadialCoefficient::r_pow(-1));
        let l12 = &l[&(1, 2)];
        let comp = |p: &OperatorExpr, x: &OperatorExpr, sign: i64| -> OperatorExpr {
            let a = &(&s * p) * l12;
            let b = &(l12 * p) * &s;
            let t = half(&(&a + &b)).scale(&GaussianRational::from_int(sign));
            &t - &(&rinv * x)
        };
        Some(vec![
            comp(&OperatorExpr::p(2, ctx), &OperatorExpr::x(1, ctx), 1),
            comp(&OperatorExpr::p(1, ctx), &OperatorExpr::x(2, ctx), -1),
        ])
    } else {
        None
    };

    Ok(GeneratorSet {
        spec: spec.clone(),
        l,
        pi,
        ladder: LadderGenerators::Coulomb(CoulombVectors {
            r,
            form,
            alternative,
            ansatz,
        }),
        h,
        lsq,
        log,
    })
}

/// Oscillator-like system: `H = pi^2/2 - lam L^2/2 + r^2/(2(1 + lam r^2))`
/// with the quadrupole tensor `S_ij = (pi_i pi_j + pi_j pi_i)/2 + x_i x_j/(1 + lam r^2)`.
pub fn build_oscillator(spec: &SystemSpec) -> Result<GeneratorSet, SystemError> {
    let ctx = &spec.ctx;
    let Common { l, pi, lsq, kinetic } = common(spec)?;
    let inv_d = RadialCoefficient::s_pow(-2, &ctx.lambda);
    let potential = radial(
        ctx,
        inv_d
            .mul(&RadialCoefficient::r_pow(2), &ctx.lambda)
            .scale(&GaussianRational::from_ratio(1, 2)),
    );
    let h = &kinetic + &potential;
    let inv_d_op = radial(ctx, inv_d.clone());

    let mut s = BTreeMap::new();
    for i in 1..=ctx.dim {
        for j in i..=ctx.dim {
            let kin = symmetrized(&pi[i - 1], &pi[j - 1]);
            let pot = &inv_d_op * &(&OperatorExpr::x(i, ctx) * &OperatorExpr::x(j, ctx));
            s.insert((i, j), &kin + &pot);
        }
    }
    let (qxy, q1, ansatz) = if ctx.dim == 2 {
        let qxy = s[&(1, 2)].clone();
        let q1 = half(&(&s[&(1, 1)] - &s[&(2, 2)]));
        let f = radial(ctx, RadialCoefficient::s_pow(2, &ctx.lambda));
        let (p1, p2) = (OperatorExpr::p(1, ctx), OperatorExpr::p(2, ctx));
        let (x1, x2) = (OperatorExpr::x(1, ctx), OperatorExpr::x(2, ctx));
        let p12 = &p1 * &p2;
        let axy = &half(&(&(&f * &p12) + &(&p12 * &f))) + &(&inv_d_op * &(&x1 * &x2));
        let p11 = &p1 * &p1;
        let p22 = &p2 * &p2;
        let quarter = GaussianRational::from_ratio(1, 4);
        let kin1 = (&(&(&(&f * &p11) + &(&p11 * &f)) - &(&f * &p22)) - &(&p22 * &f)).scale(&quarter);
        let pot1 = half(&(&inv_d_op * &(&(&x1 * &x1) - &(&x2 * &x2))));
        let a1 = &pot1 + &kin1;
        (Some(qxy), Some(q1), Some((axy, a1)))
    } else {
        (None, None, None)
    };
    Ok(GeneratorSet {
        spec: spec.clone(),
        l,
        pi,
        ladder: LadderGenerators::Oscillator(OscillatorTensors { s, qxy, q1, ansatz }),
        h,
        lsq,
        log: Vec::new(),
    })
}

pub fn build(spec: &SystemSpec) -> Result<GeneratorSet, SystemError> {
    match spec.family {
        Family::Coulomb => build_coulomb(spec),
        Family::Oscillator => build_oscillator(spec),
    }
}

/// `lam` as a scalar operator in `ctx`.
pub fn lambda_op(ctx: &Ctx) -> OperatorExpr {
    OperatorExpr::scalar(ctx, RadialCoefficient::from_coeff(ctx.lambda.coeff()))
}

/// A rational/Gaussian constant as an operator.
pub fn constant_op(ctx: &Ctx, c: GaussianRational) -> OperatorExpr {
    OperatorExpr::scalar(ctx, RadialCoefficient::from_coeff(Coeff::constant(c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse, rat};

    fn spec(family: Family, dim: usize, lambda: Lambda) -> SystemSpec {
        SystemSpec::new(family, dim, lambda, LsqConvention::Half).unwrap()
    }

    #[test]
    fn angular_momentum_form() {
        let sp = spec(Family::Coulomb, 2, Lambda::Symbolic);
        let l12 = build_generator(GeneratorKind::L(1, 2), &sp).unwrap();
        assert_eq!(l12, parse("x1*p2 - x2*p1", &sp.ctx).unwrap());
        assert!(build_generator(GeneratorKind::Pi(3), &sp).is_err());
    }

    #[test]
    fn deformed_momentum_reduces_at_zero_lambda() {
        let sp = spec(Family::Coulomb, 2, Lambda::Value(rat(0, 1)));
        let pi1 = build_generator(GeneratorKind::Pi(1), &sp).unwrap();
        assert_eq!(pi1, OperatorExpr::p(1, &sp.ctx));
    }

    #[test]
    fn full_convention_is_twice_half() {
        let half = spec(Family::Coulomb, 3, Lambda::Symbolic);
        let mut full = half.clone();
        full.convention = LsqConvention::Full;
        let a = build_generator(GeneratorKind::Lsq, &half).unwrap();
        let b = build_generator(GeneratorKind::Lsq, &full).unwrap();
        assert!(b.equals(&a.scale(&GaussianRational::from_int(2))));
        let x1 = OperatorExpr::x(1, &half.ctx);
        let ca = a.commutator(&x1).unwrap();
        let cb = b.commutator(&x1).unwrap();
        assert!(cb.equals(&ca.scale(&GaussianRational::from_int(2))));
    }

    #[test]
    fn hamiltonians_at_zero_lambda() {
        let sp = spec(Family::Coulomb, 2, Lambda::Value(rat(0, 1)));
        let g = build_coulomb(&sp).unwrap();
        assert_eq!(g.h, parse("(1/2)*p1^2 + (1/2)*p2^2 - r^-1", &sp.ctx).unwrap());
        let sp = spec(Family::Oscillator, 2, Lambda::Value(rat(0, 1)));
        let g = build_oscillator(&sp).unwrap();
        assert_eq!(g.h, parse("(1/2)*p1^2 + (1/2)*p2^2 + (1/2)*r^2", &sp.ctx).unwrap());
    }

    #[test]
    fn effective_mass_metadata() {
        let sp = spec(Family::Coulomb, 2, Lambda::Symbolic);
        let m = sp.effective_mass();
        assert!((m.eval(0.5, 2.0).re - 1.0 / 3.0).abs() < 1e-14);
    }
}
