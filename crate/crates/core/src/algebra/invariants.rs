//! Rotation-invariant decomposition
//! `a = c_psq(r) p^2 + c_d(r) (x.p) + c_lsq(r) L^2 + c_1(r)`
//! with `L^2 = sum_{i<j} L_ij^2`.

use super::expr::{sum, Ctx, Mono, OperatorExpr, MAX_DIM};
use super::gauss::GaussianRational;
use super::radial::RadialCoefficient;
use super::syntax::print;
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantForm {
    pub ctx: Ctx,
    pub c_psq: RadialCoefficient,
    pub c_d: RadialCoefficient,
    pub c_lsq: RadialCoefficient,
    pub c_1: RadialCoefficient,
}

/// `p^2 = sum_i p_i^2`.
pub fn p_squared(ctx: &Ctx) -> OperatorExpr {
    let ps: Vec<_> = (1..=ctx.dim)
        .map(|i| {
            let p = OperatorExpr::p(i, ctx);
            &p * &p
        })
        .collect();
    sum(ctx, &ps)
}

/// `x.p = sum_i x_i p_i`.
pub fn dilation(ctx: &Ctx) -> OperatorExpr {
    let ts: Vec<_> = (1..=ctx.dim)
        .map(|i| &OperatorExpr::x(i, ctx) * &OperatorExpr::p(i, ctx))
        .collect();
    sum(ctx, &ts)
}

/// `L_ij = x_i p_j - x_j p_i` (1-based indices).
pub fn angular(i: usize, j: usize, ctx: &Ctx) -> OperatorExpr {
    let a = &OperatorExpr::x(i, ctx) * &OperatorExpr::p(j, ctx);
    let b = &OperatorExpr::x(j, ctx) * &OperatorExpr::p(i, ctx);
    &a - &b
}

/// `sum_{i<j} L_ij^2`.
pub fn lsq_half(ctx: &Ctx) -> OperatorExpr {
    let mut acc = OperatorExpr::zero(ctx);
    for i in 1..=ctx.dim {
        for j in (i + 1)..=ctx.dim {
            let l = angular(i, j, ctx);
            acc = &acc + &(&l * &l);
        }
    }
    acc
}

fn mono(x: &[(usize, u8)], p: &[(usize, u8)]) -> Mono {
    let mut m = Mono::ONE;
    for &(k, e) in x {
        m.x[k] = e;
    }
    for &(k, e) in p {
        m.p[k] = e;
    }
    debug_assert!(m.x.len() == MAX_DIM);
    m
}

impl InvariantForm {
    /// Rebuilds the operator from its radial coefficients.
    pub fn rebuild(&self) -> OperatorExpr {
        let ctx = &self.ctx;
        let parts = [
            p_squared(ctx).scale_radial(&self.c_psq),
            dilation(ctx).scale_radial(&self.c_d),
            lsq_half(ctx).scale_radial(&self.c_lsq),
            OperatorExpr::scalar(ctx, self.c_1.clone()),
        ];
        sum(ctx, &parts)
    }
}

/// Peels the invariant coefficients off a rotation-invariant operator.
///
/// The `L^2` coefficient is read from `x1 x2 p1 p2` (only `L^2` produces it),
/// then `p^2`, `x.p` and the scalar part are read and subtracted in turn.
/// Anything left over means the operator is not of the invariant form.
pub fn collect_invariants(a: &OperatorExpr) -> Result<InvariantForm, AlgebraError> {
    let ctx = a.ctx().clone();
    if ctx.dim < 2 {
        return Err(AlgebraError::UnsupportedDimension(ctx.dim));
    }
    let lsq = lsq_half(&ctx);
    let c_lsq = a
        .coefficient(&mono(&[(0, 1), (1, 1)], &[(0, 1), (1, 1)]))
        .scale(&GaussianRational::from_ratio(-1, 2));
    let rem = a - &lsq.scale_radial(&c_lsq);

    let c_psq = rem.coefficient(&mono(&[], &[(0, 2)]));
    let rem = &rem - &p_squared(&ctx).scale_radial(&c_psq);

    let c_d = rem.coefficient(&mono(&[(0, 1)], &[(0, 1)]));
    let rem = &rem - &dilation(&ctx).scale_radial(&c_d);

    let c_1 = rem.coefficient(&Mono::ONE);
    let rem = &rem - &OperatorExpr::scalar(&ctx, c_1.clone());

    if !rem.is_zero() {
        return Err(AlgebraError::IrreducibleToInvariants(print(&rem)));
    }
    Ok(InvariantForm {
        ctx,
        c_psq,
        c_d,
        c_lsq,
        c_1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::syntax::parse;

    #[test]
    fn momentum_square() {
        let ctx = Ctx::symbolic(2);
        let inv = collect_invariants(&p_squared(&ctx)).unwrap();
        assert!(inv.c_psq.is_one());
        assert!(inv.c_d.is_zero() && inv.c_lsq.is_zero() && inv.c_1.is_zero());
    }

    #[test]
    fn non_invariant_operator_is_rejected() {
        let ctx = Ctx::symbolic(2);
        let e = parse("x1*p2", &ctx).unwrap();
        assert!(matches!(
            collect_invariants(&e),
            Err(AlgebraError::IrreducibleToInvariants(_))
        ));
    }

    #[test]
    fn lsq_round_trip_three_dims() {
        let ctx = Ctx::symbolic(3);
        let l = lsq_half(&ctx);
        let inv = collect_invariants(&l).unwrap();
        assert!(inv.c_lsq.is_one());
        assert!(inv.rebuild().equals(&l));
    }
}
