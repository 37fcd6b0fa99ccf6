//! Randomized algebra properties, shared by the core suite and the
//! acceptance run. Each property runs a fixed number of seeded cases.

use dynsym_core::algebra::{
    collect_invariants, dilation, lsq_half, p_squared, parse, print, rat, sum, Atom, Ctx, GaussianRational, Lambda,
    OperatorExpr, RadialCoefficient,
};
use dynsym_core::systems::{build, Family, LsqConvention, SystemSpec};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub const CASES: u32 = 200;

/// Atom codes: 0 = x_i, 1 = p_i, 2 = r^k, 3 = s^k.
#[derive(Clone, Debug)]
pub struct AtomSpec {
    kind: u8,
    index: usize,
    power: i32,
}

#[derive(Clone, Debug)]
pub struct TermSpec {
    re: (i64, i64),
    im: i64,
    atoms: Vec<AtomSpec>,
}

pub type ExprSpec = Vec<TermSpec>;

fn atom_spec() -> impl Strategy<Value = AtomSpec> {
    (0u8..4, 0usize..3, -2i32..=2).prop_map(|(kind, index, power)| AtomSpec { kind, index, power })
}

fn term_spec() -> impl Strategy<Value = TermSpec> {
    ((-3i64..=3, 1i64..=3), -2i64..=2, prop::collection::vec(atom_spec(), 0..=2))
        .prop_map(|(re, im, atoms)| TermSpec { re, im, atoms })
}

pub fn expr_spec() -> impl Strategy<Value = ExprSpec> {
    prop::collection::vec(term_spec(), 1..=3)
}

/// Dimension 2 or 3, lambda symbolic or `1/10`.
pub fn ctx_spec() -> impl Strategy<Value = Ctx> {
    (2usize..=3, any::<bool>()).prop_map(|(d, sym)| {
        if sym {
            Ctx::symbolic(d)
        } else {
            Ctx::with_value(d, rat(1, 10))
        }
    })
}

pub fn build_expr(spec: &ExprSpec, ctx: &Ctx) -> OperatorExpr {
    let terms: Vec<OperatorExpr> = spec
        .iter()
        .map(|t| {
            let c = GaussianRational::new(rat(t.re.0, t.re.1), rat(t.im, 1));
            let mut e = OperatorExpr::constant(ctx, c);
            for a in &t.atoms {
                let i = a.index % ctx.dim + 1;
                let atom = match a.kind {
                    0 => Atom::X(i),
                    1 => Atom::P(i),
                    2 => Atom::R(a.power),
                    _ => Atom::S(a.power as i64),
                };
                e = e.try_mul(&OperatorExpr::atom(atom, ctx).unwrap()).unwrap();
            }
            e
        })
        .collect();
    sum(ctx, &terms)
}

fn runner() -> TestRunner {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn check(ok: bool, what: &str) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(what.to_string()))
    }
}

type Outcome = Result<(), String>;

fn finish<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Outcome {
    r.map_err(|e| e.to_string())
}

pub fn jacobi() -> Outcome {
    let s = (ctx_spec(), expr_spec(), expr_spec(), expr_spec());
    finish(runner().run(&s, |(ctx, a, b, c)| {
        let (a, b, c) = (build_expr(&a, &ctx), build_expr(&b, &ctx), build_expr(&c, &ctx));
        let t1 = a.commutator(&b.commutator(&c).unwrap()).unwrap();
        let t2 = b.commutator(&c.commutator(&a).unwrap()).unwrap();
        let t3 = c.commutator(&a.commutator(&b).unwrap()).unwrap();
        check(t1.try_add(&t2).unwrap().try_add(&t3).unwrap().is_zero(), "Jacobi sum is nonzero")
    }))
}

/// Normal ordering does not depend on how a product is associated.
pub fn association() -> Outcome {
    let s = (ctx_spec(), expr_spec(), expr_spec(), expr_spec());
    finish(runner().run(&s, |(ctx, a, b, c)| {
        let (a, b, c) = (build_expr(&a, &ctx), build_expr(&b, &ctx), build_expr(&c, &ctx));
        let left = a.try_mul(&b).unwrap().try_mul(&c).unwrap();
        let right = a.try_mul(&b.try_mul(&c).unwrap()).unwrap();
        check(left.equals(&right), "(ab)c != a(bc)")
    }))
}

pub fn adjoint() -> Outcome {
    let s = (ctx_spec(), expr_spec(), expr_spec());
    finish(runner().run(&s, |(ctx, a, b)| {
        let (a, b) = (build_expr(&a, &ctx), build_expr(&b, &ctx));
        check(a.adjoint().adjoint().equals(&a), "adjoint is not an involution")?;
        let ab = a.try_mul(&b).unwrap().adjoint();
        check(ab.equals(&b.adjoint().try_mul(&a.adjoint()).unwrap()), "(ab)^+ != b^+ a^+")
    }))
}

/// `lam -> q` commutes with sums and products.
pub fn substitution() -> Outcome {
    let s = (2usize..=3, expr_spec(), expr_spec(), 0i64..=4, 1i64..=5);
    finish(runner().run(&s, |(d, a, b, p, q)| {
        let ctx = Ctx::symbolic(d);
        let (a, b) = (build_expr(&a, &ctx), build_expr(&b, &ctx));
        let v = rat(p, q);
        let sub = |e: &OperatorExpr| e.subst_lambda(&v).unwrap();
        let prod = sub(&a.try_mul(&b).unwrap());
        check(prod.equals(&sub(&a).try_mul(&sub(&b)).unwrap()), "substitution breaks products")?;
        let tot = sub(&a.try_add(&b).unwrap());
        check(tot.equals(&sub(&a).try_add(&sub(&b)).unwrap()), "substitution breaks sums")
    }))
}

pub fn print_parse() -> Outcome {
    let s = (ctx_spec(), expr_spec());
    finish(runner().run(&s, |(ctx, a)| {
        let a = build_expr(&a, &ctx);
        let back = parse(&print(&a), &ctx).map_err(|e| TestCaseError::fail(e.to_string()))?;
        check(back.equals(&a), "print/parse round trip differs")
    }))
}

fn radial_coeff(ctx: &Ctx, (c, k, b): (i64, i32, i64)) -> RadialCoefficient {
    RadialCoefficient::r_pow(k)
        .mul(&RadialCoefficient::s_pow(b, &ctx.lambda), &ctx.lambda)
        .scale(&GaussianRational::from_int(c))
}

/// Random invariant combinations `a p^2 + b D + c L^2 + d` are recovered exactly.
pub fn invariant_forms() -> Outcome {
    let coeff = || (-3i64..=3, -2i32..=2, -2i64..=2);
    let s = (ctx_spec(), coeff(), coeff(), coeff(), coeff());
    finish(runner().run(&s, |(ctx, a, b, c, d)| {
        let (a, b, c, d) = (radial_coeff(&ctx, a), radial_coeff(&ctx, b), radial_coeff(&ctx, c), radial_coeff(&ctx, d));
        let parts = [
            p_squared(&ctx).scale_radial(&a),
            dilation(&ctx).scale_radial(&b),
            lsq_half(&ctx).scale_radial(&c),
            OperatorExpr::scalar(&ctx, d),
        ];
        let e = sum(&ctx, &parts);
        let inv = collect_invariants(&e).map_err(|e| TestCaseError::fail(e.to_string()))?;
        check(inv.rebuild().equals(&e), "rebuilt operator differs")
    }))
}

/// `H` of both families at N = 2, 3 rebuilds exactly from its invariant form.
pub fn hamiltonian_invariants() -> Outcome {
    for family in [Family::Coulomb, Family::Oscillator] {
        for dim in [2, 3] {
            let spec = SystemSpec::new(family, dim, Lambda::Symbolic, LsqConvention::Half).map_err(|e| e.to_string())?;
            let h = build(&spec).map_err(|e| e.to_string())?.h;
            let inv = collect_invariants(&h).map_err(|e| e.to_string())?;
            if !inv.rebuild().equals(&h) {
                return Err(format!("{family} N={dim}: invariant form does not rebuild H"));
            }
        }
    }
    Ok(())
}

/// Every property with its name.
pub fn all() -> Vec<(&'static str, fn() -> Outcome)> {
    vec![
        ("jacobi", jacobi as fn() -> Outcome),
        ("association", association),
        ("adjoint", adjoint),
        ("substitution", substitution),
        ("print_parse", print_parse),
        ("invariant_forms", invariant_forms),
        ("hamiltonian_invariants", hamiltonian_invariants),
    ]
}
