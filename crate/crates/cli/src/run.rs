//! Subcommand orchestration.

use dynsym_core::algebra::{fmt_rational, Lambda, Rational};
use dynsym_core::numerics::{
    cartesian_levels, default_box, default_rmax, radial_levels, CartesianLevel, GridSpec, NumericsError,
};
use dynsym_core::symmetry::{
    audit_identities, compare_spectra, select_level, solve_termination, undeformed, verify_ladder_with,
    DegreeBounds, Energy, IdentityCheck, LadderReport, LevelInput, SpectrumComparison, SymmetryError,
    TerminationSolution, TerminationWindow, Tolerances,
};
use dynsym_core::systems::{build, Family, LsqConvention, SystemError, SystemSpec};
use thiserror::Error;

use crate::config::{Command, LambdaArg, RunConfig};
use crate::report::{BoxEntry, Discrepancy, Grid, Ladder, Meta, Numerics, Report, Row, Tol};
use crate::report::real;

/// Residual target for the Cartesian eigenpairs.
const CARTESIAN_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("system setup: {0}")]
    System(#[from] SystemError),
    #[error("symbolic stage: {0}")]
    Symmetry(#[from] SymmetryError),
    #[error("numerical stage: {0}")]
    Numerics(#[from] NumericsError),
    #[error("{0}")]
    Input(String),
}

/// A finished run: the report, its exit code and the raw comparison.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub exit: i32,
    pub convention: LsqConvention,
    pub comparison: Option<SpectrumComparison>,
    pub cartesian: Vec<Option<CartesianLevel>>,
}

/// Weight shift of the 2-D ladder.
pub fn ladder_step(family: Family) -> u32 {
    match family {
        Family::Coulomb => 1,
        Family::Oscillator => 2,
    }
}

/// Symbolic stage under one convention.
struct Symbolic {
    convention: LsqConvention,
    identities: Option<Vec<IdentityCheck>>,
    /// `Err` holds a violated ladder relation.
    ladder: Option<Result<LadderReport, String>>,
}

impl Symbolic {
    fn discrepancy_count(&self) -> usize {
        let ids = self.identities.iter().flatten().filter(|c| !c.holds).count();
        let lad = match &self.ladder {
            Some(Ok(r)) => r.discrepancies().count(),
            Some(Err(_)) => 1000,
            None => 0,
        };
        ids + lad
    }

    fn structural_failure(&self) -> bool {
        self.identities.iter().flatten().any(|c| c.is_structural() && !c.holds)
            || matches!(self.ladder, Some(Err(_)))
    }
}

fn symbolic(cfg: &RunConfig, convention: LsqConvention, with_identities: bool) -> Result<Symbolic, RunError> {
    let spec = SystemSpec::new(cfg.system, cfg.dim, cfg.lambda.to_lambda(), convention)?;
    let gens = build(&spec)?;
    let identities = if with_identities { Some(audit_identities(&gens)?) } else { None };
    let ladder = if cfg.dim == 2 {
        // F and G are fitted with lam symbolic so they specialize to any value.
        let sym_gens = if matches!(cfg.lambda, LambdaArg::Symbolic) {
            gens
        } else {
            build(&SystemSpec::new(cfg.system, 2, Lambda::Symbolic, convention)?)?
        };
        let bounds = DegreeBounds {
            total: cfg.degree,
            lambda: cfg.lambda_degree,
        };
        Some(match verify_ladder_with(&sym_gens, ladder_step(cfg.system), bounds) {
            Ok(r) => Ok(r),
            Err(SymmetryError::LadderViolation(msg)) => Err(msg),
            Err(e) => return Err(e.into()),
        })
    } else {
        None
    };
    Ok(Symbolic {
        convention,
        identities,
        ladder,
    })
}

/// Runs the symbolic stage under the configured convention, or under both
/// with `auto`, keeping the one with fewer failing printed relations (ties
/// go to the half convention).
fn choose(cfg: &RunConfig, with_identities: bool) -> Result<Symbolic, RunError> {
    if let Some(c) = cfg.lsq_fixed() {
        return symbolic(cfg, c, with_identities);
    }
    let half = symbolic(cfg, LsqConvention::Half, with_identities)?;
    if half.discrepancy_count() == 0 {
        return Ok(half);
    }
    let full = symbolic(cfg, LsqConvention::Full, with_identities)?;
    Ok(if full.discrepancy_count() < half.discrepancy_count() { full } else { half })
}

fn value_lambda(cfg: &RunConfig) -> Result<Rational, RunError> {
    match &cfg.lambda {
        LambdaArg::Value(q) => Ok(q.clone()),
        LambdaArg::Symbolic => Err(RunError::Input("a numeric lambda is required".into())),
    }
}

/// Algebraic level `n` and, if the level is missing or non-unitary, a note.
fn algebraic_levels(
    cfg: &RunConfig,
    ladder: &LadderReport,
    lam: &Rational,
    notes: &mut Vec<Discrepancy>,
) -> Result<Vec<Option<TerminationSolution>>, RunError> {
    let f = ladder.f_fit.to_em(lam);
    let g = ladder.g_fit.to_em(lam);
    let mut out = Vec::new();
    for n in 0..cfg.levels {
        let base = dynsym_core::algebra::rational_to_f64(&undeformed(cfg.system, 2, n));
        match solve_termination(&f, &g, ladder.step, n, TerminationWindow::default()) {
            Ok(sols) => {
                let pick = select_level(&sols, base).cloned();
                if let Some(s) = pick.as_ref().filter(|s| !s.unitary) {
                    notes.push(Discrepancy {
                        tag: format!("spectrum.nonunitary.n{n}"),
                        printed: "unitary multiplet".into(),
                        computed: format!("E = {}, m = {}..{}, a norm is not positive", s.energy, s.m_low, s.m_high),
                    });
                }
                out.push(pick);
            }
            Err(e @ (SymmetryError::NoSolution(_) | SymmetryError::NonLatticeWeights(_))) => {
                notes.push(Discrepancy {
                    tag: format!("spectrum.termination.n{n}"),
                    printed: "a terminating multiplet".into(),
                    computed: e.to_string(),
                });
                out.push(None);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

fn same_energy(a: &Energy, b: &Energy) -> bool {
    match (a.exact(), b.exact()) {
        (Some(x), Some(y)) => x == y,
        _ => (a.as_f64() - b.as_f64()).abs() <= 1e-10 * (1.0 + a.as_f64().abs()),
    }
}

/// Box half-width used for Cartesian level `n`.
pub fn box_for(cfg: &RunConfig, lam: &Rational, n: u32) -> f64 {
    cfg.box_half_width.unwrap_or_else(|| default_box(cfg.system, lam, n))
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let with_identities = matches!(cfg.command, Command::Verify | Command::Report);
    let spectral = !matches!(cfg.command, Command::Verify);
    let numeric = matches!(cfg.command, Command::Validate | Command::Report);

    let mut sym = choose(cfg, with_identities)?;
    if let (Some(ids), Some(Ok(r))) = (sym.identities.as_mut(), &sym.ladder) {
        ids.push(IdentityCheck {
            tag: "ladder.weight_shift".into(),
            printed: format!("[L12, T+-] = +-{} T+-", r.step),
            computed: format!("{}, {}", r.raising, r.lowering),
            holds: true,
        });
    }
    let convention = sym.convention;
    let mut ladder_out = Ladder::default();
    let mut exit = 0;
    if sym.structural_failure() {
        exit = 1;
    }
    for c in sym.identities.iter().flatten().filter(|c| !c.holds) {
        ladder_out.discrepancies.push(c.into());
    }
    match &sym.ladder {
        Some(Ok(r)) => {
            ladder_out.step = Some(r.step);
            ladder_out.f = Some(r.f_fit.to_string());
            ladder_out.g = Some(r.g_fit.to_string());
            ladder_out.discrepancies.extend(r.discrepancies().map(Discrepancy::from));
        }
        Some(Err(msg)) => ladder_out.discrepancies.push(Discrepancy {
            tag: "ladder.relation".into(),
            printed: format!("[L12, T+-] = +-{} T+-", ladder_step(cfg.system)),
            computed: msg.clone(),
        }),
        None => {}
    }

    let mut comparison = None;
    let mut cartesian = Vec::new();
    let mut numerics = None;
    if spectral {
        let lam = value_lambda(cfg)?;
        let levels: Vec<u32> = (0..cfg.levels).collect();
        let algebraic = match &sym.ladder {
            Some(Ok(r)) => algebraic_levels(cfg, r, &lam, &mut ladder_out.discrepancies)?,
            Some(Err(msg)) => return Err(RunError::Input(format!("ladder relation violated: {msg}"))),
            None => vec![None; levels.len()],
        };
        let tol = Tolerances::for_family(cfg.system);
        let (mut radial, mut cart): (Vec<Option<f64>>, Vec<Option<f64>>) =
            (vec![None; levels.len()], vec![None; levels.len()]);
        if numeric && !levels.is_empty() {
            let spec = SystemSpec::new(cfg.system, cfg.dim, Lambda::Value(lam.clone()), convention)?;
            let rmax = cfg.rmax.unwrap_or_else(|| default_rmax(cfg.system));
            let grid = GridSpec::radial(cfg.grid, rmax)?;
            radial = radial_levels(&spec, &levels, &grid)?.into_iter().map(Some).collect();
            if cfg.dim == 2 && cfg.cartesian_grid > 0 {
                cartesian = cartesian_levels(&spec, &levels, cfg.cartesian_grid, |n| box_for(cfg, &lam, n), CARTESIAN_TOL)?;
                cart = cartesian.iter().map(|c| c.map(|c| c.energy)).collect();
            }
        }
        if numeric {
            let rmax = cfg.rmax.unwrap_or_else(|| default_rmax(cfg.system));
            let boxes = if cfg.dim == 2 && cfg.cartesian_grid > 0 {
                levels.iter().map(|&n| BoxEntry { n, half_width: real(box_for(cfg, &lam, n)) }).collect()
            } else {
                Vec::new()
            };
            numerics = Some(Numerics {
                grid: Grid {
                    radial_points: cfg.grid,
                    rmax: real(rmax),
                    cartesian_points: if cfg.dim == 2 { cfg.cartesian_grid } else { 0 },
                },
                boxes,
                tolerances: Tol::from(tol),
            });
        }
        let inputs: Vec<LevelInput> = levels
            .iter()
            .enumerate()
            .map(|(i, &n)| LevelInput {
                n,
                algebraic: algebraic[i].clone(),
                radial: radial[i],
                cartesian: cart[i],
            })
            .collect();
        let mut cmp = compare_spectra(cfg.system, cfg.dim, &lam, &inputs, tol);
        for (row, lv) in cmp.rows.iter_mut().zip(&inputs) {
            if numeric && cfg.dim == 2 {
                // A missing algebraic or Cartesian value cannot be confirmed.
                row.pass &= lv.algebraic.is_some() && (cfg.cartesian_grid == 0 || lv.cartesian.is_some());
            }
            if let Some(a) = &row.e_algebraic {
                if !same_energy(a, &row.e_paper) {
                    ladder_out.discrepancies.push(Discrepancy {
                        tag: format!("spectrum.printed_vs_algebraic.n{}", row.n),
                        printed: row.e_paper.to_string(),
                        computed: a.to_string(),
                    });
                }
            }
            if row.printed_discrepancy {
                let v = row.e_radial.or(row.e_cartesian).expect("flagged rows carry a numeric value");
                ladder_out.discrepancies.push(Discrepancy {
                    tag: format!("spectrum.printed_vs_numeric.n{}", row.n),
                    printed: row.e_paper.to_string(),
                    computed: format!("{v:.11e}"),
                });
            }
        }
        if numeric && !cmp.all_pass() {
            exit = exit.max(1);
        }
        comparison = Some(cmp);
    }

    let spectrum = comparison
        .as_ref()
        .map(|c| c.rows.iter().map(|r| Row::from_level(r, numeric)).collect())
        .unwrap_or_default();
    let report = Report {
        meta: Meta {
            system: cfg.system.to_string(),
            dim: cfg.dim,
            lambda: match &cfg.lambda {
                LambdaArg::Symbolic => "lam".into(),
                LambdaArg::Value(q) => fmt_rational(q),
            },
            convention: convention.to_string(),
            tool_version: concat!("dynsym ", env!("CARGO_PKG_VERSION")).into(),
        },
        ladder: ladder_out,
        spectrum,
        numerics,
        identities: sym.identities,
    };
    Ok(Outcome {
        report,
        exit,
        convention,
        comparison,
        cartesian,
    })
}
