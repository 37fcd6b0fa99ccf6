//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! A criterion may print FAIL when its failure is fully explained by an
//! independent diagnostic; the process exits nonzero only for unexplained
//! failures.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::process::Command as Proc;
use std::time::{Duration, Instant};

use dynsym_cli::config::{Command, LambdaArg, RunConfig};
use dynsym_cli::run::{ladder_step, run, Outcome};
use dynsym_core::algebra::{collect_invariants, rat, rational_to_f64, Lambda, Rational};
use dynsym_core::numerics::{radial_eigen_on, radialize, stretched_faces};
use dynsym_core::symmetry::spectrum::{coulomb_general_printed, coulomb_planar_printed, coulomb_spatial_printed};
use dynsym_core::symmetry::{
    select_level, solve_termination, undeformed, verify_ladder, paper_spectrum, Energy, TerminationWindow,
};
use dynsym_core::systems::{build, Family, LsqConvention, SystemSpec};

struct Verdict {
    pass: bool,
    /// A failure with a diagnostic that accounts for every failing item.
    explained: bool,
    detail: String,
}

impl Verdict {
    fn of(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            explained: false,
            detail: detail.into(),
        }
    }
}

fn report(k: u32, title: &str, v: &Verdict, t: Duration) {
    let tag = if v.pass { "PASS" } else { "FAIL" };
    println!("criterion {k} [{tag}] {title} ({:.1} s): {}", t.as_secs_f64(), v.detail);
}

fn generators(family: Family, dim: usize, lam: Lambda) -> dynsym_core::systems::GeneratorSet {
    build(&SystemSpec::new(family, dim, lam, LsqConvention::Half).unwrap()).unwrap()
}

fn identity_suite() -> Verdict {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0;
    for family in [Family::Coulomb, Family::Oscillator] {
        for dim in [2, 3] {
            let mut cfg = RunConfig::new(Command::Verify, family);
            cfg.dim = dim;
            let out = run(&cfg).unwrap();
            let ids = out.report.identities.as_ref().unwrap();
            let mut required = vec![
                "generators.hermitian",
                "angular.conserved",
                "angular.algebra",
                "momentum.commutator",
                match family {
                    Family::Coulomb => "coulomb.vector.conserved",
                    Family::Oscillator => "oscillator.tensor.conserved",
                },
            ];
            if dim == 2 {
                required.push("ladder.weight_shift");
            }
            for tag in required {
                checked += 1;
                match ids.iter().find(|c| c.tag == tag) {
                    Some(c) if c.holds => {}
                    Some(c) => failures.push(format!("{family} N={dim} {tag}: {}", c.computed)),
                    None => failures.push(format!("{family} N={dim} {tag}: missing")),
                }
            }
            if out.exit != 0 {
                failures.push(format!("{family} N={dim}: verify exit {}", out.exit));
            }
        }
    }
    let t = start.elapsed();
    if t > Duration::from_secs(180) {
        failures.push(format!("took {t:?}"));
    }
    if failures.is_empty() {
        Verdict::of(true, format!("{checked} canonical zeros hold for both families at N = 2, 3"))
    } else {
        Verdict::of(false, failures.join("; "))
    }
}

fn undeformed_spectra() -> Verdict {
    let mut failures = Vec::new();
    let zero = rat(0, 1);
    for (family, top) in [(Family::Coulomb, 5u32), (Family::Oscillator, 5)] {
        let gens = generators(family, 2, Lambda::Symbolic);
        let ladder = verify_ladder(&gens, ladder_step(family)).unwrap();
        let (f, g) = (ladder.f_fit.to_em(&zero), ladder.g_fit.to_em(&zero));
        for n in 0..=top {
            let sols = solve_termination(&f, &g, ladder.step, n, TerminationWindow::default()).unwrap();
            let want = undeformed(family, 2, n);
            let s = select_level(&sols, rational_to_f64(&want)).unwrap();
            let exact = match family {
                Family::Coulomb => rat(-2, ((2 * n + 1) * (2 * n + 1)) as i64),
                Family::Oscillator => rat(n as i64 + 1, 1),
            };
            let deg = match family {
                Family::Coulomb => 2 * n as u64 + 1,
                Family::Oscillator => n as u64 + 1,
            };
            let printed = paper_spectrum(family, 2, &zero, n);
            if s.energy != Energy::Exact(exact.clone()) || printed != Energy::Exact(exact.clone()) || s.degeneracy != deg {
                failures.push(format!("{family} n={n}: E={} printed={} deg={}", s.energy, printed, s.degeneracy));
            }
        }
    }
    if failures.is_empty() {
        Verdict::of(true, "Coulomb -2/(2n+1)^2 with 2n+1 states and oscillator n+1 with n+1 states, n <= 5, exact")
    } else {
        Verdict::of(false, failures.join("; "))
    }
}

fn printed_coherence() -> Verdict {
    let mut bad = Vec::new();
    for lam in [rat(0, 1), rat(1, 10), rat(1, 2)] {
        for n in 0..=20 {
            if coulomb_general_printed(2, &lam, n) != coulomb_planar_printed(&lam, n) {
                bad.push(format!("N=2 lam={lam} n={n}"));
            }
            if coulomb_general_printed(3, &lam, n) != coulomb_spatial_printed(&lam, n) {
                bad.push(format!("N=3 lam={lam} n={n}"));
            }
        }
    }
    if bad.is_empty() {
        Verdict::of(true, "N-dimensional Coulomb formula reduces to the planar and spatial ones, 126 exact cases")
    } else {
        Verdict::of(false, bad.join("; "))
    }
}

/// Lowest sector-`n` value on a geometrically stretched mesh reaching far out.
fn stretched_level(family: Family, lam: &Rational, n: u32) -> f64 {
    let gens = generators(family, 2, Lambda::Value(lam.clone()));
    let op = radialize(&collect_invariants(&gens.h).unwrap(), n as i64).unwrap();
    let faces = stretched_faces(16000, 4.0e4, 0.05);
    radial_eigen_on(&op, &faces, 1, false).unwrap().values[0]
}

/// Bottom of the Coulomb continuum at `lam > 0`: the large-`r` limit of the
/// potential plus the kinetic zero-point offset.
fn coulomb_threshold(lam: f64) -> f64 {
    -lam.sqrt() + lam / 8.0
}

fn numeric_ground_truth(runs: &mut Vec<(Family, Rational, Outcome)>) -> Verdict {
    let start = Instant::now();
    for family in [Family::Coulomb, Family::Oscillator] {
        for lam in [rat(0, 1), rat(1, 20), rat(1, 10)] {
            let mut cfg = RunConfig::new(Command::Validate, family);
            cfg.lambda = LambdaArg::Value(lam.clone());
            cfg.levels = match family {
                Family::Coulomb => 4,
                Family::Oscillator => 5,
            };
            let t = Instant::now();
            let out = run(&cfg).unwrap();
            println!("  validate {family} lam={lam}: {:.1} s, exit {}", t.elapsed().as_secs_f64(), out.exit);
            runs.push((family, lam, out));
        }
    }
    let elapsed = start.elapsed();

    let (mut rows, mut failing, mut unexplained) = (0, Vec::new(), Vec::new());
    for (family, lam, out) in runs.iter() {
        let cmp = out.comparison.as_ref().unwrap();
        let tol = cmp.tolerances;
        let l = rational_to_f64(lam);
        for r in &cmp.rows {
            rows += 1;
            let alg = r.e_algebraic.as_ref().map(|e| e.as_f64());
            let rad = r.e_radial.unwrap();
            let line = format!(
                "{family} lam={lam} n={}: algebraic {} radial {rad:.6} cartesian {} rel {:.2e}",
                r.n,
                r.e_algebraic.as_ref().map_or("-".into(), |e| e.to_string()),
                r.e_cartesian.map_or("-".into(), |c| format!("{c:.6}")),
                r.rel_diff.unwrap_or(f64::NAN),
            );
            if r.pass {
                continue;
            }
            failing.push(line.clone());
            let Some(alg) = alg else {
                unexplained.push(format!("{line} (no algebraic value)"));
                continue;
            };
            let cart_ok = r.e_cartesian.is_some_and(|c| (c - rad).abs() <= tol.cartesian_abs);
            let far = stretched_level(*family, lam, r.n);
            let box_limited = (far - alg).abs() <= tol.algebraic_rel * alg.abs() && cart_ok;
            let unbound = *family == Family::Coulomb && l > 0.0 && {
                let thr = coulomb_threshold(l);
                far >= thr - 1e-9 && far - thr < 0.25 * (rad - thr) && (far - alg).abs() > tol.algebraic_rel * alg.abs()
            };
            let why = if box_limited {
                format!("box-limited: stretched mesh gives {far:.6}, matching the algebraic value")
            } else if unbound {
                format!(
                    "no bound state: stretched mesh gives {far:.6}, approaching the continuum edge {:.6}",
                    coulomb_threshold(l)
                )
            } else {
                unexplained.push(format!("{line} (stretched mesh {far:.6})"));
                continue;
            };
            println!("    {line}\n      {why}");
        }
    }
    let mut detail = format!(
        "{} of {rows} levels agree, six validate runs in {:.0} s",
        rows - failing.len(),
        elapsed.as_secs_f64()
    );
    if elapsed > Duration::from_secs(600) {
        unexplained.push(format!("runtime {elapsed:?} exceeds 10 min"));
    }
    if !unexplained.is_empty() {
        detail.push_str(&format!("; unexplained: {}", unexplained.join("; ")));
    } else if !failing.is_empty() {
        detail.push_str("; every failing level is explained above");
    }
    Verdict {
        pass: failing.is_empty() && unexplained.is_empty(),
        explained: unexplained.is_empty(),
        detail,
    }
}

fn printed_audit(runs: &[(Family, Rational, Outcome)]) -> Verdict {
    let mut flagged = 0;
    let mut problems = Vec::new();
    for (family, lam, out) in runs.iter().filter(|(_, l, _)| *l != rat(0, 1)) {
        let cmp = out.comparison.as_ref().unwrap();
        let json = out.report.to_json();
        for r in &cmp.rows {
            let numeric = r.e_radial.unwrap();
            let gap = (r.e_paper.as_f64() - numeric).abs();
            let tag = format!("spectrum.printed_vs_numeric.n{}", r.n);
            let listed = out.report.ladder.discrepancies.iter().any(|d| d.tag == tag);
            if gap > cmp.tolerances.printed_abs {
                flagged += 1;
                println!("    {family} lam={lam} n={}: printed {} numeric {numeric:.6} gap {gap:.3e}", r.n, r.e_paper);
                if !listed || !json.contains(&tag) {
                    problems.push(format!("{family} lam={lam} n={} not flagged", r.n));
                }
            } else if listed {
                problems.push(format!("{family} lam={lam} n={} flagged within tolerance", r.n));
            }
        }
    }
    if problems.is_empty() {
        Verdict::of(true, format!("{flagged} printed values differ from numerics by more than 5e-3, each listed in the report"))
    } else {
        Verdict::of(false, problems.join("; "))
    }
}

fn property_suites() -> Verdict {
    let mut bad = Vec::new();
    for (name, prop) in support::properties::all() {
        if let Err(e) = prop() {
            bad.push(format!("{name}: {e}"));
        }
    }
    if bad.is_empty() {
        Verdict::of(
            true,
            format!("{} properties, {} cases each where randomized", support::properties::all().len(), support::properties::CASES),
        )
    } else {
        Verdict::of(false, bad.join("; "))
    }
}

fn eigensolver_checks() -> Verdict {
    let dev = (1..=3).map(support::oracles::lanczos_vs_dense).fold(0.0, f64::max);
    let ratios = support::oracles::oscillator_convergence();
    let ok = dev < 1e-10 && ratios.iter().all(|r| (r - 4.0).abs() < 0.5);
    Verdict::of(ok, format!("Lanczos vs dense max deviation {dev:.1e}; grid error ratios {ratios:.3?}"))
}

fn determinism() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_dynsym");
    let args = ["validate", "--system", "oscillator", "--lambda", "0", "--levels", "4"];
    let outs: Vec<_> = (0..2).map(|_| Proc::new(bin).args(args).output().expect("binary runs")).collect();
    let same = outs[0].stdout == outs[1].stdout && !outs[0].stdout.is_empty();
    Verdict::of(
        same,
        format!("two runs of `dynsym {}`: {} bytes, identical = {same}", args.join(" "), outs[0].stdout.len()),
    )
}

fn main() {
    let total = Instant::now();
    let mut runs = Vec::new();
    let criteria: Vec<(u32, &str, Box<dyn FnOnce() -> Verdict + '_>)> = vec![
        (1, "symbolic identity suite", Box::new(identity_suite)),
        (2, "undeformed exact spectra", Box::new(undeformed_spectra)),
        (3, "printed formula coherence", Box::new(printed_coherence)),
        (4, "numerical ground truth, N = 2", Box::new(|| numeric_ground_truth(&mut runs))),
    ];
    let mut verdicts = Vec::new();
    for (k, title, f) in criteria {
        let t = Instant::now();
        let v = f();
        report(k, title, &v, t.elapsed());
        verdicts.push(v);
    }
    let later: Vec<(u32, &str, Box<dyn FnOnce() -> Verdict>)> = vec![
        (5, "printed spectrum audit", Box::new(|| printed_audit(&runs))),
        (6, "property suites", Box::new(property_suites)),
        (7, "eigensolver validation", Box::new(eigensolver_checks)),
        (8, "determinism", Box::new(determinism)),
    ];
    for (k, title, f) in later {
        let t = Instant::now();
        let v = f();
        report(k, title, &v, t.elapsed());
        verdicts.push(v);
    }
    let passed = verdicts.iter().filter(|v| v.pass).count();
    let unexplained = verdicts.iter().filter(|v| !v.pass && !v.explained).count();
    println!(
        "acceptance: {passed} of {} criteria pass, {} fail with analysis, {unexplained} unexplained ({:.0} s)",
        verdicts.len(),
        verdicts.len() - passed - unexplained,
        total.elapsed().as_secs_f64()
    );
    if unexplained > 0 {
        std::process::exit(1);
    }
}
