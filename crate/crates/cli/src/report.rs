//! Report assembly and serialization. Key order is fixed by the struct
//! layouts; rationals print as `p/q`, reals with 12 significant digits.

use std::fmt::Write as _;

use dynsym_core::algebra::fmt_rational;
use dynsym_core::symmetry::{Energy, IdentityCheck, LevelRow, Tolerances};
use serde::Serialize;
use serde_json::Value;

/// Rounds to 12 significant digits. Non-finite values become `null`.
pub fn real(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
}

fn opt_real(x: Option<f64>) -> Value {
    x.map_or(Value::Null, real)
}

pub fn energy(e: &Energy) -> Value {
    match e {
        Energy::Exact(q) => Value::String(fmt_rational(q)),
        Energy::Approx(v) => real(*v),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Meta {
    pub system: String,
    pub dim: usize,
    pub lambda: String,
    pub convention: String,
    pub tool_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discrepancy {
    pub tag: String,
    pub printed: String,
    pub computed: String,
}

impl From<&IdentityCheck> for Discrepancy {
    fn from(c: &IdentityCheck) -> Self {
        Self {
            tag: c.tag.clone(),
            printed: c.printed.clone(),
            computed: c.computed.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Ladder {
    pub step: Option<u32>,
    #[serde(rename = "F")]
    pub f: Option<String>,
    #[serde(rename = "G")]
    pub g: Option<String>,
    pub discrepancies: Vec<Discrepancy>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct Row {
    pub n: u32,
    pub m_high: Option<i64>,
    pub m_low: Option<i64>,
    pub degeneracy: Option<u64>,
    pub E_algebraic: Value,
    pub E_paper: Value,
    pub E_radial: Value,
    pub E_cartesian: Value,
    pub abs_diff: Value,
    pub rel_diff: Value,
    pub pass: Option<bool>,
}

impl Row {
    /// `pass` is `null` when no numeric value was computed.
    pub fn from_level(r: &LevelRow, judged: bool) -> Self {
        Self {
            n: r.n,
            m_high: r.m_high,
            m_low: r.m_low,
            degeneracy: r.degeneracy,
            E_algebraic: r.e_algebraic.as_ref().map_or(Value::Null, energy),
            E_paper: energy(&r.e_paper),
            E_radial: opt_real(r.e_radial),
            E_cartesian: opt_real(r.e_cartesian),
            abs_diff: opt_real(r.abs_diff),
            rel_diff: opt_real(r.rel_diff),
            pass: judged.then_some(r.pass),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub radial_points: usize,
    pub rmax: Value,
    pub cartesian_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxEntry {
    pub n: u32,
    pub half_width: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tol {
    pub algebraic_rel: Value,
    pub cartesian_abs: Value,
    pub printed_abs: Value,
}

impl From<Tolerances> for Tol {
    fn from(t: Tolerances) -> Self {
        Self {
            algebraic_rel: real(t.algebraic_rel),
            cartesian_abs: real(t.cartesian_abs),
            printed_abs: real(t.printed_abs),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Numerics {
    pub grid: Grid,
    #[serde(rename = "box")]
    pub boxes: Vec<BoxEntry>,
    pub tolerances: Tol,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub meta: Meta,
    pub ladder: Ladder,
    pub spectrum: Vec<Row>,
    pub numerics: Option<Numerics>,
    /// Present for `verify` and `report`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identities: Option<Vec<IdentityCheck>>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Spectrum rows, or the identity table when there are none.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let cell = |v: &Value| match v {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let opt = |v: Option<String>| v.unwrap_or_default();
        if self.spectrum.is_empty() && self.identities.is_some() {
            w.write_record(["tag", "printed", "computed", "holds"]).expect("in-memory write");
            for c in self.identities.iter().flatten() {
                w.write_record([&c.tag, &c.printed, &c.computed, &c.holds.to_string()])
                    .expect("in-memory write");
            }
        } else {
            w.write_record([
                "n", "m_high", "m_low", "degeneracy", "E_algebraic", "E_paper", "E_radial", "E_cartesian", "abs_diff",
                "rel_diff", "pass",
            ])
            .expect("in-memory write");
            for r in &self.spectrum {
                w.write_record([
                    r.n.to_string(),
                    opt(r.m_high.map(|v| v.to_string())),
                    opt(r.m_low.map(|v| v.to_string())),
                    opt(r.degeneracy.map(|v| v.to_string())),
                    cell(&r.E_algebraic),
                    cell(&r.E_paper),
                    cell(&r.E_radial),
                    cell(&r.E_cartesian),
                    cell(&r.abs_diff),
                    cell(&r.rel_diff),
                    opt(r.pass.map(|v| v.to_string())),
                ])
                .expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
    }

    pub fn to_text(&self) -> String {
        let m = &self.meta;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} N={} lambda={} convention={} ({})",
            m.system, m.dim, m.lambda, m.convention, m.tool_version
        );
        if let Some(step) = self.ladder.step {
            let _ = writeln!(s, "ladder step {step}");
        }
        if let Some(f) = &self.ladder.f {
            let _ = writeln!(s, "F = {f}");
        }
        if let Some(g) = &self.ladder.g {
            let _ = writeln!(s, "G = {g}");
        }
        if let Some(ids) = &self.identities {
            let _ = writeln!(s, "\nidentities:");
            for c in ids {
                let mark = if c.holds { "ok  " } else { "DIFF" };
                let _ = writeln!(s, "  {mark} {}", c.tag);
                if !c.holds {
                    let _ = writeln!(s, "       printed:  {}", c.printed);
                    let _ = writeln!(s, "       computed: {}", c.computed);
                }
            }
        }
        if !self.spectrum.is_empty() {
            let cell = |v: &Value| match v {
                Value::Null => "-".to_string(),
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            let _ = writeln!(s, "\nspectrum:");
            let _ = writeln!(
                s,
                "  {:>3} {:>6} {:>6} {:>4} {:>16} {:>16} {:>16} {:>16} {:>10} {:>5}",
                "n", "m_high", "m_low", "deg", "E_algebraic", "E_paper", "E_radial", "E_cartesian", "rel_diff", "pass"
            );
            for r in &self.spectrum {
                let o = |v: Option<i64>| v.map_or("-".into(), |v| v.to_string());
                let _ = writeln!(
                    s,
                    "  {:>3} {:>6} {:>6} {:>4} {:>16} {:>16} {:>16} {:>16} {:>10} {:>5}",
                    r.n,
                    o(r.m_high),
                    o(r.m_low),
                    r.degeneracy.map_or("-".into(), |v| v.to_string()),
                    cell(&r.E_algebraic),
                    cell(&r.E_paper),
                    cell(&r.E_radial),
                    cell(&r.E_cartesian),
                    cell(&r.rel_diff),
                    r.pass.map_or("-".into(), |v| v.to_string()),
                );
            }
        }
        if !self.ladder.discrepancies.is_empty() {
            let _ = writeln!(s, "\ndiscrepancies:");
            for d in &self.ladder.discrepancies {
                let _ = writeln!(s, "  {}\n    printed:  {}\n    computed: {}", d.tag, d.printed, d.computed);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(real(1.0 / 3.0).to_string(), "0.333333333333");
        assert_eq!(real(-2.0).to_string(), "-2.0");
        assert_eq!(real(f64::NAN), Value::Null);
    }
}
