//! Versioned JSON report and its CSV projections.
//!
//! A report carries its own tolerances: every verdict's `pass` flag can be
//! recomputed from `value`, `expected`, `tolerance` and `relation`, and the
//! top-level `passed` flag is the conjunction of the required verdicts.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|value − expected| ≤ tolerance`
    Eq,
    /// `value ≤ expected + tolerance`
    Le,
    /// `value ≥ expected − tolerance`
    Ge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub relation: Relation,
    /// Whether this verdict gates the report's `passed` flag and exit code.
    pub required: bool,
    pub pass: bool,
}

impl Verdict {
    fn new(
        name: impl Into<String>,
        value: f64,
        expected: f64,
        tolerance: f64,
        relation: Relation,
    ) -> Self {
        let mut v = Self {
            name: name.into(),
            value,
            expected,
            tolerance,
            relation,
            required: true,
            pass: false,
        };
        v.pass = v.audit();
        v
    }

    pub fn eq(name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Self::new(name, value, expected, tolerance, Relation::Eq)
    }

    pub fn le(name: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(name, value, bound, tolerance, Relation::Le)
    }

    pub fn ge(name: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(name, value, bound, tolerance, Relation::Ge)
    }

    /// A boolean fact, encoded as 1/0 against an expected 1/0.
    pub fn flag(name: impl Into<String>, value: bool, expected: bool) -> Self {
        Self::eq(
            name,
            f64::from(u8::from(value)),
            f64::from(u8::from(expected)),
            0.0,
        )
    }

    pub fn informational(mut self) -> Self {
        self.required = false;
        self
    }

    /// Recomputes `pass` from the stored numbers.
    pub fn audit(&self) -> bool {
        if !self.value.is_finite() {
            return false;
        }
        match self.relation {
            Relation::Eq => (self.value - self.expected).abs() <= self.tolerance,
            Relation::Le => self.value <= self.expected + self.tolerance,
            Relation::Ge => self.value >= self.expected - self.tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaEntry {
    pub label: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MerminEntry {
    pub label: String,
    pub achieved: f64,
    pub target: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BornEntry {
    pub preparation: String,
    pub measurement: String,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpEntry {
    pub target_mermin: f64,
    pub overlap_mass: Option<f64>,
    pub masses: Vec<f64>,
    pub contributions: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub target_mermin: f64,
    pub lp_overlap_mass: Option<f64>,
    pub closed_form_mass: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
}

impl Default for Metadata {
    fn default() -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub schema_version: u32,
    pub scenario: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub omega: Vec<OmegaEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mermin: Vec<MerminEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub born_residuals: Vec<BornEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lp_certificates: Vec<LpEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepEntry>,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
    pub metadata: Metadata,
}

impl OverlapReport {
    pub fn new(scenario: impl Into<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            scenario: scenario.into(),
            omega: Vec::new(),
            mermin: Vec::new(),
            born_residuals: Vec::new(),
            lp_certificates: Vec::new(),
            sweep: Vec::new(),
            verdicts: Vec::new(),
            passed: true,
            metadata: Metadata::default(),
        }
    }

    pub fn push(&mut self, verdict: Verdict) {
        self.verdicts.push(verdict);
        self.passed = self.recompute_passed();
    }

    fn recompute_passed(&self) -> bool {
        self.verdicts.iter().filter(|v| v.required).all(|v| v.pass)
    }

    /// Every stored flag agrees with the numbers it was derived from.
    pub fn is_self_consistent(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass == v.audit()) && self.passed == self.recompute_passed()
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        Ok(())
    }

    /// Verdict table: `name,value,expected,tolerance,relation,required,pass`.
    pub fn write_verdicts_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record([
            "name",
            "value",
            "expected",
            "tolerance",
            "relation",
            "required",
            "pass",
        ])?;
        for v in &self.verdicts {
            let relation = match v.relation {
                Relation::Eq => "eq",
                Relation::Le => "le",
                Relation::Ge => "ge",
            };
            w.write_record([
                v.name.clone(),
                sig12(v.value),
                sig12(v.expected),
                sig12(v.tolerance),
                relation.to_string(),
                v.required.to_string(),
                v.pass.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Sweep table: `target_mermin,lp_overlap_mass,closed_form_mass`.
    /// Infeasible entries are left empty.
    pub fn write_sweep_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(["target_mermin", "lp_overlap_mass", "closed_form_mass"])?;
        let opt = |v: Option<f64>| v.map(sig12).unwrap_or_default();
        for row in &self.sweep {
            w.write_record([
                sig12(row.target_mermin),
                opt(row.lp_overlap_mass),
                opt(row.closed_form_mass),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest decimal that round-trips `x` rounded to 12 significant digits.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    // Normalize −0 so that diffs do not flip on the sign of zero.
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_rounds_noise_away() {
        assert_eq!(sig12(0.1 + 0.2), "0.3");
        assert_eq!(sig12(0.9750000000000001), "0.975");
        assert_eq!(sig12(-0.0), "0");
        assert_eq!(sig12(4.0), "4");
        assert_eq!(sig12(1.234567890123456e-5), "0.0000123456789012");
    }

    #[test]
    fn verdict_relations() {
        assert!(Verdict::eq("a", 4.0, 4.0, 1e-12).pass);
        assert!(!Verdict::eq("a", 3.9, 4.0, 1e-12).pass);
        assert!(Verdict::le("b", 1e-4, 1e-3, 0.0).pass);
        assert!(!Verdict::ge("c", 2.0, 3.0, 0.0).pass);
        assert!(!Verdict::le("nan", f64::NAN, 1.0, 0.0).pass);
        assert!(Verdict::flag("d", true, true).pass);
    }

    #[test]
    fn passed_ignores_informational_verdicts() {
        let mut r = OverlapReport::new("t");
        r.push(Verdict::eq("gate", 1.0, 1.0, 0.0));
        r.push(Verdict::eq("info", 0.0, 1.0, 0.0).informational());
        assert!(r.passed);
        r.push(Verdict::eq("gate2", 0.0, 1.0, 0.0));
        assert!(!r.passed);
        assert!(r.is_self_consistent());
        r.passed = true;
        assert!(!r.is_self_consistent());
    }

    #[test]
    fn json_round_trip_keeps_schema() {
        let mut r = OverlapReport::new("t");
        r.omega.push(OmegaEntry {
            label: "Ω(0,+)".into(),
            value: 0.0,
        });
        r.push(Verdict::eq("x", 1.0, 1.0, 0.0));
        let mut buf = Vec::new();
        r.write_json(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"schema_version\": 1"));
        assert!(!text.contains('\r'));
        let back: OverlapReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
