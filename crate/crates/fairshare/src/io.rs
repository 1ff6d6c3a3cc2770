//! Problem files and the CSV formats the command line dumps.
//!
//! A problem file is a JSON object with `vertices` (array of `[u1, u2]`
//! pairs) and `disagreement` (`[c1, c2]`); an optional `preset` object
//! (`name`, segment count `n`) takes the place of the vertex list. Saved
//! files always carry explicit canonical vertices, so a load/save cycle is
//! the identity on the parsed problem.
//!
//! CSV output is plain RFC-4180 style: one header row, comma separators,
//! `.` as the decimal separator, floats printed in shortest round-trip form.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{PerturbationReport, RegionMap};
use crate::error::Result;
use crate::geometry::{
    make_problem, preset_problem, BargainingProblem, DEFAULT_PRESET_SEGMENTS,
};
use crate::harmonic::{HarmonicField, NodeKind};
use crate::montecarlo::WalkOutcome;
use crate::payoff::Payoff;
use crate::solutions::Solution;

/// On-disk description of a problem.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemFile {
    #[serde(default)]
    pub vertices: Vec<[f64; 2]>,
    pub disagreement: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetRef>,
}

/// Preset reference inside a problem file; overrides the vertex list.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PresetRef {
    pub name: String,
    #[serde(default = "default_segments")]
    pub n: usize,
}

fn default_segments() -> usize {
    DEFAULT_PRESET_SEGMENTS
}

impl ProblemFile {
    pub fn build(&self) -> Result<BargainingProblem> {
        let c = Payoff::new(self.disagreement[0], self.disagreement[1]);
        if let Some(preset) = &self.preset {
            return preset_problem(preset.name.parse()?, preset.n, c);
        }
        let pts: Vec<Payoff> =
            self.vertices.iter().map(|v| Payoff::new(v[0], v[1])).collect();
        make_problem(&pts, c)
    }

    pub fn from_problem(problem: &BargainingProblem) -> ProblemFile {
        ProblemFile {
            vertices: problem.feasible().vertices().iter().map(|p| [p.u1, p.u2]).collect(),
            disagreement: [problem.disagreement().u1, problem.disagreement().u2],
            preset: None,
        }
    }
}

pub fn parse_problem(text: &str) -> Result<BargainingProblem> {
    serde_json::from_str::<ProblemFile>(text)?.build()
}

pub fn load_problem(path: &Path) -> Result<BargainingProblem> {
    parse_problem(&fs::read_to_string(path)?)
}

pub fn problem_to_string(problem: &BargainingProblem) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ProblemFile::from_problem(problem))? + "\n")
}

pub fn save_problem(problem: &BargainingProblem, path: &Path) -> Result<()> {
    fs::write(path, problem_to_string(problem)?)?;
    Ok(())
}

/// One row per solution: `method,u1,u2,diagnostics`, the diagnostics as
/// `key=value` pairs joined with `;` so the column count stays fixed.
pub fn write_solutions_csv(mut w: impl Write, rows: &[Solution]) -> Result<()> {
    writeln!(w, "method,u1,u2,diagnostics")?;
    for s in rows {
        let diag: Vec<String> =
            s.diagnostics.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(w, "{},{},{},{}", s.method.label(), s.payoff.u1, s.payoff.u2, diag.join(";"))?;
    }
    Ok(())
}

pub fn write_region_csv(mut w: impl Write, map: &RegionMap) -> Result<()> {
    writeln!(w, "c1,c2,lap1,lap2,label1,label2")?;
    for p in &map.points {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            p.c.u1,
            p.c.u2,
            p.laplacian.u1,
            p.laplacian.u2,
            p.labels[0].label(),
            p.labels[1].label()
        )?;
    }
    Ok(())
}

pub fn write_perturbation_csv(mut w: impl Write, report: &PerturbationReport) -> Result<()> {
    writeln!(w, "eps,Eu1,Eu2")?;
    for (eps, e) in report.ladder.iter().zip(&report.expectations) {
        writeln!(w, "{},{},{}", eps, e.u1, e.u2)?;
    }
    Ok(())
}

/// Both payoff fields on their shared lattice, row-major from the minimum
/// corner; nodes outside the solve region are skipped.
pub fn write_field_csv(
    mut w: impl Write,
    f1: &HarmonicField,
    f2: &HarmonicField,
) -> Result<()> {
    writeln!(w, "x,y,phi1,phi2")?;
    let spec = f1.spec();
    let (h, lo) = (spec.h(), spec.lo());
    for j in 0..spec.ny() {
        for i in 0..spec.nx() {
            if f1.kind_at(i, j) == NodeKind::Exterior {
                continue;
            }
            let (x, y) = (lo.u1 + i as f64 * h, lo.u2 + j as f64 * h);
            writeln!(w, "{},{},{},{}", x, y, f1.value_at(i, j), f2.value_at(i, j))?;
        }
    }
    Ok(())
}

pub fn write_walkers_csv(mut w: impl Write, outcomes: &[WalkOutcome]) -> Result<()> {
    writeln!(w, "walker,u1,u2,moves")?;
    for (k, o) in outcomes.iter().enumerate() {
        writeln!(w, "{},{},{},{}", k, o.absorbed_at.u1, o.absorbed_at.u2, o.moves)?;
    }
    Ok(())
}
