//! Parameter sweeps over the thermal occupation or the cooperativity, with
//! CSV output.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{measure_triple_with, EofFormula, MeasureTriple, SubsystemKind};
use crate::model::{closed_form_blocks, mechanical_subsystem, optical_subsystem, SystemParams};

pub const CSV_HEADER: &str = "x,eof_mech,gqd_mech,qc_mech,eof_opt,gqd_opt,qc_opt";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    Nth,
    Coop,
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nth" => Ok(SweepVariable::Nth),
            "coop" => Ok(SweepVariable::Coop),
            other => Err(Error::param("variable", format!("expected nth or coop, got `{other}`"))),
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVariable::Nth => "nth",
            SweepVariable::Coop => "coop",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    variable: SweepVariable,
    start: f64,
    stop: f64,
    points: usize,
    /// The swept field of `fixed` is ignored.
    fixed: SystemParams,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, start: f64, stop: f64, points: usize, fixed: SystemParams) -> Result<Self> {
        if !start.is_finite() || !stop.is_finite() || start >= stop {
            return Err(Error::param("start", format!("need finite start < stop, got {start}..{stop}")));
        }
        if points < 2 {
            return Err(Error::param("points", format!("need at least 2, got {points}")));
        }
        if start < 0.0 {
            return Err(Error::param("start", format!("{variable} cannot be negative, got {start}")));
        }
        Ok(Self {
            variable,
            start,
            stop,
            points,
            fixed,
        })
    }

    pub fn variable(&self) -> SweepVariable {
        self.variable
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn fixed(&self) -> SystemParams {
        self.fixed
    }

    /// Uniformly spaced abscissae; the last one is exactly `stop`.
    pub fn abscissae(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| if i + 1 == self.points { self.stop } else { self.start + step * i as f64 })
            .collect()
    }

    pub fn params_at(&self, x: f64) -> Result<SystemParams> {
        match self.variable {
            SweepVariable::Nth => self.fixed.with_nth(x),
            SweepVariable::Coop => self.fixed.with_coop(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub x: f64,
    pub eof_mech: f64,
    pub gqd_mech: f64,
    pub qc_mech: f64,
    pub eof_opt: f64,
    pub gqd_opt: f64,
    pub qc_opt: f64,
}

impl SweepRow {
    pub fn from_triples(x: f64, mech: MeasureTriple, opt: MeasureTriple) -> Self {
        Self {
            x,
            eof_mech: mech.eof,
            gqd_mech: mech.gqd,
            qc_mech: mech.qc,
            eof_opt: opt.eof,
            gqd_opt: opt.gqd,
            qc_opt: opt.qc,
        }
    }

    pub fn triple(&self, kind: SubsystemKind) -> MeasureTriple {
        match kind {
            SubsystemKind::Mechanical => MeasureTriple {
                eof: self.eof_mech,
                gqd: self.gqd_mech,
                qc: self.qc_mech,
            },
            SubsystemKind::Optical => MeasureTriple {
                eof: self.eof_opt,
                gqd: self.gqd_opt,
                qc: self.qc_opt,
            },
        }
    }

    /// The six measure columns in CSV order.
    pub fn values(&self) -> [f64; 6] {
        [self.eof_mech, self.gqd_mech, self.qc_mech, self.eof_opt, self.gqd_opt, self.qc_opt]
    }

    pub fn to_csv_line(&self) -> String {
        let mut line = fmt_full(self.x);
        for v in self.values() {
            line.push(',');
            line.push_str(&fmt_full(v));
        }
        line
    }
}

/// 17 significant digits.
fn fmt_full(v: f64) -> String {
    format!("{v:.16e}")
}

/// Measures of both subsystems at one parameter point.
pub fn evaluate_point(p: &SystemParams, formula: EofFormula) -> Result<(MeasureTriple, MeasureTriple)> {
    let blocks = closed_form_blocks(p);
    let mech = measure_triple_with(&mechanical_subsystem(&blocks)?, formula)?;
    let opt = measure_triple_with(&optical_subsystem(&blocks)?, formula)?;
    Ok((mech, opt))
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    run_sweep_with(spec, EofFormula::Standard)
}

/// Rows in ascending abscissa order. Points are evaluated in parallel; the
/// output does not depend on scheduling.
pub fn run_sweep_with(spec: &SweepSpec, formula: EofFormula) -> Result<Vec<SweepRow>> {
    spec.abscissae()
        .into_par_iter()
        .enumerate()
        .map(|(row, x)| {
            let with_context = |e: Error| Error::Row {
                row,
                x,
                source: Box::new(e),
            };
            let p = spec.params_at(x).map_err(with_context)?;
            let (mech, opt) = evaluate_point(&p, formula).map_err(with_context)?;
            Ok(SweepRow::from_triples(x, mech, opt))
        })
        .collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.to_csv_line())?;
    }
    out.flush()
}

pub fn to_csv_string(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}

/// Figure panels: thermal sweeps at `C = 34` (`fig2*`) and cooperativity
/// sweeps at `r = 1.5` (`fig3*`), all with `γ/κ = 0.05`. Panels a, b show the
/// mechanical pair, c, d the optical pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Preset {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
}

pub const FIGURE_DAMPING_RATIO: f64 = 0.05;
pub const FIG2_COOPERATIVITY: f64 = 34.0;
pub const FIG3_SQUEEZING: f64 = 1.5;

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Fig2a,
        Preset::Fig2b,
        Preset::Fig2c,
        Preset::Fig2d,
        Preset::Fig3a,
        Preset::Fig3b,
        Preset::Fig3c,
        Preset::Fig3d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig2c => "fig2c",
            Preset::Fig2d => "fig2d",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig3c => "fig3c",
            Preset::Fig3d => "fig3d",
        }
    }

    /// Subsystem shown in the panel. The CSV always carries both.
    pub fn subsystem(self) -> SubsystemKind {
        match self {
            Preset::Fig2a | Preset::Fig2b | Preset::Fig3a | Preset::Fig3b => SubsystemKind::Mechanical,
            _ => SubsystemKind::Optical,
        }
    }

    pub fn spec(self) -> SweepSpec {
        let build = |variable, start, stop, points, coop, squeeze, nth| {
            let fixed = SystemParams::new(coop, squeeze, nth, FIGURE_DAMPING_RATIO).expect("preset parameters are valid");
            SweepSpec::new(variable, start, stop, points, fixed).expect("preset sweep is valid")
        };
        match self {
            Preset::Fig2a | Preset::Fig2c => build(SweepVariable::Nth, 0.0, 30.0, 121, FIG2_COOPERATIVITY, 1.0, 0.0),
            Preset::Fig2b | Preset::Fig2d => build(SweepVariable::Nth, 0.0, 30.0, 121, FIG2_COOPERATIVITY, 1.5, 0.0),
            Preset::Fig3a | Preset::Fig3c => build(SweepVariable::Coop, 0.0, 100.0, 101, 0.0, FIG3_SQUEEZING, 1.0),
            Preset::Fig3b | Preset::Fig3d => build(SweepVariable::Coop, 0.0, 100.0, 101, 0.0, FIG3_SQUEEZING, 2.0),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param("preset", format!("unknown preset `{s}` (fig2a..fig2d, fig3a..fig3d)")))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
