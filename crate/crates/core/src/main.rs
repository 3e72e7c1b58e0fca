use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use optocoherence::measures::{measure_triple, MeasureTriple, SubsystemKind};
use optocoherence::model::{
    closed_form_blocks, cross_blocks, full_cm, mechanical_subsystem, optical_subsystem, SystemParams,
};
use optocoherence::sweep::{run_sweep, write_csv, Preset, SweepSpec, SweepVariable};
use optocoherence::verify::{verify, VerifyOptions};
use optocoherence::Error;

const EXIT_VALIDATION: u8 = 1;
const EXIT_VERIFICATION: u8 = 2;

#[derive(Parser)]
#[command(name = "optocoherence", version, about = "Coherence, entanglement and discord in a squeezed-light driven double-cavity optomechanical system")]
struct Cli {
    /// Emit a single JSON document instead of text/CSV
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct PointArgs {
    /// Optomechanical cooperativity C
    #[arg(long)]
    coop: f64,
    /// Two-mode squeezing parameter r
    #[arg(long)]
    squeeze: f64,
    /// Mean thermal phonon number
    #[arg(long)]
    nth: f64,
    /// Mechanical damping over cavity decay, γ/κ
    #[arg(long = "damping-ratio")]
    damping_ratio: f64,
}

impl PointArgs {
    fn params(&self) -> optocoherence::Result<SystemParams> {
        SystemParams::new(self.coop, self.squeeze, self.nth, self.damping_ratio)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SubsystemArg {
    Mech,
    Opt,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariableArg {
    Nth,
    Coop,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    /// Squared denominator in the EoF closed form
    EofSquared,
    /// Sign-flipped coupling block in the drift matrix
    DriftFlipped,
}

#[derive(Subcommand)]
enum Command {
    /// EoF, GQD and QC at one parameter point
    Measures {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_enum, default_value = "both")]
        subsystem: SubsystemArg,
    },
    /// Parameter sweep written as CSV
    Sweep {
        /// fig2a..fig2d (thermal sweeps) or fig3a..fig3d (cooperativity sweeps)
        #[arg(long, conflicts_with_all = ["variable", "start", "stop", "points"])]
        preset: Option<String>,
        #[arg(long, value_enum, required_unless_present = "preset")]
        variable: Option<VariableArg>,
        #[arg(long, requires = "variable")]
        start: Option<f64>,
        #[arg(long, requires = "variable")]
        stop: Option<f64>,
        #[arg(long, requires = "variable")]
        points: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        coop: f64,
        #[arg(long, default_value_t = 0.0)]
        squeeze: f64,
        #[arg(long, default_value_t = 0.0)]
        nth: f64,
        #[arg(long = "damping-ratio", default_value_t = 0.05)]
        damping_ratio: f64,
        /// Output file (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle and property self-checks
    Verify {
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Also write the JSON report to this file
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = VerifyOptions::default().seed)]
        seed: u64,
        /// Deliberately break one formula to exercise the detectors
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
    /// Print the steady-state covariance blocks
    Cm {
        #[command(flatten)]
        point: PointArgs,
        /// Print the full 8×8 matrix (cross blocks from the Lyapunov oracle)
        #[arg(long)]
        full: bool,
    },
}

#[derive(Serialize)]
struct MeasuresOut {
    params: SystemParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    mechanical: Option<MeasureTriple>,
    #[serde(skip_serializing_if = "Option::is_none")]
    optical: Option<MeasureTriple>,
}

enum Failure {
    Validation(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Validation(format!("I/O error: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Validation(format!("JSON error: {e}"))
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Measures { point, subsystem } => {
            let p = point.params()?;
            let blocks = closed_form_blocks(&p);
            let want_mech = matches!(subsystem, SubsystemArg::Mech | SubsystemArg::Both);
            let want_opt = matches!(subsystem, SubsystemArg::Opt | SubsystemArg::Both);
            let out = MeasuresOut {
                params: p,
                mechanical: want_mech
                    .then(|| measure_triple(&mechanical_subsystem(&blocks)?))
                    .transpose()?,
                optical: want_opt
                    .then(|| measure_triple(&optical_subsystem(&blocks)?))
                    .transpose()?,
            };
            if cli.json {
                print_json(&out)?;
            } else {
                println!("subsystem,eof,gqd,qc");
                for (kind, m) in [(SubsystemKind::Mechanical, out.mechanical), (SubsystemKind::Optical, out.optical)] {
                    if let Some(m) = m {
                        println!("{kind},{:.16e},{:.16e},{:.16e}", m.eof, m.gqd, m.qc);
                    }
                }
            }
        }
        Command::Sweep {
            preset,
            variable,
            start,
            stop,
            points,
            coop,
            squeeze,
            nth,
            damping_ratio,
            out,
        } => {
            let spec = match preset {
                Some(name) => name.parse::<Preset>()?.spec(),
                None => {
                    let variable = match variable.expect("clap enforces --variable") {
                        VariableArg::Nth => SweepVariable::Nth,
                        VariableArg::Coop => SweepVariable::Coop,
                    };
                    let missing = |what: &str| Failure::Validation(format!("--{what} is required with --variable"));
                    let start = start.ok_or_else(|| missing("start"))?;
                    let stop = stop.ok_or_else(|| missing("stop"))?;
                    let points = points.ok_or_else(|| missing("points"))?;
                    let fixed = SystemParams::new(coop, squeeze, nth, damping_ratio)?;
                    SweepSpec::new(variable, start, stop, points, fixed)?
                }
            };
            let rows = run_sweep(&spec)?;
            let mut sink: Box<dyn Write> = match &out {
                Some(path) => Box::new(BufWriter::new(File::create(path)?)),
                None => Box::new(BufWriter::new(io::stdout().lock())),
            };
            if cli.json {
                #[derive(Serialize)]
                struct SweepOut<'a> {
                    spec: SweepSpec,
                    rows: &'a [optocoherence::sweep::SweepRow],
                }
                serde_json::to_writer_pretty(&mut sink, &SweepOut { spec, rows: &rows })?;
                writeln!(sink)?;
                sink.flush()?;
            } else {
                write_csv(&rows, sink)?;
            }
        }
        Command::Verify {
            tol,
            report,
            seed,
            inject_fault,
        } => {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Failure::Validation(format!("--tol must be positive, got {tol}")));
            }
            let mut opts = VerifyOptions {
                tol,
                seed,
                ..Default::default()
            };
            match inject_fault {
                Some(FaultArg::EofSquared) => opts.eof_formula = optocoherence::measures::EofFormula::SquaredDenominator,
                Some(FaultArg::DriftFlipped) => opts.drift = optocoherence::oracle::DriftConvention::FlippedCoupling,
                None => {}
            }
            let result = verify(&opts);
            if let Some(path) = report {
                let mut f = BufWriter::new(File::create(path)?);
                serde_json::to_writer_pretty(&mut f, &result)?;
                writeln!(f)?;
                f.flush()?;
            }
            if cli.json {
                print_json(&result)?;
            } else {
                println!("{result}");
            }
            if !result.passed {
                return Err(Failure::Verification);
            }
        }
        Command::Cm { point, full } => {
            let p = point.params()?;
            let blocks = closed_form_blocks(&p);
            let mech = mechanical_subsystem(&blocks)?;
            let opt = optical_subsystem(&blocks)?;
            if full {
                let cm = full_cm(&p)?;
                if cli.json {
                    #[derive(Serialize)]
                    struct FullOut {
                        params: SystemParams,
                        layout: [&'static str; 8],
                        matrix: optocoherence::GeneralCM,
                    }
                    print_json(&FullOut {
                        params: p,
                        layout: ["X_m1", "Y_m1", "X_m2", "Y_m2", "X_o1", "Y_o1", "X_o2", "Y_o2"],
                        matrix: cm,
                    })?;
                } else {
                    println!("# order: X_m1 Y_m1 X_m2 Y_m2 X_o1 Y_o1 X_o2 Y_o2");
                    for row in cm.to_rows() {
                        let cells: Vec<String> = row.iter().map(|v| format!("{v:>24.16e}")).collect();
                        println!("{}", cells.join(" "));
                    }
                }
            } else {
                let cross = cross_blocks(&p)?;
                if cli.json {
                    #[derive(Serialize)]
                    struct BlocksOut {
                        params: SystemParams,
                        v1: f64,
                        v13: f64,
                        v2: f64,
                        v57: f64,
                        v15: f64,
                        v17: f64,
                        mechanical: optocoherence::SymmetricTwoModeCM,
                        optical: optocoherence::SymmetricTwoModeCM,
                    }
                    print_json(&BlocksOut {
                        params: p,
                        v1: blocks.v1,
                        v13: blocks.v13,
                        v2: blocks.v2,
                        v57: blocks.v57,
                        v15: cross.v15,
                        v17: cross.v17,
                        mechanical: mech,
                        optical: opt,
                    })?;
                } else {
                    for (name, v) in [
                        ("V1", blocks.v1),
                        ("V13", blocks.v13),
                        ("V2", blocks.v2),
                        ("V57", blocks.v57),
                        ("V15", cross.v15),
                        ("V17", cross.v17),
                    ] {
                        println!("{name:<4} {v:.16e}");
                    }
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Verification) => ExitCode::from(EXIT_VERIFICATION),
    }
}
