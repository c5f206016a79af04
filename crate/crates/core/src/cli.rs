//! The `qsynth` command line.
//!
//! Exit codes: 0 success, 1 verification mismatch, 2 usage or parse error,
//! 3 invalid input (not unitary, not normalized, width mismatch), 4 internal
//! failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::circuit::{emit_text, parse_text, to_qasm, Circuit};
use crate::error::Error;
use crate::io::{emit_matrix, emit_state, parse_matrix, parse_state};
use crate::layout::map_nearest_neighbor;
use crate::linalg::{random_state, random_unitary, StateVector, UnitaryMatrix};
use crate::sim::{apply_circuit, circuit_to_unitary, equivalence, verify_synthesis};
use crate::synth::{prepare_state, synth_qr, synth_qsd, QsdOptions, SynthesisReport};

const SYNTH_TOL: f64 = 1e-6;
const PREP_TOL: f64 = 1e-8;
const VERIFY_TOL: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(
    name = "qsynth",
    version,
    about = "Compile unitaries and states into Ry/Rz/CNOT/CZ circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a circuit for a unitary matrix file.
    Synth(SynthArgs),
    /// Synthesize a circuit preparing a state from a basis state.
    Prep(PrepArgs),
    /// Compare a circuit file against a matrix file.
    Verify { circuit: PathBuf, matrix: PathBuf },
    /// Print CNOT counts per method for Haar-random unitaries.
    Bench {
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        trials: usize,
    },
    /// Write a Haar-random unitary matrix file.
    RandomUnitary {
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a random state file.
    RandomState {
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Qsd,
    Qr,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Qasm,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Circuit destination; without it the circuit goes to standard output
    /// ahead of the report.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Map the circuit onto a linear nearest-neighbor chain.
    #[arg(long)]
    nn: bool,
}

#[derive(Args, Debug)]
struct SynthArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Qsd)]
    method: MethodArg,
    /// Recursion base for qsd: 1 or 2. The optimizations need base 2.
    #[arg(long, default_value_t = 2)]
    base: usize,
    #[arg(long)]
    no_a1: bool,
    #[arg(long)]
    no_a2: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct PrepArgs {
    input: PathBuf,
    /// Starting basis state as a bitstring, qubit 0 first. Defaults to all
    /// zeros.
    #[arg(long)]
    target: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

/// Failure carrying its exit code.
struct Fail {
    code: i32,
    msg: String,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::OptionConflict(_) => 2,
            Error::NotUnitary { .. } | Error::NotNormalized { .. } | Error::Dimension(_) | Error::NonFinite(_) => 3,
            _ => 4,
        };
        Fail {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail {
            code: 4,
            msg: e.to_string(),
        }
    }
}

fn fail(code: i32, msg: impl Into<String>) -> Fail {
    Fail { code, msg: msg.into() }
}

type CmdResult = std::result::Result<i32, Fail>;

fn read(path: &Path) -> std::result::Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| fail(2, format!("{}: {e}", path.display())))
}

fn with_context(path: &Path) -> impl Fn(Error) -> Fail + '_ {
    move |e| {
        let f = Fail::from(e);
        Fail {
            code: f.code,
            msg: format!("{}: {}", path.display(), f.msg),
        }
    }
}

/// Parses and runs one invocation.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Synth(a) => cmd_synth(&a, out),
        Command::Prep(a) => cmd_prep(&a, out),
        Command::Verify { circuit, matrix } => cmd_verify(&circuit, &matrix, out),
        Command::Bench {
            n_min,
            n_max,
            seed,
            trials,
        } => cmd_bench(n_min, n_max, seed, trials, out),
        Command::RandomUnitary { n, seed, out: path } => {
            write_or_print(&emit_matrix(&random_unitary(n, seed)), path.as_deref(), out).map(|_| 0)
        }
        Command::RandomState { n, seed, out: path } => {
            write_or_print(&emit_state(&random_state(n, seed)), path.as_deref(), out).map(|_| 0)
        }
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}

fn write_or_print(text: &str, path: Option<&Path>, out: &mut dyn Write) -> std::result::Result<(), Fail> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| fail(4, format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(Fail::from),
    }
}

fn emit_circuit(c: &Circuit, o: &OutputArgs, out: &mut dyn Write) -> std::result::Result<(), Fail> {
    let text = match o.format {
        Format::Text => emit_text(c),
        Format::Qasm => to_qasm(c),
    };
    write_or_print(&text, o.out.as_deref(), out)
}

fn write_counts(out: &mut dyn Write, method: &str, c: &Circuit) -> std::io::Result<()> {
    let k = c.counts();
    writeln!(out, "method={method}")?;
    writeln!(out, "n={}", c.width())?;
    writeln!(out, "cnot={}", k.cnot)?;
    writeln!(out, "cz={}", k.cz)?;
    writeln!(out, "ry={}", k.ry)?;
    writeln!(out, "rz={}", k.rz)?;
    writeln!(out, "ph={}", k.phase)
}

fn cmd_synth(a: &SynthArgs, out: &mut dyn Write) -> CmdResult {
    let u = parse_matrix(&read(&a.input)?).map_err(with_context(&a.input))?;
    let start = Instant::now();
    let (circuit, report) = match a.method {
        MethodArg::Qsd => {
            let opts = if a.base == 2 {
                QsdOptions {
                    base_size: 2,
                    opt_a1: !a.no_a1,
                    opt_a2: !a.no_a2,
                    nn: a.output.nn,
                }
            } else {
                QsdOptions {
                    nn: a.output.nn,
                    ..QsdOptions::plain(a.base)
                }
            };
            synth_qsd(&u, &opts)?
        }
        MethodArg::Qr => {
            let mut c = synth_qr(&u)?;
            if a.output.nn {
                c = map_nearest_neighbor(&c);
            }
            let r = verify_synthesis(&u, &c)?;
            (c, r)
        }
    };
    let elapsed = start.elapsed().as_secs_f64();
    emit_circuit(&circuit, &a.output, out)?;
    let method = match a.method {
        MethodArg::Qsd => "qsd",
        MethodArg::Qr => "qr",
    };
    write_counts(out, method, &circuit)?;
    writeln!(out, "recon_err={:.3e}", report.recon_err)?;
    writeln!(out, "elapsed_s={elapsed:.3}")?;
    if report.recon_err <= SYNTH_TOL {
        Ok(0)
    } else {
        Err(fail(
            4,
            format!("reconstruction error {:.3e} exceeds {SYNTH_TOL:e}", report.recon_err),
        ))
    }
}

fn parse_target(bits: Option<&str>, n: usize) -> std::result::Result<usize, Fail> {
    let Some(bits) = bits else { return Ok(0) };
    if bits.len() != n || !bits.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(fail(
            2,
            format!("target must be a {n}-character bitstring, got `{bits}`"),
        ));
    }
    Ok(bits.bytes().fold(0, |acc, b| (acc << 1) | (b - b'0') as usize))
}

fn cmd_prep(a: &PrepArgs, out: &mut dyn Write) -> CmdResult {
    let psi = parse_state(&read(&a.input)?).map_err(with_context(&a.input))?;
    let n = psi.qubits();
    let target = parse_target(a.target.as_deref(), n)?;
    let start = Instant::now();
    let mut circuit = prepare_state(&psi, target)?;
    if a.output.nn {
        circuit = map_nearest_neighbor(&circuit);
    }
    let got = apply_circuit(&StateVector::basis(n, target), &circuit)?;
    let fidelity = got.fidelity(&psi);
    let elapsed = start.elapsed().as_secs_f64();
    emit_circuit(&circuit, &a.output, out)?;
    write_counts(out, "prep", &circuit)?;
    writeln!(out, "fidelity={fidelity:.15}")?;
    writeln!(out, "elapsed_s={elapsed:.3}")?;
    if fidelity >= 1.0 - PREP_TOL {
        Ok(0)
    } else {
        Err(fail(4, format!("fidelity {fidelity} below 1 - {PREP_TOL:e}")))
    }
}

fn cmd_verify(circuit: &Path, matrix: &Path, out: &mut dyn Write) -> CmdResult {
    let c = parse_text(&read(circuit)?).map_err(with_context(circuit))?;
    let u = parse_matrix(&read(matrix)?).map_err(with_context(matrix))?;
    if c.width() != u.qubits() {
        return Err(fail(
            3,
            format!("circuit has {} qubits, matrix {}", c.width(), u.qubits()),
        ));
    }
    let m = circuit_to_unitary(&c)?;
    let rep = equivalence(&u, &m, VERIFY_TOL)?;
    writeln!(out, "equal_exact={}", rep.equal_exact)?;
    writeln!(out, "equal_up_to_phase={}", rep.equal_up_to_phase)?;
    writeln!(out, "phase={:.12}", rep.phase)?;
    writeln!(out, "max_err={:.3e}", rep.max_err)?;
    writeln!(out, "aligned_err={:.3e}", rep.aligned_err)?;
    Ok(if rep.equal_exact { 0 } else { 1 })
}

/// Prior-work CSD-based count.
pub fn csd_reference(n: usize) -> u64 {
    (1u64 << (2 * n)) - 2 * (1u64 << n)
}

/// Lower bound on the CNOT count of a generic n-qubit unitary.
pub fn cnot_lower_bound(n: usize) -> u64 {
    ((1u64 << (2 * n)) - 3 * n as u64 - 1).div_ceil(4)
}

type BenchFn = Box<dyn Fn(&UnitaryMatrix) -> crate::error::Result<SynthesisReport> + Sync>;

fn bench_methods() -> [(&'static str, BenchFn); 4] {
    let qsd = |opts: QsdOptions| -> BenchFn { Box::new(move |u| synth_qsd(u, &opts).map(|(_, r)| r)) };
    [
        ("qr", Box::new(|u| verify_synthesis(u, &synth_qr(u)?))),
        ("qsd_l1", qsd(QsdOptions::plain(1))),
        ("qsd_l2", qsd(QsdOptions::plain(2))),
        ("qsd_opt", qsd(QsdOptions::default())),
    ]
}

fn cmd_bench(n_min: usize, n_max: usize, seed: u64, trials: usize, out: &mut dyn Write) -> CmdResult {
    if n_min < 2 || n_min > n_max || trials == 0 {
        return Err(fail(2, "need 2 <= n_min <= n_max and trials >= 1"));
    }
    writeln!(
        out,
        "{:>2} {:>6} {:>7} {:>7} {:>7} {:>7} {:>6} {:>9}",
        "n", "qr", "qsd_l1", "qsd_l2", "qsd_opt", "csd_ref", "lower", "max_err"
    )?;
    for n in n_min..=n_max {
        let inputs: Vec<_> = (0..trials)
            .map(|t| random_unitary(n, seed.wrapping_add(1000 * n as u64 + t as u64)))
            .collect();
        let mut cells = Vec::new();
        let mut max_err = 0.0f64;
        for (name, f) in bench_methods() {
            let reports = inputs.par_iter().map(&f).collect::<crate::error::Result<Vec<_>>>()?;
            let counts: Vec<usize> = reports.iter().map(|r| r.counts.cnot_equivalent()).collect();
            if counts.iter().any(|&c| c != counts[0]) {
                return Err(fail(
                    4,
                    format!("n={n} {name}: counts differ across trials: {counts:?}"),
                ));
            }
            max_err = reports.iter().fold(max_err, |m, r| m.max(r.recon_err));
            cells.push(counts[0].to_string());
        }
        writeln!(
            out,
            "{n:>2} {:>6} {:>7} {:>7} {:>7} {:>7} {:>6} {max_err:>9.2e}",
            cells[0],
            cells[1],
            cells[2],
            cells[3],
            csd_reference(n),
            cnot_lower_bound(n)
        )?;
    }
    Ok(0)
}
