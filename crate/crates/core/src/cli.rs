//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 bad input, 3 numerical
//! failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::channel::{apply_programmed, program_channel, program_overlap, DensityMatrix};
use crate::circuit::{build_general_circuit, build_optimal_circuit, verify_identities, Circuit, Gate};
use crate::cxmat::ComplexMatrix;
use crate::error::{Error, Result};
use crate::minimax::{
    canonical_interaction, covariance_transform, dress, fidelity_uv, kraus_cirac_decompose,
    optimal_interaction, s_operator, theta_from_alpha, worst_case_fidelity, Sign,
};
use crate::oracle::{minimax_scan, write_trace, ScanConfig};
use crate::pauli::{explicit_t, hadamard_t, PhaseVector};
use crate::random::haar_unitary;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Residual bound used by `verify`.
const VERIFY_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "progchan", version, about = "Programmable qubit channels and worst-case programming fidelity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Worst-case fidelity report of an interaction.
    WorstCase {
        #[command(flatten)]
        v: Interaction,
        #[command(flatten)]
        out: Output,
    },
    /// Best fidelity of a target, or the overlap for a given program state.
    Fidelity {
        #[arg(long)]
        u: PathBuf,
        #[command(flatten)]
        v: Interaction,
        #[arg(long)]
        sigma: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Apply the programmed channel to an input state.
    Program {
        #[command(flatten)]
        v: Interaction,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        rho: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Emit the optimal interaction exp[iπ/4 (sx XX + sz ZZ)].
    OptimalV {
        #[arg(long, default_value = "+1", allow_hyphen_values = true)]
        sx: Sign,
        #[arg(long, default_value = "+1", allow_hyphen_values = true)]
        sz: Sign,
        /// Print the gate circuit instead of the matrix.
        #[arg(long)]
        emit_circuit: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Canonical form of an interaction.
    Decompose {
        #[command(flatten)]
        v: Interaction,
        #[command(flatten)]
        out: Output,
    },
    /// Gate circuit for an interaction, or the matrix of a circuit file.
    Circuit {
        #[command(flatten)]
        v: Interaction,
        /// Read a circuit file and print its matrix.
        #[arg(long, conflicts_with_all = ["v", "alpha"])]
        input: Option<PathBuf>,
        /// Directory for the matrix files of LOCAL gates.
        #[arg(long, default_value = ".")]
        local_dir: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Run a built-in verification suite.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, env = "PROGCHAN_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Brute-force minimax scan.
    Oracle {
        #[command(flatten)]
        v: Interaction,
        #[arg(long, default_value_t = 10_000)]
        resolution: usize,
        #[arg(long, default_value_t = 50)]
        refine: usize,
        #[arg(long, env = "PROGCHAN_SEED", default_value_t = 0)]
        seed: u64,
        /// Write every raw sample to this CSV file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// F(V) on a grid over the chamber, as CSV.
    Scan {
        #[arg(long)]
        alpha_grid: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Debug, Args)]
struct Interaction {
    /// Matrix file of the 4×4 interaction.
    #[arg(long, conflicts_with = "alpha")]
    v: Option<PathBuf>,
    /// Canonical coefficients `a1,a2,a3`; accepts forms like `pi/4`.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
}

#[derive(Debug, Args)]
struct Output {
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Identities,
    Covariance,
    Hadamard,
    All,
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    ComplexMatrix::from_json(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn read_density(path: &Path) -> Result<DensityMatrix> {
    DensityMatrix::new(read_matrix(path)?)
}

/// Parses `1.5`, `pi`, `-pi/4`, `3pi/8` or `3*pi/8`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t = s.trim();
    if let Ok(x) = t.parse::<f64>() {
        return Ok(x);
    }
    let bad = || Error::Parse(format!("bad angle {s:?}"));
    let lower = t.to_ascii_lowercase();
    let (num, den) = match lower.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim().parse::<f64>().map_err(|_| bad())?),
        None => (lower.as_str(), 1.0),
    };
    let coeff = num.strip_suffix("pi").ok_or_else(bad)?.trim_end_matches('*').trim();
    let coeff = match coeff {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(coeff * std::f64::consts::PI / den)
}

pub fn parse_alpha(s: &str) -> Result<[f64; 3]> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("expected three comma-separated angles, got {s:?}")));
    }
    Ok([parse_angle(parts[0])?, parse_angle(parts[1])?, parse_angle(parts[2])?])
}

impl Interaction {
    fn given(&self) -> bool {
        self.v.is_some() || self.alpha.is_some()
    }

    fn load(&self) -> Result<ComplexMatrix> {
        match (&self.v, &self.alpha) {
            (Some(p), _) => read_matrix(p),
            (None, Some(a)) => Ok(canonical_interaction(parse_alpha(a)?)),
            (None, None) => Err(Error::Config("one of --v or --alpha is required".into())),
        }
    }
}

impl Output {
    fn emit(&self, stdout: &mut dyn Write, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => fs::write(p, text).map_err(|e| io_err(p, e)),
            None => stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::Io(e.to_string())),
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable report");
    s.push('\n');
    s
}

struct Row {
    suite: &'static str,
    check: String,
    status: &'static str,
    residual: f64,
}

fn identity_rows() -> Vec<Row> {
    verify_identities()
        .into_iter()
        .map(|c| Row {
            suite: "identities",
            check: format!("line {}: {}", c.line, c.tested),
            status: c.status(),
            residual: c.residual,
        })
        .collect()
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn covariance_rows(seed: u64, samples: usize) -> Result<Vec<Row>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let u = haar_unitary(2, &mut rng);
        let v = haar_unitary(4, &mut rng);
        let w: Vec<_> = (0..4).map(|_| haar_unitary(2, &mut rng)).collect();
        let lhs = s_operator(&u, &dress(&v, &w[0], &w[1], &w[2], &w[3])?)?;
        let rhs = covariance_transform(&u, &w[0], &w[1], &w[2], &w[3], &v)?;
        worst = worst.max(lhs.distance(&rhs));
    }
    Ok(vec![Row {
        suite: "covariance",
        check: format!("S(U,(W1⊗W2)V(W3⊗W4)) = W2* S(W1†UW3†,V) W4* over {samples} samples"),
        status: pass(worst <= VERIFY_TOL),
        residual: worst,
    }])
}

fn hadamard_rows(seed: u64, samples: usize) -> Vec<Row> {
    use std::f64::consts::{FRAC_PI_2, PI};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut norm, mut excess, mut routes) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..samples {
        let p = PhaseVector::new(std::array::from_fn(|_| rng.random_range(-PI..PI)));
        let t = hadamard_t(&p);
        norm = norm.max((t.moduli_sq().iter().sum::<f64>() - 4.0).abs());
        excess = excess.max(t.min_modulus_sq().0.sqrt() - 1.0);
        let e = explicit_t(&p).amplitudes();
        for (a, b) in t.amplitudes().iter().zip(e) {
            routes = routes.max((a - b).norm());
        }
    }
    let mut cert = 0.0f64;
    for p in [PhaseVector::new([0.0, FRAC_PI_2, PI, FRAC_PI_2])] {
        for q in [p, p.negated()] {
            for m in hadamard_t(&q).moduli() {
                cert = cert.max((m - 1.0).abs());
            }
        }
    }
    vec![
        Row {
            suite: "hadamard",
            check: format!("Σ|t_j|² = 4 over {samples} random θ"),
            status: pass(norm <= 1e-10),
            residual: norm,
        },
        Row {
            suite: "hadamard",
            check: format!("min |t_j| ≤ 1 over {samples} random θ"),
            status: pass(excess <= VERIFY_TOL),
            residual: excess.max(0.0),
        },
        Row {
            suite: "hadamard",
            check: "Hadamard and explicit t_j agree".into(),
            status: pass(routes <= VERIFY_TOL),
            residual: routes,
        },
        Row {
            suite: "hadamard",
            check: "θ = ±(0, π/2, π, π/2) gives |t_j| = 1".into(),
            status: pass(cert <= VERIFY_TOL),
            residual: cert,
        },
    ]
}

fn write_local(dir: &Path, k: usize, m: &ComplexMatrix) -> Result<String> {
    let name = format!("local{k}.json");
    let path = dir.join(&name);
    fs::write(&path, m.to_json()).map_err(|e| io_err(&path, e))?;
    Ok(path.display().to_string())
}

fn circuit_text(c: &Circuit, dir: &Path) -> Result<String> {
    let mut failure = None;
    let text = c.to_text(|k, m| match write_local(dir, k, m) {
        Ok(name) => name,
        Err(e) => {
            failure.get_or_insert(e);
            String::new()
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(text),
    }
}

fn scan_csv(n: usize) -> Result<String> {
    use std::f64::consts::FRAC_PI_4;
    if n < 2 {
        return Err(Error::Config("--alpha-grid needs at least 2 points per axis".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["alpha1", "alpha2", "alpha3", "t0_sq", "t1_sq", "t2_sq", "t3_sq", "F"])
        .map_err(csv_err)?;
    let step = 1.0 / (n - 1) as f64;
    for i in 0..n {
        let a1 = FRAC_PI_4 * i as f64 * step;
        for j in 0..n {
            let a2 = a1 * j as f64 * step;
            for k in 0..n {
                // + 0.0 turns −0 into 0
                let a3 = a2 * (2.0 * k as f64 * step - 1.0) + 0.0;
                let t = hadamard_t(&theta_from_alpha([a1, a2, a3]));
                let sq = t.moduli_sq();
                let f = t.min_modulus_sq().0 / 4.0;
                let row = [a1, a2, a3, sq[0], sq[1], sq[2], sq[3], f].map(|x| x.to_string());
                w.write_record(&row).map_err(csv_err)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn dispatch(cmd: Command, stdout: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::WorstCase { v, out } => {
            let report = worst_case_fidelity(&v.load()?)?;
            out.emit(stdout, &to_json(&report))?;
        }
        Command::Fidelity { u, v, sigma, out } => {
            let u = read_matrix(&u)?;
            let v = v.load()?;
            let value = match sigma {
                Some(p) => {
                    let s = read_density(&p)?;
                    json!({ "overlap": program_overlap(&u, &v, &s)? })
                }
                None => {
                    let (f, s) = fidelity_uv(&u, &v)?;
                    json!({ "fidelity": f, "optimal_sigma": s })
                }
            };
            out.emit(stdout, &to_json(&value))?;
        }
        Command::Program { v, sigma, rho, out } => {
            let v = v.load()?;
            let sigma = read_density(&sigma)?;
            let rho = read_density(&rho)?;
            let output = apply_programmed(&v, &sigma, &rho)?;
            let channel = program_channel(&v, &sigma)?;
            let value = json!({ "output": output, "kraus": channel.operators() });
            out.emit(stdout, &to_json(&value))?;
        }
        Command::OptimalV { sx, sz, emit_circuit, out } => {
            let text = if emit_circuit {
                build_optimal_circuit(sx, sz).to_text(|_, _| unreachable!("no local gates"))
            } else {
                optimal_interaction(sx, sz).to_json() + "\n"
            };
            out.emit(stdout, &text)?;
        }
        Command::Decompose { v, out } => {
            let cf = kraus_cirac_decompose(&v.load()?)?;
            out.emit(stdout, &to_json(&cf))?;
        }
        Command::Circuit { v, input, local_dir, out } => {
            if let Some(path) = input {
                let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
                let base = path.parent().unwrap_or(Path::new("."));
                let c = Circuit::parse(&text, |name| {
                    let p = Path::new(name);
                    read_matrix(&if p.is_absolute() { p.to_path_buf() } else { base.join(p) })
                })?;
                out.emit(stdout, &(c.matrix()?.to_json() + "\n"))?;
            } else {
                if !v.given() {
                    return Err(Error::Config("one of --v, --alpha or --input is required".into()));
                }
                let cf = match (&v.v, &v.alpha) {
                    (None, Some(a)) => crate::minimax::CanonicalForm::bare(parse_alpha(a)?),
                    _ => kraus_cirac_decompose(&v.load()?)?,
                };
                let mut c = build_general_circuit(&cf)?;
                let id = ComplexMatrix::identity(2);
                c.gates.retain(|g| !matches!(g, Gate::Local { matrix, .. } if *matrix == id));
                out.emit(stdout, &circuit_text(&c, &local_dir)?)?;
            }
        }
        Command::Verify { suite, seed, samples } => {
            let mut rows = Vec::new();
            if matches!(suite, Suite::Identities | Suite::All) {
                rows.extend(identity_rows());
            }
            if matches!(suite, Suite::Covariance | Suite::All) {
                rows.extend(covariance_rows(seed, samples)?);
            }
            if matches!(suite, Suite::Hadamard | Suite::All) {
                rows.extend(hadamard_rows(seed, samples));
            }
            let mut failed = false;
            let mut text = String::new();
            for r in &rows {
                failed |= r.status == "fail";
                text.push_str(&format!("{:<11} {:<26} {:.3e}  {}\n", r.suite, r.status, r.residual, r.check));
            }
            stdout.write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string()))?;
            return Ok(if failed { EXIT_VERIFY } else { EXIT_OK });
        }
        Command::Oracle { v, resolution, refine, seed, trace, out } => {
            let v = v.load()?;
            let config = ScanConfig {
                resolution,
                refine_steps: refine,
                seed,
                ..ScanConfig::default()
            };
            let result = minimax_scan(&v, &config)?;
            if let Some(p) = trace {
                let file = fs::File::create(&p).map_err(|e| io_err(&p, e))?;
                write_trace(&v, &config, std::io::BufWriter::new(file))?;
            }
            out.emit(stdout, &to_json(&result))?;
            if result.gap_to_closed_form < -1e-9 {
                return Ok(EXIT_VERIFY);
            }
        }
        Command::Scan { alpha_grid, out } => {
            out.emit(stdout, &scan_csv(alpha_grid)?)?;
        }
    }
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the verb, writing reports
/// to `stdout` and diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INPUT
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}
