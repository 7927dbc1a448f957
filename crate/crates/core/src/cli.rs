//! Command-line front end. Every subcommand parses its inputs, calls one
//! library operation and writes the result as JSON (vector files for
//! `encrypt`/`decrypt`, a report with a reproducibility header otherwise).
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 on solver or budget
//! failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::codec::{self, Ciphertext, SolverChoice, SparseMessage, VectorFile};
use crate::error::{Error, Result};
use crate::keymatrix::{compose, derive_matrix, Dictionary, MeasurementMatrix, SecretKey};
use crate::ripcheck;
use crate::secrecy::{self, KeyEnsemble};
use crate::subsets::Budget;

pub const TOOL_NAME: &str = "cs-secrecy";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "cs-secrecy", version, about = "Compressed-sensing encryption and secrecy audits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a key file.
    Keygen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Encrypt a message vector: y = Phi Psi alpha.
    Encrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        message: PathBuf,
        #[command(flatten)]
        dict: DictArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Recover the plaintext from a ciphertext and the shared key.
    Decrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        cipher: PathBuf,
        /// Sparsity of the plaintext coefficients (shared configuration).
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = SolverArg::Auto)]
        solver: SolverArg,
        #[command(flatten)]
        dict: DictArg,
        /// Also write the recovery details as a JSON report.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Restricted isometry constant of order k by full support enumeration.
    Rip {
        #[command(flatten)]
        matrix: MatrixArg,
        #[arg(long)]
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Spark (smallest dependent column set).
    Spark {
        #[command(flatten)]
        matrix: MatrixArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact mutual information of an idealized key model.
    MiIdeal {
        #[arg(long, value_enum)]
        model: IdealModel,
        #[arg(long)]
        t: usize,
        /// Build the joint by walking every key instead of analytically.
        #[arg(long)]
        enumerate: bool,
        /// Export the joint table as CSV.
        #[arg(long)]
        joint_csv: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact mutual information of quantized ciphertexts over a key ensemble.
    MiEnsemble {
        /// Key files; alternatively use --seeds with --m and --n.
        #[arg(long, num_args = 1..)]
        keys: Vec<PathBuf>,
        /// Seeds as `a-b` (inclusive) or a comma list.
        #[arg(long)]
        seeds: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// JSON array of vector objects, taken as uniformly distributed.
        #[arg(long)]
        messages: PathBuf,
        #[arg(long)]
        bin_width: f64,
        #[command(flatten)]
        dict: DictArg,
        #[arg(long)]
        joint_csv: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Norm-band pruning of candidate plaintexts given a ciphertext.
    Prune {
        #[arg(long)]
        cipher: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// JSON array of vector objects.
        #[arg(long)]
        candidates: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Export the derived measurement matrix as CSV.
    ExportMatrix {
        #[arg(long)]
        key: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct DictArg {
    /// Orthonormal dictionary as CSV (default: identity).
    #[arg(long)]
    pub dict: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct MatrixArg {
    #[arg(long)]
    pub key: Option<PathBuf>,
    /// Explicit matrix as CSV.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverArg {
    Omp,
    Bp,
    L0,
    Auto,
}

impl From<SolverArg> for SolverChoice {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Omp => SolverChoice::Omp,
            SolverArg::Bp => SolverChoice::Bp,
            SolverArg::L0 => SolverChoice::L0,
            SolverArg::Auto => SolverChoice::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IdealModel {
    T1,
    T2,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Validation(m) => Error::Validation(format!("{}: {m}", path.display())),
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn load_key(path: &Path) -> Result<SecretKey> {
    with_path(path, SecretKey::from_json(&read(path)?))
}

fn load_dict(arg: &DictArg, n: usize) -> Result<Dictionary> {
    match &arg.dict {
        None => Ok(Dictionary::identity(n)),
        Some(p) => {
            let m = with_path(p, MeasurementMatrix::read_csv(read(p)?.as_bytes()))?;
            let d = with_path(p, Dictionary::from_matrix(&m))?;
            if d.n() != n {
                return Err(Error::Dimension(format!("dictionary is {}x{} but the key has n = {n}", d.n(), d.n())));
            }
            Ok(d)
        }
    }
}

fn load_matrix(arg: &MatrixArg) -> Result<(MeasurementMatrix, Value)> {
    match (&arg.key, &arg.matrix) {
        (Some(k), _) => {
            let key = load_key(k)?;
            Ok((derive_matrix(&key)?, serde_json::to_value(key).expect("key serializes")))
        }
        (None, Some(p)) => {
            let m = with_path(p, MeasurementMatrix::read_csv(read(p)?.as_bytes()))?;
            let src = json!({ "matrix": p.display().to_string(), "m": m.rows(), "n": m.cols() });
            Ok((m, src))
        }
        (None, None) => Err(Error::Validation("one of --key or --matrix is required".into())),
    }
}

fn load_vectors(path: &Path) -> Result<Vec<SparseMessage>> {
    let files: Vec<VectorFile> = serde_json::from_str(&read(path)?)
        .map_err(|e| Error::Validation(format!("{}: expected a JSON array of vectors: {e}", path.display())))?;
    files
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            if f.entries.len() != f.n {
                return Err(Error::Validation(format!(
                    "{}: [{i}].n is {} but entries has {} values",
                    path.display(),
                    f.n,
                    f.entries.len()
                )));
            }
            with_path(path, SparseMessage::new(f.entries))
        })
        .collect()
}

fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    let bad = || Error::Validation(format!("seeds: expected `a-b` or a comma list, got {spec:?}"));
    if let Some((a, b)) = spec.split_once('-') {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        Ok((a..=b).collect())
    } else {
        spec.split(',').map(|s| s.trim().parse::<u64>().map_err(|_| bad())).collect()
    }
}

fn report(command: &str, params: Value, result: Value) -> Value {
    json!({
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "command": command,
        "params": params,
        "result": result,
    })
}

fn emit(output: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match output {
        Some(p) => fs::write(p, format!("{text}\n"))?,
        None => writeln!(stdout, "{text}")?,
    }
    Ok(())
}

fn emit_json(output: &Option<PathBuf>, v: &Value, stdout: &mut dyn Write) -> Result<()> {
    emit(output, &serde_json::to_string_pretty(v).expect("json value serializes"), stdout)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Executes one parsed command.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    let budget = Budget::from_env()?;
    match cli.command {
        Command::Keygen { seed, m, n, output } => {
            let key = SecretKey::new(seed, m, n)?;
            emit(&output, &key.to_json(), stdout)
        }
        Command::Encrypt { key, message, dict, output } => {
            let key = load_key(&key)?;
            let x = with_path(&message, SparseMessage::from_json(&read(&message)?))?;
            let psi = load_dict(&dict, key.n)?;
            let a = compose(&derive_matrix(&key)?, &psi)?;
            let y = codec::encrypt(&a, &x)?;
            emit(&output, &y.to_json(), stdout)
        }
        Command::Decrypt { key, cipher, k, solver, dict, report: report_path, output } => {
            let key_v = load_key(&key)?;
            let y = with_path(&cipher, Ciphertext::from_json(&read(&cipher)?))?;
            let psi = load_dict(&dict, key_v.n)?;
            let d = codec::decrypt_with_budget(&key_v, &psi, &y, k, solver.into(), budget)?;
            if let Some(p) = report_path {
                let params = json!({ "key": key_v, "k": k, "solver": solver, "budget": budget.0 });
                emit_json(&Some(p), &report("decrypt", params, to_value(&d.recovery)), stdout)?;
            }
            emit(&output, &d.message.to_json(), stdout)
        }
        Command::Rip { matrix, k, output } => {
            let (a, src) = load_matrix(&matrix)?;
            let r = ripcheck::rip_constant(&a, k, budget)?;
            let params = json!({ "source": src, "k": k, "budget": budget.0 });
            emit_json(&output, &report("rip", params, to_value(&r)), stdout)
        }
        Command::Spark { matrix, output } => {
            let (a, src) = load_matrix(&matrix)?;
            let r = ripcheck::spark(&a, budget)?;
            let params = json!({ "source": src, "budget": budget.0 });
            emit_json(&output, &report("spark", params, to_value(&r)), stdout)
        }
        Command::MiIdeal { model, t, enumerate, joint_csv, output } => {
            let joint = match (model, enumerate) {
                (IdealModel::T1, false) => secrecy::ideal_t1_joint(t)?,
                (IdealModel::T1, true) => secrecy::ideal_t1_joint_enumerated(t, budget)?,
                (IdealModel::T2, false) => secrecy::ideal_t2_joint(t)?,
                (IdealModel::T2, true) => secrecy::ideal_t2_joint_enumerated(t)?,
            };
            if let Some(p) = &joint_csv {
                joint.write_csv(fs::File::create(p)?)?;
            }
            let mi = secrecy::exact_mi(&joint);
            let mut result = to_value(&mi);
            if let IdealModel::T1 = model {
                result["closed_form_bits"] = json!(secrecy::t1_closed_form(t)?);
            }
            let params = json!({ "model": model, "t": t, "enumerate": enumerate });
            emit_json(&output, &report("mi-ideal", params, result), stdout)
        }
        Command::MiEnsemble { keys, seeds, m, n, messages, bin_width, dict, joint_csv, output } => {
            let key_list: Vec<SecretKey> = match (keys.is_empty(), &seeds) {
                (false, None) => keys.iter().map(|p| load_key(p)).collect::<Result<_>>()?,
                (true, Some(s)) => {
                    let (m, n) = match (m, n) {
                        (Some(m), Some(n)) => (m, n),
                        _ => return Err(Error::Validation("--seeds needs --m and --n".into())),
                    };
                    parse_seeds(s)?.into_iter().map(|seed| SecretKey::new(seed, m, n)).collect::<Result<_>>()?
                }
                _ => return Err(Error::Validation("give exactly one of --keys or --seeds".into())),
            };
            let n = key_list[0].n;
            let ensemble = KeyEnsemble::uniform(key_list.clone())?;
            let msgs = load_vectors(&messages)?;
            let psi = load_dict(&dict, n)?;
            let joint = secrecy::cs_ensemble_joint(&ensemble, &msgs, &psi, bin_width)?;
            if let Some(p) = &joint_csv {
                joint.write_csv(fs::File::create(p)?)?;
            }
            let mut result = to_value(&secrecy::exact_mi(&joint));
            result["cryptogram_cells"] = json!(joint.t_y());
            let params = json!({
                "keys": key_list,
                "messages": messages.display().to_string(),
                "message_count": msgs.len(),
                "bin_width": bin_width,
                "dict": dict.dict.as_ref().map(|p| p.display().to_string()),
            });
            emit_json(&output, &report("mi-ensemble", params, result), stdout)
        }
        Command::Prune { cipher, epsilon, candidates, output } => {
            let y = with_path(&cipher, Ciphertext::from_json(&read(&cipher)?))?;
            let cands = load_vectors(&candidates)?;
            let r = secrecy::prune_candidates(&y, epsilon, &cands)?;
            let params = json!({
                "cipher": cipher.display().to_string(),
                "epsilon": epsilon,
                "candidates": candidates.display().to_string(),
            });
            emit_json(&output, &report("prune", params, to_value(&r)), stdout)
        }
        Command::ExportMatrix { key, output } => {
            let a = derive_matrix(&load_key(&key)?)?;
            emit(&output, a.to_csv().trim_end(), stdout)
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = write!(stderr, "{e}");
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_computational() {
                2
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_specs() {
        assert_eq!(parse_seeds("3-6").unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(parse_seeds("1, 9,2").unwrap(), vec![1, 9, 2]);
        assert!(parse_seeds("6-3").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["cs-secrecy", "keygen", "--seed", "1"], &mut out, &mut err), 1);
        assert_eq!(run(["cs-secrecy", "--help"], &mut out, &mut err), 0);
    }

    #[test]
    fn keygen_to_stdout() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(["cs-secrecy", "keygen", "--seed", "42", "--m", "16", "--n", "32"], &mut out, &mut err);
        assert_eq!(code, 0);
        assert_eq!(String::from_utf8(out).unwrap().trim(), r#"{"version":1,"seed":"42","m":16,"n":32}"#);
    }

    #[test]
    fn mi_ideal_report_has_header() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["cs-secrecy", "mi-ideal", "--model", "t1", "--t", "4"], &mut out, &mut err), 0);
        let v: Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["tool"], TOOL_NAME);
        assert_eq!(v["version"], TOOL_VERSION);
        assert_eq!(v["params"]["t"], 4);
        assert!((v["result"]["mi_bits"].as_f64().unwrap() - 0.811278).abs() < 1e-6);
    }
}
