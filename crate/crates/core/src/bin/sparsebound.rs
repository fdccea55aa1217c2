//! Command-line front end.
//!
//! Exit codes: 0 success (for `solve`: certificate), 1 infeasible or failed
//! verification, 2 uncovered, 3 any error.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sparsebound::asymptotics::{
    self, density_sweep, gen_primorial, lemma4_ratio, sigma_asy_estimate, PrimorialKind,
    SweepConfig, DEFAULT_BOX_CAP,
};
use sparsebound::geometry::{self, DEFAULT_COVER_CAP};
use sparsebound::linalg::{self, MinorConfig};
use sparsebound::matrix::{format_vector, parse_vector, IntegerMatrix};
use sparsebound::oracle::{Oracle, OracleCaps, SigmaValue};
use sparsebound::residue::DEFAULT_GROUP_CAP;
use sparsebound::solver::{
    parse_certificates, solve_sparse, support_bounds, verify_certificate, InfeasibleReason, Mode,
    Outcome, PlanCache, PlanConfig,
};
use sparsebound::{Error, Result};

const EXIT_ERROR: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "sparsebound", version, about = "Certified sparse nonnegative integer solutions of Ax = b")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Support bound to certify: i (m + φ of the subcone) or ii (2m + φ^min).
    #[arg(long, global = true, default_value = "i", value_parser = parse_mode)]
    mode: Mode,
    /// Column subset W of A (comma-separated indices); defaults to all columns.
    #[arg(long, global = true, value_delimiter = ',')]
    w: Option<Vec<usize>>,
    #[arg(long, global = true, default_value_t = DEFAULT_GROUP_CAP)]
    cap_group: u64,
    /// Largest number of m-column subsets examined for minors and cone covers.
    #[arg(long, global = true, default_value_t = DEFAULT_COVER_CAP)]
    cap_minors: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_BOX_CAP)]
    cap_box: u64,
    /// Oracle work budget per query.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    cap_oracle: u64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here (atomically) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Records,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minor statistics and support bounds.
    Analyze {
        matrix: PathBuf,
        /// Assert that the columns of A form a Hilbert basis of cone(A).
        #[arg(long)]
        hilbert_basis: bool,
    },
    /// Certify a sparse solution of Ax = b.
    Solve {
        matrix: PathBuf,
        /// Right-hand side, e.g. `5,12`.
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Exact minimum support σ(A,b).
    Sigma {
        matrix: PathBuf,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Support densities over boxes {−t,…,t}^m.
    Sweep {
        matrix: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        t_schedule: Vec<u64>,
        /// Support thresholds; defaults to 1..=n.
        #[arg(long, value_delimiter = ',')]
        k_list: Option<Vec<usize>>,
        #[arg(long, default_value = "0.01")]
        epsilon: String,
        /// Points per radius when the box exceeds --cap-box.
        #[arg(long, default_value_t = 100_000)]
        sample_size: u64,
        /// Also report the translated-subcone coverage ratio per radius.
        #[arg(long)]
        lemma4: bool,
    },
    /// Generate a primorial instance (atilde, a or b).
    Gen {
        kind: String,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
    },
    /// Re-check certificate records against a matrix.
    Verify { matrix: PathBuf, certificates: PathBuf },
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_ERROR) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = std::env::var("SPARSEBOUND_THREADS").ok().and_then(|v| v.parse().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn read_matrix(path: &Path) -> Result<IntegerMatrix> {
    IntegerMatrix::parse(&std::fs::read_to_string(path)?)
}

/// Writes to `--out` through a temporary file in the same directory, or to
/// stdout.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(text.as_bytes())?;
            tmp.persist(path).map_err(|e| Error::Io(e.error))?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn config_lines(cli: &Cli, command: &str, extra: &[(&str, String)]) -> String {
    let c = &cli.common;
    let mut s = String::new();
    let _ = writeln!(s, "# command: {command}");
    let _ = writeln!(s, "# mode: {}", c.mode);
    if let Some(w) = &c.w {
        let _ = writeln!(s, "# w: {}", w.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","));
    }
    let _ = writeln!(
        s,
        "# caps: group={} minors={} box={} oracle={}",
        c.cap_group, c.cap_minors, c.cap_box, c.cap_oracle
    );
    let _ = writeln!(s, "# seed: {}", c.seed);
    for (k, v) in extra {
        let _ = writeln!(s, "# {k}: {v}");
    }
    s
}

fn plan_config(c: &Common) -> PlanConfig {
    PlanConfig {
        group_cap: c.cap_group,
        cover_cap: c.cap_minors,
        ..PlanConfig::default()
    }
}

fn oracle_caps(c: &Common) -> OracleCaps {
    OracleCaps {
        max_points: c.cap_oracle,
        ..OracleCaps::default()
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let c = &cli.common;
    match &cli.command {
        Command::Analyze { matrix, hilbert_basis } => {
            let a = read_matrix(matrix)?;
            eprint!("{}", config_lines(cli, "analyze", &[("matrix", matrix.display().to_string())]));
            emit(c.out.as_deref(), &analyze(&a, c, *hilbert_basis)?)?;
            Ok(0)
        }
        Command::Solve { matrix, b } => {
            let a = read_matrix(matrix)?;
            let b = parse_vector(b)?;
            let header = config_lines(
                cli,
                "solve",
                &[("matrix", matrix.display().to_string()), ("b", format_vector(&b))],
            );
            let cache = PlanCache::new();
            let plan = cache.get_or_build(&a, c.w.as_deref(), c.mode, &plan_config(c))?;
            match solve_sparse(&plan, &b)? {
                Outcome::Certificate(cert) => {
                    emit(c.out.as_deref(), &format!("{header}{}", cert.to_record()))?;
                    Ok(0)
                }
                Outcome::Infeasible(reason) => {
                    let why = match reason {
                        InfeasibleReason::NotInLattice => "b is not in the column lattice of A",
                        InfeasibleReason::OutsideCone => "b is not in cone(A)",
                    };
                    emit(c.out.as_deref(), &format!("{header}infeasible: {why}\n"))?;
                    Ok(1)
                }
                Outcome::Uncovered => {
                    emit(
                        c.out.as_deref(),
                        &format!("{header}uncovered: b is outside every translated subcone\n"),
                    )?;
                    Ok(2)
                }
            }
        }
        Command::Sigma { matrix, b } => {
            let a = read_matrix(matrix)?;
            let b = parse_vector(b)?;
            eprint!("{}", config_lines(cli, "sigma", &[("b", format_vector(&b))]));
            let r = Oracle::new(&a, oracle_caps(c))?.sigma(&b)?;
            let mut s = String::new();
            match r.value {
                SigmaValue::Finite(k) => writeln!(s, "sigma: {k}"),
                SigmaValue::Infinite => writeln!(s, "sigma: infinite"),
                SigmaValue::Unknown => writeln!(s, "sigma: unknown"),
            }
            .expect("string write");
            if let Some(x) = &r.witness {
                let _ = writeln!(s, "witness: {}", format_vector(x));
            }
            let _ = writeln!(s, "exhaustive: {}", r.exhaustive);
            let _ = writeln!(s, "caps_hit: {}", r.work_caps_hit);
            emit(c.out.as_deref(), &s)?;
            Ok(0)
        }
        Command::Sweep {
            matrix,
            t_schedule,
            k_list,
            epsilon,
            sample_size,
            lemma4,
        } => {
            let a = read_matrix(matrix)?;
            let eps = asymptotics::parse_rational(epsilon)?;
            let k_list = k_list.clone().unwrap_or_else(|| (1..=a.cols()).collect());
            let cfg = SweepConfig {
                t_schedule: t_schedule.clone(),
                k_list: k_list.clone(),
                box_cap: c.cap_box,
                sample_size: *sample_size,
                seed: c.seed,
            };
            let join = |v: &[u64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            let header = config_lines(
                cli,
                "sweep",
                &[
                    ("matrix", matrix.display().to_string()),
                    ("t_schedule", join(t_schedule)),
                    ("k_list", join(&k_list.iter().map(|&k| k as u64).collect::<Vec<_>>())),
                    ("epsilon", eps.to_string()),
                    ("sample_size", sample_size.to_string()),
                ],
            );
            let plan = PlanCache::new().get_or_build(&a, c.w.as_deref(), c.mode, &plan_config(c))?;
            let oracle = Oracle::new(&a, oracle_caps(c))?;
            let rows = density_sweep(&plan, &oracle, &cfg)?;
            let mut notes = String::new();
            if rows.len() >= 2 {
                for line in sigma_asy_estimate(&rows, &eps)?.to_string().lines() {
                    let _ = writeln!(notes, "# {line}");
                }
            }
            if *lemma4 {
                for &t in t_schedule {
                    let r = lemma4_ratio(&plan, t, c.cap_box)?;
                    let ratio = r.ratio().map_or("undefined".into(), |q| q.to_string());
                    let _ = writeln!(
                        notes,
                        "# lemma4 t={t}: {}/{} = {ratio}",
                        r.translated, r.untranslated
                    );
                }
            }
            match c.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    eprint!("{header}{notes}");
                    emit(c.out.as_deref(), &asymptotics::rows_to_csv(&rows))?;
                }
                Format::Records => {
                    let body = asymptotics::rows_to_records(&rows);
                    emit(c.out.as_deref(), &format!("{header}{notes}{body}"))?;
                }
            }
            Ok(0)
        }
        Command::Gen { kind, m, d, primes } => {
            let kind: PrimorialKind = kind.parse()?;
            let inst = gen_primorial(kind, *m, *d, primes.as_deref())?;
            eprintln!(
                "# primes: {:?}\n# q: {:?}\n# delta: {}\n# frobenius: {}",
                inst.primes,
                inst.q,
                inst.delta,
                inst.frobenius.map_or("none".into(), |f| f.to_string())
            );
            emit(c.out.as_deref(), &inst.matrix.to_text())?;
            Ok(0)
        }
        Command::Verify { matrix, certificates } => {
            let a = read_matrix(matrix)?;
            let certs = parse_certificates(&std::fs::read_to_string(certificates)?, a.cols())?;
            if certs.is_empty() {
                eprintln!("no certificate records found");
                return Ok(1);
            }
            let mut ok = true;
            let mut s = String::new();
            for (i, cert) in certs.iter().enumerate() {
                let pass = verify_certificate(&a, &cert.b, cert);
                ok &= pass;
                let _ = writeln!(s, "record {i}: {}", if pass { "ok" } else { "FAILED" });
            }
            emit(c.out.as_deref(), &s)?;
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn analyze(a: &IntegerMatrix, c: &Common, hilbert_basis: bool) -> Result<String> {
    let m = a.rows();
    let cfg = MinorConfig {
        max_subsets: c.cap_minors,
        ..MinorConfig::default()
    };
    let stats_a = linalg::minor_stats_with(a, &cfg)?;
    let (w, stats_w) = match &c.w {
        Some(cols) => {
            if let Some(&bad) = cols.iter().find(|&&j| j >= a.cols()) {
                return Err(Error::InvalidParameters(format!("W column {bad} out of range")));
            }
            let w = a.select_columns(cols)?;
            if !geometry::cone_equal(a, &w, c.cap_minors)? {
                return Err(Error::InvalidParameters("cone(W) differs from cone(A)".into()));
            }
            let s = linalg::minor_stats_with(&w, &cfg)?;
            (w, s)
        }
        None => (a.clone(), stats_a.clone()),
    };
    let set = |it: &mut dyn Iterator<Item = String>| format!("{{{}}}", it.collect::<Vec<_>>().join(", "));
    let mut bounds = support_bounds(&stats_w, m);
    // The Gram bound is a statement about A itself.
    bounds.gram = support_bounds(&stats_a, m).gram;

    let mut s = String::new();
    let _ = writeln!(s, "m: {m}");
    let _ = writeln!(s, "n: {}", a.cols());
    if c.w.is_some() {
        let _ = writeln!(s, "W columns: {}", w.cols());
    }
    let _ = writeln!(s, "Delta(W): {}", set(&mut stats_w.delta_set.iter().map(|v| v.to_string())));
    let _ = writeln!(s, "Phi(W): {}", set(&mut stats_w.phi_set.iter().map(|v| v.to_string())));
    let _ = writeln!(s, "delta_max: {}", stats_w.delta_max);
    let _ = writeln!(s, "delta_min: {}", stats_w.delta_min);
    let _ = writeln!(s, "phi_max: {}", stats_w.phi_max);
    let _ = writeln!(s, "phi_min: {}", stats_w.phi_min);
    let _ = writeln!(s, "g: {}", stats_a.minor_gcd);
    let _ = writeln!(s, "det(AA^T): {}", stats_a.gram_det);
    let _ = writeln!(s, "sum of squared minors: {}", stats_a.minor_square_sum);
    let _ = writeln!(
        s,
        "invertible subsets: {} of {}",
        stats_w.invertible_subsets, stats_w.subsets_examined
    );
    s.push_str(&bounds.to_string());
    // Any single invertible m×m submatrix already bounds mode (ii).
    let cover = geometry::caratheodory_cover(&w, c.cap_minors)?;
    if let Some(k) = cover.subcones.first() {
        let omega = linalg::omega(&k.abs_det())?;
        let cols: Vec<String> = k.columns().iter().map(|j| j.to_string()).collect();
        let _ = writeln!(
            s,
            "note: bound (ii) is at most 2m + Omega(|det|) for any invertible m x m submatrix; columns {} give {}",
            cols.join(","),
            2 * m + omega as usize
        );
    }
    if hilbert_basis {
        let _ = writeln!(
            s,
            "hilbert basis (asserted): asymptotic support at most m + phi_max(W) = {}",
            bounds.mode_i
        );
    }
    Ok(s)
}
