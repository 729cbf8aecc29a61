//! `bmnc` — BMNC matrix design, analysis, simulation, and search.
//!
//! Subcommands:
//! - `design`    print the designed encoding matrix for N users
//! - `validate`  check a matrix file, with per-user diagnostics
//! - `invert`    print every per-user decoding matrix F_i^{-1}
//! - `analyze`   closed-form SEP/throughput sweeps as CSV
//! - `simulate`  Monte Carlo SEP/throughput sweeps as CSV
//! - `search`    exhaustive bound minimization over all valid matrices
//! - `figure`    reproduce the reference figure datasets as CSV files
//!
//! Numeric output is full-precision decimal; every stochastic run is pinned
//! by `--seed` and replays byte-identically for a fixed worker count.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bmnc_core::analysis::{
    exact_system_sep, sep_no_nc, sep_upper_bound, throughput,
};
use bmnc_core::channel::SnrProfile;
use bmnc_core::gf2::BitMatrix;
use bmnc_core::matrix::{validate, EncodingMatrix};
use bmnc_core::optimizer::{search_optimal, Objective};
use bmnc_core::sim::{simulate, Scheme, SimConfig, SimResult};

#[derive(Parser)]
#[command(name = "bmnc", version, about = "Binary multi-user network coding toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the designed (N-1)xN encoding matrix in matrix text format.
    Design {
        /// Number of users (N >= 2).
        #[arg(long)]
        users: usize,
    },
    /// Validate an encoding matrix file and print per-user diagnostics.
    Validate {
        /// Matrix file in the matrix text format.
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Print every per-user decoding matrix F_i^{-1}.
    Invert {
        /// Matrix file; defaults to the designed matrix when absent.
        #[arg(long, conflicts_with = "users")]
        matrix: Option<PathBuf>,
        /// Use the designed matrix for this many users.
        #[arg(long)]
        users: Option<usize>,
    },
    /// Closed-form sweeps: CSV `esn0_db, n_users, metric, value`.
    Analyze(AnalyzeArgs),
    /// Monte Carlo sweeps: CSV with SEP/throughput estimates and stderrs.
    Simulate(SimulateArgs),
    /// Exhaustive search for the bound-minimizing matrix.
    Search(SearchArgs),
    /// Emit one CSV dataset per curve of a reference figure.
    Figure(FigureArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    users: usize,
    /// Single value or start:step:stop, in dB. Not needed with --profile.
    #[arg(long = "esn0-db")]
    esn0_db: Option<String>,
    #[arg(long, value_enum)]
    mode: AnalyzeMode,
    /// Encoding matrix file; defaults to the designed matrix.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// SNR profile file; overrides the ladder built from --esn0-db.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Uplink offset in dB added to the ladder profile.
    #[arg(long = "uplink-offset-db", default_value_t = 0.0)]
    uplink_offset_db: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum AnalyzeMode {
    Exact,
    Bound,
    NoNc,
    Throughput,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    users: usize,
    /// Single value or start:step:stop, in dB. Not needed with --profile.
    #[arg(long = "esn0-db")]
    esn0_db: Option<String>,
    #[arg(long, value_enum, default_value_t = SchemeArg::Nc)]
    scheme: SchemeArg,
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long = "uplink-offset-db", default_value_t = 0.0)]
    uplink_offset_db: f64,
    #[arg(long, default_value_t = 1_000_000)]
    rounds: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Verify the per-round error-vector identity (slower).
    #[arg(long, default_value_t = false)]
    check_identity: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Nc,
    #[value(name = "no-nc")]
    NoNc,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    users: usize,
    #[arg(long = "esn0-db")]
    esn0_db: Option<f64>,
    #[arg(long)]
    profile: Option<PathBuf>,
    #[arg(long = "uplink-offset-db", default_value_t = 0.0)]
    uplink_offset_db: f64,
    /// Minimize the exact SEP instead of the upper bound.
    #[arg(long, default_value_t = false)]
    exact_objective: bool,
}

#[derive(Args)]
struct FigureArgs {
    /// Figure number: 2, 3, 4, or 5.
    #[arg(long)]
    id: u32,
    #[arg(long, default_value_t = 1_000_000)]
    rounds: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Output directory for the per-curve CSV files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Design { users } => {
            let f = EncodingMatrix::design(users).map_err(|e| e.to_string())?;
            print!("{}", f.matrix().to_text());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { matrix } => {
            let m = load_matrix(&matrix)?;
            let report = validate(&m).map_err(|e| e.to_string())?;
            println!("valid={}", report.is_valid());
            for (i, ok) in report.full_rank().iter().enumerate() {
                println!("fullrank_user_{}={}", i + 1, ok);
            }
            for (i, ok) in report.column_sum_ok().iter().enumerate() {
                println!("column_sum_user_{}={}", i + 1, ok);
            }
            if report.is_valid() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Invert { matrix, users } => {
            let f = match (matrix, users) {
                (Some(path), _) => {
                    EncodingMatrix::from_matrix(load_matrix(&path)?).map_err(|e| e.to_string())?
                }
                (None, Some(n)) => EncodingMatrix::design(n).map_err(|e| e.to_string())?,
                (None, None) => return Err("pass --matrix <file> or --users <N>".to_string()),
            };
            let ds = f.decoding_matrices();
            for user in 1..=f.n_users() {
                println!("user_{user}");
                print!("{}", ds.inverse(user).to_text());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze(args) => cmd_analyze(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Search(args) => cmd_search(args),
        Command::Figure(args) => cmd_figure(args),
    }
}

fn load_matrix(path: &Path) -> Result<BitMatrix, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    BitMatrix::parse_text(&text).map_err(|e| e.to_string())
}

fn load_profile(path: &Path) -> Result<SnrProfile, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    SnrProfile::parse_text(&text).map_err(|e| e.to_string())
}

/// Resolve the sweep grid: a fixed profile pins a single row (labeled by the
/// optional single --esn0-db value, 0 otherwise); a ladder sweep requires
/// --esn0-db.
fn resolve_grid(esn0_db: &Option<String>, profile: &Option<PathBuf>) -> Result<Vec<f64>, String> {
    match (esn0_db, profile) {
        (Some(spec), None) => parse_grid(spec),
        (Some(spec), Some(_)) => {
            let grid = parse_grid(spec)?;
            if grid.len() > 1 {
                return Err(
                    "--profile fixes the SNRs; --esn0-db may only label a single point"
                        .to_string(),
                );
            }
            Ok(grid)
        }
        (None, Some(_)) => Ok(vec![0.0]),
        (None, None) => Err("pass --esn0-db <dB|start:step:stop> or --profile <file>".to_string()),
    }
}

/// Parse `--esn0-db`: a single dB value or an inclusive ascending
/// `start:step:stop` grid.
fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    if let Some((start, rest)) = spec.split_once(':') {
        let (step, stop) = rest
            .split_once(':')
            .ok_or_else(|| format!("grid must be start:step:stop, got {spec:?}"))?;
        let start: f64 = start.parse().map_err(|_| format!("bad start {start:?}"))?;
        let step: f64 = step.parse().map_err(|_| format!("bad step {step:?}"))?;
        let stop: f64 = stop.parse().map_err(|_| format!("bad stop {stop:?}"))?;
        if step <= 0.0 || stop < start {
            return Err("grid must ascend: step > 0 and stop >= start".to_string());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|k| start + step * k as f64).collect())
    } else {
        let v: f64 = spec
            .trim()
            .parse()
            .map_err(|_| format!("bad Es/N0 value {spec:?}"))?;
        Ok(vec![v])
    }
}

fn profile_for(
    users: usize,
    esn0_db: f64,
    uplink_offset_db: f64,
    file: &Option<PathBuf>,
) -> Result<SnrProfile, String> {
    match file {
        Some(path) => {
            let p = load_profile(path)?;
            if p.n_users() != users {
                return Err(format!(
                    "profile is for {} users, --users says {users}",
                    p.n_users()
                ));
            }
            Ok(p)
        }
        None => SnrProfile::ladder(users, esn0_db, uplink_offset_db).map_err(|e| e.to_string()),
    }
}

fn encoding_for(users: usize, file: &Option<PathBuf>) -> Result<EncodingMatrix, String> {
    match file {
        Some(path) => {
            let f =
                EncodingMatrix::from_matrix(load_matrix(path)?).map_err(|e| e.to_string())?;
            if f.n_users() != users {
                return Err(format!(
                    "matrix is for {} users, --users says {users}",
                    f.n_users()
                ));
            }
            Ok(f)
        }
        None => EncodingMatrix::design(users).map_err(|e| e.to_string()),
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<ExitCode, String> {
    let grid = resolve_grid(&args.esn0_db, &args.profile)?;
    let f = encoding_for(args.users, &args.matrix)?;
    println!("esn0_db,n_users,metric,value");
    for &esn0 in &grid {
        let profile = profile_for(args.users, esn0, args.uplink_offset_db, &args.profile)?;
        let emit = |metric: &str, value: f64| {
            println!("{esn0},{},{metric},{value}", args.users);
        };
        match args.mode {
            AnalyzeMode::Exact => emit("sep_exact", exact_system_sep(&f, &profile).per_symbol),
            AnalyzeMode::Bound => emit("sep_bound", sep_upper_bound(&f, &profile).per_symbol),
            AnalyzeMode::NoNc => emit("sep_no_nc", sep_no_nc(args.users, &profile).per_symbol),
            AnalyzeMode::Throughput => {
                let pe_nc = exact_system_sep(&f, &profile).per_symbol;
                let pe_no = sep_no_nc(args.users, &profile).per_symbol;
                let t = throughput(args.users, pe_nc, pe_no);
                emit("thr_nc", t.nc);
                emit("thr_no_nc", t.no_nc);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn sim_csv_row(esn0: f64, scheme: &str, users: usize, r: &SimResult) -> String {
    format!(
        "{esn0},{scheme},{users},{},{},{},{},{},{}",
        r.sep, r.sep_stderr, r.throughput, r.throughput_stderr, r.rounds, r.seed
    )
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode, String> {
    let grid = resolve_grid(&args.esn0_db, &args.profile)?;
    if args.rounds == 0 {
        return Err("--rounds must be at least 1".to_string());
    }
    println!("esn0_db,scheme,n_users,sep,sep_stderr,throughput,thr_stderr,rounds,seed");
    for &esn0 in &grid {
        let profile = profile_for(args.users, esn0, args.uplink_offset_db, &args.profile)?;
        let scheme = match args.scheme {
            SchemeArg::Nc => Scheme::Nc(encoding_for(args.users, &args.matrix)?),
            SchemeArg::NoNc => Scheme::NoNc,
        };
        let label = scheme.label();
        let config = SimConfig::new(scheme, profile, args.rounds, args.seed)
            .with_workers(args.workers)
            .with_identity_check(args.check_identity);
        let result = simulate(&config);
        println!("{}", sim_csv_row(esn0, label, args.users, &result));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_search(args: SearchArgs) -> Result<ExitCode, String> {
    let profile = match (&args.profile, args.esn0_db) {
        (Some(path), _) => {
            let p = load_profile(path)?;
            if p.n_users() != args.users {
                return Err(format!(
                    "profile is for {} users, --users says {}",
                    p.n_users(),
                    args.users
                ));
            }
            p
        }
        (None, Some(esn0)) => SnrProfile::ladder(args.users, esn0, args.uplink_offset_db)
            .map_err(|e| e.to_string())?,
        (None, None) => return Err("pass --esn0-db <dB> or --profile <file>".to_string()),
    };
    let objective = if args.exact_objective {
        Objective::ExactSep
    } else {
        Objective::UpperBound
    };
    let result = search_optimal(args.users, &profile, objective).map_err(|e| e.to_string())?;
    for (idx, m) in result.best_matrices.iter().enumerate() {
        println!("minimizer_{}", idx + 1);
        print!("{}", m.matrix().to_text());
    }
    println!("bound={}", result.best_bound);
    println!("candidates={}", result.candidates_examined);
    println!("orderings_ok={}", result.profile_orderings_ok);
    println!("minimizers={}", result.best_matrices.len());
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// Figures
// ---------------------------------------------------------------------------

/// The three ad-hoc comparison matrices used alongside the designed one.
fn adhoc_matrices() -> Vec<(String, EncodingMatrix)> {
    let rows: [Vec<Vec<u8>>; 3] = [
        vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1], vec![1, 0, 0, 1]],
        vec![vec![0, 0, 1, 1], vec![0, 1, 1, 0], vec![1, 1, 0, 0]],
        vec![vec![0, 1, 0, 1], vec![1, 0, 1, 0], vec![0, 0, 1, 1]],
    ];
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            let m = BitMatrix::from_rows(r).expect("static shape");
            (
                format!("matrix {}", i + 1),
                EncodingMatrix::from_matrix(m).expect("static matrices are valid"),
            )
        })
        .collect()
}

/// What one figure plots: which user counts, grid, curves, and sampling.
struct FigureSpec {
    figure_id: u32,
    grid_db: Vec<f64>,
    rounds: u64,
    seed: u64,
}

impl FigureSpec {
    fn new(figure_id: u32, rounds: u64, seed: u64) -> Result<Self, String> {
        let grid_db = match figure_id {
            // Analytic throughput saturates around 40 dB.
            2 => grid(0.0, 2.0, 40.0),
            3 => grid(0.0, 5.0, 30.0),
            4 => grid(0.0, 5.0, 30.0),
            // The asymmetric-uplink SEP curves cross 1e-2 near 10 dB.
            5 => grid(0.0, 2.0, 20.0),
            other => return Err(format!("unknown figure id {other}")),
        };
        Ok(Self {
            figure_id,
            grid_db,
            rounds,
            seed,
        })
    }
}

fn grid(start: f64, step: f64, stop: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|k| start + step * k as f64).collect()
}

fn curve_file_name(figure_id: u32, label: &str) -> String {
    let slug: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect();
    format!("fig{figure_id}_{slug}.csv")
}

fn write_curve(
    out_dir: &Path,
    figure_id: u32,
    label: &str,
    header: &str,
    rows: &[String],
) -> Result<(), String> {
    let path = out_dir.join(curve_file_name(figure_id, label));
    let mut text = format!("# {label}\n{header}\n");
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    fs::write(&path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_figure(args: FigureArgs) -> Result<ExitCode, String> {
    let spec = FigureSpec::new(args.id, args.rounds, args.seed)?;
    fs::create_dir_all(&args.out)
        .map_err(|e| format!("cannot create {}: {e}", args.out.display()))?;
    match spec.figure_id {
        2 => figure2(&spec, &args.out),
        3 => figure3(&spec, &args.out, args.workers),
        4 | 5 => figure45(&spec, &args.out, args.workers),
        _ => unreachable!("validated in FigureSpec::new"),
    }
}

/// Throughput with and without coding, N in {4, 5, 6}, analytic.
fn figure2(spec: &FigureSpec, out: &Path) -> Result<ExitCode, String> {
    for n in [4usize, 5, 6] {
        let f = EncodingMatrix::design(n).map_err(|e| e.to_string())?;
        let mut nc_rows = Vec::new();
        let mut no_rows = Vec::new();
        for &esn0 in &spec.grid_db {
            let profile = SnrProfile::ladder(n, esn0, 0.0).map_err(|e| e.to_string())?;
            let pe_nc = exact_system_sep(&f, &profile).per_symbol;
            let pe_no = sep_no_nc(n, &profile).per_symbol;
            let t = throughput(n, pe_nc, pe_no);
            nc_rows.push(format!("{esn0},{}", t.nc));
            no_rows.push(format!("{esn0},{}", t.no_nc));
        }
        write_curve(out, 2, &format!("{n} users with NC"), "esn0_db,throughput", &nc_rows)?;
        write_curve(
            out,
            2,
            &format!("{n} users without NC"),
            "esn0_db,throughput",
            &no_rows,
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

/// Simulated SEP against the closed-form upper bound, N in {4, 5, 6}.
fn figure3(spec: &FigureSpec, out: &Path, workers: usize) -> Result<ExitCode, String> {
    for n in [4usize, 5, 6] {
        let f = EncodingMatrix::design(n).map_err(|e| e.to_string())?;
        let mut sim_rows = Vec::new();
        let mut bound_rows = Vec::new();
        for &esn0 in &spec.grid_db {
            let profile = SnrProfile::ladder(n, esn0, 0.0).map_err(|e| e.to_string())?;
            bound_rows.push(format!(
                "{esn0},{}",
                sep_upper_bound(&f, &profile).per_symbol
            ));
            let config = SimConfig::new(Scheme::Nc(f.clone()), profile, spec.rounds, spec.seed)
                .with_workers(workers);
            let r = simulate(&config);
            sim_rows.push(format!("{esn0},{},{}", r.sep, r.sep_stderr));
        }
        write_curve(
            out,
            3,
            &format!("{n} users simulated"),
            "esn0_db,sep,sep_stderr",
            &sim_rows,
        )?;
        write_curve(
            out,
            3,
            &format!("{n} users upper bound"),
            "esn0_db,sep",
            &bound_rows,
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

/// Simulated SEP for the three ad-hoc matrices, the designed matrix, and the
/// scheme without coding. Figure 5 is the same comparison with every uplink
/// 20 dB better.
fn figure45(spec: &FigureSpec, out: &Path, workers: usize) -> Result<ExitCode, String> {
    let n = 4usize;
    let uplink_offset = if spec.figure_id == 5 { 20.0 } else { 0.0 };
    let mut curves: Vec<(String, Scheme)> = adhoc_matrices()
        .into_iter()
        .map(|(label, m)| (label, Scheme::Nc(m)))
        .collect();
    curves.push((
        "designed matrix".to_string(),
        Scheme::Nc(EncodingMatrix::design(n).map_err(|e| e.to_string())?),
    ));
    curves.push(("without NC".to_string(), Scheme::NoNc));

    for (label, scheme) in curves {
        let mut rows = Vec::new();
        for &esn0 in &spec.grid_db {
            let profile =
                SnrProfile::ladder(n, esn0, uplink_offset).map_err(|e| e.to_string())?;
            let config = SimConfig::new(scheme.clone(), profile, spec.rounds, spec.seed)
                .with_workers(workers);
            let r = simulate(&config);
            rows.push(format!("{esn0},{},{}", r.sep, r.sep_stderr));
        }
        write_curve(
            out,
            spec.figure_id,
            &label,
            "esn0_db,sep,sep_stderr",
            &rows,
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("10").unwrap(), vec![10.0]);
        assert_eq!(parse_grid("-3.5").unwrap(), vec![-3.5]);
        assert_eq!(parse_grid("0:5:20").unwrap(), vec![0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!(parse_grid("2:2:2").unwrap(), vec![2.0]);
        assert!(parse_grid("5:0:10").is_err());
        assert!(parse_grid("10:1:5").is_err());
        assert!(parse_grid("a:b:c").is_err());
        assert!(parse_grid("").is_err());
    }

    #[test]
    fn curve_names_are_stable() {
        assert_eq!(curve_file_name(2, "4 users with NC"), "fig2_4_users_with_nc.csv");
        assert_eq!(curve_file_name(4, "matrix 1"), "fig4_matrix_1.csv");
    }

    #[test]
    fn adhoc_matrices_are_valid() {
        let ms = adhoc_matrices();
        assert_eq!(ms.len(), 3);
        for (label, m) in &ms {
            assert_eq!(m.n_users(), 4, "{label}");
        }
    }
}
