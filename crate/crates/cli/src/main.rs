use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use geolens::config::RunConfig;
use geolens::io::{profile_csv, radii_csv};
use geolens::lens::{uniform_grid, w_profile, BallPair};
use geolens::radii::radii_report;
use geolens::suite::{
    counterexample_report, run_counterexample, run_main_theorem_suite, run_speculation_probe, ClaimEntry, ClaimStatus,
};
use geolens::{Execution, GeoError};

/// Lens diameters of two geodesic balls sliding apart along a geodesic.
#[derive(Debug, Parser)]
#[command(name = "geolens", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample w(t) on a uniform grid and write the profile CSV.
    Profile(Common),
    /// Run the claim registry and report every claim.
    Verify(Common),
    /// Report injectivity, conjugate, focal and convexity radii.
    Radii(Common),
    /// Lens diameters on a sphere for radii beyond the convexity radius.
    Counterexample(Common),
    /// Report-only probes of the shape of w past T.
    Speculate(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    /// Output file, written atomically.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Radii at or beyond the convexity radius are expected; gate on the
    /// counterexample instead of the theorem's claims.
    #[arg(long)]
    expect_counterexample: bool,
    /// Run without the thread pool.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn load(&self) -> Result<RunConfig, GeoError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| GeoError::Io(format!("cannot read {}: {e}", path.display())))?;
                RunConfig::from_toml_str(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.lens.seed = s;
        }
        if let Some(g) = self.grid {
            cfg.lens.grid = g;
        }
        if let Some(b) = self.budget {
            cfg.lens.budget = b;
        }
        if let Some(out) = &self.out {
            cfg.output = Some(out.display().to_string());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out_path(&self, cfg: &RunConfig) -> Option<PathBuf> {
        self.out.clone().or_else(|| cfg.output.as_ref().map(PathBuf::from))
    }
}

enum Failure {
    Claims,
    Error(GeoError),
}

impl From<GeoError> for Failure {
    fn from(e: GeoError) -> Self {
        Failure::Error(e)
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), GeoError> {
    let io = |e: std::io::Error| GeoError::Io(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".toml");
    PathBuf::from(s)
}

fn cmd_profile(args: &Common) -> Result<(), Failure> {
    let mut cfg = args.load()?;
    let exec = args.exec();
    let pairs = cfg.pairs();
    let [big, small] = match pairs.as_slice() {
        [one] => *one,
        _ => return Err(GeoError::Config("profile takes a single (R, r) pair".into()).into()),
    };
    let m = cfg.model()?;
    let bp = BallPair::new(&m, &cfg.direction(&m)?, big, small, cfg.convexity(&m, exec)?)?
        .with_membership_tol(cfg.tolerances.membership);
    let plan = cfg.plan(&m, small)?;
    let profile = w_profile(&bp, &uniform_grid(big + small, cfg.lens.grid), &plan, &cfg.lens_options(exec))?;
    let csv = profile_csv(&profile)?;
    let summary = format!(
        "T_est = {} ± {}, S_est = {} ± {}",
        profile.t_est.value, profile.t_est.uncertainty, profile.s_est.value, profile.s_est.uncertainty
    );
    match args.out_path(&cfg) {
        Some(path) => {
            cfg.output = Some(path.display().to_string());
            write_atomic(&path, &csv)?;
            write_atomic(&sidecar(&path), &cfg.to_toml_string()?)?;
            println!("{summary}");
        }
        None => {
            print!("{csv}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn cmd_verify(args: &Common) -> Result<(), Failure> {
    let cfg = args.load()?;
    let report = if args.expect_counterexample {
        counterexample_report(&cfg, args.exec())?
    } else {
        run_main_theorem_suite(&cfg, args.exec())?
    };
    print!("{}", report.to_text());
    if let Some(path) = args.out_path(&cfg) {
        let body = if path.extension().is_some_and(|e| e == "csv") { report.to_csv()? } else { report.to_json()? };
        write_atomic(&path, &body)?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Claims)
    }
}

fn cmd_radii(args: &Common) -> Result<(), Failure> {
    let cfg = args.load()?;
    let m = cfg.model()?;
    let report = radii_report(&m, &cfg.radii_options(args.exec()))?;
    println!("model: {}", report.model);
    for (name, e) in report.entries() {
        println!("{name:<12} {:>22}  {}", e.radius.to_string(), e.provenance_label());
    }
    if let Some(path) = args.out_path(&cfg) {
        write_atomic(&path, &radii_csv(&report)?)?;
    }
    Ok(())
}

fn claims_text(claims: &[ClaimEntry]) -> String {
    let mut s = String::new();
    for c in claims {
        let _ = writeln!(s, "{:<30} {:<12} {:>14.6e}  {}", c.id, c.status.to_string(), c.margin, c.detail);
    }
    s
}

fn cmd_counterexample(args: &Common) -> Result<(), Failure> {
    let cfg = args.load()?;
    let run = run_counterexample(&cfg, &cfg.suite.counterexample_radii, args.exec())?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &run.rows {
        w.serialize(row).map_err(GeoError::from)?;
    }
    let table = String::from_utf8(w.into_inner().map_err(|e| GeoError::Io(e.to_string()))?)
        .map_err(|e| GeoError::Io(e.to_string()))?;
    match args.out_path(&cfg) {
        Some(path) => write_atomic(&path, &table)?,
        None => print!("{table}"),
    }
    print!("{}", claims_text(std::slice::from_ref(&run.entry)));
    if run.entry.status == ClaimStatus::Fail {
        return Err(Failure::Claims);
    }
    Ok(())
}

fn cmd_speculate(args: &Common) -> Result<(), Failure> {
    let cfg = args.load()?;
    let claims = run_speculation_probe(&cfg, args.exec())?;
    let text = claims_text(&claims);
    print!("{text}");
    if let Some(path) = args.out_path(&cfg) {
        write_atomic(&path, &text)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Profile(a) => cmd_profile(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Radii(a) => cmd_radii(a),
        Command::Counterexample(a) => cmd_counterexample(a),
        Command::Speculate(a) => cmd_speculate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Claims) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
