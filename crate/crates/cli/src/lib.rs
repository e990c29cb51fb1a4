//! The `kstab` command line.
//!
//! [`run`] parses arguments, executes one subcommand and returns the process
//! exit code, writing the result either to the given writer or to `--out`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use kstab_core::geodesic::{gradient_map_residual, ma_mass_identity, GeodesicLab};
use kstab_core::io::{corpus_entry, format_f64, load_config, ColumnType, RunManifest, Table};
use kstab_core::ke::{verify_fano_bound, FanoModel};
use kstab_core::rat::{format_rat, parse_rat, to_f64};
use kstab_core::spectra::{cdf_distance, dh_measure, fit_invariants, norms, spectral_measure, Exponent};
use kstab_core::verify::run_suite;
use kstab_core::{Affine, Error, PlConcave, Rat, Rounding, Suite, TestConfiguration, ToricConfig, VerifyOptions};

pub const EXIT_FAILED: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_DIVISIBILITY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "kstab", version, about = "Spectral invariants and geodesic rays of toric test configurations")]
struct Cli {
    /// Emit a single JSON object instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Input {
    /// Configuration document: a path or the name of a shipped corpus entry.
    config: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// a0, a1, b0, b1, F0 and F1 as exact rationals.
    Invariants(Input),
    /// Atoms of the level-k spectral measure.
    Spectral {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        level: u64,
    },
    /// Pieces and atoms of the Duistermaat–Heckman survival function.
    Dh(Input),
    /// Exact moments and norms of the configuration.
    Norms {
        #[command(flatten)]
        input: Input,
        /// Comma-separated exponents; `inf` is allowed.
        #[arg(long, value_delimiter = ',', default_value = "1,2,inf")]
        p: Vec<String>,
    },
    /// Distances between spectral measures and the DH limit.
    Converge {
        #[command(flatten)]
        input: Input,
        /// Comma-separated levels; defaults to 8, 16, 32, 64 times the period.
        #[arg(long, value_delimiter = ',')]
        levels: Vec<u64>,
    },
    /// The geodesic ray on a grid, or its gradient-map residuals.
    Geodesic {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1.0)]
        tmax: f64,
        /// Nodes per axis; defaults to 2001 in one dimension and 61 in two.
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long, default_value_t = 4)]
        steps: usize,
        #[arg(long, default_value_t = 10.0)]
        window: f64,
        /// Print `(t, residual)` instead of the grid values.
        #[arg(long)]
        residuals: bool,
    },
    /// The equilibrium potential at one level.
    Equilibrium {
        #[command(flatten)]
        input: Input,
        /// An exact rational level.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long, default_value_t = 10.0)]
        window: f64,
    },
    /// The Kähler–Einstein lower bound on a Fano model.
    KeBound {
        /// Configuration on the model polytope; defaults to g = x1 there.
        config: Option<String>,
        /// p1, p2 or blowup.
        #[arg(long)]
        model: String,
        #[arg(long, value_delimiter = ',', default_value = "1,2,inf")]
        p: Vec<String>,
        /// Quadrature cells per axis.
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Runs acceptance criteria and fails when any of them does.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 256)]
        kmax: u64,
        #[arg(long, default_value_t = 10_001)]
        nodes: usize,
        #[arg(long, default_value_t = 101)]
        nodes_2d: usize,
    },
}

/// The outcome of a subcommand before it is written out.
struct Output {
    table: Table,
    failed: bool,
}

impl From<Table> for Output {
    fn from(table: Table) -> Self {
        Output { table, failed: false }
    }
}

/// Runs `kstab` with `args` (including the program name) and returns the
/// exit code. Diagnostics go to `err`.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_SCHEMA;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    let result = execute(&cli.command).and_then(|o| {
        let text = if cli.json { o.table.to_json() } else { o.table.to_csv()? };
        match &cli.out {
            Some(path) => std::fs::write(path, text)?,
            None => out.write_all(text.as_bytes())?,
        }
        Ok(o.failed)
    });
    match result {
        Ok(false) => 0,
        Ok(true) => EXIT_FAILED,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Schema { .. } | Error::Rat(_) => EXIT_SCHEMA,
        Error::Divisibility { .. } => EXIT_DIVISIBILITY,
        _ => EXIT_FAILED,
    }
}

fn load(name: &str) -> Result<TestConfiguration, Error> {
    let text = match corpus_entry(name) {
        Some(t) if !std::path::Path::new(name).exists() => t.to_string(),
        _ => std::fs::read_to_string(name)?,
    };
    Ok(load_config(&text)?.1)
}

fn rat_cell(r: &Rat) -> String {
    format_rat(r)
}

fn exponent(s: &str) -> Result<Exponent, Error> {
    s.trim().parse()
}

fn execute(cmd: &Command) -> Result<Output, Error> {
    use ColumnType::*;
    match cmd {
        Command::Invariants(input) => {
            let cfg = load(&input.config)?;
            let inv = fit_invariants(&cfg)?;
            let manifest = RunManifest::new("invariants").input(&input.config).param("period", inv.period);
            let mut t = Table::new(manifest, &[("name", String), ("value", Rational)]);
            for (name, value) in inv.named() {
                t.push(vec![name.into(), rat_cell(value)])?;
            }
            Ok(t.into())
        }
        Command::Spectral { input, level } => {
            let cfg = load(&input.config)?;
            cfg.check_level(*level)?;
            let mu = spectral_measure(&cfg, *level)?;
            let manifest = RunManifest::new("spectral").input(&input.config).param("level", level);
            let mut t = Table::new(manifest, &[("position", Rational), ("mass", Rational)]);
            for (x, m) in &mu.atoms {
                t.push(vec![rat_cell(x), rat_cell(m)])?;
            }
            Ok(t.into())
        }
        Command::Dh(input) => {
            let cfg = load(&input.config)?;
            let dh = dh_measure(cfg.toric())?;
            let manifest = RunManifest::new("dh").input(&input.config).param("total_mass", format_rat(&dh.total_mass));
            let mut cols = vec![("kind".to_string(), String), ("lo".into(), Rational), ("hi".into(), Rational)];
            cols.extend((0..=dh.dim).map(|i| (format!("c{i}"), Rational)));
            let cols: Vec<(&str, ColumnType)> = cols.iter().map(|(n, k)| (n.as_str(), *k)).collect();
            let mut t = Table::new(manifest, &cols);
            for piece in &dh.pieces {
                let mut row = vec!["piece".into(), rat_cell(&piece.lo), rat_cell(&piece.hi)];
                row.extend((0..=dh.dim).map(|i| piece.coefficients.get(i).map(rat_cell).unwrap_or_else(|| "0".into())));
                t.push(row)?;
            }
            for (x, m) in &dh.atoms {
                let mut row = vec!["atom".into(), rat_cell(x), rat_cell(x), rat_cell(m)];
                row.extend((1..=dh.dim).map(|_| "0".to_string()));
                t.push(row)?;
            }
            Ok(t.into())
        }
        Command::Norms { input, p } => {
            let cfg = load(&input.config)?;
            let manifest = RunManifest::new("norms").input(&input.config).param("p", p.join(","));
            let mut t = Table::new(
                manifest,
                &[("p", String), ("q_p", Rational), ("n_p", Rational), ("norm_pow", Rational), ("norm", Float64)],
            );
            for e in p {
                let r = norms(&cfg, exponent(e)?)?;
                let opt = |v: &Option<Rat>| v.as_ref().map(rat_cell).unwrap_or_default();
                t.push(vec![r.p.to_string(), opt(&r.q_p), opt(&r.n_p), rat_cell(&r.norm_pow), format_f64(r.norm)])?;
            }
            Ok(t.into())
        }
        Command::Converge { input, levels } => {
            let cfg = load(&input.config)?;
            let period = cfg.period()?;
            let levels: Vec<u64> = if levels.is_empty() { [8, 16, 32, 64].iter().map(|j| j * period).collect() } else { levels.clone() };
            let dh = dh_measure(cfg.toric())?;
            let list: Vec<std::string::String> = levels.iter().map(u64::to_string).collect();
            let manifest = RunManifest::new("converge").input(&input.config).param("levels", list.join(","));
            let mut t =
                Table::new(manifest, &[("k", Integer), ("kolmogorov", Rational), ("k_times_kolmogorov", Rational), ("l1", Float64)]);
            for &k in &levels {
                cfg.check_level(k)?;
                let d = cdf_distance(&spectral_measure(&cfg, k)?, &dh);
                let scaled = &d.kolmogorov * Rat::from_integer(k.into());
                t.push(vec![k.to_string(), rat_cell(&d.kolmogorov), rat_cell(&scaled), format_f64(d.l1)])?;
            }
            Ok(t.into())
        }
        Command::Geodesic { input, tmax, nodes, steps, window, residuals } => {
            let cfg = load(&input.config)?;
            let nodes = nodes.unwrap_or(default_nodes(cfg.dim()));
            if *steps == 0 || !(tmax.is_finite() && *tmax >= 0.0) {
                return Err(Error::InvalidParameter("need steps >= 1 and a finite tmax >= 0".into()));
            }
            let lab = GeodesicLab::new(cfg.toric(), nodes, *window)?;
            let times: Vec<f64> = (0..=*steps).map(|i| tmax * i as f64 / *steps as f64).collect();
            let manifest = RunManifest::new("geodesic")
                .input(&input.config)
                .param("tmax", format_f64(*tmax))
                .param("nodes", nodes)
                .param("steps", steps)
                .param("window", format_f64(*window));
            if *residuals {
                let mut t = Table::new(manifest, &[("t", Float64), ("residual", Float64)]);
                for &s in times.iter().filter(|s| **s > 0.0) {
                    t.push(vec![format_f64(s), format_f64(gradient_map_residual(&lab, s)?)])?;
                }
                return Ok(t.into());
            }
            let mut t = Table::new(manifest, &grid_columns(lab.dim(), "phi"));
            for &s in &times {
                let grid = lab.ray(s)?.grid;
                for (y, v) in grid.points().iter().zip(&grid.values) {
                    let mut row = vec![format_f64(s)];
                    row.extend(y.iter().map(|c| format_f64(*c)));
                    row.push(format_f64(*v));
                    t.push(row)?;
                }
            }
            Ok(t.into())
        }
        Command::Equilibrium { input, lambda, nodes, window } => {
            let cfg = load(&input.config)?;
            let level = parse_rat(lambda)?;
            let nodes = nodes.unwrap_or(default_nodes(cfg.dim()));
            let lab = GeodesicLab::new(cfg.toric(), nodes, *window)?;
            let psi = lab.equilibrium(to_f64(&level))?;
            let (mass, exact) = ma_mass_identity(&lab, &level)?;
            let manifest = RunManifest::new("equilibrium")
                .input(&input.config)
                .param("lambda", format_rat(&level))
                .param("nodes", nodes)
                .param("window", format_f64(*window))
                .param("mass", format_f64(mass))
                .param("exact_mass", format_rat(&exact))
                .param("state", if psi.is_neg_infinity() { "neg_infinity" } else { "finite" });
            let cols = grid_columns(lab.dim(), "psi");
            let mut t = Table::new(manifest, &cols[1..]);
            if let Some(grid) = psi.grid() {
                for (y, v) in grid.points().iter().zip(&grid.values) {
                    let mut row: Vec<std::string::String> = y.iter().map(|c| format_f64(*c)).collect();
                    row.push(format_f64(*v));
                    t.push(row)?;
                }
            }
            Ok(t.into())
        }
        Command::KeBound { config, model, p, nodes } => {
            let nodes = nodes.unwrap_or(if model == "p1" { 10_001 } else { 202 });
            let model = FanoModel::by_name(model, nodes)?;
            let (cfg, source) = match config {
                Some(name) => (load(name)?, name.clone()),
                None => (default_ke_config(&model)?, "g = x1".to_string()),
            };
            if !same_vertices(cfg.toric().polytope().vertices(), model.polytope().vertices()) {
                return Err(Error::InvalidParameter(format!("configuration polytope is not the {} polytope", model.name)));
            }
            let manifest =
                RunManifest::new("ke-bound").input(source).param("model", &model.name).param("nodes", nodes).param("p", p.join(","));
            let mut t = Table::new(
                manifest,
                &[
                    ("metric", Integer),
                    ("p", String),
                    ("lhs", Float64),
                    ("f1", Rational),
                    ("norm_t", Float64),
                    ("rhs", Float64),
                    ("holds", String),
                    ("holder_holds", String),
                ],
            );
            let mut failed = false;
            for m in 0..model.metrics().len() {
                for e in p {
                    let c = verify_fano_bound(&model, m, &cfg, exponent(e)?)?;
                    failed |= !(c.holds && c.holder_holds);
                    t.push(vec![
                        m.to_string(),
                        c.p.to_string(),
                        format_f64(c.lhs),
                        rat_cell(&c.f1),
                        format_f64(c.norm_t),
                        c.rhs.map(format_f64).unwrap_or_default(),
                        c.holds.to_string(),
                        c.holder_holds.to_string(),
                    ])?;
                }
            }
            Ok(Output { table: t, failed })
        }
        Command::Verify { suite, kmax, nodes, nodes_2d } => {
            let suite: Suite = suite.parse()?;
            let opts = VerifyOptions { kmax: *kmax, nodes: *nodes, nodes_2d: *nodes_2d };
            let manifest = RunManifest::new("verify")
                .param("suite", format!("{suite:?}").to_lowercase())
                .param("kmax", kmax)
                .param("nodes", nodes)
                .param("nodes_2d", nodes_2d);
            let mut t = Table::new(
                manifest,
                &[("criterion", Integer), ("title", String), ("passed", String), ("detail", String), ("seconds", Float64)],
            );
            let results = run_suite(suite, &opts);
            for r in &results {
                t.push(vec![
                    r.id.to_string(),
                    r.title.into(),
                    r.passed.to_string(),
                    r.detail.clone(),
                    format!("{:.3}", r.elapsed.as_secs_f64()),
                ])?;
            }
            Ok(Output { table: t, failed: results.iter().any(|r| !r.passed) })
        }
    }
}

fn default_nodes(dim: usize) -> usize {
    if dim == 1 {
        2001
    } else {
        61
    }
}

fn grid_columns(dim: usize, value: &'static str) -> Vec<(&'static str, ColumnType)> {
    let axes: &[&'static str] = if dim == 1 { &["y"] } else { &["y1", "y2"] };
    let mut cols = vec![("t", ColumnType::Float64)];
    cols.extend(axes.iter().map(|a| (*a, ColumnType::Float64)));
    cols.push((value, ColumnType::Float64));
    cols
}

fn same_vertices(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> bool {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort();
    b.sort();
    a == b
}

fn default_ke_config(model: &FanoModel) -> Result<TestConfiguration, Error> {
    let mut gradient = vec![Rat::from_integer(0.into()); model.dim()];
    gradient[0] = Rat::from_integer(1.into());
    let g = PlConcave::new(vec![Affine::new(gradient, Rat::from_integer(0.into()))], model.polytope())?;
    Ok(TestConfiguration::Toric(ToricConfig::new(model.polytope().clone(), g, Rounding::Ceil)?))
}
