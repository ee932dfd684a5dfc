//! Command-line front end: load or build an instance, run one pipeline and
//! emit JSON or CSV.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hpconc::bounds::printed_toy_bound;
use hpconc::{
    check_bounded_differences, counterexample1, dominance_check, exact_stats, extend, format_real,
    hp_bound, hp_bound_two_sided, lower_extend, mc_estimate, mcdiarmid_bound,
    random_certified_instance, toy_example, Certification, ExtendOptions, InstanceBundle, InstanceFile,
    Limits, WeightedMetric,
};
use serde_json::json;
use thiserror::Error;

/// Environment variable overriding the enumeration cap.
pub const CAP_ENV: &str = "HPCONC_CAP";

const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Core(#[from] hpconc::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Parser)]
#[command(name = "hpconc", version, about = "Concentration bounds for functions with bounded differences on a high-probability set")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Maximum number of points to enumerate (overrides HPCONC_CAP).
    #[arg(long, global = true)]
    pub cap: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    #[value(alias = "counterexample")]
    Counterexample1,
    #[value(alias = "toy_example")]
    Toy,
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct ExampleParams {
    /// Number of coordinates (binary examples) or maximum n (random).
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Spike height for the toy example.
    #[arg(long = "B", default_value_t = 1.0)]
    pub b: f64,
    /// Shift the toy function on Y so that its conditional mean is zero.
    #[arg(long)]
    pub centered: bool,
    /// Seed for the random example.
    #[arg(long, default_value_t = 0)]
    pub instance_seed: u64,
    /// Largest alphabet for the random example.
    #[arg(long, default_value_t = 3)]
    pub max_alphabet: usize,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct SourceSelect {
    /// Instance file (JSON).
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Builtin example.
    #[arg(long, value_enum)]
    pub example: Option<ExampleName>,
}

#[derive(Debug, Clone, Args)]
pub struct Source {
    #[command(flatten)]
    pub select: SourceSelect,
    #[command(flatten)]
    pub params: ExampleParams,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check bounded differences of f on Y.
    Certify {
        #[command(flatten)]
        source: Source,
    },
    /// Tabulate the extension of f from Y.
    Extend {
        #[command(flatten)]
        source: Source,
        /// Certify bounded differences on Y first.
        #[arg(long)]
        verify: bool,
        /// Also tabulate the lower (sup-form) extension.
        #[arg(long)]
        lower: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Exact p, mu, m (and E[f̄]).
    Stats {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        with_extension: bool,
    },
    /// Evaluate the closed-form bounds.
    Bound {
        #[arg(long, allow_negative_numbers = true, conflicts_with = "eps_grid", required_unless_present = "eps_grid")]
        eps: Option<f64>,
        /// Grid spec start:stop:step.
        #[arg(long)]
        eps_grid: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        /// Comma-separated weights c_1,...,c_n.
        #[arg(long, value_delimiter = ',', required = true)]
        c: Vec<f64>,
        #[arg(long, value_enum, default_value_t = BoundKind::All)]
        formula: BoundKind,
    },
    /// Compare exact tails around m with the bound on a grid.
    Validate {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "0:1:0.05")]
        eps_grid: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Add the closed form printed for the binary toy instance.
        #[arg(long)]
        paper_toy_bound: bool,
    },
    /// Monte Carlo estimates of p, m and tails.
    Mc {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long)]
        eps_grid: Option<String>,
        /// Center for tails; defaults to the exact m on enumerable spaces.
        #[arg(long, allow_negative_numbers = true)]
        center: Option<f64>,
    },
    /// Print a builtin instance as a canonical instance file.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
        #[command(flatten)]
        params: ExampleParams,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    Mcdiarmid,
    Hp,
    HpTwoSided,
    All,
}

/// Parses `start:stop:step` into an ascending grid that includes `start`
/// and every later step up to `stop` (within half a step). Values are
/// rounded to 12 decimals.
pub fn parse_eps_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let malformed = |why: &str| CliError::Usage(format!("malformed eps grid `{spec}`: {why}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(malformed("expected start:stop:step"));
    };
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| malformed(&format!("`{s}` is not a finite number")))
    };
    let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
    if step <= 0.0 {
        return Err(malformed("step must be positive"));
    }
    if stop < start {
        return Err(malformed("stop is below start"));
    }
    let last = ((stop - start) / step + 0.5).floor();
    if last >= MAX_GRID_POINTS as f64 {
        return Err(malformed("too many grid points"));
    }
    Ok((0..=last as usize)
        .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

fn limits(config: &RunConfig) -> Result<Limits, CliError> {
    let mut limits = Limits::default();
    if let Some(cap) = config.cap {
        limits.max_points = cap;
    } else if let Ok(value) = std::env::var(CAP_ENV) {
        limits.max_points = value
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{CAP_ENV}=`{value}` is not a non-negative integer")))?;
    }
    Ok(limits)
}

fn build_example(name: ExampleName, params: &ExampleParams) -> Result<InstanceBundle, CliError> {
    Ok(match name {
        ExampleName::Counterexample1 => counterexample1(params.n)?,
        ExampleName::Toy => toy_example(params.n, params.b, params.centered)?,
        ExampleName::Random => random_certified_instance(params.instance_seed, params.n, params.max_alphabet)?,
    })
}

fn load(source: &Source, limits: Limits) -> Result<InstanceBundle, CliError> {
    let mut bundle = match (&source.select.instance, source.select.example) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.clone(),
                source: e,
            })?;
            InstanceFile::from_json(&text)?.into_bundle(limits)?
        }
        (None, Some(name)) => build_example(name, &source.params)?,
        _ => return Err(CliError::Usage("give exactly one of --instance or --example".into())),
    };
    bundle.space = bundle.space.with_limits(limits);
    Ok(bundle)
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Runs one command, writing its report to `out` (or to `--output`), and
/// returns the process exit code: 0 on success, 2 when `validate` finds a
/// grid point where the bound is exceeded.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<u8, CliError> {
    let limits = limits(config)?;
    let mut exit = 0u8;
    let text = match &config.command {
        Command::Certify { source } => {
            let b = load(source, limits)?;
            match check_bounded_differences(&b.f, &b.y, &b.metric, &b.space)? {
                Certification::Certified => to_json(&json!({"certified": true}))?,
                Certification::Violated(w) => to_json(&json!({"certified": false, "witness": w}))?,
            }
        }
        Command::Extend { source, verify, lower, format } => {
            let b = load(source, limits)?;
            let options = ExtendOptions { verify: *verify };
            let upper = extend(&b.f, &b.y, &b.metric, &b.space, options)?;
            let lower = if *lower {
                Some(lower_extend(&b.f, &b.y, &b.metric, &b.space, options)?)
            } else {
                None
            };
            match format {
                Format::Json => match lower {
                    None => to_json(&upper)?,
                    Some(lower) => to_json(&json!({"upper": upper, "lower": lower}))?,
                },
                Format::Csv => {
                    let values = b.f.tabulate(&b.space)?;
                    let members = b.y.materialize(&b.space)?;
                    let mut csv = String::from("rank");
                    for i in 1..=b.space.n() {
                        let _ = write!(csv, ",x_{i}");
                    }
                    csv.push_str(",in_y,f,extension");
                    if lower.is_some() {
                        csv.push_str(",lower_extension");
                    }
                    csv.push('\n');
                    for (rank, point) in b.space.enumerate_points()?.iter().enumerate() {
                        let _ = write!(csv, "{rank}");
                        for c in point.coords() {
                            let _ = write!(csv, ",{c}");
                        }
                        let _ = write!(
                            csv,
                            ",{},{},{}",
                            members.contains_rank(rank as u64),
                            format_real(values[rank]),
                            format_real(upper.values[rank])
                        );
                        if let Some(lower) = &lower {
                            let _ = write!(csv, ",{}", format_real(lower.values[rank]));
                        }
                        csv.push('\n');
                    }
                    csv
                }
            }
        }
        Command::Stats { source, with_extension } => {
            let b = load(source, limits)?;
            to_json(&exact_stats(&b.space, &b.f, &b.y, &b.metric, *with_extension)?)?
        }
        Command::Bound { eps, eps_grid, p, c, formula } => {
            let grid = match (eps, eps_grid) {
                (Some(e), _) => vec![*e],
                (None, Some(spec)) => parse_eps_grid(spec)?,
                (None, None) => return Err(CliError::Usage("give --eps or --eps-grid".into())),
            };
            let metric = WeightedMetric::new(c.clone())?;
            let mut reports = Vec::new();
            for &e in &grid {
                if matches!(formula, BoundKind::Mcdiarmid | BoundKind::All) {
                    reports.push(mcdiarmid_bound(e, &metric)?);
                }
                if matches!(formula, BoundKind::Hp | BoundKind::All) {
                    reports.push(hp_bound(e, *p, &metric)?);
                }
                if matches!(formula, BoundKind::HpTwoSided | BoundKind::All) {
                    reports.push(hp_bound_two_sided(e, *p, &metric)?);
                }
            }
            to_json(&reports)?
        }
        Command::Validate { source, eps_grid, format, paper_toy_bound } => {
            let b = load(source, limits)?;
            let grid = parse_eps_grid(eps_grid)?;
            let report = dominance_check(&b.space, &b.f, &b.y, &b.metric, &grid)?;
            if !report.all_dominated() {
                exit = 2;
            }
            let printed: Option<Vec<f64>> = if *paper_toy_bound {
                Some(
                    grid.iter()
                        .map(|&e| printed_toy_bound(b.space.n(), e))
                        .collect::<Result<_, _>>()?,
                )
            } else {
                None
            };
            match (format, printed) {
                (Format::Csv, None) => report.to_csv(),
                (Format::Csv, Some(printed)) => {
                    let mut csv = String::new();
                    for (i, line) in report.to_csv().lines().enumerate() {
                        csv.push_str(line);
                        if i == 0 {
                            csv.push_str(",printed_toy_bound");
                        } else {
                            let _ = write!(csv, ",{}", format_real(printed[i - 1]));
                        }
                        csv.push('\n');
                    }
                    csv
                }
                (Format::Json, None) => to_json(&report)?,
                (Format::Json, Some(printed)) => {
                    to_json(&json!({"stats": report.stats, "points": report.points, "printed_toy_bound": printed}))?
                }
            }
        }
        Command::Mc { source, seed, samples, eps_grid, center } => {
            let b = load(source, limits)?;
            let grid = match eps_grid {
                Some(spec) => parse_eps_grid(spec)?,
                None => Vec::new(),
            };
            let center = match center {
                Some(c) => *c,
                None => match exact_stats(&b.space, &b.f, &b.y, &b.metric, false) {
                    Ok(stats) => stats.m,
                    Err(hpconc::Error::SpaceTooLarge { .. }) => {
                        return Err(CliError::Usage(
                            "space too large for the exact m; pass --center".into(),
                        ))
                    }
                    Err(e) => return Err(e.into()),
                },
            };
            to_json(&mc_estimate(&b.space, &b.f, &b.y, center, &grid, *seed, *samples)?)?
        }
        Command::Example { name, params } => {
            let bundle = build_example(*name, params)?;
            InstanceFile::from_bundle(&bundle).to_canonical_json()?
        }
    };

    match &config.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io {
            path: path.clone(),
            source: e,
        })?,
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io { path: "<stdout>".into(), source: e })?,
    }
    Ok(exit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_examples() {
        assert_eq!(parse_eps_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_eps_grid("0.5:0.5:0.1").unwrap(), vec![0.5]);
        assert!(parse_eps_grid("1:0:0.1").is_err());
        assert!(parse_eps_grid("0:1:0").is_err());
        assert!(parse_eps_grid("0:1").is_err());
        assert!(parse_eps_grid("a:1:0.1").is_err());
    }

    #[test]
    fn grid_rounding_is_clean() {
        let grid = parse_eps_grid("0.05:1.0:0.05").unwrap();
        assert_eq!(grid.len(), 20);
        assert_eq!(grid[2], 0.15);
        assert_eq!(*grid.last().unwrap(), 1.0);
        let fine = parse_eps_grid("0:1:0.02").unwrap();
        assert_eq!(fine.len(), 51);
        assert!(fine.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        RunConfig::command().debug_assert();
    }
}
