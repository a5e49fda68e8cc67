//! Command-line front end for the toric-series library.
//!
//! Exit codes: 0 on success, 1 on input errors, 2 when a group would exceed `--cap`.

mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use toric_series::enumerate::{
    classify, enumerate_cyclic, family_spectrum, mld_spectrum, strictly_decreasing, EnumerationTask, IndexSet,
};
use toric_series::lattice::rational::{format_rational, parse_rational};
use toric_series::region::{maximal_avoiders, SearchBounds};
use toric_series::series::{
    belongs_with, compare_semantics, hilbert_polynomial, series_dimension, synthesize, MembershipSemantics,
    SeriesDatabase,
};
use toric_series::singularity::{
    canonical_form, defines_toric_singularity, from_cyclic, mld, CyclicQuotient,
};
use toric_series::{Error, Rational, DEFAULT_CAP};

use output::{Format, Sink, Table};

#[derive(Parser)]
#[command(name = "toric-series", version, about = "Exact computations with toric singularities as finite subgroups of the torus")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Largest group materialized.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Quotient {
    /// Index `r` of `1/r(a_1, ..., a_n)`.
    #[arg(long)]
    r: u64,
    /// Comma-separated weights.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    weights: Vec<i64>,
}

impl Quotient {
    fn parse(&self) -> Result<CyclicQuotient, Error> {
        CyclicQuotient::new(self.r, &self.weights)
    }
}

#[derive(Args, Clone)]
struct Threshold {
    /// Threshold `ε` as `p/q` or an integer.
    #[arg(long, default_value = "1")]
    eps: String,
    /// Strict inequality: `mld > ε`, or the region with `Σ < ε`.
    #[arg(long, conflicts_with = "non_strict")]
    strict: bool,
    /// Non-strict inequality (the default).
    #[arg(long)]
    non_strict: bool,
}

impl Threshold {
    fn eps(&self) -> Result<Rational, Error> {
        parse_rational("eps", &self.eps)
    }

    fn strict(&self) -> bool {
        self.strict && !self.non_strict
    }
}

#[derive(Args, Clone)]
struct Bounds {
    /// Height bound on candidate HNF entries.
    #[arg(long, default_value_t = 3)]
    height: u64,
    /// Largest prime index probed for maximality.
    #[arg(long, default_value_t = 5)]
    primes: u64,
}

impl Bounds {
    fn get(&self) -> Result<SearchBounds, Error> {
        SearchBounds::new(self.height, self.primes)
    }
}

#[derive(Args, Clone)]
struct Indices {
    /// Smallest index.
    #[arg(long, default_value_t = 1)]
    r_min: u64,
    /// Largest index.
    #[arg(long)]
    r_max: Option<u64>,
    /// Explicit comma-separated indices, instead of a range.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["r_min", "r_max"])]
    r_list: Vec<u64>,
    /// Keep prime indices only.
    #[arg(long)]
    primes_only: bool,
}

impl Indices {
    fn get(&self) -> Result<IndexSet, Error> {
        if !self.r_list.is_empty() {
            return Ok(IndexSet::List(self.r_list.clone()));
        }
        match self.r_max {
            Some(max) => Ok(IndexSet::Range { min: self.r_min, max }),
            None => Err(Error::InvalidInput("give --r-max or --r-list".into())),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SemanticsArg {
    Union,
    SingleContainer,
    Intersection,
    /// Report all three readings.
    Compare,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal log-discrepancy of a cyclic quotient.
    Mld(Quotient),
    /// Axis condition of a cyclic quotient.
    Check(Quotient),
    /// Canonical representative under coordinate permutations and change of generator.
    Canon(Quotient),
    /// List cyclic quotients meeting an mld threshold.
    Enumerate {
        #[arg(long)]
        dim: usize,
        #[command(flatten)]
        indices: Indices,
        #[command(flatten)]
        threshold: Threshold,
        /// One representative per equivalence class.
        #[arg(long)]
        up_to_equivalence: bool,
    },
    /// Match cyclic quotients against a series database.
    Classify {
        #[arg(long)]
        series_db: PathBuf,
        /// JSON array of `{"r": .., "weights": [..]}`; otherwise every class in the index range.
        #[arg(long)]
        points: Option<PathBuf>,
        #[command(flatten)]
        indices: Indices,
    },
    /// Maximal closed subgroups avoiding `S_ε` (`--strict`) or `S'_ε`.
    Avoiders {
        #[arg(long)]
        dim: usize,
        #[command(flatten)]
        threshold: Threshold,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Check that every series in a database is well formed.
    SeriesValidate {
        #[arg(long)]
        series_db: PathBuf,
    },
    /// Series of a database containing a cyclic quotient.
    SeriesMembership {
        #[arg(long)]
        series_db: PathBuf,
        #[command(flatten)]
        quotient: Quotient,
        #[arg(long, value_enum, default_value_t = SemanticsArg::Union)]
        semantics: SemanticsArg,
    },
    /// Build series for `mld > ε` (`--strict`) or `mld >= ε` from maximal avoiders.
    SeriesSynthesize {
        #[arg(long)]
        dim: usize,
        #[command(flatten)]
        threshold: Threshold,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Hilbert polynomial of each series in a database.
    SeriesHilbert {
        #[arg(long)]
        series_db: PathBuf,
    },
    /// Distinct mld values up to an index, or the values along one family.
    Spectrum {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        r_max: u64,
        /// Family weights: report mld(1/r(weights)) for r = 1..=r-max.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        family: Vec<i64>,
    },
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Cap(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => CliError::Cap(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_db(path: &PathBuf) -> CliResult<SeriesDatabase> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(SeriesDatabase::from_json(&text)?)
}

#[derive(Serialize)]
struct QuotientRow {
    r: u64,
    weights: String,
    canonical: String,
    mld: String,
}

fn weights_string(q: &CyclicQuotient) -> String {
    q.weights().iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
}

fn run(cli: &Cli, sink: &mut Sink) -> CliResult<()> {
    match &cli.command {
        Command::Mld(q) => {
            let g = from_cyclic(&q.parse()?, cli.cap)?;
            if !defines_toric_singularity(&g) {
                return Err(CliError::Input(format!(
                    "{} violates the axis condition",
                    q.parse()?
                )));
            }
            sink.json(&mld(&g))
        }
        Command::Check(q) => {
            let quotient = q.parse()?;
            sink.json(&json!({
                "quotient": quotient.to_string(),
                "order": quotient.group_order(),
                "axis_condition": quotient.satisfies_axis_condition(),
            }))
        }
        Command::Canon(q) => {
            let c = canonical_form(&q.parse()?);
            sink.json(&json!({ "canonical": c.to_string(), "r": c.r(), "weights": c.weights() }))
        }
        Command::Enumerate {
            dim,
            indices,
            threshold,
            up_to_equivalence,
        } => {
            let task = EnumerationTask {
                ambient_dim: *dim,
                indices: indices.get()?,
                primes_only: indices.primes_only,
                eps: threshold.eps()?,
                strict: threshold.strict(),
                up_to_equivalence: *up_to_equivalence,
            };
            let rows: Vec<QuotientRow> = enumerate_cyclic(&task)?
                .into_iter()
                .map(|e| QuotientRow {
                    r: e.quotient.r(),
                    weights: weights_string(&e.quotient),
                    canonical: e.canonical.to_string(),
                    mld: format_rational(&e.mld),
                })
                .collect();
            sink.table(&Table::from_rows(&rows)?)
        }
        Command::Classify {
            series_db,
            points,
            indices,
        } => {
            let db = read_db(series_db)?;
            let quotients: Vec<CyclicQuotient> = match points {
                Some(path) => {
                    let text = fs::read_to_string(path)?;
                    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
                }
                None => {
                    let task = EnumerationTask {
                        ambient_dim: db.ambient_dim,
                        indices: indices.get()?,
                        primes_only: indices.primes_only,
                        eps: Rational::from_integer(0.into()),
                        strict: false,
                        up_to_equivalence: true,
                    };
                    enumerate_cyclic(&task)?.into_iter().map(|e| e.canonical).collect()
                }
            };
            let report = classify(&quotients, &db, cli.cap)?;
            match cli.format {
                Format::Json => sink.json(&report),
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row {
                        quotient: String,
                        canonical: String,
                        mld: String,
                        series: String,
                        stable: bool,
                    }
                    let rows: Vec<Row> = report
                        .items
                        .iter()
                        .map(|c| Row {
                            quotient: c.quotient.to_string(),
                            canonical: c.canonical.to_string(),
                            mld: format_rational(&c.mld),
                            series: c.series.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","),
                            stable: c.stable,
                        })
                        .collect();
                    sink.table(&Table::from_rows(&rows)?)
                }
            }
        }
        Command::Avoiders { dim, threshold, bounds } => {
            let found = maximal_avoiders(*dim, threshold.eps()?, threshold.strict(), bounds.get()?)?;
            #[derive(Serialize)]
            struct Row {
                lattice: String,
                dim: usize,
                components: String,
                height: u64,
                prime: u64,
                maximal_within_primes: bool,
            }
            let rows: Vec<Row> = found
                .iter()
                .map(|a| {
                    let (d, c) = a.lattice.dim_components();
                    Row {
                        lattice: a.lattice.to_string(),
                        dim: d,
                        components: c.to_string(),
                        height: a.bounds.height,
                        prime: a.bounds.prime,
                        maximal_within_primes: a.maximal_within_primes,
                    }
                })
                .collect();
            sink.table(&Table::from_rows(&rows)?)
        }
        Command::SeriesValidate { series_db } => {
            let text = fs::read_to_string(series_db)?;
            let db = SeriesDatabase::from_json_unvalidated(&text)?;
            let violations = db.violations();
            let report: Vec<_> = violations
                .iter()
                .map(|(k, v)| json!({ "series": k, "violations": v.iter().map(|x| x.to_string()).collect::<Vec<_>>() }))
                .collect();
            sink.json(&json!({ "series": db.series.len(), "valid": violations.is_empty(), "violations": report }))?;
            if violations.is_empty() {
                Ok(())
            } else {
                Err(CliError::Input(format!("{} malformed series", violations.len())))
            }
        }
        Command::SeriesMembership {
            series_db,
            quotient,
            semantics,
        } => {
            let db = read_db(series_db)?;
            let q = quotient.parse()?;
            let g = from_cyclic(&q, cli.cap)?;
            let mut rows = Vec::new();
            for (i, s) in db.series.iter().enumerate() {
                let entry = match semantics {
                    SemanticsArg::Compare => {
                        let r = compare_semantics(&g, s)?;
                        json!({ "series": i, "dim": series_dimension(s), "union": r.union,
                                "single_container": r.single_container, "intersection": r.intersection,
                                "disagree": r.disagree() })
                    }
                    other => {
                        let sem = match other {
                            SemanticsArg::SingleContainer => MembershipSemantics::SingleContainer,
                            SemanticsArg::Intersection => MembershipSemantics::Intersection,
                            _ => MembershipSemantics::Union,
                        };
                        json!({ "series": i, "dim": series_dimension(s), "belongs": belongs_with(&g, s, sem)? })
                    }
                };
                rows.push(entry);
            }
            let member = |v: &serde_json::Value| v.get("belongs").or_else(|| v.get("union")) == Some(&json!(true));
            let stable = rows.iter().any(|v| member(v) && v["dim"].as_u64().unwrap_or(0) >= 1);
            sink.json(&json!({ "quotient": q.to_string(), "stable": stable, "series": rows }))
        }
        Command::SeriesSynthesize { dim, threshold, bounds } => {
            let eps = threshold.eps()?;
            let b = bounds.get()?;
            let series = synthesize(*dim, &eps, threshold.strict(), b)?;
            let mut db = SeriesDatabase::new(*dim, eps, threshold.strict(), series);
            db.provenance = Some(format!("synthesized with height {} and primes up to {}", b.height, b.prime));
            sink.text(&db.to_json()?)
        }
        Command::SeriesHilbert { series_db } => {
            let db = read_db(series_db)?;
            #[derive(Serialize)]
            struct Row {
                series: usize,
                dim: usize,
                hilbert: String,
            }
            let rows = db
                .series
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    Ok(Row {
                        series: i,
                        dim: series_dimension(s),
                        hilbert: hilbert_polynomial(s)?.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            sink.table(&Table::from_rows(&rows)?)
        }
        Command::Spectrum { dim, r_max, family } => {
            if family.is_empty() {
                let n = dim.ok_or_else(|| CliError::Input("give --dim or --family".into()))?;
                #[derive(Serialize)]
                struct Row {
                    mld: String,
                    count: usize,
                }
                let rows: Vec<Row> = mld_spectrum(n, *r_max, true)?
                    .into_iter()
                    .map(|(v, count)| Row {
                        mld: format_rational(&v),
                        count,
                    })
                    .collect();
                sink.table(&Table::from_rows(&rows)?)
            } else {
                let fam = family_spectrum(family, 1..=*r_max)?;
                if cli.format == Format::Json {
                    let values: Vec<_> = fam.iter().map(|(r, v)| json!({ "r": r, "mld": format_rational(v) })).collect();
                    sink.json(&json!({ "values": values, "strictly_decreasing": strictly_decreasing(&fam) }))
                } else {
                    #[derive(Serialize)]
                    struct Row {
                        r: u64,
                        mld: String,
                    }
                    let rows: Vec<Row> = fam
                        .iter()
                        .map(|(r, v)| Row {
                            r: *r,
                            mld: format_rational(v),
                        })
                        .collect();
                    sink.table(&Table::from_rows(&rows)?)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            log::warn!("thread pool already initialized: {e}");
        }
    }
    let mut sink = Sink::new(cli.format, cli.out.clone());
    // partial output, such as a validation report, is written even when the command fails
    let ran = run(&cli, &mut sink);
    let flushed = sink.finish().map_err(CliError::from);
    let result = ran.and(flushed);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
