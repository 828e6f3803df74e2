//! `idealstat`: counts, constants and distribution statistics for ideals of
//! quadratic number fields, printed as CSV or JSON.

mod output;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use idealstat::catalog::{cache_get_or_build, load_catalog, Catalog, CACHE_DIR_ENV};
use idealstat::constants::{gamma_h_forms, zeta_K, G_h};
use idealstat::counting::{
    count_T_h, count_hfree, count_hfree_coprime, count_hfull, count_hfull_coprime, count_ideals,
    count_ideals_from_table, divisor_densities, joint_density, CountReport, Subset,
};
use idealstat::ekstat::{ek_sample, ks_report, DEFAULT_BINS};
use idealstat::mertens::evaluate_part;
use idealstat::primeideals::{ideals_above, prime_ideals_up_to, PrimeIdeal};
use idealstat::probmodel::{
    conditions_audit, model_parameters, moment_gaps, monte_carlo_moment, BernoulliSystem,
    DEFAULT_SEED,
};
use idealstat::{Error, FieldDescriptor};
use output::{Cell, Report};
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(
    name = "idealstat",
    version,
    about = "Statistics of ideals in quadratic number fields"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Field catalog file (the built-in catalog when absent).
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Directory for cached prime-ideal tables.
    #[arg(long, global = true, env = CACHE_DIR_ENV)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Absolute tolerance for Euler-product constants.
    #[arg(long, global = true, default_value_t = 1e-10, value_parser = positive_real)]
    tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the fields of the catalog.
    Fields,
    /// Count ideals of a kind up to x and compare with the main term.
    Count {
        #[arg(value_enum)]
        kind: CountKind,
        #[command(flatten)]
        target: Target,
        /// Only ideals coprime to the prime ideal `p,index`.
        #[arg(long, value_parser = parse_prime_spec)]
        coprime_to: Option<(u64, u8)>,
    },
    /// Euler-product constants of a field.
    Constants {
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..))]
        h: u32,
    },
    /// Prime and ideal reciprocal sums against their limiting shapes.
    Mertens {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=7))]
        part: u8,
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long = "x-grid", alias = "grid", value_delimiter = ',', value_parser = positive_real, required = true)]
        x_grid: Vec<f64>,
        /// Exponent α (each part has a default).
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Distribution of the normalized number of prime divisors.
    Ek {
        #[command(flatten)]
        subset: SubsetArgs,
        #[arg(long, value_parser = positive_real)]
        x: f64,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        /// Highest moment reported.
        #[arg(long = "r", default_value_t = 4)]
        r_max: u32,
    },
    /// Share of subset members divisible by prime ideals.
    Density {
        #[command(flatten)]
        subset: SubsetArgs,
        #[command(flatten)]
        grid: Grid,
        /// Prime ideals `p,index` (repeatable); the smallest ones when absent.
        #[arg(long = "prime", value_parser = parse_prime_spec)]
        primes: Vec<(u64, u8)>,
        /// How many of the smallest prime ideals to use when none are given.
        #[arg(long, default_value_t = 3)]
        smallest: usize,
        /// Report joint divisibility by all the primes instead.
        #[arg(long)]
        joint: bool,
    },
    /// Numerical values of the hypotheses behind the limit law.
    Audit {
        #[command(flatten)]
        subset: SubsetArgs,
        #[arg(long, value_parser = positive_real)]
        x: f64,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        r: u32,
    },
    /// Moments of the Bernoulli model against the subset.
    Probmodel {
        #[command(flatten)]
        subset: SubsetArgs,
        #[arg(long, value_parser = positive_real)]
        x: f64,
        /// Truncation y (the subset's standard choice when absent).
        #[arg(long, value_parser = positive_real)]
        y: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        moments: Vec<u32>,
        /// Monte Carlo draws per moment (0 disables the Monte Carlo columns).
        #[arg(long, default_value_t = 0)]
        draws: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CountKind {
    Ideals,
    Hfree,
    Hfull,
    Th,
}

#[derive(Args, Debug)]
struct Target {
    #[arg(long, default_value = "Q")]
    field: String,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..))]
    h: u32,
    #[command(flatten)]
    grid: Grid,
}

#[derive(Args, Debug)]
struct Grid {
    #[arg(long, value_parser = positive_real, conflicts_with = "grid")]
    x: Option<f64>,
    /// Comma-separated increasing values of x.
    #[arg(long, alias = "x-grid", value_delimiter = ',', value_parser = positive_real)]
    grid: Vec<f64>,
}

impl Grid {
    fn values(&self) -> Result<Vec<f64>, Error> {
        let xs = match self.x {
            Some(x) => vec![x],
            None => self.grid.clone(),
        };
        if xs.is_empty() {
            return Err(Error::InvalidArgument("give --x or --grid".into()));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "the x grid must be strictly increasing".into(),
            ));
        }
        Ok(xs)
    }
}

#[derive(Args, Debug)]
struct SubsetArgs {
    #[arg(long, default_value = "Q")]
    field: String,
    #[arg(long, default_value = "hfree", value_parser = parse_subset)]
    subset: Subset,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..))]
    h: u32,
}

fn positive_real(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("`{s}` must be a positive finite number"))
    }
}

fn parse_prime_spec(s: &str) -> Result<(u64, u8), String> {
    let (p, idx) = s.split_once(',').unwrap_or((s, "0"));
    let p = p
        .trim()
        .parse()
        .map_err(|_| format!("bad prime in `{s}`"))?;
    let idx = idx
        .trim()
        .parse()
        .map_err(|_| format!("bad conjugate index in `{s}`"))?;
    Ok((p, idx))
}

fn parse_subset(s: &str) -> Result<Subset, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn resolve_prime(desc: &FieldDescriptor, (p, idx): (u64, u8)) -> Result<PrimeIdeal, Error> {
    if !idealstat::sieve::is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    ideals_above(desc, p)
        .into_iter()
        .find(|q| q.conjugate_index == idx)
        .ok_or_else(|| {
            Error::InvalidArgument(format!("{} has no prime ideal ({p}, {idx})", desc.label))
        })
}

struct Context {
    catalog: Catalog,
    global: GlobalArgs,
}

impl Context {
    fn field(&self, label: &str) -> Result<FieldDescriptor, Error> {
        self.catalog.get(label).cloned()
    }
}

fn count_row(r: &CountReport) -> Vec<Cell> {
    vec![
        r.x.into(),
        r.observed.into(),
        r.prediction.main_term.into(),
        r.relative_error.into(),
        r.prediction.error_case.to_string().into(),
    ]
}

fn run_count(
    ctx: &Context,
    kind: CountKind,
    target: &Target,
    coprime_to: Option<(u64, u8)>,
) -> Result<Report, Error> {
    let desc = ctx.field(&target.field)?;
    let h = target.h;
    let xs = target.grid.values()?;
    let ell = coprime_to
        .map(|spec| resolve_prime(&desc, spec))
        .transpose()?;
    let name = match kind {
        CountKind::Ideals => "ideals",
        CountKind::Hfree => "hfree",
        CountKind::Hfull => "hfull",
        CountKind::Th => "th",
    };
    if ell.is_some() && !matches!(kind, CountKind::Hfree | CountKind::Hfull) {
        return Err(Error::InvalidArgument(format!(
            "--coprime-to applies to hfree and hfull counts, not {name}"
        )));
    }
    let mut report = Report::new(
        "count",
        &["x", "observed", "main_term", "relative_error", "error_case"],
    );
    report.meta("kind", name).meta("field", desc.label.as_str());
    if kind != CountKind::Ideals {
        report.meta("h", h);
    }
    if let Some(ell) = &ell {
        report.meta("coprime_to", format!("{},{}", ell.p, ell.conjugate_index));
    }
    let mut shape = None;
    for &x in &xs {
        let r = match (kind, &ell) {
            (CountKind::Ideals, _) => match &ctx.global.cache_dir {
                Some(dir) => {
                    let table = cache_get_or_build(&desc, x, dir)?;
                    for w in &table.warnings {
                        eprintln!("warning: {w}");
                    }
                    count_ideals_from_table(&desc, table.ideals, x)?
                }
                None => count_ideals(&desc, x)?,
            },
            (CountKind::Hfree, None) => count_hfree(&desc, h, x)?,
            (CountKind::Hfree, Some(l)) => count_hfree_coprime(&desc, h, x, l)?,
            (CountKind::Hfull, None) => count_hfull(&desc, h, x)?,
            (CountKind::Hfull, Some(l)) => count_hfull_coprime(&desc, h, x, l)?,
            (CountKind::Th, _) => count_T_h(&desc, h, x)?,
        };
        shape.get_or_insert_with(|| (r.prediction.shape(), r.prediction.error_exponent));
        report.row(count_row(&r));
    }
    if let Some((s, e)) = shape {
        report.meta("error_shape", s).meta("error_exponent", e);
    }
    Ok(report)
}

fn run_constants(ctx: &Context, field: &str, h: u32) -> Result<Report, Error> {
    let desc = ctx.field(field)?;
    let tol = ctx.global.tol;
    let hf = f64::from(h);
    let zeta = zeta_K(&desc, hf, tol)?;
    let forms = gamma_h_forms(&desc, h, tol)?;
    let g = G_h(&desc, h, 1.0 / hf, tol)?;
    let mut tuple_constant = desc.kappa();
    for i in 1..h {
        tuple_constant *= zeta_K(&desc, 1.0 + f64::from(i) / hf, tol)?.value;
    }
    let mut report = Report::new("constants", &["quantity", "value"]);
    report
        .meta("field", desc.label.as_str())
        .meta("h", h)
        .meta("tol", tol);
    let rows: Vec<(&str, Cell)> = vec![
        ("kappa", desc.kappa().into()),
        ("zeta_K_h", zeta.value.into()),
        ("gamma_h", forms.direct.value.into()),
        ("gamma_h_factored", forms.factored.value.into()),
        ("G_h_at_inverse_h", g.value.into()),
        ("hfree_constant", (desc.kappa() / zeta.value).into()),
        ("hfull_constant", (desc.kappa() * forms.direct.value).into()),
        ("tuple_constant", tuple_constant.into()),
        (
            "gamma_h_truncation_norm",
            forms.direct.truncation_norm.into(),
        ),
        ("gamma_h_tail_bound", forms.direct.tail_bound.into()),
    ];
    for (k, v) in rows {
        report.row(vec![k.into(), v]);
    }
    Ok(report)
}

fn run_mertens(
    ctx: &Context,
    part: u8,
    field: &str,
    x_grid: &[f64],
    alpha: Option<f64>,
) -> Result<Report, Error> {
    let desc = ctx.field(field)?;
    let fit = evaluate_part(part, &desc, x_grid, alpha)?;
    let mut report = Report::new("mertens", &["x", "empirical", "model", "residual"]);
    report
        .meta("field", desc.label.as_str())
        .meta("part", part)
        .meta("alpha", fit.alpha)
        .meta("fitted_constant", fit.fitted_constant);
    for i in 0..fit.x_grid.len() {
        report.row(vec![
            fit.x_grid[i].into(),
            fit.empirical[i].into(),
            fit.model[i].into(),
            fit.residuals[i].into(),
        ]);
    }
    Ok(report)
}

fn run_ek(ctx: &Context, s: &SubsetArgs, x: f64, bins: usize, r_max: u32) -> Result<Report, Error> {
    let desc = ctx.field(&s.field)?;
    let sample = ek_sample(&desc, s.subset, s.h, x)?;
    let ks = ks_report(&sample, r_max, bins)?;
    let mut report = Report::new(
        "ek",
        &["bin_left", "bin_right", "count", "empirical_cdf", "phi"],
    );
    report
        .meta("field", desc.label.as_str())
        .meta("subset", s.subset.to_string())
        .meta("h", ks.h)
        .meta("x", x)
        .meta("n", ks.n)
        .meta("ks_distance", ks.ks_distance)
        .meta("variance", ks.variance);
    for m in &ks.moments {
        report
            .meta(&format!("moment_{}", m.r), m.empirical)
            .meta(&format!("gaussian_moment_{}", m.r), m.gaussian);
    }
    for b in &ks.histogram {
        report.row(vec![
            b.left.into(),
            b.right.into(),
            b.count.into(),
            b.empirical_cdf.into(),
            b.phi.into(),
        ]);
    }
    Ok(report)
}

fn run_density(
    ctx: &Context,
    s: &SubsetArgs,
    grid: &Grid,
    specs: &[(u64, u8)],
    smallest: usize,
    joint: bool,
) -> Result<Report, Error> {
    let desc = ctx.field(&s.field)?;
    let xs = grid.values()?;
    let primes: Vec<PrimeIdeal> = if specs.is_empty() {
        // Enough primes to find the smallest ones in every catalog field.
        let mut bound = 16.0;
        loop {
            let found = prime_ideals_up_to(&desc, bound);
            if found.len() >= smallest || bound > 1e7 {
                break found.into_iter().take(smallest).collect();
            }
            bound *= 4.0;
        }
    } else {
        specs
            .iter()
            .map(|&spec| resolve_prime(&desc, spec))
            .collect::<Result<_, _>>()?
    };
    if primes.is_empty() {
        return Err(Error::InvalidArgument("no prime ideals selected".into()));
    }
    let mut report;
    if joint {
        report = Report::new(
            "density",
            &[
                "x",
                "primes",
                "members",
                "divisible",
                "lambda",
                "lambda_hat",
                "e_hat",
            ],
        );
        for &x in &xs {
            let j = joint_density(&desc, s.subset, s.h, &primes, x)?;
            let names: Vec<String> = j
                .primes
                .iter()
                .map(|p| format!("{}:{}", p.p, p.conjugate_index))
                .collect();
            report.row(vec![
                x.into(),
                names.join(" ").into(),
                j.members.into(),
                j.divisible.into(),
                j.lambda_product.into(),
                j.lambda_hat.into(),
                j.e_hat.into(),
            ]);
        }
    } else {
        report = Report::new(
            "density",
            &[
                "x",
                "p",
                "conjugate_index",
                "norm",
                "members",
                "divisible",
                "lambda",
                "lambda_hat",
                "e_hat",
            ],
        );
        for &x in &xs {
            for d in divisor_densities(&desc, s.subset, s.h, &primes, x)? {
                report.row(vec![
                    x.into(),
                    d.prime.p.into(),
                    d.prime.conjugate_index.into(),
                    d.prime.norm.into(),
                    d.members.into(),
                    d.divisible.into(),
                    d.lambda.into(),
                    d.lambda_hat.into(),
                    d.e_hat.into(),
                ]);
            }
        }
    }
    report
        .meta("field", desc.label.as_str())
        .meta("subset", s.subset.to_string())
        .meta("h", s.h);
    Ok(report)
}

fn cell_from_json(v: &Value) -> Cell {
    match v {
        Value::Null => Cell::Empty,
        Value::Bool(b) => Cell::Bool(*b),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into(),
            (_, Some(i)) => i.into(),
            _ => n.as_f64().unwrap_or(f64::NAN).into(),
        },
        Value::String(s) => s.as_str().into(),
        other => other.to_string().into(),
    }
}

fn run_audit(ctx: &Context, s: &SubsetArgs, x: f64, r: u32) -> Result<Report, Error> {
    let desc = ctx.field(&s.field)?;
    let audit = conditions_audit(&desc, s.subset, s.h, x, r, ctx.global.seed)?;
    let Value::Object(fields) = serde_json::to_value(&audit).expect("serializable") else {
        unreachable!("audit reports serialize to objects")
    };
    let columns: Vec<&str> = fields.keys().map(String::as_str).collect();
    let mut report = Report::new("audit", &columns);
    report.row(fields.values().map(cell_from_json).collect());
    Ok(report)
}

fn run_probmodel(
    ctx: &Context,
    s: &SubsetArgs,
    x: f64,
    y: Option<f64>,
    moments: &[u32],
    draws: u64,
) -> Result<Report, Error> {
    let desc = ctx.field(&s.field)?;
    let y = match y {
        Some(y) => y,
        None => model_parameters(s.subset, s.h, x)?.1,
    };
    let gaps = moment_gaps(&desc, s.subset, s.h, x, y, moments)?;
    let mut columns = vec!["r", "exact", "empirical", "gap"];
    if draws > 0 {
        columns.extend(["monte_carlo", "monte_carlo_std_error"]);
    }
    let mut report = Report::new("probmodel", &columns);
    let system = BernoulliSystem::new(&desc, s.subset, s.h, x, y)?;
    let (mean, var) = idealstat::probmodel::mean_variance(&system);
    report
        .meta("field", desc.label.as_str())
        .meta("subset", s.subset.to_string())
        .meta("h", s.h)
        .meta("x", x)
        .meta("y", y)
        .meta("indicators", system.len())
        .meta("mean", mean)
        .meta("variance", var)
        .meta("members", gaps.first().map(|g| g.members));
    if draws > 0 {
        report.meta("draws", draws).meta("seed", ctx.global.seed);
    }
    for g in &gaps {
        let mut row: Vec<Cell> = vec![g.r.into(), g.exact.into(), g.empirical.into(), g.gap.into()];
        if draws > 0 {
            let mc = monte_carlo_moment(&system, g.r, draws, ctx.global.seed)?;
            row.push(mc.mean.into());
            row.push(mc.std_error.into());
        }
        report.row(row);
    }
    Ok(report)
}

fn run_fields(ctx: &Context) -> Report {
    let mut report = Report::new(
        "fields",
        &[
            "label",
            "degree",
            "d",
            "discriminant",
            "r1",
            "r2",
            "class_number",
            "regulator",
            "nu",
            "kappa",
        ],
    );
    if let Some(path) = &ctx.catalog.source {
        report.meta("source", path.display().to_string());
    }
    report.meta("checksum", ctx.catalog.checksum.as_str());
    for f in ctx.catalog.fields() {
        report.row(vec![
            f.label.as_str().into(),
            f.degree.into(),
            f.d.into(),
            f.discriminant.into(),
            f.r1.into(),
            f.r2.into(),
            f.class_number.into(),
            f.regulator.into(),
            f.nu.into(),
            f.kappa().into(),
        ]);
    }
    report
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let catalog = load_catalog(cli.global.catalog.as_deref())?;
    let ctx = Context {
        catalog,
        global: cli.global,
    };
    let report = match &cli.command {
        Command::Fields => run_fields(&ctx),
        Command::Count {
            kind,
            target,
            coprime_to,
        } => run_count(&ctx, *kind, target, *coprime_to)?,
        Command::Constants { field, h } => run_constants(&ctx, field, *h)?,
        Command::Mertens {
            part,
            field,
            x_grid,
            alpha,
        } => run_mertens(&ctx, *part, field, x_grid, *alpha)?,
        Command::Ek {
            subset,
            x,
            bins,
            r_max,
        } => run_ek(&ctx, subset, *x, *bins, *r_max)?,
        Command::Density {
            subset,
            grid,
            primes,
            smallest,
            joint,
        } => run_density(&ctx, subset, grid, primes, *smallest, *joint)?,
        Command::Audit { subset, x, r } => run_audit(&ctx, subset, *x, *r)?,
        Command::Probmodel {
            subset,
            x,
            y,
            moments,
            draws,
        } => run_probmodel(&ctx, subset, *x, *y, moments, *draws)?,
    };
    let text = match ctx.global.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    match &ctx.global.out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source: e,
                })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
