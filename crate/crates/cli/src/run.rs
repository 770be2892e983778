use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use postedge::edgeworth::SeriesKind;
use postedge::models::BuiltinModel;
use postedge::parallel::{self, Execution};
use postedge::posterior::OracleSource;
use postedge::report::{
    compare, convergence, cumulant_row, CompareConfig, ComparisonReport, ConvergenceReport,
    CumulantRow, CumulantSource, Grid, GridScale, Method, SweepConfig,
};
use postedge::{Error, ErrorCategory};
use serde::{Deserialize, Serialize};

use crate::args::{
    CenteringArg, Command, CompareArgs, ConvergenceArgs, CumulantsArgs, Format, GridArgs, KindArg,
    ModelArgs, Oracle, OracleArgs, OutputArgs, SeriesArgs, Source,
};

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(Vec<String>),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 5,
            CliError::Core(e) => match e.category() {
                ErrorCategory::Validation => 2,
                ErrorCategory::Oracle => 3,
                ErrorCategory::Expansion => 4,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(errs) => write!(f, "invalid arguments: {}", errs.join("; ")),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Rendered data plus the human summary.
struct Rendered {
    data: Vec<u8>,
    summary: String,
}

pub fn run(command: &Command) -> CliResult<()> {
    let (out, rendered) = match command {
        Command::Cumulants(a) => (&a.output, cumulants_cmd(a)?),
        Command::Density(a) => (&a.output, series_cmd(a, SeriesKind::Density)?),
        Command::Cdf(a) => (&a.output, series_cmd(a, SeriesKind::Cdf)?),
        Command::Compare(a) => (&a.output, compare_cmd(a)?),
        Command::Convergence(a) => (&a.output, convergence_cmd(a)?),
    };
    emit(out, &rendered)
}

fn emit(out: &OutputArgs, r: &Rendered) -> CliResult<()> {
    match &out.output {
        Some(path) => {
            fs::write(path, &r.data)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            print!("{}", r.summary);
        }
        None => {
            io::stdout()
                .write_all(&r.data)
                .map_err(|e| CliError::Io(e.to_string()))?;
            eprint!("{}", r.summary);
        }
    }
    Ok(())
}

fn model(args: &ModelArgs, default_n: Option<u64>) -> CliResult<BuiltinModel> {
    let m = args.model(default_n).map_err(CliError::Usage)?;
    m.validate()?;
    Ok(m)
}

fn oracle_source(o: &OracleArgs) -> OracleSource {
    match o.oracle {
        Oracle::ClosedForm => OracleSource::ClosedForm,
        Oracle::Quadrature => OracleSource::Quadrature,
    }
}

fn cumulant_source(s: Source) -> CumulantSource {
    match s {
        Source::Exact => CumulantSource::Exact,
        Source::Laplace => CumulantSource::Laplace,
    }
}

fn num(v: f64) -> String {
    v.to_string()
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io_err = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.write_record(&r).map_err(io_err)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn json_bytes<T: Serialize>(v: &T) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

fn cumulants_cmd(a: &CumulantsArgs) -> CliResult<Rendered> {
    let base = model(&a.model, a.sweep.as_ref().and_then(|s| s.first().copied()))?;
    let ns = match &a.sweep {
        Some(ns) => {
            check_sweep(ns)?;
            ns.clone()
        }
        None => vec![base.n()],
    };
    let models: Vec<BuiltinModel> = ns
        .iter()
        .map(|&n| base.with_sample_size(n, a.ratio))
        .collect();
    let source = cumulant_source(a.cumulants);
    let oracle = oracle_source(&a.oracle);
    let rows = parallel::map(Execution::default(), &models, |m| {
        cumulant_row(m, source, oracle, a.oracle.quad_tol)
    })
    .into_iter()
    .collect::<Result<Vec<CumulantRow>, _>>()?;

    let data = match a.output.format {
        Format::Csv => csv_bytes(
            &["source", "n", "mean", "sd", "kappa3", "kappa4", "kappa5"],
            rows.iter().map(|r| {
                vec![
                    source_name(r.source).to_string(),
                    r.n.to_string(),
                    num(r.mean),
                    num(r.sd),
                    num(r.kappa3),
                    num(r.kappa4),
                    num(r.kappa5),
                ]
            }),
        )?,
        Format::Json => json_bytes(&rows)?,
    };
    let mut summary = format!("{} cumulants for {}\n", source_name(source), base.name());
    let _ = writeln!(
        summary,
        "{:>8} {:>14} {:>14} {:>12} {:>12} {:>12}",
        "n", "mean", "sd", "kappa3", "kappa4", "kappa5"
    );
    for r in &rows {
        let _ = writeln!(
            summary,
            "{:>8} {:>14.8} {:>14.8} {:>12.4e} {:>12.4e} {:>12.4e}",
            r.n, r.mean, r.sd, r.kappa3, r.kappa4, r.kappa5
        );
    }
    Ok(Rendered { data, summary })
}

fn source_name(s: CumulantSource) -> &'static str {
    match s {
        CumulantSource::Exact => "exact",
        CumulantSource::Laplace => "laplace",
    }
}

fn compare_config(
    m: BuiltinModel,
    order: usize,
    kind: SeriesKind,
    source: Source,
    g: &GridArgs,
    o: &OracleArgs,
) -> CompareConfig {
    CompareConfig {
        model: m,
        order_k: order,
        kind,
        grid: g.grid,
        grid_scale: if g.theta_grid {
            GridScale::Theta
        } else {
            GridScale::Standardized
        },
        standardized_output: g.standardized,
        cumulants: cumulant_source(source),
        oracle: oracle_source(o),
        quad_tol: o.quad_tol,
    }
}

fn kind_name(k: SeriesKind) -> &'static str {
    match k {
        SeriesKind::Density => "density",
        SeriesKind::Cdf => "cdf",
    }
}

fn error_table(r: &ComparisonReport, methods: &[Method]) -> String {
    let mut s = format!(
        "{} {} of {}, order {}, mean {:.6}, sd {:.6}\n",
        if r.standardized {
            "standardized"
        } else {
            "theta-scale"
        },
        kind_name(r.kind),
        r.model.name(),
        r.order_k,
        r.posterior_mean,
        r.posterior_sd
    );
    let _ = writeln!(s, "{:<14} {:>12} {:>12}", "method", "sup error", "L1 error");
    for &m in methods {
        if let Some(e) = r.error(m) {
            let _ = writeln!(s, "{:<14} {:>12.4e} {:>12.4e}", m.name(), e.sup, e.l1);
        }
    }
    match (
        r.negativity.leftmost_sign_change,
        r.negativity.rightmost_sign_change,
    ) {
        (Some(l), Some(h)) if l == h => {
            let _ = writeln!(s, "edgeworth density changes sign at standardized {l:.3}");
        }
        (Some(l), Some(h)) => {
            let _ = writeln!(
                s,
                "edgeworth density changes sign between standardized {l:.3} and {h:.3}"
            );
        }
        _ => {}
    }
    s
}

#[derive(Serialize)]
struct SeriesRow {
    theta: f64,
    exact: f64,
    value: f64,
}

#[derive(Serialize)]
struct SeriesOutput<'a> {
    model: BuiltinModel,
    kind: SeriesKind,
    order_k: usize,
    method: Method,
    standardized: bool,
    series: &'a postedge::edgeworth::EdgeworthSeries,
    rows: Vec<SeriesRow>,
}

fn series_cmd(a: &SeriesArgs, kind: SeriesKind) -> CliResult<Rendered> {
    let m = model(&a.model, None)?;
    let cfg = compare_config(m, a.order, kind, a.cumulants, &a.grid, &a.oracle);
    let report = compare(&cfg, Execution::default())?;
    let method = match a.centering {
        CenteringArg::PosteriorMean => Method::Edgeworth,
        CenteringArg::Mle => Method::MleCentered,
        CenteringArg::Recentered => Method::Recentered,
    };
    let rows: Vec<SeriesRow> = report
        .rows
        .iter()
        .map(|r| SeriesRow {
            theta: r.theta,
            exact: r.exact,
            value: r.get(method),
        })
        .collect();
    let data = match a.output.format {
        Format::Csv => csv_bytes(
            &["theta", "exact", method.name()],
            rows.iter()
                .map(|r| vec![num(r.theta), num(r.exact), num(r.value)]),
        )?,
        Format::Json => json_bytes(&SeriesOutput {
            model: m,
            kind,
            order_k: a.order,
            method,
            standardized: report.standardized,
            series: report.expansions.series(method).expect("series method"),
            rows,
        })?,
    };
    Ok(Rendered {
        data,
        summary: error_table(&report, &[method]),
    })
}

fn compare_cmd(a: &CompareArgs) -> CliResult<Rendered> {
    let m = model(&a.model, None)?;
    let kind = match a.kind {
        KindArg::Density => SeriesKind::Density,
        KindArg::Cdf => SeriesKind::Cdf,
    };
    let cfg = compare_config(m, a.order, kind, a.cumulants, &a.grid, &a.oracle);
    let report = compare(&cfg, Execution::default())?;
    let data = match a.output.format {
        Format::Csv => csv_bytes(
            &[
                "theta",
                "exact",
                "normal",
                "edgeworth",
                "mle_centered",
                "recentered",
            ],
            report.rows.iter().map(|r| {
                vec![
                    num(r.theta),
                    num(r.exact),
                    num(r.normal),
                    num(r.edgeworth),
                    num(r.mle_centered),
                    num(r.recentered),
                ]
            }),
        )?,
        Format::Json => json_bytes(&report)?,
    };
    Ok(Rendered {
        data,
        summary: error_table(&report, &Method::APPROXIMATIONS),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    ns: Vec<u64>,
    ratio: Option<f64>,
    order: Option<usize>,
    grid: Option<String>,
}

fn read_sweep_file(path: &Path) -> CliResult<SweepFile> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(vec![format!("{}: {e}", path.display())]))
}

fn check_sweep(ns: &[u64]) -> CliResult<()> {
    if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) || ns[0] == 0 {
        return Err(CliError::Usage(vec![format!(
            "sweep must be a non-empty, strictly increasing list of positive sample sizes, got {ns:?}"
        )]));
    }
    Ok(())
}

fn convergence_cmd(a: &ConvergenceArgs) -> CliResult<Rendered> {
    let file = a.sweep_file.as_deref().map(read_sweep_file).transpose()?;
    let ns = match (&a.sweep, &file) {
        (Some(ns), _) => ns.clone(),
        (None, Some(f)) => f.ns.clone(),
        (None, None) => return Err(CliError::Usage(vec!["give --sweep or --sweep-file".into()])),
    };
    check_sweep(&ns)?;
    let ratio = a.ratio.or(file.as_ref().and_then(|f| f.ratio));
    let order = file.as_ref().and_then(|f| f.order).unwrap_or(a.order);
    let grid = match file.as_ref().and_then(|f| f.grid.as_deref()) {
        Some(g) => g.parse::<Grid>()?,
        None => a.grid,
    };
    let base = model(&a.model, Some(ns[0]))?;
    if matches!(base, BuiltinModel::BetaBinomial { .. }) && ratio.is_none() && a.model.x.is_none() {
        return Err(CliError::Usage(vec![
            "beta-binomial sweeps need --ratio or --x".into(),
        ]));
    }
    let cfg = SweepConfig {
        model: base,
        ns,
        ratio,
        order_k: order,
        grid,
        oracle: oracle_source(&a.oracle),
        quad_tol: a.oracle.quad_tol,
    };
    let report = convergence(&cfg, Execution::default())?;
    let data = match a.output.format {
        Format::Csv => convergence_csv(&report)?,
        Format::Json => json_bytes(&report)?,
    };
    let mut summary = format!(
        "{} sweep over n = {:?}, order {}\n",
        base.name(),
        cfg.ns,
        order
    );
    let _ = writeln!(
        summary,
        "{:<22} {:>10} {:>10} {:>7}",
        "quantity", "slope", "std err", "points"
    );
    for s in &report.slopes {
        let f = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
        let _ = writeln!(
            summary,
            "{:<22} {:>10} {:>10} {:>7}",
            s.quantity,
            f(s.slope),
            f(s.std_error),
            s.points
        );
    }
    Ok(Rendered { data, summary })
}

fn convergence_csv(r: &ConvergenceReport) -> CliResult<Vec<u8>> {
    let header = [
        "n",
        "mean",
        "sd",
        "normal_density_error",
        "density_error",
        "normal_cdf_error",
        "cdf_error",
        "kappa3_exact",
        "kappa4_exact",
        "kappa5_exact",
        "kappa3_laplace",
        "kappa4_laplace",
        "kappa5_laplace",
        "variance_rel_error",
        "c1",
        "c2",
        "c3",
        "c4",
        "c5",
        "c6",
        "recenter_distance",
    ];
    csv_bytes(
        &header,
        r.points.iter().map(|p| {
            let mut row = vec![p.n.to_string()];
            row.extend(
                [
                    p.mean,
                    p.sd,
                    p.normal_density_error,
                    p.density_error,
                    p.normal_cdf_error,
                    p.cdf_error,
                ]
                .map(num),
            );
            row.extend(p.kappa_exact.map(num));
            row.extend(p.kappa_laplace.map(num));
            row.push(num(p.variance_rel_error));
            row.extend(p.comparator.map(num));
            row.push(num(p.recenter_distance));
            row
        }),
    )
}
