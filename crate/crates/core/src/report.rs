//! Comparisons of the approximations against the exact posterior, sweeps
//! over the sample size and cumulant tables.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::edgeworth::{
    build_mle_centered, build_series, recenter, Centering, CenteringLabel, EdgeworthSeries,
    NegativityDiagnostic, SeriesKind,
};
use crate::error::{Error, Result};
use crate::laplace::{laplace_cumulants, LaplaceConfig};
use crate::models::BuiltinModel;
use crate::parallel::{self, Execution};
use crate::posterior::{build_oracle, ModelSpec, OracleSource, PosteriorOracle};
use crate::specialfn::{normal_cdf, normal_pdf};

/// Evenly spaced points `lo..=hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        let g = Grid { lo, hi, points };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            errs.push(format!(
                "grid needs finite lo < hi, got {}:{}",
                self.lo, self.hi
            ));
        }
        if self.points < 2 {
            errs.push(format!("grid needs at least 2 points, got {}", self.points));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let last = self.points - 1;
        (0..self.points)
            .map(|i| {
                if i == last {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / last as f64
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// Parses `lo:hi:points`.
    fn from_str(s: &str) -> Result<Self> {
        let bad =
            || Error::Validation(vec![format!("grid must look like lo:hi:points, got {s:?}")]);
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, pts] = parts[..] else {
            return Err(bad());
        };
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        let points: usize = pts.trim().parse().map_err(|_| bad())?;
        Grid::new(lo, hi, points)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.points)
    }
}

/// Units of the grid given in a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridScale {
    /// Posterior standard deviations around the posterior mean.
    Standardized,
    Theta,
}

/// Where the invariant cumulants of the posterior-mean series come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CumulantSource {
    Exact,
    Laplace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Normal,
    Edgeworth,
    MleCentered,
    Recentered,
}

impl Method {
    pub const APPROXIMATIONS: [Method; 4] = [
        Method::Normal,
        Method::Edgeworth,
        Method::MleCentered,
        Method::Recentered,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Normal => "normal",
            Method::Edgeworth => "edgeworth",
            Method::MleCentered => "mle_centered",
            Method::Recentered => "recentered",
        }
    }
}

pub fn posterior_oracle(
    model: &BuiltinModel,
    source: OracleSource,
    quad_tol: f64,
) -> Result<PosteriorOracle> {
    match source {
        OracleSource::ClosedForm => model.exact_posterior(),
        OracleSource::Quadrature => build_oracle(&model.instantiate()?, quad_tol),
    }
}

/// The three series of a comparison, all density kind and centered on the
/// `theta` scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expansions {
    pub edgeworth: EdgeworthSeries,
    pub mle_centered: EdgeworthSeries,
    pub recentered: EdgeworthSeries,
}

pub fn build_expansions(
    spec: &ModelSpec,
    oracle: &PosteriorOracle,
    order_k: usize,
    source: CumulantSource,
) -> Result<Expansions> {
    let (kappa, mean, sd) = match source {
        CumulantSource::Exact => (oracle.kappa(), oracle.mean, oracle.sd),
        CumulantSource::Laplace => {
            let l = laplace_cumulants(spec, &LaplaceConfig::default())?;
            (l.kappa, l.mean(), l.sd())
        }
    };
    let edgeworth = build_series(kappa, order_k, SeriesKind::Density)?.with_centering(Centering {
        center: mean,
        scale: sd,
        label: CenteringLabel::PosteriorMean,
    });
    let mle_centered = build_mle_centered(spec, oracle, order_k)?;
    let recentered = recenter(&mle_centered, order_k)?;
    Ok(Expansions {
        edgeworth,
        mle_centered,
        recentered,
    })
}

impl Expansions {
    pub fn series(&self, method: Method) -> Option<&EdgeworthSeries> {
        match method {
            Method::Edgeworth => Some(&self.edgeworth),
            Method::MleCentered => Some(&self.mle_centered),
            Method::Recentered => Some(&self.recentered),
            Method::Exact | Method::Normal => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareConfig {
    pub model: BuiltinModel,
    pub order_k: usize,
    pub kind: SeriesKind,
    pub grid: Grid,
    pub grid_scale: GridScale,
    /// Report standardized values and densities instead of `theta` ones.
    pub standardized_output: bool,
    pub cumulants: CumulantSource,
    pub oracle: OracleSource,
    pub quad_tol: f64,
}

impl CompareConfig {
    pub fn new(model: BuiltinModel) -> Self {
        Self {
            model,
            order_k: 3,
            kind: SeriesKind::Density,
            grid: Grid {
                lo: -3.0,
                hi: 3.0,
                points: 241,
            },
            grid_scale: GridScale::Standardized,
            standardized_output: false,
            cumulants: CumulantSource::Exact,
            oracle: OracleSource::ClosedForm,
            quad_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub theta: f64,
    pub exact: f64,
    pub normal: f64,
    pub edgeworth: f64,
    pub mle_centered: f64,
    pub recentered: f64,
}

impl ComparisonRow {
    pub fn get(&self, m: Method) -> f64 {
        match m {
            Method::Exact => self.exact,
            Method::Normal => self.normal,
            Method::Edgeworth => self.edgeworth,
            Method::MleCentered => self.mle_centered,
            Method::Recentered => self.recentered,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MethodError {
    pub method: Method,
    pub sup: f64,
    /// Trapezoid rule over the reported grid.
    pub l1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub model: BuiltinModel,
    pub order_k: usize,
    pub kind: SeriesKind,
    pub standardized: bool,
    pub cumulants: CumulantSource,
    pub oracle: OracleSource,
    pub posterior_mean: f64,
    pub posterior_sd: f64,
    pub expansions: Expansions,
    pub rows: Vec<ComparisonRow>,
    pub errors: Vec<MethodError>,
    /// Sign changes of the posterior-mean series on the grid, in
    /// standardized units.
    pub negativity: NegativityDiagnostic,
}

impl ComparisonReport {
    pub fn error(&self, m: Method) -> Option<MethodError> {
        self.errors.iter().copied().find(|e| e.method == m)
    }
}

/// Sup and trapezoid L1 errors of `approx` against `exact` on `xs`.
pub fn grid_errors(xs: &[f64], exact: &[f64], approx: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = exact
        .iter()
        .zip(approx)
        .map(|(e, a)| (a - e).abs())
        .collect();
    let sup = d.iter().copied().fold(0.0, f64::max);
    let l1 = xs
        .windows(2)
        .zip(d.windows(2))
        .map(|(x, e)| 0.5 * (x[1] - x[0]) * (e[0] + e[1]))
        .sum();
    (sup, l1)
}

/// Evaluates every approximation on the configured grid.
pub fn compare(cfg: &CompareConfig, exec: Execution) -> Result<ComparisonReport> {
    cfg.grid.validate()?;
    let spec = cfg.model.instantiate()?;
    let oracle = posterior_oracle(&cfg.model, cfg.oracle, cfg.quad_tol)?;
    let expansions = build_expansions(&spec, &oracle, cfg.order_k, cfg.cumulants)?;
    let Centering {
        center: mean,
        scale: sd,
        ..
    } = expansions.edgeworth.centering;

    let kind = cfg.kind;
    let series = match kind {
        SeriesKind::Density => [
            expansions.edgeworth.clone(),
            expansions.mle_centered.clone(),
            expansions.recentered.clone(),
        ],
        SeriesKind::Cdf => [
            expansions.edgeworth.to_cdf()?,
            expansions.mle_centered.to_cdf()?,
            expansions.recentered.to_cdf()?,
        ],
    };

    let thetas: Vec<f64> = match cfg.grid_scale {
        GridScale::Theta => cfg.grid.values(),
        GridScale::Standardized => cfg
            .grid
            .values()
            .into_iter()
            .map(|x| mean + sd * x)
            .collect(),
    };
    let jac = if cfg.standardized_output && kind == SeriesKind::Density {
        sd
    } else {
        1.0
    };
    let rows = parallel::map(exec, &thetas, |&theta| {
        let z = (theta - mean) / sd;
        let (exact, normal) = match kind {
            SeriesKind::Density => (oracle.density(theta), normal_pdf(z) / sd),
            SeriesKind::Cdf => (oracle.cdf(theta), normal_cdf(z)),
        };
        ComparisonRow {
            theta: if cfg.standardized_output { z } else { theta },
            exact: exact * jac,
            normal: normal * jac,
            edgeworth: series[0].eval_theta(theta) * jac,
            mle_centered: series[1].eval_theta(theta) * jac,
            recentered: series[2].eval_theta(theta) * jac,
        }
    });

    let xs: Vec<f64> = rows.iter().map(|r| r.theta).collect();
    let exact: Vec<f64> = rows.iter().map(|r| r.exact).collect();
    let errors = Method::APPROXIMATIONS
        .iter()
        .map(|&m| {
            let approx: Vec<f64> = rows.iter().map(|r| r.get(m)).collect();
            let (sup, l1) = grid_errors(&xs, &exact, &approx);
            MethodError { method: m, sup, l1 }
        })
        .collect();
    let z_lo = (thetas[0] - mean) / sd;
    let z_hi = (thetas[thetas.len() - 1] - mean) / sd;
    let negativity = expansions.edgeworth.negativity(z_lo, z_hi, thetas.len())?;

    Ok(ComparisonReport {
        model: cfg.model,
        order_k: cfg.order_k,
        kind,
        standardized: cfg.standardized_output,
        cumulants: cfg.cumulants,
        oracle: cfg.oracle,
        posterior_mean: mean,
        posterior_sd: sd,
        expansions,
        rows,
        errors,
        negativity,
    })
}

/// Least-squares slope of `log y` against `log n`, with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub quantity: String,
    pub slope: Option<f64>,
    pub std_error: Option<f64>,
    /// Points entering the fit.
    pub points: usize,
}

/// Fits `log |y| = a + slope log n` over the points with finite nonzero
/// `y`, after dropping the smallest `n`. The standard error needs three
/// points.
pub fn fit_loglog(ns: &[f64], ys: &[f64]) -> (Option<f64>, Option<f64>, usize) {
    let smallest = ns.iter().copied().fold(f64::INFINITY, f64::min);
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(ys)
        .filter(|(&n, &y)| n > smallest && n > 0.0 && y.is_finite() && y != 0.0)
        .map(|(&n, &y)| (n.ln(), y.abs().ln()))
        .collect();
    fit_points(&pts)
}

/// Like [`fit_loglog`] but keeps every point.
pub fn fit_loglog_all(ns: &[f64], ys: &[f64]) -> (Option<f64>, Option<f64>, usize) {
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(ys)
        .filter(|(&n, &y)| n > 0.0 && y.is_finite() && y != 0.0)
        .map(|(&n, &y)| (n.ln(), y.abs().ln()))
        .collect();
    fit_points(&pts)
}

fn fit_points(pts: &[(f64, f64)]) -> (Option<f64>, Option<f64>, usize) {
    let m = pts.len();
    if m < 2 {
        return (None, None, m);
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return (None, None, m);
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let se = (m > 2).then(|| {
        let ssr: f64 = pts
            .iter()
            .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
            .sum();
        (ssr / (m - 2) as f64 / sxx).sqrt()
    });
    (Some(slope), se, m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub model: BuiltinModel,
    pub ns: Vec<u64>,
    /// Success ratio for the beta-binomial family; other families keep
    /// their data mean.
    pub ratio: Option<f64>,
    pub order_k: usize,
    /// Standardized grid for the error norms, clipped to the support.
    pub grid: Grid,
    pub oracle: OracleSource,
    pub quad_tol: f64,
}

impl SweepConfig {
    pub fn new(model: BuiltinModel, ns: Vec<u64>) -> Self {
        Self {
            model,
            ns,
            ratio: None,
            order_k: 3,
            grid: Grid {
                lo: -4.0,
                hi: 4.0,
                points: 2001,
            },
            oracle: OracleSource::ClosedForm,
            quad_tol: 1e-10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.ns.is_empty() {
            errs.push("sweep needs at least one sample size".to_string());
        }
        if self.ns.windows(2).any(|w| w[0] >= w[1]) {
            errs.push(format!(
                "sweep sample sizes must increase strictly, got {:?}",
                self.ns
            ));
        }
        if self.ns.first() == Some(&0) {
            errs.push("sweep sample sizes must be positive".to_string());
        }
        if let Some(r) = self.ratio {
            if !(0.0..=1.0).contains(&r) {
                errs.push(format!("ratio must lie in [0, 1], got {r}"));
            }
        }
        if let Err(Error::Validation(e)) = self.grid.validate() {
            errs.extend(e);
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }
}

/// Per-`n` results of a sweep. Density and distribution errors are sup
/// norms in standardized units; the posterior-mean series uses the exact
/// invariant cumulants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub n: u64,
    pub model: BuiltinModel,
    pub mean: f64,
    pub sd: f64,
    pub kappa_exact: [f64; 3],
    pub kappa_laplace: [f64; 3],
    /// `|beta_2^laplace - beta_2| / beta_2`.
    pub variance_rel_error: f64,
    pub normal_density_error: f64,
    pub density_error: f64,
    pub normal_cdf_error: f64,
    pub cdf_error: f64,
    /// Comparator coefficients on `He_1..He_6`, before truncation.
    pub comparator: [f64; 6],
    /// Largest coefficient difference between the recentered comparator and
    /// the posterior-mean series.
    pub recenter_distance: f64,
}

fn sweep_point(cfg: &SweepConfig, n: u64) -> Result<SweepPoint> {
    let model = cfg.model.with_sample_size(n, cfg.ratio);
    let spec = model.instantiate()?;
    let oracle = posterior_oracle(&model, cfg.oracle, cfg.quad_tol)?;
    let (mean, sd) = (oracle.mean, oracle.sd);
    let kappa_exact = oracle.kappa();
    let lap = laplace_cumulants(&spec, &LaplaceConfig::default())?;

    let dens = build_series(kappa_exact, cfg.order_k, SeriesKind::Density)?;
    let cdf = dens.to_cdf()?;
    let support = spec.support();
    let lo = cfg.grid.lo.max((support.lo - mean) / sd);
    let hi = cfg.grid.hi.min((support.hi - mean) / sd);
    let xs = Grid::new(lo, hi, cfg.grid.points)?.values();
    let mut errs = [0.0f64; 4];
    for &x in &xs {
        let theta = mean + sd * x;
        let ed = sd * oracle.density(theta);
        let ec = oracle.cdf(theta);
        errs[0] = errs[0].max((normal_pdf(x) - ed).abs());
        errs[1] = errs[1].max((dens.eval(x) - ed).abs());
        errs[2] = errs[2].max((normal_cdf(x) - ec).abs());
        errs[3] = errs[3].max((cdf.eval(x) - ec).abs());
    }

    let mle = build_mle_centered(&spec, &oracle, MAX_COMPARATOR_ORDER)?;
    let mut comparator = [0.0; 6];
    for t in &mle.terms {
        comparator[t.hermite_degree - 1] = t.coefficient;
    }
    let mle_k = build_mle_centered(&spec, &oracle, cfg.order_k)?;
    let rec = recenter(&mle_k, cfg.order_k)?.coefficients_by_degree();
    let direct = dens.coefficients_by_degree();
    let recenter_distance = rec
        .keys()
        .chain(direct.keys())
        .filter(|&&d| d > 0)
        .map(|d| (rec.get(d).copied().unwrap_or(0.0) - direct.get(d).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max);

    Ok(SweepPoint {
        n,
        model,
        mean,
        sd,
        kappa_exact,
        kappa_laplace: lap.kappa,
        variance_rel_error: ((lap.beta.variance() - oracle.variance()) / oracle.variance()).abs(),
        normal_density_error: errs[0],
        density_error: errs[1],
        normal_cdf_error: errs[2],
        cdf_error: errs[3],
        comparator,
        recenter_distance,
    })
}

/// Order large enough for the comparator to keep all six Hermite degrees.
const MAX_COMPARATOR_ORDER: usize = crate::edgeworth::MAX_SERIES_ORDER;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub config: SweepConfig,
    pub points: Vec<SweepPoint>,
    pub slopes: Vec<SlopeFit>,
}

impl ConvergenceReport {
    pub fn slope(&self, quantity: &str) -> Option<&SlopeFit> {
        self.slopes.iter().find(|s| s.quantity == quantity)
    }
}

type Extract = fn(&SweepPoint) -> f64;

/// Quantities whose decay is fitted, by name.
pub const SWEEP_QUANTITIES: [(&str, Extract); 16] = [
    ("normal_density_error", |p| p.normal_density_error),
    ("density_error", |p| p.density_error),
    ("normal_cdf_error", |p| p.normal_cdf_error),
    ("cdf_error", |p| p.cdf_error),
    ("kappa3_laplace", |p| p.kappa_laplace[0]),
    ("kappa4_laplace", |p| p.kappa_laplace[1]),
    ("kappa5_laplace", |p| p.kappa_laplace[2]),
    ("variance_rel_error", |p| p.variance_rel_error),
    ("c1", |p| p.comparator[0]),
    ("c2", |p| p.comparator[1]),
    ("c3", |p| p.comparator[2]),
    ("c4", |p| p.comparator[3]),
    ("c5", |p| p.comparator[4]),
    ("c6", |p| p.comparator[5]),
    ("recenter_distance", |p| p.recenter_distance),
    ("kappa3_exact", |p| p.kappa_exact[0]),
];

/// Runs the sweep, one sample size per task, and fits every quantity in
/// [`SWEEP_QUANTITIES`].
pub fn convergence(cfg: &SweepConfig, exec: Execution) -> Result<ConvergenceReport> {
    cfg.validate()?;
    cfg.model.validate()?;
    let points = parallel::map(exec, &cfg.ns, |&n| sweep_point(cfg, n))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let ns: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
    let slopes = SWEEP_QUANTITIES
        .iter()
        .map(|(name, get)| {
            let ys: Vec<f64> = points.iter().map(get).collect();
            let (slope, std_error, used) = fit_loglog(&ns, &ys);
            SlopeFit {
                quantity: name.to_string(),
                slope,
                std_error,
                points: used,
            }
        })
        .collect();
    Ok(ConvergenceReport {
        config: cfg.clone(),
        points,
        slopes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CumulantRow {
    pub source: CumulantSource,
    pub n: u64,
    pub mean: f64,
    pub sd: f64,
    pub kappa3: f64,
    pub kappa4: f64,
    pub kappa5: f64,
}

pub fn cumulant_row(
    model: &BuiltinModel,
    source: CumulantSource,
    oracle: OracleSource,
    quad_tol: f64,
) -> Result<CumulantRow> {
    let (mean, sd, k) = match source {
        CumulantSource::Exact => {
            let o = posterior_oracle(model, oracle, quad_tol)?;
            (o.mean, o.sd, o.kappa())
        }
        CumulantSource::Laplace => {
            let l = laplace_cumulants(&model.instantiate()?, &LaplaceConfig::default())?;
            (l.mean(), l.sd(), l.kappa)
        }
    };
    Ok(CumulantRow {
        source,
        n: model.n(),
        mean,
        sd,
        kappa3: k[0],
        kappa4: k[1],
        kappa5: k[2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn skewed_model() -> BuiltinModel {
        BuiltinModel::BetaBinomial {
            a: 0.5,
            b: 4.0,
            n: 5,
            x: 2,
        }
    }

    #[test]
    fn grid_parsing() {
        let g: Grid = "-3:3:241".parse().unwrap();
        assert_eq!((g.lo, g.hi, g.points), (-3.0, 3.0, 241));
        let v = g.values();
        assert_eq!(v[0], -3.0);
        assert_eq!(v[120], 0.0);
        assert_eq!(v[240], 3.0);
        assert!("3:-3:10".parse::<Grid>().is_err());
        assert!("0:1:1".parse::<Grid>().is_err());
        assert!("0:1".parse::<Grid>().is_err());
        assert!("a:1:3".parse::<Grid>().is_err());
    }

    #[test]
    fn loglog_fit() {
        let ns = [5.0, 10.0, 20.0, 40.0, 80.0];
        let ys: Vec<f64> = ns.iter().map(|n: &f64| 3.0 * n.powf(-1.5)).collect();
        let (s, se, m) = fit_loglog(&ns, &ys);
        assert_eq!(m, 4);
        assert!((s.unwrap() + 1.5).abs() < 1e-12);
        assert!(se.unwrap() < 1e-12);
        let (s, se, m) = fit_loglog(&ns[..3], &[1.0, 0.0, 0.5]);
        assert_eq!((s, se, m), (None, None, 1));
    }

    #[test]
    fn small_sample_ranking() {
        let mut cfg = CompareConfig::new(skewed_model());
        cfg.grid = Grid::new(0.02, 0.7, 341).unwrap();
        cfg.grid_scale = GridScale::Theta;
        let r = compare(&cfg, Execution::Sequential).unwrap();
        let sup = |m| r.error(m).unwrap().sup;
        assert!(sup(Method::Edgeworth) < sup(Method::Normal));
        assert!(sup(Method::Edgeworth) < sup(Method::MleCentered));
    }

    #[test]
    fn standardized_output_rescales() {
        let cfg = CompareConfig::new(skewed_model());
        let a = compare(&cfg, Execution::Sequential).unwrap();
        let b = compare(
            &CompareConfig {
                standardized_output: true,
                ..cfg
            },
            Execution::Sequential,
        )
        .unwrap();
        let sd = a.posterior_sd;
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert!((rb.exact - sd * ra.exact).abs() < 1e-12);
            assert!((rb.theta - (ra.theta - a.posterior_mean) / sd).abs() < 1e-12);
        }
    }

    #[test]
    fn execution_modes_agree() {
        let cfg = CompareConfig::new(skewed_model());
        let a = compare(&cfg, Execution::Sequential).unwrap();
        let b = compare(&cfg, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sweep_validation() {
        let mut cfg = SweepConfig::new(skewed_model(), vec![10, 10]);
        cfg.ratio = Some(1.5);
        match cfg.validate() {
            Err(Error::Validation(e)) => assert_eq!(e.len(), 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gaussian_cumulants_vanish() {
        let m = BuiltinModel::NormalNormal {
            prior_mean: 0.0,
            prior_var: 1.0,
            noise_var: 1.0,
            n: 10,
            data_mean: 0.3,
        };
        for src in [CumulantSource::Exact, CumulantSource::Laplace] {
            let r = cumulant_row(&m, src, OracleSource::ClosedForm, 1e-10).unwrap();
            assert!(r.kappa3.abs() < 1e-8 && r.kappa4.abs() < 1e-8 && r.kappa5.abs() < 1e-8);
        }
    }
}
