//! One-parameter posterior models and the exact posterior oracle.
//!
//! The quadrature oracle works on an unbounded variable `u` mapped onto the
//! support (logistic map for bounded intervals, exponential for half lines,
//! `sinh` for the real line). After the Jacobian is absorbed the integrand
//! is smooth at the support ends even for kernels like `theta^-0.5`, and the
//! posterior is located by scanning `u` before any integration happens.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use statrs::distribution::{Beta, Continuous, ContinuousCDF, Gamma, Normal};

use crate::error::{Error, Result};
use crate::momentalg::{moments_to_cumulants, CumulantVector, MomentVector};
use crate::numdiff;
use crate::quadrature::{integrate_vec, QuadResult, Tolerance};

/// Open parameter interval `(lo, hi)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::Domain(format!("empty support ({lo}, {hi})")));
        }
        Ok(Self { lo, hi })
    }

    pub fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn positive() -> Self {
        Self {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    pub fn real_line() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, theta: f64) -> bool {
        theta > self.lo && theta < self.hi
    }

    /// Distance from `theta` to the nearer end.
    pub fn distance(&self, theta: f64) -> f64 {
        (theta - self.lo).min(self.hi - theta)
    }

    fn u_range(&self) -> (f64, f64) {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => (-40.0, 40.0),
            (false, false) => (-45.0, 45.0),
            _ => (-60.0, 60.0),
        }
    }

    fn to_theta(self, u: f64) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => {
                let s = 1.0 / (1.0 + (-u).exp());
                self.lo + (self.hi - self.lo) * s
            }
            (true, false) => self.lo + u.exp(),
            (false, true) => self.hi - (-u).exp(),
            (false, false) => u.sinh(),
        }
    }

    fn to_u(self, theta: f64) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => ((theta - self.lo) / (self.hi - theta)).ln(),
            (true, false) => (theta - self.lo).ln(),
            (false, true) => -(self.hi - theta).ln(),
            (false, false) => theta.asinh(),
        }
    }

    fn log_jacobian(&self, u: f64) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => {
                // log s(u) + log s(-u), s the logistic function
                let softplus = |x: f64| {
                    if x > 0.0 {
                        x + (-x).exp().ln_1p()
                    } else {
                        x.exp().ln_1p()
                    }
                };
                (self.hi - self.lo).ln() - softplus(-u) - softplus(u)
            }
            (true, false) => u,
            (false, true) => -u,
            (false, false) => u.cosh().ln(),
        }
    }
}

/// Analytic derivatives for a model: index 0 holds the function value and
/// index `j` the `j`-th derivative.
pub trait DerivativeProvider: Send + Sync {
    /// Average loglikelihood `(1/n) sum_i log f(x_i | theta)` and derivatives.
    fn avg_loglik(&self, theta: f64) -> [f64; 7];
    /// Log prior density and derivatives.
    fn log_prior(&self, theta: f64) -> [f64; 7];
}

pub type LogPriorFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type LogLikTermFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A one-parameter Bayesian model: prior, per-observation loglikelihood,
/// data and support.
#[derive(Clone)]
pub struct ModelSpec {
    log_prior: LogPriorFn,
    log_lik_term: LogLikTermFn,
    data: Arc<Vec<f64>>,
    support: Support,
    derivatives: Option<Arc<dyn DerivativeProvider>>,
}

impl fmt::Debug for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelSpec")
            .field("n_obs", &self.data.len())
            .field("support", &self.support)
            .field("analytic_derivatives", &self.derivatives.is_some())
            .finish()
    }
}

impl ModelSpec {
    pub fn new(
        log_prior: LogPriorFn,
        log_lik_term: LogLikTermFn,
        data: Vec<f64>,
        support: Support,
    ) -> Self {
        Self {
            log_prior,
            log_lik_term,
            data: Arc::new(data),
            support,
            derivatives: None,
        }
    }

    pub fn with_derivatives(mut self, provider: Arc<dyn DerivativeProvider>) -> Self {
        self.derivatives = Some(provider);
        self
    }

    pub fn n_obs(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.derivatives.is_some()
    }

    pub fn log_prior(&self, theta: f64) -> f64 {
        (self.log_prior)(theta)
    }

    /// `sum_i log f(x_i | theta)`.
    pub fn log_lik(&self, theta: f64) -> f64 {
        self.data
            .iter()
            .map(|&x| (self.log_lik_term)(theta, x))
            .sum()
    }

    fn fd_scale(&self, theta: f64) -> (f64, f64) {
        let reach = self.support.distance(theta);
        (reach.min(theta.abs().max(1.0)), reach)
    }

    fn check_point(&self, theta: f64) -> Result<()> {
        if !self.support.contains(theta) {
            return Err(Error::Derivative {
                order: 0,
                point: theta,
            });
        }
        Ok(())
    }

    fn check_values(values: [f64; 7], theta: f64) -> Result<[f64; 7]> {
        match values.iter().position(|v| !v.is_finite()) {
            Some(order) => Err(Error::Derivative {
                order,
                point: theta,
            }),
            None => Ok(values),
        }
    }

    /// Average loglikelihood and its first six derivatives at `theta`,
    /// analytic when a provider is attached and by finite differences
    /// otherwise. With no data the average loglikelihood is taken as zero.
    pub fn avg_loglik_derivatives(&self, theta: f64) -> Result<[f64; 7]> {
        self.check_point(theta)?;
        if self.data.is_empty() {
            return Ok([0.0; 7]);
        }
        let values = match &self.derivatives {
            Some(p) => p.avg_loglik(theta),
            None => {
                let n = self.data.len() as f64;
                let (scale, reach) = self.fd_scale(theta);
                numdiff::derivatives(&|t| self.log_lik(t) / n, theta, scale, reach)
            }
        };
        Self::check_values(values, theta)
    }

    /// Log prior and its first six derivatives at `theta`.
    pub fn log_prior_derivatives(&self, theta: f64) -> Result<[f64; 7]> {
        self.check_point(theta)?;
        let values = match &self.derivatives {
            Some(p) => p.log_prior(theta),
            None => {
                let (scale, reach) = self.fd_scale(theta);
                numdiff::derivatives(&|t| self.log_prior(t), theta, scale, reach)
            }
        };
        Self::check_values(values, theta)
    }
}

/// Log prior plus loglikelihood; negative infinity outside the support.
pub fn log_posterior_unnorm(model: &ModelSpec, theta: f64) -> f64 {
    if !model.support.contains(theta) {
        return f64::NEG_INFINITY;
    }
    let v = model.log_prior(theta) + model.log_lik(theta);
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleSource {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone)]
enum Kernel {
    Beta(Beta),
    Gamma(Gamma),
    Normal(Normal),
    Quadrature(QuadKernel),
}

#[derive(Debug, Clone)]
struct QuadKernel {
    model: ModelSpec,
    log_peak: f64,
    mass: f64,
    u_lo: f64,
    tol: f64,
}

impl QuadKernel {
    fn log_integrand(&self, u: f64) -> f64 {
        let s = self.model.support;
        let theta = s.to_theta(u);
        let lp = log_posterior_unnorm(&self.model, theta);
        if lp == f64::NEG_INFINITY {
            return lp;
        }
        lp + s.log_jacobian(u) - self.log_peak
    }
}

/// Exact posterior summaries: mean, standard deviation, cumulants and
/// central moments to order 8, plus density and distribution function.
#[derive(Debug, Clone)]
pub struct PosteriorOracle {
    pub source: OracleSource,
    pub mean: f64,
    pub sd: f64,
    pub log_norm_const: f64,
    pub cumulants: CumulantVector,
    /// Moments about the mean.
    pub central_moments: MomentVector,
    pub quad_tolerance: f64,
    kernel: Kernel,
}

impl PosteriorOracle {
    pub(crate) fn closed_form_beta(a: f64, b: f64) -> Result<Self> {
        let s = a + b;
        let m = a / s;
        // Pearson recurrence for central Beta moments
        let mut mu = vec![1.0, 0.0];
        for r in 1..8 {
            let rf = r as f64;
            let next = rf * (m * (1.0 - m) * mu[r - 1] + (1.0 - 2.0 * m) * mu[r]) / (s + rf);
            mu.push(next);
        }
        let dist = Beta::new(a, b).map_err(|e| Error::Domain(e.to_string()))?;
        let log_norm_const = statrs::function::beta::ln_beta(a, b);
        Self::closed_form(m, mu[1..].to_vec(), log_norm_const, Kernel::Beta(dist))
    }

    pub(crate) fn closed_form_gamma(shape: f64, rate: f64) -> Result<Self> {
        let cumulants: Vec<f64> = (1..=8)
            .map(|j| {
                let fact: f64 = (1..j).map(|i| i as f64).product();
                shape * fact / rate.powi(j)
            })
            .collect();
        let dist = Gamma::new(shape, rate).map_err(|e| Error::Domain(e.to_string()))?;
        let log_norm_const = statrs::function::gamma::ln_gamma(shape) - shape * rate.ln();
        Self::from_cumulants(cumulants, log_norm_const, Kernel::Gamma(dist))
    }

    pub(crate) fn closed_form_normal(mean: f64, variance: f64) -> Result<Self> {
        let mut cumulants = vec![0.0; 8];
        cumulants[0] = mean;
        cumulants[1] = variance;
        let dist = Normal::new(mean, variance.sqrt()).map_err(|e| Error::Domain(e.to_string()))?;
        let log_norm_const = 0.5 * (2.0 * std::f64::consts::PI * variance).ln();
        Self::from_cumulants(cumulants, log_norm_const, Kernel::Normal(dist))
    }

    fn closed_form(
        mean: f64,
        central: Vec<f64>,
        log_norm_const: f64,
        kernel: Kernel,
    ) -> Result<Self> {
        let central_moments = MomentVector::new(mean, central)?;
        let cumulants = moments_to_cumulants(&central_moments)?;
        Ok(Self {
            source: OracleSource::ClosedForm,
            mean,
            sd: central_moments.order(2).sqrt(),
            log_norm_const,
            cumulants,
            central_moments,
            quad_tolerance: f64::EPSILON,
            kernel,
        })
    }

    fn from_cumulants(values: Vec<f64>, log_norm_const: f64, kernel: Kernel) -> Result<Self> {
        let cumulants = CumulantVector::new(values)?;
        let mean = cumulants.mean();
        let central_moments = crate::momentalg::cumulants_to_moments(&cumulants, mean)?;
        Ok(Self {
            source: OracleSource::ClosedForm,
            mean,
            sd: cumulants.variance().sqrt(),
            log_norm_const,
            cumulants,
            central_moments,
            quad_tolerance: f64::EPSILON,
            kernel,
        })
    }

    pub fn variance(&self) -> f64 {
        self.sd * self.sd
    }

    /// Invariant cumulants `kappa_3, kappa_4, kappa_5`.
    pub fn kappa(&self) -> [f64; 3] {
        [3, 4, 5].map(|j| self.cumulants.invariant(j))
    }

    /// Posterior density at `theta`; zero outside the support.
    pub fn density(&self, theta: f64) -> f64 {
        match &self.kernel {
            Kernel::Beta(d) => {
                if theta <= 0.0 || theta >= 1.0 {
                    0.0
                } else {
                    d.pdf(theta)
                }
            }
            Kernel::Gamma(d) => {
                if theta <= 0.0 {
                    0.0
                } else {
                    d.pdf(theta)
                }
            }
            Kernel::Normal(d) => d.pdf(theta),
            Kernel::Quadrature(q) => {
                let lp = log_posterior_unnorm(&q.model, theta);
                (lp - q.log_peak).exp() / q.mass
            }
        }
    }

    /// Posterior distribution function at `theta`.
    pub fn cdf(&self, theta: f64) -> f64 {
        match &self.kernel {
            Kernel::Beta(d) => d.cdf(theta.clamp(0.0, 1.0)),
            Kernel::Gamma(d) => d.cdf(theta.max(0.0)),
            Kernel::Normal(d) => d.cdf(theta),
            Kernel::Quadrature(q) => {
                let s = q.model.support;
                if theta <= s.lo {
                    return 0.0;
                }
                if theta >= s.hi {
                    return 1.0;
                }
                let u = s.to_u(theta);
                if u <= q.u_lo {
                    return 0.0;
                }
                let r = integrate_vec(
                    |x, out: &mut [f64]| out[0] = q.log_integrand(x).exp(),
                    &[q.u_lo, u],
                    1,
                    &[Tolerance {
                        abs: q.tol * q.mass,
                        rel: q.tol,
                        max_intervals: 4000,
                    }],
                );
                (r.value[0] / q.mass).clamp(0.0, 1.0)
            }
        }
    }
}

fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        c
    } else {
        d
    }
}

fn finite_or_neg_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

struct Scan {
    grid: Vec<f64>,
    values: Vec<f64>,
    best: usize,
}

fn scan(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, points: usize) -> Scan {
    let grid: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&u| finite_or_neg_inf(f(u))).collect();
    let best = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > values[best] { i } else { best });
    Scan { grid, values, best }
}

/// Number of peaks in `values`, ignoring wiggles smaller than `tol` and a
/// maximum at the left end.
fn count_peaks(values: &[f64], tol: f64) -> usize {
    let mut peaks = 0;
    let mut dir = 0i8;
    let mut ext = values[0];
    for &v in &values[1..] {
        if dir >= 0 {
            if v > ext {
                ext = v;
                dir = 1;
            } else if v < ext - tol {
                if dir == 1 {
                    peaks += 1;
                }
                dir = -1;
                ext = v;
            }
        } else if v < ext {
            ext = v;
        } else if v > ext + tol {
            dir = 1;
            ext = v;
        }
    }
    peaks
}

/// Distance from `u0` until `f` falls `drop` below `f(u0)`, searching in
/// direction `sign` and never beyond `limit`.
fn drop_distance(f: &dyn Fn(f64) -> f64, u0: f64, sign: f64, drop: f64, limit: f64) -> f64 {
    let target = f(u0) - drop;
    let max_dist = (limit - u0).abs();
    let mut near = 0.0;
    let mut far = 1e-10 * (1.0 + u0.abs());
    while finite_or_neg_inf(f(u0 + sign * far)) > target {
        near = far;
        far *= 2.0;
        if far >= max_dist {
            far = max_dist;
            if finite_or_neg_inf(f(u0 + sign * far)) > target {
                return max_dist;
            }
            break;
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (near + far);
        if finite_or_neg_inf(f(u0 + sign * mid)) > target {
            near = mid;
        } else {
            far = mid;
        }
    }
    0.5 * (near + far)
}

fn achieved(r: &QuadResult, scales: &[f64]) -> f64 {
    r.value
        .iter()
        .zip(&r.error)
        .zip(scales)
        .map(|((v, e), s)| e / v.abs().max(*s))
        .fold(0.0, f64::max)
}

/// Exact posterior summaries by adaptive quadrature.
pub fn build_oracle(model: &ModelSpec, quad_tolerance: f64) -> Result<PosteriorOracle> {
    if !(1e-13..=1e-6).contains(&quad_tolerance) {
        return Err(Error::Domain(format!(
            "quadrature tolerance {quad_tolerance} outside [1e-13, 1e-6]"
        )));
    }
    let support = model.support;
    let (u_min, u_max) = support.u_range();
    let raw = |u: f64| {
        let theta = support.to_theta(u);
        log_posterior_unnorm(model, theta) + support.log_jacobian(u)
    };

    let sc = scan(&raw, u_min, u_max, 4001);
    if sc.values[sc.best] == f64::NEG_INFINITY {
        return Err(Error::Domain(
            "posterior kernel vanishes on the support".into(),
        ));
    }
    let lo = sc.grid[sc.best.saturating_sub(1)];
    let hi = sc.grid[(sc.best + 1).min(sc.grid.len() - 1)];
    let u_star = golden_max(&|u| finite_or_neg_inf(raw(u)), lo, hi);
    let log_peak = raw(u_star);
    let g = |u: f64| finite_or_neg_inf(raw(u) - log_peak);

    let wl = drop_distance(&g, u_star, -1.0, 0.5, u_min);
    let wr = drop_distance(&g, u_star, 1.0, 0.5, u_max);
    let u_lo = u_star - drop_distance(&g, u_star, -1.0, 60.0, u_min);
    let u_hi = u_star + drop_distance(&g, u_star, 1.0, 60.0, u_max);

    let mut breaks = vec![u_lo];
    for k in [-4.0, -2.0, -1.0] {
        breaks.push(u_star + k * wl);
    }
    breaks.push(u_star);
    for k in [1.0, 2.0, 4.0] {
        breaks.push(u_star + k * wr);
    }
    breaks.push(u_hi);
    breaks.retain(|&b| b >= u_lo && b <= u_hi);
    breaks.dedup_by(|a, b| *a <= *b);

    let theta_star = support.to_theta(u_star);
    let theta_scale = 0.5 * (support.to_theta(u_star + wr) - support.to_theta(u_star - wl)).abs();
    let mass_guess = 1.25 * (wl + wr);
    let scale_of = |theta_scale: f64| -> Vec<f64> {
        (0..3).map(|j| mass_guess * theta_scale.powi(j)).collect()
    };

    let first = integrate_vec(
        |u, out: &mut [f64]| {
            let e = g(u).exp();
            let d = support.to_theta(u) - theta_star;
            out[0] = e;
            out[1] = d * e;
            out[2] = d * d * e;
        },
        &breaks,
        3,
        &scale_of(theta_scale)
            .iter()
            .map(|&s| Tolerance {
                abs: quad_tolerance * s,
                rel: quad_tolerance,
                max_intervals: 4000,
            })
            .collect::<Vec<_>>(),
    );
    if !first.converged {
        return Err(Error::OracleFailure {
            achieved: achieved(&first, &scale_of(theta_scale)),
            requested: quad_tolerance,
        });
    }
    let mass = first.value[0];
    let offset = first.value[1] / mass;
    let mean = theta_star + offset;
    let var_guess = first.value[2] / mass - offset * offset;
    let sd_guess = var_guess.sqrt();

    let scales: Vec<f64> = (1..=8).map(|j| mass * sd_guess.powi(j)).collect();
    let tols: Vec<Tolerance> = scales
        .iter()
        .map(|&s| Tolerance {
            abs: quad_tolerance * s,
            rel: quad_tolerance,
            max_intervals: 4000,
        })
        .collect();
    let second = integrate_vec(
        |u, out: &mut [f64]| {
            let e = g(u).exp();
            let d = support.to_theta(u) - mean;
            let mut p = e;
            for slot in out.iter_mut() {
                p *= d;
                *slot = p;
            }
        },
        &breaks,
        8,
        &tols,
    );
    if !second.converged {
        return Err(Error::OracleFailure {
            achieved: achieved(&second, &scales),
            requested: quad_tolerance,
        });
    }
    let about_guess = MomentVector::new(mean, second.value.iter().map(|v| v / mass).collect())?;
    let cumulants = moments_to_cumulants(&about_guess)?;
    let mean = cumulants.mean();
    let mut central = about_guess.shifted(mean).values().to_vec();
    central[0] = 0.0;
    let central_moments = MomentVector::new(mean, central)?;

    Ok(PosteriorOracle {
        source: OracleSource::Quadrature,
        mean,
        sd: central_moments.order(2).sqrt(),
        log_norm_const: log_peak + mass.ln(),
        cumulants,
        central_moments,
        quad_tolerance,
        kernel: Kernel::Quadrature(QuadKernel {
            model: model.clone(),
            log_peak,
            mass,
            u_lo,
            tol: quad_tolerance,
        }),
    })
}

fn loglik_derivatives(model: &ModelSpec, theta: f64) -> Result<[f64; 7]> {
    let n = model.n_obs() as f64;
    Ok(model.avg_loglik_derivatives(theta)?.map(|d| d * n))
}

/// Maximum likelihood estimate: grid scan in the transformed variable,
/// golden-section refinement, then Newton polishing.
pub fn find_mle(model: &ModelSpec) -> Result<f64> {
    if model.n_obs() == 0 {
        return Err(Error::Domain(
            "maximum likelihood needs at least one observation".into(),
        ));
    }
    let support = model.support;
    let (u_min, u_max) = support.u_range();
    let ll = |u: f64| finite_or_neg_inf(model.log_lik(support.to_theta(u)));
    let sc = scan(&ll, u_min, u_max, 2001);
    let top = sc.values[sc.best];
    if top == f64::NEG_INFINITY {
        return Err(Error::Domain("likelihood vanishes on the support".into()));
    }
    // the outermost grid points may round onto the boundary itself
    let first = sc.values.iter().position(|v| v.is_finite()).unwrap_or(0);
    let last = sc.values.iter().rposition(|v| v.is_finite()).unwrap_or(0);
    if sc.values[first] >= top || sc.values[last] >= top {
        return Err(Error::BoundaryMaximum {
            at: support.to_theta(sc.grid[sc.best]),
        });
    }
    let peaks = count_peaks(&sc.values, 1e-9 * (1.0 + top.abs()));
    if peaks > 1 {
        return Err(Error::NonUnimodal { maxima: peaks });
    }
    let (ua, ub) = (sc.grid[sc.best - 1], sc.grid[sc.best + 1]);
    let mut theta = support.to_theta(golden_max(&ll, ua, ub));
    let (ta, tb) = (support.to_theta(ua), support.to_theta(ub));

    for _ in 0..8 {
        let Ok(d) = loglik_derivatives(model, theta) else {
            break;
        };
        if !(d[2] < 0.0) || d[1] == 0.0 {
            break;
        }
        let next = theta - d[1] / d[2];
        if !(next > ta && next < tb) {
            break;
        }
        let Ok(dn) = loglik_derivatives(model, next) else {
            break;
        };
        if dn[1].abs() >= d[1].abs() {
            break;
        }
        theta = next;
    }
    Ok(theta)
}

/// Standard error `(-l''(theta_hat))^{-1/2}` from the observed information.
pub fn observed_info_sd(model: &ModelSpec, theta_hat: f64) -> Result<f64> {
    let d = loglik_derivatives(model, theta_hat)?;
    let curvature = d[2];
    if !(curvature < 0.0) {
        return Err(Error::Curvature {
            value: curvature,
            at: theta_hat,
        });
    }
    Ok((-curvature).powf(-0.5))
}
