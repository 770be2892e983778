//! Conjugate builtin families with closed-form posteriors.

use std::sync::Arc;

use serde::Serialize;
use statrs::function::beta::ln_beta;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::posterior::{DerivativeProvider, ModelSpec, PosteriorOracle, Support};

/// A builtin family together with its hyperparameters and data summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum BuiltinModel {
    /// `theta ~ Beta(a, b)`, `x` successes in `n` Bernoulli trials.
    BetaBinomial { a: f64, b: f64, n: u64, x: u64 },
    /// `theta ~ N(prior_mean, prior_var)` (flat when `prior_var` is
    /// infinite), `n` observations `N(theta, noise_var)` with mean
    /// `data_mean`.
    NormalNormal {
        prior_mean: f64,
        prior_var: f64,
        noise_var: f64,
        n: u64,
        data_mean: f64,
    },
    /// Rate `lambda ~ Gamma(shape, rate)`, `n` exponential observations with
    /// mean `data_mean`.
    GammaExponential {
        shape: f64,
        rate: f64,
        n: u64,
        data_mean: f64,
    },
}

fn positive(name: &str, v: f64, errs: &mut Vec<String>) {
    if !(v > 0.0 && v.is_finite()) {
        errs.push(format!("{name} must be positive and finite, got {v}"));
    }
}

fn finite(name: &str, v: f64, errs: &mut Vec<String>) {
    if !v.is_finite() {
        errs.push(format!("{name} must be finite, got {v}"));
    }
}

/// `d^j/dt^j [c_lo ln t + c_hi ln(1 - t)]` for `j = 0..=6`.
fn log_pair(c_lo: f64, c_hi: f64, t: f64) -> [f64; 7] {
    // zero coefficients are skipped so that the other factor may leave (0, 1)
    let mut out = [0.0; 7];
    if c_lo != 0.0 {
        out[0] += c_lo * t.ln();
    }
    if c_hi != 0.0 {
        out[0] += c_hi * (1.0 - t).ln();
    }
    let mut fact = 1.0;
    for (j, slot) in out.iter_mut().enumerate().skip(1) {
        if j > 1 {
            fact *= (j - 1) as f64;
        }
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        if c_lo != 0.0 {
            *slot += c_lo * sign * fact / t.powi(j as i32);
        }
        if c_hi != 0.0 {
            *slot -= c_hi * fact / (1.0 - t).powi(j as i32);
        }
    }
    out
}

struct BetaBinomialDerivs {
    a: f64,
    b: f64,
    xbar: f64,
}

impl DerivativeProvider for BetaBinomialDerivs {
    fn avg_loglik(&self, theta: f64) -> [f64; 7] {
        log_pair(self.xbar, 1.0 - self.xbar, theta)
    }

    fn log_prior(&self, theta: f64) -> [f64; 7] {
        let mut d = log_pair(self.a - 1.0, self.b - 1.0, theta);
        d[0] -= ln_beta(self.a, self.b);
        d
    }
}

struct NormalNormalDerivs {
    prior_mean: f64,
    prior_var: f64,
    noise_var: f64,
    data_mean: f64,
}

impl DerivativeProvider for NormalNormalDerivs {
    fn avg_loglik(&self, theta: f64) -> [f64; 7] {
        let r = self.data_mean - theta;
        let mut d = [0.0; 7];
        d[0] = -0.5 * r * r / self.noise_var
            - 0.5 * (2.0 * std::f64::consts::PI * self.noise_var).ln();
        d[1] = r / self.noise_var;
        d[2] = -1.0 / self.noise_var;
        d
    }

    fn log_prior(&self, theta: f64) -> [f64; 7] {
        let mut d = [0.0; 7];
        if self.prior_var.is_finite() {
            let r = theta - self.prior_mean;
            d[0] = -0.5 * r * r / self.prior_var
                - 0.5 * (2.0 * std::f64::consts::PI * self.prior_var).ln();
            d[1] = -r / self.prior_var;
            d[2] = -1.0 / self.prior_var;
        }
        d
    }
}

struct GammaExponentialDerivs {
    shape: f64,
    rate: f64,
    data_mean: f64,
}

/// `d^j/dt^j [c ln t]` for `j = 0..=6`.
fn log_single(c: f64, t: f64) -> [f64; 7] {
    log_pair(c, 0.0, t)
}

impl DerivativeProvider for GammaExponentialDerivs {
    fn avg_loglik(&self, lambda: f64) -> [f64; 7] {
        let mut d = log_single(1.0, lambda);
        d[0] -= lambda * self.data_mean;
        d[1] -= self.data_mean;
        d
    }

    fn log_prior(&self, lambda: f64) -> [f64; 7] {
        let mut d = log_single(self.shape - 1.0, lambda);
        d[0] += -self.rate * lambda + self.shape * self.rate.ln() - ln_gamma(self.shape);
        d[1] -= self.rate;
        d
    }
}

impl BuiltinModel {
    pub fn name(&self) -> &'static str {
        match self {
            BuiltinModel::BetaBinomial { .. } => "beta-binomial",
            BuiltinModel::NormalNormal { .. } => "normal-normal",
            BuiltinModel::GammaExponential { .. } => "gamma-exponential",
        }
    }

    pub fn n(&self) -> u64 {
        match *self {
            BuiltinModel::BetaBinomial { n, .. }
            | BuiltinModel::NormalNormal { n, .. }
            | BuiltinModel::GammaExponential { n, .. } => n,
        }
    }

    /// Checks the hyperparameters, listing every violation.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        match *self {
            BuiltinModel::BetaBinomial { a, b, n, x } => {
                positive("a", a, &mut errs);
                positive("b", b, &mut errs);
                if x > n {
                    errs.push(format!("x = {x} exceeds n = {n}"));
                }
            }
            BuiltinModel::NormalNormal {
                prior_mean,
                prior_var,
                noise_var,
                n,
                data_mean,
            } => {
                finite("prior mean", prior_mean, &mut errs);
                if !(prior_var > 0.0) {
                    errs.push(format!("prior variance must be positive, got {prior_var}"));
                }
                positive("noise variance", noise_var, &mut errs);
                finite("data mean", data_mean, &mut errs);
                if prior_var.is_infinite() && n == 0 {
                    errs.push("a flat prior needs at least one observation".into());
                }
            }
            BuiltinModel::GammaExponential {
                shape,
                rate,
                data_mean,
                ..
            } => {
                positive("shape", shape, &mut errs);
                positive("rate", rate, &mut errs);
                if !(data_mean >= 0.0 && data_mean.is_finite()) {
                    errs.push(format!(
                        "data mean must be non-negative and finite, got {data_mean}"
                    ));
                }
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    /// The same family with sample size `n`. For the beta-binomial the
    /// success count becomes `round(ratio * n)`, with `ratio` defaulting to
    /// the current `x / n`; the other families keep their data mean.
    pub fn with_sample_size(&self, n: u64, ratio: Option<f64>) -> BuiltinModel {
        match *self {
            BuiltinModel::BetaBinomial { a, b, n: n0, x } => {
                let r = ratio.unwrap_or(if n0 == 0 { 0.0 } else { x as f64 / n0 as f64 });
                let x = ((r * n as f64).round().max(0.0) as u64).min(n);
                BuiltinModel::BetaBinomial { a, b, n, x }
            }
            BuiltinModel::NormalNormal {
                prior_mean,
                prior_var,
                noise_var,
                data_mean,
                ..
            } => BuiltinModel::NormalNormal {
                prior_mean,
                prior_var,
                noise_var,
                n,
                data_mean,
            },
            BuiltinModel::GammaExponential {
                shape,
                rate,
                data_mean,
                ..
            } => BuiltinModel::GammaExponential {
                shape,
                rate,
                n,
                data_mean,
            },
        }
    }

    /// A [`ModelSpec`] with analytic derivatives. Observations are
    /// synthesized from the data summary; for the normal and exponential
    /// families every observation equals the data mean, which reproduces the
    /// likelihood up to a factor free of the parameter.
    pub fn instantiate(&self) -> Result<ModelSpec> {
        self.validate()?;
        let spec = match *self {
            BuiltinModel::BetaBinomial { a, b, n, x } => {
                let data = (0..n).map(|i| if i < x { 1.0 } else { 0.0 }).collect();
                let lnb = ln_beta(a, b);
                let xbar = if n == 0 { 0.0 } else { x as f64 / n as f64 };
                ModelSpec::new(
                    Arc::new(move |t: f64| (a - 1.0) * t.ln() + (b - 1.0) * (1.0 - t).ln() - lnb),
                    Arc::new(|t: f64, y: f64| {
                        if y == 1.0 {
                            t.ln()
                        } else if y == 0.0 {
                            (1.0 - t).ln()
                        } else {
                            y * t.ln() + (1.0 - y) * (1.0 - t).ln()
                        }
                    }),
                    data,
                    Support::unit(),
                )
                .with_derivatives(Arc::new(BetaBinomialDerivs { a, b, xbar }))
            }
            BuiltinModel::NormalNormal {
                prior_mean,
                prior_var,
                noise_var,
                n,
                data_mean,
            } => {
                let provider = NormalNormalDerivs {
                    prior_mean,
                    prior_var,
                    noise_var,
                    data_mean,
                };
                ModelSpec::new(
                    Arc::new(move |t: f64| {
                        if prior_var.is_finite() {
                            let r = t - prior_mean;
                            -0.5 * r * r / prior_var
                                - 0.5 * (2.0 * std::f64::consts::PI * prior_var).ln()
                        } else {
                            0.0
                        }
                    }),
                    Arc::new(move |t: f64, y: f64| {
                        -0.5 * (y - t) * (y - t) / noise_var
                            - 0.5 * (2.0 * std::f64::consts::PI * noise_var).ln()
                    }),
                    vec![data_mean; n as usize],
                    Support::real_line(),
                )
                .with_derivatives(Arc::new(provider))
            }
            BuiltinModel::GammaExponential {
                shape,
                rate,
                n,
                data_mean,
            } => {
                let lnorm = shape * rate.ln() - ln_gamma(shape);
                ModelSpec::new(
                    Arc::new(move |l: f64| (shape - 1.0) * l.ln() - rate * l + lnorm),
                    Arc::new(|l: f64, y: f64| l.ln() - l * y),
                    vec![data_mean; n as usize],
                    Support::positive(),
                )
                .with_derivatives(Arc::new(GammaExponentialDerivs {
                    shape,
                    rate,
                    data_mean,
                }))
            }
        };
        Ok(spec)
    }

    /// Parameters of the conjugate posterior in its own family: Beta
    /// `(alpha, beta)`, Normal `(mean, variance)` or Gamma `(shape, rate)`.
    pub fn posterior_parameters(&self) -> Result<(f64, f64)> {
        self.validate()?;
        Ok(match *self {
            BuiltinModel::BetaBinomial { a, b, n, x } => (a + x as f64, b + (n - x) as f64),
            BuiltinModel::NormalNormal {
                prior_mean,
                prior_var,
                noise_var,
                n,
                data_mean,
            } => {
                let n = n as f64;
                let (prior_prec, prior_term) = if prior_var.is_finite() {
                    (1.0 / prior_var, prior_mean / prior_var)
                } else {
                    (0.0, 0.0)
                };
                let prec = prior_prec + n / noise_var;
                ((prior_term + n * data_mean / noise_var) / prec, 1.0 / prec)
            }
            BuiltinModel::GammaExponential {
                shape,
                rate,
                n,
                data_mean,
            } => (shape + n as f64, rate + n as f64 * data_mean),
        })
    }

    /// Closed-form conjugate posterior.
    pub fn exact_posterior(&self) -> Result<PosteriorOracle> {
        let (p, q) = self.posterior_parameters()?;
        match self {
            BuiltinModel::BetaBinomial { .. } => PosteriorOracle::closed_form_beta(p, q),
            BuiltinModel::NormalNormal { .. } => PosteriorOracle::closed_form_normal(p, q),
            BuiltinModel::GammaExponential { .. } => PosteriorOracle::closed_form_gamma(p, q),
        }
    }
}
