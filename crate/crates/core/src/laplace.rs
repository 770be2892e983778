//! Extended Laplace approximation of posterior moments and cumulants.
//!
//! Sign convention: with `t = theta - center`, the log posterior is
//! `const + sum_j p_j t^j / j!` where `p_j = -h_j - n g_j`, `g_j` the
//! negated `j`-th derivative of the average loglikelihood and `h_j` the
//! negated `j`-th derivative of the log prior. So `p_j` is the `j`-th
//! derivative of the log posterior and `p_2 < 0`. The Gaussian factor is
//! `exp(p_2 t^2 / 2)` and the correction polynomial `omega` truncates
//! `exp(p_1 t + sum_{j>=3} p_j t^j / j!)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::momentalg::{
    gaussian_poly_integral, moments_to_cumulants, CumulantVector, MomentVector,
};
use crate::posterior::{find_mle, ModelSpec};
use crate::HalfOrder;

/// Taylor data of the log posterior at `center`. Index `j` of each array
/// holds the order-`j` coefficient; index 0 is the value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalExpansion {
    pub center: f64,
    pub g: [f64; 7],
    pub h: [f64; 7],
    pub p: [f64; 7],
    pub n_obs: usize,
}

impl LocalExpansion {
    pub fn from_parts(center: f64, g: [f64; 7], h: [f64; 7], n_obs: usize) -> Self {
        let n = n_obs as f64;
        let p = std::array::from_fn(|j| -h[j] - n * g[j]);
        Self {
            center,
            g,
            h,
            p,
            n_obs,
        }
    }

    /// Whether `p` satisfies its defining relation exactly.
    pub fn is_consistent(&self) -> bool {
        let n = self.n_obs as f64;
        (0..7).all(|j| self.p[j] == -self.h[j] - n * self.g[j])
    }

    /// `-1 / p_2`, the variance of the Gaussian factor.
    pub fn gaussian_variance(&self) -> Result<f64> {
        if !(self.p[2] < 0.0) {
            return Err(Error::Curvature {
                value: self.p[2],
                at: self.center,
            });
        }
        Ok(-1.0 / self.p[2])
    }

    /// True when every coefficient of order three and above is negligible
    /// on the scale of the Gaussian factor.
    pub fn is_gaussian(&self) -> bool {
        let Ok(v) = self.gaussian_variance() else {
            return false;
        };
        (3..7).all(|j| (self.p[j] * v.powf(j as f64 / 2.0)).abs() <= 1e-14)
    }
}

pub fn expand_local(model: &ModelSpec, center: f64) -> Result<LocalExpansion> {
    let g = model.avg_loglik_derivatives(center)?.map(|d| -d);
    let h = model.log_prior_derivatives(center)?.map(|d| -d);
    Ok(LocalExpansion::from_parts(center, g, h, model.n_obs()))
}

/// How the exponential series defining `omega` is cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "k")]
pub enum OmegaTruncation {
    /// Keep powers of `t` up to `k`.
    Degree(usize),
    /// Keep terms of asymptotic order up to `n^{-k/2}`: `p_1 t` counts as
    /// order one and `p_j t^j` as order `j - 2`.
    Order(usize),
}

impl Default for OmegaTruncation {
    fn default() -> Self {
        OmegaTruncation::Order(3)
    }
}

/// Largest `k` accepted by [`OmegaTruncation::Order`]; beyond it the moment
/// integrands exceed the Gaussian integral degree cap.
pub const MAX_OMEGA_ORDER: usize = 4;
pub const MAX_OMEGA_DEGREE: usize = 14;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `omega` truncated at degree `k` in `t`, ascending coefficients.
pub fn omega_poly(le: &LocalExpansion, k: usize) -> Result<Vec<f64>> {
    if k > MAX_OMEGA_DEGREE {
        return Err(Error::UnsupportedOrder {
            what: "omega degree",
            order: k,
            max: MAX_OMEGA_DEGREE,
        });
    }
    let mut e = vec![0.0; k + 1];
    if k >= 1 {
        e[1] = le.p[1];
    }
    for j in 3..=k.min(6) {
        e[j] = le.p[j] / factorial(j);
    }
    // w = exp(E): m w_m = sum_i i e_i w_{m-i}
    let mut w = vec![0.0; k + 1];
    w[0] = 1.0;
    for m in 1..=k {
        w[m] = (1..=m).map(|i| i as f64 * e[i] * w[m - i]).sum::<f64>() / m as f64;
    }
    Ok(w)
}

/// `omega` truncated by asymptotic order, ascending coefficients in `t`.
pub fn omega_poly_by_order(le: &LocalExpansion, k: usize) -> Result<Vec<f64>> {
    if k > MAX_OMEGA_ORDER {
        return Err(Error::UnsupportedOrder {
            what: "omega order",
            order: k,
            max: MAX_OMEGA_ORDER,
        });
    }
    // (degree, coefficient, order)
    let mut parts = vec![(1, le.p[1], 1)];
    for j in 3..=(k + 2).min(6) {
        parts.push((j, le.p[j] / factorial(j), j - 2));
    }
    let max_degree: usize = parts.iter().map(|&(d, _, o)| d * (k / o)).sum();
    let mut w = vec![0.0; max_degree + 1];

    fn rec(parts: &[(usize, f64, usize)], budget: usize, degree: usize, coef: f64, w: &mut [f64]) {
        let Some((&(d, c, o), rest)) = parts.split_first() else {
            w[degree] += coef;
            return;
        };
        let mut power = 0;
        let mut term = coef;
        loop {
            rec(rest, budget - power * o, degree + power * d, term, w);
            if (power + 1) * o > budget {
                break;
            }
            power += 1;
            term *= c / power as f64;
        }
    }
    rec(&parts, k, 0, 1.0, &mut w);
    while w.len() > 1 && w[w.len() - 1] == 0.0 {
        w.pop();
    }
    Ok(w)
}

fn omega(le: &LocalExpansion, truncation: OmegaTruncation) -> Result<Vec<f64>> {
    match truncation {
        OmegaTruncation::Degree(k) => omega_poly(le, k),
        OmegaTruncation::Order(k) => omega_poly_by_order(le, k),
    }
}

/// Normalized extended-Laplace moments of orders 1..=6 about the center.
pub fn laplace_moments(le: &LocalExpansion, truncation: OmegaTruncation) -> Result<MomentVector> {
    let v = le.gaussian_variance()?;
    let w = omega(le, truncation)?;
    let raw: Vec<f64> = (0..=6)
        .map(|j| gaussian_poly_integral(&w, 0.0, v, j))
        .collect::<Result<_>>()?;
    if !(raw[0] > 0.0) {
        return Err(Error::Expansion(format!(
            "omega integrates to {} against the Gaussian factor",
            raw[0]
        )));
    }
    MomentVector::new(le.center, raw[1..].iter().map(|m| m / raw[0]).collect())
}

/// How the expansion point is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CenteringMode {
    /// Start at the MLE and move the center to the Laplace mean until it
    /// stops moving.
    FixedPoint,
    /// Expand at the given point, typically the exact posterior mean.
    At(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceConfig {
    pub truncation: OmegaTruncation,
    pub centering: CenteringMode,
    pub max_iterations: usize,
    /// Stopping threshold on the center update, in units of the Laplace sd.
    pub tolerance: f64,
}

impl Default for LaplaceConfig {
    fn default() -> Self {
        Self {
            truncation: OmegaTruncation::default(),
            centering: CenteringMode::FixedPoint,
            max_iterations: 10,
            tolerance: 1e-3,
        }
    }
}

/// Claimed asymptotic size of an invariant cumulant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrderCertificate {
    pub cumulant: usize,
    pub order: HalfOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaplaceCumulants {
    pub center: f64,
    /// Cumulants of `theta`, orders 1..=6.
    pub beta: CumulantVector,
    /// `kappa_3, kappa_4, kappa_5`.
    pub kappa: [f64; 3],
    pub certificates: Vec<OrderCertificate>,
    /// Centers visited, starting point first.
    pub trace: Vec<f64>,
}

impl LaplaceCumulants {
    pub fn mean(&self) -> f64 {
        self.beta.mean()
    }

    pub fn sd(&self) -> f64 {
        self.beta.variance().sqrt()
    }
}

/// Laplace cumulants with the expansion at `center`.
pub fn cumulants_at(
    model: &ModelSpec,
    center: f64,
    truncation: OmegaTruncation,
) -> Result<(CumulantVector, LocalExpansion)> {
    let le = expand_local(model, center)?;
    if le.is_gaussian() {
        let v = le.gaussian_variance()?;
        let c = CumulantVector::new(vec![center + le.p[1] * v, v, 0.0, 0.0, 0.0, 0.0])?;
        return Ok((c, le));
    }
    let m = laplace_moments(&le, truncation)?;
    Ok((moments_to_cumulants(&m)?, le))
}

/// Safeguarded fixed-point search for a center equal to its own Laplace
/// mean. Plain updates are taken until the mean offset changes sign, after
/// which the root stays bracketed and regula falsi takes over whenever a
/// plain step would leave the bracket.
fn fixed_point(
    model: &ModelSpec,
    start: f64,
    cfg: &LaplaceConfig,
) -> Result<(f64, CumulantVector, Vec<f64>)> {
    let support = model.support();
    let (mut cum, mut le) = cumulants_at(model, start, cfg.truncation)?;
    let mut c = start;
    let mut f = cum.mean() - c;
    let mut trace = vec![c];
    let mut bracket: Option<((f64, f64), (f64, f64))> = None;
    let mut iterations = 0;
    while f.abs() >= cfg.tolerance * le.gaussian_variance()?.sqrt() {
        if iterations == cfg.max_iterations {
            return Err(Error::Centering { trace });
        }
        iterations += 1;
        let mut next = c + f;
        if let Some(((l, fl), (h, fh))) = bracket {
            if !(next > l.min(h) && next < l.max(h)) {
                next = (l * fh - h * fl) / (fh - fl);
            }
        }
        for _ in 0..60 {
            if support.contains(next) {
                break;
            }
            next = 0.5 * (c + next);
        }
        let (cum_n, le_n) = cumulants_at(model, next, cfg.truncation)?;
        let f_n = cum_n.mean() - next;
        bracket = match bracket {
            None if f * f_n < 0.0 => Some(((c, f), (next, f_n))),
            None => None,
            Some(((l, fl), hi)) => {
                if f_n * fl < 0.0 {
                    Some(((l, fl), (next, f_n)))
                } else {
                    Some(((next, f_n), hi))
                }
            }
        };
        c = next;
        f = f_n;
        cum = cum_n;
        le = le_n;
        trace.push(c);
    }
    Ok((c, cum, trace))
}

pub fn laplace_cumulants(model: &ModelSpec, cfg: &LaplaceConfig) -> Result<LaplaceCumulants> {
    let (center, beta, trace) = match cfg.centering {
        CenteringMode::At(c) => {
            let (beta, _) = cumulants_at(model, c, cfg.truncation)?;
            (c, beta, vec![c])
        }
        CenteringMode::FixedPoint => fixed_point(model, find_mle(model)?, cfg)?,
    };
    if !(beta.variance() > 0.0) {
        return Err(Error::Expansion(format!(
            "non-positive variance {}",
            beta.variance()
        )));
    }
    let kappa = [3, 4, 5].map(|j| beta.invariant(j));
    let certificates = (3..=5)
        .map(|j| OrderCertificate {
            cumulant: j,
            order: HalfOrder(j as u32 - 2),
        })
        .collect();
    Ok(LaplaceCumulants {
        center,
        beta,
        kappa,
        certificates,
        trace,
    })
}
