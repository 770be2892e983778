//! Edgeworth series for the standardized posterior, the MLE-centered
//! Gram-Charlier comparator and its recentering.
//!
//! A density series is `phi(x) (1 + sum_t c_t He_{d_t}(x))` and a
//! distribution series is `Phi(x) + phi(x) sum_t c_t He_{d_t}(x)`, with `x`
//! the standardized parameter `(theta - center) / scale`.

mod comparator;
mod recenter;

use std::collections::BTreeMap;

use serde::Serialize;

pub use comparator::{build_mle_centered, mle_pseudo_coefficients, PseudoCoefficient};
pub use recenter::recenter;

use crate::error::{Error, Result};
use crate::specialfn::{hermite_fill, normal_cdf, normal_pdf};
use crate::HalfOrder;

pub const MIN_SERIES_ORDER: usize = 2;
pub const MAX_SERIES_ORDER: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    Density,
    Cdf,
}

impl SeriesKind {
    fn name(self) -> &'static str {
        match self {
            SeriesKind::Density => "density",
            SeriesKind::Cdf => "cdf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CenteringLabel {
    PosteriorMean,
    Mle,
    Recentered,
}

/// Affine map from `theta` to the series variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Centering {
    pub center: f64,
    pub scale: f64,
    pub label: CenteringLabel,
}

impl Centering {
    pub fn standardize(&self, theta: f64) -> f64 {
        (theta - self.center) / self.scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesTerm {
    pub hermite_degree: usize,
    pub coefficient: f64,
    /// The term is `O(n^{-m/2})`.
    pub order: HalfOrder,
    /// Cumulant orders whose product generates the term, with repetition;
    /// empty for terms not built from invariant cumulants.
    pub product: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeworthSeries {
    pub kind: SeriesKind,
    pub order_k: usize,
    pub terms: Vec<SeriesTerm>,
    pub centering: Centering,
    /// The cumulants the terms were built from: `kappa_3..kappa_5` for
    /// posterior-mean series, pseudo-cumulants of orders 1..=6 for the
    /// MLE-centered comparator.
    pub cumulants_used: Vec<f64>,
}

fn check_order(order_k: usize) -> Result<()> {
    if !(MIN_SERIES_ORDER..=MAX_SERIES_ORDER).contains(&order_k) {
        return Err(Error::UnsupportedOrder {
            what: "Edgeworth series",
            order: order_k,
            max: MAX_SERIES_ORDER,
        });
    }
    Ok(())
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Edgeworth series from invariant cumulants `kappa = [k3, k4, k5]`.
///
/// Every multiset of cumulant orders `r_1..r_m` from `{3, 4, 5}` with
/// `sum (r_i - 2) < order_k` contributes `prod (k_r / r!)^{m_r} / m_r!` on
/// `He_{sum r_i}`. Distribution series lower each degree by one and flip
/// the sign. The series is centered at the posterior mean in standardized
/// units; see [`EdgeworthSeries::with_centering`].
pub fn build_series(kappa: [f64; 3], order_k: usize, kind: SeriesKind) -> Result<EdgeworthSeries> {
    check_order(order_k)?;
    if kappa.iter().any(|k| !k.is_finite()) {
        return Err(Error::Domain(format!("non-finite cumulants {kappa:?}")));
    }
    let mut terms = Vec::new();
    for m3 in 0..order_k {
        for m4 in 0..=(order_k / 2) {
            for m5 in 0..=(order_k / 3) {
                let order = m3 + 2 * m4 + 3 * m5;
                if order == 0 || order >= order_k {
                    continue;
                }
                let mut coefficient = 1.0;
                let mut product = Vec::new();
                for (r, m) in [(3, m3), (4, m4), (5, m5)] {
                    coefficient *= (kappa[r - 3] / factorial(r)).powi(m as i32) / factorial(m);
                    product.extend(std::iter::repeat_n(r, m));
                }
                if coefficient == 0.0 {
                    continue;
                }
                terms.push(SeriesTerm {
                    hermite_degree: 3 * m3 + 4 * m4 + 5 * m5,
                    coefficient,
                    order: HalfOrder(order as u32),
                    product,
                });
            }
        }
    }
    terms.sort_by_key(|t| (t.order, t.hermite_degree));
    let density = EdgeworthSeries {
        kind: SeriesKind::Density,
        order_k,
        terms,
        centering: Centering {
            center: 0.0,
            scale: 1.0,
            label: CenteringLabel::PosteriorMean,
        },
        cumulants_used: kappa.to_vec(),
    };
    Ok(match kind {
        SeriesKind::Density => density,
        SeriesKind::Cdf => density.to_cdf()?,
    })
}

fn hermite_sum(terms: &[SeriesTerm], x: f64) -> f64 {
    let top = terms.iter().map(|t| t.hermite_degree).max().unwrap_or(0);
    let mut stack = [0.0; 32];
    let mut heap;
    let he: &mut [f64] = if top < stack.len() {
        &mut stack[..=top]
    } else {
        heap = vec![0.0; top + 1];
        &mut heap
    };
    hermite_fill(x, he);
    terms
        .iter()
        .map(|t| t.coefficient * he[t.hermite_degree])
        .sum()
}

fn expect_kind(s: &EdgeworthSeries, kind: SeriesKind) -> Result<()> {
    if s.kind != kind {
        return Err(Error::KindMismatch {
            expected: kind.name(),
            got: s.kind.name(),
        });
    }
    Ok(())
}

/// `phi(x) (1 + sum)`; may be negative in the tails.
pub fn eval_density(s: &EdgeworthSeries, x: f64) -> Result<f64> {
    expect_kind(s, SeriesKind::Density)?;
    Ok(normal_pdf(x) * (1.0 + hermite_sum(&s.terms, x)))
}

/// `Phi(x) + phi(x) sum`, unclamped.
pub fn eval_cdf(s: &EdgeworthSeries, x: f64) -> Result<f64> {
    expect_kind(s, SeriesKind::Cdf)?;
    Ok(normal_cdf(x) + normal_pdf(x) * hermite_sum(&s.terms, x))
}

/// Sign changes of an expansion's density on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NegativityDiagnostic {
    pub leftmost_sign_change: Option<f64>,
    pub rightmost_sign_change: Option<f64>,
    pub min_value: f64,
}

impl EdgeworthSeries {
    pub fn with_centering(mut self, centering: Centering) -> Self {
        self.centering = centering;
        self
    }

    /// Value at the standardized point `x`, whatever the kind.
    pub fn eval(&self, x: f64) -> f64 {
        match self.kind {
            SeriesKind::Density => normal_pdf(x) * (1.0 + hermite_sum(&self.terms, x)),
            SeriesKind::Cdf => normal_cdf(x) + normal_pdf(x) * hermite_sum(&self.terms, x),
        }
    }

    /// Value on the `theta` scale: densities carry the `1/scale` Jacobian.
    pub fn eval_theta(&self, theta: f64) -> f64 {
        let x = self.centering.standardize(theta);
        match self.kind {
            SeriesKind::Density => self.eval(x) / self.centering.scale,
            SeriesKind::Cdf => self.eval(x),
        }
    }

    /// The matching distribution series, using
    /// `d/dx [phi He_{j-1}] = -phi He_j`.
    pub fn to_cdf(&self) -> Result<EdgeworthSeries> {
        expect_kind(self, SeriesKind::Density)?;
        let terms = self
            .terms
            .iter()
            .map(|t| SeriesTerm {
                hermite_degree: t.hermite_degree - 1,
                coefficient: -t.coefficient,
                order: t.order,
                product: t.product.clone(),
            })
            .collect();
        Ok(EdgeworthSeries {
            kind: SeriesKind::Cdf,
            terms,
            ..self.clone()
        })
    }

    /// Total coefficient on each Hermite degree.
    pub fn coefficients_by_degree(&self) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for t in &self.terms {
            *out.entry(t.hermite_degree).or_insert(0.0) += t.coefficient;
        }
        out
    }

    /// Where a density series changes sign on `points` standardized grid
    /// points spanning `[lo, hi]`.
    pub fn negativity(&self, lo: f64, hi: f64, points: usize) -> Result<NegativityDiagnostic> {
        expect_kind(self, SeriesKind::Density)?;
        let mut left = None;
        let mut right = None;
        let mut min_value = f64::INFINITY;
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..points.max(2) {
            let x = lo + (hi - lo) * i as f64 / (points.max(2) - 1) as f64;
            let v = 1.0 + hermite_sum(&self.terms, x);
            min_value = min_value.min(normal_pdf(x) * v);
            if let Some((px, pv)) = prev {
                if (pv < 0.0) != (v < 0.0) {
                    let at = 0.5 * (px + x);
                    left.get_or_insert(at);
                    right = Some(at);
                }
            }
            prev = Some((x, v));
        }
        Ok(NegativityDiagnostic {
            leftmost_sign_change: left,
            rightmost_sign_change: right,
            min_value,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::normal_pdf;

    #[test]
    fn gaussian_series_is_empty() {
        for k in 2..=5 {
            let s = build_series([0.0; 3], k, SeriesKind::Density).unwrap();
            assert!(s.terms.is_empty());
            assert_eq!(eval_density(&s, 0.0).unwrap(), normal_pdf(0.0));
            let c = build_series([0.0; 3], k, SeriesKind::Cdf).unwrap();
            assert_eq!(eval_cdf(&c, 0.7).unwrap(), normal_cdf(0.7));
        }
    }

    #[test]
    fn order_three_terms() {
        let (k3, k4) = (0.4, 0.3);
        let s = build_series([k3, k4, 0.2], 3, SeriesKind::Density).unwrap();
        let want = [(3, k3 / 6.0, 1), (4, k4 / 24.0, 2), (6, k3 * k3 / 72.0, 2)];
        assert_eq!(s.terms.len(), 3);
        for (t, (d, c, o)) in s.terms.iter().zip(want) {
            assert_eq!((t.hermite_degree, t.order.0), (d, o));
            assert!((t.coefficient - c).abs() < 1e-15 * c);
        }
        let at0 = eval_density(&s, 0.0).unwrap();
        let want = normal_pdf(0.0) * (1.0 + 3.0 * k4 / 24.0 - 15.0 * k3 * k3 / 72.0);
        assert!((at0 - want).abs() < 1e-16);
    }

    #[test]
    fn order_two_single_term() {
        let s = build_series([0.4, 0.3, 0.2], 2, SeriesKind::Density).unwrap();
        assert_eq!(s.terms.len(), 1);
        assert_eq!(s.terms[0].hermite_degree, 3);
        let c = build_series([0.4, 0.3, 0.2], 2, SeriesKind::Cdf).unwrap();
        let want = 0.5 + normal_pdf(0.0) * 0.4 / 6.0;
        assert!((eval_cdf(&c, 0.0).unwrap() - want).abs() < 1e-16);
        assert!((eval_cdf(&c, 10.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn order_five_products() {
        let s = build_series([0.4, 0.3, 0.2], 5, SeriesKind::Density).unwrap();
        let products: Vec<Vec<usize>> = s.terms.iter().map(|t| t.product.clone()).collect();
        assert_eq!(
            products,
            vec![
                vec![3],
                vec![4],
                vec![3, 3],
                vec![5],
                vec![3, 4],
                vec![3, 3, 3],
                vec![4, 4],
                vec![3, 5],
                vec![3, 3, 4],
                vec![3, 3, 3, 3],
            ]
        );
        for t in &s.terms {
            let sum: usize = t.product.iter().map(|r| r - 2).sum();
            assert_eq!(t.order.0 as usize, sum);
            assert!(sum < 5);
        }
        let t = s
            .terms
            .iter()
            .find(|t| t.product == vec![3, 3, 3, 3])
            .unwrap();
        assert!((t.coefficient - 0.4f64.powi(4) / (6f64.powi(4) * 24.0)).abs() < 1e-18);
    }

    #[test]
    fn kind_checks() {
        let s = build_series([0.1, 0.0, 0.0], 3, SeriesKind::Density).unwrap();
        assert!(matches!(eval_cdf(&s, 0.0), Err(Error::KindMismatch { .. })));
        let c = s.to_cdf().unwrap();
        assert!(eval_density(&c, 0.0).is_err());
        assert!(c.to_cdf().is_err());
        assert!(build_series([0.1, 0.0, 0.0], 6, SeriesKind::Density).is_err());
        assert!(build_series([0.1, 0.0, 0.0], 1, SeriesKind::Density).is_err());
    }

    #[test]
    fn theta_scale_jacobian() {
        let s = build_series([0.5, 0.1, 0.0], 3, SeriesKind::Density)
            .unwrap()
            .with_centering(Centering {
                center: 2.0,
                scale: 0.5,
                label: CenteringLabel::PosteriorMean,
            });
        assert!((s.eval_theta(2.25) - 2.0 * s.eval(0.5)).abs() < 1e-15);
    }

    #[test]
    fn negativity_reports_tails() {
        let s = build_series([1.5, 0.0, 0.0], 3, SeriesKind::Density).unwrap();
        let d = s.negativity(-6.0, 6.0, 1201).unwrap();
        assert!(d.min_value < 0.0);
        assert!(d.leftmost_sign_change.unwrap() < 0.0);
    }
}
