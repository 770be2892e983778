//! Gram-Charlier series around the `N(mle, se^2)` baseline.

use serde::Serialize;

use super::{
    check_order, factorial, Centering, CenteringLabel, EdgeworthSeries, SeriesKind, SeriesTerm,
};
use crate::error::Result;
use crate::momentalg::{cumulants_to_moments, CumulantVector};
use crate::posterior::{find_mle, observed_info_sd, ModelSpec, PosteriorOracle};
use crate::HalfOrder;

/// Highest Hermite degree of the comparator.
pub const MAX_COMPARATOR_DEGREE: usize = 6;

/// Coefficient of `He_j` in the comparator, with its asymptotic order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PseudoCoefficient {
    pub degree: usize,
    pub value: f64,
    pub order: HalfOrder,
}

/// Smallest total order of a product of pseudo-cumulants whose orders sum
/// to `j`: the first pseudo-cumulant is `O(n^{-1/2})`, the second
/// `O(n^{-1})` and the `r`-th `O(n^{-(r-2)/2})` for `r >= 3`.
fn degree_order(j: usize) -> u32 {
    let weight = |r: usize| match r {
        1 => 1,
        2 => 2,
        r => r as u32 - 2,
    };
    let mut best = vec![0u32; j + 1];
    for s in 1..=j {
        best[s] = (1..=s).map(|r| best[s - r] + weight(r)).min().unwrap_or(0);
    }
    best[j]
}

struct Baseline {
    mle: f64,
    se: f64,
    pseudo_cumulants: Vec<f64>,
    coefficients: Vec<PseudoCoefficient>,
}

fn baseline(model: &ModelSpec, oracle: &PosteriorOracle) -> Result<Baseline> {
    let mle = find_mle(model)?;
    let se = observed_info_sd(model, mle)?;
    let mut d = vec![
        (oracle.mean - mle) / se,
        oracle.variance() / (se * se) - 1.0,
    ];
    for j in 3..=MAX_COMPARATOR_DEGREE {
        d.push(oracle.cumulants.order(j) / se.powi(j as i32));
    }
    let pseudo_moments = cumulants_to_moments(&CumulantVector::new(d.clone())?, 0.0)?;
    let coefficients = (1..=MAX_COMPARATOR_DEGREE)
        .map(|j| PseudoCoefficient {
            degree: j,
            value: pseudo_moments.order(j) / factorial(j),
            order: HalfOrder(degree_order(j)),
        })
        .collect();
    Ok(Baseline {
        mle,
        se,
        pseudo_cumulants: d,
        coefficients,
    })
}

/// All comparator coefficients on `He_1..He_6` before truncation.
pub fn mle_pseudo_coefficients(
    model: &ModelSpec,
    oracle: &PosteriorOracle,
) -> Result<Vec<PseudoCoefficient>> {
    Ok(baseline(model, oracle)?.coefficients)
}

/// Gram-Charlier density series in `(theta - mle) / se`, keeping the
/// Hermite degrees whose coefficients are of smaller order than
/// `n^{-order_k/2}`.
///
/// The pseudo-cumulants are the oracle cumulants of the standardized
/// variable minus those of the standard normal; the coefficient of `He_j`
/// is the matching pseudo-moment over `j!`. Because the baseline mean and
/// variance differ from the posterior ones, degree-1 and degree-2 terms
/// survive.
pub fn build_mle_centered(
    model: &ModelSpec,
    oracle: &PosteriorOracle,
    order_k: usize,
) -> Result<EdgeworthSeries> {
    check_order(order_k)?;
    let b = baseline(model, oracle)?;
    let terms = b
        .coefficients
        .iter()
        .filter(|c| (c.order.0 as usize) < order_k)
        .map(|c| SeriesTerm {
            hermite_degree: c.degree,
            coefficient: c.value,
            order: c.order,
            product: Vec::new(),
        })
        .collect();
    Ok(EdgeworthSeries {
        kind: SeriesKind::Density,
        order_k,
        terms,
        centering: Centering {
            center: b.mle,
            scale: b.se,
            label: CenteringLabel::Mle,
        },
        cumulants_used: b.pseudo_cumulants,
    })
}
