//! Recentering of the MLE-centered comparator.
//!
//! With `w(z) = phi(z) (1 + sum_j b_j He_j(z))` the comparator density, its
//! mean is `m = b_1` and its variance `v = 1 + 2 b_2 - b_1^2`. Writing
//! `z = s rho + m`, `s = sqrt(v)`, the density of `rho` is
//! `s w(s rho + m) = s phi(rho) exp(A(rho)) (1 + sum_j b_j He_j(s rho + m))`
//! with `A(rho) = -((s^2 - 1) rho^2 + 2 s m rho + m^2) / 2`. Each `b_j`
//! carries a power of `eps = n^{-1/2}`; the product is expanded as a
//! polynomial in `rho` with coefficients truncated in `eps`, and each power
//! of `eps` is re-expressed in the Hermite basis.

use super::{check_order, Centering, CenteringLabel, EdgeworthSeries, SeriesKind, SeriesTerm};
use crate::error::{Error, Result};
use crate::specialfn::hermite_coefficients;
use crate::HalfOrder;

/// Power series in `eps`, truncated below `eps^K` by its length.
#[derive(Debug, Clone, PartialEq)]
struct Series(Vec<f64>);

impl Series {
    fn zero(k: usize) -> Self {
        Series(vec![0.0; k])
    }

    fn constant(k: usize, c: f64) -> Self {
        let mut s = Self::zero(k);
        s.0[0] = c;
        s
    }

    fn monomial(k: usize, power: u32, c: f64) -> Self {
        let mut s = Self::zero(k);
        if (power as usize) < k {
            s.0[power as usize] = c;
        }
        s
    }

    fn add(&self, other: &Series, f: f64) -> Series {
        Series(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + f * b)
                .collect(),
        )
    }

    fn mul(&self, other: &Series) -> Series {
        let k = self.0.len();
        let mut out = Self::zero(k);
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate().take(k - i) {
                out.0[i + j] += a * b;
            }
        }
        out
    }

    fn scale(&self, f: f64) -> Series {
        Series(self.0.iter().map(|a| a * f).collect())
    }
}

/// Polynomial in `rho` with series coefficients.
#[derive(Debug, Clone)]
struct Poly(Vec<Series>);

impl Poly {
    fn constant(s: Series) -> Self {
        Poly(vec![s])
    }

    fn add(&self, other: &Poly, f: f64) -> Poly {
        let k = self.0[0].0.len();
        let len = self.0.len().max(other.0.len());
        let get = |p: &Poly, i: usize| p.0.get(i).cloned().unwrap_or_else(|| Series::zero(k));
        Poly(
            (0..len)
                .map(|i| get(self, i).add(&get(other, i), f))
                .collect(),
        )
    }

    fn mul(&self, other: &Poly) -> Poly {
        let k = self.0[0].0.len();
        let mut out = vec![Series::zero(k); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b), 1.0);
            }
        }
        Poly(out)
    }

    fn scale(&self, s: &Series) -> Poly {
        Poly(self.0.iter().map(|c| c.mul(s)).collect())
    }
}

/// `x^n` in the Hermite basis: `sum_k n! / (k! (n-2k)! 2^k) He_{n-2k}`.
fn monomial_to_hermite(coeffs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.len()];
    for (n, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let mut term = 1.0;
        for k in 0..=n / 2 {
            if k > 0 {
                // ratio of consecutive n! / (k! (n-2k)! 2^k)
                term *= ((n - 2 * k + 2) * (n - 2 * k + 1)) as f64 / (2 * k) as f64;
            }
            out[n - 2 * k] += c * term;
        }
    }
    out
}

/// Re-centers an MLE-centered density series at its own mean and variance,
/// keeping terms of smaller order than `n^{-order_k/2}`. The result has
/// vanishing degree-1 and degree-2 coefficients up to rounding.
pub fn recenter(s: &EdgeworthSeries, order_k: usize) -> Result<EdgeworthSeries> {
    check_order(order_k)?;
    if s.kind != SeriesKind::Density {
        return Err(Error::KindMismatch {
            expected: "density",
            got: "cdf",
        });
    }
    if s.centering.label != CenteringLabel::Mle {
        return Err(Error::Expansion(
            "recentering needs an MLE-centered series".into(),
        ));
    }
    let k = order_k;
    let coef = |deg: usize| -> (f64, u32) {
        s.terms
            .iter()
            .find(|t| t.hermite_degree == deg)
            .map(|t| (t.coefficient, t.order.0))
            .unwrap_or((0.0, 1))
    };
    let (b1, tag1) = coef(1);
    let (b2, tag2) = coef(2);
    let factor = 1.0 + 2.0 * b2 - b1 * b1;
    if !(factor > 0.0) {
        return Err(Error::DegenerateRecentering { factor });
    }

    let m = Series::monomial(k, tag1, b1);
    let u = Series::monomial(k, tag2, 2.0 * b2).add(&m.mul(&m), -1.0);
    // s = sqrt(1 + u) by the binomial series; u has no constant term
    let mut sq = Series::constant(k, 1.0);
    let mut u_pow = Series::constant(k, 1.0);
    let mut binom = 1.0;
    for i in 1..k {
        u_pow = u_pow.mul(&u);
        binom *= (0.5 - (i - 1) as f64) / i as f64;
        sq = sq.add(&u_pow, binom);
    }

    let a = Poly(vec![
        m.mul(&m).scale(-0.5),
        sq.mul(&m).scale(-1.0),
        u.scale(-0.5),
    ]);
    let mut exp_a = Poly::constant(Series::constant(k, 1.0));
    let mut power = exp_a.clone();
    for i in 1..k {
        power = power.mul(&a);
        power = Poly(power.0.iter().map(|c| c.scale(1.0 / i as f64)).collect());
        exp_a = exp_a.add(&power, 1.0);
    }

    let y = Poly(vec![m.clone(), sq.clone()]);
    let mut bracket = Poly::constant(Series::constant(k, 1.0));
    for t in &s.terms {
        let he = hermite_coefficients(t.hermite_degree);
        let mut y_pow = Poly::constant(Series::constant(k, 1.0));
        let mut he_y = Poly::constant(Series::zero(k));
        for (p, &c) in he.iter().enumerate() {
            if p > 0 {
                y_pow = y_pow.mul(&y);
            }
            if c != 0.0 {
                he_y = he_y.add(&y_pow, c);
            }
        }
        bracket = bracket.add(
            &he_y.scale(&Series::monomial(k, t.order.0, t.coefficient)),
            1.0,
        );
    }

    let density = exp_a.mul(&bracket).scale(&sq);
    let degree = density.0.len();
    let mut by_degree = vec![Series::zero(k); degree];
    for e in 0..k {
        let mono: Vec<f64> = density.0.iter().map(|c| c.0[e]).collect();
        for (d, h) in monomial_to_hermite(&mono).into_iter().enumerate() {
            by_degree[d].0[e] += h;
        }
    }
    let terms = by_degree
        .iter()
        .enumerate()
        .skip(1)
        .filter_map(|(d, c)| {
            let first = c.0.iter().position(|&v| v != 0.0)?;
            Some(SeriesTerm {
                hermite_degree: d,
                coefficient: c.0.iter().sum(),
                order: HalfOrder(first as u32),
                product: Vec::new(),
            })
        })
        .collect();

    Ok(EdgeworthSeries {
        kind: SeriesKind::Density,
        order_k,
        terms,
        centering: Centering {
            center: s.centering.center + s.centering.scale * b1,
            scale: s.centering.scale * factor.sqrt(),
            label: CenteringLabel::Recentered,
        },
        cumulants_used: s.cumulants_used.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edgeworth::build_mle_centered;
    use crate::models::BuiltinModel;
    use crate::specialfn::hermite;

    #[test]
    fn hermite_basis_change() {
        for n in 0..=10 {
            let mut mono = vec![0.0; n + 1];
            mono[n] = 1.0;
            let h = monomial_to_hermite(&mono);
            // sum_k h_k He_k reproduces x^n
            let mut back = vec![0.0; n + 1];
            for (k, &c) in h.iter().enumerate() {
                for (i, &hc) in hermite(k).unwrap().coefficients().iter().enumerate() {
                    back[i] += c * hc;
                }
            }
            for (i, v) in back.iter().enumerate() {
                assert!((v - mono[i]).abs() < 1e-9, "n={n} i={i}");
            }
        }
    }

    fn series(terms: &[(usize, f64, u32)]) -> EdgeworthSeries {
        EdgeworthSeries {
            kind: SeriesKind::Density,
            order_k: 3,
            terms: terms
                .iter()
                .map(|&(d, c, o)| SeriesTerm {
                    hermite_degree: d,
                    coefficient: c,
                    order: HalfOrder(o),
                    product: Vec::new(),
                })
                .collect(),
            centering: Centering {
                center: 0.4,
                scale: 0.2,
                label: CenteringLabel::Mle,
            },
            cumulants_used: Vec::new(),
        }
    }

    #[test]
    fn identity_when_already_centered() {
        let s = series(&[(3, 0.05, 1), (4, -0.01, 2), (6, 0.002, 2)]);
        let r = recenter(&s, 3).unwrap();
        assert_eq!(r.terms.len(), s.terms.len());
        for (a, b) in r.terms.iter().zip(&s.terms) {
            assert_eq!((a.hermite_degree, a.order), (b.hermite_degree, b.order));
            assert!((a.coefficient - b.coefficient).abs() < 1e-16);
        }
        assert_eq!(r.centering.center, 0.4);
        assert_eq!(r.centering.scale, 0.2);
    }

    #[test]
    fn degenerate_factor() {
        let s = series(&[(1, 0.5, 1), (2, -0.4, 2)]);
        assert!(matches!(
            recenter(&s, 3),
            Err(Error::DegenerateRecentering { .. })
        ));
    }

    #[test]
    fn location_and_scale_terms_vanish() {
        let m = BuiltinModel::BetaBinomial {
            a: 0.5,
            b: 4.0,
            n: 40,
            x: 16,
        };
        let spec = m.instantiate().unwrap();
        let s = build_mle_centered(&spec, &m.exact_posterior().unwrap(), 3).unwrap();
        let r = recenter(&s, 3).unwrap();
        let by = r.coefficients_by_degree();
        assert!(by.get(&1).copied().unwrap_or(0.0).abs() < 1e-12);
        assert!(by.get(&2).copied().unwrap_or(0.0).abs() < 1e-12);
        assert!(by[&3].abs() > 1e-3);
        assert_eq!(r.centering.label, CenteringLabel::Recentered);
    }
}
