//! Exact moment/cumulant conversions and closed-form Gaussian polynomial
//! integrals.
//!
//! Conversions go through integer partition tables (complete and partial Bell
//! polynomial coefficients) built once for orders up to [`MAX_ORDER`]. All
//! conversions work on raw moments about a stated point; moving that point is
//! the separate [`MomentVector::shifted`] step.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

/// Highest moment or cumulant order handled by the conversions.
pub const MAX_ORDER: usize = 8;

/// Highest polynomial degree plus power shift accepted by
/// [`gaussian_poly_integral`].
pub const MAX_GAUSSIAN_DEGREE: usize = 20;

/// Raw moments `E[(X - about)^j]` for `j = 1..=max_order`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentVector {
    about: f64,
    values: Vec<f64>,
}

impl MomentVector {
    /// `values[0]` is the first moment.
    pub fn new(about: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() > MAX_ORDER {
            return Err(Error::UnsupportedOrder {
                what: "moment vector",
                order: values.len(),
                max: MAX_ORDER,
            });
        }
        Ok(Self { about, values })
    }

    pub fn about(&self) -> f64 {
        self.about
    }

    pub fn max_order(&self) -> usize {
        self.values.len()
    }

    /// Moment of order `j`; order 0 is 1.
    pub fn order(&self, j: usize) -> f64 {
        if j == 0 {
            1.0
        } else {
            self.values[j - 1]
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The same distribution's moments about `new_about`, by binomial
    /// expansion of `(X - new_about)^j = ((X - about) + (about - new_about))^j`.
    pub fn shifted(&self, new_about: f64) -> MomentVector {
        let delta = self.about - new_about;
        let values = (1..=self.max_order())
            .map(|j| {
                (0..=j)
                    .map(|i| binomial(j, i) * self.order(i) * delta.powi((j - i) as i32))
                    .sum()
            })
            .collect();
        MomentVector {
            about: new_about,
            values,
        }
    }
}

/// Cumulants `k_j` for `j = 1..=max_order`, in absolute terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulantVector {
    values: Vec<f64>,
}

impl CumulantVector {
    /// `values[0]` is the first cumulant.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() > MAX_ORDER {
            return Err(Error::UnsupportedOrder {
                what: "cumulant vector",
                order: values.len(),
                max: MAX_ORDER,
            });
        }
        Ok(Self { values })
    }

    pub fn max_order(&self) -> usize {
        self.values.len()
    }

    pub fn order(&self, j: usize) -> f64 {
        self.values[j - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values[0]
    }

    pub fn variance(&self) -> f64 {
        self.values[1]
    }

    /// Cumulant of order `j` of the standardized variable, `k_j / k_2^{j/2}`.
    pub fn invariant(&self, j: usize) -> f64 {
        self.order(j) / self.variance().powf(j as f64 / 2.0)
    }

    /// Cumulants of `scale * X + shift`.
    pub fn affine(&self, scale: f64, shift: f64) -> CumulantVector {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &k)| {
                let v = k * scale.powi(i as i32 + 1);
                if i == 0 {
                    v + shift
                } else {
                    v
                }
            })
            .collect();
        CumulantVector { values }
    }
}

/// One partition of an integer `n`, with the coefficients it carries in the
/// moment and cumulant expansions.
#[derive(Debug, Clone)]
struct PartitionTerm {
    /// `(part, multiplicity)` pairs.
    parts: Vec<(usize, usize)>,
    /// `n! / prod(part!^mult * mult!)`.
    moment_coef: i64,
    /// `(-1)^(b-1) (b-1)! * moment_coef`, `b` the number of blocks.
    cumulant_coef: i64,
}

fn factorial_i64(n: usize) -> i64 {
    (1..=n as i64).product()
}

fn partitions_of(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(
        remaining: usize,
        max_part: usize,
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if remaining == 0 {
            out.push(current.clone());
            return;
        }
        for part in (1..=max_part.min(remaining)).rev() {
            for mult in (1..=remaining / part).rev() {
                current.push((part, mult));
                rec(remaining - part * mult, part - 1, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

fn partition_table() -> &'static [Vec<PartitionTerm>] {
    static TABLE: OnceLock<Vec<Vec<PartitionTerm>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=MAX_ORDER)
            .map(|n| {
                partitions_of(n)
                    .into_iter()
                    .map(|parts| {
                        let denom: i64 = parts
                            .iter()
                            .map(|&(p, m)| factorial_i64(p).pow(m as u32) * factorial_i64(m))
                            .product();
                        let moment_coef = factorial_i64(n) / denom;
                        let blocks: usize = parts.iter().map(|&(_, m)| m).sum();
                        let sign = if blocks % 2 == 1 { 1 } else { -1 };
                        let cumulant_coef =
                            sign * factorial_i64(blocks.saturating_sub(1)) * moment_coef;
                        PartitionTerm {
                            parts,
                            moment_coef,
                            cumulant_coef,
                        }
                    })
                    .collect()
            })
            .collect()
    })
}

fn check_orders(len: usize) -> Result<()> {
    if len < 2 {
        return Err(Error::InsufficientOrder { need: 2, got: len });
    }
    Ok(())
}

/// Cumulants of the distribution whose raw moments about `m.about()` are
/// given. The first cumulant is reported in absolute terms.
///
/// The moments are first moved to the mean, which drops every partition
/// with a singleton block from the sum.
pub fn moments_to_cumulants(m: &MomentVector) -> Result<CumulantVector> {
    check_orders(m.max_order())?;
    let table = partition_table();
    let mean = m.about() + m.order(1);
    let mut central = m.shifted(mean).values;
    central[0] = 0.0;
    let mut values: Vec<f64> = (1..=m.max_order())
        .map(|n| {
            table[n]
                .iter()
                .filter(|t| t.parts.iter().all(|&(p, _)| p > 1))
                .map(|t| {
                    t.parts.iter().fold(t.cumulant_coef as f64, |acc, &(p, k)| {
                        acc * central[p - 1].powi(k as i32)
                    })
                })
                .sum()
        })
        .collect();
    values[0] = mean;
    Ok(CumulantVector { values })
}

/// Raw moments about `about` of the distribution with cumulants `c`.
pub fn cumulants_to_moments(c: &CumulantVector, about: f64) -> Result<MomentVector> {
    check_orders(c.max_order())?;
    let table = partition_table();
    let mut shifted = c.values.clone();
    shifted[0] -= about;
    let values = (1..=c.max_order())
        .map(|n| {
            table[n]
                .iter()
                .map(|t| {
                    t.parts.iter().fold(t.moment_coef as f64, |acc, &(p, k)| {
                        acc * shifted[p - 1].powi(k as i32)
                    })
                })
                .sum()
        })
        .collect();
    Ok(MomentVector { about, values })
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `E[Z^j]` for `Z ~ N(0, variance)`: zero for odd `j`, `(j-1)!! variance^{j/2}`
/// otherwise.
pub(crate) fn gaussian_central_moment(j: usize, variance: f64) -> f64 {
    if j % 2 == 1 {
        return 0.0;
    }
    let double_factorial: f64 = (1..j).step_by(2).map(|i| i as f64).product();
    double_factorial * variance.powi((j / 2) as i32)
}

/// `E[X^power_shift * poly(X - mean)]` for `X ~ N(mean, variance)`, where
/// `poly[i]` is the coefficient of `(X - mean)^i`.
pub fn gaussian_poly_integral(
    poly: &[f64],
    mean: f64,
    variance: f64,
    power_shift: usize,
) -> Result<f64> {
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(Error::Domain(format!(
            "variance must be positive, got {variance}"
        )));
    }
    let degree = poly.len().saturating_sub(1);
    if degree + power_shift > MAX_GAUSSIAN_DEGREE {
        return Err(Error::UnsupportedOrder {
            what: "Gaussian polynomial integral",
            order: degree + power_shift,
            max: MAX_GAUSSIAN_DEGREE,
        });
    }
    // X^s = sum_i C(s, i) Z^i mean^(s - i), Z = X - mean
    let mut total = 0.0;
    for (k, &c) in poly.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let inner: f64 = (0..=power_shift)
            .map(|i| {
                binomial(power_shift, i)
                    * mean.powi((power_shift - i) as i32)
                    * gaussian_central_moment(k + i, variance)
            })
            .sum();
        total += c * inner;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = partition_table().iter().map(Vec::len).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22]);
        // complete Bell polynomial coefficients sum to the Bell numbers
        let bell: Vec<i64> = partition_table()
            .iter()
            .map(|row| row.iter().map(|t| t.moment_coef).sum())
            .collect();
        assert_eq!(bell, vec![1, 1, 2, 5, 15, 52, 203, 877, 4140]);
    }

    #[test]
    fn standard_normal() {
        let m = MomentVector::new(0.0, vec![0.0, 1.0, 0.0, 3.0]).unwrap();
        let c = moments_to_cumulants(&m).unwrap();
        assert_eq!(c.values(), &[0.0, 1.0, 0.0, 0.0]);
        let back =
            cumulants_to_moments(&CumulantVector::new(vec![0.0, 1.0, 0.0, 0.0]).unwrap(), 0.0)
                .unwrap();
        assert_eq!(back.values(), &[0.0, 1.0, 0.0, 3.0]);
    }

    #[test]
    fn point_mass() {
        let c0 = 1.7;
        let m = MomentVector::new(0.0, vec![c0, c0 * c0, c0 * c0 * c0]).unwrap();
        let k = moments_to_cumulants(&m).unwrap();
        assert!(close(k.order(1), c0, 1e-15));
        assert!(k.order(2).abs() < 1e-14);
        assert!(k.order(3).abs() < 1e-14);
    }

    #[test]
    fn about_point_only_moves_first_cumulant() {
        let m = MomentVector::new(0.0, vec![0.0, 2.0, 0.5, 13.0]).unwrap();
        let k0 = moments_to_cumulants(&m).unwrap();
        let m5 = MomentVector::new(5.0, vec![0.0, 2.0, 0.5, 13.0]).unwrap();
        let k5 = moments_to_cumulants(&m5).unwrap();
        assert_eq!(k5.order(1), k0.order(1) + 5.0);
        assert_eq!(&k5.values()[1..], &k0.values()[1..]);
    }

    #[test]
    fn shifting_preserves_cumulants() {
        let m = MomentVector::new(0.3, vec![0.1, 0.4, 0.2, 0.9, 0.7, 2.1]).unwrap();
        let k = moments_to_cumulants(&m).unwrap();
        let k2 = moments_to_cumulants(&m.shifted(-1.2)).unwrap();
        for j in 1..=6 {
            assert!(close(k.order(j), k2.order(j), 1e-12), "order {j}");
        }
    }

    #[test]
    fn insufficient_order() {
        let m = MomentVector::new(0.0, vec![1.0]).unwrap();
        assert!(matches!(
            moments_to_cumulants(&m),
            Err(Error::InsufficientOrder { .. })
        ));
        let c = CumulantVector::new(vec![1.0]).unwrap();
        assert!(cumulants_to_moments(&c, 0.0).is_err());
        assert!(MomentVector::new(0.0, vec![0.0; 9]).is_err());
    }

    #[test]
    fn gaussian_integrals() {
        assert_eq!(gaussian_poly_integral(&[1.0], 0.0, 1.0, 2).unwrap(), 1.0);
        let s2 = 0.37;
        assert!(close(
            gaussian_poly_integral(&[0.0, 0.0, 1.0], 0.0, s2, 0).unwrap(),
            s2,
            1e-15
        ));
        assert!(close(
            gaussian_poly_integral(&[0.0, 0.0, 0.0, 1.0], 1.0, 2.0, 1).unwrap(),
            12.0,
            1e-15
        ));
        assert!(matches!(
            gaussian_poly_integral(&[1.0], 0.0, 0.0, 0),
            Err(Error::Domain(_))
        ));
        assert!(gaussian_poly_integral(&[1.0; 16], 0.0, 1.0, 6).is_err());
    }
}
