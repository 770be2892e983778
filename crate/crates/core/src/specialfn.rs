//! Probabilists' Hermite polynomials and the standard normal density and
//! distribution function.
//!
//! `He_j` satisfies `He_{j+1}(x) = x He_j(x) - j He_{j-1}(x)` with `He_0 = 1`,
//! `He_1 = x`, and `d/dx [phi(x) He_j(x)] = -phi(x) He_{j+1}(x)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use libm::erfc;

use crate::error::{Error, Result};

/// Highest Hermite degree exposed through the public constructors.
pub const MAX_HERMITE_DEGREE: usize = 12;

/// A monic probabilists' Hermite polynomial with monomial coefficients in
/// ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitePoly {
    degree: usize,
    coefficients: Vec<f64>,
}

impl HermitePoly {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of `x^i` is `coefficients()[i]`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Horner evaluation of the monomial form.
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * x + c)
    }
}

fn check_degree(degree: usize) -> Result<()> {
    if degree > MAX_HERMITE_DEGREE {
        return Err(Error::UnsupportedOrder {
            what: "Hermite polynomial",
            order: degree,
            max: MAX_HERMITE_DEGREE,
        });
    }
    Ok(())
}

pub fn hermite(degree: usize) -> Result<HermitePoly> {
    check_degree(degree)?;
    Ok(HermitePoly {
        degree,
        coefficients: hermite_coefficients(degree),
    })
}

/// Monomial coefficients of `He_degree` without the public degree cap.
/// Entries are integers, exact in double precision well past degree 20.
pub(crate) fn hermite_coefficients(degree: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if degree == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for j in 1..degree {
        let mut next = vec![0.0; j + 2];
        for (i, &c) in cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= j as f64 * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Value of `He_degree(x)` by the three-term recurrence.
pub fn hermite_eval(degree: usize, x: f64) -> Result<f64> {
    check_degree(degree)?;
    let mut values = [0.0; MAX_HERMITE_DEGREE + 1];
    hermite_fill(x, &mut values[..=degree]);
    Ok(values[degree])
}

/// Fills `out[j] = He_j(x)` for every `j < out.len()`.
pub(crate) fn hermite_fill(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = x;
    }
    for j in 1..out.len().saturating_sub(1) {
        out[j + 1] = x * out[j] - j as f64 * out[j - 1];
    }
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function, `erfc(-x / sqrt 2) / 2`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}
