//! Central finite differences of orders 1..=6 with one Richardson step.

use crate::momentalg::binomial;

/// Highest derivative order produced by [`derivatives`].
pub const MAX_DERIVATIVE: usize = 6;

fn central(f: &dyn Fn(f64) -> f64, x: f64, order: usize, h: f64) -> f64 {
    // sum_i (-1)^i C(j,i) f(x + (j/2 - i) h) / h^j
    let half = order as f64 / 2.0;
    let mut acc = 0.0;
    for i in 0..=order {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(order, i) * f(x + (half - i as f64) * h);
    }
    acc / h.powi(order as i32)
}

/// Step used for a derivative of `order` at natural length `scale`.
pub fn step(order: usize, scale: f64) -> f64 {
    2.0 * scale * f64::EPSILON.powf(1.0 / (order as f64 + 4.0))
}

/// Values `[f(x), f'(x), ..., f^(6)(x)]`.
///
/// `scale` is the length over which `f` changes appreciably; `reach` bounds
/// how far from `x` the stencil may sample (distance to the nearest support
/// boundary, or infinity).
pub fn derivatives(
    f: &dyn Fn(f64) -> f64,
    x: f64,
    scale: f64,
    reach: f64,
) -> [f64; MAX_DERIVATIVE + 1] {
    let mut out = [0.0; MAX_DERIVATIVE + 1];
    out[0] = f(x);
    for (j, slot) in out.iter_mut().enumerate().skip(1) {
        // stencil spans j*h/2 on each side
        let h = step(j, scale).min(0.9 * 2.0 * reach / j as f64);
        let coarse = central(f, x, j, h);
        let fine = central(f, x, j, 0.5 * h);
        *slot = (4.0 * fine - coarse) / 3.0;
    }
    out
}
