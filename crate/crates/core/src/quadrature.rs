//! Double-exponential quadrature used by tests to check normalization of the
//! bundled densities. Not part of the estimation path.

use std::f64::consts::FRAC_PI_2;

const STEP: f64 = 1.0 / 32.0;

/// `∫_0^∞ f` via the exp-sinh substitution `x = exp(π/2 · sinh t)`.
pub fn integrate_half_line(mut f: impl FnMut(f64) -> f64) -> f64 {
    let steps = (5.0 / STEP) as i64;
    (-steps..=steps)
        .map(|k| {
            let t = k as f64 * STEP;
            let x = (FRAC_PI_2 * t.sinh()).exp();
            let dx = x * FRAC_PI_2 * t.cosh();
            let y = f(x);
            if y == 0.0 {
                0.0
            } else {
                y * dx
            }
        })
        .sum::<f64>()
        * STEP
}

/// `∫_{-∞}^{∞} f` via the sinh-sinh substitution `x = sinh(π/2 · sinh t)`.
pub fn integrate_real_line(mut f: impl FnMut(f64) -> f64) -> f64 {
    let steps = (4.0 / STEP) as i64;
    (-steps..=steps)
        .map(|k| {
            let t = k as f64 * STEP;
            let u = FRAC_PI_2 * t.sinh();
            let dx = u.cosh() * FRAC_PI_2 * t.cosh();
            let y = f(u.sinh());
            if y == 0.0 {
                0.0
            } else {
                y * dx
            }
        })
        .sum::<f64>()
        * STEP
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_integrals() {
        assert!((integrate_half_line(|x| (-x).exp()) - 1.0).abs() < 1e-12);
        assert!((integrate_half_line(|x| (-3.0 * x).exp() * x) - 1.0 / 9.0).abs() < 1e-12);
        let gauss = integrate_real_line(|x| (-0.5 * (x - 1.0) * (x - 1.0)).exp());
        assert!((gauss - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-10);
    }
}
