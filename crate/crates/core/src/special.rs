//! Overflow- and cancellation-safe elementary functions used by the block
//! formulas.
//!
//! The closed forms for block energies and heat capacities are differences of
//! nearly equal terms near `b = 0` and ratios of huge hyperbolic functions at
//! large `|b|`. Every helper here is accurate to a few ulps over the whole
//! real line.

use std::f64::consts::LN_2;

/// `(sinh x - x) / x^3` for `|x| < 1`, by its Taylor series.
fn sinh_minus_x_over_cube(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0 / 6.0;
    let mut sum = term;
    let mut k = 1u32;
    loop {
        let a = 2 * k + 2;
        term *= x2 / f64::from(a * (a + 1));
        sum += term;
        if term < 1e-18 * sum {
            return sum;
        }
        k += 1;
    }
}

/// `sinh(x) / x`, equal to 1 at the origin.
pub fn sinhc(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1.0 {
        1.0 + ax * ax * sinh_minus_x_over_cube(ax)
    } else {
        x.sinh() / x
    }
}

/// `(x / sinh x)^2`. Even, decreasing in `|x|`, equal to 1 at the origin.
pub fn sinhc_inv_sq(x: f64) -> f64 {
    let ax = x.abs();
    if ax > 20.0 {
        // 4 x^2 e^{-2x} / (1 - e^{-2x})^2; never overflows
        let e = (-2.0 * ax).exp();
        let d = 1.0 - e;
        4.0 * ax * ax * e / (d * d)
    } else {
        let r = 1.0 / sinhc(ax);
        r * r
    }
}

/// `1 - (x / sinh x)^2` without cancellation near the origin.
pub fn one_minus_sinhc_inv_sq(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1.0 {
        // (sinh^2 x - x^2) / sinh^2 x = d (sinh x + x) / sinh^2 x, d = sinh x - x
        let d = ax * ax * ax * sinh_minus_x_over_cube(ax);
        let sh = ax + d;
        d * (sh + ax) / (sh * sh)
    } else {
        1.0 - sinhc_inv_sq(ax)
    }
}

/// Langevin function `coth(x) - 1/x`. Odd, with `L(x) ~ x/3` at the origin.
pub fn langevin(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < 1.0 {
        // (x cosh x - sinh x) / x^2 = sum_{k>=1} 2k x^{2k-1} / (2k+1)!
        let x2 = ax * ax;
        let mut pow = ax; // x^{2k-1}
        let mut fact = 6.0; // (2k+1)!
        let mut sum = 0.0;
        let mut k = 1u32;
        loop {
            let term = f64::from(2 * k) * pow / fact;
            sum += term;
            if term <= 1e-18 * sum {
                break;
            }
            pow *= x2;
            fact *= f64::from((2 * k + 2) * (2 * k + 3));
            k += 1;
        }
        sum / sinhc(ax)
    } else {
        1.0 / ax.tanh() - 1.0 / ax
    };
    v.copysign(x)
}

/// `ln sinh(x)` for `x > 0`.
pub fn ln_sinh(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x > 20.0 {
        x - LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// `e^{-2x} / (1 - e^{-2x})^2 = (1 / (2 sinh x))^2` for `x > 0`, overflow-free.
pub fn half_csch_sq(x: f64) -> f64 {
    let ax = x.abs();
    let e = (-2.0 * ax).exp();
    let d = -(-2.0 * ax).exp_m1();
    e / (d * d)
}

/// Numerically stable `ln Σ exp(v_i)`.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}
