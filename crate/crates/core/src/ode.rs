//! Adaptive Dormand–Prince 5(4) integrator for autonomous linear systems too
//! large for dense exponentiation.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-14,
            max_steps: 10_000_000,
        }
    }
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = f(y)` from time 0 to `t`. `f(y, dy)` writes the
/// derivative into `dy`.
pub fn integrate<F>(mut f: F, y0: &[f64], t: f64, tol: Tolerances) -> Result<Vec<f64>>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let dim = y0.len();
    let mut y = y0.to_vec();
    if t == 0.0 || dim == 0 {
        return Ok(y);
    }
    let mut k = vec![vec![0.0; dim]; 7];
    let mut stage = vec![0.0; dim];
    let mut y5 = vec![0.0; dim];
    f(&y, &mut k[0]);

    // initial step from the derivative scale
    let scale = |y: &[f64]| {
        y.iter()
            .map(|v| tol.atol + tol.rtol * v.abs())
            .collect::<Vec<_>>()
    };
    let sc = scale(&y);
    let d0 = rms_scaled(&y, &sc);
    let d1 = rms_scaled(&k[0], &sc);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h = h.min(t);

    let mut now = 0.0;
    let mut steps = 0;
    while now < t {
        steps += 1;
        if steps > tol.max_steps {
            return Err(Error::StepSize { t: now });
        }
        if now + h > t {
            h = t - now;
        }
        for s in 1..7 {
            for i in 0..dim {
                let mut acc = y[i];
                for (r, a) in A[s].iter().enumerate().take(s) {
                    acc += h * a * k[r][i];
                }
                stage[i] = acc;
            }
            f(&stage, &mut k[s]);
        }
        let mut err = 0.0;
        for i in 0..dim {
            let mut hi = y[i];
            let mut lo = y[i];
            for s in 0..7 {
                hi += h * B5[s] * k[s][i];
                lo += h * B4[s] * k[s][i];
            }
            y5[i] = hi;
            let sc = tol.atol + tol.rtol * y[i].abs().max(hi.abs());
            err += ((hi - lo) / sc).powi(2);
        }
        let err = (err / dim as f64).sqrt();
        if err <= 1.0 {
            now += h;
            std::mem::swap(&mut y, &mut y5);
            // first-same-as-last: the last stage is the next derivative
            k.swap(0, 6);
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h <= f64::EPSILON * now.max(1.0) {
            return Err(Error::StepSize { t: now });
        }
    }
    Ok(y)
}

fn rms_scaled(v: &[f64], sc: &[f64]) -> f64 {
    (v.iter().zip(sc).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let y = integrate(
            |y, dy| dy[0] = -2.0 * y[0],
            &[1.0],
            3.0,
            Tolerances::default(),
        )
        .unwrap();
        assert!((y[0] - (-6.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn rotation_preserves_norm() {
        let y = integrate(
            |y, dy| {
                dy[0] = -y[1];
                dy[1] = y[0];
            },
            &[1.0, 0.0],
            10.0,
            Tolerances::default(),
        )
        .unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-9);
        assert!((y[1] - 10f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn zero_time_is_identity() {
        let y = integrate(|_, dy| dy[0] = 1.0, &[0.25], 0.0, Tolerances::default()).unwrap();
        assert_eq!(y, vec![0.25]);
    }

    #[test]
    fn step_budget_is_reported() {
        let tol = Tolerances {
            max_steps: 3,
            ..Tolerances::default()
        };
        let r = integrate(|y, dy| dy[0] = -1e3 * y[0], &[1.0], 100.0, tol);
        assert!(matches!(r, Err(Error::StepSize { .. })));
    }
}
