//! Adaptive Dormand–Prince 5(4) integration of small fixed-size systems.

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-12, rel: 1e-10 }
    }
}

/// The step size collapsed below the representable resolution at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepFailure {
    pub x: f64,
}

const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 1_000_000;

fn combo<const N: usize>(y: &[f64; N], h: f64, ks: &[[f64; N]], w: &[f64]) -> [f64; N] {
    let mut out = *y;
    for (k, &wi) in ks.iter().zip(w) {
        if wi != 0.0 {
            for i in 0..N {
                out[i] += h * wi * k[i];
            }
        }
    }
    out
}

/// Integrate `y′ = f(x, y)` from `x0` to `x1`. `h` carries the step size
/// between calls; pass `0.0` for an automatic first guess.
pub fn integrate<const N: usize>(
    mut f: impl FnMut(f64, &[f64; N]) -> [f64; N],
    x0: f64,
    y0: [f64; N],
    x1: f64,
    h: &mut f64,
    tol: Tolerance,
) -> Result<[f64; N], StepFailure> {
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, &y);
    if *h == 0.0 || !h.is_finite() {
        *h = (math::abs(span) * 1e-3).min(0.1);
    }
    let mut step = math::abs(*h).min(math::abs(span)) * dir;
    for _ in 0..MAX_STEPS {
        let remaining = x1 - x;
        if remaining * dir <= 0.0 {
            break;
        }
        let last = math::abs(step) >= math::abs(remaining);
        if last {
            step = remaining;
        }
        let k2 = f(x + C[0] * step, &combo(&y, step, &[k1], &A2));
        let k3 = f(x + C[1] * step, &combo(&y, step, &[k1, k2], &A3));
        let k4 = f(x + C[2] * step, &combo(&y, step, &[k1, k2, k3], &A4));
        let k5 = f(x + C[3] * step, &combo(&y, step, &[k1, k2, k3, k4], &A5));
        let k6 = f(x + C[4] * step, &combo(&y, step, &[k1, k2, k3, k4, k5], &A6));
        let y_new = combo(&y, step, &[k1, k2, k3, k4, k5, k6], &B);
        let k7 = f(x + step, &y_new);
        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let mut err2 = 0.0;
        for i in 0..N {
            let e: f64 = ks.iter().zip(&E).map(|(k, w)| w * k[i]).sum::<f64>() * step;
            let sc = tol.abs + tol.rel * math::abs(y[i]).max(math::abs(y_new[i]));
            err2 += (e / sc) * (e / sc);
        }
        let err = math::sqrt(err2 / N as f64);
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * math::pow(err, -0.2)).clamp(0.2, 5.0)
        };
        if err <= 1.0 {
            x = if last { x1 } else { x + step };
            y = y_new;
            k1 = k7;
            if !last {
                *h = math::abs(step);
            }
            step *= factor;
        } else {
            step *= factor.min(1.0);
            if math::abs(step) <= f64::EPSILON * math::abs(x).max(1.0) * 16.0 {
                return Err(StepFailure { x });
            }
        }
    }
    if (x1 - x) * dir > 0.0 {
        return Err(StepFailure { x });
    }
    Ok(y)
}
