//! Special functions and combinatorics used by the closed-form rate expressions.

use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Integration-by-parts is avoided when `|v + 1|` is below this; the boundary
/// and residual terms would cancel catastrophically.
const NEAR_LOG_POLE: f64 = 0.05;

/// `∫_a^b t^v ln(1 + z t) dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogIntegralSpec {
    pub exponent_v: f64,
    pub slope_z: f64,
    pub lower_a: f64,
    pub upper_b: f64,
}

impl LogIntegralSpec {
    pub fn new(exponent_v: f64, slope_z: f64, lower_a: f64, upper_b: f64) -> Self {
        LogIntegralSpec {
            exponent_v,
            slope_z,
            lower_a,
            upper_b,
        }
    }

    fn validate(&self) -> Result<()> {
        const OP: &str = "log_power_integral";
        let LogIntegralSpec {
            exponent_v: v,
            slope_z: z,
            lower_a: a,
            upper_b: b,
        } = *self;
        if !(v.is_finite() && z.is_finite() && a.is_finite() && b.is_finite()) {
            return Err(Error::domain(OP, "non-finite argument"));
        }
        if !(a >= 0.0 && a <= b) {
            return Err(Error::domain(OP, format!("bounds [{a}, {b}] must satisfy 0 <= a <= b")));
        }
        if a == 0.0 && v <= -2.0 {
            return Err(Error::domain(OP, format!("integral diverges at 0 for v = {v}")));
        }
        if !(z > 0.0) {
            return Err(Error::domain(OP, format!("slope {z} must be positive")));
        }
        Ok(())
    }
}

/// Definite integral `∫_a^b t^v ln(1 + z t) dt` to about 1e-12 relative.
///
/// Reduced by parts to `[t^(v+1) ln(1+zt) / (v+1)] - z/(v+1) ∫ t^(v+1)/(1+zt) dt`;
/// the residual is integrated in `u = ln t`, where it is smooth for every `v`.
/// `a = 0` is accepted when the integral converges (`v > -2`).
pub fn log_power_integral(spec: LogIntegralSpec) -> Result<f64> {
    spec.validate()?;
    let LogIntegralSpec {
        exponent_v: v,
        slope_z: z,
        lower_a: a,
        upper_b: b,
    } = spec;
    if a == b {
        return Ok(0.0);
    }
    let tol = Tolerance::relative(1e-13);
    let vp1 = v + 1.0;

    if vp1.abs() < NEAR_LOG_POLE {
        let direct = |t: f64| t.powf(v) * (z * t).ln_1p();
        return Ok(if a > 0.0 {
            integrate(|u: f64| direct(u.exp()) * u.exp(), a.ln(), b.ln(), tol)?.value
        } else {
            integrate(direct, 0.0, b, tol)?.value
        });
    }

    let boundary = |t: f64| {
        if t == 0.0 {
            0.0
        } else {
            t.powf(vp1) * (z * t).ln_1p() / vp1
        }
    };
    let residual = if a > 0.0 {
        integrate(
            |u: f64| {
                let t = u.exp();
                t.powf(v + 2.0) / (1.0 + z * t)
            },
            a.ln(),
            b.ln(),
            tol,
        )?
        .value
    } else {
        integrate(|t: f64| t.powf(vp1) / (1.0 + z * t), 0.0, b, tol)?.value
    };
    Ok(boundary(b) - boundary(a) - z / vp1 * residual)
}

/// Difference `Ω(b) - Ω(a)` of the antiderivative of `t^v ln(1 + z t)`.
pub fn omega_difference(a: f64, b: f64, v: f64, z: f64) -> Result<f64> {
    log_power_integral(LogIntegralSpec::new(v, z, a, b))
}

/// Exponential integral `E1(x) = ∫_x^∞ e^-t / t dt` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    check_e1_arg(x)?;
    Ok(if x <= 1.0 {
        e1_series(x)
    } else {
        (-x).exp() * e1_continued_fraction(x)
    })
}

/// `e^x E1(x)`, finite for large `x` where `E1` alone underflows.
pub fn exp_e1_scaled(x: f64) -> Result<f64> {
    check_e1_arg(x)?;
    Ok(if x <= 1.0 {
        x.exp() * e1_series(x)
    } else {
        e1_continued_fraction(x)
    })
}

fn check_e1_arg(x: f64) -> Result<()> {
    if x > 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(Error::domain("exp_integral_e1", format!("argument {x} must be positive")))
    }
}

fn e1_series(x: f64) -> f64 {
    // -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -x / kf;
        let add = term / kf;
        sum += add;
        if add.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

/// Modified Lentz evaluation of `e^x E1(x)` for `x > 1`.
fn e1_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// Binomial coefficient as a float: exact up to `n = 60` where representable,
/// log-space beyond, and 0 when `k` is outside `0..=n`.
pub fn binom(n: i64, k: i64) -> f64 {
    if k < 0 || n < 0 || k > n {
        return 0.0;
    }
    match binom_exact(n as u64, k as u64) {
        Some(c) => c as f64,
        None => {
            let k = k.min(n - k);
            let ln: f64 = (1..=k).map(|i| (((n - k + i) as f64) / i as f64).ln()).sum();
            ln.exp().round()
        }
    }
}

/// Exact binomial coefficient for `n <= 60`; `None` beyond.
pub fn binom_exact(n: u64, k: u64) -> Option<u64> {
    if n > 60 {
        return None;
    }
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut c: u64 = 1;
    for i in 0..k {
        // c * (n - i) is divisible by (i + 1) and stays below 2^64 for n <= 60.
        c = c * (n - i) / (i + 1);
    }
    Some(c)
}

/// Every vector of `n` non-negative integers summing to `j`, in lexicographic order.
pub fn compositions(total_j: usize, parts_n: usize) -> Compositions {
    assert!(parts_n >= 1, "compositions need at least one part");
    let mut first = vec![0; parts_n];
    first[parts_n - 1] = total_j;
    Compositions { next: Some(first) }
}

#[derive(Debug, Clone)]
pub struct Compositions {
    next: Option<Vec<usize>>,
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let n = current.len();
        // Pivot is the position just left of the rightmost non-zero entry.
        if let Some(last_nz) = current.iter().rposition(|&t| t > 0) {
            if last_nz > 0 {
                let pivot = last_nz - 1;
                let rest = current[last_nz];
                let mut succ = current.clone();
                succ[pivot] += 1;
                succ[last_nz] = 0;
                succ[n - 1] = rest - 1;
                self.next = Some(succ);
            }
        }
        Some(current)
    }
}

/// Multinomial coefficient `(Σ t)! / Π t_i!` as a float.
pub fn multinomial(parts: &[usize]) -> f64 {
    let mut acc = 1.0;
    let mut running = 0i64;
    for &t in parts {
        running += t as i64;
        acc *= binom(running, t as i64);
    }
    acc
}
