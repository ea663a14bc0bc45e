//! Gamma function, unit-ball volumes and the first zero of `J_nu`.
//!
//! Only what the constants need: no incomplete gamma, no Bessel Y/K/I.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (original minus one)
    let mut a = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

/// Gamma function for positive arguments.
///
/// Lanczos approximation (g = 7, nine terms) below 15, Stirling series
/// above, reflection formula below 1/2. Overflows to `+inf` past x ~ 171.6.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("gamma requires x > 0, got {x}"));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    if x >= STIRLING_MIN {
        // split the power to delay overflow
        let half = x.powf(0.5 * (x - 0.5));
        return (2.0 * PI).sqrt() * half * ((-x).exp() * half) * stirling_correction(x).exp();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

const STIRLING_MIN: f64 = 15.0;

/// Tail of the Stirling series for `ln Gamma(x)`; truncation error below
/// 3e-16 once x >= 15.
fn stirling_correction(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0
        - inv2
            * (1.0 / 360.0
                - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))))
}

/// Natural logarithm of the gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("ln_gamma requires x > 0, got {x}"));
    }
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    if x < STIRLING_MIN {
        return gamma_unchecked(x).ln();
    }
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + stirling_correction(x)
}

/// Gamma at an arbitrary real argument, failing at the poles.
///
/// Used where a formula may evaluate gamma at a non-positive number.
pub fn gamma_signed(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return domain(format!("gamma of non-finite argument {x}"));
    }
    if x <= 0.0 && x == x.round() {
        return Err(Error::GammaPole(x));
    }
    if x > 0.0 {
        return Ok(gamma_unchecked(x));
    }
    Ok(PI / ((PI * x).sin() * gamma_unchecked(1.0 - x)))
}

/// Lebesgue volume of the unit ball in `R^n`.
///
/// Built from the two-step recurrence `w_n = w_{n-2} 2 pi / n` starting at
/// `w_0 = 1`, `w_1 = 2`.
pub fn unit_ball_volume(n: u32) -> f64 {
    let mut w = if n.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = if n.is_multiple_of(2) { 2 } else { 3 };
    while k <= n {
        w *= 2.0 * PI / k as f64;
        k += 2;
    }
    w
}

/// `ln w_n`, usable far beyond the point where `w_n` underflows.
pub fn ln_unit_ball_volume(n: u32) -> f64 {
    let half = n as f64 / 2.0;
    half * PI.ln() - ln_gamma_unchecked(half + 1.0)
}

/// `n w_n^{1/n}`: perimeter of the ball of unit volume in `R^n`.
pub fn unit_volume_perimeter(n: u32) -> f64 {
    let nf = n as f64;
    nf * (ln_unit_ball_volume(n) / nf).exp()
}

#[derive(Clone, Copy, Debug)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Self { hi: s, lo: err }
    }

    fn two_prod(a: f64, b: f64) -> Self {
        let p = a * b;
        Self {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let s = hi + lo;
        Self {
            hi: s,
            lo: lo - (s - hi),
        }
    }

    fn add(self, o: Self) -> Self {
        let s = Self::two_sum(self.hi, o.hi);
        Self::renorm(s.hi, s.lo + self.lo + o.lo)
    }

    fn mul(self, o: Self) -> Self {
        let p = Self::two_prod(self.hi, o.hi);
        Self::renorm(p.hi, p.lo + self.hi * o.lo + self.lo * o.hi)
    }

    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Self::from_f64(-q1)));
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Self::from_f64(-q2)));
        let q3 = r.hi / o.hi;
        Self::renorm(q1, q2).add(Self::from_f64(q3))
    }

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Bessel function of the first kind `J_order(x)` for `x >= 0`.
///
/// Power series summed in double-double arithmetic, so the cancellation
/// between terms of size ~ e^x stays below double precision up to x ~ 60.
pub fn bessel_j(order: f64, x: f64) -> Result<f64> {
    if !(order >= 0.0) || !(x >= 0.0) || !x.is_finite() {
        return domain(format!("bessel_j requires order >= 0, x >= 0 (got {order}, {x})"));
    }
    if x == 0.0 {
        return Ok(if order == 0.0 { 1.0 } else { 0.0 });
    }
    let quarter_sq = DoubleDouble::two_prod(x, x).mul(DoubleDouble::from_f64(0.25)).neg();
    let mut term = DoubleDouble::from_f64(1.0);
    let mut sum = term;
    let mut k = 0u32;
    loop {
        let kp1 = f64::from(k + 1);
        let denom = DoubleDouble::from_f64(kp1).mul(DoubleDouble::two_sum(kp1, order));
        term = term.mul(quarter_sq).div(denom);
        sum = sum.add(term);
        k += 1;
        if f64::from(k) > x && term.hi.abs() <= 1e-33 * sum.hi.abs().max(1e-300) {
            break;
        }
        if k > 2000 {
            return Err(Error::Convergence(format!(
                "bessel series did not converge at order {order}, x = {x}"
            )));
        }
    }
    let ln_prefactor = order * (0.5 * x).ln() - ln_gamma_unchecked(order + 1.0);
    let prefactor = if order < 100.0 {
        (0.5 * x).powf(order) / gamma_unchecked(order + 1.0)
    } else {
        ln_prefactor.exp()
    };
    Ok(prefactor * sum.value())
}

/// McMahon's expansion of the first zero, with the large-order expansion
/// taking over once the order exceeds 2.
fn first_zero_estimate(order: f64) -> f64 {
    if order <= 2.0 {
        let mu = 4.0 * order * order;
        let beta = (1.0 + 0.5 * order - 0.25) * PI;
        let b8 = 8.0 * beta;
        beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3))
    } else {
        let c = order.cbrt();
        order + 1.855_757_1 * c + 1.033_150 / c - 0.003_97 / order
    }
}

/// Smallest positive root of `J_order`.
///
/// `J_order` is positive on `(0, order]`, so the search marches up from
/// `order` in steps well below the zero spacing until the sign flips, then
/// bisects. The seeded estimate only bounds the march.
pub fn bessel_first_zero(order: f64) -> Result<f64> {
    if !(order >= 0.0) || !order.is_finite() {
        return domain(format!("bessel_first_zero requires order >= 0, got {order}"));
    }
    let estimate = first_zero_estimate(order);
    let ceiling = estimate + 2.0 * PI;
    let step = 0.25;
    let mut lo = order.max(1e-3);
    if bessel_j(order, lo)? <= 0.0 {
        return Err(Error::Convergence(format!(
            "J_{order} not positive at the lower bracket {lo}"
        )));
    }
    let mut hi = lo + step;
    while bessel_j(order, hi)? > 0.0 {
        lo = hi;
        hi += step;
        if hi > ceiling {
            return Err(Error::Convergence(format!(
                "no sign change of J_{order} below {ceiling}"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if bessel_j(order, mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
