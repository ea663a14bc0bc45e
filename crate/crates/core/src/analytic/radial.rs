//! Closed-form radial functions on `R^n` and their norms.

use serde::{Deserialize, Serialize};

use crate::constants::GnExponents;
use crate::error::{domain, Result};
use crate::quadrature::{integrate, integrate_to_infinity, Tolerance};
use crate::special_fn::{bessel_first_zero, bessel_j, gamma, unit_ball_volume};

/// The closed-form profiles available as [`RadialFunction`]s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialShape {
    /// `a (1 + b r^{p/(p-1)})^{-(p-1)/(q-p)}`
    GnExtremal { a: f64, b: f64, p: f64, q: f64 },
    /// `c exp(-r^{p/(p-1)} / s)`
    LogSobolevExtremal { c: f64, s: f64, p: f64 },
    /// `a exp(-alpha r^2)`
    Gaussian { amplitude: f64, alpha: f64 },
    /// `h (1 - r/R)` on `[0, R]`
    Cone { height: f64, radius: f64 },
    /// `h` on `[0, R)`; the jump at `R` is not part of the gradient.
    Plateau { height: f64, radius: f64 },
    /// First Dirichlet eigenfunction of the ball of radius `R`,
    /// `x^{-nu} J_nu(x)` with `x = j r / R`, `nu = n/2 - 1` and `j` the
    /// first zero of `J_nu`.
    BallEigenfunction { radius: f64, zero: f64 },
    /// Rearranged profile of the sphere counterexample field.
    Example51 { lambda: f64 },
}

/// A radially symmetric function `u(x) = rho(|x|)` on `R^n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialFunction {
    pub n: u32,
    pub shape: RadialShape,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("{name} must be positive and finite, got {x}"));
    }
    Ok(())
}

/// Sharp Gagliardo–Nirenberg extremal `a (1 + b |x|^{p/(p-1)})^{-(p-1)/(q-p)}`.
///
/// Norms are translation invariant, so the extremal is centred at the origin.
pub fn gn_extremal(n: u32, p: f64, q: f64, a: f64, b: f64) -> Result<RadialFunction> {
    GnExponents::new(n, p, q)?;
    positive("a", a)?;
    positive("b", b)?;
    Ok(RadialFunction {
        n,
        shape: RadialShape::GnExtremal { a, b, p, q },
    })
}

/// Optimal `p`-log-Sobolev profile `C exp(-|x|^{p/(p-1)} / s)` with `C` fixed
/// by `||u||_{L^p} = 1`.
///
/// The exponent is negative: with the positive sign the function is not in
/// any `L^p`.
pub fn logsobolev_extremal(n: u32, p: f64, s: f64) -> Result<RadialFunction> {
    if n < 1 || !(p > 1.0) || !p.is_finite() {
        return domain(format!("need n >= 1 and p > 1, got n = {n}, p = {p}"));
    }
    positive("s", s)?;
    let unit = RadialFunction {
        n,
        shape: RadialShape::LogSobolevExtremal { c: 1.0, s, p },
    };
    let norm = lp_norm(&unit, p)?;
    Ok(RadialFunction {
        n,
        shape: RadialShape::LogSobolevExtremal { c: 1.0 / norm, s, p },
    })
}

impl RadialFunction {
    pub fn gaussian(n: u32, amplitude: f64, alpha: f64) -> Result<Self> {
        positive("amplitude", amplitude)?;
        positive("alpha", alpha)?;
        Ok(Self {
            n,
            shape: RadialShape::Gaussian { amplitude, alpha },
        })
    }

    pub fn cone(n: u32, height: f64, radius: f64) -> Result<Self> {
        positive("height", height)?;
        positive("radius", radius)?;
        Ok(Self {
            n,
            shape: RadialShape::Cone { height, radius },
        })
    }

    pub fn plateau(n: u32, height: f64, radius: f64) -> Result<Self> {
        positive("height", height)?;
        positive("radius", radius)?;
        Ok(Self {
            n,
            shape: RadialShape::Plateau { height, radius },
        })
    }

    pub fn ball_eigenfunction(n: u32, radius: f64) -> Result<Self> {
        if n < 2 {
            return domain("ball eigenfunctions need dimension >= 2");
        }
        positive("radius", radius)?;
        let zero = bessel_first_zero(f64::from(n) / 2.0 - 1.0)?;
        Ok(Self {
            n,
            shape: RadialShape::BallEigenfunction { radius, zero },
        })
    }

    /// `rho(r)`.
    pub fn value(&self, r: f64) -> f64 {
        match self.shape {
            RadialShape::GnExtremal { a, b, p, q } => a * (1.0 + b * r.powf(p / (p - 1.0))).powf(-(p - 1.0) / (q - p)),
            RadialShape::LogSobolevExtremal { c, s, p } => c * (-r.powf(p / (p - 1.0)) / s).exp(),
            RadialShape::Gaussian { amplitude, alpha } => amplitude * (-alpha * r * r).exp(),
            RadialShape::Cone { height, radius } => height * (1.0 - r / radius).max(0.0),
            RadialShape::Plateau { height, radius } => {
                if r < radius {
                    height
                } else {
                    0.0
                }
            }
            RadialShape::BallEigenfunction { radius, zero } => {
                if r >= radius {
                    return 0.0;
                }
                let nu = f64::from(self.n) / 2.0 - 1.0;
                let x = zero * r / radius;
                if x < 1e-8 {
                    1.0 / (2f64.powf(nu) * gamma(nu + 1.0).unwrap_or(f64::NAN))
                } else {
                    x.powf(-nu) * bessel_j(nu, x).unwrap_or(f64::NAN)
                }
            }
            RadialShape::Example51 { lambda } => super::example51::rho(lambda, r),
        }
    }

    /// `rho'(r)`, which is non-positive for every shape here.
    pub fn derivative(&self, r: f64) -> f64 {
        match self.shape {
            RadialShape::GnExtremal { a, b, p, q } => {
                let alpha = p / (p - 1.0);
                let e = (p - 1.0) / (q - p);
                -a * e * b * alpha * r.powf(alpha - 1.0) * (1.0 + b * r.powf(alpha)).powf(-e - 1.0)
            }
            RadialShape::LogSobolevExtremal { c, s, p } => {
                let alpha = p / (p - 1.0);
                -c * alpha / s * r.powf(alpha - 1.0) * (-r.powf(alpha) / s).exp()
            }
            RadialShape::Gaussian { amplitude, alpha } => -2.0 * alpha * r * amplitude * (-alpha * r * r).exp(),
            RadialShape::Cone { height, radius } => {
                if r < radius {
                    -height / radius
                } else {
                    0.0
                }
            }
            RadialShape::Plateau { .. } => 0.0,
            RadialShape::BallEigenfunction { radius, zero } => {
                if r >= radius {
                    return 0.0;
                }
                let nu = f64::from(self.n) / 2.0 - 1.0;
                let x = zero * r / radius;
                if x < 1e-8 {
                    0.0
                } else {
                    -zero / radius * x.powf(-nu) * bessel_j(nu + 1.0, x).unwrap_or(f64::NAN)
                }
            }
            RadialShape::Example51 { lambda } => super::example51::rho_prime(lambda, r),
        }
    }

    /// Radius beyond which the function vanishes (infinite for global profiles).
    pub fn support_radius(&self) -> f64 {
        match self.shape {
            RadialShape::Cone { radius, .. }
            | RadialShape::Plateau { radius, .. }
            | RadialShape::BallEigenfunction { radius, .. } => radius,
            RadialShape::Example51 { .. } => 2.0,
            _ => f64::INFINITY,
        }
    }

    /// Points where the profile or its derivative is not smooth, plus a
    /// characteristic length for global profiles.
    fn breakpoints(&self) -> Vec<f64> {
        match self.shape {
            RadialShape::GnExtremal { b, p, .. } => vec![b.powf(-(p - 1.0) / p)],
            RadialShape::LogSobolevExtremal { s, p, .. } => vec![s.powf((p - 1.0) / p)],
            RadialShape::Gaussian { alpha, .. } => vec![1.0 / alpha.sqrt()],
            RadialShape::Example51 { lambda } => vec![super::example51::plateau_radius(lambda)],
            _ => Vec::new(),
        }
    }
}

/// `int_0^R g(rho(r), |rho'(r)|) n w_n r^{n-1} dr`, adaptive to relative `1e-10`.
pub fn radial_integral<G: Fn(f64, f64) -> f64>(rf: &RadialFunction, g: G) -> Result<f64> {
    let n = rf.n;
    let area = f64::from(n) * unit_ball_volume(n);
    let integrand = |r: f64| {
        let v = g(rf.value(r), rf.derivative(r).abs());
        if v == 0.0 {
            0.0
        } else {
            v * area * r.powi(n as i32 - 1)
        }
    };
    let tol = Tolerance::relative(1e-10);
    let support = rf.support_radius();
    let mut cuts = vec![0.0];
    cuts.extend(rf.breakpoints().into_iter().filter(|&b| b > 0.0 && b < support));
    let mut total = 0.0;
    if support.is_finite() {
        cuts.push(support);
    }
    for w in cuts.windows(2) {
        total += integrate(integrand, w[0], w[1], tol)?;
    }
    if !support.is_finite() {
        let last = *cuts.last().expect("cuts start with zero");
        total += integrate_to_infinity(integrand, last, tol)?;
    }
    Ok(total)
}

/// `||u||_{L^p(R^n)}`.
pub fn lp_norm(rf: &RadialFunction, p: f64) -> Result<f64> {
    Ok(radial_integral(rf, |v, _| v.powf(p))?.powf(1.0 / p))
}

/// `||grad u||_{L^p(R^n)}`.
pub fn gradient_norm(rf: &RadialFunction, p: f64) -> Result<f64> {
    Ok(radial_integral(rf, |_, d| d.powf(p))?.powf(1.0 / p))
}

/// `int |u|^p ln |u|^p`.
pub fn entropy(rf: &RadialFunction, p: f64) -> Result<f64> {
    radial_integral(rf, |v, _| {
        if v > 0.0 {
            let vp = v.powf(p);
            vp * vp.ln()
        } else {
            0.0
        }
    })
}
