//! The counterexample family `u_lambda` on the unit sphere.
//!
//! `u_lambda = lambda r` on the polar cap `{z > 0, r <= 1/lambda}` (with
//! `r = sqrt(x^2 + y^2)`) and `1` elsewhere. Its rearrangement onto the plane
//! is `rho(s) = lambda sqrt(1 - (s^2/2 - 1)^2)` between the plateau radius
//! and `2`, which has an infinite `p`-energy for `p >= 2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::radial::{RadialFunction, RadialShape};
use crate::error::{domain, Result};
use crate::mesh::{TriMesh, VertexField};
use crate::quadrature::{integrate, Tolerance};

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 1.0) || !lambda.is_finite() {
        return domain(format!("lambda must be a finite real >= 1, got {lambda}"));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return domain(format!("p must be a finite real >= 1, got {p}"));
    }
    Ok(())
}

/// `u_lambda` at a point of the unit sphere in `R^3`.
pub fn example51_field(lambda: f64, point: &[f64]) -> Result<f64> {
    check_lambda(lambda)?;
    if point.len() != 3 {
        return domain(format!("expected a point of R^3, got {} coordinates", point.len()));
    }
    let r = point[0].hypot(point[1]);
    Ok(if point[2] > 0.0 && r <= 1.0 / lambda {
        lambda * r
    } else {
        1.0
    })
}

/// `u_lambda` sampled at the vertices of a sphere mesh.
pub fn example51_vertex_field(mesh: &TriMesh, lambda: f64) -> Result<VertexField> {
    check_lambda(lambda)?;
    if mesh.dim() != 3 {
        return domain("the counterexample field lives on the unit sphere of R^3");
    }
    mesh.field_from_fn(|x| example51_field(lambda, x).unwrap_or(1.0))
}

/// The plane radius up to which `rho_lambda = 1`.
pub fn plateau_radius(lambda: f64) -> f64 {
    (2.0 * (1.0 + (1.0 - 1.0 / (lambda * lambda)).sqrt())).sqrt()
}

pub(crate) fn rho(lambda: f64, s: f64) -> f64 {
    if s <= plateau_radius(lambda) {
        1.0
    } else if s >= 2.0 {
        0.0
    } else {
        let y = s * s / 2.0 - 1.0;
        lambda * (1.0 - y * y).max(0.0).sqrt()
    }
}

pub(crate) fn rho_prime(lambda: f64, s: f64) -> f64 {
    if s <= plateau_radius(lambda) || s >= 2.0 {
        0.0
    } else {
        let y = s * s / 2.0 - 1.0;
        -lambda * s * y / (1.0 - y * y).sqrt()
    }
}

/// The rearrangement `rho_lambda` of `u_lambda` onto the plane.
pub fn example51_profile(lambda: f64) -> Result<RadialFunction> {
    check_lambda(lambda)?;
    Ok(RadialFunction {
        n: 2,
        shape: RadialShape::Example51 { lambda },
    })
}

/// `mu(t)`: the area of `{u_lambda > t}` on the sphere.
pub fn example51_distribution(lambda: f64, t: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(if t < 0.0 {
        4.0 * PI
    } else if t >= 1.0 {
        0.0
    } else {
        2.0 * PI * (1.0 + (1.0 - (t / lambda).powi(2)).sqrt())
    })
}

/// An improper integral that is either finite or divergent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Improper {
    Finite(f64),
    Divergent,
}

impl Improper {
    pub fn value(&self) -> Option<f64> {
        match self {
            Improper::Finite(v) => Some(*v),
            Improper::Divergent => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, Improper::Divergent)
    }
}

/// Both sides of the counterexample energy comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Example51Integrals {
    pub lambda: f64,
    pub p: f64,
    /// `int_{S^2} |grad u_lambda|^p`
    pub surface: f64,
    /// `int_{R^2} |grad u*_lambda|^p`
    pub plane: Improper,
    /// Estimated exponent `a` in `|rho'|^p s ~ (2 - s)^{-a}` at the support edge.
    pub endpoint_exponent: f64,
}

/// `int_{S^2} |grad u_lambda|^p` in closed form.
///
/// On the cap `|grad u_lambda| = lambda z`, so the integral is
/// `2 pi lambda^p (1 - (1 - 1/lambda^2)^{(p+1)/2}) / (p + 1)`.
pub fn example51_surface_integral(lambda: f64, p: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_p(p)?;
    let eps = 1.0 / (lambda * lambda);
    let bracket = -(0.5 * (p + 1.0) * (-eps).ln_1p()).exp_m1();
    Ok(2.0 * PI * lambda.powf(p) * bracket / (p + 1.0))
}

/// `int_{S^2} |H|^p u_lambda^p` with `|H| = 2`.
pub fn example51_curvature_term(lambda: f64, p: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_p(p)?;
    let phi0 = (1.0 / lambda).asin();
    let cap_area = 2.0 * PI * (1.0 - phi0.cos());
    let cap = integrate(
        |phi| (lambda * phi.sin()).powf(p) * 2.0 * PI * phi.sin(),
        0.0,
        phi0,
        Tolerance::relative(1e-12),
    )?;
    Ok(2f64.powf(p) * (4.0 * PI - cap_area + cap))
}

/// `|rho'(2 - e)|`, written in `e` to avoid cancellation in `1 - y^2`.
fn rho_prime_near_edge(lambda: f64, e: f64) -> f64 {
    let s = 2.0 - e;
    let one_minus_y = e * (4.0 - e) / 2.0;
    let y = 1.0 - one_minus_y;
    lambda * s * y / (one_minus_y * (1.0 + y)).sqrt()
}

/// Width `2 - s0` of the region where `rho` decreases.
fn support_width(lambda: f64) -> f64 {
    let y = (1.0 - 1.0 / (lambda * lambda)).sqrt();
    let four_minus_s0_sq = 2.0 / (lambda * lambda * (1.0 + y));
    four_minus_s0_sq / (2.0 + plateau_radius(lambda))
}

/// Estimates the exponent `a` with `f(e) ~ e^{-a}` as `e -> 0` from two
/// probes far inside the support width.
fn endpoint_exponent<F: Fn(f64) -> f64>(width: f64, f: F) -> f64 {
    let (e1, e2) = (1e-8 * width, 1e-10 * width);
    (f(e2) / f(e1)).ln() / (e1 / e2).ln()
}

/// `int_{R^2} |grad u*_lambda|^p`, classified as divergent when the
/// integrand's endpoint exponent at `s = 2` reaches 1.
///
/// The finite case is computed through the co-area formula,
/// `int_0^1 |rho'(tau(t))|^{p-1} 2 pi tau(t) dt` with
/// `|rho'(tau)| = lambda^2 tau Y / t`, `Y = sqrt(1 - t^2/lambda^2)`,
/// `tau^2 = 2 (1 + Y)`, after the substitution `t = w^{1/(2-p)}` that
/// removes the `t^{1-p}` singularity.
pub fn example51_plane_integral(lambda: f64, p: f64) -> Result<(Improper, f64)> {
    check_lambda(lambda)?;
    check_p(p)?;
    let exponent = endpoint_exponent(support_width(lambda), |e| rho_prime_near_edge(lambda, e).powf(p) * (2.0 - e));
    if exponent >= 1.0 - 1e-6 {
        return Ok((Improper::Divergent, exponent));
    }
    let k = 1.0 / (2.0 - p);
    let value = integrate(
        |w| {
            let t = w.powf(k);
            let y = (1.0 - (t / lambda).powi(2)).sqrt();
            let tau = (2.0 * (1.0 + y)).sqrt();
            (lambda * lambda * tau * y).powf(p - 1.0) * 2.0 * PI * tau * k
        },
        0.0,
        1.0,
        Tolerance::relative(1e-11),
    )?;
    Ok((Improper::Finite(value), exponent))
}

/// Surface and plane energies of `u_lambda` for one `(lambda, p)`.
pub fn example51_gradient_integrals(lambda: f64, p: f64) -> Result<Example51Integrals> {
    let surface = example51_surface_integral(lambda, p)?;
    let (plane, endpoint_exponent) = example51_plane_integral(lambda, p)?;
    Ok(Example51Integrals {
        lambda,
        p,
        surface,
        plane,
        endpoint_exponent,
    })
}

/// Which large-`lambda` asymptote of the plane energy to compare against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneAsymptote {
    /// `pi 2^{2p - p/2} lambda^{2p-2} / (2 - p)`, the reference closed form.
    Reference,
    /// `4 pi 2^{p-1} lambda^{2p-2} / (2 - p)`, the limit of the co-area integral.
    Derived,
}

/// Leading-order plane energy for `1 <= p < 2`.
pub fn plane_asymptote(lambda: f64, p: f64, which: PlaneAsymptote) -> Result<f64> {
    check_lambda(lambda)?;
    if !(1.0..2.0).contains(&p) {
        return domain(format!("asymptote defined for 1 <= p < 2, got {p}"));
    }
    let scale = lambda.powf(2.0 * p - 2.0) / (2.0 - p);
    Ok(match which {
        PlaneAsymptote::Reference => PI * 2f64.powf(2.0 * p - p / 2.0) * scale,
        PlaneAsymptote::Derived => 4.0 * PI * 2f64.powf(p - 1.0) * scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::radial::radial_integral;

    #[test]
    fn field_values() {
        assert_eq!(example51_field(1.0, &[0.0, 0.0, 1.0]).unwrap(), 0.0);
        assert_eq!(example51_field(1.0, &[1.0, 0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(example51_field(3.0, &[0.0, 0.6, -0.8]).unwrap(), 1.0);
        assert!((example51_field(10.0, &[0.05, 0.0, 0.99875]).unwrap() - 0.5).abs() < 1e-15);
        assert!(example51_field(0.5, &[0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn profile_shape() {
        for lambda in [1.0, 2.0, 10.0, 100.0] {
            let rf = example51_profile(lambda).unwrap();
            let s0 = plateau_radius(lambda);
            assert_eq!(rf.value(2.0), 0.0);
            assert_eq!(rf.value(0.5 * s0), 1.0);
            assert!((rf.value(s0 * (1.0 + 1e-12)) - 1.0).abs() < 1e-5);
            // inverting rho recovers the cap areas
            for t in [0.1, 0.5, 0.9] {
                let y = (1.0 - (t / lambda).powi(2)).sqrt();
                let tau = (2.0 * (1.0 + y)).sqrt();
                assert!((rf.value(tau) - t).abs() < 1e-9 * lambda);
                let mu = example51_distribution(lambda, t).unwrap();
                assert!((PI * tau * tau - mu).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn equimeasurable_with_the_field() {
        // area of {rho > t} in the plane against mu(t) from the cap formula
        let lambda = 5.0;
        let rf = example51_profile(lambda).unwrap();
        for t in [0.2, 0.6] {
            let area = radial_integral(&rf, |v, _| if v > t { 1.0 } else { 0.0 }).unwrap();
            assert!((area / example51_distribution(lambda, t).unwrap() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn surface_integral_matches_quadrature() {
        for (lambda, p) in [(1.0, 1.0), (3.0, 1.5), (100.0, 1.0), (50.0, 2.5)] {
            let phi0 = (1.0f64 / lambda).asin();
            let quad = integrate(
                |phi: f64| (lambda * phi.cos()).powf(p) * 2.0 * PI * phi.sin(),
                0.0,
                phi0,
                Tolerance::relative(1e-12),
            )
            .unwrap();
            let closed = example51_surface_integral(lambda, p).unwrap();
            assert!((closed / quad - 1.0).abs() < 1e-10, "{lambda} {p}");
        }
        let s = example51_surface_integral(100.0, 1.0).unwrap();
        assert!((s - PI / 100.0).abs() < 1e-15);
    }

    #[test]
    fn plane_integral_against_direct_quadrature() {
        // direct s-integration with the (2 - s)^{-p/2} edge removed by s = 2 - v^m
        for (lambda, p) in [(2.0, 1.0), (10.0, 1.5), (3.0, 1.2)] {
            let s0 = plateau_radius(lambda);
            let m = 2.0 / (2.0 - p);
            let direct = integrate(
                |v: f64| {
                    // |rho'| written in e = 2 - s to avoid cancellation in 1 - y^2
                    let e = v.powf(m);
                    let s = 2.0 - e;
                    let one_minus_y = e * (4.0 - e) / 2.0;
                    let y = 1.0 - one_minus_y;
                    let d = lambda * s * y / (one_minus_y * (1.0 + y)).sqrt();
                    d.powf(p) * 2.0 * PI * s * m * v.powf(m - 1.0)
                },
                0.0,
                (2.0 - s0).powf(1.0 / m),
                Tolerance::relative(1e-11),
            )
            .unwrap();
            let (plane, exponent) = example51_plane_integral(lambda, p).unwrap();
            assert!((plane.value().unwrap() / direct - 1.0).abs() < 1e-8, "{lambda} {p}");
            assert!((exponent - p / 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn plane_values_frozen_from_high_precision() {
        let cases = [
            (10.0, 1.0, 12.561_1),
            (100.0, 1.0, 12.566_32),
            (1000.0, 1.0, 12.566_370),
            (10.0, 1.5, 355.119),
            (100.0, 1.5, 3554.275),
            (1000.0, 1.5, 35_543.06),
        ];
        for (lambda, p, v) in cases {
            let got = example51_plane_integral(lambda, p).unwrap().0.value().unwrap();
            assert!((got / v - 1.0).abs() < 2e-5, "{lambda} {p}: {got} vs {v}");
        }
    }

    #[test]
    fn divergence_from_p_two() {
        for p in [2.0, 2.5, 4.0] {
            assert!(example51_plane_integral(10.0, p).unwrap().0.is_divergent());
        }
        assert!(!example51_plane_integral(10.0, 1.99).unwrap().0.is_divergent());
    }

    #[test]
    fn curvature_term() {
        // lambda = 1: the cap is the open upper hemisphere with u = r
        let c = example51_curvature_term(1.0, 1.0).unwrap();
        let cap = PI * PI / 2.0; // int_0^{pi/2} 2 pi sin^2
        assert!((c - 2.0 * (2.0 * PI + cap)).abs() < 1e-10);
        let big = example51_curvature_term(1e4, 1.5).unwrap();
        assert!((big / (2f64.powf(1.5) * 4.0 * PI) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn asymptotes() {
        let reference = plane_asymptote(100.0, 1.0, PlaneAsymptote::Reference).unwrap();
        assert!((reference - 2f64.powf(1.5) * PI).abs() < 1e-12);
        let derived = plane_asymptote(100.0, 1.0, PlaneAsymptote::Derived).unwrap();
        assert!((derived - 4.0 * PI).abs() < 1e-12);
        assert!(plane_asymptote(10.0, 2.0, PlaneAsymptote::Derived).is_err());
    }
}
