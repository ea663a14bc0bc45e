//! The energy-growth counterexample on the round sphere.
//!
//! For `u_lambda` on `S^2` the plane energy of the rearrangement outgrows
//! `N (int |grad u|^p + int |H|^p u^p)` for every `N` once `1 < p < 2` and
//! `lambda` is large, and it is infinite for `p >= 2`.

use serde::{Deserialize, Serialize};

use crate::analytic::{
    example51_curvature_term, example51_gradient_integrals, example51_vertex_field, make_surface,
    plane_asymptote, Improper, PlaneAsymptote, Surface,
};
use crate::error::{domain, Error, Result};

/// Largest `lambda` at which the mesh cross-check is trusted.
pub const MESH_LAMBDA_LIMIT: f64 = 20.0;

/// Relative disagreement above which a mesh cross-check is flagged.
pub const MESH_AGREEMENT: f64 = 0.05;

/// One `(lambda, p)` row of the sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub p: f64,
    pub surface_grad_p: f64,
    /// `int |H|^p u^p` with `|H| = 2`.
    pub curvature_term: f64,
    pub plane_grad_p: Improper,
    /// `plane / (surface + curvature)`; `None` when the plane energy diverges.
    pub ratio: Option<f64>,
    /// `plane / surface`, the quantity that grows like `lambda^p`.
    pub plane_to_surface: Option<f64>,
    /// Surface energy of the P1 interpolant on an icosphere.
    pub mesh_surface_grad_p: Option<f64>,
    /// The mesh value is outside its trusted range or disagrees by more than 5%.
    pub mesh_flagged: bool,
}

impl SweepRow {
    /// `(surface + curvature) / plane`, zero when the plane energy diverges.
    pub fn inverse_ratio(&self) -> f64 {
        self.ratio.map_or(0.0, |r| 1.0 / r)
    }
}

fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    if let Some(&l) = lambdas.iter().find(|&&l| !(l >= 1.0) || !l.is_finite()) {
        return domain(format!("lambda must be a finite real >= 1, got {l}"));
    }
    Ok(())
}

/// The closed-form row for one `lambda`.
pub fn sweep_row(p: f64, lambda: f64) -> Result<SweepRow> {
    let ints = example51_gradient_integrals(lambda, p)?;
    let curvature_term = example51_curvature_term(lambda, p)?;
    let (ratio, plane_to_surface) = match ints.plane {
        Improper::Finite(v) => (Some(v / (ints.surface + curvature_term)), Some(v / ints.surface)),
        Improper::Divergent => (None, None),
    };
    Ok(SweepRow {
        lambda,
        p,
        surface_grad_p: ints.surface,
        curvature_term,
        plane_grad_p: ints.plane,
        ratio,
        plane_to_surface,
        mesh_surface_grad_p: None,
        mesh_flagged: false,
    })
}

/// Closed-form rows for every `lambda`, in input order.
pub fn sweep(p: f64, lambdas: &[f64]) -> Result<Vec<SweepRow>> {
    check_lambdas(lambdas)?;
    lambdas.iter().map(|&l| sweep_row(p, l)).collect()
}

/// Adds the surface energy of `u_lambda` interpolated on an icosphere.
pub fn cross_check_row(row: &mut SweepRow, subdivision: u32) -> Result<()> {
    let mesh = make_surface(&Surface::Sphere { subdivision })?;
    let field = example51_vertex_field(&mesh, row.lambda)?;
    let value = mesh.p1_gradient_lp(&field, row.p)?;
    row.mesh_surface_grad_p = Some(value);
    row.mesh_flagged =
        row.lambda > MESH_LAMBDA_LIMIT || (value / row.surface_grad_p - 1.0).abs() > MESH_AGREEMENT;
    Ok(())
}

/// Least-squares slope of `ln y` against `ln lambda`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return domain("slope needs at least two points");
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return domain("slope needs two distinct lambda values");
    }
    Ok(sxy / sxx)
}

/// Result of the threshold search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaBar {
    pub n: u64,
    pub p: f64,
    pub lambda_bar: f64,
    /// The plane energy diverges, so every `lambda >= 1` qualifies.
    pub divergent: bool,
}

/// Default upper end of the `lambda` search.
pub const LAMBDA_CEILING: f64 = 1e12;

fn exceeds(n: f64, p: f64, lambda: f64) -> Result<bool> {
    let row = sweep_row(p, lambda)?;
    Ok(match row.plane_grad_p {
        Improper::Divergent => true,
        Improper::Finite(v) => v > n * (row.surface_grad_p + row.curvature_term),
    })
}

/// Smallest `lambda` with `plane > N (surface + curvature)`.
///
/// Walks the grid `1.1^k` up to `ceiling`, then bisects between the last
/// failing and first passing grid points to three significant digits.
pub fn find_lambda_bar_with(n: u64, p: f64, ceiling: f64) -> Result<LambdaBar> {
    if n == 0 {
        return domain("N must be a positive integer");
    }
    if !(p > 1.0) || !p.is_finite() {
        return domain(format!("threshold search needs p > 1, got {p}"));
    }
    if p >= 2.0 {
        return Ok(LambdaBar {
            n,
            p,
            lambda_bar: 1.0,
            divergent: true,
        });
    }
    let nf = n as f64;
    let mut lo = 1.0;
    if exceeds(nf, p, lo)? {
        return Ok(LambdaBar {
            n,
            p,
            lambda_bar: 1.0,
            divergent: false,
        });
    }
    let mut hi = lo * 1.1;
    while !exceeds(nf, p, hi)? {
        lo = hi;
        hi *= 1.1;
        if hi > ceiling {
            return Err(Error::SearchCeiling(ceiling));
        }
    }
    while (hi - lo) > 5e-4 * hi {
        let mid = 0.5 * (lo + hi);
        if exceeds(nf, p, mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(LambdaBar {
        n,
        p,
        lambda_bar: round_sig(hi, 3),
        divergent: false,
    })
}

pub fn find_lambda_bar(n: u64, p: f64) -> Result<LambdaBar> {
    find_lambda_bar_with(n, p, LAMBDA_CEILING)
}

fn round_sig(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits - 1 - x.abs().log10().floor() as i32);
    (x * scale).ceil() / scale
}

/// Computed-to-asymptotic ratios at one `lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCheck {
    pub lambda: f64,
    pub p: f64,
    /// `surface / (pi lambda^{p-2})`
    pub surface_ratio: f64,
    /// `plane / (pi 2^{2p - p/2} lambda^{2p-2} / (2 - p))`
    pub plane_ratio: f64,
    /// `plane / (4 pi 2^{p-1} lambda^{2p-2} / (2 - p))`
    pub plane_ratio_derived: f64,
}

pub fn asymptotic_check(p: f64, lambda: f64) -> Result<AsymptoticCheck> {
    if !(1.0..2.0).contains(&p) {
        return domain(format!("asymptotics hold for 1 <= p < 2, got {p}"));
    }
    let ints = example51_gradient_integrals(lambda, p)?;
    let plane = ints
        .plane
        .value()
        .ok_or_else(|| Error::Divergent(format!("plane energy at p = {p}")))?;
    Ok(AsymptoticCheck {
        lambda,
        p,
        surface_ratio: ints.surface / (std::f64::consts::PI * lambda.powf(p - 2.0)),
        plane_ratio: plane / plane_asymptote(lambda, p, PlaneAsymptote::Reference)?,
        plane_ratio_derived: plane / plane_asymptote(lambda, p, PlaneAsymptote::Derived)?,
    })
}

/// Sweep table with gnuplot-friendly columns.
pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record([
        "lambda",
        "p",
        "surface_grad_p",
        "curvature_term",
        "plane_grad_p",
        "ratio",
        "plane_to_surface",
        "mesh_surface_grad_p",
        "mesh_flagged",
    ])?;
    let num = |v: f64| format!("{v:.12e}");
    let opt = |v: Option<f64>, none: &str| v.map_or(none.to_string(), num);
    for r in rows {
        wtr.write_record([
            num(r.lambda),
            num(r.p),
            num(r.surface_grad_p),
            num(r.curvature_term),
            opt(r.plane_grad_p.value(), "divergent"),
            opt(r.ratio, "inf"),
            opt(r.plane_to_surface, "inf"),
            opt(r.mesh_surface_grad_p, ""),
            r.mesh_flagged.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
