//! Inequality verdicts on meshes and radial functions.
//!
//! Every verifier assembles the two sides of one inequality and returns a
//! [`VerificationReport`]. Inequalities of the form `A >= B` are reported with
//! `lhs = B` and `rhs = A`, so `pass` always means `lhs <= rhs (1 + tolerance)`.
//!
//! Surfaces are triangle meshes, so the intrinsic dimension is always 2 and the
//! codimension is `dim - 2`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::{self, RadialFunction};
use crate::constants::{
    egn_constant, euclidean_iso_ratio, gn_constant, iso_constant, log_sobolev_constant, ps_constant,
    sobolev_conjugate, spectral_gap_constant, talenti_constant, EgnReading, GapReading, GnExponents,
    IsoperimetricChoice,
};
use crate::error::{domain, Error, Result};
use crate::measure_space::{rearrange_linear, DiscreteMeasuredFunction, RadialProfile, TargetMeasure};
use crate::mesh::{CurvatureReport, TriMesh, VertexField};

/// Version of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Surfaces handled by the mesh pipeline are two-dimensional.
const SURFACE_DIM: u32 = 2;

/// Absolute slack when comparing a measured total mean curvature with `K`.
const CURVATURE_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    PolyaSzego,
    PolyaSzegoModelSpace,
    Isoperimetric,
    PSobolev,
    GagliardoNirenberg,
    SpectralGap,
    LogSobolev,
    MichaelSimonP1,
    MonotonicityPrinciple,
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            InequalityId::PolyaSzego => "polya_szego",
            InequalityId::PolyaSzegoModelSpace => "polya_szego_model_space",
            InequalityId::Isoperimetric => "isoperimetric",
            InequalityId::PSobolev => "p_sobolev",
            InequalityId::GagliardoNirenberg => "gagliardo_nirenberg",
            InequalityId::SpectralGap => "spectral_gap",
            InequalityId::LogSobolev => "log_sobolev",
            InequalityId::MichaelSimonP1 => "michael_simon_p1",
            InequalityId::MonotonicityPrinciple => "monotonicity_principle",
        };
        f.write_str(s)
    }
}

/// Parameters a report was computed from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportInputs {
    pub n: u32,
    pub m: Option<u32>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    pub lambda: Option<f64>,
    pub mesh_id: Option<String>,
    pub choice: Option<IsoperimetricChoice>,
    pub reading: Option<String>,
    pub subdivision: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub inequality_id: InequalityId,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; absent only when `rhs = 0`.
    pub ratio: Option<f64>,
    pub pass: bool,
    pub tolerance: f64,
    /// The hypothesis of a conditional inequality failed, so nothing was tested.
    #[serde(default)]
    pub vacuous: bool,
    pub inputs: ReportInputs,
    /// Auxiliary quantities, such as the other reading of a constant.
    #[serde(default)]
    pub extras: BTreeMap<String, f64>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn new(id: InequalityId, lhs: f64, rhs: f64, tolerance: f64, inputs: ReportInputs) -> Self {
        let ratio = if rhs != 0.0 {
            Some(lhs / rhs)
        } else if lhs == 0.0 {
            Some(0.0)
        } else {
            None
        };
        Self {
            schema_version: SCHEMA_VERSION,
            inequality_id: id,
            lhs,
            rhs,
            ratio,
            pass: lhs <= rhs * (1.0 + tolerance),
            tolerance,
            vacuous: false,
            inputs,
            extras: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn extra(mut self, key: &str, value: f64) -> Self {
        self.extras.insert(key.to_string(), value);
        self
    }

    fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.inputs.lambda = Some(lambda);
        self
    }

    /// Failed and not vacuous.
    pub fn is_failure(&self) -> bool {
        !self.pass && !self.vacuous
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// CSV summary with one row per report.
pub fn write_reports_csv<W: Write>(reports: &[VerificationReport], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["id", "n", "p", "q", "K", "lhs", "rhs", "ratio", "pass"])?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
    for r in reports {
        wtr.write_record([
            r.inequality_id.to_string(),
            r.inputs.n.to_string(),
            opt(r.inputs.p),
            opt(r.inputs.q),
            opt(r.inputs.k),
            format!("{:.17e}", r.lhs),
            format!("{:.17e}", r.rhs),
            opt(r.ratio),
            r.pass.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Discretisation allowance for a sampling subdivision level.
pub fn default_tolerance(subdivision: u32) -> f64 {
    match subdivision {
        0 => 0.05,
        1 => 0.03,
        _ => 0.01,
    }
}

/// Knobs shared by the mesh verifiers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Each triangle is sampled at the centroids of `4^subdivision` sub-triangles.
    pub subdivision: u32,
    /// Overrides [`default_tolerance`].
    pub tolerance: Option<f64>,
    pub mesh_id: Option<String>,
    /// Largest interior `|H|` accepted as minimal.
    pub flatness_threshold: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            subdivision: 2,
            tolerance: None,
            mesh_id: None,
            flatness_threshold: 0.1,
        }
    }
}

impl VerifyOptions {
    fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or_else(|| default_tolerance(self.subdivision))
    }

    fn inputs(&self, mesh: &TriMesh) -> ReportInputs {
        ReportInputs {
            n: SURFACE_DIM,
            m: Some(mesh.dim() as u32 - SURFACE_DIM),
            mesh_id: self.mesh_id.clone(),
            subdivision: Some(self.subdivision),
            ..ReportInputs::default()
        }
    }
}

/// Where a functional inequality is evaluated.
#[derive(Clone, Copy, Debug)]
pub enum Subject<'a> {
    Mesh { mesh: &'a TriMesh, field: &'a VertexField },
    Radial(&'a RadialFunction),
}

/// Enforces `TC(mesh) <= K < 1/C`.
///
/// A closed surface always has `TC >= 1/C`, so the smallest bound it could
/// satisfy is reported as the offending `K`.
pub fn check_curvature_bound(mesh: &TriMesh, k: f64, choice: IsoperimetricChoice) -> Result<CurvatureReport> {
    let limit = 1.0 / choice.value(SURFACE_DIM)?;
    ps_constant(SURFACE_DIM, k, choice)?;
    let report = mesh.mean_curvature();
    let tc = report.total_mean_curvature;
    if mesh.is_closed() {
        return Err(Error::CurvatureBoundViolated { k: tc.max(limit), limit });
    }
    if tc > k + CURVATURE_SLACK * (1.0 + k) {
        return Err(Error::CurvatureExceedsBound { measured: tc, k });
    }
    Ok(report)
}

fn check_boundary(mesh: &TriMesh, field: &VertexField) -> Result<()> {
    if field.len() != mesh.vertex_count() {
        return Err(Error::SizeMismatch {
            expected: mesh.vertex_count(),
            found: field.len(),
        });
    }
    if !field.vanishes_on_boundary(mesh) {
        return domain("field must vanish on the mesh boundary");
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return domain(format!("exponent must be a finite real >= 1, got {p}"));
    }
    Ok(())
}

fn samples(mesh: &TriMesh, field: &VertexField, opts: &VerifyOptions) -> Result<DiscreteMeasuredFunction> {
    mesh.sample_field(field, opts.subdivision)
}

fn rearranged(mesh: &TriMesh, field: &VertexField, target: &TargetMeasure, opts: &VerifyOptions) -> Result<RadialProfile> {
    Ok(rearrange_linear(&samples(mesh, field, opts)?, target))
}

/// `sum_i w_i f(v_i)` over the samples.
fn sample_integral<F: Fn(f64) -> f64>(dmf: &DiscreteMeasuredFunction, f: F) -> f64 {
    dmf.samples().iter().map(|s| s.weight * f(s.value)).sum()
}

/// `int u^2` for the P1 interpolant, exact per triangle.
fn p1_l2_squared(mesh: &TriMesh, field: &VertexField) -> f64 {
    let u = field.values();
    mesh.triangles()
        .iter()
        .enumerate()
        .map(|(t, tri)| {
            let (a, b, c) = (u[tri[0]], u[tri[1]], u[tri[2]]);
            mesh.triangle_area(t) / 6.0 * (a * a + b * b + c * c + a * b + b * c + c * a)
        })
        .sum()
}

fn p1_gradient_norm(mesh: &TriMesh, field: &VertexField, p: f64) -> Result<f64> {
    Ok(mesh.p1_gradient_lp(field, p)?.powf(1.0 / p))
}

/// `||grad u*||_p <= PS(2, K) ||grad_S u||_p`.
pub fn verify_polya_szego(
    mesh: &TriMesh,
    field: &VertexField,
    p: f64,
    k: f64,
    choice: IsoperimetricChoice,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    check_p(p)?;
    check_curvature_bound(mesh, k, choice)?;
    check_boundary(mesh, field)?;
    let ps = ps_constant(SURFACE_DIM, k, choice)?;
    let profile = rearranged(mesh, field, &TargetMeasure::lebesgue(SURFACE_DIM)?, opts)?;
    let lhs = profile.gradient_norm(p)?;
    let rhs = ps * p1_gradient_norm(mesh, field, p)?;
    let inputs = ReportInputs {
        p: Some(p),
        k: Some(k),
        choice: Some(choice),
        ..opts.inputs(mesh)
    };
    Ok(VerificationReport::new(InequalityId::PolyaSzego, lhs, rhs, opts.tolerance(), inputs).extra("ps_constant", ps))
}

/// Rearrangement onto the model space, compared with the surface energy.
///
/// The model-space energy is an infimum over approximating sequences; the
/// energy of the rearranged profile bounds it from above, so a pass is
/// conclusive and a failure is not.
pub fn verify_model_space_ps(
    mesh: &TriMesh,
    field: &VertexField,
    p: f64,
    k: f64,
    choice: IsoperimetricChoice,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    check_p(p)?;
    check_curvature_bound(mesh, k, choice)?;
    check_boundary(mesh, field)?;
    let dmf = samples(mesh, field, opts)?;
    let model = rearrange_linear(&dmf, &TargetMeasure::model_space_for(SURFACE_DIM, k, choice)?);
    let euclid = rearrange_linear(&dmf, &TargetMeasure::lebesgue(SURFACE_DIM)?);
    let lhs = model.gradient_norm(p)?;
    let rhs = p1_gradient_norm(mesh, field, p)?;
    let inputs = ReportInputs {
        p: Some(p),
        k: Some(k),
        choice: Some(choice),
        ..opts.inputs(mesh)
    };
    Ok(
        VerificationReport::new(InequalityId::PolyaSzegoModelSpace, lhs, rhs, opts.tolerance(), inputs)
            .extra("euclidean_lhs", euclid.gradient_norm(p)?)
            .note("lhs is the energy of the rearranged representative, an upper bound for the model-space energy; a failure is inconclusive"),
    )
}

/// Triangle sets whose interior lies in `{u > t}` for each level `t`.
pub fn superlevel_regions(mesh: &TriMesh, field: &VertexField, levels: &[f64]) -> Result<Vec<Vec<usize>>> {
    levels.iter().map(|&t| mesh.superlevel_triangles(field, t)).collect()
}

/// `area(R)^{1/2} <= I(2, K) length(dR)` for each region.
///
/// The curvature bound is checked on the whole mesh, which bounds the total
/// mean curvature of every region.
pub fn verify_isoperimetric(
    mesh: &TriMesh,
    k: f64,
    choice: IsoperimetricChoice,
    regions: &[Vec<usize>],
    opts: &VerifyOptions,
) -> Result<Vec<VerificationReport>> {
    check_curvature_bound(mesh, k, choice)?;
    let iso = iso_constant(SURFACE_DIM, k, choice)?;
    let tol = opts.tolerance.unwrap_or(default_tolerance(2));
    regions
        .iter()
        .map(|region| {
            if region.is_empty() {
                return domain("isoperimetric region is empty");
            }
            if let Some(&t) = region.iter().find(|&&t| t >= mesh.triangle_count()) {
                return domain(format!("triangle index {t} out of range"));
            }
            let area = mesh.hausdorff_measure(Some(region));
            let perimeter = mesh.boundary_measure(Some(region));
            let inputs = ReportInputs {
                k: Some(k),
                choice: Some(choice),
                subdivision: None,
                ..opts.inputs(mesh)
            };
            Ok(VerificationReport::new(InequalityId::Isoperimetric, area.sqrt(), iso * perimeter, tol, inputs)
                .extra("area", area)
                .extra("perimeter", perimeter)
                .extra("triangles", region.len() as f64))
        })
        .collect()
}

/// `||u||_{p*} <= TA(2, p) PS(2, K) ||grad u||_p` for `1 < p < 2`.
pub fn verify_p_sobolev(
    mesh: &TriMesh,
    field: &VertexField,
    p: f64,
    k: f64,
    choice: IsoperimetricChoice,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let p_star = sobolev_conjugate(SURFACE_DIM, p)?;
    let ta = talenti_constant(SURFACE_DIM, p)?;
    check_curvature_bound(mesh, k, choice)?;
    check_boundary(mesh, field)?;
    let ps = ps_constant(SURFACE_DIM, k, choice)?;
    let lhs = samples(mesh, field, opts)?.lp_norm(p_star)?;
    let rhs = ta * ps * p1_gradient_norm(mesh, field, p)?;
    let inputs = ReportInputs {
        p: Some(p),
        k: Some(k),
        choice: Some(choice),
        ..opts.inputs(mesh)
    };
    Ok(VerificationReport::new(InequalityId::PSobolev, lhs, rhs, opts.tolerance(), inputs)
        .extra("p_star", p_star)
        .extra("talenti", ta))
}

fn reading_name(r: EgnReading) -> &'static str {
    match r {
        EgnReading::Literal => "literal",
        EgnReading::GammaCorrected => "corrected",
    }
}

fn other_reading(r: EgnReading) -> EgnReading {
    match r {
        EgnReading::Literal => EgnReading::GammaCorrected,
        EgnReading::GammaCorrected => EgnReading::Literal,
    }
}

/// `||u||_r <= GN ||grad u||_p^theta ||u||_q^{1 - theta}`.
///
/// Radial inputs live on `R^n`, where the constant is the Euclidean one. The
/// other reading of the constant is reported alongside when it is defined.
pub fn verify_gn(
    subject: Subject<'_>,
    p: f64,
    q: f64,
    k: f64,
    choice: IsoperimetricChoice,
    reading: EgnReading,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let (n, lhs, grad, norm_q, ps, inputs, tol) = match subject {
        Subject::Mesh { mesh, field } => {
            let ex = GnExponents::new(SURFACE_DIM, p, q)?;
            check_curvature_bound(mesh, k, choice)?;
            check_boundary(mesh, field)?;
            let dmf = samples(mesh, field, opts)?;
            let inputs = ReportInputs {
                k: Some(k),
                choice: Some(choice),
                ..opts.inputs(mesh)
            };
            (
                SURFACE_DIM,
                dmf.lp_norm(ex.r)?,
                p1_gradient_norm(mesh, field, p)?,
                dmf.lp_norm(q)?,
                ps_constant(SURFACE_DIM, k, choice)?,
                inputs,
                opts.tolerance(),
            )
        }
        Subject::Radial(rf) => {
            let ex = GnExponents::new(rf.n, p, q)?;
            let inputs = ReportInputs {
                n: rf.n,
                ..ReportInputs::default()
            };
            (
                rf.n,
                analytic::lp_norm(rf, ex.r)?,
                analytic::gradient_norm(rf, p)?,
                analytic::lp_norm(rf, q)?,
                1.0,
                inputs,
                opts.tolerance.unwrap_or(1e-6),
            )
        }
    };
    let ex = GnExponents::new(n, p, q)?;
    let factor = grad.powf(ex.theta) * norm_q.powf(1.0 - ex.theta);
    let gn = match subject {
        Subject::Mesh { .. } => gn_constant(n, p, q, k, choice, reading)?,
        Subject::Radial(_) => egn_constant(n, p, q, reading)?,
    };
    let inputs = ReportInputs {
        n,
        p: Some(p),
        q: Some(q),
        reading: Some(reading_name(reading).to_string()),
        ..inputs
    };
    let mut report = VerificationReport::new(InequalityId::GagliardoNirenberg, lhs, gn * factor, tol, inputs)
        .extra("theta", ex.theta)
        .extra("r", ex.r)
        .extra("constant", gn);
    let other = other_reading(reading);
    match egn_constant(n, p, q, other) {
        Ok(c) => {
            let rhs = c * ps * factor;
            report = report
                .extra(&format!("rhs_{}", reading_name(other)), rhs)
                .extra(&format!("ratio_{}", reading_name(other)), lhs / rhs);
        }
        Err(e) => report = report.note(format!("{} reading unavailable: {e}", reading_name(other))),
    }
    Ok(report)
}

fn gap_reading_name(r: GapReading) -> &'static str {
    match r {
        GapReading::Literal => "literal",
        GapReading::FaberKrahnConsistent => "corrected",
    }
}

/// `G(n, K) / |Omega|^{2/n} <= int |grad u|^2 / int u^2`, reported with the
/// bound as `lhs` and the Rayleigh quotient as `rhs`.
///
/// `Omega` is the support of the field: the triangles with a positive corner
/// on a mesh, the ball of the support radius for a radial function. Radial
/// inputs use the Euclidean constant.
pub fn verify_spectral_gap(
    subject: Subject<'_>,
    k: f64,
    choice: IsoperimetricChoice,
    reading: GapReading,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let (n, quotient, support, k, choice, inputs, tol) = match subject {
        Subject::Mesh { mesh, field } => {
            check_curvature_bound(mesh, k, choice)?;
            check_boundary(mesh, field)?;
            if field.is_zero() {
                return Err(Error::ZeroField);
            }
            let u = field.values();
            let support: Vec<usize> = (0..mesh.triangle_count())
                .filter(|&t| mesh.triangles()[t].iter().any(|&v| u[v] > 0.0))
                .collect();
            let quotient = mesh.p1_gradient_lp(field, 2.0)? / p1_l2_squared(mesh, field);
            let inputs = ReportInputs {
                k: Some(k),
                choice: Some(choice),
                subdivision: None,
                ..opts.inputs(mesh)
            };
            let tol = opts.tolerance.unwrap_or(default_tolerance(2));
            (SURFACE_DIM, quotient, mesh.hausdorff_measure(Some(&support)), k, choice, inputs, tol)
        }
        Subject::Radial(rf) => {
            let radius = rf.support_radius();
            if !radius.is_finite() {
                return domain("spectral gap needs a compactly supported function");
            }
            let mass = analytic::radial_integral(rf, |v, _| v * v)?;
            if mass == 0.0 {
                return Err(Error::ZeroField);
            }
            let energy = analytic::radial_integral(rf, |_, d| d * d)?;
            let n = rf.n;
            let volume = crate::special_fn::unit_ball_volume(n) * radius.powi(n as i32);
            let inputs = ReportInputs {
                n,
                ..ReportInputs::default()
            };
            let tol = opts.tolerance.unwrap_or(default_tolerance(2));
            (n, energy / mass, volume, 0.0, IsoperimetricChoice::Brendle { codim: 1 }, inputs, tol)
        }
    };
    let scale = support.powf(-2.0 / f64::from(n));
    let bound = spectral_gap_constant(n, k, choice, reading)? * scale;
    let other = match reading {
        GapReading::Literal => GapReading::FaberKrahnConsistent,
        GapReading::FaberKrahnConsistent => GapReading::Literal,
    };
    let other_bound = spectral_gap_constant(n, k, choice, other)? * scale;
    let inputs = ReportInputs {
        n,
        reading: Some(gap_reading_name(reading).to_string()),
        ..inputs
    };
    Ok(VerificationReport::new(InequalityId::SpectralGap, bound, quotient, tol, inputs)
        .extra("support_measure", support)
        .extra(&format!("lhs_{}", gap_reading_name(other)), other_bound)
        // the bound grows like |Omega|^{-2/n}: halving the support radius multiplies it by 4
        .extra("lhs_at_half_radius", bound * 4.0))
}

/// `exp((p/n) int |u|^p ln |u|^p) <= LS(n, p) int |grad u|^p` at `||u||_p = 1`.
///
/// This is the exponential of the usual form, so that both sides are
/// positive; equality cases are unchanged. Mesh inputs must be minimal up to
/// [`VerifyOptions::flatness_threshold`].
pub fn verify_log_sobolev(subject: Subject<'_>, p: f64, opts: &VerifyOptions) -> Result<VerificationReport> {
    let (n, entropy, energy, inputs, tol) = match subject {
        Subject::Mesh { mesh, field } => {
            log_sobolev_constant(SURFACE_DIM, p)?;
            let curv = mesh.mean_curvature();
            let max_h = curv.max_interior();
            if max_h > opts.flatness_threshold {
                return Err(Error::NotMinimal {
                    max_curvature: max_h,
                    threshold: opts.flatness_threshold,
                });
            }
            check_boundary(mesh, field)?;
            let dmf = samples(mesh, field, opts)?;
            let norm = dmf.lp_norm(p)?;
            if norm == 0.0 {
                return Err(Error::ZeroField);
            }
            let c = 1.0 / norm;
            let entropy = sample_integral(&dmf, |v| {
                let w = (c * v).powf(p);
                if w > 0.0 {
                    w * w.ln()
                } else {
                    0.0
                }
            });
            let energy = c.powf(p) * mesh.p1_gradient_lp(field, p)?;
            (SURFACE_DIM, entropy, energy, opts.inputs(mesh), opts.tolerance())
        }
        Subject::Radial(rf) => {
            log_sobolev_constant(rf.n, p)?;
            let mass = analytic::radial_integral(rf, |v, _| v.powf(p))?;
            if mass == 0.0 {
                return Err(Error::ZeroField);
            }
            // rescale to unit L^p norm: u -> c u with c^p mass = 1
            let entropy = (analytic::entropy(rf, p)? - mass * mass.ln()) / mass;
            let energy = analytic::radial_integral(rf, |_, d| d.powf(p))? / mass;
            let inputs = ReportInputs {
                n: rf.n,
                ..ReportInputs::default()
            };
            (rf.n, entropy, energy, inputs, opts.tolerance.unwrap_or(1e-6))
        }
    };
    let ls = log_sobolev_constant(n, p)?;
    let nf = f64::from(n);
    let inputs = ReportInputs { p: Some(p), ..inputs };
    Ok(
        VerificationReport::new(InequalityId::LogSobolev, (p / nf * entropy).exp(), ls * energy, tol, inputs)
            .extra("entropy", entropy)
            .extra("log_form_rhs", nf / p * (ls * energy).ln()),
    )
}

/// `int |grad u*| <= C n w_n^{1/n} (int |grad u| + int u |H|)` with no
/// curvature assumption.
pub fn verify_michael_simon_p1(
    mesh: &TriMesh,
    field: &VertexField,
    choice: IsoperimetricChoice,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    check_boundary(mesh, field)?;
    let c = choice.value(SURFACE_DIM)?;
    let profile = rearranged(mesh, field, &TargetMeasure::lebesgue(SURFACE_DIM)?, opts)?;
    let lhs = profile.gradient_energy(1.0)?;
    let curv = mesh.mean_curvature();
    let gradient = mesh.p1_gradient_lp(field, 1.0)?;
    let u = field.values();
    let curvature_term: f64 = (0..mesh.vertex_count())
        .map(|v| curv.vertex_area[v] * curv.mean_curvature[v] * u[v])
        .sum();
    let rhs = c * euclidean_iso_ratio(SURFACE_DIM) * (gradient + curvature_term);
    let inputs = ReportInputs {
        p: Some(1.0),
        choice: Some(choice),
        ..opts.inputs(mesh)
    };
    Ok(VerificationReport::new(InequalityId::MichaelSimonP1, lhs, rhs, opts.tolerance(), inputs)
        .extra("gradient_term", gradient)
        .extra("curvature_term", curvature_term)
        .extra("total_mean_curvature", curv.total_mean_curvature))
}

/// A continuous strictly increasing map of `[0, inf)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarMap {
    /// `coef v^exponent`
    Power { coef: f64, exponent: f64 },
    /// Linear interpolation through the points, extended by the end slopes.
    Tabulated { points: Vec<(f64, f64)> },
}

impl ScalarMap {
    pub fn identity() -> Self {
        ScalarMap::Power { coef: 1.0, exponent: 1.0 }
    }

    fn validate(&self, name: &str, vanish_at_zero: bool) -> Result<()> {
        match self {
            ScalarMap::Power { coef, exponent } => {
                if !(*coef > 0.0 && *exponent > 0.0) || !coef.is_finite() || !exponent.is_finite() {
                    return Err(Error::SpecInvalid(format!(
                        "{name} = {coef} v^{exponent} is not strictly increasing"
                    )));
                }
            }
            ScalarMap::Tabulated { points } => {
                if points.len() < 2 {
                    return Err(Error::SpecInvalid(format!("{name} needs at least two points")));
                }
                if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                    return Err(Error::SpecInvalid(format!("{name} has a non-finite point")));
                }
                if points.windows(2).any(|w| !(w[1].0 > w[0].0 && w[1].1 > w[0].1)) {
                    return Err(Error::SpecInvalid(format!("{name} is not strictly increasing")));
                }
                if points[0].0 > 0.0 {
                    return Err(Error::SpecInvalid(format!("{name} must be tabulated from 0")));
                }
                if vanish_at_zero && self.eval(0.0) != 0.0 {
                    return Err(Error::SpecInvalid(format!("{name} must vanish at 0")));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, v: f64) -> f64 {
        match self {
            ScalarMap::Power { coef, exponent } => coef * v.powf(*exponent),
            ScalarMap::Tabulated { points } => {
                let i = points.partition_point(|&(x, _)| x <= v).clamp(1, points.len() - 1);
                let ((x0, y0), (x1, y1)) = (points[i - 1], points[i]);
                y0 + (y1 - y0) * (v - x0) / (x1 - x0)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub coef: f64,
    pub exponent: f64,
}

/// `sum_j coef_j t^{exponent_j}` with exponents `>= 1` in increasing order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PowerSum {
    pub terms: Vec<PowerTerm>,
}

impl PowerSum {
    pub fn single(coef: f64, exponent: f64) -> Self {
        Self {
            terms: vec![PowerTerm { coef, exponent }],
        }
    }

    fn validate(&self, name: &str, nonpositive: bool) -> Result<()> {
        for t in &self.terms {
            if !t.coef.is_finite() || !(t.exponent >= 1.0) || !t.exponent.is_finite() {
                return Err(Error::SpecInvalid(format!(
                    "{name}: term {} t^{} needs a finite coefficient and exponent >= 1",
                    t.coef, t.exponent
                )));
            }
            if nonpositive && t.coef > 0.0 {
                return Err(Error::SpecInvalid(format!("{name}: coefficient {} must be <= 0", t.coef)));
            }
            if !nonpositive && t.coef < 0.0 {
                return Err(Error::SpecInvalid(format!("{name}: coefficient {} must be >= 0", t.coef)));
            }
        }
        if self.terms.windows(2).any(|w| !(w[1].exponent > w[0].exponent)) {
            return Err(Error::SpecInvalid(format!("{name}: exponents must be strictly increasing")));
        }
        Ok(())
    }

    /// `sum_j coef_j scale^{e_j} E(e_j)` for an energy functional `E(e) = int |grad|^e`.
    fn integrate<F: FnMut(f64) -> Result<f64>>(&self, scale: f64, mut energy: F) -> Result<f64> {
        let mut total = 0.0;
        for t in &self.terms {
            if t.coef != 0.0 {
                total += t.coef * scale.powf(t.exponent) * energy(t.exponent)?;
            }
        }
        Ok(total)
    }
}

fn signed_pow(x: f64, e: f64) -> f64 {
    x.signum() * x.abs().powf(e)
}

/// `s_coef s^{s_exp} + t_coef t^{t_exp}` with signed powers.
///
/// Monotonicity in `t` follows from the sign of `t_coef`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairMap {
    pub s_coef: f64,
    pub s_exp: f64,
    pub t_coef: f64,
    pub t_exp: f64,
}

impl PairMap {
    pub fn eval(&self, s: f64, t: f64) -> f64 {
        let a = if self.s_coef == 0.0 { 0.0 } else { self.s_coef * signed_pow(s, self.s_exp) };
        let b = if self.t_coef == 0.0 { 0.0 } else { self.t_coef * signed_pow(t, self.t_exp) };
        a + b
    }

    fn validate(&self, name: &str) -> Result<()> {
        if [self.s_coef, self.s_exp, self.t_coef, self.t_exp].iter().any(|x| !x.is_finite()) {
            return Err(Error::SpecInvalid(format!("{name} has a non-finite parameter")));
        }
        if self.t_coef != 0.0 && !(self.t_exp > 0.0) {
            return Err(Error::SpecInvalid(format!("{name}: t exponent must be positive")));
        }
        if self.t_coef < 0.0 {
            return Err(Error::SpecInvalid(format!(
                "{name} must be non-decreasing in t (t coefficient {} < 0)",
                self.t_coef
            )));
        }
        Ok(())
    }
}

/// The data of an integral inequality of the first order:
/// `L(int f(u), int g(|grad u|)) <= Lambda(int phi(u), int psi(|grad u|))`.
///
/// `g` has non-positive and `psi` non-negative coefficients. Both `L` and
/// `Lambda` must be non-decreasing in their second argument: with `g <= 0`,
/// replacing the gradient by one of larger energy lowers `int g`, and only a
/// non-decreasing `L` turns that into a smaller left side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicitySpec {
    pub f: ScalarMap,
    pub phi: ScalarMap,
    pub g: PowerSum,
    pub psi: PowerSum,
    pub l: PairMap,
    pub lambda: PairMap,
}

impl MonotonicitySpec {
    /// `||u||_2 <= (2 sqrt(pi))^{-1} int |grad u|` in the plane.
    pub fn isoperimetric() -> Self {
        MonotonicitySpec {
            f: ScalarMap::Power { coef: 1.0, exponent: 2.0 },
            phi: ScalarMap::identity(),
            g: PowerSum::default(),
            psi: PowerSum::single(1.0, 1.0),
            l: PairMap {
                s_coef: 1.0,
                s_exp: 0.5,
                t_coef: 0.0,
                t_exp: 1.0,
            },
            lambda: PairMap {
                s_coef: 0.0,
                s_exp: 1.0,
                t_coef: 1.0 / euclidean_iso_ratio(SURFACE_DIM),
                t_exp: 1.0,
            },
        }
    }

    /// `||u||_{p*} <= TA(2, p) ||grad u||_p`.
    pub fn p_sobolev(p: f64) -> Result<Self> {
        let p_star = sobolev_conjugate(SURFACE_DIM, p)?;
        Ok(MonotonicitySpec {
            f: ScalarMap::Power { coef: 1.0, exponent: p_star },
            phi: ScalarMap::identity(),
            g: PowerSum::default(),
            psi: PowerSum::single(1.0, p),
            l: PairMap {
                s_coef: 1.0,
                s_exp: 1.0 / p_star,
                t_coef: 0.0,
                t_exp: 1.0,
            },
            lambda: PairMap {
                s_coef: 0.0,
                s_exp: 1.0,
                t_coef: talenti_constant(SURFACE_DIM, p)?,
                t_exp: 1.0 / p,
            },
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.f.validate("f", true)?;
        self.phi.validate("phi", false)?;
        self.g.validate("g", true)?;
        self.psi.validate("psi", false)?;
        self.l.validate("L")?;
        self.lambda.validate("Lambda")
    }
}

impl FromStr for MonotonicitySpec {
    type Err = Error;

    /// Named presets: `isoperimetric` or `sobolev:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "isoperimetric" {
            return Ok(Self::isoperimetric());
        }
        if let Some(p) = s.strip_prefix("sobolev:") {
            let p: f64 = p.parse().map_err(|_| Error::Domain(format!("invalid exponent '{p}'")))?;
            return Self::p_sobolev(p);
        }
        domain(format!("unknown preset '{s}' (expected isoperimetric or sobolev:<p>)"))
    }
}

/// Checks the hypothesis on `v = u*` in the plane and, when it holds, the
/// inequality on the surface with gradients scaled by `PS(2, K)`.
///
/// Integrals of `f(u)` and `phi(u)` are invariant under rearrangement and are
/// taken from the surface samples on both sides.
pub fn verify_monotonicity_principle(
    mesh: &TriMesh,
    field: &VertexField,
    spec: &MonotonicitySpec,
    k: f64,
    choice: IsoperimetricChoice,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    spec.validate()?;
    check_curvature_bound(mesh, k, choice)?;
    check_boundary(mesh, field)?;
    let ps = ps_constant(SURFACE_DIM, k, choice)?;
    let dmf = samples(mesh, field, opts)?;
    let profile = rearrange_linear(&dmf, &TargetMeasure::lebesgue(SURFACE_DIM)?);
    let int_f = sample_integral(&dmf, |v| spec.f.eval(v));
    let int_phi = sample_integral(&dmf, |v| spec.phi.eval(v));

    let plane_l = spec.l.eval(int_f, spec.g.integrate(1.0, |e| profile.gradient_energy(e))?);
    let plane_r = spec.lambda.eval(int_phi, spec.psi.integrate(1.0, |e| profile.gradient_energy(e))?);

    let lhs = spec.l.eval(int_f, spec.g.integrate(ps, |e| mesh.p1_gradient_lp(field, e))?);
    let rhs = spec.lambda.eval(int_phi, spec.psi.integrate(ps, |e| mesh.p1_gradient_lp(field, e))?);

    let tol = opts.tolerance();
    let inputs = ReportInputs {
        k: Some(k),
        choice: Some(choice),
        ..opts.inputs(mesh)
    };
    let mut report = VerificationReport::new(InequalityId::MonotonicityPrinciple, lhs, rhs, tol, inputs)
        .extra("hypothesis_lhs", plane_l)
        .extra("hypothesis_rhs", plane_r)
        .extra("ps_constant", ps);
    if plane_l > plane_r * (1.0 + tol) {
        report.vacuous = true;
        report = report.note("hypothesis fails for the rearranged function; nothing to verify");
    }
    Ok(report)
}
