use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use psilab::analytic::{example51_vertex_field, make_surface, RadialFunction};
use psilab::constants::{egn_constant, spectral_gap_constant, tc_unit_sphere, ConstantsTable, TableRequest};
use psilab::counterexample::{
    asymptotic_check, cross_check_row, find_lambda_bar, log_log_slope, sweep_row, write_sweep_csv, AsymptoticCheck,
    LambdaBar, SweepRow,
};
use psilab::measure_space::{
    rearrange, rearrange_linear, rearrange_linear_with, DiscreteMeasuredFunction, RadialProfile, TargetMeasure,
};
use psilab::mesh::{load_mesh, MeshFormat, TriMesh, VertexField};
use psilab::verify::{
    superlevel_regions, verify_gn, verify_isoperimetric, verify_log_sobolev, verify_michael_simon_p1,
    verify_model_space_ps, verify_monotonicity_principle, verify_p_sobolev, verify_polya_szego, verify_spectral_gap,
    write_reports_csv, MonotonicitySpec, Subject, VerificationReport, VerifyOptions,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{
    Cli, Command, CommonVerify, ConstantsArgs, CounterexampleArgs, CurvatureArgs, FieldArgs, FieldFn, Format, Interp,
    MeshArgs, MeshField, RearrangeArgs, TargetSpec, VerifyKind,
};
use crate::CliError;

/// Rendered result of one command.
pub struct Outcome {
    pub text: String,
    /// At least one verification failed.
    pub failed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, failed: false }
    }
}

pub fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Constants(a) => constants(cli, a),
        Command::Curvature(a) => curvature(cli, a),
        Command::Rearrange(a) => rearrange_cmd(cli, a),
        Command::Verify { kind } => verify(cli, kind),
        Command::Counterexample(a) => counterexample(cli, a),
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn csv_text(write: impl FnOnce(&mut Vec<u8>) -> psilab::Result<()>) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))
}

fn load(args: &MeshArgs) -> Result<(TriMesh, String), CliError> {
    match (&args.mesh, &args.surface) {
        (Some(path), _) => Ok((load_mesh(open(path)?, MeshFormat::ExtendedOff)?, path.display().to_string())),
        (None, Some(surface)) => Ok((make_surface(surface)?, surface.to_string())),
        (None, None) => Err(CliError::Usage("a mesh is required: pass --mesh <file> or --surface <spec>".into())),
    }
}

fn field(args: &FieldArgs, mesh: &TriMesh) -> Result<VertexField, CliError> {
    let f = match (&args.field, args.field_fn) {
        (Some(path), _) => VertexField::read_csv(open(path)?, mesh.vertex_count())?,
        (None, Some(FieldFn::Example51(lambda))) => example51_vertex_field(mesh, lambda)?,
        (None, Some(FieldFn::Hat(r))) => {
            if !(r > 0.0) {
                return Err(CliError::Usage(format!("hat radius must be positive, got {r}")));
            }
            // Rounding in the mesh coordinates must not leave residue on the rim.
            mesh.field_from_fn(|x| {
                let v = 1.0 - norm(x) / r;
                if v > 1e-12 { v } else { 0.0 }
            })?
        }
        (None, Some(FieldFn::Gaussian(alpha))) => mesh.field_from_fn(|x| (-alpha * norm(x).powi(2)).exp())?,
        (None, Some(FieldFn::Const(c))) => mesh.field_from_fn(|_| c)?,
        (None, None) => return Err(CliError::Usage("a field is required: pass --field <csv> or --field-fn <spec>".into())),
    };
    Ok(if args.zero_boundary { f.with_zero_boundary(mesh) } else { f })
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

#[derive(Serialize)]
struct ConstantsOutput {
    reading: &'static str,
    convention: &'static str,
    /// Values under the selected reading and convention.
    tc_sphere: f64,
    spectral_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    egn: Option<f64>,
    #[serde(flatten)]
    table: ConstantsTable,
}

fn constants(cli: &Cli, a: &ConstantsArgs) -> Result<Outcome, CliError> {
    let table = ConstantsTable::build(&TableRequest {
        n: a.n,
        k: a.bound.k,
        choice: a.bound.iso,
        p: a.p,
        q: a.q,
    })?;
    let out = ConstantsOutput {
        reading: match a.reading {
            crate::args::Reading::Literal => "literal",
            crate::args::Reading::Corrected => "corrected",
        },
        convention: match a.convention {
            crate::args::Convention::Paper => "paper",
            crate::args::Convention::Trace => "trace",
        },
        tc_sphere: tc_unit_sphere(a.n, a.convention.sphere())?,
        spectral_gap: spectral_gap_constant(a.n, a.bound.k, a.bound.iso, a.reading.gap()).ok(),
        egn: match (a.p, a.q) {
            (Some(p), Some(q)) => egn_constant(a.n, p, q, a.reading.egn()).ok(),
            _ => None,
        },
        table,
    };
    let text = if cli.format == Format::Csv || cli.plot_data {
        let sep = if cli.plot_data { " " } else { "," };
        let mut s = format!("name{sep}value\n");
        for (name, value) in out.table.rows() {
            let value = if cli.plot_data { value.replace(' ', "_") } else { quote(&value) };
            let _ = writeln!(s, "{name}{sep}{value}");
        }
        s
    } else {
        json(&out)?
    };
    Ok(Outcome::ok(text))
}

fn quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Serialize)]
struct CurvatureSummary {
    mesh: String,
    ambient_dimension: usize,
    vertices: usize,
    triangles: usize,
    closed: bool,
    area: f64,
    boundary_length: f64,
    total_mean_curvature: f64,
    max_interior_mean_curvature: f64,
    obtuse_fraction: f64,
    /// `1/C` for the selected isoperimetric constant in dimension 2.
    curvature_limit: f64,
    /// Whether some admissible `K` covers this mesh.
    admissible: bool,
}

fn curvature(cli: &Cli, a: &CurvatureArgs) -> Result<Outcome, CliError> {
    let (mesh, id) = load(&a.mesh)?;
    if let Some(path) = &a.write_mesh {
        let file = File::create(path).map_err(|e| CliError::Input(format!("cannot create {}: {e}", path.display())))?;
        psilab::mesh::write_off(&mesh, std::io::BufWriter::new(file))?;
    }
    let report = mesh.mean_curvature();
    if cli.format == Format::Csv {
        return Ok(Outcome::ok(csv_text(|w| report.write_csv(w))?));
    }
    if cli.plot_data {
        let mut s = String::from("# vertex_index mean_curvature vertex_area boundary\n");
        for (i, ((h, area), b)) in report
            .mean_curvature
            .iter()
            .zip(&report.vertex_area)
            .zip(&report.boundary)
            .enumerate()
        {
            let _ = writeln!(s, "{i} {h:.12e} {area:.12e} {}", u8::from(*b));
        }
        return Ok(Outcome::ok(s));
    }
    let limit = 1.0 / a.iso.value(2)?;
    let tc = report.total_mean_curvature;
    let summary = CurvatureSummary {
        mesh: id,
        ambient_dimension: mesh.dim(),
        vertices: mesh.vertex_count(),
        triangles: mesh.triangle_count(),
        closed: mesh.is_closed(),
        area: mesh.hausdorff_measure(None),
        boundary_length: mesh.boundary_measure(None),
        total_mean_curvature: tc,
        max_interior_mean_curvature: report.max_interior(),
        obtuse_fraction: report.obtuse_fraction,
        curvature_limit: limit,
        admissible: !mesh.is_closed() && tc < limit,
    };
    Ok(Outcome::ok(json(&summary)?))
}

#[derive(Serialize)]
struct ProfileSummary<'a> {
    target: TargetMeasure,
    interpolation: psilab::measure_space::Interpolation,
    samples: usize,
    total_weight: f64,
    max_value: f64,
    support_radius: f64,
    cell_mass: f64,
    knots: &'a [psilab::measure_space::Knot],
}

fn rearrange_cmd(cli: &Cli, a: &RearrangeArgs) -> Result<Outcome, CliError> {
    if let Some(rf) = &a.radial {
        return Ok(Outcome::ok(sampled_radial(cli, rf, a.samples)?));
    }
    let dmf = match &a.dmf {
        Some(path) => DiscreteMeasuredFunction::read_csv(open(path)?)?,
        None => {
            let (mesh, _) = load(&a.mesh)?;
            let f = field(&a.field, &mesh)?;
            mesh.sample_field(&f, a.subdivision)?
        }
    };
    let target = match a.target {
        TargetSpec::Lebesgue(n) => TargetMeasure::lebesgue(n)?,
        TargetSpec::Model(n) => TargetMeasure::model_space_for(n, a.bound.k, a.bound.iso)?,
    };
    let profile = match (a.interp, a.cells) {
        (Interp::Step, _) => rearrange(&dmf, &target),
        (Interp::Linear, None) => rearrange_linear(&dmf, &target),
        (Interp::Linear, Some(0)) => return Err(CliError::Usage("--cells must be positive".into())),
        (Interp::Linear, Some(c)) => rearrange_linear_with(&dmf, &target, c),
    };
    let text = match (cli.plot_data, cli.format) {
        (true, _) => profile_columns(&profile),
        (false, Format::Csv) => csv_text(|w| profile.write_csv(w))?,
        (false, Format::Json) => json(&ProfileSummary {
            target,
            interpolation: profile.interpolation(),
            samples: dmf.len(),
            total_weight: dmf.total_weight(),
            max_value: profile.max_value(),
            support_radius: profile.support_radius(),
            cell_mass: profile.cell_mass(),
            knots: profile.knots(),
        })?,
    };
    Ok(Outcome::ok(text))
}

fn profile_columns(profile: &RadialProfile) -> String {
    let mut s = String::from("# radius value\n");
    for k in profile.knots() {
        let _ = writeln!(s, "{:.12e} {:.12e}", k.radius, k.value);
    }
    s
}

fn sampled_radial(cli: &Cli, rf: &RadialFunction, samples: usize) -> Result<String, CliError> {
    if samples < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    let mut end = rf.support_radius();
    if !end.is_finite() {
        // Tail cut where the profile has dropped below 1e-6 of its peak.
        let peak = rf.value(0.0);
        end = 1.0;
        while rf.value(end) > 1e-6 * peak && end < 1e4 {
            end *= 2.0;
        }
    }
    let rows: Vec<(f64, f64)> = (0..samples)
        .map(|i| {
            let r = end * i as f64 / (samples - 1) as f64;
            (r, rf.value(r))
        })
        .collect();
    let (sep, header) = if cli.plot_data { (" ", "# radius value") } else { (",", "radius,value") };
    let mut s = format!("{header}\n");
    for (r, v) in rows {
        let _ = writeln!(s, "{r:.17e}{sep}{v:.17e}");
    }
    Ok(s)
}

fn options(common: &CommonVerify, mesh_id: Option<String>) -> VerifyOptions {
    VerifyOptions {
        subdivision: common.subdivision,
        tolerance: common.tolerance,
        mesh_id,
        flatness_threshold: common.flatness,
    }
}

fn mesh_field(input: &MeshField) -> Result<(TriMesh, VertexField, String), CliError> {
    let (mesh, id) = load(&input.mesh)?;
    let f = field(&input.field, &mesh)?;
    Ok((mesh, f, id))
}

/// Runs `check` for every exponent in parallel, keeping input order.
fn per_exponent<F>(ps: &[f64], check: F) -> Result<Vec<VerificationReport>, CliError>
where
    F: Fn(f64) -> psilab::Result<VerificationReport> + Sync,
{
    ps.par_iter()
        .map(|&p| check(p))
        .collect::<psilab::Result<Vec<_>>>()
        .map_err(CliError::from)
}

fn with_subject<T>(
    input: &MeshField,
    radial: &Option<RadialFunction>,
    common: &CommonVerify,
    body: impl FnOnce(Subject<'_>, &VerifyOptions) -> Result<T, CliError>,
) -> Result<T, CliError> {
    if let Some(rf) = radial {
        if input.mesh.mesh.is_some() || input.mesh.surface.is_some() {
            return Err(CliError::Usage("pass either --radial or a mesh, not both".into()));
        }
        return body(Subject::Radial(rf), &options(common, None));
    }
    let (mesh, f, id) = mesh_field(input)?;
    body(Subject::Mesh { mesh: &mesh, field: &f }, &options(common, Some(id)))
}

fn verify(cli: &Cli, kind: &VerifyKind) -> Result<Outcome, CliError> {
    let reports = match kind {
        VerifyKind::Ps { input, exps, common } => {
            let (mesh, f, id) = mesh_field(input)?;
            let opts = options(common, Some(id));
            let b = &common.bound;
            per_exponent(&exps.p, |p| verify_polya_szego(&mesh, &f, p, b.k, b.iso, &opts))?
        }
        VerifyKind::ModelPs { input, exps, common } => {
            let (mesh, f, id) = mesh_field(input)?;
            let opts = options(common, Some(id));
            let b = &common.bound;
            per_exponent(&exps.p, |p| verify_model_space_ps(&mesh, &f, p, b.k, b.iso, &opts))?
        }
        VerifyKind::Sobolev { input, exps, common } => {
            let (mesh, f, id) = mesh_field(input)?;
            let opts = options(common, Some(id));
            let b = &common.bound;
            per_exponent(&exps.p, |p| verify_p_sobolev(&mesh, &f, p, b.k, b.iso, &opts))?
        }
        VerifyKind::Iso { input, levels, common } => {
            let (mesh, f, id) = mesh_field(input)?;
            let regions = superlevel_regions(&mesh, &f, levels)?;
            verify_isoperimetric(&mesh, common.bound.k, common.bound.iso, &regions, &options(common, Some(id)))?
        }
        VerifyKind::Gn {
            input,
            radial,
            exps,
            q,
            reading,
            common,
        } => with_subject(input, radial, common, |subject, opts| {
            let b = &common.bound;
            per_exponent(&exps.p, |p| verify_gn(subject, p, *q, b.k, b.iso, reading.egn(), opts))
        })?,
        VerifyKind::Gap {
            input,
            radial,
            reading,
            common,
        } => with_subject(input, radial, common, |subject, opts| {
            let b = &common.bound;
            Ok(vec![verify_spectral_gap(subject, b.k, b.iso, reading.gap(), opts)?])
        })?,
        VerifyKind::LogSobolev {
            input,
            radial,
            exps,
            common,
        } => with_subject(input, radial, common, |subject, opts| {
            per_exponent(&exps.p, |p| verify_log_sobolev(subject, p, opts))
        })?,
        VerifyKind::MichaelSimon { input, common } => {
            let (mesh, f, id) = mesh_field(input)?;
            vec![verify_michael_simon_p1(&mesh, &f, common.bound.iso, &options(common, Some(id)))?]
        }
        VerifyKind::Monotonicity {
            input,
            preset,
            spec,
            common,
        } => {
            let spec: MonotonicitySpec = match (preset, spec) {
                (Some(s), _) => s.clone(),
                (None, Some(path)) => serde_json::from_reader(open(path)?)?,
                (None, None) => return Err(CliError::Usage("pass --preset <name> or --spec <file>".into())),
            };
            let (mesh, f, id) = mesh_field(input)?;
            let b = &common.bound;
            vec![verify_monotonicity_principle(&mesh, &f, &spec, b.k, b.iso, &options(common, Some(id)))?]
        }
    };
    let failed = reports.iter().any(VerificationReport::is_failure);
    let text = if cli.plot_data {
        let mut s = String::from("# index p lhs rhs ratio pass\n");
        for (i, r) in reports.iter().enumerate() {
            let _ = writeln!(
                s,
                "{i} {} {:.12e} {:.12e} {} {}",
                r.inputs.p.map_or("nan".to_string(), |p| p.to_string()),
                r.lhs,
                r.rhs,
                r.ratio.map_or("nan".to_string(), |x| format!("{x:.12e}")),
                u8::from(r.pass)
            );
        }
        s
    } else {
        match cli.format {
            Format::Csv => csv_text(|w| write_reports_csv(&reports, w))?,
            Format::Json if reports.len() == 1 => json(&reports[0])?,
            Format::Json => json(&reports)?,
        }
    };
    Ok(Outcome { text, failed })
}

#[derive(Serialize)]
struct CounterexampleOutput {
    rows: Vec<SweepRow>,
    /// Log-log slope of plane/surface against lambda, per exponent.
    slopes: Vec<Slope>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    lambda_bar: Vec<LambdaBar>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    asymptotic: Vec<AsymptoticCheck>,
}

#[derive(Serialize)]
struct Slope {
    p: f64,
    slope: Option<f64>,
}

fn counterexample(cli: &Cli, a: &CounterexampleArgs) -> Result<Outcome, CliError> {
    let pairs: Vec<(f64, f64)> = a.p.iter().flat_map(|&p| a.lambda.iter().map(move |&l| (p, l))).collect();
    let rows = pairs
        .par_iter()
        .map(|&(p, l)| {
            let mut row = sweep_row(p, l)?;
            if let Some(sub) = a.mesh_check {
                cross_check_row(&mut row, sub)?;
            }
            Ok(row)
        })
        .collect::<psilab::Result<Vec<_>>>()?;
    let slopes = a
        .p
        .iter()
        .map(|&p| {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.p == p)
                .filter_map(|r| r.plane_to_surface.map(|y| (r.lambda, y)))
                .collect();
            Slope {
                p,
                slope: log_log_slope(&pts).ok(),
            }
        })
        .collect();
    let bars_in: Vec<(u64, f64)> = a.p.iter().flat_map(|&p| a.n.iter().map(move |&n| (n, p))).collect();
    let lambda_bar = bars_in
        .par_iter()
        .map(|&(n, p)| find_lambda_bar(n, p))
        .collect::<psilab::Result<Vec<_>>>()?;
    let asymptotic = if a.asymptotic {
        pairs
            .par_iter()
            .filter(|&&(p, _)| (1.0..2.0).contains(&p))
            .map(|&(p, l)| asymptotic_check(p, l))
            .collect::<psilab::Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let text = if cli.plot_data {
        let mut s = String::from("# lambda p surface_grad_p plane_grad_p plane_to_surface\n");
        for r in &rows {
            let _ = writeln!(
                s,
                "{:.12e} {} {:.12e} {} {}",
                r.lambda,
                r.p,
                r.surface_grad_p,
                r.plane_grad_p.value().map_or("inf".to_string(), |v| format!("{v:.12e}")),
                r.plane_to_surface.map_or("inf".to_string(), |v| format!("{v:.12e}"))
            );
        }
        s
    } else {
        match cli.format {
            Format::Csv => csv_text(|w| write_sweep_csv(&rows, w))?,
            Format::Json => json(&CounterexampleOutput {
                rows,
                slopes,
                lambda_bar,
                asymptotic,
            })?,
        }
    };
    Ok(Outcome::ok(text))
}
