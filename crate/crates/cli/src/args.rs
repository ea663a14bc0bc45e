use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use psilab::analytic::{example51_profile, gn_extremal, logsobolev_extremal, RadialFunction, Surface};
use psilab::constants::{EgnReading, IsoperimetricChoice, SphereConvention};
use psilab::verify::MonotonicitySpec;

#[derive(Debug, Parser)]
#[command(name = "psilab", version, about = "Rearrangement and Polya-Szego inequality checks on triangulated surfaces")]
pub struct Cli {
    /// Worker threads for sweeps and batch verifications.
    #[arg(long, global = true, env = "PSILAB_JOBS")]
    pub jobs: Option<usize>,

    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Emit whitespace-separated columns for gnuplot instead of JSON or CSV.
    #[arg(long, global = true)]
    pub plot_data: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate every constant for one (n, K, choice[, p[, q]]).
    Constants(ConstantsArgs),
    /// Discrete mean curvature and total mean curvature of a mesh.
    Curvature(CurvatureArgs),
    /// Schwartz rearrangement of a field or weighted sample list.
    Rearrange(RearrangeArgs),
    /// Run one inequality check.
    Verify {
        #[command(subcommand)]
        kind: VerifyKind,
    },
    /// Closed-form sweep of the curvature-free counterexample.
    Counterexample(CounterexampleArgs),
}

/// Parameters shared by every subcommand that depends on the curvature bound.
#[derive(Debug, Args, Clone)]
pub struct BoundArgs {
    /// Declared total mean curvature bound.
    #[arg(long = "K", default_value_t = 0.0)]
    pub k: f64,

    /// Isoperimetric constant: michael-simon or brendle:<codimension>.
    #[arg(long, default_value = "brendle:1", value_parser = parse_choice)]
    pub iso: IsoperimetricChoice,
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[command(flatten)]
    pub bound: BoundArgs,
    #[arg(long, value_enum, default_value_t = Reading::Corrected)]
    pub reading: Reading,
    #[arg(long, value_enum, default_value_t = Convention::Trace)]
    pub convention: Convention,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Reading {
    Literal,
    Corrected,
}

impl Reading {
    pub fn egn(self) -> EgnReading {
        match self {
            Reading::Literal => EgnReading::Literal,
            Reading::Corrected => EgnReading::GammaCorrected,
        }
    }

    pub fn gap(self) -> psilab::constants::GapReading {
        match self {
            Reading::Literal => psilab::constants::GapReading::Literal,
            Reading::Corrected => psilab::constants::GapReading::FaberKrahnConsistent,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    Paper,
    Trace,
}

impl Convention {
    pub fn sphere(self) -> SphereConvention {
        match self {
            Convention::Paper => SphereConvention::PaperFormula,
            Convention::Trace => SphereConvention::TraceDerived,
        }
    }
}

/// A mesh read from disk or generated on the fly.
#[derive(Debug, Args, Clone)]
pub struct MeshArgs {
    /// OFF or nOFF file.
    #[arg(long, conflicts_with = "surface")]
    pub mesh: Option<PathBuf>,

    /// Generated surface, e.g. sphere:4, disk:1:32, cap:0.5:32, clifford:64.
    #[arg(long, value_parser = parse_surface)]
    pub surface: Option<Surface>,
}

/// A vertex field read from CSV or generated from a named formula.
#[derive(Debug, Args, Clone)]
pub struct FieldArgs {
    /// One value per vertex, optionally with a `vertex_index,value` header.
    #[arg(long, conflicts_with = "field_fn")]
    pub field: Option<PathBuf>,

    /// Generated field: hat:<R>, gaussian:<alpha>, const:<c> or example51:<lambda>.
    #[arg(long, value_parser = parse_field_fn)]
    pub field_fn: Option<FieldFn>,

    /// Force the field to vanish on boundary vertices.
    #[arg(long)]
    pub zero_boundary: bool,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[arg(long, value_parser = parse_choice, default_value = "brendle:1")]
    pub iso: IsoperimetricChoice,
    /// Also write the mesh as OFF to this path.
    #[arg(long)]
    pub write_mesh: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RearrangeArgs {
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub field: FieldArgs,

    /// Weighted samples as `weight,value` CSV.
    #[arg(long, conflicts_with_all = ["mesh", "surface", "radial"])]
    pub dmf: Option<PathBuf>,

    /// Sample a radial function instead of rearranging, e.g. gn:3:2:4.
    #[arg(long, value_parser = parse_radial)]
    pub radial: Option<RadialFunction>,

    /// Number of radii when sampling a radial function.
    #[arg(long, default_value_t = 256)]
    pub samples: usize,

    /// lebesgue:<n> or model:<n>.
    #[arg(long, default_value = "lebesgue:2", value_parser = parse_target)]
    pub target: TargetSpec,

    #[command(flatten)]
    pub bound: BoundArgs,

    #[arg(long, value_enum, default_value_t = Interp::Linear)]
    pub interp: Interp,

    /// Cells of the linear rearrangement; defaults to a size-dependent count.
    #[arg(long)]
    pub cells: Option<usize>,

    /// Centroid sampling depth on each triangle.
    #[arg(long, default_value_t = 2)]
    pub subdivision: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Interp {
    Step,
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TargetSpec {
    Lebesgue(u32),
    Model(u32),
}

/// Options common to every `verify` kind.
#[derive(Debug, Args, Clone)]
pub struct CommonVerify {
    #[command(flatten)]
    pub bound: BoundArgs,

    #[arg(long, default_value_t = 2)]
    pub subdivision: u32,

    /// Relative slack; defaults to a value tied to the subdivision level.
    #[arg(long)]
    pub tolerance: Option<f64>,

    /// Largest interior |H| accepted as a minimal surface.
    #[arg(long, default_value_t = 0.1)]
    pub flatness: f64,
}

#[derive(Debug, Args, Clone)]
pub struct MeshField {
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub field: FieldArgs,
}

#[derive(Debug, Args, Clone)]
pub struct Exponents {
    /// One or more exponents; each is checked separately.
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<f64>,
}

#[derive(Debug, Subcommand)]
pub enum VerifyKind {
    /// Polya-Szego on the surface.
    Ps {
        #[command(flatten)]
        input: MeshField,
        #[command(flatten)]
        exps: Exponents,
        #[command(flatten)]
        common: CommonVerify,
    },
    /// Polya-Szego with the model-space rearrangement.
    ModelPs {
        #[command(flatten)]
        input: MeshField,
        #[command(flatten)]
        exps: Exponents,
        #[command(flatten)]
        common: CommonVerify,
    },
    /// Isoperimetric inequality on superlevel sets of a field.
    Iso {
        #[command(flatten)]
        input: MeshField,
        /// Superlevel thresholds.
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<f64>,
        #[command(flatten)]
        common: CommonVerify,
    },
    /// p-Sobolev inequality.
    Sobolev {
        #[command(flatten)]
        input: MeshField,
        #[command(flatten)]
        exps: Exponents,
        #[command(flatten)]
        common: CommonVerify,
    },
    /// Gagliardo-Nirenberg inequality on a mesh field or radial function.
    Gn {
        #[command(flatten)]
        input: MeshField,
        #[arg(long, value_parser = parse_radial)]
        radial: Option<RadialFunction>,
        #[command(flatten)]
        exps: Exponents,
        #[arg(long)]
        q: f64,
        #[arg(long, value_enum, default_value_t = Reading::Corrected)]
        reading: Reading,
        #[command(flatten)]
        common: CommonVerify,
    },
    /// First Dirichlet eigenvalue lower bound.
    Gap {
        #[command(flatten)]
        input: MeshField,
        #[arg(long, value_parser = parse_radial)]
        radial: Option<RadialFunction>,
        #[arg(long, value_enum, default_value_t = Reading::Corrected)]
        reading: Reading,
        #[command(flatten)]
        common: CommonVerify,
    },
    /// p-log-Sobolev inequality.
    LogSobolev {
        #[command(flatten)]
        input: MeshField,
        #[arg(long, value_parser = parse_radial)]
        radial: Option<RadialFunction>,
        #[command(flatten)]
        exps: Exponents,
        #[command(flatten)]
        common: CommonVerify,
    },
    /// Michael-Simon Sobolev inequality for p = 1, no curvature assumption.
    #[command(alias = "ms")]
    MichaelSimon {
        #[command(flatten)]
        input: MeshField,
        #[command(flatten)]
        common: CommonVerify,
    },
    /// Monotonicity principle for a preset or a JSON specification.
    Monotonicity {
        #[command(flatten)]
        input: MeshField,
        /// isoperimetric or sobolev:<p>.
        #[arg(long, conflicts_with = "spec", value_parser = parse_preset)]
        preset: Option<MonotonicitySpec>,
        /// JSON file holding a full specification with tabulated maps.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[command(flatten)]
        common: CommonVerify,
    },
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub p: Vec<f64>,

    /// Values of lambda, each >= 1.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub lambda: Vec<f64>,

    /// Search the threshold lambda for each of these N.
    #[arg(long = "N", value_delimiter = ',')]
    pub n: Vec<u64>,

    /// Compare each row with the leading-order asymptotes.
    #[arg(long)]
    pub asymptotic: bool,

    /// Cross-check the surface energy on an icosphere of this subdivision.
    #[arg(long)]
    pub mesh_check: Option<u32>,
}

/// Generated vertex fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldFn {
    /// `max(0, 1 - |x|/R)`.
    Hat(f64),
    /// `exp(-alpha |x|^2)`.
    Gaussian(f64),
    Const(f64),
    Example51(f64),
}

fn fields(s: &str) -> (String, Vec<&str>) {
    let mut parts = s.trim().split(':');
    let head = parts.next().unwrap_or("").to_ascii_lowercase();
    (head, parts.collect())
}

fn numbers<T: FromStr>(s: &str, parts: &[&str], count: usize) -> Result<Vec<T>, String> {
    if parts.len() != count {
        return Err(format!("'{s}' needs {count} parameter(s) after the name"));
    }
    parts
        .iter()
        .map(|x| x.parse().map_err(|_| format!("invalid number '{x}' in '{s}'")))
        .collect()
}

pub fn parse_choice(s: &str) -> Result<IsoperimetricChoice, String> {
    s.parse().map_err(|e: psilab::Error| e.to_string())
}

pub fn parse_surface(s: &str) -> Result<Surface, String> {
    s.parse().map_err(|e: psilab::Error| e.to_string())
}

pub fn parse_preset(s: &str) -> Result<MonotonicitySpec, String> {
    s.parse().map_err(|e: psilab::Error| e.to_string())
}

pub fn parse_target(s: &str) -> Result<TargetSpec, String> {
    let (head, parts) = fields(s);
    let n = numbers::<u32>(s, &parts, 1)?[0];
    match head.as_str() {
        "lebesgue" => Ok(TargetSpec::Lebesgue(n)),
        "model" => Ok(TargetSpec::Model(n)),
        _ => Err(format!("unknown target '{s}' (expected lebesgue:<n> or model:<n>)")),
    }
}

pub fn parse_field_fn(s: &str) -> Result<FieldFn, String> {
    let (head, parts) = fields(s);
    let v = numbers::<f64>(s, &parts, 1)?[0];
    match head.as_str() {
        "hat" => Ok(FieldFn::Hat(v)),
        "gaussian" => Ok(FieldFn::Gaussian(v)),
        "const" => Ok(FieldFn::Const(v)),
        "example51" => Ok(FieldFn::Example51(v)),
        _ => Err(format!(
            "unknown field '{s}' (expected hat:<R>, gaussian:<alpha>, const:<c> or example51:<lambda>)"
        )),
    }
}

/// `gn:n:p:q`, `logsobolev:n:p:s`, `gaussian:n:amplitude:alpha`,
/// `cone:n:height:R`, `plateau:n:height:R`, `eigen:n:R` or `example51:lambda`.
pub fn parse_radial(s: &str) -> Result<RadialFunction, String> {
    let (head, parts) = fields(s);
    let dim = |parts: &[&str]| -> Result<u32, String> {
        parts
            .first()
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| format!("'{s}' must start with a dimension"))
    };
    let rest = |count: usize| -> Result<Vec<f64>, String> {
        if parts.is_empty() {
            return Err(format!("'{s}' must start with a dimension"));
        }
        numbers(s, &parts[1..], count)
    };
    let built = match head.as_str() {
        "gn" => {
            let v = rest(2)?;
            gn_extremal(dim(&parts)?, v[0], v[1], 1.0, 1.0)
        }
        "logsobolev" => {
            let v = rest(2)?;
            logsobolev_extremal(dim(&parts)?, v[0], v[1])
        }
        "gaussian" => {
            let v = rest(2)?;
            RadialFunction::gaussian(dim(&parts)?, v[0], v[1])
        }
        "cone" => {
            let v = rest(2)?;
            RadialFunction::cone(dim(&parts)?, v[0], v[1])
        }
        "plateau" => {
            let v = rest(2)?;
            RadialFunction::plateau(dim(&parts)?, v[0], v[1])
        }
        "eigen" => {
            let v = rest(1)?;
            RadialFunction::ball_eigenfunction(dim(&parts)?, v[0])
        }
        "example51" => example51_profile(numbers::<f64>(s, &parts, 1)?[0]),
        _ => return Err(format!("unknown radial function '{s}'")),
    };
    built.map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_targets_and_fields() {
        assert_eq!(parse_target("model:2").unwrap(), TargetSpec::Model(2));
        assert_eq!(parse_field_fn("hat:0.5").unwrap(), FieldFn::Hat(0.5));
        assert!(parse_target("sphere:2").is_err());
        assert!(parse_field_fn("hat").is_err());
    }

    #[test]
    fn parses_radial_specs() {
        assert_eq!(parse_radial("gn:3:2:4").unwrap().n, 3);
        assert_eq!(parse_radial("example51:10").unwrap().n, 2);
        assert!(parse_radial("eigen:1:1").is_err());
        assert!(parse_radial("gn:3:2").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
