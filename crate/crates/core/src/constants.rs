//! Closed-form constants of the Pólya–Szegő family of inequalities.
//!
//! The exact isoperimetric constant of `n`-dimensional submanifolds is not
//! known; every constant here is parameterised by an [`IsoperimetricChoice`]
//! which selects one of the two published upper bounds.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::special_fn::{bessel_first_zero, gamma_signed, ln_gamma, ln_unit_ball_volume};

/// Which upper bound stands in for the isoperimetric constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IsoperimetricChoice {
    /// Michael–Simon: `5^n / w_n^{1/n}`.
    MichaelSimonBound,
    /// Brendle's constant `B(n, m)` for codimension `m`.
    Brendle { codim: u32 },
}

impl IsoperimetricChoice {
    pub fn value(&self, n: u32) -> Result<f64> {
        match *self {
            IsoperimetricChoice::MichaelSimonBound => ic_upper_bound(n),
            IsoperimetricChoice::Brendle { codim } => brendle_constant(n, codim),
        }
    }

    /// True when the constant equals the Euclidean one `1/(n w_n^{1/n})`.
    pub fn is_euclidean_sharp(&self) -> bool {
        matches!(self, IsoperimetricChoice::Brendle { codim: 1 | 2 })
    }
}

impl fmt::Display for IsoperimetricChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoperimetricChoice::MichaelSimonBound => write!(f, "michael-simon"),
            IsoperimetricChoice::Brendle { codim } => write!(f, "brendle:{codim}"),
        }
    }
}

impl FromStr for IsoperimetricChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "michael-simon" || s == "michael_simon" || s == "ms" {
            return Ok(IsoperimetricChoice::MichaelSimonBound);
        }
        if let Some(m) = s.strip_prefix("brendle:") {
            let codim: u32 = m
                .parse()
                .map_err(|_| Error::Domain(format!("invalid codimension '{m}'")))?;
            if codim == 0 {
                return domain("codimension must be at least 1");
            }
            return Ok(IsoperimetricChoice::Brendle { codim });
        }
        domain(format!(
            "unknown isoperimetric choice '{s}' (expected michael-simon or brendle:<m>)"
        ))
    }
}

/// `n w_n^{1/n}`, the isoperimetric ratio of Euclidean balls.
pub fn euclidean_iso_ratio(n: u32) -> f64 {
    let nf = f64::from(n);
    nf * (ln_unit_ball_volume(n) / nf).exp()
}

fn check_dim(n: u32) -> Result<()> {
    if n < 2 {
        return domain(format!("dimension must be at least 2, got {n}"));
    }
    Ok(())
}

/// Michael–Simon bound `5^n / w_n^{1/n}`.
pub fn ic_upper_bound(n: u32) -> Result<f64> {
    check_dim(n)?;
    let nf = f64::from(n);
    Ok((nf * 5f64.ln() - ln_unit_ball_volume(n) / nf).exp())
}

/// Brendle's isoperimetric constant `B(n, m)`.
pub fn brendle_constant(n: u32, m: u32) -> Result<f64> {
    check_dim(n)?;
    if m == 0 {
        return domain("codimension must be at least 1");
    }
    if m <= 2 {
        return Ok(1.0 / euclidean_iso_ratio(n));
    }
    let nf = f64::from(n);
    let ln_ratio = f64::from(m).ln() + ln_unit_ball_volume(m)
        - f64::from(n + m).ln()
        - ln_unit_ball_volume(n + m);
    let brendle = (ln_ratio / nf).exp() / nf;
    Ok(brendle.min(ic_upper_bound(n)?))
}

fn check_curvature(k: f64, c: f64) -> Result<()> {
    if !(k >= 0.0) || !k.is_finite() {
        return domain(format!("curvature bound must be a finite non-negative number, got {k}"));
    }
    if k * c >= 1.0 {
        return Err(Error::CurvatureBoundViolated { k, limit: 1.0 / c });
    }
    Ok(())
}

/// Submanifold isoperimetric constant `I(n, K) = C / (1 - C K)`.
pub fn iso_constant(n: u32, k: f64, choice: IsoperimetricChoice) -> Result<f64> {
    let c = choice.value(n)?;
    check_curvature(k, c)?;
    Ok(c / (1.0 - c * k))
}

/// Pólya–Szegő constant `PS(n, K) = I(n, K) n w_n^{1/n}`.
///
/// For the Euclidean-sharp choices this is evaluated as `s / (s - K)` with
/// `s = n w_n^{1/n}`, which is exactly 1 at `K = 0`.
pub fn ps_constant(n: u32, k: f64, choice: IsoperimetricChoice) -> Result<f64> {
    let c = choice.value(n)?;
    check_curvature(k, c)?;
    let s = euclidean_iso_ratio(n);
    if choice.is_euclidean_sharp() {
        Ok(s / (s - k))
    } else {
        Ok(c * s / (1.0 - c * k))
    }
}

fn check_subcritical(n: u32, p: f64) -> Result<()> {
    check_dim(n)?;
    if !(p > 1.0 && p < f64::from(n)) {
        return domain(format!("exponent must satisfy 1 < p < n = {n}, got p = {p}"));
    }
    Ok(())
}

/// Talenti's sharp Sobolev constant `TA(n, p)`.
pub fn talenti_constant(n: u32, p: f64) -> Result<f64> {
    check_subcritical(n, p)?;
    let nf = f64::from(n);
    let ln_g = ln_gamma(1.0 + nf / 2.0)? + ln_gamma(nf)?
        - ln_gamma(nf / p)?
        - ln_gamma(1.0 + nf - nf / p)?;
    Ok(1.0 / (PI.sqrt() * nf.powf(1.0 / p))
        * ((p - 1.0) / (nf - p)).powf(1.0 - 1.0 / p)
        * (ln_g / nf).exp())
}

/// Sobolev conjugate `p* = n p / (n - p)`.
pub fn sobolev_conjugate(n: u32, p: f64) -> Result<f64> {
    check_subcritical(n, p)?;
    let nf = f64::from(n);
    Ok(nf * p / (nf - p))
}

/// Admissible Gagliardo–Nirenberg exponent triple with its derived exponents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GnExponents {
    pub n: u32,
    pub p: f64,
    pub q: f64,
    /// `beta = n p - q (n - p)`
    pub beta: f64,
    pub theta: f64,
    /// `r = p (q - 1) / (p - 1)`
    pub r: f64,
}

impl GnExponents {
    pub fn new(n: u32, p: f64, q: f64) -> Result<Self> {
        check_subcritical(n, p)?;
        let nf = f64::from(n);
        let q_max = p * (nf - 1.0) / (nf - p);
        // the endpoint is admitted up to rounding in its evaluation
        if !(q > p && q <= q_max * (1.0 + 4.0 * f64::EPSILON)) {
            return domain(format!(
                "q must satisfy p < q <= p(n-1)/(n-p) = {q_max}, got q = {q}"
            ));
        }
        let beta = nf * p - q * (nf - p);
        let theta = (nf * (q - p) / ((q - 1.0) * beta)).min(1.0);
        Ok(Self {
            n,
            p,
            q,
            beta,
            theta,
            r: p * (q - 1.0) / (p - 1.0),
        })
    }

    /// Upper end `p(n-1)/(n-p)` of the admissible `q` range.
    pub fn q_endpoint(n: u32, p: f64) -> Result<f64> {
        check_subcritical(n, p)?;
        let nf = f64::from(n);
        Ok(p * (nf - 1.0) / (nf - p))
    }
}

/// Interpolation exponent `theta(n, p, q)`.
pub fn gn_theta(n: u32, p: f64, q: f64) -> Result<f64> {
    Ok(GnExponents::new(n, p, q)?.theta)
}

/// How to read the literal Euclidean Gagliardo–Nirenberg constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EgnReading {
    /// Gamma argument `q(p-1)/(1-p)` and exponent `1 - theta` on the second
    /// factor, taken literally.
    Literal,
    /// Gamma argument `q(p-1)/(q-p)` and exponent `theta/p` on the second
    /// factor: the form under which the extremal profiles attain equality.
    GammaCorrected,
}

impl FromStr for EgnReading {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "literal" => Ok(EgnReading::Literal),
            "corrected" | "gamma-corrected" | "gamma_corrected" => Ok(EgnReading::GammaCorrected),
            other => domain(format!("unknown reading '{other}' (expected literal or corrected)")),
        }
    }
}

/// Euclidean Gagliardo–Nirenberg constant `EGN(n, p, q)` under a reading.
pub fn egn_constant(n: u32, p: f64, q: f64, reading: EgnReading) -> Result<f64> {
    let ex = GnExponents::new(n, p, q)?;
    let nf = f64::from(n);
    let (theta, beta, r) = (ex.theta, ex.beta, ex.r);
    let (gamma_arg, second_exp) = match reading {
        EgnReading::Literal => (q * (p - 1.0) / (1.0 - p), 1.0 - theta),
        EgnReading::GammaCorrected => (q * (p - 1.0) / (q - p), theta / p),
    };
    let g_top = gamma_signed(gamma_arg)?;
    let ratio = g_top * gamma_signed(nf / 2.0 + 1.0)?
        / (gamma_signed((p - 1.0) * beta / (p * (q - p)))?
            * gamma_signed(nf * (p - 1.0) / p + 1.0)?);
    if ratio <= 0.0 {
        return domain(format!(
            "gamma quotient {ratio} is not positive; fractional power undefined"
        ));
    }
    Ok(((q - p) / (p * PI.sqrt())).powf(theta)
        * (p * q / (nf * (q - p))).powf(second_exp)
        * (beta / (p * q)).powf(1.0 / r)
        * ratio.powf(theta / nf))
}

/// Gagliardo–Nirenberg constant on submanifolds, `EGN * PS`.
pub fn gn_constant(
    n: u32,
    p: f64,
    q: f64,
    k: f64,
    choice: IsoperimetricChoice,
    reading: EgnReading,
) -> Result<f64> {
    Ok(egn_constant(n, p, q, reading)? * ps_constant(n, k, choice)?)
}

/// Sharp `p`-log-Sobolev constant `LS(n, p)`.
pub fn log_sobolev_constant(n: u32, p: f64) -> Result<f64> {
    check_subcritical(n, p)?;
    let nf = f64::from(n);
    let ln_ratio = ln_gamma(nf / 2.0 + 1.0)? - ln_gamma(nf * (p - 1.0) / p + 1.0)?;
    Ok(p / (nf * PI.powf(p / 2.0))
        * ((p - 1.0) / E).powf(p - 1.0)
        * (ln_ratio * p / nf).exp())
}

/// How to read the literal spectral-gap constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapReading {
    /// `j w_n^{2/n} / PS`, taken literally.
    Literal,
    /// `j^2 w_n^{2/n} / PS^2`, the Faber–Krahn form.
    FaberKrahnConsistent,
}

impl FromStr for GapReading {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "literal" => Ok(GapReading::Literal),
            "corrected" | "faber-krahn" | "faber_krahn" => Ok(GapReading::FaberKrahnConsistent),
            other => domain(format!("unknown reading '{other}' (expected literal or corrected)")),
        }
    }
}

/// Spectral gap constant `G(n, K)`.
pub fn spectral_gap_constant(
    n: u32,
    k: f64,
    choice: IsoperimetricChoice,
    reading: GapReading,
) -> Result<f64> {
    let ps = ps_constant(n, k, choice)?;
    let j = bessel_first_zero(f64::from(n) / 2.0 - 1.0)?;
    let omega_2n = (2.0 * ln_unit_ball_volume(n) / f64::from(n)).exp();
    Ok(match reading {
        GapReading::Literal => j * omega_2n / ps,
        GapReading::FaberKrahnConsistent => j * j * omega_2n / (ps * ps),
    })
}

/// `n w_n^{1/n} / (n w_n^{1/n} - K)`.
pub fn asymptotic_ratio(n: u32, k: f64) -> Result<f64> {
    check_dim(n)?;
    if !(k >= 0.0) || !k.is_finite() {
        return domain(format!("K must be finite and non-negative, got {k}"));
    }
    let s = euclidean_iso_ratio(n);
    if s <= k {
        return domain(format!("n w_n^(1/n) = {s} does not exceed K = {k}"));
    }
    Ok(s / (s - k))
}

/// Convention for the total mean curvature of the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereConvention {
    /// `n (n w_n)^{1/n}`, the literal formula.
    PaperFormula,
    /// `n ((n+1) w_{n+1})^{1/n}` from `|H| = n` and the sphere's area.
    TraceDerived,
}

impl FromStr for SphereConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paper" => Ok(SphereConvention::PaperFormula),
            "trace" => Ok(SphereConvention::TraceDerived),
            other => domain(format!("unknown convention '{other}' (expected paper or trace)")),
        }
    }
}

/// Total mean curvature `||H||_{L^n}` of the unit `n`-sphere.
pub fn tc_unit_sphere(n: u32, convention: SphereConvention) -> Result<f64> {
    check_dim(n)?;
    let nf = f64::from(n);
    let ln_measure = match convention {
        SphereConvention::PaperFormula => nf.ln() + ln_unit_ball_volume(n),
        SphereConvention::TraceDerived => (nf + 1.0).ln() + ln_unit_ball_volume(n + 1),
    };
    Ok(nf * (ln_measure / nf).exp())
}

/// Parameters for a [`ConstantsTable`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRequest {
    pub n: u32,
    pub k: f64,
    pub choice: IsoperimetricChoice,
    pub p: Option<f64>,
    pub q: Option<f64>,
}

/// A value that may legitimately fail to exist for the given inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Value(f64),
    Unavailable { error: String },
}

impl Entry {
    fn from_result(r: Result<f64>) -> Self {
        match r {
            Ok(v) => Entry::Value(v),
            Err(e) => Entry::Unavailable {
                error: e.to_string(),
            },
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Entry::Value(v) => Some(*v),
            Entry::Unavailable { .. } => None,
        }
    }
}

/// Every constant available for one `(n, K, choice[, p[, q]])` request.
///
/// Both readings of the ambiguous constants are kept side by
/// side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsTable {
    pub n: u32,
    pub k: f64,
    pub choice: IsoperimetricChoice,
    pub isoperimetric: f64,
    pub iso: f64,
    pub ps: f64,
    pub asymptotic_ratio: Entry,
    pub spectral_gap_literal: Entry,
    pub spectral_gap_faber_krahn: Entry,
    pub tc_sphere_paper: f64,
    pub tc_sphere_trace: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub talenti: Option<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sobolev: Option<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_sobolev: Option<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub egn_literal: Option<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub egn_corrected: Option<Entry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gn_corrected: Option<Entry>,
}

impl ConstantsTable {
    /// Fails only if the curvature bound itself is inadmissible.
    pub fn build(req: &TableRequest) -> Result<Self> {
        let TableRequest { n, k, choice, p, q } = *req;
        let c = choice.value(n)?;
        let iso = iso_constant(n, k, choice)?;
        let ps = ps_constant(n, k, choice)?;
        let talenti = p.map(|p| Entry::from_result(talenti_constant(n, p)));
        let sobolev = p.map(|p| Entry::from_result(talenti_constant(n, p).map(|t| t * ps)));
        let log_sobolev = p.map(|p| Entry::from_result(log_sobolev_constant(n, p)));
        let (theta, egn_literal, egn_corrected, gn_corrected) = match (p, q) {
            (Some(p), Some(q)) => (
                Some(Entry::from_result(gn_theta(n, p, q))),
                Some(Entry::from_result(egn_constant(n, p, q, EgnReading::Literal))),
                Some(Entry::from_result(egn_constant(n, p, q, EgnReading::GammaCorrected))),
                Some(Entry::from_result(
                    egn_constant(n, p, q, EgnReading::GammaCorrected).map(|e| e * ps),
                )),
            ),
            _ => (None, None, None, None),
        };
        Ok(Self {
            n,
            k,
            choice,
            isoperimetric: c,
            iso,
            ps,
            asymptotic_ratio: Entry::from_result(asymptotic_ratio(n, k)),
            spectral_gap_literal: Entry::from_result(spectral_gap_constant(
                n,
                k,
                choice,
                GapReading::Literal,
            )),
            spectral_gap_faber_krahn: Entry::from_result(spectral_gap_constant(
                n,
                k,
                choice,
                GapReading::FaberKrahnConsistent,
            )),
            tc_sphere_paper: tc_unit_sphere(n, SphereConvention::PaperFormula)?,
            tc_sphere_trace: tc_unit_sphere(n, SphereConvention::TraceDerived)?,
            p,
            talenti,
            sobolev,
            log_sobolev,
            q,
            theta,
            egn_literal,
            egn_corrected,
            gn_corrected,
        })
    }

    /// `(name, value-or-message)` rows in a stable order, for CSV output.
    pub fn rows(&self) -> Vec<(String, String)> {
        fn entry(e: &Entry) -> String {
            match e {
                Entry::Value(v) => format!("{v:.17e}"),
                Entry::Unavailable { error } => format!("unavailable: {error}"),
            }
        }
        let mut rows = vec![
            ("n".to_string(), self.n.to_string()),
            ("K".to_string(), format!("{:.17e}", self.k)),
            ("choice".to_string(), self.choice.to_string()),
            ("isoperimetric".to_string(), format!("{:.17e}", self.isoperimetric)),
            ("I".to_string(), format!("{:.17e}", self.iso)),
            ("PS".to_string(), format!("{:.17e}", self.ps)),
            ("asymptotic_ratio".to_string(), entry(&self.asymptotic_ratio)),
            ("G_literal".to_string(), entry(&self.spectral_gap_literal)),
            ("G_faber_krahn".to_string(), entry(&self.spectral_gap_faber_krahn)),
            ("TC_sphere_paper".to_string(), format!("{:.17e}", self.tc_sphere_paper)),
            ("TC_sphere_trace".to_string(), format!("{:.17e}", self.tc_sphere_trace)),
        ];
        let optional = [
            ("TA", &self.talenti),
            ("S", &self.sobolev),
            ("LS", &self.log_sobolev),
            ("theta", &self.theta),
            ("EGN_literal", &self.egn_literal),
            ("EGN_corrected", &self.egn_corrected),
            ("GN_corrected", &self.gn_corrected),
        ];
        if let Some(p) = self.p {
            rows.push(("p".to_string(), format!("{p:.17e}")));
        }
        if let Some(q) = self.q {
            rows.push(("q".to_string(), format!("{q:.17e}")));
        }
        for (name, value) in optional {
            if let Some(e) = value {
                rows.push((name.to_string(), entry(e)));
            }
        }
        rows
    }
}
