//! Serializable reports and deterministic number formatting.

use serde::Serialize;

/// 12 significant digits, scientific notation, `.` decimal separator.
pub fn fmt_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComplexOut {
    pub re: f64,
    pub im: f64,
}

impl From<anosovq_core::Complex64> for ComplexOut {
    fn from(c: anosovq_core::Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

#[derive(Debug, Serialize)]
pub struct DirectionOut {
    pub alpha_x: Vec<f64>,
    pub alpha_p: Vec<f64>,
}

impl From<&anosovq_core::weyl::Direction> for DirectionOut {
    fn from(d: &anosovq_core::weyl::Direction) -> Self {
        Self {
            alpha_x: d.alpha_x().to_vec(),
            alpha_p: d.alpha_p().to_vec(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ProfileEntryOut {
    pub alpha_x: Vec<f64>,
    pub alpha_p: Vec<f64>,
    pub exponent: f64,
    pub stderr: f64,
    pub stable: bool,
}

#[derive(Debug, Serialize)]
pub struct LyapunovReportOut {
    #[serde(rename = "E")]
    pub e: f64,
    pub lambda_c: f64,
    pub lambda_c_stderr: f64,
    pub lambda_bar: f64,
    pub classification: String,
    pub stable_direction: Option<DirectionOut>,
    pub profile: Vec<ProfileEntryOut>,
    pub horizon: f64,
    pub t0: f64,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct CertificateOut {
    pub lambda_plus: ComplexOut,
    pub classification: String,
    pub residual_max: f64,
    pub grid: usize,
    pub tolerance: f64,
    pub verdict: String,
    pub lambda_minus: ComplexOut,
    pub residuals: Vec<f64>,
    pub pairs: Vec<(f64, f64)>,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
pub struct CatDirectionOut {
    pub alpha_x: Vec<f64>,
    pub alpha_p: Vec<f64>,
    pub exponent: ComplexOut,
    pub residual: f64,
    pub derivation: String,
}

#[derive(Debug, Serialize)]
pub struct CatReportOut {
    pub lambda: f64,
    pub directions: Vec<CatDirectionOut>,
    pub verdict: String,
    #[serde(rename = "T")]
    pub t_kick: f64,
    pub seed: u64,
}

/// One CSV row of a scan; optional cells are emitted empty.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub e: f64,
    pub lambda_c: Option<f64>,
    pub lambda_bar: Option<f64>,
    pub classification: &'static str,
    pub residual: Option<f64>,
}

pub const SCAN_HEADER: &str = "E,lambda_c,lambda_bar,classification,residual";

impl ScanRow {
    pub fn to_csv(&self) -> String {
        let opt = |v: &Option<f64>| v.map(fmt_sig12).unwrap_or_default();
        format!(
            "{},{},{},{},{}",
            fmt_sig12(self.e),
            opt(&self.lambda_c),
            opt(&self.lambda_bar),
            self.classification,
            opt(&self.residual)
        )
    }
}

/// Write to the path, or stdout when no path is configured.
pub fn emit(out: Option<&std::path::Path>, content: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}
