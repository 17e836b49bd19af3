//! JSON run reports.
//!
//! Every optional field is omitted when absent, so a `null` anywhere in an
//! emitted report can only come from a non-finite number; [`RunReport::validate`]
//! rejects those. Timings live in their own object so two runs can be compared
//! with [`RunReport::canonical_json`].

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::certificate::{AccretivityCheck, Certificate};
use crate::decomposition::{AssumptionReport, Decomposition};
use crate::error::{DecayError, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexValue> for Complex64 {
    fn from(z: ComplexValue) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// Where the operator pair came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_path: Option<String>,
    /// Generator family name.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Generator arguments as given on the command line.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub params: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionSummary {
    pub dim: usize,
    pub a0: f64,
    pub beta: f64,
    pub delta: f64,
    pub sector_tan: f64,
    pub norm_s: f64,
    pub norm_d1_dual: f64,
    pub norm_d2_dual: f64,
}

impl From<&Decomposition> for DecompositionSummary {
    fn from(dec: &Decomposition) -> Self {
        Self {
            dim: dec.dim(),
            a0: dec.a0,
            beta: dec.beta,
            delta: dec.delta,
            sector_tan: dec.sector_tan,
            norm_s: dec.norm_s,
            norm_d1_dual: dec.norm_d1_dual,
            norm_d2_dual: dec.norm_d2_dual,
        }
    }
}

/// A certificate with the outcome of its verification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub certificate: Certificate,
    /// Whether the parameters were given rather than searched.
    pub pinned: bool,
    /// `C` in the energy envelope.
    pub energy_constant: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accretivity: Option<AccretivityCheck>,
    /// Largest `‖G^{1/2}e^{t𝒜}G^{−1/2}‖₂ / e^{−rate·t}` over the sample times.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contraction_worst_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contraction_holds: Option<bool>,
    /// `ω₁` evaluated with the unsquared dual norm at the same parameters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega1_unsquared: Option<f64>,
    /// `1 + k‖D₁‖ + k²/a₀`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega2_footnote_bound: Option<f64>,
    /// `1 + k‖D₁‖ + kβ/a₀`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega2_in_text_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationEntry {
    pub variant: String,
    pub rate: f64,
    pub localized: bool,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub spectral_abscissa: f64,
    pub max_residual: f64,
    pub residuals_ok: bool,
    pub eigenvalues: Vec<ComplexValue>,
    /// One entry per valid certificate.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub localization: Vec<LocalizationEntry>,
    /// All entries localized; absent when there is nothing to check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub localized: Option<bool>,
    /// Smallest gap over the entries.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeEntry {
    pub variant: String,
    pub rate: f64,
    pub constant: f64,
    pub holds: bool,
    pub worst_ratio: f64,
    pub worst_time: f64,
    /// `fitted_rate ≥ rate − 1e−3`; absent without a fitted rate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_consistent: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub ic_seed: u64,
    pub horizon: f64,
    pub samples: usize,
    pub initial_energy: f64,
    pub final_energy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_rate: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub envelopes: Vec<EnvelopeEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub envelope_holds: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorEntry {
    pub kind: String,
    pub message: String,
    /// Pipeline stage that produced the error.
    pub stage: String,
    /// False for failures of one variant when another variant succeeded.
    pub fatal: bool,
}

impl ErrorEntry {
    pub fn new(stage: &str, err: &DecayError) -> Self {
        Self { kind: err.kind().to_string(), message: err.to_string(), stage: stage.to_string(), fatal: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub input: InputDescriptor,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assumptions: Option<AssumptionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub certificates: Vec<CertificateEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub errors: Vec<ErrorEntry>,
    pub passed: bool,
    /// Wall-clock seconds per stage.
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(command: &str, input: InputDescriptor) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            input,
            assumptions: None,
            decomposition: None,
            certificates: Vec::new(),
            spectrum: None,
            simulation: None,
            errors: Vec::new(),
            passed: false,
            timings: BTreeMap::new(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let text = serde_json::to_string_pretty(self).map_err(|e| DecayError::InvalidInput(e.to_string()))?;
        validate_value(&serde_json::from_str(&text).expect("serializer output is valid JSON"))?;
        Ok(text)
    }

    /// Parses and validates a report.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| DecayError::Parse { line: e.line(), message: e.to_string() })?;
        validate_value(&value)?;
        serde_json::from_value(value).map_err(|e| DecayError::InvalidInput(format!("report schema: {e}")))
    }

    /// Schema version matches and every number is finite.
    pub fn validate(&self) -> Result<()> {
        let value = serde_json::to_value(self).map_err(|e| DecayError::InvalidInput(e.to_string()))?;
        validate_value(&value)
    }

    /// The report serialized without its timings.
    pub fn canonical_json(&self) -> Result<String> {
        let mut stripped = self.clone();
        stripped.timings.clear();
        stripped.to_json()
    }
}

fn find_null(value: &Value, path: &mut Vec<String>) -> bool {
    match value {
        Value::Null => true,
        Value::Array(items) => items.iter().enumerate().any(|(i, v)| {
            path.push(i.to_string());
            let found = find_null(v, path);
            if !found {
                path.pop();
            }
            found
        }),
        Value::Object(map) => map.iter().any(|(k, v)| {
            path.push(k.clone());
            let found = find_null(v, path);
            if !found {
                path.pop();
            }
            found
        }),
        _ => false,
    }
}

fn validate_value(value: &Value) -> Result<()> {
    let version = value.get("schema_version").and_then(Value::as_u64);
    if version != Some(SCHEMA_VERSION as u64) {
        return Err(DecayError::InvalidInput(format!(
            "report schema_version {version:?}, expected {SCHEMA_VERSION}"
        )));
    }
    let mut path = Vec::new();
    if find_null(value, &mut path) {
        return Err(DecayError::InvalidInput(format!("non-finite number at /{}", path.join("/"))));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{make_certificate_t1, Variant};
    use crate::constants::Theorem1Params;
    use crate::decomposition::{check_assumptions, decompose, OperatorPair};
    use crate::linalg::{real, CMat};

    fn sample() -> RunReport {
        let dec = decompose(&OperatorPair::new(CMat::from_element(1, 1, real(1.0)), CMat::from_element(1, 1, real(2.0))).unwrap())
            .unwrap();
        let cert = make_certificate_t1(&dec, Theorem1Params::new(1.0, 0.5)).unwrap();
        let mut report = RunReport::new("certify", InputDescriptor { family: Some("scalar".into()), ..Default::default() });
        report.assumptions = Some(check_assumptions(&dec));
        report.decomposition = Some((&dec).into());
        report.certificates.push(CertificateEntry {
            energy_constant: cert.energy_constant(),
            certificate: cert,
            pinned: true,
            accretivity: None,
            contraction_worst_ratio: Some(0.5),
            contraction_holds: Some(true),
            omega1_unsquared: None,
            omega2_footnote_bound: Some(4.0),
            omega2_in_text_bound: Some(5.0),
        });
        report.spectrum = Some(SpectrumSummary {
            spectral_abscissa: -1.0,
            max_residual: 0.0,
            residuals_ok: true,
            eigenvalues: vec![Complex64::new(-1.0, 0.1).into()],
            localization: vec![],
            localized: None,
            gap: None,
        });
        report.passed = true;
        report.timings.insert("certify".into(), 0.25);
        report
    }

    #[test]
    fn round_trip() {
        let report = sample();
        let text = report.to_json().unwrap();
        assert!(text.contains("\"schema_version\": 1"));
        assert!(text.contains("\"re\": -1.0"));
        assert!(text.contains("\"variant\": \"theorem1\""));
        let back = RunReport::from_json(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.certificates[0].certificate.variant, Variant::Theorem1);
    }

    #[test]
    fn non_finite_rejected() {
        let mut report = sample();
        report.certificates[0].energy_constant = f64::NAN;
        let err = report.validate().unwrap_err();
        assert!(err.to_string().contains("/certificates/0/energy_constant"), "{err}");
        assert!(report.to_json().is_err());
    }

    #[test]
    fn wrong_schema_version_rejected() {
        let text = sample().to_json().unwrap().replace("\"schema_version\": 1", "\"schema_version\": 99");
        assert!(RunReport::from_json(&text).is_err());
    }

    #[test]
    fn canonical_form_ignores_timings() {
        let a = sample();
        let mut b = sample();
        b.timings.insert("certify".into(), 9.0);
        assert_ne!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(a.canonical_json().unwrap(), b.canonical_json().unwrap());
    }
}
