//! Machine-readable run artifacts: the spectrum report (JSON, schema 1) and
//! the band-sample table (CSV).
//!
//! Serialization is deterministic: identical inputs produce byte-identical
//! documents. Floats are written with 17 significant digits (the f64
//! round-trip width) in scientific notation.

use std::io;

use serde::Serialize;

use crate::asymptotics::{CriterionRecord, FiniteGapVerdicts};
use crate::bands::{Band, ComplexationPoint, Side};
use crate::bloch::BlochEigenvalue;
use crate::potential::SpVerdict;
use crate::singularities::{MathieuSpectrality, SingularityKind, SingularityRecord};
use crate::types::{Ternary, Tolerances};

pub const SCHEMA_VERSION: u32 = 1;

fn pair(z: num_complex::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Band summary as emitted in the report (samples live in the CSV).
#[derive(Debug, Clone, Serialize)]
pub struct BandReport {
    pub n: i32,
    pub eps_n: Option<f64>,
    pub delta_n: Option<f64>,
    pub real_segment: Option<[f64; 2]>,
    pub endpoint_zero: [f64; 2],
    pub endpoint_pi: [f64; 2],
    pub sample_count: usize,
    pub left_tail_samples: usize,
    pub right_tail_samples: usize,
}

impl From<&Band> for BandReport {
    fn from(b: &Band) -> Self {
        BandReport {
            n: b.n,
            eps_n: b.eps_n,
            delta_n: b.delta_n,
            real_segment: b.real_segment.map(|(lo, hi)| [lo, hi]),
            endpoint_zero: pair(b.endpoints.0),
            endpoint_pi: pair(b.endpoints.1),
            sample_count: b.samples.len(),
            left_tail_samples: b.left_tail.as_ref().map_or(0, |t| t.len()),
            right_tail_samples: b.right_tail.as_ref().map_or(0, |t| t.len()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexationReport {
    pub n: i32,
    pub t: f64,
    pub lambda: [f64; 2],
    pub side: Side,
}

impl From<&ComplexationPoint> for ComplexationReport {
    fn from(c: &ComplexationPoint) -> Self {
        ComplexationReport { n: c.n, t: c.t, lambda: pair(c.lambda), side: c.side }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularityReport {
    pub n: i32,
    pub t: f64,
    pub lambda: [f64; 2],
    pub kind: SingularityKind,
    pub projection_kappa: Option<f64>,
    pub is_complexation: bool,
}

impl From<&SingularityRecord> for SingularityReport {
    fn from(s: &SingularityRecord) -> Self {
        SingularityReport {
            n: s.n,
            t: s.t,
            lambda: pair(s.lambda),
            kind: s.kind,
            projection_kappa: if s.projection_kappa.is_finite() {
                Some(s.projection_kappa)
            } else {
                None
            },
            is_complexation: s.is_complexation,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpReport {
    pub p: i32,
    pub s: i32,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub n_lower: i32,
    pub fit_residual: Option<f64>,
    pub holds: Ternary,
}

impl From<&SpVerdict> for SpReport {
    fn from(v: &SpVerdict) -> Self {
        SpReport {
            p: v.p,
            s: v.s,
            c1: v.c1,
            c2: v.c2,
            c3: v.c3,
            n_lower: v.n_lower,
            fit_residual: if v.fit_residual.is_finite() { Some(v.fit_residual) } else { None },
            holds: v.holds,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FiniteGapReport {
    pub negative_pn: Ternary,
    pub alpha: f64,
    pub g_dominance: Ternary,
    pub beta: f64,
    pub delta: f64,
    pub jump_comparison: Ternary,
    pub jump_c: f64,
    pub jump_d: f64,
    pub combined: Ternary,
}

impl From<&FiniteGapVerdicts> for FiniteGapReport {
    fn from(v: &FiniteGapVerdicts) -> Self {
        FiniteGapReport {
            negative_pn: v.negative_pn,
            alpha: v.alpha,
            g_dominance: v.g_dominance,
            beta: v.beta,
            delta: v.delta,
            jump_comparison: v.jump_comparison,
            jump_c: v.jump_c,
            jump_d: v.jump_d,
            combined: v.combined(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriteriaReport {
    pub sp: SpReport,
    pub records: Vec<CriterionRecord>,
    pub finite_gap: FiniteGapReport,
    pub asymptotically_spectral: Ternary,
}

#[derive(Debug, Clone, Serialize)]
pub struct MathieuReport {
    pub spectrality: MathieuSpectrality,
    pub isospectral_partner: [f64; 2],
    pub max_deviation: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Verdicts {
    pub spectrum_real: Ternary,
    pub half_line: Ternary,
    pub finite_gaps: Ternary,
}

impl Default for Verdicts {
    fn default() -> Self {
        Verdicts {
            spectrum_real: Ternary::Inconclusive,
            half_line: Ternary::Inconclusive,
            finite_gaps: Ternary::Inconclusive,
        }
    }
}

/// The emitted run artifact.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub schema: u32,
    pub label: String,
    pub status: String,
    pub n_max: i32,
    pub tolerances: Tolerances,
    pub bands: Vec<BandReport>,
    pub real_gaps: Vec<[f64; 2]>,
    pub complexation_points: Vec<ComplexationReport>,
    pub conjugation_defect: Option<f64>,
    pub verdicts: Verdicts,
    pub criteria: Option<CriteriaReport>,
    pub singularities: Option<Vec<SingularityReport>>,
    pub mathieu: Option<MathieuReport>,
    pub diagnostics: Vec<String>,
}

impl SpectrumReport {
    pub fn new(label: impl Into<String>, n_max: i32, tolerances: Tolerances) -> Self {
        SpectrumReport {
            schema: SCHEMA_VERSION,
            label: label.into(),
            status: "ok".to_string(),
            n_max,
            tolerances,
            bands: Vec::new(),
            real_gaps: Vec::new(),
            complexation_points: Vec::new(),
            conjugation_defect: None,
            verdicts: Verdicts::default(),
            criteria: None,
            singularities: None,
            mathieu: None,
            diagnostics: Vec::new(),
        }
    }
}

// ---------------------------------------------------------------------------
// Deterministic serialization
// ---------------------------------------------------------------------------

/// Compact JSON formatter printing every f64 with 17 significant digits.
struct Fixed17;

impl serde_json::ser::Formatter for Fixed17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write_f64_17(writer, value)
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write_f64_17(writer, value as f64)
    }
}

fn write_f64_17<W: ?Sized + io::Write>(writer: &mut W, value: f64) -> io::Result<()> {
    if value.is_finite() {
        write!(writer, "{value:.16e}")
    } else {
        // Non-finite values cannot appear in JSON numbers.
        writer.write_all(b"null")
    }
}

/// Serialize any report value to deterministic JSON text.
pub fn to_json(value: &impl Serialize) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed17);
    value.serialize(&mut ser).expect("report serialization cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("json is utf-8")
}

/// Band samples as CSV: n,t,re_lambda,im_lambda,multiplicity -- one row per
/// sample, sorted by (n, t), ASCII with a header row.
pub fn bands_to_csv(bands: &[Band]) -> String {
    let mut rows: Vec<&BlochEigenvalue> = bands.iter().flat_map(|b| b.samples.iter()).collect();
    rows.sort_by(|a, b| (a.n, a.t).partial_cmp(&(b.n, b.t)).unwrap());
    let mut out = String::from("n,t,re_lambda,im_lambda,multiplicity\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{}\n",
            r.n, r.t, r.lambda.re, r.lambda.im, r.multiplicity
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_use_17_significant_digits() {
        #[derive(Serialize)]
        struct S {
            x: f64,
        }
        let json = to_json(&S { x: std::f64::consts::PI });
        assert!(json.contains("3.1415926535897931e0"), "{json}");
    }

    #[test]
    fn nan_serializes_as_null() {
        #[derive(Serialize)]
        struct S {
            x: f64,
        }
        let json = to_json(&S { x: f64::NAN });
        assert!(json.contains("\"x\":null"), "{json}");
    }

    #[test]
    fn report_roundtrips_as_valid_json() {
        let r = SpectrumReport::new("zero", 4, Tolerances::default());
        let text = to_json(&r);
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["schema"], 1);
        assert_eq!(parsed["status"], "ok");
    }

    #[test]
    fn identical_reports_serialize_identically() {
        let a = to_json(&SpectrumReport::new("x", 2, Tolerances::default()));
        let b = to_json(&SpectrumReport::new("x", 2, Tolerances::default()));
        assert_eq!(a, b);
    }
}
