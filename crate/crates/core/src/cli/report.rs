//! Report rendering: JSON with fixed 17-significant-digit numbers, and CSV
//! scan tables.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::engine::{
    ChshSettings, CorrelationRecord, JointDistribution, ScanOutcome, ScanRow, CLASSICAL_BOUND,
    TSIRELSON_BOUND,
};
use crate::geometry::Point2;

/// Fixed decimal notation carrying 17 significant digits, enough to
/// round-trip any finite `f64`.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_owned();
    }
    if x == 0.0 {
        return format!("{x:.16}");
    }
    let exponent = x.abs().log10().floor() as i64;
    let decimals = (16 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Pretty JSON with [`format_number`] for every float.
struct ReportFormatter {
    inner: PrettyFormatter<'static>,
}

impl Formatter for ReportFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_number(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let formatter = ReportFormatter {
        inner: PrettyFormatter::new(),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, formatter);
    value.serialize(&mut ser).expect("report serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("utf-8 JSON")
}

pub const SCAN_CSV_HEADER: [&str; 13] = [
    "a_index",
    "a_prime_index",
    "b_index",
    "b_prime_index",
    "phi_a",
    "phi_a_prime",
    "phi_b",
    "phi_b_prime",
    "E_ab",
    "E_abp",
    "E_apb",
    "E_apbp",
    "S",
];

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SCAN_CSV_HEADER).expect("csv header");
    for r in rows {
        let ints = [r.a_index, r.a_prime_index, r.b_index, r.b_prime_index].map(|i| i.to_string());
        let floats = [
            r.phi_a,
            r.phi_a_prime,
            r.phi_b,
            r.phi_b_prime,
            r.e_ab,
            r.e_abp,
            r.e_apb,
            r.e_apbp,
            r.s,
        ]
        .map(format_number);
        w.write_record(ints.iter().chain(floats.iter()))
            .expect("csv row");
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("utf-8 CSV")
}

#[derive(Debug, Serialize)]
pub struct DistributionReport {
    pub p11: f64,
    pub p00: f64,
    pub p10: f64,
    pub p01: f64,
    pub residual: f64,
}

impl From<&JointDistribution> for DistributionReport {
    fn from(d: &JointDistribution) -> Self {
        DistributionReport {
            p11: d.p11,
            p00: d.p00,
            p10: d.p10,
            p01: d.p01,
            residual: d.residual,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct QuadratureCheck {
    pub nodes: usize,
    pub phi1_delta: f64,
    pub phi2_delta: f64,
    pub phi3_delta: f64,
    pub phi4_delta: f64,
    pub max_abs_delta: f64,
}

#[derive(Debug, Serialize)]
pub struct PhasesReport {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub phi4: f64,
    pub phi_a: f64,
    pub phi_b: f64,
    pub quadrature: QuadratureCheck,
}

#[derive(Debug, Serialize)]
pub struct ProductAmplitude {
    pub label: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Serialize)]
pub struct CoupledAmplitude {
    pub a: &'static str,
    pub b: &'static str,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Serialize)]
pub struct StateReport {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub phi4: f64,
    pub phi_a: f64,
    pub phi_b: f64,
    pub product: Vec<ProductAmplitude>,
    pub coupled_grouping: &'static str,
    pub coupled: Vec<CoupledAmplitude>,
}

#[derive(Debug, Serialize)]
pub struct CorrelateReport {
    pub phi_a: f64,
    pub phi_b: f64,
    pub distribution: DistributionReport,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "E_closed_form")]
    pub e_closed_form: f64,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum SettingsReport {
    Geometric {
        a: Point2,
        a_prime: Point2,
        b: Point2,
        b_prime: Point2,
    },
    Direct {
        phi_a: f64,
        phi_a_prime: f64,
        phi_b: f64,
        phi_b_prime: f64,
    },
}

#[derive(Debug, Serialize)]
pub struct TermReport {
    pub setting: &'static str,
    pub phi_a: f64,
    pub phi_b: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub distribution: DistributionReport,
}

#[derive(Debug, Serialize)]
pub struct ChshReport {
    pub mode: &'static str,
    pub settings: SettingsReport,
    pub terms: Vec<TermReport>,
    #[serde(rename = "S")]
    pub s: f64,
    pub classical_bound: f64,
    pub tsirelson_bound: f64,
    pub violates_classical_bound: bool,
}

impl From<&CorrelationRecord> for ChshReport {
    fn from(r: &CorrelationRecord) -> Self {
        let (mode, settings) = match r.settings {
            ChshSettings::Geometric {
                a,
                a_prime,
                b,
                b_prime,
            } => (
                "geometric",
                SettingsReport::Geometric {
                    a,
                    a_prime,
                    b,
                    b_prime,
                },
            ),
            ChshSettings::Direct {
                phi_a,
                phi_a_prime,
                phi_b,
                phi_b_prime,
            } => (
                "direct",
                SettingsReport::Direct {
                    phi_a,
                    phi_a_prime,
                    phi_b,
                    phi_b_prime,
                },
            ),
        };
        let names = ["(A,B)", "(A,B')", "(A',B)", "(A',B')"];
        ChshReport {
            mode,
            settings,
            terms: r
                .terms
                .iter()
                .zip(names)
                .map(|(t, setting)| TermReport {
                    setting,
                    phi_a: t.phi_a,
                    phi_b: t.phi_b,
                    e: t.e,
                    distribution: (&t.distribution).into(),
                })
                .collect(),
            s: r.s,
            classical_bound: CLASSICAL_BOUND,
            tsirelson_bound: TSIRELSON_BOUND,
            violates_classical_bound: r.violates_classical_bound(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ScanRowReport {
    pub a_index: usize,
    pub a_prime_index: usize,
    pub b_index: usize,
    pub b_prime_index: usize,
    pub phi_a: f64,
    pub phi_a_prime: f64,
    pub phi_b: f64,
    pub phi_b_prime: f64,
    #[serde(rename = "E_ab")]
    pub e_ab: f64,
    #[serde(rename = "E_abp")]
    pub e_abp: f64,
    #[serde(rename = "E_apb")]
    pub e_apb: f64,
    #[serde(rename = "E_apbp")]
    pub e_apbp: f64,
    #[serde(rename = "S")]
    pub s: f64,
}

impl From<&ScanRow> for ScanRowReport {
    fn from(r: &ScanRow) -> Self {
        ScanRowReport {
            a_index: r.a_index,
            a_prime_index: r.a_prime_index,
            b_index: r.b_index,
            b_prime_index: r.b_prime_index,
            phi_a: r.phi_a,
            phi_a_prime: r.phi_a_prime,
            phi_b: r.phi_b,
            phi_b_prime: r.phi_b_prime,
            e_ab: r.e_ab,
            e_abp: r.e_abp,
            e_apb: r.e_apb,
            e_apbp: r.e_apbp,
            s: r.s,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SkippedReport {
    pub locus: &'static str,
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, Serialize)]
pub struct ScanReport {
    pub evaluated: usize,
    pub skipped: Vec<SkippedReport>,
    pub best: ScanRowReport,
    pub best_record: ChshReport,
    pub table: Vec<ScanRowReport>,
}

impl From<&ScanOutcome> for ScanReport {
    fn from(o: &ScanOutcome) -> Self {
        ScanReport {
            evaluated: o.evaluated,
            skipped: o
                .skipped
                .iter()
                .map(|s| SkippedReport {
                    locus: s.locus,
                    index: s.index,
                    reason: s.reason.clone(),
                })
                .collect(),
            best: (&o.best).into(),
            best_record: (&o.best_record).into(),
            table: o.table.iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct LhvReport {
    pub samples: usize,
    pub seed: u64,
    pub sampled_max_abs_s: f64,
    pub exhaustive_max_abs_s: f64,
    pub classical_bound: f64,
}

#[derive(Debug, Serialize)]
pub struct ViolationReport {
    pub segment: usize,
    pub distance: f64,
}

#[derive(Debug, Serialize)]
pub struct ContourReport {
    pub contour: &'static str,
    pub ok: bool,
    pub violations: Vec<ViolationReport>,
}

#[derive(Debug, Serialize)]
pub struct ValidateReport {
    pub exclusion_radius: f64,
    pub ok: bool,
    pub contours: Vec<ContourReport>,
}
