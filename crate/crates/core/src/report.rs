//! Report assembly and emission (JSON document, CSV row, text table).

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{
    gaussian_mutual_info, phi_ds_gauss, phi_fs_gauss, phi_g_gauss, GaussianDiagnostics,
    GaussianSplitResult,
};
use crate::hierarchy::{HierarchyReport, MeasureValues};
use crate::io::{System, SystemConfig};
use crate::model::SplitModelKind;
use crate::phi::{
    mutual_information_of, phi_ds, phi_fs, phi_g, phi_md, PhiDiagnostics, PhiOptions, PhiResult,
};

/// Tolerance of the hierarchy section in reports, in nats.
pub const REPORT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    /// Converts a value in nats.
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

impl FromStr for Units {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nats" => Ok(Units::Nats),
            "bits" => Ok(Units::Bits),
            other => Err(format!("unknown units `{other}` (expected nats or bits)")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub error_code: &'static str,
    pub error: String,
}

impl From<&Error> for Failure {
    fn from(e: &Error) -> Self {
        Failure {
            error_code: e.code(),
            error: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum MeasureDiagnostics {
    Discrete(PhiDiagnostics),
    Gaussian(GaussianDiagnostics),
    Failed(Failure),
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ReportDiagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fs: Option<MeasureDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ds: Option<MeasureDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub md: Option<MeasureDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<MeasureDiagnostics>,
}

/// The serialized result for one system. Field order is fixed by the
/// struct, so output is byte-identical for identical inputs.
#[derive(Debug, Clone, Serialize)]
pub struct PhiReport {
    pub label: String,
    pub units: Units,
    pub n: usize,
    #[serde(rename = "type")]
    pub system_type: &'static str,
    #[serde(rename = "I")]
    pub i: Option<f64>,
    pub phi_fs: Option<f64>,
    pub phi_ds: Option<f64>,
    pub phi_md: Option<f64>,
    pub phi_g: Option<f64>,
    pub hierarchy: HierarchyReport,
    pub diagnostics: ReportDiagnostics,
    pub version: &'static str,
    pub seed: Option<u64>,
}

/// Measures computed when none are requested explicitly.
pub fn default_measures(system: &System) -> Vec<SplitModelKind> {
    SplitModelKind::ALL
        .into_iter()
        .filter(|k| !(matches!(system, System::Gaussian(_)) && *k == SplitModelKind::MD))
        .collect()
}

struct Slot {
    value: Option<f64>,
    diagnostics: Option<MeasureDiagnostics>,
}

fn discrete_slot(r: Result<PhiResult>, units: Units) -> Slot {
    match r {
        Ok(r) => {
            let mut d = r.diagnostics;
            d.kl_check = units.convert(d.kl_check);
            Slot {
                value: Some(units.convert(r.phi)),
                diagnostics: Some(MeasureDiagnostics::Discrete(d)),
            }
        }
        Err(e) => failed_slot(&e),
    }
}

fn gaussian_slot(r: Result<GaussianSplitResult>, units: Units) -> Slot {
    match r {
        Ok(r) => {
            let mut d = r.diagnostics;
            d.kl_check = units.convert(d.kl_check);
            Slot {
                value: Some(units.convert(r.phi)),
                diagnostics: Some(MeasureDiagnostics::Gaussian(d)),
            }
        }
        Err(e) => failed_slot(&e),
    }
}

fn failed_slot(e: &Error) -> Slot {
    Slot {
        value: None,
        diagnostics: Some(MeasureDiagnostics::Failed(e.into())),
    }
}

/// Computes the requested measures for a config. Asking for the decoding
/// measure on a Gaussian system is an error; individual solver failures are
/// recorded in the report instead.
pub fn compute_report(
    cfg: &SystemConfig,
    measures: &[SplitModelKind],
    units: Units,
    default_label: &str,
) -> Result<PhiReport> {
    let system = cfg.build()?;
    let wants = |k| measures.contains(&k);
    let empty = || Slot {
        value: None,
        diagnostics: None,
    };
    let (i, fs, ds, md, g) = match &system {
        System::Discrete(p) => {
            let opts = PhiOptions {
                seed: cfg.seed.unwrap_or(0),
                ..PhiOptions::default()
            };
            let run = |k, f: &dyn Fn() -> Result<PhiResult>| {
                if wants(k) {
                    discrete_slot(f(), units)
                } else {
                    empty()
                }
            };
            (
                wants(SplitModelKind::I).then(|| mutual_information_of(p)),
                run(SplitModelKind::FS, &|| phi_fs(p)),
                run(SplitModelKind::DS, &|| phi_ds(p)),
                run(SplitModelKind::MD, &|| phi_md(p, &opts)),
                run(SplitModelKind::G, &|| phi_g(p, &opts)),
            )
        }
        System::Gaussian(sys) => {
            if wants(SplitModelKind::MD) {
                return Err(Error::UnsupportedMeasure("md".into()));
            }
            let run = |k, f: &dyn Fn() -> Result<GaussianSplitResult>| {
                if wants(k) {
                    gaussian_slot(f(), units)
                } else {
                    empty()
                }
            };
            (
                wants(SplitModelKind::I).then(|| gaussian_mutual_info(sys)),
                run(SplitModelKind::FS, &|| phi_fs_gauss(sys)),
                run(SplitModelKind::DS, &|| phi_ds_gauss(sys)),
                empty(),
                run(SplitModelKind::G, &|| phi_g_gauss(sys)),
            )
        }
    };
    let i = i.map(|v| units.convert(v));
    let values = MeasureValues {
        // Bound checks against I are skipped when I was not requested.
        i: i.unwrap_or(f64::INFINITY),
        phi_fs: fs.value,
        phi_ds: ds.value,
        phi_md: md.value,
        phi_g: g.value,
    };
    let mut hierarchy = HierarchyReport::evaluate(&values, units.convert(REPORT_TOL));
    if i.is_none() {
        hierarchy.fs_exceeds_i = false;
    }
    Ok(PhiReport {
        label: cfg
            .label
            .clone()
            .unwrap_or_else(|| default_label.to_string()),
        units,
        n: system.n(),
        system_type: system.type_name(),
        i,
        phi_fs: fs.value,
        phi_ds: ds.value,
        phi_md: md.value,
        phi_g: g.value,
        hierarchy,
        diagnostics: ReportDiagnostics {
            fs: fs.diagnostics,
            ds: ds.diagnostics,
            md: md.diagnostics,
            g: g.diagnostics,
        },
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
    })
}

pub const CSV_HEADER: [&str; 7] = ["label", "I", "phi_fs", "phi_ds", "phi_md", "phi_g", "flags"];

fn fmt_value(v: Option<f64>) -> String {
    match v {
        Some(v) if v.is_finite() => format!("{v:.10}"),
        _ => String::new(),
    }
}

impl PhiReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    fn entries(&self) -> [(&'static str, Option<f64>, Option<&MeasureDiagnostics>); 5] {
        let d = &self.diagnostics;
        [
            ("I", self.i, None),
            ("phi_fs", self.phi_fs, d.fs.as_ref()),
            ("phi_ds", self.phi_ds, d.ds.as_ref()),
            ("phi_md", self.phi_md, d.md.as_ref()),
            ("phi_g", self.phi_g, d.g.as_ref()),
        ]
    }

    /// Condition flags: `fs_exceeds_i`, `hierarchy_violation`,
    /// `failed_<measure>`, `non_finite_<measure>`, `smoothed`.
    pub fn flags(&self) -> Vec<String> {
        let mut flags = Vec::new();
        if self.hierarchy.fs_exceeds_i {
            flags.push("fs_exceeds_i".to_string());
        }
        if !self.hierarchy.passed {
            flags.push("hierarchy_violation".to_string());
        }
        let mut smoothed = false;
        for (name, value, diag) in self.entries() {
            match diag {
                Some(MeasureDiagnostics::Failed(_)) => flags.push(format!("failed_{name}")),
                Some(MeasureDiagnostics::Discrete(d)) if d.smoothing.is_some() => smoothed = true,
                _ => {}
            }
            if value.is_some_and(|v| !v.is_finite()) {
                flags.push(format!("non_finite_{name}"));
            }
        }
        if smoothed {
            flags.push("smoothed".to_string());
        }
        flags
    }

    pub fn has_failures(&self) -> bool {
        self.entries().iter().any(|(_, v, d)| {
            matches!(d, Some(MeasureDiagnostics::Failed(_))) || v.is_some_and(|v| !v.is_finite())
        })
    }

    /// `label, I, phi_fs, phi_ds, phi_md, phi_g, flags`; absent values are
    /// empty, flags are `;`-separated.
    pub fn csv_record(&self) -> Vec<String> {
        let mut row = vec![self.label.clone()];
        row.extend(self.entries().iter().map(|(_, v, _)| fmt_value(*v)));
        row.push(self.flags().join(";"));
        row
    }

    /// Human-readable table with six decimals.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} ({}, n = {}, {})",
            self.label,
            self.system_type,
            self.n,
            self.units.as_str()
        );
        for (name, value, diag) in self.entries() {
            let shown = match (value, diag) {
                (Some(v), _) => format!("{v:.6}"),
                (None, Some(MeasureDiagnostics::Failed(f))) => format!("failed ({})", f.error_code),
                _ => "-".to_string(),
            };
            let _ = writeln!(out, "  {name:<8} {shown:>12}");
        }
        let status = if self.hierarchy.passed {
            "ok"
        } else {
            "VIOLATED"
        };
        let _ = writeln!(
            out,
            "  hierarchy {status} ({} violations{})",
            self.hierarchy.violations,
            if self.hierarchy.fs_exceeds_i {
                "; phi_fs exceeds I"
            } else {
                ""
            }
        );
        out
    }
}

/// Writes reports as CSV rows with [`CSV_HEADER`].
pub fn write_csv<W: std::io::Write>(writer: W, reports: &[PhiReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in reports {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{shared_noise_system, swap_system};

    fn all() -> Vec<SplitModelKind> {
        SplitModelKind::ALL.to_vec()
    }

    #[test]
    fn swap_row() {
        let cfg = SystemConfig::from_discrete(&swap_system().unwrap()).with_label("swap");
        let r = compute_report(&cfg, &all(), Units::Nats, "x").unwrap();
        let row = r.csv_record();
        assert_eq!(row[0], "swap");
        for k in [1, 2, 3, 4] {
            assert!(
                (row[k].parse::<f64>().unwrap() - 1.386294).abs() < 1e-6,
                "{row:?}"
            );
        }
        let bits = compute_report(&cfg, &all(), Units::Bits, "x").unwrap();
        assert!((bits.phi_fs.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn shared_noise_flags() {
        let cfg = SystemConfig::from_discrete(&shared_noise_system().unwrap());
        let r = compute_report(&cfg, &all(), Units::Nats, "noise").unwrap();
        assert_eq!(r.label, "noise");
        assert!(r.flags().contains(&"fs_exceeds_i".to_string()));
        assert!(r.hierarchy.passed);
        assert!(r.render_table().contains("0.693147"));
    }

    #[test]
    fn md_on_gaussian_is_rejected() {
        let sys = crate::random::random_gaussian(2, 1).unwrap();
        let cfg = SystemConfig::from_gaussian(&sys);
        let err = compute_report(&cfg, &all(), Units::Nats, "g").unwrap_err();
        assert_eq!(err.code(), "E_UNSUPPORTED_MEASURE");
        let System::Gaussian(_) = cfg.build().unwrap() else {
            unreachable!()
        };
        let ok = compute_report(
            &cfg,
            &default_measures(&cfg.build().unwrap()),
            Units::Nats,
            "g",
        )
        .unwrap();
        assert!(ok.phi_md.is_none());
        assert!(ok.to_json().contains("\"phi_md\": null"));
    }
}
