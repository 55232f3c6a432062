//! Ordering and bound checks between the measures.
//!
//! Checked relations: `Phi_FS >= Phi_DS`, `Phi_MD >= Phi_DS`,
//! `Phi_FS >= Phi_G`, and `0 <= Phi_k <= I` for `k` in DS, MD, G.
//! `Phi_FS <= I` is not required and is reported only as a flag.

use serde::Serialize;

/// The five values for one system; `None` where a measure was not computed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct MeasureValues {
    #[serde(rename = "I")]
    pub i: f64,
    pub phi_fs: Option<f64>,
    pub phi_ds: Option<f64>,
    pub phi_md: Option<f64>,
    pub phi_g: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyCheck {
    pub name: &'static str,
    /// Amount by which the relation holds (negative when violated).
    pub margin: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyReport {
    pub tol: f64,
    pub passed: bool,
    pub violations: usize,
    /// `Phi_FS > I + tol`: the known failure of the upper bound for FS,
    /// recorded but not counted as a violation.
    pub fs_exceeds_i: bool,
    pub checks: Vec<HierarchyCheck>,
}

impl HierarchyReport {
    pub fn evaluate(v: &MeasureValues, tol: f64) -> Self {
        let mut checks = Vec::new();
        let mut ge = |name, lhs: Option<f64>, rhs: Option<f64>| {
            if let (Some(l), Some(r)) = (lhs, rhs) {
                let margin = l - r;
                checks.push(HierarchyCheck {
                    name,
                    margin,
                    passed: margin >= -tol,
                });
            }
        };
        ge("fs_ge_ds", v.phi_fs, v.phi_ds);
        ge("md_ge_ds", v.phi_md, v.phi_ds);
        ge("fs_ge_g", v.phi_fs, v.phi_g);
        ge("ds_nonnegative", v.phi_ds, Some(0.0));
        ge("ds_le_i", Some(v.i), v.phi_ds);
        ge("md_nonnegative", v.phi_md, Some(0.0));
        ge("md_le_i", Some(v.i), v.phi_md);
        ge("g_nonnegative", v.phi_g, Some(0.0));
        ge("g_le_i", Some(v.i), v.phi_g);
        let violations = checks.iter().filter(|c| !c.passed).count();
        HierarchyReport {
            tol,
            passed: violations == 0,
            violations,
            fs_exceeds_i: v.phi_fs.is_some_and(|fs| fs > v.i + tol),
            checks,
        }
    }

    /// Smallest margin over all checks (`+inf` if none ran).
    pub fn worst_margin(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.margin)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn failed(&self) -> impl Iterator<Item = &HierarchyCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}
