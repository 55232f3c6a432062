use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::discrete::VarSet;

/// The split manifolds a joint can be projected onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitModelKind {
    /// Independent `q(x) q(y)`; the projection distance is mutual information.
    I,
    /// Fully split: `q(x) prod_i q(y_i | x_i)`.
    FS,
    /// Diagonally split graphical model: `f(x) g(y) prod_i h(x_i, y_i)`.
    DS,
    /// Mismatched decoding: one-parameter family in beta.
    MD,
    /// Geometric (causally split): `x_i` independent of `y_j` given the other inputs.
    G,
}

impl SplitModelKind {
    pub const ALL: [SplitModelKind; 5] = [
        SplitModelKind::I,
        SplitModelKind::FS,
        SplitModelKind::DS,
        SplitModelKind::MD,
        SplitModelKind::G,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SplitModelKind::I => "i",
            SplitModelKind::FS => "fs",
            SplitModelKind::DS => "ds",
            SplitModelKind::MD => "md",
            SplitModelKind::G => "g",
        }
    }

    /// Generating cliques for the e-flat models; `None` for the curved ones.
    pub fn cliques(self, n: usize) -> Option<Vec<VarSet>> {
        let pairs = (0..n).map(|i| VarSet::pair(n, i));
        match self {
            SplitModelKind::I => Some(vec![VarSet::all_x(n), VarSet::all_y(n)]),
            SplitModelKind::FS => Some(std::iter::once(VarSet::all_x(n)).chain(pairs).collect()),
            SplitModelKind::DS => Some(
                [VarSet::all_x(n), VarSet::all_y(n)]
                    .into_iter()
                    .chain(pairs)
                    .collect(),
            ),
            SplitModelKind::MD | SplitModelKind::G => None,
        }
    }

    pub fn is_e_flat(self) -> bool {
        matches!(
            self,
            SplitModelKind::I | SplitModelKind::FS | SplitModelKind::DS
        )
    }
}

impl fmt::Display for SplitModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SplitModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i" | "mi" => Ok(SplitModelKind::I),
            "fs" => Ok(SplitModelKind::FS),
            "ds" => Ok(SplitModelKind::DS),
            "md" => Ok(SplitModelKind::MD),
            "g" => Ok(SplitModelKind::G),
            other => Err(format!(
                "unknown measure `{other}` (expected i, fs, ds, md or g)"
            )),
        }
    }
}
