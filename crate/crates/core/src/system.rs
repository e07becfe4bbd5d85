//! Body systems: masses and pairwise couplings of the potential
//! `V = -a3/r12 - a2/r13 - a1/r23`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Names accepted by [`BodySystem::preset`].
pub const PRESETS: [&str; 3] = ["gravity-demo", "helium", "eep"];

/// Three point masses interacting through inverse-distance potentials.
///
/// `alphas[k]` couples the two bodies other than `k` (0-based), so
/// `alphas[2]` is the 1–2 coupling, `alphas[1]` the 1–3 coupling and
/// `alphas[0]` the 2–3 coupling. Positive couplings are attractive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodySystem {
    masses: [f64; 3],
    alphas: [f64; 3],
}

impl BodySystem {
    pub fn new(masses: [f64; 3], alphas: [f64; 3]) -> Result<Self> {
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::InvalidSystem(format!(
                "masses must be finite and strictly positive, got {m}"
            )));
        }
        if alphas.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidSystem("couplings must be finite".into()));
        }
        Ok(Self { masses, alphas })
    }

    /// Newtonian gravity, `alpha_k = G m_i m_j`.
    pub fn gravitational(masses: [f64; 3], g: f64) -> Result<Self> {
        let [m1, m2, m3] = masses;
        Self::new(masses, [g * m2 * m3, g * m1 * m3, g * m1 * m2])
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "gravity-demo" => Self::gravitational([1.6, 1.2, 1.0], 1.0),
            "helium" => Self::new([1.0, 1.0, 7289.56], [2.0, 2.0, -1.0]),
            "eep" => Self::new([1.0, 1.0, 1.0], [1.0, 1.0, -1.0]),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }

    pub fn masses(&self) -> [f64; 3] {
        self.masses
    }

    pub fn alphas(&self) -> [f64; 3] {
        self.alphas
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Coupling between bodies `i` and `j` (0-based, `i != j`).
    pub fn pair_alpha(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i != j && i < 3 && j < 3);
        self.alphas[3 - i - j]
    }

    pub fn pair_reduced_mass(&self, i: usize, j: usize) -> f64 {
        let (mi, mj) = (self.masses[i], self.masses[j]);
        mi * mj / (mi + mj)
    }

    /// Relabel the bodies: new body `a` is old body `perm[a]`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        let masses = perm.map(|p| self.masses[p]);
        let mut alphas = [0.0; 3];
        for (k, alpha) in alphas.iter_mut().enumerate() {
            let (a, b) = other_two(k);
            *alpha = self.pair_alpha(perm[a], perm[b]);
        }
        Self { masses, alphas }
    }

    /// The constant `G` when every coupling has the form `G m_i m_j` with
    /// `G > 0` (checked to 1e-12 relative).
    pub fn gravitational_constant(&self) -> Option<f64> {
        let m = self.masses;
        let g = self.alphas[2] / (m[0] * m[1]);
        if !(g > 0.0) {
            return None;
        }
        let consistent = (0..3).all(|k| {
            let (i, j) = other_two(k);
            let expected = g * m[i] * m[j];
            (self.alphas[k] - expected).abs() <= 1e-12 * expected.abs()
        });
        consistent.then_some(g)
    }
}

/// The two body indices different from `k`, in increasing order.
pub(crate) fn other_two(k: usize) -> (usize, usize) {
    match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

impl FromStr for BodySystem {
    type Err = Error;

    /// Parses the line-oriented description
    ///
    /// ```text
    /// # comment
    /// masses 1.6 1.2 1.0
    /// alphas 1.2 1.6 1.92
    /// ```
    fn from_str(text: &str) -> Result<Self> {
        let mut masses = None;
        let mut alphas = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let key = fields.next().unwrap_or_default();
            let values = fields
                .map(|f| {
                    f.parse::<f64>().map_err(|e| Error::Parse {
                        line: line_no,
                        msg: format!("`{f}`: {e}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let triple: [f64; 3] = values.try_into().map_err(|v: Vec<f64>| Error::Parse {
                line: line_no,
                msg: format!("expected 3 numbers after `{key}`, found {}", v.len()),
            })?;
            let slot = match key {
                "masses" => &mut masses,
                "alphas" => &mut alphas,
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("unknown keyword `{other}`"),
                    })
                }
            };
            if slot.replace(triple).is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("duplicate `{key}` line"),
                });
            }
        }
        let missing = |what: &str| Error::Parse {
            line: text.lines().count(),
            msg: format!("missing `{what}` line"),
        };
        let masses = masses.ok_or_else(|| missing("masses"))?;
        let alphas = alphas.ok_or_else(|| missing("alphas"))?;
        Self::new(masses, alphas)
    }
}

impl fmt::Display for BodySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [m1, m2, m3] = self.masses;
        let [a1, a2, a3] = self.alphas;
        writeln!(f, "masses {m1} {m2} {m3}")?;
        writeln!(f, "alphas {a1} {a2} {a3}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_have_expected_parameters() {
        let g = BodySystem::preset("gravity-demo").unwrap();
        assert_eq!(g.masses(), [1.6, 1.2, 1.0]);
        let a = g.alphas();
        for (x, y) in a.iter().zip([1.2, 1.6, 1.92]) {
            assert!((x - y).abs() < 1e-14);
        }
        assert_eq!(g.gravitational_constant().map(|g| (g - 1.0).abs() < 1e-14), Some(true));
        assert!(BodySystem::preset("helium").unwrap().gravitational_constant().is_none());
        assert!(matches!(BodySystem::preset("lithium"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn parse_round_trips_display() {
        let sys = BodySystem::preset("helium").unwrap();
        let parsed: BodySystem = sys.to_string().parse().unwrap();
        assert_eq!(parsed, sys);

        let text = "# helium\nmasses 1 1 7289.56  # electrons first\n\nalphas 2 2 -1\n";
        assert_eq!(text.parse::<BodySystem>().unwrap(), sys);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = "masses 1 1\nalphas 1 1 1".parse::<BodySystem>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = "masses 1 1 1\nalphas 1 x 1".parse::<BodySystem>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = "masses 1 1 1\n".parse::<BodySystem>().unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let err = "masses 1 -1 1\nalphas 1 1 1".parse::<BodySystem>().unwrap_err();
        assert!(matches!(err, Error::InvalidSystem(_)));
    }

    #[test]
    fn permutation_relabels_pairs() {
        let sys = BodySystem::new([1.0, 2.0, 3.0], [10.0, 20.0, 30.0]).unwrap();
        // swap bodies 1 and 3
        let p = sys.permuted([2, 1, 0]);
        assert_eq!(p.masses(), [3.0, 2.0, 1.0]);
        assert_eq!(p.pair_alpha(0, 1), sys.pair_alpha(2, 1));
        assert_eq!(p.pair_alpha(0, 2), sys.pair_alpha(2, 0));
        assert_eq!(p.pair_alpha(1, 2), sys.pair_alpha(1, 0));
    }
}
