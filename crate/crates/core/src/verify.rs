//! Relative-equilibrium initial conditions and the end-to-end check suite.

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::Vector3;

use crate::coords::{collision_angles, distances_from_dragt, DragtCoords};
use crate::critical::{critical_catalog, find_critical_shapes, CatalogEntry, CriticalValue, Family};
use crate::error::{Error, Result};
use crate::fmt::sig;
use crate::reduction::{
    hamiltonian, hamiltonian_gradient, integrate, relequil_defect, rigid_rotation_state, state_potential, RovibState,
};
use crate::system::{BodySystem, PRESETS};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub tol: f64,
}

impl Check {
    /// Passes when `measured <= tol` (NaN fails).
    pub fn at_most(name: impl Into<String>, measured: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            pass: measured <= tol,
            measured,
            tol,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CHECK {} {} measured={} tol={}",
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            sig(self.measured, 6),
            sig(self.tol, 6)
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Relative-equilibrium state for a catalog entry with an interior shape,
/// rotating about the entry's axis with `|J| = r`.
pub fn build_relequil_state(system: &BodySystem, critical: &CriticalValue, r: f64) -> Result<RovibState> {
    let no_shape = || Error::Precondition(format!("{} entries carry no interior shape", critical.family));
    let shape = critical.shape().ok_or_else(no_shape)?;
    let axis = critical.axis.ok_or_else(no_shape)?;
    rigid_rotation_state(system, &shape, axis, r)
}

/// Rotation period `2 pi r / |V|` of a relative equilibrium.
pub fn characteristic_period(system: &BodySystem, s: &RovibState) -> Result<f64> {
    Ok(TAU * s.j.norm() / state_potential(system, s)?.abs())
}

/// Reference critical values of the presets.
pub fn reference_values(name: &str) -> Option<&'static [f64]> {
    match name {
        "gravity-demo" => Some(&[
            0.0,
            0.3927272727,
            0.7876923077,
            1.263908571,
            6.961348535,
            13.83605894,
            18.56904438,
            19.12865697,
            19.44296212,
        ]),
        "helium" => Some(&[0.0, 1.999725672, 5.420669550, 6.748148600, 12.25]),
        "eep" => Some(&[0.0, 0.25, 0.2925594730, 2.25]),
        _ => None,
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn catalog_checks(system: &BodySystem, catalog: &[CatalogEntry], checks: &mut Vec<Check>) {
    let Some(name) = PRESETS.iter().find(|n| BodySystem::preset(n).ok() == Some(*system)) else {
        return;
    };
    let reference = reference_values(name).expect("presets have references");
    checks.push(Check::at_most(
        "catalog_size",
        (catalog.len() as f64 - reference.len() as f64).abs(),
        0.0,
    ));
    let (mut closed, mut collinear) = (0.0f64, 0.0f64);
    for (entry, want) in catalog.iter().zip(reference) {
        let err = rel_err(entry.nu, *want);
        if entry.has_family(Family::Collinear) {
            collinear = collinear.max(err);
        } else {
            closed = closed.max(err);
        }
    }
    checks.push(Check::at_most("catalog_closed_forms", closed, 1e-9));
    checks.push(Check::at_most("catalog_collinear", collinear, 1e-6));
}

fn flattened_nus(catalog: &[CatalogEntry]) -> Vec<f64> {
    catalog.iter().flat_map(|e| e.members.iter().map(|m| m.nu)).collect()
}

fn fd_gradient_error(system: &BodySystem, s: &RovibState) -> Result<f64> {
    let g = hamiltonian_gradient(system, s)?;
    let analytic = [g.dq, g.dp, g.dj];
    let mut worst = 0.0f64;
    for (block, exact) in analytic.iter().enumerate() {
        for k in 0..3 {
            let mut x = s.as_array();
            let idx = 3 * block + k;
            let h = 1e-6 * x[idx].abs().max(1.0);
            let at = |x: [f64; 9]| {
                let st = RovibState::new(
                    Vector3::new(x[0], x[1], x[2]),
                    Vector3::new(x[3], x[4], x[5]),
                    Vector3::new(x[6], x[7], x[8]),
                );
                hamiltonian(system, &st)
            };
            x[idx] += h;
            let plus = at(x)?;
            x[idx] -= 2.0 * h;
            let minus = at(x)?;
            let fd = (plus - minus) / (2.0 * h);
            let scale = exact.norm().max(1e-3 * hamiltonian(system, s)?.abs()).max(1e-12);
            worst = worst.max((fd - exact[k]).abs() / scale);
        }
    }
    Ok(worst)
}

fn relequil_checks(system: &BodySystem, value: &CriticalValue, checks: &mut Vec<Check>) {
    let family = value.family.name();
    let axis = value.axis.unwrap_or(3);
    let found = find_critical_shapes(system, axis).unwrap_or_default();
    let search = found
        .iter()
        .map(|(_, nu)| rel_err(*nu, value.nu))
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::at_most(format!("{family}_search_axis{axis}"), search, 1e-6));

    let r = 1.0;
    let state = match build_relequil_state(system, value, r) {
        Ok(s) => s,
        Err(_) => {
            checks.push(Check::at_most(format!("{family}_state"), f64::NAN, 0.0));
            return;
        }
    };
    let defect = relequil_defect(system, &state).unwrap_or(f64::NAN);
    checks.push(Check::at_most(format!("{family}_residual"), defect, 1e-8));

    let energy = hamiltonian(system, &state).unwrap_or(f64::NAN);
    let v = state_potential(system, &state).unwrap_or(f64::NAN);
    checks.push(Check::at_most(
        format!("{family}_virial"),
        rel_err(energy, 0.5 * v),
        1e-10,
    ));
    checks.push(Check::at_most(
        format!("{family}_nu_from_state"),
        rel_err(-energy * r * r, value.nu),
        1e-9,
    ));

    let period = characteristic_period(system, &state).unwrap_or(f64::NAN);
    match integrate(system, &state, 1e-3 * period, 10_000) {
        Ok(run) => {
            let start = state.as_array();
            let scale = start[..6].iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
            let drift = run
                .trajectory
                .iter()
                .map(|s| {
                    let x = s.state.as_array();
                    (0..6).map(|k| (x[k] - start[k]).powi(2)).sum::<f64>().sqrt() / scale
                })
                .fold(0.0, f64::max);
            let steps = if run.report.truncated.is_some() {
                f64::NAN
            } else {
                drift
            };
            checks.push(Check::at_most(format!("{family}_drift_qp"), steps, 1e-6));
            checks.push(Check::at_most(
                format!("{family}_energy_drift"),
                run.report.max_energy_drift / energy.abs(),
                1e-8,
            ));
            checks.push(Check::at_most(
                format!("{family}_momentum_drift"),
                run.report.max_momentum_drift,
                1e-10,
            ));
        }
        Err(_) => checks.push(Check::at_most(format!("{family}_integration"), f64::NAN, 0.0)),
    }
}

/// Run the check suite for one system.
pub fn verify_all(system: &BodySystem) -> VerificationReport {
    let mut checks = Vec::new();
    let catalog = critical_catalog(system);
    catalog_checks(system, &catalog, &mut checks);

    let identity = catalog
        .iter()
        .flat_map(|e| &e.members)
        .filter_map(|m| m.nu_from_point(system).map(|nu| rel_err(nu, m.nu)))
        .fold(0.0, f64::max);
    checks.push(Check::at_most("catalog_nu_identity", identity, 1e-9));

    let base = flattened_nus(&catalog);
    let mut perm_err = 0.0f64;
    for perm in [[0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        let other = flattened_nus(&critical_catalog(&system.permuted(perm)));
        perm_err = if other.len() != base.len() {
            f64::INFINITY
        } else {
            base.iter()
                .zip(&other)
                .map(|(a, b)| rel_err(*a, *b))
                .fold(perm_err, f64::max)
        };
    }
    checks.push(Check::at_most("permutation_invariance", perm_err, 1e-9));

    let angles = collision_angles(system);
    let at = |psi: f64| distances_from_dragt(system, &DragtCoords::new(1.0, 0.0, psi));
    let collision = [
        at(angles.psi12).map(|d| d.r12),
        at(angles.psi13).map(|d| d.r13),
        at(angles.psi23).map(|d| d.r23),
    ]
    .into_iter()
    .map(|r| r.unwrap_or(f64::NAN))
    .fold(0.0, f64::max);
    checks.push(Check::at_most("collision_angles", collision, 1e-10));

    let states = [
        RovibState::new(
            Vector3::new(0.8, 1.1, 1.2),
            Vector3::new(0.1, -0.3, 0.2),
            Vector3::new(0.5, -0.2, 0.9),
        ),
        RovibState::new(
            Vector3::new(1.4, 0.6, 2.3),
            Vector3::new(-0.2, 0.4, -0.1),
            Vector3::new(-1.0, 0.3, 0.2),
        ),
        RovibState::new(
            Vector3::new(0.5, 0.9, 0.7),
            Vector3::new(0.0, 0.0, 0.3),
            Vector3::new(0.0, 0.7, -0.4),
        ),
    ];
    let fd = states
        .iter()
        .map(|s| fd_gradient_error(system, s).unwrap_or(f64::NAN))
        .fold(0.0, f64::max);
    checks.push(Check::at_most("eom_finite_differences", fd, 1e-6));

    for value in catalog.iter().flat_map(|e| &e.members) {
        if matches!(value.family, Family::Lagrange | Family::Langmuir) {
            relequil_checks(system, value, &mut checks);
        }
    }
    VerificationReport { checks }
}
