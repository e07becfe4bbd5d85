//! Rotation-reduced dynamics in the xxy gauge.
//!
//! With the Jacobi vectors placed as `r1 = (rho1, 0, 0)` and
//! `r2 = (rho2 cos phi, rho2 sin phi, 0)` the reduced Hamiltonian reads
//!
//! ```text
//! H = 1/2 J.M^-1.J + 1/2 g^{mu nu} (p_mu - J.A_mu)(p_nu - J.A_nu) + V(q)
//! ```
//!
//! with `q = (rho1, rho2, phi)`, body-frame angular momentum `J`, metric
//! `g = diag(1, 1, rho1^2 rho2^2 / I)` and gauge potential
//! `A_phi = (0, 0, rho2^2 / I)` (the other components vanish).

use std::io::{self, Write};

use nalgebra::{Matrix3, Vector3};

use crate::coords::{w_from_jacobi, DragtCoords, JacobiFrame, JacobiShapeCoords, Shape};
use crate::error::{Error, Result};
use crate::fmt::sig;
use crate::system::BodySystem;

/// Distance (relative in the radii, absolute in `phi`) from the collinear
/// chart boundary below which dynamics refuse to evaluate.
pub const CHART_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct InertiaData {
    /// Inertia tensor in the xxy body frame.
    pub tensor: Matrix3<f64>,
    /// Principal moments, ascending.
    pub principal: [f64; 3],
    /// Moment of inertia `I = rho1^2 + rho2^2`.
    pub moment: f64,
    /// Columns are unit principal axes (xxy frame) matching `principal`.
    pub axes: Matrix3<f64>,
}

impl InertiaData {
    /// Express a principal-frame vector in the xxy frame.
    pub fn to_body(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.axes * v
    }

    /// Express an xxy-frame vector in the principal frame.
    pub fn to_principal(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.axes.transpose() * v
    }
}

pub fn inertia(j: &JacobiShapeCoords) -> InertiaData {
    let JacobiShapeCoords { rho1, rho2, phi } = *j;
    let (s, c) = phi.sin_cos();
    let (r1s, r2s) = (rho1 * rho1, rho2 * rho2);
    let a = r2s * s * s;
    let b = -r2s * s * c;
    let d = r1s + r2s * c * c;
    let moment = r1s + r2s;
    let tensor = Matrix3::new(a, b, 0.0, b, d, 0.0, 0.0, 0.0, moment);

    let w = w_from_jacobi(j);
    let m2 = 0.5 * (moment + w.w1.hypot(w.w2));
    // product of the in-plane moments is the block determinant
    let m1 = if m2 > 0.0 { (rho1 * rho2 * s).powi(2) / m2 } else { 0.0 };

    let theta = 0.5 * (2.0 * b).atan2(a - d);
    let (st, ct) = theta.sin_cos();
    let axes = Matrix3::new(-st, ct, 0.0, ct, st, 0.0, 0.0, 0.0, 1.0);
    InertiaData {
        tensor,
        principal: [m1, m2, moment],
        moment,
        axes,
    }
}

/// Principal moments in Dragt's coordinates, where the tensor is diagonal.
pub fn inertia_dragt(d: &DragtCoords) -> [f64; 3] {
    let half = 0.5 * d.chi;
    [d.omega * half.sin().powi(2), d.omega * half.cos().powi(2), d.omega]
}

#[derive(Debug, Clone, PartialEq)]
pub struct KineticGeometry {
    pub metric: Matrix3<f64>,
    pub metric_inv: Matrix3<f64>,
    /// `gauge[mu]` is the vector `A_mu`.
    pub gauge: [Vector3<f64>; 3],
}

fn check_chart(j: &JacobiShapeCoords) -> Result<()> {
    let moment = j.moment();
    if !(moment > 0.0) {
        return Err(Error::TripleCollision);
    }
    let scale = CHART_TOL * moment.sqrt();
    if j.rho1 <= scale || j.rho2 <= scale || j.phi <= CHART_TOL || std::f64::consts::PI - j.phi <= CHART_TOL {
        return Err(Error::Collinear);
    }
    Ok(())
}

pub fn kinetic_geometry(j: &JacobiShapeCoords) -> Result<KineticGeometry> {
    check_chart(j).map_err(|_| Error::SingularGeometry("collinear configuration"))?;
    let moment = j.moment();
    let g33 = (j.rho1 * j.rho2).powi(2) / moment;
    Ok(KineticGeometry {
        metric: Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, g33)),
        metric_inv: Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 1.0 / g33)),
        gauge: [
            Vector3::zeros(),
            Vector3::zeros(),
            Vector3::new(0.0, 0.0, j.rho2 * j.rho2 / moment),
        ],
    })
}

/// Metric and gauge potential in Dragt's coordinates `(omega, chi, psi)`.
/// Singular at the pole `chi = pi/2` (coordinate singularity of `psi`) and
/// at collinear shapes `chi = 0`.
pub fn kinetic_geometry_dragt(d: &DragtCoords) -> Result<KineticGeometry> {
    if !(d.omega > 0.0) {
        return Err(Error::SingularGeometry("triple collision"));
    }
    if d.chi.cos() <= CHART_TOL {
        return Err(Error::SingularGeometry("pole of Dragt's coordinates"));
    }
    if d.chi <= CHART_TOL {
        return Err(Error::SingularGeometry("collinear configuration"));
    }
    let diag = Vector3::new(1.0 / d.omega, d.omega, d.omega * d.chi.cos().powi(2)) * 0.25;
    Ok(KineticGeometry {
        metric: Matrix3::from_diagonal(&diag),
        metric_inv: Matrix3::from_diagonal(&diag.map(|x| 1.0 / x)),
        gauge: [
            Vector3::zeros(),
            Vector3::zeros(),
            Vector3::new(0.0, 0.0, -0.5 * d.chi.sin()),
        ],
    })
}

/// A point of the reduced phase space: Jacobi coordinates `q`, their
/// conjugate momenta `p` and the body-frame angular momentum `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RovibState {
    pub q: Vector3<f64>,
    pub p: Vector3<f64>,
    pub j: Vector3<f64>,
}

impl RovibState {
    pub fn new(q: Vector3<f64>, p: Vector3<f64>, j: Vector3<f64>) -> Self {
        Self { q, p, j }
    }

    pub fn jacobi(&self) -> JacobiShapeCoords {
        JacobiShapeCoords::new(self.q[0], self.q[1], self.q[2])
    }

    fn axpy(&self, h: f64, d: &Self) -> Self {
        Self::new(self.q + d.q * h, self.p + d.p * h, self.j + d.j * h)
    }

    pub fn as_array(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        out[..3].copy_from_slice(self.q.as_slice());
        out[3..6].copy_from_slice(self.p.as_slice());
        out[6..].copy_from_slice(self.j.as_slice());
        out
    }
}

/// `M^-1` of the (block diagonal) xxy tensor.
pub fn inverse_inertia(j: &JacobiShapeCoords) -> Result<Matrix3<f64>> {
    check_chart(j)?;
    let JacobiShapeCoords { rho1, rho2, phi } = *j;
    let (s, c) = phi.sin_cos();
    let (r1s, r2s) = (rho1 * rho1, rho2 * rho2);
    let det = (rho1 * rho2 * s).powi(2);
    let (a, b, d) = (r2s * s * s, -r2s * s * c, r1s + r2s * c * c);
    Ok(Matrix3::new(
        d / det,
        -b / det,
        0.0,
        -b / det,
        a / det,
        0.0,
        0.0,
        0.0,
        1.0 / (r1s + r2s),
    ))
}

/// `dM/dq_mu` for `q = (rho1, rho2, phi)`.
fn inertia_derivatives(j: &JacobiShapeCoords) -> [Matrix3<f64>; 3] {
    let JacobiShapeCoords { rho1, rho2, phi } = *j;
    let (s, c) = phi.sin_cos();
    let r2s = rho2 * rho2;
    let block = |a: f64, b: f64, d: f64, e: f64| Matrix3::new(a, b, 0.0, b, d, 0.0, 0.0, 0.0, e);
    [
        block(0.0, 0.0, 2.0 * rho1, 2.0 * rho1),
        block(2.0 * rho2 * s * s, -2.0 * rho2 * s * c, 2.0 * rho2 * c * c, 2.0 * rho2),
        block(2.0 * r2s * s * c, -r2s * (2.0 * phi).cos(), -2.0 * r2s * s * c, 0.0),
    ]
}

/// Potential and its gradient with respect to `(rho1, rho2, phi)`.
pub fn potential_jet(system: &BodySystem, j: &JacobiShapeCoords) -> Result<(f64, Vector3<f64>)> {
    let JacobiFrame { mu1, mu2 } = crate::coords::jacobi_frame(system);
    let [m1, _, m3] = system.masses();
    let [a1, a2, a3] = system.alphas();
    let JacobiShapeCoords { rho1, rho2, phi } = *j;
    let (s, c) = phi.sin_cos();
    let k = (mu1 / mu2).sqrt();
    let (c1, c3) = (k / m1, k / m3);

    // (coupling, r^2, d r^2 / dq) for the pairs 1-2, 1-3, 2-3
    let pairs = [
        (
            a3,
            mu1 / (m1 * m1) * rho1 * rho1 + rho2 * rho2 / mu2 - 2.0 * c1 * rho1 * rho2 * c,
            Vector3::new(
                2.0 * mu1 / (m1 * m1) * rho1 - 2.0 * c1 * rho2 * c,
                2.0 * rho2 / mu2 - 2.0 * c1 * rho1 * c,
                2.0 * c1 * rho1 * rho2 * s,
            ),
        ),
        (a2, rho1 * rho1 / mu1, Vector3::new(2.0 * rho1 / mu1, 0.0, 0.0)),
        (
            a1,
            mu1 / (m3 * m3) * rho1 * rho1 + rho2 * rho2 / mu2 + 2.0 * c3 * rho1 * rho2 * c,
            Vector3::new(
                2.0 * mu1 / (m3 * m3) * rho1 + 2.0 * c3 * rho2 * c,
                2.0 * rho2 / mu2 + 2.0 * c3 * rho1 * c,
                -2.0 * c3 * rho1 * rho2 * s,
            ),
        ),
    ];
    let mut v = 0.0;
    let mut grad = Vector3::zeros();
    for (alpha, r_sq, d_r_sq) in pairs {
        if alpha == 0.0 {
            continue;
        }
        if !(r_sq > 0.0) {
            return Err(Error::SingularGeometry("two-body collision"));
        }
        let r = r_sq.sqrt();
        v -= alpha / r;
        grad += d_r_sq * (alpha / (2.0 * r * r_sq));
    }
    Ok((v, grad))
}

/// Partial derivatives of the reduced Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianGradient {
    pub dq: Vector3<f64>,
    pub dp: Vector3<f64>,
    pub dj: Vector3<f64>,
}

struct Evaluation {
    energy: f64,
    potential: f64,
    grad: HamiltonianGradient,
}

fn evaluate(system: &BodySystem, s: &RovibState) -> Result<Evaluation> {
    let q = s.jacobi();
    let minv = inverse_inertia(&q)?;
    let JacobiShapeCoords { rho1, rho2, .. } = q;
    let moment = q.moment();
    let omega = minv * s.j;
    let rot = 0.5 * s.j.dot(&omega);

    // vibrational part: g^33 = G, A_phi,3 = a
    let g = 1.0 / (rho1 * rho1) + 1.0 / (rho2 * rho2);
    let a = rho2 * rho2 / moment;
    let u = s.p[2] - s.j[2] * a;
    let kin = 0.5 * (s.p[0] * s.p[0] + s.p[1] * s.p[1]) + 0.5 * g * u * u;

    let (v, dv) = potential_jet(system, &q)?;
    let dm = inertia_derivatives(&q);
    let d_rot = Vector3::from_fn(|k, _| -0.5 * omega.dot(&(dm[k] * omega)));
    let dg = Vector3::new(-2.0 / rho1.powi(3), -2.0 / rho2.powi(3), 0.0);
    let m2 = moment * moment;
    let da = Vector3::new(-2.0 * rho1 * rho2 * rho2 / m2, 2.0 * rho2 * rho1 * rho1 / m2, 0.0);
    let d_kin = dg * (0.5 * u * u) - da * (g * u * s.j[2]);

    Ok(Evaluation {
        energy: rot + kin + v,
        potential: v,
        grad: HamiltonianGradient {
            dq: d_rot + dv + d_kin,
            dp: Vector3::new(s.p[0], s.p[1], g * u),
            dj: omega - Vector3::z() * (a * g * u),
        },
    })
}

pub fn hamiltonian(system: &BodySystem, s: &RovibState) -> Result<f64> {
    evaluate(system, s).map(|e| e.energy)
}

/// Potential energy of the state's configuration.
pub fn state_potential(system: &BodySystem, s: &RovibState) -> Result<f64> {
    evaluate(system, s).map(|e| e.potential)
}

pub fn hamiltonian_gradient(system: &BodySystem, s: &RovibState) -> Result<HamiltonianGradient> {
    evaluate(system, s).map(|e| e.grad)
}

/// Time derivative of the state: `q' = dH/dp`, `p' = -dH/dq`, `J' = J x dH/dJ`.
pub fn eom(system: &BodySystem, s: &RovibState) -> Result<RovibState> {
    let g = hamiltonian_gradient(system, s)?;
    Ok(RovibState::new(g.dp, -g.dq, s.j.cross(&g.dj)))
}

/// Residuals of the relative-equilibrium conditions: `J x M^-1 J` and
/// `d/dq (1/2 J.M^-1.J + V)`.
pub fn relequil_residual(
    system: &BodySystem,
    q: &JacobiShapeCoords,
    j: &Vector3<f64>,
) -> Result<(Vector3<f64>, Vector3<f64>)> {
    let minv = inverse_inertia(q)?;
    let omega = minv * j;
    let dm = inertia_derivatives(q);
    let d_rot = Vector3::from_fn(|k, _| -0.5 * omega.dot(&(dm[k] * omega)));
    let (_, dv) = potential_jet(system, q)?;
    Ok((j.cross(&omega), d_rot + dv))
}

/// The state rotating rigidly about principal axis `axis` (1-based) with
/// `|J| = r`, at the dilation of `shape` for which `r^2 = -M_k V`.
/// This is a relative equilibrium exactly when `shape` is a critical point
/// of `sqrt(M~_k) V~`.
pub fn rigid_rotation_state(system: &BodySystem, shape: &Shape, axis: usize, r: f64) -> Result<RovibState> {
    if !(1..=3).contains(&axis) {
        return Err(Error::Precondition(format!("axis must be 1, 2 or 3, got {axis}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Precondition(format!("r must be positive, got {r}")));
    }
    let unit = shape.to_jacobi();
    let (v_tilde, _) = potential_jet(system, &unit)?;
    let data = inertia(&unit);
    let m_tilde = data.principal[axis - 1];
    if !(v_tilde < 0.0) {
        return Err(Error::Precondition(
            "no rigid rotation where the potential is non-negative".into(),
        ));
    }
    let lambda = r * r / (-m_tilde * v_tilde);
    let q = unit.dilated(lambda);
    let jv = data.axes.column(axis - 1) * r;
    let p3 = jv[2] * q.rho2 * q.rho2 / q.moment();
    Ok(RovibState::new(
        Vector3::new(q.rho1, q.rho2, q.phi),
        Vector3::new(0.0, 0.0, p3),
        jv,
    ))
}

/// Scale-free size of the relative-equilibrium residuals at a state:
/// `|J x Omega| / (|J| |Omega|)` and `|d(R + V)/dq| sqrt(I) / |V|`, maximum of the two.
pub fn relequil_defect(system: &BodySystem, s: &RovibState) -> Result<f64> {
    let q = s.jacobi();
    let (res1, res3) = relequil_residual(system, &q, &s.j)?;
    let omega = inverse_inertia(&q)? * s.j;
    let (v, _) = potential_jet(system, &q)?;
    let rot = if s.j.norm() > 0.0 {
        res1.norm() / (s.j.norm() * omega.norm())
    } else {
        0.0
    };
    Ok(rot.max(res3.norm() * q.moment().sqrt() / v.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: RovibState,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservationReport {
    pub max_energy_drift: f64,
    pub max_momentum_drift: f64,
    pub steps_completed: usize,
    /// Set when the run stopped early at the chart boundary.
    pub truncated: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Integration {
    pub trajectory: Vec<Sample>,
    pub report: ConservationReport,
}

/// Fixed-step classical Runge-Kutta integration of [`eom`].
pub fn integrate(system: &BodySystem, s0: &RovibState, dt: f64, nsteps: usize) -> Result<Integration> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Precondition(format!("dt must be positive, got {dt}")));
    }
    let e0 = hamiltonian(system, s0)?;
    let r0 = s0.j.norm();
    let mut trajectory = Vec::with_capacity(nsteps + 1);
    trajectory.push(Sample {
        t: 0.0,
        state: *s0,
        energy: e0,
    });
    let mut report = ConservationReport {
        max_energy_drift: 0.0,
        max_momentum_drift: 0.0,
        steps_completed: 0,
        truncated: None,
    };
    let mut s = *s0;
    for step in 1..=nsteps {
        let next = rk4_step(system, &s, dt).and_then(|n| hamiltonian(system, &n).map(|e| (n, e)));
        let (next, energy) = match next {
            Ok(v) => v,
            Err(e) => {
                report.truncated = Some(format!("stopped at step {step}: {e}"));
                break;
            }
        };
        s = next;
        report.steps_completed = step;
        report.max_energy_drift = report.max_energy_drift.max((energy - e0).abs());
        report.max_momentum_drift = report.max_momentum_drift.max((s.j.norm() - r0).abs());
        trajectory.push(Sample {
            t: step as f64 * dt,
            state: s,
            energy,
        });
    }
    Ok(Integration { trajectory, report })
}

fn rk4_step(system: &BodySystem, s: &RovibState, h: f64) -> Result<RovibState> {
    let k1 = eom(system, s)?;
    let k2 = eom(system, &s.axpy(0.5 * h, &k1))?;
    let k3 = eom(system, &s.axpy(0.5 * h, &k2))?;
    let k4 = eom(system, &s.axpy(h, &k3))?;
    Ok(RovibState::new(
        s.q + (k1.q + (k2.q + k3.q) * 2.0 + k4.q) * (h / 6.0),
        s.p + (k1.p + (k2.p + k3.p) * 2.0 + k4.p) * (h / 6.0),
        s.j + (k1.j + (k2.j + k3.j) * 2.0 + k4.j) * (h / 6.0),
    ))
}

pub const TRAJECTORY_HEADER: &str = "t,q1,q2,q3,p1,p2,p3,J1,J2,J3,H";

pub fn write_trajectory_csv<W: Write>(mut out: W, trajectory: &[Sample]) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for sample in trajectory {
        let mut row = vec![sig(sample.t, 17)];
        row.extend(sample.state.as_array().iter().map(|x| sig(*x, 17)));
        row.push(sig(sample.energy, 17));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
