//! Coordinate systems on the translation-reduced configuration space.
//!
//! Internal configurations are described by mass-weighted Jacobi vectors
//! `s1 = sqrt(mu1) (x1 - x3)` and `s2 = sqrt(mu2) (x2 - c13)`, where `c13`
//! is the centre of mass of bodies 1 and 3. From these we derive
//!
//! * Jacobi coordinates `(rho1, rho2, phi)`,
//! * the parabolic `w` coordinates `(rho1^2 - rho2^2, 2 rho1 rho2 cos phi, 2 rho1 rho2 sin phi)`,
//! * Dragt's spherical coordinates `(omega, chi, psi)` on `w` space,
//!   with `chi` the latitude,
//! * inter-particle distances.
//!
//! The shape space is the open upper unit hemisphere in `w` space,
//! represented by its projection to the open unit disk.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::system::BodySystem;

/// Tolerance for clamping slightly negative radicands in the distance formulas.
const RADICAND_TOL: f64 = 1e-12;

/// Relative `w3 / omega` below which a configuration is treated as collinear.
pub const COLLINEAR_TOL: f64 = 1e-12;

/// A value produced by a chart that is singular somewhere. `degenerate` marks
/// points where an angle is undefined and was set to zero by convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flagged<T> {
    pub value: T,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiFrame {
    pub mu1: f64,
    pub mu2: f64,
}

pub fn jacobi_frame(system: &BodySystem) -> JacobiFrame {
    let [m1, m2, m3] = system.masses();
    JacobiFrame {
        mu1: m1 * m3 / (m1 + m3),
        mu2: m2 * (m1 + m3) / (m1 + m2 + m3),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiShapeCoords {
    pub rho1: f64,
    pub rho2: f64,
    pub phi: f64,
}

impl JacobiShapeCoords {
    pub fn new(rho1: f64, rho2: f64, phi: f64) -> Self {
        Self { rho1, rho2, phi }
    }

    /// Moment of inertia `I = rho1^2 + rho2^2`.
    pub fn moment(&self) -> f64 {
        self.rho1 * self.rho1 + self.rho2 * self.rho2
    }

    /// The dilation `d_lambda`.
    pub fn dilated(&self, lambda: f64) -> Self {
        Self::new(lambda * self.rho1, lambda * self.rho2, self.phi)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.rho1, self.rho2, self.phi]
    }

    /// True within `tol` of the collinear chart boundary (`phi` in {0, pi}
    /// or a vanishing Jacobi vector).
    pub fn is_collinear(&self, tol: f64) -> bool {
        self.rho1 <= tol || self.rho2 <= tol || self.phi <= tol || PI - self.phi <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WCoords {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

impl WCoords {
    pub fn new(w1: f64, w2: f64, w3: f64) -> Self {
        Self { w1, w2, w3 }
    }

    pub fn norm(&self) -> f64 {
        (self.w1 * self.w1 + self.w2 * self.w2 + self.w3 * self.w3).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DragtCoords {
    pub omega: f64,
    pub chi: f64,
    pub psi: f64,
}

impl DragtCoords {
    pub fn new(omega: f64, chi: f64, psi: f64) -> Self {
        Self {
            omega,
            chi,
            psi: psi.rem_euclid(TAU),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distances {
    pub r12: f64,
    pub r13: f64,
    pub r23: f64,
}

impl Distances {
    /// Distance between bodies `i` and `j` (0-based).
    pub fn pair(&self, i: usize, j: usize) -> f64 {
        match (i.min(j), i.max(j)) {
            (0, 1) => self.r12,
            (0, 2) => self.r13,
            (1, 2) => self.r23,
            _ => panic!("invalid body pair ({i}, {j})"),
        }
    }

    /// Largest violation of the triangle inequalities (zero when all hold).
    pub fn triangle_defect(&self) -> f64 {
        let Self { r12, r13, r23 } = *self;
        [r23 - r12 - r13, r13 - r12 - r23, r12 - r13 - r23]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// A point of the shape space: a non-collinear configuration with unit
/// moment of inertia, stored as its projection to the `(w1, w2)` disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shape {
    w1: f64,
    w2: f64,
}

impl Shape {
    pub fn new(w1: f64, w2: f64) -> Result<Self> {
        if w1.is_finite() && w2.is_finite() && w1 * w1 + w2 * w2 < 1.0 {
            Ok(Self { w1, w2 })
        } else {
            Err(Error::OutsideShapeSpace { w1, w2 })
        }
    }

    /// The diabolic shape at the centre of the disk.
    pub fn diabolic() -> Self {
        Self { w1: 0.0, w2: 0.0 }
    }

    pub fn from_dragt_angles(chi: f64, psi: f64) -> Result<Self> {
        Self::new(chi.cos() * psi.cos(), chi.cos() * psi.sin())
    }

    pub fn w1(&self) -> f64 {
        self.w1
    }

    pub fn w2(&self) -> f64 {
        self.w2
    }

    pub fn w3(&self) -> f64 {
        (1.0 - self.w1 * self.w1 - self.w2 * self.w2).max(0.0).sqrt()
    }

    /// Distance from the centre of the disk, `cos chi`.
    pub fn radius(&self) -> f64 {
        self.w1.hypot(self.w2)
    }

    pub fn to_w(&self) -> WCoords {
        WCoords::new(self.w1, self.w2, self.w3())
    }

    pub fn to_jacobi(&self) -> JacobiShapeCoords {
        jacobi_from_w(&self.to_w()).value
    }

    pub fn to_dragt(&self) -> DragtCoords {
        dragt_from_w(&self.to_w()).value
    }

    /// The internal configuration `d_lambda(q~)`.
    pub fn dilated(&self, lambda: f64) -> JacobiShapeCoords {
        self.to_jacobi().dilated(lambda)
    }
}

pub fn w_from_jacobi(j: &JacobiShapeCoords) -> WCoords {
    let JacobiShapeCoords { rho1, rho2, phi } = *j;
    let cross = 2.0 * rho1 * rho2;
    WCoords::new(rho1 * rho1 - rho2 * rho2, cross * phi.cos(), cross * phi.sin())
}

/// Inverse of [`w_from_jacobi`]. On the `w1` axis (`rho1 = 0` or `rho2 = 0`)
/// the angle is undefined; `phi = 0` is returned and the result flagged.
pub fn jacobi_from_w(w: &WCoords) -> Flagged<JacobiShapeCoords> {
    let omega = w.norm();
    let h = w.w2.hypot(w.w3);
    // take the well-conditioned root first, the other from 2 rho1 rho2 = h
    let (rho1, rho2) = if w.w1 >= 0.0 {
        let rho1 = (0.5 * (omega + w.w1)).sqrt();
        let rho2 = if rho1 > 0.0 { h / (2.0 * rho1) } else { 0.0 };
        (rho1, rho2)
    } else {
        let rho2 = (0.5 * (omega - w.w1)).sqrt();
        (h / (2.0 * rho2), rho2)
    };
    let degenerate = h == 0.0;
    let phi = if degenerate { 0.0 } else { w.w3.atan2(w.w2) };
    Flagged {
        value: JacobiShapeCoords::new(rho1, rho2, phi),
        degenerate,
    }
}

/// Dragt's coordinates. At the pole (`w1 = w2 = 0`) `psi` is undefined; it is
/// set to zero and the result flagged.
pub fn dragt_from_w(w: &WCoords) -> Flagged<DragtCoords> {
    let planar = w.w1.hypot(w.w2);
    let degenerate = planar == 0.0;
    let psi = if degenerate { 0.0 } else { w.w2.atan2(w.w1) };
    Flagged {
        value: DragtCoords::new(w.norm(), w.w3.atan2(planar), psi),
        degenerate,
    }
}

pub fn w_from_dragt(d: &DragtCoords) -> WCoords {
    let (sc, cc) = d.chi.sin_cos();
    let (sp, cp) = d.psi.sin_cos();
    WCoords::new(d.omega * cc * cp, d.omega * cc * sp, d.omega * sc)
}

/// Inter-particle distances from the Jacobi vectors in the xxy gauge:
/// `x1 - x2 = sqrt(mu1)/m1 s1 - s2/sqrt(mu2)`, `x1 - x3 = s1/sqrt(mu1)` and
/// `x2 - x3 = s2/sqrt(mu2) + sqrt(mu1)/m3 s1`. Each distance is the norm of
/// a planar vector, so it stays accurate near collisions.
pub fn distances_from_jacobi(system: &BodySystem, j: &JacobiShapeCoords) -> Result<Distances> {
    if !(j.rho1.is_finite() && j.rho2.is_finite() && j.phi.is_finite()) {
        return Err(Error::Consistency(format!("non-finite coordinates {j:?}")));
    }
    let JacobiFrame { mu1, mu2 } = jacobi_frame(system);
    let [m1, _, m3] = system.masses();
    let (s, c) = j.phi.sin_cos();
    let (x2, y2) = (j.rho2 * c / mu2.sqrt(), j.rho2 * s / mu2.sqrt());
    let k = mu1.sqrt() * j.rho1;
    Ok(Distances {
        r12: (k / m1 - x2).hypot(y2),
        r13: j.rho1 / mu1.sqrt(),
        r23: (k / m3 + x2).hypot(y2),
    })
}

pub fn distances_from_w(system: &BodySystem, w: &WCoords) -> Result<Distances> {
    distances_from_jacobi(system, &jacobi_from_w(w).value)
}

pub fn distances_from_dragt(system: &BodySystem, d: &DragtCoords) -> Result<Distances> {
    distances_from_w(system, &w_from_dragt(d))
}

/// Distances at a point `(w1, w2)` of the closed unit disk (unit moment of
/// inertia). Unlike [`Shape`] this accepts collinear boundary points.
pub fn distances_on_disk(system: &BodySystem, w1: f64, w2: f64) -> Result<Distances> {
    let w3 = (1.0 - w1 * w1 - w2 * w2).max(0.0).sqrt();
    distances_from_w(system, &WCoords::new(w1, w2, w3))
}

/// Polar angles (radians, in `(-pi, pi]`) of the three double collisions on
/// the boundary circle of the shape disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionAngles {
    pub psi12: f64,
    pub psi23: f64,
    pub psi13: f64,
}

pub fn collision_angles(system: &BodySystem) -> CollisionAngles {
    let [m1, m2, m3] = system.masses();
    let total = m1 + m2 + m3;
    // rho2 / rho1 on the collinear ray where the pair collides
    let k12 = (m2 * m3 / (m1 * total)).sqrt();
    let k23 = (m1 * m2 / (m3 * total)).sqrt();
    CollisionAngles {
        psi12: (2.0 * k12).atan2(1.0 - k12 * k12),
        psi23: (-2.0 * k23).atan2(1.0 - k23 * k23),
        psi13: PI,
    }
}

/// Scale a configuration to unit moment of inertia. Returns the shape and
/// the applied factor `lambda = 1 / sqrt(I)`.
pub fn normalize_shape(j: &JacobiShapeCoords) -> Result<(Shape, f64)> {
    let omega = j.moment();
    if !(omega > 0.0) {
        return Err(Error::TripleCollision);
    }
    let w = w_from_jacobi(j);
    if !(w.w3 > COLLINEAR_TOL * omega) {
        return Err(Error::Collinear);
    }
    let lambda = omega.sqrt().recip();
    let shape = Shape::new(w.w1 / omega, w.w2 / omega).map_err(|_| Error::Collinear)?;
    Ok((shape, lambda))
}

/// The xxy-gauge section: body-frame Jacobi vectors with `r1` on the x axis
/// and `r2` in the xy plane.
pub fn xxy_section(j: &JacobiShapeCoords) -> (Vector3<f64>, Vector3<f64>) {
    let (s, c) = j.phi.sin_cos();
    (
        Vector3::new(j.rho1, 0.0, 0.0),
        Vector3::new(j.rho2 * c, j.rho2 * s, 0.0),
    )
}

/// Body positions (centre-of-mass frame, xxy gauge) of an internal configuration.
pub fn positions_from_jacobi(system: &BodySystem, j: &JacobiShapeCoords) -> [Vector3<f64>; 3] {
    let JacobiFrame { mu1, mu2 } = jacobi_frame(system);
    let [m1, m2, m3] = system.masses();
    let total = m1 + m2 + m3;
    let (r1, r2) = xxy_section(j);
    let d13 = r1 / mu1.sqrt();
    let d2 = r2 / mu2.sqrt();
    let c13 = -d2 * (m2 / total);
    [c13 + d13 * (m3 / (m1 + m3)), c13 + d2, c13 - d13 * (m1 / (m1 + m3))]
}

/// Jacobi coordinates of three body positions (any frame).
pub fn jacobi_from_positions(system: &BodySystem, x: &[Vector3<f64>; 3]) -> JacobiShapeCoords {
    let JacobiFrame { mu1, mu2 } = jacobi_frame(system);
    let [m1, _, m3] = system.masses();
    let c13 = (x[0] * m1 + x[2] * m3) / (m1 + m3);
    let s1 = (x[0] - x[2]) * mu1.sqrt();
    let s2 = (x[1] - c13) * mu2.sqrt();
    JacobiShapeCoords::new(s1.norm(), s2.norm(), s1.cross(&s2).norm().atan2(s1.dot(&s2)))
}

/// Planar positions (body order 1, 2, 3) of a triangle with the given side
/// lengths: body 1 at the origin, body 3 on the positive x axis, body 2 in
/// the upper half plane.
pub fn triangle_positions(d: &Distances) -> Result<[Vector3<f64>; 3]> {
    let Distances { r12, r13, r23 } = *d;
    if !(r13 > 0.0) {
        return Err(Error::Precondition("r13 must be positive".into()));
    }
    let x = (r12 * r12 - r23 * r23 + r13 * r13) / (2.0 * r13);
    let y_sq = r12 * r12 - x * x;
    if y_sq < -RADICAND_TOL * r12 * r12 {
        return Err(Error::Precondition(format!(
            "side lengths ({r12}, {r13}, {r23}) violate the triangle inequality"
        )));
    }
    Ok([
        Vector3::zeros(),
        Vector3::new(x, y_sq.max(0.0).sqrt(), 0.0),
        Vector3::new(r13, 0.0, 0.0),
    ])
}

/// The shape of a non-degenerate triangle with the given side lengths.
pub fn shape_from_distances(system: &BodySystem, d: &Distances) -> Result<Shape> {
    let x = triangle_positions(d)?;
    normalize_shape(&jacobi_from_positions(system, &x)).map(|(shape, _)| shape)
}

/// Point of the closed disk for a triangle, possibly degenerate (collinear).
pub fn disk_point_from_distances(system: &BodySystem, d: &Distances) -> Result<(f64, f64)> {
    let j = jacobi_from_positions(system, &triangle_positions(d)?);
    let omega = j.moment();
    if !(omega > 0.0) {
        return Err(Error::TripleCollision);
    }
    let w = w_from_jacobi(&j);
    Ok((w.w1 / omega, w.w2 / omega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn helium() -> BodySystem {
        BodySystem::preset("helium").unwrap()
    }

    #[test]
    fn reduced_masses() {
        let f = jacobi_frame(&BodySystem::preset("eep").unwrap());
        assert_relative_eq!(f.mu1, 0.5);
        assert_relative_eq!(f.mu2, 2.0 / 3.0);
        assert_relative_eq!(jacobi_frame(&helium()).mu1, 7289.56 / 7290.56, max_relative = 1e-15);
        let g = jacobi_frame(&BodySystem::preset("gravity-demo").unwrap());
        assert_relative_eq!(g.mu1, 1.6 / 2.6, max_relative = 1e-15);
    }

    #[test]
    fn w_examples() {
        let w = w_from_jacobi(&JacobiShapeCoords::new(1.0, 1.0, FRAC_PI_2));
        assert!(w.w1.abs() < 1e-15 && w.w2.abs() < 1e-15);
        assert_relative_eq!(w.w3, 2.0);
        assert_eq!(
            w_from_jacobi(&JacobiShapeCoords::new(1.0, 0.0, 1.3)),
            WCoords::new(1.0, 0.0, 0.0)
        );
        assert_eq!(
            w_from_jacobi(&JacobiShapeCoords::new(1.0, 1.0, 0.0)),
            WCoords::new(0.0, 2.0, 0.0)
        );

        let j = jacobi_from_w(&WCoords::new(0.0, 0.0, 2.0));
        assert!(!j.degenerate);
        assert_relative_eq!(j.value.rho1, 1.0);
        assert_relative_eq!(j.value.rho2, 1.0);
        assert_relative_eq!(j.value.phi, FRAC_PI_2);

        let j = jacobi_from_w(&WCoords::new(1.0, 0.0, 0.0));
        assert!(j.degenerate);
        assert_eq!(j.value, JacobiShapeCoords::new(1.0, 0.0, 0.0));

        let j = jacobi_from_w(&WCoords::new(-2.0, 0.0, 0.0));
        assert!(j.degenerate);
        assert_eq!((j.value.rho1, j.value.phi), (0.0, 0.0));
        assert_relative_eq!(j.value.rho2, 2f64.sqrt());
    }

    #[test]
    fn dragt_examples() {
        let d = dragt_from_w(&WCoords::new(0.0, 0.0, 2.0));
        assert!(d.degenerate);
        assert_eq!(d.value, DragtCoords::new(2.0, FRAC_PI_2, 0.0));
        let d = dragt_from_w(&WCoords::new(1.0, 0.0, 0.0));
        assert!(!d.degenerate);
        assert_eq!(d.value, DragtCoords::new(1.0, 0.0, 0.0));
        let d = dragt_from_w(&WCoords::new(0.0, -1.0, 0.0)).value;
        assert_relative_eq!(d.omega, 1.0);
        assert_eq!(d.chi, 0.0);
        assert_relative_eq!(d.psi, 1.5 * PI);
    }

    #[test]
    fn dragt_psi_is_normalised() {
        let d = DragtCoords::new(1.0, 0.2, -0.5);
        assert_relative_eq!(d.psi, TAU - 0.5);
        let d = dragt_from_w(&WCoords::new(-1.0, -1e-9, 0.0)).value;
        assert!(d.psi >= 0.0 && d.psi < TAU);
    }

    #[test]
    fn helium_diabolic_distances() {
        let d = distances_from_dragt(&helium(), &DragtCoords::new(1.0, FRAC_PI_2, 0.0)).unwrap();
        // closed form at perpendicular equal-length Jacobi vectors, rho = 1/sqrt(2)
        let rho = 0.5f64.sqrt();
        let closed = |mi: f64, mj: f64| ((mi + mj) / (mi * mj)).sqrt() * rho;
        assert_relative_eq!(d.r12, closed(1.0, 1.0), max_relative = 1e-12);
        assert_relative_eq!(d.r13, closed(1.0, 7289.56), max_relative = 1e-12);
        assert_relative_eq!(d.r23, closed(1.0, 7289.56), max_relative = 1e-12);
        assert_relative_eq!(d.r12, 1.0, max_relative = 1e-12);
        assert!((d.r13 - 0.70715).abs() < 1e-5);
    }

    #[test]
    fn equal_masses_pole_is_equilateral() {
        let sys = BodySystem::new([1.0; 3], [0.3, -2.0, 1.0]).unwrap();
        let d = distances_from_dragt(&sys, &DragtCoords::new(1.0, FRAC_PI_2, 0.0)).unwrap();
        assert_relative_eq!(d.r12, 1.0, max_relative = 1e-12);
        assert_relative_eq!(d.r13, 1.0, max_relative = 1e-12);
        assert_relative_eq!(d.r23, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn collision_angles_hit_collisions() {
        for name in crate::system::PRESETS {
            let sys = BodySystem::preset(name).unwrap();
            let a = collision_angles(&sys);
            let at = |psi: f64| distances_from_dragt(&sys, &DragtCoords::new(1.0, 0.0, psi)).unwrap();
            assert!(at(a.psi12).r12 < 1e-10, "{name}");
            assert!(at(a.psi23).r23 < 1e-10, "{name}");
            assert!(at(a.psi13).r13 < 1e-10, "{name}");
        }
    }

    #[test]
    fn collision_angles_examples() {
        let deg = |x: f64| x.to_degrees();
        let a = collision_angles(&helium());
        assert!((deg(a.psi12) - 89.99214109).abs() < 1e-6);
        assert!((deg(a.psi23) + 0.01571780034).abs() < 1e-6);
        assert_eq!(deg(a.psi13), 180.0);
        let a = collision_angles(&BodySystem::preset("eep").unwrap());
        assert!((deg(a.psi12) - 60.0).abs() < 1e-12);
        assert!((deg(a.psi23) + 60.0).abs() < 1e-12);
        let a = collision_angles(&BodySystem::preset("gravity-demo").unwrap());
        assert!((deg(a.psi12) - 48.0).abs() < 0.5);
        assert!((deg(a.psi23) + 71.0).abs() < 0.5);
    }

    #[test]
    fn collision_ratio_matches_closed_form() {
        // w2/w1 on the 1-2 and 2-3 collision lines
        let sys = BodySystem::preset("gravity-demo").unwrap();
        let [m1, m2, m3] = sys.masses();
        let total = m1 + m2 + m3;
        let num = 2.0 * (m1 * m2 * m3).sqrt() * total.sqrt();
        let a = collision_angles(&sys);
        assert_relative_eq!(a.psi12.tan(), num / (m1 * total - m2 * m3), max_relative = 1e-12);
        assert_relative_eq!(a.psi23.tan(), -num / (m3 * total - m1 * m2), max_relative = 1e-12);
    }

    #[test]
    fn normalize_examples() {
        let (shape, lambda) = normalize_shape(&JacobiShapeCoords::new(1.0, 1.0, FRAC_PI_2)).unwrap();
        assert!(shape.radius() < 1e-15);
        assert_relative_eq!(lambda, 0.5f64.sqrt());
        assert_eq!(
            normalize_shape(&JacobiShapeCoords::new(2.0, 0.0, 0.4)),
            Err(Error::Collinear)
        );
        assert_eq!(
            normalize_shape(&JacobiShapeCoords::new(0.0, 0.0, 0.4)),
            Err(Error::TripleCollision)
        );
        assert_eq!(
            normalize_shape(&JacobiShapeCoords::new(1.0, 2.0, PI)),
            Err(Error::Collinear)
        );
    }

    #[test]
    fn xxy_examples() {
        let (a, b) = xxy_section(&JacobiShapeCoords::new(1.0, 1.0, FRAC_PI_2));
        assert_eq!(a, Vector3::new(1.0, 0.0, 0.0));
        assert!((b - Vector3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
        let (a, b) = xxy_section(&JacobiShapeCoords::new(1.0, 2.0, 0.0));
        assert_eq!((a, b), (Vector3::new(1.0, 0.0, 0.0), Vector3::new(2.0, 0.0, 0.0)));
        let (a, b) = xxy_section(&JacobiShapeCoords::new(2.0, 1.0, PI));
        assert_eq!(a, Vector3::new(2.0, 0.0, 0.0));
        assert!((b - Vector3::new(-1.0, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn positions_round_trip() {
        let sys = BodySystem::preset("gravity-demo").unwrap();
        let j = JacobiShapeCoords::new(0.7, 1.3, 2.1);
        let x = positions_from_jacobi(&sys, &j);
        let cm: Vector3<f64> = x.iter().zip(sys.masses()).map(|(p, m)| p * m).sum();
        assert!(cm.norm() < 1e-14);
        let back = jacobi_from_positions(&sys, &x);
        assert_relative_eq!(back.rho1, j.rho1, max_relative = 1e-13);
        assert_relative_eq!(back.rho2, j.rho2, max_relative = 1e-13);
        assert_relative_eq!(back.phi, j.phi, max_relative = 1e-13);
    }

    #[test]
    fn shape_rejects_boundary() {
        assert!(Shape::new(1.0, 0.0).is_err());
        assert!(Shape::new(0.6, 0.8).is_err());
        assert!(Shape::new(f64::NAN, 0.0).is_err());
        let s = Shape::new(0.3, -0.4).unwrap();
        assert_relative_eq!(s.to_w().norm(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(s.to_jacobi().moment(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn shape_from_side_lengths() {
        let sys = BodySystem::preset("gravity-demo").unwrap();
        let d = Distances {
            r12: 1.3,
            r13: 0.9,
            r23: 1.1,
        };
        let shape = shape_from_distances(&sys, &d).unwrap();
        let back = distances_from_w(&sys, &shape.to_w()).unwrap();
        let k = d.r12 / back.r12;
        assert_relative_eq!(back.r13 * k, d.r13, max_relative = 1e-12);
        assert_relative_eq!(back.r23 * k, d.r23, max_relative = 1e-12);

        let line = Distances {
            r12: 0.4,
            r13: 1.0,
            r23: 0.6,
        };
        let (w1, w2) = disk_point_from_distances(&sys, &line).unwrap();
        assert_relative_eq!(w1.hypot(w2), 1.0, max_relative = 1e-12);
        assert!(shape_from_distances(&sys, &line).is_err());
        assert!(triangle_positions(&Distances {
            r12: 0.1,
            r13: 1.0,
            r23: 0.2
        })
        .is_err());
    }
}
