//! Hill regions on the shape-orientation space.
//!
//! For a shape `q~` (unit moment of inertia), a unit body angular momentum
//! direction `J~` and the integrals `(E, r)`, the point is in the Hill
//! region when some dilation `lambda > 0` satisfies
//!
//! ```text
//! F(lambda) = lambda^2 E - E_R - lambda V~ >= 0,   E_R = r^2 1/2 J~.M~^-1.J~
//! ```
//!
//! For `E < 0` this depends on `(E, r)` only through `nu = -E r^2`.

use nalgebra::Vector3;

use crate::coords::{distances_from_w, Distances, Shape};
use crate::error::{Error, Result};
use crate::reduction::inertia;
use crate::system::BodySystem;

/// `V = -a3/r12 - a2/r13 - a1/r23`. A vanishing distance with nonzero
/// coupling yields a signed infinity.
pub fn potential(system: &BodySystem, dist: &Distances) -> f64 {
    let [a1, a2, a3] = system.alphas();
    [(a3, dist.r12), (a2, dist.r13), (a1, dist.r23)]
        .into_iter()
        .filter(|(alpha, _)| *alpha != 0.0)
        .map(|(alpha, r)| -alpha / r)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeEvaluation {
    pub shape: Shape,
    pub v_tilde: f64,
    /// Principal moments at unit moment of inertia, ascending.
    pub m_tilde: [f64; 3],
    /// Normalised rotational energies `1/(2 M~_k)`, listed as `(k=3, k=2, k=1)`.
    pub thresholds: [f64; 3],
}

impl ShapeEvaluation {
    /// `1/(2 M~_k)` for axis `k` (1-based).
    pub fn threshold(&self, axis: usize) -> f64 {
        self.thresholds[3 - axis]
    }

    /// `sqrt(M~_k) V~`, whose critical points are the relative equilibria.
    pub fn scaled_potential(&self, axis: usize) -> f64 {
        self.m_tilde[axis - 1].sqrt() * self.v_tilde
    }
}

/// Principal moments on the shape disk as functions of the radius `h`:
/// `M~_1 = (1 - h)/2`, written to stay accurate as `h -> 1`.
pub fn shape_moments(w1: f64, w2: f64) -> [f64; 3] {
    let h = w1.hypot(w2);
    let w3_sq = (1.0 - w1 * w1 - w2 * w2).max(0.0);
    [0.5 * w3_sq / (1.0 + h), 0.5 * (1.0 + h), 1.0]
}

pub fn shape_eval(system: &BodySystem, shape: &Shape) -> Result<ShapeEvaluation> {
    let dist = distances_from_w(system, &shape.to_w())?;
    let m_tilde = shape_moments(shape.w1(), shape.w2());
    Ok(ShapeEvaluation {
        shape: *shape,
        v_tilde: potential(system, &dist),
        m_tilde,
        thresholds: [0.5 / m_tilde[2], 0.5 / m_tilde[1], 0.5 / m_tilde[0]],
    })
}

/// `F(lambda) = lambda^2 E - E_R - lambda V~`.
pub fn f_lambda(e: f64, e_r: f64, v_tilde: f64, lambda: f64) -> f64 {
    lambda * lambda * e - e_r - lambda * v_tilde
}

/// Regions of the `(E, V~)` plane at fixed `E_R > 0`. Quadrants are
/// numbered counter-clockwise from `E > 0, V~ > 0`; the suffix `a` marks real
/// roots of `F`, `b` complex ones. Points on a coordinate axis are
/// `AxisDegenerate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionCase {
    I,
    IIa,
    IIb,
    IIIa,
    IIIb,
    IV,
    AxisDegenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HillMembership {
    pub member: bool,
    pub region_case: RegionCase,
    pub discriminant: f64,
    pub lambda_minus: Option<f64>,
    pub lambda_plus: Option<f64>,
}

pub fn f_analysis(e: f64, e_r: f64, v_tilde: f64) -> Result<HillMembership> {
    if !(e_r > 0.0) {
        return Err(Error::Precondition(format!(
            "rotational energy must be positive, got {e_r}"
        )));
    }
    let discriminant = 4.0 * e * e_r + v_tilde * v_tilde;
    let (lambda_minus, lambda_plus) = if e == 0.0 {
        if v_tilde == 0.0 {
            (None, None)
        } else {
            let root = -e_r / v_tilde;
            (Some(root), Some(root))
        }
    } else if discriminant >= 0.0 {
        // E l^2 - V~ l - E_R = 0, cancellation-free form
        let sq = discriminant.sqrt();
        let t = 0.5 * (v_tilde + if v_tilde >= 0.0 { sq } else { -sq });
        let (x, y) = if t == 0.0 {
            let x = (e_r / e).abs().sqrt();
            (x, -x)
        } else {
            (t / e, -e_r / t)
        };
        (Some(x.min(y)), Some(x.max(y)))
    } else {
        (None, None)
    };
    let real = discriminant >= 0.0;
    let region_case = match (e.partial_cmp(&0.0), v_tilde.partial_cmp(&0.0)) {
        (Some(std::cmp::Ordering::Greater), Some(std::cmp::Ordering::Greater)) => RegionCase::I,
        (Some(std::cmp::Ordering::Less), Some(std::cmp::Ordering::Greater)) => {
            if real {
                RegionCase::IIa
            } else {
                RegionCase::IIb
            }
        }
        (Some(std::cmp::Ordering::Less), Some(std::cmp::Ordering::Less)) => {
            if real {
                RegionCase::IIIa
            } else {
                RegionCase::IIIb
            }
        }
        (Some(std::cmp::Ordering::Greater), Some(std::cmp::Ordering::Less)) => RegionCase::IV,
        _ => RegionCase::AxisDegenerate,
    };
    let member = if e > 0.0 {
        true
    } else if e == 0.0 {
        v_tilde < 0.0
    } else {
        v_tilde < 0.0 && real
    };
    Ok(HillMembership {
        member,
        region_case,
        discriminant,
        lambda_minus,
        lambda_plus,
    })
}

fn unit_check(j_hat: &Vector3<f64>) -> Result<()> {
    if (j_hat.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "orientation must be a unit vector, |J| = {}",
            j_hat.norm()
        )));
    }
    Ok(())
}

/// `1/2 J~.M~^-1.J~` with `J~` given in the principal frame.
pub fn normalised_rotational_energy(eval: &ShapeEvaluation, j_hat: &Vector3<f64>) -> f64 {
    0.5 * (0..3).map(|k| j_hat[k] * j_hat[k] / eval.m_tilde[k]).sum::<f64>()
}

/// Hill-region membership of `(shape, J_hat)` at energy `E` and angular
/// momentum `r`. `J_hat` is expressed in the shape's principal frame.
pub fn membership(system: &BodySystem, e: f64, r: f64, shape: &Shape, j_hat: &Vector3<f64>) -> Result<HillMembership> {
    if !(r > 0.0) {
        return Err(Error::Precondition(format!(
            "angular momentum must be positive, got {r}"
        )));
    }
    unit_check(j_hat)?;
    let eval = shape_eval(system, shape)?;
    f_analysis(e, r * r * normalised_rotational_energy(&eval, j_hat), eval.v_tilde)
}

/// Accessible part of the unit angular momentum sphere over one shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrientationClass {
    Empty,
    Caps,
    Ring,
    Full,
}

impl OrientationClass {
    pub const ALL: [Self; 4] = [Self::Empty, Self::Caps, Self::Ring, Self::Full];

    pub fn name(self) -> &'static str {
        match self {
            Self::Empty => "empty",
            Self::Caps => "caps",
            Self::Ring => "ring",
            Self::Full => "full",
        }
    }
}

/// Largest normalised rotational energy `V~^2 / (4 nu)` compatible with the
/// shape at `nu > 0` (meaningful only where `V~ < 0`).
pub fn rotational_budget(v_tilde: f64, nu: f64) -> f64 {
    v_tilde * v_tilde / (4.0 * nu)
}

/// Classification from a precomputed shape evaluation.
pub fn classify(eval: &ShapeEvaluation, nu: f64) -> OrientationClass {
    use OrientationClass::*;
    let v = eval.v_tilde;
    if nu < 0.0 {
        return Full;
    }
    if nu == 0.0 {
        return if v < 0.0 { Full } else { Empty };
    }
    if !(v < 0.0) {
        return Empty;
    }
    let budget = rotational_budget(v, nu);
    let [e3, e2, e1] = eval.thresholds;
    if budget >= e1 {
        Full
    } else if budget >= e2 {
        Ring
    } else if budget >= e3 {
        Caps
    } else {
        Empty
    }
}

pub fn orientation_class(system: &BodySystem, nu: f64, shape: &Shape) -> Result<OrientationClass> {
    Ok(classify(&shape_eval(system, shape)?, nu))
}

/// `V~ / (2 sqrt(1/2 J~.M~^-1.J~))`; for `E < 0` the Hill region is the
/// sublevel set `{ value <= -sqrt(nu) }`.
pub fn bif_function(system: &BodySystem, shape: &Shape, j_hat: &Vector3<f64>) -> Result<f64> {
    unit_check(j_hat)?;
    let eval = shape_eval(system, shape)?;
    Ok(eval.v_tilde / (2.0 * normalised_rotational_energy(&eval, j_hat).sqrt()))
}

/// Convert an orientation between the principal frame of `shape` and the
/// xxy body frame.
pub fn principal_to_body(shape: &Shape, j_hat: &Vector3<f64>) -> Vector3<f64> {
    inertia(&shape.to_jacobi()).to_body(j_hat)
}
