//! Critical values of the bifurcation parameter `nu = -E r^2`.
//!
//! The Hill region changes topology only at
//!
//! * `nu = 0`,
//! * critical points at infinity (one bound pair, third body at rest far away),
//! * the diabolic shape (equal-length perpendicular Jacobi vectors),
//! * non-collinear relative equilibria (Lagrange triangles, Langmuir orbits),
//! * collinear relative equilibria (one per ordering, at most).
//!
//! At a relative equilibrium rotating about principal axis `k` of shape `q~`
//! the value is `nu = 1/2 M~_k V~^2`.

use std::fmt;
use std::io::{self, Write};

use crate::coords::{
    disk_point_from_distances, distances_on_disk, jacobi_from_positions, normalize_shape, shape_from_distances,
    Distances, Shape,
};
use crate::error::{Error, Result};
use crate::fmt::sig;
use crate::hill::{potential, shape_moments};
use crate::reduction::{inertia, relequil_defect, rigid_rotation_state};
use crate::system::{other_two, BodySystem};
use nalgebra::Vector3;

/// Catalog entries closer than this (absolute) are merged.
pub const MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Zero,
    Infinity,
    Diabolic,
    Lagrange,
    Langmuir,
    Collinear,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Zero => "zero",
            Family::Infinity => "infinity",
            Family::Diabolic => "diabolic",
            Family::Lagrange => "lagrange",
            Family::Langmuir => "langmuir",
            Family::Collinear => "collinear",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Family-specific data. Body indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detail {
    None,
    /// The co-rotating pair of a critical point at infinity.
    Pair(usize, usize),
    /// Isosceles Langmuir triangle: apex angle parameter and the odd body.
    Langmuir {
        theta: f64,
        odd: usize,
    },
    /// Collinear configuration with `middle` between the other two;
    /// `ratio` is the distance from the lower-numbered outer body to the
    /// middle one over the outer separation.
    Collinear {
        middle: usize,
        ratio: f64,
    },
}

impl fmt::Display for Detail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Detail::None => Ok(()),
            Detail::Pair(i, j) => write!(f, "pair={i}-{j}"),
            Detail::Langmuir { theta, odd } => {
                write!(f, "theta_deg={} odd={odd}", sig(theta.to_degrees(), 12))
            }
            Detail::Collinear { middle, ratio } => write!(f, "middle={middle} ratio={}", sig(ratio, 12)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValue {
    pub nu: f64,
    pub family: Family,
    /// Principal axis (1-based) of the rotation, where defined.
    pub axis: Option<usize>,
    /// Point of the closed shape disk; on the boundary for collinear entries.
    pub point: Option<(f64, f64)>,
    pub detail: Detail,
}

impl CriticalValue {
    fn bare(nu: f64, family: Family, detail: Detail) -> Self {
        Self {
            nu,
            family,
            axis: None,
            point: None,
            detail,
        }
    }

    /// The stored point as an interior shape (`None` for collinear entries).
    pub fn shape(&self) -> Option<Shape> {
        self.point.and_then(|(w1, w2)| Shape::new(w1, w2).ok())
    }

    /// `1/2 M~_k V~^2` evaluated at the stored point and axis.
    pub fn nu_from_point(&self, system: &BodySystem) -> Option<f64> {
        let (w1, w2) = self.point?;
        let axis = self.axis?;
        let v = potential(system, &distances_on_disk(system, w1, w2).ok()?);
        Some(0.5 * shape_moments(w1, w2)[axis - 1] * v * v)
    }
}

pub fn nu_infinity(system: &BodySystem) -> Vec<CriticalValue> {
    [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .filter_map(|(i, j)| {
            let alpha = system.pair_alpha(i, j);
            (alpha > 0.0).then(|| {
                let nu = 0.5 * system.pair_reduced_mass(i, j) * alpha * alpha;
                CriticalValue::bare(nu, Family::Infinity, Detail::Pair(i + 1, j + 1))
            })
        })
        .collect()
}

pub fn nu_diabolic(system: &BodySystem) -> CriticalValue {
    let bracket: f64 = [(0, 1), (0, 2), (1, 2)]
        .into_iter()
        .map(|(i, j)| system.pair_alpha(i, j) * system.pair_reduced_mass(i, j).sqrt())
        .sum();
    CriticalValue {
        nu: 0.5 * bracket * bracket,
        family: Family::Diabolic,
        axis: Some(1),
        point: Some((0.0, 0.0)),
        detail: Detail::None,
    }
}

pub fn nu_lagrange(system: &BodySystem) -> Result<CriticalValue> {
    let g = system
        .gravitational_constant()
        .ok_or_else(|| Error::UnsupportedFamily {
            family: "lagrange",
            reason: "couplings are not of the form G m_i m_j with G > 0".into(),
        })?;
    let [m1, m2, m3] = system.masses();
    let pairs = m1 * m2 + m2 * m3 + m1 * m3;
    let shape = shape_from_distances(
        system,
        &Distances {
            r12: 1.0,
            r13: 1.0,
            r23: 1.0,
        },
    )?;
    Ok(CriticalValue {
        nu: 0.5 * g * g * pairs.powi(3) / (m1 + m2 + m3),
        family: Family::Lagrange,
        axis: Some(3),
        point: Some((shape.w1(), shape.w2())),
        detail: Detail::None,
    })
}

/// Isosceles Langmuir configuration at scale `a = 1`: the two like bodies
/// at `(d, +-b)`, the odd body at `(-c, 0)`, rotating about the in-plane
/// axis perpendicular to the symmetry axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LangmuirGeometry {
    pub theta: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub mu: f64,
    /// Odd body (0-based) and the symmetric pair.
    pub odd: usize,
    pub pair: (usize, usize),
}

impl LangmuirGeometry {
    /// Body positions indexed by body number (0-based).
    pub fn positions(&self) -> [Vector3<f64>; 3] {
        let mut x = [Vector3::zeros(); 3];
        x[self.odd] = Vector3::new(-self.c, 0.0, 0.0);
        x[self.pair.0] = Vector3::new(self.d, self.b, 0.0);
        x[self.pair.1] = Vector3::new(self.d, -self.b, 0.0);
        x
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// The odd body `k` of a symmetric system: its two partners have equal
/// masses, equal attractive couplings to `k` and a repulsive mutual coupling.
fn langmuir_labels(system: &BodySystem) -> Option<(usize, usize, usize)> {
    let m = system.masses();
    [2, 0, 1].into_iter().find_map(|k| {
        let (i, j) = other_two(k);
        let (aik, ajk, aij) = (
            system.pair_alpha(i, k),
            system.pair_alpha(j, k),
            system.pair_alpha(i, j),
        );
        (close(m[i], m[j]) && close(aik, ajk) && aik > 0.0 && aij < 0.0).then_some((k, i, j))
    })
}

pub fn langmuir_geometry(system: &BodySystem) -> Result<LangmuirGeometry> {
    let unsupported = |reason: &str| Error::UnsupportedFamily {
        family: "langmuir",
        reason: reason.into(),
    };
    let (k, i, j) = langmuir_labels(system).ok_or_else(|| {
        unsupported("needs two equal masses with equal attractive couplings to the third body and mutual repulsion")
    })?;
    let ratio = -system.pair_alpha(i, j) / (4.0 * system.pair_alpha(i, k));
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(unsupported("charge ratio gives no admissible angle"));
    }
    let sin = ratio.cbrt();
    let theta = sin.asin();
    let cos = theta.cos();
    let (m, m_odd) = (system.masses()[i], system.masses()[k]);
    let total = 2.0 * m + m_odd;
    Ok(LangmuirGeometry {
        theta,
        a: 1.0,
        b: sin,
        c: 2.0 * m * cos / total,
        d: m_odd * cos / total,
        mu: 2.0 * m * m_odd / total,
        odd: k,
        pair: (i, j),
    })
}

pub fn nu_langmuir(system: &BodySystem) -> Result<CriticalValue> {
    let geo = langmuir_geometry(system)?;
    let (i, j) = geo.pair;
    let alpha = system.pair_alpha(i, geo.odd);
    let alpha_ee = system.pair_alpha(i, j);
    let (s, c) = geo.theta.sin_cos();
    let nu = 0.5 * geo.mu * c.powi(4) / s * (4.0 * alpha * alpha * s + alpha * alpha_ee);

    let q = jacobi_from_positions(system, &geo.positions());
    let (shape, _) = normalize_shape(&q)?;
    // rotation axis is in-plane, perpendicular to the symmetry axis
    let m = system.masses();
    let moment = 2.0 * m[i] * geo.d * geo.d + m[geo.odd] * geo.c * geo.c;
    let [m1, m2, _] = inertia(&q).principal;
    let axis = if (moment - m1).abs() <= (moment - m2).abs() {
        1
    } else {
        2
    };
    Ok(CriticalValue {
        nu,
        family: Family::Langmuir,
        axis: Some(axis),
        point: Some((shape.w1(), shape.w2())),
        detail: Detail::Langmuir {
            theta: geo.theta,
            odd: geo.odd + 1,
        },
    })
}

const COLLINEAR_GRID: usize = 10_000;

/// Collinear relative equilibria. For each middle body the outer bodies
/// are placed a unit distance apart and the middle body at fraction `s`;
/// critical points of `nu(s) = 1/2 I V^2` with `V < 0` are returned.
pub fn collinear_configs(system: &BodySystem) -> Vec<CriticalValue> {
    let m = system.masses();
    let total = system.total_mass();
    let mut out = Vec::new();
    for mid in [0, 1, 2] {
        let (i, k) = other_two(mid);
        let (aim, amk, aik) = (
            system.pair_alpha(i, mid),
            system.pair_alpha(mid, k),
            system.pair_alpha(i, k),
        );
        let (wim, wmk, wik) = (m[i] * m[mid], m[mid] * m[k], m[i] * m[k]);
        let moment = |s: f64| (wim * s * s + wmk * (1.0 - s).powi(2) + wik) / total;
        let pot = |s: f64| -aim / s - amk / (1.0 - s) - aik;
        // d nu / ds = 1/2 V (I' V + 2 I V'); roots of the bracket
        let g = |s: f64| {
            let di = 2.0 * (wim * s - wmk * (1.0 - s)) / total;
            let dv = aim / (s * s) - amk / (1.0 - s).powi(2);
            di * pot(s) + 2.0 * moment(s) * dv
        };
        let grid: Vec<f64> = (0..COLLINEAR_GRID)
            .map(|n| (n as f64 + 0.5) / COLLINEAR_GRID as f64)
            .collect();
        let mut roots: Vec<f64> = Vec::new();
        for w in grid.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (ga, gb) = (g(a), g(b));
            if ga == 0.0 {
                roots.push(a);
            } else if ga * gb < 0.0 {
                roots.push(bisect(&g, a, b, 1e-12));
            }
        }
        for s in roots {
            let v = pot(s);
            if !(v < 0.0) {
                continue;
            }
            let mut dist = [0.0; 3];
            // Distances stored as r12, r13, r23
            let set = |d: &mut [f64; 3], p: usize, q: usize, value: f64| d[p + q - 1] = value;
            set(&mut dist, i.min(mid), i.max(mid), s);
            set(&mut dist, mid.min(k), mid.max(k), 1.0 - s);
            set(&mut dist, i, k, 1.0);
            let d = Distances {
                r12: dist[0],
                r13: dist[1],
                r23: dist[2],
            };
            let point = disk_point_from_distances(system, &d).ok();
            out.push(CriticalValue {
                nu: 0.5 * moment(s) * v * v,
                family: Family::Collinear,
                axis: Some(3),
                point,
                detail: Detail::Collinear {
                    middle: mid + 1,
                    ratio: s,
                },
            });
        }
    }
    out
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

const SEED_GRID: usize = 64;
const MARGIN: f64 = 1e-3;

/// `sqrt(M~_k) V~` on the open disk, or `None` where undefined.
fn scaled_potential(system: &BodySystem, axis: usize, w1: f64, w2: f64) -> Option<f64> {
    let v = potential(system, &distances_on_disk(system, w1, w2).ok()?);
    let value = shape_moments(w1, w2)[axis - 1].sqrt() * v;
    value.is_finite().then_some(value)
}

fn admissible(axis: usize, w1: f64, w2: f64) -> bool {
    let r = w1.hypot(w2);
    r < 1.0 - MARGIN && (axis == 3 || r > MARGIN)
}

fn gradient(f: &impl Fn(f64, f64) -> Option<f64>, x: f64, y: f64, h: f64) -> Option<[f64; 2]> {
    Some([
        (f(x + h, y)? - f(x - h, y)?) / (2.0 * h),
        (f(x, y + h)? - f(x, y - h)?) / (2.0 * h),
    ])
}

fn newton(f: &impl Fn(f64, f64) -> Option<f64>, axis: usize, mut x: f64, mut y: f64) -> Option<(f64, f64)> {
    const H_GRAD: f64 = 1e-6;
    const H_HESS: f64 = 1e-4;
    let norm = |g: [f64; 2]| g[0].hypot(g[1]);
    let mut g = gradient(f, x, y, H_GRAD)?;
    for _ in 0..100 {
        let scale = f(x, y)?.abs().max(1e-300);
        if norm(g) <= 1e-11 * scale {
            return Some((x, y));
        }
        let gp = gradient(f, x + H_HESS, y, H_GRAD)?;
        let gm = gradient(f, x - H_HESS, y, H_GRAD)?;
        let gq = gradient(f, x, y + H_HESS, H_GRAD)?;
        let gn = gradient(f, x, y - H_HESS, H_GRAD)?;
        let hxx = (gp[0] - gm[0]) / (2.0 * H_HESS);
        let hyy = (gq[1] - gn[1]) / (2.0 * H_HESS);
        let hxy = 0.5 * ((gp[1] - gm[1]) + (gq[0] - gn[0])) / (2.0 * H_HESS);
        let det = hxx * hyy - hxy * hxy;
        let mut step = if det.abs() > 1e-14 * (hxx.abs() + hyy.abs()).powi(2) {
            [-(hyy * g[0] - hxy * g[1]) / det, -(hxx * g[1] - hxy * g[0]) / det]
        } else {
            [-g[0] / scale, -g[1] / scale]
        };
        let len = norm(step);
        if !len.is_finite() {
            return None;
        }
        if len > 0.05 {
            step = [step[0] * 0.05 / len, step[1] * 0.05 / len];
        }
        let mut accepted = false;
        for _ in 0..30 {
            let (nx, ny) = (x + step[0], y + step[1]);
            if admissible(axis, nx, ny) {
                if let Some(ng) = gradient(f, nx, ny, H_GRAD) {
                    if norm(ng) < norm(g) {
                        x = nx;
                        y = ny;
                        g = ng;
                        accepted = true;
                        break;
                    }
                }
            }
            step = [0.5 * step[0], 0.5 * step[1]];
        }
        if !accepted {
            let scale = f(x, y)?.abs();
            return (norm(g) <= 1e-9 * scale).then_some((x, y));
        }
    }
    None
}

/// Interior critical points of `sqrt(M~_k) V~` with `V~ < 0`, found by
/// damped Newton iteration from a grid of seeds and certified as relative
/// equilibria. Sorted by `(nu, w1, w2)`.
pub fn find_critical_shapes(system: &BodySystem, axis: usize) -> Result<Vec<(Shape, f64)>> {
    if !(1..=3).contains(&axis) {
        return Err(Error::Precondition(format!("axis must be 1, 2 or 3, got {axis}")));
    }
    let f = |x: f64, y: f64| -> Option<f64> {
        if x * x + y * y >= 1.0 {
            return None;
        }
        scaled_potential(system, axis, x, y)
    };
    let seeds: Vec<(f64, f64)> = (0..SEED_GRID * SEED_GRID)
        .map(|n| {
            let px = |i: usize| -1.0 + (2 * i + 1) as f64 / SEED_GRID as f64;
            (px(n % SEED_GRID), px(n / SEED_GRID))
        })
        .filter(|&(x, y)| admissible(axis, x, y) && f(x, y).is_some_and(|v| v < 0.0))
        .collect();
    let found = crate::par_map(seeds, |(x, y)| newton(&f, axis, x, y));

    let mut unique: Vec<(f64, f64)> = Vec::new();
    for (x, y) in found.into_iter().flatten() {
        if unique.iter().all(|&(ux, uy)| (ux - x).hypot(uy - y) > 1e-6) {
            unique.push((x, y));
        }
    }
    let mut out = Vec::new();
    for (x, y) in unique {
        let Ok(shape) = Shape::new(x, y) else { continue };
        let Some(value) = f(x, y) else { continue };
        if !(value < 0.0) {
            continue;
        }
        let Ok(state) = rigid_rotation_state(system, &shape, axis, 1.0) else {
            continue;
        };
        if relequil_defect(system, &state).is_ok_and(|d| d < 1e-6) {
            out.push((shape, 0.5 * value * value));
        }
    }
    out.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then(a.0.w1().total_cmp(&b.0.w1()))
            .then(a.0.w2().total_cmp(&b.0.w2()))
    });
    Ok(out)
}

/// One catalog value, possibly shared by several critical points.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub nu: f64,
    pub members: Vec<CriticalValue>,
}

impl CatalogEntry {
    pub fn multiplicity(&self) -> usize {
        self.members.len()
    }

    pub fn families(&self) -> Vec<Family> {
        let mut out: Vec<Family> = Vec::new();
        for m in &self.members {
            if !out.contains(&m.family) {
                out.push(m.family);
            }
        }
        out
    }

    pub fn has_family(&self, family: Family) -> bool {
        self.members.iter().any(|m| m.family == family)
    }
}

/// Every critical value, sorted ascending, with coincident values merged.
pub fn critical_catalog(system: &BodySystem) -> Vec<CatalogEntry> {
    let mut all = vec![CriticalValue::bare(0.0, Family::Zero, Detail::None)];
    all.extend(nu_infinity(system));
    all.push(nu_diabolic(system));
    all.extend(nu_lagrange(system).ok());
    all.extend(nu_langmuir(system).ok());
    all.extend(collinear_configs(system));
    all.sort_by(|a, b| a.nu.total_cmp(&b.nu).then(a.family.cmp(&b.family)));

    let mut entries: Vec<CatalogEntry> = Vec::new();
    for value in all {
        match entries.last_mut() {
            Some(last) if (value.nu - last.nu).abs() <= MERGE_TOL => last.members.push(value),
            _ => entries.push(CatalogEntry {
                nu: value.nu,
                members: vec![value],
            }),
        }
    }
    entries
}

pub const CATALOG_HEADER: &str = "nu,family,axis,multiplicity,w1,w2,detail";

pub fn write_catalog_csv<W: Write>(mut out: W, catalog: &[CatalogEntry]) -> io::Result<()> {
    writeln!(out, "{CATALOG_HEADER}")?;
    for entry in catalog {
        let families: Vec<_> = entry.families().iter().map(|f| f.name()).collect();
        let axis = entry
            .members
            .iter()
            .find_map(|m| m.axis)
            .map(|a| a.to_string())
            .unwrap_or_default();
        let (w1, w2) = entry
            .members
            .iter()
            .find_map(|m| m.point)
            .map(|(a, b)| (sig(a, 12), sig(b, 12)))
            .unwrap_or_default();
        let detail: Vec<String> = entry
            .members
            .iter()
            .map(|m| m.detail.to_string())
            .filter(|d| !d.is_empty())
            .collect();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            sig(entry.nu, 12),
            families.join("+"),
            axis,
            entry.multiplicity(),
            w1,
            w2,
            detail.join(";")
        )?;
    }
    Ok(())
}
