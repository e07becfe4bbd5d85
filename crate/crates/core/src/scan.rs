//! Raster scans of the shape disk.
//!
//! Pixel `(i, j)` of an `N x N` raster samples the point
//! `w1 = -1 + (2i + 1)/N`, `w2 = -1 + (2j + 1)/N`. Pixels outside the open
//! disk are `Outside`; pixels within one pixel width (`2/N`) of the collinear
//! circle form the `Boundary` band. PPM output puts `j = N - 1` on the top
//! row so that `w2` increases upwards.

use std::collections::VecDeque;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::io::{self, Write};

use crate::coords::{distances_on_disk, Shape};
use crate::error::{Error, Result};
use crate::fmt::sig;
use crate::hill::{classify, potential, shape_eval, shape_moments, OrientationClass, ShapeEvaluation};
use crate::system::BodySystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellClass {
    Outside,
    Boundary,
    Empty,
    Caps,
    Ring,
    Full,
}

impl CellClass {
    pub const ALL: [Self; 6] = [
        Self::Outside,
        Self::Boundary,
        Self::Empty,
        Self::Caps,
        Self::Ring,
        Self::Full,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Outside => "outside",
            Self::Boundary => "boundary",
            Self::Empty => "empty",
            Self::Caps => "caps",
            Self::Ring => "ring",
            Self::Full => "full",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn rgb(self) -> [u8; 3] {
        match self {
            Self::Outside => [255, 255, 255],
            Self::Boundary => [0, 0, 0],
            Self::Empty => [80, 80, 80],
            Self::Caps => [40, 80, 220],
            Self::Ring => [220, 50, 50],
            Self::Full => [40, 170, 70],
        }
    }

    pub fn orientation(self) -> Option<OrientationClass> {
        match self {
            Self::Empty => Some(OrientationClass::Empty),
            Self::Caps => Some(OrientationClass::Caps),
            Self::Ring => Some(OrientationClass::Ring),
            Self::Full => Some(OrientationClass::Full),
            _ => None,
        }
    }
}

impl From<OrientationClass> for CellClass {
    fn from(c: OrientationClass) -> Self {
        match c {
            OrientationClass::Empty => Self::Empty,
            OrientationClass::Caps => Self::Caps,
            OrientationClass::Ring => Self::Ring,
            OrientationClass::Full => Self::Full,
        }
    }
}

/// Centre coordinate of pixel `i` on an `n`-pixel axis spanning `[-1, 1]`.
pub fn pixel_center(i: usize, n: usize) -> f64 {
    -1.0 + (2 * i + 1) as f64 / n as f64
}

/// `Outside` or `Boundary` for pixels that are not classified.
pub fn geometric_class(w1: f64, w2: f64, n: usize) -> Option<CellClass> {
    let r = w1.hypot(w2);
    if r >= 1.0 {
        Some(CellClass::Outside)
    } else if r > 1.0 - 2.0 / n as f64 {
        Some(CellClass::Boundary)
    } else {
        None
    }
}

fn check_resolution(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Precondition(format!("resolution must be at least 2, got {n}")));
    }
    Ok(())
}

/// Shape evaluations for every interior pixel, reusable across `nu`.
#[derive(Debug, Clone)]
pub struct ShapeField {
    system: BodySystem,
    resolution: usize,
    cells: Vec<std::result::Result<ShapeEvaluation, CellClass>>,
}

impl ShapeField {
    pub fn new(system: &BodySystem, n: usize) -> Result<Self> {
        check_resolution(n)?;
        let rows = crate::par_map((0..n).collect(), |j| {
            let w2 = pixel_center(j, n);
            (0..n)
                .map(|i| {
                    let w1 = pixel_center(i, n);
                    if let Some(c) = geometric_class(w1, w2, n) {
                        return Err(c);
                    }
                    Shape::new(w1, w2)
                        .and_then(|s| shape_eval(system, &s))
                        .map_err(|_| CellClass::Boundary)
                })
                .collect::<Vec<_>>()
        });
        Ok(Self {
            system: *system,
            resolution: n,
            cells: rows.into_iter().flatten().collect(),
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn scan(&self, nu: f64) -> ShapeScan {
        let cells = self
            .cells
            .iter()
            .map(|c| match c {
                Ok(eval) => classify(eval, nu).into(),
                Err(c) => *c,
            })
            .collect();
        ShapeScan {
            resolution: self.resolution,
            nu,
            system: self.system,
            cells,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeScan {
    pub resolution: usize,
    pub nu: f64,
    pub system: BodySystem,
    /// Row-major, `cells[j * N + i]`.
    pub cells: Vec<CellClass>,
}

impl ShapeScan {
    pub fn get(&self, i: usize, j: usize) -> CellClass {
        self.cells[j * self.resolution + i]
    }

    pub fn count(&self, class: CellClass) -> usize {
        self.cells.iter().filter(|c| **c == class).count()
    }
}

pub fn scan_disk(system: &BodySystem, nu: f64, n: usize) -> Result<ShapeScan> {
    Ok(ShapeField::new(system, n)?.scan(nu))
}

/// Values of `sqrt(M~_k) V~` on a raster. On the disk, `values[j * N + i]`
/// samples pixel centre `(w1_i, w2_j)` and is NaN outside; with `chi_psi`,
/// column `i` is `psi = 2 pi (i + 1/2)/N` and row `j` is
/// `chi = pi/2 (j + 1/2)/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourGrid {
    pub resolution: usize,
    pub axis: usize,
    pub chi_psi: bool,
    pub values: Vec<f64>,
}

impl ContourGrid {
    /// Grid coordinates of cell `(i, j)`: `(w1, w2)` or `(psi, chi)`.
    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        let n = self.resolution;
        if self.chi_psi {
            (
                TAU * (i as f64 + 0.5) / n as f64,
                FRAC_PI_2 * (j as f64 + 0.5) / n as f64,
            )
        } else {
            (pixel_center(i, n), pixel_center(j, n))
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.resolution + i]
    }
}

pub fn contour_grid(system: &BodySystem, axis: usize, n: usize, chi_psi: bool) -> Result<ContourGrid> {
    check_resolution(n)?;
    if !(1..=3).contains(&axis) {
        return Err(Error::Precondition(format!("axis must be 1, 2 or 3, got {axis}")));
    }
    let mut grid = ContourGrid {
        resolution: n,
        axis,
        chi_psi,
        values: Vec::new(),
    };
    let rows = crate::par_map((0..n).collect(), |j| {
        (0..n)
            .map(|i| {
                let (a, b) = grid.coords(i, j);
                let (w1, w2) = if chi_psi {
                    (b.cos() * a.cos(), b.cos() * a.sin())
                } else {
                    (a, b)
                };
                if w1 * w1 + w2 * w2 >= 1.0 {
                    return f64::NAN;
                }
                match distances_on_disk(system, w1, w2) {
                    Ok(d) => shape_moments(w1, w2)[axis - 1].sqrt() * potential(system, &d),
                    Err(_) => f64::NAN,
                }
            })
            .collect::<Vec<_>>()
    });
    grid.values = rows.into_iter().flatten().collect();
    Ok(grid)
}

pub fn write_ppm<W: Write>(mut out: W, scan: &ShapeScan) -> io::Result<()> {
    let n = scan.resolution;
    write!(out, "P6\n{n} {n}\n255\n")?;
    let mut row = Vec::with_capacity(3 * n);
    for j in (0..n).rev() {
        row.clear();
        for i in 0..n {
            row.extend_from_slice(&scan.get(i, j).rgb());
        }
        out.write_all(&row)?;
    }
    Ok(())
}

pub fn write_scan_csv<W: Write>(mut out: W, scan: &ShapeScan) -> io::Result<()> {
    let n = scan.resolution;
    writeln!(out, "w1,w2,class")?;
    for j in 0..n {
        for i in 0..n {
            let (w1, w2) = (pixel_center(i, n), pixel_center(j, n));
            writeln!(out, "{},{},{}", sig(w1, 12), sig(w2, 12), scan.get(i, j).name())?;
        }
    }
    Ok(())
}

/// Parse the output of [`write_scan_csv`] back into `(N, cells)`.
pub fn parse_scan_csv(text: &str) -> Result<(usize, Vec<CellClass>)> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "w1,w2,class")) => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "expected header `w1,w2,class`".into(),
            })
        }
    }
    let mut cells = Vec::new();
    for (idx, line) in lines {
        let err = |msg: String| Error::Parse { line: idx + 1, msg };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(err(format!("expected 3 fields, found {}", fields.len())));
        }
        for f in &fields[..2] {
            f.parse::<f64>().map_err(|e| err(format!("`{f}`: {e}")))?;
        }
        cells.push(CellClass::from_name(fields[2]).ok_or_else(|| err(format!("unknown class `{}`", fields[2])))?);
    }
    let n = (cells.len() as f64).sqrt().round() as usize;
    if n * n != cells.len() || n < 2 {
        return Err(Error::Parse {
            line: cells.len() + 1,
            msg: format!("{} cells do not form a square raster", cells.len()),
        });
    }
    Ok((n, cells))
}

pub fn write_grid_csv<W: Write>(mut out: W, grid: &ContourGrid) -> io::Result<()> {
    writeln!(out, "{}", if grid.chi_psi { "psi,chi,value" } else { "w1,w2,value" })?;
    let n = grid.resolution;
    for j in 0..n {
        for i in 0..n {
            let (a, b) = grid.coords(i, j);
            writeln!(out, "{},{},{}", sig(a, 12), sig(b, 12), sig(grid.get(i, j), 12))?;
        }
    }
    Ok(())
}

/// Greyscale rendering of a contour grid between its finite extremes, with
/// ten darker contour bands; NaN is white, infinities black.
pub fn write_grid_ppm<W: Write>(mut out: W, grid: &ContourGrid) -> io::Result<()> {
    let n = grid.resolution;
    let finite = grid.values.iter().copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    write!(out, "P6\n{n} {n}\n255\n")?;
    for j in (0..n).rev() {
        for i in 0..n {
            let v = grid.get(i, j);
            let rgb = if v.is_nan() {
                [255, 255, 255]
            } else if !v.is_finite() {
                [0, 0, 0]
            } else {
                let t = (v - lo) / span;
                let band = ((t * 10.0).fract() < 0.08) as u8;
                let g = (40.0 + 200.0 * t) as u8 - band * 30;
                [g, g, (g as f64 * 0.8 + 50.0) as u8]
            };
            out.write_all(&rgb)?;
        }
    }
    Ok(())
}

/// 4-connected component counts per orientation class (indexed by
/// [`OrientationClass`] order) and whether each class is adjacent to the
/// boundary band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Census {
    pub components: [usize; 4],
    pub touches_boundary: [bool; 4],
}

impl Census {
    pub fn components_of(&self, c: OrientationClass) -> usize {
        self.components[c as usize]
    }

    pub fn touches(&self, c: OrientationClass) -> bool {
        self.touches_boundary[c as usize]
    }
}

fn neighbours(i: usize, j: usize, n: usize) -> impl Iterator<Item = (usize, usize)> {
    let (i, j) = (i as isize, j as isize);
    [(i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1)]
        .into_iter()
        .filter(move |&(a, b)| a >= 0 && b >= 0 && a < n as isize && b < n as isize)
        .map(|(a, b)| (a as usize, b as usize))
}

pub fn component_census(scan: &ShapeScan) -> Census {
    let n = scan.resolution;
    let mut census = Census {
        components: [0; 4],
        touches_boundary: [false; 4],
    };
    let mut seen = vec![false; n * n];
    let mut queue = VecDeque::new();
    for start in 0..n * n {
        let Some(class) = scan.cells[start].orientation() else {
            continue;
        };
        let k = class as usize;
        for (i, j) in neighbours(start % n, start / n, n) {
            if scan.get(i, j) == CellClass::Boundary {
                census.touches_boundary[k] = true;
            }
        }
        if seen[start] {
            continue;
        }
        census.components[k] += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            for (i, j) in neighbours(idx % n, idx / n, n) {
                let next = j * n + i;
                if !seen[next] && scan.cells[next] == scan.cells[start] {
                    seen[next] = true;
                    queue.push_back(next);
                }
            }
        }
    }
    census
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sys(name: &str) -> BodySystem {
        BodySystem::preset(name).unwrap()
    }

    #[test]
    fn negative_nu_is_all_full() {
        for name in crate::system::PRESETS {
            let scan = scan_disk(&sys(name), -1.0, 8).unwrap();
            assert!(scan
                .cells
                .iter()
                .all(|c| matches!(c, CellClass::Outside | CellClass::Boundary | CellClass::Full)));
            assert!(scan.count(CellClass::Full) > 0);
            let census = component_census(&scan);
            assert_eq!(census.components, [0, 0, 0, 1]);
        }
    }

    #[test]
    fn pixel_geometry() {
        assert_eq!(pixel_center(0, 2), -0.5);
        assert_eq!(pixel_center(1, 2), 0.5);
        assert_eq!(geometric_class(0.9, 0.9, 10), Some(CellClass::Outside));
        assert_eq!(geometric_class(0.85, 0.0, 10), Some(CellClass::Boundary));
        assert_eq!(geometric_class(0.75, 0.0, 10), None);
        assert!(scan_disk(&sys("eep"), 1.0, 1).is_err());
    }

    #[test]
    fn ppm_layout() {
        let scan = ShapeScan {
            resolution: 2,
            nu: 0.0,
            system: sys("eep"),
            cells: vec![CellClass::Outside; 4],
        };
        let mut buf = Vec::new();
        write_ppm(&mut buf, &scan).unwrap();
        let header = b"P6\n2 2\n255\n";
        assert_eq!(&buf[..header.len()], header);
        assert_eq!(&buf[header.len()..], &[255u8; 12]);

        let scan = ShapeScan {
            cells: vec![CellClass::Full, CellClass::Ring, CellClass::Caps, CellClass::Empty],
            ..scan
        };
        let mut buf = Vec::new();
        write_ppm(&mut buf, &scan).unwrap();
        // top row is j = 1
        assert_eq!(&buf[header.len()..header.len() + 3], &CellClass::Caps.rgb());
        assert_eq!(&buf[buf.len() - 3..], &CellClass::Ring.rgb());
    }

    #[test]
    fn csv_round_trip() {
        let scan = scan_disk(&sys("helium"), 6.0, 24).unwrap();
        let mut buf = Vec::new();
        write_scan_csv(&mut buf, &scan).unwrap();
        let (n, cells) = parse_scan_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(n, 24);
        assert_eq!(cells, scan.cells);
        assert!(parse_scan_csv("w1,w2,class\n0,0,purple\n").is_err());
        assert!(parse_scan_csv("a,b\n").is_err());
    }

    #[test]
    fn contour_values() {
        let g = sys("gravity-demo");
        let grid = contour_grid(&g, 1, 9, false).unwrap();
        assert_relative_eq!(grid.get(4, 4), -(2.0f64 * 6.961348535).sqrt(), max_relative = 1e-9);
        assert!(grid.get(0, 0).is_nan());

        let g3 = contour_grid(&g, 3, 16, false).unwrap();
        let (w1, w2) = g3.coords(5, 9);
        let eval = shape_eval(&g, &Shape::new(w1, w2).unwrap()).unwrap();
        assert_relative_eq!(g3.get(5, 9), eval.v_tilde, max_relative = 1e-14);

        let cp = contour_grid(&g, 2, 12, true).unwrap();
        assert!(cp.values.iter().all(|v| v.is_finite() && *v < 0.0));
        let mut buf = Vec::new();
        write_grid_csv(&mut buf, &cp).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("psi,chi,value\n"));
        let mut buf = Vec::new();
        write_grid_ppm(&mut buf, &cp).unwrap();
        assert_eq!(buf.len(), b"P6\n12 12\n255\n".len() + 3 * 144);
    }

    #[test]
    fn census_counts_separate_blobs() {
        use CellClass::*;
        let cells = vec![
            Full, Full, Empty, Caps, Boundary, Empty, Empty, Caps, Full, Ring, Caps, Outside, Full, Ring, Outside,
            Outside,
        ];
        let scan = ShapeScan {
            resolution: 4,
            nu: 1.0,
            system: sys("eep"),
            cells,
        };
        let c = component_census(&scan);
        assert_eq!(c.components, [1, 2, 1, 2]);
        assert!(c.touches(OrientationClass::Full));
        assert!(c.touches(OrientationClass::Empty));
        assert!(!c.touches(OrientationClass::Caps));
        assert!(!c.touches(OrientationClass::Ring));
    }
}
