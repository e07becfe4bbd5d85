//! Reduced description, critical values and Hill regions of three bodies
//! interacting through inverse-distance potentials
//! `V = -a3/r12 - a2/r13 - a1/r23` (gravity, Coulomb, or mixtures).
//!
//! * [`coords`]: Jacobi, `w` and Dragt coordinates, distances, shapes.
//! * [`reduction`]: inertia tensor, metric, gauge potential and the reduced
//!   ro-vibrational Hamiltonian with its equations of motion.
//! * [`hill`]: the membership criterion and the four-way classification of
//!   the angular momentum sphere over each shape.
//! * [`critical`]: the catalog of critical values of `nu = -E r^2`.
//! * [`scan`]: raster scans of the shape disk and PPM/CSV encoders.
//! * [`verify`]: relative-equilibrium initial conditions and the
//!   end-to-end verification report.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` deliberately rejects NaN

pub mod coords;
pub mod critical;
pub mod error;
pub mod fmt;
pub mod hill;
pub mod reduction;
pub mod scan;
pub mod system;
pub mod verify;

pub use coords::{Distances, DragtCoords, JacobiShapeCoords, Shape, WCoords};
pub use critical::{critical_catalog, CatalogEntry, CriticalValue, Family};
pub use error::{Error, Result};
pub use hill::{HillMembership, OrientationClass, ShapeEvaluation};
pub use reduction::RovibState;
pub use scan::{CellClass, ShapeScan};
pub use system::BodySystem;

/// Order-preserving map, parallel when the `parallel` feature is enabled.
pub(crate) fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}
