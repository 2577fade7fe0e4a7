//! Bound-bound form factors of hydrogen-like and Coulomb–Sturmian states.
//!
//! The central object is the multipole coefficient `P^(l2)_{n,l;n3,l3}(u,w)`
//! which arises after Fock's stereographic projection of momentum space onto
//! the unit 3-sphere. Everything is evaluated in MPFR arithmetic at a
//! caller-chosen precision, see [`PrecisionContext`].
//!
//! Index convention: `n` is the principal quantum number minus one, so
//! `0 <= l <= n`; `u = alpha/beta`.

pub mod error;
pub mod exactmath;
pub mod fockgeom;
pub mod formfactor;
pub mod oracle;
pub mod pcoeff;
pub mod recurrence;

pub use error::{Error, Result};
pub use exactmath::{Complex, PrecisionContext, Real};
pub use fockgeom::{Channel, Kinematics, UnitVec4, Vec3};
pub use formfactor::{BoundLabel, FormFactor, Mode, TransitionSpec};
pub use pcoeff::{Backend, PIndex, PValue};
