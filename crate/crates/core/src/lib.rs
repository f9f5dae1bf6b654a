//! Exact universal generating series for Segre, Chern and Verlinde tautological
//! integrals over Hilbert schemes of points on surfaces.
//!
//! * [`series`], [`biseries`], [`algebraic`]: exact truncated power-series arithmetic.
//! * [`universal`]: the catalog of closed-form universal series and their assembly.
//! * [`verify`]: exact checks of the coefficient identities the closed forms imply.
//! * [`oracle`]: torus localization on toric surfaces as independent ground truth.
//! * [`extract`]: recovery of the universal series from oracle integrals.

pub mod algebraic;
pub mod biseries;
pub mod error;
pub mod extract;
pub mod oracle;
pub mod rational;
pub mod series;
pub mod universal;
pub mod verify;

pub use error::{Error, Result};
pub use rational::Q;
pub use series::{Series, Var};
