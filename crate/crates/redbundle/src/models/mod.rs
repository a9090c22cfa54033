//! Concrete mechanical systems assembled on canonical extended phase spaces.
//!
//! Two families ship with the crate:
//!
//! * [`oscillator`] — a planar oscillator with time-dependent damping and
//!   stiffness, rotationally symmetric about the origin. Comes in Cartesian
//!   and polar charts with the exact transition map, and reduces along the
//!   angular momentum to a one-degree-of-freedom radial system.
//! * [`heavytop`] — a rigid body with a fixed point in a gravity field whose
//!   strength may vary in time, symmetric under rotation about the space
//!   vertical. Comes as a quaternion ordinary-differential-equation system,
//!   as a Z-X-Z Euler chart on the extended phase space, and as a reduced
//!   spherical-pendulum-type system on the unit sphere.
//!
//! Both expose assembled bundles, Hamiltonian sections, symmetry actions,
//! momentum maps, and sampling boxes, so the verification suites can treat
//! them uniformly.

pub mod coeff;
pub mod heavytop;
pub mod oscillator;
pub mod so3;

pub use coeff::Coeff;
pub use heavytop::HeavyTop;
pub use oscillator::Oscillator;
