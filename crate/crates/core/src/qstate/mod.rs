//! Dense linear algebra over a registry of labelled subsystems.
//!
//! States are addressed by subsystem label, never by position. The
//! registration order of a [`Registry`] fixes the tensor order of every
//! state built against it.

mod density;
mod projector;
mod registry;
mod state;

pub use density::{partial_trace, DensityMatrix};
pub use projector::{
    born_probability, embed_operator, projector_from_basis_vector, BornState, Projector,
};
pub use registry::{Registry, Subsystem};
pub use state::{tensor, StateVector};

pub type C64 = nalgebra::Complex<f64>;
