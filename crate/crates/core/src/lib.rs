//! Tripartite (GHZ-channel) teleportation through Pauli noise.
//!
//! The crate covers the whole pipeline: noisy channel states and a Lindblad
//! integrator that reproduces them, the Alice/Bob/Charlie measurement protocol,
//! sphere-averaged fidelities, and three-party entanglement measures
//! (π-tangle, three-tangle with its convex roof).

pub mod channels;
pub mod convexroof;
pub mod error;
pub mod fidelity;
pub mod protocol;
pub mod qmat;
pub mod states;
pub mod tangles;
pub mod verify;

pub use channels::{channel_state, ChannelParams, NoiseKind};
pub use error::{Error, Result};
pub use qmat::{ComplexMatrix, DensityMatrix, EigDecomposition, C64};
pub use states::{BlochAngles, PureState};
pub use tangles::{Ensemble, TangleBreakdown};
