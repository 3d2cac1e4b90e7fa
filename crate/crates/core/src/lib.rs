//! Construction and certification of the nine-block partition of the E8
//! norm-4 shell and its stabilizer `2.A9` inside Aut(E8).

#![allow(clippy::needless_range_loop)]

pub mod autgroup;
pub mod cert;
pub mod cli;
pub mod error;
pub mod f2;
pub mod frames;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod norm4;
pub mod perm;
pub mod pipeline;
pub mod spread;

pub use autgroup::{Isometry, PermutationGroup};
pub use cert::Certificate;
pub use error::{Error, Result};
pub use f2::{F2Geometry, F2Subspace, F2Vector, SpaceClass};
pub use frames::{Frame, FrameArray};
pub use lattice::{Lattice, LatticeVector, RootPair, Shells};
pub use norm4::{Norm4Block, Norm4Partition};
pub use perm::Perm;
pub use spread::Spread;
