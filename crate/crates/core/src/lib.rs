//! Numerical functional calculus for generators of C₀-groups.
//!
//! Every routine is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases at the crate root fix the scalar to `f64`.
pub mod besov;
pub mod calculus;
pub mod dense;
pub mod error;
pub mod fft;
pub mod gridfn;
pub mod groups;
pub mod interp;
pub mod measure;
pub mod quad;
pub mod scalar;
pub mod transfer;

pub use calculus::{SectorFunction, StripFunction};
pub use dense::{CMatrix, NormEstimate};
pub use error::{Error, Result};
pub use gridfn::{GridFunction, GridSpec};
pub use groups::{GroupModel, GroupTypeEstimate};
pub use interp::InterpCouple;
pub use measure::{Density, Measure};
pub use scalar::{Exponent, Extended, Real, C};
pub use transfer::TransferKernels;

pub type C64 = C<f64>;
pub type Exponent64 = Exponent<f64>;
pub type Measure64 = Measure<f64>;
pub type GridSpec64 = GridSpec<f64>;
pub type GridFunction64 = GridFunction<f64>;
pub type CMatrix64 = CMatrix<f64>;
pub type GroupModel64 = GroupModel<f64>;
pub type StripFunction64 = StripFunction<f64>;
pub type SectorFunction64 = SectorFunction<f64>;
pub type InterpCouple64 = InterpCouple<f64>;
pub type TransferKernels64 = TransferKernels<f64>;
