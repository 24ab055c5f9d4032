pub mod algebra;
pub mod ansatz;
pub mod error;
pub mod model;
pub mod radial;
pub mod spectrum;
