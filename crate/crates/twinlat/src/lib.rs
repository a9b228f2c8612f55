//! Affine twin buildings of types A, B, C and D realized as periodic flags of
//! lattices in `F_q[z, 1/z]^R`, with checkers for the building and twin
//! building axioms.

pub mod apartments;
pub mod error;
pub mod exactfield;
pub mod field;
pub mod flags;
pub mod forms;
pub mod laurent;
pub mod verify;
pub mod weyl;

pub use error::Error;
pub use field::{Field, Fp};

pub type F2 = Fp<2>;
pub type F3 = Fp<3>;
pub type F5 = Fp<5>;
pub type F7 = Fp<7>;
pub type F11 = Fp<11>;
pub type F13 = Fp<13>;

pub type MatrixF2 = exactfield::FieldMatrix<F2>;
pub type MatrixF3 = exactfield::FieldMatrix<F3>;
pub type LatticeF2 = laurent::PeriodicSubspace<F2>;
pub type LatticeF3 = laurent::PeriodicSubspace<F3>;


