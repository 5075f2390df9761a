//! Coded data dissemination over directed broadcast networks.
//!
//! Everything is generic over a prime field [`Field`]; the aliases below name
//! the fields the command line supports.

pub mod bounds;
pub mod error;
pub mod field;
pub mod instance;
pub mod multiround;
pub mod network;
pub mod one_round;
pub mod sim;
pub mod star;

pub use error::{Error, Result};
pub use field::{Field, FieldMatrix, Fp};
pub use instance::{DisseminationInstance, SideInfoGraph};
pub use multiround::{MultiRoundScheme, Strategy};
pub use network::DirectedNetwork;
pub use one_round::{OneRoundResult, SearchCaps, SolveMethod, TransmissionScheme};
pub use sim::Transcript;
pub use star::{IntMatrix, StarEntry, StarMatrix};

pub type Gf2 = Fp<2>;
pub type Gf3 = Fp<3>;
pub type Gf5 = Fp<5>;
pub type Gf7 = Fp<7>;
pub type Gf11 = Fp<11>;
pub type Gf13 = Fp<13>;

pub type Gf2Matrix = FieldMatrix<Gf2>;
pub type Gf2Star = StarMatrix<Gf2>;
