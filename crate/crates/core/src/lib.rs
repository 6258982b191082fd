//! Transducer algebra for rational homeomorphisms of Cantor space and the
//! Higman–Thompson groups `V_n`.
//!
//! Points of Cantor space are represented by eventually periodic words
//! ([`EpWord`]); clopen sets by cone antichains ([`ConeAntichain`]).

pub mod antichain;
pub mod checks;
pub mod corpus;
pub mod dot;
pub mod error;
pub mod group;
pub mod image;
pub mod inversion;
pub mod map;
pub mod machine;
pub mod prefix_map;
pub mod sync;
pub mod text;
pub mod word;

pub use antichain::ConeAntichain;
pub use error::{Error, Result};
pub use image::Budget;
pub use machine::{InitialTransducer, Minimized, StateId, Transducer};
pub use prefix_map::PrefixExchangeMap;
pub use word::{EpWord, Letter, Word};
