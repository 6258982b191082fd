//! Group actions built on the transducer algebra: conjugation of `V_n`,
//! completions, block permutation groups, contraction and flexibility.

pub mod completion;
pub mod conjugation;
pub mod contracting;
pub mod flexibility;
pub mod perm_group;
