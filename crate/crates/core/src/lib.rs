//! Exact finite-group computations behind Siegel level-`p^2` fixed vectors of
//! `GSp(4)`: finite fields, cyclotomic integers, the finite symplectic
//! similitude group and its subgroup `M`, conjugacy-class labels, character
//! tables and the fixed-vector / Atkin-Lehner formulas, with brute-force
//! oracles for small `q`.

pub mod chartab;
pub mod classlabel;
pub mod cyclo;
pub mod ffield;
pub mod fixvec;
pub mod gsp4core;
pub(crate) mod linalg;
pub mod par;
pub mod reptables;

pub use chartab::{CharFamily, CharId, CharTable};
pub use classlabel::{ClassLabel, Family, Scheme};
pub use cyclo::CycloNum;
pub use ffield::{FieldElem, FieldSpec};
pub use gsp4core::{GroupElem, Gsp4};
pub use par::Exec;
