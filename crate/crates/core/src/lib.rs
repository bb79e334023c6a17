//! Matrix binding of additive terms (MBAT).
//!
//! A vector symbolic architecture in which objects are random ±1
//! hypervectors, collections are sums, and structure is introduced by
//! multiplying additive phrases by fixed random matrices.

pub mod binding;
pub mod capacity;
pub mod cli;
pub mod codebook;
pub mod error;
pub mod hypervector;
pub mod learn;
pub mod query;
pub mod rng;
pub mod structure;

pub use binding::{
    bind, bind_power, bound_contains, two_input_bind, BindConfig, BindingOperator, BindingRecord,
    Bindings, Normalization, Variant,
};
pub use codebook::{Codebook, CodebookFile, UnknownSymbolPolicy};
pub use error::{MbatError, Result};
pub use hypervector::{
    bundle, contains, cosine, derive_vector, dot, threshold_bipolar, Hypervector, Kind,
    RecognitionScore,
};
