//! Secure minimum-storage regenerating codes over finite fields.
//!
//! The crate builds product-matrix MSR codes (and their concatenated vector
//! variants), repairs and reconstructs them exactly, measures what an
//! `(l1, l2)` eavesdropper learns by computing ranks of symbolic observation
//! rows, and pre-codes data with a Gabidulin (MRD) layer so that the stored
//! secret leaks nothing.

pub mod field;
pub mod matrix;
mod poly;
pub mod pmmsr;
pub mod entropy;
pub mod capacity;
pub mod secrecy;
pub mod harness;
