#![allow(clippy::needless_range_loop)]

pub mod bridge;
pub mod cohomology;
pub mod correspondence;
pub mod descendents;
pub mod dsl;
pub mod error;
pub mod kmatrix;
pub mod partitions;
pub mod scalars;
pub mod selftest;
pub mod textfmt;

pub use error::{Error, ParseError, Result};
pub use scalars::*;
