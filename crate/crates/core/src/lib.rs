//! Certificates for genus-2 curves that have points everywhere locally but no
//! rational divisor class of degree one.
//!
//! The crate is layered bottom-up: exact arithmetic ([`algebra`], [`poly`]),
//! sextic models ([`curve`]), local solvability ([`localpoints`]), elliptic
//! 2-descent on the bielliptic quotients ([`ellrank`]), the descent map on the
//! Jacobian ([`mudescent`]) and orchestration ([`pipeline`]).

pub mod algebra;
pub mod poly;
pub mod curve;
pub mod localpoints;
pub mod ellrank;
pub mod mudescent;
pub mod pipeline;
