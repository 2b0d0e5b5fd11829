//! Exact quantum products from presentations of quantized D-modules.
//!
//! The stages run in order: a Gröbner basis of the left ideal in the Ore
//! algebra, the quantization check, the connection matrices in a standard
//! monomial basis, the gauge to Dubrovin form, an optional coordinate change
//! when some `|q_i| < 1`, and finally the structure constants. See
//! [`pipeline::run_pipeline`].
//!
//! Coefficients are either rational functions in `h, q` or truncated power
//! series in `q` (see [`coeff`]); everything is exact.

pub mod coeff;
pub mod matrix;
pub mod ore;
pub mod par;
pub mod parse;
pub mod connection;
pub mod gauge;
pub mod mirror;
pub mod products;
pub mod problem;
pub mod pipeline;
pub mod report;
