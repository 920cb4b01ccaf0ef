//! Sparse mm-wave beam discovery from linear-block-code measurement designs.
//!
//! The receiver measures a sparse angular channel through multi-armed beams
//! whose arm patterns are the rows of a parity-check matrix. The stacked
//! measurements form a *channel syndrome* `y_s = H q^a`; because any few
//! columns of a good code's parity check stay independent over the complex
//! field, the syndrome pins down the channel exactly, and a least-squares
//! search over candidate supports (or a look-up table) inverts it. Encoding
//! syndromes with a second code trades extra measurements for l2 distance
//! between candidate syndromes, which buys noise resilience.
//!
//! Modules follow the pipeline:
//!
//! - [`gf2`] / [`codes`]: bit-packed GF(2) algebra and the code registry.
//! - [`channel`]: spatial signatures, DFT bases, sparse channel sampling.
//! - [`measure`]: beamformer synthesis, AWGN, mid-tread ADC quantization.
//! - [`mapping`]: syndrome-to-channel decoding (search and look-up table).
//! - [`discovery`]: the full two-sided sweep.
//! - [`sim`]: Monte Carlo harness with CSV/JSON output.
//!
//! Numeric code is generic over the [`scalar::Real`] scalar (`f32` or `f64`);
//! the aliases below fix the common double-precision instantiations.

pub mod channel;
pub mod codes;
pub mod discovery;
pub mod error;
pub mod gf2;
pub mod linalg;
pub mod mapping;
pub mod measure;
pub mod scalar;
pub mod sim;
pub mod util;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

/// Complex double: the default simulation scalar.
pub type C64 = Cx<f64>;
/// Complex single.
pub type C32 = Cx<f32>;

pub type Mat64 = linalg::Mat<f64>;
pub type CMat64 = linalg::Mat<C64>;
pub type AngularChannel64 = channel::AngularChannel<f64>;
pub type Syndrome64 = measure::Syndrome<f64>;
pub type Beamformer64 = measure::Beamformer<f64>;
pub type QuantizerSpec64 = measure::QuantizerSpec<f64>;
pub type SparseEstimate64 = mapping::SparseEstimate<f64>;
pub type SearchDecoder64 = mapping::SearchDecoder<f64>;
pub type LookupTable64 = mapping::LookupTable<f64>;
pub type DiscoveryEngine64 = discovery::DiscoveryEngine<f64>;
pub type DiscoveryResult64 = discovery::DiscoveryResult<f64>;
pub type MeasurementSetup64 = discovery::MeasurementSetup<f64>;
