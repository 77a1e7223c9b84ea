//! Frequency-domain modeling of real camera degradation.
//!
//! The crate covers the full loop from optics to learned synthesis:
//!
//! * [`camera`]: thin-lens geometry, sensor sampling rates, and the
//!   object-plane frequency bookkeeping everything else relies on.
//! * [`spectral`]: unitary 2-D FFTs, log-magnitude transfer ratios between
//!   matched image pairs, polar resampling into radial profiles, and -3 dB
//!   cutoff detection on those profiles.
//! * [`degradation`]: Butterworth low-pass filtering, decimation, and read
//!   noise; composed they synthesize a low-resolution image from a sharp one.
//! * [`predictor`]: a ridge regressor that maps the radial log-magnitude
//!   spectrum of a degraded patch to the cutoff frequency of the transfer
//!   that produced it, so single images can be labeled without a sharp
//!   counterpart.
//! * [`simulator`]: a thin-lens capture simulator with analytic ground truth,
//!   used to validate the estimation/synthesis loop end to end.
//! * [`metrics`]: PSNR and SSIM for dataset evaluation.
//!
//! Pixels are `f64` in `[0, 1]` everywhere; 8-bit quantization happens only
//! at file boundaries ([`imageio`]). Physical lengths are millimeters, pixel
//! pitch is entered in micrometers, physical frequencies are cycles/mm, and
//! digital frequencies are cycles/sample; conversions live in [`camera`].
//!
//! Every operation is deterministic given its seed, at any parallelism
//! level: the `parallel` feature (on by default) runs independent work items
//! through rayon with order-preserving collection, and all floating-point
//! reductions keep a fixed order.

pub mod camera;
pub mod degradation;
pub mod error;
pub mod imageio;
pub mod metrics;
pub mod parallel;
pub mod predictor;
pub mod resample;
pub mod simulator;
pub mod spectral;

pub use error::{Error, Result};
