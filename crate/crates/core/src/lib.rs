//! Dynamic color palette framebuffer compression.
//!
//! A frequent-values collector ([`fvc`]) learns each frame's dominant colors;
//! the next frame's 8x8 blocks are coded against that palette ([`codec`]).
//! [`bandwidth`] turns coded sizes into 128-bit DRAM bursts, and [`engine`]
//! drives whole traces. RAS, RED and the VDCP/RAS hybrid are included for
//! comparison.
//!
//! ```
//! use dcp::codec::Scheme;
//! use dcp::engine::{run_trace, RunConfig};
//! use dcp::surface::Frame;
//! use dcp::trace::{Category, SurfaceTrace};
//!
//! let frame = Frame::filled(64, 64, 0xFFFF_FFFF).unwrap();
//! let trace = SurfaceTrace::new("white", Category::Synthetic, vec![frame; 3]).unwrap();
//! let result = run_trace(&trace, &RunConfig::for_scheme(Scheme::Vdcp)).unwrap();
//! assert!(result.summary.rate > 10.0);
//! ```

pub mod bandwidth;
pub mod bits;
pub mod codec;
pub mod coherence;
pub mod config;
pub mod container;
pub mod engine;
pub mod error;
pub mod fvc;
pub mod palette;
pub mod report;
pub mod rng;
pub mod surface;
pub mod synth;
pub mod trace;

pub use error::{Error, Result};
