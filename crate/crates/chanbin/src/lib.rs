//! Dominant color pixel value extraction for RGB images.
//!
//! Each 8-bit channel is processed independently: the channel histogram is
//! partitioned into bins whose width adapts to the average consecutive
//! difference of the occupied values, runs of non-empty bins are re-binned
//! until no empty bins remain, and small nearby bins are merged. The result
//! is a handful of `(pixel value, percentage)` pairs per channel, with no
//! up-front guess of how many colors an image contains.
//!
//! The crate also ships a weighted 1-D Lloyd quantizer as the conventional
//! baseline, a synthetic stripe-image generator for ground-truth testing,
//! and a mean-Euclidean-distance error metric between estimated and actual
//! color sets.

pub mod binning;
pub mod channel;
pub mod error;
pub mod eval;
pub mod gla;
pub mod imageio;
pub mod merge;
pub mod pipeline;
pub mod report;

pub use binning::{channelized_binning, BinningConfig};
pub use channel::{split_channels, ChannelHistogram, ChannelId, RhoMode};
pub use error::{Error, Result};
pub use eval::{epsilon, image_epsilon, ChannelReport, ErrorReport};
pub use gla::{compare_methods, lloyd_quantize, GlaConfig, GlaInit};
pub use imageio::{
    decode_image, generate_stripes, render_swatch, write_ppm, CompositionSpec, FormatHint,
    RgbImage, Stripe,
};
pub use merge::{merge_bins, DominantColor, MergeConfig};
pub use pipeline::{extract_dominant_colors, ExtractionConfig};
pub use report::ResultDocument;
