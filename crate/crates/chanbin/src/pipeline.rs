//! End-to-end extraction: image -> three channel histograms -> binning ->
//! merging -> per-channel dominant color reports.

use crate::binning::{channelized_binning, BinningConfig};
use crate::channel::{split_channels, ChannelHistogram, ChannelId};
use crate::error::Result;
use crate::eval::ChannelReport;
use crate::imageio::RgbImage;
use crate::merge::{finalize_report, merge_bins, MergeConfig};

/// Configuration for the whole extraction pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExtractionConfig {
    pub binning: BinningConfig,
    pub merge: MergeConfig,
}

/// Runs binning and merging on a single channel histogram.
pub fn extract_channel(
    hist: &ChannelHistogram,
    channel: ChannelId,
    config: &ExtractionConfig,
) -> Result<ChannelReport> {
    let bins = channelized_binning(hist, &config.binning)?;
    let merged = merge_bins(bins, hist.total(), &config.merge)?;
    let colors = finalize_report(merged, hist.total(), &config.merge);
    Ok(ChannelReport { channel, colors })
}

/// Extracts dominant color pixel values for every channel, ordered red,
/// green, blue. Deterministic for identical inputs.
pub fn extract_dominant_colors(
    image: &RgbImage,
    config: &ExtractionConfig,
) -> Result<[ChannelReport; 3]> {
    let hists = split_channels(image);
    let mut reports = Vec::with_capacity(3);
    for channel in ChannelId::ALL {
        reports.push(extract_channel(&hists[channel.index()], channel, config)?);
    }
    Ok(reports.try_into().expect("three channels"))
}
