//! Serializable result documents for the CLI surface.

use serde::{Deserialize, Serialize, Serializer};

use crate::channel::{ChannelId, RhoMode};
use crate::error::{Error, Result};
use crate::eval::ErrorReport;
use crate::merge::DominantColor;
use crate::pipeline::ExtractionConfig;
use crate::{binning::BinningConfig, eval::ChannelReport, merge::MergeConfig};

pub const SCHEMA_VERSION: u32 = 1;

fn serialize_value_number<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.fract() == 0.0 && x.is_finite() && *x >= 0.0 {
        s.serialize_u64(*x as u64)
    } else {
        s.serialize_f64(*x)
    }
}

/// One `(value, percent)` entry. `value` serializes as an integer whenever
/// it is integral, matching the rounded default output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColorEntry {
    #[serde(serialize_with = "serialize_value_number")]
    pub value: f64,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinningDoc {
    pub rho_mode: String,
    pub max_recursion_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeDoc {
    pub thresh_count_pct: f64,
    pub thresh_distance: f64,
    pub contig_distance: f64,
    pub max_colors: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigDoc {
    pub binning: BinningDoc,
    pub merge: MergeDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelsDoc {
    pub red: Vec<ColorEntry>,
    pub green: Vec<ColorEntry>,
    pub blue: Vec<ColorEntry>,
}

impl ChannelsDoc {
    pub fn get(&self, channel: ChannelId) -> &[ColorEntry] {
        match channel {
            ChannelId::Red => &self.red,
            ChannelId::Green => &self.green,
            ChannelId::Blue => &self.blue,
        }
    }
}

/// Extraction result of one image, the primary CLI output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema_version: u32,
    pub image: String,
    pub config: ConfigDoc,
    pub channels: ChannelsDoc,
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn entries(report: &ChannelReport, full_precision: bool) -> Vec<ColorEntry> {
    report
        .colors
        .iter()
        .map(|c| {
            if full_precision {
                ColorEntry {
                    value: c.value,
                    percent: c.percent,
                }
            } else {
                ColorEntry {
                    value: c.rounded_value() as f64,
                    percent: round2(c.percent),
                }
            }
        })
        .collect()
}

fn rho_mode_name(mode: RhoMode) -> &'static str {
    match mode {
        RhoMode::Distinct => "distinct",
        RhoMode::AllPixels => "all",
    }
}

impl ResultDocument {
    pub fn new(
        image: &str,
        config: &ExtractionConfig,
        reports: &[ChannelReport; 3],
        full_precision: bool,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            image: image.to_string(),
            config: ConfigDoc {
                binning: BinningDoc {
                    rho_mode: rho_mode_name(config.binning.rho_mode).to_string(),
                    max_recursion_depth: config.binning.max_recursion_depth,
                },
                merge: MergeDoc {
                    thresh_count_pct: config.merge.thresh_count_pct,
                    thresh_distance: config.merge.thresh_distance,
                    contig_distance: config.merge.contig_distance,
                    max_colors: config.merge.max_colors,
                },
            },
            channels: ChannelsDoc {
                red: entries(&reports[0], full_precision),
                green: entries(&reports[1], full_precision),
                blue: entries(&reports[2], full_precision),
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ResultDocument =
            serde_json::from_str(text).map_err(|e| Error::SchemaMismatch(e.to_string()))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::SchemaMismatch(format!(
                "schema_version {} unsupported, expected {SCHEMA_VERSION}",
                doc.schema_version
            )));
        }
        Ok(doc)
    }

    /// Lines of `channel,value,percent`, header included.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("channel,value,percent\n");
        for channel in ChannelId::ALL {
            for entry in self.channels.get(channel) {
                out.push_str(&format!(
                    "{},{},{}\n",
                    channel.name(),
                    entry.value,
                    entry.percent
                ));
            }
        }
        out
    }

    pub fn channel_reports(&self) -> [ChannelReport; 3] {
        ChannelId::ALL.map(|channel| ChannelReport {
            channel,
            colors: self
                .channels
                .get(channel)
                .iter()
                .map(|e| DominantColor {
                    value: e.value,
                    percent: e.percent,
                })
                .collect(),
        })
    }

    /// Reconstructs the extraction config the document echoes.
    pub fn extraction_config(&self) -> Result<ExtractionConfig> {
        let rho_mode = match self.config.binning.rho_mode.as_str() {
            "distinct" => RhoMode::Distinct,
            "all" => RhoMode::AllPixels,
            other => {
                return Err(Error::SchemaMismatch(format!("unknown rho_mode {other:?}")));
            }
        };
        Ok(ExtractionConfig {
            binning: BinningConfig {
                rho_mode,
                max_recursion_depth: self.config.binning.max_recursion_depth,
            },
            merge: MergeConfig {
                thresh_count_pct: self.config.merge.thresh_count_pct,
                thresh_distance: self.config.merge.thresh_distance,
                contig_distance: self.config.merge.contig_distance,
                max_colors: self.config.merge.max_colors,
            },
        })
    }
}

/// Evaluation output document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalDocument {
    pub schema_version: u32,
    pub per_channel: PerChannelDoc,
    pub image_epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerChannelDoc {
    pub red: ChannelEpsilonDoc,
    pub green: ChannelEpsilonDoc,
    pub blue: ChannelEpsilonDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelEpsilonDoc {
    pub epsilon: f64,
    pub matched_pairs: Vec<(usize, usize)>,
    pub unmatched_estimated: usize,
    pub unmatched_actual: usize,
}

impl EvalDocument {
    pub fn new(report: &ErrorReport) -> Self {
        let conv = |s: &crate::eval::ChannelErrorStats| ChannelEpsilonDoc {
            epsilon: s.epsilon,
            matched_pairs: s.matched_pairs.clone(),
            unmatched_estimated: s.unmatched_estimated,
            unmatched_actual: s.unmatched_actual,
        };
        Self {
            schema_version: SCHEMA_VERSION,
            per_channel: PerChannelDoc {
                red: conv(&report.per_channel.red),
                green: conv(&report.per_channel.green),
                blue: conv(&report.per_channel.blue),
            },
            image_epsilon: report.image_epsilon,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }
}

/// Comparison output document for one image.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareDocument {
    pub schema_version: u32,
    pub image: String,
    pub k: usize,
    pub channels: CompareChannelsDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareChannelsDoc {
    pub red: CompareChannelDoc,
    pub green: CompareChannelDoc,
    pub blue: CompareChannelDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareChannelDoc {
    pub binning: Vec<ColorEntry>,
    pub gla: Vec<ColorEntry>,
    /// Color count the binning pipeline discovered without being told.
    pub binning_k: usize,
    pub binning_ms: f64,
    pub gla_ms: f64,
}

impl CompareDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }
}
