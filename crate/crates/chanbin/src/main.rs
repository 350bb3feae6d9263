use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use chanbin::binning::BinningConfig;
use chanbin::channel::{split_channels, ChannelId, RhoMode};
use chanbin::error::Error;
use chanbin::eval::image_epsilon;
use chanbin::gla::{compare_methods, ComparisonRecord, GlaConfig, GlaInit};
use chanbin::imageio::{decode_image, generate_stripes, render_swatch, write_ppm, CompositionSpec, FormatHint};
use chanbin::merge::MergeConfig;
use chanbin::pipeline::{extract_dominant_colors, ExtractionConfig};
use chanbin::report::{
    ColorEntry, CompareChannelDoc, CompareChannelsDoc, CompareDocument, EvalDocument,
    ResultDocument, SCHEMA_VERSION,
};

#[derive(Parser)]
#[command(
    name = "chanbin",
    version,
    about = "Extract dominant color pixel values per RGB channel"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum RhoModeArg {
    #[default]
    Distinct,
    All,
}

impl From<RhoModeArg> for RhoMode {
    fn from(arg: RhoModeArg) -> Self {
        match arg {
            RhoModeArg::Distinct => RhoMode::Distinct,
            RhoModeArg::All => RhoMode::AllPixels,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Extract dominant color pixel values from an image
    Extract {
        image: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        rho_mode: RhoModeArg,
        /// Merge threshold on bin count, percent of channel pixels
        #[arg(long, default_value_t = 5.0)]
        thresh_count_pct: f64,
        /// Merge threshold on adjacent centroid distance
        #[arg(long, default_value_t = 40.0)]
        thresh_distance: f64,
        /// Cap on reported colors per channel; 0 disables the cap
        #[arg(long, default_value_t = 8)]
        max_colors: usize,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
        /// Write the document here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep exact centroids and percentages instead of rounding
        #[arg(long)]
        full_precision: bool,
    },
    /// Generate a synthetic stripe image from a composition spec
    Generate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        width: u32,
        #[arg(long)]
        height: u32,
        /// Write the PPM here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the error between an estimated and an actual result document
    Evaluate {
        #[arg(long)]
        estimated: PathBuf,
        #[arg(long)]
        actual: PathBuf,
    },
    /// Run binning and the Lloyd baseline side by side
    Compare {
        image: PathBuf,
        /// Cluster count the baseline must be told
        #[arg(long)]
        k: usize,
        /// Use seeded random centroid initialization for the baseline
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Render a result document as a color swatch image
    Swatch {
        result: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 32)]
        bar_height: u32,
    },
}

/// Failure with the process exit code it maps to: 1 for runtime/data
/// errors, 2 for usage errors.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidSpec(_) | Error::InvalidConfig(_) | Error::SchemaMismatch(_) => 2,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => {
            fs::write(p, bytes).map_err(|e| Failure::runtime(format!("{}: {e}", p.display())))
        }
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::runtime(format!("stdout: {e}"))),
    }
}

fn load_image(path: &Path) -> Result<chanbin::imageio::RgbImage, Failure> {
    let bytes = read_file(path)?;
    decode_image(&bytes, FormatHint::Auto)
        .map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))
}

fn load_result_document(path: &Path) -> Result<ResultDocument, Failure> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|e| Failure::usage(format!("{}: not UTF-8: {e}", path.display())))?;
    ResultDocument::from_json(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn run_extract(
    image_path: &Path,
    config: &ExtractionConfig,
    format: OutputFormat,
    out: Option<&Path>,
    full_precision: bool,
) -> Result<(), Failure> {
    config.merge.validate()?;
    let image = load_image(image_path)?;
    let reports = extract_dominant_colors(&image, config)
        .map_err(|e| Failure::runtime(format!("{}: {e}", image_path.display())))?;
    let doc = ResultDocument::new(
        &image_path.display().to_string(),
        config,
        &reports,
        full_precision,
    );
    let rendered = match format {
        OutputFormat::Json => doc.to_json(),
        OutputFormat::Csv => doc.to_csv(),
    };
    write_output(out, rendered.as_bytes())
}

fn run_generate(
    spec_path: &Path,
    width: u32,
    height: u32,
    out: Option<&Path>,
) -> Result<(), Failure> {
    if width == 0 || height == 0 {
        return Err(Failure::usage(format!(
            "width and height must be positive, got {width}x{height}"
        )));
    }
    let bytes = read_file(spec_path)?;
    let spec: CompositionSpec = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::usage(format!("{}: {e}", spec_path.display())))?;
    let image = generate_stripes(&spec, width, height)?;
    write_output(out, &write_ppm(&image))
}

fn run_evaluate(estimated_path: &Path, actual_path: &Path) -> Result<(), Failure> {
    let estimated = load_result_document(estimated_path)?;
    let actual = load_result_document(actual_path)?;
    let report = image_epsilon(&estimated.channel_reports(), &actual.channel_reports())
        .map_err(|e| Failure::usage(e.to_string()))?;
    write_output(None, EvalDocument::new(&report).to_json().as_bytes())
}

fn compare_entries(report: &chanbin::eval::ChannelReport) -> Vec<ColorEntry> {
    report
        .colors
        .iter()
        .map(|c| ColorEntry {
            value: c.rounded_value() as f64,
            percent: (c.percent * 100.0).round() / 100.0,
        })
        .collect()
}

fn compare_channel_doc(record: &ComparisonRecord) -> CompareChannelDoc {
    CompareChannelDoc {
        binning: compare_entries(&record.binning),
        gla: compare_entries(&record.gla),
        binning_k: record.binning_k,
        binning_ms: record.binning_time.as_secs_f64() * 1e3,
        gla_ms: record.gla_time.as_secs_f64() * 1e3,
    }
}

fn run_compare(image_path: &Path, k: usize, seed: Option<u64>) -> Result<(), Failure> {
    let image = load_image(image_path)?;
    let hists = split_channels(&image);
    let gla_cfg = GlaConfig {
        init: match seed {
            Some(_) => GlaInit::SeededRandom,
            None => GlaInit::UniformSpread,
        },
        seed: seed.unwrap_or(0),
        ..GlaConfig::new(k)
    };
    let mut records = Vec::with_capacity(3);
    for channel in ChannelId::ALL {
        records.push(compare_methods(
            &hists[channel.index()],
            channel,
            &BinningConfig::default(),
            &MergeConfig::default(),
            &gla_cfg,
        )?);
    }
    let doc = CompareDocument {
        schema_version: SCHEMA_VERSION,
        image: image_path.display().to_string(),
        k,
        channels: CompareChannelsDoc {
            red: compare_channel_doc(&records[0]),
            green: compare_channel_doc(&records[1]),
            blue: compare_channel_doc(&records[2]),
        },
    };
    write_output(None, doc.to_json().as_bytes())
}

fn run_swatch(result_path: &Path, out: &Path, bar_height: u32) -> Result<(), Failure> {
    if bar_height == 0 {
        return Err(Failure::usage("bar-height must be positive"));
    }
    let doc = load_result_document(result_path)?;
    let reports = doc.channel_reports();
    let swatch = render_swatch(&reports, bar_height)
        .map_err(|e| Failure::usage(format!("{}: {e}", result_path.display())))?;
    write_output(Some(out), &write_ppm(&swatch))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Extract {
            image,
            rho_mode,
            thresh_count_pct,
            thresh_distance,
            max_colors,
            format,
            out,
            full_precision,
        } => {
            let config = ExtractionConfig {
                binning: BinningConfig {
                    rho_mode: rho_mode.into(),
                    ..BinningConfig::default()
                },
                merge: MergeConfig {
                    thresh_count_pct,
                    thresh_distance,
                    max_colors: (max_colors > 0).then_some(max_colors),
                    ..MergeConfig::default()
                },
            };
            run_extract(&image, &config, format, out.as_deref(), full_precision)
        }
        Command::Generate {
            spec,
            width,
            height,
            out,
        } => run_generate(&spec, width, height, out.as_deref()),
        Command::Evaluate { estimated, actual } => run_evaluate(&estimated, &actual),
        Command::Compare { image, k, seed } => run_compare(&image, k, seed),
        Command::Swatch {
            result,
            out,
            bar_height,
        } => run_swatch(&result, &out, bar_height),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(failure) = run(cli) {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}
