//! Image decoding, P6 PPM encoding, synthetic stripe generation, and
//! swatch rendering.
//!
//! P6 is the bit-exact fixture format: the writer emits exactly
//! `P6\n<w> <h>\n255\n` followed by raw RGB bytes. PNG and JPEG decoding
//! delegate to the `image` crate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::channel::ChannelId;
use crate::error::{Error, Result};
use crate::eval::ChannelReport;

/// Fixed width of rendered swatches.
pub const SWATCH_WIDTH: u32 = 512;

/// An 8-bit RGB image in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    data: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: u32, height: u32, data: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidSpec(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width as usize * height as usize {
            return Err(Error::InvalidSpec(format!(
                "pixel buffer holds {} entries, expected {}",
                data.len(),
                width as usize * height as usize
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.data
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        self.data[y as usize * self.width as usize + x as usize]
    }
}

/// Format selector for [`decode_image`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FormatHint {
    Ppm,
    Png,
    Jpeg,
    #[default]
    Auto,
}

fn sniff_format(bytes: &[u8]) -> Result<FormatHint> {
    if bytes.starts_with(b"P6") {
        Ok(FormatHint::Ppm)
    } else if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        Ok(FormatHint::Png)
    } else if bytes.starts_with(&[0xFF, 0xD8]) {
        Ok(FormatHint::Jpeg)
    } else {
        Err(Error::UnsupportedFormat {
            offset: 0,
            reason: "no P6/PNG/JPEG signature".into(),
        })
    }
}

fn skip_ppm_separators(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() {
        match bytes[*pos] {
            b' ' | b'\t' | b'\r' | b'\n' => *pos += 1,
            b'#' => {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
            }
            _ => return,
        }
    }
}

fn read_ppm_number(bytes: &[u8], pos: &mut usize) -> Result<u32> {
    skip_ppm_separators(bytes, pos);
    let start = *pos;
    let mut value: u64 = 0;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        value = value * 10 + (bytes[*pos] - b'0') as u64;
        if value > u32::MAX as u64 {
            return Err(Error::CorruptData {
                offset: start,
                reason: "header number overflows".into(),
            });
        }
        *pos += 1;
    }
    if *pos == start {
        return Err(Error::CorruptData {
            offset: start,
            reason: "expected an ASCII decimal in header".into(),
        });
    }
    Ok(value as u32)
}

fn decode_ppm(bytes: &[u8]) -> Result<RgbImage> {
    if !bytes.starts_with(b"P6") {
        return Err(Error::UnsupportedFormat {
            offset: 0,
            reason: "only binary P6 pixmaps are supported".into(),
        });
    }
    let mut pos = 2;
    let width = read_ppm_number(bytes, &mut pos)?;
    let height = read_ppm_number(bytes, &mut pos)?;
    let dims_offset = pos;
    let maxval_offset = {
        let mut p = pos;
        skip_ppm_separators(bytes, &mut p);
        p
    };
    let maxval = read_ppm_number(bytes, &mut pos)?;
    if maxval != 255 {
        return Err(Error::UnsupportedFormat {
            offset: maxval_offset,
            reason: format!("maxval {maxval} unsupported, must be 255"),
        });
    }
    if width == 0 || height == 0 {
        return Err(Error::CorruptData {
            offset: dims_offset,
            reason: format!("zero dimension {width}x{height}"),
        });
    }
    // exactly one whitespace byte between maxval and the payload
    if pos >= bytes.len() || !matches!(bytes[pos], b' ' | b'\t' | b'\r' | b'\n') {
        return Err(Error::CorruptData {
            offset: pos,
            reason: "missing whitespace before payload".into(),
        });
    }
    pos += 1;
    let expected = width as usize * height as usize * 3;
    let payload = &bytes[pos..];
    if payload.len() < expected {
        return Err(Error::CorruptData {
            offset: bytes.len(),
            reason: format!(
                "payload truncated: expected {expected} bytes, found {}",
                payload.len()
            ),
        });
    }
    let data: Vec<[u8; 3]> = payload[..expected]
        .chunks_exact(3)
        .map(|c| [c[0], c[1], c[2]])
        .collect();
    RgbImage::new(width, height, data)
}

fn decode_with_image_crate(bytes: &[u8], format: image::ImageFormat) -> Result<RgbImage> {
    let decoded =
        image::load_from_memory_with_format(bytes, format).map_err(|e| Error::CorruptData {
            offset: 0,
            reason: e.to_string(),
        })?;
    let rgb = decoded.to_rgb8();
    let (width, height) = rgb.dimensions();
    let data: Vec<[u8; 3]> = rgb.pixels().map(|p| p.0).collect();
    RgbImage::new(width, height, data)
}

/// Decodes PPM (P6), PNG, or JPEG bytes into an 8-bit RGB image. Grayscale
/// sources are replicated across channels and alpha is discarded.
pub fn decode_image(bytes: &[u8], hint: FormatHint) -> Result<RgbImage> {
    if bytes.is_empty() {
        return Err(Error::CorruptData {
            offset: 0,
            reason: "empty input".into(),
        });
    }
    let format = match hint {
        FormatHint::Auto => sniff_format(bytes)?,
        other => other,
    };
    match format {
        FormatHint::Ppm => decode_ppm(bytes),
        FormatHint::Png => decode_with_image_crate(bytes, image::ImageFormat::Png),
        FormatHint::Jpeg => decode_with_image_crate(bytes, image::ImageFormat::Jpeg),
        FormatHint::Auto => unreachable!("auto resolved above"),
    }
}

/// Serializes an image as binary P6: `P6\n<w> <h>\n255\n` + raw RGB bytes.
pub fn write_ppm(image: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.reserve(image.data.len() * 3);
    for px in &image.data {
        out.extend_from_slice(px);
    }
    out
}

/// One vertical stripe of a synthetic image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stripe {
    pub color: [u8; 3],
    pub fraction: f64,
}

/// Declarative description of a synthetic test image with known
/// composition: vertical stripes plus optional seeded Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionSpec {
    pub stripes: Vec<Stripe>,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl CompositionSpec {
    pub fn validate(&self) -> Result<()> {
        if self.stripes.is_empty() {
            return Err(Error::InvalidSpec("no stripes".into()));
        }
        let sum: f64 = self.stripes.iter().map(|s| s.fraction).sum();
        if !(sum - 1.0).abs().is_finite() || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!(
                "stripe fractions sum to {sum}, expected 1"
            )));
        }
        if self.stripes.iter().any(|s| s.fraction <= 0.0) {
            return Err(Error::InvalidSpec("stripe fractions must be positive".into()));
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "noise_sigma {} must be finite and non-negative",
                self.noise_sigma
            )));
        }
        Ok(())
    }

    /// Column count per stripe by the largest-remainder rule; sums to
    /// `width` exactly.
    pub fn column_widths(&self, width: u32) -> Vec<u32> {
        let quotas: Vec<f64> = self
            .stripes
            .iter()
            .map(|s| s.fraction * width as f64)
            .collect();
        let mut widths: Vec<u32> = quotas.iter().map(|q| q.floor() as u32).collect();
        let assigned: u32 = widths.iter().sum();
        let mut order: Vec<usize> = (0..quotas.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = quotas[a] - quotas[a].floor();
            let rb = quotas[b] - quotas[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &i in order.iter().take((width - assigned) as usize) {
            widths[i] += 1;
        }
        widths
    }
}

fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

/// Renders the composition as vertical stripes, left to right. With
/// `noise_sigma > 0` every component gets independent seeded Gaussian
/// noise, rounded half-up and clamped to [0, 255]. Deterministic: equal
/// inputs produce identical images.
pub fn generate_stripes(spec: &CompositionSpec, width: u32, height: u32) -> Result<RgbImage> {
    spec.validate()?;
    if width == 0 || height == 0 {
        return Err(Error::InvalidSpec(format!(
            "image dimensions must be positive, got {width}x{height}"
        )));
    }
    if (width as u64 * height as u64) < spec.stripes.len() as u64 {
        return Err(Error::InvalidSpec(format!(
            "{} pixels cannot hold {} stripes",
            width as u64 * height as u64,
            spec.stripes.len()
        )));
    }

    let widths = spec.column_widths(width);
    let mut column_color = Vec::with_capacity(width as usize);
    for (stripe, &w) in spec.stripes.iter().zip(&widths) {
        column_color.extend(std::iter::repeat_n(stripe.color, w as usize));
    }
    debug_assert_eq!(column_color.len(), width as usize);

    let mut data = Vec::with_capacity(width as usize * height as usize);
    for _ in 0..height {
        data.extend_from_slice(&column_color);
    }

    if spec.noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let normal = Normal::new(0.0, spec.noise_sigma)
            .map_err(|e| Error::InvalidSpec(format!("bad noise sigma: {e}")))?;
        for px in &mut data {
            for c in px.iter_mut() {
                let noisy = round_half_up(*c as f64 + normal.sample(&mut rng));
                *c = noisy.clamp(0.0, 255.0) as u8;
            }
        }
    }

    RgbImage::new(width, height, data)
}

fn channel_tint(channel: ChannelId, value: u8) -> [u8; 3] {
    match channel {
        ChannelId::Red => [value, 0, 0],
        ChannelId::Green => [0, value, 0],
        ChannelId::Blue => [0, 0, value],
    }
}

/// Renders per-channel reports as stacked horizontal bands: one band per
/// channel, each dominant value drawn in that channel's tint with a block
/// width proportional to its percentage.
pub fn render_swatch(reports: &[ChannelReport], bar_height: u32) -> Result<RgbImage> {
    if reports.is_empty() || reports.iter().any(|r| r.colors.is_empty()) {
        return Err(Error::EmptyReport);
    }
    if bar_height == 0 {
        return Err(Error::InvalidConfig("bar_height must be positive".into()));
    }

    let mut data = Vec::with_capacity((SWATCH_WIDTH * bar_height) as usize * reports.len());
    for report in reports {
        let total_pct: f64 = report.colors.iter().map(|c| c.percent).sum();
        let spec = CompositionSpec {
            stripes: report
                .colors
                .iter()
                .map(|c| Stripe {
                    color: channel_tint(report.channel, c.rounded_value()),
                    fraction: c.percent / total_pct,
                })
                .collect(),
            noise_sigma: 0.0,
            seed: 0,
        };
        let widths = spec.column_widths(SWATCH_WIDTH);
        let mut row = Vec::with_capacity(SWATCH_WIDTH as usize);
        for (stripe, &w) in spec.stripes.iter().zip(&widths) {
            row.extend(std::iter::repeat_n(stripe.color, w as usize));
        }
        for _ in 0..bar_height {
            data.extend_from_slice(&row);
        }
    }
    RgbImage::new(SWATCH_WIDTH, bar_height * reports.len() as u32, data)
}
