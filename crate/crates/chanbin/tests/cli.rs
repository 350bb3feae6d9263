//! End-to-end tests of the command-line surface: flags, exit codes, and
//! output formats.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use chanbin::channel::ChannelId;
use chanbin::imageio::{generate_stripes, write_ppm, CompositionSpec, Stripe};
use chanbin::report::ResultDocument;

use common::known_composition;

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chanbin"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_two_color_image(dir: &Path) -> String {
    let spec = known_composition(1, 0.0, 0);
    let image = generate_stripes(&spec, 256, 384).unwrap();
    std::fs::write(dir.join("two_color.ppm"), write_ppm(&image)).unwrap();
    "two_color.ppm".into()
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn extract_reports_two_color_composition() {
    let dir = tempfile::tempdir().unwrap();
    let image = write_two_color_image(dir.path());
    let out = run_in(dir.path(), &["extract", &image]);
    assert!(out.status.success());
    let doc = ResultDocument::from_json(&stdout_str(&out)).unwrap();
    let red: Vec<(f64, f64)> = doc.channels.red.iter().map(|e| (e.value, e.percent)).collect();
    assert_eq!(red, vec![(237.0, 50.0), (255.0, 50.0)]);
    let green: Vec<f64> = doc.channels.green.iter().map(|e| e.value).collect();
    assert_eq!(green, vec![28.0, 242.0]);
}

#[test]
fn extract_csv_holds_same_rows_as_json() {
    let dir = tempfile::tempdir().unwrap();
    let image = write_two_color_image(dir.path());
    let json = run_in(dir.path(), &["extract", &image]);
    let csv = run_in(dir.path(), &["extract", &image, "--format", "csv"]);
    assert!(json.status.success() && csv.status.success());

    let doc = ResultDocument::from_json(&stdout_str(&json)).unwrap();
    let mut expected = vec!["channel,value,percent".to_string()];
    for channel in ChannelId::ALL {
        for e in doc.channels.get(channel) {
            expected.push(format!("{},{},{}", channel.name(), e.value, e.percent));
        }
    }
    let got: Vec<String> = stdout_str(&csv).lines().map(String::from).collect();
    assert_eq!(got, expected);
}

#[test]
fn extract_missing_file_exits_one_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["extract", "missing.ppm"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("missing.ppm"));
}

#[test]
fn extract_bad_flag_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["extract", "x.ppm", "--rho-mode", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!stderr_str(&out).is_empty());
}

#[test]
fn extract_out_of_range_threshold_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let image = write_two_color_image(dir.path());
    let out = run_in(
        dir.path(),
        &["extract", &image, "--thresh-count-pct", "150"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn extract_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let image = write_two_color_image(dir.path());
    let a = run_in(dir.path(), &["extract", &image]);
    let b = run_in(dir.path(), &["extract", &image]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn extract_full_precision_keeps_fractions() {
    let dir = tempfile::tempdir().unwrap();
    // Two adjacent values collapse into one bin with centroid 10.5.
    let spec = CompositionSpec {
        stripes: vec![
            Stripe {
                color: [10, 10, 10],
                fraction: 0.5,
            },
            Stripe {
                color: [11, 11, 11],
                fraction: 0.5,
            },
        ],
        noise_sigma: 0.0,
        seed: 0,
    };
    let image = generate_stripes(&spec, 64, 64).unwrap();
    std::fs::write(dir.path().join("img.ppm"), write_ppm(&image)).unwrap();

    let rounded = run_in(dir.path(), &["extract", "img.ppm"]);
    let doc = ResultDocument::from_json(&stdout_str(&rounded)).unwrap();
    // centroid 10.5 rounds half away from zero
    assert_eq!(doc.channels.red[0].value, 11.0);

    let full = run_in(dir.path(), &["extract", "img.ppm", "--full-precision"]);
    let doc = ResultDocument::from_json(&stdout_str(&full)).unwrap();
    assert_eq!(doc.channels.red[0].value, 10.5);
}

fn write_spec(dir: &Path, name: &str, spec: &CompositionSpec) {
    std::fs::write(dir.join(name), serde_json::to_string_pretty(spec).unwrap()).unwrap();
}

#[test]
fn generate_then_extract_recovers_composition() {
    let dir = tempfile::tempdir().unwrap();
    write_spec(dir.path(), "spec.json", &known_composition(1, 0.0, 0));
    let gen = run_in(
        dir.path(),
        &[
            "generate", "--spec", "spec.json", "--width", "256", "--height", "384", "--out",
            "img.ppm",
        ],
    );
    assert!(gen.status.success());
    let out = run_in(dir.path(), &["extract", "img.ppm"]);
    let doc = ResultDocument::from_json(&stdout_str(&out)).unwrap();
    let blue: Vec<(f64, f64)> = doc.channels.blue.iter().map(|e| (e.value, e.percent)).collect();
    assert_eq!(blue, vec![(0.0, 50.0), (36.0, 50.0)]);
}

#[test]
fn generate_zero_width_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    write_spec(dir.path(), "spec.json", &known_composition(1, 0.0, 0));
    let out = run_in(
        dir.path(),
        &[
            "generate", "--spec", "spec.json", "--width", "0", "--height", "384", "--out",
            "img.ppm",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_invalid_spec_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), b"{\"stripes\": []}").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "generate", "--spec", "bad.json", "--width", "8", "--height", "8", "--out", "img.ppm",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    write_spec(dir.path(), "spec.json", &known_composition(1, 2.0, 9));
    for name in ["a.ppm", "b.ppm"] {
        let out = run_in(
            dir.path(),
            &[
                "generate", "--spec", "spec.json", "--width", "64", "--height", "48", "--out",
                name,
            ],
        );
        assert!(out.status.success());
    }
    let a = std::fs::read(dir.path().join("a.ppm")).unwrap();
    let b = std::fs::read(dir.path().join("b.ppm")).unwrap();
    assert_eq!(a, b);
}

fn result_doc_json(channels: [&[(f64, f64)]; 3]) -> String {
    let entries = |rows: &[(f64, f64)]| {
        rows.iter()
            .map(|&(value, percent)| {
                format!("{{\"value\": {value}, \"percent\": {percent}}}")
            })
            .collect::<Vec<_>>()
            .join(",")
    };
    format!(
        "{{\"schema_version\":1,\"image\":\"x.ppm\",\"config\":{{\"binning\":{{\"rho_mode\":\"distinct\",\"max_recursion_depth\":300}},\"merge\":{{\"thresh_count_pct\":5.0,\"thresh_distance\":40.0,\"contig_distance\":12.0,\"max_colors\":8}}}},\"channels\":{{\"red\":[{}],\"green\":[{}],\"blue\":[{}]}}}}",
        entries(channels[0]),
        entries(channels[1]),
        entries(channels[2]),
    )
}

#[test]
fn evaluate_identical_documents_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let doc = result_doc_json([
        &[(10.0, 60.0), (200.0, 40.0)],
        &[(5.0, 100.0)],
        &[(0.0, 30.0), (128.0, 70.0)],
    ]);
    std::fs::write(dir.path().join("a.json"), &doc).unwrap();
    let out = run_in(
        dir.path(),
        &["evaluate", "--estimated", "a.json", "--actual", "a.json"],
    );
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(parsed["image_epsilon"].as_f64(), Some(0.0));
}

#[test]
fn evaluate_single_pair_distance() {
    let dir = tempfile::tempdir().unwrap();
    let est = result_doc_json([&[(10.0, 50.0)], &[(1.0, 100.0)], &[(1.0, 100.0)]]);
    let act = result_doc_json([&[(13.0, 46.0)], &[(1.0, 100.0)], &[(1.0, 100.0)]]);
    std::fs::write(dir.path().join("est.json"), est).unwrap();
    std::fs::write(dir.path().join("act.json"), act).unwrap();
    let out = run_in(
        dir.path(),
        &["evaluate", "--estimated", "est.json", "--actual", "act.json"],
    );
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(parsed["per_channel"]["red"]["epsilon"].as_f64(), Some(5.0));
}

/// Reference two-stripe rows evaluated against their nominal truth: the
/// per-pair distances are checked against an in-test summation of the
/// distance formula.
#[test]
fn evaluate_reference_two_stripe_rows() {
    let est: [[(f64, f64); 2]; 3] = [
        [(254.0, 50.25), (237.0, 49.74)],
        [(241.0, 50.63), (27.0, 49.36)],
        [(0.0, 50.38), (36.0, 49.61)],
    ];
    let act: [[(f64, f64); 2]; 3] = [
        [(255.0, 50.0), (237.0, 50.0)],
        [(242.0, 50.0), (28.0, 50.0)],
        [(0.0, 50.0), (36.0, 50.0)],
    ];
    let mut expected_channels = [0.0f64; 3];
    for c in 0..3 {
        let mut sum = 0.0;
        for ((ev, ep), (av, ap)) in est[c].iter().zip(&act[c]) {
            sum += ((ev - av).powi(2) + (ep - ap).powi(2)).sqrt();
        }
        expected_channels[c] = sum / est[c].len() as f64;
    }
    let expected_image = expected_channels.iter().sum::<f64>() / 3.0;
    // Frozen from the summation above; guards against silent changes.
    assert!((expected_image - 0.7383245690542436).abs() < 1e-9);

    let dir = tempfile::tempdir().unwrap();
    let est_doc = result_doc_json([&est[0], &est[1], &est[2]]);
    let act_doc = result_doc_json([&act[0], &act[1], &act[2]]);
    std::fs::write(dir.path().join("est.json"), est_doc).unwrap();
    std::fs::write(dir.path().join("act.json"), act_doc).unwrap();
    let out = run_in(
        dir.path(),
        &["evaluate", "--estimated", "est.json", "--actual", "act.json"],
    );
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    for (c, name) in ["red", "green", "blue"].iter().enumerate() {
        let got = parsed["per_channel"][name]["epsilon"].as_f64().unwrap();
        assert!((got - expected_channels[c]).abs() < 1e-12, "{name}");
    }
    let got = parsed["image_epsilon"].as_f64().unwrap();
    assert!((got - expected_image).abs() < 1e-12);
}

#[test]
fn evaluate_schema_mismatch_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), b"{\"schema_version\": 99}").unwrap();
    let good = result_doc_json([&[(1.0, 100.0)], &[(1.0, 100.0)], &[(1.0, 100.0)]]);
    std::fs::write(dir.path().join("good.json"), good).unwrap();
    let out = run_in(
        dir.path(),
        &["evaluate", "--estimated", "bad.json", "--actual", "good.json"],
    );
    assert_eq!(out.status.code(), Some(2));
}

fn write_three_spike_image(dir: &Path) -> String {
    let spec = CompositionSpec {
        stripes: vec![
            Stripe {
                color: [10, 15, 20],
                fraction: 0.4,
            },
            Stripe {
                color: [120, 125, 130],
                fraction: 0.3,
            },
            Stripe {
                color: [230, 235, 240],
                fraction: 0.3,
            },
        ],
        noise_sigma: 0.0,
        seed: 0,
    };
    let image = generate_stripes(&spec, 120, 60).unwrap();
    std::fs::write(dir.join("spikes.ppm"), write_ppm(&image)).unwrap();
    "spikes.ppm".into()
}

#[test]
fn compare_reports_both_methods_near_spikes() {
    let dir = tempfile::tempdir().unwrap();
    let image = write_three_spike_image(dir.path());
    let out = run_in(dir.path(), &["compare", &image, "--k", "3"]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let red = &parsed["channels"]["red"];
    assert_eq!(red["binning_k"].as_u64(), Some(3));
    for method in ["binning", "gla"] {
        let values: Vec<f64> = red[method]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e["value"].as_f64().unwrap())
            .collect();
        for (got, spike) in values.iter().zip([10.0, 120.0, 230.0]) {
            assert!((got - spike).abs() <= 2.0, "{method}: {got} vs {spike}");
        }
    }
    assert!(red["binning_ms"].as_f64().is_some());
    assert!(red["gla_ms"].as_f64().is_some());
}

#[test]
fn compare_oversized_k_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let image = write_three_spike_image(dir.path());
    let out = run_in(dir.path(), &["compare", &image, "--k", "400"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("400"));
}

#[test]
fn compare_discovered_k_ignores_configured_k() {
    let dir = tempfile::tempdir().unwrap();
    let image = write_three_spike_image(dir.path());
    let mut discovered = Vec::new();
    for k in ["2", "3"] {
        let out = run_in(dir.path(), &["compare", &image, "--k", k]);
        assert!(out.status.success());
        let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
        discovered.push(parsed["channels"]["green"]["binning_k"].as_u64().unwrap());
    }
    assert_eq!(discovered, vec![3, 3]);
}

fn decode_ppm_file(path: &Path) -> chanbin::imageio::RgbImage {
    let bytes = std::fs::read(path).unwrap();
    chanbin::imageio::decode_image(&bytes, chanbin::imageio::FormatHint::Ppm).unwrap()
}

#[test]
fn swatch_single_color_is_solid_band() {
    let dir = tempfile::tempdir().unwrap();
    let doc = result_doc_json([&[(255.0, 100.0)], &[(7.0, 100.0)], &[(9.0, 100.0)]]);
    std::fs::write(dir.path().join("res.json"), doc).unwrap();
    let out = run_in(
        dir.path(),
        &["swatch", "res.json", "--out", "sw.ppm", "--bar-height", "8"],
    );
    assert!(out.status.success());
    let image = decode_ppm_file(&dir.path().join("sw.ppm"));
    assert_eq!(image.height(), 24);
    for x in 0..image.width() {
        assert_eq!(image.pixel(x, 0), [255, 0, 0]);
        assert_eq!(image.pixel(x, 8), [0, 7, 0]);
        assert_eq!(image.pixel(x, 16), [0, 0, 9]);
    }
}

#[test]
fn swatch_half_split_band() {
    let dir = tempfile::tempdir().unwrap();
    let doc = result_doc_json([
        &[(0.0, 50.0), (255.0, 50.0)],
        &[(1.0, 100.0)],
        &[(1.0, 100.0)],
    ]);
    std::fs::write(dir.path().join("res.json"), doc).unwrap();
    let out = run_in(dir.path(), &["swatch", "res.json", "--out", "sw.ppm"]);
    assert!(out.status.success());
    let image = decode_ppm_file(&dir.path().join("sw.ppm"));
    let half = image.width() / 2;
    assert_eq!(image.pixel(half - 1, 0), [0, 0, 0]);
    assert_eq!(image.pixel(half, 0), [255, 0, 0]);
}

#[test]
fn swatch_block_ratio_within_one_pixel() {
    let dir = tempfile::tempdir().unwrap();
    let doc = result_doc_json([
        &[(99.0, 78.93), (192.0, 21.06)],
        &[(107.0, 80.06), (197.0, 19.93)],
        &[(60.0, 38.86), (190.0, 61.13)],
    ]);
    std::fs::write(dir.path().join("res.json"), doc).unwrap();
    let out = run_in(dir.path(), &["swatch", "res.json", "--out", "sw.ppm"]);
    assert!(out.status.success());
    let image = decode_ppm_file(&dir.path().join("sw.ppm"));
    let first_block = (0..image.width())
        .filter(|&x| image.pixel(x, 0) == [99, 0, 0])
        .count() as f64;
    let expected = 78.93 / (78.93 + 21.06) * image.width() as f64;
    assert!((first_block - expected).abs() <= 1.0);
}

#[test]
fn swatch_malformed_document_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("res.json"), b"not json at all").unwrap();
    let out = run_in(dir.path(), &["swatch", "res.json", "--out", "sw.ppm"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn swatch_zero_bar_height_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let doc = result_doc_json([&[(1.0, 100.0)], &[(1.0, 100.0)], &[(1.0, 100.0)]]);
    std::fs::write(dir.path().join("res.json"), doc).unwrap();
    let out = run_in(
        dir.path(),
        &["swatch", "res.json", "--out", "sw.ppm", "--bar-height", "0"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_without_out_writes_ppm_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    write_spec(dir.path(), "spec.json", &known_composition(1, 0.0, 0));
    let out = run_in(
        dir.path(),
        &["generate", "--spec", "spec.json", "--width", "8", "--height", "4"],
    );
    assert!(out.status.success());
    assert!(out.stdout.starts_with(b"P6\n8 4\n255\n"));
    assert_eq!(out.stdout.len(), 11 + 8 * 4 * 3);
}
