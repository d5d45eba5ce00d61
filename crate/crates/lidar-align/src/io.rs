//! Scan and report file I/O.
//!
//! Scan files are versioned CSV. Angles cross the file boundary in degrees
//! for human readability and are converted to radians on load:
//!
//! ```text
//! #lidar-align-scan v1
//! #seed 42
//! #truth 0.500000000 1.000000000 0.000000000 0.010000000 0.000000000 0.000000000
//! #vertical-angles-deg 0:-15.000000000 1:-13.000000000 ...
//! ring,azimuth_deg,range_m,reflectivity
//! 0,0.100000000,2.937012165,0.900000000
//! ...
//! ```
//!
//! `#seed`, `#truth` (tilt° yaw° roll° dx dy dz, translations in meters) and
//! `#vertical-angles-deg` (ring:angle pairs) are optional metadata; other
//! `#`-lines before the column header are ignored as comments. When the
//! vertical-angle directive is absent the 16-ring table of the default
//! sensor is assumed. Values are written with nine decimal places, so
//! saving a loaded file reproduces it byte-for-byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{wrap_azimuth, PoseVector, SphericalBeam};
use crate::montecarlo::{McSummary, TrialOutcome, TrialRecord};
use crate::sim::{Scan, SensorModel};

const SCAN_HEADER: &str = "#lidar-align-scan v1";
const SCAN_COLUMNS: &str = "ring,azimuth_deg,range_m,reflectivity";
const TRIALS_HEADER: &str = "#lidar-align-trials v1";
const SUMMARY_HEADER: &str = "#lidar-align-summary v1";
const POSE_STATS_HEADER: &str = "#lidar-align-pose-stats v1";

fn format_error(line: usize, message: impl Into<String>) -> Error {
    Error::ScanFormat { line, message: message.into() }
}

/// Renders a scan in the versioned CSV format.
pub fn scan_to_string(scan: &Scan) -> String {
    let mut out = String::new();
    writeln!(out, "{SCAN_HEADER}").unwrap();
    writeln!(out, "#seed {}", scan.seed).unwrap();
    if let Some(t) = &scan.truth {
        writeln!(
            out,
            "#truth {:.9} {:.9} {:.9} {:.9} {:.9} {:.9}",
            t.tilt.to_degrees(),
            t.yaw.to_degrees(),
            t.roll.to_degrees(),
            t.dx,
            t.dy,
            t.dz
        )
        .unwrap();
    }
    let rings: BTreeMap<u16, f64> =
        scan.beams.iter().map(|b| (b.ring, b.vertical.to_degrees())).collect();
    if !rings.is_empty() {
        out.push_str("#vertical-angles-deg");
        for (ring, angle) in &rings {
            write!(out, " {ring}:{angle:.9}").unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "{SCAN_COLUMNS}").unwrap();
    for b in &scan.beams {
        writeln!(
            out,
            "{},{:.9},{:.9},{:.9}",
            b.ring,
            b.azimuth.to_degrees(),
            b.range,
            b.reflectivity
        )
        .unwrap();
    }
    out
}

/// Writes a scan to `path` (see [`scan_to_string`] for the format).
pub fn save_scan(scan: &Scan, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &scan_to_string(scan))
}

/// `fs::write` with the path in the error message.
pub(crate) fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| io_at(path, e))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_at(path, e))
}

pub(crate) fn io_at(path: &Path, e: std::io::Error) -> crate::error::Error {
    std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into()
}

fn parse_float(token: &str, line: usize, what: &str) -> Result<f64> {
    token
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format_error(line, format!("{what} is not a finite number: {token:?}")))
}

/// Parses a scan from the versioned CSV format. Malformed content is
/// rejected with the offending 1-based line number.
pub fn scan_from_str(text: &str) -> Result<Scan> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));

    let (_, header) = lines.next().ok_or_else(|| format_error(1, "empty scan file"))?;
    if header != SCAN_HEADER {
        return if header.starts_with("#lidar-align-scan") {
            Err(format_error(1, format!("unsupported scan format version: {header:?}")))
        } else {
            Err(format_error(1, format!("missing {SCAN_HEADER:?} header")))
        };
    }

    let mut seed = 0u64;
    let mut truth: Option<PoseVector> = None;
    let mut rings: Option<BTreeMap<u16, f64>> = None;
    let mut columns_line = None;
    for (line, text) in lines.by_ref() {
        if text.is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix("#seed") {
            seed = rest
                .trim()
                .parse()
                .map_err(|_| format_error(line, format!("invalid seed: {:?}", rest.trim())))?;
        } else if let Some(rest) = text.strip_prefix("#truth") {
            let values: Vec<f64> = rest
                .split_whitespace()
                .map(|t| parse_float(t, line, "truth component"))
                .collect::<Result<_>>()?;
            let [tilt, yaw, roll, dx, dy, dz] = values[..] else {
                return Err(format_error(line, "truth needs exactly six values"));
            };
            truth = Some(PoseVector::new(
                tilt.to_radians(),
                yaw.to_radians(),
                roll.to_radians(),
                dx,
                dy,
                dz,
            ));
        } else if let Some(rest) = text.strip_prefix("#vertical-angles-deg") {
            let mut table = BTreeMap::new();
            for pair in rest.split_whitespace() {
                let (ring, angle) = pair
                    .split_once(':')
                    .ok_or_else(|| format_error(line, format!("expected ring:angle, got {pair:?}")))?;
                let ring: u16 = ring
                    .parse()
                    .map_err(|_| format_error(line, format!("invalid ring index: {ring:?}")))?;
                table.insert(ring, parse_float(angle, line, "vertical angle")?.to_radians());
            }
            rings = Some(table);
        } else if text.starts_with('#') {
            continue; // comment
        } else if text == SCAN_COLUMNS {
            columns_line = Some(line);
            break;
        } else {
            return Err(format_error(line, format!("expected {SCAN_COLUMNS:?} column header")));
        }
    }
    let columns_line =
        columns_line.ok_or_else(|| format_error(1, "scan file has no column header"))?;

    // Rings not listed in the directive fall back to the default sensor's
    // ladder, so hand-written files for the stock sensor stay minimal.
    let fallback = SensorModel::vlp16().vertical_angles;
    let vertical_of = |ring: u16, line: usize| -> Result<f64> {
        if let Some(table) = &rings {
            return table
                .get(&ring)
                .copied()
                .ok_or_else(|| format_error(line, format!("ring {ring} missing from #vertical-angles-deg")));
        }
        fallback
            .get(ring as usize)
            .copied()
            .ok_or_else(|| format_error(line, format!("ring {ring} outside the default 16-ring sensor")))
    };

    let mut beams = Vec::new();
    for (line, text) in lines {
        if text.is_empty() {
            continue;
        }
        let fields: Vec<&str> = text.split(',').collect();
        let [ring, azimuth_deg, range_m, reflectivity] = fields[..] else {
            return Err(format_error(line, format!("expected 4 comma-separated fields, got {}", fields.len())));
        };
        let ring: u16 = ring
            .parse()
            .map_err(|_| format_error(line, format!("invalid ring index: {ring:?}")))?;
        let beam = SphericalBeam {
            ring,
            azimuth: wrap_azimuth(parse_float(azimuth_deg, line, "azimuth")?.to_radians()),
            vertical: vertical_of(ring, line)?,
            range: parse_float(range_m, line, "range")?,
            reflectivity: parse_float(reflectivity, line, "reflectivity")?,
        };
        beam.validate().map_err(|e| format_error(line, e.to_string()))?;
        beams.push(beam);
    }
    if beams.is_empty() {
        return Err(format_error(columns_line, "scan file contains no beam rows"));
    }
    Ok(Scan { beams, seed, truth })
}

/// Reads a scan file (see [`scan_from_str`]).
pub fn load_scan(path: impl AsRef<Path>) -> Result<Scan> {
    scan_from_str(&read_file(path.as_ref())?)
}

/// [tilt°, yaw°, roll°, dx mm, dy mm, dz mm] — report-file units.
fn deg_mm(p: &PoseVector) -> [f64; 6] {
    [
        p.tilt.to_degrees(),
        p.yaw.to_degrees(),
        p.roll.to_degrees(),
        p.dx * 1000.0,
        p.dy * 1000.0,
        p.dz * 1000.0,
    ]
}

fn push_deg_mm(out: &mut String, p: &PoseVector) {
    for v in deg_mm(p) {
        write!(out, ",{v:.6}").unwrap();
    }
}

/// Renders one row per trial: seeds, convergence diagnostics, latency, and
/// truth/estimate/error per DOF (degrees and millimeters). Failed trials
/// carry the failing stage in the last column and leave the estimate blank.
pub fn trials_to_csv(records: &[TrialRecord]) -> String {
    let mut out = String::new();
    writeln!(out, "{TRIALS_HEADER}").unwrap();
    out.push_str("pose_index,scan_index,scan_seed,converged,iterations,cost,latency_ms");
    for group in ["truth", "est", "err"] {
        for col in ["tilt_deg", "yaw_deg", "roll_deg", "dx_mm", "dy_mm", "dz_mm"] {
            write!(out, ",{group}_{col}").unwrap();
        }
    }
    out.push_str(",failure\n");
    for r in records {
        match &r.outcome {
            TrialOutcome::Success { estimate, error, cost, iterations, converged } => {
                write!(
                    out,
                    "{},{},{},{},{},{:.6e},{:.3}",
                    r.pose_index, r.scan_index, r.scan_seed, converged, iterations, cost,
                    r.latency_ms
                )
                .unwrap();
                push_deg_mm(&mut out, &r.truth);
                push_deg_mm(&mut out, estimate);
                push_deg_mm(&mut out, error);
                out.push_str(",\n");
            }
            TrialOutcome::Failure { stage, .. } => {
                write!(
                    out,
                    "{},{},{},false,0,,{:.3}",
                    r.pose_index, r.scan_index, r.scan_seed, r.latency_ms
                )
                .unwrap();
                push_deg_mm(&mut out, &r.truth);
                out.push_str(&",".repeat(12));
                writeln!(out, ",{stage}").unwrap();
            }
        }
    }
    out
}

pub fn write_trials_csv(records: &[TrialRecord], path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &trials_to_csv(records))
}

/// Renders the accuracy/precision summary table: rows are the two metrics,
/// columns the four DOFs the sensor constrains well (tilt, roll, yaw in
/// degrees, horizontal displacement in millimeters).
pub fn summary_to_csv(summary: &McSummary) -> String {
    let mut out = String::new();
    writeln!(out, "{SUMMARY_HEADER}").unwrap();
    writeln!(
        out,
        "# trials {} failed {} failure_rate {:.6}",
        summary.total_trials, summary.failed_trials, summary.failure_rate
    )
    .unwrap();
    writeln!(out, "metric,tilt_deg,roll_deg,yaw_deg,dx_mm").unwrap();
    for (name, p) in [("accuracy", &summary.accuracy), ("precision", &summary.precision)] {
        writeln!(
            out,
            "{name},{:.6},{:.6},{:.6},{:.6}",
            p.tilt.to_degrees(),
            p.roll.to_degrees(),
            p.yaw.to_degrees(),
            p.dx * 1000.0
        )
        .unwrap();
    }
    out
}

pub fn write_summary_csv(summary: &McSummary, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &summary_to_csv(summary))
}

/// Renders one row per swept pose with the truth, signed mean error and
/// error standard deviation per DOF — the data behind sweep plots.
pub fn pose_stats_to_csv(summary: &McSummary) -> String {
    let mut out = String::new();
    writeln!(out, "{POSE_STATS_HEADER}").unwrap();
    out.push_str("pose_index,trials,failures");
    for group in ["truth", "mean_err", "std"] {
        for col in ["tilt_deg", "yaw_deg", "roll_deg", "dx_mm", "dy_mm", "dz_mm"] {
            write!(out, ",{group}_{col}").unwrap();
        }
    }
    out.push('\n');
    for (i, s) in summary.pose_stats.iter().enumerate() {
        write!(out, "{},{},{}", i, s.trials, s.failures).unwrap();
        push_deg_mm(&mut out, &s.truth);
        push_deg_mm(&mut out, &s.mean_error);
        push_deg_mm(&mut out, &s.std_error);
        out.push('\n');
    }
    out
}

pub fn write_pose_stats_csv(summary: &McSummary, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &pose_stats_to_csv(summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;
    use crate::geometry::PoseVector;
    use crate::montecarlo::run_montecarlo;
    use crate::sim::{generate_scan, Scene, SensorModel};
    use approx::assert_abs_diff_eq;

    fn sample_scan() -> Scan {
        let truth = PoseVector::new(0.01, -0.02, 0.005, 0.012, 0.0, -0.003);
        generate_scan(&SensorModel::vlp16(), &Scene::default(), &truth, 42).unwrap()
    }

    #[test]
    fn round_trip_preserves_beams_and_metadata() {
        let scan = sample_scan();
        let loaded = scan_from_str(&scan_to_string(&scan)).unwrap();
        assert_eq!(loaded.beams.len(), scan.beams.len());
        assert_eq!(loaded.seed, scan.seed);
        let truth = loaded.truth.expect("truth metadata survives");
        for (a, b) in truth.as_array().iter().zip(scan.truth.unwrap().as_array()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-9);
        }
        for (a, b) in loaded.beams.iter().zip(&scan.beams) {
            assert_eq!(a.ring, b.ring);
            assert_abs_diff_eq!(a.azimuth, b.azimuth, epsilon = 1e-9);
            assert_abs_diff_eq!(a.vertical, b.vertical, epsilon = 1e-12);
            assert_abs_diff_eq!(a.range, b.range, epsilon = 1e-9);
            assert_abs_diff_eq!(a.reflectivity, b.reflectivity, epsilon = 1e-9);
        }
    }

    #[test]
    fn saving_a_loaded_file_is_byte_identical() {
        let first = scan_to_string(&sample_scan());
        let second = scan_to_string(&scan_from_str(&first).unwrap());
        assert_eq!(first, second);
    }

    #[test]
    fn data_row_count_matches_beam_count() {
        let scan = sample_scan();
        let text = scan_to_string(&scan);
        let rows = text.lines().filter(|l| !l.starts_with('#') && *l != SCAN_COLUMNS).count();
        assert_eq!(rows, scan.beams.len());
    }

    #[test]
    fn files_round_trip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.csv");
        let scan = sample_scan();
        save_scan(&scan, &path).unwrap();
        let loaded = load_scan(&path).unwrap();
        assert_eq!(loaded.beams.len(), scan.beams.len());
        assert_eq!(loaded.seed, scan.seed);
    }

    #[test]
    fn empty_and_headerless_files_are_rejected() {
        for text in ["", "0,0.1,2.5,0.9\n"] {
            match scan_from_str(text) {
                Err(Error::ScanFormat { line: 1, .. }) => {}
                other => panic!("expected line-1 format error, got {other:?}"),
            }
        }
    }

    #[test]
    fn unknown_version_is_rejected() {
        let err = scan_from_str("#lidar-align-scan v2\n").unwrap_err();
        assert!(err.to_string().contains("version"), "got: {err}");
    }

    #[test]
    fn scan_without_beam_rows_is_rejected() {
        let text = format!("{SCAN_HEADER}\n{SCAN_COLUMNS}\n");
        let err = scan_from_str(&text).unwrap_err();
        assert!(err.to_string().contains("no beam rows"), "got: {err}");
    }

    #[test]
    fn malformed_rows_report_their_line_number() {
        let cases = [
            ("0,abc,2.5,0.9", "azimuth"),
            ("0,0.1,2.5", "fields"),
            ("0,0.1,-2.5,0.9", "range"),
            ("0,0.1,2.5,1.5", "reflectivity"),
            ("99,0.1,2.5,0.9", "ring"),
        ];
        for (row, hint) in cases {
            let text = format!("{SCAN_HEADER}\n{SCAN_COLUMNS}\n0,0.1,2.5,0.9\n{row}\n");
            match scan_from_str(&text) {
                Err(Error::ScanFormat { line: 4, message }) => {
                    assert!(
                        message.to_lowercase().contains(hint),
                        "row {row:?}: message {message:?} should mention {hint}"
                    );
                }
                other => panic!("row {row:?}: expected line-4 error, got {other:?}"),
            }
        }
    }

    #[test]
    fn minimal_file_assumes_the_default_ring_ladder() {
        let text = format!("{SCAN_HEADER}\n{SCAN_COLUMNS}\n0,10.0,2.5,0.9\n15,10.0,2.5,0.9\n");
        let scan = scan_from_str(&text).unwrap();
        assert_eq!(scan.seed, 0);
        assert!(scan.truth.is_none());
        assert_abs_diff_eq!(scan.beams[0].vertical, (-15f64).to_radians(), epsilon = 1e-15);
        assert_abs_diff_eq!(scan.beams[1].vertical, 15f64.to_radians(), epsilon = 1e-15);
    }

    #[test]
    fn azimuth_is_wrapped_on_load() {
        let text = format!("{SCAN_HEADER}\n{SCAN_COLUMNS}\n0,370.0,2.5,0.9\n");
        let scan = scan_from_str(&text).unwrap();
        assert_abs_diff_eq!(scan.beams[0].azimuth, 10f64.to_radians(), epsilon = 1e-12);
    }

    fn small_run() -> (McSummary, Vec<TrialRecord>) {
        let cfg = RunConfig::from_json(
            r#"{"sweep": {"mode": "random", "poses": 2}, "scans_per_pose": 2, "master_seed": 3}"#,
        )
        .unwrap();
        run_montecarlo(&cfg).unwrap()
    }

    #[test]
    fn trial_csv_has_one_row_per_trial() {
        let (_, records) = small_run();
        let text = trials_to_csv(&records);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], TRIALS_HEADER);
        assert!(lines[1].starts_with("pose_index,"));
        assert_eq!(lines.len(), 2 + records.len());
        // Success rows end with an empty failure column.
        assert!(lines[2].ends_with(','));
    }

    #[test]
    fn summary_csv_is_table_shaped_and_parseable() {
        let (summary, _) = small_run();
        let text = summary_to_csv(&summary);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SUMMARY_HEADER);
        assert!(lines[1].contains("failure_rate 0.000000"));
        assert_eq!(lines[2], "metric,tilt_deg,roll_deg,yaw_deg,dx_mm");
        let accuracy: Vec<f64> =
            lines[3].split(',').skip(1).map(|v| v.parse().unwrap()).collect();
        assert_eq!(lines[3].split(',').next(), Some("accuracy"));
        assert_abs_diff_eq!(accuracy[0], summary.accuracy.tilt.to_degrees(), epsilon = 1e-6);
        assert_abs_diff_eq!(accuracy[3], summary.accuracy.dx * 1000.0, epsilon = 1e-6);
        assert_eq!(lines[4].split(',').next(), Some("precision"));
    }

    #[test]
    fn pose_stats_csv_has_one_row_per_pose() {
        let (summary, _) = small_run();
        let text = pose_stats_to_csv(&summary);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2 + summary.pose_stats.len());
        for (i, line) in lines[2..].iter().enumerate() {
            assert!(line.starts_with(&format!("{i},")));
            assert_eq!(line.split(',').count(), 3 + 18);
        }
    }

    #[test]
    fn identical_runs_produce_identical_report_bytes() {
        let (s1, r1) = small_run();
        let (s2, r2) = small_run();
        assert_eq!(summary_to_csv(&s1), summary_to_csv(&s2));
        assert_eq!(pose_stats_to_csv(&s1), pose_stats_to_csv(&s2));
        // Trial CSVs contain wall-clock latency, so compare them with the
        // latency column blanked out.
        let strip = |text: String| -> String {
            text.lines()
                .map(|l| {
                    l.split(',')
                        .enumerate()
                        .map(|(i, f)| if i == 6 { "" } else { f })
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect::<Vec<_>>()
                .join("\n")
        };
        assert_eq!(strip(trials_to_csv(&r1)), strip(trials_to_csv(&r2)));
    }

    #[test]
    fn file_errors_name_the_path() {
        match load_scan("/nonexistent/dir/scan.csv") {
            Err(Error::Io(e)) => {
                assert!(e.to_string().contains("/nonexistent/dir/scan.csv"), "message: {e}")
            }
            other => panic!("expected Io error, got {other:?}"),
        }
        let scan = sample_scan();
        match save_scan(&scan, "/nonexistent/dir/scan.csv") {
            Err(Error::Io(e)) => {
                assert!(e.to_string().contains("/nonexistent/dir/scan.csv"), "message: {e}")
            }
            other => panic!("expected Io error, got {other:?}"),
        }
    }
}
