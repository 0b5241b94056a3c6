//! Plain-text event files and report rendering.
//!
//! # Event files
//!
//! Line-delimited, self-describing, diff-friendly. A file with `N` events
//! has exactly `N + 2` lines:
//!
//! ```text
//! # seed=42 n_events=3 frame=helicity alpha_plus=1.0000000000000000e0 alpha_minus=1.0000000000000000e0
//! # event_index cos_theta_scatter n_plus_x n_plus_y n_plus_z n_minus_x n_minus_y n_minus_z
//! 0 -2.2131172936746045e-1 ... (8 whitespace-separated fields)
//! 1 ...
//! 2 ...
//! ```
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which round
//!-trips `f64` exactly, so write → read → write is byte-identical.
//!
//! # Reports
//!
//! Tomography, bootstrap, significance, and witness results render as flat
//! `key=value` documents, one pair per line, starting with a `record=` line
//! naming the document type. Stable key order, full float precision: two
//! runs on the same inputs produce byte-identical reports.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::generator::{EventRecord, GenerationStats, GeneratorConfig};
use crate::state::UnitVector3;
use crate::tomography::{BootstrapSummary, SignificanceReport, TomographyResult};
use crate::witness::WitnessReport;

/// Provenance carried in an event file's metadata line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EventFileMeta {
    pub seed: u64,
    pub n_events: u64,
    pub frame: Frame,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
}

impl EventFileMeta {
    /// Metadata matching a generator configuration.
    pub fn from_config(config: &GeneratorConfig) -> Self {
        Self {
            seed: config.seed,
            n_events: config.n_events,
            frame: config.frame,
            alpha_plus: config.alpha_plus,
            alpha_minus: config.alpha_minus,
        }
    }
}

const HEADER_COLUMNS: [&str; 8] = [
    "event_index",
    "cos_theta_scatter",
    "n_plus_x",
    "n_plus_y",
    "n_plus_z",
    "n_minus_x",
    "n_minus_y",
    "n_minus_z",
];

/// Writes the two comment lines and one line per event. The metadata count
/// must match the slice length — a mismatch means the caller is writing a
/// file that lies about itself.
pub fn write_events<W: Write>(
    out: &mut W,
    meta: &EventFileMeta,
    events: &[EventRecord],
) -> Result<()> {
    if meta.n_events != events.len() as u64 {
        return Err(Error::InvalidConfig {
            reason: format!(
                "metadata claims {} events but {} were supplied",
                meta.n_events,
                events.len()
            ),
        });
    }
    writeln!(
        out,
        "# seed={} n_events={} frame={} alpha_plus={:.16e} alpha_minus={:.16e}",
        meta.seed, meta.n_events, meta.frame, meta.alpha_plus, meta.alpha_minus
    )?;
    writeln!(out, "# {}", HEADER_COLUMNS.join(" "))?;
    for e in events {
        writeln!(
            out,
            "{} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
            e.index,
            e.cos_theta_scatter,
            e.nhat_plus.x(),
            e.nhat_plus.y(),
            e.nhat_plus.z(),
            e.nhat_minus.x(),
            e.nhat_minus.y(),
            e.nhat_minus.z(),
        )?;
    }
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_field<T: std::str::FromStr>(line: usize, what: &str, token: &str) -> Result<T> {
    token
        .parse()
        .map_err(|_| parse_err(line, format!("cannot parse {what} from `{token}`")))
}

/// Splits a metadata token of the form `key=value`.
fn split_kv(line_no: usize, token: &str) -> Result<(&str, &str)> {
    token
        .split_once('=')
        .ok_or_else(|| parse_err(line_no, format!("expected key=value, got `{token}`")))
}

/// Builds a unit vector from parsed components without renormalizing, so the
/// stored bit patterns survive a write → read → write cycle unchanged.
fn parse_unit(line_no: usize, what: &str, x: f64, y: f64, z: f64) -> Result<UnitVector3> {
    let v = nalgebra::Vector3::new(x, y, z);
    let norm = v.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
        return Err(parse_err(
            line_no,
            format!("{what} is not a unit vector (norm = {norm})"),
        ));
    }
    Ok(UnitVector3::from_unit_unchecked(v))
}

/// Reads a complete event file; errors carry 1-based line numbers.
pub fn read_events<R: BufRead>(input: R) -> Result<(EventFileMeta, Vec<EventRecord>)> {
    let mut lines = input.lines().enumerate();

    let (_, meta_line) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file: missing metadata line"))?;
    let meta_line = meta_line?;
    let meta = parse_meta_line(&meta_line)?;

    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(2, "missing header line"))?;
    let header = header?;
    let expected = format!("# {}", HEADER_COLUMNS.join(" "));
    if header.trim_end() != expected {
        return Err(parse_err(2, format!("expected header `{expected}`")));
    }

    let mut events = Vec::with_capacity(meta.n_events.min(1 << 24) as usize);
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 8 {
            return Err(parse_err(
                line_no,
                format!("expected 8 fields, got {}", fields.len()),
            ));
        }
        let index: u64 = parse_field(line_no, "event_index", fields[0])?;
        let cos_theta_scatter: f64 = parse_field(line_no, "cos_theta_scatter", fields[1])?;
        if !(-1.0..=1.0).contains(&cos_theta_scatter) {
            return Err(parse_err(
                line_no,
                format!("cos_theta_scatter {cos_theta_scatter} outside [-1, 1]"),
            ));
        }
        let mut v = [0.0_f64; 6];
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = parse_field(line_no, HEADER_COLUMNS[2 + k], fields[2 + k])?;
        }
        // Validate unit norm but keep the parsed components bit-for-bit
        // (renormalizing would break write → read → write byte identity).
        let nhat_plus = parse_unit(line_no, "n_plus", v[0], v[1], v[2])?;
        let nhat_minus = parse_unit(line_no, "n_minus", v[3], v[4], v[5])?;
        events.push(EventRecord {
            index,
            cos_theta_scatter,
            nhat_plus,
            nhat_minus,
        });
    }

    if events.len() as u64 != meta.n_events {
        return Err(parse_err(
            events.len() + 2,
            format!(
                "metadata claims {} events but file contains {}",
                meta.n_events,
                events.len()
            ),
        ));
    }
    Ok((meta, events))
}

fn parse_meta_line(line: &str) -> Result<EventFileMeta> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| parse_err(1, "metadata line must start with `#`"))?;
    let mut seed = None;
    let mut n_events = None;
    let mut frame = None;
    let mut alpha_plus = None;
    let mut alpha_minus = None;
    for token in body.split_whitespace() {
        let (key, value) = split_kv(1, token)?;
        match key {
            "seed" => seed = Some(parse_field::<u64>(1, "seed", value)?),
            "n_events" => n_events = Some(parse_field::<u64>(1, "n_events", value)?),
            "frame" => {
                frame = Some(value.parse::<Frame>().map_err(|e| parse_err(1, e))?);
            }
            "alpha_plus" => alpha_plus = Some(parse_field::<f64>(1, "alpha_plus", value)?),
            "alpha_minus" => alpha_minus = Some(parse_field::<f64>(1, "alpha_minus", value)?),
            other => return Err(parse_err(1, format!("unknown metadata key `{other}`"))),
        }
    }
    Ok(EventFileMeta {
        seed: seed.ok_or_else(|| parse_err(1, "metadata missing `seed`"))?,
        n_events: n_events.ok_or_else(|| parse_err(1, "metadata missing `n_events`"))?,
        frame: frame.ok_or_else(|| parse_err(1, "metadata missing `frame`"))?,
        alpha_plus: alpha_plus.ok_or_else(|| parse_err(1, "metadata missing `alpha_plus`"))?,
        alpha_minus: alpha_minus.ok_or_else(|| parse_err(1, "metadata missing `alpha_minus`"))?,
    })
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Labels of the 15 Fano components in covariance order.
pub const FANO_LABELS: [&str; 15] = [
    "b_plus_x",
    "b_plus_y",
    "b_plus_z",
    "b_minus_x",
    "b_minus_y",
    "b_minus_z",
    "c_xx",
    "c_xy",
    "c_xz",
    "c_yx",
    "c_yy",
    "c_yz",
    "c_zx",
    "c_zy",
    "c_zz",
];

fn push_kv(out: &mut String, key: &str, value: impl std::fmt::Display) {
    out.push_str(key);
    out.push('=');
    out.push_str(&value.to_string());
    out.push('\n');
}

fn push_float(out: &mut String, key: &str, value: f64) {
    out.push_str(key);
    out.push('=');
    out.push_str(&format!("{value:.16e}"));
    out.push('\n');
}

fn push_direction(out: &mut String, key: &str, n: &UnitVector3) {
    push_float(out, &format!("{key}_x"), n.x());
    push_float(out, &format!("{key}_y"), n.y());
    push_float(out, &format!("{key}_z"), n.z());
}

/// Renders a point-estimate document: the 15 Fano estimates, their
/// delta-method standard errors, the full covariance (upper triangle), and
/// the projected state.
pub fn render_tomography(t: &TomographyResult) -> String {
    let mut out = String::new();
    push_kv(&mut out, "record", "tomography");
    push_kv(&mut out, "n_events", t.n_events);
    push_kv(&mut out, "projected", t.projected);
    let v = t.fano_vector();
    for (k, label) in FANO_LABELS.iter().enumerate() {
        push_float(&mut out, label, v[k]);
    }
    for (k, label) in FANO_LABELS.iter().enumerate() {
        push_float(
            &mut out,
            &format!("sigma_{label}"),
            t.covariance[(k, k)].max(0.0).sqrt(),
        );
    }
    for (i, label_i) in FANO_LABELS.iter().enumerate() {
        for (j, label_j) in FANO_LABELS.iter().enumerate().skip(i) {
            push_float(
                &mut out,
                &format!("cov_{label_i}_{label_j}"),
                t.covariance[(i, j)],
            );
        }
    }
    let rho = t.rho_hat.matrix();
    for i in 0..4 {
        for j in i..4 {
            push_float(&mut out, &format!("rho_{i}{j}_re"), rho[(i, j)].re);
            if j > i {
                push_float(&mut out, &format!("rho_{i}{j}_im"), rho[(i, j)].im);
            }
        }
    }
    out
}

/// Renders a bootstrap document: interval summaries per witness.
pub fn render_bootstrap(b: &BootstrapSummary) -> String {
    let mut out = String::new();
    push_kv(&mut out, "record", "bootstrap");
    push_kv(&mut out, "n_resamples", b.n_resamples);
    push_kv(&mut out, "n_failed", b.n_failed);
    for (name, interval) in [
        ("m12", &b.m12),
        ("concurrence", &b.concurrence),
        ("chsh_max", &b.chsh_max),
    ] {
        push_float(&mut out, &format!("{name}_mean"), interval.mean);
        push_float(&mut out, &format!("{name}_sigma"), interval.sigma);
        push_float(&mut out, &format!("{name}_p16"), interval.p16);
        push_float(&mut out, &format!("{name}_p84"), interval.p84);
    }
    for (k, label) in FANO_LABELS.iter().enumerate() {
        push_float(
            &mut out,
            &format!("boot_sigma_{label}"),
            b.fano_covariance[(k, k)].max(0.0).sqrt(),
        );
    }
    out
}

/// Renders the significance verdict.
pub fn render_significance(s: &SignificanceReport) -> String {
    let mut out = String::new();
    push_kv(&mut out, "record", "significance");
    push_float(&mut out, "m12_hat", s.m12_hat);
    push_float(&mut out, "m12_sigma", s.m12_sigma);
    push_float(&mut out, "z_nonlocality", s.z_nonlocality);
    push_float(&mut out, "concurrence_hat", s.concurrence_hat);
    push_float(&mut out, "concurrence_sigma", s.concurrence_sigma);
    push_float(&mut out, "z_entanglement", s.z_entanglement);
    push_float(&mut out, "chsh_max_hat", s.chsh_max_hat);
    push_kv(&mut out, "tsirelson_ok", s.tsirelson_ok);
    push_kv(&mut out, "exactly_critical", s.exactly_critical);
    push_kv(&mut out, "degenerate_z", s.degenerate_z);
    out
}

/// Renders a witness document for one exactly-known state.
pub fn render_witness(w: &WitnessReport) -> String {
    let mut out = String::new();
    push_kv(&mut out, "record", "witness");
    push_float(&mut out, "concurrence", w.concurrence);
    push_float(&mut out, "m1", w.horodecki.m1);
    push_float(&mut out, "m2", w.horodecki.m2);
    push_float(&mut out, "m3", w.horodecki.m3);
    push_float(&mut out, "m12", w.horodecki.m12);
    push_float(&mut out, "chsh_max", w.horodecki.chsh_max);
    push_float(&mut out, "optimal_value", w.optimal_value);
    push_kv(&mut out, "degenerate", w.degenerate);
    push_direction(&mut out, "n1", &w.directions.n1);
    push_direction(&mut out, "n2", &w.directions.n2);
    push_direction(&mut out, "n3", &w.directions.n3);
    push_direction(&mut out, "n4", &w.directions.n4);
    push_float(&mut out, "prob_lhs", w.probability.lhs);
    push_float(&mut out, "prob_rhs", w.probability.rhs);
    push_kv(&mut out, "prob_violated", w.probability.violated);
    push_kv(&mut out, "tsirelson_ok", w.tsirelson_ok);
    out
}

/// Renders generator counters.
pub fn render_generation_stats(s: &GenerationStats) -> String {
    let mut out = String::new();
    push_kv(&mut out, "record", "generation");
    push_kv(&mut out, "n_events", s.n_events);
    push_kv(&mut out, "n_proposals", s.n_proposals);
    push_float(&mut out, "acceptance_rate", s.acceptance_rate);
    push_float(&mut out, "envelope_max", s.envelope_max);
    push_kv(&mut out, "cut_rejected", s.cut_rejected);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate_events, StateSource};
    use crate::state::{tau_pair_state, ScatteringAngle};
    use crate::tomography::{bootstrap, estimate_fano, witness_significance};
    use std::io::Cursor;

    fn sample_file(n: u64, seed: u64) -> (EventFileMeta, Vec<EventRecord>, String) {
        let config = GeneratorConfig::new(n, seed);
        let (events, _) = generate_events(config, StateSource::TauPair).unwrap();
        let meta = EventFileMeta::from_config(&config);
        let mut buffer = Vec::new();
        write_events(&mut buffer, &meta, &events).unwrap();
        (meta, events, String::from_utf8(buffer).unwrap())
    }

    #[test]
    fn event_files_round_trip_exactly() {
        let (meta, events, text) = sample_file(50, 99);
        assert_eq!(text.lines().count(), 52, "N + 2 lines");
        let (meta_back, events_back) = read_events(Cursor::new(text.as_bytes())).unwrap();
        assert_eq!(meta, meta_back);
        assert_eq!(events, events_back, "17-digit floats round-trip exactly");

        // Re-writing the parsed stream is byte-identical.
        let mut rewritten = Vec::new();
        write_events(&mut rewritten, &meta_back, &events_back).unwrap();
        assert_eq!(text.as_bytes(), rewritten.as_slice());
    }

    #[test]
    fn write_rejects_inconsistent_metadata() {
        let (mut meta, events, _) = sample_file(10, 1);
        meta.n_events = 11;
        let mut buffer = Vec::new();
        assert!(write_events(&mut buffer, &meta, &events).is_err());
    }

    #[test]
    fn read_reports_line_numbers() {
        let (_, _, text) = sample_file(5, 2);

        // Corrupt one data field on line 4 (event index 1).
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[3] = lines[3].replace(' ', "  ").replacen("e-", "spam", 1);
        let broken = lines.join("\n");
        match read_events(Cursor::new(broken.as_bytes())) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }

        // Wrong field count.
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[4].push_str(" 0.5");
        match read_events(Cursor::new(lines.join("\n").into_bytes())) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 5);
                assert!(message.contains("9"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }

        // Non-unit direction vector.
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let fields: Vec<String> = lines[2]
            .split_whitespace()
            .enumerate()
            .map(|(k, f)| {
                if k == 2 {
                    "5.0e-1".to_string()
                } else {
                    f.to_string()
                }
            })
            .collect();
        lines[2] = fields.join(" ");
        match read_events(Cursor::new(lines.join("\n").into_bytes())) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("n_plus"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }

        // Truncated file: count mismatch against metadata.
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines.pop();
        match read_events(Cursor::new(lines.join("\n").into_bytes())) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 6);
                assert!(message.contains("claims 5"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }

        // Missing metadata key.
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[0] = lines[0].replace("seed=2 ", "");
        match read_events(Cursor::new(lines.join("\n").into_bytes())) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 1);
                assert!(message.contains("seed"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }

        // Bad frame name.
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[0] = lines[0].replace("frame=helicity", "frame=sideways");
        match read_events(Cursor::new(lines.join("\n").into_bytes())) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 1);
                assert!(message.contains("sideways"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }

        // Wrong header.
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[1] = "# wrong header".to_string();
        match read_events(Cursor::new(lines.join("\n").into_bytes())) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn reports_are_flat_key_value_documents() {
        let config = GeneratorConfig::new(500, 4);
        let (events, stats) = generate_events(config, StateSource::TauPair).unwrap();
        let t = estimate_fano(&events, 1.0, 1.0).unwrap();
        let boot = bootstrap(&events, 1.0, 1.0, 120, 5).unwrap();
        let sig = witness_significance(&t, &boot);
        let witness = crate::witness::WitnessReport::from_state(
            &tau_pair_state(ScatteringAngle::new(1.0).unwrap()).density(),
        )
        .unwrap();

        for (text, record) in [
            (render_tomography(&t), "tomography"),
            (render_bootstrap(&boot), "bootstrap"),
            (render_significance(&sig), "significance"),
            (render_witness(&witness), "witness"),
            (render_generation_stats(&stats), "generation"),
        ] {
            let mut lines = text.lines();
            assert_eq!(lines.next().unwrap(), format!("record={record}"));
            for line in lines {
                let (key, value) = line.split_once('=').expect("flat key=value");
                assert!(!key.is_empty() && !key.contains(' '), "key `{key}`");
                assert!(!value.is_empty());
            }
            // Deterministic rendering.
            let again = match record {
                "tomography" => render_tomography(&t),
                "bootstrap" => render_bootstrap(&boot),
                "significance" => render_significance(&sig),
                "witness" => render_witness(&witness),
                _ => render_generation_stats(&stats),
            };
            assert_eq!(text, again);
        }

        // Spot-check a few keys exist with parseable values.
        let t_text = render_tomography(&t);
        assert!(t_text.contains("\nc_zz="));
        assert!(t_text.contains("\nsigma_c_zz="));
        assert!(t_text.contains("\ncov_b_plus_x_c_zz="));
        assert!(t_text.contains("\nrho_03_im="));
        let line = t_text.lines().find(|l| l.starts_with("c_zz=")).unwrap();
        let value: f64 = line.split_once('=').unwrap().1.parse().unwrap();
        assert!((-9.0..=9.0).contains(&value));
    }
}
