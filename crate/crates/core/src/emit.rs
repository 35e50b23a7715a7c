//! Deterministic serialization of results: JSON, CSV and SVG as plain
//! strings.
//!
//! Everything here is a pure function of its input — no timestamps, no
//! ambient state, fixed key order, fixed formatting — so identical runs
//! produce byte-identical files.  Floating-point values are written with 17
//! significant digits ({:.16e}), enough to round-trip f64 exactly; non-finite
//! values become JSON `null` (and `nan`/`inf` in CSV, where the column must
//! keep its slot).

use std::fmt;

use crate::dynamics::{RunMeta, Trajectory};
use crate::floquet::StabilityMap;

/// JSON document with insertion-ordered object keys.
#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    /// Finite values render as {:.16e}; NaN/±∞ render as `null`.
    Num(f64),
    /// Integers render without an exponent.
    Int(i64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

impl Json {
    pub fn obj(pairs: impl IntoIterator<Item = (&'static str, Json)>) -> Json {
        Json::Obj(
            pairs
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        )
    }

    pub fn num_array(values: impl IntoIterator<Item = f64>) -> Json {
        Json::Arr(values.into_iter().map(Json::Num).collect())
    }

    pub fn from_option(value: Option<f64>) -> Json {
        match value {
            Some(v) => Json::Num(v),
            None => Json::Null,
        }
    }
}

impl fmt::Display for Json {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        render_json(self, 0, &mut out);
        f.write_str(&out)
    }
}

/// Format a float for data files: 17 significant digits, round-trip exact.
pub fn fmt_f64(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else if value.is_nan() {
        "nan".to_string()
    } else if value > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn escape_json(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

fn render_json(j: &Json, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match j {
        Json::Null => out.push_str("null"),
        Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Json::Num(v) => {
            if v.is_finite() {
                out.push_str(&format!("{v:.16e}"));
            } else {
                out.push_str("null");
            }
        }
        Json::Int(v) => out.push_str(&v.to_string()),
        Json::Str(s) => escape_json(s, out),
        Json::Arr(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad);
                out.push_str("  ");
                render_json(item, indent + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad);
            out.push(']');
        }
        Json::Obj(pairs) => {
            if pairs.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, v)) in pairs.iter().enumerate() {
                out.push_str(&pad);
                out.push_str("  ");
                escape_json(k, out);
                out.push_str(": ");
                render_json(v, indent + 1, out);
                if i + 1 < pairs.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad);
            out.push('}');
        }
    }
}

/// CSV with the given header; every cell is written by [`fmt_f64`].
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Trajectory samples as CSV (time, p, ṗ, and Δn when present).
pub fn trajectory_csv(traj: &Trajectory) -> String {
    match &traj.delta_n {
        Some(dn) => csv_table(
            &["time_s", "p_esu_cm", "p_dot_esu_cm_per_s", "delta_n"],
            (0..traj.len()).map(|i| vec![traj.times[i], traj.p[i], traj.p_dot[i], dn[i]]),
        ),
        None => csv_table(
            &["time_s", "p_esu_cm", "p_dot_esu_cm_per_s"],
            (0..traj.len()).map(|i| vec![traj.times[i], traj.p[i], traj.p_dot[i]]),
        ),
    }
}

/// Stability map as long-format CSV: one row per (ν/ω₀, A) cell.
pub fn map_csv(map: &StabilityMap) -> String {
    let mut rows = Vec::with_capacity(map.nu_ratios.len() * map.drive_amplitudes.len());
    for (i, &nu) in map.nu_ratios.iter().enumerate() {
        for (j, &a) in map.drive_amplitudes.iter().enumerate() {
            rows.push(vec![nu, a, map.exponents[i][j]]);
        }
    }
    csv_table(&["nu_over_omega0", "drive_amplitude", "exponent_over_omega0"], rows)
}

/// Stability map as a JSON document (grids, exponents, contour, tongue tips).
pub fn map_json(map: &StabilityMap) -> Json {
    Json::obj([
        ("gamma_over_omega0", Json::Num(map.gamma_ratio)),
        ("nu_over_omega0", Json::num_array(map.nu_ratios.iter().copied())),
        (
            "drive_amplitude",
            Json::num_array(map.drive_amplitudes.iter().copied()),
        ),
        (
            "exponent_over_omega0",
            Json::Arr(
                map.exponents
                    .iter()
                    .map(|col| Json::num_array(col.iter().copied()))
                    .collect(),
            ),
        ),
        (
            "zero_growth_contour",
            Json::Arr(
                map.contour
                    .iter()
                    .map(|&(nu, a)| {
                        Json::obj([
                            ("nu_over_omega0", Json::Num(nu)),
                            ("drive_amplitude", Json::Num(a)),
                        ])
                    })
                    .collect(),
            ),
        ),
        (
            "tongue_tips",
            Json::Arr(
                map.tongue_tips
                    .iter()
                    .map(|tip| {
                        Json::obj([
                            ("order", Json::Int(tip.order as i64)),
                            ("nu_over_omega0", Json::Num(tip.nu_ratio)),
                            ("drive_amplitude", Json::Num(tip.a_threshold)),
                        ])
                    })
                    .collect(),
            ),
        ),
    ])
}

/// Run metadata as a JSON object.
pub fn meta_json(meta: &RunMeta) -> Json {
    Json::obj([
        ("model", Json::Str(meta.model.clone())),
        ("omega0_rad_per_s", Json::Num(meta.omega0)),
        (
            "params",
            Json::Obj(
                meta.params
                    .iter()
                    .map(|(k, v)| (k.clone(), Json::Num(*v)))
                    .collect(),
            ),
        ),
        ("steps_per_period", Json::Int(meta.steps_per_period as i64)),
        ("horizon_periods", Json::Num(meta.horizon_periods)),
        (
            "seed",
            match meta.seed {
                Some(s) => Json::Int(s as i64),
                None => Json::Null,
            },
        ),
    ])
}

// ---------------------------------------------------------------------------
// SVG rendering
// ---------------------------------------------------------------------------

const SVG_W: f64 = 860.0;
const SVG_H: f64 = 640.0;
const PLOT_X0: f64 = 90.0;
const PLOT_X1: f64 = 720.0;
const PLOT_Y0: f64 = 60.0; // top
const PLOT_Y1: f64 = 570.0; // bottom

/// Diverging blue–white–red ramp over t ∈ [−1, 1] (stable → unstable).
fn ramp(t: f64) -> (u8, u8, u8) {
    let t = t.clamp(-1.0, 1.0);
    let lerp = |a: f64, b: f64, u: f64| (a + (b - a) * u).round() as u8;
    if t < 0.0 {
        let u = 1.0 + t; // −1 → 0 (deep blue), 0 → 1 (white)
        (lerp(59.0, 255.0, u), lerp(76.0, 255.0, u), lerp(192.0, 255.0, u))
    } else {
        let u = t; // 0 (white) → 1 (deep red)
        (lerp(255.0, 180.0, u), lerp(255.0, 4.0, u), lerp(255.0, 38.0, u))
    }
}

fn svg_header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" \
         viewBox=\"0 0 {SVG_W} {SVG_H}\">\n\
         <rect x=\"0\" y=\"0\" width=\"{SVG_W}\" height=\"{SVG_H}\" fill=\"white\"/>\n\
         <text x=\"{:.1}\" y=\"30\" font-family=\"monospace\" font-size=\"16\" \
         text-anchor=\"middle\">{}</text>\n",
        (PLOT_X0 + PLOT_X1) / 2.0,
        xml_escape(title)
    )
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axis_box() -> String {
    format!(
        "<rect x=\"{PLOT_X0}\" y=\"{PLOT_Y0}\" width=\"{:.1}\" height=\"{:.1}\" \
         fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n",
        PLOT_X1 - PLOT_X0,
        PLOT_Y1 - PLOT_Y0
    )
}

fn text(x: f64, y: f64, anchor: &str, size: u32, s: &str) -> String {
    format!(
        "<text x=\"{x:.1}\" y=\"{y:.1}\" font-family=\"monospace\" font-size=\"{size}\" \
         text-anchor=\"{anchor}\">{}</text>\n",
        xml_escape(s)
    )
}

/// Heat map of the Floquet exponent with the zero-growth contour and tongue
/// tips overlaid.  Colors are normalized by the largest |exponent| in the
/// map: blue = decaying, white = marginal, red = growing.
pub fn map_svg(map: &StabilityMap) -> String {
    let (nu_min, nu_max) = (map.nu_ratios[0], *map.nu_ratios.last().unwrap());
    let (a_min, a_max) = (
        map.drive_amplitudes[0],
        *map.drive_amplitudes.last().unwrap(),
    );
    let x_of = |nu: f64| PLOT_X0 + (nu - nu_min) / (nu_max - nu_min) * (PLOT_X1 - PLOT_X0);
    let y_of = |a: f64| PLOT_Y1 - (a - a_min) / (a_max - a_min) * (PLOT_Y1 - PLOT_Y0);
    let max_abs = map
        .exponents
        .iter()
        .flatten()
        .fold(0.0f64, |acc, e| acc.max(e.abs()))
        .max(f64::MIN_POSITIVE);

    let mut out = svg_header(&format!(
        "Floquet exponent / omega0 (gamma/omega0 = {:.3e})",
        map.gamma_ratio
    ));

    // Cells, centered on grid points; edge cells extend half a spacing.
    let n_nu = map.nu_ratios.len();
    let n_a = map.drive_amplitudes.len();
    for i in 0..n_nu {
        let x_lo = if i == 0 {
            x_of(nu_min)
        } else {
            x_of(0.5 * (map.nu_ratios[i - 1] + map.nu_ratios[i]))
        };
        let x_hi = if i + 1 == n_nu {
            x_of(nu_max)
        } else {
            x_of(0.5 * (map.nu_ratios[i] + map.nu_ratios[i + 1]))
        };
        for j in 0..n_a {
            let y_hi = if j == 0 {
                y_of(a_min)
            } else {
                y_of(0.5 * (map.drive_amplitudes[j - 1] + map.drive_amplitudes[j]))
            };
            let y_lo = if j + 1 == n_a {
                y_of(a_max)
            } else {
                y_of(0.5 * (map.drive_amplitudes[j] + map.drive_amplitudes[j + 1]))
            };
            let (r, g, b) = ramp(map.exponents[i][j] / max_abs);
            out.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
                 fill=\"rgb({r},{g},{b})\"/>\n",
                x_lo,
                y_lo,
                x_hi - x_lo,
                y_hi - y_lo
            ));
        }
    }

    // Zero-growth contour: polylines broken where columns have no crossing.
    let spacing = (nu_max - nu_min) / (n_nu - 1) as f64;
    let mut segment: Vec<(f64, f64)> = Vec::new();
    let flush = |segment: &mut Vec<(f64, f64)>, out: &mut String| {
        if segment.len() >= 2 {
            let pts: Vec<String> = segment
                .iter()
                .map(|&(x, y)| format!("{x:.2},{y:.2}"))
                .collect();
            out.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n",
                pts.join(" ")
            ));
        }
        segment.clear();
    };
    let mut last_nu = f64::NEG_INFINITY;
    for &(nu, a) in &map.contour {
        if !segment.is_empty() && nu - last_nu > 1.5 * spacing {
            flush(&mut segment, &mut out);
        }
        segment.push((x_of(nu), y_of(a)));
        last_nu = nu;
    }
    flush(&mut segment, &mut out);

    // Tongue tips.
    for tip in &map.tongue_tips {
        let (x, y) = (x_of(tip.nu_ratio), y_of(tip.a_threshold));
        out.push_str(&format!(
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"none\" stroke=\"black\" \
             stroke-width=\"1.5\"/>\n"
        ));
        out.push_str(&text(x, (y - 8.0).max(12.0), "middle", 12, &format!("N={}", tip.order)));
    }

    out.push_str(&axis_box());
    out.push_str(&text(
        (PLOT_X0 + PLOT_X1) / 2.0,
        PLOT_Y1 + 40.0,
        "middle",
        14,
        "nu / omega0",
    ));
    out.push_str(&text(PLOT_X0, PLOT_Y1 + 20.0, "middle", 12, &format!("{nu_min:.3}")));
    out.push_str(&text(PLOT_X1, PLOT_Y1 + 20.0, "middle", 12, &format!("{nu_max:.3}")));
    out.push_str(&text(PLOT_X0 - 10.0, PLOT_Y1, "end", 12, &format!("{a_min:.3}")));
    out.push_str(&text(PLOT_X0 - 10.0, PLOT_Y0 + 8.0, "end", 12, &format!("{a_max:.3}")));
    out.push_str(&format!(
        "<text x=\"28\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"14\" \
         text-anchor=\"middle\" transform=\"rotate(-90 28 {:.1})\">drive amplitude A</text>\n",
        (PLOT_Y0 + PLOT_Y1) / 2.0,
        (PLOT_Y0 + PLOT_Y1) / 2.0
    ));

    // Color legend.
    let (lx, ly0, ly1) = (PLOT_X1 + 40.0, PLOT_Y0, PLOT_Y1);
    let n_sw = 64;
    for k in 0..n_sw {
        let t = 1.0 - 2.0 * k as f64 / (n_sw - 1) as f64; // +1 (top) → −1
        let (r, g, b) = ramp(t);
        let y = ly0 + (ly1 - ly0) * k as f64 / n_sw as f64;
        out.push_str(&format!(
            "<rect x=\"{lx:.1}\" y=\"{y:.2}\" width=\"20\" height=\"{:.2}\" fill=\"rgb({r},{g},{b})\"/>\n",
            (ly1 - ly0) / n_sw as f64 + 0.5
        ));
    }
    out.push_str(&text(lx + 26.0, ly0 + 10.0, "start", 12, &format!("+{max_abs:.2e}")));
    out.push_str(&text(lx + 26.0, (ly0 + ly1) / 2.0, "start", 12, "0"));
    out.push_str(&text(lx + 26.0, ly1, "start", 12, &format!("-{max_abs:.2e}")));

    out.push_str("</svg>\n");
    out
}

/// Dipole-moment trace p(t) as a line plot, downsampled to at most ~2000
/// points.
pub fn trajectory_svg(traj: &Trajectory) -> String {
    let n = traj.len();
    let stride = n.div_ceil(2000).max(1);
    let t0 = traj.times[0];
    let t1 = *traj.times.last().unwrap();
    let p_max = traj
        .p
        .iter()
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let x_of = |t: f64| PLOT_X0 + (t - t0) / (t1 - t0) * (PLOT_X1 - PLOT_X0);
    let y_of = |p: f64| {
        let mid = (PLOT_Y0 + PLOT_Y1) / 2.0;
        mid - p / p_max * (PLOT_Y1 - PLOT_Y0) / 2.0
    };

    let mut out = svg_header(&format!(
        "dipole moment p(t), model = {}",
        traj.meta.model
    ));
    out.push_str(&format!(
        "<line x1=\"{PLOT_X0}\" y1=\"{:.1}\" x2=\"{PLOT_X1}\" y2=\"{:.1}\" \
         stroke=\"#cccccc\" stroke-width=\"1\"/>\n",
        (PLOT_Y0 + PLOT_Y1) / 2.0,
        (PLOT_Y0 + PLOT_Y1) / 2.0
    ));
    let pts: Vec<String> = (0..n)
        .step_by(stride)
        .map(|i| format!("{:.2},{:.2}", x_of(traj.times[i]), y_of(traj.p[i])))
        .collect();
    out.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"rgb(59,76,192)\" stroke-width=\"1\"/>\n",
        pts.join(" ")
    ));
    out.push_str(&axis_box());
    out.push_str(&text(
        (PLOT_X0 + PLOT_X1) / 2.0,
        PLOT_Y1 + 40.0,
        "middle",
        14,
        "time (s)",
    ));
    out.push_str(&text(PLOT_X0, PLOT_Y1 + 20.0, "middle", 12, &format!("{t0:.3e}")));
    out.push_str(&text(PLOT_X1, PLOT_Y1 + 20.0, "middle", 12, &format!("{t1:.3e}")));
    out.push_str(&text(PLOT_X0 - 10.0, PLOT_Y0 + 8.0, "end", 12, &format!("+{p_max:.2e}")));
    out.push_str(&text(PLOT_X0 - 10.0, PLOT_Y1, "end", 12, &format!("-{p_max:.2e}")));
    out.push_str(&format!(
        "<text x=\"28\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"14\" \
         text-anchor=\"middle\" transform=\"rotate(-90 28 {:.1})\">p (esu cm)</text>\n",
        (PLOT_Y0 + PLOT_Y1) / 2.0,
        (PLOT_Y0 + PLOT_Y1) / 2.0
    ));
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::stability_map;

    fn sample_json() -> Json {
        Json::obj([
            ("name", Json::Str("run \"x\"\nline2".to_string())),
            ("value", Json::Num(1.0 / 3.0)),
            ("bad", Json::Num(f64::NAN)),
            ("count", Json::Int(42)),
            ("flag", Json::Bool(true)),
            ("list", Json::num_array([1.0, 2.5])),
            ("nothing", Json::Null),
            ("nested", Json::obj([("k", Json::Num(-0.0))])),
        ])
    }

    #[test]
    fn json_round_trips_through_serde() {
        let rendered = sample_json().to_string();
        let parsed: serde_json::Value = serde_json::from_str(&rendered).expect("valid JSON");
        assert_eq!(parsed["name"], "run \"x\"\nline2");
        assert!((parsed["value"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-18);
        assert!(parsed["bad"].is_null());
        assert_eq!(parsed["count"], 42);
        assert_eq!(parsed["list"][1], 2.5);
        assert!(parsed["nothing"].is_null());
    }

    #[test]
    fn json_rendering_is_byte_deterministic() {
        assert_eq!(sample_json().to_string(), sample_json().to_string());
    }

    #[test]
    fn f64_formatting_round_trips_exactly() {
        for v in [1.0 / 3.0, 1e-300, -2.5e17, std::f64::consts::PI] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "string {s}");
        }
        assert_eq!(fmt_f64(f64::NAN), "nan");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_has_header_and_full_precision_rows() {
        let table = csv_table(&["a", "b"], vec![vec![1.0, 0.1], vec![2.0, f64::NAN]]);
        let mut lines = table.lines();
        assert_eq!(lines.next().unwrap(), "a,b");
        let row = lines.next().unwrap();
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[1].parse::<f64>().unwrap(), 0.1);
        assert!(lines.next().unwrap().ends_with("nan"));
    }

    fn small_map() -> crate::floquet::StabilityMap {
        // γ̂ = 5e-3 puts the tongue tip at A ≈ 0.02; a ν step of 0.01 keeps
        // several columns inside the tongue edge A_th ≈ 2|ν̂ − 2|, so the
        // zero-growth contour has enough points to draw.
        let nu: Vec<f64> = (0..9).map(|i| 1.96 + 0.01 * i as f64).collect();
        let a: Vec<f64> = (0..11).map(|j| 0.01 * j as f64).collect();
        stability_map(1.0, 5e-3, &nu, &a, 512).unwrap()
    }

    #[test]
    fn map_outputs_are_consistent_and_deterministic() {
        let map = small_map();
        let csv = map_csv(&map);
        assert_eq!(csv.lines().count(), 1 + 9 * 11);
        assert_eq!(csv, map_csv(&map));

        let json = map_json(&map).to_string();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["exponent_over_omega0"].as_array().unwrap().len(), 9);
        assert!(parsed["zero_growth_contour"].as_array().unwrap().len() > 0);

        let svg = map_svg(&map);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("</svg>"));
        assert!(svg.contains("<rect"));
        assert!(svg.contains("<polyline"));
        assert_eq!(svg, map_svg(&map));
    }

    #[test]
    fn trajectory_outputs_cover_all_columns() {
        let traj = crate::dynamics::simulate_mathieu(1.0, 1e-3, 0.02, 2.0, (1.0, 0.0), 5.0, 64)
            .unwrap();
        let csv = trajectory_csv(&traj);
        assert!(csv.starts_with("time_s,p_esu_cm,p_dot_esu_cm_per_s\n"));
        assert_eq!(csv.lines().count(), 1 + traj.len());
        let svg = trajectory_svg(&traj);
        assert!(svg.contains("polyline"));
        assert!(svg.contains("dipole moment"));
        let meta = meta_json(&traj.meta).to_string();
        let parsed: serde_json::Value = serde_json::from_str(&meta).unwrap();
        assert_eq!(parsed["model"], "mathieu");
        assert_eq!(parsed["steps_per_period"], 64);
        assert!(parsed["seed"].is_null());
    }
}
