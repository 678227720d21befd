use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use super::{EstimateReport, ExperimentError};

/// `v` rounded to 10 significant digits, printed in shortest form.
pub fn fmt_sig(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.9e}").parse().expect("formatted float parses");
    rounded.to_string()
}

pub(crate) fn serialize_sig<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(fmt_sig(*v).parse().unwrap_or(*v))
}

pub(crate) fn serialize_sig_opt<S: serde::Serializer>(
    v: &Option<f64>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => serialize_sig(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Serialize)]
struct CsvRow {
    n0: usize,
    n1: usize,
    mode: String,
    samples: u64,
    hits: u64,
    marginal_discards: u64,
    p_hat: String,
    ci_low: String,
    ci_high: String,
    theory: String,
    seed: u64,
}

/// Writes one CSV row per report under the header
/// `n0,n1,mode,samples,hits,marginal_discards,p_hat,ci_low,ci_high,theory,seed`.
pub fn write_csv<W: Write>(out: W, reports: &[EstimateReport]) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(CsvRow {
            n0: r.n0,
            n1: r.n1,
            mode: r.mode.to_string(),
            samples: r.samples,
            hits: r.hits,
            marginal_discards: r.marginal_discards,
            p_hat: fmt_sig(r.p_hat),
            ci_low: fmt_sig(r.ci_low),
            ci_high: fmt_sig(r.ci_high),
            theory: r.theory.map(fmt_sig).unwrap_or_default(),
            seed: r.seed,
        })
        .map_err(|e| ExperimentError::Output(e.to_string()))?;
    }
    w.flush()
        .map_err(|e| ExperimentError::Output(e.to_string()))
}

/// Writes any flat serializable rows as CSV with a header from the field names.
pub fn write_rows_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)
            .map_err(|e| ExperimentError::Output(e.to_string()))?;
    }
    w.flush()
        .map_err(|e| ExperimentError::Output(e.to_string()))
}

/// Pretty-printed JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(
    mut out: W,
    value: &T,
) -> Result<(), ExperimentError> {
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(|e| ExperimentError::Output(e.to_string()))?;
    writeln!(out).map_err(|e| ExperimentError::Output(e.to_string()))
}

/// Line chart of `p_hat` (with its interval) against `n1 - n0`, one series per
/// `n0`, with a dashed line at `1 / 4^{n0+1}` for each.
pub fn sweep_svg(reports: &[EstimateReport]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 56.0;
    const COLORS: [&str; 6] = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
    ];

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    if reports.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let offsets: Vec<f64> = reports.iter().map(|r| r.n1 as f64 - r.n0 as f64).collect();
    let x_min = offsets.iter().copied().fold(f64::INFINITY, f64::min);
    let x_max = offsets
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
        .max(x_min + 1.0);
    let y_max = reports
        .iter()
        .map(|r| r.ci_high.max(r.reference()))
        .fold(0.0, f64::max)
        * 1.1;
    let y_max = if y_max > 0.0 { y_max } else { 1.0 };
    let sx = |x: f64| PAD + (x - x_min) / (x_max - x_min) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - y / y_max * (H - 2.0 * PAD);

    let _ = writeln!(
        svg,
        r#"<g stroke="black" fill="none"><line x1="{PAD}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{b}"/></g>"#,
        b = H - PAD,
        r = W - PAD
    );
    let _ = writeln!(
        svg,
        r#"<g font-family="sans-serif" font-size="12"><text x="{}" y="{}" text-anchor="middle">n1 - n0</text><text x="14" y="{}" transform="rotate(-90 14 {})" text-anchor="middle">p_hat</text>"#,
        W / 2.0,
        H - 16.0,
        H / 2.0,
        H / 2.0
    );
    for k in 0..=4 {
        let y = y_max * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            PAD - 6.0,
            sy(y) + 4.0,
            fmt_sig((y * 1e4).round() / 1e4)
        );
    }
    let mut x = x_min.ceil();
    while x <= x_max {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{x}</text>"#,
            sx(x),
            H - PAD + 16.0
        );
        x += 1.0;
    }
    svg.push_str("</g>\n");

    let mut n0s: Vec<usize> = reports.iter().map(|r| r.n0).collect();
    n0s.sort_unstable();
    n0s.dedup();
    for (series, n0) in n0s.iter().enumerate() {
        let color = COLORS[series % COLORS.len()];
        let cells: Vec<&EstimateReport> = reports.iter().filter(|r| r.n0 == *n0).collect();
        let reference = cells[0].reference();
        let _ = writeln!(
            svg,
            r#"<line x1="{PAD}" y1="{y}" x2="{r}" y2="{y}" stroke="{color}" stroke-dasharray="6 4"/>"#,
            y = sy(reference),
            r = W - PAD
        );
        let points: Vec<String> = cells
            .iter()
            .map(|c| format!("{:.2},{:.2}", sx(c.n1 as f64 - c.n0 as f64), sy(c.p_hat)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}"/>"#,
            points.join(" ")
        );
        for c in &cells {
            let cx = sx(c.n1 as f64 - c.n0 as f64);
            let _ = writeln!(
                svg,
                r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="{color}"/><circle cx="{cx:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                sy(c.ci_low),
                sy(c.ci_high),
                sy(c.p_hat)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="{color}">n0 = {n0}</text>"#,
            W - PAD - 60.0,
            PAD + 16.0 * series as f64
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::Mode;

    fn report(n1: usize, p: f64) -> EstimateReport {
        EstimateReport {
            n0: 2,
            n1,
            mode: Mode::Exact,
            samples: 100,
            hits: (p * 100.0) as u64,
            marginal_discards: 0,
            p_hat: p,
            ci_low: p / 2.0,
            ci_high: p * 1.5,
            theory: (n1 == 3).then_some(0.078125),
            seed: 7,
            e_minus_hits: 0,
            rejections: 0,
        }
    }

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.078125), "0.078125");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.3333333333");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(123456.789012345), "123456.789");
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[report(3, 0.08), report(4, 0.05)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "n0,n1,mode,samples,hits,marginal_discards,p_hat,ci_low,ci_high,theory,seed"
        );
        assert_eq!(lines[1], "2,3,exact,100,8,0,0.08,0.04,0.12,0.078125,7");
        assert_eq!(lines[2], "2,4,exact,100,5,0,0.05,0.025,0.075,,7");
    }

    #[test]
    fn svg_has_dashed_reference() {
        let svg = sweep_svg(&[report(3, 0.08), report(4, 0.05)]);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("stroke-dasharray"));
        assert_eq!(svg.matches("<circle").count(), 2);
    }

    #[test]
    fn svg_accepts_layers_narrower_than_input() {
        let svg = sweep_svg(&[report(1, 0.25), report(2, 0.125), report(3, 0.08)]);
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains(">-1</text>"));
    }
}
