//! CSV tables of radial runs and a small log-log SVG chart.

use std::fmt::Write as _;

use crate::asymptotics::ReportRow;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "r,one_minus_r,mean_value,quad_error,ratio,predicted";

pub fn write_csv(rows: &[ReportRow]) -> String {
    let mut out = String::with_capacity(128 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.r, r.one_minus_r, r.mean_value, r.quad_error, r.ratio, r.predicted
        );
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        Some(h) => return Err(Error::Parse(format!("unexpected CSV header {h:?}"))),
        None => return Err(Error::Parse("empty CSV".into())),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("CSV row {}: {e}", i + 1)))?;
            if f.len() != 6 {
                return Err(Error::Parse(format!("CSV row {}: expected 6 fields, got {}", i + 1, f.len())));
            }
            Ok(ReportRow {
                r: f[0],
                one_minus_r: f[1],
                mean_value: f[2],
                quad_error: f[3],
                ratio: f[4],
                predicted: f[5],
            })
        })
        .collect()
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;

/// Log-log plot of the measured means and the predicted curve against
/// `1/(1 − r)`. Output depends only on the rows.
///
/// The predicted curve is left out when that column is NaN throughout.
pub fn svg_chart(rows: &[ReportRow], title: &str) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Domain("no rows to chart".into()));
    }
    let xs: Vec<f64> = rows.iter().map(|r| -r.one_minus_r.log10()).collect();
    let mut series = vec![("measured", "#1f77b4", rows.iter().map(|r| r.mean_value).collect::<Vec<_>>())];
    // reports without a prediction carry NaN in that column
    if !rows.iter().all(|r| r.predicted.is_nan()) {
        series.push(("predicted", "#d62728", rows.iter().map(|r| r.predicted).collect()));
    }
    let mut ys_all = Vec::new();
    for (name, _, ys) in &series {
        for &y in ys {
            if !(y > 0.0 && y.is_finite()) {
                return Err(Error::Domain(format!("{name} value {y} cannot be drawn on a log axis")));
            }
            ys_all.push(y.log10());
        }
    }
    let (x0, x1) = padded(&xs);
    let (y0, y1) = padded(&ys_all);
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<path d="M{m:.1},{t:.1} L{m:.1},{b:.1} L{r:.1},{b:.1}" stroke="black" fill="none"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    for k in (x0.ceil() as i64)..=(x1.floor() as i64) {
        let x = px(k as f64);
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="11">1e{k}</text>"#,
            HEIGHT - MARGIN + 16.0
        );
    }
    for k in (y0.ceil() as i64)..=(y1.floor() as i64) {
        let y = py(k as f64);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{y:.1}" text-anchor="end" font-family="sans-serif" font-size="11">1e{k}</text>"#,
            MARGIN - 6.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="12">1/(1-r)</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0
    );
    for (i, (name, color, ys)) in series.iter().enumerate() {
        let pts: Vec<String> =
            xs.iter().zip(ys).map(|(&x, &y)| format!("{:.2},{:.2}", px(x), py(y.log10()))).collect();
        let dash = if i == 1 { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(
            s,
            r#"<polyline points="{}" stroke="{color}" stroke-width="2" fill="none"{dash}/>"#,
            pts.join(" ")
        );
        let ly = MARGIN + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{ly:.1}" fill="{color}" font-family="sans-serif" font-size="12">{name}</text>"#,
            MARGIN + 10.0
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn padded(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = ((hi - lo) * 0.05).max(0.05);
    (lo - pad, hi + pad)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<ReportRow> {
        (0..4)
            .map(|i| {
                let t = 10f64.powi(-(i + 1));
                ReportRow {
                    r: 1.0 - t,
                    one_minus_r: t,
                    mean_value: t.powf(-0.3),
                    quad_error: 1e-9,
                    ratio: 1.0,
                    predicted: t.powf(-0.3),
                }
            })
            .collect()
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let rs = rows();
        let back = parse_csv(&write_csv(&rs)).unwrap();
        assert_eq!(back, rs);
        assert!(parse_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn chart_is_deterministic() {
        let a = svg_chart(&rows(), "x < y").unwrap();
        assert_eq!(a, svg_chart(&rows(), "x < y").unwrap());
        assert!(a.starts_with("<svg") && a.contains("x &lt; y"));
    }

    #[test]
    fn chart_without_prediction_has_one_series() {
        let mut rs = rows();
        for r in &mut rs {
            r.predicted = f64::NAN;
        }
        let svg = svg_chart(&rs, "means").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        rs[0].predicted = 1.0;
        assert!(svg_chart(&rs, "means").is_err());
    }
}
