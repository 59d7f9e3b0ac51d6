//! CSV and SVG writers for sweep results.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scenario::sweep::SweepResult;

pub const CSV_HEADER: &str = "axis,stage,lambda,physical,hurwitz";

/// 17 significant digits, locale-free.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(r: &SweepResult, mut w: W) -> io::Result<()> {
    let mut out = String::with_capacity(64 * (r.rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in &r.rows {
        let lambda = row.lambda.map(num).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{},{}", num(row.axis), csv_field(&row.stage), lambda, row.physical, row.hurwitz);
    }
    w.write_all(out.as_bytes())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn require_rows(r: &SweepResult) -> Result<()> {
    if r.rows.is_empty() {
        Err(Error::Domain("sweep result has no rows".into()))
    } else {
        Ok(())
    }
}

pub fn emit_csv(r: &SweepResult, path: &Path) -> Result<()> {
    require_rows(r)?;
    let mut buf = Vec::new();
    write_csv(r, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn emit_svg(r: &SweepResult, path: &Path) -> Result<()> {
    require_rows(r)?;
    fs::write(path, render_svg(r))?;
    Ok(())
}

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 220.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn decade_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        let e = v.abs().log10().round() as i32;
        let sign = if v < 0.0 { "-" } else { "" };
        if (0..=3).contains(&e) {
            format!("{sign}{}", 10i64.pow(e as u32))
        } else {
            format!("{sign}1e{e}")
        }
    }
}

/// Line chart of λ against the sweep axis, y on an asinh scale.
pub fn render_svg(r: &SweepResult) -> String {
    let xs: Vec<f64> = r.rows.iter().map(|row| row.axis).collect();
    let (mut x0, mut x1) = bounds(xs.iter().copied()).unwrap_or((0.0, 1.0));
    if x0 == x1 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let ys: Vec<f64> = r.rows.iter().filter_map(|row| row.lambda).map(f64::asinh).collect();
    let (mut y0, mut y1) = bounds(ys.iter().copied().chain([0.0])).unwrap_or((-1.0, 1.0));
    if y0 == y1 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| TOP + (y1 - y) / (y1 - y0) * plot_h;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="960" height="600" viewBox="0 0 960 600">"#
    );
    let _ = writeln!(s, "<title>entanglement witness vs {}</title>", escape(r.axis.as_str()));
    let _ = writeln!(
        s,
        "<desc>scenario sha256 {} / qradar {}</desc>",
        escape(&r.scenario_hash),
        escape(&r.version)
    );
    let _ = writeln!(s, r##"<rect x="0" y="0" width="960" height="600" fill="#ffffff"/>"##);
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#000000" stroke-width="1"/>"##
    );

    // y ticks at 0 and signed decades
    let _ = writeln!(s, r##"<g font-family="sans-serif" font-size="12" fill="#000000">"##);
    let mut ticks = vec![0.0];
    for e in -3..=12 {
        let v = 10f64.powi(e);
        ticks.push(v);
        ticks.push(-v);
    }
    let mut last_py = f64::NAN;
    let mut yt: Vec<f64> = ticks.into_iter().filter(|v| (y0..=y1).contains(&v.asinh())).collect();
    yt.sort_by(f64::total_cmp);
    for v in yt {
        let y = py(v.asinh());
        if (y - last_py).abs() < 14.0 {
            continue;
        }
        last_py = y;
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd" stroke-width="1"/>"##,
            LEFT,
            LEFT + plot_w
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            decade_label(v)
        );
    }
    for k in 0..=5 {
        let x = x0 + (x1 - x0) * k as f64 / 5.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(x),
            TOP + plot_h + 18.0,
            format_tick(x)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 20.0,
        escape(r.axis.caption())
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">SPH witness (asinh scale)</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    let _ = writeln!(s, "</g>");

    if (y0..=y1).contains(&0.0) {
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#000000" stroke-width="1" stroke-dasharray="4 3"/>"##,
            LEFT,
            py(0.0),
            LEFT + plot_w,
            py(0.0)
        );
    }

    for (k, label) in r.stages.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut pts = String::new();
        for row in r.series(label) {
            if let Some(l) = row.lambda {
                if !pts.is_empty() {
                    pts.push(' ');
                }
                let _ = write!(pts, "{:.2},{:.2}", px(row.axis), py(l.asinh()));
            }
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"><title>{}</title></polyline>"#,
            escape(label)
        );
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 26.0,
            ly + 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn format_tick(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-2..1e4).contains(&a) {
        format!("{x:.2e}")
    } else {
        let t = format!("{x:.3}");
        let t = t.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" { "0".into() } else { t.to_string() }
    }
}

fn bounds(it: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    it.filter(|v| v.is_finite())
        .fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::config::SweepAxis;
    use crate::scenario::sweep::SweepRow;

    fn two_rows() -> SweepResult {
        SweepResult {
            axis: SweepAxis::Detuning,
            stages: vec!["oc-mc:0-source".into()],
            rows: vec![
                SweepRow {
                    axis: -0.5,
                    stage: "oc-mc:0-source".into(),
                    lambda: Some(1.25),
                    physical: true,
                    hurwitz: true,
                },
                SweepRow {
                    axis: 0.5,
                    stage: "oc-mc:0-source".into(),
                    lambda: None,
                    physical: false,
                    hurwitz: false,
                },
            ],
            scenario_hash: "abc".into(),
            version: "0.0.0".into(),
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&two_rows(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "axis,stage,lambda,physical,hurwitz\n\
             -5.0000000000000000e-1,oc-mc:0-source,1.2500000000000000e0,true,true\n\
             5.0000000000000000e-1,oc-mc:0-source,,false,false\n"
        );
    }

    #[test]
    fn svg_has_one_polyline_per_stage() {
        let svg = render_svg(&two_rows());
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("<title>oc-mc:0-source</title>"));
        assert!(svg.contains(r#"viewBox="0 0 960 600""#));
        assert_eq!(svg, render_svg(&two_rows()));
    }

    #[test]
    fn labels_are_escaped() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
        assert_eq!(csv_field("x,y"), "\"x,y\"");
    }

    #[test]
    fn empty_result_rejected() {
        let mut r = two_rows();
        r.rows.clear();
        let dir = std::env::temp_dir();
        assert!(emit_csv(&r, &dir.join("never-written.csv")).is_err());
    }
}
