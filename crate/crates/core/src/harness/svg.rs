//! Static SVG figures, written by hand so that output is byte-stable.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::harness::SweepRecord;
use crate::points::PointSet;
use crate::stardisc::DiscrepancyResult;

const BLUE: &str = "#1f4fd1";
const RED: &str = "#d1261f";

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, w: u32, h: u32) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">
<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#
    );
}

fn text(out: &mut String, x: f64, y: f64, anchor: &str, s: &str) {
    let _ = writeln!(
        out,
        r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{}</text>"#,
        escape(s)
    );
}

/// Discrepancy against `N` for one dimension: blue markers for every run,
/// a blue line through the per-`N` medians, and the red curve `sqrt(d/N)`.
pub fn plot_sweep_svg(records: &[SweepRecord]) -> Result<String> {
    let first = records
        .first()
        .ok_or_else(|| Error::InvalidArgument("no records to plot".into()))?;
    let d = first.d;
    if records.iter().any(|r| r.d != d) {
        return Err(Error::InvalidArgument(
            "records span several dimensions; plot one dimension per figure".into(),
        ));
    }
    let (w, h) = (640u32, 420u32);
    let (left, right, top, bottom) = (64.0, 24.0, 40.0, 52.0);
    let pw = w as f64 - left - right;
    let ph = h as f64 - top - bottom;

    let mut ns: Vec<usize> = records.iter().map(|r| r.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let (n_lo, n_hi) = (ns[0] as f64, *ns.last().unwrap() as f64);
    let span = if n_hi > n_lo { n_hi - n_lo } else { 1.0 };
    let x_of = |n: f64| {
        if n_hi > n_lo {
            left + (n - n_lo) / span * pw
        } else {
            left + pw / 2.0
        }
    };
    let envelope = |n: f64| (d as f64 / n).sqrt();
    let y_max = records
        .iter()
        .map(|r| r.dstar)
        .chain([envelope(n_lo)])
        .fold(0.0f64, f64::max)
        .min(1.0)
        * 1.05;
    let y_of = |v: f64| top + ph * (1.0 - v.min(y_max) / y_max);

    let mut out = String::new();
    header(&mut out, w, h);
    text(&mut out, w as f64 / 2.0, 24.0, "middle", &format!("Star discrepancy, d = {d}"));

    // Axes and ticks.
    let _ = writeln!(
        out,
        r#"<path d="M{left:.2},{top:.2} V{:.2} H{:.2}" fill="none" stroke="black"/>"#,
        top + ph,
        left + pw
    );
    for &n in &ns {
        let x = x_of(n as f64);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            top + ph,
            top + ph + 5.0
        );
        text(&mut out, x, top + ph + 18.0, "middle", &n.to_string());
    }
    for k in 0..=5 {
        let v = y_max * k as f64 / 5.0;
        let y = y_of(v);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{left:.2}" y2="{y:.2}" stroke="black"/>"#,
            left - 5.0
        );
        text(&mut out, left - 8.0, y + 4.0, "end", &format!("{v:.2}"));
    }
    text(&mut out, left + pw / 2.0, h as f64 - 12.0, "middle", "N");
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">D*</text>"#,
        top + ph / 2.0,
        top + ph / 2.0
    );

    // Envelope.
    let mut path = String::new();
    let steps = 200;
    for s in 0..=steps {
        let n = n_lo + span * s as f64 / steps as f64;
        let n = if n_hi > n_lo { n } else { n_lo };
        let _ = write!(path, "{}{:.2},{:.2} ", if s == 0 { "M" } else { "L" }, x_of(n), y_of(envelope(n)));
    }
    let _ = writeln!(out, r#"<path d="{}" fill="none" stroke="{RED}" stroke-width="2"/>"#, path.trim_end());

    // Medians.
    let mut path = String::new();
    for (k, &n) in ns.iter().enumerate() {
        let mut vals: Vec<f64> = records.iter().filter(|r| r.n == n).map(|r| r.dstar).collect();
        vals.sort_by(f64::total_cmp);
        let m = median_sorted(&vals);
        let _ = write!(path, "{}{:.2},{:.2} ", if k == 0 { "M" } else { "L" }, x_of(n as f64), y_of(m));
    }
    let _ = writeln!(out, r#"<path d="{}" fill="none" stroke="{BLUE}" stroke-width="1.5"/>"#, path.trim_end());

    for r in records {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{BLUE}"/>"#,
            x_of(r.n as f64),
            y_of(r.dstar)
        );
    }

    // Legend.
    let lx = left + pw - 150.0;
    let _ = writeln!(
        out,
        r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{BLUE}" stroke-width="2"/>"#,
        top + 10.0,
        lx + 24.0,
        top + 10.0
    );
    text(&mut out, lx + 30.0, top + 14.0, "start", "measured D*");
    let _ = writeln!(
        out,
        r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{RED}" stroke-width="2"/>"#,
        top + 28.0,
        lx + 24.0,
        top + 28.0
    );
    text(&mut out, lx + 30.0, top + 32.0, "start", "sqrt(d/N)");
    out.push_str("</svg>\n");
    Ok(out)
}

/// Points of a two-dimensional set in the unit square with the witness box
/// `[0, t)` outlined.
pub fn plot_points_svg(ps: &PointSet, result: &DiscrepancyResult) -> Result<String> {
    if ps.dim() != 2 {
        return Err(Error::InvalidArgument(format!(
            "point plots need d = 2, got d = {}",
            ps.dim()
        )));
    }
    if ps.is_empty() {
        return Err(Error::InvalidArgument("no points to plot".into()));
    }
    let side = 400.0;
    let m = 40.0;
    let size = (side + 2.0 * m) as u32;
    let mut out = String::new();
    header(&mut out, size, size + 20);
    text(
        &mut out,
        size as f64 / 2.0,
        24.0,
        "middle",
        &format!("N = {}, D* = {:.4} ({})", ps.len(), result.value, result.kind),
    );
    let _ = writeln!(
        out,
        r#"<rect x="{m:.2}" y="{m:.2}" width="{side:.2}" height="{side:.2}" fill="none" stroke="black"/>"#
    );
    let (t1, t2) = (result.witness.0[0], result.witness.0[1]);
    let _ = writeln!(
        out,
        r#"<rect class="witness" x="{m:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{RED}" fill-opacity="0.08" stroke="{RED}" stroke-dasharray="6 4"/>"#,
        m + side * (1.0 - t2),
        side * t1,
        side * t2
    );
    for i in 0..ps.len() {
        let _ = writeln!(
            out,
            r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="3.5" fill="{BLUE}"/>"#,
            m + side * ps.coord(i, 0),
            m + side * (1.0 - ps.coord(i, 1))
        );
    }
    text(&mut out, m, m + side + 18.0, "middle", "0");
    text(&mut out, m + side, m + side + 18.0, "middle", "1");
    text(&mut out, m - 10.0, m + 4.0, "end", "1");
    out.push_str("</svg>\n");
    Ok(out)
}

pub(crate) fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
