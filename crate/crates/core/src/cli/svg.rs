//! Minimal static SVG charts. Coordinates are printed with two decimals so
//! identical data gives identical bytes.

use std::fmt::Write;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    s
}

/// Maps `v` in `[lo, hi]` to a y pixel inside the plot area.
fn y_pixel(v: f64, lo: f64, hi: f64) -> f64 {
    let span = if hi > lo { hi - lo } else { 1.0 };
    HEIGHT - MARGIN - (v - lo) / span * (HEIGHT - 2.0 * MARGIN)
}

fn value_axis(s: &mut String, lo: f64, hi: f64) {
    for v in [lo, hi] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.3}</text>"#,
            MARGIN - 4.0,
            y_pixel(v, lo, hi) + 4.0
        );
    }
}

/// One bar per `(year, value)`, drawn from the zero line; negative bars red.
pub fn bar_chart(title: &str, bars: &[(i32, f64)]) -> String {
    let mut s = open(title);
    let lo = bars.iter().map(|b| b.1).fold(0.0, f64::min);
    let hi = bars.iter().map(|b| b.1).fold(0.0, f64::max);
    let zero = y_pixel(0.0, lo, hi);
    let slot = (WIDTH - 2.0 * MARGIN) / bars.len().max(1) as f64;
    for (i, &(year, v)) in bars.iter().enumerate() {
        let x = MARGIN + i as f64 * slot;
        let y = y_pixel(v, lo, hi);
        let color = if v < 0.0 { "#d62728" } else { "#1f77b4" };
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}"><title>{year}: {v}</title></rect>"#,
            x + slot * 0.1,
            y.min(zero),
            slot * 0.8,
            (y - zero).abs()
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" transform="rotate(-90 {:.2} {:.2})">{year}</text>"#,
            x + slot * 0.5 + 4.0,
            HEIGHT - MARGIN + 6.0,
            x + slot * 0.5 + 4.0,
            HEIGHT - MARGIN + 6.0
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN:.2}" y1="{zero:.2}" x2="{:.2}" y2="{zero:.2}" stroke="black"/>"#,
        WIDTH - MARGIN
    );
    value_axis(&mut s, lo, hi);
    s.push_str("</svg>\n");
    s
}

/// One polyline per named series of `(year, value)` points.
pub fn line_chart(title: &str, series: &[(String, Vec<(i32, f64)>)]) -> String {
    let mut s = open(title);
    let points = series.iter().flat_map(|(_, pts)| pts.iter());
    let (mut y0, mut y1, mut lo, mut hi) = (i32::MAX, i32::MIN, 0.0f64, 0.0f64);
    for &(year, v) in points {
        y0 = y0.min(year);
        y1 = y1.max(year);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let x_pixel = |year: i32| {
        let span = f64::from((y1 - y0).max(1));
        MARGIN + f64::from(year - y0) / span * (WIDTH - 2.0 * MARGIN - 100.0)
    };
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|&(year, v)| format!("{:.2},{:.2}", x_pixel(year), y_pixel(v, lo, hi)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" fill="{color}">{}</text>"#,
            WIDTH - MARGIN - 90.0,
            MARGIN + 14.0 * i as f64,
            escape(name)
        );
    }
    if y0 <= y1 {
        for year in [y0, y1] {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{year}</text>"#,
                x_pixel(year),
                HEIGHT - MARGIN + 16.0
            );
        }
    }
    value_axis(&mut s, lo, hi);
    s.push_str("</svg>\n");
    s
}
