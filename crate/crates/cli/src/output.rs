use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

/// `x` with six significant digits, fixed notation where reasonable.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0.00000".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = 5 - exp;
    if (0..=12).contains(&decimals) {
        format!("{x:.prec$}", prec = decimals as usize)
    } else {
        format!("{x:.5e}")
    }
}

/// Shortest round-trip text of `x`.
pub fn full(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt(x: Option<f64>, f: fn(f64) -> String) -> String {
    x.map(f).unwrap_or_default()
}

/// Writes `text` to `dir/name` when a directory is given, else to stdout.
pub fn emit(out_dir: Option<&Path>, name: &str, text: &str) -> io::Result<Option<PathBuf>> {
    match out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(name);
            fs::write(&path, text)?;
            Ok(Some(path))
        }
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(None)
        }
    }
}

pub fn csv_text(header: &[String], rows: &[Vec<String>]) -> Result<String, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// A bare polyline plot of several series sharing one x grid.
pub fn svg_plot(title: &str, x: &[f64], series: &[(String, Vec<f64>)]) -> String {
    let (w, h, pad) = (640.0, 400.0, 48.0);
    let (x0, x1) = (
        x.first().copied().unwrap_or(0.0),
        x.last().copied().unwrap_or(1.0),
    );
    let (mut y0, mut y1) = series
        .iter()
        .flat_map(|(_, v)| v.iter().copied().filter(|v| v.is_finite()))
        .fold((0.0f64, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if y1 - y0 <= 0.0 {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let sx = |v: f64| pad + (v - x0) / (x1 - x0).max(f64::MIN_POSITIVE) * (w - 2.0 * pad);
    let sy = |v: f64| h - pad - (v - y0) / (y1 - y0) * (h - 2.0 * pad);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        w / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<polyline points="{pad},{pad} {pad},{} {},{}" fill="none" stroke="black"/>"#,
        h - pad,
        w - pad,
        h - pad
    );
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(
            s,
            r#"<line x1="{pad}" y1="{z:.2}" x2="{}" y2="{z:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
            w - pad,
            z = sy(0.0)
        );
    }
    for (label, v) in [(sig6(x0), x0), (sig6(x1), x1)] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{label}</text>"#,
            sx(v),
            h - pad + 16.0
        );
    }
    for (label, v) in [(sig6(y0), y0), (sig6(y1), y1)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{label}</text>"#,
            pad - 4.0,
            sy(v) + 4.0
        );
    }
    for (i, (name, ys)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = x
            .iter()
            .zip(ys)
            .filter(|(_, y)| y.is_finite())
            .map(|(&a, &b)| format!("{:.2},{:.2}", sx(a), sy(b)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}" text-anchor="end">{}</text>"#,
            w - pad,
            pad + 14.0 * (i as f64 + 1.0),
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
