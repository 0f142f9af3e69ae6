//! Minimal SVG line plots of trajectory columns.

use std::fmt::Write as _;

use crate::error::Result;
use crate::trajectory::Trajectory;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 450.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
/// Polylines are thinned to about this many vertices.
const MAX_POINTS: usize = 2000;

/// One polyline per column with axes, tick labels and a legend.
/// Plots every column when `columns` is empty.
pub fn svg_plot(traj: &Trajectory, columns: &[&str], title: &str) -> Result<String> {
    let names: Vec<&str> = if columns.is_empty() {
        traj.names().iter().map(String::as_str).collect()
    } else {
        columns.to_vec()
    };
    let idx: Vec<usize> = names
        .iter()
        .map(|c| traj.column_index(c))
        .collect::<Result<_>>()?;

    let times = traj.times();
    let (t0, t1) = match (times.first(), times.last()) {
        (Some(&a), Some(&b)) if b > a => (a, b),
        (Some(&a), _) => (a, a + 1.0),
        _ => (0.0, 1.0),
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, row) in traj.rows() {
        for &j in &idx {
            lo = lo.min(row[j]);
            hi = hi.max(row[j]);
        }
    }
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo, hi) = (lo - 0.5, hi + 0.5);
    }
    let px = |t: f64| MARGIN + (t - t0) / (t1 - t0) * (WIDTH - 2.0 * MARGIN);
    let py = |v: f64| HEIGHT - MARGIN - (v - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{x0},{y1} L{x0},{y0} L{x1},{y0}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let t = t0 + f * (t1 - t0);
        let v = lo + f * (hi - lo);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="10">{}</text>"#,
            px(t),
            y0 + 15.0,
            tick(t)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="10">{}</text>"#,
            x0 - 5.0,
            py(v) + 3.0,
            tick(v)
        );
    }

    let step = (traj.len() / MAX_POINTS).max(1);
    for (c, (&j, name)) in idx.iter().zip(&names).enumerate() {
        let color = COLORS[c % COLORS.len()];
        let mut d = String::new();
        for (k, (t, row)) in traj.rows().enumerate() {
            if k % step != 0 && k + 1 != traj.len() {
                continue;
            }
            let _ = write!(
                d,
                "{}{:.2},{:.2}",
                if d.is_empty() { "M" } else { " L" },
                px(t),
                py(row[j])
            );
        }
        if !d.is_empty() {
            let _ = writeln!(
                s,
                r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>"#
            );
        }
        let ly = MARGIN + 15.0 * c as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
            x1 - 110.0,
            x1 - 90.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11">{}</text>"#,
            x1 - 85.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn tick(v: f64) -> String {
    if v == 0.0 || (1e-3..1e4).contains(&v.abs()) {
        format!("{:.3}", v)
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_one_path_per_column() {
        let mut traj = Trajectory::new(vec!["a".into(), "b".into()]);
        for i in 0..10 {
            let t = i as f64;
            traj.push(t, vec![t, -t]).unwrap();
        }
        let svg = svg_plot(&traj, &[], "a & b").unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("stroke-width=\"1.5\"").count(), 2);
        assert!(svg.contains("a &amp; b"));
        assert!(svg_plot(&traj, &["c"], "").is_err());
    }

    #[test]
    fn handles_degenerate_input() {
        let traj = Trajectory::new(vec!["a".into()]);
        assert!(svg_plot(&traj, &[], "empty").is_ok());
        let mut flat = Trajectory::new(vec!["a".into()]);
        flat.push(0.0, vec![1.0]).unwrap();
        assert!(svg_plot(&flat, &[], "flat").is_ok());
    }
}
