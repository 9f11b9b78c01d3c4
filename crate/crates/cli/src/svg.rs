//! Minimal SVG line plots of a table: first column on x, one polyline per
//! remaining column.

use std::fmt::Write as _;

use crate::table::Table;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

pub fn line_plot(title: &str, table: &Table, y_floor: Option<f64>) -> String {
    let xs = table.column(0);
    let series: Vec<(&str, Vec<f64>)> = (1..table.header.len())
        .map(|j| {
            let ys = table
                .column(j)
                .into_iter()
                .map(|y| y_floor.map_or(y, |f| y.max(f)))
                .collect();
            (table.header[j].as_str(), ys)
        })
        .collect();
    let bounds = |v: &mut dyn Iterator<Item = f64>| {
        v.filter(|x| x.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x), hi.max(x))
            })
    };
    let (x0, x1) = bounds(&mut xs.iter().copied());
    let (y0, y1) = bounds(&mut series.iter().flat_map(|(_, ys)| ys.iter().copied()));
    let span = |lo: f64, hi: f64| if hi > lo { hi - lo } else { 1.0 };
    let px = |x: f64| MARGIN + (x - x0) / span(x0, x1) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / span(y0, y1) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    )
    .unwrap();
    writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    )
    .unwrap();
    for (label, x, anchor) in [(x0, MARGIN, "start"), (x1, WIDTH - MARGIN, "end")] {
        writeln!(
            out,
            r#"<text x="{x}" y="{}" text-anchor="{anchor}" font-family="sans-serif" font-size="10">{label:.3}</text>"#,
            HEIGHT - MARGIN + 14.0
        )
        .unwrap();
    }
    for (label, y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN)] {
        writeln!(
            out,
            r#"<text x="{}" y="{y}" text-anchor="end" font-family="sans-serif" font-size="10">{label:.3}</text>"#,
            MARGIN - 4.0
        )
        .unwrap();
    }
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(&table.header[0])
    )
    .unwrap();
    for (s, (name, ys)) in series.iter().enumerate() {
        let color = COLORS[s % COLORS.len()];
        let points: Vec<String> = xs
            .iter()
            .zip(ys)
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
            .collect();
        writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
            points.join(" ")
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" fill="{color}">{}</text>"#,
            WIDTH - MARGIN + 4.0,
            MARGIN + 12.0 * (s as f64 + 1.0),
            escape(name)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Cell;

    #[test]
    fn plot_has_one_polyline_per_series() {
        let mut t = Table::new(["x", "a", "b"]);
        for j in 0..5 {
            t.push(vec![
                Cell::Int(j),
                Cell::Num(j as f64 * 2.0),
                Cell::Num(-(j as f64)),
            ]);
        }
        let svg = line_plot("demo <1>", &t, None);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("demo &lt;1&gt;"));
        assert!(svg.ends_with("</svg>\n"));
    }
}
