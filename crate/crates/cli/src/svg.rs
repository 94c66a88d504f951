//! Minimal static SVG rendering: grouped bar charts and pair-density
//! grids. Output is deterministic (no timestamps, fixed formatting).

use std::fmt::Write;

const SERIES_COLORS: [&str; 8] = [
    "#4878cf", "#ee854a", "#6acc65", "#d65f5f", "#956cb4", "#8c613c", "#dc7ec0", "#797979",
];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A grouped bar chart: one cluster per group, one bar per series member.
pub fn grouped_bar_chart(
    title: &str,
    group_labels: &[String],
    series: &[(String, Vec<f64>)],
    y_label: &str,
) -> String {
    let n_groups = group_labels.len();
    let n_series = series.len().max(1);
    let margin = (70.0, 40.0, 70.0, 60.0); // left, top, right, bottom
    let plot_w = (n_groups as f64 * (n_series as f64 * 16.0 + 24.0)).max(420.0);
    let plot_h = 300.0;
    let width = margin.0 + plot_w + margin.2;
    let height = margin.1 + plot_h + margin.3;

    let max_val = series
        .iter()
        .flat_map(|(_, v)| v.iter().copied())
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let min_val = series
        .iter()
        .flat_map(|(_, v)| v.iter().copied())
        .fold(0.0f64, f64::min);
    let y_max = max_val * 1.08;
    let y_min = min_val.min(0.0) * 1.08;
    let y_to = |v: f64| margin.1 + plot_h * (1.0 - (v - y_min) / (y_max - y_min));

    let mut s = String::new();
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\" font-family=\"sans-serif\">\n"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{:.1}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
        width / 2.0,
        esc(title)
    );
    let _ = writeln!(
        s,
        "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"12\" \
         transform=\"rotate(-90 16 {:.1})\">{}</text>",
        margin.1 + plot_h / 2.0,
        margin.1 + plot_h / 2.0,
        esc(y_label)
    );

    // Horizontal grid lines and y ticks.
    for t in 0..=4 {
        let v = y_min + (y_max - y_min) * t as f64 / 4.0;
        let y = y_to(v);
        let _ = writeln!(
            s,
            "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#dddddd\"/>",
            margin.0,
            margin.0 + plot_w
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-size=\"11\">{v:.2}</text>",
            margin.0 - 6.0,
            y + 4.0
        );
    }
    // Zero axis.
    let _ = writeln!(
        s,
        "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"#333333\"/>",
        margin.0,
        y_to(0.0),
        margin.0 + plot_w,
        y_to(0.0)
    );

    let group_w = plot_w / n_groups as f64;
    let bar_w = (group_w - 18.0) / n_series as f64;
    for (g, label) in group_labels.iter().enumerate() {
        let gx = margin.0 + g as f64 * group_w;
        for (k, (_, values)) in series.iter().enumerate() {
            let v = values.get(g).copied().unwrap_or(0.0);
            let x = gx + 9.0 + k as f64 * bar_w;
            let (y0, y1) = if v >= 0.0 {
                (y_to(v), y_to(0.0))
            } else {
                (y_to(0.0), y_to(v))
            };
            let _ = writeln!(
                s,
                "<rect x=\"{x:.2}\" y=\"{y0:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                (bar_w - 2.0).max(1.0),
                (y1 - y0).max(0.5),
                SERIES_COLORS[k % SERIES_COLORS.len()]
            );
        }
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"11\">{}</text>",
            gx + group_w / 2.0,
            margin.1 + plot_h + 18.0,
            esc(label)
        );
    }

    // Legend.
    for (k, (name, _)) in series.iter().enumerate() {
        let y = margin.1 + 14.0 * k as f64;
        let _ = writeln!(
            s,
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"10\" height=\"10\" fill=\"{}\"/>",
            margin.0 + plot_w + 8.0,
            y,
            SERIES_COLORS[k % SERIES_COLORS.len()]
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\">{}</text>",
            margin.0 + plot_w + 22.0,
            y + 9.0,
            esc(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Bins used for the 1-D marginals on the pairplot diagonal.
pub const PAIRPLOT_BINS_1D: usize = 50;
/// Bins per axis for the off-diagonal density heatmaps.
pub const PAIRPLOT_BINS_2D: usize = 25;

/// Pairwise density grid from raw samples (columns = parameters):
/// marginal histograms on the diagonal, binned 2-D heatmaps off it.
pub fn pairplot(labels: &[String], columns: &[Vec<f64>], ranges: &[(f64, f64)]) -> String {
    let d = labels.len();
    let cell = 130.0;
    let pad = 10.0;
    let margin = 50.0;
    let size = margin + d as f64 * (cell + pad) + 20.0;

    let mut s = String::new();
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size:.0}\" height=\"{size:.0}\" \
         viewBox=\"0 0 {size:.0} {size:.0}\" font-family=\"sans-serif\">\n"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");

    let origin = |i: usize, j: usize| {
        (
            margin + j as f64 * (cell + pad),
            margin + i as f64 * (cell + pad) - 30.0,
        )
    };

    for i in 0..d {
        for j in 0..d {
            let (x0, y0) = origin(i, j);
            let _ = writeln!(
                s,
                "<rect x=\"{x0:.1}\" y=\"{y0:.1}\" width=\"{cell:.1}\" height=\"{cell:.1}\" \
                 fill=\"none\" stroke=\"#999999\" stroke-width=\"0.6\"/>"
            );
            if i == j {
                // Marginal histogram.
                let (lo, hi) = ranges[i];
                let width = (hi - lo).max(1e-300);
                let mut counts = vec![0u64; PAIRPLOT_BINS_1D];
                for &v in &columns[i] {
                    let b = (((v - lo) / width) * PAIRPLOT_BINS_1D as f64).floor() as i64;
                    counts[b.clamp(0, PAIRPLOT_BINS_1D as i64 - 1) as usize] += 1;
                }
                let peak = counts.iter().copied().max().unwrap_or(1).max(1) as f64;
                let bw = cell / PAIRPLOT_BINS_1D as f64;
                for (b, &c) in counts.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let h = cell * (c as f64 / peak);
                    let _ = writeln!(
                        s,
                        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{bw:.2}\" height=\"{h:.2}\" \
                         fill=\"#4878cf\"/>",
                        x0 + b as f64 * bw,
                        y0 + cell - h
                    );
                }
            } else {
                // 2-D binned density of (param j, param i).
                let (xlo, xhi) = ranges[j];
                let (ylo, yhi) = ranges[i];
                let (xw, yw) = ((xhi - xlo).max(1e-300), (yhi - ylo).max(1e-300));
                let nb = PAIRPLOT_BINS_2D;
                let mut counts = vec![0u64; nb * nb];
                for (vx, vy) in columns[j].iter().zip(&columns[i]) {
                    let bx = (((vx - xlo) / xw) * nb as f64).floor() as i64;
                    let by = (((vy - ylo) / yw) * nb as f64).floor() as i64;
                    counts[by.clamp(0, nb as i64 - 1) as usize * nb
                        + bx.clamp(0, nb as i64 - 1) as usize] += 1;
                }
                let peak = counts.iter().copied().max().unwrap_or(1).max(1) as f64;
                let bw = cell / nb as f64;
                for by in 0..nb {
                    for bx in 0..nb {
                        let c = counts[by * nb + bx];
                        if c == 0 {
                            continue;
                        }
                        // Light→dark blue ramp.
                        let t = (c as f64 / peak).sqrt();
                        let shade = (235.0 - 185.0 * t) as u8;
                        let _ = writeln!(
                            s,
                            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{bw:.2}\" height=\"{bw:.2}\" \
                             fill=\"rgb({shade},{shade},255)\"/>",
                            x0 + bx as f64 * bw,
                            y0 + cell - (by as f64 + 1.0) * bw
                        );
                    }
                }
            }
            if i == d - 1 {
                let _ = writeln!(
                    s,
                    "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"11\">{}</text>",
                    x0 + cell / 2.0,
                    y0 + cell + 14.0,
                    esc(&labels[j])
                );
            }
            if j == 0 {
                let _ = writeln!(
                    s,
                    "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"11\" \
                     transform=\"rotate(-90 {:.1} {:.1})\">{}</text>",
                    x0 - 12.0,
                    y0 + cell / 2.0,
                    x0 - 12.0,
                    y0 + cell / 2.0,
                    esc(&labels[i])
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}
