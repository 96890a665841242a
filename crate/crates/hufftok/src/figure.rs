//! Comparison artifacts: CSV table, plain-text table and a grouped-bar SVG
//! with one panel per tokenizer family.

use std::fmt::Write as _;

use hufftok_core::analysis::{Comparison, Panel, TokenizerKind};

pub fn comparison_csv(cmp: &Comparison) -> String {
    let mut out = String::from("label,tokenizer,vocab_size,bucket,tokens,fraction\n");
    for r in cmp.rows() {
        writeln!(
            out,
            "{},{},{},{},{},{:.6}",
            r.label, r.tokenizer, r.vocab_size, r.bucket, r.tokens, r.fraction
        )
        .unwrap();
    }
    out
}

/// One row per report, one column per bucket (token fractions in percent).
pub fn comparison_table(cmp: &Comparison) -> String {
    let mut out = String::new();
    for panel in &cmp.panels {
        write!(out, "{:<16}", panel.tokenizer).unwrap();
        for b in 1..=panel.max_bucket {
            write!(out, "{b:>8}").unwrap();
        }
        out.push_str("     oov\n");
        for r in &panel.reports {
            write!(out, "{:<16}", r.label()).unwrap();
            for b in 1..=panel.max_bucket {
                write!(out, "{:>7.2}%", 100.0 * r.bucket_fraction(b)).unwrap();
            }
            writeln!(out, "{:>7.2}%", 100.0 * r.oov_rate).unwrap();
        }
        out.push('\n');
    }
    out
}

const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#9c755f",
];

const PANEL_W: f64 = 460.0;
const PANEL_H: f64 = 320.0;
const MARGIN_L: f64 = 56.0;
const MARGIN_R: f64 = 16.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 48.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn panel_title(kind: TokenizerKind) -> &'static str {
    match kind {
        TokenizerKind::Huffman => "Huffman coding",
        TokenizerKind::Bpe => "BPE",
        TokenizerKind::Topk => "Top-k words",
    }
}

fn x_label(kind: TokenizerKind) -> &'static str {
    match kind {
        TokenizerKind::Bpe => "subwords per token",
        _ => "symbols per token",
    }
}

fn render_panel(out: &mut String, panel: &Panel, x0: f64) {
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let left = x0 + MARGIN_L;
    let bottom = MARGIN_T + plot_h;
    writeln!(
        out,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-weight="bold">{}</text>"#,
        x0 + PANEL_W / 2.0,
        panel_title(panel.tokenizer)
    )
    .unwrap();
    for t in 0..=4 {
        let frac = t as f64 / 4.0;
        let y = bottom - frac * plot_h;
        writeln!(
            out,
            r##"<line x1="{left:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end" font-size="11">{:.0}%</text>"##,
            left + plot_w,
            left - 6.0,
            y + 4.0,
            frac * 100.0
        )
        .unwrap();
    }
    let buckets = panel.max_bucket.max(1);
    let group_w = plot_w / buckets as f64;
    let bar_w = group_w * 0.8 / panel.reports.len().max(1) as f64;
    for b in 1..=panel.max_bucket {
        let gx = left + (b - 1) as f64 * group_w + group_w * 0.1;
        for (i, r) in panel.reports.iter().enumerate() {
            let h = r.bucket_fraction(b) * plot_h;
            writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"><title>{} bucket {b}: {:.4}</title></rect>"#,
                gx + i as f64 * bar_w,
                bottom - h,
                bar_w,
                h,
                PALETTE[i % PALETTE.len()],
                escape(&r.label()),
                r.bucket_fraction(b)
            )
            .unwrap();
        }
        writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="11">{b}</text>"#,
            left + (b as f64 - 0.5) * group_w,
            bottom + 16.0
        )
        .unwrap();
    }
    writeln!(
        out,
        r##"<line x1="{left:.1}" y1="{bottom:.1}" x2="{:.1}" y2="{bottom:.1}" stroke="#333"/><text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{}</text>"##,
        left + plot_w,
        left + plot_w / 2.0,
        bottom + 36.0,
        x_label(panel.tokenizer)
    )
    .unwrap();
    for (i, r) in panel.reports.iter().enumerate() {
        let y = MARGIN_T + 6.0 + i as f64 * 15.0;
        let x = left + plot_w - 110.0;
        writeln!(
            out,
            r#"<rect x="{x:.1}" y="{:.1}" width="10" height="10" fill="{}"/><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
            y - 9.0,
            PALETTE[i % PALETTE.len()],
            x + 14.0,
            y,
            escape(&r.label())
        )
        .unwrap();
    }
}

/// Side-by-side panels, token fraction per bucket, one bar per report.
pub fn comparison_svg(cmp: &Comparison) -> String {
    let width = PANEL_W * cmp.panels.len() as f64;
    let mut out = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{PANEL_H:.0}" viewBox="0 0 {width:.0} {PANEL_H:.0}" font-family="sans-serif">"#
    );
    out.push('\n');
    out.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    out.push('\n');
    for (i, panel) in cmp.panels.iter().enumerate() {
        writeln!(out, r#"<g class="panel" data-tokenizer="{}">"#, panel.tokenizer).unwrap();
        render_panel(&mut out, panel, i as f64 * PANEL_W);
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use hufftok_core::analysis::{compare_report, histogram_for_bpe, histogram_for_mapping};
    use hufftok_core::baselines::{bpe_learn, DEFAULT_MARKER};
    use hufftok_core::corpus::FrequencyTable;
    use hufftok_core::hufftree::build_tree;

    fn freqs() -> FrequencyTable {
        FrequencyTable::from_counts(
            [("the", 9), ("house", 4), ("hill", 2), ("sky", 1), ("a<b", 1)].map(|(w, c)| (w.to_string(), c)),
        )
        .unwrap()
    }

    #[test]
    fn two_panels() {
        let f = freqs();
        let reports = vec![
            histogram_for_mapping(&build_tree(&f, 2).unwrap().assign_codes(), &f),
            histogram_for_mapping(&build_tree(&f, 3).unwrap().assign_codes(), &f),
            histogram_for_bpe(&bpe_learn(&f, 3, DEFAULT_MARKER), &f),
        ];
        let cmp = compare_report(&reports).unwrap();
        let svg = comparison_svg(&cmp);
        assert_eq!(svg.matches(r#"<g class="panel""#).count(), 2);
        assert!(svg.contains("Huffman coding") && svg.contains("BPE"));
        assert!(svg.contains("width=\"920\""));
        let csv = comparison_csv(&cmp);
        assert_eq!(csv.lines().count(), 1 + cmp.rows().len());
        assert!(csv.lines().nth(1).unwrap().starts_with("huffman-2,huffman,2,1,"));
        let table = comparison_table(&cmp);
        assert!(table.contains("huffman-3"));
    }

    #[test]
    fn single_panel() {
        let f = freqs();
        let cmp = compare_report(&[histogram_for_mapping(&build_tree(&f, 4).unwrap().assign_codes(), &f)]).unwrap();
        let svg = comparison_svg(&cmp);
        assert_eq!(svg.matches(r#"<g class="panel""#).count(), 1);
        assert!(svg.contains("width=\"460\""));
    }
}
