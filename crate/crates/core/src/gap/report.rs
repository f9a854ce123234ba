use std::fmt::Write as _;

use super::profile::{GapIndex, GapProfile, GrowthFit};

/// One row per word: `word,length,log_sigma_*,log_gap_*,log_full,skipped`.
pub fn profile_csv(profile: &GapProfile) -> String {
    let d = profile.dim;
    let mut out = String::from("word,length");
    for i in 1..=d {
        let _ = write!(out, ",log_sigma_{i}");
    }
    for k in 1..d {
        let _ = write!(out, ",log_gap_{k}");
    }
    out.push_str(",log_full,skipped\n");
    for r in &profile.records {
        let _ = write!(out, "\"{}\",{}", r.word, r.length);
        if r.skipped {
            for _ in 0..(2 * d - 1) {
                out.push(',');
            }
            out.push_str(",,true\n");
            continue;
        }
        for x in r.log_sigmas.iter().chain(&r.log_gaps) {
            let _ = write!(out, ",{x}");
        }
        let _ = writeln!(out, ",{},false", r.log_full);
    }
    out
}

/// Scatter of log-ratio against word length with the fitted line `alpha |w| - c`.
pub fn svg_scatter(profile: &GapProfile, index: GapIndex, fit: &GrowthFit) -> String {
    let pts: Vec<(f64, f64)> = profile
        .records
        .iter()
        .filter_map(|r| profile.value(r, index).map(|v| (r.length as f64, v)))
        .collect();
    let (w, h, pad) = (640.0, 400.0, 40.0);
    let xmax = (profile.radius as f64).max(1.0);
    let ymax = pts.iter().map(|p| p.1).fold(fit.alpha * xmax - fit.c, f64::max).max(1e-12);
    let ymin = pts.iter().map(|p| p.1).fold(-fit.c, f64::min).min(0.0);
    let sx = |x: f64| pad + x / xmax * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - ymin) / (ymax - ymin) * (h - 2.0 * pad);
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(out, r#"<title>log-ratio index {} vs word length</title>"#, fit.index);
    let _ = writeln!(
        out,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        sx(0.0),
        sy(ymin),
        sx(xmax),
        sy(ymin)
    );
    let _ = writeln!(
        out,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        sx(0.0),
        sy(ymin),
        sx(0.0),
        sy(ymax)
    );
    for (x, y) in &pts {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="steelblue"/>"#, sx(*x), sy(*y));
    }
    let _ = writeln!(
        out,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="crimson"/>"#,
        sx(0.0),
        sy(-fit.c),
        sx(xmax),
        sy(fit.alpha * xmax - fit.c)
    );
    let _ = writeln!(
        out,
        r#"<text x="{pad}" y="20" font-size="12">alpha={:.6} c={:.6} verdict={}</text>"#,
        fit.alpha, fit.c, fit.verdict
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gap::{fit_growth, gap_profile};
    use crate::linalg::Mat;
    use crate::thresholds::Thresholds;
    use crate::words::Rep;

    #[test]
    fn csv_has_one_row_per_word() {
        let rep = Rep::cyclic(vec![Mat::diag(&[4.0, 0.25])]).unwrap();
        let p = gap_profile(&rep, 3).unwrap();
        let csv = profile_csv(&p);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "word,length,log_sigma_1,log_sigma_2,log_gap_1,log_full,skipped");
        assert_eq!(lines.len(), 1 + 7);
        assert!(lines[1].starts_with("\"1\",0,0,0,0,0,false"));
    }

    #[test]
    fn svg_is_well_formed() {
        let rep = Rep::cyclic(vec![Mat::diag(&[4.0, 0.25])]).unwrap();
        let p = gap_profile(&rep, 3).unwrap();
        let fit = fit_growth(&p, GapIndex::Gap(1), &Thresholds::default()).unwrap();
        let svg = svg_scatter(&p, GapIndex::Gap(1), &fit);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 7);
    }
}
