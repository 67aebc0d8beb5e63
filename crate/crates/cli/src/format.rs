use selcov::simlab::{CoverageReport, ScreeningDesign};

/// `x` rounded to `digits` significant digits, in plain decimal notation.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Coverage reports as a markdown table with the columns design, empirical
/// coverage and Monte Carlo standard error. Closed-form coverages follow as
/// notes.
pub fn markdown_table(rows: &[CoverageReport]) -> String {
    let mut s = String::from(
        "| Screening design | Empirical coverage | Monte Carlo s.e. |\n|---|---|---|\n",
    );
    for r in rows {
        s.push_str(&format!(
            "| {} | {} | {} |\n",
            r.label,
            significant(r.coverage, 6),
            significant(r.mc_se, 6)
        ));
    }
    if let Some(first) = rows.first() {
        s.push_str(&format!(
            "\nn = {}, p = {}, alpha = {}, {} replications, seed {}\n",
            first.n, first.p, first.alpha, first.reps, first.seed
        ));
    }
    for r in rows {
        if let (ScreeningDesign::SameSample, Some(exact)) = (r.design, r.exact_coverage) {
            s.push_str(&format!(
                "Exact same-sample coverage Φ(z_{{α/2}})^p = {}\n",
                significant(exact, 6)
            ));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(significant(0.281_988_102_340_917, 6), "0.281988");
        assert_eq!(significant(4.950_084_165_390_305, 6), "4.95008");
        assert_eq!(significant(0.002_134_5, 6), "0.00213450");
        assert_eq!(significant(1234.5678, 6), "1234.57");
        assert_eq!(significant(123_456_789.0, 6), "123456789");
        assert_eq!(significant(0.0, 6), "0");
        assert_eq!(significant(-0.5, 3), "-0.500");
    }
}
