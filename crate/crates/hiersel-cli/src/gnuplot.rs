//! Plain gnuplot script emission. Scripts are written next to the CSV files
//! they plot and are never executed by this toolkit; they exist so results
//! can be rendered with `gnuplot <script>` when the tool is available.

use std::fmt::Write;

use hiersel_core::fitkit::FitResult;

const PREAMBLE: &str = "set datafile separator comma\nset datafile missing 'NaN'\n";

/// Heat map of mean fit quality from the long-form contour file
/// (`x,y,mean_adj_r2`).
pub fn contour_script(xyz_csv: &str, x_label: &str, y_label: &str, nx: usize, ny: usize) -> String {
    format!(
        "{PREAMBLE}set term pngcairo size 900,700\n\
         set output 'contour.png'\n\
         set xlabel '{x_label}'\n\
         set ylabel '{y_label}'\n\
         set cblabel 'mean adjusted R^2'\n\
         set view map\n\
         set dgrid3d {ny},{nx}\n\
         set pm3d interpolate 2,2\n\
         splot '{xyz_csv}' every ::1 using 1:2:3 with pm3d notitle\n"
    )
}

/// Exponent trend curves from the long-form trends file
/// (`curve,fixed_factor,fixed_level,level,mean_alpha,spearman`).
pub fn trends_script(trends_csv: &str, m_levels: &[f64], n_levels: &[f64]) -> String {
    let mut script = format!(
        "{PREAMBLE}set term pngcairo size 900,650\nset key left top\nset ylabel 'fitted exponent'\n\n"
    );
    let mut panel = |out: &str, curve: &str, xlabel: &str, levels: &[f64], legend: &str| {
        let _ = write!(script, "set output '{out}'\nset xlabel '{xlabel}'\nset logscale x\nplot");
        for (i, level) in levels.iter().enumerate() {
            let sep = if i == 0 { " " } else { ", " };
            let _ = write!(
                script,
                "{sep}'{trends_csv}' using ((strcol(1) eq '{curve}') && (column(3) == {level}) ? column(4) : NaN):5 \
                 with linespoints title '{legend}={level}'"
            );
        }
        script.push_str("\nunset logscale x\n\n");
    };
    panel("alpha_vs_n.png", "alpha_vs_n", "objects N", m_levels, "M");
    panel("alpha_vs_m.png", "alpha_vs_m", "hierarchies M", n_levels, "N");
    script
}

/// Mean fit quality per ratio level (`level,mean,std,count`).
pub fn goodness_script(csv: &str, factor_label: &str) -> String {
    format!(
        "{PREAMBLE}set term pngcairo size 800,600\n\
         set output 'goodness.png'\n\
         set xlabel '{factor_label}'\n\
         set ylabel 'mean adjusted R^2'\n\
         set yrange [0:1]\n\
         plot '{csv}' every ::1 using 1:2:3 with yerrorlines title 'mean ± sd'\n"
    )
}

/// Overlaid rank-density curves, one CSV per topic-count group.
pub fn density_script(files: &[(usize, String)]) -> String {
    let mut script = format!(
        "{PREAMBLE}set term pngcairo size 900,650\n\
         set output 'nt_density.png'\n\
         set xlabel 'global frequency rank'\n\
         set ylabel 'density'\n\
         plot"
    );
    for (i, (nt, file)) in files.iter().enumerate() {
        let sep = if i == 0 { " " } else { ", " };
        let _ = write!(
            script,
            "{sep}'{file}' every ::1 using 1:2 with lines title 'n_t={nt}'"
        );
    }
    script.push('\n');
    script
}

/// Log-log rank-frequency plot with the fitted power law overlaid.
pub fn rank_frequency_script(series_csv: &str, fit: Option<&FitResult>) -> String {
    let mut script = format!(
        "{PREAMBLE}set term pngcairo size 800,600\n\
         set output 'rank_frequency.png'\n\
         set logscale xy\n\
         set xlabel 'rank'\n\
         set ylabel 'frequency'\n\
         plot '{series_csv}' every ::1 using 1:2 with points pt 7 ps 0.5 title 'observed'"
    );
    if let Some(fit) = fit {
        let _ = write!(
            script,
            ", exp({intercept}) * x**(-{alpha}) with lines title 'fit (exponent {alpha:.4})'",
            intercept = fit.log_intercept,
            alpha = fit.alpha,
        );
    }
    script.push('\n');
    script
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripts_reference_their_inputs() {
        let c = contour_script("contour_xyz.csv", "ratio_m", "ratio_c", 19, 19);
        assert!(c.contains("contour_xyz.csv"));
        assert!(c.contains("dgrid3d 19,19"));

        let t = trends_script("trends.csv", &[4.0, 5.0], &[2000.0]);
        assert!(t.contains("alpha_vs_n"));
        assert!(t.contains("M=4"));
        assert!(t.contains("N=2000"));

        let d = density_script(&[(1, "fig2_nt1.csv".into()), (3, "fig2_nt3.csv".into())]);
        assert!(d.contains("fig2_nt3.csv"));
        assert!(d.contains("n_t=1"));

        let fit = FitResult {
            alpha: 1.5,
            log_intercept: 2.0,
            r2: 0.99,
            adj_r2: 0.99,
            n_points: 10,
            n_zero: 0,
        };
        let r = rank_frequency_script("series.csv", Some(&fit));
        assert!(r.contains("x**(-1.5)"));
        let bare = rank_frequency_script("series.csv", None);
        assert!(!bare.contains("x**"));
    }
}
