//! `hiersel` — simulate the hierarchical-selection model, fit power laws,
//! run factorial sweeps with ANOVA/regression over the results, and analyze
//! topic corpora for rank/topic-count structure.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};

use hiersel_core::corpus;
use hiersel_core::dist::DistributionSpec;
use hiersel_core::fitkit::{
    fit_power_loglog, fit_shifted_power, fit_shifted_power_log, fit_two_term_power, FitResult,
    RankedSeries,
};
use hiersel_core::hsmodel::{
    build_instance, expected_frequencies, format_warnings, simulate, HierarchySpec, ModelInstance,
};

use hiersel_cli::analysis::{
    self, anova_over_sweep, contour_grid, exponent_regression, exponent_trends, Factor, Response,
    REGRESSION_TERMS,
};
use hiersel_cli::config::{Mode, SweepConfig, DEFAULT_MASTER_SEED};
use hiersel_cli::csvio;
use hiersel_cli::gencorpus::generate_corpus;
use hiersel_cli::gnuplot;
use hiersel_cli::loader;
use hiersel_cli::presets::preset;
use hiersel_cli::sweep::{run_sweep, SweepRow};

#[derive(Parser)]
#[command(
    name = "hiersel",
    version,
    about = "Hierarchical-selection model simulator and rank-frequency statistics toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Model shape shared by `simulate` and `gen-corpus`.
#[derive(Args)]
struct ModelArgs {
    /// Number of objects.
    #[arg(long)]
    n: usize,
    /// Number of hierarchies (1 = top).
    #[arg(long)]
    m: usize,
    /// Apportionment weights over hierarchies (how many objects each gets).
    #[arg(long)]
    fm: DistributionSpec,
    /// Within-hierarchy rank weights.
    #[arg(long)]
    fw: DistributionSpec,
    /// Hierarchy selection weights.
    #[arg(long)]
    fc: DistributionSpec,
}

impl ModelArgs {
    fn build(&self) -> Result<ModelInstance> {
        let spec = HierarchySpec {
            n_objects: self.n,
            n_hierarchies: self.m,
            fm: self.fm.clone(),
            fw: self.fw.clone(),
            fc: self.fc.clone(),
        };
        let instance = build_instance(&spec)?;
        for line in format_warnings(&instance) {
            eprintln!("warning: {line}");
        }
        Ok(instance)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Draw object frequencies from a model instance and write the table.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        /// Number of selection draws.
        #[arg(long)]
        draws: u64,
        /// Random seed (ignored in expected mode).
        #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
        seed: u64,
        /// 'montecarlo' for sampled counts, 'expected' for exact expectations.
        #[arg(long, default_value = "montecarlo")]
        mode: String,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Fit a power law (default), two-term decomposition, or shifted power.
    Fit {
        /// Input CSV: a frequency table, a rank series, bare frequencies,
        /// or (for --two-term / --shifted) two x,y columns.
        input: PathBuf,
        /// Fit y = a*x^-b + c*x^d (a decaying head plus a rising tail).
        #[arg(long, conflicts_with_all = ["shifted", "max_rank", "log_space"])]
        two_term: bool,
        /// Fit y = a*(shift - x)^-b with the given shift.
        #[arg(long, value_name = "SHIFT", conflicts_with = "max_rank")]
        shifted: Option<f64>,
        /// With --shifted: fit by least squares in log space instead of raw.
        #[arg(long, requires = "shifted")]
        log_space: bool,
        /// Use only the top MAX_RANK frequencies.
        #[arg(long)]
        max_rank: Option<usize>,
        /// Also write the fit parameters as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit a gnuplot script next to --out (power-law fit only).
        #[arg(long, requires = "out")]
        gnuplot: bool,
    },

    /// Run a factorial sweep from a preset or a key=value config file.
    Sweep {
        /// Built-in design: fig3, fig4, fig5, table2, table2-exp, table2-anova.
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Path to a key=value sweep configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for sweep.csv and derived tables.
        #[arg(long, default_value = "sweep_out")]
        out_dir: PathBuf,
        /// Override the configured mode ('montecarlo' or 'expected').
        #[arg(long)]
        mode: Option<String>,
        /// Override the configured master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the configured replicate count.
        #[arg(long)]
        replicates: Option<u32>,
        /// With --preset fig4: re-derive the selection ramp from the same
        /// ratio level as the apportionment profile.
        #[arg(long)]
        vary_both: bool,
        /// Emit gnuplot scripts for the preset's standard plots.
        #[arg(long)]
        gnuplot: bool,
    },

    /// One-way ANOVA and exponent regression over a sweep.csv.
    Anova {
        /// A sweep.csv produced by `hiersel sweep`.
        input: PathBuf,
        /// Output directory for the ANOVA and regression tables.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },

    /// Analyze a directory of topic text files.
    Corpus {
        /// Directory containing one .txt file per topic.
        #[arg(long)]
        dir: PathBuf,
        /// Minimum per-topic count for a topic to count toward n_t.
        #[arg(long, default_value_t = 1)]
        threshold: u64,
        /// Proportion of each n_t group sampled for the rank correlation.
        #[arg(long, default_value_t = 1.0)]
        proportion: f64,
        /// Seed for the correlation subsample.
        #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
        seed: u64,
        /// Output directory for the corpus tables and density curves.
        #[arg(long, default_value = "corpus_out")]
        out_dir: PathBuf,
        /// Emit a gnuplot script for the density curves.
        #[arg(long)]
        gnuplot: bool,
    },

    /// Generate a synthetic topic corpus from a model instance.
    GenCorpus {
        #[command(flatten)]
        model: ModelArgs,
        /// Number of topics.
        #[arg(long)]
        topics: usize,
        /// Token occurrences per topic.
        #[arg(long)]
        tokens_per_topic: u64,
        /// Random seed.
        #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
        seed: u64,
        /// Directory to write the topic .txt files into.
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            model,
            draws,
            seed,
            mode,
            out,
        } => cmd_simulate(&model, draws, seed, &mode, out.as_deref()),
        Command::Fit {
            input,
            two_term,
            shifted,
            log_space,
            max_rank,
            out,
            gnuplot,
        } => cmd_fit(&input, two_term, shifted, log_space, max_rank, out.as_deref(), gnuplot),
        Command::Sweep {
            preset,
            config,
            out_dir,
            mode,
            seed,
            replicates,
            vary_both,
            gnuplot,
        } => cmd_sweep(
            preset.as_deref(),
            config.as_deref(),
            &out_dir,
            mode.as_deref(),
            seed,
            replicates,
            vary_both,
            gnuplot,
        ),
        Command::Anova { input, out_dir } => cmd_anova(&input, &out_dir),
        Command::Corpus {
            dir,
            threshold,
            proportion,
            seed,
            out_dir,
            gnuplot,
        } => cmd_corpus(&dir, threshold, proportion, seed, &out_dir, gnuplot),
        Command::GenCorpus {
            model,
            topics,
            tokens_per_topic,
            seed,
            out_dir,
        } => cmd_gen_corpus(&model, topics, tokens_per_topic, seed, &out_dir),
    }
}

fn cmd_simulate(
    model: &ModelArgs,
    draws: u64,
    seed: u64,
    mode: &str,
    out: Option<&Path>,
) -> Result<()> {
    let mode: Mode = mode.parse()?;
    let instance = model.build()?;
    let table = match mode {
        Mode::MonteCarlo => simulate(&instance, draws, seed),
        Mode::Expected => expected_frequencies(&instance, draws),
    };
    match out {
        Some(path) => {
            csvio::write_frequency_table(path, &table)?;
            eprintln!(
                "wrote {} objects in {} hierarchies ({} draws, {} mode) to {}",
                table.rows.len(),
                instance.n_hierarchies(),
                draws,
                mode,
                path.display()
            );
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = csv::Writer::from_writer(stdout.lock());
            w.write_record(["object_id", "hierarchy", "within_rank", "count"])?;
            for row in &table.rows {
                w.write_record([
                    row.object_id.to_string(),
                    row.hierarchy.to_string(),
                    row.within_rank.to_string(),
                    row.count.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn print_fit(label: &str, fit: &FitResult) {
    println!("{label} over {} ranks ({} zero-frequency objects dropped)", fit.n_points, fit.n_zero);
    println!("  exponent        {:.9}", fit.alpha);
    println!("  log intercept   {:.9}", fit.log_intercept);
    println!("  r^2             {:.9}", fit.r2);
    println!("  adjusted r^2    {:.9}", fit.adj_r2);
}

fn cmd_fit(
    input: &Path,
    two_term: bool,
    shifted: Option<f64>,
    log_space: bool,
    max_rank: Option<usize>,
    out: Option<&Path>,
    emit_gnuplot: bool,
) -> Result<()> {
    if two_term {
        let (xs, ys) = csvio::read_xy(input)?;
        let fit = fit_two_term_power(&xs, &ys)?;
        println!("two-term decomposition over {} points", fit.n_points);
        println!("  decay amplitude a  {:.6}", fit.a);
        println!("  decay exponent  b  {:.8}", fit.b);
        println!("  grow amplitude  c  {:.6}", fit.c);
        println!("  grow exponent   d  {:.8}", fit.d);
        println!("  sse                {:.6}", fit.sse);
        println!("  r^2                {:.9}", fit.r2);
        println!("  adjusted r^2       {:.9}", fit.adj_r2);
        if let Some(path) = out {
            csvio::write_two_term(path, &fit)?;
        }
        return Ok(());
    }

    if let Some(shift) = shifted {
        let (xs, ys) = csvio::read_xy(input)?;
        let fit = if log_space {
            fit_shifted_power_log(&xs, &ys, shift)?
        } else {
            fit_shifted_power(&xs, &ys, shift)?
        };
        let label = if log_space {
            "shifted power fit (log space)"
        } else {
            "shifted power fit"
        };
        print_fit(label, &fit);
        if let Some(path) = out {
            csvio::write_fit(path, &fit)?;
        }
        return Ok(());
    }

    let frequencies = csvio::read_frequencies(input)?;
    let mut series = RankedSeries::from_frequencies(&frequencies)?;
    if let Some(max_rank) = max_rank {
        ensure!(max_rank >= 3, "--max-rank must be at least 3");
        series = series.truncated(max_rank);
    }
    let fit = fit_power_loglog(&series)?;
    print_fit("power-law fit", &fit);
    if let Some(path) = out {
        csvio::write_fit(path, &fit)?;
        if emit_gnuplot {
            let dir = path.parent().unwrap_or_else(|| Path::new("."));
            let series_path = dir.join("rank_frequency.csv");
            csvio::write_ranked_series(&series_path, &series)?;
            let script = gnuplot::rank_frequency_script("rank_frequency.csv", Some(&fit));
            fs::write(dir.join("rank_frequency.gp"), script)?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    preset_name: Option<&str>,
    config_path: Option<&Path>,
    out_dir: &Path,
    mode: Option<&str>,
    seed: Option<u64>,
    replicates: Option<u32>,
    vary_both: bool,
    emit_gnuplot: bool,
) -> Result<()> {
    let (mut config, preset_info) = match (preset_name, config_path) {
        (Some(name), None) => {
            let p = preset(name, vary_both)?;
            (p.config, Some((p.name, p.notes)))
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))?;
            (SweepConfig::parse(&text)?, None)
        }
        _ => bail!("exactly one of --preset or --config is required"),
    };
    if vary_both && preset_info.map(|(name, _)| name) != Some("fig4") {
        bail!("--vary-both only applies to --preset fig4");
    }
    if let Some(mode) = mode {
        config.mode = mode.parse()?;
    }
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    if let Some(replicates) = replicates {
        config.replicates = replicates;
        config.validate()?;
    }

    eprintln!(
        "running {} cells ({} mode, seed {})",
        config.n_cells(),
        config.mode,
        config.master_seed
    );
    let cells = run_sweep(&config)?;
    let rows: Vec<SweepRow> = cells.iter().map(|c| c.row()).collect();
    for cell in cells.iter().filter(|c| c.outcome.is_err()) {
        eprintln!(
            "cell {} failed: {}",
            cell.cell_id,
            cell.outcome.as_ref().unwrap_err()
        );
    }

    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;
    csvio::write_sweep_rows(&out_dir.join("sweep.csv"), &rows)?;

    let summary = analysis::summarize(&rows)?;
    let mut meta = String::new();
    match preset_info {
        Some((name, notes)) => {
            meta.push_str(&format!("preset: {name}\n"));
            for note in notes {
                meta.push_str(&format!("note: {note}\n"));
            }
        }
        None => meta.push_str("preset: none (explicit config)\n"),
    }
    meta.push_str(&format!(
        "cells: {}\nfailed_cells: {}\nmean_alpha: {}\nmean_adj_r2: {}\nstd_adj_r2: {}\n\n[config]\n{}",
        summary.n_cells,
        summary.n_failed,
        summary.mean_alpha,
        summary.mean_adj_r2,
        summary.std_adj_r2,
        config.to_text()
    ));
    fs::write(out_dir.join("meta.txt"), meta)?;

    match preset_info.map(|(name, _)| name) {
        Some("fig3") => {
            let grid = contour_grid(&rows, Factor::RatioM, Factor::RatioC)?;
            csvio::write_contour_matrix(&out_dir.join("contour.csv"), &grid)?;
            csvio::write_contour_xyz(&out_dir.join("contour_xyz.csv"), &grid)?;
            if emit_gnuplot {
                let script = gnuplot::contour_script(
                    "contour_xyz.csv",
                    grid.x_name,
                    grid.y_name,
                    grid.x_levels.len(),
                    grid.y_levels.len(),
                );
                fs::write(out_dir.join("contour.gp"), script)?;
            }
        }
        Some("fig4") => {
            let by = analysis::response_by_level(&rows, Factor::RatioM, Response::AdjR2)?;
            let mut w = csv::Writer::from_path(out_dir.join("goodness.csv"))?;
            w.write_record(["ratio_m", "mean_adj_r2", "std_adj_r2", "cells"])?;
            for (level, mean, std, count) in &by {
                w.write_record([
                    level.to_string(),
                    mean.to_string(),
                    std.to_string(),
                    count.to_string(),
                ])?;
            }
            w.flush()?;
            if emit_gnuplot {
                fs::write(
                    out_dir.join("goodness.gp"),
                    gnuplot::goodness_script("goodness.csv", "apportionment ratio"),
                )?;
            }
        }
        Some("fig5") | Some("table2-exp") => {
            let trends = exponent_trends(&rows)?;
            csvio::write_trends(&out_dir.join("trends.csv"), &trends)?;
            if emit_gnuplot {
                let m_levels: Vec<f64> = config.m_levels.iter().map(|&m| m as f64).collect();
                let n_levels: Vec<f64> = config.n_levels.iter().map(|&n| n as f64).collect();
                fs::write(
                    out_dir.join("trends.gp"),
                    gnuplot::trends_script("trends.csv", &m_levels, &n_levels),
                )?;
            }
        }
        _ => {
            if emit_gnuplot {
                eprintln!("note: --gnuplot has no standard plot for this design; skipped");
            }
        }
    }

    println!(
        "sweep complete: {} cells ({} failed), mean adj_r2 {:.4} (sd {:.4}), results in {}",
        summary.n_cells,
        summary.n_failed,
        summary.mean_adj_r2,
        summary.std_adj_r2,
        out_dir.display()
    );
    Ok(())
}

/// Display rule for p-values: full precision lives in the CSVs; formatted
/// output clamps anything below 1e-12 to 0.000 and keeps small-but-real
/// values in scientific notation.
fn format_p(p: f64) -> String {
    if p < 1e-12 {
        "0.000".to_owned()
    } else if p < 1e-3 {
        format!("{p:.2e}")
    } else {
        format!("{p:.3}")
    }
}

fn cmd_anova(input: &Path, out_dir: &Path) -> Result<()> {
    let rows = csvio::read_sweep_rows(input)?;
    ensure!(!rows.is_empty(), "{} has no cells", input.display());

    let mut factors = Vec::new();
    for factor in Factor::ALL {
        let mut levels: Vec<f64> = rows
            .iter()
            .filter(|r| r.succeeded())
            .map(|r| factor.value(r))
            .collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        if levels.len() >= 2 {
            factors.push(factor);
        } else {
            eprintln!(
                "note: factor '{}' has a single level; skipping it",
                factor.name()
            );
        }
    }
    ensure!(!factors.is_empty(), "no factor varies in this sweep");

    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;

    for (response, file) in [
        (Response::AdjR2, "anova_adj_r2.csv"),
        (Response::Alpha, "anova_alpha.csv"),
    ] {
        let results = anova_over_sweep(&rows, &factors, response)?;
        println!("one-way ANOVA on {}:", response.name());
        println!("  {:<10} {:>12} {:>6} {:>6} {:>10}", "factor", "F", "df1", "df2", "p");
        for r in &results {
            println!(
                "  {:<10} {:>12.4} {:>6} {:>6} {:>10}",
                r.factor_name,
                r.f_stat,
                r.df_between,
                r.df_within,
                format_p(r.p_value)
            );
        }
        csvio::write_anova(&out_dir.join(file), &results)?;
    }

    match exponent_regression(&rows) {
        Ok(regression) => {
            println!("linear regression of alpha on ratio levels:");
            println!("  {:<10} {:>12} {:>12}", "term", "coef", "std err");
            for (i, term) in REGRESSION_TERMS.iter().enumerate() {
                println!(
                    "  {:<10} {:>12.6} {:>12.6}",
                    term, regression.coefficients[i], regression.std_errors[i]
                );
            }
            csvio::write_regression(
                &out_dir.join("regression_alpha.csv"),
                &regression,
                &REGRESSION_TERMS,
            )?;
        }
        Err(e) => eprintln!("note: exponent regression skipped: {e:#}"),
    }
    Ok(())
}

fn cmd_corpus(
    dir: &Path,
    threshold: u64,
    proportion: f64,
    seed: u64,
    out_dir: &Path,
    emit_gnuplot: bool,
) -> Result<()> {
    let loaded = loader::load_corpus_dir(dir)?;
    for warning in &loaded.warnings {
        eprintln!("warning: {warning}");
    }
    let corpus = &loaded.corpus;

    let records = corpus::nt_table(corpus, threshold)?;
    let stats = corpus::group_stats(&records)?;
    let (curves, skipped_curves) = corpus::nt_density_curves(&records)?;
    let correlation = corpus::rank_nt_correlation(&records, proportion, seed)?;
    let fits = corpus::per_topic_fits(corpus)?;

    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;
    csvio::write_nt_table(&out_dir.join("nt_table.csv"), &records)?;
    csvio::write_group_stats(&out_dir.join("group_stats.csv"), &stats)?;
    csvio::write_topic_fits(&out_dir.join("topic_fits.csv"), &fits, corpus)?;
    let mut curve_files = Vec::new();
    for (nt, curve) in &curves {
        let file = format!("fig2_nt{nt}.csv");
        csvio::write_kde_curve(&out_dir.join(&file), curve)?;
        curve_files.push((*nt, file));
    }
    if emit_gnuplot && !curve_files.is_empty() {
        fs::write(
            out_dir.join("nt_density.gp"),
            gnuplot::density_script(&curve_files),
        )?;
    }

    println!(
        "corpus: {} topics, {} distinct tokens, {} occurrences",
        corpus.n_topics(),
        corpus.vocabulary_size(),
        corpus.total_tokens()
    );
    println!(
        "collection fit: exponent {:.4}, adjusted r^2 {:.4}",
        fits.collection.alpha, fits.collection.adj_r2
    );
    if !fits.skipped.is_empty() {
        println!("topics too small to fit: {}", fits.skipped.join(", "));
    }
    if !skipped_curves.is_empty() {
        let list: Vec<String> = skipped_curves.iter().map(|nt| nt.to_string()).collect();
        println!("density curves skipped for group sizes < 2: nt = {}", list.join(", "));
    }
    println!(
        "rank vs topic-count correlation (proportion {}, seed {}): {:.6}",
        proportion, seed, correlation
    );
    println!("tables written to {}", out_dir.display());
    Ok(())
}

fn cmd_gen_corpus(
    model: &ModelArgs,
    topics: usize,
    tokens_per_topic: u64,
    seed: u64,
    out_dir: &Path,
) -> Result<()> {
    let instance = model.build()?;
    let generated = generate_corpus(&instance, topics, tokens_per_topic, seed)?;
    let paths = loader::write_topic_files(out_dir, &generated)?;

    let mut stdout = std::io::stdout().lock();
    writeln!(
        stdout,
        "wrote {} topic files ({} tokens each) to {}",
        paths.len(),
        tokens_per_topic,
        out_dir.display()
    )?;
    // Summarize eligibility per hierarchy so the diffusion structure is
    // visible at a glance.
    let mut shown = 0usize;
    for (h, &count) in instance.counts().iter().enumerate() {
        let eligible = generated.eligibility[shown];
        writeln!(
            stdout,
            "hierarchy {}: {} objects, eligible in {} of {} topics",
            h + 1,
            count,
            eligible,
            topics
        )?;
        shown += count;
    }
    Ok(())
}
