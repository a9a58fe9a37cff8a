//! CSV readers and writers for every table the toolkit produces.
//!
//! Numbers are written with Rust's shortest-round-trip float formatting, so
//! files are byte-stable across runs and parse back to identical values.
//! Failed sweep cells serialize their fit columns as `NaN`; readers treat
//! non-finite fit values as failures.

use std::fmt::Display;
use std::fs::File;
use std::path::Path;

use anyhow::{anyhow, bail, ensure, Context, Result};
use csv::{ReaderBuilder, StringRecord, Writer};

use hiersel_core::corpus::{NTGroupStats, NTRecord, PerTopicFits, TopicCorpus};
use hiersel_core::fitkit::{FitResult, RankedSeries, TwoTermFit};
use hiersel_core::hsmodel::FrequencyTable;
use hiersel_core::statkit::{AnovaResult, KdeCurve, Regression};

use crate::analysis::{ContourGrid, TrendCurve, Trends};
use crate::sweep::SweepRow;

fn open_writer(path: &Path) -> Result<Writer<File>> {
    Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))
}

fn write_record<I, T>(writer: &mut Writer<File>, fields: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Display,
{
    let record: Vec<String> = fields.into_iter().map(|f| f.to_string()).collect();
    writer.write_record(&record)?;
    Ok(())
}

/// `object_id,hierarchy,within_rank,count` — one row per object.
pub fn write_frequency_table(path: &Path, table: &FrequencyTable) -> Result<()> {
    let mut w = open_writer(path)?;
    w.write_record(["object_id", "hierarchy", "within_rank", "count"])?;
    for row in &table.rows {
        write_record(
            &mut w,
            [
                row.object_id.to_string(),
                row.hierarchy.to_string(),
                row.within_rank.to_string(),
                row.count.to_string(),
            ],
        )?;
    }
    w.flush()?;
    Ok(())
}

/// `rank,frequency` — descending frequency order.
pub fn write_ranked_series(path: &Path, series: &RankedSeries) -> Result<()> {
    let mut w = open_writer(path)?;
    w.write_record(["rank", "frequency"])?;
    for (rank, frequency) in series.pairs() {
        write_record(&mut w, [rank.to_string(), frequency.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Single-row power-law fit summary.
pub fn write_fit(path: &Path, fit: &FitResult) -> Result<()> {
    let mut w = open_writer(path)?;
    w.write_record(["alpha", "log_intercept", "r2", "adj_r2", "n_points", "n_zero"])?;
    write_record(
        &mut w,
        [
            fit.alpha.to_string(),
            fit.log_intercept.to_string(),
            fit.r2.to_string(),
            fit.adj_r2.to_string(),
            fit.n_points.to_string(),
            fit.n_zero.to_string(),
        ],
    )?;
    w.flush()?;
    Ok(())
}

/// Single-row two-term decomposition summary.
pub fn write_two_term(path: &Path, fit: &TwoTermFit) -> Result<()> {
    let mut w = open_writer(path)?;
    w.write_record(["a", "b", "c", "d", "sse", "r2", "adj_r2", "n_points"])?;
    write_record(
        &mut w,
        [
            fit.a.to_string(),
            fit.b.to_string(),
            fit.c.to_string(),
            fit.d.to_string(),
            fit.sse.to_string(),
            fit.r2.to_string(),
            fit.adj_r2.to_string(),
            fit.n_points.to_string(),
        ],
    )?;
    w.flush()?;
    Ok(())
}

pub const SWEEP_HEADER: [&str; 12] = [
    "cell_id", "M", "N", "T", "ratio_m", "ratio_w", "ratio_c", "replicate", "seed", "alpha",
    "adj_r2", "n_zero",
];

/// One row per sweep cell, failed cells included with NaN fit columns.
pub fn write_sweep_rows(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = open_writer(path)?;
    w.write_record(SWEEP_HEADER)?;
    for row in rows {
        write_record(
            &mut w,
            [
                row.cell_id.to_string(),
                row.m.to_string(),
                row.n.to_string(),
                row.draws.to_string(),
                row.ratio_m.to_string(),
                row.ratio_w.to_string(),
                row.ratio_c.to_string(),
                row.replicate.to_string(),
                row.seed.to_string(),
                row.alpha.to_string(),
                row.adj_r2.to_string(),
                row.n_zero.to_string(),
            ],
        )?;
    }
    w.flush()?;
    Ok(())
}

fn parse_field<T: std::str::FromStr>(record: &StringRecord, idx: usize, name: &str) -> Result<T> {
    let field = record
        .get(idx)
        .ok_or_else(|| anyhow!("missing column '{name}'"))?;
    field
        .parse()
        .map_err(|_| anyhow!("bad value '{field}' in column '{name}'"))
}

/// Read a `sweep.csv` back into rows; the header must match exactly.
pub fn read_sweep_rows(path: &Path) -> Result<Vec<SweepRow>> {
    let mut reader = ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let header = reader.headers()?.clone();
    ensure!(
        header.iter().eq(SWEEP_HEADER.iter().copied()),
        "{} does not look like a sweep table (header {:?})",
        path.display(),
        header
    );
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("row {} of {}", i + 2, path.display()))?;
        rows.push(SweepRow {
            cell_id: parse_field(&record, 0, "cell_id")?,
            m: parse_field(&record, 1, "M")?,
            n: parse_field(&record, 2, "N")?,
            draws: parse_field(&record, 3, "T")?,
            ratio_m: parse_field(&record, 4, "ratio_m")?,
            ratio_w: parse_field(&record, 5, "ratio_w")?,
            ratio_c: parse_field(&record, 6, "ratio_c")?,
            replicate: parse_field(&record, 7, "replicate")?,
            seed: parse_field(&record, 8, "seed")?,
            alpha: parse_field(&record, 9, "alpha")?,
            adj_r2: parse_field(&record, 10, "adj_r2")?,
            n_zero: parse_field(&record, 11, "n_zero")?,
        });
    }
    Ok(rows)
}

/// Matrix layout: the corner cell names the axes as `y\x`, the first row
/// carries x levels, and each following row is a y level plus its means.
pub fn write_contour_matrix(path: &Path, grid: &ContourGrid) -> Result<()> {
    let mut w = open_writer(path)?;
    let mut header = vec![format!("{}\\{}", grid.y_name, grid.x_name)];
    header.extend(grid.x_levels.iter().map(|x| x.to_string()));
    w.write_record(&header)?;
    for (yi, y) in grid.y_levels.iter().enumerate() {
        let mut record = vec![y.to_string()];
        record.extend(grid.mean_adj_r2[yi].iter().map(|v| v.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Long-form contour: one `(x, y, mean_adj_r2)` row per grid point.
pub fn write_contour_xyz(path: &Path, grid: &ContourGrid) -> Result<()> {
    let mut w = open_writer(path)?;
    w.write_record([grid.x_name, grid.y_name, "mean_adj_r2"])?;
    for (yi, y) in grid.y_levels.iter().enumerate() {
        for (xi, x) in grid.x_levels.iter().enumerate() {
            write_record(
                &mut w,
                [
                    x.to_string(),
                    y.to_string(),
                    grid.mean_adj_r2[yi][xi].to_string(),
                ],
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Both trend tables in long form:
/// `curve,fixed_factor,fixed_level,level,mean_alpha,spearman`.
pub fn write_trends(path: &Path, trends: &Trends) -> Result<()> {
    let mut w = open_writer(path)?;
    w.write_record([
        "curve",
        "fixed_factor",
        "fixed_level",
        "level",
        "mean_alpha",
        "spearman",
    ])?;
    let mut emit = |label: &str, curves: &[TrendCurve]| -> Result<()> {
        for curve in curves {
            for &(level, mean_alpha) in &curve.points {
                write_record(
                    &mut w,
                    [
                        label.to_string(),
                        curve.fixed_name.to_string(),
                        curve.fixed_level.to_string(),
                        level.to_string(),
                        mean_alpha.to_string(),
                        curve.spearman.to_string(),
                    ],
                )?;
            }
        }
        Ok(())
    };
    emit("alpha_vs_n", &trends.alpha_vs_n)?;
    emit("alpha_vs_m", &trends.alpha_vs_m)?;
    w.flush()?;
    Ok(())
}

/// `factor,f_stat,df_between,df_within,p_value` — one row per factor.
pub fn write_anova(path: &Path, results: &[AnovaResult]) -> Result<()> {
    let mut w = open_writer(path)?;
    w.write_record(["factor", "f_stat", "df_between", "df_within", "p_value"])?;
    for r in results {
        write_record(
            &mut w,
            [
                r.factor_name.clone(),
                r.f_stat.to_string(),
                r.df_between.to_string(),
                r.df_within.to_string(),
                r.p_value.to_string(),
            ],
        )?;
    }
    w.flush()?;
    Ok(())
}

/// `term,coefficient,std_error` — intercept first.
pub fn write_regression(path: &Path, regression: &Regression, terms: &[&str]) -> Result<()> {
    ensure!(
        terms.len() == regression.coefficients.len(),
        "term names do not match coefficient count"
    );
    let mut w = open_writer(path)?;
    w.write_record(["term", "coefficient", "std_error"])?;
    for (i, term) in terms.iter().enumerate() {
        write_record(
            &mut w,
            [
                term.to_string(),
                regression.coefficients[i].to_string(),
                regression.std_errors[i].to_string(),
            ],
        )?;
    }
    w.flush()?;
    Ok(())
}

/// `token,total_freq,rank,nt` — global rank order.
pub fn write_nt_table(path: &Path, records: &[NTRecord]) -> Result<()> {
    let mut w = open_writer(path)?;
    w.write_record(["token", "total_freq", "rank", "nt"])?;
    for r in records {
        write_record(
            &mut w,
            [
                r.token.clone(),
                r.total_freq.to_string(),
                r.global_rank.to_string(),
                r.nt.to_string(),
            ],
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Per-`nt` group summary; groups too small to fit leave the fit columns
/// empty.
pub fn write_group_stats(path: &Path, stats: &[NTGroupStats]) -> Result<()> {
    let mut w = open_writer(path)?;
    w.write_record([
        "nt", "word_count", "avg_rank", "word_pct", "freq_pct", "avg_freq", "alpha", "adj_r2",
    ])?;
    for s in stats {
        let (alpha, adj) = match &s.fit {
            Some(fit) => (fit.alpha.to_string(), fit.adj_r2.to_string()),
            None => (String::new(), String::new()),
        };
        write_record(
            &mut w,
            [
                s.nt.to_string(),
                s.word_count.to_string(),
                s.avg_rank.to_string(),
                s.word_pct.to_string(),
                s.freq_pct.to_string(),
                s.avg_freq.to_string(),
                alpha,
                adj,
            ],
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Per-topic rank-frequency fits plus a final `collection` row over the
/// pooled vocabulary. Topics skipped for being too small are omitted here
/// (the caller reports them separately).
pub fn write_topic_fits(path: &Path, fits: &PerTopicFits, corpus: &TopicCorpus) -> Result<()> {
    let mut w = open_writer(path)?;
    w.write_record(["topic", "tokens", "vocabulary", "alpha", "adj_r2"])?;
    let topic_index = |name: &str| corpus.topics().iter().position(|t| t == name);
    for (name, fit) in &fits.topics {
        let t = topic_index(name)
            .ok_or_else(|| anyhow!("fit refers to unknown topic '{name}'"))?;
        let mut tokens = 0u64;
        let mut vocabulary = 0usize;
        for (_, counts) in corpus.iter() {
            tokens += counts[t];
            vocabulary += usize::from(counts[t] > 0);
        }
        write_record(
            &mut w,
            [
                name.clone(),
                tokens.to_string(),
                vocabulary.to_string(),
                fit.alpha.to_string(),
                fit.adj_r2.to_string(),
            ],
        )?;
    }
    write_record(
        &mut w,
        [
            "collection".to_string(),
            corpus.total_tokens().to_string(),
            corpus.vocabulary_size().to_string(),
            fits.collection.alpha.to_string(),
            fits.collection.adj_r2.to_string(),
        ],
    )?;
    w.flush()?;
    Ok(())
}

/// `x,density` — one kernel density curve.
pub fn write_kde_curve(path: &Path, curve: &KdeCurve) -> Result<()> {
    let mut w = open_writer(path)?;
    w.write_record(["x", "density"])?;
    for (x, d) in curve.grid.iter().zip(&curve.density) {
        write_record(&mut w, [x.to_string(), d.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn is_numeric(field: &str) -> bool {
    field.trim().parse::<f64>().is_ok()
}

/// Read all records, reporting whether the first row was a header.
fn read_records(path: &Path) -> Result<(Option<StringRecord>, Vec<StringRecord>)> {
    let mut reader = ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut records = Vec::new();
    for record in reader.records() {
        records.push(record?);
    }
    ensure!(!records.is_empty(), "{} is empty", path.display());
    let has_header = records[0].iter().any(|f| !is_numeric(f));
    if has_header {
        let header = records.remove(0);
        ensure!(
            !records.is_empty(),
            "{} has a header but no data rows",
            path.display()
        );
        Ok((Some(header), records))
    } else {
        Ok((None, records))
    }
}

fn column_named(header: &StringRecord, names: &[&str]) -> Option<usize> {
    header.iter().position(|h| {
        let h = h.trim().to_ascii_lowercase();
        names.iter().any(|n| h == *n)
    })
}

/// Read a frequency column from any of the shapes this toolkit writes:
/// a headered table with a `frequency` or `count` column, or headerless
/// rows where the last-of-{1st, 2nd, 4th} column convention applies
/// (bare values, `rank,frequency` pairs, or full object tables).
pub fn read_frequencies(path: &Path) -> Result<Vec<f64>> {
    let (header, records) = read_records(path)?;
    let column = match &header {
        Some(h) => column_named(h, &["frequency", "count"]).ok_or_else(|| {
            anyhow!(
                "{}: no 'frequency' or 'count' column in header {:?}",
                path.display(),
                h
            )
        })?,
        None => match records[0].len() {
            1 => 0,
            2 => 1,
            4 => 3,
            other => bail!(
                "{}: cannot infer the frequency column of a headerless {}-column file",
                path.display(),
                other
            ),
        },
    };
    records
        .iter()
        .enumerate()
        .map(|(i, record)| {
            let field = record
                .get(column)
                .ok_or_else(|| anyhow!("{}: row {} is too short", path.display(), i + 1))?;
            field
                .trim()
                .parse::<f64>()
                .map_err(|_| anyhow!("{}: bad frequency '{}' on row {}", path.display(), field, i + 1))
        })
        .collect()
}

/// Read `(x, y)` pairs from the first two columns, skipping one header row
/// if present.
pub fn read_xy(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let (_, records) = read_records(path)?;
    let mut xs = Vec::with_capacity(records.len());
    let mut ys = Vec::with_capacity(records.len());
    for (i, record) in records.iter().enumerate() {
        ensure!(
            record.len() >= 2,
            "{}: row {} has fewer than two columns",
            path.display(),
            i + 1
        );
        for (slot, out) in [(0usize, &mut xs), (1usize, &mut ys)] {
            let field = record.get(slot).unwrap();
            out.push(field.trim().parse::<f64>().map_err(|_| {
                anyhow!("{}: bad value '{}' on row {}", path.display(), field, i + 1)
            })?);
        }
    }
    Ok((xs, ys))
}
