//! The six subcommands: sa, calibrate, sweep, iterate, gen-data, report.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};

use sensid::calib::{log_posterior, run_mcmc, summarize_posterior, PriorSpec};
use sensid::ident::{
    assemble_report, enumerate_subsets, run_subset_study_lenient, FakeFlagThresholds,
    IterateConfig, ResponseSubset, StudySetup,
};
use sensid::sa::{detect_interactions, estimate_sobol, FixedDesignModel};

use crate::config::RunConfig;
use crate::csvio::{fmt_f64, CsvData, CsvTable};
use crate::manifest::RunManifest;
use crate::pipeline::{
    build_model, load_or_generate_dataset, mcmc_config, sa_dists, sa_nominal_x, study_options,
    write_dataset,
};
use crate::svg::pairplot;
use crate::tables;

/// Outcome handed back to `main` for exit-code selection.
pub struct CommandOutcome {
    /// Subset labels that failed during a sweep (empty elsewhere).
    pub partial_failures: Vec<String>,
}

impl CommandOutcome {
    fn clean() -> Self {
        CommandOutcome {
            partial_failures: Vec::new(),
        }
    }
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_text(dir: &Path, name: &str, text: &str, manifest: &mut RunManifest) -> Result<()> {
    std::fs::write(dir.join(name), text)
        .with_context(|| format!("writing {}", dir.join(name).display()))?;
    manifest.add_file(dir, name)
}

fn write_csv(dir: &Path, name: &str, table: &CsvTable, manifest: &mut RunManifest) -> Result<()> {
    write_text(dir, name, &table.render(), manifest)
}

/// Histogram ranges for pairplots: the prior support where finite,
/// otherwise the sample range.
fn plot_ranges(prior: &PriorSpec, columns: &[Vec<f64>]) -> Vec<(f64, f64)> {
    prior
        .support_bounds()
        .iter()
        .zip(columns)
        .map(|(&(lo, hi), col)| {
            if lo.is_finite() && hi.is_finite() {
                (lo, hi)
            } else {
                let mn = col.iter().copied().fold(f64::INFINITY, f64::min);
                let mx = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if mx > mn {
                    (mn, mx)
                } else {
                    (mn - 0.5, mn + 0.5)
                }
            }
        })
        .collect()
}

pub fn cmd_sa(config: &RunConfig, out: &Path) -> Result<CommandOutcome> {
    ensure_out_dir(out)?;
    let mut manifest = RunManifest::new("sa", config.to_toml());
    let bundle = build_model(config)?;
    let prior = config.resolve_prior(&bundle.sim.calib_bounds)?;
    let dists = sa_dists(&prior);

    let t0 = Instant::now();
    let model = FixedDesignModel::new(&bundle.sim, sa_nominal_x(&bundle.sim))?;
    let mut table = estimate_sobol(
        &model,
        &dists,
        config.sa.n,
        config.sa.seed,
        config.sa.second_order,
    )?;
    table.input_names = bundle.sim.calib_labels.clone();
    manifest.record_stage("estimate", t0.elapsed().as_secs_f64());

    write_csv(out, "sobol.csv", &tables::sobol_csv(&table), &mut manifest)?;
    write_csv(out, "sobol_ci.csv", &tables::sobol_ci_csv(&table), &mut manifest)?;
    if let Some(so) = tables::second_order_csv(&table) {
        write_csv(out, "sobol_second_order.csv", &so, &mut manifest)?;
    }
    let interactions = detect_interactions(&table, config.sa.gap_threshold, config.sa.sum_tolerance);
    write_csv(
        out,
        "interactions.csv",
        &tables::interactions_csv(&interactions, &table),
        &mut manifest,
    )?;
    let (main_svg, total_svg) = tables::sobol_charts(
        &table.input_names,
        &table.response_names,
        &table.main,
        &table.total,
    );
    write_text(out, "sobol_main.svg", &main_svg, &mut manifest)?;
    write_text(out, "sobol_total.svg", &total_svg, &mut manifest)?;
    manifest.write(out)?;
    Ok(CommandOutcome::clean())
}

pub fn cmd_calibrate(config: &RunConfig, out: &Path) -> Result<CommandOutcome> {
    ensure_out_dir(out)?;
    let mut manifest = RunManifest::new("calibrate", config.to_toml());
    let bundle = build_model(config)?;
    let dataset = load_or_generate_dataset(config, &bundle)?;
    let prior = config.resolve_prior(&bundle.sim.calib_bounds)?;
    let opts = study_options(config, &bundle.sim);

    let t0 = Instant::now();
    let setup = StudySetup::build(
        &dataset,
        &bundle.sim,
        &prior,
        &opts,
        config.pipeline.setup_seed,
    )?;
    manifest.record_stage("setup", t0.elapsed().as_secs_f64());

    let full = ResponseSubset::new((0..bundle.sim.response_dim).collect(), bundle.sim.response_dim);
    let ctx = setup.context(&full)?;
    let mcmc = mcmc_config(&config.mcmc, config.mcmc.n_steps);
    let t1 = Instant::now();
    let samples = run_mcmc(
        |theta| log_posterior(theta, &ctx, &setup.prior),
        &setup.prior,
        &mcmc,
    )?;
    manifest.record_stage("mcmc", t1.elapsed().as_secs_f64());
    let summary = summarize_posterior(&samples)?;
    if !samples.converged() {
        manifest.warn(format!(
            "chain did not pass the split R-hat threshold: {:?}",
            samples.split_rhat
        ));
    }

    let params = &bundle.sim.calib_labels;
    write_csv(out, "chain.csv", &tables::chain_csv(&samples.chain, params), &mut manifest)?;
    let mut summary_csv = CsvTable::new(tables::summary_header(params));
    summary_csv.push_row(tables::summary_row(&full.label, &summary.mean, &summary.std));
    write_csv(out, "summary.csv", &summary_csv, &mut manifest)?;

    let mut diag = CsvTable::new(vec!["parameter", "split_rhat", "ess"]);
    for (k, p) in params.iter().enumerate() {
        diag.push_row(vec![
            p.clone(),
            fmt_f64(samples.split_rhat[k]),
            fmt_f64(samples.ess[k]),
        ]);
    }
    diag.push_row(vec![
        "(acceptance_rate)".into(),
        fmt_f64(samples.acceptance_rate),
        String::new(),
    ]);
    write_csv(out, "diagnostics.csv", &diag, &mut manifest)?;

    let columns: Vec<Vec<f64>> = (0..params.len()).map(|k| samples.column(k)).collect();
    let ranges = plot_ranges(&prior, &columns);
    write_text(out, "pairplot.svg", &pairplot(params, &columns, &ranges), &mut manifest)?;
    manifest.write(out)?;
    Ok(CommandOutcome::clean())
}

pub fn cmd_sweep(config: &RunConfig, out: &Path) -> Result<CommandOutcome> {
    ensure_out_dir(out)?;
    let mut manifest = RunManifest::new("sweep", config.to_toml());
    let bundle = build_model(config)?;
    let dataset = load_or_generate_dataset(config, &bundle)?;
    let prior = config.resolve_prior(&bundle.sim.calib_bounds)?;
    let opts = study_options(config, &bundle.sim);

    let t0 = Instant::now();
    let setup = StudySetup::build(
        &dataset,
        &bundle.sim,
        &prior,
        &opts,
        config.pipeline.setup_seed,
    )?;
    manifest.record_stage("setup", t0.elapsed().as_secs_f64());

    let subsets = enumerate_subsets(bundle.sim.response_dim)?;
    let mcmc = mcmc_config(&config.mcmc, config.sweep.mcmc_steps);
    let t1 = Instant::now();
    let (results, failures) =
        run_subset_study_lenient(&setup, &subsets, &mcmc, config.sweep.base_seed)?;
    manifest.record_stage("sweep", t1.elapsed().as_secs_f64());

    if results.is_empty() {
        let (label, err) = failures.into_iter().next().expect("at least one failure");
        return Err(anyhow!(err).context(format!("every subset failed; first: {label}")));
    }
    let mut partial = Vec::new();
    for (label, err) in &failures {
        manifest.warn(format!("subset {label} failed: {err}"));
        partial.push(label.clone());
    }

    let params = &bundle.sim.calib_labels;
    write_csv(out, "sweep.csv", &tables::sweep_csv(&results, params), &mut manifest)?;

    let mut diag = CsvTable::new(vec!["output", "acceptance_rate", "converged", "max_split_rhat"]);
    for r in &results {
        let max_rhat = r.split_rhat.iter().copied().fold(f64::NAN, f64::max);
        diag.push_row(vec![
            r.label.clone(),
            fmt_f64(r.acceptance_rate),
            r.converged.to_string(),
            fmt_f64(max_rhat),
        ]);
    }
    write_csv(out, "diagnostics.csv", &diag, &mut manifest)?;

    // Prior-based sensitivity table feeding the scores and charts.
    let t2 = Instant::now();
    let sa_model = FixedDesignModel::new(&bundle.sim, sa_nominal_x(&bundle.sim))?;
    let mut sobol = estimate_sobol(&sa_model, &sa_dists(&prior), config.sa.n, config.sa.seed, false)?;
    sobol.input_names = params.clone();
    manifest.record_stage("sensitivity", t2.elapsed().as_secs_f64());
    write_csv(out, "sobol.csv", &tables::sobol_csv(&sobol), &mut manifest)?;

    if failures.is_empty() {
        let thresholds = FakeFlagThresholds {
            mean_shift: config.sweep.mean_shift_threshold,
            tightness_ratio: config.sweep.tightness_ratio,
        };
        let report = assemble_report(results.clone(), &sobol, params.clone(), &thresholds, 0)?;

        let mut corr = CsvTable::new(vec!["parameter", "score", "best_subset", "worst_subset"]);
        for (k, p) in params.iter().enumerate() {
            corr.push_row(vec![
                p.clone(),
                report.scores[k].map(fmt_f64).unwrap_or_else(|| "undefined".into()),
                report.best_subset[k].clone(),
                report.worst_subset[k].clone(),
            ]);
        }
        write_csv(out, "correlation.csv", &corr, &mut manifest)?;

        let mut flags = CsvTable::new(vec![
            "parameter",
            "subset",
            "mean_shift_sigmas",
            "std_ratio",
            "classification",
        ]);
        for e in &report.flags.entries {
            flags.push_row(vec![
                params[e.parameter].clone(),
                e.subset_label.clone(),
                fmt_f64(e.mean_shift_sigmas),
                fmt_f64(e.std_ratio),
                format!("{:?}", e.classification),
            ]);
        }
        write_csv(out, "flags.csv", &flags, &mut manifest)?;
    } else {
        manifest.warn("incomplete sweep: correlation.csv and flags.csv skipped");
    }

    let labels: Vec<String> = results.iter().map(|r| r.label.clone()).collect();
    let means: Vec<Vec<f64>> = results.iter().map(|r| r.mean.clone()).collect();
    let stds: Vec<Vec<f64>> = results.iter().map(|r| r.std.clone()).collect();
    let (means_svg, stds_svg) = tables::sweep_charts(&labels, params, &means, &stds);
    write_text(out, "sweep_means.svg", &means_svg, &mut manifest)?;
    write_text(out, "sweep_stds.svg", &stds_svg, &mut manifest)?;
    manifest.write(out)?;
    Ok(CommandOutcome {
        partial_failures: partial,
    })
}

pub fn cmd_iterate(config: &RunConfig, out: &Path) -> Result<CommandOutcome> {
    ensure_out_dir(out)?;
    let mut manifest = RunManifest::new("iterate", config.to_toml());
    let bundle = build_model(config)?;
    let dataset = load_or_generate_dataset(config, &bundle)?;
    let prior = config.resolve_prior(&bundle.sim.calib_bounds)?;

    let iter_config = IterateConfig {
        study: study_options(config, &bundle.sim),
        mcmc: mcmc_config(&config.mcmc, config.mcmc.n_steps),
        sa_n: config.iterate.sa_n,
        sa_seed: config.iterate.sa_seed,
        std_change_tol: config.iterate.std_change_tol,
        marginals_only: config.iterate.marginals_only,
        seed: config.iterate.seed,
    };
    let t0 = Instant::now();
    let iterations = sensid::ident::iterate_inverse_uq(
        &dataset,
        &bundle.sim,
        &prior,
        config.iterate.n_iter,
        &iter_config,
    )?;
    manifest.record_stage("iterate", t0.elapsed().as_secs_f64());

    let params = &bundle.sim.calib_labels;
    for result in &iterations {
        let sub = format!("iter_{}", result.iteration + 1);
        let sub_dir = out.join(&sub);
        ensure_out_dir(&sub_dir)?;
        let mut summary_csv = CsvTable::new(tables::summary_header(params));
        summary_csv.push_row(tables::summary_row("all", &result.mean, &result.std));
        summary_csv.write(&sub_dir.join("summary.csv"))?;
        manifest.add_file(out, &format!("{sub}/summary.csv"))?;
        tables::chain_csv(&result.samples.chain, params).write(&sub_dir.join("chain.csv"))?;
        manifest.add_file(out, &format!("{sub}/chain.csv"))?;
        let mut sobol = result.sobol.clone();
        sobol.input_names = params.clone();
        tables::sobol_csv(&sobol).write(&sub_dir.join("sobol.csv"))?;
        manifest.add_file(out, &format!("{sub}/sobol.csv"))?;

        let columns: Vec<Vec<f64>> = (0..params.len()).map(|k| result.samples.column(k)).collect();
        let ranges = plot_ranges(&prior, &columns);
        std::fs::write(
            sub_dir.join("pairplot.svg"),
            pairplot(params, &columns, &ranges),
        )?;
        manifest.add_file(out, &format!("{sub}/pairplot.svg"))?;
    }

    let mut conv = CsvTable::new({
        let mut h = vec!["iteration".to_string()];
        h.extend(params.iter().map(|p| format!("std_{p}")));
        h.push("max_rel_std_change".into());
        h.push("stopped_early".into());
        h
    });
    for result in &iterations {
        let mut row = vec![(result.iteration + 1).to_string()];
        row.extend(result.std.iter().map(|v| fmt_f64(*v)));
        row.push(
            result
                .max_rel_std_change
                .map(fmt_f64)
                .unwrap_or_else(|| String::from("nan")),
        );
        row.push(result.stopped_early.to_string());
        conv.push_row(row);
    }
    write_csv(out, "convergence.csv", &conv, &mut manifest)?;
    if iterations.len() < config.iterate.n_iter {
        manifest.warn(format!(
            "early stop after {} of {} iterations (max STD change below {})",
            iterations.len(),
            config.iterate.n_iter,
            config.iterate.std_change_tol
        ));
    }
    manifest.write(out)?;
    Ok(CommandOutcome::clean())
}

pub fn cmd_gen_data(config: &RunConfig, out: &Path) -> Result<CommandOutcome> {
    ensure_out_dir(out)?;
    let mut manifest = RunManifest::new("gen-data", config.to_toml());
    let bundle = build_model(config)?;
    if config.data.path.is_some() {
        bail!("gen-data generates a dataset; remove data.path from the config");
    }
    let t0 = Instant::now();
    let records = load_or_generate_dataset(config, &bundle)?;
    manifest.record_stage("generate", t0.elapsed().as_secs_f64());
    write_dataset(&out.join("dataset.json"), &bundle.sim.name, &records)?;
    manifest.add_file(out, "dataset.json")?;
    manifest.write(out)?;
    Ok(CommandOutcome::clean())
}

/// Re-render every chart that can be derived from CSV files already in the
/// directory (recursing into `iter_*` subdirectories), without recomputing
/// anything. The original run's manifest, when present, supplies the prior
/// support so pairplot axes match the original rendering.
pub fn cmd_report(dir: &Path) -> Result<CommandOutcome> {
    if !dir.is_dir() {
        bail!("report needs an existing output directory, got {}", dir.display());
    }
    let prior = RunManifest::read(dir)
        .ok()
        .and_then(|m| toml::from_str::<RunConfig>(&m.config).ok())
        .and_then(|config| {
            let bundle = build_model(&config).ok()?;
            config.resolve_prior(&bundle.sim.calib_bounds).ok()
        });

    let mut manifest = RunManifest::new("report", String::new());
    let mut rendered = render_dir(dir, dir, prior.as_ref(), &mut manifest)?;
    let mut subdirs: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.is_dir()
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with("iter_"))
        })
        .collect();
    subdirs.sort();
    for sub in subdirs {
        rendered += render_dir(&sub, dir, prior.as_ref(), &mut manifest)?;
    }
    if rendered == 0 {
        bail!("no renderable CSV files found in {}", dir.display());
    }
    let path = dir.join("report_manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(CommandOutcome::clean())
}

fn render_dir(
    dir: &Path,
    root: &Path,
    prior: Option<&PriorSpec>,
    manifest: &mut RunManifest,
) -> Result<usize> {
    let rel = |name: &str| -> String {
        let full = dir.join(name);
        full.strip_prefix(root)
            .unwrap_or(&full)
            .to_string_lossy()
            .into_owned()
    };
    let mut count = 0;

    let sobol_path = dir.join("sobol.csv");
    if sobol_path.exists() {
        let data = CsvData::read(&sobol_path)?;
        let (inputs, responses, main, total) = tables::parse_sobol_csv(&data)?;
        let (main_svg, total_svg) = tables::sobol_charts(&inputs, &responses, &main, &total);
        std::fs::write(dir.join("sobol_main.svg"), main_svg)?;
        std::fs::write(dir.join("sobol_total.svg"), total_svg)?;
        manifest.add_file(root, &rel("sobol_main.svg"))?;
        manifest.add_file(root, &rel("sobol_total.svg"))?;
        count += 2;
    }
    let sweep_path = dir.join("sweep.csv");
    if sweep_path.exists() {
        let data = CsvData::read(&sweep_path)?;
        let (labels, params, means, stds) = tables::parse_summary_csv(&data)?;
        let (means_svg, stds_svg) = tables::sweep_charts(&labels, &params, &means, &stds);
        std::fs::write(dir.join("sweep_means.svg"), means_svg)?;
        std::fs::write(dir.join("sweep_stds.svg"), stds_svg)?;
        manifest.add_file(root, &rel("sweep_means.svg"))?;
        manifest.add_file(root, &rel("sweep_stds.svg"))?;
        count += 2;
    }
    let chain_path = dir.join("chain.csv");
    if chain_path.exists() {
        let data = CsvData::read(&chain_path)?;
        let (labels, columns) = tables::parse_chain_csv(&data)?;
        let ranges = match prior.filter(|p| p.dim() == labels.len()) {
            Some(p) => plot_ranges(p, &columns),
            None => columns
                .iter()
                .map(|c| {
                    let mn = c.iter().copied().fold(f64::INFINITY, f64::min);
                    let mx = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    if mx > mn {
                        (mn, mx)
                    } else {
                        (mn - 0.5, mn + 0.5)
                    }
                })
                .collect(),
        };
        std::fs::write(dir.join("pairplot.svg"), pairplot(&labels, &columns, &ranges))?;
        manifest.add_file(root, &rel("pairplot.svg"))?;
        count += 1;
    }
    Ok(count)
}
