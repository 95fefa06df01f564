//! Subcommand implementations.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};

use carousel_core::data::{
    holdout_split, parse_interactions, parse_item_features, partition_assignments,
    write_split_manifest, DataSplit, InteractionSet, ItemContentMatrix, Partition,
};
use carousel_core::eval::{
    self, EvaluationConfig, NamedModel,
};
use carousel_core::metrics::{hit_heatmap, DiscountGrid, DiscountWeights};
use carousel_core::models::{
    fit, load_model, save_model, HyperParams, ModelFamily, TrainedModel,
};
use carousel_core::tuning::random_search;

use crate::config::RunConfig;
use crate::Common;

/// Everything a command needs after config resolution.
struct Workspace {
    config: RunConfig,
    base: PathBuf,
    out: PathBuf,
}

fn open(common: &Common) -> Result<Workspace> {
    let (mut config, base) = RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        // The flag is the root seed: every random stream follows it.
        config.split.seed = seed;
        config.tuning.seed = seed;
    }
    if let Some(k) = common.k {
        config.eval.k = k;
    }
    if let Some(w) = common.w_row {
        config.eval.w_row = w;
    }
    if let Some(w) = common.w_col {
        config.eval.w_col = w;
    }
    if let Some(fixed) = &common.fixed {
        // `--fixed ""` clears the fixed carousels entirely.
        config.eval.fixed =
            fixed.iter().filter(|s| !s.is_empty()).cloned().collect();
    }
    config.validate(&base)?;
    fs::create_dir_all(&common.out)
        .with_context(|| format!("creating output directory {}", common.out.display()))?;
    Ok(Workspace { config, base, out: common.out.clone() })
}

impl Workspace {
    fn load_interactions(&self) -> Result<InteractionSet> {
        let path = self.config.resolve_path(&self.base, &self.config.data.ratings);
        let file = fs::File::open(&path)
            .with_context(|| format!("opening ratings file {}", path.display()))?;
        let format = self.config.source_format()?;
        Ok(parse_interactions(BufReader::new(file), format)?)
    }

    fn split(&self, set: &InteractionSet) -> Result<DataSplit> {
        let [a, b, c] = self.config.split.ratios;
        Ok(holdout_split(set, (a, b, c), self.config.split.seed)?)
    }

    fn content_matrix(&self, split: &DataSplit) -> Result<Option<ItemContentMatrix>> {
        let Some(movies) = &self.config.data.movies else {
            return Ok(None);
        };
        let movies = self.config.resolve_path(&self.base, movies);
        let movies = fs::File::open(&movies)
            .with_context(|| format!("opening movies file {}", movies.display()))?;
        let tags = match &self.config.data.tags {
            Some(tags) => {
                let path = self.config.resolve_path(&self.base, tags);
                Some(BufReader::new(fs::File::open(&path).with_context(|| {
                    format!("opening tags file {}", path.display())
                })?))
            }
            None => None,
        };
        let (icm, stats) =
            parse_item_features(BufReader::new(movies), tags, split.train.ids())?;
        if stats.skipped_unknown_items > 0 {
            log::warn!(
                "{} metadata rows referenced items outside the rating data",
                stats.skipped_unknown_items
            );
        }
        Ok(Some(icm))
    }

    fn eval_config(&self) -> Result<EvaluationConfig> {
        Ok(EvaluationConfig {
            k: self.config.eval.k,
            weights: DiscountWeights::new(self.config.eval.w_row, self.config.eval.w_col)?,
            exclude_seen: self.config.eval.exclude_seen,
            relevance_threshold: self.config.eval.relevance_threshold,
        })
    }

    /// Resolve every configured model: load it from `models/` under the
    /// output directory when a saved container exists, train and save
    /// it otherwise.
    fn resolve_models(
        &self,
        split: &DataSplit,
        icm: Option<&ItemContentMatrix>,
    ) -> Result<Vec<NamedModel>> {
        if self.config.models.is_empty() {
            bail!("no [[model]] entries in the configuration");
        }
        let dir = self.out.join("models");
        fs::create_dir_all(&dir)?;
        let mut out = Vec::new();
        for spec in &self.config.models {
            let (label, params) = spec.resolve(&self.base)?;
            let path = dir.join(format!("{label}.model"));
            let trained = if path.exists() {
                let file = fs::File::open(&path)
                    .with_context(|| format!("opening {}", path.display()))?;
                let trained = load_model(BufReader::new(file))?;
                log::info!("loaded {label} from {}", path.display());
                trained
            } else {
                let started = Instant::now();
                let model = fit(&params, &split.train, icm)?;
                log::info!("trained {label} in {:.2?}", started.elapsed());
                let trained = TrainedModel { label: label.clone(), params, model };
                let file = fs::File::create(&path)
                    .with_context(|| format!("writing {}", path.display()))?;
                save_model(&trained, BufWriter::new(file))?;
                trained
            };
            out.push(NamedModel::new(trained.label, trained.model));
        }
        Ok(out)
    }

    /// Split the resolved models into (fixed, candidates) by label.
    /// A fixed label without a [[model]] entry is allowed only for
    /// top-popular, which has no hyperparameters.
    fn fixed_and_candidates(
        &self,
        mut models: Vec<NamedModel>,
        split: &DataSplit,
    ) -> Result<(Vec<NamedModel>, Vec<NamedModel>)> {
        let mut fixed = Vec::new();
        for label in &self.config.eval.fixed {
            if let Some(pos) = models.iter().position(|m| &m.name == label) {
                fixed.push(models.remove(pos));
            } else if label == "top-popular" {
                let model = fit(&HyperParams::TopPopular, &split.train, None)?;
                fixed.push(NamedModel::new(label.clone(), model));
            } else {
                let valid: Vec<&str> =
                    models.iter().map(|m| m.name.as_str()).collect();
                bail!(
                    "fixed model '{label}' is not configured; configured: [{}]",
                    valid.join(", ")
                );
            }
        }
        Ok((fixed, models))
    }

    /// Record enough to replay this run bit-identically.
    fn write_run_record(&self, command: &str) -> Result<()> {
        let record = RunRecord {
            command: command.to_string(),
            argv: std::env::args().collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: self.config.clone(),
        };
        let path = self.out.join("run_record.toml");
        fs::write(&path, toml::to_string_pretty(&record)?)
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

#[derive(serde::Serialize)]
struct RunRecord {
    command: String,
    argv: Vec<String>,
    version: String,
    config: RunConfig,
}

pub fn split(common: &Common) -> Result<()> {
    let ws = open(common)?;
    let set = ws.load_interactions()?;
    let split = ws.split(&set)?;

    let manifest_path = ws.out.join("split_manifest.txt");
    let mut manifest = BufWriter::new(fs::File::create(&manifest_path)?);
    write_split_manifest(&split, &mut manifest)?;
    manifest.flush()?;

    // The partitions themselves, as tab-separated files the parser
    // accepts back.
    let [a, b, c] = ws.config.split.ratios;
    let assignments =
        partition_assignments(set.len(), (a, b, c), ws.config.split.seed)?;
    for (name, which) in [
        ("train.tsv", Partition::Train),
        ("validation.tsv", Partition::Validation),
        ("test.tsv", Partition::Test),
    ] {
        let mut w = BufWriter::new(fs::File::create(ws.out.join(name))?);
        for (rec, part) in set.records().iter().zip(&assignments) {
            if *part == which {
                writeln!(w, "{}\t{}\t{}\t{}", rec.user, rec.item, rec.rating, rec.timestamp)?;
            }
        }
        w.flush()?;
    }
    ws.write_run_record("split")?;
    println!(
        "split: {} train / {} validation / {} test -> {}",
        split.train.nnz(),
        split.validation.nnz(),
        split.test.nnz(),
        ws.out.display()
    );
    Ok(())
}

pub fn train(common: &Common) -> Result<()> {
    let ws = open(common)?;
    let set = ws.load_interactions()?;
    let split = ws.split(&set)?;
    let icm = ws.content_matrix(&split)?;
    let models = ws.resolve_models(&split, icm.as_ref())?;
    ws.write_run_record("train")?;
    println!("trained {} models -> {}", models.len(), ws.out.join("models").display());
    Ok(())
}

pub fn tune(common: &Common, families: Option<&[String]>, budget: Option<usize>) -> Result<()> {
    let ws = open(common)?;
    let set = ws.load_interactions()?;
    let split = ws.split(&set)?;
    let icm = ws.content_matrix(&split)?;
    let budget = budget.unwrap_or(ws.config.tuning.budget);
    let space = ws.config.tuning.space.unwrap_or_default();

    let families: Vec<ModelFamily> = match families {
        Some(names) => names
            .iter()
            .map(|n| n.parse::<ModelFamily>())
            .collect::<std::result::Result<_, _>>()?,
        None => vec![
            ModelFamily::ItemKnn,
            ModelFamily::Rp3Beta,
            ModelFamily::Ease,
            ModelFamily::FunkSvd,
            ModelFamily::Nmf,
        ],
    };

    for family in families {
        let started = Instant::now();
        let log = random_search(
            family,
            &space,
            budget,
            &split,
            icm.as_ref(),
            ws.config.tuning.seed,
        )?;
        let trials_path = ws.out.join(format!("trials_{family}.csv"));
        let mut w = BufWriter::new(fs::File::create(&trials_path)?);
        log.write_csv(&mut w)?;
        w.flush()?;

        let best_path = ws.out.join(format!("best_params_{family}.toml"));
        fs::write(&best_path, toml::to_string_pretty(log.best_params())?)?;
        println!(
            "tuned {family}: {budget} trials in {:.1?}, best validation ndcg@10 {:.4} -> {}",
            started.elapsed(),
            log.best_trial().validation_ndcg,
            best_path.display()
        );
    }
    ws.write_run_record("tune")?;
    Ok(())
}

pub fn evaluate(common: &Common) -> Result<()> {
    let ws = open(common)?;
    let set = ws.load_interactions()?;
    let split = ws.split(&set)?;
    let icm = ws.content_matrix(&split)?;
    let cfg = ws.eval_config()?;
    let models = ws.resolve_models(&split, icm.as_ref())?;
    let (fixed, candidates) = ws.fixed_and_candidates(models, &split)?;
    if candidates.len() < 2 {
        bail!(
            "evaluation needs at least 2 candidate models \
             (got {} after removing fixed ones)",
            candidates.len()
        );
    }

    let fixed_refs: Vec<&NamedModel> = fixed.iter().collect();
    let candidate_refs: Vec<&NamedModel> = candidates.iter().collect();
    let report = eval::rank_candidates(&fixed_refs, &candidate_refs, &split, &cfg)?;

    // The comparison table, with one unranked baseline row per fixed
    // model; a fixed carousel has no page metric of its own.
    let report_path = ws.out.join("report.csv");
    let mut w = BufWriter::new(fs::File::create(&report_path)?);
    writeln!(
        w,
        "model,individual_ndcg,carousel_ndcg2d,individual_rank,carousel_rank,delta_rank"
    )?;
    for f in &fixed {
        let individual = eval::evaluate_individual(&f.model, &split, &cfg)?;
        writeln!(w, "{},{},,,,", f.name, individual)?;
    }
    for o in &report.outcomes {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            o.model,
            o.individual_ndcg,
            o.carousel_ndcg2d,
            o.individual_rank,
            o.carousel_rank,
            o.delta_rank
        )?;
    }
    w.flush()?;

    let grid = DiscountGrid::new(fixed.len() + 1, cfg.k, cfg.weights);
    let mut w = BufWriter::new(fs::File::create(ws.out.join("discount_grid.csv"))?);
    grid.write_csv(&mut w)?;
    w.flush()?;

    let fixed_models: Vec<&carousel_core::models::Model> =
        fixed.iter().map(|m| &m.model).collect();
    for candidate in &candidates {
        let (pages, rels) = eval::build_pages(&fixed_models, &candidate.model, &split, &cfg)?;
        let heat = hit_heatmap(&pages, &rels)?;
        let path = ws.out.join(format!("heatmap_{}.csv", candidate.name));
        let mut w = BufWriter::new(fs::File::create(&path)?);
        heat.write_csv(&mut w)?;
        w.flush()?;
    }

    ws.write_run_record("evaluate")?;
    println!(
        "evaluated {} candidates over {} users -> {}",
        report.outcomes.len(),
        report.n_users_evaluated,
        report_path.display()
    );
    for o in &report.outcomes {
        println!(
            "  {}: individual {:.4} (rank {}), carousel {:.4} (rank {}), delta {:+}",
            o.model,
            o.individual_ndcg,
            o.individual_rank,
            o.carousel_ndcg2d,
            o.carousel_rank,
            o.delta_rank
        );
    }
    Ok(())
}

pub fn evaluate_page(common: &Common, candidate: &str) -> Result<()> {
    let ws = open(common)?;
    let set = ws.load_interactions()?;
    let split = ws.split(&set)?;
    let icm = ws.content_matrix(&split)?;
    let cfg = ws.eval_config()?;
    let models = ws.resolve_models(&split, icm.as_ref())?;
    let (fixed, mut candidates) = ws.fixed_and_candidates(models, &split)?;
    let Some(pos) = candidates.iter().position(|m| m.name == candidate) else {
        let valid: Vec<&str> = candidates.iter().map(|m| m.name.as_str()).collect();
        bail!("candidate '{candidate}' is not configured; configured: [{}]", valid.join(", "));
    };
    let candidate_model = candidates.remove(pos);
    let fixed_models: Vec<&carousel_core::models::Model> =
        fixed.iter().map(|m| &m.model).collect();
    let evaluation =
        eval::evaluate_page_detailed(&fixed_models, &candidate_model.model, &split, &cfg)?;

    let path = ws.out.join("evaluate_page.csv");
    let mut w = BufWriter::new(fs::File::create(&path)?);
    writeln!(w, "fixed,candidate,mean_ndcg2d,n_users")?;
    let fixed_names: Vec<&str> = fixed.iter().map(|m| m.name.as_str()).collect();
    writeln!(
        w,
        "{},{},{},{}",
        fixed_names.join("|"),
        candidate_model.name,
        evaluation.mean,
        evaluation.users.len()
    )?;
    w.flush()?;
    ws.write_run_record("evaluate-page")?;
    println!(
        "page [{} | {}]: mean ndcg2d {:.4} over {} users",
        fixed_names.join(", "),
        candidate_model.name,
        evaluation.mean,
        evaluation.users.len()
    );
    Ok(())
}

pub fn build_page(common: &Common, rows: usize) -> Result<()> {
    let ws = open(common)?;
    let set = ws.load_interactions()?;
    let split = ws.split(&set)?;
    let icm = ws.content_matrix(&split)?;
    let cfg = ws.eval_config()?;
    let pool = ws.resolve_models(&split, icm.as_ref())?;
    let order = eval::greedy_page_builder(&pool, rows, &split, &cfg)?;

    let path = ws.out.join("page_layout.csv");
    let mut w = BufWriter::new(fs::File::create(&path)?);
    writeln!(w, "position,model")?;
    for (i, name) in order.iter().enumerate() {
        writeln!(w, "{},{}", i + 1, name)?;
    }
    w.flush()?;
    ws.write_run_record("build-page")?;
    println!("greedy page: {}", order.join(" | "));
    Ok(())
}
