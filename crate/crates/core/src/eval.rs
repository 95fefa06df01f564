//! The two evaluation protocols and their rank comparison.
//!
//! *Individual* evaluation scores each model's list on its own with
//! NDCG@k, the traditional offline protocol. *Page* evaluation stacks
//! the candidate's list under a fixed set of carousels and scores the
//! whole page with NDCG2D, so a candidate is credited only for the new
//! relevant items it contributes and for where they land on the grid.
//! Both protocols run over the same users (those with at least one test
//! interaction) so their rankings are comparable.

use std::io::Write;

use rayon::prelude::*;

use crate::data::{DataSplit, InteractionMatrix};
use crate::error::{Error, Result};
use crate::metrics::{
    ndcg_at_k, DiscountWeights, Page, PageScan, RecommendationList, RelevanceJudgments,
};
use crate::models::{Model, Ranker};

/// Knobs shared by both protocols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationConfig {
    /// Carousel length.
    pub k: usize,
    /// Page discount weights.
    pub weights: DiscountWeights,
    /// Remove each user's training items from their lists.
    pub exclude_seen: bool,
    /// Minimum test rating to count as relevant; `None` accepts any
    /// test interaction.
    pub relevance_threshold: Option<f64>,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            k: 10,
            weights: DiscountWeights::even(),
            exclude_seen: true,
            relevance_threshold: None,
        }
    }
}

/// A model with the identifier used in reports and tie-breaks.
#[derive(Debug, Clone)]
pub struct NamedModel {
    pub name: String,
    pub model: Model,
}

impl NamedModel {
    pub fn new(name: impl Into<String>, model: Model) -> Self {
        Self { name: name.into(), model }
    }
}

/// Mean metric plus the per-user values behind it, aligned with
/// `users`. Values are aggregated in user-index order regardless of
/// evaluation parallelism.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub mean: f64,
    pub users: Vec<usize>,
    pub per_user: Vec<f64>,
}

/// Users with at least one relevant test interaction; both protocols
/// run over exactly this set.
pub fn evaluable_users(judged: &InteractionMatrix, threshold: Option<f64>) -> Vec<usize> {
    (0..judged.n_users())
        .filter(|&u| !RelevanceJudgments::from_matrix_row(judged, u, threshold).is_empty())
        .collect()
}

/// Mean NDCG@k of `model` against the interactions in `judged`
/// (the test matrix under the standard protocol, the validation matrix
/// during tuning).
pub fn mean_ndcg_against(
    model: &Model,
    train: &InteractionMatrix,
    judged: &InteractionMatrix,
    cfg: &EvaluationConfig,
) -> Result<f64> {
    let ranker = Ranker::new(model, train)?;
    let users = evaluable_users(judged, cfg.relevance_threshold);
    if users.is_empty() {
        return Err(Error::NoEvaluableUsers);
    }
    let per_user: Vec<f64> = users
        .par_iter()
        .map(|&u| {
            let rel = RelevanceJudgments::from_matrix_row(judged, u, cfg.relevance_threshold);
            let list = ranker.recommend(u, cfg.k, cfg.exclude_seen);
            ndcg_at_k(&list, &rel, cfg.k)
        })
        .collect();
    Ok(mean(&per_user))
}

/// The traditional protocol: each model scored in isolation.
pub fn evaluate_individual(
    model: &Model,
    split: &DataSplit,
    cfg: &EvaluationConfig,
) -> Result<f64> {
    mean_ndcg_against(model, &split.train, &split.test, cfg)
}

/// The carousel protocol: the candidate's list is appended below the
/// fixed carousels and the whole page is scored with NDCG2D. Lists are
/// generated independently per model; providers are unaware of each
/// other, so items may repeat across carousels (and earn nothing the
/// second time).
pub fn evaluate_page(
    fixed: &[&Model],
    candidate: &Model,
    split: &DataSplit,
    cfg: &EvaluationConfig,
) -> Result<f64> {
    evaluate_page_detailed(fixed, candidate, split, cfg).map(|e| e.mean)
}

/// [`evaluate_page`] with the per-user values.
pub fn evaluate_page_detailed(
    fixed: &[&Model],
    candidate: &Model,
    split: &DataSplit,
    cfg: &EvaluationConfig,
) -> Result<Evaluation> {
    let users = evaluable_users(&split.test, cfg.relevance_threshold);
    if users.is_empty() {
        return Err(Error::NoEvaluableUsers);
    }
    let fixed_lists = fixed_lists_per_user(fixed, &users, split, cfg)?;
    let ranker = Ranker::new(candidate, &split.train)?;
    let scan = PageScan::new(fixed.len() + 1, cfg.k, &cfg.weights);
    let per_user: Vec<f64> = users
        .par_iter()
        .enumerate()
        .map(|(slot, &u)| {
            let list = ranker.recommend(u, cfg.k, cfg.exclude_seen);
            page_value(&fixed_lists[slot], list, u, &scan, split, cfg)
        })
        .collect::<Result<_>>()?;
    Ok(Evaluation { mean: mean(&per_user), users, per_user })
}

/// Score one page assembled from prebuilt fixed lists plus the
/// candidate list.
fn page_value(
    fixed_rows: &[RecommendationList],
    candidate_row: RecommendationList,
    user: usize,
    scan: &PageScan,
    split: &DataSplit,
    cfg: &EvaluationConfig,
) -> Result<f64> {
    let rel =
        RelevanceJudgments::from_matrix_row(&split.test, user, cfg.relevance_threshold);
    if rel.is_empty() {
        return Ok(0.0);
    }
    let mut rows = Vec::with_capacity(fixed_rows.len() + 1);
    rows.extend(fixed_rows.iter().cloned());
    rows.push(candidate_row);
    let page = Page::new(rows)?;
    let (numerator, idcg) = match scan.dcg2d_parts(&page, &rel) {
        Ok(parts) => parts,
        // A page built on a tiny catalog can come up short of k columns;
        // score it under its own shape.
        Err(Error::ShapeMismatch(_)) => {
            crate::metrics::page_dcg2d_parts(&page, &rel, &cfg.weights)?
        }
        Err(other) => return Err(other),
    };
    Ok(numerator / idcg)
}

/// Lists of every fixed model for every evaluable user, user-major.
fn fixed_lists_per_user(
    fixed: &[&Model],
    users: &[usize],
    split: &DataSplit,
    cfg: &EvaluationConfig,
) -> Result<Vec<Vec<RecommendationList>>> {
    let rankers: Vec<Ranker> = fixed
        .iter()
        .map(|m| Ranker::new(m, &split.train))
        .collect::<Result<_>>()?;
    Ok(users
        .par_iter()
        .map(|&u| {
            rankers
                .iter()
                .map(|r| r.recommend(u, cfg.k, cfg.exclude_seen))
                .collect()
        })
        .collect())
}

/// The pages a candidate would produce for every evaluable user,
/// together with each user's relevance judgments. Feeds the placement
/// heatmap.
pub fn build_pages(
    fixed: &[&Model],
    candidate: &Model,
    split: &DataSplit,
    cfg: &EvaluationConfig,
) -> Result<(Vec<Page>, Vec<RelevanceJudgments>)> {
    let users = evaluable_users(&split.test, cfg.relevance_threshold);
    if users.is_empty() {
        return Err(Error::NoEvaluableUsers);
    }
    let fixed_lists = fixed_lists_per_user(fixed, &users, split, cfg)?;
    let ranker = Ranker::new(candidate, &split.train)?;
    let pages: Vec<Page> = users
        .par_iter()
        .enumerate()
        .map(|(slot, &u)| {
            let mut rows = fixed_lists[slot].clone();
            rows.push(ranker.recommend(u, cfg.k, cfg.exclude_seen));
            Page::new(rows)
        })
        .collect::<Result<_>>()?;
    let rels = users
        .iter()
        .map(|&u| {
            RelevanceJudgments::from_matrix_row(&split.test, u, cfg.relevance_threshold)
        })
        .collect();
    Ok((pages, rels))
}

/// Per-model outcome across the two protocols.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelOutcome {
    pub model: String,
    pub individual_ndcg: f64,
    pub carousel_ndcg2d: f64,
    /// Rank under the traditional protocol, 1 = best.
    pub individual_rank: usize,
    /// Rank under the carousel protocol, 1 = best.
    pub carousel_rank: usize,
    /// individual_rank - carousel_rank; positive means the model gains
    /// standing once the page context is taken into account.
    pub delta_rank: i64,
}

/// The comparison table of one evaluation run.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    /// One outcome per candidate, in the input candidate order.
    pub outcomes: Vec<ModelOutcome>,
    pub n_users_evaluated: usize,
}

impl MetricReport {
    pub fn outcome(&self, model: &str) -> Option<&ModelOutcome> {
        self.outcomes.iter().find(|o| o.model == model)
    }

    /// CSV with the columns of the comparison table:
    /// `model,individual_ndcg,carousel_ndcg2d,individual_rank,carousel_rank,delta_rank`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "model,individual_ndcg,carousel_ndcg2d,individual_rank,carousel_rank,delta_rank"
        )?;
        for o in &self.outcomes {
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
        Ok(())
    }
}

/// Evaluate every candidate under both protocols (the carousel metric
/// conditioned on `fixed`) and assign dense ranks per protocol,
/// descending by metric with ties broken by model name.
pub fn rank_candidates(
    fixed: &[&NamedModel],
    candidates: &[&NamedModel],
    split: &DataSplit,
    cfg: &EvaluationConfig,
) -> Result<MetricReport> {
    if candidates.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "ranking needs at least 2 candidates, got {}",
            candidates.len()
        )));
    }
    let users = evaluable_users(&split.test, cfg.relevance_threshold);
    if users.is_empty() {
        return Err(Error::NoEvaluableUsers);
    }
    let fixed_models: Vec<&Model> = fixed.iter().map(|m| &m.model).collect();
    let fixed_lists = fixed_lists_per_user(&fixed_models, &users, split, cfg)?;
    let scan = PageScan::new(fixed.len() + 1, cfg.k, &cfg.weights);

    let mut names = Vec::with_capacity(candidates.len());
    let mut individual = Vec::with_capacity(candidates.len());
    let mut carousel = Vec::with_capacity(candidates.len());
    for candidate in candidates {
        let ranker = Ranker::new(&candidate.model, &split.train)?;
        let values: Vec<(f64, f64)> = users
            .par_iter()
            .enumerate()
            .map(|(slot, &u)| {
                let rel = RelevanceJudgments::from_matrix_row(
                    &split.test,
                    u,
                    cfg.relevance_threshold,
                );
                let list = ranker.recommend(u, cfg.k, cfg.exclude_seen);
                let ndcg = ndcg_at_k(&list, &rel, cfg.k);
                let page =
                    page_value(&fixed_lists[slot], list, u, &scan, split, cfg)?;
                Ok((ndcg, page))
            })
            .collect::<Result<_>>()?;
        names.push(candidate.name.clone());
        individual.push(mean_by(&values, |v| v.0));
        carousel.push(mean_by(&values, |v| v.1));
    }

    let individual_ranks = dense_ranks(&names, &individual);
    let carousel_ranks = dense_ranks(&names, &carousel);
    let outcomes = names
        .iter()
        .enumerate()
        .map(|(i, name)| ModelOutcome {
            model: name.clone(),
            individual_ndcg: individual[i],
            carousel_ndcg2d: carousel[i],
            individual_rank: individual_ranks[i],
            carousel_rank: carousel_ranks[i],
            delta_rank: individual_ranks[i] as i64 - carousel_ranks[i] as i64,
        })
        .collect();
    Ok(MetricReport { outcomes, n_users_evaluated: users.len() })
}

/// Build a page greedily from a model pool: each step appends the model
/// whose addition maximizes the page metric given the rows already
/// chosen. Ties prefer the lexicographically smaller name.
pub fn greedy_page_builder(
    pool: &[NamedModel],
    n_rows: usize,
    split: &DataSplit,
    cfg: &EvaluationConfig,
) -> Result<Vec<String>> {
    if pool.len() < n_rows {
        return Err(Error::InvalidInput(format!(
            "cannot build {n_rows} rows from a pool of {}",
            pool.len()
        )));
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let fixed: Vec<&Model> = chosen.iter().map(|&i| &pool[i].model).collect();
        let mut best: Option<(f64, &str, usize)> = None;
        for (i, candidate) in pool.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let value = evaluate_page(&fixed, &candidate.model, split, cfg)?;
            let better = match best {
                None => true,
                Some((best_value, best_name, _)) => {
                    value > best_value
                        || (value == best_value && candidate.name.as_str() < best_name)
                }
            };
            if better {
                best = Some((value, candidate.name.as_str(), i));
            }
        }
        chosen.push(best.expect("pool has unchosen models").2);
    }
    Ok(chosen.into_iter().map(|i| pool[i].name.clone()).collect())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn mean_by<T>(values: &[T], f: impl Fn(&T) -> f64) -> f64 {
    values.iter().map(f).sum::<f64>() / values.len() as f64
}

/// Positions 1..=n after sorting by metric descending, name ascending.
fn dense_ranks(names: &[String], metrics: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&a, &b| {
        metrics[b]
            .partial_cmp(&metrics[a])
            .expect("finite metrics")
            .then_with(|| names[a].cmp(&names[b]))
    });
    let mut ranks = vec![0usize; names.len()];
    for (pos, &idx) in order.iter().enumerate() {
        ranks[idx] = pos + 1;
    }
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{IdMaps, Interaction, InteractionMatrix, InteractionSet};
    use crate::models::{ItemScoresModel, Model};
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    /// A split with hand-picked train and test supports over a fixed
    /// id space of `n_users` x `n_items` (external ids = indices).
    fn split_from(
        n_users: u32,
        n_items: u32,
        train: &[(u32, u32, f64)],
        test: &[(u32, u32, f64)],
    ) -> crate::data::DataSplit {
        let mut skeleton = Vec::new();
        for u in 0..n_users {
            for i in 0..n_items {
                skeleton.push(Interaction {
                    user: u,
                    item: i,
                    rating: 1.0,
                    timestamp: 0,
                });
            }
        }
        let ids: Arc<IdMaps> = IdMaps::from_set(&InteractionSet::from_records(skeleton));
        let to_records = |entries: &[(u32, u32, f64)]| {
            entries
                .iter()
                .enumerate()
                .map(|(t, &(user, item, rating))| Interaction {
                    user,
                    item,
                    rating,
                    timestamp: t as i64,
                })
                .collect::<Vec<_>>()
        };
        crate::data::DataSplit {
            train: InteractionMatrix::from_records_with_ids(
                &to_records(train),
                Arc::clone(&ids),
            )
            .unwrap(),
            validation: InteractionMatrix::from_records_with_ids(&[], Arc::clone(&ids))
                .unwrap(),
            test: InteractionMatrix::from_records_with_ids(&to_records(test), ids).unwrap(),
            seed: 0,
            ratios: (0.0, 0.0, 1.0),
        }
    }

    fn scores_model(scores: Vec<f64>) -> Model {
        Model::TopPopular(ItemScoresModel::new(scores).unwrap())
    }

    fn cfg(k: usize) -> EvaluationConfig {
        EvaluationConfig { k, ..Default::default() }
    }

    #[test]
    fn oracle_recommender_scores_one() {
        // A factor model that reproduces the test matrix ranks every
        // user's test items first. Item 5 is a dummy so no user is
        // cold (a cold profile would trigger the popularity fallback).
        let test_entries: Vec<(u32, u32, f64)> =
            vec![(0, 0, 4.0), (0, 3, 5.0), (1, 2, 3.0), (2, 1, 2.0), (2, 4, 4.5)];
        let train_entries: Vec<(u32, u32, f64)> =
            vec![(0, 5, 1.0), (1, 5, 1.0), (2, 5, 1.0)];
        let split = split_from(3, 6, &train_entries, &test_entries);
        let mut user_factors = ndarray::Array2::zeros((3, 6));
        for &(u, i, r) in &test_entries {
            user_factors[(u as usize, i as usize)] = r;
        }
        let item_factors = ndarray::Array2::eye(6);
        let model = Model::FunkSvd(crate::models::FactorModel::new(
            user_factors,
            item_factors,
        ));
        let got = evaluate_individual(&model, &split, &cfg(2)).unwrap();
        assert_abs_diff_eq!(got, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn random_scores_on_large_catalog_near_zero() {
        use rand::Rng;
        use rand::SeedableRng;
        let n_items = 4000u32;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let test: Vec<(u32, u32, f64)> =
            (0..40).map(|u| (u, rng.gen_range(0..n_items), 4.0)).collect();
        let split = split_from(40, n_items, &[], &test);
        let random_scores: Vec<f64> = (0..n_items).map(|_| rng.gen::<f64>()).collect();
        let model = scores_model(random_scores);
        let got = evaluate_individual(&model, &split, &cfg(10)).unwrap();
        assert!(got < 0.05, "random recommender scored {got}");
    }

    #[test]
    fn users_without_test_interactions_are_skipped() {
        let split = split_from(4, 3, &[], &[(0, 1, 5.0), (2, 0, 4.0)]);
        let model = scores_model(vec![3.0, 2.0, 1.0]);
        let eval = evaluate_page_detailed(&[], &model, &split, &cfg(2)).unwrap();
        assert_eq!(eval.users, vec![0, 2]);
    }

    #[test]
    fn no_evaluable_users_is_an_error() {
        let split = split_from(3, 3, &[(0, 0, 1.0)], &[]);
        let model = scores_model(vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            evaluate_individual(&model, &split, &cfg(2)),
            Err(Error::NoEvaluableUsers)
        ));
    }

    #[test]
    fn empty_fixed_page_equals_individual_per_user() {
        let split = split_from(
            6,
            8,
            &[(0, 0, 3.0), (1, 4, 2.0), (3, 6, 1.0)],
            &[(0, 1, 5.0), (1, 2, 4.0), (2, 3, 3.0), (3, 1, 2.0), (4, 5, 1.0)],
        );
        let model = scores_model(vec![8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0]);
        let page_eval = evaluate_page_detailed(&[], &model, &split, &cfg(4)).unwrap();
        for (slot, &u) in page_eval.users.iter().enumerate() {
            let rel = RelevanceJudgments::from_matrix_row(&split.test, u, None);
            let ranker = Ranker::new(&model, &split.train).unwrap();
            let list = ranker.recommend(u, 4, true);
            let want = ndcg_at_k(&list, &rel, 4);
            assert!(
                (page_eval.per_user[slot] - want).abs() < 1e-12,
                "user {u}: page {} vs individual {want}",
                page_eval.per_user[slot]
            );
        }
        let individual = evaluate_individual(&model, &split, &cfg(4)).unwrap();
        assert_abs_diff_eq!(page_eval.mean, individual, epsilon = 1e-12);
    }

    #[test]
    fn fixed_carousel_does_not_change_individual_metric() {
        let split = split_from(4, 6, &[(0, 0, 2.0)], &[(0, 1, 5.0), (1, 2, 4.0), (3, 5, 3.0)]);
        let candidate = scores_model(vec![1.0, 6.0, 5.0, 4.0, 3.0, 2.0]);
        let fixed = scores_model(vec![6.0, 5.0, 4.0, 3.0, 2.0, 1.0]);
        let alone = evaluate_individual(&candidate, &split, &cfg(3)).unwrap();
        let _page = evaluate_page(&[&fixed], &candidate, &split, &cfg(3)).unwrap();
        let again = evaluate_individual(&candidate, &split, &cfg(3)).unwrap();
        assert_eq!(alone, again);
    }

    #[test]
    fn duplicate_candidate_adds_nothing_to_page_numerator() {
        // fixed = [M], candidate = M: the second row repeats the first,
        // so every page scores exactly the one-row numerator under the
        // two-row ideal.
        let split = split_from(5, 6, &[], &[(0, 0, 5.0), (1, 1, 4.0), (2, 2, 3.0), (3, 0, 2.0)]);
        let model = scores_model(vec![6.0, 5.0, 4.0, 3.0, 2.0, 1.0]);
        let cfg = cfg(3);
        let eval = evaluate_page_detailed(&[&model], &model, &split, &cfg).unwrap();
        let ranker = Ranker::new(&model, &split.train).unwrap();
        for (slot, &u) in eval.users.iter().enumerate() {
            let rel = RelevanceJudgments::from_matrix_row(&split.test, u, None);
            let list = ranker.recommend(u, 3, true);
            let single = Page::new(vec![list.clone()]).unwrap();
            let double = Page::new(vec![list.clone(), list.clone()]).unwrap();
            let (single_num, _) =
                crate::metrics::page_dcg2d_parts(&single, &rel, &cfg.weights).unwrap();
            let (double_num, double_idcg) =
                crate::metrics::page_dcg2d_parts(&double, &rel, &cfg.weights).unwrap();
            assert_eq!(single_num, double_num, "dedup must erase the second row");
            assert!(
                (eval.per_user[slot] - double_num / double_idcg).abs() < 1e-15,
                "user {u}"
            );
        }
    }

    /// Six users care about the popular items {0, 1}, four about the
    /// niche item 2. The near-popular candidate wins individually but
    /// duplicates the fixed TopPopular carousel; the diverse candidate
    /// wins on the page.
    fn reversal_fixture() -> (crate::data::DataSplit, NamedModel, NamedModel, NamedModel) {
        let mut test = Vec::new();
        for u in 0..6 {
            test.push((u, 0, 5.0));
            test.push((u, 1, 5.0));
        }
        for u in 6..10 {
            test.push((u, 2, 5.0));
        }
        let split = split_from(10, 5, &[], &test);
        let fixed = NamedModel::new(
            "top-popular",
            scores_model(vec![10.0, 9.0, 3.0, 2.0, 1.0]),
        );
        let near_pop =
            NamedModel::new("near-pop", scores_model(vec![9.9, 9.8, 0.5, 0.4, 0.3]));
        let diverse =
            NamedModel::new("diverse", scores_model(vec![0.0, 0.1, 5.0, 4.0, 0.2]));
        (split, fixed, near_pop, diverse)
    }

    #[test]
    fn rank_reversal_under_page_protocol() {
        let (split, fixed, near_pop, diverse) = reversal_fixture();
        let cfg = cfg(2);
        let report =
            rank_candidates(&[&fixed], &[&near_pop, &diverse], &split, &cfg).unwrap();

        let near = report.outcome("near-pop").unwrap();
        let div = report.outcome("diverse").unwrap();

        // Brute-force means: individual 0.6 vs 0.4; page 0.6 vs
        // 0.6 + 0.4 / log2(3).
        assert_abs_diff_eq!(near.individual_ndcg, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(div.individual_ndcg, 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(near.carousel_ndcg2d, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(
            div.carousel_ndcg2d,
            0.6 + 0.4 / 3.0f64.log2(),
            epsilon = 1e-12
        );

        assert_eq!(near.individual_rank, 1);
        assert_eq!(div.individual_rank, 2);
        assert_eq!(near.carousel_rank, 2);
        assert_eq!(div.carousel_rank, 1);
        assert_eq!(near.delta_rank, -1);
        assert_eq!(div.delta_rank, 1);
        assert_eq!(report.n_users_evaluated, 10);
    }

    #[test]
    fn ranks_are_permutations_and_deltas_cancel() {
        let (split, fixed, near_pop, diverse) = reversal_fixture();
        let third = NamedModel::new("also-ran", scores_model(vec![0.0, 0.0, 0.0, 1.0, 2.0]));
        let report = rank_candidates(
            &[&fixed],
            &[&near_pop, &diverse, &third],
            &split,
            &cfg(2),
        )
        .unwrap();
        let mut individual: Vec<usize> =
            report.outcomes.iter().map(|o| o.individual_rank).collect();
        let mut carousel: Vec<usize> =
            report.outcomes.iter().map(|o| o.carousel_rank).collect();
        individual.sort_unstable();
        carousel.sort_unstable();
        assert_eq!(individual, vec![1, 2, 3]);
        assert_eq!(carousel, vec![1, 2, 3]);
        assert_eq!(report.outcomes.iter().map(|o| o.delta_rank).sum::<i64>(), 0);
    }

    #[test]
    fn two_candidate_sorting() {
        let split = split_from(4, 4, &[], &[(0, 0, 5.0), (1, 1, 4.0), (2, 2, 3.0)]);
        let a = NamedModel::new("a", scores_model(vec![5.0, 4.0, 3.0, 2.0]));
        let b = NamedModel::new("b", scores_model(vec![2.0, 3.0, 4.0, 5.0]));
        let report = rank_candidates(&[], &[&a, &b], &split, &cfg(2)).unwrap();
        let ra = report.outcome("a").unwrap();
        let rb = report.outcome("b").unwrap();
        assert!(ra.individual_ndcg > rb.individual_ndcg);
        assert_eq!(ra.individual_rank, 1);
        assert_eq!(rb.individual_rank, 2);
    }

    #[test]
    fn fewer_than_two_candidates_rejected() {
        let (split, _, near_pop, _) = reversal_fixture();
        assert!(rank_candidates(&[], &[&near_pop], &split, &cfg(2)).is_err());
    }

    #[test]
    fn greedy_builder_prefers_complementary_models() {
        let (split, _fixed, near_pop, diverse) = reversal_fixture();
        // a-pop and b-pop produce the same list; n-diverse is weaker
        // individually but complements them.
        let pool = vec![
            NamedModel::new("a-pop", near_pop.model.clone()),
            NamedModel::new("b-pop", near_pop.model.clone()),
            NamedModel::new("n-diverse", diverse.model.clone()),
        ];
        let order = greedy_page_builder(&pool, 2, &split, &cfg(2)).unwrap();
        assert_eq!(order, vec!["a-pop".to_string(), "n-diverse".to_string()]);
    }

    #[test]
    fn greedy_single_row_picks_best_individual() {
        let (split, fixed, near_pop, diverse) = reversal_fixture();
        let pool = vec![
            NamedModel::new("top-popular", fixed.model.clone()),
            NamedModel::new("near-pop", near_pop.model.clone()),
            NamedModel::new("diverse", diverse.model.clone()),
        ];
        let order = greedy_page_builder(&pool, 1, &split, &cfg(2)).unwrap();
        // top-popular and near-pop tie at 0.6 individually; the name
        // tie-break chooses "near-pop".
        assert_eq!(order, vec!["near-pop".to_string()]);
    }

    #[test]
    fn greedy_full_pool_is_a_permutation() {
        let (split, fixed, near_pop, diverse) = reversal_fixture();
        let pool = vec![
            NamedModel::new("p", fixed.model.clone()),
            NamedModel::new("q", near_pop.model.clone()),
            NamedModel::new("r", diverse.model.clone()),
        ];
        let mut order = greedy_page_builder(&pool, 3, &split, &cfg(2)).unwrap();
        order.sort();
        assert_eq!(order, vec!["p".to_string(), "q".to_string(), "r".to_string()]);
    }

    #[test]
    fn report_csv_has_six_columns() {
        let (split, fixed, near_pop, diverse) = reversal_fixture();
        let report =
            rank_candidates(&[&fixed], &[&near_pop, &diverse], &split, &cfg(2)).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "model,individual_ndcg,carousel_ndcg2d,individual_rank,carousel_rank,delta_rank"
        );
        assert_eq!(lines.clone().count(), 2);
        for line in lines {
            assert_eq!(line.split(',').count(), 6);
        }
    }
}
