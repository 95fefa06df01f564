//! The six recommender families and top-k list generation.
//!
//! Every fit is a deterministic function of its inputs and seed, and
//! every trained model is an immutable scoring table: recommendation is
//! a pure read. The families:
//!
//! - [`fit_top_popular`]: one global popularity score per item.
//! - [`fit_itemknn_hybrid`]: item-item cosine with shrinkage over
//!   interaction columns stacked with weighted content features.
//! - [`fit_rp3beta`]: two-hop random-walk transition probabilities with
//!   a popularity demotion exponent.
//! - [`fit_ease`]: the closed-form ridge item-item model with a zero
//!   diagonal.
//! - [`fit_funksvd`]: SGD matrix factorization on explicit ratings.
//! - [`fit_nmf`]: nonnegative factorization by multiplicative updates.

mod ease;
mod funk_svd;
mod item_knn;
mod nmf;
mod store;
mod top_popular;

pub use ease::fit_ease;
pub use funk_svd::{fit_funksvd, sample_gradient, sample_loss};
pub use item_knn::fit_itemknn_hybrid;
pub use nmf::{fit_nmf, fit_nmf_with_trace, NMF_EPS};
pub use store::{load_model, save_model, TrainedModel};
pub use top_popular::fit_top_popular;

mod rp3beta;
pub use rp3beta::fit_rp3beta;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::data::{InteractionMatrix, ItemContentMatrix};
use crate::error::{Error, Result};
use crate::metrics::RecommendationList;
use crate::sparse::CsrMatrix;

/// The model families of the comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelFamily {
    TopPopular,
    ItemKnn,
    #[serde(rename = "rp3beta")]
    Rp3Beta,
    Ease,
    FunkSvd,
    Nmf,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 6] = [
        ModelFamily::TopPopular,
        ModelFamily::ItemKnn,
        ModelFamily::Rp3Beta,
        ModelFamily::Ease,
        ModelFamily::FunkSvd,
        ModelFamily::Nmf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::TopPopular => "top-popular",
            ModelFamily::ItemKnn => "item-knn",
            ModelFamily::Rp3Beta => "rp3beta",
            ModelFamily::Ease => "ease",
            ModelFamily::FunkSvd => "funk-svd",
            ModelFamily::Nmf => "nmf",
        }
    }

    /// TopPopular scores every user identically; the rest do not.
    pub fn is_personalized(self) -> bool {
        !matches!(self, ModelFamily::TopPopular)
    }
}

impl std::fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownModel {
                name: s.to_string(),
                valid: ModelFamily::ALL.map(|f| f.name()).join(", "),
            })
    }
}

/// Neighborhood size, cosine shrinkage, and the weight of the stacked
/// content features relative to the interaction columns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ItemKnnParams {
    pub top_k: usize,
    pub shrink: f64,
    pub icm_weight: f64,
}

impl Default for ItemKnnParams {
    fn default() -> Self {
        Self { top_k: 100, shrink: 10.0, icm_weight: 1.0 }
    }
}

/// Transition exponent `alpha`, popularity demotion `beta`, and the
/// neighborhood size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Rp3BetaParams {
    pub top_k: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for Rp3BetaParams {
    fn default() -> Self {
        Self { top_k: 100, alpha: 1.0, beta: 0.6 }
    }
}

/// Ridge strength and the guard on the dense item-item solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EaseParams {
    pub l2: f64,
    /// Refuse to build the dense Gram matrix past this many items.
    #[serde(default = "EaseParams::default_max_items")]
    pub max_items: usize,
}

impl EaseParams {
    fn default_max_items() -> usize {
        25_000
    }
}

impl Default for EaseParams {
    fn default() -> Self {
        Self { l2: 100.0, max_items: Self::default_max_items() }
    }
}

/// Latent dimensionality, SGD step size, L2 penalty, epoch count, and
/// the seed driving initialization and sample order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FunkSvdParams {
    pub factors: usize,
    pub learn_rate: f64,
    pub reg: f64,
    pub epochs: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for FunkSvdParams {
    fn default() -> Self {
        Self { factors: 64, learn_rate: 0.02, reg: 0.01, epochs: 30, seed: default_seed() }
    }
}

/// Latent dimensionality, multiplicative-update count, and the
/// initialization seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NmfParams {
    pub factors: usize,
    pub iterations: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for NmfParams {
    fn default() -> Self {
        Self { factors: 64, iterations: 100, seed: default_seed() }
    }
}

fn default_seed() -> u64 {
    42
}

/// One hyperparameter record per family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum HyperParams {
    #[serde(rename = "top-popular")]
    TopPopular,
    #[serde(rename = "item-knn")]
    ItemKnn(ItemKnnParams),
    #[serde(rename = "rp3beta")]
    Rp3Beta(Rp3BetaParams),
    #[serde(rename = "ease")]
    Ease(EaseParams),
    #[serde(rename = "funk-svd")]
    FunkSvd(FunkSvdParams),
    #[serde(rename = "nmf")]
    Nmf(NmfParams),
}

impl HyperParams {
    pub fn family(&self) -> ModelFamily {
        match self {
            HyperParams::TopPopular => ModelFamily::TopPopular,
            HyperParams::ItemKnn(_) => ModelFamily::ItemKnn,
            HyperParams::Rp3Beta(_) => ModelFamily::Rp3Beta,
            HyperParams::Ease(_) => ModelFamily::Ease,
            HyperParams::FunkSvd(_) => ModelFamily::FunkSvd,
            HyperParams::Nmf(_) => ModelFamily::Nmf,
        }
    }

    /// Family defaults, the starting point for config files.
    pub fn defaults_for(family: ModelFamily) -> Self {
        match family {
            ModelFamily::TopPopular => HyperParams::TopPopular,
            ModelFamily::ItemKnn => HyperParams::ItemKnn(ItemKnnParams::default()),
            ModelFamily::Rp3Beta => HyperParams::Rp3Beta(Rp3BetaParams::default()),
            ModelFamily::Ease => HyperParams::Ease(EaseParams::default()),
            ModelFamily::FunkSvd => HyperParams::FunkSvd(FunkSvdParams::default()),
            ModelFamily::Nmf => HyperParams::Nmf(NmfParams::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidInput(msg));
        match self {
            HyperParams::TopPopular => Ok(()),
            HyperParams::ItemKnn(p) => {
                if p.top_k == 0 {
                    return fail("item-knn top_k must be at least 1".into());
                }
                if !(p.shrink >= 0.0 && p.shrink.is_finite()) {
                    return fail(format!("item-knn shrink must be >= 0, got {}", p.shrink));
                }
                if !(p.icm_weight >= 0.0 && p.icm_weight.is_finite()) {
                    return fail(format!(
                        "item-knn icm_weight must be >= 0, got {}",
                        p.icm_weight
                    ));
                }
                Ok(())
            }
            HyperParams::Rp3Beta(p) => {
                if p.top_k == 0 {
                    return fail("rp3beta top_k must be at least 1".into());
                }
                if !(p.alpha >= 0.0 && p.alpha.is_finite()) {
                    return fail(format!("rp3beta alpha must be >= 0, got {}", p.alpha));
                }
                if !(p.beta >= 0.0 && p.beta.is_finite()) {
                    return fail(format!("rp3beta beta must be >= 0, got {}", p.beta));
                }
                Ok(())
            }
            HyperParams::Ease(p) => {
                if !(p.l2 > 0.0 && p.l2.is_finite()) {
                    return fail(format!(
                        "ease l2 must be > 0 (the Gram matrix may be singular), got {}",
                        p.l2
                    ));
                }
                Ok(())
            }
            HyperParams::FunkSvd(p) => {
                if p.factors == 0 {
                    return fail("funk-svd factors must be at least 1".into());
                }
                if p.epochs == 0 {
                    return fail("funk-svd epochs must be at least 1".into());
                }
                if !(p.learn_rate > 0.0 && p.learn_rate.is_finite()) {
                    return fail(format!(
                        "funk-svd learn_rate must be > 0, got {}",
                        p.learn_rate
                    ));
                }
                if !(p.reg >= 0.0 && p.reg.is_finite()) {
                    return fail(format!("funk-svd reg must be >= 0, got {}", p.reg));
                }
                Ok(())
            }
            HyperParams::Nmf(p) => {
                if p.factors == 0 {
                    return fail("nmf factors must be at least 1".into());
                }
                if p.iterations == 0 {
                    return fail("nmf iterations must be at least 1".into());
                }
                Ok(())
            }
        }
    }
}

/// One global score per item; what TopPopular learns.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemScoresModel {
    scores: Vec<f64>,
}

impl ItemScoresModel {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if scores.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite item score".into()));
        }
        Ok(Self { scores })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }
}

/// Sparse item-item similarities with at most `top_k` stored entries
/// per column and a zero diagonal. Row `i` holds the similarities
/// `s(i, j)` contributing to scores of items `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityModel {
    sim: CsrMatrix,
    top_k: usize,
}

impl SimilarityModel {
    pub(crate) fn new(sim: CsrMatrix, top_k: usize) -> Self {
        Self { sim, top_k }
    }

    pub fn similarities(&self) -> &CsrMatrix {
        &self.sim
    }

    pub fn top_k(&self) -> usize {
        self.top_k
    }
}

/// Dense item-item weights with an exactly zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSimilarityModel {
    weights: Array2<f64>,
}

impl DenseSimilarityModel {
    pub(crate) fn new(weights: Array2<f64>) -> Self {
        Self { weights }
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }
}

/// Dense user and item factor matrices, `n_users x f` and `n_items x f`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel {
    user_factors: Array2<f64>,
    item_factors: Array2<f64>,
}

impl FactorModel {
    pub(crate) fn new(user_factors: Array2<f64>, item_factors: Array2<f64>) -> Self {
        debug_assert_eq!(user_factors.ncols(), item_factors.ncols());
        Self { user_factors, item_factors }
    }

    pub fn user_factors(&self) -> &Array2<f64> {
        &self.user_factors
    }

    pub fn item_factors(&self) -> &Array2<f64> {
        &self.item_factors
    }

    pub fn n_factors(&self) -> usize {
        self.user_factors.ncols()
    }

    /// Predicted rating for one (user, item) pair.
    pub fn predict(&self, user: usize, item: usize) -> f64 {
        self.user_factors.row(user).dot(&self.item_factors.row(item))
    }
}

/// A trained model of any family.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    TopPopular(ItemScoresModel),
    ItemKnn(SimilarityModel),
    Rp3Beta(SimilarityModel),
    Ease(DenseSimilarityModel),
    FunkSvd(FactorModel),
    Nmf(FactorModel),
}

impl Model {
    pub fn family(&self) -> ModelFamily {
        match self {
            Model::TopPopular(_) => ModelFamily::TopPopular,
            Model::ItemKnn(_) => ModelFamily::ItemKnn,
            Model::Rp3Beta(_) => ModelFamily::Rp3Beta,
            Model::Ease(_) => ModelFamily::Ease,
            Model::FunkSvd(_) => ModelFamily::FunkSvd,
            Model::Nmf(_) => ModelFamily::Nmf,
        }
    }

    /// Scores for every catalog item as seen by one user.
    pub fn score_user(&self, train: &InteractionMatrix, user: usize) -> Vec<f64> {
        match self {
            Model::TopPopular(m) => m.scores.clone(),
            Model::ItemKnn(m) | Model::Rp3Beta(m) => {
                let mut acc = vec![0.0f64; train.n_items()];
                let (items, ratings) = train.user_row(user);
                for (&i, &r) in items.iter().zip(ratings) {
                    let (cols, vals) = m.sim.row(i as usize);
                    for (&j, &s) in cols.iter().zip(vals) {
                        acc[j as usize] += r * s;
                    }
                }
                acc
            }
            Model::Ease(m) => {
                let mut acc = vec![0.0f64; train.n_items()];
                let (items, ratings) = train.user_row(user);
                for (&i, &r) in items.iter().zip(ratings) {
                    let row = m.weights.row(i as usize);
                    let row = row.as_slice().expect("row-major weights");
                    for (a, &b) in acc.iter_mut().zip(row) {
                        *a += r * b;
                    }
                }
                acc
            }
            Model::FunkSvd(m) | Model::Nmf(m) => {
                let u = m.user_factors.row(user);
                let u = u.as_slice().expect("row-major factors");
                (0..train.n_items())
                    .map(|i| {
                        let v = m.item_factors.row(i);
                        let v = v.as_slice().expect("row-major factors");
                        dot(u, v)
                    })
                    .collect()
            }
        }
    }
}

// Four independent accumulators keep the FMA pipeline busy; the SGD
// inner loop is dot-bound.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let quads = a.len() / 4 * 4;
    let mut acc = [0.0f64; 4];
    for (ca, cb) in a[..quads].chunks_exact(4).zip(b[..quads].chunks_exact(4)) {
        acc[0] += ca[0] * cb[0];
        acc[1] += ca[1] * cb[1];
        acc[2] += ca[2] * cb[2];
        acc[3] += ca[3] * cb[3];
    }
    let mut tail = 0.0;
    for (x, y) in a[quads..].iter().zip(&b[quads..]) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Train the family selected by `params`. The hybrid KNN consumes the
/// content matrix when one is available.
pub fn fit(
    params: &HyperParams,
    train: &InteractionMatrix,
    icm: Option<&ItemContentMatrix>,
) -> Result<Model> {
    params.validate()?;
    match params {
        HyperParams::TopPopular => Ok(Model::TopPopular(fit_top_popular(train)?)),
        HyperParams::ItemKnn(p) => {
            let fallback;
            let icm = match icm {
                Some(icm) => icm,
                None => {
                    fallback = ItemContentMatrix::empty(std::sync::Arc::clone(train.ids()));
                    &fallback
                }
            };
            Ok(Model::ItemKnn(fit_itemknn_hybrid(train, icm, p)?))
        }
        HyperParams::Rp3Beta(p) => Ok(Model::Rp3Beta(fit_rp3beta(train, p)?)),
        HyperParams::Ease(p) => Ok(Model::Ease(fit_ease(train, p)?)),
        HyperParams::FunkSvd(p) => Ok(Model::FunkSvd(fit_funksvd(train, p)?)),
        HyperParams::Nmf(p) => Ok(Model::Nmf(fit_nmf(train, p)?)),
    }
}

/// A model bound to its training matrix, ready to produce lists.
///
/// Personalized models fall back to popularity scores for users with an
/// empty training profile, so page evaluation is total over users; the
/// fallback table is computed once here.
pub struct Ranker<'a> {
    model: &'a Model,
    train: &'a InteractionMatrix,
    fallback: Option<ItemScoresModel>,
}

impl<'a> Ranker<'a> {
    pub fn new(model: &'a Model, train: &'a InteractionMatrix) -> Result<Self> {
        let fallback = if model.family().is_personalized() {
            // Popularity over an empty training matrix is all zeros;
            // bypass fit_top_popular's nonempty precondition.
            let counts = train.csr().col_counts();
            Some(ItemScoresModel::new(counts.into_iter().map(|c| c as f64).collect())?)
        } else {
            None
        };
        Ok(Self { model, train, fallback })
    }

    pub fn model(&self) -> &Model {
        self.model
    }

    /// The top-k recommendation list for one user. Ties break toward
    /// the lower item index; with `exclude_seen` the user's training
    /// items are removed before selection, so the list may come up
    /// shorter than `k` on small catalogs.
    pub fn recommend(&self, user: usize, k: usize, exclude_seen: bool) -> RecommendationList {
        let cold = self.train.user_row(user).0.is_empty();
        let scores = match (&self.fallback, cold) {
            (Some(fallback), true) => {
                log::debug!(
                    "user {user} has an empty training profile; falling back to popularity"
                );
                fallback.scores().to_vec()
            }
            _ => self.model.score_user(self.train, user),
        };
        let excluded = if exclude_seen { self.train.user_row(user).0 } else { &[] };
        top_k_by_score(&scores, k, excluded)
    }
}

/// Convenience wrapper building a throwaway [`Ranker`].
pub fn recommend(
    model: &Model,
    train: &InteractionMatrix,
    user: usize,
    k: usize,
    exclude_seen: bool,
) -> Result<RecommendationList> {
    Ok(Ranker::new(model, train)?.recommend(user, k, exclude_seen))
}

/// Select the k best-scored items, skipping `excluded` (sorted), with
/// ties broken by ascending item index.
fn top_k_by_score(scores: &[f64], k: usize, excluded: &[u32]) -> RecommendationList {
    debug_assert!(excluded.windows(2).all(|w| w[0] < w[1]));
    let mut candidates: Vec<u32> = (0..scores.len() as u32)
        .filter(|i| excluded.binary_search(i).is_err())
        .collect();
    let by_score_then_index = |a: &u32, b: &u32| {
        scores[*b as usize]
            .partial_cmp(&scores[*a as usize])
            .expect("finite scores")
            .then(a.cmp(b))
    };
    if candidates.len() > k {
        candidates.select_nth_unstable_by(k - 1, by_score_then_index);
        candidates.truncate(k);
    }
    candidates.sort_unstable_by(by_score_then_index);
    RecommendationList::new(candidates).expect("selection yields unique items")
}
