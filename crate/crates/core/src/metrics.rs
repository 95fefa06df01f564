//! Ranking metrics: per-list NDCG and the two-dimensional page metric.
//!
//! A page stacks several carousels into a grid. Users concentrate on the
//! top-left corner and fan out right and down, so the positional penalty
//! of a cell grows with a weighted sum of its row and column offsets:
//!
//! ```text
//! d(r, c) = log2(w_row * (r - 1) + w_col * (c - 1) + 2)
//! ```
//!
//! The two anchors that pin this formula down: `d(1, 1) = 1`, and for a
//! single-row page with `w_col = 1` it reduces to the standard DCG
//! discount `log2(i + 1)`. An item repeated across carousels is rewarded
//! only at the first cell of the scan that shows it.

use std::collections::HashSet;
use std::io::Write;

use crate::error::{Error, Result};

/// A ranked list of item indices; one carousel. No duplicates inside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecommendationList {
    items: Vec<u32>,
}

impl RecommendationList {
    pub fn new(items: Vec<u32>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(items.len());
        for &item in &items {
            if !seen.insert(item) {
                return Err(Error::InvalidInput(format!(
                    "duplicate item {item} inside a single carousel"
                )));
            }
        }
        Ok(Self { items })
    }

    pub fn items(&self) -> &[u32] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// An ordered stack of equally long carousels; the row-major page grid.
/// Duplicates across carousels are allowed: carousel providers are
/// unaware of each other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Page {
    carousels: Vec<RecommendationList>,
}

impl Page {
    pub fn new(carousels: Vec<RecommendationList>) -> Result<Self> {
        if carousels.is_empty() {
            return Err(Error::ShapeMismatch("page with no carousels".into()));
        }
        let k = carousels[0].len();
        if carousels.iter().any(|c| c.len() != k) {
            return Err(Error::ShapeMismatch(
                "page is not rectangular: carousels differ in length".into(),
            ));
        }
        Ok(Self { carousels })
    }

    pub fn n_rows(&self) -> usize {
        self.carousels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.carousels[0].len()
    }

    pub fn carousels(&self) -> &[RecommendationList] {
        &self.carousels
    }

    /// Item at 1-indexed (row, col).
    pub fn item_at(&self, row: usize, col: usize) -> u32 {
        self.carousels[row - 1].items()[col - 1]
    }
}

/// The items one user is judged against, binarized from the test
/// partition. Kept sorted for cheap membership checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevanceJudgments {
    relevant: Vec<u32>,
}

impl RelevanceJudgments {
    pub fn new(mut relevant: Vec<u32>) -> Self {
        relevant.sort_unstable();
        relevant.dedup();
        Self { relevant }
    }

    /// Judgments from one user's row of an interaction matrix. With a
    /// threshold, only interactions rated at least that high count.
    pub fn from_matrix_row(
        matrix: &crate::data::InteractionMatrix,
        user: usize,
        threshold: Option<f64>,
    ) -> Self {
        let (items, values) = matrix.user_row(user);
        let relevant = match threshold {
            None => items.to_vec(),
            Some(t) => items
                .iter()
                .zip(values)
                .filter(|(_, &v)| v >= t)
                .map(|(&i, _)| i)
                .collect(),
        };
        // Rows of a CSR matrix are already sorted and unique.
        Self { relevant }
    }

    pub fn contains(&self, item: u32) -> bool {
        self.relevant.binary_search(&item).is_ok()
    }

    pub fn len(&self) -> usize {
        self.relevant.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relevant.is_empty()
    }

    pub fn items(&self) -> &[u32] {
        &self.relevant
    }
}

/// Relative importance of moving down vs. moving right. Equal weights
/// model a user who explores both directions evenly; a phone layout
/// would penalize the vertical dimension less.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscountWeights {
    pub w_row: f64,
    pub w_col: f64,
}

impl DiscountWeights {
    pub fn new(w_row: f64, w_col: f64) -> Result<Self> {
        if !(w_row.is_finite() && w_col.is_finite() && w_row >= 0.0 && w_col >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "discount weights must be finite and nonnegative, got ({w_row}, {w_col})"
            )));
        }
        if w_row == 0.0 && w_col == 0.0 {
            return Err(Error::InvalidInput(
                "discount weights must not both be zero".into(),
            ));
        }
        Ok(Self { w_row, w_col })
    }

    /// Equal exploration in both directions.
    pub fn even() -> Self {
        Self { w_row: 1.0, w_col: 1.0 }
    }
}

impl Default for DiscountWeights {
    fn default() -> Self {
        Self::even()
    }
}

/// Weighted offset of a 1-indexed cell; the discount is monotone in it.
#[inline]
fn cell_offset(row: usize, col: usize, w: &DiscountWeights) -> f64 {
    w.w_row * (row as f64 - 1.0) + w.w_col * (col as f64 - 1.0)
}

/// Positional discount of the 1-indexed cell (row, col).
#[inline]
pub fn discount2d(row: usize, col: usize, w: &DiscountWeights) -> f64 {
    debug_assert!(row >= 1 && col >= 1);
    (cell_offset(row, col, w) + 2.0).log2()
}

/// NDCG of a single list truncated at `k`, with binary relevance.
/// Returns 0 when the user has no relevant items.
pub fn ndcg_at_k(list: &RecommendationList, rel: &RelevanceJudgments, k: usize) -> f64 {
    if rel.is_empty() || k == 0 {
        return 0.0;
    }
    let mut dcg = 0.0;
    for (pos, &item) in list.items().iter().take(k).enumerate() {
        if rel.contains(item) {
            dcg += 1.0 / ((pos as f64 + 2.0).log2());
        }
    }
    let ideal_hits = rel.len().min(k);
    let mut idcg = 0.0;
    for pos in 0..ideal_hits {
        idcg += 1.0 / ((pos as f64 + 2.0).log2());
    }
    dcg / idcg
}

/// All cells of an R x C grid in the order the user is assumed to see
/// them: ascending discount, ties broken by (row, col) ascending.
/// Cells are 1-indexed.
pub fn scan_order(rows: usize, cols: usize, w: &DiscountWeights) -> Vec<(usize, usize)> {
    let mut cells: Vec<(f64, usize, usize)> = Vec::with_capacity(rows * cols);
    for r in 1..=rows {
        for c in 1..=cols {
            cells.push((cell_offset(r, c, w), r, c));
        }
    }
    // Offsets are finite, so the comparison is total. Comparing offsets
    // instead of their logarithms keeps tie detection exact.
    cells.sort_unstable_by(|a, b| {
        a.0.partial_cmp(&b.0).expect("finite offsets").then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
    });
    cells.into_iter().map(|(_, r, c)| (r, c)).collect()
}

/// Scan order with precomputed discounts, shared by the metric and the
/// evaluation loops so a page shape is sorted once.
#[derive(Debug, Clone)]
pub struct PageScan {
    rows: usize,
    cols: usize,
    /// (row, col, discount) in scan order.
    cells: Vec<(usize, usize, f64)>,
}

impl PageScan {
    pub fn new(rows: usize, cols: usize, w: &DiscountWeights) -> Self {
        let cells = scan_order(rows, cols, w)
            .into_iter()
            .map(|(r, c)| (r, c, discount2d(r, c, w)))
            .collect();
        Self { rows, cols, cells }
    }

    /// DCG2D numerator and IDCG2D denominator of a page under this scan.
    ///
    /// The numerator rewards a cell iff its item is relevant and was not
    /// already seen at an earlier cell of the scan. The denominator
    /// fills the `min(|relevant|, R*C)` best-discount cells.
    pub fn dcg2d_parts(&self, page: &Page, rel: &RelevanceJudgments) -> Result<(f64, f64)> {
        if page.n_rows() != self.rows || page.n_cols() != self.cols {
            return Err(Error::ShapeMismatch(format!(
                "page is {}x{}, scan is {}x{}",
                page.n_rows(),
                page.n_cols(),
                self.rows,
                self.cols
            )));
        }
        let mut numerator = 0.0;
        // Pages are small; a linear-scan seen list beats hashing.
        let mut seen: Vec<u32> = Vec::with_capacity(self.cells.len());
        for &(r, c, d) in &self.cells {
            let item = page.item_at(r, c);
            if rel.contains(item) && !seen.contains(&item) {
                seen.push(item);
                numerator += 1.0 / d;
            }
        }
        let ideal_hits = rel.len().min(self.cells.len());
        let mut idcg = 0.0;
        for &(_, _, d) in &self.cells[..ideal_hits] {
            idcg += 1.0 / d;
        }
        Ok((numerator, idcg))
    }
}

/// Numerator and ideal of the page metric; exposed separately so the
/// unnormalized DCG2D can be inspected.
pub fn page_dcg2d_parts(
    page: &Page,
    rel: &RelevanceJudgments,
    w: &DiscountWeights,
) -> Result<(f64, f64)> {
    PageScan::new(page.n_rows(), page.n_cols(), w).dcg2d_parts(page, rel)
}

/// The two-dimensional, deduplicating page metric in [0, 1].
/// Returns 0 when the user has no relevant items.
pub fn page_ndcg2d(page: &Page, rel: &RelevanceJudgments, w: &DiscountWeights) -> Result<f64> {
    if rel.is_empty() {
        return Ok(0.0);
    }
    let (numerator, idcg) = page_dcg2d_parts(page, rel, w)?;
    Ok(numerator / idcg)
}

/// Per-cell positional discounts of a page shape.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscountGrid {
    rows: usize,
    cols: usize,
    weights: DiscountWeights,
    values: Vec<f64>,
}

impl DiscountGrid {
    pub fn new(rows: usize, cols: usize, weights: DiscountWeights) -> Self {
        let mut values = Vec::with_capacity(rows * cols);
        for r in 1..=rows {
            for c in 1..=cols {
                values.push(discount2d(r, c, &weights));
            }
        }
        Self { rows, cols, weights, values }
    }

    /// Discount at 1-indexed (row, col).
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[(row - 1) * self.cols + (col - 1)]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn weights(&self) -> DiscountWeights {
        self.weights
    }

    /// Row-major CSV with header `row,col,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "row,col,value")?;
        for r in 1..=self.rows {
            for c in 1..=self.cols {
                writeln!(w, "{},{},{}", r, c, self.value(r, c))?;
            }
        }
        Ok(())
    }
}

/// Per-cell counts of relevant recommendations over a user population.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HitGrid {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
}

impl HitGrid {
    pub fn count(&self, row: usize, col: usize) -> u64 {
        self.counts[(row - 1) * self.cols + (col - 1)]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major CSV with header `row,col,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "row,col,value")?;
        for r in 1..=self.rows {
            for c in 1..=self.cols {
                writeln!(w, "{},{},{}", r, c, self.count(r, c))?;
            }
        }
        Ok(())
    }
}

/// Count, per cell, the users whose recommendation at that cell is
/// relevant. No deduplication: this is the raw placement diagnostic.
pub fn hit_heatmap(pages: &[Page], rels: &[RelevanceJudgments]) -> Result<HitGrid> {
    if pages.is_empty() {
        return Err(Error::InvalidInput("no pages to aggregate".into()));
    }
    if pages.len() != rels.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} pages vs {} relevance sets",
            pages.len(),
            rels.len()
        )));
    }
    let rows = pages[0].n_rows();
    let cols = pages[0].n_cols();
    let mut counts = vec![0u64; rows * cols];
    for (page, rel) in pages.iter().zip(rels) {
        if page.n_rows() != rows || page.n_cols() != cols {
            return Err(Error::ShapeMismatch(format!(
                "page is {}x{}, expected {}x{}",
                page.n_rows(),
                page.n_cols(),
                rows,
                cols
            )));
        }
        for r in 1..=rows {
            for c in 1..=cols {
                if rel.contains(page.item_at(r, c)) {
                    counts[(r - 1) * cols + (c - 1)] += 1;
                }
            }
        }
    }
    Ok(HitGrid { rows, cols, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn list(items: &[u32]) -> RecommendationList {
        RecommendationList::new(items.to_vec()).unwrap()
    }

    fn page(rows: &[&[u32]]) -> Page {
        Page::new(rows.iter().map(|r| list(r)).collect()).unwrap()
    }

    fn rel(items: &[u32]) -> RelevanceJudgments {
        RelevanceJudgments::new(items.to_vec())
    }

    #[test]
    fn discount_anchor_is_one_at_top_left() {
        for w in [
            DiscountWeights::even(),
            DiscountWeights::new(2.0, 1.0).unwrap(),
            DiscountWeights::new(0.3, 7.5).unwrap(),
        ] {
            assert_eq!(discount2d(1, 1, &w), 1.0);
        }
    }

    #[test]
    fn discount_single_row_matches_dcg() {
        let w = DiscountWeights::even();
        assert_eq!(discount2d(1, 3, &w), 2.0); // log2(4), same as position 3 in 1-D
    }

    #[test]
    fn discount_weighted_example() {
        let w = DiscountWeights::new(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(discount2d(2, 2, &w), 5.0f64.log2(), epsilon = 1e-15);
    }

    #[test]
    fn weights_validated() {
        assert!(DiscountWeights::new(0.0, 0.0).is_err());
        assert!(DiscountWeights::new(-1.0, 1.0).is_err());
        assert!(DiscountWeights::new(f64::NAN, 1.0).is_err());
        assert!(DiscountWeights::new(0.0, 1.0).is_ok());
    }

    #[test]
    fn ndcg_perfect_single_item() {
        assert_eq!(ndcg_at_k(&list(&[5]), &rel(&[5]), 1), 1.0);
    }

    #[test]
    fn ndcg_relevant_at_second_position() {
        let got = ndcg_at_k(&list(&[9, 5]), &rel(&[5]), 2);
        assert_abs_diff_eq!(got, 1.0 / 3.0f64.log2(), epsilon = 1e-15);
    }

    #[test]
    fn ndcg_no_hits_is_zero() {
        assert_eq!(ndcg_at_k(&list(&[1, 2, 3]), &rel(&[9]), 3), 0.0);
    }

    #[test]
    fn ndcg_empty_relevance_is_zero() {
        assert_eq!(ndcg_at_k(&list(&[1, 2, 3]), &rel(&[]), 3), 0.0);
    }

    #[test]
    fn duplicate_in_carousel_rejected() {
        assert!(RecommendationList::new(vec![1, 2, 1]).is_err());
    }

    #[test]
    fn ragged_page_rejected() {
        let rows = vec![list(&[1, 2]), list(&[3])];
        assert!(matches!(Page::new(rows), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn scan_single_row_is_left_to_right() {
        let order = scan_order(1, 4, &DiscountWeights::even());
        assert_eq!(order, vec![(1, 1), (1, 2), (1, 3), (1, 4)]);
    }

    #[test]
    fn scan_tie_breaks_lexicographically() {
        let order = scan_order(2, 2, &DiscountWeights::even());
        assert_eq!(order, vec![(1, 1), (1, 2), (2, 1), (2, 2)]);
    }

    // All six cells of a 2x3 grid with w = (2, 1), sorted by hand:
    // offsets (1,1)=0 (1,2)=1 (1,3)=2 (2,1)=2 (2,2)=3 (2,3)=4,
    // and the offset-2 tie resolves to (1,3) before (2,1).
    #[test]
    fn scan_weighted_order_enumerated() {
        let order = scan_order(2, 3, &DiscountWeights::new(2.0, 1.0).unwrap());
        assert_eq!(order, vec![(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)]);
    }

    #[test]
    fn page_metric_reduces_to_list_metric_on_single_row() {
        let l = list(&[4, 9, 2, 7]);
        let r = rel(&[9, 7]);
        let p = Page::new(vec![l.clone()]).unwrap();
        let got = page_ndcg2d(&p, &r, &DiscountWeights::even()).unwrap();
        let want = ndcg_at_k(&l, &r, 4);
        assert_eq!(got, want); // identical summation order: bitwise equal
    }

    // 2x2 page [[A,B],[A,C]] with A relevant: A is rewarded at (1,1)
    // only, so DCG2D = 1 and IDCG2D = 1 (one relevant item).
    #[test]
    fn duplicate_rewarded_once() {
        let p = page(&[&[0, 1], &[0, 2]]);
        let got = page_ndcg2d(&p, &rel(&[0]), &DiscountWeights::even()).unwrap();
        assert_eq!(got, 1.0);
    }

    // 2x2 page [[B,C],[D,A]] with A relevant at the worst cell:
    // DCG2D = 1/log2(4) = 0.5, IDCG2D = 1.
    #[test]
    fn single_relevant_at_worst_cell() {
        let p = page(&[&[1, 2], &[3, 0]]);
        let got = page_ndcg2d(&p, &rel(&[0]), &DiscountWeights::even()).unwrap();
        assert_abs_diff_eq!(got, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn empty_relevance_scores_zero() {
        let p = page(&[&[1, 2], &[3, 4]]);
        assert_eq!(page_ndcg2d(&p, &rel(&[]), &DiscountWeights::even()).unwrap(), 0.0);
    }

    #[test]
    fn heatmap_counts_hits_per_cell() {
        let pages = vec![page(&[&[0, 1]]), page(&[&[0, 2]])];
        let rels = vec![rel(&[0]), rel(&[0, 2])];
        let grid = hit_heatmap(&pages, &rels).unwrap();
        assert_eq!(grid.count(1, 1), 2);
        assert_eq!(grid.count(1, 2), 1);
    }

    #[test]
    fn heatmap_shape_mismatch_rejected() {
        let pages = vec![page(&[&[0, 1]]), page(&[&[0, 1], &[2, 3]])];
        let rels = vec![rel(&[0]), rel(&[0])];
        assert!(hit_heatmap(&pages, &rels).is_err());
    }

    #[test]
    fn heatmap_zero_users_rejected() {
        assert!(hit_heatmap(&[], &[]).is_err());
    }

    #[test]
    fn discount_grid_csv_layout() {
        let grid = DiscountGrid::new(1, 2, DiscountWeights::even());
        let mut buf = Vec::new();
        grid.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "row,col,value");
        assert_eq!(lines[1], "1,1,1");
        let fields: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(&fields[..2], &["1", "2"]);
        // The float field round-trips to the exact stored discount.
        assert_eq!(fields[2].parse::<f64>().unwrap(), 3.0f64.log2());
    }

    fn arb_weights() -> impl Strategy<Value = DiscountWeights> {
        (0.0f64..4.0, 0.0f64..4.0)
            .prop_filter("not both zero", |(a, b)| *a > 0.0 || *b > 0.0)
            .prop_map(|(a, b)| DiscountWeights::new(a, b).unwrap())
    }

    fn arb_page(max_rows: usize, cols: usize, catalog: u32) -> impl Strategy<Value = Page> {
        proptest::collection::vec(
            proptest::sample::subsequence((0..catalog).collect::<Vec<u32>>(), cols)
                .prop_shuffle(),
            1..=max_rows,
        )
        .prop_map(|rows| {
            Page::new(rows.into_iter().map(|r| RecommendationList::new(r).unwrap()).collect())
                .unwrap()
        })
    }

    proptest! {
        // Discount never decreases moving right or down.
        #[test]
        fn discount_is_monotone(w in arb_weights(), r in 1usize..6, c in 1usize..6) {
            prop_assert!(discount2d(r, c, &w) <= discount2d(r + 1, c, &w));
            prop_assert!(discount2d(r, c, &w) <= discount2d(r, c + 1, &w));
        }

        // Both metrics stay in [0, 1].
        #[test]
        fn metrics_bounded(
            p in arb_page(3, 3, 8),
            relevant in proptest::collection::btree_set(0u32..8, 0..8),
            w in arb_weights(),
        ) {
            let r = RelevanceJudgments::new(relevant.into_iter().collect());
            let v = page_ndcg2d(&p, &r, &w).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&v));
            let n = ndcg_at_k(&p.carousels()[0], &r, 3);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&n));
        }

        // Appending a copy of an existing carousel adds exactly zero to
        // the DCG2D numerator.
        #[test]
        fn duplicated_carousel_adds_nothing(
            p in arb_page(3, 3, 8),
            relevant in proptest::collection::btree_set(0u32..8, 0..8),
            w in arb_weights(),
            dup_row in 0usize..3,
        ) {
            let r = RelevanceJudgments::new(relevant.into_iter().collect());
            let dup = p.carousels()[dup_row % p.n_rows()].clone();
            let mut rows = p.carousels().to_vec();
            rows.push(dup);
            let bigger = Page::new(rows).unwrap();
            let (num_before, _) = page_dcg2d_parts(&p, &r, &w).unwrap();
            let (num_after, _) = page_dcg2d_parts(&bigger, &r, &w).unwrap();
            prop_assert_eq!(num_before, num_after);
        }

        // Transposing the page while swapping the weights leaves both
        // the numerator and the ideal unchanged (tie-free weights).
        #[test]
        fn weight_symmetry_under_transpose(
            p in arb_page(3, 3, 9),
            relevant in proptest::collection::btree_set(0u32..9, 0..9),
        ) {
            let w = DiscountWeights::new(1.0, std::f64::consts::SQRT_2).unwrap();
            let wt = DiscountWeights::new(std::f64::consts::SQRT_2, 1.0).unwrap();
            let r = RelevanceJudgments::new(relevant.into_iter().collect());
            let cols: Vec<RecommendationList> = (0..p.n_cols())
                .map(|c| {
                    RecommendationList::new(
                        (0..p.n_rows()).map(|row| p.item_at(row + 1, c + 1)).collect(),
                    )
                })
                .collect::<Result<_>>()
                // A transposed page can repeat an item inside a column;
                // skip those draws.
                .unwrap_or_else(|_| Vec::new());
            prop_assume!(!cols.is_empty());
            let transposed = Page::new(cols).unwrap();
            let (num, den) = page_dcg2d_parts(&p, &r, &w).unwrap();
            let (num_t, den_t) = page_dcg2d_parts(&transposed, &r, &wt).unwrap();
            prop_assert!((num - num_t).abs() < 1e-12);
            prop_assert!((den - den_t).abs() < 1e-12);
        }

        // Single-carousel pages match ndcg_at_k for even weights.
        #[test]
        fn reduction_law(
            items in proptest::sample::subsequence((0u32..12).collect::<Vec<u32>>(), 5)
                .prop_shuffle(),
            relevant in proptest::collection::btree_set(0u32..12, 0..12),
        ) {
            let l = RecommendationList::new(items).unwrap();
            let r = RelevanceJudgments::new(relevant.into_iter().collect());
            let p = Page::new(vec![l.clone()]).unwrap();
            let got = page_ndcg2d(&p, &r, &DiscountWeights::even()).unwrap();
            let want = ndcg_at_k(&l, &r, 5);
            prop_assert!((got - want).abs() < 1e-12);
        }
    }
}
