//! Parsers for the MovieLens file formats.
//!
//! Ratings come either in the `UserID::MovieID::Rating::Timestamp` form
//! of the 10M release or as the tab-separated `u.data` of the 100k
//! release. Item features come from `movies.dat` (genres and the release
//! year in the title suffix) and optionally `tags.dat`.

use std::collections::BTreeSet;
use std::io::BufRead;
use std::sync::Arc;

use crate::data::{
    IdMaps, Interaction, InteractionSet, ItemContentMatrix, RATING_MAX, RATING_MIN,
};
use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Rating-file layouts accepted by [`parse_interactions`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    /// `UserID::MovieID::Rating::Timestamp`
    DoubleColon,
    /// `user<TAB>item<TAB>rating<TAB>timestamp`
    TabSeparated,
}

fn split_row(line: &str, format: SourceFormat) -> Vec<&str> {
    match format {
        SourceFormat::DoubleColon => line.split("::").collect(),
        SourceFormat::TabSeparated => line.split('\t').collect(),
    }
}

fn parse_field<T: std::str::FromStr>(field: &str, line: usize, what: &str) -> Result<T> {
    field.trim().parse().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse {what} from '{field}'"),
    })
}

/// Read an interaction file, validating every row and deduplicating
/// repeated (user, item) pairs in favor of the latest timestamp.
pub fn parse_interactions<R: BufRead>(
    source: R,
    format: SourceFormat,
) -> Result<InteractionSet> {
    let mut records = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_row(&line, format);
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let user: u32 = parse_field(fields[0], line_no, "user id")?;
        let item: u32 = parse_field(fields[1], line_no, "item id")?;
        let rating: f64 = parse_field(fields[2], line_no, "rating")?;
        let timestamp: i64 = parse_field(fields[3], line_no, "timestamp")?;
        if !(RATING_MIN..=RATING_MAX).contains(&rating) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("rating {rating} outside [{RATING_MIN}, {RATING_MAX}]"),
            });
        }
        records.push(Interaction { user, item, rating, timestamp });
    }
    if records.is_empty() {
        return Err(Error::NoInteractions);
    }
    Ok(InteractionSet::from_records(records))
}

/// Counters reported alongside a parsed item-content matrix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FeatureStats {
    /// Rows referring to items outside the URM id map (skipped).
    pub skipped_unknown_items: usize,
    /// Items whose title carried no parseable `(YYYY)` suffix.
    pub items_without_year: usize,
}

/// Release year from a title suffix like "Toy Story (1995)".
fn year_from_title(title: &str) -> Option<u32> {
    let t = title.trim();
    let t = t.strip_suffix(')')?;
    let open = t.rfind('(')?;
    let year = &t[open + 1..];
    if year.len() == 4 && year.bytes().all(|b| b.is_ascii_digit()) {
        year.parse().ok()
    } else {
        None
    }
}

/// Build the binary item-feature matrix from a `movies.dat`-style file
/// and an optional `tags.dat`-style file.
///
/// One feature column exists per distinct genre, per distinct
/// lower-cased tag, and per release-year value; an entry is 1 when the
/// item has the feature. Items missing from `ids` are counted and
/// skipped; items of the URM that the files never mention get an
/// all-zero row.
pub fn parse_item_features<M: BufRead, T: BufRead>(
    movies: M,
    tags: Option<T>,
    ids: &Arc<IdMaps>,
) -> Result<(ItemContentMatrix, FeatureStats)> {
    let mut stats = FeatureStats::default();
    // (item index, feature name) pairs; BTreeSet both deduplicates
    // repeated tags and fixes a canonical feature order.
    let mut pairs: BTreeSet<(usize, String)> = BTreeSet::new();

    for (idx, line) in movies.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split("::").collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected 3 fields in movies file, found {}", fields.len()),
            });
        }
        let external: u32 = parse_field(fields[0], line_no, "item id")?;
        let Some(item) = ids.items.index_of(external) else {
            stats.skipped_unknown_items += 1;
            continue;
        };
        for genre in fields[2].split('|') {
            let genre = genre.trim();
            if !genre.is_empty() {
                pairs.insert((item, format!("genre:{genre}")));
            }
        }
        match year_from_title(fields[1]) {
            Some(year) => {
                pairs.insert((item, format!("year:{year}")));
            }
            None => stats.items_without_year += 1,
        }
    }

    if let Some(tags) = tags {
        for (idx, line) in tags.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split("::").collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected 4 fields in tags file, found {}", fields.len()),
                });
            }
            let external: u32 = parse_field(fields[1], line_no, "item id")?;
            let Some(item) = ids.items.index_of(external) else {
                stats.skipped_unknown_items += 1;
                continue;
            };
            let tag = fields[2].trim().to_lowercase();
            if !tag.is_empty() {
                pairs.insert((item, format!("tag:{tag}")));
            }
        }
    }

    let mut names: Vec<String> = pairs.iter().map(|(_, name)| name.clone()).collect();
    names.sort_unstable();
    names.dedup();
    let feature_index = |name: &str| names.binary_search_by(|n| n.as_str().cmp(name));

    let triplets: Vec<(u32, u32, f64)> = pairs
        .iter()
        .map(|(item, name)| {
            let f = feature_index(name).expect("feature was just collected");
            (*item as u32, f as u32, 1.0)
        })
        .collect();
    let csr = CsrMatrix::from_triplets(ids.items.len(), names.len(), triplets)?;
    Ok((ItemContentMatrix::new(csr, Arc::clone(ids), names), stats))
}
