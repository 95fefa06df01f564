//! Versioned binary container for trained models.
//!
//! Layout: magic `CRSL`, format version, family tag, label,
//! hyperparameters, then the model arrays, all little-endian. Floats
//! travel as raw bits, so a round-trip is value-exact.

use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::models::{
    DenseSimilarityModel, EaseParams, FactorModel, FunkSvdParams, HyperParams,
    ItemKnnParams, ItemScoresModel, Model, NmfParams, Rp3BetaParams, SimilarityModel,
};
use crate::sparse::CsrMatrix;

const MAGIC: &[u8; 4] = b"CRSL";
const VERSION: u32 = 1;

/// A trained model bundled with its identity and hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub label: String,
    pub params: HyperParams,
    pub model: Model,
}

fn family_tag(params: &HyperParams) -> u8 {
    match params {
        HyperParams::TopPopular => 0,
        HyperParams::ItemKnn(_) => 1,
        HyperParams::Rp3Beta(_) => 2,
        HyperParams::Ease(_) => 3,
        HyperParams::FunkSvd(_) => 4,
        HyperParams::Nmf(_) => 5,
    }
}

pub fn save_model<W: Write>(trained: &TrainedModel, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_u32::<LittleEndian>(VERSION)?;
    w.write_u8(family_tag(&trained.params))?;
    write_string(&mut w, &trained.label)?;
    match &trained.params {
        HyperParams::TopPopular => {}
        HyperParams::ItemKnn(p) => {
            w.write_u64::<LittleEndian>(p.top_k as u64)?;
            w.write_f64::<LittleEndian>(p.shrink)?;
            w.write_f64::<LittleEndian>(p.icm_weight)?;
        }
        HyperParams::Rp3Beta(p) => {
            w.write_u64::<LittleEndian>(p.top_k as u64)?;
            w.write_f64::<LittleEndian>(p.alpha)?;
            w.write_f64::<LittleEndian>(p.beta)?;
        }
        HyperParams::Ease(p) => {
            w.write_f64::<LittleEndian>(p.l2)?;
            w.write_u64::<LittleEndian>(p.max_items as u64)?;
        }
        HyperParams::FunkSvd(p) => {
            w.write_u64::<LittleEndian>(p.factors as u64)?;
            w.write_f64::<LittleEndian>(p.learn_rate)?;
            w.write_f64::<LittleEndian>(p.reg)?;
            w.write_u64::<LittleEndian>(p.epochs as u64)?;
            w.write_u64::<LittleEndian>(p.seed)?;
        }
        HyperParams::Nmf(p) => {
            w.write_u64::<LittleEndian>(p.factors as u64)?;
            w.write_u64::<LittleEndian>(p.iterations as u64)?;
            w.write_u64::<LittleEndian>(p.seed)?;
        }
    }
    match &trained.model {
        Model::TopPopular(m) => write_f64s(&mut w, m.scores())?,
        Model::ItemKnn(m) | Model::Rp3Beta(m) => {
            w.write_u64::<LittleEndian>(m.top_k() as u64)?;
            write_csr(&mut w, m.similarities())?;
        }
        Model::Ease(m) => write_dense(&mut w, m.weights())?,
        Model::FunkSvd(m) | Model::Nmf(m) => {
            write_dense(&mut w, m.user_factors())?;
            write_dense(&mut w, m.item_factors())?;
        }
    }
    Ok(())
}

pub fn load_model<R: Read>(mut r: R) -> Result<TrainedModel> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::InvalidInput("not a model container (bad magic)".into()));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != VERSION {
        return Err(Error::InvalidInput(format!(
            "unsupported model container version {version} (expected {VERSION})"
        )));
    }
    let tag = r.read_u8()?;
    let label = read_string(&mut r)?;
    let (params, model) = match tag {
        0 => {
            let scores = read_f64s(&mut r)?;
            (HyperParams::TopPopular, Model::TopPopular(ItemScoresModel::new(scores)?))
        }
        1 | 2 => {
            let top_k = r.read_u64::<LittleEndian>()? as usize;
            let shrink_or_alpha = r.read_f64::<LittleEndian>()?;
            let weight_or_beta = r.read_f64::<LittleEndian>()?;
            let stored_top_k = r.read_u64::<LittleEndian>()? as usize;
            let sim = read_csr(&mut r)?;
            let model = SimilarityModel::new(sim, stored_top_k);
            if tag == 1 {
                (
                    HyperParams::ItemKnn(ItemKnnParams {
                        top_k,
                        shrink: shrink_or_alpha,
                        icm_weight: weight_or_beta,
                    }),
                    Model::ItemKnn(model),
                )
            } else {
                (
                    HyperParams::Rp3Beta(Rp3BetaParams {
                        top_k,
                        alpha: shrink_or_alpha,
                        beta: weight_or_beta,
                    }),
                    Model::Rp3Beta(model),
                )
            }
        }
        3 => {
            let l2 = r.read_f64::<LittleEndian>()?;
            let max_items = r.read_u64::<LittleEndian>()? as usize;
            let weights = read_dense(&mut r)?;
            (
                HyperParams::Ease(EaseParams { l2, max_items }),
                Model::Ease(DenseSimilarityModel::new(weights)),
            )
        }
        4 => {
            let factors = r.read_u64::<LittleEndian>()? as usize;
            let learn_rate = r.read_f64::<LittleEndian>()?;
            let reg = r.read_f64::<LittleEndian>()?;
            let epochs = r.read_u64::<LittleEndian>()? as usize;
            let seed = r.read_u64::<LittleEndian>()?;
            let user_factors = read_dense(&mut r)?;
            let item_factors = read_dense(&mut r)?;
            (
                HyperParams::FunkSvd(FunkSvdParams {
                    factors,
                    learn_rate,
                    reg,
                    epochs,
                    seed,
                }),
                Model::FunkSvd(FactorModel::new(user_factors, item_factors)),
            )
        }
        5 => {
            let factors = r.read_u64::<LittleEndian>()? as usize;
            let iterations = r.read_u64::<LittleEndian>()? as usize;
            let seed = r.read_u64::<LittleEndian>()?;
            let user_factors = read_dense(&mut r)?;
            let item_factors = read_dense(&mut r)?;
            (
                HyperParams::Nmf(NmfParams { factors, iterations, seed }),
                Model::Nmf(FactorModel::new(user_factors, item_factors)),
            )
        }
        other => {
            return Err(Error::InvalidInput(format!("unknown model family tag {other}")))
        }
    };
    Ok(TrainedModel { label, params, model })
}

fn write_string<W: Write>(w: &mut W, s: &str) -> Result<()> {
    let bytes = s.as_bytes();
    w.write_u16::<LittleEndian>(bytes.len() as u16)?;
    w.write_all(bytes)?;
    Ok(())
}

fn read_string<R: Read>(r: &mut R) -> Result<String> {
    let len = r.read_u16::<LittleEndian>()? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf)
        .map_err(|_| Error::InvalidInput("model label is not valid UTF-8".into()))
}

fn write_f64s<W: Write>(w: &mut W, values: &[f64]) -> Result<()> {
    w.write_u64::<LittleEndian>(values.len() as u64)?;
    for &v in values {
        w.write_f64::<LittleEndian>(v)?;
    }
    Ok(())
}

fn read_f64s<R: Read>(r: &mut R) -> Result<Vec<f64>> {
    let len = r.read_u64::<LittleEndian>()? as usize;
    let mut out = vec![0.0f64; len];
    r.read_f64_into::<LittleEndian>(&mut out)?;
    Ok(out)
}

fn write_dense<W: Write>(w: &mut W, m: &Array2<f64>) -> Result<()> {
    w.write_u64::<LittleEndian>(m.nrows() as u64)?;
    w.write_u64::<LittleEndian>(m.ncols() as u64)?;
    for &v in m.as_slice().expect("row-major array") {
        w.write_f64::<LittleEndian>(v)?;
    }
    Ok(())
}

fn read_dense<R: Read>(r: &mut R) -> Result<Array2<f64>> {
    let rows = r.read_u64::<LittleEndian>()? as usize;
    let cols = r.read_u64::<LittleEndian>()? as usize;
    let mut data = vec![0.0f64; rows * cols];
    r.read_f64_into::<LittleEndian>(&mut data)?;
    Array2::from_shape_vec((rows, cols), data)
        .map_err(|e| Error::InvalidInput(format!("dense block mismatch: {e}")))
}

fn write_csr<W: Write>(w: &mut W, m: &CsrMatrix) -> Result<()> {
    w.write_u64::<LittleEndian>(m.n_rows() as u64)?;
    w.write_u64::<LittleEndian>(m.n_cols() as u64)?;
    w.write_u64::<LittleEndian>(m.nnz() as u64)?;
    let (indptr, indices, values) = m.parts();
    for &p in indptr {
        w.write_u64::<LittleEndian>(p as u64)?;
    }
    for &i in indices {
        w.write_u32::<LittleEndian>(i)?;
    }
    for &v in values {
        w.write_f64::<LittleEndian>(v)?;
    }
    Ok(())
}

fn read_csr<R: Read>(r: &mut R) -> Result<CsrMatrix> {
    let n_rows = r.read_u64::<LittleEndian>()? as usize;
    let n_cols = r.read_u64::<LittleEndian>()? as usize;
    let nnz = r.read_u64::<LittleEndian>()? as usize;
    let mut indptr = vec![0usize; n_rows + 1];
    for slot in &mut indptr {
        *slot = r.read_u64::<LittleEndian>()? as usize;
    }
    let mut indices = vec![0u32; nnz];
    r.read_u32_into::<LittleEndian>(&mut indices)?;
    let mut values = vec![0.0f64; nnz];
    r.read_f64_into::<LittleEndian>(&mut values)?;
    CsrMatrix::from_parts(n_rows, n_cols, indptr, indices, values)
}
