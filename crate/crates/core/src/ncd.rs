//! Normalized compression distance.
//!
//! `NCD(x, y) = (Z(xy) - min(Z(x), Z(y))) / max(Z(x), Z(y))` where `Z` is a
//! compressed length in bytes and `xy` is plain concatenation.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use crate::cost::DistanceMatrix;
use crate::{Error, Result};

/// Something that reports compressed sizes. Must be deterministic.
pub trait Compressor {
    /// Compressed size of `data` in bytes.
    fn compressed_len(&self, data: &[u8]) -> usize;

    fn name(&self) -> &str {
        "custom"
    }
}

impl<C: Compressor + ?Sized> Compressor for &C {
    fn compressed_len(&self, data: &[u8]) -> usize {
        (**self).compressed_len(data)
    }

    fn name(&self) -> &str {
        (**self).name()
    }
}

/// NCD from the three compressed lengths.
pub fn ncd_from_lengths(zx: usize, zy: usize, zxy: usize) -> f64 {
    let lo = zx.min(zy) as f64;
    let hi = zx.max(zy) as f64;
    (zxy as f64 - lo) / hi
}

pub fn concat(x: &[u8], y: &[u8]) -> Vec<u8> {
    let mut xy = Vec::with_capacity(x.len() + y.len());
    xy.extend_from_slice(x);
    xy.extend_from_slice(y);
    xy
}

pub fn ncd<Z: Compressor + ?Sized>(x: &[u8], y: &[u8], z: &Z) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidInput("NCD needs nonempty inputs".into()));
    }
    let (zx, zy) = (z.compressed_len(x), z.compressed_len(y));
    Ok(ncd_from_lengths(zx, zy, z.compressed_len(&concat(x, y))))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusItem {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl CorpusItem {
    pub fn new(name: impl Into<String>, bytes: Vec<u8>) -> Result<CorpusItem> {
        let name = name.into();
        if bytes.is_empty() {
            return Err(Error::InvalidInput(alloc::format!("corpus item {name:?} is empty")));
        }
        Ok(CorpusItem { name, bytes })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NcdMatrix {
    pub names: Vec<String>,
    pub matrix: DistanceMatrix,
    /// One line per negative entry clamped to zero.
    pub warnings: Vec<String>,
}

/// Checks a corpus before any compression work.
pub fn check_corpus(items: &[CorpusItem]) -> Result<()> {
    if items.len() < 4 {
        return Err(Error::InvalidSize(items.len()));
    }
    let mut seen = BTreeSet::new();
    for item in items {
        if item.bytes.is_empty() {
            return Err(Error::InvalidInput(alloc::format!("corpus item {:?} is empty", item.name)));
        }
        if !seen.insert(item.name.as_str()) {
            return Err(Error::InvalidCorpus(alloc::format!("duplicate name {:?}", item.name)));
        }
    }
    Ok(())
}

/// Builds the matrix from precomputed lengths: `singles[i] = Z(x_i)` and
/// `pair(i, j) = (Z(x_i x_j), Z(x_j x_i))` for `i < j`. Entries take the
/// smaller of the two orders; the diagonal is zero.
pub fn assemble(
    items: &[CorpusItem],
    singles: &[usize],
    mut pair: impl FnMut(usize, usize) -> (usize, usize),
) -> Result<NcdMatrix> {
    check_corpus(items)?;
    let n = items.len();
    let mut warnings = Vec::new();
    let matrix = DistanceMatrix::from_fn(n, |i, j| {
        let (ij, ji) = pair(i, j);
        let a = ncd_from_lengths(singles[i], singles[j], ij);
        let b = ncd_from_lengths(singles[j], singles[i], ji);
        let v = a.min(b);
        if v < 0.0 {
            warnings.push(alloc::format!(
                "NCD({}, {}) = {v} is negative; clamped to 0",
                items[i].name,
                items[j].name
            ));
            0.0
        } else {
            v
        }
    })?;
    Ok(NcdMatrix { names: items.iter().map(|it| it.name.clone()).collect(), matrix, warnings })
}

/// Symmetric NCD matrix of a corpus of at least four uniquely named items.
pub fn ncd_matrix<Z: Compressor + ?Sized>(items: &[CorpusItem], z: &Z) -> Result<NcdMatrix> {
    check_corpus(items)?;
    let singles: Vec<usize> = items.iter().map(|it| z.compressed_len(&it.bytes)).collect();
    assemble(items, &singles, |i, j| {
        let (x, y) = (&items[i].bytes, &items[j].bytes);
        (z.compressed_len(&concat(x, y)), z.compressed_len(&concat(y, x)))
    })
}
