//! fvecs / ivecs readers and writers.
//!
//! Each record is a little-endian `i32` dimension followed by that many
//! little-endian 4-byte values (`f32` for fvecs, `i32` for ivecs). All records
//! in one file share the same dimension.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::dataset::{Dataset, GroundTruth};
use crate::error::{Error, Result};

fn format_err(path: &Path, offset: usize, reason: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        offset: offset as u64,
        reason: reason.into(),
    }
}

/// Splits a vecs buffer into `(dim, payload)` records. Payload words are
/// returned raw so the caller picks the element type.
fn parse_records(path: &Path, bytes: &[u8]) -> Result<(usize, Vec<[u8; 4]>)> {
    let mut offset = 0usize;
    let mut dim: Option<usize> = None;
    let mut words = Vec::new();
    while offset < bytes.len() {
        let header = bytes
            .get(offset..offset + 4)
            .ok_or_else(|| format_err(path, offset, "truncated dimension header"))?;
        let d = i32::from_le_bytes(header.try_into().unwrap());
        if d <= 0 {
            return Err(format_err(
                path,
                offset,
                format!("non-positive dimension {d}"),
            ));
        }
        let d = d as usize;
        match dim {
            None => dim = Some(d),
            Some(prev) if prev != d => {
                return Err(format_err(
                    path,
                    offset,
                    format!("inconsistent dimension {d}, expected {prev}"),
                ))
            }
            Some(_) => {}
        }
        let start = offset + 4;
        let end = start + 4 * d;
        let payload = bytes.get(start..end).ok_or_else(|| {
            format_err(path, offset, format!("truncated record of dimension {d}"))
        })?;
        words.extend(
            payload
                .chunks_exact(4)
                .map(|c| <[u8; 4]>::try_from(c).unwrap()),
        );
        offset = end;
    }
    Ok((dim.unwrap_or(0), words))
}

/// Reads an fvecs file into rows of `f32`. An empty file yields no rows.
pub fn read_fvecs(path: impl AsRef<Path>) -> Result<Vec<Vec<f32>>> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    let (dim, words) = parse_records(path, &bytes)?;
    Ok(words
        .chunks(dim.max(1))
        .map(|c| c.iter().map(|w| f32::from_le_bytes(*w)).collect())
        .collect())
}

/// Reads an ivecs file into rows of `i32`.
pub fn read_ivecs(path: impl AsRef<Path>) -> Result<Vec<Vec<i32>>> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    let (dim, words) = parse_records(path, &bytes)?;
    Ok(words
        .chunks(dim.max(1))
        .map(|c| c.iter().map(|w| i32::from_le_bytes(*w)).collect())
        .collect())
}

/// Loads an fvecs file as a dataset. Empty files are rejected.
pub fn load_fvecs(path: impl AsRef<Path>) -> Result<Dataset> {
    let rows = read_fvecs(path)?;
    let Some(first) = rows.first() else {
        return Err(Error::EmptyDataset);
    };
    let dim = first.len();
    let data = rows.iter().flatten().map(|&v| f64::from(v)).collect();
    Dataset::new(dim, data)
}

pub fn load_ivecs(path: impl AsRef<Path>) -> Result<Vec<Vec<i32>>> {
    read_ivecs(path)
}

fn write_records<T: Copy>(
    path: &Path,
    rows: impl Iterator<Item = Vec<T>>,
    encode: impl Fn(T) -> [u8; 4],
) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for row in rows {
        let dim = i32::try_from(row.len()).map_err(|_| {
            Error::InvalidParameter(format!("row length {} exceeds i32", row.len()))
        })?;
        out.write_all(&dim.to_le_bytes())?;
        for v in row {
            out.write_all(&encode(v))?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Writes rows of `f32` as fvecs.
pub fn write_fvecs(path: impl AsRef<Path>, rows: &[Vec<f32>]) -> Result<()> {
    write_records(path.as_ref(), rows.iter().cloned(), f32::to_le_bytes)
}

/// Writes a dataset as fvecs. Coordinates are narrowed to `f32`; values that
/// originated from an fvecs file round-trip exactly.
pub fn save_fvecs(path: impl AsRef<Path>, dataset: &Dataset) -> Result<()> {
    write_records(
        path.as_ref(),
        dataset
            .rows()
            .map(|r| r.iter().map(|&v| v as f32).collect()),
        f32::to_le_bytes,
    )
}

pub fn write_ivecs(path: impl AsRef<Path>, rows: &[Vec<i32>]) -> Result<()> {
    write_records(path.as_ref(), rows.iter().cloned(), i32::to_le_bytes)
}

pub fn save_ground_truth(path: impl AsRef<Path>, truth: &GroundTruth) -> Result<()> {
    write_records(
        path.as_ref(),
        truth
            .lists()
            .iter()
            .map(|l| l.iter().map(|&i| i as i32).collect()),
        i32::to_le_bytes,
    )
}

/// Loads an ivecs ground-truth file, validating ids against `n`.
pub fn load_ground_truth(path: impl AsRef<Path>, n: usize) -> Result<GroundTruth> {
    let path = path.as_ref();
    let rows = read_ivecs(path)?;
    let mut lists = Vec::with_capacity(rows.len());
    for row in rows {
        let mut list = Vec::with_capacity(row.len());
        for id in row {
            if id < 0 || id as usize >= n {
                return Err(Error::InvalidNodeId {
                    id: id.max(0) as usize,
                    n,
                });
            }
            list.push(id as u32);
        }
        lists.push(list);
    }
    GroundTruth::from_lists(lists, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decodes_little_endian_record() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.fvecs");
        fs::write(&p, [2, 0, 0, 0, 0, 0, 0x80, 0x3F, 0, 0, 0, 0x40]).unwrap();
        assert_eq!(read_fvecs(&p).unwrap(), vec![vec![1.0f32, 2.0]]);
        let ds = load_fvecs(&p).unwrap();
        assert_eq!((ds.len(), ds.dim()), (1, 2));
        assert_eq!(ds.row(0), &[1.0, 2.0]);
    }

    #[test]
    fn empty_file_is_empty_then_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.fvecs");
        fs::write(&p, []).unwrap();
        assert!(read_fvecs(&p).unwrap().is_empty());
        assert!(matches!(load_fvecs(&p), Err(Error::EmptyDataset)));
    }

    #[test]
    fn malformed_files_name_offsets() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.fvecs");

        // second record truncated
        let mut bytes = vec![1, 0, 0, 0, 0, 0, 0x80, 0x3F];
        bytes.extend([1, 0, 0, 0, 0, 0]);
        fs::write(&p, &bytes).unwrap();
        match read_fvecs(&p) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 8),
            other => panic!("unexpected {other:?}"),
        }

        // inconsistent dimension
        let mut bytes = vec![1, 0, 0, 0, 0, 0, 0x80, 0x3F];
        bytes.extend([2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        fs::write(&p, &bytes).unwrap();
        assert!(matches!(
            read_fvecs(&p),
            Err(Error::Format { offset: 8, .. })
        ));

        // zero and negative dimension
        fs::write(&p, [0, 0, 0, 0]).unwrap();
        assert!(matches!(
            read_fvecs(&p),
            Err(Error::Format { offset: 0, .. })
        ));
        fs::write(&p, (-3i32).to_le_bytes()).unwrap();
        assert!(matches!(
            read_ivecs(&p),
            Err(Error::Format { offset: 0, .. })
        ));

        // partial header
        fs::write(&p, [1, 0]).unwrap();
        assert!(matches!(
            read_fvecs(&p),
            Err(Error::Format { offset: 0, .. })
        ));
    }

    #[test]
    fn ground_truth_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("gt.ivecs");
        let gt = GroundTruth::from_lists(vec![vec![3, 1, 2], vec![0, 2, 1]], 4).unwrap();
        save_ground_truth(&p, &gt).unwrap();
        assert_eq!(load_ground_truth(&p, 4).unwrap(), gt);
        assert!(matches!(
            load_ground_truth(&p, 3),
            Err(Error::InvalidNodeId { id: 3, n: 3 })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn fvecs_round_trip_is_bit_exact(
            dim in 1usize..9,
            bits in prop::collection::vec(any::<u32>(), 1..64),
        ) {
            let rows: Vec<Vec<f32>> = bits
                .chunks(dim)
                .filter(|c| c.len() == dim)
                .map(|c| c.iter().map(|&b| f32::from_bits(b)).collect())
                .collect();
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("r.fvecs");
            write_fvecs(&p, &rows).unwrap();
            let back = read_fvecs(&p).unwrap();
            prop_assert_eq!(rows.len(), back.len());
            for (a, b) in rows.iter().zip(&back) {
                let ab: Vec<u32> = a.iter().map(|v| v.to_bits()).collect();
                let bb: Vec<u32> = b.iter().map(|v| v.to_bits()).collect();
                prop_assert_eq!(ab, bb);
            }
        }

        #[test]
        fn ivecs_round_trip(rows in prop::collection::vec(prop::collection::vec(any::<i32>(), 3), 0..20)) {
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("r.ivecs");
            write_ivecs(&p, &rows).unwrap();
            prop_assert_eq!(read_ivecs(&p).unwrap(), rows);
        }
    }
}
