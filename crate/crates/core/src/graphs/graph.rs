use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"NAVG";
const VERSION: u32 = 1;

/// Directed graph over node ids `0..n` in offset + flat neighbor-list form.
///
/// # Invariants
///
/// * `offsets.len() == n + 1`, `offsets[0] == 0`, non-decreasing.
/// * every neighbor id is `< n`, no self-loops, no repeats within one list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchGraph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl SearchGraph {
    /// Builds a graph from per-node out-neighbor lists, validating invariants.
    pub fn from_adjacency<L: AsRef<[u32]>>(lists: &[L]) -> Result<Self> {
        let n = lists.len();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let total = lists.iter().map(|l| l.as_ref().len()).sum();
        let mut neighbors = Vec::with_capacity(total);
        let mut seen = vec![usize::MAX; n];
        for (u, list) in lists.iter().enumerate() {
            for &v in list.as_ref() {
                let vi = v as usize;
                if vi >= n {
                    return Err(Error::InvalidGraph(format!(
                        "node {u}: neighbor {v} out of range"
                    )));
                }
                if vi == u {
                    return Err(Error::InvalidGraph(format!("node {u}: self-loop")));
                }
                if seen[vi] == u {
                    return Err(Error::InvalidGraph(format!(
                        "node {u}: duplicate neighbor {v}"
                    )));
                }
                seen[vi] = u;
                neighbors.push(v);
            }
            offsets.push(neighbors.len());
        }
        Ok(Self { offsets, neighbors })
    }

    /// Complete directed graph on `n` nodes.
    pub fn complete(n: usize) -> Self {
        let lists: Vec<Vec<u32>> = (0..n)
            .map(|u| (0..n as u32).filter(|&v| v as usize != u).collect())
            .collect();
        Self::from_adjacency(&lists).expect("complete graph is valid")
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> &[u32] {
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn num_edges(&self) -> usize {
        self.neighbors.len()
    }

    pub fn average_degree(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.num_edges() as f64 / self.len() as f64
        }
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn flat_neighbors(&self) -> &[u32] {
        &self.neighbors
    }

    pub fn has_edge(&self, u: usize, v: u32) -> bool {
        self.neighbors(u).contains(&v)
    }

    /// Sorted `(from, to)` edge list.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = (0..self.len())
            .flat_map(|u| self.neighbors(u).iter().map(move |&v| (u as u32, v)))
            .collect();
        out.sort_unstable();
        out
    }

    /// True when every edge of `self` is also an edge of `other`.
    pub fn is_subgraph_of(&self, other: &SearchGraph) -> bool {
        self.len() == other.len()
            && (0..self.len()).all(|u| self.neighbors(u).iter().all(|&v| other.has_edge(u, v)))
    }

    /// Serializes to the `NAVG` binary format.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + 4 * (self.len() + self.num_edges()));
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.len() as u32).to_le_bytes());
        for u in 0..self.len() {
            out.extend_from_slice(&(self.degree(u) as u32).to_le_bytes());
            for &v in self.neighbors(u) {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    /// Parses the `NAVG` binary format. `path` is only used in error messages.
    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let err = |offset: usize, reason: String| Error::Format {
            path: path.to_path_buf(),
            offset: offset as u64,
            reason,
        };
        let word = |offset: usize| -> Result<u32> {
            bytes
                .get(offset..offset + 4)
                .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
                .ok_or_else(|| err(offset, "unexpected end of file".into()))
        };
        if bytes.get(..4) != Some(MAGIC.as_slice()) {
            return Err(err(0, "bad magic, expected NAVG".into()));
        }
        let version = word(4)?;
        if version != VERSION {
            return Err(err(4, format!("unsupported version {version}")));
        }
        let n = word(8)? as usize;
        let mut offset = 12;
        let mut lists = Vec::with_capacity(n);
        for u in 0..n {
            let deg = word(offset)? as usize;
            let start = offset + 4;
            let remaining = bytes.len().saturating_sub(start);
            if deg > remaining / 4 {
                return Err(err(
                    offset,
                    format!("node {u}: degree {deg} overflows remaining {remaining} bytes"),
                ));
            }
            let list: Vec<u32> = bytes[start..start + 4 * deg]
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
                .collect();
            lists.push(list);
            offset = start + 4 * deg;
        }
        if offset != bytes.len() {
            return Err(err(offset, "trailing bytes after last node".into()));
        }
        Self::from_adjacency(&lists)
    }
}

pub fn save_graph(graph: &SearchGraph, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    out.write_all(&graph.to_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<SearchGraph> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    SearchGraph::from_bytes(&bytes, path)
}
