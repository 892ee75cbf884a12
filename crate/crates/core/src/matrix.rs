//! Sparse binary parity-check matrices.
//!
//! Storage is compressed in both directions: rows hold sorted column indices
//! and columns hold sorted row indices. Every edge also carries its edge type.
//! Edges are numbered in row-major order; `col_edges` maps each column entry
//! back to that numbering so message-passing code can walk either side.
//!
//! On disk a matrix is an alist file plus a binary sidecar (`<path>.meta`)
//! holding the construction seed, a SHA-256 of the degree distribution text
//! and the per-edge types.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::{Error, Result};

const SIDECAR_MAGIC: &[u8; 4] = b"MTPC";
const SIDECAR_VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    n: usize,
    m: usize,
    row_ptr: Vec<usize>,
    row_cols: Vec<u32>,
    edge_type: Vec<u8>,
    col_ptr: Vec<usize>,
    col_rows: Vec<u32>,
    col_edges: Vec<u32>,
    seed: u64,
    dist_hash: [u8; 32],
}

impl ParityCheckMatrix {
    /// Builds a matrix from per-row `(column, edge type)` lists.
    ///
    /// Rows are sorted; duplicate columns within a row are rejected.
    pub fn from_rows(n: usize, rows: Vec<Vec<(u32, u8)>>) -> Result<Self> {
        let m = rows.len();
        let mut row_ptr = Vec::with_capacity(m + 1);
        let mut row_cols = Vec::new();
        let mut edge_type = Vec::new();
        row_ptr.push(0);
        for (r, mut row) in rows.into_iter().enumerate() {
            row.sort_unstable();
            for w in row.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::InvalidMatrix(format!(
                        "duplicate edge at row {r}, column {}",
                        w[0].0
                    )));
                }
            }
            for (c, t) in row {
                if c as usize >= n {
                    return Err(Error::InvalidMatrix(format!(
                        "column {c} out of range in row {r}"
                    )));
                }
                row_cols.push(c);
                edge_type.push(t);
            }
            row_ptr.push(row_cols.len());
        }
        Ok(Self::with_csr(n, m, row_ptr, row_cols, edge_type))
    }

    /// Dense 0/1 rows, edge type 0 everywhere. Mainly for tests.
    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        let sparse = rows
            .iter()
            .map(|row| {
                if row.len() != n {
                    return Err(Error::mismatch(n, row.len()));
                }
                Ok(row
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b != 0)
                    .map(|(c, _)| (c as u32, 0u8))
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(n, sparse)
    }

    fn with_csr(
        n: usize,
        m: usize,
        row_ptr: Vec<usize>,
        row_cols: Vec<u32>,
        edge_type: Vec<u8>,
    ) -> Self {
        let mut col_count = vec![0usize; n + 1];
        for &c in &row_cols {
            col_count[c as usize + 1] += 1;
        }
        for i in 0..n {
            col_count[i + 1] += col_count[i];
        }
        let col_ptr = col_count;
        let mut fill = col_ptr.clone();
        let mut col_rows = vec![0u32; row_cols.len()];
        let mut col_edges = vec![0u32; row_cols.len()];
        for r in 0..m {
            for e in row_ptr[r]..row_ptr[r + 1] {
                let c = row_cols[e] as usize;
                col_rows[fill[c]] = r as u32;
                col_edges[fill[c]] = e as u32;
                fill[c] += 1;
            }
        }
        ParityCheckMatrix {
            n,
            m,
            row_ptr,
            row_cols,
            edge_type,
            col_ptr,
            col_rows,
            col_edges,
            seed: 0,
            dist_hash: [0; 32],
        }
    }

    pub(crate) fn with_provenance(mut self, seed: u64, dist_hash: [u8; 32]) -> Self {
        self.seed = seed;
        self.dist_hash = dist_hash;
        self
    }

    /// Number of columns (code length).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of rows (syndrome length).
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn num_edges(&self) -> usize {
        self.row_cols.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dist_hash(&self) -> &[u8; 32] {
        &self.dist_hash
    }

    /// Design rate (n − m)/n.
    pub fn rate(&self) -> f64 {
        (self.n - self.m) as f64 / self.n as f64
    }

    /// Sorted column indices of row `r`.
    pub fn row(&self, r: usize) -> &[u32] {
        &self.row_cols[self.row_ptr[r]..self.row_ptr[r + 1]]
    }

    /// Edge types of row `r`, aligned with [`ParityCheckMatrix::row`].
    pub fn row_edge_types(&self, r: usize) -> &[u8] {
        &self.edge_type[self.row_ptr[r]..self.row_ptr[r + 1]]
    }

    /// Sorted row indices of column `c`.
    pub fn col(&self, c: usize) -> &[u32] {
        &self.col_rows[self.col_ptr[c]..self.col_ptr[c + 1]]
    }

    /// Row-major edge ids of column `c`, aligned with [`ParityCheckMatrix::col`].
    pub fn col_edges(&self, c: usize) -> &[u32] {
        &self.col_edges[self.col_ptr[c]..self.col_ptr[c + 1]]
    }

    pub fn row_range(&self, r: usize) -> std::ops::Range<usize> {
        self.row_ptr[r]..self.row_ptr[r + 1]
    }

    pub fn row_cols_flat(&self) -> &[u32] {
        &self.row_cols
    }

    pub fn edge_types(&self) -> &[u8] {
        &self.edge_type
    }

    pub fn row_degree(&self, r: usize) -> usize {
        self.row_ptr[r + 1] - self.row_ptr[r]
    }

    pub fn col_degree(&self, c: usize) -> usize {
        self.col_ptr[c + 1] - self.col_ptr[c]
    }

    /// GF(2) product H·bits.
    pub fn syndrome(&self, bits: &[u8]) -> Result<Vec<u8>> {
        if bits.len() != self.n {
            return Err(Error::mismatch(self.n, bits.len()));
        }
        Ok((0..self.m)
            .map(|r| self.row(r).iter().fold(0u8, |acc, &c| acc ^ (bits[c as usize] & 1)))
            .collect())
    }

    /// Number of rows where H·bits differs from `target`.
    pub fn syndrome_mismatch(&self, bits: &[u8], target: &[u8]) -> usize {
        (0..self.m)
            .filter(|&r| {
                self.row(r).iter().fold(0u8, |acc, &c| acc ^ bits[c as usize]) != target[r]
            })
            .count()
    }

    /// Checks the structural invariants: sorted rows without duplicates,
    /// in-range indices and transpose consistency.
    pub fn validate(&self) -> Result<()> {
        if self.row_ptr.len() != self.m + 1 || self.col_ptr.len() != self.n + 1 {
            return Err(Error::InvalidMatrix("pointer arrays have wrong length".into()));
        }
        if self.edge_type.len() != self.row_cols.len() {
            return Err(Error::InvalidMatrix("edge type count differs from edge count".into()));
        }
        for r in 0..self.m {
            let row = self.row(r);
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidMatrix(format!("row {r} unsorted or duplicated")));
            }
            if row.iter().any(|&c| c as usize >= self.n) {
                return Err(Error::InvalidMatrix(format!("row {r} has out-of-range column")));
            }
        }
        let rebuilt = Self::with_csr(
            self.n,
            self.m,
            self.row_ptr.clone(),
            self.row_cols.clone(),
            self.edge_type.clone(),
        );
        if rebuilt.col_ptr != self.col_ptr || rebuilt.col_rows != self.col_rows {
            return Err(Error::InvalidMatrix("row and column views disagree".into()));
        }
        Ok(())
    }

    /// Writes the matrix in alist format.
    pub fn write_alist<W: Write>(&self, out: W) -> Result<()> {
        let mut w = BufWriter::new(out);
        let max_col = (0..self.n).map(|c| self.col_degree(c)).max().unwrap_or(0);
        let max_row = (0..self.m).map(|r| self.row_degree(r)).max().unwrap_or(0);
        writeln!(w, "{} {}", self.n, self.m)?;
        writeln!(w, "{max_col} {max_row}")?;
        write_joined(&mut w, (0..self.n).map(|c| self.col_degree(c)))?;
        write_joined(&mut w, (0..self.m).map(|r| self.row_degree(r)))?;
        for c in 0..self.n {
            let col = self.col(c);
            let padded = col
                .iter()
                .map(|&r| r as usize + 1)
                .chain(std::iter::repeat(0).take(max_col - col.len()));
            write_joined(&mut w, padded)?;
        }
        for r in 0..self.m {
            let row = self.row(r);
            let padded = row
                .iter()
                .map(|&c| c as usize + 1)
                .chain(std::iter::repeat(0).take(max_row - row.len()));
            write_joined(&mut w, padded)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads an alist file. Edge types are all 0 and provenance is empty;
    /// [`ParityCheckMatrix::load`] restores both from the sidecar.
    pub fn read_alist<R: Read>(input: R) -> Result<Self> {
        let mut numbers = Vec::new();
        for line in BufReader::new(input).lines() {
            for tok in line?.split_whitespace() {
                numbers.push(
                    tok.parse::<usize>()
                        .map_err(|e| Error::Parse(format!("alist token `{tok}`: {e}")))?,
                );
            }
        }
        let mut it = numbers.into_iter();
        let mut next = |what: &str| {
            it.next()
                .ok_or_else(|| Error::Parse(format!("alist truncated while reading {what}")))
        };
        let n = next("n")?;
        let m = next("m")?;
        let max_col = next("max column degree")?;
        let max_row = next("max row degree")?;
        let col_deg = (0..n).map(|_| next("column degrees")).collect::<Result<Vec<_>>>()?;
        let row_deg = (0..m).map(|_| next("row degrees")).collect::<Result<Vec<_>>>()?;
        let mut cols = Vec::with_capacity(n);
        for c in 0..n {
            let mut entries = Vec::with_capacity(col_deg[c]);
            for k in 0..max_col {
                let v = next("column lists")?;
                if k < col_deg[c] {
                    if v == 0 || v > m {
                        return Err(Error::Parse(format!("column {c}: row index {v} out of range")));
                    }
                    entries.push(v - 1);
                } else if v != 0 {
                    return Err(Error::Parse(format!("column {c}: expected 0 padding")));
                }
            }
            cols.push(entries);
        }
        let mut rows: Vec<Vec<(u32, u8)>> = Vec::with_capacity(m);
        for r in 0..m {
            let mut entries = Vec::with_capacity(row_deg[r]);
            for k in 0..max_row {
                let v = next("row lists")?;
                if k < row_deg[r] {
                    if v == 0 || v > n {
                        return Err(Error::Parse(format!("row {r}: column index {v} out of range")));
                    }
                    entries.push(((v - 1) as u32, 0u8));
                } else if v != 0 {
                    return Err(Error::Parse(format!("row {r}: expected 0 padding")));
                }
            }
            rows.push(entries);
        }
        let h = Self::from_rows(n, rows)?;
        for (c, entries) in cols.iter_mut().enumerate() {
            entries.sort_unstable();
            if h.col(c).iter().map(|&r| r as usize).ne(entries.iter().copied()) {
                return Err(Error::InvalidMatrix(format!(
                    "column {c} list disagrees with row lists"
                )));
            }
        }
        Ok(h)
    }

    fn write_sidecar<W: Write>(&self, out: W) -> Result<()> {
        let mut w = BufWriter::new(out);
        w.write_all(SIDECAR_MAGIC)?;
        w.write_all(&SIDECAR_VERSION.to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&self.dist_hash)?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&(self.m as u64).to_le_bytes())?;
        w.write_all(&(self.num_edges() as u64).to_le_bytes())?;
        w.write_all(&self.edge_type)?;
        w.flush()?;
        Ok(())
    }

    fn apply_sidecar(mut self, bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidMatrix(format!("sidecar: {msg}"));
        let header = 4 + 2 + 8 + 32 + 8 * 3;
        if bytes.len() < header || &bytes[..4] != SIDECAR_MAGIC {
            return Err(bad("bad magic or truncated header"));
        }
        let u64_at = |off: usize| u64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != SIDECAR_VERSION {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let seed = u64_at(6);
        let mut hash = [0u8; 32];
        hash.copy_from_slice(&bytes[14..46]);
        let (n, m, edges) = (u64_at(46), u64_at(54), u64_at(62));
        if n as usize != self.n || m as usize != self.m || edges as usize != self.num_edges() {
            return Err(bad("dimensions do not match the alist file"));
        }
        if bytes.len() != header + self.num_edges() {
            return Err(bad("edge type table has wrong length"));
        }
        self.edge_type.copy_from_slice(&bytes[header..]);
        self.seed = seed;
        self.dist_hash = hash;
        Ok(self)
    }

    pub fn sidecar_path(path: &Path) -> PathBuf {
        let mut os = path.as_os_str().to_owned();
        os.push(".meta");
        PathBuf::from(os)
    }

    /// Writes `path` (alist) and `path.meta` (sidecar).
    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_alist(fs::File::create(path)?)?;
        self.write_sidecar(fs::File::create(Self::sidecar_path(path))?)?;
        Ok(())
    }

    /// Loads an alist file and, when present, its sidecar; validates the
    /// structural invariants.
    pub fn load(path: &Path) -> Result<Self> {
        let mut h = Self::read_alist(fs::File::open(path)?)?;
        let sidecar = Self::sidecar_path(path);
        if sidecar.exists() {
            h = h.apply_sidecar(&fs::read(sidecar)?)?;
        }
        h.validate()?;
        Ok(h)
    }
}

fn write_joined<W: Write>(w: &mut W, values: impl Iterator<Item = usize>) -> std::io::Result<()> {
    let mut first = true;
    for v in values {
        if !first {
            w.write_all(b" ")?;
        }
        write!(w, "{v}")?;
        first = false;
    }
    w.write_all(b"\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ParityCheckMatrix {
        ParityCheckMatrix::from_dense(&[
            vec![1, 1, 0, 1, 0, 0],
            vec![0, 1, 1, 0, 1, 0],
            vec![1, 0, 0, 0, 1, 1],
        ])
        .unwrap()
    }

    #[test]
    fn transpose_views_agree() {
        let h = small();
        h.validate().unwrap();
        assert_eq!(h.col(1), &[0, 1]);
        assert_eq!(h.col(5), &[2]);
        for c in 0..h.n() {
            for (&r, &e) in h.col(c).iter().zip(h.col_edges(c)) {
                assert_eq!(h.row_cols_flat()[e as usize], c as u32);
                assert!(h.row_range(r as usize).contains(&(e as usize)));
            }
        }
    }

    #[test]
    fn syndrome_basics() {
        let h = small();
        assert_eq!(h.syndrome(&[0; 6]).unwrap(), vec![0, 0, 0]);
        let mut e = vec![0u8; 6];
        e[1] = 1;
        assert_eq!(h.syndrome(&e).unwrap(), vec![1, 1, 0]);
        assert!(matches!(
            h.syndrome(&[0; 5]),
            Err(Error::LengthMismatch { expected: 6, actual: 5 })
        ));
    }

    #[test]
    fn duplicate_edges_rejected() {
        let rows = vec![vec![(0, 0), (0, 0)]];
        assert!(ParityCheckMatrix::from_rows(2, rows).is_err());
    }

    #[test]
    fn alist_round_trip_with_sidecar() {
        let rows = vec![vec![(0, 1), (2, 0)], vec![(1, 2), (2, 1)]];
        let h = ParityCheckMatrix::from_rows(3, rows)
            .unwrap()
            .with_provenance(42, [7; 32]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.alist");
        h.save(&path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "3 2\n2 2\n1 1 2\n2 2\n1 0\n2 0\n1 2\n1 3\n2 3\n");
        let back = ParityCheckMatrix::load(&path).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn alist_without_sidecar() {
        let h = small();
        let mut buf = Vec::new();
        h.write_alist(&mut buf).unwrap();
        let back = ParityCheckMatrix::read_alist(&buf[..]).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn inconsistent_alist_rejected() {
        // Column list claims (row 1, col 1) but the row list does not.
        let text = "2 1\n1 2\n1 1\n2\n1\n1\n1 2\n";
        assert!(ParityCheckMatrix::read_alist(text.as_bytes()).is_ok());
        let text = "2 2\n1 2\n1 1\n2 0\n1\n2\n1 2\n0 0\n";
        assert!(ParityCheckMatrix::read_alist(text.as_bytes()).is_err());
    }

    #[test]
    fn corrupt_sidecar_rejected() {
        let h = small();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.alist");
        h.save(&path).unwrap();
        let side = ParityCheckMatrix::sidecar_path(&path);
        let mut bytes = fs::read(&side).unwrap();
        bytes.pop();
        fs::write(&side, bytes).unwrap();
        assert!(ParityCheckMatrix::load(&path).is_err());
    }
}
