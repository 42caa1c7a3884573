use std::io::Write;

use crate::{Error, Result};

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row. Explicitly stored
/// zeros are kept, so matrices assembled on the same mesh share one pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    column_indices: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

impl SparseMatrix {
    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut counts = vec![0usize; n_rows + 1];
        for &(i, j, _) in triplets {
            if i >= n_rows || j >= n_cols {
                return Err(Error::Dimension(format!(
                    "triplet ({i},{j}) outside {n_rows}x{n_cols}"
                )));
            }
            counts[i + 1] += 1;
        }
        for i in 0..n_rows {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![0.0; triplets.len()];
        for &(i, j, v) in triplets {
            cols[fill[i]] = j;
            vals[fill[i]] = v;
            fill[i] += 1;
        }

        let mut row_offsets = Vec::with_capacity(n_rows + 1);
        let mut column_indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_offsets.push(0);
        let mut row: Vec<(usize, f64)> = Vec::new();
        for i in 0..n_rows {
            row.clear();
            row.extend((counts[i]..counts[i + 1]).map(|k| (cols[k], vals[k])));
            row.sort_by_key(|&(j, _)| j);
            for &(j, v) in &row {
                if column_indices.len() > row_offsets[i] && *column_indices.last().unwrap() == j {
                    *values.last_mut().unwrap() += v;
                } else {
                    column_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets.push(column_indices.len());
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            column_indices,
            values,
            symmetric: false,
        })
    }

    /// Builds from raw CSR arrays, validating the structure.
    pub fn from_csr(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        column_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n_rows + 1
            || row_offsets[0] != 0
            || *row_offsets.last().unwrap() != column_indices.len()
            || column_indices.len() != values.len()
        {
            return Err(Error::Dimension("inconsistent CSR arrays".into()));
        }
        for i in 0..n_rows {
            let cols = &column_indices[row_offsets[i]..row_offsets[i + 1]];
            if row_offsets[i] > row_offsets[i + 1]
                || cols.windows(2).any(|w| w[0] >= w[1])
                || cols.iter().any(|&j| j >= n_cols)
            {
                return Err(Error::Dimension(format!("row {i} has invalid column indices")));
            }
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            column_indices,
            values,
            symmetric: false,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self {
            n_rows: n,
            n_cols: n,
            row_offsets: (0..=n).collect(),
            column_indices: (0..n).collect(),
            values: d.to_vec(),
            symmetric: true,
        }
    }

    /// Dense row-major input; zeros are dropped.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut t = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n_cols {
                return Err(Error::Dimension("ragged dense matrix".into()));
            }
            t.extend(r.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, &v)| (i, j, v)));
        }
        Self::from_triplets(rows.len(), n_cols, &t)
    }

    /// Same pattern, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.values.len());
        Self {
            values,
            symmetric: false,
            ..self.clone()
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn column_indices(&self) -> &[usize] {
        &self.column_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        self.symmetric = false;
        &mut self.values
    }

    /// Symmetry hint set by [`SparseMatrix::mark_symmetric`].
    pub fn is_marked_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Sets the symmetry hint after checking
    /// `|a_ij - a_ji| <= 1e-13 * max|a|` for every stored pair.
    pub fn mark_symmetric(&mut self) -> Result<()> {
        let tol = 1e-13 * self.max_abs();
        let err = self.symmetry_defect();
        if err > tol {
            return Err(Error::Consistency(format!("matrix not symmetric (defect {err:.3e})")));
        }
        self.symmetric = true;
        Ok(())
    }

    /// Largest `|a_ij - a_ji|` over stored entries (missing counterparts count
    /// as zero).
    pub fn symmetry_defect(&self) -> f64 {
        if self.n_rows != self.n_cols {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.n_rows {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        self.column_indices[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    /// Storage position of entry `(i, j)`, if present in the pattern.
    pub fn position(&self, i: usize, j: usize) -> Option<usize> {
        let lo = self.row_offsets[i];
        let hi = self.row_offsets[i + 1];
        self.column_indices[lo..hi].binary_search(&j).ok().map(|k| lo + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |k| self.values[k])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows)
            .map(|i| self.row(i).find(|&(j, _)| j == i).map_or(0.0, |(_, v)| v))
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.row(i).map(|(_, v)| v).sum()).collect()
    }

    pub fn same_pattern(&self, other: &SparseMatrix) -> bool {
        self.n_rows == other.n_rows
            && self.n_cols == other.n_cols
            && self.row_offsets == other.row_offsets
            && self.column_indices == other.column_indices
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n_cols);
        assert_eq!(y.len(), self.n_rows);
        for (yi, w) in y.iter_mut().zip(self.row_offsets.windows(2)) {
            let (cols, vals) = (&self.column_indices[w[0]..w[1]], &self.values[w[0]..w[1]]);
            *yi = cols.iter().zip(vals).map(|(&j, a)| a * x[j]).sum();
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `alpha * self + beta * other` on a shared pattern.
    pub fn linear_combination(&self, alpha: f64, other: &SparseMatrix, beta: f64) -> Result<Self> {
        if !self.same_pattern(other) {
            return Err(Error::Dimension("matrices do not share a sparsity pattern".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Ok(self.with_values(values))
    }

    /// Adds `d[i]` to every diagonal entry; the diagonal must be in the pattern.
    pub fn add_diagonal(&mut self, d: &[f64]) -> Result<()> {
        for (i, &di) in d.iter().enumerate() {
            let k = self
                .position(i, i)
                .ok_or_else(|| Error::Dimension(format!("diagonal ({i},{i}) not stored")))?;
            self.values[k] += di;
        }
        self.symmetric = false;
        Ok(())
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        out
    }

    /// Writes one `row col value` line per stored entry (0-based indices).
    pub fn write_triplets<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.n_rows {
            for (j, v) in self.row(i) {
                writeln!(w, "{i} {j} {v:.17e}")?;
            }
        }
        Ok(())
    }

    /// Parses the format produced by [`SparseMatrix::write_triplets`].
    pub fn read_triplets(text: &str, n_rows: usize, n_cols: usize) -> Result<Self> {
        let mut t = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let bad = || Error::Config(format!("malformed triplet on line {}", ln + 1));
            let i: usize = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let j: usize = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let v: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            t.push((i, j, v));
        }
        Self::from_triplets(n_rows, n_cols, &t)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}
