//! Sparse exact linear algebra over a [`FieldSpec`]: incremental row echelon forms and ranks.

use crate::field::{FieldSpec, FieldValue};

/// Sparse row: `(column, nonzero value)` pairs sorted by column.
pub type SparseVec = Vec<(u32, FieldValue)>;

/// `a - c * b` for sorted sparse rows.
pub fn sub_scaled(field: &FieldSpec, a: &[(u32, FieldValue)], c: &FieldValue, b: &[(u32, FieldValue)]) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, field.neg(&field.mul(c, &b[j].1))));
            j += 1;
        } else {
            let v = field.sub(&a[i].1, &field.mul(c, &b[j].1));
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Row echelon form built incrementally. Each stored row has a 1 in its pivot column and no
/// entries left of it.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: FieldSpec,
    rows: Vec<SparseVec>,
    pivot_row: Vec<Option<u32>>,
}

impl Echelon {
    pub fn new(field: FieldSpec, ncols: usize) -> Self {
        Echelon { field, rows: Vec::new(), pivot_row: vec![None; ncols] }
    }

    pub fn ncols(&self) -> usize {
        self.pivot_row.len()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row[col].is_some()
    }

    /// Eliminates every pivot column from `v`.
    pub fn reduce(&self, mut v: SparseVec) -> SparseVec {
        let mut i = 0;
        while i < v.len() {
            let col = v[i].0 as usize;
            match self.pivot_row[col] {
                Some(r) => {
                    let c = v[i].1.clone();
                    v = sub_scaled(&self.field, &v, &c, &self.rows[r as usize]);
                }
                None => i += 1,
            }
        }
        v
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let v = self.reduce(v);
        let Some((col, lead)) = v.first().cloned() else {
            return false;
        };
        let inv = self.field.inverse(&lead).expect("nonzero pivot");
        let row: SparseVec = v.into_iter().map(|(c, x)| (c, self.field.mul(&x, &inv))).collect();
        self.pivot_row[col as usize] = Some(self.rows.len() as u32);
        self.rows.push(row);
        true
    }

    pub fn contains(&self, v: SparseVec) -> bool {
        self.reduce(v).is_empty()
    }
}

/// Rank of the matrix with the given rows.
pub fn rank(field: FieldSpec, ncols: usize, rows: impl IntoIterator<Item = SparseVec>) -> usize {
    let mut e = Echelon::new(field, ncols);
    for r in rows {
        e.insert(r);
        if e.rank() == ncols {
            break;
        }
    }
    e.rank()
}

/// Sparse row from a dense slice of values.
pub fn sparse_from_dense(field: &FieldSpec, dense: &[i64]) -> SparseVec {
    dense
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(i, &x)| (i as u32, field.from_i64(x)))
        .collect()
}
