use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::number_theory::is_prime_u64;

/// Residues modulo a prime below 256.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PrimeField {
    p: u8,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 256 || !is_prime_u64(p) {
            return Err(Error::InvalidArgument(format!(
                "field characteristic must be a prime below 256, got {p}"
            )));
        }
        Ok(PrimeField { p: p as u8 })
    }

    pub fn p(self) -> u64 {
        self.p as u64
    }

    pub fn reduce(self, a: i64) -> u8 {
        a.rem_euclid(self.p as i64) as u8
    }

    pub fn add(self, a: u8, b: u8) -> u8 {
        ((a as u16 + b as u16) % self.p as u16) as u8
    }

    pub fn sub(self, a: u8, b: u8) -> u8 {
        ((a as u16 + self.p as u16 - b as u16) % self.p as u16) as u8
    }

    pub fn neg(self, a: u8) -> u8 {
        self.sub(0, a)
    }

    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.p as u16) as u8
    }

    pub fn inv(self, a: u8) -> Option<u8> {
        if a.is_multiple_of(self.p) {
            return None;
        }
        let mut acc = 1u8;
        for _ in 0..self.p - 2 {
            acc = self.mul(acc, a);
        }
        Some(acc)
    }
}

/// A square matrix over a prime field, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    dim: usize,
    entries: Box<[u8]>,
}

impl Matrix {
    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0u8; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        Matrix {
            dim,
            entries: entries.into(),
        }
    }

    pub fn scalar(field: PrimeField, dim: usize, c: u64) -> Self {
        let mut m = Matrix::identity(dim);
        let c = field.reduce(c as i64);
        for i in 0..dim {
            m.entries[i * dim + i] = c;
        }
        m
    }

    /// Reduces arbitrary integers mod `p`.
    pub fn from_entries(field: PrimeField, dim: usize, entries: &[i64]) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Matrix {
            dim,
            entries: entries.iter().map(|&x| field.reduce(x)).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.dim + j]
    }

    pub fn mul(&self, other: &Matrix, field: PrimeField) -> Matrix {
        let n = self.dim;
        let p = field.p() as u32;
        let mut out = vec![0u8; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u32;
                for k in 0..n {
                    acc += self.entries[i * n + k] as u32 * other.entries[k * n + j] as u32;
                }
                out[i * n + j] = (acc % p) as u8;
            }
        }
        Matrix {
            dim: n,
            entries: out.into(),
        }
    }

    pub fn apply(&self, v: &[u8], field: PrimeField) -> Vec<u8> {
        let n = self.dim;
        let p = field.p() as u32;
        (0..n)
            .map(|i| {
                let acc: u32 = (0..n)
                    .map(|k| self.entries[i * n + k] as u32 * v[k] as u32)
                    .sum();
                (acc % p) as u8
            })
            .collect()
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self, field: PrimeField) -> Option<Matrix> {
        let n = self.dim;
        let mut a: Vec<Vec<u8>> = (0..n)
            .map(|i| {
                let mut row = self.entries[i * n..(i + 1) * n].to_vec();
                row.extend((0..n).map(|j| u8::from(i == j)));
                row
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[r][col] != 0)?;
            a.swap(col, pivot);
            let inv = field.inv(a[col][col])?;
            for x in a[col].iter_mut() {
                *x = field.mul(*x, inv);
            }
            for r in 0..n {
                let c = a[r][col];
                if r != col && c != 0 {
                    for k in 0..2 * n {
                        let t = field.mul(c, a[col][k]);
                        a[r][k] = field.sub(a[r][k], t);
                    }
                }
            }
        }
        Some(Matrix {
            dim: n,
            entries: a.iter().flat_map(|row| row[n..].iter().copied()).collect(),
        })
    }

    pub fn is_invertible(&self, field: PrimeField) -> bool {
        rank(field, self.dim, self.entries.chunks(self.dim).map(<[u8]>::to_vec).collect()) == self.dim
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.chunks(self.dim)).finish()
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries.serialize(s)
    }
}

/// Row echelon basis of the span of `rows`, in reduced form.
pub(crate) fn echelon(field: PrimeField, width: usize, mut rows: Vec<Vec<u8>>) -> Vec<Vec<u8>> {
    let mut r = 0;
    for col in 0..width {
        let Some(pivot) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, pivot);
        let inv = field.inv(rows[r][col]).expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        for i in 0..rows.len() {
            let c = rows[i][col];
            if i != r && c != 0 {
                for k in 0..width {
                    let t = field.mul(c, rows[r][k]);
                    rows[i][k] = field.sub(rows[i][k], t);
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    rows
}

pub(crate) fn rank(field: PrimeField, width: usize, rows: Vec<Vec<u8>>) -> usize {
    echelon(field, width, rows).len()
}
