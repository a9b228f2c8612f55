//! Dense exact linear algebra over a prime field.

use crate::error::Error;
use crate::field::Field;
use serde::{Deserialize, Serialize};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldMatrix<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> FieldMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FieldMatrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<F>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        FieldMatrix { rows: rows.len(), cols, data }
    }

    pub fn from_u32_rows(rows: &[&[u32]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<F>> =
            rows.iter().map(|r| r.iter().map(|&x| F::from_u64(x as u64)).collect()).collect();
        Self::from_rows(cols, &rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other[(k, j)];
                    out[(i, j)] += a * b;
                }
            }
        }
        out
    }

    /// `v * self` for a row vector `v`.
    pub fn apply_row(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![F::zero(); self.cols];
        for (i, &a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += a * self[(i, j)];
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// In-place reduction; returns pivot columns.
    fn reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].inv();
            for j in c..self.cols {
                self[(r, j)] *= inv;
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let f = self[(i, c)];
                if f.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let t = self[(r, j)];
                    self[(i, j)] -= f * t;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().reduce().len()
    }
}

impl<F: Field> std::ops::Index<(usize, usize)> for FieldMatrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F: Field> std::ops::IndexMut<(usize, usize)> for FieldMatrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

/// Reduced row-echelon form, same shape, zero rows last.
pub fn rref<F: Field>(m: &FieldMatrix<F>) -> FieldMatrix<F> {
    let mut out = m.clone();
    out.reduce();
    out
}

/// Null space of `m` acting on column vectors.
pub fn kernel<F: Field>(m: &FieldMatrix<F>) -> Subspace<F> {
    let mut red = m.clone();
    let pivots = red.reduce();
    let n = m.cols();
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![F::zero(); n];
        v[free] = F::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -red[(r, free)];
        }
        basis.push(v);
    }
    Subspace::span(n, basis)
}

/// A linear subspace of `F^ambient_dim` held by its canonical rref basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Subspace<F: Field> {
    ambient_dim: usize,
    basis: Vec<Vec<F>>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { ambient_dim, basis: Vec::new() }
    }

    pub fn full(ambient_dim: usize) -> Self {
        let basis = FieldMatrix::<F>::identity(ambient_dim).row_vecs();
        Subspace { ambient_dim, basis }
    }

    /// Span of arbitrary vectors.
    pub fn span(ambient_dim: usize, vectors: Vec<Vec<F>>) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient_dim);
        }
        let mut m = FieldMatrix::from_rows(ambient_dim, &vectors);
        let r = m.reduce().len();
        m.rows = r;
        m.data.truncate(r * ambient_dim);
        Subspace { ambient_dim, basis: m.row_vecs() }
    }

    /// Span of standard basis vectors.
    pub fn coordinate(ambient_dim: usize, coords: impl IntoIterator<Item = usize>) -> Self {
        let vs = coords
            .into_iter()
            .map(|c| {
                let mut v = vec![F::zero(); ambient_dim];
                v[c] = F::one();
                v
            })
            .collect();
        Self::span(ambient_dim, vs)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    pub fn matrix(&self) -> FieldMatrix<F> {
        FieldMatrix::from_rows(self.ambient_dim, &self.basis)
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis.iter().map(|r| r.iter().position(|x| !x.is_zero()).unwrap()).collect()
    }

    /// Reduces `v` against the basis; zero iff `v` lies in the subspace.
    pub fn reduce_vector(&self, v: &[F]) -> Vec<F> {
        let mut v = v.to_vec();
        for (row, p) in self.basis.iter().zip(self.pivots()) {
            let f = v[p];
            if !f.is_zero() {
                for (x, &y) in v.iter_mut().zip(row) {
                    *x -= f * y;
                }
            }
        }
        v
    }

    pub fn contains_vector(&self, v: &[F]) -> bool {
        self.reduce_vector(v).iter().all(|x| x.is_zero())
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.dim() <= other.dim()
            && self.basis.iter().all(|r| other.contains_vector(r))
    }

    /// Orthogonal complement for the standard dot product.
    pub fn annihilator(&self) -> Self {
        if self.basis.is_empty() {
            return Self::full(self.ambient_dim);
        }
        kernel(&self.matrix())
    }

    /// Image under `v -> v * m`.
    pub fn image(&self, m: &FieldMatrix<F>) -> Self {
        assert_eq!(m.rows(), self.ambient_dim);
        Self::span(m.cols(), self.basis.iter().map(|r| m.apply_row(r)).collect())
    }

    /// Every vector of the subspace; only for tiny oracles.
    pub fn all_vectors(&self) -> Vec<Vec<F>> {
        let mut out = vec![vec![F::zero(); self.ambient_dim]];
        for row in &self.basis {
            let mut next = Vec::with_capacity(out.len() * F::MODULUS as usize);
            for v in &out {
                for c in F::elements() {
                    next.push(v.iter().zip(row).map(|(&a, &b)| a + c * b).collect());
                }
            }
            out = next;
        }
        out
    }

    /// All lines of the subspace as canonical 1-dim subspaces.
    pub fn lines(&self) -> Vec<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for v in self.all_vectors() {
            if v.iter().any(|x| !x.is_zero()) {
                seen.insert(Self::span(self.ambient_dim, vec![v]));
            }
        }
        seen.into_iter().collect()
    }

    /// Every `d`-dimensional subspace of `F^m`, via their reduced echelon forms.
    pub fn grassmannian(m: usize, d: usize) -> Vec<Self> {
        let mut out = Vec::new();
        if d > m {
            return out;
        }
        let elems = F::elements();
        let mut pivots: Vec<usize> = (0..d).collect();
        loop {
            // free slots: (row, col) with col > pivot of row and col not a pivot
            let free: Vec<(usize, usize)> = (0..d)
                .flat_map(|r| ((pivots[r] + 1)..m).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
                .collect();
            let mut idx = vec![0usize; free.len()];
            loop {
                let mut rows = vec![vec![F::zero(); m]; d];
                for (r, &p) in pivots.iter().enumerate() {
                    rows[r][p] = F::one();
                }
                for (&(r, c), &i) in free.iter().zip(&idx) {
                    rows[r][c] = elems[i];
                }
                out.push(Subspace { ambient_dim: m, basis: rows });
                let mut pos = 0;
                while pos < idx.len() {
                    idx[pos] += 1;
                    if idx[pos] < elems.len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == idx.len() {
                    break;
                }
            }
            // next pivot combination
            let mut i = d;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if pivots[i] < m - d + i {
                    break;
                }
                if i == 0 && pivots[0] >= m - d {
                    return out;
                }
            }
            if pivots[i] >= m - d + i {
                return out;
            }
            pivots[i] += 1;
            for j in i + 1..d {
                pivots[j] = pivots[j - 1] + 1;
            }
        }
    }
}

fn check<F: Field>(u: &Subspace<F>, v: &Subspace<F>) -> Result<(), Error> {
    if u.ambient_dim != v.ambient_dim {
        return Err(Error::AmbientMismatch(format!(
            "ambient dims {} and {}",
            u.ambient_dim, v.ambient_dim
        )));
    }
    Ok(())
}

pub fn join<F: Field>(u: &Subspace<F>, v: &Subspace<F>) -> Result<Subspace<F>, Error> {
    check(u, v)?;
    let mut rows = u.basis.clone();
    rows.extend(v.basis.iter().cloned());
    Ok(Subspace::span(u.ambient_dim, rows))
}

pub fn meet<F: Field>(u: &Subspace<F>, v: &Subspace<F>) -> Result<Subspace<F>, Error> {
    check(u, v)?;
    if u.is_subspace_of(v) {
        return Ok(u.clone());
    }
    if v.is_subspace_of(u) {
        return Ok(v.clone());
    }
    Ok(join(&u.annihilator(), &v.annihilator())?.annihilator())
}
