//! The ambient module `F[z, 1/z]^R`, lattices held through finite windows,
//! the shift, the positive/negative involution and the loop group action.
//!
//! Window exponent `k` means the quotient `z^-k H+ / z^k H+` with basis
//! `z^d e_i`, `-k <= d < k`, ordered by `(d, i)`.
//!
//! A negative lattice `X` is held through the positive lattice `M(X)`, where
//! `M(z^d x_i) = z^-d x_(R-1-i)`. `M` scales every invariant form by a sign,
//! turns `z` into `1/z` and takes `H- = involute(H+)` to `zH+`. The virtual
//! dimension of `X` is `nu(M(X)) + R`, so that involute preserves it.

use crate::error::Error;
use crate::exactfield::Subspace;
use crate::field::Field;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Linear,
    Symplectic,
    OrthogonalEven,
    OrthogonalOdd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Positive,
    Negative,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Positive => Side::Negative,
            Side::Negative => Side::Positive,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ambient {
    rank: usize,
    variant: Variant,
}

impl Ambient {
    pub fn new(rank: usize, variant: Variant) -> Result<Self, Error> {
        if rank < 2 {
            return Err(Error::Config(format!("rank {rank} < 2")));
        }
        let ok = match variant {
            Variant::Linear => true,
            Variant::Symplectic | Variant::OrthogonalEven => rank.is_multiple_of(2),
            Variant::OrthogonalOdd => rank % 2 == 1,
        };
        if !ok {
            return Err(Error::Config(format!("rank {rank} does not fit {variant:?}")));
        }
        Ok(Ambient { rank, variant })
    }

    pub fn linear(rank: usize) -> Self {
        Self::new(rank, Variant::Linear).unwrap()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Dimension of the window of exponent `k`.
    pub fn window_dim(&self, k: usize) -> usize {
        2 * k * self.rank
    }

    /// Index of `z^d e_i` in the window of exponent `k`.
    pub fn index(&self, k: usize, d: i64, i: usize) -> usize {
        debug_assert!(d >= -(k as i64) && d < k as i64 && i < self.rank);
        (d + k as i64) as usize * self.rank + i
    }

    /// Inverse of [`Ambient::index`].
    pub fn coord(&self, k: usize, idx: usize) -> (i64, usize) {
        ((idx / self.rank) as i64 - k as i64, idx % self.rank)
    }
}

/// A Laurent polynomial `sum c_j z^(lo + j)`, trimmed on both ends.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly<F: Field> {
    lo: i64,
    coeffs: Vec<F>,
}

impl<F: Field> LaurentPoly<F> {
    pub fn zero() -> Self {
        LaurentPoly { lo: 0, coeffs: Vec::new() }
    }

    pub fn monomial(c: F, e: i64) -> Self {
        Self::new(e, vec![c])
    }

    pub fn constant(c: F) -> Self {
        Self::monomial(c, 0)
    }

    pub fn new(lo: i64, mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        coeffs.drain(..lead);
        if coeffs.is_empty() {
            return Self::zero();
        }
        LaurentPoly { lo: lo + lead as i64, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn low(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.lo)
    }

    pub fn high(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.lo + self.coeffs.len() as i64 - 1)
    }

    pub fn coeff(&self, e: i64) -> F {
        let j = e - self.lo;
        if j < 0 || j >= self.coeffs.len() as i64 {
            F::zero()
        } else {
            self.coeffs[j as usize]
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, F)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, &c)| (self.lo + j as i64, c))
    }

    /// Unit monomial `c z^m` with `c != 0`, if the polynomial is one.
    pub fn as_unit(&self) -> Option<(F, i64)> {
        (self.coeffs.len() == 1).then(|| (self.coeffs[0], self.lo))
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let lo = self.lo.min(o.lo);
        let hi = self.high().unwrap().max(o.high().unwrap());
        Self::new(lo, (lo..=hi).map(|e| self.coeff(e) + o.coeff(e)).collect())
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { lo: self.lo, coeffs: self.coeffs.iter().map(|&c| -c).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![F::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(self.lo + o.lo, c)
    }

    /// `p(1/z)`.
    pub fn invert_variable(&self) -> Self {
        match self.high() {
            None => Self::zero(),
            Some(h) => Self::new(-h, self.coeffs.iter().rev().copied().collect()),
        }
    }

    /// Exact quotient; panics if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Self {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Self::zero();
        }
        // both trimmed, so constant terms are nonzero: ordinary polynomial division
        let mut rem = self.coeffs.clone();
        let dn = d.coeffs.len();
        if rem.len() < dn {
            panic!("inexact Laurent division");
        }
        let inv = d.coeffs[dn - 1].inv();
        let mut q = vec![F::zero(); rem.len() - dn + 1];
        for s in (0..q.len()).rev() {
            let f = rem[s + dn - 1] * inv;
            q[s] = f;
            if !f.is_zero() {
                for (j, &c) in d.coeffs.iter().enumerate() {
                    rem[s + j] -= f * c;
                }
            }
        }
        assert!(rem.iter().all(|c| c.is_zero()), "inexact Laurent division");
        Self::new(self.lo - d.lo, q)
    }
}

/// A vector of `F[z, 1/z]^R`, stored sparsely by `(degree, base index)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LaurentVector<F: Field> {
    terms: BTreeMap<(i64, usize), F>,
}

impl<F: Field> LaurentVector<F> {
    pub fn zero() -> Self {
        LaurentVector { terms: BTreeMap::new() }
    }

    /// `z^d e_i`.
    pub fn basis(d: i64, i: usize) -> Self {
        let mut v = Self::zero();
        v.terms.insert((d, i), F::one());
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, usize, F)> + '_ {
        self.terms.iter().map(|(&(d, i), &c)| (d, i, c))
    }

    pub fn add_term(&mut self, d: i64, i: usize, c: F) {
        let e = self.terms.entry((d, i)).or_insert(F::zero());
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(d, i));
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (d, i, c) in o.terms() {
            r.add_term(d, i, c);
        }
        r
    }

    pub fn scale(&self, c: F) -> Self {
        let mut r = Self::zero();
        if !c.is_zero() {
            for (d, i, x) in self.terms() {
                r.terms.insert((d, i), x * c);
            }
        }
        r
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().map(|k| k.0).min()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().map(|k| k.0).max()
    }

    /// `z^m v`.
    pub fn shift(&self, m: i64) -> Self {
        LaurentVector { terms: self.terms.iter().map(|(&(d, i), &c)| ((d + m, i), c)).collect() }
    }

    /// `z^d e_i -> z^(-d-1) e_i`.
    pub fn involute(&self) -> Self {
        LaurentVector { terms: self.terms.iter().map(|(&(d, i), &c)| ((-d - 1, i), c)).collect() }
    }

    /// `z^d x_i -> z^d x_(R-1-i)`.
    pub fn reverse_index(&self, rank: usize) -> Self {
        LaurentVector { terms: self.terms.iter().map(|(&(d, i), &c)| ((d, rank - 1 - i), c)).collect() }
    }

    /// `z^d x_i -> z^-d x_(R-1-i)`, i.e. frame position `L -> R - 1 - L`.
    pub fn mirror(&self, rank: usize) -> Self {
        LaurentVector { terms: self.terms.iter().map(|(&(d, i), &c)| ((-d, rank - 1 - i), c)).collect() }
    }

    /// Window coordinates, dropping degrees `>= k`. Panics below `-k`.
    pub fn to_window(&self, amb: &Ambient, k: usize) -> Vec<F> {
        let mut v = vec![F::zero(); amb.window_dim(k)];
        for (d, i, c) in self.terms() {
            assert!(d >= -(k as i64), "vector does not fit window {k}");
            if d < k as i64 {
                v[amb.index(k, d, i)] = c;
            }
        }
        v
    }

    pub fn from_window(amb: &Ambient, k: usize, v: &[F]) -> Self {
        let mut r = Self::zero();
        for (idx, &c) in v.iter().enumerate() {
            if !c.is_zero() {
                let (d, i) = amb.coord(k, idx);
                r.terms.insert((d, i), c);
            }
        }
        r
    }
}

/// Square matrix over `F[z, 1/z]`, acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentMatrix<F: Field> {
    rank: usize,
    entries: Vec<LaurentPoly<F>>,
}

impl<F: Field> LaurentMatrix<F> {
    pub fn new(rank: usize, entries: Vec<LaurentPoly<F>>) -> Self {
        assert_eq!(entries.len(), rank * rank);
        LaurentMatrix { rank, entries }
    }

    pub fn identity(rank: usize) -> Self {
        let mut e = vec![LaurentPoly::zero(); rank * rank];
        for i in 0..rank {
            e[i * rank + i] = LaurentPoly::constant(F::one());
        }
        LaurentMatrix { rank, entries: e }
    }

    pub fn diagonal(diag: Vec<LaurentPoly<F>>) -> Self {
        let rank = diag.len();
        let mut m = Self::identity(rank);
        for (i, p) in diag.into_iter().enumerate() {
            m.entries[i * rank + i] = p;
        }
        m
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entry(&self, i: usize, j: usize) -> &LaurentPoly<F> {
        &self.entries[i * self.rank + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: LaurentPoly<F>) {
        self.entries[i * self.rank + j] = p;
    }

    /// Largest `|exponent|` among the entries.
    pub fn degree_bound(&self) -> i64 {
        self.entries
            .iter()
            .filter_map(|p| Some(p.low()?.abs().max(p.high()?.abs())))
            .max()
            .unwrap_or(0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.rank, o.rank);
        let r = self.rank;
        let mut out = vec![LaurentPoly::zero(); r * r];
        for i in 0..r {
            for j in 0..r {
                let mut acc = LaurentPoly::zero();
                for l in 0..r {
                    acc = acc.add(&self.entry(i, l).mul(o.entry(l, j)));
                }
                out[i * r + j] = acc;
            }
        }
        LaurentMatrix { rank: r, entries: out }
    }

    pub fn apply(&self, v: &LaurentVector<F>) -> LaurentVector<F> {
        let mut out = LaurentVector::zero();
        for (d, j, c) in v.terms() {
            for i in 0..self.rank {
                for (e, a) in self.entry(i, j).terms() {
                    out.add_term(d + e, i, a * c);
                }
            }
        }
        out
    }

    /// Conjugate by `z^d x_i -> z^-d x_(R-1-i)`.
    pub fn mirrored(&self) -> Self {
        let r = self.rank;
        let mut out = Self::identity(r);
        for i in 0..r {
            for j in 0..r {
                out.set(i, j, self.entry(r - 1 - i, r - 1 - j).invert_variable());
            }
        }
        out
    }

    /// Entries `p(z) -> p(1/z)`.
    pub fn invert_variable(&self) -> Self {
        LaurentMatrix { rank: self.rank, entries: self.entries.iter().map(|p| p.invert_variable()).collect() }
    }

    /// Fraction-free elimination over the domain `F[z, 1/z]`.
    pub fn det(&self) -> LaurentPoly<F> {
        let n = self.rank;
        let mut m = self.entries.clone();
        let mut sign = false;
        let mut prev = LaurentPoly::constant(F::one());
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !m[i * n + k].is_zero()) else {
                return LaurentPoly::zero();
            };
            if p != k {
                for j in 0..n {
                    m.swap(p * n + j, k * n + j);
                }
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = m[k * n + k].mul(&m[i * n + j]).sub(&m[i * n + k].mul(&m[k * n + j]));
                    m[i * n + j] = t.div_exact(&prev);
                }
            }
            prev = m[k * n + k].clone();
        }
        if sign {
            prev.neg()
        } else {
            prev
        }
    }

    /// `Some(m)` when `det = c z^m`.
    pub fn det_order(&self) -> Option<i64> {
        self.det().as_unit().map(|(_, m)| m)
    }
}

type Quotient<F> = (usize, Subspace<F>, Vec<Vec<F>>);

/// A lattice `W` with `z^k H+ <= W <= z^-k H+` and `zW <= W`, stored as
/// `W / z^k H+`. Negative lattices are stored through the involution.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "", into = "LatticeJson", try_from = "LatticeJson")]
pub struct PeriodicSubspace<F: Field> {
    ambient: Ambient,
    side: Side,
    window_exp: usize,
    space: Subspace<F>,
}

fn coord_tail<F: Field>(amb: &Ambient, k: usize, from: i64) -> Vec<Vec<F>> {
    let mut out = Vec::new();
    for d in from.max(-(k as i64))..k as i64 {
        for i in 0..amb.rank {
            let mut v = vec![F::zero(); amb.window_dim(k)];
            v[amb.index(k, d, i)] = F::one();
            out.push(v);
        }
    }
    out
}

/// `z^m` on window vectors, truncating degrees that leave `[-k, k)` upward.
fn shift_window<F: Field>(amb: &Ambient, k: usize, v: &[F], m: i64) -> Vec<F> {
    let mut out = vec![F::zero(); v.len()];
    for (idx, &c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (d, i) = amb.coord(k, idx);
        let d2 = d + m;
        assert!(d2 >= -(k as i64), "shift leaves the window");
        if d2 < k as i64 {
            out[amb.index(k, d2, i)] = c;
        }
    }
    out
}

impl<F: Field> PeriodicSubspace<F> {
    /// Validates stability under `z` and wraps.
    pub fn from_window(ambient: Ambient, side: Side, k: usize, space: Subspace<F>) -> Result<Self, Error> {
        if k == 0 || space.ambient_dim() != ambient.window_dim(k) {
            return Err(Error::WindowMismatch(format!(
                "space of ambient dim {} in window {k}",
                space.ambient_dim()
            )));
        }
        for b in space.basis() {
            if !space.contains_vector(&shift_window(&ambient, k, b, 1)) {
                return Err(Error::VariantConstraintViolated("lattice is not z-stable".into()));
            }
        }
        Ok(PeriodicSubspace { ambient, side, window_exp: k, space }.normalized())
    }

    fn raw(ambient: Ambient, side: Side, k: usize, space: Subspace<F>) -> Self {
        PeriodicSubspace { ambient, side, window_exp: k, space }
    }

    /// `z^m H+`, or `z^m H-` on the negative side.
    pub fn standard_shifted(ambient: Ambient, side: Side, m: i64) -> Self {
        let from = match side {
            Side::Positive => m,
            Side::Negative => 1 - m,
        };
        let k = (from.unsigned_abs() as usize).max(1);
        let space = Subspace::span(ambient.window_dim(k), coord_tail::<F>(&ambient, k, from));
        Self::raw(ambient, side, k, space)
    }

    /// `H+` in window `k`.
    pub fn standard_positive(ambient: Ambient, k: usize) -> Self {
        let k = k.max(1);
        let space = Subspace::span(ambient.window_dim(k), coord_tail::<F>(&ambient, k, 0));
        Self::raw(ambient, Side::Positive, k, space)
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn window_exp(&self) -> usize {
        self.window_exp
    }

    /// Stored subspace of the window (the involute preimage on the negative side).
    pub fn space(&self) -> &Subspace<F> {
        &self.space
    }

    pub fn virtual_dim(&self) -> i64 {
        let nu = self.space.dim() as i64 - (self.window_exp * self.ambient.rank) as i64;
        match self.side {
            Side::Positive => nu,
            Side::Negative => nu + self.ambient.rank as i64,
        }
    }

    pub fn widen(&self, k2: usize) -> Self {
        let k = self.window_exp;
        if k2 <= k {
            return self.clone();
        }
        let amb = &self.ambient;
        let mut rows: Vec<Vec<F>> = self
            .space
            .basis()
            .iter()
            .map(|b| LaurentVector::from_window(amb, k, b).to_window(amb, k2))
            .collect();
        rows.extend(coord_tail::<F>(amb, k2, k as i64));
        Self::raw(*amb, self.side, k2, Subspace::span(amb.window_dim(k2), rows))
    }

    /// Smallest window `k >= 1` that holds the lattice.
    pub fn normalized(&self) -> Self {
        let amb = &self.ambient;
        let k = self.window_exp;
        let ki = k as i64;
        // top: all z^d e_i with d >= t lie in the space
        let mut t = ki;
        while t > -ki {
            let d = t - 1;
            let all = (0..amb.rank).all(|i| {
                let mut v = vec![F::zero(); amb.window_dim(k)];
                v[amb.index(k, d, i)] = F::one();
                self.space.contains_vector(&v)
            });
            if !all {
                break;
            }
            t = d;
        }
        let mut b = i64::MIN;
        for row in self.space.basis() {
            let low = row.iter().position(|c| !c.is_zero()).map(|p| amb.coord(k, p).0).unwrap();
            b = b.max(-low);
        }
        let k2 = t.max(b).max(1) as usize;
        if k2 == k {
            return self.clone();
        }
        let rows = self
            .space
            .basis()
            .iter()
            .map(|r| LaurentVector::from_window(amb, k, r).to_window(amb, k2))
            .collect();
        Self::raw(*amb, self.side, k2, Subspace::span(amb.window_dim(k2), rows))
    }

    /// The stored space as a positive-type lattice in window `k2 >= window_exp`.
    pub fn stored_in(&self, k2: usize) -> Subspace<F> {
        self.widen(k2).space
    }

    /// The actual lattice intersected with degrees `[-k2, k2)`, for
    /// intersections across sides. Needs `k2 >= window_exp`.
    pub fn actual_in(&self, k2: usize) -> Subspace<F> {
        match self.side {
            Side::Positive => self.stored_in(k2),
            Side::Negative => {
                let amb = &self.ambient;
                let e = k2 + 1;
                let s = self.stored_in(e);
                // stored degrees in [1 - k2, k2]
                let mut rows: Vec<Vec<F>> = Vec::new();
                for d in -(e as i64)..1 - k2 as i64 {
                    for i in 0..amb.rank {
                        let mut v = vec![F::zero(); amb.window_dim(e)];
                        v[amb.index(e, d, i)] = F::one();
                        rows.push(v);
                    }
                }
                let low = Subspace::span(amb.window_dim(e), rows).annihilator();
                let cut = crate::exactfield::meet(&s, &low).expect("same window");
                let rows = cut
                    .basis()
                    .iter()
                    .map(|r| LaurentVector::from_window(amb, e, r).mirror(amb.rank).to_window(amb, k2))
                    .collect();
                Subspace::span(amb.window_dim(k2), rows)
            }
        }
    }

    /// `z^m W`.
    pub fn shift_apply(&self, m: i64) -> Self {
        if m == 0 {
            return self.clone();
        }
        // the stored image of z^m X is z^-m times the stored image of X
        let m_eff = match self.side {
            Side::Positive => m,
            Side::Negative => -m,
        };
        self.shift_stored(m_eff)
    }

    fn shift_stored(&self, m_eff: i64) -> Self {
        if m_eff == 0 {
            return self.clone();
        }
        let k = self.window_exp;
        let k2 = k + m_eff.unsigned_abs() as usize;
        let w = self.widen(k2);
        let amb = &self.ambient;
        let mut rows: Vec<Vec<F>> = w.space.basis().iter().map(|b| shift_window(amb, k2, b, m_eff)).collect();
        rows.extend(coord_tail::<F>(amb, k2, k as i64 + m_eff));
        Self::raw(*amb, self.side, k2, Subspace::span(amb.window_dim(k2), rows)).normalized()
    }

    /// `z^d e_i -> z^(-d-1) e_i`, flipping the side. On stored spaces this is
    /// the base index reversal followed by `z` or `1/z`.
    pub fn involute(&self) -> Self {
        let r = Self::raw(self.ambient, self.side.flip(), self.window_exp, self.reversed_space());
        match self.side {
            Side::Positive => r.shift_stored(1),
            Side::Negative => r.shift_stored(-1),
        }
    }

    fn reversed_space(&self) -> Subspace<F> {
        let amb = &self.ambient;
        let k = self.window_exp;
        let rows = self
            .space
            .basis()
            .iter()
            .map(|r| LaurentVector::from_window(amb, k, r).reverse_index(amb.rank).to_window(amb, k))
            .collect();
        Subspace::span(amb.window_dim(k), rows)
    }

    fn common(&self, o: &Self) -> Result<usize, Error> {
        if self.ambient != o.ambient {
            return Err(Error::AmbientMismatch(format!("{:?} vs {:?}", self.ambient, o.ambient)));
        }
        if self.side != o.side {
            return Err(Error::SideMismatch(format!("{:?} vs {:?}", self.side, o.side)));
        }
        Ok(self.window_exp.max(o.window_exp))
    }

    pub fn is_sublattice_of(&self, o: &Self) -> bool {
        match self.common(o) {
            Ok(k) => self.stored_in(k).is_subspace_of(&o.stored_in(k)),
            Err(_) => false,
        }
    }

    pub fn sum(&self, o: &Self) -> Result<Self, Error> {
        let k = self.common(o)?;
        let s = crate::exactfield::join(&self.stored_in(k), &o.stored_in(k))?;
        Ok(Self::raw(self.ambient, self.side, k, s).normalized())
    }

    pub fn intersect(&self, o: &Self) -> Result<Self, Error> {
        let k = self.common(o)?;
        let s = crate::exactfield::meet(&self.stored_in(k), &o.stored_in(k))?;
        Ok(Self::raw(self.ambient, self.side, k, s).normalized())
    }

    /// `dim(self / o)` for `o <= self`.
    pub fn codim_in(&self, o: &Self) -> i64 {
        self.virtual_dim() - o.virtual_dim()
    }

    /// Lattice spanned over `F` by `gens(E)` together with `z^E H+`, for the
    /// first `E >= e0` at which the virtual dimension reaches `expected`.
    pub fn span_until(
        ambient: Ambient,
        side: Side,
        e0: usize,
        expected: i64,
        gens: impl Fn(usize) -> Vec<LaurentVector<F>>,
    ) -> Self {
        let mut e = e0.max(1);
        loop {
            let rows = gens(e).iter().map(|v| v.to_window(&ambient, e)).collect();
            let w = Self::raw(ambient, side, e, Subspace::span(ambient.window_dim(e), rows));
            let nu = w.virtual_dim();
            if nu == expected {
                return w.normalized();
            }
            assert!(nu > expected && e < e0 + 64, "lattice span did not converge");
            e += 1;
        }
    }

    /// Basis vectors of the stored space as Laurent vectors (stored side).
    pub fn generators(&self) -> Vec<LaurentVector<F>> {
        self.space.basis().iter().map(|r| LaurentVector::from_window(&self.ambient, self.window_exp, r)).collect()
    }

    /// `g W`.
    pub fn group_apply(&self, g: &LaurentMatrix<F>) -> Result<Self, Error> {
        if g.rank() != self.ambient.rank {
            return Err(Error::AmbientMismatch(format!("matrix rank {} on rank {}", g.rank(), self.ambient.rank)));
        }
        let m = g.det_order().ok_or(Error::NotInvertible)?;
        // g sigma(S) = sigma(g' S) with g' = g(1/z)
        let (g, expected) = match self.side {
            Side::Positive => (g.clone(), self.virtual_dim() - m),
            Side::Negative => (g.mirrored(), self.virtual_dim() + m),
        };
        let k = self.window_exp as i64;
        let dg = g.degree_bound();
        let amb = self.ambient;
        let base: Vec<LaurentVector<F>> = self.generators().iter().map(|v| g.apply(v)).collect();
        let w = Self::span_until(amb, self.side, (k + dg) as usize, expected, |e| {
            let mut gens = base.clone();
            for d in k..e as i64 + dg {
                for i in 0..amb.rank {
                    gens.push(g.apply(&LaurentVector::basis(d, i)));
                }
            }
            gens
        });
        Ok(w)
    }

    /// The same stored space read on `side`. Reading a negative lattice on
    /// the positive side gives its image under the storage map.
    pub fn with_side(&self, side: Side) -> Self {
        PeriodicSubspace { side, ..self.clone() }
    }

    /// Whether the stored space contains `v` (stored coordinates).
    pub fn contains(&self, v: &LaurentVector<F>) -> bool {
        match v.min_degree() {
            None => true,
            Some(d) if d < -(self.window_exp as i64) => false,
            Some(_) => self.space.contains_vector(&v.to_window(&self.ambient, self.window_exp)),
        }
    }

    /// Window exponent, stored bases of `lo` and a basis of `hi / lo`.
    fn quotient(lo: &Self, hi: &Self) -> Result<Quotient<F>, Error> {
        let k = lo.common(hi)?;
        let s_lo = lo.stored_in(k);
        let s_hi = hi.stored_in(k);
        if !s_lo.is_subspace_of(&s_hi) {
            return Err(Error::NotNested("lower lattice is not contained in the upper one".into()));
        }
        let red: Vec<Vec<F>> = s_hi.basis().iter().map(|b| s_lo.reduce_vector(b)).collect();
        let comp = Subspace::span(s_hi.ambient_dim(), red);
        Ok((k, s_lo, comp.basis().to_vec()))
    }

    /// Coordinates of `self / lo` inside `hi / lo`, as a subspace of `F^m`.
    pub fn image_in(&self, lo: &Self, hi: &Self) -> Result<Subspace<F>, Error> {
        let (k0, s_lo, comp) = Self::quotient(lo, hi)?;
        let k = k0.max(self.window_exp);
        let amb = self.ambient;
        let widen = |rows: &[Vec<F>]| -> Vec<Vec<F>> {
            rows.iter().map(|r| LaurentVector::from_window(&amb, k0, r).to_window(&amb, k)).collect()
        };
        let lo_sp = Subspace::span(amb.window_dim(k), widen(s_lo.basis()));
        let comp = widen(&comp);
        let piv: Vec<usize> = comp.iter().map(|r| r.iter().position(|c| !c.is_zero()).unwrap()).collect();
        let rows = self
            .stored_in(k)
            .basis()
            .iter()
            .map(|b| {
                let r = lo_sp.reduce_vector(b);
                piv.iter().map(|&p| r[p]).collect()
            })
            .collect();
        Ok(Subspace::span(comp.len(), rows))
    }

    /// Lattice `lo + span(coefficients * basis of hi / lo)`.
    pub fn lift_from(lo: &Self, hi: &Self, sub: &Subspace<F>) -> Result<Self, Error> {
        let (k, s_lo, comp) = Self::quotient(lo, hi)?;
        if sub.ambient_dim() != comp.len() {
            return Err(Error::WindowMismatch(format!("quotient of dim {} vs {}", comp.len(), sub.ambient_dim())));
        }
        let mut rows = s_lo.basis().to_vec();
        for c in sub.basis() {
            let mut v = vec![F::zero(); s_lo.ambient_dim()];
            for (x, b) in c.iter().zip(&comp) {
                if !x.is_zero() {
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi += *x * *bi;
                    }
                }
            }
            rows.push(v);
        }
        Ok(Self::raw(lo.ambient, lo.side, k, Subspace::span(s_lo.ambient_dim(), rows)).normalized())
    }

    fn check_between(lo: &Self, hi: &Self) -> Result<(), Error> {
        if !hi.shift_stored(1).is_sublattice_of(lo) {
            return Err(Error::PeriodicityViolated("z times the upper lattice must lie in the lower one".into()));
        }
        Ok(())
    }

    /// All lattices `M` with `lo <= M <= hi` and `dim(M / lo) = d`.
    /// Needs `z hi <= lo`, so that every intermediate space is a lattice.
    pub fn between(lo: &Self, hi: &Self, d: usize) -> Result<Vec<Self>, Error> {
        Self::check_between(lo, hi)?;
        let m = hi.codim_in(lo) as usize;
        Subspace::grassmannian(m, d).iter().map(|g| Self::lift_from(lo, hi, g)).collect()
    }

    /// A random lattice `lo < M <= hi` with `dim(M / lo) = 1`.
    pub fn random_step<R: Rng + ?Sized>(lo: &Self, hi: &Self, rng: &mut R) -> Result<Self, Error> {
        Self::check_between(lo, hi)?;
        let m = hi.codim_in(lo) as usize;
        if m == 0 {
            return Err(Error::NotNested("no room between the lattices".into()));
        }
        loop {
            let v: Vec<F> = (0..m).map(|_| F::from_u64(rng.gen_range(0..F::MODULUS as u64))).collect();
            if v.iter().any(|c| !c.is_zero()) {
                return Self::lift_from(lo, hi, &Subspace::span(m, vec![v]));
            }
        }
    }

    /// Uniform-ish random lattice with `z^k H+ <= W <= z^-k H+`.
    pub fn random<R: Rng + ?Sized>(ambient: Ambient, side: Side, k: usize, rng: &mut R) -> Self {
        let n = ambient.window_dim(k);
        let count = rng.gen_range(0..=n / 2 + 1);
        let mut rows: Vec<Vec<F>> = Vec::new();
        for _ in 0..count {
            let mut v: Vec<F> = (0..n).map(|_| F::from_u64(rng.gen_range(0..F::MODULUS as u64))).collect();
            // sparsify so the lattice is not almost always z^-k H+
            for x in v.iter_mut() {
                if rng.gen_bool(0.5) {
                    *x = F::zero();
                }
            }
            for _ in 0..2 * k {
                rows.push(v.clone());
                v = shift_window(&ambient, k, &v, 1);
            }
        }
        Self::raw(ambient, side, k, Subspace::span(n, rows)).normalized()
    }
}

impl<F: Field> PartialEq for PeriodicSubspace<F> {
    fn eq(&self, o: &Self) -> bool {
        if self.ambient != o.ambient || self.side != o.side {
            return false;
        }
        if self.window_exp == o.window_exp {
            return self.space == o.space;
        }
        let a = self.normalized();
        let b = o.normalized();
        a.window_exp == b.window_exp && a.space == b.space
    }
}

impl<F: Field> Eq for PeriodicSubspace<F> {}

impl<F: Field> Hash for PeriodicSubspace<F> {
    fn hash<H: Hasher>(&self, h: &mut H) {
        let n = self.normalized();
        n.ambient.hash(h);
        n.side.hash(h);
        n.window_exp.hash(h);
        n.space.hash(h);
    }
}

impl<F: Field> PartialOrd for PeriodicSubspace<F> {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl<F: Field> Ord for PeriodicSubspace<F> {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        let a = self.normalized();
        let b = o.normalized();
        (a.ambient, a.side, a.window_exp, &a.space).cmp(&(b.ambient, b.side, b.window_exp, &b.space))
    }
}

/// Serialized form of a lattice.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeJson {
    pub rank: usize,
    pub q: u32,
    pub variant: Variant,
    pub side: Side,
    pub window_exp: usize,
    pub basis: Vec<Vec<u32>>,
}

impl<F: Field> From<PeriodicSubspace<F>> for LatticeJson {
    fn from(w: PeriodicSubspace<F>) -> Self {
        let side = w.side;
        // a negative lattice is serialized through the basis of involute(W)
        let w = match side {
            Side::Positive => w.normalized(),
            Side::Negative => w.involute().normalized(),
        };
        LatticeJson {
            rank: w.ambient.rank,
            q: F::MODULUS,
            variant: w.ambient.variant,
            side,
            window_exp: w.window_exp,
            basis: w.space.basis().iter().map(|r| r.iter().map(|c| c.value()).collect()).collect(),
        }
    }
}

impl<F: Field> TryFrom<LatticeJson> for PeriodicSubspace<F> {
    type Error = Error;
    fn try_from(j: LatticeJson) -> Result<Self, Error> {
        if j.q != F::MODULUS {
            return Err(Error::Parse(format!("modulus {} where {} expected", j.q, F::MODULUS)));
        }
        let amb = Ambient::new(j.rank, j.variant)?;
        let n = amb.window_dim(j.window_exp);
        let mut rows = Vec::new();
        for r in &j.basis {
            if r.len() != n || r.iter().any(|&x| x >= j.q) {
                return Err(Error::Parse("basis row does not fit the window".into()));
            }
            rows.push(r.iter().map(|&x| F::from_u64(x as u64)).collect());
        }
        let space = Subspace::span(n, rows);
        if space.dim() != j.basis.len() || space.basis() != rows_of(&j.basis, n).as_slice() {
            return Err(Error::Parse("basis is not in canonical reduced row-echelon form".into()));
        }
        let w = Self::from_window(amb, Side::Positive, j.window_exp, space)?;
        Ok(match j.side {
            Side::Positive => w,
            Side::Negative => w.involute(),
        })
    }
}

fn rows_of<F: Field>(b: &[Vec<u32>], _n: usize) -> Vec<Vec<F>> {
    b.iter().map(|r| r.iter().map(|&x| F::from_u64(x as u64)).collect()).collect()
}
