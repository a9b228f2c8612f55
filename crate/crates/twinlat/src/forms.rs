//! Invariant symplectic and symmetric pairings on `F[z, 1/z]^R`.
//!
//! Base coordinates are indexed so that `x_j` pairs with `x_(R-1-j)`:
//! `x_0..x_(n-1)` are `f_1..f_n`, then (odd rank only) the anisotropic
//! coordinate `r`, then `e_n..e_1`. The pairing is
//! `<z^a x_j, z^b x_l> = s(j) [a + b = 0] [j + l = R - 1]` where `s = 1`
//! except `s(f_i) = -1` for the symplectic form.

use crate::error::Error;
use crate::exactfield::{kernel, FieldMatrix, Subspace};
use crate::field::Field;
use crate::laurent::{Ambient, LaurentPoly, LaurentVector, PeriodicSubspace, Variant};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    Symplectic,
    OrthogonalEven,
    OrthogonalOdd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct InvariantForm<F: Field> {
    ambient: Ambient,
    kind: FormKind,
    eta: F,
}

impl<F: Field> InvariantForm<F> {
    /// The form matching the ambient variant; `None` for the linear variant.
    pub fn for_ambient(ambient: Ambient) -> Result<Option<Self>, Error> {
        let kind = match ambient.variant() {
            Variant::Linear => return Ok(None),
            Variant::Symplectic => FormKind::Symplectic,
            Variant::OrthogonalEven => FormKind::OrthogonalEven,
            Variant::OrthogonalOdd => FormKind::OrthogonalOdd,
        };
        if kind != FormKind::Symplectic && F::MODULUS == 2 {
            return Err(Error::Config("orthogonal forms need odd q".into()));
        }
        Ok(Some(InvariantForm { ambient, kind, eta: F::one() }))
    }

    pub fn new(ambient: Ambient) -> Result<Self, Error> {
        Self::for_ambient(ambient)?.ok_or_else(|| Error::Config("linear ambient carries no form".into()))
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    /// Index paired with base index `j`.
    pub fn partner(&self, j: usize) -> usize {
        self.ambient.rank() - 1 - j
    }

    fn sign(&self, j: usize) -> F {
        let r = self.ambient.rank();
        match self.kind {
            FormKind::Symplectic if j < r / 2 => -F::one(),
            FormKind::OrthogonalOdd if 2 * j + 1 == r => self.eta,
            _ => F::one(),
        }
    }

    /// `<z^a x_j, z^b x_l>`.
    pub fn basis_pairing(&self, a: i64, j: usize, b: i64, l: usize) -> F {
        if a + b == 0 && j + l + 1 == self.ambient.rank() {
            self.sign(j)
        } else {
            F::zero()
        }
    }

    pub fn eval(&self, v: &LaurentVector<F>, w: &LaurentVector<F>) -> F {
        let mut acc = F::zero();
        for (a, j, c) in v.terms() {
            for (b, l, d) in w.terms() {
                if a + b == 0 && j + l + 1 == self.ambient.rank() {
                    acc += c * d * self.sign(j);
                }
            }
        }
        acc
    }

    /// Pairing of two vectors given in window `k` coordinates.
    pub fn eval_window(&self, k: usize, v: &[F], w: &[F]) -> Result<F, Error> {
        let n = self.ambient.window_dim(k);
        if v.len() != n || w.len() != n {
            return Err(Error::WindowMismatch(format!("vectors of length {} and {} in window {k}", v.len(), w.len())));
        }
        Ok(self.eval(&LaurentVector::from_window(&self.ambient, k, v), &LaurentVector::from_window(&self.ambient, k, w)))
    }

    /// Row of the functional `v -> <v, u>` on window `e` coordinates.
    fn functional(&self, e: usize, u: &LaurentVector<F>) -> Vec<F> {
        let amb = &self.ambient;
        let mut row = vec![F::zero(); amb.window_dim(e)];
        for (b, l, d) in u.terms() {
            let a = -b;
            let j = self.partner(l);
            if a >= -(e as i64) && a < e as i64 {
                row[amb.index(e, a, j)] += self.sign(j) * d;
            }
        }
        row
    }

    /// Perp of a positive-type stored space.
    fn perp_positive(&self, w: &PeriodicSubspace<F>) -> Subspace<F> {
        let amb = self.ambient;
        let k = w.window_exp();
        let e = k + 1;
        let mut rows: Vec<Vec<F>> = w.generators().iter().map(|u| self.functional(e, u)).collect();
        // orthogonal to z^k H+: no coefficients in degrees <= -k
        for d in -(e as i64)..=-(k as i64) {
            for i in 0..amb.rank() {
                let mut r = vec![F::zero(); amb.window_dim(e)];
                r[amb.index(e, d, i)] = F::one();
                rows.push(r);
            }
        }
        kernel(&FieldMatrix::from_rows(amb.window_dim(e), &rows))
    }

    /// `W^perp` on the same side as `W`.
    pub fn perp(&self, w: &PeriodicSubspace<F>) -> Result<PeriodicSubspace<F>, Error> {
        if w.ambient() != self.ambient {
            return Err(Error::AmbientMismatch(format!("{:?} vs {:?}", w.ambient(), self.ambient)));
        }
        // the storage map of the negative side only rescales the form
        let s = self.perp_positive(w);
        PeriodicSubspace::from_window(self.ambient, w.side(), w.window_exp() + 1, s)
    }

    pub fn is_isotropic(&self, w: &PeriodicSubspace<F>) -> bool {
        self.perp(w).is_ok_and(|p| w.is_sublattice_of(&p))
    }

    pub fn is_coisotropic(&self, w: &PeriodicSubspace<F>) -> bool {
        self.perp(w).is_ok_and(|p| p.is_sublattice_of(w))
    }

    /// `sum_d <u, z^d v> z^d`: the pairing extended to the Laurent ring.
    pub fn laurent_pairing(&self, u: &LaurentVector<F>, v: &LaurentVector<F>) -> LaurentPoly<F> {
        let mut acc = LaurentPoly::zero();
        for (a, j, c) in u.terms() {
            for (b, l, d) in v.terms() {
                if j + l + 1 == self.ambient.rank() {
                    acc = acc.add(&LaurentPoly::monomial(c * d * self.sign(j), -a - b));
                }
            }
        }
        acc
    }

    /// Whether two lines, given by generators, form a hyperbolic pair.
    pub fn hyperbolic_pair(&self, u: &LaurentVector<F>, v: &LaurentVector<F>) -> bool {
        !u.is_zero()
            && !v.is_zero()
            && self.eval(u, u).is_zero()
            && self.eval(v, v).is_zero()
            && !self.eval(u, v).is_zero()
    }
}
