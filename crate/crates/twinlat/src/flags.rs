//! Periodic flags of lattices for the four variants.
//!
//! A flag is held as a set of vertices: one lattice per vertex type, taken
//! up to powers of `z`. The representative of a vertex of type `t` has
//! virtual dimension
//!
//! | type  | A, C | B, D types 0, 1 | D types n-1, n |
//! |-------|------|-----------------|----------------|
//! | nu    | `-t` | `0`             | `-n`           |
//!
//! and otherwise `-t`. Twin vertices (the oriflamme slots) share their
//! virtual dimension and are told apart by the parity of their distance to a
//! fixed coordinate lattice.
//!
//! Vertices are kept in the stored view: negative lattices are read on the
//! positive side through the storage map, under which both buildings obey
//! the same vertex conditions.

use crate::error::Error;
use crate::exactfield::Subspace;
use crate::field::Field;
use crate::forms::InvariantForm;
use crate::laurent::{Ambient, LatticeJson, LaurentMatrix, PeriodicSubspace, Side, Variant};
use crate::weyl::{AffineWeylElement, CoxeterType, TypeTag};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

type Lattice<F> = PeriodicSubspace<F>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagVariant {
    Linear,
    Symplectic,
    OriflammeSingle,
    OriflammeDouble,
}

impl FlagVariant {
    pub fn type_tag(self) -> TypeTag {
        match self {
            FlagVariant::Linear => TypeTag::A,
            FlagVariant::Symplectic => TypeTag::C,
            FlagVariant::OriflammeSingle => TypeTag::B,
            FlagVariant::OriflammeDouble => TypeTag::D,
        }
    }
}

/// Coxeter type together with its ambient module and form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Geometry<F: Field> {
    ty: CoxeterType,
    ambient: Ambient,
    form: Option<InvariantForm<F>>,
}

impl<F: Field> Geometry<F> {
    pub fn new(ty: CoxeterType) -> Result<Self, Error> {
        let n = ty.n;
        let ambient = match ty.tag {
            TypeTag::A => Ambient::linear(n),
            TypeTag::C => Ambient::new(2 * n, Variant::Symplectic)?,
            TypeTag::B => Ambient::new(2 * n + 1, Variant::OrthogonalOdd)?,
            TypeTag::D => Ambient::new(2 * n, Variant::OrthogonalEven)?,
        };
        let form = InvariantForm::for_ambient(ambient)?;
        Ok(Geometry { ty, ambient, form })
    }

    /// Geometry whose ambient has the given rank and variant.
    pub fn from_ambient(variant: FlagVariant, rank: usize) -> Result<Self, Error> {
        let tag = variant.type_tag();
        let n = match tag {
            TypeTag::A => rank,
            TypeTag::B => rank.saturating_sub(1) / 2,
            _ => rank / 2,
        };
        let g = Self::new(CoxeterType::new(tag, n)?)?;
        if g.ambient.rank() != rank {
            return Err(Error::Parse(format!("rank {rank} does not fit variant {variant:?}")));
        }
        Ok(g)
    }

    pub fn ty(&self) -> CoxeterType {
        self.ty
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn form(&self) -> Option<&InvariantForm<F>> {
        self.form.as_ref()
    }

    pub fn variant(&self) -> FlagVariant {
        match self.ty.tag {
            TypeTag::A => FlagVariant::Linear,
            TypeTag::C => FlagVariant::Symplectic,
            TypeTag::B => FlagVariant::OriflammeSingle,
            TypeTag::D => FlagVariant::OriflammeDouble,
        }
    }

    pub fn period(&self) -> usize {
        self.ty.period()
    }

    pub fn num_types(&self) -> usize {
        self.ty.num_generators()
    }

    /// Orthogonal complement of a stored lattice.
    pub fn perp(&self, l: &Lattice<F>) -> Lattice<F> {
        self.form.expect("linear geometry has no form").perp(l).expect("lattice of this ambient")
    }

    /// `H+` in the stored view.
    pub fn standard(&self) -> Lattice<F> {
        Lattice::standard_positive(self.ambient, 1)
    }

    /// Virtual dimension of the representative of a type-`t` vertex.
    pub fn nu_of_type(&self, t: usize) -> i64 {
        let n = self.ty.n;
        match self.ty.tag {
            TypeTag::B | TypeTag::D if t <= 1 => 0,
            TypeTag::D if t + 1 >= n => -(n as i64),
            _ => -(t as i64),
        }
    }

    /// The other slot of an oriflamme pair.
    pub fn twin(&self, t: usize) -> Option<usize> {
        let n = self.ty.n;
        match self.ty.tag {
            TypeTag::B | TypeTag::D if t <= 1 => Some(1 - t),
            TypeTag::D if t == n => Some(n - 1),
            TypeTag::D if t == n - 1 => Some(n),
            _ => None,
        }
    }

    /// Stored lattice spanned by the coordinate lines at frame positions
    /// `extra` and all positions `>= hi`.
    pub fn coordinate_lattice(&self, hi: i64, extra: &[i64]) -> Lattice<F> {
        let r = self.period() as i64;
        let low = extra.iter().copied().chain([hi]).min().unwrap();
        let k = 1.max(-low.div_euclid(r)).max((hi + r - 1).div_euclid(r)) as usize;
        let amb = self.ambient;
        let idx = (low..k as i64 * r)
            .filter(|l| *l >= hi || extra.contains(l))
            .map(|l| amb.index(k, l.div_euclid(r), l.rem_euclid(r) as usize));
        let space = Subspace::coordinate(amb.window_dim(k), idx);
        Lattice::from_window(amb, Side::Positive, k, space).expect("coordinate lattices are z-stable")
    }

    /// Frame positions of the standard type-`t` vertex: `(hi, extra)`.
    pub fn template(&self, t: usize) -> (i64, Vec<i64>) {
        let n = self.ty.n as i64;
        let t = t as i64;
        match self.ty.tag {
            TypeTag::B | TypeTag::D if t == 1 => (1, vec![-1]),
            TypeTag::D if t == n - 1 => (n + 1, vec![n - 1]),
            _ => (t, vec![]),
        }
    }

    fn parity(&self, l: &Lattice<F>, base: &Lattice<F>) -> usize {
        ((l.sum(base).unwrap().virtual_dim() - base.virtual_dim()) % 2) as usize
    }

    fn vertex_like(&self, l: &Lattice<F>, p: &Lattice<F>) -> bool {
        l.shift_apply(1).is_sublattice_of(p) && p.is_sublattice_of(l)
    }

    /// Vertex type and normalized representative, if `l` is a vertex.
    pub fn classify(&self, l: &Lattice<F>) -> Option<(usize, Lattice<F>)> {
        let r = self.period() as i64;
        let nu = l.virtual_dim();
        let res = (-nu).rem_euclid(r);
        let rep = l.shift_apply((nu + res) / r);
        let n = self.ty.n as i64;
        if self.ty.tag == TypeTag::A {
            return Some((res as usize, rep));
        }
        let p = self.perp(&rep);
        let t = match self.ty.tag {
            TypeTag::C if res <= n && self.vertex_like(&rep, &p) => res as usize,
            TypeTag::B | TypeTag::D if res == 0 => {
                if p != rep.shift_apply(1) {
                    return None;
                }
                self.parity(&rep, &self.standard())
            }
            TypeTag::B if (2..=n).contains(&res) && self.vertex_like(&rep, &p) => res as usize,
            TypeTag::D if (2..=n - 2).contains(&res) && self.vertex_like(&rep, &p) => res as usize,
            TypeTag::D if res == n => {
                if p != rep {
                    return None;
                }
                let (hi, extra) = self.template(n as usize);
                if self.parity(&rep, &self.coordinate_lattice(hi, &extra)) == 0 {
                    n as usize
                } else {
                    n as usize - 1
                }
            }
            _ => return None,
        };
        Some((t, rep))
    }

    /// Incidence of two vertex representatives.
    pub fn vertices_incident(&self, s: usize, a: &Lattice<F>, t: usize, b: &Lattice<F>) -> bool {
        if s == t {
            return a == b;
        }
        if self.ty.tag == TypeTag::A {
            let (a, b) = if s < t { (a, b) } else { (b, a) };
            return b.is_sublattice_of(a) && a.shift_apply(1).is_sublattice_of(b);
        }
        if self.twin(s) == Some(t) {
            return a.virtual_dim() - a.intersect(b).unwrap().virtual_dim() == 1;
        }
        if a.virtual_dim() > b.virtual_dim() {
            b.is_sublattice_of(a)
        } else {
            a.is_sublattice_of(b)
        }
    }

    /// Lattices `M` over `lo` with `M^perp = M`, `dim(M / lo) = 1`.
    pub fn self_dual_over(&self, lo: &Lattice<F>) -> Vec<Lattice<F>> {
        let hi = self.perp(lo);
        Lattice::between(lo, &hi, 1)
            .map(|ms| ms.into_iter().filter(|m| &self.perp(m) == m).collect())
            .unwrap_or_default()
    }

    /// Lattices `M` over `lo` with `M^perp = zM`, `dim(M / lo) = 1`.
    pub fn shifted_dual_over(&self, lo: &Lattice<F>) -> Vec<Lattice<F>> {
        let hi = self.perp(lo).shift_apply(-1);
        Lattice::between(lo, &hi, 1)
            .map(|ms| ms.into_iter().filter(|m| self.perp(m) == m.shift_apply(1)).collect())
            .unwrap_or_default()
    }

    /// Vertices determined by one lattice of a chain: the vertex itself,
    /// the vertex its complement represents, or the two oriflamme slots
    /// meeting in (or spanning) it.
    pub fn vertices_of_member(&self, l: &Lattice<F>) -> Option<Vec<(usize, Lattice<F>)>> {
        if let Some(v) = self.classify(l) {
            return Some(vec![v]);
        }
        self.form?;
        let p = self.perp(l);
        if let Some(v) = self.classify(&p) {
            return Some(vec![v]);
        }
        if !matches!(self.ty.tag, TypeTag::B | TypeTag::D) {
            return None;
        }
        let r = self.period() as i64;
        let n = self.ty.n as i64;
        for cand in [l, &p] {
            let nu = cand.virtual_dim();
            let res = (-nu).rem_euclid(r);
            let rep = cand.shift_apply((nu + res) / r);
            let pr = self.perp(&rep);
            if !self.vertex_like(&rep, &pr) {
                continue;
            }
            let slots = if res == 1 {
                self.shifted_dual_over(&rep)
            } else if self.ty.tag == TypeTag::D && res == n - 1 {
                self.self_dual_over(&pr)
            } else {
                continue;
            };
            let vs: Option<Vec<_>> = slots.iter().map(|m| self.classify(m)).collect();
            if let Some(vs) = vs.filter(|v| v.len() == 2) {
                return Some(vs);
            }
        }
        None
    }

    /// One period `W_0 > ... > W_(R-1)` of the chain of a chamber.
    pub fn chain(&self, v: &BTreeMap<usize, Lattice<F>>) -> Vec<Lattice<F>> {
        let n = self.ty.n;
        let r = self.period();
        let mut w: Vec<Option<Lattice<F>>> = vec![None; r];
        match self.ty.tag {
            TypeTag::A => {
                for k in 0..n {
                    w[k] = Some(v[&k].clone());
                }
                return w.into_iter().map(Option::unwrap).collect();
            }
            TypeTag::C => {
                for k in 0..=n {
                    w[k] = Some(v[&k].clone());
                }
            }
            TypeTag::B => {
                w[0] = Some(v[&0].clone());
                w[1] = Some(v[&0].intersect(&v[&1]).unwrap());
                for k in 2..=n {
                    w[k] = Some(v[&k].clone());
                }
            }
            TypeTag::D => {
                w[0] = Some(v[&0].clone());
                w[1] = Some(v[&0].intersect(&v[&1]).unwrap());
                for k in 2..=n - 2 {
                    w[k] = Some(v[&k].clone());
                }
                w[n - 1] = Some(v[&(n - 1)].sum(&v[&n]).unwrap());
                w[n] = Some(v[&n].clone());
            }
        }
        for k in n + 1..r {
            w[k] = Some(self.perp(w[r - k].as_ref().unwrap()));
        }
        w.into_iter().map(Option::unwrap).collect()
    }

    /// `W_k = z^(k div R) W_(k mod R)` for a chain period.
    pub fn chain_at(&self, chain: &[Lattice<F>], k: i64) -> Lattice<F> {
        let r = self.period() as i64;
        chain[k.rem_euclid(r) as usize].shift_apply(k.div_euclid(r))
    }

    fn standard_vertices(&self) -> BTreeMap<usize, Lattice<F>> {
        (0..self.num_types())
            .map(|t| {
                let (hi, extra) = self.template(t);
                (t, self.coordinate_lattice(hi, &extra))
            })
            .collect()
    }
}

/// A random `lo < M <= hi` with `dim(M / lo) = 1` satisfying `pred`.
fn random_step_where<F: Field, R: Rng + ?Sized>(
    lo: &Lattice<F>,
    hi: &Lattice<F>,
    pred: impl Fn(&Lattice<F>) -> bool,
    rng: &mut R,
) -> Result<Lattice<F>, Error> {
    for _ in 0..64 {
        let m = Lattice::random_step(lo, hi, rng)?;
        if pred(&m) {
            return Ok(m);
        }
    }
    let all: Vec<_> = Lattice::between(lo, hi, 1)?.into_iter().filter(|m| pred(m)).collect();
    if all.is_empty() {
        return Err(Error::VariantConstraintViolated("no admissible intermediate lattice".into()));
    }
    let i = rng.gen_range(0..all.len());
    Ok(all[i].clone())
}

/// A periodic flag, held by its vertices in the stored view.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicFlag<F: Field> {
    geom: Geometry<F>,
    side: Side,
    vertices: BTreeMap<usize, Lattice<F>>,
}

impl<F: Field> PeriodicFlag<F> {
    pub fn empty(geom: Geometry<F>, side: Side) -> Self {
        PeriodicFlag { geom, side, vertices: BTreeMap::new() }
    }

    /// The chamber spanned by the coordinate lines (the normal flag).
    pub fn standard(geom: Geometry<F>, side: Side) -> Self {
        PeriodicFlag { geom, side, vertices: geom.standard_vertices() }
    }

    /// Builds from stored-view vertices, checking types and incidence.
    pub fn from_vertices(geom: Geometry<F>, side: Side, vertices: BTreeMap<usize, Lattice<F>>) -> Result<Self, Error> {
        for (&t, v) in &vertices {
            match geom.classify(v) {
                Some((s, rep)) if s == t && &rep == v => {}
                _ => return Err(Error::VariantConstraintViolated(format!("lattice is not a vertex of type {t}"))),
            }
        }
        let f = PeriodicFlag { geom, side, vertices };
        f.check_incidence()?;
        Ok(f)
    }

    pub(crate) fn from_vertices_unchecked(geom: Geometry<F>, side: Side, vertices: BTreeMap<usize, Lattice<F>>) -> Self {
        PeriodicFlag { geom, side, vertices }
    }

    /// The same stored vertices read on `side`.
    pub(crate) fn relabeled(&self, side: Side) -> Self {
        PeriodicFlag { side, ..self.clone() }
    }

    /// Image under `z^d x_i <-> z^-d x_(R-1-i)`, which swaps the two sides.
    pub fn swap_sides(&self) -> Self {
        self.relabeled(self.side.flip())
    }

    fn check_incidence(&self) -> Result<(), Error> {
        for (&s, a) in &self.vertices {
            for (&t, b) in self.vertices.range(s + 1..) {
                if !self.geom.vertices_incident(s, a, t, b) {
                    return Err(Error::NotNested(format!("vertices of types {s} and {t} are not incident")));
                }
            }
        }
        Ok(())
    }

    pub fn geometry(&self) -> &Geometry<F> {
        &self.geom
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn variant(&self) -> FlagVariant {
        self.geom.variant()
    }

    /// Stored-view vertex representatives by type.
    pub fn vertices(&self) -> &BTreeMap<usize, Lattice<F>> {
        &self.vertices
    }

    pub fn vertex(&self, t: usize) -> Option<&Lattice<F>> {
        self.vertices.get(&t)
    }

    /// The vertex of type `t` as an actual lattice of this side.
    pub fn vertex_lattice(&self, t: usize) -> Option<Lattice<F>> {
        self.vertices.get(&t).map(|v| v.with_side(self.side))
    }

    pub fn type_k(&self) -> BTreeSet<usize> {
        self.vertices.keys().copied().collect()
    }

    pub fn is_chamber(&self) -> bool {
        self.vertices.len() == self.geom.num_types()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn with_vertex(&self, t: usize, l: Lattice<F>) -> Self {
        let mut f = self.clone();
        f.vertices.insert(t, l);
        f
    }

    /// The face missing the vertex of type `t`.
    pub fn without(&self, t: usize) -> Self {
        let mut f = self.clone();
        f.vertices.remove(&t);
        f
    }

    pub fn is_face_of(&self, o: &Self) -> bool {
        self.geom == o.geom
            && self.side == o.side
            && self.vertices.iter().all(|(t, v)| o.vertices.get(t) == Some(v))
    }

    /// All faces, the empty one and the flag itself included.
    pub fn boundary(&self) -> Vec<Self> {
        let keys: Vec<usize> = self.vertices.keys().copied().collect();
        (0u64..1 << keys.len())
            .map(|mask| {
                let vertices = keys
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, t)| (*t, self.vertices[t].clone()))
                    .collect();
                PeriodicFlag { geom: self.geom, side: self.side, vertices }
            })
            .collect()
    }

    /// Chain period of a chamber (stored view).
    pub fn chain(&self) -> Vec<Lattice<F>> {
        assert!(self.is_chamber(), "chain of a non-maximal flag");
        self.geom.chain(&self.vertices)
    }

    /// Lattices of one period in the stored view: the vertices and, for
    /// the isometric types, their complements, by virtual dimension
    /// descending and type.
    pub fn period_members(&self) -> Vec<Lattice<F>> {
        let r = self.geom.period() as i64;
        let mut out: Vec<(i64, usize, Lattice<F>)> = Vec::new();
        let mut push = |l: Lattice<F>, t: usize| {
            let nu = l.virtual_dim();
            let res = (-nu).rem_euclid(r);
            let rep = l.shift_apply((nu + res) / r);
            if !out.iter().any(|(_, _, x)| *x == rep) {
                out.push((-res, t, rep));
            }
        };
        for (&t, v) in &self.vertices {
            push(v.clone(), t);
            if self.geom.form.is_some() {
                push(self.geom.perp(v), t);
            }
        }
        out.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        out.into_iter().map(|x| x.2).collect()
    }

    /// Any chamber containing this flag, chosen with `rng`.
    pub fn complete<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Self, Error> {
        let vertices = match self.geom.ty.tag {
            TypeTag::A => self.complete_linear(rng)?,
            _ => self.complete_isometric(rng)?,
        };
        let f = PeriodicFlag { geom: self.geom, side: self.side, vertices };
        debug_assert!(self.is_face_of(&f));
        Ok(f)
    }

    fn complete_linear<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<BTreeMap<usize, Lattice<F>>, Error> {
        let g = &self.geom;
        let n = g.ty.n;
        let mut v = self.vertices.clone();
        if v.is_empty() {
            v.insert(0, g.standard());
        }
        let types: Vec<usize> = v.keys().copied().collect();
        let mut new = Vec::new();
        for (i, &s) in types.iter().enumerate() {
            let (next, mut lo) = match types.get(i + 1) {
                Some(&t) => (t, v[&t].clone()),
                None => (types[0] + n, v[&types[0]].shift_apply(1)),
            };
            let hi = &v[&s];
            for _ in s + 1..next {
                lo = Lattice::random_step(&lo, hi, rng)?;
                new.push(g.classify(&lo).unwrap());
            }
        }
        v.extend(new);
        Ok(v)
    }

    fn complete_isometric<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<BTreeMap<usize, Lattice<F>>, Error> {
        let g = &self.geom;
        let n = g.ty.n;
        let tag = g.ty.tag;
        let v = &self.vertices;
        let mut h: BTreeMap<usize, Lattice<F>> = BTreeMap::new();
        for (&t, l) in v {
            let linear = match tag {
                TypeTag::C => true,
                TypeTag::B => t >= 2,
                _ => (2..=n - 2).contains(&t),
            };
            if linear {
                h.insert(t, l.clone());
            }
        }
        if tag != TypeTag::C {
            match (v.get(&0), v.get(&1)) {
                (Some(a), Some(b)) => {
                    h.insert(0, a.clone());
                    h.insert(1, a.intersect(b)?);
                }
                (Some(a), None) | (None, Some(a)) => {
                    h.insert(0, a.clone());
                }
                _ => {}
            }
        }
        if tag == TypeTag::D {
            match (v.get(&(n - 1)), v.get(&n)) {
                (Some(a), Some(b)) => {
                    h.insert(n, b.clone());
                    h.insert(n - 1, a.sum(b)?);
                }
                (Some(a), None) | (None, Some(a)) => {
                    h.insert(n, a.clone());
                }
                _ => {}
            }
        }
        if h.is_empty() {
            h.insert(0, g.standard());
        }
        // bottom: grow the largest lattice until M^perp = zM
        let p = *h.keys().next().unwrap();
        let mut cur = h[&p].clone();
        for pos in (0..p).rev() {
            let hi = g.perp(&cur).shift_apply(-1);
            cur = random_step_where(&cur, &hi, |m| m.shift_apply(1).is_sublattice_of(&g.perp(m)), rng)?;
            h.insert(pos, cur.clone());
        }
        // top: grow the complement of the smallest lattice while isotropic
        let top = *h.keys().next_back().unwrap();
        let mut iso = g.perp(&h[&top]);
        for pos in top + 1..=n {
            let hi = g.perp(&iso);
            iso = random_step_where(&iso, &hi, |m| m.is_sublattice_of(&g.perp(m)), rng)?;
            h.insert(pos, g.perp(&iso));
        }
        // linear gaps
        let keys: Vec<usize> = h.keys().copied().collect();
        for w in keys.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mut cur = h[&b].clone();
            for pos in (a + 1..b).rev() {
                cur = Lattice::random_step(&cur, &h[&a], rng)?;
                h.insert(pos, cur);
                cur = h[&pos].clone();
            }
        }
        let mut out = BTreeMap::new();
        let lin = match tag {
            TypeTag::C => 0..n + 1,
            TypeTag::B => 2..n + 1,
            _ => 2..n - 1,
        };
        for t in lin {
            out.insert(t, h[&t].clone());
        }
        let mut slots = Vec::new();
        if tag != TypeTag::C {
            slots.extend(g.shifted_dual_over(&h[&1]));
        }
        if tag == TypeTag::D {
            slots.extend(g.self_dual_over(&g.perp(&h[&(n - 1)])));
        }
        for m in slots {
            let (t, rep) = g.classify(&m).ok_or_else(|| Error::VariantConstraintViolated("slot is not a vertex".into()))?;
            out.insert(t, rep);
        }
        if out.len() != g.num_types() {
            return Err(Error::OriflammeConstraintViolated("completion did not produce both slots".into()));
        }
        for (t, l) in v {
            debug_assert_eq!(&out[t], l);
        }
        Ok(out)
    }

    /// Vertex type changed by generator `s` on this flag's side. The
    /// negative building is typed through the mirror, which only matters
    /// for type A.
    pub fn stored_type(&self, s: usize) -> usize {
        match self.side {
            Side::Positive => s,
            Side::Negative => AffineWeylElement::mirrored_generator(self.geom.ty, s),
        }
    }

    fn panel_shape(&self, t: usize) -> PanelShape<F> {
        let g = &self.geom;
        let n = g.ty.n;
        let chain = self.chain();
        let at = |k: i64| g.chain_at(&chain, k);
        let gap = |k: i64| PanelShape::Gap { up: at(k - 1), lo: at(k + 1), dual: false };
        match g.ty.tag {
            TypeTag::A | TypeTag::C => gap(t as i64),
            TypeTag::B | TypeTag::D if t <= 1 => {
                PanelShape::Slot { fixed: self.vertices[&(1 - t)].clone(), lo: at(2), top: false }
            }
            TypeTag::D if t + 1 >= n => {
                PanelShape::Slot { fixed: self.vertices[&g.twin(t).unwrap()].clone(), lo: at(n as i64 + 2), top: true }
            }
            TypeTag::B if t == n => PanelShape::Gap { up: at(n as i64 - 1), lo: at(n as i64 + 2), dual: true },
            _ => gap(t as i64),
        }
    }

    fn slots_over(&self, k: &Lattice<F>, top: bool) -> Vec<Lattice<F>> {
        if top {
            self.geom.self_dual_over(k)
        } else {
            self.geom.shifted_dual_over(k)
        }
    }

    fn replace_vertex(&self, t: usize, m: &Lattice<F>) -> Result<Self, Error> {
        match self.geom.classify(m) {
            Some((u, rep)) if u == t => Ok(self.with_vertex(t, rep)),
            _ => Err(Error::VariantConstraintViolated(format!("panel candidate is not a vertex of type {t}"))),
        }
    }

    /// Chambers sharing the panel of this chamber that misses the vertex
    /// changed by generator `s`, this chamber included.
    pub fn panel_residue(&self, s: usize) -> Result<Vec<Self>, Error> {
        let t = self.stored_type(s);
        let mut out = Vec::new();
        match self.panel_shape(t) {
            PanelShape::Gap { up, lo, dual } => {
                for m in Lattice::between(&lo, &up, 1)? {
                    let m = if dual {
                        let p = self.geom.perp(&m);
                        if !m.is_sublattice_of(&p) {
                            continue;
                        }
                        p
                    } else {
                        m
                    };
                    out.push(self.replace_vertex(t, &m)?);
                }
            }
            PanelShape::Slot { fixed, lo, top } => {
                for k in Lattice::between(&lo, &fixed, 1)? {
                    for m in self.slots_over(&k, top) {
                        if m != fixed {
                            out.push(self.replace_vertex(t, &m)?);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// The chamber of the `s`-panel residue nearest to `target`.
    pub fn project(&self, s: usize, target: &Self) -> Result<Self, Error> {
        let t = self.stored_type(s);
        let tc = target.chain();
        let g = &self.geom;
        let nearest = |x: &Lattice<F>, lo: &Lattice<F>| -> Result<Lattice<F>, Error> {
            let meets = |j: i64| !x.intersect(&g.chain_at(&tc, j)).unwrap().is_sublattice_of(lo);
            let j = last_true(meets);
            lo.sum(&x.intersect(&g.chain_at(&tc, j))?)
        };
        match self.panel_shape(t) {
            PanelShape::Gap { up, lo, dual } => {
                let k = nearest(&up, &lo)?;
                let m = if dual { g.perp(&k) } else { k };
                self.replace_vertex(t, &m)
            }
            PanelShape::Slot { fixed, lo, top } => {
                let k = nearest(&fixed, &lo)?;
                let m = self
                    .slots_over(&k, top)
                    .into_iter()
                    .find(|m| *m != fixed)
                    .ok_or_else(|| Error::OriflammeConstraintViolated("no second slot".into()))?;
                self.replace_vertex(t, &m)
            }
        }
    }

    /// Weyl distance to another chamber of the same side, read off the
    /// intersection dimensions of the two chains.
    pub fn weyl_distance(&self, o: &Self) -> Result<AffineWeylElement, Error> {
        if self.side != o.side {
            return Err(Error::SideMismatch("distance across sides".into()));
        }
        if self.geom != o.geom {
            return Err(Error::TypeMismatch(format!("{:?} vs {:?}", self.geom.ty, o.geom.ty)));
        }
        let g = &self.geom;
        let (a, b) = (self.chain(), o.chain());
        let r = g.period() as i64;
        // tau(k) = largest j with W_k meeting W'_j outside W_(k+1)
        let tau: Vec<i64> = (0..r)
            .map(|k| {
                let (wk, wk1) = (g.chain_at(&a, k), g.chain_at(&a, k + 1));
                last_true(|j| !wk.intersect(&g.chain_at(&b, j)).unwrap().is_sublattice_of(&wk1))
            })
            .collect();
        let d = AffineWeylElement::from_window(g.ty, tau)?.inverse();
        Ok(match self.side {
            Side::Positive => d,
            Side::Negative => d.mirrored(),
        })
    }

    /// `g F` for an invertible Laurent matrix preserving the form.
    pub fn group_apply(&self, g: &LaurentMatrix<F>) -> Result<Self, Error> {
        let mut vertices = BTreeMap::new();
        for v in self.vertices.values() {
            let img = v.with_side(self.side).group_apply(g)?.with_side(Side::Positive);
            let (t, rep) = self
                .geom
                .classify(&img)
                .ok_or_else(|| Error::VariantConstraintViolated("image is not a vertex; the matrix does not preserve the form".into()))?;
            vertices.insert(t, rep);
        }
        let f = PeriodicFlag { geom: self.geom, side: self.side, vertices };
        f.check_incidence()?;
        Ok(f)
    }

    /// Whether every member of each flag is squeezed between members of
    /// the other, up to powers of `z`.
    pub fn is_compatible(&self, o: &Self) -> Result<bool, Error> {
        if self.geom.ambient != o.geom.ambient {
            return Err(Error::AmbientMismatch(format!("{:?} vs {:?}", self.geom.ambient, o.geom.ambient)));
        }
        if self.geom != o.geom {
            return Err(Error::TypeMismatch(format!("{:?} vs {:?}", self.geom.ty, o.geom.ty)));
        }
        if self.side != o.side {
            return Err(Error::SideMismatch(format!("{:?} vs {:?}", self.side, o.side)));
        }
        let squeezed = |w: &Lattice<F>, other: &[Lattice<F>]| {
            other.iter().any(|a| {
                let lower = (0..64).map(|m| a.shift_apply(m)).any(|x| x.is_sublattice_of(w));
                let upper = (0..64).map(|m| a.shift_apply(-m)).any(|x| w.is_sublattice_of(&x));
                lower && upper
            })
        };
        let (a, b) = (self.period_members(), o.period_members());
        if a.is_empty() || b.is_empty() {
            return Ok(true);
        }
        Ok(a.iter().all(|w| squeezed(w, &b)) && b.iter().all(|w| squeezed(w, &a)))
    }

    /// `(W_0, images of the members in W_0 / zW_0)`.
    pub fn fiber_decompose(&self) -> Result<FiberDecomposition<F>, Error> {
        let members = self.period_members();
        let w0 = members.first().ok_or_else(|| Error::NotNested("empty flag".into()))?.clone();
        let zw0 = w0.shift_apply(1);
        let mut quotient = Vec::new();
        for m in &members {
            let img = m.intersect(&w0)?.image_in(&zw0, &w0)?;
            if !quotient.contains(&img) {
                quotient.push(img);
            }
        }
        quotient.sort_by_key(|u: &Subspace<F>| std::cmp::Reverse(u.dim()));
        Ok(FiberDecomposition { base: w0.with_side(self.side), quotient })
    }

    /// Inverse of [`fiber_decompose`](Self::fiber_decompose).
    pub fn reconstruct(geom: Geometry<F>, fd: &FiberDecomposition<F>) -> Result<Self, Error> {
        let side = fd.base.side();
        let w0 = fd.base.with_side(Side::Positive);
        let zw0 = w0.shift_apply(1);
        let members = fd
            .quotient
            .iter()
            .map(|u| Lattice::lift_from(&zw0, &w0, u).map(|l| l.with_side(side)))
            .collect::<Result<Vec<_>, _>>()?;
        make_flag(geom, side, &members)
    }

    /// Serialized form.
    pub fn to_json(&self) -> FlagJson {
        let mut items: Vec<(i64, usize, Lattice<F>)> =
            self.vertices.iter().map(|(&t, v)| (v.virtual_dim(), t, v.with_side(self.side))).collect();
        items.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut pairs = Vec::new();
        for (i, a) in items.iter().enumerate() {
            for (j, b) in items.iter().enumerate().skip(i + 1) {
                if self.geom.twin(a.1) == Some(b.1) {
                    pairs.push([i, j]);
                }
            }
        }
        FlagJson {
            schema_version: FLAG_SCHEMA_VERSION,
            variant: self.variant(),
            side: self.side,
            type_k: items.iter().map(|x| x.1).collect::<BTreeSet<_>>().into_iter().collect(),
            subspaces: items.into_iter().map(|x| LatticeJson::from(x.2)).collect(),
            oriflamme_pairs: pairs,
        }
    }

    pub fn from_json(j: &FlagJson) -> Result<Self, Error> {
        if j.schema_version != FLAG_SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema_version {}", j.schema_version)));
        }
        let first = j.subspaces.first().ok_or_else(|| Error::Parse("flag without subspaces".into()))?;
        let geom = Geometry::from_ambient(j.variant, first.rank)?;
        let members = j
            .subspaces
            .iter()
            .map(|l| Lattice::try_from(l.clone()))
            .collect::<Result<Vec<Lattice<F>>, _>>()?;
        if members.iter().any(|m| m.side() != j.side) {
            return Err(Error::SideMismatch("subspace side differs from the flag side".into()));
        }
        let f = make_flag(geom, j.side, &members).map_err(|e| Error::Parse(e.to_string()))?;
        let tk: Vec<usize> = f.type_k().into_iter().collect();
        if tk != j.type_k {
            return Err(Error::Parse(format!("typeK {:?} does not match the subspaces ({tk:?})", j.type_k)));
        }
        Ok(f)
    }
}

/// How the chambers of a panel residue are parametrized.
enum PanelShape<F: Field> {
    /// `lo < M < up` with `dim(up / lo) = 2`; the new vertex is `M`, or
    /// `M^perp` when `dual` (isotropic points of a conic).
    Gap { up: Lattice<F>, lo: Lattice<F>, dual: bool },
    /// `lo < K < fixed`; the new vertex is the other oriflamme slot over `K`.
    Slot { fixed: Lattice<F>, lo: Lattice<F>, top: bool },
}

/// Largest `j` with `p(j)` for a predicate that holds exactly on a
/// half-line bounded above.
pub(crate) fn last_true(mut p: impl FnMut(i64) -> bool) -> i64 {
    let (mut lo, mut hi);
    if p(0) {
        lo = 0;
        let mut step = 1;
        loop {
            if !p(lo + step) {
                hi = lo + step;
                break;
            }
            lo += step;
            step *= 2;
        }
    } else {
        hi = 0;
        let mut step = 1;
        loop {
            if p(hi - step) {
                lo = hi - step;
                break;
            }
            hi -= step;
            step *= 2;
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if p(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

pub const FLAG_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlagJson {
    pub schema_version: u32,
    pub variant: FlagVariant,
    pub side: Side,
    #[serde(rename = "typeK")]
    pub type_k: Vec<usize>,
    pub subspaces: Vec<LatticeJson>,
    pub oriflamme_pairs: Vec<[usize; 2]>,
}

/// A flag seen as a point of `W_0` together with a flag of `W_0 / zW_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberDecomposition<F: Field> {
    pub base: Lattice<F>,
    pub quotient: Vec<Subspace<F>>,
}

fn check_members<F: Field>(geom: &Geometry<F>, side: Side, members: &[Lattice<F>]) -> Result<Vec<Lattice<F>>, Error> {
    members
        .iter()
        .map(|m| {
            if m.ambient() != geom.ambient {
                Err(Error::AmbientMismatch(format!("{:?} vs {:?}", m.ambient(), geom.ambient)))
            } else if m.side() != side {
                Err(Error::SideMismatch(format!("{:?} in a {side:?} flag", m.side())))
            } else {
                Ok(m.with_side(Side::Positive))
            }
        })
        .collect()
}

/// Builds a flag from lattices `W_0 > W_1 > ...` of one period (actual
/// lattices of `side`); oriflamme slots may appear side by side.
pub fn make_flag<F: Field>(geom: Geometry<F>, side: Side, members: &[Lattice<F>]) -> Result<PeriodicFlag<F>, Error> {
    let ms = check_members(&geom, side, members)?;
    for w in ms.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let twins = geom.form.is_some()
            && a.virtual_dim() == b.virtual_dim()
            && a != b
            && a.virtual_dim() - a.intersect(b)?.virtual_dim() == 1;
        if !twins && (!b.is_sublattice_of(a) || a == b) {
            return Err(Error::NotNested("members must strictly decrease".into()));
        }
    }
    if let (Some(first), Some(last)) = (ms.first(), ms.last()) {
        let zf = first.shift_apply(1);
        if ms.len() > 1 && (!zf.is_sublattice_of(last) || &zf == last) {
            return Err(Error::PeriodicityViolated("z W_0 must lie strictly inside the last member".into()));
        }
    }
    collect_vertices(geom, side, &ms)
}

fn collect_vertices<F: Field>(geom: Geometry<F>, side: Side, ms: &[Lattice<F>]) -> Result<PeriodicFlag<F>, Error> {
    let mut vertices: BTreeMap<usize, Lattice<F>> = BTreeMap::new();
    for m in ms {
        let vs = geom
            .vertices_of_member(m)
            .ok_or_else(|| Error::VariantConstraintViolated(format!("member with nu = {} is not a vertex", m.virtual_dim())))?;
        for (t, rep) in vs {
            match vertices.get(&t) {
                Some(old) if *old != rep => {
                    return Err(Error::PeriodicityViolated(format!("two different vertices of type {t} in one period")));
                }
                _ => {
                    vertices.insert(t, rep);
                }
            }
        }
    }
    let f = PeriodicFlag { geom, side, vertices };
    f.check_incidence()?;
    Ok(f)
}

/// Flag of an orthogonal geometry; any failure is reported as an
/// oriflamme constraint.
pub fn oriflamme_make<F: Field>(geom: Geometry<F>, side: Side, members: &[Lattice<F>]) -> Result<PeriodicFlag<F>, Error> {
    if !matches!(geom.ty.tag, TypeTag::B | TypeTag::D) {
        return Err(Error::TypeMismatch(format!("type {} has no oriflamme", geom.ty.tag)));
    }
    make_flag(geom, side, members).map_err(|e| match e {
        Error::AmbientMismatch(_) | Error::SideMismatch(_) => e,
        other => Error::OriflammeConstraintViolated(other.to_string()),
    })
}

/// The flag of all vertices represented by the isotropic lattices and
/// their complements.
pub fn isotropic_complete<F: Field>(geom: Geometry<F>, side: Side, members: &[Lattice<F>]) -> Result<PeriodicFlag<F>, Error> {
    if geom.form.is_none() {
        return Err(Error::TypeMismatch("linear geometry has no form".into()));
    }
    let ms = check_members(&geom, side, members)?;
    for m in &ms {
        if !m.is_sublattice_of(&geom.perp(m)) {
            return Err(Error::NotIsotropic);
        }
    }
    collect_vertices(geom, side, &ms)
}

/// `W <= z^l W' <= z^-1 W` for some `l`.
pub fn incident<F: Field>(w: &Lattice<F>, w2: &Lattice<F>) -> bool {
    if w.ambient() != w2.ambient() || w.side() != w2.side() {
        return false;
    }
    // containments pin nu(z^l W') to [nu(W), nu(W) + R]
    let r = w.ambient().rank() as i64;
    let lo = (w2.virtual_dim() - w.virtual_dim() - r).div_euclid(r);
    let up = w.shift_apply(-1);
    (lo..=lo + 2).any(|l| {
        let x = w2.shift_apply(l);
        w.is_sublattice_of(&x) && x.is_sublattice_of(&up)
    })
}
