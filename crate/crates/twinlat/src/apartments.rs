//! Frames and the apartments they span.
//!
//! A frame is a family of vectors `u_0, ..., u_(R-1)` extended periodically
//! by `U_(dR + j) = z^d u_j`. The positive chamber at `w` has chain
//! `W_k = span{U_w(m) : m >= k}` and the negative chamber at `w` has chain
//! `W_k = span{U_w(m) : m <= R - 1 - k}`; the two chambers at the same `w`
//! are opposite.

use crate::error::Error;
use crate::field::Field;
use crate::flags::{FlagVariant, Geometry, PeriodicFlag};
use crate::laurent::{LaurentMatrix, LaurentPoly, LaurentVector, PeriodicSubspace, Side};
use crate::weyl::{AffineWeylElement, TypeTag};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

type Lattice<F> = PeriodicSubspace<F>;

/// The set `finite ∪ [hi, ∞)` of frame positions, `finite` below `hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PosSet {
    hi: i64,
    finite: BTreeSet<i64>,
}

impl PosSet {
    pub fn new(hi: i64, finite: impl IntoIterator<Item = i64>) -> Self {
        let mut s = PosSet { hi, finite: finite.into_iter().filter(|&l| l < hi).collect() };
        while s.finite.remove(&(s.hi - 1)) {
            s.hi -= 1;
        }
        s
    }

    /// Positions of the standard vertex of type `t`.
    pub fn template<F: Field>(geom: &Geometry<F>, t: usize) -> Self {
        let (hi, extra) = geom.template(t);
        Self::new(hi, extra)
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn finite(&self) -> &BTreeSet<i64> {
        &self.finite
    }

    pub fn contains(&self, l: i64) -> bool {
        l >= self.hi || self.finite.contains(&l)
    }

    pub fn min(&self) -> i64 {
        self.finite.iter().next().copied().unwrap_or(self.hi)
    }

    pub fn shift(&self, m: i64) -> Self {
        PosSet { hi: self.hi + m, finite: self.finite.iter().map(|l| l + m).collect() }
    }

    /// `w(S)`.
    pub fn apply(&self, w: &AffineWeylElement) -> Self {
        let r = w.period() as i64;
        let spread = (0..r).map(|l| (w.apply(l) - l).abs()).max().unwrap_or(0);
        let hi = self.hi + spread;
        let moved = self
            .finite
            .iter()
            .copied()
            .chain(self.hi..self.hi + 2 * spread + 1)
            .map(|l| w.apply(l))
            .filter(|&l| l < hi);
        Self::new(hi, moved)
    }

    /// Virtual dimension of the span of the frame lines at these positions.
    pub fn nu(&self) -> i64 {
        let neg = self.finite.range(..0).count() as i64 + (-self.hi).max(0);
        let present = self.finite.range(0..).count() as i64;
        neg - (self.hi.max(0) - present)
    }

    fn minus(&self, o: &Self) -> Vec<i64> {
        (self.min()..self.hi.max(o.hi)).filter(|&l| self.contains(l) && !o.contains(l)).collect()
    }
}

/// Frame lines in the stored coordinates of one side.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Lines<F: Field> {
    u: Vec<LaurentVector<F>>,
    min_deg: Vec<i64>,
    coordinate: bool,
}

impl<F: Field> Lines<F> {
    fn new(u: Vec<LaurentVector<F>>, coordinate: bool) -> Self {
        let min_deg = u.iter().map(|v| v.min_degree().unwrap_or(0)).collect();
        Lines { u, min_deg, coordinate }
    }

    fn line(&self, l: i64) -> LaurentVector<F> {
        let r = self.u.len() as i64;
        self.u[l.rem_euclid(r) as usize].shift(l.div_euclid(r))
    }

    fn span(&self, geom: &Geometry<F>, s: &PosSet) -> Lattice<F> {
        if self.coordinate {
            let finite: Vec<i64> = s.finite.iter().copied().collect();
            return geom.coordinate_lattice(s.hi, &finite);
        }
        let r = self.u.len() as i64;
        let low = s.min();
        let mind = *self.min_deg.iter().min().unwrap();
        let e0 = 1.max(-(low.div_euclid(r) + mind)) as usize;
        Lattice::span_until(geom.ambient(), Side::Positive, e0, s.nu(), |e| {
            let mut gens = Vec::new();
            for (j, u) in self.u.iter().enumerate() {
                for d in low.div_euclid(r)..e as i64 - self.min_deg[j] {
                    let l = d * r + j as i64;
                    if l >= low && s.contains(l) {
                        gens.push(u.shift(d));
                    }
                }
            }
            gens
        })
    }

    /// Positions of the lines in `x`, if `x` is their span.
    fn positions(&self, geom: &Geometry<F>, x: &Lattice<F>) -> Option<PosSet> {
        let r = self.u.len() as i64;
        let k = x.window_exp() as i64;
        let member = |l: i64| {
            let j = l.rem_euclid(r) as usize;
            let d = l.div_euclid(r) + self.min_deg[j];
            if d >= k {
                true
            } else if d < -k {
                false
            } else {
                x.contains(&self.line(l))
            }
        };
        let top = (0..r as usize).map(|j| (k - self.min_deg[j] + 1) * r).max().unwrap();
        let bottom = (0..r as usize).map(|j| (-k - self.min_deg[j]) * r).min().unwrap();
        let mut hi = top;
        while hi > bottom && member(hi - 1) {
            hi -= 1;
        }
        let s = PosSet::new(hi, (bottom..hi).filter(|&l| member(l)));
        (self.span(geom, &s) == *x).then_some(s)
    }
}

/// A frame: `R` vectors whose periodic extension is an `F`-basis of the
/// module, paired like the coordinate basis in the isometric types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame<F: Field> {
    geom: Geometry<F>,
    pos: Lines<F>,
    neg: Lines<F>,
}

pub const FRAME_SCHEMA_VERSION: u32 = 1;

/// Serialized frame: each line as `[degree, index, coefficient]` terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameJson {
    pub schema_version: u32,
    pub variant: FlagVariant,
    pub rank: usize,
    pub q: u32,
    pub lines: Vec<Vec<[i64; 3]>>,
}

fn mirror_lines<F: Field>(u: &[LaurentVector<F>]) -> Vec<LaurentVector<F>> {
    let r = u.len();
    (0..r).map(|j| u[r - 1 - j].mirror(r)).collect()
}

impl<F: Field> Frame<F> {
    /// The coordinate frame; its base chambers are the standard chambers.
    pub fn standard(geom: Geometry<F>) -> Self {
        let r = geom.period();
        let u: Vec<_> = (0..r).map(|j| LaurentVector::basis(0, j)).collect();
        Frame { geom, pos: Lines::new(u.clone(), true), neg: Lines::new(u, true) }
    }

    /// Validates and wraps frame vectors given in actual coordinates.
    pub fn new(geom: Geometry<F>, u: Vec<LaurentVector<F>>) -> Result<Self, Error> {
        let r = geom.period();
        if u.len() != r || u.iter().any(|v| v.is_zero() || v.terms().any(|(_, i, _)| i >= r)) {
            return Err(Error::AmbientMismatch(format!("a frame needs {r} nonzero vectors of rank {r}")));
        }
        let mut entries = vec![LaurentPoly::zero(); r * r];
        for (j, v) in u.iter().enumerate() {
            for (d, i, c) in v.terms() {
                entries[i * r + j] = entries[i * r + j].add(&LaurentPoly::monomial(c, d));
            }
        }
        match LaurentMatrix::new(r, entries).det_order() {
            None => return Err(Error::NotInvertible),
            Some(0) => {}
            Some(m) => {
                return Err(Error::VariantConstraintViolated(format!("frame determinant has order {m}, not 0")));
            }
        }
        if let Some(form) = geom.form() {
            for i in 0..r {
                for j in i..r {
                    let p = form.laurent_pairing(&u[i], &u[j]);
                    let ok = if i + j + 1 == r {
                        p.as_unit().is_some_and(|(_, m)| m == 0)
                    } else {
                        p.is_zero()
                    };
                    if !ok {
                        return Err(Error::VariantConstraintViolated(format!(
                            "frame vectors {i} and {j} are not paired like a hyperbolic basis"
                        )));
                    }
                }
            }
        }
        let coordinate = u.iter().enumerate().all(|(j, v)| *v == LaurentVector::basis(0, j));
        let neg = mirror_lines(&u);
        Ok(Frame { geom, pos: Lines::new(u, coordinate), neg: Lines::new(neg, coordinate) })
    }

    pub fn geometry(&self) -> &Geometry<F> {
        &self.geom
    }

    /// The vectors `u_0, ..., u_(R-1)` in actual coordinates.
    pub fn vectors(&self) -> &[LaurentVector<F>] {
        &self.pos.u
    }

    /// `U_l`.
    pub fn line(&self, l: i64) -> LaurentVector<F> {
        self.pos.line(l)
    }

    pub fn is_standard(&self) -> bool {
        self.pos.coordinate
    }

    fn lines(&self, side: Side) -> &Lines<F> {
        match side {
            Side::Positive => &self.pos,
            Side::Negative => &self.neg,
        }
    }

    fn stored_w(side: Side, w: &AffineWeylElement) -> AffineWeylElement {
        match side {
            Side::Positive => w.clone(),
            Side::Negative => w.mirrored(),
        }
    }

    fn check_type(&self, w: &AffineWeylElement) -> Result<(), Error> {
        if w.coxeter_type() != self.geom.ty() {
            return Err(Error::TypeMismatch(format!("{:?} on a frame of {:?}", w.coxeter_type(), self.geom.ty())));
        }
        Ok(())
    }

    /// Stored-view lattice spanned by the lines at `s`.
    pub fn span(&self, side: Side, s: &PosSet) -> Lattice<F> {
        self.lines(side).span(&self.geom, s)
    }

    /// Positions of a stored-view lattice, if it is spanned by frame lines.
    pub fn positions(&self, side: Side, x: &Lattice<F>) -> Option<PosSet> {
        self.lines(side).positions(&self.geom, x)
    }

    /// The chamber of the apartment on `side` indexed by `w`.
    pub fn chamber_at(&self, side: Side, w: &AffineWeylElement) -> Result<PeriodicFlag<F>, Error> {
        self.check_type(w)?;
        let ws = Self::stored_w(side, w);
        let vertices: BTreeMap<usize, Lattice<F>> = (0..self.geom.num_types())
            .map(|t| (t, self.span(side, &PosSet::template(&self.geom, t).apply(&ws))))
            .collect();
        Ok(PeriodicFlag::from_vertices_unchecked(self.geom, side, vertices))
    }

    /// Chambers indexed by the elements of length at most `radius`.
    pub fn apartment_chambers(&self, side: Side, radius: usize) -> Vec<PeriodicFlag<F>> {
        AffineWeylElement::ball(self.geom.ty(), radius)
            .iter()
            .map(|w| self.chamber_at(side, w).expect("same type"))
            .collect()
    }

    /// Whether every vertex of the flag is spanned by frame lines.
    pub fn is_subjacent(&self, f: &PeriodicFlag<F>) -> bool {
        f.geometry() == &self.geom && f.vertices().values().all(|v| self.positions(f.side(), v).is_some())
    }

    /// Index of a chamber in this apartment.
    pub fn position(&self, c: &PeriodicFlag<F>) -> Option<AffineWeylElement> {
        if c.geometry() != &self.geom || !c.is_chamber() {
            return None;
        }
        let r = self.geom.period() as i64;
        let sets: Vec<PosSet> = c.chain().iter().map(|m| self.positions(c.side(), m)).collect::<Option<_>>()?;
        let mut window = Vec::with_capacity(r as usize);
        for k in 0..r as usize {
            let next = if k + 1 < r as usize { sets[k + 1].clone() } else { sets[0].shift(r) };
            match sets[k].minus(&next)[..] {
                [l] => window.push(l),
                _ => return None,
            }
        }
        let w = AffineWeylElement::from_window(self.geom.ty(), window).ok()?;
        Some(Self::stored_w(c.side(), &w))
    }

    /// `w` applied to a flag of this apartment through the positions of
    /// its vertices.
    pub fn act_on_flag(&self, w: &AffineWeylElement, f: &PeriodicFlag<F>) -> Result<PeriodicFlag<F>, Error> {
        self.check_type(w)?;
        let ws = Self::stored_w(f.side(), w);
        let mut vertices = BTreeMap::new();
        for (&t, v) in f.vertices() {
            let s = self.positions(f.side(), v).ok_or(Error::NotSubjacent)?;
            let img = self.span(f.side(), &s.apply(&ws));
            match self.geom.classify(&img) {
                Some((u, rep)) if u == t => {
                    vertices.insert(t, rep);
                }
                _ => return Err(Error::VariantConstraintViolated(format!("image of the type-{t} vertex changed type"))),
            }
        }
        PeriodicFlag::from_vertices(self.geom, f.side(), vertices)
    }

    /// The frame with lines `U'_l = U_w(l)`.
    pub fn act_on_frame(&self, w: &AffineWeylElement) -> Result<Self, Error> {
        self.check_type(w)?;
        let r = self.geom.period() as i64;
        Self::new(self.geom, (0..r).map(|j| self.line(w.apply(j))).collect())
    }

    pub fn to_json(&self) -> FrameJson {
        FrameJson {
            schema_version: FRAME_SCHEMA_VERSION,
            variant: self.geom.variant(),
            rank: self.geom.period(),
            q: F::MODULUS,
            lines: self
                .pos
                .u
                .iter()
                .map(|v| v.terms().map(|(d, i, c)| [d, i as i64, c.value() as i64]).collect())
                .collect(),
        }
    }

    pub fn from_json(j: &FrameJson) -> Result<Self, Error> {
        if j.schema_version != FRAME_SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema_version {}", j.schema_version)));
        }
        if j.q != F::MODULUS {
            return Err(Error::Parse(format!("frame over F_{} read as F_{}", j.q, F::MODULUS)));
        }
        let geom = Geometry::from_ambient(j.variant, j.rank)?;
        let mut u = Vec::new();
        for line in &j.lines {
            let mut v = LaurentVector::zero();
            for &[d, i, c] in line {
                if i < 0 || i as usize >= j.rank || c < 0 || c >= j.q as i64 {
                    return Err(Error::Parse(format!("bad frame term [{d}, {i}, {c}]")));
                }
                v.add_term(d, i as usize, F::from_i64(c));
            }
            u.push(v);
        }
        Self::new(geom, u)
    }
}

/// A frame containing two chambers, with a gallery between them.
#[derive(Clone, Debug)]
pub struct CommonApartment<F: Field> {
    pub frame: Frame<F>,
    /// Minimal gallery from the first chamber to the second.
    pub gallery: Vec<PeriodicFlag<F>>,
}

/// Frame being reshaped along a gallery, in stored coordinates.
struct Walker<F: Field> {
    geom: Geometry<F>,
    lines: Lines<F>,
    w: AffineWeylElement,
    x: PeriodicFlag<F>,
}

impl<F: Field> Walker<F> {
    fn pairing(&self, a: i64, b: i64) -> F {
        self.geom.form().unwrap().eval(&self.lines.line(a), &self.lines.line(b))
    }

    /// Frame after `U_x += sum c U_y` for each `(x, [(c, y)])`, all read
    /// from the current frame.
    fn updated(&self, moves: &[(i64, Vec<(F, i64)>)]) -> Lines<F> {
        let r = self.lines.u.len() as i64;
        let mut u = self.lines.u.clone();
        for (x, adds) in moves {
            let j = x.rem_euclid(r) as usize;
            for (c, y) in adds {
                u[j] = u[j].add(&self.lines.line(*y).shift(-x.div_euclid(r)).scale(*c));
            }
        }
        Lines::new(u, false)
    }

    /// Moves one step to the neighbour `y` across the `s`-panel of the
    /// current chamber, using the root group of that panel's wall.
    fn step(&mut self, s: usize, y: PeriodicFlag<F>) -> Result<(), Error> {
        let ty = self.geom.ty();
        let c = ty.mirror_center();
        let pairs = AffineWeylElement::generator_swaps(ty, s)?;
        let (b, a) = (self.w.apply(pairs[0].0), self.w.apply(pairs[0].1));
        let ws = self.w.compose(&AffineWeylElement::generator(ty, s)?)?;
        let target_set = PosSet::template(&self.geom, s).apply(&ws);
        let target = &y.vertices()[&s];
        let two = F::one() + F::one();
        for k in F::elements() {
            let moves = if ty.tag == TypeTag::B && s == ty.n {
                let m = self.w.apply(ty.n as i64);
                let (eps, eta) = (self.pairing(b, a), self.pairing(m, m));
                let mu = -(k * k * eta) / (two * eps);
                let nu = -(k * eta) / eps;
                vec![(b, vec![(k, m), (mu, a)]), (m, vec![(nu, a)])]
            } else if pairs.len() == 2 {
                let kk = -(k * self.pairing(a, c - a)) / self.pairing(b, c - b);
                vec![(b, vec![(k, a)]), (c - a, vec![(kk, c - b)])]
            } else {
                vec![(b, vec![(k, a)])]
            };
            let lines = if k.is_zero() { self.lines.clone() } else { self.updated(&moves) };
            if lines.span(&self.geom, &target_set) == *target {
                self.lines = lines;
                self.w = ws;
                self.x = y;
                return Ok(());
            }
        }
        Err(Error::NotSubjacent)
    }

    fn walk_to(&mut self, target: &PeriodicFlag<F>, gallery: Option<&mut Vec<PeriodicFlag<F>>>) -> Result<(), Error> {
        let word = self.x.weyl_distance(target)?.reduced_word();
        let mut g = gallery;
        for s in word {
            let y = self.x.project(s, target)?;
            self.step(s, y)?;
            if let Some(g) = g.as_mut() {
                g.push(self.x.clone());
            }
        }
        if self.x != *target {
            return Err(Error::NotSubjacent);
        }
        Ok(())
    }
}

/// A frame whose apartment contains both flags.
///
/// Starting from the coordinate frame, the frame is moved by root group
/// elements along a minimal gallery from the standard chamber to `f1` and
/// then from `f1` to `f2`; each element fixes the half-apartment behind the
/// current chamber, so chambers already reached stay in the apartment.
/// Partial flags are first completed to chambers.
pub fn common_apartment<F: Field>(f1: &PeriodicFlag<F>, f2: &PeriodicFlag<F>) -> Result<CommonApartment<F>, Error> {
    let geom = *f1.geometry();
    if f2.geometry() != &geom {
        return Err(Error::TypeMismatch(format!("{:?} vs {:?}", geom.ty(), f2.geometry().ty())));
    }
    let side = f1.side();
    if f2.side() != side {
        return Err(Error::SideMismatch("flags on different sides".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let c = if f1.is_chamber() { f1.clone() } else { f1.complete(&mut rng)? };
    let d = if f2.is_chamber() { f2.clone() } else { f2.complete(&mut rng)? };
    let std = Frame::standard(geom);
    let mut walker = Walker {
        geom,
        lines: std.pos.clone(),
        w: AffineWeylElement::identity(geom.ty()),
        x: PeriodicFlag::standard(geom, Side::Positive),
    };
    walker.walk_to(&c.relabeled(Side::Positive), None)?;
    let mut gallery = vec![walker.x.clone()];
    walker.walk_to(&d.relabeled(Side::Positive), Some(&mut gallery))?;
    let u = match side {
        Side::Positive => walker.lines.u,
        Side::Negative => mirror_lines(&walker.lines.u),
    };
    let frame = Frame::new(geom, u)?;
    if !frame.is_subjacent(f1) || !frame.is_subjacent(f2) {
        return Err(Error::NotSubjacent);
    }
    let gallery = gallery.into_iter().map(|x| x.relabeled(side)).collect();
    Ok(CommonApartment { frame, gallery })
}

/// The type-preserving isomorphism between two apartments that fixes a
/// chamber they share: `chamber_at(source, w) -> chamber_at(target, g w)`.
#[derive(Clone, Debug)]
pub struct ApartmentIsomorphism<F: Field> {
    pub source: Frame<F>,
    pub target: Frame<F>,
    pub side: Side,
    pub g: AffineWeylElement,
    source_base: AffineWeylElement,
}

/// The isomorphism fixing the shared chamber `base`.
pub fn apartment_isomorphism<F: Field>(
    source: &Frame<F>,
    target: &Frame<F>,
    base: &PeriodicFlag<F>,
) -> Result<ApartmentIsomorphism<F>, Error> {
    if !base.is_chamber() {
        return Err(Error::TypeMismatch("the shared flag must be a chamber".into()));
    }
    let w1 = source.position(base).ok_or(Error::NotSubjacent)?;
    let w2 = target.position(base).ok_or(Error::NotSubjacent)?;
    let g = w2.compose(&w1.inverse())?;
    Ok(ApartmentIsomorphism { source: source.clone(), target: target.clone(), side: base.side(), g, source_base: w1 })
}

impl<F: Field> ApartmentIsomorphism<F> {
    /// Image of the source chamber at `w`.
    pub fn map_chamber(&self, w: &AffineWeylElement) -> Result<PeriodicFlag<F>, Error> {
        self.target.chamber_at(self.side, &self.g.compose(w)?)
    }

    /// Index of the target line that source line `l` goes to.
    pub fn map_line(&self, l: i64) -> i64 {
        match self.side {
            Side::Positive => self.g.apply(l),
            Side::Negative => self.g.mirrored().apply(l),
        }
    }

    /// Checks that every source chamber within `radius` of the base that
    /// also lies in the target is fixed. Returns how many were shared.
    pub fn check_fixes_intersection(&self, radius: usize) -> Result<usize, Error> {
        let mut shared = 0;
        for v in AffineWeylElement::ball(self.g.coxeter_type(), radius) {
            let w = self.source_base.compose(&v)?;
            let c = self.source.chamber_at(self.side, &w)?;
            if let Some(p) = self.target.position(&c) {
                if p != self.g.compose(&w)? {
                    return Err(Error::NotCompatible(format!("shared chamber at {w} is moved")));
                }
                shared += 1;
            }
        }
        Ok(shared)
    }
}

/// Outcome of counting apartment chambers on the panels of a ball.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThinnessReport {
    pub chambers: usize,
    pub panels: usize,
    pub failures: Vec<String>,
}

/// For each chamber within `radius` of the base and each of its panels,
/// counts the chambers of the panel residue that lie in the apartment.
pub fn thinness_check<F: Field>(frame: &Frame<F>, side: Side, radius: usize) -> Result<ThinnessReport, Error> {
    let ty = frame.geometry().ty();
    let ball = AffineWeylElement::ball(ty, radius);
    let mut failures = Vec::new();
    let mut seen = BTreeSet::new();
    let mut panels = 0;
    for w in &ball {
        let c = frame.chamber_at(side, w)?;
        if !seen.insert(c.to_json().subspaces.iter().map(|l| format!("{l:?}")).collect::<Vec<_>>()) {
            failures.push(format!("chamber at {w} repeats"));
        }
        for s in 0..ty.num_generators() {
            let t = c.stored_type(s);
            let res = c.panel_residue(s)?;
            let inside: Vec<_> = res.iter().filter(|x| frame.positions(side, &x.vertices()[&t]).is_some()).collect();
            panels += 1;
            let neighbour = frame.chamber_at(side, &w.compose(&AffineWeylElement::generator(ty, s)?)?)?;
            if inside.len() != 2 || !inside.contains(&&c) || !inside.contains(&&neighbour) {
                failures.push(format!("panel {s} of the chamber at {w} lies in {} apartment chambers", inside.len()));
            }
        }
    }
    Ok(ThinnessReport { chambers: ball.len(), panels, failures })
}

/// Undirected graph in DOT syntax; edges are `(a, b, label)`.
pub fn to_dot(name: &str, labels: &[String], edges: &[(usize, usize, usize)]) -> String {
    let mut out = format!("graph {name} {{\n");
    for (i, l) in labels.iter().enumerate() {
        let _ = writeln!(out, "  c{i} [label=\"{l}\"];");
    }
    for (a, b, s) in edges {
        let _ = writeln!(out, "  c{a} -- c{b} [label=\"{s}\"];");
    }
    out.push_str("}\n");
    out
}

/// Chamber graph of the apartment ball of the given radius, nodes labelled
/// by reduced words and edges by the generator crossed.
pub fn apartment_dot<F: Field>(frame: &Frame<F>, radius: usize) -> String {
    let ty = frame.geometry().ty();
    let ball = AffineWeylElement::ball(ty, radius);
    let index: BTreeMap<&AffineWeylElement, usize> = ball.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut edges = Vec::new();
    for (i, w) in ball.iter().enumerate() {
        for s in 0..ty.num_generators() {
            let ws = w.compose(&AffineWeylElement::generator(ty, s).unwrap()).unwrap();
            if let Some(&j) = index.get(&ws) {
                if i < j {
                    edges.push((i, j, s));
                }
            }
        }
    }
    let labels: Vec<String> = ball
        .iter()
        .map(|w| if w.is_identity() { "e".to_string() } else { w.word_string() })
        .collect();
    to_dot("apartment", &labels, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use crate::weyl::CoxeterType;
    use rand::Rng;

    type F2 = Fp<2>;
    type F3 = Fp<3>;

    fn geom<F: Field>(tag: TypeTag, n: usize) -> Geometry<F> {
        Geometry::new(CoxeterType::new(tag, n).unwrap()).unwrap()
    }

    fn all_geoms() -> Vec<Geometry<F3>> {
        vec![
            geom(TypeTag::A, 2),
            geom(TypeTag::A, 3),
            geom(TypeTag::C, 2),
            geom(TypeTag::C, 3),
            geom(TypeTag::B, 3),
            geom(TypeTag::D, 4),
        ]
    }

    fn random_chamber<F: Field>(g: Geometry<F>, side: Side, steps: usize, rng: &mut ChaCha8Rng) -> PeriodicFlag<F> {
        let mut c = PeriodicFlag::standard(g, side);
        for _ in 0..steps {
            let s = rng.gen_range(0..g.num_types());
            let res = c.panel_residue(s).unwrap();
            c = res[rng.gen_range(0..res.len())].clone();
        }
        c
    }

    #[test]
    fn position_sets() {
        let s = PosSet::new(3, [1, 2, -4]);
        assert_eq!(s, PosSet::new(1, [-4]));
        assert_eq!(PosSet::new(0, []).nu(), 0);
        assert_eq!(PosSet::new(2, []).nu(), -2);
        assert_eq!(PosSet::new(1, [-1]).nu(), 0);
        assert_eq!(PosSet::new(-3, []).nu(), 3);
        let ty = CoxeterType::new(TypeTag::A, 2).unwrap();
        let w = AffineWeylElement::from_word(ty, &[0, 1]).unwrap();
        let t = PosSet::new(0, []).apply(&w);
        assert_eq!(t.nu(), 0);
        assert_eq!(t.apply(&w.inverse()), PosSet::new(0, []));
    }

    #[test]
    fn standard_frame_base_chambers() {
        for g in all_geoms() {
            let f = Frame::standard(g);
            assert_eq!(Frame::new(g, f.vectors().to_vec()).unwrap(), f);
            for side in [Side::Positive, Side::Negative] {
                let id = AffineWeylElement::identity(g.ty());
                assert_eq!(f.chamber_at(side, &id).unwrap(), PeriodicFlag::standard(g, side));
            }
        }
    }

    #[test]
    fn chamber_positions_and_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in all_geoms() {
            let f = Frame::standard(g);
            for side in [Side::Positive, Side::Negative] {
                let base = PeriodicFlag::standard(g, side);
                for _ in 0..6 {
                    let w = AffineWeylElement::random(g.ty(), 5, &mut rng);
                    let c = f.chamber_at(side, &w).unwrap();
                    PeriodicFlag::from_vertices(g, side, c.vertices().clone()).unwrap();
                    assert_eq!(f.position(&c), Some(w.clone()));
                    assert_eq!(base.weyl_distance(&c).unwrap(), w, "{:?} {side:?}", g.ty());
                }
                for s in 0..g.num_types() {
                    let a = AffineWeylElement::generator(g.ty(), s).unwrap();
                    let c = f.chamber_at(side, &a).unwrap();
                    assert!(base.without(c.stored_type(s)).is_face_of(&c));
                    assert_ne!(c, base);
                }
            }
        }
    }

    #[test]
    fn subjacency() {
        let g = geom::<F2>(TypeTag::A, 2);
        let f = Frame::standard(g);
        let std = PeriodicFlag::standard(g, Side::Positive);
        assert!(f.is_subjacent(&std));
        // span{e_0 + e_1} + zH+
        let h = g.standard();
        let zh = h.shift_apply(1);
        let line = PeriodicSubspace::between(&zh, &h, 1)
            .unwrap()
            .into_iter()
            .find(|m| f.positions(Side::Positive, m).is_none())
            .unwrap();
        let flag = crate::flags::make_flag(g, Side::Positive, &[line]).unwrap();
        assert!(!f.is_subjacent(&flag));
    }

    #[test]
    fn weyl_action_on_flags() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for g in all_geoms() {
            let c = random_chamber(g, Side::Positive, 4, &mut rng);
            let ca = common_apartment(&PeriodicFlag::standard(g, Side::Positive), &c).unwrap();
            let frame = ca.frame;
            let w0 = frame.position(&c).unwrap();
            for _ in 0..4 {
                let w = AffineWeylElement::random(g.ty(), 4, &mut rng);
                let face = c.boundary()[rng.gen_range(0..1usize << g.num_types())].clone();
                let img = frame.act_on_flag(&w, &face).unwrap();
                assert_eq!(img.type_k(), face.type_k());
                for (t, v) in img.vertices() {
                    assert_eq!(v.virtual_dim(), face.vertices()[t].virtual_dim());
                }
                assert!(frame.is_subjacent(&img));
                let full = frame.act_on_flag(&w, &c).unwrap();
                assert_eq!(frame.position(&full), Some(w.compose(&w0).unwrap()));
            }
        }
    }

    #[test]
    fn common_apartment_examples() {
        let g = geom::<F3>(TypeTag::C, 2);
        let std = PeriodicFlag::standard(g, Side::Positive);
        let ca = common_apartment(&std, &std).unwrap();
        assert!(ca.frame.is_standard());
        let a0 = AffineWeylElement::generator(g.ty(), 0).unwrap();
        let twisted = Frame::standard(g).chamber_at(Side::Positive, &a0).unwrap();
        let ca = common_apartment(&std, &twisted).unwrap();
        assert!(ca.frame.is_standard());
        assert_eq!(ca.gallery, vec![std.clone(), twisted]);
    }

    #[test]
    fn common_apartments_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for g in all_geoms() {
            for side in [Side::Positive, Side::Negative] {
                for _ in 0..3 {
                    let c = random_chamber(g, side, 5, &mut rng);
                    let d = random_chamber(g, side, 5, &mut rng);
                    let ca = common_apartment(&c, &d).unwrap();
                    let (wc, wd) = (ca.frame.position(&c).unwrap(), ca.frame.position(&d).unwrap());
                    assert_eq!(wc.inverse().compose(&wd).unwrap(), c.weyl_distance(&d).unwrap(), "{:?}", g.ty());
                    assert_eq!(ca.gallery.first(), Some(&c));
                    assert_eq!(ca.gallery.last(), Some(&d));
                    assert_eq!(ca.gallery.len(), c.weyl_distance(&d).unwrap().length() + 1);
                }
            }
        }
    }

    #[test]
    fn isomorphism_fixes_shared_chambers() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for g in all_geoms() {
            let std = PeriodicFlag::standard(g, Side::Positive);
            let d = random_chamber(g, Side::Positive, 4, &mut rng);
            let a1 = Frame::standard(g);
            let a2 = common_apartment(&std, &d).unwrap().frame;
            let iso = apartment_isomorphism(&a1, &a2, &std).unwrap();
            assert!(iso.g.is_identity());
            assert!(iso.check_fixes_intersection(2).unwrap() >= 1);
            let id = AffineWeylElement::identity(g.ty());
            assert_eq!(iso.map_chamber(&id).unwrap(), std);
        }
    }

    #[test]
    fn thin_apartments() {
        let a1 = Frame::standard(geom::<F2>(TypeTag::A, 2));
        let rep = thinness_check(&a1, Side::Positive, 3).unwrap();
        assert_eq!(rep.chambers, 7);
        assert!(rep.failures.is_empty(), "{:?}", rep.failures);
        for g in [geom::<F3>(TypeTag::C, 2), geom(TypeTag::D, 4)] {
            for side in [Side::Positive, Side::Negative] {
                let rep = thinness_check(&Frame::standard(g), side, 1).unwrap();
                assert!(rep.failures.is_empty(), "{:?}", rep.failures);
            }
        }
    }

    #[test]
    fn frame_validation_and_json() {
        let g = geom::<F3>(TypeTag::C, 2);
        let f = Frame::standard(g);
        let mut u = f.vectors().to_vec();
        u[1] = u[0].clone();
        assert!(Frame::new(g, u).is_err());
        let mut u = f.vectors().to_vec();
        u[0] = u[0].shift(1);
        assert!(Frame::new(g, u).is_err());
        let mut u = f.vectors().to_vec();
        u[0] = u[0].add(&u[1]);
        assert!(matches!(Frame::new(g, u), Err(Error::VariantConstraintViolated(_))));
        let w = AffineWeylElement::from_word(g.ty(), &[0, 1, 2]).unwrap();
        let moved = f.act_on_frame(&w).unwrap();
        let j = serde_json::to_string(&moved.to_json()).unwrap();
        let back = Frame::<F3>::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, moved);
        assert!(Frame::<F2>::from_json(&serde_json::from_str(&j).unwrap()).is_err());
    }

    #[test]
    fn a1_apartment_dot() {
        let dot = apartment_dot(&Frame::standard(geom::<F2>(TypeTag::A, 2)), 3);
        assert_eq!(dot.matches("label=").count(), 7 + 6);
        assert_eq!(dot.matches(" -- ").count(), 6);
        let dot0 = apartment_dot(&Frame::standard(geom::<F2>(TypeTag::A, 2)), 0);
        assert_eq!(dot0.matches(" -- ").count(), 0);
    }
}
