//! Checks of the chamber complex, building and twin building axioms on
//! bounded samples, and the twinning itself: oppositeness, codistance and
//! twin apartments.
//!
//! Negative chambers are read through their actual chains: the member of
//! index `j` is `W-_j`, and at the base of a frame `W-_j` is spanned by the
//! lines `U_m` with `m <= R - 1 - j`. A positive and a negative chamber are
//! opposite when `W+_k ∩ W-_(R-1-k)` is a line and `W+_k ∩ W-_(R-k)` is zero
//! for every `k`.

use crate::apartments::{apartment_isomorphism, common_apartment, thinness_check, to_dot, Frame};
use crate::error::Error;
use crate::exactfield::{join, meet, Subspace};
use crate::field::Field;
use crate::flags::{last_true, Geometry, PeriodicFlag};
use crate::laurent::{LaurentVector, PeriodicSubspace, Side};
use crate::weyl::{coxeter_check, AffineWeylElement, TypeTag};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap, VecDeque};

type Lattice<F> = PeriodicSubspace<F>;

/// A flag missing exactly one vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Panel<F: Field> {
    flag: PeriodicFlag<F>,
    missing: usize,
}

impl<F: Field> Panel<F> {
    pub fn new(flag: PeriodicFlag<F>) -> Result<Self, Error> {
        let n = flag.geometry().num_types();
        let missing: Vec<usize> = (0..n).filter(|t| flag.vertex(*t).is_none()).collect();
        match missing[..] {
            [t] => Ok(Panel { flag, missing: t }),
            _ => Err(Error::TypeMismatch(format!("a panel misses one vertex, this flag misses {}", missing.len()))),
        }
    }

    /// The panel of chamber `c` crossed by generator `s`.
    pub fn of_chamber(c: &PeriodicFlag<F>, s: usize) -> Self {
        let t = c.stored_type(s);
        Panel { flag: c.without(t), missing: t }
    }

    pub fn flag(&self) -> &PeriodicFlag<F> {
        &self.flag
    }

    /// Stored type of the missing vertex.
    pub fn missing_type(&self) -> usize {
        self.missing
    }
}

/// All chambers containing the panel.
pub fn panel_residue<F: Field>(p: &Panel<F>) -> Result<Vec<PeriodicFlag<F>>, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let c = p.flag.complete(&mut rng)?;
    let s = (0..c.geometry().num_types()).find(|&s| c.stored_type(s) == p.missing).unwrap();
    c.panel_residue(s)
}

/// A positive and a negative chamber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwinChamberPair<F: Field> {
    pub plus: PeriodicFlag<F>,
    pub minus: PeriodicFlag<F>,
}

impl<F: Field> TwinChamberPair<F> {
    pub fn new(plus: PeriodicFlag<F>, minus: PeriodicFlag<F>) -> Result<Self, Error> {
        if plus.side() != Side::Positive || minus.side() != Side::Negative {
            return Err(Error::SideMismatch("a twin pair is a positive and a negative chamber".into()));
        }
        if plus.geometry() != minus.geometry() {
            return Err(Error::TypeMismatch(format!("{:?} vs {:?}", plus.geometry().ty(), minus.geometry().ty())));
        }
        if !plus.is_chamber() || !minus.is_chamber() {
            return Err(Error::TypeMismatch("twin pairs hold chambers".into()));
        }
        Ok(TwinChamberPair { plus, minus })
    }

    /// The standard opposite pair.
    pub fn standard(geom: Geometry<F>) -> Self {
        TwinChamberPair {
            plus: PeriodicFlag::standard(geom, Side::Positive),
            minus: PeriodicFlag::standard(geom, Side::Negative),
        }
    }
}

fn check_pair<F: Field>(x: &PeriodicFlag<F>, y: &PeriodicFlag<F>) -> Result<(), Error> {
    if x.side() == y.side() {
        return Err(Error::SideMismatch("codistance needs chambers of opposite sides".into()));
    }
    if x.geometry() != y.geometry() {
        return Err(Error::TypeMismatch(format!("{:?} vs {:?}", x.geometry().ty(), y.geometry().ty())));
    }
    if !x.is_chamber() || !y.is_chamber() {
        return Err(Error::TypeMismatch("codistance is defined on chambers".into()));
    }
    Ok(())
}

/// The chain of a chamber with cached shifted members and their actual
/// window spaces.
struct Chain<F: Field> {
    geom: Geometry<F>,
    side: Side,
    period: Vec<Lattice<F>>,
    members: RefCell<HashMap<i64, Lattice<F>>>,
    actual: RefCell<HashMap<(i64, usize), Subspace<F>>>,
}

impl<F: Field> Chain<F> {
    fn new(c: &PeriodicFlag<F>) -> Self {
        Chain {
            geom: *c.geometry(),
            side: c.side(),
            period: c.chain(),
            members: RefCell::new(HashMap::new()),
            actual: RefCell::new(HashMap::new()),
        }
    }

    fn window(&self, j: i64) -> usize {
        self.members
            .borrow_mut()
            .entry(j)
            .or_insert_with(|| self.geom.chain_at(&self.period, j))
            .window_exp()
    }

    fn actual(&self, j: i64, e: usize) -> Subspace<F> {
        self.window(j);
        let m = self.members.borrow()[&j].clone();
        self.actual.borrow_mut().entry((j, e)).or_insert_with(|| m.with_side(self.side).actual_in(e)).clone()
    }
}

/// `dim(A_k ∩ B_j)` for chains on opposite sides.
fn cross_dim<F: Field>(a: &Chain<F>, k: i64, b: &Chain<F>, j: i64) -> usize {
    let e = a.window(k).max(b.window(j)) + 1;
    let (u, v) = (a.actual(k, e), b.actual(j, e));
    u.dim() + v.dim() - join(&u, &v).expect("same window").dim()
}

fn order_pair<'a, F: Field>(
    x: &'a PeriodicFlag<F>,
    y: &'a PeriodicFlag<F>,
) -> (&'a PeriodicFlag<F>, &'a PeriodicFlag<F>) {
    match x.side() {
        Side::Positive => (x, y),
        Side::Negative => (y, x),
    }
}

/// Whether the two chambers are opposite.
pub fn opposite<F: Field>(x: &PeriodicFlag<F>, y: &PeriodicFlag<F>) -> Result<bool, Error> {
    check_pair(x, y)?;
    let (p, m) = order_pair(x, y);
    let r = p.geometry().period() as i64;
    let (a, b) = (Chain::new(p), Chain::new(m));
    Ok((0..r).all(|k| cross_dim(&a, k, &b, r - 1 - k) == 1 && cross_dim(&a, k, &b, r - k) == 0))
}

/// `δ*(x, y)` read off the dimensions of the cross intersections.
///
/// In any twin apartment with `x` at `w1` and `y` at `w2`, going from
/// `W_k` to `W_(k+1)` on one side drops a single frame line, and the
/// largest index of a member of the other chain containing that line
/// recovers `w1^-1 w2`.
pub fn codistance<F: Field>(x: &PeriodicFlag<F>, y: &PeriodicFlag<F>) -> Result<AffineWeylElement, Error> {
    check_pair(x, y)?;
    chain_codistance(&Chain::new(x), &Chain::new(y))
}

fn chain_codistance<F: Field>(a: &Chain<F>, b: &Chain<F>) -> Result<AffineWeylElement, Error> {
    let r = a.period.len() as i64;
    let c = r - 1;
    let dim = |k: i64, j: i64| match a.side {
        Side::Positive => cross_dim(a, k, b, j),
        Side::Negative => cross_dim(b, j, a, k),
    };
    let tau: Vec<i64> = (0..r).map(|k| last_true(|j| dim(k, j) > dim(k + 1, j))).collect();
    let window = match a.side {
        Side::Positive => tau.iter().map(|t| c - t).collect(),
        // tau(c - p) = w(p) for w = δ*(y, x) = δ*(x, y)^-1
        Side::Negative => (0..r).map(|p| tau[(c - p) as usize]).collect(),
    };
    Ok(AffineWeylElement::from_window(a.geom.ty(), window)?.inverse())
}

/// A frame whose positive apartment holds `plus` at the identity and whose
/// negative apartment holds `minus` at the identity.
pub fn twin_apartment<F: Field>(pair: &TwinChamberPair<F>) -> Result<Frame<F>, Error> {
    if !opposite(&pair.plus, &pair.minus)? {
        return Err(Error::NotOpposite);
    }
    let g = *pair.plus.geometry();
    let r = g.period() as i64;
    let amb = g.ambient();
    let (a, b) = (Chain::new(&pair.plus), Chain::new(&pair.minus));
    let mut u: Vec<LaurentVector<F>> = Vec::new();
    for k in 0..r {
        let e = a.window(k).max(b.window(r - 1 - k)) + 1;
        let line = meet(&a.actual(k, e), &b.actual(r - 1 - k, e))?;
        u.push(LaurentVector::from_window(&amb, e, &line.basis()[0]));
    }
    if let Some(form) = g.form() {
        // rescale so that partners pair to the coordinate values
        for i in 0..r as usize {
            let j = r as usize - 1 - i;
            if i < j {
                let want = form.eval(&LaurentVector::basis(0, i), &LaurentVector::basis(0, j));
                let got = form.eval(&u[i], &u[j]);
                if got.is_zero() {
                    return Err(Error::NoTwinApartmentFound);
                }
                u[j] = u[j].scale(want / got);
            }
        }
    }
    let frame = Frame::new(g, u).map_err(|_| Error::NoTwinApartmentFound)?;
    let id = AffineWeylElement::identity(g.ty());
    if frame.chamber_at(Side::Positive, &id)? != pair.plus || frame.chamber_at(Side::Negative, &id)? != pair.minus {
        return Err(Error::NoTwinApartmentFound);
    }
    Ok(frame)
}

/// Longest descent walk tried before giving up.
const MAX_WALK: usize = 64;

/// `δ*(x, y)` read from the positions of `x` and `y` in a twin apartment.
///
/// The chamber on side `walk` is moved through panels, each step lowering
/// the codistance, until it is opposite the other one; the twin apartment of
/// that opposite pair contains both inputs. `rng` picks among the chambers
/// of each panel.
pub fn codistance_via_apartment<F: Field, R: Rng + ?Sized>(
    x: &PeriodicFlag<F>,
    y: &PeriodicFlag<F>,
    walk: Side,
    rng: &mut R,
) -> Result<(AffineWeylElement, Frame<F>), Error> {
    check_pair(x, y)?;
    let (p, m) = order_pair(x, y);
    let (mut p2, mut m2) = (p.clone(), m.clone());
    for _ in 0..MAX_WALK {
        let d = codistance(&p2, &m2)?;
        if d.is_identity() {
            break;
        }
        let (moving, w) = match walk {
            Side::Positive => (&mut p2, d.inverse()),
            Side::Negative => (&mut m2, d),
        };
        let s = (0..w.coxeter_type().num_generators()).find(|&s| w.has_right_descent(s)).unwrap();
        let others: Vec<_> = moving.panel_residue(s)?.into_iter().filter(|c| c != moving).collect();
        *moving = others.choose(rng).ok_or(Error::NoTwinApartmentFound)?.clone();
    }
    let frame = twin_apartment(&TwinChamberPair { plus: p2, minus: m2 })?;
    let w1 = frame.position(p).ok_or(Error::NoTwinApartmentFound)?;
    let w2 = frame.position(m).ok_or(Error::NoTwinApartmentFound)?;
    let d = w1.inverse().compose(&w2)?;
    Ok((if x.side() == Side::Positive { d } else { d.inverse() }, frame))
}

/// One failed sample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub sample: usize,
    pub detail: String,
}

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub variant: String,
    pub n: usize,
    pub q: u32,
    pub samples: usize,
    pub failures: Vec<Failure>,
}

impl Report {
    fn new<F: Field>(check: &str, geom: &Geometry<F>) -> Self {
        let ty = geom.ty();
        Report {
            check: check.into(),
            variant: format!("{:?}", ty.tag),
            n: ty.n,
            q: F::MODULUS,
            samples: 0,
            failures: Vec::new(),
        }
    }

    fn fail(&mut self, sample: usize, detail: impl Into<String>) {
        self.failures.push(Failure { sample, detail: detail.into() });
    }

    fn record(&mut self, sample: usize, r: Result<(), String>) {
        self.samples += 1;
        if let Err(e) = r {
            self.fail(sample, e);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn max_window<F: Field>(c: &PeriodicFlag<F>) -> usize {
    c.vertices().values().map(|v| v.window_exp()).max().unwrap_or(1)
}

/// A random chamber reached from the standard chamber of `side` by `steps`
/// panel moves, never leaving window `window`. Returns the gallery walked.
pub fn random_gallery<F: Field, R: Rng + ?Sized>(
    geom: Geometry<F>,
    side: Side,
    steps: usize,
    window: usize,
    rng: &mut R,
) -> Result<Vec<PeriodicFlag<F>>, Error> {
    let mut out = vec![PeriodicFlag::standard(geom, side)];
    for _ in 0..steps {
        let c = out.last().unwrap();
        let s = rng.gen_range(0..geom.num_types());
        let next: Vec<_> =
            c.panel_residue(s)?.into_iter().filter(|d| d != c && max_window(d) <= window).collect();
        if let Some(d) = next.choose(rng) {
            out.push(d.clone());
        }
    }
    Ok(out)
}

fn adjacent<F: Field>(a: &PeriodicFlag<F>, b: &PeriodicFlag<F>) -> Result<bool, Error> {
    let diff: Vec<usize> = a.vertices().iter().filter(|(t, v)| b.vertex(**t) != Some(v)).map(|(t, _)| *t).collect();
    if diff.len() != 1 {
        return Ok(false);
    }
    let s = (0..a.geometry().num_types()).find(|&s| a.stored_type(s) == diff[0]).unwrap();
    Ok(a.panel_residue(s)?.contains(b))
}

fn check_gallery<F: Field>(g: &[PeriodicFlag<F>]) -> Result<(), String> {
    for (i, w) in g.windows(2).enumerate() {
        if !adjacent(&w[0], &w[1]).map_err(|e| e.to_string())? {
            return Err(format!("gallery steps {i} and {} are not adjacent", i + 1));
        }
    }
    Ok(())
}

/// Residue sizes of random chambers: `q + 1` in type A, at least 3 otherwise.
pub fn thickness_check<F: Field, R: Rng + ?Sized>(
    geom: Geometry<F>,
    samples: usize,
    window: usize,
    rng: &mut R,
) -> Result<Report, Error> {
    let mut rep = Report::new("thickness", &geom);
    let q = F::MODULUS as usize;
    for i in 0..samples {
        let side = if i % 2 == 0 { Side::Positive } else { Side::Negative };
        let c = random_gallery(geom, side, 4, window, rng)?.pop().unwrap();
        let r = (0..geom.num_types()).try_for_each(|s| {
            let n = c.panel_residue(s).map_err(|e| e.to_string())?.len();
            let ok = match geom.ty().tag {
                TypeTag::A => n == q + 1,
                _ => n >= 3,
            };
            if ok {
                Ok(())
            } else {
                Err(format!("panel {s} has {n} chambers"))
            }
        });
        rep.record(i, r);
    }
    Ok(rep)
}

/// Apartment panels of the standard and of a moved frame hold two
/// apartment chambers each.
pub fn thinness_report<F: Field, R: Rng + ?Sized>(
    geom: Geometry<F>,
    samples: usize,
    radius: usize,
    window: usize,
    rng: &mut R,
) -> Result<Report, Error> {
    let mut rep = Report::new("thinness", &geom);
    for i in 0..samples {
        let side = if i % 2 == 0 { Side::Positive } else { Side::Negative };
        let frame = if i < 2 {
            Frame::standard(geom)
        } else {
            let a = random_gallery(geom, side, 3, window, rng)?.pop().unwrap();
            let b = random_gallery(geom, side, 3, window, rng)?.pop().unwrap();
            common_apartment(&a, &b)?.frame
        };
        let t = thinness_check(&frame, side, radius)?;
        rep.record(i, if t.failures.is_empty() { Ok(()) } else { Err(t.failures.join("; ")) });
    }
    Ok(rep)
}

/// Building axioms on random pairs of chambers of one side: a common
/// apartment with both subjacent, an isomorphism between two apartments
/// through a shared chamber that fixes their intersection, and galleries
/// joining the chambers.
pub fn building_axioms_check<F: Field, R: Rng + ?Sized>(
    geom: Geometry<F>,
    samples: usize,
    window: usize,
    rng: &mut R,
) -> Result<Report, Error> {
    let mut rep = Report::new("building_axioms", &geom);
    for i in 0..samples {
        let side = if i % 2 == 0 { Side::Positive } else { Side::Negative };
        let steps = 2 + i % 4;
        let ga = random_gallery(geom, side, steps, window, rng)?;
        let gb = random_gallery(geom, side, steps, window, rng)?;
        let gc = random_gallery(geom, side, 3, window, rng)?;
        let (a, b, c) = (ga.last().unwrap(), gb.last().unwrap(), gc.last().unwrap());
        let r = (|| -> Result<(), String> {
            check_gallery(&ga)?;
            check_gallery(&gb)?;
            let e = |e: Error| e.to_string();
            let ab = common_apartment(a, b).map_err(e)?;
            if !ab.frame.is_subjacent(a) || !ab.frame.is_subjacent(b) {
                return Err("flags not subjacent to their common apartment".into());
            }
            check_gallery(&ab.gallery)?;
            let ac = common_apartment(a, c).map_err(e)?;
            let iso = apartment_isomorphism(&ab.frame, &ac.frame, a).map_err(e)?;
            iso.check_fixes_intersection(1).map_err(e)?;
            let wa = ab.frame.position(a).ok_or("position of the shared chamber")?;
            if iso.map_chamber(&wa).map_err(e)? != *a {
                return Err("isomorphism moves the shared chamber".into());
            }
            Ok(())
        })();
        rep.record(i, r);
    }
    Ok(rep)
}

/// Exactly one chamber of each panel of one chamber is not opposite a
/// given chamber of the matching panel of the other, both ways.
pub fn one_twinning_check<F: Field>(pair: &TwinChamberPair<F>) -> Result<Vec<String>, Error> {
    let mut out = Vec::new();
    if !opposite(&pair.plus, &pair.minus)? {
        out.push("input pair is not opposite".into());
        return Ok(out);
    }
    let geom = pair.plus.geometry();
    for s in 0..geom.num_types() {
        let pp = pair.plus.panel_residue(s)?;
        let pm = pair.minus.panel_residue(s)?;
        let mut table = vec![vec![false; pm.len()]; pp.len()];
        for (i, a) in pp.iter().enumerate() {
            for (j, b) in pm.iter().enumerate() {
                table[i][j] = opposite(a, b)?;
            }
        }
        for (i, row) in table.iter().enumerate() {
            let non = row.iter().filter(|o| !**o).count();
            if non != 1 {
                out.push(format!("panel {s}: positive chamber {i} has {non} non-opposite partners"));
            }
        }
        for j in 0..pm.len() {
            let non = table.iter().filter(|row| !row[j]).count();
            if non != 1 {
                out.push(format!("panel {s}: negative chamber {j} has {non} non-opposite partners"));
            }
        }
    }
    Ok(out)
}

/// The standard pair and pairs twisted by random Weyl elements, which are
/// opposite, checked for the 1-twinning property.
pub fn one_twinning_report<F: Field, R: Rng + ?Sized>(
    geom: Geometry<F>,
    samples: usize,
    rng: &mut R,
) -> Result<Report, Error> {
    let mut rep = Report::new("one_twinning", &geom);
    let frame = Frame::standard(geom);
    for i in 0..samples {
        let w = if i == 0 { AffineWeylElement::identity(geom.ty()) } else { AffineWeylElement::random(geom.ty(), 1 + i % 5, rng) };
        let pair = TwinChamberPair::new(frame.chamber_at(Side::Positive, &w)?, frame.chamber_at(Side::Negative, &w)?)?;
        let f = one_twinning_check(&pair)?;
        rep.record(i, if f.is_empty() { Ok(()) } else { Err(format!("twist {w}: {}", f.join("; "))) });
    }
    Ok(rep)
}

/// Chambers within gallery distance `radius` of `c`, nearest first.
pub fn chamber_ball<F: Field>(c: &PeriodicFlag<F>, radius: usize) -> Result<Vec<(PeriodicFlag<F>, usize)>, Error> {
    Ok(neighbourhood(c, radius)?.0)
}

fn key<F: Field>(c: &PeriodicFlag<F>) -> String {
    serde_json::to_string(&c.to_json()).unwrap()
}

type Neighbourhood<F> = (Vec<(PeriodicFlag<F>, usize)>, Vec<(usize, usize, usize)>);

fn neighbourhood<F: Field>(c: &PeriodicFlag<F>, radius: usize) -> Result<Neighbourhood<F>, Error> {
    let mut nodes = vec![(c.clone(), 0)];
    let mut index: HashMap<String, usize> = HashMap::from([(key(c), 0)]);
    let mut edges = BTreeMap::new();
    let mut queue = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        let (x, d) = nodes[i].clone();
        if d == radius {
            continue;
        }
        for s in 0..c.geometry().num_types() {
            let mut ids = Vec::new();
            for y in x.panel_residue(s)? {
                let k = key(&y);
                let id = match index.get(&k) {
                    Some(&id) => id,
                    None => {
                        let id = nodes.len();
                        index.insert(k, id);
                        nodes.push((y, d + 1));
                        queue.push_back(id);
                        id
                    }
                };
                ids.push(id);
            }
            for (a, &u) in ids.iter().enumerate() {
                for &v in &ids[a + 1..] {
                    edges.insert((u.min(v), u.max(v)), s);
                }
            }
        }
    }
    Ok((nodes, edges.into_iter().map(|((a, b), s)| (a, b, s)).collect()))
}

/// Chamber graph of the building around the standard chamber.
pub fn building_dot<F: Field>(geom: Geometry<F>, side: Side, radius: usize) -> Result<String, Error> {
    let (nodes, edges) = neighbourhood(&PeriodicFlag::standard(geom, side), radius)?;
    let labels: Vec<String> = nodes.iter().enumerate().map(|(i, (_, d))| format!("{i}@{d}")).collect();
    Ok(to_dot("building", &labels, &edges))
}

/// Codistance axioms on all pairs within total gallery distance `radius`
/// of the standard twin pair:
/// (1) `δ*(y, x) = δ*(x, y)^-1`;
/// (2) if `l(w s) = l(w) - 1` then every `z ≠ y` on the `s`-panel of `y`
///     has `δ*(x, z) = w s`;
/// (3) some `z` on the `s`-panel of `y` has `δ*(x, z) = w s`;
/// with (2) and (3) checked from both sides. Also checks that opposite
/// pairs are those at codistance 1.
pub fn codistance_axioms_check<F: Field>(geom: Geometry<F>, radius: usize) -> Result<Report, Error> {
    let mut rep = Report::new("codistance_axioms", &geom);
    let plus = chamber_ball(&PeriodicFlag::standard(geom, Side::Positive), radius)?;
    let minus = chamber_ball(&PeriodicFlag::standard(geom, Side::Negative), radius)?;
    let mut sample = 0;
    for (x, dx) in &plus {
        for (y, dy) in &minus {
            if dx + dy > radius {
                continue;
            }
            let r = codistance_triples(x, y).map_err(|e| e.to_string()).and_then(|v| if v.is_empty() { Ok(()) } else { Err(v.join("; ")) });
            rep.record(sample, r);
            sample += 1;
        }
    }
    Ok(rep)
}

fn codistance_triples<F: Field>(x: &PeriodicFlag<F>, y: &PeriodicFlag<F>) -> Result<Vec<String>, Error> {
    let mut out = Vec::new();
    let w = codistance(x, y)?;
    let back = codistance(y, x)?;
    if back != w.inverse() {
        out.push(format!("axiom 1: δ*(x,y) = {w} but δ*(y,x) = {back}"));
    }
    if opposite(x, y)? != w.is_identity() {
        out.push(format!("oppositeness disagrees with codistance {w}"));
    }
    for (a, b, wab) in [(x, y, &w), (y, x, &back)] {
        let ca = Chain::new(a);
        for s in 0..a.geometry().num_types() {
            let ws = wab.compose(&AffineWeylElement::generator(wab.coxeter_type(), s)?)?;
            let descent = ws.length() + 1 == wab.length();
            let mut witness = false;
            for z in b.panel_residue(s)? {
                let d = chain_codistance(&ca, &Chain::new(&z))?;
                witness |= d == ws;
                if descent && z != *b && d != ws {
                    out.push(format!("axiom 2: s = {s}, w = {wab}, got {d}"));
                }
            }
            if !witness {
                out.push(format!("axiom 3: s = {s}, w = {wab}, no chamber at {ws}"));
            }
        }
    }
    Ok(out)
}

/// Codistance through two twin apartments built from different opposite
/// anchors, compared with each other and with the intersection formula.
pub fn codistance_consistency<F: Field, R: Rng + ?Sized>(
    geom: Geometry<F>,
    samples: usize,
    window: usize,
    rng: &mut R,
) -> Result<Report, Error> {
    let mut rep = Report::new("codistance_apartments", &geom);
    for i in 0..samples {
        let x = random_gallery(geom, Side::Positive, 1 + i % 4, window, rng)?.pop().unwrap();
        let y = random_gallery(geom, Side::Negative, 1 + (i / 4) % 4, window, rng)?.pop().unwrap();
        let r = (|| -> Result<(), String> {
            let e = |e: Error| e.to_string();
            let (d1, f1) = codistance_via_apartment(&x, &y, Side::Negative, rng).map_err(e)?;
            let (d2, f2) = codistance_via_apartment(&x, &y, Side::Positive, rng).map_err(e)?;
            let d = codistance(&x, &y).map_err(e)?;
            if d1 != d2 || d1 != d {
                return Err(format!("apartments give {d1} and {d2}, formula gives {d}"));
            }
            if f1 == f2 && !d.is_identity() {
                return Err("the two twin apartments coincide".into());
            }
            Ok(())
        })();
        rep.record(i, r);
    }
    Ok(rep)
}

/// Coxeter presentation of the type as a report.
pub fn coxeter_report<F: Field>(geom: Geometry<F>) -> Report {
    let mut rep = Report::new("coxeter", &geom);
    let c = coxeter_check(geom.ty());
    rep.samples = c.checked_pairs;
    for (i, f) in c.failures.into_iter().enumerate() {
        rep.fail(i, f);
    }
    rep
}

/// Sizes for [`run_suite`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub window: usize,
    pub samples: usize,
    pub radius: usize,
}

/// All checks for one geometry, each with its own generator derived from
/// the seed, in a fixed order.
pub fn run_suite<F: Field>(geom: Geometry<F>, cfg: SuiteConfig) -> Result<Vec<Report>, Error> {
    let rng = |i: u64| ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i));
    Ok(vec![
        coxeter_report(geom),
        thinness_report(geom, cfg.samples.min(4), cfg.radius, cfg.window, &mut rng(1))?,
        thickness_check(geom, cfg.samples, cfg.window, &mut rng(2))?,
        building_axioms_check(geom, cfg.samples, cfg.window, &mut rng(3))?,
        one_twinning_report(geom, cfg.samples.min(8), &mut rng(4))?,
        codistance_axioms_check(geom, cfg.radius.min(2))?,
        codistance_consistency(geom, cfg.samples, cfg.window, &mut rng(5))?,
    ])
}
