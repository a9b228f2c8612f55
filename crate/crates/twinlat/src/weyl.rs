//! Affine Weyl groups as admissible permutations of frame positions.
//!
//! Positions are integers; an element `w` is a bijection of the integers with
//! `w(L + R) = w(L) + R`, where the period `R` is `n` for type A, `2n` for
//! C and D, and `2n + 1` for B. For B, C and D it also commutes with the
//! mirror `L -> R - 1 - L`, which pairs the positions of hyperbolic partners.

use crate::error::Error;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeTag {
    A,
    B,
    C,
    D,
}

impl FromStr for TypeTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "A" | "a" => Ok(TypeTag::A),
            "B" | "b" => Ok(TypeTag::B),
            "C" | "c" => Ok(TypeTag::C),
            "D" | "d" => Ok(TypeTag::D),
            _ => Err(Error::Parse(format!("unknown type {s:?}"))),
        }
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Group type together with its rank parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoxeterType {
    pub tag: TypeTag,
    pub n: usize,
}

impl CoxeterType {
    pub fn new(tag: TypeTag, n: usize) -> Result<Self, Error> {
        let min = match tag {
            TypeTag::A | TypeTag::C => 2,
            TypeTag::B => 3,
            TypeTag::D => 4,
        };
        if n < min {
            return Err(Error::Config(format!("type {tag} needs n >= {min}, got {n}")));
        }
        Ok(CoxeterType { tag, n })
    }

    /// Period of the frame positions (= rank of the ambient module).
    pub fn period(&self) -> usize {
        match self.tag {
            TypeTag::A => self.n,
            TypeTag::C | TypeTag::D => 2 * self.n,
            TypeTag::B => 2 * self.n + 1,
        }
    }

    pub fn num_generators(&self) -> usize {
        match self.tag {
            TypeTag::A => self.n,
            _ => self.n + 1,
        }
    }

    pub fn is_isometric(&self) -> bool {
        self.tag != TypeTag::A
    }

    /// `R - 1`: positions `L` and `c - L` are paired.
    pub fn mirror_center(&self) -> i64 {
        self.period() as i64 - 1
    }

    /// Coxeter matrix entry; `None` stands for infinity.
    pub fn coxeter_m(&self, i: usize, j: usize) -> Option<u32> {
        if i == j {
            return Some(1);
        }
        let n = self.n;
        let (a, b) = (i.min(j), i.max(j));
        let edge = |x: usize, y: usize| (a, b) == (x.min(y), x.max(y));
        let m = match self.tag {
            TypeTag::A => {
                if n == 2 {
                    return None;
                }
                if b - a == 1 || (a == 0 && b == n - 1) {
                    3
                } else {
                    2
                }
            }
            TypeTag::C => {
                if edge(0, 1) || edge(n - 1, n) {
                    4
                } else if b - a == 1 {
                    3
                } else {
                    2
                }
            }
            TypeTag::B => {
                if edge(n - 1, n) {
                    4
                } else if edge(0, 2) || (b - a == 1 && a >= 1) {
                    3
                } else {
                    2
                }
            }
            TypeTag::D => {
                if edge(0, 2) || edge(n - 2, n) || (b - a == 1 && a >= 1 && b < n) {
                    3
                } else {
                    2
                }
            }
        };
        Some(m)
    }
}

/// An admissible permutation, stored through its values on `0..R`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineWeylElement {
    ty: CoxeterType,
    window: Vec<i64>,
}

/// Serialized form: values on the first `n` positions split into residue and
/// period count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylJson {
    #[serde(rename = "type")]
    pub tag: TypeTag,
    pub n: usize,
    pub perm: Vec<usize>,
    pub trans: Vec<i64>,
}

impl AffineWeylElement {
    pub fn identity(ty: CoxeterType) -> Self {
        AffineWeylElement { ty, window: (0..ty.period() as i64).collect() }
    }

    pub fn coxeter_type(&self) -> CoxeterType {
        self.ty
    }

    pub fn period(&self) -> usize {
        self.ty.period()
    }

    /// `w(L)`.
    pub fn apply(&self, l: i64) -> i64 {
        let r = self.period() as i64;
        self.window[l.rem_euclid(r) as usize] + r * l.div_euclid(r)
    }

    /// Builds from values on `0..R`, checking admissibility.
    pub fn from_window(ty: CoxeterType, window: Vec<i64>) -> Result<Self, Error> {
        let r = ty.period() as i64;
        if window.len() != r as usize {
            return Err(Error::Parse(format!("window of length {} for period {r}", window.len())));
        }
        let mut residues: Vec<i64> = window.iter().map(|v| v.rem_euclid(r)).collect();
        residues.sort();
        if residues != (0..r).collect::<Vec<_>>() {
            return Err(Error::Parse("not a periodic bijection".into()));
        }
        let w = AffineWeylElement { ty, window };
        if !w.is_member() {
            return Err(Error::Parse(format!("permutation is not in the affine Weyl group of type {}", ty.tag)));
        }
        Ok(w)
    }

    /// Periodic transposition product of `(a + mR, b + mR)` for each pair.
    fn swaps(ty: CoxeterType, pairs: &[(i64, i64)]) -> Self {
        let r = ty.period() as i64;
        let mut window: Vec<i64> = (0..r).collect();
        for &(a, b) in pairs {
            let (ra, rb) = (a.rem_euclid(r), b.rem_euclid(r));
            window[ra as usize] = b + (ra - a);
            window[rb as usize] = a + (rb - b);
        }
        AffineWeylElement { ty, window }
    }

    /// Generators of the ambient C-type group used to build B and D.
    fn c_reflection(ty: CoxeterType, j: usize) -> Self {
        let n = ty.n as i64;
        let c = ty.mirror_center();
        let j = j as i64;
        if j == 0 {
            return Self::swaps(ty, &[(-1, 0)]);
        }
        if j == n {
            return match ty.tag {
                TypeTag::B => Self::swaps(ty, &[(n - 1, n + 1)]),
                _ => Self::swaps(ty, &[(n - 1, n)]),
            };
        }
        Self::swaps(ty, &[(j - 1, j), (c - j, c - j + 1)])
    }

    pub fn generator(ty: CoxeterType, i: usize) -> Result<Self, Error> {
        if i >= ty.num_generators() {
            return Err(Error::IndexOutOfRange(i));
        }
        let n = ty.n;
        let g = match ty.tag {
            TypeTag::A => Self::swaps(ty, &[(i as i64 - 1, i as i64)]),
            TypeTag::C => Self::c_reflection(ty, i),
            TypeTag::B | TypeTag::D => {
                let t = |j| Self::c_reflection(ty, j);
                if i == 0 {
                    t(0).mul(&t(1)).mul(&t(0))
                } else if i == n && ty.tag == TypeTag::D {
                    t(n).mul(&t(n - 1)).mul(&t(n))
                } else {
                    t(i)
                }
            }
        };
        Ok(g)
    }

    pub fn generators(ty: CoxeterType) -> Vec<Self> {
        (0..ty.num_generators()).map(|i| Self::generator(ty, i).unwrap()).collect()
    }

    fn mul(&self, o: &Self) -> Self {
        AffineWeylElement { ty: self.ty, window: o.window.iter().map(|&l| self.apply(l)).collect() }
    }

    /// `self ∘ o` (`o` acts first).
    pub fn compose(&self, o: &Self) -> Result<Self, Error> {
        if self.ty != o.ty {
            return Err(Error::TypeMismatch(format!("{:?} vs {:?}", self.ty, o.ty)));
        }
        Ok(self.mul(o))
    }

    pub fn inverse(&self) -> Self {
        let r = self.period() as i64;
        let mut window = vec![0; r as usize];
        for (l, &v) in self.window.iter().enumerate() {
            let rv = v.rem_euclid(r);
            window[rv as usize] = l as i64 - (v - rv);
        }
        AffineWeylElement { ty: self.ty, window }
    }

    pub fn is_identity(&self) -> bool {
        self.window.iter().enumerate().all(|(l, &v)| v == l as i64)
    }

    /// `|w(Z>=a) \ Z>=a|`.
    fn crossing(&self, a: i64) -> i64 {
        let r = self.period() as i64;
        let spread = self.window.iter().enumerate().map(|(l, &v)| (v - l as i64).abs()).max().unwrap_or(0);
        (a..a + spread + r).filter(|&l| self.apply(l) < a).count() as i64
    }

    fn is_mirror_symmetric(&self) -> bool {
        let c = self.ty.mirror_center();
        (0..self.period() as i64).all(|l| self.apply(c - l) == c - self.apply(l))
    }

    /// Membership in the group of the element's type.
    pub fn is_member(&self) -> bool {
        let n = self.ty.n as i64;
        match self.ty.tag {
            TypeTag::A => self.window.iter().sum::<i64>() == (0..n).sum::<i64>(),
            TypeTag::C => self.is_mirror_symmetric(),
            TypeTag::B => self.is_mirror_symmetric() && self.crossing(0) % 2 == 0,
            TypeTag::D => self.is_mirror_symmetric() && self.crossing(0) % 2 == 0 && self.crossing(n) % 2 == 0,
        }
    }

    /// Right descent test at position pair `(a, b)`, valid for A and C.
    fn c_descent(&self, j: usize) -> bool {
        let n = self.ty.n as i64;
        let (a, b) = match (self.ty.tag, j as i64) {
            (_, 0) => (-1, 0),
            (TypeTag::B, j) if j == n => (n - 1, n + 1),
            (_, j) => (j - 1, j),
        };
        self.apply(a) > self.apply(b)
    }

    /// Length in the ambient group generated by the C-type reflections.
    fn c_length(&self) -> usize {
        let mut w = self.clone();
        let mut len = 0;
        'outer: loop {
            let top = if self.ty.tag == TypeTag::A { self.ty.n - 1 } else { self.ty.n };
            for j in 0..=top {
                if w.c_descent(j) {
                    w = w.mul(&match self.ty.tag {
                        TypeTag::A => Self::generator(self.ty, j).unwrap(),
                        _ => Self::c_reflection(self.ty, j),
                    });
                    len += 1;
                    assert!(len < 10_000, "descent loop for {:?}", self.window);
                    continue 'outer;
                }
            }
            return len;
        }
    }

    /// Whether `l(w s_i) < l(w)`.
    pub fn has_right_descent(&self, i: usize) -> bool {
        match self.ty.tag {
            TypeTag::A | TypeTag::C => self.c_descent(i),
            TypeTag::B | TypeTag::D => {
                let s = Self::generator(self.ty, i).unwrap();
                self.mul(&s).c_length() < self.c_length()
            }
        }
    }

    /// Reduced word `[i_1, ..., i_l]` with `w = s_(i_1) ... s_(i_l)`.
    pub fn reduced_word(&self) -> Vec<usize> {
        let gens = Self::generators(self.ty);
        let mut w = self.clone();
        let mut rev = Vec::new();
        'outer: while !w.is_identity() {
            for (i, s) in gens.iter().enumerate() {
                if w.has_right_descent(i) {
                    w = w.mul(s);
                    rev.push(i);
                    continue 'outer;
                }
            }
            unreachable!("non-identity element without descent");
        }
        rev.reverse();
        rev
    }

    pub fn length(&self) -> usize {
        match self.ty.tag {
            TypeTag::A | TypeTag::C => self.c_length(),
            _ => self.reduced_word().len(),
        }
    }

    pub fn from_word(ty: CoxeterType, word: &[usize]) -> Result<Self, Error> {
        let mut w = Self::identity(ty);
        for &i in word {
            w = w.mul(&Self::generator(ty, i)?);
        }
        Ok(w)
    }

    /// Text form such as `a0.a2.a1`; the identity is the empty string.
    pub fn word_string(&self) -> String {
        format_word(&self.reduced_word())
    }

    pub fn parse_word(ty: CoxeterType, s: &str) -> Result<Self, Error> {
        Self::from_word(ty, &parse_word(s)?)
    }

    pub fn to_json(&self) -> WeylJson {
        let r = self.period() as i64;
        let m = self.ty.n;
        WeylJson {
            tag: self.ty.tag,
            n: self.ty.n,
            perm: self.window[..m].iter().map(|v| v.rem_euclid(r) as usize).collect(),
            trans: self.window[..m].iter().map(|v| v.div_euclid(r)).collect(),
        }
    }

    pub fn from_json(j: &WeylJson) -> Result<Self, Error> {
        let ty = CoxeterType::new(j.tag, j.n)?;
        let r = ty.period() as i64;
        if j.perm.len() != j.n || j.trans.len() != j.n {
            return Err(Error::Parse("perm and trans must have length n".into()));
        }
        let mut window = vec![i64::MIN; r as usize];
        for (w, (&p, &t)) in window.iter_mut().zip(j.perm.iter().zip(&j.trans)) {
            *w = p as i64 + r * t;
        }
        if ty.is_isometric() {
            let c = ty.mirror_center();
            if ty.tag == TypeTag::B {
                window[j.n] = j.n as i64;
            }
            for l in 0..j.n as i64 {
                window[(c - l) as usize] = c - window[l as usize];
            }
        }
        Self::from_window(ty, window)
    }

    /// Position pairs exchanged by generator `i`, smaller position first.
    /// For paired swaps the second pair is the mirror image of the first.
    pub fn generator_swaps(ty: CoxeterType, i: usize) -> Result<Vec<(i64, i64)>, Error> {
        if i >= ty.num_generators() {
            return Err(Error::IndexOutOfRange(i));
        }
        let n = ty.n as i64;
        let c = ty.mirror_center();
        let j = i as i64;
        let pairs = match (ty.tag, j) {
            (TypeTag::A, _) => vec![(j - 1, j)],
            (TypeTag::B | TypeTag::D, 0) => vec![(-2, 0), (-1, 1)],
            (TypeTag::C, 0) => vec![(-1, 0)],
            (TypeTag::C, j) if j == n => vec![(n - 1, n)],
            (TypeTag::B, j) if j == n => vec![(n - 1, n + 1)],
            (TypeTag::D, j) if j == n => vec![(n - 2, n), (n - 1, n + 1)],
            (_, j) => vec![(j - 1, j), (c - j, c - j + 1)],
        };
        Ok(pairs)
    }

    /// `l -> c - w(c - l)` with `c = R - 1`.
    pub fn mirrored(&self) -> Self {
        let c = self.ty.mirror_center();
        let window = (0..self.period() as i64).map(|l| c - self.apply(c - l)).collect();
        AffineWeylElement { ty: self.ty, window }
    }

    /// Index of the mirror image of generator `i`.
    pub fn mirrored_generator(ty: CoxeterType, i: usize) -> usize {
        match ty.tag {
            TypeTag::A => (ty.n - i) % ty.n,
            _ => i,
        }
    }

    /// Elements of length at most `radius` in breadth-first order.
    pub fn ball(ty: CoxeterType, radius: usize) -> Vec<Self> {
        let gens = Self::generators(ty);
        let mut seen = std::collections::HashSet::new();
        let mut out = vec![Self::identity(ty)];
        seen.insert(out[0].clone());
        let mut start = 0;
        for _ in 0..radius {
            let end = out.len();
            for k in start..end {
                for s in &gens {
                    let ws = out[k].mul(s);
                    if seen.insert(ws.clone()) {
                        out.push(ws);
                    }
                }
            }
            start = end;
        }
        out
    }

    /// Product of `len` uniformly chosen generators.
    pub fn random<R: rand::Rng + ?Sized>(ty: CoxeterType, len: usize, rng: &mut R) -> Self {
        let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..ty.num_generators())).collect();
        Self::from_word(ty, &word).unwrap()
    }

    /// Order of the element, if at most `bound`.
    pub fn order(&self, bound: u32) -> Option<u32> {
        let mut p = self.clone();
        for m in 1..=bound {
            if p.is_identity() {
                return Some(m);
            }
            p = p.mul(self);
        }
        None
    }
}

impl fmt::Display for AffineWeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word_string())
    }
}

pub fn format_word(word: &[usize]) -> String {
    word.iter().map(|i| format!("a{i}")).collect::<Vec<_>>().join(".")
}

pub fn parse_word(s: &str) -> Result<Vec<usize>, Error> {
    let s = s.trim();
    if s.is_empty() || s == "e" || s == "1" {
        return Ok(Vec::new());
    }
    s.split('.')
        .map(|t| {
            t.strip_prefix('a')
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad generator {t:?}")))
        })
        .collect()
}

/// Result of checking the Coxeter presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoxeterReport {
    pub ty: CoxeterType,
    pub checked_pairs: usize,
    pub failures: Vec<String>,
}

/// Largest order tried before a product counts as having infinite order.
const ORDER_BOUND: u32 = 24;

/// Checks involutivity and that every `s_i s_j` has exactly order `m_ij`.
pub fn coxeter_check(ty: CoxeterType) -> CoxeterReport {
    let gens = AffineWeylElement::generators(ty);
    let mut failures = Vec::new();
    let mut checked = 0;
    for i in 0..gens.len() {
        for j in i..gens.len() {
            checked += 1;
            let p = gens[i].mul(&gens[j]);
            let want = if i == j { Some(1) } else { ty.coxeter_m(i, j) };
            let got = p.order(ORDER_BOUND);
            if got != want {
                failures.push(format!("(a{i} a{j}) has order {got:?}, diagram says {want:?}"));
            }
            if i == j && gens[i].mul(&gens[i]) != AffineWeylElement::identity(ty) {
                failures.push(format!("a{i} is not an involution"));
            }
        }
    }
    CoxeterReport { ty, checked_pairs: checked, failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::{HashMap, VecDeque};

    fn t(tag: TypeTag, n: usize) -> CoxeterType {
        CoxeterType::new(tag, n).unwrap()
    }

    fn all_types() -> Vec<CoxeterType> {
        vec![
            t(TypeTag::A, 2),
            t(TypeTag::A, 3),
            t(TypeTag::A, 4),
            t(TypeTag::C, 2),
            t(TypeTag::C, 3),
            t(TypeTag::B, 3),
            t(TypeTag::B, 4),
            t(TypeTag::D, 4),
            t(TypeTag::D, 5),
        ]
    }

    /// Ball of radius `r` by breadth-first search over words.
    fn bfs(ty: CoxeterType, r: usize) -> HashMap<AffineWeylElement, usize> {
        let gens = AffineWeylElement::generators(ty);
        let mut dist = HashMap::new();
        let id = AffineWeylElement::identity(ty);
        dist.insert(id.clone(), 0);
        let mut queue = VecDeque::from([id]);
        while let Some(w) = queue.pop_front() {
            let d = dist[&w];
            if d == r {
                continue;
            }
            for s in &gens {
                let ws = w.mul(s);
                if !dist.contains_key(&ws) {
                    dist.insert(ws.clone(), d + 1);
                    queue.push_back(ws);
                }
            }
        }
        dist
    }

    #[test]
    fn coxeter_relations_hold() {
        for ty in all_types() {
            let rep = coxeter_check(ty);
            assert!(rep.failures.is_empty(), "{ty:?}: {:?}", rep.failures);
        }
    }

    #[test]
    fn a1_translation() {
        let ty = t(TypeTag::A, 2);
        let a0 = AffineWeylElement::generator(ty, 0).unwrap();
        let a1 = AffineWeylElement::generator(ty, 1).unwrap();
        let p = a0.compose(&a1).unwrap();
        // translation by (1, -1) on frame indices
        assert_eq!(p.apply(0), 2);
        assert_eq!(p.apply(1), -1);
        assert!(a0.compose(&a0).unwrap().is_identity());
    }

    #[test]
    fn c_node_zero_swaps_e1_and_z_f1() {
        // positions: f_1 at 0, e_1 at 2n - 1; z f_1 at 2n
        let ty = t(TypeTag::C, 2);
        let g = AffineWeylElement::generator(ty, 0).unwrap();
        assert_eq!(g.apply(3), 4);
        assert_eq!(g.apply(4), 3);
        assert_eq!(g.apply(1), 1);
        assert_eq!(g.apply(2), 2);
    }

    #[test]
    fn membership() {
        let c = t(TypeTag::C, 4);
        let g0 = AffineWeylElement::c_reflection(t(TypeTag::D, 4), 0);
        assert!(!g0.is_member());
        let gn = AffineWeylElement::c_reflection(t(TypeTag::D, 4), 4);
        assert!(!gn.is_member());
        assert!(AffineWeylElement::generator(c, 0).unwrap().is_member());
        let b0 = AffineWeylElement::c_reflection(t(TypeTag::B, 3), 0);
        assert!(!b0.is_member());
        assert!(AffineWeylElement::c_reflection(t(TypeTag::B, 3), 3).is_member());
    }

    #[test]
    fn lengths_match_bfs() {
        for ty in all_types() {
            let r = if ty.period() > 7 { 4 } else { 6 };
            let ball = bfs(ty, r);
            for (w, &d) in &ball {
                assert_eq!(w.length(), d, "{ty:?} {:?}", w.window);
                assert!(w.is_member());
                let word = w.reduced_word();
                assert_eq!(&AffineWeylElement::from_word(ty, &word).unwrap(), w);
            }
        }
    }

    #[test]
    fn a1_ball_sizes() {
        let ty = t(TypeTag::A, 2);
        assert_eq!(bfs(ty, 2).len(), 5);
        assert_eq!(bfs(ty, 3).len(), 7);
    }

    #[test]
    fn text_and_json_forms() {
        let ty = t(TypeTag::D, 4);
        let w = AffineWeylElement::from_word(ty, &[0, 2, 1, 4, 2]).unwrap();
        let s = w.word_string();
        assert_eq!(AffineWeylElement::parse_word(ty, &s).unwrap(), w);
        let j = serde_json::to_string(&w.to_json()).unwrap();
        let back: WeylJson = serde_json::from_str(&j).unwrap();
        assert_eq!(AffineWeylElement::from_json(&back).unwrap(), w);
        assert_eq!(format_word(&[0, 2, 1]), "a0.a2.a1");
        assert!(parse_word("a0.x").is_err());
        assert!(matches!(AffineWeylElement::generator(ty, 5), Err(Error::IndexOutOfRange(5))));
    }

    #[test]
    fn swaps_and_mirror() {
        for ty in all_types() {
            for i in 0..ty.num_generators() {
                let g = AffineWeylElement::generator(ty, i).unwrap();
                let pairs = AffineWeylElement::generator_swaps(ty, i).unwrap();
                assert_eq!(AffineWeylElement::swaps(ty, &pairs), g, "{ty:?} {i}");
                let j = AffineWeylElement::mirrored_generator(ty, i);
                assert_eq!(g.mirrored(), AffineWeylElement::generator(ty, j).unwrap());
            }
            let w = AffineWeylElement::from_word(ty, &[0, 1, 0, 1, 1 % ty.n]).unwrap();
            assert_eq!(w.mirrored().mirrored(), w);
            assert!(w.mirrored().is_member());
        }
        assert_eq!(AffineWeylElement::ball(t(TypeTag::A, 2), 3).len(), 7);
        assert_eq!(AffineWeylElement::ball(t(TypeTag::C, 2), 1).len(), 4);
    }

    fn arb_word(ty: CoxeterType) -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(0..ty.num_generators(), 0..14)
    }

    proptest! {
        #[test]
        fn group_laws(k in 0usize..9, w1 in arb_word(t(TypeTag::A, 4)), w2 in arb_word(t(TypeTag::A, 4)), w3 in arb_word(t(TypeTag::A, 4))) {
            let ty = all_types()[k];
            let m = ty.num_generators();
            let el = |w: &Vec<usize>| AffineWeylElement::from_word(ty, &w.iter().map(|i| i % m).collect::<Vec<_>>()).unwrap();
            let (a, b, c) = (el(&w1), el(&w2), el(&w3));
            let id = AffineWeylElement::identity(ty);
            prop_assert_eq!(a.compose(&a.inverse()).unwrap(), id.clone());
            prop_assert_eq!(id.compose(&a).unwrap(), a.clone());
            prop_assert_eq!(a.compose(&b).unwrap().compose(&c).unwrap(), a.compose(&b.compose(&c).unwrap()).unwrap());
            prop_assert_eq!(a.length(), a.inverse().length());
            prop_assert!(a.compose(&b).unwrap().length() <= a.length() + b.length());
            for s in AffineWeylElement::generators(ty) {
                let d = a.compose(&s).unwrap().length() as i64 - a.length() as i64;
                prop_assert!(d == 1 || d == -1);
            }
            if ty.tag == TypeTag::A {
                let r = ty.period() as i64;
                let trans: i64 = (0..r).map(|l| a.apply(l).div_euclid(r)).sum();
                prop_assert_eq!(trans, 0);
            }
        }
    }
}
