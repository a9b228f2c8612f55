//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::time::Instant;
use twinlat::apartments::{common_apartment, thinness_check, Frame};
use twinlat::exactfield::Subspace;
use twinlat::flags::{incident, Geometry, PeriodicFlag};
use twinlat::forms::InvariantForm;
use twinlat::laurent::{Ambient, LaurentMatrix, LaurentPoly, LaurentVector, PeriodicSubspace, Side, Variant};
use twinlat::verify::{
    building_axioms_check, codistance_axioms_check, codistance_consistency, one_twinning_report, random_gallery,
    run_suite, thickness_check, Report, SuiteConfig,
};
use twinlat::weyl::{coxeter_check, AffineWeylElement, CoxeterType, TypeTag};
use twinlat::{Field, F2, F3};

type Outcome = Result<String, String>;

fn geom<F: Field>(tag: TypeTag, n: usize) -> Geometry<F> {
    Geometry::new(CoxeterType::new(tag, n).unwrap()).unwrap()
}

fn label<F: Field>(g: &Geometry<F>) -> String {
    format!("{:?}{}/F{}", g.ty().tag, g.ty().n, F::MODULUS)
}

fn reports(rs: &[Report]) -> Outcome {
    let bad: Vec<String> = rs
        .iter()
        .filter(|r| !r.passed())
        .map(|r| format!("{} {}{} q={}: {:?}", r.check, r.variant, r.n, r.q, r.failures.first()))
        .collect();
    let samples: usize = rs.iter().map(|r| r.samples).sum();
    if bad.is_empty() {
        Ok(format!("{samples} samples"))
    } else {
        Err(bad.join("; "))
    }
}

fn side_of(i: usize) -> Side {
    if i.is_multiple_of(2) {
        Side::Positive
    } else {
        Side::Negative
    }
}

fn c1_coxeter() -> Outcome {
    let types = [
        (TypeTag::A, 2),
        (TypeTag::A, 3),
        (TypeTag::A, 4),
        (TypeTag::C, 2),
        (TypeTag::C, 3),
        (TypeTag::B, 3),
        (TypeTag::D, 4),
    ];
    let mut pairs = 0;
    for (tag, n) in types {
        let r = coxeter_check(CoxeterType::new(tag, n).unwrap());
        if !r.failures.is_empty() {
            return Err(format!("{tag:?}{n}: {:?}", r.failures));
        }
        pairs += r.checked_pairs;
    }
    Ok(format!("{pairs} generator pairs over 7 types"))
}

fn c2_nu_laws() -> Outcome {
    let ambients = [
        Ambient::new(2, Variant::Linear),
        Ambient::new(3, Variant::Linear),
        Ambient::new(4, Variant::Linear),
        Ambient::new(4, Variant::Symplectic),
        Ambient::new(6, Variant::Symplectic),
        Ambient::new(7, Variant::OrthogonalOdd),
        Ambient::new(8, Variant::OrthogonalEven),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for amb in ambients {
        let amb = amb.unwrap();
        let r = amb.rank() as i64;
        for side in [Side::Positive, Side::Negative] {
            if PeriodicSubspace::<F3>::standard_shifted(amb, side, 0).virtual_dim() != 0 {
                return Err(format!("nu(H) != 0 for {amb:?} {side:?}"));
            }
        }
        for i in 0..500 {
            let side = side_of(i);
            let k = 1 + i % 3;
            let w = PeriodicSubspace::<F3>::random(amb, side, k, &mut rng);
            let nu = w.virtual_dim();
            // on the negative side z lowers degrees, so the law is mirrored
            let sign = if side == Side::Positive { 1 } else { -1 };
            for m in -2..=2 {
                if w.shift_apply(m).virtual_dim() != nu - sign * m * r {
                    return Err(format!("shift law fails for m = {m} on {amb:?} {side:?}: {nu} -> {}", w.shift_apply(m).virtual_dim()));
                }
            }
            let v = PeriodicSubspace::<F3>::random(amb, side, k, &mut rng);
            let lo = w.intersect(&v).unwrap();
            let e = lo.window_exp().max(w.window_exp());
            let quotient = w.stored_in(e).dim() as i64 - lo.stored_in(e).dim() as i64;
            if !lo.is_sublattice_of(&w) || w.virtual_dim() - lo.virtual_dim() != quotient {
                return Err(format!("additivity fails on {amb:?} {side:?}"));
            }
        }
    }
    Ok("7 ambients x 500 lattices".into())
}

fn lattice_vectors(w: &PeriodicSubspace<F2>) -> Vec<LaurentVector<F2>> {
    let amb = w.ambient();
    w.space().all_vectors().iter().map(|v| LaurentVector::from_window(&amb, 1, v)).collect()
}

fn c3_oracle() -> Outcome {
    let lin = Ambient::new(2, Variant::Linear).unwrap();
    let sym = Ambient::new(2, Variant::Symplectic).unwrap();
    let form = InvariantForm::<F2>::new(sym).unwrap();
    // z on the window [-1, 1): degree -1 moves to degree 0, degree 0 leaves
    let z_stable = |s: &Subspace<F2>| {
        s.basis().iter().all(|b| {
            let mut v = vec![F2::zero(); 4];
            for i in 0..2 {
                v[lin.index(1, 0, i)] = b[lin.index(1, -1, i)];
            }
            s.contains_vector(&v)
        })
    };
    let mut count = 0;
    for d in 0..=4 {
        for s in Subspace::<F2>::grassmannian(4, d) {
            if !z_stable(&s) {
                continue;
            }
            count += 1;
            let w = PeriodicSubspace::from_window(lin, Side::Positive, 1, s.clone()).map_err(|e| e.to_string())?;
            // |W / zH+| = q^(nu + 2)
            let size = s.all_vectors().len();
            if size != 1 << (w.virtual_dim() + 2) {
                return Err(format!("nu mismatch on {:?}", s.basis()));
            }
            let ws = PeriodicSubspace::from_window(sym, Side::Positive, 1, s).map_err(|e| e.to_string())?;
            let mut gens = lattice_vectors(&ws);
            gens.extend((0..2).map(|i| LaurentVector::basis(1, i)));
            let iso = gens.iter().all(|a| gens.iter().all(|b| form.eval(a, b).is_zero()));
            if iso != form.is_isotropic(&ws) {
                return Err(format!("isotropy mismatch on {:?}", ws.space().basis()));
            }
            // perp lies between z^2 H+ and H+; test every vector of degrees 0 and 1
            let p = form.perp(&ws).map_err(|e| e.to_string())?;
            let mut inside = 0;
            for bits in 0u32..16 {
                let mut v = LaurentVector::zero();
                for (j, (d, i)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
                    if bits >> j & 1 == 1 {
                        v.add_term(d, i, F2::one());
                    }
                }
                let orth = gens.iter().all(|g| form.eval(&v, g).is_zero());
                if orth != p.contains(&v) {
                    return Err(format!("perp mismatch on {:?}", ws.space().basis()));
                }
                inside += orth as i64;
            }
            // |perp / z^2 H+| = 2^(nu(perp) + 4)
            if 1 << (p.virtual_dim() + 4) != inside {
                return Err("perp is larger than its window part".into());
            }
        }
    }
    Ok(format!("{count} lattices checked exhaustively"))
}

fn c4_thinness() -> Outcome {
    fn run<F: Field>(g: Geometry<F>, radius: usize, rng: &mut ChaCha8Rng) -> Result<usize, String> {
        let mut panels = 0;
        for i in 0..4 {
            let side = side_of(i);
            let frame = if i < 2 {
                Frame::standard(g)
            } else {
                let a = random_gallery(g, side, 3, 3, rng).unwrap().pop().unwrap();
                let b = random_gallery(g, side, 3, 3, rng).unwrap().pop().unwrap();
                common_apartment(&a, &b).map_err(|e| e.to_string())?.frame
            };
            let rep = thinness_check(&frame, side, radius).map_err(|e| e.to_string())?;
            if !rep.failures.is_empty() {
                return Err(format!("{}: {:?}", label(&g), rep.failures));
            }
            panels += rep.panels;
        }
        Ok(panels)
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut panels = run(geom::<F2>(TypeTag::A, 2), 3, &mut rng)?;
    panels += run(geom::<F2>(TypeTag::A, 3), 3, &mut rng)?;
    panels += run(geom::<F3>(TypeTag::C, 2), 3, &mut rng)?;
    panels += run(geom::<F3>(TypeTag::B, 3), 3, &mut rng)?;
    panels += run(geom::<F3>(TypeTag::D, 4), 3, &mut rng)?;
    Ok(format!("{panels} apartment panels"))
}

fn c5_thickness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let r = vec![
        thickness_check(geom::<F2>(TypeTag::A, 2), 20, 3, &mut rng),
        thickness_check(geom::<F2>(TypeTag::A, 3), 20, 3, &mut rng),
        thickness_check(geom::<F3>(TypeTag::A, 2), 20, 3, &mut rng),
        thickness_check(geom::<F3>(TypeTag::A, 3), 20, 3, &mut rng),
        thickness_check(geom::<F2>(TypeTag::C, 2), 20, 3, &mut rng),
        thickness_check(geom::<F3>(TypeTag::C, 3), 20, 3, &mut rng),
        thickness_check(geom::<F3>(TypeTag::B, 3), 20, 3, &mut rng),
        thickness_check(geom::<F3>(TypeTag::D, 4), 20, 3, &mut rng),
    ];
    reports(&r.into_iter().collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?)
}

fn c6_building() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let r = vec![
        building_axioms_check(geom::<F2>(TypeTag::A, 2), 100, 3, &mut rng),
        building_axioms_check(geom::<F2>(TypeTag::A, 3), 100, 3, &mut rng),
        building_axioms_check(geom::<F2>(TypeTag::C, 2), 100, 3, &mut rng),
        building_axioms_check(geom::<F2>(TypeTag::C, 3), 100, 3, &mut rng),
        building_axioms_check(geom::<F3>(TypeTag::B, 3), 100, 3, &mut rng),
        building_axioms_check(geom::<F3>(TypeTag::D, 4), 100, 3, &mut rng),
    ];
    reports(&r.into_iter().collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?)
}

fn c7_weyl_invariance() -> Outcome {
    fn run<F: Field>(g: Geometry<F>, samples: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
        let e = |e: twinlat::Error| e.to_string();
        for i in 0..samples {
            let side = side_of(i);
            let c = random_gallery(g, side, 3, 3, rng).map_err(e)?.pop().unwrap();
            let d = random_gallery(g, side, 3, 3, rng).map_err(e)?.pop().unwrap();
            let frame = common_apartment(&c, &d).map_err(e)?.frame;
            let faces = c.boundary();
            let f = &faces[rng.gen_range(1..faces.len())];
            let w = AffineWeylElement::random(g.ty(), rng.gen_range(1..6), rng);
            let img = frame.act_on_flag(&w, f).map_err(e)?;
            let nus = |x: &PeriodicFlag<F>| x.period_members().iter().map(|m| m.virtual_dim()).collect::<Vec<_>>();
            if img.type_k() != f.type_k() || nus(&img) != nus(f) {
                return Err(format!("{}: {w} changes the type or the virtual dimensions", label(&g)));
            }
        }
        Ok(())
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    run(geom::<F2>(TypeTag::A, 2), 40, &mut rng)?;
    run(geom::<F2>(TypeTag::A, 3), 40, &mut rng)?;
    run(geom::<F3>(TypeTag::C, 2), 40, &mut rng)?;
    run(geom::<F3>(TypeTag::B, 3), 40, &mut rng)?;
    run(geom::<F3>(TypeTag::D, 4), 40, &mut rng)?;
    Ok("200 (w, flag) pairs".into())
}

fn c8_one_twinning() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let r = vec![
        one_twinning_report(geom::<F2>(TypeTag::A, 2), 21, &mut rng),
        one_twinning_report(geom::<F2>(TypeTag::A, 3), 21, &mut rng),
        one_twinning_report(geom::<F3>(TypeTag::C, 2), 21, &mut rng),
        one_twinning_report(geom::<F3>(TypeTag::B, 3), 21, &mut rng),
        one_twinning_report(geom::<F3>(TypeTag::D, 4), 21, &mut rng),
    ];
    reports(&r.into_iter().collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?)
}

fn c9_codistance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let r = vec![
        codistance_axioms_check(geom::<F2>(TypeTag::A, 2), 2),
        codistance_axioms_check(geom::<F2>(TypeTag::A, 3), 2),
        codistance_axioms_check(geom::<F3>(TypeTag::C, 2), 2),
        codistance_axioms_check(geom::<F2>(TypeTag::C, 3), 2),
        codistance_axioms_check(geom::<F3>(TypeTag::B, 3), 2),
        codistance_axioms_check(geom::<F3>(TypeTag::D, 4), 2),
        codistance_consistency(geom::<F2>(TypeTag::A, 3), 50, 3, &mut rng),
        codistance_consistency(geom::<F3>(TypeTag::C, 2), 50, 3, &mut rng),
    ];
    reports(&r.into_iter().collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?)
}

fn c10_symplectic() -> Outcome {
    fn run<F: Field>(g: Geometry<F>, samples: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
        let e = |e: twinlat::Error| e.to_string();
        let form = *g.form().unwrap();
        let r = g.period() as i64;
        for i in 0..samples {
            let side = side_of(i);
            let c = random_gallery(g, side, 4, 3, rng).map_err(e)?.pop().unwrap();
            let faces = c.boundary();
            let partial = &faces[rng.gen_range(0..faces.len())];
            let full = partial.complete(rng).map_err(e)?;
            if !partial.is_face_of(&full) {
                return Err("completion drops a vertex".into());
            }
            let chain = full.chain();
            for k in 0..=r {
                let wk = g.chain_at(&chain, k);
                if form.perp(&g.chain_at(&chain, 2 * g.ty().n as i64 - k)).map_err(e)? != wk {
                    return Err(format!("{}: W_{k} is not the perp of W_(2n-k)", label(&g)));
                }
                if k < r && !g.chain_at(&chain, k + 1).is_sublattice_of(&wk) {
                    return Err("chain is not nested".into());
                }
            }
            let w = PeriodicSubspace::<F>::random(g.ambient(), side, 1 + i % 3, rng);
            if form.perp(&form.perp(&w).map_err(e)?).map_err(e)? != w {
                return Err("perp of perp differs".into());
            }
        }
        Ok(())
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    run(geom::<F2>(TypeTag::C, 2), 50, &mut rng)?;
    run(geom::<F3>(TypeTag::C, 2), 50, &mut rng)?;
    run(geom::<F2>(TypeTag::C, 3), 50, &mut rng)?;
    run(geom::<F3>(TypeTag::C, 3), 50, &mut rng)?;
    Ok("200 completed flags and random lattices".into())
}

fn random_poly<R: Rng>(rng: &mut R) -> LaurentPoly<F3> {
    LaurentPoly::new(-2, (0..5).map(|_| F3::from_u64(rng.gen_range(0..3))).collect())
}

/// Upper or lower unitriangular, or a monomial matrix `c_i z^(d_i)` on a
/// permutation; entries of degree at most 2 in absolute value.
fn random_matrix<R: Rng>(r: usize, rng: &mut R) -> (LaurentMatrix<F3>, i64) {
    let mut entries = vec![LaurentPoly::zero(); r * r];
    match rng.gen_range(0..3) {
        0 | 1 => {
            let upper = rng.gen_bool(0.5);
            for i in 0..r {
                entries[i * r + i] = LaurentPoly::constant(F3::one());
                for j in 0..r {
                    if (upper && j > i) || (!upper && j < i) {
                        entries[i * r + j] = random_poly(rng);
                    }
                }
            }
            (LaurentMatrix::new(r, entries), 0)
        }
        _ => {
            let mut perm: Vec<usize> = (0..r).collect();
            perm.sort_by_key(|_| rng.gen::<u32>());
            let mut ord = 0;
            for (i, &j) in perm.iter().enumerate() {
                let d = rng.gen_range(-2..=2);
                ord += d;
                entries[i * r + j] = LaurentPoly::monomial(F3::from_u64(rng.gen_range(1..3)), d);
            }
            (LaurentMatrix::new(r, entries), ord)
        }
    }
}

fn c11_equivariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let e = |e: twinlat::Error| e.to_string();
    for i in 0..50 {
        let g = geom::<F3>(TypeTag::A, 2 + i % 3);
        let n = g.period();
        let (m, ord) = random_matrix(n, &mut rng);
        if m.det_order() != Some(ord) {
            return Err("determinant order of the sample matrix".into());
        }
        let c = random_gallery(g, Side::Positive, 3, 3, &mut rng).map_err(e)?.pop().unwrap();
        let gc = c.group_apply(&m).map_err(e)?;
        let shift = |t: usize| (t as i64 + ord).rem_euclid(n as i64) as usize;
        let mut image_faces = BTreeSet::new();
        for f in c.boundary() {
            let gf = f.group_apply(&m).map_err(e)?;
            if gf.type_k() != f.type_k().into_iter().map(shift).collect() {
                return Err(format!("typeK does not follow the determinant order {ord}"));
            }
            if !gf.is_face_of(&gc) {
                return Err("image of a face is not a face of the image".into());
            }
            image_faces.insert(format!("{:?}", gf.to_json()));
        }
        let faces_of_image: BTreeSet<String> = gc.boundary().iter().map(|f| format!("{:?}", f.to_json())).collect();
        if image_faces != faces_of_image {
            return Err("boundary does not commute".into());
        }
        let d = random_gallery(g, Side::Positive, 3, 3, &mut rng).map_err(e)?.pop().unwrap();
        for (a, b) in c.vertices().values().zip(d.vertices().values()) {
            let (ga, gb) = (a.group_apply(&m).map_err(e)?, b.group_apply(&m).map_err(e)?);
            if incident(a, b) != incident(&ga, &gb) {
                return Err("incidence does not commute".into());
            }
        }
    }
    Ok("50 Laurent matrices on types A1..A3".into())
}

fn c12_determinism() -> Outcome {
    let cfg = SuiteConfig { seed: 7, window: 2, samples: 4, radius: 1 };
    let g = geom::<F2>(TypeTag::A, 2);
    let a = serde_json::to_string_pretty(&run_suite(g, cfg).map_err(|e| e.to_string())?).unwrap();
    let b = serde_json::to_string_pretty(&run_suite(g, cfg).map_err(|e| e.to_string())?).unwrap();
    let g = geom::<F3>(TypeTag::C, 2);
    let c = serde_json::to_string_pretty(&run_suite(g, cfg).map_err(|e| e.to_string())?).unwrap();
    let d = serde_json::to_string_pretty(&run_suite(g, cfg).map_err(|e| e.to_string())?).unwrap();
    if a == b && c == d {
        Ok(format!("{} and {} identical bytes", a.len(), c.len()))
    } else {
        Err("reports differ between runs".into())
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 12] = [
        ("coxeter relations", c1_coxeter),
        ("virtual dimension laws", c2_nu_laws),
        ("window oracle", c3_oracle),
        ("thinness", c4_thinness),
        ("thickness", c5_thickness),
        ("building axioms", c6_building),
        ("weyl invariance", c7_weyl_invariance),
        ("1-twinning", c8_one_twinning),
        ("codistance axioms", c9_codistance),
        ("symplectic duality", c10_symplectic),
        ("equivariance", c11_equivariance),
        ("determinism", c12_determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, msg) = match f() {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("criterion {:>2} {tag} {name}: {msg} ({:.1}s)", i + 1, t.elapsed().as_secs_f64());
    }
    println!("{} of 12 criteria passed in {:.1}s", 12 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
