//! Acceptance criteria 1–7. Prints one PASS/FAIL line per criterion.

mod common;

use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{ideal, monomial, q, rand_nonunit, rand_poly};
use hironaka::approx::{cm_counterexample_runner, example82_ideal, perturb, random_deltas, PerturbationSpec};
use hironaka::diagram::{diagram_of, hilbert_samuel, oracle_jet_quotient_dim, reduction_exponent, FlatVerdict};
use hironaka::division::{hironaka_divide, Region};
use hironaka::equising::{
    build_tower, distinct_root_count_check, distinct_roots_by_gcd, expand_delta, generalized_discriminant,
    validate_tower, weierstrass_prepare, TowerOptions,
};
use hironaka::stdbasis::complete;
use hironaka::syntax::{parse_expression, ParseContext};
use hironaka::{Exponent, LinearForm, Precision, PrecisionSeries};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e3(a: u32, b: u32, c: u32) -> Exponent {
    Exponent::from([a, b, c])
}

fn criterion1() -> Check {
    let mut notes = Vec::new();
    for mu in [8u64, 12] {
        let r = cm_counterexample_runner(mu, "z").map_err(|e| e.to_string())?;
        for c in &r.claims {
            ensure(c.pass, format!("μ={mu}: claim {} failed: {}", c.name, c.detail))?;
        }
        let mut v = r.vertices.clone();
        v.sort();
        let mut want = vec![e3(8, 0, 0), e3(0, 5, 0), e3(2, 3, 0)];
        want.sort();
        ensure(v == want, format!("μ={mu}: vertices {v:?}"))?;
        ensure(r.flat.verdict == FlatVerdict::Flat, format!("μ={mu}: I not flat"))?;
        ensure(
            r.perturbed_flat.verdict == FlatVerdict::NotFlatAtMu,
            format!("μ={mu}: perturbed ideal judged flat"),
        )?;
        let z_vertex = r
            .perturbed_flat
            .attempts
            .iter()
            .flat_map(|a| a.vertices.iter())
            .any(|v| v[2] > 0);
        ensure(z_vertex, format!("μ={mu}: no adjoined vertex with z-component"))?;
        ensure(r.all_pass, format!("μ={mu}: report not all-pass"))?;
        notes.push(format!("μ={mu} ok"));
    }
    Ok(notes.join(", "))
}

fn criterion2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut steps = 0usize;
    for inst in 0..500 {
        let n = rng.gen_range(1..=3usize);
        let form = match rng.gen_range(0..3) {
            0 => LinearForm::standard(n),
            1 => LinearForm::from_integers(&(0..n).map(|_| rng.gen_range(1..=3u64)).collect::<Vec<_>>()).unwrap(),
            _ => LinearForm::new((0..n).map(|_| BigRational::new(rng.gen_range(1..=5i64).into(), 2.into())).collect())
                .unwrap(),
        };
        let mu = q(rng.gen_range(2..=10));
        let f = rand_poly(&mut rng, &form, 8, 10);
        let t = rng.gen_range(1..=4usize);
        let gs: Vec<_> = (0..t).map(|_| rand_nonunit(&mut rng, &form, 3, 2, 6)).collect();
        let d = hironaka_divide(&f, &gs, &form, &mu).map_err(|e| format!("instance {inst}: {e}"))?;
        steps += d.steps;
        // reconstruction up to μ, computed independently of `verify`
        let cp = &d.certified_prec;
        ensure(cp == &mu, format!("instance {inst}: certified {cp} ≠ μ"))?;
        let mut acc = d.remainder.as_polynomial().sub(&f.truncate(cp).as_polynomial()).unwrap();
        for (qi, gi) in d.quotients.iter().zip(&gs) {
            acc = acc.add(&qi.as_polynomial().mul(gi).unwrap()).unwrap();
        }
        ensure(acc.truncate(cp).is_empty(), format!("instance {inst}: reconstruction fails"))?;
        // support regions
        for (i, qi) in d.quotients.iter().enumerate() {
            let head = &d.partition.heads()[i];
            for e in qi.terms().keys() {
                ensure(
                    d.partition.region_of(&e.add(head)) == Region::Delta(i),
                    format!("instance {inst}: quotient {i} leaves Δ_{i}"),
                )?;
            }
        }
        for e in d.remainder.terms().keys() {
            ensure(
                !d.partition.heads().iter().any(|h| e.is_multiple_of(h)),
                format!("instance {inst}: remainder term {e} divisible by a head"),
            )?;
        }
        ensure(d.verify(&f, &gs).is_ok(), format!("instance {inst}: verify rejects"))?;
        // permuted term enumeration
        let mut terms: Vec<_> = f.terms().iter().map(|(e, c)| (e.clone(), c.clone())).collect();
        terms.shuffle(&mut rng);
        let f2 = PrecisionSeries::from_terms(form.clone(), Precision::Exact, terms);
        let d2 = hironaka_divide(&f2, &gs, &form, &mu).unwrap();
        ensure(d2 == d, format!("instance {inst}: permutation changed the output"))?;
    }
    Ok(format!("500 instances, {steps} reduction steps"))
}

fn criterion3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ideals = Vec::new();
    for i in 0..49 {
        let n = rng.gen_range(1..=3usize);
        let form = LinearForm::standard(n);
        let count = rng.gen_range(1..=3);
        let gens: Vec<_> = (0..count)
            .map(|_| match i % 3 {
                0 => monomial(&form, rand_nonunit(&mut rng, &form, 0, 4, 4).terms().keys().next().unwrap()),
                1 => rand_nonunit(&mut rng, &form, 1, 4, 5),
                _ => rand_nonunit(&mut rng, &form, 3, 3, 5),
            })
            .collect();
        ideals.push(ideal(gens));
    }
    ideals.push(example82_ideal(None, 6).map_err(|e| e.to_string())?);
    for (idx, i) in ideals.iter().enumerate() {
        let form = LinearForm::standard(i.dim());
        let b = complete(i, &form, &q(6)).map_err(|e| e.to_string())?;
        let hs = hilbert_samuel(&b, 6).map_err(|e| e.to_string())?;
        for eta in 0..=6u64 {
            let o = oracle_jet_quotient_dim(i, eta).map_err(|e| e.to_string())?;
            ensure(
                hs.values[eta as usize] as usize == o,
                format!("ideal {idx}, η={eta}: staircase {} vs oracle {o}", hs.values[eta as usize]),
            )?;
        }
    }
    Ok(format!("{} ideals, η ≤ 6", ideals.len()))
}

fn staircase_upto(b: &hironaka::stdbasis::CertifiedBasis, l: u32) -> Vec<Exponent> {
    let d = diagram_of(b).unwrap();
    let n = d.n;
    let mut out = Vec::new();
    let mut stack = vec![vec![0u32; n]];
    while let Some(v) = stack.pop() {
        let deg: u32 = v.iter().sum();
        let e = Exponent::new(v.clone());
        if d.contains(&e) {
            out.push(e);
        }
        if deg < l {
            let last = v.iter().rposition(|&x| x > 0).unwrap_or(0);
            for j in last..n {
                let mut w = v.clone();
                w[j] += 1;
                stack.push(w);
            }
        }
    }
    out.sort();
    out
}

fn criterion4() -> Check {
    let mu = 6u64;
    let muq = q(mu as i64);
    let window = q(mu as i64 + 4);
    let form2 = LinearForm::standard(2);
    let base = ideal(vec![monomial(&form2, &[2, 0]), monomial(&form2, &[0, 3])]);
    let b0 = complete(&base, &form2, &window).map_err(|e| e.to_string())?;
    let v0 = diagram_of(&b0).unwrap().vertices;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for t in 0..20 {
        let deltas = random_deltas(2, 2, mu + 1, 3, &mut rng);
        let p = perturb(&PerturbationSpec {
            base: base.clone(),
            mu: muq.clone(),
            form: form2.clone(),
            deltas,
        })
        .map_err(|e| e.to_string())?;
        let b = complete(&p.ideal, &form2, &window).map_err(|e| e.to_string())?;
        let v = diagram_of(&b).unwrap().vertices;
        ensure(v == v0, format!("perturbation {t}: vertices {v:?} vs {v0:?}"))?;
    }
    // infinite complement: agreement on each level up to μ and containment
    let form3 = LinearForm::standard(3);
    let cases = [
        ideal(vec![monomial(&form2, &[1, 1])]),
        ideal(vec![monomial(&form2, &[2, 0])]),
        ideal(vec![
            parse_expression("x^2 - y*z", &ParseContext::standard(&["x", "y", "z"], 12)).unwrap(),
            monomial(&form3, &[0, 3, 0]),
        ]),
        ideal(vec![monomial(&form3, &[1, 1, 0]), monomial(&form3, &[0, 1, 1])]),
    ];
    let mut seeds = 0;
    for (ci, base) in cases.iter().enumerate() {
        let n = base.dim();
        let form = LinearForm::standard(n);
        let b0 = complete(base, &form, &window).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let deltas = random_deltas(n, base.len(), mu + 1, 3, &mut rng);
            let p = perturb(&PerturbationSpec {
                base: base.clone(),
                mu: muq.clone(),
                form: form.clone(),
                deltas,
            })
            .map_err(|e| e.to_string())?;
            let b = complete(&p.ideal, &form, &window).map_err(|e| e.to_string())?;
            let s0 = staircase_upto(&b0, mu as u32);
            let s1 = staircase_upto(&b, mu as u32);
            ensure(s0 == s1, format!("case {ci}: staircases differ below degree {mu}"))?;
            let d1 = diagram_of(&b).unwrap();
            ensure(
                s0.iter().all(|e| d1.contains(e)),
                format!("case {ci}: containment fails"),
            )?;
            seeds += 1;
        }
    }
    Ok(format!("20 finite-colength perturbations, {seeds} infinite-complement perturbations"))
}

fn criterion5() -> Check {
    for p in 1..=4 {
        for j in 1..=p {
            let red = generalized_discriminant(p, j).map_err(|e| e.to_string())?;
            ensure(red.substitute_elementary() == expand_delta(p, j), format!("round trip p={p} j={j}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for t in 0..200 {
        let p = rng.gen_range(1..=4usize);
        let mut mults = Vec::new();
        let mut left = p;
        while left > 0 {
            let m = rng.gen_range(1..=left);
            mults.push(m);
            left -= m;
        }
        let mut roots: Vec<BigRational> = Vec::new();
        while roots.len() < mults.len() {
            let r = BigRational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=4).into());
            if !roots.contains(&r) {
                roots.push(r);
            }
        }
        let mut c = vec![q(1)];
        for (r, &m) in roots.iter().zip(&mults) {
            for _ in 0..m {
                let mut next = vec![q(0); c.len() + 1];
                for (i, ci) in c.iter().enumerate() {
                    next[i + 1] += ci;
                    next[i] -= ci * r;
                }
                c = next;
            }
        }
        c.pop();
        let j = distinct_root_count_check(&c, p).map_err(|e| e.to_string())?;
        ensure(
            j == p - mults.len(),
            format!("polynomial {t}: multiplicities {mults:?} but j = {j}"),
        )?;
        ensure(distinct_roots_by_gcd(&c) == mults.len(), format!("polynomial {t}: gcd count"))?;
    }
    Ok("round trips for p ≤ 4, 200 polynomials".into())
}

fn criterion6() -> Check {
    let ctx = ParseContext::standard(&["x", "y"], 10);
    let mut shapes = Vec::new();
    for (src, want) in [("y^2 - x^3", vec![(2, 2), (1, 3)]), ("y^2 - x^2", vec![(2, 2), (1, 2)])] {
        let g = parse_expression(src, &ctx).unwrap();
        let t = build_tower(&[g], 10, 0, &TowerOptions::default()).map_err(|e| e.to_string())?;
        let shape: Vec<(usize, usize)> = t.levels.iter().map(|l| (l.i, l.p)).collect();
        ensure(shape == want, format!("{src}: levels {shape:?}"))?;
        ensure(t.levels[0].j == 1, format!("{src}: Δ_1 vanishes at the top"))?;
        let v = validate_tower(&t).map_err(|e| e.to_string())?;
        ensure(v.all_pass, format!("{src}: validation {:?}", v.conditions))?;
        shapes.push(format!("{src}: {shape:?}"));
    }
    // p = 2: Δ_1 = 4A_0 − A_1^2 at A_0 = −x^3, A_1 = 0 gives −4x^3
    let cusp = build_tower(&[parse_expression("y^2 - x^3", &ctx).unwrap()], 10, 0, &TowerOptions::default()).unwrap();
    let d = &cusp.levels[0].discriminant;
    ensure(
        d.len() == 1 && d.coeff(&Exponent::from([3])) == q(-4),
        format!("cusp discriminant {d}"),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let form = LinearForm::standard(2);
    for t in 0..20 {
        let mut f = rand_poly(&mut rng, &form, 6, 8);
        f = f.sub(&PrecisionSeries::constant(form.clone(), f.constant_term())).unwrap();
        let r = rng.gen_range(1..=4u32);
        f = f.add(&monomial(&form, &[0, r])).unwrap();
        let w = weierstrass_prepare(&f, 1, 10).map_err(|e| format!("sample {t}: {e}"))?;
        let diff = w.unit.as_polynomial().mul(&w.poly.as_polynomial()).unwrap().sub(&f).unwrap();
        ensure(diff.truncate(&q(10)).is_empty(), format!("sample {t}: f ≢ uP up to 10"))?;
        ensure(w.unit_constant != q(0), format!("sample {t}: u(0) = 0"))?;
        ensure(w.coeffs.iter().all(|a| a.constant_term() == q(0)), format!("sample {t}: not distinguished"))?;
    }
    Ok(shapes.join("; "))
}

fn criterion7() -> Check {
    let form2 = LinearForm::standard(2);
    let x2y3 = ideal(vec![monomial(&form2, &[2, 0]), monomial(&form2, &[0, 3])]);
    let mut notes = Vec::new();
    for (name, i, k, want_d) in [
        ("(x^2, y^3)", x2y3, 2usize, 3u64),
        ("flat family", example82_ideal(None, 14).map_err(|e| e.to_string())?, 2, 11),
    ] {
        let eta = want_d + 3;
        let r = reduction_exponent(&i, k, eta).map_err(|e| e.to_string())?;
        ensure(r.d == want_d, format!("{name}: d = {}", r.d))?;
        ensure(r.checks.iter().all(|c| c.1), format!("{name}: a degree-(d+1) monomial is missing"))?;
        let ms: Vec<u64> = r.identities.iter().map(|c| c.m).collect();
        ensure(ms == vec![1, 2], format!("{name}: identities checked for m in {ms:?}"))?;
        ensure(r.identities.iter().all(|c| c.holds), format!("{name}: identity fails {:?}", r.identities))?;
        notes.push(format!("{name}: d={} at η={}", r.d, r.eta));
    }
    Ok(notes.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Check, Duration); 7] = [
        ("flat family and its perturbation", criterion1, Duration::from_secs(10)),
        ("division property suite", criterion2, Duration::from_secs(60)),
        ("Hilbert-Samuel vs oracle", criterion3, Duration::from_secs(120)),
        ("perturbation stability", criterion4, Duration::from_secs(60)),
        ("generalized discriminants", criterion5, Duration::from_secs(60)),
        ("tower construction", criterion6, Duration::from_secs(30)),
        ("reduction identities", criterion7, Duration::from_secs(120)),
    ];
    let mut failed = Vec::new();
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (verdict, detail) = match &outcome {
            Ok(d) if took <= *budget => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d}; over budget {budget:?}")),
            Err(e) => ("FAIL", e.clone()),
        };
        println!("criterion {}: {verdict} {name} ({:.2?}) {detail}", k + 1, took);
        if verdict == "FAIL" {
            failed.push(k + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
