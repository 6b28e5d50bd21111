//! Acceptance criteria. Each criterion prints one PASS/FAIL line with its runtime and budget.

use std::io::Write;
use std::time::{Duration, Instant};

use involucalc::algebra::matrix::{exact_rank, rat_inverse};
use involucalc::algebra::{GaussRat, Inertia, Poly, RatFun, VarSet};
use involucalc::approx::*;
use involucalc::autosys::{check_against, generate_system, Part, RealVectorFieldSym};
use involucalc::bundle::*;
use involucalc::fbi::*;
use involucalc::hull::{f_chain, hull_chain, word_value_at_0};
use involucalc::loci::{exceptional_locus_check, loci_report, LocusVerdict};
use involucalc::structure::fixtures::*;
use involucalc::structure::{
    kernel_vectors, levi_form, structure_constants, theta_of_b, KernelMode, KernelVector, Provenance, StructureDef,
    VectorFieldSym,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn origin(def: &StructureDef) -> Vec<GaussRat> {
    vec![GaussRat::zero(); def.n_coords()]
}

fn ds(def: &StructureDef) -> Vec<GaussRat> {
    let mut xi = origin(def);
    xi[def.s(0)] = GaussRat::one();
    xi
}

fn small_poly(v: &VarSet, rng: &mut ChaCha8Rng, constant: i64) -> Poly {
    let mut p = Poly::constant(v, GaussRat::from_int(constant));
    for i in 0..v.len() {
        let c = rng.gen_range(-1..=1);
        if c != 0 {
            p = &p + &Poly::var(v, i).scale(&GaussRat::from_int(c));
        }
    }
    p
}

/// Identity plus random linear entries, so `det T(0) = 1`.
fn random_t(v: &VarSet, r: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<RatFun>> {
    (0..r).map(|a| (0..r).map(|b| RatFun::from_poly(small_poly(v, rng, (a == b) as i64))).collect()).collect()
}

fn random_section(v: &VarSet, r: usize, rng: &mut ChaCha8Rng) -> Vec<RatFun> {
    (0..r)
        .map(|_| {
            let c = rng.gen_range(-2..=2);
            RatFun::from_poly(small_poly(v, rng, c))
        })
        .collect()
}

fn dot(a: &[RatFun], b: &[RatFun]) -> RatFun {
    let mut acc = RatFun::zero(a[0].vars());
    for (x, y) in a.iter().zip(b) {
        acc = &acc + &(x * y);
    }
    acc
}

/// The structure frame with the second field rescaled by `1 + x1`, so the frame no longer commutes.
fn skewed_base(def: &StructureDef) -> Vec<VectorFieldSym> {
    let v = def.vars();
    let f = RatFun::from_poly(&Poly::one(v) + &Poly::var(v, def.x(0)));
    vec![def.frame()[0].clone(), def.frame()[1].scale(&f)]
}

fn fixtures() -> Vec<(String, StructureDef)> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for pos in 0..=n {
            out.push((format!("mizohata{{{pos},{}}}", n - pos), mizohata_type(pos, n)));
        }
    }
    out.push(("power(1,2)".into(), power_curve(1, 2)));
    out.push(("power(2,3)".into(), power_curve(2, 3)));
    out.push(("three_w".into(), three_w()));
    out.push(("modulus(1,2)".into(), modulus_weighted(1, 2)));
    out
}

fn frame_annihilation() -> Outcome {
    for (name, def) in fixtures() {
        let det = RatFun::from_poly(def.jacobians().det_w_s.clone());
        for (j, l) in def.frame().iter().enumerate() {
            for (i, f) in def.first_integrals().iter().enumerate() {
                let r = &det * &l.apply_poly(f);
                ensure(r.is_zero(), || format!("{name}: det W_s L{} F{} = {r}", j + 1, i + 1))?;
            }
        }
    }
    Ok(())
}

fn involutivity_and_flatness() -> Outcome {
    for (name, def) in fixtures() {
        let frame = def.frame();
        let c = structure_constants(frame).map_err(|e| format!("{name}: {e}"))?;
        for j in 0..frame.len() {
            for k in 0..frame.len() {
                let mut res = frame[j].bracket(&frame[k]);
                for (l, f) in frame.iter().enumerate() {
                    res = res.sub(&f.scale(&c[j][k][l]));
                }
                ensure(res.is_zero(), || format!("{name}: [L{}, L{}] residual {res}", j + 1, k + 1))?;
            }
        }
        let tp = canonical_tprime_bundle(&def).map_err(|e| format!("{name}: {e}"))?;
        ensure(tp.connection().iter().flatten().flatten().all(RatFun::is_zero), || format!("{name}: T' connection nonzero"))?;
    }
    let cases: Vec<(StructureDef, bool)> =
        vec![(mizohata(&[1, -1]), false), (power_curve(1, 2), false), (heisenberg_times_line(), true), (three_w(), false)];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (def, skew) in cases {
        let base = if skew { skewed_base(&def) } else { def.frame().to_vec() };
        let b = tprime_bundle_over(&def, base).map_err(|e| e.to_string())?;
        let v = def.vars().clone();
        for round in 0..5 {
            let t = random_t(&v, b.rank(), &mut rng);
            let changed = frame_change(&b, &t).map_err(|e| e.to_string())?;
            let verdict = flatness_check(&changed);
            ensure(verdict == FlatnessVerdict::Flat, || format!("{def:?} round {round}: {verdict}"))?;
        }
    }
    Ok(())
}

fn levi_signatures() -> Outcome {
    for n in 1..=3 {
        for pos in 0..=n {
            let def = mizohata_type(pos, n);
            let rep = levi_form(&def, &origin(&def), &ds(&def)).map_err(|e| e.to_string())?;
            let want = Inertia { pos, neg: n - pos, zero: 0 };
            ensure(rep.inertia == want, || format!("type {{{pos},{}}}: {:?}", n - pos, rep.inertia))?;
        }
    }
    Ok(())
}

fn nondegeneracy_orders() -> Outcome {
    let def = power_curve(1, 2);
    let ks = kernel_vectors(&def, KernelMode::Auto).map_err(|e| e.to_string())?;
    let ch = hull_chain(&def, &ks.vectors, 8).map_err(|e| e.to_string())?;
    ensure(ch.nondeg_order == Some(2), || format!("power(1,2) order {:?}", ch.nondeg_order))?;

    let def = three_w();
    let ks = kernel_vectors(&def, KernelMode::Auto).map_err(|e| e.to_string())?;
    let ch = hull_chain(&def, &ks.vectors, 8).map_err(|e| e.to_string())?;
    ensure(ch.nondeg_order.is_some(), || "three_w degenerate".into())?;

    let (k, l) = (1u32, 2u32);
    let def = modulus_weighted(k, l);
    let t = Poly::var(def.vars(), def.t(0));
    let b = vec![t.pow(l), -&t.pow(k)];
    let th = theta_of_b(&def, &b);
    let comps: Vec<RatFun> = th.cz.iter().chain(th.cw.iter()).cloned().collect();
    let mut w1 = vec![0usize];
    w1.extend(std::iter::repeat(1).take((k + l + 1) as usize));
    let rows = vec![
        word_value_at_0(&def, &w1, &comps).map_err(|e| e.to_string())?,
        word_value_at_0(&def, &vec![1; l as usize], &comps).map_err(|e| e.to_string())?,
        word_value_at_0(&def, &vec![1; k as usize], &comps).map_err(|e| e.to_string())?,
    ];
    ensure(exact_rank(&rows) == 3, || format!("modulus witness words span {}", exact_rank(&rows)))?;
    let ch = hull_chain(&def, &[KernelVector { b, provenance: Provenance::User }], 8).map_err(|e| e.to_string())?;
    ensure(ch.nondeg_order.is_some(), || "modulus example degenerate".into())?;

    let alphas = vec![vec![2u32, 0], vec![1, 1], vec![0, 2]];
    let def = monomial_family(&alphas);
    let v = def.vars();
    let lambda = [1i64, -2, 1];
    let hat: Vec<Vec<u32>> = (0..3)
        .map(|j| (0..2).map(|r| (0..3).filter(|&k| k != j).map(|k| alphas[k][r]).sum()).collect())
        .collect();
    let b: Vec<Poly> = (0..3)
        .map(|j| {
            let mut e = vec![0u32; 3];
            e.extend_from_slice(&hat[j]);
            Poly::monomial(v, e, GaussRat::from_int(lambda[j]))
        })
        .collect();
    let comps: Vec<RatFun> = b.iter().cloned().map(RatFun::from_poly).collect();
    for (j, a) in hat.iter().enumerate() {
        let mut word = vec![0usize; a[0] as usize];
        word.extend(std::iter::repeat(1).take(a[1] as usize));
        let fact: i64 = a.iter().map(|&e| (1..=e as i64).product::<i64>()).product();
        let val = word_value_at_0(&def, &word, &comps).map_err(|e| e.to_string())?;
        for (m, x) in val.iter().enumerate() {
            let expect = if m == j { GaussRat::from_int(lambda[j] * fact) } else { GaussRat::zero() };
            ensure(*x == expect, || format!("monomial witness alpha {a:?} slot {m}: {x}"))?;
        }
    }
    let ks = kernel_vectors(&def, KernelMode::User(vec![b])).map_err(|e| e.to_string())?;
    let fc = f_chain(&def, &ks.vectors, 8).map_err(|e| e.to_string())?;
    ensure(fc.nondeg_order.is_some(), || "monomial F-chain does not reach C^d".into())
}

fn loci() -> Outcome {
    match exceptional_locus_check(&three_w()) {
        LocusVerdict::Yes(Some(w)) => {
            let t1 = Poly::var(w.minor.vars(), three_w().t(0));
            let want = RatFun::from_poly(t1.pow(2).scale(&GaussRat::from_int(2)));
            ensure(w.minor == want, || format!("three_w minor {}", w.minor))?;
        }
        other => return Err(format!("three_w exceptional: {other}")),
    }
    for (k, l) in [(1u32, 2u32), (2, 3)] {
        let def = power_curve(k, l);
        let ks = kernel_vectors(&def, KernelMode::Auto).map_err(|e| e.to_string())?;
        let ch = hull_chain(&def, &ks.vectors, 8).map_err(|e| e.to_string())?;
        let rep = loci_report(&def, &ks.vectors, &ch);
        let t = Poly::var(def.vars(), def.t(0));
        let want = t.pow(k + l - 1).scale(&GaussRat::from_int(k as i64 - l as i64));
        match &rep.degeneracy {
            LocusVerdict::Yes(Some(w)) => {
                let m = w.minor.as_poly().unwrap_or_else(|| Poly::zero(def.vars()));
                ensure(m == want || m == -&want, || format!("power({k},{l}) minor {}", w.minor))?;
            }
            other => return Err(format!("power({k},{l}) degeneracy: {other}")),
        }
    }
    let def = modulus_weighted(1, 2);
    let ks = kernel_vectors(&def, KernelMode::Auto).map_err(|e| e.to_string())?;
    let ch = hull_chain(&def, &ks.vectors, 8).map_err(|e| e.to_string())?;
    let rep = loci_report(&def, &ks.vectors, &ch);
    ensure(matches!(rep.exceptional, LocusVerdict::NotEstablished), || format!("modulus exceptional: {}", rep.exceptional))
}

fn automorphism_system() -> Outcome {
    let (k, l) = (1u32, 2u32);
    let def = power_curve(k, l);
    let sys = generate_system(&def);
    let v = def.vars().clone();
    let (s1, s2, t) = (def.s(0), def.s(1), def.t(0));
    let tp = |e: u32| Poly::var(&v, t).pow(e);
    let hand = |a: &Poly, b: &Poly, c: &Poly| {
        [
            &(&b.derivative(t) + &(&tp(2 * l) * &a.derivative(s1))) + &(&tp(l + k) * &a.derivative(s2)),
            &(&(&tp(l) * a).derivative(t) - &(&tp(l) * &b.derivative(s1))) - &(&tp(k) * &b.derivative(s2)),
            &(&c.derivative(t) + &(&tp(l + k) * &a.derivative(s1))) + &(&tp(2 * k) * &a.derivative(s2)),
            &(&(&tp(k) * a).derivative(t) - &(&tp(l) * &c.derivative(s1))) - &(&tp(k) * &c.derivative(s2)),
        ]
    };
    let sv = |i: usize| Poly::var(&v, i);
    let euler = [sv(t), sv(s1).scale(&GaussRat::from_int(l as i64 + 1)), sv(s2).scale(&GaussRat::from_int(k as i64 + 1))];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut autos = 0;
    for trial in 0..10 {
        let mut abc = [Poly::zero(&v), Poly::zero(&v), Poly::zero(&v)];
        if trial % 2 == 0 {
            let (c0, c1, c2) = (rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(-3..=3));
            abc[1] = Poly::constant(&v, GaussRat::from_int(c0));
            abc[2] = Poly::constant(&v, GaussRat::from_int(c1));
            for (slot, e) in abc.iter_mut().zip(&euler) {
                *slot = &*slot + &e.scale(&GaussRat::from_int(c2));
            }
        }
        if trial % 4 != 0 {
            for slot in abc.iter_mut() {
                let mut e = vec![0u32; v.len()];
                for i in [s1, s2, t] {
                    e[i] = rng.gen_range(0..3);
                }
                *slot = &*slot + &Poly::monomial(&v, e, GaussRat::from_int(rng.gen_range(-2..=2)));
            }
        }
        let mut coeffs = vec![Poly::zero(&v); def.n_coords()];
        coeffs[t] = abc[0].clone();
        coeffs[s1] = abc[1].clone();
        coeffs[s2] = abc[2].clone();
        let x = RealVectorFieldSym::new(coeffs).map_err(|e| e.to_string())?;
        let generated = check_against(&sys, &x).is_automorphism();
        let by_hand = hand(&abc[0], &abc[1], &abc[2]).iter().all(Poly::is_zero);
        ensure(generated == by_hand, || format!("trial {trial}: generated {generated}, hand {by_hand}"))?;
        for eq in &sys.equations {
            let slot = 2 * eq.integral + if eq.part == Part::Re { 0 } else { 1 };
            ensure(eq.residual(&x) == hand(&abc[0], &abc[1], &abc[2])[slot], || format!("trial {trial}: equation mismatch"))?;
        }
        autos += generated as usize;
    }
    ensure(autos > 0 && autos < 10, || format!("degenerate sample: {autos}/10 automorphisms"))
}

fn psi_relation() -> Outcome {
    let v = normal_form_vars(1);
    let (x, t) = (Poly::var(&v, 0), Poly::var(&v, 1));
    let miz = NormalFormField::new(vec![-&t], None).map_err(|e| e.to_string())?;
    ensure(psi_relation_check(&miz, 0, 8) == PsiVerdict::Holds, || "Mizohata psi relation fails".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let monos = [x.pow(2), &x * &t, t.pow(2), x.clone(), t.clone()];
    let mut b = Poly::zero(&v);
    for m in &monos {
        b = &b + &m.scale(&GaussRat::from_frac(rng.gen_range(-4..=4), rng.gen_range(1..=3)));
    }
    let f = NormalFormField::new(vec![b.clone()], None).map_err(|e| e.to_string())?;
    match psi_relation_check(&f, 0, 8) {
        PsiVerdict::Holds => Ok(()),
        PsiVerdict::Fails { l, .. } => Err(format!("random b = {b}: fails at l = {l}")),
    }
}

fn approximate_flatness() -> Outcome {
    let v = normal_form_vars(1);
    let (x, t) = (Poly::var(&v, 0), Poly::var(&v, 1));
    let b = -&(&t * &(&Poly::one(&v) + &x.pow(2).scale(&GaussRat::from_frac(1, 2))));
    let f = NormalFormField::new(vec![b], None).map_err(|e| e.to_string())?;
    let jet = symbolic_powers(&f, &[x], 8).map_err(|e| e.to_string())?;
    ensure(jet.recursion_holds(&f), || "recursion fails".into())?;
    ensure(jet.formal_identity_holds(&f), || "s-derivatives of D1 u at s = 0 do not vanish".into())?;
    let plan = plan_cutoffs(&jet, SampleBox::unit(2, DEFAULT_GRID)).map_err(|e| e.to_string())?;
    let cert = assemble_numeric(&jet, &plan).map_err(|e| e.to_string())?.certificate();
    for k in 0..=7 {
        ensure(cert.supports_order(k), || format!("slope {:?} below {} - 0.2", cert.slope, k))?;
    }
    Ok(())
}

fn fbi_scan(f: &(dyn Fn(f64, f64) -> Complex64 + Sync)) -> Result<FbiScan, String> {
    let range = (-DEFAULT_BOX, DEFAULT_BOX);
    let data = SampledData::from_fn(range, range, DEFAULT_INTERVALS, DEFAULT_INTERVALS, Some(Window::default()), |x, t| vec![f(x, t)])
        .map_err(|e| e.to_string())?;
    let radii = geometric_radii(1.0, 100.0, 12);
    direction_scan(&data, DEFAULT_KAPPA, (0.0, 0.0), DEFAULT_DIRECTIONS, &radii, ScanConfig::default()).map_err(|e| e.to_string())
}

fn fbi_correlation() -> Outcome {
    let v = normal_form_vars(1);
    let miz = NormalFormField::new(vec![-&Poly::var(&v, 1)], None).map_err(|e| e.to_string())?;
    let holds_dir = if sign_condition(&miz, &[GaussRat::one()]).map_err(|e| e.to_string())?.holds { 1.0 } else { -1.0 };
    for delta in [0.1, 0.05, 0.025] {
        let flat = move |x: f64, _t: f64| Complex64::new(1.0, 0.0) / Complex64::new(x, delta);
        let exact = move |x: f64, t: f64| Complex64::new(1.0, 0.0) / Complex64::new(x, 0.5 * t * t + delta);
        let data: [(&str, &(dyn Fn(f64, f64) -> Complex64 + Sync)); 2] = [("1/(x+i delta)", &flat), ("1/(x+i t^2/2+i delta)", &exact)];
        for (name, f) in data {
            let s = fbi_scan(f)?;
            let good = s.slopes[s.nearest_direction(holds_dir, 0.0)];
            let bad = s.slopes[s.nearest_direction(-holds_dir, 0.0)];
            ensure(good <= bad - 2.0, || format!("{name}, delta {delta}: slopes {good:.2} vs {bad:.2}"))?;
        }
    }
    let s = fbi_scan(&|x, t| Complex64::new((-(x * x + t * t) * 4.0).exp(), 0.0))?;
    ensure(s.classes.iter().all(|c| *c == Classification::Smooth), || format!("Gaussian slopes {:?}", s.slopes))?;
    let s = fbi_scan(&|x, _| Complex64::new(if x >= 0.0 { 1.0 } else { 0.0 }, 0.0))?;
    for dir in [1.0, -1.0] {
        let i = s.nearest_direction(dir, 0.0);
        ensure(s.classes[i] == Classification::Singular, || format!("Heaviside {dir}x slope {:.2}", s.slopes[i]))?;
    }
    Ok(())
}

fn bundle_dualities() -> Outcome {
    let def = heisenberg_times_line();
    let v = def.vars().clone();
    let base = skewed_base(&def);
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tp = tprime_bundle_over(&def, base.clone()).map_err(|e| e.to_string())?;
        let b1 = frame_change(&tp, &random_t(&v, 2, &mut rng)).map_err(|e| e.to_string())?;
        let line = VBundle::trivial(base.clone(), 1).map_err(|e| e.to_string())?;
        let b2 = frame_change(&line, &random_t(&v, 1, &mut rng)).map_err(|e| e.to_string())?;
        let dual = dual_bundle(&b1);
        ensure(dual_bundle(&dual).connection() == b1.connection(), || format!("seed {seed}: dual of dual"))?;
        let omega = random_section(&v, 2, &mut rng);
        let eta = random_section(&v, 2, &mut rng);
        for (j, l) in b1.base().iter().enumerate() {
            let lhs = l.apply(&dot(&eta, &omega));
            let rhs = &dot(&dual.covariant(j, &eta), &omega) + &dot(&eta, &b1.covariant(j, &omega));
            ensure(lhs == rhs, || format!("seed {seed}: pairing identity at L{}", j + 1))?;
        }
        for (name, b) in [("dual", dual), ("tensor", tensor_bundle(&b1, &b2).map_err(|e| e.to_string())?)] {
            ensure(flatness_check(&b) == FlatnessVerdict::Flat, || format!("seed {seed}: {name} not flat"))?;
        }
        let r = 1 + (seed % 3) as usize;
        let flat = VBundle::trivial(base.clone(), r).map_err(|e| e.to_string())?;
        let t = random_t(&v, r, &mut rng);
        let changed = frame_change(&flat, &t).map_err(|e| e.to_string())?;
        let tinv = rat_inverse(&t).ok_or("random frame change not invertible")?;
        let verdict = is_integrating_frame(&changed, &tinv).map_err(|e| e.to_string())?;
        ensure(verdict == IntegratingVerdict::Integrating, || format!("seed {seed}: {verdict}"))?;
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, u64, fn() -> Outcome)> = vec![
        ("frame annihilation", 5, frame_annihilation),
        ("involutivity and flatness", 10, involutivity_and_flatness),
        ("Levi signatures", 2, levi_signatures),
        ("nondegeneracy orders", 30, nondegeneracy_orders),
        ("loci", 5, loci),
        ("automorphism system", 10, automorphism_system),
        ("psi relation", 10, psi_relation),
        ("approximate-solution flatness", 60, approximate_flatness),
        ("FBI correlation", 300, fbi_correlation),
        ("kernel/bundle dualities", 30, bundle_dualities),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(budget);
        let status = if outcome.is_ok() && !over { "PASS" } else { "FAIL" };
        let mut line = format!("acceptance {:>2} {status} {name} ({:.2} s, budget {budget} s)", i + 1, elapsed.as_secs_f64());
        if let Err(msg) = &outcome {
            line += &format!(": {msg}");
        } else if over {
            line += ": over budget";
        }
        writeln!(err, "{line}").unwrap();
        if status == "FAIL" {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
