use involucalc::algebra::{GaussRat, Poly, VarSet};
use involucalc::autosys::{check_candidate, direct_residuals, generate_system, Part, RealVectorFieldSym};
use involucalc::structure::fixtures::power_curve;
use involucalc::structure::StructureDef;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_real_poly(v: &VarSet, idx: &[usize], rng: &mut ChaCha8Rng) -> Poly {
    let mut p = Poly::zero(v);
    for _ in 0..rng.gen_range(1..5) {
        let mut e = vec![0u32; v.len()];
        for &i in idx {
            e[i] = rng.gen_range(0..3);
        }
        p = &p + &Poly::monomial(v, e, GaussRat::from_int(rng.gen_range(-3..=3)));
    }
    p
}

/// The four real equations for `X = a ∂t + b ∂s1 + c ∂s2` on the power curve, written out by hand.
fn hand_system(def: &StructureDef, k: u32, l: u32, a: &Poly, b: &Poly, c: &Poly) -> [Poly; 4] {
    let v = def.vars();
    let (s1, s2, t) = (def.s(0), def.s(1), def.t(0));
    let tp = |e: u32| Poly::var(v, t).pow(e);
    [
        &(&b.derivative(t) + &(&tp(2 * l) * &a.derivative(s1))) + &(&tp(l + k) * &a.derivative(s2)),
        &(&(&tp(l) * a).derivative(t) - &(&tp(l) * &b.derivative(s1))) - &(&tp(k) * &b.derivative(s2)),
        &(&c.derivative(t) + &(&tp(l + k) * &a.derivative(s1))) + &(&tp(2 * k) * &a.derivative(s2)),
        &(&(&tp(k) * a).derivative(t) - &(&tp(l) * &c.derivative(s1))) - &(&tp(k) * &c.derivative(s2)),
    ]
}

fn candidate(def: &StructureDef, a: &Poly, b: &Poly, c: &Poly) -> RealVectorFieldSym {
    let mut coeffs = vec![Poly::zero(def.vars()); def.n_coords()];
    coeffs[def.t(0)] = a.clone();
    coeffs[def.s(0)] = b.clone();
    coeffs[def.s(1)] = c.clone();
    RealVectorFieldSym::new(coeffs).unwrap()
}

#[test]
fn generated_system_matches_hand_derivation() {
    let (k, l) = (1u32, 2u32);
    let def = power_curve(k, l);
    let sys = generate_system(&def);
    assert_eq!(sys.complex_count, 2);
    assert!(sys.equations.iter().all(|e| e.multiplier == Poly::one(def.vars())));
    let v = def.vars().clone();
    let idx = [def.s(0), def.s(1), def.t(0)];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let (a, b, c) = (
            random_real_poly(&v, &idx, &mut rng),
            random_real_poly(&v, &idx, &mut rng),
            random_real_poly(&v, &idx, &mut rng),
        );
        let x = candidate(&def, &a, &b, &c);
        let hand = hand_system(&def, k, l, &a, &b, &c);
        for eq in &sys.equations {
            let slot = 2 * eq.integral + if eq.part == Part::Re { 0 } else { 1 };
            assert_eq!(eq.residual(&x), hand[slot], "integral {} part {:?}", eq.integral, eq.part);
        }
        let expect = hand.iter().all(|h| h.is_zero());
        assert_eq!(check_candidate(&def, &x).unwrap().is_automorphism(), expect);
        assert_eq!(direct_residuals(&def, &x).iter().all(|r| r.is_zero()), expect);
    }
}

#[test]
fn known_automorphisms_of_power_curve() {
    let (k, l) = (2u32, 3u32);
    let def = power_curve(k, l);
    let v = def.vars();
    let one = Poly::one(v);
    let zero = Poly::zero(v);
    let s1 = Poly::var(v, def.s(0));
    let s2 = Poly::var(v, def.s(1));
    let t = Poly::var(v, def.t(0));
    let euler = candidate(
        &def,
        &t,
        &s1.scale(&GaussRat::from_int(l as i64 + 1)),
        &s2.scale(&GaussRat::from_int(k as i64 + 1)),
    );
    for x in [candidate(&def, &zero, &one, &zero), candidate(&def, &zero, &zero, &one), euler] {
        assert!(check_candidate(&def, &x).unwrap().is_automorphism());
    }
    let bad = candidate(&def, &one, &zero, &zero);
    assert!(!check_candidate(&def, &bad).unwrap().is_automorphism());
    let wrong_weight = candidate(&def, &t, &s1, &s2);
    assert!(!check_candidate(&def, &wrong_weight).unwrap().is_automorphism());
}
