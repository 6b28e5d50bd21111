use involucalc::algebra::matrix::exact_rank;
use involucalc::algebra::{GaussRat, Poly, RatFun};
use involucalc::hull::{f_chain, f_chain_consistent, hull_chain, word_value_at_0};
use involucalc::structure::fixtures::*;
use involucalc::structure::{kernel_vectors, theta_of_b, KernelMode, KernelVector, Provenance};

#[test]
fn three_w_nondegenerate() {
    let def = three_w();
    let ks = kernel_vectors(&def, KernelMode::Auto).unwrap();
    let ch = hull_chain(&def, &ks.vectors, 8).unwrap();
    let order = ch.nondeg_order.expect("nondegenerate");
    assert!(order <= 2, "order {order}");
}

#[test]
fn modulus_weighted_witness_words() {
    let (k, l) = (1u32, 2u32);
    let def = modulus_weighted(k, l);
    let v = def.vars();
    let t = Poly::var(v, def.t(0));
    let b = vec![t.pow(l), -&t.pow(k)];
    let th = theta_of_b(&def, &b);
    let comps: Vec<RatFun> = th.cz.iter().chain(th.cw.iter()).cloned().collect();
    let mut w1 = vec![0usize];
    w1.extend(std::iter::repeat(1).take((k + l + 1) as usize));
    let rows = vec![
        word_value_at_0(&def, &w1, &comps).unwrap(),
        word_value_at_0(&def, &vec![1; l as usize], &comps).unwrap(),
        word_value_at_0(&def, &vec![1; k as usize], &comps).unwrap(),
    ];
    assert_eq!(exact_rank(&rows), 3);
    let kv = KernelVector { b, provenance: Provenance::User };
    let ch = hull_chain(&def, &[kv], 8).unwrap();
    assert_eq!(ch.nondeg_order, Some((k + l + 2) as usize));
}

#[test]
fn monomial_family_kronecker_witness() {
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
    let ks = kernel_vectors(&def, KernelMode::User(vec![b.clone()])).unwrap();
    let comps: Vec<RatFun> = b.iter().cloned().map(RatFun::from_poly).collect();
    for (j, a) in hat.iter().enumerate() {
        let mut word = vec![0usize; a[0] as usize];
        word.extend(std::iter::repeat(1).take(a[1] as usize));
        let fact: i64 = a.iter().map(|&e| (1..=e as i64).product::<i64>()).product();
        let val = word_value_at_0(&def, &word, &comps).unwrap();
        for (m, x) in val.iter().enumerate() {
            let expect = if m == j { GaussRat::from_int(lambda[j] * fact) } else { GaussRat::zero() };
            assert_eq!(*x, expect, "alpha {:?} slot {}", a, m);
        }
    }
    let fc = f_chain(&def, &ks.vectors, 8).unwrap();
    assert_eq!(fc.nondeg_order, Some(4));
    let hc = hull_chain(&def, &ks.vectors, 8).unwrap();
    assert!(f_chain_consistent(&hc, &fc));
}
