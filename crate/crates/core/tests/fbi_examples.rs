use involucalc::algebra::{GaussRat, Poly};
use involucalc::approx::{normal_form_vars, NormalFormField};
use involucalc::fbi::*;
use num_complex::Complex64;

const BOX: (f64, f64) = (-DEFAULT_BOX, DEFAULT_BOX);

fn sample(f: &(dyn Fn(f64, f64) -> Complex64 + Sync), n: usize) -> SampledData {
    SampledData::from_fn(BOX, BOX, n, n, Some(Window::default()), |x, t| vec![f(x, t)]).unwrap()
}

fn scan_with(f: &(dyn Fn(f64, f64) -> Complex64 + Sync), n: usize, kappa: f64) -> FbiScan {
    let radii = geometric_radii(1.0, 100.0, 12);
    direction_scan(&sample(f, n), kappa, (0.0, 0.0), DEFAULT_DIRECTIONS, &radii, ScanConfig::default()).unwrap()
}

fn scan(f: &(dyn Fn(f64, f64) -> Complex64 + Sync)) -> FbiScan {
    scan_with(f, DEFAULT_INTERVALS, DEFAULT_KAPPA)
}

fn gaussian(x: f64, t: f64) -> Complex64 {
    Complex64::new((-(x * x + t * t) * 4.0).exp(), 0.0)
}

fn heaviside(x: f64, _t: f64) -> Complex64 {
    Complex64::new(if x >= 0.0 { 1.0 } else { 0.0 }, 0.0)
}

#[test]
fn gaussian_is_smooth_everywhere() {
    let s = scan(&gaussian);
    assert!(s.classes.iter().all(|c| *c == Classification::Smooth), "{:?}", s.slopes);
}

#[test]
fn gaussian_verdict_stable_under_kappa_change() {
    for kappa in [0.5 * DEFAULT_KAPPA, 2.0 * DEFAULT_KAPPA] {
        let s = scan_with(&gaussian, DEFAULT_INTERVALS, kappa);
        assert!(s.classes.iter().all(|c| *c != Classification::Singular), "kappa {kappa}: {:?}", s.slopes);
    }
}

#[test]
fn heaviside_singular_in_x() {
    let s = scan(&heaviside);
    let dir = |a, b| s.classes[s.nearest_direction(a, b)];
    assert_eq!(dir(1.0, 0.0), Classification::Singular, "{:?}", s.slopes);
    assert_eq!(dir(-1.0, 0.0), Classification::Singular, "{:?}", s.slopes);
    assert_eq!(dir(0.0, 1.0), Classification::Smooth, "{:?}", s.slopes);
    assert_eq!(dir(0.0, -1.0), Classification::Smooth, "{:?}", s.slopes);
}

#[test]
fn mizohata_side_matches_sign_condition() {
    let v = normal_form_vars(1);
    let miz = NormalFormField::new(vec![-&Poly::var(&v, 1)], None).unwrap();
    let holds_dir = if sign_condition(&miz, &[GaussRat::one()]).unwrap().holds { 1.0 } else { -1.0 };
    for delta in [0.1, 0.05, 0.025] {
        let flat = move |x: f64, _t: f64| Complex64::new(1.0, 0.0) / Complex64::new(x, delta);
        let exact = move |x: f64, t: f64| Complex64::new(1.0, 0.0) / Complex64::new(x, 0.5 * t * t + delta);
        let data: [&(dyn Fn(f64, f64) -> Complex64 + Sync); 2] = [&flat, &exact];
        for f in data {
            let s = scan(f);
            let good = s.slopes[s.nearest_direction(holds_dir, 0.0)];
            let bad = s.slopes[s.nearest_direction(-holds_dir, 0.0)];
            assert!(good <= bad - 2.0, "delta {delta}: {good} vs {bad}");
        }
    }
}

#[test]
fn quadrature_converges_for_gaussian() {
    let coarse = scan(&gaussian);
    let fine = scan_with(&gaussian, 2 * DEFAULT_INTERVALS, DEFAULT_KAPPA);
    let peak = coarse.magnitudes.iter().flatten().cloned().fold(0.0, f64::max);
    for (a, b) in coarse.magnitudes.iter().flatten().zip(fine.magnitudes.iter().flatten()) {
        if *b > 1e-10 * peak {
            assert!((a - b).abs() <= 0.01 * b, "{a} vs {b}");
        }
    }
}
