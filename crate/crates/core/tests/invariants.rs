use circum_core::dynamics::{
    chebyshev_polynomial, interval_criterion, julia_sample, koenigs_coordinate, poincare_eval, JuliaSampleConfig,
    KoenigsChart,
};
use circum_core::sphere::{fit_circline, PointCloud};
use circum_core::{Complex, ExtendedComplex, Mobius, Polynomial, RationalMap};

fn poly(asc: &[f64]) -> RationalMap {
    RationalMap::polynomial(Polynomial::from_real(asc))
}

fn small_sample(f: &RationalMap) -> PointCloud {
    let cfg = JuliaSampleConfig { n_points: 1500, seed: 3, ..JuliaSampleConfig::default() };
    julia_sample(f, &cfg).unwrap().cloud
}

#[test]
fn julia_samples_are_forward_invariant() {
    let m = Mobius::new(Complex::new(1.0, 0.0), Complex::new(0.5, 0.0), Complex::new(0.2, 0.3), Complex::new(1.0, 0.0))
        .unwrap();
    let z2 = poly(&[0.0, 0.0, 1.0]);
    let conj = z2.conjugate(&m).unwrap();
    for f in [poly(&[-2.0, 0.0, 1.0]), z2, conj] {
        let cloud = small_sample(&f);
        let fit = fit_circline(&cloud).unwrap();
        let images: Vec<ExtendedComplex> = cloud.points().iter().map(|&p| f.eval(p)).collect();
        let worst = images.iter().map(|&p| fit.circline.residual(p)).fold(0.0, f64::max);
        assert!(worst < 1e-6, "{f:?}: {worst}");
        let refit = fit_circline(&PointCloud::new(images).unwrap()).unwrap();
        assert!(refit.circline.distance(&fit.circline) < 1e-6);
    }
}

#[test]
fn interval_criterion_confines_samples() {
    let t3 = RationalMap::polynomial(chebyshev_polynomial(3));
    let beta = (1.0 + 13f64.sqrt()) / 2.0;
    for (f, a, b) in [(poly(&[-2.0, 0.0, 1.0]), -2.0, 2.0), (t3, -2.0, 2.0), (poly(&[-3.0, 0.0, 1.0]), -beta, beta)] {
        let report = interval_criterion(&f, a, b).unwrap();
        assert!(report.verdict, "{report:?}");
        for p in small_sample(&f).points() {
            let z = p.finite().unwrap();
            assert!(z.im.abs() < 1e-9 && z.re >= a - 1e-9 && z.re <= b + 1e-9, "{z}");
        }
    }
}

#[test]
fn koenigs_and_poincare_are_inverse() {
    let f = poly(&[-2.0, 0.0, 1.0]);
    let chart = KoenigsChart::new(&f).unwrap().with_validity_radius(0.2).unwrap();
    for k in 0..12 {
        let t = std::f64::consts::TAU * k as f64 / 12.0;
        let z = chart.p() + Complex::from_polar(0.1, t);
        let phi = koenigs_coordinate(&chart, z).unwrap();
        let (back, _) = poincare_eval(&chart, phi, 30).unwrap();
        assert!((back.finite().unwrap() - z).norm() < 1e-7, "{back:?} vs {z}");
    }
}

#[test]
fn poincare_satisfies_the_functional_equation() {
    let f = poly(&[-2.0, 0.0, 1.0]);
    let chart = KoenigsChart::new(&f).unwrap();
    let lambda = chart.lambda();
    for z in [Complex::new(0.3, 0.0), Complex::new(0.1, 0.4), Complex::new(-0.5, -0.2)] {
        let (lhs, _) = poincare_eval(&chart, lambda * z, 35).unwrap();
        let (inner, _) = poincare_eval(&chart, z, 34).unwrap();
        let rhs = f.eval(inner);
        assert!(lhs.chordal(&rhs) < 1e-9, "{lhs:?} vs {rhs:?}");
    }
}
