//! Reference values computed independently in 50-digit arithmetic and frozen here.

use num_complex::Complex64;
use tractlab::fncat::{eval_mittag_leffler, FunctionSpec};
use tractlab::schroeder::{fixed_point, SchroederSolution};

fn polar(r: f64, t: f64) -> Complex64 {
    Complex64::from_polar(r, t)
}

fn rel(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm()
}

#[test]
fn mittag_leffler_reference_values() {
    let cases = [
        (0.5, Complex64::new(10.0, 0.0), Complex64::new(5.3762342836322709e43, 0.0)),
        (0.5, Complex64::new(-10.0, 0.0), Complex64::new(0.056140992743822586, 0.0)),
        (0.7, polar(30.0, 2.5), Complex64::new(0.0090103890943905211, 0.0069579882287836773)),
        (0.9, Complex64::new(-50.0, 0.0), Complex64::new(0.002175353076856976, 0.0)),
        (1.5, polar(40.0, 2.0), Complex64::new(3.7953813228603904, -9.7336750159989774)),
        (1.5, polar(40.0, 3.0), Complex64::new(-0.0094970045390132151, -0.0056922247690196384)),
        (0.8, polar(25.0, 1.0), Complex64::new(-52956989.833869423, 19765388.421590865)),
        (1.8, polar(60.0, 2.9), Complex64::new(-0.39070464945306181, -0.11315941636778372)),
        (0.3, polar(3.0, -2.0), Complex64::new(0.13481974098130285, -0.19318333800135286)),
        (1.2, polar(12.0, 0.4), Complex64::new(-1279.7566117264215, 778.78153410576984)),
    ];
    for (alpha, z, want) in cases {
        let got = eval_mittag_leffler(alpha, z).unwrap();
        // small values in the decay sector come out of a cancelling series,
        // so they are held to an absolute bound instead
        assert!((got - want).norm() <= 1e-9 * want.norm().max(1.0), "E_{alpha}({z}) = {got}, expected {want}");
    }
}

#[test]
fn closed_forms() {
    let e1 = FunctionSpec::mittag_leffler(1.0).build().unwrap();
    let z = Complex64::new(3.0, -2.0);
    assert!(rel(e1.eval(z).unwrap(), z.exp()) < 1e-12);
    let e2 = FunctionSpec::mittag_leffler(2.0).build().unwrap();
    let z = Complex64::new(4.0, 1.5);
    assert!(rel(e2.eval(z * z).unwrap(), z.cosh()) < 1e-9);
}

#[test]
fn fixed_points() {
    let cases = [
        (0.1, 35.771520639572972, 3.5771520639572972),
        (0.2, 12.713206788867632, 2.5426413577735264),
        (0.3, 5.9377900780720920, 1.781337023421627612),
    ];
    for (beta, xi, mu) in cases {
        let s = fixed_point(beta).unwrap();
        assert!((s.xi - xi).abs() <= 1e-10 * xi, "beta {beta}: xi {}", s.xi);
        assert!((s.mu - mu).abs() <= 1e-10 * mu, "beta {beta}: mu {}", s.mu);
    }
    let s = fixed_point(0.05).unwrap();
    assert!((s.xi - 89.995105770469751).abs() < 1e-8);
}

#[test]
fn koenigs_values() {
    let cases = [
        (0.2, 13.0, 0.28157244278527186),
        (0.2, 20.0, 5.0352149516782798),
        (0.2, 1e6, 36.096952729070668),
        (0.2, 1e8, 40.044209433378154),
        (0.3, 13.0, 3.1382886374612985),
        (0.3, 20.0, 4.1534438767146585),
        (0.3, 1e6, 9.7990332014612003),
        (0.3, 1e8, 10.420764054500925),
        (0.1, 1e6, 138.18233068783912),
        (0.1, 1e8, 161.01651113030810),
    ];
    for (beta, x, want) in cases {
        let got = SchroederSolution::new(beta).unwrap().phi(x).unwrap();
        assert!((got - want).abs() <= 1e-9 * want, "Phi_{beta}({x}) = {got}, expected {want}");
    }
}
