//! Analytic layer against independent numerical oracles.

use quadrature::double_exponential::integrate;
use trofdm::analytic::{bessel_k_approx, const_a, const_a_series, ln_factorial, psi};

/// `K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt`, truncated where the
/// integrand falls below `exp(-60)` of its peak.
fn bessel_k_quad(nu: u32, x: f64) -> f64 {
    let t_max = (1.0 + 60.0 / x).acosh() + f64::from(nu) / x.max(1.0);
    let f = |t: f64| (-x * (t.cosh() - 1.0)).exp() * (f64::from(nu) * t).cosh();
    integrate(f, 0.0, t_max, 1e-14).integral * (-x).exp()
}

/// Hankel's large-argument expansion, truncated at its smallest term once
/// past the initial growth phase (`k > nu`).
fn bessel_k_hankel(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * f64::from(nu * nu);
    let (mut term, mut sum) = (1.0f64, 1.0f64);
    for k in 1..40 {
        let odd = f64::from(2 * k - 1);
        let next = term * (mu - odd * odd) / (f64::from(k) * 8.0 * x);
        if k > nu && next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term == 0.0 {
            break;
        }
    }
    (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() * sum
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn quadrature_oracle_reproduces_known_values() {
    // Abramowitz & Stegun table values.
    assert!(rel(bessel_k_quad(0, 1.0), 0.421_024_438_240_708_3) < 1e-12);
    assert!(rel(bessel_k_quad(1, 1.0), 0.601_907_230_197_234_6) < 1e-12);
    assert!(rel(bessel_k_quad(2, 2.0), 0.253_759_754_566_055_8) < 1e-12);
}

#[test]
fn series_matches_quadrature_at_moderate_argument() {
    // U = 3, x = 2: order 2.
    let got = bessel_k_approx(2, 2.0, 20).unwrap();
    let want = bessel_k_quad(2, 2.0);
    assert!(rel(got, want) < 1e-3, "{got} vs {want}");
    for nu in 3..=7 {
        for &x in &[0.5, 1.0, 2.0, 4.0] {
            let got = bessel_k_approx(nu, x, 20).unwrap();
            let want = bessel_k_quad(nu, x);
            assert!(rel(got, want) < 1e-3, "nu={nu} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn series_agrees_with_hankel_expansion_for_large_argument() {
    for nu in 3..=6 {
        let x = 15.0;
        let got = bessel_k_approx(nu, x, 20).unwrap();
        let want = bessel_k_hankel(nu, x);
        assert!(
            rel(want, bessel_k_quad(nu, x)) < 1e-9,
            "hankel oracle off at nu={nu}"
        );
        assert!(rel(got, want) < 1e-3, "nu={nu}: {got} vs {want}");
    }
}

#[test]
fn series_decreases_on_one_to_ten() {
    for nu in 3..=7 {
        let vals: Vec<f64> = (0..=90)
            .map(|i| bessel_k_approx(nu, 1.0 + 0.1 * f64::from(i), 20).unwrap())
            .collect();
        assert!(vals.iter().all(|v| *v > 0.0), "nu={nu}");
        assert!(vals.windows(2).all(|w| w[1] < w[0]), "nu={nu}");
    }
}

#[test]
fn series_converged_in_truncation_depth() {
    for nu in 4..=8 {
        for i in 0..=11 {
            let x = 0.5 + 0.5 * f64::from(i);
            let d10 = bessel_k_approx(nu, x, 10).unwrap();
            let d20 = bessel_k_approx(nu, x, 20).unwrap();
            assert!(rel(d10, d20) < 1e-6, "nu={nu} x={x}: {d10} vs {d20}");
        }
    }
}

#[test]
fn psi_small_case_by_hand() {
    // psi(3,1,1) = sqrt(pi) Gamma(6) Gamma(-3/2) L(1,1) / (2^2 Gamma(-5/2) Gamma(9/2) 1!)
    assert!(rel(psi(3, 1, 1).unwrap(), 80.0 / 7.0) < 1e-13);
}

/// `int_0^inf r^2 (4 r^U / Gamma(U)) K_{U-1}(2 r) dr` with `K` from `k`.
fn second_moment(bor: u32, k: impl Fn(u32, f64) -> f64) -> f64 {
    let ln_gamma_u = ln_factorial(bor - 1);
    let f = |r: f64| {
        if r <= 0.0 {
            return 0.0;
        }
        4.0 * (f64::from(bor + 2) * r.ln() - ln_gamma_u).exp() * k(bor - 1, 2.0 * r)
    };
    integrate(f, 0.0, 60.0, 1e-12).integral
}

#[test]
fn moment_oracle_for_const_a() {
    for bor in 4..=16u32 {
        let exact = second_moment(bor, bessel_k_quad);
        assert!(
            rel(exact, f64::from(bor)) < 1e-6,
            "oracle moment U={bor}: {exact}"
        );

        // The closed form is the same moment taken with the series, over 4U^2.
        let a = const_a(bor, 20).unwrap();
        let u = f64::from(bor);
        let four_a_u2 = 4.0 * a * u * u;
        assert!(
            (0.95..=1.05).contains(&(four_a_u2 / exact)),
            "U={bor}: {four_a_u2} vs {exact}"
        );
        assert!((0.95..=1.05).contains(&(4.0 * a * u)), "U={bor}");
    }
}

#[test]
fn const_a_equals_series_moment() {
    for bor in 4..=10u32 {
        let series = second_moment(bor, |nu, x| bessel_k_approx(nu, x, 20).unwrap());
        let u = f64::from(bor);
        let a = const_a(bor, 20).unwrap();
        assert!(rel(4.0 * a * u * u, series) < 1e-8, "U={bor}");
    }
}

#[test]
fn const_a_positive_from_three_up() {
    for bor in 3..=16 {
        assert!(const_a(bor, 20).unwrap() > 0.0);
    }
    assert!(const_a_series(2, 20).unwrap() < 0.0);
}
