use std::f64::consts::PI;

use num_complex::Complex64;
use risber::ber_exact::{
    ber_chf, ber_chf_detailed, g_kernel, g_kernel_complex, QuadratureSpec, Shift, Truncation,
};
use risber::phase_stats::{chf_x, ChfMethod};
use risber::quad::{integrate, integrate_breaks, QuadTol};
use risber::specfun::{erfc, ln_gamma, Tolerance};
use risber::{Error, RisConfig};

fn cfg(n: usize, l: u32) -> RisConfig {
    RisConfig::new(n, l).unwrap()
}

fn db(d: f64) -> f64 {
    10f64.powf(d / 10.0)
}

fn exact(rho: f64, c: RisConfig) -> f64 {
    ber_chf(rho, c, QuadratureSpec::default()).unwrap()
}

// For L = 2, x is a sum of N Exp(2) variables, so the BER is a
// one-dimensional average of erfc(sqrt(rho) x) / 2 over a gamma density.
fn two_level_oracle(rho: f64, n: usize) -> f64 {
    let nf = n as f64;
    let ln_norm = nf * 2f64.ln() - ln_gamma(nf).unwrap();
    let f = |x: f64| {
        if x == 0.0 {
            return if n == 1 { 0.5 * nf.exp2() } else { 0.0 };
        }
        0.5 * erfc(rho.sqrt() * x).unwrap() * (ln_norm + (nf - 1.0) * x.ln() - 2.0 * x).exp()
    };
    let scale = 1.0 / rho.sqrt();
    let mut breaks: Vec<f64> = [0.0, scale, 10.0 * scale, 100.0 * scale, 1e3 * scale]
        .into_iter()
        .filter(|&b| b < 60.0)
        .collect();
    breaks.push(60.0);
    integrate_breaks(f, &breaks, QuadTol::new(1e-300, 1e-13, 2000)).unwrap().value
}

#[test]
fn single_element_two_level_closed_form() {
    for d in [-5.0, 0.0, 10.0, 20.0, 30.0, 40.0] {
        let rho = db(d);
        let closed = 0.5 * (1.0 - (1.0 / rho).exp() * erfc(1.0 / rho.sqrt()).unwrap());
        let v = exact(rho, cfg(1, 2));
        assert!(((v - closed) / closed).abs() < 1e-7, "{d} dB: {v} vs {closed}");
    }
}

#[test]
fn two_level_matches_gamma_average() {
    for n in [1, 2, 3, 5, 6, 8] {
        for d in [0.0, 10.0, 20.0, 30.0, 40.0, 50.0] {
            let rho = db(d);
            let oracle = two_level_oracle(rho, n);
            let v = exact(rho, cfg(n, 2));
            assert!(((v - oracle) / oracle).abs() < 1e-9, "N={n} {d} dB: {v} vs {oracle}");
        }
    }
}

#[test]
fn decreasing_in_snr_up_to_40db() {
    for n in [1, 3, 5, 6] {
        for l in [2, 3, 4, 8] {
            let c = cfg(n, l);
            let curve: Vec<f64> = (0..=40).map(|d| exact(db(d as f64), c)).collect();
            assert!(curve.iter().all(|&p| p > 0.0 && p <= 0.5));
            assert!(curve.windows(2).all(|w| w[1] < w[0]), "N={n} L={l}: {curve:?}");
        }
    }
}

#[test]
fn decreasing_in_elements_and_levels() {
    for d in [0.0, 10.0, 20.0] {
        let rho = db(d);
        for l in [2, 3, 4, 8] {
            let by_n: Vec<f64> = (1..=6).map(|n| exact(rho, cfg(n, l))).collect();
            assert!(by_n.windows(2).all(|w| w[1] < w[0]), "L={l} {d} dB: {by_n:?}");
        }
        for n in [1, 2, 4] {
            let by_l: Vec<f64> = [2, 3, 4, 8].iter().map(|&l| exact(rho, cfg(n, l))).collect();
            assert!(by_l.windows(2).all(|w| w[1] < w[0]), "N={n} {d} dB: {by_l:?}");
        }
    }
}

#[test]
fn folded_integral_equals_two_sided() {
    for (n, l, d) in [(1, 3, 10.0), (2, 4, 5.0), (2, 8, 15.0)] {
        let c = cfg(n, l);
        let rho = db(d);
        let detailed = ber_chf_detailed(rho, c, QuadratureSpec::default()).unwrap();
        let tol = Tolerance::new(1e-15, 1e-13).unwrap();
        let f = |t: f64| g_kernel(t) * chf_x(t, rho, c, ChfMethod::Exact(tol)).unwrap().conj();
        let t = detailed.t_max;
        let q = QuadTol::new(1e-14, 1e-11, 4000);
        let breaks = [-t, -1.0, -1e-3, 0.0, 1e-3, 1.0, t];
        let two_sided: Complex64 = integrate_breaks(f, &breaks, q).unwrap().value / (2.0 * PI);
        assert!(two_sided.im.abs() < 1e-12, "imaginary part {}", two_sided.im);
        let gap = (two_sided.re - detailed.ber).abs();
        assert!(gap <= 1e-8 * detailed.ber + detailed.tail_bound, "N={n} L={l}: gap {gap}");
    }
}

#[test]
fn tail_bound_covers_the_truncated_part() {
    for (n, l, d) in [(1, 3, 0.0), (1, 4, 30.0), (3, 3, 20.0), (5, 4, 10.0)] {
        let c = cfg(n, l);
        let rho = db(d);
        let auto = ber_chf_detailed(rho, c, QuadratureSpec::default()).unwrap();
        let longer = QuadratureSpec {
            t_max: Truncation::Fixed(16.0 * auto.t_max),
            ..QuadratureSpec::default()
        };
        let reference = ber_chf_detailed(rho, c, longer).unwrap();
        let gap = (reference.ber - auto.ber).abs();
        assert!(
            gap <= auto.tail_bound + auto.abs_err + reference.abs_err,
            "N={n} L={l} {d} dB: gap {gap} bound {}",
            auto.tail_bound
        );
    }
}

fn hyp1f1_series(a: f64, b: f64, x: f64) -> f64 {
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 0..200 {
        let k = k as f64;
        term *= (a + k) / (b + k) * x / (k + 1.0);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

#[test]
fn kernel_real_part_matches_hypergeometric_series() {
    for i in 0..=80 {
        let t = 0.05 * i as f64;
        let series = 0.5 / PI.sqrt() * hyp1f1_series(1.0, 1.5, -t * t / 4.0);
        assert!((g_kernel(t).re - series).abs() < 1e-13, "t={t}");
    }
}

#[test]
fn kernel_matches_its_defining_integral() {
    // G(t) = int_0^inf erfc(y)/2 e^{jty} dy
    for t in [1e-4, 2e-3, 0.5, 2.0, 7.0] {
        let f = |y: f64| Complex64::new(0.0, t * y).exp() * (0.5 * erfc(y).unwrap());
        let q = integrate(f, 0.0, 7.0, QuadTol::new(1e-16, 1e-14, 2000)).unwrap().value;
        assert!((g_kernel(t) - q).norm() < 1e-12, "t={t}");
    }
}

#[test]
fn kernel_branches_agree_at_the_switch() {
    let below = g_kernel(1e-3 * (1.0 - 1e-12));
    let above = g_kernel(1e-3 * (1.0 + 1e-12));
    assert!((below - above).norm() < 1e-12);
}

#[test]
fn combined_chf_shrinks_with_elements() {
    let tol = Tolerance::default();
    for l in [2, 3, 4, 8] {
        for t in [0.1, 1.0, 10.0] {
            let mags: Vec<f64> =
                (1..=6).map(|n| chf_x(t, 10.0, cfg(n, l), ChfMethod::Exact(tol)).unwrap().norm()).collect();
            assert!(mags.windows(2).all(|w| w[1] <= w[0]));
        }
    }
}

#[test]
fn integrand_decays_fast_enough() {
    // |G chf_x| falls at least as t^-(N+1) for large t.
    let tol = Tolerance::default();
    for n in [1, 2, 4] {
        let c = cfg(n, 4);
        let mag = |t: f64| g_kernel(t).norm() * chf_x(t, 10.0, c, ChfMethod::Exact(tol)).unwrap().norm();
        let slope = (mag(1e4).ln() - mag(1e3).ln()) / 10f64.ln();
        assert!(slope <= -(n as f64 + 1.0) + 0.05, "N={n}: slope {slope}");
    }
}

// Gauss-Chebyshev acceleration against the adaptive CHF over the Fig. 1 grid.
#[test]
fn gcq_path_matches_exact_path() {
    let gcq = QuadratureSpec::gcq(20).unwrap();
    let mut worst: f64 = 0.0;
    for l in [2, 3, 4] {
        let c = cfg(5, l);
        for d in 0..=30 {
            let rho = db(d as f64);
            let e = exact(rho, c);
            let g = ber_chf(rho, c, gcq).unwrap();
            worst = worst.max(((g - e) / e).abs());
        }
    }
    assert!(worst <= 1e-6, "largest relative difference {worst:.3e}");
}

#[test]
fn complex_kernel_continues_the_real_one() {
    for t in [-30.0, -2.0, -0.4, -1e-4, 0.0, 1e-4, 0.3, 0.49, 0.51, 2.0, 9.0, 30.0] {
        let a = g_kernel_complex(Complex64::new(t, 0.0));
        assert!((a - g_kernel(t)).norm() < 1e-15, "t={t}: {a} vs {}", g_kernel(t));
    }
}

#[test]
fn complex_kernel_matches_its_defining_integral() {
    for s in [
        Complex64::new(0.0, -0.3),
        Complex64::new(0.2, -0.4),
        Complex64::new(-1.0, -4.0),
        Complex64::new(-3.0, -9.0),
        Complex64::new(5.0, 2.0),
    ] {
        let f = |y: f64| (Complex64::i() * s * y).exp() * (0.5 * erfc(y).unwrap());
        let q = integrate(f, 0.0, 12.0, QuadTol::new(1e-300, 1e-13, 4000)).unwrap().value;
        let g = g_kernel_complex(s);
        assert!(((g - q) / q.norm()).norm() < 1e-11, "s={s}: {g} vs {q}");
    }
}

#[test]
fn complex_kernel_branches_agree() {
    for arg in [0.0, 1.0, 2.5, 4.0] {
        let unit = Complex64::from_polar(1.0, arg);
        let below = g_kernel_complex(unit * (0.5 - 1e-12));
        let above = g_kernel_complex(unit * (0.5 + 1e-12));
        assert!(((below - above) / below.norm()).norm() < 1e-12);
    }
}

#[test]
fn result_does_not_depend_on_the_shift() {
    for (n, l, d) in [(1, 3, 0.0), (2, 4, 10.0), (3, 8, 5.0), (4, 2, 15.0)] {
        let c = cfg(n, l);
        let rho = db(d);
        let on_line = |shift| {
            let q = QuadratureSpec { shift, ..QuadratureSpec::default() };
            ber_chf_detailed(rho, c, q).unwrap()
        };
        let saddle = on_line(Shift::Saddle);
        assert!(saddle.shift > 0.0);
        for shift in [Shift::Fixed(0.0), Shift::Fixed(0.5), Shift::Fixed(3.0)] {
            let v = on_line(shift).ber;
            assert!(((v - saddle.ber) / saddle.ber).abs() < 1e-9, "N={n} L={l} {shift:?}");
        }
    }
}

#[test]
fn real_line_reports_its_precision_floor() {
    let q = QuadratureSpec { shift: Shift::Fixed(0.0), ..QuadratureSpec::default() };
    let r = ber_chf(db(40.0), cfg(6, 4), q);
    assert!(matches!(r, Err(Error::Convergence { .. })), "{r:?}");
    assert!(ber_chf(db(40.0), cfg(6, 4), QuadratureSpec::default()).is_ok());
}

#[test]
fn deep_high_snr_value() {
    // Direct average of erfc over the two-element density, computed
    // independently of the inversion.
    let v = exact(db(100.0), cfg(2, 4));
    assert!(((v - 5.389_025_181_6e-19) / v).abs() < 1e-8, "{v}");
}

#[test]
fn invalid_shift_rejected() {
    for c in [-1.0, f64::NAN, 1e3] {
        let q = QuadratureSpec { shift: Shift::Fixed(c), ..QuadratureSpec::default() };
        assert!(matches!(ber_chf(10.0, cfg(1, 3), q), Err(Error::Config(_))));
    }
}
