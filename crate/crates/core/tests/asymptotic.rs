use risber::ber_asymptotic::{
    ber_asym, ber_asym_multilevel, ber_asym_twolevel, diversity_report, multilevel_slope,
    pdf_gamma_norm_twolevel, quantization_penalty, Regime,
};
use risber::ber_exact::{ber_chf, QuadratureSpec};
use risber::channel::sample_combined;
use risber::quad::{integrate, QuadTol};
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

#[test]
fn two_level_asymptote_is_approached() {
    for n in [1, 2, 3] {
        let ratios: Vec<f64> = [20.0, 30.0, 40.0]
            .iter()
            .map(|&d| exact(db(d), cfg(n, 2)) / ber_asym_twolevel(db(d), n).unwrap())
            .collect();
        assert!((0.8..=1.25).contains(&ratios[2]), "N={n}: {ratios:?}");
        assert!(ratios.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs()));
    }
}

#[test]
fn multilevel_asymptote_within_factor_two_at_40db() {
    for n in [1, 2, 3] {
        let c = cfg(n, 4);
        let r = exact(db(40.0), c) / ber_asym_multilevel(db(40.0), c).unwrap();
        assert!((0.5..=2.0).contains(&r), "N={n}: ratio {r}");
    }
}

#[test]
fn single_element_multilevel_ratio_tends_to_one() {
    let c = cfg(1, 4);
    let ratios: Vec<f64> = [20.0, 25.0, 30.0, 35.0, 40.0]
        .iter()
        .map(|&d| exact(db(d), c) / ber_asym_multilevel(db(d), c).unwrap())
        .collect();
    assert!(ratios.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs()), "{ratios:?}");
}

fn log_slope<F: Fn(f64) -> f64>(f: F, rho: f64) -> f64 {
    let h = 1e-4;
    -(f(rho * (1.0 + h)).ln() - f(rho * (1.0 - h)).ln()) / ((1.0 + h).ln() - (1.0 - h).ln())
}

#[test]
fn closed_form_slopes() {
    for n in [1, 2, 5, 16] {
        for d in [10.0, 25.0, 40.0] {
            let rho = db(d);
            let s2 = log_slope(|r| ber_asym_twolevel(r, n).unwrap(), rho);
            assert!((s2 - n as f64 / 2.0).abs() < 1e-6);
            let s4 = log_slope(|r| ber_asym_multilevel(r, cfg(n, 4)).unwrap(), rho);
            assert!((s4 - multilevel_slope(rho, n)).abs() < 1e-6);
        }
    }
}

#[test]
fn coding_gain_reproduces_asymptote() {
    for (n, l) in [(1, 2), (3, 2), (2, 3), (4, 8)] {
        let c = cfg(n, l);
        let rho = db(30.0);
        let rep = diversity_report(c, rho).unwrap();
        let regime = if l == 2 { Regime::TwoLevel } else { Regime::MultiLevel };
        assert_eq!(rep.regime, regime);
        let via_gain = (rep.coding_gain * rho).powf(-rep.diversity_order);
        let direct = ber_asym(rho, c).unwrap();
        assert!(((via_gain - direct) / direct).abs() < 1e-12);
    }
}

#[test]
fn large_element_counts_stay_finite() {
    let v = ber_asym_multilevel(db(10.0), cfg(64, 3)).unwrap();
    assert!(v.is_finite() && v > 0.0);
    let w = ber_asym_twolevel(db(10.0), 64).unwrap();
    assert!(w.is_finite() && w > 0.0);
}

#[test]
fn regime_and_domain_errors() {
    assert!(matches!(ber_asym_multilevel(100.0, cfg(2, 2)), Err(Error::Regime(_))));
    assert!(matches!(ber_asym_multilevel(1.0, cfg(2, 3)), Err(Error::Domain(_))));
    assert!(matches!(ber_asym_multilevel(0.5, cfg(2, 3)), Err(Error::Domain(_))));
}

#[test]
fn gamma_density_normalized() {
    for n in [1, 2, 3, 6, 10] {
        // Substitute gamma = s^2 so the integrable singularity at 0 for N = 1 disappears.
        let f = |s: f64| if s == 0.0 { 0.0 } else { 2.0 * s * pdf_gamma_norm_twolevel(s * s, n).unwrap() };
        let total = integrate(f, 0.0, 40.0, QuadTol::new(1e-15, 1e-13, 500)).unwrap().value;
        assert!((total - 1.0).abs() < 1e-10, "N={n}: {total}");
    }
}

#[test]
fn gamma_density_matches_samples() {
    for n in [1, 3] {
        let xs = sample_combined(cfg(n, 2), 200_000, 41);
        for a in [0.05, 0.5, 2.0] {
            let empirical = xs.iter().filter(|&&x| x * x <= a).count() as f64 / xs.len() as f64;
            let f = |s: f64| if s == 0.0 { 0.0 } else { 2.0 * s * pdf_gamma_norm_twolevel(s * s, n).unwrap() };
            let p = integrate(f, 0.0, a.sqrt(), QuadTol::new(1e-15, 1e-12, 500)).unwrap().value;
            let se = (p * (1.0 - p) / xs.len() as f64).sqrt();
            assert!((empirical - p).abs() < 5.0 * se, "N={n} a={a}: {empirical} vs {p}");
        }
    }
}

#[test]
fn penalty_shrinks_with_levels() {
    let p: Vec<f64> = (3..=64).map(|l| quantization_penalty(db(20.0), l, 3).unwrap()).collect();
    assert!(p.iter().all(|&x| x > 0.0));
    assert!(p.windows(2).all(|w| w[1] < w[0]));
    assert!(p[p.len() - 1] < 0.01);
    // Independent of rho and N for L > 2.
    assert_eq!(quantization_penalty(db(30.0), 5, 7).unwrap(), quantization_penalty(db(10.0), 5, 1).unwrap());
}

#[test]
fn two_level_penalty_grows_with_snr() {
    let p: Vec<f64> = [20.0, 30.0, 40.0].iter().map(|&d| quantization_penalty(db(d), 2, 2).unwrap()).collect();
    assert!(p.windows(2).all(|w| w[1] > w[0]), "{p:?}");
}
