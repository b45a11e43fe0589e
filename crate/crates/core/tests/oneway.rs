use calmix_core::noncentral::{ncf_cdf, nct_cdf};
use calmix_core::series::SeriesCfg;
use calmix_core::{
    decompose, f_noncentrality, f_power, group_variance_bias, homoscedasticity_condition, ks_band,
    ks_band_two_sample, ks_bounds, ks_two_sample, mc_oneway, variance_tests, McConfig,
    MixtureParams, OneWayDesign, QuadSpec, Serial,
};
use proptest::prelude::*;

fn design(sizes: &[usize], means: &[f64], sds: &[f64]) -> OneWayDesign {
    OneWayDesign::new(sizes.to_vec(), means.to_vec(), sds.to_vec()).unwrap()
}

#[test]
fn power_equals_level_under_equal_means() {
    let d = design(&[4, 6, 5], &[3.0, 3.0, 3.0], &[2.0, 2.0, 2.0]);
    let f = f_power(&d, 0.05, &QuadSpec::default()).unwrap();
    assert_eq!(f.lambda, 0.0);
    assert!((f.power - 0.05).abs() < 1e-10);
}

#[test]
fn two_group_power_matches_signed_t() {
    let d = design(&[3, 3], &[0.0, 1.0], &[1.0, 1.0]);
    let f = f_power(&d, 0.05, &QuadSpec::default()).unwrap();
    assert!((f.lambda - 1.5).abs() < 1e-15);
    let cfg = SeriesCfg::new(20, 100_000, 1e-14);
    let r = f.critical.sqrt();
    let mu = f.lambda.sqrt();
    let t_power = 1.0 - (nct_cdf(r, 4.0, mu, &cfg).unwrap() - nct_cdf(-r, 4.0, mu, &cfg).unwrap());
    assert!((f.power - t_power).abs() < 1e-9, "{} vs {t_power}", f.power);
}

#[test]
fn power_increases_with_separation() {
    let mut last = 0.0;
    for gap in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let d = design(&[5, 5, 5], &[0.0, gap, 2.0 * gap], &[1.0; 3]);
        let p = f_power(&d, 0.05, &QuadSpec::default()).unwrap().power;
        assert!(p > last || gap == 0.0);
        last = p;
    }
}

#[test]
fn unbalanced_noncentrality_uses_weighted_mean() {
    let d = design(&[2, 6], &[0.0, 4.0], &[2.0, 2.0]);
    // weighted mean 3: (2·9 + 6·1) / 4
    assert!((f_noncentrality(&d).unwrap() - 6.0).abs() < 1e-12);
}

#[test]
fn calibrated_f_follows_noncentral_f() {
    let d = design(&[4, 5, 6], &[0.0, 0.5, 1.2], &[1.0; 3]);
    let lambda = f_noncentrality(&d).unwrap();
    let p = MixtureParams::unit(0.0);
    let mut mc = mc_oneway(&d, Some(&p), &McConfig::new(100_000, 31), &Serial).unwrap();
    assert!(mc.max_identity_gap < 1e-10, "{}", mc.max_identity_gap);
    let cfg = SeriesCfg::new(15, 100_000, 1e-12);
    let band = ks_band(mc.f.len(), 0.01);
    let k = ks_bounds(&mut mc.f, |x| ncf_cdf(x, 2.0, 12.0, lambda, &cfg), 10).unwrap();
    assert!(k.upper < band, "{k:?} vs {band}");
}

#[test]
fn variance_tests_are_blind_to_calibration() {
    let d = design(&[5, 5, 5, 5], &[1.0, 2.0, 3.0, 4.0], &[1.0, 1.0, 1.0, 1.0]);
    let cal = mc_oneway(
        &d,
        Some(&MixtureParams::unit(0.0)),
        &McConfig::new(20_000, 41),
        &Serial,
    )
    .unwrap();
    let plain = mc_oneway(&d, None, &McConfig::new(20_000, 42), &Serial).unwrap();
    assert!(cal.max_identity_gap < 1e-10);
    let band = ks_band_two_sample(20_000, 20_000, 0.01);
    for (mut a, mut b) in [
        (cal.bartlett, plain.bartlett),
        (cal.cochran, plain.cochran),
        (cal.hartley, plain.hartley),
    ] {
        assert!(ks_two_sample(&mut a, &mut b).unwrap() < band);
    }
}

#[test]
fn group_bias_follows_reading_means() {
    let d = design(&[6, 6], &[2.0, 0.0], &[1.0, 1.5]);
    let p = MixtureParams::unit(0.0);
    let bias = group_variance_bias(&d, &p).unwrap();
    assert_eq!(bias[0].var_y, 7.0);
    assert_eq!(bias[1].var_y, 2.0 * 2.25 + 1.0);
    let mc = mc_oneway(&d, Some(&p), &McConfig::new(200_000, 51), &Serial).unwrap();
    for (b, (s2, vy)) in bias.iter().zip(mc.group_s2.iter().zip(&mc.group_var_y)) {
        assert!(s2.within(b.expected_s2, 3.0), "{s2:?} vs {b:?}");
        assert!(vy.within(b.var_y, 3.0), "{vy:?} vs {b:?}");
    }
    // with ω_i² in place of μ_i² the first group would have Var = 4
    assert!(!mc.group_var_y[0].within(2.0 + 1.0 + 1.0, 3.0));
}

#[test]
fn homoscedasticity_examples() {
    let p = MixtureParams::unit(0.0);
    let h =
        homoscedasticity_condition(&design(&[3, 3], &[1.0, 1.0], &[1.0, 1.0]), &p, 1e-12).unwrap();
    assert!(h.holds);
    let d = design(&[3, 3], &[2f64.sqrt(), 1.0], &[1.0, 1.5f64.sqrt()]);
    let h = homoscedasticity_condition(&d, &p, 1e-12).unwrap();
    assert_eq!(h.c, 0.5);
    assert!(h.holds, "{h:?}");
    let v: Vec<f64> = group_variance_bias(&d, &p)
        .unwrap()
        .iter()
        .map(|b| b.var_y)
        .collect();
    assert!((v[0] - v[1]).abs() < 1e-12);
    let h =
        homoscedasticity_condition(&design(&[3, 3], &[0.0, 1.0], &[1.0, 1.0]), &p, 1e-12).unwrap();
    assert!(!h.holds);
}

#[test]
fn variance_tests_scale_free() {
    let s2 = [0.7, 1.9, 3.3];
    let sizes = [4, 7, 5];
    let a = variance_tests(&s2, &sizes).unwrap();
    let b = variance_tests(&s2.map(|v| 7.0 * v), &sizes).unwrap();
    assert!((a.bartlett - b.bartlett).abs() < 1e-12);
    assert!((a.cochran - b.cochran).abs() < 1e-15);
    assert!((a.hartley - b.hartley).abs() < 1e-14);
}

proptest! {
    #[test]
    fn decomposition_identity_and_invariance(
        y in prop::collection::vec(-20.0f64..20.0, 9),
        a in -50.0f64..50.0,
        b in prop_oneof![-10.0f64..-0.1, 0.1f64..10.0],
    ) {
        let sizes = [3, 2, 4];
        let d = decompose(&y, &sizes).unwrap();
        prop_assert!((d.ss0 + d.ss1 + d.ss2 - d.total).abs() <= 1e-12 * d.total.max(1.0));
        let z: Vec<f64> = y.iter().map(|v| a + b * v).collect();
        let e = decompose(&z, &sizes).unwrap();
        prop_assert!((d.f_statistic - e.f_statistic).abs() <= 1e-9 * d.f_statistic.max(1.0));
    }
}
