use calmix_core::noncentral::nct_cdf;
use calmix_core::quad::{integrate, QuadTol};
use calmix_core::series::SeriesCfg;
use calmix_core::special::{chi2_pdf, norm_cdf, norm_pdf};
use calmix_core::{
    nc_chisq1_pdf, pdf_mass, CdfEval, MeanMixture, MixtureParams, QuadSpec, SignedTMixture,
    TsqMixture, VarianceMixture,
};

fn q() -> QuadSpec {
    QuadSpec::default()
}

fn octane() -> MixtureParams {
    MixtureParams::new(11, 87.2818, 0.1846, 0.0, 1.0, 1.8546, 0.5837).unwrap()
}

const OCTANE_LAMBDA: f64 = 10.095_3;
const CRIT: f64 = 4.964_602_743_730_7;

fn close(a: f64, b: f64, tol: f64, what: &str) {
    assert!((a - b).abs() <= tol, "{what}: {a} vs {b} (tol {tol})");
}

#[test]
fn chisq1_kernel_values() {
    close(
        nc_chisq1_pdf(1.0, 0.0, &q()).unwrap(),
        (-0.5f64).exp() / (2.0 * std::f64::consts::PI).sqrt(),
        1e-12,
        "central",
    );
    let tol = QuadTol::new(1e-12, 1e-12);
    for &lambda in &[0.0, 1.0, 10.0] {
        let mass = integrate(
            |v: f64| Ok(2.0 * v * nc_chisq1_pdf(v * v, lambda, &q())?),
            &[0.0, 1.0, 3.0, 6.0, 12.0],
            &tol,
            "t",
        )
        .unwrap();
        close(mass, 1.0, 1e-10, "mass");
    }
    let mean = integrate(
        |v: f64| Ok(2.0 * v * v * v * nc_chisq1_pdf(v * v, 4.0, &q())?),
        &[0.0, 2.0, 5.0, 14.0],
        &tol,
        "t",
    )
    .unwrap();
    close(mean, 5.0, 1e-9, "mean");
}

#[test]
fn octane_mean_region_probabilities() {
    let m = MeanMixture::new(octane(), q()).unwrap();
    let p = m.cdf(88.526).unwrap() - m.cdf(86.037).unwrap();
    close(p, 0.95, 5e-4, "95% region");
    let p = m.cdf(88.376).unwrap() - m.cdf(86.184).unwrap();
    close(p, 0.922, 1e-3, "naive region");
}

#[test]
fn octane_variance_region() {
    let v = VarianceMixture::new(10.0, OCTANE_LAMBDA, q()).unwrap();
    let p = v.cdf(336.5).unwrap() - v.cdf(10.8).unwrap();
    close(p, 0.95, 1e-3, "variance region");
    let s = 0.5837f64 * 0.5837;
    let p = v.cdf(10.0 * 7.0449 / s).unwrap() - v.cdf(10.0 * 1.1167 / s).unwrap();
    close(p, 0.74, 5e-3, "naive variance region");
}

#[test]
fn tsq_examples() {
    close(
        TsqMixture::new(10.0, 0.0, 7.0, q())
            .unwrap()
            .cdf(CRIT)
            .unwrap(),
        0.95,
        1e-12,
        "central",
    );
    close(
        TsqMixture::new(10.0, 1.0, 1.0, q())
            .unwrap()
            .cdf(CRIT)
            .unwrap(),
        0.691,
        5e-3,
        "δ=1 λ=1",
    );
    close(
        TsqMixture::new(10.0, 2.9351, OCTANE_LAMBDA, q())
            .unwrap()
            .cdf(CRIT)
            .unwrap(),
        0.90,
        5e-3,
        "octane",
    );
    let tsq = TsqMixture::new(10.0, 1.0, 9.0, q())
        .unwrap()
        .cdf(CRIT)
        .unwrap();
    let signed = SignedTMixture::new(10.0, 1.0, 3.0, q())
        .unwrap()
        .central_probability(CRIT)
        .unwrap();
    close(tsq, 0.928, 5e-3, "δ=1 λ=9");
    close(tsq, signed, 1e-6, "two routes");
}

#[test]
fn densities_integrate_to_one() {
    let laws: Vec<Box<dyn CdfEval>> = vec![
        Box::new(MeanMixture::new(MixtureParams::unit(1.0), q()).unwrap()),
        Box::new(
            MeanMixture::new(
                MixtureParams::new(5, 0.0, 0.0, 0.0, 1.0, 0.5, 1.0).unwrap(),
                q(),
            )
            .unwrap(),
        ),
        Box::new(VarianceMixture::new(1.0, 0.0, q()).unwrap()),
        Box::new(VarianceMixture::new(10.0, OCTANE_LAMBDA, q()).unwrap()),
        Box::new(TsqMixture::new(10.0, 4.0, 1.0, q()).unwrap()),
        Box::new(TsqMixture::new(3.0, 9.0, 9.0, q()).unwrap()),
        Box::new(SignedTMixture::new(10.0, 1.0, 3.0, q()).unwrap()),
        Box::new(SignedTMixture::new(4.0, -2.0, 0.5, q()).unwrap()),
    ];
    for law in &laws {
        let m = pdf_mass(law.as_ref(), 1e-5, &QuadTol::new(1e-9, 1e-9)).unwrap();
        close(m.tails, 2e-5, 1e-10, "tail masses");
        close(m.total(), 1.0, 1e-6, "mass");
    }
}

#[test]
fn density_is_derivative_of_cdf() {
    let laws: Vec<(Box<dyn CdfEval>, Vec<f64>)> = vec![
        (
            Box::new(MeanMixture::new(octane(), q()).unwrap()),
            vec![86.5, 87.2818, 88.9],
        ),
        (
            Box::new(VarianceMixture::new(10.0, 4.0, q()).unwrap()),
            vec![3.0, 20.0, 90.0],
        ),
        (
            Box::new(TsqMixture::new(10.0, 4.0, 4.0, q()).unwrap()),
            vec![0.3, 2.0, 12.0],
        ),
        (
            Box::new(SignedTMixture::new(10.0, 2.0, 2.0, q()).unwrap()),
            vec![-1.0, 0.4, 3.0],
        ),
    ];
    for (law, pts) in &laws {
        for &u in pts {
            let h = 1e-4;
            let num = (law.cdf(u + h).unwrap() - law.cdf(u - h).unwrap()) / (2.0 * h);
            let pdf = law.pdf(u).unwrap();
            close(num, pdf, 1e-5 * pdf.max(1.0), &format!("derivative at {u}"));
        }
    }
}

#[test]
fn mean_mixture_symmetric_when_readings_centered() {
    let p = MixtureParams::new(6, 3.0, 0.4, 0.0, 2.0, 1.5, 0.8).unwrap();
    let m = MeanMixture::new(p, q()).unwrap();
    for &x in &[0.1, 0.7, 2.5, 6.0] {
        close(
            m.pdf(3.0 + x).unwrap(),
            m.pdf(3.0 - x).unwrap(),
            1e-14,
            "symmetry",
        );
    }
}

#[test]
fn mean_mixture_with_known_intercept_and_centered_readings() {
    // the inner variance vanishes at a zero slope; the integrand stays finite
    let p = MixtureParams::new(4, 0.0, 0.0, 0.0, 1.0, 0.3, 1.0).unwrap();
    let m = MeanMixture::new(p, q()).unwrap();
    close(m.cdf(0.0).unwrap(), 0.5, 1e-10, "median");
    assert!(m.pdf(1e-3).unwrap().is_finite());
}

#[test]
fn small_slope_spread_collapses_to_gaussian() {
    let p = MixtureParams::new(8, 1.0, 0.5, 2.0, 1.5, 1.2, 1e-7).unwrap();
    let m = MeanMixture::new(p, q()).unwrap();
    let sd = (1.2f64 * 1.2 * 1.5 * 1.5 / 8.0 + 0.25).sqrt();
    for &u in &[1.5, 3.0, 3.4, 5.0] {
        close(
            m.pdf(u).unwrap(),
            norm_pdf((u - 3.4) / sd) / sd,
            1e-6,
            "pdf limit",
        );
        close(
            m.cdf(u).unwrap(),
            norm_cdf((u - 3.4) / sd),
            1e-6,
            "cdf limit",
        );
    }
    let ideal = MixtureParams::known_coefficients(8, 1.0, 2.0, 1.5, 1.2).unwrap();
    let m = MeanMixture::new(ideal, q()).unwrap();
    let sd = 1.2 * 1.5 / 8f64.sqrt();
    close(
        m.pdf(3.0).unwrap(),
        norm_pdf(-0.4 / sd) / sd,
        1e-14,
        "ideal",
    );
}

#[test]
fn variance_mixture_mean() {
    let v = VarianceMixture::new(5.0, 2.0, q()).unwrap();
    let tol = QuadTol::new(1e-10, 1e-11);
    let pts = [0.0, 1.0, 2.0, 4.0, 6.0, 10.0, 20.0, 40.0, 80.0];
    let m = integrate(
        |x: f64| Ok(2.0 * x * x * x * v.pdf(x * x)?),
        &pts,
        &tol,
        "mean",
    )
    .unwrap();
    close(m, 15.0, 1e-6, "mean");
}

#[test]
fn variance_mixture_against_brute_force() {
    // u = w x with w ~ χ²1(λ), x ~ χ²ν; integrate the chi-squared directly in w
    let (nu, lambda, u) = (6.0, 3.0, 25.0);
    let l0 = f64::sqrt(lambda);
    let tol = QuadTol::new(1e-13, 1e-12);
    let oracle = integrate(
        |s: f64| {
            let g = norm_pdf(s - l0) + norm_pdf(s + l0);
            Ok(chi2_pdf(u / (s * s), nu) / (s * s) * g)
        },
        &[0.0, l0, l0 + 12.0],
        &tol,
        "oracle",
    )
    .unwrap();
    let v = VarianceMixture::new(nu, lambda, q()).unwrap();
    close(v.pdf(u).unwrap(), oracle, 1e-11, "pdf");
}

#[test]
fn stochastic_orderings() {
    let c: Vec<f64> = [1.0, 4.0, 9.0]
        .iter()
        .map(|&l| {
            VarianceMixture::new(10.0, l, q())
                .unwrap()
                .cdf(20.0)
                .unwrap()
        })
        .collect();
    assert!(c[0] > c[1] && c[1] > c[2], "{c:?}");
    for &delta in &[1.0, 4.0, 9.0] {
        let row: Vec<f64> = [1.0, 4.0, 9.0]
            .iter()
            .map(|&l| {
                TsqMixture::new(10.0, delta, l, q())
                    .unwrap()
                    .cdf(CRIT)
                    .unwrap()
            })
            .collect();
        assert!(row[0] < row[1] && row[1] < row[2], "{row:?}");
    }
    let col: Vec<f64> = [0.0, 1.0, 4.0, 9.0]
        .iter()
        .map(|&d| {
            TsqMixture::new(10.0, d, 4.0, q())
                .unwrap()
                .cdf(CRIT)
                .unwrap()
        })
        .collect();
    assert!(col.windows(2).all(|w| w[0] > w[1]), "{col:?}");
}

#[test]
fn signed_law_symmetric_without_shift() {
    let t = SignedTMixture::new(10.0, 0.0, 1.0, q()).unwrap();
    for &x in &[0.2, 1.0, 3.3] {
        close(t.pdf(x).unwrap(), t.pdf(-x).unwrap(), 1e-15, "symmetry");
    }
}

#[test]
fn signed_and_squared_laws_agree() {
    for &(delta, lambda) in &[(1.0, 1.0), (4.0, 4.0), (9.0, 1.0), (2.9351, OCTANE_LAMBDA)] {
        let tsq = TsqMixture::new(10.0, delta, lambda, q()).unwrap();
        let signed = SignedTMixture::new(10.0, f64::sqrt(delta), f64::sqrt(lambda), q()).unwrap();
        for &c in &[0.5, CRIT, 20.0] {
            let a = tsq.cdf(c).unwrap();
            let b = signed.central_probability(c).unwrap();
            let r = c.sqrt();
            let via_cdf = signed.cdf(r).unwrap() - signed.cdf(-r).unwrap();
            close(a, b, 1e-8, "series routes");
            close(a, via_cdf, 1e-8, "cdf route");
        }
    }
}

#[test]
fn signed_law_at_large_slope_noncentrality() {
    // brute force: P(t0 <= x) = ∫∫ Φ(x sqrt(v/ν) - δ0/s) χ²ν(v) g(s) dv ds
    let (nu, delta0, lambda0) = (10.0, 150.0, 100.0);
    let cfg = SeriesCfg::new(10, 100_000, 1e-14);
    let tol = QuadTol::new(1e-11, 1e-11);
    let law = SignedTMixture::new(nu, delta0, lambda0, q()).unwrap();
    for &x in &[0.5, 1.5, 3.0] {
        let oracle = integrate(
            |s: f64| {
                let inner = integrate(
                    |v: f64| Ok(norm_cdf(x * (v / nu).sqrt() - delta0 / s) * chi2_pdf(v, nu)),
                    &[0.0, nu, 4.0 * nu, 400.0],
                    &tol,
                    "inner",
                )?;
                Ok(inner * norm_pdf(s - lambda0))
            },
            &[lambda0 - 10.0, lambda0, lambda0 + 10.0],
            &tol,
            "outer",
        )
        .unwrap();
        let got = law.cdf(x).unwrap();
        close(got, oracle, 1e-9, "brute force");
        let plain = nct_cdf(x, nu, delta0 / lambda0, &cfg).unwrap();
        close(got, plain, 5e-3, "plain noncentral t");
    }
}

#[test]
fn invalid_arguments_rejected() {
    assert!(VarianceMixture::new(0.5, 1.0, q()).is_err());
    assert!(TsqMixture::new(10.0, -1.0, 1.0, q()).is_err());
    assert!(SignedTMixture::new(10.0, f64::NAN, 1.0, q()).is_err());
    let bad = QuadSpec {
        abs_tol: 0.0,
        ..q()
    };
    assert!(VarianceMixture::new(10.0, 1.0, bad).is_err());
    let v = VarianceMixture::new(3.0, 1.0, q()).unwrap();
    assert_eq!(v.pdf(-1.0).unwrap(), 0.0);
    assert_eq!(v.cdf(0.0).unwrap(), 0.0);
}

#[test]
fn general_tsq_law_reduces_without_intercept_error() {
    let p = MixtureParams::new(11, 87.2818, 0.0, 0.0, 1.0, 1.8546, 0.5837).unwrap();
    let mu0 = 87.2818 - 0.9;
    let general = calmix_core::CalibratedTsq::new(p, mu0, q()).unwrap();
    let spec = calmix_core::DistSpec::tsq_for(&p, mu0)
        .unwrap()
        .build(q())
        .unwrap();
    for &u in &[0.3, 1.0, CRIT, 12.0, 60.0] {
        close(general.cdf(u).unwrap(), spec.cdf(u).unwrap(), 1e-8, "cdf");
        close(general.pdf(u).unwrap(), spec.pdf(u).unwrap(), 1e-8, "pdf");
    }
}

#[test]
fn general_tsq_law_normalizes() {
    for p in [octane(), MixtureParams::unit(1.0)] {
        let d = calmix_core::CalibratedTsq::new(p, p.mu_y() - 0.7, q()).unwrap();
        let m = pdf_mass(&d, 1e-5, &QuadTol::new(1e-9, 1e-9)).unwrap();
        close(m.total(), 1.0, 1e-6, "mass");
    }
}
