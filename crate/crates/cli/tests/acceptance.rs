//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line (plus
//! indented detail lines) and then asserts, so the harness summary and the
//! printed lines agree.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use calmix::exec::Rayon;
use calmix_core::quad::QuadTol;
use calmix_core::{
    blindness_suite, expected_sample_variance, fit_calibration, interval_coverage, ks_band,
    ks_bounds, mc_inconsistency_curve, mc_oneway, mc_statistic_sample, mean_moments,
    nonrejection_via_signed, operating_characteristics, ordering_probe, pdf_mass,
    probability_region, tsq_critical, CalibratedTsq, CdfEval, DistSpec, McConfig, MeanMixture,
    MixtureParams, OneWayDesign, OrderingFamily, QuadSpec, SignedTMixture, Statistic, TsqMixture,
    VarianceMixture,
};

fn say(line: &str) {
    // written past the test harness capture so every run shows it
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn verdict(id: u32, title: &str, pass: bool, details: &[String]) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let mut block = format!("{tag} [{id:02}] {title}");
    for d in details {
        block.push_str("\n       ");
        block.push_str(d);
    }
    say(&block);
    assert!(pass, "criterion {id} failed: {}", details.join("; "));
}

fn q() -> QuadSpec {
    QuadSpec::default()
}

fn octane() -> MixtureParams {
    MixtureParams::new(11, 87.2818, 0.1846, 0.0, 1.0, 1.8546, 0.5837).unwrap()
}

fn exec() -> Rayon {
    Rayon::new(None).unwrap()
}

// n, β0, σ0, μ_Z, σ_Z, β1, σ1, then reference E, Var, γ, κ.
const MOMENT_TABLE: [([f64; 7], [f64; 4]); 15] = [
    (
        [10.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        [2.0, 2.2, 0.1839, 3.2851],
    ),
    (
        [20.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        [2.0, 2.1, 0.0986, 3.1463],
    ),
    (
        [20.0, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0],
        [1.5, 2.1, 0.0986, 3.1463],
    ),
    (
        [20.0, 2.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        [3.0, 2.1, 0.0986, 3.1463],
    ),
    (
        [20.0, 1.0, 0.5, 1.0, 1.0, 1.0, 1.0],
        [2.0, 1.35, 0.1913, 3.3539],
    ),
    (
        [20.0, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0],
        [2.0, 5.1, 0.0260, 3.0248],
    ),
    (
        [20.0, 1.0, 1.0, 0.5, 1.0, 1.0, 1.0],
        [1.5, 1.35, 0.0956, 3.1070],
    ),
    (
        [20.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0],
        [3.0, 5.1, 0.0521, 3.0940],
    ),
    (
        [20.0, 1.0, 1.0, 1.0, 0.5, 1.0, 1.0],
        [2.0, 2.025, 0.0260, 3.0373],
    ),
    (
        [20.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0],
        [2.0, 2.4, 0.3327, 3.5417],
    ),
    (
        [20.0, 1.0, 1.0, 1.0, 1.0, 0.5, 1.0],
        [1.5, 2.0625, 0.0506, 3.1463],
    ),
    (
        [20.0, 1.0, 1.0, 1.0, 1.0, 2.0, 1.0],
        [3.0, 2.25, 0.1778, 3.1452],
    ),
    (
        [20.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.5],
        [2.0, 1.3125, 0.0499, 3.0267],
    ),
    (
        [20.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0],
        [2.0, 5.25, 0.0998, 3.3614],
    ),
    (
        [10.0, 1.0, 0.5, 1.0, 2.0, 1.0, 2.0],
        [2.0, 6.25, 0.6144, 5.5559],
    ),
];

fn row_params(r: [f64; 7]) -> MixtureParams {
    MixtureParams::new(r[0] as usize, r[1], r[2], r[3], r[4], r[5], r[6]).unwrap()
}

#[test]
fn c01_moment_table_rows() {
    let start = Instant::now();
    let tol = 1e-3;
    let mut details = Vec::new();
    let mut worst: f64 = 0.0;
    for (i, (row, reference)) in MOMENT_TABLE.iter().enumerate() {
        let p = row_params(*row);
        let m = mean_moments(&p, &q()).unwrap();
        let got = [m.mean, m.variance, m.skewness, m.kurtosis];
        let quad_var_gap = (m.quadrature_variance - m.variance).abs();
        for (k, name) in ["E", "Var", "gamma", "kappa"].iter().enumerate() {
            let d = (got[k] - reference[k]).abs();
            worst = worst.max(d);
            if d > tol {
                details.push(format!(
                    "row {}: {name} computed {:.4} reference {:.4} (|diff| {:.4})",
                    i + 1,
                    got[k],
                    reference[k],
                    d
                ));
            }
        }
        if quad_var_gap > tol {
            details.push(format!(
                "row {}: quadrature Var off by {quad_var_gap:.2e}",
                i + 1
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = details.is_empty() && secs < 30.0;
    details.insert(
        0,
        format!(
            "{} rows x (E, Var, gamma, kappa), tol {tol:e}; {} cells out of tolerance; runtime {secs:.2}s",
            MOMENT_TABLE.len(),
            details.len()
        ),
    );
    verdict(1, "moment table of the calibrated mean", pass, &details);
}

#[test]
fn c02_mean_region() {
    let m = MeanMixture::new(octane(), q()).unwrap();
    let r = probability_region(&m, 0.95).unwrap();
    let naive = interval_coverage(&m, 86.184, 88.376).unwrap();
    let pass = (r.lower - 86.037).abs() <= 0.005
        && (r.upper - 88.526).abs() <= 0.005
        && (naive - 0.922).abs() <= 0.001;
    verdict(
        2,
        "95% region of the calibrated mean and coverage of the normal-theory interval",
        pass,
        &[
            format!(
                "region ({:.4}, {:.4}) vs (86.037, 88.526), tol 0.005",
                r.lower, r.upper
            ),
            format!("P(86.184 < Ybar < 88.376) = {naive:.4} vs 0.922, tol 0.001"),
        ],
    );
}

#[test]
fn c03_variance_figures() {
    let p = octane();
    let b = expected_sample_variance(&p).unwrap();
    let v = VarianceMixture::from_params(&p, q()).unwrap();
    let r = probability_region(&v, 0.95).unwrap();
    let to_s2 = p.sigma1 * p.sigma1 * p.sigma_z * p.sigma_z / v.nu();
    let s2 = (r.lower * to_s2, r.upper * to_s2);
    let naive = interval_coverage(&v, 1.1167 / to_s2, 7.0449 / to_s2).unwrap();
    let rel = |a: f64, b: f64| (a / b - 1.0).abs();
    let pass = (b.expected_s2 - 3.780).abs() <= 0.001
        && rel(r.lower, 10.8) <= 0.01
        && rel(r.upper, 336.5) <= 0.01
        && rel(s2.0, 0.368) <= 0.01
        && rel(s2.1, 11.46) <= 0.01
        && (naive - 0.74).abs() <= 0.005;
    verdict(
        3,
        "sample-variance bias, region and normal-theory coverage",
        pass,
        &[
            format!("E(S^2) = {:.4} vs 3.780, tol 0.001", b.expected_s2),
            format!(
                "scaled region ({:.3}, {:.2}) vs (10.8, 336.5), tol 1%",
                r.lower, r.upper
            ),
            format!(
                "S^2 region ({:.4}, {:.3}) vs (0.368, 11.46), tol 1%",
                s2.0, s2.1
            ),
            format!("P(1.1167 < S^2 < 7.0449) = {naive:.4} vs 0.74, tol 0.005"),
        ],
    );
}

#[test]
fn c04_power_table() {
    const DELTAS: [f64; 4] = [0.0, 1.0, 4.0, 9.0];
    const LAMBDAS: [f64; 3] = [1.0, 4.0, 9.0];
    const REFERENCE: [[f64; 3]; 4] = [
        [0.950, 0.950, 0.950],
        [0.691, 0.863, 0.928],
        [0.485, 0.742, 0.876],
        [0.329, 0.608, 0.799],
    ];
    let mut details = Vec::new();
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let mut route_gap: f64 = 0.0;
    for (i, &d) in DELTAS.iter().enumerate() {
        for (j, &l) in LAMBDAS.iter().enumerate() {
            let c = operating_characteristics(10.0, d, l, 0.05, &q()).unwrap();
            let s = nonrejection_via_signed(10.0, d, l, 0.05, &q()).unwrap();
            let diff = (c.nonrejection_prob - REFERENCE[i][j]).abs();
            worst = worst.max(diff);
            route_gap = route_gap.max((c.nonrejection_prob - s).abs());
            if diff > 0.005 {
                pass = false;
                details.push(format!(
                    "delta {d}, lambda {l}: {:.4} vs reference {:.3}",
                    c.nonrejection_prob, REFERENCE[i][j]
                ));
            }
        }
    }
    let oc = operating_characteristics(10.0, 2.9351, 10.0953, 0.05, &q()).unwrap();
    let oc_s = nonrejection_via_signed(10.0, 2.9351, 10.0953, 0.05, &q()).unwrap();
    route_gap = route_gap.max((oc.nonrejection_prob - oc_s).abs());
    pass &= (oc.nonrejection_prob - 0.90).abs() <= 0.005 && route_gap <= 1e-4;
    details.insert(0, format!("12 cells, max |diff| {worst:.4}, tol 0.005"));
    details.insert(
        1,
        format!(
            "case-study point (10, 2.9351, 10.0953): {:.4} vs 0.90, tol 0.005",
            oc.nonrejection_prob
        ),
    );
    details.insert(
        2,
        format!("squared vs signed routes: max gap {route_gap:.1e}, tol 1e-4"),
    );
    verdict(
        4,
        "non-rejection probabilities of the t^2 test",
        pass,
        &details,
    );
}

#[test]
fn c05_calibration_fit() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/octane.csv");
    let data = calmix::io::read_calibration(&path).unwrap();
    let fit = fit_calibration(&data).unwrap();

    // closed-form least squares from raw sums, independent of the library
    let (x, u) = (data.x(), data.u());
    let n = x.len() as f64;
    let (sx, su) = (x.iter().sum::<f64>(), u.iter().sum::<f64>());
    let sxx = x.iter().map(|v| v * v).sum::<f64>() - sx * sx / n;
    let sxu = x.iter().zip(u).map(|(a, b)| a * b).sum::<f64>() - sx * su / n;
    let suu = u.iter().map(|v| v * v).sum::<f64>() - su * su / n;
    let b1 = sxu / sxx;
    let s_u = ((suu - b1 * sxu) / (n - 2.0)).sqrt();
    let oracle_ok = (fit.beta1_hat - b1).abs() < 1e-9
        && (fit.sigma_u_hat - s_u).abs() < 1e-9
        && (fit.beta0_hat - su / n).abs() < 1e-9;
    let reference_ok = (fit.beta1_hat - 1.1273).abs() <= 1e-4
        && (fit.sigma_u_hat - 0.7395).abs() <= 1e-4
        && (fit.beta0_hat - 87.1000).abs() <= 1e-4;
    let discrepancy = (fit.beta0_hat - 87.2818).abs() > 0.1;

    let rep =
        calmix::evaluate(["calmix", "case-study", "--input", path.to_str().unwrap()]).unwrap();
    let t = rep.table("parameters").unwrap();
    let reference = octane();
    let consumes_reference = t.num(0, "beta0") == Some(reference.beta0)
        && t.num(0, "beta1") == Some(reference.beta1)
        && t.num(0, "sigma0") == Some(reference.sigma0)
        && t.num(0, "sigma1") == Some(reference.sigma1);
    let refit = rep.table("refit").unwrap();
    let refit_reported = refit.num(0, "refit").map(|v| (v - 87.1).abs() < 1e-9) == Some(true);

    verdict(
        5,
        "calibration fit on the octane readings",
        oracle_ok && reference_ok && discrepancy && consumes_reference && refit_reported,
        &[
            format!(
                "beta0 {:.4} (expects 87.1000), beta1 {:.4} (1.1273), sigma_U {:.4} (0.7395), tol 1e-4",
                fit.beta0_hat, fit.beta1_hat, fit.sigma_u_hat
            ),
            format!("matches raw-sum normal equations to 1e-9: {oracle_ok}"),
            format!("refit intercept differs from the reference 87.2818: {discrepancy}"),
            format!("case-study pipeline runs on the reference parameters: {consumes_reference}"),
        ],
    );
}

#[test]
fn c06_inconsistency_of_the_mean() {
    let p = MixtureParams::unit(1.0);
    let cfg = McConfig::new(100_000, 20_240_601);
    let start = Instant::now();
    let curve = mc_inconsistency_curve(&p, &[10, 100, 10_000], &cfg, &exec()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let mut pass = secs < 10.0;
    let mut details = Vec::new();
    for c in &curve {
        let model = p.kappa2() * p.sigma_z * p.sigma_z / c.n as f64 + 2.0;
        let z = c.var_ybar.z_score(model);
        pass &= z.abs() <= 3.0 && (c.model - model).abs() < 1e-12;
        details.push(format!(
            "n = {:>5}: Var(Ybar) {:.4} +/- {:.4}, model {:.4}, z {:+.2}",
            c.n, c.var_ybar.estimate, c.var_ybar.std_error, model, z
        ));
    }
    let last = curve.last().unwrap();
    let plateau = last.var_ybar.z_score(2.0).abs() <= 3.0 && last.floor == 2.0;
    pass &= plateau;
    details.push(format!(
        "plateau: n = 10^4 estimate within 3 s.e. of the floor 2.0: {plateau}"
    ));
    details.push(format!("runtime {secs:.2}s, limit 10s"));
    verdict(
        6,
        "variance of the calibrated mean does not vanish",
        pass,
        &details,
    );
}

fn ks_line<D: CdfEval>(
    label: &str,
    law: &D,
    p: &MixtureParams,
    stat: Statistic,
    seed: u64,
) -> (bool, String) {
    let cfg = McConfig::new(100_000, seed);
    let mut s = mc_statistic_sample(p, stat, &cfg, &exec()).unwrap();
    let scale = match stat {
        Statistic::SampleVariance => {
            (p.n - 1) as f64 / (p.sigma1 * p.sigma1 * p.sigma_z * p.sigma_z)
        }
        _ => 1.0,
    };
    let band = ks_band(s.len(), 0.01);
    let k = ks_bounds(&mut s, |x| law.cdf(x * scale), 50).unwrap();
    (
        k.upper < band,
        format!(
            "{label}: D in [{:.5}, {:.5}], band {band:.5}",
            k.lower, k.upper
        ),
    )
}

#[test]
fn c07_mixture_laws_match_simulation() {
    let mut pass = true;
    let mut details = Vec::new();
    for (name, p, shift, seed) in [
        ("unit", MixtureParams::unit(1.0), 0.5, 71),
        ("octane", octane(), 1.0, 72),
    ] {
        let mu0 = p.mu_y() - shift;
        let checks = [
            ks_line(
                &format!("{name} Ybar"),
                &MeanMixture::new(p, q()).unwrap(),
                &p,
                Statistic::Mean,
                seed,
            ),
            ks_line(
                &format!("{name} S^2"),
                &VarianceMixture::from_params(&p, q()).unwrap(),
                &p,
                Statistic::SampleVariance,
                seed + 100,
            ),
            ks_line(
                &format!("{name} t0^2"),
                &CalibratedTsq::new(p, mu0, q()).unwrap(),
                &p,
                Statistic::Tsq { mu_y0: mu0 },
                seed + 200,
            ),
        ];
        for (ok, line) in checks {
            pass &= ok;
            details.push(line);
        }
        // the single-mixture t^2 law ignores the intercept error; shown for reference
        let DistSpec::Tsq { nu, delta, lambda } = DistSpec::tsq_for(&p, mu0).unwrap() else {
            unreachable!()
        };
        let (ok, line) = ks_line(
            &format!("{name} t0^2 vs slope-only mixture (reference)"),
            &TsqMixture::new(nu, delta, lambda, q()).unwrap(),
            &p,
            Statistic::Tsq { mu_y0: mu0 },
            seed + 200,
        );
        details.push(format!("{line}, within band: {ok}"));
    }
    let exact = MixtureParams::new(11, 87.2818, 0.0, 0.0, 1.0, 1.8546, 0.5837).unwrap();
    let DistSpec::Tsq { nu, delta, lambda } =
        DistSpec::tsq_for(&exact, exact.mu_y() - 1.0).unwrap()
    else {
        unreachable!()
    };
    let (ok, line) = ks_line(
        "sigma0 = 0, mu_Z = 0: t0^2 vs slope-only mixture",
        &TsqMixture::new(nu, delta, lambda, q()).unwrap(),
        &exact,
        Statistic::Tsq {
            mu_y0: exact.mu_y() - 1.0,
        },
        373,
    );
    pass &= ok;
    details.push(line);
    // larger run on the unit t0^2 stream, reported but not part of the verdict
    let p = MixtureParams::unit(1.0);
    let mu0 = p.mu_y() - 0.5;
    let law = CalibratedTsq::new(p, mu0, q()).unwrap();
    let mut s = mc_statistic_sample(
        &p,
        Statistic::Tsq { mu_y0: mu0 },
        &McConfig::new(10_000_000, 271),
        &exec(),
    )
    .unwrap();
    let band = ks_band(s.len(), 0.01);
    let k = ks_bounds(&mut s, |x| law.cdf(x), 1000).unwrap();
    details.push(format!(
        "info: unit t0^2, same seed, 10^7 replications: D in [{:.6}, {:.6}], band {band:.6}",
        k.lower, k.upper
    ));
    details.insert(0, "10^5 replications each, alpha = 0.01 band".into());
    verdict(
        7,
        "mixture CDFs against simulated statistics",
        pass,
        &details,
    );
}

#[test]
fn c08_diagnostics_are_blind() {
    let mut pass = true;
    let mut details = Vec::new();
    for (name, p, seed) in [
        ("unit", MixtureParams::unit(1.0), 81),
        ("octane", octane(), 82),
    ] {
        let r = blindness_suite(&p, &McConfig::new(10_000, seed), &exec()).unwrap();
        let ok = r.identities_hold(1e-10);
        pass &= ok;
        let g = &r.gaps;
        details.push(format!(
            "{name}: max relative gap W {:.1e}, U {:.1e}, b1 {:.1e}, b2 {:.1e}, studentized {:.1e}",
            g.shapiro_type_w, g.von_neumann_ratio, g.b1, g.b2, g.studentized
        ));
    }
    let design =
        OneWayDesign::new(vec![4, 6, 5], vec![1.0, 2.5, 4.0], vec![1.0, 1.0, 1.0]).unwrap();
    let mc = mc_oneway(
        &design,
        Some(&octane()),
        &McConfig::new(10_000, 83),
        &exec(),
    )
    .unwrap();
    pass &= mc.max_identity_gap < 1e-10;
    details.push(format!(
        "one-way F(Y) vs F(Z): max relative gap {:.1e}",
        mc.max_identity_gap
    ));
    details.insert(0, "10^4 replications, tol 1e-10".into());
    verdict(
        8,
        "scale-free statistics ignore calibration",
        pass,
        &details,
    );
}

#[test]
fn c09_stochastic_orderings() {
    let mut pass = true;
    let mut details = Vec::new();
    let crit = tsq_critical(10.0, 0.05).unwrap();
    let v = ordering_probe(
        OrderingFamily::VarianceInLambda { nu: 10.0 },
        &[1.0, 4.0, 9.0],
        &[2.0, 5.0, 10.0, 20.0, 60.0],
        &q(),
    )
    .unwrap();
    pass &= v.holds_strictly();
    details.push(format!(
        "variance mixture, lambda 1 < 4 < 9: strictly decreasing, max step {:.2e}",
        v.max_violation
    ));
    for lambda in [1.0, 4.0, 9.0] {
        let r = ordering_probe(
            OrderingFamily::TsqInDelta { nu: 10.0, lambda },
            &[0.0, 1.0, 4.0, 9.0],
            &[crit],
            &q(),
        )
        .unwrap();
        pass &= r.holds_strictly();
        details.push(format!(
            "t^2 at c = {crit:.4}, lambda {lambda}: decreasing in delta, max step {:.2e}",
            r.max_violation
        ));
    }
    for delta in [0.0, 1.0, 4.0, 9.0] {
        let r = ordering_probe(
            OrderingFamily::TsqInLambda { nu: 10.0, delta },
            &[1.0, 4.0, 9.0],
            &[crit],
            &q(),
        )
        .unwrap();
        let ok = if delta == 0.0 {
            r.max_violation.abs() < 1e-10
        } else {
            r.holds_strictly()
        };
        pass &= ok;
        let shape = if delta == 0.0 { "flat" } else { "increasing" };
        details.push(format!(
            "t^2 at c = {crit:.4}, delta {delta}: {shape} in lambda, max step {:.2e}",
            r.max_violation
        ));
    }
    verdict(
        9,
        "stochastic orderings of the mixture laws",
        pass,
        &details,
    );
}

#[test]
fn c10_densities_normalize() {
    let grid: [[f64; 7]; 12] = [
        [10.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        [10.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0],
        [11.0, 87.2818, 0.1846, 0.0, 1.0, 1.8546, 0.5837],
        [5.0, 0.0, 0.3, 2.0, 0.5, 0.8, 0.4],
        [30.0, -2.0, 0.1, -1.0, 2.0, 3.0, 0.5],
        [4.0, 5.0, 2.0, 0.5, 3.0, -1.5, 1.2],
        [20.0, 1.0, 0.0, 1.0, 1.0, 2.0, 1.0],
        [8.0, 0.0, 1.0, 0.0, 1.0, 0.2, 1.0],
        [15.0, 3.0, 0.5, 4.0, 0.7, 1.0, 0.1],
        [3.0, 1.0, 1.0, 1.0, 1.0, 5.0, 1.0],
        [50.0, 0.0, 0.05, 0.0, 1.0, 1.0, 0.3],
        [6.0, 2.0, 0.7, -2.0, 1.5, -0.6, 0.9],
    ];
    // the criterion is 1e-6; a tighter outer rule only chases the inner mixing error
    let tol = QuadTol::new(1e-8, 1e-8);
    let mut worst = [0.0f64; 5];
    let names = ["mean", "variance", "t^2", "signed t", "calibrated t^2"];
    for row in grid {
        let p = row_params(row);
        let mu0 = p.mu_y() - 0.8 * p.sigma_z;
        let DistSpec::Tsq { nu, delta, lambda } = DistSpec::tsq_for(&p, mu0).unwrap() else {
            unreachable!()
        };
        let laws: [Box<dyn CdfEval>; 5] = [
            Box::new(MeanMixture::new(p, q()).unwrap()),
            Box::new(VarianceMixture::from_params(&p, q()).unwrap()),
            Box::new(TsqMixture::new(nu, delta, lambda, q()).unwrap()),
            Box::new(
                SignedTMixture::new(
                    nu,
                    (p.n as f64).sqrt() * (p.mu_y() - mu0) / (p.sigma1 * p.sigma_z),
                    p.beta1.abs() / p.sigma1,
                    q(),
                )
                .unwrap(),
            ),
            Box::new(CalibratedTsq::new(p, mu0, q()).unwrap()),
        ];
        for (k, law) in laws.iter().enumerate() {
            let m = pdf_mass(law.as_ref(), 1e-5, &tol).unwrap();
            worst[k] = worst[k].max((m.total() - 1.0).abs());
        }
    }
    let pass = worst.iter().all(|&w| w <= 1e-6);
    let details: Vec<String> = names
        .iter()
        .zip(worst)
        .map(|(n, w)| format!("{n}: max |mass - 1| = {w:.1e} over 12 parameter points, tol 1e-6"))
        .collect();
    verdict(
        10,
        "every mixture density integrates to one",
        pass,
        &details,
    );
}
