//! One function per subcommand, each producing a [`Report`].

use std::fmt::Write as _;
use std::path::Path;

use calmix_core::special::{chi2_quantile, f_cdf, norm_quantile};
use calmix_core::{
    blindness_suite, calibration_params, correlation_params, decompose, derive_params, diagnose,
    expected_sample_variance, f_power, fit_calibration, group_variance_bias, group_variances,
    homoscedasticity_condition, interval_coverage, ks_band, ks_bounds, mc_inconsistency_curve,
    mc_statistic_sample, mean_moments, nonrejection_via_signed, operating_characteristics,
    power_table, probability_region, simulate_summary, tsq_critical, variance_tests, CalibratedTsq,
    CdfEval, DistSpec, Estimate, MeanMixture, MixtureParams, QuadSpec, SimMode, Statistic, TsqTest,
    VarianceMixture,
};
use serde_json::json;

use crate::args::{DistKind, LawArgs, McArgs, ParamArgs, QuadArgs, RegionDist, StatKind};
use crate::config::{octane_params, Resolver};
use crate::error::{CliError, CliResult};
use crate::exec::Rayon;
use crate::io;
use crate::report::{Cell, Report, Table};

/// Label of the simulation stream layout, echoed for provenance.
pub const STREAM_VERSION: &str = "chacha8-block1024-boxmuller-v1";

pub struct Ctx {
    pub r: Resolver,
    pub precision: usize,
}

impl Ctx {
    fn report(&self, command: &str, options: serde_json::Value) -> Report {
        Report::new(command, self.r.echo(options, self.precision))
    }
}

fn executor(threads: Option<usize>) -> CliResult<Rayon> {
    if threads == Some(0) {
        return Err(CliError::usage("--threads must be positive"));
    }
    Rayon::new(threads).map_err(|e| CliError::usage(format!("thread pool: {e}")))
}

fn params_table(name: &str, p: &MixtureParams) -> Table {
    Table::record(
        name,
        vec![
            ("n", p.n.into()),
            ("beta0", p.beta0.into()),
            ("sigma0", p.sigma0.into()),
            ("mu_z", p.mu_z.into()),
            ("sigma_z", p.sigma_z.into()),
            ("beta1", p.beta1.into()),
            ("sigma1", p.sigma1.into()),
        ],
    )
}

fn estimate_row(name: &str, e: &Estimate, model: Option<f64>) -> Vec<Cell> {
    let z = model.map(|m| e.z_score(m));
    vec![
        name.into(),
        e.estimate.into(),
        e.std_error.into(),
        model.into(),
        z.into(),
    ]
}

pub fn fit(
    ctx: &mut Ctx,
    input: Option<&std::path::PathBuf>,
    n: Option<usize>,
    mu_z: Option<f64>,
    sigma_z: f64,
) -> CliResult<Report> {
    let path = ctx.r.input(input)?;
    let data = io::read_calibration(&path)?;
    let f = fit_calibration(&data)?;
    let mut rep = ctx.report("fit", json!({ "n": n, "mu_z": mu_z, "sigma_z": sigma_z }));
    rep.tables.push(Table::record(
        "fit",
        vec![
            ("n0", f.n0.into()),
            ("xbar", f.xbar.into()),
            ("sxx", f.sxx.into()),
            ("beta0_hat", f.beta0_hat.into()),
            ("beta1_hat", f.beta1_hat.into()),
            ("sigma_u_hat", f.sigma_u_hat.into()),
            ("sigma0", f.sigma0.into()),
            ("sigma1", f.sigma1.into()),
        ],
    ));
    if let Some(n) = n {
        let p = f.mixture_params(n, mu_z.unwrap_or(f.xbar), sigma_z)?;
        rep.tables.push(params_table("params", &p));
    }
    Ok(rep)
}

fn build_law(
    ctx: &mut Ctx,
    dist: DistKind,
    law: &LawArgs,
    params: &ParamArgs,
    mu_y0: Option<f64>,
) -> CliResult<DistSpec> {
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| CliError::usage(format!("--nu given, so {flag} is required")))
    };
    let need_mu0 = || mu_y0.ok_or_else(|| CliError::usage("this law needs --mu-y0"));
    if let Some(nu) = law.nu {
        return Ok(match dist {
            DistKind::Variance => DistSpec::Variance {
                nu,
                lambda: need(law.lambda, "--lambda")?,
            },
            DistKind::Tsq => DistSpec::Tsq {
                nu,
                delta: need(law.delta, "--delta")?,
                lambda: need(law.lambda, "--lambda")?,
            },
            DistKind::SignedT => DistSpec::SignedT {
                nu,
                delta0: need(law.delta0, "--delta0")?,
                lambda0: need(law.lambda0, "--lambda0")?,
            },
            DistKind::Mean | DistKind::CalibratedTsq => {
                return Err(CliError::usage(
                    "this law is built from mixture parameters, not --nu",
                ))
            }
        });
    }
    let p = ctx.r.params(params)?;
    Ok(match dist {
        DistKind::Mean => DistSpec::Mean(p),
        DistKind::Variance => DistSpec::variance_for(&p)?,
        DistKind::Tsq => DistSpec::tsq_for(&p, need_mu0()?)?,
        DistKind::SignedT => {
            let mu0 = need_mu0()?;
            let d = derive_params(&p, None)?;
            DistSpec::SignedT {
                nu: d.nu,
                delta0: (p.n as f64).sqrt() * (p.mu_y() - mu0) / (p.sigma1 * p.sigma_z),
                lambda0: p.beta1 / p.sigma1,
            }
        }
        DistKind::CalibratedTsq => DistSpec::CalibratedTsq {
            params: p,
            mu_y0: need_mu0()?,
        },
    })
}

#[allow(clippy::too_many_arguments)]
pub fn density(
    ctx: &mut Ctx,
    dist: DistKind,
    law: &LawArgs,
    params: &ParamArgs,
    mu_y0: Option<f64>,
    from: Option<f64>,
    to: Option<f64>,
    points: usize,
    quad: &QuadArgs,
) -> CliResult<Report> {
    if points < 2 {
        return Err(CliError::usage("--points must be at least 2"));
    }
    let q = ctx.r.quad(quad)?;
    let spec = build_law(ctx, dist, law, params, mu_y0)?;
    let m = spec.build(q)?;
    let lo = match from {
        Some(v) => v,
        None => m.quantile(1e-4)?,
    };
    let hi = match to {
        Some(v) => v,
        None => m.quantile(1.0 - 1e-4)?,
    };
    if !(lo < hi) {
        return Err(CliError::usage("grid needs from < to"));
    }
    let mut rep = ctx.report(
        "density",
        json!({ "law": spec, "from": lo, "to": hi, "points": points }),
    );
    let mut t = Table::new("density", &["u", "pdf", "cdf"]);
    for i in 0..points {
        let u = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        t.push(vec![u.into(), m.pdf(u)?.into(), m.cdf(u)?.into()]);
    }
    rep.tables.push(t);
    Ok(rep)
}

pub fn moments(
    ctx: &mut Ctx,
    params: &ParamArgs,
    mu_y0: Option<f64>,
    quad: &QuadArgs,
) -> CliResult<Report> {
    let q = ctx.r.quad(quad)?;
    let p = ctx.r.params(params)?;
    let m = mean_moments(&p, &q)?;
    let b = expected_sample_variance(&p)?;
    let (_, rho) = correlation_params(&p, None)?;
    let mut rep = ctx.report("moments", json!({ "mu_y0": mu_y0 }));
    rep.tables.push(Table::record(
        "mean_moments",
        vec![
            ("mean", m.mean.into()),
            ("variance", m.variance.into()),
            ("skewness", m.skewness.into()),
            ("kurtosis", m.kurtosis.into()),
            ("quadrature_variance", m.quadrature_variance.into()),
        ],
    ));
    rep.tables.push(Table::record(
        "variance_bias",
        vec![
            ("expected_s2", b.expected_s2.into()),
            ("var_y", b.var_y.into()),
            ("bias", b.bias.into()),
            ("correlation", rho.into()),
        ],
    ));
    if !p.known_coefficients {
        let d = derive_params(&p, mu_y0)?;
        rep.tables.push(Table::record(
            "derived",
            vec![
                ("nu", d.nu.into()),
                ("kappa2", d.kappa2.into()),
                ("lambda", d.lambda.into()),
                ("delta", d.delta.into()),
                ("mu_y", d.mu_y.into()),
                ("var_ybar", d.var_ybar.into()),
            ],
        ));
    }
    Ok(rep)
}

pub fn region(
    ctx: &mut Ctx,
    dist: RegionDist,
    coverage: f64,
    interval: &[f64],
    params: &ParamArgs,
    quad: &QuadArgs,
) -> CliResult<Report> {
    if !(interval.is_empty() || interval.len() == 2) {
        return Err(CliError::usage("--interval takes two values, lo,hi"));
    }
    let q = ctx.r.quad(quad)?;
    let p = ctx.r.params(params)?;
    let (name, law, scale): (&str, Box<dyn CdfEval>, f64) = match dist {
        RegionDist::Mean => ("mean", Box::new(MeanMixture::new(p, q)?), 1.0),
        RegionDist::Variance => (
            "scaled_variance",
            Box::new(VarianceMixture::from_params(&p, q)?),
            1.0,
        ),
        RegionDist::S2 => {
            let v = VarianceMixture::from_params(&p, q)?;
            let scale = p.sigma1 * p.sigma1 * p.sigma_z * p.sigma_z / v.nu();
            ("s2", Box::new(v), scale)
        }
    };
    let r = probability_region(law.as_ref(), coverage)?;
    let mut rep = ctx.report(
        "region",
        json!({ "dist": name, "coverage": coverage, "interval": interval }),
    );
    rep.tables.push(Table::record(
        "region",
        vec![
            ("statistic", name.into()),
            ("lower", (r.lower * scale).into()),
            ("upper", (r.upper * scale).into()),
            ("coverage", r.coverage.into()),
            ("achieved", r.achieved.into()),
        ],
    ));
    if let [lo, hi] = interval {
        let prob = interval_coverage(law.as_ref(), lo / scale, hi / scale)?;
        rep.tables.push(Table::record(
            "interval",
            vec![
                ("lower", (*lo).into()),
                ("upper", (*hi).into()),
                ("probability", prob.into()),
            ],
        ));
    }
    Ok(rep)
}

pub fn power(
    ctx: &mut Ctx,
    nu: f64,
    deltas: &[f64],
    lambdas: &[f64],
    alpha: f64,
    quad: &QuadArgs,
) -> CliResult<Report> {
    let q = ctx.r.quad(quad)?;
    let cells = power_table(nu, deltas, lambdas, alpha, &q)?;
    let mut rep = ctx.report(
        "power-table",
        json!({ "nu": nu, "delta": deltas, "lambda": lambdas, "alpha": alpha }),
    );
    let mut long = Table::new(
        "power",
        &[
            "delta",
            "lambda",
            "critical",
            "nonrejection",
            "rejection",
            "nonrejection_signed",
        ],
    );
    let mut cols = vec!["delta".to_string()];
    cols.extend(lambdas.iter().map(|l| format!("lambda_{l}")));
    let mut wide = Table {
        name: "grid".into(),
        columns: cols,
        rows: Vec::new(),
    };
    for row in &cells {
        let mut w = vec![Cell::Num(row[0].delta)];
        for c in row {
            let signed = nonrejection_via_signed(nu, c.delta, c.lambda, alpha, &q)?;
            long.push(vec![
                c.delta.into(),
                c.lambda.into(),
                c.critical.into(),
                c.nonrejection_prob.into(),
                c.rejection_prob.into(),
                signed.into(),
            ]);
            w.push(c.nonrejection_prob.into());
        }
        wide.rows.push(w);
    }
    rep.tables.push(wide);
    rep.tables.push(long);
    Ok(rep)
}

#[allow(clippy::too_many_arguments)]
pub fn simulate(
    ctx: &mut Ctx,
    params: &ParamArgs,
    mc: &McArgs,
    mu_y0: Option<f64>,
    alpha: f64,
    curve: &[usize],
    raw: Option<&Path>,
    statistic: StatKind,
    ks: bool,
    ks_stride: usize,
    quad: &QuadArgs,
) -> CliResult<Report> {
    let q = ctx.r.quad(quad)?;
    let p = ctx.r.params(params)?;
    let cfg = ctx.r.mc(mc)?;
    let exec = executor(mc.threads)?;
    let test = mu_y0.map(|mu_y0| TsqTest { mu_y0, alpha });
    let stat = match statistic {
        StatKind::Mean => Statistic::Mean,
        StatKind::S2 => Statistic::SampleVariance,
        StatKind::ScaledVariance => Statistic::ScaledVariance,
        StatKind::Tsq => Statistic::Tsq {
            mu_y0: mu_y0.ok_or_else(|| CliError::usage("--statistic tsq needs --mu-y0"))?,
        },
    };
    let mut rep = ctx.report(
        "simulate",
        json!({
            "stream_version": STREAM_VERSION,
            "mu_y0": mu_y0,
            "alpha": alpha,
            "curve": curve,
            "raw": raw,
            "statistic": format!("{statistic:?}").to_lowercase(),
            "ks": ks,
            "ks_stride": ks_stride,
        }),
    );

    let s = simulate_summary(&p, &cfg, test, &exec)?;
    // in full-calibration mode the coefficient spread comes from the design
    let sim_p = p;
    let p = match &cfg.mode {
        SimMode::FullCalibration { design, sigma_u } => {
            calibration_params(&sim_p, design, *sigma_u)?
        }
        SimMode::CoefficientLevel => sim_p,
    };
    let mm = mean_moments(&p, &q)?;
    let b = expected_sample_variance(&p)?;
    let (_, rho) = correlation_params(&p, None)?;
    let mut t = Table::new(
        "summary",
        &["quantity", "estimate", "std_error", "model", "z"],
    );
    t.push(estimate_row("mean_ybar", &s.mean_ybar, Some(p.mu_y())));
    t.push(estimate_row("var_ybar", &s.var_ybar, Some(p.var_ybar())));
    t.push(estimate_row("skew_ybar", &s.skew_ybar, Some(mm.skewness)));
    t.push(estimate_row("mean_s2", &s.mean_s2, Some(b.expected_s2)));
    t.push(estimate_row("var_y", &s.var_y, Some(b.var_y)));
    t.push(estimate_row("corr_y12", &s.corr_y12, Some(rho)));
    if let (Some(e), Some(test)) = (&s.rejection_rate, test) {
        let model = if p.known_coefficients {
            None
        } else {
            let c = tsq_critical((p.n - 1) as f64, alpha)?;
            Some(1.0 - CalibratedTsq::new(p, test.mu_y0, q)?.cdf(c)?)
        };
        t.push(estimate_row("rejection_rate", e, model));
    }
    rep.tables.push(t);

    if !curve.is_empty() {
        let pts = mc_inconsistency_curve(&sim_p, curve, &cfg, &exec)?;
        let mut t = Table::new(
            "curve",
            &["n", "var_ybar", "std_error", "model", "z", "floor"],
        );
        for c in pts {
            t.push(vec![
                c.n.into(),
                c.var_ybar.estimate.into(),
                c.var_ybar.std_error.into(),
                c.model.into(),
                c.var_ybar.z_score(c.model).into(),
                c.floor.into(),
            ]);
        }
        rep.tables.push(t);
    }

    if raw.is_some() || ks {
        let mut sample = mc_statistic_sample(&sim_p, stat, &cfg, &exec)?;
        if let Some(path) = raw {
            write_raw(path, &rep, &sample)?;
        }
        if ks {
            let law: Box<dyn CdfEval> = match stat {
                Statistic::Mean => Box::new(MeanMixture::new(p, q)?),
                Statistic::SampleVariance | Statistic::ScaledVariance => {
                    Box::new(VarianceMixture::from_params(&p, q)?)
                }
                Statistic::Tsq { mu_y0 } => Box::new(CalibratedTsq::new(p, mu_y0, q)?),
            };
            let scale = match stat {
                Statistic::SampleVariance => {
                    (p.n - 1) as f64 / (p.sigma1 * p.sigma1 * p.sigma_z * p.sigma_z)
                }
                _ => 1.0,
            };
            let band = ks_band(sample.len(), 0.01);
            let k = ks_bounds(&mut sample, |x| law.cdf(x * scale), ks_stride.max(1))?;
            rep.tables.push(Table::record(
                "ks",
                vec![
                    ("replications", sample.len().into()),
                    ("distance_lower", k.lower.into()),
                    ("distance_upper", k.upper.into()),
                    ("band_0.01", band.into()),
                    ("within_band", (k.upper < band).into()),
                ],
            ));
        }
    }
    Ok(rep)
}

fn write_raw(path: &Path, rep: &Report, sample: &[f64]) -> CliResult<()> {
    let mut s = String::new();
    let _ = writeln!(s, "# command: {}", rep.command);
    let _ = writeln!(s, "# config: {}", rep.config);
    s.push_str("replication,value\n");
    for (i, v) in sample.iter().enumerate() {
        let _ = writeln!(s, "{i},{v:e}");
    }
    std::fs::write(path, s).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn diagnose_cmd(
    ctx: &mut Ctx,
    input: Option<&std::path::PathBuf>,
    column: &str,
    blindness: bool,
    params: &ParamArgs,
    mc: &McArgs,
) -> CliResult<Report> {
    let path = ctx.r.optional_input(input)?;
    if path.is_none() && !blindness {
        return Err(CliError::usage(
            "diagnose needs --input, --blindness, or both",
        ));
    }
    let suite = if blindness {
        let p = ctx.r.params(params)?;
        let cfg = ctx.r.mc(mc)?;
        Some(blindness_suite(&p, &cfg, &executor(mc.threads)?)?)
    } else {
        None
    };
    let mut rep = ctx.report(
        "diagnose",
        json!({ "column": column, "blindness": blindness, "stream_version": STREAM_VERSION }),
    );
    if let Some(path) = path {
        let y = io::read_series(&path, column)?;
        let d = diagnose(&y)?;
        rep.tables.push(Table::record(
            "diagnostics",
            vec![
                ("n", d.n.into()),
                ("von_neumann_ratio", d.von_neumann_ratio.into()),
                ("shapiro_type_w", d.shapiro_type_w.into()),
                ("b1", d.b1.into()),
                ("b2", d.b2.into()),
                ("sample_sd", d.residuals.sample_sd.into()),
            ],
        ));
        let mut t = Table::new(
            "residuals",
            &["index", "value", "residual", "studentized", "r_student"],
        );
        for (i, v) in y.iter().enumerate() {
            let r = &d.residuals;
            t.push(vec![
                (i + 1).into(),
                (*v).into(),
                r.residuals[i].into(),
                r.studentized[i].into(),
                r.r_student[i].into(),
            ]);
        }
        rep.tables.push(t);
    }
    if let Some(b) = suite {
        let g = &b.gaps;
        let mut t = Table::new("blindness_gaps", &["statistic", "max_relative_gap"]);
        for (name, v) in [
            ("shapiro_type_w", g.shapiro_type_w),
            ("von_neumann_ratio", g.von_neumann_ratio),
            ("b1", g.b1),
            ("b2", g.b2),
            ("studentized", g.studentized),
        ] {
            t.push(vec![name.into(), Cell::Text(format!("{v:e}"))]);
        }
        rep.tables.push(t);
        let mut t = Table::new(
            "blindness_ks",
            &["statistic", "distance", "band_0.01", "within_band"],
        );
        for k in &b.ks {
            t.push(vec![
                k.statistic.into(),
                k.distance.into(),
                k.band.into(),
                (k.distance < k.band).into(),
            ]);
        }
        rep.tables.push(t);
    }
    Ok(rep)
}

#[allow(clippy::too_many_arguments)]
pub fn anova(
    ctx: &mut Ctx,
    input: Option<&std::path::PathBuf>,
    sizes: &[usize],
    means: &[f64],
    sds: &[f64],
    alpha: f64,
    params: &ParamArgs,
    quad: &QuadArgs,
) -> CliResult<Report> {
    let q = ctx.r.quad(quad)?;
    let path = ctx.r.optional_input(input)?;
    let design = ctx.r.design(sizes, means, sds)?;
    if path.is_none() && design.is_none() {
        return Err(CliError::usage(
            "anova needs grouped data (--input) or a design (--sizes --means --sds or config)",
        ));
    }
    let p = ctx.r.optional_params(params)?;
    let common_sd = design
        .as_ref()
        .map(|d| d.sds.iter().all(|&s| s == d.sds[0]));
    if common_sd == Some(false) {
        ctx.r
            .log
            .push("power skipped: group standard deviations differ".into());
    }
    let mut rep = ctx.report("anova", json!({ "alpha": alpha }));
    if let Some(path) = path {
        let g = io::read_groups(&path)?;
        let a = decompose(&g.y, &g.sizes)?;
        let (df1, df2) = (a.df1 as f64, a.df2 as f64);
        let p_value = 1.0 - f_cdf(a.f_statistic, df1, df2);
        let mut t = Table::new("anova", &["source", "ss", "df", "ms", "f", "p_value"]);
        let n = g.y.len();
        t.push(vec![
            "mean".into(),
            a.ss0.into(),
            1usize.into(),
            a.ss0.into(),
            Cell::Missing,
            Cell::Missing,
        ]);
        t.push(vec![
            "between".into(),
            a.ss1.into(),
            a.df1.into(),
            (a.ss1 / df1).into(),
            a.f_statistic.into(),
            p_value.into(),
        ]);
        t.push(vec![
            "within".into(),
            a.ss2.into(),
            a.df2.into(),
            (a.ss2 / df2).into(),
            Cell::Missing,
            Cell::Missing,
        ]);
        t.push(vec![
            "total".into(),
            a.total.into(),
            n.into(),
            Cell::Missing,
            Cell::Missing,
            Cell::Missing,
        ]);
        rep.tables.push(t);

        let s2 = group_variances(&g.y, &g.sizes)?;
        let mut t = Table::new("groups", &["group", "n", "mean", "variance"]);
        let mut start = 0;
        for ((label, &size), v) in g.labels.iter().zip(&g.sizes).zip(&s2) {
            let m = g.y[start..start + size].iter().sum::<f64>() / size as f64;
            start += size;
            t.push(vec![
                label.as_str().into(),
                size.into(),
                m.into(),
                (*v).into(),
            ]);
        }
        rep.tables.push(t);
        if g.sizes.len() >= 2 {
            let v = variance_tests(&s2, &g.sizes)?;
            rep.tables.push(Table::record(
                "variance_tests",
                vec![
                    ("bartlett", v.bartlett.into()),
                    ("cochran", v.cochran.into()),
                    ("hartley", v.hartley.into()),
                ],
            ));
        }
    }
    if let Some(d) = design {
        if common_sd == Some(true) {
            let fp = f_power(&d, alpha, &q)?;
            rep.tables.push(Table::record(
                "power",
                vec![
                    ("df1", fp.df1.into()),
                    ("df2", fp.df2.into()),
                    ("lambda", fp.lambda.into()),
                    ("critical", fp.critical.into()),
                    ("power", fp.power.into()),
                ],
            ));
        }
        if let Some(p) = p {
            let bias = group_variance_bias(&d, &p)?;
            let mut t = Table::new("group_bias", &["group", "expected_s2", "var_y", "bias"]);
            for (i, b) in bias.iter().enumerate() {
                t.push(vec![
                    (i + 1).into(),
                    b.expected_s2.into(),
                    b.var_y.into(),
                    b.bias.into(),
                ]);
            }
            rep.tables.push(t);
            let h = homoscedasticity_condition(&d, &p, 1e-12)?;
            let mut t = Table::new("homoscedasticity", &["i", "j", "lhs", "rhs", "holds"]);
            for pc in &h.pairs {
                t.push(vec![
                    (pc.i + 1).into(),
                    (pc.j + 1).into(),
                    pc.lhs.into(),
                    pc.rhs.into(),
                    pc.holds.into(),
                ]);
            }
            rep.tables.push(t);
            rep.tables.push(Table::record(
                "homoscedasticity_summary",
                vec![("c", h.c.into()), ("holds", h.holds.into())],
            ));
        }
    }
    Ok(rep)
}

pub fn case_study(
    ctx: &mut Ctx,
    input: Option<&std::path::PathBuf>,
    coverage: f64,
    alpha: f64,
    shift: f64,
    quad: &QuadArgs,
) -> CliResult<Report> {
    let q: QuadSpec = ctx.r.quad(quad)?;
    let path = ctx.r.optional_input(input)?;
    let p = octane_params();
    ctx.r.config.params = Some(p);
    let mu_y0 = p.mu_y() - shift;
    let d = derive_params(&p, Some(mu_y0))?;
    let delta = d.delta.unwrap_or(0.0);
    let mut rep = ctx.report(
        "case-study",
        json!({ "coverage": coverage, "alpha": alpha, "shift": shift, "mu_y0": mu_y0 }),
    );

    let mut t = params_table("parameters", &p);
    t.columns
        .extend(["nu", "lambda", "delta"].map(String::from));
    t.rows[0].extend([d.nu.into(), d.lambda.into(), delta.into()]);
    rep.tables.push(t);

    if let Some(path) = path {
        let f = fit_calibration(&io::read_calibration(&path)?)?;
        let mut t = Table::new("refit", &["quantity", "refit", "reference", "difference"]);
        for (name, a, b) in [
            ("beta0", f.beta0_hat, p.beta0),
            ("sigma0", f.sigma0, p.sigma0),
            ("beta1", f.beta1_hat, p.beta1),
            ("sigma1", f.sigma1, p.sigma1),
        ] {
            t.push(vec![name.into(), a.into(), b.into(), (a - b).into()]);
        }
        rep.tables.push(t);
    }

    let m = mean_moments(&p, &q)?;
    rep.tables.push(Table::record(
        "mean_moments",
        vec![
            ("mean", m.mean.into()),
            ("variance", m.variance.into()),
            ("skewness", m.skewness.into()),
            ("kurtosis", m.kurtosis.into()),
        ],
    ));

    let z = norm_quantile(0.5 + 0.5 * coverage);
    let mean_law = MeanMixture::new(p, q)?;
    let r = probability_region(&mean_law, coverage)?;
    let half = z * p.beta1.abs() * p.sigma_z / (p.n as f64).sqrt();
    let (nlo, nhi) = (p.mu_y() - half, p.mu_y() + half);
    let mut t = Table::new("mean_region", &["kind", "lower", "upper", "probability"]);
    t.push(vec![
        "mixture".into(),
        r.lower.into(),
        r.upper.into(),
        r.achieved.into(),
    ]);
    t.push(vec![
        "normal_theory".into(),
        nlo.into(),
        nhi.into(),
        interval_coverage(&mean_law, nlo, nhi)?.into(),
    ]);
    rep.tables.push(t);

    let b = expected_sample_variance(&p)?;
    rep.tables.push(Table::record(
        "variance_bias",
        vec![
            ("expected_s2", b.expected_s2.into()),
            ("var_y", b.var_y.into()),
            ("bias", b.bias.into()),
        ],
    ));

    let v = VarianceMixture::from_params(&p, q)?;
    let to_s2 = p.sigma1 * p.sigma1 * p.sigma_z * p.sigma_z / d.nu;
    let r = probability_region(&v, coverage)?;
    let tail = 0.5 * (1.0 - coverage);
    let naive = p.beta1 * p.beta1 * p.sigma_z * p.sigma_z / d.nu;
    let (slo, shi) = (
        naive * chi2_quantile(tail, d.nu)?,
        naive * chi2_quantile(1.0 - tail, d.nu)?,
    );
    let mut t = Table::new(
        "variance_region",
        &[
            "kind",
            "scaled_lower",
            "scaled_upper",
            "s2_lower",
            "s2_upper",
            "probability",
        ],
    );
    t.push(vec![
        "mixture".into(),
        r.lower.into(),
        r.upper.into(),
        (r.lower * to_s2).into(),
        (r.upper * to_s2).into(),
        r.achieved.into(),
    ]);
    t.push(vec![
        "normal_theory".into(),
        (slo / to_s2).into(),
        (shi / to_s2).into(),
        slo.into(),
        shi.into(),
        interval_coverage(&v, slo / to_s2, shi / to_s2)?.into(),
    ]);
    rep.tables.push(t);

    let oc = operating_characteristics(d.nu, delta, d.lambda, alpha, &q)?;
    let signed = nonrejection_via_signed(d.nu, delta, d.lambda, alpha, &q)?;
    rep.tables.push(Table::record(
        "operating_characteristic",
        vec![
            ("nu", oc.nu.into()),
            ("delta", oc.delta.into()),
            ("lambda", oc.lambda.into()),
            ("alpha", alpha.into()),
            ("critical", oc.critical.into()),
            ("nonrejection", oc.nonrejection_prob.into()),
            ("nonrejection_signed", signed.into()),
            ("rejection", oc.rejection_prob.into()),
        ],
    ));
    Ok(rep)
}
