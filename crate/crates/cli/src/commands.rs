//! Subcommand implementations.

use crate::config::RunConfig;
use crate::figure2::march;
use crate::output::{sibling, write_csv, write_json, Provenance};
use crate::CliError;
use onebit_core::bound::{
    binary_channel_mi, bracket_terms, nyquist_slope, optimize_lambda, rate_per_unit_cost,
    rdot_of_lambda, Pattern,
};
use onebit_core::expansion::{expand_ccdf2, expand_ccdf3, OffsetSpec};
use onebit_core::gaussmath::{ccdf2_exact, ccdf3_exact, orthant2, orthant3, Corr2, Corr3};
use onebit_core::simulate::{
    exact_nyquist_law, exact_truncated_law, mi_plugin_with_se, rate_per_second, simulate_triples,
    slope_estimate, Sampling, SimConfig,
};
use onebit_core::waveform::{boundary_point, ChannelParams, Features, Pulse};
use onebit_core::QuadratureSettings;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::path::PathBuf;

pub struct Ctx {
    pub cfg: RunConfig,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

impl Ctx {
    fn format_or(&self, default: &str, supported: &[&str]) -> Result<String, CliError> {
        let f = self.format.clone().unwrap_or_else(|| default.to_string());
        if supported.contains(&f.as_str()) {
            Ok(f)
        } else {
            Err(CliError::usage(format!(
                "unsupported format {f:?} (supported: {})",
                supported.join(", ")
            )))
        }
    }
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("malformed {what}: {t:?}")))
        })
        .collect()
}

fn quad_settings(
    cfg: &RunConfig,
    abs_tol: Option<f64>,
    rel_tol: Option<f64>,
    max_subdivisions: Option<usize>,
    defaults: (f64, f64, usize),
) -> Result<QuadratureSettings, CliError> {
    let abs = cfg.resolve("abs_tol", abs_tol, defaults.0)?;
    let rel = cfg.resolve("rel_tol", rel_tol, defaults.1)?;
    let max = cfg.resolve("max_subdivisions", max_subdivisions, defaults.2)?;
    Ok(QuadratureSettings::new(abs, rel, max)?)
}

// ---------------------------------------------------------------- orthant

pub fn orthant(
    ctx: &Ctx,
    rho: Option<f64>,
    k: Option<String>,
    abs_tol: Option<f64>,
    rel_tol: Option<f64>,
    max_subdivisions: Option<usize>,
) -> Result<(), CliError> {
    let format = ctx.format_or("csv", &["csv", "json"])?;
    let q = quad_settings(&ctx.cfg, abs_tol, rel_tol, max_subdivisions, (1e-12, 1e-10, 400))?;
    let mut prov = Provenance::new("orthant");
    prov.push("abs_tol", format!("{:e}", q.abs_tol));
    prov.push("rel_tol", format!("{:e}", q.rel_tol));
    prov.push("max_subdivisions", q.max_subdivisions);

    let mut rows: Vec<(String, Vec<f64>, f64, f64)> = Vec::new();
    match (rho, k) {
        (Some(r), None) => {
            let c = Corr2::new(r)?;
            let closed = orthant2(c);
            let quad = ccdf2_exact(c, 0.0, 0.0, &q)?;
            prov.push("rho", r);
            rows.push(("bivariate".into(), vec![r], closed, quad));
        }
        (None, Some(spec)) => {
            let rs = if spec == "paper" {
                let rho = 2.0 / std::f64::consts::PI;
                vec![rho, 0.0, rho]
            } else {
                parse_list(&spec, "correlation triple")?
            };
            if rs.len() != 3 {
                return Err(CliError::usage("--k expects `paper` or three correlations"));
            }
            let c = Corr3::new(rs[0], rs[1], rs[2])?;
            let closed = orthant3(c);
            let quad = ccdf3_exact(c, 0.0, 0.0, 0.0, &q)?;
            prov.push("k", format!("{},{},{}", rs[0], rs[1], rs[2]));
            rows.push(("trivariate".into(), rs, closed, quad));
        }
        _ => return Err(CliError::usage("pass exactly one of --rho or --k")),
    }

    if format == "json" {
        let body: Vec<serde_json::Value> = rows
            .iter()
            .map(|(kind, rs, closed, quad)| {
                serde_json::json!({
                    "kind": kind,
                    "correlations": rs,
                    "closed_form": closed,
                    "quadrature": quad,
                    "delta": (closed - quad).abs(),
                })
            })
            .collect();
        return write_json(ctx.out.as_deref(), &prov, serde_json::json!({ "rows": body }));
    }
    write_csv(
        ctx.out.as_deref(),
        &prov,
        "kind,rho12,rho13,rho23,closed_form,quadrature,delta",
        rows.into_iter().map(|(kind, rs, closed, quad)| {
            let (r12, r13, r23) = match rs.len() {
                1 => (format!("{:.17e}", rs[0]), String::new(), String::new()),
                _ => (
                    format!("{:.17e}", rs[0]),
                    format!("{:.17e}", rs[1]),
                    format!("{:.17e}", rs[2]),
                ),
            };
            format!(
                "{kind},{r12},{r13},{r23},{closed:.17e},{quad:.17e},{:.3e}",
                (closed - quad).abs()
            )
        }),
    )
}

// ------------------------------------------------------------ verify-prop

const ENVELOPE_SLACK: f64 = 1e-9;

pub fn verify_prop(
    ctx: &Ctx,
    draws: Option<usize>,
    max_a: Option<f64>,
    seed: Option<u64>,
) -> Result<(), CliError> {
    ctx.format_or("json", &["json"])?;
    let draws = draws.unwrap_or(10_000);
    let max_a = max_a.unwrap_or(0.5);
    let seed = ctx.cfg.resolve("seed", seed, 1)?;
    if draws < 1 {
        return Err(CliError::usage("--draws must be at least 1"));
    }
    if !(max_a >= 0.0) {
        return Err(CliError::usage("--max-a must be nonnegative"));
    }
    let q = QuadratureSettings::default();

    let mut prov = Provenance::new("verify-prop");
    prov.push("draws", draws);
    prov.push("max_a", max_a);
    prov.push("seed", seed);
    prov.push("slack", ENVELOPE_SLACK);

    // Deterministic draw lists, generated up front; the expensive quadrature
    // sweep fans out over them.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let biv: Vec<(f64, f64, f64, f64)> = (0..draws)
        .map(|_| {
            (
                rng.random_range(-0.95..0.95),
                rng.random_range(0.0..=max_a),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            )
        })
        .collect();
    let tri: Vec<(Corr3, f64, f64, f64, f64)> = (0..draws)
        .map(|_| {
            let c = loop {
                let r12 = rng.random_range(-0.95..0.95);
                let r13 = rng.random_range(-0.95..0.95);
                let r23 = rng.random_range(-0.95..0.95);
                if let Ok(c) = Corr3::new(r12, r13, r23) {
                    if c.det() >= 1e-3 {
                        break c;
                    }
                }
            };
            (
                c,
                rng.random_range(0.0..=max_a),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            )
        })
        .collect();

    let biv_results: Vec<Result<f64, onebit_core::Error>> = biv
        .par_iter()
        .map(|&(rho, a, alpha, beta)| {
            let c = Corr2::new(rho)?;
            let o = OffsetSpec::bivariate(a, alpha, beta)?;
            let r = expand_ccdf2(c, &o)?;
            let exact = ccdf2_exact(c, alpha * a, beta * a, &q)?;
            Ok((exact - r.approx).abs() / (r.envelope + ENVELOPE_SLACK))
        })
        .collect();
    let tri_results: Vec<Result<f64, onebit_core::Error>> = tri
        .par_iter()
        .map(|&(c, a, alpha, beta, gamma)| {
            let o = OffsetSpec::trivariate(a, alpha, beta, gamma)?;
            let r = expand_ccdf3(c, &o)?;
            let exact = ccdf3_exact(c, alpha * a, beta * a, gamma * a, &q)?;
            Ok((exact - r.approx).abs() / (r.envelope + ENVELOPE_SLACK))
        })
        .collect();

    let summarize = |results: Vec<Result<f64, onebit_core::Error>>| -> Result<(f64, usize, usize), CliError> {
        let mut max_ratio = 0.0f64;
        let mut worst = 0usize;
        let mut violations = 0usize;
        for (i, r) in results.into_iter().enumerate() {
            let ratio = r?;
            if ratio > max_ratio {
                max_ratio = ratio;
                worst = i;
            }
            if ratio > 1.0 + 1e-6 {
                violations += 1;
            }
        }
        Ok((max_ratio, worst, violations))
    };
    let (biv_max, biv_worst, biv_viol) = summarize(biv_results)?;
    let (tri_max, tri_worst, tri_viol) = summarize(tri_results)?;

    let worst_biv = biv[biv_worst];
    let worst_tri = &tri[tri_worst];
    let body = serde_json::json!({
        "draws": draws,
        "bivariate": {
            "max_ratio": biv_max,
            "violations": biv_viol,
            "worst_draw": {
                "rho": worst_biv.0, "a": worst_biv.1,
                "alpha": worst_biv.2, "beta": worst_biv.3,
            },
        },
        "trivariate": {
            "max_ratio": tri_max,
            "violations": tri_viol,
            "worst_draw": {
                "rho12": worst_tri.0.rho12(), "rho13": worst_tri.0.rho13(),
                "rho23": worst_tri.0.rho23(), "a": worst_tri.1,
                "alpha": worst_tri.2, "beta": worst_tri.3, "gamma": worst_tri.4,
            },
        },
    });
    write_json(ctx.out.as_deref(), &prov, body)?;
    if biv_viol + tri_viol > 0 {
        return Err(CliError::violation(format!(
            "{} envelope violations (bivariate {biv_viol}, trivariate {tri_viol})",
            biv_viol + tri_viol
        )));
    }
    Ok(())
}

// ----------------------------------------------------------------- bound

pub fn bound(
    ctx: &Ctx,
    lambda: Option<f64>,
    features: Option<String>,
    w: Option<f64>,
    n0: Option<f64>,
) -> Result<(), CliError> {
    ctx.format_or("json", &["json"])?;
    let w = ctx.cfg.resolve("w", w, 1.0)?;
    let n0 = ctx.cfg.resolve("n0", n0, 1.0)?;
    let ch = ChannelParams::new(w, n0, 0.0)?;
    let lambda = ctx.cfg.resolve_opt("lambda", lambda)?;

    let mut prov = Provenance::new("bound");
    prov.push("w", w);
    prov.push("n0", n0);

    let f = match (lambda, features) {
        (Some(l), None) => {
            prov.push("lambda", l);
            let (a, b) = boundary_point(l, &ch);
            Features::symmetric(a, b)?
        }
        (None, Some(list)) => {
            let vals = parse_list(&list, "feature triple")?;
            if vals.len() != 3 {
                return Err(CliError::usage("--features expects alpha0,beta0,gamma0"));
            }
            prov.push("features", list);
            Features::new(vals[0], vals[1], vals[2])?
        }
        _ => return Err(CliError::usage("pass exactly one of --lambda or --features")),
    };

    let slope = rate_per_unit_cost(&f, &ch);
    let terms = bracket_terms(&f);
    let body = serde_json::json!({
        "features": { "alpha0": f.alpha0, "beta0": f.beta0, "gamma0": f.gamma0 },
        "rate_slope": { "value": slope.value, "normalized": slope.normalized },
        "bracket_terms": terms,
        "baselines": {
            "unquantized_normalized": 1.0,
            "nyquist_normalized": nyquist_slope(&ch).normalized,
            "discrete_hard_limiter_per_use_slope": 1.0 / std::f64::consts::PI,
        },
    });
    write_json(ctx.out.as_deref(), &prov, body)
}

// -------------------------------------------------------------- optimize

pub fn optimize(ctx: &Ctx, bracket: Option<String>, tol: Option<f64>) -> Result<(), CliError> {
    ctx.format_or("json", &["json"])?;
    let bracket = bracket.unwrap_or_else(|| "-5,5".to_string());
    let vals = parse_list(&bracket, "bracket")?;
    if vals.len() != 2 {
        return Err(CliError::usage("--bracket expects lo,hi"));
    }
    let tol = tol.unwrap_or(1e-4);
    let mut prov = Provenance::new("optimize");
    prov.push("bracket", &bracket);
    prov.push("tol", tol);

    if !(vals[0] < vals[1]) {
        return Err(CliError::violation(format!(
            "degenerate bracket [{}, {}]",
            vals[0], vals[1]
        )));
    }
    let out = optimize_lambda((vals[0], vals[1]), tol)?;
    let body = serde_json::json!({
        "lambda_star": out.lambda_star,
        "value": out.value,
        "iterations": out.iterations,
        "at_boundary": out.at_boundary,
    });
    write_json(ctx.out.as_deref(), &prov, body)
}

// --------------------------------------------------------------- figure2

pub fn figure2_cmd(
    ctx: &Ctx,
    resolution: Option<usize>,
    level: Option<f64>,
    lambda_range: Option<String>,
    boundary_out: Option<PathBuf>,
    contour_out: Option<PathBuf>,
) -> Result<(), CliError> {
    ctx.format_or("csv", &["csv"])?;
    let resolution = resolution.unwrap_or(256);
    if resolution < 16 {
        return Err(CliError::usage("--resolution must be at least 16"));
    }
    let level = level.unwrap_or(0.7465);
    let range = lambda_range.unwrap_or_else(|| "-10,10".to_string());
    let vals = parse_list(&range, "lambda range")?;
    if vals.len() != 2 || !(vals[0] < vals[1]) {
        return Err(CliError::usage("--lambda-range expects lo,hi with lo < hi"));
    }

    let boundary_path = boundary_out
        .or_else(|| ctx.out.as_ref().map(|p| sibling(p, "boundary")))
        .unwrap_or_else(|| PathBuf::from("figure2_boundary.csv"));
    let contour_path = contour_out
        .or_else(|| ctx.out.as_ref().map(|p| sibling(p, "contour")))
        .unwrap_or_else(|| PathBuf::from("figure2_contour.csv"));

    let mut prov = Provenance::new("figure2");
    prov.push("resolution", resolution);
    prov.push("level", level);
    prov.push("lambda_range", &range);

    let ch = ChannelParams::new(1.0, 1.0, 0.0)?;
    let boundary_rows: Vec<String> = (0..=resolution)
        .map(|i| {
            let l = vals[0] + (vals[1] - vals[0]) * i as f64 / resolution as f64;
            let (a, b) = boundary_point(l, &ch);
            format!("{l:.17e},{a:.17e},{b:.17e},{:.17e}", rdot_of_lambda(l))
        })
        .collect();
    write_csv(
        Some(&boundary_path),
        &prov,
        "lambda,alpha0,beta0,rdot_normalized",
        boundary_rows,
    )?;

    let field = |a0: f64, b0: f64| -> f64 {
        2.0 / std::f64::consts::PI * onebit_core::bound::bracket_symmetric(a0, b0)
    };
    let loops = march(field, (-1.6, 1.6, -1.6, 1.6), resolution, level);
    if loops.is_empty() {
        return Err(CliError::numeric(format!(
            "no contour found at level {level}"
        )));
    }
    let mut contour_rows = Vec::new();
    for (li, poly) in loops.iter().enumerate() {
        for (vi, (a0, b0)) in poly.points.iter().enumerate() {
            contour_rows.push(format!("{li},{vi},{a0:.17e},{b0:.17e}"));
        }
    }
    write_csv(
        Some(&contour_path),
        &prov,
        "loop,vertex,alpha0,beta0",
        contour_rows,
    )
}

// -------------------------------------------------------------- simulate

pub struct SimulateArgs {
    pub p: Option<f64>,
    pub p_grid: Option<String>,
    pub n: Option<u64>,
    pub seed: Option<u64>,
    pub j: Option<usize>,
    pub pulse: Option<String>,
    pub lambda: Option<f64>,
    pub xi: Option<f64>,
    pub sampling: Option<String>,
    pub w: Option<f64>,
    pub n0: Option<f64>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_subdivisions: Option<usize>,
}

pub fn build_pulse(cfg: &RunConfig, args: &SimulateArgs, w: f64) -> Result<Pulse, CliError> {
    let family = cfg.resolve("pulse", args.pulse.clone(), "raised".to_string())?;
    let lambda = cfg.resolve("lambda", args.lambda, 1.4)?;
    let xi = cfg.resolve("xi", args.xi, 0.25)?;
    Ok(match family.as_str() {
        "sinc" => Pulse::sinc(w)?,
        "optimal" => Pulse::optimal(lambda, w)?,
        "raised" => Pulse::raised(lambda, xi, w)?,
        other => return Err(CliError::usage(format!("unknown pulse family {other:?}"))),
    })
}

pub fn simulate(ctx: &Ctx, args: SimulateArgs) -> Result<(), CliError> {
    let format = ctx.format_or("csv", &["csv", "json"])?;
    let w = ctx.cfg.resolve("w", args.w, 1.0)?;
    let n0 = ctx.cfg.resolve("n0", args.n0, 1.0)?;
    let seed = ctx.cfg.resolve("seed", args.seed, 1)?;
    let j = ctx.cfg.resolve("j", args.j, 8)?;
    let n = ctx.cfg.resolve("n", args.n, 0)?;
    let sampling = match ctx
        .cfg
        .resolve("sampling", args.sampling.clone(), "double".to_string())?
        .as_str()
    {
        "double" => Sampling::Double,
        "nyquist" => Sampling::Nyquist,
        other => return Err(CliError::usage(format!("unknown sampling mode {other:?}"))),
    };
    let q = quad_settings(
        &ctx.cfg,
        args.abs_tol,
        args.rel_tol,
        args.max_subdivisions,
        (5e-9, 1e-7, 400),
    )?;
    let grid: Vec<f64> = match (args.p, &args.p_grid) {
        (Some(p), _) => vec![p],
        (None, Some(list)) => parse_list(list, "power grid")?,
        (None, None) => match ctx.cfg.resolve_opt::<String>("p_grid", None)? {
            Some(list) => parse_list(&list, "power grid")?,
            None => vec![1e-5, 2e-5, 5e-5, 1e-4],
        },
    };
    if grid.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(CliError::usage("powers must be finite and nonnegative"));
    }
    let pulse = build_pulse(&ctx.cfg, &args, w)?;
    let ch = ChannelParams::new(w, n0, grid[0])?;

    let mut prov = Provenance::new("simulate");
    prov.push("w", w);
    prov.push("n0", n0);
    prov.push("seed", seed);
    prov.push("j", j);
    prov.push("n", n);
    prov.push(
        "sampling",
        match sampling {
            Sampling::Double => "double",
            Sampling::Nyquist => "nyquist",
        },
    );
    prov.push("pulse", format!("{:?}", pulse.family()));
    prov.push(
        "p_grid",
        grid.iter()
            .map(|p| format!("{p:e}"))
            .collect::<Vec<_>>()
            .join(","),
    );
    prov.push("abs_tol", format!("{:e}", q.abs_tol));
    prov.push("rel_tol", format!("{:e}", q.rel_tol));

    let mut rows: Vec<String> = Vec::new();
    let mut json_points = Vec::new();
    let mut fit_points: Vec<(f64, f64)> = Vec::new();
    for &p_watts in &grid {
        let mut point = serde_json::Map::new();
        point.insert("p".into(), serde_json::json!(p_watts));

        // Exact ISI-truncated law and its rate.
        let mi_per_second = match sampling {
            Sampling::Double => {
                let law = exact_truncated_law(p_watts, &pulse, &ch, j, &q)?;
                for pat in Pattern::all() {
                    rows.push(format!(
                        "exact_law_cond_plus,{p_watts:e},+1,{pat},{:.17e}",
                        law.cond_plus(pat)
                    ));
                }
                for pat in Pattern::all() {
                    rows.push(format!(
                        "exact_law_unconditional,{p_watts:e},,{pat},{:.17e}",
                        law.unconditional(pat)
                    ));
                }
                point.insert(
                    "exact_law_cond_plus".into(),
                    serde_json::json!(law.cond_plus_masses()),
                );
                rate_per_second(&law, &ch, Sampling::Double)
            }
            Sampling::Nyquist => {
                let law = exact_nyquist_law(p_watts, &pulse, &ch, j)?;
                rows.push(format!("exact_law_cond_plus,{p_watts:e},+1,+,{:.17e}", law[0]));
                rows.push(format!("exact_law_cond_plus,{p_watts:e},+1,-,{:.17e}", law[1]));
                point.insert("exact_law_cond_plus".into(), serde_json::json!(law));
                2.0 * ch.w * binary_channel_mi(law)
            }
        };
        rows.push(format!("mi_exact_per_second,{p_watts:e},,,{mi_per_second:.17e}"));
        point.insert("mi_exact_per_second".into(), serde_json::json!(mi_per_second));
        if p_watts > 0.0 {
            fit_points.push((p_watts, mi_per_second));
        }

        // Monte Carlo tallies and plug-in MI.
        if n > 0 {
            let cfg = SimConfig {
                ch,
                pulse,
                isi_half_width: j,
                n,
                seed,
                sampling,
            };
            let joint = simulate_triples(&cfg, p_watts)?;
            for (row, input) in [(0usize, "+1"), (1, "-1")] {
                for cell in 0..joint.pattern_cells() {
                    let label = match sampling {
                        Sampling::Double => Pattern::from_index(cell as u8).to_string(),
                        Sampling::Nyquist => if cell == 1 { "+" } else { "-" }.to_string(),
                    };
                    rows.push(format!(
                        "empirical_count,{p_watts:e},{input},{label},{}",
                        joint.counts[row][cell]
                    ));
                }
            }
            let (mi, se) = mi_plugin_with_se(&joint)?;
            rows.push(format!("mi_plugin_per_use,{p_watts:e},,,{mi:.17e}"));
            rows.push(format!("mi_plugin_se,{p_watts:e},,,{se:.17e}"));
            point.insert("mi_plugin_per_use".into(), serde_json::json!(mi));
            point.insert("mi_plugin_se".into(), serde_json::json!(se));
            point.insert("empirical_counts".into(), serde_json::json!(joint.counts));
        }
        json_points.push(serde_json::Value::Object(point));
    }

    let mut body = serde_json::Map::new();
    body.insert("points".into(), serde_json::json!(json_points));
    if fit_points.len() >= 2 {
        let fit = slope_estimate(&fit_points, n0)?;
        rows.push(format!("slope_per_watt,,,,{:.17e}", fit.slope.value));
        rows.push(format!("slope_normalized,,,,{:.17e}", fit.slope.normalized));
        rows.push(format!("slope_std_error,,,,{:.17e}", fit.std_error));
        body.insert(
            "slope_fit".into(),
            serde_json::json!({
                "per_watt": fit.slope.value,
                "normalized": fit.slope.normalized,
                "std_error": fit.std_error,
            }),
        );
    }

    if format == "json" {
        return write_json(ctx.out.as_deref(), &prov, serde_json::Value::Object(body));
    }
    write_csv(
        ctx.out.as_deref(),
        &prov,
        "record,p,input,pattern,value",
        rows,
    )
}

// ------------------------------------------------------------------ taps

pub fn taps(
    ctx: &Ctx,
    pulse: Option<String>,
    lambda: Option<f64>,
    xi: Option<f64>,
    w: Option<f64>,
    half_width: Option<usize>,
) -> Result<(), CliError> {
    ctx.format_or("csv", &["csv"])?;
    let w = ctx.cfg.resolve("w", w, 1.0)?;
    let args = SimulateArgs {
        p: None,
        p_grid: None,
        n: None,
        seed: None,
        j: None,
        pulse,
        lambda,
        xi,
        sampling: None,
        w: Some(w),
        n0: None,
        abs_tol: None,
        rel_tol: None,
        max_subdivisions: None,
    };
    let pulse = build_pulse(&ctx.cfg, &args, w)?;
    let half_width = half_width.unwrap_or(64);
    let taps = pulse.taps(half_width)?;

    let mut prov = Provenance::new("taps");
    prov.push("pulse", format!("{:?}", pulse.family()));
    prov.push("w", w);
    prov.push("half_width", half_width);
    prov.push("tail_bound", format!("{:e}", taps.tail_bound()));

    write_csv(
        ctx.out.as_deref(),
        &prov,
        "m,t,g",
        taps.rows()
            .map(|(m, t, g)| format!("{m},{t:.17e},{g:.17e}")),
    )
}
