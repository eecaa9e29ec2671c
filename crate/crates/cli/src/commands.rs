//! One function per CLI command. Each returns the JSON report, an optional
//! CSV curve, and whether the run counts as certified (exit code 0) or as a
//! correct-but-negative outcome (exit code 2).

use crate::config::{GeneratorSpec, PatternSpec, RunConfig};
use crate::report::{csv, float, int, opt_float, str as jstr, Json};
use anyhow::{bail, Result};
use frameweave::frame_core::{
    analytic_bounds, multiplier, BoundsCertificate, GridInfo, WeavingPattern,
};
use frameweave::gabor::{
    density_gate, gabor_frame_bounds_with, gabor_weave_certificate, time_multiplier, verify_cover,
    GaborSystem,
};
use frameweave::packets::{
    counterexample_growth, counterexample_packet, expand_in_packet, fusion_bounds,
    fusion_decompose, BoundsMethod,
};
use frameweave::rng::SplitMix64;
use frameweave::transform::{erasure_experiment, random_bandlimited_signal, roundtrip_batch};
use frameweave::weaving::{
    enumerate_patterns, largest_upper, sample_patterns, weakest_lower, weave_certificate_with,
    weave_envelope_curve, woven_bounds,
};
use nalgebra::DVector;

/// Round-trip reconstruction tolerance.
pub const ROUNDTRIP_TOL: f64 = 1e-10;
/// Slack for pattern-bounds containment in the weave certificate; covers
/// the differing refinement nodes of the two sweeps.
pub const CONTAINMENT_SLACK: f64 = 1e-6;

pub struct Outcome {
    pub report: Json,
    pub curve: Option<String>,
    pub certified: bool,
    /// One-line summary for stdout.
    pub summary: String,
}

fn report_skeleton(command: &str, cfg: &RunConfig, inputs: Json, tolerances: Json) -> Json {
    Json::obj([
        ("command", jstr(command)),
        ("seed", int(cfg.seed as i64)),
        ("inputs", inputs),
        ("tolerances", tolerances),
    ])
}

fn finish(mut report: Json, results: Json, certified: bool) -> (Json, bool) {
    report.push("results", results);
    report.push(
        "status",
        jstr(if certified { "certified" } else { "not-certified" }),
    );
    (report, certified)
}

fn echo_generator(cfg: &RunConfig) -> Json {
    match &cfg.file.generator {
        None => Json::Null,
        Some(GeneratorSpec::Powerlaw { alpha, cutoff }) => Json::obj([
            ("kind", jstr("powerlaw")),
            ("alpha", float(*alpha)),
            ("cutoff", float(*cutoff)),
        ]),
        Some(GeneratorSpec::EvenBands { bands, .. }) => Json::obj([
            ("kind", jstr("even-bands")),
            (
                "bands",
                Json::Arr(
                    bands
                        .iter()
                        .map(|row| Json::Arr(row.iter().map(|&v| float(v)).collect()))
                        .collect(),
                ),
            ),
        ]),
        Some(GeneratorSpec::Indicator { length }) => Json::obj([
            ("kind", jstr("indicator")),
            ("length", float(*length)),
        ]),
    }
}

fn echo_system(a: f64, b: f64, n: u32) -> Json {
    Json::obj([("a", float(a)), ("b", float(b)), ("n", int(n as i64))])
}

fn echo_pattern(cfg: &RunConfig) -> Json {
    match &cfg.file.pattern {
        None => Json::obj([("kind", jstr("constant")), ("ell", int(0))]),
        Some(PatternSpec::Constant { ell }) => {
            Json::obj([("kind", jstr("constant")), ("ell", int(*ell as i64))])
        }
        Some(PatternSpec::Periodic { start, choices }) => Json::obj([
            ("kind", jstr("periodic")),
            ("start", int(*start)),
            (
                "choices",
                Json::Arr(choices.iter().map(|&c| int(c as i64)).collect()),
            ),
        ]),
        Some(PatternSpec::Windowed { start, choices }) => Json::obj([
            ("kind", jstr("windowed")),
            ("start", int(*start)),
            (
                "choices",
                Json::Arr(choices.iter().map(|&c| int(c as i64)).collect()),
            ),
        ]),
    }
}

fn pattern_json(p: &WeavingPattern) -> Json {
    let window = p.window();
    Json::obj([
        (
            "window",
            window.map_or(Json::Null, |(lo, hi)| Json::Arr(vec![int(lo), int(hi)])),
        ),
        (
            "choices",
            Json::Arr(p.choices().iter().map(|&c| int(c as i64)).collect()),
        ),
        (
            "period",
            p.period().map_or(Json::Null, |v| int(v as i64)),
        ),
    ])
}

fn grid_json(g: &GridInfo) -> Json {
    Json::obj([
        ("lo", float(g.lo)),
        ("hi", float(g.hi)),
        ("points", int(g.points as i64)),
        ("log_spaced", Json::Bool(g.log_spaced)),
    ])
}

/// The proven ordering of every bound attached to the certificate, plus
/// whether it holds numerically. Entries are (label, value) with undefined
/// members skipped.
fn chain_json(cert: &BoundsCertificate) -> (Json, bool) {
    let entries: Vec<(&str, Option<f64>)> = vec![
        ("a_analytic", cert.a_analytic),
        ("l_weave", cert.l_weave),
        ("a_num", Some(cert.a_num)),
        ("b_num", Some(cert.b_num)),
        ("u_weave", cert.u_weave),
        ("b_analytic", cert.b_analytic),
    ];
    let defined: Vec<(&str, f64)> = entries
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect();
    let scale = defined
        .iter()
        .map(|&(_, v)| v.abs())
        .fold(1.0f64, f64::max);
    let ok = defined
        .windows(2)
        .all(|w| w[0].1 <= w[1].1 + CONTAINMENT_SLACK * scale);
    let arr = Json::Arr(
        defined
            .iter()
            .map(|&(k, v)| Json::obj([("name", jstr(k)), ("value", float(v))]))
            .collect(),
    );
    (
        Json::obj([("entries", arr), ("ordered", Json::Bool(ok))]),
        ok,
    )
}

fn cert_json(cert: &BoundsCertificate) -> Json {
    let (chain, _) = chain_json(cert);
    Json::obj([
        ("a_num", float(cert.a_num)),
        ("b_num", float(cert.b_num)),
        ("a_analytic", opt_float(cert.a_analytic)),
        ("b_analytic", opt_float(cert.b_analytic)),
        (
            "j_const",
            cert.j_const.map_or(Json::Null, int),
        ),
        (
            "k_const",
            cert.k_const.map_or(Json::Null, int),
        ),
        ("l_weave", opt_float(cert.l_weave)),
        ("u_weave", opt_float(cert.u_weave)),
        ("grid", grid_json(&cert.grid)),
        ("tail_bound", float(cert.tail_bound)),
        ("arg_inf", float(cert.arg_inf)),
        ("arg_sup", float(cert.arg_sup)),
        ("certified", Json::Bool(cert.certified)),
        ("partial_window", Json::Bool(cert.partial_window)),
        ("chain", chain),
    ])
}

/// Sample a scalar function over the certificate's span with exactly `count`
/// rows, matching the configured grid resolution whatever the sweep itself
/// used internally.
fn curve_rows(
    grid: &GridInfo,
    count: usize,
    mut f: impl FnMut(f64) -> Result<f64>,
) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::with_capacity(count);
    for i in 0..count {
        let x = if grid.log_spaced {
            (grid.lo.ln() + i as f64 * (grid.hi.ln() - grid.lo.ln()) / count as f64).exp()
        } else {
            grid.lo + i as f64 * (grid.hi - grid.lo) / count as f64
        };
        rows.push(vec![x, f(x)?]);
    }
    Ok(rows)
}

pub fn bounds(cfg: &RunConfig) -> Result<Outcome> {
    let gen = cfg.wavelet_generator()?;
    let params = cfg.system()?;
    let pattern = cfg.pattern()?;
    let cert = woven_bounds(&gen, &params, &pattern, &cfg.sweep_settings())?;
    let report = report_skeleton(
        "bounds",
        cfg,
        Json::obj([
            ("generator", echo_generator(cfg)),
            ("system", echo_system(params.dilation(), params.translation_step(), params.weaving_order())),
            ("pattern", echo_pattern(cfg)),
            ("grid", int(cfg.grid as i64)),
        ]),
        Json::obj([("containment_slack", float(CONTAINMENT_SLACK))]),
    );
    let curve = curve_rows(&cert.grid, cfg.grid, |g| {
        Ok(multiplier(&gen, &params, &pattern, g)?)
    })?;
    let certified = cert.certified;
    let summary = format!(
        "A = {:.6}, B = {:.6}{}",
        cert.a_num,
        cert.b_num,
        if certified { "" } else { " (not certified)" }
    );
    let (report, certified) = finish(report, cert_json(&cert), certified);
    Ok(Outcome {
        report,
        curve: Some(csv("gamma,m", &curve)),
        certified,
        summary,
    })
}

pub fn weave_certify(cfg: &RunConfig) -> Result<Outcome> {
    let gen = cfg.wavelet_generator()?;
    let params = cfg.system()?;
    let cert = weave_certificate_with(&gen, &params, &cfg.sweep_settings())?;
    let anal = analytic_bounds(&gen, &params).ok();
    let chain_cert = BoundsCertificate {
        a_num: cert.l_weave,
        b_num: cert.u_weave,
        a_analytic: anal.as_ref().map(|a| a.lower),
        b_analytic: anal.as_ref().map(|a| a.upper),
        j_const: anal.as_ref().map(|a| a.j_const),
        k_const: anal.as_ref().map(|a| a.k_const),
        l_weave: Some(cert.l_weave),
        u_weave: Some(cert.u_weave),
        grid: cert.grid,
        tail_bound: cert.tail_bound,
        arg_inf: cert.arg_inf,
        arg_sup: cert.arg_sup,
        certified: cert.is_woven_certified,
        partial_window: false,
    };
    let (chain, _) = chain_json(&chain_cert);
    let results = Json::obj([
        ("l_weave", float(cert.l_weave)),
        ("u_weave", float(cert.u_weave)),
        ("a_analytic", opt_float(anal.as_ref().map(|a| a.lower))),
        ("b_analytic", opt_float(anal.as_ref().map(|a| a.upper))),
        ("arg_inf", float(cert.arg_inf)),
        ("arg_sup", float(cert.arg_sup)),
        ("tail_bound", float(cert.tail_bound)),
        ("witness_min", pattern_json(&cert.witness_min)),
        ("grid", grid_json(&chain_cert.grid)),
        ("certified", Json::Bool(cert.is_woven_certified)),
        ("chain", chain),
    ]);
    let curve = weave_envelope_curve(&gen, &params, cfg.grid)?
        .into_iter()
        .map(|(g, lo, hi)| vec![g, lo, hi])
        .collect::<Vec<_>>();
    let report = report_skeleton(
        "weave-certify",
        cfg,
        Json::obj([
            ("generator", echo_generator(cfg)),
            ("system", echo_system(params.dilation(), params.translation_step(), params.weaving_order())),
            ("grid", int(cfg.grid as i64)),
        ]),
        Json::obj([("containment_slack", float(CONTAINMENT_SLACK))]),
    );
    let summary = format!(
        "L = {:.6}, U = {:.6}{}",
        cert.l_weave,
        cert.u_weave,
        if cert.is_woven_certified { "" } else { " (not certified)" }
    );
    let certified = cert.is_woven_certified;
    let (report, certified) = finish(report, results, certified);
    Ok(Outcome {
        report,
        curve: Some(csv("gamma,min_sum,max_sum", &curve)),
        certified,
        summary,
    })
}

fn scan_results(
    scans: &[frameweave::weaving::ScannedPattern],
    l: f64,
    u: f64,
) -> (Json, usize) {
    let slack = CONTAINMENT_SLACK * u.max(1.0);
    let mut inside = 0usize;
    let rows: Vec<Json> = scans
        .iter()
        .map(|s| {
            let ok = s.bounds.a_num >= l - slack && s.bounds.b_num <= u + slack;
            inside += ok as usize;
            Json::obj([
                ("pattern", pattern_json(&s.pattern)),
                ("a_num", float(s.bounds.a_num)),
                ("b_num", float(s.bounds.b_num)),
                ("inside", Json::Bool(ok)),
            ])
        })
        .collect();
    (Json::Arr(rows), inside)
}

pub fn weave_sample(cfg: &RunConfig) -> Result<Outcome> {
    let gen = cfg.wavelet_generator()?;
    let params = cfg.system()?;
    let settings = cfg.sweep_settings();
    let cert = weave_certificate_with(&gen, &params, &settings)?;
    let window = (cfg.file.numeric.window_start, cfg.file.numeric.window_len);
    let scans = sample_patterns(&gen, &params, cfg.file.numeric.count, cfg.seed, window, &settings)?;
    let (rows, inside) = scan_results(&scans, cert.l_weave, cert.u_weave);
    let all_inside = inside == scans.len();
    let report = report_skeleton(
        "weave-sample",
        cfg,
        Json::obj([
            ("generator", echo_generator(cfg)),
            ("system", echo_system(params.dilation(), params.translation_step(), params.weaving_order())),
            ("window_start", int(window.0)),
            ("window_len", int(window.1 as i64)),
            ("count", int(cfg.file.numeric.count as i64)),
            ("grid", int(cfg.grid as i64)),
        ]),
        Json::obj([("containment_slack", float(CONTAINMENT_SLACK))]),
    );
    let results = Json::obj([
        ("l_weave", float(cert.l_weave)),
        ("u_weave", float(cert.u_weave)),
        ("patterns_scanned", int(scans.len() as i64)),
        ("patterns_inside", int(inside as i64)),
        ("all_inside", Json::Bool(all_inside)),
        ("patterns", rows),
    ]);
    let summary = format!(
        "{inside}/{} sampled patterns inside [L, U] = [{:.6}, {:.6}]",
        scans.len(),
        cert.l_weave,
        cert.u_weave
    );
    let certified = all_inside && cert.is_woven_certified;
    let (report, certified) = finish(report, results, certified);
    Ok(Outcome {
        report,
        curve: None,
        certified,
        summary,
    })
}

pub fn weave_enumerate(cfg: &RunConfig) -> Result<Outcome> {
    let gen = cfg.wavelet_generator()?;
    let params = cfg.system()?;
    let settings = cfg.sweep_settings();
    let cert = weave_certificate_with(&gen, &params, &settings)?;
    let window = (cfg.file.numeric.window_start, cfg.file.numeric.window_len);
    let scans = enumerate_patterns(&gen, &params, window, &settings)?;
    let slack = CONTAINMENT_SLACK * cert.u_weave.max(1.0);
    let inside = scans
        .iter()
        .filter(|s| {
            s.bounds.a_num >= cert.l_weave - slack && s.bounds.b_num <= cert.u_weave + slack
        })
        .count();
    let all_inside = inside == scans.len();
    let weakest = weakest_lower(&scans).expect("non-empty enumeration");
    let largest = largest_upper(&scans).expect("non-empty enumeration");
    let report = report_skeleton(
        "weave-enumerate",
        cfg,
        Json::obj([
            ("generator", echo_generator(cfg)),
            ("system", echo_system(params.dilation(), params.translation_step(), params.weaving_order())),
            ("window_start", int(window.0)),
            ("window_len", int(window.1 as i64)),
            ("grid", int(cfg.grid as i64)),
        ]),
        Json::obj([("containment_slack", float(CONTAINMENT_SLACK))]),
    );
    let results = Json::obj([
        ("l_weave", float(cert.l_weave)),
        ("u_weave", float(cert.u_weave)),
        ("patterns_scanned", int(scans.len() as i64)),
        ("patterns_inside", int(inside as i64)),
        ("all_inside", Json::Bool(all_inside)),
        (
            "weakest_lower",
            Json::obj([
                ("pattern", pattern_json(&scans[weakest].pattern)),
                ("a_num", float(scans[weakest].bounds.a_num)),
            ]),
        ),
        (
            "largest_upper",
            Json::obj([
                ("pattern", pattern_json(&scans[largest].pattern)),
                ("b_num", float(scans[largest].bounds.b_num)),
            ]),
        ),
    ]);
    let summary = format!(
        "{inside}/{} enumerated patterns inside; weakest A = {:.6}",
        scans.len(),
        scans[weakest].bounds.a_num
    );
    let certified = all_inside && cert.is_woven_certified;
    let (report, certified) = finish(report, results, certified);
    Ok(Outcome {
        report,
        curve: None,
        certified,
        summary,
    })
}

fn gate_json(gate: &frameweave::gabor::DensityGate) -> Json {
    Json::obj([
        ("admissible", Json::Bool(gate.admissible)),
        ("product_ab", float(gate.product_ab)),
        ("product_abn", float(gate.product_abn)),
        ("message", jstr(gate.message.clone())),
    ])
}

pub fn gabor_bounds(cfg: &RunConfig) -> Result<Outcome> {
    let gen = cfg.gabor_generator()?;
    let (a, b, n) = cfg.system_raw()?;
    let pattern = cfg.pattern()?;
    let system = GaborSystem::new(gen, a, b, n, pattern)?;
    let cert = gabor_frame_bounds_with(&system, &cfg.sweep_settings())?;
    let gate = density_gate(a, b, n)?;
    let curve = curve_rows(&cert.grid, cfg.grid, |x| Ok(time_multiplier(&system, x)?))?;
    let report = report_skeleton(
        "gabor-bounds",
        cfg,
        Json::obj([
            ("generator", echo_generator(cfg)),
            ("system", echo_system(a, b, n)),
            ("pattern", echo_pattern(cfg)),
            ("grid", int(cfg.grid as i64)),
        ]),
        Json::obj([("containment_slack", float(CONTAINMENT_SLACK))]),
    );
    let mut results = cert_json(&cert);
    results.push("density_gate", gate_json(&gate));
    let certified = cert.certified;
    let summary = format!(
        "A = {:.6}, B = {:.6}{}",
        cert.a_num,
        cert.b_num,
        if certified { "" } else { " (not certified)" }
    );
    let (report, certified) = finish(report, results, certified);
    Ok(Outcome {
        report,
        curve: Some(csv("x,m", &curve)),
        certified,
        summary,
    })
}

pub fn gabor_certify(cfg: &RunConfig) -> Result<Outcome> {
    let gen = cfg.gabor_generator()?;
    let (a, b, n) = cfg.system_raw()?;
    let gate = density_gate(a, b, n)?;
    let cover = verify_cover(&gen, a, n)?;
    let report = report_skeleton(
        "gabor-certify",
        cfg,
        Json::obj([
            ("generator", echo_generator(cfg)),
            ("system", echo_system(a, b, n)),
            ("grid", int(cfg.grid as i64)),
        ]),
        Json::obj([("containment_slack", float(CONTAINMENT_SLACK))]),
    );
    let cover_json = Json::obj([
        ("floor_eps", float(cover.floor_eps)),
        ("base_interval_hi", float(cover.base_interval_hi)),
        ("strong_interval_hi", float(cover.strong_interval_hi)),
        ("base_ok", Json::Bool(cover.base_ok)),
        ("strong_ok", Json::Bool(cover.strong_ok)),
    ]);
    if !gate.admissible {
        let results = Json::obj([
            ("density_gate", gate_json(&gate)),
            ("cover", cover_json),
            ("certified", Json::Bool(false)),
        ]);
        let summary = gate.message.clone();
        let (report, certified) = finish(report, results, false);
        return Ok(Outcome {
            report,
            curve: None,
            certified,
            summary,
        });
    }
    let cert = gabor_weave_certificate(&gen, a, b, n, cfg.grid)?;
    let curve = weave_gabor_curve(&gen, a, b, n, cfg.grid)?;
    let results = Json::obj([
        ("density_gate", gate_json(&gate)),
        ("cover", cover_json),
        ("l_weave", float(cert.l_weave)),
        ("u_weave", float(cert.u_weave)),
        ("arg_inf", float(cert.arg_inf)),
        ("arg_sup", float(cert.arg_sup)),
        ("witness_min", pattern_json(&cert.witness_min)),
        ("grid", grid_json(&cert.grid)),
        ("certified", Json::Bool(cert.is_woven_certified)),
    ]);
    let summary = format!("L = {:.6}, U = {:.6}", cert.l_weave, cert.u_weave);
    let certified = cert.is_woven_certified;
    let (report, certified) = finish(report, results, certified);
    Ok(Outcome {
        report,
        curve: Some(csv("x,min_sum,max_sum", &curve)),
        certified,
        summary,
    })
}

/// Pointwise min/max of the Gabor tile sum over the family choices, sampled
/// on one block period.
fn weave_gabor_curve(
    gen: &frameweave::generators::GaborGenerator,
    a: f64,
    b: f64,
    n: u32,
    points: usize,
) -> Result<Vec<Vec<f64>>> {
    let systems: Vec<GaborSystem> = (0..n)
        .map(|ell| GaborSystem::new(gen.clone(), a, b, n, WeavingPattern::constant(ell)))
        .collect::<std::result::Result<_, _>>()?;
    let block = n as f64 * a;
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let x = block * i as f64 / points as f64;
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for sys in &systems {
            let m = time_multiplier(sys, x)?;
            lo = lo.min(m);
            hi = hi.max(m);
        }
        rows.push(vec![x, lo, hi]);
    }
    Ok(rows)
}

pub fn density_gate_cmd(cfg: &RunConfig) -> Result<Outcome> {
    let (a, b, n) = cfg.system_raw()?;
    let gate = density_gate(a, b, n)?;
    let report = report_skeleton(
        "density-gate",
        cfg,
        Json::obj([("system", echo_system(a, b, n))]),
        Json::obj([]),
    );
    let summary = gate.message.clone();
    let admissible = gate.admissible;
    let (report, certified) = finish(report, gate_json(&gate), admissible);
    Ok(Outcome {
        report,
        curve: None,
        certified,
        summary,
    })
}

/// Signal grid wrapping the configured band with a small margin.
fn signal_grid(band: (f64, f64)) -> (f64, f64) {
    let width = band.1 - band.0;
    let lo = (band.0 - 0.05 * width).max(band.0 / 2.0);
    (lo, band.1 + 0.05 * width)
}

pub fn reconstruct(cfg: &RunConfig) -> Result<Outcome> {
    let gen = cfg.wavelet_generator()?;
    let params = cfg.system()?;
    let pattern = cfg.pattern()?;
    let band = cfg.signal_band()?;
    let (lo, hi) = signal_grid(band);
    let num = &cfg.file.numeric;
    let signals: Vec<_> = (0..num.count)
        .map(|i| {
            random_bandlimited_signal(
                lo,
                hi,
                num.signal_points,
                band,
                num.bumps,
                cfg.seed.wrapping_add(i as u64),
            )
        })
        .collect::<std::result::Result<_, _>>()?;
    let errors = roundtrip_batch(&gen, &params, &pattern, &signals)?;
    let max_error = errors.iter().cloned().fold(0.0, f64::max);
    let all_within = max_error <= ROUNDTRIP_TOL;
    let report = report_skeleton(
        "reconstruct",
        cfg,
        Json::obj([
            ("generator", echo_generator(cfg)),
            ("system", echo_system(params.dilation(), params.translation_step(), params.weaving_order())),
            ("pattern", echo_pattern(cfg)),
            ("signal_band", Json::Arr(vec![float(band.0), float(band.1)])),
            ("signal_points", int(num.signal_points as i64)),
            ("bumps", int(num.bumps as i64)),
            ("count", int(num.count as i64)),
        ]),
        Json::obj([("roundtrip_tol", float(ROUNDTRIP_TOL))]),
    );
    let results = Json::obj([
        ("signals", int(errors.len() as i64)),
        ("max_rel_error", float(max_error)),
        ("all_within_tol", Json::Bool(all_within)),
        (
            "rel_errors",
            Json::Arr(errors.iter().map(|&e| float(e)).collect()),
        ),
    ]);
    let summary = format!(
        "{} signals, max round-trip error {max_error:.3e}",
        errors.len()
    );
    let (report, certified) = finish(report, results, all_within);
    Ok(Outcome {
        report,
        curve: None,
        certified,
        summary,
    })
}

pub fn erasure(cfg: &RunConfig) -> Result<Outcome> {
    let gen = cfg.wavelet_generator()?;
    let params = cfg.system()?;
    let fallback = cfg.pattern()?;
    let band = cfg.signal_band()?;
    let (lo, hi) = signal_grid(band);
    let num = &cfg.file.numeric;
    let f = random_bandlimited_signal(lo, hi, num.signal_points, band, num.bumps, cfg.seed)?;
    let rep = erasure_experiment(&gen, &params, &f, &num.erased, &fallback)?;
    let weave = weave_certificate_with(&gen, &params, &cfg.sweep_settings())?;
    let slack = CONTAINMENT_SLACK * weave.u_weave.max(1.0);
    let inside = rep.certificate.a_num >= weave.l_weave - slack
        && rep.certificate.b_num <= weave.u_weave + slack;
    let ok = rep.rel_error <= ROUNDTRIP_TOL && rep.certificate.certified && inside;
    let report = report_skeleton(
        "erasure",
        cfg,
        Json::obj([
            ("generator", echo_generator(cfg)),
            ("system", echo_system(params.dilation(), params.translation_step(), params.weaving_order())),
            ("fallback", echo_pattern(cfg)),
            (
                "erased",
                Json::Arr(num.erased.iter().map(|&j| int(j)).collect()),
            ),
            ("signal_band", Json::Arr(vec![float(band.0), float(band.1)])),
        ]),
        Json::obj([
            ("roundtrip_tol", float(ROUNDTRIP_TOL)),
            ("containment_slack", float(CONTAINMENT_SLACK)),
        ]),
    );
    let results = Json::obj([
        ("mixed_pattern", pattern_json(&rep.pattern)),
        ("rel_error", float(rep.rel_error)),
        ("a_num", float(rep.certificate.a_num)),
        ("b_num", float(rep.certificate.b_num)),
        ("l_weave", float(weave.l_weave)),
        ("u_weave", float(weave.u_weave)),
        ("inside_weave", Json::Bool(inside)),
    ]);
    let summary = format!(
        "erased {} scales, round-trip error {:.3e}",
        num.erased.len(),
        rep.rel_error
    );
    let (report, certified) = finish(report, results, ok);
    Ok(Outcome {
        report,
        curve: None,
        certified,
        summary,
    })
}

pub fn fusion_demo(cfg: &RunConfig) -> Result<Outcome> {
    let packet = cfg.packet()?;
    let num = &cfg.file.numeric;
    let bounds = fusion_bounds(&packet, num.trials, cfg.seed)?;
    let report = report_skeleton(
        "fusion-demo",
        cfg,
        Json::obj([
            ("dim", int(packet.dim() as i64)),
            ("subspaces", int(packet.len() as i64)),
            (
                "weights",
                packet.weights().map_or(Json::Null, |w| {
                    Json::Arr(w.iter().map(|&x| float(x)).collect())
                }),
            ),
            ("count", int(num.count as i64)),
            ("trials", int(num.trials as i64)),
        ]),
        Json::obj([("residual_tol", float(ROUNDTRIP_TOL))]),
    );
    let method = match bounds.method {
        BoundsMethod::DenseEigen => jstr("dense-eigen"),
        BoundsMethod::RayleighSampling { trials } => Json::obj([
            ("kind", jstr("rayleigh-sampling")),
            ("trials", int(trials as i64)),
        ]),
    };
    if bounds.lower <= 1e-12 {
        let results = Json::obj([
            ("lower", float(bounds.lower)),
            ("upper", float(bounds.upper)),
            ("method", method),
            ("is_fusion_frame", Json::Bool(false)),
        ]);
        let summary = format!(
            "fusion bounds ({:.3e}, {:.3e}): not a fusion frame",
            bounds.lower, bounds.upper
        );
        let (report, certified) = finish(report, results, false);
        return Ok(Outcome {
            report,
            curve: None,
            certified,
            summary,
        });
    }
    let mut rng = SplitMix64::new(cfg.seed);
    let mut max_decompose = 0.0f64;
    let mut max_expand = 0.0f64;
    let mut max_membership = 0.0f64;
    for _ in 0..num.count {
        let f = DVector::from_fn(packet.dim(), |_, _| rng.standard_normal());
        let norm = f.norm().max(1e-300);
        let d = fusion_decompose(&packet, &f)?;
        max_decompose = max_decompose.max(d.residual_norm / norm);
        let e = expand_in_packet(&packet, &f)?;
        max_expand = max_expand.max(e.residual_norm / norm);
        for r in e.membership_residuals(&packet) {
            max_membership = max_membership.max(r / norm);
        }
    }
    let ok = max_decompose <= ROUNDTRIP_TOL && max_expand <= ROUNDTRIP_TOL;
    let results = Json::obj([
        ("lower", float(bounds.lower)),
        ("upper", float(bounds.upper)),
        ("method", method),
        ("is_fusion_frame", Json::Bool(true)),
        ("max_decompose_residual", float(max_decompose)),
        ("max_expand_residual", float(max_expand)),
        ("max_membership_residual", float(max_membership)),
    ]);
    let summary = format!(
        "fusion bounds ({:.6}, {:.6}), worst decompose residual {max_decompose:.3e}",
        bounds.lower, bounds.upper
    );
    let (report, certified) = finish(report, results, ok);
    Ok(Outcome {
        report,
        curve: None,
        certified,
        summary,
    })
}

pub fn counterexample(cfg: &RunConfig) -> Result<Outcome> {
    let num = &cfg.file.numeric;
    if num.m_values.is_empty() {
        bail!("numeric.m_values must list at least one dimension");
    }
    let mut rows = Vec::new();
    let mut ok = true;
    for &m in &num.m_values {
        let m_usize = usize::try_from(m)?;
        let (at_e1, at_ek, ratio) = counterexample_growth(m_usize)?;
        let packet = counterexample_packet(m_usize)?;
        let bounds = fusion_bounds(&packet, num.trials, cfg.seed)?;
        ok &= (ratio - m as f64).abs() <= 1e-9 * m as f64;
        rows.push(Json::obj([
            ("m", int(m as i64)),
            ("mass_at_e1", float(at_e1)),
            ("mass_at_ek", float(at_ek)),
            ("ratio", float(ratio)),
            ("lower", float(bounds.lower)),
            ("upper", float(bounds.upper)),
        ]));
    }
    let report = report_skeleton(
        "counterexample",
        cfg,
        Json::obj([(
            "m_values",
            Json::Arr(num.m_values.iter().map(|&m| int(m as i64)).collect()),
        )]),
        Json::obj([("ratio_tol", float(1e-9))]),
    );
    let results = Json::obj([
        ("rows", Json::Arr(rows)),
        ("ratio_equals_m", Json::Bool(ok)),
    ]);
    let summary = format!(
        "projection-mass ratio grows linearly over {} dimensions",
        num.m_values.len()
    );
    let (report, certified) = finish(report, results, ok);
    Ok(Outcome {
        report,
        curve: None,
        certified,
        summary,
    })
}
