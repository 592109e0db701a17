//! The subcommands: each parses its config block, runs the library and emits files.

use std::path::Path;

use anyhow::Context;
use serde_json::{json, Value};

use super::config::{self, config_error, resolve_dimension};
use super::output::{fmt_num, padded_range, read_text, Axis, Csv, Emitter, Svg};
use crate::curvature::{conformal_factor, heat_kernel_bound, sectional};
use crate::eigenforms::{check_decay, sweep_rows, SweepRow, DECAY_SLACK};
use crate::quadrature::QuadratureOptions;
use crate::radialop::{mu_for, OperatorContext};
use crate::regions::{
    assemble_spectrum, canonical_degree, curve_point, essential_bottom, region_params, SpectralParams,
};
use crate::volume::{
    check_bounds, default_step, default_window, growth_rate, snapped_step, solve_sturm, volume_ratio, PiecewiseQ,
    DEFAULT_BOUND_TOL, FIT_TOLERANCE,
};
use crate::warping::{class_b_report_sampled, hartman_check, ode_residual};
use crate::{Complex64, LabError};

/// What every subcommand receives.
pub struct Invocation<'a> {
    pub config_text: &'a str,
    pub config_dir: &'a Path,
    pub emitter: &'a mut Emitter,
}

fn echo(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or(Value::Null)
}

fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or_else(|| Value::String(fmt_num(v)), Value::Number)
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    }
}

fn cplx(z: Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

pub fn region(inv: Invocation) -> anyhow::Result<()> {
    let cfg: config::RegionConfig = config::parse(inv.config_text)?;
    let (n, a0) = resolve_dimension(cfg.mode, cfg.n, cfg.big_n, cfg.a0)?;
    if cfg.samples < 2 || !(cfg.s_range.1 > cfg.s_range.0) {
        return Err(config_error("region needs samples >= 2 and an increasing s_range"));
    }
    let k = if cfg.canonicalize { canonical_degree(cfg.k, n) } else { cfg.k };
    let params = SpectralParams::new(n, k, cfg.p.value(), a0)?;
    let region = region_params(&params)?;

    let s_values = linspace(cfg.s_range.0, cfg.s_range.1, cfg.samples);
    let curve: Vec<(f64, Complex64)> = s_values.iter().map(|&s| (s, curve_point(&params, s))).collect();
    let mut csv = Csv::new(&["s", "re", "im"]);
    for (s, z) in &curve {
        csv.push_nums(&[*s, z.re, z.im]);
    }
    inv.emitter.csv("region_boundary.csv", &csv)?;

    let pts: Vec<(f64, f64)> = curve.iter().map(|(_, z)| (z.re, z.im)).collect();
    let xs = pts.iter().map(|p| p.0).chain(cfg.eigenvalues.iter().copied()).chain([region.real_minimum()]);
    let ys = pts.iter().map(|p| p.1).chain([0.0]);
    let mut svg = Svg::new(
        &format!("spectral region n={n} k={k} p={} a0={a0}", fmt_num(params.p)),
        padded_range(xs),
        padded_range(ys),
        Axis::Linear,
        Axis::Linear,
    );
    // the region is the part of the plane to the right of the curve; close the
    // polygon at the largest real part reached by the sampled curve
    let far = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let mut poly = pts.clone();
    if let (Some(first), Some(last)) = (pts.first(), pts.last()) {
        poly.push((far, last.1));
        poly.push((far, first.1));
    }
    if region.im_half_width > 0.0 {
        svg.polygon(&poly, "steelblue");
    }
    svg.polyline(&pts, "navy");
    svg.marker(region.vertex, 0.0, "black", Some("vertex"));
    for e in &cfg.eigenvalues {
        svg.marker(*e, 0.0, "crimson", Some(&fmt_num(*e)));
    }
    inv.emitter.svg("region.svg", &svg)?;

    let (bottom, bottom_uncertain) = essential_bottom(k, n, a0, false);
    inv.emitter.manifest(
        "region",
        inv.config_text,
        json!({
            "config": echo(inv.config_text),
            "parameters": {
                "n": n, "k": k, "k_requested": cfg.k, "p": num(params.p), "a0": num(a0),
                "canonicalized": k != cfg.k,
                "s_range": [num(cfg.s_range.0), num(cfg.s_range.1)], "samples": cfg.samples,
            },
            "results": {
                "vertex": num(region.vertex),
                "im_half_width": num(region.im_half_width),
                "real_minimum": num(region.real_minimum()),
                "essential_bottom": num(bottom),
                "essential_bottom_volume_dependent": bottom_uncertain,
                "eigenvalues": cfg.eigenvalues.iter().map(|e| num(*e)).collect::<Vec<_>>(),
            },
        }),
    )
}

fn quadrature_json() -> Value {
    let q = QuadratureOptions::default();
    json!({ "rel_tol": num(q.rel_tol), "abs_floor": num(q.abs_floor), "max_depth": q.max_depth, "max_evals": q.max_evals })
}

pub fn residual(inv: Invocation) -> anyhow::Result<()> {
    let cfg: config::ResidualConfig = config::parse(inv.config_text)?;
    let n = cfg.dimension()?;
    let f = cfg.warping.build()?;
    let ctx = OperatorContext::new(n, cfg.k, cfg.lambda0, f.a0())?;
    let ang = cfg.angular();
    let s_values = cfg.s_values();

    let mut per_s: Vec<(f64, Vec<SweepRow>, Option<LabError>)> = Vec::new();
    for &s in &s_values {
        let rows = sweep_rows(&f, cfg.p, &ctx, &ang, cfg.mode, &cfg.schedule, s)?;
        let verdict = check_decay(&rows).err();
        per_s.push((s, rows, verdict));
    }

    let mut csv = Csv::new(&[
        "A", "B", "s", "I", "II", "III", "IV", "V", "A1", "A2", "A3", "direct_residual", "norm", "ratio",
        "direct_ratio",
    ]);
    for (_, rows, _) in &per_s {
        for row in rows {
            let b = &row.breakdown;
            let mut cells = vec![fmt_num(row.a), fmt_num(row.b), fmt_num(row.s)];
            cells.extend(b.terms.as_array().iter().map(|(_, v)| v.map_or_else(String::new, fmt_num)));
            cells.extend([b.direct_residual, b.omega_norm_p, b.ratio, b.direct_ratio].map(fmt_num));
            csv.push(cells);
        }
    }
    inv.emitter.csv("residual_sweep.csv", &csv)?;

    let all_rows = per_s.iter().flat_map(|(_, r, _)| r.iter());
    let widths = all_rows.clone().map(|r| r.b - r.a);
    let ratios = all_rows.flat_map(|r| [r.ratio(), r.breakdown.direct_ratio]).filter(|v| *v > 0.0);
    let mut svg = Svg::new(
        "residual ratio vs B - A",
        padded_range(widths),
        padded_range(ratios),
        Axis::Log,
        Axis::Log,
    );
    const COLORS: [&str; 6] = ["navy", "crimson", "darkgreen", "darkorange", "purple", "teal"];
    for (i, (s, rows, _)) in per_s.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.b - r.a, r.ratio())).collect();
        svg.polyline(&pts, color);
        for (j, p) in pts.iter().enumerate() {
            let label = (j + 1 == pts.len()).then(|| format!("s={}", fmt_num(*s)));
            svg.marker(p.0, p.1, color, label.as_deref());
        }
        let direct: Vec<(f64, f64)> = rows.iter().map(|r| (r.b - r.a, r.breakdown.direct_ratio)).collect();
        svg.polyline(&direct, "gray");
    }
    inv.emitter.svg("decay.svg", &svg)?;

    let sweeps: Vec<Value> = per_s
        .iter()
        .map(|(s, rows, verdict)| {
            let mu = mu_for(cfg.p, cfg.k, n, *s);
            json!({
                "s": num(*s),
                "mu": cplx(mu),
                "lambda": rows.first().map(|r| cplx(r.breakdown.lambda)),
                "ratios": rows.iter().map(|r| num(r.ratio())).collect::<Vec<_>>(),
                "direct_ratios": rows.iter().map(|r| num(r.breakdown.direct_ratio)).collect::<Vec<_>>(),
                "decaying": verdict.is_none(),
            })
        })
        .collect();
    inv.emitter.manifest(
        "residual",
        inv.config_text,
        json!({
            "config": echo(inv.config_text),
            "parameters": {
                "n": n, "k": cfg.k, "p": num(cfg.p), "a0": num(f.a0()), "lambda0": num(cfg.lambda0),
                "mode": cfg.mode, "eta_norm_const": num(cfg.eta_norm_const),
                "schedule": cfg.schedule.iter().map(|(a, b)| [num(*a), num(*b)]).collect::<Vec<_>>(),
                "s": s_values.iter().map(|s| num(*s)).collect::<Vec<_>>(),
                "quadrature": quadrature_json(),
                "decay_slack": num(DECAY_SLACK),
            },
            "results": { "sweeps": sweeps },
        }),
    )?;
    if let Some(err) = per_s.into_iter().find_map(|(_, _, v)| v) {
        return Err(err.into());
    }
    Ok(())
}

pub fn volume(inv: Invocation) -> anyhow::Result<()> {
    let cfg: config::VolumeConfig = config::parse(inv.config_text)?;
    let outer = (cfg.a0 + cfg.eps).sqrt();
    let q = PiecewiseQ::new(cfg.a0, cfg.eps, cfg.k.unwrap_or(outer), cfg.s, cfg.t.unwrap_or(cfg.s))?;
    let step = match cfg.step {
        Some(h) => snapped_step(&q, h)?,
        None => default_step(&q, cfg.r_max)?,
    };
    if cfg.csv_rows < 2 {
        return Err(config_error("csv_rows must be at least 2"));
    }
    let sol = solve_sturm(q, cfg.r_max, step)?;
    let window = cfg.window.unwrap_or_else(|| default_window(&sol));
    let growth = growth_rate(&sol, cfg.n, window)?;
    let bounds = check_bounds(&sol, &q);
    let ratios: Vec<Value> = cfg
        .ratio_radii
        .iter()
        .map(|&r| Ok(json!({ "r": num(r), "ratio": num(volume_ratio(&sol, cfg.n, r)?) })))
        .collect::<crate::Result<_>>()?;

    let cum = sol.cumulative_integral(cfg.n);
    let stride = (sol.r.len() - 1).div_ceil(cfg.csv_rows - 1).max(1);
    let mut csv = Csv::new(&["r", "u", "log_volume_integral"]);
    let last = sol.r.len() - 1;
    for i in (0..=last).step_by(stride).chain((last % stride != 0).then_some(last)) {
        csv.push_nums(&[sol.r[i], sol.u[i], cum[i].ln()]);
    }
    inv.emitter.csv("volume.csv", &csv)?;

    inv.emitter.manifest(
        "volume",
        inv.config_text,
        json!({
            "config": echo(inv.config_text),
            "parameters": {
                "q": q, "n": cfg.n, "r_max": num(cfg.r_max), "step": num(step),
                "window": [num(window.0), num(window.1)], "csv_stride": stride,
                "bound_tol": num(DEFAULT_BOUND_TOL), "fit_tolerance": num(FIT_TOLERANCE),
            },
            "results": {
                "gamma_hat": num(growth.gamma_hat),
                "gamma_model": num((cfg.n as f64 - 1.0) * outer),
                "fit_residual": num(growth.fit_residual),
                "bounds": bounds,
                "volume_ratios": ratios,
            },
        }),
    )
}

pub fn curvature(inv: Invocation) -> anyhow::Result<()> {
    let cfg: config::CurvatureConfig = config::parse(inv.config_text)?;
    let f = cfg.warping.build()?;
    if cfg.samples < 2 || !(cfg.r_range.1 > cfg.r_range.0) {
        return Err(config_error("curvature needs samples >= 2 and an increasing r_range"));
    }
    let mut csv = Csv::new(&["r", "sec_radial", "sph_lo", "sph_hi", "ricci_lower"]);
    let mut lowest = f64::INFINITY;
    let mut highest = f64::NEG_INFINITY;
    for r in linspace(cfg.r_range.0, cfg.r_range.1, cfg.samples) {
        let rep = sectional(&f, r, cfg.sec_n, cfg.n)?;
        let (lo, hi) = rep.bracket();
        lowest = lowest.min(lo);
        highest = highest.max(hi);
        csv.push_nums(&[r, rep.sec_radial, rep.sec_spherical_range.0, rep.sec_spherical_range.1, rep.ricci_lower]);
    }
    inv.emitter.csv("curvature.csv", &csv)?;

    let conformal: Vec<Value> = cfg
        .conformal_x
        .iter()
        .map(|&x| Ok(json!({ "x": num(x), "factor": num(conformal_factor(&f, f.a0(), x)?) })))
        .collect::<crate::Result<_>>()?;
    let heat = cfg
        .heat_kernel
        .map(|h| -> crate::Result<Value> {
            Ok(json!({ "K2": num(h.k2), "t": num(h.t), "scalar": num(h.scalar),
                       "bound": num(heat_kernel_bound(h.k2, h.t, h.scalar)?) }))
        })
        .transpose()?;
    inv.emitter.manifest(
        "curvature",
        inv.config_text,
        json!({
            "config": echo(inv.config_text),
            "parameters": {
                "family": format!("{:?}", f.family()), "a0": num(f.a0()), "n": cfg.n,
                "sec_n": [num(cfg.sec_n.0), num(cfg.sec_n.1)],
                "r_range": [num(cfg.r_range.0), num(cfg.r_range.1)], "samples": cfg.samples,
            },
            "results": {
                "sectional_range": [num(lowest), num(highest)],
                "conformal": conformal,
                "heat_kernel": heat,
            },
        }),
    )
}

pub fn classb(inv: Invocation) -> anyhow::Result<()> {
    let cfg: config::ClassBConfig = config::parse(inv.config_text)?;
    let f = cfg.warping.build()?;
    let report = class_b_report_sampled(&f, cfg.tail_window, cfg.tol, cfg.growth_floor, cfg.samples)?;

    let mut csv = Csv::new(&["r", "ln_f", "dev_first", "dev_second", "sec_radial"]);
    for r in linspace(cfg.tail_window.0, cfg.tail_window.1, report.samples) {
        let d = f.log_derivatives(r)?;
        csv.push_nums(&[r, d.ln_f, d.dev1, d.dev2, -d.d2]);
    }
    inv.emitter.csv("classb.csv", &csv)?;

    let hartman = match &cfg.hartman {
        Some(h) => {
            let q = h.q;
            let rep = hartman_check(|t| q.eval(t), h.lambda, h.t0, &h.grid)?;
            let mut csv = Csv::new(&["t", "q", "q_lambda", "scaled", "ratio_bound"]);
            for ((&t, &ql), &sc) in rep.t.iter().zip(&rep.q_values).zip(&rep.scaled_values) {
                let qt = q.eval(t);
                csv.push_nums(&[t, qt, ql, sc, qt.abs() / (2.0 * h.lambda)]);
            }
            inv.emitter.csv("hartman.csv", &csv)?;
            Some(json!({
                "lambda": num(rep.lambda), "T0": num(h.t0), "grid": h.grid,
                "ratio_bound_ok": rep.ratio_bound_ok, "integrability_ok": rep.integrability_ok,
                "square_integrability_ok": rep.square_integrability_ok, "decay_ok": rep.decay_ok,
                "all_ok": rep.all_ok(), "tail_power": rep.tail_power.map(num),
            }))
        }
        None => None,
    };
    inv.emitter.manifest(
        "classb",
        inv.config_text,
        json!({
            "config": echo(inv.config_text),
            "parameters": {
                "family": format!("{:?}", f.family()), "a0": num(f.a0()),
                "tail_window": [num(cfg.tail_window.0), num(cfg.tail_window.1)],
                "tol": num(cfg.tol), "growth_floor": num(cfg.growth_floor), "samples": report.samples,
            },
            "results": {
                "verdict": report.verdict,
                "sup_dev_second": num(report.sup_dev_second),
                "sup_dev_first": num(report.sup_dev_first),
                "min_tail_log": num(report.min_tail_log),
                "ode_residual": ode_residual(&f).map(num),
                "hartman": hartman,
            },
        }),
    )
}

fn read_queries(path: &Path) -> anyhow::Result<Vec<(f64, f64)>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = match fields.as_slice() {
            [re, im] => re.parse::<f64>().ok().zip(im.parse::<f64>().ok()),
            [re] => re.parse::<f64>().ok().map(|re| (re, 0.0)),
            _ => None,
        };
        match parsed {
            Some(q) => out.push(q),
            None if line_no == 0 => {} // header
            None => {
                return Err(config_error(format!("{}:{}: expected `re,im`", path.display(), line_no + 1)))
            }
        }
    }
    Ok(out)
}

pub fn spectrum(inv: Invocation) -> anyhow::Result<()> {
    let cfg: config::SpectrumConfig = config::parse(inv.config_text)?;
    let n = cfg.big_n + 1;
    let k = if cfg.canonicalize { canonical_degree(cfg.k, n) } else { cfg.k };
    let params = SpectralParams::hyperbolic_quotient(cfg.big_n, k, cfg.p.value())?;
    let model = assemble_spectrum(&params, &cfg.eigenvalues)?;

    let mut queries = cfg.queries.clone();
    if let Some(file) = &cfg.query_file {
        let path = inv.config_dir.join(file);
        queries.extend(read_queries(&path).with_context(|| format!("reading query file {}", path.display()))?);
    }

    let mut csv = Csv::new(&["re", "im", "distance", "in_region", "isolated", "member"]);
    let mut members = 0usize;
    for &(re, im) in &queries {
        let z = Complex64::new(re, im);
        let dist = model.region.distance(z);
        let in_region = model.region.contains(z, cfg.tol);
        let isolated = model.isolated_eigenvalues.iter().any(|&e| (z - e).norm() <= cfg.tol);
        let member = model.contains(z, cfg.tol);
        members += member as usize;
        csv.push(vec![
            fmt_num(re),
            fmt_num(im),
            fmt_num(dist),
            in_region.to_string(),
            isolated.to_string(),
            member.to_string(),
        ]);
    }
    inv.emitter.csv("spectrum_membership.csv", &csv)?;

    inv.emitter.manifest(
        "spectrum",
        inv.config_text,
        json!({
            "config": echo(inv.config_text),
            "parameters": {
                "N": cfg.big_n, "n": n, "k": k, "k_requested": cfg.k, "p": num(params.p),
                "tol": num(cfg.tol), "queries": queries.len(),
            },
            "results": {
                "vertex": num(model.region.vertex),
                "im_half_width": num(model.region.im_half_width),
                "isolated_eigenvalues": model.isolated_eigenvalues.iter().map(|e| num(*e)).collect::<Vec<_>>(),
                "members": members,
            },
        }),
    )
}
