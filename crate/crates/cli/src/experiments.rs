//! One function per subcommand. Each reads the resolved config, writes its
//! CSV files and returns the diagnostics for the sidecar.

use std::path::Path;

use serde_json::{json, Map, Value as Json};
use toa_core::fluxdeconv::{deconvolve, flux_xline, w_at_rest, Regularization};
use toa_core::oracle::{pi_from_norm, pi_from_population, run, GridSpec, GridState};
use toa_core::series::relative_l1;
use toa_core::toa::{emission_total, uniform_times};
use toa_core::{
    kinetic_detuning, pi_1d, pi_2d, solve_2d, GaussianPacket2D, PhysParams, QuadratureSpec,
    ToaSeries,
};

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::output::{read_toa_csv, Output, Table};

pub fn params(c: &Config) -> CliResult<PhysParams> {
    let n = |k| c.number("params", k);
    Ok(PhysParams::new(
        n("mass")?,
        n("rabi")?,
        n("gamma")?,
        n("laser_detuning")?,
        n("laser_wavenumber")?,
    )?)
}

pub fn packet(c: &Config, p: &PhysParams) -> CliResult<GaussianPacket2D> {
    let either = |a: &str, b: &str, convert: &dyn Fn(f64) -> CliResult<f64>| match (
        c.opt_number("packet", a),
        c.opt_number("packet", b),
    ) {
        (Some(v), None) => Ok(v),
        (None, Some(v)) => convert(v),
        _ => Err(CliError::config(format!("[packet] needs `{a}` or `{b}`"))),
    };
    let width = |sigma: f64| {
        if sigma > 0.0 {
            Ok(0.5 / sigma)
        } else {
            Err(CliError::config(format!(
                "momentum width must be positive, got {sigma:e}"
            )))
        }
    };
    let wavenumber = |v: f64| Ok(p.wavenumber_of(v));
    Ok(GaussianPacket2D::new(
        c.number("packet", "x0")?,
        c.opt_number("packet", "y0").unwrap_or(0.0),
        either("dx", "sigma_kx", &width)?,
        either("dy", "sigma_ky", &width)?,
        either("kx0", "vx0", &wavenumber)?,
        either("ky0", "vy0", &wavenumber)?,
    )?)
}

pub fn quadrature(c: &Config) -> CliResult<QuadratureSpec> {
    let t0 = c.number("quadrature", "t_start")?;
    let t1 = c.number("quadrature", "t_end")?;
    let n = c.count("quadrature", "n_times")?;
    if n < 2 || t1 <= t0 {
        return Err(CliError::config(
            "[quadrature] needs t_end > t_start and n_times >= 2",
        ));
    }
    let mut q = QuadratureSpec::new(
        c.count("quadrature", "n_kx")?,
        c.count("quadrature", "n_ky")?,
        uniform_times(t0, t1, n),
    );
    q.span_sigmas = c.number("quadrature", "span_sigmas")?;
    q.allow_truncation = c.flag("quadrature", "allow_truncation");
    Ok(q)
}

pub fn grid(c: &Config) -> CliResult<GridSpec> {
    let n = |k| c.number("grid", k);
    let count = |k| c.count("grid", k);
    let dt = n("dt")?;
    let n_steps = match (
        c.opt_count("grid", "n_steps"),
        c.opt_number("grid", "t_end"),
    ) {
        (Some(steps), _) => steps,
        (None, Some(t)) if dt > 0.0 => (t / dt).round() as usize,
        _ => {
            return Err(CliError::config(
                "[grid] needs `n_steps` or `t_end` and `dt`",
            ))
        }
    };
    let spec = GridSpec {
        x_min: n("x_min")?,
        x_max: n("x_max")?,
        y_min: n("y_min")?,
        y_max: n("y_max")?,
        n_x: count("n_x")?,
        n_y: count("n_y")?,
        dt,
        n_steps,
    };
    spec.validate()?;
    if spec.n_steps < 2 {
        return Err(CliError::config("[grid] needs at least two steps"));
    }
    Ok(spec)
}

fn series_diagnostics(s: &ToaSeries) -> Json {
    let mut d: Map<String, Json> = s
        .metadata
        .diagnostics
        .iter()
        .map(|(k, v)| (k.clone(), json!(v)))
        .collect();
    let (t_peak, peak) = s.peak();
    let e = emission_total(s);
    d.insert("peak_time".into(), json!(t_peak));
    d.insert("peak_value".into(), json!(peak));
    d.insert("total".into(), json!(e.total));
    d.insert("tail".into(), json!(e.tail));
    Json::Object(d)
}

/// |R1|² and |R2|² against the transverse velocity at the packet's k_x0.
pub fn eigen(c: &Config, out: &mut Output) -> CliResult<Json> {
    let p = params(c)?;
    let g = packet(c, &p)?;
    let vy: Vec<f64> = match c.list("scan", "vy") {
        Some(v) => v.to_vec(),
        None => {
            let n = c.count("scan", "n_vy")?;
            if n < 1 {
                return Err(CliError::config("[scan] n_vy must be at least 1"));
            }
            uniform_times(c.number("scan", "vy_min")?, c.number("scan", "vy_max")?, n)
        }
    };
    let sols = vy
        .iter()
        .map(|&v| solve_2d(&p, g.kx0, p.wavenumber_of(v)))
        .collect::<Result<Vec<_>, _>>()?;
    let col = |f: &dyn Fn(&toa_core::EigenSolution2D) -> f64| sols.iter().map(f).collect();
    let r1: Vec<f64> = col(&|s| s.r1.norm_sqr());
    let table = Table::new()
        .column("vy", vy.clone())
        .column("ky", col(&|s| s.ky))
        .column("delta_eff", col(&|s| s.delta_eff))
        .column("r1_abs2", r1.clone())
        .column("r2_abs2", col(&|s| s.r2.norm_sqr()))
        .column("r1_re", col(&|s| s.r1.re))
        .column("r1_im", col(&|s| s.r1.im))
        .column("r2_re", col(&|s| s.r2.re))
        .column("r2_im", col(&|s| s.r2.im));
    out.csv("eigen", &table)?;
    Ok(json!({
        "kx0": g.kx0,
        "points": vy.len(),
        "max_r1_abs2": r1.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        "min_r1_abs2": r1.iter().cloned().fold(f64::INFINITY, f64::min),
    }))
}

pub fn toa(c: &Config, out: &mut Output) -> CliResult<Json> {
    let p = params(c)?;
    let g = packet(c, &p)?;
    let q = quadrature(c)?;
    let s = match c.text("run", "model").unwrap_or("2d") {
        "2d" => pi_2d(&p, &g, &q)?,
        "1d" => pi_1d(&p, &g.x_marginal(), &q)?,
        other => {
            return Err(CliError::config(format!(
                "[run] model must be 2d or 1d, got `{other}`"
            )))
        }
    };
    out.csv("toa", &Table::toa(&s))?;
    Ok(series_diagnostics(&s))
}

/// Grid propagation of the packet; Π from the norm loss, with γ times the
/// excited population as an independent estimate.
pub fn oracle(c: &Config, out: &mut Output) -> CliResult<Json> {
    let p = params(c)?;
    let g = packet(c, &p)?;
    if !c.has("grid", "dt") {
        return Err(CliError::config(
            "oracle needs a [grid] section; --preset desk provides one",
        ));
    }
    let spec = grid(c)?;
    spec.check_resolution(&p, &g)?;
    let monitor = c.opt_count("grid", "monitor_every").unwrap_or(100);
    let stride = c.opt_count("grid", "output_every").unwrap_or(1).max(1);
    let init = GridState::from_packet(&g, &spec, p.hbar_over_mass());
    let initial_norm = init.norm_sqr(&spec);
    let result = run(&p, &spec, init, monitor)?;
    let from_norm = pi_from_norm(&result.trace);
    let from_population = pi_from_population(&result.trace, p.gamma);
    let pick = |v: &[f64]| -> Vec<f64> { v.iter().step_by(stride).copied().collect() };
    let norms: Vec<f64> = result.trace[1..result.trace.len() - 1]
        .iter()
        .map(|s| s.norm_sqr)
        .collect();
    let table = Table::new()
        .column("t", pick(&from_norm.times))
        .column("pi_raw", pick(&from_norm.pi_values))
        .column("pi_clipped", pick(&from_norm.clipped()))
        .column("cumulative", pick(&from_norm.cumulative))
        .column("norm", pick(&norms))
        .column("pi_population", pick(&from_population.pi_values));
    out.csv("oracle", &table)?;
    let peak = from_norm.peak().1;
    let gap = from_norm
        .pi_values
        .iter()
        .zip(&from_population.pi_values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mut d = series_diagnostics(&from_norm);
    let m = d.as_object_mut().expect("object");
    m.insert("initial_norm".into(), json!(initial_norm));
    m.insert(
        "final_norm".into(),
        json!(result.final_state.norm_sqr(&spec)),
    );
    m.insert(
        "max_boundary_ratio".into(),
        json!(result.max_boundary_ratio),
    );
    m.insert("norm_vs_population_over_peak".into(), json!(gap / peak));
    Ok(d)
}

/// Π_id from Π by Wiener deconvolution of the at-rest distribution W, next to
/// the free x-flux through the edge.
pub fn deconv(c: &Config, out: &mut Output) -> CliResult<Json> {
    let p = params(c)?;
    let g = packet(c, &p)?;
    let reg = Regularization {
        epsilon: c.number("deconv", "epsilon")?,
    };
    if reg.epsilon.is_nan() || reg.epsilon <= 0.0 {
        return Err(CliError::config(format!(
            "[deconv] epsilon must be positive, got {:e}",
            reg.epsilon
        )));
    }
    let input = c.text("deconv", "input").unwrap_or("");
    let pi = if input.is_empty() {
        pi_2d(&p, &g, &quadrature(c)?)?
    } else {
        let (t, v) = read_toa_csv(Path::new(input))?;
        if t.len() < 2 {
            return Err(CliError::config(format!("{input}: need at least two rows")));
        }
        ToaSeries::new(t, v, "input")
    };
    let n = pi.len();
    let dt = pi
        .uniform_step()
        .ok_or_else(|| CliError::config("deconvolution needs uniformly spaced times"))?;
    let w = w_at_rest(
        p.rabi,
        p.gamma,
        p.laser_detuning,
        &uniform_times(0.0, dt * (n - 1) as f64, n),
    );
    let ideal = deconvolve(&pi, &w, reg)?;
    let flux = flux_xline(&g, p.hbar_over_mass(), &pi.times);
    let table = Table::new()
        .column("t", pi.times.clone())
        .column("pi", pi.pi_values.clone())
        .column("pi_ideal", ideal.pi_values.clone())
        .column("w", w.values.clone())
        .column("flux", flux.jbar_x.clone());
    out.csv("deconv", &table)?;
    Ok(json!({
        "epsilon": reg.epsilon,
        "pi_total": pi.total(),
        "pi_ideal_total": ideal.total(),
        "l1_ideal_to_flux": relative_l1(&pi.times, &ideal.pi_values, &flux.jbar_x),
    }))
}

struct Member {
    dy: f64,
    vy: f64,
    compensated: bool,
    params: PhysParams,
    packet: GaussianPacket2D,
}

/// The 1D model against a family of 2D runs varying Δy or v_y.
pub fn compare(c: &Config, out: &mut Output) -> CliResult<Json> {
    let p = params(c)?;
    let g = packet(c, &p)?;
    let q = quadrature(c)?;
    let mut members = Vec::new();
    if let Some(dys) = c.list("family", "dy") {
        for &dy in dys {
            members.push(Member {
                dy,
                vy: p.velocity_of(g.ky0),
                compensated: false,
                params: p,
                packet: GaussianPacket2D { dy, ..g },
            });
        }
    } else if let Some(vys) = c.list("family", "vy") {
        for &vy in vys {
            let packet = GaussianPacket2D {
                ky0: p.wavenumber_of(vy),
                ..g
            };
            members.push(Member {
                dy: g.dy,
                vy,
                compensated: false,
                params: p,
                packet,
            });
            if c.flag("family", "compensate") {
                let shift = kinetic_detuning(&p, packet.ky0).total;
                members.push(Member {
                    dy: g.dy,
                    vy,
                    compensated: true,
                    params: p.with_laser_detuning(p.laser_detuning + shift),
                    packet,
                });
            }
        }
    } else {
        return Err(CliError::config("compare needs [family] dy or vy"));
    }

    let line = pi_1d(&p, &g.x_marginal(), &q)?;
    out.csv("compare_1d", &Table::toa(&line))?;
    let line_peak = line.peak().1;
    let mut rows: Vec<[f64; 7]> = Vec::new();
    let mut curves = Vec::new();
    for (i, m) in members.iter().enumerate() {
        let s = pi_2d(&m.params, &m.packet, &q)?;
        let name = format!("compare_m{i}{}", if m.compensated { "_comp" } else { "" });
        out.csv(&name, &Table::toa(&s))?;
        let (t_peak, peak) = s.peak();
        rows.push([
            m.dy,
            m.vy,
            m.params.laser_detuning,
            t_peak,
            peak / line_peak,
            s.relative_l1(&line)?,
            s.total(),
        ]);
        curves
            .push(json!({ "file": format!("{name}.csv"), "diagnostics": series_diagnostics(&s) }));
    }
    let col = |j: usize| rows.iter().map(|r| r[j]).collect::<Vec<f64>>();
    let summary = Table::new()
        .index_column("member", (0..members.len()).collect())
        .column("dy", col(0))
        .column("vy", col(1))
        .index_column(
            "compensated",
            members.iter().map(|m| m.compensated as usize).collect(),
        )
        .column("laser_detuning", col(2))
        .column("peak_time", col(3))
        .column("peak_ratio", col(4))
        .column("l1_to_1d", col(5))
        .column("total", col(6));
    out.csv("compare_summary", &summary)?;
    Ok(json!({ "line": series_diagnostics(&line), "members": curves }))
}
