use std::path::Path;

use anyhow::{ensure, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use suris_core::action_angle::build_chart;
use suris_core::basis::InnerProductContext;
use suris_core::dynamics::{iterate, PhasePoint};
use suris_core::geometry::{curve_for_rotation_number_with, rotation_number_on_curve, CurveSolveOptions};
use suris_core::lab::{
    beta_consistency, project_to_suris, verify_action_coefficient_bound, verify_action_constancy,
    verify_beta_convexity, verify_deviation_laws, verify_obstruction, verify_orthogonality,
    verify_projection_contraction, verify_tail_bound, EstimateReport,
};
use suris_core::orbits::{action, action_spectrum_sample, minimize_action_with, SolveOptions};
use suris_core::potentials::{Potential, PotentialDoc, TrigPerturbation};
use suris_core::{Potential64, SurisParams64};

use crate::output::{check_target, emit, Csv};
use crate::{Cli, Command, Experiment, Format, RigidityArgs};

pub enum Status {
    Ok,
    ThresholdFailed,
}

const BASE_DIRECTION: [f64; 4] = [1.0, -0.7, 0.5, 0.3];
const INCREMENT_DIRECTION: [f64; 4] = [0.3, 0.8, -0.2, 0.5];

fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::PhasePortrait { .. } => "phase-portrait",
        Command::Orbit { .. } => "orbit",
        Command::Curve { .. } => "curve",
        Command::Chart { .. } => "chart",
        Command::Coeffs { .. } => "coeffs",
        Command::Beta { .. } => "beta",
        Command::Spectrum { .. } => "spectrum",
        Command::Rigidity(_) => "rigidity",
        Command::Project { .. } => "project",
    }
}

fn schema(cmd: &Command) -> &'static str {
    match cmd {
        Command::PhasePortrait { .. } => "csv: x_mod1,y,orbit_id\njson: result.orbits[i] = [[x_mod1, y], ...]\n",
        Command::Orbit { .. } => "csv: i,x  (lifted x_i, i = 0..q-1)\njson: result = {p, q, pin, points, action, residual, local_minimum}\n",
        Command::Curve { .. } => "csv: '# {header}' line, then x,psi\njson: result = {header, points: [[x, psi], ...]}\nheader: eta, sigma, k, rho_target, rho_measured, invariance_residual, level_residual\n",
        Command::Chart { .. } => "csv: '# {header}' line, then x,theta,theta_prime\njson: result = {header, points: [[x, theta, theta_prime], ...]}\nheader: rho, eta, conjugacy_defect, inverse_defect, normalization_defect\n",
        Command::Coeffs { .. } => "csv: q,re,im,abs  (<W, f_q> for -qmax <= q <= qmax)\njson: result = [{q, re, im, abs}, ...]\n",
        Command::Beta { .. } => "csv: p,q,beta\njson: result = {p, q, beta}\n",
        Command::Spectrum { .. } => "csv: p,q,rho,action,error\njson: result = [{p, q, action, error}, ...]\n",
        Command::Rigidity(_) => "json: result = {experiment, sweep_variable, sweep, measured, fits, tolerances, parameters, passed, notes}\n",
        Command::Project { .. } => "json: result = {params_out, residual_norms, steps: [{params, increment, residual_norm, halvings}]}\n",
    }
}

fn default_format(cmd: &Command) -> Format {
    match cmd {
        Command::Orbit { .. } | Command::Rigidity(_) | Command::Project { .. } => Format::Json,
        _ => Format::Csv,
    }
}

fn load_doc(path: &Path) -> Result<PotentialDoc<f64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    PotentialDoc::from_json(&text).with_context(|| format!("invalid potential document {}", path.display()))
}

struct Inputs {
    potential: Potential64,
    suris: Option<SurisParams64>,
}

fn inputs(cli: &Cli) -> Result<Inputs> {
    match &cli.global.potential {
        None => Ok(Inputs { potential: Potential::zero(), suris: None }),
        Some(p) => {
            let doc = load_doc(p)?;
            Ok(Inputs { potential: doc.to_potential()?, suris: doc.suris_params()? })
        }
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.with_context(|| format!("missing required flag --{flag}"))
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn envelope(cli: &Cli, result: Value) -> Result<String> {
    let doc = json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "command": name(&cli.command),
        "config": serde_json::to_value(cli)?,
        "result": result,
    });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

pub fn run(cli: &Cli) -> Result<Status> {
    let g = &cli.global;
    if g.schema {
        print!("{}", schema(&cli.command));
        return Ok(Status::Ok);
    }
    ensure!(g.tol > 0.0 && g.tol.is_finite(), "--tol must be positive");
    ensure!(g.grid >= 16, "--grid must be at least 16");
    check_target(g.out.as_deref())?;
    if let Some(n) = g.threads {
        ensure!(n > 0, "--threads must be positive");
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("cannot configure worker threads")?;
    }
    let format = g.format.unwrap_or_else(|| default_format(&cli.command));
    let inp = inputs(cli)?;
    let solve = SolveOptions { tol: g.tol, ..SolveOptions::default() };
    let mut status = Status::Ok;
    let text = match &cli.command {
        Command::PhasePortrait { orbits, steps, seed } => {
            let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
            let starts: Vec<PhasePoint<f64>> = (0..*orbits)
                .map(|j| match rng.as_mut() {
                    Some(r) => PhasePoint::new(r.gen_range(0.0..1.0), r.gen_range(-0.5..0.5)),
                    None => PhasePoint::new(0.0, -0.5 + (j as f64 + 0.5) / *orbits as f64),
                })
                .collect();
            let segs: Vec<Vec<[f64; 2]>> = starts
                .iter()
                .map(|z| iterate(&inp.potential, *z, *steps).points.iter().map(|p| [p.x_mod1(), p.y]).collect())
                .collect();
            match format {
                Format::Json => envelope(cli, json!({ "seed": seed, "orbits": segs }))?,
                Format::Csv => {
                    let mut csv = match seed {
                        Some(s) => Csv::with_meta(&json!({ "seed": s }), &["x_mod1", "y", "orbit_id"]),
                        None => Csv::new(&["x_mod1", "y", "orbit_id"]),
                    };
                    for (id, seg) in segs.iter().enumerate() {
                        for p in seg {
                            csv.row(&[fmt(p[0]), fmt(p[1]), id.to_string()]);
                        }
                    }
                    csv.finish()
                }
            }
        }
        Command::Orbit { p, q, pin } => {
            let (p, q) = (need(*p, "p")?, need(*q, "q")?);
            let cfg = minimize_action_with(&inp.potential, p, q, *pin, &solve)?;
            let act = action(&inp.potential, &cfg);
            match format {
                Format::Json => envelope(
                    cli,
                    json!({
                        "p": p, "q": q, "pin": pin, "points": cfg.points, "action": act.value,
                        "residual": cfg.residual, "local_minimum": cfg.local_minimum,
                    }),
                )?,
                Format::Csv => {
                    let mut csv = Csv::new(&["i", "x"]);
                    for (i, x) in cfg.points.iter().enumerate() {
                        csv.row(&[i.to_string(), fmt(*x)]);
                    }
                    csv.finish()
                }
            }
        }
        Command::Curve { rho, sigma, k, samples } => {
            let rho = need(*rho, "rho")?;
            let params = inp.suris.unwrap_or_else(SurisParams64::zero);
            let opts = CurveSolveOptions { eta_tol: g.tol.min(1e-12), ..CurveSolveOptions::default() };
            let curve = curve_for_rotation_number_with(&params, rho, *sigma, *k, &opts)?;
            let header = json!({
                "eta": curve.eta(), "sigma": sigma, "k": k, "rho_target": rho,
                "rho_measured": rotation_number_on_curve(&curve, opts.iterates)?.value(),
                "invariance_residual": curve.invariance_residual(256)?,
                "level_residual": curve.level_residual(),
            });
            let pts = (0..*samples)
                .map(|i| {
                    let x = i as f64 / *samples as f64;
                    Ok([x, curve.psi(x)?])
                })
                .collect::<suris_core::Result<Vec<_>>>()?;
            match format {
                Format::Json => envelope(cli, json!({ "header": header, "points": pts }))?,
                Format::Csv => {
                    let mut csv = Csv::with_meta(&header, &["x", "psi"]);
                    for p in &pts {
                        csv.row(&[fmt(p[0]), fmt(p[1])]);
                    }
                    csv.finish()
                }
            }
        }
        Command::Chart { rho, samples } => {
            let rho = need(*rho, "rho")?;
            let params = inp.suris.unwrap_or_else(SurisParams64::zero);
            let chart = build_chart(&params, rho)?;
            let header = json!({
                "rho": rho, "eta": chart.eta(),
                "conjugacy_defect": chart.conjugacy_defect(256)?,
                "inverse_defect": chart.inverse_defect(512),
                "normalization_defect": chart.normalization_defect(),
            });
            let pts: Vec<[f64; 3]> = (0..*samples)
                .map(|i| {
                    let x = i as f64 / *samples as f64;
                    [x, chart.theta(x), chart.theta_prime(x)]
                })
                .collect();
            match format {
                Format::Json => envelope(cli, json!({ "header": header, "points": pts }))?,
                Format::Csv => {
                    let mut csv = Csv::with_meta(&header, &["x", "theta", "theta_prime"]);
                    for p in &pts {
                        csv.row(&[fmt(p[0]), fmt(p[1]), fmt(p[2])]);
                    }
                    csv.finish()
                }
            }
        }
        Command::Coeffs { w, qmax } => {
            let w = load_doc(w.as_deref().context("missing required flag --w")?)?.to_potential()?;
            ensure!(*qmax >= 0, "--qmax must be nonnegative");
            let ctx = InnerProductContext::new(inp.suris.unwrap_or_else(SurisParams64::zero), g.grid)?;
            let qs: Vec<i64> = (-qmax..=*qmax).collect();
            let co = ctx.coefficients(&ctx.sample_potential(&w), &qs)?;
            match format {
                Format::Json => envelope(
                    cli,
                    Value::Array(
                        qs.iter()
                            .zip(&co)
                            .map(|(q, z)| json!({ "q": q, "re": z.re, "im": z.im, "abs": z.norm() }))
                            .collect(),
                    ),
                )?,
                Format::Csv => {
                    let mut csv = Csv::new(&["q", "re", "im", "abs"]);
                    for (q, z) in qs.iter().zip(&co) {
                        csv.row(&[q.to_string(), fmt(z.re), fmt(z.im), fmt(z.norm())]);
                    }
                    csv.finish()
                }
            }
        }
        Command::Beta { p, q } => {
            let (p, q) = (need(*p, "p")?, need(*q, "q")?);
            let cfg = minimize_action_with(&inp.potential, p, q, None, &solve)?;
            let b = action(&inp.potential, &cfg).value / q as f64;
            match format {
                Format::Json => envelope(cli, json!({ "p": p, "q": q, "beta": b }))?,
                Format::Csv => {
                    let mut csv = Csv::new(&["p", "q", "beta"]);
                    csv.row(&[p.to_string(), q.to_string(), fmt(b)]);
                    csv.finish()
                }
            }
        }
        Command::Spectrum { qmax } => {
            let entries = action_spectrum_sample(&inp.potential, *qmax)?;
            match format {
                Format::Json => envelope(cli, serde_json::to_value(&entries)?)?,
                Format::Csv => {
                    let mut csv = Csv::new(&["p", "q", "rho", "action", "error"]);
                    for e in &entries {
                        csv.row(&[
                            e.p.to_string(),
                            e.q.to_string(),
                            fmt(e.p as f64 / e.q as f64),
                            e.action.map(fmt).unwrap_or_default(),
                            e.error.clone().unwrap_or_default().replace(',', ";"),
                        ]);
                    }
                    csv.finish()
                }
            }
        }
        Command::Rigidity(args) => {
            ensure!(format == Format::Json, "rigidity reports are JSON only");
            let rep = rigidity(args, &inp, g.grid, g.tol)?;
            if !rep.passed {
                status = Status::ThresholdFailed;
            }
            envelope(cli, serde_json::to_value(&rep)?)?
        }
        Command::Project { w, iterations } => {
            ensure!(format == Format::Json, "projection output is JSON only");
            let w = load_doc(w.as_deref().context("missing required flag --w")?)?.to_potential()?;
            let base = inp.suris.unwrap_or_else(SurisParams64::zero);
            let run = project_to_suris(&base, &w, *iterations, g.grid)?;
            envelope(cli, serde_json::to_value(&run)?)?
        }
    };
    emit(g.out.as_deref(), &text)?;
    Ok(status)
}

fn scaled(dir: [f64; 4], norm: f64) -> [f64; 4] {
    let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    dir.map(|v| v * norm / n)
}

/// Smooth trigonometric perturbation with geometrically decaying random coefficients.
fn random_perturbation(seed: u64, amp: f64) -> Potential64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |m: usize| amp * 0.7f64.powi(m as i32) * rng.gen_range(-1.0..1.0);
    let cs: Vec<f64> = (0..16).map(&mut draw).collect();
    let sn: Vec<f64> = (0..16).map(&mut draw).collect();
    Potential::trig(TrigPerturbation::new(cs, sn))
}

fn rigidity(a: &RigidityArgs, inp: &Inputs, grid: usize, tol: f64) -> Result<EstimateReport> {
    let ps = match inp.suris {
        Some(p) => p,
        None => SurisParams64::along(BASE_DIRECTION, a.eps)?,
    };
    let delta = scaled(INCREMENT_DIRECTION, a.delta);
    let w = |amp: f64| -> Result<Potential64> {
        Ok(match &a.w {
            Some(p) => load_doc(p)?.to_potential()?,
            None => random_perturbation(a.seed, amp),
        })
    };
    let mut rep = match a.experiment {
        Experiment::CoefficientBound => {
            ensure!(a.qmax >= 3, "--qmax must be at least 3");
            verify_action_coefficient_bound(&ps, delta, a.halvings, &(3..=a.qmax).collect::<Vec<_>>(), grid)?
        }
        Experiment::TailBound => {
            ensure!(a.qmax >= 9, "--qmax must be at least 9");
            verify_tail_bound(&ps, &w(1e-2)?, a.qmax, grid)?
        }
        Experiment::Orthogonality => {
            let mut grids = vec![grid];
            while grids.len() < 4 && grids[0] / 2 >= 4 * a.qmax.max(1) as usize {
                grids.insert(0, grids[0] / 2);
            }
            verify_orthogonality(&ps, a.qmax, &grids)?
        }
        Experiment::Projection => verify_projection_contraction(&ps, delta, 5, grid)?,
        Experiment::Deviation => verify_deviation_laws(&ps, delta, a.halvings, 1, 5, 0.1)?,
        Experiment::Constancy => {
            verify_action_constancy(&ps, &[(1, 6), (1, 5), (1, 4), (2, 7), (1, 3)], &[0.0, 0.2, 0.4, 0.6, 0.8])?
        }
        Experiment::Convexity => verify_beta_convexity(&Potential::suris(ps), a.qmax)?,
        Experiment::Obstruction => verify_obstruction(&inp.potential, a.r, a.k, tol)?,
        Experiment::BetaConsistency => beta_consistency(&ps, &w(1e-3)?, a.qmax)?,
    };
    if a.w.is_none() && matches!(a.experiment, Experiment::TailBound | Experiment::BetaConsistency) {
        rep.parameters.insert("seed".into(), json!(a.seed));
    }
    Ok(rep)
}
