use std::io::Write;

use berrybell::bell::{
    self, bell_angles, grid_max_s, s_zero_azimuth, smax_closed_form, Branch, GridOptions,
};
use berrybell::berry::{self, EchoMode, FieldConfig, PhaseReport, Ray, DEFAULT_ADIABATIC_RATIO};
use berrybell::neutron;
use berrybell::{BerryParameter, MeasurementDirection};
use berrybell::{CountRecord, InterferometerConfig};

use crate::plot::{line_plot, Series};
use crate::table::{num, Table};
use crate::{
    settings, BellAnglesArgs, Cli, CliError, Command, CorrelationArgs, CountsArgs, PhaseMode,
    PhasesArgs, SmaxMethod, SweepArgs, SweepParam, SweepSpec, VerifyArgs,
};

/// Closed form against matrix evaluation of one correlation.
const CORRELATION_AGREEMENT: f64 = 1e-12;

pub(crate) fn dispatch(
    cli: &Cli,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    match &cli.command {
        Command::Phases(a) => phases(a, out),
        Command::SweepSmax(a) => sweep_smax(cli, a, out),
        Command::BellAngles(a) => bell_angles_cmd(cli, a, out),
        Command::Correlation(a) => correlation(cli, a, out),
        Command::Counts(a) => counts(cli, a, out, err),
        Command::VerifyAdiabatic(a) => verify_adiabatic(cli, a, out),
    }
}

fn tilt(theta_deg: f64) -> Result<f64, CliError> {
    if !(0.0..=90.0).contains(&theta_deg) {
        return Err(CliError::Usage(format!(
            "--theta must lie in [0, 90] degrees, got {theta_deg}"
        )));
    }
    Ok(theta_deg.to_radians())
}

fn ratio(r: f64) -> Result<f64, CliError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(CliError::Usage(format!(
            "--ratio must be positive, got {r}"
        )));
    }
    Ok(r)
}

fn gamma(gamma_deg: f64) -> Result<BerryParameter, CliError> {
    BerryParameter::new(gamma_deg.to_radians()).map_err(|_| {
        CliError::Usage(format!(
            "--gamma must lie in [-360, 360] degrees, got {gamma_deg}"
        ))
    })
}

fn kv(out: &mut dyn Write, key: &str, value: impl std::fmt::Display) -> std::io::Result<()> {
    writeln!(out, "{key} = {value}")
}

fn phases(a: &PhasesArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let theta = tilt(a.theta)?;
    let r = ratio(a.ratio.unwrap_or(DEFAULT_ADIABATIC_RATIO))?;
    let cfg = FieldConfig::with_ratio(theta, r)?;
    let (up, down) = match a.mode {
        PhaseMode::Single => berry::analytic_phases(&cfg),
        PhaseMode::Full => berry::spin_echo(&cfg, EchoMode::FullTwoPeriods),
        PhaseMode::Half => berry::spin_echo(&cfg, EchoMode::TwoHalfPeriods),
    };
    let mode = match a.mode {
        PhaseMode::Single => "single",
        PhaseMode::Full => "full",
        PhaseMode::Half => "half",
    };
    kv(out, "mode", mode)?;
    kv(out, "theta", num(theta))?;
    kv(out, "theta_deg", num(a.theta))?;
    kv(out, "ratio", num(r))?;
    kv(out, "gamma", num(up.geometric))?;
    kv(out, "gamma_down", num(down.geometric))?;
    kv(out, "dynamical", num(up.dynamical))?;
    kv(out, "dynamical_down", num(down.dynamical))?;

    if a.ratio.is_none() {
        return Ok(());
    }
    let (ou, od) = match a.mode {
        PhaseMode::Single => (
            berry::one_period_oracle(&cfg, Ray::Up)?,
            berry::one_period_oracle(&cfg, Ray::Down)?,
        ),
        PhaseMode::Full | PhaseMode::Half => {
            let m = if a.mode == PhaseMode::Full {
                EchoMode::FullTwoPeriods
            } else {
                EchoMode::TwoHalfPeriods
            };
            let e = berry::spin_echo_oracle(&cfg, m, None)?;
            (e.up, e.down)
        }
    };
    let res_up = (ou.phases.geometric - up.geometric).abs();
    let res_down = (od.phases.geometric - down.geometric).abs();
    kv(out, "oracle_gamma", num(ou.phases.geometric))?;
    kv(out, "oracle_gamma_down", num(od.phases.geometric))?;
    kv(out, "oracle_dynamical", num(ou.phases.dynamical))?;
    kv(out, "oracle_dynamical_down", num(od.phases.dynamical))?;
    kv(
        out,
        "oracle_expectation_dynamical",
        num(ou.expectation_dynamical),
    )?;
    kv(out, "residual", num(res_up))?;
    kv(out, "residual_down", num(res_down))?;
    let worst = res_up.max(res_down);
    if !(worst <= a.tolerance) {
        return Err(CliError::Tolerance(format!(
            "oracle residual {worst:.3e} rad exceeds {:.1e}",
            a.tolerance
        )));
    }
    Ok(())
}

fn branch_label(b: Branch) -> &'static str {
    match b {
        Branch::F1NegF2Neg => "pp",
        Branch::F1NegF2Pos => "pm",
    }
}

fn sweep_smax(cli: &Cli, a: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.param == SweepParam::Ratio {
        return Err(CliError::Usage("sweep-smax sweeps gamma or theta".into()));
    }
    if !(a.grid_step > 0.0 && a.grid_step <= 45.0) {
        return Err(CliError::Usage(format!(
            "--grid-step must lie in (0, 45], got {}",
            a.grid_step
        )));
    }
    let spec = SweepSpec::new(a.param, a.start, a.stop, a.points)?;
    let opts = GridOptions {
        step_deg: a.grid_step,
        ..GridOptions::default()
    };
    let run_grid = a.method != SmaxMethod::Analytic;
    let run_analytic = a.method != SmaxMethod::Grid;

    let mut t = Table::new(out, cli.format);
    t.row(&[
        "gamma",
        "gamma_deg",
        "theta",
        "theta_deg",
        "smax_analytic",
        "smax_grid",
        "grid_branch",
        "beta1_branch_pp",
        "beta1_branch_pm",
        "beta1p",
        "alpha1p",
        "beta1_branch_pp_deg",
        "beta1_branch_pm_deg",
        "beta1p_deg",
        "alpha1p_deg",
        "grid_alpha1p",
        "grid_beta1",
        "grid_beta1p",
    ])?;
    let mut analytic_pts = Vec::new();
    let mut grid_pts = Vec::new();
    for v in spec.values() {
        let (g, theta) = match a.param {
            SweepParam::Gamma => {
                let g = gamma(v)?;
                (g, g.tilt())
            }
            _ => (BerryParameter::from_tilt(v.to_radians())?, v.to_radians()),
        };
        let pp = bell_angles(&g, Branch::F1NegF2Neg);
        let pm = bell_angles(&g, Branch::F1NegF2Pos);
        let analytic = run_analytic.then(|| s_zero_azimuth(&g, &pp).s);
        let grid = run_grid.then(|| grid_max_s(&g, &opts));

        // Branches whose stationary point attains the searched maximum.
        let label = match &grid {
            Some(m) => {
                let hits: Vec<&str> = Branch::BOTH
                    .iter()
                    .filter(|b| (s_zero_azimuth(&g, &bell_angles(&g, **b)).s - m.s).abs() < 1e-5)
                    .map(|b| branch_label(*b))
                    .collect();
                if hits.is_empty() {
                    "none".to_string()
                } else {
                    hits.join("+")
                }
            }
            None => String::new(),
        };
        let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
        let x_axis = v;
        if let Some(s) = analytic {
            analytic_pts.push((x_axis, s));
        }
        if let Some(m) = &grid {
            grid_pts.push((x_axis, m.s));
        }
        t.row(&[
            num(g.gamma()),
            num(g.gamma().to_degrees()),
            num(theta),
            num(theta.to_degrees()),
            opt(analytic),
            opt(grid.map(|m| m.s)),
            label,
            num(pp.beta1),
            num(pm.beta1),
            num(pp.beta1p),
            num(pp.alpha1p),
            num(pp.beta1.to_degrees()),
            num(pm.beta1.to_degrees()),
            num(pp.beta1p.to_degrees()),
            num(pp.alpha1p.to_degrees()),
            opt(grid.map(|m| m.angles.alpha1p)),
            opt(grid.map(|m| m.angles.beta1)),
            opt(grid.map(|m| m.angles.beta1p)),
        ])?;
    }

    if let Some(path) = &a.plot {
        let x_label = match a.param {
            SweepParam::Gamma => "gamma (deg)",
            _ => "theta (deg)",
        };
        let mut series = Vec::new();
        if !analytic_pts.is_empty() {
            series.push(Series {
                label: "S_max analytic",
                color: "black",
                points: analytic_pts,
            });
        }
        if !grid_pts.is_empty() {
            series.push(Series {
                label: "S_max grid",
                color: "crimson",
                points: grid_pts,
            });
        }
        let svg = line_plot("Maximal CHSH value", x_label, "S_max", &series);
        std::fs::write(path, svg)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn bell_angles_cmd(cli: &Cli, a: &BellAnglesArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let g = gamma(a.gamma)?;
    let mut t = Table::new(out, cli.format);
    t.row(&[
        "branch",
        "gamma",
        "gamma_deg",
        "alpha1p",
        "alpha1p_deg",
        "beta1",
        "beta1_deg",
        "beta1p",
        "beta1p_deg",
        "f1",
        "f2",
        "s",
        "smax_closed_form",
    ])?;
    for b in Branch::BOTH {
        let x = bell_angles(&g, b);
        let s = s_zero_azimuth(&g, &x);
        t.row(&[
            branch_label(b).to_string(),
            num(g.gamma()),
            num(a.gamma),
            num(x.alpha1p),
            num(x.alpha1p.to_degrees()),
            num(x.beta1),
            num(x.beta1.to_degrees()),
            num(x.beta1p),
            num(x.beta1p.to_degrees()),
            num(s.f1),
            num(s.f2),
            num(s.s),
            num(smax_closed_form(&g)),
        ])?;
    }
    Ok(())
}

fn correlation(cli: &Cli, a: &CorrelationArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let g = gamma(a.gamma)?;
    let left = MeasurementDirection::new(a.alpha1.to_radians(), a.alpha2.to_radians());
    let right = MeasurementDirection::new(a.beta1.to_radians(), a.beta2.to_radians());
    let closed = bell::correlation(&g, &left, &right);
    let state = bell::imprint_berry(&bell::singlet(), &g);
    let matrix = bell::correlation_on_state(&state, &left, &right)?;
    let mut t = Table::new(out, cli.format);
    t.row(&[
        "gamma",
        "gamma_deg",
        "alpha1",
        "alpha2",
        "beta1",
        "beta2",
        "e_closed_form",
        "e_matrix",
        "difference",
    ])?;
    t.row(&[
        num(g.gamma()),
        num(a.gamma),
        num(a.alpha1.to_radians()),
        num(a.alpha2.to_radians()),
        num(a.beta1.to_radians()),
        num(a.beta2.to_radians()),
        num(closed),
        num(matrix),
        num(closed - matrix),
    ])?;
    if !((closed - matrix).abs() <= CORRELATION_AGREEMENT) {
        return Err(CliError::Tolerance(format!(
            "closed form and matrix correlation differ by {:.3e}",
            (closed - matrix).abs()
        )));
    }
    Ok(())
}

fn counts(
    cli: &Cli,
    a: &CountsArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    if !a.gamma_b.is_finite() {
        return Err(CliError::Usage("--gamma-b must be finite".into()));
    }
    if a.total == 0 {
        return Err(CliError::Usage("--total must be at least 1".into()));
    }
    let config = InterferometerConfig::new(a.gamma_b.to_radians())?;
    let settings: Vec<(f64, MeasurementDirection)> = match &a.settings {
        Some(path) => settings::read(path)?
            .into_iter()
            .map(|s| {
                (
                    s.chi_deg.to_radians(),
                    MeasurementDirection::new(s.delta1_deg.to_radians(), s.delta2_deg.to_radians()),
                )
            })
            .collect(),
        None => neutron::compensated_settings(&config)?.to_vec(),
    };

    let mut records: Vec<CountRecord> = Vec::with_capacity(settings.len());
    for (i, (chi, delta)) in settings.iter().enumerate() {
        let seed = cli.seed.wrapping_add(i as u64);
        records.push(neutron::simulate_counts(
            &config, *chi, delta, a.total, seed,
        )?);
    }

    let mut t = Table::new(out, cli.format);
    let mut header: Vec<&str> = CountRecord::HEADER.to_vec();
    header.extend([
        "e",
        "e_sigma",
        "e_exact",
        "chi_deg",
        "delta1_deg",
        "delta2_deg",
    ]);
    t.row(&header)?;
    for r in &records {
        let e: f64 = neutron::estimate_correlation(r)?;
        let exact = neutron::exact_correlation(&config, r.chi, &r.delta)?;
        let mut fields = r.fields().to_vec();
        fields.extend([
            num(e),
            num(neutron::correlation_sigma(e, r.counts.total())),
            num(exact),
            num(r.chi.to_degrees()),
            num(r.delta.polar().to_degrees()),
            num(r.delta.azimuthal().to_degrees()),
        ]);
        t.row(&fields)?;
    }

    if let Ok(four) = <[CountRecord; 4]>::try_from(records.as_slice()) {
        let est = neutron::chsh_from_counts(&four)?;
        let exact = neutron::chsh_exact(
            &config,
            &settings.clone().try_into().expect("four settings"),
        )?;
        writeln!(
            err,
            "S = {} +/- {} (exact {})",
            num(est.s),
            num(est.sigma),
            num(exact)
        )?;
    }
    Ok(())
}

struct OracleRow {
    inverse_ratio: f64,
    theta_deg: f64,
    single: PhaseReport<f64>,
    analytic: f64,
    echo: PhaseReport<f64>,
    echo_expected: f64,
}

fn verify_adiabatic(cli: &Cli, a: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.theta.is_empty() || a.inverse_ratio.is_empty() {
        return Err(CliError::Usage(
            "need at least one tilt and one ratio".into(),
        ));
    }
    let mut inverse = a.inverse_ratio.clone();
    for r in &inverse {
        ratio(*r)?;
    }
    inverse.sort_by(f64::total_cmp);

    let mut rows = Vec::new();
    for &th in &a.theta {
        let theta = tilt(th)?;
        for &inv in &inverse {
            let cfg = FieldConfig::with_ratio(theta, 1.0 / inv)?;
            let (up, _) = berry::analytic_phases(&cfg);
            let single = berry::one_period_oracle(&cfg, Ray::Up)?;
            let echo = berry::spin_echo_oracle(&cfg, EchoMode::FullTwoPeriods, None)?;
            rows.push(OracleRow {
                inverse_ratio: inv,
                theta_deg: th,
                single,
                analytic: up.geometric,
                echo_expected: echo.analytic.0.geometric,
                echo: echo.up,
            });
        }
    }

    let mut t = Table::new(out, cli.format);
    t.row(&[
        "inverse_ratio",
        "ratio",
        "theta",
        "theta_deg",
        "gamma_analytic",
        "gamma_oracle",
        "error",
        "dynamical_oracle",
        "expectation_dynamical",
        "echo_gamma_expected",
        "echo_gamma_oracle",
        "echo_error",
        "echo_dynamical",
    ])?;
    for r in &rows {
        t.row(&[
            num(r.inverse_ratio),
            num(1.0 / r.inverse_ratio),
            num(r.theta_deg.to_radians()),
            num(r.theta_deg),
            num(r.analytic),
            num(r.single.phases.geometric),
            num((r.single.phases.geometric - r.analytic).abs()),
            num(r.single.phases.dynamical),
            num(r.single.expectation_dynamical),
            num(r.echo_expected),
            num(r.echo.phases.geometric),
            num((r.echo.phases.geometric - r.echo_expected).abs()),
            num(r.echo.phases.dynamical),
        ])?;
    }

    let mut problems = Vec::new();
    for chunk in rows.chunks(inverse.len()) {
        let errs: Vec<f64> = chunk
            .iter()
            .map(|r| (r.single.phases.geometric - r.analytic).abs())
            .collect();
        let th = chunk[0].theta_deg;
        if errs.windows(2).any(|w| !(w[1] < w[0] || w[1] <= 1e-12)) {
            problems.push(format!(
                "error does not shrink with the ratio at theta = {th} deg"
            ));
        }
        let last = chunk.last().expect("nonempty");
        let e = *errs.last().expect("nonempty");
        if !(e <= a.tolerance) {
            problems.push(format!(
                "error {e:.3e} at theta = {th} deg, 1/{}",
                last.inverse_ratio
            ));
        }
        let echo_err = (last.echo.phases.geometric - last.echo_expected).abs();
        if !(echo_err <= 1e-2) || !(last.echo.phases.dynamical.abs() <= a.tolerance) {
            problems.push(format!("echo misses 2 gamma at theta = {th} deg"));
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Tolerance(problems.join("; ")))
    }
}
