//! The `caustica` command line: scenario loading, presets and export.
//!
//! Tables go out as CSV with a single header line and every float printed
//! with 17 significant digits; structured reports go out as pretty JSON.
//! Outputs depend only on the inputs and tolerances, not on `--threads`.

mod presets;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

pub use presets::{preset, GAUSSIAN, LIPSCHITZ_PHASE, PRESET_NAMES};

use crate::branches::{concentration, BranchSearch, CausticGrid};
use crate::error::{Error, Result};
use crate::flow::{ray_state, FlowOptions, FlowStatus};
use crate::fluid::{
    euler_residual, generalized_moment_residual, to_conservative, FluidField, SpaceTimeGrid,
    WeightFunction,
};
use crate::symbols::{validate_scenario, CheckOutcome, Scenario, ScenarioDoc, ValidationReport};
use crate::wigner::{
    compare, evolve, husimi, resolving_spacing, wigner_strided, wkb_initial, CompareOptions,
    PeriodicGrid,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "caustica",
    version,
    about = "Multivalued geometrical optics by ray tracing"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Scenario JSON file.
    #[arg(long, global = true, conflicts_with = "preset")]
    pub scenario: Option<PathBuf>,
    /// Shipped scenario name.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Relative ODE tolerance (absolute tolerance is 1% of it).
    #[arg(long, global = true, value_parser = parse_number)]
    pub tol_ode: Option<f64>,
    /// Root acceptance tolerance on |f_{x,t}|.
    #[arg(long, global = true, value_parser = parse_number)]
    pub tol_root: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace rays from a footpoint grid; CSV x0, t, x_hat, xi_hat, S, J, status, t_event.
    Rays {
        #[arg(long, default_value = "0", value_parser = parse_number)]
        t0: f64,
        /// Defaults to the largest scenario time.
        #[arg(long, value_parser = parse_number)]
        t1: Option<f64>,
        /// Footpoints per axis.
        #[arg(long, default_value_t = 101)]
        nx: usize,
        /// Time intervals between t0 and t1.
        #[arg(long, default_value_t = 10)]
        nt: usize,
    },
    /// Branch set at one point (JSON).
    Branches {
        /// Comma-separated coordinates.
        #[arg(long, value_delimiter = ',', value_parser = parse_number, required = true)]
        x: Vec<f64>,
        #[arg(long, value_parser = parse_number)]
        t: f64,
    },
    /// Multivalued density on the region grid; CSV x, t, n, N.
    Density {
        /// Defaults to the scenario times.
        #[arg(long, value_delimiter = ',', value_parser = parse_number)]
        t: Vec<f64>,
        #[arg(long, default_value_t = 201)]
        nx: usize,
    },
    /// Caustic points in a time window; CSV x, t, x0, branch, rays.
    Caustics {
        #[arg(long, default_value = "0", value_parser = parse_number)]
        t0: f64,
        #[arg(long, value_parser = parse_number)]
        t1: Option<f64>,
        #[arg(long, default_value_t = 201)]
        nx: usize,
        #[arg(long, default_value_t = 300)]
        nt: usize,
    },
    /// Concentrated mass at a point (JSON).
    Focus {
        #[arg(long, value_delimiter = ',', value_parser = parse_number, required = true)]
        y: Vec<f64>,
        #[arg(long, value_parser = parse_number)]
        t: f64,
    },
    /// Fluid residuals of the reconstructed single-branch field (CSV).
    Fluid {
        #[arg(long, value_parser = parse_number)]
        x_lo: Option<f64>,
        #[arg(long, value_parser = parse_number)]
        x_hi: Option<f64>,
        #[arg(long, default_value = "0", value_parser = parse_number)]
        t0: f64,
        /// Defaults to the smallest positive scenario time.
        #[arg(long, value_parser = parse_number)]
        t1: Option<f64>,
        /// Grid spacing in x and t.
        #[arg(long, default_value = "1/32", value_parser = parse_number)]
        h: f64,
        /// Extra weight σ(v), an expression in `v`.
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Wigner (or Husimi) transform of the evolved WKB wave; CSV x, xi, w.
    Wigner {
        #[arg(long, value_parser = parse_number)]
        eps: f64,
        #[arg(long, value_parser = parse_number)]
        t: f64,
        /// Gaussian-smoothed (Husimi) instead of the raw transform.
        #[arg(long)]
        husimi: bool,
        /// Rows written (x nodes inside the region).
        #[arg(long, default_value_t = 256)]
        rows: usize,
        /// Columns written (ξ nodes inside the scenario ξ-box).
        #[arg(long, default_value_t = 256)]
        cols: usize,
    },
    /// Finite-ε solutions against the limit density and WKB sum (JSON).
    Compare {
        #[arg(long, value_delimiter = ',', value_parser = parse_number,
              default_value = "1/64,1/128,1/256")]
        eps_list: Vec<f64>,
        /// Defaults to the first scenario time.
        #[arg(long, value_parser = parse_number)]
        t: Option<f64>,
        #[arg(long, default_value_t = 1024)]
        samples: usize,
    },
    /// Check the standing assumptions on the scenario (JSON).
    Validate,
}

/// Accepts plain floats, `pi` multiples such as `pi/4`, and fractions `a/b`.
pub fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let atom = |a: &str| -> std::result::Result<f64, String> {
        let a = a.trim();
        match a {
            "pi" => Ok(std::f64::consts::PI),
            _ => a
                .strip_suffix("pi")
                .map(|c| c.trim_end_matches('*'))
                .filter(|c| !c.is_empty())
                .map_or_else(
                    || a.parse::<f64>(),
                    |c| c.parse::<f64>().map(|v| v * std::f64::consts::PI),
                )
                .map_err(|e| format!("`{a}`: {e}")),
        }
    };
    match s.split_once('/') {
        Some((num, den)) => Ok(atom(num)? / atom(den)?),
        None => atom(s),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BlowUp { .. } | Error::NonFinite(_) | Error::AtCaustic { .. } => EXIT_NUMERICAL,
        _ => EXIT_VALIDATION,
    }
}

/// Parse `args` (program name first), run, write the output and return the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let written = match &cli.global.out {
                Some(path) => std::fs::write(path, &out.text),
                None => {
                    use std::io::Write;
                    std::io::stdout().write_all(out.text.as_bytes())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return EXIT_VALIDATION;
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Rendered command output and the exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Self {
            text,
            code: EXIT_OK,
        }
    }
}

/// Run a parsed command without touching the filesystem for output.
pub fn execute(cli: &Cli) -> Result<Output> {
    let scenario = load_scenario(&cli.global)?;
    match cli.global.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidScenario(format!("thread pool: {e}")))?
            .install(|| dispatch(&cli.command, &scenario)),
        None => dispatch(&cli.command, &scenario),
    }
}

pub fn load_scenario(g: &GlobalArgs) -> Result<Scenario> {
    let mut doc = match (&g.scenario, &g.preset) {
        (Some(path), _) => ScenarioDoc::load(path)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => {
            return Err(Error::InvalidScenario(
                "one of --scenario or --preset is required".into(),
            ))
        }
    };
    if let Some(tol) = g.tol_ode {
        doc.tolerances.ode_rel = Some(tol);
        doc.tolerances.ode_abs = Some(tol * 1e-2);
    }
    if let Some(tol) = g.tol_root {
        doc.tolerances.root = Some(tol);
    }
    doc.to_scenario()
}

fn dispatch(cmd: &Command, s: &Scenario) -> Result<Output> {
    match cmd {
        Command::Rays { t0, t1, nx, nt } => {
            rays_csv(s, *t0, t1.unwrap_or(s.region.max_abs_time()), *nx, *nt).map(Output::ok)
        }
        Command::Branches { x, t } => {
            check_dim(s, x)?;
            json(&BranchSearch::for_scenario(s).find(x, *t)?).map(Output::ok)
        }
        Command::Density { t, nx } => {
            let times = if t.is_empty() { &s.region.times } else { t };
            density_csv(s, times, *nx).map(Output::ok)
        }
        Command::Caustics { t0, t1, nx, nt } => {
            let mut grid = CausticGrid::new(
                s.region.x.clone(),
                *t0,
                t1.unwrap_or(s.region.max_abs_time()),
            );
            grid.nx = *nx;
            grid.nt = *nt;
            caustics_csv(s, &grid).map(Output::ok)
        }
        Command::Focus { y, t } => {
            check_dim(s, y)?;
            let report = concentration(
                &s.hamiltonian,
                &s.initial,
                y,
                *t,
                &s.region.x,
                &s.tolerances,
            )?;
            json(&report).map(Output::ok)
        }
        Command::Fluid {
            x_lo,
            x_hi,
            t0,
            t1,
            h,
            sigma,
        } => {
            let t1 = match t1 {
                Some(t) => *t,
                None => s
                    .region
                    .times
                    .iter()
                    .cloned()
                    .filter(|t| *t > *t0)
                    .fold(f64::INFINITY, f64::min),
            };
            let grid = SpaceTimeGrid::with_spacing(
                x_lo.unwrap_or(s.region.x.lo[0]),
                x_hi.unwrap_or(s.region.x.hi[0]),
                *t0,
                t1,
                *h,
            )?;
            fluid_csv(s, grid, sigma.as_deref()).map(Output::ok)
        }
        Command::Wigner {
            eps,
            t,
            husimi,
            rows,
            cols,
        } => wigner_csv(s, *eps, *t, *husimi, *rows, *cols).map(Output::ok),
        Command::Compare {
            eps_list,
            t,
            samples,
        } => {
            let t = t.or_else(|| s.region.times.first().copied()).unwrap_or(1.0);
            let opts = CompareOptions {
                samples: *samples,
                ..CompareOptions::default()
            };
            json(&compare(s, eps_list, t, &opts)?).map(Output::ok)
        }
        Command::Validate => {
            let report = validate_scenario(s)?;
            let code = if report.passed() {
                EXIT_OK
            } else {
                EXIT_VALIDATION
            };
            Ok(Output {
                text: json(&ValidateOutput::new(&report))?,
                code,
            })
        }
    }
}

#[derive(Serialize)]
struct ValidateOutput<'a> {
    passed: bool,
    outcomes: Vec<CheckOutcome>,
    first_blowup: Option<f64>,
    report: &'a ValidationReport,
}

impl<'a> ValidateOutput<'a> {
    fn new(report: &'a ValidationReport) -> Self {
        Self {
            passed: report.passed(),
            outcomes: report.outcomes(),
            first_blowup: report.first_blowup(),
            report,
        }
    }
}

fn check_dim(s: &Scenario, x: &[f64]) -> Result<()> {
    if x.len() != s.dim() {
        return Err(Error::Domain(format!(
            "point has {} coordinates, scenario is {}-dimensional",
            x.len(),
            s.dim()
        )));
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    Ok(text)
}

/// 17 significant digits: enough to round-trip any f64.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string().to_lowercase()
    }
}

fn axis_names(prefix: &str, d: usize) -> Vec<String> {
    if d == 1 {
        vec![prefix.to_string()]
    } else {
        (1..=d).map(|k| format!("{prefix}_{k}")).collect()
    }
}

fn push_row(out: &mut String, cells: impl IntoIterator<Item = String>) {
    let row: Vec<String> = cells.into_iter().collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

fn floats(v: &[f64]) -> impl Iterator<Item = String> + '_ {
    v.iter().map(|x| fmt_float(*x))
}

fn rays_csv(s: &Scenario, t0: f64, t1: f64, nx: usize, nt: usize) -> Result<String> {
    if nx < 1 || !(t0.is_finite() && t1.is_finite()) {
        return Err(Error::GridTooSmall(format!("nx = {nx}, t ∈ [{t0}, {t1}]")));
    }
    let d = s.dim();
    let opts = FlowOptions::from_tolerances(&s.tolerances);
    let footpoints = s.region.x.grid(nx);
    let times: Vec<f64> = (0..=nt)
        .map(|k| {
            if nt == 0 {
                t0
            } else {
                t0 + (t1 - t0) * k as f64 / nt as f64
            }
        })
        .collect();
    let jobs: Vec<(usize, usize)> = (0..footpoints.len())
        .flat_map(|i| (0..times.len()).map(move |k| (i, k)))
        .collect();
    let states = jobs
        .par_iter()
        .map(|&(i, k)| ray_state(&s.hamiltonian, &s.initial, &footpoints[i], times[k], &opts))
        .collect::<Result<Vec<_>>>()?;

    let mut out = String::new();
    let mut header = axis_names("x0", d);
    header.push("t".into());
    header.extend(axis_names("x_hat", d));
    header.extend(axis_names("xi_hat", d));
    header.extend(["S", "J", "status", "t_event"].map(String::from));
    out.push_str(&header.join(","));
    out.push('\n');
    for (&(i, k), r) in jobs.iter().zip(&states) {
        let (status, t_event) = match &r.flow.status {
            FlowStatus::Ok => ("ok", String::new()),
            FlowStatus::BlownUp(ev) => ("blown_up", fmt_float(ev.t_event)),
        };
        let mut cells: Vec<String> = floats(&footpoints[i]).collect();
        cells.push(fmt_float(times[k]));
        cells.extend(floats(&r.flow.point.x));
        cells.extend(floats(&r.flow.point.xi));
        cells.push(fmt_float(r.s));
        cells.push(fmt_float(r.jacobian));
        cells.push(status.into());
        cells.push(t_event);
        push_row(&mut out, cells);
    }
    Ok(out)
}

fn density_csv(s: &Scenario, times: &[f64], nx: usize) -> Result<String> {
    if nx < 2 {
        return Err(Error::GridTooSmall(format!("nx = {nx}")));
    }
    let search = BranchSearch::for_scenario(s);
    let points = s.region.x.grid(nx);
    let jobs: Vec<(f64, &Vec<f64>)> = times
        .iter()
        .flat_map(|t| points.iter().map(move |x| (*t, x)))
        .collect();
    let sets = jobs
        .par_iter()
        .map(|(t, x)| search.find(x, *t))
        .collect::<Result<Vec<_>>>()?;

    let mut out = String::new();
    let mut header = axis_names("x", s.dim());
    header.extend(["t", "n", "N"].map(String::from));
    out.push_str(&header.join(","));
    out.push('\n');
    for ((t, x), set) in jobs.iter().zip(&sets) {
        // n is left blank on a caustic, where the regular density is undefined
        let n = if set.continuum || set.any_at_caustic() {
            String::new()
        } else {
            fmt_float(set.branches.iter().map(|b| b.n.unwrap_or(0.0)).sum())
        };
        let mut cells: Vec<String> = floats(x).collect();
        cells.push(fmt_float(*t));
        cells.push(n);
        cells.push(set.len().to_string());
        push_row(&mut out, cells);
    }
    Ok(out)
}

fn caustics_csv(s: &Scenario, grid: &CausticGrid) -> Result<String> {
    let points = BranchSearch::for_scenario(s).caustic_scan(grid)?;
    let d = s.dim();
    let mut out = String::new();
    let mut header = axis_names("x", d);
    header.push("t".into());
    header.extend(axis_names("x0", d));
    header.extend(["branch", "rays"].map(String::from));
    out.push_str(&header.join(","));
    out.push('\n');
    for p in &points {
        let mut cells: Vec<String> = floats(&p.x).collect();
        cells.push(fmt_float(p.t));
        cells.extend(floats(&p.x0));
        cells.push(p.branch.map(|b| b.to_string()).unwrap_or_default());
        cells.push(p.rays.to_string());
        push_row(&mut out, cells);
    }
    Ok(out)
}

fn fluid_csv(s: &Scenario, grid: SpaceTimeGrid, sigma: Option<&str>) -> Result<String> {
    let field = FluidField::from_branches(&BranchSearch::for_scenario(s), grid)?;
    let euler = euler_residual(&s.hamiltonian, &field)?;
    let cons = to_conservative(&s.hamiltonian, &field)?;
    let extra = sigma
        .map(|src| {
            let w = WeightFunction::parse(src)?;
            generalized_moment_residual(&s.hamiltonian, &field, &w)
        })
        .transpose()?;

    let mut out = String::from("x,t,r_mass,r_momentum,r_cons_mass,r_cons_momentum");
    if extra.is_some() {
        out.push_str(",r_sigma");
    }
    out.push('\n');
    let r = &euler.mass;
    for k in 0..r.nt {
        for i in 0..r.nx {
            let mut cells = vec![
                fmt_float(r.x[i]),
                fmt_float(r.t[k]),
                fmt_float(r.at(i, k)),
                fmt_float(euler.momentum.at(i, k)),
                fmt_float(cons.mass.at(i, k)),
                fmt_float(cons.momentum.at(i, k)),
            ];
            if let Some(e) = &extra {
                cells.push(fmt_float(e.at(i, k)));
            }
            push_row(&mut out, cells);
        }
    }
    Ok(out)
}

fn wigner_csv(
    s: &Scenario,
    eps: f64,
    t: f64,
    smooth: bool,
    rows: usize,
    cols: usize,
) -> Result<String> {
    if s.dim() != 1 {
        return Err(Error::Domain(
            "the wave-field solver is one-dimensional".into(),
        ));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("ε must be positive, got {eps}")));
    }
    let (a, b) = (s.region.x.lo[0], s.region.x.hi[0]);
    let pad = CompareOptions::default().padding * (b - a);
    let (lo, hi) = (a - pad, b + pad);
    let grid = PeriodicGrid::with_max_spacing(lo, hi, resolving_spacing(&s.initial, eps, lo, hi))?;
    let psi = evolve(&wkb_initial(&s.initial, eps, &grid)?, &s.hamiltonian, t)?;
    let stride = (grid.n / rows.max(1)).max(1);
    let mut ps = wigner_strided(&psi, stride);
    if smooth {
        ps = husimi(&ps);
    }

    let (xi_lo, xi_hi) = (s.xi_box.lo[0], s.xi_box.hi[0]);
    let in_box: Vec<usize> = (0..ps.xi.len())
        .filter(|&k| ps.xi[k] >= xi_lo && ps.xi[k] <= xi_hi)
        .collect();
    let xi_stride = (in_box.len() / cols.max(1)).max(1);
    let mut out = String::from("x,xi,w\n");
    for (i, x) in ps.x.iter().enumerate() {
        if *x < a || *x > b {
            continue;
        }
        for &k in in_box.iter().step_by(xi_stride) {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt_float(*x),
                fmt_float(ps.xi[k]),
                fmt_float(ps.at(i, k))
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> Result<Output> {
        let cli = Cli::try_parse_from(std::iter::once("caustica").chain(args.iter().copied()))
            .expect("arguments parse");
        execute(&cli)
    }

    #[test]
    fn numbers_accept_fractions_and_pi() {
        assert_eq!(parse_number("1/128").unwrap(), 1.0 / 128.0);
        assert_eq!(parse_number("pi/4").unwrap(), std::f64::consts::FRAC_PI_4);
        assert_eq!(parse_number("3pi/2").unwrap(), 1.5 * std::f64::consts::PI);
        assert_eq!(parse_number("-0.25").unwrap(), -0.25);
        assert!(parse_number("abc").is_err());
    }

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(fmt_float(f64::NAN), "nan");
    }

    #[test]
    fn density_matches_rarefaction() {
        let out = run_capture(&[
            "density",
            "--preset",
            "ex_1_1_rarefaction",
            "--t",
            "1",
            "--nx",
            "33",
        ])
        .unwrap();
        let mut lines = out.text.lines();
        assert_eq!(lines.next(), Some("x,t,n,N"));
        let mut rows = 0;
        for line in lines {
            let c: Vec<&str> = line.split(',').collect();
            let x: f64 = c[0].parse().unwrap();
            let n: f64 = c[2].parse().unwrap();
            let exact = (-(x / 2.0) * (x / 2.0)).exp() / std::f64::consts::PI.sqrt() / 2.0;
            assert!((n - exact).abs() < 1e-8, "x = {x}: {n} vs {exact}");
            assert_eq!(c[3], "1");
            rows += 1;
        }
        assert_eq!(rows, 33);
    }

    #[test]
    fn focus_preset_has_one_caustic_row() {
        let out = run_capture(&["caustics", "--preset", "ex_1_2_focus", "--nx", "41"]).unwrap();
        let rows: Vec<&str> = out.text.lines().skip(1).collect();
        assert_eq!(rows.len(), 1, "{}", out.text);
        let c: Vec<f64> = rows[0]
            .split(',')
            .take(2)
            .map(|v| v.parse().unwrap())
            .collect();
        assert!(c[0].abs() < 1e-6 && (c[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn airy_rays_report_blow_up() {
        let out = run_capture(&[
            "rays",
            "--preset",
            "appendix1_airy_k",
            "--t1",
            "0.6",
            "--nx",
            "5",
            "--nt",
            "3",
        ])
        .unwrap();
        let blown: Vec<&str> = out
            .text
            .lines()
            .filter(|l| l.contains("blown_up"))
            .collect();
        assert!(!blown.is_empty());
        for line in blown {
            let t_event: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert!((t_event - 0.5).abs() < 1e-6, "{line}");
        }
    }

    #[test]
    fn outputs_are_deterministic_across_thread_counts() {
        let a = run_capture(&[
            "rays",
            "--preset",
            "harmonic_k",
            "--nx",
            "9",
            "--threads",
            "1",
        ])
        .unwrap();
        let b = run_capture(&[
            "rays",
            "--preset",
            "harmonic_k",
            "--nx",
            "9",
            "--threads",
            "3",
        ])
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            run(["caustica", "validate", "--preset", "nope"]),
            EXIT_VALIDATION
        );
        assert_eq!(run(["caustica", "frobnicate"]), EXIT_VALIDATION);
        let out = run_capture(&["validate", "--preset", "appendix1_airy_k"]).unwrap();
        assert_eq!(out.code, EXIT_VALIDATION);
        let out = run_capture(&["validate", "--preset", "ex_1_1_rarefaction"]).unwrap();
        assert_eq!(out.code, EXIT_OK);
        let err = run_capture(&[
            "density",
            "--preset",
            "ex_1_2_focus",
            "--t",
            "1",
            "--nx",
            "3",
        ]);
        // x = 0 at t = 1 is the focus; the regular density is reported blank
        assert!(err
            .unwrap()
            .text
            .lines()
            .any(|l| l.split(',').nth(2) == Some("")));
        assert_eq!(
            exit_code(&Error::BlowUp {
                t_event: 0.5,
                diagnostic: String::new()
            }),
            EXIT_NUMERICAL
        );
    }
}
