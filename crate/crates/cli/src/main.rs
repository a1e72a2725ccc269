mod output;

use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use spectral_mirror::functional::{rellich_residual, standard_normalization, upper_bound, ArcSet};
use spectral_mirror::geometry::{boundary_mesh, critical_l, min_ell, BoundaryMesh, DomainSpec};
use spectral_mirror::nogap::{self, maximizing_sequence};
use spectral_mirror::optimizer::{default_tie_tol, extract_bangbang, solve_truncated, SolveOptions};
use spectral_mirror::spectra::{cesaro_mean, modes};

use output::{arcs, num, nums};

#[derive(Parser)]
#[command(name = "spectral-mirror", version, about = "Worst-mode boundary Neumann energy on model planar domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    cfg: Config,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Maximise the truncated criterion over `-M <= a <= M` with mean `L M`.
    Solve,
    /// Check the Rellich identity for the first N modes at five centres.
    VerifyRellich,
    /// Critical mass ratio: numeric, closed form where known, and min ell.
    CriticalL,
    /// Build the maximizing sequence of arc sets on the disk.
    Nogap,
    /// Running mean of the first N normalised squared traces.
    Cesaro,
    /// Closed-form optimal values and existence of optimal sets.
    ClosedForm,
    /// Sector mode-energy integral against its tabulated value (N is n).
    LukeCheck {
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::VerifyRellich => "verify-rellich",
            Command::CriticalL => "critical-l",
            Command::Nogap => "nogap",
            Command::Cesaro => "cesaro",
            Command::ClosedForm => "closed-form",
            Command::LukeCheck { .. } => "luke-check",
        }
    }
}

#[derive(Args)]
struct Config {
    /// rect:ALPHA,BETA | disk:R | sector:THETA1,R | ellipse:A,B
    #[arg(long, global = true)]
    domain: Option<String>,
    /// Number of modes.
    #[arg(long = "N", global = true)]
    n: Option<usize>,
    /// Mass ratio in [-1, 1].
    #[arg(long = "L", global = true, allow_hyphen_values = true)]
    l: Option<f64>,
    /// Density bound.
    #[arg(long = "M", global = true, default_value_t = 1.0)]
    m: f64,
    /// Boundary mesh size.
    #[arg(long, global = true, default_value_t = 4096)]
    nodes: usize,
    /// Tolerance; for `solve` it is relative to `M |dOmega|`.
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
    /// Iteration cap (solve: 20000, nogap: 10).
    #[arg(long = "max-iter", global = true)]
    max_iter: Option<usize>,
    /// Directory receiving result.json and the command's other artifacts.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// What goes to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Exit with status 4 when the run ends with a warning.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
    Svg,
}

enum Fail {
    Usage(String),
    Numeric(String),
}

impl From<spectral_mirror::Error> for Fail {
    fn from(e: spectral_mirror::Error) -> Self {
        use spectral_mirror::Error::*;
        match e {
            InvalidDomain(_) | Mesh(_) | OutOfRange(_) | Unsupported { .. } => Fail::Usage(e.to_string()),
            _ => Fail::Numeric(e.to_string()),
        }
    }
}

type Run<T> = Result<T, Fail>;

#[derive(Default)]
struct Outcome {
    result: Value,
    warning: Option<String>,
    csv: Option<(&'static str, String)>,
    svg: Option<String>,
}

impl Config {
    fn domain(&self) -> Run<DomainSpec> {
        let s = self.domain.as_deref().ok_or_else(|| Fail::Usage("--domain is required".into()))?;
        Ok(s.parse()?)
    }

    fn n(&self) -> Run<usize> {
        self.n.ok_or_else(|| Fail::Usage("--N is required".into()))
    }

    fn l(&self) -> Run<f64> {
        self.l.ok_or_else(|| Fail::Usage("--L is required".into()))
    }

    fn mesh(&self, domain: &DomainSpec) -> Run<BoundaryMesh> {
        Ok(boundary_mesh(domain, self.nodes)?)
    }

    fn echo(&self) -> Value {
        json!({
            "domain": self.domain,
            "N": self.n,
            "L": self.l.map(num),
            "M": num(self.m),
            "nodes": self.nodes,
            "tol": num(self.tol),
            "max_iter": self.max_iter,
        })
    }
}

fn density_csv(mesh: &BoundaryMesh, columns: &[&str], values: &[&[f64]]) -> String {
    let mut header = vec!["arclength", "x", "y"];
    header.extend_from_slice(columns);
    output::csv(
        &header,
        mesh.points.iter().enumerate().map(|(i, p)| {
            let mut row = vec![p.arclength, p.position[0], p.position[1]];
            row.extend(values.iter().map(|v| v[i]));
            row
        }),
    )
}

fn solve(cfg: &Config) -> Run<Outcome> {
    let domain = cfg.domain()?;
    let (n, l, m) = (cfg.n()?, cfg.l()?, cfg.m);
    let mesh = cfg.mesh(&domain)?;
    let options = SolveOptions {
        tol: Some(cfg.tol * m * mesh.perimeter),
        max_iter: cfg.max_iter.unwrap_or(SolveOptions::default().max_iter),
        ..SolveOptions::default()
    };
    let r = solve_truncated(&domain, n, l, m, &mesh, &options)?;
    let (gamma, clean) = extract_bangbang(&r, &mesh, default_tie_tol(&r));
    let norm = standard_normalization(&domain);
    let result = json!({
        "value": { "raw": num(r.value), "normalized": num(r.value * norm), "normalization": num(norm) },
        "full_bound": num(upper_bound(&domain, l, m)),
        "duality_gap": num(r.duality_gap),
        "iterations": r.iterations,
        "beta": nums(&r.weights.beta),
        "level": num(r.switching.level),
        "bangbang": {
            "clean": clean,
            "fraction": num(r.bangbang_fraction),
            "measure": num(gamma.measure()),
            "arcs": arcs(&gamma),
        },
        "density": {
            "arclength": nums(&mesh.points.iter().map(|p| p.arclength).collect::<Vec<_>>()),
            "values": nums(&r.density.values),
        },
    });
    Ok(Outcome {
        result,
        warning: r.warning.clone(),
        csv: Some(("density.csv", density_csv(&mesh, &["density", "phi"], &[&r.density.values, &r.switching.phi]))),
        svg: Some(output::svg(&domain, &gamma, Some(&format!("N = {n}, L = {l}, M = {m}")))),
    })
}

/// Centres tried by `verify-rellich`, relative to the origin (the sector is
/// shifted into its interior).
const CENTRES: [[f64; 2]; 5] = [[0.0, 0.0], [0.3, -0.1], [0.5, 0.2], [-0.4, 0.25], [1.5, -1.0]];

fn verify_rellich(cfg: &Config) -> Run<Outcome> {
    let domain = cfg.domain()?;
    let n = cfg.n.unwrap_or(30);
    let mesh = cfg.mesh(&domain)?;
    let shift = match domain {
        DomainSpec::Sector { radius, .. } => 0.5 * radius,
        _ => 0.0,
    };
    let centres: Vec<[f64; 2]> = CENTRES.iter().map(|c| [c[0] + shift, c[1]]).collect();
    let mut rows = vec![];
    let mut csv = String::from("mode,lambda,max_residual\n");
    let mut worst: f64 = 0.0;
    for mode in modes(&domain, n)? {
        let r = centres
            .iter()
            .map(|&c| rellich_residual(&mesh, &mode, c).abs())
            .fold(0.0f64, f64::max);
        worst = worst.max(r);
        csv.push_str(&format!("\"{}\",{:.16e},{r:.16e}\n", mode.index, mode.lambda));
        rows.push(json!({ "mode": mode.index.to_string(), "lambda": num(mode.lambda), "max_residual": num(r) }));
    }
    let warning = (worst > cfg.tol).then(|| format!("max residual {worst:e} exceeds tol {:e}", cfg.tol));
    Ok(Outcome {
        result: json!({ "centres": centres.iter().map(|c| nums(c)).collect::<Vec<_>>(), "max_residual": num(worst), "modes": rows }),
        warning,
        csv: Some(("residuals.csv", csv)),
        svg: None,
    })
}

fn critical(cfg: &Config) -> Run<Outcome> {
    let domain = cfg.domain()?;
    let e = min_ell(&domain);
    let warning = (!e.converged).then(|| "min ell search hit its step floor".to_string());
    Ok(Outcome {
        result: json!({
            "numeric": num(critical_l(&domain)),
            "closed_form": nogap::critical_l_closed_form(&domain).map(num),
            "min_ell": { "x0": nums(&e.x0), "value": num(e.delta), "converged": e.converged },
        }),
        warning,
        ..Outcome::default()
    })
}

/// Largest arc count drawn in the sequence SVG; finer sets are replaced by
/// the last state under it.
const SVG_ARCS: usize = 4096;

fn sequence(cfg: &Config) -> Run<Outcome> {
    let domain = cfg.domain()?;
    let l = cfg.l()?;
    if cfg.m != 1.0 {
        return Err(Fail::Usage("nogap runs with M = 1".into()));
    }
    let seq = maximizing_sequence(&domain, l, cfg.max_iter.unwrap_or(10))?;
    let gap0 = seq.target - seq.states[0].j_value;
    let states: Vec<Value> = seq
        .states
        .iter()
        .map(|s| {
            json!({
                "iteration": s.iteration,
                "j_value": num(s.j_value),
                "gap_fraction": num((seq.target - s.j_value) / gap0),
                "arc_count": s.gamma.arc_count(),
                "measure": num(s.gamma.measure()),
                "epsilon": num(s.epsilon_used),
                "j0": s.j0_used,
                "grid": s.grid,
            })
        })
        .collect();
    let last = seq.states.last().expect("sequence starts with one state");
    let drawn = seq
        .states
        .iter()
        .rev()
        .find(|s| s.gamma.arc_count() <= SVG_ARCS)
        .unwrap_or(&seq.states[0]);
    let note = format!("iteration {} of {}, L = {l}", drawn.iteration, last.iteration);
    Ok(Outcome {
        result: json!({
            "target": num(seq.target),
            "states": states,
            "stopped": seq.stopped,
            "final_arcs": if last.gamma.arc_count() <= SVG_ARCS { arcs(&last.gamma) } else { Value::Null },
        }),
        warning: seq.stopped.clone(),
        csv: Some(("trajectory.csv", seq.csv())),
        svg: Some(output::svg(&domain, &drawn.gamma, Some(&note))),
    })
}

fn cesaro(cfg: &Config) -> Run<Outcome> {
    let domain = cfg.domain()?;
    let n = cfg.n()?;
    let mesh = cfg.mesh(&domain)?;
    let (mean, dev) = cesaro_mean(&domain, n, &mesh)?;
    Ok(Outcome {
        result: json!({ "deviation": num(dev), "target": num(1.0 / domain.area()) }),
        csv: Some(("density.csv", density_csv(&mesh, &["mean"], &[&mean]))),
        ..Outcome::default()
    })
}

fn closed_form(cfg: &Config) -> Run<Outcome> {
    let domain = cfg.domain()?;
    let (l, m) = (cfg.l()?, cfg.m);
    if !(-1.0..=1.0).contains(&l) {
        return Err(Fail::Usage(format!("L = {l} outside [-1, 1]")));
    }
    let norm = standard_normalization(&domain);
    let value = |v: f64| json!({ "raw": num(v * m), "normalized": num(v * m * norm) });
    let mut svg = None;
    let result = match domain {
        DomainSpec::Rectangle { alpha, beta } => {
            let u = nogap::rect_u_interval(alpha, beta, l);
            let sides = match u {
                Some((lo, hi)) => nums(&nogap::rect_maximizer(alpha, beta, l, 0.5 * (lo + hi))?.sides.map(|s| s * m)),
                None => Value::Null,
            };
            json!({
                "critical_l": num(2.0 * alpha.min(beta) / (alpha + beta)),
                "value": value(nogap::rect_optimal_value(alpha, beta, l)),
                "optimal_set_exists": nogap::rect_solution_exists(alpha, beta, l),
                "u_interval": u.map(|(a, b)| nums(&[a, b])),
                "maximizer_sides": sides,
            })
        }
        DomainSpec::Disk { radius } => {
            let exists = nogap::disk_solution_exists(l);
            let scale = |set: &ArcSet| ArcSet::new(&set.arcs.iter().map(|&(a, b)| (a * radius, b * radius)).collect::<Vec<_>>(), 2.0 * PI * radius);
            let witness = exists.witness.as_ref().map(scale);
            let omega = match cfg.n {
                Some(n) if l.abs() < 1.0 => Some(scale(&nogap::disk_omega_n(n, l)?)),
                _ => None,
            };
            if let Some(set) = omega.as_ref().or(witness.as_ref()) {
                svg = Some(output::svg(&domain, set, None));
            }
            json!({
                "critical_l": num(1.0),
                "value": value(2.0 * l / radius),
                "optimal_set_exists": exists.exists,
                "witness": witness.as_ref().map(arcs),
                "omega_n": omega.as_ref().map(arcs),
            })
        }
        DomainSpec::Sector { theta1, radius } => json!({
            "critical_l": num(nogap::sector_lc(theta1)),
            "value": value(nogap::sector_optimal_value(theta1, radius, l)?),
        }),
        DomainSpec::Ellipse { .. } => {
            return Err(Fail::Usage("no closed form is known on the ellipse".into()));
        }
    };
    Ok(Outcome { result, svg, ..Outcome::default() })
}

fn luke(cfg: &Config, k: usize) -> Run<Outcome> {
    let DomainSpec::Sector { theta1, .. } = cfg.domain()? else {
        return Err(Fail::Usage("luke-check needs a sector".into()));
    };
    let c = nogap::sector_luke_check(theta1, cfg.n.unwrap_or(1), k)?;
    Ok(Outcome {
        result: json!({
            "numeric": num(c.numeric),
            "tabulated": num(c.tabulated),
            "refined": num(c.refined),
            "relative_difference": num((c.numeric - c.tabulated) / c.tabulated),
        }),
        ..Outcome::default()
    })
}

fn run(cli: &Cli) -> Run<bool> {
    let cfg = &cli.cfg;
    let start = Instant::now();
    let out = match cli.command {
        Command::Solve => solve(cfg),
        Command::VerifyRellich => verify_rellich(cfg),
        Command::CriticalL => critical(cfg),
        Command::Nogap => sequence(cfg),
        Command::Cesaro => cesaro(cfg),
        Command::ClosedForm => closed_form(cfg),
        Command::LukeCheck { k } => luke(cfg, k),
    }?;
    let doc = json!({
        "schema": output::SCHEMA,
        "command": cli.command.name(),
        "config": cfg.echo(),
        "result": out.result,
        "warning": out.warning,
        "timing": { "seconds": num(start.elapsed().as_secs_f64()) },
    });
    let doc = output::json(&doc);
    let stdout = match cfg.format {
        Format::Json => Some(doc.clone()),
        Format::Csv => out.csv.as_ref().map(|(_, c)| c.clone()),
        Format::Svg => out.svg.clone(),
    };
    let Some(stdout) = stdout else {
        return Err(Fail::Usage(format!("{} has no {} output", cli.command.name(), match cfg.format {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        })));
    };
    if let Some(dir) = &cfg.output {
        let write = |name: &str, body: &str| {
            std::fs::write(dir.join(name), body).map_err(|e| Fail::Numeric(format!("writing {name}: {e}")))
        };
        std::fs::create_dir_all(dir).map_err(|e| Fail::Numeric(format!("creating {}: {e}", dir.display())))?;
        write("result.json", &doc)?;
        if let Some((name, body)) = &out.csv {
            write(name, body)?;
        }
        if let Some(body) = &out.svg {
            write("boundary.svg", body)?;
        }
    }
    let mut sink = std::io::stdout().lock();
    match sink.write_all(stdout.as_bytes()).and_then(|_| sink.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            return Err(Fail::Numeric(format!("writing stdout: {e}")));
        }
        _ => {}
    }
    if let Some(w) = &out.warning {
        eprintln!("warning: {w}");
    }
    Ok(out.warning.is_some())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("SPECTRAL_MIRROR_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli) {
        Ok(warned) if warned && cli.cfg.strict => ExitCode::from(4),
        Ok(_) => ExitCode::SUCCESS,
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Fail::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
