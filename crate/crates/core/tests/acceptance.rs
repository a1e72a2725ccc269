//! End-to-end acceptance run: one line per criterion, nonzero exit if any
//! fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral_mirror::functional::{
    bangbang_j, rellich_residual, shape_derivative, standard_normalization, upper_bound, ModeTable,
};
use spectral_mirror::geometry::{boundary_mesh, critical_l, min_ell, DomainSpec};
use spectral_mirror::nogap::{
    critical_l_closed_form, disk_omega_n, lemma7_ratio, maximizing_sequence, rect_optimal_value, sector_lc,
    sector_optimal_value,
};
use spectral_mirror::optimizer::{brute_force_value, solve_table, solve_truncated, SolveOptions};
use spectral_mirror::specfun::{bessel_j, bessel_zeros};
use spectral_mirror::spectra::{cesaro_mean, modes};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rellich() -> Outcome {
    const POINTS: [[f64; 2]; 5] = [[0.0, 0.0], [0.3, -0.1], [0.5, 0.2], [-0.4, 0.25], [1.5, -1.0]];
    let cases = [
        (DomainSpec::rectangle(2.0, 1.0).unwrap(), 0.0, 1e-6),
        (DomainSpec::disk(1.0).unwrap(), 0.0, 1e-6),
        (DomainSpec::sector(PI / 4.0, 1.0).unwrap(), 0.5, 1e-5),
    ];
    let mut ok = true;
    let mut parts = vec![];
    for (d, shift, tol) in cases {
        let mesh = boundary_mesh(&d, 8192).unwrap();
        let list = modes(&d, 30).unwrap();
        let worst = POINTS
            .iter()
            .flat_map(|p| list.iter().map(|m| rellich_residual(&mesh, m, [p[0] + shift, p[1]]).abs()).collect::<Vec<_>>())
            .fold(0.0f64, f64::max);
        ok &= worst < tol;
        parts.push(format!("{d}: {worst:.1e}"));
    }
    check(ok, parts.join(", "))
}

fn thresholds() -> Outcome {
    let cases = [
        (DomainSpec::rectangle(1.0, 1.0).unwrap(), 1.0),
        (DomainSpec::rectangle(2.0, 1.0).unwrap(), 2.0 / 3.0),
        (DomainSpec::disk(1.0).unwrap(), 1.0),
        (DomainSpec::sector(PI / 4.0, 1.0).unwrap(), 2.0 * PI / (4.0 + PI)),
    ];
    let mut ok = true;
    let mut parts = vec![];
    for (d, want) in cases {
        let numeric = critical_l(&d);
        let closed = critical_l_closed_form(&d).unwrap();
        ok &= (numeric - want).abs() < 1e-4 && (closed - want).abs() < 1e-12;
        parts.push(format!("{d}: {numeric:.6} (closed {closed:.6}, delta {:.6})", min_ell(&d).delta));
    }
    check(ok, parts.join(", "))
}

fn disk_truncated() -> Outcome {
    let d = DomainSpec::disk(1.0).unwrap();
    let mesh = boundary_mesh(&d, 4096).unwrap();
    let mut ok = true;
    let mut parts = vec![];
    for n in [5, 10, 20] {
        let r = solve_truncated(&d, n, 0.3, 1.0, &mesh, &SolveOptions::default()).unwrap();
        let omega = bangbang_j(&d, &modes(&d, n).unwrap(), &disk_omega_n(n, 0.3).unwrap(), 1.0);
        let normalized = r.value * standard_normalization(&d);
        ok &= (r.value - 0.6).abs() < 1e-3 && (normalized - 0.3 * PI).abs() < 1e-3 * PI / 2.0;
        ok &= (omega - 0.6).abs() < 1e-8;
        parts.push(format!("N={n}: solver {:.9}, omega_N {omega:.12}", r.value));
    }
    check(ok, parts.join(", "))
}

fn rectangle() -> Outcome {
    let exact = (rect_optimal_value(1.0, 1.0, 0.2) - 0.8 / PI).abs() < 1e-15
        && (rect_optimal_value(2.0, 1.0, 0.8) - 2.0 / PI).abs() < 1e-15;
    let mut ok = exact;
    let mut parts = vec![format!("closed forms {}", if exact { "exact" } else { "wrong" })];
    for (alpha, beta, l) in [(1.0, 1.0, 0.2), (2.0, 1.0, 0.8)] {
        let d = DomainSpec::rectangle(alpha, beta).unwrap();
        let mesh = boundary_mesh(&d, 2048).unwrap();
        let all = modes(&d, 90).unwrap();
        let limit = rect_optimal_value(alpha, beta, l);
        let values: Vec<f64> = [20, 50, 90]
            .iter()
            .map(|&n| solve_table(&ModeTable::new(all[..n].to_vec(), &mesh), &mesh, l, 1.0, &SolveOptions::default()).unwrap().value)
            .collect();
        ok &= values.windows(2).all(|p| p[1] <= p[0] + 1e-9);
        ok &= values.iter().all(|v| *v >= limit - 5e-2);
        ok &= values[2] - limit < values[0] - limit;
        parts.push(format!(
            "{d} L={l}: {:.6} {:.6} {:.6} vs {limit:.6}",
            values[0], values[1], values[2]
        ));
    }
    check(ok, parts.join("; "))
}

fn sector() -> Outcome {
    let mut ok = true;
    let mut jump: f64 = 0.0;
    let mut off: f64 = 0.0;
    for theta in [0.3, 0.5, 0.7, PI / 4.0] {
        let lc = sector_lc(theta);
        let v = |l: f64| sector_optimal_value(theta, 1.0, l).unwrap();
        jump = jump.max((v(lc - 1e-13) - v(lc + 1e-13)).abs());
        jump = jump.max((v(lc) - v(lc + 1e-13)).abs());
        // no closed form continues below -L^c
        jump = jump.max((v(-lc) - v(-lc + 1e-13)).abs());
        ok &= sector_optimal_value(theta, 1.0, -lc - 1e-9).is_err();
        let d = DomainSpec::sector(theta, 1.0).unwrap();
        for i in 0..=40 {
            let l = -lc + 2.0 * lc * i as f64 / 40.0;
            off = off.max((v(l) - upper_bound(&d, l, 1.0)).abs());
        }
    }
    // the probes sit 1e-13 apart in L, so a continuous value moves by at
    // most k * 1e-13 between them
    ok &= jump < 1e-11 && off < 1e-12;
    check(ok, format!("max jump at +-L^c {jump:.1e}, value kL on [-L^c, 1] (no closed form below -L^c), max deviation from the general bound {off:.1e}"))
}

fn cesaro() -> Outcome {
    let disk = DomainSpec::disk(1.0).unwrap();
    let mesh = boundary_mesh(&disk, 2048).unwrap();
    let d100 = cesaro_mean(&disk, 100, &mesh).unwrap().1;
    let d400 = cesaro_mean(&disk, 400, &mesh).unwrap().1;
    let square = DomainSpec::rectangle(1.0, 1.0).unwrap();
    let smesh = boundary_mesh(&square, 2048).unwrap();
    let s: Vec<f64> = [25, 100, 400].iter().map(|&n| cesaro_mean(&square, n, &smesh).unwrap().1).collect();
    let disk_ok = d400 < d100;
    let square_ok = s.windows(2).all(|p| p[1] < p[0]);
    let mut detail = format!(
        "disk {d100:.3e} (N=100) -> {d400:.3e} (N=400); square {:.6} -> {:.6} -> {:.6}",
        s[0], s[1], s[2]
    );
    if !disk_ok {
        detail.push_str(&format!(
            "; on the disk complete cos/sin pairs average to exactly 1/pi, so N=100 (all pairs complete) sits at \
             rounding level while N=400 splits a pair and leaves 1/(400 pi) = {:.3e}; no ordering of the \
             degenerate modes makes the deviation at 400 smaller",
            1.0 / (400.0 * PI)
        ));
    }
    check(disk_ok && square_ok, detail)
}

fn nogap() -> Outcome {
    let d = DomainSpec::disk(1.0).unwrap();
    let seq = maximizing_sequence(&d, 0.3, 10).unwrap();
    let j: Vec<f64> = seq.states.iter().map(|s| s.j_value).collect();
    let increasing = j.windows(2).all(|p| p[1] > p[0]);
    let gap0 = seq.target - j[0];
    let fractions: Vec<f64> = j.iter().map(|v| (seq.target - v) / gap0).collect();
    let mass = (0.3 + 1.0) * PI;
    let drift = seq.states.iter().map(|s| (s.gamma.measure() - mass).abs()).fold(0.0f64, f64::max);
    let below = fractions.iter().any(|f| *f < 0.2);
    let shown: Vec<String> = fractions.iter().map(|f| format!("{f:.3}")).collect();
    check(
        increasing && below && drift < 1e-12 && seq.states.len() <= 11,
        format!(
            "{} steps, gap fractions [{}], mass drift {drift:.1e}{}",
            seq.states.len() - 1,
            shown.join(", "),
            seq.stopped.as_ref().map(|s| format!(", stopped: {s}")).unwrap_or_default()
        ),
    )
}

fn oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let d = match rng.gen_range(0..3) {
            0 => DomainSpec::disk(rng.gen_range(0.5..2.0)).unwrap(),
            1 => DomainSpec::rectangle(rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)).unwrap(),
            _ => DomainSpec::sector(rng.gen_range(0.3..0.78), rng.gen_range(0.5..2.0)).unwrap(),
        };
        let mesh = boundary_mesh(&d, 8).unwrap();
        let table = ModeTable::new(modes(&d, rng.gen_range(1..=3)).unwrap(), &mesh);
        let (l, m) = (rng.gen_range(-0.9..0.9), rng.gen_range(0.5..2.0));
        let exact = brute_force_value(&table, &mesh, l, m).unwrap();
        let got = solve_table(&table, &mesh, l, m, &SolveOptions::default()).unwrap().value;
        worst = worst.max((got - exact).abs());
    }
    check(worst < 1e-6, format!("max |solver - enumeration| {worst:.1e} over 20 instances"))
}

fn j0_series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let (mut term, mut sum) = (1.0, 1.0);
    for m in 1..80 {
        term *= q / (m * m) as f64;
        sum += term;
    }
    sum
}

fn special() -> Outcome {
    let orders: Vec<f64> = (0..=20)
        .map(f64::from)
        .chain((1..=6).map(|n| n as f64 * PI / (2.0 * 0.7)))
        .chain([0.25, 1.5, 2.5, 7.3])
        .collect();
    let mut worst: f64 = 0.0;
    for &nu in &orders {
        for z in bessel_zeros(nu, 20).unwrap() {
            worst = worst.max(bessel_j(nu, z).abs());
        }
    }
    let (mut lo, mut hi) = (2.0, 3.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if j0_series(lo) * j0_series(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let z01 = (bessel_zeros(0.0, 1).unwrap()[0] - 0.5 * (lo + hi)).abs();
    let half = bessel_zeros(0.5, 20)
        .unwrap()
        .iter()
        .enumerate()
        .map(|(k, z)| (z - (k + 1) as f64 * PI).abs())
        .fold(0.0f64, f64::max);
    check(
        worst < 1e-10 && z01 < 1e-9 && half < 1e-10,
        format!("max |J(z)| {worst:.1e} over {} orders, z01 {z01:.1e}, half order {half:.1e}", orders.len()),
    )
}

fn shape() -> Outcome {
    let mut rel: f64 = 0.0;
    for d in [DomainSpec::rectangle(1.3, 0.8).unwrap(), DomainSpec::disk(1.2).unwrap()] {
        let mesh = boundary_mesh(&d, 8192).unwrap();
        let x0 = [0.21, -0.13];
        let v = mesh.map(|p| (p.position[0] - x0[0]) * p.normal[0] + (p.position[1] - x0[1]) * p.normal[1]);
        for m in modes(&d, 20).unwrap() {
            rel = rel.max((shape_derivative(&mesh, &m, &v).unwrap() + 2.0 * m.lambda).abs() / m.lambda);
        }
    }
    let d = DomainSpec::disk(1.0).unwrap();
    let mesh = boundary_mesh(&d, 4096).unwrap();
    let list = modes(&d, 50).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut lowest = f64::INFINITY;
    for _ in 0..50 {
        let coeffs: Vec<(f64, f64, f64)> = (1..=12)
            .map(|k| (k as f64, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let v = mesh.map(|p| {
            let t = p.position[1].atan2(p.position[0]);
            coeffs.iter().map(|(k, a, b)| a * (k * t).cos() + b * (k * t).sin()).sum()
        });
        let best = list
            .iter()
            .map(|m| shape_derivative(&mesh, m, &v).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        lowest = lowest.min(best);
    }
    check(
        rel < 1e-6 && lowest >= -1e-8,
        format!("dilation relative error {rel:.1e}, lowest max-derivative over 50 fields {lowest:.3e}"),
    )
}

fn lemma7() -> Outcome {
    let fixed = (1..=100)
        .map(|i| (lemma7_ratio(|_| 1.0, i as f64 / 101.0) - 1.0).abs())
        .fold(0.0f64, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let grid: Vec<f64> = (1..200).map(|i| i as f64 / 200.0).chain([0.999, 0.9999]).collect();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..500 {
        let terms: Vec<(f64, f64)> = (0..rng.gen_range(1..=6))
            .map(|_| {
                let k = rng.gen_range(1..=8) as f64;
                (k, rng.gen_range(-1.0..1.0) / k)
            })
            .collect();
        let a = |u: f64| 1.0 + terms.iter().map(|(k, c)| c * (k * PI * u).cos()).sum::<f64>();
        let inf = grid.iter().map(|&s| lemma7_ratio(a, s)).fold(f64::INFINITY, f64::min);
        worst = worst.max(inf);
    }
    check(
        fixed < 1e-10 && worst <= 1.0 + 1e-6,
        format!("constant density off by {fixed:.1e}, largest inf over 500 perturbations {worst:.9}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 11] = [
        ("Rellich identity", Duration::from_secs(30), rellich),
        ("critical thresholds", Duration::from_secs(5), thresholds),
        ("disk truncated optimum", Duration::from_secs(60), disk_truncated),
        ("rectangle closed forms", Duration::from_secs(300), rectangle),
        ("sector values", Duration::from_secs(60), sector),
        ("Cesaro convergence", Duration::from_secs(60), cesaro),
        ("no-gap sequence", Duration::from_secs(60), nogap),
        ("oracle equivalence", Duration::from_secs(10), oracle),
        ("special functions", Duration::from_secs(60), special),
        ("shape derivative", Duration::from_secs(60), shape),
        ("perturbations of the constant density", Duration::from_secs(60), lemma7),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if took <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over the {budget:?} budget")),
            Err(d) => (false, d),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {:2} {} {name} ({:.2}s): {detail}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
