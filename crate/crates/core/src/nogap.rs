//! Closed-form optima and explicit constructions: equidistributed arcs on the
//! disk, the rectangle and sector optimal values, the `F_s` family behind the
//! sector bound, and the homogenization sequence `Γ_k` on the disk.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::functional::{ArcSet, Density};
use crate::geometry::{BoundaryMesh, DomainSpec};
use crate::quad::integrate;
use crate::specfun::{bessel_j, bessel_j_prime, bessel_zero};
use crate::{Error, Result};

/// Number of arcs used by [`disk_omega_n`]: the smallest odd integer above
/// `n`, so that `p` never divides `2k` for `k <= n`.
pub fn omega_arc_count(n: usize) -> usize {
    if n % 2 == 0 {
        n + 1
    } else {
        n + 2
    }
}

/// `p` evenly spaced arcs of the unit circle, of total length `(L + 1) pi`,
/// on which `int cos(2 k theta)` vanishes for `1 <= k <= n`.
pub fn disk_omega_n(n: usize, l: f64) -> Result<ArcSet> {
    if n == 0 {
        return Err(Error::OutOfRange("N must be at least 1".into()));
    }
    if !(-1.0..1.0).contains(&l) {
        return Err(Error::OutOfRange(format!("L = {l} outside [-1, 1)")));
    }
    let p = omega_arc_count(n);
    let half = 0.5 * (l + 1.0) * PI / p as f64;
    let raw: Vec<(f64, f64)> = (0..p)
        .map(|i| {
            let c = 2.0 * PI * i as f64 / p as f64;
            (c - half, c + half)
        })
        .collect();
    Ok(ArcSet::new(&raw, 2.0 * PI))
}

/// Existence of an optimal set on the disk, with a witness when it exists.
#[derive(Clone, Debug, Serialize)]
pub struct DiskSolution {
    pub exists: bool,
    pub witness: Option<ArcSet>,
}

/// Optimal sets exist on the unit disk only for `L` in `{0, +-1/2, +-1}`.
///
/// Witnesses are unions of quadrants: with `a = 2 chi - 1`, the average of
/// `a` over the orbit `{theta, -theta, pi - theta, pi + theta}` must equal
/// `L`, so the set misses `2 - 2L` of the four quadrants' worth of each orbit.
pub fn disk_solution_exists(l: f64) -> DiskSolution {
    const TOL: f64 = 1e-12;
    let q = PI / 2.0;
    let witness = [
        (-1.0, vec![]),
        (-0.5, vec![(0.0, q)]),
        (0.0, vec![(0.0, 2.0 * q)]),
        (0.5, vec![(0.0, 3.0 * q)]),
        (1.0, vec![(0.0, 4.0 * q)]),
    ]
    .into_iter()
    .find(|(v, _)| (l - v).abs() <= TOL)
    .map(|(_, arcs)| ArcSet::new(&arcs, 2.0 * PI));
    DiskSolution {
        exists: witness.is_some(),
        witness,
    }
}

fn rect_lc(alpha: f64, beta: f64) -> f64 {
    2.0 * alpha.min(beta) / (alpha + beta)
}

/// `L^c` where a closed form is known: `2 min(alpha, beta) / (alpha + beta)`
/// on the rectangle, 1 on the disk, [`sector_lc`] on the sector.
pub fn critical_l_closed_form(domain: &DomainSpec) -> Option<f64> {
    match *domain {
        DomainSpec::Rectangle { alpha, beta } => Some(rect_lc(alpha, beta)),
        DomainSpec::Disk { .. } => Some(1.0),
        DomainSpec::Sector { theta1, .. } => Some(sector_lc(theta1)),
        DomainSpec::Ellipse { .. } => None,
    }
}

/// Optimal full-criterion value on `(0, alpha pi) x (0, beta pi)` with `M = 1`.
///
/// With `k = 2 (alpha + beta) / (pi alpha beta)`: `k L` for `|L| <= L^c`, the
/// plateau `k L^c` above, and `k (2 L + L^c)` below `-L^c`. The last branch
/// comes from the side-pair bound `min(t, T - t)`, where for negative mass
/// the short pair saturates at `-1` and caps `t` at `T + |short pair|`.
pub fn rect_optimal_value(alpha: f64, beta: f64, l: f64) -> f64 {
    let lc = rect_lc(alpha, beta);
    let k = 2.0 * (alpha + beta) / (PI * alpha * beta);
    if l.abs() <= lc {
        k * l
    } else if l > 0.0 {
        k * lc
    } else {
        k * (2.0 * l + lc)
    }
}

/// Admissible range of the parameter `u` of [`rect_maximizer`], or `None`
/// when `|L|` does not exceed the critical value.
pub fn rect_u_interval(alpha: f64, beta: f64, l: f64) -> Option<(f64, f64)> {
    if l.abs() <= rect_lc(alpha, beta) || l.abs() > 1.0 {
        return None;
    }
    let c = rect_side_level(alpha, beta, l);
    Some((2.0 - 1.0 / c, 1.0 / c))
}

fn rect_side_level(alpha: f64, beta: f64, l: f64) -> f64 {
    let (long, short) = if beta < alpha { (alpha, beta) } else { (beta, alpha) };
    (l.abs() * (alpha + beta) - short) / long
}

/// Side-wise constant maximizer beyond the critical value.
#[derive(Clone, Debug, Serialize)]
pub struct RectMaximizer {
    /// Values on sides 1..4 (right, top, left, bottom).
    pub sides: [f64; 4],
}

impl RectMaximizer {
    pub fn density(&self, mesh: &BoundaryMesh) -> Density {
        let values = mesh.points.iter().map(|p| self.sides[p.segment_id - 1]).collect();
        Density::new(mesh, values, 1.0)
    }
}

/// The one-parameter family of maximizers for `|L| > L^c` (`M = 1`): the
/// short sides saturate at `sgn L`, the long ones carry `u c` and `(2 - u) c`.
pub fn rect_maximizer(alpha: f64, beta: f64, l: f64, u: f64) -> Result<RectMaximizer> {
    let (lo, hi) = rect_u_interval(alpha, beta, l).ok_or_else(|| {
        Error::OutOfRange(format!("|L| = {} does not exceed the critical value", l.abs()))
    })?;
    if !(lo - 1e-12..=hi + 1e-12).contains(&u) {
        return Err(Error::OutOfRange(format!("u = {u} outside [{lo}, {hi}]")));
    }
    let s = l.signum();
    let c = rect_side_level(alpha, beta, l);
    let sides = if beta < alpha {
        [s, s * u * c, s, s * (2.0 - u) * c]
    } else {
        [s * u * c, s, s * (2.0 - u) * c, s]
    };
    Ok(RectMaximizer { sides })
}

/// Whether the bang-bang problem on the rectangle has a solution: `L` must lie
/// in both `{0, +-alpha/(alpha+beta), +-2 alpha/(alpha+beta), +-1}` and the
/// same set with `beta`.
pub fn rect_solution_exists(alpha: f64, beta: f64, l: f64) -> bool {
    let member = |side: f64| {
        let r = side / (alpha + beta);
        [0.0, r, 2.0 * r, 1.0].iter().any(|v| (l.abs() - v).abs() <= 1e-12)
    };
    member(alpha) && member(beta)
}

/// Closed-form critical ratio of the sector, `theta1 (1 + tan theta1) / ((1 + theta1) tan theta1)`
/// capped at 1; [`critical_l`] finds the same value numerically.
pub fn sector_lc(theta1: f64) -> f64 {
    let t = theta1.tan();
    (theta1 * (1.0 + t) / ((1.0 + theta1) * t)).min(1.0)
}

/// Optimal full-criterion value on the sector (`M = 1`), for `L >= -L^c`:
/// the general bound `L |dOmega| / |Omega|`.
///
/// Up to `L^c` a Rellich density attains it. Above `L^c` so does any density
/// constant on the arc and constant and nonnegative on the straight sides
/// (the constant `L` among them): Rellich's identity at the apex gives arc
/// energy `2 c / R` in every mode, and at `(d, 0)` gives side energy
/// `(2 / (R theta1)) w^2 / (w^2 - 1)`, `w = n pi / theta1`, with infimum
/// `2 / (R theta1)`. Below `-L^c` the optimum is set by the lowest angular
/// modes and has no closed form.
pub fn sector_optimal_value(theta1: f64, radius: f64, l: f64) -> Result<f64> {
    let domain = DomainSpec::sector(theta1, radius)?;
    if l.abs() > 1.0 {
        return Err(Error::OutOfRange(format!("|L| = {} exceeds 1", l.abs())));
    }
    if l < -sector_lc(theta1) {
        return Err(Error::Unsupported {
            op: "closed-form value below -L^c",
            kind: domain.kind(),
        });
    }
    Ok(l * domain.perimeter() / domain.area())
}

/// `F_s(x) = int_s^x du / (u^2 sqrt(u^2 - s^2)) = sqrt(x^2 - s^2) / (s^2 x)`.
pub fn sector_fs(s: f64, x: f64) -> f64 {
    (x * x - s * s).max(0.0).sqrt() / (s * s * x)
}

/// The probability density `f_s` on `(0, 1)`.
pub fn sector_fs_density(s: f64, u: f64) -> f64 {
    if u <= s || u >= 1.0 {
        return 0.0;
    }
    1.0 / (sector_fs(s, 1.0) * u * u * (u * u - s * s).sqrt())
}

/// `int_s^x a(u) du / (u^2 sqrt(u^2 - s^2))`, after `u = s / cos t`, which
/// turns the integrand into the smooth `a(s / cos t) cos t / s^2`.
pub fn sector_fs_integral<F: Fn(f64) -> f64>(a: F, s: f64, x: f64, tol: f64) -> f64 {
    let top = (s / x).clamp(-1.0, 1.0).acos();
    integrate(|t| a(s / t.cos()) * t.cos(), 0.0, top, tol) / (s * s)
}

/// `(1 / F_s(1)) int_s^1 a(u) du / (u^2 sqrt(u^2 - s^2))`; equal to 1 for `a = 1`.
pub fn lemma7_ratio<F: Fn(f64) -> f64>(a: F, s: f64) -> f64 {
    sector_fs_integral(a, s, 1.0, 1e-13) / sector_fs(s, 1.0)
}

/// Both sides of the tabulated integral of the sector side profile `Phi_{n,k}`.
#[derive(Clone, Debug, Serialize)]
pub struct LukeCheck {
    pub numeric: f64,
    pub tabulated: f64,
    /// The same integral at a hundredfold tighter tolerance.
    pub refined: f64,
}

/// Integrates `Phi_{n,k}(u) = (n^2 pi^2 / (2 z^2 theta1^2)) (J_mu(z u) / (u J'_mu(z)))^2`
/// over `(0, 1)`, with `mu = n pi / (2 theta1)` and `z` the `k`-th zero of
/// `J_mu`, next to the closed form `n^2 pi^2 / (n^2 pi^2 - theta1)`.
pub fn sector_luke_check(theta1: f64, n: usize, k: usize) -> Result<LukeCheck> {
    DomainSpec::sector(theta1, 1.0)?;
    if n == 0 || k == 0 {
        return Err(Error::OutOfRange("indices start at 1".into()));
    }
    let mu = n as f64 * PI / (2.0 * theta1);
    let z = bessel_zero(mu, k)?;
    let jp = bessel_j_prime(mu, z);
    let n2pi2 = (n as f64 * PI).powi(2);
    let pre = n2pi2 / (2.0 * z * z * theta1 * theta1);
    let phi = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let v = bessel_j(mu, z * u) / (u * jp);
        pre * v * v
    };
    Ok(LukeCheck {
        numeric: integrate(phi, 0.0, 1.0, 1e-11),
        tabulated: n2pi2 / (n2pi2 - theta1),
        refined: integrate(phi, 0.0, 1.0, 1e-13),
    })
}

/// One iterate of the homogenization sequence.
#[derive(Clone, Debug, Serialize)]
pub struct SequenceState {
    pub gamma: ArcSet,
    pub j_value: f64,
    pub iteration: usize,
    pub epsilon_used: f64,
    pub j0_used: usize,
    /// Angular grid size carrying every arc end.
    pub grid: usize,
}

fn disk_radius(domain: &DomainSpec) -> Result<f64> {
    match *domain {
        DomainSpec::Disk { radius } => Ok(radius),
        _ => Err(Error::Unsupported {
            op: "the homogenization sequence",
            kind: domain.kind(),
        }),
    }
}

/// `|int (2 chi - 1) cos(2 j theta) dtheta|` for `j = 1..=count`, arcs in angle.
#[cfg(test)]
fn cos_coefficients(arcs: &[(f64, f64)], count: usize) -> Vec<f64> {
    let ends: Vec<(f64, f64)> = arcs
        .iter()
        .flat_map(|&(a, b)| [(a, -1.0), (b, 1.0)])
        .collect();
    (1..=count)
        .map(|j| {
            let w = 2.0 * j as f64;
            (ends.iter().map(|(b, s)| s * (w * b).sin()).sum::<f64>() / j as f64).abs()
        })
        .collect()
}

/// Angular grid resolution beyond which a step gives up.
const GRID_CAP: usize = 1 << 22;
/// Cells per wavelength of the slowest well-approximated mode.
const CELLS_PER_MODE: f64 = 8.0;
/// Holes narrower than this many grid units force a finer grid.
const MIN_HOLE_UNITS: f64 = 2.0;
/// Relative spread of the cell lengths. Equal cells with centred holes form a
/// periodic pattern whose first harmonic is as large as the gap itself.
const CELL_JITTER: f64 = 0.7;

/// `Γ` sampled on `g` equal angular cells, `true` inside.
fn to_grid(gamma: &ArcSet, radius: f64, g: usize) -> Vec<bool> {
    let unit = 2.0 * PI * radius / g as f64;
    let mut cells = vec![false; g];
    for &(a, b) in &gamma.arcs {
        let (lo, hi) = ((a / unit).round() as usize, ((b / unit).round() as usize).min(g));
        cells[lo..hi].iter_mut().for_each(|c| *c = true);
    }
    cells
}

fn from_grid(cells: &[bool], radius: f64) -> ArcSet {
    let g = cells.len();
    let unit = 2.0 * PI * radius / g as f64;
    let mut arcs = vec![];
    let mut i = 0;
    while i < g {
        if cells[i] {
            let start = i;
            while i < g && cells[i] {
                i += 1;
            }
            arcs.push((start as f64 * unit, i as f64 * unit));
        } else {
            i += 1;
        }
    }
    ArcSet::new(&arcs, 2.0 * PI * radius)
}

/// `|int (2 chi - 1) cos(2 j theta) dtheta|` for `j = 1..=g/2`. Beyond `g/2`
/// the grid spectrum repeats with a larger divisor, so these bound every `j`.
fn grid_coefficients(cells: &[bool]) -> Vec<f64> {
    let g = cells.len();
    let h = 2.0 * PI / g as f64;
    let mut buf: Vec<Complex<f64>> = cells
        .iter()
        .map(|&c| Complex::new(if c { 1.0 } else { -1.0 }, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(g).process(&mut buf);
    // int over cell n = cos(2 j theta_n) sin(j h) / j, theta_n = (n + 1/2) h
    (1..=g / 2)
        .map(|j| {
            let x = buf[(2 * j) % g];
            let (s, c) = (j as f64 * h).sin_cos();
            // Re(e^{i j h} conj(x))
            ((c * x.re + s * x.im) * s / j as f64).abs()
        })
        .collect()
}

/// Exact `J_inf` of a grid set on the disk with `M = 1`, and its coefficients.
fn grid_j(cells: &[bool], radius: f64) -> (f64, Vec<f64>) {
    let coeffs = grid_coefficients(cells);
    let sup = coeffs.iter().cloned().fold(0.0, f64::max);
    let inside = cells.iter().filter(|c| **c).count() as f64;
    let mass = radius * 2.0 * PI * (2.0 * inside - cells.len() as f64) / cells.len() as f64;
    ((mass - radius * sup) / (PI * radius * radius), coeffs)
}

/// Swaps a centred run of each cell to the other side: `ε h_i` units out of
/// every cell of `Γ`, `ε l_i` units into every cell of the complement. Hole
/// lengths are rounded to the grid, then nudged one unit at a time until the
/// measure balances exactly. `None` if the grid cannot hold the holes.
fn perforate(cells: &[bool], l: f64, eps: f64, cell_units: f64) -> Option<Vec<bool>> {
    let g = cells.len();
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    // (start, length, inside)
    let mut parts: Vec<(usize, usize, bool)> = vec![];
    let mut q = 0usize;
    let mut i = 0;
    while i < g {
        let v = cells[i];
        let mut end = i;
        while end < g && cells[end] == v {
            end += 1;
        }
        let mut p = i;
        while p < end {
            let f = 1.0 - CELL_JITTER * (q as f64 * golden).fract();
            q += 1;
            let mut len = ((cell_units * f).round() as usize).max(1);
            if ((end - p) as f64) < 1.5 * len as f64 {
                len = end - p;
            }
            parts.push((p, len, v));
            p += len;
        }
        i = end;
    }
    let share = |v: bool| if v { 0.5 * (1.0 - l) } else { 0.5 * (1.0 + l) };
    let mut holes: Vec<usize> = parts
        .iter()
        .map(|&(_, len, v)| ((eps * share(v) * len as f64).round() as usize).min(len - 1))
        .collect();
    // units gained by Γ minus units lost
    let mut net: i64 = parts
        .iter()
        .zip(&holes)
        .map(|(&(_, _, v), &h)| if v { -(h as i64) } else { h as i64 })
        .sum();
    let mut k = 0;
    while net != 0 && k < 4 * parts.len() {
        let idx = k % parts.len();
        k += 1;
        let (_, len, v) = parts[idx];
        let h = &mut holes[idx];
        // net > 0: Γ grew, so cut more from Γ or add less to the complement
        let grow = (net > 0) == v;
        if grow && *h + 1 < len {
            *h += 1;
        } else if !grow && *h > 0 {
            *h -= 1;
        } else {
            continue;
        }
        net -= net.signum();
    }
    if net != 0 {
        return None;
    }
    let mut out = cells.to_vec();
    for (&(p, len, v), &h) in parts.iter().zip(&holes) {
        let start = p + len / 2 - h / 2;
        out[start..start + h].iter_mut().for_each(|c| *c = !v);
    }
    Some(out)
}

/// One perturbation step `Γ -> Γ^ε` on the disk (`M = 1`).
///
/// `Γ` and its complement are cut into cells fine enough for the modes up to
/// `j0`, the last mode whose energy sits more than a quarter of the gap below
/// `target`. Each cell of `Γ` loses a centred arc of length `ε h_i`, each cell
/// of the complement gains one of length `ε l_i`, with `h_i = |F_i| (1 - L)/2`
/// and `l_i = |F~_i| (1 + L)/2`, so the measure is unchanged. `ε` is the best
/// of `1, 1/2, 1/4, 1/8` and the proof's value `C1 min(C2, gap)`.
///
/// All arc ends live on a uniform angular grid of `state.grid` cells, which
/// is refined as the holes shrink; this makes `J` an exact finite maximum
/// over one FFT.
pub fn gamma_eps_step(state: &SequenceState, domain: &DomainSpec, l: f64, target: f64) -> Result<SequenceState> {
    step_with(state, domain, l, target, CELLS_PER_MODE)
}

fn step_with(state: &SequenceState, domain: &DomainSpec, l: f64, target: f64, fineness: f64) -> Result<SequenceState> {
    let radius = disk_radius(domain)?;
    let cells = to_grid(&state.gamma, radius, state.grid);
    let (current, coeffs) = grid_j(&cells, radius);
    let gap = target - current;
    if gap <= 1e-12 * target.abs().max(1.0) {
        return Ok(state.clone());
    }
    let sup = gap * PI * radius;
    let j0 = coeffs.iter().rposition(|c| *c > 0.25 * sup).map_or(1, |i| i + 1);
    let eta = PI / (fineness * j0 as f64);

    // proof constants on the disk: A^2 = sup of the normalised traces = 2/(pi R^2)
    let c1 = 1.0 / (8.0 * (2.0 / (PI * radius * radius)) * domain.perimeter());
    let proof_eps = (c1 * (1.0 / c1).min(gap)).min(1.0);
    let ladder = [1.0, 0.5, 0.25, 0.125, proof_eps];
    let thinnest = 0.5 * (1.0 - l.abs()) * (1.0 - CELL_JITTER);

    let tries: Vec<(f64, usize, Vec<bool>)> = ladder
        .par_iter()
        .filter_map(|&eps| {
            let mut g = state.grid;
            let mut grid = cells.clone();
            while eps * thinnest * eta / (2.0 * PI / g as f64) < MIN_HOLE_UNITS {
                if 2 * g > GRID_CAP {
                    return None;
                }
                g *= 2;
                grid = grid.iter().flat_map(|&c| [c, c]).collect();
            }
            let out = perforate(&grid, l, eps, eta / (2.0 * PI / g as f64))?;
            Some((eps, g, out))
        })
        .collect();
    let best = tries
        .into_par_iter()
        .map(|(eps, g, out)| (grid_j(&out, radius).0, eps, g, out))
        .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    let Some((j_value, epsilon_used, grid, out)) = best else {
        return Err(Error::Numeric(format!(
            "cells for mode {j0} need an angular grid finer than {GRID_CAP}"
        )));
    };
    Ok(SequenceState {
        gamma: from_grid(&out, radius),
        j_value,
        iteration: state.iteration + 1,
        epsilon_used,
        j0_used: j0,
        grid,
    })
}

/// Accepted iterates, starting from the single arc `(0, (L + 1) pi R)`, and
/// the reason the run ended early if it did.
#[derive(Clone, Debug, Serialize)]
pub struct Sequence {
    pub states: Vec<SequenceState>,
    pub target: f64,
    pub stopped: Option<String>,
}

impl Sequence {
    /// `iteration,j_value,arc_count,epsilon` rows.
    pub fn csv(&self) -> String {
        let mut out = String::from("iteration,j_value,arc_count,epsilon\n");
        for s in &self.states {
            out.push_str(&format!(
                "{},{:.16e},{},{:.16e}\n",
                s.iteration,
                s.j_value,
                s.gamma.arc_count(),
                s.epsilon_used
            ));
        }
        out
    }
}

/// Smallest grid (a multiple of 64 cells) on which the arc `(0, (L + 1) pi)`
/// ends exactly at a grid point.
fn initial_grid(l: f64) -> Result<usize> {
    let frac = 0.5 * (l + 1.0);
    (1..=GRID_CAP / 64)
        .map(|q| 64 * q)
        .find(|&g| {
            let units = frac * g as f64;
            (units - units.round()).abs() <= 1e-12 * g as f64
        })
        .ok_or_else(|| Error::OutOfRange(format!("(L + 1)/2 = {frac} has no grid of at most {GRID_CAP} cells")))
}

/// Runs [`gamma_eps_step`] towards `2 L / R` on the disk. A step that does not
/// raise the criterion is retried on cells twice as fine; three such steps in
/// a row, or a step needing a grid beyond the cap, end the run.
///
/// `(L + 1)/2` must be a fraction whose denominator divides a grid of at most
/// `2^21` cells, which covers every decimal `L` with up to four places.
pub fn maximizing_sequence(domain: &DomainSpec, l: f64, max_iter: usize) -> Result<Sequence> {
    let radius = disk_radius(domain)?;
    if !(l.abs() < 1.0) {
        return Err(Error::OutOfRange(format!("|L| = {} must be below 1", l.abs())));
    }
    let target = 2.0 * l / radius;
    let grid = initial_grid(l)?;
    let mut cells = vec![false; grid];
    let inside = (0.5 * (l + 1.0) * grid as f64).round() as usize;
    cells[..inside].iter_mut().for_each(|c| *c = true);
    let mut states = vec![SequenceState {
        gamma: from_grid(&cells, radius),
        j_value: grid_j(&cells, radius).0,
        iteration: 0,
        epsilon_used: 0.0,
        j0_used: 0,
        grid,
    }];
    let mut stalls = 0;
    let mut fineness = CELLS_PER_MODE;
    let mut stopped = None;
    while states.len() <= max_iter {
        let last = states.last().unwrap();
        if target - last.j_value <= 1e-12 * target.abs().max(1.0) {
            break;
        }
        let next = match step_with(last, domain, l, target, fineness) {
            Ok(next) => next,
            Err(e) => {
                stopped = Some(e.to_string());
                break;
            }
        };
        if next.j_value > last.j_value {
            states.push(next);
            stalls = 0;
            fineness = CELLS_PER_MODE;
        } else {
            stalls += 1;
            fineness *= 2.0;
            if stalls == 3 {
                stopped = Some(format!(
                    "no increase over 3 consecutive steps at J = {:.12}",
                    last.j_value
                ));
                break;
            }
        }
    }
    Ok(Sequence {
        states,
        target,
        stopped,
    })
}
