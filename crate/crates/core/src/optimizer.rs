//! The truncated design problem: maximize `min_{j <= N} mu_j(a)` over
//! `|a| <= M` with prescribed mass `L M |dOmega|`.
//!
//! The dual is minimized over the simplex by entropic mirror descent, the
//! inner maximization being a closed-form bathtub. Averaged iterates give an
//! O(1/sqrt(T)) gap, too loose for vertex-level answers, so by default the
//! discretized problem is then finished by a bounded simplex warm-started
//! from the best dual iterate. Its row duals give the multipliers and level.

use serde::Serialize;

use crate::functional::{ArcSet, Density, ModeTable};
use crate::geometry::{BoundaryMesh, DomainSpec};
use crate::lp::Lp;
use crate::spectra::modes;
use crate::{Error, Result};

/// Multipliers on the simplex `Pi_N`.
#[derive(Clone, Debug, Serialize)]
pub struct SimplexWeights {
    pub beta: Vec<f64>,
}

impl SimplexWeights {
    fn normalized(mut beta: Vec<f64>) -> Self {
        for b in beta.iter_mut() {
            *b = b.max(0.0);
        }
        let s: f64 = beta.iter().sum();
        if s > 0.0 {
            for b in beta.iter_mut() {
                *b /= s;
            }
        } else {
            let n = beta.len() as f64;
            beta.iter_mut().for_each(|b| *b = 1.0 / n);
        }
        SimplexWeights { beta }
    }
}

/// Nodal switching function `phi = sum_j beta_j T_j` and its level.
#[derive(Clone, Debug, Serialize)]
pub struct SwitchingProfile {
    pub phi: Vec<f64>,
    pub level: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveResult {
    pub value: f64,
    pub density: Density,
    pub weights: SimplexWeights,
    pub switching: SwitchingProfile,
    pub bangbang_fraction: f64,
    pub duality_gap: f64,
    pub iterations: usize,
    /// Set when the gap is still above tolerance at the iteration cap.
    pub warning: Option<String>,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Gap tolerance; `None` means `1e-6 M |dOmega|`.
    pub tol: Option<f64>,
    pub max_iter: usize,
    /// Reserved; the solver is deterministic.
    pub seed: u64,
    /// Finish with the exact simplex after `warm_iter` mirror steps.
    pub polish: bool,
    pub warm_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: None,
            max_iter: 20_000,
            seed: 0,
            polish: true,
            warm_iter: 200,
        }
    }
}

/// Level-set maximizer of `int a phi`.
#[derive(Clone, Debug)]
pub struct Bathtub {
    pub density: Density,
    pub level: f64,
}

fn check_lm(l: f64, m: f64) -> Result<()> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::OutOfRange(format!("M = {m} must be positive")));
    }
    if !(l.abs() <= 1.0) {
        return Err(Error::OutOfRange(format!("|L| = {} exceeds 1", l.abs())));
    }
    Ok(())
}

fn descending(phi: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..phi.len()).collect();
    order.sort_by(|&i, &j| phi[j].total_cmp(&phi[i]).then(i.cmp(&j)));
    order
}

/// Maximizes `int a phi` subject to `|a| <= M` and mass `L M |dOmega|`.
///
/// Nodes whose `phi` agrees with the level to relative `1e-12` form the tie
/// set and share one fractional value.
pub fn bathtub_max(phi: &[f64], mesh: &BoundaryMesh, l: f64, m: f64) -> Result<Bathtub> {
    check_lm(l, m)?;
    if phi.len() != mesh.len() {
        return Err(Error::Mesh("profile and mesh sizes differ".into()));
    }
    let total: f64 = mesh.weights.iter().sum();
    let target = 0.5 * (l + 1.0) * total;
    let scale = phi.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let tie = 1e-12 * scale;
    let order = descending(phi);
    let mut values = vec![-m; phi.len()];
    let mut level = phi[order[phi.len() - 1]];
    let mut filled = 0.0;
    let mut start = 0;
    while start < order.len() {
        let lead = phi[order[start]];
        let mut end = start;
        let mut group = 0.0;
        while end < order.len() && lead - phi[order[end]] <= tie {
            group += mesh.weights[order[end]];
            end += 1;
        }
        if filled + group <= target * (1.0 + 1e-15) {
            for &i in &order[start..end] {
                values[i] = m;
            }
            filled += group;
            start = end;
            continue;
        }
        let frac = ((target - filled) / group).clamp(0.0, 1.0);
        for &i in &order[start..end] {
            values[i] = m * (2.0 * frac - 1.0);
        }
        level = lead;
        break;
    }
    if start >= order.len() {
        level = phi[order[order.len() - 1]];
    }
    let mut density = Density::new(mesh, values, m);
    density.l = l;
    Ok(Bathtub { density, level })
}

/// Bathtub with ties broken node by node, so at most one node is fractional.
fn vertex_bathtub(phi: &[f64], weights: &[f64], l: f64, m: f64) -> (Vec<f64>, usize) {
    let total: f64 = weights.iter().sum();
    let target = 0.5 * (l + 1.0) * total;
    let order = descending(phi);
    let mut values = vec![-m; phi.len()];
    let mut filled = 0.0;
    for &i in &order {
        let w = weights[i];
        if filled + w <= target {
            values[i] = m;
            filled += w;
        } else {
            let frac = ((target - filled) / w).clamp(0.0, 1.0);
            values[i] = m * (2.0 * frac - 1.0);
            return (values, i);
        }
    }
    let last = *order.last().unwrap();
    (values, last)
}

fn dot(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    a.iter().zip(b).zip(w).map(|((x, y), w)| x * y * w).sum()
}

/// Solves the truncated problem on the first `n` modes of `domain`.
pub fn solve_truncated(
    domain: &DomainSpec,
    n: usize,
    l: f64,
    m: f64,
    mesh: &BoundaryMesh,
    options: &SolveOptions,
) -> Result<SolveResult> {
    if n == 0 {
        return Err(Error::OutOfRange("N must be at least 1".into()));
    }
    if mesh.domain != *domain {
        return Err(Error::Mesh("mesh was built for another domain".into()));
    }
    let table = ModeTable::new(modes(domain, n)?, mesh);
    solve_table(&table, mesh, l, m, options)
}

/// [`solve_truncated`] on precomputed traces.
pub fn solve_table(
    table: &ModeTable,
    mesh: &BoundaryMesh,
    l: f64,
    m: f64,
    options: &SolveOptions,
) -> Result<SolveResult> {
    check_lm(l, m)?;
    let n = table.len();
    if n == 0 {
        return Err(Error::OutOfRange("N must be at least 1".into()));
    }
    let w = &mesh.weights;
    let tol = options.tol.unwrap_or(1e-6 * m * mesh.perimeter);

    if l.abs() == 1.0 {
        let density = Density::constant(mesh, l * m, m);
        let energies = table.energies(&density.values);
        let (jmin, value) = argmin(&energies);
        let mut beta = vec![0.0; n];
        beta[jmin] = 1.0;
        let phi = table.combine(&beta);
        let level = if l > 0.0 {
            phi.iter().cloned().fold(f64::INFINITY, f64::min)
        } else {
            phi.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        };
        return Ok(finish(
            table,
            mesh,
            density,
            value,
            SimplexWeights { beta },
            phi,
            level,
            0.0,
            0,
            None,
        ));
    }

    // Mirror descent on the dual.
    let gmax = table
        .rows
        .iter()
        .map(|row| m * row.iter().zip(w).map(|(t, w)| (t * w).abs()).sum::<f64>())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let budget = if options.polish {
        options.max_iter.min(options.warm_iter)
    } else {
        options.max_iter
    };
    let ln_n = (n as f64).ln();
    let mut beta = vec![1.0 / n as f64; n];
    let mut best_dual = (f64::INFINITY, beta.clone());
    let mut best_primal: (f64, Vec<f64>) = (f64::NEG_INFINITY, vec![]);
    let mut sum_a = vec![0.0; w.len()];
    let mut sum_beta = vec![0.0; n];
    let mut iterations = 0;
    for t in 1..=budget.max(1) {
        iterations = t;
        let phi = table.combine(&beta);
        let bt = bathtub_max(&phi, mesh, l, m)?;
        let a = &bt.density.values;
        let g = dot(a, &phi, w);
        if g < best_dual.0 {
            best_dual = (g, beta.clone());
        }
        let grad = table.energies(a);
        for (s, v) in sum_a.iter_mut().zip(a) {
            *s += v;
        }
        for (s, b) in sum_beta.iter_mut().zip(&beta) {
            *s += b;
        }
        let avg: Vec<f64> = sum_a.iter().map(|s| s / t as f64).collect();
        let j_avg = table.j_value(&avg);
        if j_avg > best_primal.0 {
            best_primal = (j_avg, avg);
        }
        let j_now = grad.iter().cloned().fold(f64::INFINITY, f64::min);
        if j_now > best_primal.0 {
            best_primal = (j_now, a.clone());
        }
        if best_dual.0 - best_primal.0 < tol {
            break;
        }
        let eta = (2.0 * ln_n / t as f64).sqrt() / gmax;
        let gmin = grad.iter().cloned().fold(f64::INFINITY, f64::min);
        for (b, g) in beta.iter_mut().zip(&grad) {
            *b *= (-eta * (g - gmin)).exp();
        }
        let s: f64 = beta.iter().sum();
        beta.iter_mut().for_each(|b| *b /= s);
    }
    // bathtub of the averaged multipliers is the other primal candidate
    let beta_avg = SimplexWeights::normalized(sum_beta).beta;
    let phi_avg = table.combine(&beta_avg);
    let bt_avg = bathtub_max(&phi_avg, mesh, l, m)?;
    let j_bt = table.j_value(&bt_avg.density.values);
    if j_bt > best_primal.0 {
        best_primal = (j_bt, bt_avg.density.values.clone());
    }
    let g_avg = dot(&bt_avg.density.values, &phi_avg, w);
    if g_avg < best_dual.0 {
        best_dual = (g_avg, beta_avg);
    }

    let gap = best_dual.0 - best_primal.0;
    if !options.polish {
        let beta = SimplexWeights::normalized(best_dual.1);
        let phi = table.combine(&beta.beta);
        let level = bathtub_max(&phi, mesh, l, m)?.level;
        let mut density = Density::new(mesh, best_primal.1, m);
        density.l = l;
        let warning = (gap >= tol).then(|| format!("duality gap {gap:.3e} above tolerance {tol:.3e}"));
        return Ok(finish(
            table,
            mesh,
            density,
            best_primal.0,
            beta,
            phi,
            level,
            gap,
            iterations,
            warning,
        ));
    }

    let (x, y, pivots) = polish(table, w, l, m, &best_dual.1)?;
    let mut values: Vec<f64> = x[..w.len()].iter().map(|v| v.clamp(-m, m)).collect();
    // put the rounding residue of the mass on the node farthest from its bounds
    let want = l * m * w.iter().sum::<f64>();
    let (k, _) = values
        .iter()
        .enumerate()
        .map(|(i, v)| (i, m - v.abs()))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let mass: f64 = values.iter().zip(w).map(|(v, w)| v * w).sum();
    if w[k] != 0.0 {
        values[k] = (values[k] + (want - mass) / w[k]).clamp(-m, m);
    }
    let beta = SimplexWeights::normalized(y[..n].iter().map(|v| -v).collect());
    let phi = table.combine(&beta.beta);
    let bt = bathtub_max(&phi, mesh, l, m)?;
    let dual = dot(&bt.density.values, &phi, w);
    let value = table.j_value(&values);
    let gap = (dual - value).max(0.0);
    let warning = (gap >= tol).then(|| format!("duality gap {gap:.3e} above tolerance {tol:.3e}"));
    let mut density = Density::new(mesh, values, m);
    density.l = l;
    Ok(finish(
        table,
        mesh,
        density,
        value,
        beta,
        phi,
        bt.level,
        gap,
        iterations + pivots,
        warning,
    ))
}

fn argmin(v: &[f64]) -> (usize, f64) {
    v.iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &x)| if x < acc.1 { (i, x) } else { acc })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    _table: &ModeTable,
    _mesh: &BoundaryMesh,
    density: Density,
    value: f64,
    weights: SimplexWeights,
    phi: Vec<f64>,
    level: f64,
    duality_gap: f64,
    iterations: usize,
    warning: Option<String>,
) -> SolveResult {
    let m = density.m;
    let sat = density
        .values
        .iter()
        .filter(|v| (v.abs() - m).abs() <= 1e-9 * m)
        .count();
    SolveResult {
        value,
        bangbang_fraction: sat as f64 / density.values.len() as f64,
        density,
        weights,
        switching: SwitchingProfile { phi, level },
        duality_gap,
        iterations,
        warning,
    }
}

/// Exact simplex on `max t` s.t. `mu_j(a) - t - s_j = 0`, mass, `|a| <= M`.
fn polish(table: &ModeTable, w: &[f64], l: f64, m: f64, beta: &[f64]) -> Result<(Vec<f64>, Vec<f64>, usize)> {
    let (nodes, n) = (w.len(), table.len());
    let rows = n + 1;
    let cols = nodes + 1 + n;
    let t_col = nodes;
    let mut a = vec![0.0; rows * cols];
    for i in 0..nodes {
        for j in 0..n {
            a[i * rows + j] = w[i] * table.rows[j][i];
        }
        a[i * rows + n] = w[i];
    }
    for j in 0..n {
        a[t_col * rows + j] = -1.0;
        a[(t_col + 1 + j) * rows + j] = -1.0;
    }
    let mut c = vec![0.0; cols];
    c[t_col] = 1.0;
    let mut b = vec![0.0; rows];
    b[n] = l * m * w.iter().sum::<f64>();
    let mut lower = vec![-m; cols];
    let mut upper = vec![m; cols];
    lower[t_col] = f64::NEG_INFINITY;
    upper[t_col] = f64::INFINITY;
    for j in 0..n {
        lower[t_col + 1 + j] = 0.0;
        upper[t_col + 1 + j] = f64::INFINITY;
    }
    let lp = Lp { a, m: rows, c, b, lower, upper };

    let phi = table.combine(beta);
    let (start, frac) = vertex_bathtub(&phi, w, l, m);
    let (jstar, _) = argmin(&table.energies(&start));
    let mut x = vec![0.0; cols];
    x[..nodes].copy_from_slice(&start);
    let mut basis = vec![t_col, frac];
    basis.extend((0..n).filter(|&j| j != jstar).map(|j| t_col + 1 + j));
    let sol = lp.solve(x, basis, 40 * (cols + rows) + 1000)?;
    Ok((sol.x, sol.y, sol.pivots))
}

/// Largest instance accepted by [`brute_force_value`].
pub const BRUTE_MAX_MODES: usize = 4;
pub const BRUTE_MAX_NODES: usize = 10;

/// Exact optimum of the discretized problem by vertex enumeration.
///
/// A vertex fixes `s >= 1` active mode constraints and `s` free coordinates,
/// the rest sitting at `+-M`.
pub fn brute_force_value(table: &ModeTable, mesh: &BoundaryMesh, l: f64, m: f64) -> Result<f64> {
    check_lm(l, m)?;
    let (n, nodes) = (table.len(), mesh.len());
    if n == 0 || n > BRUTE_MAX_MODES || nodes > BRUTE_MAX_NODES {
        return Err(Error::TooLarge(format!(
            "{n} modes on {nodes} nodes (limits {BRUTE_MAX_MODES}, {BRUTE_MAX_NODES})"
        )));
    }
    let w = &mesh.weights;
    if l.abs() == 1.0 {
        return Ok(table.j_value(&vec![l * m; nodes]));
    }
    let mass = l * m * w.iter().sum::<f64>();
    let mut best = f64::NEG_INFINITY;
    for s in 1..=n.min(nodes) {
        for active in subsets(n, s) {
            for free in subsets(nodes, s) {
                let fixed: Vec<usize> = (0..nodes).filter(|i| !free.contains(i)).collect();
                for signs in 0u32..(1 << fixed.len()) {
                    let mut a = vec![0.0; nodes];
                    for (bit, &i) in fixed.iter().enumerate() {
                        a[i] = if signs >> bit & 1 == 1 { m } else { -m };
                    }
                    // unknowns: a_free (s), t; rows: active modes, mass
                    let dim = s + 1;
                    let mut mat = vec![vec![0.0; dim + 1]; dim];
                    for (r, &j) in active.iter().enumerate() {
                        for (cix, &i) in free.iter().enumerate() {
                            mat[r][cix] = w[i] * table.rows[j][i];
                        }
                        mat[r][s] = -1.0;
                        mat[r][dim] = -fixed.iter().map(|&i| w[i] * table.rows[j][i] * a[i]).sum::<f64>();
                    }
                    for (cix, &i) in free.iter().enumerate() {
                        mat[s][cix] = w[i];
                    }
                    mat[s][dim] = mass - fixed.iter().map(|&i| w[i] * a[i]).sum::<f64>();
                    let Some(sol) = gauss(mat) else { continue };
                    if sol[..s].iter().any(|v| v.abs() > m * (1.0 + 1e-10)) {
                        continue;
                    }
                    for (cix, &i) in free.iter().enumerate() {
                        a[i] = sol[cix].clamp(-m, m);
                    }
                    let t = sol[s];
                    let j = table.j_value(&a);
                    if j >= t - 1e-10 * m.max(t.abs()) && j > best {
                        best = j;
                    }
                }
            }
        }
    }
    Ok(best)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur = vec![];
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Solves a small augmented system; `None` when (nearly) singular.
fn gauss(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = a.len();
    let scale = a.iter().flat_map(|r| r[..n].iter()).fold(0.0f64, |s, v| s.max(v.abs()));
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(p, k);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for c in k..=n {
                a[i][c] -= f * a[k][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|c| a[k][c] * x[c]).sum();
        x[k] = (a[k][n] - s) / a[k][k];
    }
    Some(x)
}

/// Arcs where `phi > level + tol`, merged over mesh cells.
///
/// A lone node at the level is a sign change of `phi - level` and contributes
/// the part of its cell given by its fractional density, next to the side
/// above the level. Runs of two or more such nodes are a plateau; the flag is
/// false when plateaus cover more than 1% of the boundary.
pub fn extract_bangbang(result: &SolveResult, mesh: &BoundaryMesh, tol: f64) -> (ArcSet, bool) {
    let phi = &result.switching.phi;
    let level = result.switching.level;
    let n = phi.len();
    let tie: Vec<bool> = phi.iter().map(|p| (p - level).abs() <= tol).collect();
    let above = |i: usize| phi[i] > level + tol;
    // the boundary is one closed loop in node order
    let neighbour = |i: usize, d: isize| (i as isize + d).rem_euclid(n as isize) as usize;
    let m = result.density.m;
    let mut raw = vec![];
    let mut plateau = 0.0;
    for (i, cell) in mesh.cells.iter().enumerate() {
        if above(i) {
            raw.push((cell[0], cell[1]));
            continue;
        }
        if !tie[i] {
            continue;
        }
        let (prev, next) = (neighbour(i, -1), neighbour(i, 1));
        let lone = n > 2 && !tie[prev] && !tie[next];
        let len = cell[1] - cell[0];
        if !lone {
            plateau += len;
            continue;
        }
        let f = ((result.density.values[i] + m) / (2.0 * m)).clamp(0.0, 1.0);
        if above(prev) {
            raw.push((cell[0], cell[0] + f * len));
        } else if above(next) {
            raw.push((cell[1] - f * len, cell[1]));
        } else {
            let mid = 0.5 * (cell[0] + cell[1]);
            raw.push((mid - 0.5 * f * len, mid + 0.5 * f * len));
        }
    }
    (ArcSet::new(&raw, mesh.perimeter), plateau <= 0.01 * mesh.perimeter)
}

/// Default tie tolerance for [`extract_bangbang`]: `1e-9` of the peak of `phi`.
pub fn default_tie_tol(result: &SolveResult) -> f64 {
    1e-9 * result.switching.phi.iter().fold(0.0f64, |s, v| s.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::boundary_mesh;

    fn disk_mesh(n: usize) -> BoundaryMesh {
        boundary_mesh(&DomainSpec::disk(1.0).unwrap(), n).unwrap()
    }

    #[test]
    fn bathtub_monotone_profile_median() {
        let mesh = disk_mesh(8);
        let phi: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let bt = bathtub_max(&phi, &mesh, 0.0, 1.0).unwrap();
        assert_eq!(bt.density.values, vec![-1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(bt.level, 3.0);
    }

    #[test]
    fn bathtub_constant_profile_is_constant() {
        let mesh = disk_mesh(16);
        let bt = bathtub_max(&vec![2.5; 16], &mesh, 0.3, 2.0).unwrap();
        assert!(bt.density.values.iter().all(|v| (v - 0.6).abs() < 1e-14));
    }

    #[test]
    fn bathtub_rejects_infeasible_mass() {
        assert!(bathtub_max(&[0.0; 8], &disk_mesh(8), 1.2, 1.0).is_err());
    }

    #[test]
    fn disk_value_is_twice_l() {
        let domain = DomainSpec::disk(1.0).unwrap();
        let mesh = boundary_mesh(&domain, 512).unwrap();
        let r = solve_truncated(&domain, 5, 0.3, 1.0, &mesh, &SolveOptions::default()).unwrap();
        assert!((r.value - 0.6).abs() < 1e-9, "{}", r.value);
        assert!(r.duality_gap < 1e-9);
        assert!(!extract_bangbang(&r, &mesh, default_tie_tol(&r)).1);
    }

    #[test]
    fn single_mode_is_a_bathtub() {
        let domain = DomainSpec::rectangle(1.5, 1.0).unwrap();
        let mesh = boundary_mesh(&domain, 200).unwrap();
        let table = ModeTable::new(modes(&domain, 1).unwrap(), &mesh);
        let r = solve_table(&table, &mesh, -0.2, 1.0, &SolveOptions::default()).unwrap();
        let bt = bathtub_max(&table.rows[0], &mesh, -0.2, 1.0).unwrap();
        assert!((r.value - table.j_value(&bt.density.values)).abs() < 1e-12);
    }

    #[test]
    fn forced_constant_at_unit_ratio() {
        let domain = DomainSpec::rectangle(1.0, 1.0).unwrap();
        let mesh = boundary_mesh(&domain, 8).unwrap();
        let table = ModeTable::new(modes(&domain, 3).unwrap(), &mesh);
        let r = solve_table(&table, &mesh, 1.0, 1.0, &SolveOptions::default()).unwrap();
        let bf = brute_force_value(&table, &mesh, 1.0, 1.0).unwrap();
        assert!((r.value - bf).abs() < 1e-12);
        assert!(r.density.values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn brute_force_refuses_large() {
        let domain = DomainSpec::disk(1.0).unwrap();
        let mesh = disk_mesh(12);
        let table = ModeTable::new(modes(&domain, 2).unwrap(), &mesh);
        assert!(matches!(brute_force_value(&table, &mesh, 0.0, 1.0), Err(Error::TooLarge(_))));
    }
}
