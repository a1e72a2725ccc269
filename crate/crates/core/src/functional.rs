//! Mode energies `mu_j(a)`, the truncated and full worst-mode criteria, Rellich
//! residuals, the randomized observability constant and shape derivatives.
//!
//! Values are raw: `mu_j(a) = (1/lambda_j) int a (d phi_j / d nu)^2`. On the
//! unit disk the customary normalisation drops a factor `2/pi`; see
//! [`standard_normalization`].

use std::f64::consts::PI;

use serde::Serialize;

use crate::geometry::{BoundaryMesh, DomainSpec, Vec2};
use crate::spectra::{trace_matrix, EigenMode};
use crate::{Error, Result};

/// Nodal boundary density with its bound `m` and mass ratio `l`.
#[derive(Clone, Debug, Serialize)]
pub struct Density {
    pub values: Vec<f64>,
    pub m: f64,
    pub l: f64,
}

impl Density {
    /// Wraps nodal values; `l` is read off the mass.
    pub fn new(mesh: &BoundaryMesh, values: Vec<f64>, m: f64) -> Self {
        let l = mesh.integrate(&values) / (m * mesh.perimeter);
        Density { values, m, l }
    }

    pub fn constant(mesh: &BoundaryMesh, value: f64, m: f64) -> Self {
        Density::new(mesh, vec![value; mesh.len()], m)
    }

    /// Checks `|a| <= M` and the mass `L M |dOmega|`.
    pub fn check(&self, mesh: &BoundaryMesh) -> Result<()> {
        if self.values.len() != mesh.len() {
            return Err(Error::Mesh("density and mesh sizes differ".into()));
        }
        if let Some(v) = self.values.iter().find(|v| v.abs() > self.m + 1e-12) {
            return Err(Error::OutOfRange(format!("density value {v} exceeds bound {}", self.m)));
        }
        let mass = mesh.integrate(&self.values);
        let want = self.l * self.m * mesh.perimeter;
        if (mass - want).abs() > 1e-8 * mesh.perimeter {
            return Err(Error::OutOfRange(format!("mass {mass} differs from {want}")));
        }
        Ok(())
    }
}

/// Disjoint boundary arcs as sorted arclength intervals in `[0, perimeter]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcSet {
    pub arcs: Vec<(f64, f64)>,
    pub perimeter: f64,
}

impl ArcSet {
    /// Normalises arbitrary intervals: wraps them onto the boundary, splits
    /// those crossing the origin and merges overlaps.
    pub fn new(raw: &[(f64, f64)], perimeter: f64) -> Self {
        let mut pieces = Vec::new();
        for &(a, b) in raw {
            let len = b - a;
            if len <= 0.0 {
                continue;
            }
            if len >= perimeter {
                pieces.push((0.0, perimeter));
                continue;
            }
            let s = a.rem_euclid(perimeter);
            let e = s + len;
            if e <= perimeter {
                pieces.push((s, e));
            } else {
                pieces.push((s, perimeter));
                pieces.push((0.0, e - perimeter));
            }
        }
        pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut arcs: Vec<(f64, f64)> = Vec::new();
        for (a, b) in pieces {
            match arcs.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => arcs.push((a, b)),
            }
        }
        ArcSet { arcs, perimeter }
    }

    pub fn empty(perimeter: f64) -> Self {
        ArcSet {
            arcs: Vec::new(),
            perimeter,
        }
    }

    pub fn full(perimeter: f64) -> Self {
        ArcSet {
            arcs: vec![(0.0, perimeter)],
            perimeter,
        }
    }

    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|(a, b)| b - a).sum()
    }

    pub fn complement(&self) -> ArcSet {
        let mut out = Vec::new();
        let mut cursor = 0.0;
        for &(a, b) in &self.arcs {
            if a > cursor {
                out.push((cursor, a));
            }
            cursor = b;
        }
        if cursor < self.perimeter {
            out.push((cursor, self.perimeter));
        }
        ArcSet {
            arcs: out,
            perimeter: self.perimeter,
        }
    }

    /// Number of arcs, counting two pieces glued across the origin as one.
    pub fn arc_count(&self) -> usize {
        let n = self.arcs.len();
        if n > 1 && self.arcs[0].0 == 0.0 && self.arcs[n - 1].1 == self.perimeter {
            n - 1
        } else {
            n
        }
    }

    /// Length of `[lo, hi] ∩ Γ`.
    pub fn overlap(&self, lo: f64, hi: f64) -> f64 {
        self.arcs
            .iter()
            .map(|&(a, b)| (b.min(hi) - a.max(lo)).max(0.0))
            .sum()
    }

    /// Bang-bang density `M (2 chi - 1)`, averaged over each mesh cell.
    pub fn density(&self, mesh: &BoundaryMesh, m: f64) -> Density {
        let values = mesh
            .cells
            .iter()
            .map(|c| m * (2.0 * self.overlap(c[0], c[1]) / (c[1] - c[0]) - 1.0))
            .collect();
        Density {
            values,
            m,
            l: 2.0 * self.measure() / self.perimeter - 1.0,
        }
    }

    /// Nodal indicator `chi_Γ`, averaged over each mesh cell.
    pub fn indicator(&self, mesh: &BoundaryMesh) -> Vec<f64> {
        mesh.cells
            .iter()
            .map(|c| self.overlap(c[0], c[1]) / (c[1] - c[0]))
            .collect()
    }
}

/// Factor turning raw values into the customary normalisation: `pi/2` on the
/// disk, 1 elsewhere.
pub fn standard_normalization(domain: &DomainSpec) -> f64 {
    match domain {
        DomainSpec::Disk { .. } => PI / 2.0,
        _ => 1.0,
    }
}

/// `2 L M |dOmega| / (2 |Omega|)`, the upper bound shared by every density
/// of mass ratio `l`.
pub fn upper_bound(domain: &DomainSpec, l: f64, m: f64) -> f64 {
    l * m * domain.perimeter() / domain.area()
}

/// Precomputed traces of a mode list on a mesh.
#[derive(Clone, Debug)]
pub struct ModeTable {
    pub modes: Vec<EigenMode>,
    pub rows: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl ModeTable {
    pub fn new(modes: Vec<EigenMode>, mesh: &BoundaryMesh) -> Self {
        let rows = trace_matrix(&modes, mesh);
        ModeTable {
            modes,
            rows,
            weights: mesh.weights.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// `mu_j(a)` for every mode, in mode order.
    pub fn energies(&self, a: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&self.weights)
                    .zip(a)
                    .map(|((t, w), v)| t * w * v)
                    .sum()
            })
            .collect()
    }

    /// `min_j mu_j(a)` (sequential min over mode order).
    pub fn j_value(&self, a: &[f64]) -> f64 {
        self.energies(a).into_iter().fold(f64::INFINITY, f64::min)
    }

    /// `sum_j beta_j T_j` at every node.
    pub fn combine(&self, beta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.weights.len()];
        for (b, row) in beta.iter().zip(&self.rows) {
            if *b == 0.0 {
                continue;
            }
            for (o, t) in out.iter_mut().zip(row) {
                *o += b * t;
            }
        }
        out
    }
}

/// `mu_j(a) = (1/lambda_j) int a (d phi_j / d nu)^2`.
pub fn mode_energy(a: &Density, mesh: &BoundaryMesh, mode: &EigenMode) -> Result<f64> {
    if a.values.len() != mesh.len() {
        return Err(Error::Mesh("density and mesh sizes differ".into()));
    }
    Ok(mesh
        .points
        .iter()
        .zip(&mesh.weights)
        .zip(&a.values)
        .map(|((p, w), v)| w * v * mode.eval(p))
        .sum())
}

/// `J_N(a) = min_{j <= N} mu_j(a)`.
pub fn j_truncated(a: &Density, mesh: &BoundaryMesh, modes: &[EigenMode]) -> Result<f64> {
    if modes.is_empty() {
        return Err(Error::OutOfRange("empty mode list".into()));
    }
    let mut best = f64::INFINITY;
    for mode in modes {
        best = best.min(mode_energy(a, mesh, mode)?);
    }
    Ok(best)
}

/// Exact `int_Γ (1/lambda) (d phi / d nu)^2`.
pub fn arc_energy(domain: &DomainSpec, mode: &EigenMode, gamma: &ArcSet) -> f64 {
    gamma.arcs.iter().map(|&(a, b)| mode.integral(domain, a, b)).sum()
}

/// `mu_j` of the bang-bang density `M (2 chi_Γ - 1)`, integrated exactly.
pub fn bangbang_energy(domain: &DomainSpec, mode: &EigenMode, gamma: &ArcSet, m: f64) -> f64 {
    let whole = mode.integral(domain, 0.0, domain.perimeter());
    m * (2.0 * arc_energy(domain, mode, gamma) - whole)
}

/// `min_j` of [`bangbang_energy`].
pub fn bangbang_j(domain: &DomainSpec, modes: &[EigenMode], gamma: &ArcSet, m: f64) -> f64 {
    modes
        .iter()
        .map(|md| bangbang_energy(domain, md, gamma, m))
        .fold(f64::INFINITY, f64::min)
}

/// Value of the full criterion with its truncation diagnostics.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct JInfinity {
    /// Raw value from the scanned harmonics; the true value lies in
    /// `[value - tail_bound, value]`.
    pub value: f64,
    pub tail_bound: f64,
    pub harmonics: usize,
    /// True when the tail bound comes from the jump structure of a
    /// piecewise-constant density.
    pub certified: bool,
}

/// Jumps `(position, left - right)` of a step function given on cells.
fn jumps(values: &[f64], cells: &[[f64; 2]], periodic: bool) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if values.is_empty() {
        return out;
    }
    if periodic {
        let d = values[values.len() - 1] - values[0];
        if d != 0.0 {
            out.push((cells[0][0], d));
        }
    } else if values[0] != 0.0 {
        out.push((cells[0][0], -values[0]));
    }
    for i in 1..values.len() {
        let d = values[i - 1] - values[i];
        if d != 0.0 {
            out.push((cells[i][0], d));
        }
    }
    if !periodic && values[values.len() - 1] != 0.0 {
        out.push((cells[values.len() - 1][1], values[values.len() - 1]));
    }
    out
}

/// Scans `c_j = int f cos(w j s) ds = (1/(w j)) sum_b D_b sin(w j b)` over
/// `j >= 1` for a step function with jumps `D_b` at `b`, returning the sup of
/// `|c_j|` (or of `c_j` when `signed`) together with the tail bound
/// `TV / (w J)`. The scan stops once the tail cannot beat the running sup,
/// once it falls below `tol`, or at `cap` harmonics.
///
/// When every `w b / 2 pi` is a multiple of `1 / period`, `j c_j` is periodic
/// in `j` and the first `period` harmonics settle the sup exactly.
fn fourier_sup(
    jumps: &[(f64, f64)],
    w: f64,
    signed: bool,
    tol: f64,
    cap: usize,
    period: Option<usize>,
) -> (f64, f64, usize) {
    let tv: f64 = jumps.iter().map(|(_, d)| d.abs()).sum();
    if tv == 0.0 {
        return (0.0, 0.0, 0);
    }
    let on_grid = period.filter(|&g| {
        jumps.iter().all(|(b, _)| {
            let q = w * b / (2.0 * PI) * g as f64;
            (q - q.round()).abs() < 1e-8
        })
    });
    // rotate e^{i w b} per harmonic; re-seed periodically to bound drift
    let step: Vec<(f64, f64)> = jumps.iter().map(|(b, _)| (w * b).sin_cos()).collect();
    let mut cur = step.clone();
    let mut best: f64 = 0.0;
    let mut j = 1usize;
    loop {
        if j % 4096 == 0 {
            for (c, (b, _)) in cur.iter_mut().zip(jumps) {
                *c = (w * j as f64 * b).sin_cos();
            }
        }
        let s: f64 = cur.iter().zip(jumps).map(|((sn, _), (_, d))| d * sn).sum();
        let c = s / (w * j as f64);
        best = best.max(if signed { c } else { c.abs() });
        if let Some(g) = on_grid {
            if j >= g {
                return (best, 0.0, j);
            }
        } else {
            let tail = tv / (w * (j + 1) as f64);
            if tail <= best || tail <= tol || j >= cap {
                return (best, if tail <= best { 0.0 } else { tail }, j);
            }
        }
        for (c, st) in cur.iter_mut().zip(&step) {
            let (sn, cs) = *c;
            *c = (sn * st.1 + cs * st.0, cs * st.1 - sn * st.0);
        }
        j += 1;
    }
}

const HARMONIC_CAP: usize = 1 << 22;

fn lcm(a: usize, b: usize) -> usize {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

/// The full criterion `inf_j mu_j(a)` on the rectangle or the disk, using the
/// closed-form reduction to Fourier coefficients of the density seen as a step
/// function on the mesh cells.
///
/// Disk: `(1/(pi R^2)) (int a - sup_j |int a cos(2 j theta)|)`.
/// Rectangle: `(4/(pi^2 alpha beta)) min(inf_k V_k, inf_n H_n)` where
/// `V_k = int_{vertical} a sin^2(k (y + pi beta/2)/beta)`, and `H_n` likewise.
pub fn j_infinity_exact(a: &Density, mesh: &BoundaryMesh) -> Result<JInfinity> {
    let jumps_total = jumps(&a.values, &mesh.cells, true).len();
    // dense nodal data has no useful jump structure: fall back to a fixed scan
    let certified = jumps_total <= mesh.len() / 2;
    let cap = if certified { HARMONIC_CAP } else { 4 * mesh.len() };
    match mesh.domain {
        DomainSpec::Disk { radius } => {
            let c = 1.0 / (PI * radius * radius);
            let theta_cells: Vec<[f64; 2]> =
                mesh.cells.iter().map(|s| [s[0] / radius, s[1] / radius]).collect();
            let js = jumps(&a.values, &theta_cells, true);
            let tol = 1e-9 / (c * radius);
            // uniform cells: 2 theta sits on multiples of 2 pi / n
            let (sup, tail, h) = fourier_sup(&js, 2.0, false, tol, cap, Some(mesh.len()));
            Ok(JInfinity {
                value: c * (mesh.integrate(&a.values) - radius * sup),
                tail_bound: c * radius * tail,
                harmonics: h,
                certified: certified || tail == 0.0,
            })
        }
        DomainSpec::Rectangle { alpha, beta } => {
            let c = 4.0 / (PI * PI * alpha * beta);
            let mut parts = [0.0f64; 2];
            let mut tails = [0.0f64; 2];
            let mut harmonics = 0;
            for (slot, (ids, w)) in [([1usize, 3usize], 2.0 / beta), ([2, 4], 2.0 / alpha)]
                .into_iter()
                .enumerate()
            {
                let mut all = Vec::new();
                let mut total = 0.0;
                let mut period = 1usize;
                for id in ids {
                    let idx: Vec<usize> =
                        (0..mesh.len()).filter(|&i| mesh.points[i].segment_id == id).collect();
                    let start = mesh.cells[idx[0]][0];
                    let vals: Vec<f64> = idx.iter().map(|&i| a.values[i]).collect();
                    let cells: Vec<[f64; 2]> = idx
                        .iter()
                        .map(|&i| [mesh.cells[i][0] - start, mesh.cells[i][1] - start])
                        .collect();
                    total += idx.iter().map(|&i| mesh.weights[i] * a.values[i]).sum::<f64>();
                    all.extend(jumps(&vals, &cells, false));
                    period = lcm(period, idx.len());
                }
                let (sup, tail, h) = fourier_sup(&all, w, true, 1e-9 / c, cap, Some(period));
                parts[slot] = 0.5 * (total - sup.max(0.0));
                tails[slot] = 0.5 * tail;
                harmonics = harmonics.max(h);
            }
            let slot = if parts[0] <= parts[1] { 0 } else { 1 };
            Ok(JInfinity {
                value: c * parts[slot],
                tail_bound: c * tails[0].max(tails[1]),
                harmonics,
                certified: certified || tails == [0.0, 0.0],
            })
        }
        _ => Err(Error::Unsupported {
            op: "j_infinity_exact (use j_truncated)",
            kind: mesh.domain.kind(),
        }),
    }
}

/// Exact full criterion for a bang-bang density `M (2 chi_Γ - 1)` on the disk.
pub fn j_infinity_arcs_disk(domain: &DomainSpec, gamma: &ArcSet, m: f64) -> Result<JInfinity> {
    let DomainSpec::Disk { radius } = *domain else {
        return Err(Error::Unsupported {
            op: "arc-based full criterion",
            kind: domain.kind(),
        });
    };
    let c = 1.0 / (PI * radius * radius);
    // a = M(2 chi - 1): jumps of +-2M at arc ends, in angle
    let mut js = Vec::new();
    for &(a, b) in &gamma.arcs {
        if b - a >= gamma.perimeter {
            continue;
        }
        js.push((a / radius, -2.0 * m));
        js.push((b / radius, 2.0 * m));
    }
    let (sup, tail, h) = fourier_sup(&js, 2.0, false, 1e-9 / (c * radius), HARMONIC_CAP, None);
    let mass = m * (2.0 * gamma.measure() - gamma.perimeter);
    Ok(JInfinity {
        value: c * (mass - radius * sup),
        tail_bound: c * radius * tail,
        harmonics: h,
        certified: true,
    })
}

/// `mu_j(<x - x0, nu>) - 2`.
pub fn rellich_residual(mesh: &BoundaryMesh, mode: &EigenMode, x0: Vec2) -> f64 {
    let s: f64 = mesh
        .points
        .iter()
        .zip(&mesh.weights)
        .map(|(p, w)| {
            let d = (p.position[0] - x0[0]) * p.normal[0] + (p.position[1] - x0[1]) * p.normal[1];
            w * d * mode.eval(p)
        })
        .sum();
    s - 2.0
}

/// `T min_j int_Γ (1/lambda_j) (d phi_j / d nu)^2`, integrated exactly.
pub fn randomized_obs_constant(domain: &DomainSpec, gamma: &ArcSet, t: f64, modes: &[EigenMode]) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::OutOfRange(format!("time horizon {t}")));
    }
    if modes.is_empty() {
        return Err(Error::OutOfRange("empty mode list".into()));
    }
    Ok(t * modes
        .iter()
        .map(|md| arc_energy(domain, md, gamma))
        .fold(f64::INFINITY, f64::min))
}

/// Hadamard derivative `-int (d phi / d nu)^2 (V . nu)` for nodal `V . nu`.
pub fn shape_derivative(mesh: &BoundaryMesh, mode: &EigenMode, v_normal: &[f64]) -> Result<f64> {
    if v_normal.len() != mesh.len() {
        return Err(Error::Mesh("normal field and mesh sizes differ".into()));
    }
    Ok(-mesh
        .points
        .iter()
        .zip(&mesh.weights)
        .zip(v_normal)
        .map(|((p, w), v)| w * v * mode.trace_sq(p))
        .sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{boundary_mesh, rellich_density};
    use crate::spectra::modes;

    fn disk() -> (DomainSpec, BoundaryMesh) {
        let d = DomainSpec::disk(1.0).unwrap();
        (d, boundary_mesh(&d, 1024).unwrap())
    }

    #[test]
    fn arcset_normalises() {
        let g = ArcSet::new(&[(5.0, 7.0), (1.0, 1.5), (1.2, 2.0)], 2.0 * PI);
        assert_eq!(g.arcs.len(), 3);
        assert!((g.measure() - 3.0).abs() < 1e-14);
        assert_eq!(g.arc_count(), 2);
        assert!((g.complement().measure() - (2.0 * PI - 3.0)).abs() < 1e-14);
    }

    #[test]
    fn constant_density_on_disk() {
        let (d, mesh) = disk();
        let a = Density::constant(&mesh, 0.3, 1.0);
        a.check(&mesh).unwrap();
        let ms = modes(&d, 10).unwrap();
        assert!((j_truncated(&a, &mesh, &ms).unwrap() - 0.6).abs() < 1e-12);
        let ji = j_infinity_exact(&a, &mesh).unwrap();
        assert!((ji.value - 0.6).abs() < 1e-12);
        assert!((ji.value * standard_normalization(&d) - PI * 0.3).abs() < 1e-12);
    }

    #[test]
    fn zero_density() {
        let (d, mesh) = disk();
        let a = Density::constant(&mesh, 0.0, 1.0);
        let mode = modes(&d, 1).unwrap()[0];
        assert_eq!(mode_energy(&a, &mesh, &mode).unwrap(), 0.0);
    }

    #[test]
    fn half_circle_has_no_even_cosines() {
        let (_, mesh) = disk();
        let g = ArcSet::new(&[(0.0, PI)], 2.0 * PI);
        let a = g.density(&mesh, 1.0);
        assert!(a.l.abs() < 1e-15);
        let ji = j_infinity_exact(&a, &mesh).unwrap();
        assert!(ji.value.abs() < 1e-9, "{ji:?}");
    }

    #[test]
    fn randomized_constant_on_disk() {
        let (d, _) = disk();
        let ms = modes(&d, 20).unwrap();
        let full = ArcSet::full(2.0 * PI);
        assert!((randomized_obs_constant(&d, &full, 1.0, &ms).unwrap() - 2.0).abs() < 1e-12);
        let half = ArcSet::new(&[(0.0, PI)], 2.0 * PI);
        assert!((randomized_obs_constant(&d, &half, 3.0, &ms).unwrap() - 3.0).abs() < 1e-12);
        let none = ArcSet::empty(2.0 * PI);
        assert_eq!(randomized_obs_constant(&d, &none, 1.0, &ms).unwrap(), 0.0);
    }

    #[test]
    fn rellich_density_gives_upper_bound() {
        let d = DomainSpec::rectangle(2.0, 1.0).unwrap();
        let mesh = boundary_mesh(&d, 2048).unwrap();
        let rd = rellich_density(&mesh, [0.0, 0.0], 0.3, 1.0);
        let a = Density::new(&mesh, rd.nodal(&mesh), 1.0);
        let ms = modes(&d, 10).unwrap();
        let want = upper_bound(&d, 0.3, 1.0);
        assert!((j_truncated(&a, &mesh, &ms).unwrap() - want).abs() < 1e-8);
    }

    #[test]
    fn square_rellich_full_criterion() {
        let d = DomainSpec::rectangle(1.0, 1.0).unwrap();
        let mesh = boundary_mesh(&d, 400).unwrap();
        let rd = rellich_density(&mesh, [0.0, 0.0], 0.2, 1.0);
        let a = Density::new(&mesh, rd.nodal(&mesh), 1.0);
        let ji = j_infinity_exact(&a, &mesh).unwrap();
        assert!((ji.value - 0.8 / PI).abs() < 1e-12, "{ji:?}");
    }

    #[test]
    fn sector_full_criterion_unsupported() {
        let d = DomainSpec::sector(0.5, 1.0).unwrap();
        let mesh = boundary_mesh(&d, 64).unwrap();
        let a = Density::constant(&mesh, 0.0, 1.0);
        assert!(j_infinity_exact(&a, &mesh).is_err());
    }

    #[test]
    fn zero_field_zero_derivative() {
        let (d, mesh) = disk();
        let mode = modes(&d, 1).unwrap()[0];
        assert_eq!(shape_derivative(&mesh, &mode, &vec![0.0; mesh.len()]).unwrap(), 0.0);
    }
}
