//! Closed-form Dirichlet eigenpairs of the model domains and their
//! normalised squared Neumann traces `(1/lambda) (d phi / d nu)^2`.

use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{BoundaryMesh, BoundaryPoint, DomainSpec};
use crate::specfun::{bessel_j, bessel_j_prime, bessel_zeros, MAX_ORDER};
use crate::{Error, Result};

/// Mode labels: `(n, k)` on rectangles and sectors, `(j, k, m)` on the disk
/// with `m = 1` for cosine and `m = 2` for sine (`j = 0` has only `m = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum ModeIndex {
    Pair { n: usize, k: usize },
    Triple { j: usize, k: usize, m: usize },
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeIndex::Pair { n, k } => write!(f, "({n},{k})"),
            ModeIndex::Triple { j, k, m } => write!(f, "({j},{k},{m})"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Shape {
    Rect { alpha: f64, beta: f64, n: f64, k: f64 },
    Disk { radius: f64, j: f64, cosine: bool },
    Sector { theta1: f64, radius: f64, mu: f64, z: f64, jp: f64 },
}

/// One Dirichlet eigenpair with its boundary trace evaluator.
#[derive(Clone, Copy, Debug)]
pub struct EigenMode {
    pub index: ModeIndex,
    pub lambda: f64,
    shape: Shape,
}

impl EigenMode {
    /// `(1/lambda) (d phi / d nu)^2` at a mesh node (no boundary check).
    pub fn eval(&self, p: &BoundaryPoint) -> f64 {
        let [x, y] = p.position;
        match self.shape {
            Shape::Rect { alpha, beta, n, k } => {
                let c = 4.0 / (PI * PI * alpha * beta * self.lambda);
                if p.segment_id % 2 == 1 {
                    let s = (k / beta * (y + 0.5 * PI * beta)).sin();
                    c * n * n / (alpha * alpha) * s * s
                } else {
                    let s = (n / alpha * (x + 0.5 * PI * alpha)).sin();
                    c * k * k / (beta * beta) * s * s
                }
            }
            Shape::Disk { radius, j, cosine } => {
                let c = 1.0 / (PI * radius * radius);
                if j == 0.0 {
                    return c;
                }
                let t = j * y.atan2(x);
                let s = if cosine { t.cos() } else { t.sin() };
                2.0 * c * s * s
            }
            Shape::Sector { theta1, radius, mu, z, jp } => {
                if p.segment_id == 3 {
                    let s = (mu * (y.atan2(x) + theta1)).sin();
                    2.0 / (radius * radius * theta1) * s * s
                } else {
                    let u = x.hypot(y) / radius;
                    let q = bessel_j(mu, z * u) / (u * jp);
                    2.0 * mu * mu / (radius * radius * theta1 * z * z) * q * q
                }
            }
        }
    }

    /// `(1/lambda) (d phi / d nu)^2` at a boundary point of `domain`.
    pub fn trace_sq_over_lambda(&self, domain: &DomainSpec, p: &BoundaryPoint) -> Result<f64> {
        let same = matches!(
            (self.shape, domain),
            (Shape::Rect { .. }, DomainSpec::Rectangle { .. })
                | (Shape::Disk { .. }, DomainSpec::Disk { .. })
                | (Shape::Sector { .. }, DomainSpec::Sector { .. })
        );
        if !same || !on_boundary(domain, p) {
            return Err(Error::PointMismatch(domain.kind()));
        }
        Ok(self.eval(p))
    }

    /// Exact `int (1/lambda) (d phi / d nu)^2` over the boundary arclength
    /// interval `[s0, s1]` of `domain` (`0 <= s0 <= s1 <= perimeter`). Bessel
    /// radial pieces on sector edges use adaptive quadrature.
    pub fn integral(&self, domain: &DomainSpec, s0: f64, s1: f64) -> f64 {
        let mut total = 0.0;
        let mut offset = 0.0;
        for seg in domain.segments() {
            let len = seg.length();
            let (lo, hi) = ((s0 - offset).max(0.0), (s1 - offset).min(len));
            if hi > lo {
                total += self.segment_integral(seg.id(), len, lo, hi);
            }
            offset += len;
        }
        total
    }

    fn segment_integral(&self, id: usize, len: f64, lo: f64, hi: f64) -> f64 {
        // int_lo^hi sin^2(w s) ds
        let sin2 = |w: f64| 0.5 * (hi - lo) - ((2.0 * w * hi).sin() - (2.0 * w * lo).sin()) / (4.0 * w);
        match self.shape {
            Shape::Rect { alpha, beta, n, k } => {
                let c = 4.0 / (PI * PI * alpha * beta * self.lambda);
                // every side is parameterised so the profile is sin^2(w s)
                if id % 2 == 1 {
                    c * n * n / (alpha * alpha) * sin2(k / beta)
                } else {
                    c * k * k / (beta * beta) * sin2(n / alpha)
                }
            }
            Shape::Disk { radius, j, cosine } => {
                let c = 1.0 / (PI * radius * radius);
                if j == 0.0 {
                    return c * (hi - lo);
                }
                let (t0, t1) = (lo / radius, hi / radius);
                let osc = ((2.0 * j * t1).sin() - (2.0 * j * t0).sin()) / (2.0 * j);
                let sign = if cosine { 1.0 } else { -1.0 };
                c * radius * ((t1 - t0) + sign * osc)
            }
            Shape::Sector { theta1, radius, mu, z, jp } => {
                if id == 3 {
                    return 2.0 / (radius * radius * theta1) * sin2(mu / radius);
                }
                // edge 1 runs outward from the apex, edge 2 inward
                let (r0, r1) = if id == 1 { (lo, hi) } else { (len - hi, len - lo) };
                let c = 2.0 * mu * mu / (radius * radius * theta1 * z * z);
                let f = |r: f64| {
                    let u = r / radius;
                    if u == 0.0 {
                        return 0.0;
                    }
                    let q = bessel_j(mu, z * u) / (u * jp);
                    c * q * q
                };
                crate::quad::integrate(f, r0, r1, 1e-14)
            }
        }
    }

    /// `d phi / d nu` squared, i.e. `lambda * eval`.
    pub fn trace_sq(&self, p: &BoundaryPoint) -> f64 {
        self.lambda * self.eval(p)
    }
}

fn on_boundary(domain: &DomainSpec, p: &BoundaryPoint) -> bool {
    let [x, y] = p.position;
    let tol = 1e-9;
    match *domain {
        DomainSpec::Rectangle { alpha, beta } => {
            let (h, k) = (0.5 * PI * alpha, 0.5 * PI * beta);
            let inside = x.abs() <= h + tol && y.abs() <= k + tol;
            inside
                && match p.segment_id {
                    1 => (x - h).abs() < tol,
                    2 => (y - k).abs() < tol,
                    3 => (x + h).abs() < tol,
                    4 => (y + k).abs() < tol,
                    _ => false,
                }
        }
        DomainSpec::Disk { radius } => (x.hypot(y) - radius).abs() < tol * radius.max(1.0),
        DomainSpec::Sector { theta1, radius } => {
            let (r, t) = (x.hypot(y), y.atan2(x));
            match p.segment_id {
                3 => (r - radius).abs() < tol && t.abs() <= theta1 + tol,
                1 | 2 => {
                    let side = if p.segment_id == 1 { -theta1 } else { theta1 };
                    r <= radius + tol && (r < tol || (t - side).abs() < tol)
                }
                _ => false,
            }
        }
        DomainSpec::Ellipse { .. } => false,
    }
}

fn sort_modes(mut modes: Vec<EigenMode>, n: usize) -> Vec<EigenMode> {
    modes.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.index.cmp(&b.index)));
    // eigenvalues equal up to rounding are ordered by index
    let mut i = 0;
    while i < modes.len() {
        let mut j = i + 1;
        while j < modes.len() && modes[j].lambda - modes[i].lambda <= 1e-12 * modes[i].lambda {
            j += 1;
        }
        modes[i..j].sort_by(|a, b| a.index.cmp(&b.index));
        i = j;
    }
    modes.truncate(n);
    modes
}

fn rect_modes(alpha: f64, beta: f64, cut: f64) -> Vec<EigenMode> {
    let mut out = Vec::new();
    let nmax = (alpha * cut.sqrt()).floor() as usize;
    for n in 1..=nmax {
        let rest = cut - (n * n) as f64 / (alpha * alpha);
        let kmax = (beta * rest.max(0.0).sqrt()).floor() as usize;
        for k in 1..=kmax {
            let (nf, kf) = (n as f64, k as f64);
            out.push(EigenMode {
                index: ModeIndex::Pair { n, k },
                lambda: nf * nf / (alpha * alpha) + kf * kf / (beta * beta),
                shape: Shape::Rect { alpha, beta, n: nf, k: kf },
            });
        }
    }
    out
}

/// Zeros of `J_nu` below `bound`.
fn zeros_below(nu: f64, bound: f64) -> Result<Vec<f64>> {
    if nu >= bound {
        return Ok(Vec::new());
    }
    let count = ((bound - nu) / PI).ceil() as usize + 2;
    let mut z = bessel_zeros(nu, count)?;
    z.retain(|&v| v <= bound);
    Ok(z)
}

fn disk_modes(radius: f64, cut: f64) -> Result<Vec<EigenMode>> {
    // z_{j,1} > j bounds the order range
    let bound = radius * cut.sqrt();
    let mut out = Vec::new();
    let mut j = 0usize;
    while (j as f64) < bound {
        if j as f64 > MAX_ORDER {
            return Err(Error::OutOfRange(format!("disk mode order {j}")));
        }
        for (k, z) in zeros_below(j as f64, bound)?.into_iter().enumerate() {
            let lambda = z * z / (radius * radius);
            let ms: &[usize] = if j == 0 { &[1] } else { &[1, 2] };
            for &m in ms {
                out.push(EigenMode {
                    index: ModeIndex::Triple { j, k: k + 1, m },
                    lambda,
                    shape: Shape::Disk {
                        radius,
                        j: j as f64,
                        cosine: m == 1,
                    },
                });
            }
        }
        j += 1;
    }
    Ok(out)
}

fn sector_modes(theta1: f64, radius: f64, cut: f64) -> Result<Vec<EigenMode>> {
    let bound = radius * cut.sqrt();
    let mut out = Vec::new();
    for n in 1.. {
        let mu = PI * n as f64 / (2.0 * theta1);
        if mu >= bound {
            break;
        }
        if mu > MAX_ORDER {
            return Err(Error::OutOfRange(format!("sector mode order {mu}")));
        }
        for (k, z) in zeros_below(mu, bound)?.into_iter().enumerate() {
            out.push(EigenMode {
                index: ModeIndex::Pair { n, k: k + 1 },
                lambda: z * z / (radius * radius),
                shape: Shape::Sector {
                    theta1,
                    radius,
                    mu,
                    z,
                    jp: bessel_j_prime(mu, z),
                },
            });
        }
    }
    Ok(out)
}

/// The `n` smallest Dirichlet eigenvalues with multiplicity, ascending, ties
/// broken by index. The enumeration window grows until it holds `n` modes,
/// and every mode below the window edge is enumerated.
pub fn modes(domain: &DomainSpec, n: usize) -> Result<Vec<EigenMode>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    // Weyl estimate as a first window
    let mut cut = 4.0 * PI * (n as f64 + 4.0) / domain.area();
    loop {
        let found = match *domain {
            DomainSpec::Rectangle { alpha, beta } => rect_modes(alpha, beta, cut),
            DomainSpec::Disk { radius } => disk_modes(radius, cut)?,
            DomainSpec::Sector { theta1, radius } => sector_modes(theta1, radius, cut)?,
            DomainSpec::Ellipse { .. } => {
                return Err(Error::Unsupported {
                    op: "closed-form spectrum",
                    kind: "ellipse",
                })
            }
        };
        if found.len() >= n {
            return Ok(sort_modes(found, n));
        }
        cut *= 1.5;
    }
}

/// `T[j][i]`: mode `j` evaluated at node `i`.
pub fn trace_matrix(modes: &[EigenMode], mesh: &BoundaryMesh) -> Vec<Vec<f64>> {
    modes
        .par_iter()
        .map(|m| mesh.points.iter().map(|p| m.eval(p)).collect())
        .collect()
}

/// Running mean of the first `n` normalised squared traces at every node and
/// its sup-distance to `1/|Omega|`.
pub fn cesaro_mean(domain: &DomainSpec, n: usize, mesh: &BoundaryMesh) -> Result<(Vec<f64>, f64)> {
    let list = modes(domain, n)?;
    let rows = trace_matrix(&list, mesh);
    let mut mean = vec![0.0; mesh.len()];
    for row in &rows {
        for (acc, v) in mean.iter_mut().zip(row) {
            *acc += v;
        }
    }
    let target = 1.0 / domain.area();
    let mut dev: f64 = 0.0;
    for v in &mut mean {
        *v /= n as f64;
        dev = dev.max((*v - target).abs());
    }
    Ok((mean, dev))
}
