//! Model domains, boundary meshes, Rellich densities and the critical
//! threshold `L^c`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::quad::integrate;
use crate::{Error, Result};

pub type Vec2 = [f64; 2];

fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

/// A planar model domain.
///
/// The rectangle is `(-alpha pi/2, alpha pi/2) x (-beta pi/2, beta pi/2)`; the
/// disk and ellipse are centred at the origin; the sector is
/// `{|theta| <= theta1, r <= radius}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainSpec {
    Rectangle { alpha: f64, beta: f64 },
    Disk { radius: f64 },
    Sector { theta1: f64, radius: f64 },
    Ellipse { a: f64, b: f64 },
}

impl DomainSpec {
    pub fn rectangle(alpha: f64, beta: f64) -> Result<Self> {
        DomainSpec::Rectangle { alpha, beta }.validated()
    }

    pub fn disk(radius: f64) -> Result<Self> {
        DomainSpec::Disk { radius }.validated()
    }

    pub fn sector(theta1: f64, radius: f64) -> Result<Self> {
        DomainSpec::Sector { theta1, radius }.validated()
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        DomainSpec::Ellipse { a, b }.validated()
    }

    /// Checks positivity and the sector aperture bound `theta1 <= pi/4`.
    pub fn validated(self) -> Result<Self> {
        let params: &[f64] = match &self {
            DomainSpec::Rectangle { alpha, beta } => &[*alpha, *beta],
            DomainSpec::Disk { radius } => &[*radius],
            DomainSpec::Sector { theta1, radius } => &[*theta1, *radius],
            DomainSpec::Ellipse { a, b } => &[*a, *b],
        };
        if params.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(Error::InvalidDomain(format!("{self}: parameters must be positive")));
        }
        if let DomainSpec::Sector { theta1, .. } = self {
            if theta1 > PI / 4.0 + 1e-15 {
                return Err(Error::InvalidDomain(format!("sector aperture {theta1} exceeds pi/4")));
            }
        }
        Ok(self)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            DomainSpec::Rectangle { .. } => "rectangle",
            DomainSpec::Disk { .. } => "disk",
            DomainSpec::Sector { .. } => "sector",
            DomainSpec::Ellipse { .. } => "ellipse",
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            DomainSpec::Rectangle { alpha, beta } => alpha * beta * PI * PI,
            DomainSpec::Disk { radius } => PI * radius * radius,
            DomainSpec::Sector { theta1, radius } => theta1 * radius * radius,
            DomainSpec::Ellipse { a, b } => PI * a * b,
        }
    }

    pub fn perimeter(&self) -> f64 {
        self.segments().iter().map(Segment::length).sum()
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            DomainSpec::Rectangle { alpha, beta } => PI * alpha.hypot(beta),
            DomainSpec::Disk { radius } => 2.0 * radius,
            DomainSpec::Sector { theta1, radius } => radius.max(2.0 * radius * theta1.sin()),
            DomainSpec::Ellipse { a, b } => 2.0 * a.max(b),
        }
    }

    /// Radius of the smallest enclosing disk.
    pub fn circumradius(&self) -> f64 {
        match *self {
            DomainSpec::Rectangle { alpha, beta } => 0.5 * PI * alpha.hypot(beta),
            DomainSpec::Disk { radius } => radius,
            // circumcircle of the acute triangle (apex, two arc ends)
            DomainSpec::Sector { theta1, radius } => radius / (2.0 * theta1.cos()),
            DomainSpec::Ellipse { a, b } => a.max(b),
        }
    }

    /// Corners of an axis-aligned box containing the closure.
    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        match *self {
            DomainSpec::Rectangle { alpha, beta } => {
                let (h, k) = (0.5 * PI * alpha, 0.5 * PI * beta);
                ([-h, -k], [h, k])
            }
            DomainSpec::Disk { radius } => ([-radius, -radius], [radius, radius]),
            DomainSpec::Sector { theta1, radius } => {
                let h = radius * theta1.sin();
                ([0.0, -h], [radius, h])
            }
            DomainSpec::Ellipse { a, b } => ([-a, -b], [a, b]),
        }
    }

    /// Boundary pieces in counter-clockwise order.
    ///
    /// Rectangle ids: 1 right, 2 top, 3 left, 4 bottom. Sector ids: 1 the
    /// lower edge `theta = -theta1`, 2 the upper edge, 3 the arc.
    /// Position and outward normal at boundary arclength `s`, wrapped onto
    /// `[0, perimeter)`.
    pub fn point_at(&self, s: f64) -> (Vec2, Vec2) {
        let segs = self.segments();
        let mut s = s.rem_euclid(self.perimeter());
        for seg in &segs {
            let len = seg.length();
            if s <= len {
                return seg.at(s);
            }
            s -= len;
        }
        let last = segs[segs.len() - 1];
        last.at(last.length())
    }

    pub fn segments(&self) -> Vec<Segment> {
        match *self {
            DomainSpec::Rectangle { alpha, beta } => {
                let (h, k) = (0.5 * PI * alpha, 0.5 * PI * beta);
                vec![
                    Segment::line(1, [h, -k], [h, k], [1.0, 0.0]),
                    Segment::line(2, [h, k], [-h, k], [0.0, 1.0]),
                    Segment::line(3, [-h, k], [-h, -k], [-1.0, 0.0]),
                    Segment::line(4, [-h, -k], [h, -k], [0.0, -1.0]),
                ]
            }
            DomainSpec::Disk { radius } => vec![Segment::Arc {
                id: 1,
                radius,
                from: 0.0,
                to: 2.0 * PI,
            }],
            DomainSpec::Sector { theta1, radius } => {
                let (s, c) = theta1.sin_cos();
                vec![
                    Segment::line(1, [0.0, 0.0], [radius * c, -radius * s], [-s, -c]),
                    Segment::Arc {
                        id: 3,
                        radius,
                        from: -theta1,
                        to: theta1,
                    },
                    Segment::line(2, [radius * c, radius * s], [0.0, 0.0], [-s, c]),
                ]
            }
            DomainSpec::Ellipse { a, b } => vec![Segment::Ellipse { a, b }],
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Rectangle { alpha, beta } => write!(f, "rect:{alpha},{beta}"),
            DomainSpec::Disk { radius } => write!(f, "disk:{radius}"),
            DomainSpec::Sector { theta1, radius } => write!(f, "sector:{theta1},{radius}"),
            DomainSpec::Ellipse { a, b } => write!(f, "ellipse:{a},{b}"),
        }
    }
}

/// Parses `rect:ALPHA,BETA | disk:R | sector:THETA1,R | ellipse:A,B`.
impl FromStr for DomainSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidDomain(format!("cannot parse '{s}'"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let nums = rest
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        match (kind.trim(), nums.as_slice()) {
            ("rect", &[a, b]) => DomainSpec::rectangle(a, b),
            ("disk", &[r]) => DomainSpec::disk(r),
            ("sector", &[t, r]) => DomainSpec::sector(t, r),
            ("ellipse", &[a, b]) => DomainSpec::ellipse(a, b),
            _ => Err(bad()),
        }
    }
}

/// One smooth piece of a boundary.
#[derive(Clone, Copy, Debug)]
pub enum Segment {
    Line { id: usize, start: Vec2, end: Vec2, normal: Vec2 },
    Arc { id: usize, radius: f64, from: f64, to: f64 },
    Ellipse { a: f64, b: f64 },
}

fn ellipse_speed(a: f64, b: f64, t: f64) -> f64 {
    (a * t.sin()).hypot(b * t.cos())
}

fn ellipse_arclength(a: f64, b: f64, t: f64) -> f64 {
    // split at quarter turns so each panel is smooth and monotone
    let quarter = 0.5 * PI;
    let mut s = 0.0;
    let mut lo = 0.0;
    while lo < t {
        let hi = (lo + quarter).min(t);
        s += integrate(|u| ellipse_speed(a, b, u), lo, hi, 1e-14);
        lo = hi;
    }
    s
}

impl Segment {
    fn line(id: usize, start: Vec2, end: Vec2, normal: Vec2) -> Self {
        Segment::Line { id, start, end, normal }
    }

    pub fn id(&self) -> usize {
        match self {
            Segment::Line { id, .. } | Segment::Arc { id, .. } => *id,
            Segment::Ellipse { .. } => 1,
        }
    }

    pub fn is_closed(&self) -> bool {
        match *self {
            Segment::Line { .. } => false,
            Segment::Arc { from, to, .. } => to - from >= 2.0 * PI,
            Segment::Ellipse { .. } => true,
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { start, end, .. } => (end[0] - start[0]).hypot(end[1] - start[1]),
            Segment::Arc { radius, from, to, .. } => radius * (to - from),
            Segment::Ellipse { a, b } => ellipse_arclength(a, b, 2.0 * PI),
        }
    }

    /// Position and outward normal at arclength `s` from the segment start.
    fn at(&self, s: f64) -> (Vec2, Vec2) {
        match *self {
            Segment::Line { start, end, normal, .. } => {
                let t = s / self.length();
                (
                    [start[0] + t * (end[0] - start[0]), start[1] + t * (end[1] - start[1])],
                    normal,
                )
            }
            Segment::Arc { radius, from, .. } => {
                let (sn, cs) = (from + s / radius).sin_cos();
                ([radius * cs, radius * sn], [cs, sn])
            }
            Segment::Ellipse { a, b } => {
                let t = ellipse_param(a, b, s);
                ellipse_point(a, b, t)
            }
        }
    }
}

fn ellipse_point(a: f64, b: f64, t: f64) -> (Vec2, Vec2) {
    let (sn, cs) = t.sin_cos();
    let n = [b * cs, a * sn];
    let len = n[0].hypot(n[1]);
    ([a * cs, b * sn], [n[0] / len, n[1] / len])
}

/// Parameter `t` with arclength `s` measured from `t = 0`.
fn ellipse_param(a: f64, b: f64, s: f64) -> f64 {
    let total = ellipse_arclength(a, b, 2.0 * PI);
    let mut t = 2.0 * PI * s / total;
    for _ in 0..50 {
        let f = ellipse_arclength(a, b, t) - s;
        let dt = f / ellipse_speed(a, b, t);
        t -= dt;
        if dt.abs() < 1e-15 {
            break;
        }
    }
    t
}

/// A quadrature node on the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub position: Vec2,
    pub normal: Vec2,
    pub arclength: f64,
    pub segment_id: usize,
}

/// Midpoint-rule discretisation of the boundary measure.
#[derive(Clone, Debug)]
pub struct BoundaryMesh {
    pub domain: DomainSpec,
    pub points: Vec<BoundaryPoint>,
    pub weights: Vec<f64>,
    /// Arclength interval of the uniform cell around each node.
    pub cells: Vec<[f64; 2]>,
    pub perimeter: f64,
}

impl BoundaryMesh {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `sum_i w_i f_i`.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn map<F: Fn(&BoundaryPoint) -> f64>(&self, f: F) -> Vec<f64> {
        self.points.iter().map(f).collect()
    }
}

/// Splits `n` nodes over segment lengths, at least two per segment.
fn allocate(n: usize, lengths: &[f64]) -> Vec<usize> {
    let total: f64 = lengths.iter().sum();
    let ideal: Vec<f64> = lengths.iter().map(|l| n as f64 * l / total).collect();
    let mut counts: Vec<usize> = ideal.iter().map(|x| (x.floor() as usize).max(2)).collect();
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by(|&i, &j| {
        let ri = ideal[i] - counts[i] as f64;
        let rj = ideal[j] - counts[j] as f64;
        rj.total_cmp(&ri).then(i.cmp(&j))
    });
    let mut assigned: usize = counts.iter().sum();
    let mut k = 0;
    while assigned < n {
        counts[order[k % order.len()]] += 1;
        assigned += 1;
        k += 1;
    }
    while assigned > n {
        let i = (0..counts.len())
            .filter(|&i| counts[i] > 2)
            .max_by(|&i, &j| (counts[i] as f64 - ideal[i]).total_cmp(&(counts[j] as f64 - ideal[j])))
            .expect("n >= 2 per segment");
        counts[i] -= 1;
        assigned -= 1;
    }
    counts
}

/// Nodes uniform in arclength on each boundary piece, at cell midpoints, so no
/// node sits on a corner. Closed curves get plain midpoint weights; open pieces
/// with at least three nodes get an endpoint correction that makes the rule
/// fourth order (weights stay positive and sum to the piece length).
pub fn boundary_mesh(domain: &DomainSpec, node_count: usize) -> Result<BoundaryMesh> {
    let segs = domain.segments();
    let min = (2 * segs.len()).max(4);
    if node_count < min {
        return Err(Error::Mesh(format!(
            "{} needs at least {min} nodes, got {node_count}",
            domain.kind()
        )));
    }
    let lengths: Vec<f64> = segs.iter().map(Segment::length).collect();
    let counts = allocate(node_count, &lengths);
    let mut points = Vec::with_capacity(node_count);
    let mut weights = Vec::with_capacity(node_count);
    let mut cells = Vec::with_capacity(node_count);
    let mut offset = 0.0;
    for ((seg, &len), &n) in segs.iter().zip(&lengths).zip(&counts) {
        let h = len / n as f64;
        if let Segment::Ellipse { a, b } = *seg {
            // invert the arclength once per node with a warm start
            let mut t = 0.0;
            for i in 0..n {
                let s = (i as f64 + 0.5) * h;
                t = ellipse_param_from(a, b, s, t);
                let (position, normal) = ellipse_point(a, b, t);
                points.push(BoundaryPoint {
                    position,
                    normal,
                    arclength: offset + s,
                    segment_id: 1,
                });
                weights.push(h);
                cells.push([offset + i as f64 * h, offset + (i + 1) as f64 * h]);
            }
        } else {
            let first = weights.len();
            for i in 0..n {
                let s = (i as f64 + 0.5) * h;
                let (position, normal) = seg.at(s);
                points.push(BoundaryPoint {
                    position,
                    normal,
                    arclength: offset + s,
                    segment_id: seg.id(),
                });
                weights.push(h);
                cells.push([offset + i as f64 * h, offset + (i + 1) as f64 * h]);
            }
            if !seg.is_closed() && n >= 3 {
                // midpoint rule plus the h^2/24 (f'(b) - f'(a)) end term, with
                // end slopes from the quadratic through the three outer nodes
                let c = h / 24.0;
                for (k, coef) in [2.0, -3.0, 1.0].into_iter().enumerate() {
                    weights[first + k] += c * coef;
                    weights[first + n - 1 - k] += c * coef;
                }
            }
        }
        offset += len;
    }
    Ok(BoundaryMesh {
        domain: *domain,
        points,
        weights,
        cells,
        perimeter: offset,
    })
}

fn ellipse_param_from(a: f64, b: f64, s: f64, start: f64) -> f64 {
    // incremental arclength from a known parameter keeps the cost linear
    let base = ellipse_arclength(a, b, start);
    let mut t = start;
    for _ in 0..50 {
        let f = base + integrate(|u| ellipse_speed(a, b, u), start, t, 1e-14) - s;
        let dt = f / ellipse_speed(a, b, t);
        t -= dt;
        if dt.abs() < 1e-15 {
            break;
        }
    }
    t
}

/// `x -> scale <x - x0, nu(x)>` with `scale = L M |dOmega| / (2 |Omega|)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RellichDensity {
    pub x0: Vec2,
    pub scale: f64,
    /// Whether the nodal values respect the pointwise bound `M`.
    pub admissible: bool,
}

impl RellichDensity {
    pub fn eval(&self, p: &BoundaryPoint) -> f64 {
        self.scale * dot(sub(p.position, self.x0), p.normal)
    }

    pub fn nodal(&self, mesh: &BoundaryMesh) -> Vec<f64> {
        mesh.map(|p| self.eval(p))
    }
}

pub fn rellich_density(mesh: &BoundaryMesh, x0: Vec2, l: f64, m: f64) -> RellichDensity {
    let d = &mesh.domain;
    let scale = l * m * d.perimeter() / (2.0 * d.area());
    let mut rd = RellichDensity {
        x0,
        scale,
        admissible: true,
    };
    let sup = mesh.points.iter().map(|p| rd.eval(p).abs()).fold(0.0, f64::max);
    rd.admissible = sup <= m + 1e-12;
    rd
}

/// `ess sup |<x - x0, nu(x)>|` over the boundary.
pub fn ell(domain: &DomainSpec, x0: Vec2) -> f64 {
    match *domain {
        DomainSpec::Rectangle { alpha, beta } => {
            let (h, k) = (0.5 * PI * alpha, 0.5 * PI * beta);
            (h + x0[0].abs()).max(k + x0[1].abs())
        }
        DomainSpec::Disk { radius } => radius + x0[0].hypot(x0[1]),
        DomainSpec::Sector { theta1, radius } => {
            let (s, c) = theta1.sin_cos();
            let side1 = dot([-x0[0], -x0[1]], [-s, -c]).abs();
            let side2 = dot([-x0[0], -x0[1]], [-s, c]).abs();
            // on the arc R - <x0, e(theta)> is smooth: check the ends and the
            // critical angles theta0, theta0 + pi
            let arc = |t: f64| (radius - x0[0] * t.cos() - x0[1] * t.sin()).abs();
            let mut best = arc(-theta1).max(arc(theta1));
            let th0 = x0[1].atan2(x0[0]);
            for cand in [th0, th0 + PI, th0 - PI] {
                if cand.abs() <= theta1 {
                    best = best.max(arc(cand));
                }
            }
            side1.max(side2).max(best)
        }
        DomainSpec::Ellipse { a, b } => ellipse_ell(a, b, x0),
    }
}

fn ellipse_ell(a: f64, b: f64, x0: Vec2) -> f64 {
    // <x(t) - x0, nu(t)> = (ab - b x0 cos t - a y0 sin t) / |(b cos t, a sin t)|
    let f = |t: f64| {
        let (sn, cs) = t.sin_cos();
        ((a * b - b * x0[0] * cs - a * x0[1] * sn) / (b * cs).hypot(a * sn)).abs()
    };
    // the profile has at most a handful of extrema; 512 samples bracket each
    let n = 512;
    let h = 2.0 * PI / n as f64;
    let vals: Vec<f64> = (0..n).map(|i| f(i as f64 * h)).collect();
    let mut best = vals.iter().cloned().fold(0.0, f64::max);
    // golden-section refinement around every sampled local maximum
    for i in 0..n {
        let (l, r) = (vals[(i + n - 1) % n], vals[(i + 1) % n]);
        if vals[i] < l || vals[i] < r || vals[i] < 0.9 * best {
            continue;
        }
        let (mut lo, mut hi) = ((i as f64 - 1.0) * h, (i as f64 + 1.0) * h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = hi - g * (hi - lo);
        let mut d = lo + g * (hi - lo);
        let (mut fc, mut fd) = (f(c), f(d));
        while hi - lo > 1e-12 {
            if fc > fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - g * (hi - lo);
                fc = f(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + g * (hi - lo);
                fd = f(d);
            }
        }
        best = best.max(fc).max(fd);
    }
    best
}

/// Minimiser of `ell` and its value.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MinEll {
    pub x0: Vec2,
    pub delta: f64,
    /// False when the step floor was reached without stagnation.
    pub converged: bool,
}

fn golden<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Grid seed on the bounding box followed by line searches in 16 directions
/// with a shrinking bracket. `ell` is convex so the local search is global;
/// the extra directions keep it from stalling on kinks of the max.
pub fn min_ell(domain: &DomainSpec) -> MinEll {
    let (lo, hi) = domain.bounding_box();
    let g = 32;
    let mut x = [0.0, 0.0];
    let mut best = f64::INFINITY;
    for i in 0..g {
        for j in 0..g {
            let p = [
                lo[0] + (hi[0] - lo[0]) * (i as f64 + 0.5) / g as f64,
                lo[1] + (hi[1] - lo[1]) * (j as f64 + 0.5) / g as f64,
            ];
            let v = ell(domain, p);
            if v < best {
                best = v;
                x = p;
            }
        }
    }
    let floor = 1e-8 * domain.circumradius();
    let mut step = (hi[0] - lo[0]).max(hi[1] - lo[1]) / g as f64;
    let dirs: Vec<Vec2> = (0..16)
        .map(|k| {
            let t = PI * k as f64 / 16.0;
            [t.cos(), t.sin()]
        })
        .collect();
    let mut converged = false;
    for _ in 0..400 {
        let mut longest: f64 = 0.0;
        for d in &dirs {
            let line = |t: f64| ell(domain, [x[0] + t * d[0], x[1] + t * d[1]]);
            let (t, v) = golden(line, -step, step, 30);
            if v < best {
                best = v;
                x = [x[0] + t * d[0], x[1] + t * d[1]];
                longest = longest.max(t.abs());
            }
        }
        // keep the bracket while the iterate is still running into its edge
        if longest < 0.9 * step {
            step *= 0.5;
        }
        if step < floor {
            converged = true;
            break;
        }
    }
    MinEll {
        x0: x,
        delta: best,
        converged,
    }
}

/// `L^c = min(1, 2 |Omega| / (|dOmega| inf ell))`.
pub fn critical_l(domain: &DomainSpec) -> f64 {
    let delta = min_ell(domain).delta;
    (2.0 * domain.area() / (domain.perimeter() * delta)).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_at_agrees_with_mesh_nodes() {
        for d in [
            DomainSpec::rectangle(1.5, 0.5).unwrap(),
            DomainSpec::sector(0.6, 2.0).unwrap(),
            DomainSpec::ellipse(2.0, 1.0).unwrap(),
        ] {
            let m = boundary_mesh(&d, 64).unwrap();
            for p in &m.points {
                let (x, n) = d.point_at(p.arclength);
                assert!((x[0] - p.position[0]).hypot(x[1] - p.position[1]) < 1e-9, "{d}");
                assert!((n[0] - p.normal[0]).hypot(n[1] - p.normal[1]) < 1e-9);
            }
        }
    }

    #[test]
    fn disk_four_nodes() {
        let m = boundary_mesh(&DomainSpec::disk(1.0).unwrap(), 4).unwrap();
        assert_eq!(m.len(), 4);
        for w in &m.weights {
            assert!((w - PI / 2.0).abs() < 1e-15);
        }
        assert!((m.perimeter - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn square_eight_nodes() {
        let m = boundary_mesh(&DomainSpec::rectangle(1.0, 1.0).unwrap(), 8).unwrap();
        for id in 1..=4 {
            assert_eq!(m.points.iter().filter(|p| p.segment_id == id).count(), 2);
        }
        assert!(m.weights.iter().all(|w| (w - PI / 2.0).abs() < 1e-14));
        assert!((m.perimeter - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn sector_weights_sum() {
        let m = boundary_mesh(&DomainSpec::sector(PI / 4.0, 1.0).unwrap(), 64).unwrap();
        let s: f64 = m.weights.iter().sum();
        assert!((s - (2.0 + PI / 2.0)).abs() < 1e-10);
    }

    #[test]
    fn too_few_nodes() {
        assert!(boundary_mesh(&DomainSpec::rectangle(1.0, 1.0).unwrap(), 7).is_err());
        assert!(boundary_mesh(&DomainSpec::sector(0.5, 1.0).unwrap(), 5).is_err());
        assert!(boundary_mesh(&DomainSpec::disk(1.0).unwrap(), 3).is_err());
    }

    #[test]
    fn no_node_on_corner() {
        let d = DomainSpec::rectangle(2.0, 1.0).unwrap();
        let m = boundary_mesh(&d, 101).unwrap();
        for p in &m.points {
            let on_x = (p.position[0].abs() - PI).abs() < 1e-12;
            let on_y = (p.position[1].abs() - PI / 2.0).abs() < 1e-12;
            assert!(!(on_x && on_y));
        }
    }

    #[test]
    fn closed_form_measures() {
        let d = DomainSpec::disk(1.0).unwrap();
        assert_eq!((d.area(), d.diameter(), d.circumradius()), (PI, 2.0, 1.0));
        assert!((d.perimeter() - 2.0 * PI).abs() < 1e-15);
        let r = DomainSpec::rectangle(1.0, 1.0).unwrap();
        assert!((r.area() - PI * PI).abs() < 1e-14);
        assert!((r.perimeter() - 4.0 * PI).abs() < 1e-14);
        assert!((r.circumradius() - PI * 2f64.sqrt() / 2.0).abs() < 1e-14);
        let s = DomainSpec::sector(PI / 4.0, 1.0).unwrap();
        assert!((s.area() - PI / 4.0).abs() < 1e-15);
        assert!((s.perimeter() - (2.0 + PI / 2.0)).abs() < 1e-14);
    }

    #[test]
    fn ellipse_perimeter() {
        // complete elliptic integral of the second kind, e^2 = 3/4
        let e = DomainSpec::ellipse(1.0, 0.5).unwrap();
        assert!((e.perimeter() - 4.844_224_110_273_838).abs() < 1e-12);
        let m = boundary_mesh(&e, 256).unwrap();
        let s: f64 = m.weights.iter().sum();
        assert!((s - e.perimeter()).abs() < 1e-10);
        for (p, q) in m.points.iter().zip(m.points.iter().skip(1)) {
            let chord = (p.position[0] - q.position[0]).hypot(p.position[1] - q.position[1]);
            assert!((chord - m.weights[0]).abs() < 1e-4);
        }
    }

    #[test]
    fn parse_grammar() {
        assert_eq!(
            "rect:2,1".parse::<DomainSpec>().unwrap(),
            DomainSpec::Rectangle { alpha: 2.0, beta: 1.0 }
        );
        assert!("sector:0.7853981633974483,1".parse::<DomainSpec>().is_ok());
        assert!("sector:1.0,1".parse::<DomainSpec>().is_err());
        assert!("disk:-1".parse::<DomainSpec>().is_err());
        assert!("tri:1,2".parse::<DomainSpec>().is_err());
        assert!("ellipse:1".parse::<DomainSpec>().is_err());
    }

    #[test]
    fn rellich_on_disk_is_constant() {
        let m = boundary_mesh(&DomainSpec::disk(1.0).unwrap(), 64).unwrap();
        let rd = rellich_density(&m, [0.0, 0.0], 0.3, 2.0);
        for v in rd.nodal(&m) {
            assert!((v - 0.6).abs() < 1e-14);
        }
        assert!(rd.admissible);
    }

    #[test]
    fn rellich_on_rectangle_sides() {
        let (a, b, l) = (2.0, 1.0, 0.4);
        let m = boundary_mesh(&DomainSpec::rectangle(a, b).unwrap(), 64).unwrap();
        let rd = rellich_density(&m, [0.0, 0.0], l, 1.0);
        for p in &m.points {
            let want = if p.segment_id % 2 == 1 {
                l * (a + b) / (2.0 * b)
            } else {
                l * (a + b) / (2.0 * a)
            };
            assert!((rd.eval(p) - want).abs() < 1e-13);
        }
    }

    #[test]
    fn ell_closed_forms() {
        assert_eq!(ell(&DomainSpec::disk(1.0).unwrap(), [0.0, 0.0]), 1.0);
        let r = DomainSpec::rectangle(2.0, 1.0).unwrap();
        assert!((ell(&r, [0.0, 0.0]) - PI).abs() < 1e-15);
        let e = DomainSpec::ellipse(1.0, 0.5).unwrap();
        assert!((ell(&e, [0.0, 0.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sector_delta_point() {
        let (t1, r) = (PI / 4.0, 1.0);
        let s = DomainSpec::sector(t1, r).unwrap();
        let delta = r * t1.tan() / (1.0 + t1.tan());
        // the sides and arc ends balance at distance R / (sin + cos) on the axis
        let x0 = [r / (t1.sin() + t1.cos()), 0.0];
        assert!((ell(&s, x0) - delta).abs() < 1e-14);
    }
}
