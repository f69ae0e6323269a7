//! Planar geometry kernel: convex polygons, half-plane clipping, and the
//! exact circle–polygon intersection area used by the volume-fraction field.
//!
//! The intersection area is computed by a signed Green's-theorem
//! decomposition of the polygon boundary into chords (sub-edges inside the
//! disk) and circular sectors (sub-edges outside), which is exact up to
//! floating-point rounding — no sampling or iteration is involved.

use serde::Serialize;

use crate::error::{CoreError, Result};

/// A point in the plane.
pub type Point = [f64; 2];

#[inline]
fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
fn dist2(a: Point, b: Point) -> f64 {
    let d = sub(a, b);
    dot(d, d)
}

/// A non-degenerate convex polygon stored with counter-clockwise vertex
/// order and no repeated consecutive vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexPolygon {
    verts: Vec<Point>,
}

impl ConvexPolygon {
    /// Builds a polygon from a vertex loop (either orientation), normalizing
    /// to counter-clockwise order and dropping consecutive duplicates.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let scale = vertices
            .iter()
            .flat_map(|v| v.iter())
            .fold(1.0f64, |m, &c| m.max(c.abs()));
        let tol = 1e-14 * scale;
        let mut verts: Vec<Point> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if !v[0].is_finite() || !v[1].is_finite() {
                return Err(CoreError::Geometry("non-finite polygon vertex".into()));
            }
            if let Some(&last) = verts.last() {
                if dist2(last, v) <= tol * tol {
                    continue;
                }
            }
            verts.push(v);
        }
        while verts.len() >= 2 && dist2(verts[0], *verts.last().unwrap()) <= tol * tol {
            verts.pop();
        }
        if verts.len() < 3 {
            return Err(CoreError::Geometry(
                "degenerate polygon: fewer than 3 distinct vertices".into(),
            ));
        }
        let signed = signed_area(&verts);
        if signed.abs() <= 1e-14 * scale * scale {
            return Err(CoreError::Geometry("degenerate polygon: zero area".into()));
        }
        if signed < 0.0 {
            verts.reverse();
        }
        Ok(Self { verts })
    }

    /// Axis-aligned rectangle [x0, x1] × [y0, y1].
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if !(x1 > x0 && y1 > y0) {
            return Err(CoreError::Geometry(
                "rectangle needs x1 > x0 and y1 > y0".into(),
            ));
        }
        Self::new(vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.verts
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.verts)
    }

    /// Largest squared distance from `p` to a vertex (the polygon's
    /// circumradius about `p`, squared).
    pub fn max_dist2_from(&self, p: Point) -> f64 {
        self.verts
            .iter()
            .map(|&v| dist2(v, p))
            .fold(0.0, f64::max)
    }

    /// Containment test with absolute slack `tol` on each edge's half-plane.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        let m = self.verts.len();
        (0..m).all(|i| {
            let a = self.verts[i];
            let b = self.verts[(i + 1) % m];
            cross(sub(b, a), sub(p, a)) >= -tol
        })
    }

    /// Intersects with the half-plane { x : normal·x ≤ offset }. Returns
    /// `None` when the intersection is empty or degenerate.
    pub fn clip_halfplane(&self, normal: Point, offset: f64) -> Option<Self> {
        let m = self.verts.len();
        let d: Vec<f64> = self.verts.iter().map(|&v| dot(normal, v) - offset).collect();
        let mut out: Vec<Point> = Vec::with_capacity(m + 2);
        for i in 0..m {
            let j = (i + 1) % m;
            let (p, q) = (self.verts[i], self.verts[j]);
            if d[i] <= 0.0 {
                out.push(p);
            }
            if (d[i] < 0.0 && d[j] > 0.0) || (d[i] > 0.0 && d[j] < 0.0) {
                let t = d[i] / (d[i] - d[j]);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
        ConvexPolygon::new(out).ok()
    }

    /// Intersects with an axis-aligned rectangle.
    pub fn clip_to_rect(&self, x0: f64, y0: f64, x1: f64, y1: f64) -> Option<Self> {
        self.clip_halfplane([-1.0, 0.0], -x0)?
            .clip_halfplane([1.0, 0.0], x1)?
            .clip_halfplane([0.0, -1.0], -y0)?
            .clip_halfplane([0.0, 1.0], y1)
    }
}

fn signed_area(verts: &[Point]) -> f64 {
    let m = verts.len();
    let mut s = 0.0;
    for i in 0..m {
        s += cross(verts[i], verts[(i + 1) % m]);
    }
    0.5 * s
}

/// Area of `polygon ∩ disk(center, radius)`.
///
/// Each boundary edge is split at its circle crossings; sub-edges inside the
/// disk contribute signed chord (triangle) terms, sub-edges outside
/// contribute signed circular-sector terms. The signed total equals the
/// intersection area for any simple polygon; the result is clamped to
/// [0, polygon area] to absorb last-digit rounding.
pub fn circle_polygon_area(polygon: &ConvexPolygon, center: Point, radius: f64) -> Result<f64> {
    if !radius.is_finite() || radius < 0.0 {
        return Err(CoreError::Parameter(
            "circle radius must be finite and nonnegative".into(),
        ));
    }
    let poly_area = polygon.area();
    if radius == 0.0 {
        return Ok(0.0);
    }
    let r2 = radius * radius;
    let mut total = 0.0;
    let vs = polygon.vertices();
    let m = vs.len();
    for e in 0..m {
        let a = sub(vs[e], center);
        let b = sub(vs[(e + 1) % m], center);
        let d = sub(b, a);
        let qa = dot(d, d);
        if qa == 0.0 {
            continue;
        }
        // Circle crossings: |a + t·d|² = r², a quadratic in t solved in the
        // numerically stable split form.
        let qb = 2.0 * dot(a, d);
        let qc = dot(a, a) - r2;
        let mut cuts = [0.0f64; 2];
        let mut n_cuts = 0;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc > 0.0 {
            let sq = disc.sqrt();
            let s = if qb >= 0.0 { 1.0 } else { -1.0 };
            let q = -0.5 * (qb + s * sq);
            for t in [q / qa, qc / q] {
                if t > 0.0 && t < 1.0 {
                    cuts[n_cuts] = t;
                    n_cuts += 1;
                }
            }
            if n_cuts == 2 && cuts[0] > cuts[1] {
                cuts.swap(0, 1);
            }
        }
        let mut breaks = [0.0f64; 4];
        breaks[0] = 0.0;
        breaks[1..=n_cuts].copy_from_slice(&cuts[..n_cuts]);
        breaks[n_cuts + 1] = 1.0;
        for w in 0..=n_cuts {
            let (t0, t1) = (breaks[w], breaks[w + 1]);
            if t1 <= t0 {
                continue;
            }
            let p0 = [a[0] + t0 * d[0], a[1] + t0 * d[1]];
            let p1 = [a[0] + t1 * d[0], a[1] + t1 * d[1]];
            let tm = 0.5 * (t0 + t1);
            let pm = [a[0] + tm * d[0], a[1] + tm * d[1]];
            if dot(pm, pm) <= r2 {
                total += 0.5 * cross(p0, p1);
            } else {
                total += 0.5 * r2 * f64::atan2(cross(p0, p1), dot(p0, p1));
            }
        }
    }
    Ok(total.clamp(0.0, poly_area))
}
