//! Planar Poisson–Voronoi volume-fraction field.
//!
//! Nuclei are a homogeneous Poisson process on the window enlarged by a
//! guard margin (so inner-window cells are unaffected by the unseen outside
//! with overwhelming probability). For a site `t` with nearest nucleus `ξ`,
//! the field value is
//!
//! ```text
//! X(t) = area{ v ∈ C(ξ) : ‖v − ξ‖ ≤ ‖t − ξ‖ } / area(C(ξ)) ∈ [0, 1],
//! ```
//!
//! computed exactly by the circle–polygon kernel. Per cell, the level sets
//! satisfy `area{t ∈ C : X(t) ≤ b} = b·area(C)`, so the field is uniform on
//! [0, 1] per cell and its asymptotic window variance degenerates to zero.
//!
//! Voronoi cells are built by half-plane clipping against neighbors inside
//! a certified cutoff: once every remaining nucleus is farther than twice
//! the cell's circumradius about its nucleus, no further nucleus can cut the
//! cell, so the clipped polygon is the exact Voronoi cell (intersected with
//! the guarded box).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::geometry::{circle_polygon_area, ConvexPolygon, Point};
use super::{sites_per_axis, FieldMeta, FieldRealization};
use crate::error::{CoreError, Result};
use crate::exec::map_indexed;

/// Smallest admissible guard margin, as a multiple of intensity^{−1/2}.
pub const MIN_GUARD_MULTIPLE: f64 = 2.0;
/// Default guard margin, as a multiple of intensity^{−1/2}.
pub const DEFAULT_GUARD_MULTIPLE: f64 = 4.0;
/// Retries allowed when the guarded box receives no nuclei.
const MAX_EMPTY_REDRAWS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiGenerator {
    pub window_side: f64,
    pub intensity: f64,
    pub spacing: f64,
    /// Guard margin; `None` selects 4·intensity^{−1/2}.
    pub guard: Option<f64>,
}

impl VoronoiGenerator {
    pub fn new(window_side: f64, intensity: f64, spacing: f64, guard: Option<f64>) -> Result<Self> {
        let gen = Self {
            window_side,
            intensity,
            spacing,
            guard,
        };
        gen.resolved_guard()?;
        sites_per_axis(window_side, spacing)?;
        Ok(gen)
    }

    pub fn resolved_guard(&self) -> Result<f64> {
        if !(self.intensity > 0.0) || !self.intensity.is_finite() {
            return Err(CoreError::Parameter("intensity must be positive".into()));
        }
        let scale = self.intensity.sqrt().recip();
        let g = self.guard.unwrap_or(DEFAULT_GUARD_MULTIPLE * scale);
        if g < MIN_GUARD_MULTIPLE * scale {
            return Err(CoreError::Parameter(format!(
                "guard margin {g} is below the minimum {MIN_GUARD_MULTIPLE}·intensity^(-1/2) = {}",
                MIN_GUARD_MULTIPLE * scale
            )));
        }
        Ok(g)
    }

    pub fn generator_id(&self) -> String {
        "voronoi".into()
    }

    /// Samples a nucleus configuration and its exact cell polygons.
    pub fn sample_scene(&self, master_seed: u64, stream: u64) -> Result<VoronoiScene> {
        let g = self.resolved_guard()?;
        let lo = -g;
        let hi = self.window_side + g;
        let extent = hi - lo;
        let mean = self.intensity * extent * extent;
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream);
        let count_dist = Poisson::new(mean)
            .map_err(|e| CoreError::Parameter(format!("invalid nucleus count mean: {e}")))?;
        let mut n_pts = 0usize;
        for attempt in 0..=MAX_EMPTY_REDRAWS {
            n_pts = count_dist.sample(&mut rng) as usize;
            if n_pts > 0 {
                break;
            }
            log::warn!(
                "empty nucleus set in guarded box (attempt {}), redrawing",
                attempt + 1
            );
            if attempt == MAX_EMPTY_REDRAWS {
                return Err(CoreError::Sampling(
                    "guarded box received no nuclei after bounded redraws".into(),
                ));
            }
        }
        let mut nuclei = Vec::with_capacity(n_pts);
        for _ in 0..n_pts {
            let x = lo + extent * rng.gen::<f64>();
            let y = lo + extent * rng.gen::<f64>();
            nuclei.push([x, y]);
        }
        let grid = BucketGrid::build(&nuclei, [lo, lo, hi, hi], self.intensity.sqrt().recip());
        let box_poly = ConvexPolygon::rect(lo, lo, hi, hi)?;
        let cells: Vec<ConvexPolygon> = map_indexed(nuclei.len(), |i| {
            build_cell(i, &nuclei, &grid, &box_poly, extent)
        })
        .into_iter()
        .collect::<Result<_>>()?;
        let cell_areas: Vec<f64> = cells.iter().map(|c| c.area()).collect();
        Ok(VoronoiScene {
            nuclei,
            cells,
            cell_areas,
            guard: g,
            bounds: [lo, lo, hi, hi],
            site_nucleus: Vec::new(),
            grid,
        })
    }

    /// Generates the lattice field together with its scene and the
    /// site-to-nucleus assignment.
    pub fn generate(&self, master_seed: u64, stream: u64) -> Result<(FieldRealization, VoronoiScene)> {
        let scene = self.sample_scene(master_seed, stream)?;
        let n = sites_per_axis(self.window_side, self.spacing)?;
        let h = self.spacing;
        let evaluated: Vec<Result<(f64, u32)>> = map_indexed(n * n, |idx| {
            let t = [(idx / n) as f64 * h, (idx % n) as f64 * h];
            let (value, cell) = scene.value_at(t)?;
            Ok((value, cell as u32))
        });
        let mut values = Vec::with_capacity(n * n);
        let mut assignment = Vec::with_capacity(n * n);
        for r in evaluated {
            let (v, c) = r?;
            values.push(v);
            assignment.push(c);
        }
        let field = FieldRealization {
            dim: 2,
            side: self.window_side,
            spacing: h,
            shape: [n, n],
            values,
            meta: FieldMeta {
                generator: self.generator_id(),
                master_seed,
                stream,
            },
        };
        field.validate()?;
        let mut scene = scene;
        scene.site_nucleus = assignment;
        Ok((field, scene))
    }
}

/// A sampled nucleus configuration with exact cell geometry.
#[derive(Debug, Clone)]
pub struct VoronoiScene {
    pub nuclei: Vec<Point>,
    /// Voronoi cells clipped to the guarded box, indexed like `nuclei`.
    pub cells: Vec<ConvexPolygon>,
    pub cell_areas: Vec<f64>,
    pub guard: f64,
    /// Guarded box [x0, y0, x1, y1].
    pub bounds: [f64; 4],
    /// Site-to-nucleus assignment, row-major over the lattice; empty until
    /// the lattice field has been evaluated by `generate`.
    pub site_nucleus: Vec<u32>,
    grid: BucketGrid,
}

impl VoronoiScene {
    /// Field value and owning nucleus index at an arbitrary point of the
    /// guarded box. Equidistant nuclei are resolved to the lowest index.
    pub fn value_at(&self, t: Point) -> Result<(f64, usize)> {
        let (j, d2) = self.grid.nearest(t, &self.nuclei);
        let r = d2.sqrt();
        let area = circle_polygon_area(&self.cells[j], self.nuclei[j], r)?;
        Ok(((area / self.cell_areas[j]).clamp(0.0, 1.0), j))
    }

    /// Indices of cells wholly inside the open window (0, side)².
    pub fn interior_cells(&self, side: f64) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&i| {
                self.cells[i]
                    .vertices()
                    .iter()
                    .all(|v| v[0] > 0.0 && v[0] < side && v[1] > 0.0 && v[1] < side)
            })
            .collect()
    }

    /// Relative defect of Σ area(cell ∩ [0, side]²) against side².
    pub fn tiling_residual(&self, side: f64) -> f64 {
        let total: f64 = self
            .cells
            .iter()
            .filter_map(|c| c.clip_to_rect(0.0, 0.0, side, side))
            .map(|c| c.area())
            .sum();
        (total - side * side).abs() / (side * side)
    }
}

fn build_cell(
    i: usize,
    nuclei: &[Point],
    grid: &BucketGrid,
    box_poly: &ConvexPolygon,
    box_extent: f64,
) -> Result<ConvexPolygon> {
    let xi = nuclei[i];
    let mut r_cut = 3.0 * grid.bucket;
    let diameter = box_extent * std::f64::consts::SQRT_2 + 1.0;
    loop {
        let exhaustive = r_cut >= diameter;
        let mut neighbors = grid.within(xi, r_cut, nuclei);
        neighbors.sort_unstable();
        let mut cell = box_poly.clone();
        for j in neighbors {
            if j == i {
                continue;
            }
            let xj = nuclei[j];
            let d2 = (xj[0] - xi[0]).powi(2) + (xj[1] - xi[1]).powi(2);
            if d2 == 0.0 {
                return Err(CoreError::Geometry(format!(
                    "coincident nuclei {i} and {j}"
                )));
            }
            // Bisector half-plane of points at least as close to ξ_i as to
            // ξ_j: (ξ_j − ξ_i)·x ≤ (|ξ_j|² − |ξ_i|²)/2.
            let normal = [xj[0] - xi[0], xj[1] - xi[1]];
            let offset = 0.5
                * (xj[0] * xj[0] + xj[1] * xj[1] - xi[0] * xi[0] - xi[1] * xi[1]);
            cell = cell.clip_halfplane(normal, offset).ok_or_else(|| {
                CoreError::Geometry(format!("cell of nucleus {i} collapsed during clipping"))
            })?;
        }
        let r_max = cell.max_dist2_from(xi).sqrt();
        if exhaustive || 2.0 * r_max <= r_cut {
            return Ok(cell);
        }
        r_cut *= 2.0;
    }
}

/// Uniform spatial hash over the guarded box for nearest / range queries.
#[derive(Debug, Clone)]
struct BucketGrid {
    x0: f64,
    y0: f64,
    bucket: f64,
    nx: usize,
    ny: usize,
    slots: Vec<Vec<u32>>,
}

impl BucketGrid {
    fn build(points: &[Point], bounds: [f64; 4], target_pitch: f64) -> Self {
        let [x0, y0, x1, y1] = bounds;
        let bucket = target_pitch.max(1e-9);
        let nx = (((x1 - x0) / bucket).ceil() as usize).max(1);
        let ny = (((y1 - y0) / bucket).ceil() as usize).max(1);
        let mut slots = vec![Vec::new(); nx * ny];
        let mut grid = Self {
            x0,
            y0,
            bucket,
            nx,
            ny,
            slots: Vec::new(),
        };
        for (idx, &p) in points.iter().enumerate() {
            let (bx, by) = grid.bucket_of(p);
            slots[by * nx + bx].push(idx as u32);
        }
        grid.slots = slots;
        grid
    }

    fn bucket_of(&self, p: Point) -> (usize, usize) {
        let bx = (((p[0] - self.x0) / self.bucket).floor() as isize)
            .clamp(0, self.nx as isize - 1) as usize;
        let by = (((p[1] - self.y0) / self.bucket).floor() as isize)
            .clamp(0, self.ny as isize - 1) as usize;
        (bx, by)
    }

    /// Nearest point to `p` (squared distance), ties to the lowest index.
    fn nearest(&self, p: Point, points: &[Point]) -> (usize, f64) {
        let (cx, cy) = self.bucket_of(p);
        let mut best = (usize::MAX, f64::INFINITY);
        let max_ring = self.nx.max(self.ny);
        for ring in 0..=max_ring {
            if best.0 != usize::MAX {
                // Any bucket at Chebyshev ring ρ is at least (ρ−1)·bucket
                // away from p, so the search can stop.
                let lower = (ring as f64 - 1.0) * self.bucket;
                if lower > 0.0 && lower * lower > best.1 {
                    break;
                }
            }
            self.for_ring(cx, cy, ring, |slot| {
                for &idx in &self.slots[slot] {
                    let q = points[idx as usize];
                    let d2 = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
                    let idx = idx as usize;
                    if d2 < best.1 || (d2 == best.1 && idx < best.0) {
                        best = (idx, d2);
                    }
                }
            });
        }
        best
    }

    /// Indices of all points within Euclidean distance `r` of `p`.
    fn within(&self, p: Point, r: f64, points: &[Point]) -> Vec<usize> {
        let bx0 = (((p[0] - r - self.x0) / self.bucket).floor() as isize).clamp(0, self.nx as isize - 1) as usize;
        let bx1 = (((p[0] + r - self.x0) / self.bucket).floor() as isize).clamp(0, self.nx as isize - 1) as usize;
        let by0 = (((p[1] - r - self.y0) / self.bucket).floor() as isize).clamp(0, self.ny as isize - 1) as usize;
        let by1 = (((p[1] + r - self.y0) / self.bucket).floor() as isize).clamp(0, self.ny as isize - 1) as usize;
        let r2 = r * r;
        let mut out = Vec::new();
        for by in by0..=by1 {
            for bx in bx0..=bx1 {
                for &idx in &self.slots[by * self.nx + bx] {
                    let q = points[idx as usize];
                    let d2 = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
                    if d2 <= r2 {
                        out.push(idx as usize);
                    }
                }
            }
        }
        out
    }

    /// Applies `f` to every bucket slot on the Chebyshev ring of radius
    /// `ring` around (cx, cy), clipped to the grid.
    fn for_ring<F: FnMut(usize)>(&self, cx: usize, cy: usize, ring: usize, mut f: F) {
        let (cx, cy, ring) = (cx as isize, cy as isize, ring as isize);
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        if ring == 0 {
            f((cy * nx + cx) as usize);
            return;
        }
        for bx in (cx - ring).max(0)..=(cx + ring).min(nx - 1) {
            for by in [cy - ring, cy + ring] {
                if by >= 0 && by < ny {
                    f((by * nx + bx) as usize);
                }
            }
        }
        for by in ((cy - ring + 1).max(0))..=((cy + ring - 1).min(ny - 1)) {
            for bx in [cx - ring, cx + ring] {
                if bx >= 0 && bx < nx {
                    f((by * nx + bx) as usize);
                }
            }
        }
    }
}
