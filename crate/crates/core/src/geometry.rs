//! TRIS element layout, point distances, the Rayleigh near-field boundary and
//! the feasible region of the movable antenna.
//!
//! Coordinates: the TRIS lies in the plane `z = 0`, centered at the origin.
//! The movable antenna (MA) lives on the `z < 0` side, the user on `z > 0`.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point (or displacement) in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3 {
    pub const ORIGIN: Position3 = Position3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Add for Position3 {
    type Output = Position3;
    fn add(self, rhs: Position3) -> Position3 {
        Position3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Position3 {
    type Output = Position3;
    fn sub(self, rhs: Position3) -> Position3 {
        Position3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Position3 {
    type Output = Position3;
    fn mul(self, rhs: f64) -> Position3 {
        Position3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

/// Euclidean distance `‖p − q‖`.
pub fn distance(p: Position3, q: Position3) -> f64 {
    (p - q).norm()
}

/// Uniform planar TRIS grid in `z = 0`, centered at the origin.
///
/// Elements are stored row-major starting from the most negative `(x, y)`:
/// index `row * cols + col`, with `x` increasing along a row and `y`
/// increasing from row to row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrisGeometry {
    rows: usize,
    cols: usize,
    spacing: f64,
    elements: Vec<Position3>,
}

impl TrisGeometry {
    /// Square `side_count × side_count` grid with the given element spacing.
    pub fn square(side_count: usize, spacing: f64) -> Result<Self> {
        Self::rectangular(side_count, side_count, spacing)
    }

    /// `rows × cols` grid. Only the square form is used by the experiments;
    /// the rectangular form exists for element counts that are not perfect
    /// squares (small brute-force checks).
    pub fn rectangular(rows: usize, cols: usize, spacing: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("TRIS grid needs at least one row and column"));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::invalid(format!(
                "TRIS spacing must be positive and finite, got {spacing}"
            )));
        }
        let x0 = (cols as f64 - 1.0) / 2.0;
        let y0 = (rows as f64 - 1.0) / 2.0;
        let elements = (0..rows)
            .flat_map(|r| {
                (0..cols).map(move |c| {
                    Position3::new((c as f64 - x0) * spacing, (r as f64 - y0) * spacing, 0.0)
                })
            })
            .collect();
        Ok(Self {
            rows,
            cols,
            spacing,
            elements,
        })
    }

    /// Number of elements `N`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Side length of a square grid, `None` for rectangular grids.
    pub fn side_count(&self) -> Option<usize> {
        (self.rows == self.cols).then_some(self.rows)
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn elements(&self) -> &[Position3] {
        &self.elements
    }
}

/// `build_tris_grid(side_count, spacing)`: square grid of `side_count²` elements.
pub fn build_tris_grid(side_count: usize, spacing: f64) -> Result<TrisGeometry> {
    TrisGeometry::square(side_count, spacing)
}

/// Rayleigh distance `2 D² / λ` with aperture `D = √(2N) · spacing`,
/// i.e. `4 N spacing² / λ`.
pub fn rayleigh_distance(geometry: &TrisGeometry, wavelength: f64) -> f64 {
    let aperture_sq = 2.0 * geometry.len() as f64 * geometry.spacing * geometry.spacing;
    2.0 * aperture_sq / wavelength
}

/// Square feasible region of side `side`, parallel to the TRIS, in the plane
/// `z = center.z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaRegion {
    pub center: Position3,
    pub side: f64,
}

impl MaRegion {
    pub fn new(center: Position3, side: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::invalid("MA region center must be finite"));
        }
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::invalid(format!(
                "MA region side must be positive and finite, got {side}"
            )));
        }
        if center.z >= 0.0 {
            return Err(Error::invalid(format!(
                "MA region must lie behind the TRIS (z < 0), got z = {}",
                center.z
            )));
        }
        Ok(Self { center, side })
    }

    pub fn half_side(&self) -> f64 {
        self.side / 2.0
    }

    /// Point at normalized coordinates `(u, v) ∈ [0, 1]²`, with `(0.5, 0.5)`
    /// the center.
    pub fn point_at(&self, u: f64, v: f64) -> Position3 {
        Position3::new(
            self.center.x + (u - 0.5) * self.side,
            self.center.y + (v - 0.5) * self.side,
            self.center.z,
        )
    }

    /// Uniform `n × n` grid covering the closed region, boundaries included.
    pub fn grid(&self, n: usize) -> impl Iterator<Item = Position3> + '_ {
        let denom = n.saturating_sub(1).max(1) as f64;
        let single = n == 1;
        (0..n).flat_map(move |i| {
            (0..n).map(move |j| {
                if single {
                    self.center
                } else {
                    self.point_at(i as f64 / denom, j as f64 / denom)
                }
            })
        })
    }
}

/// Slack on the in-plane box test, meters. Absorbs rounding in points built
/// as `center + offset`.
pub const REGION_TOLERANCE: f64 = 1e-12;

/// Whether `t` lies in the closed square region (same plane, inside the box).
pub fn in_region(t: Position3, region: &MaRegion) -> bool {
    let h = region.half_side() + REGION_TOLERANCE;
    t.z == region.center.z
        && (t.x - region.center.x).abs() <= h
        && (t.y - region.center.y).abs() <= h
}

/// MA position together with the region it is constrained to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaState {
    position: Position3,
    region: MaRegion,
}

impl MaState {
    pub fn new(position: Position3, region: MaRegion) -> Result<Self> {
        if !in_region(position, &region) {
            return Err(Error::invalid(format!(
                "MA position ({}, {}, {}) is outside its region",
                position.x, position.y, position.z
            )));
        }
        Ok(Self { position, region })
    }

    pub fn position(&self) -> Position3 {
        self.position
    }

    pub fn region(&self) -> &MaRegion {
        &self.region
    }

    /// Moves to `position` if it is feasible; returns whether the move happened.
    pub fn try_move(&mut self, position: Position3) -> bool {
        let ok = in_region(position, &self.region);
        if ok {
            self.position = position;
        }
        ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: f64 = 0.0075;

    #[test]
    fn single_element_grid_sits_at_origin() {
        let g = build_tris_grid(1, D).unwrap();
        assert_eq!(g.elements(), &[Position3::ORIGIN]);
    }

    #[test]
    fn two_by_two_grid_is_centered_row_major() {
        let g = build_tris_grid(2, D).unwrap();
        let h = 0.00375;
        let expected = [
            Position3::new(-h, -h, 0.0),
            Position3::new(h, -h, 0.0),
            Position3::new(-h, h, 0.0),
            Position3::new(h, h, 0.0),
        ];
        for (e, x) in g.elements().iter().zip(expected) {
            assert!(distance(*e, x) < 1e-15);
        }
    }

    #[test]
    fn ten_by_ten_extremes() {
        let g = build_tris_grid(10, D).unwrap();
        assert_eq!(g.len(), 100);
        let xmin = g.elements().iter().map(|e| e.x).fold(f64::INFINITY, f64::min);
        let xmax = g.elements().iter().map(|e| e.x).fold(f64::NEG_INFINITY, f64::max);
        assert!((xmin + 0.03375).abs() < 1e-15);
        assert!((xmax - 0.03375).abs() < 1e-15);
        // adjacent spacing along a row and a column
        assert!((distance(g.elements()[0], g.elements()[1]) - D).abs() < 1e-15);
        assert!((distance(g.elements()[0], g.elements()[10]) - D).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_bad_inputs() {
        assert!(matches!(build_tris_grid(0, D), Err(Error::InvalidArgument(_))));
        assert!(matches!(build_tris_grid(3, 0.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(build_tris_grid(3, -1.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn distance_examples() {
        let o = Position3::ORIGIN;
        assert_eq!(distance(Position3::new(0.0, 0.0, -0.5), o), 0.5);
        assert_eq!(distance(Position3::new(3.0, 4.0, 0.0), o), 5.0);
        let p = Position3::new(0.1, 0.2, -0.5);
        let q = Position3::new(0.00375, 0.00375, 0.0);
        let direct = ((0.1f64 - 0.00375).powi(2) + (0.2f64 - 0.00375).powi(2) + 0.25).sqrt();
        assert!((distance(p, q) - direct).abs() < 1e-15);
        assert_eq!(distance(p, q), distance(q, p));
    }

    #[test]
    fn rayleigh_distance_examples() {
        let lam = 0.015;
        let g100 = build_tris_grid(10, D).unwrap();
        let g324 = build_tris_grid(18, D).unwrap();
        assert!((rayleigh_distance(&g100, lam) - 1.5).abs() < 1e-12);
        assert!((rayleigh_distance(&g324, lam) - 4.86).abs() < 1e-12);
        let g1 = build_tris_grid(1, lam / 2.0).unwrap();
        assert!((rayleigh_distance(&g1, lam) - lam).abs() < 1e-15);
        // 0.5 m MA-TRIS separation is in the near field for both sizes
        assert!(0.5 < rayleigh_distance(&g100, lam));
        assert!(0.5 < rayleigh_distance(&g324, lam));
    }

    #[test]
    fn region_membership_is_closed() {
        let r = MaRegion::new(Position3::new(0.0, 0.0, -0.5), 0.15).unwrap();
        assert!(in_region(Position3::new(0.0, 0.0, -0.5), &r));
        assert!(in_region(Position3::new(0.075, 0.0, -0.5), &r));
        assert!(!in_region(Position3::new(0.076, 0.0, -0.5), &r));
        assert!(!in_region(Position3::new(0.0, 0.0, -0.49), &r));
    }

    #[test]
    fn region_grid_covers_corners() {
        let r = MaRegion::new(Position3::new(0.1, -0.2, -1.0), 0.2).unwrap();
        let pts: Vec<_> = r.grid(3).collect();
        assert_eq!(pts.len(), 9);
        assert!(pts.iter().all(|p| in_region(*p, &r)));
        assert!(distance(pts[0], Position3::new(0.0, -0.3, -1.0)) < 1e-15);
        assert!(distance(pts[4], r.center) < 1e-15);
    }

    #[test]
    fn ma_state_enforces_feasibility() {
        let r = MaRegion::new(Position3::new(0.0, 0.0, -0.5), 0.15).unwrap();
        assert!(MaState::new(Position3::new(0.1, 0.0, -0.5), r).is_err());
        let mut s = MaState::new(r.center, r).unwrap();
        assert!(!s.try_move(Position3::new(0.1, 0.0, -0.5)));
        assert!(s.try_move(Position3::new(0.05, 0.0, -0.5)));
        assert_eq!(s.position().x, 0.05);
    }

    #[test]
    fn region_rejects_user_side_plane() {
        assert!(MaRegion::new(Position3::new(0.0, 0.0, 0.5), 0.15).is_err());
        assert!(MaRegion::new(Position3::new(0.0, 0.0, -0.5), 0.0).is_err());
    }
}
