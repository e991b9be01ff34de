//! Bearings, angular gaps and the geometry metrics derived from them.
//!
//! Angles are radians, measured counter-clockwise from the positive x axis as
//! seen from the device at the origin. Only the bearings of the participating
//! base stations matter: every metric here is invariant to their distances.
//!
//! The information-matrix routes accumulate in double-double precision. The
//! determinant of a 2×2 Fisher matrix cancels catastrophically when bearings
//! cluster, and plain `f64` accumulation would make the matrix route disagree
//! with the pairwise-sine route long before the geometry is actually singular.

use std::f64::consts::{PI, TAU};

use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Information-matrix determinants at or below `SINGULAR_DET_RATIO * L²` are
/// treated as singular and produce an infinite GDOP.
pub const SINGULAR_DET_RATIO: f64 = 1e-24;

/// Maximum gaps within this distance of π are hull-boundary cases.
pub const HULL_BOUNDARY_TOL: f64 = 1e-12;

/// `|sin ψ|` at or below this value makes [`gdop_bound`] infinite.
const BOUND_SIN_TOL: f64 = 1e-12;

/// Sorted bearings of the participating base stations.
///
/// Bearings lie in `[0, 2π)` and are sorted ascending. Coincident bearings are
/// kept and show up as zero-width gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSet {
    bearings: Vec<f64>,
}

impl AngleSet {
    /// Builds a set from arbitrary bearings, wrapping each into `[0, 2π)`.
    pub fn from_bearings<I>(bearings: I) -> Result<Self>
    where
        I: IntoIterator<Item = f64>,
    {
        let mut bearings = bearings
            .into_iter()
            .map(|b| {
                if b.is_finite() {
                    Ok(normalize_bearing(b))
                } else {
                    Err(Error::DegenerateInput("bearing is not finite"))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if bearings.is_empty() {
            return Err(Error::InsufficientGeometry {
                required: 1,
                actual: 0,
            });
        }
        bearings.sort_by(f64::total_cmp);
        Ok(Self { bearings })
    }

    /// Bearings of `positions` (device at the origin). Same as [`compute_angle_set`].
    pub fn from_positions(positions: &[[f64; 2]]) -> Result<Self> {
        let bearings = positions
            .iter()
            .map(|&p| bearing_of(p))
            .collect::<Result<Vec<_>>>()?;
        Self::from_bearings(bearings)
    }

    pub fn bearings(&self) -> &[f64] {
        &self.bearings
    }

    /// Number of base stations, `L`.
    pub fn len(&self) -> usize {
        self.bearings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bearings.is_empty()
    }

    /// The `L` gaps between consecutive bearings; the last one wraps from the
    /// largest bearing back around to the smallest.
    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        let b = &self.bearings;
        let wrap = TAU - (b[b.len() - 1] - b[0]);
        b.windows(2)
            .map(|w| w[1] - w[0])
            .chain(std::iter::once(wrap))
    }

    /// Largest gap, `Ψ_max`. See [`psi_max`].
    pub fn psi_max(&self) -> f64 {
        self.gaps().fold(0.0, f64::max)
    }

    /// The same stations seen from a frame rotated by `angle`.
    pub fn rotated(&self, angle: f64) -> Self {
        Self::from_bearings(self.bearings.iter().map(|b| b + angle))
            .expect("rotation of a valid set is valid")
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_bearing(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(TAU);
    // rem_euclid may round up to exactly 2π for tiny negative inputs.
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

fn bearing_of([x, y]: [f64; 2]) -> Result<f64> {
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::DegenerateInput("position is not finite"));
    }
    if x == 0.0 && y == 0.0 {
        return Err(Error::DegenerateInput("base station located at the device"));
    }
    Ok(normalize_bearing(y.atan2(x)))
}

/// Bearings of base stations at `positions`, relative to the device at the origin.
pub fn compute_angle_set(positions: &[[f64; 2]]) -> Result<AngleSet> {
    AngleSet::from_positions(positions)
}

/// Maximum angular separation `Ψ_max` between adjacent bearings, wraparound
/// included. A single station leaves the full circle, `2π`.
pub fn psi_max(angles: &AngleSet) -> f64 {
    angles.psi_max()
}

fn require(angles: &AngleSet, required: usize) -> Result<()> {
    if angles.len() < required {
        Err(Error::InsufficientGeometry {
            required,
            actual: angles.len(),
        })
    } else {
        Ok(())
    }
}

/// `tr(M⁻¹)` for the symmetric matrix `[[a, b], [b, d]]`, or infinity when the
/// determinant is negligible relative to `L²`.
fn inverse_trace(a: TwoFloat, d: TwoFloat, b: TwoFloat, l: usize) -> f64 {
    let det = a * d - b * b;
    let scale = (l * l) as f64;
    if det.hi() <= SINGULAR_DET_RATIO * scale {
        return f64::INFINITY;
    }
    ((a + d) / det).hi()
}

/// TOA GDOP, `sqrt(tr((HᵀH)⁻¹))`, with rows `[cos θᵢ, sin θᵢ]`.
///
/// Returns infinity when the bearings are collinear.
pub fn gdop_toa_matrix(angles: &AngleSet) -> Result<f64> {
    require(angles, 2)?;
    let zero = TwoFloat::from(0.0);
    let (mut cc, mut ss, mut cs) = (zero, zero, zero);
    for &theta in angles.bearings() {
        let (s, c) = theta.sin_cos();
        cc += TwoFloat::new_mul(c, c);
        ss += TwoFloat::new_mul(s, s);
        cs += TwoFloat::new_mul(c, s);
    }
    Ok(inverse_trace(cc, ss, cs, angles.len()).sqrt())
}

/// TOA GDOP through pairwise bearing differences:
/// `sqrt(L) / sqrt(Σ_{i<j} sin²(θⱼ − θᵢ))`.
pub fn gdop_toa_anglesum(angles: &AngleSet) -> Result<f64> {
    require(angles, 2)?;
    let b = angles.bearings();
    let l = b.len();
    let mut denom = 0.0;
    for (i, &bi) in b.iter().enumerate() {
        for &bj in &b[i + 1..] {
            let s = (bj - bi).sin();
            denom += s * s;
        }
    }
    if denom <= SINGULAR_DET_RATIO * (l * l) as f64 {
        return Ok(f64::INFINITY);
    }
    Ok((l as f64 / denom).sqrt())
}

/// Upper bound on the TOA GDOP from the largest gap: `sqrt(L) / |sin Ψ_max|`.
pub fn gdop_bound(l: usize, psi_max: f64) -> f64 {
    let s = psi_max.sin().abs();
    if s <= BOUND_SIN_TOL {
        f64::INFINITY
    } else {
        (l as f64).sqrt() / s
    }
}

/// TDOA GDOP with differences taken against `reference_index` (an index into
/// `angles.bearings()`).
///
/// Rows are `uᵢ − u_ref` and the difference noise has covariance
/// `σ_r²(I + 11ᵀ)`, whose normalized inverse is `I − 11ᵀ/L`. The resulting
/// Fisher matrix `HᵀH − (Hᵀ1)(Hᵀ1)ᵀ/L` does not depend on which station is
/// the reference.
pub fn gdop_tdoa(angles: &AngleSet, reference_index: usize) -> Result<f64> {
    require(angles, 3)?;
    let b = angles.bearings();
    let l = b.len();
    if reference_index >= l {
        return Err(Error::IndexOutOfRange {
            index: reference_index,
            len: l,
        });
    }
    let (sr, cr) = b[reference_index].sin_cos();
    let zero = TwoFloat::from(0.0);
    let (mut xx, mut yy, mut xy, mut sx, mut sy) = (zero, zero, zero, zero, zero);
    for (i, &theta) in b.iter().enumerate() {
        if i == reference_index {
            continue;
        }
        let (s, c) = theta.sin_cos();
        let dx = TwoFloat::new_sub(c, cr);
        let dy = TwoFloat::new_sub(s, sr);
        xx += dx * dx;
        yy += dy * dy;
        xy += dx * dy;
        sx += dx;
        sy += dy;
    }
    let n = TwoFloat::from(l as f64);
    let jxx = xx - sx * sx / n;
    let jyy = yy - sy * sy / n;
    let jxy = xy - sx * sy / n;
    Ok(inverse_trace(jxx, jyy, jxy, l).sqrt())
}

/// Cramér–Rao bound on position MSE for equal ranging error `sigma_r`: `σ_r²·GDOP²`.
pub fn crlb_from_gdop(gdop: f64, sigma_r: f64) -> f64 {
    sigma_r * sigma_r * gdop * gdop
}

/// Whether the device lies inside the convex hull of the stations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullMembership {
    Inside,
    Outside,
    /// `Ψ_max` is within [`HULL_BOUNDARY_TOL`] of π: the device sits on a hull
    /// edge (up to rounding) and membership is not classified.
    Boundary,
}

impl HullMembership {
    pub fn is_inside(self) -> bool {
        self == Self::Inside
    }

    pub fn is_degenerate(self) -> bool {
        self == Self::Boundary
    }
}

/// Classifies hull membership from the largest gap: inside iff `Ψ_max < π`.
pub fn inside_convex_hull(angles: &AngleSet) -> Result<HullMembership> {
    require(angles, 3)?;
    Ok(classify_hull(angles.psi_max()))
}

fn classify_hull(psi: f64) -> HullMembership {
    if (psi - PI).abs() < HULL_BOUNDARY_TOL {
        HullMembership::Boundary
    } else if psi < PI {
        HullMembership::Inside
    } else {
        HullMembership::Outside
    }
}

/// Geometry metrics for one positioning scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryRecord {
    /// Number of participating stations.
    pub l: usize,
    pub psi_max: f64,
    pub gdop_toa: f64,
    pub gdop_tdoa: f64,
    pub hull: HullMembership,
}

impl GeometryRecord {
    /// Evaluates all metrics for stations at `positions`; `positions[0]` is
    /// the TDOA reference. Requires at least three stations.
    pub fn from_positions(positions: &[[f64; 2]]) -> Result<Self> {
        let first = positions.first().map(|&p| bearing_of(p)).transpose()?;
        let angles = AngleSet::from_positions(positions)?;
        require(&angles, 3)?;
        let reference = first
            .and_then(|r| angles.bearings().iter().position(|&b| b == r))
            .expect("reference bearing is part of the set");
        Self::evaluate(&angles, reference)
    }

    /// Evaluates all metrics for `angles` with TDOA reference `reference_index`.
    pub fn evaluate(angles: &AngleSet, reference_index: usize) -> Result<Self> {
        let psi = angles.psi_max();
        Ok(Self {
            l: angles.len(),
            psi_max: psi,
            gdop_toa: gdop_toa_matrix(angles)?,
            gdop_tdoa: gdop_tdoa(angles, reference_index)?,
            hull: inside_convex_hull(angles)?,
        })
    }

    pub fn inside_hull(&self) -> bool {
        self.hull.is_inside()
    }
}
