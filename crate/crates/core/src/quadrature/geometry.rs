//! Exact area of a disk intersected with an axis-aligned rectangle, and the
//! volume of a ball intersected with the unit cube.

use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::rules::integrate_1d;

/// Area of `{y ≥ b} ∩ B(0; r)` for any real `b`.
fn half_plane(b: f64, r: f64) -> f64 {
    if b >= r {
        0.0
    } else if b <= -r {
        PI * r * r
    } else {
        r * r * (b / r).acos() - b * (r * r - b * b).sqrt()
    }
}

// Antiderivative of sqrt(r² − x²).
fn arc_primitive(x: f64, r: f64) -> f64 {
    let x = x.clamp(-r, r);
    0.5 * (x * (r * r - x * x).max(0.0).sqrt() + r * r * (x / r).asin())
}

/// Area of `{x ≥ a, y ≥ b} ∩ B(0; r)`.
fn quadrant(a: f64, b: f64, r: f64) -> f64 {
    if a < 0.0 {
        return half_plane(b, r) - quadrant(-a, b, r);
    }
    if b < 0.0 {
        return half_plane(a, r) - quadrant(a, -b, r);
    }
    if a * a + b * b >= r * r {
        return 0.0;
    }
    let x_max = (r * r - b * b).sqrt();
    (arc_primitive(x_max, r) - arc_primitive(a, r) - b * (x_max - a)).max(0.0)
}

/// Area of `B(center; r) ∩ [lo.0, hi.0] × [lo.1, hi.1]`.
pub fn disk_rect_area(center: [f64; 2], r: f64, lo: [f64; 2], hi: [f64; 2]) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let (x0, x1) = (lo[0] - center[0], hi[0] - center[0]);
    let (y0, y1) = (lo[1] - center[1], hi[1] - center[1]);
    let rect = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    let far = x0.abs().max(x1.abs()).powi(2) + y0.abs().max(y1.abs()).powi(2);
    if far <= r * r {
        return rect;
    }
    if x0 <= -r && x1 >= r && y0 <= -r && y1 >= r {
        return PI * r * r;
    }
    let area = quadrant(x0, y0, r) - quadrant(x1, y0, r) - quadrant(x0, y1, r) + quadrant(x1, y1, r);
    area.clamp(0.0, rect.min(PI * r * r))
}

/// `|B(center; r) ∩ [0,1]²|` in closed form.
pub fn vol_disk_box(center: [f64; 2], r: f64) -> f64 {
    disk_rect_area(center, r, [0.0, 0.0], [1.0, 1.0])
}

/// `|B(center; r) ∩ [0,1]³|`, integrating disk∩square slices along the last axis.
pub fn vol_ball_cube(center: [f64; 3], r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let lo = (center[2] - r).max(0.0);
    let hi = (center[2] + r).min(1.0);
    let slice = |z: f64| {
        let s = (r * r - (z - center[2]).powi(2)).max(0.0).sqrt();
        vol_disk_box([center[0], center[1]], s)
    };
    // slice radius crosses the in-plane edge and corner distances at known heights
    let mut breaks = [0.0; 16];
    let mut k = 0;
    let (x, y) = (center[0], center[1]);
    for dist in [x, 1.0 - x, y, 1.0 - y] {
        breaks[k] = dist;
        k += 1;
    }
    for dx in [x, 1.0 - x] {
        for dy in [y, 1.0 - y] {
            breaks[k] = (dx * dx + dy * dy).sqrt();
            k += 1;
        }
    }
    let mut zs = [0.0; 16];
    let mut m = 0;
    for &dist in &breaks[..k] {
        if dist < r {
            let h = (r * r - dist * dist).sqrt();
            zs[m] = center[2] - h;
            zs[m + 1] = center[2] + h;
            m += 2;
        }
    }
    integrate_1d(slice, lo, hi, &zs[..m], 1e-11, 1e-16, 2_000).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn interior_and_corner_disks() {
        assert_relative_eq!(vol_disk_box([0.5, 0.5], 0.1), PI * 0.01, max_relative = 1e-14);
        assert_relative_eq!(vol_disk_box([0.0, 0.0], 0.1), PI * 0.01 / 4.0, max_relative = 1e-13);
        assert_relative_eq!(vol_disk_box([1.0, 0.0], 0.1), PI * 0.01 / 4.0, max_relative = 1e-13);
        assert_relative_eq!(vol_disk_box([0.5, 0.0], 0.1), PI * 0.01 / 2.0, max_relative = 1e-13);
    }

    #[test]
    fn one_segment_removed() {
        // πr² minus the segment beyond x = 0 at offset 0.05
        let seg = 0.01 * (0.5f64).acos() - 0.05 * (0.01f64 - 0.0025).sqrt();
        assert_relative_eq!(vol_disk_box([0.05, 0.5], 0.1), PI * 0.01 - seg, max_relative = 1e-13);
        assert_relative_eq!(vol_disk_box([0.05, 0.5], 0.1), 0.025_274_078_042_854_15, max_relative = 1e-9);
    }

    #[test]
    fn covering_and_degenerate() {
        assert_relative_eq!(vol_disk_box([0.3, 0.9], 2.0), 1.0, max_relative = 1e-13);
        assert_eq!(vol_disk_box([0.3, 0.9], 0.0), 0.0);
    }

    #[test]
    fn ball_cube_volumes() {
        let v = 4.0 / 3.0 * PI * 0.001;
        assert_relative_eq!(vol_ball_cube([0.5, 0.5, 0.5], 0.1), v, max_relative = 1e-10);
        assert_relative_eq!(vol_ball_cube([0.0, 0.0, 0.0], 0.1), v / 8.0, max_relative = 1e-10);
        assert_relative_eq!(vol_ball_cube([0.5, 0.0, 0.0], 0.1), v / 4.0, max_relative = 1e-10);
        assert_relative_eq!(vol_ball_cube([0.2, 0.7, 0.4], 2.0), 1.0, max_relative = 1e-10);
    }
}
