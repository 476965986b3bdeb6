//! Geometric point constructors.
//!
//! Constructed points are computed exactly from already-known coordinates
//! each solver iteration; they are never optimization variables. Every
//! constructor reports degeneracy when its conditioning denominator falls
//! below [`DEGENERACY_EPS`].

use super::vec2::Vec2;
use thiserror::Error;

/// Conditioning threshold below which a constructor is undefined.
pub const DEGENERACY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Error)]
#[error("degenerate construction: {reason}")]
pub struct Degenerate {
    pub reason: String,
}

fn degenerate(reason: impl Into<String>) -> Degenerate {
    Degenerate { reason: reason.into() }
}

pub fn midpoint(a: Vec2, b: Vec2) -> Vec2 {
    (a + b) * 0.5
}

/// Intersection of the infinite lines through (p1,p2) and (p3,p4).
pub fn intersection_line_line(p1: Vec2, p2: Vec2, p3: Vec2, p4: Vec2) -> Result<Vec2, Degenerate> {
    let d1 = p2 - p1;
    let d2 = p4 - p3;
    let n1 = d1.norm();
    let n2 = d2.norm();
    if n1 < DEGENERACY_EPS || n2 < DEGENERACY_EPS {
        return Err(degenerate("zero-length carrier"));
    }
    // sin of the angle between the carriers
    let denom = d1.cross(d2) / (n1 * n2);
    if denom.abs() < DEGENERACY_EPS {
        return Err(degenerate("parallel carriers have no intersection"));
    }
    let t = (p3 - p1).cross(d2) / d1.cross(d2);
    Ok(p1 + d1 * t)
}

/// Intersection of the line through (p1,p2) with a circle; branch 0 is the
/// smaller line parameter.
pub fn intersection_line_circle(
    p1: Vec2,
    p2: Vec2,
    center: Vec2,
    radius: f64,
    branch: u8,
) -> Result<Vec2, Degenerate> {
    let d = p2 - p1;
    let len_sq = d.norm_sq();
    if len_sq < DEGENERACY_EPS {
        return Err(degenerate("zero-length carrier"));
    }
    let f = p1 - center;
    let a = len_sq;
    let b = 2.0 * f.dot(d);
    let c = f.norm_sq() - radius * radius;
    let disc = b * b - 4.0 * a * c;
    if disc < DEGENERACY_EPS * a * a {
        return Err(degenerate("line misses the circle"));
    }
    let sq = disc.sqrt();
    let t0 = (-b - sq) / (2.0 * a);
    let t1 = (-b + sq) / (2.0 * a);
    let t = if branch == 0 { t0 } else { t1 };
    Ok(p1 + d * t)
}

/// Intersection of two circles; branch 0 lies to the left of the directed
/// center line c1 -> c2.
pub fn intersection_circle_circle(
    c1: Vec2,
    r1: f64,
    c2: Vec2,
    r2: f64,
    branch: u8,
) -> Result<Vec2, Degenerate> {
    let d = c2 - c1;
    let dist = d.norm();
    if dist < DEGENERACY_EPS {
        return Err(degenerate("concentric circles"));
    }
    if dist > r1 + r2 || dist < (r1 - r2).abs() {
        return Err(degenerate("circles do not intersect"));
    }
    let a = (r1 * r1 - r2 * r2 + dist * dist) / (2.0 * dist);
    let h_sq = r1 * r1 - a * a;
    if h_sq < 0.0 {
        return Err(degenerate("circles do not intersect"));
    }
    let h = h_sq.sqrt();
    if h < DEGENERACY_EPS {
        return Err(degenerate("circles are tangent: branches coincide"));
    }
    let base = c1 + d * (a / dist);
    let offset = d.perp() * (h / dist);
    Ok(if branch == 0 { base + offset } else { base - offset })
}

/// Orthogonal projection of `p` onto the line through (a,b).
pub fn foot_of_perpendicular(p: Vec2, a: Vec2, b: Vec2) -> Result<Vec2, Degenerate> {
    let d = b - a;
    let len_sq = d.norm_sq();
    if len_sq < DEGENERACY_EPS {
        return Err(degenerate("zero-length carrier"));
    }
    let t = (p - a).dot(d) / len_sq;
    Ok(a + d * t)
}

/// Point where a tangent from the external point `p` touches the circle;
/// branch 0 lies to the left of the directed line center -> p.
pub fn tangent_point(p: Vec2, center: Vec2, radius: f64, branch: u8) -> Result<Vec2, Degenerate> {
    let d = p - center;
    let dist = d.norm();
    if dist < DEGENERACY_EPS {
        return Err(degenerate("external point coincides with the center"));
    }
    if dist <= radius + DEGENERACY_EPS {
        return Err(degenerate("point is not outside the circle"));
    }
    // Tangency points lie at distance r from the center, with the radius
    // perpendicular to the tangent: cos(theta) = r / |CP|.
    let cos_t = radius / dist;
    let sin_t = (1.0 - cos_t * cos_t).sqrt();
    if sin_t < DEGENERACY_EPS {
        return Err(degenerate("tangent branches coincide"));
    }
    let u = d / dist;
    let v = u.perp();
    let along = u * (radius * cos_t);
    let across = v * (radius * sin_t);
    Ok(if branch == 0 { center + along + across } else { center + along - across })
}

/// Point at parameter `t` along the segment (a,b).
pub fn point_on_segment(a: Vec2, b: Vec2, t: f64) -> Vec2 {
    a + (b - a) * t
}

/// Point at parameter `t` (full turns) around the circle, measured from
/// the positive x axis.
pub fn point_on_circle(center: Vec2, radius: f64, t: f64) -> Vec2 {
    let theta = t * std::f64::consts::TAU;
    center + Vec2::new(theta.cos(), theta.sin()) * radius
}

/// Point at `a + factor * (b - a)`; factors outside [0,1] land on the
/// extension of the segment.
pub fn extension_point(a: Vec2, b: Vec2, factor: f64) -> Vec2 {
    a + (b - a) * factor
}

/// Center of the circle through three points (equivalently the
/// circumcenter of the triangle they form).
pub fn circumcenter(a: Vec2, b: Vec2, c: Vec2) -> Result<Vec2, Degenerate> {
    let d = 2.0 * ((b - a).cross(c - a));
    let scale = (b - a).norm() * (c - a).norm();
    if scale < DEGENERACY_EPS || (d / (2.0 * scale)).abs() < DEGENERACY_EPS {
        return Err(degenerate("collinear points have no circumcenter"));
    }
    let asq = a.norm_sq();
    let bsq = b.norm_sq();
    let csq = c.norm_sq();
    let ux = (asq * (b.y - c.y) + bsq * (c.y - a.y) + csq * (a.y - b.y)) / d;
    let uy = (asq * (c.x - b.x) + bsq * (a.x - c.x) + csq * (b.x - a.x)) / d;
    Ok(Vec2::new(ux, uy))
}

pub fn incenter(a: Vec2, b: Vec2, c: Vec2) -> Result<Vec2, Degenerate> {
    let la = b.dist(c);
    let lb = a.dist(c);
    let lc = a.dist(b);
    let perimeter = la + lb + lc;
    if perimeter < DEGENERACY_EPS {
        return Err(degenerate("degenerate triangle"));
    }
    Ok((a * la + b * lb + c * lc) / perimeter)
}

pub fn centroid(a: Vec2, b: Vec2, c: Vec2) -> Vec2 {
    (a + b + c) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_line_basic() {
        let p = intersection_line_line(
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 2.0),
            Vec2::new(0.0, 2.0),
            Vec2::new(2.0, 0.0),
        )
        .unwrap();
        assert!((p.x - 1.0).abs() < 1e-12 && (p.y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parallel_lines_are_degenerate() {
        let r = intersection_line_line(
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(1.0, 1.0),
        );
        assert!(r.is_err());
    }

    #[test]
    fn tangent_branches_satisfy_definition() {
        let center = Vec2::new(0.0, 0.0);
        let r = 1.0;
        let p = Vec2::new(3.0, 0.5);
        for branch in [0u8, 1u8] {
            let t = tangent_point(p, center, r, branch).unwrap();
            assert!((t.dist(center) - r).abs() < 1e-9, "on circle");
            let radius = t - center;
            let tangent = p - t;
            assert!(radius.dot(tangent).abs() < 1e-9, "radius perpendicular to tangent");
        }
        let t0 = tangent_point(p, center, r, 0).unwrap();
        let t1 = tangent_point(p, center, r, 1).unwrap();
        assert!(t0.dist(t1) > 1e-6, "branches are distinct");
    }

    #[test]
    fn circumcenter_equidistant() {
        let a = Vec2::new(0.0, 0.0);
        let b = Vec2::new(4.0, 0.0);
        let c = Vec2::new(1.0, 3.0);
        let o = circumcenter(a, b, c).unwrap();
        assert!((o.dist(a) - o.dist(b)).abs() < 1e-9);
        assert!((o.dist(a) - o.dist(c)).abs() < 1e-9);
    }
}
