//! Angle-pair relations: vertical angles at crossings, and alternate
//! interior / corresponding / co-interior angles in transversal
//! configurations over provably parallel carriers.
//!
//! Angles are named only from labeled scene points; each ray is named by
//! the nearest labeled point that a declared element actually reaches.
//! Sides of the transversal are classified by the sign of the cross
//! product of the transversal direction with the vertex-to-arm vector
//! (see `docs/angle-relations.md`).

use super::derive::DeriveCtx;
use super::kinds::{classify_fact, Derivation, ElementRef, Fact, FactKind};
use super::verify::verify_fact;
use crate::geom::Vec2;
use crate::scene::PointId;
use std::collections::BTreeSet;

/// Direction of a carrier from its first two labeled points.
fn carrier_direction(ctx: &DeriveCtx, carrier: usize) -> Option<Vec2> {
    let pts: Vec<PointId> = ctx.prov.carriers[carrier].iter().copied().collect();
    if pts.len() < 2 {
        return None;
    }
    let d = ctx.scene.pos(pts[1]) - ctx.scene.pos(pts[0]);
    let n = d.norm();
    (n > 1e-9).then(|| d / n)
}

/// Unique labeled point shared by two carriers (two shared points would
/// have merged them).
fn common_point(ctx: &DeriveCtx, c1: usize, c2: usize) -> Option<PointId> {
    ctx.prov.carriers[c1]
        .intersection(&ctx.prov.carriers[c2])
        .next()
        .copied()
}

/// Nearest labeled arm point on `carrier` from `vertex`, on the side of
/// `axis` selected by `side` (sign of (X - vertex) . axis), restricted to
/// arms a declared element draws.
fn nearest_arm_along(
    ctx: &DeriveCtx,
    carrier: usize,
    vertex: PointId,
    axis: Vec2,
    side: f64,
) -> Option<PointId> {
    let vp = ctx.scene.pos(vertex);
    let mut best: Option<(f64, PointId)> = None;
    for &x in &ctx.prov.carriers[carrier] {
        if x == vertex {
            continue;
        }
        let t = (ctx.scene.pos(x) - vp).dot(axis);
        if t * side <= 1e-9 || !ctx.arm_backed(vertex, x) {
            continue;
        }
        if best.map_or(true, |(bt, _)| t.abs() < bt) {
            best = Some((t.abs(), x));
        }
    }
    best.map(|(_, x)| x)
}

/// Nearest labeled arm on `carrier` from `vertex` on the given side of the
/// transversal (sign of cross(transversal_dir, X - vertex)).
fn nearest_arm_side(
    ctx: &DeriveCtx,
    carrier: usize,
    vertex: PointId,
    transversal_dir: Vec2,
    side: f64,
) -> Option<PointId> {
    let vp = ctx.scene.pos(vertex);
    let mut best: Option<(f64, PointId)> = None;
    for &x in &ctx.prov.carriers[carrier] {
        if x == vertex {
            continue;
        }
        let v = ctx.scene.pos(x) - vp;
        if transversal_dir.cross(v) * side <= 1e-9 || !ctx.arm_backed(vertex, x) {
            continue;
        }
        let d = v.norm();
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, x));
        }
    }
    best.map(|(_, x)| x)
}

struct Collector {
    seen: BTreeSet<(FactKind, ElementRef, ElementRef)>,
    facts: Vec<Fact>,
}

impl Collector {
    fn push(&mut self, ctx: &DeriveCtx, kind: FactKind, g1: ElementRef, g2: ElementRef) {
        let (first, second) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
        if !self.seen.insert((kind, first.clone(), second.clone())) {
            return;
        }
        let mut fact = Fact {
            category: classify_fact(kind),
            kind,
            subjects: vec![first.clone(), second],
            answer_target: first,
            witness: 0.0,
            derivation: Derivation::Both,
        };
        if let Ok(witness) = verify_fact(&fact, ctx.scene, super::derive::FACT_EPS) {
            fact.witness = witness;
            self.facts.push(fact);
        }
    }
}

pub(super) fn angle_relations_with(ctx: &mut DeriveCtx) -> Vec<Fact> {
    let mut out = Collector { seen: BTreeSet::new(), facts: Vec::new() };
    vertical_angles(ctx, &mut out);
    transversal_angles(ctx, &mut out);
    out.facts
}

fn vertical_angles(ctx: &mut DeriveCtx, out: &mut Collector) {
    let n = ctx.prov.carriers.len();
    for c1 in 0..n {
        for c2 in (c1 + 1)..n {
            let Some(vertex) = common_point(ctx, c1, c2) else { continue };
            let (Some(u1), Some(u2)) = (carrier_direction(ctx, c1), carrier_direction(ctx, c2))
            else {
                continue;
            };
            if u1.cross(u2).abs() < 1e-9 {
                continue;
            }
            let a = nearest_arm_along(ctx, c1, vertex, u1, 1.0);
            let c = nearest_arm_along(ctx, c1, vertex, u1, -1.0);
            let b = nearest_arm_along(ctx, c2, vertex, u2, 1.0);
            let d = nearest_arm_along(ctx, c2, vertex, u2, -1.0);
            let (Some(a), Some(b), Some(c), Some(d)) = (a, b, c, d) else { continue };
            out.push(
                ctx,
                FactKind::VerticalAngles,
                ElementRef::angle(a, vertex, b),
                ElementRef::angle(c, vertex, d),
            );
            out.push(
                ctx,
                FactKind::VerticalAngles,
                ElementRef::angle(a, vertex, d),
                ElementRef::angle(c, vertex, b),
            );
        }
    }
}

fn transversal_angles(ctx: &mut DeriveCtx, out: &mut Collector) {
    let parallel_pairs = ctx.prov.parallel_carrier_pairs();
    let n = ctx.prov.carriers.len();
    for (c1, c2) in parallel_pairs {
        for t in 0..n {
            if t == c1 || t == c2 {
                continue;
            }
            let Some(p1) = common_point(ctx, t, c1) else { continue };
            let Some(p2) = common_point(ctx, t, c2) else { continue };
            if p1 == p2 {
                continue;
            }
            let Some(dir_t) = carrier_direction(ctx, t) else { continue };
            let p1p = ctx.scene.pos(p1);
            let p2p = ctx.scene.pos(p2);
            // Interior arm from each vertex points toward the other line.
            let toward2 = if (p2p - p1p).dot(dir_t) >= 0.0 { 1.0 } else { -1.0 };
            let t1_in = nearest_arm_along(ctx, t, p1, dir_t, toward2);
            let t2_in = nearest_arm_along(ctx, t, p2, dir_t, -toward2);

            for side in [1.0, -1.0] {
                let x = nearest_arm_side(ctx, c1, p1, dir_t, side);
                let y_opp = nearest_arm_side(ctx, c2, p2, dir_t, -side);
                let y_same = nearest_arm_side(ctx, c2, p2, dir_t, side);
                if let (Some(t1), Some(t2), Some(x), Some(y)) = (t1_in, t2_in, x, y_opp) {
                    out.push(
                        ctx,
                        FactKind::AlternateInteriorAngles,
                        ElementRef::angle(x, p1, t1),
                        ElementRef::angle(y, p2, t2),
                    );
                }
                if let (Some(t1), Some(t2), Some(x), Some(y)) = (t1_in, t2_in, x, y_same) {
                    out.push(
                        ctx,
                        FactKind::CoInteriorAngles,
                        ElementRef::angle(x, p1, t1),
                        ElementRef::angle(y, p2, t2),
                    );
                }
                // Corresponding: transversal arms point the same way.
                for dt in [1.0, -1.0] {
                    let t1 = nearest_arm_along(ctx, t, p1, dir_t, dt);
                    let t2 = nearest_arm_along(ctx, t, p2, dir_t, dt);
                    if let (Some(t1), Some(t2), Some(x), Some(y)) = (t1, t2, x, y_same) {
                        if t1 != t2 {
                            out.push(
                                ctx,
                                FactKind::CorrespondingAngles,
                                ElementRef::angle(x, p1, t1),
                                ElementRef::angle(y, p2, t2),
                            );
                        }
                    }
                }
            }
        }
    }
}
