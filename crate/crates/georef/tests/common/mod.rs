//! Shared helpers for the integration and acceptance suites: template
//! loading, a scene sweep, and an independent brute-force oracle for the
//! relation kinds {parallel, perpendicular, collinear, equal-length}.
//!
//! The oracle deliberately avoids the library's provability engine: it
//! saturates inference rules with naive fixed-point loops over explicit
//! relation sets, then intersects with exhaustive numeric enumeration.

#![allow(dead_code)]

use georef::facts::{ElementRef, Fact, FactKind};
use georef::geom::{instantiate, ConcreteScene, LinearKind, QualityConfig, SolverConfig, Vec2};
use georef::scene::{
    parse_program, Constraint, Constructor, DeclKind, IdentifierScheme, OnElement, PointId,
    SceneProgram,
};
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

pub fn templates_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("templates")
}

pub fn load_templates() -> Vec<(String, SceneProgram)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(templates_dir())
        .expect("templates dir")
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "scene"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|f| {
            let stem = f.file_stem().unwrap().to_string_lossy().to_string();
            let text = std::fs::read_to_string(&f).expect("template readable");
            let program = parse_program(&stem, &text).expect("template parses");
            (stem, program)
        })
        .collect()
}

/// Solve `seeds_per_template` seeds for every bundled template. Returns
/// (total attempts, solved scenes).
pub fn solve_sweep(seeds_per_template: u64) -> (usize, Vec<(String, ConcreteScene)>) {
    let templates = load_templates();
    let mut scenes = Vec::new();
    let mut attempts = 0;
    for (stem, program) in &templates {
        for seed in 0..seeds_per_template {
            attempts += 1;
            if let Ok(scene) = instantiate(
                program,
                seed,
                &SolverConfig::default(),
                &QualityConfig::default(),
                IdentifierScheme::Common,
            ) {
                scenes.push((stem.clone(), scene));
            }
        }
    }
    (attempts, scenes)
}

type Pair = (char, char);

fn pair(a: PointId, b: PointId) -> Pair {
    let (a, b) = (a.ch(), b.ch());
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Brute-force symbolic state, saturated by fixed-point iteration.
pub struct BruteProver {
    /// Proven collinear point sets (maximal).
    pub lines: Vec<BTreeSet<char>>,
    /// Parallel relation over line-set indices (symmetric).
    pub par: BTreeSet<(usize, usize)>,
    /// Perpendicular relation over line-set indices (symmetric).
    pub perp: BTreeSet<(usize, usize)>,
    /// Equal-length relation over point-pair keys (closed).
    pub equal: BTreeSet<(Pair, Pair)>,
    /// Points proven on each circle, by center letter.
    pub on_circle: BTreeMap<char, BTreeSet<char>>,
}

impl BruteProver {
    pub fn build(program: &SceneProgram) -> Self {
        // Pass 1: raw collinear sets, raw parallel/perpendicular edges
        // (between point-pair keys), raw equalities, circle memberships.
        let mut sets: Vec<BTreeSet<char>> = Vec::new();
        let mut par_edges: Vec<(Pair, Pair)> = Vec::new();
        let mut perp_edges: Vec<(Pair, Pair)> = Vec::new();
        let mut eq_edges: Vec<(Pair, Pair)> = Vec::new();
        let mut on_circle: BTreeMap<char, BTreeSet<char>> = BTreeMap::new();

        let mut add_set = |pts: &[PointId]| {
            sets.push(pts.iter().map(|p| p.ch()).collect());
        };

        for d in &program.declarations {
            match &d.kind {
                DeclKind::Segment { a, b } | DeclKind::Line { a, b } => add_set(&[*a, *b]),
                DeclKind::Ray { origin, through } => add_set(&[*origin, *through]),
                DeclKind::Circle { center, through } => {
                    on_circle.entry(center.ch()).or_default().insert(through.ch());
                }
                DeclKind::ConstructedPoint { id, ctor } => match ctor {
                    Constructor::Midpoint { a, b } => {
                        add_set(&[*a, *b, *id]);
                        eq_edges.push((pair(*a, *id), pair(*id, *b)));
                    }
                    Constructor::IntersectionLineLine { l1, l2 } => {
                        add_set(&[l1.a, l1.b, *id]);
                        add_set(&[l2.a, l2.b, *id]);
                    }
                    Constructor::IntersectionLineCircle { line, circle, .. } => {
                        add_set(&[line.a, line.b, *id]);
                        on_circle.entry(circle.center.ch()).or_default().insert(id.ch());
                    }
                    Constructor::IntersectionCircleCircle { c1, c2, .. } => {
                        on_circle.entry(c1.center.ch()).or_default().insert(id.ch());
                        on_circle.entry(c2.center.ch()).or_default().insert(id.ch());
                    }
                    Constructor::FootOfPerpendicular { from, onto } => {
                        add_set(&[onto.a, onto.b, *id]);
                        add_set(&[*from, *id]);
                        perp_edges.push((pair(*from, *id), pair(onto.a, onto.b)));
                    }
                    Constructor::TangentPoint { from, circle, .. } => {
                        add_set(&[*from, *id]);
                        add_set(&[circle.center, *id]);
                        on_circle.entry(circle.center.ch()).or_default().insert(id.ch());
                        perp_edges.push((pair(*from, *id), pair(circle.center, *id)));
                    }
                    Constructor::PointOn { element, .. } => match element {
                        OnElement::Linear { carrier } => add_set(&[carrier.a, carrier.b, *id]),
                        OnElement::Circle { circle } => {
                            on_circle.entry(circle.center.ch()).or_default().insert(id.ch());
                        }
                    },
                    Constructor::ExtensionPoint { seg, .. } => add_set(&[seg.a, seg.b, *id]),
                    Constructor::CircleCenter { a, b, c } | Constructor::Circumcenter { a, b, c } => {
                        eq_edges.push((pair(*id, *a), pair(*id, *b)));
                        eq_edges.push((pair(*id, *b), pair(*id, *c)));
                    }
                    Constructor::Incenter { .. } | Constructor::Centroid { .. } => {}
                },
                DeclKind::Constraint { constraint } => match constraint {
                    Constraint::Parallel { l1, l2 } => {
                        add_set(&[l1.a, l1.b]);
                        add_set(&[l2.a, l2.b]);
                        par_edges.push((pair(l1.a, l1.b), pair(l2.a, l2.b)));
                    }
                    Constraint::Perpendicular { l1, l2 } => {
                        add_set(&[l1.a, l1.b]);
                        add_set(&[l2.a, l2.b]);
                        perp_edges.push((pair(l1.a, l1.b), pair(l2.a, l2.b)));
                    }
                    Constraint::Tangent { line, .. } => {
                        // Perpendicular radius handled after saturation by
                        // touch-point lookup below.
                        add_set(&[line.a, line.b]);
                    }
                    Constraint::OnCircle { point, circle } => {
                        on_circle.entry(circle.center.ch()).or_default().insert(point.ch());
                    }
                    Constraint::Collinear { a, b, c } => add_set(&[*a, *b, *c]),
                    Constraint::EqualLength { s1, s2 } => {
                        eq_edges.push((pair(s1.a, s1.b), pair(s2.a, s2.b)));
                    }
                    Constraint::EqualAngle { .. } => {}
                    Constraint::AngleBisector { bisector, .. } => add_set(&[bisector.a, bisector.b]),
                    Constraint::IsDiameter { seg, circle } => {
                        add_set(&[seg.a, seg.b, circle.center]);
                        let set = on_circle.entry(circle.center.ch()).or_default();
                        set.insert(seg.a.ch());
                        set.insert(seg.b.ch());
                    }
                    Constraint::IsChord { seg, circle } => {
                        add_set(&[seg.a, seg.b]);
                        let set = on_circle.entry(circle.center.ch()).or_default();
                        set.insert(seg.a.ch());
                        set.insert(seg.b.ch());
                    }
                    Constraint::IsInscribedAngle { angle, circle } => {
                        add_set(&[angle.vertex, angle.arm_a]);
                        add_set(&[angle.vertex, angle.arm_b]);
                        let set = on_circle.entry(circle.center.ch()).or_default();
                        set.insert(angle.arm_a.ch());
                        set.insert(angle.vertex.ch());
                        set.insert(angle.arm_b.ch());
                    }
                    Constraint::IsCentralAngle { angle, circle } => {
                        add_set(&[angle.vertex, angle.arm_a]);
                        add_set(&[angle.vertex, angle.arm_b]);
                        let set = on_circle.entry(circle.center.ch()).or_default();
                        set.insert(angle.arm_a.ch());
                        set.insert(angle.arm_b.ch());
                    }
                    Constraint::IsParallelogram { a, b, c, d } => {
                        add_set(&[*a, *b]);
                        add_set(&[*b, *c]);
                        add_set(&[*c, *d]);
                        add_set(&[*d, *a]);
                        par_edges.push((pair(*a, *b), pair(*c, *d)));
                        par_edges.push((pair(*b, *c), pair(*d, *a)));
                        eq_edges.push((pair(*a, *b), pair(*c, *d)));
                        eq_edges.push((pair(*b, *c), pair(*d, *a)));
                    }
                },
                _ => {}
            }
        }

        // Saturate collinear sets: merge while any two share two points.
        loop {
            let mut merged = None;
            'search: for i in 0..sets.len() {
                for j in (i + 1)..sets.len() {
                    if sets[i].intersection(&sets[j]).count() >= 2 {
                        merged = Some((i, j));
                        break 'search;
                    }
                }
            }
            match merged {
                Some((i, j)) => {
                    let other = sets.remove(j);
                    sets[i].extend(other);
                }
                None => break,
            }
        }

        // Tangent constraints: once a carrier point is proven on the
        // circle, the radius to it is perpendicular to the tangent.
        for d in &program.declarations {
            if let DeclKind::Constraint { constraint: Constraint::Tangent { line, circle } } =
                &d.kind
            {
                let lkey = pair(line.a, line.b);
                if let Some(line_set) =
                    sets.iter().find(|s| s.contains(&lkey.0) && s.contains(&lkey.1))
                {
                    if let Some(on) = on_circle.get(&circle.center.ch()) {
                        if let Some(touch) = line_set.iter().find(|p| on.contains(p)) {
                            let rkey = if circle.center.ch() <= *touch {
                                (circle.center.ch(), *touch)
                            } else {
                                (*touch, circle.center.ch())
                            };
                            perp_edges.push((lkey, rkey));
                        }
                    }
                }
            }
        }

        // Equal-length sources from circles: all proven radii of one
        // circle are equal.
        for (center, pts) in &on_circle {
            let pts: Vec<char> = pts.iter().copied().collect();
            for w in pts.windows(2) {
                let k1 = if *center <= w[0] { (*center, w[0]) } else { (w[0], *center) };
                let k2 = if *center <= w[1] { (*center, w[1]) } else { (w[1], *center) };
                eq_edges.push((k1, k2));
            }
        }

        let line_of = |sets: &[BTreeSet<char>], k: Pair| -> Option<usize> {
            sets.iter().position(|s| s.contains(&k.0) && s.contains(&k.1))
        };

        // Direction relations over line sets, saturated with the three
        // composition rules.
        let mut par: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut perp: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (k1, k2) in &par_edges {
            if let (Some(i), Some(j)) = (line_of(&sets, *k1), line_of(&sets, *k2)) {
                if i != j {
                    par.insert((i.min(j), i.max(j)));
                }
            }
        }
        for (k1, k2) in &perp_edges {
            if let (Some(i), Some(j)) = (line_of(&sets, *k1), line_of(&sets, *k2)) {
                perp.insert((i.min(j), i.max(j)));
            }
        }
        loop {
            let mut changed = false;
            let n = sets.len();
            let has = |set: &BTreeSet<(usize, usize)>, a: usize, b: usize| {
                a != b && set.contains(&(a.min(b), a.max(b)))
            };
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if a == c {
                            continue;
                        }
                        // par(a,b) & par(b,c) -> par(a,c)
                        if has(&par, a, b) && has(&par, b, c) && !has(&par, a, c) {
                            par.insert((a.min(c), a.max(c)));
                            changed = true;
                        }
                        // par(a,b) & perp(b,c) -> perp(a,c)
                        if has(&par, a, b) && has(&perp, b, c) && !has(&perp, a, c) {
                            perp.insert((a.min(c), a.max(c)));
                            changed = true;
                        }
                        // perp(a,b) & perp(b,c) -> par(a,c)
                        if has(&perp, a, b) && has(&perp, b, c) && !has(&par, a, c) {
                            par.insert((a.min(c), a.max(c)));
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }

        // Transitive closure of equal lengths.
        let mut equal: BTreeSet<(Pair, Pair)> = BTreeSet::new();
        for (a, b) in &eq_edges {
            if a != b {
                equal.insert((*a.min(b), *a.max(b)));
            }
        }
        loop {
            let mut additions = Vec::new();
            for (a, b) in &equal {
                for (c, d) in &equal {
                    let link = |x: Pair, y: Pair| {
                        if x != y && !equal.contains(&(x.min(y), x.max(y))) {
                            Some((x.min(y), x.max(y)))
                        } else {
                            None
                        }
                    };
                    if b == c {
                        additions.extend(link(*a, *d));
                    }
                    if a == c {
                        additions.extend(link(*b, *d));
                    }
                    if b == d {
                        additions.extend(link(*a, *c));
                    }
                    if a == d {
                        additions.extend(link(*b, *c));
                    }
                }
            }
            if additions.is_empty() {
                break;
            }
            equal.extend(additions);
        }

        BruteProver { lines: sets, par, perp, equal, on_circle }
    }

    pub fn line_of(&self, a: char, b: char) -> Option<usize> {
        self.lines.iter().position(|s| s.contains(&a) && s.contains(&b))
    }

    pub fn provably_parallel(&self, k1: Pair, k2: Pair) -> bool {
        match (self.line_of(k1.0, k1.1), self.line_of(k2.0, k2.1)) {
            (Some(i), Some(j)) if i != j => self.par.contains(&(i.min(j), i.max(j))),
            _ => false,
        }
    }

    pub fn provably_perpendicular(&self, k1: Pair, k2: Pair) -> bool {
        match (self.line_of(k1.0, k1.1), self.line_of(k2.0, k2.1)) {
            (Some(i), Some(j)) if i != j => self.perp.contains(&(i.min(j), i.max(j))),
            _ => false,
        }
    }

    pub fn provably_equal(&self, k1: Pair, k2: Pair) -> bool {
        k1 != k2 && self.equal.contains(&(k1.min(k2), k1.max(k2)))
    }

    pub fn provably_collinear(&self, a: char, b: char, c: char) -> bool {
        self.lines
            .iter()
            .any(|s| s.contains(&a) && s.contains(&b) && s.contains(&c))
    }
}

fn unit(a: Vec2, b: Vec2) -> Vec2 {
    (b - a).normalized()
}

/// Exhaustive numeric + brute-prover oracle for the four relation kinds,
/// in canonical fact-set form (matching derive_facts subject layout).
pub fn oracle_relation_facts(scene: &ConcreteScene) -> BTreeSet<(FactKind, Vec<String>)> {
    let eps = 1e-6;
    let prover = BruteProver::build(&scene.program);
    let mut out = BTreeSet::new();
    let linear = &scene.elements.linear;

    for i in 0..linear.len() {
        for j in (i + 1)..linear.len() {
            let (l1, l2) = (&linear[i], &linear[j]);
            let k1 = pair(l1.a, l1.b);
            let k2 = pair(l2.a, l2.b);
            if k1 == k2 {
                continue;
            }
            let (a1, b1) = (scene.pos(l1.a), scene.pos(l1.b));
            let (a2, b2) = (scene.pos(l2.a), scene.pos(l2.b));
            let cross = unit(a1, b1).cross(unit(a2, b2)).abs();
            let dot = unit(a1, b1).dot(unit(a2, b2)).abs();
            let r1 = ElementRef::Linear { kind: l1.kind, a: l1.a, b: l1.b };
            let r2 = ElementRef::Linear { kind: l2.kind, a: l2.a, b: l2.b };
            let subjects = |x: &ElementRef, y: &ElementRef| -> Vec<String> {
                let (f, s) = if x <= y { (x, y) } else { (y, x) };
                vec![f.letters(), s.letters()]
            };
            if cross <= eps && prover.provably_parallel(k1, k2) {
                out.insert((FactKind::ParallelPair, subjects(&r1, &r2)));
            }
            if dot <= eps && prover.provably_perpendicular(k1, k2) {
                out.insert((FactKind::PerpendicularPair, subjects(&r1, &r2)));
            }
            if l1.kind == LinearKind::Segment && l2.kind == LinearKind::Segment {
                let len_diff = (a1.dist(b1) - a2.dist(b2)).abs();
                if len_diff <= eps && prover.provably_equal(k1, k2) {
                    let s1 = ElementRef::segment(l1.a, l1.b);
                    let s2 = ElementRef::segment(l2.a, l2.b);
                    out.insert((FactKind::EqualSegments, subjects(&s1, &s2)));
                }
            }
        }
    }

    // Collinear triples over labeled points, gated like emission: the
    // outer pair must name a declared element.
    let ids: Vec<PointId> = scene.coords.keys().copied().collect();
    for i in 0..ids.len() {
        for j in (i + 1)..ids.len() {
            for k in (j + 1)..ids.len() {
                let triple = [ids[i], ids[j], ids[k]];
                let (pa, pb, pc) =
                    (scene.pos(triple[0]), scene.pos(triple[1]), scene.pos(triple[2]));
                let lmax = pa.dist(pb).max(pb.dist(pc)).max(pc.dist(pa));
                let coll = ((pb - pa).cross(pc - pa) / lmax).abs();
                if coll > eps {
                    continue;
                }
                if !prover.provably_collinear(triple[0].ch(), triple[1].ch(), triple[2].ch()) {
                    continue;
                }
                let middle = triple.iter().copied().find(|m| {
                    let others: Vec<PointId> =
                        triple.iter().copied().filter(|p| p != m).collect();
                    (scene.pos(others[0]) - scene.pos(*m))
                        .dot(scene.pos(others[1]) - scene.pos(*m))
                        < 0.0
                });
                let Some(mid) = middle else { continue };
                let outer: Vec<PointId> = triple.iter().copied().filter(|p| *p != mid).collect();
                if scene.elements.find_linear(outer[0], outer[1]).is_none() {
                    continue;
                }
                let (o1, o2) = (outer[0].min(outer[1]), outer[0].max(outer[1]));
                out.insert((FactKind::CollinearTriple, vec![o1.to_string(), o2.to_string()]));
            }
        }
    }
    out
}

/// derive_facts output restricted to the four oracle kinds, in the same
/// canonical form.
pub fn derived_relation_facts(facts: &[Fact]) -> BTreeSet<(FactKind, Vec<String>)> {
    facts
        .iter()
        .filter(|f| {
            matches!(
                f.kind,
                FactKind::ParallelPair
                    | FactKind::PerpendicularPair
                    | FactKind::EqualSegments
                    | FactKind::CollinearTriple
            )
        })
        .map(|f| (f.kind, f.subjects.iter().map(|s| s.letters()).collect()))
        .collect()
}
