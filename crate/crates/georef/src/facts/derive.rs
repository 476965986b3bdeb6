//! Symbolic fact derivation.
//!
//! Facts are emitted only when they are provable from the declared
//! structure (constructors and constraints plus simple closure: carrier
//! merging, direction classes, radius equality) and confirmed numerically.
//! Numerically-true-but-unprovable coincidences are suppressed: a question
//! about them would have seed-dependent answers.

use super::angles::angle_relations_with;
use super::kinds::{classify_fact, Derivation, ElementRef, Fact, FactKind};
use super::verify::verify_fact;
use crate::geom::{ConcreteScene, LinearElement, LinearKind, Vec2};
use crate::scene::{AngleRef, Constraint, Constructor, DeclKind, LinearRef, OnElement, PointId};
use std::collections::{BTreeMap, BTreeSet};

/// Verification epsilon applied to every emitted fact.
pub const FACT_EPS: f64 = 1e-6;

type PairKey = (PointId, PointId);

fn pair_key(a: PointId, b: PointId) -> PairKey {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn angle_key(a: PointId, v: PointId, b: PointId) -> (PointId, PointId, PointId) {
    if a <= b {
        (a, v, b)
    } else {
        (b, v, a)
    }
}

/// Union-find with an optional parity bit per edge. With parity, two keys
/// in one class are either aligned (parallel) or flipped (perpendicular).
#[derive(Debug, Clone)]
struct ParityUf<K: Ord + Clone> {
    parent: BTreeMap<K, (K, bool)>,
}

impl<K: Ord + Clone> Default for ParityUf<K> {
    fn default() -> Self {
        Self { parent: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> ParityUf<K> {
    fn find(&mut self, k: &K) -> (K, bool) {
        let (parent, flip) = match self.parent.get(k) {
            None => return (k.clone(), false),
            Some(v) => v.clone(),
        };
        if &parent == k {
            return (k.clone(), flip);
        }
        let (root, rflip) = self.find(&parent);
        let total = flip ^ rflip;
        self.parent.insert(k.clone(), (root.clone(), total));
        (root, total)
    }

    fn union(&mut self, a: &K, b: &K, flip: bool) {
        // Register both keys so class members are enumerable later.
        for k in [a, b] {
            self.parent.entry(k.clone()).or_insert_with(|| (k.clone(), false));
        }
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return;
        }
        self.parent.insert(ra, (rb, pa ^ pb ^ flip));
    }

    /// None if unrelated; Some(false) aligned, Some(true) flipped.
    fn relation(&mut self, a: &K, b: &K) -> Option<bool> {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        (ra == rb).then_some(pa ^ pb)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CenterKind {
    CircleCenter,
    Circumcenter,
    Incenter,
    Centroid,
}

/// Everything provable from the program structure.
pub struct Provability {
    /// Maximal sets of provably-collinear labeled points.
    pub carriers: Vec<BTreeSet<PointId>>,
    dir: ParityUf<usize>,
    /// Circle center -> points proven on the circle (through-point included).
    pub on_circle: BTreeMap<PointId, BTreeSet<PointId>>,
    eq_seg: ParityUf<PairKey>,
    eq_angle: ParityUf<(PointId, PointId, PointId)>,
    midpoints: Vec<(PointId, PointId, PointId)>,
    line_line: Vec<(PointId, LinearRef, LinearRef)>,
    line_circle: Vec<(PointId, LinearRef, PointId)>,
    circle_circle: Vec<(PointId, PointId, PointId)>,
    /// (circle center, from point, touch point) per tangent construction.
    tangencies: Vec<(PointId, PointId, PointId)>,
    /// Tangent constraints: (line ref, circle center).
    tangent_lines: Vec<(LinearRef, PointId)>,
    feet: Vec<(PointId, PointId, LinearRef)>,
    extensions: Vec<(PointId, LinearRef)>,
    centers: Vec<(PointId, CenterKind, [PointId; 3])>,
    bisectors: Vec<(LinearRef, AngleRef)>,
    parallelograms: Vec<[PointId; 4]>,
}

impl Provability {
    pub fn build(program: &crate::scene::SceneProgram) -> Self {
        let mut seeds: Vec<BTreeSet<PointId>> = Vec::new();
        fn seed_into(seeds: &mut Vec<BTreeSet<PointId>>, pts: &[PointId]) {
            seeds.push(pts.iter().copied().collect());
        }
        macro_rules! seed {
            ($($p:expr),+) => { seed_into(&mut seeds, &[$($p),+]) };
        }
        let mut on_circle: BTreeMap<PointId, BTreeSet<PointId>> = BTreeMap::new();
        let mut eq_seg = ParityUf::default();
        let mut eq_angle = ParityUf::default();
        let mut midpoints = Vec::new();
        let mut line_line = Vec::new();
        let mut line_circle = Vec::new();
        let mut circle_circle = Vec::new();
        let mut tangencies = Vec::new();
        let mut tangent_lines = Vec::new();
        let mut feet = Vec::new();
        let mut extensions = Vec::new();
        let mut centers = Vec::new();
        let mut bisectors: Vec<(LinearRef, AngleRef)> = Vec::new();
        let mut parallelograms = Vec::new();
        // Deferred direction relations: (seed pair, seed pair, flip).
        let mut dir_edges: Vec<(PairKey, PairKey, bool)> = Vec::new();

        for d in &program.declarations {
            match &d.kind {
                DeclKind::Segment { a, b } | DeclKind::Line { a, b } => seed!(*a, *b),
                DeclKind::Ray { origin, through } => seed!(*origin, *through),
                DeclKind::Circle { center, through } => {
                    on_circle.entry(*center).or_default().insert(*through);
                }
                DeclKind::ConstructedPoint { id, ctor } => match ctor {
                    Constructor::Midpoint { a, b } => {
                        seed!(*a, *b, *id);
                        midpoints.push((*id, *a, *b));
                        eq_seg.union(&pair_key(*a, *id), &pair_key(*id, *b), false);
                    }
                    Constructor::IntersectionLineLine { l1, l2 } => {
                        seed!(l1.a, l1.b, *id);
                        seed!(l2.a, l2.b, *id);
                        line_line.push((*id, *l1, *l2));
                    }
                    Constructor::IntersectionLineCircle { line, circle, .. } => {
                        seed!(line.a, line.b, *id);
                        on_circle.entry(circle.center).or_default().insert(*id);
                        line_circle.push((*id, *line, circle.center));
                    }
                    Constructor::IntersectionCircleCircle { c1, c2, .. } => {
                        on_circle.entry(c1.center).or_default().insert(*id);
                        on_circle.entry(c2.center).or_default().insert(*id);
                        circle_circle.push((*id, c1.center, c2.center));
                    }
                    Constructor::FootOfPerpendicular { from, onto } => {
                        seed!(onto.a, onto.b, *id);
                        seed!(*from, *id);
                        feet.push((*id, *from, *onto));
                        dir_edges.push((pair_key(*from, *id), pair_key(onto.a, onto.b), true));
                    }
                    Constructor::TangentPoint { from, circle, .. } => {
                        seed!(*from, *id);
                        seed!(circle.center, *id);
                        on_circle.entry(circle.center).or_default().insert(*id);
                        tangencies.push((circle.center, *from, *id));
                        dir_edges.push((pair_key(*from, *id), pair_key(circle.center, *id), true));
                    }
                    Constructor::PointOn { element, .. } => match element {
                        OnElement::Linear { carrier } => seed!(carrier.a, carrier.b, *id),
                        OnElement::Circle { circle } => {
                            on_circle.entry(circle.center).or_default().insert(*id);
                        }
                    },
                    Constructor::ExtensionPoint { seg, .. } => {
                        seed!(seg.a, seg.b, *id);
                        extensions.push((*id, *seg));
                    }
                    Constructor::CircleCenter { a, b, c } | Constructor::Circumcenter { a, b, c } => {
                        let kind = if matches!(ctor, Constructor::CircleCenter { .. }) {
                            CenterKind::CircleCenter
                        } else {
                            CenterKind::Circumcenter
                        };
                        centers.push((*id, kind, [*a, *b, *c]));
                        eq_seg.union(&pair_key(*id, *a), &pair_key(*id, *b), false);
                        eq_seg.union(&pair_key(*id, *b), &pair_key(*id, *c), false);
                    }
                    Constructor::Incenter { a, b, c } => {
                        centers.push((*id, CenterKind::Incenter, [*a, *b, *c]));
                    }
                    Constructor::Centroid { a, b, c } => {
                        centers.push((*id, CenterKind::Centroid, [*a, *b, *c]));
                    }
                },
                DeclKind::Constraint { constraint } => match constraint {
                    Constraint::Parallel { l1, l2 } => {
                        seed!(l1.a, l1.b);
                        seed!(l2.a, l2.b);
                        dir_edges.push((pair_key(l1.a, l1.b), pair_key(l2.a, l2.b), false));
                    }
                    Constraint::Perpendicular { l1, l2 } => {
                        seed!(l1.a, l1.b);
                        seed!(l2.a, l2.b);
                        dir_edges.push((pair_key(l1.a, l1.b), pair_key(l2.a, l2.b), true));
                    }
                    Constraint::Tangent { line, circle } => {
                        seed!(line.a, line.b);
                        tangent_lines.push((*line, circle.center));
                    }
                    Constraint::OnCircle { point, circle } => {
                        on_circle.entry(circle.center).or_default().insert(*point);
                    }
                    Constraint::Collinear { a, b, c } => seed!(*a, *b, *c),
                    Constraint::EqualLength { s1, s2 } => {
                        eq_seg.union(&pair_key(s1.a, s1.b), &pair_key(s2.a, s2.b), false);
                    }
                    Constraint::EqualAngle { a1, a2 } => {
                        eq_angle.union(
                            &angle_key(a1.arm_a, a1.vertex, a1.arm_b),
                            &angle_key(a2.arm_a, a2.vertex, a2.arm_b),
                            false,
                        );
                    }
                    Constraint::AngleBisector { bisector, angle } => {
                        seed!(bisector.a, bisector.b);
                        let dir = if bisector.a == angle.vertex { bisector.b } else { bisector.a };
                        eq_angle.union(
                            &angle_key(angle.arm_a, angle.vertex, dir),
                            &angle_key(dir, angle.vertex, angle.arm_b),
                            false,
                        );
                        bisectors.push((*bisector, *angle));
                    }
                    Constraint::IsDiameter { seg, circle } => {
                        seed!(seg.a, seg.b, circle.center);
                        let set = on_circle.entry(circle.center).or_default();
                        set.insert(seg.a);
                        set.insert(seg.b);
                    }
                    Constraint::IsChord { seg, circle } => {
                        seed!(seg.a, seg.b);
                        let set = on_circle.entry(circle.center).or_default();
                        set.insert(seg.a);
                        set.insert(seg.b);
                    }
                    Constraint::IsInscribedAngle { angle, circle } => {
                        seed!(angle.vertex, angle.arm_a);
                        seed!(angle.vertex, angle.arm_b);
                        let set = on_circle.entry(circle.center).or_default();
                        set.insert(angle.arm_a);
                        set.insert(angle.vertex);
                        set.insert(angle.arm_b);
                    }
                    Constraint::IsCentralAngle { angle, circle } => {
                        seed!(angle.vertex, angle.arm_a);
                        seed!(angle.vertex, angle.arm_b);
                        let set = on_circle.entry(circle.center).or_default();
                        set.insert(angle.arm_a);
                        set.insert(angle.arm_b);
                    }
                    Constraint::IsParallelogram { a, b, c, d } => {
                        seed!(*a, *b);
                        seed!(*b, *c);
                        seed!(*c, *d);
                        seed!(*d, *a);
                        dir_edges.push((pair_key(*a, *b), pair_key(*c, *d), false));
                        dir_edges.push((pair_key(*b, *c), pair_key(*d, *a), false));
                        eq_seg.union(&pair_key(*a, *b), &pair_key(*c, *d), false);
                        eq_seg.union(&pair_key(*b, *c), &pair_key(*d, *a), false);
                        parallelograms.push([*a, *b, *c, *d]);
                    }
                },
                _ => {}
            }
        }

        // Merge carriers that provably share two points, to a fixed point.
        let mut carriers = seeds;
        loop {
            let mut merged = false;
            'outer: for i in 0..carriers.len() {
                for j in (i + 1)..carriers.len() {
                    let shared = carriers[i].intersection(&carriers[j]).count();
                    if shared >= 2 {
                        let other = carriers.remove(j);
                        carriers[i].extend(other);
                        merged = true;
                        break 'outer;
                    }
                }
            }
            if !merged {
                break;
            }
        }

        let mut prov = Provability {
            carriers,
            dir: ParityUf::default(),
            on_circle,
            eq_seg,
            eq_angle,
            midpoints,
            line_line,
            line_circle,
            circle_circle,
            tangencies,
            tangent_lines,
            feet,
            extensions,
            centers,
            bisectors,
            parallelograms,
        };

        for (k1, k2, flip) in dir_edges {
            if let (Some(c1), Some(c2)) = (prov.carrier_of(k1.0, k1.1), prov.carrier_of(k2.0, k2.1)) {
                prov.dir.union(&c1, &c2, flip);
            }
        }
        // A tangent constraint fixes a perpendicular radius once the touch
        // point is identified as a carrier point on the circle.
        let tangent_lines = prov.tangent_lines.clone();
        for (line, center) in &tangent_lines {
            if let Some(touch) = prov.touch_point(line, *center) {
                let rad = prov.carrier_of(*center, touch);
                let lin = prov.carrier_of(line.a, line.b);
                if let (Some(rad), Some(lin)) = (rad, lin) {
                    prov.dir.union(&lin, &rad, true);
                }
            }
        }
        prov
    }

    /// Carrier containing both points, if any.
    pub fn carrier_of(&self, a: PointId, b: PointId) -> Option<usize> {
        self.carriers
            .iter()
            .position(|c| c.contains(&a) && c.contains(&b))
    }

    pub fn provably_parallel(&mut self, k1: PairKey, k2: PairKey) -> bool {
        match (self.carrier_of(k1.0, k1.1), self.carrier_of(k2.0, k2.1)) {
            (Some(c1), Some(c2)) if c1 != c2 => self.dir.relation(&c1, &c2) == Some(false),
            _ => false,
        }
    }

    pub fn provably_perpendicular(&mut self, k1: PairKey, k2: PairKey) -> bool {
        match (self.carrier_of(k1.0, k1.1), self.carrier_of(k2.0, k2.1)) {
            (Some(c1), Some(c2)) => self.dir.relation(&c1, &c2) == Some(true),
            _ => false,
        }
    }

    pub fn provably_equal_segments(&mut self, k1: PairKey, k2: PairKey) -> bool {
        k1 != k2 && self.eq_seg.relation(&k1, &k2) == Some(false)
    }

    pub fn provably_collinear(&self, a: PointId, b: PointId, c: PointId) -> bool {
        self.carriers
            .iter()
            .any(|s| s.contains(&a) && s.contains(&b) && s.contains(&c))
    }

    /// Touch point of a tangent line: the unique carrier point proven on
    /// the circle.
    fn touch_point(&self, line: &LinearRef, center: PointId) -> Option<PointId> {
        let carrier = self.carrier_of(line.a, line.b)?;
        let on = self.on_circle.get(&center)?;
        self.carriers[carrier].iter().find(|p| on.contains(p)).copied()
    }

    /// Points in the same direction class, used by parallel relations.
    pub fn parallel_carrier_pairs(&mut self) -> Vec<(usize, usize)> {
        let n = self.carriers.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.dir.relation(&i, &j) == Some(false) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Context shared by derivation passes.
pub struct DeriveCtx<'a> {
    pub scene: &'a ConcreteScene,
    pub prov: Provability,
}

impl<'a> DeriveCtx<'a> {
    pub fn new(scene: &'a ConcreteScene) -> Self {
        DeriveCtx { scene, prov: Provability::build(&scene.program) }
    }

    pub fn linear_ref(&self, a: PointId, b: PointId) -> Option<ElementRef> {
        self.scene
            .elements
            .find_linear(a, b)
            .map(|l| ElementRef::Linear { kind: l.kind, a: l.a, b: l.b })
    }

    /// True when the declared element's extent covers point `p` (segments
    /// bounded, rays half-bounded, lines unbounded), within tolerance.
    pub fn element_covers(&self, l: &LinearElement, p: Vec2) -> bool {
        let a = self.scene.pos(l.a);
        let b = self.scene.pos(l.b);
        let eps = 1e-6 * (1.0 + l.length);
        if crate::geom::predicates::line_distance(p, a, b) > eps {
            return false;
        }
        let t = (p - a).dot(b - a) / (b - a).norm_sq();
        match l.kind {
            LinearKind::Segment => (-1e-9..=1.0 + 1e-9).contains(&t),
            LinearKind::Ray => t >= -1e-9,
            LinearKind::Line => true,
        }
    }

    /// A declared element on the carrier of (vertex, arm) whose extent
    /// covers both points: the angle arm is actually drawn.
    pub fn arm_backed(&self, vertex: PointId, arm: PointId) -> bool {
        let Some(carrier) = self.prov.carrier_of(vertex, arm) else { return false };
        let vp = self.scene.pos(vertex);
        let ap = self.scene.pos(arm);
        self.scene.elements.linear.iter().any(|l| {
            self.prov.carriers[carrier].contains(&l.a)
                && self.prov.carriers[carrier].contains(&l.b)
                && self.element_covers(l, vp)
                && self.element_covers(l, ap)
        })
    }

    pub fn angle_drawable(&self, a: PointId, v: PointId, b: PointId) -> bool {
        a != b && a != v && b != v && self.arm_backed(v, a) && self.arm_backed(v, b)
    }
}

fn push_fact(
    facts: &mut Vec<Fact>,
    scene: &ConcreteScene,
    kind: FactKind,
    subjects: Vec<ElementRef>,
    target: ElementRef,
) {
    let mut fact = Fact {
        category: classify_fact(kind),
        kind,
        subjects,
        answer_target: target,
        witness: 0.0,
        derivation: Derivation::Both,
    };
    match verify_fact(&fact, scene, FACT_EPS) {
        Ok(witness) => {
            fact.witness = witness;
            facts.push(fact);
        }
        Err(_) => {}
    }
}

/// Derive every provable, numerically verified fact of the scene.
/// Output is deterministic and sorted by (category, kind, subjects).
pub fn derive_facts(scene: &ConcreteScene) -> Vec<Fact> {
    let mut ctx = DeriveCtx::new(scene);
    let mut facts: Vec<Fact> = Vec::new();
    let f = &mut facts;

    position_facts(&mut ctx, f);
    shape_facts(&mut ctx, f);
    relationship_facts(&mut ctx, f);
    facts.extend(angle_relations_with(&mut ctx));

    facts.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    facts.dedup_by(|a, b| a.kind == b.kind && a.subjects == b.subjects && a.answer_target == b.answer_target);
    facts
}

/// Angle-pair relations only (vertical, alternate interior, corresponding,
/// co-interior), sorted canonically.
pub fn angle_relations(scene: &ConcreteScene) -> Vec<Fact> {
    let mut ctx = DeriveCtx::new(scene);
    let mut facts = angle_relations_with(&mut ctx);
    facts.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    facts
}

fn position_facts(ctx: &mut DeriveCtx, f: &mut Vec<Fact>) {
    let scene = ctx.scene;

    for (p, l1, l2) in ctx.prov.line_line.clone() {
        let (Some(r1), Some(r2)) = (ctx.linear_ref(l1.a, l1.b), ctx.linear_ref(l2.a, l2.b)) else {
            continue;
        };
        push_fact(f, scene, FactKind::IntersectionPoint, vec![r1, r2], ElementRef::point(p));
    }
    for (p, line, center) in ctx.prov.line_circle.clone() {
        let Some(r) = ctx.linear_ref(line.a, line.b) else { continue };
        push_fact(
            f,
            scene,
            FactKind::IntersectionPoint,
            vec![r, ElementRef::Circle { center }],
            ElementRef::point(p),
        );
    }
    for (p, c1, c2) in ctx.prov.circle_circle.clone() {
        push_fact(
            f,
            scene,
            FactKind::IntersectionPoint,
            vec![ElementRef::Circle { center: c1 }, ElementRef::Circle { center: c2 }],
            ElementRef::point(p),
        );
    }

    // Tangency points, from constructions and from tangent constraints
    // whose touch point is identified.
    let mut touches: Vec<(PointId, PointId, PointId)> = ctx.prov.tangencies.clone();
    for (line, center) in ctx.prov.tangent_lines.clone() {
        if let Some(t) = ctx.prov.touch_point(&line, center) {
            let from = if line.a == t { line.b } else { line.a };
            touches.push((center, from, t));
        }
    }
    for (center, from, touch) in touches {
        let Some(r) = tangent_element(ctx, from, touch) else { continue };
        push_fact(
            f,
            scene,
            FactKind::TangencyPoint,
            vec![r, ElementRef::Circle { center }],
            ElementRef::point(touch),
        );
    }

    for (m, a, b) in ctx.prov.midpoints.clone() {
        let whole = ctx.linear_ref(a, b).is_some();
        let halves = ctx.linear_ref(a, m).is_some() && ctx.linear_ref(m, b).is_some();
        if whole || halves {
            push_fact(f, scene, FactKind::Midpoint, vec![ElementRef::segment(a, b)], ElementRef::point(m));
        }
    }

    for c in &scene.elements.circles {
        push_fact(
            f,
            scene,
            FactKind::CircleCenter,
            vec![ElementRef::Circle { center: c.center }],
            ElementRef::point(c.center),
        );
    }

    for (foot, from, onto) in ctx.prov.feet.clone() {
        let Some(onto_ref) = ctx.linear_ref(onto.a, onto.b) else { continue };
        if ctx.linear_ref(from, foot).is_none() {
            continue;
        }
        push_fact(
            f,
            scene,
            FactKind::FootOfPerpendicular,
            vec![ElementRef::point(from), onto_ref],
            ElementRef::point(foot),
        );
    }

    for (ext, seg) in ctx.prov.extensions.clone() {
        if ctx.linear_ref(seg.a, seg.b).is_none() {
            continue;
        }
        // The extension must be visible: some declared element reaches it.
        let p = scene.pos(ext);
        let visible = scene
            .elements
            .linear
            .iter()
            .any(|l| (l.a == ext || l.b == ext || l.kind == LinearKind::Line) && ctx.element_covers(l, p));
        if !visible {
            continue;
        }
        push_fact(
            f,
            scene,
            FactKind::PointOnExtension,
            vec![ElementRef::segment(seg.a, seg.b)],
            ElementRef::point(ext),
        );
    }

    for (id, kind, tri) in ctx.prov.centers.clone() {
        match kind {
            CenterKind::CircleCenter => {
                // The constructed center is a circle center fact only once
                // a circle is actually declared around it; that declaration
                // already emits the fact above.
            }
            CenterKind::Circumcenter | CenterKind::Incenter | CenterKind::Centroid => {
                let Some(poly) = declared_polygon(scene, &tri) else { continue };
                let fact_kind = match kind {
                    CenterKind::Circumcenter => FactKind::Circumcenter,
                    CenterKind::Incenter => FactKind::Incenter,
                    _ => FactKind::Centroid,
                };
                push_fact(f, scene, fact_kind, vec![poly], ElementRef::point(id));
            }
        }
    }
}

fn tangent_element(ctx: &DeriveCtx, from: PointId, touch: PointId) -> Option<ElementRef> {
    if let Some(r) = ctx.linear_ref(from, touch) {
        return Some(r);
    }
    // Any declared element on the tangent carrier that reaches the touch
    // point serves as the tangent's name.
    let carrier = ctx.prov.carrier_of(from, touch)?;
    let tp = ctx.scene.pos(touch);
    ctx.scene
        .elements
        .linear
        .iter()
        .find(|l| {
            ctx.prov.carriers[carrier].contains(&l.a)
                && ctx.prov.carriers[carrier].contains(&l.b)
                && ctx.element_covers(l, tp)
        })
        .map(|l| ElementRef::Linear { kind: l.kind, a: l.a, b: l.b })
}

fn declared_polygon(scene: &ConcreteScene, vertices: &[PointId]) -> Option<ElementRef> {
    let want: BTreeSet<PointId> = vertices.iter().copied().collect();
    scene
        .elements
        .polygons
        .iter()
        .find(|p| p.vertices.len() == want.len() && p.vertices.iter().copied().collect::<BTreeSet<_>>() == want)
        .map(|p| ElementRef::Polygon { vertices: p.vertices.clone() })
}

fn shape_facts(ctx: &mut DeriveCtx, f: &mut Vec<Fact>) {
    let scene = ctx.scene;

    // Tangent lines: from constraints and from tangent-point constructions.
    let mut seen_tangents: BTreeSet<(PairKey, PointId)> = BTreeSet::new();
    for (line, center) in ctx.prov.tangent_lines.clone() {
        if let Some(r) = ctx.linear_ref(line.a, line.b) {
            if seen_tangents.insert((pair_key(line.a, line.b), center)) {
                push_fact(f, scene, FactKind::TangentLine, vec![ElementRef::Circle { center }], r);
            }
        }
    }
    for (center, from, touch) in ctx.prov.tangencies.clone() {
        if let Some(r) = tangent_element(ctx, from, touch) {
            if let ElementRef::Linear { a, b, .. } = r {
                if seen_tangents.insert((pair_key(a, b), center)) {
                    push_fact(f, scene, FactKind::TangentLine, vec![ElementRef::Circle { center }], r);
                }
            }
        }
    }

    // Chords, diameters, radii, secants: declared linear elements against
    // declared circles.
    for l in &scene.elements.linear {
        let lref = ElementRef::Linear { kind: l.kind, a: l.a, b: l.b };
        for c in &scene.elements.circles {
            let on = ctx.prov.on_circle.get(&c.center).cloned().unwrap_or_default();
            let circle_ref = ElementRef::Circle { center: c.center };
            let a_on = on.contains(&l.a);
            let b_on = on.contains(&l.b);
            if l.kind == LinearKind::Segment && a_on && b_on {
                if ctx.prov.provably_collinear(l.a, c.center, l.b) {
                    push_fact(f, scene, FactKind::Diameter, vec![circle_ref.clone()], lref.clone());
                } else {
                    push_fact(f, scene, FactKind::Chord, vec![circle_ref.clone()], lref.clone());
                }
                continue;
            }
            if l.kind == LinearKind::Segment
                && ((l.a == c.center && b_on) || (l.b == c.center && a_on))
            {
                push_fact(f, scene, FactKind::Radius, vec![circle_ref.clone()], lref.clone());
                continue;
            }
            // Secant: the drawn stroke itself reaches two proven circle
            // points and the element is not a chord.
            if let Some(carrier) = ctx.prov.carrier_of(l.a, l.b) {
                let covered: Vec<PointId> = ctx.prov.carriers[carrier]
                    .iter()
                    .filter(|p| on.contains(p) && ctx.element_covers(l, scene.pos(**p)))
                    .copied()
                    .collect();
                if covered.len() >= 2 && !(l.kind == LinearKind::Segment && a_on && b_on) {
                    push_fact(f, scene, FactKind::Secant, vec![circle_ref.clone()], lref.clone());
                }
            }
        }
    }

    // Inscribed and central angles: vertex and arm endpoints proven on the
    // circle, arms drawn.
    for c in &scene.elements.circles {
        let on = ctx.prov.on_circle.get(&c.center).cloned().unwrap_or_default();
        let circle_ref = ElementRef::Circle { center: c.center };
        let on_pts: Vec<PointId> = on.iter().copied().collect();
        for v in &on_pts {
            for (i, a) in on_pts.iter().enumerate() {
                for b in &on_pts[i + 1..] {
                    if a == v || b == v {
                        continue;
                    }
                    if ctx.angle_drawable(*a, *v, *b) {
                        push_fact(
                            f,
                            scene,
                            FactKind::InscribedAngle,
                            vec![circle_ref.clone()],
                            ElementRef::angle(*a, *v, *b),
                        );
                    }
                }
            }
        }
        for (i, a) in on_pts.iter().enumerate() {
            for b in &on_pts[i + 1..] {
                if ctx.angle_drawable(*a, c.center, *b) {
                    push_fact(
                        f,
                        scene,
                        FactKind::CentralAngle,
                        vec![circle_ref.clone()],
                        ElementRef::angle(*a, c.center, *b),
                    );
                }
            }
        }
    }

    for p in &scene.elements.polygons {
        if p.vertices.len() == 3 {
            let subjects = p.vertices.iter().map(|v| ElementRef::point(*v)).collect();
            push_fact(
                f,
                scene,
                FactKind::Triangle,
                subjects,
                ElementRef::Polygon { vertices: p.vertices.clone() },
            );
        }
    }
    for quad in ctx.prov.parallelograms.clone() {
        if let Some(poly) = declared_polygon(scene, &quad) {
            push_fact(f, scene, FactKind::Parallelogram, vec![poly.clone()], poly);
        }
    }

    // Perpendicular bisectors: perpendicular through the midpoint.
    for (m, a, b) in ctx.prov.midpoints.clone() {
        let Some(seg) = ctx.linear_ref(a, b) else { continue };
        for l in scene.elements.linear.clone() {
            let lk = pair_key(l.a, l.b);
            if lk == pair_key(a, b) {
                continue;
            }
            let Some(lcar) = ctx.prov.carrier_of(l.a, l.b) else { continue };
            if !ctx.prov.carriers[lcar].contains(&m) {
                continue;
            }
            if ctx.prov.provably_perpendicular(lk, pair_key(a, b)) {
                push_fact(
                    f,
                    scene,
                    FactKind::PerpendicularBisector,
                    vec![seg.clone()],
                    ElementRef::Linear { kind: l.kind, a: l.a, b: l.b },
                );
            }
        }
    }

    for (bis, angle) in bisector_records(ctx) {
        push_fact(
            f,
            scene,
            FactKind::AngleBisector,
            vec![ElementRef::angle(angle.arm_a, angle.vertex, angle.arm_b)],
            bis,
        );
    }
}

/// Declared bisector elements with drawable angles: explicit constraints
/// plus incenter constructions with a declared vertex-to-incenter element.
fn bisector_records(ctx: &mut DeriveCtx) -> Vec<(ElementRef, AngleRef)> {
    let mut out = Vec::new();
    for (bisector, angle) in ctx.prov.bisectors.clone() {
        let Some(r) = ctx.linear_ref(bisector.a, bisector.b) else { continue };
        if ctx.angle_drawable(angle.arm_a, angle.vertex, angle.arm_b) {
            out.push((r, angle));
        }
    }
    for (id, kind, tri) in ctx.prov.centers.clone() {
        if kind != CenterKind::Incenter {
            continue;
        }
        for (vi, v) in tri.iter().enumerate() {
            let Some(r) = ctx.linear_ref(*v, id) else { continue };
            let arms: Vec<PointId> = tri
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != vi)
                .map(|(_, p)| *p)
                .collect();
            if ctx.angle_drawable(arms[0], *v, arms[1]) {
                out.push((r, AngleRef::new(arms[0], *v, arms[1])));
            }
        }
    }
    out
}

fn relationship_facts(ctx: &mut DeriveCtx, f: &mut Vec<Fact>) {
    let scene = ctx.scene;
    let linear = scene.elements.linear.clone();

    for i in 0..linear.len() {
        for j in (i + 1)..linear.len() {
            let (l1, l2) = (&linear[i], &linear[j]);
            let (k1, k2) = (pair_key(l1.a, l1.b), pair_key(l2.a, l2.b));
            if k1 == k2 {
                continue;
            }
            let r1 = ElementRef::Linear { kind: l1.kind, a: l1.a, b: l1.b };
            let r2 = ElementRef::Linear { kind: l2.kind, a: l2.a, b: l2.b };
            let (first, second) = if r1 <= r2 { (r1.clone(), r2.clone()) } else { (r2.clone(), r1.clone()) };
            if ctx.prov.provably_parallel(k1, k2) {
                push_fact(f, scene, FactKind::ParallelPair, vec![first.clone(), second.clone()], first.clone());
            }
            if ctx.prov.provably_perpendicular(k1, k2) {
                push_fact(f, scene, FactKind::PerpendicularPair, vec![first.clone(), second], first);
            }
        }
    }

    let segments: Vec<&LinearElement> =
        linear.iter().filter(|l| l.kind == LinearKind::Segment).collect();
    for i in 0..segments.len() {
        for j in (i + 1)..segments.len() {
            let (s1, s2) = (segments[i], segments[j]);
            let (k1, k2) = (pair_key(s1.a, s1.b), pair_key(s2.a, s2.b));
            if ctx.prov.provably_equal_segments(k1, k2) {
                let r1 = ElementRef::segment(s1.a, s1.b);
                let r2 = ElementRef::segment(s2.a, s2.b);
                let (first, second) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
                push_fact(f, scene, FactKind::EqualSegments, vec![first.clone(), second], first);
            }
        }
    }

    // Equal angles: drawable pairs inside one equality class.
    let mut angle_keys: BTreeSet<(PointId, PointId, PointId)> = BTreeSet::new();
    for k in ctx.prov.eq_angle.parent.keys() {
        angle_keys.insert(*k);
    }
    let keys: Vec<_> = angle_keys.into_iter().collect();
    for i in 0..keys.len() {
        for j in (i + 1)..keys.len() {
            let (a1, a2) = (keys[i], keys[j]);
            if ctx.prov.eq_angle.relation(&a1, &a2) != Some(false) {
                continue;
            }
            if ctx.angle_drawable(a1.0, a1.1, a1.2) && ctx.angle_drawable(a2.0, a2.1, a2.2) {
                let r1 = ElementRef::angle(a1.0, a1.1, a1.2);
                let r2 = ElementRef::angle(a2.0, a2.1, a2.2);
                let (first, second) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
                push_fact(f, scene, FactKind::EqualAngles, vec![first.clone(), second], first);
            }
        }
    }

    // Collinear triples: labeled points sharing a carrier, with the outer
    // pair drawn so the question can reference a visible span.
    for carrier in ctx.prov.carriers.clone() {
        let pts: Vec<PointId> = carrier.into_iter().collect();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                for k in (j + 1)..pts.len() {
                    let triple = [pts[i], pts[j], pts[k]];
                    // Middle point by betweenness.
                    let middle = triple.iter().copied().find(|m| {
                        let others: Vec<PointId> =
                            triple.iter().copied().filter(|p| p != m).collect();
                        let (a, b) = (scene.pos(others[0]), scene.pos(others[1]));
                        (a - scene.pos(*m)).dot(b - scene.pos(*m)) < 0.0
                    });
                    let Some(mid) = middle else { continue };
                    let outer: Vec<PointId> = triple.iter().copied().filter(|p| *p != mid).collect();
                    if ctx.linear_ref(outer[0], outer[1]).is_none() {
                        continue;
                    }
                    let (o1, o2) = (outer[0].min(outer[1]), outer[0].max(outer[1]));
                    push_fact(
                        f,
                        scene,
                        FactKind::CollinearTriple,
                        vec![ElementRef::point(o1), ElementRef::point(o2)],
                        ElementRef::point(mid),
                    );
                }
            }
        }
    }

    for (bis, angle) in bisector_records(ctx) {
        push_fact(
            f,
            scene,
            FactKind::AngleBisects,
            vec![ElementRef::angle(angle.arm_a, angle.vertex, angle.arm_b)],
            bis,
        );
    }
}
