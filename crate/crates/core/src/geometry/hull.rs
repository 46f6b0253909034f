//! Incremental 3D convex hull with explicit epsilon predicates.
//!
//! Coordinates are rescaled per axis to unit range before any orientation
//! test, points are inserted furthest-first from per-facet outside sets, and
//! the output is mapped back to the original coordinates. Inputs that do not
//! span three dimensions produce a flagged polygon, segment or single point.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::ExpectationPoint;

/// Orientation tolerance in rescaled coordinates.
pub const HULL_EPS: f64 = 1e-13;

type V3 = [f64; 3];

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Dimension of the hull.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HullKind {
    Solid,
    Planar,
    Linear,
    Point,
    Empty,
}

impl HullKind {
    pub fn as_str(self) -> &'static str {
        match self {
            HullKind::Solid => "solid",
            HullKind::Planar => "planar",
            HullKind::Linear => "linear",
            HullKind::Point => "point",
            HullKind::Empty => "empty",
        }
    }
}

/// Oriented plane `n·x = offset` with unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plane {
    pub normal: [f64; 3],
    pub offset: f64,
}

impl Plane {
    pub fn through(a: V3, b: V3, c: V3) -> Option<Self> {
        // span from the vertex opposite the longest side
        let (ab, bc, ca) = (sub(b, a), sub(c, b), sub(a, c));
        let (lab, lbc, lca) = (dot(ab, ab), dot(bc, bc), dot(ca, ca));
        let n = if lbc >= lab && lbc >= lca {
            cross(ab, scale(ca, -1.0))
        } else if lca >= lab {
            cross(bc, scale(ab, -1.0))
        } else {
            cross(ca, scale(bc, -1.0))
        };
        let len = norm(n);
        if !(len > 0.0) {
            return None;
        }
        let normal = scale(n, 1.0 / len);
        Some(Self { normal, offset: dot(normal, a) })
    }

    pub fn signed_distance(&self, p: V3) -> f64 {
        dot(self.normal, p) - self.offset
    }
}

/// Convex hull of a point cloud.
///
/// For [`HullKind::Solid`] the facets are outward-oriented triangles and
/// `edges` is the edge graph of the facet complex with the internal
/// diagonals of coplanar faces removed. A planar hull has no facets; its
/// vertices are listed counter-clockwise and `edges` joins neighbours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexHull3 {
    pub kind: HullKind,
    pub vertices: Vec<ExpectationPoint>,
    pub facets: Vec<[usize; 3]>,
    pub edges: Vec<(usize, usize)>,
    /// Position of each vertex in the input list.
    pub source_index: Vec<usize>,
}

impl ConvexHull3 {
    pub fn is_degenerate(&self) -> bool {
        self.kind != HullKind::Solid
    }

    /// `V - E + F` of the triangulated boundary.
    pub fn euler_characteristic(&self) -> i64 {
        let v = self.vertices.len() as i64;
        let f = self.facets.len() as i64;
        v - 3 * f / 2 + f
    }

    /// Facet planes in the original coordinates.
    pub fn planes(&self) -> Vec<Plane> {
        self.facets
            .iter()
            .filter_map(|f| {
                let [a, b, c] = f.map(|i| self.vertices[i].to_array());
                Plane::through(a, b, c)
            })
            .collect()
    }

    /// How far `p` lies outside the hull (`0` inside).
    ///
    /// For solids this is the largest facet-plane excess, a lower bound on the
    /// Euclidean distance that is exact whenever the nearest hull point lies
    /// in a facet interior.
    pub fn outside_distance(&self, p: &ExpectationPoint) -> f64 {
        self.outside_distance_with(&self.planes(), p)
    }

    /// [`Self::outside_distance`] with precomputed [`Self::planes`].
    pub fn outside_distance_with(&self, planes: &[Plane], p: &ExpectationPoint) -> f64 {
        let q = p.to_array();
        match self.kind {
            HullKind::Solid => planes.iter().map(|pl| pl.signed_distance(q)).fold(0.0, f64::max),
            HullKind::Empty => f64::INFINITY,
            HullKind::Point => self.vertices[0].distance(p),
            HullKind::Linear => segment_distance(self.vertices[0].to_array(), self.vertices[1].to_array(), q),
            HullKind::Planar => planar_distance(&self.vertices, q),
        }
    }

    /// Vertices sorted lexicographically, for set comparisons.
    pub fn sorted_vertices(&self) -> Vec<[f64; 3]> {
        let mut v: Vec<[f64; 3]> = self.vertices.iter().map(|p| p.to_array()).collect();
        v.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
        v
    }
}

fn segment_distance(a: V3, b: V3, q: V3) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    let t = if len2 > 0.0 { (dot(sub(q, a), ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    norm(sub(q, [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]]))
}

fn planar_distance(poly: &[ExpectationPoint], q: V3) -> f64 {
    let pts: Vec<V3> = poly.iter().map(|p| p.to_array()).collect();
    let n = pts.len();
    // polygon normal from the Newell sum
    let mut normal = [0.0; 3];
    for i in 0..n {
        let c = cross(pts[i], pts[(i + 1) % n]);
        normal = [normal[0] + c[0], normal[1] + c[1], normal[2] + c[2]];
    }
    let len = norm(normal);
    let normal = scale(normal, 1.0 / len);
    let off_plane = dot(normal, sub(q, pts[0]));
    let mut in_plane: f64 = 0.0;
    for i in 0..n {
        let e = sub(pts[(i + 1) % n], pts[i]);
        let out = cross(e, normal);
        let out = scale(out, 1.0 / norm(out));
        in_plane = in_plane.max(dot(out, sub(q, pts[i])));
    }
    (off_plane * off_plane + in_plane.max(0.0).powi(2)).sqrt()
}

/// Per-axis affine map onto `[0, 1]`.
struct Normalizer {
    min: V3,
    inv: V3,
}

impl Normalizer {
    fn new(points: &[V3]) -> Self {
        let mut min = [f64::INFINITY; 3];
        let mut max = [f64::NEG_INFINITY; 3];
        for p in points {
            for k in 0..3 {
                min[k] = min[k].min(p[k]);
                max[k] = max[k].max(p[k]);
            }
        }
        let mut inv = [1.0; 3];
        for k in 0..3 {
            let range = max[k] - min[k];
            if range > 0.0 {
                inv[k] = 1.0 / range;
            }
        }
        Self { min, inv }
    }

    fn apply(&self, p: V3) -> V3 {
        [(p[0] - self.min[0]) * self.inv[0], (p[1] - self.min[1]) * self.inv[1], (p[2] - self.min[2]) * self.inv[2]]
    }
}

struct Face {
    v: [usize; 3],
    plane: Plane,
    /// `nb[i]` shares the edge `v[i] -> v[i+1]`.
    nb: [usize; 3],
    outside: Vec<usize>,
    alive: bool,
    queued: bool,
}

struct Builder<'a> {
    p: &'a [V3],
    faces: Vec<Face>,
    queue: std::collections::VecDeque<usize>,
}

impl<'a> Builder<'a> {
    fn face(&self, v: [usize; 3]) -> Face {
        let plane = Plane::through(self.p[v[0]], self.p[v[1]], self.p[v[2]])
            .unwrap_or(Plane { normal: [0.0; 3], offset: 0.0 });
        Face { v, plane, nb: [usize::MAX; 3], outside: Vec::new(), alive: true, queued: false }
    }

    fn dist(&self, f: usize, i: usize) -> f64 {
        self.faces[f].plane.signed_distance(self.p[i])
    }

    fn assign(&mut self, i: usize, candidates: &[usize]) -> bool {
        let mut best = (HULL_EPS, usize::MAX);
        for &f in candidates {
            let d = self.dist(f, i);
            if d > best.0 {
                best = (d, f);
            }
        }
        if best.1 == usize::MAX {
            return false;
        }
        let f = best.1;
        self.faces[f].outside.push(i);
        if !self.faces[f].queued {
            self.faces[f].queued = true;
            self.queue.push_back(f);
        }
        true
    }

    /// Whether replacing face `f` by a cone to `eye` would leave a degenerate
    /// face or a reflex edge against its neighbour `g` across edge `i`.
    ///
    /// When `eye` sits within `HULL_EPS` of the plane of `g`, a thin new face
    /// can tilt far out of that plane; such neighbours are removed as well.
    fn concave_after(&self, f: usize, i: usize, g: usize, eye: usize) -> bool {
        let v = self.faces[f].v;
        let (x, y) = (v[i], v[(i + 1) % 3]);
        let (e, s) = (sub(self.p[y], self.p[x]), sub(self.p[eye], self.p[x]));
        if norm(cross(e, s)) <= HULL_EPS * norm(e).max(norm(s)) {
            return true;
        }
        let Some(plane) = Plane::through(self.p[x], self.p[y], self.p[eye]) else {
            return true;
        };
        let apex = self.faces[g].v.iter().copied().find(|&a| a != x && a != y).expect("triangle");
        plane.signed_distance(self.p[apex]) > HULL_EPS
    }

    /// Faces reachable from `seeds` that the cone to `eye` must replace.
    fn visible_region(&self, seeds: &[usize], eye: usize) -> (Vec<usize>, HashMap<usize, bool>) {
        let mut visible = seeds.to_vec();
        let mut is_visible: HashMap<usize, bool> = seeds.iter().map(|&f| (f, true)).collect();
        let mut k = 0;
        while k < visible.len() {
            let f = visible[k];
            k += 1;
            for i in 0..3 {
                let g = self.faces[f].nb[i];
                if is_visible.get(&g) == Some(&true) {
                    continue;
                }
                let v = self.dist(g, eye) > -HULL_EPS || self.concave_after(f, i, g, eye);
                if v {
                    visible.push(g);
                    is_visible.insert(g, true);
                } else {
                    is_visible.insert(g, false);
                }
            }
        }
        (visible, is_visible)
    }

    /// Faces to add to the visible set so that its boundary becomes a single
    /// simple cycle; empty when it already is one.
    fn horizon_repairs(&self, horizon: &[(usize, usize, usize)], is_visible: &HashMap<usize, bool>) -> Vec<usize> {
        let mut starting_at: HashMap<usize, usize> = HashMap::with_capacity(horizon.len());
        let mut pinched = Vec::new();
        for (n, &(a, _, _)) in horizon.iter().enumerate() {
            if starting_at.insert(a, n).is_some() {
                pinched.push(a);
            }
        }
        if !pinched.is_empty() {
            // swallow the pinch vertex together with its whole fan
            return (0..self.faces.len())
                .filter(|&f| self.faces[f].alive && self.faces[f].v.iter().any(|v| pinched.contains(v)))
                .collect();
        }
        let mut cycle_len = 1;
        let mut n = starting_at[&horizon[0].1];
        while n != 0 && cycle_len <= horizon.len() {
            n = starting_at[&horizon[n].1];
            cycle_len += 1;
        }
        if cycle_len == horizon.len() {
            return Vec::new();
        }
        // several boundary cycles: keep the largest hidden component and
        // fill the holes
        let hidden = |f: usize| self.faces[f].alive && is_visible.get(&f) != Some(&true);
        let mut label: HashMap<usize, usize> = HashMap::new();
        let mut components: Vec<Vec<usize>> = Vec::new();
        for &(_, _, g) in horizon {
            if label.contains_key(&g) {
                continue;
            }
            let id = components.len();
            let mut comp = vec![g];
            label.insert(g, id);
            let mut k = 0;
            while k < comp.len() {
                for h in self.faces[comp[k]].nb {
                    if hidden(h) && !label.contains_key(&h) {
                        label.insert(h, id);
                        comp.push(h);
                    }
                }
                k += 1;
            }
            components.push(comp);
        }
        let keep = (0..components.len()).max_by_key(|&c| (components[c].len(), usize::MAX - c)).unwrap();
        components.into_iter().enumerate().filter(|&(c, _)| c != keep).flat_map(|(_, comp)| comp).collect()
    }

    fn add_point(&mut self, f0: usize) -> Result<()> {
        let eye = {
            let face = &self.faces[f0];
            let mut best = (f64::NEG_INFINITY, usize::MAX);
            for &i in &face.outside {
                let d = face.plane.signed_distance(self.p[i]);
                if d > best.0 {
                    best = (d, i);
                }
            }
            best.1
        };

        let mut seeds = vec![f0];
        let (visible, horizon) = loop {
            let (visible, is_visible) = self.visible_region(&seeds, eye);
            // horizon edges keep the orientation of the visible face they bound
            let mut horizon = Vec::new();
            for &f in &visible {
                let face = &self.faces[f];
                for i in 0..3 {
                    let g = face.nb[i];
                    if !is_visible[&g] {
                        horizon.push((face.v[i], face.v[(i + 1) % 3], g));
                    }
                }
            }
            if horizon.len() < 3 {
                return Err(Error::InvalidArgument("convex hull: visible region covers the hull".into()));
            }
            let extra = self.horizon_repairs(&horizon, &is_visible);
            if extra.is_empty() {
                break (visible, horizon);
            }
            let before = visible.len();
            seeds = visible;
            seeds.extend(extra.into_iter().filter(|f| !is_visible.get(f).copied().unwrap_or(false)));
            if seeds.len() == before {
                return Err(Error::InvalidArgument("convex hull: cannot repair horizon".into()));
            }
        };

        // swallowed vertices are re-tested like any other outside point
        let on_horizon: std::collections::HashSet<usize> = horizon.iter().map(|h| h.0).collect();
        let mut orphans = Vec::new();
        let mut swallowed = std::collections::BTreeSet::new();
        for &f in &visible {
            self.faces[f].alive = false;
            orphans.extend(std::mem::take(&mut self.faces[f].outside).into_iter().filter(|&i| i != eye));
            swallowed.extend(self.faces[f].v.iter().copied().filter(|v| *v != eye && !on_horizon.contains(v)));
        }
        orphans.extend(swallowed);

        let first = self.faces.len();
        let mut starting_at = HashMap::with_capacity(horizon.len());
        for (n, &(a, b, g)) in horizon.iter().enumerate() {
            let mut face = self.face([a, b, eye]);
            face.nb[0] = g;
            self.faces.push(face);
            let slot = self.faces[g].v.iter().position(|&x| x == b).expect("shared edge");
            debug_assert_eq!(self.faces[g].v[(slot + 1) % 3], a);
            self.faces[g].nb[slot] = first + n;
            starting_at.insert(a, first + n);
        }
        for n in 0..horizon.len() {
            let next = starting_at[&horizon[n].1];
            self.faces[first + n].nb[1] = next;
            self.faces[next].nb[2] = first + n;
        }

        let new_faces: Vec<usize> = (first..self.faces.len()).collect();
        for i in orphans {
            self.assign(i, &new_faces);
        }
        Ok(())
    }
}

fn canonical_order(points: &[ExpectationPoint]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (points[i].to_array(), points[j].to_array());
        a.iter()
            .zip(&b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    order
}

/// Convex hull of `points`; non-finite coordinates are rejected.
pub fn convex_hull(points: &[ExpectationPoint]) -> Result<ConvexHull3> {
    if let Some(bad) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument(format!("point {bad} has non-finite coordinates")));
    }
    let order = canonical_order(points);
    let raw: Vec<V3> = order.iter().map(|&i| points[i].to_array()).collect();
    let normalizer = Normalizer::new(&raw);
    let p: Vec<V3> = raw.iter().map(|&q| normalizer.apply(q)).collect();

    let finish = |kind, local: Vec<usize>, facets: Vec<[usize; 3]>, edges: Vec<(usize, usize)>| ConvexHull3 {
        kind,
        vertices: local.iter().map(|&i| ExpectationPoint::from_array(raw[i])).collect(),
        source_index: local.iter().map(|&i| order[i]).collect(),
        facets,
        edges,
    };

    if p.is_empty() {
        return Ok(finish(HullKind::Empty, vec![], vec![], vec![]));
    }

    // extreme pair among the axis extremes
    let mut ext = Vec::new();
    for k in 0..3 {
        let lo = (0..p.len()).min_by(|&i, &j| p[i][k].total_cmp(&p[j][k])).unwrap();
        let hi = (0..p.len()).max_by(|&i, &j| p[i][k].total_cmp(&p[j][k])).unwrap();
        ext.push(lo);
        ext.push(hi);
    }
    let mut pair = (ext[0], ext[0], 0.0);
    for &i in &ext {
        for &j in &ext {
            let d = norm(sub(p[i], p[j]));
            if d > pair.2 {
                pair = (i.min(j), i.max(j), d);
            }
        }
    }
    let (i0, i1, span) = pair;
    if span <= HULL_EPS {
        return Ok(finish(HullKind::Point, vec![0], vec![], vec![]));
    }

    let axis = scale(sub(p[i1], p[i0]), 1.0 / span);
    let line_dist = |q: V3| {
        let r = sub(q, p[i0]);
        norm(sub(r, scale(axis, dot(r, axis))))
    };
    let i2 = (0..p.len()).max_by(|&i, &j| line_dist(p[i]).total_cmp(&line_dist(p[j])).then(j.cmp(&i))).unwrap();
    if line_dist(p[i2]) <= HULL_EPS {
        let t = |i: usize| dot(sub(p[i], p[i0]), axis);
        let lo = (0..p.len()).min_by(|&i, &j| t(i).total_cmp(&t(j)).then(j.cmp(&i))).unwrap();
        let hi = (0..p.len()).max_by(|&i, &j| t(i).total_cmp(&t(j)).then(j.cmp(&i))).unwrap();
        let (a, b) = (lo.min(hi), lo.max(hi));
        return Ok(finish(HullKind::Linear, vec![a, b], vec![], vec![(0, 1)]));
    }

    let base = Plane::through(p[i0], p[i1], p[i2]).expect("non-collinear");
    let i3 = (0..p.len())
        .max_by(|&i, &j| {
            base.signed_distance(p[i]).abs().total_cmp(&base.signed_distance(p[j]).abs()).then(j.cmp(&i))
        })
        .unwrap();
    if base.signed_distance(p[i3]).abs() <= HULL_EPS {
        return Ok(planar_hull(&p, i0, i1, base, finish));
    }

    // tetrahedron with i3 behind the base face
    let (a, mut b, mut c) = (i0, i1, i2);
    if base.signed_distance(p[i3]) > 0.0 {
        std::mem::swap(&mut b, &mut c);
    }
    let mut builder = Builder { p: &p, faces: Vec::new(), queue: Default::default() };
    for v in [[a, b, c], [b, a, i3], [c, b, i3], [a, c, i3]] {
        let face = builder.face(v);
        builder.faces.push(face);
    }
    let mut directed = HashMap::new();
    for (f, face) in builder.faces.iter().enumerate() {
        for i in 0..3 {
            directed.insert((face.v[i], face.v[(i + 1) % 3]), f);
        }
    }
    for f in 0..4 {
        for i in 0..3 {
            let (x, y) = (builder.faces[f].v[i], builder.faces[f].v[(i + 1) % 3]);
            builder.faces[f].nb[i] = directed[&(y, x)];
        }
    }
    let seed = [a, b, c, i3];
    for i in 0..p.len() {
        if !seed.contains(&i) {
            builder.assign(i, &[0, 1, 2, 3]);
        }
    }
    while let Some(f) = builder.queue.pop_front() {
        builder.faces[f].queued = false;
        if builder.faces[f].alive && !builder.faces[f].outside.is_empty() {
            builder.add_point(f)?;
        }
    }

    let alive: Vec<&Face> = builder.faces.iter().filter(|f| f.alive).collect();
    let mut used: Vec<usize> = alive.iter().flat_map(|f| f.v).collect();
    used.sort_unstable();
    used.dedup();
    let local: HashMap<usize, usize> = used.iter().enumerate().map(|(k, &i)| (i, k)).collect();

    let mut facets: Vec<[usize; 3]> = alive
        .iter()
        .map(|f| {
            let t = f.v.map(|i| local[&i]);
            let r = (0..3).min_by_key(|&k| t[k]).unwrap();
            [t[r], t[(r + 1) % 3], t[(r + 2) % 3]]
        })
        .collect();
    facets.sort_unstable();

    let mut edges = Vec::new();
    for face in &alive {
        for i in 0..3 {
            let (x, y) = (face.v[i], face.v[(i + 1) % 3]);
            if x > y {
                continue;
            }
            let other = &builder.faces[face.nb[i]];
            let apex = other.v.iter().copied().find(|&v| v != x && v != y).unwrap();
            let coplanar = face.plane.signed_distance(p[apex]).abs() <= HULL_EPS
                && dot(face.plane.normal, other.plane.normal) > 0.0;
            if !coplanar {
                let (u, w) = (local[&x], local[&y]);
                edges.push((u.min(w), u.max(w)));
            }
        }
    }
    edges.sort_unstable();

    Ok(finish(HullKind::Solid, used, facets, edges))
}

fn planar_hull<F>(p: &[V3], i0: usize, i1: usize, base: Plane, finish: F) -> ConvexHull3
where
    F: Fn(HullKind, Vec<usize>, Vec<[usize; 3]>, Vec<(usize, usize)>) -> ConvexHull3,
{
    let u = sub(p[i1], p[i0]);
    let u = scale(u, 1.0 / norm(u));
    let w = cross(base.normal, u);
    let uv: Vec<(f64, f64, usize)> =
        p.iter().enumerate().map(|(i, &q)| (dot(sub(q, p[i0]), u), dot(sub(q, p[i0]), w), i)).collect();
    let mut sorted = uv.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
    let turn = |o: &(f64, f64, usize), a: &(f64, f64, usize), b: &(f64, f64, usize)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut chain: Vec<(f64, f64, usize)> = Vec::new();
    for pass in 0..2 {
        let start = chain.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64, usize)>> =
            if pass == 0 { Box::new(sorted.iter()) } else { Box::new(sorted.iter().rev()) };
        for q in iter {
            while chain.len() >= start + 2 && turn(&chain[chain.len() - 2], &chain[chain.len() - 1], q) <= HULL_EPS {
                chain.pop();
            }
            chain.push(*q);
        }
        chain.pop();
    }
    let ring: Vec<usize> = chain.iter().map(|q| q.2).collect();
    // start the cycle at the smallest index for a canonical listing
    let r = (0..ring.len()).min_by_key(|&k| ring[k]).unwrap();
    let ring: Vec<usize> = (0..ring.len()).map(|k| ring[(r + k) % ring.len()]).collect();
    let n = ring.len();
    let edges = (0..n).map(|k| (k.min((k + 1) % n), k.max((k + 1) % n))).collect();
    finish(HullKind::Planar, ring, vec![], edges)
}

/// Supporting planes through every triple of points that leaves all points
/// on one side within `eps`. Slow (`O(n⁴)`) reference for testing.
pub fn brute_force_planes(points: &[ExpectationPoint], eps: f64) -> Vec<Plane> {
    let raw: Vec<V3> = points.iter().map(|p| p.to_array()).collect();
    let normalizer = Normalizer::new(&raw);
    let p: Vec<V3> = raw.iter().map(|&q| normalizer.apply(q)).collect();
    let n = p.len();
    let mut planes = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let Some(plane) = Plane::through(p[i], p[j], p[k]) else { continue };
                if norm(cross(sub(p[j], p[i]), sub(p[k], p[i]))) < 1e-9 {
                    continue;
                }
                let (mut above, mut below) = (false, false);
                for q in &p {
                    let d = plane.signed_distance(*q);
                    above |= d > eps;
                    below |= d < -eps;
                    if above && below {
                        break;
                    }
                }
                if above && below {
                    continue;
                }
                let [a, b, c] = [i, j, k].map(|m| raw[m]);
                if let Some(mut orig) = Plane::through(a, b, c) {
                    if above {
                        orig = Plane { normal: scale(orig.normal, -1.0), offset: -orig.offset };
                    }
                    planes.push(orig);
                }
            }
        }
    }
    planes
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    use crate::types::SeededRng;

    fn pt(a: f64, b: f64, c: f64) -> ExpectationPoint {
        ExpectationPoint::new(a, b, c)
    }

    #[test]
    fn tetrahedron_with_centroid() {
        let pts = vec![pt(0.0, 0.0, 0.0), pt(1.0, 0.0, 0.0), pt(0.0, 1.0, 0.0), pt(0.0, 0.0, 1.0), pt(0.25, 0.25, 0.25)];
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.kind, HullKind::Solid);
        assert_eq!(h.vertices.len(), 4);
        assert_eq!(h.facets.len(), 4);
        assert_eq!(h.edges.len(), 6);
        assert!(!h.source_index.contains(&4));
        assert_eq!(h.euler_characteristic(), 2);
    }

    #[test]
    fn cube_corners_survive_interior_points() {
        let mut rng = SeededRng::new(3).rng();
        let mut pts = Vec::new();
        for _ in 0..100 {
            pts.push(pt(rng.random(), rng.random(), rng.random()));
        }
        for k in 0..8 {
            pts.push(pt((k & 1) as f64, (k >> 1 & 1) as f64, (k >> 2 & 1) as f64));
        }
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.vertices.len(), 8);
        for v in &h.vertices {
            assert!(v.to_array().iter().all(|&x| x == 0.0 || x == 1.0));
        }
        // 12 cube edges once the face diagonals are dropped
        assert_eq!(h.edges.len(), 12);
        assert_eq!(h.facets.len(), 12);
        assert_eq!(h.euler_characteristic(), 2);
    }

    #[test]
    fn outward_orientation_and_containment() {
        let mut rng = SeededRng::new(11).rng();
        let pts: Vec<_> = (0..500).map(|_| pt(rng.random(), 5.0 * rng.random::<f64>(), rng.random::<f64>() - 3.0)).collect();
        let h = convex_hull(&pts).unwrap();
        let planes = h.planes();
        for p in &pts {
            assert!(h.outside_distance_with(&planes, p) < 1e-9);
        }
        let c = h.vertices.iter().fold([0.0; 3], |acc, v| {
            let a = v.to_array();
            [acc[0] + a[0], acc[1] + a[1], acc[2] + a[2]]
        });
        let c = scale(c, 1.0 / h.vertices.len() as f64);
        for pl in &planes {
            assert!(pl.signed_distance(c) < 0.0);
        }
    }

    #[test]
    fn degenerate_inputs_are_flagged() {
        assert_eq!(convex_hull(&[]).unwrap().kind, HullKind::Empty);
        let same = vec![pt(1.0, 2.0, 3.0); 5];
        assert_eq!(convex_hull(&same).unwrap().kind, HullKind::Point);
        let line: Vec<_> = (0..7).map(|k| pt(k as f64, 2.0 * k as f64, 1.0)).collect();
        let h = convex_hull(&line).unwrap();
        assert_eq!(h.kind, HullKind::Linear);
        assert_eq!(h.vertices, vec![pt(0.0, 0.0, 1.0), pt(6.0, 12.0, 1.0)]);

        let square = vec![pt(0.0, 0.0, 2.0), pt(1.0, 0.0, 2.0), pt(1.0, 1.0, 2.0), pt(0.0, 1.0, 2.0), pt(0.5, 0.5, 2.0), pt(0.5, 0.0, 2.0)];
        let h = convex_hull(&square).unwrap();
        assert_eq!(h.kind, HullKind::Planar);
        assert_eq!(h.vertices.len(), 4);
        assert_eq!(h.edges.len(), 4);
        assert!(h.outside_distance(&pt(0.5, 0.5, 2.0)) < 1e-12);
        assert!((h.outside_distance(&pt(0.5, 2.0, 2.0)) - 1.0).abs() < 1e-12);

        let tri = vec![pt(0.0, 0.0, 0.0), pt(1.0, 0.0, 0.0), pt(0.0, 1.0, 1.0)];
        assert_eq!(convex_hull(&tri).unwrap().kind, HullKind::Planar);
        assert!(convex_hull(&[pt(f64::NAN, 0.0, 0.0)]).is_err());
    }

    #[test]
    fn input_order_does_not_matter() {
        let mut rng = SeededRng::new(5).rng();
        let pts: Vec<_> = (0..300).map(|_| pt(rng.random(), rng.random(), rng.random())).collect();
        let mut rev = pts.clone();
        rev.reverse();
        let (a, b) = (convex_hull(&pts).unwrap(), convex_hull(&rev).unwrap());
        assert_eq!(a.vertices, b.vertices);
        assert_eq!(a.facets, b.facets);
        assert_eq!(a.edges, b.edges);
    }

    #[test]
    fn brute_force_agrees_on_small_clouds() {
        let mut rng = SeededRng::new(9).rng();
        for _ in 0..20 {
            let pts: Vec<_> = (0..40).map(|_| pt(rng.random(), rng.random(), rng.random())).collect();
            let h = convex_hull(&pts).unwrap();
            let planes = brute_force_planes(&pts, 1e-12);
            for v in &h.vertices {
                for pl in &planes {
                    assert!(pl.signed_distance(v.to_array()) < 1e-9);
                }
            }
            // every hull facet plane is a brute-force supporting plane
            for f in h.planes() {
                assert!(planes.iter().any(|g| dot(g.normal, f.normal) > 1.0 - 1e-9 && (g.offset - f.offset).abs() < 1e-9));
            }
        }
    }
}
