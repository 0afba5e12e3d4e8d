//! The hypercube of resolutions: edge cobordisms and face types.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::{Cobordism, CobordismKind, ExteriorElement, Monomial};
use crate::error::{Error, Result};
use crate::linkdiag::{all_resolutions, Arrow, OrientedDiagram, Resolution, SurgeryArc};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FaceType {
    A,
    C,
    X,
    Y,
}

impl fmt::Display for FaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Merge,
    Split,
}

#[derive(Clone, Debug)]
pub struct CubeEdge {
    pub from: u32,
    pub to: u32,
    pub crossing: usize,
    pub kind: EdgeKind,
    pub cobordism: Cobordism,
}

#[derive(Clone, Debug)]
pub struct CubeFace {
    pub corner00: u32,
    pub corner11: u32,
    pub crossings: (usize, usize),
    /// `[e(v, c1), e(v + c1, c2), e(v, c2), e(v + c2, c1)]`: the first two
    /// and the last two form the two paths from `corner00` to `corner11`.
    pub edges: [usize; 4],
    pub face_type: FaceType,
}

#[derive(Clone, Debug)]
pub struct Cube {
    n: usize,
    resolutions: Vec<Resolution>,
    edges: Vec<CubeEdge>,
    edge_index: Vec<u32>,
    faces: Vec<CubeFace>,
    face_index: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

fn pair_index(n: usize, c1: usize, c2: usize) -> usize {
    debug_assert!(c1 < c2 && c2 < n);
    c1 * n + c2
}

/// Cobordism of the edge out of `r0` changing crossing `c` from 0 to 1.
pub fn edge_cobordism(
    d: &OrientedDiagram,
    r0: &Resolution,
    r1: &Resolution,
    c: usize,
) -> Result<(EdgeKind, Cobordism)> {
    let arc = r0.surgery_arcs[c]
        .ok_or_else(|| Error::InvalidArgument(format!("crossing {c} is not 0-resolved at vertex {:#b}", r0.vertex)))?;
    let relabel: Vec<u32> = r0.circles.iter().map(|circ| r1.circle_of_arc(circ.arcs[0]) as u32).collect();
    let dim = r0.num_circles();
    if arc.is_split() {
        let [i, j, _, _] = d.pd().crossings()[c];
        let (mut a1, mut a2) = (r1.circle_of_arc(j) as u32, r1.circle_of_arc(i) as u32);
        if d.arrows()[c] == Arrow::Reversed {
            std::mem::swap(&mut a1, &mut a2);
        }
        Ok((EdgeKind::Split, Cobordism::split(dim, arc.tail.circle as u32, a1, a2, relabel)?))
    } else {
        let cob = Cobordism::merge(dim, arc.tail.circle as u32, arc.head.circle as u32, relabel)?;
        Ok((EdgeKind::Merge, cob))
    }
}

/// X/Y label of two interleaved arcs on one circle, or `None` when the arcs
/// are not in that configuration.
///
/// Walk the circle from the tail of `s1`, keeping `s1` on the left. The face
/// is X when the first endpoint of `s2` met is its tail.
pub fn ladybug_type(r: &Resolution, s1: &SurgeryArc, s2: &SurgeryArc) -> Option<FaceType> {
    let circle = s1.tail.circle;
    if !(s1.is_split() && s2.is_split() && s2.tail.circle == circle) {
        return None;
    }
    let len = r.circles[circle].strands.len();
    let (p, q) = (s1.tail.position, s1.head.position);
    let between = |x: usize| {
        let (d, e) = ((x + len - p) % len, (q + len - p) % len);
        d < e
    };
    if between(s2.tail.position) == between(s2.head.position) {
        return None;
    }
    let step = if s1.tail.aligned { 1 } else { len - 1 };
    let mut x = p;
    loop {
        x = (x + step) % len;
        if x == s2.tail.position {
            return Some(FaceType::X);
        }
        if x == s2.head.position {
            return Some(FaceType::Y);
        }
    }
}

fn local_basis(s1: &SurgeryArc, s2: &SurgeryArc) -> Vec<Monomial> {
    let mut support = 0u32;
    for end in [s1.tail, s1.head, s2.tail, s2.head] {
        support |= 1 << end.circle;
    }
    // all submasks of support
    let mut out = vec![];
    let mut m = support;
    loop {
        out.push(m);
        if m == 0 {
            break;
        }
        m = (m - 1) & support;
    }
    out.reverse();
    out
}

fn composite(first: &Cobordism, second: &Cobordism, m: Monomial) -> ExteriorElement {
    let mut out = ExteriorElement::zero(second.target_dim);
    for &(r, c) in first.apply_monomial(m).as_slice() {
        for &(t, d) in second.apply_monomial(r).as_slice() {
            out.add_term(t, c * d);
        }
    }
    out
}

/// Relation between the two composites on a set of monomials:
/// `Some(1)` equal, `Some(-1)` opposite, `Some(0)` both zero.
fn composite_relation(
    path1: (&Cobordism, &Cobordism),
    path2: (&Cobordism, &Cobordism),
    basis: impl Iterator<Item = Monomial>,
) -> Option<i8> {
    let mut rel: Option<i8> = None;
    let update = |r: i8, rel: &mut Option<i8>| -> bool {
        match rel {
            None => {
                *rel = Some(r);
                true
            }
            Some(x) => *x == r,
        }
    };
    let mut all_zero = true;
    for m in basis {
        let u = composite(path1.0, path1.1, m);
        let w = composite(path2.0, path2.1, m);
        if u.is_zero() && w.is_zero() {
            continue;
        }
        all_zero = false;
        let r = if u == w {
            1
        } else if u == w.neg() {
            -1
        } else {
            return None;
        };
        if !update(r, &mut rel) {
            return None;
        }
    }
    if all_zero {
        Some(0)
    } else {
        rel
    }
}

/// Face type at `r00` for crossings `c1 < c2`, from the edge maps
/// `[e(v, c1), e(v + c1, c2), e(v, c2), e(v + c2, c1)]`, cross-checked
/// against the arc configuration.
pub fn classify_face(r00: &Resolution, c1: usize, c2: usize, edges: [&Cobordism; 4]) -> Result<FaceType> {
    let err = |reason: String| Error::FaceClassification { vertex: r00.vertex, c1, c2, reason };
    let (s1, s2) = match (r00.surgery_arcs.get(c1), r00.surgery_arcs.get(c2)) {
        (Some(Some(a)), Some(Some(b))) => (*a, *b),
        _ => return Err(err("surgery arcs not attached to the corner resolution".into())),
    };
    if edges[0].source_dim() != r00.num_circles() || edges[2].source_dim() != r00.num_circles() {
        return Err(err("edge maps do not start at the corner resolution".into()));
    }
    let basis = local_basis(&s1, &s2);
    let rel = composite_relation((edges[0], edges[1]), (edges[2], edges[3]), basis.into_iter())
        .ok_or_else(|| err("composites are neither equal nor opposite".into()))?;
    let pattern = ladybug_type(r00, &s1, &s2);
    match (rel, pattern) {
        (0, Some(t)) => Ok(t),
        (0, None) => Err(err("composites vanish but the arcs are not interleaved on one circle".into())),
        (_, Some(_)) => Err(err("interleaved arcs with nonzero composites".into())),
        (1, None) => Ok(FaceType::C),
        (_, None) => Ok(FaceType::A),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParityViolation {
    pub vertex: u32,
    pub crossings: [usize; 3],
    pub types: [FaceType; 6],
}

impl Cube {
    pub fn new(d: &OrientedDiagram, cap: usize) -> Result<Cube> {
        let resolutions = all_resolutions(d, cap)?;
        build_cube(d, resolutions)
    }

    pub fn num_crossings(&self) -> usize {
        self.n
    }

    pub fn resolutions(&self) -> &[Resolution] {
        &self.resolutions
    }

    pub fn resolution(&self, v: u32) -> &Resolution {
        &self.resolutions[v as usize]
    }

    pub fn edges(&self) -> &[CubeEdge] {
        &self.edges
    }

    pub fn faces(&self) -> &[CubeFace] {
        &self.faces
    }

    pub fn edge_id(&self, v: u32, c: usize) -> Option<usize> {
        let id = *self.edge_index.get(v as usize * self.n + c)?;
        (id != ABSENT).then_some(id as usize)
    }

    /// Face with lower corner `v` spanned by crossings `c1 < c2`.
    pub fn face_id(&self, v: u32, c1: usize, c2: usize) -> Option<usize> {
        let (c1, c2) = (c1.min(c2), c1.max(c2));
        if c1 == c2 || c2 >= self.n {
            return None;
        }
        let id = self.face_index[v as usize * self.n * self.n + pair_index(self.n, c1, c2)];
        (id != ABSENT).then_some(id as usize)
    }

    pub fn count_types(&self) -> [usize; 4] {
        let mut out = [0; 4];
        for f in &self.faces {
            out[f.face_type as usize] += 1;
        }
        out
    }

    /// Every 3-dimensional subcube has an even number of faces of types A
    /// and X, and of types A and Y.
    pub fn verify_cube_parity(&self) -> std::result::Result<(), ParityViolation> {
        let n = self.n;
        let full = (1u32 << n) - 1;
        (0..1u32 << n).into_par_iter().try_for_each(|v| {
            let free = full & !v;
            for c1 in 0..n {
                if free >> c1 & 1 == 0 {
                    continue;
                }
                for c2 in c1 + 1..n {
                    if free >> c2 & 1 == 0 {
                        continue;
                    }
                    for c3 in c2 + 1..n {
                        if free >> c3 & 1 == 0 {
                            continue;
                        }
                        let b = |c: usize| 1u32 << c;
                        let ids = [
                            (v, c1, c2),
                            (v, c1, c3),
                            (v, c2, c3),
                            (v | b(c3), c1, c2),
                            (v | b(c2), c1, c3),
                            (v | b(c1), c2, c3),
                        ];
                        let types = ids.map(|(u, x, y)| self.faces[self.face_id(u, x, y).unwrap()].face_type);
                        let count = |t: FaceType| types.iter().filter(|&&x| x == t).count();
                        let (a, x, y) = (count(FaceType::A), count(FaceType::X), count(FaceType::Y));
                        if (a + x) % 2 != 0 || (a + y) % 2 != 0 {
                            return Err(ParityViolation { vertex: v, crossings: [c1, c2, c3], types });
                        }
                    }
                }
            }
            Ok(())
        })
    }

    /// Checks the commutation relation of each face on every basis element
    /// of its corner resolution, not just the circles the arcs touch.
    pub fn verify_face_relations(&self) -> Result<()> {
        self.faces.par_iter().try_for_each(|f| {
            let r = self.resolution(f.corner00);
            let e = f.edges.map(|i| &self.edges[i].cobordism);
            let rel = composite_relation((e[0], e[1]), (e[2], e[3]), 0..1u32 << r.num_circles());
            let expected = match f.face_type {
                FaceType::A => -1,
                FaceType::C => 1,
                FaceType::X | FaceType::Y => 0,
            };
            if rel != Some(expected) {
                return Err(Error::FaceClassification {
                    vertex: f.corner00,
                    c1: f.crossings.0,
                    c2: f.crossings.1,
                    reason: format!("type {} violated on the full basis", f.face_type),
                });
            }
            Ok(())
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                let detail = match e.cobordism.kind {
                    CobordismKind::Merge { a1, a2 } => json!({"a1": a1, "a2": a2}),
                    CobordismKind::Split { a, a1, a2 } => json!({"a": a, "a1": a1, "a2": a2}),
                    CobordismKind::Birth { born } => json!({"born": born}),
                    CobordismKind::Death { a } => json!({"a": a}),
                };
                json!({"from": e.from, "to": e.to, "crossing": e.crossing, "kind": e.kind, "circles": detail})
            })
            .collect();
        let faces: Vec<_> = self
            .faces
            .iter()
            .map(|f| {
                json!({
                    "corner00": f.corner00,
                    "corner11": f.corner11,
                    "crossings": [f.crossings.0, f.crossings.1],
                    "edges": f.edges,
                    "type": f.face_type,
                })
            })
            .collect();
        let vertices: Vec<_> = self
            .resolutions
            .iter()
            .map(|r| {
                let circles: Vec<_> = r.circles.iter().map(|c| c.arcs.clone()).collect();
                json!({"vertex": r.vertex, "circles": circles})
            })
            .collect();
        let [a, c, x, y] = self.count_types();
        json!({
            "crossings": self.n,
            "vertices": vertices,
            "edges": edges,
            "faces": faces,
            "counts": {"A": a, "C": c, "X": x, "Y": y},
        })
    }
}

pub fn build_cube(d: &OrientedDiagram, resolutions: Vec<Resolution>) -> Result<Cube> {
    let n = d.num_crossings();
    if resolutions.len() != 1usize << n {
        return Err(Error::InvalidArgument("incomplete resolution family".into()));
    }
    let mut slots = vec![];
    for v in 0..1u32 << n {
        for c in 0..n {
            if v >> c & 1 == 0 {
                slots.push((v, c));
            }
        }
    }
    let edges: Vec<CubeEdge> = slots
        .par_iter()
        .map(|&(v, c)| {
            let to = v | 1 << c;
            let r0 = &resolutions[v as usize];
            let r1 = &resolutions[to as usize];
            let (kind, cobordism) = edge_cobordism(d, r0, r1, c)?;
            Ok(CubeEdge { from: v, to, crossing: c, kind, cobordism })
        })
        .collect::<Result<_>>()?;
    let mut edge_index = vec![ABSENT; (1usize << n) * n];
    for (i, e) in edges.iter().enumerate() {
        edge_index[e.from as usize * n + e.crossing] = i as u32;
    }

    let mut corners = vec![];
    for v in 0..1u32 << n {
        for c1 in 0..n {
            for c2 in c1 + 1..n {
                if v >> c1 & 1 == 0 && v >> c2 & 1 == 0 {
                    corners.push((v, c1, c2));
                }
            }
        }
    }
    let e = |v: u32, c: usize| edge_index[v as usize * n + c] as usize;
    let faces: Vec<CubeFace> = corners
        .par_iter()
        .map(|&(v, c1, c2)| {
            let ids = [e(v, c1), e(v | 1 << c1, c2), e(v, c2), e(v | 1 << c2, c1)];
            let cobs = ids.map(|i| &edges[i].cobordism);
            let face_type = classify_face(&resolutions[v as usize], c1, c2, cobs)?;
            Ok(CubeFace { corner00: v, corner11: v | 1 << c1 | 1 << c2, crossings: (c1, c2), edges: ids, face_type })
        })
        .collect::<Result<_>>()?;
    let mut face_index = vec![ABSENT; if n >= 2 { (1usize << n) * n * n } else { 0 }];
    for (i, f) in faces.iter().enumerate() {
        face_index[f.corner00 as usize * n * n + pair_index(n, f.crossings.0, f.crossings.1)] = i as u32;
    }
    Ok(Cube { n, resolutions, edges, edge_index, faces, face_index })
}
