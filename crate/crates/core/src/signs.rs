//! Edge assignments of type X and Y.
//!
//! Signs are encoded in GF(2) as `0 ↔ +1`, `1 ↔ −1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cube::{Cube, FaceType};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AssignmentType {
    X,
    Y,
}

/// GF(2) value per face, indexed like `Cube::faces`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceCochain {
    pub values: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeAssignment {
    /// `±1` per edge, indexed like `Cube::edges`.
    pub values: Vec<i8>,
    pub assignment_type: AssignmentType,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceViolation {
    pub face: usize,
    pub corner00: u32,
    pub crossings: (usize, usize),
    pub face_type: FaceType,
    pub product: i8,
}

pub fn target_cochain(cube: &Cube, t: AssignmentType) -> FaceCochain {
    let values = cube
        .faces()
        .iter()
        .map(|f| match (f.face_type, t) {
            (FaceType::A, _) | (FaceType::X, AssignmentType::X) | (FaceType::Y, AssignmentType::Y) => 0,
            _ => 1,
        })
        .collect();
    FaceCochain { values }
}

fn face_value(cube: &Cube, phi: &FaceCochain, v: u32, c1: usize, c2: usize) -> u8 {
    phi.values[cube.face_id(v, c1, c2).expect("face exists")]
}

/// Checks that φ sums to zero over the boundary of every 3-subcube.
pub fn check_cocycle(cube: &Cube, phi: &FaceCochain) -> Result<()> {
    let n = cube.num_crossings();
    let full = if n == 0 { 0 } else { (1u32 << n) - 1 };
    (0..1u32 << n).into_par_iter().try_for_each(|v| {
        let free = full & !v;
        for c1 in (0..n).filter(|&c| free >> c & 1 == 1) {
            for c2 in (c1 + 1..n).filter(|&c| free >> c & 1 == 1) {
                for c3 in (c2 + 1..n).filter(|&c| free >> c & 1 == 1) {
                    let s = face_value(cube, phi, v, c1, c2)
                        ^ face_value(cube, phi, v, c1, c3)
                        ^ face_value(cube, phi, v, c2, c3)
                        ^ face_value(cube, phi, v | 1 << c3, c1, c2)
                        ^ face_value(cube, phi, v | 1 << c2, c1, c3)
                        ^ face_value(cube, phi, v | 1 << c1, c2, c3);
                    if s != 0 {
                        return Err(Error::NotCocycle(format!(
                            "3-subcube at vertex {v:#b} on crossings ({c1}, {c2}, {c3})"
                        )));
                    }
                }
            }
        }
        Ok(())
    })
}

/// Solves δε = φ by propagation along the spanning tree whose edges are the
/// `(v, c)` with `v < 2^c`. The edge `(v, c)` off the tree is fixed by the
/// face at `v − 2^j` on crossings `c, j`, where `j` is the top bit of `v`.
pub fn solve_assignment(cube: &Cube, phi: &FaceCochain, t: AssignmentType) -> Result<EdgeAssignment> {
    check_cocycle(cube, phi)?;
    let n = cube.num_crossings();
    let mut values = vec![0u8; cube.edges().len()];
    for (id, e) in cube.edges().iter().enumerate() {
        let (v, c) = (e.from, e.crossing);
        if (v as u64) < 1u64 << c {
            continue;
        }
        let j = 31 - v.leading_zeros() as usize;
        debug_assert!(j > c && j < n);
        let u = v & !(1 << j);
        let edge = |w: u32, x: usize| values[cube.edge_id(w, x).expect("edge exists")];
        let f = cube.face_id(u, c, j).expect("face exists");
        values[id] = phi.values[f] ^ edge(u, c) ^ edge(u | 1 << c, j) ^ edge(u, j);
    }
    let eps = EdgeAssignment {
        values: values.into_iter().map(|b| if b == 0 { 1 } else { -1 }).collect(),
        assignment_type: t,
    };
    if let Err(v) = verify_against(cube, &eps, phi) {
        return Err(Error::NotCocycle(format!("face {} left unsatisfied", v.face)));
    }
    Ok(eps)
}

/// Solves δε = φ by Gaussian elimination over GF(2) on the full
/// faces × edges incidence system. Free variables are set to 0.
pub fn solve_assignment_dense(cube: &Cube, phi: &FaceCochain, t: AssignmentType) -> Result<EdgeAssignment> {
    let m = cube.edges().len();
    let words = m / 64 + 1;
    // augmented rows: bit m holds φ
    let mut rows: Vec<Vec<u64>> = cube
        .faces()
        .iter()
        .zip(&phi.values)
        .map(|(f, &p)| {
            let mut r = vec![0u64; words];
            for &e in &f.edges {
                r[e / 64] ^= 1 << (e % 64);
            }
            if p == 1 {
                r[m / 64] |= 1 << (m % 64);
            }
            r
        })
        .collect();
    let bit = |r: &Vec<u64>, i: usize| r[i / 64] >> (i % 64) & 1 == 1;
    let mut pivots = vec![];
    let mut rank = 0;
    for col in 0..m {
        let Some(p) = (rank..rows.len()).find(|&i| bit(&rows[i], col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && bit(r, col) {
                for (a, b) in r.iter_mut().zip(&pivot) {
                    *a ^= b;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rows[rank..].iter().any(|r| bit(r, m)) {
        return Err(Error::NotCocycle("incidence system is inconsistent".into()));
    }
    let mut values = vec![1i8; m];
    for (i, &col) in pivots.iter().enumerate() {
        if bit(&rows[i], m) {
            values[col] = -1;
        }
    }
    Ok(EdgeAssignment { values, assignment_type: t })
}

fn verify_against(cube: &Cube, eps: &EdgeAssignment, phi: &FaceCochain) -> std::result::Result<(), FaceViolation> {
    cube.faces().par_iter().enumerate().try_for_each(|(i, f)| {
        let product: i8 = f.edges.iter().map(|&e| eps.values[e]).product();
        let want = if phi.values[i] == 0 { 1 } else { -1 };
        if product != want {
            return Err(FaceViolation {
                face: i,
                corner00: f.corner00,
                crossings: f.crossings,
                face_type: f.face_type,
                product,
            });
        }
        Ok(())
    })
}

/// Checks the defining parity condition of `eps` on every face, returning
/// the first violating face.
pub fn verify_assignment(cube: &Cube, eps: &EdgeAssignment) -> std::result::Result<(), FaceViolation> {
    if eps.values.len() != cube.edges().len() {
        return Err(FaceViolation {
            face: usize::MAX,
            corner00: 0,
            crossings: (0, 0),
            face_type: FaceType::A,
            product: 0,
        });
    }
    verify_against(cube, eps, &target_cochain(cube, eps.assignment_type))
}

/// `ε'(v → w) = η(v) ε(v → w) η(w)`.
pub fn gauge_transform(cube: &Cube, eps: &EdgeAssignment, eta: &[i8]) -> EdgeAssignment {
    let values =
        cube.edges().iter().zip(&eps.values).map(|(e, &s)| eta[e.from as usize] * s * eta[e.to as usize]).collect();
    EdgeAssignment { values, assignment_type: eps.assignment_type }
}

/// Vertex signs η with `gauge_transform(eps, η) == other`, if any.
pub fn find_gauge(cube: &Cube, eps: &EdgeAssignment, other: &EdgeAssignment) -> Option<Vec<i8>> {
    let n = cube.num_crossings();
    let mut eta = vec![1i8; 1 << n];
    for w in 1u32..1 << n {
        let c = 31 - w.leading_zeros() as usize;
        let v = w & !(1 << c);
        let e = cube.edge_id(v, c)?;
        eta[w as usize] = eta[v as usize] * eps.values[e] * other.values[e];
    }
    (gauge_transform(cube, eps, &eta) == *other).then_some(eta)
}

pub fn assignment_json(cube: &Cube, eps: &EdgeAssignment) -> serde_json::Value {
    let edges: Vec<_> = cube
        .edges()
        .iter()
        .zip(&eps.values)
        .map(|(e, &s)| json!({"from": e.from, "to": e.to, "crossing": e.crossing, "sign": s}))
        .collect();
    json!({"type": eps.assignment_type, "edges": edges})
}

/// Builds and checks an assignment of the given type.
pub fn assignment_for(cube: &Cube, t: AssignmentType) -> Result<EdgeAssignment> {
    solve_assignment(cube, &target_cochain(cube, t), t)
}
