//! Diagram builders and shortcuts shared by the integration tests.
#![allow(dead_code)]

use oddkh::complex::{assemble, reduce_basepoint, Setup};
use oddkh::homology::{smith_homology, BigradedGroup};
use oddkh::linkdiag::{orient, PdCode, DEFAULT_CROSSING_CAP};
use oddkh::signs::AssignmentType;

/// Closure of a braid word on `strands` strands. Generator `i` (1-based)
/// crosses positions `i` and `i + 1`; positive letters give positive
/// crossings. Strands untouched by the word become separate loops.
pub fn braid_closure(word: &[i32], strands: usize) -> PdCode {
    let mut pos: Vec<u32> = (1..=strands as u32).collect();
    let mut next = strands as u32 + 1;
    let mut crossings = vec![];
    for &g in word {
        let i = g.unsigned_abs() as usize - 1;
        assert!(i + 1 < strands, "generator {g} needs more than {strands} strands");
        let (a, b) = (pos[i], pos[i + 1]);
        let (c, d) = (next, next + 1);
        next += 2;
        // bottom-left a, bottom-right b, top-right d, top-left c; a goes to d
        crossings.push(if g > 0 { [b, d, c, a] } else { [a, b, d, c] });
        pos[i] = c;
        pos[i + 1] = d;
    }
    let mut loops = 0;
    for (p, &top) in pos.iter().enumerate() {
        let bottom = p as u32 + 1;
        if top == bottom {
            loops += 1;
            continue;
        }
        for x in crossings.iter_mut() {
            for a in x.iter_mut() {
                if *a == top {
                    *a = bottom;
                }
            }
        }
    }
    PdCode::new(crossings, loops).expect("braid closures are valid diagrams")
}

/// The four ways to add a Reidemeister I loop on an arc.
#[derive(Clone, Copy, Debug)]
pub enum Kink {
    UnderFirstPositive,
    UnderFirstNegative,
    OverFirstPositive,
    OverFirstNegative,
}

pub const KINKS: [Kink; 4] =
    [Kink::UnderFirstPositive, Kink::UnderFirstNegative, Kink::OverFirstPositive, Kink::OverFirstNegative];

/// Inserts a kink into `arc`, just before the crossing it runs into.
pub fn add_kink(pd: &PdCode, arc: u32, kink: Kink) -> PdCode {
    let d = orient(pd, None).unwrap();
    let mut crossings: Vec<[u32; 4]> = pd.crossings().to_vec();
    let base = 2 * pd.num_crossings() as u32 + pd.loops() as u32;
    let (loop_arc, out) = (base + 1, base + 2);
    if arc as usize > 2 * pd.num_crossings() {
        // a crossingless loop: the kink closes it up by itself
        let k = match kink {
            Kink::UnderFirstPositive | Kink::OverFirstPositive => [out, out, loop_arc, loop_arc],
            Kink::UnderFirstNegative | Kink::OverFirstNegative => [loop_arc, out, out, loop_arc],
        };
        crossings.push(k);
        return PdCode::new(crossings, pd.loops() - 1).unwrap();
    }
    // the slot where `arc` enters a crossing
    let head = crossings
        .iter()
        .enumerate()
        .flat_map(|(c, x)| (0..4).map(move |s| (c, s, x[s])))
        .find(|&(c, s, a)| a == arc && (s == 0 || (s == 3 && d.signs()[c] > 0) || (s == 1 && d.signs()[c] < 0)))
        .map(|(c, s, _)| (c, s))
        .expect("arc has a head");
    crossings[head.0][head.1] = out;
    let (a, l, b) = (arc, loop_arc, out);
    crossings.push(match kink {
        Kink::UnderFirstPositive => [a, b, l, l],
        Kink::UnderFirstNegative => [a, l, l, b],
        Kink::OverFirstPositive => [l, l, b, a],
        Kink::OverFirstNegative => [l, a, b, l],
    });
    PdCode::new(crossings, pd.loops()).unwrap()
}

pub fn setup(pd: &PdCode, t: AssignmentType) -> Setup {
    Setup::new(orient(pd, None).unwrap(), t, DEFAULT_CROSSING_CAP).unwrap()
}

/// Unreduced odd integral homology.
pub fn odd(pd: &PdCode) -> BigradedGroup {
    smith_homology(&assemble(&setup(pd, AssignmentType::X)).unwrap()).unwrap()
}

/// Reduced odd integral homology at arc `p`.
pub fn odd_reduced(pd: &PdCode, p: u32) -> BigradedGroup {
    let s = setup(pd, AssignmentType::X);
    smith_homology(&reduce_basepoint(&assemble(&s).unwrap(), &s, p).unwrap()).unwrap()
}
