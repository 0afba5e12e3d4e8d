//! Jones polynomial by a direct state sum, sharing no code with the cube.

use std::collections::HashMap;

use super::poly::LaurentPoly;
use crate::error::Result;
use crate::linkdiag::PdCode;

fn find(p: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while p[r] != r {
        r = p[r];
    }
    let mut y = x;
    while p[y] != r {
        let next = p[y];
        p[y] = r;
        y = next;
    }
    r
}

fn circles(pd: &PdCode, state: u32) -> usize {
    let m = 2 * pd.num_crossings();
    let mut p: Vec<usize> = (0..=m).collect();
    for (c, &[i, j, k, l]) in pd.crossings().iter().enumerate() {
        let pairs = if state >> c & 1 == 0 { [(i, j), (k, l)] } else { [(i, l), (j, k)] };
        for (a, b) in pairs {
            let (ra, rb) = (find(&mut p, a as usize), find(&mut p, b as usize));
            p[ra] = rb;
        }
    }
    (1..=m).filter(|&a| find(&mut p, a) == a).count() + pd.loops()
}

/// Crossing signs from a separate orientation walk: each arc is directed
/// towards its "head" slot, starting from the under-strands.
pub fn crossing_signs(pd: &PdCode) -> Vec<i8> {
    let xs = pd.crossings();
    let mut ends: HashMap<u32, Vec<(usize, usize)>> = HashMap::new();
    for (c, x) in xs.iter().enumerate() {
        for (p, &a) in x.iter().enumerate() {
            ends.entry(a).or_default().push((c, p));
        }
    }
    // head[(c, p)] is true when the arc at slot p of crossing c points into c
    let mut head: HashMap<(usize, usize), bool> = HashMap::new();
    let set = |head: &mut HashMap<(usize, usize), bool>, c: usize, p: usize, into: bool| -> bool {
        if head.contains_key(&(c, p)) {
            return false;
        }
        head.insert((c, p), into);
        let other = ends[&xs[c][p]].iter().copied().find(|&e| e != (c, p)).unwrap_or((c, p ^ 2));
        let other = if other == (c, p) { (c, p ^ 2) } else { other };
        head.insert(other, !into);
        true
    };
    for c in 0..xs.len() {
        set(&mut head, c, 0, true);
        set(&mut head, c, 2, false);
    }
    loop {
        let mut changed = false;
        for c in 0..xs.len() {
            for (a, b) in [(1, 3), (3, 1)] {
                if head.get(&(c, a)) == Some(&true) {
                    changed |= set(&mut head, c, b, false);
                }
                if head.get(&(c, a)) == Some(&false) {
                    changed |= set(&mut head, c, b, true);
                }
            }
        }
        if !changed {
            match (0..xs.len()).find(|&c| !head.contains_key(&(c, 1))) {
                Some(c) => {
                    set(&mut head, c, 1, true);
                }
                None => break,
            }
        }
    }
    (0..xs.len()).map(|c| if head[&(c, 3)] { 1 } else { -1 }).collect()
}

/// Unnormalized Jones polynomial
/// `(−1)^{n₋} q^{n₊ − 2n₋} Σ_I (−q)^{|I|} (q + q⁻¹)^{#circles(I)}`.
pub fn jones_state_sum(pd: &PdCode) -> LaurentPoly {
    let signs = crossing_signs(pd);
    let np = signs.iter().filter(|&&s| s > 0).count() as i32;
    let nm = signs.len() as i32 - np;
    let n = pd.num_crossings();
    let q2 = LaurentPoly::quantum_two();
    let max_circles = 2 * n + pd.loops() + 1;
    let powers: Vec<LaurentPoly> = (0..=max_circles as u32).map(|k| q2.pow(k)).collect();
    let mut sum = LaurentPoly::zero();
    for state in 0..1u32 << n {
        let h = state.count_ones() as i32;
        let sign = if h % 2 == 0 { 1 } else { -1 };
        sum = sum.add(&powers[circles(pd, state)].shift(h).scale(sign));
    }
    let sign = if nm % 2 == 0 { 1 } else { -1 };
    sum.shift(np - 2 * nm).scale(sign)
}

/// Jones polynomial normalized to 1 on the unknot; `None` for the empty link.
pub fn jones_normalized(pd: &PdCode) -> Option<LaurentPoly> {
    jones_state_sum(pd).div_quantum_two()
}

/// Reads a Jones polynomial written in `t` (as in knot tables) and returns it
/// in `q` with `t = q²`.
pub fn parse_jones_t(text: &str) -> Result<LaurentPoly> {
    Ok(LaurentPoly::parse_in(text, 't')?.substitute_power(2))
}
