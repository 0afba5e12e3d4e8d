//! Planar diagrams: PD codes, strand orientation, crossing signs and the
//! circles of every resolution.
//!
//! A crossing is a 4-tuple `X[i, j, k, l]` of arc labels listed
//! counterclockwise starting from the incoming under-strand, so the
//! under-strand runs `i -> k` and the over-strand joins `j` and `l`.
//! The 0-smoothing joins `(i, j)` and `(k, l)`; the 1-smoothing joins
//! `(i, l)` and `(j, k)`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_CROSSING_CAP: usize = 14;

/// Circles are indexed by `u32` bitmasks downstream.
pub const MAX_CIRCLES: usize = 32;

#[inline]
fn slot(c: usize, p: usize) -> usize {
    4 * c + p
}

/// Validated PD code. Arc labels are `1..=2n`; crossingless unknotted
/// components are counted in `loops` and get the labels after the last
/// crossing arc.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PdCode {
    crossings: Vec<[u32; 4]>,
    loops: usize,
}

/// Per-slot orientation data traced from a PD code.
struct Traced {
    entering: Vec<bool>,
    arc_component: Vec<usize>,
    n_components: usize,
}

fn arc_slots(crossings: &[[u32; 4]]) -> Vec<[usize; 2]> {
    let n_arcs = 2 * crossings.len();
    let mut slots = vec![[usize::MAX; 2]; n_arcs];
    for (c, x) in crossings.iter().enumerate() {
        for (p, &a) in x.iter().enumerate() {
            let e = &mut slots[a as usize - 1];
            if e[0] == usize::MAX {
                e[0] = slot(c, p);
            } else {
                e[1] = slot(c, p);
            }
        }
    }
    slots
}

fn other_end(slots: &[[usize; 2]], crossings: &[[u32; 4]], s: usize) -> usize {
    let a = crossings[s / 4][s % 4] as usize - 1;
    let [x, y] = slots[a];
    if x == s {
        y
    } else {
        x
    }
}

/// Walks every strand component. With `strict`, under-strands must run
/// from tuple position 0 to position 2; otherwise each component keeps the
/// direction of the first under-crossing met.
fn trace(crossings: &[[u32; 4]], strict: bool) -> Result<Traced> {
    let n = crossings.len();
    let slots = arc_slots(crossings);
    let mut state: Vec<Option<bool>> = vec![None; 4 * n];
    let mut arc_component = vec![usize::MAX; 2 * n];
    let mut n_components = 0;

    let walk =
        |start_exit: usize, state: &mut Vec<Option<bool>>, arc_component: &mut Vec<usize>, comp: usize| -> Result<()> {
            let mut exit = start_exit;
            loop {
                let c = exit / 4;
                if state[exit].is_some() {
                    return Err(Error::InconsistentOrientation(c));
                }
                if strict && exit.is_multiple_of(4) {
                    return Err(Error::InconsistentOrientation(c));
                }
                state[exit] = Some(false);
                let a = crossings[c][exit % 4] as usize - 1;
                arc_component[a] = comp;
                let t = other_end(&slots, crossings, exit);
                if state[t].is_some() || (strict && t % 4 == 2) {
                    return Err(Error::InconsistentOrientation(t / 4));
                }
                state[t] = Some(true);
                exit = t ^ 2;
                if exit == start_exit {
                    return Ok(());
                }
            }
        };

    for c in 0..n {
        if state[slot(c, 0)].is_none() && state[slot(c, 2)].is_none() {
            walk(slot(c, 2), &mut state, &mut arc_component, n_components)?;
            n_components += 1;
        } else if state[slot(c, 0)].is_none() || state[slot(c, 2)].is_none() {
            return Err(Error::InconsistentOrientation(c));
        }
    }
    // components that only ever pass over: orient the lowest arc from its
    // lower slot
    for a in 0..2 * n {
        if arc_component[a] == usize::MAX {
            walk(slots[a][0], &mut state, &mut arc_component, n_components)?;
            n_components += 1;
        }
    }
    let entering = state.into_iter().map(|s| s.unwrap_or(false)).collect();
    Ok(Traced { entering, arc_component, n_components })
}

fn renumber(crossings: &mut [[u32; 4]]) -> Result<()> {
    let mut counts = std::collections::BTreeMap::new();
    for x in crossings.iter() {
        for &a in x {
            if a == 0 {
                return Err(Error::Syntax("arc labels must be positive".into()));
            }
            *counts.entry(a).or_insert(0usize) += 1;
        }
    }
    for (&label, &count) in &counts {
        match count {
            2 => {}
            1 => return Err(Error::OpenStrand(label)),
            _ => return Err(Error::ArcCount { label, count }),
        }
    }
    let map: std::collections::HashMap<u32, u32> = counts.keys().enumerate().map(|(i, &a)| (a, i as u32 + 1)).collect();
    for x in crossings.iter_mut() {
        for a in x.iter_mut() {
            *a = map[a];
        }
    }
    Ok(())
}

impl PdCode {
    pub fn new(mut crossings: Vec<[u32; 4]>, loops: usize) -> Result<Self> {
        renumber(&mut crossings)?;
        trace(&crossings, true)?;
        Ok(Self { crossings, loops })
    }

    /// Builds a PD code whose under-strands may point either way; tuples are
    /// rotated by two where needed so each starts at an incoming under-strand.
    pub fn from_unoriented(mut crossings: Vec<[u32; 4]>, loops: usize) -> Result<Self> {
        renumber(&mut crossings)?;
        let traced = trace(&crossings, false)?;
        for (c, x) in crossings.iter_mut().enumerate() {
            if traced.entering[slot(c, 2)] {
                *x = [x[2], x[3], x[0], x[1]];
            }
        }
        Self::new(crossings, loops)
    }

    pub fn unknot() -> Self {
        Self { crossings: vec![], loops: 1 }
    }

    pub fn empty() -> Self {
        Self { crossings: vec![], loops: 0 }
    }

    pub fn crossings(&self) -> &[[u32; 4]] {
        &self.crossings
    }

    pub fn num_crossings(&self) -> usize {
        self.crossings.len()
    }

    pub fn loops(&self) -> usize {
        self.loops
    }

    /// Arc count including one arc per crossingless loop.
    pub fn num_arcs(&self) -> usize {
        2 * self.crossings.len() + self.loops
    }

    pub fn is_arc(&self, label: u32) -> bool {
        label >= 1 && label as usize <= self.num_arcs()
    }

    pub fn with_loops(&self, loops: usize) -> Self {
        Self { crossings: self.crossings.clone(), loops }
    }

    pub fn disjoint_union(&self, other: &PdCode) -> PdCode {
        let shift = 2 * self.crossings.len() as u32;
        let mut crossings = self.crossings.clone();
        crossings.extend(other.crossings.iter().map(|x| x.map(|a| a + shift)));
        PdCode { crossings, loops: self.loops + other.loops }
    }

    /// Mirror image: every crossing switches which strand passes over.
    pub fn mirror(&self) -> PdCode {
        let traced = trace(&self.crossings, true).expect("validated PD code");
        let crossings = self
            .crossings
            .iter()
            .enumerate()
            .map(|(c, &[i, j, k, l])| if traced.entering[slot(c, 3)] { [l, i, j, k] } else { [j, k, l, i] })
            .collect();
        PdCode { crossings, loops: self.loops }
    }

    /// Removes crossing `c`, replacing it by its `choice`-smoothing.
    pub fn smooth(&self, c: usize, choice: u8) -> Result<PdCode> {
        if c >= self.crossings.len() || choice > 1 {
            return Err(Error::InvalidArgument(format!("cannot smooth crossing {c} with choice {choice}")));
        }
        let [i, j, k, l] = self.crossings[c];
        let n_arcs = 2 * self.crossings.len();
        let mut parent: Vec<usize> = (0..=n_arcs).collect();
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
        let pairs = if choice == 0 { [(i, j), (k, l)] } else { [(i, l), (j, k)] };
        for (a, b) in pairs {
            let (ra, rb) = (find(&mut parent, a as usize), find(&mut parent, b as usize));
            parent[ra.max(rb)] = ra.min(rb);
        }
        let crossings: Vec<[u32; 4]> = self
            .crossings
            .iter()
            .enumerate()
            .filter(|&(x, _)| x != c)
            .map(|(_, t)| t.map(|a| find(&mut parent, a as usize) as u32))
            .collect();
        let used: std::collections::HashSet<usize> = crossings.iter().flatten().map(|&a| a as usize).collect();
        let mut closed = std::collections::HashSet::new();
        for a in [i, j, k, l] {
            let r = find(&mut parent, a as usize);
            if !used.contains(&r) {
                closed.insert(r);
            }
        }
        PdCode::from_unoriented(crossings, self.loops + closed.len())
    }
}

impl fmt::Display for PdCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PD[")?;
        let mut first = true;
        for x in &self.crossings {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "X[{},{},{},{}]", x[0], x[1], x[2], x[3])?;
        }
        for k in 0..self.loops {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "Loop[{}]", 2 * self.crossings.len() + k + 1)?;
        }
        write!(f, "]")
    }
}

#[derive(Deserialize)]
struct PdJson {
    pd: Vec<[u32; 4]>,
    #[serde(default)]
    loops: Option<usize>,
}

/// Parses `PD[X[a,b,c,d],...]` (with optional `Loop[a]` entries), a JSON
/// array of 4-tuples, or a JSON record `{"pd": [...], "loops": n}`.
///
/// An empty JSON crossing list without a `loops` field denotes the unknot;
/// the text form `PD[]` is the empty link.
pub fn parse_pd(text: &str) -> Result<PdCode> {
    let t = text.trim();
    if t.starts_with('{') {
        let rec: PdJson = serde_json::from_str(t)?;
        let loops = rec.loops.unwrap_or(if rec.pd.is_empty() { 1 } else { 0 });
        return PdCode::new(rec.pd, loops);
    }
    if t.starts_with('[') {
        let pd: Vec<[u32; 4]> = serde_json::from_str(t)?;
        let loops = if pd.is_empty() { 1 } else { 0 };
        return PdCode::new(pd, loops);
    }
    let compact: String = t.chars().filter(|c| !c.is_whitespace()).collect();
    let body = compact
        .strip_prefix("PD[")
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Syntax(format!("expected PD[...], got {t:?}")))?;
    let mut crossings = vec![];
    let mut loops = 0;
    let mut rest = body;
    while !rest.is_empty() {
        let (head, tail) = if let Some(r) = rest.strip_prefix("X[") {
            (true, r)
        } else if let Some(r) = rest.strip_prefix("Loop[") {
            (false, r)
        } else {
            return Err(Error::Syntax(format!("unexpected token at {rest:?}")));
        };
        let close = tail.find(']').ok_or_else(|| Error::Syntax("unterminated entry".into()))?;
        let nums = tail[..close]
            .split(',')
            .map(|s| s.parse::<u32>().map_err(|_| Error::Syntax(format!("bad arc label {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if head {
            let x: [u32; 4] = nums.try_into().map_err(|_| Error::Syntax("crossing needs exactly four arcs".into()))?;
            crossings.push(x);
        } else {
            if nums.len() != 1 {
                return Err(Error::Syntax("Loop takes one label".into()));
            }
            loops += 1;
        }
        rest = &tail[close + 1..];
        rest = rest.strip_prefix(',').unwrap_or(rest);
    }
    PdCode::new(crossings, loops)
}

/// Direction of the surgery arc drawn at a crossing. `Standard` points from
/// the 0-smoothing strand through tuple positions 0,1 to the strand through
/// positions 2,3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arrow {
    Standard,
    Reversed,
}

impl Arrow {
    pub fn flipped(self) -> Arrow {
        match self {
            Arrow::Standard => Arrow::Reversed,
            Arrow::Reversed => Arrow::Standard,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OrientedDiagram {
    pd: PdCode,
    signs: Vec<i8>,
    arrows: Vec<Arrow>,
    arc_component: Vec<usize>,
    n_components: usize,
}

pub fn orient(pd: &PdCode, arrows: Option<Vec<Arrow>>) -> Result<OrientedDiagram> {
    let n = pd.num_crossings();
    let arrows = arrows.unwrap_or_else(|| vec![Arrow::Standard; n]);
    if arrows.len() != n {
        return Err(Error::InvalidArgument(format!("{} arrows for {} crossings", arrows.len(), n)));
    }
    let traced = trace(&pd.crossings, true)?;
    let signs = (0..n).map(|c| if traced.entering[slot(c, 3)] { 1 } else { -1 }).collect();
    let mut arc_component = traced.arc_component;
    for k in 0..pd.loops {
        arc_component.push(traced.n_components + k);
    }
    Ok(OrientedDiagram { pd: pd.clone(), signs, arrows, arc_component, n_components: traced.n_components + pd.loops })
}

impl OrientedDiagram {
    pub fn pd(&self) -> &PdCode {
        &self.pd
    }

    pub fn num_crossings(&self) -> usize {
        self.pd.num_crossings()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn n_plus(&self) -> usize {
        self.signs.iter().filter(|&&s| s > 0).count()
    }

    pub fn n_minus(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }

    pub fn writhe(&self) -> i32 {
        self.signs.iter().map(|&s| s as i32).sum()
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn with_arrows(&self, arrows: Vec<Arrow>) -> Result<OrientedDiagram> {
        if arrows.len() != self.num_crossings() {
            return Err(Error::InvalidArgument("arrow count mismatch".into()));
        }
        Ok(OrientedDiagram { arrows, ..self.clone() })
    }

    pub fn num_components(&self) -> usize {
        self.n_components
    }

    pub fn component_of_arc(&self, label: u32) -> Option<usize> {
        self.pd.is_arc(label).then(|| self.arc_component[label as usize - 1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResolutionLabel {
    pub crossing: usize,
    pub choice: u8,
}

/// One pass of a circle through a smoothed crossing, entering at tuple
/// position `from` and leaving at `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StrandVisit {
    pub crossing: usize,
    pub from: u8,
    pub to: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circle {
    /// Arc labels on the circle, ascending.
    pub arcs: Vec<u32>,
    /// Smoothed strands in traversal order.
    pub strands: Vec<StrandVisit>,
}

/// Where a surgery-arc endpoint sits on its circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArcEnd {
    pub circle: usize,
    /// Index into the circle's `strands`.
    pub position: usize,
    /// Whether the circle's traversal direction at this endpoint keeps the
    /// surgery arc on its left.
    pub aligned: bool,
}

/// The oriented core of the one-handle at a 0-smoothed crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurgeryArc {
    pub crossing: usize,
    pub tail: ArcEnd,
    pub head: ArcEnd,
}

impl SurgeryArc {
    pub fn is_split(&self) -> bool {
        self.tail.circle == self.head.circle
    }

    pub fn reversed(&self) -> SurgeryArc {
        SurgeryArc { crossing: self.crossing, tail: self.head, head: self.tail }
    }
}

#[derive(Clone, Debug)]
pub struct Resolution {
    pub vertex: u32,
    pub circles: Vec<Circle>,
    /// Circle index of each arc (index = label - 1).
    pub arc_circle: Vec<usize>,
    /// Surgery arc for every crossing resolved to 0.
    pub surgery_arcs: Vec<Option<SurgeryArc>>,
}

impl Resolution {
    pub fn num_circles(&self) -> usize {
        self.circles.len()
    }

    pub fn circle_of_arc(&self, label: u32) -> usize {
        self.arc_circle[label as usize - 1]
    }

    pub fn labels(&self) -> impl Iterator<Item = ResolutionLabel> + '_ {
        (0..self.surgery_arcs.len())
            .map(move |c| ResolutionLabel { crossing: c, choice: ((self.vertex >> c) & 1) as u8 })
    }
}

#[inline]
fn smoothing_partner(p: usize, choice: u32) -> usize {
    if choice == 0 {
        p ^ 1
    } else {
        3 - p
    }
}

pub fn resolve(d: &OrientedDiagram, vertex: u32) -> Resolution {
    let pd = &d.pd;
    let n = pd.num_crossings();
    debug_assert!(n >= 32 || vertex >> n == 0, "vertex has bits beyond the crossing count");
    let slots = arc_slots(&pd.crossings);
    let n_real = 2 * n;
    let mut arc_circle = vec![usize::MAX; pd.num_arcs()];
    let mut circles = vec![];
    // (circle, position) of each strand, keyed by the slot it is entered from
    let mut visit_at = vec![(usize::MAX, usize::MAX); 4 * n];

    for a0 in 0..n_real {
        if arc_circle[a0] != usize::MAX {
            continue;
        }
        let ci = circles.len();
        let start = slots[a0][0];
        let mut cur = start;
        let mut arcs = vec![];
        let mut strands = vec![];
        loop {
            let a = pd.crossings[cur / 4][cur % 4] as usize - 1;
            arc_circle[a] = ci;
            arcs.push(a as u32 + 1);
            let t = other_end(&slots, &pd.crossings, cur);
            let c = t / 4;
            let p = t % 4;
            let q = smoothing_partner(p, (vertex >> c) & 1);
            visit_at[t] = (ci, strands.len());
            visit_at[slot(c, q)] = (ci, strands.len());
            strands.push(StrandVisit { crossing: c, from: p as u8, to: q as u8 });
            cur = slot(c, q);
            if cur == start {
                break;
            }
        }
        arcs.sort_unstable();
        arcs.dedup();
        circles.push(Circle { arcs, strands });
    }
    for k in 0..pd.loops {
        arc_circle[n_real + k] = circles.len();
        circles.push(Circle { arcs: vec![(n_real + k + 1) as u32], strands: vec![] });
    }

    let surgery_arcs = (0..n)
        .map(|c| {
            if (vertex >> c) & 1 == 1 {
                return None;
            }
            // strand through positions 0,1 and strand through positions 2,3;
            // traversing either from its lower position keeps the arc on the left
            let end = |lo: usize| {
                let (circle, position) = visit_at[slot(c, lo)];
                let v = circles[circle].strands[position];
                ArcEnd { circle, position, aligned: v.from < v.to }
            };
            let (low, high) = (end(0), end(2));
            Some(match d.arrows[c] {
                Arrow::Standard => SurgeryArc { crossing: c, tail: low, head: high },
                Arrow::Reversed => SurgeryArc { crossing: c, tail: high, head: low },
            })
        })
        .collect();

    Resolution { vertex, circles, arc_circle, surgery_arcs }
}

pub fn all_resolutions(d: &OrientedDiagram, cap: usize) -> Result<Vec<Resolution>> {
    let n = d.num_crossings();
    if n > cap || n >= 32 {
        return Err(Error::ResourceLimit { crossings: n, cap });
    }
    let res: Vec<Resolution> = (0..1u32 << n).into_par_iter().map(|v| resolve(d, v)).collect();
    if let Some(r) = res.iter().find(|r| r.num_circles() > MAX_CIRCLES) {
        return Err(Error::ResourceLimit { crossings: r.num_circles(), cap: MAX_CIRCLES });
    }
    Ok(res)
}
