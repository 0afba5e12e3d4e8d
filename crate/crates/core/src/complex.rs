//! Bigraded chain complexes over the integers.
//!
//! Generators are pairs `(vertex, monomial)`. The homological grading is
//! `m = |I| − n₋` and the quantum grading `s = #circles − 2·deg + n₊ − 2n₋ + |I|`,
//! plus a flavor-dependent shift for reduced complexes. The differential
//! raises `m` by one and preserves `s`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::{wedge_generator, ExteriorElement, Monomial};
use crate::cube::Cube;
use crate::error::{Error, Result};
use crate::linkdiag::OrientedDiagram;
use crate::signs::{assignment_for, verify_assignment, AssignmentType, EdgeAssignment};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Bidegree {
    pub m: i32,
    pub s: i32,
}

impl Bidegree {
    pub fn new(m: i32, s: i32) -> Self {
        Self { m, s }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub vertex: u32,
    pub mono: Monomial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Odd,
    Even,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    Unreduced,
    /// Monomials containing the circle through the given arc.
    Basepoint(u32),
    /// The subalgebra generated by differences of circles.
    Kernel,
}

/// Column-major sparse integer matrix; column `j` is the image of source
/// generator `j`, with entries sorted by row.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub columns: Vec<Vec<(u32, i64)>>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, columns: vec![vec![]; cols] }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.columns[j].push((i as u32, v));
                }
            }
        }
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0; self.cols]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                out[i as usize][j] = v;
            }
        }
        out
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.columns.iter().enumerate().flat_map(|(j, col)| col.iter().map(move |&(i, v)| (i as usize, j, v)))
    }

    /// `self · rhs`, with checked arithmetic.
    pub fn mul(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::InvalidArgument("matrix shapes do not compose".into()));
        }
        let columns = rhs
            .columns
            .par_iter()
            .map(|col| {
                let mut acc: BTreeMap<u32, i64> = BTreeMap::new();
                for &(k, b) in col {
                    for &(i, a) in &self.columns[k as usize] {
                        let e = acc.entry(i).or_insert(0);
                        *e = a
                            .checked_mul(b)
                            .and_then(|p| e.checked_add(p))
                            .ok_or_else(|| Error::Overflow("sparse product".into()))?;
                    }
                }
                Ok(acc.into_iter().filter(|&(_, v)| v != 0).collect())
            })
            .collect::<Result<_>>()?;
        Ok(SparseMatrix { rows: self.rows, cols: rhs.cols, columns })
    }

    /// Keeps the listed rows and columns, renumbered in order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut row_map = vec![u32::MAX; self.rows];
        for (new, &old) in rows.iter().enumerate() {
            row_map[old] = new as u32;
        }
        let columns = cols
            .iter()
            .map(|&j| {
                self.columns[j]
                    .iter()
                    .filter_map(|&(i, v)| {
                        let r = row_map[i as usize];
                        (r != u32::MAX).then_some((r, v))
                    })
                    .collect()
            })
            .collect();
        SparseMatrix { rows: rows.len(), cols: cols.len(), columns }
    }
}

#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub flavor: Flavor,
    pub reduction: Reduction,
    blocks: BTreeMap<Bidegree, Vec<Generator>>,
    /// Differential out of each block, to the block at `m + 1`.
    diffs: BTreeMap<Bidegree, SparseMatrix>,
}

/// A diagram together with its cube and an edge assignment.
#[derive(Clone, Debug)]
pub struct Setup {
    pub diagram: OrientedDiagram,
    pub cube: Cube,
    pub assignment: EdgeAssignment,
}

impl Setup {
    pub fn new(diagram: OrientedDiagram, t: AssignmentType, cap: usize) -> Result<Setup> {
        let cube = Cube::new(&diagram, cap)?;
        let assignment = assignment_for(&cube, t)?;
        Ok(Setup { diagram, cube, assignment })
    }

    pub fn with_assignment(diagram: OrientedDiagram, cube: Cube, assignment: EdgeAssignment) -> Result<Setup> {
        if let Err(v) = verify_assignment(&cube, &assignment) {
            return Err(Error::NotCocycle(format!(
                "assignment fails at face {} (vertex {:#b}, crossings {:?})",
                v.face, v.corner00, v.crossings
            )));
        }
        Ok(Setup { diagram, cube, assignment })
    }

    fn check_arc(&self, p: u32) -> Result<()> {
        if self.diagram.pd().is_arc(p) {
            Ok(())
        } else {
            Err(Error::InvalidArc(p))
        }
    }

    fn grading(&self, v: u32, dim: usize, deg: u32, shift: i32) -> Bidegree {
        let np = self.diagram.n_plus() as i32;
        let nm = self.diagram.n_minus() as i32;
        let i = v.count_ones() as i32;
        Bidegree { m: i - nm, s: dim as i32 - 2 * deg as i32 + np - 2 * nm + i + shift }
    }
}

type Images = Vec<(Monomial, i64)>;

struct Assembly<'a, B, I> {
    setup: &'a Setup,
    basis: B,
    image: I,
    sign: &'a (dyn Fn(usize) -> i64 + Sync),
    shift: i32,
}

impl<'a, B, I> Assembly<'a, B, I>
where
    B: Fn(u32) -> Vec<Monomial> + Sync,
    I: Fn(usize, Monomial) -> Images + Sync,
{
    fn run(self, flavor: Flavor, reduction: Reduction) -> Result<ChainComplex> {
        let cube = &self.setup.cube;
        let n = cube.num_crossings();
        let bases: Vec<Vec<Monomial>> = (0..1u32 << n).into_par_iter().map(&self.basis).collect();
        let mut blocks: BTreeMap<Bidegree, Vec<Generator>> = BTreeMap::new();
        let mut local: Vec<Vec<u32>> = Vec::with_capacity(bases.len());
        for (v, basis) in bases.iter().enumerate() {
            let dim = cube.resolution(v as u32).num_circles();
            let mut idx = vec![u32::MAX; 1 << dim];
            for &mono in basis {
                let g = self.setup.grading(v as u32, dim, mono.count_ones(), self.shift);
                let block = blocks.entry(g).or_default();
                idx[mono as usize] = block.len() as u32;
                block.push(Generator { vertex: v as u32, mono });
            }
            local.push(idx);
        }
        let keys: Vec<Bidegree> = blocks.keys().copied().collect();
        let diffs: BTreeMap<Bidegree, SparseMatrix> = keys
            .par_iter()
            .map(|&g| {
                let target = Bidegree { m: g.m + 1, s: g.s };
                let rows = blocks.get(&target).map_or(0, |b| b.len());
                let gens = &blocks[&g];
                let mut columns = Vec::with_capacity(gens.len());
                for gen in gens {
                    let mut col: Vec<(u32, i64)> = vec![];
                    for c in (0..n).filter(|&c| gen.vertex >> c & 1 == 0) {
                        let e = cube.edge_id(gen.vertex, c).expect("edge exists");
                        let w = gen.vertex | 1 << c;
                        let sign = (self.sign)(e);
                        for (mono, coeff) in (self.image)(e, gen.mono) {
                            let row = local[w as usize][mono as usize];
                            if row == u32::MAX {
                                return Err(Error::InvalidArgument(format!(
                                    "image of generator ({:#b}, {:#b}) leaves the complex",
                                    gen.vertex, gen.mono
                                )));
                            }
                            col.push((row, sign * coeff));
                        }
                    }
                    col.sort_unstable_by_key(|&(r, _)| r);
                    let mut merged: Vec<(u32, i64)> = Vec::with_capacity(col.len());
                    for (r, v) in col {
                        match merged.last_mut() {
                            Some(last) if last.0 == r => last.1 += v,
                            _ => merged.push((r, v)),
                        }
                    }
                    merged.retain(|&(_, v)| v != 0);
                    columns.push(merged);
                }
                Ok((g, SparseMatrix { rows, cols: gens.len(), columns }))
            })
            .collect::<Result<_>>()?;
        let c = ChainComplex { flavor, reduction, blocks, diffs };
        if cfg!(debug_assertions) {
            c.check_d_squared()?;
        }
        Ok(c)
    }
}

fn odd_sign(setup: &Setup) -> impl Fn(usize) -> i64 + Sync + '_ {
    move |e| setup.assignment.values[e] as i64
}

/// The standard even sign: `(−1)` to the number of 1s before the changing
/// crossing.
pub fn even_sign(v: u32, c: usize) -> i64 {
    if (v & ((1u32 << c) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn all_monomials(setup: &Setup) -> impl Fn(u32) -> Vec<Monomial> + Sync + '_ {
    move |v| (0..1u32 << setup.cube.resolution(v).num_circles()).collect()
}

pub fn assemble(setup: &Setup) -> Result<ChainComplex> {
    let cube = &setup.cube;
    Assembly {
        setup,
        basis: all_monomials(setup),
        image: |e: usize, m| cube.edges()[e].cobordism.apply_monomial(m).as_slice().to_vec(),
        sign: &odd_sign(setup),
        shift: 0,
    }
    .run(Flavor::Odd, Reduction::Unreduced)
}

/// Subcomplex of monomials containing the circle through arc `p`, with the
/// quantum grading raised by one.
pub fn reduce_basepoint(c: &ChainComplex, setup: &Setup, p: u32) -> Result<ChainComplex> {
    setup.check_arc(p)?;
    let cube = &setup.cube;
    let keep = |g: &Generator| g.mono >> cube.resolution(g.vertex).circle_of_arc(p) & 1 == 1;
    let mut out = c.restrict(keep, 1);
    out.reduction = Reduction::Basepoint(p);
    Ok(out)
}

/// Subcomplex on the subalgebra generated by the differences `a_i − a_0`,
/// written in the basis `∧_{i∈T} (a_i − a_0)`, `T ⊆ {1, ..}`, with the
/// quantum grading lowered by one.
///
/// An element of the subalgebra is determined by its coefficients on
/// monomials avoiding `a_0`, and the basis element for `T` has coefficient 1
/// on `a_T` and 0 on every other such monomial, so those coefficients are
/// the coordinates.
pub fn reduce_kernel(setup: &Setup) -> Result<ChainComplex> {
    let cube = &setup.cube;
    Assembly {
        setup,
        basis: |v: u32| (0..1u32 << cube.resolution(v).num_circles()).filter(|m| m & 1 == 0).collect(),
        image: |e: usize, t: Monomial| {
            let cob = &cube.edges()[e].cobordism;
            let mut out = ExteriorElement::zero(cob.target_dim);
            for (m, c) in difference_monomial(cob.source_dim(), t).terms() {
                for &(r, d) in cob.apply_monomial(m).as_slice() {
                    out.add_term(r, c * d);
                }
            }
            out.terms().filter(|&(m, _)| m & 1 == 0).collect()
        },
        sign: &odd_sign(setup),
        shift: -1,
    }
    .run(Flavor::Odd, Reduction::Kernel)
}

/// `∧_{i ∈ T} (a_i − a_0)` in ascending order of `i`.
pub fn difference_monomial(dim: usize, t: Monomial) -> ExteriorElement {
    let mut out = ExteriorElement::one(dim);
    let mut rest = t;
    while rest != 0 {
        let i = rest.trailing_zeros();
        rest &= rest - 1;
        let mut next = ExteriorElement::zero(dim);
        for (m, c) in out.terms() {
            // right multiplication: m ∧ a_i = (−1)^{deg m} a_i ∧ m
            let flip = if m.count_ones() % 2 == 0 { 1 } else { -1 };
            for (g, k) in [(i, 1), (0, -1)] {
                if let Some((s, r)) = wedge_generator(g, m) {
                    next.add_term(r, flip * s * k * c);
                }
            }
        }
        out = next;
    }
    out
}

pub fn assemble_even(setup: &Setup) -> Result<ChainComplex> {
    let cube = &setup.cube;
    let sign = |e: usize| {
        let edge = &cube.edges()[e];
        even_sign(edge.from, edge.crossing)
    };
    Assembly {
        setup,
        basis: all_monomials(setup),
        image: |e: usize, m| cube.edges()[e].cobordism.apply_even_monomial(m).as_slice().to_vec(),
        sign: &sign,
        shift: 0,
    }
    .run(Flavor::Even, Reduction::Unreduced)
}

/// Even subcomplex where the circle through `p` is labelled `x`.
pub fn reduce_even(c: &ChainComplex, setup: &Setup, p: u32) -> Result<ChainComplex> {
    if c.flavor != Flavor::Even {
        return Err(Error::InvalidArgument("reduce_even needs the even complex".into()));
    }
    reduce_basepoint(c, setup, p)
}

/// Mapping-cone pieces at crossing `x`: the subcomplex where `I(x) = 1`, the
/// quotient where `I(x) = 0`, and the component of the differential between
/// them (keyed by its source bidegree in the quotient).
#[derive(Clone, Debug)]
pub struct SkeinDecomposition {
    pub sub: ChainComplex,
    pub quotient: ChainComplex,
    pub connecting: BTreeMap<Bidegree, SparseMatrix>,
}

pub fn skein_decompose(c: &ChainComplex, x: usize) -> SkeinDecomposition {
    let sub = c.restrict(|g| g.vertex >> x & 1 == 1, 0);
    let quotient = c.restrict(|g| g.vertex >> x & 1 == 0, 0);
    let mut connecting = BTreeMap::new();
    for (&g, d) in &c.diffs {
        let src: Vec<usize> =
            c.blocks[&g].iter().enumerate().filter(|(_, gen)| gen.vertex >> x & 1 == 0).map(|(i, _)| i).collect();
        let target = Bidegree { m: g.m + 1, s: g.s };
        let dst: Vec<usize> = c.blocks.get(&target).map_or(vec![], |b| {
            b.iter().enumerate().filter(|(_, gen)| gen.vertex >> x & 1 == 1).map(|(i, _)| i).collect()
        });
        if !src.is_empty() {
            connecting.insert(g, d.submatrix(&dst, &src));
        }
    }
    SkeinDecomposition { sub, quotient, connecting }
}

impl ChainComplex {
    pub fn bidegrees(&self) -> impl Iterator<Item = Bidegree> + '_ {
        self.blocks.keys().copied()
    }

    pub fn q_degrees(&self) -> Vec<i32> {
        let mut qs: Vec<i32> = self.blocks.keys().map(|g| g.s).collect();
        qs.sort_unstable();
        qs.dedup();
        qs
    }

    pub fn block(&self, g: Bidegree) -> &[Generator] {
        self.blocks.get(&g).map_or(&[], |b| b.as_slice())
    }

    pub fn rank(&self, g: Bidegree) -> usize {
        self.block(g).len()
    }

    pub fn total_rank(&self) -> usize {
        self.blocks.values().map(|b| b.len()).sum()
    }

    /// Differential out of `g`; a zero matrix when absent.
    pub fn differential(&self, g: Bidegree) -> SparseMatrix {
        self.diffs
            .get(&g)
            .cloned()
            .unwrap_or_else(|| SparseMatrix::zero(self.rank(Bidegree { m: g.m + 1, s: g.s }), self.rank(g)))
    }

    pub fn differential_ref(&self, g: Bidegree) -> Option<&SparseMatrix> {
        self.diffs.get(&g)
    }

    /// Homological degrees present in quantum degree `s`, ascending.
    pub fn m_range(&self, s: i32) -> Vec<i32> {
        self.blocks.keys().filter(|g| g.s == s).map(|g| g.m).collect()
    }

    /// Subcomplex or quotient spanned by the generators satisfying `keep`,
    /// with the quantum grading shifted by `shift`.
    pub fn restrict(&self, keep: impl Fn(&Generator) -> bool + Sync, shift: i32) -> ChainComplex {
        let kept: BTreeMap<Bidegree, Vec<usize>> = self
            .blocks
            .iter()
            .map(|(&g, b)| (g, b.iter().enumerate().filter(|(_, x)| keep(x)).map(|(i, _)| i).collect()))
            .collect();
        let shifted = |g: Bidegree| Bidegree { m: g.m, s: g.s + shift };
        let blocks = kept
            .iter()
            .filter(|(_, idx)| !idx.is_empty())
            .map(|(&g, idx)| (shifted(g), idx.iter().map(|&i| self.blocks[&g][i]).collect()))
            .collect();
        let empty = vec![];
        let diffs = self
            .diffs
            .iter()
            .filter(|(g, _)| !kept[g].is_empty())
            .map(|(&g, d)| {
                let rows = kept.get(&Bidegree { m: g.m + 1, s: g.s }).unwrap_or(&empty);
                (shifted(g), d.submatrix(rows, &kept[&g]))
            })
            .collect();
        ChainComplex { flavor: self.flavor, reduction: self.reduction, blocks, diffs }
    }

    /// Checks `d ∘ d = 0` on every block.
    pub fn check_d_squared(&self) -> Result<()> {
        self.diffs.par_iter().try_for_each(|(&g, d)| {
            let next = Bidegree { m: g.m + 1, s: g.s };
            if let Some(d2) = self.diffs.get(&next) {
                if !d2.mul(d)?.is_zero() {
                    return Err(Error::NonzeroSquare { m: g.m, s: g.s });
                }
            }
            Ok(())
        })
    }

    /// Σ (−1)^m rank · q^s, as `s → coefficient`.
    pub fn euler_characteristic(&self) -> BTreeMap<i32, i64> {
        let mut out = BTreeMap::new();
        for (g, b) in &self.blocks {
            let sign = if g.m.rem_euclid(2) == 0 { 1 } else { -1 };
            *out.entry(g.s).or_insert(0) += sign * b.len() as i64;
        }
        out.retain(|_, v| *v != 0);
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let blocks: Vec<_> = self
            .blocks
            .iter()
            .map(|(g, b)| {
                let gens: Vec<_> = b.iter().map(|x| [x.vertex, x.mono]).collect();
                json!({"m": g.m, "s": g.s, "rank": b.len(), "generators": gens})
            })
            .collect();
        let diffs: Vec<_> = self
            .diffs
            .iter()
            .filter(|(_, d)| d.rows > 0 && d.cols > 0)
            .map(|(g, d)| {
                let entries: Vec<_> = d.entries().map(|(i, j, v)| json!([i, j, v])).collect();
                json!({"m": g.m, "s": g.s, "rows": d.rows, "cols": d.cols, "entries": entries})
            })
            .collect();
        json!({
            "flavor": self.flavor,
            "reduction": self.reduction,
            "blocks": blocks,
            "differentials": diffs,
        })
    }
}
