//! Exterior-algebra TQFT and the even Frobenius TQFT.
//!
//! A monomial `a_{i1} ∧ ... ∧ a_{ik}` with `i1 < ... < ik` is stored as the
//! bitmask with bits `i1..ik` set. The same masks index the even basis, where
//! a set bit means the circle is labelled `x`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub type Monomial = u32;

const NONE: u32 = u32::MAX;

#[inline]
pub fn degree(m: Monomial) -> u32 {
    m.count_ones()
}

/// q-grading of a monomial on `dim` circles.
#[inline]
pub fn q0_grading(dim: usize, m: Monomial) -> i32 {
    dim as i32 - 2 * degree(m) as i32
}

#[inline]
fn below(i: u32) -> u32 {
    if i >= 32 {
        u32::MAX
    } else {
        (1u32 << i) - 1
    }
}

/// `a_i ∧ m` as `(sign, monomial)`, or `None` when `a_i` already divides `m`.
#[inline]
pub fn wedge_generator(i: u32, m: Monomial) -> Option<(i64, Monomial)> {
    if m >> i & 1 == 1 {
        return None;
    }
    let sign = if (m & below(i)).count_ones().is_multiple_of(2) { 1 } else { -1 };
    Some((sign, m | 1 << i))
}

/// Interior product with the dual of `a_i`.
#[inline]
pub fn contract_generator(i: u32, m: Monomial) -> Option<(i64, Monomial)> {
    if m >> i & 1 == 0 {
        return None;
    }
    let sign = if (m & below(i)).count_ones().is_multiple_of(2) { 1 } else { -1 };
    Some((sign, m & !(1 << i)))
}

/// `m ∧ n` as `(sign, monomial)`.
pub fn wedge_monomials(m: Monomial, n: Monomial) -> Option<(i64, Monomial)> {
    if m & n != 0 {
        return None;
    }
    // each generator of n moves past the generators of m above it
    let mut swaps = 0;
    let mut rest = n;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (m >> j).count_ones();
        rest &= rest - 1;
    }
    Some((if swaps % 2 == 0 { 1 } else { -1 }, m | n))
}

/// Image of a monomial under the algebra map induced by `map` on generators
/// (`map[i]` is the image index of `a_i`). Zero when two generators collide.
pub fn relabel_monomial(map: &[u32], m: Monomial) -> Option<(i64, Monomial)> {
    let mut out = 0u32;
    let mut inversions = 0;
    let mut rest = m;
    while rest != 0 {
        let i = rest.trailing_zeros();
        rest &= rest - 1;
        let t = map[i as usize];
        debug_assert!(t != NONE);
        if out >> t & 1 == 1 {
            return None;
        }
        inversions += (out & !below(t + 1)).count_ones();
        out |= 1 << t;
    }
    Some((if inversions % 2 == 0 { 1 } else { -1 }, out))
}

/// Integer combination of exterior monomials on `dim` circles.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExteriorElement {
    pub dim: usize,
    terms: BTreeMap<Monomial, i64>,
}

impl ExteriorElement {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        Self::monomial(dim, 0, 1)
    }

    pub fn monomial(dim: usize, m: Monomial, coeff: i64) -> Self {
        let mut e = Self::zero(dim);
        e.add_term(m, coeff);
        e
    }

    pub fn generator(dim: usize, i: usize) -> Self {
        Self::monomial(dim, 1 << i, 1)
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Monomial, i64)>) -> Self {
        let mut e = Self::zero(dim);
        for (m, c) in terms {
            e.add_term(m, c);
        }
        e
    }

    pub fn add_term(&mut self, m: Monomial, c: i64) {
        debug_assert!(self.dim >= 32 || m >> self.dim == 0);
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, i64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn coeff(&self, m: Monomial) -> i64 {
        self.terms.get(&m).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c);
        }
        out
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::from_terms(self.dim, self.terms().map(|(m, c)| (m, c * k)))
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim.max(other.dim));
        for (m, c) in self.terms() {
            for (n, d) in other.terms() {
                if let Some((s, mn)) = wedge_monomials(m, n) {
                    out.add_term(mn, s * c * d);
                }
            }
        }
        out
    }

    pub fn contract(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in self.terms() {
            if let Some((s, r)) = contract_generator(i as u32, m) {
                out.add_term(r, s * c);
            }
        }
        out
    }

    /// Reduction mod 2, as the set of monomials with odd coefficient.
    pub fn mod2(&self) -> Vec<Monomial> {
        self.terms().filter(|&(_, c)| c % 2 != 0).map(|(m, _)| m).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CobordismKind {
    /// Source circles `a1`, `a2` become one target circle.
    Merge { a1: u32, a2: u32 },
    /// Source circle `a` becomes target circles `a1`, `a2`; the arrow runs
    /// from `a1` to `a2`.
    Split { a: u32, a1: u32, a2: u32 },
    /// Target circle `born` is new.
    Birth { born: u32 },
    /// Source circle `a` is capped off.
    Death { a: u32 },
}

/// Elementary cobordism between two circle sets, with the identification of
/// bystander circles. `relabel[i]` is the target circle of source circle `i`
/// (for a split, `a` goes to `a1`; for a death, `a` has no image).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cobordism {
    pub kind: CobordismKind,
    pub relabel: Vec<u32>,
    pub target_dim: usize,
}

/// Up to two terms; every elementary map sends a monomial to at most two.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Image {
    terms: [(Monomial, i64); 2],
    len: u8,
}

impl Image {
    fn push(&mut self, m: Monomial, c: i64) {
        self.terms[self.len as usize] = (m, c);
        self.len += 1;
    }

    pub fn as_slice(&self) -> &[(Monomial, i64)] {
        &self.terms[..self.len as usize]
    }
}

impl Cobordism {
    pub fn source_dim(&self) -> usize {
        self.relabel.len()
    }

    fn check_source(&self, v: &ExteriorElement) -> Result<()> {
        if v.dim != self.source_dim() {
            return Err(Error::InvalidArgument(format!(
                "element on {} circles, cobordism source has {}",
                v.dim,
                self.source_dim()
            )));
        }
        Ok(())
    }

    pub fn merge(source_dim: usize, a1: u32, a2: u32, relabel: Vec<u32>) -> Result<Self> {
        let ok = a1 != a2
            && (a1 as usize) < source_dim
            && (a2 as usize) < source_dim
            && relabel.len() == source_dim
            && relabel[a1 as usize] == relabel[a2 as usize];
        if !ok {
            return Err(Error::InvalidArgument("inconsistent merge data".into()));
        }
        Ok(Self { kind: CobordismKind::Merge { a1, a2 }, relabel, target_dim: source_dim - 1 })
    }

    pub fn split(source_dim: usize, a: u32, a1: u32, a2: u32, mut relabel: Vec<u32>) -> Result<Self> {
        let ok = (a as usize) < source_dim
            && a1 != a2
            && (a1 as usize) <= source_dim
            && (a2 as usize) <= source_dim
            && relabel.len() == source_dim
            && relabel.iter().enumerate().all(|(i, &t)| i == a as usize || (t != a1 && t != a2));
        if !ok {
            return Err(Error::InvalidArgument("inconsistent split data".into()));
        }
        relabel[a as usize] = a1;
        Ok(Self { kind: CobordismKind::Split { a, a1, a2 }, relabel, target_dim: source_dim + 1 })
    }

    pub fn birth(source_dim: usize, born: u32) -> Self {
        let relabel = (0..source_dim as u32).map(|i| if i >= born { i + 1 } else { i }).collect();
        Self { kind: CobordismKind::Birth { born }, relabel, target_dim: source_dim + 1 }
    }

    pub fn death(source_dim: usize, a: u32) -> Self {
        let relabel = (0..source_dim as u32)
            .map(|i| match i.cmp(&a) {
                std::cmp::Ordering::Less => i,
                std::cmp::Ordering::Equal => NONE,
                std::cmp::Ordering::Greater => i - 1,
            })
            .collect();
        Self { kind: CobordismKind::Death { a }, relabel, target_dim: source_dim - 1 }
    }

    /// Odd (exterior) image of one monomial.
    pub fn apply_monomial(&self, m: Monomial) -> Image {
        let mut out = Image::default();
        match self.kind {
            CobordismKind::Merge { .. } | CobordismKind::Birth { .. } => {
                if let Some((s, r)) = relabel_monomial(&self.relabel, m) {
                    out.push(r, s);
                }
            }
            CobordismKind::Split { a1, a2, .. } => {
                if let Some((s, lift)) = relabel_monomial(&self.relabel, m) {
                    if let Some((s1, r)) = wedge_generator(a1, lift) {
                        out.push(r, s * s1);
                    }
                    if let Some((s2, r)) = wedge_generator(a2, lift) {
                        out.push(r, -s * s2);
                    }
                }
            }
            CobordismKind::Death { a } => {
                if let Some((s, r)) = contract_generator(a, m) {
                    if let Some((t, r)) = relabel_monomial(&self.relabel, r) {
                        out.push(r, s * t);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &ExteriorElement) -> Result<ExteriorElement> {
        self.check_source(v)?;
        let mut out = ExteriorElement::zero(self.target_dim);
        for (m, c) in v.terms() {
            for &(r, s) in self.apply_monomial(m).as_slice() {
                out.add_term(r, s * c);
            }
        }
        Ok(out)
    }

    /// Even (Frobenius) image of one basis element; all coefficients are +1.
    pub fn apply_even_monomial(&self, m: Monomial) -> Image {
        let mut out = Image::default();
        let relabel = |m: Monomial| -> Monomial {
            let mut r = 0;
            let mut rest = m;
            while rest != 0 {
                let i = rest.trailing_zeros();
                rest &= rest - 1;
                r |= 1 << self.relabel[i as usize];
            }
            r
        };
        match self.kind {
            CobordismKind::Merge { a1, a2 } => {
                if m >> a1 & 1 == 0 || m >> a2 & 1 == 0 {
                    out.push(relabel(m), 1);
                }
            }
            CobordismKind::Split { a, a1, a2 } => {
                let lift = relabel(m & !(1 << a));
                if m >> a & 1 == 1 {
                    out.push(lift | 1 << a1 | 1 << a2, 1);
                } else {
                    out.push(lift | 1 << a2, 1);
                    out.push(lift | 1 << a1, 1);
                }
            }
            CobordismKind::Birth { .. } => out.push(relabel(m), 1),
            CobordismKind::Death { a } => {
                if m >> a & 1 == 1 {
                    out.push(relabel(m & !(1 << a)), 1);
                }
            }
        }
        out
    }

    pub fn apply_even(&self, v: &EvenElement) -> Result<EvenElement> {
        if v.dim != self.source_dim() {
            return Err(Error::InvalidArgument("even element on the wrong circle set".into()));
        }
        let mut out = EvenElement::zero(self.target_dim);
        for (m, c) in v.terms() {
            for &(r, s) in self.apply_even_monomial(m).as_slice() {
                out.add_term(r, s * c);
            }
        }
        Ok(out)
    }
}

pub fn merge_map(v: &ExteriorElement, cob: &Cobordism) -> Result<ExteriorElement> {
    match cob.kind {
        CobordismKind::Merge { .. } => cob.apply(v),
        _ => Err(Error::InvalidArgument("not a merge".into())),
    }
}

pub fn split_map(v: &ExteriorElement, cob: &Cobordism) -> Result<ExteriorElement> {
    match cob.kind {
        CobordismKind::Split { .. } => cob.apply(v),
        _ => Err(Error::InvalidArgument("not a split".into())),
    }
}

pub fn birth_map(v: &ExteriorElement, cob: &Cobordism) -> Result<ExteriorElement> {
    match cob.kind {
        CobordismKind::Birth { .. } => cob.apply(v),
        _ => Err(Error::InvalidArgument("not a birth".into())),
    }
}

pub fn death_map(v: &ExteriorElement, cob: &Cobordism) -> Result<ExteriorElement> {
    match cob.kind {
        CobordismKind::Death { .. } => cob.apply(v),
        _ => Err(Error::InvalidArgument("not a death".into())),
    }
}

/// Element of the even TQFT: tensor products of `1` and `x` per circle,
/// keyed by the set of circles labelled `x`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvenElement {
    pub dim: usize,
    terms: BTreeMap<Monomial, i64>,
}

impl EvenElement {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn basis(dim: usize, xs: Monomial) -> Self {
        let mut e = Self::zero(dim);
        e.add_term(xs, 1);
        e
    }

    pub fn add_term(&mut self, m: Monomial, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, i64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(#circles labelled 1) − (#circles labelled x)`.
    pub fn q0_grading(dim: usize, xs: Monomial) -> i32 {
        q0_grading(dim, xs)
    }

    pub fn mod2(&self) -> Vec<Monomial> {
        self.terms().filter(|&(_, c)| c % 2 != 0).map(|(m, _)| m).collect()
    }
}
