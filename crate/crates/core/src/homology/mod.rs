//! Bigraded homology of integral chain complexes.

pub mod jones;
pub mod poly;
pub mod snf;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{Bidegree, ChainComplex};
use crate::error::{Error, Result};
pub use jones::{jones_normalized, jones_state_sum};
pub use poly::{LaurentPoly, Poly2};
pub use snf::{rank_mod_p, smith, Smith};

/// A finitely generated abelian group `Z^rank ⊕ ⊕ Z/d`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Group {
    pub rank: usize,
    /// Invariant factors, each dividing the next.
    pub torsion: Vec<u64>,
}

impl Group {
    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Number of cyclic summands whose order is divisible by `p`.
    pub fn p_torsion(&self, p: u64) -> usize {
        self.torsion.iter().filter(|&&d| d % p == 0).count()
    }

    /// Brings any list of cyclic orders into invariant-factor form.
    pub fn normalized(rank: usize, mut torsion: Vec<u64>) -> Group {
        torsion.retain(|&d| d != 1);
        for i in 0..torsion.len() {
            for j in i + 1..torsion.len() {
                let (a, b) = (torsion[i], torsion[j]);
                torsion[i] = a.gcd(&b);
                torsion[j] = a.lcm(&b);
            }
        }
        torsion.retain(|&d| d != 1);
        torsion.sort_unstable();
        Group { rank, torsion }
    }

    pub fn direct_sum(&self, o: &Group) -> Group {
        let torsion = self.torsion.iter().chain(&o.torsion).copied().collect();
        Group::normalized(self.rank + o.rank, torsion)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![];
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BigradedGroup {
    groups: BTreeMap<Bidegree, Group>,
}

impl BigradedGroup {
    pub fn from_groups(groups: impl IntoIterator<Item = (Bidegree, Group)>) -> Self {
        let groups = groups.into_iter().filter(|(_, g)| !g.is_zero()).collect();
        BigradedGroup { groups }
    }

    pub fn get(&self, g: Bidegree) -> Group {
        self.groups.get(&g).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Bidegree, &Group)> + '_ {
        self.groups.iter().map(|(&g, h)| (g, h))
    }

    pub fn support(&self) -> impl Iterator<Item = Bidegree> + '_ {
        self.groups.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn total_rank(&self) -> usize {
        self.groups.values().map(|g| g.rank).sum()
    }

    pub fn has_torsion(&self) -> bool {
        self.groups.values().any(|g| !g.torsion.is_empty())
    }

    /// Free ranks, i.e. dimensions over Q.
    pub fn poincare(&self) -> Poly2 {
        Poly2::from_terms(self.iter().map(|(g, h)| (g, h.rank as i64)))
    }

    /// Dimensions over GF(p) by universal coefficients: free rank, plus
    /// p-torsion in this degree and one homological degree up.
    pub fn poincare_mod_p(&self, p: u64) -> Poly2 {
        let mut out = Poly2::zero();
        for (g, h) in self.iter() {
            out.add_term(g, (h.rank + h.p_torsion(p)) as i64);
            out.add_term(Bidegree::new(g.m - 1, g.s), h.p_torsion(p) as i64);
        }
        out
    }

    pub fn shift_q(&self, k: i32) -> Self {
        Self::from_groups(self.iter().map(|(g, h)| (Bidegree::new(g.m, g.s + k), h.clone())))
    }

    pub fn direct_sum(&self, o: &Self) -> Self {
        let mut groups = self.groups.clone();
        for (g, h) in o.iter() {
            let sum = groups.get(&g).map_or_else(|| h.clone(), |x| x.direct_sum(h));
            groups.insert(g, sum);
        }
        BigradedGroup { groups }
    }

    /// Reads the knot-table notation, e.g. `q+q^(3)+t^(3)*q^(7)*T^(2)`,
    /// where a `T^(d)` factor marks a `Z/d` summand.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut ranks: BTreeMap<Bidegree, usize> = BTreeMap::new();
        let mut torsion: BTreeMap<Bidegree, Vec<u64>> = BTreeMap::new();
        for term in poly::parse_terms(text)? {
            if term.coeff < 0 || term.exps.keys().any(|&v| v != 'q' && v != 't') {
                return Err(Error::Syntax(format!("not a homology polynomial: {text:?}")));
            }
            let g = Bidegree::new(*term.exps.get(&'t').unwrap_or(&0), *term.exps.get(&'q').unwrap_or(&0));
            match term.torsion {
                Some(d) => torsion.entry(g).or_default().extend(std::iter::repeat_n(d, term.coeff as usize)),
                None => *ranks.entry(g).or_default() += term.coeff as usize,
            }
        }
        let keys: BTreeSet<Bidegree> = ranks.keys().chain(torsion.keys()).copied().collect();
        Ok(Self::from_groups(keys.into_iter().map(|g| {
            let r = ranks.get(&g).copied().unwrap_or(0);
            (g, Group::normalized(r, torsion.remove(&g).unwrap_or_default()))
        })))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.iter()
                .map(|(g, h)| serde_json::json!({"m": g.m, "s": g.s, "rank": h.rank, "torsion": h.torsion}))
                .collect(),
        )
    }
}

impl fmt::Display for BigradedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return writeln!(f, "0");
        }
        for (g, h) in self.iter() {
            writeln!(f, "m={:<3} s={:<4} {h}", g.m, g.s)?;
        }
        Ok(())
    }
}

/// Coefficient ring for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coeffs {
    Z,
    Q,
    Fp(u64),
}

impl fmt::Display for Coeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeffs::Z => write!(f, "Z"),
            Coeffs::Q => write!(f, "Q"),
            Coeffs::Fp(p) => write!(f, "F{p}"),
        }
    }
}

impl std::str::FromStr for Coeffs {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Z" | "z" => Ok(Coeffs::Z),
            "Q" | "q" => Ok(Coeffs::Q),
            _ => {
                let p: u64 = s
                    .trim_start_matches(['F', 'f'])
                    .parse()
                    .map_err(|_| Error::Syntax(format!("unknown coefficients {s:?}")))?;
                if p < 2 || (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
                    return Err(Error::InvalidArgument(format!("{p} is not prime")));
                }
                Ok(Coeffs::Fp(p))
            }
        }
    }
}

fn all_bidegrees(c: &ChainComplex) -> Vec<Bidegree> {
    c.bidegrees().collect()
}

/// Integral homology, block by block: `H^m = ker d_m / im d_{m−1}`.
pub fn smith_homology(c: &ChainComplex) -> Result<BigradedGroup> {
    let keys = all_bidegrees(c);
    let snf: BTreeMap<Bidegree, Smith> = keys
        .par_iter()
        .map(|&g| Ok((g, c.differential_ref(g).map(smith).transpose()?.unwrap_or_default())))
        .collect::<Result<_>>()?;
    Ok(BigradedGroup::from_groups(keys.iter().map(|&g| {
        let out = snf[&g].rank;
        let incoming = snf.get(&Bidegree::new(g.m - 1, g.s));
        let rank = c.rank(g) - out - incoming.map_or(0, |s| s.rank);
        (g, Group { rank, torsion: incoming.map_or_else(Vec::new, |s| s.torsion.clone()) })
    })))
}

/// Dimensions of homology over GF(p), or over Q when `p == 0`.
pub fn field_homology(c: &ChainComplex, p: u64) -> Result<Poly2> {
    let keys = all_bidegrees(c);
    let ranks: BTreeMap<Bidegree, usize> = keys
        .par_iter()
        .map(|&g| {
            let r = match c.differential_ref(g) {
                None => 0,
                Some(d) if p == 0 => smith(d)?.rank,
                Some(d) => rank_mod_p(d, p),
            };
            Ok((g, r))
        })
        .collect::<Result<_>>()?;
    Ok(Poly2::from_terms(keys.iter().map(|&g| {
        let incoming = ranks.get(&Bidegree::new(g.m - 1, g.s)).copied().unwrap_or(0);
        (g, (c.rank(g) - ranks[&g] - incoming) as i64)
    })))
}

/// `Σ (−1)^m rank · q^s`.
pub fn euler_characteristic(g: &BigradedGroup) -> LaurentPoly {
    g.poincare().euler()
}

/// Diagonal data of a reduced Poincaré polynomial, diagonals being `s − 2m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Thinness {
    /// `None` when no signature was supplied.
    pub thin: Option<bool>,
    pub off_diagonal: Vec<Bidegree>,
    pub diagonals: BTreeSet<i32>,
}

pub fn thinness(dims: &Poly2, sigma: Option<i32>) -> Thinness {
    let diagonals = dims.support().map(|g| g.s - 2 * g.m).collect();
    let off_diagonal: Vec<Bidegree> = match sigma {
        Some(d) => dims.support().filter(|g| g.s - 2 * g.m != d).collect(),
        None => vec![],
    };
    Thinness { thin: sigma.map(|_| off_diagonal.is_empty()), off_diagonal, diagonals }
}
