//! From a PD code to homology groups, as driven by the command line.

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::complex::{assemble, reduce_basepoint, ChainComplex, Flavor, Setup};
use crate::error::{Error, Result};
use crate::evenkh::{assemble_even, reduce_even};
use crate::homology::{field_homology, smith_homology, BigradedGroup, Coeffs, Group, Poly2};
use crate::linkdiag::{orient, Arrow, PdCode, DEFAULT_CROSSING_CAP};
use crate::signs::AssignmentType;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlavorChoice {
    Odd,
    Even,
    Both,
}

impl FlavorChoice {
    pub fn flavors(self) -> Vec<Flavor> {
        match self {
            FlavorChoice::Odd => vec![Flavor::Odd],
            FlavorChoice::Even => vec![Flavor::Even],
            FlavorChoice::Both => vec![Flavor::Odd, Flavor::Even],
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub flavor: FlavorChoice,
    pub reduced: bool,
    pub coeffs: Coeffs,
    pub assignment: AssignmentType,
    /// Arc whose circle is marked in reduced homology; defaults to arc 1.
    pub basepoint: Option<u32>,
    pub arrows: Option<Vec<Arrow>>,
    pub cap: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            flavor: FlavorChoice::Odd,
            reduced: false,
            coeffs: Coeffs::Z,
            assignment: AssignmentType::X,
            basepoint: None,
            arrows: None,
            cap: DEFAULT_CROSSING_CAP,
        }
    }
}

/// A diagram with its cube and edge assignment built once.
pub struct Prepared {
    pub name: String,
    pub setup: Setup,
}

impl Prepared {
    pub fn new(name: &str, pd: &PdCode, config: &RunConfig) -> Result<Self> {
        let d = orient(pd, config.arrows.clone())?;
        Ok(Prepared { name: name.to_string(), setup: Setup::new(d, config.assignment, config.cap)? })
    }

    pub fn default_basepoint(&self) -> Result<u32> {
        let pd = self.setup.diagram.pd();
        if pd.num_arcs() == 0 {
            return Err(Error::InvalidArgument("reduced homology of the empty link".into()));
        }
        Ok(1)
    }

    pub fn complex(&self, flavor: Flavor, basepoint: Option<u32>) -> Result<ChainComplex> {
        let s = &self.setup;
        match (flavor, basepoint) {
            (Flavor::Odd, None) => assemble(s),
            (Flavor::Odd, Some(p)) => reduce_basepoint(&assemble(s)?, s, p),
            (Flavor::Even, None) => assemble_even(s),
            (Flavor::Even, Some(p)) => reduce_even(&assemble_even(s)?, s, p),
        }
    }

    pub fn homology(&self, flavor: Flavor, basepoint: Option<u32>, coeffs: Coeffs) -> Result<HomologyResult> {
        let c = self.complex(flavor, basepoint)?;
        HomologyResult::of_complex(&self.name, &c, basepoint.is_some(), coeffs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyResult {
    pub knot: String,
    pub flavor: Flavor,
    pub reduced: bool,
    pub coeffs: Coeffs,
    /// Over a field every group is free of the stated dimension.
    pub groups: BigradedGroup,
    pub poincare: Poly2,
}

impl HomologyResult {
    pub fn of_complex(knot: &str, c: &ChainComplex, reduced: bool, coeffs: Coeffs) -> Result<Self> {
        let groups = match coeffs {
            Coeffs::Z => smith_homology(c)?,
            Coeffs::Q => free_groups(&field_homology(c, 0)?),
            Coeffs::Fp(p) => free_groups(&field_homology(c, p)?),
        };
        let poincare = groups.poincare();
        Ok(HomologyResult { knot: knot.to_string(), flavor: c.flavor, reduced, coeffs, groups, poincare })
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "knot": self.knot,
            "flavor": self.flavor,
            "reduced": self.reduced,
            "coeffs": self.coeffs.to_string(),
            "groups": self.groups.to_json(),
            "poincare": self.poincare.to_string(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Entry {
            m: i32,
            s: i32,
            rank: usize,
            torsion: Vec<u64>,
        }
        #[derive(Deserialize)]
        struct Raw {
            knot: String,
            flavor: Flavor,
            reduced: bool,
            coeffs: String,
            groups: Vec<Entry>,
            poincare: String,
        }
        let raw: Raw = serde_json::from_value(v.clone())?;
        let groups = BigradedGroup::from_groups(
            raw.groups
                .into_iter()
                .map(|e| (crate::complex::Bidegree::new(e.m, e.s), Group { rank: e.rank, torsion: e.torsion })),
        );
        let poincare: Poly2 = raw.poincare.parse()?;
        if poincare != groups.poincare() {
            return Err(Error::Syntax("poincare field disagrees with groups".into()));
        }
        Ok(HomologyResult {
            knot: raw.knot,
            flavor: raw.flavor,
            reduced: raw.reduced,
            coeffs: raw.coeffs.parse()?,
            groups,
            poincare,
        })
    }
}

impl fmt::Display for HomologyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flavor = match self.flavor {
            Flavor::Odd => "odd",
            Flavor::Even => "even",
        };
        let reduced = if self.reduced { "reduced" } else { "unreduced" };
        writeln!(f, "{} {flavor} {reduced} over {}", self.knot, self.coeffs)?;
        writeln!(f, "  poincare: {}", self.poincare)?;
        if self.coeffs == Coeffs::Z {
            for (g, h) in self.groups.iter() {
                writeln!(f, "  ({}, {}): {h}", g.m, g.s)?;
            }
        }
        Ok(())
    }
}

fn free_groups(dims: &Poly2) -> BigradedGroup {
    BigradedGroup::from_groups(dims.terms().map(|(g, d)| (g, Group { rank: d as usize, torsion: vec![] })))
}

/// Every flavor requested by `config`, in order odd then even.
pub fn compute(name: &str, pd: &PdCode, config: &RunConfig) -> Result<Vec<HomologyResult>> {
    let prep = Prepared::new(name, pd, config)?;
    let basepoint =
        if config.reduced { Some(config.basepoint.map_or_else(|| prep.default_basepoint(), Ok)?) } else { None };
    config.flavor.flavors().into_iter().map(|f| prep.homology(f, basepoint, config.coeffs)).collect()
}

/// Number of generators of the unreduced complex and a rough byte count
/// for it and its differentials.
pub fn estimate_size(pd: &PdCode) -> (u128, u128) {
    let n = pd.num_crossings();
    let generators: u128 =
        if n <= 24 { (0..1u32 << n).map(|v| 1u128 << circle_count(pd, v)).sum() } else { 1u128 << (2 * n).min(120) };
    // generator record plus about n/2 nonzero entries of 16 bytes per column
    let bytes = generators * (8 + 16 * (n as u128 / 2 + 1));
    (generators, bytes)
}

fn circle_count(pd: &PdCode, v: u32) -> u32 {
    let m = 2 * pd.num_crossings() + 1;
    let mut parent: Vec<usize> = (0..m).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (c, &[i, j, k, l]) in pd.crossings().iter().enumerate() {
        let pairs = if v >> c & 1 == 0 { [(i, j), (k, l)] } else { [(i, l), (j, k)] };
        for (a, b) in pairs {
            let (ra, rb) = (root(&mut parent, a as usize), root(&mut parent, b as usize));
            parent[ra] = rb;
        }
    }
    let roots = (1..m).filter(|&a| root(&mut parent, a) == a).count();
    (roots + pd.loops()) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkdiag::parse_pd;

    #[test]
    fn unknot_results() {
        let cfg = RunConfig { flavor: FlavorChoice::Both, ..RunConfig::default() };
        let out = compute("unknot", &parse_pd("PD[X[1,1,2,2]]").unwrap(), &cfg).unwrap();
        assert_eq!(out.len(), 2);
        for r in &out {
            assert_eq!(r.poincare.to_string(), "q^-1 + q");
        }
        let red = RunConfig { reduced: true, coeffs: Coeffs::Q, ..RunConfig::default() };
        let out = compute("unknot", &PdCode::unknot(), &red).unwrap();
        assert_eq!(out[0].poincare.to_string(), "1");
        assert!(compute("empty", &PdCode::empty(), &red).is_err());
    }

    #[test]
    fn json_round_trip() {
        let cfg = RunConfig { flavor: FlavorChoice::Even, ..RunConfig::default() };
        let pd = parse_pd("PD[X[1,5,2,4],X[3,1,4,6],X[5,3,6,2]]").unwrap();
        let r = compute("3_1", &pd, &cfg).unwrap().remove(0);
        assert!(r.groups.has_torsion());
        let text = serde_json::to_string(&r.to_json()).unwrap();
        let back = HomologyResult::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn size_estimate() {
        let pd = parse_pd("PD[X[1,5,2,4],X[3,1,4,6],X[5,3,6,2]]").unwrap();
        assert_eq!(estimate_size(&pd).0, 30);
        assert_eq!(estimate_size(&PdCode::unknot()).0, 2);
    }
}
