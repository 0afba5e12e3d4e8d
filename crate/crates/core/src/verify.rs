//! Consistency checks run over knot tables, shared by the command line and
//! the test suites.

use std::cell::OnceCell;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::complex::{ChainComplex, Flavor, Setup};
use crate::error::{Error, Result};
use crate::homology::{
    euler_characteristic, field_homology, jones_normalized, jones_state_sum, smith_homology, thinness, BigradedGroup,
    LaurentPoly, Poly2,
};
use crate::linkdiag::{orient, Arrow, PdCode};
use crate::pipeline::{Prepared, RunConfig};
use crate::signs::{
    find_gauge, gauge_transform, solve_assignment, solve_assignment_dense, target_cochain, verify_assignment,
    AssignmentType, EdgeAssignment,
};
use crate::table::KnotRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    /// The differential squares to zero (odd of both types, and even).
    DSquared,
    /// Faces of type A and X, and of A and Y, are even in number on every 3-cube.
    Parity,
    /// Every face relation holds on the full basis of its corner.
    Faces,
    /// The tree and dense assignments are gauge equivalent, and a gauge
    /// change leaves homology unchanged.
    Gauge,
    /// Euler characteristic of unreduced homology is the Jones state sum.
    Euler,
    /// Reduced Euler characteristic is the table's Jones polynomial.
    Jones,
    /// Odd and even homology agree over GF(2).
    Mod2,
    /// Unreduced homology is two shifted copies of reduced homology.
    Splitting,
    /// Reduced odd homology over Q lies on the diagonal `s − 2m = σ`.
    Thin,
    /// Homology is unchanged across assignment types, arrows and basepoints.
    Invariance,
}

impl Check {
    /// Everything except `Thin`, which only holds for some knots.
    pub const DEFAULT: [Check; 9] = [
        Check::DSquared,
        Check::Parity,
        Check::Faces,
        Check::Gauge,
        Check::Euler,
        Check::Jones,
        Check::Mod2,
        Check::Splitting,
        Check::Invariance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::DSquared => "d-squared",
            Check::Parity => "parity",
            Check::Faces => "faces",
            Check::Gauge => "gauge",
            Check::Euler => "euler",
            Check::Jones => "jones",
            Check::Mod2 => "mod2",
            Check::Splitting => "splitting",
            Check::Thin => "thin",
            Check::Invariance => "invariance",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [Check::Thin]
            .into_iter()
            .chain(Check::DEFAULT)
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown check {s:?}")))
    }
}

/// A failed check with a serializable counterexample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub knot: String,
    pub check: Check,
    pub witness: Value,
}

/// The link under test and what the table says about it.
#[derive(Clone, Debug)]
pub struct Subject {
    pub name: String,
    pub pd: PdCode,
    pub signature: Option<i32>,
    pub jones: Option<LaurentPoly>,
}

impl Subject {
    pub fn from_record(r: &KnotRecord) -> Result<Self> {
        Ok(Subject { name: r.name.clone(), pd: r.pd_code()?, signature: r.signature, jones: r.jones_q()? })
    }

    pub fn from_pd(name: &str, pd: PdCode) -> Self {
        Subject { name: name.to_string(), pd, signature: None, jones: None }
    }
}

/// Lazily computed data shared between checks on one subject.
struct Context<'a> {
    subject: &'a Subject,
    config: &'a RunConfig,
    prep: Prepared,
    odd: OnceCell<ChainComplex>,
    even: OnceCell<ChainComplex>,
    odd_z: OnceCell<BigradedGroup>,
    reduced_z: OnceCell<BigradedGroup>,
}

impl<'a> Context<'a> {
    fn new(subject: &'a Subject, config: &'a RunConfig) -> Result<Self> {
        let prep = Prepared::new(&subject.name, &subject.pd, config)?;
        Ok(Context {
            subject,
            config,
            prep,
            odd: OnceCell::new(),
            even: OnceCell::new(),
            odd_z: OnceCell::new(),
            reduced_z: OnceCell::new(),
        })
    }

    fn setup(&self) -> &Setup {
        &self.prep.setup
    }

    fn odd(&self) -> Result<&ChainComplex> {
        get_or_try(&self.odd, || self.prep.complex(Flavor::Odd, None))
    }

    fn even(&self) -> Result<&ChainComplex> {
        get_or_try(&self.even, || self.prep.complex(Flavor::Even, None))
    }

    fn odd_z(&self) -> Result<&BigradedGroup> {
        get_or_try(&self.odd_z, || smith_homology(self.odd()?))
    }

    fn basepoint(&self) -> Option<u32> {
        (self.subject.pd.num_arcs() > 0).then(|| self.config.basepoint.unwrap_or(1))
    }

    /// Reduced odd homology at the configured basepoint; zero for the empty link.
    fn reduced_z(&self) -> Result<&BigradedGroup> {
        get_or_try(&self.reduced_z, || match self.basepoint() {
            Some(p) => reduced_at(self.setup(), self.odd()?, p),
            None => Ok(BigradedGroup::default()),
        })
    }

    fn fail(&self, check: Check, witness: Value) -> Option<Failure> {
        Some(Failure { knot: self.subject.name.clone(), check, witness })
    }

    fn run(&self, check: Check) -> Result<Option<Failure>> {
        match check {
            Check::DSquared => self.d_squared(),
            Check::Parity => Ok(match self.setup().cube.verify_cube_parity() {
                Ok(()) => None,
                Err(v) => self.fail(check, serde_json::to_value(v)?),
            }),
            Check::Faces => Ok(match self.setup().cube.verify_face_relations() {
                Ok(()) => None,
                Err(e) => self.fail(check, json!(e.to_string())),
            }),
            Check::Gauge => self.gauge(),
            Check::Euler => self.euler(),
            Check::Jones => self.jones(),
            Check::Mod2 => {
                let odd = field_homology(self.odd()?, 2)?;
                let even = field_homology(self.even()?, 2)?;
                Ok((odd != even).then(|| poly_diff(check, self, &odd, &even)).flatten())
            }
            Check::Splitting => {
                let r = self.reduced_z()?;
                if self.basepoint().is_none() {
                    return Ok(None);
                }
                let split = r.shift_q(1).direct_sum(&r.shift_q(-1));
                let h = self.odd_z()?;
                Ok((split != *h).then(|| group_diff(check, self, h, &split)).flatten())
            }
            Check::Thin => {
                let dims = self.reduced_z()?.poincare();
                let t = thinness(&dims, self.subject.signature);
                Ok(match t.thin {
                    Some(false) => self.fail(
                        check,
                        json!({"signature": self.subject.signature, "off_diagonal": t.off_diagonal,
                               "poincare": dims.to_string()}),
                    ),
                    _ => None,
                })
            }
            Check::Invariance => self.invariance(),
        }
    }

    fn d_squared(&self) -> Result<Option<Failure>> {
        let y = Setup::new(self.setup().diagram.clone(), other_type(self.config.assignment), self.config.cap)?;
        let complexes: [(&str, Result<ChainComplex>); 3] = [
            ("odd", self.odd().cloned()),
            ("odd-other-type", crate::complex::assemble(&y)),
            ("even", self.even().cloned()),
        ];
        for (label, c) in complexes {
            match c.and_then(|c| c.check_d_squared()) {
                Ok(()) => {}
                Err(Error::NonzeroSquare { m, s }) => {
                    return Ok(self.fail(Check::DSquared, json!({"complex": label, "m": m, "s": s})))
                }
                Err(e) => return Err(e),
            }
        }
        Ok(None)
    }

    fn gauge(&self) -> Result<Option<Failure>> {
        let cube = &self.setup().cube;
        let t = self.config.assignment;
        let phi = target_cochain(cube, t);
        let tree = solve_assignment(cube, &phi, t)?;
        let dense = solve_assignment_dense(cube, &phi, t)?;
        if let Err(v) = verify_assignment(cube, &dense) {
            return Ok(self.fail(Check::Gauge, json!({"dense_solution_violates": v})));
        }
        if find_gauge(cube, &tree, &dense).is_none() {
            return Ok(self.fail(Check::Gauge, json!("tree and dense assignments are not gauge equivalent")));
        }
        let eta: Vec<i8> = (0..1u64 << cube.num_crossings())
            .map(|v| if (v.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 61).count_ones() % 2 == 0 { 1 } else { -1 })
            .collect();
        let moved = gauge_transform(cube, &self.setup().assignment, &eta);
        let h = homology_with(self.setup(), moved)?;
        let base = self.odd_z()?;
        Ok((h != *base).then(|| group_diff(Check::Gauge, self, base, &h)).flatten())
    }

    fn euler(&self) -> Result<Option<Failure>> {
        let from_homology = euler_characteristic(self.odd_z()?);
        let from_complex = LaurentPoly::from_terms(self.odd()?.euler_characteristic());
        let state_sum = jones_state_sum(&self.subject.pd);
        if from_homology != state_sum || from_complex != state_sum {
            return Ok(self.fail(
                Check::Euler,
                json!({"homology": from_homology.to_string(), "complex": from_complex.to_string(),
                       "state_sum": state_sum.to_string()}),
            ));
        }
        Ok(None)
    }

    fn jones(&self) -> Result<Option<Failure>> {
        if self.basepoint().is_none() {
            return Ok(None);
        }
        let reduced = euler_characteristic(self.reduced_z()?);
        let normalized = jones_normalized(&self.subject.pd);
        let table_ok = self.subject.jones.as_ref().is_none_or(|j| *j == reduced);
        if Some(&reduced) != normalized.as_ref() || !table_ok {
            return Ok(self.fail(
                Check::Jones,
                json!({"reduced_euler": reduced.to_string(),
                       "normalized_state_sum": normalized.map(|p| p.to_string()),
                       "table": self.subject.jones.as_ref().map(|p| p.to_string())}),
            ));
        }
        Ok(None)
    }

    fn invariance(&self) -> Result<Option<Failure>> {
        let base = self.odd_z()?;
        let d = &self.setup().diagram;
        let other = Setup::new(d.clone(), other_type(self.config.assignment), self.config.cap)?;
        let h = smith_homology(&crate::complex::assemble(&other)?)?;
        if h != *base {
            return Ok(group_diff(Check::Invariance, self, base, &h));
        }
        let n = d.num_crossings();
        for flip in arrow_flips(n) {
            let arrows: Vec<Arrow> =
                d.arrows().iter().enumerate().map(|(c, &a)| if flip >> c & 1 == 1 { a.flipped() } else { a }).collect();
            let s = Setup::new(orient(d.pd(), Some(arrows))?, self.config.assignment, self.config.cap)?;
            let h = smith_homology(&crate::complex::assemble(&s)?)?;
            if h != *base {
                return Ok(group_diff(Check::Invariance, self, base, &h));
            }
        }
        let arcs = d.pd().num_arcs() as u32;
        if arcs > 0 {
            let reduced = self.reduced_z()?;
            let mut probes = vec![1, arcs / 2 + 1, arcs];
            probes.dedup();
            for p in probes {
                let h = reduced_at(self.setup(), self.odd()?, p)?;
                if h != *reduced {
                    return Ok(group_diff(Check::Invariance, self, reduced, &h));
                }
            }
        }
        Ok(None)
    }
}

fn get_or_try<T>(cell: &OnceCell<T>, f: impl FnOnce() -> Result<T>) -> Result<&T> {
    if let Some(v) = cell.get() {
        return Ok(v);
    }
    let v = f()?;
    Ok(cell.get_or_init(|| v))
}

fn other_type(t: AssignmentType) -> AssignmentType {
    match t {
        AssignmentType::X => AssignmentType::Y,
        AssignmentType::Y => AssignmentType::X,
    }
}

/// Arrow patterns to try: every one for small diagrams, otherwise flipping
/// the first crossing, a middle one, and all of them.
fn arrow_flips(n: usize) -> Vec<u32> {
    if n <= 3 {
        return (1..1u32 << n).collect();
    }
    vec![1, 1 << (n / 2), (1 << n) - 1]
}

fn reduced_at(setup: &Setup, odd: &ChainComplex, p: u32) -> Result<BigradedGroup> {
    smith_homology(&crate::complex::reduce_basepoint(odd, setup, p)?)
}

fn homology_with(setup: &Setup, eps: EdgeAssignment) -> Result<BigradedGroup> {
    let s = Setup::with_assignment(setup.diagram.clone(), setup.cube.clone(), eps)?;
    smith_homology(&crate::complex::assemble(&s)?)
}

fn group_diff(check: Check, ctx: &Context, want: &BigradedGroup, got: &BigradedGroup) -> Option<Failure> {
    let degrees: std::collections::BTreeSet<_> = want.support().chain(got.support()).collect();
    let diff: Vec<Value> = degrees
        .into_iter()
        .filter(|&g| want.get(g) != got.get(g))
        .map(|g| json!({"m": g.m, "s": g.s, "expected": want.get(g).to_string(), "found": got.get(g).to_string()}))
        .collect();
    ctx.fail(check, Value::Array(diff))
}

fn poly_diff(check: Check, ctx: &Context, a: &Poly2, b: &Poly2) -> Option<Failure> {
    ctx.fail(check, json!({"odd": a.to_string(), "even": b.to_string()}))
}

/// Runs `checks` on one subject, stopping at the first failure.
pub fn verify_subject(subject: &Subject, checks: &[Check], config: &RunConfig) -> Result<Option<Failure>> {
    let ctx = Context::new(subject, config)?;
    for &c in checks {
        if let Some(f) = ctx.run(c)? {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

/// Checks a supplied assignment against the face types; the witness names
/// the first face with the wrong sign product.
pub fn check_assignment(setup: &Setup, eps: &EdgeAssignment) -> Option<Value> {
    verify_assignment(&setup.cube, eps).err().map(|v| serde_json::to_value(v).expect("serializable"))
}

/// Reduced odd and even homology over Q side by side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompareRow {
    pub knot: String,
    pub odd: String,
    pub even: String,
    pub odd_rank: i64,
    pub even_rank: i64,
    pub odd_thin: Option<bool>,
    pub even_thin: Option<bool>,
}

impl CompareRow {
    /// Rows where both theories are thin carry no information.
    pub fn both_thin(&self) -> bool {
        self.odd_thin == Some(true) && self.even_thin == Some(true)
    }
}

pub fn compare(subject: &Subject, config: &RunConfig) -> Result<CompareRow> {
    let prep = Prepared::new(&subject.name, &subject.pd, config)?;
    let p = config.basepoint.map_or_else(|| prep.default_basepoint(), Ok)?;
    let odd = field_homology(&prep.complex(Flavor::Odd, Some(p))?, 0)?;
    let even = field_homology(&prep.complex(Flavor::Even, Some(p))?, 0)?;
    Ok(CompareRow {
        knot: subject.name.clone(),
        odd_rank: odd.total(),
        even_rank: even.total(),
        odd_thin: thinness(&odd, subject.signature).thin,
        even_thin: thinness(&even, subject.signature).thin,
        odd: odd.to_string(),
        even: even.to_string(),
    })
}

/// Integral odd homology of each diagram, reduced and unreduced, under both
/// assignment types; the witness is the first disagreement with the first
/// diagram.
pub fn invariance(diagrams: &[Subject], config: &RunConfig) -> Result<Option<Value>> {
    let mut reference: Option<(String, BigradedGroup, BigradedGroup)> = None;
    for s in diagrams {
        for t in [AssignmentType::X, AssignmentType::Y] {
            let cfg = RunConfig { assignment: t, ..config.clone() };
            let ctx = Context::new(s, &cfg)?;
            let h = ctx.odd_z()?.clone();
            let r = ctx.reduced_z()?.clone();
            if let Some(f) = ctx.run(Check::Invariance)? {
                return Ok(Some(json!({"diagram": s.name, "within_diagram": f.witness})));
            }
            match &reference {
                None => reference = Some((s.name.clone(), h, r)),
                Some((name, h0, r0)) => {
                    for (label, a, b) in [("unreduced", h0, &h), ("reduced", r0, &r)] {
                        if a != b {
                            let f = group_diff(Check::Invariance, &ctx, a, b).expect("nonempty");
                            return Ok(Some(json!({"first": name, "second": s.name, "assignment": t,
                                                  "homology": label, "diff": f.witness})));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}
