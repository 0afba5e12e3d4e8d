//! Laurent polynomials in `q` and Poincaré polynomials in `q, t`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::complex::Bidegree;
use crate::error::{Error, Result};

/// Integer Laurent polynomial in one variable, `exponent → coefficient`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i32, i64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn monomial(e: i32, c: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    /// `q + q⁻¹`.
    pub fn quantum_two() -> Self {
        Self::from_terms([(1, 1), (-1, 1)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, i64)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: i32, c: i64) {
        if c == 0 {
            return;
        }
        let v = self.terms.entry(e).or_insert(0);
        *v += c;
        if *v == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn coeff(&self, e: i32) -> i64 {
        self.terms.get(&e).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in o.terms() {
            p.add_term(e, c);
        }
        p
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (e, c * k)))
    }

    pub fn shift(&self, k: i32) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (e + k, c)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut p = Self::zero();
        for (e, c) in self.terms() {
            for (f, d) in o.terms() {
                p.add_term(e + f, c * d);
            }
        }
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Substitutes `x ↦ x^k`.
    pub fn substitute_power(&self, k: i32) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (e * k, c)))
    }

    /// Exact division by `q + q⁻¹`, or `None` when it does not divide.
    pub fn div_quantum_two(&self) -> Option<Self> {
        // long division from the top degree; quotient exponents lie in
        // [lo + 1, hi − 1]
        let lo = *self.terms.keys().next()?;
        let mut rest = self.clone();
        let mut out = Self::zero();
        while let Some((&top, &c)) = rest.terms.iter().next_back() {
            if top < lo + 2 {
                return None;
            }
            out.add_term(top - 1, c);
            rest.add_term(top, -c);
            rest.add_term(top - 2, -c);
        }
        Some(out)
    }

    pub fn parse_in(text: &str, var: char) -> Result<Self> {
        let mut p = Self::zero();
        for t in parse_terms(text)? {
            if t.torsion.is_some() || t.exps.keys().any(|&v| v != var) {
                return Err(Error::Syntax(format!("unexpected variable in {text:?}")));
            }
            p.add_term(t.exps.get(&var).copied().unwrap_or(0), t.coeff);
        }
        Ok(p)
    }
}

fn write_power(f: &mut fmt::Formatter<'_>, var: char, e: i32) -> fmt::Result {
    match e {
        0 => Ok(()),
        1 => write!(f, "{var}"),
        _ => write!(f, "{var}^{e}"),
    }
}

/// Writes `terms` (already ordered) as `a + b - 2 c`.
fn write_sum(f: &mut fmt::Formatter<'_>, terms: impl Iterator<Item = (i64, Vec<(char, i32)>)>) -> fmt::Result {
    let mut first = true;
    for (c, powers) in terms {
        let powers: Vec<_> = powers.into_iter().filter(|&(_, e)| e != 0).collect();
        let sign = if c < 0 { "-" } else { "+" };
        if first {
            if c < 0 {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {sign} ")?;
        }
        first = false;
        let a = c.unsigned_abs();
        if a != 1 || powers.is_empty() {
            write!(f, "{a}")?;
            if !powers.is_empty() {
                write!(f, " ")?;
            }
        }
        for (k, (v, e)) in powers.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write_power(f, *v, *e)?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(f, self.terms().map(|(e, c)| (c, vec![('q', e)])))
    }
}

impl FromStr for LaurentPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse_in(s, 'q')
    }
}

/// Polynomial in `t` (homological) and `q` (quantum), keyed by `(m, s)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly2 {
    terms: BTreeMap<Bidegree, i64>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Bidegree, i64)>) -> Self {
        let mut p = Self::zero();
        for (g, c) in terms {
            p.add_term(g, c);
        }
        p
    }

    pub fn add_term(&mut self, g: Bidegree, c: i64) {
        if c == 0 {
            return;
        }
        let v = self.terms.entry(g).or_insert(0);
        *v += c;
        if *v == 0 {
            self.terms.remove(&g);
        }
    }

    pub fn coeff(&self, g: Bidegree) -> i64 {
        self.terms.get(&g).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Bidegree, i64)> + '_ {
        self.terms.iter().map(|(&g, &c)| (g, c))
    }

    pub fn support(&self) -> impl Iterator<Item = Bidegree> + '_ {
        self.terms.keys().copied()
    }

    /// Sum of coefficients.
    pub fn total(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluation at `t = −1`.
    pub fn euler(&self) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms().map(|(g, c)| (g.s, if g.m.rem_euclid(2) == 0 { c } else { -c })))
    }

    pub fn shift_q(&self, k: i32) -> Self {
        Self::from_terms(self.terms().map(|(g, c)| (Bidegree::new(g.m, g.s + k), c)))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (g, c) in o.terms() {
            p.add_term(g, c);
        }
        p
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by_key(|(g, _)| (g.s, g.m));
        write_sum(f, terms.into_iter().map(|(g, c)| (c, vec![('q', g.s), ('t', g.m)])))
    }
}

impl FromStr for Poly2 {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Self::zero();
        for t in parse_terms(s)? {
            if t.torsion.is_some() || t.exps.keys().any(|&v| v != 'q' && v != 't') {
                return Err(Error::Syntax(format!("unexpected variable in {s:?}")));
            }
            let g = Bidegree::new(*t.exps.get(&'t').unwrap_or(&0), *t.exps.get(&'q').unwrap_or(&0));
            p.add_term(g, t.coeff);
        }
        Ok(p)
    }
}

#[derive(Debug, PartialEq, Eq)]
pub(crate) struct Term {
    pub coeff: i64,
    pub exps: BTreeMap<char, i32>,
    /// Order of a cyclic summand, written `T^k` in knot tables.
    pub torsion: Option<u64>,
}

/// Parses sums of monomials such as `q^6 + q^{10} t^2 - 3 q^-20 t^-7`,
/// `t^(2)*q^(6)` or `2*t^(3)*q^(7)*T^(2)`.
pub(crate) fn parse_terms(text: &str) -> Result<Vec<Term>> {
    let s: String = text.chars().filter(|c| !c.is_whitespace() && !"{}()*".contains(*c)).collect();
    let bad = || Error::Syntax(format!("cannot parse polynomial {text:?}"));
    if s.is_empty() || s == "0" {
        return Ok(vec![]);
    }
    let chars: Vec<char> = s.chars().collect();
    let mut out = vec![];
    let mut pos = 0;
    while pos < chars.len() {
        let mut sign = 1;
        match chars[pos] {
            '+' => pos += 1,
            '-' => {
                sign = -1;
                pos += 1
            }
            _ if pos > 0 => return Err(bad()),
            _ => {}
        }
        let read_int = |pos: &mut usize| -> Option<i64> {
            let start = *pos;
            if *pos < chars.len() && chars[*pos] == '-' {
                *pos += 1;
            }
            while *pos < chars.len() && chars[*pos].is_ascii_digit() {
                *pos += 1;
            }
            let t: String = chars[start..*pos].iter().collect();
            t.parse().ok()
        };
        let coeff =
            if pos < chars.len() && chars[pos].is_ascii_digit() { read_int(&mut pos).ok_or_else(bad)? } else { 1 };
        let mut term = Term { coeff: sign * coeff, exps: BTreeMap::new(), torsion: None };
        let mut any = coeff != 1 || (pos > 0 && chars[pos - 1].is_ascii_digit());
        while pos < chars.len() && chars[pos].is_ascii_alphabetic() {
            let v = chars[pos];
            pos += 1;
            let e = if pos < chars.len() && chars[pos] == '^' {
                pos += 1;
                read_int(&mut pos).ok_or_else(bad)?
            } else {
                1
            };
            if v == 'T' {
                term.torsion = Some(u64::try_from(e).map_err(|_| bad())?);
            } else {
                *term.exps.entry(v).or_insert(0) += e as i32;
            }
            any = true;
        }
        if !any {
            return Err(bad());
        }
        out.push(term);
    }
    Ok(out)
}
