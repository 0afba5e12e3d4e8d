//! Even (ordinary) Khovanov homology on the same cube.
//!
//! The even complex shares generators, gradings and cube with the odd one;
//! only the edge maps (symmetric algebra) and the signs differ.

use crate::complex::{ChainComplex, Setup};
use crate::cube::Cube;
use crate::error::Result;
use crate::homology::{smith_homology, BigradedGroup};

pub use crate::algebra::EvenElement;
pub use crate::complex::{assemble_even, even_sign, reduce_even};

/// Per-edge signs of the even complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvenSignAssignment {
    pub values: Vec<i8>,
}

impl EvenSignAssignment {
    pub fn standard(cube: &Cube) -> Self {
        let values = cube.edges().iter().map(|e| even_sign(e.from, e.crossing) as i8).collect();
        EvenSignAssignment { values }
    }

    /// Faces whose four signs multiply to `+1`, i.e. that would commute.
    pub fn commuting_faces(&self, cube: &Cube) -> Vec<usize> {
        cube.faces()
            .iter()
            .enumerate()
            .filter(|(_, f)| f.edges.iter().map(|&e| self.values[e] as i32).product::<i32>() == 1)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Integral even homology, reduced at arc `p` when given.
pub fn even_homology(setup: &Setup, reduced: Option<u32>) -> Result<BigradedGroup> {
    let c = even_complex(setup, reduced)?;
    smith_homology(&c)
}

pub fn even_complex(setup: &Setup, reduced: Option<u32>) -> Result<ChainComplex> {
    let c = assemble_even(setup)?;
    match reduced {
        Some(p) => reduce_even(&c, setup, p),
        None => Ok(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::assemble;
    use crate::homology::field_homology;
    use crate::linkdiag::{orient, parse_pd, DEFAULT_CROSSING_CAP};
    use crate::signs::AssignmentType;

    fn setup(pd: &str) -> Setup {
        let d = orient(&parse_pd(pd).unwrap(), None).unwrap();
        Setup::new(d, AssignmentType::X, DEFAULT_CROSSING_CAP).unwrap()
    }

    #[test]
    fn standard_signs_anticommute() {
        let s = setup("PD[X[4,2,5,1],X[8,6,1,5],X[6,3,7,4],X[2,7,3,8]]");
        assert!(EvenSignAssignment::standard(&s.cube).commuting_faces(&s.cube).is_empty());
    }

    #[test]
    fn unknot_and_trefoil() {
        let u = setup("PD[Loop[1]]");
        assert_eq!(even_homology(&u, None).unwrap().poincare().to_string(), "q^-1 + q");
        assert_eq!(even_homology(&u, Some(1)).unwrap().poincare().to_string(), "1");
        let t = setup("PD[X[1,5,2,4],X[3,1,4,6],X[5,3,6,2]]");
        let h = even_homology(&t, None).unwrap();
        assert_eq!(h.total_rank(), 4);
        assert_eq!(h.poincare().to_string(), "q + q^3 + q^5 t^2 + q^9 t^3");
        assert_eq!(even_homology(&t, Some(1)).unwrap().poincare().to_string(), "q^2 + q^6 t^2 + q^8 t^3");
    }

    #[test]
    fn mod_two_agreement_on_figure_eight() {
        let s = setup("PD[X[4,2,5,1],X[8,6,1,5],X[6,3,7,4],X[2,7,3,8]]");
        let odd = field_homology(&assemble(&s).unwrap(), 2).unwrap();
        let even = field_homology(&even_complex(&s, None).unwrap(), 2).unwrap();
        assert_eq!(odd, even);
    }
}
