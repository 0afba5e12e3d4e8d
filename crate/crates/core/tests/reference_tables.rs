//! Comparison with the homology published in the bundled knot table.

use oddkh::complex::Flavor;
use oddkh::homology::Coeffs;
use oddkh::pipeline::{Prepared, RunConfig};
use oddkh::table::KnotTable;
use rayon::prelude::*;

fn max_crossings() -> usize {
    std::env::var("ODDKH_TEST_MAX_CROSSINGS").ok().and_then(|v| v.parse().ok()).unwrap_or(10)
}

#[test]
fn odd_and_even_match_published_groups() {
    let table = KnotTable::bundled();
    let cfg = RunConfig::default();
    let failures: Vec<String> = table
        .up_to(max_crossings())
        .collect::<Vec<_>>()
        .par_iter()
        .filter_map(|rec| {
            let prep = Prepared::new(&rec.name, &rec.pd_code().unwrap(), &cfg).unwrap();
            let mut bad = vec![];
            if let Some(want) = rec.odd_reduced().unwrap() {
                let got = prep.homology(Flavor::Odd, Some(1), Coeffs::Z).unwrap().groups;
                if got != want {
                    bad.push(format!("odd reduced: got\n{got}want\n{want}"));
                }
            }
            if let Some(want) = rec.even_unreduced().unwrap() {
                let got = prep.homology(Flavor::Even, None, Coeffs::Z).unwrap().groups;
                if got != want {
                    bad.push(format!("even unreduced: got\n{got}want\n{want}"));
                }
            }
            if let Some(want) = rec.even_reduced_q().unwrap() {
                let got = prep.homology(Flavor::Even, Some(1), Coeffs::Q).unwrap().poincare;
                if got != want {
                    bad.push(format!("even reduced: got {got} want {want}"));
                }
            }
            (!bad.is_empty()).then(|| format!("{}: {}", rec.name, bad.join("; ")))
        })
        .collect();
    assert!(failures.is_empty(), "{} mismatches:\n{}", failures.len(), failures.join("\n"));
}
