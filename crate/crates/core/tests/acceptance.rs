//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
//!
//! `ODDKH_ACCEPTANCE_MAX_CROSSINGS` bounds the corpus used by the
//! whole-corpus criteria (default 11, every bundled knot). Criteria about
//! knots through 10 crossings never look past 10.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use common::{add_kink, braid_closure, KINKS};
use oddkh::complex::Flavor;
use oddkh::homology::{
    field_homology, jones_normalized, jones_state_sum, smith_homology, thinness, BigradedGroup, Coeffs, LaurentPoly,
    Poly2,
};
use oddkh::pipeline::{Prepared, RunConfig};
use oddkh::table::{KnotRecord, KnotTable};
use oddkh::verify::{compare, invariance, verify_subject, Check, Subject};

/// Wall-clock budget for the structural property checks through 10 crossings.
const PROPERTY_BUDGET: Duration = Duration::from_secs(600);

/// Polynomials compared by exact coefficient equality.
const PUBLISHED: [(&str, &str); 8] = [
    ("8_19", "q^6 + q^{10}t^2 + q^{16}t^5"),
    ("10_124", "q^8 + q^{12} t^2 + q^{20} t^7"),
    ("10_139", "q^8 + q^{12} t^2 + q^{16} t^5 + q^{18} t^6 + q^{20} t^7 + q^{22} t^8 + q^{24} t^9"),
    (
        "10_145",
        "q^{-20} t^{-9} + q^{-18}t^{-8} + q^{-16} t^{-7} + q^{-14} t^{-6} + q^{-8} t^{-3} + q^{-8} t^{-2} + q^{-4}",
    ),
    (
        "10_152",
        "q^{-26} t^{-10} + 2 q^{-24} t^{-9} + 2 q^{-22} t^{-8} + 3 q^{-20} t^{-7} + 2q^{-18} t^{-6} \
         + 2q^{-16} t^{-5} + q^{-14} t^{-4} + q^{-12} t^{-2} + q^{-8}",
    ),
    (
        "10_153",
        "q^{-10} t^{-5} + q^{-8} t^{-4} + q^{-6} t^{-3} + q^{-4} t^{-2} + 1 + q^2 t^2 + q^4 t^3 + q^6 t^4 + q^8 t^5",
    ),
    (
        "10_154",
        "q^6 + q^{10} t^2 + q^{10} t^3 + 2 q^{12} t^4 + 2 q^{14} t^5 + 2 q^{16} t^6 + 3 q^{18} t^7 \
         + 2 q^{20} t^8 + 2 q^{22} t^9 + q^{24} t^{10}",
    ),
    (
        "10_161",
        "q^{-22} t^{-9} + q^{-20} t^{-8} + q^{-18} t^{-7} + q^{-16} t^{-6} + q^{-14} t^{-5} + q^{-12} t^{-4} \
         + q^{-10} t^{-3} + q^{-10} t^{-2} + q^{-6}",
    ),
];

/// (knot, odd reduced rank, even reduced rank) over Q.
const RANKS: [(&str, i64, i64); 10] = [
    ("10_124", 3, 7),
    ("10_128", 11, 13),
    ("10_132", 5, 11),
    ("10_136", 15, 17),
    ("10_139", 7, 11),
    ("10_145", 7, 13),
    ("10_152", 15, 19),
    ("10_153", 9, 17),
    ("10_154", 17, 21),
    ("10_161", 9, 13),
];

/// Table diagrams drawn as the mirror image of the published ones.
const MIRRORED: [&str; 2] = ["10_152", "10_161"];

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { pass: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { pass: false, detail: detail.into() }
}

/// Everything the whole-corpus criteria need, computed once per knot.
struct Entry {
    name: String,
    crossings: usize,
    alternating: bool,
    signature: Option<i32>,
    odd_z: BigradedGroup,
    odd_reduced_z: BigradedGroup,
    odd_f2: Poly2,
    even_f2: Poly2,
    state_sum: LaurentPoly,
}

fn prepare(r: &KnotRecord) -> Prepared {
    Prepared::new(&r.name, &r.pd_code().unwrap(), &RunConfig::default()).unwrap()
}

fn entry(r: &KnotRecord) -> Entry {
    let prep = prepare(r);
    let odd = prep.complex(Flavor::Odd, None).unwrap();
    let even = prep.complex(Flavor::Even, None).unwrap();
    let reduced = prep.complex(Flavor::Odd, Some(1)).unwrap();
    Entry {
        name: r.name.clone(),
        crossings: r.crossings(),
        alternating: r.alternating.unwrap_or(false),
        signature: r.signature,
        odd_z: smith_homology(&odd).unwrap(),
        odd_reduced_z: smith_homology(&reduced).unwrap(),
        odd_f2: field_homology(&odd, 2).unwrap(),
        even_f2: field_homology(&even, 2).unwrap(),
        state_sum: jones_state_sum(&r.pd_code().unwrap()),
    }
}

fn reduced_q(r: &KnotRecord, pd_mirror: bool, flavor: Flavor) -> Poly2 {
    let mut pd = r.pd_code().unwrap();
    if pd_mirror {
        pd = pd.mirror();
    }
    let prep = Prepared::new(&r.name, &pd, &RunConfig::default()).unwrap();
    field_homology(&prep.complex(flavor, Some(1)).unwrap(), 0).unwrap()
}

fn negate(p: &Poly2) -> Poly2 {
    Poly2::from_terms(p.terms().map(|(g, c)| (oddkh::complex::Bidegree::new(-g.m, -g.s), c)))
}

fn published_polynomials(table: &KnotTable) -> Outcome {
    let mut bad = vec![];
    for (name, text) in PUBLISHED {
        let r = table.get(name).unwrap();
        let expected: Poly2 = text.parse().unwrap();
        let mirrored = MIRRORED.contains(&name);
        let got = reduced_q(r, mirrored, Flavor::Odd);
        if got != expected {
            bad.push(format!("{name}: got {got}"));
        }
        if mirrored {
            // The chirality is read off the Jones polynomial: the published
            // polynomial's Euler characteristic must be the normalized Jones
            // polynomial of the mirrored diagram and not of the table one.
            let pd = r.pd_code().unwrap();
            let chi = expected.euler();
            if jones_normalized(&pd.mirror()) != Some(chi.clone()) || jones_normalized(&pd) == Some(chi) {
                bad.push(format!("{name}: chirality not confirmed by the Jones polynomial"));
            }
            let direct = reduced_q(r, false, Flavor::Odd);
            if direct != negate(&expected) {
                bad.push(format!("{name}: table diagram gives {direct}"));
            }
        }
    }
    if bad.is_empty() {
        pass(format!("{} polynomials exact ({} on mirrored table diagrams)", PUBLISHED.len(), MIRRORED.len()))
    } else {
        fail(bad.join("; "))
    }
}

fn rank_table(table: &KnotTable) -> Outcome {
    let rows: Vec<_> = table
        .up_to(10)
        .filter(|r| r.crossings() == 10 && r.alternating == Some(false))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|r| compare(&Subject::from_record(r).unwrap(), &RunConfig::default()).unwrap())
        .collect();
    let mut bad = vec![];
    let listed_thin = ["10_128", "10_132", "10_136"];
    for row in &rows {
        match RANKS.iter().find(|(n, ..)| *n == row.knot) {
            Some(&(name, odd, even)) => {
                if (row.odd_rank, row.even_rank) != (odd, even) {
                    bad.push(format!("{name}: {}/{} instead of {odd}/{even}", row.odd_rank, row.even_rank));
                }
                if row.even_thin != Some(false) {
                    bad.push(format!("{name}: even theory is thin"));
                }
                if row.odd_thin != Some(listed_thin.contains(&name)) {
                    bad.push(format!("{name}: odd thinness {:?}", row.odd_thin));
                }
            }
            None if !row.both_thin() => bad.push(format!("{}: unlisted but not both thin", row.knot)),
            None => {}
        }
    }
    if rows.len() != 42 {
        bad.push(format!("expected 42 non-alternating 10-crossing knots, found {}", rows.len()));
    }
    if bad.is_empty() {
        pass(format!("10 rank pairs reproduced; other {} knots both thin", rows.len() - RANKS.len()))
    } else {
        fail(bad.join("; "))
    }
}

fn trefoil_ranks(table: &KnotTable) -> Outcome {
    let prep = prepare(table.get("3_1").unwrap());
    let odd = prep.homology(Flavor::Odd, None, Coeffs::Q).unwrap().poincare.total();
    let even = prep.homology(Flavor::Even, None, Coeffs::Q).unwrap().poincare.total();
    if (odd, even) == (6, 4) {
        pass("odd 6, even 4")
    } else {
        fail(format!("odd {odd}, even {even}"))
    }
}

fn first_failures<'a>(bad: impl Iterator<Item = &'a str>) -> String {
    let bad: Vec<&str> = bad.collect();
    format!("{} failures: {}", bad.len(), bad.iter().take(5).cloned().collect::<Vec<_>>().join(", "))
}

fn euler_is_jones(corpus: &[Entry]) -> Outcome {
    let scope: Vec<&Entry> = corpus.iter().filter(|e| e.crossings <= 10).collect();
    let bad = scope.iter().filter(|e| e.odd_z.poincare().euler() != e.state_sum).map(|e| e.name.as_str());
    let bad = first_failures(bad);
    if bad.starts_with("0 ") {
        pass(format!("{} knots through 10 crossings", scope.len()))
    } else {
        fail(bad)
    }
}

fn mod2_agreement(corpus: &[Entry]) -> Outcome {
    let bad = first_failures(corpus.iter().filter(|e| e.odd_f2 != e.even_f2).map(|e| e.name.as_str()));
    let via_uct = corpus.iter().filter(|e| e.odd_z.poincare_mod_p(2) != e.odd_f2).count();
    if bad.starts_with("0 ") && via_uct == 0 {
        pass(format!("{} knots; GF(2) dimensions also match universal coefficients", corpus.len()))
    } else {
        fail(format!("{bad}; {via_uct} disagree with universal coefficients"))
    }
}

fn splitting(corpus: &[Entry]) -> Outcome {
    let bad = corpus
        .iter()
        .filter(|e| e.odd_reduced_z.shift_q(-1).direct_sum(&e.odd_reduced_z.shift_q(1)) != e.odd_z)
        .map(|e| e.name.as_str());
    let bad = first_failures(bad);
    let torsion = corpus.iter().filter(|e| e.odd_z.has_torsion()).count();
    if bad.starts_with("0 ") {
        pass(format!("{} knots, {} with torsion", corpus.len(), torsion))
    } else {
        fail(bad)
    }
}

fn alternating(table: &KnotTable, corpus: &[Entry]) -> Outcome {
    let scope: Vec<&Entry> = corpus.iter().filter(|e| e.crossings <= 10 && e.alternating).collect();
    let bad: Vec<String> = scope
        .par_iter()
        .filter_map(|e| {
            let odd = e.odd_reduced_z.poincare();
            let t = thinness(&odd, e.signature);
            if t.thin != Some(true) {
                return Some(format!("{} off diagonal {:?}", e.name, t.off_diagonal));
            }
            let even = reduced_q(table.get(&e.name).unwrap(), false, Flavor::Even);
            (even != odd).then(|| format!("{} odd {odd} even {even}", e.name))
        })
        .collect();
    if bad.is_empty() {
        pass(format!("{} alternating knots thin on the signature, odd = even", scope.len()))
    } else {
        fail(format!("{} failures: {}", bad.len(), bad.iter().take(5).cloned().collect::<Vec<_>>().join("; ")))
    }
}

fn nine_42(table: &KnotTable) -> Outcome {
    let r = table.get("9_42").unwrap();
    let prep = prepare(r);
    let c = prep.complex(Flavor::Odd, Some(1)).unwrap();
    let q = field_homology(&c, 0).unwrap();
    let f2 = field_homology(&c, 2).unwrap();
    let (tq, tf) = (thinness(&q, r.signature), thinness(&f2, r.signature));
    if tq.thin == Some(true) && tf.thin == Some(false) {
        let off: Vec<(i32, i32)> = tf.off_diagonal.iter().map(|g| (g.m, g.s)).collect();
        pass(format!("Q thin; GF(2) off diagonal at (m, s) = {off:?}"))
    } else {
        fail(format!("Q thin {:?}, GF(2) thin {:?}", tq.thin, tf.thin))
    }
}

/// Pairs of diagrams of one link related by Reidemeister moves.
fn move_families(table: &KnotTable) -> Vec<Vec<Subject>> {
    let sub = |n: &str, pd| Subject::from_pd(n, pd);
    let mut families = vec![];
    for name in ["3_1", "4_1", "5_2", "6_1"] {
        let pd = table.get(name).unwrap().pd_code().unwrap();
        let mut f = vec![sub(name, pd.clone())];
        for (i, k) in KINKS.into_iter().enumerate() {
            f.push(sub(&format!("{name}+RI{i}"), add_kink(&pd, 1 + i as u32, k)));
        }
        families.push(f);
    }
    let trefoil = table.get("3_1").unwrap().pd_code().unwrap();
    families.push(vec![
        sub("3_1", trefoil),
        sub("s1^3", braid_closure(&[1, 1, 1], 2)),
        sub("s1^3 s2", braid_closure(&[1, 1, 1, 2], 3)),
        sub("s1^3 s2^-1", braid_closure(&[1, 1, 1, -2], 3)),
        sub("s1 s2 s1 s2", braid_closure(&[1, 2, 1, 2], 3)),
        sub("s1^3 s2 s1^-1 s1", braid_closure(&[1, 1, 1, 2, -1, 1], 3)),
    ]);
    let eight = table.get("4_1").unwrap().pd_code().unwrap();
    families.push(vec![
        sub("4_1", eight),
        sub("(s1 s2^-1)^2", braid_closure(&[1, -2, 1, -2], 3)),
        sub("RII", braid_closure(&[1, -2, 2, -2, 1, -2], 3)),
        sub("RIII", braid_closure(&[2, 1, 2, -1, -2, -1, 1, -2, 1, -2], 3)),
    ]);
    families
}

fn property_suite(table: &KnotTable) -> Outcome {
    let start = Instant::now();
    let checks = [Check::DSquared, Check::Parity, Check::Faces, Check::Gauge, Check::Invariance];
    let records: Vec<&KnotRecord> = table.up_to(10).collect();
    let failures: Vec<String> = records
        .par_iter()
        .filter_map(|r| {
            let s = Subject::from_record(r).unwrap();
            verify_subject(&s, &checks, &RunConfig::default())
                .unwrap()
                .map(|f| format!("{} {}: {}", f.knot, f.check, f.witness))
        })
        .collect();
    let families = move_families(table);
    let moves: Vec<String> =
        families.iter().filter_map(|f| invariance(f, &RunConfig::default()).unwrap().map(|w| w.to_string())).collect();
    let elapsed = start.elapsed();
    let detail = format!(
        "{} knots x {} checks, {} Reidemeister families, {:.1}s (budget {}s)",
        records.len(),
        checks.len(),
        families.len(),
        elapsed.as_secs_f64(),
        PROPERTY_BUDGET.as_secs()
    );
    if !failures.is_empty() || !moves.is_empty() {
        fail(format!("{detail}; {:?} {:?}", failures.first(), moves.first()))
    } else if elapsed > PROPERTY_BUDGET {
        fail(format!("{detail}; over budget"))
    } else {
        pass(detail)
    }
}

fn main() -> ExitCode {
    // `cargo test` forwards harness flags; a name filter that does not
    // select this suite, or a listing request, runs nothing.
    let args: Vec<String> = std::env::args().skip(1).collect();
    let filtered_out = args.iter().any(|a| !a.starts_with('-') && !"acceptance".contains(a.as_str()));
    if filtered_out || args.iter().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let max: usize = std::env::var("ODDKH_ACCEPTANCE_MAX_CROSSINGS").ok().and_then(|v| v.parse().ok()).unwrap_or(11);
    let table = KnotTable::bundled();

    let start = Instant::now();
    let records: Vec<&KnotRecord> = table.up_to(max).collect();
    let corpus: Vec<Entry> = records.par_iter().map(|r| entry(r)).collect();
    println!("corpus: {} knots through {max} crossings in {:.1}s", corpus.len(), start.elapsed().as_secs_f64());

    let criteria: Vec<Criterion> = vec![
        ("1 published polynomials", Box::new(|| published_polynomials(&table))),
        ("2 rank comparison table", Box::new(|| rank_table(&table))),
        ("3 trefoil ranks", Box::new(|| trefoil_ranks(&table))),
        ("4 Euler characteristic is Jones", Box::new(|| euler_is_jones(&corpus))),
        ("5 mod-2 agreement", Box::new(|| mod2_agreement(&corpus))),
        ("6 reduced splitting", Box::new(|| splitting(&corpus))),
        ("7 alternating thinness and agreement", Box::new(|| alternating(&table, &corpus))),
        ("8 9_42 field sensitivity", Box::new(|| nine_42(&table))),
        ("9 property suites", Box::new(|| property_suite(&table))),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
