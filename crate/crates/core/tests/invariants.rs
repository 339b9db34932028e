//! Cross-module invariants of the extremal searches.

use std::sync::Arc;

use fdslab::coding::LinearCode;
use fdslab::fds::{AffineFds, FdsFile, LoadedFds};
use fdslab::ffield::{Field, Matrix};
use fdslab::optimize::{self, Certificate, SearchBudget, Witness};
use fdslab::verify;
use fdslab::Digraph;
use proptest::prelude::*;

fn fam(s: &str) -> Digraph {
    Digraph::family(s).unwrap()
}

const SMALL: [&str; 6] = ["K:2", "K:3", "Cdir:3", "Cdir:4", "Kbip:1,2", "Cund:4"];

#[test]
fn instability_sits_between_packing_and_feedback_numbers() {
    for s in SMALL {
        let d = fam(s);
        let (nu, tau) = (d.cycle_packing().unwrap().0, d.feedback_vertex_number().unwrap().0);
        let i = optimize::instability(&d, 2, &SearchBudget::exhaustive()).unwrap().value.raw() as usize;
        let st = optimize::stability(&d, 2, &SearchBudget::exhaustive()).unwrap().value.raw() as usize;
        assert!(nu <= i && i <= tau, "{s}: {nu} {i} {tau}");
        assert!(st + i <= d.n(), "{s}");
    }
}

#[test]
fn monotone_in_alphabet() {
    for s in ["K:2", "Cdir:3", "Cdir:4", "Kbip:1,2"] {
        let d = fam(s);
        let ex = SearchBudget::exhaustive();
        let i2 = optimize::instability(&d, 2, &ex).unwrap().value.raw();
        let i3 = optimize::instability(&d, 3, &ex).unwrap().value.raw();
        let s2 = optimize::stability(&d, 2, &ex).unwrap().value.raw();
        let s3 = optimize::stability(&d, 3, &ex).unwrap().value.raw();
        assert!(i2 <= i3 && s2 >= s3, "{s}: i {i2} {i3}, s {s2} {s3}");
    }
}

#[test]
fn affine_instability_matches_enumerated_covering_radii() {
    let field = Arc::new(Field::new(2).unwrap());
    for s in ["Cdir:3", "K:3", "Cund:4", "Kbip:1,2"] {
        let d = fam(s);
        let arcs: Vec<(usize, usize)> = d.arcs().collect();
        let mut best_i = 0;
        let mut best_s = 0;
        for mask in 0u32..1 << arcs.len() {
            let mut m = Matrix::zeros(d.n(), d.n());
            for (k, &(u, v)) in arcs.iter().enumerate() {
                m.set(u, v, mask >> k & 1);
            }
            let f = AffineFds::new(field.clone(), m, vec![0; d.n()]).unwrap().tabulate().unwrap();
            let code = f.guessing_code();
            best_i = best_i.max(code.covering_radius().unwrap());
            best_s = best_s.max(d.n() - code.remoteness().unwrap());
        }
        let ri = optimize::affine_instability(&d, 2, &SearchBudget::exhaustive()).unwrap();
        let rs = optimize::affine_stability(&d, 2, &SearchBudget::exhaustive()).unwrap();
        assert_eq!(ri.value.raw() as usize, best_i, "{s}");
        assert_eq!(rs.value.raw() as usize, best_s, "{s}");
        for r in [&ri, &rs] {
            let Some(Witness::Affine(a)) = &r.witness else { panic!() };
            let m = a.tabulate().unwrap().metrics();
            let got = if r.quantity == optimize::Quantity::Iaff { m.i } else { m.s };
            assert_eq!(got as u128, r.value.raw());
        }
    }
}

#[test]
fn verify_suites_pass() {
    for s in verify::Suite::PUBLIC {
        let out = verify::run(s).unwrap();
        assert!(out.passed(), "{}: {:?}", s.name(), out.first_failure());
    }
}

#[test]
fn witnesses_survive_the_file_format() {
    let d = fam("Cund:4");
    for r in [
        optimize::stability(&d, 2, &SearchBudget::exhaustive()).unwrap(),
        optimize::affine_instability(&d, 3, &SearchBudget::default()).unwrap(),
    ] {
        let w = r.witness.unwrap();
        let text = w.to_file().to_json();
        let back = FdsFile::from_json(&text).unwrap().load().unwrap();
        match (w, back) {
            (Witness::Table(a), LoadedFds::Table(b)) => assert_eq!(a.table(), b.table()),
            (Witness::Affine(a), LoadedFds::Affine(b)) => assert_eq!(a, b),
            _ => panic!("witness kind changed"),
        }
    }
}

#[test]
fn seeded_searches_repeat() {
    let d = fam("Cund:5");
    let b = SearchBudget { trials: 300, ..SearchBudget::randomized(300, 9) };
    let a1 = optimize::instability(&d, 3, &b).unwrap();
    let a2 = optimize::instability(&d, 3, &b).unwrap();
    assert_eq!(a1, a2);
    assert!(matches!(a1.certified, Certificate::LowerBound | Certificate::UpperBoundMatched));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linear_equivalence(seed in any::<u64>(), q in prop::sample::select(vec![2u64, 3, 4])) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=4usize);
        let field = Arc::new(Field::new(q).unwrap());
        let mut m = Matrix::zeros(n, n);
        for u in 0..n {
            for v in 0..n {
                if u != v && rng.gen_bool(0.5) {
                    m.set(u, v, rng.gen_range(0..q as u32));
                }
            }
        }
        let rank = m.minus_identity(&field).rank(&field);
        let f = AffineFds::new(field.clone(), m.clone(), vec![0; n]).unwrap().tabulate().unwrap();
        prop_assert_eq!(f.guessing_dimension().count, (q as u128).pow(rank as u32));
        prop_assert_eq!(f.metrics().g.count, (q as u128).pow((n - rank) as u32));
        let code = LinearCode::from_generator(field, &m.minus_identity(&Field::new(q).unwrap()));
        prop_assert_eq!(code.dimension(), rank);
    }
}
