use bifiltered::gen;
use bifiltered::spectral::{induced_filtration, spectral_sequence, Degeneration};
use bifiltered::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rings() -> Vec<Ring> {
    vec![Ring::fp(2).unwrap(), Ring::zmod(2, 2).unwrap(), Ring::Integers, Ring::Rationals]
}

#[test]
fn trivial_filtration_degenerates_at_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let c = gen::filtered_complex(Ring::Rationals, 3, 3, false, &mut rng);
    let plain = BifilteredComplex::new(
        c.ring(),
        c.lo(),
        c.terms().iter().map(|t| BifilteredModule::trivial(t.module().clone(), false)).collect(),
        c.diffs().to_vec(),
    )
    .unwrap();
    let ss = spectral_sequence(&plain, Which::First, 3).unwrap();
    assert_eq!(ss.degeneration, Degeneration::At(1));
    for n in plain.lo()..=plain.hi() {
        let h = plain.underlying().cohomology(n);
        assert_eq!(ss.page(1).unwrap().cell(0, n).unwrap().invariants(), h.invariants());
    }
}

#[test]
fn convergence_and_recursion_on_random_complexes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for round in 0..60 {
        let ring = rings()[round % 4];
        let c = gen::filtered_complex(ring, 3, 3, false, &mut rng);
        let ss = spectral_sequence(&c, Which::First, 4).unwrap();
        assert!(ss.page_recursion_holds(), "round {round}");
        let stable = ss.stable_page().unwrap();
        let ind = induced_filtration(&c, Which::First).unwrap();
        for n in c.lo()..=c.hi() {
            let mut from_pages = Invariants::zero_for(ring);
            for (&(p, q), m) in &stable.cells {
                if p + q == n {
                    from_pages = from_pages.plus(&m.invariants());
                    assert_eq!(m.invariants(), ss.limit[&(p, q)].invariants(), "round {round} cell ({p},{q})");
                }
            }
            assert_eq!(from_pages, ind.gr_invariants(ring, n), "round {round} degree {n}");
            assert_eq!(from_pages, ss.limit_invariants(n));
        }
    }
}
