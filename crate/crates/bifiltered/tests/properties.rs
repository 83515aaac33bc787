mod oracle;

use bifiltered::filtration::{is_strict, is_strict_single};
use bifiltered::linalg::{normal_form, row_space_le};
use bifiltered::monodromy::{monodromy_axioms, monodromy_filtration};
use bifiltered::spectral::{induced_filtration, spectral_sequence};
use bifiltered::szk::{IncidenceData, StratumData, SzkComplex};
use bifiltered::tensor_hom::tensor_modules;
use bifiltered::twist::d_twist;
use bifiltered::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ring_from(i: usize) -> Ring {
    [Ring::fp(2).unwrap(), Ring::zmod(2, 2).unwrap(), Ring::fp(3).unwrap(), Ring::zmod(3, 2).unwrap(), Ring::Integers, Ring::Rationals][i % 6]
}

fn finite_ring(i: usize) -> Ring {
    ring_from(i % 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn normal_form_is_idempotent_and_keeps_the_row_space(seed in any::<u64>(), r in 0usize..6, rows in 0usize..5, cols in 1usize..5) {
        let ring = ring_from(r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = gen::matrix(ring, rows, cols, &mut rng);
        let nf = normal_form(&m);
        prop_assert_eq!(normal_form(&nf), nf.clone());
        prop_assert!(row_space_le(&m, &nf) && row_space_le(&nf, &m));
    }

    #[test]
    fn quotient_sizes_multiply(seed in any::<u64>(), r in 0usize..4) {
        let ring = finite_ring(r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = gen::bifiltered_module(ring, 4, false, &mut rng).module().clone();
        let n = gen::submodule(&m, 2, &mut rng);
        let q = m.quotient(&n).unwrap();
        prop_assert_eq!(m.cardinality().unwrap(), n.cardinality().unwrap() * q.cardinality().unwrap());
    }

    #[test]
    fn strictness_matches_enumeration(seed in any::<u64>(), r in 0usize..2) {
        let ring = finite_ring(r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, t, m) = gen::injective(ring, 3, &mut rng);
        let both = is_strict(&s, &t, &m).unwrap();
        prop_assert_eq!(both, oracle::strict_by_enumeration(&s, &t, &m, None));
        for w in [Which::First, Which::Second] {
            prop_assert_eq!(is_strict_single(&s, &t, &m, w).unwrap(), oracle::strict_by_enumeration(&s, &t, &m, Some(w)));
        }
    }

    #[test]
    fn graded_pieces_of_a_tensor_product(seed in any::<u64>(), r in 0usize..2) {
        let ring = [Ring::zmod(2, 2).unwrap(), Ring::fp(3).unwrap()][r];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = gen::bifiltered_module(ring, 3, true, &mut rng);
        let f = gen::split_free(ring, 3, true, &mut rng);
        let t = tensor_modules(&e, &f).unwrap();
        for k1 in -5..=3 {
            for k2 in -5..=3 {
                prop_assert_eq!(t.gr(k1, k2).invariants(), oracle::graded_tensor(&e, &f, k1, k2, -3, 2));
            }
        }
    }

    #[test]
    fn limit_page_matches_induced_filtration(seed in any::<u64>(), r in 0usize..6) {
        let ring = ring_from(r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = gen::filtered_complex(ring, 3, 3, false, &mut rng);
        let ss = spectral_sequence(&c, Which::First, 4).unwrap();
        let stable = ss.stable_page().unwrap();
        for n in c.lo()..=c.hi() {
            let mut pages = Invariants::zero_for(ring);
            for (&(p, q), cell) in &stable.cells {
                if p + q == n {
                    pages = pages.plus(&cell.invariants());
                }
            }
            prop_assert_eq!(pages.clone(), oracle::induced_gr_total(&c, Which::First, n));
            prop_assert_eq!(pages, induced_filtration(&c, Which::First).unwrap().gr_invariants(ring, n));
        }
    }

    #[test]
    fn bifiltered_qis_agrees_with_graded_criterion(seed in any::<u64>(), r in 0usize..4) {
        let ring = finite_ring(r);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = gen::filtered_morphism(ring, 3, 3, true, &mut rng);
        prop_assume!(f.source().is_biregular() && f.target().is_biregular());
        let direct = oracle::qis_direct(&f);
        prop_assert_eq!(f.is_bifiltered_qis(), direct);
        prop_assert_eq!(f.is_gr_qis(), oracle::qis_graded(&f));
        prop_assert_eq!(direct, f.is_gr_qis());
    }

    #[test]
    fn monodromy_filtration_satisfies_its_axioms(seed in any::<u64>(), r in 0usize..3, center in -2i64..=2) {
        let ring = [Ring::fp(2).unwrap(), Ring::fp(3).unwrap(), Ring::Rationals][r];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sizes = gen::jordan_type(6, &mut rng);
        let v = gen::nilpotent(ring, &sizes, &mut rng);
        let m = monodromy_filtration(&v, center).unwrap();
        prop_assert_eq!(monodromy_axioms(&v, &m, center), None);
    }

    #[test]
    fn twisting_a_composite(a in -3i64..=3, b in -3i64..=3, deg in prop::sample::select(vec![1i64, 3, 5, 7])) {
        let ring = Ring::zmod(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(((a + 10) * 31 + b + 10) as u64);
        let f = gen::matrix(ring, 2, 2, &mut rng);
        let g = gen::matrix(ring, 2, 2, &mut rng);
        let d = ring.from_int(deg);
        let (tf, _) = d_twist(&f, a, &d, &[]).unwrap();
        let (tg, _) = d_twist(&g, b, &d, &[]).unwrap();
        let (tfg, tag) = d_twist(&f.mul(&g).unwrap(), a + b, &d, &[]).unwrap();
        prop_assert_eq!(tf.mul(&tg).unwrap(), tfg);
        prop_assert_eq!(tag.weight, a + b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn nerve_complexes_are_filtered_and_nu_tilde_is_nilpotent(seed in any::<u64>(), nx in 1usize..=3, nd in 0usize..=2, curves in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inc = gen::nerve(nx, nd, curves, &mut rng);
        let ring = Ring::Rationals;
        let strat = if curves { StratumData::curves(ring, &inc) } else { StratumData::points(ring, &inc) }.unwrap();
        let a = SzkComplex::build_direct(&inc, &strat).unwrap();
        prop_assert!(a.complex().is_bifiltered());
        let h = a.complex().underlying();
        for q in h.lo()..=h.hi() {
            let n = ModMorphism::new(h.cohomology(q), h.cohomology(q), a.nu_tilde(q)).unwrap();
            let mut power = n.clone();
            for _ in 1..a.columns().max(1) {
                power = power.compose(&n).unwrap();
            }
            prop_assert!(power.is_zero());
        }
    }

    #[test]
    fn edge_maps_on_random_nerves(seed in any::<u64>(), nx in 1usize..=3, nd in 0usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inc: IncidenceData = gen::nerve(nx, nd, false, &mut rng);
        let a = SzkComplex::build_direct(&inc, &StratumData::points(Ring::fp(3).unwrap(), &inc).unwrap()).unwrap();
        for which in [Which::First, Which::Second] {
            prop_assert_eq!(a.compare_edge(which).unwrap().sign, Some(1));
        }
    }
}
