use bifiltered::gen;
use bifiltered::monodromy::*;
use bifiltered::subquotient::enumerate_span;
use bifiltered::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// gr dimension at weight k predicted by Jordan block sizes.
fn block_count(sizes: &[usize], k: i64) -> usize {
    sizes
        .iter()
        .filter(|&&s| {
            let s = s as i64;
            s > k.abs() && (k - (s - 1)).rem_euclid(2) == 0
        })
        .count()
}

fn gr_dims(m: &Filtration, lo: i64, hi: i64) -> Vec<usize> {
    (lo..=hi).map(|k| m.gr(k).invariants().length()).collect()
}

#[test]
fn zero_operator() {
    let r = Ring::Rationals;
    let v = NilpotentOperator::new(Subquotient::free(r, 2), Matrix::zeros(r, 2, 2), OperatorKind::LogT).unwrap();
    let m = monodromy_filtration(&v, 0).unwrap();
    assert!(m.value(-1).is_zero());
    assert_eq!(m.value(0), v.space());
}

#[test]
fn jordan_three_over_f2() {
    let r = Ring::fp(2).unwrap();
    let v = NilpotentOperator::new(Subquotient::free(r, 3), gen::jordan_matrix(r, &[3]), OperatorKind::LogT).unwrap();
    let m = monodromy_filtration(&v, 0).unwrap();
    assert_eq!(m.jumps(), vec![-2, 0, 2]);
    assert_eq!(gr_dims(&m, -2, 2), vec![1, 0, 1, 0, 1]);
}

#[test]
fn jordan_two_one_over_q() {
    let r = Ring::Rationals;
    let v = NilpotentOperator::new(Subquotient::free(r, 3), gen::jordan_matrix(r, &[2, 1]), OperatorKind::LogT).unwrap();
    let m = monodromy_filtration(&v, 0).unwrap();
    assert_eq!(gr_dims(&m, -1, 1), vec![1, 1, 1]);
}

#[test]
fn random_operators_match_block_counts_and_centering() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for round in 0..150 {
        let ring = [Ring::fp(2).unwrap(), Ring::fp(3).unwrap(), Ring::Rationals][round % 3];
        let sizes = gen::jordan_type(6, &mut rng);
        let v = gen::nilpotent(ring, &sizes, &mut rng);
        let m = monodromy_filtration(&v, 0).unwrap();
        for k in -6..=6 {
            assert_eq!(m.gr(k).invariants().length(), block_count(&sizes, k), "sizes {sizes:?} k {k}");
        }
        let shifted = monodromy_filtration(&v, 3).unwrap();
        assert_eq!(shifted, m.shift(-3));
    }
}

/// All filtrations of F_2^n with values in `lo..=hi` (chains of subspaces).
fn all_chains(ring: Ring, n: usize, lo: i64, hi: i64) -> Vec<Filtration> {
    let space = Subquotient::free(ring, n);
    let mut subs: Vec<Subquotient> = Vec::new();
    for v in enumerate_span(&Matrix::identity(ring, n)) {
        for w in enumerate_span(&Matrix::identity(ring, n)) {
            let s = Subquotient::spanned(Matrix::from_rows(ring, n, vec![v.clone(), w.clone()]).unwrap(), Matrix::zeros(ring, 0, n)).unwrap();
            if !subs.contains(&s) {
                subs.push(s);
            }
        }
    }
    if !subs.contains(&space) {
        subs.push(space.clone());
    }
    let mut out = Vec::new();
    fn rec(k: i64, hi: i64, prev: &Subquotient, acc: &mut Vec<(i64, Subquotient)>, subs: &[Subquotient], space: &Subquotient, out: &mut Vec<Filtration>) {
        if k > hi {
            out.push(Filtration::chain(space, acc.clone()).unwrap());
            return;
        }
        for s in subs {
            if prev.is_sub(s) {
                acc.push((k, s.clone()));
                rec(k + 1, hi, s, acc, subs, space, out);
                acc.pop();
            }
        }
    }
    rec(lo, hi, &space.zero_sub(), &mut Vec::new(), &subs, &space, &mut out);
    out.dedup();
    out
}

#[test]
fn uniqueness_by_enumeration_dim_three() {
    let r = Ring::fp(2).unwrap();
    for sizes in [vec![3], vec![2, 1], vec![1, 1, 1], vec![2], vec![1, 1]] {
        let n: usize = sizes.iter().sum();
        let v = NilpotentOperator::new(Subquotient::free(r, n), gen::jordan_matrix(r, &sizes), OperatorKind::LogT).unwrap();
        let built = monodromy_filtration(&v, 0).unwrap();
        let valid: Vec<Filtration> =
            all_chains(r, n, -3, 2).into_iter().filter(|m| monodromy_axioms(&v, m, 0).is_none()).collect();
        let mut distinct: Vec<Filtration> = Vec::new();
        for m in valid {
            if !distinct.contains(&m) {
                distinct.push(m);
            }
        }
        assert_eq!(distinct.len(), 1, "sizes {sizes:?}");
        assert_eq!(distinct[0], built);
    }
}

#[test]
fn relative_trivial_base_is_absolute() {
    let r = Ring::Rationals;
    let v = NilpotentOperator::new(Subquotient::free(r, 3), gen::jordan_matrix(r, &[2, 1]), OperatorKind::LogT).unwrap();
    let w = Filtration::trivial(v.space(), 4);
    let abs = monodromy_filtration(&v, 4).unwrap();
    assert_eq!(verify_relative_monodromy(&v, &w, &abs).unwrap(), None);
    let found = relative_monodromy_search(&v, &w, SearchBudget::default()).unwrap().unwrap();
    assert_eq!(found, abs);
    let bad = abs.shift(-1);
    assert!(matches!(verify_relative_monodromy(&v, &w, &bad).unwrap(), Some(RelativeFailure::Graded { e: 1, .. })));
}

#[test]
fn key_lemma_generated_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for round in 0..80 {
        let ring = [Ring::fp(2).unwrap(), Ring::fp(3).unwrap()][round % 2];
        let (u, v, w, f, g) = gen::key_lemma_instance(ring, &mut rng);
        let rep = key_lemma_check(&u, &v, &w, &f, &g).unwrap();
        assert!(rep.hypotheses_hold(), "round {round}: {rep:?}");
        assert!(rep.conclusion, "round {round}");
    }
}
