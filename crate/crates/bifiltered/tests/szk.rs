use bifiltered::spectral::{induced_filtration, spectral_sequence};
use bifiltered::szk::{cech_module, IncidenceData, StratumData, SzkComplex};
use bifiltered::{Ring, Which};

fn mgon(m: usize) -> SzkComplex {
    let inc = IncidenceData::cycle(m).unwrap();
    let strat = StratumData::curves(Ring::Rationals, &inc).unwrap();
    SzkComplex::build_direct(&inc, &strat).unwrap()
}

#[test]
fn cech_ranks_of_a_cycle() {
    let inc = IncidenceData::cycle(5).unwrap();
    let strat = StratumData::points(Ring::zmod(2, 2).unwrap(), &inc).unwrap();
    assert_eq!(cech_module(&inc, &strat, 0, 0, 0).module.ambient(), 5);
    assert_eq!(cech_module(&inc, &strat, 1, 0, 0).module.ambient(), 5);
    assert_eq!(cech_module(&inc, &strat, 2, 0, 0).module.ambient(), 0);
    assert_eq!(cech_module(&inc, &strat, 0, 1, 0).module.ambient(), 0);
}

#[test]
fn mgon_first_page_and_degeneration() {
    for m in [3, 5] {
        let a = mgon(m);
        let ss = spectral_sequence(a.complex(), Which::First, 3).unwrap();
        let e1 = ss.page(1).unwrap();
        for (&(p, q), cell) in &e1.cells {
            let expected = if [(0, 0), (1, 0), (-1, 2), (0, 2)].contains(&(p, q)) { m } else { 0 };
            assert_eq!(cell.invariants().length(), expected, "E_1 at ({p},{q})");
        }
        assert!(ss.degenerates_at(2));
        let h = induced_filtration(a.complex(), Which::First).unwrap();
        assert_eq!(h.gr(1, 0).invariants().length(), 1);
        assert_eq!(h.gr(1, 2).invariants().length(), 1);
        assert_eq!(h.gr(1, 1).invariants().length(), 0);
        for q in 0..=2 {
            let report = a.monodromy_weight_check(q).unwrap();
            assert!(report.passes(), "q = {q}: {report:?}");
        }
    }
}

#[test]
fn zeroed_gysin_breaks_the_weight_check() {
    let inc = IncidenceData::cycle(4).unwrap();
    let strat = StratumData::curves(Ring::Rationals, &inc).unwrap().without_gysin();
    let a = SzkComplex::build_direct(&inc, &strat).unwrap();
    let h = induced_filtration(a.complex(), Which::First).unwrap();
    assert_eq!(h.gr(1, 2).invariants().length(), 4);
    assert!(!a.monodromy_weight_check(1).unwrap().passes());
}

use bifiltered::complex::{is_quasi_isomorphism, BifilteredComplex};
use bifiltered::filtration::BifilteredModule;
use bifiltered::resolution::derived_tensor;
use bifiltered::subquotient::ModMorphism;
use bifiltered::szk::build_md;
use bifiltered::tensor_hom::tensor_filtered;
use bifiltered::{gen, Complex, Invariants, Matrix, Subquotient};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rings() -> [Ring; 3] {
    [Ring::Rationals, Ring::fp(3).unwrap(), Ring::zmod(2, 2).unwrap()]
}

#[test]
fn homotopy_identity_on_generated_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut nontrivial = 0;
    for i in 0..24 {
        let ring = rings()[i % 3];
        let (k, t) = gen::explicit_t(ring, 3, &mut rng);
        if t.iter().any(|m| *m != Matrix::identity(ring, m.rows())) {
            nontrivial += 1;
        }
        let a = SzkComplex::build_explicit(&k, &t).unwrap();
        assert_eq!(a.homotopy_failure().unwrap(), None, "instance {i}");
        assert!(a.inclusion_is_qis().unwrap(), "instance {i}");
    }
    assert!(nontrivial >= 12, "only {nontrivial} instances with T != 1");
}

#[test]
fn explicit_mode_rejects_nontrivial_monodromy_on_cohomology() {
    let ring = Ring::Rationals;
    let k = Complex::new(ring, 0, vec![Subquotient::free(ring, 1)], vec![]).unwrap();
    let t = vec![Matrix::from_i64(ring, 1, &[&[2]])];
    assert!(SzkComplex::build_explicit(&k, &t).is_err());
}

#[test]
fn direct_mode_has_no_t() {
    let a = mgon(3);
    assert!(matches!(a.nu(0), Err(bifiltered::Error::TNotAvailable)));
}

fn shifts_as_expected(a: &SzkComplex) {
    let c = a.complex();
    for n in c.lo()..=c.hi() {
        let t = c.term(n);
        let nu = ModMorphism::new(t.module().clone(), t.module().clone(), a.nu_tilde(n)).unwrap();
        for k in -a.k0()..=a.k0() {
            assert!(nu.image_of(t.p1().value(k)).is_sub(t.p1().value(k - 2)));
            let pd = t.p2().unwrap();
            assert!(nu.image_of(pd.value(k)).is_sub(pd.value(k)));
        }
    }
}

#[test]
fn nu_tilde_lowers_p_by_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    shifts_as_expected(&mgon(4));
    for _ in 0..5 {
        let inc = gen::nerve(3, 2, false, &mut rng);
        let strat = StratumData::points(Ring::fp(2).unwrap(), &inc).unwrap();
        shifts_as_expected(&SzkComplex::build_direct(&inc, &strat).unwrap());
        let (k, t) = gen::explicit_t(Ring::Rationals, 2, &mut rng);
        shifts_as_expected(&SzkComplex::build_explicit(&k, &t).unwrap());
    }
}

fn bounds_hold(a: &SzkComplex) -> bool {
    let c = a.complex();
    let k0 = a.k0();
    let top = c.step_complex(Which::First, k0);
    let whole = c.underlying();
    let inclusions: Vec<Matrix> = (c.lo()..=c.hi()).map(|n| Matrix::identity(a.ring(), c.term(n).module().ambient())).collect();
    is_quasi_isomorphism(&top, &whole, &inclusions) && c.step_complex(Which::First, -k0).is_exact()
}

#[test]
fn weight_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    assert!(bounds_hold(&mgon(5)));
    for i in 0..10 {
        let inc = gen::nerve(3, 2, i % 2 == 0, &mut rng);
        let strat = if i % 2 == 0 {
            StratumData::curves(Ring::Rationals, &inc).unwrap()
        } else {
            StratumData::points(Ring::zmod(3, 2).unwrap(), &inc).unwrap()
        };
        assert!(bounds_hold(&SzkComplex::build_direct(&inc, &strat).unwrap()), "nerve {i}");
    }
}

#[test]
fn edge_morphisms_match_in_cell_bases() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut fixtures = vec![mgon(3), mgon(5)];
    for i in 0..6 {
        let inc = gen::nerve(3, 2, i % 2 == 0, &mut rng);
        let strat = if i % 2 == 0 {
            StratumData::curves(Ring::Rationals, &inc).unwrap()
        } else {
            StratumData::points(Ring::Rationals, &inc).unwrap()
        };
        fixtures.push(SzkComplex::build_direct(&inc, &strat).unwrap());
    }
    for a in &fixtures {
        for which in [Which::First, Which::Second] {
            let cmp = a.compare_edge(which).unwrap();
            assert_eq!(cmp.sign, Some(1), "{which:?}: {cmp:?}");
        }
    }
}

#[test]
fn explicit_mode_has_no_cell_basis() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (k, t) = gen::explicit_t(Ring::Rationals, 2, &mut rng);
    let a = SzkComplex::build_explicit(&k, &t).unwrap();
    assert!(matches!(a.compare_edge(Which::First), Err(bifiltered::Error::BasisMatchFailed(_))));
}

fn h_invariants(c: &Complex) -> Vec<(i64, Invariants)> {
    c.cohomology_invariants().into_iter().filter(|(_, i)| !i.is_zero()).collect()
}

fn free_sum(ring: Ring, ranks: &std::collections::BTreeMap<i64, usize>) -> Vec<(i64, Invariants)> {
    ranks.iter().filter(|(_, &r)| r > 0).map(|(&n, &r)| (n, Subquotient::free(ring, r).invariants())).collect()
}

/// `H^n(gr^P_k A) = ⊕_{j >= max(0,-k), 2j+k = n} H^{n+1}(MF)`, from the
/// mapping fiber alone.
#[test]
fn graded_pieces_of_p_in_explicit_mode() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for i in 0..12 {
        let ring = rings()[i % 3];
        let (k, t) = gen::explicit_t(ring, 3, &mut rng);
        let mf = bifiltered::szk::mapping_fiber_t(&k, &t).unwrap();
        let a = SzkComplex::build_explicit(&k, &t).unwrap();
        for level in -a.k0()..=a.k0() {
            let lhs = h_invariants(&a.complex().gr_single(Which::First, level));
            let mut rhs = Vec::new();
            for n in a.complex().lo()..=a.complex().hi() {
                let j2 = n - level;
                if j2 % 2 != 0 || j2 / 2 < 0.max(-level) {
                    continue;
                }
                let h = mf.cohomology(n + 1).invariants();
                if !h.is_zero() {
                    rhs.push((n, h));
                }
            }
            assert_eq!(lhs, rhs, "instance {i}, level {level}");
        }
    }
}

/// Both graded pieces against Čech ranks of the strata, and `gr^{P^D}_k`
/// against the complexes rebuilt on each `D_B` with `|B| = k`.
#[test]
fn graded_pieces_in_direct_mode() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for i in 0..50 {
        let nx = rng.gen_range(1..=4);
        let nd = rng.gen_range(0..=3);
        let curves = i % 3 == 0;
        let inc = gen::nerve(nx, nd, curves, &mut rng);
        let ring = if i % 2 == 0 { Ring::Rationals } else { Ring::zmod(2, 2).unwrap() };
        let strat = if curves { StratumData::curves(ring, &inc) } else { StratumData::points(ring, &inc) }.unwrap();
        let a = SzkComplex::build_direct(&inc, &strat).unwrap();
        let c = a.complex();
        let k0 = a.k0();
        for kd in 0..=inc.max_d() as i64 {
            for k in -k0..=k0 {
                let lhs = h_invariants(&c.gr_complex(k, kd));
                let mut ranks = std::collections::BTreeMap::new();
                for n in c.lo()..=c.hi() {
                    let mut total = 0;
                    for j in 0.max(kd - k)..=k0 {
                        let kx = 2 * j + k - kd;
                        if kx < 0 {
                            continue;
                        }
                        total += cech_module(&inc, &strat, kx as usize, kd as usize, n - 2 * j - k).module.ambient();
                    }
                    ranks.insert(n, total);
                }
                assert_eq!(lhs, free_sum(ring, &ranks), "nerve {i}, gr^P_{k} gr^PD_{kd}");
            }
            let lhs = h_invariants(&c.gr_single(Which::Second, kd));
            let mut sum: std::collections::BTreeMap<i64, Invariants> = std::collections::BTreeMap::new();
            for b in inc.d_strata().into_iter().filter(|b| b.len() as i64 == kd) {
                let sub = SzkComplex::build_direct(&inc.restrict_to(&b).unwrap(), &strat.restrict_to(&b)).unwrap();
                for (n, h) in h_invariants(&sub.complex().underlying()) {
                    let e = sum.entry(n + kd).or_insert_with(|| Invariants::zero_for(ring));
                    *e = e.plus(&h);
                }
            }
            let rhs: Vec<_> = sum.into_iter().filter(|(_, h)| !h.is_zero()).collect();
            assert_eq!(lhs, rhs, "nerve {i}, gr^PD_{kd}");
        }
    }
}

fn gr_gr(c: &BifilteredComplex, lo: i64, hi: i64, k0: i64) -> Vec<(i64, i64, i64, Invariants)> {
    let mut out = Vec::new();
    for k in -k0..=k0 {
        for kd in 0..=k0 {
            let g = c.gr_complex(k, kd);
            for n in lo..=hi {
                let h = g.cohomology(n).invariants();
                if !h.is_zero() {
                    out.push((k, kd, n, h));
                }
            }
        }
    }
    out
}

#[test]
fn reduction_mod_lower_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for i in 0..20 {
        let l = [2, 3][i % 2];
        let n = [1, 2][(i / 2) % 2];
        let inc = gen::nerve(rng.gen_range(1..=3), rng.gen_range(0..=1), i % 4 < 2, &mut rng);
        let big = Ring::zmod(l, n + 1).unwrap();
        let small = Ring::zmod(l, n).unwrap();
        let model = |r| if i % 4 < 2 { StratumData::curves(r, &inc) } else { StratumData::points(r, &inc) };
        let a_big = SzkComplex::build_direct(&inc, &model(big).unwrap()).unwrap();
        let a_small = SzkComplex::build_direct(&inc, &model(small).unwrap()).unwrap();
        let c = a_big.complex();
        let quotient = Subquotient::free_quotient(Matrix::from_rows(big, 1, vec![vec![big.from_int((l as i64).pow(n))]]).unwrap());
        let coeff = BifilteredComplex::concentrated(BifilteredModule::trivial(quotient, true), 0);
        let depth = (c.hi() - c.lo() + 2) as usize;
        let t = derived_tensor(c, &coeff, depth).unwrap();
        let k0 = a_big.k0();
        assert!(t.horizon < c.lo());
        assert_eq!(gr_gr(&t.complex, c.lo(), c.hi(), k0), gr_gr(a_small.complex(), c.lo(), c.hi(), k0), "instance {i}");
    }
}

#[test]
fn horizontal_complex_examples() {
    let ring = Ring::Rationals;
    let none = IncidenceData::from_maximal(1, 0, &[]).unwrap();
    let m = build_md(ring, &none).unwrap();
    assert_eq!(m.lo(), 0);
    assert_eq!(m.hi(), 0);
    assert_eq!(m.term(0).module().ambient(), 1);
    let one = IncidenceData::from_maximal(1, 1, &[(vec![0], vec![0])]).unwrap();
    let m = build_md(ring, &one).unwrap();
    assert_eq!(m.gr_single(Which::First, 0).cohomology(0).invariants().length(), 1);
    assert_eq!(m.gr_single(Which::First, 1).cohomology(1).invariants().length(), 1);
    let two = IncidenceData::from_maximal(1, 2, &[(vec![0], vec![0, 1])]).unwrap();
    let m = build_md(ring, &two).unwrap();
    assert_eq!(m.gr_single(Which::First, 2).cohomology(2).invariants().length(), 1);
}

/// Adding a filtered acyclic summand to the horizontal complex does not
/// change the graded pieces of the tensor product.
#[test]
fn horizontal_model_choice_is_invisible() {
    let ring = Ring::Rationals;
    let inc = IncidenceData::from_maximal(2, 1, &[(vec![0, 1], vec![]), (vec![0], vec![0])]).unwrap();
    let ax = SzkComplex::build_direct(&inc.restrict_to(&[]).unwrap(), &StratumData::points(ring, &inc).unwrap().restrict_to(&[]))
        .unwrap();
    let md = build_md(ring, &inc).unwrap();
    let r = Subquotient::free(ring, 1);
    let lvl = |at| bifiltered::Filtration::trivial(&r, at);
    let piece = BifilteredModule::new(r.clone(), lvl(1), Some(lvl(1))).unwrap();
    let cone = BifilteredComplex::new(ring, 0, vec![piece.clone(), piece], vec![Matrix::identity(ring, 1)]).unwrap();
    let padded_terms: Vec<_> = (0..=md.hi()).map(|q| md.term(q).direct_sum(&cone.term(q))).collect();
    let padded_diffs = (0..md.hi()).map(|q| md.diff(q).block_diag(&cone.diff(q))).collect();
    let padded = BifilteredComplex::new(ring, 0, padded_terms, padded_diffs).unwrap();
    let one = tensor_filtered(ax.complex(), &md).unwrap();
    let other = tensor_filtered(ax.complex(), &padded).unwrap();
    let lo = one.lo().min(other.lo());
    let hi = one.hi().max(other.hi());
    assert_eq!(gr_gr(&one, lo, hi, 6), gr_gr(&other, lo, hi, 6));
}
