//! Brute-force reference computations shared by the property and acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use bifiltered::complex::{is_quasi_isomorphism, FilteredMorphism};
use bifiltered::filtration::Level;
use bifiltered::subquotient::enumerate_span;
use bifiltered::*;

/// Smallest representative of `v + span(rels)`.
fn canonical(ring: Ring, v: &[Scalar], rel_span: &[Vec<Scalar>]) -> Vec<Scalar> {
    rel_span
        .iter()
        .map(|r| v.iter().zip(r).map(|(a, b)| ring.add(a, b)).collect::<Vec<_>>())
        .min()
        .expect("span contains zero")
}

fn image_set(ring: Ring, vectors: &[Vec<Scalar>], m: &Matrix, rel_span: &[Vec<Scalar>]) -> BTreeSet<Vec<Scalar>> {
    vectors.iter().map(|x| canonical(ring, &m.apply(x), rel_span)).collect()
}

/// Strictness of `m` at one pair of steps, by listing every element.
fn strict_at(source: &Subquotient, target: &Subquotient, whole: &Subquotient, m: &Matrix) -> bool {
    let ring = m.ring();
    let rels = enumerate_span(target.rels());
    let got = image_set(ring, &enumerate_span(source.gens()), m, &rels);
    let all = image_set(ring, &enumerate_span(whole.gens()), m, &rels);
    let allowed: BTreeSet<Vec<Scalar>> = enumerate_span(target.gens()).iter().map(|y| canonical(ring, y, &rels)).collect();
    let expected: BTreeSet<_> = all.intersection(&allowed).cloned().collect();
    got == expected
}

fn window(a: &Filtration, b: &Filtration) -> Vec<i64> {
    let mut ks: Vec<i64> = a.breakpoints().into_iter().chain(b.breakpoints()).collect();
    ks.sort_unstable();
    let lo = ks.first().copied().unwrap_or(0) - 1;
    let hi = ks.last().copied().unwrap_or(0) + 1;
    (lo..=hi).collect()
}

/// Is `m` strict for the selected filtration (or both, intersected)?
pub fn strict_by_enumeration(source: &BifilteredModule, target: &BifilteredModule, m: &Matrix, which: Option<Which>) -> bool {
    let whole = source.module();
    let (s1, t1) = (source.p1(), target.p1());
    let (s2, t2) = (source.p2().expect("two"), target.p2().expect("two"));
    match which {
        Some(Which::First) => window(s1, t1).into_iter().all(|k| strict_at(s1.value(k), t1.value(k), whole, m)),
        Some(Which::Second) => window(s2, t2).into_iter().all(|k| strict_at(s2.value(k), t2.value(k), whole, m)),
        None => window(s1, t1).into_iter().all(|a| {
            window(s2, t2).into_iter().all(|b| {
                let src = s1.value(a).intersect(s2.value(b)).unwrap();
                let tgt = t1.value(a).intersect(t2.value(b)).unwrap();
                strict_at(&src, &tgt, whole, m)
            })
        }),
    }
}

fn bifiltered_window(f: &FilteredMorphism) -> (Vec<i64>, Vec<i64>) {
    let (a1, a2) = f.source().breakpoints();
    let (b1, b2) = f.target().breakpoints();
    let span = |x: Vec<i64>, y: Vec<i64>| {
        let all: Vec<i64> = x.into_iter().chain(y).collect();
        let lo = all.iter().copied().min().unwrap_or(0) - 1;
        let hi = all.iter().copied().max().unwrap_or(0) + 1;
        (lo..=hi).collect::<Vec<_>>()
    };
    (span(a1, b1), span(a2, b2))
}

/// Quasi-isomorphism on the total complexes and on every intersection of steps.
pub fn qis_direct(f: &FilteredMorphism) -> bool {
    let (r1, r2) = bifiltered_window(f);
    let lo = f.source().lo().min(f.target().lo());
    let maps: Vec<Matrix> = (lo..=f.source().hi().max(f.target().hi())).map(|q| f.map(q)).collect();
    let s = f.source().extend_to(lo, lo);
    let t = f.target().extend_to(lo, lo);
    if !is_quasi_isomorphism(&s.underlying(), &t.underlying(), &maps) {
        return false;
    }
    r1.iter().all(|&a| {
        r2.iter().all(|&b| {
            let lvl = Level::Both(a, b);
            is_quasi_isomorphism(&s.level_complex(lvl), &t.level_complex(lvl), &maps)
        })
    }) && r1.iter().all(|&a| is_quasi_isomorphism(&s.level_complex(Level::First(a)), &t.level_complex(Level::First(a)), &maps))
        && r2.iter().all(|&b| is_quasi_isomorphism(&s.level_complex(Level::Second(b)), &t.level_complex(Level::Second(b)), &maps))
}

/// Every `gr_a gr_b` of the map is a quasi-isomorphism.
pub fn qis_graded(f: &FilteredMorphism) -> bool {
    let (r1, r2) = bifiltered_window(f);
    let lo = f.source().lo().min(f.target().lo());
    let maps: Vec<Matrix> = (lo..=f.source().hi().max(f.target().hi())).map(|q| f.map(q)).collect();
    let s = f.source().extend_to(lo, lo);
    let t = f.target().extend_to(lo, lo);
    r1.iter().all(|&a| r2.iter().all(|&b| is_quasi_isomorphism(&s.gr_complex(a, b), &t.gr_complex(a, b), &maps)))
}

/// Invariants of `A ⊗ B` from those of `A` and `B`.
pub fn tensor_invariants(ring: Ring, a: &Invariants, b: &Invariants) -> Invariants {
    match (a, b) {
        (Invariants::Local { prime, exponents: x }, Invariants::Local { exponents: y, .. }) => {
            let mut e: Vec<u32> = x.iter().flat_map(|&i| y.iter().map(move |&j| i.min(j))).collect();
            e.sort_unstable_by(|p, q| q.cmp(p));
            Invariants::Local { prime: *prime, exponents: e }
        }
        (Invariants::Vector { dim: x }, Invariants::Vector { dim: y }) => Invariants::Vector { dim: x * y },
        _ => panic!("tensor oracle covers Z/l^n, F_l and Q only ({ring:?})"),
    }
}

/// `⊕_{p+q=k1, s+t=k2} gr_p gr_s(e) ⊗ gr_q gr_t(f)` over the given window.
pub fn graded_tensor(e: &BifilteredModule, f: &BifilteredModule, k1: i64, k2: i64, lo: i64, hi: i64) -> Invariants {
    let ring = e.module().ring();
    let mut acc = Invariants::zero_for(ring);
    for p in lo..=hi {
        for s in lo..=hi {
            let left = e.gr(p, s).invariants();
            if left.is_zero() {
                continue;
            }
            let right = f.gr(k1 - p, k2 - s).invariants();
            acc = acc.plus(&tensor_invariants(ring, &left, &right));
        }
    }
    acc
}

/// `gr` of the filtration induced on `H^n` by the steps of `which`, summed
/// over all weights, from cycles and boundaries directly.
pub fn induced_gr_total(c: &BifilteredComplex, which: Which, n: i64) -> Invariants {
    let ring = c.ring();
    let total = c.underlying();
    let z = total.cycles(n);
    let b = total.boundaries(n);
    let image = |k: i64| -> Subquotient {
        let step = c.step_complex(which, k).term(n);
        z.intersect(&step).unwrap().sum(&b).unwrap()
    };
    let f = c.terms().iter().filter_map(|t| t.filtration(which)).flat_map(|f| f.breakpoints()).collect::<Vec<_>>();
    let lo = f.iter().copied().min().unwrap_or(0) - 1;
    let hi = f.iter().copied().max().unwrap_or(0) + 1;
    let mut acc = Invariants::zero_for(ring);
    for k in lo..=hi {
        acc = acc.plus(&image(k).quotient(&image(k - 1)).unwrap().invariants());
    }
    acc
}
