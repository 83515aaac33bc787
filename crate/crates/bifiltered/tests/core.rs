use bifiltered::filtration::{is_strict, is_strict_single, Level};
use bifiltered::fixtures;
use bifiltered::resolution::{derived_tensor, specially_flat_resolution};
use bifiltered::special::{free_cover, special_flat, FlatPart, PartIndex};
use bifiltered::tensor_hom::{hom_complex, tensor_filtered};
use bifiltered::*;

fn zmod4() -> Ring {
    Ring::zmod(2, 2).unwrap()
}

#[test]
fn sum_map_strictness() {
    let s = fixtures::sum_map().unwrap();
    assert!(is_strict_single(&s.source, &s.target, &s.matrix, Which::First).unwrap());
    assert!(is_strict_single(&s.source, &s.target, &s.matrix, Which::Second).unwrap());
    assert!(!is_strict(&s.source, &s.target, &s.matrix).unwrap());
    let fail = filtration::strictness_failure(&s.source, &s.target, &s.matrix).unwrap();
    assert_eq!(fail, Some(Level::Both(0, 0)));
    assert!(s.source.intersect_steps(0, 0).is_zero());
}

#[test]
fn sum_sequence_exactness() {
    let c = fixtures::sum_sequence().unwrap();
    assert!(c.underlying().is_exact());
    assert!(c.single(Which::First).is_strictly_exact());
    assert!(c.single(Which::Second).is_strictly_exact());
    assert!(!c.is_strictly_exact());
    assert!(!c.level_complex(Level::Both(0, 0)).is_exact());
}

#[test]
fn gr_of_target_at_origin_is_n() {
    let s = fixtures::sum_map().unwrap();
    let g = s.target.gr(0, 0);
    assert_eq!(g.cardinality().unwrap(), 2.into());
}

fn point(ring: Ring) -> BifilteredComplex {
    let m = Subquotient::free(ring, 1);
    BifilteredComplex::concentrated(BifilteredModule::trivial(m, true), 0)
}

#[test]
fn tensor_with_unit() {
    let s = fixtures::sum_map().unwrap();
    let c = BifilteredComplex::concentrated(s.source.clone(), 0);
    let t = tensor_filtered(&c, &point(zmod4())).unwrap();
    assert!(t.term(0).module().is_isomorphic(c.term(0).module()));
    for (a, b) in [(0, 0), (1, 0), (0, 1), (1, 1), (-1, 0)] {
        assert!(t.term(0).gr(a, b).is_isomorphic(&c.term(0).gr(a, b)), "gr({a},{b})");
    }
}

#[test]
fn hom_from_unit() {
    let r = Ring::fp(2).unwrap();
    let two = BifilteredComplex::concentrated(BifilteredModule::trivial(Subquotient::free(r, 2), true), 0);
    let h = hom_complex(&point(r), &two).unwrap();
    assert_eq!(h.term(0).module().invariants(), Invariants::Local { prime: 2, exponents: vec![1, 1] });
}

#[test]
fn flat_with_one_part() {
    let r = zmod4();
    let part = FlatPart { index: PartIndex::First(0), module: Subquotient::free(r, 1) };
    let s = special_flat(r, &Subquotient::free(r, 1), &[part], false).unwrap();
    assert_eq!(s.module().ambient(), 2);
    assert!(s.p1().value(-1).is_zero());
    assert_eq!(s.p1().value(0).cardinality().unwrap(), 4.into());
    assert_eq!(s.p1().value(5).cardinality().unwrap(), 4.into());
}

#[test]
fn free_cover_is_strict_epi() {
    let s = fixtures::sum_map().unwrap();
    let (cov, map) = free_cover(&s.target).unwrap();
    let f = ModMorphism::new(cov.module().clone(), s.target.module().clone(), map.clone()).unwrap();
    assert!(f.is_surjective());
    assert!(is_strict(&cov, &s.target, &map).unwrap());
}

#[test]
fn periodic_resolution_over_zmod4() {
    let r = zmod4();
    let m = Subquotient::free_quotient(Matrix::from_i64(r, 1, &[&[2]]));
    let c = BifilteredComplex::concentrated(BifilteredModule::trivial(m, false), 0);
    let res = specially_flat_resolution(&c, 3).unwrap();
    assert_eq!(res.horizon, -3);
    for q in -2..=0 {
        let h = res.complex.underlying().cohomology(q);
        let want = if q == 0 { 2 } else { 1 };
        assert_eq!(h.cardinality().unwrap(), want.into(), "H^{q}");
    }
    assert!(res.aug.is_bifiltered_qis() || res.aug.qis_failure().unwrap().1 <= res.horizon);
}

#[test]
fn derived_tensor_z2_z2() {
    let r = zmod4();
    let m = Subquotient::free_quotient(Matrix::from_i64(r, 1, &[&[2]]));
    let c = BifilteredComplex::concentrated(BifilteredModule::trivial(m, false), 0);
    let t = derived_tensor(&c, &c, 3).unwrap();
    for q in -2..=0 {
        assert_eq!(t.cohomology(q).unwrap().cardinality().unwrap(), 2.into(), "degree {q}");
    }
    assert!(matches!(t.cohomology(-3), Err(Error::DepthTooSmall { .. })));
}
