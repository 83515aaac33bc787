//! Random instances for property tests.

use alloc::vec::Vec;

use rand::Rng;

use crate::complex::{BifilteredComplex, FilteredMorphism};
use crate::error::Result;
use crate::filtration::{BifilteredModule, Filtration};
use crate::linalg;
use crate::matrix::Matrix;
use crate::ring::{Ring, Scalar};
use crate::subquotient::Subquotient;

pub fn scalar<R: Rng>(ring: Ring, rng: &mut R) -> Scalar {
    match ring.modulus() {
        Some(m) => {
            let m = num_traits::ToPrimitive::to_i64(&m).unwrap_or(i64::MAX);
            ring.from_int(rng.gen_range(0..m))
        }
        None => {
            let x = ring.from_int(rng.gen_range(-2..=2));
            if ring == Ring::Rationals && rng.gen_bool(0.2) {
                x / ring.from_int(2)
            } else {
                x
            }
        }
    }
}

pub fn matrix<R: Rng>(ring: Ring, rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let mut m = Matrix::zeros(ring, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, scalar(ring, rng));
        }
    }
    m
}

/// Sparse-ish random vector inside the row space of `gens`.
pub fn element<R: Rng>(gens: &Matrix, rng: &mut R) -> Vec<Scalar> {
    let ring = gens.ring();
    let mut v = alloc::vec![ring.zero(); gens.cols()];
    for i in 0..gens.rows() {
        if rng.gen_bool(0.6) {
            let c = scalar(ring, rng);
            for (j, x) in v.iter_mut().enumerate() {
                *x = ring.add(x, &ring.mul(&c, gens.get(i, j)));
            }
        }
    }
    v
}

/// A random submodule of `m` with at most `max_gens` extra generators.
pub fn submodule<R: Rng>(m: &Subquotient, max_gens: usize, rng: &mut R) -> Subquotient {
    let n = rng.gen_range(0..=max_gens);
    let rows: Vec<Vec<Scalar>> = (0..n).map(|_| element(m.gens(), rng)).collect();
    let g = Matrix::from_rows(m.ring(), m.ambient(), rows).expect("shape");
    m.submodule(&g).expect("inside m")
}

/// Separated, exhaustive random chain on `lo..=hi`.
pub fn chain<R: Rng>(m: &Subquotient, lo: i64, hi: i64, rng: &mut R) -> Filtration {
    let mut cur = m.zero_sub();
    let mut steps = Vec::new();
    for k in lo..hi {
        let add = submodule(m, 2, rng);
        cur = cur.sum(&add).expect("same module");
        steps.push((k, cur.clone()));
    }
    steps.push((hi, m.clone()));
    Filtration::chain(m, steps).expect("monotone by construction")
}

/// Free or torsion module of ambient rank `1..=max_rank` with random chains.
pub fn bifiltered_module<R: Rng>(ring: Ring, max_rank: usize, two: bool, rng: &mut R) -> BifilteredModule {
    let n = rng.gen_range(1..=max_rank);
    let m = if ring.is_field() || !rng.gen_bool(0.4) {
        Subquotient::free(ring, n)
    } else {
        let rels = matrix(ring, 1, n, rng);
        let rels = if ring == Ring::Integers { rels.scale(&ring.from_int(2)) } else { rels };
        Subquotient::free_quotient(rels)
    };
    let p1 = chain(&m, -1, 1, rng);
    let p2 = two.then(|| chain(&m, -1, 1, rng));
    BifilteredModule::new(m, p1, p2).expect("filtrations of m")
}

/// Free module whose filtrations are spanned by basis vectors (free graded pieces).
pub fn split_free<R: Rng>(ring: Ring, max_rank: usize, two: bool, rng: &mut R) -> BifilteredModule {
    let n = rng.gen_range(1..=max_rank);
    let l1: Vec<i64> = (0..n).map(|_| rng.gen_range(-1..=1)).collect();
    let l2: Vec<i64> = (0..n).map(|_| rng.gen_range(-1..=1)).collect();
    let m = Subquotient::free(ring, n);
    let split = |lv: &[i64]| {
        Filtration::from_fn(-2, 1, |k| {
            let mut g = Matrix::zeros(ring, 0, n);
            for (i, &l) in lv.iter().enumerate() {
                if l <= k {
                    let mut e = Matrix::zeros(ring, 1, n);
                    e.set(0, i, ring.one());
                    g = g.vstack(&e);
                }
            }
            m.submodule(&g)
        })
        .expect("monotone")
    };
    let p1 = split(&l1);
    let p2 = two.then(|| split(&l2));
    BifilteredModule::new(m, p1, p2).expect("filtrations of m")
}

/// Basis levels of a free term: each basis vector enters at `level`; over a ring
/// with a prime `l` that is not a field, `l·e` may enter earlier at `early`.
#[derive(Clone, Debug)]
struct TermLevels {
    level: [Vec<i64>; 2],
    early: [Vec<Option<i64>>; 2],
}

fn term_levels<R: Rng>(ring: Ring, n: usize, rng: &mut R) -> TermLevels {
    let torsion_prime = !ring.is_field();
    let mut level = [Vec::new(), Vec::new()];
    let mut early = [Vec::new(), Vec::new()];
    for w in 0..2 {
        for _ in 0..n {
            let l = rng.gen_range(-1..=1);
            level[w].push(l);
            early[w].push((torsion_prime && rng.gen_bool(0.3)).then(|| l - rng.gen_range(1..=2)));
        }
    }
    TermLevels { level, early }
}

fn multiplier(ring: Ring) -> Scalar {
    match ring {
        Ring::ZmodPrimePower { l, .. } | Ring::PrimeField(l) => ring.from_int(l as i64),
        _ => ring.from_int(2),
    }
}

fn level_step(ring: Ring, n: usize, lv: &TermLevels, w: usize, k: i64) -> Matrix {
    let mut g = Matrix::zeros(ring, 0, n);
    for i in 0..n {
        let c = if lv.level[w][i] <= k {
            Some(ring.one())
        } else if lv.early[w][i].is_some_and(|e| e <= k) {
            Some(multiplier(ring))
        } else {
            None
        };
        if let Some(c) = c {
            let mut e = Matrix::zeros(ring, 1, n);
            e.set(0, i, c);
            g = g.vstack(&e);
        }
    }
    g
}

fn levels_module(ring: Ring, n: usize, lv: &TermLevels, two: bool) -> BifilteredModule {
    let m = Subquotient::free(ring, n);
    let f = |w: usize| Filtration::from_fn(-4, 1, |k| m.submodule(&level_step(ring, n, lv, w, k))).expect("monotone");
    BifilteredModule::new(m.clone(), f(0), two.then(|| f(1))).expect("filtrations of m")
}

/// The vectors `v` allowed as the image of basis vector `i`: inside the right
/// steps of the target, and with `l·v` inside the earlier steps.
fn allowed(target: &BifilteredModule, lv: &TermLevels, i: usize, two: bool, also: Option<&Matrix>) -> Matrix {
    let ring = target.module().ring();
    let n = target.module().ambient();
    let mut space = Matrix::identity(ring, n);
    let ws = if two { 2 } else { 1 };
    for w in 0..ws {
        let f = if w == 0 { target.p1() } else { target.p2().expect("two filtrations") };
        space = linalg::row_space_intersect(&space, f.value(lv.level[w][i]).gens());
        if let Some(e) = lv.early[w][i] {
            let mult = Matrix::identity(ring, n).scale(&multiplier(ring));
            let pre = linalg::preimage_space(&mult, f.value(e).gens());
            space = linalg::row_space_intersect(&space, &pre);
        }
    }
    if let Some(k) = also {
        space = linalg::row_space_intersect(&space, k);
    }
    space
}

/// Random bounded complex of free filtered modules in degrees `0..degrees`,
/// dimensions `0..=max_dim`, differentials respecting the filtrations.
pub fn filtered_complex<R: Rng>(ring: Ring, degrees: usize, max_dim: usize, two: bool, rng: &mut R) -> BifilteredComplex {
    let dims: Vec<usize> = (0..degrees).map(|_| rng.gen_range(0..=max_dim)).collect();
    let levels: Vec<TermLevels> = dims.iter().map(|&n| term_levels(ring, n, rng)).collect();
    let terms: Vec<BifilteredModule> = dims.iter().zip(&levels).map(|(&n, lv)| levels_module(ring, n, lv, two)).collect();
    let mut diffs: Vec<Matrix> = alloc::vec![Matrix::zeros(ring, 0, 0); degrees.saturating_sub(1)];
    for q in (0..degrees.saturating_sub(1)).rev() {
        let next_kernel = if q + 2 < degrees { Some(linalg::left_kernel(&diffs[q + 1])) } else { None };
        let mut d = Matrix::zeros(ring, dims[q], dims[q + 1]);
        for i in 0..dims[q] {
            let space = allowed(&terms[q + 1], &levels[q], i, two, next_kernel.as_ref());
            if rng.gen_bool(0.85) {
                let v = element(&space, rng);
                for (j, x) in v.into_iter().enumerate() {
                    d.set(i, j, x);
                }
            }
        }
        diffs[q] = d;
    }
    BifilteredComplex::new(ring, 0, terms, diffs).expect("complex by construction")
}

/// A random filtered morphism between random complexes: either the identity
/// into a coarser filtration, or the inclusion of the first summand of `E ⊕ K`.
pub fn filtered_morphism<R: Rng>(ring: Ring, degrees: usize, max_dim: usize, two: bool, rng: &mut R) -> FilteredMorphism {
    let e = filtered_complex(ring, degrees, max_dim, two, rng);
    if rng.gen_bool(0.5) {
        let f = coarsen(&e, rng).expect("coarser filtration");
        let maps = e.terms().iter().map(|t| Matrix::identity(ring, t.module().ambient())).collect();
        FilteredMorphism::new(&e, &f, maps).expect("identity is filtered")
    } else {
        let k = if rng.gen_bool(0.5) {
            let small = filtered_complex(ring, degrees, max_dim.min(2), two, rng);
            crate::complex::mapping_cone(&FilteredMorphism::identity(&small)).degree_shift(0)
        } else {
            filtered_complex(ring, degrees, max_dim.min(2), two, rng)
        };
        let lo = e.lo().min(k.lo());
        let hi = e.hi().max(k.hi());
        let e = e.extend_to(lo, hi);
        let k = k.extend_to(lo, hi);
        let terms: Vec<BifilteredModule> = (lo..=hi).map(|q| e.term(q).direct_sum(&k.term(q))).collect();
        let diffs: Vec<Matrix> = (lo..hi).map(|q| e.diff(q).block_diag(&k.diff(q))).collect();
        let sum = BifilteredComplex::new(ring, lo, terms, diffs).expect("direct sum");
        let maps = (lo..=hi)
            .map(|q| {
                let a = e.term(q).module().ambient();
                let b = k.term(q).module().ambient();
                Matrix::identity(ring, a).hstack(&Matrix::zeros(ring, a, b))
            })
            .collect();
        FilteredMorphism::new(&e, &sum, maps).expect("inclusion is filtered")
    }
}

/// Same complex with each step enlarged by random vectors and their differentials.
pub fn coarsen<R: Rng>(c: &BifilteredComplex, rng: &mut R) -> Result<BifilteredComplex> {
    let ring = c.ring();
    let mut extra: Vec<[Vec<(i64, Matrix)>; 2]> = Vec::new();
    for q in c.lo()..=c.hi() {
        let n = c.term(q).module().ambient();
        let mut per = [Vec::new(), Vec::new()];
        for slot in per.iter_mut() {
            let mut acc = Matrix::zeros(ring, 0, n);
            for k in -4..=1 {
                if rng.gen_bool(0.25) && n > 0 {
                    acc = acc.vstack(&Matrix::from_row_vec(ring, element(&Matrix::identity(ring, n), rng)));
                }
                slot.push((k, acc.clone()));
            }
        }
        extra.push(per);
    }
    let mut terms = Vec::new();
    for (i, q) in (c.lo()..=c.hi()).enumerate() {
        let t = c.term(q);
        let m = t.module().clone();
        let build = |w: usize, f: &Filtration| -> Result<Filtration> {
            Filtration::from_fn(-4, 1, |k| {
                let own = &extra[i][w][(k + 4) as usize].1;
                let mut g = f.value(k).gens().vstack(own);
                if i > 0 {
                    let prev = &extra[i - 1][w][(k + 4) as usize].1;
                    g = g.vstack(&prev.mul(&c.diff(q - 1))?);
                }
                Subquotient::spanned(g, m.rels().clone())
            })
        };
        let p1 = build(0, t.p1())?;
        let p2 = t.p2().map(|p| build(1, p)).transpose()?;
        terms.push(BifilteredModule::new(m, p1, p2)?);
    }
    BifilteredComplex::new(ring, c.lo(), terms, c.diffs().to_vec())
}

/// An injective filtered map: inclusion of a random submodule carrying random
/// filtrations inside the induced ones.
pub fn injective<R: Rng>(ring: Ring, max_rank: usize, rng: &mut R) -> (BifilteredModule, BifilteredModule, Matrix) {
    let target = bifiltered_module(ring, max_rank, true, rng);
    let sub = submodule(target.module(), 3, rng);
    let inner = |f: &Filtration, rng: &mut R| -> Filtration {
        Filtration::from_fn(-2, 1, |k| {
            let allowed = f.value(k).intersect(&sub)?;
            Ok(allowed)
        })
        .and_then(|induced| {
            // shrink some steps while keeping them monotone
            let mut cur = sub.zero_sub();
            let mut steps = Vec::new();
            for k in -2..=1 {
                let cap = induced.value(k);
                let add = if rng.gen_bool(0.7) { cap.clone() } else { submodule(cap, 1, rng) };
                cur = cur.sum(&add)?.intersect(cap)?;
                steps.push((k, cur.clone()));
            }
            let ceiling = induced.ceiling().clone();
            Filtration::new(sub.zero_sub(), steps, ceiling)
        })
        .expect("monotone")
    };
    let p1 = inner(target.p1(), rng);
    let p2 = inner(target.p2().expect("two"), rng);
    let source = BifilteredModule::new(sub.clone(), p1, Some(p2)).expect("filtrations of sub");
    let n = target.module().ambient();
    (source, target, Matrix::identity(ring, n))
}

/// Block sizes summing to at most `max_dim` (at least one block).
pub fn jordan_type<R: Rng>(max_dim: usize, rng: &mut R) -> Vec<usize> {
    let total = rng.gen_range(1..=max_dim);
    let mut left = total;
    let mut out = Vec::new();
    while left > 0 {
        let s = rng.gen_range(1..=left);
        out.push(s);
        left -= s;
    }
    out
}

/// The nilpotent matrix of Jordan strings `x_0 -> x_1 -> ... -> 0` of the given sizes.
pub fn jordan_matrix(ring: Ring, sizes: &[usize]) -> Matrix {
    let n: usize = sizes.iter().sum();
    let mut m = Matrix::zeros(ring, n, n);
    let mut off = 0;
    for &s in sizes {
        for i in 0..s.saturating_sub(1) {
            m.set(off + i, off + i + 1, ring.one());
        }
        off += s;
    }
    m
}

/// An invertible matrix (retrying random draws).
pub fn invertible<R: Rng>(ring: Ring, n: usize, rng: &mut R) -> (Matrix, Matrix) {
    loop {
        let p = matrix(ring, n, n, rng);
        if let Some(inv) = linalg::inverse(&p) {
            return (p, inv);
        }
    }
}

/// A random nilpotent operator of the given Jordan type, in a random basis.
pub fn nilpotent<R: Rng>(ring: Ring, sizes: &[usize], rng: &mut R) -> crate::monodromy::NilpotentOperator {
    let j = jordan_matrix(ring, sizes);
    let (p, inv) = invertible(ring, j.rows(), rng);
    let n = inv.mul(&j).and_then(|x| x.mul(&p)).expect("square");
    let space = Subquotient::free(ring, j.rows());
    crate::monodromy::NilpotentOperator::new(space, n, crate::monodromy::OperatorKind::LogT).expect("nilpotent")
}

/// Jordan strings with weights `s-1, s-3, ..., 1-s` and the weight filtration.
pub fn strings(ring: Ring, sizes: &[usize]) -> crate::monodromy::FilteredOperator {
    let n: usize = sizes.iter().sum();
    let module = Subquotient::free(ring, n);
    let mut weights = Vec::new();
    for &s in sizes {
        for i in 0..s {
            weights.push(s as i64 - 1 - 2 * i as i64);
        }
    }
    let top = weights.iter().copied().max().unwrap_or(0);
    let bottom = weights.iter().copied().min().unwrap_or(0);
    let filtration = Filtration::from_fn(bottom - 1, top, |k| {
        let mut g = Matrix::zeros(ring, 0, n);
        for (i, &w) in weights.iter().enumerate() {
            if w <= k {
                let mut e = Matrix::zeros(ring, 1, n);
                e.set(0, i, ring.one());
                g = g.vstack(&e);
            }
        }
        module.submodule(&g)
    })
    .expect("monotone");
    crate::monodromy::FilteredOperator { module, filtration, n: jordan_matrix(ring, sizes) }
}

/// A unipotent automorphism of a sum of strings commuting with `N` and
/// preserving the weight filtration, with its inverse.
pub fn string_automorphism<R: Rng>(ring: Ring, sizes: &[usize], rng: &mut R) -> (Matrix, Matrix) {
    let n: usize = sizes.iter().sum();
    let offs: Vec<usize> = sizes.iter().scan(0, |acc, &s| { let o = *acc; *acc += s; Some(o) }).collect();
    let mut phi = Matrix::identity(ring, n);
    for a in 0..sizes.len() {
        for b in a + 1..sizes.len() {
            let (sa, sb) = (sizes[a], sizes[b]);
            let jmin = sb.saturating_sub(sa);
            for j in jmin..sb {
                let c = scalar(ring, rng);
                for i in 0..sa {
                    if i + j < sb {
                        let (r, col) = (offs[a] + i, offs[b] + i + j);
                        let v = ring.add(phi.get(r, col), &c);
                        phi.set(r, col, v);
                    }
                }
            }
        }
    }
    let inv = linalg::inverse(&phi).expect("unipotent");
    (phi, inv)
}

/// An instance of `U -f-> V -g-> W` satisfying the hypotheses of the graded
/// isomorphism lemma: split strict maps between sums of strings, twisted by
/// random automorphisms of each term.
pub fn key_lemma_instance<R: Rng>(
    ring: Ring,
    rng: &mut R,
) -> (crate::monodromy::FilteredOperator, crate::monodromy::FilteredOperator, crate::monodromy::FilteredOperator, Matrix, Matrix) {
    let pick = |rng: &mut R| -> Vec<usize> { (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(1..=3)).collect() };
    let a = pick(rng);
    let k = pick(rng);
    let b = pick(rng);
    let c = pick(rng);
    let l = pick(rng);
    let cat = |xs: &[&Vec<usize>]| -> Vec<usize> { xs.iter().flat_map(|v| v.iter().copied()).collect() };
    let su = cat(&[&a, &k]);
    let sv = cat(&[&a, &b, &c]);
    let sw = cat(&[&c, &l]);
    let (na, nk, nb, nc, nl) = (a.iter().sum::<usize>(), k.iter().sum::<usize>(), b.iter().sum::<usize>(), c.iter().sum::<usize>(), l.iter().sum::<usize>());
    let (nu, nv, nw) = (na + nk, na + nb + nc, nc + nl);
    let mut f = Matrix::zeros(ring, nu, nv);
    f.paste(0, 0, &Matrix::identity(ring, na));
    let mut g = Matrix::zeros(ring, nv, nw);
    g.paste(na + nb, 0, &Matrix::identity(ring, nc));
    let (_, pu_inv) = string_automorphism(ring, &su, rng);
    let (pv, pv_inv) = string_automorphism(ring, &sv, rng);
    let (pw, _) = string_automorphism(ring, &sw, rng);
    let f = pu_inv.mul(&f).and_then(|x| x.mul(&pv)).expect("shapes");
    let g = pv_inv.mul(&g).and_then(|x| x.mul(&pw)).expect("shapes");
    (strings(ring, &su), strings(ring, &sv), strings(ring, &sw), f, g)
}

/// Random closed nerve on `nx` vertical and `nd` horizontal components. With
/// `curves`, every stratum has `|A| - 1 + |B| <= 1`.
pub fn nerve<R: Rng>(nx: usize, nd: usize, curves: bool, rng: &mut R) -> crate::szk::IncidenceData {
    let mut maximal = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let mut a: Vec<usize> = (0..nx).filter(|_| rng.gen_bool(0.5)).collect();
        if a.is_empty() {
            a.push(rng.gen_range(0..nx));
        }
        let mut b: Vec<usize> = (0..nd).filter(|_| rng.gen_bool(0.4)).collect();
        if curves {
            a.truncate(2);
            b.truncate(2 - a.len());
        } else {
            a.truncate(3);
            b.truncate(2);
        }
        maximal.push((a, b));
    }
    crate::szk::IncidenceData::from_maximal(nx, nd, &maximal).expect("downward closed")
}

/// A free complex `K` in degrees `0..=2` with `T = 1 + ν`, where `ν` sends
/// `x` to a cycle depending only on `dx`. Then `T` commutes with `d`, is
/// trivial on cohomology and `(T - 1)^2 = 0`.
pub fn explicit_t<R: Rng>(ring: Ring, max_dim: usize, rng: &mut R) -> (crate::complex::Complex, Vec<Matrix>) {
    let dims: Vec<usize> = (0..3).map(|_| rng.gen_range(1..=max_dim)).collect();
    let d0 = matrix(ring, dims[0], dims[1], rng);
    let right_kernel = linalg::left_kernel(&d0.transpose()).transpose();
    let d1 = right_kernel.mul(&matrix(ring, right_kernel.cols(), dims[2], rng)).expect("shapes");
    let terms = dims.iter().map(|&n| Subquotient::free(ring, n)).collect();
    let k = crate::complex::Complex::new(ring, 0, terms, alloc::vec![d0, d1]).expect("d1 kills the image of d0");
    let mut t = Vec::new();
    for m in 0..3 {
        let n = dims[m as usize];
        let z = k.cycles(m);
        let lift = matrix(ring, k.term(m + 1).ambient(), z.gens().rows(), rng).mul(z.gens()).expect("shapes");
        let nu = k.diff(m).mul(&lift).expect("shapes");
        t.push(Matrix::identity(ring, n).add(&nu).expect("square"));
    }
    (k, t)
}
