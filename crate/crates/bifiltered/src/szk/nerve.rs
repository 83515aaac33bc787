//! Incidence data of a normal crossing configuration and the cohomology
//! attached to its strata.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ring::Ring;
use crate::subquotient::Subquotient;
use crate::twist::TwistTag;

/// One connected stratum `X_A ∩ D_B`, numbered `c` among the components.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StratumKey {
    pub x: Vec<usize>,
    pub d: Vec<usize>,
    pub c: usize,
}

impl StratumKey {
    pub fn new(x: Vec<usize>, d: Vec<usize>, c: usize) -> StratumKey {
        StratumKey { x, d, c }
    }
}

impl core::fmt::Display for StratumKey {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "X{:?}D{:?}#{}", self.x, self.d, self.c)
    }
}

/// Position at which `v` would be inserted into the sorted `set`.
pub(crate) fn position(set: &[usize], v: usize) -> usize {
    set.iter().filter(|&&a| a < v).count()
}

pub(crate) fn sign(ring: Ring, e: usize) -> crate::ring::Scalar {
    if e.is_multiple_of(2) {
        ring.one()
    } else {
        ring.from_int(-1)
    }
}

fn is_sorted_set(v: &[usize]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

fn without(v: &[usize], i: usize) -> Vec<usize> {
    v.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &a)| a).collect()
}

fn subsets(v: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << v.len()) {
        out.push(v.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &a)| a).collect());
    }
    out
}

/// The nerve: which `X_A ∩ D_B` are nonempty and how many components each has.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceData {
    x_labels: Vec<String>,
    d_labels: Vec<String>,
    strata: BTreeMap<(Vec<usize>, Vec<usize>), usize>,
}

impl IncidenceData {
    pub fn new(
        x_labels: Vec<String>,
        d_labels: Vec<String>,
        strata: BTreeMap<(Vec<usize>, Vec<usize>), usize>,
    ) -> Result<IncidenceData> {
        for ((a, b), &c) in &strata {
            let bad = a.is_empty()
                || !is_sorted_set(a)
                || !is_sorted_set(b)
                || a.iter().any(|&i| i >= x_labels.len())
                || b.iter().any(|&i| i >= d_labels.len())
                || c == 0;
            if bad {
                return Err(Error::Invalid(format!("malformed stratum {a:?} {b:?} (count {c})")));
            }
            for i in 0..a.len() {
                if a.len() > 1 && !strata.contains_key(&(without(a, i), b.clone())) {
                    return Err(Error::Invalid(format!("nerve is not closed: {a:?} {b:?} lacks a face")));
                }
            }
            for i in 0..b.len() {
                if !strata.contains_key(&(a.clone(), without(b, i))) {
                    return Err(Error::Invalid(format!("nerve is not closed: {a:?} {b:?} lacks a face")));
                }
            }
        }
        Ok(IncidenceData { x_labels, d_labels, strata })
    }

    /// Downward closure of the given strata, every stratum connected.
    pub fn from_maximal(nx: usize, nd: usize, maximal: &[(Vec<usize>, Vec<usize>)]) -> Result<IncidenceData> {
        let mut strata = BTreeMap::new();
        for (a, b) in maximal {
            let mut a = a.clone();
            let mut b = b.clone();
            a.sort_unstable();
            b.sort_unstable();
            for sa in subsets(&a).into_iter().filter(|s| !s.is_empty()) {
                for sb in subsets(&b) {
                    strata.insert((sa.clone(), sb), 1);
                }
            }
        }
        for i in 0..nx {
            strata.entry((alloc::vec![i], Vec::new())).or_insert(1);
        }
        let xl = (0..nx).map(|i| format!("X{i}")).collect();
        let dl = (0..nd).map(|i| format!("D{i}")).collect();
        IncidenceData::new(xl, dl, strata)
    }

    /// `m` components in a cycle, consecutive ones meeting in one point.
    pub fn cycle(m: usize) -> Result<IncidenceData> {
        if m < 2 {
            return Err(Error::Invalid("a cycle needs at least two components".into()));
        }
        if m == 2 {
            let mut inc = IncidenceData::from_maximal(2, 0, &[(alloc::vec![0, 1], Vec::new())])?;
            inc.strata.insert((alloc::vec![0, 1], Vec::new()), 2);
            return Ok(inc);
        }
        let edges: Vec<_> = (0..m).map(|i| (alloc::vec![i, (i + 1) % m], Vec::new())).collect();
        IncidenceData::from_maximal(m, 0, &edges)
    }

    pub fn x_labels(&self) -> &[String] {
        &self.x_labels
    }

    pub fn d_labels(&self) -> &[String] {
        &self.d_labels
    }

    pub fn strata(&self) -> &BTreeMap<(Vec<usize>, Vec<usize>), usize> {
        &self.strata
    }

    pub fn count(&self, a: &[usize], b: &[usize]) -> usize {
        self.strata.get(&(a.to_vec(), b.to_vec())).copied().unwrap_or(0)
    }

    /// Connected strata with `|A| = nx` and `|B| = nd`, in canonical order.
    pub fn keys(&self, nx: usize, nd: usize) -> Vec<StratumKey> {
        let mut out = Vec::new();
        for ((a, b), &c) in &self.strata {
            if a.len() == nx && b.len() == nd {
                out.extend((0..c).map(|i| StratumKey::new(a.clone(), b.clone(), i)));
            }
        }
        out
    }

    pub fn all_keys(&self) -> Vec<StratumKey> {
        let mut out = Vec::new();
        for ((a, b), &c) in &self.strata {
            out.extend((0..c).map(|i| StratumKey::new(a.clone(), b.clone(), i)));
        }
        out
    }

    pub fn max_x(&self) -> usize {
        self.strata.keys().map(|(a, _)| a.len()).max().unwrap_or(0)
    }

    pub fn max_d(&self) -> usize {
        self.strata.keys().map(|(_, b)| b.len()).max().unwrap_or(0)
    }

    /// Bound beyond which the weight filtration is the whole complex or zero.
    pub fn k0(&self) -> i64 {
        (2 * self.max_x() + self.max_d() + 2) as i64
    }

    /// `X ∩ D_B` as a configuration without horizontal components.
    pub fn restrict_to(&self, b: &[usize]) -> Result<IncidenceData> {
        let mut strata = BTreeMap::new();
        for ((a, bb), &c) in &self.strata {
            if bb == b {
                strata.insert((a.clone(), Vec::new()), c);
            }
        }
        IncidenceData::new(self.x_labels.clone(), Vec::new(), strata)
    }

    /// Nonempty `D_B` (including `B = ∅`), each treated as connected.
    pub fn d_strata(&self) -> Vec<Vec<usize>> {
        let set: BTreeSet<Vec<usize>> = self.strata.keys().map(|(_, b)| b.clone()).collect();
        set.into_iter().collect()
    }
}

/// Cohomology of each stratum together with restriction and Gysin maps.
///
/// `restriction[(s, t, r)]` maps `H^r(s) -> H^r(t)` for `t` one component
/// deeper in `X`; `gysin[(s, t, r)]` maps `H^r(s) -> H^{r+2}(t)` for `t` with
/// one fewer `X`- or `D`-component. Missing entries are zero maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumData {
    ring: Ring,
    ranks: BTreeMap<StratumKey, BTreeMap<i64, usize>>,
    restriction: BTreeMap<(StratumKey, StratumKey, i64), Matrix>,
    gysin: BTreeMap<(StratumKey, StratumKey, i64), Matrix>,
}

impl StratumData {
    pub fn new(
        ring: Ring,
        inc: &IncidenceData,
        ranks: BTreeMap<StratumKey, BTreeMap<i64, usize>>,
        restriction: BTreeMap<(StratumKey, StratumKey, i64), Matrix>,
        gysin: BTreeMap<(StratumKey, StratumKey, i64), Matrix>,
    ) -> Result<StratumData> {
        let data = StratumData { ring, ranks, restriction, gysin };
        data.validate(inc)?;
        Ok(data)
    }

    /// Every stratum carries the ring in degree 0.
    pub fn points(ring: Ring, inc: &IncidenceData) -> Result<StratumData> {
        StratumData::projective_model(ring, inc, None)
    }

    /// Strata of a curve configuration: components of dimension one carry
    /// `H^0` and `H^2`, points carry `H^0`.
    pub fn curves(ring: Ring, inc: &IncidenceData) -> Result<StratumData> {
        StratumData::projective_model(ring, inc, Some(1))
    }

    fn projective_model(ring: Ring, inc: &IncidenceData, dim: Option<i64>) -> Result<StratumData> {
        let mut ranks = BTreeMap::new();
        for key in inc.all_keys() {
            let e = match dim {
                None => 0,
                Some(d) => d - (key.x.len() as i64 - 1) - key.d.len() as i64,
            };
            if e < 0 {
                return Err(Error::Invalid(format!("stratum {key} has negative dimension")));
            }
            ranks.insert(key, (0..=e).map(|i| (2 * i, 1)).collect::<BTreeMap<i64, usize>>());
        }
        let one = Matrix::identity(ring, 1);
        let unique_face = |a: &[usize], b: &[usize]| -> Result<StratumKey> {
            if inc.count(a, b) != 1 {
                return Err(Error::Invalid(format!(
                    "stratum {a:?} {b:?} has several components and a nonempty deeper stratum"
                )));
            }
            Ok(StratumKey::new(a.to_vec(), b.to_vec(), 0))
        };
        let mut restriction = BTreeMap::new();
        let mut gysin = BTreeMap::new();
        for key in inc.all_keys() {
            let src = &ranks[&key];
            for i in 0..inc.x_labels().len() {
                if key.x.contains(&i) {
                    continue;
                }
                let mut bigger = key.x.clone();
                bigger.insert(position(&key.x, i), i);
                for tk in inc.keys(bigger.len(), key.d.len()).into_iter().filter(|t| t.x == bigger && t.d == key.d) {
                    unique_face(&key.x, &key.d)?;
                    for &r in src.keys() {
                        if ranks[&tk].contains_key(&r) {
                            restriction.insert((key.clone(), tk.clone(), r), one.clone());
                        }
                    }
                }
            }
            let mut faces = Vec::new();
            if key.x.len() > 1 {
                faces.extend((0..key.x.len()).map(|i| (without(&key.x, i), key.d.clone())));
            }
            faces.extend((0..key.d.len()).map(|i| (key.x.clone(), without(&key.d, i))));
            for (a, b) in faces {
                let tk = unique_face(&a, &b)?;
                for &r in src.keys() {
                    if ranks[&tk].contains_key(&(r + 2)) {
                        gysin.insert((key.clone(), tk.clone(), r), one.clone());
                    }
                }
            }
        }
        StratumData::new(ring, inc, ranks, restriction, gysin)
    }

    /// Same data with every Gysin map replaced by zero.
    pub fn without_gysin(&self) -> StratumData {
        StratumData { gysin: BTreeMap::new(), ..self.clone() }
    }

    /// Same data over another ring.
    pub fn change_ring(&self, ring: Ring) -> Result<StratumData> {
        let conv = |m: &BTreeMap<(StratumKey, StratumKey, i64), Matrix>| -> Result<BTreeMap<_, _>> {
            m.iter().map(|(k, v)| Ok((k.clone(), v.change_ring(ring)?))).collect()
        };
        Ok(StratumData {
            ring,
            ranks: self.ranks.clone(),
            restriction: conv(&self.restriction)?,
            gysin: conv(&self.gysin)?,
        })
    }

    /// Data of `X ∩ D_B`, re-keyed as strata without horizontal components.
    pub fn restrict_to(&self, b: &[usize]) -> StratumData {
        let strip = |k: &StratumKey| StratumKey::new(k.x.clone(), Vec::new(), k.c);
        let ranks = self.ranks.iter().filter(|(k, _)| k.d == b).map(|(k, v)| (strip(k), v.clone())).collect();
        let keep = |m: &BTreeMap<(StratumKey, StratumKey, i64), Matrix>| {
            m.iter()
                .filter(|((s, t, _), _)| s.d == b && t.d == b)
                .map(|((s, t, r), v)| ((strip(s), strip(t), *r), v.clone()))
                .collect()
        };
        StratumData {
            ring: self.ring,
            ranks,
            restriction: keep(&self.restriction),
            gysin: keep(&self.gysin),
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn ranks(&self) -> &BTreeMap<StratumKey, BTreeMap<i64, usize>> {
        &self.ranks
    }

    pub fn restrictions(&self) -> &BTreeMap<(StratumKey, StratumKey, i64), Matrix> {
        &self.restriction
    }

    pub fn gysins(&self) -> &BTreeMap<(StratumKey, StratumKey, i64), Matrix> {
        &self.gysin
    }

    pub fn rank(&self, key: &StratumKey, r: i64) -> usize {
        self.ranks.get(key).and_then(|m| m.get(&r)).copied().unwrap_or(0)
    }

    fn validate(&self, inc: &IncidenceData) -> Result<()> {
        let keys: BTreeSet<StratumKey> = inc.all_keys().into_iter().collect();
        for k in self.ranks.keys() {
            if !keys.contains(k) {
                return Err(Error::Invalid(format!("stratum data for unknown stratum {k}")));
            }
        }
        for ((s, t, r), m) in &self.restriction {
            let ok = keys.contains(s)
                && keys.contains(t)
                && s.d == t.d
                && t.x.len() == s.x.len() + 1
                && s.x.iter().all(|a| t.x.contains(a));
            if !ok {
                return Err(Error::Invalid(format!("restriction {s} -> {t} is not along an inclusion")));
            }
            if m.rows() != self.rank(s, *r) || m.cols() != self.rank(t, *r) {
                return Err(Error::ShapeMismatch(format!("restriction {s} -> {t} in degree {r}")));
            }
        }
        for ((s, t, r), m) in &self.gysin {
            let along_x = s.d == t.d && s.x.len() == t.x.len() + 1 && t.x.iter().all(|a| s.x.contains(a));
            let along_d = s.x == t.x && s.d.len() == t.d.len() + 1 && t.d.iter().all(|a| s.d.contains(a));
            if !(keys.contains(s) && keys.contains(t) && (along_x || along_d)) {
                return Err(Error::Invalid(format!("Gysin map {s} -> {t} is not along a face")));
            }
            if m.rows() != self.rank(s, *r) || m.cols() != self.rank(t, r + 2) {
                return Err(Error::ShapeMismatch(format!("Gysin map {s} -> {t} in degree {r}")));
            }
        }
        Ok(())
    }
}

/// A direct sum of stratum cohomology groups with its canonical basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CechModule {
    pub module: Subquotient,
    /// `(stratum, index in H^r)` per basis vector.
    pub basis: Vec<(StratumKey, usize)>,
    pub twist: TwistTag,
}

/// `⊕ H^r(X_A ∩ D_B)` over `|A| = kx + 1`, `|B| = kd`, each stratum tensored
/// with its orientation line (which only fixes signs of the maps).
pub fn cech_module(inc: &IncidenceData, strat: &StratumData, kx: usize, kd: usize, r: i64) -> CechModule {
    let mut basis = Vec::new();
    for key in inc.keys(kx + 1, kd) {
        for i in 0..strat.rank(&key, r) {
            basis.push((key.clone(), i));
        }
    }
    let ring = strat.ring();
    CechModule {
        module: Subquotient::free(ring, basis.len()),
        basis,
        twist: TwistTag::new(ring, -(kd as i64)),
    }
}
