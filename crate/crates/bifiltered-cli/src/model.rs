//! Validated in-memory model of a document, and the normalized document.

use std::collections::BTreeMap;
use std::str::FromStr;

use bifiltered::szk::{IncidenceData, StratumData};
use bifiltered::{BifilteredComplex, BifilteredModule, Filtration, FilteredMorphism, Matrix, Ring, Scalar, Subquotient};
use num_traits::{One, ToPrimitive};

use crate::doc::*;
use crate::error::CliError;

pub struct Model {
    pub filtrations: BTreeMap<String, Filtration>,
    pub complexes: BTreeMap<String, BifilteredComplex>,
    pub morphisms: BTreeMap<String, FilteredMorphism>,
    /// `(source, target)` names of each morphism.
    pub endpoints: BTreeMap<String, (String, String)>,
    pub incidence: Option<IncidenceData>,
    pub strata: Option<StratumData>,
    pub commands: Vec<Command>,
    /// The input with defaults written out and scalars in canonical form.
    pub normalized: Document,
}

pub fn resolve_ring(doc: Option<&str>, flag: Option<&str>) -> Result<Ring, CliError> {
    let parse = |s: &str, path: &str| Ring::from_str(s).map_err(|e| CliError::schema(path, e.to_string()));
    match (doc, flag) {
        (Some(d), Some(f)) => {
            let (a, b) = (parse(d, "ring")?, parse(f, "--ring")?);
            if a != b {
                return Err(CliError::RingMismatch { document: a.to_string(), flag: b.to_string() });
            }
            Ok(a)
        }
        (Some(d), None) => parse(d, "ring"),
        (None, Some(f)) => parse(f, "--ring"),
        (None, None) => Err(CliError::schema("ring", "no ring in the document and no --ring flag")),
    }
}

pub fn canonical_entry(ring: Ring, x: &Scalar) -> Entry {
    let x = ring.canon(x.clone());
    if x.denom().is_one() {
        if let Some(v) = x.numer().to_i64() {
            return Entry::Int(v);
        }
    }
    Entry::Text(ring.format_scalar(&x))
}

pub fn matrix_doc(m: &Matrix) -> MatrixDoc {
    let ring = m.ring();
    MatrixDoc {
        rows: m.rows(),
        cols: m.cols(),
        entries: m.row_vecs().iter().map(|r| r.iter().map(|x| canonical_entry(ring, x)).collect()).collect(),
    }
}

fn matrix(ring: Ring, d: &MatrixDoc, path: &str) -> Result<Matrix, CliError> {
    if d.entries.len() != d.rows {
        return Err(CliError::schema(path, format!("{} rows listed, shape says {}", d.entries.len(), d.rows)));
    }
    let mut rows = Vec::with_capacity(d.rows);
    for (i, row) in d.entries.iter().enumerate() {
        if row.len() != d.cols {
            return Err(CliError::schema(format!("{path}.entries[{i}]"), format!("{} entries, shape says {}", row.len(), d.cols)));
        }
        let mut out = Vec::with_capacity(d.cols);
        for (j, e) in row.iter().enumerate() {
            let x = match e {
                Entry::Int(v) => ring.from_int(*v),
                Entry::Text(s) => ring.parse_scalar(s).map_err(|err| CliError::schema(format!("{path}.entries[{i}][{j}]"), err.to_string()))?,
            };
            out.push(x);
        }
        rows.push(out);
    }
    Matrix::from_rows(ring, d.cols, rows).map_err(|e| CliError::schema(path, e.to_string()))
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, name: &str, kind: &str, path: &str) -> Result<&'a T, CliError> {
    map.get(name).ok_or_else(|| CliError::schema(path, format!("unknown {kind} {name:?}")))
}

impl Model {
    pub fn build(doc: &Document, ring_flag: Option<&str>) -> Result<Model, CliError> {
        let ring = resolve_ring(doc.ring.as_deref(), ring_flag)?;
        let mut norm = doc.clone();
        norm.ring = Some(ring.to_string());

        let mut modules = BTreeMap::new();
        for (name, m) in &doc.modules {
            let path = format!("modules.{name}");
            let gens = match &m.gens {
                Some(g) => matrix(ring, g, &format!("{path}.gens"))?,
                None => Matrix::identity(ring, m.ambient),
            };
            let rels = match &m.rels {
                Some(r) => matrix(ring, r, &format!("{path}.rels"))?,
                None => Matrix::zeros(ring, 0, m.ambient),
            };
            if gens.cols() != m.ambient || rels.cols() != m.ambient {
                return Err(CliError::schema(path, format!("generators and relations need {} columns", m.ambient)));
            }
            let sub = Subquotient::spanned(gens.clone(), rels.clone()).map_err(|e| CliError::schema(&path, e.to_string()))?;
            let n = norm.modules.get_mut(name).expect("same keys");
            n.gens = Some(matrix_doc(&gens));
            n.rels = Some(matrix_doc(&rels));
            modules.insert(name.clone(), sub);
        }

        let mut filtrations = BTreeMap::new();
        for (name, f) in &doc.filtrations {
            let path = format!("filtrations.{name}");
            let module = lookup(&modules, &f.module, "module", &format!("{path}.module"))?;
            let sub = |g: &MatrixDoc, p: &str| -> Result<Subquotient, CliError> {
                let m = matrix(ring, g, p)?;
                module.submodule(&m).map_err(|e| CliError::schema(p, e.to_string()))
            };
            let floor = match &f.floor {
                Some(g) => sub(g, &format!("{path}.floor"))?,
                None => module.zero_sub(),
            };
            let ceiling = match &f.ceiling {
                Some(g) => sub(g, &format!("{path}.ceiling"))?,
                None => module.clone(),
            };
            let mut steps = Vec::new();
            for (i, s) in f.steps.iter().enumerate() {
                steps.push((s.at, sub(&s.gens, &format!("{path}.steps[{i}].gens"))?));
            }
            let filt = Filtration::new(floor.clone(), steps.clone(), ceiling.clone()).map_err(|e| match e {
                bifiltered::Error::FiltrationNotMonotone(k) => CliError::schema(format!("{path}.steps"), format!("steps are not monotone at index {k}")),
                other => CliError::schema(&path, other.to_string()),
            })?;
            let n = norm.filtrations.get_mut(name).expect("same keys");
            n.floor = Some(matrix_doc(floor.gens()));
            n.ceiling = Some(matrix_doc(ceiling.gens()));
            for (d, (_, v)) in n.steps.iter_mut().zip(&steps) {
                d.gens = matrix_doc(v.gens());
            }
            filtrations.insert(name.clone(), filt);
        }

        let mut complexes = BTreeMap::new();
        for (name, c) in &doc.complexes {
            let path = format!("complexes.{name}");
            let mut terms = Vec::new();
            for (i, t) in c.terms.iter().enumerate() {
                let tp = format!("{path}.terms[{i}]");
                let module = lookup(&modules, &t.module, "module", &format!("{tp}.module"))?;
                let pick = |which: &Option<String>, key: &str| -> Result<Filtration, CliError> {
                    match which {
                        None => Ok(Filtration::trivial(module, 0)),
                        Some(fname) => {
                            let fp = format!("{tp}.{key}");
                            let f = lookup(&filtrations, fname, "filtration", &fp)?;
                            if doc.filtrations[fname].module != t.module {
                                return Err(CliError::schema(fp, format!("filtration {fname:?} is not on module {:?}", t.module)));
                            }
                            Ok(f.clone())
                        }
                    }
                };
                let term = BifilteredModule::new(module.clone(), pick(&t.p1, "p1")?, Some(pick(&t.p2, "p2")?))
                    .map_err(|e| CliError::schema(&tp, e.to_string()))?;
                terms.push(term);
            }
            if c.terms.is_empty() {
                return Err(CliError::schema(format!("{path}.terms"), "a complex needs at least one term"));
            }
            let mut diffs = Vec::new();
            for (i, d) in c.diffs.iter().enumerate() {
                diffs.push(matrix(ring, d, &format!("{path}.diffs[{i}]"))?);
            }
            let built = BifilteredComplex::new(ring, c.lo, terms, diffs.clone()).map_err(|e| CliError::schema(&path, e.to_string()))?;
            let n = norm.complexes.get_mut(name).expect("same keys");
            n.diffs = diffs.iter().map(matrix_doc).collect();
            complexes.insert(name.clone(), built);
        }

        let mut morphisms = BTreeMap::new();
        let mut endpoints = BTreeMap::new();
        for (name, m) in &doc.morphisms {
            let path = format!("morphisms.{name}");
            let s = lookup(&complexes, &m.source, "complex", &format!("{path}.source"))?;
            let t = lookup(&complexes, &m.target, "complex", &format!("{path}.target"))?;
            let mut maps = Vec::new();
            for (i, d) in m.maps.iter().enumerate() {
                maps.push(matrix(ring, d, &format!("{path}.maps[{i}]"))?);
            }
            let f = FilteredMorphism::new(s, t, maps.clone()).map_err(|e| CliError::schema(&path, e.to_string()))?;
            norm.morphisms.get_mut(name).expect("same keys").maps = maps.iter().map(matrix_doc).collect();
            morphisms.insert(name.clone(), f);
            endpoints.insert(name.clone(), (m.source.clone(), m.target.clone()));
        }

        let incidence = match &doc.incidence {
            None => None,
            Some(inc) => {
                let mut strata = BTreeMap::new();
                for (i, s) in inc.strata.iter().enumerate() {
                    let (mut x, mut d) = (s.x.clone(), s.d.clone());
                    x.sort_unstable();
                    d.sort_unstable();
                    if strata.insert((x, d), s.components).is_some() {
                        return Err(CliError::schema(format!("incidence.strata[{i}]"), "stratum listed twice"));
                    }
                }
                let data = IncidenceData::new(inc.x_labels.clone(), inc.d_labels.clone(), strata.clone())
                    .map_err(|e| CliError::schema("incidence", e.to_string()))?;
                norm.incidence.as_mut().expect("present").strata =
                    strata.into_iter().map(|((x, d), components)| StratumDoc { x, d, components }).collect();
                Some(data)
            }
        };
        let strata = match &incidence {
            None => {
                if doc.stratum_data.is_some() {
                    return Err(CliError::schema("stratum_data", "stratum data without incidence data"));
                }
                None
            }
            Some(inc) => {
                let spec = doc.stratum_data.clone().unwrap_or(StratumDataDoc { model: StratumModel::Points, gysin: true });
                let data = match spec.model {
                    StratumModel::Points => StratumData::points(ring, inc),
                    StratumModel::Curves => StratumData::curves(ring, inc),
                }
                .map_err(|e| CliError::schema("stratum_data", e.to_string()))?;
                norm.stratum_data = Some(spec.clone());
                Some(if spec.gysin { data } else { data.without_gysin() })
            }
        };

        Ok(Model {
            filtrations,
            complexes,
            morphisms,
            endpoints,
            incidence,
            strata,
            commands: doc.commands.clone(),
            normalized: norm,
        })
    }
}
