//! Executing commands against a model.

use std::cell::OnceCell;
use std::collections::BTreeMap;

use bifiltered::filtration::{is_strict_single, strictness_failure};
use bifiltered::monodromy::{
    key_lemma_check, monodromy_axioms, monodromy_filtration, relative_monodromy_search, FilteredOperator, NilpotentOperator, OperatorKind, SearchBudget,
};
use bifiltered::spectral::{spectral_sequence, Degeneration, Page};
use bifiltered::szk::SzkComplex;
use bifiltered::{BifilteredComplex, Complex, Filtration, Level, Which};
use serde_json::{json, Map, Value};

use crate::doc::{Command, WeightFiltration};
use crate::error::CliError;
use crate::model::Model;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Fail,
}

/// The outcome of one command: a JSON body and the same content as text.
#[derive(Clone, Debug)]
pub struct Report {
    pub op: &'static str,
    pub status: Status,
    pub body: Map<String, Value>,
    pub text: Vec<String>,
}

impl Report {
    fn new(op: &'static str) -> Report {
        Report { op, status: Status::Ok, body: Map::new(), text: Vec::new() }
    }

    fn put(&mut self, key: &str, v: Value) {
        self.body.insert(key.to_string(), v);
    }

    fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    fn fail(&mut self, message: String) {
        self.status = Status::Fail;
        self.put("message", Value::String(message.clone()));
        self.line(message);
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("op".into(), self.op.into());
        m.insert("status".into(), if self.status == Status::Ok { "ok" } else { "fail" }.into());
        m.extend(self.body.clone());
        Value::Object(m)
    }
}

fn level_name(l: Level) -> String {
    match l {
        Level::Both(a, b) => format!("bifiltered strictness fails at ({a},{b})"),
        Level::First(k) => format!("strictness for the first filtration fails at {k}"),
        Level::Second(k) => format!("strictness for the second filtration fails at {k}"),
    }
}

fn which(f: WeightFiltration) -> Which {
    match f {
        WeightFiltration::P => Which::First,
        WeightFiltration::PD => Which::Second,
    }
}

fn cohomology_lines(c: &Complex) -> (Value, Vec<String>) {
    let mut v = Vec::new();
    let mut text = Vec::new();
    for (q, inv) in c.cohomology_invariants() {
        v.push(json!({ "degree": q, "invariants": inv.to_string() }));
        text.push(format!("H^{q} = {inv}"));
    }
    (Value::Array(v), text)
}

/// `E_r` as rows of `q` (top first) and columns of `p`, with `.` for zero.
pub fn grid(page: &Page) -> Vec<String> {
    let cells: BTreeMap<(i64, i64), String> =
        page.cells.iter().filter(|(_, m)| !m.is_zero()).map(|(&k, m)| (k, m.invariants().to_string())).collect();
    if cells.is_empty() {
        return vec![format!("E_{}: 0", page.r)];
    }
    let ps: Vec<i64> = cells.keys().map(|k| k.0).collect();
    let qs: Vec<i64> = cells.keys().map(|k| k.1).collect();
    let (p0, p1) = (*ps.iter().min().unwrap(), *ps.iter().max().unwrap());
    let (q0, q1) = (*qs.iter().min().unwrap(), *qs.iter().max().unwrap());
    let width = cells.values().map(|s| s.len()).max().unwrap().max(3);
    let mut out = vec![format!("E_{}", page.r)];
    let mut header = format!("{:>5} |", "q\\p");
    for p in p0..=p1 {
        header.push_str(&format!(" {:>width$}", p));
    }
    out.push(header);
    for q in (q0..=q1).rev() {
        let mut row = format!("{q:>5} |");
        for p in p0..=p1 {
            let s = cells.get(&(p, q)).map(String::as_str).unwrap_or(".");
            row.push_str(&format!(" {s:>width$}"));
        }
        out.push(row);
    }
    out
}

fn page_json(page: &Page) -> Value {
    let cells: Vec<Value> = page
        .cells
        .iter()
        .filter(|(_, m)| !m.is_zero())
        .map(|(&(p, q), m)| json!({ "p": p, "q": q, "invariants": m.invariants().to_string() }))
        .collect();
    let nonzero: Vec<Value> =
        page.diffs.iter().filter(|(_, d)| !d.is_zero()).map(|(&(p, q), _)| json!([p, q])).collect();
    json!({ "r": page.r, "cells": cells, "nonzero_differentials": nonzero })
}

fn filtration_json(f: &Filtration) -> Value {
    let gr: Vec<Value> = f
        .jumps()
        .into_iter()
        .map(|k| json!({ "weight": k, "invariants": f.gr(k).invariants().to_string() }))
        .collect();
    json!({ "jumps": f.jumps(), "graded": gr })
}

pub struct Runner<'a> {
    model: &'a Model,
    szk: OnceCell<SzkComplex>,
}

impl<'a> Runner<'a> {
    pub fn new(model: &'a Model) -> Runner<'a> {
        Runner { model, szk: OnceCell::new() }
    }

    fn complex(&self, name: &str) -> Result<&BifilteredComplex, CliError> {
        self.model.complexes.get(name).ok_or_else(|| CliError::schema("complex", format!("unknown complex {name:?}")))
    }

    fn morphism(&self, name: &str) -> Result<&bifiltered::FilteredMorphism, CliError> {
        self.model.morphisms.get(name).ok_or_else(|| CliError::schema("morphism", format!("unknown morphism {name:?}")))
    }

    /// An endomorphism of a one-term complex, with the first filtration of that term.
    fn operator(&self, name: &str) -> Result<FilteredOperator, CliError> {
        let f = self.morphism(name)?;
        let (s, t) = &self.model.endpoints[name];
        let c = self.complex(s)?;
        if s != t || c.lo() != c.hi() {
            return Err(CliError::schema(format!("morphisms.{name}"), "an operator is an endomorphism of a one-term complex"));
        }
        let term = c.term(c.lo());
        Ok(FilteredOperator { module: term.module().clone(), filtration: term.p1().clone(), n: f.map(c.lo()) })
    }

    fn nilpotent(&self, name: &str) -> Result<NilpotentOperator, CliError> {
        let op = self.operator(name)?;
        NilpotentOperator::new(op.module, op.n, OperatorKind::LogT).map_err(CliError::engine(format!("operator {name}")))
    }

    fn szk_direct(&self) -> Result<&SzkComplex, CliError> {
        if let Some(a) = self.szk.get() {
            return Ok(a);
        }
        let (inc, strat) = match (&self.model.incidence, &self.model.strata) {
            (Some(i), Some(s)) => (i, s),
            _ => return Err(CliError::schema("incidence", "this command needs incidence data")),
        };
        let a = SzkComplex::build_direct(inc, strat).map_err(CliError::engine("weight complex"))?;
        Ok(self.szk.get_or_init(|| a))
    }

    pub fn run(&self, cmd: &Command) -> Result<Report, CliError> {
        match cmd {
            Command::Cohomology { complex } => {
                let c = self.complex(complex)?;
                let mut r = Report::new("cohomology");
                let (v, text) = cohomology_lines(&c.underlying());
                r.put("complex", complex.as_str().into());
                r.put("cohomology", v);
                r.text = text;
                Ok(r)
            }
            Command::Gr { complex, k1, k2 } => {
                let c = self.complex(complex)?;
                let g = match k2 {
                    Some(k2) => c.gr_complex(*k1, *k2),
                    None => c.gr_single(Which::First, *k1),
                };
                let mut r = Report::new("gr");
                let (v, text) = cohomology_lines(&g);
                r.put("complex", complex.as_str().into());
                r.put("k1", (*k1).into());
                if let Some(k2) = k2 {
                    r.put("k2", (*k2).into());
                }
                r.put("cohomology", v);
                r.text = text;
                Ok(r)
            }
            Command::StrictCheck { morphism } => self.strict_check(morphism),
            Command::QisCheck { morphism } => {
                let f = self.morphism(morphism)?;
                let direct = f.is_bifiltered_qis();
                let graded = f.is_gr_qis();
                let mut r = Report::new("qis-check");
                r.put("morphism", morphism.as_str().into());
                r.put("bifiltered_qis", direct.into());
                r.put("gr_gr_qis", graded.into());
                r.line(format!("bifiltered quasi-isomorphism: {direct}"));
                r.line(format!("gr-gr quasi-isomorphism: {graded}"));
                if direct != graded {
                    r.fail("the direct and graded criteria disagree".into());
                } else if !direct {
                    r.fail(format!("{morphism} is not a bifiltered quasi-isomorphism"));
                }
                Ok(r)
            }
            Command::Spectral { complex, filtration, pages } => {
                let c = match complex {
                    Some(name) => self.complex(name)?,
                    None => self.szk_direct()?.complex(),
                };
                let ss = spectral_sequence(c, which(*filtration), (*pages).max(1)).map_err(CliError::engine("spectral sequence"))?;
                let mut r = Report::new("spectral");
                r.put("filtration", serde_json::to_value(filtration).expect("enum"));
                let mut all = Vec::new();
                for k in 1..=*pages {
                    if let Some(p) = ss.page(k) {
                        all.push(page_json(p));
                        r.text.extend(grid(p));
                    }
                }
                r.put("pages", Value::Array(all));
                let deg = match ss.degeneration {
                    Degeneration::At(k) => json!({ "at": k }),
                    Degeneration::AtLeast(k) => json!({ "at_least": k }),
                };
                r.line(format!("degeneration: {deg}"));
                r.put("degeneration", deg);
                Ok(r)
            }
            Command::Monodromy { operator, center } => {
                let v = self.nilpotent(operator)?;
                let m = monodromy_filtration(&v, *center).map_err(CliError::engine("monodromy filtration"))?;
                let mut r = Report::new("monodromy");
                r.put("operator", operator.as_str().into());
                r.put("center", (*center).into());
                r.put("filtration", filtration_json(&m));
                for k in m.jumps() {
                    r.line(format!("gr_{k} = {}", m.gr(k).invariants()));
                }
                if let Some(fail) = monodromy_axioms(&v, &m, *center) {
                    r.fail(format!("constructed filtration violates {fail:?}"));
                }
                Ok(r)
            }
            Command::RelativeMonodromy { operator, filtration } => {
                let v = self.nilpotent(operator)?;
                let w = self.model.filtrations.get(filtration).ok_or_else(|| CliError::schema("filtration", format!("unknown filtration {filtration:?}")))?;
                let found = relative_monodromy_search(&v, w, SearchBudget::default()).map_err(CliError::engine("relative monodromy"))?;
                let mut r = Report::new("relative-monodromy");
                r.put("operator", operator.as_str().into());
                r.put("base", filtration.as_str().into());
                match found {
                    Some(m) => {
                        r.put("filtration", filtration_json(&m));
                        for k in m.jumps() {
                            r.line(format!("gr_{k} = {}", m.gr(k).invariants()));
                        }
                    }
                    None => r.fail("no relative monodromy filtration found within the search budget".into()),
                }
                Ok(r)
            }
            Command::KeyLemma { u, v, w, f, g } => {
                let (uo, vo, wo) = (self.operator(u)?, self.operator(v)?, self.operator(w)?);
                let fm = self.morphism(f)?;
                let gm = self.morphism(g)?;
                let rep = key_lemma_check(&uo, &vo, &wo, &fm.map(fm.lo()), &gm.map(gm.lo())).map_err(CliError::engine("key lemma"))?;
                let mut r = Report::new("key-lemma");
                r.put("source_finite", rep.source_finite.into());
                r.put("first_strict", rep.first_strict.into());
                r.put("second_strict", rep.second_strict.into());
                r.put("graded_iso", json!(rep.graded_iso));
                r.put("hypotheses_hold", rep.hypotheses_hold().into());
                r.put("conclusion", rep.conclusion.into());
                r.line(format!("hypotheses hold: {}", rep.hypotheses_hold()));
                r.line(format!("conclusion holds: {}", rep.conclusion));
                if !rep.conclusion {
                    r.fail("the conclusion fails".into());
                }
                Ok(r)
            }
            Command::BuildSzk { complex, t } => {
                let explicit;
                let a = match (complex, t) {
                    (None, None) => self.szk_direct()?,
                    (Some(k), Some(t)) => {
                        let kc = self.complex(k)?.underlying();
                        let tm = self.morphism(t)?;
                        let maps: Vec<_> = (kc.lo()..=kc.hi()).map(|q| tm.map(q)).collect();
                        explicit = SzkComplex::build_explicit(&kc, &maps).map_err(CliError::engine("weight complex"))?;
                        &explicit
                    }
                    _ => return Err(CliError::schema("build-szk", "give both a complex and t, or neither")),
                };
                let c = a.complex();
                let mut r = Report::new("build-szk");
                let ranks: Vec<Value> = (c.lo()..=c.hi()).map(|q| json!({ "degree": q, "rank": c.term(q).module().ambient() })).collect();
                r.put("columns", a.columns().into());
                r.put("k0", a.k0().into());
                r.put("terms", Value::Array(ranks));
                r.line(format!("columns {}, k0 {}", a.columns(), a.k0()));
                let (v, text) = cohomology_lines(&c.underlying());
                r.put("cohomology", v);
                r.text.extend(text);
                Ok(r)
            }
            Command::EdgeCompare { filtration } => {
                let a = self.szk_direct()?;
                let cmp = a.compare_edge(which(*filtration)).map_err(CliError::engine("edge comparison"))?;
                let mut r = Report::new("edge-compare");
                r.put("filtration", serde_json::to_value(filtration).expect("enum"));
                r.put("cells_checked", cmp.cells_checked.into());
                r.put("sign", cmp.sign.map_or(Value::Null, Value::from));
                r.put("mismatches", json!(cmp.mismatches));
                r.line(format!("{} d_1 blocks checked, sign {:?}", cmp.cells_checked, cmp.sign));
                if !cmp.agrees() {
                    r.fail(format!("edge maps differ at {:?}", cmp.mismatches));
                }
                Ok(r)
            }
            Command::MwCheck { degree } => {
                let a = self.szk_direct()?;
                let h = a.complex().underlying();
                let degrees: Vec<i64> = match degree {
                    Some(q) => vec![*q],
                    None => (h.lo()..=h.hi()).collect(),
                };
                let mut r = Report::new("mw-check");
                let mut rows = Vec::new();
                let mut failed = Vec::new();
                for q in degrees {
                    let rep = a.monodromy_weight_check(q).map_err(CliError::engine(format!("degree {q}")))?;
                    let passes = rep.passes();
                    rows.push(json!({
                        "degree": q,
                        "passes": passes,
                        "failure": rep.failure.as_ref().map(|f| format!("{f:?}")),
                        "graded": rep.graded.iter().map(|&(k, e, iso)| json!({ "k": k, "e": e, "iso": iso })).collect::<Vec<_>>(),
                    }));
                    r.line(format!("H^{q}: {}", if passes { "passes" } else { "fails" }));
                    if !passes {
                        failed.push(q);
                    }
                }
                r.put("degrees", Value::Array(rows));
                if !failed.is_empty() {
                    r.fail(format!("monodromy-weight condition fails in degrees {failed:?}"));
                }
                Ok(r)
            }
        }
    }

    fn strict_check(&self, morphism: &str) -> Result<Report, CliError> {
        let f = self.morphism(morphism)?;
        let (s, t) = (f.source(), f.target());
        let mut r = Report::new("strict-check");
        r.put("morphism", morphism.into());
        let mut rows = Vec::new();
        let mut first_failure = None;
        for q in f.lo()..=s.hi().max(t.hi()) {
            let (a, b, m) = (s.term(q), t.term(q), f.map(q));
            let ctx = || CliError::engine(format!("degree {q}"));
            let both = strictness_failure(&a, &b, &m).map_err(ctx())?;
            let one = is_strict_single(&a, &b, &m, Which::First).map_err(ctx())?;
            let two = is_strict_single(&a, &b, &m, Which::Second).map_err(ctx())?;
            rows.push(json!({ "degree": q, "first": one, "second": two, "bifiltered": both.is_none() }));
            r.line(format!("degree {q}: first {one}, second {two}, bifiltered {}", both.is_none()));
            if first_failure.is_none() {
                first_failure = both.map(|l| (q, l));
            }
        }
        r.put("degrees", Value::Array(rows));
        if let Some((q, l)) = first_failure {
            r.put("failure_degree", q.into());
            r.fail(format!("{} in degree {q}", level_name(l)));
        }
        Ok(r)
    }
}
