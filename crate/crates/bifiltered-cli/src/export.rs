//! Library objects written back as document sections, and the shipped fixtures.

use bifiltered::monodromy::FilteredOperator;
use bifiltered::szk::IncidenceData;
use bifiltered::{fixtures, gen, BifilteredComplex, BifilteredModule, Filtration, Matrix, Ring, Subquotient};

use crate::doc::*;
use crate::error::CliError;
use crate::model::matrix_doc;

pub fn module_doc(m: &Subquotient) -> ModuleDoc {
    ModuleDoc { ambient: m.ambient(), gens: Some(matrix_doc(m.gens())), rels: Some(matrix_doc(m.rels())) }
}

pub fn filtration_doc(module: &str, f: &Filtration) -> FiltrationDoc {
    FiltrationDoc {
        module: module.to_string(),
        floor: Some(matrix_doc(f.floor().gens())),
        steps: f.steps().iter().map(|(at, v)| StepDoc { at: *at, gens: matrix_doc(v.gens()) }).collect(),
        ceiling: Some(matrix_doc(f.ceiling().gens())),
    }
}

/// Adds the complex under `name`, its terms as `name[q]` with filtrations
/// `name[q].p1` and `name[q].p2`.
pub fn add_complex(doc: &mut Document, name: &str, c: &BifilteredComplex) {
    let mut terms = Vec::new();
    for q in c.lo()..=c.hi() {
        let t = c.term(q);
        let module = format!("{name}[{q}]");
        doc.modules.insert(module.clone(), module_doc(t.module()));
        let p1 = format!("{module}.p1");
        doc.filtrations.insert(p1.clone(), filtration_doc(&module, t.p1()));
        let p2 = t.p2().map(|f| {
            let key = format!("{module}.p2");
            doc.filtrations.insert(key.clone(), filtration_doc(&module, f));
            key
        });
        terms.push(TermDoc { module, p1: Some(p1), p2 });
    }
    let diffs = (c.lo()..c.hi()).map(|q| matrix_doc(&c.diff(q))).collect();
    doc.complexes.insert(name.to_string(), ComplexDoc { lo: c.lo(), terms, diffs });
}

pub fn add_morphism(doc: &mut Document, name: &str, source: &str, target: &str, maps: &[Matrix]) {
    let maps = maps.iter().map(matrix_doc).collect();
    doc.morphisms.insert(name.to_string(), MorphismDoc { source: source.into(), target: target.into(), maps });
}

pub fn incidence_doc(inc: &IncidenceData) -> IncidenceDoc {
    IncidenceDoc {
        x_labels: inc.x_labels().to_vec(),
        d_labels: inc.d_labels().to_vec(),
        strata: inc.strata().iter().map(|((x, d), &components)| StratumDoc { x: x.clone(), d: d.clone(), components }).collect(),
    }
}

/// A filtered operator as a one-term complex `name` with endomorphism `N{name}`.
pub fn add_operator(doc: &mut Document, name: &str, op: &FilteredOperator) -> Result<(), CliError> {
    let term = BifilteredModule::new(op.module.clone(), op.filtration.clone(), None).map_err(CliError::engine(name))?;
    add_complex(doc, name, &BifilteredComplex::concentrated(term, 0));
    add_morphism(doc, &format!("N{name}"), name, name, std::slice::from_ref(&op.n));
    Ok(())
}

pub fn nerve_document(ring: Ring, inc: &IncidenceData, model: StratumModel, gysin: bool, commands: Vec<Command>) -> Document {
    Document {
        ring: Some(ring.to_string()),
        incidence: Some(incidence_doc(inc)),
        stratum_data: Some(StratumDataDoc { model, gysin }),
        commands,
        ..Document::default()
    }
}

pub const FIXTURES: &[&str] = &["sum-map", "sum-sequence", "m-gon:<m>", "zeroed-gysin:<m>", "key-lemma-violation"];

/// The shipped fixtures, by name.
pub fn fixture(name: &str) -> Result<Document, CliError> {
    let (base, arg) = match name.split_once(':') {
        Some((b, a)) => (b, Some(a)),
        None => (name, None),
    };
    let size = || -> Result<usize, CliError> {
        arg.and_then(|a| a.parse().ok()).ok_or_else(|| CliError::schema("fixture", format!("{name}: expected a size, as in {base}:5")))
    };
    match base {
        "sum-map" => {
            let s = fixtures::sum_map().map_err(CliError::engine("sum-map"))?;
            let mut doc = Document { ring: Some(s.matrix.ring().to_string()), ..Document::default() };
            add_complex(&mut doc, "E", &BifilteredComplex::concentrated(s.source, 0));
            add_complex(&mut doc, "M", &BifilteredComplex::concentrated(s.target, 0));
            add_morphism(&mut doc, "sum", "E", "M", &[s.matrix]);
            doc.commands.push(Command::StrictCheck { morphism: "sum".into() });
            Ok(doc)
        }
        "sum-sequence" => {
            let c = fixtures::sum_sequence().map_err(CliError::engine("sum-sequence"))?;
            let mut doc = Document { ring: Some(c.ring().to_string()), ..Document::default() };
            add_complex(&mut doc, "S", &c);
            doc.commands.push(Command::Cohomology { complex: "S".into() });
            doc.commands.push(Command::Gr { complex: "S".into(), k1: 0, k2: Some(0) });
            Ok(doc)
        }
        "m-gon" | "zeroed-gysin" => {
            let m = size()?;
            let inc = IncidenceData::cycle(m).map_err(CliError::engine(name))?;
            let gysin = base == "m-gon";
            let mut commands = vec![Command::MwCheck { degree: None }];
            if gysin {
                commands.insert(0, Command::Spectral { complex: None, filtration: WeightFiltration::P, pages: 3 });
                commands.push(Command::EdgeCompare { filtration: WeightFiltration::P });
                commands.push(Command::EdgeCompare { filtration: WeightFiltration::PD });
            }
            Ok(nerve_document(Ring::Rationals, &inc, StratumModel::Curves, gysin, commands))
        }
        "key-lemma-violation" => {
            let ring = Ring::fp(2).map_err(CliError::engine(name))?;
            let mut doc = Document { ring: Some(ring.to_string()), ..Document::default() };
            let ops = [("U", gen::strings(ring, &[])), ("V", gen::strings(ring, &[2, 1])), ("W", gen::strings(ring, &[1]))];
            for (n, op) in &ops {
                add_operator(&mut doc, n, op)?;
            }
            add_morphism(&mut doc, "f", "U", "V", &[Matrix::zeros(ring, 0, 3)]);
            add_morphism(&mut doc, "g", "V", "W", &[Matrix::from_i64(ring, 1, &[&[1], &[0], &[0]])]);
            doc.commands.push(Command::KeyLemma { u: "NU".into(), v: "NV".into(), w: "NW".into(), f: "f".into(), g: "g".into() });
            Ok(doc)
        }
        _ => Err(CliError::schema("fixture", format!("unknown fixture {name:?}; known: {}", FIXTURES.join(", ")))),
    }
}

