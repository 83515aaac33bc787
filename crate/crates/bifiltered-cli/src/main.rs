//! `bifil`: run the bifiltered engine on JSON documents.
//!
//! Exit status is 0 on success, 1 when a check fails and 2 on bad input.

mod doc;
mod error;
mod export;
mod model;
mod run;

use std::io::Read as _;
use std::process::ExitCode;

use bifiltered::{gen, BifilteredComplex, BifilteredModule, Filtration, Ring};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use doc::{Command, Document, StratumModel, WeightFiltration};
use error::CliError;
use model::Model;
use run::{Report, Runner, Status};

#[derive(Parser)]
#[command(name = "bifil", version, about = "Exact computations with bifiltered complexes")]
struct Cli {
    /// Coefficient ring: zmod:l=2,n=3 | fp:3 | int | rat. Must agree with the document's ring.
    #[arg(long, global = true)]
    ring: Option<String>,
    /// Seed for `sample`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate a document and print it in normal form.
    Normalize { file: String },
    /// Run the commands listed in the document.
    Run { file: String },
    /// Print a shipped fixture document (sum-map, sum-sequence, m-gon:<m>, zeroed-gysin:<m>, key-lemma-violation).
    Fixture { name: String },
    /// Print a random document.
    Sample {
        #[arg(long, value_enum)]
        kind: SampleKind,
    },
    Cohomology {
        file: String,
        #[arg(long)]
        complex: String,
    },
    Gr {
        file: String,
        #[arg(long)]
        complex: String,
        #[arg(long, allow_hyphen_values = true)]
        k1: i64,
        #[arg(long, allow_hyphen_values = true)]
        k2: Option<i64>,
    },
    StrictCheck {
        file: String,
        #[arg(long)]
        morphism: String,
    },
    QisCheck {
        file: String,
        #[arg(long)]
        morphism: String,
    },
    Spectral {
        file: String,
        #[arg(long)]
        complex: Option<String>,
        #[arg(long, value_enum, default_value_t = WeightFiltration::P)]
        filtration: WeightFiltration,
        #[arg(long, default_value_t = 2)]
        pages: usize,
    },
    Monodromy {
        file: String,
        #[arg(long)]
        operator: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        center: i64,
    },
    RelativeMonodromy {
        file: String,
        #[arg(long)]
        operator: String,
        #[arg(long)]
        filtration: String,
    },
    KeyLemma {
        file: String,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    BuildSzk {
        file: String,
        #[arg(long)]
        complex: Option<String>,
        #[arg(long)]
        t: Option<String>,
    },
    EdgeCompare {
        file: String,
        #[arg(long, value_enum, default_value_t = WeightFiltration::P)]
        filtration: WeightFiltration,
    },
    MwCheck {
        file: String,
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<i64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SampleKind {
    Nerve,
    Complex,
    Morphism,
    Operator,
    Explicit,
}

fn read(file: &str) -> Result<Document, CliError> {
    let text = if file == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(file)?
    };
    Document::parse(&text)
}

fn sample(kind: SampleKind, ring: Ring, seed: u64) -> Result<Document, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut doc = Document { ring: Some(ring.to_string()), ..Document::default() };
    match kind {
        SampleKind::Nerve => {
            let curves = rng.gen_bool(0.5);
            let inc = gen::nerve(rng.gen_range(1..=4), rng.gen_range(0..=2), curves, &mut rng);
            let model = if curves { StratumModel::Curves } else { StratumModel::Points };
            let commands = vec![
                Command::BuildSzk { complex: None, t: None },
                Command::Spectral { complex: None, filtration: WeightFiltration::P, pages: 2 },
                Command::EdgeCompare { filtration: WeightFiltration::P },
                Command::EdgeCompare { filtration: WeightFiltration::PD },
            ];
            doc = export::nerve_document(ring, &inc, model, true, commands);
        }
        SampleKind::Complex => {
            let c = gen::filtered_complex(ring, 3, 3, true, &mut rng);
            export::add_complex(&mut doc, "C", &c);
            doc.commands.push(Command::Cohomology { complex: "C".into() });
            doc.commands.push(Command::Spectral { complex: Some("C".into()), filtration: WeightFiltration::P, pages: 3 });
        }
        SampleKind::Morphism => {
            let f = gen::filtered_morphism(ring, 3, 2, true, &mut rng);
            export::add_complex(&mut doc, "A", f.source());
            export::add_complex(&mut doc, "B", f.target());
            let maps: Vec<_> = (f.lo()..=f.source().hi()).map(|q| f.map(q)).collect();
            export::add_morphism(&mut doc, "f", "A", "B", &maps);
            doc.commands.push(Command::StrictCheck { morphism: "f".into() });
            doc.commands.push(Command::QisCheck { morphism: "f".into() });
        }
        SampleKind::Operator => {
            let sizes = gen::jordan_type(6, &mut rng);
            let v = gen::nilpotent(ring, &sizes, &mut rng);
            let term = BifilteredModule::trivial(v.space().clone(), false);
            export::add_complex(&mut doc, "V", &BifilteredComplex::concentrated(term, 0));
            export::add_morphism(&mut doc, "N", "V", "V", &[v.power(1)]);
            doc.commands.push(Command::Monodromy { operator: "N".into(), center: 0 });
        }
        SampleKind::Explicit => {
            let (k, t) = gen::explicit_t(ring, 3, &mut rng);
            let terms: Vec<_> = (k.lo()..=k.hi())
                .map(|q| {
                    let m = k.term(q).clone();
                    let p = Filtration::trivial(&m, 0);
                    BifilteredModule::new(m, p, None).expect("trivial filtration")
                })
                .collect();
            let diffs = (k.lo()..k.hi()).map(|q| k.diff(q)).collect();
            let kc = BifilteredComplex::new(ring, k.lo(), terms, diffs).map_err(CliError::engine("sample"))?;
            export::add_complex(&mut doc, "K", &kc);
            export::add_morphism(&mut doc, "T", "K", "K", &t);
            doc.commands.push(Command::BuildSzk { complex: Some("K".into()), t: Some("T".into()) });
        }
    }
    Ok(doc)
}

enum Output {
    Document(Document),
    /// `true` for `run`, which always prints an array.
    Reports(Vec<Report>, bool),
}

fn execute(cli: &Cli) -> Result<Output, CliError> {
    let ring = cli.ring.as_deref();
    let one = |file: &str, cmd: Command| -> Result<Output, CliError> {
        let model = Model::build(&read(file)?, ring)?;
        Ok(Output::Reports(vec![Runner::new(&model).run(&cmd)?], false))
    };
    match &cli.command {
        Cmd::Normalize { file } => Ok(Output::Document(Model::build(&read(file)?, ring)?.normalized)),
        Cmd::Fixture { name } => {
            let doc = export::fixture(name)?;
            Ok(Output::Document(Model::build(&doc, ring)?.normalized))
        }
        Cmd::Sample { kind } => {
            let r = model::resolve_ring(None, Some(ring.unwrap_or("fp:3")))?;
            let doc = sample(*kind, r, cli.seed)?;
            Ok(Output::Document(Model::build(&doc, None)?.normalized))
        }
        Cmd::Run { file } => {
            let model = Model::build(&read(file)?, ring)?;
            let runner = Runner::new(&model);
            let reports = model.commands.iter().map(|c| runner.run(c)).collect::<Result<Vec<_>, _>>()?;
            Ok(Output::Reports(reports, true))
        }
        Cmd::Cohomology { file, complex } => one(file, Command::Cohomology { complex: complex.clone() }),
        Cmd::Gr { file, complex, k1, k2 } => one(file, Command::Gr { complex: complex.clone(), k1: *k1, k2: *k2 }),
        Cmd::StrictCheck { file, morphism } => one(file, Command::StrictCheck { morphism: morphism.clone() }),
        Cmd::QisCheck { file, morphism } => one(file, Command::QisCheck { morphism: morphism.clone() }),
        Cmd::Spectral { file, complex, filtration, pages } => {
            one(file, Command::Spectral { complex: complex.clone(), filtration: *filtration, pages: *pages })
        }
        Cmd::Monodromy { file, operator, center } => one(file, Command::Monodromy { operator: operator.clone(), center: *center }),
        Cmd::RelativeMonodromy { file, operator, filtration } => {
            one(file, Command::RelativeMonodromy { operator: operator.clone(), filtration: filtration.clone() })
        }
        Cmd::KeyLemma { file, u, v, w, f, g } => {
            one(file, Command::KeyLemma { u: u.clone(), v: v.clone(), w: w.clone(), f: f.clone(), g: g.clone() })
        }
        Cmd::BuildSzk { file, complex, t } => one(file, Command::BuildSzk { complex: complex.clone(), t: t.clone() }),
        Cmd::EdgeCompare { file, filtration } => one(file, Command::EdgeCompare { filtration: *filtration }),
        Cmd::MwCheck { file, degree } => one(file, Command::MwCheck { degree: *degree }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Ok(Output::Document(doc)) => {
            print!("{}", doc.emit());
            ExitCode::SUCCESS
        }
        Ok(Output::Reports(reports, listed)) => {
            match cli.format {
                Format::Json => {
                    let v = match reports.as_slice() {
                        [one] if !listed => one.to_json(),
                        many => Value::Array(many.iter().map(Report::to_json).collect()),
                    };
                    let mut s = String::new();
                    doc::pretty(&v, 0, &mut s);
                    println!("{s}");
                }
                Format::Text => {
                    for r in &reports {
                        println!("== {} [{}]", r.op, if r.status == Status::Ok { "ok" } else { "fail" });
                        for line in &r.text {
                            println!("{line}");
                        }
                    }
                }
            }
            if reports.iter().any(|r| r.status == Status::Fail) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
    }
}
