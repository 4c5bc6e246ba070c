#![allow(dead_code)]

pub mod invariants;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use dualab::algebra::Algebra;
use dualab::field::{FieldKind, Fp};
use dualab::parse::PresentationDocument;
use dualab::report::{run, Bounds, Command, Report};
use dualab::table::Window;

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus_text(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(format!("{name}.pres"))).unwrap()
}

/// Every presentation in the corpus, by file stem, sorted.
pub fn corpus_names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| {
            let p = e.unwrap().path();
            (p.extension()? == "pres").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names
}

/// The corpus algebra; every corpus file is over a prime field.
pub fn corpus_algebra(name: &str) -> Arc<Algebra<Fp>> {
    let doc = PresentationDocument::parse(&corpus_text(name)).unwrap();
    let FieldKind::Prime(p) = doc.field else {
        panic!("{name} is not over a prime field")
    };
    Arc::new(Algebra::new(doc.presentation(Fp::new(p).unwrap()).unwrap()))
}

#[derive(Clone, Debug)]
pub struct Case {
    pub command: Command,
    pub presentation: String,
    pub dual: Option<String>,
    pub bounds: Bounds,
}

impl Case {
    pub fn golden_path(&self) -> PathBuf {
        let mut name = format!("{}.{}", self.presentation, self.command.name());
        if let Some(d) = &self.dual {
            name.push('.');
            name.push_str(d);
        }
        corpus_dir().join("golden").join(format!("{name}.json"))
    }

    pub fn run(&self) -> Report {
        let text = corpus_text(&self.presentation);
        let dual = self.dual.as_deref().map(corpus_text);
        run(self.command, &text, dual.as_deref(), &self.bounds).unwrap()
    }
}

pub fn manifest() -> Vec<Case> {
    let text = std::fs::read_to_string(corpus_dir().join("manifest.txt")).unwrap();
    text.lines()
        .map(|l| l.split('#').next().unwrap().trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            let mut it = l.split_whitespace();
            let command: Command = it.next().unwrap().parse().unwrap();
            let presentation = it.next().unwrap().to_string();
            let mut case = Case {
                command,
                presentation,
                dual: None,
                bounds: Bounds::default(),
            };
            while let Some(flag) = it.next() {
                let value = it.next().unwrap();
                match flag {
                    "--dual" => case.dual = Some(value.to_string()),
                    "--smax" => case.bounds.s_max = Some(value.parse().unwrap()),
                    "--wmax" => case.bounds.w_max = Some(value.parse().unwrap()),
                    "--window" => {
                        let (lo, hi) = value.split_once(':').unwrap();
                        case.bounds.window = Some(Window::new(lo.parse().unwrap(), hi.parse().unwrap()));
                    }
                    other => panic!("unknown manifest option {other}"),
                }
            }
            case
        })
        .collect()
}
