//! Graphs created by input form submissions.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use thiserror::Error;

use semrender_core::rdf::{parse_graph, serialize_graph, Graph, ParseError, RdfFormat};

#[derive(Debug, Error)]
pub enum SubmissionError {
    #[error("submission storage error at {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("stored submission {path} is invalid: {source}")]
    Corrupt { path: PathBuf, source: ParseError },
}

#[derive(Default)]
struct State {
    next: u64,
    graphs: BTreeMap<u64, Graph>,
}

/// Numbered submissions, optionally mirrored to `<dir>/<id>.nt`.
pub struct SubmissionStore {
    dir: Option<PathBuf>,
    state: Mutex<State>,
}

impl SubmissionStore {
    pub fn in_memory() -> SubmissionStore {
        SubmissionStore {
            dir: None,
            state: Mutex::new(State::default()),
        }
    }

    pub fn open(dir: impl Into<PathBuf>) -> Result<SubmissionStore, SubmissionError> {
        let dir = dir.into();
        let io_err = |path: &Path| {
            let path = path.to_owned();
            move |source| SubmissionError::Io { path, source }
        };
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let mut state = State::default();
        for entry in fs::read_dir(&dir).map_err(io_err(&dir))? {
            let path = entry.map_err(io_err(&dir))?.path();
            let id = path
                .extension()
                .filter(|x| *x == "nt")
                .and_then(|_| path.file_stem()?.to_str()?.parse::<u64>().ok());
            let Some(id) = id else { continue };
            let text = fs::read_to_string(&path).map_err(io_err(&path))?;
            let g = parse_graph(&text, RdfFormat::NTriples).map_err(|source| {
                SubmissionError::Corrupt {
                    path: path.clone(),
                    source,
                }
            })?;
            state.next = state.next.max(id + 1);
            state.graphs.insert(id, g);
        }
        Ok(SubmissionStore {
            dir: Some(dir),
            state: Mutex::new(state),
        })
    }

    /// Stores a graph and returns its id.
    pub fn store(&self, g: Graph) -> Result<u64, SubmissionError> {
        let mut state = self.state.lock().unwrap_or_else(|e| e.into_inner());
        let id = state.next;
        if let Some(dir) = &self.dir {
            let path = dir.join(format!("{id}.nt"));
            let tmp = dir.join(format!("{id}.tmp"));
            let io_err = |path: &Path| {
                let path = path.to_owned();
                move |source| SubmissionError::Io { path, source }
            };
            fs::write(&tmp, serialize_graph(&g, RdfFormat::NTriples)).map_err(io_err(&tmp))?;
            fs::rename(&tmp, &path).map_err(io_err(&path))?;
        }
        state.next = id + 1;
        state.graphs.insert(id, g);
        Ok(id)
    }

    pub fn get(&self, id: u64) -> Option<Graph> {
        let state = self.state.lock().unwrap_or_else(|e| e.into_inner());
        state.graphs.get(&id).cloned()
    }

    pub fn len(&self) -> usize {
        self.state.lock().unwrap_or_else(|e| e.into_inner()).graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use semrender_core::rdf::{Term, Triple};

    fn graph(n: &str) -> Graph {
        let t = Triple::new(
            Term::iri(format!("http://e/{n}")).unwrap(),
            Term::iri("http://e/p").unwrap(),
            Term::literal(n),
        )
        .unwrap();
        [t].into_iter().collect()
    }

    #[test]
    fn ids_survive_reopen() {
        let dir = tempfile::tempdir().unwrap();
        {
            let store = SubmissionStore::open(dir.path()).unwrap();
            assert_eq!(store.store(graph("a")).unwrap(), 0);
            assert_eq!(store.store(graph("b")).unwrap(), 1);
        }
        let store = SubmissionStore::open(dir.path()).unwrap();
        assert_eq!(store.len(), 2);
        assert_eq!(store.get(1), Some(graph("b")));
        assert_eq!(store.store(graph("c")).unwrap(), 2);
    }
}
