//! Batch execution of every `*.rk` script in a directory.

use std::path::{Path, PathBuf};

use regkit_core::Exec;
use serde::Serialize;

use crate::dsl::parse_session;
use crate::runner::{run, ResultDocument, RunFlags};

#[derive(Clone, Debug, Serialize)]
pub struct CorpusEntry {
    pub file: String,
    /// Parse diagnostic, when the script did not parse.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parse_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub document: Option<ResultDocument>,
}

impl CorpusEntry {
    pub fn exit_code(&self) -> i32 {
        match &self.document {
            Some(d) => d.exit_code(),
            None => 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusReport {
    pub entries: Vec<CorpusEntry>,
}

impl CorpusReport {
    pub fn exit_code(&self) -> i32 {
        let codes: Vec<i32> = self.entries.iter().map(CorpusEntry::exit_code).collect();
        if codes.contains(&2) {
            2
        } else if codes.contains(&1) {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    /// One line per script: file, command count, failed checks, errors, verdict.
    pub fn table(&self) -> String {
        let width = self.entries.iter().map(|e| e.file.len()).max().unwrap_or(4).max(4);
        let mut out = format!("{:<width$}  {:>8}  {:>6}  {:>6}  result\n", "file", "commands", "failed", "errors");
        for e in &self.entries {
            let (n, f, x) = match &e.document {
                Some(d) => (d.tally.commands, d.tally.check_failed, d.tally.errors),
                None => (0, 0, 1),
            };
            let verdict = match e.exit_code() {
                0 => "PASS",
                2 => "FAIL",
                _ => "ERROR",
            };
            out.push_str(&format!("{:<width$}  {n:>8}  {f:>6}  {x:>6}  {verdict}\n", e.file));
            if let Some(p) = &e.parse_error {
                out.push_str(&format!("    {p}\n"));
            }
        }
        let passed = self.entries.iter().filter(|e| e.exit_code() == 0).count();
        out.push_str(&format!("{passed}/{} scripts passed\n", self.entries.len()));
        out
    }
}

/// Scripts in `dir`, sorted by file name.
pub fn corpus_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "rk"))
        .collect();
    files.sort();
    Ok(files)
}

fn run_one(path: &Path, flags: &RunFlags) -> CorpusEntry {
    let file = path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return CorpusEntry { file, parse_error: Some(e.to_string()), document: None },
    };
    match parse_session(&text) {
        Ok(script) => {
            let doc = run(&script, &file, flags);
            CorpusEntry { file, parse_error: None, document: Some(doc) }
        }
        Err(d) => CorpusEntry { file, parse_error: Some(d.to_string()), document: None },
    }
}

/// Runs the scripts concurrently (each one sequentially) and reports them in file-name order.
pub fn run_corpus(dir: &Path, flags: &RunFlags, exec: Exec) -> std::io::Result<CorpusReport> {
    let files = corpus_files(dir)?;
    let inner = RunFlags { exec: Exec::Sequential, ..*flags };
    let entries = exec.map(&files, |p| run_one(p, &inner));
    Ok(CorpusReport { entries })
}
