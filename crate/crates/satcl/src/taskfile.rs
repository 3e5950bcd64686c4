//! JSON task-file format.
//!
//! A task file is a single JSON document:
//!
//! ```json
//! {
//!   "dim_x": 1,
//!   "dim_y": 1,
//!   "tasks": [
//!     { "atoms": [["1", "3/4"]] },
//!     { "atoms": [["1", "7/4"], ["1/2", "-1"]] }
//!   ]
//! }
//! ```
//!
//! Every atom is a flat array of `dim_x + dim_y` rational strings
//! (inputs first, then outputs). Rationals are `p/q` strings, never
//! floats, so save/load round-trips exactly. A single-task document may
//! put the `atoms` array at top level instead of wrapping it in `tasks`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::criteria::{Atom, EmpiricalTask};
use crate::error::{Error, Result};
use crate::rat::{format_rat, parse_rat, Rat, RatVec};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaskFile {
    pub dim_x: usize,
    pub dim_y: usize,
    #[serde(default)]
    pub tasks: Vec<TaskEntry>,
    /// Single-task shorthand; mutually exclusive with `tasks`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TaskEntry {
    pub atoms: Vec<Vec<String>>,
}

impl TaskFile {
    pub fn to_tasks(&self) -> Result<Vec<EmpiricalTask>> {
        let entries: Vec<TaskEntry> = match (self.tasks.is_empty(), self.atoms.is_empty()) {
            (false, true) => self.tasks.clone(),
            (true, false) => vec![TaskEntry {
                atoms: self.atoms.clone(),
            }],
            (true, true) => return Err(Error::InvalidInput("task file has no tasks".into())),
            (false, false) => {
                return Err(Error::InvalidInput(
                    "task file has both `tasks` and a top-level `atoms`".into(),
                ))
            }
        };
        let width = self.dim_x + self.dim_y;
        let mut tasks = Vec::with_capacity(entries.len());
        for (i, entry) in entries.iter().enumerate() {
            let mut atoms = Vec::with_capacity(entry.atoms.len());
            for atom in &entry.atoms {
                if atom.len() != width {
                    return Err(Error::InvalidInput(format!(
                        "atom of task {} has {} entries; dim_x + dim_y = {width}",
                        i + 1,
                        atom.len()
                    )));
                }
                let coords: Result<Vec<Rat>> = atom.iter().map(|s| parse_rat(s)).collect();
                let coords = coords?;
                let (x, y) = coords.split_at(self.dim_x);
                atoms.push(Atom::new(RatVec::new(x.to_vec()), RatVec::new(y.to_vec())));
            }
            tasks.push(EmpiricalTask::new(i + 1, atoms)?);
        }
        Ok(tasks)
    }

    pub fn from_tasks(tasks: &[EmpiricalTask]) -> Result<Self> {
        if tasks.is_empty() {
            return Err(Error::InvalidInput("no tasks to serialize".into()));
        }
        let dim_x = tasks[0].dim_x();
        let dim_y = tasks[0].dim_y();
        let entries = tasks
            .iter()
            .map(|t| TaskEntry {
                atoms: t
                    .atoms()
                    .iter()
                    .map(|a| {
                        a.x.iter()
                            .chain(a.y.iter())
                            .map(format_rat)
                            .collect::<Vec<String>>()
                    })
                    .collect(),
            })
            .collect();
        Ok(TaskFile {
            dim_x,
            dim_y,
            tasks: entries,
            atoms: Vec::new(),
        })
    }
}

pub fn load(path: &Path) -> Result<Vec<EmpiricalTask>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: TaskFile =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad task file: {e}")))?;
    file.to_tasks()
}

pub fn save(path: &Path, tasks: &[EmpiricalTask]) -> Result<()> {
    let file = TaskFile::from_tasks(tasks)?;
    let text = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::Parse(format!("serialization failed: {e}")))?;
    crate::harness::write_text(path, &(text + "\n"))
}
