//! On-disk snapshot of a search run.
//!
//! The file is JSON: an envelope with a format tag, a version and the SHA-256
//! of the canonical serialisation of the state. Restoring reproduces the run
//! bit for bit, RNG included.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::walker::Walker;
use super::{Search, SearchParams, SearchStats};
use crate::error::{Error, Result};
use crate::scheme::{box_masks, verify_words};

const FORMAT: &str = "flipgraph-checkpoint";
const VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct State {
    params: SearchParams,
    rng: Xoshiro256PlusPlus,
    /// Active terms followed by frozen ones.
    terms: Vec<[u64; 3]>,
    active: usize,
    dirty: Vec<u32>,
    best: Vec<[u64; 3]>,
    stats: SearchStats,
    pass: u32,
    stage: usize,
    stage_iter: u64,
    iteration: u64,
    plus_counter: u64,
    finished: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    state: State,
}

fn digest(state: &Value) -> String {
    // Value maps are key-sorted, so this string is canonical.
    hex::encode(Sha256::digest(state.to_string().as_bytes()))
}

fn reject(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

impl Checkpoint {
    pub(super) fn capture(s: &Search) -> Result<Self> {
        let mut terms = s.walker.terms.clone();
        terms.extend_from_slice(&s.walker.frozen);
        if !verify_words(s.params.dims, terms.iter().copied()) {
            return Err(reject("current scheme does not verify; refusing to write"));
        }
        Ok(Self {
            state: State {
                params: s.params.clone(),
                rng: s.rng.clone(),
                active: s.walker.terms.len(),
                terms,
                dirty: s.walker.dirty.clone(),
                best: s.best.clone(),
                stats: s.stats.clone(),
                pass: s.pass,
                stage: s.stage,
                stage_iter: s.stage_iter,
                iteration: s.iteration,
                plus_counter: s.plus_counter,
                finished: s.finished,
            },
        })
    }

    pub fn iteration(&self) -> u64 {
        self.state.iteration
    }

    pub fn params(&self) -> &SearchParams {
        &self.state.params
    }

    pub fn to_json(&self) -> Result<String> {
        let state = serde_json::to_value(&self.state).map_err(|e| reject(e.to_string()))?;
        let env = serde_json::json!({
            "format": FORMAT,
            "version": VERSION,
            "sha256": digest(&state),
            "state": state,
        });
        serde_json::to_string_pretty(&env).map_err(|e| reject(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let env: Value =
            serde_json::from_str(text).map_err(|e| reject(format!("not valid JSON: {e}")))?;
        if env.get("format").and_then(Value::as_str) != Some(FORMAT) {
            return Err(reject("format tag missing or wrong"));
        }
        match env.get("version").and_then(Value::as_u64) {
            Some(VERSION) => {}
            v => return Err(reject(format!("unsupported version {v:?}"))),
        }
        let stored = env
            .get("sha256")
            .and_then(Value::as_str)
            .ok_or_else(|| reject("sha256 field missing"))?;
        let state = env.get("state").ok_or_else(|| reject("state missing"))?;
        if digest(state) != stored {
            return Err(reject("sha256 mismatch: file is corrupt or was edited"));
        }
        let state: State = serde_json::from_value(state.clone())
            .map_err(|e| reject(format!("state does not decode: {e}")))?;
        let cp = Self { state };
        cp.check()?;
        Ok(cp)
    }

    fn check(&self) -> Result<()> {
        let st = &self.state;
        let p = &st.params;
        p.validate().map_err(|e| reject(format!("parameters: {e}")))?;
        if st.stage >= p.schedule.len() {
            return Err(reject(format!("stage index {} out of range", st.stage)));
        }
        if st.active > st.terms.len() {
            return Err(reject("active count exceeds the number of terms"));
        }
        if st.dirty.iter().any(|&d| d as usize >= st.active) {
            return Err(reject("dirty list refers to a missing term"));
        }
        let lens = p.dims.lens();
        let fits = |t: &[u64; 3]| {
            (0..3).all(|s| t[s] != 0 && (lens[s] == 64 || t[s] >> lens[s] == 0))
        };
        if !st.terms.iter().all(fits) || !st.best.iter().all(fits) {
            return Err(reject("a term has a zero or oversized component"));
        }
        if !verify_words(p.dims, st.terms.iter().copied()) {
            return Err(reject("current scheme does not verify"));
        }
        if !verify_words(p.dims, st.best.iter().copied()) {
            return Err(reject("best scheme does not verify"));
        }
        if st.best.len() != st.stats.best_rank {
            return Err(reject("best scheme rank disagrees with the statistics"));
        }
        let masks = box_masks(p.dims, p.schedule[st.stage].constraint);
        let inside = |t: &[u64; 3]| (0..3).all(|s| t[s] & !masks[s] == 0);
        let (active, frozen) = st.terms.split_at(st.active);
        if !active.iter().all(inside) || frozen.iter().any(inside) {
            return Err(reject("active/frozen split does not match the stage box"));
        }
        Ok(())
    }

    /// Writes atomically: a temporary file in the same directory is renamed
    /// over `path`.
    pub fn write(&self, path: &Path) -> Result<()> {
        let text = self.to_json()?;
        let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let name = path
            .file_name()
            .ok_or_else(|| reject(format!("{} is not a file path", path.display())))?;
        let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
        drop(f);
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub(super) fn restore(self) -> Result<Search> {
        self.check()?;
        let st = self.state;
        let mut terms = st.terms;
        let frozen = terms.split_off(st.active);
        let mut walker = Walker::new(st.params.dims, terms, frozen);
        walker.dirty = st.dirty;
        Ok(Search {
            params: st.params,
            rng: st.rng,
            walker,
            best: st.best,
            stats: st.stats,
            pass: st.pass,
            stage: st.stage,
            stage_iter: st.stage_iter,
            iteration: st.iteration,
            plus_counter: st.plus_counter,
            finished: st.finished,
            events: Vec::new(),
        })
    }
}
