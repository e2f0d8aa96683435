//! Run orchestration: configuration, chunk scheduling over a worker pool,
//! checkpoint/resume, isomorphism deduplication and table output.

mod checkpoint;
mod iso;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc;

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

pub use checkpoint::{chunk_key, parse_chunk_key, ChunkStatus, Checkpoint};
pub use iso::{embedding, is_isomorphic, IsoError};

use crate::minorations::{local_correction, max_applicable_norm};
use crate::polyarith::IntPolynomial;
use crate::sieve::{candidate_filter, chunk_list, enumerate_chunk, FieldRecord, SearchParams, SieveError};

#[derive(Debug, Error)]
pub enum TabError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),
    #[error("checkpoint was written for a different configuration")]
    ConfigMismatchOnResume,
    #[error("run stopped after {0} chunks")]
    Interrupted(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<SieveError> for TabError {
    fn from(e: SieveError) -> Self {
        TabError::InvalidConfig(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundSpec {
    Explicit(u64),
    /// The norm-5 local correction for the signature.
    Auto,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChunkSelection {
    All,
    List(Vec<(u32, i64)>),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub degree: usize,
    pub r1: usize,
    pub r2: usize,
    pub bound: BoundSpec,
    pub window: i64,
    pub jobs: usize,
    pub chunks: ChunkSelection,
    pub out: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    /// Stop after this many newly finished chunks, as if killed.
    pub stop_after: Option<usize>,
}

impl RunConfig {
    pub fn new(degree: usize, r1: usize, r2: usize, bound: BoundSpec) -> Self {
        RunConfig {
            degree,
            r1,
            r2,
            bound,
            window: crate::sieve::DEFAULT_WINDOW,
            jobs: 1,
            chunks: ChunkSelection::All,
            out: None,
            checkpoint: None,
            stop_after: None,
        }
    }

    pub fn resolved_bound(&self) -> Result<u64, TabError> {
        let b = match self.bound {
            BoundSpec::Explicit(b) => b,
            BoundSpec::Auto => u64::try_from(local_correction(self.degree, self.r1, self.r2, 5))
                .map_err(|_| TabError::InvalidConfig("bound exceeds 64 bits".into()))?,
        };
        if b == 0 {
            return Err(TabError::InvalidConfig("bound must be at least 1".into()));
        }
        Ok(b)
    }

    pub fn search_params(&self) -> Result<SearchParams, TabError> {
        if self.r1 + 2 * self.r2 != self.degree {
            return Err(TabError::InvalidConfig(format!(
                "signature ({}, {}) does not match degree {}",
                self.r1, self.r2, self.degree
            )));
        }
        let b = self.resolved_bound()?;
        let m = max_applicable_norm(self.degree, self.r1, self.r2, b as u128);
        Ok(SearchParams::new(self.degree, self.r1, self.r2, b, m, self.window)?)
    }
}

/// One isomorphism class with its representative first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoClass {
    pub d_k: BigInt,
    pub members: Vec<FieldRecord>,
}

impl IsoClass {
    pub fn rep(&self) -> &FieldRecord {
        &self.members[0]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResultTable {
    pub classes: Vec<IsoClass>,
    /// Records whose field discriminant could not be resolved.
    pub needs_attention: Vec<FieldRecord>,
    /// Pairs the isomorphism test could not decide; kept in separate classes.
    pub undecided_pairs: Vec<(IntPolynomial, IntPolynomial)>,
}

impl ResultTable {
    pub fn discriminants(&self) -> Vec<BigInt> {
        self.classes.iter().map(|c| c.d_k.clone()).collect()
    }

    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for class in &self.classes {
            for (i, r) in class.members.iter().enumerate() {
                let mut v = record_to_json(r);
                v["class_rep"] = json!(i == 0);
                s.push_str(&v.to_string());
                s.push('\n');
            }
        }
        for r in &self.needs_attention {
            let mut v = record_to_json(r);
            v["class_rep"] = json!(false);
            s.push_str(&v.to_string());
            s.push('\n');
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:>4}  {:>16}  {:>8}  polynomial", "#", "d_K", "index");
        for (i, c) in self.classes.iter().enumerate() {
            let r = c.rep();
            let idx = r.index.as_ref().map(|x| x.to_string()).unwrap_or_default();
            let _ = writeln!(s, "{:>4}  {:>16}  {:>8}  {}", i + 1, c.d_k, idx, r.poly);
        }
        let _ = writeln!(s, "{} fields", self.classes.len());
        if !self.needs_attention.is_empty() || !self.undecided_pairs.is_empty() {
            let _ = writeln!(s, "\nneeds attention:");
            for r in &self.needs_attention {
                let _ = writeln!(s, "  unresolved d_K  poly_disc {}  {}", r.poly_disc, r.poly);
            }
            for (a, b) in &self.undecided_pairs {
                let _ = writeln!(s, "  undecided isomorphism  {a}  ~  {b}");
            }
        }
        s
    }
}

fn big_json(x: &BigInt) -> Value {
    Value::Number(x.to_string().parse().expect("integer literal"))
}

pub(crate) fn record_to_json(r: &FieldRecord) -> Value {
    json!({
        "poly": r.poly.full_list().iter().map(big_json).collect::<Vec<_>>(),
        "r1": r.r1,
        "r2": r.r2,
        "poly_disc": big_json(&r.poly_disc),
        "d_K": r.d_k.as_ref().map(big_json),
        "index": r.index.as_ref().map(big_json),
    })
}

pub(crate) fn record_from_json(v: &Value) -> Option<FieldRecord> {
    let big = |v: &Value| -> Option<BigInt> {
        match v {
            Value::Number(n) => n.to_string().parse().ok(),
            _ => None,
        }
    };
    let opt_big = |v: &Value| -> Option<Option<BigInt>> {
        match v {
            Value::Null => Some(None),
            other => big(other).map(Some),
        }
    };
    let full: Vec<BigInt> = v.get("poly")?.as_array()?.iter().map(big).collect::<Option<_>>()?;
    Some(FieldRecord {
        poly: IntPolynomial::from_full_list(&full).ok()?,
        r1: v.get("r1")?.as_u64()? as usize,
        r2: v.get("r2")?.as_u64()? as usize,
        poly_disc: big(v.get("poly_disc")?)?,
        d_k: opt_big(v.get("d_K")?)?,
        index: opt_big(v.get("index")?)?,
        iso_class: None,
    })
}

/// Groups by `(signature, d_K)`, splits groups into isomorphism classes and
/// sorts classes by `|d_K|`, then by representative.
pub fn dedupe_classes(records: &[FieldRecord]) -> ResultTable {
    let mut groups: BTreeMap<(usize, usize, BigInt), Vec<FieldRecord>> = BTreeMap::new();
    let mut table = ResultTable::default();
    for r in records {
        match &r.d_k {
            Some(d) => groups.entry((r.r1, r.r2, d.clone())).or_default().push(r.clone()),
            None => table.needs_attention.push(r.clone()),
        }
    }
    for ((_, _, d), mut group) in groups {
        group.sort_by(|a, b| a.poly.cmp(&b.poly));
        group.dedup_by(|a, b| a.poly == b.poly);
        let mut classes: Vec<Vec<FieldRecord>> = Vec::new();
        for r in group {
            let mut placed = false;
            for class in classes.iter_mut() {
                match is_isomorphic(&r.poly, &class[0].poly) {
                    Ok(true) => {
                        class.push(r.clone());
                        placed = true;
                        break;
                    }
                    Ok(false) => {}
                    Err(_) => table.undecided_pairs.push((class[0].poly.clone(), r.poly.clone())),
                }
            }
            if !placed {
                classes.push(vec![r]);
            }
        }
        table.classes.extend(classes.into_iter().map(|members| IsoClass { d_k: d.clone(), members }));
    }
    table.classes.sort_by(|a, b| a.d_k.abs().cmp(&b.d_k.abs()).then_with(|| a.rep().poly.cmp(&b.rep().poly)));
    for (i, class) in table.classes.iter_mut().enumerate() {
        for m in class.members.iter_mut() {
            m.iso_class = Some(i as u64);
        }
    }
    table.needs_attention.sort_by(|a, b| a.poly.cmp(&b.poly));
    table
}

/// Accepted records of one chunk, in enumeration order.
pub fn process_chunk(params: &SearchParams, trace: u32, an: i64) -> Vec<FieldRecord> {
    enumerate_chunk(params, trace, an)
        .unwrap_or_default()
        .iter()
        .filter_map(|p| candidate_filter(p, params).ok())
        .collect()
}

pub fn run_search(config: &RunConfig) -> Result<ResultTable, TabError> {
    let params = config.search_params()?;
    let digest = checkpoint::config_digest(&params);
    let chunks = match &config.chunks {
        ChunkSelection::All => chunk_list(&params)?,
        ChunkSelection::List(l) => l.clone(),
    };
    let mut state = match &config.checkpoint {
        Some(path) if path.exists() => {
            let cp = Checkpoint::load(path)?;
            if cp.config_digest != digest {
                return Err(TabError::ConfigMismatchOnResume);
            }
            cp
        }
        _ => Checkpoint::new(digest),
    };
    for &c in &chunks {
        state.chunks.entry(c).or_insert(ChunkStatus::Pending);
    }
    let pending: Vec<(u32, i64)> =
        chunks.iter().copied().filter(|c| matches!(state.chunks.get(c), Some(ChunkStatus::Pending))).collect();

    let jobs = config.jobs.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| TabError::InvalidConfig(e.to_string()))?;
    let stop = AtomicBool::new(false);
    let mut finished = 0usize;
    let mut interrupted = false;
    std::thread::scope(|scope| -> Result<(), TabError> {
        let (tx, rx) = mpsc::channel::<((u32, i64), Vec<FieldRecord>)>();
        let params = &params;
        let stop = &stop;
        let pending = &pending;
        scope.spawn(move || {
            pool.install(|| {
                pending.par_iter().for_each_with(tx, |tx, &(t, an)| {
                    if stop.load(Ordering::Relaxed) {
                        return;
                    }
                    let _ = tx.send(((t, an), process_chunk(params, t, an)));
                });
            });
        });
        for (key, records) in rx {
            if interrupted {
                continue;
            }
            state.chunks.insert(key, ChunkStatus::Done(records));
            finished += 1;
            if let Some(path) = &config.checkpoint {
                state.save(path)?;
            }
            if config.stop_after.is_some_and(|k| finished >= k) && finished < pending.len() {
                interrupted = true;
                stop.store(true, Ordering::Relaxed);
            }
        }
        Ok(())
    })?;
    if interrupted {
        return Err(TabError::Interrupted(finished));
    }

    let records: Vec<FieldRecord> = chunks
        .iter()
        .filter_map(|c| match state.chunks.get(c) {
            Some(ChunkStatus::Done(r)) => Some(r.iter().cloned()),
            _ => None,
        })
        .flatten()
        .collect();
    let table = dedupe_classes(&records);
    if let Some(out) = &config.out {
        std::fs::write(out, table.to_jsonl())?;
    }
    Ok(table)
}
