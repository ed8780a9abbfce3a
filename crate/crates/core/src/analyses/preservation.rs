use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde_json::{json, Value};

use super::Verdict;
use crate::error::{Error, Result};
use crate::kernel::{Env, Term, TypeExpr};
use crate::lifting::{cell_set_contains, cell_set_includes, CellSet, Cells, Judgment, LiftEngine, Mode};
use crate::relations::{includes, Rel, RelUniverse};

/// `smaller ⊆ larger`, yet only `smaller` lifts to a relation between
/// `left` and `right`.
#[derive(Clone, Debug)]
pub struct Violation {
    pub smaller: Rel,
    pub larger: Rel,
    pub left: Term,
    pub right: Term,
    pub related: Judgment,
    pub unrelated: Judgment,
}

#[derive(Clone, Debug)]
pub struct PreservationReport {
    pub decl: String,
    pub mode: Mode,
    pub depth: usize,
    pub type_pairs: Vec<(TypeExpr, TypeExpr)>,
    /// Relations whose lifting was materialized.
    pub relations: u64,
    /// Ordered pairs `R ⊆ S` covered by the check.
    pub inclusions: u128,
    pub verdict: Verdict,
    pub violation: Option<Violation>,
    pub inconclusive: Option<String>,
    pub elapsed: Duration,
}

impl Violation {
    pub fn to_json(&self) -> Value {
        json!({
            "smaller": self.smaller.to_json(),
            "larger": self.larger.to_json(),
            "left": self.left.to_string(),
            "right": self.right.to_string(),
            "related": self.related.to_json(),
            "unrelated": self.unrelated.to_json(),
        })
    }
}

impl PreservationReport {
    fn new(decl: &str, mode: Mode, depth: usize) -> Self {
        PreservationReport {
            decl: decl.to_string(),
            mode,
            depth,
            type_pairs: Vec::new(),
            relations: 0,
            inclusions: 0,
            verdict: Verdict::Pass,
            violation: None,
            inconclusive: None,
            elapsed: Duration::ZERO,
        }
    }

    pub fn universe_json(&self) -> Value {
        json!({
            "decl": self.decl,
            "mode": self.mode,
            "depth": self.depth,
            "type_pairs": self.type_pairs.iter().map(|(a, b)| json!([a.to_string(), b.to_string()])).collect::<Vec<_>>(),
            "relations": self.relations,
            "inclusions": self.inclusions.to_string(),
        })
    }
}

fn violation(engine: &LiftEngine, cells: &Cells, r: &Rel, s: &Rel, lr: &CellSet, ls: &CellSet) -> Result<Violation> {
    let c = (0..cells.len())
        .find(|&c| cell_set_contains(lr, c) && !cell_set_contains(ls, c))
        .expect("a cell separates the two liftings");
    let (x, y) = cells.pair(c);
    Ok(Violation {
        smaller: r.clone(),
        larger: s.clone(),
        left: x.clone(),
        right: y.clone(),
        related: engine.check(std::slice::from_ref(r), x, y)?,
        unrelated: engine.check(std::slice::from_ref(s), x, y)?,
    })
}

/// Lifting every relation in `rels`, each as one index.
fn lift_all(engine: &LiftEngine, cells: &Cells, rels: &[Rel]) -> Result<Vec<CellSet>> {
    rels.par_iter()
        .map(|r| engine.relate_cells(std::slice::from_ref(r), cells))
        .collect()
}

fn caps_or(e: Error, report: &mut PreservationReport) -> Result<()> {
    match e {
        Error::Caps(m) => {
            report.verdict = Verdict::Inconclusive;
            report.inconclusive = Some(m);
            Ok(())
        }
        other => Err(other),
    }
}

fn unary(decl: &str, env: &Env) -> Result<()> {
    let d = env.require_decl(decl)?;
    if d.arity() != 1 {
        return Err(Error::unsupported(format!(
            "preservation checks take one relation; `{decl}` has {} indices",
            d.arity()
        )));
    }
    Ok(())
}

/// Checks `Ĝ R ⊆ Ĝ S` for every `R ⊆ S` between any two types of
/// `types`, on values up to `depth`. Inclusion is checked on covering
/// pairs `R ⊂ R ∪ {p}`, which yields every pair by transitivity.
pub fn check_preservation(decl: &str, mode: Mode, types: &[TypeExpr], depth: usize, env: &Env) -> Result<PreservationReport> {
    unary(decl, env)?;
    let start = Instant::now();
    let engine = LiftEngine::new(env, decl, mode)?;
    let mut report = PreservationReport::new(decl, mode, depth);
    'pairs: for a in types {
        for b in types {
            report.type_pairs.push((a.clone(), b.clone()));
            let universe = match RelUniverse::new(a, b, env) {
                Ok(u) => u,
                Err(e) => {
                    caps_or(e, &mut report)?;
                    continue;
                }
            };
            let cells = engine.cells(std::slice::from_ref(a), std::slice::from_ref(b), depth)?;
            let masks: Vec<u64> = (0..universe.size()).collect();
            let lifted: Vec<CellSet> = match masks
                .par_iter()
                .map(|&m| engine.relate_cells(&[universe.rel(m)], &cells))
                .collect::<Result<_>>()
            {
                Ok(l) => l,
                Err(e) => {
                    caps_or(e, &mut report)?;
                    continue;
                }
            };
            report.relations += universe.size();
            report.inclusions += 3u128.pow(universe.cells() as u32);
            for m in 0..universe.size() {
                for bit in 0..universe.cells() {
                    let s = m | 1 << bit;
                    if s == m || cell_set_includes(&lifted[m as usize], &lifted[s as usize]) {
                        continue;
                    }
                    let (r, s_rel) = (universe.rel(m), universe.rel(s));
                    report.violation = Some(violation(
                        &engine,
                        &cells,
                        &r,
                        &s_rel,
                        &lifted[m as usize],
                        &lifted[s as usize],
                    )?);
                    report.verdict = Verdict::Fail;
                    break 'pairs;
                }
            }
        }
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

/// As [`check_preservation`], over the ordered pairs `R ⊆ S` of an
/// explicit list of relations.
pub fn check_preservation_on(decl: &str, mode: Mode, rels: &[Rel], depth: usize, env: &Env) -> Result<PreservationReport> {
    unary(decl, env)?;
    let start = Instant::now();
    let engine = LiftEngine::new(env, decl, mode)?;
    let mut report = PreservationReport::new(decl, mode, depth);
    let mut groups: Vec<((TypeExpr, TypeExpr), Vec<Rel>)> = Vec::new();
    for r in rels {
        let key = (r.src().clone(), r.tgt().clone());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, g)) => g.push(r.clone()),
            None => groups.push((key, vec![r.clone()])),
        }
    }
    for ((a, b), group) in groups {
        report.type_pairs.push((a.clone(), b.clone()));
        let cells = engine.cells(&[a], &[b], depth)?;
        let lifted = match lift_all(&engine, &cells, &group) {
            Ok(l) => l,
            Err(e) => {
                caps_or(e, &mut report)?;
                continue;
            }
        };
        report.relations += group.len() as u64;
        for (i, r) in group.iter().enumerate() {
            for (j, s) in group.iter().enumerate() {
                if !includes(r, s) {
                    continue;
                }
                report.inclusions += 1;
                if report.violation.is_none() && !cell_set_includes(&lifted[i], &lifted[j]) {
                    report.violation = Some(violation(&engine, &cells, r, s, &lifted[i], &lifted[j])?);
                    report.verdict = Verdict::Fail;
                }
            }
        }
    }
    report.elapsed = start.elapsed();
    Ok(report)
}
