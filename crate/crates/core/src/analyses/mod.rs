//! Executable checks of the properties liftings are expected to have:
//! inclusion preservation, the partial map `gmap` and its graph lemma,
//! structural mappability over sequences, and the free theorem for
//! `∀α. α → Seq α`.

mod free_theorem;
mod gmap;
mod preservation;
mod sequences;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use free_theorem::{
    all_candidates, check_free_theorem, sweep_candidates, CandidatePoly, FreeTheoremReport, PhaseOneFailure,
    SweepReport,
};
pub use gmap::{check_graph_lemma, gmap, gmap_with, GmapResult, GraphLemmaReport, GraphLemmaRow};
pub use preservation::{check_preservation, check_preservation_on, PreservationReport, Violation};
pub use sequences::{contains_only, mappable_structural, Mappable, SeqShape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
            Verdict::NotApplicable => "NOT APPLICABLE",
        })
    }
}
