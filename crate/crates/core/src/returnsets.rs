//! Finite tables of `R_{u_1}(E) ∩ … ∩ R_{u_k}(E)` with per-entry provenance.

use std::io::Write;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::bohr::{BohrSpec, DiffStatus, TruncatedSet, Witness};
use crate::exactreal::ExactError;
use crate::hardy::IterateSeq;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReturnError {
    #[error("horizon mismatch: {0} vs {1}")]
    HorizonMismatch(u64, u64),
    #[error("iterate {0} does not fit in 64 bits")]
    Overflow(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    InWithWitness(u64),
    /// Shift passes the `2δ` torus test and the spec is in the independent case.
    InByTorus,
    /// No witness below the bound; evidence only.
    NotFoundUpTo(u64),
    /// Some `‖φ_i r‖ ≥ 2δ_i`: no witness can exist.
    CertOut,
}

impl Status {
    pub fn is_in(&self) -> bool {
        matches!(self, Status::InWithWitness(_) | Status::InByTorus)
    }

    fn name(&self) -> &'static str {
        match self {
            Status::InWithWitness(_) => "InWithWitness",
            Status::InByTorus => "InByTorus",
            Status::NotFoundUpTo(_) => "NotFoundUpTo",
            Status::CertOut => "CertOut",
        }
    }

    fn witness(&self) -> Option<u64> {
        match self {
            Status::InWithWitness(m) => Some(*m),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    /// Torus test first, witness search only when it cannot decide.
    TorusFirst,
    /// Witness search for every entry; a failed search is upgraded to
    /// `CertOut` when the necessary torus condition fails.
    WitnessOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Row {
    pub n: u64,
    pub r: Vec<u64>,
    pub status: Vec<Status>,
}

impl Row {
    pub fn all_in(&self) -> bool {
        self.status.iter().all(Status::is_in)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReturnTable {
    pub range: (u64, u64),
    pub witness_bound: u64,
    pub mode: Mode,
    pub rows: Vec<Row>,
}

fn shift(r: &BigInt) -> Result<u64, ReturnError> {
    // R_u depends on |u| only: m, m+u ∈ E  ⟺  m+u, (m+u)+|u| ∈ E for u < 0
    r.abs().to_u64().ok_or_else(|| ReturnError::Overflow(r.to_string()))
}

/// Status of one shift `r` under the given mode.
pub fn shift_status(
    spec: &BohrSpec,
    members: &TruncatedSet,
    r: u64,
    bound: u64,
    mode: Mode,
) -> Result<Status, ExactError> {
    let diff = spec.return_diff_test(r)?;
    if mode == Mode::TorusFirst {
        match diff {
            DiffStatus::CertOut => return Ok(Status::CertOut),
            DiffStatus::CertIn => return Ok(Status::InByTorus),
            DiffStatus::NeedWitness => {}
        }
    }
    Ok(match spec.witness_search_in(members, r, bound)? {
        Witness::Found(m) => Status::InWithWitness(m),
        Witness::NotFoundUpTo(_) if diff == DiffStatus::CertOut => Status::CertOut,
        Witness::NotFoundUpTo(b) => Status::NotFoundUpTo(b),
    })
}

pub fn return_table(
    spec: &BohrSpec,
    seqs: &[IterateSeq],
    range: (u64, u64),
    witness_bound: u64,
    mode: Mode,
    cap_bits: u32,
) -> Result<ReturnTable, ReturnError> {
    let (members, _) = spec.enumerate_with_density(witness_bound)?;
    return_table_with(spec, &members, seqs, range, witness_bound, mode, cap_bits)
}

/// As [`return_table`], reusing an enumeration of `E ∩ [1, witness_bound]`.
pub fn return_table_with(
    spec: &BohrSpec,
    members: &TruncatedSet,
    seqs: &[IterateSeq],
    range: (u64, u64),
    witness_bound: u64,
    mode: Mode,
    cap_bits: u32,
) -> Result<ReturnTable, ReturnError> {
    let (a, b) = range;
    let rows = (a.max(1)..=b)
        .into_par_iter()
        .map(|n| {
            let mut r = Vec::with_capacity(seqs.len());
            let mut status = Vec::with_capacity(seqs.len());
            for s in seqs {
                let ri = shift(&s.iterate(n, cap_bits)?)?;
                let st = shift_status(spec, members, ri, witness_bound, mode)?;
                r.push(ri);
                status.push(st);
            }
            Ok(Row { n, r, status })
        })
        .collect::<Result<Vec<_>, ReturnError>>()?;
    Ok(ReturnTable {
        range,
        witness_bound,
        mode,
        rows,
    })
}

impl ReturnTable {
    /// The `n` with every status positive.
    pub fn intersection(&self) -> TruncatedSet {
        let xs = self.rows.iter().filter(|r| r.all_in()).map(|r| r.n).collect();
        TruncatedSet::new(xs, self.range.1, "return-table intersection").expect("rows are ordered")
    }

    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for row in &self.rows {
            let rec = json!({
                "n": row.n,
                "r": row.r,
                "status": row.status.iter().map(Status::name).collect::<Vec<_>>(),
                "witness": row.status.iter().map(Status::witness).collect::<Vec<_>>(),
            });
            writeln!(w, "{rec}")?;
        }
        Ok(())
    }

    /// Witnesses that fail membership under the slow interval path.
    pub fn reverify_witnesses(&self, spec: &BohrSpec, cap_bits: u32) -> Result<Vec<(u64, u64)>, ExactError> {
        let mut bad = Vec::new();
        for row in &self.rows {
            for (r, st) in row.r.iter().zip(&row.status) {
                if let Status::InWithWitness(m) = st {
                    if !(spec.member_slow(*m, cap_bits)? && spec.member_slow(m + r, cap_bits)?) {
                        bad.push((row.n, *m));
                    }
                }
            }
        }
        Ok(bad)
    }
}

pub fn intersect(a: &TruncatedSet, b: &TruncatedSet) -> Result<TruncatedSet, ReturnError> {
    if a.horizon() != b.horizon() {
        return Err(ReturnError::HorizonMismatch(a.horizon(), b.horizon()));
    }
    let xs = a.elements().iter().copied().filter(|&x| b.contains(x)).collect();
    Ok(
        TruncatedSet::new(xs, a.horizon(), format!("({}) & ({})", a.provenance(), b.provenance()))
            .expect("subset of a sorted set"),
    )
}
