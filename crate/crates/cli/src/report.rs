//! Report assembly. Every command produces one JSON document written to
//! stdout (or `--out`), with human summary lines on stderr. Field order is
//! fixed and all numeric endpoints are rendered outward, so reruns of the
//! same config are byte-identical except for the trailing `timing_ms`.

use crate::render::{box_json, hi_string, interval_json, lo_string, point_json, point_string};
use horseshoe::covering::{FaceViolation, PointWitness, StretchCertificate, StretchEvidence, StretchMethod};
use horseshoe::dynsys::EvalMode;
use horseshoe::geometry::CrossingCertificate;
use horseshoe::interval::Side;
use horseshoe::miranda::{BranchTrack, MirandaCertificate, SignPattern, ZeroEnclosure, ZeroSearch};
use horseshoe::symbolic::{ChaosReport, OrbitRecord, PeriodReport, StepEvidence};
use horseshoe::{Scalar, Status};
use serde::Serialize;
use serde_json::{json, Value};

/// Three-way outcome fold across everything a command checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    Pass,
    Unknown,
    Fail,
}

impl ExitClass {
    pub fn of(status: Status) -> Self {
        match status {
            Status::Certified => ExitClass::Pass,
            Status::Falsified => ExitClass::Fail,
            Status::Inconclusive => ExitClass::Unknown,
        }
    }

    pub fn join(self, other: Self) -> Self {
        use ExitClass::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Unknown, _) | (_, Unknown) => Unknown,
            _ => Pass,
        }
    }

    pub fn code(self) -> i32 {
        match self {
            ExitClass::Pass => 0,
            ExitClass::Fail => 2,
            ExitClass::Unknown => 3,
        }
    }

    pub fn word(self) -> &'static str {
        match self {
            ExitClass::Pass => "pass",
            ExitClass::Fail => "fail",
            ExitClass::Unknown => "unknown",
        }
    }
}

/// What a job hands back to `main`.
pub struct JobOutput {
    pub results: Value,
    pub class: ExitClass,
    /// Human summary, one line per check, printed to stderr.
    pub lines: Vec<String>,
    /// Enclosure rows for the optional CSV dump.
    pub csv: Vec<CsvRow>,
}

pub struct CsvRow {
    pub context: String,
    pub axis: usize,
    pub lo: String,
    pub hi: String,
}

pub fn csv_rows<S: Scalar>(context: &str, b: &horseshoe::BoxN<S>) -> Vec<CsvRow> {
    b.comps()
        .iter()
        .enumerate()
        .map(|(axis, c)| CsvRow {
            context: context.to_string(),
            axis,
            lo: lo_string(c.lo()),
            hi: hi_string(c.hi()),
        })
        .collect()
}

/// The envelope. `timing_ms` stays last so a line filter can strip the only
/// nondeterministic field.
#[derive(Serialize)]
pub struct Report {
    pub tool: String,
    pub command: String,
    pub config_hash: String,
    pub scalar: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub results: Value,
    pub status: String,
    pub exit_code: i32,
    pub timing_ms: u128,
}

impl Report {
    pub fn assemble(
        command: &str,
        config_hash: &str,
        scalar: &str,
        seed: Option<u64>,
        out: &JobOutput,
        timing_ms: u128,
    ) -> Self {
        Report {
            tool: format!("horseshoe {}", env!("CARGO_PKG_VERSION")),
            command: command.to_string(),
            config_hash: config_hash.to_string(),
            scalar: scalar.to_string(),
            seed,
            results: out.results.clone(),
            status: out.class.word().to_string(),
            exit_code: out.class.code(),
            timing_ms,
        }
    }
}

pub fn status_str(s: Status) -> &'static str {
    match s {
        Status::Certified => "certified",
        Status::Falsified => "falsified",
        Status::Inconclusive => "inconclusive",
    }
}

fn method_str(m: StretchMethod) -> &'static str {
    match m {
        StretchMethod::FaceCovering => "face",
        StretchMethod::Boundary => "boundary",
        StretchMethod::Slab => "slab",
        StretchMethod::Phase => "phase",
        StretchMethod::Sampled => "sampled",
    }
}

fn mode_str(m: EvalMode) -> &'static str {
    match m {
        EvalMode::Permissive => "permissive",
        EvalMode::Strict => "strict",
    }
}

fn pattern_str(p: SignPattern) -> &'static str {
    match p {
        SignPattern::NegToPos => "-+",
        SignPattern::PosToNeg => "+-",
    }
}

fn side_str(s: Side) -> &'static str {
    match s {
        Side::Left => "left",
        Side::Right => "right",
    }
}

fn witness_value<S: Scalar>(w: &PointWitness<S>) -> Value {
    json!({
        "point": point_json(&w.point),
        "side": side_str(w.side),
        "value": interval_json(&w.value),
    })
}

fn violation_value<S: Scalar>(v: &FaceViolation<S>) -> Value {
    json!({
        "axis": v.axis,
        "left": interval_json(&v.left),
        "right": interval_json(&v.right),
        "straight": witness_value(&v.straight),
        "swapped": witness_value(&v.swapped),
    })
}

fn evidence_value<S: Scalar>(e: &StretchEvidence<S>) -> Value {
    match e {
        StretchEvidence::FaceCovering { directions, axes, contractions, violation } => json!({
            "directions": directions,
            "axes": axes
                .iter()
                .map(|a| {
                    json!({
                        "axis": a.axis,
                        "swapped": a.swapped,
                        "left": interval_json(&a.left),
                        "right": interval_json(&a.right),
                    })
                })
                .collect::<Vec<_>>(),
            "contractions": contractions
                .iter()
                .map(|(axis, iv)| json!({ "axis": axis, "image": interval_json(iv) }))
                .collect::<Vec<_>>(),
            "violation": violation.as_ref().map(violation_value),
        }),
        StretchEvidence::Boundary { swapped, image, left_image, right_image } => json!({
            "swapped": swapped,
            "image": box_json(image),
            "left_image": box_json(left_image),
            "right_image": box_json(right_image),
        }),
        StretchEvidence::Phase { left_phase, right_phase, gap, mirrored, amplitude } => json!({
            "left_phase": interval_json(left_phase),
            "right_phase": interval_json(right_phase),
            "gap": lo_string(gap),
            "mirrored": mirrored,
            "amplitude": interval_json(amplitude),
        }),
        StretchEvidence::Sampled { n_paths, n_samples, seed, counterexample } => json!({
            "n_paths": n_paths,
            "n_samples": n_samples,
            "seed": seed,
            "counterexample_path": counterexample,
        }),
    }
}

pub fn stretch_value<S: Scalar>(name: &str, cert: &StretchCertificate<S>) -> Value {
    json!({
        "name": name,
        "method": method_str(cert.method),
        "mode": mode_str(cert.mode),
        "status": status_str(cert.status),
        "source": box_json(cert.source.body()),
        "source_axis": cert.source.axis(),
        "target": box_json(cert.target.body()),
        "target_axis": cert.target.axis(),
        "k": box_json(&cert.k),
        "evidence": evidence_value(&cert.evidence),
        "reason": cert.reason,
    })
}

pub fn crossing_value(name: &str, cert: &CrossingCertificate) -> Value {
    json!({
        "name": name,
        "status": status_str(cert.status),
        "contained": cert.contained,
        "vertical_in_a": cert.vertical_in_a,
        "horizontal_in_b": cert.horizontal_in_b,
        "reason": cert.reason,
    })
}

fn miranda_value<S: Scalar>(cert: &MirandaCertificate<S>) -> Value {
    json!({
        "domain": box_json(&cert.domain),
        "axes": cert
            .evidence
            .iter()
            .map(|a| {
                json!({
                    "axis": a.axis,
                    "pattern": pattern_str(a.pattern),
                    "left": interval_json(&a.left),
                    "right": interval_json(&a.right),
                })
            })
            .collect::<Vec<_>>(),
        "preconditioned": cert.preconditioner.is_some(),
        "preconditioner": cert.preconditioner.as_ref().map(|m| {
            m.iter()
                .map(|row| row.iter().map(point_string).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        }),
    })
}

pub fn zero_value<S: Scalar>(z: &ZeroEnclosure<S>) -> Value {
    json!({
        "enclosure": box_json(&z.enclosure),
        "status": status_str(z.status),
        "boundary_inflated": z.boundary_inflated,
        "non_isolated": z.non_isolated,
        "certificate": z.certificate.as_ref().map(miranda_value),
        "reason": z.reason,
    })
}

pub fn zero_search_value<S: Scalar>(s: &ZeroSearch<S>) -> Value {
    json!({
        "zeros": s.enclosures.iter().map(zero_value).collect::<Vec<_>>(),
        "certified": s.certified().count(),
        "budget_exhausted": s.budget_exhausted,
        "boxes_processed": s.boxes_processed,
    })
}

fn step_value<S: Scalar>(st: &StepEvidence<S>) -> Value {
    json!({
        "step": st.step,
        "letter": st.letter,
        "enclosure": box_json(&st.enclosure),
        "contained": st.contained,
        "clipped": st.clipped,
    })
}

pub fn word_string(word: &horseshoe::symbolic::SymbolWord) -> String {
    word.letters().iter().map(|l| l.to_string()).collect::<Vec<_>>().join("")
}

pub fn orbit_value<S: Scalar>(rec: &OrbitRecord<S>) -> Value {
    json!({
        "word": word_string(&rec.word),
        "status": status_str(rec.status),
        "points": rec.enclosures.iter().map(box_json).collect::<Vec<_>>(),
        "anchor": zero_value(&rec.anchor),
        "itinerary": rec.itinerary.iter().map(step_value).collect::<Vec<_>>(),
        "boxes_processed": rec.boxes_processed,
        "reason": rec.reason,
    })
}

fn period_value<S: Scalar>(p: &PeriodReport<S>) -> Value {
    json!({
        "period": p.k,
        "words": p.orbits.len(),
        "certified": p.certified,
        "necklaces": p.necklaces,
        "disjoint": p.disjoint,
        "orbits": p.orbits.iter().map(orbit_value).collect::<Vec<_>>(),
    })
}

pub fn chaos_value<S: Scalar>(rep: &ChaosReport<S>) -> Value {
    json!({
        "symbols": rep.m,
        "status": status_str(rep.status),
        "stretch": rep
            .stretch
            .iter()
            .enumerate()
            .map(|(i, c)| stretch_value(&format!("symbol {i}"), c))
            .collect::<Vec<_>>(),
        "periods": rep.periods.iter().map(period_value).collect::<Vec<_>>(),
        "entropy": {
            "expression": rep.entropy.expression,
            "decimal": rep.entropy.decimal,
        },
    })
}

pub fn branch_value<S: Scalar>(t: &BranchTrack<S>) -> Value {
    json!({
        "lambda_axis": t.lambda_axis,
        "grid": t.grid,
        "retained": t.retained,
        "status": status_str(t.status),
        "hypothesis": t
            .hypothesis
            .iter()
            .map(|h| {
                json!({
                    "axis": h.axis,
                    "component": h.component,
                    "pattern": pattern_str(h.pattern),
                    "left": interval_json(&h.left),
                    "right": interval_json(&h.right),
                })
            })
            .collect::<Vec<_>>(),
        "chain": t.chain.as_ref().map(|c| {
            json!({
                "cells": c.boxes.len(),
                "touches_lo": c.touches_lo,
                "touches_hi": c.touches_hi,
                "boxes": c.boxes.iter().map(box_json).collect::<Vec<_>>(),
                "facets": c
                    .facets
                    .iter()
                    .map(|f| json!({ "axis": f.axis, "facet": box_json(&f.facet) }))
                    .collect::<Vec<_>>(),
            })
        }),
        "reason": t.reason,
    })
}

/// Serialize the report as pretty JSON with a trailing newline.
pub fn to_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn write_csv(path: &std::path::Path, rows: &[CsvRow]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["context", "axis", "lo", "hi"])?;
    for r in rows {
        w.write_record([r.context.as_str(), &r.axis.to_string(), &r.lo, &r.hi])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_classes_fold_pessimistically() {
        use ExitClass::*;
        assert_eq!(Pass.join(Pass), Pass);
        assert_eq!(Pass.join(Unknown), Unknown);
        assert_eq!(Unknown.join(Fail), Fail);
        assert_eq!(Fail.join(Pass), Fail);
        assert_eq!(Pass.code(), 0);
        assert_eq!(Fail.code(), 2);
        assert_eq!(Unknown.code(), 3);
    }

    #[test]
    fn report_keeps_timing_last() {
        let out = JobOutput {
            results: json!({ "checks": [] }),
            class: ExitClass::Pass,
            lines: vec![],
            csv: vec![],
        };
        let rep = Report::assemble("verify-covering", "sha256:00", "f64", None, &out, 12);
        let text = to_json(&rep);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[lines.len() - 2].trim_start().starts_with("\"timing_ms\""));
        assert_eq!(*lines.last().unwrap(), "}");
    }
}
