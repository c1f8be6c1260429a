//! One runner per subcommand. Runners take the loaded config plus the
//! flag/env overrides, drive the library, and hand back a [`JobOutput`]
//! (JSON results, exit class, summary lines, CSV rows). Errors returned
//! from a runner are usage or config problems; rigorous negative verdicts
//! come back inside the output with the matching exit class.

use crate::config::{literal, Job, Overrides, Resolved};
use crate::report::{
    branch_value, chaos_value, crossing_value, csv_rows, orbit_value, status_str, stretch_value,
    zero_search_value, CsvRow, ExitClass, JobOutput,
};
use anyhow::{anyhow, bail, Context, Result};
use horseshoe::covering::{
    certificate_from_sampling, check_boundary_stretching, check_face_covering,
    check_phase_covering, falsify_by_sampling, StretchEvidence,
};
use horseshoe::cutting::{
    cut_function, cuts, distance_field, intersect_cutting_sets, path_near_continuum, side_of,
    CutVerdict, GridSet, GridSpace,
};
use horseshoe::dynsys::ExprField;
use horseshoe::geometry::check_crossing;
use horseshoe::miranda::{find_fixed_points, track_zero_branch, ZeroSearchOptions};
use horseshoe::symbolic::{
    chaos_report, find_periodic_orbit, symbol_stretch, verify_itinerary, ChaosOptions,
    ItineraryVerdict, SymbolWord,
};
use horseshoe::{Error, Interval, Scalar, Status};
use serde_json::{json, Value};

fn positive<S: Scalar>(what: &str, v: S) -> Result<S> {
    if v > S::zero() {
        Ok(v)
    } else {
        bail!("{what} must be positive")
    }
}

fn tol_of<S: Scalar>(ov: &Overrides, from_config: Option<&str>, default: &str) -> Result<S> {
    let text = ov.tol.as_deref().or(from_config).unwrap_or(default);
    positive("tolerance", literal::<S>(text)?)
}

pub fn run_verify_covering<S: Scalar>(job: &Job, ov: &Overrides) -> Result<JobOutput> {
    let res = Resolved::<S>::build(job)?;
    let cov = job
        .config
        .covering
        .as_ref()
        .ok_or_else(|| anyhow!("config has no [covering] section"))?;
    if cov.check.is_empty() {
        bail!("[covering] lists no [[covering.check]] entries");
    }
    let mode = ov.mode();
    let seed = ov.seed.or(job.config.seed).unwrap_or(0);

    let mut checks = Vec::new();
    let mut class = ExitClass::Pass;
    let mut lines = Vec::new();
    let mut csv: Vec<CsvRow> = Vec::new();
    for (i, ck) in cov.check.iter().enumerate() {
        let name = ck.name.clone().unwrap_or_else(|| format!("check {i}"));
        let source = res.rect(&ck.source)?;
        let target = res.rect(&ck.target)?;
        let cert = match ck.method.as_str() {
            "face" => {
                let dirs = ck.directions.clone().unwrap_or_else(|| vec![source.axis()]);
                check_face_covering(&res.map, source.body(), target.body(), &dirs, mode)?
            }
            "boundary" => check_boundary_stretching(&res.map, source, target, None, mode)?,
            "slab" => {
                let slab_name = ck
                    .slab
                    .as_deref()
                    .ok_or_else(|| anyhow!("check `{name}`: slab method needs a slab rectangle"))?;
                check_boundary_stretching(&res.map, source, target, Some(res.rect(slab_name)?), mode)?
            }
            "phase" => {
                let axis = ck.expansion_axis.unwrap_or_else(|| target.axis());
                let tgt = match &ck.phase_target {
                    Some([lo, hi]) => Interval::new(literal::<S>(lo)?, literal::<S>(hi)?)
                        .map_err(|e| anyhow!("check `{name}`: bad phase_target: {e}"))?,
                    None => target.body().comp(axis).clone(),
                };
                check_phase_covering(&res.map, source, &tgt, axis)?
            }
            "sampled" => {
                let n_paths = ck.n_paths.or(cov.n_paths).unwrap_or(16);
                let n_samples = ck.n_samples.or(cov.n_samples).unwrap_or(128);
                let verdict = falsify_by_sampling(&res.map, source, target, n_paths, n_samples, seed)?;
                certificate_from_sampling(source, target, n_paths, n_samples, seed, &verdict)
            }
            other => bail!("check `{name}`: unknown method `{other}`"),
        };
        class = class.join(ExitClass::of(cert.status));
        lines.push(format!("{name} [{}]: {}", ck.method, cert.status));
        if let StretchEvidence::Boundary { image, .. } = &cert.evidence {
            csv.extend(csv_rows(&format!("{name}.image"), image));
        }
        let mut val = stretch_value(&name, &cert);
        if let Some(ename) = &ck.crossing {
            let e = res.rect(ename)?;
            let cc = check_crossing(e, source, target);
            class = class.join(ExitClass::of(cc.status));
            lines.push(format!("{name} [crossing {ename}]: {}", cc.status));
            val["crossing"] = crossing_value(ename, &cc);
        }
        checks.push(val);
    }
    Ok(JobOutput { results: json!({ "checks": checks }), class, lines, csv })
}

pub fn run_fixed_points<S: Scalar>(job: &Job, ov: &Overrides) -> Result<JobOutput> {
    let res = Resolved::<S>::build(job)?;
    let fp = job
        .config
        .fixed_points
        .as_ref()
        .ok_or_else(|| anyhow!("config has no [fixed_points] section"))?;
    if fp.search.is_empty() {
        bail!("[fixed_points] lists no [[fixed_points.search]] entries");
    }
    let opts = ZeroSearchOptions {
        tol: tol_of::<S>(ov, fp.tol.as_deref(), "1e-9")?,
        max_boxes: ov.budget.or(fp.budget).unwrap_or(100_000),
        allow_boundary_inflation: true,
    };
    let mode = ov.mode();

    let mut searches = Vec::new();
    let mut class = ExitClass::Pass;
    let mut lines = Vec::new();
    let mut csv: Vec<CsvRow> = Vec::new();
    for (i, sc) in fp.search.iter().enumerate() {
        let region = res.rect(&sc.region)?;
        let mut entry = json!({ "region": sc.region });
        if let Some(tname) = &sc.stretch_to {
            let target = res.rect(tname)?;
            let cert = check_boundary_stretching(&res.map, region, target, None, mode)?;
            class = class.join(ExitClass::of(cert.status));
            lines.push(format!("{} stretches over {tname}: {}", sc.region, cert.status));
            entry["stretch"] = stretch_value(&format!("{} -> {tname}", sc.region), &cert);
        }
        let mut search_box = region.body().clone();
        if let Some(ename) = &sc.crossing {
            let tname = sc.stretch_to.as_deref().ok_or_else(|| {
                anyhow!("search `{}`: crossing needs stretch_to for the second rectangle", sc.region)
            })?;
            let e = res.rect(ename)?;
            let cc = check_crossing(e, region, res.rect(tname)?);
            class = class.join(ExitClass::of(cc.status));
            lines.push(format!("{ename} crosses {} over {tname}: {}", sc.region, cc.status));
            entry["crossing"] = crossing_value(ename, &cc);
            search_box = search_box
                .intersect(e.body())
                .ok_or_else(|| anyhow!("crossing witness `{ename}` misses region `{}`", sc.region))?;
        }
        let search = find_fixed_points(&res.map, &search_box, &opts)?;
        let certified = search.certified().count();
        for z in &search.enclosures {
            if z.status != Status::Certified {
                class = class.join(ExitClass::Unknown);
            }
        }
        if search.budget_exhausted {
            class = class.join(ExitClass::Unknown);
        }
        for (j, z) in search.certified().enumerate() {
            csv.extend(csv_rows(&format!("search[{i}].zero[{j}]"), &z.enclosure));
        }
        lines.push(format!(
            "{}: {certified} certified fixed point{} ({} enclosures, {} boxes)",
            sc.region,
            if certified == 1 { "" } else { "s" },
            search.enclosures.len(),
            search.boxes_processed,
        ));
        entry["search"] = zero_search_value(&search);
        searches.push(entry);
    }
    Ok(JobOutput { results: json!({ "searches": searches }), class, lines, csv })
}

fn parse_word(text: &str, m: usize) -> Result<SymbolWord> {
    let letters = text
        .trim()
        .chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as usize)
                .ok_or_else(|| anyhow!("word `{text}` has non-digit letter `{c}`"))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(&bad) = letters.iter().find(|&&l| l >= m) {
        bail!("word `{text}` uses letter {bad} but only {m} symbol sets are declared");
    }
    SymbolWord::new(m, letters, true).map_err(|e| anyhow!("word `{text}`: {e}"))
}

pub fn run_periodic_orbits<S: Scalar>(job: &Job, ov: &Overrides) -> Result<JobOutput> {
    let res = Resolved::<S>::build(job)?;
    let oc = job
        .config
        .orbits
        .as_ref()
        .ok_or_else(|| anyhow!("config has no [orbits] section"))?;
    let m = res.ksets.len();
    if m < 2 {
        bail!("periodic orbits need at least two [[kset]] entries, found {m}");
    }
    if oc.words.is_empty() {
        bail!("[orbits] lists no words");
    }
    let x = res.rect(&oc.x)?;
    let opts = ZeroSearchOptions {
        tol: tol_of::<S>(ov, oc.tol.as_deref(), "1e-9")?,
        max_boxes: ov.budget.or(oc.budget).unwrap_or(200_000),
        allow_boundary_inflation: true,
    };

    let mut class = ExitClass::Pass;
    let mut lines = Vec::new();
    let mut csv: Vec<CsvRow> = Vec::new();

    let mut certs = Vec::with_capacity(m);
    let mut stretch_vals = Vec::with_capacity(m);
    for (i, k) in res.ksets.iter().enumerate() {
        let cert = symbol_stretch(&res.map, x, k)?;
        class = class.join(ExitClass::of(cert.status));
        lines.push(format!("symbol {i} stretches {}: {}", oc.x, cert.status));
        stretch_vals.push(stretch_value(&format!("symbol {i}"), &cert));
        certs.push(cert);
    }

    let mut orbit_vals = Vec::new();
    if certs.iter().all(|c| c.status == Status::Certified) {
        let ks_bodies: Vec<_> = res.ksets.iter().map(|k| k.body().clone()).collect();
        for text in &oc.words {
            let word = parse_word(text, m)?;
            let rec = find_periodic_orbit(&res.map, &certs, &word, &opts)?;
            class = class.join(ExitClass::of(rec.status));
            lines.push(format!("orbit {text}: {}", rec.status));
            let mut val = orbit_value(&rec);
            if rec.status == Status::Certified {
                for (j, b) in rec.enclosures.iter().enumerate() {
                    csv.extend(csv_rows(&format!("orbit {text}[{j}]"), b));
                }
                if let Some(steps) = oc.itinerary_steps {
                    let check = verify_itinerary(&res.map, &rec.enclosures[0], &word, &ks_bodies, steps)?;
                    let verdict = match check.verdict {
                        ItineraryVerdict::Contained => "contained".to_string(),
                        ItineraryVerdict::Escaped(j) => format!("escaped at step {j}"),
                        ItineraryVerdict::Inflated(j) => format!("inflated at step {j}"),
                    };
                    val["itinerary_diagnostic"] = json!({ "steps": steps, "verdict": verdict });
                }
            }
            orbit_vals.push(val);
        }
    } else {
        lines.push("orbit searches skipped: not every symbol stretch is certified".to_string());
        class = class.join(ExitClass::Unknown);
    }

    Ok(JobOutput {
        results: json!({ "stretch": stretch_vals, "orbits": orbit_vals }),
        class,
        lines,
        csv,
    })
}

pub fn run_chaos_report<S: Scalar>(job: &Job, ov: &Overrides) -> Result<JobOutput> {
    let res = Resolved::<S>::build(job)?;
    let cc = job
        .config
        .chaos
        .as_ref()
        .ok_or_else(|| anyhow!("config has no [chaos] section"))?;
    if res.ksets.len() < 2 {
        bail!("a chaos report needs at least two [[kset]] entries");
    }
    let x = res.rect(&cc.x)?;
    let max_period = ov.max_period.or(cc.max_period).unwrap_or(3);
    if max_period == 0 {
        bail!("max_period must be at least 1");
    }
    let opts = ChaosOptions {
        tol: tol_of::<S>(ov, cc.tol.as_deref(), "1e-9")?,
        max_boxes: ov.budget.or(cc.budget).unwrap_or(200_000),
        word_cap: cc.word_cap.unwrap_or(4096),
    };

    let rep = chaos_report(&res.map, x, &res.ksets, max_period, &opts)?;
    let class = ExitClass::of(rep.status);
    let mut lines = Vec::new();
    for (i, c) in rep.stretch.iter().enumerate() {
        lines.push(format!("symbol {i} stretches {}: {}", cc.x, c.status));
    }
    let mut csv: Vec<CsvRow> = Vec::new();
    for p in &rep.periods {
        lines.push(format!(
            "period {}: {}/{} words certified, {} necklace{}{}",
            p.k,
            p.certified,
            p.orbits.len(),
            p.necklaces,
            if p.necklaces == 1 { "" } else { "s" },
            if p.disjoint { ", disjoint" } else { ", NOT disjoint" },
        ));
        for rec in &p.orbits {
            if rec.status == Status::Certified {
                let word = crate::report::word_string(&rec.word);
                for (j, b) in rec.enclosures.iter().enumerate() {
                    csv.extend(csv_rows(&format!("period {}.{word}[{j}]", p.k), b));
                }
            }
        }
    }
    lines.push(format!("entropy >= {} ({:.6})", rep.entropy.expression, rep.entropy.decimal));
    Ok(JobOutput { results: chaos_value(&rep), class, lines, csv })
}

pub fn run_branch_track<S: Scalar>(job: &Job, ov: &Overrides) -> Result<JobOutput> {
    let res = Resolved::<S>::build(job)?;
    let bc = job
        .config
        .branch
        .as_ref()
        .ok_or_else(|| anyhow!("config has no [branch] section"))?;
    let search = res.rect(&bc.search)?.body().clone();
    let cell = positive("cell size", literal::<S>(&bc.cell)?)?;
    let tol = tol_of::<S>(ov, bc.tol.as_deref(), "1e-6")?;
    let max_cells = ov.budget.or(bc.budget).unwrap_or(1_000_000);
    let field = ExprField { map: &res.map, mode: ov.mode() };

    match track_zero_branch(&field, &search, bc.lambda_axis, &cell, &tol, max_cells) {
        Ok(track) => {
            let class = ExitClass::of(track.status);
            let mut lines = vec![format!(
                "branch over axis {}: {} (grid {:?}, {} cells retained)",
                track.lambda_axis,
                status_str(track.status),
                track.grid,
                track.retained,
            )];
            if let Some(chain) = &track.chain {
                lines.push(format!("chain of {} cells spans the parameter range", chain.boxes.len()));
            }
            let mut csv: Vec<CsvRow> = Vec::new();
            if let Some(chain) = &track.chain {
                for (j, b) in chain.boxes.iter().enumerate() {
                    csv.extend(csv_rows(&format!("chain[{j}]"), b));
                }
            }
            Ok(JobOutput { results: branch_value(&track), class, lines, csv })
        }
        // A certified sign refutation falsifies the branch hypothesis; an
        // unresolved face at the refinement floor is merely inconclusive.
        Err(Error::HypothesisFailed { reason }) => {
            let class = if reason.contains("same sign") { ExitClass::Fail } else { ExitClass::Unknown };
            let status = if class == ExitClass::Fail { "falsified" } else { "inconclusive" };
            Ok(JobOutput {
                results: json!({ "status": status, "reason": reason }),
                class,
                lines: vec![format!("branch hypothesis: {status} ({reason})")],
                csv: vec![],
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn grid_set<'m>(
    sets: &'m std::collections::BTreeMap<char, GridSet>,
    name: Option<&str>,
    what: &str,
) -> Result<&'m GridSet> {
    let name = name.ok_or_else(|| anyhow!("[cutting] op needs the `{what}` set"))?;
    let mut chars = name.chars();
    let (c, rest) = (chars.next(), chars.next());
    match (c, rest) {
        (Some(c), None) => sets
            .get(&c)
            .ok_or_else(|| anyhow!("fixture declares no set `{c}` (wanted for `{what}`)")),
        _ => bail!("set names are single fixture letters, got `{name}`"),
    }
}

fn coords_json(space: &GridSpace, cells: impl IntoIterator<Item = usize>) -> Value {
    Value::Array(cells.into_iter().map(|f| json!(space.coords(f))).collect())
}

pub fn run_cutting_lab(job: &Job) -> Result<JobOutput> {
    let cc = job
        .config
        .cutting
        .as_ref()
        .ok_or_else(|| anyhow!("config has no [cutting] section"))?;
    if cc.ops.is_empty() {
        bail!("[cutting] lists no ops");
    }
    let path = job.dir.join(&cc.fixture);
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("cannot read grid fixture {}", path.display()))?;
    let (space, sets) = GridSpace::parse_fixture(&text)?;

    let mut ops = Vec::new();
    let mut class = ExitClass::Pass;
    let mut lines = vec![format!(
        "grid {:?}: {} active cells, sets {:?}",
        space.dims(),
        space.active_count(),
        sets.keys().collect::<Vec<_>>(),
    )];
    for op in &cc.ops {
        let val = match op.as_str() {
            "cuts" => {
                let a = grid_set(&sets, cc.a.as_deref(), "a")?;
                let b = grid_set(&sets, cc.b.as_deref(), "b")?;
                let c = grid_set(&sets, cc.c.as_deref(), "c")?;
                let outcome = cuts(&space, a, b, c)?;
                let cls = if outcome.cut { ExitClass::Pass } else { ExitClass::Fail };
                class = class.join(cls);
                lines.push(format!(
                    "cuts: {}",
                    if outcome.cut { "c separates a from b" } else { "a reaches b avoiding c" },
                ));
                json!({
                    "op": "cuts",
                    "cut": outcome.cut,
                    "witness": outcome.witness.map(|w| coords_json(&space, w)),
                })
            }
            "function" => {
                let a = grid_set(&sets, cc.a.as_deref(), "a")?;
                let b = grid_set(&sets, cc.b.as_deref(), "b")?;
                let c = grid_set(&sets, cc.c.as_deref(), "c")?;
                let cf = cut_function(&space, a, b, c)?;
                let zeros = (0..space.total())
                    .filter(|&f| space.is_active(f) && cf.values[f] == 0)
                    .count();
                let (valid, violation) = match cf.verdict {
                    CutVerdict::Valid => (true, None),
                    CutVerdict::Invalid { cell } => (false, Some(json!(space.coords(cell)))),
                };
                class = class.join(if valid { ExitClass::Pass } else { ExitClass::Fail });
                lines.push(format!("function: {}", if valid { "valid" } else { "invalid" }));
                json!({
                    "op": "function",
                    "valid": valid,
                    "violation": violation,
                    "zero_cells": zeros,
                })
            }
            "sides" => {
                let a = grid_set(&sets, cc.a.as_deref(), "a")?;
                let b = grid_set(&sets, cc.b.as_deref(), "b")?;
                let (sa, sb) = side_of(&space, a, b)?;
                lines.push(format!(
                    "sides: |S(a)| = {}, |S(b)| = {}, disjoint = {}",
                    sa.len(),
                    sb.len(),
                    sa.is_disjoint_from(&sb),
                ));
                json!({
                    "op": "sides",
                    "side_a": sa.len(),
                    "side_b": sb.len(),
                    "disjoint": sa.is_disjoint_from(&sb),
                })
            }
            "near-path" => {
                let a = grid_set(&sets, cc.a.as_deref(), "a")?;
                let b = grid_set(&sets, cc.b.as_deref(), "b")?;
                let gamma = grid_set(&sets, cc.gamma.as_deref(), "gamma")?;
                let c = match cc.c.as_deref() {
                    Some(_) => Some(grid_set(&sets, cc.c.as_deref(), "c")?),
                    None => None,
                };
                let radius = cc.radius.unwrap_or(1);
                let found = path_near_continuum(&space, gamma, a, b, radius, c)?;
                class = class.join(if found.is_some() { ExitClass::Pass } else { ExitClass::Fail });
                match &found {
                    Some(np) => lines.push(format!(
                        "near-path: {} cells within radius {radius}{}",
                        np.path.len(),
                        match np.crossing {
                            Some(f) => format!(", crossing at {:?}", space.coords(f)),
                            None => String::new(),
                        },
                    )),
                    None => lines.push(format!("near-path: none within radius {radius}")),
                }
                json!({
                    "op": "near-path",
                    "radius": radius,
                    "found": found.is_some(),
                    "length": found.as_ref().map(|np| np.path.len()),
                    "crossing": found.as_ref().and_then(|np| np.crossing).map(|f| json!(space.coords(f))),
                    "path": found.as_ref().map(|np| coords_json(&space, np.path.iter().copied())),
                })
            }
            "intersect" => {
                let names = cc
                    .walls
                    .as_ref()
                    .ok_or_else(|| anyhow!("[cutting] intersect op needs a walls list"))?;
                let mut picked = Vec::with_capacity(names.len());
                for n in names {
                    picked.push(grid_set(&sets, Some(n), "walls")?.clone());
                }
                match intersect_cutting_sets(&space, &picked) {
                    Ok(common) => {
                        lines.push(format!("intersect: {} common cell(s)", common.len()));
                        json!({
                            "op": "intersect",
                            "status": "valid",
                            "count": common.len(),
                            "cells": coords_json(&space, common.cells()),
                        })
                    }
                    Err(Error::PreconditionFailed { reason }) => {
                        class = class.join(ExitClass::Fail);
                        lines.push(format!("intersect: not a cutting family ({reason})"));
                        json!({ "op": "intersect", "status": "invalid", "reason": reason })
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            "distance" => {
                let c = grid_set(&sets, cc.c.as_deref(), "c")?;
                let field = distance_field(&space, c)?;
                let max = field.iter().filter(|&&d| d != horseshoe::cutting::UNSET).max();
                lines.push(format!("distance: eccentricity {:?}", max.unwrap_or(&0)));
                json!({ "op": "distance", "max": max })
            }
            other => bail!("[cutting] unknown op `{other}`"),
        };
        ops.push(val);
    }
    Ok(JobOutput { results: json!({ "ops": ops }), class, lines, csv: vec![] })
}
