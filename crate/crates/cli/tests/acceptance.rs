//! End-to-end acceptance checks, one test per criterion. Each test pins the
//! documented behaviour at its stated tolerance and asserts its runtime
//! budget, so a slow regression fails as loudly as a wrong answer.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use horseshoe::covering::{check_face_covering, check_phase_covering, StretchEvidence};
use horseshoe::cutting::{cut_function, cuts, side_of, CutVerdict, GridSet, GridSpace};
use horseshoe::dynsys::{EvalMode, ExprField, ExprMap, Horseshoe, MapSpec, TrigParams};
use horseshoe::geometry::OrientedRect;
use horseshoe::miranda::{find_fixed_points, find_zeros, track_zero_branch, ZeroSearchOptions};
use horseshoe::symbolic::{chaos_report, ChaosOptions};
use horseshoe::{BoxN, Interval, Rational, Scalar, Status};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn unit_square<S: Scalar>() -> BoxN<S> {
    BoxN::from_endpoints(vec![(S::zero(), S::one()), (S::zero(), S::one())]).unwrap()
}

/// Per-coordinate affine data of the two canonical branches, matching the
/// map x' = x/3, y' = 3y and x' = 1 - x/3, y' = 3 - 3y.
fn branch_affine(coord: usize, branch: usize) -> (Rational, Rational) {
    match (coord, branch) {
        (0, 0) => (q(1, 3), q(0, 1)),
        (0, 1) => (q(-1, 3), q(1, 1)),
        (1, 0) => (q(3, 1), q(0, 1)),
        (1, 1) => (q(-3, 1), q(3, 1)),
        _ => unreachable!(),
    }
}

/// Exact orbit of the periodic point whose itinerary repeats `word`:
/// compose the per-letter affine maps coordinate-wise, solve the
/// fixed-point equation t = A t + B, then iterate forward.
fn orbit_oracle(word: &[usize]) -> Vec<Vec<Rational>> {
    let k = word.len();
    let mut points = vec![vec![q(0, 1); 2]; k];
    for coord in 0..2 {
        let mut a = q(1, 1);
        let mut b = q(0, 1);
        for &w in word {
            let (alpha, beta) = branch_affine(coord, w);
            a = &alpha * &a;
            b = &alpha * &b + &beta;
        }
        let mut t = &b / (q(1, 1) - &a);
        for (j, p) in points.iter_mut().enumerate() {
            p[coord] = t.clone();
            let (alpha, beta) = branch_affine(coord, word[j]);
            t = &alpha * &t + &beta;
        }
    }
    points
}

#[test]
fn trig_example_face_falsified_phase_certified() {
    let start = Instant::now();
    let params = TrigParams::new(0.6f64, 0.5, 4, 3, 1).unwrap();
    let spec = MapSpec::TrigExample(params);
    let square = unit_square::<f64>();
    let rect = OrientedRect::new(square.clone(), 0).unwrap();

    let face = check_face_covering(&spec, &square, &square, &[0], EvalMode::Permissive).unwrap();
    assert_eq!(face.status, Status::Falsified);
    let StretchEvidence::FaceCovering { violation, .. } = &face.evidence else {
        panic!("face check must carry face-covering evidence");
    };
    let v = violation.as_ref().expect("falsification must carry a witness");
    let witness = v.left.hull(&v.right);
    assert!(
        *witness.lo() < 0.0 && *witness.hi() > 1.0,
        "witness {witness:?} must fold below 0 and above 1"
    );

    let target = Interval::new(0.0f64, 1.0).unwrap();
    let phase = check_phase_covering(&spec, &rect, &target, 0).unwrap();
    assert_eq!(phase.status, Status::Certified);
    let StretchEvidence::Phase { gap, .. } = &phase.evidence else {
        panic!("phase check must carry phase evidence");
    };
    assert!(*gap >= 1.0, "phase gap {gap} must cover at least one period");

    assert!(start.elapsed() < Duration::from_secs(1), "took {:?}", start.elapsed());
}

#[test]
fn horseshoe_strip_fixed_points_match_affine_oracle() {
    let start = Instant::now();
    let map = MapSpec::AffineHorseshoe(Horseshoe::<f64>::canonical(2).unwrap());
    let opts = ZeroSearchOptions {
        tol: 1e-10f64,
        max_boxes: 100_000,
        allow_boundary_inflation: true,
    };
    let strips = [
        BoxN::from_endpoints(vec![(0.0, 1.0), (0.0, 1.0 / 3.0)]).unwrap(),
        BoxN::from_endpoints(vec![(0.0, 1.0), (2.0 / 3.0, 1.0)]).unwrap(),
    ];
    for (branch, strip) in strips.iter().enumerate() {
        // Independent oracle: solve (1 - alpha) t = beta per coordinate.
        let oracle: Vec<Rational> = (0..2)
            .map(|coord| {
                let (alpha, beta) = branch_affine(coord, branch);
                &beta / (q(1, 1) - &alpha)
            })
            .collect();
        let expected = if branch == 0 { vec![q(0, 1); 2] } else { vec![q(3, 4); 2] };
        assert_eq!(oracle, expected);

        let search = find_fixed_points(&map, strip, &opts).unwrap();
        assert!(!search.budget_exhausted);
        assert_eq!(search.enclosures.len(), 1, "strip {branch}: one enclosure");
        let z = &search.enclosures[0];
        assert_eq!(z.status, Status::Certified, "strip {branch}: {:?}", z.reason);
        assert!(z.enclosure.max_width() <= 1e-9, "strip {branch} width");
        for (coord, point) in oracle.iter().enumerate() {
            let c = z.enclosure.comp(coord);
            assert!(
                Scalar::to_rational(c.lo()) <= *point && *point <= Scalar::to_rational(c.hi()),
                "strip {branch} coord {coord} misses the oracle point"
            );
        }
    }
    assert!(start.elapsed() < Duration::from_secs(1), "took {:?}", start.elapsed());
}

#[test]
fn period_census_to_six_matches_affine_oracle() {
    let start = Instant::now();
    let map = MapSpec::AffineHorseshoe(Horseshoe::<Rational>::canonical(2).unwrap());
    let x = OrientedRect::new(unit_square::<Rational>(), 1).unwrap();
    let ks = [
        OrientedRect::new(
            BoxN::from_endpoints(vec![(q(0, 1), q(1, 1)), (q(0, 1), q(1, 3))]).unwrap(),
            1,
        )
        .unwrap(),
        OrientedRect::new(
            BoxN::from_endpoints(vec![(q(0, 1), q(1, 1)), (q(2, 3), q(1, 1))]).unwrap(),
            1,
        )
        .unwrap(),
    ];
    let opts = ChaosOptions { tol: q(1, 1_000_000_000), max_boxes: 200_000, word_cap: 4096 };
    let report = chaos_report(&map, &x, &ks, 6, &opts).unwrap();
    assert_eq!(report.status, Status::Certified);
    assert_eq!(report.entropy.expression, "log(2)");
    assert!((report.entropy.decimal - std::f64::consts::LN_2).abs() <= 1e-6);

    let eps = q(1, 100_000_000);
    for period in &report.periods {
        let k = period.k;
        assert_eq!(period.orbits.len(), 1usize << k, "2^{k} words of period {k}");
        assert_eq!(period.certified, 1usize << k, "all period-{k} words certified");
        assert!(period.disjoint, "period {k} necklaces must be disjoint");

        for rec in &period.orbits {
            assert_eq!(rec.status, Status::Certified, "{:?}: {:?}", rec.word, rec.reason);
            let oracle = orbit_oracle(rec.word.letters());
            for (j, point) in oracle.iter().enumerate() {
                assert!(
                    rec.enclosures[j].inflate(&eps).contains_point(point),
                    "word {:?} position {j} misses the affine solution",
                    rec.word.letters()
                );
            }
        }

        // Direct disjointness: no box of one necklace meets a box of another.
        let canon = |letters: &[usize]| -> Vec<usize> {
            (0..letters.len())
                .map(|r| {
                    let mut rot = letters.to_vec();
                    rot.rotate_left(r);
                    rot
                })
                .min()
                .unwrap()
        };
        for i in 0..period.orbits.len() {
            for j in i + 1..period.orbits.len() {
                let (a, b) = (&period.orbits[i], &period.orbits[j]);
                if canon(a.word.letters()) == canon(b.word.letters()) {
                    continue;
                }
                for ba in &a.enclosures {
                    for bb in &b.enclosures {
                        assert!(
                            !ba.intersects(bb),
                            "necklaces {:?} and {:?} overlap",
                            a.word.letters(),
                            b.word.letters()
                        );
                    }
                }
            }
        }
    }
    assert!(start.elapsed() < Duration::from_secs(60), "took {:?}", start.elapsed());
}

#[test]
fn planted_zero_systems_never_escape_and_replay() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    let opts = ZeroSearchOptions { tol: 1e-6f64, max_boxes: 20_000, allow_boundary_inflation: true };
    for case in 0..500 {
        let n = rng.random_range(1..=3);
        // Dyadic coordinates are exact both in the expression text and in
        // the double lane, so the planted zero is the true zero.
        let z: Vec<f64> = (0..n).map(|_| rng.random_range(0..=256) as f64 / 256.0).collect();
        let lines: Vec<String> = (0..n)
            .map(|i| {
                let j = rng.random_range(0..n);
                format!("(x{i} - {zi}) * (1 + x{j}^2)", zi = z[i])
            })
            .collect();
        let map = MapSpec::Custom(ExprMap::parse_lines(&lines.join("\n"), n).unwrap());
        let field = ExprField { map: &map, mode: EvalMode::Permissive };
        let search =
            BoxN::from_endpoints((0..n).map(|_| (-0.25f64, 1.25)).collect()).unwrap();

        let first = find_zeros(&field, &search, &opts).unwrap();
        assert!(
            first.enclosures.iter().any(|e| e.enclosure.contains_point(&z)),
            "case {case}: planted zero {z:?} escaped {lines:?}"
        );
        let mut replayed = 0;
        for e in first.certified() {
            let cert = e.certificate.as_ref().expect("certified implies certificate");
            assert!(cert.replay(&field).unwrap(), "case {case}: replay diverged");
            replayed += 1;
        }
        assert!(replayed > 0, "case {case}: no certified enclosure");

        let second = find_zeros(&field, &search, &opts).unwrap();
        assert_eq!(
            format!("{first:?}"),
            format!("{second:?}"),
            "case {case}: zero search must reproduce byte-identically"
        );
    }
    assert!(start.elapsed() < Duration::from_secs(60), "took {:?}", start.elapsed());
}

#[test]
fn branch_chain_spans_parameter_range() {
    let start = Instant::now();
    let map = MapSpec::Custom(
        ExprMap::<f64>::parse_lines("x0 - (0.5 + 0.3 * sin(2 * pi * x1))", 2).unwrap(),
    );
    let field = ExprField { map: &map, mode: EvalMode::Permissive };
    let search = unit_square::<f64>();
    let cell = 1.0 / 64.0;
    let track = track_zero_branch(&field, &search, 1, &cell, &1e-6, 1_000_000).unwrap();
    assert_eq!(track.status, Status::Certified, "{:?}", track.reason);
    let chain = track.chain.as_ref().expect("certified track carries a chain");
    assert!(chain.touches_lo && chain.touches_hi, "chain must span the parameter range");
    assert_eq!(chain.facets.len(), chain.boxes.len() - 1);
    for (i, fw) in chain.facets.iter().enumerate() {
        let (a, b) = (&chain.boxes[i], &chain.boxes[i + 1]);
        assert!(fw.facet.comp(fw.axis).is_point(), "facet degenerate on its axis");
        assert!(
            a.contains_box(&fw.facet) && b.contains_box(&fw.facet),
            "facet {i} must lie in both neighbours"
        );
    }
    // Every chain cell's x-extent meets the analytic curve at the cell's
    // lambda-midpoint, up to the curve's own travel across half a column
    // (|g'| <= 0.6 pi, so half a cell of slack): where the curve jumps two
    // rows between adjacent columns the chain necessarily passes through a
    // cell whose column midpoint sits just off the curve.
    let slack = 0.3 * std::f64::consts::PI * cell + 1e-9;
    for b in &chain.boxes {
        let lam = b.comp(1).midpoint();
        let curve = 0.5 + 0.3 * (2.0 * std::f64::consts::PI * lam).sin();
        let x = b.comp(0);
        assert!(
            x.lo() - slack <= curve && curve <= x.hi() + slack,
            "cell at lambda={lam} has x-extent {x:?} missing curve value {curve}"
        );
    }
    assert!(start.elapsed() < Duration::from_secs(5), "took {:?}", start.elapsed());
}

/// Largest 4-connected component of the kept cells, as a coordinate set.
fn largest_component(w: usize, h: usize, kept: &[bool]) -> Vec<bool> {
    let idx = |x: usize, y: usize| y * w + x;
    let mut comp = vec![usize::MAX; w * h];
    let mut sizes = Vec::new();
    for sy in 0..h {
        for sx in 0..w {
            if !kept[idx(sx, sy)] || comp[idx(sx, sy)] != usize::MAX {
                continue;
            }
            let label = sizes.len();
            let mut stack = vec![(sx, sy)];
            comp[idx(sx, sy)] = label;
            let mut size = 0usize;
            while let Some((x, y)) = stack.pop() {
                size += 1;
                let mut push = |nx: usize, ny: usize| {
                    if kept[idx(nx, ny)] && comp[idx(nx, ny)] == usize::MAX {
                        comp[idx(nx, ny)] = label;
                        stack.push((nx, ny));
                    }
                };
                if x > 0 {
                    push(x - 1, y);
                }
                if x + 1 < w {
                    push(x + 1, y);
                }
                if y > 0 {
                    push(x, y - 1);
                }
                if y + 1 < h {
                    push(x, y + 1);
                }
            }
            sizes.push(size);
        }
    }
    let best = (0..sizes.len()).max_by_key(|&l| sizes[l]);
    (0..w * h).map(|f| best.is_some_and(|l| comp[f] == l)).collect()
}

#[test]
fn grid_cut_iff_function_and_sides() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0_ffee);
    let mut done = 0;
    while done < 200 {
        let w = rng.random_range(2..=64);
        let h = rng.random_range(2..=64);
        let kept: Vec<bool> = (0..w * h).map(|_| rng.random_bool(0.8)).collect();
        let mask = largest_component(w, h, &kept);
        let space = match GridSpace::new(vec![w, h], |c| mask[c[1] * w + c[0]]) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let mut active: Vec<usize> = (0..space.total()).filter(|&f| space.is_active(f)).collect();
        if active.len() < 3 {
            continue;
        }
        active.shuffle(&mut rng);
        let na = rng.random_range(1..=(active.len() - 1).min(5));
        let nb = rng.random_range(1..=(active.len() - na).min(5));
        let a = GridSet::from_cells(&space, &active[..na]).unwrap();
        let b = GridSet::from_cells(&space, &active[na..na + nb]).unwrap();
        let mut c_cells: Vec<usize> =
            active.iter().copied().filter(|_| rng.random_bool(0.2)).collect();
        if c_cells.is_empty() {
            c_cells.push(active[rng.random_range(0..active.len())]);
        }
        let c = GridSet::from_cells(&space, &c_cells).unwrap();

        let outcome = cuts(&space, &a, &b, &c).unwrap();
        let f = cut_function(&space, &a, &b, &c).unwrap();
        assert_eq!(
            outcome.cut,
            f.verdict == CutVerdict::Valid,
            "cut decision and sign function disagree"
        );
        for flat in 0..space.total() {
            if space.is_active(flat) {
                assert_eq!(f.values[flat] == 0, c.contains(flat), "zero set must equal c");
            }
        }
        if let Some(path) = &outcome.witness {
            assert!(a.contains(path[0]) && b.contains(*path.last().unwrap()));
            for cell in path {
                assert!(!c.contains(*cell), "witness path must avoid c");
            }
            for pair in path.windows(2) {
                assert!(space.neighbors(pair[0]).contains(&pair[1]), "witness path adjacency");
            }
        }

        let (sa, sb) = side_of(&space, &a, &b).unwrap();
        assert!(sa.is_disjoint_from(&sb), "sides must be disjoint");
        for cell in a.cells() {
            assert!(sa.contains(cell), "side of a must contain a");
        }
        for cell in b.cells() {
            assert!(sb.contains(cell), "side of b must contain b");
        }
        let widened = cuts(&space, &sa, &sb, &c).unwrap();
        assert_eq!(outcome.cut, widened.cut, "cut must agree after widening to the sides");
        done += 1;
    }
    assert!(start.elapsed() < Duration::from_secs(30), "took {:?}", start.elapsed());
}

#[test]
fn shifted_words_rotate_orbits() {
    let start = Instant::now();
    let map = MapSpec::AffineHorseshoe(Horseshoe::<Rational>::canonical(2).unwrap());
    let x = OrientedRect::new(unit_square::<Rational>(), 1).unwrap();
    let ks = [
        OrientedRect::new(
            BoxN::from_endpoints(vec![(q(0, 1), q(1, 1)), (q(0, 1), q(1, 3))]).unwrap(),
            1,
        )
        .unwrap(),
        OrientedRect::new(
            BoxN::from_endpoints(vec![(q(0, 1), q(1, 1)), (q(2, 3), q(1, 1))]).unwrap(),
            1,
        )
        .unwrap(),
    ];
    let opts = ChaosOptions { tol: q(1, 1_000_000_000), max_boxes: 200_000, word_cap: 4096 };
    let report = chaos_report(&map, &x, &ks, 4, &opts).unwrap();

    for period in &report.periods {
        let by_word: BTreeMap<Vec<usize>, usize> = period
            .orbits
            .iter()
            .enumerate()
            .map(|(i, rec)| (rec.word.letters().to_vec(), i))
            .collect();
        for rec in &period.orbits {
            if rec.status != Status::Certified {
                continue;
            }
            let shifted = rec.word.shift().unwrap();
            let other = &period.orbits[by_word[shifted.letters()]];
            assert_eq!(other.status, Status::Certified);
            let k = period.k;
            for j in 0..k {
                assert!(
                    other.enclosures[j].intersects(&rec.enclosures[(j + 1) % k]),
                    "orbit of shifted {:?} is not the rotated orbit at position {j}",
                    rec.word.letters()
                );
            }
        }
    }
    assert!(start.elapsed() < Duration::from_secs(10), "took {:?}", start.elapsed());
}

#[test]
fn two_strip_crossing_pipeline_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("crossing.toml");
    std::fs::write(
        &config,
        r#"scalar = "rational"

[map]
kind = "horseshoe"

[[rect]]
name = "unit"
lo = ["0", "0"]
hi = ["1", "1"]

[[rect]]
name = "strip0"
lo = ["0", "0"]
hi = ["1", "1/3"]

[[rect]]
name = "strip1"
lo = ["0", "2/3"]
hi = ["1", "1"]

[fixed_points]
tol = "1e-10"

[[fixed_points.search]]
region = "strip0"
stretch_to = "unit"
crossing = "strip0"

[[fixed_points.search]]
region = "strip1"
stretch_to = "unit"
crossing = "strip1"
"#,
    )
    .unwrap();

    let out = Command::new(env!("CARGO_BIN_EXE_horseshoe"))
        .args(["fixed-points", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["status"], "pass");
    assert_eq!(report["exit_code"], 0);
    let searches = report["results"]["searches"].as_array().unwrap();
    assert_eq!(searches.len(), 2);
    for entry in searches {
        assert_eq!(entry["stretch"]["status"], "certified");
        assert_eq!(entry["crossing"]["status"], "certified");
        assert_eq!(entry["search"]["certified"], 1);
    }
}
