//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use kstar_core::check::{run_sweep, sweep_instances, SweepInstance};
use kstar_core::io::{encode_kse, parse_kse, read_csv, read_kse, write_csv, write_kse};
use kstar_core::{
    analyze, build_distributions, generate, kstar_scan, kstar_scan_oracle, skewness, AnalysisOptions,
    DistanceMetric, EmbeddingSet, Error, Pattern, SynthSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn kstar(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_kstar")).args(args).output().expect("run kstar")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn oracle_equivalence() -> Check {
    let start = Instant::now();
    let instances = sweep_instances(50, 2000, 0).map_err(|e| e.to_string())?;
    let outcomes = run_sweep(&instances, kstar_scan).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let bad: Vec<_> = outcomes.iter().filter(|o| o.mismatches > 0).collect();
    ensure(bad.is_empty(), || format!("{} instances mismatch, first {:?}", bad.len(), bad[0]))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:.1?}, limit 60 s"))?;
    Ok(format!("50 instances, 0 mismatches, {elapsed:.1?}"))
}

fn hand_fixtures() -> Check {
    let sep = read_csv(fixture("separated.csv")).map_err(|e| e.to_string())?;
    let frac = read_csv(fixture("fractured.csv")).map_err(|e| e.to_string())?;
    for metric_fn in [kstar_scan, kstar_scan_oracle] {
        let ks = metric_fn(&sep, DistanceMetric::Euclidean).unwrap();
        ensure(ks == vec![3; 6], || format!("separated fixture gave {ks:?}"))?;
        let ks = metric_fn(&frac, DistanceMetric::Euclidean).unwrap();
        ensure(ks[..2] == [1, 1], || format!("fractured fixture gave {ks:?}"))?;
    }
    Ok("separated k* = 3 x6, fractured class A k* = 1 x2".into())
}

fn skewness_arithmetic() -> Check {
    // 60-digit mpmath evaluations of the population skewness.
    let reference: &[(&[f64], f64)] = &[
        (&[0.2, 0.2, 0.2, 0.4, 1.0], 1.290_994_448_735_805_6),
        (&[0.1, 0.25, 0.3, 0.9, 0.95, 1.0], -0.062_162_689_774_494_154),
        (&[1.0, 2.0, 3.0, 10.0], 1.018_233_764_908_628_4),
        (&[0.02, 0.05, 0.5, 0.5, 0.5, 0.9, 0.01], 0.305_902_589_825_517_45),
    ];
    let mut worst_rel = 0.0f64;
    for (values, expected) in reference {
        let got = skewness(values).unwrap().value.unwrap();
        let rel = (got - expected).abs() / expected.abs();
        worst_rel = worst_rel.max(rel);
        ensure(rel <= 1e-12, || format!("{values:?}: {got} vs {expected} (rel {rel:e})"))?;
    }

    for sym in [&[0.2, 0.5, 0.8][..], &[0.5, 0.5, 1.0, 1.0], &[0.1, 0.3, 0.5, 0.7, 0.9], &[1.0, 4.0, 4.0, 7.0]] {
        let g = skewness(sym).unwrap().value.unwrap();
        ensure(g.abs() < 1e-12, || format!("symmetric {sym:?} gave {g:e}"))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut worst_affine = 0.0f64;
    for _ in 0..200 {
        let len = rng.random_range(3..100);
        let v: Vec<f64> = (0..len).map(|_| rng.random::<f64>().powi(3)).collect();
        let Some(g) = skewness(&v).unwrap().value else { continue };
        let a = rng.random_range(0.01..100.0);
        let b = rng.random_range(-50.0..50.0);
        let affine: Vec<f64> = v.iter().map(|x| a * x + b).collect();
        let flipped: Vec<f64> = v.iter().map(|x| -x).collect();
        let ga = skewness(&affine).unwrap().value.unwrap();
        let gf = skewness(&flipped).unwrap().value.unwrap();
        worst_affine = worst_affine.max((g - ga).abs()).max((g + gf).abs());
        ensure((g - ga).abs() < 1e-9, || format!("affine: {g} vs {ga}"))?;
        ensure((g + gf).abs() < 1e-9, || format!("sign flip: {g} vs {gf}"))?;
    }
    Ok(format!("max rel err {worst_rel:.1e}, max affine/sign deviation {worst_affine:.1e}"))
}

fn check_ranges(set: &EmbeddingSet) -> Result<(), String> {
    let raw = kstar_scan(set, DistanceMetric::Euclidean).map_err(|e| e.to_string())?;
    let sizes = set.concept_sizes();
    for (i, (&k, &c)) in raw.iter().zip(set.labels()).enumerate() {
        let size = sizes[c as usize];
        ensure(k >= 1 && k as usize <= size, || format!("sample {i}: raw k* {k} outside [1, {size}]"))?;
    }
    for d in build_distributions(set, &raw).map_err(|e| e.to_string())? {
        ensure(d.normalized.iter().all(|&v| v > 0.0 && v <= 1.0), || format!("concept {} out of (0, 1]", d.concept))?;
    }
    Ok(())
}

fn range_invariant() -> Check {
    let mut count = 0;
    for name in ["separated.csv", "fractured.csv", "tie.csv", "synth_fractured.csv"] {
        check_ranges(&read_csv(fixture(name)).map_err(|e| e.to_string())?)?;
        count += 1;
    }
    for seed in 0..20u64 {
        let inst = SweepInstance {
            seed: 1000 + seed,
            n: 100 + 45 * seed as usize,
            dim: 1 + (seed as usize % 9),
            classes: 2 + (seed as usize % 12),
            metric: DistanceMetric::Euclidean,
        };
        check_ranges(&inst.build().map_err(|e| e.to_string())?)?;
        count += 1;
    }
    Ok(format!("{count} sets checked"))
}

fn pattern_recovery() -> Check {
    let start = Instant::now();
    let mut frac_ok = 0;
    let mut over_ok = 0;
    let mut clus_ok = 0;
    let mut total = 0;
    for seed in 0..100 {
        for pattern in [Pattern::Fractured, Pattern::Overlapped, Pattern::Clustered] {
            let set = generate(&SynthSpec::new(pattern, 4, 60, 8, seed)).unwrap();
            let report = analyze(&set, &AnalysisOptions::default()).unwrap();
            for s in &report.concept_summaries {
                match pattern {
                    Pattern::Fractured => frac_ok += usize::from(s.gamma.is_some_and(|g| g > 0.5)),
                    Pattern::Overlapped => over_ok += usize::from(s.gamma.is_some_and(|g| (-0.5..=0.5).contains(&g))),
                    Pattern::Clustered => clus_ok += usize::from(s.pattern == Pattern::Clustered),
                }
            }
        }
        total += 4;
    }
    let elapsed = start.elapsed();
    let (f, o, c) = (frac_ok as f64 / total as f64, over_ok as f64 / total as f64, clus_ok as f64 / total as f64);
    let detail = format!("fractured {f:.3} (>= 0.95), overlapped {o:.3} (>= 0.90), clustered {c:.3} (>= 0.95), {elapsed:.1?}");
    ensure(f >= 0.95 && o >= 0.90 && c >= 0.95, || detail.clone())?;
    ensure(elapsed < Duration::from_secs(300), || format!("{detail}; over 5 min"))?;
    Ok(detail)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        (v[m - 1] + v[m]) / 2.0
    } else {
        v[m]
    }
}

fn approx_converges() -> Check {
    let gap = |concepts: usize| -> Result<f64, String> {
        let mut gaps = Vec::new();
        for seed in 0..20 {
            let set = generate(&SynthSpec::new(Pattern::Overlapped, concepts, 60, 8, seed)).unwrap();
            let r = analyze(&set, &AnalysisOptions::default()).unwrap();
            let (Some(approx), Some(truth)) = (r.gamma_approx, r.gamma_true) else {
                return Err(format!("C={concepts} seed={seed}: undefined coefficient"));
            };
            ensure(r.gamma_approx_excluded == 0, || format!("C={concepts} seed={seed}: degenerate concept"))?;
            gaps.push((approx - truth).abs());
        }
        Ok(median(gaps))
    };
    let small = gap(4)?;
    let large = gap(64)?;
    let detail = format!("median |approx - true|: C=4 {small:.3e}, C=64 {large:.3e}");
    ensure(large < small, || detail.clone())?;
    Ok(detail)
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("space.kse");
    let set = generate(&SynthSpec::new(Pattern::Overlapped, 12, 100, 32, 5)).unwrap();
    write_kse(&set, &input).unwrap();
    let max = std::thread::available_parallelism().map_or(8, |n| n.get()).to_string();

    let mut outputs = Vec::new();
    for (i, workers) in ["1", "4", max.as_str(), "1", max.as_str()].iter().enumerate() {
        let out = dir.path().join(format!("r{i}.json"));
        let res = kstar(&["analyze", p(&input), "-o", p(&out), "-q", "--raw-kstar", "--workers", workers]);
        ensure(res.status.success(), || String::from_utf8_lossy(&res.stderr).into_owned())?;
        outputs.push(std::fs::read(&out).unwrap());
    }
    ensure(outputs.windows(2).all(|w| w[0] == w[1]), || "reports differ across worker counts".into())?;
    Ok(format!("5 runs (workers 1, 4, {max}) byte-identical, {} bytes", outputs[0].len()))
}

fn format_fidelity() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let set = generate(&SynthSpec::new(Pattern::Fractured, 5, 30, 7, 13)).unwrap();

    let kse = dir.path().join("s.kse");
    write_kse(&set, &kse).unwrap();
    let back = read_kse(&kse).unwrap();
    let bits = |s: &EmbeddingSet| s.points().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    ensure(bits(&back) == bits(&set) && back.labels() == set.labels(), || "KSE round trip not bit-exact".into())?;

    let csv = dir.path().join("s.csv");
    write_csv(&set, &csv).unwrap();
    let a = kstar(&["analyze", p(&kse), "-q"]);
    let b = kstar(&["analyze", p(&csv), "-q"]);
    ensure(a.status.success() && a.stdout == b.stdout, || "CSV and KSE reports differ".into())?;

    let bytes = encode_kse(&set);
    let mut bad_magic = bytes.clone();
    bad_magic[..4].copy_from_slice(b"KSE0");
    ensure(matches!(parse_kse(&bad_magic), Err(Error::BadMagic { .. })), || "bad magic not detected".into())?;
    let mid_points = 20 + 4 * set.dim() * 10 + 2;
    ensure(matches!(parse_kse(&bytes[..mid_points]), Err(Error::Truncated { .. })), || "truncation not detected".into())?;
    let mut bad_label = bytes.clone();
    let first_label = 20 + 4 * set.points().len();
    bad_label[first_label..first_label + 4].copy_from_slice(&5u32.to_le_bytes());
    ensure(
        matches!(parse_kse(&bad_label), Err(Error::LabelOutOfRange { row: 0, label: 5, concepts: 5 })),
        || "label = C not rejected".into(),
    )?;

    for (name, body) in [("magic", &bad_magic), ("trunc", &bytes[..mid_points].to_vec()), ("label", &bad_label)] {
        let path = dir.path().join(format!("{name}.kse"));
        std::fs::write(&path, body).unwrap();
        let code = kstar(&["analyze", p(&path)]).status.code();
        ensure(code == Some(4), || format!("{name}: exit code {code:?}, expected 4"))?;
    }
    Ok("KSE bit-exact, CSV == KSE report, BadMagic/Truncated/LabelOutOfRange rejected".into())
}

fn report_schema() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for (pattern, acc) in [(Pattern::Fractured, "0.61"), (Pattern::Overlapped, "0.74"), (Pattern::Clustered, "0.93")] {
        let input = dir.path().join(format!("{pattern}.kse"));
        write_kse(&generate(&SynthSpec::new(pattern, 10, 40, 8, 1)).unwrap(), &input).unwrap();
        let out = dir.path().join(format!("{pattern}.json"));
        let res = kstar(&[
            "analyze", p(&input), "-o", p(&out), "-q",
            "--source", pattern.as_str(),
            "--metadata", &format!("natural_accuracy={acc}"),
            "--metadata", "robust_accuracy=0.5",
        ]);
        ensure(res.status.success(), || String::from_utf8_lossy(&res.stderr).into_owned())?;
        let r = kstar_core::io::read_report(&out).unwrap();
        ensure(r.pattern_counts.total() == r.concept_count, || format!("{pattern}: counts {:?}", r.pattern_counts))?;
        reports.push(out);
    }

    let csv = dir.path().join("plot.csv");
    let mut args = vec!["compare"];
    args.extend(reports.iter().map(|r| p(r)));
    args.extend(["--csv", p(&csv)]);
    let res = kstar(&args);
    ensure(res.status.success(), || String::from_utf8_lossy(&res.stderr).into_owned())?;

    let mut rdr = csv::Reader::from_path(&csv).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    for col in ["gamma_true", "gamma_approx", "natural_accuracy", "robust_accuracy"] {
        ensure(header.iter().any(|h| h == col), || format!("missing column {col} in {header:?}"))?;
    }
    let rows: Vec<BTreeMap<String, String>> = rdr.deserialize().map(Result::unwrap).collect();
    ensure(rows.len() == 3, || format!("{} rows, expected 3", rows.len()))?;
    ensure(rows[0]["natural_accuracy"] == "0.61" && rows[0]["gamma_approx"].parse::<f64>().is_ok(), || format!("{:?}", rows[0]))?;
    Ok("counts sum to concept count; plot CSV has one row per report".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("hand-verifiable fixtures", hand_fixtures),
        ("skewness arithmetic", skewness_arithmetic),
        ("range invariant", range_invariant),
        ("pattern recovery", pattern_recovery),
        ("approx -> true convergence", approx_converges),
        ("determinism", determinism),
        ("format fidelity", format_fidelity),
        ("report schema", report_schema),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
