//! Acceptance checks. Prints one `[PASS]` or `[FAIL]` line per criterion and
//! exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde_json::Value;

use selcov::bounds::{
    calibrate_tau, finite_message_alphabet_bound, finite_message_bound, gaussian_leakage,
};
use selcov::jointlab::random_model;
use selcov::probkit::entropy;
use selcov::sharpness::{build_sharpness_instance, certify_sharpness};
use selcov::simlab::exact_same_sample_coverage;
use selcov::{CovarianceSpec, FiniteDistribution, SymmetricMatrix};

/// Φ(z_{0.025})^50, evaluated separately at 40 digits.
const EXACT_SAME_SAMPLE_50: f64 = 0.281_988_102_340_916_9;

type Outcome = Result<String, String>;

fn selcov(args: &[&str]) -> Result<Vec<u8>, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_selcov"))
        .args(args)
        .output()
        .map_err(|e| format!("spawn: {e}"))?;
    if !o.status.success() {
        return Err(format!(
            "exit {:?}: {}",
            o.status.code(),
            String::from_utf8_lossy(&o.stderr)
        ));
    }
    Ok(o.stdout)
}

struct Row {
    label: String,
    coverage: f64,
    mc_se: f64,
}

fn parse_rows(bytes: &[u8]) -> Result<Vec<Row>, String> {
    let v: Value = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
    let rows = v.as_array().ok_or("expected a JSON array")?;
    rows.iter()
        .map(|r| {
            Ok(Row {
                label: r["label"].as_str().ok_or("label")?.to_owned(),
                coverage: r["coverage"].as_f64().ok_or("coverage")?,
                mc_se: r["mc_se"].as_f64().ok_or("mc_se")?,
            })
        })
        .collect()
}

fn table1_reference() -> Result<(Vec<Row>, Duration), String> {
    let start = Instant::now();
    let out = selcov(&["simulate", "table1", "--reps", "10000", "--format", "json"])?;
    Ok((parse_rows(&out)?, start.elapsed()))
}

fn criterion_1(table: &Result<(Vec<Row>, Duration), String>) -> Outcome {
    let (rows, elapsed) = table.as_ref().map_err(Clone::clone)?;
    // Target and tolerance for each row, in table order.
    let targets = [
        (0.95, 0.01),
        (0.282, 0.02),
        (0.93, 0.02),
        (0.95, 0.01),
        (0.95, 0.01),
        (0.95, 0.01),
    ];
    if rows.len() != targets.len() {
        return Err(format!("expected 6 rows, got {}", rows.len()));
    }
    let mut summary = Vec::new();
    let mut bad = Vec::new();
    for (row, (target, tol)) in rows.iter().zip(targets) {
        summary.push(format!("{:.4}", row.coverage));
        if (row.coverage - target).abs() > tol {
            bad.push(format!(
                "{}: {:.4} not within {tol} of {target}",
                row.label, row.coverage
            ));
        }
    }
    if *elapsed > Duration::from_secs(60) {
        bad.push(format!("took {:.1} s", elapsed.as_secs_f64()));
    }
    let detail = format!(
        "coverages [{}] in {:.1} s",
        summary.join(", "),
        elapsed.as_secs_f64()
    );
    if bad.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", bad.join("; ")))
    }
}

fn criterion_2() -> Outcome {
    let x = exact_same_sample_coverage(50, 0.05).map_err(|e| e.to_string())?;
    let err_ref = (x - EXACT_SAME_SAMPLE_50).abs();
    let err_table = (x - 0.2820).abs();
    let detail = format!("{x:.16} (|Δ| = {err_ref:.1e} vs reference, {err_table:.1e} vs 0.2820)");
    if err_table <= 5e-4 && err_ref <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_97ed);
    let trials = 2000;
    let mut worst_tv = f64::NEG_INFINITY;
    let mut worst_pinsker = f64::NEG_INFINITY;
    for _ in 0..trials {
        let s = 1 + (rng.next_u64() % 6) as usize;
        let d = 1 + (rng.next_u64() % 10) as usize;
        let m = random_model(&mut rng, s, d);
        worst_tv = worst_tv.max(m.selected_noncoverage() - m.fixed_target_alpha() - m.tv_leakage());
        worst_pinsker = worst_pinsker.max(m.tv_leakage() - (m.mutual_information() / 2.0).sqrt());
    }
    let detail = format!(
        "{trials} models, max excess over TV bound {worst_tv:.2e}, over Pinsker {worst_pinsker:.2e}"
    );
    if worst_tv <= 1e-12 && worst_pinsker <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cells = 0;
    for alpha in [0.01, 0.05, 0.1, 0.25, 0.5] {
        for delta in [0.0, alpha / 2.0, alpha] {
            let inst = build_sharpness_instance(alpha, delta).map_err(|e| e.to_string())?;
            let m = &inst.model;
            let gap = m.selected_noncoverage() - (m.fixed_target_alpha() + m.tv_leakage());
            worst = worst.max(gap.abs());
            if !certify_sharpness(&inst).pass {
                return Err(format!("certificate failed at alpha={alpha} delta={delta}"));
            }
            cells += 1;
        }
    }
    let detail = format!("{cells} grid cells, max |residual| {worst:.2e}");
    if worst <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

fn random_psd(rng: &mut ChaCha8Rng, q: usize) -> SymmetricMatrix {
    let b: Vec<f64> = (0..q * q).map(|_| 2.0 * unit(rng) - 1.0).collect();
    let rows = (0..q)
        .map(|i| {
            (0..q)
                .map(|j| (0..q).map(|k| b[i * q + k] * b[j * q + k]).sum())
                .collect()
        })
        .collect();
    SymmetricMatrix::new(rows).unwrap()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a55);
    let mut worst_dominance = f64::INFINITY;
    for _ in 0..200 {
        let q = 1 + (rng.next_u64() % 10) as usize;
        let tau = 0.05 + 4.0 * unit(&mut rng);
        let sigma = random_psd(&mut rng, q);
        let v = sigma.trace();
        let full = gaussian_leakage(
            &CovarianceSpec::full(sigma).map_err(|e| e.to_string())?,
            tau,
        )
        .map_err(|e| e.to_string())?;
        let trace = gaussian_leakage(
            &CovarianceSpec::trace_bound(q, v).map_err(|e| e.to_string())?,
            tau,
        )
        .map_err(|e| e.to_string())?;
        worst_dominance = worst_dominance.min(trace - full);
    }

    let mut worst_round_trip: f64 = 0.0;
    for q in [1usize, 2, 5, 50] {
        for v in [0.1, 1.0, 10.0] {
            for eps in [0.01, 0.05, 0.1, 0.3] {
                let tau = calibrate_tau(q, v, eps).map_err(|e| e.to_string())?;
                let spec = CovarianceSpec::trace_bound(q, v).map_err(|e| e.to_string())?;
                let back = gaussian_leakage(&spec, tau).map_err(|e| e.to_string())?;
                worst_round_trip = worst_round_trip.max((back - eps).abs() / eps);
            }
        }
    }

    let mut worst_equal: f64 = 0.0;
    for q in [1usize, 2, 5, 50] {
        for v in [0.1, 1.0, 10.0] {
            let sigma = SymmetricMatrix::identity(q)
                .and_then(|i| i.scaled(v / q as f64))
                .map_err(|e| e.to_string())?;
            let full = CovarianceSpec::full(sigma).map_err(|e| e.to_string())?;
            let trace = CovarianceSpec::trace_bound(q, v).map_err(|e| e.to_string())?;
            for tau in [0.1, 0.5, 1.0, 3.0] {
                let a = gaussian_leakage(&full, tau).map_err(|e| e.to_string())?;
                let b = gaussian_leakage(&trace, tau).map_err(|e| e.to_string())?;
                worst_equal = worst_equal.max((a - b).abs());
            }
        }
    }

    let detail = format!(
        "200 PSD matrices, min(trace - full) {worst_dominance:.2e}; \
         calibration rel. err {worst_round_trip:.2e}; isotropic |Δ| {worst_equal:.2e}"
    );
    if worst_dominance >= -1e-12 && worst_round_trip <= 1e-10 && worst_equal <= 1e-12 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_6() -> Outcome {
    let mut mismatches = Vec::new();
    for k in [1usize, 2, 10, 1000] {
        let h = entropy(&FiniteDistribution::uniform(k).map_err(|e| e.to_string())?);
        let a = finite_message_bound(0.05, h).map_err(|e| e.to_string())?;
        let b = finite_message_alphabet_bound(0.05, k).map_err(|e| e.to_string())?;
        if a.value != b.value {
            mismatches.push(format!("k={k}: {} vs {}", a.value, b.value));
        }
    }
    if mismatches.is_empty() {
        Ok("entropy and alphabet variants identical for k in {1, 2, 10, 1000}".into())
    } else {
        Err(mismatches.join("; "))
    }
}

fn criterion_7() -> Outcome {
    let base = [
        "simulate", "table1", "--reps", "2000", "--seed", "424242", "--format", "json",
    ];
    let run = |threads: &str| {
        let mut args = base.to_vec();
        args.extend(["--threads", threads]);
        selcov(&args)
    };
    let one = run("1")?;
    let four = run("4")?;
    if one == four {
        Ok(format!(
            "--threads 1 and --threads 4 gave identical {} bytes",
            one.len()
        ))
    } else {
        Err("outputs differ between thread counts".into())
    }
}

fn criterion_8(table: &Result<(Vec<Row>, Duration), String>) -> Outcome {
    let (rows, _) = table.as_ref().map_err(Clone::clone)?;
    // Rows with an analytic value: fixed coordinate, same sample, split sample.
    let anchors = [(0usize, 0.95), (1, EXACT_SAME_SAMPLE_50), (5, 0.95)];
    let mut parts = Vec::new();
    let mut ok = true;
    for (i, target) in anchors {
        let row = rows.get(i).ok_or("missing row")?;
        let z = (row.coverage - target) / row.mc_se;
        ok &= z.abs() <= 3.0;
        parts.push(format!("{}: {z:+.2} s.e.", row.label));
    }
    let detail = parts.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() -> ExitCode {
    let table = table1_reference();
    let results = [
        ("table reproduction", criterion_1(&table)),
        ("exact same-sample coverage", criterion_2()),
        ("leakage bound on random models", criterion_3()),
        ("sharpness equality grid", criterion_4()),
        ("Gaussian bound properties", criterion_5()),
        ("finite-message consistency", criterion_6()),
        ("determinism across thread counts", criterion_7()),
        ("analytic rows within 3 s.e.", criterion_8(&table)),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("[PASS] criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
