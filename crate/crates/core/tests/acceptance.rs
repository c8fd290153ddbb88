//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//! Tolerances are pinned in code next to each assertion.

use campanato::cases::{run_all, run_case, CaseResult, Verdict};
use campanato::metric::{ball_volume, dist, AnisoBall, MetricParams};
use campanato::sampling::derive_rng;
use rand::Rng;

fn report(number: u32, name: &str, passed: bool, detail: &str) {
    let verdict = if passed { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {number:02} {name}: {verdict} — {detail}");
    assert!(
        passed,
        "acceptance criterion {number} ({name}) failed: {detail}"
    );
}

fn failed_assertions(result: &CaseResult) -> String {
    let failed: Vec<String> = result
        .assertions
        .iter()
        .filter(|a| !a.passed)
        .map(|a| format!("{}: {}", a.name, a.detail))
        .collect();
    if failed.is_empty() {
        format!("{} assertions passed", result.assertions.len())
    } else {
        failed.join("; ")
    }
}

#[test]
fn acceptance_01_metric_law_suite() {
    // Triangle inequality: 10^5 seeded triples per gamma, zero violations
    // beyond 1e-12 slack.
    let mut violations = 0usize;
    for &g in &[0.3f64, 0.5, 1.0] {
        let m = MetricParams::new(3, g).unwrap();
        let mut rng = derive_rng(42, &[g.to_bits()]);
        for _ in 0..100_000 {
            let pts: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..3).map(|_| rng.gen_range(-10.0..10.0)).collect())
                .collect();
            let dxz = dist(&pts[0], &pts[2], &m).unwrap();
            let dxy = dist(&pts[0], &pts[1], &m).unwrap();
            let dyz = dist(&pts[1], &pts[2], &m).unwrap();
            if dxz > dxy + dyz + 1e-12 {
                violations += 1;
            }
        }
    }

    // Ball volume against a tensor quadrature oracle (N = 2, gamma = 1/2)
    // within 1%.
    let m2 = MetricParams::new(2, 0.5).unwrap();
    let r: f64 = 1.3;
    let ball = AnisoBall::new(vec![0.0, 0.0], r).unwrap();
    let hr = ball.horizontal_radius(&m2);
    let nodes = 1024usize;
    let mut inside = 0usize;
    for i in 0..nodes {
        let x = -hr + (i as f64 + 0.5) / nodes as f64 * 2.0 * hr;
        for j in 0..nodes {
            let y = -r + (j as f64 + 0.5) / nodes as f64 * 2.0 * r;
            if ball.contains(&[x, y], &m2).unwrap() {
                inside += 1;
            }
        }
    }
    let quad = inside as f64 / (nodes * nodes) as f64 * (2.0 * hr) * (2.0 * r);
    let exact = ball_volume(r, &m2).unwrap();
    let vol_err = (quad - exact).abs() / exact;

    // Homogeneity to machine precision.
    let mut homo_err = 0.0f64;
    for &(n, g) in &[(2usize, 0.5f64), (3, 0.3), (4, 1.0)] {
        let m = MetricParams::new(n, g).unwrap();
        for &r in &[0.01, 0.7, 5.0] {
            let ratio = ball_volume(2.0 * r, &m).unwrap() / ball_volume(r, &m).unwrap();
            let expect = 2.0f64.powf(m.critical_exponent());
            homo_err = homo_err.max((ratio - expect).abs() / expect);
        }
    }

    let passed = violations == 0 && vol_err < 0.01 && homo_err < 1e-12;
    report(
        1,
        "metric law suite",
        passed,
        &format!(
            "triangle violations {violations}, volume-vs-quadrature {vol_err:.3e}, homogeneity {homo_err:.3e}"
        ),
    );
}

#[test]
fn acceptance_02_sandwich_suite() {
    let result = run_case("seminorm-sandwich", 42).unwrap();
    let checked = result.metrics["pairsChecked"];
    let violations = result.metrics["violations"];
    let passed = result.verdict == Verdict::Pass && violations == 0.0 && checked >= 150.0;
    report(
        2,
        "sandwich suite",
        passed,
        &format!("{checked} ball/field pairs, {violations} violations, tolerance 1e-9"),
    );
}

#[test]
fn acceptance_03_log_zero_extension() {
    let result = run_case("log-zero-extension", 42).unwrap();
    let passed = result.verdict == Verdict::Pass;
    report(3, "log-zero-extension", passed, &failed_assertions(&result));
}

#[test]
fn acceptance_04_strip_separation() {
    let result = run_case("strip-separation", 42).unwrap();
    let slope = result.metrics["campanatoSlope"];
    let bmo = result.metrics["bmoInsideEstimate"];
    let passed = result.verdict == Verdict::Pass && (slope - 1.0).abs() <= 0.05 && bmo <= 1.1;
    report(
        4,
        "strip-separation",
        passed,
        &format!(
            "oscillation checks: {}; slope {slope:.4}, BMO inside {bmo:.4}",
            failed_assertions(&result)
        ),
    );
}

#[test]
fn acceptance_05_cusp_metric_separation() {
    let result = run_case("cusp-metric-separation", 42).unwrap();
    let slope = result.metrics["euclideanSlope"];
    let ratio = result.metrics["anisotropicLastOverFirst"];
    let passed = result.verdict == Verdict::Pass && (slope + 0.125).abs() <= 0.02 && ratio <= 2.0;
    report(
        5,
        "cusp-metric-separation",
        passed,
        &format!(
            "euclidean slope {slope:.4} (target -0.125 ± 0.02), anisotropic last/first {ratio:.3}"
        ),
    );
}

#[test]
fn acceptance_06_property_a_cusp() {
    let result = run_case("property-A-cusp", 42).unwrap();
    let c = result.metrics["cEstimate"];
    let stability = result.metrics["refinementRatio"];
    let passed = result.verdict == Verdict::Pass && c > 0.0 && (0.5..=2.0).contains(&stability);
    report(
        6,
        "property-A on the cusp fixture",
        passed,
        &format!("cEstimate {c:.4}, refinement ratio {stability:.3}"),
    );
}

#[test]
fn acceptance_07_reflection_bound() {
    let result = run_case("reflection-bound", 42).unwrap();
    let c_proof = result.metrics["cProof"];
    let worst = result
        .metrics
        .iter()
        .filter(|(k, _)| k.starts_with("empiricalRatio."))
        .map(|(_, &v)| v)
        .fold(0.0f64, f64::max);
    let passed = result.verdict == Verdict::Pass && worst <= c_proof;
    report(
        7,
        "reflection-bound",
        passed,
        &format!("worst empirical ratio {worst:.3} vs C_proof {c_proof:.4e}"),
    );
}

#[test]
fn acceptance_08_mcshane_preservation() {
    let result = run_case("mcshane-preservation", 42).unwrap();
    let node_err = result.metrics["maxNodeError"];
    let lip = result.metrics["maxSampledLip"];
    let passed = result.verdict == Verdict::Pass && node_err == 0.0 && lip <= 1.0 + 1e-4;
    report(
        8,
        "mcshane-preservation",
        passed,
        &format!("node error {node_err:.1e} (exact), sampled Lip {lip:.6} <= 1 + 1e-4"),
    );
}

#[test]
fn acceptance_09_atlas_roundtrip() {
    let result = run_case("atlas-roundtrip", 42).unwrap();
    let interval_err = result.metrics["intervalRestrictionError"];
    let disk_err = result.metrics["diskRestrictionError"];
    let lin = result.metrics["diskLinearityError"];
    let ratio = result.metrics["extensionNormRatio"];
    let passed = result.verdict == Verdict::Pass
        && interval_err <= 1e-8
        && disk_err <= 1e-8
        && lin <= 1e-9
        && ratio.is_finite();
    report(
        9,
        "atlas-roundtrip",
        passed,
        &format!(
            "restriction errors {interval_err:.2e}/{disk_err:.2e}, linearity {lin:.2e}, norm ratio {ratio:.3}"
        ),
    );
}

#[test]
fn acceptance_10_determinism() {
    // Two complete runs with the same seed must serialise byte-identically.
    let a = run_all(42).unwrap();
    let b = run_all(42).unwrap();
    let ja = serde_json::to_string_pretty(&a).unwrap();
    let jb = serde_json::to_string_pretty(&b).unwrap();
    let passed = ja == jb;
    report(
        10,
        "determinism",
        passed,
        &format!("{} bytes of JSON, byte-identical: {passed}", ja.len()),
    );
}

#[test]
fn acceptance_11_john_nirenberg_probe() {
    let result = run_case("john-nirenberg-probe", 42).unwrap();
    let slope = result.metrics["tailSlope"];
    let r2 = result.metrics["tailFitR2"];
    let passed = result.verdict == Verdict::Pass && slope < 0.0 && r2 >= 0.9;
    report(
        11,
        "john-nirenberg-probe",
        passed,
        &format!("tail slope {slope:.3}, fit r^2 {r2:.4}"),
    );
}
