//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test -p stein-hn --test acceptance`.

use std::process::Command;
use std::time::{Duration, Instant};

use halfnormal_stein::discrete_stein::{basis_residuals, make_spec, recover_pmf};
use halfnormal_stein::distances::{
    auxiliary_bounds, rate_row, wasserstein_exact, wasserstein_quantile, ScaledLaw,
};
use halfnormal_stein::distributions::SQRT_2_OVER_PI;
use halfnormal_stein::mc_oracle::empirical_check;
use halfnormal_stein::search::{sup_search, SearchOptions};
use halfnormal_stein::srw_laws::{brute_force_pmf, pmf_for};
use halfnormal_stein::stein_core::{
    aux_eval, sup_fz_diagonal, verify_indicator_bounds, verify_lipschitz_bounds, Aux, Grid,
    SteinSolution, TestFunction,
};
use halfnormal_stein::Statistic;

type Criterion = (&'static str, fn() -> Outcome);

const BIN: &str = env!("CARGO_BIN_EXE_stein-hn");

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within_time(start: Instant, limit: Duration, passed: bool, detail: String) -> Outcome {
    let elapsed = start.elapsed();
    let timed = elapsed < limit;
    outcome(
        passed && timed,
        format!(
            "{detail}; {:.1}s of {}s budget",
            elapsed.as_secs_f64(),
            limit.as_secs()
        ),
    )
}

fn exact_pmf_equivalence() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut mismatches = Vec::new();
    for (stat, ns) in [
        (
            Statistic::Returns,
            (2..=14).step_by(2).collect::<Vec<u32>>(),
        ),
        (Statistic::Max, (2..=14).step_by(2).collect()),
        (Statistic::HalfMax, (2..=14).step_by(2).collect()),
        (Statistic::SignChanges, (3..=15).step_by(2).collect()),
    ] {
        for n in ns {
            cases += 1;
            let formula = pmf_for(stat, n as u64).expect("valid n");
            let enumerated = brute_force_pmf(stat, n).expect("small n");
            if formula != enumerated {
                mismatches.push(format!("{stat} n={n}"));
            }
        }
    }
    within_time(
        start,
        Duration::from_secs(30),
        mismatches.is_empty(),
        format!("{cases} laws equal to 2^n-path enumeration, mismatches: {mismatches:?}"),
    )
}

fn theorem_bound_sweep() -> Outcome {
    const HEADROOM: f64 = 1e-10;
    let start = Instant::now();
    let mut details = Vec::new();
    let mut passed = true;
    for (stat, range) in [
        ("max", "2:4096:2"),
        ("returns", "2:4096:2"),
        ("signchanges", "3:4097:2"),
    ] {
        let output = Command::new(BIN)
            .args([
                "check-bounds",
                "--stat",
                stat,
                "--n",
                range,
                "--format",
                "csv",
            ])
            .output()
            .expect("run stein-hn");
        let text = String::from_utf8_lossy(&output.stdout);
        let mut lines = text.lines();
        let header_ok = lines.next() == Some("n,d_K,d_W,bound_K,bound_W,margin_K,margin_W");
        let mut rows = 0;
        let mut min_k = f64::INFINITY;
        let mut min_w = f64::INFINITY;
        for line in lines {
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.parse().unwrap_or(f64::NAN))
                .collect();
            rows += 1;
            min_k = min_k.min(fields[5]);
            min_w = min_w.min(fields[6]);
        }
        let expected_rows = 2048;
        let ok = output.status.code() == Some(0)
            && header_ok
            && rows == expected_rows
            && min_k >= HEADROOM
            && min_w >= HEADROOM;
        passed &= ok;
        details.push(format!(
            "{stat}: {rows} n, min margin K={min_k:.4} W={min_w:.4}"
        ));
    }
    within_time(start, Duration::from_secs(300), passed, details.join("; "))
}

fn rate_optimality() -> Outcome {
    let row = rate_row(Statistic::Returns, 4096).expect("valid n");
    let p0_ok = (0.79..=0.81).contains(&row.sqrtn_p0);
    let gap_ok = (0.9..=1.1).contains(&row.sqrtn_mean_gap);
    outcome(
        p0_ok && gap_ok,
        format!(
            "n=4096: sqrt(n) P(K_n=0) = {:.6}, sqrt(n) |E[W] - sqrt(2/pi)| = {:.6}",
            row.sqrtn_p0, row.sqrtn_mean_gap
        ),
    )
}

fn stein_characterization() -> Outcome {
    let start = Instant::now();
    let stats = [
        Statistic::Returns,
        Statistic::HalfMax,
        Statistic::SignChanges,
    ];
    let mut nonzero = Vec::new();
    let mut not_recovered = Vec::new();
    let mut basis = 0usize;
    for stat in stats {
        for m in 1..=200u64 {
            let spec = make_spec(stat, m).expect("valid m");
            for (j, r) in basis_residuals(&spec) {
                basis += 1;
                if r != Default::default() {
                    nonzero.push(format!("{stat} m={m} j={j}"));
                }
            }
            if m <= 64 && recover_pmf(spec.operator()).ok().as_ref() != Some(spec.pmf()) {
                not_recovered.push(format!("{stat} m={m}"));
            }
        }
    }
    let cli = Command::new(BIN)
        .args(["stein-verify", "--stat", "max", "--m", "64"])
        .output()
        .expect("run stein-hn");
    let cli_ok = cli.status.code() == Some(0)
        && String::from_utf8_lossy(&cli.stdout).trim()
            == "residual 0 for 65 basis functions; pmf recovered exactly";
    within_time(
        start,
        Duration::from_secs(120),
        nonzero.is_empty() && not_recovered.is_empty() && cli_ok,
        format!(
            "{basis} basis residuals, nonzero: {}, unrecovered (m <= 64): {}, cli: {}",
            nonzero.len(),
            not_recovered.len(),
            if cli_ok { "ok" } else { "mismatch" }
        ),
    )
}

fn lemma_bounds() -> Outcome {
    let mut failures = Vec::new();
    let mut notes = Vec::new();

    let diagonal = sup_fz_diagonal();
    notes.push(format!(
        "sup f_z = {:.6} at z = {:.6}",
        diagonal.max, diagonal.argmax
    ));
    if (diagonal.max - 0.4563).abs() > 5e-4 {
        failures.push("sup f_z");
    }

    let indicator = verify_indicator_bounds(Grid::new(0.0, 8.0, 321));
    let sup_fp_ok = indicator
        .checks
        .iter()
        .find(|c| c.name.starts_with("sup |f_z'|"))
        .is_some_and(|c| c.passed);
    if !sup_fp_ok {
        failures.push("sup |f_z'| <= 1");
    }
    let at_eight = indicator
        .observation("sup_fz_prime_at_z=8")
        .unwrap_or(f64::NAN);
    notes.push(format!("sup_x |f_8'| = {at_eight:.6} (needs >= 0.99)"));
    if at_eight.is_nan() || at_eight < 0.99 {
        failures.push("observed sup |f_z'| >= 0.99 at z = 8");
    }

    let s = sup_search(
        |x| aux_eval(Aux::S, x).unwrap(),
        0.0,
        10.0,
        SearchOptions::default(),
    )
    .expect("valid interval");
    notes.push(format!("sup S = {:.12} at x = {}", s.max, s.argmax));
    if (s.max - SQRT_2_OVER_PI).abs() > 1e-10 || s.argmax != 0.0 {
        failures.push("sup S");
    }

    let d2 = sup_search(
        |x| aux_eval(Aux::D2, x).unwrap(),
        0.0,
        5.0,
        SearchOptions::default(),
    )
    .expect("valid interval");
    notes.push(format!("max D2 = {:.6} at x = {:.6}", d2.max, d2.argmax));
    if (d2.argmax - 1.523).abs() > 1e-3 || (d2.max + 0.0170).abs() > 5e-4 {
        failures.push("argmax D2");
    }

    for h in [TestFunction::identity(), TestFunction::min_one()] {
        let report = verify_lipschitz_bounds(&h, Grid::new(0.0, 8.0, 801));
        if !report.passed() {
            failures.push("Lipschitz f_h bounds");
        }
    }

    outcome(
        failures.is_empty(),
        format!("{}; failed: {:?}", notes.join(", "), failures),
    )
}

fn stein_equation_residual() -> Outcome {
    let xs: Vec<f64> = (1..=600).map(|i| i as f64 * 0.01).collect();
    let mut functions = vec![TestFunction::identity(), TestFunction::min_one()];
    for z in [0.25, 0.6744897501960817, 1.0, 2.0, 3.5] {
        functions.push(TestFunction::indicator(z).expect("z > 0"));
    }
    let mut worst = 0.0f64;
    let mut worst_at = String::new();
    for h in &functions {
        let solution = SteinSolution::new(h.clone());
        for &x in &xs {
            let r = solution.residual(x).abs();
            if r.is_nan() || r > worst {
                worst = r;
                worst_at = format!("{} at x = {x}", h.label());
            }
        }
    }
    outcome(
        worst <= 1e-7,
        format!(
            "max |residual| = {worst:.3e} ({worst_at}) over {} functions",
            functions.len()
        ),
    )
}

fn wasserstein_agreement() -> Outcome {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for stat in [Statistic::Returns, Statistic::Max, Statistic::SignChanges] {
        for base in [2u64, 16, 128, 512] {
            let n = if stat.needs_odd_n() { base + 1 } else { base };
            let law = ScaledLaw::for_statistic(stat, n).expect("valid n");
            let exact = wasserstein_exact(&law);
            let oracle = wasserstein_quantile(&law, 64).expect("64 nodes");
            worst = worst.max((exact - oracle).abs());
            cases += 1;
        }
    }
    outcome(
        worst <= 1e-8,
        format!("{cases} laws, max |exact - quantile| = {worst:.3e}"),
    )
}

fn monte_carlo_consistency() -> Outcome {
    let start = Instant::now();
    let mut passed = true;
    let mut details = Vec::new();
    for (stat, n) in [
        (Statistic::Returns, 64),
        (Statistic::Max, 64),
        (Statistic::SignChanges, 65),
    ] {
        let report = empirical_check(stat, n, 1_000_000, 20_240_601).expect("valid input");
        passed &= report.max_deviation < 0.004;
        details.push(format!("{stat} {:.5}", report.max_deviation));
    }
    within_time(
        start,
        Duration::from_secs(60),
        passed,
        format!("max CDF deviation over 10^6 trials: {}", details.join(", ")),
    )
}

fn auxiliary_lemma() -> Outcome {
    let mut failed = Vec::new();
    let mut min_k = f64::INFINITY;
    let mut min_w = f64::INFINITY;
    for m in 1..=512u64 {
        let report = auxiliary_bounds(m).expect("m >= 1");
        let vw = &report.checks[..2];
        min_k = min_k.min(vw[0].margin);
        min_w = min_w.min(vw[1].margin);
        if !(report.even_cdf_agreement && vw.iter().all(|c| c.passed)) {
            failed.push(2 * m);
        }
    }
    outcome(
        failed.is_empty(),
        format!(
            "even n <= 1024: min margin n d_K^2 vs 2/pi = {min_k:.3e}, sqrt(n) d_W vs 1 = {min_w:.3e}; failing n: {failed:?}"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("exact pmf equals path enumeration", exact_pmf_equivalence),
        ("distance bounds hold for all n", theorem_bound_sweep),
        ("rate optimality at n = 4096", rate_optimality),
        ("discrete Stein characterization", stein_characterization),
        ("Stein solution bounds", lemma_bounds),
        ("Stein equation residual", stein_equation_residual),
        (
            "Wasserstein exact vs quantile oracle",
            wasserstein_agreement,
        ),
        ("Monte Carlo consistency", monte_carlo_consistency),
        ("auxiliary variable lemma", auxiliary_lemma),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = check();
        let tag = if result.passed { "PASS" } else { "FAIL" };
        if !result.passed {
            failures += 1;
        }
        println!("{tag} criterion {}: {name}: {}", i + 1, result.detail);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
