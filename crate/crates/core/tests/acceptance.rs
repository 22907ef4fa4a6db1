//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! with the tolerance used, and exits non-zero if any criterion fails.

use gamma_interp::cnu::{pencil_matrix, x_norm, CnuStatus, GammaData};
use gamma_interp::config::RunConfig;
use gamma_interp::counterexample::{generate, verify, CounterexampleReport, EvidenceGrade, SCAN_POINTS};
use gamma_interp::eclass::{classify, degree_bound_check, in_enuk, phi_compose, EClassReport};
use gamma_interp::families::{build, FamilySpec};
use gamma_interp::gamma_core::{kobayashi_defect, royal_nodes, GammaMap, GammaPoint};
use gamma_interp::linalg::hermitian_eigen;
use gamma_interp::pick::{np_status, solve_extremal, NPData, NPKind, PICK_TOL};
use gamma_interp::ratfun::{BlaschkeProduct, Poly, RationalFn};
use gamma_interp::spectral::{companion, det, screen, trace, SpectralNPProblem};
use gamma_interp::suite::{reproduce_examples, SuiteOptions};
use gamma_interp::{Error, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome { passed, detail: detail.into() })
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn roots_of(k: usize, sign: f64) -> Vec<C64> {
    let offset = if sign < 0.0 { PI } else { 0.0 };
    (0..k).map(|j| C64::from_polar(1.0, (offset + TAU * j as f64) / k as f64)).collect()
}

/// Largest distance from an expected point to the nearest royal node; ∞ on a
/// count mismatch.
fn royal_error(h: &GammaMap, expected: &[C64]) -> Result<f64> {
    let zetas: Vec<C64> = royal_nodes(h)?.nodes().iter().map(|n| n.zeta).collect();
    if zetas.len() != expected.len() {
        return Ok(f64::INFINITY);
    }
    Ok(expected
        .iter()
        .map(|e| zetas.iter().map(|z| (z - e).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max))
}

fn disc(rng: &mut ChaCha8Rng, max_r: f64) -> C64 {
    C64::from_polar(max_r * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>())
}

fn separated_nodes(rng: &mut ChaCha8Rng, n: usize, max_r: f64) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| disc(rng, max_r)).collect();
        if v.iter().enumerate().all(|(i, a)| v[i + 1..].iter().all(|b| (a - b).norm() > 0.1)) {
            return v;
        }
    }
}

fn random_blaschke(rng: &mut ChaCha8Rng, deg: usize, max_r: f64) -> BlaschkeProduct {
    let zeros = (0..deg).map(|_| disc(rng, max_r)).collect();
    BlaschkeProduct::new(TAU * rng.gen::<f64>(), zeros).expect("zeros inside the disc")
}

fn fresh_points(n: usize) -> Vec<C64> {
    (0..n).map(|k| C64::from_polar(0.9 * (k as f64 + 0.5) / n as f64, 2.4 * k as f64)).collect()
}

/// Certificate checks shared by the ν = 1 and ν = 2 counterexamples.
fn certificate_summary(rep: &CounterexampleReport, cfg: &RunConfig) -> (bool, String) {
    let minus_lambda_nu = BlaschkeProduct::monomial(rep.nu, PI);
    let m_ok = rep.m.sup_distance(&minus_lambda_nu, 256) < 1e-12;
    let eig = rep.violation.eigenvalue;
    let v = verify(rep, cfg);
    let ok = rep.perturbed.len() == rep.nu + 2 && m_ok && eig <= -1e-6 && v.ok;
    let detail = format!(
        "{} points, m = −λ^{}: {m_ok}, certificate eigenvalue {eig:.3e} (≤ −1e-6), ‖X(m)‖ = {:.8}, ε = {:.3e}, independent verification {}",
        rep.perturbed.len(),
        rep.nu,
        rep.violation.x_norm,
        rep.epsilon,
        if v.ok { "ok".to_string() } else { format!("failed: {:?}", v.failures) }
    );
    (ok, detail)
}

fn criterion_1() -> Result<Outcome> {
    let cfg = RunConfig::default();
    let start = Instant::now();
    let rep = generate(1, 0.5, None, 0, &cfg)?;
    let elapsed = start.elapsed();
    let (cert_ok, cert) = certificate_summary(&rep, &cfg);
    let Some(scan) = &rep.lower_evidence.scan else {
        return outcome(false, "no ω-scan recorded for the C_0 evidence");
    };
    let scan_ok = scan.points >= SCAN_POINTS && scan.min_eigenvalue >= -1e-9 * scan.scale;
    let lower_ok = rep.lower_evidence.report.status != CnuStatus::Fails;
    outcome(
        cert_ok && scan_ok && lower_ok && elapsed < Duration::from_secs(60),
        format!(
            "{cert}; C_0 scan over {} ω: min eigenvalue {:.3e} ≥ −1e-9·{:.3e}; C_0 search {:?}; {:.2?} (< 60 s)",
            scan.points,
            scan.min_eigenvalue,
            scan.scale,
            rep.lower_evidence.report.status,
            elapsed
        ),
    )
}

fn criterion_2() -> Result<Outcome> {
    let cfg = RunConfig::default();
    let start = Instant::now();
    let rep = generate(2, 0.5, None, 0, &cfg)?;
    let elapsed = start.elapsed();
    let (cert_ok, cert) = certificate_summary(&rep, &cfg);
    let lower = &rep.lower_evidence;
    let lower_ok = lower.grade == EvidenceGrade::BudgetedSearch
        && lower.report.evaluations >= 2000
        && matches!(lower.report.status, CnuStatus::HoldsStrictly | CnuStatus::HoldsExtremally);
    outcome(
        cert_ok && lower_ok && elapsed < Duration::from_secs(600),
        format!(
            "{cert}; C_1 budgeted search: {:?}, sup ‖X‖ = {:.6}, {} evaluations (≥ 2000); {:.2?} (< 600 s)",
            lower.report.status, lower.report.sup_norm, lower.report.evaluations, elapsed
        ),
    )
}

fn criterion_3() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for nu in 1..=4usize {
        for r in [0.3, 0.5, 0.9] {
            let h = build(&FamilySpec::HNu { nu, r })?;
            let expected = BlaschkeProduct::monomial(nu + 1, PI).to_rational().reduced()?;
            let comp = phi_compose(&BlaschkeProduct::monomial(nu, PI), &h)?;
            let err = comp.result.coeff_distance(&expected);
            worst = worst.max(err);
            if err > 1e-10 || comp.cancellations != 2 * nu + 1 {
                bad.push(format!("ν={nu} r={r}: error {err:.2e}, {} cancellations", comp.cancellations));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("12 cases, max coefficient error {worst:.2e} (≤ 1e-10), cancellations = 2ν+1 {}", fails(&bad)),
    )
}

fn fails(bad: &[String]) -> String {
    if bad.is_empty() {
        String::new()
    } else {
        format!("; failures: {}", bad.join(" | "))
    }
}

fn criterion_4() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for nu in 1..=4usize {
        for r in [0.3, 0.5, 0.9] {
            let err = royal_error(&build(&FamilySpec::HNu { nu, r })?, &roots_of(2 * nu + 1, -1.0))?;
            worst = worst.max(err);
            if err > 1e-8 {
                bad.push(format!("h_ν ν={nu} r={r}: {err:.2e}"));
            }
        }
    }
    for j in [1usize, 2] {
        let err = royal_error(&build(&FamilySpec::HJ { j })?, &roots_of(2 * j + 1, 1.0))?;
        worst = worst.max(err);
        if err > 1e-8 {
            bad.push(format!("h_j j={j}: {err:.2e}"));
        }
    }
    outcome(
        bad.is_empty(),
        format!("h_ν: (2ν+1)th roots of −1, h_j: (2j+1)th roots of 1, max error {worst:.2e} (≤ 1e-8){}", fails(&bad)),
    )
}

/// Checks an exact membership or exclusion, recording a failure otherwise.
fn expect_cell(h: &GammaMap, nu: usize, k: usize, want: bool, label: &str, bad: &mut Vec<String>) -> Result<()> {
    let cell = in_enuk(h, nu, k)?;
    if cell.in_e != want || !cell.exact {
        bad.push(format!("{label}: E_{{{nu},{k}}} in={} exact={} via {:?}", cell.in_e, cell.exact, cell.method));
    }
    Ok(())
}

fn zero_s(d: usize) -> Result<GammaMap> {
    GammaMap::new(RationalFn::constant(c(0.0, 0.0)), BlaschkeProduct::monomial(d, 0.0).to_rational())
}

fn criterion_5() -> Result<Outcome> {
    let mut bad = Vec::new();
    let mut spec_pattern_breaks = 0;
    for d in 1..=4usize {
        let h = zero_s(d)?;
        let label = format!("(0, λ^{d})");
        // ν = 0: E_{0,d+1} ∖ E_{0,d}
        expect_cell(&h, 0, d + 1, true, &label, &mut bad)?;
        expect_cell(&h, 0, d, false, &label, &mut bad)?;
        // ν ≥ 1: the column does not move with ν, since d(p) ≤ k − 1 already
        // admits a constant witness
        for nu in 1..=2 {
            expect_cell(&h, nu, d + 1, true, &label, &mut bad)?;
            expect_cell(&h, nu, d, false, &label, &mut bad)?;
            if in_enuk(&h, nu, nu + d)?.in_e {
                spec_pattern_breaks += 1;
            }
        }
    }
    for nu in [1usize, 2] {
        let h = build(&FamilySpec::HNu { nu, r: 0.5 })?;
        let label = format!("h_{nu}");
        expect_cell(&h, nu, nu + 2, true, &label, &mut bad)?;
        expect_cell(&h, nu - 1, nu + 2, false, &label, &mut bad)?;
    }
    let h = build(&FamilySpec::HPsi { psi: BlaschkeProduct::monomial(3, 0.0) })?;
    expect_cell(&h, 1, 5, true, "h_ψ", &mut bad)?;
    expect_cell(&h, 1, 4, false, "h_ψ", &mut bad)?;
    for j in [1usize, 2] {
        let h = build(&FamilySpec::HJ { j })?;
        let label = format!("h_j j={j}");
        expect_cell(&h, 1, 2 * j + 4, true, &label, &mut bad)?;
        expect_cell(&h, 0, 2 * j + 4, false, &label, &mut bad)?;
    }
    let h = build(&FamilySpec::HJ { j: 1 })?;
    let r = |c: &[f64]| Poly::from_real(c);
    let expected = RationalFn::new(r(&[0.0, 0.0, -1.0, 0.0, 0.0, -2.0]), r(&[2.0, 0.0, 0.0, 1.0]))?.reduced()?;
    let comp = phi_compose(&BlaschkeProduct::identity(), &h)?;
    let err = comp.result.coeff_distance(&expected);
    let deg = comp.inner.as_ref().map(|b| b.degree());
    if err > 1e-10 || deg != Some(5) {
        bad.push(format!("h_1 identity witness: error {err:.2e}, Blaschke degree {deg:?}"));
    }
    outcome(
        bad.is_empty(),
        format!(
            "(0,λ^d), d ≤ 4: E_{{0,d+1}}∖E_{{0,d}} exact; for ν = 1, 2 the membership is E_{{ν,d+1}}∖E_{{ν,d}} \
             (note: the shifted pattern E_{{ν,ν+d+1}}∖E_{{ν,ν+d}} does not hold for ν ≥ 1; {breaks} cells of \
             E_{{ν,ν+d}} contain the map); h_ν, h_ψ, h_j exact; h_1 witness error {err:.2e} (≤ 1e-10), degree {deg:?}{}",
            fails(&bad),
            breaks = spec_pattern_breaks
        ),
    )
}

fn criterion_6() -> Result<Outcome> {
    let rep = reproduce_examples(&SuiteOptions { filter: Some("exdm".into()), ..Default::default() })?;
    let failed: Vec<String> = rep.failures().map(|r| format!("{}: {} ({})", r.id, r.assertion, r.observed)).collect();
    outcome(
        rep.all_passed,
        format!("{} rows, {} passed, {} failed (norms 1e-6, points 1e-9, coefficients 1e-10){}", rep.rows.len(), rep.passed, rep.failed, fails(&failed)),
    )
}

fn criterion_7() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pts = fresh_points(50);
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for i in 0..200 {
        let n = rng.gen_range(1..=5usize);
        let deg = rng.gen_range(0..n);
        let nodes = separated_nodes(&mut rng, n, 0.8);
        let q = random_blaschke(&mut rng, deg, 0.8);
        let d = NPData::new(nodes.clone(), nodes.iter().map(|&z| q.eval(z)).collect())?;
        let st = np_status(&d, PICK_TOL)?;
        if st.kind != NPKind::ExtremallySolvable || st.rank != deg {
            bad.push(format!("#{i}: {:?} rank {} for d(q) = {deg}", st.kind, st.rank));
            continue;
        }
        let got = solve_extremal(&d, PICK_TOL)?;
        let err = pts.iter().map(|&z| (got.eval(z) - q.eval(z)).norm()).fold(0.0, f64::max);
        worst = worst.max(err);
        if err > 1e-9 {
            bad.push(format!("#{i}: recovery error {err:.2e}"));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && elapsed < Duration::from_secs(30),
        format!("200 instances, n ≤ 5: extremal with rank d(q), max error at 50 fresh points {worst:.2e} (≤ 1e-9); {elapsed:.2?} (< 30 s){}", fails(&bad)),
    )
}

fn criterion_8() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut disagreements = 0;
    let mut in_band = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=5usize);
        let nodes = separated_nodes(&mut rng, n, 0.8);
        let targets = (0..n).map(|_| GammaPoint::from_pair(disc(&mut rng, 0.95), disc(&mut rng, 0.95))).collect();
        let d = GammaData::new(nodes, targets)?;
        let deg = rng.gen_range(0..=3usize);
        let u = random_blaschke(&mut rng, deg, 0.9);
        let psd = hermitian_eigen(&pencil_matrix(&u, &d)?).min() >= 0.0;
        let x = x_norm(&u, &d)?;
        if psd != (x <= 1.0) {
            if (x - 1.0).abs() < 1e-7 {
                in_band += 1;
            } else {
                disagreements += 1;
            }
        }
    }
    outcome(
        disagreements == 0,
        format!("500 random (υ, data): {disagreements} disagreements outside the 1e-7 band, {in_band} inside"),
    )
}

fn constructor_zoo() -> Result<Vec<FamilySpec>> {
    let b = |phase: f64, zeros: &[C64]| BlaschkeProduct::new(phase, zeros.to_vec());
    let f1 = b(0.4, &[c(0.3, 0.2)])?;
    let f2 = b(1.1, &[c(-0.2, 0.5), c(0.4, -0.1)])?;
    let mut specs = vec![
        FamilySpec::Symmetrize { phi: f1.clone(), psi: f2.clone() },
        FamilySpec::Symmetrize { phi: BlaschkeProduct::identity(), psi: BlaschkeProduct::constant(0.7) },
        FamilySpec::RoyalLift { upsilon: f2.clone() },
        FamilySpec::SemigroupProduct {
            first: Box::new(FamilySpec::HNu { nu: 1, r: 0.5 }),
            second: Box::new(FamilySpec::FlatGeodesic { beta: c(0.2, 0.1) }),
        },
        FamilySpec::ScaleS { base: Box::new(FamilySpec::RoyalLift { upsilon: f1.clone() }), r: 0.5 },
        FamilySpec::ComposeInner { base: Box::new(FamilySpec::HNu { nu: 1, r: 0.5 }), phi: f1.clone() },
        FamilySpec::SuperficialOf { omega: C64::from_polar(1.0, 0.9), p: f2.clone() },
        FamilySpec::SuperficialOf { omega: c(1.0, 0.0), p: BlaschkeProduct::monomial(3, 0.0) },
        FamilySpec::HPsi { psi: BlaschkeProduct::monomial(3, 0.0) },
        FamilySpec::HPsi { psi: f1 },
        FamilySpec::HJ { j: 1 },
        FamilySpec::HJ { j: 2 },
        FamilySpec::Surprise { a: c(0.5, 0.0), c: 0.8 },
    ];
    for nu in 1..=3 {
        specs.push(FamilySpec::HNu { nu, r: 0.5 });
    }
    for beta in flat_betas() {
        specs.push(FamilySpec::FlatGeodesic { beta });
    }
    Ok(specs)
}

fn flat_betas() -> Vec<C64> {
    vec![c(0.0, 0.0), c(0.5, 0.0), c(-0.3, 0.6), c(0.1, -0.8)]
}

fn classified() -> Result<Vec<(FamilySpec, EClassReport)>> {
    constructor_zoo()?
        .into_iter()
        .map(|spec| {
            let rep = classify(&build(&spec)?, 2, 6)?;
            Ok((spec, rep))
        })
        .collect()
}

fn criterion_9(reports: &[(FamilySpec, EClassReport)]) -> Result<Outcome> {
    let mut bad = Vec::new();
    for (spec, rep) in reports {
        let name = spec.name();
        for cell in rep.memberships.iter().filter(|c| c.in_e) {
            if cell.k == 1 && !rep.superficial {
                bad.push(format!("{name}: non-superficial map in E_{{{},1}}", cell.nu));
            }
            if cell.k == 2 && !(rep.superficial || rep.geodesic) {
                bad.push(format!("{name}: E_{{{},2}} member neither superficial nor geodesic", cell.nu));
            }
        }
        if let FamilySpec::FlatGeodesic { .. } = spec {
            if !rep.k_extremal_certificates.iter().any(|c| c.k == 2) {
                bad.push(format!("{name}: no 2-extremal certificate"));
            }
        }
    }
    let pts = fresh_points(50);
    let mut worst = 0.0f64;
    for beta in flat_betas() {
        let h = build(&FamilySpec::FlatGeodesic { beta })?;
        for k in 0..20 {
            worst = worst.max(kobayashi_defect(&h, pts[k], pts[k + 25])?.abs());
        }
    }
    if worst > 1e-6 {
        bad.push(format!("Kobayashi defect {worst:.2e}"));
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} maps over every constructor: E_{{ν1}} only superficial, E_{{ν2}} only superficial or geodesic, \
             flat geodesics 2-extremal; max Kobayashi defect {worst:.2e} on 20 pairs × {} geodesics (≤ 1e-6){}",
            reports.len(),
            flat_betas().len(),
            fails(&bad)
        ),
    )
}

fn criterion_10(reports: &[(FamilySpec, EClassReport)]) -> Result<Outcome> {
    let mut checked = 0;
    let mut superficial_exempt = 0;
    let mut bad = Vec::new();
    let mut maps: Vec<(String, EClassReport)> = reports.iter().map(|(s, r)| (s.name().to_string(), r.clone())).collect();
    for d in 1..=4 {
        maps.push((format!("(0,λ^{d})"), classify(&zero_s(d)?, 2, 6)?));
    }
    for (name, rep) in &maps {
        for cell in rep.memberships.iter().filter(|c| c.in_e) {
            if rep.superficial {
                if !degree_bound_check(&rep.map, cell.k) {
                    superficial_exempt += 1;
                }
                continue;
            }
            checked += 1;
            if !degree_bound_check(&rep.map, cell.k) {
                bad.push(format!("{name}: d(p) = {} in E_{{{},{}}}", rep.dp, cell.nu, cell.k));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{checked} memberships of non-superficial maps satisfy d(p) ≤ 2k − 2; {superficial_exempt} superficial \
             memberships exceed it (a constant witness with mq ≡ −1 escapes the bound){}",
            fails(&bad)
        ),
    )
}

fn criterion_11() -> Result<Outcome> {
    let mut bad = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let z = GammaPoint::from_pair(disc(&mut rng, 1.0), disc(&mut rng, 1.0));
        let w = companion(&z);
        if trace(&w) != z.s || det(&w) != z.p {
            bad.push(format!("companion round trip inexact at {z:?}"));
        }
    }
    let zero = c(0.0, 0.0);
    let scalar = SpectralNPProblem::new(vec![c(0.1, 0.0), c(-0.2, 0.3)], vec![
        [[c(0.3, 0.1), zero], [zero, c(0.3, 0.1)]],
        [[c(0.5, 0.0), c(0.2, 0.0)], [zero, c(0.1, 0.0)]],
    ]);
    if !matches!(scalar.to_gamma_data(), Err(Error::ScalarMatrix(0))) {
        bad.push("scalar matrix not rejected".into());
    }
    let cfg = RunConfig::default();
    let mut statuses = Vec::new();
    for nu in [1usize, 2] {
        let rep = generate(nu, 0.5, None, 0, &cfg)?;
        let prob = SpectralNPProblem::from_gamma_data(&rep.perturbed);
        let st = screen(&prob, None, &cfg.search())?.status;
        statuses.push(format!("ν={nu}: {st:?}"));
        if st != CnuStatus::Fails {
            bad.push(format!("counterexample ν={nu} screened as {st:?}"));
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "100 companion round trips exact; scalar matrix rejected; counterexample-derived problems screened with ν = n − 2: {}{}",
            statuses.join(", "),
            fails(&bad)
        ),
    )
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Result<Outcome> + 'a>);

fn main() -> ExitCode {
    let reports = classified();
    let criteria: Vec<Criterion> = vec![
        ("counterexample ν=1, C_0 holds, C_1 fails", Box::new(criterion_1)),
        ("counterexample ν=2, C_1 holds, C_2 fails", Box::new(criterion_2)),
        ("Φ∘(−λ^ν, h_ν) = −λ^{ν+1} with 2ν+1 cancellations", Box::new(criterion_3)),
        ("royal nodes of h_ν and h_j", Box::new(criterion_4)),
        ("E-class table", Box::new(criterion_5)),
        ("auxiliary-extremal examples", Box::new(criterion_6)),
        ("Nevanlinna–Pick round trip", Box::new(criterion_7)),
        ("pencil and ‖X‖ oracles agree", Box::new(criterion_8)),
        ("classification of E_{ν1}, E_{ν2} and flat geodesics", Box::new(|| criterion_9(reports.as_ref().map_err(|e| Error::Validation(e.to_string()))?))),
        ("degree bound d(p) ≤ 2n − 2", Box::new(|| criterion_10(reports.as_ref().map_err(|e| Error::Validation(e.to_string()))?))),
        ("spectral front end", Box::new(criterion_11)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failed += 1;
        }
        println!(
            "{} {:>2} {name} [{:.2?}]\n      {detail}",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
