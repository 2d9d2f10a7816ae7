//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit when any
//! criterion fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use foliated_core::arith::{gaussian_places, product_formula_residual, rational_places, GaussianInt};
use foliated_core::eta::{default_tube_radius, stokes_residual, tube_boundary_integral, SurfacePatch, TubeSpec};
use foliated_core::fibered::{base_return_time, flow_return_time_ode, SpeedProfile};
use foliated_core::orbits::find_singular_orbits;
use foliated_core::rational::{divisor_degree_check, RationalFunction};
use foliated_core::sphere::{Chart, PointCP1};
use foliated_core::verifier::verify_all;
use foliated_core::winding::{order_constancy_profile, winding_order};
use foliated_core::{MappingTorusScenario, Method};
use foliated_lab::{parse_scenario, LabError, ReportDoc};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn load(name: &str) -> MappingTorusScenario {
    parse_scenario(&scenario_path(name)).expect(name).scenario
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let sc = load("iz_quartic.scenario");
    let start = Instant::now();
    let report = verify_all(&sc, None);
    let elapsed = start.elapsed().as_secs_f64();
    let t1 = 2.0 / 3f64.sqrt();
    let got: Vec<(usize, f64, i64)> = report.orbits.iter().map(|o| (o.period_n, o.length_l, o.order)).collect();
    ensure(got.len() == 2, || format!("expected 2 orbits, got {got:?}"))?;
    let want = [(1, t1, 4), (4, 4.0 * t1, -1)];
    for (g, w) in got.iter().zip(&want) {
        ensure(g.0 == w.0 && g.2 == w.2 && (g.1 - w.1).abs() < 1e-10, || format!("orbit {g:?}, want {w:?}"))?;
    }
    ensure(report.residual < 1e-9, || format!("residual {:e}", report.residual))?;
    ensure(elapsed < 1.0, || format!("runtime {elapsed:.3} s"))?;
    Ok(format!("orbits (1, 2/sqrt3, +4), (4, 8/sqrt3, -1); residual {:.1e}; {:.3} s", report.residual, elapsed))
}

fn criterion_2() -> Outcome {
    let sc = load("iz_quartic_over_square.scenario");
    let report = verify_all(&sc, None);
    let mut got: Vec<(usize, i64, i64)> = report
        .orbits
        .iter()
        .map(|o| (o.period_n, o.length_l.round() as i64, o.order))
        .collect();
    got.sort();
    ensure(got == [(1, 1, -2), (1, 1, -2), (4, 4, 1)], || format!("orbits {got:?}"))?;
    for o in &report.orbits {
        ensure((o.length_l - o.period_n as f64).abs() < 1e-12, || format!("length {}", o.length_l))?;
    }
    ensure(report.residual < 1e-12, || format!("residual {:e}", report.residual))?;
    Ok(format!("orbits (4, 4, +1), (1, 1, -2), (1, 1, -2); residual {:.1e}", report.residual))
}

fn criterion_3() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for name in ["iz_quartic.scenario", "iz_quartic_over_square.scenario"] {
        let sc = load(name);
        let g = sc.family().g();
        let radius = default_tube_radius(&g.divisor_support());
        for o in find_singular_orbits(&sc).map_err(|e| e.to_string())? {
            let want = Complex64::new(0.0, 2.0 * PI) * o.length_l * o.order as f64;
            let tube = TubeSpec::new(o, radius, g).map_err(|e| e.to_string())?;
            let got = tube_boundary_integral(&sc, &tube).map_err(|e| e.to_string())?;
            let ratio = got / want;
            worst = worst.max((ratio - 1.0).norm());
            count += 1;
            ensure((ratio.re - 1.0).abs() <= 1e-8 && ratio.im.abs() <= 1e-8, || format!("{name}: ratio {ratio}"))?;
        }
    }
    Ok(format!("{count} tubes, max |ratio - 1| {worst:.1e}"))
}

fn criterion_4() -> Outcome {
    let sc = load("iz_quartic.scenario");
    let mut worst: f64 = 0.0;
    for partition in [[Method::A, Method::B], [Method::B, Method::A], [Method::B, Method::B]] {
        let report = verify_all(&sc, Some(&partition));
        let r = report.prop2_residual.ok_or_else(|| format!("{partition:?}: {:?}", report.failure))?;
        ensure(r < 1e-7, || format!("{partition:?}: balance {r:e}"))?;
        worst = worst.max(r);
    }
    let leaf = load("compact_leaf.scenario");
    ensure(!leaf.is_transverse(), || "compact-leaf scenario classified transverse".into())?;
    let report = verify_all(&leaf, None);
    ensure(report.orbits.is_empty(), || format!("{} orbits", report.orbits.len()))?;
    let r = report.prop2_residual.ok_or_else(|| format!("{:?}", report.failure))?;
    ensure(r < 1e-12, || format!("compact leaf balance {r:e}"))?;
    Ok(format!("mixed partitions max {worst:.1e}; compact leaf {r:.1e}"))
}

fn criterion_5() -> Outcome {
    let mut orbits = 0;
    for name in [
        "iz_quartic.scenario",
        "iz_quartic_over_square.scenario",
        "iz_quartic_twisted.scenario",
        "identity_z.scenario",
    ] {
        let sc = load(name);
        for o in find_singular_orbits(&sc).map_err(|e| e.to_string())? {
            let profile = order_constancy_profile(&sc, &o, 8).map_err(|e| e.to_string())?;
            ensure(profile.len() == 8 && profile.iter().all(|&k| k == o.order), || {
                format!("{name}: profile {profile:?} for order {}", o.order)
            })?;
            orbits += 1;
        }
    }
    Ok(format!("{orbits} orbits, 8 leaves each, constant orders"))
}

fn criterion_6() -> Outcome {
    let std_pt = |re: f64, im: f64| PointCP1::in_chart(Chart::Standard, Complex64::new(re, im));
    let inf_pt = |re: f64, im: f64| PointCP1::in_chart(Chart::Infinity, Complex64::new(re, im));
    let configs: Vec<(&str, SurfacePatch)> = vec![
        ("iz_quartic.scenario", SurfacePatch::tube(&std_pt(0.45, 0.0), 0.1)),
        ("iz_quartic.scenario", SurfacePatch::elliptic_tube(&std_pt(0.45, 0.0), 0.15, 0.05)),
        ("iz_quartic.scenario", SurfacePatch::tube(&inf_pt(0.0, 0.3), 0.1)),
        ("iz_quartic.scenario", SurfacePatch::elliptic_tube(&inf_pt(0.0, 0.3), 0.05, 0.12)),
        ("iz_quartic_over_square.scenario", SurfacePatch::tube(&std_pt(0.0, 0.5), 0.12)),
        ("iz_quartic_over_square.scenario", SurfacePatch::elliptic_tube(&std_pt(-0.5, 0.0), 0.2, 0.08)),
        ("identity_z.scenario", SurfacePatch::elliptic_tube(&std_pt(0.5, 0.5), 0.1, 0.3)),
    ];
    let mut worst: f64 = 0.0;
    for (name, patch) in &configs {
        let sc = load(name);
        let r = stokes_residual(&sc, patch).map_err(|e| format!("{name}: {e}"))?;
        ensure(r < 1e-9, || format!("{name}: {r:e}"))?;
        worst = worst.max(r);
    }
    Ok(format!("{} divisor-free tubes and ellipses, max {worst:.1e}", configs.len()))
}

/// Distinct points of a lattice with spacing 0.5 inside `|z| <= 2`.
fn lattice() -> Vec<Complex64> {
    let mut out = Vec::new();
    for a in -4..=4 {
        for b in -4..=4 {
            let z = Complex64::new(0.5 * a as f64 + 0.11, 0.5 * b as f64 - 0.06);
            if z.norm() <= 2.0 {
                out.push(z);
            }
        }
    }
    out
}

fn criterion_7() -> Outcome {
    let pts = lattice();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checks = 0;
    for trial in 0..200 {
        let mut free: Vec<usize> = (0..pts.len()).collect();
        let mut pick = |budget: usize, rng: &mut ChaCha8Rng| {
            let mut list = Vec::new();
            let mut left = rng.gen_range(0..=budget);
            while left > 0 {
                let m = rng.gen_range(1..=left.min(3));
                let i = free.swap_remove(rng.gen_range(0..free.len()));
                list.push((pts[i], m));
                left -= m;
            }
            list
        };
        let zeros = pick(6, &mut rng);
        let poles = pick(6, &mut rng);
        let expand = |l: &[(Complex64, usize)]| -> Vec<Complex64> {
            l.iter().flat_map(|(z, m)| std::iter::repeat_n(*z, *m)).collect()
        };
        let lead = Complex64::new(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0));
        let f = RationalFunction::from_roots(lead, &expand(&zeros), &expand(&poles)).map_err(|e| e.to_string())?;
        let signed = zeros.iter().map(|&(z, m)| (z, m as i64)).chain(poles.iter().map(|&(z, m)| (z, -(m as i64))));
        for (z, want) in signed {
            let got = winding_order(&f, &PointCP1::finite(z), 0.05).map_err(|e| format!("trial {trial}: {e}"))?;
            ensure(got == want, || format!("trial {trial}: order {got} at {z}, want {want}"))?;
            checks += 1;
        }
        let at_inf = expand(&poles).len() as i64 - expand(&zeros).len() as i64;
        let got = winding_order(&f, &PointCP1::INFINITY, 0.05).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(got == at_inf, || format!("trial {trial}: order {got} at inf, want {at_inf}"))?;
        let degree = divisor_degree_check(&f).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(degree == 0, || format!("trial {trial}: degree {degree}"))?;
    }
    Ok(format!("200 functions, {checks} finite orders exact, all degrees 0"))
}

fn criterion_8() -> Outcome {
    let mut worst_closed: f64 = 0.0;
    let mut worst_ode: f64 = 0.0;
    for i in 1..=9 {
        let a = i as f64 / 10.0;
        let h = SpeedProfile::shifted_sine(1.0, a);
        let t = base_return_time(&h).map_err(|e| e.to_string())?;
        let closed = 1.0 / (1.0 - a * a).sqrt();
        let ode = flow_return_time_ode(&h, 1, 1e-3).map_err(|e| e.to_string())?;
        worst_closed = worst_closed.max((t - closed).abs());
        worst_ode = worst_ode.max((t - ode).abs());
        ensure((t - closed).abs() < 1e-10, || format!("a = {a}: {t} vs {closed}"))?;
        ensure((t - ode).abs() < 1e-6, || format!("a = {a}: ode {ode} vs {t}"))?;
    }
    Ok(format!("closed form max {worst_closed:.1e}, ODE max {worst_ode:.1e}"))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut check = |label: String, places: Result<Vec<_>, foliated_core::Error>| -> Result<(), String> {
        let places = places.map_err(|e| format!("{label}: {e}"))?;
        let r = product_formula_residual(&places);
        worst = worst.max(r);
        ensure(r < 1e-12, || format!("{label}: residual {r:e}"))
    };
    check("-12/5".into(), rational_places(-12, 5))?;
    check("1+i".into(), gaussian_places(GaussianInt::new(1, 1), GaussianInt::ONE))?;
    check("3+4i".into(), gaussian_places(GaussianInt::new(3, 4), GaussianInt::ONE))?;
    let mut fractions = 0;
    while fractions < 100 {
        let (p, q) = (rng.gen_range(1..=1_000_000i64), rng.gen_range(1..=1_000_000i64));
        if gcd(p, q) != 1 {
            continue;
        }
        let p = if rng.gen_bool(0.5) { -p } else { p };
        check(format!("{p}/{q}"), rational_places(p, q))?;
        fractions += 1;
    }
    let mut gaussians = Vec::new();
    while gaussians.len() < 50 {
        let z = GaussianInt::new(rng.gen_range(-1000..=1000), rng.gen_range(-1000..=1000));
        if z.is_zero() || z.norm() > 1_000_000 {
            continue;
        }
        check(format!("{z}"), gaussian_places(z, GaussianInt::ONE))?;
        gaussians.push(z);
    }
    for w in gaussians.windows(2) {
        check(format!("({})/({})", w[0], w[1]), gaussian_places(w[0], w[1]))?;
    }
    Ok(format!("3 fixed, 100 fractions, 50 Gaussian integers and 49 ratios; max {worst:.1e}"))
}

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_foliated")).args(args).output().expect("spawn foliated")
}

fn criterion_10() -> Outcome {
    let bad = scenario_path("hyperbolic_bad.scenario");
    let out = run_cli(&["verify", bad.to_str().unwrap()]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    let want = "OrbitNotClosed: zero at 1+0i not periodic under phi (n_max=64)";
    ensure(out.status.code() == Some(1), || format!("hyperbolic exit {:?}", out.status.code()))?;
    ensure(stderr.contains(want), || format!("hyperbolic stderr {stderr:?}"))?;

    let perturbed = scenario_path("perturbed_mu.scenario");
    match parse_scenario(&perturbed) {
        Err(LabError::Validation { field, reason, .. }) if field == "family" && reason == "NotProjectivelyInvariant" => {}
        other => return Err(format!("perturbed scenario: {other:?}")),
    }
    let out = run_cli(&["verify", perturbed.to_str().unwrap()]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    ensure(out.status.code() == Some(1), || format!("perturbed exit {:?}", out.status.code()))?;
    ensure(stderr.contains("NotProjectivelyInvariant"), || format!("perturbed stderr {stderr:?}"))?;
    Ok("hyperbolic: exit 1 OrbitNotClosed; perturbed mu: ValidationError(family, NotProjectivelyInvariant)".into())
}

fn criterion_11() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let scenario = scenario_path("iz_quartic.scenario");
    let mut outputs = Vec::new();
    for i in 0..3 {
        let target = dir.path().join(format!("report{i}.json"));
        let out = run_cli(&["verify", scenario.to_str().unwrap(), "--json", target.to_str().unwrap()]);
        ensure(out.status.code() == Some(0), || format!("run {i} exit {:?}", out.status.code()))?;
        outputs.push(std::fs::read(&target).map_err(|e| e.to_string())?);
    }
    // the same report assembled concurrently in this process
    let loaded = parse_scenario(&scenario).map_err(|e| e.to_string())?;
    let threaded: Vec<Vec<u8>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..4)
            .map(|_| s.spawn(|| ReportDoc::new(&verify_all(&loaded.scenario, None), &loaded.digest).to_json().into_bytes()))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    outputs.extend(threaded);
    ensure(outputs.windows(2).all(|w| w[0] == w[1]), || "reports differ".into())?;
    Ok(format!("{} reports byte-identical ({} bytes)", outputs.len(), outputs[0].len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("closed-orbit identity, phi = iz, g = z^4/(z^4+1)", criterion_1),
        ("identity with multiplier mu = -1", criterion_2),
        ("tube integrals equal 2 pi i l ord", criterion_3),
        ("balance with mixed partitions and compact leaves", criterion_4),
        ("order constancy along orbits", criterion_5),
        ("closedness on divisor-free tubes", criterion_6),
        ("argument principle vs factor lists", criterion_7),
        ("return-time quadrature", criterion_8),
        ("number-field product formula", criterion_9),
        ("hypothesis violations detected", criterion_10),
        ("deterministic JSON reports", criterion_11),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {title}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {title}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
