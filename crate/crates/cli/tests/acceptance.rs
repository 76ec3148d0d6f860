//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runtime limits are part of each criterion.

mod common;

use common::run;
use num_complex::Complex64 as C64;
use rand::Rng;
use spt_z2::hamiltonian::{self, Boundary, ChainSpec};
use spt_z2::io::TupleFile;
use spt_z2::linalg::{c, frob_diff};
use spt_z2::modular::{self, BipartiteVector, SwapSign};
use spt_z2::mps::{self, RawTuple};
use spt_z2::random::{random_matrix, random_phase, random_unitary, rng};
use spt_z2::reflection::{self, SiteMap};
use spt_z2::scan::{self, FamilySpec};
use spt_z2::{zoo, Config};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64, what: &str) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_s, || {
        format!("{what} took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64())
    })
}

fn index_separation() -> Outcome {
    let mut notes = Vec::new();
    for (model, expected) in [("aklt", -1), ("product:1,0", 1)] {
        let start = Instant::now();
        let r = run(&["index", "--model", model]);
        let elapsed = start.elapsed();
        check(r.code == 0, || format!("{model}: exit {}", r.code))?;
        let v = r.json();
        let res = &v["result"];
        check(res["zeta"] == expected, || format!("{model}: zeta {}", res["zeta"]))?;
        let residual = if expected == 1 { &res["sym_residual"] } else { &res["antisym_residual"] };
        let residual = residual.as_f64().ok_or("missing residual")?;
        check(residual < 1e-8, || format!("{model}: residual {residual:e}"))?;
        within(elapsed, 1.0, model)?;
        notes.push(format!("{model}: ζ={expected:+} res={residual:.1e} {:.2}s", elapsed.as_secs_f64()));
    }
    Ok(notes.join("; "))
}

/// `v_μ ↦ e^{iφ} W v_μ W†` with seeded random unitaries `W`.
fn gauge_invariance() -> Outcome {
    let cfg = Config::default();
    let start = Instant::now();
    let mut r = rng(20_240);
    let aklt = zoo::aklt();
    for trial in 0..100 {
        let w = random_unitary(&mut r, 2);
        let phase = random_phase(&mut r);
        let mats = aklt.mats().iter().map(|m| (&w * m * w.adjoint()) * phase).collect();
        let raw = RawTuple::new(mats).map_err(|e| e.to_string())?;
        let report = reflection::z2_index(&raw, &cfg).map_err(|e| format!("trial {trial}: {e}"))?;
        check(report.zeta == -1, || format!("trial {trial}: zeta {}", report.zeta))?;
    }
    let elapsed = start.elapsed();
    within(elapsed, 30.0, "100 trials")?;
    Ok(format!("100/100 trials ζ=-1 in {:.2}s", elapsed.as_secs_f64()))
}

fn blocking_invariance() -> Outcome {
    let cfg = Config::default();
    let start = Instant::now();
    let v = mps::normalize(&zoo::aklt(), &cfg).map_err(|e| e.to_string())?;
    for b in [2, 3] {
        let w = mps::block(&v, b, cfg.window_cap).map_err(|e| e.to_string())?;
        let raw = RawTuple::new(w.mats().to_vec()).map_err(|e| e.to_string())?;
        let run = reflection::z2_index_run_with(&raw, &SiteMap::blocked(3, b), &cfg)
            .map_err(|e| format!("b={b}: {e}"))?;
        check(run.report.zeta == -1, || format!("b={b}: zeta {}", run.report.zeta))?;
    }
    let elapsed = start.elapsed();
    within(elapsed, 10.0, "blocking")?;
    Ok(format!("b=2,3 ζ=-1 in {:.2}s", elapsed.as_secs_f64()))
}

fn kappa_equals_sigma() -> Outcome {
    let cfg = Config::default();
    let start = Instant::now();
    let mut r = rng(4_404);
    let mut worst: f64 = 0.0;
    for (sign, expected) in [(1.0, SwapSign::Symmetric), (-1.0, SwapSign::Antisymmetric)] {
        for trial in 0..200 {
            let m = r.gen_range(2..=8);
            let g = random_matrix(&mut r, m, m);
            let omega =
                BipartiteVector::normalized(&g + g.transpose().scale(sign)).map_err(|e| e.to_string())?;
            let rep =
                modular::modular_data(&omega, &cfg).map_err(|e| format!("{expected:?} #{trial}: {e}"))?;
            check(rep.swap == expected, || format!("#{trial}: swap {:?}", rep.swap))?;
            check(rep.kappa.is_some() && rep.kappa == rep.sigma, || {
                format!("{expected:?} #{trial} (m={m}): kappa {:?} sigma {:?}", rep.kappa, rep.sigma)
            })?;
            let res = &rep.residuals;
            let max = res.j_square.max(res.s_action).max(res.delta_formula);
            check(max < 1e-8, || format!("{expected:?} #{trial} (m={m}): identity residual {max:e}"))?;
            worst = worst.max(max);
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, 60.0, "400 vectors")?;
    Ok(format!("400/400 κ=σ, worst residual {worst:.1e} in {:.2}s", elapsed.as_secs_f64()))
}

fn zoo_tuples() -> Vec<(String, RawTuple)> {
    let mut out = vec![
        ("aklt".to_string(), zoo::aklt()),
        ("ghz".to_string(), zoo::ghz()),
        ("product:1,0".to_string(), zoo::product(&[c(1.0, 0.0), c(0.0, 0.0)])),
        ("product:0.6,0.8i".to_string(), zoo::product(&[c(0.6, 0.0), c(0.0, 0.8)])),
        ("product:1,1-2i,0.5".to_string(), zoo::product(&[c(1.0, 0.0), c(1.0, -2.0), c(0.5, 0.0)])),
    ];
    for i in 0..=10 {
        let s = i as f64 / 10.0;
        out.push((format!("deformed-aklt:{s}"), zoo::deformed_aklt(s)));
    }
    for i in 0..=10 {
        let s = i as f64 * 0.05;
        out.push((format!("aklt-breaker:{s}"), zoo::aklt_breaker(s)));
    }
    out
}

fn sigma_equals_zeta() -> Outcome {
    let cfg = Config::default();
    let mut passed = 0;
    for (name, raw) in zoo_tuples() {
        let Ok(run) = reflection::z2_index_run(&raw, &cfg) else { continue };
        let omega = modular::bond_vector(&run.report, &run.rho.rho).map_err(|e| format!("{name}: {e}"))?;
        let sigma = modular::swap_sign(&omega, cfg.swap_tol).value();
        check(sigma == Some(run.report.zeta), || format!("{name}: σ {sigma:?} vs ζ {}", run.report.zeta))?;
        passed += 1;
    }
    check(passed >= 3, || format!("only {passed} zoo tuples passed both certificates"))?;
    Ok(format!("{passed} certified zoo tuples with σ=ζ"))
}

fn gauge_certificate() -> Outcome {
    let cfg = Config::default();
    let run = reflection::z2_index_run(&zoo::aklt(), &cfg).map_err(|e| e.to_string())?;
    let rep = &run.report;
    let reflected = reflection::reflected_tuple(&run.tuple, &run.rho, &cfg).map_err(|e| e.to_string())?;
    let relation = reflection::relation_residual(&rep.u, rep.phase, &run.tuple, &reflected.tilde_v);
    let phase_sq = (rep.phase * rep.phase - C64::new(1.0, 0.0)).norm();
    let rho = &run.rho.rho;
    let commute = frob_diff(&(&rep.u * rho * rep.u.adjoint()), rho);
    check(relation < 1e-9, || format!("relation residual {relation:e}"))?;
    check(phase_sq < 1e-10, || format!("|phase² − 1| = {phase_sq:e}"))?;
    check(commute < 1e-10, || format!("‖UρU† − ρ‖ = {commute:e}"))?;
    Ok(format!("relation {relation:.1e}, phase² {phase_sq:.1e}, UρU† {commute:.1e}"))
}

fn transfer_spectrum() -> Outcome {
    let cfg = Config::default();
    let v = mps::normalize(&zoo::aklt(), &cfg).map_err(|e| e.to_string())?;
    let spec = mps::transfer_spectrum(&v).map_err(|e| e.to_string())?;
    let expected = [1.0, -1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
    check(spec.len() == 4, || format!("{} eigenvalues", spec.len()))?;
    let err = spec.iter().zip(expected).map(|(z, e)| (z - C64::new(e, 0.0)).norm()).fold(0.0, f64::max);
    check(err < 1e-10, || format!("spectrum {spec:?}, error {err:e}"))?;
    Ok(format!("{{1, -1/3 ×3}} within {err:.1e}"))
}

fn parent_hamiltonian() -> Outcome {
    let cfg = Config::default();
    let start = Instant::now();
    let v = mps::normalize(&zoo::aklt(), &cfg).map_err(|e| e.to_string())?;
    let hint = hamiltonian::parent_interaction(&v, 2, &cfg).map_err(|e| e.to_string())?;
    check(hint.rank == 5, || format!("rank(h) = {}", hint.rank))?;
    let refl = hamiltonian::reflection_check(&hint);
    check(refl < 1e-10, || format!("reflection residual {refl:e}"))?;
    let mut gaps = Vec::new();
    for n in [4, 5, 6] {
        let h = hamiltonian::chain_hamiltonian(&hint, ChainSpec { n, boundary: Boundary::Open }, cfg.ed_cap)
            .map_err(|e| e.to_string())?;
        let ed = hamiltonian::ed_report(&h, cfg.kernel_tol_rel, cfg.ed_cap).map_err(|e| e.to_string())?;
        check(ed.ground_energy.abs() <= 1e-9, || format!("n={n}: E0 = {:e}", ed.ground_energy))?;
        check(ed.kernel_dim == 4, || format!("n={n}: kernel {}", ed.kernel_dim))?;
        let gap = ed.gap.unwrap_or(0.0);
        check(gap > 0.0, || format!("n={n}: no gap"))?;
        gaps.push(format!("{gap:.4}"));
    }
    let elapsed = start.elapsed();
    within(elapsed, 120.0, "n ≤ 6")?;
    Ok(format!(
        "rank 5, refl {refl:.1e}, kernel 4 at n=4,5,6, gaps [{}] in {:.2}s",
        gaps.join(", "),
        elapsed.as_secs_f64()
    ))
}

fn error_taxonomy() -> Outcome {
    let r = run(&["index", "--model", "ghz"]);
    check(r.code == 2 && r.json()["status"] == "not_primitive", || format!("ghz: exit {}", r.code))?;
    let r = run(&["index", "--model", "aklt-breaker:0.2"]);
    check(r.code == 3 && r.json()["status"] == "not_reflection_invariant", || {
        format!("aklt-breaker:0.2: exit {}", r.code)
    })?;
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let scaled = zoo::aklt().scaled(c(2.5, -1.5));
    let path = dir.path().join("scaled.json");
    std::fs::write(&path, serde_json::to_string(&TupleFile::from_raw(&scaled)).unwrap())
        .map_err(|e| e.to_string())?;
    let residual = mps::normalization_residual(scaled.mats());
    let r = run(&["index", path.to_str().unwrap()]);
    check(r.code == 0 && r.json()["result"]["zeta"] == -1, || format!("mis-scaled: exit {}", r.code))?;
    Ok(format!("ghz→2, breaker(0.2)→3, mis-scaled (residual {residual:.1}) repaired → ζ=-1"))
}

fn path_stability() -> Outcome {
    let cfg = Config::default();
    let start = Instant::now();
    let deformed =
        scan::scan(&FamilySpec::builtin("deformed-aklt").unwrap(), &cfg, 1).map_err(|e| e.to_string())?;
    check(deformed.points.len() == 11, || format!("{} points", deformed.points.len()))?;
    check(deformed.summary.constant_index, || "deformed-aklt index not constant".into())?;
    check(deformed.points.iter().all(|p| p.zeta == Some(-1)), || "some ζ ≠ −1 on deformed-aklt".into())?;
    let breaker =
        scan::scan(&FamilySpec::builtin("aklt-breaker").unwrap(), &cfg, 1).map_err(|e| e.to_string())?;
    let grid = breaker.points.iter().map(|p| p.s).collect::<Vec<_>>();
    let first_positive = grid.iter().copied().find(|&s| s > 0.0);
    check(breaker.summary.first_failure == first_positive, || {
        format!("first_failure {:?}, expected {first_positive:?}", breaker.summary.first_failure)
    })?;
    let elapsed = start.elapsed();
    within(elapsed, 60.0, "scans")?;
    Ok(format!(
        "deformed-aklt ζ≡-1 over 11 points, aklt-breaker first_failure={:?} in {:.2}s",
        breaker.summary.first_failure.unwrap_or(f64::NAN),
        elapsed.as_secs_f64()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("index separation", index_separation),
        ("gauge invariance", gauge_invariance),
        ("blocking invariance", blocking_invariance),
        ("kappa = sigma", kappa_equals_sigma),
        ("sigma = zeta bridge", sigma_equals_zeta),
        ("gauge-relation certificate", gauge_certificate),
        ("transfer spectrum", transfer_spectrum),
        ("parent Hamiltonian", parent_hamiltonian),
        ("error taxonomy", error_taxonomy),
        ("path stability", path_stability),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL [{:>2}] {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
