//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). Set `ACCEPTANCE_ONLY=3,4` to run a
//! subset and `ACCEPTANCE_STRICT=1` to exit nonzero when any criterion fails.

use std::time::Instant;

use hybrid_ww::check::{StatCheck, Tolerance};
use hybrid_ww::losm::{assemble, assemble_solve, march, ClosureInput, LosmProblem, LosmState};
use hybrid_ww::material::Material;
use hybrid_ww::mesh::{build_uniform_mesh, Mesh1D, TimeGrid};
use hybrid_ww::metrics::{l2_norm, relative_change, relative_l2_error};
use hybrid_ww::popctrl::uniform_comb;
use hybrid_ww::reference::{benchmark_reference, sn_solve, ReferenceSettings, ReferenceSolution, SnConfig, SnMoments, SnProblem};
use hybrid_ww::transport::{Particle, ParticleBank};
use hybrid_ww::ww::{build_centers, WeightWindowGrid, WindowOutcome};
use hybrid_ww::{filters, run, spawn_stream, CombKind, Mode, RunConfig, RunRecord};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn benchmark_run(mode: Mode, seed: u64) -> RunConfig {
    let mut c = RunConfig::benchmark();
    c.mode = mode;
    c.seed = seed;
    c
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(" ")
}

// ---------------------------------------------------------------- criterion 1

fn growth_law() -> Outcome {
    let mut c = benchmark_run(Mode::Analog, 11);
    c.histories_per_step = 100_000;
    c.target_population = 100_000;
    c.time.steps = 10;
    let rec = run(&c, None).expect("analog run");
    let m = c.material::<f64>().unwrap();
    let rate = m.speed * (m.sigma_s + m.nu_f * m.sigma_f - m.sigma_t);
    let mut rel_var = 0.0;
    let mut worst = 0.0f64;
    let mut all = true;
    let mut leaked = 0.0;
    for s in &rec.steps {
        let w = s.metrics.census_weight;
        let sw = s.metrics.census_weight_sigma.unwrap_or(f64::NAN);
        rel_var += (sw / w).powi(2);
        let sigma = w * rel_var.sqrt();
        let expected = (rate * s.t).exp();
        let chk = StatCheck::new(format!("W^{}", s.n), w, expected, Tolerance::Sigma { k: 3.0, sigma });
        worst = worst.max((w - expected).abs() / sigma);
        all &= chk.passed();
        leaked += s.counters.leakage_weight;
    }
    let last = rec.steps.last().unwrap();
    Outcome::new(
        all && leaked == 0.0,
        format!(
            "census weight vs exp({rate:.3} t) for n <= 10 at H = 1e5: worst deviation {worst:.2} sigma (cumulative batch sigma); W^10 = {:.5} vs {:.5}; leakage {leaked}",
            last.metrics.census_weight,
            (rate * last.t).exp()
        ),
    )
}

// ---------------------------------------------------------------- criterion 2

fn unbiased_modes(reference: &ReferenceSolution) -> Outcome {
    let run_one = |mode| {
        let mut c = benchmark_run(mode, 21);
        c.histories_per_step = 100_000;
        c.target_population = 100_000;
        c.time.steps = 1;
        run(&c, None).expect("one-step run").steps.remove(0).report
    };
    let a = run_one(Mode::Analog);
    let h = run_one(Mode::Hww);
    let l = run_one(Mode::Lww);
    let r = &reference.phi_interval[0];
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, x, y) in [("analog/hww", &a, &h), ("analog/lww", &a, &l), ("hww/lww", &h, &l)] {
        let (sx, sy) = (x.sigma.as_ref().unwrap(), y.sigma.as_ref().unwrap());
        let mut n = 0;
        let mut ok = 0;
        for i in 0..r.len() {
            if r[i] > 1e-2 {
                n += 1;
                let comb = (sx[i].powi(2) + sy[i].powi(2)).sqrt();
                let d = (x.phi_track[i] - y.phi_track[i]).abs();
                if d <= 3.0 * comb || d == 0.0 {
                    ok += 1;
                }
            }
        }
        let frac = ok as f64 / n as f64;
        pass &= frac >= 0.95;
        parts.push(format!("{name} {ok}/{n} ({:.1}%)", 100.0 * frac));
    }
    Outcome::new(
        pass,
        format!(
            "cells with reference > 1e-2 agreeing within 3 combined sigma: {} (lww runs analog on step 1)",
            parts.join(", ")
        ),
    )
}

// ------------------------------------------------------- criteria 3 and 4 setup

/// Cell-average moments of an S_N layer as a low-order state with edge point values at the ends.
fn state_from_sn(m: &SnMoments) -> LosmState<f64> {
    let cells = m.phi.len();
    let with_edges = |cellv: &[f64], edge: &[f64]| {
        let mut v = Vec::with_capacity(cells + 2);
        v.push(edge[0]);
        v.extend_from_slice(cellv);
        v.push(edge[cells]);
        v
    };
    LosmState {
        phi: with_edges(&m.phi, &m.phi_edge),
        current: m.current_edge.clone(),
        closure: with_edges(&m.closure, &m.closure_edge),
        p_left: m.p_left,
        p_right: m.p_right,
        j_in_left: 0.0,
        j_in_right: 0.0,
    }
}

fn implicit_from_sn(m: &SnMoments) -> ClosureInput<f64> {
    let s = state_from_sn(m);
    ClosureInput::Implicit {
        closure: s.closure,
        p_left: s.p_left,
        p_right: s.p_right,
    }
}

/// A smooth isotropic bump in a slab of the benchmark material with vacuum boundaries.
fn smooth_problem(cells: usize, length: f64) -> (Mesh1D<f64>, Material<f64>, Vec<Vec<f64>>) {
    let mesh = build_uniform_mesh(0.0, length, cells).unwrap();
    let m = Material::benchmark();
    let order = 16;
    let psi0: Vec<f64> = mesh
        .centers()
        .iter()
        .map(|&x| 0.5 * (std::f64::consts::PI * x / length).sin().powi(2))
        .collect();
    (mesh, m, vec![psi0; order])
}

// ---------------------------------------------------------------- criterion 3

fn temporal_order() -> Outcome {
    let (mesh, material, psi0) = smooth_problem(80, 8.0);
    let t_end = 1.0;
    let fine_steps = 1280;
    let mut problem = SnProblem::new(&mesh, material);
    problem.initial = Some(psi0);
    let tr = sn_solve(
        &problem,
        &SnConfig {
            order: 16,
            dt: t_end / fine_steps as f64,
            steps: fine_steps,
            tol: 1e-13,
            max_iterations: 500,
            record_every: 1,
        },
    )
    .expect("fine S_N trajectory");
    let mats = vec![material; mesh.cells()];
    let initial = state_from_sn(&tr.layers[0]);
    let solve = |theta: f64, stride: usize| -> Vec<f64> {
        let steps = fine_steps / stride;
        let grid = TimeGrid::uniform(0.0, t_end / steps as f64, steps).unwrap();
        let closures: Vec<_> = (1..=steps).map(|n| implicit_from_sn(&tr.layers[n * stride])).collect();
        let problem = LosmProblem::new(&mesh, &mats, theta);
        let out = march(&problem, &initial, &closures, &grid, &[]).expect("march");
        out.last().unwrap().phi_cells().to_vec()
    };
    // coarse steps dt = 0.2, 0.1, 0.05 against a dt = 1/1280 run of the same scheme
    let strides = [256usize, 128, 64];
    let mut parts = Vec::new();
    let mut pass = true;
    for (theta, lo, hi, name) in [(0.5, 3.5, 4.5, "CN"), (1.0, 1.8, 2.2, "BE")] {
        let fine = solve(theta, 1);
        let errs: Vec<f64> = strides
            .iter()
            .map(|&s| {
                let d: Vec<f64> = solve(theta, s).iter().zip(&fine).map(|(a, b)| a - b).collect();
                l2_norm(&d, &mesh)
            })
            .collect();
        let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
        pass &= ratios.iter().all(|r| (lo..=hi).contains(r));
        parts.push(format!(
            "{name} errors {:.3e} {:.3e} {:.3e}, ratios {:.3} {:.3} (band {lo}-{hi})",
            errs[0], errs[1], errs[2], ratios[0], ratios[1]
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

// ---------------------------------------------------------------- criterion 4

fn losm_sn_consistency() -> Outcome {
    let length = 10.0;
    let (mesh, material, psi0) = smooth_problem(200, length);
    let dt = 0.1;
    let steps = 5;
    let mut problem = SnProblem::new(&mesh, material);
    problem.initial = Some(psi0);
    let tr = sn_solve(
        &problem,
        &SnConfig {
            order: 16,
            dt,
            steps,
            tol: 1e-13,
            max_iterations: 500,
            record_every: 1,
        },
    )
    .expect("S_N run");
    let mats = vec![material; mesh.cells()];
    let lp = LosmProblem::new(&mesh, &mats, 1.0);
    let grid = TimeGrid::uniform(0.0, dt, steps).unwrap();
    let closures: Vec<_> = (1..=steps).map(|n| implicit_from_sn(&tr.layers[n])).collect();
    let marched = march(&lp, &state_from_sn(&tr.layers[0]), &closures, &grid, &[]).expect("march");
    let mut diffs = Vec::new();
    let mut restarted = Vec::new();
    for n in 1..=steps {
        diffs.push(relative_l2_error(marched[n - 1].phi_cells(), &tr.layers[n].phi, &mesh).unwrap());
        let one = assemble_solve(&lp, &state_from_sn(&tr.layers[n - 1]), &closures[n - 1], dt, &vec![0.0; 200], &vec![0.0; 200])
            .expect("single step");
        restarted.push(relative_l2_error(one.phi_cells(), &tr.layers[n].phi, &mesh).unwrap());
    }
    let worst = diffs.iter().chain(&restarted).fold(0.0f64, |m, &v| m.max(v));
    Outcome::new(
        worst < 0.01,
        format!(
            "S16 closures on 200 cells, BE, dt = {dt}: marched differences {}, restarted {} (limit 1%)",
            diffs.iter().map(|d| format!("{:.2e}", d)).collect::<Vec<_>>().join(" "),
            restarted.iter().map(|d| format!("{:.2e}", d)).collect::<Vec<_>>().join(" ")
        ),
    )
}

// ------------------------------------------------------------- criteria 5 and 6

struct SeedRuns {
    analog: RunRecord,
    hybrid: Vec<(Mode, RunRecord)>,
}

fn seed_runs(reference: &ReferenceSolution, seeds: &[u64], comb: CombKind) -> Vec<SeedRuns> {
    let cfg = |m, s| RunConfig {
        comb,
        ..benchmark_run(m, s)
    };
    seeds
        .iter()
        .map(|&s| SeedRuns {
            analog: run(&cfg(Mode::Analog, s), Some(reference)).expect("analog"),
            hybrid: [Mode::Hww, Mode::HwwMa, Mode::HwwFourier]
                .into_iter()
                .map(|m| (m, run(&cfg(m, s), Some(reference)).expect("hybrid")))
                .collect(),
        })
        .collect()
}

fn error_band(runs: &[SeedRuns], seeds: &[u64]) -> Outcome {
    let mut good = 0;
    let mut parts = Vec::new();
    for (r, s) in runs.iter().zip(seeds) {
        let hww = &r.hybrid[0].1;
        let errs: Vec<f64> = hww.steps.iter().map(|k| k.metrics.rel_l2_error.unwrap()).collect();
        let max = errs.iter().fold(0.0f64, |m, &v| m.max(v));
        if max < 0.13 {
            good += 1;
        }
        parts.push(format!("seed {s}: max {max:.4}"));
    }
    Outcome::new(
        good == runs.len() && runs.len() >= 3,
        format!("hww relative L2 error of <phi> over 20 steps below 13% on {good}/{} seeds ({})", runs.len(), parts.join(", ")),
    )
}

fn low_flux(runs: &[SeedRuns], seeds: &[u64]) -> Outcome {
    let mut lines = Vec::new();
    let mut all_modes = true;
    for mi in 0..3 {
        let mode = runs[0].hybrid[mi].0;
        let mut winning_seeds = 0;
        let mut per_seed = Vec::new();
        for (r, s) in runs.iter().zip(seeds) {
            let a = &r.analog.steps;
            let h = &r.hybrid[mi].1.steps;
            let mut better = 0;
            let mut total = 0;
            let (mut sa, mut sh) = (0.0, 0.0);
            for n in 10..=20 {
                let ea = a[n - 1].metrics.rel_modified_l2_error.unwrap();
                let eh = h[n - 1].metrics.rel_modified_l2_error.unwrap();
                total += 1;
                sa += ea;
                sh += eh;
                if eh < ea {
                    better += 1;
                }
            }
            if better == total {
                winning_seeds += 1;
            }
            per_seed.push(format!("seed {s} {better}/{total} steps, mean {sh:.2}/{sa:.2}", sh = sh / total as f64, sa = sa / total as f64));
        }
        all_modes &= winning_seeds >= 2;
        lines.push(format!("{mode}: {winning_seeds}/3 seeds lower at every n >= 10 [{}]", per_seed.join("; ")));
    }
    Outcome::new(all_modes, format!("modified L2 (phi* = 1e-3) hww vs analog: {}", lines.join(" | ")))
}

// ---------------------------------------------------------------- criterion 7

fn front_reach() -> Outcome {
    let in_band = |c: &RunConfig, tracks: &[u64]| -> (usize, usize) {
        let mesh = c.mesh::<f64>().unwrap();
        let centers = mesh.centers();
        let mut total = 0;
        let mut empty = 0;
        for (x, &k) in centers.iter().zip(tracks) {
            if x.abs() <= 18.0 {
                total += 1;
                if k == 0 {
                    empty += 1;
                }
            }
        }
        (empty, total)
    };
    let analog = benchmark_run(Mode::Analog, 31);
    let ra = run(&analog, None).expect("analog");
    let (ea, total) = in_band(&analog, &ra.steps[19].counters.tracks);

    // The windowed run at the benchmark's 1e4 histories needs a census bank of
    // hundreds of millions of particles at eps_min = 1e-6; measure it at H = 100
    // and extrapolate the memory before deciding whether the full run is possible.
    let mut probe = benchmark_run(Mode::Hww, 31);
    probe.eps_min = 1e-6;
    probe.histories_per_step = 100;
    probe.target_population = 100;
    let t = Instant::now();
    let rp = run(&probe, None).expect("probe");
    let probe_time = t.elapsed().as_secs_f64();
    let peak_census = rp.steps.iter().map(|s| s.counters.census_particles).max().unwrap_or(0);
    let aborted: u64 = rp.steps.iter().map(|s| s.counters.aborted_histories).sum();
    let (ep, _) = in_band(&probe, &rp.steps[19].counters.tracks);
    let scale = 10_000.0 / 100.0;
    let bytes = peak_census as f64 * scale * std::mem::size_of::<Particle>() as f64;
    let available = available_memory_bytes();
    let feasible = available.is_some_and(|a| bytes < 0.5 * a);
    let mut detail = format!(
        "analog H = 1e4 leaves {ea}/{total} cells with |x| <= 18 empty at n = 20; eps_min = 1e-6 probe at H = 100: {ep} empty, peak census {peak_census} particles, {aborted} histories hit the event cap, {probe_time:.0} s; H = 1e4 projects to {:.1} GB of census bank",
        bytes / 1e9
    );
    if !feasible {
        detail += &format!(
            " (available {:.1} GB): full run not attempted",
            available.unwrap_or(0.0) / 1e9
        );
        return Outcome::new(false, detail);
    }
    let mut full = benchmark_run(Mode::Hww, 31);
    full.eps_min = 1e-6;
    let rf = run(&full, None).expect("eps_min = 1e-6 run");
    let (ef, _) = in_band(&full, &rf.steps[19].counters.tracks);
    detail += &format!("; full run leaves {ef} empty");
    Outcome::new(ef == 0 && ea >= 10, detail)
}

fn available_memory_bytes() -> Option<f64> {
    let text = std::fs::read_to_string("/proc/meminfo").ok()?;
    let line = text.lines().find(|l| l.starts_with("MemAvailable:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024.0)
}

// ---------------------------------------------------------------- criterion 8

fn exactness() -> Outcome {
    let mut rng = spawn_stream(5, 77);
    let mut fails = Vec::new();

    // split conservation
    let grid = WeightWindowGrid::from_centers(vec![0.3, 1e-6, 0.9], 1.25, 1e-6).unwrap();
    let mut worst_split = 0.0f64;
    for k in 0..10_000 {
        let w = 10f64.powf(-3.0 + 6.0 * (k as f64 / 10_000.0));
        for cell in 0..3 {
            if let WindowOutcome::Split { count, weight } = grid.apply(w, cell, &mut rng) {
                worst_split = worst_split.max((count as f64 * weight - w).abs() / w);
            }
        }
    }
    if worst_split > 4.0 * f64::EPSILON {
        fails.push(format!("split {worst_split:e}"));
    }

    // comb exactness on weights spanning six decades
    let bank = ParticleBank::new(
        (0..10_000)
            .map(|k| Particle {
                x: 0.0,
                mu: 0.5,
                w: 10f64.powf(-6.0 * ((k * 7919 % 10_000) as f64 / 10_000.0)),
                t: 0.0,
            })
            .collect(),
    );
    let comb = uniform_comb(&bank, 10_000, &mut rng).unwrap();
    let comb_err = (comb.bank.total_weight() - bank.total_weight()).abs() / bank.total_weight();
    if comb_err > 1e-12 || comb.output_count != 10_000 {
        fails.push(format!("comb {comb_err:e}"));
    }

    // low-order residuals on the benchmark mesh with rough data
    let mesh = build_uniform_mesh(-20.5, 20.5, 201).unwrap();
    let mats = vec![Material::benchmark(); 201];
    let rough: Vec<f64> = (0..201).map(|i| 1.0 + 0.5 * ((i * 37 % 11) as f64 / 11.0)).collect();
    let f: Vec<f64> = (0..201).map(|i| 0.02 * (((i * 13) % 7) as f64 - 3.0)).collect();
    let jl: Vec<f64> = (0..202).map(|i| 0.1 * (((i * 5) % 9) as f64 - 4.0)).collect();
    let prev = LosmState::from_cells(&rough, jl, &f, 0.05, -0.02);
    let mut worst_res = 0.0f64;
    for theta in [0.5, 0.75, 1.0] {
        let lp = LosmProblem::new(&mesh, &mats, theta);
        let cl = ClosureInput::Implicit {
            closure: hybrid_ww::losm::with_boundary(&f),
            p_left: 0.04,
            p_right: 0.03,
        };
        let sys = assemble(&lp, &prev, &cl, 1.0, &vec![0.0; 201], &vec![0.0; 201]).unwrap();
        let sol = assemble_solve(&lp, &prev, &cl, 1.0, &vec![0.0; 201], &vec![0.0; 201]).unwrap();
        let r = sys.relative_residuals(&sys.pack(&sol));
        worst_res = r.iter().fold(worst_res, |m, &v| m.max(v));
    }
    if worst_res > 1e-12 {
        fails.push(format!("residual {worst_res:e}"));
    }

    // filters
    let g: Vec<f64> = (0..201).map(|i| ((i * 31 % 17) as f64).sin()).collect();
    let ma_id = filters::moving_average(&g, 0) == g;
    // cutoff 100 keeps every mode of 201 samples, so only round-off remains
    let fl_id = filters::fourier_lowpass(&g, 100).iter().zip(&g).all(|(a, b)| (a - b).abs() < 1e-12);
    let once = filters::fourier_lowpass(&g, 30);
    let twice = filters::fourier_lowpass(&once, 30);
    let idem = once.iter().zip(&twice).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if !(ma_id && fl_id && idem < 1e-12) {
        fails.push(format!("filters identity {ma_id}/{fl_id}, idempotency {idem:e}"));
    }

    // center normalization invariance
    let phi: Vec<f64> = (0..201).map(|i| (-((i as f64 - 100.0) / 20.0).powi(2)).exp()).collect();
    let base = build_centers(&phi, 1.25, 1e-3).unwrap();
    let mut worst_c = 0.0f64;
    for lambda in [1e-8, 0.37, 1.0, 42.0, 1e9] {
        let scaled: Vec<f64> = phi.iter().map(|v| v * lambda).collect();
        let c = build_centers(&scaled, 1.25, 1e-3).unwrap();
        worst_c = c.centers().iter().zip(base.centers()).fold(worst_c, |m, (a, b)| m.max((a - b).abs() / b));
    }
    if worst_c > 1e-14 {
        fails.push(format!("centers {worst_c:e}"));
    }

    Outcome::new(
        fails.is_empty(),
        format!(
            "split {worst_split:.1e}, comb {comb_err:.1e}, residual {worst_res:.1e}, Fourier idempotency {idem:.1e}, center invariance {worst_c:.1e}{}",
            if fails.is_empty() { String::new() } else { format!("; failing: {}", fails.join(", ")) }
        ),
    )
}

// ---------------------------------------------------------------- criterion 9

fn filter_efficacy(reference: &ReferenceSolution, seeds: &[u64], runs: &[SeedRuns]) -> Outcome {
    let mut wins = [0usize; 2];
    let mut parts = Vec::new();
    for (r, s) in runs.iter().zip(seeds) {
        let plain = &r.hybrid[0].1;
        let ma = &r.hybrid[1].1;
        let mut row = Vec::new();
        for (k, n) in [4usize, 8].into_iter().enumerate() {
            let ep = plain.steps[n - 1].metrics.rel_l2_error_hybrid.unwrap();
            let em = ma.steps[n - 1].metrics.rel_l2_error_hybrid.unwrap();
            if em <= ep {
                wins[k] += 1;
            }
            row.push(format!("n={n} {em:.4}/{ep:.4}"));
        }
        parts.push(format!("seed {s}: {}", row.join(" ")));
    }
    let _ = reference;
    Outcome::new(
        wins.iter().all(|&w| w >= 2),
        format!("MA(3) vs unfiltered hybrid error: wins n=4 {}/3, n=8 {}/3 [{}]", wins[0], wins[1], parts.join("; ")),
    )
}

// ---------------------------------------------------------------- criterion 10

fn relative_change_trajectory(reference: &ReferenceSolution) -> Outcome {
    let mesh = RunConfig::benchmark().mesh::<f64>().unwrap();
    let mut prev = vec![0.0; mesh.cells()];
    let mut alpha = Vec::new();
    for layer in &reference.phi_layer {
        alpha.push(relative_change(layer, &prev, &mesh).unwrap());
        prev = layer.clone();
    }
    let late = &alpha[9..];
    let pass = alpha[0] > 0.5 && late.iter().all(|a| (0.06..=0.10).contains(a));
    Outcome::new(pass, format!("alpha^n of the reference layers: {}", fmt_list(&alpha)))
}

fn main() {
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let want = |k: usize| only.as_ref().is_none_or(|o| o.contains(&k));

    let needs_reference = [2, 5, 6, 9, 10].iter().any(|&k| want(k));
    let reference = needs_reference.then(|| benchmark_reference(&RunConfig::benchmark(), &ReferenceSettings::default()).expect("reference"));
    let seeds = [101u64, 202, 303];
    let needs_runs = [5, 6, 9].iter().any(|&k| want(k));
    let runs = needs_runs.then(|| seed_runs(reference.as_ref().unwrap(), &seeds, CombKind::Weight));

    let mut results = Vec::new();
    for k in 1..=10 {
        if !want(k) {
            continue;
        }
        let t = Instant::now();
        let o = match k {
            1 => growth_law(),
            2 => unbiased_modes(reference.as_ref().unwrap()),
            3 => temporal_order(),
            4 => losm_sn_consistency(),
            5 => error_band(runs.as_ref().unwrap(), &seeds),
            6 => low_flux(runs.as_ref().unwrap(), &seeds),
            7 => front_reach(),
            8 => exactness(),
            9 => filter_efficacy(reference.as_ref().unwrap(), &seeds, runs.as_ref().unwrap()),
            _ => relative_change_trajectory(reference.as_ref().unwrap()),
        };
        println!(
            "{} criterion {k}: {} [{:.1} s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
        results.push(o.pass);
    }
    // Not a criterion: the same statistics with the particle-index comb variant.
    if want(6) && std::env::var("ACCEPTANCE_SKIP_INFO").is_err() {
        let alt = seed_runs(reference.as_ref().unwrap(), &seeds, CombKind::Particle);
        println!("INFO particle comb, criterion 5 statistic: {}", error_band(&alt, &seeds).detail);
        println!("INFO particle comb, criterion 6 statistic: {}", low_flux(&alt, &seeds).detail);
    }
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if strict && passed < results.len() {
        std::process::exit(1);
    }
}
