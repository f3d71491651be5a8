use hybrid_ww::output::{OutputWriter, STEP_COLUMNS, SUMMARY_COLUMNS};
use hybrid_ww::{run, CombKind, Mode, RunConfig, Simulation};

fn small(mode: Mode) -> RunConfig {
    let mut c = RunConfig::benchmark();
    c.mode = mode;
    c.histories_per_step = 800;
    c.target_population = 800;
    c.batches = 8;
    c.time.steps = 4;
    c.seed = 17;
    c
}

#[test]
fn runs_are_reproducible() {
    let a = run(&small(Mode::Hww), None).unwrap();
    let b = run(&small(Mode::Hww), None).unwrap();
    for (x, y) in a.steps.iter().zip(&b.steps) {
        assert_eq!(x.report.phi_track, y.report.phi_track);
        assert_eq!(x.centers, y.centers);
        assert_eq!(x.counters.collisions, y.counters.collisions);
    }
}

#[test]
fn modes_share_the_source_bank() {
    let sa = Simulation::new(small(Mode::Analog)).unwrap();
    let sh = Simulation::new(small(Mode::HwwFourier)).unwrap();
    let a = sa.initial_state().unwrap();
    let h = sh.initial_state().unwrap();
    assert_eq!(a.bank.particles, h.bank.particles);
}

#[test]
fn comb_restores_the_target_population() {
    for kind in [CombKind::Weight, CombKind::Particle] {
        let mut c = small(Mode::Hww);
        c.comb = kind;
        let rec = run(&c, None).unwrap();
        for s in rec.steps.iter().skip(1) {
            let comb = s.comb.as_ref().expect("comb runs from step 2");
            assert!(comb.output_count <= c.target_population, "{kind:?}");
            if kind == CombKind::Weight {
                assert!((comb.output_weight - comb.input_weight).abs() <= 1e-9 * comb.input_weight);
            }
        }
    }
}

#[test]
fn analog_growth_is_close_to_the_fundamental_rate() {
    let mut c = small(Mode::Analog);
    c.histories_per_step = 20_000;
    c.target_population = 20_000;
    let rec = run(&c, None).unwrap();
    let last = rec.steps.last().unwrap();
    let expected = (0.1 * last.t).exp();
    let w = last.report.census_weight;
    assert!((w - expected).abs() < 0.05 * expected, "census weight {w} vs {expected}");
}

#[test]
fn hybrid_modes_produce_windows() {
    for mode in [Mode::Hww, Mode::HwwMa, Mode::HwwFourier] {
        let rec = run(&small(mode), None).unwrap();
        for s in &rec.steps {
            assert!(s.last_hybrid().is_some(), "{mode} step {} has no hybrid solve", s.n);
            if let Some(c) = &s.centers {
                assert!(c.iter().all(|&v| (1e-3..=1.0).contains(&v)));
            }
        }
    }
}

#[test]
fn writer_emits_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let sim = Simulation::new(small(Mode::HwwMa)).unwrap();
    let mut out = OutputWriter::create(dir.path(), true).unwrap();
    let rec = sim.run_with(None, |s| out.write_step(s, &sim.mesh)).unwrap();
    out.finish(&rec).unwrap();

    let step = std::fs::read_to_string(dir.path().join("step_3.csv")).unwrap();
    assert_eq!(step.lines().next().unwrap(), STEP_COLUMNS.join(","));
    assert_eq!(step.lines().count(), 1 + 201);
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().next().unwrap(), SUMMARY_COLUMNS.join(","));
    assert_eq!(summary.lines().count(), 1 + 4);
    assert!(dir.path().join("closures_2.csv").exists());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 17);
}
