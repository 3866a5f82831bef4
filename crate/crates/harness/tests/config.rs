use translab_harness::calibration::Calibration;
use translab_harness::config::experiments_from_file;
use translab_harness::suite::{default_configs, run_suite, suite_configs, DEFAULT_CONFIG};
use translab_harness::{run_experiment, Check, ConfigFile, ExperimentConfig, HarnessError};

#[test]
fn default_suite_covers_each_experiment_once_in_order() {
    let cfgs = default_configs(Some(1), 0, None).unwrap();
    let names: Vec<&str> = cfgs.iter().map(|c| c.experiment.as_str()).collect();
    assert_eq!(names, translab_harness::config::EXPERIMENTS);
    assert!(cfgs.iter().all(|c| c.seed == 1));
}

#[test]
fn root_keys_are_section_defaults() {
    let f = ConfigFile::parse("theta = 0.3\nseed = 9\n[partition]\n[kfunctional]\ntheta = 0.7\n").unwrap();
    let cfgs = suite_configs(&f).unwrap();
    assert_eq!((cfgs[0].theta, cfgs[0].seed), (0.3, 9));
    assert_eq!((cfgs[1].theta, cfgs[1].seed), (0.7, 9));
    assert!(experiments_from_file(&ConfigFile::parse(DEFAULT_CONFIG).unwrap()).is_ok());
}

#[test]
fn every_row_names_its_experiment_and_reruns_match() {
    let f = ConfigFile::parse("seed = 4\n[fourier-homomorphism]\nprobes = 5\n[sector-pullback]\n").unwrap();
    let cfgs = suite_configs(&f).unwrap();
    let a = run_suite(&cfgs).unwrap();
    let b = run_suite(&cfgs).unwrap();
    assert_eq!(a.rows, b.rows);
    assert!(a.passed());
    for (c, r) in cfgs.iter().zip([5usize, 5]) {
        assert_eq!(a.rows_of(&c.experiment).count(), r);
    }
}

#[test]
fn mikhlin_bound_with_a_dirac_at_zero_stays_below_one() {
    let f = ConfigFile::parse("[mikhlin-bound]\nmeasure = dirac(0)\nprobes = 3\n").unwrap();
    let cfg = ExperimentConfig::from_section(f.section("mikhlin-bound").unwrap()).unwrap();
    let rows = run_experiment(&cfg).unwrap();
    let bounds: Vec<_> = rows.iter().filter(|r| r.check == Check::Bound).collect();
    assert!(!bounds.is_empty());
    for r in bounds {
        assert!(r.ratio <= 1.0, "{} ratio {}", r.case, r.ratio);
    }
}

#[test]
fn corrupted_calibration_files_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for (i, text) in ["[main-theorem]\ntheta = 0.5\nq = 2\np = 2\ngrid = x\n", "c_cal = 1\n", "[sharpness]\nc_cal = abc\n", "[x\n"]
        .iter()
        .enumerate()
    {
        let p = dir.path().join(format!("cal{i}"));
        std::fs::write(&p, text).unwrap();
        assert!(matches!(Calibration::load(&p), Err(HarnessError::Config(_))), "{text:?}");
        let mut cfgs = default_configs(None, 0, Some(&p)).unwrap();
        cfgs.truncate(1);
        assert!(matches!(run_suite(&cfgs), Err(HarnessError::Config(_))));
    }
}

#[test]
fn unknown_experiments_and_bad_values_carry_line_numbers() {
    let f = ConfigFile::parse("[nope]\n").unwrap();
    assert!(suite_configs(&f).is_err());
    let f = ConfigFile::parse("[sharpness]\n\nsamples = 100\nhalf_length = 4\n").unwrap();
    match suite_configs(&f) {
        Err(HarnessError::Config(e)) => assert_eq!(e.line, Some(3)),
        other => panic!("{other:?}"),
    }
}
