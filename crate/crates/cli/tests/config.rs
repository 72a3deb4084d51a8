use std::path::Path;

use abcpt_cli::config::{Algorithm, Export, ModelSpec, Overrides, Preset, RunSpec, TraceFormat};
use abcpt_cli::CliError;
use proptest::prelude::*;

fn parse(text: &str) -> Result<RunSpec, CliError> {
    RunSpec::from_toml_str(text, "test.toml", Path::new("."))
}

fn position(e: CliError) -> (usize, usize, String) {
    match e {
        CliError::Config { line, column, message, .. } => (line, column, message),
        other => panic!("expected a located error, got {other}"),
    }
}

#[test]
fn presets_are_valid() {
    for p in [Preset::Toy, Preset::ToyPaper, Preset::Tb] {
        let spec = RunSpec::preset(p);
        spec.pt.to_config(spec.seed).unwrap();
        let mut s = spec.clone();
        s.apply(&Overrides::default()).unwrap();
    }
    assert_eq!(RunSpec::preset(Preset::ToyPaper).pt.iterations, 600_000);
    assert_eq!(RunSpec::preset(Preset::Tb).pt.tolerances.len(), 7);
}

#[test]
fn empty_file_is_the_toy_preset() {
    let spec = parse("").unwrap();
    assert_eq!(spec, RunSpec::preset(Preset::Toy));
}

#[test]
fn generator_and_array_schedules_agree() {
    let a = parse("[pt]\ntolerances = { lo = 0.025, hi = 2.0, n = 15, spacing = \"log\" }\n").unwrap();
    let b = parse("").unwrap();
    assert_eq!(a.pt.tolerances, b.pt.tolerances);
    let c = parse("[pt]\ntolerances = [0.1, 0.2, 0.4]\ntemperatures = [1.0, 1.5, 2.0]\n").unwrap();
    assert_eq!(c.pt.tolerances, vec![0.1, 0.2, 0.4]);
}

#[test]
fn syntax_errors_carry_line_and_column() {
    let (line, col, _) = position(parse("seed = 3\n[pt]\niterations = = 4\n").unwrap_err());
    assert_eq!(line, 3);
    assert!(col > 1);
}

#[test]
fn semantic_errors_point_at_the_key() {
    let text = "algorithm = \"pt\"\n\n[pt]\niterations = 100\nthin = 1\nburn_in = 200\n";
    let (line, col, msg) = position(parse(text).unwrap_err());
    assert_eq!((line, col), (6, 1));
    assert!(msg.contains("pt.burn_in"), "{msg}");

    let (line, _, msg) = position(parse("[pt]\n  rings = 16\n").unwrap_err());
    assert_eq!(line, 2);
    assert!(msg.contains("rings"), "{msg}");

    let (line, _, _) = position(parse("pt.tolerances = [0.3, 0.2]\n").unwrap_err());
    assert_eq!(line, 1);

    // sections are checked only for the selected algorithm
    parse("[mcmc]\nepsilon = -1\n").unwrap();
    let (line, _, msg) = position(parse("algorithm = \"mcmc\"\n[mcmc]\nepsilon = -1\n").unwrap_err());
    assert_eq!(line, 3);
    assert!(msg.contains("mcmc.epsilon"), "{msg}");
}

#[test]
fn missing_key_falls_back_to_its_section() {
    let text = "seed = 1\n[pt]\ntolerances = [0.1, 0.2]\n";
    let (line, _, msg) = position(parse(text).unwrap_err());
    assert_eq!(line, 2);
    assert!(msg.contains("temperatures"), "{msg}");
}

#[test]
fn unknown_keys_and_values_are_rejected() {
    assert_eq!(position(parse("[pt]\nringz = 3\n").unwrap_err()).0, 2);
    assert_eq!(position(parse("algorithm = \"smc\"\n").unwrap_err()).0, 1);
    assert_eq!(position(parse("preset = \"huge\"\n").unwrap_err()).0, 1);
    assert_eq!(position(parse("[pt]\ntolerances = { lo = 0.1, hi = 1, n = 3, spacing = \"lin\" }\n").unwrap_err()).0, 2);
    assert_eq!(position(parse("[tb]\nstop_size = 5\n").unwrap_err()).0, 1);
}

#[test]
fn tb_observed_data_from_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("clusters.txt"), "# size count\n3 1\n2 2\n1 5\n").unwrap();
    std::fs::write(
        dir.path().join("run.toml"),
        "model = \"tb\"\n[tb]\nobserved = \"clusters.txt\"\nstop_size = 50\nkernel_power = \"entrywise\"\n",
    )
    .unwrap();
    let spec = RunSpec::from_file(&dir.path().join("run.toml")).unwrap();
    match &spec.model {
        ModelSpec::Tb(t) => {
            assert_eq!(t.clusters, vec![(3, 1), (2, 2), (1, 5)]);
            assert_eq!(t.observed().unwrap().sample_size(), 12);
            assert_eq!(t.stop_size, 50);
        }
        other => panic!("{other:?}"),
    }
    let inline = parse("model = \"tb\"\n[tb]\nclusters = [[3, 1], [2, 2], [1, 5]]\nstop_size = 50\nkernel_power = \"entrywise\"\n").unwrap();
    assert_eq!(inline.config_hash(), spec.config_hash());
}

#[test]
fn flags_override_the_file() {
    let mut spec = parse("seed = 5\n[pt]\niterations = 1000\nburn_in = 100\n").unwrap();
    spec.apply(&Overrides {
        seed: Some(9),
        rings: Some(3),
        iterations: Some(500),
        trace_format: Some(TraceFormat::Both),
        ..Overrides::default()
    })
    .unwrap();
    assert_eq!((spec.seed, spec.pt.rings, spec.pt.iterations, spec.pt.burn_in), (9, Some(3), 500, 100));
    assert_eq!(spec.output().trace, TraceFormat::Both);
    spec.apply(&Overrides { rings: Some(0), ..Overrides::default() }).unwrap();
    assert_eq!(spec.pt.rings, None);

    let err = spec.apply(&Overrides { burn_in: Some(500), ..Overrides::default() }).unwrap_err();
    assert!(matches!(err, CliError::Invalid(_)), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn pt_flags_need_the_pt_algorithm() {
    let mut spec = RunSpec::preset(Preset::Toy);
    let err = spec
        .apply(&Overrides {
            algorithm: Some(Algorithm::Mcmc),
            rings: Some(3),
            ..Overrides::default()
        })
        .unwrap_err();
    assert!(err.to_string().contains("--rings"));
}

#[test]
fn output_section_defaults() {
    let spec = parse("[output]\ndir = \"out\"\nexports = [\"summary\", \"acf\", \"summary\"]\n").unwrap();
    let out = spec.output();
    assert_eq!(out.dir, Path::new(".").join("out"));
    assert_eq!(out.exports, vec![Export::Summary, Export::Acf]);
    assert_eq!(out.trace, TraceFormat::Binary);
}

#[test]
fn hash_ignores_execution_settings() {
    let a = RunSpec::preset(Preset::Toy);
    let mut b = a.clone();
    b.apply(&Overrides {
        workers: Some(8),
        out: Some("elsewhere".into()),
        trace_format: Some(TraceFormat::Csv),
        ..Overrides::default()
    })
    .unwrap();
    assert_eq!(a.config_hash(), b.config_hash());

    // an explicit exchange count equal to the default changes nothing
    let mut c = a.clone();
    c.pt.exchanges = Some(15);
    assert_eq!(a.config_hash(), c.config_hash());

    // inactive sections are not part of the run
    let mut d = a.clone();
    d.mcmc.epsilon = 0.5;
    assert_eq!(a.config_hash(), d.config_hash());
    d.algorithm = Algorithm::Mcmc;
    assert_ne!(a.config_hash(), d.config_hash());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hash_changes_iff_a_semantic_field_changes(
        field in 0usize..9,
        seed in 0u64..1000,
        bump in 1usize..50,
    ) {
        let mut a = RunSpec::preset(Preset::Toy);
        a.seed = seed;
        let mut b = a.clone();
        match field {
            0 => b.seed += 1,
            1 => b.pt.iterations += bump,
            2 => b.pt.burn_in += bump,
            3 => b.pt.thin += bump,
            4 => b.pt.exchanges = Some(15 + bump),
            5 => b.pt.rings = Some(1 + bump % 15),
            6 => b.pt.tolerances[0] *= 0.5,
            7 => if let ModelSpec::Toy(t) = &mut b.model { t.kernel_sd += 0.01 * bump as f64 },
            _ => b.pt.init_max_attempts += bump as u64,
        }
        prop_assert_ne!(a.config_hash(), b.config_hash());
        let mut c = a.clone();
        c.workers = Some(bump);
        c.mcmc.iterations += bump;
        c.rejection.proposals += bump as u64;
        prop_assert_eq!(a.config_hash(), c.config_hash());
    }
}
