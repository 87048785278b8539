//! Config parsing: defaults, diagnostics and the serialize/parse round trip.

use gammasum::mrc::Modulation;
use gammasum_cli::job::{Branches, HfunSpec, Tolerances};
use gammasum_cli::{parse_config_str, Command, Format, Grid, GridUnit, JobSpec, ParseError};
use proptest::prelude::*;

#[test]
fn minimal_config_gets_defaults() {
    let job = parse_config_str("command = \"pdf\"\ngrid = { start = 0.1, stop = 15, points = 200 }\n[branches]\nm = [0.6, 1.1, 2]\n").unwrap();
    assert_eq!(job.format, Format::Csv);
    assert_eq!(job.grid_unit, Some(GridUnit::LinearY));
    assert_eq!(job.tolerances, Tolerances::default());
    assert_eq!(job.tolerances.rel_tol, 1e-9);
    assert_eq!(job.branches.unwrap().omega_or_ones(), vec![1.0; 3]);
}

#[test]
fn negative_m_names_the_field() {
    let e = parse_config_str("command = \"cdf\"\ngrid = { start = 0, stop = 1, points = 2 }\n[branches]\nm = [1.0, -2.0]\n").unwrap_err();
    match e {
        ParseError::Field { field, .. } => assert_eq!(field, "branches.m[1]"),
        other => panic!("{other}"),
    }
}

#[test]
fn unknown_modulation_lists_names() {
    let e = parse_config_str("command = \"ber\"\nmodulations = [\"cbpsk\", \"qam\"]\ngrid = { start = 0, stop = 1, points = 2 }\n[branches]\nm = [1.0]\n").unwrap_err();
    let msg = e.to_string();
    assert!(matches!(e, ParseError::Syntax { line: 2, .. }), "{msg}");
    for name in ["cbfsk", "cbpsk", "nbfsk", "dbpsk"] {
        assert!(msg.contains(name), "{msg}");
    }
}

#[test]
fn invariants() {
    let base = "[branches]\nm = [1.0]\n";
    let bad = [
        ("command = \"pdf\"\ngrid = { start = 0, stop = 1, points = 1 }\n", "grid.points"),
        ("command = \"pdf\"\ngrid = { start = 2, stop = 1, points = 3 }\n", "grid"),
        ("command = \"ber\"\ngrid = { start = 0, stop = 1, points = 3 }\n", "modulations"),
        ("command = \"validate\"\ngrid = { start = 0, stop = 1, points = 3 }\n", "seed"),
        ("command = \"pdf\"\n", "grid"),
    ];
    for (head, want) in bad {
        match parse_config_str(&format!("{head}{base}")) {
            Err(ParseError::Field { field, .. }) => assert_eq!(field, want),
            other => panic!("{head}: {other:?}"),
        }
    }
    let mut job = JobSpec::new(Command::Validate);
    job.branches = Some(Branches { m: vec![1.0], omega: None });
    job.grid = Some(Grid { start: 0.0, stop: 1.0, points: 2 });
    job.seed = Some(u64::MAX);
    assert!(matches!(job.validate(), Err(ParseError::Field { field, .. }) if field == "seed"));
    assert!(matches!(
        parse_config_str("command = \"pdf\"\ncolour = 3\n"),
        Err(ParseError::Syntax { .. })
    ));
}

fn job_strategy() -> impl Strategy<Value = JobSpec> {
    let branches = prop::collection::vec((0.1f64..10.0, 0.01f64..100.0), 1..6);
    let grid = (0.0f64..10.0, 0.1f64..10.0, 2usize..500).prop_map(|(a, w, n)| Grid {
        start: a,
        stop: a + w,
        points: n,
    });
    let mods = prop::collection::vec(
        prop_oneof![
            Just(Modulation::CBFSK),
            Just(Modulation::CBPSK),
            Just(Modulation::NBFSK),
            Just(Modulation::DBPSK),
            (0.1f64..5.0, 0.1f64..5.0).prop_map(|(p, q)| Modulation::custom(p, q).unwrap()),
        ],
        1..4,
    );
    let cmd = prop_oneof![
        Just(Command::Pdf),
        Just(Command::Cdf),
        Just(Command::Outage),
        Just(Command::Ber),
        Just(Command::Validate),
    ];
    (cmd, branches, any::<bool>(), grid, mods, 0..=i64::MAX as u64, 1e-14f64..1e-3, any::<bool>(), any::<bool>())
        .prop_map(|(command, br, with_omega, grid, mods, seed, rel_tol, json, general)| {
            let mut job = JobSpec::new(command);
            let (m, omega): (Vec<f64>, Vec<f64>) = br.into_iter().unzip();
            job.branches = Some(Branches {
                m,
                omega: with_omega.then_some(omega),
            });
            job.grid = Some(grid);
            if command == Command::Ber {
                job.modulations = mods;
            }
            if command == Command::Validate {
                job.seed = Some(seed);
            }
            job.tolerances.rel_tol = rel_tol;
            job.tolerances.force_general = general;
            if json {
                job.format = Format::Json;
                job.output = Some("curves/out.json".into());
            }
            job.fill_defaults();
            job
        })
}

proptest! {
    #[test]
    fn round_trip(job in job_strategy()) {
        let text = job.to_config_string();
        let back = parse_config_str(&text).unwrap();
        prop_assert_eq!(back, job);
    }
}

#[test]
fn hfun_round_trip() {
    let mut job = JobSpec::new(Command::Hfun);
    job.hfun = Some(HfunSpec {
        kind: "hhat".parse().unwrap(),
        m: 1,
        n: 1,
        upper: vec![[0.2, 1.0, 0.6]],
        lower: vec![[0.1, 2.0, 1.0]],
        z: Some(0.7),
    });
    job.fill_defaults();
    assert_eq!(parse_config_str(&job.to_config_string()).unwrap(), job);
}
