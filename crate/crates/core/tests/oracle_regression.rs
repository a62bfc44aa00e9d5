//! Frozen counts from the exhaustive oracle. The carrier <= 2 counts and the
//! valid-table counts were reproduced by a separate brute-force script.

use gfix_core::contractions::{MappingFamily, SelfMap};
use gfix_core::oracle::{
    enumerate_instances, enumerate_tables, theorem_sweep, EnumerationConfig, InstanceRecord, RedFlagKind, SweepOptions,
    ENUMERATION_CAP,
};
use gfix_core::{Error, GSpace, Mode};

fn sweep(mode: Mode, carrier_size: usize) -> gfix_core::oracle::SweepReport {
    theorem_sweep(&SweepOptions {
        config: EnumerationConfig {
            carrier_size,
            mode,
            ..EnumerationConfig::default()
        },
        ..SweepOptions::default()
    })
    .unwrap()
}

#[test]
fn valid_table_counts() {
    let grid = [0.0, 0.5, 1.0, 2.0];
    let counts: Vec<usize> = (1..=3)
        .map(|n| enumerate_tables(n, &grid, ENUMERATION_CAP).unwrap().len())
        .collect();
    assert_eq!(counts, vec![1, 7, 153]);
    assert_eq!(
        enumerate_tables(3, &[0.0, 1.0, 2.0], ENUMERATION_CAP).unwrap().len(),
        65
    );
    assert!(enumerate_tables(2, &[0.0], ENUMERATION_CAP).unwrap().is_empty());
}

#[test]
fn discrete_metric_survives_on_two_points() {
    let tables = enumerate_tables(2, &[0.0, 1.0], ENUMERATION_CAP).unwrap();
    let discrete = GSpace::discrete_g(vec!["0".into(), "1".into()]).unwrap();
    assert!(tables.iter().any(|t| Some(t) == discrete.table()));
}

#[test]
fn three_term_sweep_counts() {
    let small = sweep(Mode::Abbas, 2);
    assert_eq!(small.hypotheses_met, 570);
    let r = sweep(Mode::Abbas, 3);
    assert!(r.clean(), "{:?}", r.red_flags);
    assert_eq!(r.instances, 7_411_840);
    assert_eq!(r.hypotheses_met, 18_096);
    let met: Vec<usize> = r.by_carrier.iter().map(|c| c.hypotheses_met).collect();
    assert_eq!(met, vec![38, 532, 17_526]);
}

#[test]
fn two_term_sweep_counts() {
    let small = sweep(Mode::Vetro, 2);
    assert_eq!(small.hypotheses_met, 480);
    let r = sweep(Mode::Vetro, 3);
    assert!(r.clean(), "{:?}", r.red_flags);
    assert_eq!(r.instances, 1_852_960);
    assert_eq!(r.hypotheses_met, 15_408);
}

#[test]
fn injected_rate_bug_raises_flags_that_replay() {
    let r = theorem_sweep(&SweepOptions {
        config: EnumerationConfig {
            carrier_size: 2,
            coeff_grid: vec![0.9],
            mode: Mode::Vetro,
            ..EnumerationConfig::default()
        },
        inject_rate_bug: true,
        ..SweepOptions::default()
    })
    .unwrap();
    assert!(!r.clean());
    let flag = r
        .red_flags
        .iter()
        .find(|f| f.kind == RedFlagKind::NotSingleton)
        .expect("a family without a unique common fixed point slips through");
    let json = serde_json::to_string(flag.instance.as_ref().unwrap()).unwrap();
    let replay: InstanceRecord = serde_json::from_str(&json).unwrap();
    let inst = replay.into_instance().unwrap();
    assert_ne!(gfix_core::oracle::brute_force_common_fixed_points(&inst).len(), 1);
}

#[test]
fn oversize_enumeration_is_a_budget_error() {
    let cfg = EnumerationConfig {
        carrier_size: 4,
        ..EnumerationConfig::default()
    };
    assert!(matches!(
        enumerate_instances(&cfg).map(|_| ()),
        Err(Error::Budget { .. })
    ));
    // a coarse enough grid on four points fits
    let cfg = EnumerationConfig {
        carrier_size: 4,
        family_size: 1,
        g_value_grid: vec![0.0, 1.0],
        coeff_grid: vec![0.3],
        mode: Mode::Vetro,
        cap: ENUMERATION_CAP,
    };
    assert!(enumerate_instances(&cfg).unwrap().next().is_some());
}

#[test]
fn instance_family_cycles_with_its_length() {
    let inst = enumerate_instances(&EnumerationConfig {
        carrier_size: 2,
        ..EnumerationConfig::default()
    })
    .unwrap()
    .find(|i| i.maps.len() == 2 && i.maps[0] != i.maps[1])
    .unwrap();
    let fam: MappingFamily = inst.family();
    assert_eq!(fam.index_cap(), 2);
    assert!(matches!(fam.map(3), SelfMap::Table(t) if t == &inst.maps[0]));
}
