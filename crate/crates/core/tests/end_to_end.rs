mod common;

use vcsynth::config::LocalConfiguration;
use vcsynth::measure::Measure;
use vcsynth::rulegen::{gensa, GenConfig, RuleMode, RuleTable};
use vcsynth::runtime::{solve_deterministic, solve_randomized, TableSet, TrialPlan};
use vcsynth::subspace::{root_config, SUBSPACE_COUNT};

fn subspace_tables(m: Measure, mode: RuleMode) -> Vec<RuleTable> {
    (1..=SUBSPACE_COUNT)
        .map(|id| {
            gensa(
                &root_config(id).unwrap(),
                &GenConfig::for_subspace(m, mode, id),
            )
            .unwrap()
            .table
        })
        .collect()
}

#[test]
fn deterministic_tables_agree_with_the_oracle() {
    let generic = gensa(
        &LocalConfiguration::lone(3, 3),
        &GenConfig::generic(Measure::pure_k(), RuleMode::Deterministic),
    )
    .unwrap()
    .table;
    let sets = [
        TableSet::new(vec![generic]).unwrap(),
        TableSet::new(subspace_tables(Measure::pure_k(), RuleMode::Deterministic)).unwrap(),
    ];
    for inst in common::random_instances(150, 18, 11) {
        let want = inst.is_yes().unwrap();
        for set in &sets {
            let out = solve_deterministic(&inst, set).unwrap();
            assert_eq!(out.is_yes(), want, "{}", inst.to_text());
        }
    }
}

#[test]
fn randomized_answers_are_one_sided() {
    let m: Measure = "n-mode b3=0.2".parse().unwrap();
    let tables = TableSet::new(subspace_tables(m, RuleMode::Randomized)).unwrap();
    for (i, inst) in common::random_instances(80, 14, 5).into_iter().enumerate() {
        let plan = TrialPlan::for_instance(&inst, &m, 3, i as u64).unwrap();
        let out = solve_randomized(&inst, &tables, &plan).unwrap();
        if let Some(cover) = &out.cover {
            assert!(inst.graph.is_vertex_cover(cover) && cover.len() as i64 <= inst.budget);
        } else {
            assert_eq!(out.trials_run, plan.trials);
        }
        if !inst.is_yes().unwrap() {
            assert!(out.cover.is_none(), "{}", inst.to_text());
        }
    }
}

#[test]
fn tables_survive_a_json_round_trip() {
    for t in subspace_tables("n-mode b3=0.2".parse().unwrap(), RuleMode::Randomized) {
        let back = RuleTable::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
        assert!(vcsynth::rulegen::verify_table(&back).pass);
    }
}
