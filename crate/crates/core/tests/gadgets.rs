use rayon::prelude::*;
use xnlplab_core::gadget::{build_dag, build_tree, run_from_layout, tree_layout_from_run};
use xnlplab_core::graph::{bandwidth_of, exact_bandwidth, width};
use xnlplab_core::nnccm::{accepting_runs, accepts, enumerate_up_to, Check, NnccmInstance};
use xnlplab_core::Budget;

fn machines(k: usize) -> Vec<NnccmInstance> {
    enumerate_up_to(k, 1, 2)
        .filter(|m| m.k() == k && m.n() == 1 && m.r() >= 1)
        .collect()
}

/// Outcome per accepting instance: does some run give a layout within the
/// limit that reads back as that run?
fn laid_out(m: &NnccmInstance) -> bool {
    let g = build_dag(m).unwrap();
    accepting_runs(m).iter().any(|run| {
        g.layout_from_run(run).is_ok_and(|f| {
            bandwidth_of(&g.graph, &f).unwrap() <= g.params.b && run_from_layout(m, &g, &f).as_ref() == Ok(run)
        })
    })
}

#[test]
fn two_counter_dags_lay_out() {
    let stuck: Vec<String> = machines(2)
        .par_iter()
        .filter(|m| accepts(m) && !laid_out(m))
        .map(|m| m.to_string())
        .collect();
    assert!(stuck.is_empty(), "{stuck:?}");
}

#[test]
fn one_counter_dags_match_acceptance() {
    let mismatches: Vec<String> = machines(1)
        .par_iter()
        .filter(|m| {
            let g = build_dag(m).unwrap();
            let d = exact_bandwidth(&g.graph, g.params.b, Budget::default()).unwrap();
            d.answer() != Some(accepts(m))
        })
        .map(|m| m.to_string())
        .collect();
    assert_eq!(mismatches, vec!["k=1 n=1 checks=[(1,1,1,1),(1,0,1,0)]".to_string()]);
}

#[test]
fn gadget_widths() {
    for k in 1..=3 {
        let m = NnccmInstance::new(k, 1, vec![Check::new(1, 0, k, 1)]).unwrap();
        assert_eq!(width(&build_dag(&m).unwrap().graph), Ok(k + 5));
    }
}

#[test]
fn tree_layouts_for_two_counters() {
    for m in machines(2).iter().filter(|m| accepts(m)).take(40) {
        let t = build_tree(m).unwrap();
        assert!(t.is_tree());
        let ok = accepting_runs(m).iter().any(|run| {
            tree_layout_from_run(m, run).is_ok_and(|f| bandwidth_of(&t.graph, &f).unwrap() <= t.params.b)
        });
        assert!(ok, "{m}");
    }
}
