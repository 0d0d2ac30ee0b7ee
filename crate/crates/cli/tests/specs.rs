use std::path::Path;

use hgricci_cli::bench::{SweepSpec, TimingSpec};

fn load<T: for<'de> serde::Deserialize<'de>>(name: &str) -> T {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn shipped_sweep_specs_validate() {
    let s: SweepSpec = load("sweep.json");
    s.validate().unwrap();
    assert_eq!(s.size_cells(), vec![(2, 6), (5, 2)]);
    let g: SweepSpec = load("grid.json");
    g.validate().unwrap();
    assert_eq!(g.size_cells().len(), 12);
}

#[test]
fn shipped_timing_spec_validates() {
    let t: TimingSpec = load("timing.json");
    t.validate().unwrap();
    assert_eq!(t.ks, vec![2, 20, 60, 100]);
    assert_eq!(t.node_solver_by_k.len(), 1);
}
