use ustlab::experiments::{run_diameter_scaling, ExperimentConfig};
use ustlab::generators::{complete, two_cliques_bridge};
use ustlab::partition::Partition;
use ustlab::{coarsen, good_decomposition, primary_decomposition, verify_good, wilson, Family, Network32, RngStream};

#[test]
fn two_cliques_decomposition_passes_audit() {
    let g = two_cliques_bridge(400).unwrap();
    let gd = good_decomposition(&g, 0.3, 0.45, None).unwrap();
    assert!(gd.passed(), "{:?}", gd.failed());
    assert!((gd.beta - 8000.0).abs() < 1e-9);
    assert!(gd.theta > 0.0 && gd.theta <= 0.3);
}

#[test]
fn moving_a_clique_vertex_breaks_the_audit() {
    let n = 200;
    let g = two_cliques_bridge(n).unwrap();
    let mut gd = good_decomposition(&g, 0.3, 0.45, None).unwrap();
    let mut labels: Vec<usize> = (0..n).map(|v| usize::from(v >= n / 2)).collect();
    labels[0] = 1;
    gd.partition = Partition::from_labels(labels).unwrap();
    let audit = verify_good(&g, &gd).unwrap();
    assert!(audit.iter().any(|c| !c.pass));
}

#[test]
fn star_control_diameter_is_two() {
    let cfg = ExperimentConfig { family: Family::Star, n: vec![10, 40], trials: 5, seed: Some(3), ..Default::default() };
    let report = run_diameter_scaling(&cfg).unwrap();
    let trials = report.table("trials").unwrap();
    let col = trials.column("diameter").unwrap();
    assert!(trials.rows.iter().all(|r| r[col] == 2));
}

#[test]
fn single_precision_sampling() {
    let g = complete(30);
    let net = Network32::from_graph(&g);
    let tree = wilson(&net, &mut RngStream::new(5)).unwrap();
    assert!(tree.validate(&net).is_ok());
}

#[test]
fn primary_splits_cliques_then_coarsening_merges() {
    let n = 200;
    let g = two_cliques_bridge(n).unwrap();
    let (primary, audit) = primary_decomposition(&g, 0.4).unwrap();
    assert!(audit.passed());
    let cliques: Vec<usize> = (0..n).map(|v| usize::from(v >= n / 2)).collect();
    assert_eq!(primary.canonical(), Partition::from_labels(cliques).unwrap().canonical());
    let eps: f64 = 0.3;
    let beta = (n as f64).powf(1.5);
    // one crossing edge against θ²αβ = ε² ε⁹ n^1.5 < 1
    assert!(eps.powi(11) * beta < 1.0);
    let c = coarsen(&g, &primary, eps, eps.powi(9), beta).unwrap();
    assert_eq!((c.partition.k(), c.merges), (1, 1));
    assert!(c.boundary_ok && c.pieces_connected);
}
