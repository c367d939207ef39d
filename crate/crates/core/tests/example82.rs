use hironaka::approx::cm_counterexample_runner;
use hironaka::diagram::FlatVerdict;

#[test]
fn mu8_h_z() {
    let r = cm_counterexample_runner(8, "z").unwrap();
    for c in &r.claims {
        assert!(c.pass, "{}: {}", c.name, c.detail);
    }
    assert!(r.all_pass);
    // the Hilbert-Samuel functions agree through η = 10; the new vertex (2,2,7) shows at 11
    assert_eq!(r.hs_first_difference, Some(11));
    assert_eq!(r.hs.values[..=10], r.perturbed_hs.values[..=10]);
}

#[test]
fn larger_mu_moves_the_difference_up() {
    let r = cm_counterexample_runner(12, "z").unwrap();
    assert!(r.all_pass);
    let d = r.hs_first_difference.unwrap();
    assert!(d > 11, "first difference at {d}");
}

#[test]
fn trivial_h_keeps_flatness() {
    let r = cm_counterexample_runner(8, "0").unwrap();
    assert!(r.degenerate);
    assert_eq!(r.perturbed_flat.verdict, FlatVerdict::Flat);
    assert_eq!(r.hs_first_difference, None);
    assert!(r.all_pass);
}

#[test]
fn small_mu_rejected() {
    assert!(cm_counterexample_runner(7, "z").is_err());
    assert!(cm_counterexample_runner(8, "1 + z").is_err());
    assert!(cm_counterexample_runner(8, "x").is_err());
}
