//! Acceptance gate: one test per checklist criterion, in checklist order.
//! Each drives exactly the same code as `freewalk verify-all`, prints one
//! line, and fails loudly with the check's own diagnostic. Tolerances are
//! pinned inside the checks: most identities are exact rational equalities;
//! the closed-versus-truncated comparison allows 1e-6.

use freewalk_cli::checks;

fn run_criterion(label: &str) {
    let outcome = checks::run(label)
        .unwrap_or_else(|| panic!("no check named {label:?}"))
        .unwrap_or_else(|err| panic!("{label} could not run: {err}"));
    println!(
        "{}: {} ({} ms) — {}",
        outcome.label,
        if outcome.passed { "PASS" } else { "FAIL" },
        outcome.elapsed_ms,
        outcome.detail
    );
    assert!(outcome.passed, "{label} failed: {}", outcome.detail);
}

#[test]
fn criterion_01_renewal_identity_at_depth_50() {
    run_criterion("renewal-depth-50");
}

#[test]
fn criterion_02_closed_form_matches_depth_200_within_1e6() {
    run_criterion("closed-vs-deep-truncation");
}

#[test]
fn criterion_03_translate_family_defect_identity_exact() {
    run_criterion("translate-defect-exact");
}

#[test]
fn criterion_04_averaged_family_defect_signed_and_bounded() {
    run_criterion("averaged-defect-bound");
}

#[test]
fn criterion_05_direction_kernels_exactly_harmonic() {
    run_criterion("kernel-harmonicity");
}

#[test]
fn criterion_06_sqrt_kernel_average_symmetric_and_bounded() {
    run_criterion("sphere-symmetry-and-average-bound");
}

#[test]
fn criterion_07_translate_search_strictly_decays() {
    run_criterion("translate-search-decay");
}

#[test]
fn criterion_08_stretched_family_counts_and_kernel_mass() {
    run_criterion("stretched-family-counts-and-kernel-mass");
}

#[test]
fn criterion_09_expected_lightness_separates_thin_from_thick() {
    run_criterion("expected-lightness-trends");
}

#[test]
fn criterion_10_sparse_family_products_stay_injective() {
    run_criterion("product-injectivity");
}

#[test]
fn criterion_11_kernel_ball_sums_outgrow_the_radius() {
    run_criterion("kernel-sum-exceeds-radius");
}

#[test]
fn criterion_12_tail_decomposition_window_split_exact() {
    run_criterion("tail-decomposition");
}

#[test]
fn the_checklist_and_this_gate_cover_each_other() {
    // Every registered check is exercised by a criterion above, so the gate
    // cannot silently fall behind the checklist.
    assert_eq!(checks::all().len(), 12);
}
