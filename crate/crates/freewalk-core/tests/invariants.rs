//! Randomized and property-based invariants that cut across modules: group
//! algebra, convolution powers, defect identities, kernel geometry, and the
//! set machinery, all driven from the public API.

use freewalk_core::{
    ConstantFn, FinMeasure, GreenEvaluator, GreenModel, GreenTranslateMeasure, GroupFunction,
    Letter, MartinKernelFn, MkAverage, PowerTable, Rational, RaySpec, ReducedWord, SqrtPowerSum,
    StationaryError, SubsetSpec, ball, hitting_cylinder, kernel_exponent, left_convolve,
    sample_ray, sphere, windowed_power,
};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use std::collections::BTreeSet;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn random_letters(rng: &mut ChaCha8Rng, rank: u8, len: usize) -> Vec<Letter> {
    (0..len)
        .map(|_| {
            let code = rng.next_u32() as usize % (2 * rank as usize);
            Letter::new((code / 2) as u8, code % 2 == 1)
        })
        .collect()
}

fn random_word(rng: &mut ChaCha8Rng, rank: u8, max_len: usize) -> ReducedWord {
    let len = rng.next_u32() as usize % (max_len + 1);
    ReducedWord::reduce(rank, &random_letters(rng, rank, len)).unwrap()
}

fn random_subset(rng: &mut ChaCha8Rng, pool: &[ReducedWord], size: usize) -> BTreeSet<ReducedWord> {
    let mut out = BTreeSet::new();
    while out.len() < size {
        out.insert(pool[rng.next_u32() as usize % pool.len()].clone());
    }
    out
}

/// A random exact probability measure supported on at most `points` words of
/// the ball of the given radius.
fn random_probability(rng: &mut ChaCha8Rng, rank: u8, radius: usize, points: usize) -> FinMeasure {
    let mut weights: Vec<(ReducedWord, u64)> = Vec::new();
    for _ in 0..points {
        weights.push((
            random_word(rng, rank, radius),
            u64::from(rng.next_u32() % 100) + 1,
        ));
    }
    let total: u64 = weights.iter().map(|(_, w)| w).sum();
    FinMeasure::from_entries(
        rank,
        weights
            .into_iter()
            .map(|(g, w)| (g, Rational::new((w as i64).into(), (total as i64).into()))),
    )
    .unwrap()
}

#[test]
fn concatenation_then_reduction_is_multiplication() {
    let mut r = rng(11);
    for rank in [2u8, 3] {
        for _ in 0..5_000 {
            let xs_len = r.next_u32() as usize % 13;
            let ys_len = r.next_u32() as usize % 13;
            let xs = random_letters(&mut r, rank, xs_len);
            let ys = random_letters(&mut r, rank, ys_len);
            let mut joined = xs.clone();
            joined.extend_from_slice(&ys);
            let left = ReducedWord::reduce(rank, &joined).unwrap();
            let right = ReducedWord::reduce(rank, &xs)
                .unwrap()
                .mul(&ReducedWord::reduce(rank, &ys).unwrap());
            assert_eq!(left, right);
        }
    }
}

#[test]
fn multiplication_is_associative_with_identity_and_inverses() {
    let mut r = rng(12);
    for rank in [2u8, 3] {
        let e = ReducedWord::identity(rank);
        for _ in 0..6_000 {
            let a = random_word(&mut r, rank, 9);
            let b = random_word(&mut r, rank, 9);
            let c = random_word(&mut r, rank, 9);
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            assert_eq!(a.mul(&e), a);
            assert_eq!(e.mul(&a), a);
            assert!(a.mul(&a.inv()).is_identity());
            assert_eq!(a.mul(&b).inv(), b.inv().mul(&a.inv()));
        }
    }
}

proptest! {
    #[test]
    fn parse_display_roundtrip_any_word(codes in prop::collection::vec(0u8..6, 0..14)) {
        let letters: Vec<Letter> =
            codes.iter().map(|&c| Letter::new(c / 2, c % 2 == 1)).collect();
        let g = ReducedWord::reduce(3, &letters).unwrap();
        let text = g.to_string();
        prop_assert_eq!(ReducedWord::parse(3, &text).unwrap(), g);
    }

    #[test]
    fn inverse_is_an_involution(codes in prop::collection::vec(0u8..4, 0..14)) {
        let letters: Vec<Letter> =
            codes.iter().map(|&c| Letter::new(c / 2, c % 2 == 1)).collect();
        let g = ReducedWord::reduce(2, &letters).unwrap();
        prop_assert_eq!(g.inv().inv(), g.clone());
        prop_assert_eq!(g.inv().len(), g.len());
    }

    #[test]
    fn sqrt_sums_track_their_numeric_values(
        a1 in -50i64..50, b1 in -50i64..50, a2 in -50i64..50, b2 in -50i64..50,
        q in 1i64..9, j1 in -4i64..=4, j2 in -4i64..=4,
    ) {
        let x = SqrtPowerSum::from_half_power(2, j1, rat(a1, q))
            .add(&SqrtPowerSum::from_half_power(2, j2, rat(b1, q)));
        let y = SqrtPowerSum::from_half_power(2, j2, rat(a2, q))
            .add(&SqrtPowerSum::from_half_power(2, j1, rat(b2, q)));
        let sum = x.add(&y);
        prop_assert!((sum.to_f64() - (x.to_f64() + y.to_f64())).abs() < 1e-9);
        prop_assert!(x.sub(&x).is_zero());
        let gap = x.to_f64() - y.to_f64();
        if gap.abs() > 1e-6 {
            let expect = if gap > 0.0 {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Less
            };
            prop_assert_eq!(x.cmp_value(&y), expect);
        }
    }
}

#[test]
fn convolution_powers_keep_mass_and_bounded_support() {
    let mut r = rng(21);
    for rank in [2u8, 3] {
        for _ in 0..6 {
            let mu = random_probability(&mut r, rank, 2, 4);
            let radius = mu.support_radius();
            let mut table = PowerTable::new(mu.clone());
            for n in 0..=4u32 {
                let pn = table.power(n).unwrap().clone();
                assert!(pn.is_probability(), "mass must stay 1 at step {n}");
                assert!(pn.support_radius() <= radius * n as usize);
            }
            // Power composition: μ⁴ both as μ²∗μ² and μ∗μ³.
            let p4 = table.power(4).unwrap().clone();
            let p2 = table.power(2).unwrap().clone();
            let p3 = table.power(3).unwrap().clone();
            assert_eq!(p2.convolve(&p2).unwrap(), p4);
            assert_eq!(mu.convolve(&p3).unwrap(), p4);
        }
    }
}

#[test]
fn windowed_power_agrees_with_full_power_inside_the_window() {
    let mut r = rng(22);
    for _ in 0..8 {
        let mu = random_probability(&mut r, 2, 2, 4);
        for n in 0..=5u32 {
            for window in 0..=3usize {
                let windowed = windowed_power(&mu, n, window).unwrap();
                let full = freewalk_core::power(&mu, n).unwrap();
                assert_eq!(
                    windowed.measure.restricted(window),
                    full.restricted(window),
                    "n={n}, window={window}"
                );
            }
        }
    }
}

#[test]
fn averaged_defect_identity_holds_for_random_sets() {
    let mut r = rng(31);
    let pool = ball(2, 3).unwrap();
    let uniform = FinMeasure::uniform_generators(2).unwrap();
    let lazy = FinMeasure::from_entries(
        2,
        [
            (ReducedWord::identity(2), rat(1, 2)),
            (ReducedWord::parse(2, "a").unwrap(), rat(1, 4)),
            (ReducedWord::parse(2, "B").unwrap(), rat(1, 4)),
        ],
    )
    .unwrap();
    for mu in [uniform, lazy] {
        for reference in [
            BTreeSet::from([ReducedWord::identity(2)]),
            sphere(2, 1).unwrap().into_iter().collect(),
            random_subset(&mut r, &pool, 3),
        ] {
            for stage in 1..=4u32 {
                let avg = match MkAverage::new(mu.clone(), reference.clone(), stage) {
                    Ok(avg) => avg,
                    Err(StationaryError::ZeroDenominator { .. }) => continue,
                    Err(other) => panic!("unexpected error: {other}"),
                };
                let bound = avg.denominator().recip();
                for _ in 0..5 {
                    let test_set = random_subset(&mut r, &pool, 4);
                    let report = avg.defect(&test_set);
                    assert!(report.exact_match, "defect identity failed: {report:?}");
                    assert!(
                        report.lhs.abs() <= bound,
                        "defect {} exceeds 1/denominator {}",
                        report.lhs,
                        bound
                    );
                }
            }
        }
    }
}

#[test]
fn translate_defect_residual_matches_the_truncation_correction() {
    let mut r = rng(32);
    let pool = ball(2, 2).unwrap();
    let truncated = GreenEvaluator::new(GreenModel::TruncatedSeries {
        mu: FinMeasure::uniform_generators(2).unwrap(),
        depth: 7,
    })
    .unwrap();
    let closed = GreenEvaluator::new(GreenModel::ClosedFormUniform { rank: 2 }).unwrap();
    for _ in 0..10 {
        let reference = random_subset(&mut r, &pool, 2);
        let translator = random_word(&mut r, 2, 2);
        let test_set = random_subset(&mut r, &pool, 3);
        let finite =
            GreenTranslateMeasure::new(&truncated, translator.clone(), reference.clone()).unwrap();
        let report = finite.defect(&test_set);
        let info = report
            .truncation
            .expect("truncated model must report a correction");
        assert_eq!(
            report.lhs,
            &report.rhs - &info.correction,
            "lhs must equal rhs − correction"
        );
        assert!(report.exact_match);

        let exact = GreenTranslateMeasure::new(&closed, translator, reference).unwrap();
        let exact_report = exact.defect(&test_set);
        assert!(exact_report.truncation.is_none());
        assert_eq!(
            exact_report.lhs, exact_report.rhs,
            "closed model defect is exact"
        );
    }
}

#[test]
fn renewal_identity_holds_for_random_step_measures() {
    let mut r = rng(33);
    for _ in 0..5 {
        let mu = random_probability(&mut r, 2, 2, 5);
        let depth = 5;
        let eval = GreenEvaluator::new(GreenModel::TruncatedSeries {
            mu: mu.clone(),
            depth,
        })
        .unwrap();
        for g in ball(2, 3).unwrap() {
            let lhs = &eval.value(&g) - left_convolve(&mu, &eval, &g).unwrap();
            let delta = if g.is_identity() {
                Rational::one()
            } else {
                Rational::zero()
            };
            let rhs = delta - eval.residual_power(&g).unwrap();
            assert_eq!(lhs, rhs, "renewal identity failed at {g}");
        }
    }
}

#[test]
fn kernel_exponent_matches_the_horofunction_limit() {
    let mut r = rng(41);
    let rays = [
        RaySpec::parse(2, "e|a").unwrap(),
        RaySpec::parse(2, "e|ab").unwrap(),
        RaySpec::parse(2, "ba|aab").unwrap(),
        RaySpec::parse(2, "B|Ab").unwrap(),
    ];
    for _ in 0..400 {
        let g = random_word(&mut r, 2, 6);
        for ray in &rays {
            // The kernel is the limit of G(g·p_n)/G(p_n) along the ray, and
            // each factor contributes one power of 2d−1 per unit of
            // |p_n| − |g·p_n|, which stabilizes once p_n outruns g.
            let n = g.len() + ray.prefix().len() + 2 * ray.period().len() + 4;
            let anchor = ray.word_prefix(n);
            let horofunction = anchor.len() as i64 - g.mul(&anchor).len() as i64;
            assert_eq!(
                kernel_exponent(ray, &g),
                horofunction,
                "exponent disagrees with |p_n| − |g·p_n| at g={g}"
            );
        }
    }
}

#[test]
fn kernel_is_harmonic_at_random_points() {
    let mut r = rng(42);
    let mu = FinMeasure::uniform_generators(2).unwrap();
    for ray_text in ["e|a", "e|ba", "ab|bbA"] {
        let kernel = MartinKernelFn::new(RaySpec::parse(2, ray_text).unwrap());
        for _ in 0..40 {
            let g = random_word(&mut r, 2, 5);
            let averaged = left_convolve(&mu, &kernel, &g).unwrap();
            assert_eq!(averaged, kernel.value(&g).unwrap(), "not harmonic at {g}");
        }
    }
}

#[test]
fn constant_functions_are_harmonic_for_any_probability() {
    let mut r = rng(43);
    let mu = random_probability(&mut r, 2, 2, 4);
    let c = ConstantFn::new(2, rat(7, 3));
    for g in ball(2, 2).unwrap() {
        assert_eq!(left_convolve(&mu, &c, &g).unwrap(), rat(7, 3));
    }
}

#[test]
fn materialization_is_monotone_and_length_bounded() {
    let specs = [
        SubsetSpec::parse(2, "sigma:e").unwrap(),
        SubsetSpec::parse(2, "palindromes").unwrap(),
        SubsetSpec::parse(2, "rayprefix:a|ba").unwrap(),
        SubsetSpec::parse(2, "aaa:B").unwrap(),
        SubsetSpec::parse(2, "an:1").unwrap(),
        SubsetSpec::parse(2, "explicit:e,a,abA,bbbb").unwrap(),
    ];
    for spec in &specs {
        let mut previous = BTreeSet::new();
        for radius in 0..=8usize {
            let current = spec.materialize(radius).unwrap();
            assert!(
                previous.is_subset(&current),
                "{spec} shrank at radius {radius}"
            );
            assert!(current.iter().all(|g| g.len() <= radius));
            previous = current;
        }
    }
}

#[test]
fn cylinder_masses_tile_every_sphere() {
    for rank in [2u8, 3] {
        for radius in 1..=4usize {
            let total: Rational = sphere(rank, radius)
                .unwrap()
                .iter()
                .map(hitting_cylinder)
                .sum();
            assert!(
                total.is_one(),
                "cylinders over S_{radius} must tile: got {total}"
            );
        }
    }
}

#[test]
fn sampled_rays_spread_across_first_letters() {
    let mut counts = [0usize; 4];
    for seed in 0..2_000u64 {
        let g = sample_ray(2, 3, seed).unwrap();
        assert_eq!(g.len(), 3);
        let first = g.first().unwrap();
        counts[2 * first.index() as usize + usize::from(first.is_inverse())] += 1;
    }
    for (slot, count) in counts.iter().enumerate() {
        assert!(
            (400..=600).contains(count),
            "first-letter slot {slot} saw {count} of 2000 samples"
        );
    }
}
