//! The verification checklist: twelve independently runnable checks, each
//! pinning an exact identity or a stated tolerance. The `verify-all`
//! subcommand and the acceptance test target both run exactly these.

use std::collections::BTreeSet;
use std::time::Instant;

use freewalk_core::{
    FinMeasure, GreenEvaluator, GreenModel, GreenTranslateMeasure, MartinKernelFn, MkAverage,
    Rational, RaySpec, ReducedWord, SqrtPowerSum, StationaryError, SubsetSpec, Trend, ball,
    ball_size, begins_ends_count, expected_lightness_sum, expected_sqrt_kernel,
    find_small_translate, harmonicity_defect, left_convolve, lightness_partial_sums,
    psi_injectivity_test, rat, rat_int, sphere, sphere_size, sphere_sqrt_sum,
    tail_decomposition_check,
};
use num_traits::{One, Signed, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::CliFailure;

/// Outcome of one checklist item.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub label: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

fn report(label: &'static str, start: Instant, passed: bool, detail: String) -> CheckReport {
    CheckReport {
        label,
        passed,
        detail,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

/// One runnable checklist item: its label and entry point.
pub type CheckItem = (&'static str, fn() -> Result<CheckReport, CliFailure>);

/// All checklist items in execution order.
pub fn all() -> Vec<CheckItem> {
    vec![
        ("renewal-depth-50", renewal_depth_50),
        ("closed-vs-deep-truncation", closed_vs_deep_truncation),
        ("translate-defect-exact", translate_defect_exact),
        ("averaged-defect-bound", averaged_defect_bound),
        ("kernel-harmonicity", kernel_harmonicity),
        (
            "sphere-symmetry-and-average-bound",
            sphere_symmetry_and_average_bound,
        ),
        ("translate-search-decay", translate_search_decay),
        (
            "stretched-family-counts-and-kernel-mass",
            stretched_family_counts_and_kernel_mass,
        ),
        ("expected-lightness-trends", expected_lightness_trends),
        ("product-injectivity", product_injectivity),
        ("kernel-sum-exceeds-radius", kernel_sum_exceeds_radius),
        ("tail-decomposition", tail_decomposition),
    ]
}

/// Run one item by label.
pub fn run(label: &str) -> Option<Result<CheckReport, CliFailure>> {
    all()
        .into_iter()
        .find(|(l, _)| *l == label)
        .map(|(_, f)| f())
}

fn uniform2() -> FinMeasure {
    FinMeasure::uniform_generators(2).expect("rank 2 is valid")
}

fn lazy_step() -> FinMeasure {
    FinMeasure::from_entries(
        2,
        [
            (ReducedWord::identity(2), rat(1, 2)),
            (ReducedWord::parse(2, "a").expect("valid"), rat(1, 4)),
            (ReducedWord::parse(2, "B").expect("valid"), rat(1, 4)),
        ],
    )
    .expect("valid probability")
}

fn random_subset(
    rng: &mut ChaCha8Rng,
    pool: &[ReducedWord],
    max_size: usize,
) -> BTreeSet<ReducedWord> {
    let size = 1 + rng.next_u32() as usize % max_size;
    let mut out = BTreeSet::new();
    while out.len() < size {
        out.insert(pool[rng.next_u32() as usize % pool.len()].clone());
    }
    out
}

/// Truncated resolvent at depth 50 satisfies its renewal identity exactly on
/// the ball of radius 6: value − step-averaged value = unit mass at the
/// identity minus the 51st convolution power.
fn renewal_depth_50() -> Result<CheckReport, CliFailure> {
    let start = Instant::now();
    let mu = uniform2();
    let eval = GreenEvaluator::new(GreenModel::TruncatedSeries {
        mu: mu.clone(),
        depth: 50,
    })?;
    let mut checked = 0usize;
    for g in ball(2, 6)? {
        let lhs = &eval.value(&g) - left_convolve(&mu, &eval, &g)?;
        let delta = if g.is_identity() {
            Rational::one()
        } else {
            Rational::zero()
        };
        let rhs = delta
            - eval
                .residual_power(&g)
                .expect("truncated model exposes its residual power");
        if lhs != rhs {
            return Ok(report(
                "renewal-depth-50",
                start,
                false,
                format!("identity broke at {g}"),
            ));
        }
        checked += 1;
    }
    Ok(report(
        "renewal-depth-50",
        start,
        checked == 1457,
        format!("exact at all {checked} points of the radius-6 ball"),
    ))
}

/// The closed-form resolvent and the depth-200 truncation agree to within
/// 1e-6 at every point of the radius-4 ball (exact rational comparison
/// against 1/1000000).
fn closed_vs_deep_truncation() -> Result<CheckReport, CliFailure> {
    let start = Instant::now();
    let closed = GreenEvaluator::new(GreenModel::ClosedFormUniform { rank: 2 })?;
    let deep = GreenEvaluator::new(GreenModel::TruncatedSeries {
        mu: uniform2(),
        depth: 200,
    })?;
    let tolerance = rat(1, 1_000_000);
    let mut worst = Rational::zero();
    for g in ball(2, 4)? {
        let diff = (closed.value(&g) - deep.value(&g)).abs();
        if diff > worst {
            worst = diff;
        }
    }
    let passed = worst < tolerance;
    Ok(report(
        "closed-vs-deep-truncation",
        start,
        passed,
        format!(
            "max |closed − depth-200| = {:.3e} over the radius-4 ball (tolerance 1e-6)",
            freewalk_core::rational_to_f64(&worst)
        ),
    ))
}

/// The translate-family stationarity defect identity holds exactly for the
/// closed model: both reference families, every translator in the radius-2
/// ball, and 50 seeded random test sets inside the radius-2 ball.
fn translate_defect_exact() -> Result<CheckReport, CliFailure> {
    let start = Instant::now();
    let eval = GreenEvaluator::new(GreenModel::ClosedFormUniform { rank: 2 })?;
    let pool = ball(2, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let test_sets: Vec<BTreeSet<ReducedWord>> =
        (0..50).map(|_| random_subset(&mut rng, &pool, 6)).collect();
    let references = [
        BTreeSet::from([ReducedWord::identity(2)]),
        SubsetSpec::parse(2, "sigma:e")
            .expect("valid spec")
            .materialize(6)?,
    ];
    let mut reports = 0usize;
    for reference in &references {
        for k in &pool {
            let family = GreenTranslateMeasure::new(&eval, k.clone(), reference.clone())?;
            for test_set in &test_sets {
                let defect = family.defect(test_set);
                if !defect.exact_match || defect.truncation.is_some() {
                    return Ok(report(
                        "translate-defect-exact",
                        start,
                        false,
                        format!("defect identity broke at translator {k}: {defect:?}"),
                    ));
                }
                reports += 1;
            }
        }
    }
    Ok(report(
        "translate-defect-exact",
        start,
        reports == 2 * 17 * 50,
        format!("exact in all {reports} family/translator/test-set combinations"),
    ))
}

/// The averaged-family defect identity holds exactly with the signed defect
/// bounded by 1/denominator, for stages up to 10, both reference sets, and
/// 50 seeded random test sets inside the radius-3 ball.
fn averaged_defect_bound() -> Result<CheckReport, CliFailure> {
    let start = Instant::now();
    let pool = ball(2, 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let test_sets: Vec<BTreeSet<ReducedWord>> =
        (0..50).map(|_| random_subset(&mut rng, &pool, 8)).collect();
    let references = [
        BTreeSet::from([ReducedWord::identity(2)]),
        sphere(2, 1)?.into_iter().collect::<BTreeSet<_>>(),
    ];
    let mut reports = 0usize;
    for reference in &references {
        for stage in 1..=10u32 {
            let avg = match MkAverage::new(uniform2(), reference.clone(), stage) {
                Ok(avg) => avg,
                Err(StationaryError::ZeroDenominator { .. }) => continue,
                Err(other) => return Err(other.into()),
            };
            let bound = avg.denominator().recip();
            for test_set in &test_sets {
                let defect = avg.defect(test_set);
                if !defect.exact_match || defect.lhs.abs() > bound {
                    return Ok(report(
                        "averaged-defect-bound",
                        start,
                        false,
                        format!("stage {stage}: {defect:?}"),
                    ));
                }
                reports += 1;
            }
        }
    }
    Ok(report(
        "averaged-defect-bound",
        start,
        reports == 2 * 10 * 50,
        format!("exact with |defect| ≤ 1/denominator in all {reports} combinations"),
    ))
}

fn rays_for_rank(rank: u8) -> Vec<RaySpec> {
    let texts: &[&str] = match rank {
        2 => &["e|a", "e|ab", "a|b", "ba|aab", "B|Ab"],
        3 => &["e|c", "e|abc", "c|ab", "e|ac", "bc|cb"],
        _ => unreachable!("checklist ranks are 2 and 3"),
    };
    texts
        .iter()
        .map(|t| RaySpec::parse(rank, t).expect("valid ray"))
        .collect()
}

/// Direction kernels are exactly harmonic for the uniform step: the
/// harmonicity defect vanishes identically over the radius-6 ball for five
/// rays in each of ranks 2 and 3.
fn kernel_harmonicity() -> Result<CheckReport, CliFailure> {
    let start = Instant::now();
    let mut checked = 0usize;
    for rank in [2u8, 3] {
        let mu = FinMeasure::uniform_generators(rank)?;
        let window = ball(rank, 6)?;
        for ray in rays_for_rank(rank) {
            let kernel = MartinKernelFn::new(ray.clone());
            let worst = harmonicity_defect(&mu, &kernel, window.iter())?;
            if !worst.is_zero() {
                return Ok(report(
                    "kernel-harmonicity",
                    start,
                    false,
                    format!("rank {rank}, ray {ray}: max defect {worst}"),
                ));
            }
            checked += window.len();
        }
    }
    Ok(report(
        "kernel-harmonicity",
        start,
        checked == 5 * (1457 + 23437),
        format!("defect exactly 0 at {checked} point/ray combinations"),
    ))
}

/// The √-kernel boundary average is spherically symmetric — every point of
/// each sphere up to radius 4 yields the same exact coefficient pair, which
/// also matches the census sum divided by the sphere size — and the average
/// obeys the bound 4r·(2d−1)^{−r/2} for radii 1..=8.
fn sphere_symmetry_and_average_bound() -> Result<CheckReport, CliFailure> {
    let start = Instant::now();
    let ray = RaySpec::parse(2, "e|a").expect("valid ray");
    for radius in 0..=4usize {
        let points = sphere(2, radius)?;
        let first = expected_sqrt_kernel(2, &points[0])?;
        for g in &points[1..] {
            if expected_sqrt_kernel(2, g)? != first {
                return Ok(report(
                    "sphere-symmetry-and-average-bound",
                    start,
                    false,
                    format!("asymmetry at {g} on sphere {radius}"),
                ));
            }
        }
        let census = sphere_sqrt_sum(2, radius, &ray)?;
        let sphere_points = rat_int(i64::try_from(sphere_size(2, radius)).expect("small"));
        if first.scale(&sphere_points) != census {
            return Ok(report(
                "sphere-symmetry-and-average-bound",
                start,
                false,
                format!("average × sphere size ≠ census sum at radius {radius}"),
            ));
        }
    }
    for radius in 1..=8usize {
        let anchor = RaySpec::parse(2, "e|a")
            .expect("valid ray")
            .word_prefix(radius);
        let average = expected_sqrt_kernel(2, &anchor)?;
        let bound = SqrtPowerSum::from_half_power(2, -(radius as i64), rat_int(4 * radius as i64));
        if average.cmp_value(&bound) == std::cmp::Ordering::Greater {
            return Ok(report(
                "sphere-symmetry-and-average-bound",
                start,
                false,
                format!("average at radius {radius} exceeds 4r·3^(−r/2)"),
            ));
        }
    }
    Ok(report(
        "sphere-symmetry-and-average-bound",
        start,
        true,
        "symmetry exact on spheres 0..=4; averages within 4r·3^(−r/2) for r ≤ 8".to_string(),
    ))
}

/// Translating the stretched family inside the radius-8 ball strictly
/// shrinks its resolvent weight sphere by sphere out to radius 6, ending
/// below a twentieth of the untranslated weight.
fn translate_search_decay() -> Result<CheckReport, CliFailure> {
    let start = Instant::now();
    let eval = GreenEvaluator::new(GreenModel::ClosedFormUniform { rank: 2 })?;
    let family = SubsetSpec::parse(2, "sigma:e")
        .expect("valid spec")
        .materialize(8)?;
    let total = eval.set_sum(family.iter());
    if total != rat(403, 162) {
        return Ok(report(
            "translate-search-decay",
            start,
            false,
            format!("unexpected untranslated weight {total}"),
        ));
    }
    let steps = find_small_translate(&eval, &family, 6)?;
    let radii: Vec<usize> = steps.iter().map(|s| s.radius).collect();
    if radii != (0..=6).collect::<Vec<_>>() || steps[0].value != total {
        return Ok(report(
            "translate-search-decay",
            start,
            false,
            format!("schedule malformed: radii {radii:?}"),
        ));
    }
    for pair in steps.windows(2) {
        if pair[1].value >= pair[0].value {
            return Ok(report(
                "translate-search-decay",
                start,
                false,
                format!(
                    "weight failed to shrink from radius {} to {}",
                    pair[0].radius, pair[1].radius
                ),
            ));
        }
    }
    let last = &steps[steps.len() - 1];
    let passed = last.value < &total * rat(1, 20);
    Ok(report(
        "translate-search-decay",
        start,
        passed,
        format!(
            "weight shrank strictly over radii 0..=6; final {} = {:.4}× the untranslated weight",
            freewalk_core::format_rational(&last.value),
            freewalk_core::rational_to_f64(&(&last.value / &total)),
        ),
    ))
}

/// The stretched family meets each even sphere in exactly one point per
/// half-radius ball element, and its kernel mass keeps pace with the
/// radius: partial sums ≥ ⌊R/2⌋ out to R = 16 for three single-letter rays.
fn stretched_family_counts_and_kernel_mass() -> Result<CheckReport, CliFailure> {
    let start = Instant::now();
    let spec = SubsetSpec::parse(2, "sigma:e").expect("valid spec");
    for r in 1..=6usize {
        let count = spec.materialize(2 * r)?.len() as u128;
        if count != ball_size(2, r) {
            return Ok(report(
                "stretched-family-counts-and-kernel-mass",
                start,
                false,
                format!(
                    "family inside B_{} has {count} points, expected |B_{r}|",
                    2 * r
                ),
            ));
        }
    }
    let family = spec.materialize(16)?;
    for ray_text in ["e|a", "e|A", "e|b"] {
        let ray = RaySpec::parse(2, ray_text).expect("valid ray");
        let table = lightness_partial_sums(&ray, &family, 16);
        for radius in 0..=16usize {
            let cumulative = table.cumulative_at(radius).expect("row exists");
            if cumulative < &rat_int((radius / 2) as i64) {
                return Ok(report(
                    "stretched-family-counts-and-kernel-mass",
                    start,
                    false,
                    format!("kernel mass {cumulative} below ⌊R/2⌋ at R={radius}, ray {ray}"),
                ));
            }
        }
    }
    Ok(report(
        "stretched-family-counts-and-kernel-mass",
        start,
        true,
        "counts match half-radius balls for r ≤ 6; kernel mass ≥ ⌊R/2⌋ out to R = 16".to_string(),
    ))
}

/// ζ-averaged √-kernel mass separates thin from thick: the one-point-per-
/// sphere family contracts (late increment ratios ≤ 4/5, trend
/// bounded-looking) while the stretched family's increments stay ≥ 1/2 and
/// the trend diverges.
fn expected_lightness_trends() -> Result<CheckReport, CliFailure> {
    let start = Instant::now();
    let thin = SubsetSpec::parse(2, "rayprefix:e|a")
        .expect("valid spec")
        .materialize(16)?;
    let thin_table = expected_lightness_sum(2, &thin, 16)?;
    if thin_table.trend() != Trend::BoundedLooking {
        return Ok(report(
            "expected-lightness-trends",
            start,
            false,
            "one-point-per-sphere family did not classify as bounded-looking".to_string(),
        ));
    }
    for r in 7..=15usize {
        let here = &thin_table.rows[r].increment;
        let next = &thin_table.rows[r + 1].increment;
        if next.scale(&rat_int(5)).cmp_value(&here.scale(&rat_int(4)))
            == std::cmp::Ordering::Greater
        {
            return Ok(report(
                "expected-lightness-trends",
                start,
                false,
                format!("increment ratio above 4/5 between radii {r} and {}", r + 1),
            ));
        }
    }
    let thick = SubsetSpec::parse(2, "sigma:e")
        .expect("valid spec")
        .materialize(14)?;
    let thick_table = expected_lightness_sum(2, &thick, 14)?;
    if thick_table.trend() != Trend::Diverging {
        return Ok(report(
            "expected-lightness-trends",
            start,
            false,
            "stretched family did not classify as diverging".to_string(),
        ));
    }
    let half = SqrtPowerSum::from_rational(2, rat(1, 2));
    for i in 1..=7usize {
        let increment = &thick_table.rows[2 * i].increment;
        if increment.cmp_value(&half) == std::cmp::Ordering::Less {
            return Ok(report(
                "expected-lightness-trends",
                start,
                false,
                format!("stretched-family increment below 1/2 at radius {}", 2 * i),
            ));
        }
    }
    Ok(report(
        "expected-lightness-trends",
        start,
        true,
        "thin family contracts at ratio ≤ 4/5 and looks bounded; stretched family diverges \
         with increments ≥ 1/2 out to R = 14"
            .to_string(),
    ))
}

/// Multiplying the first two sparse families inside the radius-8 ball
/// (549 × 8 products) yields no collisions and no length cancellations, and
/// the pinned-end word counts match their closed form while growing at
/// least like 3^(r−3).
fn product_injectivity() -> Result<CheckReport, CliFailure> {
    let start = Instant::now();
    let outcome = psi_injectivity_test(2, 2, 8, 12)?;
    if outcome.family_sizes != [549, 8]
        || outcome.products != 4392
        || outcome.collisions != 0
        || outcome.additivity_failures != 0
    {
        return Ok(report(
            "product-injectivity",
            start,
            false,
            format!("unexpected product outcome: {outcome:?}"),
        ));
    }
    let expected: [u128; 6] = [3, 7, 21, 61, 183, 547];
    for (i, r) in (3..=8usize).enumerate() {
        let count = begins_ends_count(2, r)?;
        if count != expected[i] || count < 3u128.pow(r as u32 - 3) {
            return Ok(report(
                "product-injectivity",
                start,
                false,
                format!("pinned-end count at radius {r} is {count}"),
            ));
        }
    }
    Ok(report(
        "product-injectivity",
        start,
        true,
        "4392 products, 0 collisions, 0 cancellations; pinned-end counts ≥ 3^(r−3)".to_string(),
    ))
}

/// Ball sums of every direction kernel outgrow the radius: for five rays,
/// the kernel mass of the radius-R ball exceeds R for all R ≤ 10.
fn kernel_sum_exceeds_radius() -> Result<CheckReport, CliFailure> {
    let start = Instant::now();
    let full_ball: BTreeSet<ReducedWord> = ball(2, 10)?.into_iter().collect();
    for ray in rays_for_rank(2) {
        let table = lightness_partial_sums(&ray, &full_ball, 10);
        for radius in 1..=10usize {
            let cumulative = table.cumulative_at(radius).expect("row exists");
            if cumulative <= &rat_int(radius as i64) {
                return Ok(report(
                    "kernel-sum-exceeds-radius",
                    start,
                    false,
                    format!("ball kernel mass {cumulative} ≤ {radius} for ray {ray}"),
                ));
            }
        }
    }
    Ok(report(
        "kernel-sum-exceeds-radius",
        start,
        true,
        "ball kernel mass exceeds the radius for all R ≤ 10 and five rays".to_string(),
    ))
}

/// Splitting a convolution power across a time window is exact: summing the
/// windowed right-translates reproduces the direct tail mass for offsets
/// 1..=3 and both reference sets, for the uniform and a lazy asymmetric
/// step.
fn tail_decomposition() -> Result<CheckReport, CliFailure> {
    let start = Instant::now();
    let references = [
        BTreeSet::from([ReducedWord::identity(2)]),
        sphere(2, 1)?.into_iter().collect::<BTreeSet<_>>(),
    ];
    let mut checked = 0usize;
    for mu in [uniform2(), lazy_step()] {
        for (offset, span) in [(1u32, 5u32), (2, 6), (3, 4)] {
            for reference in &references {
                let split = tail_decomposition_check(&mu, reference, offset, span)?;
                if !split.holds() {
                    return Ok(report(
                        "tail-decomposition",
                        start,
                        false,
                        format!(
                            "window ({offset}, {span}) split failed: lhs {} ≠ rhs {}",
                            split.lhs, split.rhs
                        ),
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(report(
        "tail-decomposition",
        start,
        checked == 12,
        format!("window split exact in all {checked} step/window/reference combinations"),
    ))
}
