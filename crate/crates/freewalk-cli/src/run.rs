//! Subcommand implementations: parse the textual arguments, drive the core
//! library, and shape the result into a [`Table`].

use std::collections::BTreeSet;

use freewalk_core::{
    FinMeasure, GreenTranslateMeasure, MartinKernelFn, MkAverage, RaySpec, ReducedWord,
    SqrtPowerSum, SubsetSpec, expected_lightness_sum, expected_sqrt_kernel, find_small_translate,
    format_rational, growth_rates, hitting_cylinder, kernel_value, left_convolve,
    lightness_partial_sums, rat_int, sample_ray, sphere_size, sphere_sqrt_sum,
};

use crate::CliFailure;
use crate::args;
use crate::checks;
use crate::output::{Table, exact_cell, float_cell};

fn words_cell(set: &BTreeSet<ReducedWord>) -> String {
    let rendered: Vec<String> = set.iter().map(|g| g.to_string()).collect();
    rendered.join(",")
}

fn sqrt_cells(value: &SqrtPowerSum) -> (String, String) {
    (value.to_string(), format!("{}", value.to_f64()))
}

/// `green`: resolvent values at chosen points.
pub fn green(rank: u8, model: &str, step: Option<&str>, points: &str) -> Result<Table, CliFailure> {
    let eval = args::parse_model(rank, model, step)?;
    let points = args::parse_word_list(rank, points)?;
    let mut table = Table::new(
        "green",
        &[
            "point",
            "length",
            "value",
            "value_float",
            "residual_next_power",
        ],
    );
    for g in &points {
        let value = eval.value(g);
        let residual = match eval.residual_power(g) {
            Some(r) => exact_cell(&r),
            None => "-".to_string(),
        };
        table.push_row(vec![
            g.to_string(),
            g.len().to_string(),
            exact_cell(&value),
            float_cell(&value),
            residual,
        ]);
    }
    table.push_note(format!("model: {}", eval.model_label()));
    if let Some(depth) = eval.depth() {
        table.push_note(format!("series truncated at depth {depth}"));
    }
    Ok(table)
}

/// `translate-search`: per-sphere minimizers of the translated set weight.
pub fn translate_search(
    rank: u8,
    model: &str,
    step: Option<&str>,
    set: &str,
    radius_max: usize,
) -> Result<Table, CliFailure> {
    let eval = args::parse_model(rank, model, step)?;
    let family = args::parse_set(rank, set)?;
    let steps = find_small_translate(&eval, &family, radius_max)?;
    let mut table = Table::new(
        "translate-search",
        &["radius", "translator", "weight", "weight_float"],
    );
    for step in &steps {
        table.push_row(vec![
            step.radius.to_string(),
            step.translator.to_string(),
            exact_cell(&step.value),
            float_cell(&step.value),
        ]);
    }
    table.push_note(format!("set size {}", family.len()));
    Ok(table)
}

/// `defect-mk`: stationarity defect of the averaged family.
pub fn defect_mk(
    rank: u8,
    step: Option<&str>,
    reference: &str,
    stage: u32,
    test_sets: &str,
) -> Result<Table, CliFailure> {
    let mu = match step {
        Some(s) => args::parse_step(rank, s)?,
        None => FinMeasure::uniform_generators(rank)?,
    };
    let reference = args::parse_set(rank, reference)?;
    let avg = MkAverage::new(mu, reference, stage)?;
    let mut table = Table::new(
        "defect-mk",
        &["test_set", "measure", "lhs", "rhs", "exact_match", "bound"],
    );
    for test_set in args::parse_set_list(rank, test_sets)? {
        let defect = avg.defect(&test_set);
        let bound = defect
            .bound
            .as_ref()
            .expect("averaged family always carries a bound");
        table.push_row(vec![
            words_cell(&test_set),
            exact_cell(&avg.measure(&test_set)),
            exact_cell(&defect.lhs),
            exact_cell(&defect.rhs),
            defect.exact_match.to_string(),
            exact_cell(bound),
        ]);
    }
    table.push_note(format!(
        "stage {stage}, denominator {}",
        format_rational(avg.denominator())
    ));
    Ok(table)
}

/// `defect-green`: stationarity defect of the translate family.
pub fn defect_green(
    rank: u8,
    model: &str,
    step: Option<&str>,
    reference: &str,
    translator: &str,
    test_sets: &str,
) -> Result<Table, CliFailure> {
    let eval = args::parse_model(rank, model, step)?;
    let reference = args::parse_set(rank, reference)?;
    let translator = args::parse_word(rank, translator)?;
    let family = GreenTranslateMeasure::new(&eval, translator, reference)?;
    let mut table = Table::new(
        "defect-green",
        &[
            "test_set",
            "measure",
            "lhs",
            "rhs",
            "correction",
            "residual",
            "exact_match",
        ],
    );
    for test_set in args::parse_set_list(rank, test_sets)? {
        let defect = family.defect(&test_set);
        let (correction, residual) = match &defect.truncation {
            Some(info) => (exact_cell(&info.correction), exact_cell(&info.residual)),
            None => ("-".to_string(), "-".to_string()),
        };
        table.push_row(vec![
            words_cell(&test_set),
            exact_cell(&family.measure(&test_set)),
            exact_cell(&defect.lhs),
            exact_cell(&defect.rhs),
            correction,
            residual,
            defect.exact_match.to_string(),
        ]);
    }
    table.push_note(format!(
        "denominator {}",
        format_rational(family.denominator())
    ));
    Ok(table)
}

/// `kernel`: direction-kernel exponents, values, and harmonicity defects.
pub fn kernel(rank: u8, ray: &str, points: &str) -> Result<Table, CliFailure> {
    let ray = RaySpec::parse(rank, ray)?;
    let kernel_fn = MartinKernelFn::new(ray.clone());
    let mu = FinMeasure::uniform_generators(rank)?;
    let mut table = Table::new(
        "kernel",
        &[
            "point",
            "exponent",
            "value",
            "value_float",
            "harmonic_defect",
        ],
    );
    for g in args::parse_word_list(rank, points)? {
        let kv = kernel_value(&ray, &g);
        let value = kv.rational();
        let defect = left_convolve(&mu, &kernel_fn, &g)? - &value;
        table.push_row(vec![
            g.to_string(),
            kv.exponent.to_string(),
            exact_cell(&value),
            float_cell(&value),
            exact_cell(&defect),
        ]);
    }
    table.push_note(format!("ray {ray}"));
    Ok(table)
}

/// `lightness`: kernel mass of a set sphere by sphere — plain sums along a
/// ray, or ζ-averaged √-kernel sums with `expected`.
pub fn lightness(
    rank: u8,
    ray: Option<&str>,
    set: &str,
    r_max: usize,
    expected: bool,
) -> Result<Table, CliFailure> {
    let family = args::parse_set(rank, set)?;
    let mut table = Table::new(
        "lightness",
        &[
            "radius",
            "new_points",
            "increment",
            "cumulative",
            "cumulative_float",
        ],
    );
    if expected {
        if ray.is_some() {
            return Err(CliFailure::Usage(
                "expected mode averages over directions; drop --ray".to_string(),
            ));
        }
        let rows = expected_lightness_sum(rank, &family, r_max)?;
        for row in &rows.rows {
            let (increment, _) = sqrt_cells(&row.increment);
            let (cumulative, cumulative_float) = sqrt_cells(&row.cumulative);
            table.push_row(vec![
                row.radius.to_string(),
                row.new_points.to_string(),
                increment,
                cumulative,
                cumulative_float,
            ]);
        }
        table.push_note(format!("trend: {}", rows.trend()));
    } else {
        let ray_text = ray.ok_or_else(|| {
            CliFailure::Usage("plain mode needs --ray (or pass --expected)".to_string())
        })?;
        let ray = RaySpec::parse(rank, ray_text)?;
        let rows = lightness_partial_sums(&ray, &family, r_max);
        for row in &rows.rows {
            table.push_row(vec![
                row.radius.to_string(),
                row.new_points.to_string(),
                exact_cell(&row.increment),
                exact_cell(&row.cumulative),
                float_cell(&row.cumulative),
            ]);
        }
        table.push_note(format!("ray {ray}, trend: {}", rows.trend()));
    }
    table.push_note(format!("set size {}", family.len()));
    Ok(table)
}

/// `zeta-sample`: boundary directions drawn from the hitting measure,
/// reported with their cylinder masses.
pub fn zeta_sample(rank: u8, length: usize, seed: u64, count: usize) -> Result<Table, CliFailure> {
    let mut table = Table::new(
        "zeta-sample",
        &["index", "word", "cylinder_mass", "cylinder_mass_float"],
    );
    for index in 0..count {
        let g = sample_ray(rank, length, seed.wrapping_add(index as u64))?;
        let mass = hitting_cylinder(&g);
        table.push_row(vec![
            index.to_string(),
            g.to_string(),
            exact_cell(&mass),
            float_cell(&mass),
        ]);
    }
    table.push_note(format!(
        "each cylinder at depth {length} carries 1/{}",
        sphere_size(rank, length)
    ));
    Ok(table)
}

/// `growth`: per-sphere counts of a family and tail growth estimates.
pub fn growth(rank: u8, set: &str, r_max: usize) -> Result<Table, CliFailure> {
    let spec = SubsetSpec::parse(rank, set)?;
    let rates = growth_rates(&spec, r_max)?;
    let mut table = Table::new("growth", &["radius", "count"]);
    for (radius, count) in rates.radii.iter().zip(&rates.counts) {
        table.push_row(vec![radius.to_string(), count.to_string()]);
    }
    table.push_note(format!(
        "tail growth estimates: lower {} upper {}",
        rates.lower_estimate, rates.upper_estimate
    ));
    Ok(table)
}

/// `injectivity`: the sparse-family product experiment.
pub fn injectivity(
    rank: u8,
    tuple_len: usize,
    radius: usize,
    cap: usize,
) -> Result<Table, CliFailure> {
    let outcome = freewalk_core::psi_injectivity_test(rank, tuple_len, radius, cap)?;
    let mut table = Table::new(
        "injectivity",
        &[
            "tuple_len",
            "radius",
            "family_sizes",
            "products",
            "collisions",
            "additivity_failures",
            "passed",
        ],
    );
    let sizes: Vec<String> = outcome.family_sizes.iter().map(usize::to_string).collect();
    table.push_row(vec![
        outcome.tuple_len.to_string(),
        outcome.radius.to_string(),
        sizes.join("x"),
        outcome.products.to_string(),
        outcome.collisions.to_string(),
        outcome.additivity_failures.to_string(),
        outcome.passed().to_string(),
    ]);
    Ok(table)
}

/// `sphere-sum`: census √-kernel sums per sphere, their averages, and the
/// 4r·(2d−1)^(−r/2) bound.
pub fn sphere_sum(rank: u8, ray: &str, r_max: usize) -> Result<Table, CliFailure> {
    let ray = RaySpec::parse(rank, ray)?;
    let mut table = Table::new(
        "sphere-sum",
        &[
            "radius",
            "census_sum",
            "census_sum_float",
            "average_float",
            "within_4r_bound",
        ],
    );
    for radius in 0..=r_max {
        let census = sphere_sqrt_sum(rank, radius, &ray)?;
        let average = expected_sqrt_kernel(rank, &ray.word_prefix(radius))?;
        let within = if radius == 0 {
            "-".to_string()
        } else {
            let bound =
                SqrtPowerSum::from_half_power(rank, -(radius as i64), rat_int(4 * radius as i64));
            (average.cmp_value(&bound) != std::cmp::Ordering::Greater).to_string()
        };
        let (census_text, census_float) = sqrt_cells(&census);
        table.push_row(vec![
            radius.to_string(),
            census_text,
            census_float,
            format!("{}", average.to_f64()),
            within,
        ]);
    }
    table.push_note(format!("ray {ray}"));
    Ok(table)
}

/// `verify-all`: run the checklist (or one item), report one line each.
/// Returns the table and whether every executed item passed.
pub fn verify_all(only: Option<&str>) -> Result<(Table, bool), CliFailure> {
    let mut table = Table::new("verify-all", &["check", "status", "elapsed_ms", "detail"]);
    let mut all_passed = true;
    let items = checks::all();
    let selected: Vec<_> = match only {
        Some(label) => {
            let found: Vec<_> = items.into_iter().filter(|(l, _)| *l == label).collect();
            if found.is_empty() {
                return Err(CliFailure::Usage(format!("no check named {label:?}")));
            }
            found
        }
        None => items,
    };
    for (label, item) in selected {
        match item() {
            Ok(outcome) => {
                let status = if outcome.passed { "PASS" } else { "FAIL" };
                all_passed &= outcome.passed;
                table.push_row(vec![
                    label.to_string(),
                    status.to_string(),
                    outcome.elapsed_ms.to_string(),
                    outcome.detail,
                ]);
            }
            Err(failure) => {
                all_passed = false;
                table.push_row(vec![
                    label.to_string(),
                    "ERROR".to_string(),
                    "0".to_string(),
                    failure.to_string(),
                ]);
            }
        }
    }
    Ok((table, all_passed))
}
