#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]
//! Exact arithmetic for nearest-neighbour random walks on the free group F_d.
//!
//! Everything here is computed in arbitrary-precision rationals: reduced words
//! and their sphere/ball enumeration ([`word`]), finitely supported measures
//! with exact convolution powers ([`measure`]), Green functions in truncated
//! and closed form ([`green`]), finitely additive stationary measures with
//! exact stationarity-defect identities ([`stationary`]), boundary kernels and
//! hitting-measure experiments ([`martin`]), and the subset families used for
//! growth and injectivity checks ([`sets`]).
//!
//! The crate is `no_std` + `alloc`; IO, serialization and the command line
//! live in the companion `freewalk-cli` crate.
//!
//! ```
//! use freewalk_core::{GreenEvaluator, GreenModel, ReducedWord};
//!
//! let eval = GreenEvaluator::new(GreenModel::ClosedFormUniform { rank: 2 }).unwrap();
//! let g = ReducedWord::parse(2, "ab").unwrap();
//! assert_eq!(freewalk_core::rational::format_rational(&eval.value(&g)), "1/6");
//! ```

extern crate alloc;

pub mod green;
pub mod martin;
pub mod measure;
pub mod rational;
pub mod ray;
pub mod sets;
pub mod sqrt_sum;
pub mod stationary;
pub mod word;

pub use green::{
    EpsilonWitness, GammaBoundsReport, GreenError, GreenEvaluator, GreenModel, RadialWalk,
    TailDecomposition, TranslateStep, epsilon_witness, find_small_translate,
    tail_decomposition_check, verify_gamma_bounds,
};
pub use martin::{
    ExpectedLightnessTable, KernelValue, LightnessTable, MartinError, MartinKernelFn, Trend,
    expected_lightness_sum, expected_sqrt_kernel, hitting_cylinder, kernel_exponent, kernel_value,
    lightness_partial_sums, sample_ray, sphere_sqrt_sum,
};
pub use measure::{
    ConstantFn, FinMeasure, GroupFunction, Indicator, MeasureError, PowerTable, WindowFn,
    WindowedPower, harmonicity_defect, left_convolve, power, windowed_power,
};
pub use rational::{
    Rational, RationalParseError, format_rational, parse_rational, pow_int, rat, rat_int,
    rational_to_f64,
};
pub use ray::{RayError, RaySpec};
pub use sets::{
    GrowthReport, InjectivityReport, SetsError, SpecParseError, SubsetSpec, begins_ends_count,
    growth_rates, psi_injectivity_test, sigma_apply, sparse_block_family,
};
pub use sqrt_sum::SqrtPowerSum;
pub use stationary::{
    DefectReport, GreenTranslateMeasure, MkAverage, ScheduleRow, StationaryError, TruncationInfo,
    vanishing_defect_schedule,
};
pub use word::{Letter, ReducedWord, WordError, ball, ball_size, sphere, sphere_size};
