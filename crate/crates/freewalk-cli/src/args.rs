//! Textual argument forms shared by the subcommands.
//!
//! * words: `a`, `abA`, `e` (identity)
//! * word lists: comma-separated, `e,a,ab`
//! * step measures: `e=1/2,a=1/4,B=1/4` (must sum to 1)
//! * models: `closed` or `truncated:DEPTH`
//! * sets: a bare word list (`e,ab`) or a family spec, optionally
//!   materialized at a radius with `@RADIUS` — e.g. `explicit:e,a`,
//!   `sigma:e@8`, `aaa:a@6`, `ball@3`, `sphere@2`

use std::collections::BTreeSet;

use freewalk_core::{
    FinMeasure, GreenEvaluator, GreenModel, Rational, ReducedWord, SubsetSpec, ball,
    parse_rational, sphere,
};
use num_traits::One;

use crate::CliFailure;

pub fn parse_word(rank: u8, text: &str) -> Result<ReducedWord, CliFailure> {
    Ok(ReducedWord::parse(rank, text)?)
}

pub fn parse_word_list(rank: u8, text: &str) -> Result<Vec<ReducedWord>, CliFailure> {
    text.split(',').map(|part| parse_word(rank, part)).collect()
}

/// `SPEC[@RADIUS]`: a family spec materialized at the given radius.
/// Bare word lists (`e,ab`) and `explicit:` lists need no radius; every
/// other family requires one. The extra forms `ball@R` and `sphere@R` name
/// the full ball and sphere.
pub fn parse_set(rank: u8, text: &str) -> Result<BTreeSet<ReducedWord>, CliFailure> {
    let (spec_text, radius) = match text.rsplit_once('@') {
        Some((s, r)) => {
            let radius: usize = r.parse().map_err(|_| {
                CliFailure::Usage(format!("bad radius {r:?} in set argument {text:?}"))
            })?;
            (s, Some(radius))
        }
        None => (text, None),
    };
    let named_family =
        spec_text.contains(':') || matches!(spec_text, "sigma" | "palindromes" | "ball" | "sphere");
    match (spec_text, radius) {
        ("ball", Some(r)) => Ok(ball(rank, r)?.into_iter().collect()),
        ("sphere", Some(r)) => Ok(sphere(rank, r)?.into_iter().collect()),
        ("ball" | "sphere", None) => Err(CliFailure::Usage(format!(
            "{spec_text} needs a radius, e.g. {spec_text}@3"
        ))),
        _ if !named_family => {
            let words = parse_word_list(rank, spec_text)?;
            let keep = |g: &ReducedWord| radius.is_none_or(|r| g.len() <= r);
            Ok(words.into_iter().filter(keep).collect())
        }
        _ => {
            let spec = SubsetSpec::parse(rank, spec_text)?;
            match (radius, &spec) {
                (Some(r), _) => Ok(spec.materialize(r)?),
                (None, SubsetSpec::Explicit { words, .. }) => Ok(words.clone()),
                (None, _) => Err(CliFailure::Usage(format!(
                    "family {spec_text:?} needs a radius, e.g. {spec_text}@6"
                ))),
            }
        }
    }
}

/// Semicolon-separated list of set arguments.
pub fn parse_set_list(rank: u8, text: &str) -> Result<Vec<BTreeSet<ReducedWord>>, CliFailure> {
    text.split(';')
        .map(|part| parse_set(rank, part.trim()))
        .collect()
}

/// `w=p/q` comma list; must be a probability measure.
pub fn parse_step(rank: u8, text: &str) -> Result<FinMeasure, CliFailure> {
    let mut entries: Vec<(ReducedWord, Rational)> = Vec::new();
    for part in text.split(',') {
        let (word_text, mass_text) = part.split_once('=').ok_or_else(|| {
            CliFailure::Usage(format!("step entries look like w=p/q, got {part:?}"))
        })?;
        entries.push((
            parse_word(rank, word_text.trim())?,
            parse_rational(mass_text.trim())?,
        ));
    }
    let mu = FinMeasure::from_entries(rank, entries)?;
    if !mu.total_mass().is_one() {
        return Err(CliFailure::Usage(format!(
            "step measure must have total mass 1, got {}",
            freewalk_core::format_rational(&mu.total_mass())
        )));
    }
    Ok(mu)
}

/// `closed` or `truncated:DEPTH`, with an optional explicit step measure
/// (default: uniform on the generators). The closed model only exists for
/// the uniform step.
pub fn parse_model(rank: u8, text: &str, step: Option<&str>) -> Result<GreenEvaluator, CliFailure> {
    match text {
        "closed" => {
            if step.is_some() {
                return Err(CliFailure::Usage(
                    "the closed model fixes the uniform step; drop --step or use truncated:N"
                        .to_string(),
                ));
            }
            Ok(GreenEvaluator::new(GreenModel::ClosedFormUniform { rank })?)
        }
        _ => {
            let depth_text = text.strip_prefix("truncated:").ok_or_else(|| {
                CliFailure::Usage(format!(
                    "unknown model {text:?} (use closed or truncated:DEPTH)"
                ))
            })?;
            let depth: u32 = depth_text.parse().map_err(|_| {
                CliFailure::Usage(format!("bad depth {depth_text:?} in model {text:?}"))
            })?;
            let mu = match step {
                Some(s) => parse_step(rank, s)?,
                None => FinMeasure::uniform_generators(rank)?,
            };
            Ok(GreenEvaluator::new(GreenModel::TruncatedSeries {
                mu,
                depth,
            })?)
        }
    }
}
