//! Named parameter sets shipped as JSON data files.

use std::path::Path;
use std::sync::Arc;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebraic::Alg;
use crate::cf::{perron_direction_exact, Algorithm};
use crate::error::{Error, Result};
use crate::scalar::parse_rational;
use crate::seed::Ball;
use crate::words::DirectiveSequence;

const BUILTIN: &[(&str, &str)] = &[
    ("brun-fig", include_str!("../presets/brun-fig.json")),
    ("cassaigne-c0c1", include_str!("../presets/cassaigne-c0c1.json")),
    ("cassaigne-random", include_str!("../presets/cassaigne-random.json")),
    ("fig-ex-rauzy", include_str!("../presets/fig-ex-rauzy.json")),
    ("fig-renormalization", include_str!("../presets/fig-renormalization.json")),
    ("sturmian-example", include_str!("../presets/sturmian-example.json")),
    ("sturmian-golden", include_str!("../presets/sturmian-golden.json")),
];

/// How the direction is given.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DirectionSpec {
    /// `"perron"`: the Perron eigendirection of the product over one period.
    Keyword(String),
    /// Exact decimals or fractions.
    Values(Vec<String>),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Raster {
    pub width: u32,
    pub height: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preset {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub algorithm: Algorithm,
    /// Substitution names, e.g. `"c0c1"`.
    pub directive: Option<String>,
    #[serde(default)]
    pub periodic: bool,
    pub direction: Option<DirectionSpec>,
    pub balls: Option<Vec<Ball>>,
    pub depth: Option<usize>,
    pub seed_letter: Option<u8>,
    pub threshold: Option<f64>,
    pub coder_depth: Option<usize>,
    pub steps: Option<usize>,
    pub rng_seed: Option<u64>,
    pub trials: Option<usize>,
    pub prefix_length: Option<usize>,
    pub n: Option<usize>,
    pub expected_directive: Option<String>,
    pub expected_translation: Option<Vec<String>>,
    pub expected_rows: Option<Vec<String>>,
    pub raster: Option<Raster>,
}

impl Preset {
    pub fn names() -> impl Iterator<Item = &'static str> {
        BUILTIN.iter().map(|(n, _)| *n)
    }

    pub fn builtin(name: &str) -> Result<Preset> {
        let (_, text) = BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::input(format!("unknown preset {name}; known: {}", Self::names().collect::<Vec<_>>().join(", "))))?;
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Preset> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// A builtin name or a path to a JSON file.
    pub fn load(spec: &str) -> Result<Preset> {
        if Self::names().any(|n| n == spec) {
            Self::builtin(spec)
        } else {
            Self::from_path(Path::new(spec))
        }
    }

    pub fn sequence(&self) -> Result<DirectiveSequence> {
        let d = self.directive.as_deref().ok_or_else(|| Error::input(format!("preset {} has no directive", self.name)))?;
        DirectiveSequence::parse(Arc::new(self.algorithm.substitutions()), d, self.periodic)
    }

    /// The direction as exact rationals, when given by values.
    pub fn direction_rational(&self) -> Result<Option<Vec<BigRational>>> {
        match &self.direction {
            Some(DirectionSpec::Values(v)) => Ok(Some(v.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?)),
            _ => Ok(None),
        }
    }

    /// The direction as an exact algebraic vector, when it is a Perron direction.
    pub fn direction_algebraic(&self) -> Result<Option<Vec<Alg>>> {
        match &self.direction {
            Some(DirectionSpec::Keyword(k)) if k == "perron" => {
                let seq = self.sequence()?;
                let period = match seq.tail() {
                    crate::words::Tail::Periodic(p) => p.len(),
                    crate::words::Tail::Unknown => seq.known_len().unwrap_or(0),
                };
                let m = seq.matrix_product(0, period)?;
                Ok(Some(perron_direction_exact(&m)?.1))
            }
            Some(DirectionSpec::Keyword(k)) => Err(Error::input(format!("unknown direction keyword {k}"))),
            _ => Ok(None),
        }
    }

    /// `trials` directive sequences of `length` substitutions drawn uniformly
    /// and independently from the set, from a ChaCha stream seeded with `rng_seed`.
    pub fn random_directives(&self, length: usize) -> Result<Vec<DirectiveSequence>> {
        let seed = self.rng_seed.ok_or_else(|| Error::input(format!("preset {} has no rng_seed", self.name)))?;
        let set = Arc::new(self.algorithm.substitutions());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..self.trials.unwrap_or(1))
            .map(|_| {
                let ids = (0..length).map(|_| rng.gen_range(0..set.len())).collect();
                DirectiveSequence::finite(set.clone(), ids)
            })
            .collect()
    }

    /// The direction in floating point, normalized to 1-norm one.
    pub fn direction_f64(&self) -> Result<Vec<f64>> {
        let v: Vec<f64> = if let Some(q) = self.direction_rational()? {
            q.iter().map(|x| num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)).collect()
        } else if let Some(a) = self.direction_algebraic()? {
            a.iter().map(Alg::to_f64).collect()
        } else {
            return Err(Error::input(format!("preset {} has no direction", self.name)));
        };
        let s: f64 = v.iter().sum();
        Ok(v.into_iter().map(|x| x / s).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtins_parse() {
        for name in Preset::names() {
            let p = Preset::builtin(name).unwrap();
            assert_eq!(p.name, name);
            if p.directive.is_some() {
                p.sequence().unwrap();
            }
            if p.direction.is_some() {
                let v = p.direction_f64().unwrap();
                assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_directives_are_reproducible() {
        let p = Preset::builtin("cassaigne-random").unwrap();
        let a = p.random_directives(50).unwrap();
        let b = p.random_directives(50).unwrap();
        assert_eq!(a.len(), 5);
        assert_eq!(a[3].ids(50).unwrap(), b[3].ids(50).unwrap());
        assert_ne!(a[0].ids(50).unwrap(), a[1].ids(50).unwrap());
    }

    #[test]
    fn unknown_preset() {
        assert!(Preset::builtin("nope").is_err());
    }
}
