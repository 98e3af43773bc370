//! Experiment configuration in a flat `key = value` text form.
//!
//! ```text
//! # comment
//! strategy = random
//! n_targets = 25,50,100
//! samples = 10000
//! seed = 7
//! ```
//!
//! Lists are comma separated; an empty value means "unset" for optional keys.
//! Unknown and repeated keys are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use pedigree_core::Node;

use crate::error::PedError;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Alice's strategy spec, `name[:param]`.
    pub strategy: String,
    /// Times at which statistics are taken.
    pub n_targets: Vec<Node>,
    pub samples: u64,
    pub seed: u64,
    /// Targets at which full connectivity is also recorded per game.
    pub checkpoints: Vec<Node>,
    /// Games run at least this far; `Y` beyond the largest target counts
    /// towards the late-isolation tally.
    pub y_horizon: Option<Node>,
    /// Isolations at or after this time are "late".
    pub tail_from: Option<Node>,
    pub degree_checks: bool,
    /// Fraction of rounds (with `n <= attachment_max_n`) checked by full
    /// Alice×Bob enumeration.
    pub attachment_rate: f64,
    pub attachment_max_n: Node,
    /// Fraction of rounds (with `n <= transition_max_n`) whose exact
    /// transition table is checked.
    pub transition_rate: f64,
    pub transition_max_n: Node,
    /// Fraction of rounds whose common-edge set is recomputed from scratch.
    pub common_check_rate: f64,
    pub epsilon: f64,
    pub n0: Node,
    pub n1: Node,
    pub a: f64,
    pub delta: f64,
    pub out_csv: Option<String>,
    pub out_json: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let epsilon: f64 = 0.004;
        ExperimentConfig {
            strategy: "random".into(),
            n_targets: vec![100],
            samples: 1000,
            seed: 1,
            checkpoints: vec![100],
            y_horizon: None,
            tail_from: None,
            degree_checks: true,
            attachment_rate: 0.0,
            attachment_max_n: 40,
            transition_rate: 0.0,
            transition_max_n: 60,
            common_check_rate: 0.001,
            epsilon,
            n0: 900,
            n1: 1800,
            a: 10.0 * (2.0 / epsilon).ln(),
            delta: 1.0 / 42.0,
            out_csv: None,
            out_json: None,
        }
    }
}

const KEYS: [&str; 21] = [
    "strategy",
    "n_targets",
    "samples",
    "seed",
    "checkpoints",
    "y_horizon",
    "tail_from",
    "degree_checks",
    "attachment_rate",
    "attachment_max_n",
    "transition_rate",
    "transition_max_n",
    "common_check_rate",
    "epsilon",
    "n0",
    "n1",
    "a",
    "delta",
    "out_csv",
    "out_json",
    "version",
];

const VERSION: &str = "1";

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn parse_one<T: FromStr>(key: &str, v: &str) -> Result<T, PedError> {
    v.parse().map_err(|_| PedError::Config(format!("{key}: cannot parse `{v}`")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, PedError> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|x| parse_one(key, x.trim())).collect()
}

fn parse_opt<T: FromStr>(key: &str, v: &str) -> Result<Option<T>, PedError> {
    if v.is_empty() {
        Ok(None)
    } else {
        parse_one(key, v).map(Some)
    }
}

impl ExperimentConfig {
    /// Largest time any game reaches.
    pub fn horizon(&self) -> Node {
        let target = self.n_targets.iter().copied().max().unwrap_or(4);
        target.max(self.y_horizon.unwrap_or(0))
    }

    pub fn validate(&self) -> Result<(), PedError> {
        let bad = |m: &str| Err(PedError::Config(m.to_string()));
        if self.samples == 0 {
            return bad("samples must be >= 1");
        }
        if self.n_targets.is_empty() {
            return bad("n_targets is empty");
        }
        if self.n_targets.iter().any(|&n| n < 4) {
            return bad("every n target must be >= 4");
        }
        if let Some(c) = self.checkpoints.iter().find(|c| !self.n_targets.contains(c)) {
            return Err(PedError::Config(format!("checkpoint {c} is not an n target")));
        }
        for (k, r) in [
            ("attachment_rate", self.attachment_rate),
            ("transition_rate", self.transition_rate),
            ("common_check_rate", self.common_check_rate),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return Err(PedError::Config(format!("{k} must lie in [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("version", VERSION.into());
        put("strategy", self.strategy.clone());
        put("n_targets", join(&self.n_targets));
        put("samples", self.samples.to_string());
        put("seed", self.seed.to_string());
        put("checkpoints", join(&self.checkpoints));
        put("y_horizon", opt(&self.y_horizon));
        put("tail_from", opt(&self.tail_from));
        put("degree_checks", self.degree_checks.to_string());
        put("attachment_rate", self.attachment_rate.to_string());
        put("attachment_max_n", self.attachment_max_n.to_string());
        put("transition_rate", self.transition_rate.to_string());
        put("transition_max_n", self.transition_max_n.to_string());
        put("common_check_rate", self.common_check_rate.to_string());
        put("epsilon", self.epsilon.to_string());
        put("n0", self.n0.to_string());
        put("n1", self.n1.to_string());
        put("a", self.a.to_string());
        put("delta", self.delta.to_string());
        put("out_csv", opt(&self.out_csv));
        put("out_json", opt(&self.out_json));
        out
    }
}

impl FromStr for ExperimentConfig {
    type Err = PedError;

    /// Keys not present keep their defaults.
    fn from_str(text: &str) -> Result<Self, PedError> {
        let mut seen: BTreeMap<String, String> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| PedError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(PedError::Config(format!("line {}: unknown key `{k}`", lineno + 1)));
            }
            if seen.insert(k.to_string(), v.to_string()).is_some() {
                return Err(PedError::Config(format!("line {}: repeated key `{k}`", lineno + 1)));
            }
        }
        let mut c = ExperimentConfig::default();
        for (k, v) in &seen {
            let (k, v) = (k.as_str(), v.as_str());
            match k {
                "version" if v != VERSION => return Err(PedError::Config(format!("unsupported version `{v}`"))),
                "version" => {}
                "strategy" => c.strategy = v.to_string(),
                "n_targets" => c.n_targets = parse_list(k, v)?,
                "samples" => c.samples = parse_one(k, v)?,
                "seed" => c.seed = parse_one(k, v)?,
                "checkpoints" => c.checkpoints = parse_list(k, v)?,
                "y_horizon" => c.y_horizon = parse_opt(k, v)?,
                "tail_from" => c.tail_from = parse_opt(k, v)?,
                "degree_checks" => c.degree_checks = parse_one(k, v)?,
                "attachment_rate" => c.attachment_rate = parse_one(k, v)?,
                "attachment_max_n" => c.attachment_max_n = parse_one(k, v)?,
                "transition_rate" => c.transition_rate = parse_one(k, v)?,
                "transition_max_n" => c.transition_max_n = parse_one(k, v)?,
                "common_check_rate" => c.common_check_rate = parse_one(k, v)?,
                "epsilon" => c.epsilon = parse_one(k, v)?,
                "n0" => c.n0 = parse_one(k, v)?,
                "n1" => c.n1 = parse_one(k, v)?,
                "a" => c.a = parse_one(k, v)?,
                "delta" => c.delta = parse_one(k, v)?,
                "out_csv" => c.out_csv = parse_opt(k, v)?,
                "out_json" => c.out_json = parse_opt(k, v)?,
                _ => unreachable!("key list checked above"),
            }
        }
        if !seen.contains_key("checkpoints") && seen.contains_key("n_targets") {
            c.checkpoints = c.n_targets.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::default();
        assert_eq!(c.to_text().parse::<ExperimentConfig>().unwrap(), c);
    }

    #[test]
    fn rejects_bad_input() {
        assert!("bogus = 1".parse::<ExperimentConfig>().is_err());
        assert!("seed = 1\nseed = 2".parse::<ExperimentConfig>().is_err());
        assert!("samples = 0".parse::<ExperimentConfig>().is_err());
        assert!("n_targets = 50\ncheckpoints = 60".parse::<ExperimentConfig>().is_err());
        assert!("transition_rate = 2".parse::<ExperimentConfig>().is_err());
        assert!("no equals sign".parse::<ExperimentConfig>().is_err());
    }

    #[test]
    fn checkpoints_follow_targets() {
        let c: ExperimentConfig = "n_targets = 25, 50\n# note\n".parse().unwrap();
        assert_eq!(c.checkpoints, [25, 50]);
        assert_eq!(c.horizon(), 50);
    }

    proptest! {
        #[test]
        fn arbitrary_round_trip(
            targets in proptest::collection::vec(4u32..5000, 1..6),
            samples in 1u64..1_000_000,
            seed in any::<u64>(),
            rate in 0.0f64..=1.0,
            eps in 1e-6f64..1.0,
            horizon in proptest::option::of(4u32..10_000),
            strategy in "[a-z-]{1,12}(:[a-z-]{1,8})?",
            out in proptest::option::of("[a-z/._]{1,20}"),
        ) {
            let c = ExperimentConfig {
                strategy,
                checkpoints: targets[..1].to_vec(),
                n_targets: targets,
                samples,
                seed,
                y_horizon: horizon,
                tail_from: horizon,
                transition_rate: rate,
                attachment_rate: rate / 2.0,
                epsilon: eps,
                a: 10.0 * (2.0 / eps).ln(),
                out_csv: out.clone(),
                out_json: out,
                ..ExperimentConfig::default()
            };
            let back: ExperimentConfig = c.to_text().parse().unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
