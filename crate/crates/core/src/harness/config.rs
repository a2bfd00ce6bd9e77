//! Flat `key = value` simulation configs.
//!
//! ```text
//! # comments and blank lines are ignored
//! s = 2
//! scenarios = 15:5, 15:10, 20:8      # t:N pairs
//! rules = wdr, comp
//! weights = all                        # or a list such as 1, 2, 4..6
//! thresholds = all
//! repeats = 1000
//! master_seed = 2024
//! method = auto                        # exact | mc | auto
//! trials = 1000
//! exact_limit = 2000
//! ```
//!
//! Instead of `scenarios`, `t` and `N` may be given as lists; every pair is
//! then simulated. `method = auto` scores a scenario exactly when
//! `C(t, s+1) <= exact_limit` and by Monte Carlo with `trials` samples
//! otherwise. Unknown or repeated keys are errors.

use std::collections::BTreeMap;

use super::{default_weights, Method, SearchConfig, DEFAULT_REPEATS};
use crate::combin::binomial;
use crate::error::{Error, Result};
use crate::evaluator::DEFAULT_CAP;
use crate::rule::RuleKind;

const KEYS: &[&str] = &[
    "s",
    "scenarios",
    "t",
    "N",
    "rules",
    "weights",
    "thresholds",
    "repeats",
    "master_seed",
    "method",
    "trials",
    "exact_limit",
    "cap",
];

/// A parsed config: the scenarios to run, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub scenarios: Vec<SearchConfig>,
}

struct Entry {
    line: usize,
    value: String,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn number<T: std::str::FromStr>(e: &Entry, what: &str) -> Result<T> {
    e.value.parse().map_err(|_| {
        err(
            e.line,
            format!("{what}: expected a non-negative integer, got {:?}", e.value),
        )
    })
}

fn items(e: &Entry) -> impl Iterator<Item = &str> {
    e.value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

// "1, 3, 5..8" -> [1, 3, 5, 6, 7, 8]
fn int_list(e: &Entry, what: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in items(e) {
        let bad = || err(e.line, format!("{what}: cannot read {item:?}"));
        if let Some((a, b)) = item.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(item.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(err(e.line, format!("{what}: empty list")));
    }
    Ok(out)
}

enum Candidates {
    All,
    List(Vec<usize>),
}

fn candidates(e: Option<&Entry>, what: &str) -> Result<Candidates> {
    match e {
        None => Ok(Candidates::All),
        Some(e) if e.value == "all" => Ok(Candidates::All),
        Some(e) => int_list(e, what).map(Candidates::List),
    }
}

pub fn parse_config(text: &str) -> Result<SimulationConfig> {
    let mut kv: BTreeMap<&str, Entry> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected key = value, got {content:?}")))?;
        let key = key.trim();
        let Some(&known) = KEYS.iter().find(|&&k| k == key) else {
            return Err(err(line, format!("unknown key {key:?}")));
        };
        if let Some(prev) = kv.get(known) {
            return Err(err(
                line,
                format!("{key:?} already set on line {}", prev.line),
            ));
        }
        kv.insert(
            known,
            Entry {
                line,
                value: value.trim().to_string(),
            },
        );
    }

    let required = |k: &str| {
        kv.get(k)
            .ok_or_else(|| Error::Input(format!("missing required key {k:?}")))
    };
    let s: usize = number(required("s")?, "s")?;
    let master_seed: u64 = number(required("master_seed")?, "master_seed")?;
    let repeats = kv
        .get("repeats")
        .map(|e| number(e, "repeats"))
        .transpose()?
        .unwrap_or(DEFAULT_REPEATS);
    let trials: usize = kv
        .get("trials")
        .map(|e| number(e, "trials"))
        .transpose()?
        .unwrap_or(1000);
    let exact_limit: u128 = kv
        .get("exact_limit")
        .map(|e| number(e, "exact_limit"))
        .transpose()?
        .unwrap_or(DEFAULT_CAP);
    let cap: u128 = kv
        .get("cap")
        .map(|e| number(e, "cap"))
        .transpose()?
        .unwrap_or(DEFAULT_CAP);

    let rules = match kv.get("rules") {
        None => vec![RuleKind::Wdr, RuleKind::Comp],
        Some(e) => items(e)
            .map(|r| r.parse().map_err(|x: Error| err(e.line, x.to_string())))
            .collect::<Result<Vec<RuleKind>>>()?,
    };
    if rules.is_empty() {
        return Err(err(kv["rules"].line, "rules: empty list"));
    }

    let pairs: Vec<(usize, usize)> = match (kv.get("scenarios"), kv.get("t"), kv.get("N")) {
        (Some(e), None, None) => items(e)
            .map(|p| {
                let bad = || err(e.line, format!("scenarios: expected t:N, got {p:?}"));
                let (t, n) = p.split_once(':').ok_or_else(bad)?;
                Ok((
                    t.trim().parse().map_err(|_| bad())?,
                    n.trim().parse().map_err(|_| bad())?,
                ))
            })
            .collect::<Result<_>>()?,
        (None, Some(t), Some(n)) => {
            let (ts, ns) = (int_list(t, "t")?, int_list(n, "N")?);
            ts.iter()
                .flat_map(|&t| ns.iter().map(move |&n| (t, n)))
                .collect()
        }
        (Some(e), _, _) => return Err(err(e.line, "give either scenarios or t and N, not both")),
        _ => return Err(Error::Input("missing scenarios (or t and N)".into())),
    };
    if pairs.is_empty() {
        return Err(Error::Input("no scenarios".into()));
    }

    let method_kind = kv
        .get("method")
        .map(|e| (e.line, e.value.as_str()))
        .unwrap_or((0, "exact"));
    let weights = candidates(kv.get("weights"), "weights")?;
    let thresholds = candidates(kv.get("thresholds"), "thresholds")?;

    let mut scenarios = Vec::new();
    for &(t, n) in &pairs {
        let method = match method_kind {
            (_, "exact") => Method::Exact,
            (_, "mc") => Method::MonteCarlo { trials },
            (_, "auto") if binomial(t, s + 1) <= exact_limit => Method::Exact,
            (_, "auto") => Method::MonteCarlo { trials },
            (line, other) => {
                return Err(err(
                    line,
                    format!("method: expected exact, mc or auto, got {other:?}"),
                ))
            }
        };
        for &rule in &rules {
            let mut c = SearchConfig::new(s, t, n, rule, master_seed);
            c.repeats = repeats;
            c.method = method;
            c.cap = cap;
            c.weights = match &weights {
                Candidates::All => default_weights(n),
                Candidates::List(v) => v.clone(),
            };
            if rule == RuleKind::Wdr {
                if let Candidates::List(v) = &thresholds {
                    c.thresholds = v.clone();
                }
            }
            c.validate()?;
            scenarios.push(c);
        }
    }
    Ok(SimulationConfig { scenarios })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let text = "\
# demo
s = 2
scenarios = 15:5, 100:14
rules = wdr, comp
weights = 1..3, 5
repeats = 10
master_seed = 99   # trailing comment
method = auto
trials = 500
exact_limit = 2000
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.scenarios.len(), 4);
        let first = &cfg.scenarios[0];
        assert_eq!(
            (first.n_items, first.n_tests, first.rule),
            (15, 5, RuleKind::Wdr)
        );
        assert_eq!(first.weights, vec![1, 2, 3, 5]);
        assert_eq!(first.thresholds, (0..=5).collect::<Vec<_>>());
        assert_eq!(first.method, Method::Exact);
        assert_eq!(first.repeats, 10);
        assert_eq!(first.master_seed, 99);
        assert_eq!(cfg.scenarios[1].rule, RuleKind::Comp);
        assert!(cfg.scenarios[1].thresholds.is_empty());
        // C(100, 3) = 161700 > 2000
        assert_eq!(cfg.scenarios[2].method, Method::MonteCarlo { trials: 500 });
    }

    #[test]
    fn defaults_and_products() {
        let cfg =
            parse_config("s = 2\nt = 10, 12\nN = 4, 6\nmaster_seed = 1\nrules = comp\n").unwrap();
        let got: Vec<(usize, usize)> = cfg
            .scenarios
            .iter()
            .map(|c| (c.n_items, c.n_tests))
            .collect();
        assert_eq!(got, vec![(10, 4), (10, 6), (12, 4), (12, 6)]);
        assert!(cfg
            .scenarios
            .iter()
            .all(|c| c.repeats == DEFAULT_REPEATS && c.method == Method::Exact));
        assert_eq!(cfg.scenarios[0].weights, vec![1, 2, 3]);
    }

    #[test]
    fn rejects_unknown_and_repeated_keys() {
        let e = parse_config("s = 2\nmaster_seed = 1\nscenarios = 10:4\nrepeat = 5\n").unwrap_err();
        assert_eq!(e, err(4, "unknown key \"repeat\""));
        let e = parse_config("s = 2\ns = 3\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn rejects_malformed_values() {
        let base = "s = 2\nmaster_seed = 1\n";
        for (extra, line) in [
            ("scenarios = 10-4\n", 3),
            ("scenarios = 10:4\nmethod = fast\n", 4),
            ("scenarios = 10:4\nweights = 3..1\n", 4),
            ("scenarios = 10:4\nrules = bogus\n", 4),
            ("scenarios = 10:4\nrepeats = -1\n", 4),
            ("no equals sign\n", 3),
        ] {
            match parse_config(&format!("{base}{extra}")) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{extra}"),
                other => panic!("{extra}: {other:?}"),
            }
        }
        assert!(matches!(
            parse_config("s = 2\nscenarios = 10:4\n"),
            Err(Error::Input(_))
        ));
        assert!(parse_config(&format!("{base}scenarios = 10:4\nweights = 0\n")).is_err());
    }
}
