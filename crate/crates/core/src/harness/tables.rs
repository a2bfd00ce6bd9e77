use std::io::{Read, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{best_matrix_search, Provenance, SearchConfig, SearchResult};
use crate::error::{Error, Result};
use crate::exponent::{comp_capacity, comp_exponent, wdr_crossover_rate, wdr_exponent};
use crate::rule::RuleKind;

/// One column of the exponent table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub s: usize,
    #[serde(rename = "E_wdr")]
    pub e_wdr: f64,
    pub tau_star: f64,
    #[serde(rename = "Q_star")]
    pub q_star: f64,
    #[serde(rename = "E_comp0")]
    pub e_comp0: f64,
    #[serde(rename = "C_comp")]
    pub c_comp: f64,
    #[serde(rename = "R_wdr")]
    pub r_wdr: f64,
}

pub fn table1_row(s: usize) -> Result<Table1Row> {
    let wdr = wdr_exponent(s)?;
    Ok(Table1Row {
        s,
        e_wdr: wdr.exponent,
        tau_star: wdr.tau_star,
        q_star: wdr.q_star,
        e_comp0: comp_exponent(s, 0.0)?.exponent,
        c_comp: comp_capacity(s)?,
        r_wdr: wdr_crossover_rate(s)?,
    })
}

/// Exponent table rows for each `s`, in the given order.
pub fn table1(s_list: &[usize]) -> Result<Vec<Table1Row>> {
    s_list.par_iter().map(|&s| table1_row(s)).collect()
}

/// One simulation row: the best design found for a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    #[serde(rename = "N")]
    pub n_tests: usize,
    pub t: usize,
    pub s: usize,
    pub rule: RuleKind,
    pub w: usize,
    /// The threshold for the weight rule, the size parameter for COMP.
    #[serde(rename = "T")]
    pub threshold: usize,
    pub err_h0: f64,
    pub err_h1: f64,
    pub eps: f64,
    pub method: String,
    /// Samples per hypothesis; empty for exact rows.
    pub trials: Option<usize>,
    pub master_seed: u64,
}

impl Table2Row {
    pub fn from_result(config: &SearchConfig, result: &SearchResult) -> Self {
        Self {
            n_tests: config.n_tests,
            t: config.n_items,
            s: config.s,
            rule: config.rule,
            w: result.best_w,
            threshold: result.best_threshold.unwrap_or(config.s),
            err_h0: result.errors.err_h0,
            err_h1: result.errors.err_h1,
            eps: result.eps,
            method: result.method.name().to_string(),
            trials: result.method.trials(),
            master_seed: config.master_seed,
        }
    }
}

/// Runs every scenario and returns one row per scenario, with the full
/// search results alongside.
pub fn table2(configs: &[SearchConfig]) -> Result<Vec<(Table2Row, SearchResult)>> {
    configs
        .iter()
        .map(|c| {
            let res = best_matrix_search(c)?;
            Ok((Table2Row::from_result(c, &res), res))
        })
        .collect()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Input(format!("csv: {e}"))
}

fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Input(format!("csv: {e}")))
}

fn read_csv<T: for<'de> Deserialize<'de>, R: Read>(input: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(csv_err))
        .collect()
}

/// Header `s,E_wdr,tau_star,Q_star,E_comp0,C_comp,R_wdr`; floats are written
/// in shortest round-trip form.
pub fn write_table1_csv<W: Write>(rows: &[Table1Row], out: W) -> Result<()> {
    write_csv(rows, out)
}

pub fn parse_table1_csv<R: Read>(input: R) -> Result<Vec<Table1Row>> {
    read_csv(input)
}

/// Header `N,t,s,rule,w,T,err_h0,err_h1,eps,method,trials,master_seed`.
pub fn write_table2_csv<W: Write>(rows: &[Table2Row], out: W) -> Result<()> {
    write_csv(rows, out)
}

pub fn parse_table2_csv<R: Read>(input: R) -> Result<Vec<Table2Row>> {
    read_csv(input)
}

/// Audit record written next to a simulation CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub scenarios: Vec<SearchConfig>,
    pub rows: Vec<Table2Row>,
    pub provenance: Vec<Provenance>,
}

impl RunManifest {
    pub fn new(configs: &[SearchConfig], results: &[(Table2Row, SearchResult)]) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            scenarios: configs.to_vec(),
            rows: results.iter().map(|(r, _)| r.clone()).collect(),
            provenance: results.iter().map(|(_, r)| r.provenance).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest fields are plain data")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_csv_round_trip() {
        let rows = vec![
            Table1Row {
                s: 2,
                e_wdr: 0.137_985_123_456_789,
                tau_star: 0.2065,
                q_star: 1.0 / 3.0,
                e_comp0: 0.3651,
                c_comp: 0.3832,
                r_wdr: 0.2271,
            },
            Table1Row {
                s: 3,
                e_wdr: 5.7e-2,
                tau_star: 0.1365,
                q_star: 0.0455,
                e_comp0: 0.2362,
                c_comp: 0.2455,
                r_wdr: 0.1792,
            },
        ];
        let mut buf = Vec::new();
        write_table1_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("s,E_wdr,tau_star,Q_star,E_comp0,C_comp,R_wdr\n"));
        assert_eq!(parse_table1_csv(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn table2_csv_round_trip() {
        let rows = vec![
            Table2Row {
                n_tests: 10,
                t: 15,
                s: 2,
                rule: RuleKind::Wdr,
                w: 1,
                threshold: 2,
                err_h0: 0.0,
                err_h1: 0.142_857_142_857_142_85,
                eps: 0.142_857_142_857_142_85,
                method: "exact".into(),
                trials: None,
                master_seed: u64::MAX,
            },
            Table2Row {
                n_tests: 14,
                t: 100,
                s: 2,
                rule: RuleKind::Comp,
                w: 5,
                threshold: 2,
                err_h0: 0.96,
                err_h1: 0.0,
                eps: 0.96,
                method: "mc".into(),
                trials: Some(1000),
                master_seed: 1,
            },
        ];
        let mut buf = Vec::new();
        write_table2_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("N,t,s,rule,w,T,err_h0,err_h1,eps,method,trials,master_seed\n"));
        assert!(text.contains(",exact,,18446744073709551615\n"));
        assert_eq!(parse_table2_csv(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn manifest_serializes() {
        let mut c = SearchConfig::new(2, 6, 4, RuleKind::Wdr, 3);
        c.repeats = 2;
        let results = table2(std::slice::from_ref(&c)).unwrap();
        let m = RunManifest::new(&[c], &results);
        let json = m.to_json();
        let back: RunManifest = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        assert!(json.contains("\"timestamp\""));
    }
}
