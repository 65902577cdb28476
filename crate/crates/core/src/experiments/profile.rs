use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RkoError};

/// Per-instance reference values for quality profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub best: f64,
    pub lb: f64,
}

/// `results[instance][method]` holds the best objective value of a method.
pub type ResultTable = BTreeMap<String, BTreeMap<String, f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityFactor {
    pub instance: String,
    pub method: String,
    pub value: f64,
    pub q_best: f64,
    pub q_lb: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileMeasure {
    Best,
    Lb,
}

impl ProfileMeasure {
    fn as_str(self) -> &'static str {
        match self {
            ProfileMeasure::Best => "best",
            ProfileMeasure::Lb => "lb",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub method: String,
    pub measure: ProfileMeasure,
    pub tau: f64,
    pub rho: f64,
    pub covered: usize,
    pub instances: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub factors: Vec<QualityFactor>,
    pub points: Vec<ProfilePoint>,
}

/// Best value over all methods on each instance.
pub fn best_known(results: &ResultTable) -> BTreeMap<String, f64> {
    results
        .iter()
        .filter_map(|(inst, by_method)| {
            by_method
                .values()
                .copied()
                .reduce(f64::min)
                .map(|b| (inst.clone(), b))
        })
        .collect()
}

/// Computes `q_best = z / z_best` and `q_lb = 1 + (z - lb) / lb` for every
/// (instance, method) pair and the cumulative fractions
/// `rho(tau) = |{p : q_p <= tau}| / |P|` at each requested `tau`.
///
/// A method with no result on an instance counts as never covered.
pub fn quality_profile(
    results: &ResultTable,
    references: &BTreeMap<String, Reference>,
    taus: &[f64],
) -> Result<ProfileRecord> {
    let missing: Vec<String> = results
        .keys()
        .filter(|k| !references.contains_key(*k))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(RkoError::MissingReference(missing));
    }
    if results.is_empty() {
        return Err(RkoError::config("profile needs at least one instance"));
    }
    let mut methods: Vec<String> = results
        .values()
        .flat_map(|m| m.keys().cloned())
        .collect();
    methods.sort();
    methods.dedup();

    let mut factors = Vec::new();
    for (inst, by_method) in results {
        let r = references[inst];
        if !(r.best > 0.0 && r.lb > 0.0) {
            return Err(RkoError::config(format!(
                "instance `{inst}`: quality factors need positive references (best {}, lb {})",
                r.best, r.lb
            )));
        }
        for (method, &z) in by_method {
            factors.push(QualityFactor {
                instance: inst.clone(),
                method: method.clone(),
                value: z,
                q_best: z / r.best,
                q_lb: 1.0 + (z - r.lb) / r.lb,
            });
        }
    }

    let total = results.len();
    let mut taus = taus.to_vec();
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    let mut points = Vec::new();
    for method in &methods {
        for measure in [ProfileMeasure::Best, ProfileMeasure::Lb] {
            let mut qs: Vec<f64> = factors
                .iter()
                .filter(|f| &f.method == method)
                .map(|f| match measure {
                    ProfileMeasure::Best => f.q_best,
                    ProfileMeasure::Lb => f.q_lb,
                })
                .collect();
            qs.sort_by(f64::total_cmp);
            for &tau in &taus {
                let covered = qs.partition_point(|&q| q <= tau);
                points.push(ProfilePoint {
                    method: method.clone(),
                    measure,
                    tau,
                    rho: covered as f64 / total as f64,
                    covered,
                    instances: total,
                });
            }
        }
    }
    Ok(ProfileRecord { factors, points })
}

pub const PROFILE_HEADER: [&str; 6] = ["method", "measure", "tau", "rho", "covered", "instances"];

pub fn write_profile_csv<W: std::io::Write>(record: &ProfileRecord, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PROFILE_HEADER)?;
    for p in &record.points {
        w.write_record([
            p.method.clone(),
            p.measure.as_str().to_string(),
            super::fmt6(p.tau),
            super::fmt6(p.rho),
            p.covered.to_string(),
            p.instances.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `instance,method,value` rows.
pub fn read_results_csv<R: std::io::Read>(input: R) -> Result<ResultTable> {
    let mut rd = csv::Reader::from_reader(input);
    let mut table = ResultTable::new();
    for (i, row) in rd.records().enumerate() {
        let row = row?;
        let line = i + 2;
        if row.len() != 3 {
            return Err(RkoError::Parse {
                line,
                message: format!("expected 3 fields, found {}", row.len()),
            });
        }
        let value = parse_field(&row[2], line)?;
        table
            .entry(row[0].to_string())
            .or_default()
            .insert(row[1].to_string(), value);
    }
    Ok(table)
}

/// Reads `instance,best,lb` rows.
pub fn read_references_csv<R: std::io::Read>(input: R) -> Result<BTreeMap<String, Reference>> {
    let mut rd = csv::Reader::from_reader(input);
    let mut refs = BTreeMap::new();
    for (i, row) in rd.records().enumerate() {
        let row = row?;
        let line = i + 2;
        if row.len() != 3 {
            return Err(RkoError::Parse {
                line,
                message: format!("expected 3 fields, found {}", row.len()),
            });
        }
        refs.insert(
            row[0].to_string(),
            Reference {
                best: parse_field(&row[1], line)?,
                lb: parse_field(&row[2], line)?,
            },
        );
    }
    Ok(refs)
}

fn parse_field(s: &str, line: usize) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|e| RkoError::Parse {
        line,
        message: format!("`{s}`: {e}"),
    })
}
