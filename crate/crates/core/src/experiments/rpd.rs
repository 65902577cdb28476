use serde::{Deserialize, Serialize};

use crate::error::{Result, RkoError};

/// Relative percentage deviation of `ofv` from the reference `ub`, oriented so
/// that positive values are worse than the reference for minimization,
/// whatever the sign of `ub`.
pub fn rpd(ofv: f64, ub: f64) -> Result<f64> {
    check_reference(ub)?;
    Ok((ofv - ub) / ub.abs() * 100.0)
}

/// The textbook ratio form `(ofv / ub - 1) * 100`. It agrees with [`rpd`] for
/// positive references and flips sign for negative ones.
pub fn rpd_raw(ofv: f64, ub: f64) -> Result<f64> {
    check_reference(ub)?;
    Ok((ofv / ub - 1.0) * 100.0)
}

fn check_reference(ub: f64) -> Result<()> {
    if ub == 0.0 || !ub.is_finite() {
        return Err(RkoError::config(format!(
            "reference upper bound must be finite and nonzero, got {ub}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpdRecord {
    pub instance_id: String,
    pub reference_ub: f64,
    pub best_ofv: f64,
    pub rpd_best: f64,
    pub rpd_avg: f64,
    pub rpd_best_raw: f64,
    pub rpd_avg_raw: f64,
    pub time_to_best_avg: f64,
    pub runs: usize,
}

/// Summarizes the runs of one instance against a reference value.
pub fn rpd_record(
    instance_id: &str,
    reference_ub: f64,
    ofvs: &[f64],
    times_to_best: &[f64],
) -> Result<RpdRecord> {
    if ofvs.is_empty() {
        return Err(RkoError::config(format!("instance `{instance_id}` has no runs")));
    }
    if !times_to_best.is_empty() && times_to_best.len() != ofvs.len() {
        return Err(RkoError::DimensionMismatch {
            expected: ofvs.len(),
            found: times_to_best.len(),
        });
    }
    check_reference(reference_ub)?;
    let best_ofv = ofvs.iter().copied().fold(f64::INFINITY, f64::min);
    let n = ofvs.len() as f64;
    let mut sum = 0.0;
    let mut sum_raw = 0.0;
    for &v in ofvs {
        sum += rpd(v, reference_ub)?;
        sum_raw += rpd_raw(v, reference_ub)?;
    }
    let time_to_best_avg = if times_to_best.is_empty() {
        0.0
    } else {
        times_to_best.iter().sum::<f64>() / n
    };
    Ok(RpdRecord {
        instance_id: instance_id.to_string(),
        reference_ub,
        best_ofv,
        rpd_best: rpd(best_ofv, reference_ub)?,
        rpd_avg: sum / n,
        rpd_best_raw: rpd_raw(best_ofv, reference_ub)?,
        rpd_avg_raw: sum_raw / n,
        time_to_best_avg,
        runs: ofvs.len(),
    })
}

pub const RPD_HEADER: [&str; 9] = [
    "instance",
    "reference_ub",
    "best_ofv",
    "rpd_best",
    "rpd_avg",
    "rpd_best_raw",
    "rpd_avg_raw",
    "time_to_best_avg",
    "runs",
];

pub fn write_rpd_csv<W: std::io::Write>(records: &[RpdRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RPD_HEADER)?;
    for r in records {
        w.write_record([
            r.instance_id.clone(),
            super::fmt6(r.reference_ub),
            super::fmt6(r.best_ofv),
            super::fmt6(r.rpd_best),
            super::fmt6(r.rpd_avg),
            super::fmt6(r.rpd_best_raw),
            super::fmt6(r.rpd_avg_raw),
            super::fmt6(r.time_to_best_avg),
            r.runs.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_values_give_zero() {
        assert_eq!(rpd(-0.00465, -0.00465).unwrap(), 0.0);
        assert_eq!(rpd_raw(1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn positive_reference_matches_ratio_form() {
        assert!((rpd(1.05, 1.0).unwrap() - 5.0).abs() < 1e-10);
        assert!((rpd_raw(1.05, 1.0).unwrap() - 5.0).abs() < 1e-10);
    }

    #[test]
    fn negative_reference_sign() {
        let oriented = rpd(-0.00465, -0.00466).unwrap();
        let raw = rpd_raw(-0.00465, -0.00466).unwrap();
        let expected = 0.01 / 4.66 * 100.0;
        assert!((oriented - expected).abs() < 1e-10);
        assert!((raw + expected).abs() < 1e-10);
    }

    #[test]
    fn zero_reference_rejected() {
        assert!(rpd(1.0, 0.0).is_err());
        assert!(rpd_record("x", 0.0, &[1.0], &[]).is_err());
    }

    #[test]
    fn record_best_dominates_average() {
        let r = rpd_record("p", -2.0, &[-2.0, -1.0, -1.5], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.best_ofv, -2.0);
        assert_eq!(r.rpd_best, 0.0);
        assert!((r.rpd_avg - 25.0).abs() < 1e-10);
        assert!(r.rpd_best <= r.rpd_avg);
        assert!((r.time_to_best_avg - 2.0).abs() < 1e-12);
    }
}
