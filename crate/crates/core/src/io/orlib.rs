//! OR-Library portfolio files.
//!
//! Layout: the asset count on the first line, then one `mean stddev` line per
//! asset, then `i j correlation` lines (1-based) covering every pair `i <= j`.

use crate::error::{Result, RkoError};

#[derive(Debug, Clone, PartialEq)]
pub struct OrLibPortfolio {
    pub mu: Vec<f64>,
    pub stddev: Vec<f64>,
    pub sigma: Vec<Vec<f64>>,
}

fn parse_err(line: usize, message: impl Into<String>) -> RkoError {
    RkoError::Parse {
        line,
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot read {what} from `{tok}`")))
}

pub fn parse_orlib_portfolio(text: &str) -> Result<OrLibPortfolio> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let last_line = text.lines().count().max(1);

    let (line, first) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file"))?;
    let n: usize = number(first, line, "the asset count")?;
    if n == 0 {
        return Err(parse_err(line, "asset count must be positive"));
    }

    let mut mu = Vec::with_capacity(n);
    let mut stddev = Vec::with_capacity(n);
    for k in 0..n {
        let (line, l) = lines
            .next()
            .ok_or_else(|| parse_err(last_line, format!("file ends before asset {}", k + 1)))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(line, "expected `mean stddev`"));
        }
        let m: f64 = number(toks[0], line, "a mean return")?;
        let s: f64 = number(toks[1], line, "a standard deviation")?;
        if !m.is_finite() || !(s >= 0.0 && s.is_finite()) {
            return Err(parse_err(line, "mean must be finite and stddev non-negative"));
        }
        mu.push(m);
        stddev.push(s);
    }

    let mut corr: Vec<Vec<Option<f64>>> = vec![vec![None; n]; n];
    for (line, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(line, "expected `i j correlation`"));
        }
        let i: usize = number(toks[0], line, "an asset index")?;
        let j: usize = number(toks[1], line, "an asset index")?;
        let c: f64 = number(toks[2], line, "a correlation")?;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(parse_err(line, format!("asset pair ({i}, {j}) outside 1..={n}")));
        }
        if !(-1.0..=1.0).contains(&c) {
            return Err(parse_err(line, format!("correlation {c} outside [-1, 1]")));
        }
        if i == j && c != 1.0 {
            return Err(parse_err(line, format!("diagonal correlation of asset {i} is {c}, not 1")));
        }
        let (a, b) = (i.min(j) - 1, i.max(j) - 1);
        if corr[a][b].is_some() {
            return Err(parse_err(line, format!("pair ({i}, {j}) given twice")));
        }
        corr[a][b] = Some(c);
    }

    let mut sigma = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a..n {
            let c = corr[a][b].ok_or_else(|| {
                parse_err(
                    last_line,
                    format!("missing correlation for pair ({}, {})", a + 1, b + 1),
                )
            })?;
            let v = c * stddev[a] * stddev[b];
            sigma[a][b] = v;
            sigma[b][a] = v;
        }
    }
    Ok(OrLibPortfolio { mu, stddev, sigma })
}

/// Writes returns, deviations and an upper-triangle correlation matrix in the
/// OR-Library layout.
pub fn format_orlib_portfolio(mu: &[f64], stddev: &[f64], corr: &[Vec<f64>]) -> String {
    let n = mu.len();
    let mut out = format!("{n}\n");
    for (m, s) in mu.iter().zip(stddev) {
        out.push_str(&format!("{m:e} {s:e}\n"));
    }
    for i in 0..n {
        for j in i..n {
            out.push_str(&format!("{} {} {:e}\n", i + 1, j + 1, corr[i][j]));
        }
    }
    out
}
