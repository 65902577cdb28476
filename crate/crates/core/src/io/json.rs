//! JSON documents for TD-TSP, generic MIP and portfolio instances.
//!
//! Documents are validated field by field so that errors name the offending
//! path (`t[1][3]`, `A_sparse[4]`, ...).

use serde_json::{json, Map, Value};

use crate::error::{Result, RkoError};
use crate::mip::MipInstance;
use crate::portfolio::PortfolioInstance;
use crate::tdtsp::TdTspInstance;

pub const TDTSP_SCHEMA_VERSION: u64 = 1;
const MIP_SCHEMA_VERSION: u64 = 1;
const PORTFOLIO_SCHEMA_VERSION: u64 = 1;

fn err(path: &str, msg: impl Into<String>) -> RkoError {
    RkoError::schema(path, msg)
}

fn root(text: &str) -> Result<Map<String, Value>> {
    match serde_json::from_str::<Value>(text)? {
        Value::Object(m) => Ok(m),
        _ => Err(err("$", "document must be a JSON object")),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| err(key, "missing field"))
}

fn as_f64(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| err(path, "expected a finite number"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| err(path, "expected a non-negative integer"))
}

fn as_array<'a>(v: &'a Value, path: &str, len: Option<usize>) -> Result<&'a Vec<Value>> {
    let arr = v.as_array().ok_or_else(|| err(path, "expected an array"))?;
    if let Some(len) = len {
        if arr.len() != len {
            return Err(err(path, format!("expected {len} entries, found {}", arr.len())));
        }
    }
    Ok(arr)
}

fn vector(v: &Value, path: &str, len: Option<usize>) -> Result<Vec<f64>> {
    as_array(v, path, len)?
        .iter()
        .enumerate()
        .map(|(i, x)| as_f64(x, &format!("{path}[{i}]")))
        .collect()
}

fn matrix(v: &Value, path: &str, rows: Option<usize>, cols: usize) -> Result<Vec<Vec<f64>>> {
    as_array(v, path, rows)?
        .iter()
        .enumerate()
        .map(|(i, r)| vector(r, &format!("{path}[{i}]"), Some(cols)))
        .collect()
}

fn check_version(obj: &Map<String, Value>, expected: u64) -> Result<()> {
    let v = field(obj, "version")?
        .as_u64()
        .ok_or_else(|| err("version", "expected an integer"))?;
    if v != expected {
        return Err(err("version", format!("unsupported version {v}, expected {expected}")));
    }
    Ok(())
}

/// Parses a TD-TSP document
/// `{version, n, H, Tbar, s: [n+2], t: [H x (n+2) x (n+2)], seed?}`.
pub fn parse_tdtsp(text: &str) -> Result<TdTspInstance> {
    parse_tdtsp_with_warnings(text).map(|(inst, _)| inst)
}

/// Like [`parse_tdtsp`], also returning non-fatal findings such as a
/// terminal node that does not copy the depot.
pub fn parse_tdtsp_with_warnings(text: &str) -> Result<(TdTspInstance, Vec<String>)> {
    let obj = root(text)?;
    check_version(&obj, TDTSP_SCHEMA_VERSION)?;
    let n = as_usize(field(&obj, "n")?, "n")?;
    if n == 0 {
        return Err(err("n", "need at least one customer"));
    }
    let h = as_usize(field(&obj, "H")?, "H")?;
    if h == 0 {
        return Err(err("H", "need at least one interval"));
    }
    let tbar = as_f64(field(&obj, "Tbar")?, "Tbar")?;
    if tbar <= 0.0 {
        return Err(err("Tbar", "interval length must be positive"));
    }
    let nodes = n + 2;
    let s = vector(field(&obj, "s")?, "s", Some(nodes))?;
    if s[0] != 0.0 || s[n + 1] != 0.0 {
        return Err(err("s", "depot and terminal service times must be 0"));
    }
    if let Some(i) = (1..=n).find(|&i| s[i] <= 0.0) {
        return Err(err(&format!("s[{i}]"), "customer service time must be positive"));
    }
    let t_val = field(&obj, "t")?;
    let t: Vec<Vec<Vec<f64>>> = as_array(t_val, "t", Some(h))?
        .iter()
        .enumerate()
        .map(|(k, m)| matrix(m, &format!("t[{k}]"), Some(nodes), nodes))
        .collect::<Result<_>>()?;
    for (k, m) in t.iter().enumerate() {
        for (i, row) in m.iter().enumerate() {
            if let Some(j) = row.iter().position(|x| *x < 0.0) {
                return Err(err(&format!("t[{k}][{i}][{j}]"), "travel time must be non-negative"));
            }
        }
    }
    let seed = match obj.get("seed") {
        None | Some(Value::Null) => None,
        Some(v) => Some(v.as_u64().ok_or_else(|| err("seed", "expected an integer"))?),
    };
    let inst = TdTspInstance::new(n, h, tbar, s, t)?.with_seed(seed);
    let warnings = inst.depot_copy_mismatches();
    Ok((inst, warnings))
}

pub fn write_tdtsp(inst: &TdTspInstance) -> String {
    let mut doc = json!({
        "version": TDTSP_SCHEMA_VERSION,
        "n": inst.n(),
        "H": inst.intervals(),
        "Tbar": inst.tbar(),
        "s": inst.service(),
        "t": inst.travel(),
    });
    if let Some(seed) = inst.seed() {
        doc["seed"] = json!(seed);
    }
    serde_json::to_string_pretty(&doc).expect("instance serialises")
}

/// Parses a generic MIP document `{version, n, m, p, c, l, u, b, A}` where the
/// matrix is given either dense as `A` (m rows of n) or as `A_sparse`
/// triplets `[row, col, value]` (0-based).
pub fn parse_mip(text: &str) -> Result<MipInstance> {
    let obj = root(text)?;
    check_version(&obj, MIP_SCHEMA_VERSION)?;
    let n = as_usize(field(&obj, "n")?, "n")?;
    let m = as_usize(field(&obj, "m")?, "m")?;
    let p = as_usize(field(&obj, "p")?, "p")?;
    if n == 0 || m == 0 {
        return Err(err("n", "need n >= 1 and m >= 1"));
    }
    if p > n {
        return Err(err("p", format!("{p} integer variables but n = {n}")));
    }
    let c = vector(field(&obj, "c")?, "c", Some(n))?;
    let l = vector(field(&obj, "l")?, "l", Some(n))?;
    let u = vector(field(&obj, "u")?, "u", Some(n))?;
    let b = vector(field(&obj, "b")?, "b", Some(m))?;
    if let Some(i) = (0..n).find(|&i| l[i] > u[i]) {
        return Err(err(&format!("l[{i}]"), "lower bound exceeds upper bound"));
    }
    if let Some(i) = (0..p).find(|&i| l[i].fract() != 0.0 || u[i].fract() != 0.0) {
        return Err(err(&format!("l[{i}]"), "integer variable needs integer bounds"));
    }
    match (obj.get("A"), obj.get("A_sparse")) {
        (Some(a), None) => {
            let a = matrix(a, "A", Some(m), n)?;
            MipInstance::new(c, a, b, l, u, p)
        }
        (None, Some(sp)) => {
            let triplets = as_array(sp, "A_sparse", None)?
                .iter()
                .enumerate()
                .map(|(k, t)| {
                    let path = format!("A_sparse[{k}]");
                    let t = as_array(t, &path, Some(3))?;
                    let r = as_usize(&t[0], &format!("{path}[0]"))?;
                    let j = as_usize(&t[1], &format!("{path}[1]"))?;
                    let v = as_f64(&t[2], &format!("{path}[2]"))?;
                    if r >= m || j >= n {
                        return Err(err(&path, format!("position ({r}, {j}) outside {m}x{n}")));
                    }
                    Ok((r, j, v))
                })
                .collect::<Result<Vec<_>>>()?;
            MipInstance::from_triplets(c, m, &triplets, b, l, u, p)
        }
        (Some(_), Some(_)) => Err(err("A", "give either `A` or `A_sparse`, not both")),
        (None, None) => Err(err("A", "missing field (or `A_sparse`)")),
    }
}

pub fn write_mip(inst: &MipInstance) -> String {
    let doc = json!({
        "version": MIP_SCHEMA_VERSION,
        "n": inst.num_vars(),
        "m": inst.num_rows(),
        "p": inst.num_integers(),
        "c": inst.c(),
        "l": inst.lower(),
        "u": inst.upper(),
        "b": inst.b(),
        "A": inst.dense_a(),
    });
    serde_json::to_string_pretty(&doc).expect("instance serialises")
}

fn bounds(v: &Value, path: &str, n: usize) -> Result<Vec<f64>> {
    if v.is_number() {
        Ok(vec![as_f64(v, path)?; n])
    } else {
        vector(v, path, Some(n))
    }
}

/// Parses `{version, mu, sigma, lambda, k, lower, upper}`; the bounds may be a
/// single number applied to every asset.
pub fn parse_portfolio(text: &str) -> Result<PortfolioInstance> {
    let obj = root(text)?;
    check_version(&obj, PORTFOLIO_SCHEMA_VERSION)?;
    let mu = vector(field(&obj, "mu")?, "mu", None)?;
    let n = mu.len();
    if n == 0 {
        return Err(err("mu", "need at least one asset"));
    }
    let sigma = matrix(field(&obj, "sigma")?, "sigma", Some(n), n)?;
    let lambda = as_f64(field(&obj, "lambda")?, "lambda")?;
    let k = as_usize(field(&obj, "k")?, "k")?;
    let lower = bounds(field(&obj, "lower")?, "lower", n)?;
    let upper = bounds(field(&obj, "upper")?, "upper", n)?;
    PortfolioInstance::new(mu, sigma, lambda, k, lower, upper)
}

pub fn write_portfolio(inst: &PortfolioInstance) -> String {
    let doc = json!({
        "version": PORTFOLIO_SCHEMA_VERSION,
        "mu": inst.mu(),
        "sigma": inst.sigma(),
        "lambda": inst.lambda(),
        "k": inst.k(),
        "lower": inst.lower(),
        "upper": inst.upper(),
    });
    serde_json::to_string_pretty(&doc).expect("instance serialises")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema_path(e: RkoError) -> String {
        match e {
            RkoError::Schema { path, .. } => path,
            other => panic!("expected a schema error, got {other:?}"),
        }
    }

    #[test]
    fn tdtsp_round_trip() {
        let inst = TdTspInstance::generate(5, 3, 11).unwrap();
        let text = write_tdtsp(&inst);
        assert_eq!(parse_tdtsp(&text).unwrap(), inst);
    }

    #[test]
    fn tdtsp_matrix_count_mismatch_names_field() {
        let inst = TdTspInstance::generate(3, 2, 1).unwrap();
        let mut doc: Value = serde_json::from_str(&write_tdtsp(&inst)).unwrap();
        doc["H"] = json!(3);
        let e = parse_tdtsp(&doc.to_string()).unwrap_err();
        assert_eq!(schema_path(e), "t");
    }

    #[test]
    fn tdtsp_negative_time_names_entry() {
        let inst = TdTspInstance::generate(3, 2, 1).unwrap();
        let mut doc: Value = serde_json::from_str(&write_tdtsp(&inst)).unwrap();
        doc["t"][1][2][3] = json!(-4.0);
        let e = parse_tdtsp(&doc.to_string()).unwrap_err();
        assert_eq!(schema_path(e), "t[1][2][3]");
    }

    #[test]
    fn tdtsp_depot_copy_warning() {
        let inst = TdTspInstance::generate(3, 1, 1).unwrap();
        let mut doc: Value = serde_json::from_str(&write_tdtsp(&inst)).unwrap();
        doc["t"][0][4][1] = json!(99.0);
        let (_, warnings) = parse_tdtsp_with_warnings(&doc.to_string()).unwrap();
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn tdtsp_rejects_bad_documents() {
        assert!(parse_tdtsp("[1, 2]").is_err());
        assert!(parse_tdtsp("{").is_err());
        assert_eq!(schema_path(parse_tdtsp("{}").unwrap_err()), "version");
        let e = parse_tdtsp(r#"{"version": 7}"#).unwrap_err();
        assert_eq!(schema_path(e), "version");
    }

    #[test]
    fn mip_dense_and_sparse_agree() {
        let dense = r#"{"version":1,"n":2,"m":1,"p":1,"c":[1,2],"l":[0,0],"u":[3,1],"b":[4],
                        "A":[[1,2]]}"#;
        let sparse = r#"{"version":1,"n":2,"m":1,"p":1,"c":[1,2],"l":[0,0],"u":[3,1],"b":[4],
                         "A_sparse":[[0,1,2],[0,0,1]]}"#;
        assert_eq!(parse_mip(dense).unwrap(), parse_mip(sparse).unwrap());
        let inst = parse_mip(dense).unwrap();
        assert_eq!(parse_mip(&write_mip(&inst)).unwrap(), inst);
    }

    #[test]
    fn mip_errors_name_fields() {
        let bad_row = r#"{"version":1,"n":2,"m":1,"p":0,"c":[1,2],"l":[0,0],"u":[1,1],"b":[4],
                         "A":[[1]]}"#;
        assert_eq!(schema_path(parse_mip(bad_row).unwrap_err()), "A[0]");
        let bad_trip = r#"{"version":1,"n":2,"m":1,"p":0,"c":[1,2],"l":[0,0],"u":[1,1],"b":[4],
                          "A_sparse":[[0,5,1]]}"#;
        assert_eq!(schema_path(parse_mip(bad_trip).unwrap_err()), "A_sparse[0]");
    }

    #[test]
    fn portfolio_round_trip_and_scalar_bounds() {
        let text = r#"{"version":1,"mu":[0.1,0.2,0.05],"sigma":[[1,0,0],[0,1,0],[0,0,1]],
                       "lambda":0.3,"k":2,"lower":0.1,"upper":0.9}"#;
        let inst = parse_portfolio(text).unwrap();
        assert_eq!(inst.lower(), &[0.1; 3]);
        assert_eq!(parse_portfolio(&write_portfolio(&inst)).unwrap(), inst);
        let bad = text.replace("[0,0,1]]", "[0,0]]");
        assert_eq!(schema_path(parse_portfolio(&bad).unwrap_err()), "sigma[2]");
    }
}
