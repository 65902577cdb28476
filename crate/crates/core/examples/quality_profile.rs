//! Quality performance profiles for two methods over a handful of
//! instances, against best-known values and lower bounds.

use std::collections::BTreeMap;

use rko::experiments::{best_known, quality_profile, write_profile_csv, Reference, ResultTable};

fn main() -> rko::Result<()> {
    let rows = [
        ("i1", 120.0, 118.0, 110.0),
        ("i2", 95.0, 97.0, 90.0),
        ("i3", 210.0, 210.0, 210.0),
        ("i4", 60.0, 75.0, 48.0),
    ];
    let mut results = ResultTable::new();
    let mut lbs = BTreeMap::new();
    for (id, a, b, lb) in rows {
        let row = results.entry(id.to_string()).or_default();
        row.insert("method-a".to_string(), a);
        row.insert("method-b".to_string(), b);
        lbs.insert(id.to_string(), lb);
    }
    let refs: BTreeMap<String, Reference> = best_known(&results)
        .into_iter()
        .map(|(id, best)| {
            let lb = lbs[&id];
            (id, Reference { best, lb })
        })
        .collect();

    let rec = quality_profile(&results, &refs, &[1.0, 1.05, 1.1, 1.25, 1.5])?;
    for f in &rec.factors {
        eprintln!("{} {}: q_best {:.4} q_lb {:.4}", f.instance, f.method, f.q_best, f.q_lb);
    }
    write_profile_csv(&rec, std::io::stdout())?;
    Ok(())
}
