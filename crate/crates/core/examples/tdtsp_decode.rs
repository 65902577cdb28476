//! Decodes a route on the six-customer instance, verifies it against the
//! full constraint set and compares with exhaustive enumeration.

use rko::tdtsp::{brute_force_tdtsp, check_tdtsp, lower_bound_l, six_customer_example, TdTspDecoder};

fn main() -> rko::Result<()> {
    let inst = six_customer_example();
    let decoder = TdTspDecoder::new(inst.clone());
    let sol = decoder.decode(&[0.81, 0.32, 0.54, 0.29, 0.15, 0.91]);

    println!("visit order {:?}", sol.permutation);
    for &(i, j, h) in &sol.arcs {
        println!("  {i} -> {j} in interval {h}, arrive {}", sol.a[j]);
    }
    println!("travel time {} penalized {}", sol.cost, sol.penalized);

    let check = check_tdtsp(&inst, &sol);
    println!("all constraint families hold: {}", check.all_pass());

    let best = brute_force_tdtsp(&inst)?;
    println!(
        "lower bound {}, optimum {} via {:?} ({} orders)",
        lower_bound_l(&inst),
        best.cost,
        best.permutation,
        best.evaluated
    );
    Ok(())
}
