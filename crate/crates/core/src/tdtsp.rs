//! Time-dependent TSP over a discretised planning horizon.
//!
//! Nodes are numbered `0` (depot), `1..=n` (customers) and `n + 1` (a copy of
//! the depot that ends the route). The horizon `[0, H * Tbar)` is split into
//! `H` intervals of length `Tbar`; the travel time of an arc depends on the
//! interval in which the vehicle departs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decoder::Decoder;
use crate::error::{Result, RkoError};

/// Multiplier applied to `H * Tbar` when a route overruns the horizon.
pub const HORIZON_PENALTY: f64 = 1e3;
pub const CHECK_TOLERANCE: f64 = 1e-9;
/// Largest customer count the permutation oracle accepts.
pub const ORACLE_MAX_CUSTOMERS: usize = 10;
pub const GENERATED_HORIZON: f64 = 54_000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdTspInstance {
    n: usize,
    intervals: usize,
    tbar: f64,
    service: Vec<f64>,
    /// `travel[h][i][j]`.
    travel: Vec<Vec<Vec<f64>>>,
    seed: Option<u64>,
}

impl TdTspInstance {
    pub fn new(
        n: usize,
        intervals: usize,
        tbar: f64,
        service: Vec<f64>,
        travel: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(RkoError::instance("TD-TSP needs at least one customer"));
        }
        if intervals == 0 || !(tbar > 0.0 && tbar.is_finite()) {
            return Err(RkoError::instance("horizon must have H >= 1 intervals of positive length"));
        }
        let nodes = n + 2;
        if service.len() != nodes {
            return Err(RkoError::instance(format!(
                "service times: expected {nodes} entries, found {}",
                service.len()
            )));
        }
        if service[0] != 0.0 || service[n + 1] != 0.0 {
            return Err(RkoError::instance("depot and terminal service times must be 0"));
        }
        if let Some(i) = (1..=n).find(|&i| !(service[i] > 0.0 && service[i].is_finite())) {
            return Err(RkoError::instance(format!(
                "customer {i} has non-positive service time {}",
                service[i]
            )));
        }
        if travel.len() != intervals {
            return Err(RkoError::instance(format!(
                "expected {intervals} travel-time matrices, found {}",
                travel.len()
            )));
        }
        for (h, m) in travel.iter().enumerate() {
            if m.len() != nodes || m.iter().any(|r| r.len() != nodes) {
                return Err(RkoError::instance(format!(
                    "travel-time matrix {h} must be {nodes}x{nodes}"
                )));
            }
            for (i, row) in m.iter().enumerate() {
                if let Some(j) = row.iter().position(|t| !(*t >= 0.0 && t.is_finite())) {
                    return Err(RkoError::instance(format!(
                        "travel time t[{i}][{j}][{h}] = {} is not a non-negative number",
                        row[j]
                    )));
                }
            }
        }
        Ok(Self {
            n,
            intervals,
            tbar,
            service,
            travel,
            seed: None,
        })
    }

    /// Synthetic instance: integer service times from the size band, integer
    /// travel times uniform in `1..=12`, a 54 000 s horizon, and the terminal
    /// copying the depot.
    pub fn generate(n: usize, intervals: usize, seed: u64) -> Result<Self> {
        if n == 0 || intervals == 0 {
            return Err(RkoError::config("generator needs n >= 1 and H >= 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes = n + 2;
        let (lo, hi) = service_band(n);
        let mut service = vec![0.0; nodes];
        for s in &mut service[1..=n] {
            *s = rng.gen_range(lo..=hi) as f64;
        }
        let mut travel = vec![vec![vec![0.0; nodes]; nodes]; intervals];
        for m in &mut travel {
            for i in 0..=n {
                for j in 0..=n {
                    if i != j {
                        m[i][j] = rng.gen_range(1..=12) as f64;
                    }
                }
            }
            for j in 0..nodes {
                m[n + 1][j] = m[0][j];
            }
            for i in 0..nodes {
                m[i][n + 1] = m[i][0];
            }
            m[0][n + 1] = 0.0;
            m[n + 1][0] = 0.0;
            m[n + 1][n + 1] = 0.0;
        }
        let mut inst = Self::new(n, intervals, GENERATED_HORIZON / intervals as f64, service, travel)?;
        inst.seed = Some(seed);
        Ok(inst)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn tbar(&self) -> f64 {
        self.tbar
    }

    pub fn horizon(&self) -> f64 {
        self.tbar * self.intervals as f64
    }

    pub fn service(&self) -> &[f64] {
        &self.service
    }

    /// Matrices indexed `[h][i][j]`.
    pub fn travel(&self) -> &[Vec<Vec<f64>>] {
        &self.travel
    }

    pub fn t(&self, i: usize, j: usize, h: usize) -> f64 {
        self.travel[h][i][j]
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    /// Positions where the terminal's row or column differs from the depot's.
    pub fn depot_copy_mismatches(&self) -> Vec<String> {
        let last = self.n + 1;
        let mut out = Vec::new();
        for (h, m) in self.travel.iter().enumerate() {
            for j in 1..=self.n {
                if m[last][j] != m[0][j] {
                    out.push(format!("t[{last}][{j}][{h}] != t[0][{j}][{h}]"));
                }
                if m[j][last] != m[j][0] {
                    out.push(format!("t[{j}][{last}][{h}] != t[{j}][0][{h}]"));
                }
            }
        }
        out
    }

    fn interval_of(&self, time: f64) -> usize {
        (time / self.tbar).floor() as usize
    }
}

/// Service-time band used by the generator for `n` customers.
pub fn service_band(n: usize) -> (u32, u32) {
    match n {
        0..=14 => (1800, 2700),
        15..=24 => (900, 1500),
        25..=54 => (360, 600),
        55..=84 => (180, 360),
        _ => (120, 240),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdTspSolution {
    /// Customers in visiting order.
    pub permutation: Vec<usize>,
    /// Traversed arcs `(i, j, h)`.
    pub arcs: Vec<(usize, usize, usize)>,
    /// Non-zero-pattern flows `(i, j, y_ij)`, both directions of every arc.
    pub flows: Vec<(usize, usize, f64)>,
    /// Departure time per node (arrival time for the terminal).
    pub a: Vec<f64>,
    pub travel_time: f64,
    pub cost: f64,
    pub penalized: bool,
}

/// Customers sorted by key, ties broken by the smaller customer index.
pub fn permutation_from_keys(keys: &[f64]) -> Vec<usize> {
    let mut v: Vec<usize> = (1..=keys.len()).collect();
    v.sort_by(|&x, &y| keys[x - 1].total_cmp(&keys[y - 1]).then(x.cmp(&y)));
    v
}

struct Simulation {
    travel: f64,
    a_terminal: f64,
}

#[derive(Debug, Clone)]
pub struct TdTspDecoder {
    instance: TdTspInstance,
}

impl TdTspDecoder {
    pub fn new(instance: TdTspInstance) -> Self {
        Self { instance }
    }

    pub fn instance(&self) -> &TdTspInstance {
        &self.instance
    }

    fn simulate<F>(&self, perm: &[usize], mut visit: F) -> Simulation
    where
        F: FnMut(usize, usize, usize, f64),
    {
        let inst = &self.instance;
        let last = inst.n + 1;
        let mut current = 0;
        let mut time = 0.0;
        let mut travel = 0.0;
        for &next in perm.iter().chain(std::iter::once(&last)) {
            let h = inst.interval_of(time).min(inst.intervals - 1);
            let t = inst.travel[h][current][next];
            travel += t;
            time += t + inst.service[next];
            visit(current, next, h, time);
            current = next;
        }
        Simulation {
            travel,
            a_terminal: time,
        }
    }

    fn total_cost(&self, sim: &Simulation) -> (f64, bool) {
        let horizon = self.instance.horizon();
        let penalized = sim.a_terminal >= horizon;
        let cost = if penalized {
            sim.travel + horizon * HORIZON_PENALTY
        } else {
            sim.travel
        };
        (cost, penalized)
    }

    /// Cost of visiting customers in the given order.
    pub fn route_cost(&self, perm: &[usize]) -> f64 {
        let sim = self.simulate(perm, |_, _, _, _| {});
        self.total_cost(&sim).0
    }

    pub fn decode(&self, keys: &[f64]) -> TdTspSolution {
        self.decode_permutation(permutation_from_keys(keys))
    }

    pub fn decode_permutation(&self, permutation: Vec<usize>) -> TdTspSolution {
        let n = self.instance.n;
        let mut a = vec![0.0; n + 2];
        let mut arcs = Vec::with_capacity(n + 1);
        let mut flows = Vec::with_capacity(2 * (n + 1));
        let mut flow = n;
        let sim = self.simulate(&permutation, |i, j, h, time| {
            arcs.push((i, j, h));
            flows.push((i, j, flow as f64));
            flows.push((j, i, (n - flow) as f64));
            flow = flow.saturating_sub(1);
            a[j] = time;
        });
        let (cost, penalized) = self.total_cost(&sim);
        TdTspSolution {
            permutation,
            arcs,
            flows,
            a,
            travel_time: sim.travel,
            cost,
            penalized,
        }
    }
}

impl Decoder for TdTspDecoder {
    fn dimension(&self) -> usize {
        self.instance.n
    }

    fn cost(&self, keys: &[f64]) -> f64 {
        self.route_cost(&permutation_from_keys(keys))
    }
}

/// Travel time lower bound: cheapest first departure from the depot plus
/// the cheapest outgoing arc of every customer over all intervals.
pub fn lower_bound_l(instance: &TdTspInstance) -> f64 {
    let n = instance.n;
    let first = (1..=n)
        .map(|j| instance.t(0, j, 0))
        .fold(f64::INFINITY, f64::min);
    let rest: f64 = (1..=n)
        .map(|i| {
            (1..=n + 1)
                .filter(|&j| j != i)
                .flat_map(|j| (0..instance.intervals).map(move |h| (j, h)))
                .map(|(j, h)| instance.t(i, j, h))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    first + rest
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdTspOracle {
    pub cost: f64,
    pub permutation: Vec<usize>,
    pub evaluated: u64,
}

/// Scans every visiting order.
pub fn brute_force_tdtsp(instance: &TdTspInstance) -> Result<TdTspOracle> {
    let n = instance.n;
    if n > ORACLE_MAX_CUSTOMERS {
        return Err(RkoError::GuardExceeded {
            what: "TD-TSP permutation enumeration".into(),
            estimate: (1..=n).map(|k| k as f64).product(),
            limit: (1..=ORACLE_MAX_CUSTOMERS).map(|k| k as f64).product(),
        });
    }
    let decoder = TdTspDecoder::new(instance.clone());
    let mut perm: Vec<usize> = (1..=n).collect();
    let mut best = (decoder.route_cost(&perm), perm.clone());
    let mut evaluated = 1u64;
    while next_permutation(&mut perm) {
        evaluated += 1;
        let c = decoder.route_cost(&perm);
        if c < best.0 {
            best = (c, perm.clone());
        }
    }
    Ok(TdTspOracle {
        cost: best.0,
        permutation: best.1,
        evaluated,
    })
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConstraintFamily {
    /// No arc enters the depot.
    DepotEntry,
    /// No arc leaves the terminal.
    TerminalExit,
    /// Exactly one depot departure, in the first interval.
    DepotDeparture,
    /// Every customer is left and entered once; the terminal is entered once.
    Degree,
    /// Net inflow of 2 at every customer.
    FlowBalance,
    /// Flows at depot and terminal.
    FlowBoundary,
    /// `y_ij + y_ji = n * sum_h (x_ij^h + x_ji^h)`.
    FlowLinking,
    /// Departure from the depot at time zero.
    DepotTime,
    /// Big-M propagation of departure times along arcs.
    TimePropagation,
    /// Each customer departs inside the interval of its outgoing arc.
    IntervalIdentification,
    /// The route ends strictly before the horizon.
    Horizon,
    /// Variable domains and arc-set membership.
    Domains,
}

impl ConstraintFamily {
    pub const ALL: [ConstraintFamily; 12] = [
        ConstraintFamily::DepotEntry,
        ConstraintFamily::TerminalExit,
        ConstraintFamily::DepotDeparture,
        ConstraintFamily::Degree,
        ConstraintFamily::FlowBalance,
        ConstraintFamily::FlowBoundary,
        ConstraintFamily::FlowLinking,
        ConstraintFamily::DepotTime,
        ConstraintFamily::TimePropagation,
        ConstraintFamily::IntervalIdentification,
        ConstraintFamily::Horizon,
        ConstraintFamily::Domains,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyResult {
    pub family: ConstraintFamily,
    pub passed: bool,
    /// First violation found, if any.
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdTspCheck {
    pub families: Vec<FamilyResult>,
}

impl TdTspCheck {
    pub fn passes(&self, family: ConstraintFamily) -> bool {
        self.families
            .iter()
            .find(|f| f.family == family)
            .is_some_and(|f| f.passed)
    }

    pub fn all_pass(&self) -> bool {
        self.families.iter().all(|f| f.passed)
    }

    pub fn failed(&self) -> Vec<ConstraintFamily> {
        self.families
            .iter()
            .filter(|f| !f.passed)
            .map(|f| f.family)
            .collect()
    }
}

/// Verifies the MILP assignment carried by `sol` family by family. The
/// strict upper inequality of interval identification is checked exactly;
/// every other comparison allows [`CHECK_TOLERANCE`].
pub fn check_tdtsp(instance: &TdTspInstance, sol: &TdTspSolution) -> TdTspCheck {
    let n = instance.n;
    let nodes = n + 2;
    let last = n + 1;
    let hcount = instance.intervals;
    let tol = CHECK_TOLERANCE;
    let mut out = Vec::with_capacity(ConstraintFamily::ALL.len());
    let mut record = |family, detail: Option<String>| {
        out.push(FamilyResult {
            family,
            passed: detail.is_none(),
            detail,
        })
    };

    let in_arc_set = |i: usize, j: usize| {
        i < nodes && j < nodes && i != j && (i, j) != (0, last) && (i, j) != (last, 0)
    };
    let domain_issue = sol
        .arcs
        .iter()
        .enumerate()
        .find_map(|(k, &(i, j, h))| {
            if !in_arc_set(i, j) || h >= hcount {
                Some(format!("x[{i}][{j}][{h}] is not a model variable"))
            } else if sol.arcs[..k].contains(&(i, j, h)) {
                Some(format!("x[{i}][{j}][{h}] listed twice"))
            } else {
                None
            }
        })
        .or_else(|| {
            sol.flows.iter().find_map(|&(i, j, y)| {
                if !in_arc_set(i, j) {
                    Some(format!("y[{i}][{j}] is not a model variable"))
                } else if !(y >= -tol) {
                    Some(format!("y[{i}][{j}] = {y} is negative"))
                } else {
                    None
                }
            })
        })
        .or_else(|| {
            if sol.a.len() != nodes {
                Some(format!("a has {} entries, expected {nodes}", sol.a.len()))
            } else {
                sol.a
                    .iter()
                    .position(|v| !(*v >= -tol))
                    .map(|i| format!("a[{i}] = {} is negative", sol.a[i]))
            }
        });
    let well_formed = domain_issue.is_none();
    // dense views, valid only when well formed
    let mut x = vec![vec![vec![false; hcount]; nodes]; nodes];
    let mut y = vec![vec![0.0; nodes]; nodes];
    if well_formed {
        for &(i, j, h) in &sol.arcs {
            x[i][j][h] = true;
        }
        for &(i, j, v) in &sol.flows {
            y[i][j] += v;
        }
    }
    let used = |i: usize, j: usize| x[i][j].iter().filter(|b| **b).count();

    let skip = || Some("solution is not well formed".to_string());

    record(
        ConstraintFamily::DepotEntry,
        if !well_formed {
            skip()
        } else {
            (1..=n)
                .find(|&i| used(i, 0) > 0)
                .map(|i| format!("arc ({i}, 0) enters the depot"))
        },
    );
    record(
        ConstraintFamily::TerminalExit,
        if !well_formed {
            skip()
        } else {
            (1..=n)
                .find(|&j| used(last, j) > 0)
                .map(|j| format!("arc ({last}, {j}) leaves the terminal"))
        },
    );
    record(
        ConstraintFamily::DepotDeparture,
        if !well_formed {
            skip()
        } else {
            let first: usize = (1..=n).filter(|&j| x[0][j][0]).count();
            let later: usize = (1..=n).map(|j| x[0][j][1..].iter().filter(|b| **b).count()).sum();
            if first != 1 {
                Some(format!("{first} depot departures in interval 0"))
            } else if later != 0 {
                Some(format!("{later} depot departures after interval 0"))
            } else {
                None
            }
        },
    );
    record(
        ConstraintFamily::Degree,
        if !well_formed {
            skip()
        } else {
            (1..=n)
                .find_map(|i| {
                    let outgoing: usize = (1..nodes).filter(|&j| j != i).map(|j| used(i, j)).sum();
                    let incoming: usize = (0..=n).filter(|&k| k != i).map(|k| used(k, i)).sum();
                    if outgoing != 1 {
                        Some(format!("customer {i} is left {outgoing} times"))
                    } else if incoming != 1 {
                        Some(format!("customer {i} is entered {incoming} times"))
                    } else {
                        None
                    }
                })
                .or_else(|| {
                    let ends: usize = (1..=n).map(|i| used(i, last)).sum();
                    (ends != 1).then(|| format!("terminal entered {ends} times"))
                })
        },
    );
    record(
        ConstraintFamily::FlowBalance,
        if !well_formed {
            skip()
        } else {
            (1..=n).find_map(|i| {
                let net: f64 = (0..nodes).filter(|&j| j != i).map(|j| y[j][i] - y[i][j]).sum();
                ((net - 2.0).abs() > tol).then(|| format!("customer {i} has net inflow {net}"))
            })
        },
    );
    record(
        ConstraintFamily::FlowBoundary,
        if !well_formed {
            skip()
        } else {
            let out0: f64 = (1..=n).map(|j| y[0][j]).sum();
            let in0: f64 = (1..=n).map(|i| y[i][0]).sum();
            let out_last: f64 = (1..=n).map(|j| y[last][j]).sum();
            if (out0 - n as f64).abs() > tol {
                Some(format!("depot outflow {out0} != {n}"))
            } else if in0.abs() > tol {
                Some(format!("depot inflow {in0} != 0"))
            } else if (out_last - n as f64).abs() > tol {
                Some(format!("terminal outflow {out_last} != {n}"))
            } else {
                None
            }
        },
    );
    record(
        ConstraintFamily::FlowLinking,
        if !well_formed {
            skip()
        } else {
            (0..nodes)
                .flat_map(|i| (i + 1..nodes).map(move |j| (i, j)))
                .filter(|&(i, j)| in_arc_set(i, j))
                .find_map(|(i, j)| {
                    let lhs = y[i][j] + y[j][i];
                    let rhs = n as f64 * (used(i, j) + used(j, i)) as f64;
                    ((lhs - rhs).abs() > tol)
                        .then(|| format!("pair ({i}, {j}): y sum {lhs} != {rhs}"))
                })
        },
    );
    record(
        ConstraintFamily::DepotTime,
        if !well_formed {
            skip()
        } else {
            (sol.a[0].abs() > tol).then(|| format!("a[0] = {}", sol.a[0]))
        },
    );
    let horizon = instance.horizon();
    record(
        ConstraintFamily::TimePropagation,
        if !well_formed {
            skip()
        } else {
            let mut issue = None;
            'outer: for i in 0..nodes {
                for j in 0..nodes {
                    if !in_arc_set(i, j) {
                        continue;
                    }
                    for h in 0..hcount {
                        let free = if x[i][j][h] { 0.0 } else { 1.0 };
                        let base = sol.a[i] + instance.service[j] + instance.t(i, j, h);
                        let lo = base - 2.0 * horizon * free;
                        let hi = base + horizon * free;
                        if lo > sol.a[j] + tol || sol.a[j] > hi + tol {
                            issue = Some(format!(
                                "a[{j}] = {} outside [{lo}, {hi}] for arc ({i}, {j}, {h})",
                                sol.a[j]
                            ));
                            break 'outer;
                        }
                    }
                }
            }
            issue
        },
    );
    record(
        ConstraintFamily::IntervalIdentification,
        if !well_formed {
            skip()
        } else {
            (1..=n).find_map(|i| {
                let (mut lo, mut hi) = (0.0, 0.0);
                for j in 1..nodes {
                    for h in 0..hcount {
                        if x[i][j][h] {
                            lo += instance.tbar * h as f64;
                            hi += instance.tbar * (h + 1) as f64;
                        }
                    }
                }
                let a = sol.a[i];
                (a < lo - tol || a >= hi)
                    .then(|| format!("a[{i}] = {a} outside interval [{lo}, {hi})"))
            })
        },
    );
    record(
        ConstraintFamily::Horizon,
        if sol.a.len() != nodes {
            skip()
        } else {
            (sol.a[last] >= horizon)
                .then(|| format!("a[{last}] = {} reaches the horizon {horizon}", sol.a[last]))
        },
    );
    record(ConstraintFamily::Domains, domain_issue);

    TdTspCheck { families: out }
}

/// Six customers, two 30 s intervals: a hand-sized instance for examples
/// and tests.
pub fn six_customer_example() -> TdTspInstance {
    let t0 = vec![
        vec![0., 5., 7., 4., 1., 3., 6., 0.],
        vec![4., 0., 8., 1., 1., 4., 2., 4.],
        vec![7., 8., 0., 5., 2., 6., 6., 7.],
        vec![5., 2., 4., 0., 1., 3., 2., 5.],
        vec![3., 1., 2., 1., 0., 7., 8., 3.],
        vec![2., 3., 5., 3., 9., 0., 4., 2.],
        vec![5., 2., 8., 2., 7., 2., 0., 5.],
        vec![0., 5., 7., 4., 1., 3., 6., 0.],
    ];
    let t1 = vec![
        vec![0., 8., 10., 3., 1., 2., 4., 0.],
        vec![7., 0., 8., 1., 3., 4., 4., 7.],
        vec![9., 8., 0., 6., 2., 6., 8., 9.],
        vec![5., 4., 4., 0., 1., 3., 6., 5.],
        vec![2., 1., 2., 1., 0., 7., 8., 2.],
        vec![3., 2., 5., 4., 11., 0., 4., 3.],
        vec![5., 3., 8., 7., 7., 2., 0., 5.],
        vec![0., 8., 10., 3., 1., 2., 4., 0.],
    ];
    TdTspInstance::new(6, 2, 30.0, vec![0., 5., 5., 6., 4., 3., 4., 0.], vec![t0, t1]).expect("example data is valid")
}
