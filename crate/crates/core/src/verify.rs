//! Property suites over seeded random instances, shared by the `verify` CLI
//! command and the acceptance tests. Each suite checks implementation output
//! against an independent oracle (upper envelopes built directly from all
//! affine utility lines, exhaustive path and matching enumeration) or
//! against structural bounds, and reports a minimal reproducer (seed and
//! contract) for every violation.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::envelope::{all_critical_values, cv_segment, DemandOracle};
use crate::error::{Error, Result};
use crate::generators::{generate, Family, GeneratedInstance, GeneratorSpec, SplitMix64};
use crate::matching::{
    make_matching_contract_instance, matching_demand, max_weight_matching, BipartiteEdge,
    BipartiteInstance, LexWeight, MatchingDemand,
};
use crate::model::ContractInstance;
use crate::oracle::{brute_force_demand, BruteForceDemand, SupermodularDemand};
use crate::rational::Rational;
use crate::reductions::{
    matching_to_demand, min_perfect_matching, parametric_weight, path_to_matching,
    shortest_path_value, ParametricPathInstance,
};
use crate::set::ActionSet;

/// A failed check with enough context to replay it.
#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub seed: u64,
    pub check: &'static str,
    pub detail: String,
}

/// Outcome of one suite run.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub cases: usize,
    pub checks: usize,
    pub violations: Vec<Violation>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const SUITES: [&str; 5] = [
    "envelope",
    "supermodular",
    "matching",
    "reductions",
    "counting",
];

/// Runs the named suite with its default case count unless overridden.
pub fn run_suite(name: &str, instances: Option<usize>, jobs: usize) -> Result<SuiteReport> {
    match name {
        "envelope" => Ok(verify_envelope(instances.unwrap_or(200), jobs)),
        "supermodular" => Ok(verify_supermodular(instances.unwrap_or(100), jobs)),
        "matching" => Ok(verify_matching(instances.unwrap_or(100), jobs)),
        "reductions" => Ok(verify_reductions(instances.unwrap_or(50), jobs)),
        "counting" => Ok(verify_counting(instances.unwrap_or(50), jobs)),
        other => Err(Error::InvalidArgument {
            detail: format!("unknown suite {other:?}; expected one of {SUITES:?}"),
        }),
    }
}

struct CaseOutcome {
    checks: usize,
    violations: Vec<Violation>,
}

/// Per-case accumulator: counts checks and records tagged violations.
struct Checker {
    seed: u64,
    checks: usize,
    violations: Vec<Violation>,
}

impl Checker {
    fn new(seed: u64) -> Self {
        Checker {
            seed,
            checks: 0,
            violations: Vec::new(),
        }
    }

    fn check(&mut self, name: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(Violation {
                seed: self.seed,
                check: name,
                detail: detail(),
            });
        }
    }

    fn error(&mut self, name: &'static str, detail: String) {
        self.violations.push(Violation {
            seed: self.seed,
            check: name,
            detail,
        });
    }

    fn outcome(self) -> CaseOutcome {
        CaseOutcome {
            checks: self.checks,
            violations: self.violations,
        }
    }
}

/// Runs `case` on seeds `0..cases`, optionally fanned out across threads.
/// Violations are merged in seed order so the report is deterministic.
fn run_cases<F>(cases: usize, jobs: usize, case: F) -> (usize, Vec<Violation>)
where
    F: Fn(u64) -> CaseOutcome + Sync,
{
    let jobs = jobs.max(1).min(cases.max(1));
    let mut outcomes: Vec<(u64, CaseOutcome)> = if jobs == 1 {
        (0..cases as u64).map(|seed| (seed, case(seed))).collect()
    } else {
        std::thread::scope(|scope| {
            let case = &case;
            let handles: Vec<_> = (0..jobs)
                .map(|j| {
                    scope.spawn(move || {
                        (j as u64..cases as u64)
                            .step_by(jobs)
                            .map(|seed| (seed, case(seed)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("verify worker panicked"))
                .collect()
        })
    };
    outcomes.sort_by_key(|(seed, _)| *seed);
    let mut checks = 0;
    let mut violations = Vec::new();
    for (_, outcome) in outcomes {
        checks += outcome.checks;
        violations.extend(outcome.violations);
    }
    (checks, violations)
}

fn fail(seed: u64, detail: impl Into<String>) -> CaseOutcome {
    CaseOutcome {
        checks: 0,
        violations: vec![Violation {
            seed,
            check: "case-error",
            detail: detail.into(),
        }],
    }
}

// ---------------------------------------------------------------------------
// Independent oracles
// ---------------------------------------------------------------------------

/// Kinks of the upper envelope of affine lines `x -> slope * x + intercept`
/// that fall in the half-open window `(lo, hi]`, computed directly by a
/// convex-hull sweep over the lines. This never consults the recursive
/// enumeration it is used to check.
pub fn upper_envelope_kinks(
    lines: &[(Rational, Rational)],
    lo: &Rational,
    hi: &Rational,
) -> Vec<Rational> {
    // One representative per slope: the highest intercept.
    let mut by_slope: BTreeMap<Rational, Rational> = BTreeMap::new();
    for (slope, intercept) in lines {
        by_slope
            .entry(slope.clone())
            .and_modify(|best| {
                if intercept > best {
                    *best = intercept.clone();
                }
            })
            .or_insert_with(|| intercept.clone());
    }
    let sorted: Vec<(Rational, Rational)> = by_slope.into_iter().collect();
    // x where `b` overtakes `a` (slopes strictly increase along the hull).
    let crossing = |a: &(Rational, Rational), b: &(Rational, Rational)| -> Rational {
        (&a.1 - &b.1) / (&b.0 - &a.0)
    };
    let mut hull: Vec<(Rational, Rational)> = Vec::new();
    for line in sorted {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            if crossing(a, &line) <= crossing(a, b) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(line);
    }
    hull.windows(2)
        .map(|pair| crossing(&pair[0], &pair[1]))
        .filter(|x| x > lo && x <= hi)
        .collect()
}

/// Demand breakpoints of a contract instance in `(0, 1]`, from the upper
/// envelope of all `2^n` utility lines `(f(S), -c(S))`.
pub fn instance_envelope_breakpoints(inst: &ContractInstance) -> Result<Vec<Rational>> {
    let n = inst.n();
    if n > 20 {
        return Err(Error::GroundSetTooLarge { n, cap: 20 });
    }
    let mut lines = Vec::with_capacity(1 << n);
    for mask in 0..(1u64 << n) {
        let s = ActionSet::from_mask(n, mask);
        lines.push((inst.reward(&s)?, -inst.cost(&s)?));
    }
    Ok(upper_envelope_kinks(
        &lines,
        &Rational::zero(),
        &Rational::one(),
    ))
}

/// All matchings (edge index sets, including the empty one) of a bipartite
/// graph, by exhaustive include/exclude search.
pub fn enumerate_matchings(nv: usize, nu: usize, ends: &[(usize, usize)]) -> Vec<Vec<usize>> {
    fn rec(
        idx: usize,
        ends: &[(usize, usize)],
        used_l: &mut [bool],
        used_r: &mut [bool],
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if idx == ends.len() {
            out.push(current.clone());
            return;
        }
        rec(idx + 1, ends, used_l, used_r, current, out);
        let (v, u) = ends[idx];
        if !used_l[v] && !used_r[u] {
            used_l[v] = true;
            used_r[u] = true;
            current.push(idx);
            rec(idx + 1, ends, used_l, used_r, current, out);
            current.pop();
            used_l[v] = false;
            used_r[u] = false;
        }
    }
    let mut out = Vec::new();
    rec(
        0,
        ends,
        &mut vec![false; nv],
        &mut vec![false; nu],
        &mut Vec::new(),
        &mut out,
    );
    out
}

/// All simple s-t paths as affine value lines `(sum c, sum f)`.
pub fn enumerate_path_lines(p: &ParametricPathInstance) -> Vec<(Rational, Rational)> {
    struct Walk<'a> {
        target: usize,
        adjacency: Vec<Vec<(usize, usize)>>,
        edges: &'a [crate::reductions::PathEdge],
        on_path: Vec<bool>,
        lines: Vec<(Rational, Rational)>,
    }
    impl Walk<'_> {
        fn dfs(&mut self, at: usize, c_sum: Rational, f_sum: Rational) {
            if at == self.target {
                self.lines.push((c_sum, f_sum));
                return;
            }
            self.on_path[at] = true;
            for (next, e) in self.adjacency[at].clone() {
                if !self.on_path[next] {
                    self.dfs(next, &c_sum + &self.edges[e].c, &f_sum + &self.edges[e].f);
                }
            }
            self.on_path[at] = false;
        }
    }
    let index = |name: &str| p.vertices.iter().position(|v| v == name).unwrap();
    let n = p.vertices.len();
    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, edge) in p.edges.iter().enumerate() {
        adjacency[index(&edge.from)].push((index(&edge.to), e));
    }
    let mut walk = Walk {
        target: index(&p.t),
        adjacency,
        edges: &p.edges,
        on_path: vec![false; n],
        lines: Vec::new(),
    };
    walk.dfs(index(&p.s), Rational::zero(), Rational::zero());
    walk.lines
}

/// Sampling grid for parametric equivalence checks: `points` evenly spaced
/// values across `[lo, hi]` plus every pairwise intersection of the given
/// affine lines `value(x) = c - x * f` that falls inside the range.
pub fn sample_grid(
    lo: &Rational,
    hi: &Rational,
    points: usize,
    lines: &[(Rational, Rational)],
) -> Vec<Rational> {
    let mut grid = Vec::new();
    let span = hi - lo;
    for i in 0..points {
        grid.push(lo + &span * Rational::new(i as i64, (points - 1) as i64));
    }
    for i in 0..lines.len() {
        for j in (i + 1)..lines.len() {
            let (ci, fi) = &lines[i];
            let (cj, fj) = &lines[j];
            if fi != fj {
                let x = (ci - cj) / (fi - fj);
                if &x >= lo && &x <= hi {
                    grid.push(x);
                }
            }
        }
    }
    grid.sort();
    grid.dedup();
    grid
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

fn envelope_case(seed: u64) -> CaseOutcome {
    let n = 3 + (seed % 8) as usize; // 3..=10
    let spec = GeneratorSpec::new(Family::ExplicitTable, seed)
        .with_n(n)
        .with_max_den(100);
    let GeneratedInstance::Table(table) = generate(&spec).expect("generator") else {
        unreachable!()
    };
    let inst = match table.to_contract_instance() {
        Ok(inst) => inst,
        Err(e) => return fail(seed, format!("instance build failed: {e}")),
    };
    let mut oracle = DemandOracle::new(BruteForceDemand::new(&inst));
    let found = match cv_segment(&mut oracle, &inst, &Rational::zero(), &Rational::one()) {
        Ok(found) => found,
        Err(e) => return fail(seed, format!("enumeration failed: {e}")),
    };
    let expected = match instance_envelope_breakpoints(&inst) {
        Ok(expected) => expected,
        Err(e) => return fail(seed, format!("envelope oracle failed: {e}")),
    };
    let mut checker = Checker::new(seed);
    checker.check("envelope-equality", found == expected, || {
        format!("critical values {found:?} differ from envelope kinks {expected:?} (n = {n})")
    });
    let bound = 2 * found.len() + 2;
    let queries = oracle.distinct_queries();
    checker.check("query-complexity", queries <= bound, || {
        format!(
            "{queries} distinct demand queries exceed 2k+2 = {bound} for k = {}",
            found.len()
        )
    });
    checker.outcome()
}

/// Enumeration-vs-envelope equivalence and query complexity on seeded
/// explicit tables with `n <= 10` and denominators at most 100.
pub fn verify_envelope(cases: usize, jobs: usize) -> SuiteReport {
    let (checks, violations) = run_cases(cases, jobs, envelope_case);
    SuiteReport {
        suite: "envelope",
        cases,
        checks,
        violations,
    }
}

fn supermodular_case(seed: u64) -> CaseOutcome {
    let family = if seed.is_multiple_of(2) {
        Family::SupermodularSquare
    } else {
        Family::SubmodularCoverageCost
    };
    let n = 3 + (seed % 8) as usize; // 3..=10
    let spec = GeneratorSpec::new(family, seed).with_n(n);
    let GeneratedInstance::Table(table) = generate(&spec).expect("generator") else {
        unreachable!()
    };
    let inst = match table.to_contract_instance() {
        Ok(inst) => inst,
        Err(e) => return fail(seed, format!("instance build failed: {e}")),
    };
    let mut checker = Checker::new(seed);

    // Breakpoint count bound: at most n + 1 including alpha_0 = 0.
    let mut oracle = DemandOracle::new(SupermodularDemand::new(&inst));
    let curve = match all_critical_values(&mut oracle, &inst) {
        Ok(curve) => curve,
        Err(e) => return fail(seed, format!("enumeration failed: {e}")),
    };
    checker.check("breakpoint-bound", curve.breakpoints.len() <= n + 1, || {
        format!(
            "{} breakpoints exceed n + 1 = {} ({family})",
            curve.breakpoints.len(),
            n + 1
        )
    });

    // Inclusion chain along increasing contracts, via the independent
    // exhaustive demand; the restricted oracle must also agree with it.
    let mut previous: Option<ActionSet> = None;
    for num in 0..=10i64 {
        let alpha = Rational::new(num, 10);
        let exhaustive = match brute_force_demand(&inst, &alpha) {
            Ok(s) => s,
            Err(e) => return fail(seed, format!("brute force failed: {e}")),
        };
        if let Some(prev) = &previous {
            checker.check("demand-chain", prev.is_subset_of(&exhaustive), || {
                format!(
                    "demand chain broken at alpha = {alpha}: {prev} is not a subset of {exhaustive}"
                )
            });
        }
        previous = Some(exhaustive.clone());
        match oracle.query(&alpha) {
            Ok(restricted) => {
                checker.check("oracle-agreement", restricted == exhaustive, || {
                    format!(
                        "restricted demand {restricted} differs from exhaustive {exhaustive} at alpha = {alpha}"
                    )
                });
            }
            Err(e) => checker.error(
                "oracle-agreement",
                format!("restricted demand failed at alpha = {alpha}: {e}"),
            ),
        }
    }
    // Breakpoint demanded sets form the same chain.
    for pair in curve.breakpoints.windows(2) {
        checker.check(
            "demand-chain",
            pair[0].demanded.is_subset_of(&pair[1].demanded),
            || format!("breakpoint sets not nested at alpha = {}", pair[1].alpha),
        );
    }
    checker.outcome()
}

/// Claim checks for the supermodular-reward / submodular-cost setting:
/// nested demands, at most `n + 1` breakpoints, and agreement between the
/// restricted and exhaustive oracles.
pub fn verify_supermodular(cases: usize, jobs: usize) -> SuiteReport {
    let (checks, violations) = run_cases(cases, jobs, supermodular_case);
    SuiteReport {
        suite: "supermodular",
        cases,
        checks,
        violations,
    }
}

fn matching_case(seed: u64) -> CaseOutcome {
    let n = 3 + (seed % 2) as usize; // sides of 3 or 4
    let edges = (4 + (seed % 7) as usize).min(10).min(n * n);
    let spec = GeneratorSpec::new(Family::MatchingRandom, seed)
        .with_n(n)
        .with_edges(edges);
    let GeneratedInstance::Bipartite(g) = generate(&spec).expect("generator") else {
        unreachable!()
    };
    let inst = match make_matching_contract_instance(&g) {
        Ok(inst) => inst,
        Err(e) => return fail(seed, format!("induced instance failed: {e}")),
    };
    let mut checker = Checker::new(seed);
    let mut rng = SplitMix64::new(seed ^ 0x5eed_a1fa);
    for _ in 0..50 {
        let alpha = rng.unit_rational(60);
        let demanded = match matching_demand(&g, &alpha) {
            Ok(m) => m,
            Err(e) => return fail(seed, format!("matching demand failed: {e}")),
        };
        checker.check("matching-feasibility", demanded.is_valid_for(&g), || {
            format!("demand at alpha = {alpha} is not a matching")
        });
        for &e in &demanded.edge_indices {
            let w = &alpha * &g.edges[e].f - &g.edges[e].c;
            checker.check("negative-edge", !w.is_negative(), || {
                format!("edge {e} with negative utility {w} demanded at alpha = {alpha}")
            });
        }
        let by_subsets = match brute_force_demand(&inst, &alpha) {
            Ok(s) => s,
            Err(e) => return fail(seed, format!("subset enumeration failed: {e}")),
        };
        checker.check(
            "oracle-agreement",
            demanded.to_action_set(g.edges.len()) == by_subsets,
            || {
                format!(
                    "matching demand {:?} differs from subset demand {} at alpha = {alpha}",
                    demanded.edge_indices, by_subsets
                )
            },
        );
    }
    checker.outcome()
}

/// Oracle agreement between matching-based demand and exhaustive subset
/// demand on the induced instance, with feasibility and negative-edge
/// exclusion checks.
pub fn verify_matching(cases: usize, jobs: usize) -> SuiteReport {
    let (checks, violations) = run_cases(cases, jobs, matching_case);
    SuiteReport {
        suite: "matching",
        cases,
        checks,
        violations,
    }
}

fn reduction_case(seed: u64) -> CaseOutcome {
    let nx = 2 + (seed % 5) as usize; // up to 8 vertices total
    let spec = GeneratorSpec::new(Family::ParametricPathRandom, seed)
        .with_n(nx)
        .with_edges(nx + 1);
    let GeneratedInstance::Path(p) = generate(&spec).expect("generator") else {
        unreachable!()
    };
    let pm = match path_to_matching(&p) {
        Ok(pm) => pm,
        Err(e) => return fail(seed, format!("path_to_matching failed: {e}")),
    };
    let mut checker = Checker::new(seed);
    let (lo, hi) = p.range.clone();

    // Value preservation: shortest path = exhaustive path minimum =
    // minimum-weight perfect matching = exhaustive perfect-matching minimum.
    let path_lines = enumerate_path_lines(&p);
    let ends = pm.indexed().expect("validated instance");
    let nv = pm.tasks.len();
    let nu = pm.resources.len();
    let perfect: Vec<Vec<usize>> = enumerate_matchings(nv, nu, &ends)
        .into_iter()
        .filter(|m| m.len() == nv)
        .collect();
    let matching_lines: Vec<(Rational, Rational)> = perfect
        .iter()
        .map(|m| {
            m.iter().fold(
                (Rational::zero(), Rational::zero()),
                |(c_acc, f_acc), &e| (c_acc + &pm.edges[e].c, f_acc + &pm.edges[e].f),
            )
        })
        .collect();
    for alpha in sample_grid(&lo, &hi, 20, &path_lines) {
        let by_dijkstra = match shortest_path_value(&p, &alpha) {
            Ok(v) => v,
            Err(e) => return fail(seed, format!("shortest path failed at {alpha}: {e}")),
        };
        let by_paths = path_lines
            .iter()
            .map(|(c, f)| c - &alpha * f)
            .min()
            .expect("at least one s-t path");
        let matched = match min_perfect_matching(&pm, &alpha) {
            Ok(m) => m,
            Err(e) => return fail(seed, format!("perfect matching failed at {alpha}: {e}")),
        };
        let by_engine = parametric_weight(&pm, &matched, &alpha);
        let by_enumeration = matching_lines
            .iter()
            .map(|(c, f)| c - &alpha * f)
            .min()
            .expect("a perfect matching exists");
        checker.check(
            "value-preservation",
            by_dijkstra == by_paths && by_paths == by_engine && by_engine == by_enumeration,
            || {
                format!(
                    "value mismatch at alpha = {alpha}: shortest {by_dijkstra}, paths {by_paths}, engine {by_engine}, enumeration {by_enumeration}"
                )
            },
        );
    }

    // Transform soundness on [alpha2, hi].
    let alpha2 = &lo + (&hi - &lo) / Rational::from_int(10);
    let alpha2 = if alpha2.is_positive() {
        alpha2
    } else {
        &hi / Rational::from_int(10)
    };
    let g = match matching_to_demand(&pm, &alpha2) {
        Ok(g) => g,
        Err(e) => return fail(seed, format!("transform failed: {e}")),
    };
    checker.check(
        "transform-nonneg",
        g.edges
            .iter()
            .all(|e| !e.f.is_negative() && !e.c.is_negative()),
        || "transformed instance has a negative reward or cost".to_string(),
    );
    match g.max_reward_matching_value() {
        Ok(v) => checker.check("transform-normalized", v <= Rational::one(), || {
            format!("transformed max matching reward {v} exceeds 1")
        }),
        Err(e) => checker.error(
            "transform-normalized",
            format!("transformed instance invalid: {e}"),
        ),
    }
    for boundary in [&alpha2, &hi] {
        checker.check(
            "transform-window",
            g.edges
                .iter()
                .all(|e| !(boundary * &e.f - &e.c).is_negative()),
            || format!("a transformed edge has negative utility at alpha = {boundary}"),
        );
    }
    // Argmin/argmax correspondence at sampled contracts: the minimum-weight
    // perfect matching under the source weights must be exactly the
    // lexicographic maximum over perfect matchings under the transformed
    // weights, computed here by exhaustive enumeration. The unconstrained
    // maximum can fail to be perfect near the window's lower end (a
    // zero-weight self-edge can outweigh the route edges displacing it),
    // but whenever it is perfect it must coincide with the argmin.
    for alpha in sample_grid(&alpha2, &hi, 20, &matching_lines) {
        let mini = match min_perfect_matching(&pm, &alpha) {
            Ok(m) => m,
            Err(e) => return fail(seed, format!("perfect matching failed at {alpha}: {e}")),
        };
        let best_perfect = perfect
            .iter()
            .map(|m| (transformed_matching_key(&g, m, &alpha), m))
            .max_by(|(ka, _), (kb, _)| ka.cmp(kb))
            .map(|(_, m)| m.clone())
            .expect("a perfect matching exists");
        checker.check("argmin-argmax", mini.edge_indices == best_perfect, || {
            format!(
                "argmin {:?} and perfect argmax {:?} disagree at alpha = {alpha}",
                mini.edge_indices, best_perfect
            )
        });
        let maxi = match max_weight_matching(&g, |e: &BipartiteEdge| {
            LexWeight::new(&alpha * &e.f - &e.c, e.f.clone())
        }) {
            Ok(m) => m,
            Err(e) => return fail(seed, format!("max matching failed at {alpha}: {e}")),
        };
        checker.check(
            "argmin-argmax",
            maxi.edge_indices.len() != nv || maxi.edge_indices == mini.edge_indices,
            || {
                format!(
                    "perfect unconstrained argmax {:?} differs from argmin {:?} at alpha = {alpha}",
                    maxi.edge_indices, mini.edge_indices
                )
            },
        );
    }

    // Breakpoint preservation inside (alpha2, hi]: the transform reverses
    // order affinely on perfect matchings, so the kinks of the source
    // minimum envelope coincide with the kinks of the transformed maximum
    // envelope over perfect matchings.
    let transformed_lines: Vec<(Rational, Rational)> = perfect
        .iter()
        .map(|m| {
            m.iter().fold(
                (Rational::zero(), Rational::zero()),
                |(f_acc, negc_acc), &e| (f_acc + &g.edges[e].f, negc_acc - &g.edges[e].c),
            )
        })
        .collect();
    // Source side: lower envelope of c - alpha f over perfect matchings,
    // i.e. upper envelope of alpha f - c.
    let source_lines: Vec<(Rational, Rational)> = matching_lines
        .iter()
        .map(|(c, f)| (f.clone(), -c.clone()))
        .collect();
    let source_kinks = upper_envelope_kinks(&source_lines, &alpha2, &hi);
    let transformed_kinks = upper_envelope_kinks(&transformed_lines, &alpha2, &hi);
    checker.check(
        "breakpoint-preservation",
        source_kinks == transformed_kinks,
        || {
            format!(
                "breakpoints not preserved: source {source_kinks:?}, transformed {transformed_kinks:?}"
            )
        },
    );
    checker.outcome()
}

/// Reduction pipeline checks: value preservation from parametric shortest
/// paths to minimum perfect matchings, soundness of the demand transform,
/// argmin/argmax correspondence, and breakpoint preservation.
pub fn verify_reductions(cases: usize, jobs: usize) -> SuiteReport {
    let (checks, violations) = run_cases(cases, jobs, reduction_case);
    SuiteReport {
        suite: "reductions",
        cases,
        checks,
        violations,
    }
}

/// Demand-order key of a matching under transformed weights: utility sum,
/// then reward sum, then preference for the canonically smaller edge set.
fn transformed_matching_key(
    g: &BipartiteInstance,
    m: &[usize],
    alpha: &Rational,
) -> (Rational, Rational, std::cmp::Reverse<u128>) {
    let mut utility = Rational::zero();
    let mut reward = Rational::zero();
    let mut mask = 0u128;
    for &e in m {
        utility = utility + alpha * &g.edges[e].f - &g.edges[e].c;
        reward = reward + &g.edges[e].f;
        mask |= 1 << e;
    }
    (utility, reward, std::cmp::Reverse(mask))
}

/// Number of interior critical values (excluding `alpha_0 = 0`) of a
/// normalized matching instance.
fn interior_critical_value_count(g: &BipartiteInstance) -> Result<usize> {
    let inst = make_matching_contract_instance(g)?;
    let mut oracle = DemandOracle::new(MatchingDemand::new(g)?);
    let curve = all_critical_values(&mut oracle, &inst)?;
    Ok(curve.breakpoints.len() - 1)
}

fn binomial(a: u64, b: u64) -> u128 {
    let b = b.min(a - b.min(a));
    let mut result: u128 = 1;
    for i in 0..b {
        result = result * (a - i) as u128 / (i + 1) as u128;
    }
    result
}

/// `sum over j = 1..=n of C(j + k - 1, j)`: the multiset-coefficient bound
/// on distinct matching rewards when edges carry `k` distinct values.
pub fn multiset_bound(n: usize, k: usize) -> u128 {
    (1..=n as u64).map(|j| binomial(j + k as u64 - 1, j)).sum()
}

fn counting_case(seed: u64) -> CaseOutcome {
    let mut checker = Checker::new(seed);

    // One-sided costs: at most 4 n^2 critical values for |U| = n.
    let n = 2 + (seed % 7) as usize; // 2..=8
    let spec = GeneratorSpec::new(Family::MatchingOneSided, seed).with_n(n);
    let GeneratedInstance::Bipartite(one_sided) = generate(&spec).expect("generator") else {
        unreachable!()
    };
    match interior_critical_value_count(&one_sided) {
        Ok(count) => checker.check("counting-one-sided", count <= 4 * n * n, || {
            format!(
                "one-sided instance with |U| = {n} has {count} critical values > 4n^2 = {}",
                4 * n * n
            )
        }),
        Err(e) => checker.error(
            "counting-one-sided",
            format!("one-sided counting failed: {e}"),
        ),
    }

    // Integer rewards and costs: at most (n F C)^3 for n edges.
    let sides = 2 + (seed % 3) as usize;
    let edges = (4 + (seed % 5) as usize).min(8).min(sides * sides);
    let f_bound = 1 + (seed % 4);
    let c_bound = 1 + ((seed / 4) % 4);
    let spec = GeneratorSpec::new(Family::MatchingInteger, seed)
        .with_n(sides)
        .with_edges(edges)
        .with_f_bound(f_bound)
        .with_c_bound(c_bound);
    let GeneratedInstance::Bipartite(integer) = generate(&spec).expect("generator") else {
        unreachable!()
    };
    match integer
        .normalized_copy()
        .and_then(|g| interior_critical_value_count(&g))
    {
        Ok(count) => {
            let bound = ((edges as u64 * f_bound * c_bound) as u128).pow(3);
            checker.check("counting-integer", (count as u128) <= bound, || {
                format!(
                    "integer instance with {edges} edges, F = {f_bound}, C = {c_bound} has {count} critical values > {bound}"
                )
            });
        }
        Err(e) => checker.error("counting-integer", format!("integer counting failed: {e}")),
    }

    // k distinct edge rewards: multiset-coefficient sum bound.
    let k = 1 + (seed % 3) as usize;
    let g = k_distinct_reward_instance(seed, k);
    match g
        .normalized_copy()
        .and_then(|g| interior_critical_value_count(&g))
    {
        Ok(count) => {
            let m = g.edges.len();
            let bound = multiset_bound(m, k);
            checker.check("counting-distinct", (count as u128) <= bound, || {
                format!(
                    "{k}-distinct-reward instance with {m} edges has {count} critical values > {bound}"
                )
            });
        }
        Err(e) => checker.error(
            "counting-distinct",
            format!("distinct-reward counting failed: {e}"),
        ),
    }
    checker.outcome()
}

/// A matching instance whose edge rewards take exactly `k` distinct values.
fn k_distinct_reward_instance(seed: u64, k: usize) -> BipartiteInstance {
    let mut rng = SplitMix64::new(seed ^ 0xd15c_0de5);
    let mut values: Vec<Rational> = Vec::new();
    while values.len() < k {
        let v = rng.unit_rational(12);
        if !v.is_zero() && !values.contains(&v) {
            values.push(v);
        }
    }
    let n = 3usize;
    let m = (5 + (seed % 5) as usize).min(n * n); // 5..=9 edges
    let tasks: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let resources: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    while pairs.len() < m {
        let p = (
            rng.next_below(n as u64) as usize,
            rng.next_below(n as u64) as usize,
        );
        if !pairs.contains(&p) {
            pairs.push(p);
        }
    }
    pairs.sort_unstable();
    let mut edges: Vec<BipartiteEdge> = pairs
        .iter()
        .map(|&(v, u)| BipartiteEdge {
            v: tasks[v].clone(),
            u: resources[u].clone(),
            f: values[rng.next_below(k as u64) as usize].clone(),
            c: rng.unit_rational(12),
        })
        .collect();
    // Make sure every drawn value actually appears.
    for (i, value) in values.iter().enumerate() {
        if i < edges.len() {
            edges[i].f = value.clone();
        }
    }
    BipartiteInstance {
        tasks,
        resources,
        edges,
        normalized: false,
    }
}

/// Counting bounds: one-sided instances, integer-valued instances, and
/// instances with few distinct edge rewards.
pub fn verify_counting(cases: usize, jobs: usize) -> SuiteReport {
    let (checks, violations) = run_cases(cases, jobs, counting_case);
    SuiteReport {
        suite: "counting",
        cases,
        checks,
        violations,
    }
}
