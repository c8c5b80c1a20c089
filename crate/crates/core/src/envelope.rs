//! Critical-value machinery: recursive segment bisection by indifference
//! points, full enumeration over [0, 1], optimal contract selection, and
//! utility-curve export.
//!
//! The agent's utility as a function of the contract parameter is the upper
//! envelope of one affine function per action set, so it is convex and
//! piecewise linear; the demanded set changes exactly at the envelope kinks.
//! Bisecting a segment at the indifference point of its two endpoint demands
//! finds every kink with a number of distinct demand queries linear in the
//! number of kinks.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Breakpoint, ContractInstance};
use crate::rational::Rational;
use crate::set::ActionSet;

/// The raw best-response computation behind a demand oracle: given a
/// contract `alpha`, return the unique tie-broken utility-maximizing set.
pub trait BestResponse {
    fn best_response(&mut self, alpha: &Rational) -> Result<ActionSet>;
}

impl<B: BestResponse + ?Sized> BestResponse for &mut B {
    fn best_response(&mut self, alpha: &Rational) -> Result<ActionSet> {
        (**self).best_response(alpha)
    }
}

/// A memoizing demand oracle. Repeated queries at the same contract hit the
/// memo table, so the distinct-query counter is exactly the number of
/// contracts forwarded to the underlying best-response computation; the
/// enumeration complexity assertions are stated over that count.
pub struct DemandOracle<B> {
    inner: B,
    memo: BTreeMap<Rational, ActionSet>,
}

impl<B: BestResponse> DemandOracle<B> {
    pub fn new(inner: B) -> Self {
        DemandOracle {
            inner,
            memo: BTreeMap::new(),
        }
    }

    pub fn query(&mut self, alpha: &Rational) -> Result<ActionSet> {
        if let Some(hit) = self.memo.get(alpha) {
            return Ok(hit.clone());
        }
        let set = self.inner.best_response(alpha)?;
        self.memo.insert(alpha.clone(), set.clone());
        Ok(set)
    }

    /// Number of distinct contracts queried so far.
    pub fn distinct_queries(&self) -> usize {
        self.memo.len()
    }
}

/// The contract at which two action sets with rewards `fa != fb` and costs
/// `ca`, `cb` yield equal agent utility: `gamma = (ca - cb) / (fa - fb)`.
///
/// Equal rewards are rejected: two distinct sets demanded at different
/// contracts always differ in reward under consistent tie-breaking, so equal
/// rewards here signal a broken oracle.
pub fn indifference_point(
    fa: &Rational,
    ca: &Rational,
    fb: &Rational,
    cb: &Rational,
) -> Result<Rational> {
    if fa == fb {
        return Err(Error::EqualRewards { reward: fa.clone() });
    }
    Ok((ca - cb) / (fa - fb))
}

/// All critical values in the half-open segment `(lo, hi]`: the contracts
/// `gamma` where the demanded set changes, i.e. demand at `gamma` differs
/// from demand just below it. Requires `0 <= lo < hi <= 1`.
pub fn cv_segment<B: BestResponse>(
    oracle: &mut DemandOracle<B>,
    inst: &ContractInstance,
    lo: &Rational,
    hi: &Rational,
) -> Result<Vec<Rational>> {
    if lo.is_negative() || lo >= hi || hi > &Rational::one() {
        return Err(Error::InvalidSegment {
            lo: lo.clone(),
            hi: hi.clone(),
        });
    }
    let mut found: Vec<Rational> = Vec::new();
    // Explicit work stack instead of recursion: segments with many critical
    // values produce deep recursion trees.
    let mut stack: Vec<(Rational, Rational)> = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        let sa = oracle.query(&a)?;
        let sb = oracle.query(&b)?;
        if sa == sb {
            continue;
        }
        let fa = inst.reward(&sa)?;
        let ca = inst.cost(&sa)?;
        let fb = inst.reward(&sb)?;
        let cb = inst.cost(&sb)?;
        let gamma = indifference_point(&fa, &ca, &fb, &cb)?;
        if gamma <= a || gamma > b {
            return Err(Error::InconsistentOracle {
                detail: format!("indifference point {gamma} escaped the segment ({a}, {b}]"),
            });
        }
        if oracle.query(&gamma)? == sb {
            found.push(gamma);
        } else {
            stack.push((a, gamma.clone()));
            stack.push((gamma, b));
        }
    }
    found.sort();
    Ok(found)
}

/// The full breakpoint curve of a contract instance: always includes
/// `alpha_0 = 0`, followed by each critical value in (0, 1] with the set
/// demanded there and both parties' utilities.
#[derive(Clone, Debug, Serialize)]
pub struct ContractCurve {
    pub breakpoints: Vec<Breakpoint>,
}

impl ContractCurve {
    /// Checks the envelope monotonicity structure: strictly increasing
    /// alpha, reward, and cost along the curve.
    pub fn validate(&self) -> Result<()> {
        for pair in self.breakpoints.windows(2) {
            let (prev, next) = (&pair[0], &pair[1]);
            if prev.alpha >= next.alpha {
                return Err(Error::InconsistentOracle {
                    detail: format!(
                        "breakpoint alphas not increasing: {} then {}",
                        prev.alpha, next.alpha
                    ),
                });
            }
            if prev.reward_value >= next.reward_value {
                return Err(Error::InconsistentOracle {
                    detail: format!(
                        "demanded rewards not increasing across breakpoints {} and {}",
                        prev.alpha, next.alpha
                    ),
                });
            }
            if prev.cost_value >= next.cost_value {
                return Err(Error::InconsistentOracle {
                    detail: format!(
                        "demanded costs not increasing across breakpoints {} and {}",
                        prev.alpha, next.alpha
                    ),
                });
            }
        }
        Ok(())
    }

    /// The breakpoint governing contract `alpha`: the largest breakpoint
    /// alpha that does not exceed it (demand is constant between
    /// breakpoints and right-continuous at them).
    pub fn governing(&self, alpha: &Rational) -> &Breakpoint {
        let mut current = &self.breakpoints[0];
        for bp in &self.breakpoints {
            if &bp.alpha <= alpha {
                current = bp;
            } else {
                break;
            }
        }
        current
    }

    pub fn alphas(&self) -> Vec<Rational> {
        self.breakpoints.iter().map(|b| b.alpha.clone()).collect()
    }
}

/// Enumerates every critical value in [0, 1] and populates each breakpoint.
pub fn all_critical_values<B: BestResponse>(
    oracle: &mut DemandOracle<B>,
    inst: &ContractInstance,
) -> Result<ContractCurve> {
    let mut alphas = vec![Rational::zero()];
    alphas.extend(cv_segment(
        oracle,
        inst,
        &Rational::zero(),
        &Rational::one(),
    )?);
    let mut breakpoints = Vec::with_capacity(alphas.len());
    for alpha in alphas {
        let demanded = oracle.query(&alpha)?;
        breakpoints.push(Breakpoint::from_parts(inst, alpha, demanded)?);
    }
    let curve = ContractCurve { breakpoints };
    curve.validate()?;
    Ok(curve)
}

/// The breakpoint maximizing the principal's utility; ties go to the
/// smaller contract.
pub fn optimal_contract<B: BestResponse>(
    oracle: &mut DemandOracle<B>,
    inst: &ContractInstance,
) -> Result<Breakpoint> {
    let curve = all_critical_values(oracle, inst)?;
    let mut best = curve.breakpoints[0].clone();
    for bp in &curve.breakpoints[1..] {
        if bp.principal_utility > best.principal_utility {
            best = bp.clone();
        }
    }
    Ok(best)
}

/// One sampled point of the two utility curves.
#[derive(Clone, Debug, Serialize)]
pub struct CurvePoint {
    pub alpha: Rational,
    pub agent_utility: Rational,
    pub principal_utility: Rational,
}

/// The exact utility curves sampled at every breakpoint plus `samples`
/// evenly spaced contracts across [0, 1]. Demand is piecewise constant, so
/// each sample's utilities come from the breakpoint governing it.
pub fn utility_curve<B: BestResponse>(
    oracle: &mut DemandOracle<B>,
    inst: &ContractInstance,
    samples: usize,
) -> Result<Vec<CurvePoint>> {
    if samples < 2 {
        return Err(Error::InvalidArgument {
            detail: format!("need at least 2 samples, got {samples}"),
        });
    }
    let curve = all_critical_values(oracle, inst)?;
    let mut grid: Vec<Rational> = curve.alphas();
    for i in 0..samples {
        grid.push(Rational::new(i as i64, (samples - 1) as i64));
    }
    grid.sort();
    grid.dedup();
    let mut points = Vec::with_capacity(grid.len());
    for alpha in grid {
        let bp = curve.governing(&alpha);
        let agent = &alpha * &bp.reward_value - &bp.cost_value;
        let principal = (Rational::one() - &alpha) * &bp.reward_value;
        points.push(CurvePoint {
            alpha,
            agent_utility: agent,
            principal_utility: principal,
        });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::test_support::two_action_instance;
    use crate::model::{demand_compare, AdditiveFunction, TableInstance};
    use crate::oracle::BruteForceDemand;
    use std::cmp::Ordering;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn oracle_for(inst: &ContractInstance) -> DemandOracle<BruteForceDemand<'_>> {
        DemandOracle::new(BruteForceDemand::new(inst))
    }

    #[test]
    fn indifference_point_examples() {
        assert_eq!(
            indifference_point(&rat(0, 1), &rat(0, 1), &rat(1, 5), &rat(1, 20)).unwrap(),
            rat(1, 4)
        );
        assert_eq!(
            indifference_point(&rat(0, 1), &rat(0, 1), &rat(1, 1), &rat(1, 1)).unwrap(),
            Rational::one()
        );
        assert_eq!(
            indifference_point(&rat(1, 5), &rat(1, 20), &rat(2, 5), &rat(3, 20)).unwrap(),
            rat(1, 2)
        );
        assert!(matches!(
            indifference_point(&rat(1, 2), &rat(0, 1), &rat(1, 2), &rat(1, 3)),
            Err(Error::EqualRewards { .. })
        ));
    }

    #[test]
    fn two_action_critical_values() {
        let inst = two_action_instance();
        let mut oracle = oracle_for(&inst);
        let cvs = cv_segment(&mut oracle, &inst, &Rational::zero(), &Rational::one()).unwrap();
        assert_eq!(cvs, vec![rat(1, 4), rat(1, 2), rat(3, 4)]);
    }

    #[test]
    fn zero_costs_have_no_critical_values() {
        let inst = TableInstance {
            n: 2,
            f: vec![Rational::zero(), rat(1, 5), rat(2, 5), rat(3, 5)],
            c: vec![Rational::zero(); 4],
        }
        .to_contract_instance()
        .unwrap();
        let mut oracle = oracle_for(&inst);
        let cvs = cv_segment(&mut oracle, &inst, &Rational::zero(), &Rational::one()).unwrap();
        assert!(cvs.is_empty());
        let curve = all_critical_values(&mut oracle, &inst).unwrap();
        assert_eq!(curve.breakpoints.len(), 1);
        assert_eq!(curve.breakpoints[0].alpha, Rational::zero());
        assert_eq!(curve.breakpoints[0].demanded, ActionSet::full(2));
        let best = optimal_contract(&mut oracle, &inst).unwrap();
        assert_eq!(best.alpha, Rational::zero());
        assert_eq!(best.principal_utility, rat(3, 5));
    }

    #[test]
    fn two_action_curve_and_optimum() {
        let inst = two_action_instance();
        let mut oracle = oracle_for(&inst);
        let curve = all_critical_values(&mut oracle, &inst).unwrap();
        let alphas = curve.alphas();
        assert_eq!(alphas, vec![rat(0, 1), rat(1, 4), rat(1, 2), rat(3, 4)]);
        let sets: Vec<Vec<usize>> = curve
            .breakpoints
            .iter()
            .map(|b| b.demanded.indices())
            .collect();
        assert_eq!(sets, vec![vec![], vec![0], vec![1], vec![0, 1]]);

        let best = optimal_contract(&mut oracle, &inst).unwrap();
        assert_eq!(best.alpha, rat(1, 2));
        assert_eq!(best.principal_utility, rat(1, 5));
        assert_eq!(best.demanded.indices(), vec![1]);
    }

    /// Independent check for the worked 3-action examples: build the
    /// candidate set from every pairwise line intersection and keep exactly
    /// those candidates where the directly computed demand changes.
    fn envelope_by_pairwise_intersection(inst: &ContractInstance) -> Vec<Rational> {
        let n = inst.n();
        let size = 1u64 << n;
        let lines: Vec<(Rational, Rational)> = (0..size)
            .map(|mask| {
                let s = ActionSet::from_mask(n, mask);
                (inst.reward(&s).unwrap(), inst.cost(&s).unwrap())
            })
            .collect();
        let mut candidates: Vec<Rational> = Vec::new();
        for i in 0..lines.len() {
            for j in (i + 1)..lines.len() {
                if lines[i].0 != lines[j].0 {
                    let gamma = (&lines[i].1 - &lines[j].1) / (&lines[i].0 - &lines[j].0);
                    if gamma.is_positive() && gamma <= Rational::one() {
                        candidates.push(gamma);
                    }
                }
            }
        }
        candidates.sort();
        candidates.dedup();
        let demand_at = |alpha: &Rational| -> ActionSet {
            let mut best = ActionSet::from_mask(n, 0);
            for mask in 1..size {
                let s = ActionSet::from_mask(n, mask);
                if demand_compare(inst, alpha, &s, &best).unwrap() == Ordering::Greater {
                    best = s;
                }
            }
            best
        };
        let mut prev_point = Rational::zero();
        let mut out = Vec::new();
        for gamma in candidates {
            let midpoint = (&prev_point + &gamma) / rat(2, 1);
            if demand_at(&midpoint) != demand_at(&gamma) {
                out.push(gamma.clone());
            }
            prev_point = gamma;
        }
        out
    }

    #[test]
    fn random_three_action_instances_match_pairwise_envelope() {
        for seed in 0..40u64 {
            let inst = random_table(seed);
            let mut oracle = oracle_for(&inst);
            let cvs = cv_segment(&mut oracle, &inst, &Rational::zero(), &Rational::one()).unwrap();
            let expected = envelope_by_pairwise_intersection(&inst);
            assert_eq!(cvs, expected, "seed {seed}");
            // Linear query complexity in the number of critical values.
            assert!(
                oracle.distinct_queries() <= 2 * cvs.len() + 2,
                "seed {seed}"
            );
            // The optimal contract sits on a breakpoint.
            let best = optimal_contract(&mut oracle, &inst).unwrap();
            let curve = all_critical_values(&mut oracle, &inst).unwrap();
            assert!(curve.breakpoints.iter().any(|b| b.alpha == best.alpha));
        }
    }

    fn random_table(seed: u64) -> ContractInstance {
        let mut rng = crate::generators::SplitMix64::new(seed);
        let n = 3;
        let mut f = vec![Rational::zero()];
        let mut c = vec![Rational::zero()];
        for _ in 1..(1u64 << n) {
            f.push(rng.unit_rational(12));
            c.push(rng.unit_rational(12));
        }
        TableInstance { n, f, c }.to_contract_instance().unwrap()
    }

    #[test]
    fn sub_segments_return_exactly_the_kinks_inside() {
        // Half-open semantics: cv_segment(a, b) is the envelope kinks in
        // (a, b], for arbitrary segment bounds.
        for seed in 0..20u64 {
            let inst = random_table(seed);
            let all = crate::verify::instance_envelope_breakpoints(&inst).unwrap();
            let mut rng = crate::generators::SplitMix64::new(seed ^ 0x7e57);
            for _ in 0..5 {
                let mut a = rng.unit_rational(24);
                let mut b = rng.unit_rational(24);
                if a == b {
                    continue;
                }
                if a > b {
                    std::mem::swap(&mut a, &mut b);
                }
                let mut oracle = oracle_for(&inst);
                let found = cv_segment(&mut oracle, &inst, &a, &b).unwrap();
                let expected: Vec<Rational> = all
                    .iter()
                    .filter(|x| *x > &a && *x <= &b)
                    .cloned()
                    .collect();
                assert_eq!(found, expected, "seed {seed}, segment ({a}, {b}]");
            }
        }
    }

    #[test]
    fn utility_curve_contains_breakpoints_and_grid() {
        let inst = two_action_instance();
        let mut oracle = oracle_for(&inst);
        let points = utility_curve(&mut oracle, &inst, 5).unwrap();
        let alphas: Vec<Rational> = points.iter().map(|p| p.alpha.clone()).collect();
        assert!(alphas.contains(&rat(1, 2)));
        assert!(alphas.contains(&Rational::zero()));
        assert!(alphas.contains(&Rational::one()));
        let half = points.iter().find(|p| p.alpha == rat(1, 2)).unwrap();
        assert_eq!(half.agent_utility, rat(1, 20));
        assert_eq!(half.principal_utility, rat(1, 5));
        // Agent utility is nondecreasing along the convex envelope.
        for pair in points.windows(2) {
            assert!(pair[0].agent_utility <= pair[1].agent_utility);
        }
    }

    #[test]
    fn utility_curve_sample_bounds() {
        let inst = two_action_instance();
        let mut oracle = oracle_for(&inst);
        assert!(utility_curve(&mut oracle, &inst, 1).is_err());
        let points = utility_curve(&mut oracle, &inst, 2).unwrap();
        assert_eq!(points.first().unwrap().alpha, Rational::zero());
        assert_eq!(points.last().unwrap().alpha, Rational::one());
    }

    #[test]
    fn segment_bounds_are_validated() {
        let inst = two_action_instance();
        let mut oracle = oracle_for(&inst);
        assert!(matches!(
            cv_segment(&mut oracle, &inst, &rat(1, 2), &rat(1, 2)),
            Err(Error::InvalidSegment { .. })
        ));
        assert!(matches!(
            cv_segment(&mut oracle, &inst, &rat(-1, 2), &Rational::one()),
            Err(Error::InvalidSegment { .. })
        ));
        assert!(matches!(
            cv_segment(&mut oracle, &inst, &Rational::zero(), &rat(3, 2)),
            Err(Error::InvalidSegment { .. })
        ));
    }

    #[test]
    fn memoization_counts_distinct_contracts() {
        let inst = two_action_instance();
        let mut oracle = oracle_for(&inst);
        oracle.query(&rat(1, 3)).unwrap();
        oracle.query(&rat(1, 3)).unwrap();
        oracle.query(&rat(2, 6)).unwrap();
        assert_eq!(oracle.distinct_queries(), 1);
    }

    #[test]
    fn principal_utility_between_breakpoints_never_beats_breakpoints() {
        let inst = two_action_instance();
        let mut oracle = oracle_for(&inst);
        let curve = all_critical_values(&mut oracle, &inst).unwrap();
        let best = curve
            .breakpoints
            .iter()
            .map(|b| b.principal_utility.clone())
            .max()
            .unwrap();
        let mut rng = crate::generators::SplitMix64::new(7);
        for _ in 0..100 {
            let i = (rng.next_below(curve.breakpoints.len() as u64 - 1)) as usize;
            let lo = &curve.breakpoints[i].alpha;
            let hi = &curve.breakpoints[i + 1].alpha;
            let t = rng.unit_rational(50);
            let mid = lo + (hi - lo) * t;
            if &mid == lo || &mid == hi {
                continue;
            }
            let governing = curve.governing(&mid);
            let up = (Rational::one() - &mid) * &governing.reward_value;
            assert!(up <= best);
        }
    }

    #[test]
    fn equal_reward_oracle_is_rejected() {
        // A "broken" oracle returning sets with equal rewards at the two
        // endpoints: reward is 1/2 everywhere except the empty set, costs
        // differ, so two distinct sets both appear utility-maximal only
        // through inconsistent tie-breaking.
        struct Flipper;
        impl BestResponse for Flipper {
            fn best_response(&mut self, alpha: &Rational) -> Result<ActionSet> {
                Ok(if alpha.is_zero() {
                    ActionSet::from_mask(2, 0b01)
                } else {
                    ActionSet::from_mask(2, 0b10)
                })
            }
        }
        let inst = ContractInstance::new(
            Box::new(
                crate::model::TableFunction::new(
                    2,
                    vec![Rational::zero(), rat(1, 2), rat(1, 2), rat(1, 2)],
                )
                .unwrap(),
            ),
            Box::new(AdditiveFunction::new(vec![
                Rational::zero(),
                Rational::zero(),
            ])),
        )
        .unwrap();
        let mut oracle = DemandOracle::new(Flipper);
        let err = cv_segment(&mut oracle, &inst, &Rational::zero(), &Rational::one());
        assert!(matches!(err, Err(Error::EqualRewards { .. })));
    }
}
