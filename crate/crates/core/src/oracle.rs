//! Concrete demand oracles over explicit value oracles: exhaustive subset
//! search for arbitrary reward/cost functions, and a restricted search for
//! monotone supermodular rewards with monotone submodular costs that
//! exploits the nesting of demanded sets across contracts.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::envelope::BestResponse;
use crate::error::{Error, Result};
use crate::model::ContractInstance;
use crate::rational::Rational;
use crate::set::ActionSet;

/// Default ground-set cap for exhaustive demand computations.
pub const DEFAULT_DEMAND_CAP: usize = 24;

// Enumeration uses u64 masks.
const HARD_CAP: usize = 63;

fn check_cap(n: usize, cap: usize) -> Result<()> {
    let cap = cap.min(HARD_CAP);
    if n > cap {
        return Err(Error::GroundSetTooLarge { n, cap });
    }
    Ok(())
}

/// Scans candidate masks (ascending in canonical set order) and returns the
/// demand-preferred set: maximal `(utility, reward)`, ties to the earliest,
/// i.e. canonically smallest, candidate. A single scratch set is reused
/// across the scan.
fn scan_demand(
    inst: &ContractInstance,
    alpha: &Rational,
    candidates: impl Iterator<Item = u64>,
) -> Result<ActionSet> {
    let mut scratch = ActionSet::empty(inst.n());
    let mut best: Option<(ActionSet, Rational, Rational)> = None;
    for mask in candidates {
        scratch.set_mask(mask);
        let f = inst.reward(&scratch)?;
        let u = alpha * &f - inst.cost(&scratch)?;
        let better = match &best {
            None => true,
            Some((_, bu, bf)) => match u.cmp(bu) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => f > *bf,
            },
        };
        if better {
            best = Some((scratch.clone(), u, f));
        }
    }
    Ok(best.expect("candidate iterator must be nonempty").0)
}

/// Exhaustive demand: the tie-broken best response over all `2^n` subsets.
pub struct BruteForceDemand<'a> {
    inst: &'a ContractInstance,
    cap: usize,
}

impl<'a> BruteForceDemand<'a> {
    pub fn new(inst: &'a ContractInstance) -> Self {
        Self::with_cap(inst, DEFAULT_DEMAND_CAP)
    }

    pub fn with_cap(inst: &'a ContractInstance, cap: usize) -> Self {
        BruteForceDemand { inst, cap }
    }
}

impl BestResponse for BruteForceDemand<'_> {
    fn best_response(&mut self, alpha: &Rational) -> Result<ActionSet> {
        brute_force_demand_capped(self.inst, alpha, self.cap)
    }
}

/// One-shot exhaustive demand with the default cap.
pub fn brute_force_demand(inst: &ContractInstance, alpha: &Rational) -> Result<ActionSet> {
    brute_force_demand_capped(inst, alpha, DEFAULT_DEMAND_CAP)
}

pub fn brute_force_demand_capped(
    inst: &ContractInstance,
    alpha: &Rational,
    cap: usize,
) -> Result<ActionSet> {
    let n = inst.n();
    check_cap(n, cap)?;
    scan_demand(inst, alpha, 0..(1u64 << n))
}

/// Demand for monotone supermodular rewards and monotone submodular costs.
///
/// Computes the same tie-broken best response as the exhaustive search. For
/// this function class the demanded sets are nested along increasing
/// contracts, so each query restricts enumeration to the interval between
/// the demands memoized at the nearest smaller and larger contracts.
pub struct SupermodularDemand<'a> {
    inst: &'a ContractInstance,
    cap: usize,
    memo: BTreeMap<Rational, ActionSet>,
}

impl<'a> SupermodularDemand<'a> {
    /// Caller asserts the class; no verification is performed.
    pub fn new(inst: &'a ContractInstance) -> Self {
        Self::with_cap(inst, DEFAULT_DEMAND_CAP)
    }

    pub fn with_cap(inst: &'a ContractInstance, cap: usize) -> Self {
        SupermodularDemand {
            inst,
            cap,
            memo: BTreeMap::new(),
        }
    }

    /// Debug construction: exhaustively verifies that the reward is monotone
    /// supermodular and the cost monotone submodular before any query.
    pub fn new_verified(inst: &'a ContractInstance) -> Result<Self> {
        verify_monotone_supermodular(inst.n(), &|s| inst.reward(s))?;
        verify_monotone_submodular(inst.n(), &|s| inst.cost(s))?;
        Ok(Self::new(inst))
    }
}

impl BestResponse for SupermodularDemand<'_> {
    fn best_response(&mut self, alpha: &Rational) -> Result<ActionSet> {
        let n = self.inst.n();
        check_cap(n, self.cap)?;
        if let Some(hit) = self.memo.get(alpha) {
            return Ok(hit.clone());
        }
        // Demanded sets form a chain across contracts: the answer contains
        // the demand at any smaller contract and is contained in the demand
        // at any larger one.
        let floor = self
            .memo
            .range(..alpha.clone())
            .next_back()
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| ActionSet::empty(n));
        let ceil = self
            .memo
            .range(alpha.clone()..)
            .next()
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| ActionSet::full(n));
        let floor_mask = floor.to_mask();
        let free: Vec<usize> = ceil.difference(&floor).indices();
        let count = 1u64 << free.len();
        let best = scan_demand(
            self.inst,
            alpha,
            (0..count).map(|pick| {
                let mut mask = floor_mask;
                for (j, &bit) in free.iter().enumerate() {
                    if pick & (1 << j) != 0 {
                        mask |= 1 << bit;
                    }
                }
                mask
            }),
        )?;
        self.memo.insert(alpha.clone(), best.clone());
        Ok(best)
    }
}

const CLASS_CHECK_CAP: usize = 12;

/// Exhaustively checks monotonicity and supermodularity of `f` over a ground
/// set of size `n <= 12`: for every set `S` and pair `a, b` outside `S`,
/// the marginal of `a` must not decrease when `b` is added.
pub fn verify_monotone_supermodular(
    n: usize,
    f: &dyn Fn(&ActionSet) -> Result<Rational>,
) -> Result<()> {
    verify_class(n, f, true, "supermodular reward")
}

/// Exhaustively checks monotonicity and submodularity of `c` (`n <= 12`).
pub fn verify_monotone_submodular(
    n: usize,
    f: &dyn Fn(&ActionSet) -> Result<Rational>,
) -> Result<()> {
    verify_class(n, f, false, "submodular cost")
}

fn verify_class(
    n: usize,
    f: &dyn Fn(&ActionSet) -> Result<Rational>,
    super_modular: bool,
    label: &str,
) -> Result<()> {
    if n > CLASS_CHECK_CAP {
        return Err(Error::InvalidArgument {
            detail: format!(
                "exhaustive class verification supports n <= {CLASS_CHECK_CAP}, got {n}"
            ),
        });
    }
    let size = 1u64 << n;
    let values: Vec<Rational> = (0..size)
        .map(|mask| f(&ActionSet::from_mask(n, mask)))
        .collect::<Result<_>>()?;
    for mask in 0..size {
        for a in 0..n {
            if mask & (1 << a) != 0 {
                continue;
            }
            let with_a = mask | (1 << a);
            let marginal_a = &values[with_a as usize] - &values[mask as usize];
            if marginal_a.is_negative() {
                return Err(Error::ClassViolation {
                    detail: format!(
                        "{label} is not monotone: adding {a} to {} decreases the value",
                        ActionSet::from_mask(n, mask)
                    ),
                });
            }
            for b in 0..n {
                if b == a || mask & (1 << b) != 0 {
                    continue;
                }
                let with_b = mask | (1 << b);
                let with_ab = with_a | (1 << b);
                let marginal_a_given_b = &values[with_ab as usize] - &values[with_b as usize];
                let violated = if super_modular {
                    marginal_a_given_b < marginal_a
                } else {
                    marginal_a_given_b > marginal_a
                };
                if violated {
                    return Err(Error::ClassViolation {
                        detail: format!(
                            "{label} marginal of {a} given {} moves the wrong way when {b} joins",
                            ActionSet::from_mask(n, mask)
                        ),
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::test_support::two_action_instance;
    use crate::model::{agent_utility, TableInstance};

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn two_action_demands() {
        let inst = two_action_instance();
        // Derived by enumerating all four subsets at alpha = 3/10:
        // utilities 0, 1/100, -3/100, -3/25.
        assert_eq!(
            brute_force_demand(&inst, &rat(3, 10)).unwrap().indices(),
            vec![0]
        );
        assert_eq!(
            agent_utility(&inst, &rat(3, 10), &ActionSet::from_mask(2, 0b11)).unwrap(),
            rat(-3, 25)
        );
        // Strictly positive costs push demand to the empty set at alpha = 0.
        assert!(brute_force_demand(&inst, &Rational::zero())
            .unwrap()
            .is_empty());
        // At alpha = 1 the full set wins.
        assert_eq!(
            brute_force_demand(&inst, &Rational::one())
                .unwrap()
                .indices(),
            vec![0, 1]
        );
    }

    #[test]
    fn cap_is_enforced() {
        let inst = two_action_instance();
        assert!(matches!(
            brute_force_demand_capped(&inst, &rat(1, 2), 1),
            Err(Error::GroundSetTooLarge { .. })
        ));
    }

    /// f(S) = (sum of w_i over S / total)^2 with w = (1, 2, 3); c(S) = |S|/10.
    fn square_instance() -> ContractInstance {
        let w = [1i64, 2, 3];
        let total = 6i64;
        let n = 3;
        let mut f = Vec::new();
        let mut c = Vec::new();
        for mask in 0u64..(1 << n) {
            let s: i64 = (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| w[i]).sum();
            f.push(&rat(s, total) * &rat(s, total));
            c.push(rat(mask.count_ones() as i64, 10));
        }
        TableInstance { n, f, c }.to_contract_instance().unwrap()
    }

    #[test]
    fn square_instance_is_certified_and_demand_matches_brute_force() {
        let inst = square_instance();
        let mut oracle = SupermodularDemand::new_verified(&inst).unwrap();
        // alpha = 1: enumeration over all 8 subsets gives the full set.
        assert_eq!(
            oracle.best_response(&Rational::one()).unwrap().indices(),
            vec![0, 1, 2]
        );
        assert!(oracle.best_response(&Rational::zero()).unwrap().is_empty());
        for num in 0..=10i64 {
            let alpha = rat(num, 10);
            assert_eq!(
                oracle.best_response(&alpha).unwrap(),
                brute_force_demand(&inst, &alpha).unwrap(),
                "alpha = {alpha}"
            );
        }
    }

    #[test]
    fn demanded_sets_form_a_chain() {
        let inst = square_instance();
        let mut previous = ActionSet::empty(3);
        for num in 0..=10i64 {
            let demanded = brute_force_demand(&inst, &rat(num, 10)).unwrap();
            assert!(previous.is_subset_of(&demanded), "chain broke at {num}/10");
            previous = demanded;
        }
    }

    #[test]
    fn warm_start_bounds_agree_with_brute_force_in_any_query_order() {
        let inst = square_instance();
        let mut oracle = SupermodularDemand::new(&inst);
        // Query out of order so both floor and ceiling bounds are exercised.
        for num in [10i64, 0, 5, 7, 2, 9, 1, 4, 8, 3, 6] {
            let alpha = rat(num, 10);
            assert_eq!(
                oracle.best_response(&alpha).unwrap(),
                brute_force_demand(&inst, &alpha).unwrap(),
                "alpha = {alpha}"
            );
        }
    }

    #[test]
    fn warm_start_matches_brute_force_on_generated_families_in_random_order() {
        use crate::generators::{generate, Family, GeneratedInstance, GeneratorSpec, SplitMix64};
        for seed in 0..12u64 {
            let family = if seed % 2 == 0 {
                Family::SupermodularSquare
            } else {
                Family::SubmodularCoverageCost
            };
            let spec = GeneratorSpec::new(family, seed).with_n(5);
            let GeneratedInstance::Table(table) = generate(&spec).unwrap() else {
                unreachable!()
            };
            let inst = table.to_contract_instance().unwrap();
            let mut oracle = SupermodularDemand::new(&inst);
            let mut rng = SplitMix64::new(seed ^ 0xfeed);
            for _ in 0..25 {
                let alpha = rng.unit_rational(30);
                assert_eq!(
                    oracle.best_response(&alpha).unwrap(),
                    brute_force_demand(&inst, &alpha).unwrap(),
                    "seed {seed}, alpha {alpha}"
                );
            }
        }
    }

    #[test]
    fn class_verification_rejects_violations() {
        // A submodular (not supermodular) reward: coverage-style.
        let inst = TableInstance {
            n: 2,
            f: vec![Rational::zero(), rat(1, 2), rat(1, 2), rat(3, 4)],
            c: vec![Rational::zero(); 4],
        }
        .to_contract_instance()
        .unwrap();
        assert!(matches!(
            SupermodularDemand::new_verified(&inst),
            Err(Error::ClassViolation { .. })
        ));
        // Non-monotone cost.
        let err = verify_monotone_submodular(1, &|s| {
            Ok(if s.is_empty() {
                rat(1, 2)
            } else {
                Rational::zero()
            })
        });
        assert!(matches!(err, Err(Error::ClassViolation { .. })));
    }
}
