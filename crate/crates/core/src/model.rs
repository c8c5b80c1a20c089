//! The contract model: reward/cost set functions queried through value
//! oracles, the two parties' utilities, and the agent's tie-broken
//! preference order over action sets.

use std::cmp::Ordering;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::set::ActionSet;

/// A value oracle for a set function over a ground set of fixed size.
///
/// Implementations must be pure: the same set always evaluates to the same
/// value, with no observable side effects (internal caching is fine).
pub trait SetFunction: Send + Sync {
    fn ground_size(&self) -> usize;
    fn eval(&self, s: &ActionSet) -> Rational;
}

/// A set function given by an explicit table indexed by bit mask.
pub struct TableFunction {
    n: usize,
    values: Vec<Rational>,
}

impl TableFunction {
    pub fn new(n: usize, values: Vec<Rational>) -> Result<Self> {
        if n > 20 {
            return Err(Error::InvalidInstance {
                detail: format!("explicit table over {n} actions would need 2^{n} entries"),
            });
        }
        if values.len() != 1 << n {
            return Err(Error::InvalidInstance {
                detail: format!(
                    "table for n = {n} must have {} entries, got {}",
                    1usize << n,
                    values.len()
                ),
            });
        }
        Ok(TableFunction { n, values })
    }
}

impl SetFunction for TableFunction {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, s: &ActionSet) -> Rational {
        self.values[s.to_mask() as usize].clone()
    }
}

/// An additive set function with one weight per ground-set element.
pub struct AdditiveFunction {
    weights: Vec<Rational>,
}

impl AdditiveFunction {
    pub fn new(weights: Vec<Rational>) -> Self {
        AdditiveFunction { weights }
    }
}

impl SetFunction for AdditiveFunction {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn eval(&self, s: &ActionSet) -> Rational {
        s.iter()
            .fold(Rational::zero(), |acc, i| acc + &self.weights[i])
    }
}

/// A set function computed by a closure, with an internal memo table so
/// expensive evaluations (e.g. matching computations) run once per set.
pub struct CachedFunction<F> {
    n: usize,
    f: F,
    cache: Mutex<std::collections::HashMap<ActionSet, Rational>>,
}

impl<F: Fn(&ActionSet) -> Rational + Send + Sync> CachedFunction<F> {
    pub fn new(n: usize, f: F) -> Self {
        CachedFunction {
            n,
            f,
            cache: Mutex::new(std::collections::HashMap::new()),
        }
    }
}

impl<F: Fn(&ActionSet) -> Rational + Send + Sync> SetFunction for CachedFunction<F> {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, s: &ActionSet) -> Rational {
        if let Some(v) = self.cache.lock().unwrap().get(s) {
            return v.clone();
        }
        let v = (self.f)(s);
        self.cache.lock().unwrap().insert(s.clone(), v.clone());
        v
    }
}

/// A contract instance: ground set, reward oracle `f: 2^A -> [0,1]` and cost
/// oracle `c: 2^A -> R>=0`. Range constraints are checked on every query and
/// raise an error instead of clamping, since a silently clamped value would
/// corrupt every downstream breakpoint.
pub struct ContractInstance {
    n: usize,
    reward: Box<dyn SetFunction>,
    cost: Box<dyn SetFunction>,
}

impl ContractInstance {
    pub fn new(reward: Box<dyn SetFunction>, cost: Box<dyn SetFunction>) -> Result<Self> {
        if reward.ground_size() != cost.ground_size() {
            return Err(Error::GroundSetMismatch {
                reward: reward.ground_size(),
                cost: cost.ground_size(),
            });
        }
        let n = reward.ground_size();
        Ok(ContractInstance { n, reward, cost })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn reward(&self, s: &ActionSet) -> Result<Rational> {
        let value = self.reward.eval(s);
        if value.is_negative() || value > Rational::one() {
            return Err(Error::RewardOutOfRange {
                set: s.to_string(),
                value,
            });
        }
        Ok(value)
    }

    pub fn cost(&self, s: &ActionSet) -> Result<Rational> {
        let value = self.cost.eval(s);
        if value.is_negative() {
            return Err(Error::NegativeCost {
                set: s.to_string(),
                value,
            });
        }
        Ok(value)
    }
}

/// `u_a(alpha, S) = alpha * f(S) - c(S)`.
pub fn agent_utility(inst: &ContractInstance, alpha: &Rational, s: &ActionSet) -> Result<Rational> {
    Ok(alpha * inst.reward(s)? - inst.cost(s)?)
}

/// `u_p(alpha, S) = (1 - alpha) * f(S)`.
pub fn principal_utility(
    inst: &ContractInstance,
    alpha: &Rational,
    s: &ActionSet,
) -> Result<Rational> {
    Ok((Rational::one() - alpha) * inst.reward(s)?)
}

/// The agent's preference order between two action sets under contract
/// `alpha`: higher agent utility first, ties broken toward the higher reward
/// (in favor of the principal), remaining ties toward the canonically
/// smaller bit vector. `Ordering::Greater` means `s` is demanded over `t`.
pub fn demand_compare(
    inst: &ContractInstance,
    alpha: &Rational,
    s: &ActionSet,
    t: &ActionSet,
) -> Result<Ordering> {
    let us = agent_utility(inst, alpha, s)?;
    let ut = agent_utility(inst, alpha, t)?;
    Ok(us
        .cmp(&ut)
        .then_with(|| {
            let fs = self::reward_unchecked(inst, s);
            let ft = self::reward_unchecked(inst, t);
            fs.cmp(&ft)
        })
        .then_with(|| t.cmp(s)))
}

fn reward_unchecked(inst: &ContractInstance, s: &ActionSet) -> Rational {
    // agent_utility above already range-checked this set.
    inst.reward.eval(s)
}

/// A critical value of the contract parameter together with the set demanded
/// there and both parties' utilities.
#[derive(Clone, Debug, Serialize)]
pub struct Breakpoint {
    pub alpha: Rational,
    pub demanded: ActionSet,
    pub reward_value: Rational,
    pub cost_value: Rational,
    pub agent_utility: Rational,
    pub principal_utility: Rational,
}

impl Breakpoint {
    pub fn from_parts(
        inst: &ContractInstance,
        alpha: Rational,
        demanded: ActionSet,
    ) -> Result<Self> {
        let reward_value = inst.reward(&demanded)?;
        let cost_value = inst.cost(&demanded)?;
        let agent_utility = &alpha * &reward_value - &cost_value;
        let principal_utility = (Rational::one() - &alpha) * &reward_value;
        Ok(Breakpoint {
            alpha,
            demanded,
            reward_value,
            cost_value,
            agent_utility,
            principal_utility,
        })
    }
}

/// Serializable explicit-table contract instance: `f[mask]` and `c[mask]`
/// indexed by the numeric value of the action set.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TableInstance {
    pub n: usize,
    pub f: Vec<Rational>,
    pub c: Vec<Rational>,
}

impl TableInstance {
    pub fn validate(&self) -> Result<()> {
        let expected = 1usize
            .checked_shl(self.n as u32)
            .filter(|_| self.n <= 20)
            .ok_or_else(|| Error::InvalidInstance {
                detail: format!("table instance with n = {} is too large", self.n),
            })?;
        if self.f.len() != expected || self.c.len() != expected {
            return Err(Error::InvalidInstance {
                detail: format!(
                    "table instance for n = {} needs {} rewards and costs, got {} and {}",
                    self.n,
                    expected,
                    self.f.len(),
                    self.c.len()
                ),
            });
        }
        for (mask, v) in self.f.iter().enumerate() {
            if v.is_negative() || v > &Rational::one() {
                return Err(Error::RewardOutOfRange {
                    set: ActionSet::from_mask(self.n, mask as u64).to_string(),
                    value: v.clone(),
                });
            }
        }
        for (mask, v) in self.c.iter().enumerate() {
            if v.is_negative() {
                return Err(Error::NegativeCost {
                    set: ActionSet::from_mask(self.n, mask as u64).to_string(),
                    value: v.clone(),
                });
            }
        }
        if !self.f[0].is_zero() || !self.c[0].is_zero() {
            return Err(Error::InvalidInstance {
                detail: "f and c must both map the empty set to 0".to_string(),
            });
        }
        Ok(())
    }

    pub fn to_contract_instance(&self) -> Result<ContractInstance> {
        self.validate()?;
        let reward = TableFunction::new(self.n, self.f.clone())?;
        let cost = TableFunction::new(self.n, self.c.clone())?;
        ContractInstance::new(Box::new(reward), Box::new(cost))
    }
}
