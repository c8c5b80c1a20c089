//! Matching-based instances: bipartite task/resource graphs whose reward for
//! an edge set is the best matching inside it, exact maximum-weight matching
//! over an ordered additive weight group, and the induced demand oracle.
//!
//! Tie-breaking toward the principal is realized inside the search through
//! lexicographic weights (utility first, then reward); remaining ties resolve
//! to the canonically smallest edge set, matching the subset-level demand
//! order exactly.

use serde::{Deserialize, Serialize};

use crate::envelope::BestResponse;
use crate::error::{Error, Result};
use crate::model::{CachedFunction, ContractInstance};
use crate::rational::Rational;
use crate::set::ActionSet;

/// One edge of a bipartite instance: task `v`, resource `u`, per-edge reward
/// `f >= 0` and cost `c >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteEdge {
    pub v: String,
    pub u: String,
    pub f: Rational,
    pub c: Rational,
}

/// A bipartite task/resource graph with per-edge rewards and costs.
///
/// When `normalized` is set, the unconstrained maximum-weight matching under
/// the rewards must not exceed 1, so the induced reward function maps every
/// edge set into [0, 1].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteInstance {
    pub tasks: Vec<String>,
    pub resources: Vec<String>,
    pub edges: Vec<BipartiteEdge>,
    #[serde(default)]
    pub normalized: bool,
}

impl BipartiteInstance {
    pub fn validate(&self) -> Result<()> {
        self.indexed()?;
        for e in &self.edges {
            if e.f.is_negative() {
                return Err(Error::NegativeEdgeValue {
                    v: e.v.clone(),
                    u: e.u.clone(),
                    field: "reward",
                    value: e.f.clone(),
                });
            }
            if e.c.is_negative() {
                return Err(Error::NegativeEdgeValue {
                    v: e.v.clone(),
                    u: e.u.clone(),
                    field: "cost",
                    value: e.c.clone(),
                });
            }
        }
        if self.normalized {
            let max = self.max_reward_matching_value()?;
            if max > Rational::one() {
                return Err(Error::NormalizationViolation { max_matching: max });
            }
        }
        Ok(())
    }

    /// Edge endpoints as (task index, resource index) pairs.
    pub(crate) fn indexed(&self) -> Result<Vec<(usize, usize)>> {
        let find = |names: &[String], name: &str| -> Result<usize> {
            names
                .iter()
                .position(|x| x == name)
                .ok_or_else(|| Error::UnknownEndpoint {
                    name: name.to_string(),
                })
        };
        for (names, side) in [(&self.tasks, "task"), (&self.resources, "resource")] {
            for (i, a) in names.iter().enumerate() {
                if names[..i].contains(a) {
                    return Err(Error::InvalidInstance {
                        detail: format!("duplicate {side} name {a:?}"),
                    });
                }
            }
        }
        let mut ends = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let pair = (find(&self.tasks, &e.v)?, find(&self.resources, &e.u)?);
            if ends.contains(&pair) {
                return Err(Error::DuplicateEdge {
                    v: e.v.clone(),
                    u: e.u.clone(),
                });
            }
            ends.push(pair);
        }
        Ok(ends)
    }

    /// Value of the unconstrained maximum-weight matching under the edge
    /// rewards.
    pub fn max_reward_matching_value(&self) -> Result<Rational> {
        let ends = self.indexed()?;
        let weights: Vec<Rational> = self.edges.iter().map(|e| e.f.clone()).collect();
        let (value, _) = optimum_matching(
            self.tasks.len(),
            self.resources.len(),
            &ends,
            &weights,
            false,
            &[],
            &[],
        )
        .expect("non-perfect matching always exists");
        Ok(value)
    }

    /// Scales rewards and costs jointly so the maximum matching reward is at
    /// most 1. Joint scaling preserves the demand at every contract and all
    /// critical values.
    pub fn normalized_copy(&self) -> Result<BipartiteInstance> {
        let max = self.max_reward_matching_value()?;
        let mut copy = self.clone();
        if max > Rational::one() {
            for e in &mut copy.edges {
                e.f = &e.f / &max;
                e.c = &e.c / &max;
            }
        }
        copy.normalized = true;
        copy.validate()?;
        Ok(copy)
    }
}

/// A set of edges of a [`BipartiteInstance`] with pairwise distinct
/// endpoints, stored as sorted edge indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Matching {
    pub edge_indices: Vec<usize>,
}

impl Matching {
    pub fn to_action_set(&self, edge_count: usize) -> ActionSet {
        ActionSet::from_indices(edge_count, &self.edge_indices)
    }

    pub fn edges<'g>(&self, g: &'g BipartiteInstance) -> Vec<&'g BipartiteEdge> {
        self.edge_indices.iter().map(|&i| &g.edges[i]).collect()
    }

    /// Checks the defining property: no two edges share an endpoint.
    pub fn is_valid_for(&self, g: &BipartiteInstance) -> bool {
        let Ok(ends) = g.indexed() else {
            return false;
        };
        let mut seen_v = std::collections::HashSet::new();
        let mut seen_u = std::collections::HashSet::new();
        self.edge_indices
            .iter()
            .all(|&i| i < ends.len() && seen_v.insert(ends[i].0) && seen_u.insert(ends[i].1))
    }

    pub fn reward_sum(&self, g: &BipartiteInstance) -> Rational {
        self.edge_indices
            .iter()
            .fold(Rational::zero(), |acc, &i| acc + &g.edges[i].f)
    }

    pub fn cost_sum(&self, g: &BipartiteInstance) -> Rational {
        self.edge_indices
            .iter()
            .fold(Rational::zero(), |acc, &i| acc + &g.edges[i].c)
    }
}

/// A weight in the ordered group `Q x Q` under componentwise addition and
/// lexicographic comparison: utility contribution first, reward second.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LexWeight {
    pub primary: Rational,
    pub secondary: Rational,
}

impl LexWeight {
    pub fn new(primary: Rational, secondary: Rational) -> Self {
        LexWeight { primary, secondary }
    }
}

/// An ordered abelian group of matching weights. The augmenting-path search
/// only ever adds, subtracts and compares weights, so any such group works.
pub trait GroupWeight: Clone + Ord {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
}

impl GroupWeight for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

impl GroupWeight for LexWeight {
    fn zero() -> Self {
        LexWeight::new(Rational::zero(), Rational::zero())
    }
    fn add(&self, other: &Self) -> Self {
        LexWeight::new(
            &self.primary + &other.primary,
            &self.secondary + &other.secondary,
        )
    }
    fn sub(&self, other: &Self) -> Self {
        LexWeight::new(
            &self.primary - &other.primary,
            &self.secondary - &other.secondary,
        )
    }
}

/// Exact optimum matching by successive maximum-gain augmenting paths.
///
/// Bellman-Ford relaxation over the residual graph finds the augmenting path
/// of maximum total gain; augmenting along it keeps the matching maximum
/// among matchings of its cardinality, so stopping once the best gain is
/// non-positive yields the overall maximum (or, with `require_perfect`, the
/// maximum-weight perfect matching after all augmentations).
///
/// `forced` edges are always included (their endpoints are removed from the
/// search), `banned` edges never. Returns the total weight and the chosen
/// edge indices, or `None` when the constraints are unsatisfiable or no
/// perfect matching exists.
pub(crate) fn optimum_matching<W: GroupWeight>(
    nv: usize,
    nu: usize,
    ends: &[(usize, usize)],
    weights: &[W],
    require_perfect: bool,
    forced: &[bool],
    banned: &[bool],
) -> Option<(W, Vec<usize>)> {
    debug_assert_eq!(ends.len(), weights.len());
    if require_perfect && nv != nu {
        return None;
    }
    let is_forced = |e: usize| forced.get(e).copied().unwrap_or(false);
    let is_banned = |e: usize| banned.get(e).copied().unwrap_or(false);

    let mut used_l = vec![false; nv];
    let mut used_r = vec![false; nu];
    let mut chosen: Vec<usize> = Vec::new();
    for (e, &(v, u)) in ends.iter().enumerate() {
        if is_forced(e) {
            if is_banned(e) || used_l[v] || used_r[u] {
                return None;
            }
            used_l[v] = true;
            used_r[u] = true;
            chosen.push(e);
        }
    }

    let active_edge = |e: usize| -> bool {
        if is_banned(e) || is_forced(e) {
            return false;
        }
        let (v, u) = ends[e];
        !used_l[v] && !used_r[u]
    };

    let mut match_l: Vec<Option<usize>> = vec![None; nv];
    let mut match_r: Vec<Option<usize>> = vec![None; nu];
    let node_count = nv + nu;

    loop {
        // Maximum-gain augmenting path from any free left vertex.
        let mut dist: Vec<Option<W>> = vec![None; node_count];
        let mut pred_right: Vec<Option<usize>> = vec![None; nu];
        for v in 0..nv {
            if !used_l[v] && match_l[v].is_none() {
                dist[v] = Some(W::zero());
            }
        }
        for _round in 0..=node_count {
            let mut changed = false;
            for e in 0..ends.len() {
                if !active_edge(e) {
                    continue;
                }
                let (v, u) = ends[e];
                if match_l[v] == Some(e) {
                    // In the matching: traversable right-to-left, losing w(e).
                    if let Some(du) = dist[nv + u].clone() {
                        let cand = du.sub(&weights[e]);
                        if dist[v].as_ref().is_none_or(|cur| &cand > cur) {
                            dist[v] = Some(cand);
                            changed = true;
                        }
                    }
                } else if let Some(dv) = dist[v].clone() {
                    let cand = dv.add(&weights[e]);
                    if dist[nv + u].as_ref().is_none_or(|cur| &cand > cur) {
                        dist[nv + u] = Some(cand);
                        pred_right[u] = Some(e);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let mut best: Option<(usize, W)> = None;
        for u in 0..nu {
            if used_r[u] || match_r[u].is_some() {
                continue;
            }
            if let Some(d) = dist[nv + u].clone() {
                if best.as_ref().is_none_or(|(_, bd)| &d > bd) {
                    best = Some((u, d));
                }
            }
        }

        match best {
            None => break,
            Some((_, gain)) if !require_perfect && gain <= W::zero() => break,
            Some((u_star, _)) => {
                let mut u = u_star;
                loop {
                    let e = pred_right[u].expect("augmenting path predecessor");
                    let (v, _) = ends[e];
                    let displaced = match_l[v];
                    match_l[v] = Some(e);
                    match_r[u] = Some(e);
                    match displaced {
                        None => break,
                        Some(pe) => {
                            let (_, pu) = ends[pe];
                            u = pu;
                        }
                    }
                }
            }
        }
    }

    if require_perfect {
        let all_left = (0..nv).all(|v| used_l[v] || match_l[v].is_some());
        let all_right = (0..nu).all(|u| used_r[u] || match_r[u].is_some());
        if !all_left || !all_right {
            return None;
        }
    }

    chosen.extend(match_l.iter().flatten().copied());
    chosen.sort_unstable();
    let total = chosen
        .iter()
        .fold(W::zero(), |acc, &e| acc.add(&weights[e]));
    Some((total, chosen))
}

/// The optimum matching with the canonically smallest edge set among all
/// optima: edges are considered from the highest index down, and each is
/// excluded whenever the optimum value survives without it.
///
/// A witness optimum consistent with the decisions so far makes most
/// exclusions free: banning an edge outside the witness cannot change the
/// optimum, so the solver only reruns for witness edges.
pub(crate) fn canonical_optimum_matching<W: GroupWeight>(
    nv: usize,
    nu: usize,
    ends: &[(usize, usize)],
    weights: &[W],
    require_perfect: bool,
) -> Option<Vec<usize>> {
    let m = ends.len();
    let (best, initial) = optimum_matching(nv, nu, ends, weights, require_perfect, &[], &[])?;
    let mut witness = vec![false; m];
    for &e in &initial {
        witness[e] = true;
    }
    let mut banned = vec![false; m];
    let mut forced = vec![false; m];
    for e in (0..m).rev() {
        if !witness[e] {
            banned[e] = true;
            continue;
        }
        banned[e] = true;
        let replacement =
            optimum_matching(nv, nu, ends, weights, require_perfect, &forced, &banned)
                .filter(|(v, _)| *v == best);
        match replacement {
            Some((_, chosen)) => {
                witness.iter_mut().for_each(|w| *w = false);
                for &x in &chosen {
                    witness[x] = true;
                }
            }
            None => {
                banned[e] = false;
                forced[e] = true;
            }
        }
    }
    Some((0..m).filter(|&e| forced[e]).collect())
}

/// Maximum-weight matching under a lexicographic edge weighting, with
/// deterministic tie resolution toward the canonically smallest edge set.
/// Edges with negative primary weight are never included; zero-primary edges
/// appear exactly when they raise the secondary sum.
pub fn max_weight_matching(
    g: &BipartiteInstance,
    weight: impl Fn(&BipartiteEdge) -> LexWeight,
) -> Result<Matching> {
    let ends = g.indexed()?;
    let weights: Vec<LexWeight> = g.edges.iter().map(weight).collect();
    let edge_indices =
        canonical_optimum_matching(g.tasks.len(), g.resources.len(), &ends, &weights, false)
            .expect("unconstrained matching always exists");
    Ok(Matching { edge_indices })
}

/// The agent's best response on a matching instance under contract `alpha`:
/// the maximum-weight matching with edge weight `alpha * f_e - c_e`, ties
/// toward higher reward, then toward the canonically smallest edge set.
pub fn matching_demand(g: &BipartiteInstance, alpha: &Rational) -> Result<Matching> {
    max_weight_matching(g, |e| LexWeight::new(alpha * &e.f - &e.c, e.f.clone()))
}

/// Demand oracle view of a matching instance over the edge ground set.
pub struct MatchingDemand<'a> {
    g: &'a BipartiteInstance,
}

impl<'a> MatchingDemand<'a> {
    pub fn new(g: &'a BipartiteInstance) -> Result<Self> {
        g.validate()?;
        Ok(MatchingDemand { g })
    }
}

impl BestResponse for MatchingDemand<'_> {
    fn best_response(&mut self, alpha: &Rational) -> Result<ActionSet> {
        Ok(matching_demand(self.g, alpha)?.to_action_set(self.g.edges.len()))
    }
}

/// The contract instance induced by a normalized matching instance over the
/// ground set of edges: reward of an edge set is the maximum-weight matching
/// it contains, cost is additive.
pub fn make_matching_contract_instance(g: &BipartiteInstance) -> Result<ContractInstance> {
    if !g.normalized {
        return Err(Error::NotNormalized);
    }
    g.validate()?;
    let ends = g.indexed()?;
    let nv = g.tasks.len();
    let nu = g.resources.len();
    let fvals: Vec<Rational> = g.edges.iter().map(|e| e.f.clone()).collect();
    let m = g.edges.len();
    let reward = CachedFunction::new(m, move |s: &ActionSet| {
        let banned: Vec<bool> = (0..m).map(|e| !s.contains(e)).collect();
        optimum_matching(nv, nu, &ends, &fvals, false, &[], &banned)
            .expect("non-perfect matching always exists")
            .0
    });
    let cvals: Vec<Rational> = g.edges.iter().map(|e| e.c.clone()).collect();
    let cost = CachedFunction::new(m, move |s: &ActionSet| {
        s.iter().fold(Rational::zero(), |acc, i| acc + &cvals[i])
    });
    ContractInstance::new(Box::new(reward), Box::new(cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::demand_compare;
    use crate::oracle::brute_force_demand;
    use std::cmp::Ordering;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn edge(v: &str, u: &str, f: Rational, c: Rational) -> BipartiteEdge {
        BipartiteEdge {
            v: v.to_string(),
            u: u.to_string(),
            f,
            c,
        }
    }

    /// The three-edge graph with f(v1,u1) = f(v1,u2) = 2, f(v2,u1) = 1,
    /// whose induced reward is neither submodular nor supermodular.
    fn three_edge_graph() -> BipartiteInstance {
        BipartiteInstance {
            tasks: vec!["v1".into(), "v2".into()],
            resources: vec!["u1".into(), "u2".into()],
            edges: vec![
                edge("v1", "u1", rat(2, 1), Rational::zero()),
                edge("v1", "u2", rat(2, 1), Rational::zero()),
                edge("v2", "u1", rat(1, 1), Rational::zero()),
            ],
            normalized: false,
        }
    }

    /// The same graph scaled by 1/5 with uniform cost 1/10; normalized.
    fn scaled_three_edge_graph() -> BipartiteInstance {
        BipartiteInstance {
            tasks: vec!["v1".into(), "v2".into()],
            resources: vec!["u1".into(), "u2".into()],
            edges: vec![
                edge("v1", "u1", rat(2, 5), rat(1, 10)),
                edge("v1", "u2", rat(2, 5), rat(1, 10)),
                edge("v2", "u1", rat(1, 5), rat(1, 10)),
            ],
            normalized: true,
        }
    }

    #[test]
    fn induced_reward_values() {
        let g = three_edge_graph();
        let ends = g.indexed().unwrap();
        let fvals: Vec<Rational> = g.edges.iter().map(|e| e.f.clone()).collect();
        let value_within = |mask: u64| -> Rational {
            let banned: Vec<bool> = (0..3).map(|e| mask & (1 << e) == 0).collect();
            optimum_matching(2, 2, &ends, &fvals, false, &[], &banned)
                .unwrap()
                .0
        };
        assert_eq!(value_within(0b000), Rational::zero());
        assert_eq!(value_within(0b100), rat(1, 1)); // {(v2,u1)}
        assert_eq!(value_within(0b101), rat(2, 1)); // both u1 edges: only one fits
        assert_eq!(value_within(0b111), rat(3, 1)); // (v1,u2) + (v2,u1)
    }

    #[test]
    fn max_weight_matching_examples() {
        let empty = BipartiteInstance {
            tasks: vec![],
            resources: vec![],
            edges: vec![],
            normalized: true,
        };
        assert_eq!(
            max_weight_matching(&empty, |_| LexWeight::zero())
                .unwrap()
                .edge_indices,
            Vec::<usize>::new()
        );

        // Scaled three-edge graph at alpha = 1: (v1,u2) + (v2,u1), utility 2/5.
        let g = scaled_three_edge_graph();
        let m = matching_demand(&g, &Rational::one()).unwrap();
        assert_eq!(m.edge_indices, vec![1, 2]);
        let utility = m
            .edges(&g)
            .iter()
            .fold(Rational::zero(), |acc, e| acc + &e.f - &e.c);
        assert_eq!(utility, rat(2, 5));

        // A zero-utility edge is included when it raises the reward.
        let single = BipartiteInstance {
            tasks: vec!["v".into()],
            resources: vec!["u".into()],
            edges: vec![edge("v", "u", rat(1, 5), rat(1, 5))],
            normalized: true,
        };
        let m = matching_demand(&single, &Rational::one()).unwrap();
        assert_eq!(m.edge_indices, vec![0]);
        // But not when the reward is zero too.
        let pointless = BipartiteInstance {
            tasks: vec!["v".into()],
            resources: vec!["u".into()],
            edges: vec![edge("v", "u", Rational::zero(), Rational::zero())],
            normalized: true,
        };
        assert!(matching_demand(&pointless, &Rational::one())
            .unwrap()
            .edge_indices
            .is_empty());
    }

    #[test]
    fn lex_weights_add_componentwise_and_compare_lexicographically() {
        let a = LexWeight::new(rat(1, 2), Rational::zero());
        let b = LexWeight::new(rat(1, 2), rat(1, 5));
        let c = LexWeight::new(rat(2, 3), rat(-1, 1));
        assert!(a < b && b < c);
        assert_eq!(a.add(&b), LexWeight::new(Rational::one(), rat(1, 5)));
        assert_eq!(c.sub(&c), LexWeight::zero());
    }

    #[test]
    fn demand_at_zero_contract_is_empty() {
        let g = scaled_three_edge_graph();
        assert!(matching_demand(&g, &Rational::zero())
            .unwrap()
            .edge_indices
            .is_empty());
    }

    #[test]
    fn validation_catches_malformed_graphs() {
        let mut g = scaled_three_edge_graph();
        g.edges.push(edge("v1", "u1", rat(1, 10), Rational::zero()));
        assert!(matches!(g.validate(), Err(Error::DuplicateEdge { .. })));

        let mut g = scaled_three_edge_graph();
        g.edges[0].v = "v9".into();
        assert!(matches!(g.validate(), Err(Error::UnknownEndpoint { .. })));

        let mut g = scaled_three_edge_graph();
        g.edges[0].c = rat(-1, 10);
        assert!(matches!(g.validate(), Err(Error::NegativeEdgeValue { .. })));

        // The unscaled graph has matching reward 3, so the normalized flag lies.
        let mut g = three_edge_graph();
        g.normalized = true;
        assert!(matches!(
            g.validate(),
            Err(Error::NormalizationViolation { .. })
        ));
        assert!(matches!(
            make_matching_contract_instance(&three_edge_graph()),
            Err(Error::NotNormalized)
        ));
    }

    #[test]
    fn normalized_copy_scales_jointly() {
        let g = three_edge_graph();
        let norm = g.normalized_copy().unwrap();
        assert_eq!(norm.max_reward_matching_value().unwrap(), Rational::one());
        assert_eq!(norm.edges[0].f, rat(2, 3));
        // Demand structure is preserved under joint scaling.
        for num in 0..=6i64 {
            let alpha = rat(num, 6);
            assert_eq!(
                matching_demand(&g, &alpha).unwrap(),
                matching_demand(&norm, &alpha).unwrap()
            );
        }
    }

    fn random_graph(seed: u64) -> BipartiteInstance {
        let mut rng = crate::generators::SplitMix64::new(seed);
        let nv = 2 + (rng.next_below(3) as usize);
        let nu = 2 + (rng.next_below(3) as usize);
        let m = 3 + (rng.next_below(8) as usize).min(nv * nu - 3);
        let tasks: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
        let resources: Vec<String> = (0..nu).map(|i| format!("u{i}")).collect();
        let mut pairs = Vec::new();
        while pairs.len() < m {
            let p = (
                rng.next_below(nv as u64) as usize,
                rng.next_below(nu as u64) as usize,
            );
            if !pairs.contains(&p) {
                pairs.push(p);
            }
        }
        let edges = pairs
            .into_iter()
            .map(|(v, u)| BipartiteEdge {
                v: tasks[v].clone(),
                u: resources[u].clone(),
                f: rng.unit_rational(20),
                c: rng.unit_rational(20),
            })
            .collect();
        BipartiteInstance {
            tasks,
            resources,
            edges,
            normalized: false,
        }
        .normalized_copy()
        .unwrap()
    }

    #[test]
    fn matching_demand_agrees_with_subset_enumeration() {
        for seed in 0..25u64 {
            let g = random_graph(seed);
            let inst = make_matching_contract_instance(&g).unwrap();
            let mut rng = crate::generators::SplitMix64::new(seed ^ 0xabcdef);
            for _ in 0..8 {
                let alpha = rng.unit_rational(30);
                let by_matching = matching_demand(&g, &alpha).unwrap();
                assert!(by_matching.is_valid_for(&g), "seed {seed}");
                for &e in &by_matching.edge_indices {
                    let w = &alpha * &g.edges[e].f - &g.edges[e].c;
                    assert!(
                        !w.is_negative(),
                        "negative-utility edge chosen, seed {seed}"
                    );
                }
                let by_subsets = brute_force_demand(&inst, &alpha).unwrap();
                assert_eq!(
                    by_matching.to_action_set(g.edges.len()),
                    by_subsets,
                    "seed {seed}, alpha {alpha}"
                );
            }
        }
    }

    #[test]
    fn engine_matches_exhaustive_enumeration() {
        // Independent oracle: enumerate every subset of edges, keep the
        // matchings, take the lexicographic maximum weight.
        for seed in 100..140u64 {
            let g = random_graph(seed);
            let ends = g.indexed().unwrap();
            let alpha = crate::generators::SplitMix64::new(seed).unit_rational(9);
            let weights: Vec<LexWeight> = g
                .edges
                .iter()
                .map(|e| LexWeight::new(&alpha * &e.f - &e.c, e.f.clone()))
                .collect();
            let m = g.edges.len();
            let mut best: Option<LexWeight> = None;
            for mask in 0u64..(1 << m) {
                let picked: Vec<usize> = (0..m).filter(|&e| mask & (1 << e) != 0).collect();
                let mut lused = std::collections::HashSet::new();
                let mut rused = std::collections::HashSet::new();
                if !picked
                    .iter()
                    .all(|&e| lused.insert(ends[e].0) && rused.insert(ends[e].1))
                {
                    continue;
                }
                let total = picked
                    .iter()
                    .fold(LexWeight::zero(), |acc, &e| acc.add(&weights[e]));
                if best.as_ref().is_none_or(|b| &total > b) {
                    best = Some(total);
                }
            }
            let (engine_value, _) = optimum_matching(
                g.tasks.len(),
                g.resources.len(),
                &ends,
                &weights,
                false,
                &[],
                &[],
            )
            .unwrap();
            assert_eq!(engine_value, best.unwrap(), "seed {seed}");
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        /// Engine value equals the exhaustive lexicographic maximum on
        /// arbitrary small weighted graphs, including negative, zero and
        /// tied weights and rectangular sides.
        #[test]
        fn engine_value_matches_enumeration_on_arbitrary_weights(
            nv in 1usize..4,
            nu in 1usize..4,
            picks in proptest::collection::vec((0usize..4, 0usize..4, -6i64..6, 0i64..4), 0..7),
            require_perfect in proptest::bool::ANY,
        ) {
            let mut ends: Vec<(usize, usize)> = Vec::new();
            let mut weights: Vec<LexWeight> = Vec::new();
            for (v, u, p, s) in picks {
                let pair = (v % nv, u % nu);
                if !ends.contains(&pair) {
                    ends.push(pair);
                    weights.push(LexWeight::new(rat(p, 3), rat(s, 2)));
                }
            }
            let m = ends.len();
            let mut best: Option<LexWeight> = None;
            for mask in 0u64..(1 << m) {
                let picked: Vec<usize> = (0..m).filter(|&e| mask & (1 << e) != 0).collect();
                let mut lused = std::collections::HashSet::new();
                let mut rused = std::collections::HashSet::new();
                if !picked.iter().all(|&e| lused.insert(ends[e].0) && rused.insert(ends[e].1)) {
                    continue;
                }
                if require_perfect && picked.len() != nv.max(nu) {
                    continue;
                }
                let total = picked.iter().fold(LexWeight::zero(), |acc, &e| acc.add(&weights[e]));
                if best.as_ref().is_none_or(|b| &total > b) {
                    best = Some(total);
                }
            }
            if require_perfect && nv != nu {
                best = None;
            }
            let engine = optimum_matching(nv, nu, &ends, &weights, require_perfect, &[], &[]);
            proptest::prop_assert_eq!(engine.map(|(v, _)| v), best);
        }
    }

    #[test]
    fn demand_oracle_contract_holds_against_arbitrary_challengers() {
        let g = scaled_three_edge_graph();
        let inst = make_matching_contract_instance(&g).unwrap();
        let m = g.edges.len();
        for num in 0..=8i64 {
            let alpha = rat(num, 8);
            let demanded = matching_demand(&g, &alpha).unwrap().to_action_set(m);
            for mask in 0u64..(1 << m) {
                let challenger = ActionSet::from_mask(m, mask);
                assert_ne!(
                    demand_compare(&inst, &alpha, &demanded, &challenger).unwrap(),
                    Ordering::Less,
                    "challenger {challenger} beats demand at alpha {alpha}"
                );
            }
        }
    }
}
