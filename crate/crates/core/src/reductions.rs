//! Reduction pipeline for parametric instances: shortest s-t path with
//! affine weights to minimum-weight perfect matching, minimum-weight perfect
//! matching to a valid agent-demand instance, and the one-sided-cost
//! reformulation over resource vertices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{
    canonical_optimum_matching, optimum_matching, BipartiteEdge, BipartiteInstance, LexWeight,
    Matching,
};
use crate::model::{AdditiveFunction, CachedFunction, ContractInstance};
use crate::rational::Rational;
use crate::set::ActionSet;

/// A directed edge with affine parametric weight `w(alpha) = c - alpha * f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathEdge {
    pub from: String,
    pub to: String,
    pub c: Rational,
    pub f: Rational,
}

/// A parametric shortest s-t path instance: directed graph, affine edge
/// weights `c_e - alpha * f_e` with `c_e >= 0`, and a validity range on
/// which every edge weight stays nonnegative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParametricPathInstance {
    pub vertices: Vec<String>,
    pub s: String,
    pub t: String,
    pub edges: Vec<PathEdge>,
    pub range: (Rational, Rational),
}

impl ParametricPathInstance {
    pub fn validate(&self) -> Result<()> {
        for (i, a) in self.vertices.iter().enumerate() {
            if self.vertices[..i].contains(a) {
                return Err(Error::InvalidInstance {
                    detail: format!("duplicate vertex name {a:?}"),
                });
            }
        }
        for name in [&self.s, &self.t] {
            if !self.vertices.contains(name) {
                return Err(Error::UnknownEndpoint { name: name.clone() });
            }
        }
        if self.s == self.t {
            return Err(Error::InvalidInstance {
                detail: "source and target must differ".to_string(),
            });
        }
        let mut seen = Vec::new();
        for e in &self.edges {
            if !self.vertices.contains(&e.from) {
                return Err(Error::UnknownEndpoint {
                    name: e.from.clone(),
                });
            }
            if !self.vertices.contains(&e.to) {
                return Err(Error::UnknownEndpoint { name: e.to.clone() });
            }
            if e.from == e.to {
                return Err(Error::InvalidInstance {
                    detail: format!("self-loop at {:?}", e.from),
                });
            }
            let pair = (e.from.clone(), e.to.clone());
            if seen.contains(&pair) {
                return Err(Error::DuplicateEdge {
                    v: e.from.clone(),
                    u: e.to.clone(),
                });
            }
            seen.push(pair);
            if e.c.is_negative() {
                return Err(Error::NegativeEdgeValue {
                    v: e.from.clone(),
                    u: e.to.clone(),
                    field: "c",
                    value: e.c.clone(),
                });
            }
        }
        let (lo, hi) = &self.range;
        if lo.is_negative() || lo >= hi {
            return Err(Error::InvalidInstance {
                detail: format!("invalid validity range [{lo}, {hi}]"),
            });
        }
        // Affine weights nonnegative at both range endpoints stay
        // nonnegative on the whole range.
        for e in &self.edges {
            for alpha in [lo, hi] {
                let w = &e.c - alpha * &e.f;
                if w.is_negative() {
                    return Err(Error::NegativeEdgeWeight {
                        from: e.from.clone(),
                        to: e.to.clone(),
                        alpha: alpha.clone(),
                        value: w,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn contains_alpha(&self, alpha: &Rational) -> bool {
        let (lo, hi) = &self.range;
        alpha >= lo && alpha <= hi
    }
}

/// Exact shortest s-t distance under the weights at `alpha`.
pub fn shortest_path_value(p: &ParametricPathInstance, alpha: &Rational) -> Result<Rational> {
    p.validate()?;
    if !p.contains_alpha(alpha) {
        return Err(Error::OutsideValidityRange {
            alpha: alpha.clone(),
            lo: p.range.0.clone(),
            hi: p.range.1.clone(),
        });
    }
    let index = |name: &str| p.vertices.iter().position(|v| v == name).unwrap();
    let n = p.vertices.len();
    let mut weights = Vec::with_capacity(p.edges.len());
    for e in &p.edges {
        let w = &e.c - alpha * &e.f;
        if w.is_negative() {
            return Err(Error::NegativeEdgeWeight {
                from: e.from.clone(),
                to: e.to.clone(),
                alpha: alpha.clone(),
                value: w,
            });
        }
        weights.push((index(&e.from), index(&e.to), w));
    }
    // Bellman-Ford relaxation; weights are nonnegative so n rounds suffice.
    let mut dist: Vec<Option<Rational>> = vec![None; n];
    dist[index(&p.s)] = Some(Rational::zero());
    for _ in 0..n {
        let mut changed = false;
        for (from, to, w) in &weights {
            if let Some(d) = dist[*from].clone() {
                let cand = d + w;
                if dist[*to].as_ref().is_none_or(|cur| &cand < cur) {
                    dist[*to] = Some(cand);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist[index(&p.t)].clone().ok_or(Error::UnreachableTarget)
}

/// One edge of a parametric matching instance, weight `c - alpha * f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParametricMatchingEdge {
    pub v: String,
    pub u: String,
    pub c: Rational,
    pub f: Rational,
}

/// Minimum-weight perfect matching instance with affine edge weights and a
/// validity range on which all weights are nonnegative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParametricMatchingInstance {
    pub tasks: Vec<String>,
    pub resources: Vec<String>,
    pub edges: Vec<ParametricMatchingEdge>,
    pub range: (Rational, Rational),
}

impl ParametricMatchingInstance {
    pub fn validate(&self) -> Result<()> {
        let skeleton = self.skeleton();
        skeleton.validate()?;
        if self.tasks.len() != self.resources.len() {
            return Err(Error::InvalidInstance {
                detail: format!(
                    "perfect matching needs equal sides, got {} tasks and {} resources",
                    self.tasks.len(),
                    self.resources.len()
                ),
            });
        }
        for e in &self.edges {
            if e.c.is_negative() {
                return Err(Error::NegativeEdgeValue {
                    v: e.v.clone(),
                    u: e.u.clone(),
                    field: "c",
                    value: e.c.clone(),
                });
            }
        }
        let (lo, hi) = &self.range;
        if lo.is_negative() || lo >= hi {
            return Err(Error::InvalidInstance {
                detail: format!("invalid validity range [{lo}, {hi}]"),
            });
        }
        for e in &self.edges {
            for alpha in [lo, hi] {
                let w = &e.c - alpha * &e.f;
                if w.is_negative() {
                    return Err(Error::NegativeEdgeWeight {
                        from: e.v.clone(),
                        to: e.u.clone(),
                        alpha: alpha.clone(),
                        value: w,
                    });
                }
            }
        }
        // A perfect matching must exist at all.
        let ends = skeleton.indexed()?;
        let zeros = vec![Rational::zero(); self.edges.len()];
        if optimum_matching(
            self.tasks.len(),
            self.resources.len(),
            &ends,
            &zeros,
            true,
            &[],
            &[],
        )
        .is_none()
        {
            return Err(Error::NoPerfectMatching);
        }
        Ok(())
    }

    /// The underlying bipartite topology with zeroed contract weights; used
    /// for structural validation and index mapping.
    fn skeleton(&self) -> BipartiteInstance {
        BipartiteInstance {
            tasks: self.tasks.clone(),
            resources: self.resources.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| BipartiteEdge {
                    v: e.v.clone(),
                    u: e.u.clone(),
                    f: Rational::zero(),
                    c: Rational::zero(),
                })
                .collect(),
            normalized: false,
        }
    }

    pub(crate) fn indexed(&self) -> Result<Vec<(usize, usize)>> {
        self.skeleton().indexed()
    }

    pub fn contains_alpha(&self, alpha: &Rational) -> bool {
        let (lo, hi) = &self.range;
        alpha >= lo && alpha <= hi
    }
}

/// Rewrites a parametric shortest s-t path instance as a parametric
/// minimum-weight perfect matching instance of equal optimum value at every
/// parameter.
///
/// Every internal vertex `x_i` splits into a task copy and a resource copy
/// joined by a zero-weight edge; each directed edge `(x_i, x_j)` becomes
/// `(v_i, u_j)`; edges leaving `s` keep `s` as the task endpoint, edges
/// entering `t` keep `t` as the resource endpoint. Edges entering `s` or
/// leaving `t` can never lie on an s-t path and are dropped.
pub fn path_to_matching(p: &ParametricPathInstance) -> Result<ParametricMatchingInstance> {
    p.validate()?;
    let internal: Vec<&String> = p
        .vertices
        .iter()
        .filter(|v| **v != p.s && **v != p.t)
        .collect();
    let mut tasks = vec![p.s.clone()];
    tasks.extend(internal.iter().map(|v| (*v).clone()));
    let mut resources: Vec<String> = internal.iter().map(|v| (*v).clone()).collect();
    resources.push(p.t.clone());

    let mut edges: Vec<ParametricMatchingEdge> = Vec::new();
    for e in &p.edges {
        if e.to == p.s || e.from == p.t {
            continue;
        }
        edges.push(ParametricMatchingEdge {
            v: e.from.clone(),
            u: e.to.clone(),
            c: e.c.clone(),
            f: e.f.clone(),
        });
    }
    for v in &internal {
        edges.push(ParametricMatchingEdge {
            v: (*v).clone(),
            u: (*v).clone(),
            c: Rational::zero(),
            f: Rational::zero(),
        });
    }
    let out = ParametricMatchingInstance {
        tasks,
        resources,
        edges,
        range: p.range.clone(),
    };
    out.validate()?;
    Ok(out)
}

/// The minimum-weight perfect matching at `alpha`, deterministic: among
/// minimum-weight perfect matchings, the one with the larger `f` sum, then
/// the canonically smallest edge set. This mirrors the demand-side
/// tie-breaking so the reduction preserves the chosen set, not just the
/// value.
pub fn min_perfect_matching(m: &ParametricMatchingInstance, alpha: &Rational) -> Result<Matching> {
    m.validate()?;
    if !m.contains_alpha(alpha) {
        return Err(Error::OutsideValidityRange {
            alpha: alpha.clone(),
            lo: m.range.0.clone(),
            hi: m.range.1.clone(),
        });
    }
    let ends = m.indexed()?;
    // Maximize (-w, f) lexicographically over perfect matchings.
    let weights: Vec<LexWeight> = m
        .edges
        .iter()
        .map(|e| LexWeight::new(alpha * &e.f - &e.c, e.f.clone()))
        .collect();
    let edge_indices =
        canonical_optimum_matching(m.tasks.len(), m.resources.len(), &ends, &weights, true)
            .ok_or(Error::NoPerfectMatching)?;
    Ok(Matching { edge_indices })
}

/// Total weight `sum(c_e - alpha * f_e)` of a matching in `m`.
pub fn parametric_weight(
    m: &ParametricMatchingInstance,
    matching: &Matching,
    alpha: &Rational,
) -> Rational {
    matching
        .edge_indices
        .iter()
        .fold(Rational::zero(), |acc, &i| {
            acc + &m.edges[i].c - alpha * &m.edges[i].f
        })
}

/// Rewrites a parametric minimum-perfect-matching instance as a valid
/// agent-demand instance by shifting and rescaling the affine coefficients:
/// `f_e = (f'_e + K) / (2K|E|)` and `c_e = c'_e / (2K|E|)` where
/// `K = max |f'| + max c' / alpha2`. On `[alpha2, hi]` all transformed edge
/// utilities are nonnegative and minimum perfect matchings of the source
/// correspond to maximum-weight matchings of the output.
pub fn matching_to_demand(
    m: &ParametricMatchingInstance,
    alpha2: &Rational,
) -> Result<BipartiteInstance> {
    m.validate()?;
    if !alpha2.is_positive() {
        return Err(Error::NonPositiveAlpha2 {
            alpha2: alpha2.clone(),
        });
    }
    let max_f = m
        .edges
        .iter()
        .map(|e| e.f.abs())
        .max()
        .unwrap_or_else(Rational::zero);
    let max_c = m
        .edges
        .iter()
        .map(|e| e.c.clone())
        .max()
        .unwrap_or_else(Rational::zero);
    let k = max_f + max_c / alpha2;
    if k.is_zero() {
        return Err(Error::DegenerateTransform);
    }
    let scale = Rational::from_int(2) * &k * Rational::from_int(m.edges.len() as i64);
    let edges = m
        .edges
        .iter()
        .map(|e| BipartiteEdge {
            v: e.v.clone(),
            u: e.u.clone(),
            f: (&e.f + &k) / &scale,
            c: &e.c / &scale,
        })
        .collect();
    let out = BipartiteInstance {
        tasks: m.tasks.clone(),
        resources: m.resources.clone(),
        edges,
        normalized: true,
    };
    out.validate()?;
    Ok(out)
}

/// A one-sided-cost matching instance reformulated over the resource side:
/// additive vertex costs and a reward that is the best matching into any
/// subset of resources (with every task available).
pub struct RadoVertexInstance {
    pub graph: BipartiteInstance,
    pub resource_costs: Vec<Rational>,
}

impl RadoVertexInstance {
    /// `f'(T)`: maximum-weight matching in the subgraph induced by the
    /// resource subset `T` together with all tasks.
    pub fn reward(&self, t: &ActionSet) -> Result<Rational> {
        let ends = self.graph.indexed()?;
        let fvals: Vec<Rational> = self.graph.edges.iter().map(|e| e.f.clone()).collect();
        let banned: Vec<bool> = ends.iter().map(|&(_, u)| !t.contains(u)).collect();
        Ok(optimum_matching(
            self.graph.tasks.len(),
            self.graph.resources.len(),
            &ends,
            &fvals,
            false,
            &[],
            &banned,
        )
        .expect("non-perfect matching always exists")
        .0)
    }

    /// `c'(T)`: sum of the vertex costs over `T`.
    pub fn cost(&self, t: &ActionSet) -> Rational {
        t.iter()
            .fold(Rational::zero(), |acc, u| acc + &self.resource_costs[u])
    }

    /// The equivalent contract instance over the resource ground set.
    /// Requires the underlying graph to be normalized so rewards stay in
    /// [0, 1].
    pub fn contract_instance(&self) -> Result<ContractInstance> {
        if !self.graph.normalized {
            return Err(Error::NotNormalized);
        }
        self.graph.validate()?;
        let ends = self.graph.indexed()?;
        let fvals: Vec<Rational> = self.graph.edges.iter().map(|e| e.f.clone()).collect();
        let nv = self.graph.tasks.len();
        let nu = self.graph.resources.len();
        let reward = CachedFunction::new(nu, move |t: &ActionSet| {
            let banned: Vec<bool> = ends.iter().map(|&(_, u)| !t.contains(u)).collect();
            optimum_matching(nv, nu, &ends, &fvals, false, &[], &banned)
                .expect("non-perfect matching always exists")
                .0
        });
        let cost = AdditiveFunction::new(self.resource_costs.clone());
        ContractInstance::new(Box::new(reward), Box::new(cost))
    }
}

/// Reformulates a matching instance whose edge costs depend only on the
/// resource endpoint as a vertex instance over the resource side.
pub fn one_sided_to_vertex(g: &BipartiteInstance) -> Result<RadoVertexInstance> {
    g.validate()?;
    let ends = g.indexed()?;
    let mut costs: Vec<Option<Rational>> = vec![None; g.resources.len()];
    for (e, &(_, u)) in g.edges.iter().zip(ends.iter()) {
        match &costs[u] {
            None => costs[u] = Some(e.c.clone()),
            Some(existing) if *existing == e.c => {}
            Some(existing) => {
                return Err(Error::CostNotOneSided {
                    u: g.resources[u].clone(),
                    first: existing.clone(),
                    second: e.c.clone(),
                });
            }
        }
    }
    let resource_costs = costs
        .into_iter()
        .map(|c| c.unwrap_or_else(Rational::zero))
        .collect();
    Ok(RadoVertexInstance {
        graph: g.clone(),
        resource_costs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::matching_demand;
    use crate::oracle::brute_force_demand;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn pedge(from: &str, to: &str, c: Rational, f: Rational) -> PathEdge {
        PathEdge {
            from: from.to_string(),
            to: to.to_string(),
            c,
            f,
        }
    }

    /// The four-vertex example: edges s->x1, x1->x2, x2->x1, x2->s, x1->t,
    /// x2->t. The weights mirror the worked minimum-matching example:
    /// w(s,x1) = 1, w(x1,t) = 1, w(x1,x2) = w(x2,x1) = 0, w(x2,t) = 3 - alpha.
    fn diamond_instance() -> ParametricPathInstance {
        ParametricPathInstance {
            vertices: vec!["s".into(), "x1".into(), "x2".into(), "t".into()],
            s: "s".into(),
            t: "t".into(),
            edges: vec![
                pedge("s", "x1", rat(1, 1), Rational::zero()),
                pedge("x1", "x2", Rational::zero(), Rational::zero()),
                pedge("x2", "x1", Rational::zero(), Rational::zero()),
                pedge("x2", "s", rat(1, 1), Rational::zero()),
                pedge("x1", "t", rat(1, 1), Rational::zero()),
                pedge("x2", "t", rat(3, 1), Rational::one()),
            ],
            range: (Rational::zero(), rat(3, 1)),
        }
    }

    #[test]
    fn path_to_matching_topology() {
        let m = path_to_matching(&diamond_instance()).unwrap();
        assert_eq!(m.tasks, vec!["s", "x1", "x2"]);
        assert_eq!(m.resources, vec!["x1", "x2", "t"]);
        // Five carried edges (x2 -> s enters the source and is dropped) plus
        // two zero self-edges.
        assert_eq!(m.edges.len(), 7);
        let self_edges: Vec<&ParametricMatchingEdge> =
            m.edges.iter().filter(|e| e.v == e.u).collect();
        assert_eq!(self_edges.len(), 2);
        assert!(self_edges.iter().all(|e| e.c.is_zero() && e.f.is_zero()));
        assert!(!m.edges.iter().any(|e| e.u == "s" || e.v == "t"));
    }

    #[test]
    fn single_direct_edge_reduces_to_single_edge() {
        let p = ParametricPathInstance {
            vertices: vec!["s".into(), "t".into()],
            s: "s".into(),
            t: "t".into(),
            edges: vec![pedge("s", "t", Rational::one(), Rational::one())],
            range: (Rational::zero(), Rational::one()),
        };
        assert_eq!(shortest_path_value(&p, &rat(1, 2)).unwrap(), rat(1, 2));
        let m = path_to_matching(&p).unwrap();
        assert_eq!(m.edges.len(), 1);
        assert_eq!(m.tasks, vec!["s"]);
        assert_eq!(m.resources, vec!["t"]);
        let pm = min_perfect_matching(&m, &rat(1, 2)).unwrap();
        assert_eq!(pm.edge_indices, vec![0]);
    }

    #[test]
    fn diamond_shortest_paths_and_matchings() {
        let p = diamond_instance();
        // alpha = 0: s -> x1 -> t costs 2.
        assert_eq!(
            shortest_path_value(&p, &Rational::zero()).unwrap(),
            rat(2, 1)
        );
        // alpha = 3: s -> x1 -> x2 -> t costs 1 + 0 + 0 = 1.
        assert_eq!(shortest_path_value(&p, &rat(3, 1)).unwrap(), rat(1, 1));

        let m = path_to_matching(&p).unwrap();
        let find = |v: &str, u: &str| m.edges.iter().position(|e| e.v == v && e.u == u).unwrap();
        // alpha = 0: the direct route wins; x2 parks on its self-edge.
        let pm0 = min_perfect_matching(&m, &Rational::zero()).unwrap();
        assert_eq!(parametric_weight(&m, &pm0, &Rational::zero()), rat(2, 1));
        let expected: Vec<usize> = {
            let mut v = vec![find("s", "x1"), find("x1", "t"), find("x2", "x2")];
            v.sort();
            v
        };
        assert_eq!(pm0.edge_indices, expected);
        // alpha = 3: the x2 route becomes cheaper.
        let pm3 = min_perfect_matching(&m, &rat(3, 1)).unwrap();
        assert_eq!(parametric_weight(&m, &pm3, &rat(3, 1)), rat(1, 1));
        assert!(pm3.edge_indices.contains(&find("x2", "t")));

        // Value preservation across a parameter sweep.
        for num in 0..=12i64 {
            let alpha = rat(num, 4);
            assert_eq!(
                shortest_path_value(&p, &alpha).unwrap(),
                parametric_weight(&m, &min_perfect_matching(&m, &alpha).unwrap(), &alpha),
                "alpha = {alpha}"
            );
        }
    }

    #[test]
    fn trivial_perfect_matching() {
        let m = ParametricMatchingInstance {
            tasks: vec!["a".into()],
            resources: vec!["b".into()],
            edges: vec![ParametricMatchingEdge {
                v: "a".into(),
                u: "b".into(),
                c: rat(1, 2),
                f: Rational::zero(),
            }],
            range: (Rational::zero(), Rational::one()),
        };
        assert_eq!(
            min_perfect_matching(&m, &rat(1, 2)).unwrap().edge_indices,
            vec![0]
        );
    }

    #[test]
    fn missing_perfect_matching_is_rejected() {
        let m = ParametricMatchingInstance {
            tasks: vec!["a".into(), "b".into()],
            resources: vec!["c".into(), "d".into()],
            edges: vec![
                ParametricMatchingEdge {
                    v: "a".into(),
                    u: "c".into(),
                    c: Rational::zero(),
                    f: Rational::zero(),
                },
                ParametricMatchingEdge {
                    v: "b".into(),
                    u: "c".into(),
                    c: Rational::zero(),
                    f: Rational::zero(),
                },
            ],
            range: (Rational::zero(), Rational::one()),
        };
        assert!(matches!(m.validate(), Err(Error::NoPerfectMatching)));
    }

    #[test]
    fn transform_coefficients() {
        // Two edges with f' = (1, 0), c' = (2, 4), alpha2 = 1:
        // K = 1 + 4 = 5, 2K|E| = 20, f = (3/10, 1/4), c = (1/10, 1/5).
        let m = ParametricMatchingInstance {
            tasks: vec!["a".into(), "b".into()],
            resources: vec!["c".into(), "d".into()],
            edges: vec![
                ParametricMatchingEdge {
                    v: "a".into(),
                    u: "c".into(),
                    c: rat(2, 1),
                    f: Rational::one(),
                },
                ParametricMatchingEdge {
                    v: "b".into(),
                    u: "d".into(),
                    c: rat(4, 1),
                    f: Rational::zero(),
                },
            ],
            range: (Rational::zero(), Rational::one()),
        };
        let g = matching_to_demand(&m, &Rational::one()).unwrap();
        assert!(g.normalized);
        assert_eq!(g.edges[0].f, rat(3, 10));
        assert_eq!(g.edges[1].f, rat(1, 4));
        assert_eq!(g.edges[0].c, rat(1, 10));
        assert_eq!(g.edges[1].c, rat(1, 5));
    }

    #[test]
    fn degenerate_transform_is_rejected() {
        let m = ParametricMatchingInstance {
            tasks: vec!["a".into()],
            resources: vec!["b".into()],
            edges: vec![ParametricMatchingEdge {
                v: "a".into(),
                u: "b".into(),
                c: Rational::zero(),
                f: Rational::zero(),
            }],
            range: (Rational::zero(), Rational::one()),
        };
        assert!(matches!(
            matching_to_demand(&m, &Rational::one()),
            Err(Error::DegenerateTransform)
        ));
        assert!(matches!(
            matching_to_demand(&m, &Rational::zero()),
            Err(Error::NonPositiveAlpha2 { .. })
        ));
    }

    fn one_sided_three_edge_graph() -> BipartiteInstance {
        BipartiteInstance {
            tasks: vec!["v1".into(), "v2".into()],
            resources: vec!["u1".into(), "u2".into()],
            edges: vec![
                BipartiteEdge {
                    v: "v1".into(),
                    u: "u1".into(),
                    f: rat(2, 1),
                    c: rat(1, 10),
                },
                BipartiteEdge {
                    v: "v1".into(),
                    u: "u2".into(),
                    f: rat(2, 1),
                    c: rat(1, 5),
                },
                BipartiteEdge {
                    v: "v2".into(),
                    u: "u1".into(),
                    f: rat(1, 1),
                    c: rat(1, 10),
                },
            ],
            normalized: false,
        }
    }

    #[test]
    fn one_sided_reformulation_values() {
        let g = one_sided_three_edge_graph();
        let rado = one_sided_to_vertex(&g).unwrap();
        assert_eq!(rado.resource_costs, vec![rat(1, 10), rat(1, 5)]);
        let just_u1 = ActionSet::singleton(2, 0);
        assert_eq!(rado.reward(&just_u1).unwrap(), rat(2, 1));
        assert_eq!(rado.cost(&just_u1), rat(1, 10));
        assert_eq!(rado.reward(&ActionSet::empty(2)).unwrap(), Rational::zero());
        assert_eq!(rado.reward(&ActionSet::full(2)).unwrap(), rat(3, 1));
    }

    #[test]
    fn mixed_costs_are_rejected() {
        let mut g = one_sided_three_edge_graph();
        g.edges[2].c = rat(1, 4);
        assert!(matches!(
            one_sided_to_vertex(&g),
            Err(Error::CostNotOneSided { .. })
        ));
    }

    #[test]
    fn one_sided_utility_equivalence() {
        // Claim check on the normalized graph: the best utility over edge
        // subsets equals the best over resource subsets, at several alphas.
        let g = one_sided_three_edge_graph().normalized_copy().unwrap();
        let rado = one_sided_to_vertex(&g).unwrap();
        let edge_inst = crate::matching::make_matching_contract_instance(&g).unwrap();
        let vertex_inst = rado.contract_instance().unwrap();
        for num in 0..=10i64 {
            let alpha = rat(num, 10);
            let edge_best = brute_force_demand(&edge_inst, &alpha).unwrap();
            let edge_value = crate::model::agent_utility(&edge_inst, &alpha, &edge_best).unwrap();
            let vertex_best = brute_force_demand(&vertex_inst, &alpha).unwrap();
            let vertex_value =
                crate::model::agent_utility(&vertex_inst, &alpha, &vertex_best).unwrap();
            assert_eq!(edge_value, vertex_value, "alpha = {alpha}");
            // The matched resources of the edge-side demand achieve the
            // vertex-side optimum.
            let demanded = matching_demand(&g, &alpha).unwrap();
            let ends = g.indexed().unwrap();
            let mut matched = ActionSet::empty(2);
            for &e in &demanded.edge_indices {
                matched.insert(ends[e].1);
            }
            let reward = rado.reward(&matched).unwrap();
            let value = &alpha * &reward - rado.cost(&matched);
            assert_eq!(value, vertex_value, "alpha = {alpha}");
        }
    }

    #[test]
    fn shortest_path_errors() {
        let p = diamond_instance();
        assert!(matches!(
            shortest_path_value(&p, &rat(4, 1)),
            Err(Error::OutsideValidityRange { .. })
        ));
        let disconnected = ParametricPathInstance {
            vertices: vec!["s".into(), "x".into(), "t".into()],
            s: "s".into(),
            t: "t".into(),
            edges: vec![pedge("s", "x", Rational::one(), Rational::zero())],
            range: (Rational::zero(), Rational::one()),
        };
        assert!(matches!(
            shortest_path_value(&disconnected, &rat(1, 2)),
            Err(Error::UnreachableTarget)
        ));
        let negative = ParametricPathInstance {
            vertices: vec!["s".into(), "t".into()],
            s: "s".into(),
            t: "t".into(),
            edges: vec![pedge("s", "t", Rational::one(), rat(2, 1))],
            range: (Rational::zero(), Rational::one()),
        };
        assert!(matches!(
            negative.validate(),
            Err(Error::NegativeEdgeWeight { .. })
        ));
    }
}
