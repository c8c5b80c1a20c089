//! Deterministic, seeded instance generators for every function class the
//! test suite and the CLI demos exercise. The same spec always produces a
//! byte-identical instance, so failures replicate from a seed alone.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{BipartiteEdge, BipartiteInstance};
use crate::model::TableInstance;
use crate::oracle::{verify_monotone_submodular, verify_monotone_supermodular};
use crate::rational::Rational;
use crate::reductions::{ParametricPathInstance, PathEdge};

/// SplitMix64: the standard 64-bit splittable generator. Fixed constants,
/// fixed update rule, so instances replicate across implementations.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform-ish draw in `0..bound` (`bound > 0`); plain reduction, the
    /// negligible modulo bias is irrelevant for test instances.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        self.next_u64() % bound
    }

    pub fn next_bool(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// A rational in [0, 1] with denominator at most `max_den`.
    pub fn unit_rational(&mut self, max_den: u64) -> Rational {
        let den = 1 + self.next_below(max_den);
        let num = self.next_below(den + 1);
        Rational::new(num as i64, den as i64)
    }

    /// A rational in [0, bound] with denominator at most `max_den` before
    /// reduction against `bound`'s denominator.
    pub fn rational_up_to(&mut self, bound: &Rational, max_den: u64) -> Rational {
        self.unit_rational(max_den) * bound
    }

    /// A rational in [-1, 1].
    pub fn signed_unit_rational(&mut self, max_den: u64) -> Rational {
        let r = self.unit_rational(max_den);
        if self.next_bool() {
            -r
        } else {
            r
        }
    }
}

/// The shipped instance families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Arbitrary reward/cost tables with bounded denominators.
    ExplicitTable,
    /// Monotone supermodular reward `(sum of weights / total)^2` with
    /// additive costs.
    SupermodularSquare,
    /// The same square reward paired with a weighted-coverage submodular
    /// cost.
    SubmodularCoverageCost,
    /// Random bipartite matching instance, jointly normalized.
    MatchingRandom,
    /// Matching instance whose edge costs depend only on the resource.
    MatchingOneSided,
    /// Matching instance with integer rewards and costs (not normalized).
    MatchingInteger,
    /// Random layered parametric shortest-path instance on [0, 1].
    ParametricPathRandom,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::ExplicitTable,
        Family::SupermodularSquare,
        Family::SubmodularCoverageCost,
        Family::MatchingRandom,
        Family::MatchingOneSided,
        Family::MatchingInteger,
        Family::ParametricPathRandom,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::ExplicitTable => "explicit-table",
            Family::SupermodularSquare => "supermodular-square",
            Family::SubmodularCoverageCost => "submodular-coverage-cost",
            Family::MatchingRandom => "matching-random",
            Family::MatchingOneSided => "matching-one-sided",
            Family::MatchingInteger => "matching-integer",
            Family::ParametricPathRandom => "parametric-path-random",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidGeneratorSpec {
                detail: format!("unknown family {s:?}"),
            })
    }
}

/// A deterministic generator request. Unset size parameters fall back to
/// family defaults.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub seed: u64,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub edges: Option<usize>,
    #[serde(default)]
    pub max_den: Option<u64>,
    #[serde(default)]
    pub f_bound: Option<u64>,
    #[serde(default)]
    pub c_bound: Option<u64>,
}

impl GeneratorSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        GeneratorSpec {
            family,
            seed,
            n: None,
            edges: None,
            max_den: None,
            f_bound: None,
            c_bound: None,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_edges(mut self, edges: usize) -> Self {
        self.edges = Some(edges);
        self
    }

    pub fn with_max_den(mut self, max_den: u64) -> Self {
        self.max_den = Some(max_den);
        self
    }

    pub fn with_f_bound(mut self, f_bound: u64) -> Self {
        self.f_bound = Some(f_bound);
        self
    }

    pub fn with_c_bound(mut self, c_bound: u64) -> Self {
        self.c_bound = Some(c_bound);
        self
    }
}

/// A generated instance in one of the three serializable shapes.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum GeneratedInstance {
    Table(TableInstance),
    Bipartite(BipartiteInstance),
    Path(ParametricPathInstance),
}

const CLASS_CERT_CAP: usize = 8;

/// Generates the instance described by `spec`. For ground sets of size at
/// most 8 the advertised class membership is verified exhaustively before
/// the instance is returned.
pub fn generate(spec: &GeneratorSpec) -> Result<GeneratedInstance> {
    let mut rng = SplitMix64::new(spec.seed);
    match spec.family {
        Family::ExplicitTable => {
            let n = spec.n.unwrap_or(4);
            let max_den = spec.max_den.unwrap_or(100);
            check_table_size(n)?;
            let mut f = vec![Rational::zero()];
            let mut c = vec![Rational::zero()];
            for _ in 1..(1u64 << n) {
                f.push(rng.unit_rational(max_den));
                c.push(rng.unit_rational(max_den));
            }
            let table = TableInstance { n, f, c };
            table.validate()?;
            Ok(GeneratedInstance::Table(table))
        }
        Family::SupermodularSquare => {
            let n = spec.n.unwrap_or(5);
            check_table_size(n)?;
            let weight_bound = spec.f_bound.unwrap_or(6);
            if weight_bound == 0 {
                return Err(Error::InvalidGeneratorSpec {
                    detail: "supermodular-square needs positive integer weights".to_string(),
                });
            }
            let max_den = spec.max_den.unwrap_or(40);
            let weights: Vec<i64> = (0..n)
                .map(|_| 1 + rng.next_below(weight_bound) as i64)
                .collect();
            let f = square_reward_table(n, &weights);
            // Additive costs kept comparable to per-action marginal rewards.
            let cost_bound = Rational::new(2, n as i64);
            let per_action: Vec<Rational> = (0..n)
                .map(|_| rng.rational_up_to(&cost_bound, max_den))
                .collect();
            let c = (0..(1u64 << n))
                .map(|mask| {
                    (0..n)
                        .filter(|&i| mask & (1 << i) != 0)
                        .fold(Rational::zero(), |acc, i| acc + &per_action[i])
                })
                .collect();
            let table = TableInstance { n, f, c };
            table.validate()?;
            certify_square_family(&table)?;
            Ok(GeneratedInstance::Table(table))
        }
        Family::SubmodularCoverageCost => {
            let n = spec.n.unwrap_or(5);
            check_table_size(n)?;
            let weight_bound = spec.f_bound.unwrap_or(6);
            if weight_bound == 0 {
                return Err(Error::InvalidGeneratorSpec {
                    detail: "coverage-cost family needs positive integer weights".to_string(),
                });
            }
            let max_den = spec.max_den.unwrap_or(40);
            let weights: Vec<i64> = (0..n)
                .map(|_| 1 + rng.next_below(weight_bound) as i64)
                .collect();
            let f = square_reward_table(n, &weights);
            // Weighted coverage cost: each action covers a random item set.
            // Item weights sum to roughly 3/4 so demand moves before alpha
            // reaches 1 on most seeds.
            let items = 2 * n;
            let item_bound = Rational::new(3, 2 * items as i64);
            let item_weights: Vec<Rational> = (0..items)
                .map(|_| rng.rational_up_to(&item_bound, max_den))
                .collect();
            let covers: Vec<u64> = (0..n).map(|_| rng.next_below(1 << items)).collect();
            let c = (0..(1u64 << n))
                .map(|mask| {
                    let covered = (0..n)
                        .filter(|&i| mask & (1 << i) != 0)
                        .fold(0u64, |acc, i| acc | covers[i]);
                    (0..items)
                        .filter(|&j| covered & (1 << j) != 0)
                        .fold(Rational::zero(), |acc, j| acc + &item_weights[j])
                })
                .collect();
            let table = TableInstance { n, f, c };
            table.validate()?;
            certify_square_family(&table)?;
            Ok(GeneratedInstance::Table(table))
        }
        Family::MatchingRandom => {
            let g = random_bipartite(spec, &mut rng, CostSide::PerEdge)?;
            Ok(GeneratedInstance::Bipartite(g.normalized_copy()?))
        }
        Family::MatchingOneSided => {
            let g = random_bipartite(spec, &mut rng, CostSide::PerResource)?;
            let g = g.normalized_copy()?;
            if g.resources.len() <= CLASS_CERT_CAP {
                certify_one_sided(&g)?;
            }
            Ok(GeneratedInstance::Bipartite(g))
        }
        Family::MatchingInteger => {
            let f_bound = spec.f_bound.unwrap_or(4);
            let c_bound = spec.c_bound.unwrap_or(4);
            let g = random_bipartite_integer(spec, &mut rng, f_bound, c_bound)?;
            if g.edges.len() <= CLASS_CERT_CAP {
                certify_integer(&g)?;
            }
            Ok(GeneratedInstance::Bipartite(g))
        }
        Family::ParametricPathRandom => {
            let p = random_path_instance(spec, &mut rng)?;
            p.validate()?;
            Ok(GeneratedInstance::Path(p))
        }
    }
}

fn check_table_size(n: usize) -> Result<()> {
    if n == 0 || n > 16 {
        return Err(Error::InvalidGeneratorSpec {
            detail: format!("table families support 1 <= n <= 16, got {n}"),
        });
    }
    Ok(())
}

/// `f(S) = (sum of weights over S / total)^2`, normalized so `f(A) = 1`.
fn square_reward_table(n: usize, weights: &[i64]) -> Vec<Rational> {
    let total: i64 = weights.iter().sum();
    (0..(1u64 << n))
        .map(|mask| {
            let s: i64 = (0..n)
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| weights[i])
                .sum();
            let ratio = Rational::new(s, total);
            &ratio * &ratio
        })
        .collect()
}

fn certify_square_family(table: &TableInstance) -> Result<()> {
    if table.n > CLASS_CERT_CAP {
        return Ok(());
    }
    verify_monotone_supermodular(table.n, &|s| Ok(table.f[s.to_mask() as usize].clone()))?;
    verify_monotone_submodular(table.n, &|s| Ok(table.c[s.to_mask() as usize].clone()))?;
    Ok(())
}

fn certify_one_sided(g: &BipartiteInstance) -> Result<()> {
    // Definitional scan: edges sharing a resource share a cost.
    crate::reductions::one_sided_to_vertex(g).map(|_| ())
}

fn certify_integer(g: &BipartiteInstance) -> Result<()> {
    for e in &g.edges {
        if !e.f.is_integer() || !e.c.is_integer() {
            return Err(Error::ClassViolation {
                detail: format!("edge ({}, {}) carries a non-integer value", e.v, e.u),
            });
        }
    }
    Ok(())
}

enum CostSide {
    PerEdge,
    PerResource,
}

fn bipartite_shape(spec: &GeneratorSpec) -> Result<(usize, usize, usize)> {
    let n = spec.n.unwrap_or(3);
    if n == 0 {
        return Err(Error::InvalidGeneratorSpec {
            detail: "matching families need at least one vertex per side".to_string(),
        });
    }
    let max_edges = n * n;
    let m = spec.edges.unwrap_or_else(|| (2 * n + 1).min(max_edges));
    if m == 0 || m > max_edges {
        return Err(Error::InvalidGeneratorSpec {
            detail: format!("edge count {m} outside 1..={max_edges}"),
        });
    }
    Ok((n, n, m))
}

fn random_edge_pairs(rng: &mut SplitMix64, nv: usize, nu: usize, m: usize) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(m);
    while pairs.len() < m {
        let p = (
            rng.next_below(nv as u64) as usize,
            rng.next_below(nu as u64) as usize,
        );
        if !pairs.contains(&p) {
            pairs.push(p);
        }
    }
    pairs.sort_unstable();
    pairs
}

fn random_bipartite(
    spec: &GeneratorSpec,
    rng: &mut SplitMix64,
    costs: CostSide,
) -> Result<BipartiteInstance> {
    let (nv, nu, m) = bipartite_shape(spec)?;
    let max_den = spec.max_den.unwrap_or(20);
    let tasks: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
    let resources: Vec<String> = (0..nu).map(|i| format!("u{i}")).collect();
    let resource_costs: Vec<Rational> = (0..nu).map(|_| rng.unit_rational(max_den)).collect();
    let edges = random_edge_pairs(rng, nv, nu, m)
        .into_iter()
        .map(|(v, u)| BipartiteEdge {
            v: tasks[v].clone(),
            u: resources[u].clone(),
            f: rng.unit_rational(max_den),
            c: match costs {
                CostSide::PerEdge => rng.unit_rational(max_den),
                CostSide::PerResource => resource_costs[u].clone(),
            },
        })
        .collect();
    Ok(BipartiteInstance {
        tasks,
        resources,
        edges,
        normalized: false,
    })
}

fn random_bipartite_integer(
    spec: &GeneratorSpec,
    rng: &mut SplitMix64,
    f_bound: u64,
    c_bound: u64,
) -> Result<BipartiteInstance> {
    let (nv, nu, m) = bipartite_shape(spec)?;
    let tasks: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
    let resources: Vec<String> = (0..nu).map(|i| format!("u{i}")).collect();
    let edges = random_edge_pairs(rng, nv, nu, m)
        .into_iter()
        .map(|(v, u)| BipartiteEdge {
            v: tasks[v].clone(),
            u: resources[u].clone(),
            f: Rational::from_int(rng.next_below(f_bound + 1) as i64),
            c: Rational::from_int(rng.next_below(c_bound + 1) as i64),
        })
        .collect();
    Ok(BipartiteInstance {
        tasks,
        resources,
        edges,
        normalized: false,
    })
}

fn random_path_instance(
    spec: &GeneratorSpec,
    rng: &mut SplitMix64,
) -> Result<ParametricPathInstance> {
    let nx = spec.n.unwrap_or(4);
    if nx == 0 {
        return Err(Error::InvalidGeneratorSpec {
            detail: "parametric-path-random needs at least one internal vertex".to_string(),
        });
    }
    let max_den = spec.max_den.unwrap_or(12);
    let extra = spec.edges.unwrap_or(nx + 2);
    let mut vertices = vec!["s".to_string()];
    vertices.extend((1..=nx).map(|i| format!("x{i}")));
    vertices.push("t".to_string());
    // Ranks: s = 0, x_i = i, t = nx + 1. Edges go strictly forward, so the
    // graph is acyclic and t is reachable via the spine.
    let rank_name = |r: usize| vertices[r].clone();
    let mut pairs: Vec<(usize, usize)> = (0..=nx).map(|r| (r, r + 1)).collect();
    let mut attempts = 0;
    while pairs.len() < nx + 1 + extra && attempts < 10 * extra + 10 {
        attempts += 1;
        let a = rng.next_below((nx + 1) as u64) as usize;
        let b = a + 1 + rng.next_below((nx + 1 - a) as u64) as usize;
        if !pairs.contains(&(a, b)) {
            pairs.push((a, b));
        }
    }
    // Occasionally add an edge back into the source; such edges are legal in
    // the path instance and exercised by the reduction's dropping rule.
    if rng.next_bool() {
        pairs.push((nx, 0));
    }
    let two = Rational::from_int(2);
    let edges = pairs
        .into_iter()
        .map(|(a, b)| {
            let c = rng.rational_up_to(&two, max_den);
            // f = t * c with t in [-1, 1] keeps c - alpha * f >= 0 on [0, 1].
            let f = rng.signed_unit_rational(max_den) * &c;
            PathEdge {
                from: rank_name(a),
                to: rank_name(b),
                c,
                f,
            }
        })
        .collect();
    Ok(ParametricPathInstance {
        vertices,
        s: "s".to_string(),
        t: "t".to_string(),
        edges,
        range: (Rational::zero(), Rational::one()),
    })
}
