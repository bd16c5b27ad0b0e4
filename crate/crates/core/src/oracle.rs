//! Exhaustive search oracles: a backtracking labeler for arbitrary graphs
//! and a Hamiltonian path enumerator.
//!
//! The labeler is the ground truth the constructive code is checked against,
//! and the only way to get a definite "no labeling exists up to this bound".
//! It must stay dumb on purpose; the single admissible shortcut is parity
//! pruning, which discards candidates that would force an even edge sum > 2
//! (such a sum is composite no matter what, so pruning cannot change any
//! outcome, only reach it faster).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::labeling::{Labeling, Provenance};
use crate::primes::{sieve, PrimeTable};

/// Hard cap on the label bound, to keep the sieve allocation sane.
pub const MAX_ORACLE_LABEL: u64 = 10_000_000;

/// Node budget for [`brute_force_label`]. A node is one candidate label
/// tried at one vertex. The default is enough to settle every graph the
/// test suite throws at the oracle; u64::MAX means "run to completion".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_nodes: u64,
}

impl Default for OracleBudget {
    fn default() -> OracleBudget {
        OracleBudget {
            max_nodes: 50_000_000,
        }
    }
}

/// Outcome of the exhaustive search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Found(Labeling),
    /// The whole space of labelings with distinct labels in 1..=max_label
    /// was exhausted; no labeling exists under that bound. Says nothing
    /// about larger bounds (though for non-bipartite graphs no bound helps).
    Infeasible { max_label: u64 },
    /// The node budget ran out first; no conclusion either way.
    BudgetExhausted,
}

/// Searches every labeling of `g` by distinct labels from 1..=max_label for
/// one with all edge sums prime, with parity pruning on. Deterministic:
/// vertices in BFS order from vertex 0 (restarting at the lowest unvisited
/// vertex per component), candidates ascending, first solution wins.
pub fn brute_force_label(g: &Graph, max_label: u64, budget: &OracleBudget) -> Result<OracleOutcome> {
    brute_force_label_with(g, max_label, budget, true)
}

/// Same search with parity pruning switchable, for testing that pruning
/// never changes an outcome.
pub fn brute_force_label_with(
    g: &Graph,
    max_label: u64,
    budget: &OracleBudget,
    parity_pruning: bool,
) -> Result<OracleOutcome> {
    if g.num_vertices() == 0 {
        return Err(Error::invalid("graph has no vertices"));
    }
    if max_label < g.num_vertices() as u64 {
        return Err(Error::invalid(format!(
            "max_label {} cannot hold {} distinct labels",
            max_label,
            g.num_vertices()
        )));
    }
    if max_label > MAX_ORACLE_LABEL {
        return Err(Error::resource(format!(
            "max_label {max_label} above the oracle cap {MAX_ORACLE_LABEL}"
        )));
    }

    let order = bfs_order(g);
    let table = sieve(2 * max_label)?;
    let mut state = SearchState {
        g,
        table: &table,
        max_label,
        parity_pruning,
        labels: vec![0; g.num_vertices()],
        used: vec![false; max_label as usize + 1],
        nodes: 0,
        max_nodes: budget.max_nodes,
    };
    match state.assign(&order, 0) {
        SearchResult::Found => {
            let labels: BTreeMap<usize, u64> = state
                .labels
                .iter()
                .enumerate()
                .map(|(v, &l)| (v, l))
                .collect();
            Ok(OracleOutcome::Found(Labeling::new(
                labels,
                Provenance::BruteForced,
            )))
        }
        SearchResult::Exhausted => Ok(OracleOutcome::Infeasible { max_label }),
        SearchResult::OutOfBudget => Ok(OracleOutcome::BudgetExhausted),
    }
}

/// BFS order from vertex 0, restarting at the lowest unvisited vertex.
fn bfs_order(g: &Graph) -> Vec<usize> {
    let n = g.num_vertices();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &nb in g.neighbors(v) {
                if !seen[nb] {
                    seen[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
    }
    order
}

enum SearchResult {
    Found,
    Exhausted,
    OutOfBudget,
}

struct SearchState<'a> {
    g: &'a Graph,
    table: &'a PrimeTable,
    max_label: u64,
    parity_pruning: bool,
    /// 0 means unassigned; real labels are >= 1.
    labels: Vec<u64>,
    used: Vec<bool>,
    nodes: u64,
    max_nodes: u64,
}

impl SearchState<'_> {
    fn assign(&mut self, order: &[usize], depth: usize) -> SearchResult {
        let Some(&v) = order.get(depth) else {
            return SearchResult::Found;
        };

        // With pruning on, labeled neighbors fix the allowed parity: an even
        // sum > 2 is never prime, and label sums of distinct positives are
        // always > 2. Mixed-parity neighbors mean no candidate can work.
        let mut step = 1u64;
        let mut first = 1u64;
        if self.parity_pruning {
            let mut need_odd = None;
            for &nb in self.g.neighbors(v) {
                if self.labels[nb] != 0 {
                    let nb_odd = self.labels[nb] % 2 == 1;
                    match need_odd {
                        None => need_odd = Some(!nb_odd),
                        Some(want) if want != !nb_odd => return SearchResult::Exhausted,
                        Some(_) => {}
                    }
                }
            }
            if let Some(want_odd) = need_odd {
                step = 2;
                first = if want_odd { 1 } else { 2 };
            }
        }

        let mut cand = first;
        while cand <= self.max_label {
            if self.nodes >= self.max_nodes {
                return SearchResult::OutOfBudget;
            }
            self.nodes += 1;
            if !self.used[cand as usize] && self.sums_prime(v, cand) {
                self.labels[v] = cand;
                self.used[cand as usize] = true;
                match self.assign(order, depth + 1) {
                    SearchResult::Exhausted => {}
                    other => return other,
                }
                self.labels[v] = 0;
                self.used[cand as usize] = false;
            }
            cand += step;
        }
        SearchResult::Exhausted
    }

    fn sums_prime(&self, v: usize, cand: u64) -> bool {
        self.g
            .neighbors(v)
            .iter()
            .all(|&nb| self.labels[nb] == 0 || self.table.is_prime(self.labels[nb] + cand))
    }
}

/// Result shape for path enumeration: how many directed Hamiltonian paths
/// were produced, and whether a limit cut the enumeration short.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathEnumeration {
    pub count: u64,
    pub truncated: bool,
}

/// Calls `f` for every directed Hamiltonian path of `g` (each undirected
/// path appears once per direction). Deterministic order: start vertices
/// ascending, then neighbors ascending, so the sequence is lexicographic.
/// `limit` stops the enumeration after that many paths.
pub fn for_each_hamiltonian_path<F>(g: &Graph, limit: Option<u64>, mut f: F) -> Result<PathEnumeration>
where
    F: FnMut(&[usize]),
{
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::invalid("graph has no vertices"));
    }
    if n > 64 {
        return Err(Error::resource(
            "Hamiltonian path enumeration is capped at 64 vertices",
        ));
    }
    if limit == Some(0) {
        return Ok(PathEnumeration {
            count: 0,
            truncated: true,
        });
    }
    let mut path = Vec::with_capacity(n);
    let mut out = PathEnumeration {
        count: 0,
        truncated: false,
    };
    for start in 0..n {
        path.push(start);
        let stop = extend_path(g, &mut path, 1u64 << start, limit, &mut out, &mut f);
        path.pop();
        if stop {
            break;
        }
    }
    Ok(out)
}

fn extend_path<F: FnMut(&[usize])>(
    g: &Graph,
    path: &mut Vec<usize>,
    visited: u64,
    limit: Option<u64>,
    out: &mut PathEnumeration,
    f: &mut F,
) -> bool {
    if path.len() == g.num_vertices() {
        f(path);
        out.count += 1;
        if limit.is_some_and(|l| out.count >= l) {
            out.truncated = true;
            return true;
        }
        return false;
    }
    let last = *path.last().unwrap();
    for &nb in g.neighbors(last) {
        if visited & (1 << nb) != 0 {
            continue;
        }
        path.push(nb);
        let stop = extend_path(g, path, visited | (1 << nb), limit, out, f);
        path.pop();
        if stop {
            return true;
        }
    }
    false
}

/// Collects the paths [`for_each_hamiltonian_path`] visits.
pub fn enumerate_hamiltonian_paths(
    g: &Graph,
    limit: Option<u64>,
) -> Result<(Vec<Vec<usize>>, PathEnumeration)> {
    let mut paths = Vec::new();
    let info = for_each_hamiltonian_path(g, limit, |p| paths.push(p.to_vec()))?;
    Ok((paths, info))
}

/// One bad consecutive pair on one enumerated path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathViolation {
    /// Index of the path in enumeration order.
    pub path_index: u64,
    /// Position of the first endpoint within the path.
    pub position: usize,
    pub u: usize,
    pub v: usize,
    pub sum: u64,
}

/// Outcome of checking edge sums along Hamiltonian paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathReport {
    pub paths_checked: u64,
    pub truncated: bool,
    pub violations: Vec<PathViolation>,
}

impl PathReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Walks every Hamiltonian path (up to `limit`) and rechecks that all
/// consecutive label sums are prime. Redundant with edge verification by
/// construction, which is exactly why it makes a good cross-check.
pub fn check_paths_prime(g: &Graph, labeling: &Labeling, limit: Option<u64>) -> Result<PathReport> {
    for v in 0..g.num_vertices() {
        if labeling.label(v).is_none() {
            return Err(Error::invalid(format!("labeling misses vertex {v}")));
        }
    }
    let mut violations = Vec::new();
    let mut overflow = false;
    let mut path_index = 0u64;
    let info = for_each_hamiltonian_path(g, limit, |path| {
        for (pos, pair) in path.windows(2).enumerate() {
            let (u, v) = (pair[0], pair[1]);
            let (lu, lv) = (labeling.label(u).unwrap(), labeling.label(v).unwrap());
            let Some(sum) = lu.checked_add(lv) else {
                overflow = true;
                return;
            };
            if !crate::primes::is_prime(sum) {
                violations.push(PathViolation {
                    path_index,
                    position: pos,
                    u,
                    v,
                    sum,
                });
            }
        }
        path_index += 1;
    })?;
    if overflow {
        return Err(Error::resource("path edge sum overflows 64 bits"));
    }
    Ok(PathReport {
        paths_checked: info.count,
        truncated: info.truncated,
        violations,
    })
}
