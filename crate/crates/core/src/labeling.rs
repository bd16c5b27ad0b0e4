//! Labeling K_{m,n} so every edge sum is a prime, from an arithmetic
//! progression of primes, plus the independent verifier.
//!
//! With an AP p, p+d, ... of primes, side A gets a_i = (i(n-1)+1)·d and side
//! B gets labels congruent to p mod d, so each edge sum a_i + b_j lands back
//! on a term of the progression. Two variants:
//!
//! - strict: b_j = c + j·d with c = p + (mn-m-n+2)·d. Every AP index from 0
//!   through 2mn-2m-n+3 must be prime even though only the top window of
//!   indices appears as an edge sum, so the needed AP length grows fast.
//! - windowed: reindex the AP to start at that window, b_j = p + (j-1)·d.
//!   Only the m(n-1)+1 indices actually used as edge sums must be prime,
//!   which keeps K_{4,4} within reach (length 13 instead of 24). Requires
//!   p > d so b_0 = p - d stays positive, and d >= 2 so d cannot divide p
//!   (which makes the two sides disjoint).

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ap::PrimeAP;
use crate::error::{Error, Result};
use crate::graph::{Graph, HypercubeEmbedding, Side};
use crate::primes::is_prime;

/// Construction variant; see the module docs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strict,
    Windowed,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Strict => write!(f, "strict"),
            Mode::Windowed => write!(f, "windowed"),
        }
    }
}

/// What the construction needs before an AP is even searched for: the
/// normalized side sizes, the AP length, and the index window of the AP whose
/// terms appear as edge sums.
///
/// The formulas degenerate at n = 1 (every A-label collapses to d), so plans
/// normalize to n >= 2 by swapping sides when possible; K_{1,1} gets a
/// special trivial plan (labels {1, 2}, edge sum 3) with required_len 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstructionPlan {
    m: usize,
    n: usize,
    swapped: bool,
    mode: Mode,
    required_len: usize,
    window_lo: usize,
    window_hi: usize,
    c: Option<u64>,
}

impl ConstructionPlan {
    /// Normalized side sizes (n >= 2 except for the trivial 1,1 plan).
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// True when the plan swapped the input sides to normalize n >= 2.
    pub fn swapped(&self) -> bool {
        self.swapped
    }

    /// Side sizes in the caller's original orientation.
    pub fn original_mn(&self) -> (usize, usize) {
        if self.swapped {
            (self.n, self.m)
        } else {
            (self.m, self.n)
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// AP length the construction consumes; 0 for the trivial plan.
    pub fn required_len(&self) -> usize {
        self.required_len
    }

    /// Inclusive range of AP indices whose primality the edge sums use.
    /// In strict mode the window sits at the top of the progression;
    /// windowed mode reindexes it to start at 0. Width is m(n-1)+1 either
    /// way.
    pub fn window(&self) -> (usize, usize) {
        (self.window_lo, self.window_hi)
    }

    /// Base of the B side: b_0. None until an AP is bound via
    /// [`ConstructionPlan::with_ap_bound`] (and always None for the trivial
    /// plan, which uses no AP).
    pub fn c(&self) -> Option<u64> {
        self.c
    }

    pub fn is_trivial(&self) -> bool {
        self.required_len == 0
    }

    /// Checks the AP against this plan's preconditions and returns a copy
    /// with the derived offset c bound: strict c = p + (mn-m-n+2)·d, the
    /// paper's B-side base; windowed c = p - d, which plays the same role
    /// after reindexing.
    pub fn with_ap_bound(&self, ap: &PrimeAP) -> Result<ConstructionPlan> {
        if self.is_trivial() {
            return Err(Error::invalid(
                "the trivial K_{1,1} plan does not take a progression",
            ));
        }
        if ap.len() < self.required_len {
            return Err(Error::invalid(format!(
                "progression has {} terms, plan needs {}",
                ap.len(),
                self.required_len
            )));
        }
        let c = match self.mode {
            Mode::Strict => {
                // (m-1)(n-1)+1 = mn-m-n+2, written without underflow.
                let steps = (self.m as u64 - 1) * (self.n as u64 - 1) + 1;
                steps
                    .checked_mul(ap.d())
                    .and_then(|x| x.checked_add(ap.p()))
                    .ok_or_else(|| Error::resource("offset c overflows 64 bits"))?
            }
            Mode::Windowed => {
                if ap.d() < 2 {
                    return Err(Error::invalid(
                        "windowed construction needs d >= 2 (d must not divide p)",
                    ));
                }
                if ap.p() <= ap.d() {
                    return Err(Error::invalid(
                        "windowed construction needs p > d (b_0 = p - d must be positive)",
                    ));
                }
                ap.p() - ap.d()
            }
        };
        Ok(ConstructionPlan {
            c: Some(c),
            ..*self
        })
    }
}

/// Derives the AP requirements for labeling K_{m,n}.
pub fn plan_construction(m: usize, n: usize, mode: Mode) -> Result<ConstructionPlan> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("side sizes must be >= 1"));
    }
    if m == 1 && n == 1 {
        return Ok(ConstructionPlan {
            m: 1,
            n: 1,
            swapped: false,
            mode,
            required_len: 0,
            window_lo: 0,
            window_hi: 0,
            c: None,
        });
    }
    let (m, n, swapped) = if n == 1 { (n, m, true) } else { (m, n, false) };
    // Guard the index arithmetic once here; labels themselves are checked
    // again during construction.
    let width = m
        .checked_mul(n - 1)
        .and_then(|x| x.checked_add(1))
        .ok_or_else(|| Error::resource("window width overflows"))?;
    let plan = match mode {
        Mode::Strict => {
            // required_len = 2mn-2m-n+4 terms, window at the top of the
            // progression; both written underflow-free.
            let required_len = (2 * m - 1)
                .checked_mul(n - 1)
                .and_then(|x| x.checked_add(3))
                .ok_or_else(|| Error::resource("required length overflows"))?;
            let window_lo = (m - 1) * (n - 1) + 2;
            ConstructionPlan {
                m,
                n,
                swapped,
                mode,
                required_len,
                window_lo,
                window_hi: window_lo + width - 1,
                c: None,
            }
        }
        Mode::Windowed => ConstructionPlan {
            m,
            n,
            swapped,
            mode,
            required_len: width,
            window_lo: 0,
            window_hi: width - 1,
            c: None,
        },
    };
    Ok(plan)
}

/// Where a labeling came from. Serialized into the labeling JSON so emitted
/// files are self-describing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Built by [`construct_labeling`] from an AP.
    Constructed {
        mode: Mode,
        p: u64,
        d: u64,
        len: usize,
    },
    /// Found by the exhaustive oracle.
    BruteForced,
    /// Loaded from outside; nothing is known about it.
    External,
}

/// Total map vertex -> positive integer label.
///
/// The type itself does not enforce distinctness or positivity: the verifier
/// must be able to inspect bad labelings (tampered files, test fixtures) and
/// report violations instead of refusing to represent them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    labels: BTreeMap<usize, u64>,
    provenance: Provenance,
}

impl Labeling {
    pub fn new(labels: BTreeMap<usize, u64>, provenance: Provenance) -> Labeling {
        Labeling { labels, provenance }
    }

    pub fn label(&self, v: usize) -> Option<u64> {
        self.labels.get(&v).copied()
    }

    pub fn labels(&self) -> &BTreeMap<usize, u64> {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

impl Serialize for Labeling {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct LabelsInOrder<'a>(&'a BTreeMap<usize, u64>);
        impl Serialize for LabelsInOrder<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                // Numeric key order; a plain string map would sort "10" < "2".
                let mut map = serializer.serialize_map(Some(self.0.len()))?;
                for (v, label) in self.0 {
                    map.serialize_entry(&v.to_string(), label)?;
                }
                map.end()
            }
        }
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("labels", &LabelsInOrder(&self.labels))?;
        map.serialize_entry("provenance", &ProvenanceWire::from(self.provenance))?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for Labeling {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Labeling, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            labels: BTreeMap<String, u64>,
            #[serde(default)]
            provenance: Option<ProvenanceWire>,
        }
        let wire = Wire::deserialize(deserializer)?;
        let mut labels = BTreeMap::new();
        for (key, value) in wire.labels {
            let v: usize = key
                .parse()
                .map_err(|_| D::Error::custom(format!("vertex key {key:?} is not an integer")))?;
            labels.insert(v, value);
        }
        let provenance = match wire.provenance {
            Some(w) => w.into_provenance().map_err(D::Error::custom)?,
            None => Provenance::External,
        };
        Ok(Labeling { labels, provenance })
    }
}

#[derive(Serialize, Deserialize)]
struct ProvenanceWire {
    mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    d: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    len: Option<usize>,
}

impl From<Provenance> for ProvenanceWire {
    fn from(p: Provenance) -> ProvenanceWire {
        match p {
            Provenance::Constructed { mode, p, d, len } => ProvenanceWire {
                mode: mode.to_string(),
                p: Some(p),
                d: Some(d),
                len: Some(len),
            },
            Provenance::BruteForced => ProvenanceWire {
                mode: "brute-force".into(),
                p: None,
                d: None,
                len: None,
            },
            Provenance::External => ProvenanceWire {
                mode: "external".into(),
                p: None,
                d: None,
                len: None,
            },
        }
    }
}

impl ProvenanceWire {
    fn into_provenance(self) -> std::result::Result<Provenance, String> {
        let mode = match self.mode.as_str() {
            "strict" => Mode::Strict,
            "windowed" => Mode::Windowed,
            "brute-force" => return Ok(Provenance::BruteForced),
            _ => return Ok(Provenance::External),
        };
        match (self.p, self.d, self.len) {
            (Some(p), Some(d), Some(len)) => Ok(Provenance::Constructed { mode, p, d, len }),
            _ => Err(format!("provenance mode {:?} needs p, d and len", self.mode)),
        }
    }
}

/// Runs the construction: plan + AP -> labeling of the canonical K_{m,n}
/// (vertices 0..m on side A, m..m+n on side B, in the caller's original
/// orientation). The trivial K_{1,1} plan ignores `ap` and labels {1, 2}.
pub fn construct_labeling(plan: &ConstructionPlan, ap: Option<&PrimeAP>) -> Result<Labeling> {
    if plan.is_trivial() {
        // K_{1,1}: labels 1 and 2, edge sum 3. The provenance records the
        // one-term progression [3] the sum sits on; the windowed formulas
        // with p = 3, d = 1 reproduce exactly these labels.
        let labels = BTreeMap::from([(0usize, 1u64), (1usize, 2u64)]);
        return Ok(Labeling {
            labels,
            provenance: Provenance::Constructed {
                mode: plan.mode,
                p: 3,
                d: 1,
                len: 1,
            },
        });
    }
    let ap = ap.ok_or_else(|| {
        Error::invalid("this plan needs an arithmetic progression of primes")
    })?;
    let bound = plan.with_ap_bound(ap)?;
    let c = bound.c.expect("with_ap_bound always sets c");
    let (m, n, d) = (plan.m, plan.n, ap.d());

    let overflow = || Error::resource("label exceeds 64 bits");
    let mut a_side = Vec::with_capacity(m);
    for i in 0..m as u64 {
        // a_i = (i(n-1)+1)·d
        let a = i
            .checked_mul(n as u64 - 1)
            .and_then(|x| x.checked_add(1))
            .and_then(|x| x.checked_mul(d))
            .ok_or_else(overflow)?;
        a_side.push(a);
    }
    let mut b_side = Vec::with_capacity(n);
    for j in 0..n as u64 {
        // b_j = c + j·d; in both modes c is b_0.
        let b = j
            .checked_mul(d)
            .and_then(|x| x.checked_add(c))
            .ok_or_else(overflow)?;
        b_side.push(b);
    }

    // Map construction sides back onto the canonical vertex numbering of the
    // original orientation: vertices 0..m0 are K_{m0,n0} side A.
    let (m0, _n0) = plan.original_mn();
    let mut labels = BTreeMap::new();
    if plan.swapped {
        for (v, &b) in b_side.iter().enumerate() {
            labels.insert(v, b);
        }
        for (k, &a) in a_side.iter().enumerate() {
            labels.insert(m0 + k, a);
        }
    } else {
        for (v, &a) in a_side.iter().enumerate() {
            labels.insert(v, a);
        }
        for (k, &b) in b_side.iter().enumerate() {
            labels.insert(m0 + k, b);
        }
    }
    Ok(Labeling {
        labels,
        provenance: Provenance::Constructed {
            mode: plan.mode,
            p: ap.p(),
            d: ap.d(),
            len: ap.len(),
        },
    })
}

/// One verifier finding. Serialized as {"kind": "...", ...}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    DuplicateLabel {
        label: u64,
        vertices: Vec<usize>,
    },
    NonPositiveLabel {
        vertex: usize,
        label: u64,
    },
    CompositeSum {
        u: usize,
        v: usize,
        sum: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        factor: Option<u64>,
    },
}

/// Verifier outcome; empty violations means PASS.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.pass
    }
}

/// Checks a labeling against a graph: labels distinct, positive, and every
/// edge sum prime. Independent of the constructor: it recomputes everything
/// from the labels with the primality test alone.
///
/// Violations are reported in a fixed order (duplicates by label, then
/// non-positive by vertex, then composite sums in canonical edge order);
/// composite sums carry a factor witness when trial division finds one
/// quickly. A labeling that misses a vertex of the graph is an error, not a
/// violation: the report format speaks about total labelings.
pub fn verify_labeling(g: &Graph, labeling: &Labeling) -> Result<VerifyReport> {
    for v in 0..g.num_vertices() {
        if labeling.label(v).is_none() {
            return Err(Error::invalid(format!("labeling misses vertex {v}")));
        }
    }
    let mut violations = Vec::new();

    let mut by_label: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for v in 0..g.num_vertices() {
        by_label.entry(labeling.label(v).unwrap()).or_default().push(v);
    }
    for (&label, vertices) in &by_label {
        if vertices.len() > 1 {
            violations.push(Violation::DuplicateLabel {
                label,
                vertices: vertices.clone(),
            });
        }
    }
    for v in 0..g.num_vertices() {
        let label = labeling.label(v).unwrap();
        if label == 0 {
            violations.push(Violation::NonPositiveLabel { vertex: v, label });
        }
    }
    for &(u, v) in g.edges() {
        let lu = labeling.label(u).unwrap();
        let lv = labeling.label(v).unwrap();
        let sum = lu
            .checked_add(lv)
            .ok_or_else(|| Error::resource(format!("edge ({u}, {v}) sum overflows 64 bits")))?;
        if !is_prime(sum) {
            violations.push(Violation::CompositeSum {
                u,
                v,
                sum,
                factor: small_factor(sum),
            });
        }
    }
    Ok(VerifyReport {
        pass: violations.is_empty(),
        violations,
    })
}

/// Smallest prime factor by bounded trial division; None when the sum is too
/// hard to factor cheaply (the compositeness claim stands on its own).
fn small_factor(x: u64) -> Option<u64> {
    if x < 4 {
        return None;
    }
    if x % 2 == 0 {
        return Some(2);
    }
    let mut f = 3u64;
    while f <= 1_000_000 && f * f <= x {
        if x % f == 0 {
            return Some(f);
        }
        f += 2;
    }
    None
}

/// Pulls a K_{M,M} labeling back onto Q_n through the popcount-parity
/// embedding. Hypercube edges cross parity classes, so every Q_n edge is a
/// K_{M,M} edge and the restricted labeling inherits prime sums; labels stay
/// distinct because the embedding is injective.
pub fn restrict_to_subgraph(
    labeling: &Labeling,
    embedding: &HypercubeEmbedding,
) -> Result<Labeling> {
    let verts = 1usize << embedding.dimension();
    if labeling.len() != verts {
        return Err(Error::invalid(format!(
            "labeling has {} labels, Q_{} embedding needs exactly {}",
            labeling.len(),
            embedding.dimension(),
            verts
        )));
    }
    let side = embedding.side_size();
    let mut labels = BTreeMap::new();
    for v in 0..verts {
        let image = match embedding.side_of(v) {
            Side::A => embedding.index_within_side(v),
            Side::B => side + embedding.index_within_side(v),
        };
        let label = labeling
            .label(image)
            .ok_or_else(|| Error::invalid(format!("source labeling misses vertex {image}")))?;
        labels.insert(v, label);
    }
    Ok(Labeling {
        labels,
        provenance: labeling.provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ap::{find_ap, find_ap_with_p_gt_d, SearchBudget};
    use crate::graph::{complete_bipartite, embed_hypercube, hypercube};

    fn ap(p: u64, d: u64, len: usize) -> PrimeAP {
        PrimeAP::new(p, d, len).unwrap()
    }

    #[test]
    fn plan_examples() {
        let p = plan_construction(2, 2, Mode::Strict).unwrap();
        assert_eq!(p.required_len(), 6);
        assert_eq!(p.window(), (3, 5));

        let p = plan_construction(2, 2, Mode::Windowed).unwrap();
        assert_eq!(p.required_len(), 3);
        assert_eq!(p.window(), (0, 2));

        let p = plan_construction(4, 4, Mode::Windowed).unwrap();
        assert_eq!(p.required_len(), 13);
        assert_eq!(p.window(), (0, 12));

        let p = plan_construction(4, 4, Mode::Strict).unwrap();
        assert_eq!(p.required_len(), 24);
        assert_eq!(p.window(), (11, 23));
    }

    #[test]
    fn plan_window_width_invariant() {
        for m in 1..=6 {
            for n in 1..=6 {
                for mode in [Mode::Strict, Mode::Windowed] {
                    let p = plan_construction(m, n, mode).unwrap();
                    if p.is_trivial() {
                        continue;
                    }
                    let (lo, hi) = p.window();
                    assert_eq!(hi - lo + 1, p.m() * (p.n() - 1) + 1, "{m} {n} {mode}");
                    if mode == Mode::Windowed {
                        assert_eq!(lo, 0);
                        assert_eq!(p.required_len(), hi + 1);
                    } else {
                        assert_eq!(p.required_len(), hi + 1, "strict window ends at L");
                    }
                }
            }
        }
    }

    #[test]
    fn plan_normalizes_n_equal_1() {
        let p = plan_construction(3, 1, Mode::Windowed).unwrap();
        assert!(p.swapped());
        assert_eq!((p.m(), p.n()), (1, 3));
        assert_eq!(p.original_mn(), (3, 1));
        assert_eq!(p.required_len(), 3);

        let p = plan_construction(1, 1, Mode::Strict).unwrap();
        assert!(p.is_trivial());
        assert_eq!(p.required_len(), 0);

        assert!(plan_construction(0, 2, Mode::Strict).is_err());
    }

    #[test]
    fn strict_2_2_reproduces_formulas() {
        let plan = plan_construction(2, 2, Mode::Strict).unwrap();
        let ap = ap(7, 30, 6);
        let bound = plan.with_ap_bound(&ap).unwrap();
        assert_eq!(bound.c(), Some(67)); // 7 + 2*30

        let lab = construct_labeling(&plan, Some(&ap)).unwrap();
        assert_eq!(lab.label(0), Some(30));
        assert_eq!(lab.label(1), Some(60));
        assert_eq!(lab.label(2), Some(67));
        assert_eq!(lab.label(3), Some(97));

        let g = complete_bipartite(2, 2).unwrap();
        let mut sums: Vec<u64> = g
            .edges()
            .iter()
            .map(|&(u, v)| lab.label(u).unwrap() + lab.label(v).unwrap())
            .collect();
        sums.sort_unstable();
        assert_eq!(sums, vec![97, 127, 127, 157]);

        // max A-label < min B-label, the distinctness mechanism.
        assert!(60 < 67);
        assert!(verify_labeling(&g, &lab).unwrap().pass());
    }

    #[test]
    fn windowed_2_2_example() {
        let plan = plan_construction(2, 2, Mode::Windowed).unwrap();
        let lab = construct_labeling(&plan, Some(&ap(3, 2, 3))).unwrap();
        assert_eq!(lab.label(0), Some(2));
        assert_eq!(lab.label(1), Some(4));
        assert_eq!(lab.label(2), Some(1));
        assert_eq!(lab.label(3), Some(3));
        let g = complete_bipartite(2, 2).unwrap();
        let mut sums: Vec<u64> = g
            .edges()
            .iter()
            .map(|&(u, v)| lab.label(u).unwrap() + lab.label(v).unwrap())
            .collect();
        sums.sort_unstable();
        assert_eq!(sums, vec![3, 5, 5, 7]);
        assert!(verify_labeling(&g, &lab).unwrap().pass());
    }

    #[test]
    fn windowed_2_3_example() {
        let plan = plan_construction(2, 3, Mode::Windowed).unwrap();
        let lab = construct_labeling(&plan, Some(&ap(37, 30, 5))).unwrap();
        let a: Vec<u64> = (0..2).map(|v| lab.label(v).unwrap()).collect();
        let b: Vec<u64> = (2..5).map(|v| lab.label(v).unwrap()).collect();
        assert_eq!(a, vec![30, 90]);
        assert_eq!(b, vec![7, 37, 67]);
        let g = complete_bipartite(2, 3).unwrap();
        let mut sums: Vec<u64> = g
            .edges()
            .iter()
            .map(|&(u, v)| lab.label(u).unwrap() + lab.label(v).unwrap())
            .collect();
        sums.sort_unstable();
        assert_eq!(sums, vec![37, 67, 97, 97, 127, 157]);
        assert!(verify_labeling(&g, &lab).unwrap().pass());
    }

    #[test]
    fn trivial_plan_labels_1_2() {
        let plan = plan_construction(1, 1, Mode::Windowed).unwrap();
        let lab = construct_labeling(&plan, None).unwrap();
        assert_eq!(lab.label(0), Some(1));
        assert_eq!(lab.label(1), Some(2));
        let g = complete_bipartite(1, 1).unwrap();
        assert!(verify_labeling(&g, &lab).unwrap().pass());
    }

    #[test]
    fn swapped_side_mapping() {
        // K_{3,1}: vertices 0..3 are the size-3 side, vertex 3 the other.
        let plan = plan_construction(3, 1, Mode::Windowed).unwrap();
        let lab = construct_labeling(&plan, Some(&ap(3, 2, 3))).unwrap();
        // Construction B side (p-d, p, p+d) lands on the original A side.
        assert_eq!(lab.label(0), Some(1));
        assert_eq!(lab.label(1), Some(3));
        assert_eq!(lab.label(2), Some(5));
        assert_eq!(lab.label(3), Some(2)); // a_0 = d
        let g = complete_bipartite(3, 1).unwrap();
        assert!(verify_labeling(&g, &lab).unwrap().pass());
    }

    #[test]
    fn construction_preconditions() {
        let plan = plan_construction(2, 2, Mode::Windowed).unwrap();
        // Too short.
        assert!(construct_labeling(&plan, Some(&ap(3, 2, 2))).is_err());
        // d = 1 divides every p; 2, 3 is the only prime AP with d = 1.
        let short = plan_construction(1, 2, Mode::Windowed).unwrap();
        assert_eq!(short.required_len(), 2);
        assert!(construct_labeling(&short, Some(&ap(2, 1, 2))).is_err());
        // p < d: b_0 would be nonpositive. 3, 13, 23 is a valid AP.
        assert!(construct_labeling(&plan, Some(&ap(3, 10, 3))).is_err());
        // Missing AP.
        assert!(construct_labeling(&plan, None).is_err());
        // Strict mode has no p > d requirement.
        let strict = plan_construction(1, 2, Mode::Strict).unwrap();
        assert_eq!(strict.required_len(), 4);
        let lab = construct_labeling(&strict, Some(&ap(5, 6, 4))).unwrap();
        let g = complete_bipartite(1, 2).unwrap();
        assert!(verify_labeling(&g, &lab).unwrap().pass());
    }

    #[test]
    fn edge_sum_identity_multiset() {
        // Constructed sums must be exactly {p + t·d : t in window}, with t
        // hit once per (i, j) with i(n-1)+j = t (windowed indexing).
        let budget = SearchBudget::default();
        for (m, n) in [(2, 2), (2, 3), (3, 2), (3, 3), (1, 4)] {
            let plan = plan_construction(m, n, Mode::Windowed).unwrap();
            let ap = find_ap_with_p_gt_d(plan.required_len(), &budget)
                .unwrap()
                .found()
                .unwrap();
            let lab = construct_labeling(&plan, Some(&ap)).unwrap();
            let g = complete_bipartite(m, n).unwrap();
            let mut sums: Vec<u64> = g
                .edges()
                .iter()
                .map(|&(u, v)| lab.label(u).unwrap() + lab.label(v).unwrap())
                .collect();
            sums.sort_unstable();
            let (mm, nn) = (plan.m() as u64, plan.n() as u64);
            let mut expect = Vec::new();
            for i in 0..mm {
                for j in 0..nn {
                    let t = i * (nn - 1) + j;
                    expect.push(ap.p() + t * ap.d());
                }
            }
            expect.sort_unstable();
            assert_eq!(sums, expect, "K_{{{m},{n}}}");
        }
    }

    #[test]
    fn strict_soundness_where_search_is_cheap() {
        let budget = SearchBudget::default();
        for (m, n) in [(1, 2), (2, 2), (1, 3), (3, 1), (2, 3), (3, 2)] {
            let plan = plan_construction(m, n, Mode::Strict).unwrap();
            let ap = find_ap(plan.required_len(), &budget)
                .unwrap()
                .found()
                .unwrap();
            let lab = construct_labeling(&plan, Some(&ap)).unwrap();
            let g = complete_bipartite(m, n).unwrap();
            let report = verify_labeling(&g, &lab).unwrap();
            assert!(report.pass(), "K_{{{m},{n}}} strict: {report:?}");
            // Strict ordering: every A label below every B label.
            let (m0, _) = plan.original_mn();
            let split = if plan.swapped() { plan.n() } else { plan.m() };
            assert_eq!(m0, split);
            let max_a = (0..m0).map(|v| lab.label(v).unwrap()).max().unwrap();
            let min_b = (m0..g.num_vertices())
                .map(|v| lab.label(v).unwrap())
                .min()
                .unwrap();
            if !plan.swapped() {
                assert!(max_a < min_b, "K_{{{m},{n}}}: {max_a} !< {min_b}");
            }
        }
    }

    #[test]
    fn windowed_soundness_small_grid() {
        let budget = SearchBudget::default();
        for m in 1..=3usize {
            for n in 1..=3usize {
                let plan = plan_construction(m, n, Mode::Windowed).unwrap();
                let lab = if plan.is_trivial() {
                    construct_labeling(&plan, None).unwrap()
                } else {
                    let ap = find_ap_with_p_gt_d(plan.required_len(), &budget)
                        .unwrap()
                        .found()
                        .unwrap();
                    construct_labeling(&plan, Some(&ap)).unwrap()
                };
                let g = complete_bipartite(m, n).unwrap();
                let report = verify_labeling(&g, &lab).unwrap();
                assert!(report.pass(), "K_{{{m},{n}}}: {report:?}");
            }
        }
    }

    #[test]
    fn verifier_reports_composite_sum_with_factor() {
        let g = crate::graph::cycle_graph(3).unwrap();
        let labels = BTreeMap::from([(0, 1u64), (1, 2u64), (2, 4u64)]);
        let lab = Labeling::new(labels, Provenance::External);
        let report = verify_labeling(&g, &lab).unwrap();
        assert!(!report.pass());
        assert_eq!(
            report.violations,
            vec![Violation::CompositeSum {
                u: 1,
                v: 2,
                sum: 6,
                factor: Some(2),
            }]
        );
    }

    #[test]
    fn verifier_reports_duplicates_and_zero() {
        let g = complete_bipartite(1, 2).unwrap();
        let labels = BTreeMap::from([(0, 0u64), (1, 3u64), (2, 3u64)]);
        let lab = Labeling::new(labels, Provenance::External);
        let report = verify_labeling(&g, &lab).unwrap();
        assert!(!report.pass());
        assert!(matches!(
            report.violations[0],
            Violation::DuplicateLabel { label: 3, .. }
        ));
        assert!(matches!(
            report.violations[1],
            Violation::NonPositiveLabel { vertex: 0, label: 0 }
        ));
        // 0+3 = 3 is prime; both edges pass the sum check here.
        assert_eq!(report.violations.len(), 2);
    }

    #[test]
    fn verifier_requires_total_labeling() {
        let g = complete_bipartite(1, 1).unwrap();
        let lab = Labeling::new(BTreeMap::from([(0, 1u64)]), Provenance::External);
        assert!(verify_labeling(&g, &lab).is_err());
    }

    #[test]
    fn restriction_to_hypercube() {
        // Q_2 from the windowed K_{2,2} labels {2,4 | 1,3}.
        let plan = plan_construction(2, 2, Mode::Windowed).unwrap();
        let k_lab = construct_labeling(&plan, Some(&ap(3, 2, 3))).unwrap();
        let emb = embed_hypercube(2).unwrap();
        let q_lab = restrict_to_subgraph(&k_lab, &emb).unwrap();
        let q = hypercube(2).unwrap();
        assert!(verify_labeling(&q, &q_lab).unwrap().pass());
        // Parity embedding: vertices 0, 3 take the A labels.
        assert_eq!(q_lab.label(0), Some(2));
        assert_eq!(q_lab.label(3), Some(4));
        assert_eq!(q_lab.label(1), Some(1));
        assert_eq!(q_lab.label(2), Some(3));

        // Q_1 via the trivial K_{1,1} labels.
        let plan = plan_construction(1, 1, Mode::Windowed).unwrap();
        let k_lab = construct_labeling(&plan, None).unwrap();
        let emb = embed_hypercube(1).unwrap();
        let q_lab = restrict_to_subgraph(&k_lab, &emb).unwrap();
        assert_eq!(q_lab.label(0), Some(1));
        assert_eq!(q_lab.label(1), Some(2));

        // Dimension mismatch.
        let emb3 = embed_hypercube(3).unwrap();
        assert!(restrict_to_subgraph(&k_lab, &emb3).is_err());
    }

    #[test]
    fn labeling_json_round_trip() {
        let plan = plan_construction(2, 2, Mode::Windowed).unwrap();
        let lab = construct_labeling(&plan, Some(&ap(3, 2, 3))).unwrap();
        let json = serde_json::to_string(&lab).unwrap();
        assert!(json.contains("\"windowed\""));
        assert!(json.contains("\"p\":3"));
        let back: Labeling = serde_json::from_str(&json).unwrap();
        assert_eq!(lab, back);
    }

    #[test]
    fn labeling_json_numeric_key_order() {
        let labels: BTreeMap<usize, u64> =
            (0..12).map(|v| (v, 100 + v as u64)).collect();
        let lab = Labeling::new(labels, Provenance::BruteForced);
        let json = serde_json::to_string(&lab).unwrap();
        let pos9 = json.find("\"9\"").unwrap();
        let pos10 = json.find("\"10\"").unwrap();
        assert!(pos9 < pos10, "keys must be in numeric order: {json}");
        let back: Labeling = serde_json::from_str(&json).unwrap();
        assert_eq!(back.provenance(), Provenance::BruteForced);
        assert_eq!(back, lab);
    }

    #[test]
    fn external_and_malformed_provenance() {
        let lab: Labeling =
            serde_json::from_str(r#"{"labels": {"0": 1, "1": 2}}"#).unwrap();
        assert_eq!(lab.provenance(), Provenance::External);
        let lab: Labeling = serde_json::from_str(
            r#"{"labels": {"0": 1}, "provenance": {"mode": "handmade"}}"#,
        )
        .unwrap();
        assert_eq!(lab.provenance(), Provenance::External);
        // Constructed provenance missing its parameters is malformed.
        assert!(serde_json::from_str::<Labeling>(
            r#"{"labels": {"0": 1}, "provenance": {"mode": "windowed"}}"#
        )
        .is_err());
        // Non-numeric vertex key.
        assert!(serde_json::from_str::<Labeling>(r#"{"labels": {"x": 1}}"#).is_err());
    }

    #[test]
    fn report_json_shape() {
        let g = crate::graph::cycle_graph(3).unwrap();
        let labels = BTreeMap::from([(0, 1u64), (1, 2u64), (2, 4u64)]);
        let report = verify_labeling(&g, &Labeling::new(labels, Provenance::External)).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.starts_with(r#"{"pass":false,"violations":[{"kind":"composite-sum""#));
    }
}
