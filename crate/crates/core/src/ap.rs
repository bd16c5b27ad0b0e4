//! Bounded explicit search for arithmetic progressions of primes.
//!
//! Long prime progressions exist for every length, but the existence proof
//! names no bound, so this module searches a finite box instead: differences
//! up to `max_d`, first terms up to `max_p`. The result is either a verified
//! [`PrimeAP`] or an explicit exhaustion report; nothing in between.
//!
//! The search space is cut down by a classical divisibility obstruction. If q
//! is a prime with q <= len and q does not divide the common difference d,
//! then the terms p, p+d, ..., p+(len-1)d cover every residue class mod q, so
//! one of them is a multiple of q. That term can only be prime by being q
//! itself, which forces the first term p to be at most q. Consequently, for
//! first terms beyond len the difference must be divisible by every prime
//! <= len (their product is the primorial), and the few candidates with
//! small first terms can be enumerated directly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::primes::{is_prime, primorial_up_to, sieve, SegmentSieve};

/// Largest accepted progression length. Way beyond anything findable at the
/// default budget; the guard just keeps pathological requests from sieving
/// huge prime tables.
pub const MAX_AP_LEN: usize = 1_000_000;

/// Window size (in candidate first terms) for the segmented scan.
const SCAN_WINDOW_BITS: usize = 1 << 20;

/// Base-prime bound for the segmented scan. Composites whose factors all
/// exceed this survive sieving and are caught by the `is_prime` re-check.
const SCAN_BASE_LIMIT: u64 = 1 << 16;

/// A verified arithmetic progression of primes: p, p+d, ..., p+(len-1)·d.
///
/// Instances only exist with every term checked prime and within u64 range;
/// construct via [`validate_ap`], [`PrimeAP::new`], or the search functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct PrimeAP {
    p: u64,
    d: u64,
    len: usize,
}

impl PrimeAP {
    /// Validates and wraps a candidate progression.
    pub fn new(p: u64, d: u64, len: usize) -> Result<PrimeAP> {
        match validate_ap(p, d, len)? {
            ApValidation::Valid(ap) => Ok(ap),
            ApValidation::Invalid { failing } => Err(Error::invalid(format!(
                "composite terms at indices {failing:?} of {p} + k*{d}"
            ))),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false // len >= 1 by construction
    }

    /// k-th term, 0-based. Panics if k >= len.
    pub fn term(&self, k: usize) -> u64 {
        assert!(k < self.len, "term index {k} out of range (len {})", self.len);
        self.p + k as u64 * self.d
    }

    pub fn terms(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(|k| self.term(k))
    }

    pub fn last_term(&self) -> u64 {
        self.term(self.len - 1)
    }
}

/// Result of checking a candidate progression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ApValidation {
    Valid(PrimeAP),
    /// Indices k with p + k·d composite (or < 2).
    Invalid { failing: Vec<usize> },
}

/// Checks every term of the candidate progression with `is_prime`.
///
/// Errors on structurally bad candidates (d = 0, p = 0, len = 0) and on
/// progressions whose last term would overflow u64; compositeness is not an
/// error but an `Invalid` report listing every failing index.
pub fn validate_ap(p: u64, d: u64, len: usize) -> Result<ApValidation> {
    if len == 0 {
        return Err(Error::invalid("progression length must be >= 1"));
    }
    if len > MAX_AP_LEN {
        return Err(Error::invalid(format!(
            "progression length {len} exceeds supported maximum {MAX_AP_LEN}"
        )));
    }
    if d == 0 {
        return Err(Error::invalid("common difference d must be positive"));
    }
    if p == 0 {
        return Err(Error::invalid("first term p must be positive"));
    }
    (len as u64 - 1)
        .checked_mul(d)
        .and_then(|span| p.checked_add(span))
        .ok_or_else(|| {
            Error::resource(format!("last term of {p} + k*{d} (len {len}) overflows 64 bits"))
        })?;
    let failing: Vec<usize> = (0..len)
        .filter(|&k| !is_prime(p + k as u64 * d))
        .collect();
    if failing.is_empty() {
        Ok(ApValidation::Valid(PrimeAP { p, d, len }))
    } else {
        Ok(ApValidation::Invalid { failing })
    }
}

/// Search box: the search tries differences d <= max_d and first terms
/// p <= max_p, optionally giving up after a wall-clock cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_d: u64,
    pub max_p: u64,
    /// Wall-clock cap. With a cap set, an exhaustion outcome may reflect the
    /// clock rather than the full box, so results are only reproducible
    /// without one (the default).
    pub time_cap: Option<Duration>,
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget {
            max_d: 10_000_000,
            max_p: 1_000_000_000,
            time_cap: None,
        }
    }
}

/// Search outcome: a verified progression, or proof the box was exhausted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ApSearchOutcome {
    Found(PrimeAP),
    /// No progression in the searched box. `timed_out` marks searches cut
    /// short by a time cap (the box may contain one after all).
    Exhausted {
        max_d: u64,
        max_p: u64,
        timed_out: bool,
    },
}

impl ApSearchOutcome {
    pub fn found(self) -> Option<PrimeAP> {
        match self {
            ApSearchOutcome::Found(ap) => Some(ap),
            ApSearchOutcome::Exhausted { .. } => None,
        }
    }
}

/// Extra constraints threaded through the search.
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Lower bound on the first term.
    pub min_p: u64,
    /// Require p > d (and d >= 2), the precondition of the windowed
    /// construction. Note d = 1 is excluded even though p > 1 always holds:
    /// the construction additionally needs d >= 2 so that d does not divide
    /// the prime p.
    pub require_p_gt_d: bool,
    /// Use the primorial obstruction to skip differences that provably admit
    /// no progression. Disable only to cross-check the shortcut on small
    /// boxes; the result must be identical.
    pub primorial_shortcut: bool,
}

impl Default for SearchOptions {
    fn default() -> SearchOptions {
        SearchOptions {
            min_p: 1,
            require_p_gt_d: false,
            primorial_shortcut: true,
        }
    }
}

/// Finds the progression of `len` primes minimizing (d, p) lexicographically
/// within the budget box, or reports exhaustion.
pub fn find_ap(len: usize, budget: &SearchBudget) -> Result<ApSearchOutcome> {
    find_ap_with_options(len, budget, &SearchOptions::default())
}

/// As [`find_ap`] with a lower bound on the first term.
pub fn find_ap_from(len: usize, budget: &SearchBudget, min_p: u64) -> Result<ApSearchOutcome> {
    find_ap_with_options(
        len,
        budget,
        &SearchOptions {
            min_p,
            ..SearchOptions::default()
        },
    )
}

/// As [`find_ap`], restricted to candidates with p > d and d >= 2 (what the
/// windowed labeling construction needs).
pub fn find_ap_with_p_gt_d(len: usize, budget: &SearchBudget) -> Result<ApSearchOutcome> {
    find_ap_with_options(
        len,
        budget,
        &SearchOptions {
            require_p_gt_d: true,
            ..SearchOptions::default()
        },
    )
}

/// Full-control entry point. The returned progression, when found, is the
/// lexicographic-(d, p) minimum among all progressions satisfying the
/// options within the budget box, independent of thread count.
pub fn find_ap_with_options(
    len: usize,
    budget: &SearchBudget,
    opts: &SearchOptions,
) -> Result<ApSearchOutcome> {
    if len == 0 {
        return Err(Error::invalid("progression length must be >= 1"));
    }
    if len > MAX_AP_LEN {
        return Err(Error::invalid(format!(
            "progression length {len} exceeds supported maximum {MAX_AP_LEN}"
        )));
    }
    if budget.max_d == 0 || budget.max_p == 0 {
        return Err(Error::invalid("budget bounds must be positive"));
    }
    let deadline = budget.time_cap.map(|cap| Instant::now() + cap);
    let exhausted = |timed_out: bool| ApSearchOutcome::Exhausted {
        max_d: budget.max_d,
        max_p: budget.max_p,
        timed_out,
    };

    // A length-1 progression is a single prime and d is irrelevant to the
    // terms, so the answer is closed-form: the smallest admissible prime,
    // paired with the smallest admissible d. Larger d never helps (under
    // p > d it only shrinks the candidate set), so no iteration is needed.
    if len == 1 {
        let d = if opts.require_p_gt_d { 2 } else { 1 };
        if d > budget.max_d {
            return Ok(exhausted(false));
        }
        let lo = opts.min_p.max(if opts.require_p_gt_d { d + 1 } else { 2 });
        return Ok(match smallest_prime_in(lo, budget.max_p) {
            Some(p) => ApSearchOutcome::Found(PrimeAP { p, d, len: 1 }),
            None => exhausted(false),
        });
    }

    let seg = SegmentSieve::new(SCAN_BASE_LIMIT)?;
    // Primes <= len: the only possible first terms when some prime <= len
    // does not divide d.
    let small_primes: Vec<u64> = sieve(len as u64)?.primes().collect();
    let mut cursors = build_cursors(len, budget.max_d, opts, &small_primes)?;

    loop {
        if let Some(dl) = deadline {
            if Instant::now() >= dl {
                return Ok(exhausted(true));
            }
        }
        let Some(d) = cursors.iter().filter_map(Cursor::peek).min() else {
            return Ok(exhausted(false));
        };
        // Gather every class that proposed this d. Classes can coincide only
        // as small-d + forced-p, and the small-d candidate set subsumes the
        // forced one, so a simple priority pick is exact.
        let mut full_scan = false;
        let mut small_d = false;
        let mut forced_p = None;
        for c in cursors.iter_mut() {
            if c.peek() == Some(d) {
                match c.kind {
                    CursorKind::FullScan => full_scan = true,
                    CursorKind::SmallD => small_d = true,
                    CursorKind::ForcedP(q) => forced_p = Some(q),
                }
                c.advance();
            }
        }
        if opts.require_p_gt_d && d < 2 {
            continue;
        }

        if full_scan {
            let lo_p = opts
                .min_p
                .max(2)
                .max(if opts.require_p_gt_d { d + 1 } else { 2 });
            match scan_difference(&seg, d, len, lo_p, budget.max_p, deadline) {
                ScanOutcome::Hit(p) => {
                    return Ok(ApSearchOutcome::Found(PrimeAP { p, d, len }));
                }
                ScanOutcome::NoHit => {}
                ScanOutcome::TimedOut => return Ok(exhausted(true)),
            }
            continue;
        }

        let candidates: &[u64] = match (small_d, forced_p) {
            (true, _) => &small_primes,
            (false, Some(q)) => std::slice::from_ref(
                small_primes
                    .iter()
                    .find(|&&p| p == q)
                    .expect("forced first term is a prime <= len"),
            ),
            (false, None) => unreachable!("cursor matched without a class"),
        };
        for &p in candidates {
            if p < opts.min_p || p > budget.max_p || (opts.require_p_gt_d && p <= d) {
                continue;
            }
            if let ApValidation::Valid(ap) = validate_ap(p, d, len)? {
                return Ok(ApSearchOutcome::Found(ap));
            }
        }
    }
}

fn smallest_prime_in(lo: u64, hi: u64) -> Option<u64> {
    let mut x = lo.max(2);
    while x <= hi {
        if is_prime(x) {
            return Some(x);
        }
        x = x.checked_add(1)?;
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CursorKind {
    /// d < len: the divisibility argument cannot force the first term (p can
    /// sit several steps below the prime q it shares a residue with, e.g.
    /// 3, 5, 7 for q = 3, d = 2), but p <= len still holds, so every prime
    /// <= len is a possible first term and must be tried directly.
    SmallD,
    /// d >= len, divisible by every prime <= len except q: first term forced
    /// to be exactly q.
    ForcedP(u64),
    /// d divisible by every prime <= len: any first term possible, scan.
    FullScan,
}

/// Ascending generator of candidate differences d = step·k, k = k0, k0+1, ...
/// capped at hi, optionally skipping k divisible by skip (used to keep the
/// forced-p class disjoint from the full-scan class).
struct Cursor {
    kind: CursorKind,
    step: u64,
    hi: u64,
    skip: Option<u64>,
    k: u64,
    done: bool,
}

impl Cursor {
    fn new(kind: CursorKind, step: u64, hi: u64, skip: Option<u64>, first_k: u64) -> Cursor {
        let mut c = Cursor {
            kind,
            step,
            hi,
            skip,
            k: 0,
            done: false,
        };
        c.seek(first_k);
        c
    }

    fn seek(&mut self, mut k: u64) {
        loop {
            if let Some(q) = self.skip {
                if k % q == 0 {
                    k += 1;
                    continue;
                }
            }
            match self.step.checked_mul(k) {
                Some(d) if d <= self.hi => {
                    self.k = k;
                    return;
                }
                _ => {
                    self.done = true;
                    return;
                }
            }
        }
    }

    fn peek(&self) -> Option<u64> {
        if self.done {
            None
        } else {
            Some(self.step * self.k)
        }
    }

    fn advance(&mut self) {
        if !self.done {
            self.seek(self.k + 1);
        }
    }
}

/// Sets up the candidate-difference classes.
///
/// With the shortcut on, the admissible differences split exactly three ways
/// (len >= 2):
///   - d < len: the forcing argument (p = q - i·d for each missed prime q)
///     can place several small primes; try every prime <= len as first term.
///   - d >= len missing exactly one prime q <= len: the forced term p = q - i·d
///     needs i = 0 because 0 < i would give p <= q - d <= len - d <= 0; so
///     p = q exactly.
///   - d >= len divisible by the full primorial: unrestricted scan.
/// Differences >= len missing two or more primes are provably hopeless (the
/// first term would have to equal two distinct primes) and are skipped; the
/// cross-check tests confirm against a shortcut-free sweep.
fn build_cursors(
    len: usize,
    max_d: u64,
    opts: &SearchOptions,
    small_primes: &[u64],
) -> Result<Vec<Cursor>> {
    let len_u = len as u64;
    let mut cursors = Vec::new();
    if !opts.primorial_shortcut {
        // Brute sweep: every difference is a full scan. Only sane on small
        // boxes; exists to cross-check the shortcut.
        cursors.push(Cursor::new(CursorKind::FullScan, 1, max_d, None, 1));
        return Ok(cursors);
    }
    if len_u > 1 {
        let small_hi = (len_u - 1).min(max_d);
        cursors.push(Cursor::new(CursorKind::SmallD, 1, small_hi, None, 1));
    }
    match primorial_up_to(len_u) {
        Some(primorial) => {
            cursors.push(Cursor::new(CursorKind::FullScan, primorial, max_d, None, 1));
            for &q in small_primes {
                // Multiples of primorial/q that are not multiples of the full
                // primorial; q is coprime to the step, so skipping k = 0 mod q
                // filters exactly the full-primorial multiples.
                let step = primorial / q;
                if step <= max_d {
                    cursors.push(Cursor::new(
                        CursorKind::ForcedP(q),
                        step,
                        max_d,
                        Some(q),
                        1,
                    ));
                }
            }
        }
        None => {
            // The primorial exceeds u64, so no difference in range is
            // divisible by it; only the forced classes can exist, and only
            // when their step fits.
            for &q in small_primes {
                let step: Option<u64> = small_primes
                    .iter()
                    .filter(|&&r| r != q)
                    .try_fold(1u64, |acc, &r| acc.checked_mul(r));
                if let Some(step) = step {
                    if step <= max_d {
                        cursors.push(Cursor::new(
                            CursorKind::ForcedP(q),
                            step,
                            max_d,
                            Some(q),
                            1,
                        ));
                    }
                }
            }
        }
    }
    Ok(cursors)
}

enum ScanOutcome {
    Hit(u64),
    NoHit,
    TimedOut,
}

/// Scans first terms in [lo_p, hi_p] for difference d, smallest hit wins.
///
/// Sieves len windows shifted by 0, d, ..., (len-1)·d and ANDs them, so a
/// surviving bit means every term of the progression is free of factors up
/// to the base limit; survivors are then re-verified term-by-term with
/// `is_prime`. Windows are processed in blocks parallelized with rayon;
/// `find_map_first` makes the merge order-deterministic, so the result is
/// identical for any worker count.
fn scan_difference(
    seg: &SegmentSieve,
    d: u64,
    len: usize,
    lo_p: u64,
    hi_p: u64,
    deadline: Option<Instant>,
) -> ScanOutcome {
    let Some(span) = d.checked_mul(len as u64 - 1) else {
        return ScanOutcome::NoHit;
    };
    // Keep every shifted window end inside u64.
    let hi_p = hi_p.min(
        u64::MAX
            .saturating_sub(span)
            .saturating_sub(SCAN_WINDOW_BITS as u64 + 1),
    );
    if lo_p > hi_p {
        return ScanOutcome::NoHit;
    }
    let total = hi_p - lo_p + 1;
    let n_windows = total.div_ceil(SCAN_WINDOW_BITS as u64);
    let block = (rayon::current_num_threads().max(1) * 2) as u64;
    let mut w = 0u64;
    while w < n_windows {
        if let Some(dl) = deadline {
            if Instant::now() >= dl {
                return ScanOutcome::TimedOut;
            }
        }
        let upper = n_windows.min(w + block);
        let hit = (w..upper).into_par_iter().find_map_first(|k| {
            let w_lo = lo_p + k * SCAN_WINDOW_BITS as u64;
            let bits = SCAN_WINDOW_BITS.min((hi_p - w_lo + 1) as usize);
            scan_window(seg, d, len, w_lo, bits)
        });
        if let Some(p) = hit {
            return ScanOutcome::Hit(p);
        }
        w = upper;
    }
    ScanOutcome::NoHit
}

fn scan_window(seg: &SegmentSieve, d: u64, len: usize, w_lo: u64, bits: usize) -> Option<u64> {
    let words = bits.div_ceil(64);
    let mut acc = vec![!0u64; words];
    let tail = bits % 64;
    if tail != 0 {
        acc[words - 1] = (1u64 << tail) - 1;
    }
    for i in 0..len as u64 {
        if i == 0 {
            seg.mark_window(w_lo, bits, &mut acc);
        } else {
            // Primes dividing d repeat the same pattern in every shift;
            // the i = 0 pass already marked them.
            seg.mark_window_excluding(w_lo + i * d, bits, d, &mut acc);
        }
        if acc.iter().all(|&w| w == 0) {
            return None;
        }
    }
    for (widx, &word0) in acc.iter().enumerate() {
        let mut word = word0;
        while word != 0 {
            let bit = word.trailing_zeros() as u64;
            word &= word - 1;
            let p = w_lo + widx as u64 * 64 + bit;
            if (0..len as u64).all(|i| is_prime(p + i * d)) {
                return Some(p);
            }
        }
    }
    None
}

/// On-disk memo of search results, keyed by (len, p > d flag). Text lines of
/// the form `len flag p d` with flag 0 or 1.
///
/// Loading never fails: a missing file is an empty cache and unparseable or
/// invalid lines are skipped with a warning, so a corrupted cache can only
/// cost time, not correctness. Every entry is re-validated on load; a stored
/// AP is trusted only after its terms pass the primality check again.
#[derive(Debug)]
pub struct ApCache {
    path: PathBuf,
    entries: BTreeMap<(usize, bool), PrimeAP>,
    warnings: Vec<String>,
}

impl ApCache {
    /// Reads the cache at `path`, skipping bad lines with warnings.
    pub fn load(path: impl Into<PathBuf>) -> ApCache {
        let path = path.into();
        let mut cache = ApCache {
            path,
            entries: BTreeMap::new(),
            warnings: Vec::new(),
        };
        let text = match std::fs::read_to_string(&cache.path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return cache,
            Err(e) => {
                cache.warnings.push(format!(
                    "cannot read {}: {e}; starting with an empty cache",
                    cache.path.display()
                ));
                return cache;
            }
        };
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            match parse_cache_line(line) {
                Ok((len, p_gt_d, ap)) => {
                    cache.entries.insert((len, p_gt_d), ap);
                }
                Err(why) => cache
                    .warnings
                    .push(format!("cache line {}: {why}", idx + 1)),
            }
        }
        cache
    }

    /// Cache location: the PRIMESUM_AP_CACHE environment variable if set,
    /// else XDG_CACHE_HOME or ~/.cache, under primesum/ap-cache.txt. None
    /// when no base directory can be determined.
    pub fn default_path() -> Option<PathBuf> {
        if let Some(path) = std::env::var_os("PRIMESUM_AP_CACHE") {
            return Some(PathBuf::from(path));
        }
        let base = std::env::var_os("XDG_CACHE_HOME")
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))?;
        Some(base.join("primesum").join("ap-cache.txt"))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Messages about lines that were skipped during load.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Returns the stored AP for this query if it fits inside the current
    /// budget. An entry with d or p beyond the budget is ignored rather than
    /// returned, so a cached result can never make a constrained search
    /// pretend to succeed. The converse caveat: an entry found under a small
    /// budget is still served under a larger one, even if the larger budget
    /// could reach a lexicographically smaller pair; skip the cache when the
    /// minimal answer matters.
    pub fn lookup(&self, len: usize, p_gt_d: bool, budget: &SearchBudget) -> Option<PrimeAP> {
        let ap = self.entries.get(&(len, p_gt_d))?;
        if ap.d() <= budget.max_d && ap.p() <= budget.max_p {
            Some(*ap)
        } else {
            None
        }
    }

    /// Stores (replacing any previous entry for the same query).
    pub fn record(&mut self, len: usize, p_gt_d: bool, ap: PrimeAP) {
        self.entries.insert((len, p_gt_d), ap);
    }

    /// Writes the cache back atomically (temp file + rename). Creates the
    /// parent directory if needed.
    pub fn save(&self) -> Result<()> {
        if let Some(parent) = self.path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let mut text = String::new();
        for (&(len, p_gt_d), ap) in &self.entries {
            text.push_str(&format!(
                "{} {} {} {}\n",
                len,
                if p_gt_d { 1 } else { 0 },
                ap.p(),
                ap.d()
            ));
        }
        let tmp = self.path.with_extension("tmp");
        std::fs::write(&tmp, text)?;
        std::fs::rename(&tmp, &self.path)?;
        Ok(())
    }
}

fn parse_cache_line(line: &str) -> std::result::Result<(usize, bool, PrimeAP), String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let [len, flag, p, d] = fields.as_slice() else {
        return Err(format!("expected 4 fields, found {}", fields.len()));
    };
    let len: usize = len.parse().map_err(|_| format!("bad length {len:?}"))?;
    let p_gt_d = match *flag {
        "0" => false,
        "1" => true,
        other => return Err(format!("bad flag {other:?}")),
    };
    let p: u64 = p.parse().map_err(|_| format!("bad first term {p:?}"))?;
    let d: u64 = d.parse().map_err(|_| format!("bad difference {d:?}"))?;
    let ap = match validate_ap(p, d, len).map_err(|e| e.to_string())? {
        ApValidation::Valid(ap) => ap,
        ApValidation::Invalid { failing } => {
            return Err(format!("terms at indices {failing:?} are not prime"));
        }
    };
    if p_gt_d && (d < 2 || p <= d) {
        return Err("flag 1 requires p > d and d >= 2".into());
    }
    Ok((len, p_gt_d, ap))
}
