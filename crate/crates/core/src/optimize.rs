//! Extremal searches over `F(D, q)` and over its linear and affine members.
//!
//! Every `f` in `F(D, q)` is uniquely `phi + a` with `phi(0) = 0` and
//! `a = f(0)`, and `f(x) - x = C_phi(x) + a`. The constant `a` is then
//! optimized analytically: instability is the distance from `-a` to
//! `C_phi`, stability is `n` minus the distance from `-a` to the farthest
//! word of `C_phi`, and fixed points are the fiber `C_phi^{-1}(-a)`. The
//! exhaustive searches therefore enumerate only the normalized `phi`.
//!
//! Work is split by the local function of vertex 0. Each partition keeps its
//! own incumbent and partitions are merged by `(key, first index)`, so both
//! results and telemetry are independent of the thread count.

use std::cmp::Reverse;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::coding::{distance_map, remoteness_centre, LinearCode};
use crate::construct;
use crate::digraph::Digraph;
use crate::error::{cap_check, Error, Result};
use crate::fds::{min_translate_cover, state_count, AffineFds, Fds, FdsFile, Group, LogCount, Space, MAX_COVER_STATES, MAX_TABLE_STATES};
use crate::ffield::{gf2_rank, Field, Matrix};
use crate::guessgraph::{GuessingGraph, MAX_GRAPH_STATES};
use crate::ugraph::DEFAULT_NODE_CAP;

/// Default cap on the number of enumerated candidates.
pub const MAX_CANDIDATES: u128 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Constructions, then exhaustive search within the cap, else sampling.
    Auto,
    Exhaustive,
    Randomized,
    ConstructionOnly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBudget {
    pub mode: Mode,
    pub trials: u64,
    pub time_limit: Option<Duration>,
    pub seed: u64,
    pub max_candidates: u128,
    pub max_states: u128,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            mode: Mode::Auto,
            trials: 100_000,
            time_limit: None,
            seed: 0,
            max_candidates: MAX_CANDIDATES,
            max_states: MAX_TABLE_STATES,
        }
    }
}

impl SearchBudget {
    pub fn exhaustive() -> Self {
        SearchBudget { mode: Mode::Exhaustive, ..Default::default() }
    }

    pub fn randomized(trials: u64, seed: u64) -> Self {
        SearchBudget { mode: Mode::Randomized, trials, seed, ..Default::default() }
    }

    pub fn construction_only() -> Self {
        SearchBudget { mode: Mode::ConstructionOnly, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    Exact,
    /// Attained value of a maximization; the optimum may be larger.
    LowerBound,
    /// Attained value of a minimization; the optimum may be smaller.
    UpperBound,
    /// A maximizer meeting an analytic upper bound.
    UpperBoundMatched,
    /// A minimizer meeting an analytic lower bound.
    LowerBoundMatched,
}

impl Certificate {
    pub fn label(self) -> &'static str {
        match self {
            Certificate::Exact => "exact",
            Certificate::LowerBound => "lower-bound",
            Certificate::UpperBound => "upper-bound",
            Certificate::UpperBoundMatched => "upper-bound-matched",
            Certificate::LowerBoundMatched => "lower-bound-matched",
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Certificate::Exact | Certificate::UpperBoundMatched | Certificate::LowerBoundMatched)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    G,
    B,
    I,
    S,
    L,
    C,
    Glin,
    Iaff,
    Saff,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::G => "g",
            Quantity::B => "b",
            Quantity::I => "i",
            Quantity::S => "s",
            Quantity::L => "l",
            Quantity::C => "c",
            Quantity::Glin => "glin",
            Quantity::Iaff => "iaff",
            Quantity::Saff => "saff",
        }
    }

    pub fn parse(s: &str) -> Option<Quantity> {
        Some(match s {
            "g" => Quantity::G,
            "b" => Quantity::B,
            "i" => Quantity::I,
            "s" => Quantity::S,
            "l" => Quantity::L,
            "c" => Quantity::C,
            "glin" => Quantity::Glin,
            "iaff" => Quantity::Iaff,
            "saff" => Quantity::Saff,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Value {
    Integer(usize),
    Count(LogCount),
}

impl Value {
    /// The integer, or the count for `LogCount` values.
    pub fn raw(self) -> u128 {
        match self {
            Value::Integer(v) => v as u128,
            Value::Count(c) => c.count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Table(Fds),
    Affine(AffineFds),
}

impl Witness {
    pub fn to_file(&self) -> FdsFile {
        match self {
            Witness::Table(f) => FdsFile::from(f),
            Witness::Affine(f) => FdsFile::from(f),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Telemetry {
    pub candidates: u64,
    pub pruned: u64,
    pub partitions: u64,
    pub constructions: u64,
}

impl Telemetry {
    fn merge(&mut self, other: &Telemetry) {
        self.candidates += other.candidates;
        self.pruned += other.pruned;
        self.partitions += other.partitions;
        self.constructions += other.constructions;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremalResult {
    pub quantity: Quantity,
    pub value: Value,
    pub certified: Certificate,
    pub witness: Option<Witness>,
    /// Analytic bound compared against, in the value's raw form.
    pub bound: Option<u128>,
    pub telemetry: Telemetry,
}

/// `min(tau, n - ceil(n/q))`, an upper bound on `i(D, q)`.
pub fn instability_upper_bound(d: &Digraph, q: u32) -> usize {
    let clique = d.n() - d.n().div_ceil(q as usize);
    match d.feedback_vertex_number() {
        Ok((tau, _)) => tau.min(clique),
        Err(_) => clique,
    }
}

/// Upper bound on `s(D, q)` from the clique bound and the feedback bounds.
pub fn stability_upper_bound(d: &Digraph, q: u32) -> usize {
    let n = d.n();
    let mut best = n / q as usize;
    if let Ok((tau, _)) = d.feedback_vertex_number() {
        if tau == 0 {
            return 0;
        }
        let p = crate::coding::integer_root(q as u64 - 1, tau as u32).max(1) as usize;
        best = best.min(tau / p);
        for m in 1..=tau as u32 {
            if crate::coding::q_sequence(m) <= num_bigint::BigUint::from(q) {
                best = best.min(tau - m as usize);
            }
        }
    }
    best
}

/// `chi(G(D, q))` when the guessing graph fits, else `q^(n - tau)`.
pub fn dimension_lower_bound(d: &Digraph, q: u32) -> Result<u128> {
    if state_count(q, d.n()).is_some_and(|s| s <= MAX_GRAPH_STATES) {
        return Ok(GuessingGraph::build(d, q)?.chromatic_number()?.chi);
    }
    let (tau, _) = d.feedback_vertex_number()?;
    state_count(q, d.n() - tau).ok_or(Error::CapExceeded { what: "q^(n-tau)", size: u128::MAX, cap: u128::MAX })
}

/// Normalized local functions `phi_v` with `phi_v(0) = 0`.
struct Normalized {
    space: Space,
    /// `ctx[v][x]`: index of `x` restricted to `inn(v)`.
    ctx: Vec<Vec<u32>>,
    contexts: Vec<usize>,
    choices: Vec<u128>,
}

impl Normalized {
    fn new(d: &Digraph, q: u32, max_states: u128) -> Result<Normalized> {
        let space = Space::new(q, d.n(), max_states)?;
        let ctx = (0..d.n())
            .map(|v| (0..space.size()).map(|x| crate::guessgraph::context(&space, d.inn(v), x) as u32).collect())
            .collect();
        let contexts: Vec<usize> = (0..d.n()).map(|v| (q as usize).pow(d.inn(v).len() as u32)).collect();
        let choices = contexts.iter().map(|&k| state_count(q, k - 1).unwrap_or(u128::MAX)).collect();
        Ok(Normalized { space, ctx, contexts, choices })
    }

    fn total(&self) -> u128 {
        self.choices.iter().try_fold(1u128, |acc, &c| acc.checked_mul(c)).unwrap_or(u128::MAX)
    }

    fn n(&self) -> usize {
        self.space.n()
    }

    fn q(&self) -> u32 {
        self.space.q()
    }

    fn table_for(&self, v: usize, mut idx: u128) -> Vec<u32> {
        let q = self.q() as u128;
        let mut t = vec![0; self.contexts[v]];
        for k in (1..self.contexts[v]).rev() {
            t[k] = (idx % q) as u32;
            idx /= q;
        }
        t
    }

    /// Mixed-radix decode with vertex 0 most significant.
    fn tables(&self, mut idx: u128) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.n()];
        for v in (0..self.n()).rev() {
            out[v] = self.table_for(v, idx % self.choices[v]);
            idx /= self.choices[v];
        }
        out
    }

    /// Next assignment of vertices `from..n`; false on wrap-around.
    fn advance(&self, tables: &mut [Vec<u32>], from: usize) -> bool {
        let q = self.q();
        for v in (from..self.n()).rev() {
            for k in (1..self.contexts[v]).rev() {
                tables[v][k] += 1;
                if tables[v][k] < q {
                    return true;
                }
                tables[v][k] = 0;
            }
        }
        false
    }

    fn random_tables(&self, rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
        (0..self.n())
            .map(|v| (0..self.contexts[v]).map(|k| if k == 0 { 0 } else { rng.gen_range(0..self.q()) }).collect())
            .collect()
    }

    /// `C_phi(x) = phi(x) - x` for every state.
    fn differences(&self, tables: &[Vec<u32>], out: &mut [u32]) {
        let (q, sp) = (self.q(), &self.space);
        for (x, o) in out.iter_mut().enumerate() {
            let mut r = 0;
            for v in 0..self.n() {
                let phi = tables[v][self.ctx[v][x] as usize];
                r += ((phi + q - sp.digit(x, v)) % q) as usize * sp.place(v);
            }
            *o = r as u32;
        }
    }

    /// `f = phi + a`.
    fn fds(&self, tables: &[Vec<u32>], a: usize) -> Fds {
        let sp = &self.space;
        let table = (0..sp.size())
            .map(|x| {
                let phi = (0..self.n()).map(|v| tables[v][self.ctx[v][x] as usize] as usize * sp.place(v)).sum();
                Group::Cyclic.add_ranks(sp, phi, a) as u32
            })
            .collect();
        Fds::from_table_with(self.q(), self.n(), table, Group::Cyclic, u128::MAX).expect("valid table")
    }
}

/// Per-candidate objective: smaller keys are better; `None` means pruned.
trait Objective: Sync {
    type Key: Ord + Copy + Send;
    fn eval(&self, diffs: &[u32], incumbent: Option<Self::Key>) -> Option<(Self::Key, usize)>;
}

struct Best<K> {
    key: K,
    index: u128,
    extra: usize,
    tables: Vec<Vec<u32>>,
}

fn better<K: Ord>(a: &Option<Best<K>>, key: &K, index: u128) -> bool {
    match a {
        None => true,
        Some(b) => (key, index) < (&b.key, b.index),
    }
}

fn check_time(start: Instant, limit: Option<Duration>) -> Result<()> {
    match limit {
        Some(l) if start.elapsed() > l => {
            Err(Error::CapExceeded { what: "time limit (ms)", size: start.elapsed().as_millis(), cap: l.as_millis() })
        }
        _ => Ok(()),
    }
}

fn search_exhaustive<O: Objective>(norm: &Normalized, obj: &O, budget: &SearchBudget) -> Result<(Best<O::Key>, Telemetry)> {
    let total = norm.total();
    cap_check("normalized candidates", total, budget.max_candidates)?;
    let start = Instant::now();
    let rest = total / norm.choices[0];
    let parts: Vec<Result<(Option<Best<O::Key>>, Telemetry)>> = (0..norm.choices[0])
        .into_par_iter()
        .map(|p| {
            let mut tel = Telemetry { partitions: 1, ..Default::default() };
            let mut tables = norm.tables(p * rest);
            let mut diffs = vec![0u32; norm.space.size()];
            let mut best: Option<Best<O::Key>> = None;
            let mut index = p * rest;
            loop {
                if tel.candidates % 4096 == 0 {
                    check_time(start, budget.time_limit)?;
                }
                norm.differences(&tables, &mut diffs);
                tel.candidates += 1;
                match obj.eval(&diffs, best.as_ref().map(|b| b.key)) {
                    Some((key, extra)) if better(&best, &key, index) => {
                        best = Some(Best { key, index, extra, tables: tables.clone() })
                    }
                    Some(_) => {}
                    None => tel.pruned += 1,
                }
                index += 1;
                if norm.n() == 1 || !norm.advance(&mut tables, 1) {
                    break;
                }
            }
            Ok((best, tel))
        })
        .collect();
    let mut tel = Telemetry::default();
    let mut best: Option<Best<O::Key>> = None;
    for part in parts {
        let (b, t) = part?;
        tel.merge(&t);
        if let Some(b) = b {
            if better(&best, &b.key, b.index) {
                best = Some(b);
            }
        }
    }
    Ok((best.expect("at least one candidate"), tel))
}

fn search_random<O: Objective>(
    norm: &Normalized,
    obj: &O,
    budget: &SearchBudget,
    target: Option<O::Key>,
) -> Result<(Best<O::Key>, Telemetry)> {
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let start = Instant::now();
    let mut tel = Telemetry { partitions: 1, ..Default::default() };
    let mut best: Option<Best<O::Key>> = None;
    let mut diffs = vec![0u32; norm.space.size()];
    for trial in 0..budget.trials.max(1) {
        if budget.time_limit.is_some_and(|l| start.elapsed() > l) {
            break;
        }
        let tables = norm.random_tables(&mut rng);
        norm.differences(&tables, &mut diffs);
        tel.candidates += 1;
        match obj.eval(&diffs, best.as_ref().map(|b| b.key)) {
            Some((key, extra)) if better(&best, &key, trial as u128) => {
                best = Some(Best { key, index: trial as u128, extra, tables })
            }
            Some(_) => {}
            None => tel.pruned += 1,
        }
        if let (Some(t), Some(b)) = (target, &best) {
            if b.key <= t {
                break;
            }
        }
    }
    Ok((best.expect("at least one trial"), tel))
}

fn code_set(space: &Space, diffs: &[u32]) -> BitSet {
    let mut set = BitSet::new(space.size());
    for &c in diffs {
        set.insert(c as usize);
    }
    set
}

struct InstabilityObj<'a>(&'a Space);

impl Objective for InstabilityObj<'_> {
    type Key = Reverse<usize>;
    fn eval(&self, diffs: &[u32], _: Option<Self::Key>) -> Option<(Self::Key, usize)> {
        let dist = distance_map(self.0, &code_set(self.0, diffs));
        let cr = *dist.iter().max().unwrap();
        let hole = dist.iter().position(|&d| d == cr).unwrap();
        Some((Reverse(cr as usize), hole))
    }
}

struct StabilityObj<'a>(&'a Space);

impl Objective for StabilityObj<'_> {
    type Key = usize;
    fn eval(&self, diffs: &[u32], _: Option<usize>) -> Option<(usize, usize)> {
        let (centre, rem) = remoteness_centre(self.0, &code_set(self.0, diffs));
        Some((rem, centre))
    }
}

struct DimensionObj<'a>(&'a Space);

impl Objective for DimensionObj<'_> {
    type Key = usize;
    fn eval(&self, diffs: &[u32], _: Option<usize>) -> Option<(usize, usize)> {
        Some((code_set(self.0, diffs).count(), 0))
    }
}

struct CosetObj<'a> {
    space: &'a Space,
    node_cap: u64,
}

impl Objective for CosetObj<'_> {
    type Key = usize;
    fn eval(&self, diffs: &[u32], incumbent: Option<usize>) -> Option<(usize, usize)> {
        let size = self.space.size();
        let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); size];
        for (x, &c) in diffs.iter().enumerate() {
            fibers[c as usize].push(x);
        }
        let mut order: Vec<usize> = (0..size).filter(|&y| !fibers[y].is_empty()).collect();
        order.sort_by_key(|&y| (Reverse(fibers[y].len()), y));
        let mut best: Option<(usize, usize)> = None;
        for y in order {
            let bound = size.div_ceil(fibers[y].len());
            let limit = match (best, incumbent) {
                (Some((b, _)), Some(i)) => b.min(i + 1),
                (Some((b, _)), None) => b,
                (None, Some(i)) => i + 1,
                (None, None) => usize::MAX,
            };
            if bound >= limit {
                continue;
            }
            let cover = min_translate_cover(self.space, &Group::Cyclic, &fibers[y], true, self.node_cap).ok()?.len();
            if best.is_none_or(|(b, _)| cover < b) {
                best = Some((cover, y));
            }
        }
        best
    }
}

fn neg_rank(space: &Space, a: usize) -> usize {
    Group::Cyclic.sub_ranks(space, 0, a)
}

fn finish_table(
    quantity: Quantity,
    norm: &Normalized,
    value: Value,
    best: &Best<impl Ord>,
    offset: usize,
    certified: Certificate,
    bound: Option<u128>,
    telemetry: Telemetry,
) -> ExtremalResult {
    let witness = norm.fds(&best.tables, offset);
    ExtremalResult { quantity, value, certified, witness: Some(Witness::Table(witness)), bound, telemetry }
}

fn tabulable(d: &Digraph, q: u32, budget: &SearchBudget) -> bool {
    state_count(q, d.n()).is_some_and(|s| s <= budget.max_states)
}

/// Best construction for `i(D, q)` with its scanned value.
fn instability_constructions(d: &Digraph, q: u32, budget: &SearchBudget, tel: &mut Telemetry) -> Result<Option<(usize, Fds)>> {
    if !tabulable(d, q, budget) {
        return Ok(None);
    }
    let mut cands = vec![construct::cycle_packing_instability(d, q)?.1, construct::clique_blocks_instability(d, q)?];
    if let Ok((q0, f)) = construct::chordless_cover_with(d, budget.max_states) {
        if q0 <= q {
            cands.push(construct::lift(&f, q)?);
        }
    }
    if d.is_symmetric() {
        if let Ok((q0, f)) = construct::undirected_degree_instability(d) {
            if q0 <= q {
                cands.push(construct::lift(&f, q)?);
            }
        }
    }
    tel.constructions += cands.len() as u64;
    Ok(cands.into_iter().map(|f| (f.metrics().i, f)).max_by_key(|(i, _)| *i))
}

fn stability_constructions(d: &Digraph, q: u32, budget: &SearchBudget, tel: &mut Telemetry) -> Result<Option<(usize, Fds)>> {
    if !tabulable(d, q, budget) {
        return Ok(None);
    }
    let mut cands = vec![construct::clique_packing_on(d, q)?.1];
    if q == 2 {
        if let Some((_, f)) = instability_constructions(d, 2, budget, tel)? {
            cands.push(construct::complement(&f)?);
        }
    }
    tel.constructions += cands.len() as u64;
    Ok(cands.into_iter().map(|f| (f.metrics().s, f)).max_by_key(|(s, _)| *s))
}

/// `i(D, q) = max_{f in F(D,q)} i(f)`.
pub fn instability(d: &Digraph, q: u32, budget: &SearchBudget) -> Result<ExtremalResult> {
    let upper = instability_upper_bound(d, q);
    let mut tel = Telemetry::default();
    let construction = if matches!(budget.mode, Mode::Auto | Mode::ConstructionOnly) {
        instability_constructions(d, q, budget, &mut tel)?
    } else {
        None
    };
    if let Some((i, f)) = &construction {
        if *i == upper || budget.mode == Mode::ConstructionOnly {
            let certified = if *i == upper { Certificate::UpperBoundMatched } else { Certificate::LowerBound };
            return Ok(ExtremalResult {
                quantity: Quantity::I,
                value: Value::Integer(*i),
                certified,
                witness: Some(Witness::Table(f.clone())),
                bound: Some(upper as u128),
                telemetry: tel,
            });
        }
    }
    if budget.mode == Mode::ConstructionOnly {
        return Err(Error::CapExceeded { what: "state space for constructions", size: u128::MAX, cap: budget.max_states });
    }
    let norm = Normalized::new(d, q, budget.max_states)?;
    let obj = InstabilityObj(&norm.space);
    let exhaustive = budget.mode == Mode::Exhaustive || (budget.mode == Mode::Auto && norm.total() <= budget.max_candidates);
    let (best, t) = if exhaustive {
        search_exhaustive(&norm, &obj, budget)?
    } else {
        search_random(&norm, &obj, budget, Some(Reverse(upper)))?
    };
    tel.merge(&t);
    let value = best.key.0;
    let certified = if exhaustive {
        Certificate::Exact
    } else if value == upper {
        Certificate::UpperBoundMatched
    } else {
        Certificate::LowerBound
    };
    if let (false, Some((i, f))) = (exhaustive, construction) {
        if i > value {
            let certified = if i == upper { Certificate::UpperBoundMatched } else { Certificate::LowerBound };
            return Ok(ExtremalResult {
                quantity: Quantity::I,
                value: Value::Integer(i),
                certified,
                witness: Some(Witness::Table(f)),
                bound: Some(upper as u128),
                telemetry: tel,
            });
        }
    }
    let offset = neg_rank(&norm.space, best.extra);
    Ok(finish_table(Quantity::I, &norm, Value::Integer(value), &best, offset, certified, Some(upper as u128), tel))
}

/// `x -> x + 1`, which never agrees with `x` anywhere.
fn shift_by_one(n: usize, q: u32, budget: &SearchBudget) -> Result<Option<Witness>> {
    if let Ok(field) = Field::new(q as u64) {
        return Ok(Some(Witness::Affine(AffineFds::new(Arc::new(field), Matrix::zeros(n, n), vec![1; n])?)));
    }
    if state_count(q, n).is_some_and(|s| s <= budget.max_states) {
        return Ok(Some(Witness::Table(Fds::from_fn(q, n, |x| x.iter().map(|&a| (a + 1) % q).collect())?)));
    }
    Ok(None)
}

/// `s(D, q) = max_{f in F(D,q)} s(f)`.
pub fn stability(d: &Digraph, q: u32, budget: &SearchBudget) -> Result<ExtremalResult> {
    let n = d.n();
    let upper = stability_upper_bound(d, q);
    let mut tel = Telemetry::default();
    if upper == 0 && budget.mode != Mode::Exhaustive {
        if let Some(w) = shift_by_one(d.n(), q, budget)? {
            tel.constructions += 1;
            return Ok(ExtremalResult {
                quantity: Quantity::S,
                value: Value::Integer(0),
                certified: Certificate::UpperBoundMatched,
                witness: Some(w),
                bound: Some(0),
                telemetry: tel,
            });
        }
    }
    let construction = if matches!(budget.mode, Mode::Auto | Mode::ConstructionOnly) {
        stability_constructions(d, q, budget, &mut tel)?
    } else {
        None
    };
    if let Some((s, f)) = &construction {
        if *s == upper || budget.mode == Mode::ConstructionOnly {
            let certified = if *s == upper { Certificate::UpperBoundMatched } else { Certificate::LowerBound };
            return Ok(ExtremalResult {
                quantity: Quantity::S,
                value: Value::Integer(*s),
                certified,
                witness: Some(Witness::Table(f.clone())),
                bound: Some(upper as u128),
                telemetry: tel,
            });
        }
    }
    if budget.mode == Mode::ConstructionOnly {
        return Err(Error::CapExceeded { what: "state space for constructions", size: u128::MAX, cap: budget.max_states });
    }
    let norm = Normalized::new(d, q, budget.max_states)?;
    let obj = StabilityObj(&norm.space);
    let exhaustive = budget.mode == Mode::Exhaustive || (budget.mode == Mode::Auto && norm.total() <= budget.max_candidates);
    let (best, t) = if exhaustive {
        search_exhaustive(&norm, &obj, budget)?
    } else {
        search_random(&norm, &obj, budget, Some(n - upper))?
    };
    tel.merge(&t);
    let value = n - best.key;
    if let (false, Some((s, f))) = (exhaustive, &construction) {
        if *s > value {
            let certified = if *s == upper { Certificate::UpperBoundMatched } else { Certificate::LowerBound };
            return Ok(ExtremalResult {
                quantity: Quantity::S,
                value: Value::Integer(*s),
                certified,
                witness: Some(Witness::Table(f.clone())),
                bound: Some(upper as u128),
                telemetry: tel,
            });
        }
    }
    let certified = if exhaustive {
        Certificate::Exact
    } else if value == upper {
        Certificate::UpperBoundMatched
    } else {
        Certificate::LowerBound
    };
    let offset = neg_rank(&norm.space, best.extra);
    Ok(finish_table(Quantity::S, &norm, Value::Integer(value), &best, offset, certified, Some(upper as u128), tel))
}

/// The FDS fixing a maximum independent set of the guessing graph.
fn independent_set_construction(d: &Digraph, q: u32) -> Result<Option<Fds>> {
    if state_count(q, d.n()).is_none_or(|s| s > MAX_GRAPH_STATES) {
        return Ok(None);
    }
    let g = GuessingGraph::build(d, q)?;
    let ind = g.independence_number()?;
    Ok(Some(g.fds_fixing(&ind.witness)?))
}

#[allow(clippy::too_many_arguments)]
fn minimize_table<O: Objective<Key = usize>>(
    quantity: Quantity,
    d: &Digraph,
    q: u32,
    budget: &SearchBudget,
    obj: &O,
    norm: &Normalized,
    offset_of: impl Fn(usize) -> usize,
    metric: impl Fn(&Fds) -> Result<u128>,
) -> Result<ExtremalResult> {
    let count = |v: u128| Value::Count(LogCount::new(v, q));
    let lower = match budget.mode {
        Mode::Exhaustive => None,
        _ => Some(dimension_lower_bound(d, q)?),
    };
    let mut tel = Telemetry::default();
    let mut construction = None;
    if matches!(budget.mode, Mode::Auto | Mode::ConstructionOnly) {
        if let Some(f) = independent_set_construction(d, q)? {
            tel.constructions += 1;
            construction = Some((metric(&f)?, f));
        }
    }
    let from_construction = |v: u128, f: &Fds, tel: Telemetry| {
        let certified = if lower == Some(v) { Certificate::LowerBoundMatched } else { Certificate::UpperBound };
        ExtremalResult { quantity, value: count(v), certified, witness: Some(Witness::Table(f.clone())), bound: lower, telemetry: tel }
    };
    if let Some((v, f)) = &construction {
        if lower == Some(*v) || budget.mode == Mode::ConstructionOnly {
            return Ok(from_construction(*v, f, tel));
        }
    }
    if budget.mode == Mode::ConstructionOnly {
        return Err(Error::CapExceeded { what: "guessing graph q^n for constructions", size: u128::MAX, cap: MAX_GRAPH_STATES });
    }
    let exhaustive = budget.mode == Mode::Exhaustive || (budget.mode == Mode::Auto && norm.total() <= budget.max_candidates);
    let (best, t) = if exhaustive {
        search_exhaustive(norm, obj, budget)?
    } else {
        search_random(norm, obj, budget, lower.map(|l| l as usize))?
    };
    tel.merge(&t);
    let value = best.key as u128;
    if let (false, Some((v, f))) = (exhaustive, &construction) {
        if *v < value {
            return Ok(from_construction(*v, f, tel));
        }
    }
    let certified = if exhaustive {
        Certificate::Exact
    } else if lower == Some(value) {
        Certificate::LowerBoundMatched
    } else {
        Certificate::UpperBound
    };
    Ok(finish_table(quantity, norm, count(value), &best, offset_of(best.extra), certified, lower, tel))
}

/// `l(D, q) = min_{f in F(D,q)} log_q |C_f|`.
pub fn guessing_dimension_of_graph(d: &Digraph, q: u32, budget: &SearchBudget) -> Result<ExtremalResult> {
    let norm = Normalized::new(d, q, budget.max_states)?;
    let obj = DimensionObj(&norm.space);
    minimize_table(Quantity::L, d, q, budget, &obj, &norm, |_| 0, |f| Ok(f.guessing_dimension().count))
}

/// `c(D, q) = min_{f in F(D,q)} c(f)`.
pub fn coset_dimension_of_graph(d: &Digraph, q: u32, budget: &SearchBudget) -> Result<ExtremalResult> {
    let norm = Normalized::new(d, q, budget.max_states.min(MAX_COVER_STATES))?;
    let obj = CosetObj { space: &norm.space, node_cap: DEFAULT_NODE_CAP };
    let space = norm.space.clone();
    minimize_table(Quantity::C, d, q, budget, &obj, &norm, move |y| neg_rank(&space, y), |f| Ok(f.coset_dimension()?.count))
}

/// Evaluations without improvement before a local search restarts.
const LOCAL_RESTART: u64 = 2000;

/// Supported matrices over GF(q), one value per arc.
struct MatrixSpace {
    field: Arc<Field>,
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl MatrixSpace {
    fn new(d: &Digraph, q: u32) -> Result<MatrixSpace> {
        let field = Arc::new(Field::new(q as u64)?);
        Ok(MatrixSpace { field, n: d.n(), arcs: d.arcs().collect() })
    }

    fn q(&self) -> u32 {
        self.field.order()
    }

    fn total(&self) -> u128 {
        state_count(self.q(), self.arcs.len()).unwrap_or(u128::MAX)
    }

    fn values(&self, mut idx: u128) -> Vec<u32> {
        let q = self.q() as u128;
        let mut v = vec![0; self.arcs.len()];
        for slot in v.iter_mut().rev() {
            *slot = (idx % q) as u32;
            idx /= q;
        }
        v
    }

    fn matrix(&self, values: &[u32]) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n);
        for (&(u, v), &a) in self.arcs.iter().zip(values) {
            m.set(u, v, a);
        }
        m
    }

    /// Rows of `M - I` as bitmasks; GF(2) only.
    fn gf2_rows(&self, values: &[u32]) -> Vec<u64> {
        let mut rows: Vec<u64> = (0..self.n).map(|v| 1u64 << v).collect();
        for (&(u, v), &a) in self.arcs.iter().zip(values) {
            if a == 1 {
                rows[u] |= 1 << v;
            }
        }
        rows
    }

    fn affine(&self, values: &[u32], offset: Vec<u32>) -> AffineFds {
        AffineFds::new(self.field.clone(), self.matrix(values), offset).expect("supported matrix")
    }
}

/// Covering radius of a binary code given by generator rows, with a deep hole.
pub fn gf2_covering_radius(rows: &[u64], n: usize) -> (usize, u64) {
    let mut basis: Vec<(usize, u64)> = Vec::new();
    for &r in rows {
        let mut v = r;
        for &(p, b) in &basis {
            if v >> p & 1 == 1 {
                v ^= b;
            }
        }
        if v != 0 {
            let p = v.trailing_zeros() as usize;
            for e in basis.iter_mut() {
                if e.1 >> p & 1 == 1 {
                    e.1 ^= v;
                }
            }
            basis.push((p, v));
        }
    }
    let pivots: u64 = basis.iter().fold(0, |m, &(p, _)| m | 1 << p);
    let free: Vec<usize> = (0..n).filter(|&c| pivots >> c & 1 == 0).collect();
    let index = |v: u64| free.iter().enumerate().fold(0usize, |acc, (i, &c)| acc | ((v >> c & 1) as usize) << i);
    let moves: Vec<usize> = (0..n)
        .map(|j| {
            let mut v = 1u64 << j;
            for &(p, b) in &basis {
                if v >> p & 1 == 1 {
                    v ^= b;
                }
            }
            index(v)
        })
        .collect();
    let size = 1usize << free.len();
    let mut dist = vec![u8::MAX; size];
    dist[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for &m in &moves {
            let y = x ^ m;
            if dist[y] == u8::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    let cr = *dist.iter().max().unwrap();
    let t = dist.iter().position(|&d| d == cr).unwrap();
    let hole = free.iter().enumerate().fold(0u64, |acc, (i, &c)| acc | ((t >> i & 1) as u64) << c);
    (cr as usize, hole)
}

/// Per-matrix objective for the linear and affine searches.
trait MatrixObjective: Sync {
    /// Larger is better.
    fn score(&self, ms: &MatrixSpace, values: &[u32]) -> Result<usize>;
}

struct LinearGuessing;

impl MatrixObjective for LinearGuessing {
    fn score(&self, ms: &MatrixSpace, values: &[u32]) -> Result<usize> {
        if ms.q() == 2 && ms.n <= 64 {
            return Ok(ms.n - gf2_rank(&mut ms.gf2_rows(values)));
        }
        Ok(ms.n - ms.matrix(values).minus_identity(&ms.field).rank(&ms.field))
    }
}

struct AffineInstability;

impl MatrixObjective for AffineInstability {
    fn score(&self, ms: &MatrixSpace, values: &[u32]) -> Result<usize> {
        if ms.q() == 2 && ms.n <= 64 {
            return Ok(gf2_covering_radius(&ms.gf2_rows(values), ms.n).0);
        }
        LinearCode::from_generator(ms.field.clone(), &ms.matrix(values).minus_identity(&ms.field)).covering_radius()
    }
}

struct AffineStability;

impl MatrixObjective for AffineStability {
    fn score(&self, ms: &MatrixSpace, values: &[u32]) -> Result<usize> {
        if ms.q() == 2 && ms.n <= 64 {
            // binary remoteness is n - cr
            return Ok(gf2_covering_radius(&ms.gf2_rows(values), ms.n).0);
        }
        let code = LinearCode::from_generator(ms.field.clone(), &ms.matrix(values).minus_identity(&ms.field));
        Ok(ms.n - code.remoteness()?)
    }
}

/// Returns `(score, values, telemetry, exhaustive)`.
fn search_matrices(
    ms: &MatrixSpace,
    obj: &impl MatrixObjective,
    budget: &SearchBudget,
    target: Option<usize>,
) -> Result<(usize, Vec<u32>, Telemetry, bool)> {
    let total = ms.total();
    let exhaustive = budget.mode == Mode::Exhaustive || (budget.mode == Mode::Auto && total <= budget.max_candidates);
    let start = Instant::now();
    if exhaustive {
        cap_check("supported matrices q^|E|", total, budget.max_candidates)?;
        let chunk = 1u128 << 12;
        let chunks = total.div_ceil(chunk);
        let parts: Vec<Result<(usize, u128, u64)>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                check_time(start, budget.time_limit)?;
                let mut best = (0usize, u128::MAX);
                let end = ((c + 1) * chunk).min(total);
                for idx in c * chunk..end {
                    let s = obj.score(ms, &ms.values(idx))?;
                    if best.1 == u128::MAX || s > best.0 {
                        best = (s, idx);
                    }
                }
                Ok((best.0, best.1, (end - c * chunk) as u64))
            })
            .collect();
        let mut tel = Telemetry::default();
        let mut best = (0usize, u128::MAX);
        for p in parts {
            let (s, idx, count) = p?;
            tel.candidates += count;
            tel.partitions += 1;
            if best.1 == u128::MAX || (Reverse(s), idx) < (Reverse(best.0), best.1) {
                best = (s, idx);
            }
        }
        return Ok((best.0, ms.values(best.1), tel, true));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut tel = Telemetry { partitions: 1, ..Default::default() };
    let mut best: Option<(usize, Vec<u32>)> = None;
    let mut current: Option<(usize, Vec<u32>)> = None;
    let mut stale = 0u64;
    for _ in 0..budget.trials.max(1) {
        if budget.time_limit.is_some_and(|l| start.elapsed() > l) {
            break;
        }
        let values = match &current {
            Some((_, cur)) if stale < LOCAL_RESTART && !ms.arcs.is_empty() => {
                let mut v = cur.clone();
                let k = rng.gen_range(0..v.len());
                v[k] = (v[k] + rng.gen_range(1..ms.q())) % ms.q();
                v
            }
            _ => {
                stale = 0;
                current = None;
                (0..ms.arcs.len()).map(|_| rng.gen_range(0..ms.q())).collect()
            }
        };
        let s = obj.score(ms, &values)?;
        tel.candidates += 1;
        stale += 1;
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, values.clone()));
            stale = 0;
        }
        // sideways moves are accepted
        if current.as_ref().is_none_or(|(c, _)| s >= *c) {
            current = Some((s, values));
        }
        if target.is_some_and(|t| best.as_ref().unwrap().0 >= t) {
            break;
        }
    }
    let (s, v) = best.unwrap();
    Ok((s, v, tel, false))
}

fn matrix_certificate(exhaustive: bool, value: usize, upper: usize) -> Certificate {
    if exhaustive {
        Certificate::Exact
    } else if value == upper {
        Certificate::UpperBoundMatched
    } else {
        Certificate::LowerBound
    }
}

/// `g_lin(D, q) = max n - rank(M - I)` over matrices supported on `D`.
pub fn linear_guessing(d: &Digraph, q: u32, budget: &SearchBudget) -> Result<ExtremalResult> {
    let ms = MatrixSpace::new(d, q)?;
    let (tau, _) = d.feedback_vertex_number()?;
    let (value, values, tel, exhaustive) = search_matrices(&ms, &LinearGuessing, budget, Some(tau))?;
    Ok(ExtremalResult {
        quantity: Quantity::Glin,
        value: Value::Integer(value),
        certified: matrix_certificate(exhaustive, value, tau),
        witness: Some(Witness::Affine(ms.affine(&values, vec![0; d.n()]))),
        bound: Some(tau as u128),
        telemetry: tel,
    })
}

fn simplex_match(d: &Digraph) -> Option<AffineFds> {
    (2..=4u32).find(|&r| (1usize << r) - 1 == d.n() && Digraph::simplex(r).is_ok_and(|s| &s == d)).map(|r| construct::simplex_affine(r).unwrap())
}

fn affine_search(
    quantity: Quantity,
    d: &Digraph,
    q: u32,
    budget: &SearchBudget,
    upper: usize,
    obj: &impl MatrixObjective,
    constructions: Vec<AffineFds>,
    offset: impl Fn(&AffineFds) -> Result<Vec<u32>>,
    metric: impl Fn(&AffineFds) -> Result<usize>,
) -> Result<ExtremalResult> {
    let ms = MatrixSpace::new(d, q)?;
    let mut tel = Telemetry::default();
    let mut best_construction: Option<(usize, AffineFds)> = None;
    if matches!(budget.mode, Mode::Auto | Mode::ConstructionOnly) {
        tel.constructions = constructions.len() as u64;
        for f in constructions {
            let f = f.with_offset(offset(&f)?)?;
            let v = metric(&f)?;
            if best_construction.as_ref().is_none_or(|(b, _)| v > *b) {
                best_construction = Some((v, f));
            }
        }
        if let Some((v, f)) = &best_construction {
            if *v == upper || budget.mode == Mode::ConstructionOnly {
                return Ok(ExtremalResult {
                    quantity,
                    value: Value::Integer(*v),
                    certified: matrix_certificate(false, *v, upper),
                    witness: Some(Witness::Affine(f.clone())),
                    bound: Some(upper as u128),
                    telemetry: tel,
                });
            }
        }
    }
    let (value, values, t, exhaustive) = search_matrices(&ms, obj, budget, Some(upper))?;
    tel.merge(&t);
    if let (false, Some((v, f))) = (exhaustive, &best_construction) {
        if *v > value {
            return Ok(ExtremalResult {
                quantity,
                value: Value::Integer(*v),
                certified: matrix_certificate(false, *v, upper),
                witness: Some(Witness::Affine(f.clone())),
                bound: Some(upper as u128),
                telemetry: tel,
            });
        }
    }
    let linear = ms.affine(&values, vec![0; d.n()]);
    let witness = linear.with_offset(offset(&linear)?)?;
    debug_assert_eq!(metric(&witness)?, value);
    Ok(ExtremalResult {
        quantity,
        value: Value::Integer(value),
        certified: matrix_certificate(exhaustive, value, upper),
        witness: Some(Witness::Affine(witness)),
        bound: Some(upper as u128),
        telemetry: tel,
    })
}

fn affine_constructions(d: &Digraph, q: u32) -> Result<Vec<AffineFds>> {
    let field = Arc::new(Field::new(q as u64)?);
    let mut out = vec![construct::affine_cycle_packing(d, field)?];
    if q == 2 {
        out.extend(simplex_match(d));
    }
    Ok(out)
}

/// `i_aff(D, q)`: the best covering radius of `rowspace(M - I)`, attained by
/// offsetting with a deep hole.
pub fn affine_instability(d: &Digraph, q: u32, budget: &SearchBudget) -> Result<ExtremalResult> {
    let upper = instability_upper_bound(d, q);
    let cands = if matches!(budget.mode, Mode::Auto | Mode::ConstructionOnly) { affine_constructions(d, q)? } else { Vec::new() };
    affine_search(Quantity::Iaff, d, q, budget, upper, &AffineInstability, cands, construct::deepest_offset, |f| {
        Ok(f.structural_metrics()?.i)
    })
}

/// `s_aff(D, q)`: `n` minus the least remoteness of `rowspace(M - I)`.
pub fn affine_stability(d: &Digraph, q: u32, budget: &SearchBudget) -> Result<ExtremalResult> {
    let upper = stability_upper_bound(d, q);
    let cands = if matches!(budget.mode, Mode::Auto | Mode::ConstructionOnly) { affine_constructions(d, q)? } else { Vec::new() };
    affine_search(Quantity::Saff, d, q, budget, upper, &AffineStability, cands, construct::stablest_offset, |f| {
        Ok(f.structural_metrics()?.s)
    })
}
