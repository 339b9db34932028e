//! Finite dynamical systems `f: [q]^n -> [q]^n` as explicit tables or affine
//! maps, and their per-function metrics.
//!
//! States are ranked lexicographically with `x_1` as the most significant
//! digit. Differences `f(x) - x` use the field's additive group when a field
//! is attached and coordinatewise arithmetic mod q otherwise.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::coding::{Code, LinearCode};
use crate::digraph::Digraph;
use crate::error::{cap_check, Error, Result};
use crate::ffield::{Field, Matrix};

/// Default cap on tabulated state spaces.
pub const MAX_TABLE_STATES: u128 = 1 << 20;
/// Default cap on the state space of exact translate covers.
pub const MAX_COVER_STATES: u128 = 1 << 12;

/// `q^n`, or `None` on overflow.
pub fn state_count(q: u32, n: usize) -> Option<u128> {
    (q as u128).checked_pow(n as u32)
}

/// The ranked state space `[q]^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    q: u32,
    n: usize,
    size: usize,
    place: Vec<usize>,
}

impl Space {
    pub fn new(q: u32, n: usize, cap: u128) -> Result<Space> {
        if q < 2 {
            return Err(Error::Invalid(format!("alphabet size must be at least 2, got {q}")));
        }
        if n == 0 {
            return Err(Error::Invalid("dimension must be positive".into()));
        }
        let size = state_count(q, n).unwrap_or(u128::MAX);
        cap_check("state space q^n", size, cap)?;
        let place = (0..n).map(|i| (q as usize).pow((n - 1 - i) as u32)).collect();
        Ok(Space { q, n, size: size as usize, place })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Place value of coordinate `i`.
    #[inline]
    pub fn place(&self, i: usize) -> usize {
        self.place[i]
    }

    #[inline]
    pub fn digit(&self, rank: usize, i: usize) -> u32 {
        (rank / self.place[i] % self.q as usize) as u32
    }

    pub fn decode(&self, rank: usize) -> Vec<u32> {
        (0..self.n).map(|i| self.digit(rank, i)).collect()
    }

    pub fn decode_into(&self, mut rank: usize, out: &mut [u32]) {
        for i in (0..self.n).rev() {
            out[i] = (rank % self.q as usize) as u32;
            rank /= self.q as usize;
        }
    }

    pub fn encode(&self, x: &[u32]) -> usize {
        x.iter().fold(0, |acc, &d| acc * self.q as usize + d as usize)
    }

    #[inline]
    pub fn hamming(&self, mut a: usize, mut b: usize) -> usize {
        let q = self.q as usize;
        let mut d = 0;
        for _ in 0..self.n {
            d += (a % q != b % q) as usize;
            a /= q;
            b /= q;
        }
        d
    }

    #[inline]
    pub fn weight(&self, a: usize) -> usize {
        self.hamming(a, 0)
    }
}

/// Additive structure on `[q]` used for `f(x) - x` and translates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Group {
    Cyclic,
    Field(Arc<Field>),
}

impl Group {
    #[inline]
    pub fn add(&self, q: u32, a: u32, b: u32) -> u32 {
        match self {
            Group::Cyclic => (a + b) % q,
            Group::Field(f) => f.add(a, b),
        }
    }

    #[inline]
    pub fn sub(&self, q: u32, a: u32, b: u32) -> u32 {
        match self {
            Group::Cyclic => (a + q - b) % q,
            Group::Field(f) => f.sub(a, b),
        }
    }

    pub fn add_ranks(&self, space: &Space, a: usize, b: usize) -> usize {
        self.combine(space, a, b, false)
    }

    pub fn sub_ranks(&self, space: &Space, a: usize, b: usize) -> usize {
        self.combine(space, a, b, true)
    }

    fn combine(&self, space: &Space, mut a: usize, mut b: usize, minus: bool) -> usize {
        let q = space.q as usize;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..space.n {
            let (da, db) = ((a % q) as u32, (b % q) as u32);
            let d = if minus { self.sub(space.q, da, db) } else { self.add(space.q, da, db) };
            out += d as usize * place;
            place *= q;
            a /= q;
            b /= q;
        }
        out
    }
}

/// `log_q(count)` kept as the exact count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogCount {
    pub count: u128,
    pub base: u32,
}

impl LogCount {
    pub fn new(count: u128, base: u32) -> LogCount {
        LogCount { count, base }
    }

    pub fn power(base: u32, exp: usize) -> Result<LogCount> {
        let count = state_count(base, exp).ok_or(Error::CapExceeded {
            what: "count q^k",
            size: u128::MAX,
            cap: u128::MAX,
        })?;
        Ok(LogCount { count, base })
    }

    /// Display value; `-inf` for a zero count.
    pub fn value(&self) -> f64 {
        if self.count == 0 {
            f64::NEG_INFINITY
        } else {
            (self.count as f64).ln() / (self.base as f64).ln()
        }
    }

    /// `Some(k)` when the count is exactly `base^k`.
    pub fn exact_exponent(&self) -> Option<usize> {
        let mut c = self.count;
        if c == 0 {
            return None;
        }
        let mut k = 0;
        while c % self.base as u128 == 0 {
            c /= self.base as u128;
            k += 1;
        }
        (c == 1).then_some(k)
    }
}

impl fmt::Display for LogCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "log_{}({}) = {:.6}", self.base, self.count, self.value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub g: LogCount,
    pub s: usize,
    pub i: usize,
}

/// A total map on `[q]^n`, stored as the rank of `f(x)` for every rank `x`.
#[derive(Clone, PartialEq, Eq)]
pub struct Fds {
    space: Space,
    group: Group,
    table: Vec<u32>,
}

impl fmt::Debug for Fds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fds(q={}, n={}, table={:?})", self.q(), self.n(), self.table)
    }
}

impl Fds {
    pub fn from_table(q: u32, n: usize, table: Vec<u32>) -> Result<Fds> {
        Fds::from_table_with(q, n, table, Group::Cyclic, MAX_TABLE_STATES)
    }

    pub fn from_table_with(q: u32, n: usize, table: Vec<u32>, group: Group, cap: u128) -> Result<Fds> {
        let space = Space::new(q, n, cap)?;
        if table.len() != space.size {
            return Err(Error::Invalid(format!("table has {} entries, expected {}", table.len(), space.size)));
        }
        if table.iter().any(|&t| t as usize >= space.size) {
            return Err(Error::Invalid("table entry out of range".into()));
        }
        if let Group::Field(f) = &group {
            if f.order() != q {
                return Err(Error::FieldMismatch);
            }
        }
        Ok(Fds { space, group, table })
    }

    /// Tabulates `f` given coordinatewise.
    pub fn from_fn(q: u32, n: usize, mut f: impl FnMut(&[u32]) -> Vec<u32>) -> Result<Fds> {
        let space = Space::new(q, n, MAX_TABLE_STATES)?;
        let mut x = vec![0; n];
        let mut table = Vec::with_capacity(space.size);
        for r in 0..space.size {
            space.decode_into(r, &mut x);
            let y = f(&x);
            if y.len() != n || y.iter().any(|&d| d >= q) {
                return Err(Error::Invalid(format!("bad image {y:?} of {x:?}")));
            }
            table.push(space.encode(&y) as u32);
        }
        Ok(Fds { space, group: Group::Cyclic, table })
    }

    pub fn identity(q: u32, n: usize) -> Result<Fds> {
        Fds::from_fn(q, n, |x| x.to_vec())
    }

    pub fn with_group(mut self, group: Group) -> Result<Fds> {
        if let Group::Field(f) = &group {
            if f.order() != self.q() {
                return Err(Error::FieldMismatch);
            }
        }
        self.group = group;
        Ok(self)
    }

    pub fn q(&self) -> u32 {
        self.space.q
    }

    pub fn n(&self) -> usize {
        self.space.n
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, rank: usize) -> usize {
        self.table[rank] as usize
    }

    pub fn apply_digits(&self, x: &[u32]) -> Vec<u32> {
        self.space.decode(self.apply(self.space.encode(x)))
    }

    /// Arc `(u, v)` iff `f_v` depends essentially on `x_u`.
    pub fn interaction_graph(&self) -> Digraph {
        let (n, q, sp) = (self.n(), self.q() as usize, &self.space);
        let mut arcs = Vec::new();
        for u in 0..n {
            let mut depends = vec![false; n];
            for x in (0..sp.size).filter(|&x| sp.digit(x, u) == 0) {
                let base = self.apply(x);
                for a in 1..q {
                    let other = self.apply(x + a * sp.place(u));
                    for (v, dep) in depends.iter_mut().enumerate() {
                        if !*dep && sp.digit(base, v) != sp.digit(other, v) {
                            *dep = true;
                        }
                    }
                }
            }
            arcs.extend(depends.iter().enumerate().filter(|&(v, &d)| d && v != u).map(|(v, _)| (u, v)));
        }
        Digraph::new(n, arcs).expect("arcs in range, loops filtered")
    }

    /// True when every local function `f_v` depends on `x_v` at most trivially
    /// and on nothing outside the in-neighbourhood of `v` in `d`.
    pub fn belongs_to(&self, d: &Digraph) -> bool {
        let g = self.interaction_graph();
        let self_dependent = (0..self.n()).any(|v| self.depends_on(v, v));
        !self_dependent && g.is_subgraph_of(d)
    }

    pub fn depends_on(&self, u: usize, v: usize) -> bool {
        let sp = &self.space;
        (0..sp.size).filter(|&x| sp.digit(x, u) == 0).any(|x| {
            let base = sp.digit(self.apply(x), v);
            (1..sp.q as usize).any(|a| sp.digit(self.apply(x + a * sp.place(u)), v) != base)
        })
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.space.size).filter(|&x| self.apply(x) == x).collect()
    }

    /// Fixed-point count, stability and instability in one pass.
    pub fn metrics(&self) -> Metrics {
        let n = self.n();
        let (mut fix, mut min_d, mut max_d) = (0u128, n, 0);
        for x in 0..self.space.size {
            let d = self.space.hamming(x, self.apply(x));
            fix += (d == 0) as u128;
            min_d = min_d.min(d);
            max_d = max_d.max(d);
        }
        Metrics { g: LogCount::new(fix, self.q()), s: n - max_d, i: min_d }
    }

    /// Rank of `f(x) - x`.
    #[inline]
    pub fn difference(&self, x: usize) -> usize {
        self.group.sub_ranks(&self.space, self.apply(x), x)
    }

    /// `C_f = { f(x) - x }`.
    pub fn guessing_code(&self) -> Code {
        let mut words = BitSet::new(self.space.size);
        for x in 0..self.space.size {
            words.insert(self.difference(x));
        }
        Code::from_bitset(self.q(), self.n(), &words).expect("C_f is never empty")
    }

    pub fn guessing_dimension(&self) -> LogCount {
        LogCount::new(self.guessing_code().len() as u128, self.q())
    }

    /// Minimum number of translates `fix(f) - a` covering `[q]^n`.
    pub fn coset_dimension(&self) -> Result<LogCount> {
        self.coset_dimension_with(MAX_COVER_STATES, crate::ugraph::DEFAULT_NODE_CAP)
    }

    pub fn coset_dimension_with(&self, cap: u128, node_cap: u64) -> Result<LogCount> {
        let fix = self.fixed_points();
        if fix.is_empty() {
            return Err(Error::Infeasible);
        }
        cap_check("translate cover states", self.space.size as u128, cap)?;
        let cover = min_translate_cover(&self.space, &self.group, &fix, true, node_cap)?;
        Ok(LogCount::new(cover.len() as u128, self.q()))
    }
}

/// Smallest set `S` with `union_{a in S} (set - a) = [q]^n`, exact by branch
/// and bound or greedy. `set` must be nonempty.
pub fn min_translate_cover(space: &Space, group: &Group, set: &[usize], exact: bool, node_cap: u64) -> Result<Vec<usize>> {
    assert!(!set.is_empty(), "translate cover of an empty set");
    let size = space.size;
    let translate = |a: usize| {
        let mut b = BitSet::new(size);
        for &p in set {
            b.insert(group.sub_ranks(space, p, a));
        }
        b
    };
    let greedy = {
        let mut covered = translate(0);
        let mut chosen = vec![0];
        while let Some(z) = first_missing(&covered, size) {
            // candidates covering z are a = p - z
            let a = set
                .iter()
                .map(|&p| group.sub_ranks(space, p, z))
                .max_by_key(|&a| {
                    let t = translate(a);
                    (t.count() - t.intersection_count(&covered), std::cmp::Reverse(a))
                })
                .unwrap();
            covered.union_with(&translate(a));
            chosen.push(a);
        }
        chosen
    };
    if !exact || greedy.len() <= size.div_ceil(set.len()) {
        return Ok(greedy);
    }
    let mut search = CoverSearch {
        space,
        group,
        set,
        size,
        best: greedy,
        chosen: vec![0],
        nodes: 0,
        cap: node_cap,
        cache: std::collections::HashMap::new(),
    };
    let start = search.translate(0);
    search.run(start)?;
    let mut best = search.best;
    best.sort_unstable();
    Ok(best)
}

fn first_missing(b: &BitSet, size: usize) -> Option<usize> {
    (0..size).find(|&i| !b.contains(i))
}

struct CoverSearch<'a> {
    space: &'a Space,
    group: &'a Group,
    set: &'a [usize],
    size: usize,
    best: Vec<usize>,
    chosen: Vec<usize>,
    nodes: u64,
    cap: u64,
    cache: std::collections::HashMap<usize, BitSet>,
}

impl CoverSearch<'_> {
    fn translate(&mut self, a: usize) -> BitSet {
        if let Some(t) = self.cache.get(&a) {
            return t.clone();
        }
        let mut b = BitSet::new(self.size);
        for &p in self.set {
            b.insert(self.group.sub_ranks(self.space, p, a));
        }
        self.cache.insert(a, b.clone());
        b
    }

    fn run(&mut self, covered: BitSet) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.cap {
            return Err(Error::CapExceeded { what: "translate cover nodes", size: self.nodes as u128, cap: self.cap as u128 });
        }
        let missing = self.size - covered.count();
        if missing == 0 {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return Ok(());
        }
        if self.chosen.len() + missing.div_ceil(self.set.len()) >= self.best.len() {
            return Ok(());
        }
        let z = first_missing(&covered, self.size).unwrap();
        let mut options: Vec<(usize, usize, BitSet)> = Vec::new();
        for i in 0..self.set.len() {
            let a = self.group.sub_ranks(self.space, self.set[i], z);
            let t = self.translate(a);
            if options.iter().any(|(_, _, o)| *o == t) {
                continue;
            }
            let gain = t.count() - t.intersection_count(&covered);
            options.push((gain, a, t));
        }
        options.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
        for (_, a, t) in options {
            let mut next = covered.clone();
            next.union_with(&t);
            self.chosen.push(a);
            self.run(next)?;
            self.chosen.pop();
        }
        Ok(())
    }
}

/// `f(x) = xM + y` over GF(q); `M` has a zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineFds {
    field: Arc<Field>,
    matrix: Matrix,
    offset: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AffineMetrics {
    pub g: LogCount,
    pub s: usize,
    pub i: usize,
    pub l: LogCount,
}

impl AffineFds {
    pub fn new(field: Arc<Field>, matrix: Matrix, offset: Vec<u32>) -> Result<AffineFds> {
        let n = matrix.rows;
        if matrix.cols != n || offset.len() != n || n == 0 {
            return Err(Error::Invalid("affine map needs an n x n matrix and a length-n offset".into()));
        }
        let q = field.order();
        if matrix.data.iter().chain(&offset).any(|&v| v >= q) {
            return Err(Error::FieldMismatch);
        }
        if let Some(v) = (0..n).find(|&v| matrix.get(v, v) != 0) {
            return Err(Error::Invalid(format!("diagonal entry M[{v}][{v}] must be zero")));
        }
        Ok(AffineFds { field, matrix, offset })
    }

    /// Same as `new`, additionally requiring the support of `M` inside `d`.
    pub fn supported_on(field: Arc<Field>, matrix: Matrix, offset: Vec<u32>, d: &Digraph) -> Result<AffineFds> {
        let f = AffineFds::new(field, matrix, offset)?;
        if !f.support().is_subgraph_of(d) {
            return Err(Error::Invalid("matrix support is not contained in the digraph".into()));
        }
        Ok(f)
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn offset(&self) -> &[u32] {
        &self.offset
    }

    pub fn n(&self) -> usize {
        self.matrix.rows
    }

    pub fn q(&self) -> u32 {
        self.field.order()
    }

    /// Off-diagonal support of `M`: arc `(u, v)` iff `M[u][v] != 0`.
    pub fn support(&self) -> Digraph {
        let n = self.n();
        Digraph::new(n, (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|&(u, v)| u != v && self.matrix.get(u, v) != 0))
            .expect("zero diagonal")
    }

    pub fn with_offset(&self, offset: Vec<u32>) -> Result<AffineFds> {
        AffineFds::new(self.field.clone(), self.matrix.clone(), offset)
    }

    pub fn apply(&self, x: &[u32]) -> Vec<u32> {
        let mut out = self.matrix.left_mul(&self.field, x);
        for (o, &y) in out.iter_mut().zip(&self.offset) {
            *o = self.field.add(*o, y);
        }
        out
    }

    pub fn tabulate(&self) -> Result<Fds> {
        self.tabulate_with(MAX_TABLE_STATES)
    }

    pub fn tabulate_with(&self, cap: u128) -> Result<Fds> {
        let space = Space::new(self.q(), self.n(), cap)?;
        let mut x = vec![0; self.n()];
        let table = (0..space.size)
            .map(|r| {
                space.decode_into(r, &mut x);
                space.encode(&self.apply(&x)) as u32
            })
            .collect();
        Ok(Fds { space, group: Group::Field(self.field.clone()), table })
    }

    /// The linear code spanned by the rows of `M - I`.
    pub fn difference_code(&self) -> LinearCode {
        LinearCode::from_generator(self.field.clone(), &self.matrix.minus_identity(&self.field))
    }

    /// Metrics from the coset `y + rowspace(M - I)` without tabulating.
    pub fn structural_metrics(&self) -> Result<AffineMetrics> {
        let code = self.difference_code();
        let (n, q) = (self.n(), self.q());
        let k = code.dimension();
        let i = code.coset_min_weight(&self.offset)?;
        let s = n - code.coset_max_weight(&self.offset)?;
        let neg: Vec<u32> = self.offset.iter().map(|&y| self.field.neg(y)).collect();
        let g = if code.contains(&neg) { LogCount::power(q, n - k)? } else { LogCount::new(0, q) };
        Ok(AffineMetrics { g, s, i, l: LogCount::power(q, k)? })
    }

    /// Metrics by scanning the full table.
    pub fn tabulated_metrics(&self) -> Result<AffineMetrics> {
        let f = self.tabulate()?;
        let m = f.metrics();
        Ok(AffineMetrics { g: m.g, s: m.s, i: m.i, l: f.guessing_dimension() })
    }
}

/// On-disk FDS representation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FdsFile {
    Table(TableFile),
    Affine(AffineFile),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableFile {
    pub q: u32,
    pub n: usize,
    pub table: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineFile {
    pub q: u32,
    pub n: usize,
    /// Row-major `n * n` entries.
    pub matrix: Vec<u32>,
    pub offset: Vec<u32>,
    pub field: u32,
}

impl From<&Fds> for FdsFile {
    fn from(f: &Fds) -> Self {
        FdsFile::Table(TableFile { q: f.q(), n: f.n(), table: f.table.clone() })
    }
}

impl From<&AffineFds> for FdsFile {
    fn from(f: &AffineFds) -> Self {
        FdsFile::Affine(AffineFile {
            q: f.q(),
            n: f.n(),
            matrix: f.matrix.data.clone(),
            offset: f.offset.clone(),
            field: f.q(),
        })
    }
}

pub enum LoadedFds {
    Table(Fds),
    Affine(AffineFds),
}

impl FdsFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<FdsFile> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
    }

    pub fn load(&self) -> Result<LoadedFds> {
        match self {
            FdsFile::Table(t) => Ok(LoadedFds::Table(Fds::from_table(t.q, t.n, t.table.clone())?)),
            FdsFile::Affine(a) => {
                if a.field != a.q {
                    return Err(Error::FieldMismatch);
                }
                if a.matrix.len() != a.n * a.n {
                    return Err(Error::Invalid("matrix must have n * n entries".into()));
                }
                let field = Arc::new(Field::new(a.field as u64)?);
                let m = Matrix { rows: a.n, cols: a.n, data: a.matrix.clone() };
                Ok(LoadedFds::Affine(AffineFds::new(field, m, a.offset.clone())?))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct;
    use rand::{Rng, SeedableRng};

    fn negation(q: u32, n: usize) -> Fds {
        Fds::from_fn(q, n, |x| x.iter().map(|&d| (d + 1) % q).collect()).unwrap()
    }

    #[test]
    fn space_ranking_is_lexicographic() {
        let s = Space::new(3, 2, MAX_TABLE_STATES).unwrap();
        assert_eq!(s.encode(&[1, 2]), 5);
        assert_eq!(s.decode(5), vec![1, 2]);
        assert_eq!(s.hamming(s.encode(&[1, 2]), s.encode(&[1, 0])), 1);
        assert!(matches!(Space::new(2, 21, MAX_TABLE_STATES), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(Fds::identity(2, 2).unwrap().fixed_points().len(), 4);
        assert!(negation(2, 1).fixed_points().is_empty());
        assert_eq!(construct::clique_guessing(3, 2).unwrap().fixed_points().len(), 4);
    }

    #[test]
    fn interaction_graph_examples() {
        let c = Fds::from_fn(3, 3, |_| vec![1, 2, 0]).unwrap();
        assert_eq!(c.interaction_graph().arc_count(), 0);
        assert_eq!(Fds::identity(3, 3).unwrap().interaction_graph().arc_count(), 0);
        assert_eq!(construct::clique_guessing(3, 2).unwrap().interaction_graph(), Digraph::complete(3));
        assert!(!Fds::identity(2, 2).unwrap().belongs_to(&Digraph::complete(2)));
    }

    #[test]
    fn metrics_examples() {
        for (q, n) in [(2, 3), (3, 2), (4, 2)] {
            let m = Fds::identity(q, n).unwrap().metrics();
            assert_eq!((m.g.count, m.s, m.i), (state_count(q, n).unwrap(), n, 0));
        }
        let m = construct::negation_cycle(3, 2).unwrap().metrics();
        assert_eq!((m.i, m.g.count), (1, 0));
        assert_eq!(construct::winkler_clique(3).unwrap().metrics().s, 1);
    }

    #[test]
    fn guessing_code_examples() {
        let id = Fds::identity(3, 2).unwrap();
        assert_eq!(id.guessing_code().words(), &[0]);
        assert_eq!(id.guessing_dimension().count, 1);
        let c = Fds::from_fn(2, 3, |_| vec![1, 0, 1]).unwrap();
        assert_eq!(c.guessing_dimension().count, 8);
    }

    #[test]
    fn coset_dimension_examples() {
        assert_eq!(Fds::identity(2, 3).unwrap().coset_dimension().unwrap().count, 1);
        // fix(f) = {0}
        let only_zero = Fds::from_fn(2, 3, |x| if x.iter().all(|&d| d == 0) { x.to_vec() } else { vec![0, 0, 0] }).unwrap();
        assert_eq!(only_zero.fixed_points(), vec![0]);
        assert_eq!(only_zero.coset_dimension().unwrap().count, 8);
        assert_eq!(construct::clique_guessing(3, 2).unwrap().coset_dimension().unwrap().count, 2);
        assert_eq!(negation(2, 2).coset_dimension(), Err(Error::Infeasible));
    }

    /// Minimum translate cover by trying every subset of translates.
    fn brute_cover(f: &Fds) -> usize {
        let sp = f.space();
        let fix = f.fixed_points();
        let translates: Vec<u64> = (0..sp.size())
            .map(|a| fix.iter().fold(0u64, |m, &p| m | 1 << f.group().sub_ranks(sp, p, a)))
            .collect();
        let full = (1u64 << sp.size()) - 1;
        (1..=sp.size())
            .find(|&k| subsets_cover(&translates, k, 0, 0, full))
            .unwrap()
    }

    fn subsets_cover(t: &[u64], k: usize, start: usize, acc: u64, full: u64) -> bool {
        if acc == full {
            return true;
        }
        if k == 0 {
            return false;
        }
        (start..t.len()).any(|i| subsets_cover(t, k - 1, i + 1, acc | t[i], full))
    }

    #[test]
    fn coset_dimension_matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 40 {
            let (q, n) = if rng.gen_bool(0.5) { (2u32, 3usize) } else { (3, 2) };
            let size = state_count(q, n).unwrap() as usize;
            // bias towards many fixed points
            let table: Vec<u32> = (0..size as u32).map(|x| if rng.gen_bool(0.4) { x } else { rng.gen_range(0..size as u32) }).collect();
            let f = Fds::from_table(q, n, table).unwrap();
            if f.fixed_points().is_empty() {
                continue;
            }
            let c = f.coset_dimension().unwrap().count as usize;
            assert_eq!(c, brute_cover(&f), "{f:?}");
            assert!(c * f.fixed_points().len() >= size);
            checked += 1;
        }
    }

    #[test]
    fn linear_guessing_code_size_is_q_to_rank() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for q in [2u64, 3] {
            let field = Arc::new(Field::new(q).unwrap());
            for _ in 0..30 {
                let mut m = Matrix::zeros(3, 3);
                for r in 0..3 {
                    for c in 0..3 {
                        if r != c {
                            m.set(r, c, rng.gen_range(0..q as u32));
                        }
                    }
                }
                let rank = m.minus_identity(&field).rank(&field);
                let f = AffineFds::new(field.clone(), m, vec![0; 3]).unwrap().tabulate().unwrap();
                assert_eq!(f.guessing_dimension().count, (q as u128).pow(rank as u32));
                assert_eq!(f.metrics().g.count, (q as u128).pow(3 - rank as u32));
            }
        }
    }

    #[test]
    fn affine_examples() {
        let f2 = Arc::new(Field::new(2).unwrap());
        // M = 0 is constant: C_f is everything and only y is fixed
        let constant = AffineFds::new(f2.clone(), Matrix::zeros(3, 3), vec![0; 3]).unwrap();
        let m = constant.structural_metrics().unwrap();
        assert_eq!((m.g.count, m.s, m.i, m.l.count), (1, 0, 0, 8));
        let shifted = AffineFds::new(f2.clone(), Matrix::zeros(3, 3), vec![1, 0, 1]).unwrap();
        assert_eq!(shifted.structural_metrics().unwrap().i, 0);
        assert!(AffineFds::new(f2.clone(), Matrix::identity(3), vec![0; 3]).is_err());
        let fam = construct::simplex_affine(3).unwrap();
        let unstable = fam.with_offset(construct::deepest_offset(&fam).unwrap()).unwrap();
        assert_eq!(unstable.structural_metrics().unwrap().i, 3);
        assert_eq!(unstable.tabulated_metrics().unwrap().i, 3);
    }

    #[test]
    fn random_affine_structural_matches_tabulated() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..60 {
            let q = [2u64, 3, 4][rng.gen_range(0..3)];
            let n = rng.gen_range(1..=4);
            let field = Arc::new(Field::new(q).unwrap());
            let mut m = Matrix::zeros(n, n);
            for r in 0..n {
                for c in 0..n {
                    if r != c && rng.gen_bool(0.6) {
                        m.set(r, c, rng.gen_range(0..q as u32));
                    }
                }
            }
            let y = (0..n).map(|_| rng.gen_range(0..q as u32)).collect();
            let f = AffineFds::new(field, m, y).unwrap();
            assert_eq!(f.structural_metrics().unwrap(), f.tabulated_metrics().unwrap());
            assert_eq!(f.tabulate().unwrap().interaction_graph(), f.support());
        }
    }

    #[test]
    fn identity_instability_plus_stability() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let size = 27;
            let table = (0..size).map(|_| rng.gen_range(0..size as u32)).collect();
            let f = Fds::from_table(3, 3, table).unwrap();
            let m = f.metrics();
            assert!(m.i + m.s <= 3);
            assert_eq!(m.g.count as usize, f.fixed_points().len());
            assert_eq!(f.guessing_dimension().count as usize, f.guessing_code().len());
        }
    }

    #[test]
    fn fds_file_round_trip() {
        let f = construct::winkler_clique(3).unwrap();
        let text = FdsFile::from(&f).to_json();
        match FdsFile::from_json(&text).unwrap().load().unwrap() {
            LoadedFds::Table(g) => assert_eq!(g, f),
            LoadedFds::Affine(_) => panic!("expected a table"),
        }
        let a = construct::simplex_affine(3).unwrap();
        let text = FdsFile::from(&a).to_json();
        assert!(text.contains("\"matrix\""));
        match FdsFile::from_json(&text).unwrap().load().unwrap() {
            LoadedFds::Affine(b) => assert_eq!(b, a),
            LoadedFds::Table(_) => panic!("expected affine"),
        }
        assert!(FdsFile::from_json(r#"{"q":2,"n":1,"table":[1,0],"extra":1}"#).is_err());
        assert!(FdsFile::from_json(r#"{"q":2,"n":1,"table":[1,0]}"#).is_ok());
    }
}
