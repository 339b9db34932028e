//! Verification batteries: exhaustive small cases, construction fixtures,
//! the bound battery and the solvability equivalences.

use std::sync::Arc;

use crate::coding::{check_bounds, BoundReport, InstanceQuantities};
use crate::construct;
use crate::digraph::Digraph;
use crate::error::Result;
use crate::fds::{state_count, Fds};
use crate::ffield::Field;
use crate::guessgraph::{GuessingGraph, MAX_GRAPH_STATES};
use crate::optimize::{self, ExtremalResult, SearchBudget};
use crate::report::Check;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    SmallExhaustive,
    Constructions,
    Bounds,
    Equivalences,
    /// Contains one deliberately wrong expectation; exercises the failure path.
    FabricatedFailure,
}

impl Suite {
    pub const PUBLIC: [Suite; 4] = [Suite::SmallExhaustive, Suite::Constructions, Suite::Bounds, Suite::Equivalences];

    pub fn name(self) -> &'static str {
        match self {
            Suite::SmallExhaustive => "small-exhaustive",
            Suite::Constructions => "constructions",
            Suite::Bounds => "bounds",
            Suite::Equivalences => "equivalences",
            Suite::FabricatedFailure => "fabricated-failure",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        [Suite::SmallExhaustive, Suite::Constructions, Suite::Bounds, Suite::Equivalences, Suite::FabricatedFailure]
            .into_iter()
            .find(|x| x.name() == s)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub bounds: Vec<BoundReport>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds) && self.bounds.iter().all(|b| b.holds)
    }

    pub fn first_failure(&self) -> Option<Check> {
        self.checks.iter().find(|c| !c.holds).cloned().or_else(|| self.bounds.iter().find(|b| !b.holds).map(Check::from))
    }

    fn check(&mut self, suite: Suite, name: &str, instance: &str, expected: impl ToString, actual: impl ToString, holds: bool) {
        self.checks.push(Check {
            suite: suite.name().into(),
            name: name.into(),
            instance: instance.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
            holds,
        });
    }

    fn equal<T: PartialEq + ToString>(&mut self, suite: Suite, name: &str, instance: &str, expected: T, actual: T) {
        let holds = expected == actual;
        self.check(suite, name, instance, expected, actual, holds);
    }
}

pub fn run(suite: Suite) -> Result<Outcome> {
    match suite {
        Suite::SmallExhaustive => small_exhaustive(),
        Suite::Constructions => constructions(),
        Suite::Bounds => bounds(),
        Suite::Equivalences => equivalences(),
        Suite::FabricatedFailure => fabricated(),
    }
}

fn exact_value(r: ExtremalResult) -> Option<u128> {
    r.certified.is_exact().then(|| r.value.raw())
}

/// Skips quantities whose search exceeds a cap; other errors propagate.
fn capped<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) if e.is_cap() => Ok(None),
        Err(e) => Err(e),
    }
}

/// Every quantity of `(D, q)` that can be certified exactly at desk scale.
pub fn certified_quantities(d: &Digraph, label: &str, q: u32) -> Result<InstanceQuantities> {
    let budget = SearchBudget::default();
    let mut inst = InstanceQuantities { instance: format!("{label} q={q}"), q, n: d.n(), ..Default::default() };
    inst.tau = capped(d.feedback_vertex_number())?.map(|t| t.0);
    inst.nu = capped(d.cycle_packing())?.map(|p| p.0);
    if state_count(q, d.n()).is_some_and(|s| s <= MAX_GRAPH_STATES) {
        let g = GuessingGraph::build(d, q)?;
        inst.alpha = Some(g.independence_number()?.alpha);
        inst.chi = Some(g.chromatic_number()?.chi);
    }
    inst.instability = capped(optimize::instability(d, q, &budget))?.and_then(exact_value).map(|v| v as usize);
    inst.stability = capped(optimize::stability(d, q, &budget))?.and_then(exact_value).map(|v| v as usize);
    inst.l_count = capped(optimize::guessing_dimension_of_graph(d, q, &budget))?.and_then(exact_value);
    inst.c_count = capped(optimize::coset_dimension_of_graph(d, q, &budget))?.and_then(exact_value);
    Ok(inst)
}

/// All 64 loopless digraphs on three labelled vertices.
pub fn three_vertex_digraphs() -> Vec<Digraph> {
    let pairs: Vec<(usize, usize)> = (0..3).flat_map(|u| (0..3).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    (0..1u32 << pairs.len())
        .map(|mask| Digraph::new(3, pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &p)| p)).unwrap())
        .collect()
}

fn arc_label(d: &Digraph) -> String {
    let arcs: Vec<String> = d.arcs().map(|(u, v)| format!("{u}>{v}")).collect();
    format!("n=3 [{}]", arcs.join(","))
}

fn small_exhaustive() -> Result<Outcome> {
    let suite = Suite::SmallExhaustive;
    let mut out = Outcome::default();
    let ex = SearchBudget::exhaustive();
    for d in three_vertex_digraphs() {
        let label = arc_label(&d);
        let i = optimize::instability(&d, 2, &ex)?.value.raw();
        let s = optimize::stability(&d, 2, &ex)?.value.raw();
        out.equal(suite, "i = s at q = 2", &label, i, s);
        let mut inst = certified_quantities(&d, &label, 2)?;
        inst.instability = Some(i as usize);
        inst.stability = Some(s as usize);
        out.bounds.extend(check_bounds(&inst)?);
    }
    Ok(out)
}

fn family(spec: &str) -> Result<Digraph> {
    Digraph::family(spec)
}

fn constructions() -> Result<Outcome> {
    let suite = Suite::Constructions;
    let mut out = Outcome::default();
    for (n, q) in [(3, 2), (4, 2), (3, 3), (5, 2)] {
        let f = construct::clique_guessing(n, q)?;
        let label = format!("K:{n} q={q}");
        out.equal(suite, "clique_guessing fixed points", &label, (q as usize).pow(n as u32 - 1), f.fixed_points().len());
        out.equal(suite, "clique_guessing on K:n", &label, true, f.belongs_to(&Digraph::complete(n)));
    }
    for q in 2..=4 {
        let f = construct::winkler_clique(q)?;
        out.equal(suite, "winkler_clique stability", &format!("K:{q} q={q}"), 1, f.metrics().s);
    }
    for (n, q) in [(4, 2), (5, 2), (6, 3), (7, 3)] {
        let f = construct::clique_packing_stability(n, q as u32)?;
        out.equal(suite, "clique_packing_stability", &format!("K:{n} q={q}"), n / q, f.metrics().s);
    }
    for n in 2..=5 {
        for q in [2, 3] {
            let f = construct::negation_cycle(n, q)?;
            out.equal(suite, "negation_cycle instability", &format!("Cdir:{n} q={q}"), 1, f.metrics().i);
        }
    }
    for spec in ["K:4", "Cund:5", "Cdir:4", "power:Cdir:2^2"] {
        let d = family(spec)?;
        let (nu, f) = construct::cycle_packing_instability(&d, 2)?;
        let i = f.metrics().i;
        out.check(suite, "cycle packing i >= nu", &format!("{spec} q=2"), format!(">= {nu}"), i, i >= nu && f.belongs_to(&d));
    }
    for spec in ["Cund:5", "Cund:4", "Cdir:3", "Kbip:1,2"] {
        let d = family(spec)?;
        let tau = d.feedback_vertex_number()?.0;
        let (q, f) = construct::chordless_cover_instability(&d)?;
        let label = format!("{spec} q={q}");
        out.equal(suite, "chordless cover i = tau", &label, tau, f.metrics().i);
        out.equal(suite, "chordless cover q = 2^chi'", &label, 1u32 << d.cycle_chromatic_index()?, q);
    }
    for spec in ["Cund:4", "Cund:5", "Cund:3"] {
        let d = family(spec)?;
        let tau = d.feedback_vertex_number()?.0;
        let (q, f) = construct::undirected_degree_instability(&d)?;
        out.equal(suite, "undirected degree i = tau", &format!("{spec} q={q}"), tau, f.metrics().i);
    }
    for r in 2..=4u32 {
        let f = construct::simplex_affine(r)?;
        let label = format!("simplex:{r} q=2");
        let s = f.with_offset(construct::stablest_offset(&f)?)?.structural_metrics()?.s;
        out.equal(suite, "simplex s_lin = 2^(r-1) - 1", &label, (1usize << (r - 1)) - 1, s);
        let deep = f.with_offset(construct::deepest_offset(&f)?)?;
        let cr = f.difference_code().covering_radius()?;
        out.equal(suite, "simplex deep-hole offset i = cr", &label, cr, deep.structural_metrics()?.i);
        if r == 3 {
            out.equal(suite, "simplex deep-hole i", &label, 3, deep.tabulate()?.metrics().i);
        }
    }
    let field = Arc::new(Field::new(2)?);
    for spec in ["Cdir:4", "Cund:5", "K:4"] {
        let d = family(spec)?;
        let nu = d.cycle_packing()?.0;
        let i = construct::affine_cycle_packing(&d, field.clone())?.structural_metrics()?.i;
        out.check(suite, "affine cycle packing i >= nu", &format!("{spec} q=2"), format!(">= {nu}"), i, i >= nu);
    }
    Ok(out)
}

const BOUND_INSTANCES: [(&str, u32); 11] = [
    ("K:2", 2),
    ("K:2", 3),
    ("K:3", 2),
    ("Cdir:3", 2),
    ("Cdir:3", 3),
    ("Cdir:4", 2),
    ("Cund:4", 2),
    ("Cund:5", 2),
    ("Kbip:1,2", 2),
    ("Kbip:2,2", 2),
    ("K:4", 2),
];

fn bounds() -> Result<Outcome> {
    let mut out = Outcome::default();
    for (spec, q) in BOUND_INSTANCES {
        let d = family(spec)?;
        out.bounds.extend(check_bounds(&certified_quantities(&d, spec, q)?)?);
    }
    let path = Digraph::new(3, [(0, 1), (1, 2)])?;
    out.bounds.extend(check_bounds(&certified_quantities(&path, "path:3", 2)?)?);
    Ok(out)
}

fn equivalences() -> Result<Outcome> {
    let suite = Suite::Equivalences;
    let mut out = Outcome::default();
    for spec in ["K:2", "K:3", "Cdir:3", "Cdir:4"] {
        for q in [2u32, 3] {
            let d = family(spec)?;
            let label = format!("{spec} q={q}");
            let n = d.n();
            let tau = d.feedback_vertex_number()?.0;
            let g = GuessingGraph::build(&d, q)?;
            let alpha = g.independence_number()?.alpha;
            let chi = g.chromatic_number()?.chi;
            let c = optimize::coset_dimension_of_graph(&d, q, &SearchBudget::default())?;
            let target = (q as u128).pow((n - tau) as u32);
            out.check(suite, "c certified", &label, "exact", format!("{:?}", c.certified), c.certified.is_exact());
            let solvable = alpha == (q as u128).pow(tau as u32);
            let chi_eq = chi == target;
            let c_eq = c.value.raw() == target;
            out.check(
                suite,
                "(g = tau) <=> (chi = q^(n-tau)) <=> (c = q^(n-tau))",
                &label,
                "all equal",
                format!("{solvable} {chi_eq} {c_eq}"),
                solvable == chi_eq && chi_eq == c_eq,
            );
        }
    }
    Ok(out)
}

fn fabricated() -> Result<Outcome> {
    let suite = Suite::FabricatedFailure;
    let mut out = Outcome::default();
    let f: Fds = construct::clique_guessing(3, 2)?;
    out.equal(suite, "clique_guessing fixed points", "K:3 q=2", 4, f.fixed_points().len());
    // deliberately wrong: i(K:3, 2) is 1
    let i = optimize::instability(&Digraph::complete(3), 2, &SearchBudget::exhaustive())?.value.raw();
    out.equal(suite, "instability", "K:3 q=2", 2, i);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_vertex_enumeration() {
        let all = three_vertex_digraphs();
        assert_eq!(all.len(), 64);
        assert_eq!(all.iter().filter(|d| d.arc_count() == 6).count(), 1);
    }

    #[test]
    fn fabricated_suite_fails() {
        let out = run(Suite::FabricatedFailure).unwrap();
        assert!(!out.passed());
        assert_eq!(out.first_failure().unwrap().name, "instability");
    }

    #[test]
    fn suites_parse() {
        for s in Suite::PUBLIC {
            assert_eq!(Suite::parse(s.name()), Some(s));
        }
        assert_eq!(Suite::parse("fabricated-failure"), Some(Suite::FabricatedFailure));
    }
}
