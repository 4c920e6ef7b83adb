//! Bi-Heyting operators on subgraph lattices and on aspect predicates.
//!
//! For subgraphs of a directed multigraph, `¬Y` is the largest subgraph
//! disjoint from `Y` and `∼Y` the smallest subgraph whose union with `Y` is
//! the whole graph. The modalities are `◇ = ∼¬` and `□ = ¬∼`.
//!
//! Aspect posets use the convention `A′ ≤ A` for an arrow `A′ → A`
//! (`A′` a subaspect of `A`); predicates are downward closed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::FinitePoset;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub src: String,
    pub dst: String,
}

/// A directed multigraph; loops and parallel edges are allowed. Vertices are
/// sorted by label and edges by id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedMultigraph {
    vertices: Vec<String>,
    edges: Vec<(String, usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgraph {
    vertices: FixedBitSet,
    edges: FixedBitSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Modality {
    Diamond,
    Box,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reach {
    ForwardReach,
    WeakComponents,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Negation {
    Heyting,
    Coheyting,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModalTrace {
    /// `x, ◇₁x, ◇₂x, …` up to and including the fixpoint.
    pub trace: Vec<Subgraph>,
    pub stabilized: Subgraph,
    /// Number of applications that changed the subgraph.
    pub steps: usize,
}

impl DirectedMultigraph {
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S, S)]) -> Result<Self> {
        let vs: BTreeSet<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        if vs.len() != vertices.len() {
            return Err(Error::InvalidGraph("duplicate vertex".into()));
        }
        let vertices: Vec<String> = vs.into_iter().collect();
        let mut list = Vec::new();
        let mut ids = BTreeSet::new();
        for (id, src, dst) in edges {
            let id = id.as_ref().to_string();
            if !ids.insert(id.clone()) {
                return Err(Error::InvalidGraph(format!("duplicate edge id {id:?}")));
            }
            let find = |v: &str| {
                vertices
                    .binary_search_by(|w| w.as_str().cmp(v))
                    .map_err(|_| Error::InvalidGraph(format!("edge {id:?} has unknown endpoint {v:?}")))
            };
            list.push((id.clone(), find(src.as_ref())?, find(dst.as_ref())?));
        }
        list.sort();
        Ok(DirectedMultigraph { vertices, edges: list })
    }

    pub fn from_edges(vertices: &[String], edges: &[Edge]) -> Result<Self> {
        let triples: Vec<(String, String, String)> =
            edges.iter().map(|e| (e.id.clone(), e.src.clone(), e.dst.clone())).collect();
        Self::new(vertices, &triples)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edge_list(&self) -> Vec<Edge> {
        self.edges
            .iter()
            .map(|(id, s, d)| Edge {
                id: id.clone(),
                src: self.vertices[*s].clone(),
                dst: self.vertices[*d].clone(),
            })
            .collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        (self.edges[e].1, self.edges[e].2)
    }

    pub fn empty(&self) -> Subgraph {
        Subgraph {
            vertices: FixedBitSet::with_capacity(self.vertices.len()),
            edges: FixedBitSet::with_capacity(self.edges.len()),
        }
    }

    pub fn full(&self) -> Subgraph {
        let mut s = self.empty();
        s.vertices.insert_range(..);
        s.edges.insert_range(..);
        s
    }

    /// Builds a subgraph from labels, rejecting edges without their endpoints.
    pub fn subgraph<S: AsRef<str>>(&self, vertices: &[S], edges: &[S]) -> Result<Subgraph> {
        let mut s = self.empty();
        for v in vertices {
            let i = self
                .vertices
                .binary_search_by(|w| w.as_str().cmp(v.as_ref()))
                .map_err(|_| Error::InvalidSubgraph(format!("unknown vertex {:?}", v.as_ref())))?;
            s.vertices.insert(i);
        }
        for e in edges {
            let i = self
                .edges
                .binary_search_by(|(id, _, _)| id.as_str().cmp(e.as_ref()))
                .map_err(|_| Error::InvalidSubgraph(format!("unknown edge {:?}", e.as_ref())))?;
            s.edges.insert(i);
        }
        self.validate(&s)?;
        Ok(s)
    }

    pub fn validate(&self, s: &Subgraph) -> Result<()> {
        if s.vertices.len() != self.vertices.len() || s.edges.len() != self.edges.len() {
            return Err(Error::InvalidSubgraph("subgraph belongs to a different graph".into()));
        }
        for e in s.edges.ones() {
            let (a, b) = self.endpoints(e);
            if !s.vertices.contains(a) || !s.vertices.contains(b) {
                return Err(Error::InvalidSubgraph(format!(
                    "edge {:?} included without both endpoints",
                    self.edges[e].0
                )));
            }
        }
        Ok(())
    }

    pub fn vertex_labels(&self, s: &Subgraph) -> Vec<String> {
        s.vertices.ones().map(|i| self.vertices[i].clone()).collect()
    }

    pub fn edge_labels(&self, s: &Subgraph) -> Vec<String> {
        s.edges.ones().map(|i| self.edges[i].0.clone()).collect()
    }

    /// Every subgraph, in no particular order. Guarded to 20 vertices+edges.
    pub fn all_subgraphs(&self) -> Result<Vec<Subgraph>> {
        let size = self.vertices.len() + self.edges.len();
        if size > 20 {
            return Err(Error::TooLarge {
                what: "subgraph lattice",
                size,
                limit: 20,
            });
        }
        let mut out = Vec::new();
        for vmask in 0u32..(1 << self.vertices.len()) {
            let allowed: Vec<usize> = (0..self.edges.len())
                .filter(|&e| {
                    let (a, b) = self.endpoints(e);
                    vmask & (1 << a) != 0 && vmask & (1 << b) != 0
                })
                .collect();
            for emask in 0u32..(1 << allowed.len()) {
                let mut s = self.empty();
                for v in 0..self.vertices.len() {
                    if vmask & (1 << v) != 0 {
                        s.vertices.insert(v);
                    }
                }
                for (k, &e) in allowed.iter().enumerate() {
                    if emask & (1 << k) != 0 {
                        s.edges.insert(e);
                    }
                }
                out.push(s);
            }
        }
        Ok(out)
    }

    pub fn meet(&self, a: &Subgraph, b: &Subgraph) -> Subgraph {
        let mut s = a.clone();
        s.vertices.intersect_with(&b.vertices);
        s.edges.intersect_with(&b.edges);
        s
    }

    pub fn join(&self, a: &Subgraph, b: &Subgraph) -> Subgraph {
        let mut s = a.clone();
        s.vertices.union_with(&b.vertices);
        s.edges.union_with(&b.edges);
        s
    }

    /// Largest subgraph disjoint from `y`: complement vertices and the edges
    /// among them.
    pub fn heyting_neg(&self, y: &Subgraph) -> Subgraph {
        let mut s = self.empty();
        for v in 0..self.vertices.len() {
            if !y.vertices.contains(v) {
                s.vertices.insert(v);
            }
        }
        for e in 0..self.edges.len() {
            let (a, b) = self.endpoints(e);
            if s.vertices.contains(a) && s.vertices.contains(b) {
                s.edges.insert(e);
            }
        }
        s
    }

    /// Smallest subgraph covering the complement of `y`: complement edges
    /// with their endpoints, plus complement vertices.
    pub fn coheyting_neg(&self, y: &Subgraph) -> Subgraph {
        let mut s = self.empty();
        for v in 0..self.vertices.len() {
            if !y.vertices.contains(v) {
                s.vertices.insert(v);
            }
        }
        for e in 0..self.edges.len() {
            if !y.edges.contains(e) {
                let (a, b) = self.endpoints(e);
                s.edges.insert(e);
                s.vertices.insert(a);
                s.vertices.insert(b);
            }
        }
        s
    }

    pub fn negate(&self, y: &Subgraph, which: Negation) -> Subgraph {
        match which {
            Negation::Heyting => self.heyting_neg(y),
            Negation::Coheyting => self.coheyting_neg(y),
        }
    }

    /// `∂y = y ∧ ∼y`.
    pub fn boundary(&self, y: &Subgraph) -> Subgraph {
        self.meet(y, &self.coheyting_neg(y))
    }

    pub fn diamond(&self, y: &Subgraph) -> Subgraph {
        self.coheyting_neg(&self.heyting_neg(y))
    }

    pub fn box_op(&self, y: &Subgraph) -> Subgraph {
        self.heyting_neg(&self.coheyting_neg(y))
    }

    pub fn step(&self, y: &Subgraph, which: Modality) -> Subgraph {
        match which {
            Modality::Diamond => self.diamond(y),
            Modality::Box => self.box_op(y),
        }
    }

    /// Iterates `◇` (or `□`) from `x` until two consecutive stages agree.
    pub fn modal_iterate(&self, x: &Subgraph, which: Modality) -> ModalTrace {
        let mut trace = vec![x.clone()];
        loop {
            let last = trace.last().expect("trace is nonempty");
            let next = self.step(last, which);
            if &next == last {
                break;
            }
            trace.push(next);
        }
        ModalTrace {
            steps: trace.len() - 1,
            stabilized: trace.last().expect("trace is nonempty").clone(),
            trace,
        }
    }

    pub fn diamond_inf(&self, x: &Subgraph) -> Subgraph {
        self.modal_iterate(x, Modality::Diamond).stabilized
    }

    pub fn box_inf(&self, x: &Subgraph) -> Subgraph {
        self.modal_iterate(x, Modality::Box).stabilized
    }

    /// Forward reachability from `x` along directed edges, or the union of
    /// the weakly connected components meeting `x`.
    pub fn reach_oracle(&self, x: &Subgraph, which: Reach) -> Subgraph {
        let mut seen = x.vertices.clone();
        let mut queue: VecDeque<usize> = x.vertices.ones().collect();
        while let Some(v) = queue.pop_front() {
            for &(_, a, b) in &self.edges {
                let next = match which {
                    Reach::ForwardReach if a == v => Some(b),
                    Reach::WeakComponents if a == v => Some(b),
                    Reach::WeakComponents if b == v => Some(a),
                    _ => None,
                };
                if let Some(n) = next {
                    if !seen.contains(n) {
                        seen.insert(n);
                        queue.push_back(n);
                    }
                }
            }
        }
        let mut s = self.empty();
        s.vertices = seen;
        for (e, &(_, a, b)) in self.edges.iter().enumerate() {
            let traversed = match which {
                Reach::ForwardReach => s.vertices.contains(a),
                Reach::WeakComponents => s.vertices.contains(a) || s.vertices.contains(b),
            };
            if traversed || x.edges.contains(e) {
                s.edges.insert(e);
            }
        }
        s
    }
}

impl Subgraph {
    pub fn is_empty(&self) -> bool {
        self.vertices.count_ones(..) == 0 && self.edges.count_ones(..) == 0
    }

    pub fn leq(&self, other: &Subgraph) -> bool {
        self.vertices.is_subset(&other.vertices) && self.edges.is_subset(&other.edges)
    }

    pub fn vertex_set(&self) -> &FixedBitSet {
        &self.vertices
    }

    pub fn edge_set(&self) -> &FixedBitSet {
        &self.edges
    }
}

/// A downward-closed family of subsets of `carrier` indexed by aspects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AspectPredicate {
    aspects: FinitePoset,
    carrier: Vec<String>,
    truth: Vec<Vec<bool>>,
}

impl AspectPredicate {
    /// `truth` maps aspect labels to the elements holding there; missing
    /// aspects hold nowhere.
    pub fn new<S: AsRef<str>>(
        aspects: FinitePoset,
        carrier: &[S],
        truth: &BTreeMap<String, BTreeSet<String>>,
    ) -> Result<Self> {
        let carrier: Vec<String> = carrier
            .iter()
            .map(|c| c.as_ref().to_string())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut table = vec![vec![false; carrier.len()]; aspects.len()];
        for (aspect, members) in truth {
            let a = aspects.index_of(aspect)?;
            for m in members {
                let x = carrier
                    .binary_search(m)
                    .map_err(|_| Error::UnknownElement(m.clone()))?;
                table[a][x] = true;
            }
        }
        let p = AspectPredicate {
            aspects,
            carrier,
            truth: table,
        };
        if let Some((a, b, x)) = p.functoriality_violation() {
            return Err(Error::NotMonotone(
                format!("{} holds at {}", p.carrier[x], p.aspects.label(b)),
                format!("fails at subaspect {}", p.aspects.label(a)),
            ));
        }
        Ok(p)
    }

    fn functoriality_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.aspects.len();
        for a in 0..n {
            for b in 0..n {
                if self.aspects.leq(a, b) {
                    for x in 0..self.carrier.len() {
                        if self.truth[b][x] && !self.truth[a][x] {
                            return Some((a, b, x));
                        }
                    }
                }
            }
        }
        None
    }

    pub fn aspects(&self) -> &FinitePoset {
        &self.aspects
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn holds(&self, aspect: &str, x: &str) -> Result<bool> {
        let a = self.aspects.index_of(aspect)?;
        let i = self
            .carrier
            .binary_search_by(|c| c.as_str().cmp(x))
            .map_err(|_| Error::UnknownElement(x.to_string()))?;
        Ok(self.truth[a][i])
    }

    pub fn truth_table(&self) -> BTreeMap<String, BTreeSet<String>> {
        (0..self.aspects.len())
            .map(|a| {
                let members = (0..self.carrier.len())
                    .filter(|&x| self.truth[a][x])
                    .map(|x| self.carrier[x].clone())
                    .collect();
                (self.aspects.label(a).to_string(), members)
            })
            .collect()
    }

    pub fn leq(&self, other: &AspectPredicate) -> bool {
        self.truth
            .iter()
            .zip(&other.truth)
            .all(|(r, s)| r.iter().zip(s).all(|(&a, &b)| !a || b))
    }

    fn with_truth(&self, truth: Vec<Vec<bool>>) -> AspectPredicate {
        AspectPredicate {
            aspects: self.aspects.clone(),
            carrier: self.carrier.clone(),
            truth,
        }
    }

    /// Heyting: holds at `A` iff the predicate fails at every `A′ ≤ A`.
    /// Co-Heyting: holds at `A` iff it fails at some `A′ ≥ A`.
    pub fn negate(&self, which: Negation) -> AspectPredicate {
        let n = self.aspects.len();
        let truth = (0..n)
            .map(|a| {
                (0..self.carrier.len())
                    .map(|x| match which {
                        Negation::Heyting => (0..n).filter(|&b| self.aspects.leq(b, a)).all(|b| !self.truth[b][x]),
                        Negation::Coheyting => (0..n).filter(|&b| self.aspects.leq(a, b)).any(|b| !self.truth[b][x]),
                    })
                    .collect()
            })
            .collect();
        self.with_truth(truth)
    }

    /// `◇ = ∼¬`, `□ = ¬∼`.
    pub fn modal(&self, which: Modality) -> AspectPredicate {
        match which {
            Modality::Diamond => self.negate(Negation::Heyting).negate(Negation::Coheyting),
            Modality::Box => self.negate(Negation::Coheyting).negate(Negation::Heyting),
        }
    }
}

pub fn aspect_neg(pred: &AspectPredicate, which: Negation) -> AspectPredicate {
    pred.negate(which)
}

pub fn aspect_modal(pred: &AspectPredicate, which: Modality) -> AspectPredicate {
    pred.modal(which)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge() -> DirectedMultigraph {
        DirectedMultigraph::new(&["a", "b"], &[("alpha", "a", "b")]).unwrap()
    }

    #[test]
    fn negations_on_single_edge() {
        let g = single_edge();
        let b = g.subgraph(&["b"], &[]).unwrap();
        assert_eq!(g.heyting_neg(&b), g.subgraph(&["a"], &[]).unwrap());
        assert_eq!(g.coheyting_neg(&b), g.full());
        assert_eq!(g.boundary(&b), b);
        assert_eq!(g.heyting_neg(&g.empty()), g.full());
        assert_eq!(g.coheyting_neg(&g.full()), g.empty());
        assert!(g.boundary(&g.empty()).is_empty());
    }

    #[test]
    fn heyting_neg_is_the_maximum_disjoint_subgraph() {
        let g = single_edge();
        let all = g.all_subgraphs().unwrap();
        assert_eq!(all.len(), 5);
        for y in &all {
            let best = all
                .iter()
                .filter(|z| g.meet(z, y).is_empty())
                .fold(g.empty(), |acc, z| g.join(&acc, z));
            assert_eq!(g.heyting_neg(y), best);
            let least = all
                .iter()
                .filter(|z| g.join(z, y) == g.full())
                .fold(g.full(), |acc, z| g.meet(&acc, z));
            assert_eq!(g.coheyting_neg(y), least);
        }
    }

    #[test]
    fn invalid_subgraph_rejected() {
        let g = single_edge();
        assert!(matches!(g.subgraph(&["a"], &["alpha"]), Err(Error::InvalidSubgraph(_))));
        assert!(DirectedMultigraph::new(&["a"], &[("e", "a", "z")]).is_err());
    }

    #[test]
    fn boundary_is_the_sole_vertex_b() {
        let g = DirectedMultigraph::new(&["a", "b", "c"], &[("alpha", "a", "b"), ("beta", "c", "b")]).unwrap();
        let x = g.subgraph(&["a", "b"], &["alpha"]).unwrap();
        assert_eq!(g.coheyting_neg(&x), g.subgraph(&["b", "c"], &["beta"]).unwrap());
        assert_eq!(g.boundary(&x), g.subgraph(&["b"], &[]).unwrap());
    }

    #[test]
    fn modal_iteration() {
        let g = single_edge();
        let full = g.modal_iterate(&g.full(), Modality::Diamond);
        assert_eq!(full.steps, 0);
        assert_eq!(full.stabilized, g.full());

        let b = g.subgraph(&["b"], &[]).unwrap();
        let d = g.modal_iterate(&b, Modality::Diamond);
        assert_eq!(d.steps, 1);
        assert_eq!(d.stabilized, g.full());
        assert!(g.box_inf(&b).is_empty());
    }

    #[test]
    fn reach_oracles() {
        let g = single_edge();
        assert_eq!(g.reach_oracle(&g.full(), Reach::ForwardReach), g.full());
        assert_eq!(g.reach_oracle(&g.full(), Reach::WeakComponents), g.full());
        let a = g.subgraph(&["a"], &[]).unwrap();
        assert_eq!(g.reach_oracle(&a, Reach::ForwardReach), g.full());

        let path = DirectedMultigraph::new(&["a", "b", "c"], &[("ab", "a", "b"), ("bc", "b", "c")]).unwrap();
        let b = path.subgraph(&["b"], &[]).unwrap();
        assert_eq!(
            path.reach_oracle(&b, Reach::ForwardReach),
            path.subgraph(&["b", "c"], &["bc"]).unwrap()
        );
        assert_eq!(path.reach_oracle(&b, Reach::WeakComponents), path.full());
    }

    fn aspects() -> FinitePoset {
        let rel = [
            ("S", "G"),
            ("C", "G"),
            ("F", "G"),
            ("P", "G"),
            ("H", "G"),
            ("P", "F"),
            ("H", "F"),
        ];
        FinitePoset::new(&["S", "C", "F", "P", "H", "G"], &rel).unwrap()
    }

    fn honest_at(at: &[&str]) -> AspectPredicate {
        let truth: BTreeMap<String, BTreeSet<String>> = at
            .iter()
            .map(|a| (a.to_string(), ["abe".to_string()].into()))
            .collect();
        AspectPredicate::new(aspects(), &["abe"], &truth).unwrap()
    }

    #[test]
    fn aspect_negations() {
        let all = honest_at(&["S", "C", "F", "P", "H", "G"]);
        let neg = aspect_neg(&all, Negation::Heyting);
        assert!(neg.truth_table().values().all(BTreeSet::is_empty));
        assert_eq!(aspect_modal(&all, Modality::Box), all);
        assert_eq!(aspect_modal(&all, Modality::Diamond), all);

        let only_s = honest_at(&["S"]);
        let co = aspect_neg(&only_s, Negation::Coheyting);
        assert!(co.holds("S", "abe").unwrap());
        assert!(only_s.holds("S", "abe").unwrap());
        assert!(aspect_modal(&only_s, Modality::Diamond).holds("G", "abe").unwrap());
        let boxed = aspect_modal(&only_s, Modality::Box);
        assert!(boxed.truth_table().values().all(BTreeSet::is_empty));
        assert!(boxed.leq(&only_s) && only_s.leq(&aspect_modal(&only_s, Modality::Diamond)));
    }

    #[test]
    fn aspect_functoriality_enforced() {
        let truth: BTreeMap<String, BTreeSet<String>> = [("G".to_string(), ["abe".to_string()].into())].into();
        assert!(matches!(
            AspectPredicate::new(aspects(), &["abe"], &truth),
            Err(Error::NotMonotone(..))
        ));
    }
}
