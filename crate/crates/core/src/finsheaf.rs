//! Set-valued presheaves on finite topologies and the sheaf condition.
//!
//! Stalks are finite sets of string labels. Restrictions are stored for every
//! nested pair of opens `V ⊆ U` as index tables `stalk(U) → stalk(V)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poset::{bit, is_subset, mask_members, set_label, Direction, FinitePoset, FiniteTopology, Mask, ENUMERATION_LIMIT};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePresheaf {
    topology: FiniteTopology,
    names: Vec<String>,
    stalks: Vec<Vec<String>>,
    restrictions: BTreeMap<(usize, usize), Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PresheafViolation {
    Identity {
        open: String,
        element: String,
        image: String,
    },
    Composition {
        w: String,
        v: String,
        u: String,
        element: String,
        direct: String,
        composite: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PresheafReport {
    pub valid: bool,
    pub violation: Option<PresheafViolation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// Two distinct sections with equal restrictions to every cover member.
    Locality { sections: [String; 2] },
    /// A matching family with no amalgamation.
    Gluing { family: BTreeMap<String, String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Axiom {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Axiom {
    fn pass() -> Self {
        Axiom { holds: true, witness: None }
    }

    fn fail(w: Witness) -> Self {
        Axiom {
            holds: false,
            witness: Some(w),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SheafCheck {
    pub locality: Axiom,
    pub gluing: Axiom,
}

impl SheafCheck {
    pub fn holds(&self) -> bool {
        self.locality.holds && self.gluing.holds
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverFailure {
    pub target: String,
    pub cover: Vec<String>,
    pub check: SheafCheck,
}

impl FinitePresheaf {
    /// Builds a presheaf from named opens. Restriction tables may be given
    /// for any nested pairs; missing pairs are composed from given ones and
    /// missing identities are identities.
    pub fn new(
        topology: FiniteTopology,
        names: &BTreeMap<String, Mask>,
        stalks: &BTreeMap<String, Vec<String>>,
        restrictions: &BTreeMap<(String, String), BTreeMap<String, String>>,
    ) -> Result<Self> {
        let bad = |m: String| Error::InvalidPresheaf(m);
        let opens = topology.opens().to_vec();
        let mut open_names = vec![None; opens.len()];
        for (name, &m) in names {
            let i = opens
                .iter()
                .position(|&o| o == m)
                .ok_or_else(|| bad(format!("{name} is not an open set")))?;
            if let Some(other) = &open_names[i] {
                return Err(bad(format!("{name} and {other} name the same open")));
            }
            open_names[i] = Some(name.clone());
        }
        let names: Vec<String> = open_names
            .into_iter()
            .enumerate()
            .map(|(i, n)| n.ok_or_else(|| bad(format!("open {} has no name", set_label(&topology.labels(opens[i]))))))
            .collect::<Result<_>>()?;
        let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut stalk_lists = Vec::new();
        for n in &names {
            let s = stalks.get(n).ok_or_else(|| bad(format!("no stalk for {n}")))?;
            let set: BTreeSet<&String> = s.iter().collect();
            if set.len() != s.len() {
                return Err(bad(format!("stalk of {n} repeats an element")));
            }
            stalk_lists.push(set.into_iter().cloned().collect::<Vec<String>>());
        }
        if let Some(n) = stalks.keys().find(|n| !index.contains_key(n.as_str())) {
            return Err(Error::UnknownElement(n.clone()));
        }
        let mut tables = BTreeMap::new();
        for ((vn, un), table) in restrictions {
            let v = *index.get(vn.as_str()).ok_or_else(|| Error::UnknownElement(vn.clone()))?;
            let u = *index.get(un.as_str()).ok_or_else(|| Error::UnknownElement(un.clone()))?;
            if !is_subset(opens[v], opens[u]) {
                return Err(bad(format!("{vn} is not contained in {un}")));
            }
            let mut map = Vec::new();
            for x in &stalk_lists[u] {
                let y = table
                    .get(x)
                    .ok_or_else(|| bad(format!("restriction {vn}<={un} is undefined on {x}")))?;
                let j = stalk_lists[v]
                    .binary_search(y)
                    .map_err(|_| bad(format!("restriction {vn}<={un} sends {x} to {y}, outside the stalk")))?;
                map.push(j);
            }
            if let Some(extra) = table.keys().find(|k| stalk_lists[u].binary_search(k).is_err()) {
                return Err(bad(format!("restriction {vn}<={un} mentions {extra}, outside the stalk")));
            }
            tables.insert((v, u), map);
        }
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for u in 0..opens.len() {
            for v in 0..opens.len() {
                if is_subset(opens[v], opens[u]) {
                    pairs.push((v, u));
                }
            }
        }
        pairs.sort_by_key(|&(v, u)| opens[u].count_ones() - opens[v].count_ones());
        for (v, u) in pairs {
            if tables.contains_key(&(v, u)) {
                continue;
            }
            if v == u {
                tables.insert((v, u), (0..stalk_lists[u].len()).collect());
                continue;
            }
            let via = (0..opens.len()).find(|&w| {
                w != v && w != u && tables.contains_key(&(v, w)) && tables.contains_key(&(w, u))
            });
            let w = via.ok_or_else(|| bad(format!("no restriction from {} to {}", names[u], names[v])))?;
            let composite: Vec<usize> = tables[&(w, u)].iter().map(|&x| tables[&(v, w)][x]).collect();
            tables.insert((v, u), composite);
        }
        Ok(FinitePresheaf {
            topology,
            names,
            stalks: stalk_lists,
            restrictions: tables,
        })
    }

    pub fn topology(&self) -> &FiniteTopology {
        &self.topology
    }

    pub fn open_names(&self) -> &[String] {
        &self.names
    }

    pub fn open_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn open_mask(&self, name: &str) -> Result<Mask> {
        Ok(self.topology.opens()[self.open_index(name)?])
    }

    pub fn stalk(&self, open: &str) -> Result<&[String]> {
        Ok(&self.stalks[self.open_index(open)?])
    }

    /// `ρ_{V,U}(x)` for `V ⊆ U`.
    pub fn restrict(&self, v: &str, u: &str, x: &str) -> Result<String> {
        let (vi, ui) = (self.open_index(v)?, self.open_index(u)?);
        let table = self
            .restrictions
            .get(&(vi, ui))
            .ok_or_else(|| Error::InvalidPresheaf(format!("{v} is not contained in {u}")))?;
        let xi = self.stalks[ui]
            .binary_search_by(|s| s.as_str().cmp(x))
            .map_err(|_| Error::UnknownElement(x.to_string()))?;
        Ok(self.stalks[vi][table[xi]].clone())
    }

    /// Every restriction table as element labels, keyed `(V, U)`.
    pub fn restriction_tables(&self) -> BTreeMap<(String, String), BTreeMap<String, String>> {
        self.restrictions
            .iter()
            .map(|(&(v, u), map)| {
                let table = map
                    .iter()
                    .enumerate()
                    .map(|(x, &y)| (self.stalks[u][x].clone(), self.stalks[v][y].clone()))
                    .collect();
                ((self.names[v].clone(), self.names[u].clone()), table)
            })
            .collect()
    }

    pub fn stalks(&self) -> BTreeMap<String, Vec<String>> {
        self.names.iter().cloned().zip(self.stalks.iter().cloned()).collect()
    }

    pub fn named_opens(&self) -> BTreeMap<String, Mask> {
        self.names.iter().cloned().zip(self.topology.opens().iter().copied()).collect()
    }

    fn opens(&self) -> &[Mask] {
        self.topology.opens()
    }

    fn table(&self, v: usize, u: usize) -> &[usize] {
        &self.restrictions[&(v, u)]
    }

    /// Identity and composition over every nested triple `W ⊆ V ⊆ U`.
    pub fn validate(&self) -> PresheafReport {
        let n = self.opens().len();
        for u in 0..n {
            for (x, &y) in self.table(u, u).iter().enumerate() {
                if x != y {
                    return PresheafReport {
                        valid: false,
                        violation: Some(PresheafViolation::Identity {
                            open: self.names[u].clone(),
                            element: self.stalks[u][x].clone(),
                            image: self.stalks[u][y].clone(),
                        }),
                    };
                }
            }
        }
        for u in 0..n {
            for v in 0..n {
                if !is_subset(self.opens()[v], self.opens()[u]) {
                    continue;
                }
                for w in 0..n {
                    if !is_subset(self.opens()[w], self.opens()[v]) {
                        continue;
                    }
                    for x in 0..self.stalks[u].len() {
                        let direct = self.table(w, u)[x];
                        let composite = self.table(w, v)[self.table(v, u)[x]];
                        if direct != composite {
                            return PresheafReport {
                                valid: false,
                                violation: Some(PresheafViolation::Composition {
                                    w: self.names[w].clone(),
                                    v: self.names[v].clone(),
                                    u: self.names[u].clone(),
                                    element: self.stalks[u][x].clone(),
                                    direct: self.stalks[w][direct].clone(),
                                    composite: self.stalks[w][composite].clone(),
                                }),
                            };
                        }
                    }
                }
            }
        }
        PresheafReport {
            valid: true,
            violation: None,
        }
    }

    fn resolve_cover(&self, cover: &[&str], target: &str) -> Result<(Vec<usize>, usize)> {
        let t = self.open_index(target)?;
        let mut members = Vec::new();
        let mut union = 0;
        for name in cover {
            let i = self.open_index(name)?;
            if !is_subset(self.opens()[i], self.opens()[t]) {
                return Err(Error::NotACover(target.to_string()));
            }
            union |= self.opens()[i];
            if !members.contains(&i) {
                members.push(i);
            }
        }
        if union != self.opens()[t] {
            return Err(Error::NotACover(target.to_string()));
        }
        Ok((members, t))
    }

    /// Locality and gluing for one cover of `target`, by exhaustive search.
    pub fn sheaf_check(&self, cover: &[&str], target: &str) -> Result<SheafCheck> {
        let (members, t) = self.resolve_cover(cover, target)?;
        Ok(self.check_indices(&members, t))
    }

    fn check_indices(&self, cover: &[usize], target: usize) -> SheafCheck {
        let restrict_all = |x: usize| -> Vec<usize> { cover.iter().map(|&c| self.table(c, target)[x]).collect() };
        let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut locality = Axiom::pass();
        for x in 0..self.stalks[target].len() {
            if let Some(&prev) = seen.get(&restrict_all(x)) {
                locality = Axiom::fail(Witness::Locality {
                    sections: [self.stalks[target][prev].clone(), self.stalks[target][x].clone()],
                });
                break;
            }
            seen.insert(restrict_all(x), x);
        }
        let mut gluing = Axiom::pass();
        let mut family = Vec::new();
        if let Some(bad) = self.unglued_family(cover, &seen, &mut family) {
            let family = cover
                .iter()
                .zip(&bad)
                .map(|(&c, &x)| (self.names[c].clone(), self.stalks[c][x].clone()))
                .collect();
            gluing = Axiom::fail(Witness::Gluing { family });
        }
        SheafCheck { locality, gluing }
    }

    /// Depth-first search over matching families; returns the first one
    /// whose tuple has no preimage in `glued`.
    fn unglued_family(&self, cover: &[usize], glued: &BTreeMap<Vec<usize>, usize>, partial: &mut Vec<usize>) -> Option<Vec<usize>> {
        let k = partial.len();
        if k == cover.len() {
            return if glued.contains_key(partial) { None } else { Some(partial.clone()) };
        }
        let c = cover[k];
        for x in 0..self.stalks[c].len() {
            let compatible = (0..k).all(|j| {
                let d = cover[j];
                let meet = self.opens()[c] & self.opens()[d];
                let m = self.index_of_mask(meet);
                self.table(m, c)[x] == self.table(m, d)[partial[j]]
            });
            if compatible {
                partial.push(x);
                if let Some(found) = self.unglued_family(cover, glued, partial) {
                    return Some(found);
                }
                partial.pop();
            }
        }
        None
    }

    fn index_of_mask(&self, m: Mask) -> usize {
        self.opens()
            .iter()
            .position(|&o| o == m)
            .expect("finite topologies are closed under intersection")
    }

    /// Covers of `target` in which no member lies inside the union of the
    /// others, the empty family included when `target` is empty.
    pub fn irredundant_covers(&self, target: usize) -> Vec<Vec<usize>> {
        let goal = self.opens()[target];
        let candidates: Vec<usize> = (0..self.opens().len())
            .filter(|&i| self.opens()[i] != 0 && is_subset(self.opens()[i], goal))
            .collect();
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        self.grow_covers(&candidates, 0, 0, goal, &mut chosen, &mut out);
        out
    }

    fn grow_covers(&self, candidates: &[usize], start: usize, union: Mask, goal: Mask, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if union == goal {
            let irredundant = chosen.iter().all(|&m| {
                let others = chosen.iter().filter(|&&o| o != m).fold(0, |acc, &o| acc | self.opens()[o]);
                !is_subset(self.opens()[m], others)
            });
            if irredundant {
                out.push(chosen.clone());
            }
            return;
        }
        for i in start..candidates.len() {
            let c = candidates[i];
            if self.opens()[c] & !union != 0 {
                chosen.push(c);
                self.grow_covers(candidates, i + 1, union | self.opens()[c], goal, chosen, out);
                chosen.pop();
            }
        }
    }

    /// Every cover of `target` drawn from its sub-opens.
    pub fn all_covers(&self, target: usize) -> Result<Vec<Vec<usize>>> {
        let goal = self.opens()[target];
        let candidates: Vec<usize> = (0..self.opens().len())
            .filter(|&i| is_subset(self.opens()[i], goal))
            .collect();
        if candidates.len() > ENUMERATION_LIMIT {
            return Err(Error::TooLarge {
                what: "cover family",
                size: candidates.len(),
                limit: ENUMERATION_LIMIT,
            });
        }
        Ok((0u64..1 << candidates.len())
            .map(|s| mask_members(s).map(|i| candidates[i]).collect::<Vec<usize>>())
            .filter(|c| c.iter().fold(0, |acc, &i| acc | self.opens()[i]) == goal)
            .collect())
    }

    /// Failing covers among the irredundant covers of every open.
    pub fn sheaf_failures(&self) -> Vec<CoverFailure> {
        let mut out = Vec::new();
        for t in 0..self.opens().len() {
            for cover in self.irredundant_covers(t) {
                let check = self.check_indices(&cover, t);
                if !check.holds() {
                    out.push(CoverFailure {
                        target: self.names[t].clone(),
                        cover: cover.iter().map(|&c| self.names[c].clone()).collect(),
                        check,
                    });
                }
            }
        }
        out
    }

    pub fn is_sheaf(&self) -> bool {
        self.sheaf_failures().is_empty()
    }

    /// The sheaf condition over every cover, redundant ones included.
    pub fn is_sheaf_exhaustive(&self) -> Result<bool> {
        for t in 0..self.opens().len() {
            for cover in self.all_covers(t)? {
                if !self.check_indices(&cover, t).holds() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Whether `stalk(target) → ∏ stalk(Uᵢ) ⇉ ∏ stalk(Uᵢ ∩ Uⱼ)` is an
    /// equalizer, by full product enumeration.
    pub fn equalizer_check(&self, cover: &[&str], target: &str) -> Result<bool> {
        let (members, t) = self.resolve_cover(cover, target)?;
        let sizes: Vec<usize> = members.iter().map(|&m| self.stalks[m].len()).collect();
        let total: usize = sizes.iter().product();
        let mut equalized: BTreeSet<Vec<usize>> = BTreeSet::new();
        for mut n in 0..total {
            let mut tuple = vec![0; sizes.len()];
            for i in (0..sizes.len()).rev() {
                tuple[i] = n % sizes[i];
                n /= sizes[i];
            }
            let agrees = members.iter().enumerate().all(|(i, &a)| {
                members.iter().enumerate().all(|(j, &b)| {
                    let m = self.index_of_mask(self.opens()[a] & self.opens()[b]);
                    self.table(m, a)[tuple[i]] == self.table(m, b)[tuple[j]]
                })
            });
            if agrees {
                equalized.insert(tuple);
            }
        }
        let image: Vec<Vec<usize>> = (0..self.stalks[t].len())
            .map(|x| members.iter().map(|&m| self.table(m, t)[x]).collect())
            .collect();
        let distinct: BTreeSet<Vec<usize>> = image.iter().cloned().collect();
        Ok(distinct.len() == image.len() && distinct == equalized)
    }

    /// The stalk over the smallest open containing `point`.
    pub fn stalk_at(&self, point: &str) -> Result<&[String]> {
        let m = self.topology.minimal_open(point)?;
        Ok(&self.stalks[self.index_of_mask(m)])
    }

    /// The `V`-assignments compatible with knowing `a ⊆ stalk(U)`: the image
    /// under `ρ_{V,X}` of the global sections whose `U`-restriction lies in `a`.
    pub fn predict(&self, u: &str, v: &str, a: &[String]) -> Result<Vec<String>> {
        let (ui, vi) = (self.open_index(u)?, self.open_index(v)?);
        let known: BTreeSet<&str> = a.iter().map(String::as_str).collect();
        if let Some(x) = known.iter().find(|x| self.stalks[ui].binary_search_by(|s| s.as_str().cmp(x)).is_err()) {
            return Err(Error::UnknownElement(x.to_string()));
        }
        let x = self.index_of_mask(self.topology.full());
        let out: BTreeSet<String> = (0..self.stalks[x].len())
            .filter(|&g| known.contains(self.stalks[ui][self.table(ui, x)[g]].as_str()))
            .map(|g| self.stalks[vi][self.table(vi, x)[g]].clone())
            .collect();
        Ok(out.into_iter().collect())
    }
}

/// A covariant functor from a finite poset to finite sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Copresheaf {
    poset: FinitePoset,
    sets: Vec<Vec<String>>,
    /// `F(p ≤ q)` for every `p ≤ q`, identities included.
    maps: BTreeMap<(usize, usize), Vec<usize>>,
}

impl Copresheaf {
    /// Maps may be given on any comparable pairs; covers are required and
    /// the rest are composed. Inconsistent composites are rejected.
    pub fn new(
        poset: FinitePoset,
        sets: &BTreeMap<String, Vec<String>>,
        maps: &BTreeMap<(String, String), BTreeMap<String, String>>,
    ) -> Result<Self> {
        let bad = |m: String| Error::InvalidPresheaf(m);
        let mut lists = Vec::new();
        for p in poset.labels() {
            let s = sets.get(p).ok_or_else(|| bad(format!("no set at {p}")))?;
            let set: BTreeSet<&String> = s.iter().collect();
            if set.len() != s.len() {
                return Err(bad(format!("set at {p} repeats an element")));
            }
            lists.push(set.into_iter().cloned().collect::<Vec<String>>());
        }
        let mut tables = BTreeMap::new();
        for ((p, q), table) in maps {
            let (i, j) = (poset.index_of(p)?, poset.index_of(q)?);
            if !poset.leq(i, j) {
                return Err(bad(format!("{p} is not below {q}")));
            }
            let mut map = Vec::new();
            for x in &lists[i] {
                let y = table.get(x).ok_or_else(|| bad(format!("map {p}->{q} is undefined on {x}")))?;
                map.push(
                    lists[j]
                        .binary_search(y)
                        .map_err(|_| bad(format!("map {p}->{q} sends {x} outside the set at {q}")))?,
                );
            }
            tables.insert((i, j), map);
        }
        let n = poset.len();
        let height = |i: usize, j: usize| poset.up_indices(i).iter().filter(|&&k| poset.leq(k, j)).count();
        let mut pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| poset.leq(i, j))
            .collect();
        pairs.sort_by_key(|&(i, j)| height(i, j));
        for (i, j) in pairs {
            if i == j {
                let id: Vec<usize> = (0..lists[i].len()).collect();
                if tables.get(&(i, j)).is_some_and(|m| *m != id) {
                    return Err(bad(format!("map at {} is not the identity", poset.label(i))));
                }
                tables.insert((i, j), id);
                continue;
            }
            let mids: Vec<usize> = (0..n)
                .filter(|&k| k != i && k != j && poset.leq(i, k) && poset.leq(k, j))
                .collect();
            for &k in &mids {
                let (Some(a), Some(b)) = (tables.get(&(i, k)), tables.get(&(k, j))) else {
                    continue;
                };
                let composite: Vec<usize> = a.iter().map(|&x| b[x]).collect();
                match tables.get(&(i, j)) {
                    Some(existing) if *existing != composite => {
                        return Err(bad(format!(
                            "maps {}->{} disagree through {}",
                            poset.label(i),
                            poset.label(j),
                            poset.label(k)
                        )));
                    }
                    Some(_) => {}
                    None => {
                        tables.insert((i, j), composite);
                    }
                }
            }
            if !tables.contains_key(&(i, j)) {
                return Err(bad(format!("no map {}->{}", poset.label(i), poset.label(j))));
            }
        }
        Ok(Copresheaf {
            poset,
            sets: lists,
            maps: tables,
        })
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn set(&self, p: &str) -> Result<&[String]> {
        Ok(&self.sets[self.poset.index_of(p)?])
    }

    pub fn apply(&self, p: &str, q: &str, x: &str) -> Result<String> {
        let (i, j) = (self.poset.index_of(p)?, self.poset.index_of(q)?);
        let map = self
            .maps
            .get(&(i, j))
            .ok_or_else(|| Error::InvalidPresheaf(format!("{p} is not below {q}")))?;
        let xi = self.sets[i]
            .binary_search_by(|s| s.as_str().cmp(x))
            .map_err(|_| Error::UnknownElement(x.to_string()))?;
        Ok(self.sets[j][map[xi]].clone())
    }
}

fn tuple_label(poset: &FinitePoset, points: &[usize], values: &[&str]) -> String {
    points
        .iter()
        .zip(values)
        .map(|(&p, v)| format!("{}:{}", poset.label(p), v))
        .collect::<Vec<_>>()
        .join("|")
}

fn component<'a>(label: &'a str, point: &str) -> Option<&'a str> {
    label
        .split('|')
        .find_map(|part| part.strip_prefix(point).and_then(|rest| rest.strip_prefix(':')))
}

/// The sheaf on the up-Alexandrov topology with `F(V)` the compatible
/// tuples over `V`. Sections are labelled `p:x|q:y` in point order.
pub fn poset_transfer(f: &Copresheaf) -> Result<FinitePresheaf> {
    let poset = &f.poset;
    for label in poset.labels().iter().chain(f.sets.iter().flatten()) {
        if label.contains(':') || label.contains('|') {
            return Err(Error::InvalidPresheaf(format!("label {label:?} contains ':' or '|'")));
        }
    }
    let topology = poset.alexandrov(Direction::Up)?;
    let opens = topology.opens().to_vec();
    let mut sections: Vec<Vec<Vec<usize>>> = Vec::new();
    for &v in &opens {
        let points: Vec<usize> = mask_members(v).collect();
        let mut found = Vec::new();
        compatible_tuples(f, &points, &mut Vec::new(), &mut found);
        sections.push(found);
    }
    let mut names = BTreeMap::new();
    let mut stalks = BTreeMap::new();
    let mut restrictions = BTreeMap::new();
    let label_of = |v: Mask, t: &[usize]| {
        let points: Vec<usize> = mask_members(v).collect();
        let values: Vec<&str> = points.iter().zip(t).map(|(&p, &x)| f.sets[p][x].as_str()).collect();
        tuple_label(poset, &points, &values)
    };
    let open_name = |v: Mask| set_label(&poset.mask_labels(v));
    for (i, &v) in opens.iter().enumerate() {
        names.insert(open_name(v), v);
        stalks.insert(open_name(v), sections[i].iter().map(|t| label_of(v, t)).collect::<Vec<_>>());
    }
    for (ui, &u) in opens.iter().enumerate() {
        for &v in &opens {
            if v == u || !is_subset(v, u) {
                continue;
            }
            let u_points: Vec<usize> = mask_members(u).collect();
            let table = sections[ui]
                .iter()
                .map(|t| {
                    let kept: Vec<usize> = u_points
                        .iter()
                        .zip(t)
                        .filter(|(p, _)| v & bit(**p) != 0)
                        .map(|(_, &x)| x)
                        .collect();
                    (label_of(u, t), label_of(v, &kept))
                })
                .collect();
            restrictions.insert((open_name(v), open_name(u)), table);
        }
    }
    FinitePresheaf::new(topology, &names, &stalks, &restrictions)
}

fn compatible_tuples(f: &Copresheaf, points: &[usize], partial: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let k = partial.len();
    if k == points.len() {
        out.push(partial.clone());
        return;
    }
    let p = points[k];
    for x in 0..f.sets[p].len() {
        let ok = (0..k).all(|j| {
            let q = points[j];
            if f.poset.leq(q, p) {
                f.maps[&(q, p)][partial[j]] == x
            } else if f.poset.leq(p, q) {
                f.maps[&(p, q)][x] == partial[j]
            } else {
                true
            }
        });
        if ok {
            partial.push(x);
            compatible_tuples(f, points, partial, out);
            partial.pop();
        }
    }
}

/// Recovers the copresheaf `p ↦ F(↑p)` from a presheaf on the
/// up-Alexandrov topology of `poset`. Tuple labels collapse to their
/// component at `p`.
pub fn poset_transfer_inverse(p: &FinitePresheaf, poset: &FinitePoset) -> Result<Copresheaf> {
    if p.topology != poset.alexandrov(Direction::Up)? {
        return Err(Error::InvalidPresheaf("topology is not the up-Alexandrov topology of the poset".into()));
    }
    let relabel = |point: &str, x: &str| component(x, point).unwrap_or(x).to_string();
    let mut sets = BTreeMap::new();
    let mut maps = BTreeMap::new();
    for i in 0..poset.len() {
        let up = p.index_of_mask(poset.up_mask(i));
        let label = poset.label(i);
        sets.insert(label.to_string(), p.stalks[up].iter().map(|x| relabel(label, x)).collect::<Vec<_>>());
        for j in poset.up_indices(i) {
            let target = p.index_of_mask(poset.up_mask(j));
            let table = p
                .table(target, up)
                .iter()
                .enumerate()
                .map(|(x, &y)| (relabel(label, &p.stalks[up][x]), relabel(poset.label(j), &p.stalks[target][y])))
                .collect();
            maps.insert((label.to_string(), poset.label(j).to_string()), table);
        }
    }
    Copresheaf::new(poset.clone(), &sets, &maps)
}

/// Proper `n`-colorings over the subgraphs of an undirected connected
/// graph. Points of the space are vertices and edges (`u-v`); the opens are
/// exactly the subgraphs.
pub fn ncolor<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)], n: usize) -> Result<FinitePresheaf> {
    let verts: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
    let vset: BTreeSet<&String> = verts.iter().collect();
    if vset.len() != verts.len() || verts.is_empty() {
        return Err(Error::InvalidGraph("vertices must be nonempty and distinct".into()));
    }
    let mut edge_names = Vec::new();
    let mut relations = Vec::new();
    let mut ends = BTreeMap::new();
    for (a, b) in edges {
        let (a, b) = (a.as_ref().to_string(), b.as_ref().to_string());
        for x in [&a, &b] {
            if !vset.contains(x) {
                return Err(Error::UnknownElement(x.clone()));
            }
        }
        if a == b {
            return Err(Error::InvalidGraph(format!("loop at {a}")));
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let name = format!("{lo}-{hi}");
        if ends.insert(name.clone(), (lo.clone(), hi.clone())).is_some() {
            return Err(Error::InvalidGraph(format!("repeated edge {name}")));
        }
        relations.push((lo, name.clone()));
        relations.push((hi, name.clone()));
        edge_names.push(name);
    }
    let mut points = verts.clone();
    points.extend(edge_names.iter().cloned());
    if points.iter().collect::<BTreeSet<_>>().len() != points.len() {
        return Err(Error::InvalidGraph("an edge name collides with a vertex".into()));
    }
    let poset = FinitePoset::new(&points, &relations)?;
    let mut reached = BTreeSet::from([verts[0].clone()]);
    loop {
        let before = reached.len();
        for (a, b) in ends.values() {
            if reached.contains(a) || reached.contains(b) {
                reached.insert(a.clone());
                reached.insert(b.clone());
            }
        }
        if reached.len() == before {
            break;
        }
    }
    if reached.len() != verts.len() {
        return Err(Error::Disconnected);
    }
    let topology = poset.alexandrov(Direction::Down)?;
    let is_vertex = |i: usize| vset.contains(&poset.labels()[i]);
    let colorings = |m: Mask| -> Vec<BTreeMap<String, usize>> {
        let vs: Vec<String> = mask_members(m).filter(|&i| is_vertex(i)).map(|i| poset.label(i).to_string()).collect();
        let es: Vec<&(String, String)> = mask_members(m).filter(|&i| !is_vertex(i)).map(|i| &ends[poset.label(i)]).collect();
        let mut out = Vec::new();
        let total = n.checked_pow(vs.len() as u32).unwrap_or(usize::MAX);
        for mut code in 0..total {
            let mut c = BTreeMap::new();
            for v in &vs {
                c.insert(v.clone(), code % n);
                code /= n;
            }
            if es.iter().all(|(a, b)| c[a] != c[b]) {
                out.push(c);
            }
        }
        out
    };
    let label = |c: &BTreeMap<String, usize>| c.iter().map(|(v, k)| format!("{v}={k}")).collect::<Vec<_>>().join(",");
    let mut names = BTreeMap::new();
    let mut stalks = BTreeMap::new();
    let mut restrictions = BTreeMap::new();
    let open_name = |m: Mask| set_label(&poset.mask_labels(m));
    for &u in topology.opens() {
        let cs = colorings(u);
        names.insert(open_name(u), u);
        stalks.insert(open_name(u), cs.iter().map(label).collect::<Vec<_>>());
        for &v in topology.opens() {
            if v == u || !is_subset(v, u) {
                continue;
            }
            let kept: BTreeSet<String> = mask_members(v).map(|i| poset.label(i).to_string()).collect();
            let table = cs
                .iter()
                .map(|c| {
                    let r: BTreeMap<String, usize> = c.iter().filter(|(k, _)| kept.contains(*k)).map(|(k, x)| (k.clone(), *x)).collect();
                    (label(c), label(&r))
                })
                .collect();
            restrictions.insert((open_name(v), open_name(u)), table);
        }
    }
    FinitePresheaf::new(topology, &names, &stalks, &restrictions)
}

/// Integers `lo..=hi` as labels.
pub fn window(lo: i64, hi: i64) -> Vec<String> {
    (lo..=hi).map(|k| k.to_string()).collect()
}

fn two_point(stalk: impl Fn(&str) -> Vec<String>, restrict: impl Fn(&str, &str, &str) -> String) -> FinitePresheaf {
    let topology = FiniteTopology::discrete(&["p", "q"]).expect("two points");
    let names: BTreeMap<String, Mask> = [("empty", 0b00), ("p", 0b01), ("q", 0b10), ("pq", 0b11)]
        .iter()
        .map(|(n, m)| (n.to_string(), *m))
        .collect();
    let stalks = names.keys().map(|n| (n.clone(), stalk(n))).collect();
    let mut restrictions = BTreeMap::new();
    for (vn, &v) in &names {
        for (un, &u) in &names {
            if v != u && is_subset(v, u) {
                let table = stalk(un).iter().map(|x| (x.clone(), restrict(vn, un, x))).collect();
                restrictions.insert((vn.clone(), un.clone()), table);
            }
        }
    }
    FinitePresheaf::new(topology, &names, &stalks, &restrictions).expect("fixture is well formed")
}

/// The constant presheaf on the discrete two-point space `{p, q}`, valued
/// in the integer window `lo..=hi`. Opens are named `empty`, `p`, `q`, `pq`.
pub fn constant_presheaf(lo: i64, hi: i64) -> FinitePresheaf {
    two_point(|_| window(lo, hi), |_, _, x| x.to_string())
}

/// The constant presheaf with a one-element set `*` over the empty open.
pub fn pointed_presheaf(lo: i64, hi: i64) -> FinitePresheaf {
    two_point(
        |open| if open == "empty" { vec!["*".to_string()] } else { window(lo, hi) },
        |v, _, x| if v == "empty" { "*".to_string() } else { x.to_string() },
    )
}

/// The pointed presheaf with pairs `(m,n)` over `pq` and projections.
pub fn constant_sheaf(lo: i64, hi: i64) -> FinitePresheaf {
    let pairs = || {
        let w = window(lo, hi);
        w.iter().flat_map(|m| w.iter().map(move |n| format!("({m},{n})"))).collect::<Vec<_>>()
    };
    two_point(
        |open| match open {
            "empty" => vec!["*".to_string()],
            "pq" => pairs(),
            _ => window(lo, hi),
        },
        |v, u, x| match (v, u) {
            ("empty", _) => "*".to_string(),
            (_, "pq") => {
                let inner = &x[1..x.len() - 1];
                let (m, n) = inner.split_once(',').expect("pair label");
                if v == "p" { m } else { n }.to_string()
            }
            _ => x.to_string(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain2() -> Copresheaf {
        let poset = FinitePoset::chain(&["0", "1"]);
        let sets: BTreeMap<String, Vec<String>> =
            [("0".to_string(), vec!["a".to_string(), "b".to_string()]), ("1".to_string(), vec!["z".to_string()])].into();
        let maps: BTreeMap<(String, String), BTreeMap<String, String>> = [(
            ("0".to_string(), "1".to_string()),
            [("a".to_string(), "z".to_string()), ("b".to_string(), "z".to_string())].into(),
        )]
        .into();
        Copresheaf::new(poset, &sets, &maps).unwrap()
    }

    #[test]
    fn fixtures_are_presheaves() {
        for p in [constant_presheaf(-2, 2), pointed_presheaf(-2, 2), constant_sheaf(-2, 2)] {
            assert!(p.validate().valid);
        }
    }

    #[test]
    fn constant_presheaf_fails_locality_on_empty_cover() {
        let p = constant_presheaf(-2, 2);
        let check = p.sheaf_check(&[], "empty").unwrap();
        assert!(!check.locality.holds);
        assert!(check.gluing.holds);
        let failures = p.sheaf_failures();
        assert_eq!(failures.len(), 1);
        assert_eq!(failures[0].target, "empty");
        assert!(failures[0].cover.is_empty());
    }

    #[test]
    fn pointed_presheaf_fails_gluing() {
        let g = pointed_presheaf(-2, 2);
        let check = g.sheaf_check(&["p", "q"], "pq").unwrap();
        assert!(check.locality.holds);
        let Some(Witness::Gluing { family }) = check.gluing.witness else {
            panic!("expected a gluing witness");
        };
        assert_ne!(family["p"], family["q"]);
        assert!(g.sheaf_failures().iter().all(|f| f.check.locality.holds));
        assert!(!g.is_sheaf());
    }

    #[test]
    fn repaired_sheaf_passes() {
        let h = constant_sheaf(-2, 2);
        assert!(h.is_sheaf());
        assert!(h.is_sheaf_exhaustive().unwrap());
        let predicted: BTreeSet<String> = h.predict("p", "q", &["1".to_string()]).unwrap().into_iter().collect();
        assert_eq!(predicted, window(-2, 2).into_iter().collect());
    }

    #[test]
    fn equalizer_agrees_with_axioms() {
        for p in [constant_presheaf(-1, 1), pointed_presheaf(-1, 1), constant_sheaf(-1, 1)] {
            for (cover, target) in [(vec![], "empty"), (vec!["p", "q"], "pq"), (vec!["p"], "p")] {
                let axioms = p.sheaf_check(&cover, target).unwrap().holds();
                assert_eq!(p.equalizer_check(&cover, target).unwrap(), axioms);
            }
        }
    }

    #[test]
    fn broken_composition_is_reported() {
        let p = constant_presheaf(0, 1);
        let mut restrictions = p.restriction_tables();
        restrictions.insert(
            ("empty".to_string(), "pq".to_string()),
            [("0".to_string(), "1".to_string()), ("1".to_string(), "0".to_string())].into(),
        );
        let broken = FinitePresheaf::new(p.topology().clone(), &p.named_opens(), &p.stalks(), &restrictions).unwrap();
        assert!(matches!(broken.validate().violation, Some(PresheafViolation::Composition { .. })));
    }

    #[test]
    fn cover_must_union_to_target() {
        let p = constant_presheaf(0, 1);
        assert_eq!(p.sheaf_check(&["p"], "pq"), Err(Error::NotACover("pq".into())));
    }

    #[test]
    fn transfer_of_chain() {
        let f = chain2();
        let s = poset_transfer(&f).unwrap();
        assert!(s.validate().valid);
        assert!(s.is_sheaf());
        assert_eq!(s.stalk("{0,1}").unwrap(), ["0:a|1:z", "0:b|1:z"]);
        assert_eq!(s.stalk_at("0").unwrap().len(), 2);
        assert_eq!(s.stalk_at("1").unwrap(), ["1:z"]);
        assert_eq!(poset_transfer_inverse(&s, f.poset()).unwrap(), f);
    }

    #[test]
    fn inconsistent_copresheaf_rejected() {
        let poset = FinitePoset::new(&["b", "l", "r", "t"], &[("b", "l"), ("b", "r"), ("l", "t"), ("r", "t")]).unwrap();
        let two = vec!["0".to_string(), "1".to_string()];
        let sets: BTreeMap<String, Vec<String>> = ["b", "l", "r", "t"].iter().map(|p| (p.to_string(), two.clone())).collect();
        let id: BTreeMap<String, String> = two.iter().map(|x| (x.clone(), x.clone())).collect();
        let swap: BTreeMap<String, String> = [("0".to_string(), "1".to_string()), ("1".to_string(), "0".to_string())].into();
        let mut maps: BTreeMap<(String, String), BTreeMap<String, String>> = BTreeMap::new();
        for (p, q) in [("b", "l"), ("b", "r"), ("l", "t")] {
            maps.insert((p.into(), q.into()), id.clone());
        }
        maps.insert(("r".into(), "t".into()), swap);
        assert!(matches!(Copresheaf::new(poset, &sets, &maps), Err(Error::InvalidPresheaf(_))));
    }

    #[test]
    fn ncolor_counts() {
        let k3 = ncolor(&["1", "2", "3"], &[("1", "2"), ("1", "3"), ("2", "3")], 3).unwrap();
        assert_eq!(k3.stalk("{1,1-2,1-3,2,2-3,3}").unwrap().len(), 6);
        assert!(k3.is_sheaf());
        let k3_two = ncolor(&["1", "2", "3"], &[("1", "2"), ("1", "3"), ("2", "3")], 2).unwrap();
        assert!(k3_two.stalk("{1,1-2,1-3,2,2-3,3}").unwrap().is_empty());
        assert!(k3_two.is_sheaf());
        let single = ncolor(&["v"], &[], 2).unwrap();
        assert_eq!(single.stalk("{v}").unwrap(), ["v=0", "v=1"]);
        assert_eq!(ncolor(&["a", "b"], &[], 2), Err(Error::Disconnected));
    }

    #[test]
    fn stockpile_prediction() {
        // Intervals [0,1] and [1,2] inside [0,2]; a stockpile level over an
        // interval is a nondecreasing sequence of levels 0..=1.
        let topology = FiniteTopology::new(&["0", "1", "2"], &[vec![], vec!["1"], vec!["0", "1"], vec!["1", "2"], vec!["0", "1", "2"]]).unwrap();
        let names: BTreeMap<String, Mask> = [("none", 0b000), ("mid", 0b010), ("left", 0b011), ("right", 0b110), ("all", 0b111)]
            .iter()
            .map(|(n, m)| (n.to_string(), *m))
            .collect();
        let seqs = |len: usize| -> Vec<String> {
            (0u32..1 << len)
                .map(|b| (0..len).map(|i| ((b >> (len - 1 - i)) & 1).to_string()).collect::<String>())
                .filter(|s| s.as_bytes().windows(2).all(|w| w[0] <= w[1]))
                .collect()
        };
        let stalks: BTreeMap<String, Vec<String>> = names
            .iter()
            .map(|(n, m)| (n.clone(), if *m == 0 { vec![String::new()] } else { seqs(m.count_ones() as usize) }))
            .collect();
        let slice = |from: Mask, to: Mask, s: &str| -> String {
            let pts: Vec<usize> = mask_members(from).collect();
            pts.iter().zip(s.chars()).filter(|(p, _)| to & bit(**p) != 0).map(|(_, c)| c).collect()
        };
        let mut restrictions = BTreeMap::new();
        for (vn, &v) in &names {
            for (un, &u) in &names {
                if v != u && is_subset(v, u) {
                    let table = stalks[un].iter().map(|s| (s.clone(), slice(u, v, s))).collect();
                    restrictions.insert((vn.clone(), un.clone()), table);
                }
            }
        }
        let p = FinitePresheaf::new(topology, &names, &stalks, &restrictions).unwrap();
        assert!(p.validate().valid);
        assert_eq!(p.predict("left", "right", &["01".to_string()]).unwrap(), ["11"]);
        assert_eq!(p.predict("left", "right", &["00".to_string()]).unwrap(), ["00", "01"]);
        assert!(p.predict("left", "right", &[]).unwrap().is_empty());
        assert_eq!(p.predict("left", "right", p.stalk("left").unwrap()).unwrap(), ["00", "01", "11"]);
    }
}
