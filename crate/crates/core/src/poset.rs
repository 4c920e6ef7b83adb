//! Finite posets, down/up sets, downset lattices and Alexandrov topologies.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Largest carrier for which power-set style enumerations are attempted.
pub const ENUMERATION_LIMIT: usize = 16;

/// Subsets of a finite carrier are encoded as bitmasks over element indices.
pub type Mask = u64;

pub const MAX_POINTS: usize = 64;

/// Largest carrier accepted by the poset constructors.
pub const POSET_LIMIT: usize = 512;

pub fn bit(i: usize) -> Mask {
    1 << i
}

pub fn mask_members(mask: Mask) -> impl Iterator<Item = usize> {
    (0..MAX_POINTS).filter(move |&i| mask & bit(i) != 0)
}

pub fn is_subset(a: Mask, b: Mask) -> bool {
    a & !b == 0
}

/// A finite partial order on string labels. Labels are kept sorted; the
/// full reflexive-transitive relation is stored as a boolean matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePoset {
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
    leq: Vec<Vec<bool>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
}

impl FinitePoset {
    /// Builds the reflexive-transitive closure of `relations` and rejects
    /// cycles of length two or more.
    pub fn new<S: AsRef<str>>(elements: &[S], relations: &[(S, S)]) -> Result<Self> {
        let labels: BTreeSet<String> = elements.iter().map(|e| e.as_ref().to_string()).collect();
        let labels: Vec<String> = labels.into_iter().collect();
        let index: BTreeMap<String, usize> =
            labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        let n = labels.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in relations {
            let ia = lookup(&index, a.as_ref())?;
            let ib = lookup(&index, b.as_ref())?;
            leq[ia][ib] = true;
        }
        Self::close(labels, index, leq)
    }

    /// Builds a poset from a relation given as a predicate on indices of
    /// `labels` (which must already be distinct).
    pub fn from_relation(labels: Vec<String>, rel: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let n = labels.len();
        let order: Vec<usize> = {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
            idx
        };
        let sorted: Vec<String> = order.iter().map(|&i| labels[i].clone()).collect();
        let index: BTreeMap<String, usize> =
            sorted.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        if index.len() != n {
            return Err(Error::InvalidTopology("duplicate poset labels".into()));
        }
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                leq[i][j] = i == j || rel(order[i], order[j]);
            }
        }
        Self::close(sorted, index, leq)
    }

    fn close(labels: Vec<String>, index: BTreeMap<String, usize>, mut leq: Vec<Vec<bool>>) -> Result<Self> {
        let n = labels.len();
        if n > POSET_LIMIT {
            return Err(Error::TooLarge {
                what: "poset",
                size: n,
                limit: POSET_LIMIT,
            });
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::Antisymmetry(labels[i].clone(), labels[j].clone()));
                }
            }
        }
        Ok(FinitePoset { labels, index, leq })
    }

    pub fn antichain<S: AsRef<str>>(elements: &[S]) -> Self {
        Self::new(elements, &[]).expect("an antichain is always a poset")
    }

    pub fn chain<S: AsRef<str>>(elements: &[S]) -> Self {
        let rel: Vec<(&str, &str)> = elements
            .windows(2)
            .map(|w| (w[0].as_ref(), w[1].as_ref()))
            .collect();
        let els: Vec<&str> = elements.iter().map(AsRef::as_ref).collect();
        Self::new(&els, &rel).expect("a chain is always a poset")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        lookup(&self.index, label)
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn leq_labels(&self, a: &str, b: &str) -> Result<bool> {
        Ok(self.leq(self.index_of(a)?, self.index_of(b)?))
    }

    /// Strict covering pairs `(i, j)` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j
                    && self.leq(i, j)
                    && !(0..n).any(|k| k != i && k != j && self.leq(i, k) && self.leq(k, j))
                {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Every related pair as labels, reflexive pairs included.
    pub fn relation(&self) -> Vec<(String, String)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.leq(i, j) {
                    out.push((self.labels[i].clone(), self.labels[j].clone()));
                }
            }
        }
        out
    }

    pub fn down_indices(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&q| self.leq(q, i)).collect()
    }

    pub fn up_indices(&self, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&q| self.leq(i, q)).collect()
    }

    pub fn principal_down(&self, x: &str) -> Result<BTreeSet<String>> {
        let i = self.index_of(x)?;
        Ok(self.down_indices(i).into_iter().map(|q| self.labels[q].clone()).collect())
    }

    pub fn principal_up(&self, x: &str) -> Result<BTreeSet<String>> {
        let i = self.index_of(x)?;
        Ok(self.up_indices(i).into_iter().map(|q| self.labels[q].clone()).collect())
    }

    /// The opposite order.
    pub fn dual(&self) -> FinitePoset {
        let n = self.len();
        let leq = (0..n).map(|i| (0..n).map(|j| self.leq[j][i]).collect()).collect();
        FinitePoset {
            labels: self.labels.clone(),
            index: self.index.clone(),
            leq,
        }
    }

    pub fn down_mask(&self, i: usize) -> Mask {
        (0..self.len()).filter(|&q| self.leq(q, i)).fold(0, |m, q| m | bit(q))
    }

    pub fn up_mask(&self, i: usize) -> Mask {
        (0..self.len()).filter(|&q| self.leq(i, q)).fold(0, |m, q| m | bit(q))
    }

    pub fn is_down_closed(&self, set: Mask) -> bool {
        mask_members(set).all(|i| is_subset(self.down_mask(i), set))
    }

    pub fn is_up_closed(&self, set: Mask) -> bool {
        mask_members(set).all(|i| is_subset(self.up_mask(i), set))
    }

    fn guard(&self) -> Result<()> {
        if self.len() > ENUMERATION_LIMIT {
            return Err(Error::TooLarge {
                what: "poset",
                size: self.len(),
                limit: ENUMERATION_LIMIT,
            });
        }
        Ok(())
    }

    /// All downward-closed subsets as masks, in increasing numeric order.
    pub fn downset_masks(&self) -> Result<Vec<Mask>> {
        self.guard()?;
        Ok((0..(1u64 << self.len())).filter(|&m| self.is_down_closed(m)).collect())
    }

    pub fn upset_masks(&self) -> Result<Vec<Mask>> {
        self.guard()?;
        Ok((0..(1u64 << self.len())).filter(|&m| self.is_up_closed(m)).collect())
    }

    pub fn mask_labels(&self, mask: Mask) -> BTreeSet<String> {
        mask_members(mask)
            .filter(|&i| i < self.len())
            .map(|i| self.labels[i].clone())
            .collect()
    }

    pub fn mask_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<Mask> {
        if self.len() > MAX_POINTS {
            return Err(Error::TooLarge {
                what: "poset",
                size: self.len(),
                limit: MAX_POINTS,
            });
        }
        labels
            .iter()
            .try_fold(0, |m, l| Ok(m | bit(self.index_of(l.as_ref())?)))
    }

    /// The downsets of `self`, each as a label set.
    pub fn all_downsets(&self) -> Result<Vec<BTreeSet<String>>> {
        Ok(self
            .downset_masks()?
            .into_iter()
            .map(|m| self.mask_labels(m))
            .collect())
    }

    /// The downset lattice ordered by inclusion. Elements are labelled by
    /// [`set_label`] of their members.
    pub fn downset_lattice(&self) -> Result<FinitePoset> {
        let masks = self.downset_masks()?;
        let labels = masks.iter().map(|&m| set_label(&self.mask_labels(m))).collect();
        FinitePoset::from_relation(labels, |i, j| is_subset(masks[i], masks[j]))
    }

    pub fn alexandrov(&self, direction: Direction) -> Result<FiniteTopology> {
        let opens = match direction {
            Direction::Up => self.upset_masks()?,
            Direction::Down => self.downset_masks()?,
        };
        FiniteTopology::from_masks(self.labels.clone(), opens)
    }

    /// Checks that `↓` is an order embedding and that membership in every
    /// downset `A` is equivalent to `↓x ⊆ A`.
    pub fn yoneda_check(&self) -> Result<bool> {
        self.guard()?;
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                if self.leq(i, j) != is_subset(self.down_mask(i), self.down_mask(j)) {
                    return Ok(false);
                }
            }
        }
        for a in self.downset_masks()? {
            for i in 0..n {
                if (a & bit(i) != 0) != is_subset(self.down_mask(i), a) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Whether `f` (given by labels) is order preserving from `self` to `target`.
    pub fn is_monotone(&self, target: &FinitePoset, f: &BTreeMap<String, String>) -> Result<bool> {
        let image = self.index_map(target, f)?;
        Ok(self.is_monotone_indices(target, &image))
    }

    pub fn is_monotone_indices(&self, target: &FinitePoset, image: &[usize]) -> bool {
        self.monotonicity_violation(target, image).is_none()
    }

    pub fn monotonicity_violation(&self, target: &FinitePoset, image: &[usize]) -> Option<(usize, usize)> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                if self.leq(i, j) && !target.leq(image[i], image[j]) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Converts a label mapping into an index vector, rejecting partial maps.
    pub fn index_map(&self, target: &FinitePoset, f: &BTreeMap<String, String>) -> Result<Vec<usize>> {
        self.labels
            .iter()
            .map(|l| {
                let v = f.get(l).ok_or_else(|| Error::NonTotalMapping(l.clone()))?;
                target.index_of(v)
            })
            .collect()
    }

    pub fn label_map(&self, target: &FinitePoset, image: &[usize]) -> BTreeMap<String, String> {
        self.labels
            .iter()
            .zip(image)
            .map(|(l, &j)| (l.clone(), target.labels[j].clone()))
            .collect()
    }

    pub fn upper_bounds(&self, set: &[usize]) -> Vec<usize> {
        (0..self.len()).filter(|&u| set.iter().all(|&s| self.leq(s, u))).collect()
    }

    pub fn lower_bounds(&self, set: &[usize]) -> Vec<usize> {
        (0..self.len()).filter(|&l| set.iter().all(|&s| self.leq(l, s))).collect()
    }

    /// Least upper bound, if one exists. The empty join is the bottom.
    pub fn join(&self, set: &[usize]) -> Option<usize> {
        let ub = self.upper_bounds(set);
        ub.iter().copied().find(|&u| ub.iter().all(|&v| self.leq(u, v)))
    }

    pub fn meet(&self, set: &[usize]) -> Option<usize> {
        let lb = self.lower_bounds(set);
        lb.iter().copied().find(|&l| lb.iter().all(|&v| self.leq(v, l)))
    }

    pub fn bottom(&self) -> Option<usize> {
        self.join(&[])
    }

    pub fn top(&self) -> Option<usize> {
        self.meet(&[])
    }

    /// Every pair has a join and a meet, and the poset is nonempty.
    pub fn is_lattice(&self) -> bool {
        let n = self.len();
        n > 0
            && (0..n).all(|i| {
                (i..n).all(|j| self.join(&[i, j]).is_some() && self.meet(&[i, j]).is_some())
            })
    }
}

/// The power set of `points` ordered by inclusion, together with the mask
/// (over the sorted points) that each lattice element stands for.
pub fn powerset_lattice<S: AsRef<str>>(points: &[S]) -> Result<(FinitePoset, Vec<Mask>)> {
    let pts: BTreeSet<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
    let pts: Vec<String> = pts.into_iter().collect();
    if pts.len() > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            what: "power set",
            size: pts.len(),
            limit: ENUMERATION_LIMIT,
        });
    }
    let masks: Vec<Mask> = (0..1u64 << pts.len()).collect();
    let labels: Vec<String> = masks.iter().map(|&m| set_label(&mask_labels_of(&pts, m))).collect();
    let poset = FinitePoset::from_relation(labels, |i, j| is_subset(masks[i], masks[j]))?;
    let by_label: Vec<Mask> = poset
        .labels()
        .iter()
        .map(|l| {
            let names: BTreeSet<String> = l
                .trim_matches(|c| c == '{' || c == '}')
                .split(',')
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect();
            names
                .iter()
                .map(|n| bit(pts.binary_search(n).expect("label built from points")))
                .fold(0, |a, b| a | b)
        })
        .collect();
    Ok((poset, by_label))
}

fn lookup(index: &BTreeMap<String, usize>, label: &str) -> Result<usize> {
    index
        .get(label)
        .copied()
        .ok_or_else(|| Error::UnknownElement(label.to_string()))
}

/// `{a,b,c}` style label for a set of labels.
pub fn set_label(set: &BTreeSet<String>) -> String {
    let items: Vec<&str> = set.iter().map(String::as_str).collect();
    format!("{{{}}}", items.join(","))
}

/// A finite topology on labelled points. Opens are bitmasks over the sorted
/// points and are kept sorted by size, then numerically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTopology {
    points: Vec<String>,
    opens: Vec<Mask>,
}

impl FiniteTopology {
    pub fn new<S: AsRef<str>>(points: &[S], opens: &[Vec<S>]) -> Result<Self> {
        let pts: BTreeSet<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
        let pts: Vec<String> = pts.into_iter().collect();
        let index: BTreeMap<&str, usize> =
            pts.iter().enumerate().map(|(i, p)| (p.as_str(), i)).collect();
        let mut masks = Vec::new();
        for open in opens {
            let mut m = 0;
            for p in open {
                let i = index
                    .get(p.as_ref())
                    .ok_or_else(|| Error::UnknownElement(p.as_ref().to_string()))?;
                m |= bit(*i);
            }
            masks.push(m);
        }
        Self::from_masks(pts, masks)
    }

    /// `points` must be sorted and distinct.
    pub fn from_masks(points: Vec<String>, opens: Vec<Mask>) -> Result<Self> {
        if points.len() > MAX_POINTS {
            return Err(Error::TooLarge {
                what: "topology",
                size: points.len(),
                limit: MAX_POINTS,
            });
        }
        let full = full_mask(points.len());
        let mut set: BTreeSet<Mask> = opens.into_iter().collect();
        if let Some(bad) = set.iter().find(|&&m| !is_subset(m, full)) {
            return Err(Error::InvalidTopology(format!("open {bad:#b} has unknown points")));
        }
        if !set.contains(&0) {
            return Err(Error::InvalidTopology("the empty set is not open".into()));
        }
        if !set.contains(&full) {
            return Err(Error::InvalidTopology("the whole space is not open".into()));
        }
        let list: Vec<Mask> = set.iter().copied().collect();
        for &a in &list {
            for &b in &list {
                let name = |m: Mask| set_label(&mask_labels_of(&points, m));
                if !set.contains(&(a | b)) {
                    return Err(Error::InvalidTopology(format!(
                        "union of {} and {} is not open",
                        name(a),
                        name(b)
                    )));
                }
                if !set.contains(&(a & b)) {
                    return Err(Error::InvalidTopology(format!(
                        "intersection of {} and {} is not open",
                        name(a),
                        name(b)
                    )));
                }
            }
        }
        set.insert(0);
        let mut opens: Vec<Mask> = set.into_iter().collect();
        opens.sort_by_key(|&m| (m.count_ones(), m));
        Ok(FiniteTopology { points, opens })
    }

    pub fn discrete<S: AsRef<str>>(points: &[S]) -> Result<Self> {
        let pts: BTreeSet<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
        let n = pts.len();
        if n > ENUMERATION_LIMIT {
            return Err(Error::TooLarge {
                what: "discrete topology",
                size: n,
                limit: ENUMERATION_LIMIT,
            });
        }
        Self::from_masks(pts.into_iter().collect(), (0..1u64 << n).collect())
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn opens(&self) -> &[Mask] {
        &self.opens
    }

    pub fn full(&self) -> Mask {
        full_mask(self.points.len())
    }

    pub fn is_open(&self, m: Mask) -> bool {
        self.opens.binary_search_by_key(&(m.count_ones(), m), |&o| (o.count_ones(), o)).is_ok()
    }

    pub fn point_index(&self, p: &str) -> Result<usize> {
        self.points
            .binary_search_by(|q| q.as_str().cmp(p))
            .map_err(|_| Error::UnknownElement(p.to_string()))
    }

    pub fn mask_of<S: AsRef<str>>(&self, pts: &[S]) -> Result<Mask> {
        pts.iter()
            .try_fold(0, |m, p| Ok(m | bit(self.point_index(p.as_ref())?)))
    }

    pub fn labels(&self, m: Mask) -> BTreeSet<String> {
        mask_labels_of(&self.points, m)
    }

    /// Intersection of every open containing `p`; open because the topology
    /// is finite.
    pub fn minimal_open(&self, p: &str) -> Result<Mask> {
        let i = self.point_index(p)?;
        let m = self
            .opens
            .iter()
            .filter(|&&o| o & bit(i) != 0)
            .fold(self.full(), |acc, &o| acc & o);
        if self.is_open(m) {
            Ok(m)
        } else {
            Err(Error::NoMinimalOpen(p.to_string()))
        }
    }

    /// The specialization preorder `x ≤ y` iff every open containing `x`
    /// contains `y`; a partial order for T0 spaces.
    pub fn specialization(&self) -> Result<FinitePoset> {
        let minimal: Vec<Mask> = self
            .points
            .iter()
            .map(|p| self.minimal_open(p))
            .collect::<Result<_>>()?;
        FinitePoset::from_relation(self.points.clone(), |i, j| minimal[i] & bit(j) != 0)
    }
}

pub fn full_mask(n: usize) -> Mask {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn mask_labels_of(points: &[String], m: Mask) -> BTreeSet<String> {
    mask_members(m)
        .filter(|&i| i < points.len())
        .map(|i| points[i].clone())
        .collect()
}
