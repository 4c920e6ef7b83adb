//! Monotone Galois connections on finite posets.
//!
//! Maps are stored as index vectors over the (sorted) elements of their
//! source poset. Antitone connections are expressed by passing a dualized
//! target, see [`GaloisConnection::antitone`].

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poset::FinitePoset;

/// `left ⊣ right` between `source` and `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisConnection {
    source: FinitePoset,
    target: FinitePoset,
    left: Vec<usize>,
    right: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConnectionViolation {
    /// `F(p) ≤ q` and `p ≤ G(q)` disagree.
    Biconditional {
        p: String,
        q: String,
        left_holds: bool,
        right_holds: bool,
    },
    /// `p ≰ G(F(p))`.
    Unit { p: String },
    /// `F(G(q)) ≰ q`.
    Counit { q: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectionReport {
    pub holds: bool,
    pub violation: Option<ConnectionViolation>,
}

/// An endomap on a finite poset with its order properties recorded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeEndomap {
    pub carrier: FinitePoset,
    pub map: Vec<usize>,
    pub monotone: bool,
}

impl LatticeEndomap {
    pub fn new(carrier: FinitePoset, map: Vec<usize>) -> Result<Self> {
        if map.len() != carrier.len() {
            return Err(Error::dims("endomap", carrier.len(), map.len()));
        }
        let monotone = carrier.is_monotone_indices(&carrier, &map);
        Ok(LatticeEndomap { carrier, map, monotone })
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn is_extensive(&self) -> bool {
        (0..self.map.len()).all(|i| self.carrier.leq(i, self.map[i]))
    }

    pub fn is_contractive(&self) -> bool {
        (0..self.map.len()).all(|i| self.carrier.leq(self.map[i], i))
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.map.len()).all(|i| self.map[self.map[i]] == self.map[i])
    }

    pub fn is_closure(&self) -> bool {
        self.monotone && self.is_extensive() && self.is_idempotent()
    }

    pub fn is_kernel(&self) -> bool {
        self.monotone && self.is_contractive() && self.is_idempotent()
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.map.len()).filter(|&i| self.map[i] == i).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedOperators {
    /// `G ∘ F` on the source.
    pub closure: LatticeEndomap,
    /// `F ∘ G` on the target.
    pub kernel: LatticeEndomap,
}

fn check_map(source: &FinitePoset, target: &FinitePoset, map: &[usize], what: &str) -> Result<()> {
    if map.len() != source.len() {
        return Err(Error::dims(what, source.len(), map.len()));
    }
    if let Some(&bad) = map.iter().find(|&&j| j >= target.len()) {
        return Err(Error::UnknownElement(format!("index {bad}")));
    }
    if let Some((i, j)) = source.monotonicity_violation(target, map) {
        return Err(Error::NotMonotone(source.label(i).into(), source.label(j).into()));
    }
    Ok(())
}

impl GaloisConnection {
    /// Builds the pair, rejecting partial or non-monotone maps. The adjunction
    /// itself is checked separately by [`GaloisConnection::check`].
    pub fn new(source: FinitePoset, target: FinitePoset, left: Vec<usize>, right: Vec<usize>) -> Result<Self> {
        check_map(&source, &target, &left, "left adjoint")?;
        check_map(&target, &source, &right, "right adjoint")?;
        Ok(GaloisConnection {
            source,
            target,
            left,
            right,
        })
    }

    pub fn from_fns(
        source: FinitePoset,
        target: FinitePoset,
        left: impl Fn(usize) -> usize,
        right: impl Fn(usize) -> usize,
    ) -> Result<Self> {
        let l = (0..source.len()).map(left).collect();
        let r = (0..target.len()).map(right).collect();
        Self::new(source, target, l, r)
    }

    pub fn from_labels(
        source: FinitePoset,
        target: FinitePoset,
        left: &BTreeMap<String, String>,
        right: &BTreeMap<String, String>,
    ) -> Result<Self> {
        let l = source.index_map(&target, left)?;
        let r = target.index_map(&source, right)?;
        Self::new(source, target, l, r)
    }

    /// An antitone pair `f: P → Q`, `g: Q → P` with `q ≤ f(p) ⇔ p ≤ g(q)`,
    /// represented as the monotone connection `P → Qᵒᵖ`.
    pub fn antitone(source: FinitePoset, target: FinitePoset, f: Vec<usize>, g: Vec<usize>) -> Result<Self> {
        Self::new(source, target.dual(), f, g)
    }

    pub fn source(&self) -> &FinitePoset {
        &self.source
    }

    pub fn target(&self) -> &FinitePoset {
        &self.target
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn check(&self) -> ConnectionReport {
        check_connection(self)
    }

    /// `(F′ ∘ F, G ∘ G′)` for `self = (F, G)` and `next = (F′, G′)`.
    pub fn compose(&self, next: &GaloisConnection) -> Result<GaloisConnection> {
        if self.target != next.source {
            return Err(Error::BaseMismatch);
        }
        let left = self.left.iter().map(|&q| next.left[q]).collect();
        let right = next.right.iter().map(|&q| self.right[q]).collect();
        Self::new(self.source.clone(), next.target.clone(), left, right)
    }
}

/// Scans all pairs for the two-way rule, then unit and counit.
pub fn check_connection(c: &GaloisConnection) -> ConnectionReport {
    let fail = |v| ConnectionReport {
        holds: false,
        violation: Some(v),
    };
    for p in 0..c.source.len() {
        for q in 0..c.target.len() {
            let l = c.target.leq(c.left[p], q);
            let r = c.source.leq(p, c.right[q]);
            if l != r {
                return fail(ConnectionViolation::Biconditional {
                    p: c.source.label(p).into(),
                    q: c.target.label(q).into(),
                    left_holds: l,
                    right_holds: r,
                });
            }
        }
    }
    for p in 0..c.source.len() {
        if !c.source.leq(p, c.right[c.left[p]]) {
            return fail(ConnectionViolation::Unit {
                p: c.source.label(p).into(),
            });
        }
    }
    for q in 0..c.target.len() {
        if !c.target.leq(c.left[c.right[q]], q) {
            return fail(ConnectionViolation::Counit {
                q: c.target.label(q).into(),
            });
        }
    }
    ConnectionReport {
        holds: true,
        violation: None,
    }
}

fn synthesize(source: &FinitePoset, target: &FinitePoset, f: &[usize], kind: &'static str) -> Result<Vec<usize>> {
    check_map(source, target, f, "mapping")?;
    if !source.is_lattice() {
        return Err(Error::NotALattice(format!("{} is not a lattice", describe(source))));
    }
    let names = |xs: &[usize]| xs.iter().map(|&i| source.label(i).to_string()).collect();
    let bottom = source.bottom().expect("lattices are bounded");
    if target.bottom() != Some(f[bottom]) {
        return Err(Error::NoAdjoint {
            kind,
            elements: Vec::new(),
        });
    }
    for a in 0..source.len() {
        for b in a + 1..source.len() {
            let j = source.join(&[a, b]).expect("lattice");
            if target.join(&[f[a], f[b]]) != Some(f[j]) {
                return Err(Error::NoAdjoint {
                    kind,
                    elements: names(&[a, b]),
                });
            }
        }
    }
    let g: Vec<usize> = (0..target.len())
        .map(|q| {
            let below: Vec<usize> = (0..source.len()).filter(|&p| target.leq(f[p], q)).collect();
            source.join(&below).expect("lattice joins exist")
        })
        .collect();
    Ok(g)
}

fn describe(p: &FinitePoset) -> String {
    format!("poset on {} elements", p.len())
}

/// The right adjoint `G(q) = ⋁{p | F(p) ≤ q}` of a monotone `f: source → target`,
/// or the pair of elements whose join `f` fails to preserve.
pub fn right_adjoint_of(f: &[usize], source: &FinitePoset, target: &FinitePoset) -> Result<Vec<usize>> {
    let g = synthesize(source, target, f, "joins")?;
    let c = GaloisConnection::new(source.clone(), target.clone(), f.to_vec(), g.clone())?;
    match check_connection(&c).violation {
        None => Ok(g),
        Some(v) => Err(Error::NotAConnection(format!("{v:?}"))),
    }
}

/// The left adjoint `F(p) = ⋀{q | p ≤ G(q)}` of a monotone `g: target → source`.
pub fn left_adjoint_of(g: &[usize], source: &FinitePoset, target: &FinitePoset) -> Result<Vec<usize>> {
    let (src_op, tgt_op) = (source.dual(), target.dual());
    let f = synthesize(&tgt_op, &src_op, g, "meets")?;
    let c = GaloisConnection::new(source.clone(), target.clone(), f.clone(), g.to_vec())?;
    match check_connection(&c).violation {
        None => Ok(f),
        Some(v) => Err(Error::NotAConnection(format!("{v:?}"))),
    }
}

/// Closure `G∘F` and kernel `F∘G`, with the fixed-point formulae
/// `FGF = F` and `GFG = G` verified pointwise.
pub fn induced_operators(c: &GaloisConnection) -> Result<InducedOperators> {
    if let Some(v) = check_connection(c).violation {
        return Err(Error::NotAConnection(format!("{v:?}")));
    }
    let closure: Vec<usize> = c.left.iter().map(|&q| c.right[q]).collect();
    let kernel: Vec<usize> = c.right.iter().map(|&p| c.left[p]).collect();
    for p in 0..c.source.len() {
        if c.left[closure[p]] != c.left[p] {
            return Err(Error::NotAConnection(format!("FGF differs from F at {}", c.source.label(p))));
        }
    }
    for q in 0..c.target.len() {
        if c.right[kernel[q]] != c.right[q] {
            return Err(Error::NotAConnection(format!("GFG differs from G at {}", c.target.label(q))));
        }
    }
    let closure = LatticeEndomap::new(c.source.clone(), closure)?;
    let kernel = LatticeEndomap::new(c.target.clone(), kernel)?;
    if !closure.is_closure() || !kernel.is_kernel() {
        return Err(Error::NotAConnection("induced operators are not closure/kernel".into()));
    }
    Ok(InducedOperators { closure, kernel })
}

/// The diagonal `g(x) = α(f(x, x))` for `f: X × X → Y`, given as rows
/// `f[x][x′]`. Fails when `α` has a fixed point. The result differs from
/// every row `f(·, x₀)` at `x₀`; this is re-checked before returning.
pub fn cantor_diagonal(f: &[Vec<usize>], alpha: &[usize]) -> Result<Vec<usize>> {
    if let Some(y) = (0..alpha.len()).find(|&y| alpha[y] == y) {
        return Err(Error::FixedPoint(y.to_string()));
    }
    let n = f.len();
    for (x, row) in f.iter().enumerate() {
        if row.len() != n {
            return Err(Error::dims(format!("row {x} of f"), n, row.len()));
        }
        if let Some(&y) = row.iter().find(|&&y| y >= alpha.len()) {
            return Err(Error::UnknownElement(y.to_string()));
        }
    }
    let g: Vec<usize> = (0..n).map(|x| alpha[f[x][x]]).collect();
    debug_assert!(represented_by(f, &g).is_none());
    if let Some(x0) = represented_by(f, &g) {
        return Err(Error::FixedPoint(format!("diagonal represented at {x0}")));
    }
    Ok(g)
}

/// The first `x₀` with `g = f(·, x₀)`, if any.
pub fn represented_by(f: &[Vec<usize>], g: &[usize]) -> Option<usize> {
    (0..f.len()).find(|&x0| (0..f.len()).all(|x| g[x] == f[x][x0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> FinitePoset {
        FinitePoset::chain(&["0", "1", "2"])
    }

    fn diamond() -> FinitePoset {
        FinitePoset::new(
            &["bot", "l", "r", "top"],
            &[("bot", "l"), ("bot", "r"), ("l", "top"), ("r", "top")],
        )
        .unwrap()
    }

    #[test]
    fn identity_connection() {
        let p = chain3();
        let id: Vec<usize> = (0..3).collect();
        let c = GaloisConnection::new(p.clone(), p.clone(), id.clone(), id.clone()).unwrap();
        assert!(c.check().holds);
        let ops = induced_operators(&c).unwrap();
        assert_eq!(ops.closure.map, id);
        assert_eq!(ops.kernel.map, id);
        assert_eq!(right_adjoint_of(&id, &p, &p).unwrap(), id);
        assert_eq!(left_adjoint_of(&id, &p, &p).unwrap(), id);
    }

    #[test]
    fn strict_successor_is_not_right_adjoint_to_identity() {
        let p = chain3();
        let c = GaloisConnection::new(p.clone(), p, vec![0, 1, 2], vec![1, 2, 2]).unwrap();
        let report = c.check();
        assert!(!report.holds);
        assert_eq!(
            report.violation,
            Some(ConnectionViolation::Biconditional {
                p: "1".into(),
                q: "0".into(),
                left_holds: false,
                right_holds: true,
            })
        );
    }

    #[test]
    fn join_breaking_map_has_no_right_adjoint() {
        let d = diamond();
        let (bot, l, r, top) = (0, 1, 2, 3);
        assert_eq!(d.label(l), "l");
        // sends l and r to themselves but top to top: preserves joins
        assert!(right_adjoint_of(&[bot, l, r, top], &d, &d).is_ok());
        // collapses l, r to bot while keeping top: l ∨ r = top but F(l) ∨ F(r) = bot
        let err = right_adjoint_of(&[bot, bot, bot, top], &d, &d).unwrap_err();
        assert_eq!(
            err,
            Error::NoAdjoint {
                kind: "joins",
                elements: vec!["l".into(), "r".into()]
            }
        );
        let err = right_adjoint_of(&[l, l, top, top], &d, &d).unwrap_err();
        assert!(matches!(err, Error::NoAdjoint { kind: "joins", .. }));
    }

    #[test]
    fn floor_style_pair_on_chains() {
        // inclusion of evens {0,2,4} into {0..4}; right adjoint rounds down
        let small = FinitePoset::chain(&["e0", "e2", "e4"]);
        let big = FinitePoset::chain(&["n0", "n1", "n2", "n3", "n4"]);
        let f = vec![0, 2, 4];
        let g = right_adjoint_of(&f, &small, &big).unwrap();
        assert_eq!(g, vec![0, 0, 1, 1, 2]);
        let c = GaloisConnection::new(small, big, f, g).unwrap();
        let ops = induced_operators(&c).unwrap();
        assert!(ops.closure.is_idempotent());
        assert!(ops.kernel.is_idempotent());
        assert_eq!(ops.kernel.map, vec![0, 0, 2, 2, 4]);
    }

    #[test]
    fn left_adjoint_by_duality() {
        let small = FinitePoset::chain(&["e0", "e2", "e4"]);
        let big = FinitePoset::chain(&["n0", "n1", "n2", "n3", "n4"]);
        let g = vec![0, 0, 1, 1, 2];
        assert_eq!(left_adjoint_of(&g, &small, &big).unwrap(), vec![0, 2, 4]);
    }

    #[test]
    fn non_monotone_rejected() {
        let p = chain3();
        let err = GaloisConnection::new(p.clone(), p, vec![2, 1, 0], vec![0, 1, 2]).unwrap_err();
        assert!(matches!(err, Error::NotMonotone(..)));
    }

    #[test]
    fn composition() {
        let small = FinitePoset::chain(&["e0", "e2", "e4"]);
        let big = FinitePoset::chain(&["n0", "n1", "n2", "n3", "n4"]);
        let a = GaloisConnection::new(small.clone(), big.clone(), vec![0, 2, 4], vec![0, 0, 1, 1, 2]).unwrap();
        let id: Vec<usize> = (0..5).collect();
        let b = GaloisConnection::new(big.clone(), big, id.clone(), id).unwrap();
        assert!(a.compose(&b).unwrap().check().holds);
    }

    #[test]
    fn antitone_pair() {
        // complement on the power set of one point is self-adjoint on the right
        let p = FinitePoset::chain(&["empty", "full"]);
        let flip = vec![1, 0];
        let c = GaloisConnection::antitone(p.clone(), p, flip.clone(), flip).unwrap();
        assert!(c.check().holds);
    }

    #[test]
    fn cantor() {
        let f = vec![vec![0, 1], vec![0, 1]];
        let g = cantor_diagonal(&f, &[1, 0]).unwrap();
        assert_eq!(g, vec![1, 0]);
        assert_eq!(represented_by(&f, &g), None);

        let f = vec![vec![0, 1, 1], vec![1, 1, 0], vec![0, 0, 0]];
        let g = cantor_diagonal(&f, &[1, 0]).unwrap();
        for x0 in 0..3 {
            assert_ne!(g[x0], f[x0][x0]);
        }
        assert_eq!(cantor_diagonal(&f, &[0, 1]), Err(Error::FixedPoint("0".into())));
    }
}
