//! Abstract simplicial complexes, face posets, incidence and homology.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poset::FinitePoset;
use crate::rational::{int, Rational, RationalMatrix};

/// Upper bound on the number of faces a completed complex may have.
pub const FACE_LIMIT: usize = 1 << 16;

/// Whether missing subfaces are added or reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closure {
    Complete,
    Strict,
}

/// A face is the increasing list of its vertex indices.
pub type Face = Vec<usize>;

/// A downward-closed family of faces over a fixed vertex order. Faces are
/// grouped by dimension and sorted lexicographically within a dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: Vec<String>,
    by_dim: Vec<Vec<Face>>,
    position: BTreeMap<Face, (usize, usize)>,
    compact_names: bool,
}

/// A formal rational combination of `k`-faces, keyed by face name.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Chain {
    pub dim: usize,
    pub coefficients: BTreeMap<String, Rational>,
}

impl SimplicialComplex {
    /// `vertices` fixes the vertex order; every face must list its vertices in
    /// that order. Listed vertices are always 0-faces when completing.
    pub fn new<S: AsRef<str>>(vertices: &[S], faces: &[Vec<S>], mode: Closure) -> Result<Self> {
        let verts: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let mut seen = BTreeSet::new();
        for v in &verts {
            if !seen.insert(v.as_str()) {
                return Err(Error::DuplicateVertex(vec![v.clone(), v.clone()]));
            }
        }
        let index: BTreeMap<&str, usize> = verts.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut given: BTreeSet<Face> = BTreeSet::new();
        for face in faces {
            let labels: Vec<String> = face.iter().map(|v| v.as_ref().to_string()).collect();
            if labels.is_empty() {
                return Err(Error::EmptyFace);
            }
            let mut idx = Vec::with_capacity(labels.len());
            for l in &labels {
                idx.push(*index.get(l.as_str()).ok_or_else(|| Error::UnknownElement(l.clone()))?);
            }
            if idx.iter().collect::<BTreeSet<_>>().len() != idx.len() {
                return Err(Error::DuplicateVertex(labels));
            }
            if idx.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::UnsortedFace(labels));
            }
            given.insert(idx);
        }
        let mut all = given.clone();
        match mode {
            Closure::Complete => {
                for i in 0..verts.len() {
                    all.insert(vec![i]);
                }
                let implied = given.iter().fold(all.len(), |acc, f| {
                    let subs = if f.len() < 63 { 1usize << f.len() } else { usize::MAX };
                    acc.saturating_add(subs)
                });
                if implied > FACE_LIMIT {
                    return Err(Error::TooLarge {
                        what: "complex",
                        size: implied,
                        limit: FACE_LIMIT,
                    });
                }
                for face in &given {
                    for sub in subfaces(face) {
                        all.insert(sub);
                    }
                }
            }
            Closure::Strict => {
                for face in &given {
                    for sub in subfaces(face) {
                        if !given.contains(&sub) {
                            return Err(Error::MissingFace {
                                face: face.iter().map(|&i| verts[i].clone()).collect(),
                                missing: sub.iter().map(|&i| verts[i].clone()).collect(),
                            });
                        }
                    }
                }
                for (i, v) in verts.iter().enumerate() {
                    if !given.contains(&vec![i]) {
                        return Err(Error::MissingFace {
                            face: vec![v.clone()],
                            missing: vec![v.clone()],
                        });
                    }
                }
            }
        }
        Ok(Self::from_faces(verts, all))
    }

    fn from_faces(vertices: Vec<String>, faces: BTreeSet<Face>) -> Self {
        let top = faces.iter().map(Vec::len).max().unwrap_or(0);
        let mut by_dim: Vec<Vec<Face>> = vec![Vec::new(); top];
        for f in faces {
            by_dim[f.len() - 1].push(f);
        }
        let mut position = BTreeMap::new();
        for (k, list) in by_dim.iter().enumerate() {
            for (i, f) in list.iter().enumerate() {
                position.insert(f.clone(), (k, i));
            }
        }
        let compact_names = vertices.iter().all(|v| v.chars().count() == 1);
        SimplicialComplex {
            vertices,
            by_dim,
            position,
            compact_names,
        }
    }

    /// The full simplex on `vertices`.
    pub fn simplex<S: AsRef<str>>(vertices: &[S]) -> Result<Self> {
        let face: Vec<&str> = vertices.iter().map(AsRef::as_ref).collect();
        Self::new(&face, &[face.clone()], Closure::Complete)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    /// Largest face dimension, or `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.by_dim.len().checked_sub(1)
    }

    pub fn faces(&self, k: usize) -> &[Face] {
        self.by_dim.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, k: usize) -> usize {
        self.faces(k).len()
    }

    /// All faces, by dimension and then lexicographically.
    pub fn all_faces(&self) -> impl Iterator<Item = &Face> {
        self.by_dim.iter().flatten()
    }

    pub fn face_count(&self) -> usize {
        self.position.len()
    }

    pub fn contains(&self, face: &[usize]) -> bool {
        self.position.contains_key(face)
    }

    /// Dimension and index of a face within its dimension.
    pub fn position(&self, face: &[usize]) -> Option<(usize, usize)> {
        self.position.get(face).copied()
    }

    /// Faces are named by concatenating vertex labels when every label is a
    /// single character, and by joining with `,` otherwise.
    pub fn face_name(&self, face: &[usize]) -> String {
        let labels: Vec<&str> = face.iter().map(|&i| self.vertices[i].as_str()).collect();
        if self.compact_names {
            labels.concat()
        } else {
            labels.join(",")
        }
    }

    pub fn face_labels(&self, face: &[usize]) -> Vec<String> {
        face.iter().map(|&i| self.vertices[i].clone()).collect()
    }

    pub fn parse_face(&self, name: &str) -> Result<Face> {
        let labels: Vec<String> = if self.compact_names {
            name.chars().map(String::from).collect()
        } else {
            name.split(',').map(str::to_string).collect()
        };
        self.face_from_labels(&labels)
            .map_err(|_| Error::UnknownFace(name.to_string()))
    }

    pub fn face_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Face> {
        let mut face = Vec::with_capacity(labels.len());
        for l in labels {
            let i = self
                .vertices
                .iter()
                .position(|v| v == l.as_ref())
                .ok_or_else(|| Error::UnknownElement(l.as_ref().to_string()))?;
            face.push(i);
        }
        let names: Vec<String> = labels.iter().map(|l| l.as_ref().to_string()).collect();
        if face.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::UnsortedFace(names));
        }
        if !self.contains(&face) {
            return Err(Error::UnknownFace(names.concat()));
        }
        Ok(face)
    }

    /// Faces of dimension one more that contain `face`.
    pub fn cofaces(&self, face: &[usize]) -> Vec<Face> {
        self.faces(face.len())
            .iter()
            .filter(|t| is_sublist(face, t))
            .cloned()
            .collect()
    }

    /// Faces of dimension one less contained in `face`.
    pub fn facets(&self, face: &[usize]) -> Vec<Face> {
        if face.len() <= 1 {
            return Vec::new();
        }
        let mut out = subfaces_codim1(face);
        out.sort();
        out
    }

    /// Every face containing `face`, itself included.
    pub fn open_star(&self, face: &[usize]) -> Vec<Face> {
        self.all_faces().filter(|t| is_sublist(face, t)).cloned().collect()
    }

    /// Sublist inclusion as a poset on face names.
    pub fn face_poset(&self) -> Result<FinitePoset> {
        let faces: Vec<&Face> = self.all_faces().collect();
        let labels = faces.iter().map(|f| self.face_name(f)).collect();
        FinitePoset::from_relation(labels, |i, j| is_sublist(faces[i], faces[j]))
    }

    /// `[b : a]`: `(-1)^n` when `a` is `b` with its `n`-th vertex deleted, else 0.
    pub fn incidence(&self, b: &[usize], a: &[usize]) -> Result<i32> {
        if b.len() != a.len() + 1 {
            return Err(Error::dims("incidence", format!("face of dimension {}", b.len().saturating_sub(2)), a.len().saturating_sub(1)));
        }
        Ok(incidence(b, a))
    }

    /// `∂ₖ: Cₖ → Cₖ₋₁`, one column per `k`-face. `∂₀` is the map to zero.
    pub fn boundary_matrix(&self, k: usize) -> RationalMatrix {
        if k == 0 {
            return RationalMatrix::zeros(0, self.count(0));
        }
        let rows = self.faces(k - 1);
        let cols = self.faces(k);
        let mut m = RationalMatrix::zeros(rows.len(), cols.len());
        for (c, b) in cols.iter().enumerate() {
            for sub in subfaces_codim1(b) {
                let r = self.position[&sub].1;
                m.set(r, c, int(incidence(b, &sub) as i64));
            }
        }
        m
    }

    /// `dim Hₖ` over the rationals for `k = 0..=dim`.
    pub fn homology_dims(&self) -> Vec<usize> {
        let Some(top) = self.dim() else {
            return Vec::new();
        };
        (0..=top)
            .map(|k| {
                let d_k = self.boundary_matrix(k);
                let kernel = self.count(k) - d_k.rank();
                let image = self.boundary_matrix(k + 1).rank();
                kernel - image
            })
            .collect()
    }

    pub fn boundary_of(&self, chain: &Chain) -> Result<Chain> {
        let mut out = Chain {
            dim: chain.dim.saturating_sub(1),
            coefficients: BTreeMap::new(),
        };
        if chain.dim == 0 {
            return Ok(out);
        }
        for (name, coeff) in &chain.coefficients {
            let face = self.parse_face(name)?;
            if face.len() != chain.dim + 1 {
                return Err(Error::dims(format!("chain face {name}"), chain.dim, face.len() - 1));
            }
            for sub in subfaces_codim1(&face) {
                let sign = int(incidence(&face, &sub) as i64);
                let entry = out.coefficients.entry(self.face_name(&sub)).or_insert_with(Rational::zero);
                *entry += coeff * sign;
            }
        }
        out.coefficients.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    /// Restriction to the faces satisfying `keep`, which must be downward closed.
    pub fn subcomplex(&self, keep: impl Fn(&[usize]) -> bool) -> Result<SimplicialComplex> {
        let faces: BTreeSet<Face> = self.all_faces().filter(|f| keep(f)).cloned().collect();
        for f in &faces {
            for sub in subfaces(f) {
                if !faces.contains(&sub) {
                    return Err(Error::MissingFace {
                        face: self.face_labels(f),
                        missing: self.face_labels(&sub),
                    });
                }
            }
        }
        Ok(Self::from_faces(self.vertices.clone(), faces))
    }

    /// Number of connected components of the 1-skeleton.
    pub fn components(&self) -> usize {
        let n = self.count(0);
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let vertex_pos = |v: usize| self.position[&vec![v]].1;
        for e in self.faces(1) {
            let a = find(&mut parent, vertex_pos(e[0]));
            let b = find(&mut parent, vertex_pos(e[1]));
            parent[a] = b;
        }
        (0..n).filter(|&i| find(&mut parent, i) == i).count()
    }
}

fn incidence(b: &[usize], a: &[usize]) -> i32 {
    for n in 0..b.len() {
        let mut deleted = b.to_vec();
        deleted.remove(n);
        if deleted == a {
            return if n % 2 == 0 { 1 } else { -1 };
        }
    }
    0
}

fn subfaces_codim1(face: &[usize]) -> Vec<Face> {
    if face.len() <= 1 {
        return Vec::new();
    }
    (0..face.len())
        .map(|n| {
            let mut f = face.to_vec();
            f.remove(n);
            f
        })
        .collect()
}

/// All nonempty proper sublists.
fn subfaces(face: &[usize]) -> Vec<Face> {
    let n = face.len();
    (1..(1u64 << n) - 1)
        .map(|m| (0..n).filter(|&i| m & (1 << i) != 0).map(|i| face[i]).collect())
        .collect()
}

pub fn is_sublist(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn running() -> SimplicialComplex {
        let faces: Vec<Vec<&str>> = ["ab", "ac", "ad", "bc", "bd", "cd", "ce", "de", "ef", "cde"]
            .iter()
            .map(|f| f.split("").filter(|s| !s.is_empty()).collect())
            .collect();
        SimplicialComplex::new(&["a", "b", "c", "d", "e", "f"], &faces, Closure::Complete).unwrap()
    }

    fn names(c: &SimplicialComplex, faces: &[Face]) -> Vec<String> {
        faces.iter().map(|f| c.face_name(f)).collect()
    }

    #[test]
    fn closure_completion() {
        let c = SimplicialComplex::simplex(&["a", "b", "c"]).unwrap();
        assert_eq!(c.face_count(), 7);
        assert_eq!(names(&c, c.faces(1)), vec!["ab", "ac", "bc"]);
        let strict = SimplicialComplex::new(&["a", "b"], &[vec!["a", "b"], vec!["b"]], Closure::Strict);
        assert_eq!(
            strict,
            Err(Error::MissingFace {
                face: vec!["a".into(), "b".into()],
                missing: vec!["a".into()]
            })
        );
        assert_eq!(
            SimplicialComplex::new(&["a"], &[vec![]], Closure::Complete),
            Err(Error::EmptyFace)
        );
        assert!(matches!(
            SimplicialComplex::new(&["a", "b"], &[vec!["a", "a"]], Closure::Complete),
            Err(Error::DuplicateVertex(_))
        ));
        assert!(matches!(
            SimplicialComplex::new(&["a", "b"], &[vec!["b", "a"]], Closure::Complete),
            Err(Error::UnsortedFace(_))
        ));
    }

    #[test]
    fn running_complex() {
        let c = running();
        assert_eq!(c.dim(), Some(2));
        assert_eq!((c.count(0), c.count(1), c.count(2)), (6, 9, 1));
        let poset = c.face_poset().unwrap();
        let up: Vec<String> = poset.principal_up("cd").unwrap().into_iter().collect();
        assert_eq!(up, vec!["cd", "cde"]);
        let star = c.open_star(&c.parse_face("c").unwrap());
        let mut star = names(&c, &star);
        star.sort();
        assert_eq!(star, vec!["ac", "bc", "c", "cd", "cde", "ce"]);
    }

    #[test]
    fn single_edge_poset() {
        let c = SimplicialComplex::simplex(&["a", "b"]).unwrap();
        let p = c.face_poset().unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.leq_labels("a", "ab").unwrap());
        assert!(!p.leq_labels("a", "b").unwrap());
    }

    #[test]
    fn incidence_signs() {
        let c = SimplicialComplex::simplex(&["a", "b", "c", "d", "e"]).unwrap();
        let f = |s: &str| c.parse_face(s).unwrap();
        assert_eq!(c.incidence(&f("abc"), &f("bc")).unwrap(), 1);
        assert_eq!(c.incidence(&f("abc"), &f("ac")).unwrap(), -1);
        assert_eq!(c.incidence(&f("abc"), &f("ab")).unwrap(), 1);
        assert_eq!(c.incidence(&f("abc"), &f("de")).unwrap(), 0);
        assert!(c.incidence(&f("abc"), &f("a")).is_err());
    }

    #[test]
    fn boundary_matrices() {
        let edge = SimplicialComplex::simplex(&["v0", "v1"]).unwrap();
        assert_eq!(edge.boundary_matrix(1), RationalMatrix::from_i64(&[&[-1], &[1]]));
        let tri = SimplicialComplex::simplex(&["a", "b", "c"]).unwrap();
        assert_eq!(tri.boundary_matrix(2), RationalMatrix::from_i64(&[&[1], &[-1], &[1]]));
        let c = running();
        assert!(c.boundary_matrix(1).matmul(&c.boundary_matrix(2)).unwrap().is_zero());
    }

    #[test]
    fn homology() {
        let edge = SimplicialComplex::simplex(&["v0", "v1"]).unwrap();
        assert_eq!(edge.homology_dims(), vec![1, 0]);
        let hollow =
            SimplicialComplex::new(&["a", "b", "c"], &[vec!["a", "b"], vec!["a", "c"], vec!["b", "c"]], Closure::Complete)
                .unwrap();
        assert_eq!(hollow.homology_dims(), vec![1, 1]);
        let two = SimplicialComplex::new::<&str>(&["x", "y"], &[], Closure::Complete).unwrap();
        assert_eq!(two.homology_dims(), vec![2]);
        assert_eq!(running().homology_dims(), vec![1, 3, 0]);
    }

    #[test]
    fn chain_boundary_squares_to_zero() {
        let c = SimplicialComplex::simplex(&["a", "b", "c"]).unwrap();
        let chain = Chain {
            dim: 2,
            coefficients: [("abc".to_string(), int(1))].into(),
        };
        let b = c.boundary_of(&chain).unwrap();
        assert_eq!(b.coefficients["ac"], int(-1));
        assert!(c.boundary_of(&b).unwrap().coefficients.is_empty());
    }
}
