//! Cellular sheaves and cosheaves of rational vector spaces.
//!
//! Restriction matrices are stored only for covering attachments `σ ⇝ τ`
//! (`dim τ = dim σ + 1`). For a sheaf the matrix maps `F(σ) → F(τ)`; for a
//! cosheaf it maps `F(τ) → F(σ)`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::{is_sublist, Face, SimplicialComplex};
use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational, RationalMatrix, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Sheaf,
    Cosheaf,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellularSheaf {
    base: SimplicialComplex,
    stalks: BTreeMap<Face, usize>,
    maps: BTreeMap<(Face, Face), RationalMatrix>,
    variance: Variance,
}

/// Values on some faces, keyed by face name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub values: BTreeMap<String, Vector>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, face: &str, values: Vector) -> Self {
        self.values.insert(face.to_string(), values);
        self
    }

    pub fn get(&self, face: &str) -> Option<&Vector> {
        self.values.get(face)
    }

    /// Values rendered as rational strings.
    pub fn to_strings(&self) -> BTreeMap<String, Vec<String>> {
        self.values
            .iter()
            .map(|(k, v)| (k.clone(), v.iter().map(format_rational).collect()))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathViolation {
    pub from: String,
    pub to: String,
    pub via: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SheafReport {
    pub valid: bool,
    pub violation: Option<PathViolation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AttachmentViolation {
    pub from: String,
    pub to: String,
    pub expected: Vec<String>,
    pub found: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionReport {
    pub is_section: bool,
    pub violations: Vec<AttachmentViolation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObstructionKind {
    /// A single attachment constraint admits no value at the face.
    NoConsistentValue,
    /// Each constraint alone is satisfiable but together they disagree.
    ConflictingValues,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extension {
    Extended(Assignment),
    Obstructed {
        obstruction: String,
        kind: ObstructionKind,
        /// Faces whose values were forced before the obstruction was met.
        determined: Assignment,
        detail: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionSpace {
    pub dimension: usize,
    pub basis: Vec<Assignment>,
}

/// A face map `X → Y` between complexes, sending faces to faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellMap {
    pub domain: SimplicialComplex,
    pub codomain: SimplicialComplex,
    pub faces: BTreeMap<Face, Face>,
}

impl CellMap {
    /// The simplicial map induced by a vertex map; faces go to the set of
    /// image vertices.
    pub fn from_vertex_map(
        domain: &SimplicialComplex,
        codomain: &SimplicialComplex,
        vertex_map: &BTreeMap<String, String>,
    ) -> Result<Self> {
        let mut images = Vec::new();
        for v in domain.vertices() {
            let w = vertex_map
                .get(v)
                .ok_or_else(|| Error::NonTotalMapping(v.clone()))?;
            let i = codomain
                .vertices()
                .iter()
                .position(|x| x == w)
                .ok_or_else(|| Error::UnknownElement(w.clone()))?;
            images.push(i);
        }
        let mut faces = BTreeMap::new();
        for f in domain.all_faces() {
            let img: BTreeSet<usize> = f.iter().map(|&v| images[v]).collect();
            let img: Face = img.into_iter().collect();
            if !codomain.contains(&img) {
                return Err(Error::UnknownFace(codomain.face_name(&img)));
            }
            faces.insert(f.clone(), img);
        }
        Self::new(domain.clone(), codomain.clone(), faces)
    }

    pub fn new(domain: SimplicialComplex, codomain: SimplicialComplex, faces: BTreeMap<Face, Face>) -> Result<Self> {
        for f in domain.all_faces() {
            let img = faces
                .get(f)
                .ok_or_else(|| Error::NonTotalMapping(domain.face_name(f)))?;
            if !codomain.contains(img) {
                return Err(Error::UnknownFace(codomain.face_name(img)));
            }
        }
        for s in domain.all_faces() {
            for t in domain.all_faces() {
                if is_sublist(s, t) && !is_sublist(&faces[s], &faces[t]) {
                    return Err(Error::NotMonotone(domain.face_name(s), domain.face_name(t)));
                }
            }
        }
        Ok(CellMap { domain, codomain, faces })
    }

    pub fn identity(c: &SimplicialComplex) -> Self {
        let faces = c.all_faces().map(|f| (f.clone(), f.clone())).collect();
        CellMap {
            domain: c.clone(),
            codomain: c.clone(),
            faces,
        }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &CellMap) -> Result<CellMap> {
        if self.codomain != next.domain {
            return Err(Error::BaseMismatch);
        }
        let faces = self.faces.iter().map(|(k, v)| (k.clone(), next.faces[v].clone())).collect();
        CellMap::new(self.domain.clone(), next.codomain.clone(), faces)
    }
}

/// Linear maps `l_σ: F(f(σ)) → G(σ)` for a face map `f: X → Y`, with `F`
/// over `Y` and `G` over `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheafMorphism {
    pub source: CellularSheaf,
    pub target: CellularSheaf,
    pub cell_map: CellMap,
    pub components: BTreeMap<Face, RationalMatrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorphismReport {
    pub holds: bool,
    pub failing_square: Option<(String, String)>,
    pub sections_preserved: bool,
}

impl CellularSheaf {
    /// Every face needs a stalk dimension. Every covering attachment needs a
    /// matrix unless one of its stalks is zero-dimensional.
    pub fn new(
        base: SimplicialComplex,
        stalks: BTreeMap<Face, usize>,
        mut maps: BTreeMap<(Face, Face), RationalMatrix>,
        variance: Variance,
    ) -> Result<Self> {
        for f in base.all_faces() {
            if !stalks.contains_key(f) {
                return Err(Error::InvalidSheaf(format!("no stalk dimension for {}", base.face_name(f))));
            }
        }
        if let Some(f) = stalks.keys().find(|f| !base.contains(f)) {
            return Err(Error::UnknownFace(base.face_name(f)));
        }
        for (s, t) in maps.keys() {
            if !base.contains(s) || !base.contains(t) || t.len() != s.len() + 1 || !is_sublist(s, t) {
                return Err(Error::InvalidSheaf(format!(
                    "{} -> {} is not a covering attachment",
                    base.face_name(s),
                    base.face_name(t)
                )));
            }
        }
        for s in base.all_faces() {
            for t in base.cofaces(s) {
                let key = (s.clone(), t.clone());
                let (ds, dt) = (stalks[s], stalks[&t]);
                let shape = match variance {
                    Variance::Sheaf => (dt, ds),
                    Variance::Cosheaf => (ds, dt),
                };
                match maps.get(&key) {
                    Some(m) if m.shape() != shape => {
                        return Err(Error::dims(
                            format!("map {} -> {}", base.face_name(s), base.face_name(&t)),
                            format!("{}x{}", shape.0, shape.1),
                            format!("{}x{}", m.rows(), m.cols()),
                        ));
                    }
                    Some(_) => {}
                    None if ds == 0 || dt == 0 => {
                        maps.insert(key, RationalMatrix::zeros(shape.0, shape.1));
                    }
                    None => {
                        return Err(Error::InvalidSheaf(format!(
                            "missing map {} -> {}",
                            base.face_name(s),
                            base.face_name(&t)
                        )));
                    }
                }
            }
        }
        Ok(CellularSheaf {
            base,
            stalks,
            maps,
            variance,
        })
    }

    /// Builds a sheaf from face-name keyed data.
    pub fn from_named(
        base: SimplicialComplex,
        stalks: &BTreeMap<String, usize>,
        maps: &BTreeMap<(String, String), RationalMatrix>,
        variance: Variance,
    ) -> Result<Self> {
        let mut st = BTreeMap::new();
        for (name, &d) in stalks {
            st.insert(base.parse_face(name)?, d);
        }
        let mut mp = BTreeMap::new();
        for ((s, t), m) in maps {
            mp.insert((base.parse_face(s)?, base.parse_face(t)?), m.clone());
        }
        Self::new(base, st, mp, variance)
    }

    /// The constant sheaf `ℚ^dim` with identity maps.
    pub fn constant(base: &SimplicialComplex, dim: usize) -> Self {
        let stalks = base.all_faces().map(|f| (f.clone(), dim)).collect();
        let mut maps = BTreeMap::new();
        for s in base.all_faces() {
            for t in base.cofaces(s) {
                maps.insert((s.clone(), t), RationalMatrix::identity(dim));
            }
        }
        CellularSheaf {
            base: base.clone(),
            stalks,
            maps,
            variance: Variance::Sheaf,
        }
    }

    pub fn zero(base: &SimplicialComplex) -> Self {
        Self::constant(base, 0)
    }

    pub fn base(&self) -> &SimplicialComplex {
        &self.base
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn stalk_dim(&self, face: &[usize]) -> usize {
        self.stalks.get(face).copied().unwrap_or(0)
    }

    pub fn stalks(&self) -> &BTreeMap<Face, usize> {
        &self.stalks
    }

    pub fn maps(&self) -> &BTreeMap<(Face, Face), RationalMatrix> {
        &self.maps
    }

    /// The stored matrix for a covering attachment `σ ⇝ τ`.
    pub fn map(&self, sigma: &[usize], tau: &[usize]) -> Option<&RationalMatrix> {
        self.maps.get(&(sigma.to_vec(), tau.to_vec()))
    }

    pub fn map_named(&self, sigma: &str, tau: &str) -> Result<&RationalMatrix> {
        let (s, t) = (self.base.parse_face(sigma)?, self.base.parse_face(tau)?);
        self.map(&s, &t)
            .ok_or_else(|| Error::InvalidSheaf(format!("{sigma} -> {tau} is not a covering attachment")))
    }

    /// The composite along some chain of covering attachments from `σ` up to
    /// `τ`. Path independence makes the choice irrelevant on valid sheaves.
    pub fn restriction(&self, sigma: &[usize], tau: &[usize]) -> Result<RationalMatrix> {
        if !is_sublist(sigma, tau) || !self.base.contains(sigma) || !self.base.contains(tau) {
            return Err(Error::InvalidSheaf(format!(
                "{} is not a face of {}",
                self.base.face_name(sigma),
                self.base.face_name(tau)
            )));
        }
        let mut current = sigma.to_vec();
        let mut acc = RationalMatrix::identity(self.stalk_dim(sigma));
        while current.len() < tau.len() {
            let next_vertex = *tau.iter().find(|v| !current.contains(v)).expect("tau is larger");
            let mut next = current.clone();
            next.push(next_vertex);
            next.sort();
            let m = &self.maps[&(current.clone(), next.clone())];
            acc = match self.variance {
                Variance::Sheaf => m.matmul(&acc)?,
                Variance::Cosheaf => acc.matmul(m)?,
            };
            current = next;
        }
        Ok(acc)
    }

    /// Checks path independence on every pair of faces two dimensions apart.
    pub fn validate(&self) -> SheafReport {
        for rho in self.base.all_faces() {
            for mid in self.base.cofaces(rho) {
                for tau in self.base.cofaces(&mid) {
                    let others: Vec<Face> = self
                        .base
                        .facets(&tau)
                        .into_iter()
                        .filter(|f| is_sublist(rho, f) && f != &mid)
                        .collect();
                    for other in others {
                        let a = self.two_step(rho, &mid, &tau);
                        let b = self.two_step(rho, &other, &tau);
                        if a != b {
                            let mut via = [self.base.face_name(&mid), self.base.face_name(&other)];
                            via.sort();
                            return SheafReport {
                                valid: false,
                                violation: Some(PathViolation {
                                    from: self.base.face_name(rho),
                                    to: self.base.face_name(&tau),
                                    via,
                                }),
                            };
                        }
                    }
                }
            }
        }
        SheafReport {
            valid: true,
            violation: None,
        }
    }

    fn two_step(&self, rho: &[usize], mid: &[usize], tau: &[usize]) -> RationalMatrix {
        let first = &self.maps[&(rho.to_vec(), mid.to_vec())];
        let second = &self.maps[&(mid.to_vec(), tau.to_vec())];
        match self.variance {
            Variance::Sheaf => second.matmul(first),
            Variance::Cosheaf => first.matmul(second),
        }
        .expect("shapes checked at construction")
    }

    /// The cosheaf with the same stalks and transposed maps.
    pub fn transpose(&self) -> CellularSheaf {
        CellularSheaf {
            base: self.base.clone(),
            stalks: self.stalks.clone(),
            maps: self.maps.iter().map(|(k, m)| (k.clone(), m.transpose())).collect(),
            variance: match self.variance {
                Variance::Sheaf => Variance::Cosheaf,
                Variance::Cosheaf => Variance::Sheaf,
            },
        }
    }

    fn check_assignment(&self, a: &Assignment, total: bool) -> Result<BTreeMap<Face, Vector>> {
        let mut out = BTreeMap::new();
        for (name, v) in &a.values {
            let f = self.base.parse_face(name)?;
            if v.len() != self.stalk_dim(&f) {
                return Err(Error::dims(format!("value at {name}"), self.stalk_dim(&f), v.len()));
            }
            out.insert(f, v.clone());
        }
        if total {
            if let Some(f) = self.base.all_faces().find(|f| !out.contains_key(*f)) {
                return Err(Error::InvalidSeed(format!("no value at {}", self.base.face_name(f))));
            }
        }
        Ok(out)
    }

    /// Lists every covering attachment whose equation fails.
    pub fn is_global_section(&self, a: &Assignment) -> Result<SectionReport> {
        let values = self.check_assignment(a, true)?;
        let mut violations = Vec::new();
        for ((s, t), m) in &self.maps {
            let (src, dst) = match self.variance {
                Variance::Sheaf => (s, t),
                Variance::Cosheaf => (t, s),
            };
            let expected = m.apply(&values[src])?;
            if expected != values[dst] {
                violations.push(AttachmentViolation {
                    from: self.base.face_name(src),
                    to: self.base.face_name(dst),
                    expected: expected.iter().map(format_rational).collect(),
                    found: values[dst].iter().map(format_rational).collect(),
                });
            }
        }
        Ok(SectionReport {
            is_section: violations.is_empty(),
            violations,
        })
    }

    /// Coordinate offsets of every face in the global layout.
    fn layout(&self) -> (BTreeMap<Face, usize>, usize) {
        let mut offsets = BTreeMap::new();
        let mut total = 0;
        for f in self.base.all_faces() {
            offsets.insert(f.clone(), total);
            total += self.stalk_dim(f);
        }
        (offsets, total)
    }

    /// Rows `x_dst - M x_src = 0` for the attachment `(s, t)`.
    fn attachment_rows(&self, s: &[usize], t: &[usize], offsets: &BTreeMap<Face, usize>, total: usize) -> Vec<Vector> {
        let m = &self.maps[&(s.to_vec(), t.to_vec())];
        let (src, dst) = match self.variance {
            Variance::Sheaf => (s, t),
            Variance::Cosheaf => (t, s),
        };
        let (os, od) = (offsets[src], offsets[dst]);
        (0..m.rows())
            .map(|r| {
                let mut row = vec![Rational::zero(); total + 1];
                row[od + r] = Rational::one();
                for c in 0..m.cols() {
                    row[os + c] -= m.get(r, c);
                }
                row
            })
            .collect()
    }

    /// Every section equation over all faces, as an augmented matrix.
    fn full_system(&self) -> (RationalMatrix, usize) {
        let (offsets, total) = self.layout();
        let mut rows = Vec::new();
        for (s, t) in self.maps.keys() {
            rows.extend(self.attachment_rows(s, t, &offsets, total));
        }
        let m = RationalMatrix::from_rows(rows, total + 1).expect("rows built with uniform width");
        (m, total)
    }

    fn assignment_from(&self, x: &[Rational], faces: &[Face], offsets: &BTreeMap<Face, usize>) -> Assignment {
        let mut a = Assignment::new();
        for f in faces {
            let o = offsets[f];
            a.values
                .insert(self.base.face_name(f), x[o..o + self.stalk_dim(f)].to_vec());
        }
        a
    }

    /// Basis of the space of global sections, computed from every attachment
    /// equation at once.
    pub fn global_section_space(&self) -> SectionSpace {
        let (offsets, total) = self.layout();
        let (system, _) = self.full_system();
        let coeffs = drop_last_column(&system, total);
        let kernel = coeffs.decompose().kernel_basis;
        let faces: Vec<Face> = self.base.all_faces().cloned().collect();
        SectionSpace {
            dimension: kernel.len(),
            basis: kernel.iter().map(|k| self.assignment_from(k, &faces, &offsets)).collect(),
        }
    }

    /// Propagates `seed` breadth-first over covering attachments. Each newly
    /// visited face adds its equations with already visited faces; the first
    /// face that makes the accumulated system infeasible is the obstruction.
    pub fn extend(&self, seed: &Assignment) -> Result<Extension> {
        let seed_values = self.check_assignment(seed, false)?;
        let (offsets, total) = self.layout();
        let faces: Vec<Face> = self.base.all_faces().cloned().collect();
        let mut neighbours: BTreeMap<Face, Vec<Face>> = BTreeMap::new();
        for (s, t) in self.maps.keys() {
            neighbours.entry(s.clone()).or_default().push(t.clone());
            neighbours.entry(t.clone()).or_default().push(s.clone());
        }
        let order_key = |f: &Face| (f.len(), f.clone());
        for list in neighbours.values_mut() {
            list.sort_by_key(order_key);
        }

        let mut visited: Vec<Face> = Vec::new();
        let mut is_visited: BTreeSet<Face> = BTreeSet::new();
        let mut queued: BTreeSet<Face> = BTreeSet::new();
        let mut queue: VecDeque<Face> = VecDeque::new();
        let mut starts: Vec<Face> = seed_values.keys().cloned().collect();
        starts.sort_by_key(order_key);
        for f in starts {
            queued.insert(f.clone());
            queue.push_back(f);
        }
        let mut rows: Vec<Vector> = Vec::new();

        loop {
            let next = match queue.pop_front() {
                Some(f) => f,
                None => match faces.iter().find(|f| !queued.contains(*f)) {
                    Some(f) => {
                        queued.insert(f.clone());
                        f.clone()
                    }
                    None => break,
                },
            };
            let mut blocks: Vec<Vec<Vector>> = Vec::new();
            if let Some(v) = seed_values.get(&next) {
                let o = offsets[&next];
                blocks.push(
                    v.iter()
                        .enumerate()
                        .map(|(i, val)| {
                            let mut row = vec![Rational::zero(); total + 1];
                            row[o + i] = Rational::one();
                            row[total] = val.clone();
                            row
                        })
                        .collect(),
                );
            }
            for nb in neighbours.get(&next).into_iter().flatten() {
                if is_visited.contains(nb) {
                    let (s, t) = if nb.len() < next.len() { (nb, &next) } else { (&next, nb) };
                    blocks.push(self.attachment_rows(s, t, &offsets, total));
                }
            }
            let mut candidate = rows.clone();
            for b in &blocks {
                candidate.extend(b.iter().cloned());
            }
            if !feasible(&candidate, total) {
                let single = blocks.iter().any(|b| {
                    let mut trial = rows.clone();
                    trial.extend(b.iter().cloned());
                    !feasible(&trial, total)
                });
                let determined = self.determined(&rows, total, &visited, &offsets);
                let kind = if single {
                    ObstructionKind::NoConsistentValue
                } else {
                    ObstructionKind::ConflictingValues
                };
                let name = self.base.face_name(&next);
                let detail = match kind {
                    ObstructionKind::NoConsistentValue => {
                        format!("no value at {name} satisfies a constraint from an already determined neighbour")
                    }
                    ObstructionKind::ConflictingValues => {
                        format!("constraints meeting at {name} are individually satisfiable but disagree")
                    }
                };
                return Ok(Extension::Obstructed {
                    obstruction: name,
                    kind,
                    determined,
                    detail,
                });
            }
            rows = candidate;
            visited.push(next.clone());
            is_visited.insert(next.clone());
            for nb in neighbours.get(&next).into_iter().flatten() {
                if queued.insert(nb.clone()) {
                    queue.push_back(nb.clone());
                }
            }
        }

        let system = RationalMatrix::from_rows(rows, total + 1)?;
        let coeffs = drop_last_column(&system, total);
        let rhs: Vector = (0..system.rows()).map(|r| system.get(r, total).clone()).collect();
        let x = coeffs
            .solve(&rhs)?
            .expect("every face was admitted while the system stayed feasible");
        Ok(Extension::Extended(self.assignment_from(&x, &faces, &offsets)))
    }

    /// Values of visited faces that every solution of `rows` shares.
    fn determined(&self, rows: &[Vector], total: usize, visited: &[Face], offsets: &BTreeMap<Face, usize>) -> Assignment {
        let system = RationalMatrix::from_rows(rows.to_vec(), total + 1).expect("uniform rows");
        let coeffs = drop_last_column(&system, total);
        let rhs: Vector = (0..system.rows()).map(|r| system.get(r, total).clone()).collect();
        let Some(x) = coeffs.solve(&rhs).expect("shapes agree") else {
            return Assignment::new();
        };
        let kernel = coeffs.decompose().kernel_basis;
        let fixed = |i: usize| kernel.iter().all(|k| k[i].is_zero());
        let mut out = Assignment::new();
        for f in visited {
            let o = offsets[f];
            let d = self.stalk_dim(f);
            if (o..o + d).all(fixed) {
                out.values.insert(self.base.face_name(f), x[o..o + d].to_vec());
            }
        }
        out
    }

    /// Stalks add and maps become block diagonal.
    pub fn direct_sum(&self, other: &CellularSheaf) -> Result<CellularSheaf> {
        if self.base != other.base || self.variance != other.variance {
            return Err(Error::BaseMismatch);
        }
        let stalks = self
            .stalks
            .iter()
            .map(|(f, d)| (f.clone(), d + other.stalk_dim(f)))
            .collect();
        let maps = self
            .maps
            .iter()
            .map(|(k, m)| (k.clone(), m.direct_sum(&other.maps[k])))
            .collect();
        CellularSheaf::new(self.base.clone(), stalks, maps, self.variance)
    }

    /// `(f*F)(γ) = F(f(γ))`, with maps re-indexed through `f`.
    pub fn pullback(&self, f: &CellMap) -> Result<CellularSheaf> {
        if f.codomain != self.base {
            return Err(Error::BaseMismatch);
        }
        let x = &f.domain;
        let stalks = x
            .all_faces()
            .map(|s| (s.clone(), self.stalk_dim(&f.faces[s])))
            .collect();
        let mut maps = BTreeMap::new();
        for s in x.all_faces() {
            for t in x.cofaces(s) {
                maps.insert((s.clone(), t.clone()), self.restriction(&f.faces[s], &f.faces[&t])?);
            }
        }
        CellularSheaf::new(x.clone(), stalks, maps, self.variance)
    }
}

fn drop_last_column(m: &RationalMatrix, total: usize) -> RationalMatrix {
    let rows: Vec<Vector> = (0..m.rows()).map(|r| m.row(r)[..total].to_vec()).collect();
    RationalMatrix::from_rows(rows, total).expect("uniform rows")
}

fn feasible(rows: &[Vector], total: usize) -> bool {
    if rows.is_empty() {
        return true;
    }
    let m = RationalMatrix::from_rows(rows.to_vec(), total + 1).expect("uniform rows");
    let (_, pivots) = m.rref();
    pivots.last() != Some(&total)
}

/// Checks every commuting square and that sections pull back to sections.
pub fn check_morphism(m: &SheafMorphism) -> Result<MorphismReport> {
    let f = &m.cell_map;
    if f.codomain != *m.source.base() || f.domain != *m.target.base() {
        return Err(Error::BaseMismatch);
    }
    let x = &f.domain;
    for s in x.all_faces() {
        let l = m
            .components
            .get(s)
            .ok_or_else(|| Error::NonTotalMapping(x.face_name(s)))?;
        let shape = (m.target.stalk_dim(s), m.source.stalk_dim(&f.faces[s]));
        if l.shape() != shape {
            return Err(Error::dims(
                format!("component at {}", x.face_name(s)),
                format!("{}x{}", shape.0, shape.1),
                format!("{}x{}", l.rows(), l.cols()),
            ));
        }
    }
    let mut failing = None;
    'outer: for s in x.all_faces() {
        for t in x.cofaces(s) {
            let g = &m.target.maps[&(s.clone(), t.clone())];
            let fy = m.source.restriction(&f.faces[s], &f.faces[&t])?;
            let lhs = g.matmul(&m.components[s])?;
            let rhs = m.components[&t].matmul(&fy)?;
            if lhs != rhs {
                failing = Some((x.face_name(s), x.face_name(&t)));
                break 'outer;
            }
        }
    }
    let mut preserved = true;
    for section in m.source.global_section_space().basis {
        let mut image = Assignment::new();
        for s in x.all_faces() {
            let v = &section.values[&m.source.base().face_name(&f.faces[s])];
            image.values.insert(x.face_name(s), m.components[s].apply(v)?);
        }
        if !m.target.is_global_section(&image)?.is_section {
            preserved = false;
        }
    }
    Ok(MorphismReport {
        holds: failing.is_none() && preserved,
        failing_square: failing,
        sections_preserved: preserved,
    })
}
