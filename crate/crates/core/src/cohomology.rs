//! Sheaf cohomology over simplicial complexes and the paired
//! marginalization cosheaf / conditional-probability sheaf of a Bayes net.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed};
use serde::Serialize;

use crate::cellsheaf::{CellularSheaf, Variance};
use crate::complex::{Face, SimplicialComplex};
use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational, RationalMatrix, Vector};

/// One stalk's coordinate block inside a cochain group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Block {
    pub face: String,
    pub offset: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainComplex {
    /// `dim Cᵏ` for `k = 0..=dim X`.
    pub dims: Vec<usize>,
    /// `δᵏ: Cᵏ → Cᵏ⁺¹` for `k = 0..dim X`.
    pub deltas: Vec<RationalMatrix>,
    pub layout: Vec<Vec<Block>>,
}

impl CochainComplex {
    /// `δᵏ`, with the zero map out of the top degree.
    pub fn delta(&self, k: usize) -> RationalMatrix {
        match self.deltas.get(k) {
            Some(d) => d.clone(),
            None => RationalMatrix::zeros(0, self.dims.get(k).copied().unwrap_or(0)),
        }
    }

    /// Checks `δᵏ⁺¹ δᵏ = 0` for every `k`.
    pub fn squares_to_zero(&self) -> bool {
        self.deltas
            .windows(2)
            .all(|w| w[1].matmul(&w[0]).map(|m| m.is_zero()).unwrap_or(false))
    }
}

/// Builds `δᵏ` blockwise from `[b:a]·F(a ⇝ b)`.
pub fn cochain_complex(s: &CellularSheaf) -> Result<CochainComplex> {
    if s.variance() != Variance::Sheaf {
        return Err(Error::InvalidSheaf("cochains need restriction maps pointing upward".into()));
    }
    if let Some(v) = s.validate().violation {
        return Err(Error::InvalidSheaf(format!(
            "paths from {} to {} through {} and {} disagree",
            v.from, v.to, v.via[0], v.via[1]
        )));
    }
    let base = s.base();
    let Some(top) = base.dim() else {
        return Ok(CochainComplex {
            dims: Vec::new(),
            deltas: Vec::new(),
            layout: Vec::new(),
        });
    };
    let stalk_dims = |k: usize| -> Vec<usize> { base.faces(k).iter().map(|f| s.stalk_dim(f)).collect() };
    let mut dims = Vec::new();
    let mut layout = Vec::new();
    for k in 0..=top {
        let mut offset = 0;
        let mut blocks = Vec::new();
        for f in base.faces(k) {
            let d = s.stalk_dim(f);
            blocks.push(Block {
                face: base.face_name(f),
                offset,
                dim: d,
            });
            offset += d;
        }
        dims.push(offset);
        layout.push(blocks);
    }
    let mut deltas = Vec::new();
    for k in 0..top {
        let rows = base.faces(k + 1);
        let cols = base.faces(k);
        let blocks: Vec<Vec<Option<RationalMatrix>>> = rows
            .iter()
            .map(|b| {
                cols.iter()
                    .map(|a| {
                        let sign = base.incidence(b, a).expect("degrees differ by one");
                        if sign == 0 {
                            return None;
                        }
                        let m = s.map(a, b).expect("covering attachment has a map");
                        Some(m.scale(&int(sign as i64)))
                    })
                    .collect()
            })
            .collect();
        deltas.push(RationalMatrix::block_assemble(&blocks, &stalk_dims(k + 1), &stalk_dims(k))?);
    }
    let complex = CochainComplex { dims, deltas, layout };
    debug_assert!(complex.squares_to_zero());
    if !complex.squares_to_zero() {
        return Err(Error::InvalidSheaf("coboundary does not square to zero".into()));
    }
    Ok(complex)
}

/// `dim Hᵏ = dim ker δᵏ − rank δᵏ⁻¹`.
pub fn cohomology_dims(s: &CellularSheaf) -> Result<Vec<usize>> {
    let c = cochain_complex(s)?;
    let ranks: Vec<usize> = (0..c.dims.len()).map(|k| c.delta(k).rank()).collect();
    Ok((0..c.dims.len())
        .map(|k| {
            let incoming = if k == 0 { 0 } else { ranks[k - 1] };
            c.dims[k] - ranks[k] - incoming
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub outcomes: Vec<String>,
    pub parents: Vec<String>,
    /// One row per parent configuration, first parent most significant.
    pub cpt: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BayesModel {
    variables: Vec<Variable>,
    parents: Vec<Vec<usize>>,
}

pub const JOINT_LIMIT: usize = 4096;

impl BayesModel {
    pub fn new(variables: Vec<Variable>) -> Result<Self> {
        let bad = |m: String| Error::InvalidModel(m);
        if variables.is_empty() {
            return Err(bad("no variables".into()));
        }
        let mut index = BTreeMap::new();
        for (i, v) in variables.iter().enumerate() {
            if index.insert(v.name.clone(), i).is_some() {
                return Err(bad(format!("variable {} declared twice", v.name)));
            }
            let distinct: BTreeSet<&String> = v.outcomes.iter().collect();
            if v.outcomes.is_empty() || distinct.len() != v.outcomes.len() {
                return Err(bad(format!("outcomes of {} must be nonempty and distinct", v.name)));
            }
        }
        variables
            .iter()
            .try_fold(1usize, |acc, v| acc.checked_mul(v.outcomes.len()).filter(|n| *n <= JOINT_LIMIT))
            .ok_or_else(|| bad(format!("joint outcome space exceeds {JOINT_LIMIT}")))?;
        let mut parents = Vec::new();
        for v in &variables {
            let mut ps = Vec::new();
            for p in &v.parents {
                let i = *index.get(p).ok_or_else(|| Error::UnknownElement(p.clone()))?;
                if ps.contains(&i) {
                    return Err(bad(format!("{} lists parent {p} twice", v.name)));
                }
                ps.push(i);
            }
            let configs: usize = ps.iter().map(|&p| variables[p].outcomes.len()).product();
            if v.cpt.len() != configs {
                return Err(Error::dims(format!("cpt rows of {}", v.name), configs, v.cpt.len()));
            }
            for (r, row) in v.cpt.iter().enumerate() {
                if row.len() != v.outcomes.len() {
                    return Err(Error::dims(format!("cpt row {r} of {}", v.name), v.outcomes.len(), row.len()));
                }
                if row.iter().any(Signed::is_negative) {
                    return Err(bad(format!("cpt row {r} of {} has a negative entry", v.name)));
                }
                let sum: Rational = row.iter().sum();
                if !sum.is_one() {
                    return Err(bad(format!("cpt row {r} of {} sums to {}", v.name, format_rational(&sum))));
                }
            }
            parents.push(ps);
        }
        let model = BayesModel { variables, parents };
        if model.topological_order().is_none() {
            return Err(bad("parent graph has a cycle".into()));
        }
        Ok(model)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.variables.len();
        let mut placed = vec![false; n];
        let mut order = Vec::new();
        while order.len() < n {
            let next = (0..n).find(|&i| !placed[i] && self.parents[i].iter().all(|&p| placed[p]))?;
            placed[next] = true;
            order.push(next);
        }
        Some(order)
    }

    fn radix(&self, vars: &[usize]) -> Vec<usize> {
        vars.iter().map(|&v| self.variables[v].outcomes.len()).collect()
    }

    fn outcome_count(&self, vars: &[usize]) -> usize {
        self.radix(vars).iter().product()
    }

    /// `P(x | parents)` for one full configuration of `vars` (sorted).
    fn conditional(&self, x: usize, vars: &[usize], config: &[usize]) -> Rational {
        let value = config[vars.iter().position(|&v| v == x).expect("x in vars")];
        let mut row = 0;
        for &p in &self.parents[x] {
            let o = config[vars.iter().position(|&v| v == p).expect("parents in vars")];
            row = row * self.variables[p].outcomes.len() + o;
        }
        self.variables[x].cpt[row][value].clone()
    }

    /// `∏ P(Xᵢ | parents(Xᵢ))` in declared order, first variable most significant.
    pub fn joint(&self) -> Vector {
        let all: Vec<usize> = (0..self.variables.len()).collect();
        configurations(&self.radix(&all))
            .map(|c| (0..all.len()).map(|x| self.conditional(x, &all, &c)).product())
            .collect()
    }

    /// Sums `from`'s distribution down to the sorted subset `to`.
    pub fn marginalization(&self, from: &[usize], to: &[usize]) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(self.outcome_count(to), self.outcome_count(from));
        let to_radix = self.radix(to);
        for (col, config) in configurations(&self.radix(from)).enumerate() {
            let sub: Vec<usize> = to
                .iter()
                .map(|t| config[from.iter().position(|f| f == t).expect("subset")])
                .collect();
            m.set(flatten(&sub, &to_radix), col, Rational::one());
        }
        m
    }

    /// Multiplication by `P(x | parents(x))`, from the stalk over `from` to
    /// the stalk over `from ∪ {x}`.
    pub fn conditional_map(&self, from: &[usize], x: usize) -> RationalMatrix {
        let mut to: Vec<usize> = from.to_vec();
        to.push(x);
        to.sort();
        let from_radix = self.radix(from);
        let mut m = RationalMatrix::zeros(self.outcome_count(&to), self.outcome_count(from));
        for (row, config) in configurations(&self.radix(&to)).enumerate() {
            let sub: Vec<usize> = from
                .iter()
                .map(|f| config[to.iter().position(|t| t == f).expect("subset")])
                .collect();
            m.set(row, flatten(&sub, &from_radix), self.conditional(x, &to, &config));
        }
        m
    }

    fn is_ancestral(&self, set: &[usize]) -> bool {
        set.iter().all(|&v| self.parents[v].iter().all(|p| set.contains(p)))
    }

    fn name_of(&self, set: &[usize]) -> String {
        let names: Vec<&str> = set.iter().map(|&v| self.variables[v].name.as_str()).collect();
        if names.iter().all(|n| n.chars().count() == 1) {
            names.concat()
        } else {
            names.join(",")
        }
    }
}

fn configurations(radix: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = radix.iter().product();
    (0..total).map(move |mut n| {
        let mut c = vec![0; radix.len()];
        for i in (0..radix.len()).rev() {
            c[i] = n % radix[i];
            n /= radix[i];
        }
        c
    })
}

fn flatten(config: &[usize], radix: &[usize]) -> usize {
    config.iter().zip(radix).fold(0, |acc, (c, r)| acc * r + c)
}

/// An upward conditional-probability map `A → A ∪ {X}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionalMap {
    pub from: String,
    pub to: String,
    pub variable: String,
    pub matrix: RationalMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BayesBuild {
    pub cosheaf: CellularSheaf,
    /// Conditional maps over ancestral variable sets only.
    pub conditionals: Vec<ConditionalMap>,
    pub joint: Vector,
}

/// The marginalization cosheaf on the complete simplex over the variables,
/// the conditional maps between ancestral faces, and the factorized joint.
pub fn bayes_build(m: &BayesModel) -> Result<BayesBuild> {
    let names: Vec<String> = m.variables.iter().map(|v| v.name.clone()).collect();
    let base = SimplicialComplex::simplex(&names)?;
    let mut stalks = BTreeMap::new();
    let mut maps = BTreeMap::new();
    for f in base.all_faces() {
        stalks.insert(f.clone(), m.outcome_count(f));
        for t in base.cofaces(f) {
            maps.insert((f.clone(), t.clone()), m.marginalization(&t, f));
        }
    }
    let cosheaf = CellularSheaf::new(base.clone(), stalks, maps, Variance::Cosheaf)?;
    let mut conditionals = Vec::new();
    for f in base.all_faces() {
        if !m.is_ancestral(f) {
            continue;
        }
        for t in base.cofaces(f) {
            let x = *t.iter().find(|v| !f.contains(v)).expect("coface adds a vertex");
            if m.parents[x].iter().all(|p| f.contains(p)) {
                conditionals.push(ConditionalMap {
                    from: m.name_of(f),
                    to: m.name_of(&t),
                    variable: names[x].clone(),
                    matrix: m.conditional_map(f, x),
                });
            }
        }
    }
    Ok(BayesBuild {
        cosheaf,
        conditionals,
        joint: m.joint(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BayesReport {
    pub holds: bool,
    /// Descriptions of each violated map, e.g. `"conditional R -> RS"`.
    pub violations: Vec<String>,
}

/// Checks that `joint` marginalizes consistently along every cosheaf path and
/// reproduces itself through every conditional map.
pub fn bayes_check(m: &BayesModel, joint: &[Rational]) -> Result<BayesReport> {
    let build = bayes_build(m)?;
    let base = build.cosheaf.base().clone();
    let all: Face = (0..m.variables.len()).collect();
    if joint.len() != m.outcome_count(&all) {
        return Err(Error::dims("joint", m.outcome_count(&all), joint.len()));
    }
    let mut violations = Vec::new();
    if let Some(v) = build.cosheaf.validate().violation {
        violations.push(format!("marginalization {} -> {} via {} and {}", v.to, v.from, v.via[0], v.via[1]));
    }
    let total: Rational = joint.iter().sum();
    if !total.is_one() || joint.iter().any(Signed::is_negative) {
        violations.push("joint is not a probability distribution".into());
    }
    let mut marginals: BTreeMap<Face, Vector> = BTreeMap::new();
    for f in base.all_faces() {
        marginals.insert(f.clone(), m.marginalization(&all, f).apply(joint)?);
    }
    for ((s, t), g) in build.cosheaf.maps() {
        if g.apply(&marginals[t])? != marginals[s] {
            violations.push(format!("marginalization {} -> {}", base.face_name(t), base.face_name(s)));
        }
    }
    for x in 0..m.variables.len() {
        if m.parents[x].is_empty() {
            let expected = m.variables[x].cpt[0].clone();
            if marginals[&vec![x]] != expected {
                violations.push(format!("prior {}", m.variables[x].name));
            }
        }
    }
    for c in &build.conditionals {
        let (s, t) = (base.parse_face(&c.from)?, base.parse_face(&c.to)?);
        if c.matrix.apply(&marginals[&s])? != marginals[&t] {
            violations.push(format!("conditional {} -> {}", c.from, c.to));
        }
    }
    Ok(BayesReport {
        holds: violations.is_empty(),
        violations,
    })
}
