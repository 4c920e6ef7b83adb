#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use sheafwork::cellsheaf::{CellularSheaf, Variance};
use sheafwork::cohomology::BayesModel;
use sheafwork::complex::{Closure, Face, SimplicialComplex};
use sheafwork::finsheaf::Copresheaf;
use sheafwork::io;
use sheafwork::modal::DirectedMultigraph;
use sheafwork::morphology::StructuringElement;
use sheafwork::{FinitePoset, Rational, RationalMatrix};

pub fn fixture_path(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect()
}

pub fn fixture(name: &str) -> Vec<u8> {
    std::fs::read(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn load_sheaf(name: &str) -> CellularSheaf {
    io::parse_sheaf_with(&fixture(name), |p| Ok(fixture(p))).unwrap()
}

pub fn running_sheaf() -> CellularSheaf {
    load_sheaf("running.json")
}

pub fn sprinkler() -> BayesModel {
    io::parse_bayes(&fixture("sprinkler.json")).unwrap()
}

/// The four structuring elements used by the exhaustive morphology checks.
pub fn elements() -> Vec<StructuringElement> {
    vec![
        StructuringElement::origin(),
        StructuringElement::bar(2),
        StructuringElement::new(&[(0, 0), (0, 1)]).unwrap(),
        StructuringElement::new(&[(-1, 0), (0, 1)]).unwrap(),
    ]
}

/// Every directed multigraph on `0..n` with at most `max_edges` edges, one
/// per multiset of (source, target) pairs. Loops are included.
pub fn multigraphs(n: usize, max_edges: usize) -> Vec<DirectedMultigraph> {
    let vertices: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    fn walk(
        start: usize,
        pairs: &[(usize, usize)],
        max: usize,
        stack: &mut Vec<usize>,
        vertices: &[String],
        out: &mut Vec<DirectedMultigraph>,
    ) {
        let edges: Vec<(String, String, String)> = stack
            .iter()
            .enumerate()
            .map(|(k, &p)| (format!("e{k}"), vertices[pairs[p].0].clone(), vertices[pairs[p].1].clone()))
            .collect();
        out.push(DirectedMultigraph::new(vertices, &edges).unwrap());
        if stack.len() == max {
            return;
        }
        for p in start..pairs.len() {
            stack.push(p);
            walk(p, pairs, max, stack, vertices, out);
            stack.pop();
        }
    }
    walk(0, &pairs, max_edges, &mut stack, &vertices, &mut out);
    out
}

/// A random closed complex on up to `max_vertices` vertices with at most
/// `max_faces` faces.
pub fn random_complex(rng: &mut impl Rng, max_vertices: usize, max_faces: usize) -> SimplicialComplex {
    loop {
        let n = rng.gen_range(1..=max_vertices);
        let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut faces: Vec<Vec<String>> = Vec::new();
        for _ in 0..rng.gen_range(0..=4) {
            let k = rng.gen_range(1..=n.min(3));
            let mut pick: Vec<usize> = (0..n).collect();
            pick.shuffle(rng);
            let mut chosen: Vec<usize> = pick[..k].to_vec();
            chosen.sort();
            faces.push(chosen.iter().map(|&i| vertices[i].clone()).collect());
        }
        let c = SimplicialComplex::new(&vertices, &faces, Closure::Complete).unwrap();
        if c.face_count() <= max_faces {
            return c;
        }
    }
}

/// A random poset on `p0..p{n-1}` from a random DAG oriented by index.
pub fn random_poset(rng: &mut impl Rng, n: usize, density: f64) -> FinitePoset {
    let elements: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let mut relations = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                relations.push((elements[i].clone(), elements[j].clone()));
            }
        }
    }
    FinitePoset::new(&elements, &relations).unwrap()
}

fn find(parent: &mut [usize], x: usize) -> usize {
    if parent[x] != x {
        let r = find(parent, parent[x]);
        parent[x] = r;
    }
    parent[x]
}

/// A random copresheaf whose set at `p` is a partition of `{0,1,2}` and
/// whose maps send a block to the block containing it. Partitions coarsen
/// upward, so all maps compose.
pub fn random_copresheaf(rng: &mut impl Rng, poset: &FinitePoset) -> Copresheaf {
    let n = poset.len();
    let order: Vec<usize> = {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by_key(|&i| (0..n).filter(|&j| poset.leq(j, i)).count());
        idx
    };
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &q in &order {
        let mut parent: Vec<usize> = (0..3).collect();
        for p in (0..n).filter(|&p| p != q && poset.leq(p, q)) {
            for x in 0..3 {
                let (a, b) = (find(&mut parent, x), find(&mut parent, parts[p][x]));
                parent[a] = b;
            }
        }
        for _ in 0..rng.gen_range(0..=2) {
            let (x, y) = (rng.gen_range(0..3), rng.gen_range(0..3));
            let (a, b) = (find(&mut parent, x), find(&mut parent, y));
            parent[a] = b;
        }
        parts[q] = (0..3).map(|x| find(&mut parent, x)).collect();
    }
    let block = |p: usize, x: usize| -> String {
        let members: String = (0..3).filter(|&y| parts[p][y] == parts[p][x]).map(|y| y.to_string()).collect();
        format!("b{members}")
    };
    let mut sets = BTreeMap::new();
    for p in 0..n {
        let mut s: Vec<String> = (0..3).map(|x| block(p, x)).collect();
        s.sort();
        s.dedup();
        sets.insert(poset.label(p).to_string(), s);
    }
    let mut maps = BTreeMap::new();
    for p in 0..n {
        for q in 0..n {
            if p != q && poset.leq(p, q) {
                let table: BTreeMap<String, String> = (0..3).map(|x| (block(p, x), block(q, x))).collect();
                maps.insert((poset.label(p).to_string(), poset.label(q).to_string()), table);
            }
        }
    }
    Copresheaf::new(poset.clone(), &sets, &maps).unwrap()
}

fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> RationalMatrix {
    let entries = (0..rows * cols).map(|_| Rational::from_integer(rng.gen_range(-2i64..=2).into())).collect();
    RationalMatrix::from_entries(rows, cols, entries).unwrap()
}

fn random_invertible(rng: &mut impl Rng, n: usize) -> (RationalMatrix, RationalMatrix) {
    loop {
        let p = random_matrix(rng, n, n);
        if p.rank() == n {
            let mut inverse = RationalMatrix::zeros(n, n);
            for c in 0..n {
                let unit: Vec<Rational> = (0..n).map(|r| Rational::from_integer(((r == c) as i64).into())).collect();
                let col = p.solve(&unit).unwrap().unwrap();
                for (r, x) in col.into_iter().enumerate() {
                    inverse.set(r, c, x);
                }
            }
            return (p, inverse);
        }
    }
}

/// Arbitrary restriction maps. Only valid when `base` has no 2-faces, since
/// then no two paths can disagree.
pub fn random_graph_sheaf(rng: &mut impl Rng, base: &SimplicialComplex) -> CellularSheaf {
    assert!(base.dim().unwrap_or(0) <= 1);
    let stalks: BTreeMap<Face, usize> = base.all_faces().map(|f| (f.clone(), rng.gen_range(0..=3))).collect();
    let mut maps = BTreeMap::new();
    for f in base.all_faces() {
        for t in base.cofaces(f) {
            maps.insert((f.clone(), t.clone()), random_matrix(rng, stalks[&t], stalks[f]));
        }
    }
    CellularSheaf::new(base.clone(), stalks, maps, Variance::Sheaf).unwrap()
}

/// Stalks are spans of coordinate subsets of `Q^m` that shrink upward,
/// restrictions are coordinate projections, and each stalk gets a random
/// change of basis. Every such sheaf is valid.
pub fn random_projection_sheaf(rng: &mut impl Rng, base: &SimplicialComplex) -> CellularSheaf {
    let m = rng.gen_range(1..=4);
    let mut coords: BTreeMap<Face, Vec<usize>> = BTreeMap::new();
    let top = base.dim().unwrap_or(0);
    for k in (0..=top).rev() {
        for f in base.faces(k) {
            let mut c: Vec<usize> = base.cofaces(f).iter().flat_map(|t| coords[t].clone()).collect();
            c.extend((0..m).filter(|_| rng.gen_bool(0.35)));
            c.sort();
            c.dedup();
            coords.insert(f.clone(), c);
        }
    }
    let bases: BTreeMap<Face, (RationalMatrix, RationalMatrix)> =
        coords.iter().map(|(f, c)| (f.clone(), random_invertible(rng, c.len()))).collect();
    let stalks: BTreeMap<Face, usize> = coords.iter().map(|(f, c)| (f.clone(), c.len())).collect();
    let mut maps = BTreeMap::new();
    for f in base.all_faces() {
        for t in base.cofaces(f) {
            let (cf, ct) = (&coords[f], &coords[&t]);
            let mut proj = RationalMatrix::zeros(ct.len(), cf.len());
            for (i, x) in ct.iter().enumerate() {
                let j = cf.iter().position(|y| y == x).expect("coordinates shrink upward");
                proj.set(i, j, Rational::from_integer(1.into()));
            }
            let map = bases[&t].0.matmul(&proj).unwrap().matmul(&bases[f].1).unwrap();
            maps.insert((f.clone(), t.clone()), map);
        }
    }
    CellularSheaf::new(base.clone(), stalks, maps, Variance::Sheaf).unwrap()
}
