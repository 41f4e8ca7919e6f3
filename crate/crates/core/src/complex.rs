//! Graded cell complexes: labelled cubical complexes built from commuting
//! permutation sets, and pure simplicial complexes built from facets.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex domain, dimension and the t permutation sets A_1..A_t.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicalSpec {
    #[serde(rename = "N")]
    pub n: usize,
    pub t: usize,
    /// permutations[i][a] is the a-th permutation of A_{i+1}, as an image array.
    pub permutations: Vec<Vec<Vec<u32>>>,
}

impl CubicalSpec {
    /// V = Z_n with every A_i = {x -> x + s : s in shifts}.
    pub fn shifts(n: usize, t: usize, shifts: &[usize]) -> Self {
        let set: Vec<Vec<u32>> = shifts
            .iter()
            .map(|&s| (0..n).map(|x| ((x + s) % n) as u32).collect())
            .collect();
        CubicalSpec {
            n,
            t,
            permutations: vec![set; t],
        }
    }

    /// Left-right Cayley complex of a group given by its multiplication
    /// table: A_1 acts by left multiplication, A_2 by right multiplication.
    pub fn left_right(table: &[Vec<usize>], left: &[usize], right: &[usize]) -> Self {
        let n = table.len();
        let a1 = left
            .iter()
            .map(|&a| (0..n).map(|g| table[a][g] as u32).collect())
            .collect();
        let a2 = right
            .iter()
            .map(|&b| (0..n).map(|g| table[g][b] as u32).collect())
            .collect();
        CubicalSpec {
            n,
            t: 2,
            permutations: vec![a1, a2],
        }
    }

    pub fn delta(&self) -> usize {
        self.permutations.first().map_or(0, |a| a.len())
    }

    /// Checks shapes, bijectivity, equal set sizes and the commuting condition.
    pub fn validate(&self) -> Result<()> {
        if self.t == 0 || self.t > 8 {
            return Err(Error::Validation(format!("t = {} outside 1..=8", self.t)));
        }
        if self.n == 0 {
            return Err(Error::Validation("empty vertex domain".into()));
        }
        if self.permutations.len() != self.t {
            return Err(Error::Validation(format!(
                "{} permutation sets given for t = {}",
                self.permutations.len(),
                self.t
            )));
        }
        let delta = self.delta();
        if delta == 0 {
            return Err(Error::Validation("A_1 is empty".into()));
        }
        for (i, set) in self.permutations.iter().enumerate() {
            if set.len() != delta {
                return Err(Error::Validation(format!(
                    "|A_{}| = {} but |A_1| = {delta}",
                    i + 1,
                    set.len()
                )));
            }
            for (a, p) in set.iter().enumerate() {
                let mut seen = vec![false; self.n];
                if p.len() != self.n {
                    return Err(Error::Validation(format!(
                        "A_{}[{a}] has length {} (N = {})",
                        i + 1,
                        p.len(),
                        self.n
                    )));
                }
                for &x in p {
                    if x as usize >= self.n || seen[x as usize] {
                        return Err(Error::Validation(format!(
                            "A_{}[{a}] is not a permutation of 0..{}",
                            i + 1,
                            self.n
                        )));
                    }
                    seen[x as usize] = true;
                }
            }
        }
        for i in 0..self.t {
            for j in i + 1..self.t {
                for (a, p) in self.permutations[i].iter().enumerate() {
                    for (b, s) in self.permutations[j].iter().enumerate() {
                        let commute = (0..self.n).all(|x| p[s[x] as usize] == s[p[x] as usize]);
                        if !commute {
                            return Err(Error::Validation(format!(
                                "A_{}[{a}] and A_{}[{b}] do not commute",
                                i + 1,
                                j + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Canonical identity of a cell.
///
/// A cubical cell of type S is (v; (a_j)_{j∈S}, (b_j)_{j∉S}): `dirs` lists S
/// in increasing order (0-based directions), `labels[k]` indexes into
/// A_{dirs[k]}, and `bits` lists b_j for the directions outside S in
/// increasing order. The derived order is the canonical global order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CellKey {
    Cube {
        dirs: Vec<u8>,
        base: u32,
        labels: Vec<u16>,
        bits: Vec<u8>,
    },
    Simplex(Vec<u32>),
}

impl CellKey {
    pub fn dim(&self) -> usize {
        match self {
            CellKey::Cube { dirs, .. } => dirs.len(),
            CellKey::Simplex(v) => v.len() - 1,
        }
    }
}

/// Handle to a cell: its dimension and index in the canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellId {
    pub dim: usize,
    pub index: usize,
}

impl CellId {
    pub fn new(dim: usize, index: usize) -> Self {
        CellId { dim, index }
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Cubical {
        spec: CubicalSpec,
        inverses: Vec<Vec<Vec<u32>>>,
    },
    Simplicial,
}

/// Findings of `CellComplex::validate`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub diamond_violations: Vec<String>,
    pub dangling_incidences: Vec<String>,
    pub top_components: usize,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.diamond_violations.is_empty() && self.dangling_incidences.is_empty()
    }
}

/// A graded poset of cells with the covering relation stored both ways.
#[derive(Clone, Debug)]
pub struct CellComplex {
    t: usize,
    kind: Kind,
    cells: Vec<Vec<CellKey>>,
    index: HashMap<CellKey, usize>,
    faces: Vec<Vec<Vec<u32>>>,
    cofaces: Vec<Vec<Vec<u32>>>,
    // top cells above each cell, in coordinate order
    top: Vec<Vec<Vec<u32>>>,
    // (top index, coordinate position) sorted by top index
    top_lookup: Vec<Vec<Vec<(u32, u32)>>>,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// All tuples in {0..base}^len in lexicographic order.
fn tuples(base: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * base);
        for prefix in &out {
            for x in 0..base {
                let mut p = prefix.clone();
                p.push(x);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

impl CellComplex {
    /// Builds X(V; A_1..A_t). Cells of type S number |V| Δ^|S| 2^(t-|S|).
    pub fn cubical(spec: CubicalSpec) -> Result<Self> {
        spec.validate()?;
        let t = spec.t;
        let n = spec.n;
        let delta = spec.delta();
        let inverses: Vec<Vec<Vec<u32>>> = spec
            .permutations
            .iter()
            .map(|set| {
                set.iter()
                    .map(|p| {
                        let mut inv = vec![0u32; n];
                        for (x, &y) in p.iter().enumerate() {
                            inv[y as usize] = x as u32;
                        }
                        inv
                    })
                    .collect()
            })
            .collect();
        let mut cells: Vec<Vec<CellKey>> = vec![Vec::new(); t + 1];
        for (k, dim_cells) in cells.iter_mut().enumerate() {
            for dirs in combinations(t, k) {
                let label_tuples = tuples(delta, k);
                let bit_tuples = tuples(2, t - k);
                for v in 0..n {
                    for labels in &label_tuples {
                        for bits in &bit_tuples {
                            dim_cells.push(CellKey::Cube {
                                dirs: dirs.iter().map(|&d| d as u8).collect(),
                                base: v as u32,
                                labels: labels.iter().map(|&a| a as u16).collect(),
                                bits: bits.iter().map(|&b| b as u8).collect(),
                            });
                        }
                    }
                }
            }
            dim_cells.sort();
        }
        let kind = Kind::Cubical { spec, inverses };
        Self::assemble(t, kind, cells)
    }

    /// Builds the pure simplicial complex generated by `facets`.
    pub fn simplicial(facets: &[Vec<u32>]) -> Result<Self> {
        let Some(first) = facets.first() else {
            return Err(Error::Validation("no facets".into()));
        };
        if first.is_empty() {
            return Err(Error::Validation("empty facet".into()));
        }
        let t = first.len() - 1;
        let mut per_dim: Vec<std::collections::BTreeSet<Vec<u32>>> =
            vec![Default::default(); t + 1];
        for (i, f) in facets.iter().enumerate() {
            if f.len() != t + 1 {
                return Err(Error::Validation(format!(
                    "facet {i} has {} vertices, expected {} (pure complexes only)",
                    f.len(),
                    t + 1
                )));
            }
            let mut s = f.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != f.len() {
                return Err(Error::Validation(format!("facet {i} repeats a vertex")));
            }
            for k in 0..=t {
                for c in combinations(t + 1, k + 1) {
                    per_dim[k].insert(c.iter().map(|&j| s[j]).collect());
                }
            }
        }
        let cells = per_dim
            .into_iter()
            .map(|set| set.into_iter().map(CellKey::Simplex).collect())
            .collect();
        Self::assemble(t, Kind::Simplicial, cells)
    }

    fn assemble(t: usize, kind: Kind, cells: Vec<Vec<CellKey>>) -> Result<Self> {
        let mut index = HashMap::new();
        for dim_cells in &cells {
            for (i, key) in dim_cells.iter().enumerate() {
                index.insert(key.clone(), i);
            }
        }
        let mut cx = CellComplex {
            t,
            kind,
            cells,
            index,
            faces: Vec::new(),
            cofaces: Vec::new(),
            top: Vec::new(),
            top_lookup: Vec::new(),
        };
        let mut faces = vec![Vec::new(); t + 1];
        for d in 0..=t {
            faces[d] = (0..cx.cells[d].len())
                .map(|i| {
                    let mut f: Vec<u32> = cx
                        .face_keys(&cx.cells[d][i])
                        .iter()
                        .map(|k| {
                            *cx.index
                                .get(k)
                                .unwrap_or_else(|| panic!("face {k:?} missing")) as u32
                        })
                        .collect();
                    f.sort_unstable();
                    f
                })
                .collect();
        }
        let mut cofaces: Vec<Vec<Vec<u32>>> =
            (0..=t).map(|d| vec![Vec::new(); cx.cells[d].len()]).collect();
        for d in 1..=t {
            for (i, fs) in faces[d].iter().enumerate() {
                for &f in fs {
                    cofaces[d - 1][f as usize].push(i as u32);
                }
            }
        }
        cx.faces = faces;
        cx.cofaces = cofaces;
        let mut top = Vec::with_capacity(t + 1);
        for d in 0..=t {
            let rows: Vec<Vec<u32>> = (0..cx.cells[d].len())
                .map(|i| cx.compute_top(CellId::new(d, i)))
                .collect();
            top.push(rows);
        }
        cx.top_lookup = top
            .iter()
            .map(|rows| {
                rows.iter()
                    .map(|r| {
                        let mut v: Vec<(u32, u32)> = r
                            .iter()
                            .enumerate()
                            .map(|(p, &x)| (x, p as u32))
                            .collect();
                        v.sort_unstable();
                        v
                    })
                    .collect()
            })
            .collect();
        cx.top = top;
        Ok(cx)
    }

    fn face_keys(&self, key: &CellKey) -> Vec<CellKey> {
        match key {
            CellKey::Simplex(v) => {
                if v.len() == 1 {
                    return Vec::new();
                }
                (0..v.len())
                    .map(|skip| {
                        CellKey::Simplex(
                            v.iter()
                                .enumerate()
                                .filter(|&(i, _)| i != skip)
                                .map(|(_, &x)| x)
                                .collect(),
                        )
                    })
                    .collect()
            }
            CellKey::Cube {
                dirs,
                base,
                labels,
                bits,
            } => {
                let Kind::Cubical { spec, .. } = &self.kind else {
                    unreachable!()
                };
                let mut out = Vec::new();
                for (pos, &j) in dirs.iter().enumerate() {
                    for b in 0..2u8 {
                        let a = labels[pos] as usize;
                        let new_base = if b == 1 {
                            spec.permutations[j as usize][a][*base as usize]
                        } else {
                            *base
                        };
                        let mut nd = dirs.clone();
                        nd.remove(pos);
                        let mut nl = labels.clone();
                        nl.remove(pos);
                        // position of j among the directions outside the new type
                        let slot = (0..j as usize)
                            .filter(|d| !dirs.contains(&(*d as u8)))
                            .count();
                        let mut nb = bits.clone();
                        nb.insert(slot, b);
                        out.push(CellKey::Cube {
                            dirs: nd,
                            base: new_base,
                            labels: nl,
                            bits: nb,
                        });
                    }
                }
                out
            }
        }
    }

    fn compute_top(&self, id: CellId) -> Vec<u32> {
        let t = self.t;
        match (&self.kind, &self.cells[id.dim][id.index]) {
            (
                Kind::Cubical { spec, inverses },
                CellKey::Cube {
                    dirs,
                    base,
                    labels,
                    bits,
                },
            ) => {
                let missing: Vec<usize> = (0..t).filter(|d| !dirs.contains(&(*d as u8))).collect();
                let mut out = Vec::new();
                for new_labels in tuples(spec.delta(), missing.len()) {
                    let mut w = *base;
                    for (k, &j) in missing.iter().enumerate() {
                        if bits[k] == 1 {
                            w = inverses[j][new_labels[k]][w as usize];
                        }
                    }
                    let mut full = vec![0u16; t];
                    for (k, &j) in dirs.iter().enumerate() {
                        full[j as usize] = labels[k];
                    }
                    for (k, &j) in missing.iter().enumerate() {
                        full[j] = new_labels[k] as u16;
                    }
                    let key = CellKey::Cube {
                        dirs: (0..t as u8).collect(),
                        base: w,
                        labels: full,
                        bits: Vec::new(),
                    };
                    out.push(self.index[&key] as u32);
                }
                out
            }
            _ => {
                let mut v = self.up_set_bfs(id, t);
                v.sort_unstable();
                v
            }
        }
    }

    fn up_set_bfs(&self, id: CellId, k: usize) -> Vec<u32> {
        let mut layer = vec![id.index as u32];
        for d in id.dim..k {
            let mut next: Vec<u32> = layer
                .iter()
                .flat_map(|&i| self.cofaces[d][i as usize].iter().copied())
                .collect();
            next.sort_unstable();
            next.dedup();
            layer = next;
        }
        layer
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn is_cubical(&self) -> bool {
        matches!(self.kind, Kind::Cubical { .. })
    }

    pub fn is_simplicial(&self) -> bool {
        matches!(self.kind, Kind::Simplicial)
    }

    pub fn cubical_spec(&self) -> Option<&CubicalSpec> {
        match &self.kind {
            Kind::Cubical { spec, .. } => Some(spec),
            Kind::Simplicial => None,
        }
    }

    pub fn count(&self, dim: usize) -> usize {
        self.cells.get(dim).map_or(0, |c| c.len())
    }

    pub fn counts(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.len()).collect()
    }

    pub fn cells(&self, dim: usize) -> &[CellKey] {
        &self.cells[dim]
    }

    pub fn key(&self, id: CellId) -> &CellKey {
        &self.cells[id.dim][id.index]
    }

    pub fn lookup(&self, key: &CellKey) -> Result<CellId> {
        self.index
            .get(key)
            .map(|&i| CellId::new(key.dim(), i))
            .ok_or_else(|| Error::Lookup(format!("cell {key:?} not in complex")))
    }

    fn check(&self, id: CellId) -> Result<()> {
        if id.dim > self.t || id.index >= self.cells[id.dim].len() {
            return Err(Error::Lookup(format!("cell {id:?} not in complex")));
        }
        Ok(())
    }

    /// Indices of the (dim-1)-cells covered by `id`.
    pub fn faces(&self, id: CellId) -> &[u32] {
        &self.faces[id.dim][id.index]
    }

    /// Indices of the (dim+1)-cells covering `id`.
    pub fn cofaces(&self, id: CellId) -> &[u32] {
        &self.cofaces[id.dim][id.index]
    }

    /// X_{≥σ}(k) as indices into dimension k. For k < t the order is the
    /// canonical one. For k = t it is the coordinate order of section
    /// spaces: canonical for simplicial complexes; for cubical complexes the
    /// lexicographic order of the labels in the directions outside type(σ).
    pub fn up_set(&self, id: CellId, k: usize) -> Result<Vec<u32>> {
        self.check(id)?;
        if k < id.dim || k > self.t {
            return Err(Error::Range(format!(
                "up-set dimension {k} for a {}-cell in a {}-complex",
                id.dim, self.t
            )));
        }
        if k == self.t {
            return Ok(self.top[id.dim][id.index].clone());
        }
        Ok(self.up_set_bfs(id, k))
    }

    /// X_{≤σ}(k) in canonical order.
    pub fn down_set(&self, id: CellId, k: usize) -> Result<Vec<u32>> {
        self.check(id)?;
        if k > id.dim {
            return Err(Error::Range(format!(
                "down-set dimension {k} for a {}-cell",
                id.dim
            )));
        }
        let mut layer = vec![id.index as u32];
        for d in (k + 1..=id.dim).rev() {
            let mut next: Vec<u32> = layer
                .iter()
                .flat_map(|&i| self.faces[d][i as usize].iter().copied())
                .collect();
            next.sort_unstable();
            next.dedup();
            layer = next;
        }
        Ok(layer)
    }

    /// Top cells above `id` in coordinate order (see `up_set`).
    pub fn top_coords(&self, id: CellId) -> &[u32] {
        &self.top[id.dim][id.index]
    }

    /// Position of top cell `tau` in the coordinate order of `id`.
    pub fn top_position(&self, id: CellId, tau: u32) -> Option<usize> {
        let l = &self.top_lookup[id.dim][id.index];
        l.binary_search_by_key(&tau, |&(x, _)| x)
            .ok()
            .map(|k| l[k].1 as usize)
    }

    /// Vertex list of a simplex.
    pub fn simplex_vertices(&self, id: CellId) -> Option<&[u32]> {
        match self.key(id) {
            CellKey::Simplex(v) => Some(v),
            CellKey::Cube { .. } => None,
        }
    }

    /// Index of the simplex with the given sorted vertex list.
    pub fn simplex_index(&self, vertices: &[u32]) -> Option<usize> {
        self.index.get(&CellKey::Simplex(vertices.to_vec())).copied()
    }

    /// Applies a_j (the label-th element of A_{j+1}) to v.
    pub fn act(&self, j: usize, label: usize, v: u32) -> u32 {
        match &self.kind {
            Kind::Cubical { spec, .. } => spec.permutations[j][label][v as usize],
            Kind::Simplicial => panic!("act on a simplicial complex"),
        }
    }

    /// Checks the diamond property, incidence symmetry and counts the
    /// connected components of the top-cell adjacency graph.
    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        for d in 1..=self.t {
            for (i, fs) in self.faces[d].iter().enumerate() {
                for &f in fs {
                    if f as usize >= self.count(d - 1) {
                        rep.dangling_incidences
                            .push(format!("cell ({d},{i}) has face index {f} out of range"));
                    } else if !self.cofaces[d - 1][f as usize].contains(&(i as u32)) {
                        rep.dangling_incidences
                            .push(format!("cell ({d},{i}) -> ({},{f}) not mirrored", d - 1));
                    }
                }
                let expected = match self.kind {
                    Kind::Cubical { .. } => 2 * d,
                    Kind::Simplicial => d + 1,
                };
                if fs.len() != expected {
                    rep.dangling_incidences.push(format!(
                        "cell ({d},{i}) has {} faces, expected {expected}",
                        fs.len()
                    ));
                }
            }
        }
        for d in 2..=self.t {
            let mut count: HashMap<u32, usize> = HashMap::new();
            for (i, fs) in self.faces[d].iter().enumerate() {
                count.clear();
                for &f in fs {
                    for &g in &self.faces[d - 1][f as usize] {
                        *count.entry(g).or_default() += 1;
                    }
                }
                let mut bad: Vec<_> = count.iter().filter(|(_, &c)| c != 2).collect();
                bad.sort();
                for (g, c) in bad {
                    rep.diamond_violations.push(format!(
                        "({},{g}) < ({d},{i}) has {c} intermediate cells",
                        d - 2
                    ));
                }
            }
        }
        rep.top_components = self.top_components();
        rep
    }

    fn top_components(&self) -> usize {
        let t = self.t;
        let n = self.count(t);
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        if t > 0 {
            for co in &self.cofaces[t - 1] {
                for w in co.windows(2) {
                    let (a, b) = (find(&mut parent, w[0] as usize), find(&mut parent, w[1] as usize));
                    parent[a] = b;
                }
            }
        }
        (0..n).filter(|&x| find(&mut parent, x) == x).count()
    }

    /// JSON form: dimension, cells per dimension, and covering pairs.
    pub fn to_json(&self) -> serde_json::Value {
        let mut incidence = Vec::new();
        for d in 1..=self.t {
            for (i, fs) in self.faces[d].iter().enumerate() {
                for &f in fs {
                    incidence.push(serde_json::json!([[d - 1, f], [d, i]]));
                }
            }
        }
        serde_json::json!({
            "t": self.t,
            "cells": self.cells,
            "incidence": incidence,
        })
    }
}
