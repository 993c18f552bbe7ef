//! The Bruhat-Tits tree of `PGL_2(F_p)` truncated at a depth, embedding
//! levels of its vertices for a local `O_K`, and `K_p^x`-orbits of
//! optimally embedded paths.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::cycles::Mat2;
use crate::nfield::{valuation, ElementF, FieldError, IdealF, QuadExtension, Residue, ResidueRing, RealQuadraticField, Splitting};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TreeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("vertex at distance {0} lies beyond the truncation depth {1}")]
    DepthExceeded(u32, u32),
    #[error("truncation too shallow for the requested paths")]
    TruncationInsufficient,
}

/// A vertex at distance `k` from the base lattice `O^2`, as a point of
/// `P^1(O/p^k)`: `[[pi^k, u], [0, 1]]` or `[[1, 0], [pi v, pi^k]]` with
/// `v` modulo `p^(k-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeVertex {
    pub k: u32,
    pub chart: Chart,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chart {
    Upper(Residue),
    Lower(Residue),
}

impl TreeVertex {
    pub fn base() -> TreeVertex {
        TreeVertex { k: 0, chart: Chart::Upper(Residue { x: 0, y: 0 }) }
    }
}

/// `Psi(theta)` for a local generator `theta` of `O_{K_p}` over `O_p`.
#[derive(Clone, Debug)]
pub struct LocalEmbeddingData {
    pub prime: IdealF,
    pub residue_char: u64,
    pub q: u64,
    pub splitting: Splitting,
    /// `theta^2 = t theta - n`.
    pub t: ElementF,
    pub n: ElementF,
    pub psi: Mat2,
}

impl LocalEmbeddingData {
    /// `K_p = F_p x F_p` with `Psi(e) = diag(1, 0)`.
    pub fn split(field: &RealQuadraticField, prime: &IdealF) -> Result<LocalEmbeddingData, TreeError> {
        let ring = ResidueRing::new(field, prime, 1)?;
        let (one, zero) = (field.int(1), field.int(0));
        Ok(LocalEmbeddingData {
            prime: prime.clone(),
            residue_char: ring.residue_char(),
            q: ring.q(),
            splitting: Splitting::Split,
            t: one.clone(),
            n: zero.clone(),
            psi: Mat2::new(one, zero.clone(), zero.clone(), zero),
        })
    }

    /// Local data of `K` at `prime`: diagonal when split, the regular
    /// representation `[[0, -n], [1, t]]` otherwise.
    pub fn from_extension(ext: &QuadExtension, prime: &IdealF) -> Result<LocalEmbeddingData, TreeError> {
        let field = ext.base();
        let splitting = ext.place_splitting(&crate::nfield::Place::Finite(prime.clone()))?;
        if splitting == Splitting::Split {
            return LocalEmbeddingData::split(field, prime);
        }
        let ring = ResidueRing::new(field, prime, 1)?;
        let (t, n) = ext.theta_poly();
        let psi = Mat2::new(field.int(0), -n, field.int(1), t.clone());
        Ok(LocalEmbeddingData { prime: prime.clone(), residue_char: ring.residue_char(), q: ring.q(), splitting, t: t.clone(), n: n.clone(), psi })
    }

    /// `N(x + y theta)`.
    fn norm(&self, x: &ElementF, y: &ElementF) -> ElementF {
        &(&(x * x) + &(&(&self.t * x) * y)) + &(&self.n * &(y * y))
    }

    /// `Psi(x + y theta)`.
    pub fn image(&self, x: &ElementF, y: &ElementF) -> Mat2 {
        Mat2::scalar(x).add(&self.psi.scale(y))
    }
}

/// The tree truncated at `depth`, with every vertex enumerated.
#[derive(Clone, Debug)]
pub struct BruhatTitsTree {
    field: RealQuadraticField,
    prime: IdealF,
    pi: ElementF,
    depth: u32,
    rings: Vec<Option<ResidueRing>>,
    vertices: Vec<TreeVertex>,
    index: BTreeMap<TreeVertex, usize>,
    adjacency: Vec<Vec<usize>>,
}

impl BruhatTitsTree {
    pub fn new(field: &RealQuadraticField, prime: &IdealF, depth: u32) -> Result<BruhatTitsTree, TreeError> {
        let mut rings = Vec::with_capacity(depth as usize + 1);
        rings.push(None);
        for k in 1..=depth {
            rings.push(Some(ResidueRing::new(field, prime, k)?));
        }
        let mut tree = BruhatTitsTree {
            field: field.clone(),
            prime: prime.clone(),
            pi: prime.gen().clone(),
            depth,
            rings,
            vertices: Vec::new(),
            index: BTreeMap::new(),
            adjacency: Vec::new(),
        };
        tree.insert(TreeVertex::base());
        let mut frontier = 0;
        while frontier < tree.vertices.len() {
            let v = tree.vertices[frontier];
            if v.k < depth {
                for w in tree.neighbors(&v)? {
                    let j = tree.insert(w);
                    if !tree.adjacency[frontier].contains(&j) {
                        tree.adjacency[frontier].push(j);
                        tree.adjacency[j].push(frontier);
                    }
                }
            }
            frontier += 1;
        }
        Ok(tree)
    }

    fn insert(&mut self, v: TreeVertex) -> usize {
        if let Some(&i) = self.index.get(&v) {
            return i;
        }
        let i = self.vertices.len();
        self.vertices.push(v);
        self.index.insert(v, i);
        self.adjacency.push(Vec::new());
        i
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn vertices(&self) -> &[TreeVertex] {
        &self.vertices
    }

    pub fn index_of(&self, v: &TreeVertex) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// Neighbors among the enumerated vertices.
    pub fn adjacent(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    fn ring(&self, k: u32) -> Option<&ResidueRing> {
        self.rings.get(k as usize).and_then(|r| r.as_ref())
    }

    fn pi_pow(&self, k: u32) -> ElementF {
        self.pi.pow(k as i64)
    }

    pub fn matrix(&self, v: &TreeVertex) -> Mat2 {
        let f = &self.field;
        match v.chart {
            Chart::Upper(u) => {
                let lift = self.ring(v.k).map_or(f.int(0), |r| r.lift(f, u));
                Mat2::new(self.pi_pow(v.k), lift, f.int(0), f.int(1))
            }
            Chart::Lower(w) => {
                let lift = self.ring(v.k - 1).map_or(f.int(0), |r| r.lift(f, w));
                Mat2::new(f.int(1), f.int(0), &self.pi * &lift, self.pi_pow(v.k))
            }
        }
    }

    fn val(&self, e: &ElementF) -> Option<i64> {
        if e.is_zero() {
            None
        } else {
            Some(valuation(&self.field, &self.prime, e))
        }
    }

    fn reduce(&self, k: u32, e: &ElementF) -> Residue {
        match self.ring(k) {
            Some(r) => r.reduce(&self.field, e).expect("p-integral"),
            None => Residue { x: 0, y: 0 },
        }
    }

    /// The vertex `[h O^2]`.
    pub fn canonicalize(&self, h: &Mat2) -> TreeVertex {
        let entries = [&h.a, &h.b, &h.c, &h.d];
        let m = entries.iter().filter_map(|e| self.val(e)).min().expect("invertible");
        let s = self.pi.pow(-m);
        let h = h.scale(&s);
        let k = self.val(&h.det()).expect("invertible") as u32;
        if k == 0 {
            return TreeVertex::base();
        }
        let unit = |e: &ElementF| self.val(e) == Some(0);
        let (wx, wy) = if unit(&h.a) || unit(&h.c) { (&h.a, &h.c) } else { (&h.b, &h.d) };
        if unit(wy) {
            let u = wx.div(wy).expect("unit");
            TreeVertex { k, chart: Chart::Upper(self.reduce(k, &u)) }
        } else {
            let sl = wy.div(wx).expect("unit").div(&self.pi).expect("nonzero");
            TreeVertex { k, chart: Chart::Lower(self.reduce(k - 1, &sl)) }
        }
    }

    /// The `q + 1` vertices at distance one.
    pub fn neighbors(&self, v: &TreeVertex) -> Result<Vec<TreeVertex>, TreeError> {
        if v.k >= self.depth {
            return Err(TreeError::DepthExceeded(v.k + 1, self.depth));
        }
        let f = &self.field;
        let g = self.matrix(v);
        let r1 = ResidueRing::new(f, &self.prime, 1)?;
        let mut out = Vec::with_capacity(r1.q() as usize + 1);
        for a in r1.elements() {
            let step = Mat2::new(self.pi.clone(), r1.lift(f, a), f.int(0), f.int(1));
            out.push(self.canonicalize(&g.mul(&step)));
        }
        let step = Mat2::new(f.int(1), f.int(0), f.int(0), self.pi.clone());
        out.push(self.canonicalize(&g.mul(&step)));
        Ok(out)
    }

    /// `n` with `Psi(K) cap End(L) = O + p^n O_K`.
    pub fn embedding_level(&self, v: &TreeVertex, emb: &LocalEmbeddingData) -> u32 {
        let g = self.matrix(v);
        let a = g.inv().expect("invertible").mul(&emb.psi).mul(&g);
        let diff = &a.d - &a.a;
        let m = [&a.b, &a.c, &diff].iter().filter_map(|e| self.val(e)).min().unwrap_or(0);
        if m < 0 {
            (-m) as u32
        } else {
            0
        }
    }

    pub fn levels(&self, emb: &LocalEmbeddingData) -> Vec<u32> {
        self.vertices.iter().map(|v| self.embedding_level(v, emb)).collect()
    }

    /// Generators of `Psi(K_p^x)` modulo `F_p^x`, up to `1 + p^(depth+1)`.
    pub fn torus_generators(&self, emb: &LocalEmbeddingData) -> Result<Vec<Mat2>, TreeError> {
        let f = &self.field;
        let r1 = ResidueRing::new(f, &self.prime, 1)?;
        let mut gens = Vec::new();
        let reps: Vec<ElementF> = r1.elements().map(|r| r1.lift(f, r)).collect();
        for x in &reps {
            for y in &reps {
                if y.is_zero() {
                    continue;
                }
                if self.val(&emb.norm(x, y)) == Some(0) {
                    gens.push(emb.image(x, y));
                }
            }
        }
        let omega = f.omega();
        for j in 1..=self.depth + 1 {
            let pj = self.pi_pow(j);
            for (cx, cy) in [(f.int(1), f.int(0)), (omega.clone(), f.int(0)), (f.int(0), f.int(1)), (f.int(0), omega.clone())] {
                gens.push(emb.image(&(&f.int(1) + &(&pj * &cx)), &(&pj * &cy)));
            }
        }
        match emb.splitting {
            Splitting::Split => gens.push(emb.image(&f.int(1), &(&self.pi - &f.int(1)))),
            Splitting::Ramified => {
                let r2 = ResidueRing::new(f, &self.prime, 2)?;
                let reps2: Vec<ElementF> = r2.elements().map(|r| r2.lift(f, r)).collect();
                let uni = reps2
                    .iter()
                    .flat_map(|x| reps2.iter().map(move |y| (x, y)))
                    .find(|(x, y)| self.val(&emb.norm(x, y)) == Some(1))
                    .ok_or(TreeError::TruncationInsufficient)?;
                gens.push(emb.image(uni.0, uni.1));
            }
            Splitting::Inert => {}
        }
        Ok(gens)
    }

    /// Oriented non-backtracking paths of length `delta` with both ends at the
    /// minimal level.
    pub fn optimal_paths(&self, levels: &[u32], delta: u32) -> Vec<Vec<usize>> {
        let min = levels.iter().copied().min().unwrap_or(0);
        let mut out = Vec::new();
        for start in 0..self.vertices.len() {
            if levels[start] != min {
                continue;
            }
            let mut stack = alloc::vec![alloc::vec![start]];
            while let Some(path) = stack.pop() {
                if path.len() as u32 == delta + 1 {
                    if levels[*path.last().expect("nonempty")] == min {
                        out.push(path);
                    }
                    continue;
                }
                let last = *path.last().expect("nonempty");
                let prev = if path.len() >= 2 { Some(path[path.len() - 2]) } else { None };
                for &n in &self.adjacency[last] {
                    if Some(n) != prev {
                        let mut p = path.clone();
                        p.push(n);
                        stack.push(p);
                    }
                }
            }
        }
        out.sort();
        out
    }

    /// Image of a path under `m`, if it stays within the truncation.
    pub fn act(&self, m: &Mat2, path: &[usize]) -> Option<Vec<usize>> {
        path.iter().map(|&i| self.index_of(&self.canonicalize(&m.mul(&self.matrix(&self.vertices[i]))))).collect()
    }

    /// Orbit labels of the optimal paths of length `delta`.
    pub fn path_orbits(&self, emb: &LocalEmbeddingData, delta: u32) -> Result<(Vec<Vec<usize>>, Vec<usize>), TreeError> {
        if self.depth < delta + 2 {
            return Err(TreeError::TruncationInsufficient);
        }
        let levels = self.levels(emb);
        let paths = self.optimal_paths(&levels, delta);
        let pos: BTreeMap<&Vec<usize>, usize> = paths.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut uf = UnionFind::new(paths.len());
        for g in self.torus_generators(emb)? {
            for (i, p) in paths.iter().enumerate() {
                if let Some(img) = self.act(&g, p) {
                    if let Some(&j) = pos.get(&img) {
                        uf.union(i, j);
                    }
                }
            }
        }
        let labels = (0..paths.len()).map(|i| uf.find(i)).collect();
        Ok((paths, labels))
    }

    pub fn orbit_count(&self, emb: &LocalEmbeddingData, delta: u32) -> Result<usize, TreeError> {
        let (_, labels) = self.path_orbits(emb, delta)?;
        let mut roots: Vec<usize> = labels;
        roots.sort();
        roots.dedup();
        Ok(roots.len())
    }

    pub fn field(&self) -> &RealQuadraticField {
        &self.field
    }

    pub fn uniformizer(&self) -> &ElementF {
        &self.pi
    }
}

/// Vertex and edge counts of the level-zero subgraph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelShape {
    pub vertices: usize,
    pub edges: usize,
    pub max_degree: usize,
}

impl LevelShape {
    /// `line`, `point`, `edge` or `other`, with a line required to run
    /// through the whole truncation.
    pub fn label(&self, depth: u32) -> &'static str {
        let d = depth as usize;
        match (self.vertices, self.edges, self.max_degree) {
            (1, 0, _) => "point",
            (2, 1, _) => "edge",
            (n, e, 2) if n == 2 * d + 1 && e == 2 * d => "line",
            _ => "other",
        }
    }
}

impl BruhatTitsTree {
    pub fn level_zero_shape(&self, levels: &[u32]) -> LevelShape {
        let zero: Vec<usize> = (0..levels.len()).filter(|&i| levels[i] == 0).collect();
        let deg = |i: usize| self.adjacent(i).iter().filter(|&&j| levels[j] == 0).count();
        let edges = zero.iter().map(|&i| deg(i)).sum::<usize>() / 2;
        let max_degree = zero.iter().map(|&i| deg(i)).max().unwrap_or(0);
        LevelShape { vertices: zero.len(), edges, max_degree }
    }

    /// Whether `W_delta` maps every optimal path it keeps in range to a
    /// path in a different orbit, and keeps at least one.
    pub fn atkin_lehner_swaps(&self, emb: &LocalEmbeddingData, delta: u32) -> Result<bool, TreeError> {
        let (paths, labels) = self.path_orbits(emb, delta)?;
        let w = atkin_lehner(self, delta);
        let mut moved = 0;
        for (i, path) in paths.iter().enumerate() {
            if let Some(img) = self.act(&w, path) {
                match paths.iter().position(|q| *q == img) {
                    Some(j) if labels[i] != labels[j] => moved += 1,
                    _ => return Ok(false),
                }
            }
        }
        Ok(moved > 0)
    }
}

/// Local data of the requested type at `prime`, from the first
/// `F(sqrt(x + y omega))` in a small box that has it.
pub fn find_local_embedding(field: &RealQuadraticField, prime: &IdealF, want: Splitting) -> Result<LocalEmbeddingData, TreeError> {
    if want == Splitting::Split {
        return LocalEmbeddingData::split(field, prime);
    }
    for y in -4i64..=4 {
        for x in -6i64..=6 {
            let d = field.from_small_coords(x, y);
            let Ok(k) = QuadExtension::new(field, &d) else { continue };
            let emb = LocalEmbeddingData::from_extension(&k, prime)?;
            if emb.splitting == want {
                return Ok(emb);
            }
        }
    }
    Err(TreeError::Field(FieldError::NotAdmissible("no local extension of that type in the search box")))
}

/// `[[0, pi^delta], [1, 0]]`.
pub fn atkin_lehner(tree: &BruhatTitsTree, delta: u32) -> Mat2 {
    let f = tree.field();
    Mat2::new(f.int(0), tree.uniformizer().pow(delta as i64), f.int(1), f.int(0))
}

/// Disjoint-set forest with path halving.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfield::{make_field, splitting_type};

    #[test]
    fn neighbor_counts_and_distances() {
        let f = make_field(5).unwrap();
        let p2 = splitting_type(&f, 2).unwrap().primes[0].clone();
        let tree = BruhatTitsTree::new(&f, &p2, 3).unwrap();
        let q = 4usize;
        assert_eq!(tree.vertices().len(), 1 + (q + 1) + (q + 1) * q + (q + 1) * q * q);
        for (i, v) in tree.vertices().iter().enumerate() {
            if v.k < 3 {
                assert_eq!(tree.adjacent(i).len(), q + 1);
            }
        }
        let base = TreeVertex::base();
        assert_eq!(tree.neighbors(&base).unwrap().len(), 5);
        for w in tree.neighbors(&base).unwrap() {
            assert!(tree.neighbors(&w).unwrap().contains(&base));
        }
    }
}
