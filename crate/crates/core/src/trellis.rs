//! Conventional and tail-biting trellises.
//!
//! A [`Trellis`] is a layered edge-labeled digraph. A conventional trellis of
//! depth `n` has `n + 1` vertex classes with single-vertex end classes; a
//! tail-biting trellis of depth `n` has `n` classes and its last section wraps
//! back into class 0. Vertices are addressed by `(class, index)` and, when the
//! trellis is labeled, each vertex also carries a vector label that is unique
//! within its class.
//!
//! Codewords are read off root-to-goal paths (conventional) or closed walks of
//! length `n` starting in class 0 (tail-biting).

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::galois::{check_cap, pow_count, Field, Matrix, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Conventional,
    TailBiting,
}

/// An edge of one trellis section, from a vertex of class `i` to a vertex of
/// the next class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub symbol: u32,
    pub to: usize,
}

impl Edge {
    pub fn new(from: usize, symbol: u32, to: usize) -> Self {
        Edge { from, symbol, to }
    }
}

/// Two vertices of one class whose merger leaves the represented code intact.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MergeWitness {
    pub class: usize,
    pub first: usize,
    pub second: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trellis {
    field: Field,
    shape: Shape,
    class_sizes: Vec<usize>,
    sections: Vec<Vec<Edge>>,
    labels: Option<Vec<Vec<Vector>>>,
}

/// Per-class state counts and their base-`q` logarithms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateComplexityProfile {
    q: u32,
    sizes: Vec<usize>,
}

fn exact_log(q: u32, size: usize) -> Option<u32> {
    let mut acc = 1usize;
    let mut e = 0;
    while acc < size {
        acc = acc.checked_mul(q as usize)?;
        e += 1;
    }
    (acc == size).then_some(e)
}

impl StateComplexityProfile {
    pub fn new(q: u32, sizes: Vec<usize>) -> Self {
        StateComplexityProfile { q, sizes }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    /// `log_q |V_i|` where the class size is a power of `q`.
    pub fn values(&self) -> Vec<Option<u32>> {
        self.sizes.iter().map(|&s| exact_log(self.q, s)).collect()
    }

    /// Integral profile; `None` if some class size is not a power of `q`.
    pub fn exact_values(&self) -> Option<Vec<u32>> {
        self.values().into_iter().collect()
    }

    pub fn max_size(&self) -> usize {
        self.sizes.iter().copied().max().unwrap_or(0)
    }

    pub fn s_max(&self) -> Option<u32> {
        exact_log(self.q, self.max_size())
    }
}

impl fmt::Display for StateComplexityProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .sizes
            .iter()
            .map(|&s| match exact_log(self.q, s) {
                Some(v) => v.to_string(),
                None => format!("|{s}|"),
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

fn hash_of<T: Hash>(value: &T) -> u64 {
    let mut h = DefaultHasher::new();
    value.hash(&mut h);
    h.finish()
}

impl Trellis {
    pub fn new(
        field: Field,
        shape: Shape,
        class_sizes: Vec<usize>,
        mut sections: Vec<Vec<Edge>>,
        labels: Option<Vec<Vec<Vector>>>,
    ) -> Result<Self> {
        let n = sections.len();
        if n == 0 {
            return Err(Error::Malformed("depth must be positive".into()));
        }
        let expected_classes = match shape {
            Shape::Conventional => n + 1,
            Shape::TailBiting => n,
        };
        if class_sizes.len() != expected_classes {
            return Err(Error::Malformed(format!(
                "{} classes for depth {n}, expected {expected_classes}",
                class_sizes.len()
            )));
        }
        if class_sizes.contains(&0) {
            return Err(Error::Malformed(
                "every vertex class must be nonempty".into(),
            ));
        }
        if shape == Shape::Conventional && (class_sizes[0] != 1 || class_sizes[n] != 1) {
            return Err(Error::Malformed(
                "a conventional trellis needs single-vertex first and last classes".into(),
            ));
        }
        for (i, sec) in sections.iter_mut().enumerate() {
            let next = (i + 1) % expected_classes;
            for e in sec.iter() {
                if e.from >= class_sizes[i] || e.to >= class_sizes[next] {
                    return Err(Error::Malformed(format!(
                        "edge {e:?} in section {i} is out of range"
                    )));
                }
                if e.symbol >= field.order() {
                    return Err(Error::Malformed(format!(
                        "edge symbol {} is not in {field}",
                        e.symbol
                    )));
                }
            }
            sec.sort();
            sec.dedup();
        }
        if let Some(labels) = &labels {
            if labels.len() != expected_classes {
                return Err(Error::Malformed(
                    "label classes do not match vertex classes".into(),
                ));
            }
            for (i, (ls, &size)) in labels.iter().zip(&class_sizes).enumerate() {
                if ls.len() != size {
                    return Err(Error::Malformed(format!(
                        "class {i} has {size} vertices but {} labels",
                        ls.len()
                    )));
                }
                let distinct: BTreeSet<&Vector> = ls.iter().collect();
                if distinct.len() != ls.len() {
                    return Err(Error::Malformed(format!(
                        "duplicate vertex labels in class {i}"
                    )));
                }
            }
        }
        Ok(Trellis {
            field,
            shape,
            class_sizes,
            sections,
            labels,
        })
    }

    /// Builds a labeled trellis from label sets and label-addressed edges.
    pub fn from_labeled(
        field: Field,
        shape: Shape,
        classes: Vec<Vec<Vector>>,
        edges: Vec<Vec<(Vector, u32, Vector)>>,
    ) -> Result<Self> {
        let num = classes.len();
        let index: Vec<HashMap<&Vector, usize>> = classes
            .iter()
            .map(|c| c.iter().enumerate().map(|(i, l)| (l, i)).collect())
            .collect();
        let mut sections = Vec::with_capacity(edges.len());
        for (i, sec) in edges.iter().enumerate() {
            if num == 0 {
                break;
            }
            let next = (i + 1) % num;
            let mut out = Vec::with_capacity(sec.len());
            for (a, s, b) in sec {
                let from = *index
                    .get(i)
                    .and_then(|m| m.get(a))
                    .ok_or_else(|| Error::Malformed(format!("unknown vertex {a} in class {i}")))?;
                let to = *index.get(next).and_then(|m| m.get(b)).ok_or_else(|| {
                    Error::Malformed(format!("unknown vertex {b} in class {next}"))
                })?;
                out.push(Edge::new(from, *s, to));
            }
            sections.push(out);
        }
        let sizes = classes.iter().map(Vec::len).collect();
        Self::new(field, shape, sizes, sections, Some(classes))
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn shape(&self) -> Shape {
        self.shape
    }

    #[inline]
    pub fn is_tail_biting(&self) -> bool {
        self.shape == Shape::TailBiting
    }

    /// Number of sections, i.e. the code length.
    #[inline]
    pub fn depth(&self) -> usize {
        self.sections.len()
    }

    #[inline]
    pub fn num_classes(&self) -> usize {
        self.class_sizes.len()
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    pub fn class_size(&self, class: usize) -> usize {
        self.class_sizes[class]
    }

    pub fn section(&self, i: usize) -> &[Edge] {
        &self.sections[i]
    }

    pub fn sections(&self) -> &[Vec<Edge>] {
        &self.sections
    }

    pub fn is_labeled(&self) -> bool {
        self.labels.is_some()
    }

    pub fn labels(&self, class: usize) -> Option<&[Vector]> {
        self.labels.as_ref().map(|l| l[class].as_slice())
    }

    pub fn label(&self, class: usize, vertex: usize) -> Option<&Vector> {
        self.labels.as_ref().map(|l| &l[class][vertex])
    }

    pub fn vertex_by_label(&self, class: usize, label: &Vector) -> Option<usize> {
        self.labels.as_ref()?[class].iter().position(|l| l == label)
    }

    /// Class reached after `layer` sections from class 0.
    #[inline]
    fn class_of_layer(&self, layer: usize) -> usize {
        layer % self.num_classes()
    }

    fn out_edges(&self, section: usize, v: usize) -> &[Edge] {
        let sec = &self.sections[section];
        let lo = sec.partition_point(|e| e.from < v);
        let hi = sec.partition_point(|e| e.from <= v);
        &sec[lo..hi]
    }

    fn closes(&self, start: usize, end: usize) -> bool {
        match self.shape {
            Shape::Conventional => true,
            Shape::TailBiting => start == end,
        }
    }

    pub fn scp(&self) -> StateComplexityProfile {
        StateComplexityProfile::new(self.field.order(), self.class_sizes.clone())
    }

    /// `alive[layer][v]`: vertex `v` of layer `layer` lies on some full path
    /// from `start` that closes.
    fn co_reachable(&self, start: usize) -> Vec<Vec<bool>> {
        let n = self.depth();
        let mut alive: Vec<Vec<bool>> = (0..=n)
            .map(|l| vec![false; self.class_sizes[self.class_of_layer(l)]])
            .collect();
        for v in 0..alive[n].len() {
            alive[n][v] = self.closes(start, v);
        }
        for layer in (0..n).rev() {
            for e in &self.sections[layer] {
                if alive[layer + 1][e.to] {
                    alive[layer][e.from] = true;
                }
            }
        }
        alive
    }

    fn forward_reach(&self, start: usize) -> Vec<Vec<bool>> {
        let n = self.depth();
        let mut reach: Vec<Vec<bool>> = (0..=n)
            .map(|l| vec![false; self.class_sizes[self.class_of_layer(l)]])
            .collect();
        reach[0][start] = true;
        for layer in 0..n {
            for e in &self.sections[layer] {
                if reach[layer][e.from] {
                    reach[layer + 1][e.to] = true;
                }
            }
        }
        reach
    }

    /// Visits every complete path (conventional) or cycle (tail-biting) with
    /// its vertex sequence (`n + 1` entries) and symbol sequence.
    pub fn for_each_path(&self, cap: usize, mut visit: impl FnMut(&[usize], &[u32])) -> Result<()> {
        let mut count = 0usize;
        for start in 0..self.class_sizes[0] {
            let alive = self.co_reachable(start);
            if !alive[0][start] {
                continue;
            }
            let mut verts = vec![start];
            let mut syms = Vec::with_capacity(self.depth());
            self.walk(
                0, start, &alive, &mut verts, &mut syms, &mut count, cap, &mut visit,
            )?;
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        layer: usize,
        v: usize,
        alive: &[Vec<bool>],
        verts: &mut Vec<usize>,
        syms: &mut Vec<u32>,
        count: &mut usize,
        cap: usize,
        visit: &mut impl FnMut(&[usize], &[u32]),
    ) -> Result<()> {
        if layer == self.depth() {
            *count += 1;
            if *count > cap {
                return Err(Error::CapExceeded {
                    what: "trellis paths",
                    needed: *count as u128,
                    cap,
                });
            }
            visit(verts, syms);
            return Ok(());
        }
        for e in self.out_edges(layer, v) {
            if alive[layer + 1][e.to] {
                verts.push(e.to);
                syms.push(e.symbol);
                self.walk(layer + 1, e.to, alive, verts, syms, count, cap, visit)?;
                verts.pop();
                syms.pop();
            }
        }
        Ok(())
    }

    /// The code `C(T)`: edge-label sequences of all paths (cycles).
    pub fn represented_code(&self, cap: usize) -> Result<BTreeSet<Vector>> {
        let mut code = BTreeSet::new();
        let field = self.field;
        self.for_each_path(cap, |_, syms| {
            code.insert(Vector::new(field, syms.to_vec()));
        })?;
        Ok(code)
    }

    /// The label code `S(T)`: alternating vertex-label / edge-symbol sequences.
    ///
    /// Conventional paths contribute all `n + 1` vertex labels; cycles
    /// contribute `n` (the closing vertex is the starting one).
    pub fn label_code(&self, cap: usize) -> Result<BTreeSet<Vector>> {
        let labels = self.labels.as_ref().ok_or(Error::Unlabeled)?;
        let n = self.depth();
        let last_layer = match self.shape {
            Shape::Conventional => n,
            Shape::TailBiting => n - 1,
        };
        let mut out = BTreeSet::new();
        self.for_each_path(cap, |verts, syms| {
            let mut seq = Vec::new();
            for layer in 0..=last_layer {
                let class = self.class_of_layer(layer);
                seq.extend_from_slice(labels[class][verts[layer]].entries());
                if layer < n {
                    seq.push(syms[layer]);
                }
            }
            out.insert(Vector::new(self.field, seq));
        })?;
        Ok(out)
    }

    /// Whether the label code is a vector space under the current labeling.
    pub fn is_linear(&self, cap: usize) -> Result<bool> {
        let s = self.label_code(cap)?;
        let Some(first) = s.iter().next() else {
            return Ok(false);
        };
        let width = first.len();
        if s.iter().any(|v| v.len() != width) {
            return Ok(false);
        }
        let rows: Vec<Vector> = s.iter().cloned().collect();
        let rank = Matrix::from_rows(self.field, width, &rows)?.rank();
        Ok(pow_count(self.field.order(), rank) == s.len() as u128)
    }

    /// No vertex has two out-edges, or two in-edges, with the same symbol.
    pub fn is_biproper(&self) -> bool {
        self.sections.iter().all(|sec| {
            let outs_ok = sec
                .windows(2)
                .all(|w| (w[0].from, w[0].symbol) != (w[1].from, w[1].symbol));
            let mut ins: Vec<(usize, u32)> = sec.iter().map(|e| (e.to, e.symbol)).collect();
            ins.sort_unstable();
            let ins_ok = ins.windows(2).all(|w| w[0] != w[1]);
            outs_ok && ins_ok
        })
    }

    /// Every vertex lies on at least one full path (cycle).
    pub fn is_reduced(&self) -> bool {
        let n = self.depth();
        let mut covered: Vec<Vec<bool>> =
            self.class_sizes.iter().map(|&s| vec![false; s]).collect();
        for start in 0..self.class_sizes[0] {
            let alive = self.co_reachable(start);
            let reach = self.forward_reach(start);
            for layer in 0..=n {
                let class = self.class_of_layer(layer);
                for v in 0..covered[class].len() {
                    if alive[layer][v] && reach[layer][v] {
                        covered[class][v] = true;
                    }
                }
            }
        }
        covered.iter().flatten().all(|&c| c)
    }

    /// Out-degree of the vertices of each section's source class, or `None`
    /// where the degrees are not uniform.
    pub fn out_degree_profile(&self) -> Vec<Option<usize>> {
        self.sections
            .iter()
            .enumerate()
            .map(|(i, sec)| {
                let mut deg = vec![0usize; self.class_sizes[i]];
                for e in sec {
                    deg[e.from] += 1;
                }
                let first = deg[0];
                deg.iter().all(|&d| d == first).then_some(first)
            })
            .collect()
    }

    /// Replaces vertex `drop` of `class` by vertex `keep`, retaining all edges.
    pub fn merge_vertices(&self, class: usize, keep: usize, drop: usize) -> Result<Trellis> {
        let size = self.class_sizes[class];
        if keep >= size || drop >= size || keep == drop {
            return Err(Error::Precondition(format!(
                "cannot merge vertices {keep} and {drop} of class {class}"
            )));
        }
        let remap = |v: usize| {
            let v = if v == drop { keep } else { v };
            if v > drop {
                v - 1
            } else {
                v
            }
        };
        let num = self.num_classes();
        let sections = self
            .sections
            .iter()
            .enumerate()
            .map(|(i, sec)| {
                sec.iter()
                    .map(|e| {
                        let from = if i == class { remap(e.from) } else { e.from };
                        let to = if (i + 1) % num == class {
                            remap(e.to)
                        } else {
                            e.to
                        };
                        Edge::new(from, e.symbol, to)
                    })
                    .collect()
            })
            .collect();
        let mut sizes = self.class_sizes.clone();
        sizes[class] -= 1;
        let labels = self.labels.as_ref().map(|ls| {
            let mut ls = ls.clone();
            ls[class].remove(drop);
            ls
        });
        Trellis::new(self.field, self.shape, sizes, sections, labels)
    }

    /// Finds a same-class vertex pair whose merger leaves `C(T)` unchanged.
    ///
    /// A merger can only add words: those formed by a prefix into one vertex
    /// followed by a suffix out of the other. The pair is mergeable iff every
    /// such word already belongs to the code.
    pub fn mergeable_pair(&self, cap: usize) -> Result<Option<MergeWitness>> {
        let code: HashSet<Vec<u32>> = self
            .represented_code(cap)?
            .into_iter()
            .map(|v| v.entries().to_vec())
            .collect();
        let n = self.depth();
        let starts = self.class_sizes[0];
        let mut stored = 0usize;

        // prefixes[s][layer][v], suffixes[s][layer][v]
        let mut prefixes = Vec::with_capacity(starts);
        let mut suffixes = Vec::with_capacity(starts);
        for s in 0..starts {
            let mut pre: Vec<Vec<HashSet<Vec<u32>>>> = (0..=n)
                .map(|l| vec![HashSet::new(); self.class_sizes[self.class_of_layer(l)]])
                .collect();
            pre[0][s].insert(Vec::new());
            for layer in 0..n {
                for e in &self.sections[layer] {
                    let words: Vec<Vec<u32>> = pre[layer][e.from].iter().cloned().collect();
                    for mut w in words {
                        w.push(e.symbol);
                        if pre[layer + 1][e.to].insert(w) {
                            stored += 1;
                        }
                    }
                }
                check_cap("merge prefixes", stored as u128, cap)?;
            }
            let mut suf: Vec<Vec<HashSet<Vec<u32>>>> = (0..=n)
                .map(|l| vec![HashSet::new(); self.class_sizes[self.class_of_layer(l)]])
                .collect();
            for v in 0..suf[n].len() {
                if self.closes(s, v) {
                    suf[n][v].insert(Vec::new());
                }
            }
            for layer in (0..n).rev() {
                for e in &self.sections[layer] {
                    let words: Vec<Vec<u32>> = suf[layer + 1][e.to].iter().cloned().collect();
                    for w in words {
                        let mut x = Vec::with_capacity(w.len() + 1);
                        x.push(e.symbol);
                        x.extend_from_slice(&w);
                        if suf[layer][e.from].insert(x) {
                            stored += 1;
                        }
                    }
                }
                check_cap("merge suffixes", stored as u128, cap)?;
            }
            prefixes.push(pre);
            suffixes.push(suf);
        }

        let all_in_code = |ps: &HashSet<Vec<u32>>, xs: &HashSet<Vec<u32>>| {
            ps.iter().all(|p| {
                xs.iter().all(|x| {
                    let mut w = p.clone();
                    w.extend_from_slice(x);
                    code.contains(&w)
                })
            })
        };

        for class in 0..self.num_classes() {
            let size = self.class_sizes[class];
            for a in 0..size {
                for b in a + 1..size {
                    let ok = if self.is_tail_biting() && class == 0 {
                        // New cycles start at the merged vertex, leave through
                        // one original and return through the other.
                        prefixes[a][n][b].iter().all(|w| code.contains(w))
                            && prefixes[b][n][a].iter().all(|w| code.contains(w))
                    } else {
                        (0..starts).all(|s| {
                            all_in_code(&prefixes[s][class][a], &suffixes[s][class][b])
                                && all_in_code(&prefixes[s][class][b], &suffixes[s][class][a])
                        })
                    };
                    if ok {
                        return Ok(Some(MergeWitness {
                            class,
                            first: a,
                            second: b,
                        }));
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn is_mergeable(&self, cap: usize) -> Result<bool> {
        Ok(self.mergeable_pair(cap)?.is_some())
    }

    /// Cyclic shift so that old class `i` becomes class 0.
    pub fn rotate(&self, i: usize) -> Result<Trellis> {
        if !self.is_tail_biting() {
            return Err(Error::Precondition(
                "only tail-biting trellises can be rotated".into(),
            ));
        }
        let n = self.depth();
        let i = i % n;
        let order: Vec<usize> = (0..n).map(|j| (j + i) % n).collect();
        let sizes = order.iter().map(|&j| self.class_sizes[j]).collect();
        let sections = order.iter().map(|&j| self.sections[j].clone()).collect();
        let labels = self
            .labels
            .as_ref()
            .map(|ls| order.iter().map(|&j| ls[j].clone()).collect());
        Trellis::new(self.field, Shape::TailBiting, sizes, sections, labels)
    }

    /// Views a conventional trellis as a tail-biting one with `|V_0| = 1`.
    pub fn to_tail_biting(&self) -> Trellis {
        if self.is_tail_biting() {
            return self.clone();
        }
        let n = self.depth();
        let labels = self.labels.as_ref().map(|ls| ls[..n].to_vec());
        Trellis::new(
            self.field,
            Shape::TailBiting,
            self.class_sizes[..n].to_vec(),
            self.sections.clone(),
            labels,
        )
        .expect("a conventional trellis always folds into a tail-biting one")
    }

    /// Vertices of class `(from_class + steps)` reachable from `vertices`.
    pub fn image(
        &self,
        from_class: usize,
        vertices: &BTreeSet<usize>,
        steps: usize,
    ) -> BTreeSet<usize> {
        let mut cur = vertices.clone();
        let mut class = from_class;
        for _ in 0..steps {
            let mut next = BTreeSet::new();
            for e in &self.sections[class] {
                if cur.contains(&e.from) {
                    next.insert(e.to);
                }
            }
            cur = next;
            class = (class + 1) % self.num_classes();
        }
        cur
    }

    /// Vertices of class `(to_class - steps)` with a path into `vertices`.
    pub fn preimage(
        &self,
        to_class: usize,
        vertices: &BTreeSet<usize>,
        steps: usize,
    ) -> BTreeSet<usize> {
        let num = self.num_classes();
        let mut cur = vertices.clone();
        let mut class = to_class;
        for _ in 0..steps {
            let section = (class + num - 1) % num;
            let section = if section >= self.depth() {
                self.depth() - 1
            } else {
                section
            };
            let mut prev = BTreeSet::new();
            for e in &self.sections[section] {
                if cur.contains(&e.to) {
                    prev.insert(e.from);
                }
            }
            cur = prev;
            class = section;
        }
        cur
    }

    fn indices_of(&self, class: usize, labels: &BTreeSet<Vector>) -> Result<BTreeSet<usize>> {
        let ls = self.labels(class).ok_or(Error::Unlabeled)?;
        let index: HashMap<&Vector, usize> = ls.iter().enumerate().map(|(i, l)| (l, i)).collect();
        labels
            .iter()
            .map(|l| {
                index.get(l).copied().ok_or_else(|| {
                    Error::Precondition(format!("{l} is not a state of class {class}"))
                })
            })
            .collect()
    }

    fn labels_of(&self, class: usize, vertices: &BTreeSet<usize>) -> BTreeSet<Vector> {
        let ls = self.labels(class).expect("checked labeled");
        vertices.iter().map(|&v| ls[v].clone()).collect()
    }

    /// Label-level forward map `M^steps`.
    pub fn image_labels(
        &self,
        from_class: usize,
        labels: &BTreeSet<Vector>,
        steps: usize,
    ) -> Result<BTreeSet<Vector>> {
        let vs = self.indices_of(from_class, labels)?;
        let img = self.image(from_class, &vs, steps);
        Ok(self.labels_of((from_class + steps) % self.num_classes(), &img))
    }

    /// Label-level backward map `M^-steps`.
    pub fn preimage_labels(
        &self,
        to_class: usize,
        labels: &BTreeSet<Vector>,
        steps: usize,
    ) -> Result<BTreeSet<Vector>> {
        let vs = self.indices_of(to_class, labels)?;
        let pre = self.preimage(to_class, &vs, steps);
        let num = self.num_classes();
        Ok(self.labels_of((to_class + num * steps - steps) % num, &pre))
    }

    /// Vertex colors after `rounds` of refinement on in/out edge multisets.
    /// Colors are isomorphism invariants and comparable across trellises.
    fn refined_colors(&self, rounds: usize) -> Vec<Vec<u64>> {
        let num = self.num_classes();
        let n = self.depth();
        let mut outs: Vec<Vec<Vec<(u32, usize)>>> = self
            .class_sizes
            .iter()
            .map(|&s| vec![Vec::new(); s])
            .collect();
        let mut ins = outs.clone();
        for (i, sec) in self.sections.iter().enumerate() {
            let next = (i + 1) % num;
            for e in sec {
                outs[i][e.from].push((e.symbol, e.to));
                ins[next][e.to].push((e.symbol, e.from));
            }
        }
        let mut colors: Vec<Vec<u64>> = (0..num)
            .map(|c| {
                (0..self.class_sizes[c])
                    .map(|v| {
                        let mut o: Vec<u32> = outs[c][v].iter().map(|x| x.0).collect();
                        let mut i: Vec<u32> = ins[c][v].iter().map(|x| x.0).collect();
                        o.sort_unstable();
                        i.sort_unstable();
                        hash_of(&(c, o, i))
                    })
                    .collect()
            })
            .collect();
        for _ in 0..rounds {
            let next_colors: Vec<Vec<u64>> = (0..num)
                .map(|c| {
                    (0..self.class_sizes[c])
                        .map(|v| {
                            let nc = (c + 1) % num;
                            let pc = (c + num - 1) % num;
                            let mut o: Vec<(u32, u64)> = if c < n {
                                outs[c][v]
                                    .iter()
                                    .map(|&(s, t)| (s, colors[nc][t]))
                                    .collect()
                            } else {
                                Vec::new()
                            };
                            let mut i: Vec<(u32, u64)> =
                                ins[c][v].iter().map(|&(s, f)| (s, colors[pc][f])).collect();
                            o.sort_unstable();
                            i.sort_unstable();
                            hash_of(&(colors[c][v], o, i))
                        })
                        .collect()
                })
                .collect();
            colors = next_colors;
        }
        colors
    }

    /// A hash that agrees on isomorphic trellises.
    pub fn invariant_signature(&self) -> u64 {
        let colors = self.refined_colors(self.depth() + 1);
        let per_class: Vec<Vec<u64>> = colors
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        hash_of(&(self.field, self.shape, &self.class_sizes, per_class))
    }

    /// Layered-graph isomorphism preserving classes, sections and edge symbols.
    /// Vertex labels are ignored.
    pub fn isomorphic(&self, other: &Trellis) -> bool {
        if self.field != other.field
            || self.shape != other.shape
            || self.class_sizes != other.class_sizes
            || self
                .sections
                .iter()
                .zip(&other.sections)
                .any(|(a, b)| a.len() != b.len())
        {
            return false;
        }
        let rounds = self.depth() + 1;
        let ca = self.refined_colors(rounds);
        let cb = other.refined_colors(rounds);
        for (a, b) in ca.iter().zip(&cb) {
            let mut a = a.clone();
            let mut b = b.clone();
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return false;
            }
        }
        let mut search = IsoSearch::new(self, other, ca, cb);
        search.run(0)
    }
}

struct IsoSearch<'a> {
    a: &'a Trellis,
    b: &'a Trellis,
    colors_a: Vec<Vec<u64>>,
    colors_b: Vec<Vec<u64>>,
    order: Vec<(usize, usize)>,
    map: Vec<Vec<Option<usize>>>,
    used: Vec<Vec<bool>>,
    a_out: Vec<Vec<Vec<(u32, usize)>>>,
    a_in: Vec<Vec<Vec<(u32, usize)>>>,
    b_edges: Vec<HashSet<(usize, u32, usize)>>,
}

impl<'a> IsoSearch<'a> {
    fn new(
        a: &'a Trellis,
        b: &'a Trellis,
        colors_a: Vec<Vec<u64>>,
        colors_b: Vec<Vec<u64>>,
    ) -> Self {
        let num = a.num_classes();
        let mut a_out: Vec<Vec<Vec<(u32, usize)>>> =
            a.class_sizes.iter().map(|&s| vec![Vec::new(); s]).collect();
        let mut a_in = a_out.clone();
        for (i, sec) in a.sections.iter().enumerate() {
            for e in sec {
                a_out[i][e.from].push((e.symbol, e.to));
                a_in[(i + 1) % num][e.to].push((e.symbol, e.from));
            }
        }
        let b_edges = b
            .sections
            .iter()
            .map(|sec| sec.iter().map(|e| (e.from, e.symbol, e.to)).collect())
            .collect();
        let order = (0..num)
            .flat_map(|c| (0..a.class_sizes[c]).map(move |v| (c, v)))
            .collect();
        IsoSearch {
            a,
            b,
            colors_a,
            colors_b,
            order,
            map: a.class_sizes.iter().map(|&s| vec![None; s]).collect(),
            used: a.class_sizes.iter().map(|&s| vec![false; s]).collect(),
            a_out,
            a_in,
            b_edges,
        }
    }

    fn consistent(&self, class: usize, v: usize, w: usize) -> bool {
        let num = self.a.num_classes();
        let n = self.a.depth();
        if class < n {
            let next = (class + 1) % num;
            for &(sym, to) in &self.a_out[class][v] {
                if let Some(mt) = self.map[next][to] {
                    if !self.b_edges[class].contains(&(w, sym, mt)) {
                        return false;
                    }
                }
            }
        }
        let has_prev = class > 0 || self.a.is_tail_biting();
        if has_prev {
            let prev = (class + num - 1) % num;
            for &(sym, from) in &self.a_in[class][v] {
                if let Some(mf) = self.map[prev][from] {
                    if !self.b_edges[prev].contains(&(mf, sym, w)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn run(&mut self, idx: usize) -> bool {
        if idx == self.order.len() {
            return true;
        }
        let (class, v) = self.order[idx];
        let _ = self.b;
        for w in 0..self.used[class].len() {
            if self.used[class][w] || self.colors_a[class][v] != self.colors_b[class][w] {
                continue;
            }
            // Tentatively map so self-loops through the wrap are checked too.
            self.map[class][v] = Some(w);
            if self.consistent(class, v, w) {
                self.used[class][w] = true;
                if self.run(idx + 1) {
                    return true;
                }
                self.used[class][w] = false;
            }
            self.map[class][v] = None;
        }
        false
    }
}
