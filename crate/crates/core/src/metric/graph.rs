//! Lattice discretization of `R^d \ L^beta` whose shortest paths give
//! certified upper approximations of the adaptive metric.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use ordered_float::OrderedFloat;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{dist, LandmarkSet, PointSet};

use super::quadrature::integrate_inverse;
use super::FeatureSize;

const ABSENT: u32 = u32::MAX;

/// Stencil radius used when none is given: 32 directions in the plane,
/// plain king moves in higher dimensions.
pub fn default_stencil_radius(dim: usize) -> usize {
    if dim <= 2 {
        3
    } else {
        1
    }
}

/// Discretization parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub h: f64,
    pub beta: f64,
    pub rel_tol: f64,
    /// Lattice neighbours are the primitive integer offsets of max-norm at
    /// most this radius; 1 is the king-move stencil.
    pub stencil_radius: usize,
}

impl GraphSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, h: f64, beta: f64) -> Self {
        let stencil_radius = default_stencil_radius(lower.len());
        Self {
            lower,
            upper,
            h,
            beta,
            rel_tol: h,
            stencil_radius,
        }
    }

    /// Square/cube box `[-half, half]^dim`.
    pub fn centered(dim: usize, half: f64, h: f64, beta: f64) -> Self {
        Self::new(vec![-half; dim], vec![half; dim], h, beta)
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_stencil_radius(mut self, radius: usize) -> Self {
        self.stencil_radius = radius;
        self
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    fn validate(&self, landmark_dim: usize) -> Result<()> {
        let d = self.lower.len();
        if d == 0 || self.upper.len() != d {
            return Err(Error::InvalidInput("malformed domain box".into()));
        }
        if d != landmark_dim {
            return Err(Error::DimensionMismatch {
                expected: landmark_dim,
                found: d,
            });
        }
        if self.lower.iter().zip(&self.upper).any(|(l, u)| !(l < u)) {
            return Err(Error::InvalidInput("domain box has empty extent".into()));
        }
        for (name, v) in [("h", self.h), ("beta", self.beta), ("rel_tol", self.rel_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::ParameterOutOfRange {
                    name,
                    value: v,
                    range: "(0, inf)",
                });
            }
        }
        if self.stencil_radius == 0 {
            return Err(Error::InvalidInput("stencil radius must be at least 1".into()));
        }
        Ok(())
    }

    fn shape(&self) -> Vec<usize> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| ((u - l) / self.h + 1e-9).floor() as usize + 1)
            .collect()
    }

    /// Every lattice point of the box, excluded or not, row-major with the
    /// last coordinate fastest; coordinates match the graph's nodes exactly.
    pub fn lattice_points(&self) -> PointSet {
        let shape = self.shape();
        let dim = shape.len();
        let total: usize = shape.iter().product();
        let mut coords = Vec::with_capacity(total * dim);
        for code in 0..total {
            let mut p = vec![0.0; dim];
            let mut c = code;
            for k in (0..dim).rev() {
                p[k] = self.lower[k] + (c % shape[k]) as f64 * self.h;
                c /= shape[k];
            }
            coords.extend(p);
        }
        PointSet::from_flat(dim, coords).expect("lattice coordinates are finite")
    }

    fn stitch_radius(&self) -> f64 {
        self.stencil_radius.max(2) as f64 * self.h
    }
}

/// Primitive integer offsets in `[-radius, radius]^dim` whose first nonzero
/// entry is positive (one representative per undirected direction).
fn half_stencil(dim: usize, radius: usize) -> Vec<Vec<i64>> {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let r = radius as i64;
    let side = (2 * r + 1) as usize;
    let mut out = Vec::new();
    for code in 0..side.pow(dim as u32) {
        let mut c = code;
        let v: Vec<i64> = (0..dim)
            .map(|_| {
                let x = (c % side) as i64 - r;
                c /= side;
                x
            })
            .rev()
            .collect();
        let first = v.iter().find(|&&x| x != 0);
        if first.is_some_and(|&x| x > 0) && v.iter().fold(0, |g, &x| gcd(g, x)) == 1 {
            out.push(v);
        }
    }
    out
}

/// Undirected weighted graph over lattice nodes outside `L^beta` plus
/// anchored query points. Immutable once built.
#[derive(Debug, Clone)]
pub struct MetricGraph {
    spec: GraphSpec,
    dim: usize,
    shape: Vec<usize>,
    coords: Vec<f64>,
    grid_nodes: usize,
    grid_index: Vec<u32>,
    anchors: HashMap<Vec<u64>, usize>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    costs: Vec<f64>,
}

fn key(p: &[f64]) -> Vec<u64> {
    // +0.0 and -0.0 are the same point
    p.iter().map(|c| (c + 0.0).to_bits()).collect()
}

impl MetricGraph {
    /// Lattice graph with edge costs `∫ dz / f_L(z)`.
    pub fn build(spec: GraphSpec, landmarks: &LandmarkSet, anchors: &[&PointSet]) -> Result<Self> {
        Self::build_with(spec, landmarks, landmarks, anchors)
    }

    /// Lattice graph whose node set excludes `L^beta` of `exclusion` while
    /// edge costs integrate `1/integrand`. The integrand must be
    /// 1-Lipschitz and positive away from `exclusion`.
    pub fn build_with<F: FeatureSize + ?Sized>(
        spec: GraphSpec,
        exclusion: &LandmarkSet,
        integrand: &F,
        anchors: &[&PointSet],
    ) -> Result<Self> {
        spec.validate(exclusion.dim())?;
        let dim = spec.dim();
        if integrand.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: integrand.dim(),
            });
        }
        for set in anchors {
            if set.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: set.dim(),
                });
            }
            for p in set.iter() {
                let f = exclusion.distance_unchecked(p);
                if !(f > spec.beta) {
                    return Err(Error::InsideExclusion {
                        distance: f,
                        beta: spec.beta,
                    });
                }
            }
        }

        let shape = spec.shape();
        let total: usize = shape.iter().product();
        if total >= ABSENT as usize {
            return Err(Error::InvalidInput(format!("lattice of {total} points is too large")));
        }
        let lattice_point = |mut code: usize| -> Vec<f64> {
            let mut p = vec![0.0; dim];
            for k in (0..dim).rev() {
                p[k] = spec.lower[k] + (code % shape[k]) as f64 * spec.h;
                code /= shape[k];
            }
            p
        };
        let keep: Vec<bool> = (0..total)
            .into_par_iter()
            .map(|code| exclusion.distance_unchecked(&lattice_point(code)) > spec.beta)
            .collect();
        let mut grid_index = vec![ABSENT; total];
        let mut coords = Vec::new();
        let mut n = 0u32;
        for (code, &k) in keep.iter().enumerate() {
            if k {
                grid_index[code] = n;
                coords.extend(lattice_point(code));
                n += 1;
            }
        }
        let grid_nodes = n as usize;

        let mut graph = Self {
            spec,
            dim,
            shape,
            coords,
            grid_nodes,
            grid_index,
            anchors: HashMap::new(),
            offsets: Vec::new(),
            targets: Vec::new(),
            costs: Vec::new(),
        };

        let mut new_anchors = Vec::new();
        for set in anchors {
            for p in set.iter() {
                if graph.locate_slice(p).is_some() {
                    continue;
                }
                let id = graph.node_count();
                graph.coords.extend_from_slice(p);
                graph.anchors.insert(key(p), id);
                new_anchors.push(id);
            }
        }

        let mut pairs = graph.lattice_pairs();
        pairs.extend(graph.anchor_pairs(&new_anchors));
        let rel_tol = graph.spec.rel_tol;
        let weighted: Vec<Option<(u32, u32, f64)>> = pairs
            .par_iter()
            .map(|&(u, v)| {
                integrate_inverse(integrand, graph.node(u as usize), graph.node(v as usize), rel_tol)
                    .ok()
                    .map(|c| (u, v, c.upper))
            })
            .collect();
        graph.assemble(weighted.into_iter().flatten());
        Ok(graph)
    }

    fn lattice_pairs(&self) -> Vec<(u32, u32)> {
        let stencil = half_stencil(self.dim, self.spec.stencil_radius);
        let strides: Vec<usize> = (0..self.dim)
            .map(|k| self.shape[k + 1..].iter().product())
            .collect();
        (0..self.grid_index.len())
            .into_par_iter()
            .flat_map_iter(|code| {
                let u = self.grid_index[code];
                let mut out = Vec::new();
                if u == ABSENT {
                    return out;
                }
                let idx: Vec<i64> = (0..self.dim)
                    .map(|k| ((code / strides[k]) % self.shape[k]) as i64)
                    .collect();
                'offsets: for off in &stencil {
                    let mut c = 0usize;
                    for k in 0..self.dim {
                        let j = idx[k] + off[k];
                        if j < 0 || j >= self.shape[k] as i64 {
                            continue 'offsets;
                        }
                        c += j as usize * strides[k];
                    }
                    let v = self.grid_index[c];
                    if v != ABSENT {
                        out.push((u, v));
                    }
                }
                out
            })
            .collect()
    }

    fn anchor_pairs(&self, anchors: &[usize]) -> Vec<(u32, u32)> {
        let radius = self.spec.stitch_radius();
        let reach = self.spec.stencil_radius.max(2) as i64 + 1;
        let mut out = Vec::new();
        for (i, &a) in anchors.iter().enumerate() {
            let p = self.node(a);
            let base: Vec<i64> = (0..self.dim)
                .map(|k| ((p[k] - self.spec.lower[k]) / self.spec.h).round() as i64)
                .collect();
            let side = (2 * reach + 1) as usize;
            'window: for code in 0..side.pow(self.dim as u32) {
                let mut c = code;
                let mut lin = 0usize;
                for k in 0..self.dim {
                    let j = base[k] + (c % side) as i64 - reach;
                    c /= side;
                    if j < 0 || j >= self.shape[k] as i64 {
                        continue 'window;
                    }
                    lin = lin * self.shape[k] + j as usize;
                }
                let v = self.grid_index[lin];
                if v != ABSENT && dist(p, self.node(v as usize)) <= radius {
                    out.push((a as u32, v));
                }
            }
            for &b in &anchors[i + 1..] {
                if dist(p, self.node(b)) <= radius {
                    out.push((a as u32, b as u32));
                }
            }
        }
        out
    }

    fn assemble(&mut self, edges: impl Iterator<Item = (u32, u32, f64)>) {
        let n = self.node_count();
        let edges: Vec<(u32, u32, f64)> = edges.collect();
        let mut degree = vec![0usize; n + 1];
        for &(u, v, _) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[n]];
        let mut costs = vec![0f64; offsets[n]];
        for (u, v, c) in edges {
            for (from, to) in [(u, v), (v, u)] {
                let slot = &mut fill[from as usize];
                targets[*slot] = to;
                costs[*slot] = c;
                *slot += 1;
            }
        }
        self.offsets = offsets;
        self.targets = targets;
        self.costs = costs;
    }

    pub fn spec(&self) -> &GraphSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn lattice_node_count(&self) -> usize {
        self.grid_nodes
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.targets[r.clone()]
            .iter()
            .zip(&self.costs[r])
            .map(|(&t, &c)| (t as usize, c))
    }

    /// Node id of a point that is a lattice node or an anchor.
    pub fn locate_slice(&self, p: &[f64]) -> Option<usize> {
        if p.len() != self.dim {
            return None;
        }
        if let Some(&id) = self.anchors.get(&key(p)) {
            return Some(id);
        }
        let mut code = 0usize;
        for k in 0..self.dim {
            let j = ((p[k] - self.spec.lower[k]) / self.spec.h).round();
            if j < 0.0 || j >= self.shape[k] as f64 {
                return None;
            }
            code = code * self.shape[k] + j as usize;
        }
        let id = self.grid_index[code];
        (id != ABSENT && dist(p, self.node(id as usize)) <= 1e-9 * self.spec.h).then_some(id as usize)
    }

    pub fn locate(&self, p: &[f64]) -> Result<usize> {
        self.locate_slice(p)
            .ok_or_else(|| Error::NotAnchored(p.to_vec()))
    }

    pub fn locate_all(&self, set: &PointSet) -> Result<Vec<usize>> {
        set.iter().map(|p| self.locate(p)).collect()
    }

    /// Multi-source Dijkstra. Returns the distance to every node
    /// (`INFINITY` when unreachable); stops early once `target` is settled.
    pub fn shortest_paths(&self, sources: &[usize], target: Option<usize>) -> Vec<f64> {
        let n = self.node_count();
        let mut distance = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            distance[s] = 0.0;
            heap.push(Reverse((OrderedFloat(0.0), s)));
        }
        while let Some(Reverse((OrderedFloat(d), u))) = heap.pop() {
            if d > distance[u] {
                continue;
            }
            if Some(u) == target {
                break;
            }
            for (v, c) in self.neighbors(u) {
                let nd = d + c;
                if nd < distance[v] {
                    distance[v] = nd;
                    heap.push(Reverse((OrderedFloat(nd), v)));
                }
            }
        }
        distance
    }

    /// Number of nodes in the connected component of `node`.
    pub fn component_size(&self, node: usize) -> usize {
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::from([node]);
        seen[node] = true;
        let mut count = 0;
        while let Some(u) = queue.pop_front() {
            count += 1;
            for (v, _) in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        count
    }

    pub(crate) fn disconnected(&self, source: usize, target: usize) -> Error {
        Error::Disconnected {
            source_component: self.component_size(source),
            target_component: self.component_size(target),
        }
    }

    /// Debug dump: nodes, undirected edges and their costs.
    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<&[f64]> = (0..self.node_count()).map(|i| self.node(i)).collect();
        let mut edges = Vec::with_capacity(self.edge_count());
        for u in 0..self.node_count() {
            for (v, c) in self.neighbors(u) {
                if u < v {
                    edges.push(serde_json::json!([u, v, c]));
                }
            }
        }
        serde_json::json!({
            "spec": self.spec,
            "nodes": nodes,
            "edges": edges,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn far_landmark() -> LandmarkSet {
        LandmarkSet::point(Point::xy(100.0, 100.0))
    }

    #[test]
    fn half_stencil_counts() {
        assert_eq!(half_stencil(2, 1).len(), 4);
        assert_eq!(half_stencil(2, 2).len(), 8);
        assert_eq!(half_stencil(2, 3).len(), 16);
        assert_eq!(half_stencil(3, 1).len(), 13);
    }

    #[test]
    fn king_move_grid_on_unit_square() {
        let spec = GraphSpec::new(vec![0.0, 0.0], vec![1.0, 1.0], 0.5, 0.1).with_stencil_radius(1);
        let g = MetricGraph::build(spec, &far_landmark(), &[]).unwrap();
        assert_eq!(g.node_count(), 9);
        // 3x3 king graph: 12 axis edges + 8 diagonals
        assert_eq!(g.edge_count(), 20);
    }

    #[test]
    fn anchor_on_lattice_is_deduplicated() {
        let spec = GraphSpec::new(vec![0.0, 0.0], vec![1.0, 1.0], 0.5, 0.1).with_stencil_radius(1);
        let anchors = PointSet::new(vec![Point::xy(0.5, 0.5), Point::xy(0.5, 0.5)]).unwrap();
        let g = MetricGraph::build(spec, &far_landmark(), &[&anchors]).unwrap();
        assert_eq!(g.node_count(), 9);
        assert_eq!(g.locate(&[0.5, 0.5]).unwrap(), 4);
    }

    #[test]
    fn off_lattice_anchor_is_stitched() {
        let spec = GraphSpec::new(vec![0.0, 0.0], vec![1.0, 1.0], 0.5, 0.1).with_stencil_radius(1);
        let anchors = PointSet::new(vec![Point::xy(0.3, 0.2)]).unwrap();
        let g = MetricGraph::build(spec, &far_landmark(), &[&anchors]).unwrap();
        assert_eq!(g.node_count(), 10);
        let a = g.locate(&[0.3, 0.2]).unwrap();
        let stitched = g.neighbors(a).count();
        let expected = (0..9)
            .filter(|&i| dist(g.node(i), &[0.3, 0.2]) <= 1.0)
            .count();
        assert_eq!(stitched, expected);
    }

    #[test]
    fn exclusion_removes_nodes_near_landmark() {
        let l = LandmarkSet::point(Point::xy(0.5, 0.5));
        let spec = GraphSpec::new(vec![0.0, 0.0], vec![1.0, 1.0], 0.1, 0.2);
        let g = MetricGraph::build(spec, &l, &[]).unwrap();
        for i in 0..g.node_count() {
            assert!(dist(g.node(i), &[0.5, 0.5]) > 0.2);
        }
        let mut expected = 0;
        for i in 0..11 {
            for j in 0..11 {
                let p = Point::xy(i as f64 * 0.1, j as f64 * 0.1);
                if !crate::geometry::euclidean_offset_contains(&p, &l, 0.2).unwrap() {
                    expected += 1;
                }
            }
        }
        assert_eq!(g.node_count(), expected);
    }

    #[test]
    fn anchor_inside_exclusion_is_rejected() {
        let l = LandmarkSet::point(Point::xy(0.5, 0.5));
        let spec = GraphSpec::new(vec![0.0, 0.0], vec![1.0, 1.0], 0.1, 0.2);
        let bad = PointSet::new(vec![Point::xy(0.55, 0.5)]).unwrap();
        assert!(matches!(
            MetricGraph::build(spec, &l, &[&bad]),
            Err(Error::InsideExclusion { .. })
        ));
    }

    #[test]
    fn edge_costs_respect_lipschitz_lower_bound() {
        let l = LandmarkSet::point(Point::xy(0.5, 0.5));
        let spec = GraphSpec::new(vec![0.0, 0.0], vec![1.0, 1.0], 0.1, 0.15);
        let g = MetricGraph::build(spec, &l, &[]).unwrap();
        for u in 0..g.node_count() {
            for (v, c) in g.neighbors(u) {
                let (a, b) = (g.node(u), g.node(v));
                let len = dist(a, b);
                let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
                let lb = len / (l.distance_unchecked(&mid) + 0.5 * len);
                assert!(c >= lb);
                // symmetric storage
                assert!(g.neighbors(v).any(|(w, cw)| w == u && cw == c));
            }
        }
    }
}
