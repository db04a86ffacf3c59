//! Chebyshev kd-tree over a projected dataset.
//!
//! Categorical columns are expanded to one indicator coordinate per symbol,
//! which reproduces the 0/1 metric exactly under the max norm. Every distance
//! that decides membership is computed the same way as in the brute-force
//! scan, and box bounds only prune through monotone rounding, so counts and
//! radii are bit-identical to the reference.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::data::{ColumnData, Dataset};

use super::CountMode;

const LEAF_SIZE: usize = 16;

#[derive(Debug, Clone, Copy)]
struct Node {
    start: usize,
    end: usize,
    /// Child node indices; `None` for leaves.
    children: Option<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub(crate) struct KdTree {
    dims: usize,
    /// Row-major coordinates in original row order.
    coords: Vec<f64>,
    /// Rows in tree order; each node owns `order[start..end]`.
    order: Vec<usize>,
    nodes: Vec<Node>,
    /// Per-node bounding box, `lo` then `hi`, `2 * dims` values per node.
    bounds: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl KdTree {
    pub(crate) fn build(ds: &Dataset) -> Self {
        let n = ds.n_rows();
        let mut widths = Vec::new();
        for col in ds.columns() {
            widths.push(match col.data() {
                ColumnData::Numeric(_) => 1,
                ColumnData::Categorical { alphabet, .. } => alphabet.len().max(1),
            });
        }
        let dims: usize = widths.iter().sum();
        let mut coords = vec![0.0; n * dims];
        let mut offset = 0;
        for (col, &w) in ds.columns().zip(&widths) {
            match col.data() {
                ColumnData::Numeric(v) => {
                    for (r, &x) in v.iter().enumerate() {
                        coords[r * dims + offset] = x;
                    }
                }
                ColumnData::Categorical { codes, .. } => {
                    for (r, &c) in codes.iter().enumerate() {
                        coords[r * dims + offset + c as usize] = 1.0;
                    }
                }
            }
            offset += w;
        }

        let mut tree = KdTree {
            dims,
            coords,
            order: (0..n).collect(),
            nodes: Vec::new(),
            bounds: Vec::new(),
        };
        tree.build_node(0, n);
        tree
    }

    fn point(&self, row: usize) -> &[f64] {
        &self.coords[row * self.dims..(row + 1) * self.dims]
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            start,
            end,
            children: None,
        });
        let dims = self.dims;
        let mut lo = vec![f64::INFINITY; dims];
        let mut hi = vec![f64::NEG_INFINITY; dims];
        for &r in &self.order[start..end] {
            let p = &self.coords[r * dims..(r + 1) * dims];
            for d in 0..dims {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let (split_dim, spread) = (0..dims)
            .map(|d| (d, hi[d] - lo[d]))
            .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        self.bounds.extend_from_slice(&lo);
        self.bounds.extend_from_slice(&hi);

        if end - start <= LEAF_SIZE || spread <= 0.0 {
            return id;
        }
        let mid = start + (end - start) / 2;
        {
            let coords = &self.coords;
            self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
                coords[a * dims + split_dim].total_cmp(&coords[b * dims + split_dim])
            });
        }
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id].children = Some((left, right));
        id
    }

    fn node_bounds(&self, id: usize) -> (&[f64], &[f64]) {
        let b = &self.bounds[id * 2 * self.dims..(id + 1) * 2 * self.dims];
        b.split_at(self.dims)
    }

    /// Smallest and largest possible distance from `q` to any point in the node.
    fn box_range(&self, id: usize, q: &[f64]) -> (f64, f64) {
        let (lo, hi) = self.node_bounds(id);
        let mut near = 0.0_f64;
        let mut far = 0.0_f64;
        for d in 0..self.dims {
            let below = lo[d] - q[d];
            let above = q[d] - hi[d];
            near = near.max(below).max(above);
            far = far.max(q[d] - lo[d]).max(hi[d] - q[d]);
        }
        (near, far)
    }

    #[inline]
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    /// Distance from `row` to its `k`-th nearest other row, duplicates counted
    /// with multiplicity.
    pub(crate) fn kth_distance(&self, row: usize, k: usize) -> f64 {
        // The row itself sits at distance 0, the minimum, so the (k+1)-th
        // smallest distance over all rows is the k-th over the others.
        let want = k + 1;
        let mut heap: BinaryHeap<Dist> = BinaryHeap::with_capacity(want + 1);
        let q = self.point(row).to_vec();
        self.knn_visit(0, &q, want, &mut heap);
        heap.peek().map(|d| d.0).unwrap_or(0.0)
    }

    fn knn_visit(&self, id: usize, q: &[f64], want: usize, heap: &mut BinaryHeap<Dist>) {
        let (near, _) = self.box_range(id, q);
        if heap.len() == want && near >= heap.peek().unwrap().0 {
            return;
        }
        let node = self.nodes[id];
        match node.children {
            None => {
                for &r in &self.order[node.start..node.end] {
                    let d = self.distance(q, self.point(r));
                    if heap.len() < want {
                        heap.push(Dist(d));
                    } else if d < heap.peek().unwrap().0 {
                        heap.pop();
                        heap.push(Dist(d));
                    }
                }
            }
            Some((l, r)) => {
                let dl = self.box_range(l, q).0;
                let dr = self.box_range(r, q).0;
                let (first, second) = if dl <= dr { (l, r) } else { (r, l) };
                self.knn_visit(first, q, want, heap);
                self.knn_visit(second, q, want, heap);
            }
        }
    }

    /// Number of rows other than `row` within `radius` under `mode`.
    pub(crate) fn count_within(&self, row: usize, radius: f64, mode: CountMode) -> usize {
        let q = self.point(row).to_vec();
        let total = self.count_visit(0, &q, radius, mode);
        // the row itself is at distance 0
        let self_hit = match mode {
            CountMode::Inclusive => true,
            CountMode::Strict => radius > 0.0,
        };
        total - usize::from(self_hit)
    }

    fn count_visit(&self, id: usize, q: &[f64], radius: f64, mode: CountMode) -> usize {
        let inside = |d: f64| match mode {
            CountMode::Inclusive => d <= radius,
            CountMode::Strict => d < radius,
        };
        let (near, far) = self.box_range(id, q);
        if !inside(near) {
            return 0;
        }
        let node = self.nodes[id];
        if inside(far) {
            return node.end - node.start;
        }
        match node.children {
            None => self.order[node.start..node.end]
                .iter()
                .filter(|&&r| inside(self.distance(q, self.point(r))))
                .count(),
            Some((l, r)) => self.count_visit(l, q, radius, mode) + self.count_visit(r, q, radius, mode),
        }
    }
}
