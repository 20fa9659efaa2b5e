//! Static R-tree over points in `R^d`, packed with sort-tile-recursive
//! bulk loading and answering exact Euclidean ball queries.

pub const DEFAULT_LEAF_CAPACITY: usize = 16;

#[derive(Debug, Clone, Copy)]
struct Node {
    /// Range into `items` for leaves, into `nodes` for internal nodes.
    first: usize,
    len: usize,
    leaf: bool,
}

#[derive(Debug, Clone)]
pub struct RTree {
    dim: usize,
    /// Payload per point, in leaf order.
    items: Vec<usize>,
    /// Point coordinates in leaf order.
    coords: Vec<f64>,
    nodes: Vec<Node>,
    /// `2 * dim` values per node: mins then maxes.
    boxes: Vec<f64>,
    root: Option<usize>,
}

impl RTree {
    /// Packs `points` (row-major, `dim` per point) carrying payloads `items`.
    pub fn bulk_load(dim: usize, items: &[usize], points: &[f64], capacity: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        assert!(capacity >= 2, "node capacity must be at least 2");
        assert_eq!(items.len() * dim, points.len());
        let n = items.len();
        let mut tree = RTree {
            dim,
            items: Vec::with_capacity(n),
            coords: Vec::with_capacity(n * dim),
            nodes: Vec::new(),
            boxes: Vec::new(),
            root: None,
        };
        if n == 0 {
            return tree;
        }

        let mut order: Vec<usize> = (0..n).collect();
        str_order(points, dim, &mut order, capacity, 0);
        for &i in &order {
            tree.items.push(items[i]);
            tree.coords.extend_from_slice(&points[i * dim..(i + 1) * dim]);
        }

        // Each level is a list of (node, bounding box); children of level k
        // index into level k - 1.
        let mut levels: Vec<Vec<(Node, Vec<f64>)>> = Vec::new();
        let leaves = (0..n)
            .step_by(capacity)
            .map(|first| {
                let len = capacity.min(n - first);
                let bbox = bounding_box(dim, (first..first + len).map(|i| &tree.coords[i * dim..(i + 1) * dim]));
                (Node { first, len, leaf: true }, bbox)
            })
            .collect();
        levels.push(leaves);

        while levels.last().is_some_and(|level| level.len() > 1) {
            let level = levels.last_mut().unwrap();
            let centers: Vec<f64> = level
                .iter()
                .flat_map(|(_, b)| (0..dim).map(move |k| 0.5 * (b[k] + b[dim + k])))
                .collect();
            let mut order: Vec<usize> = (0..level.len()).collect();
            str_order(&centers, dim, &mut order, capacity, 0);
            let mut sorted: Vec<(Node, Vec<f64>)> = order.iter().map(|&i| level[i].clone()).collect();
            std::mem::swap(level, &mut sorted);
            let m = level.len();
            let parents = (0..m)
                .step_by(capacity)
                .map(|first| {
                    let len = capacity.min(m - first);
                    let mut bbox = level[first].1.clone();
                    for (_, child) in &level[first + 1..first + len] {
                        for k in 0..dim {
                            bbox[k] = bbox[k].min(child[k]);
                            bbox[dim + k] = bbox[dim + k].max(child[dim + k]);
                        }
                    }
                    (Node { first, len, leaf: false }, bbox)
                })
                .collect();
            levels.push(parents);
        }

        let mut offset = 0;
        let mut prev_offset = 0;
        for level in &levels {
            for (node, bbox) in level {
                let mut node = *node;
                if !node.leaf {
                    node.first += prev_offset;
                }
                tree.nodes.push(node);
                tree.boxes.extend_from_slice(bbox);
            }
            prev_offset = offset;
            offset += level.len();
        }
        tree.root = Some(tree.nodes.len() - 1);
        tree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Depth of the tree; a tree holding a single leaf has height 1.
    pub fn height(&self) -> usize {
        let mut height = 0;
        let mut node = self.root;
        while let Some(i) = node {
            height += 1;
            node = (!self.nodes[i].leaf).then_some(self.nodes[i].first);
        }
        height
    }

    /// Calls `visit(item, squared_distance)` for every point `p` with
    /// `|p - center| <= radius`.
    pub fn for_each_within(&self, center: &[f64], radius: f64, mut visit: impl FnMut(usize, f64)) {
        let Some(root) = self.root else { return };
        debug_assert_eq!(center.len(), self.dim);
        let r2 = radius * radius;
        let dim = self.dim;
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            if self.box_distance2(i, center) > r2 {
                continue;
            }
            let node = self.nodes[i];
            if node.leaf {
                for j in node.first..node.first + node.len {
                    let p = &self.coords[j * dim..(j + 1) * dim];
                    let d2 = crate::space::squared_euclidean(p, center);
                    if d2 <= r2 {
                        visit(self.items[j], d2);
                    }
                }
            } else {
                stack.extend(node.first..node.first + node.len);
            }
        }
    }

    pub fn within(&self, center: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_within(center, radius, |item, _| out.push(item));
        out
    }

    fn box_distance2(&self, node: usize, p: &[f64]) -> f64 {
        let b = &self.boxes[node * 2 * self.dim..(node + 1) * 2 * self.dim];
        let (lo, hi) = b.split_at(self.dim);
        p.iter()
            .zip(lo.iter().zip(hi))
            .map(|(x, (a, b))| {
                let gap = if x < a {
                    a - x
                } else if x > b {
                    x - b
                } else {
                    0.0
                };
                gap * gap
            })
            .sum()
    }
}

fn bounding_box<'a>(dim: usize, points: impl Iterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut bbox = vec![f64::INFINITY; dim];
    bbox.extend(std::iter::repeat_n(f64::NEG_INFINITY, dim));
    for p in points {
        for k in 0..dim {
            bbox[k] = bbox[k].min(p[k]);
            bbox[dim + k] = bbox[dim + k].max(p[k]);
        }
    }
    bbox
}

/// Sort-tile-recursive ordering: afterwards consecutive runs of `capacity`
/// entries of `order` are spatially compact.
fn str_order(points: &[f64], dim: usize, order: &mut [usize], capacity: usize, axis: usize) {
    let n = order.len();
    if n <= capacity || axis >= dim {
        return;
    }
    order.sort_by(|&a, &b| {
        points[a * dim + axis]
            .total_cmp(&points[b * dim + axis])
            .then(a.cmp(&b))
    });
    let remaining = dim - axis;
    if remaining == 1 {
        return;
    }
    let pages = n.div_ceil(capacity);
    let slabs = (pages as f64).powf(1.0 / remaining as f64).ceil().max(1.0) as usize;
    let slab_len = capacity * pages.div_ceil(slabs);
    for slab in order.chunks_mut(slab_len) {
        str_order(points, dim, slab, capacity, axis + 1);
    }
}
