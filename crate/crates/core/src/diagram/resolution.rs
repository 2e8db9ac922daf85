use std::collections::{BTreeMap, VecDeque};

use super::{EdgeId, FaceId, LinkDiagram, Slot, UnionFind};
use crate::error::{Error, Result};

/// A closed loop of a resolved diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circle {
    /// Edges in traversal order, starting at the smallest; the reference
    /// traversal follows the orientation of that first edge.
    pub edges: Vec<EdgeId>,
    /// Whether the reference traversal runs along each edge's orientation.
    pub forward: Vec<bool>,
    /// Region on the left of the reference traversal.
    pub left: usize,
    /// Region on the right of the reference traversal.
    pub right: usize,
}

impl Circle {
    pub fn smallest_edge(&self) -> EdgeId {
        self.edges[0]
    }
}

/// A full smoothing of a diagram at one cube vertex.
///
/// Bit `i` of the vertex selects the smoothing of crossing `i`: bit 1 joins
/// positions (0,1) and (2,3), which is the oriented smoothing of a positive
/// crossing; bit 0 joins (1,2) and (3,0), the oriented smoothing of a
/// negative crossing.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub vertex: u64,
    pub circles: Vec<Circle>,
    edge_circle: BTreeMap<EdgeId, usize>,
    face_region: Vec<usize>,
    n_regions: usize,
    outer_region: usize,
}

/// Smoothing partner of a position.
pub(crate) fn partner(pos: u8, bit: bool) -> u8 {
    if bit {
        pos ^ 1
    } else {
        3 - pos
    }
}

impl LinkDiagram {
    /// Resolves every crossing according to `vertex`.
    pub fn resolve(&self, vertex: u64) -> Resolution {
        let n = self.n_crossings();
        let bit = |c: usize| vertex >> c & 1 == 1;
        let nf = self.n_faces();
        let n_loops = self.loops().len();
        let mut uf = UnionFind::new(nf + n_loops);
        let outer_faces = self.piece_outer_faces();
        for w in outer_faces.windows(2) {
            uf.union(w[0], w[1]);
        }
        for c in 0..n {
            let (a, b) = if bit(c) { (1, 3) } else { (0, 2) };
            uf.union(self.corner_face(4 * c + a), self.corner_face(4 * c + b));
        }
        let mut root_region: BTreeMap<usize, usize> = BTreeMap::new();
        let mut region_of = |uf: &mut UnionFind, x: usize| {
            let r = uf.find(x);
            let next = root_region.len();
            *root_region.entry(r).or_insert(next)
        };
        let face_region: Vec<usize> = (0..nf).map(|f| region_of(&mut uf, f)).collect();
        let outer_region = face_region[outer_faces.first().copied().unwrap_or(0)];
        let loop_region: Vec<usize> = (0..n_loops).map(|k| region_of(&mut uf, nf + k)).collect();
        let n_regions = root_region.len();

        let mut circles = Vec::new();
        let mut edge_circle = BTreeMap::new();
        for e0 in self.edges() {
            if edge_circle.contains_key(&e0) {
                continue;
            }
            let idx = circles.len();
            if let Some(k) = self.loops().iter().position(|l| l.edge == e0) {
                let l = &self.loops()[k];
                let exterior = self.loop_face(l).map_or(outer_region, |f| face_region[f]);
                let interior = loop_region[k];
                let (left, right) = if l.exterior_on_left {
                    (exterior, interior)
                } else {
                    (interior, exterior)
                };
                edge_circle.insert(e0, idx);
                circles.push(Circle {
                    edges: vec![e0],
                    forward: vec![true],
                    left,
                    right,
                });
                continue;
            }
            let t0 = self.tail(e0).expect("crossing edge");
            let left = face_region[self.corner_face(t0.corner())];
            let right = face_region[self.corner_face(t0.corner_before())];
            let mut edges = Vec::new();
            let mut forward = Vec::new();
            let (mut e, mut leave) = (e0, t0);
            loop {
                edge_circle.insert(e, idx);
                edges.push(e);
                let fwd = self.tail(e) == Some(leave);
                forward.push(fwd);
                let arrive = if fwd { self.head(e).unwrap() } else { self.tail(e).unwrap() };
                let next_pos = partner(arrive.pos, bit(arrive.crossing));
                leave = Slot::new(arrive.crossing, next_pos);
                e = self.edge_at(leave);
                if e == e0 && leave == t0 {
                    break;
                }
            }
            circles.push(Circle {
                edges,
                forward,
                left,
                right,
            });
        }
        Resolution {
            vertex,
            circles,
            edge_circle,
            face_region,
            n_regions,
            outer_region,
        }
    }
}

impl Resolution {
    pub fn n_circles(&self) -> usize {
        self.circles.len()
    }

    pub fn circle_of(&self, e: EdgeId) -> usize {
        self.edge_circle[&e]
    }

    pub fn n_regions(&self) -> usize {
        self.n_regions
    }

    pub fn outer_region(&self) -> usize {
        self.outer_region
    }

    pub fn face_region(&self, f: FaceId) -> Option<usize> {
        self.face_region.get(f).copied()
    }

    /// Breadth-first depth of every region from `outer`, stepping across circles.
    pub fn region_depths(&self, outer: usize) -> Vec<usize> {
        let mut adj = vec![Vec::new(); self.n_regions];
        for c in &self.circles {
            adj[c.left].push(c.right);
            adj[c.right].push(c.left);
        }
        let mut depth = vec![usize::MAX; self.n_regions];
        depth[outer] = 0;
        let mut queue = VecDeque::from([outer]);
        while let Some(r) = queue.pop_front() {
            for &s in &adj[r] {
                if depth[s] == usize::MAX {
                    depth[s] = depth[r] + 1;
                    queue.push_back(s);
                }
            }
        }
        depth
    }

    fn outer_for(&self, outer: Option<FaceId>) -> Result<usize> {
        match outer {
            None => Ok(self.outer_region),
            Some(f) => self
                .face_region(f)
                .ok_or_else(|| Error::Input(format!("unknown face id {f}"))),
        }
    }

    /// Number of circles separating each circle from the outer region.
    pub fn circle_depths(&self, outer: Option<FaceId>) -> Result<Vec<usize>> {
        let depth = self.region_depths(self.outer_for(outer)?);
        Ok(self
            .circles
            .iter()
            .map(|c| depth[c.left].min(depth[c.right]))
            .collect())
    }

    /// Whether travelling around `circle` (along the reference traversal when
    /// `forward`) keeps its interior on the right.
    pub fn is_clockwise(&self, circle: usize, forward: bool, outer: Option<FaceId>) -> Result<bool> {
        let depth = self.region_depths(self.outer_for(outer)?);
        let c = self
            .circles
            .get(circle)
            .ok_or_else(|| Error::Input(format!("unknown circle {circle}")))?;
        let interior_left = depth[c.left] > depth[c.right];
        Ok(interior_left != forward)
    }

    /// Total number of arcs over all circles.
    pub fn n_arcs(&self) -> usize {
        self.circles.iter().map(|c| c.edges.len()).sum()
    }
}
