//! Quickhull facet enumeration in up to `MAX_HULL_DIM` dimensions.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::{dedup_rows, dot, matrix_rank, norm, sub, NumericsError, Vector};

pub const MAX_HULL_DIM: usize = 8;

/// `normal . x <= offset`. The normal is not normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub normal: Vector,
    pub offset: f64,
}

impl HalfSpace {
    /// Signed Euclidean distance of `p` past the boundary (positive outside).
    pub fn distance(&self, p: &[f64]) -> f64 {
        (dot(&self.normal, p) - self.offset) / norm(&self.normal)
    }

    /// Same half-space with a unit normal.
    pub fn unit(&self) -> HalfSpace {
        let n = norm(&self.normal);
        HalfSpace {
            normal: self.normal.iter().map(|x| x / n).collect(),
            offset: self.offset / n,
        }
    }

    /// Unit-normalized test with slack `tol * max(1, |offset|)`.
    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        let u = self.unit();
        dot(&u.normal, p) - u.offset <= tol * u.offset.abs().max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hull {
    pub facets: Vec<HalfSpace>,
    pub vertices: Vec<Vector>,
}

impl Hull {
    pub fn dim(&self) -> usize {
        self.vertices.first().map_or(0, Vec::len)
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        self.facets.iter().all(|f| f.contains(p, tol))
    }
}

/// Facet half-spaces of the convex hull of `points`, which must span their
/// ambient space. Duplicate points are ignored.
pub fn convex_hull(points: &[Vector]) -> Result<Hull, NumericsError> {
    let first = points.first().ok_or(NumericsError::Empty)?;
    let dim = first.len();
    for p in points {
        if p.len() != dim {
            return Err(NumericsError::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(NumericsError::NonFinite);
        }
    }
    if dim > MAX_HULL_DIM {
        return Err(NumericsError::CapacityExceeded {
            dim,
            max: MAX_HULL_DIM,
        });
    }
    if dim == 0 {
        return Err(NumericsError::Degenerate { dim, rank: 0 });
    }
    let pts = dedup_rows(points);
    if dim == 1 {
        return interval(&pts);
    }

    // work around the centroid for better conditioning
    let mut center = vec![0.0; dim];
    for p in &pts {
        for (c, v) in center.iter_mut().zip(p) {
            *c += v / pts.len() as f64;
        }
    }
    let local: Vec<Vector> = pts.iter().map(|p| sub(p, &center)).collect();
    let scale = local
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let eps = 1e-11 * scale * dim as f64;

    let mut qh = Quickhull::new(&local, eps)?;
    qh.run();
    Ok(qh.finish(&pts, &center))
}

fn interval(pts: &[Vector]) -> Result<Hull, NumericsError> {
    let lo = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Err(NumericsError::Degenerate { dim: 1, rank: 0 });
    }
    Ok(Hull {
        facets: vec![
            HalfSpace {
                normal: vec![-1.0],
                offset: -lo,
            },
            HalfSpace {
                normal: vec![1.0],
                offset: hi,
            },
        ],
        vertices: vec![vec![lo], vec![hi]],
    })
}

struct Facet {
    /// `neighbors[i]` shares the ridge that omits `vertices[i]`.
    vertices: Vec<usize>,
    neighbors: Vec<usize>,
    normal: Vector,
    offset: f64,
    outside: Vec<usize>,
    alive: bool,
}

struct Quickhull<'a> {
    pts: &'a [Vector],
    dim: usize,
    eps: f64,
    interior: Vector,
    facets: Vec<Facet>,
}

impl<'a> Quickhull<'a> {
    fn new(pts: &'a [Vector], eps: f64) -> Result<Self, NumericsError> {
        let dim = pts[0].len();
        let simplex = initial_simplex(pts, eps)?;
        let mut interior = vec![0.0; dim];
        for &i in &simplex {
            for (c, v) in interior.iter_mut().zip(&pts[i]) {
                *c += v / (dim + 1) as f64;
            }
        }
        let mut qh = Quickhull {
            pts,
            dim,
            eps,
            interior,
            facets: Vec::new(),
        };
        // facet k omits simplex vertex k; its neighbor across the ridge
        // omitting simplex vertex j is facet j
        for k in 0..=dim {
            let verts: Vec<usize> = (0..=dim).filter(|&j| j != k).map(|j| simplex[j]).collect();
            let neighbors: Vec<usize> = (0..=dim).filter(|&j| j != k).collect();
            let f = qh.make_facet(verts, neighbors);
            qh.facets.push(f);
        }
        let in_simplex: std::collections::HashSet<usize> = simplex.iter().copied().collect();
        let rest: Vec<usize> = (0..pts.len()).filter(|i| !in_simplex.contains(i)).collect();
        let all: Vec<usize> = (0..qh.facets.len()).collect();
        qh.assign(&rest, &all);
        Ok(qh)
    }

    fn make_facet(&self, vertices: Vec<usize>, neighbors: Vec<usize>) -> Facet {
        let base = &self.pts[vertices[0]];
        let edges: Vec<Vector> = vertices[1..].iter().map(|&v| sub(&self.pts[v], base)).collect();
        let mut normal = cofactor_normal(&edges, self.dim);
        let mut offset = dot(&normal, base);
        if dot(&normal, &self.interior) > offset {
            normal.iter_mut().for_each(|x| *x = -*x);
            offset = -offset;
        }
        Facet {
            vertices,
            neighbors,
            normal,
            offset,
            outside: Vec::new(),
            alive: true,
        }
    }

    fn height(&self, f: usize, p: usize) -> f64 {
        let f = &self.facets[f];
        let n = norm(&f.normal);
        if n == 0.0 {
            return 0.0;
        }
        (dot(&f.normal, &self.pts[p]) - f.offset) / n
    }

    /// Give each point to the candidate facet it lies farthest above.
    fn assign(&mut self, points: &[usize], candidates: &[usize]) {
        for &p in points {
            let mut best: Option<(usize, f64)> = None;
            for &f in candidates {
                let h = self.height(f, p);
                if h > self.eps && best.is_none_or(|(_, bh)| h > bh) {
                    best = Some((f, h));
                }
            }
            if let Some((f, _)) = best {
                self.facets[f].outside.push(p);
            }
        }
    }

    fn run(&mut self) {
        let mut stack: Vec<usize> = (0..self.facets.len()).collect();
        while let Some(f) = stack.pop() {
            if !self.facets[f].alive || self.facets[f].outside.is_empty() {
                continue;
            }
            let apex = *self.facets[f]
                .outside
                .iter()
                .max_by(|&&a, &&b| self.height(f, a).total_cmp(&self.height(f, b)))
                .unwrap();

            // visible region grown from f
            let mut visible = vec![f];
            let mut is_visible: HashMap<usize, bool> = HashMap::from([(f, true)]);
            let mut i = 0;
            while i < visible.len() {
                let cur = visible[i];
                for k in 0..self.dim {
                    let g = self.facets[cur].neighbors[k];
                    if is_visible.contains_key(&g) {
                        continue;
                    }
                    let vis = self.height(g, apex) > self.eps;
                    is_visible.insert(g, vis);
                    if vis {
                        visible.push(g);
                    }
                }
                i += 1;
            }

            // cone from apex over the horizon
            let mut created = Vec::new();
            let mut ridges: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
            for &v in &visible {
                for k in 0..self.dim {
                    let g = self.facets[v].neighbors[k];
                    if is_visible[&g] {
                        continue;
                    }
                    let mut verts: Vec<usize> = self.facets[v]
                        .vertices
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != k)
                        .map(|(_, &x)| x)
                        .collect();
                    verts.push(apex);
                    let mut neighbors = vec![usize::MAX; self.dim];
                    neighbors[self.dim - 1] = g;
                    let id = self.facets.len();
                    let nf = self.make_facet(verts, neighbors);
                    self.facets.push(nf);
                    let slot = self.facets[g].neighbors.iter().position(|&x| x == v).unwrap();
                    self.facets[g].neighbors[slot] = id;

                    for j in 0..self.dim - 1 {
                        let mut key: Vec<usize> = self.facets[id]
                            .vertices
                            .iter()
                            .enumerate()
                            .filter(|&(m, _)| m != j)
                            .map(|(_, &x)| x)
                            .collect();
                        key.sort_unstable();
                        if let Some((other, oslot)) = ridges.remove(&key) {
                            self.facets[id].neighbors[j] = other;
                            self.facets[other].neighbors[oslot] = id;
                        } else {
                            ridges.insert(key, (id, j));
                        }
                    }
                    created.push(id);
                }
            }
            debug_assert!(ridges.is_empty(), "horizon is not closed");

            let mut orphans = Vec::new();
            for &v in &visible {
                self.facets[v].alive = false;
                orphans.append(&mut self.facets[v].outside);
            }
            orphans.retain(|&p| p != apex);
            self.assign(&orphans, &created);
            stack.extend(created);
        }
    }

    fn finish(&self, original: &[Vector], center: &[f64]) -> Hull {
        let mut facets: Vec<HalfSpace> = Vec::new();
        let mut units: Vec<HalfSpace> = Vec::new();
        let mut verts = std::collections::BTreeSet::new();
        for f in self.facets.iter().filter(|f| f.alive) {
            verts.extend(f.vertices.iter().copied());
            if norm(&f.normal) == 0.0 {
                continue;
            }
            let h = HalfSpace {
                normal: f.normal.clone(),
                offset: f.offset + dot(&f.normal, center),
            };
            let u = h.unit();
            let tol = 1e-9 * u.offset.abs().max(1.0);
            let coplanar = units.iter().any(|o| {
                (o.offset - u.offset).abs() <= tol
                    && o.normal.iter().zip(&u.normal).all(|(a, b)| (a - b).abs() <= 1e-9)
            });
            if !coplanar {
                units.push(u);
                facets.push(h);
            }
        }
        // points lying inside a face can end up as facet corners when inputs
        // are coplanar; keep only those pinned down by `dim` tight facets
        let vertices = verts
            .into_iter()
            .map(|i| &original[i])
            .filter(|p| {
                let tight: Vec<&HalfSpace> = units
                    .iter()
                    .filter(|u| (dot(&u.normal, p) - u.offset).abs() <= 1e-9 * u.offset.abs().max(1.0))
                    .collect();
                let m = DMatrix::from_fn(tight.len(), self.dim, |r, c| tight[r].normal[c]);
                matrix_rank(&m, 1e-9) == self.dim
            })
            .cloned()
            .collect();
        Hull { facets, vertices }
    }
}

/// d+1 affinely independent points chosen greedily by distance to the span
/// of the points picked so far.
fn initial_simplex(pts: &[Vector], eps: f64) -> Result<Vec<usize>, NumericsError> {
    let dim = pts[0].len();
    let start = (0..pts.len())
        .min_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]))
        .unwrap();
    let mut chosen = vec![start];
    let mut dirs: Vec<Vector> = Vec::new();
    while chosen.len() <= dim {
        let mut best: Option<(usize, f64, Vector)> = None;
        for (i, p) in pts.iter().enumerate() {
            let mut r = sub(p, &pts[start]);
            for _ in 0..2 {
                for d in &dirs {
                    let c = dot(&r, d);
                    r.iter_mut().zip(d).for_each(|(x, y)| *x -= c * y);
                }
            }
            let n = norm(&r);
            if best.as_ref().is_none_or(|b| n > b.1) {
                best = Some((i, n, r));
            }
        }
        let (i, n, r) = best.unwrap();
        if n <= eps {
            return Err(NumericsError::Degenerate {
                dim,
                rank: chosen.len() - 1,
            });
        }
        chosen.push(i);
        dirs.push(r.into_iter().map(|x| x / n).collect());
    }
    Ok(chosen)
}

/// Normal of the hyperplane spanned by `dim - 1` edge vectors, by cofactor
/// expansion (a generalized cross product).
fn cofactor_normal(edges: &[Vector], dim: usize) -> Vector {
    (0..dim)
        .map(|j| {
            let minor = DMatrix::from_fn(dim - 1, dim - 1, |r, c| {
                edges[r][if c < j { c } else { c + 1 }]
            });
            let det = if dim == 1 { 1.0 } else { minor.determinant() };
            if j % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn has_facet(h: &Hull, normal: &[f64], offset: f64) -> bool {
        let want = HalfSpace {
            normal: normal.to_vec(),
            offset,
        }
        .unit();
        h.facets.iter().any(|f| {
            let u = f.unit();
            (u.offset - want.offset).abs() < 1e-12
                && u.normal.iter().zip(&want.normal).all(|(a, b)| (a - b).abs() < 1e-12)
        })
    }

    #[test]
    fn projected_move_slow_triangle() {
        let h = convex_hull(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![-9.0, 1.0]]).unwrap();
        assert_eq!(h.facets.len(), 3);
        assert!(has_facet(&h, &[0.0, -1.0], 0.0));
        assert!(has_facet(&h, &[-1.0, -9.0], 0.0));
        assert!(has_facet(&h, &[1.0, 10.0], 1.0));
        assert_eq!(h.vertices.len(), 3);
    }

    #[test]
    fn unit_square() {
        let sq = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0], vec![0.5, 0.5]];
        let h = convex_hull(&sq).unwrap();
        assert_eq!(h.facets.len(), 4);
        assert!(has_facet(&h, &[1.0, 0.0], 1.0));
        assert!(has_facet(&h, &[-1.0, 0.0], 0.0));
        assert!(has_facet(&h, &[0.0, 1.0], 1.0));
        assert!(has_facet(&h, &[0.0, -1.0], 0.0));
        assert_eq!(h.vertices.len(), 4);
    }

    #[test]
    fn cube_faces_merge() {
        let mut pts = Vec::new();
        for m in 0..8 {
            pts.push((0..3).map(|b| ((m >> b) & 1) as f64).collect::<Vec<_>>());
        }
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.facets.len(), 6);
        assert!(h.contains(&[0.5, 0.5, 0.5], 0.0));
        assert!(!h.contains(&[1.1, 0.5, 0.5], 1e-7));
    }

    #[test]
    fn interval_in_one_dimension() {
        let h = convex_hull(&[vec![3.0], vec![-1.0], vec![0.0]]).unwrap();
        assert!(h.contains(&[2.9], 0.0));
        assert!(!h.contains(&[3.1], 1e-7));
        assert_eq!(h.vertices, vec![vec![-1.0], vec![3.0]]);
    }

    #[test]
    fn flat_input_is_degenerate() {
        let err = convex_hull(&[vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 1.0, 0.0]]);
        assert!(matches!(err, Err(NumericsError::Degenerate { dim: 3, rank: 2 })));
    }

    #[test]
    fn too_many_dimensions() {
        let err = convex_hull(&[vec![0.0; 9]]);
        assert!(matches!(err, Err(NumericsError::CapacityExceeded { dim: 9, .. })));
    }
}
