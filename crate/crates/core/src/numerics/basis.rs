use super::{dot, norm, Vector, ZERO_TOL};

/// Orthonormal vectors in a space of fixed dimension (possibly none).
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    dim: usize,
    vectors: Vec<Vector>,
}

impl Basis {
    pub fn empty(dim: usize) -> Self {
        Basis {
            dim,
            vectors: Vec::new(),
        }
    }

    pub fn standard(dim: usize) -> Self {
        Basis {
            dim,
            vectors: (0..dim)
                .map(|i| {
                    let mut e = vec![0.0; dim];
                    e[i] = 1.0;
                    e
                })
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Largest deviation from orthonormality: max of |bi.bj| (i != j) and
    /// ||bi| - 1|.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.vectors.iter().enumerate() {
            worst = worst.max((norm(a) - 1.0).abs());
            for b in &self.vectors[i + 1..] {
                worst = worst.max(dot(a, b).abs());
            }
        }
        worst
    }

    /// Remove the components along this basis from `p`.
    fn reject(&self, extra: &[Vector], p: &mut Vector) {
        // two sweeps of modified Gram-Schmidt keep the result orthogonal to
        // working precision
        for _ in 0..2 {
            for v in self.vectors.iter().chain(extra) {
                let c = dot(p, v);
                for (x, y) in p.iter_mut().zip(v) {
                    *x -= c * y;
                }
            }
        }
    }
}

/// Gram-Schmidt over `points`: returns orthonormal vectors orthogonal to
/// `existing` that, together with it, span every point. A residual counts as
/// zero when its norm is at most `ZERO_TOL * max(1, |p|)`.
pub fn find_basis(points: &[Vector], existing: &Basis) -> Basis {
    let dim = existing.dim;
    let mut found: Vec<Vector> = Vec::new();
    for p in points {
        assert_eq!(p.len(), dim, "point dimension differs from basis dimension");
        let mut r = p.clone();
        existing.reject(&found, &mut r);
        let n = norm(&r);
        if n > ZERO_TOL * norm(p).max(1.0) {
            found.push(r.iter().map(|x| x / n).collect());
        }
        if found.len() + existing.len() == dim {
            break;
        }
    }
    Basis {
        dim,
        vectors: found,
    }
}

/// Coordinates of `point` along each basis vector.
pub fn project(point: &[f64], basis: &Basis) -> Vector {
    basis.vectors.iter().map(|b| dot(point, b)).collect()
}
