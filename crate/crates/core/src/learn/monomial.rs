//! Monomial expansion of per-action function values.

/// Product of function columns, as a multiset of column indices kept in
/// ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub factors: Vec<usize>,
}

impl Monomial {
    pub fn single(i: usize) -> Self {
        Monomial { factors: vec![i] }
    }

    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    pub fn value(&self, row: &[f64]) -> f64 {
        self.factors.iter().map(|&i| row[i]).product()
    }

    /// `x`, `x^2`, `x*y`, `x^2*y`, ...
    pub fn label(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.factors.len() {
            let f = self.factors[i];
            let mut j = i;
            while j < self.factors.len() && self.factors[j] == f {
                j += 1;
            }
            parts.push(match j - i {
                1 => names[f].clone(),
                p => format!("{}^{p}", names[f]),
            });
            i = j;
        }
        parts.join("*")
    }

    fn distinct(&self) -> usize {
        let mut d = self.factors.clone();
        d.dedup();
        d.len()
    }
}

/// All monomials of degree 1..=`degree` over `n` variables. Within a degree,
/// products of more distinct variables come first, then lexicographic order,
/// so `{x, y}` at degree 2 gives `x, y, x*y, x^2, y^2`.
pub fn monomials(n: usize, degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for k in 1..=degree as usize {
        let mut level = Vec::new();
        let mut cur = Vec::with_capacity(k);
        multisets(n, k, 0, &mut cur, &mut level);
        level.sort_by(|a: &Monomial, b| b.distinct().cmp(&a.distinct()).then_with(|| a.cmp(b)));
        out.extend(level);
    }
    out
}

fn multisets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Monomial>) {
    if cur.len() == k {
        out.push(Monomial {
            factors: cur.clone(),
        });
        return;
    }
    for i in start..n {
        cur.push(i);
        multisets(n, k, i, cur, out);
        cur.pop();
    }
}

/// Labelled row expanded to every monomial up to `degree`. Degree 1 returns
/// the row unchanged.
pub fn expand_monomials(labels: &[String], row: &[f64], degree: u32) -> (Vec<String>, Vec<f64>) {
    let ms = monomials(labels.len(), degree);
    (
        ms.iter().map(|m| m.label(labels)).collect(),
        ms.iter().map(|m| m.value(row)).collect(),
    )
}
