//! Multi-index bookkeeping shared by jets, Taylor polynomials and the
//! extension sums.
//!
//! Multi-indices of dimension `n` and total order `<= K` are enumerated in
//! graded lexicographic order: ascending total order first, lexicographic
//! within a block. All tables are tiny at the sizes used here (n <= 3,
//! K <= 8), so they are built eagerly and cached per (n, K).

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

pub type MultiIndex = Vec<usize>;

/// Total order |j| of a multi-index.
pub fn total(j: &[usize]) -> usize {
    j.iter().sum()
}

/// Exact factorial; callers keep arguments <= 20.
pub fn factorial(m: usize) -> u128 {
    (1..=m as u128).product()
}

/// j! = j_1! ... j_n! as f64 (exact for the small orders used here).
pub fn multi_factorial(j: &[usize]) -> f64 {
    j.iter().map(|&m| factorial(m) as f64).product()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Product of per-coordinate binomials; zero unless m <= j componentwise.
pub fn multi_binomial(j: &[usize], m: &[usize]) -> f64 {
    j.iter()
        .zip(m)
        .map(|(&ji, &mi)| binomial(ji, mi) as f64)
        .product()
}

/// Componentwise m <= j.
pub fn leq(m: &[usize], j: &[usize]) -> bool {
    m.iter().zip(j).all(|(a, b)| a <= b)
}

pub fn add(a: &[usize], b: &[usize]) -> MultiIndex {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// j - m, assuming m <= j.
pub fn sub(j: &[usize], m: &[usize]) -> MultiIndex {
    j.iter().zip(m).map(|(a, b)| a - b).collect()
}

/// Monomial x^j.
pub fn monomial(x: &[f64], j: &[usize]) -> f64 {
    x.iter()
        .zip(j)
        .map(|(&xi, &ji)| xi.powi(ji as i32))
        .product()
}

/// Enumeration of all multi-indices of dimension `n` with total order
/// `<= order`, in graded lexicographic order, with reverse lookup.
#[derive(Debug)]
pub struct IndexTable {
    n: usize,
    order: usize,
    indices: Vec<MultiIndex>,
    pos: HashMap<MultiIndex, usize>,
}

impl IndexTable {
    /// Cached lookup; tables are immutable once built.
    pub fn get(n: usize, order: usize) -> Arc<IndexTable> {
        static CACHE: OnceLock<RwLock<HashMap<(usize, usize), Arc<IndexTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(t) = cache.read().unwrap().get(&(n, order)) {
            return Arc::clone(t);
        }
        let table = Arc::new(IndexTable::build(n, order));
        cache
            .write()
            .unwrap()
            .entry((n, order))
            .or_insert_with(|| Arc::clone(&table))
            .clone()
    }

    fn build(n: usize, order: usize) -> IndexTable {
        assert!(n >= 1, "dimension must be positive");
        let mut indices = Vec::new();
        for deg in 0..=order {
            let mut current = vec![0usize; n];
            compositions(deg, 0, &mut current, &mut indices);
        }
        let pos = indices
            .iter()
            .enumerate()
            .map(|(i, j)| (j.clone(), i))
            .collect();
        IndexTable {
            n,
            order,
            indices,
            pos,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn index(&self, pos: usize) -> &MultiIndex {
        &self.indices[pos]
    }

    pub fn position(&self, j: &[usize]) -> Option<usize> {
        self.pos.get(j).copied()
    }
}

/// Fill `current[from..]` with all ways of writing `remaining` as an ordered
/// sum, emitting in lexicographic order.
fn compositions(
    remaining: usize,
    from: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<MultiIndex>,
) {
    if from == current.len() - 1 {
        current[from] = remaining;
        out.push(current.clone());
        return;
    }
    for head in (0..=remaining).rev() {
        current[from] = head;
        compositions(remaining - head, from + 1, current, out);
    }
}
