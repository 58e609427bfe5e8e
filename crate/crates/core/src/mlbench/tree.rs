use rand::seq::index;
use rand::Rng;

/// Split quality measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// Weighted Gini impurity for 0/1 targets.
    Gini,
    /// Sum of squared errors for real targets.
    Mse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    /// `None` grows until leaves are pure.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Features drawn per split; `None` uses all of them.
    pub max_features: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_samples_leaf: 1,
            max_features: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Binary axis-aligned tree; `x[feature] <= threshold` goes left.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn predict_value(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf(v) => return *v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    /// `(feature, threshold)` of the root, or `None` for a single leaf.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match self.nodes.first() {
            Some(Node::Split {
                feature, threshold, ..
            }) => Some((*feature, *threshold)),
            _ => None,
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Grows a CART tree on rows `x[idx]` with targets `y`. Leaves hold
    /// `leaf_value(indices)`. With `max_features` set, `rng` draws the
    /// candidate features at each split.
    pub fn fit<R: Rng>(
        x: &[Vec<f64>],
        y: &[f64],
        idx: &[usize],
        criterion: Criterion,
        params: &TreeParams,
        leaf_value: &dyn Fn(&[usize]) -> f64,
        rng: &mut R,
    ) -> Tree {
        let mut tree = Tree { nodes: Vec::new() };
        let d = x.first().map_or(0, Vec::len);
        let mut builder = Builder {
            x,
            y,
            criterion,
            params,
            leaf_value,
            d,
        };
        builder.grow(&mut tree.nodes, idx.to_vec(), 0, rng);
        tree
    }
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    criterion: Criterion,
    params: &'a TreeParams,
    leaf_value: &'a dyn Fn(&[usize]) -> f64,
    d: usize,
}

/// Impurity of a node summarised by (count, sum, sum of squares).
fn impurity(criterion: Criterion, n: f64, sum: f64, sumsq: f64) -> f64 {
    if n == 0.0 {
        return 0.0;
    }
    match criterion {
        // n * (1 - p^2 - (1-p)^2) with p = sum / n
        Criterion::Gini => 2.0 * (sum - sum * sum / n),
        Criterion::Mse => (sumsq - sum * sum / n).max(0.0),
    }
}

/// Best split of `idx` over `features`: minimum summed child impurity,
/// first feature then lowest threshold on ties.
pub fn best_split(
    x: &[Vec<f64>],
    y: &[f64],
    idx: &[usize],
    features: &[usize],
    criterion: Criterion,
    min_samples_leaf: usize,
) -> Option<(usize, f64, f64)> {
    let n = idx.len();
    let min_leaf = min_samples_leaf.max(1);
    if n < 2 * min_leaf {
        return None;
    }
    let total_sum: f64 = idx.iter().map(|&i| y[i]).sum();
    let total_sq: f64 = idx.iter().map(|&i| y[i] * y[i]).sum();
    let mut best: Option<(usize, f64, f64)> = None;
    let mut order = idx.to_vec();
    for &f in features {
        order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
        let (mut ls, mut lq) = (0.0, 0.0);
        for k in 0..n - 1 {
            let i = order[k];
            ls += y[i];
            lq += y[i] * y[i];
            let nl = k + 1;
            let (lo, hi) = (x[i][f], x[order[k + 1]][f]);
            if nl < min_leaf || n - nl < min_leaf || !(hi > lo) {
                continue;
            }
            let cost = impurity(criterion, nl as f64, ls, lq)
                + impurity(criterion, (n - nl) as f64, total_sum - ls, total_sq - lq);
            // running sums make equal costs differ in the last bits
            if best.is_none_or(|b| cost < b.2 - 1e-9 * (1.0 + b.2.abs())) {
                best = Some((f, lo + (hi - lo) / 2.0, cost));
            }
        }
    }
    best
}

impl Builder<'_> {
    fn grow<R: Rng>(&mut self, nodes: &mut Vec<Node>, idx: Vec<usize>, depth: usize, rng: &mut R) -> usize {
        let at = nodes.len();
        nodes.push(Node::Leaf((self.leaf_value)(&idx)));
        let n = idx.len() as f64;
        let sum: f64 = idx.iter().map(|&i| self.y[i]).sum();
        let sumsq: f64 = idx.iter().map(|&i| self.y[i] * self.y[i]).sum();
        let node_impurity = impurity(self.criterion, n, sum, sumsq);
        if node_impurity <= 1e-12 || self.params.max_depth.is_some_and(|m| depth >= m) {
            return at;
        }
        let features: Vec<usize> = match self.params.max_features {
            Some(k) if k < self.d => {
                let mut f = index::sample(rng, self.d, k.max(1)).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..self.d).collect(),
        };
        let Some((feature, threshold, _)) = best_split(
            self.x,
            self.y,
            &idx,
            &features,
            self.criterion,
            self.params.min_samples_leaf,
        ) else {
            return at;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.x[i][feature] <= threshold);
        let left = self.grow(nodes, l, depth + 1, rng);
        let right = self.grow(nodes, r, depth + 1, rng);
        nodes[at] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        at
    }
}

/// CART classifier; leaves store the positive-class fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub tree: Tree,
}

impl DecisionTree {
    pub fn fit<R: Rng>(x: &[Vec<f64>], y: &[u8], params: &TreeParams, rng: &mut R) -> Self {
        let idx: Vec<usize> = (0..x.len()).collect();
        Self::fit_indices(x, y, &idx, params, rng)
    }

    /// Fits on the (possibly repeated) rows `idx`.
    pub fn fit_indices<R: Rng>(x: &[Vec<f64>], y: &[u8], idx: &[usize], params: &TreeParams, rng: &mut R) -> Self {
        let yf: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
        let leaf = |ids: &[usize]| ids.iter().map(|&i| yf[i]).sum::<f64>() / ids.len() as f64;
        Self {
            tree: Tree::fit(x, &yf, idx, Criterion::Gini, params, &leaf, rng),
        }
    }

    /// Majority class of the leaf; an even split goes to class 0.
    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(self.tree.predict_value(x) > 0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn col(v: &[f64]) -> Vec<Vec<f64>> {
        v.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn one_dimensional_threshold() {
        let x = col(&[0.0, 1.0, 10.0, 11.0]);
        let y = [0, 0, 1, 1];
        let t = DecisionTree::fit(&x, &y, &TreeParams::default(), &mut ChaCha8Rng::seed_from_u64(0));
        let (f, thr) = t.tree.root_split().unwrap();
        assert_eq!(f, 0);
        assert!(thr > 1.0 && thr < 10.0);
        assert_eq!(t.predict(&[5.0]), u8::from(5.0 > thr));
        for (xi, yi) in x.iter().zip(y) {
            assert_eq!(t.predict(xi), yi);
        }
    }

    #[test]
    fn depth_limit() {
        let x = col(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        let y = [0, 1, 0, 1, 0, 1, 0, 1];
        let params = TreeParams {
            max_depth: Some(2),
            ..TreeParams::default()
        };
        let t = DecisionTree::fit(&x, &y, &params, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(t.tree.depth() <= 2);
        let full = DecisionTree::fit(&x, &y, &TreeParams::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert!(x.iter().zip(y).all(|(xi, yi)| full.predict(xi) == yi));
    }

    #[test]
    fn pure_node_is_leaf() {
        let x = col(&[0.0, 1.0, 2.0]);
        let t = DecisionTree::fit(&x, &[1, 1, 1], &TreeParams::default(), &mut ChaCha8Rng::seed_from_u64(0));
        assert!(t.tree.root_split().is_none());
        assert_eq!(t.predict(&[100.0]), 1);
    }

    #[test]
    fn min_samples_leaf_respected() {
        let x = col(&[0.0, 1.0, 2.0, 3.0]);
        let y = [0.0, 1.0, 1.0, 1.0];
        let idx = [0, 1, 2, 3];
        let s = best_split(&x, &y, &idx, &[0], Criterion::Gini, 2).unwrap();
        assert_eq!(s.1, 1.5);
    }
}
