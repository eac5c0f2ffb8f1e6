//! CART-style binary classification tree split on Gini impurity.
//!
//! Splits are accepted only when they strictly decrease weighted impurity
//! and leave both children at or above the minimum leaf size. Ties between
//! candidate splits break on the lowest feature index, then the lowest
//! threshold, so growth is fully deterministic.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    #[serde(default = "default_min_leaf")]
    pub min_leaf: usize,
    #[serde(default = "default_max_depth")]
    pub max_depth: usize,
}

fn default_min_leaf() -> usize {
    5
}
fn default_max_depth() -> usize {
    30
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            min_leaf: default_min_leaf(),
            max_depth: default_max_depth(),
        }
    }
}

/// Arena node; children are indices into the node vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Split {
        feature: usize,
        /// Goes left when x[feature] <= threshold.
        threshold: f64,
        left: usize,
        right: usize,
        /// Drop in weighted Gini impurity achieved by this split.
        impurity_decrease: f64,
        n_samples: usize,
    },
    Leaf {
        /// Defective fraction of the training rows that reached the leaf.
        score: f64,
        n_samples: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    nodes: Vec<TreeNode>,
}

fn gini(defective: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = defective as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    decrease: f64,
}

fn find_best_split(
    xs: &[Vec<f64>],
    ys: &[bool],
    rows: &[usize],
    params: &TreeParams,
) -> Option<BestSplit> {
    let total = rows.len();
    let defective = rows.iter().filter(|&&r| ys[r]).count();
    let parent_gini = gini(defective, total);
    if parent_gini == 0.0 || total < 2 * params.min_leaf {
        return None;
    }

    let dim = xs[rows[0]].len();
    let mut best: Option<BestSplit> = None;
    let mut sorted: Vec<usize> = Vec::with_capacity(total);

    for feature in 0..dim {
        sorted.clear();
        sorted.extend_from_slice(rows);
        sorted.sort_by(|&a, &b| {
            xs[a][feature]
                .partial_cmp(&xs[b][feature])
                .expect("finite feature values")
        });

        let mut left_n = 0usize;
        let mut left_defective = 0usize;
        for i in 0..total - 1 {
            left_n += 1;
            if ys[sorted[i]] {
                left_defective += 1;
            }
            let v = xs[sorted[i]][feature];
            let next = xs[sorted[i + 1]][feature];
            if v == next {
                continue; // identical values cannot be separated
            }
            let right_n = total - left_n;
            if left_n < params.min_leaf || right_n < params.min_leaf {
                continue;
            }
            let right_defective = defective - left_defective;
            let weighted = (left_n as f64 * gini(left_defective, left_n)
                + right_n as f64 * gini(right_defective, right_n))
                / total as f64;
            let decrease = parent_gini - weighted;
            if decrease <= 1e-12 {
                continue;
            }
            let threshold = (v + next) / 2.0;
            let better = match &best {
                None => true,
                Some(b) => {
                    decrease > b.decrease + 1e-15
                        || ((decrease - b.decrease).abs() <= 1e-15
                            && (feature < b.feature
                                || (feature == b.feature && threshold < b.threshold)))
                }
            };
            if better {
                best = Some(BestSplit {
                    feature,
                    threshold,
                    decrease,
                });
            }
        }
    }
    best
}

fn build(
    xs: &[Vec<f64>],
    ys: &[bool],
    rows: Vec<usize>,
    depth: usize,
    params: &TreeParams,
    nodes: &mut Vec<TreeNode>,
) -> usize {
    let defective = rows.iter().filter(|&&r| ys[r]).count();

    let split = if depth < params.max_depth {
        find_best_split(xs, ys, &rows, params)
    } else {
        None
    };

    match split {
        Some(best) => {
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                .iter()
                .partition(|&&r| xs[r][best.feature] <= best.threshold);
            let index = nodes.len();
            nodes.push(TreeNode::Leaf {
                score: 0.0,
                n_samples: 0,
            }); // placeholder until children exist
            let n_samples = rows.len();
            let left = build(xs, ys, left_rows, depth + 1, params, nodes);
            let right = build(xs, ys, right_rows, depth + 1, params, nodes);
            nodes[index] = TreeNode::Split {
                feature: best.feature,
                threshold: best.threshold,
                left,
                right,
                impurity_decrease: best.decrease,
                n_samples,
            };
            index
        }
        None => {
            let index = nodes.len();
            nodes.push(TreeNode::Leaf {
                score: defective as f64 / rows.len() as f64,
                n_samples: rows.len(),
            });
            index
        }
    }
}

pub fn fit(xs: &[Vec<f64>], ys: &[bool], params: &TreeParams) -> Model {
    let rows: Vec<usize> = (0..xs.len()).collect();
    let mut nodes = Vec::new();
    build(xs, ys, rows, 0, params, &mut nodes);
    Model { nodes }
}

impl Model {
    pub fn score(&self, x: &[f64]) -> f64 {
        let mut index = 0;
        loop {
            match &self.nodes[index] {
                TreeNode::Leaf { score, .. } => return *score,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    index = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }
}
