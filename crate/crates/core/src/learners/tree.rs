//! C4.5-style binary decision tree grown by gain ratio.
//!
//! Numeric features are split at midpoints between consecutive distinct
//! values (`x <= t` goes left); categorical features are split one category
//! against the rest (`x == c` goes left). No pruning.

use std::collections::BTreeSet;

use super::{Classifier, LearnError, TrainView};
use crate::ingest::FeatureKind;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitRule {
    Threshold(f64),
    Category(f64),
}

impl SplitRule {
    pub fn goes_left(&self, value: f64) -> bool {
        match *self {
            SplitRule::Threshold(t) => value <= t,
            SplitRule::Category(c) => value == c,
        }
    }
}

/// Node of the tree arena. Children are indices into [`DecisionTree::nodes`].
#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Split {
        feature: usize,
        rule: SplitRule,
        left: usize,
        right: usize,
    },
    Leaf {
        /// Laplace-corrected share of class 1: `(n1 + 1) / (n + 2)`.
        class1_frequency: f64,
        samples: usize,
    },
}

fn entropy(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Gain ratio of a binary partition given per-side class counts.
pub fn gain_ratio_counts(left: [usize; 2], right: [usize; 2]) -> Result<f64, LearnError> {
    let nl = left[0] + left[1];
    let nr = right[0] + right[1];
    if nl == 0 || nr == 0 {
        return Err(LearnError::EmptySplit);
    }
    let n = (nl + nr) as f64;
    let (wl, wr) = (nl as f64 / n, nr as f64 / n);
    let parent = entropy([left[0] + right[0], left[1] + right[1]]);
    let gain = parent - wl * entropy(left) - wr * entropy(right);
    let split_entropy = entropy([nl, nr]);
    Ok((gain.max(0.0) / split_entropy).clamp(0.0, 1.0))
}

/// Gain ratio of splitting `rows` of the view on `feature` by `rule`.
pub fn gain_ratio(
    view: &TrainView,
    rows: &[usize],
    feature: usize,
    rule: SplitRule,
) -> Result<f64, LearnError> {
    let mut left = [0usize; 2];
    let mut right = [0usize; 2];
    for &r in rows {
        let y = view.y[r] as usize;
        if rule.goes_left(view.x[r][feature]) {
            left[y] += 1;
        } else {
            right[y] += 1;
        }
    }
    gain_ratio_counts(left, right)
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    feature: usize,
    rule: SplitRule,
    ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub nodes: Vec<TreeNode>,
    features_used: usize,
}

impl DecisionTree {
    /// Grows a tree. A node becomes a leaf when it is pure, holds fewer than
    /// `2 * min_leaf` rows, or admits no split leaving `min_leaf` rows on
    /// each side. The split with the highest gain ratio wins (ties: lowest
    /// feature, then lowest threshold); when every candidate has zero gain
    /// the first candidate is still taken so that consistent data is always
    /// fitted exactly.
    pub fn fit(view: &TrainView, min_leaf: usize) -> DecisionTree {
        let min_leaf = min_leaf.max(1);
        let mut nodes: Vec<TreeNode> = Vec::new();
        let mut used = BTreeSet::new();
        // (node slot, rows); slot is reserved before the node is filled in
        let mut work: Vec<(usize, Vec<usize>)> = vec![(0, (0..view.len()).collect())];
        nodes.push(TreeNode::Leaf {
            class1_frequency: 0.5,
            samples: 0,
        });

        while let Some((slot, rows)) = work.pop() {
            let n = rows.len();
            let ones = rows.iter().filter(|&&r| view.y[r] == 1).count();
            let leaf = TreeNode::Leaf {
                class1_frequency: (ones as f64 + 1.0) / (n as f64 + 2.0),
                samples: n,
            };
            if ones == 0 || ones == n || n < 2 * min_leaf {
                nodes[slot] = leaf;
                continue;
            }
            let Some(best) = best_split(view, &rows, min_leaf) else {
                nodes[slot] = leaf;
                continue;
            };
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                .iter()
                .partition(|&&r| best.rule.goes_left(view.x[r][best.feature]));
            used.insert(best.feature);
            let left = nodes.len();
            let right = left + 1;
            nodes.push(TreeNode::Leaf {
                class1_frequency: 0.5,
                samples: 0,
            });
            nodes.push(TreeNode::Leaf {
                class1_frequency: 0.5,
                samples: 0,
            });
            nodes[slot] = TreeNode::Split {
                feature: best.feature,
                rule: best.rule,
                left,
                right,
            };
            work.push((right, right_rows));
            work.push((left, left_rows));
        }
        DecisionTree {
            nodes,
            features_used: used.len(),
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match &nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }
}

fn best_split(view: &TrainView, rows: &[usize], min_leaf: usize) -> Option<Candidate> {
    let mut best: Option<Candidate> = None;
    let mut consider = |c: Candidate| {
        if best.is_none_or(|b| c.ratio > b.ratio) {
            best = Some(c);
        }
    };
    let total = {
        let ones = rows.iter().filter(|&&r| view.y[r] == 1).count();
        [rows.len() - ones, ones]
    };

    for (feature, kind) in view.kinds.iter().enumerate() {
        let mut sorted: Vec<(f64, u8)> = rows.iter().map(|&r| (view.x[r][feature], view.y[r])).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        match kind {
            FeatureKind::Numeric => {
                let mut left = [0usize; 2];
                for i in 0..sorted.len() - 1 {
                    left[sorted[i].1 as usize] += 1;
                    let (lo, hi) = (sorted[i].0, sorted[i + 1].0);
                    if lo == hi {
                        continue;
                    }
                    let nl = i + 1;
                    if nl < min_leaf || sorted.len() - nl < min_leaf {
                        continue;
                    }
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if threshold >= hi {
                        threshold = lo;
                    }
                    let right = [total[0] - left[0], total[1] - left[1]];
                    if let Ok(ratio) = gain_ratio_counts(left, right) {
                        consider(Candidate {
                            feature,
                            rule: SplitRule::Threshold(threshold),
                            ratio,
                        });
                    }
                }
            }
            FeatureKind::Categorical { .. } => {
                // sorted by code, so each run is one category
                let mut start = 0;
                while start < sorted.len() {
                    let code = sorted[start].0;
                    let mut end = start;
                    let mut left = [0usize; 2];
                    while end < sorted.len() && sorted[end].0 == code {
                        left[sorted[end].1 as usize] += 1;
                        end += 1;
                    }
                    let nl = end - start;
                    if nl >= min_leaf && sorted.len() - nl >= min_leaf {
                        let right = [total[0] - left[0], total[1] - left[1]];
                        if let Ok(ratio) = gain_ratio_counts(left, right) {
                            consider(Candidate {
                                feature,
                                rule: SplitRule::Category(code),
                                ratio,
                            });
                        }
                    }
                    start = end;
                }
            }
        }
    }
    best
}

impl Classifier for DecisionTree {
    fn probability(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                TreeNode::Leaf {
                    class1_frequency, ..
                } => return *class1_frequency,
                TreeNode::Split {
                    feature,
                    rule,
                    left,
                    right,
                } => i = if rule.goes_left(x[*feature]) { *left } else { *right },
            }
        }
    }

    fn param_count(&self) -> usize {
        self.features_used
    }
}
