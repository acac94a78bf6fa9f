use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::formula::Var;
use crate::{Error, Result};

/// Index of a vtree node.
pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VtreeNode {
    /// A leaf, labeled with a variable or unlabeled (hosting constants).
    Leaf(Option<Var>),
    Internal { left: NodeId, right: NodeId },
}

/// A rooted full binary tree whose labeled leaves are in bijection with a set
/// of variables. A vtree with unlabeled leaves is called extended.
#[derive(Debug, Clone)]
pub struct Vtree {
    nodes: Vec<VtreeNode>,
    root: NodeId,
    parent: Vec<Option<NodeId>>,
    post_order: Vec<NodeId>,
    leaf_of: BTreeMap<Var, NodeId>,
}

impl PartialEq for Vtree {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && self.nodes == other.nodes
    }
}

impl Eq for Vtree {}

impl Vtree {
    pub fn new(nodes: Vec<VtreeNode>, root: NodeId) -> Result<Self> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidVtree(msg));
        if root >= nodes.len() {
            return bad(format!("root {root} out of range"));
        }
        let mut parent = vec![None; nodes.len()];
        let mut leaf_of = BTreeMap::new();
        for (t, node) in nodes.iter().enumerate() {
            match *node {
                VtreeNode::Leaf(Some(v)) => {
                    if v == 0 {
                        return bad(format!("leaf {t} is labeled with variable 0"));
                    }
                    if leaf_of.insert(v, t).is_some() {
                        return bad(format!("variable {v} labels two leaves"));
                    }
                }
                VtreeNode::Leaf(None) => {}
                VtreeNode::Internal { left, right } => {
                    for c in [left, right] {
                        if c >= nodes.len() || c == t {
                            return bad(format!("node {t} has invalid child {c}"));
                        }
                        if parent[c].replace(t).is_some() {
                            return bad(format!("node {c} has two parents"));
                        }
                    }
                    if left == right {
                        return bad(format!("node {t} has the same child twice"));
                    }
                }
            }
        }
        if parent[root].is_some() {
            return bad("root has a parent".into());
        }
        let mut post_order = Vec::with_capacity(nodes.len());
        let mut stack = vec![(root, false)];
        while let Some((t, expanded)) = stack.pop() {
            if expanded {
                post_order.push(t);
                continue;
            }
            stack.push((t, true));
            if let VtreeNode::Internal { left, right } = nodes[t] {
                stack.push((right, false));
                stack.push((left, false));
            }
            if stack.len() > 2 * nodes.len() + 2 {
                return bad("cycle in vtree".into());
            }
        }
        if post_order.len() != nodes.len() {
            return bad("some nodes are not reachable from the root".into());
        }
        Ok(Vtree {
            nodes,
            root,
            parent,
            post_order,
            leaf_of,
        })
    }

    /// Right comb over `vars` in order: the first variable hangs directly
    /// below the root. With `unlabeled_tail`, an unlabeled leaf closes the
    /// comb so that every variable sits next to an internal node.
    pub fn right_comb(vars: &[Var], unlabeled_tail: bool) -> Result<Self> {
        let mut b = VtreeBuilder::new();
        let mut leaves: Vec<NodeId> = vars.iter().map(|&v| b.leaf(Some(v))).collect();
        if unlabeled_tail || leaves.is_empty() {
            leaves.push(b.leaf(None));
        }
        let mut acc = leaves.pop().expect("at least one leaf");
        while let Some(l) = leaves.pop() {
            acc = b.internal(l, acc);
        }
        b.finish(acc)
    }

    /// Balanced vtree with the variables as leaves in the given order.
    pub fn balanced(vars: &[Var]) -> Result<Self> {
        let mut b = VtreeBuilder::new();
        if vars.is_empty() {
            let u = b.leaf(None);
            return b.finish(u);
        }
        let mut level: Vec<NodeId> = vars.iter().map(|&v| b.leaf(Some(v))).collect();
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len().div_ceil(2));
            for pair in level.chunks(2) {
                next.push(if pair.len() == 2 {
                    b.internal(pair[0], pair[1])
                } else {
                    pair[0]
                });
            }
            level = next;
        }
        b.finish(level[0])
    }

    pub fn nodes(&self) -> &[VtreeNode] {
        &self.nodes
    }

    pub fn node(&self, t: NodeId) -> VtreeNode {
        self.nodes[t]
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn parent(&self, t: NodeId) -> Option<NodeId> {
        self.parent[t]
    }

    pub fn children(&self, t: NodeId) -> Option<(NodeId, NodeId)> {
        match self.nodes[t] {
            VtreeNode::Internal { left, right } => Some((left, right)),
            VtreeNode::Leaf(_) => None,
        }
    }

    pub fn is_leaf(&self, t: NodeId) -> bool {
        matches!(self.nodes[t], VtreeNode::Leaf(_))
    }

    /// Label of a leaf; `None` for unlabeled leaves and internal nodes.
    pub fn label(&self, t: NodeId) -> Option<Var> {
        match self.nodes[t] {
            VtreeNode::Leaf(v) => v,
            VtreeNode::Internal { .. } => None,
        }
    }

    pub fn is_unlabeled_leaf(&self, t: NodeId) -> bool {
        self.nodes[t] == VtreeNode::Leaf(None)
    }

    /// Children before parents, left before right; the root comes last.
    pub fn post_order(&self) -> &[NodeId] {
        &self.post_order
    }

    pub fn leaf_of(&self, v: Var) -> Option<NodeId> {
        self.leaf_of.get(&v).copied()
    }

    /// Labeled variables, ascending.
    pub fn vars(&self) -> Vec<Var> {
        self.leaf_of.keys().copied().collect()
    }

    pub fn num_vars(&self) -> usize {
        self.leaf_of.len()
    }

    pub fn is_extended(&self) -> bool {
        self.nodes.contains(&VtreeNode::Leaf(None))
    }

    /// Number of labeled leaves below every node.
    pub fn var_counts(&self) -> Vec<usize> {
        let mut count = vec![0usize; self.nodes.len()];
        for &t in &self.post_order {
            count[t] = match self.nodes[t] {
                VtreeNode::Leaf(Some(_)) => 1,
                VtreeNode::Leaf(None) => 0,
                VtreeNode::Internal { left, right } => count[left] + count[right],
            };
        }
        count
    }

    /// `var(t)`: labeled variables below `t`, ascending.
    pub fn vars_under(&self, t: NodeId) -> Vec<Var> {
        let mut out = Vec::new();
        let mut stack = vec![t];
        while let Some(u) = stack.pop() {
            match self.nodes[u] {
                VtreeNode::Leaf(Some(v)) => out.push(v),
                VtreeNode::Leaf(None) => {}
                VtreeNode::Internal { left, right } => {
                    stack.push(left);
                    stack.push(right);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Copy in which the leaves of `vars` become unlabeled.
    pub fn unlabel(&self, vars: impl Fn(Var) -> bool) -> Vtree {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match *n {
                VtreeNode::Leaf(Some(v)) if vars(v) => VtreeNode::Leaf(None),
                other => other,
            })
            .collect();
        Vtree::new(nodes, self.root).expect("unlabeling keeps the tree shape")
    }
}

/// Appends vtree nodes children-first.
#[derive(Debug, Default)]
pub struct VtreeBuilder {
    nodes: Vec<VtreeNode>,
}

impl VtreeBuilder {
    pub fn new() -> Self {
        VtreeBuilder::default()
    }

    pub fn leaf(&mut self, label: Option<Var>) -> NodeId {
        self.nodes.push(VtreeNode::Leaf(label));
        self.nodes.len() - 1
    }

    pub fn internal(&mut self, left: NodeId, right: NodeId) -> NodeId {
        self.nodes.push(VtreeNode::Internal { left, right });
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn finish(self, root: NodeId) -> Result<Vtree> {
        Vtree::new(self.nodes, root)
    }
}
