//! Tree decompositions: min-fill heuristic, exact fallback for small graphs,
//! conversion to nice form and validation.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashSet;

use crate::formula::{Graph, Var};
use crate::{Error, Result};

/// Largest graph handled by [`exact_decomposition`].
pub const EXACT_VERTEX_LIMIT: usize = 20;

/// A rooted tree whose nodes carry bags of vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<Var>>,
    parent: Vec<Option<usize>>,
    root: usize,
}

impl TreeDecomposition {
    /// Bags are sorted and deduplicated. `parent` must describe a single
    /// rooted tree.
    pub fn new(bags: Vec<Vec<Var>>, parent: Vec<Option<usize>>) -> Result<Self> {
        if bags.is_empty() || bags.len() != parent.len() {
            return Err(Error::InvalidDecomposition(
                "bag and parent arrays must be non-empty and of equal length".into(),
            ));
        }
        let roots: Vec<usize> = (0..parent.len()).filter(|&i| parent[i].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidDecomposition(format!(
                "expected exactly one root, found {}",
                roots.len()
            )));
        }
        let root = roots[0];
        if parent.iter().flatten().any(|&p| p >= bags.len()) {
            return Err(Error::InvalidDecomposition("parent out of range".into()));
        }
        // Every node must reach the root without revisiting a node.
        let mut state = vec![0u8; bags.len()]; // 0 unknown, 1 on stack, 2 reaches root
        state[root] = 2;
        for start in 0..bags.len() {
            let mut path = Vec::new();
            let mut cur = start;
            while state[cur] == 0 {
                state[cur] = 1;
                path.push(cur);
                cur = parent[cur].expect("only the root lacks a parent");
            }
            if state[cur] == 1 {
                return Err(Error::InvalidDecomposition("parent links form a cycle".into()));
            }
            for p in path {
                state[p] = 2;
            }
        }
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        Ok(TreeDecomposition { bags, parent, root })
    }

    pub fn bags(&self) -> &[Vec<Var>] {
        &self.bags
    }

    pub fn parent(&self, t: usize) -> Option<usize> {
        self.parent[t]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `max |B_t| - 1`; a decomposition whose bags are all empty has width -1.
    pub fn width(&self) -> isize {
        self.bags.iter().map(|b| b.len() as isize).max().unwrap_or(0) - 1
    }

    pub fn max_bag(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.bags.len()];
        for (t, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(t);
            }
        }
        ch
    }

    /// Nodes ordered so that children precede their parent.
    pub fn post_order(&self) -> Vec<usize> {
        post_order(self.root, &self.children())
    }

    /// Checks edge coverage, vertex coverage and the connectedness of every
    /// vertex's occurrence set.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        validate_bags(&self.bags, &self.parent, g)
    }

    pub fn is_valid(&self, g: &Graph) -> bool {
        self.validate(g).is_ok()
    }
}

fn post_order(root: usize, children: &[Vec<usize>]) -> Vec<usize> {
    let mut out = Vec::with_capacity(children.len());
    let mut stack = vec![(root, false)];
    while let Some((t, expanded)) = stack.pop() {
        if expanded {
            out.push(t);
        } else {
            stack.push((t, true));
            for &c in children[t].iter().rev() {
                stack.push((c, false));
            }
        }
    }
    out
}

fn validate_bags(bags: &[Vec<Var>], parent: &[Option<usize>], g: &Graph) -> Result<()> {
    let n = g.num_vertices();
    for (t, b) in bags.iter().enumerate() {
        if let Some(&v) = b.iter().find(|&&v| v == 0 || v > n) {
            return Err(Error::InvalidDecomposition(format!(
                "bag {t} contains unknown vertex {v}"
            )));
        }
    }
    // Connectivity: the nodes holding v form a subtree iff exactly one of them
    // has a parent that does not hold v.
    let mut tops = vec![0usize; n as usize + 1];
    for (t, b) in bags.iter().enumerate() {
        for &v in b {
            let parent_has = parent[t].is_some_and(|p| bags[p].binary_search(&v).is_ok());
            if !parent_has {
                tops[v as usize] += 1;
            }
        }
    }
    for v in g.vertices() {
        match tops[v as usize] {
            0 => {
                return Err(Error::InvalidDecomposition(format!(
                    "vertex {v} appears in no bag"
                )))
            }
            1 => {}
            _ => {
                return Err(Error::InvalidDecomposition(format!(
                    "occurrences of vertex {v} are disconnected"
                )))
            }
        }
    }
    let mut covered: HashSet<(Var, Var)> = HashSet::new();
    for b in bags {
        for (i, &a) in b.iter().enumerate() {
            for &c in &b[i + 1..] {
                covered.insert((a, c));
            }
        }
    }
    if let Some((a, b)) = g.edges().find(|e| !covered.contains(e)) {
        return Err(Error::InvalidDecomposition(format!(
            "edge {{{a}, {b}}} is not covered by any bag"
        )));
    }
    Ok(())
}

/// Builds the decomposition induced by eliminating vertices in `order`.
///
/// Each vertex contributes the bag `{v} ∪ N(v)` taken in the fill graph at
/// the moment `v` is eliminated; its parent is the bag of the neighbour that is
/// eliminated next. Components are chained root to root.
pub fn decomposition_from_order(g: &Graph, order: &[Var]) -> Result<TreeDecomposition> {
    let n = g.num_vertices() as usize;
    if order.len() != n {
        return Err(Error::InvalidDecomposition(
            "elimination order must list every vertex once".into(),
        ));
    }
    if n == 0 {
        return TreeDecomposition::new(vec![Vec::new()], vec![None]);
    }
    let mut pos = vec![usize::MAX; n + 1];
    for (i, &v) in order.iter().enumerate() {
        if v == 0 || v as usize > n || pos[v as usize] != usize::MAX {
            return Err(Error::InvalidDecomposition(
                "elimination order must list every vertex once".into(),
            ));
        }
        pos[v as usize] = i;
    }
    let mut adj: Vec<BTreeSet<Var>> = g.vertices().map(|v| g.neighbors(v).clone()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut parent = vec![None; n];
    for (i, &v) in order.iter().enumerate() {
        let nb: Vec<Var> = adj[v as usize - 1].iter().copied().collect();
        for (j, &a) in nb.iter().enumerate() {
            adj[a as usize - 1].remove(&v);
            for &b in &nb[j + 1..] {
                adj[a as usize - 1].insert(b);
                adj[b as usize - 1].insert(a);
            }
        }
        parent[i] = nb.iter().map(|&u| pos[u as usize]).min();
        let mut bag = nb;
        bag.push(v);
        bags.push(bag);
    }
    let roots: Vec<usize> = (0..n).filter(|&i| parent[i].is_none()).collect();
    for w in roots.windows(2) {
        parent[w[0]] = Some(w[1]);
    }
    TreeDecomposition::new(bags, parent)
}

fn fill_in(adj: &[BTreeSet<Var>], v: Var) -> usize {
    let nb: Vec<Var> = adj[v as usize - 1].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if !adj[a as usize - 1].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Min-fill elimination order. Ties go to the smaller degree, then the
/// smaller vertex id.
pub fn min_fill_order(g: &Graph) -> Vec<Var> {
    let n = g.num_vertices() as usize;
    let mut adj: Vec<BTreeSet<Var>> = g.vertices().map(|v| g.neighbors(v).clone()).collect();
    let mut key = vec![(0usize, 0usize); n + 1];
    let mut queue: BTreeSet<(usize, usize, Var)> = BTreeSet::new();
    for v in g.vertices() {
        let k = (fill_in(&adj, v), adj[v as usize - 1].len());
        key[v as usize] = k;
        queue.insert((k.0, k.1, v));
    }
    let mut eliminated = vec![false; n + 1];
    let mut order = Vec::with_capacity(n);
    while let Some((_, _, v)) = queue.pop_first() {
        eliminated[v as usize] = true;
        order.push(v);
        let nb: Vec<Var> = adj[v as usize - 1].iter().copied().collect();
        for (j, &a) in nb.iter().enumerate() {
            adj[a as usize - 1].remove(&v);
            for &b in &nb[j + 1..] {
                adj[a as usize - 1].insert(b);
                adj[b as usize - 1].insert(a);
            }
        }
        adj[v as usize - 1].clear();
        let mut affected: BTreeSet<Var> = nb.iter().copied().collect();
        for &a in &nb {
            affected.extend(adj[a as usize - 1].iter().copied());
        }
        for u in affected {
            if eliminated[u as usize] {
                continue;
            }
            let old = key[u as usize];
            let new = (fill_in(&adj, u), adj[u as usize - 1].len());
            if old != new {
                queue.remove(&(old.0, old.1, u));
                queue.insert((new.0, new.1, u));
                key[u as usize] = new;
            }
        }
    }
    order
}

/// Heuristic decomposition from a min-fill elimination order. Always valid;
/// its width is not guaranteed to be optimal.
pub fn min_fill_decomposition(g: &Graph) -> TreeDecomposition {
    decomposition_from_order(g, &min_fill_order(g)).expect("min-fill order is a permutation")
}

/// Optimal elimination order by dynamic programming over vertex subsets.
pub fn exact_order(g: &Graph) -> Result<Vec<Var>> {
    let n = g.num_vertices() as usize;
    if n > EXACT_VERTEX_LIMIT {
        return Err(Error::TooManyVariables {
            count: n,
            limit: EXACT_VERTEX_LIMIT,
        });
    }
    let adj: Vec<u32> = g
        .vertices()
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << (u - 1)))
        .collect();
    // q(s, v): vertices outside s ∪ {v} reachable from v through s.
    let q = |s: u32, v: usize| -> u32 {
        let mut inside = 1u32 << v;
        loop {
            let mut reach = 0u32;
            let mut rest = inside;
            while rest != 0 {
                let u = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                reach |= adj[u];
            }
            let grow = reach & s & !inside;
            if grow == 0 {
                return reach & !s & !(1 << v);
            }
            inside |= grow;
        }
    };
    let full: u32 = if n == 32 { !0 } else { (1u32 << n) - 1 };
    let size = 1usize << n;
    let mut best = vec![i8::MAX; size];
    let mut choice = vec![0u8; size];
    best[0] = -1;
    for s in 1..size as u32 {
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let cand = best[prev as usize].max(q(prev, v).count_ones() as i8);
            if cand < best[s as usize] {
                best[s as usize] = cand;
                choice[s as usize] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = choice[s as usize];
        order.push(u32::from(v) + 1);
        s &= !(1 << v);
    }
    order.reverse();
    Ok(order)
}

/// Minimum-width decomposition for graphs of at most [`EXACT_VERTEX_LIMIT`]
/// vertices.
pub fn exact_decomposition(g: &Graph) -> Result<TreeDecomposition> {
    decomposition_from_order(g, &exact_order(g)?)
}

/// How to obtain a tree decomposition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    MinFill,
    /// Exact treewidth; falls back to min-fill above [`EXACT_VERTEX_LIMIT`].
    Exact,
}

pub fn decompose(g: &Graph, strategy: Strategy) -> TreeDecomposition {
    match strategy {
        Strategy::Exact if g.num_vertices() as usize <= EXACT_VERTEX_LIMIT => {
            exact_decomposition(g).expect("size checked")
        }
        _ => min_fill_decomposition(g),
    }
}

/// Node type of a nice tree decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NiceKind {
    Leaf,
    Introduce { var: Var, child: usize },
    Forget { var: Var, child: usize },
    Join { left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    pub bag: Vec<Var>,
    pub kind: NiceKind,
}

impl NiceNode {
    pub fn children(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match self.kind {
            NiceKind::Leaf => (None, None),
            NiceKind::Introduce { child, .. } | NiceKind::Forget { child, .. } => {
                (Some(child), None)
            }
            NiceKind::Join { left, right } => (Some(left), Some(right)),
        };
        a.into_iter().chain(b)
    }
}

/// A nice tree decomposition. Nodes are stored children-first; the root is the
/// last node and has an empty bag, as do all leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    nodes: Vec<NiceNode>,
}

impl NiceTreeDecomposition {
    /// Accepts any children-first node list; shape rules are checked by
    /// [`NiceTreeDecomposition::validate`].
    pub fn from_nodes(nodes: Vec<NiceNode>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidDecomposition("no nodes".into()));
        }
        let mut has_parent = vec![false; nodes.len()];
        for (t, node) in nodes.iter().enumerate() {
            for c in node.children() {
                if c >= t {
                    return Err(Error::InvalidDecomposition(format!(
                        "node {t} refers to child {c} that does not precede it"
                    )));
                }
                if has_parent[c] {
                    return Err(Error::InvalidDecomposition(format!(
                        "node {c} has two parents"
                    )));
                }
                has_parent[c] = true;
            }
        }
        if let Some(t) = (0..nodes.len() - 1).find(|&t| !has_parent[t]) {
            return Err(Error::InvalidDecomposition(format!(
                "node {t} is detached from the root"
            )));
        }
        Ok(NiceTreeDecomposition { nodes })
    }

    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn width(&self) -> isize {
        self.max_bag() as isize - 1
    }

    pub fn max_bag(&self) -> usize {
        self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(0)
    }

    /// Parent of every node (`None` for the root).
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.nodes.len()];
        for (t, node) in self.nodes.iter().enumerate() {
            for c in node.children() {
                parent[c] = Some(t);
            }
        }
        parent
    }

    /// Forgets the node types.
    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        TreeDecomposition::new(
            self.nodes.iter().map(|n| n.bag.clone()).collect(),
            self.parents(),
        )
        .expect("nice decompositions are trees")
    }

    /// Checks the tree decomposition properties together with the node-type
    /// shape rules, empty leaves and an empty root.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let bad = |t: usize, why: &str| {
            Err(Error::InvalidDecomposition(format!("node {t}: {why}")))
        };
        for (t, node) in self.nodes.iter().enumerate() {
            if node.bag.windows(2).any(|w| w[0] >= w[1]) {
                return bad(t, "bag is not strictly ascending");
            }
            match node.kind {
                NiceKind::Leaf => {
                    if !node.bag.is_empty() {
                        return bad(t, "leaf bag is not empty");
                    }
                }
                NiceKind::Introduce { var, child } => {
                    let cb = &self.nodes[child].bag;
                    if cb.contains(&var) || !node.bag.contains(&var) {
                        return bad(t, "introduced vertex must be new");
                    }
                    if node.bag.len() != cb.len() + 1 || !cb.iter().all(|v| node.bag.contains(v)) {
                        return bad(t, "introduce bag must extend the child bag by one vertex");
                    }
                }
                NiceKind::Forget { var, child } => {
                    let cb = &self.nodes[child].bag;
                    if !cb.contains(&var) || node.bag.contains(&var) {
                        return bad(t, "forgotten vertex must be in the child bag only");
                    }
                    if node.bag.len() + 1 != cb.len() || !node.bag.iter().all(|v| cb.contains(v)) {
                        return bad(t, "forget bag must shrink the child bag by one vertex");
                    }
                }
                NiceKind::Join { left, right } => {
                    if self.nodes[left].bag != node.bag || self.nodes[right].bag != node.bag {
                        return bad(t, "join children must carry the same bag");
                    }
                }
            }
        }
        if !self.nodes[self.root()].bag.is_empty() {
            return bad(self.root(), "root bag is not empty");
        }
        let bags: Vec<Vec<Var>> = self.nodes.iter().map(|n| n.bag.clone()).collect();
        validate_bags(&bags, &self.parents(), g)
    }

    pub fn is_valid(&self, g: &Graph) -> bool {
        self.validate(g).is_ok()
    }
}

/// Converts a decomposition into nice form without changing its width.
///
/// Between a node and each child, the vertices leaving the bag are forgotten
/// and the new ones introduced, both in ascending order. Nodes with several
/// children become left-comb joins, leaves grow from an empty bag, and the
/// root bag is emptied by a final forget chain.
pub fn make_nice(td: &TreeDecomposition) -> Result<NiceTreeDecomposition> {
    let children = td.children();
    let mut nodes: Vec<NiceNode> = Vec::new();
    let mut top = vec![usize::MAX; td.len()];

    let push = |nodes: &mut Vec<NiceNode>, bag: Vec<Var>, kind: NiceKind| {
        nodes.push(NiceNode { bag, kind });
        nodes.len() - 1
    };
    // Moves from node `from` (bag `have`) to bag `want`.
    let transition = |nodes: &mut Vec<NiceNode>, mut from: usize, want: &[Var]| {
        let mut bag = nodes[from].bag.clone();
        let drop: Vec<Var> = bag.iter().copied().filter(|v| !want.contains(v)).collect();
        for v in drop {
            bag.retain(|&u| u != v);
            from = push(nodes, bag.clone(), NiceKind::Forget { var: v, child: from });
        }
        let add: Vec<Var> = want.iter().copied().filter(|v| !bag.contains(v)).collect();
        for v in add {
            let at = bag.partition_point(|&u| u < v);
            bag.insert(at, v);
            from = push(nodes, bag.clone(), NiceKind::Introduce { var: v, child: from });
        }
        from
    };

    for t in td.post_order() {
        let bag = &td.bags()[t];
        let mut branches = Vec::new();
        if children[t].is_empty() {
            let leaf = push(&mut nodes, Vec::new(), NiceKind::Leaf);
            branches.push(transition(&mut nodes, leaf, bag));
        }
        for &c in &children[t] {
            branches.push(transition(&mut nodes, top[c], bag));
        }
        let mut acc = branches[0];
        for &b in &branches[1..] {
            acc = push(
                &mut nodes,
                bag.clone(),
                NiceKind::Join {
                    left: acc,
                    right: b,
                },
            );
        }
        top[t] = acc;
    }
    let last = transition(&mut nodes, top[td.root()], &[]);
    // The root must be the last node; it already is unless the root bag was
    // empty and the chain added nothing, in which case `last` is still last.
    debug_assert_eq!(last, nodes.len() - 1);
    NiceTreeDecomposition::from_nodes(nodes)
}
