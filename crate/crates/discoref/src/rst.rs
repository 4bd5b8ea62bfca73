//! RST discourse trees: parsing, binarization, and structural queries.
//!
//! Trees arrive as s-expressions, one per document:
//!
//! ```text
//! (node <relation> <child>+)        internal node, any arity
//! (edu <id> <start_tok> <end_excl>) leaf (elementary discourse unit)
//! ```
//!
//! Leaves read in order must tile the document's token range exactly; any
//! gap, overlap, or out-of-bounds range is a hard alignment error rather than
//! something to repair silently, because the coverage features downstream
//! would be corrupted by a realigned tree. Relation labels are kept as opaque
//! strings (they may encode nuclearity) and never interpreted.

use crate::corpus::Document;
use crate::error::{Error, Result};

pub type NodeId = usize;

/// One arena node. Leaves have an `edu_id` and empty `children`; internal
/// nodes have a `relation` and at least one child (exactly two after
/// [`binarize`]). Coverage fields describe the whole subtree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RstNode {
    pub relation: Option<String>,
    pub children: Vec<NodeId>,
    pub edu_id: Option<usize>,
    /// Subtree token coverage `[token_start, token_end)`; leaves tile the
    /// document, so coverage is always contiguous.
    pub token_start: usize,
    pub token_end: usize,
    pub leaf_count: usize,
    pub parent: Option<NodeId>,
    /// Edge count from the root (root has depth 0).
    pub depth: usize,
}

impl RstNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.token_end - self.token_start
    }
}

/// An immutable discourse tree aligned to one document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RstTree {
    pub nodes: Vec<RstNode>,
    pub root: NodeId,
    /// Leaf node ids in text order; `leaves[i]` is EDU `i`.
    pub leaves: Vec<NodeId>,
    pub doc_id: String,
}

impl RstTree {
    pub fn node(&self, id: NodeId) -> &RstNode {
        &self.nodes[id]
    }

    pub fn is_binary(&self) -> bool {
        self.nodes.iter().all(|n| n.is_leaf() || n.children.len() == 2)
    }

    pub fn depth(&self, id: NodeId) -> usize {
        self.nodes[id].depth
    }

    pub fn max_leaf_depth(&self) -> usize {
        self.leaves.iter().map(|&l| self.nodes[l].depth).max().unwrap_or(0)
    }

    /// Leaf whose token range contains `tok`.
    pub fn leaf_at_token(&self, tok: usize) -> Option<NodeId> {
        let idx = self
            .leaves
            .partition_point(|&l| self.nodes[l].token_end <= tok);
        self.leaves.get(idx).copied().filter(|&l| {
            let n = &self.nodes[l];
            n.token_start <= tok && tok < n.token_end
        })
    }

    /// Serialize back to the s-expression format.
    pub fn to_sexpr(&self) -> String {
        fn rec(tree: &RstTree, id: NodeId, out: &mut String) {
            let n = &tree.nodes[id];
            if n.is_leaf() {
                out.push_str(&format!(
                    "(edu {} {} {})",
                    n.edu_id.unwrap(),
                    n.token_start,
                    n.token_end
                ));
            } else {
                out.push_str(&format!("(node {}", n.relation.as_deref().unwrap_or("Span")));
                for &c in &n.children {
                    out.push(' ');
                    rec(tree, c, out);
                }
                out.push(')');
            }
        }
        let mut out = String::new();
        rec(self, self.root, &mut out);
        out
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

enum SToken {
    Open,
    Close,
    Atom(String),
}

fn tokenize(text: &str) -> Vec<SToken> {
    let mut toks = Vec::new();
    let mut atom = String::new();
    for c in text.chars() {
        match c {
            '(' | ')' => {
                if !atom.is_empty() {
                    toks.push(SToken::Atom(std::mem::take(&mut atom)));
                }
                toks.push(if c == '(' { SToken::Open } else { SToken::Close });
            }
            c if c.is_whitespace() => {
                if !atom.is_empty() {
                    toks.push(SToken::Atom(std::mem::take(&mut atom)));
                }
            }
            c => atom.push(c),
        }
    }
    if !atom.is_empty() {
        toks.push(SToken::Atom(atom));
    }
    toks
}

/// Parse one serialized tree and validate its alignment against `doc`.
/// The result may be n-ary; run [`binarize`] before using it for features.
pub fn parse_rst(text: &str, doc: &Document) -> Result<RstTree> {
    let toks = tokenize(text);
    let mut pos = 0usize;
    let mut nodes: Vec<RstNode> = Vec::new();
    let root = parse_expr(&toks, &mut pos, &mut nodes, &doc.doc_id)?;
    if pos != toks.len() {
        return Err(Error::parse(&doc.doc_id, 0, "trailing tokens after tree"));
    }

    let mut tree = RstTree { nodes, root, leaves: Vec::new(), doc_id: doc.doc_id.clone() };
    finalize(&mut tree);
    validate_alignment(&tree, doc)?;
    Ok(tree)
}

fn parse_expr(
    toks: &[SToken],
    pos: &mut usize,
    nodes: &mut Vec<RstNode>,
    doc_id: &str,
) -> Result<NodeId> {
    match toks.get(*pos) {
        Some(SToken::Open) => *pos += 1,
        _ => return Err(Error::parse(doc_id, 0, "expected '('")),
    }
    let head = match toks.get(*pos) {
        Some(SToken::Atom(a)) => {
            *pos += 1;
            a.as_str()
        }
        _ => return Err(Error::parse(doc_id, 0, "expected 'node' or 'edu' after '('")),
    };
    match head {
        "edu" => {
            let mut nums = [0usize; 3];
            for slot in &mut nums {
                match toks.get(*pos) {
                    Some(SToken::Atom(a)) => {
                        *slot = a.parse().map_err(|_| {
                            Error::parse(doc_id, 0, format!("invalid edu field: {a}"))
                        })?;
                        *pos += 1;
                    }
                    _ => return Err(Error::parse(doc_id, 0, "edu needs <id> <start> <end>")),
                }
            }
            match toks.get(*pos) {
                Some(SToken::Close) => *pos += 1,
                _ => return Err(Error::parse(doc_id, 0, "unbalanced parens: expected ')'")),
            }
            let [edu_id, start, end] = nums;
            nodes.push(RstNode {
                relation: None,
                children: vec![],
                edu_id: Some(edu_id),
                token_start: start,
                token_end: end,
                leaf_count: 1,
                parent: None,
                depth: 0,
            });
            Ok(nodes.len() - 1)
        }
        "node" => {
            let relation = match toks.get(*pos) {
                Some(SToken::Atom(a)) => {
                    *pos += 1;
                    a.clone()
                }
                _ => return Err(Error::parse(doc_id, 0, "node needs a relation label")),
            };
            let mut children = Vec::new();
            loop {
                match toks.get(*pos) {
                    Some(SToken::Close) => {
                        *pos += 1;
                        break;
                    }
                    Some(SToken::Open) => children.push(parse_expr(toks, pos, nodes, doc_id)?),
                    Some(SToken::Atom(a)) => {
                        return Err(Error::parse(
                            doc_id,
                            0,
                            format!("unexpected atom '{a}' in node child list"),
                        ));
                    }
                    None => {
                        return Err(Error::parse(doc_id, 0, "unbalanced parens: missing ')'"));
                    }
                }
            }
            if children.is_empty() {
                return Err(Error::parse(doc_id, 0, "internal node with no children"));
            }
            nodes.push(RstNode {
                relation: Some(relation),
                children,
                edu_id: None,
                token_start: 0,
                token_end: 0,
                leaf_count: 0,
                parent: None,
                depth: 0,
            });
            Ok(nodes.len() - 1)
        }
        other => Err(Error::parse(doc_id, 0, format!("unknown head '{other}'"))),
    }
}

/// Fill leaves (in order), parents, depths, and subtree coverage.
fn finalize(tree: &mut RstTree) {
    tree.leaves.clear();
    // Iterative DFS keeps child order, so leaves come out in text order.
    let mut stack = vec![(tree.root, None::<NodeId>, 0usize)];
    let mut order = Vec::new();
    while let Some((id, parent, depth)) = stack.pop() {
        tree.nodes[id].parent = parent;
        tree.nodes[id].depth = depth;
        order.push(id);
        for &c in tree.nodes[id].children.iter().rev() {
            stack.push((c, Some(id), depth + 1));
        }
    }
    for &id in order.iter().rev() {
        if tree.nodes[id].is_leaf() {
            tree.nodes[id].leaf_count = 1;
        } else {
            let children = tree.nodes[id].children.clone();
            tree.nodes[id].leaf_count = children.iter().map(|&c| tree.nodes[c].leaf_count).sum();
            tree.nodes[id].token_start = tree.nodes[children[0]].token_start;
            tree.nodes[id].token_end = tree.nodes[*children.last().unwrap()].token_end;
        }
    }
    // `order` is preorder; collecting its leaves preserves text order.
    tree.leaves = order.into_iter().filter(|&id| tree.nodes[id].is_leaf()).collect();
}

fn validate_alignment(tree: &RstTree, doc: &Document) -> Result<()> {
    let mut problems = Vec::new();
    let mut expected_start = 0usize;
    for (i, &leaf) in tree.leaves.iter().enumerate() {
        let n = &tree.nodes[leaf];
        if n.edu_id != Some(i) {
            problems.push(format!(
                "EDU at position {i} has id {:?}, expected {i}",
                n.edu_id
            ));
        }
        if n.token_start >= n.token_end {
            problems.push(format!("EDU {i} has empty range [{}, {})", n.token_start, n.token_end));
        } else if n.token_start != expected_start {
            let kind = if n.token_start > expected_start { "gap" } else { "overlap" };
            problems.push(format!(
                "EDU {i} starts at {} but previous coverage ends at {expected_start} ({kind})",
                n.token_start
            ));
        }
        expected_start = n.token_end;
    }
    if expected_start != doc.token_count() {
        problems.push(format!(
            "leaves cover [0, {expected_start}) but document has {} tokens",
            doc.token_count()
        ));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::alignment(&doc.doc_id, problems.join("; ")))
    }
}

// ---------------------------------------------------------------------------
// Binarization
// ---------------------------------------------------------------------------

/// Right-branching binarization. An n-ary node over children `c1..ck`
/// becomes `(c1, (c2, (..., ck)))`; synthetic internal nodes inherit the
/// parent's relation label. Leaf order and token ranges are unchanged, and a
/// tree that is already binary comes back structurally identical.
pub fn binarize(tree: &RstTree) -> RstTree {
    fn copy(src: &RstTree, id: NodeId, nodes: &mut Vec<RstNode>) -> NodeId {
        let n = &src.nodes[id];
        if n.is_leaf() {
            nodes.push(RstNode { parent: None, depth: 0, ..n.clone() });
            return nodes.len() - 1;
        }
        let relation = n.relation.clone();
        chain(src, &n.children, relation, nodes)
    }

    fn chain(
        src: &RstTree,
        children: &[NodeId],
        relation: Option<String>,
        nodes: &mut Vec<RstNode>,
    ) -> NodeId {
        if children.len() == 1 {
            return copy(src, children[0], nodes);
        }
        let left = copy(src, children[0], nodes);
        let right = if children.len() == 2 {
            copy(src, children[1], nodes)
        } else {
            chain(src, &children[1..], relation.clone(), nodes)
        };
        nodes.push(RstNode {
            relation,
            children: vec![left, right],
            edu_id: None,
            token_start: 0,
            token_end: 0,
            leaf_count: 0,
            parent: None,
            depth: 0,
        });
        nodes.len() - 1
    }

    let mut nodes = Vec::with_capacity(tree.nodes.len());
    let root = copy(tree, tree.root, &mut nodes);
    let mut out = RstTree { nodes, root, leaves: Vec::new(), doc_id: tree.doc_id.clone() };
    finalize(&mut out);
    debug_assert!(out.is_binary());
    out
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

/// Lowest common ancestor of two leaves: the deepest node whose subtree
/// contains both. `lca(x, x) == x` and the result is symmetric in its
/// arguments.
pub fn lca(tree: &RstTree, leaf_a: NodeId, leaf_b: NodeId) -> Result<NodeId> {
    for leaf in [leaf_a, leaf_b] {
        if leaf >= tree.nodes.len() || !tree.nodes[leaf].is_leaf() {
            return Err(Error::Eval(format!("node {leaf} is not a leaf of {}", tree.doc_id)));
        }
    }
    let (mut a, mut b) = (leaf_a, leaf_b);
    while tree.nodes[a].depth > tree.nodes[b].depth {
        a = tree.nodes[a].parent.expect("non-root node has a parent");
    }
    while tree.nodes[b].depth > tree.nodes[a].depth {
        b = tree.nodes[b].parent.expect("non-root node has a parent");
    }
    while a != b {
        a = tree.nodes[a].parent.expect("walk meets at the root");
        b = tree.nodes[b].parent.expect("walk meets at the root");
    }
    Ok(a)
}

/// Subtree statistics for a node: leaves under it, tokens covered, and
/// distinct sentences covered (per the document's sentence map).
///
/// Leaf coverage is contiguous, so the sentence count is read off the first
/// and last covered token.
pub fn node_stats(tree: &RstTree, node: NodeId, doc: &Document) -> (usize, usize, usize) {
    let n = &tree.nodes[node];
    debug_assert!(n.token_end <= doc.token_count(), "tree/doc mismatch");
    let sentences = doc.sentence_index[n.token_end - 1] - doc.sentence_index[n.token_start] + 1;
    (n.leaf_count, n.token_count(), sentences)
}
