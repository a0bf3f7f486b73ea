//! Versioned nested JSON form of a cover tree.
//!
//! ```json
//! {"format": "dualtree-cover-tree", "version": 1, "points": 3, "dim": 1,
//!  "root": {"point": 0, "scale": 1, "descendant_count": 3, "children": [
//!     {"point": 0, "scale": "leaf", "descendant_count": 1}, ...]}}
//! ```

use std::path::Path;

use dualtree_core::{CoverNode, CoverTree, Dataset, NodeId, Scale};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const FORMAT: &str = "dualtree-cover-tree";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDoc {
    pub format: String,
    pub version: u32,
    pub points: usize,
    pub dim: usize,
    pub root: NodeDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub point: usize,
    pub scale: ScaleDoc,
    pub descendant_count: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<NodeDoc>,
}

/// An integer scale, or the string `"leaf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScaleDoc {
    Level(i32),
    Named(String),
}

impl From<Scale> for ScaleDoc {
    fn from(s: Scale) -> Self {
        match s {
            Scale::Leaf => ScaleDoc::Named("leaf".into()),
            Scale::Level(l) => ScaleDoc::Level(l),
        }
    }
}

pub fn to_doc(tree: &CoverTree<'_>) -> TreeDoc {
    fn node(tree: &CoverTree<'_>, id: NodeId) -> NodeDoc {
        let n = tree.node(id);
        NodeDoc {
            point: n.point,
            scale: n.scale.into(),
            descendant_count: n.descendant_count,
            children: n.children.iter().map(|&c| node(tree, c)).collect(),
        }
    }
    let data = tree.dataset();
    TreeDoc { format: FORMAT.into(), version: VERSION, points: data.len(), dim: data.dim(), root: node(tree, tree.root()) }
}

/// Rebuild the arena form. Structural problems (wrong dataset size, point
/// ids out of range) are errors; cover-tree invariants are left to the
/// verifier so that broken trees can still be inspected.
pub fn from_doc<'a>(doc: &TreeDoc, data: &'a Dataset) -> Result<CoverTree<'a>, String> {
    if doc.format != FORMAT {
        return Err(format!("unknown format `{}`", doc.format));
    }
    if doc.version != VERSION {
        return Err(format!("unsupported version {}", doc.version));
    }
    if doc.points != data.len() || doc.dim != data.dim() {
        return Err(format!(
            "tree is for {} points in {} dimensions, dataset has {} in {}",
            doc.points,
            doc.dim,
            data.len(),
            data.dim()
        ));
    }
    let mut nodes = Vec::new();
    let mut stack: Vec<(&NodeDoc, Option<usize>)> = vec![(&doc.root, None)];
    while let Some((n, parent)) = stack.pop() {
        if n.point >= data.len() {
            return Err(format!("point id {} out of range", n.point));
        }
        let scale = match &n.scale {
            ScaleDoc::Level(l) => Scale::Level(*l),
            ScaleDoc::Named(s) if s == "leaf" => Scale::Leaf,
            ScaleDoc::Named(s) => return Err(format!("bad scale `{s}`")),
        };
        let id = nodes.len();
        nodes.push(CoverNode { point: n.point, scale, children: Vec::new(), descendant_count: n.descendant_count });
        if let Some(p) = parent {
            nodes[p].children.push(NodeId(id as u32));
        }
        for c in n.children.iter().rev() {
            stack.push((c, Some(id)));
        }
    }
    Ok(CoverTree::from_nodes(data, nodes, NodeId(0)))
}

pub fn write(path: &Path, tree: &CoverTree<'_>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(&to_doc(tree)).expect("tree documents always serialize");
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

pub fn read(path: &Path) -> CliResult<TreeDoc> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    de.disable_recursion_limit();
    TreeDoc::deserialize(&mut de).map_err(|e| CliError::Format { path: path.into(), message: e.to_string() })
}
