//! Accessibility-tree model and its line-oriented interchange format.
//!
//! ```text
//! #a11y v1 screen=640x360
//! desktop | Desktop | 0,0,640,360 | enabled
//!   pane | Taskbar | 0,342,640,360 | enabled
//!     button | Start | 224,342,243,360 | enabled,focusable | ref=start
//! ```
//!
//! The first non-blank line is the versioned header. Every other non-blank
//! line is one node: `role | name | x1,y1,x2,y2 | flags` plus an optional
//! fifth `ref=<id>` field. Nesting is two spaces per level. Inside a name,
//! `\|` is a literal bar and `\\` a literal backslash. Lines starting with
//! `#` after the header are comments. A `ref` may appear only once per
//! document; a repeated reference would make the tree a graph and is
//! rejected.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum A11yError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: node reference {reference:?} repeats")]
    Cycle { line: usize, reference: String },
}

impl A11yError {
    fn parse(line: usize, reason: impl Into<String>) -> Self {
        A11yError::Parse {
            line,
            reason: reason.into(),
        }
    }
}

/// Pixel bounds; `x2`/`y2` are exclusive edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PixelBox {
    pub x1: i32,
    pub y1: i32,
    pub x2: i32,
    pub y2: i32,
}

impl PixelBox {
    pub fn new(x1: i32, y1: i32, x2: i32, y2: i32) -> Self {
        Self { x1, y1, x2, y2 }
    }

    pub fn contains(&self, x: i32, y: i32) -> bool {
        x >= self.x1 && x < self.x2 && y >= self.y1 && y < self.y2
    }

    pub fn width(&self) -> i32 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> i32 {
        self.y2 - self.y1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct A11yNode {
    pub role: String,
    pub name: String,
    pub bounds_px: PixelBox,
    pub states: BTreeSet<String>,
    pub children: Vec<A11yNode>,
}

impl A11yNode {
    pub fn new(role: &str, name: &str, bounds_px: PixelBox, states: &[&str]) -> Self {
        Self {
            role: role.to_string(),
            name: name.to_string(),
            bounds_px,
            states: states.iter().map(|s| s.to_string()).collect(),
            children: Vec::new(),
        }
    }

    pub fn with_children(mut self, children: Vec<A11yNode>) -> Self {
        self.children = children;
        self
    }

    pub fn has_state(&self, s: &str) -> bool {
        self.states.contains(s)
    }

    /// Pre-order traversal with child-index paths ("0", "0/2", ...).
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a A11yNode, &str)) {
        fn go<'a>(n: &'a A11yNode, path: String, f: &mut impl FnMut(&'a A11yNode, &str)) {
            f(n, &path);
            for (i, c) in n.children.iter().enumerate() {
                go(c, format!("{path}/{i}"), f);
            }
        }
        go(self, "0".to_string(), f);
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(A11yNode::node_count).sum::<usize>()
    }
}

/// A parsed interchange document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct A11yDocument {
    pub version: u32,
    pub screen: Option<(u32, u32)>,
    pub root: A11yNode,
}

/// Parses a serialized tree and returns its root.
pub fn parse_a11y_tree(serialized: &str) -> Result<A11yNode, A11yError> {
    parse_a11y_document(serialized).map(|d| d.root)
}

pub fn parse_a11y_document(serialized: &str) -> Result<A11yDocument, A11yError> {
    let mut lines = serialized
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let (hline, header) = lines
        .next()
        .ok_or_else(|| A11yError::parse(1, "empty document"))?;
    let (version, screen) = parse_header(hline, header)?;

    // stack of (depth, node) under construction
    let mut stack: Vec<(usize, A11yNode)> = Vec::new();
    let mut root: Option<A11yNode> = None;
    let mut refs = HashSet::new();

    for (line_no, raw) in lines {
        if raw.trim_start().starts_with('#') {
            continue;
        }
        if raw.contains('\t') {
            return Err(A11yError::parse(line_no, "tabs are not allowed for indentation"));
        }
        let indent = raw.len() - raw.trim_start_matches(' ').len();
        if indent % 2 != 0 {
            return Err(A11yError::parse(line_no, "indentation must be a multiple of two spaces"));
        }
        let depth = indent / 2;
        let (node, reference) = parse_node_line(line_no, raw.trim_start())?;
        if let Some(r) = reference {
            if !refs.insert(r.clone()) {
                return Err(A11yError::Cycle {
                    line: line_no,
                    reference: r,
                });
            }
        }

        if stack.is_empty() {
            if root.is_some() || depth != 0 {
                return Err(A11yError::parse(line_no, "document must have exactly one root"));
            }
            stack.push((0, node));
            continue;
        }
        let top_depth = stack.last().map(|(d, _)| *d).unwrap_or(0);
        if depth > top_depth + 1 {
            return Err(A11yError::parse(line_no, "indentation skips a level"));
        }
        if depth == 0 {
            return Err(A11yError::parse(line_no, "document must have exactly one root"));
        }
        // close finished siblings/descendants
        while stack.last().map(|(d, _)| *d >= depth).unwrap_or(false) {
            let (_, done) = stack.pop().unwrap();
            stack.last_mut().unwrap().1.children.push(done);
        }
        stack.push((depth, node));
    }

    while stack.len() > 1 {
        let (_, done) = stack.pop().unwrap();
        stack.last_mut().unwrap().1.children.push(done);
    }
    root = root.or(stack.pop().map(|(_, n)| n));
    let root = root.ok_or_else(|| A11yError::parse(hline, "document has no nodes"))?;
    Ok(A11yDocument {
        version,
        screen,
        root,
    })
}

fn parse_header(line: usize, header: &str) -> Result<(u32, Option<(u32, u32)>), A11yError> {
    let mut parts = header.split_whitespace();
    if parts.next() != Some("#a11y") {
        return Err(A11yError::parse(line, "missing '#a11y v<N>' header"));
    }
    let version = parts
        .next()
        .and_then(|v| v.strip_prefix('v'))
        .and_then(|v| v.parse::<u32>().ok())
        .ok_or_else(|| A11yError::parse(line, "missing format version"))?;
    if version != FORMAT_VERSION {
        return Err(A11yError::parse(line, format!("unsupported version {version}")));
    }
    let mut screen = None;
    for p in parts {
        let Some(dim) = p.strip_prefix("screen=") else {
            return Err(A11yError::parse(line, format!("unknown header field {p:?}")));
        };
        let (w, h) = dim
            .split_once('x')
            .and_then(|(w, h)| Some((w.parse::<u32>().ok()?, h.parse::<u32>().ok()?)))
            .ok_or_else(|| A11yError::parse(line, format!("bad screen size {dim:?}")))?;
        screen = Some((w, h));
    }
    Ok((version, screen))
}

/// Splits on unescaped `|` and unescapes each field.
fn split_fields(s: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => match chars.next() {
                Some(n) => out.last_mut().unwrap().push(n),
                None => out.last_mut().unwrap().push('\\'),
            },
            '|' => out.push(String::new()),
            _ => out.last_mut().unwrap().push(c),
        }
    }
    out
}

fn parse_node_line(line: usize, s: &str) -> Result<(A11yNode, Option<String>), A11yError> {
    let fields = split_fields(s);
    if fields.len() < 4 || fields.len() > 5 {
        return Err(A11yError::parse(
            line,
            format!("expected 4 or 5 '|'-separated fields, found {}", fields.len()),
        ));
    }
    let role = fields[0].trim();
    if role.is_empty() {
        return Err(A11yError::parse(line, "empty role"));
    }
    // names keep inner spacing; only the single pad space around separators is dropped
    let name = fields[1].strip_prefix(' ').unwrap_or(&fields[1]);
    let name = name.strip_suffix(' ').unwrap_or(name);

    let coords: Vec<&str> = fields[2].trim().split(',').map(str::trim).collect();
    if coords.len() != 4 {
        return Err(A11yError::parse(line, "bounds must be x1,y1,x2,y2"));
    }
    let mut v = [0i32; 4];
    for (slot, c) in v.iter_mut().zip(&coords) {
        *slot = c
            .parse()
            .map_err(|_| A11yError::parse(line, format!("bound {c:?} is not an integer")))?;
    }
    let bounds = PixelBox::new(v[0], v[1], v[2], v[3]);
    if bounds.x1 > bounds.x2 || bounds.y1 > bounds.y2 {
        return Err(A11yError::parse(line, "bounds require x1 <= x2 and y1 <= y2"));
    }
    let states: BTreeSet<String> = fields[3]
        .split(',')
        .map(str::trim)
        .filter(|f| !f.is_empty())
        .map(str::to_string)
        .collect();
    let reference = match fields.get(4) {
        None => None,
        Some(f) => {
            let r = f
                .trim()
                .strip_prefix("ref=")
                .filter(|r| !r.is_empty())
                .ok_or_else(|| A11yError::parse(line, "fifth field must be ref=<id>"))?;
            Some(r.to_string())
        }
    };
    Ok((
        A11yNode {
            role: role.to_string(),
            name: name.to_string(),
            bounds_px: bounds,
            states,
            children: Vec::new(),
        },
        reference,
    ))
}

fn escape_name(name: &str) -> String {
    name.replace('\\', "\\\\").replace('|', "\\|")
}

/// Serializes a tree in the interchange format.
pub fn serialize_a11y_tree(root: &A11yNode, screen: Option<(u32, u32)>) -> String {
    let mut out = format!("#a11y v{FORMAT_VERSION}");
    if let Some((w, h)) = screen {
        let _ = write!(out, " screen={w}x{h}");
    }
    out.push('\n');
    fn go(n: &A11yNode, depth: usize, out: &mut String) {
        let b = n.bounds_px;
        let flags: Vec<&str> = n.states.iter().map(String::as_str).collect();
        let _ = writeln!(
            out,
            "{}{} | {} | {},{},{},{} | {}",
            "  ".repeat(depth),
            n.role,
            escape_name(&n.name),
            b.x1,
            b.y1,
            b.x2,
            b.y2,
            flags.join(",")
        );
        for c in &n.children {
            go(c, depth + 1, out);
        }
    }
    go(root, 0, &mut out);
    out
}

/// Roles that become marks unless configured otherwise.
pub const DEFAULT_INTERACTABLE_ROLES: [&str; 8] = [
    "button", "textfield", "menuitem", "checkbox", "link", "icon", "listitem", "tab",
];

/// Interactability predicate used by [`extract_elements`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementFilter {
    pub roles: BTreeSet<String>,
    pub require_enabled: bool,
    /// A node carrying any of these states is skipped together with its subtree.
    pub prune_states: BTreeSet<String>,
}

impl Default for ElementFilter {
    fn default() -> Self {
        Self {
            roles: DEFAULT_INTERACTABLE_ROLES.iter().map(|s| s.to_string()).collect(),
            require_enabled: true,
            prune_states: ["occluded".to_string()].into_iter().collect(),
        }
    }
}

impl ElementFilter {
    pub fn accepts(&self, n: &A11yNode) -> bool {
        self.roles.contains(&n.role) && (!self.require_enabled || n.has_state("enabled"))
    }
}

/// One extracted element before normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelElement {
    pub id: u32,
    pub label: String,
    pub role: String,
    pub bounds_px: PixelBox,
    pub source_path: String,
}

/// Pre-order extraction; IDs are assigned in traversal order from 1.
pub fn extract_elements(root: &A11yNode, filter: &ElementFilter) -> Vec<PixelElement> {
    fn go(n: &A11yNode, path: String, filter: &ElementFilter, out: &mut Vec<PixelElement>) {
        if n.states.iter().any(|s| filter.prune_states.contains(s)) {
            return;
        }
        if filter.accepts(n) {
            out.push(PixelElement {
                id: out.len() as u32 + 1,
                label: n.name.clone(),
                role: n.role.clone(),
                bounds_px: n.bounds_px,
                source_path: path.clone(),
            });
        }
        for (i, c) in n.children.iter().enumerate() {
            go(c, format!("{path}/{i}"), filter, out);
        }
    }
    let mut out = Vec::new();
    go(root, "0".to_string(), filter, &mut out);
    out
}
