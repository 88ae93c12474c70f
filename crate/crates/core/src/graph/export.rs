use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{GraphError, LayoutResult, PatternGraph};
use crate::canonical;
use crate::model::Ownership;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    GraphMl,
    CanonicalJson,
}

impl FromStr for ExportFormat {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(ExportFormat::Dot),
            "graphml" => Ok(ExportFormat::GraphMl),
            "json" | "canonical-json" => Ok(ExportFormat::CanonicalJson),
            _ => Err(GraphError::UnsupportedFormat(s.to_owned())),
        }
    }
}

/// Canonical-json graph document: `scope`, `nodes[]` and `edges[]` sorted by
/// id, plus the layout when one was requested.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    #[serde(flatten)]
    pub graph: PatternGraph,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<LayoutResult>,
}

pub fn export_graph(graph: &PatternGraph, format: ExportFormat, layout: Option<&LayoutResult>) -> Vec<u8> {
    match format {
        ExportFormat::Dot => to_dot(graph, layout).into_bytes(),
        ExportFormat::GraphMl => to_graphml(graph, layout).into_bytes(),
        ExportFormat::CanonicalJson => {
            let document = GraphDocument {
                graph: graph.clone(),
                layout: layout.cloned(),
            };
            canonical::to_vec(&document).expect("graph documents always serialize")
        }
    }
}

pub fn import_canonical_json(bytes: &[u8]) -> Result<GraphDocument, GraphError> {
    serde_json::from_slice(bytes).map_err(|e| GraphError::MalformedGraph(e.to_string()))
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(ch),
        }
    }
    out.push('"');
    out
}

fn to_dot(graph: &PatternGraph, layout: Option<&LayoutResult>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", dot_quote(&graph.scope().label()));
    for node in graph.nodes() {
        let _ = write!(
            out,
            "  {} [label={}, language={}",
            dot_quote(node.id.as_str()),
            dot_quote(&node.name),
            dot_quote(node.language_id.as_str())
        );
        if node.external {
            out.push_str(", external=true, style=dotted");
        }
        if let Some(p) = layout.and_then(|l| l.positions.get(&node.id)) {
            let _ = write!(out, ", pos=\"{},{}!\"", p.x, p.y);
        }
        out.push_str("];\n");
    }
    for edge in graph.edges() {
        let _ = write!(
            out,
            "  {} -> {} [id={}, label={}, ownership={}, span={}",
            dot_quote(edge.source.as_str()),
            dot_quote(edge.target.as_str()),
            dot_quote(edge.id.as_str()),
            dot_quote(&edge.relation_type),
            edge.ownership.as_str(),
            edge.span.as_str()
        );
        if !edge.directed {
            out.push_str(", dir=none");
        }
        if edge.ownership == Ownership::View {
            out.push_str(", style=dashed");
        }
        out.push_str("];\n");
    }
    out.push_str("}\n");
    out
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(ch),
        }
    }
    out
}

const GRAPHML_KEYS: &[(&str, &str, &str, &str)] = &[
    ("name", "node", "name", "string"),
    ("language", "node", "languageId", "string"),
    ("external", "node", "external", "boolean"),
    ("x", "node", "x", "double"),
    ("y", "node", "y", "double"),
    ("type", "edge", "type", "string"),
    ("directed", "edge", "directed", "boolean"),
    ("ownership", "edge", "ownership", "string"),
    ("span", "edge", "span", "string"),
];

fn to_graphml(graph: &PatternGraph, layout: Option<&LayoutResult>) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    for (id, target, name, ty) in GRAPHML_KEYS {
        let _ = writeln!(
            out,
            "  <key id=\"{id}\" for=\"{target}\" attr.name=\"{name}\" attr.type=\"{ty}\"/>"
        );
    }
    let _ = writeln!(
        out,
        "  <graph id=\"{}\" edgedefault=\"directed\">",
        xml_escape(&graph.scope().label())
    );
    for node in graph.nodes() {
        let _ = writeln!(out, "    <node id=\"{}\">", xml_escape(node.id.as_str()));
        let _ = writeln!(out, "      <data key=\"name\">{}</data>", xml_escape(&node.name));
        let _ = writeln!(
            out,
            "      <data key=\"language\">{}</data>",
            xml_escape(node.language_id.as_str())
        );
        let _ = writeln!(out, "      <data key=\"external\">{}</data>", node.external);
        if let Some(p) = layout.and_then(|l| l.positions.get(&node.id)) {
            let _ = writeln!(out, "      <data key=\"x\">{}</data>", p.x);
            let _ = writeln!(out, "      <data key=\"y\">{}</data>", p.y);
        }
        out.push_str("    </node>\n");
    }
    for edge in graph.edges() {
        let _ = writeln!(
            out,
            "    <edge id=\"{}\" source=\"{}\" target=\"{}\" directed=\"{}\">",
            xml_escape(edge.id.as_str()),
            xml_escape(edge.source.as_str()),
            xml_escape(edge.target.as_str()),
            edge.directed
        );
        let _ = writeln!(
            out,
            "      <data key=\"type\">{}</data>",
            xml_escape(&edge.relation_type)
        );
        let _ = writeln!(out, "      <data key=\"directed\">{}</data>", edge.directed);
        let _ = writeln!(out, "      <data key=\"ownership\">{}</data>", edge.ownership.as_str());
        let _ = writeln!(out, "      <data key=\"span\">{}</data>", edge.span.as_str());
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}
