//! Edge-list text format.
//!
//! ```text
//! # comment
//! U 3 10          <- D|U, node count, w_max
//! 1 2 5           <- u v w (1-based IDs)
//! Z 1 3           <- optional terminal line (Steiner)
//! R 1             <- optional root line (DMST)
//! ```

use std::collections::HashSet;

use super::WeightedGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedInstance {
    pub graph: WeightedGraph,
    /// Terminal indices (0-based) from a `Z` line.
    pub terminals: Option<Vec<usize>>,
    /// Root index (0-based) from an `R` line.
    pub root: Option<usize>,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| perr(line, format!("invalid {what} `{tok}`")))
}

fn parse_id(tok: &str, n: usize, line: usize) -> Result<usize> {
    let id: usize = parse_num(tok, line, "node id")?;
    if id == 0 || id > n {
        return Err(perr(line, format!("node id {id} outside [1, {n}]")));
    }
    Ok(id - 1)
}

pub fn parse_instance(text: &str) -> Result<ParsedInstance> {
    let mut graph: Option<WeightedGraph> = None;
    let mut seen = HashSet::new();
    let mut terminals = None;
    let mut root = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some(g) = graph.as_mut() else {
            if toks.len() != 3 || (toks[0] != "D" && toks[0] != "U") {
                return Err(perr(line_no, "malformed header, expected `D|U <n> <w_max>`"));
            }
            let n: usize = parse_num(toks[1], line_no, "node count")?;
            let w_max: i64 = parse_num(toks[2], line_no, "w_max")?;
            if n == 0 {
                return Err(perr(line_no, "node count must be positive"));
            }
            if w_max < 1 {
                return Err(perr(line_no, "w_max must be at least 1"));
            }
            graph = Some(WeightedGraph::new(n, toks[0] == "D", w_max));
            continue;
        };
        let n = g.n();
        match toks[0] {
            "Z" => {
                if terminals.is_some() {
                    return Err(perr(line_no, "duplicate Z line"));
                }
                if toks.len() < 2 {
                    return Err(perr(line_no, "Z line lists no terminals"));
                }
                let ids = toks[1..]
                    .iter()
                    .map(|t| parse_id(t, n, line_no))
                    .collect::<Result<Vec<_>>>()?;
                terminals = Some(ids);
            }
            "R" => {
                if root.is_some() {
                    return Err(perr(line_no, "duplicate R line"));
                }
                if toks.len() != 2 {
                    return Err(perr(line_no, "R line must hold exactly one id"));
                }
                root = Some(parse_id(toks[1], n, line_no)?);
            }
            _ => {
                if toks.len() != 3 {
                    return Err(perr(line_no, "malformed edge line, expected `<u> <v> <w>`"));
                }
                let u = parse_id(toks[0], n, line_no)?;
                let v = parse_id(toks[1], n, line_no)?;
                let w: i64 = parse_num(toks[2], line_no, "weight")?;
                if u == v {
                    return Err(perr(line_no, "self-loops are not allowed"));
                }
                if w < 1 || w > g.w_max() {
                    return Err(perr(
                        line_no,
                        format!("weight {w} out of range [1, {}]", g.w_max()),
                    ));
                }
                let key = if g.directed() { (u, v) } else { (u.min(v), u.max(v)) };
                if !seen.insert(key) {
                    return Err(perr(
                        line_no,
                        format!("duplicate edge {} {}", u + 1, v + 1),
                    ));
                }
                g.set_weight(u, v, w);
            }
        }
    }
    let graph = graph.ok_or_else(|| perr(1, "missing header"))?;
    Ok(ParsedInstance {
        graph,
        terminals,
        root,
    })
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    parse_instance(text).map(|p| p.graph)
}

/// Canonical form: header, then edges in row-major order.
pub fn serialize_graph(g: &WeightedGraph) -> String {
    let mut out = format!(
        "{} {} {}\n",
        if g.directed() { "D" } else { "U" },
        g.n(),
        g.w_max()
    );
    for (u, v, w) in g.edges() {
        out.push_str(&format!("{} {} {}\n", u + 1, v + 1, w));
    }
    out
}

pub fn serialize_instance(p: &ParsedInstance) -> String {
    let mut out = serialize_graph(&p.graph);
    if let Some(z) = &p.terminals {
        let ids: Vec<String> = z.iter().map(|t| (t + 1).to_string()).collect();
        out.push_str(&format!("Z {}\n", ids.join(" ")));
    }
    if let Some(r) = p.root {
        out.push_str(&format!("R {}\n", r + 1));
    }
    out
}
