//! Just enough GML to read the classic network-data files: `node` blocks
//! with an `id` and scalar attributes, and `edge` blocks with
//! `source`/`target`. Nested blocks such as `graphics` are skipped.

use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Key(String),
    Str(String),
    Num(String),
    Open,
    Close,
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Str(String),
    Num(String),
    List(Vec<(String, Value)>),
}

impl Value {
    fn text(&self) -> Option<String> {
        match self {
            Value::Str(s) | Value::Num(s) => Some(s.clone()),
            Value::List(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmlNode {
    pub id: i64,
    /// Scalar attributes other than `id`, in file order.
    pub attrs: Vec<(String, String)>,
}

impl GmlNode {
    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmlGraph {
    pub directed: bool,
    pub nodes: Vec<GmlNode>,
    /// Endpoints as node ids.
    pub edges: Vec<(i64, i64)>,
}

impl GmlGraph {
    /// Maps node ids to `0..n` in file order.
    pub fn index(&self) -> HashMap<i64, usize> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id, i))
            .collect()
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>, String> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '#' {
            while chars.next().is_some_and(|c| c != '\n') {}
        } else if c == '[' {
            chars.next();
            out.push(Token::Open);
        } else if c == ']' {
            chars.next();
            out.push(Token::Close);
        } else if c == '"' {
            chars.next();
            let mut s = String::new();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(c) => s.push(c),
                    None => return Err("unterminated string".into()),
                }
            }
            out.push(Token::Str(s));
        } else if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '-' || c == '+' || c == '.' {
                    s.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token::Num(s));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token::Key(s));
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

fn parse_list(
    tokens: &[Token],
    pos: &mut usize,
    nested: bool,
) -> Result<Vec<(String, Value)>, String> {
    let mut items = Vec::new();
    loop {
        match tokens.get(*pos) {
            None if nested => return Err("missing `]`".into()),
            None => return Ok(items),
            Some(Token::Close) if nested => {
                *pos += 1;
                return Ok(items);
            }
            Some(Token::Key(k)) => {
                *pos += 1;
                let value = match tokens.get(*pos) {
                    Some(Token::Str(s)) => Value::Str(s.clone()),
                    Some(Token::Num(s)) => Value::Num(s.clone()),
                    Some(Token::Open) => {
                        *pos += 1;
                        let inner = parse_list(tokens, pos, true)?;
                        items.push((k.clone(), Value::List(inner)));
                        continue;
                    }
                    other => return Err(format!("key `{k}` followed by {other:?}")),
                };
                *pos += 1;
                items.push((k.clone(), value));
            }
            Some(other) => return Err(format!("expected a key, found {other:?}")),
        }
    }
}

fn get<'a>(items: &'a [(String, Value)], key: &str) -> Option<&'a Value> {
    items.iter().find(|(k, _)| k == key).map(|(_, v)| v)
}

fn get_int(items: &[(String, Value)], key: &str, what: &str) -> Result<i64, String> {
    let text = get(items, key)
        .and_then(Value::text)
        .ok_or_else(|| format!("{what} without `{key}`"))?;
    text.parse::<f64>()
        .ok()
        .filter(|v| v.fract() == 0.0)
        .map(|v| v as i64)
        .ok_or_else(|| format!("{what} has non-integer `{key}` {text:?}"))
}

pub fn parse(text: &str) -> Result<GmlGraph, String> {
    let tokens = tokenize(text)?;
    let mut pos = 0;
    let top = parse_list(&tokens, &mut pos, false)?;
    let Some(Value::List(graph)) = get(&top, "graph") else {
        return Err("no `graph [...]` block".into());
    };
    let directed = get(graph, "directed")
        .and_then(Value::text)
        .is_some_and(|d| d == "1");
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for (k, v) in graph {
        let Value::List(items) = v else { continue };
        match k.as_str() {
            "node" => nodes.push(GmlNode {
                id: get_int(items, "id", "node")?,
                attrs: items
                    .iter()
                    .filter(|(k, _)| k != "id")
                    .filter_map(|(k, v)| v.text().map(|t| (k.clone(), t)))
                    .collect(),
            }),
            "edge" => edges.push((
                get_int(items, "source", "edge")?,
                get_int(items, "target", "edge")?,
            )),
            _ => {}
        }
    }
    Ok(GmlGraph {
        directed,
        nodes,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
Creator "test"
graph
[
  directed 0
  node [ id 1 label "a" value "n" ]
  node [ id 2 label "b" value 3 ]
  node
  [
    id 7
    label "c d"
    graphics [ x 1.5 y -2.0e1 ]
  ]
  edge [ source 1 target 2 ]
  edge [ source 7 target 1 value 2 ]
]
"#;

    #[test]
    fn parses_nodes_and_edges() {
        let g = parse(SAMPLE).unwrap();
        assert!(!g.directed);
        assert_eq!(g.nodes.len(), 3);
        assert_eq!(g.nodes[1].attr("value"), Some("3"));
        assert_eq!(g.nodes[2].attr("label"), Some("c d"));
        assert_eq!(g.nodes[2].attr("value"), None);
        assert_eq!(g.nodes[2].attrs.len(), 1);
        assert_eq!(g.edges, vec![(1, 2), (7, 1)]);
        assert_eq!(g.index()[&7], 2);
    }

    #[test]
    fn rejects_broken_input() {
        assert!(parse("graph [ node [ id 1 ]").is_err());
        assert!(parse("graph [ edge [ source 1 ] ]").is_err());
        assert!(parse("nothing 1").is_err());
    }
}
