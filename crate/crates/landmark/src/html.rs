//! Parser for a well-nested HTML subset.
//!
//! Tags are lowercased, only `class`, `id` and `style` attributes are kept,
//! comments, doctypes, `<script>` and `<style>` are dropped, and text
//! becomes the own text of the enclosing element.

use landmark_core::TreeNode;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("html parse error at byte {offset}: {message}")]
pub struct HtmlError {
    pub offset: usize,
    pub message: String,
}

const VOID: [&str; 14] =
    ["area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source", "track", "wbr"];
const KEPT_ATTRS: [&str; 3] = ["class", "id", "style"];

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, HtmlError> {
    Err(HtmlError { offset, message: message.into() })
}

fn decode_entities(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(i) = rest.find('&') {
        out.push_str(&rest[..i]);
        rest = &rest[i..];
        let Some(end) = rest.find(';').filter(|&e| e <= 10) else {
            out.push('&');
            rest = &rest[1..];
            continue;
        };
        let name = &rest[1..end];
        let decoded = match name {
            "amp" => Some('&'),
            "lt" => Some('<'),
            "gt" => Some('>'),
            "quot" => Some('"'),
            "apos" => Some('\''),
            "nbsp" => Some(' '),
            _ if name.starts_with("#x") || name.starts_with("#X") => {
                u32::from_str_radix(&name[2..], 16).ok().and_then(char::from_u32)
            }
            _ if name.starts_with('#') => name[1..].parse().ok().and_then(char::from_u32),
            _ => None,
        };
        match decoded {
            Some(c) => {
                out.push(c);
                rest = &rest[end + 1..];
            }
            None => {
                out.push('&');
                rest = &rest[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn push_text(node: &mut TreeNode, text: &str) {
    let t = decode_entities(text);
    let t = t.split_whitespace().collect::<Vec<_>>().join(" ");
    if t.is_empty() {
        return;
    }
    if !node.own_text.is_empty() {
        node.own_text.push(' ');
    }
    node.own_text.push_str(&t);
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let r = self.rest();
        self.pos += r.len() - r.trim_start().len();
    }

    fn name(&mut self) -> &'a str {
        let r = self.rest();
        let n = r.find(|c: char| c.is_whitespace() || c == '>' || c == '/' || c == '=').unwrap_or(r.len());
        self.pos += n;
        &r[..n]
    }

    /// Skips past `needle`, case-insensitively.
    fn skip_past(&mut self, needle: &str, what: &str) -> Result<(), HtmlError> {
        let lower = self.rest().to_ascii_lowercase();
        match lower.find(needle) {
            Some(i) => {
                self.pos += i + needle.len();
                Ok(())
            }
            None => err(self.pos, format!("unterminated {what}")),
        }
    }

    /// Parses `<tag attrs>` after the `<`; returns the node and whether it
    /// closed itself.
    fn open_tag(&mut self, start: usize) -> Result<(TreeNode, bool), HtmlError> {
        let tag = self.name().to_ascii_lowercase();
        if tag.is_empty() {
            return err(start, "empty tag name");
        }
        let mut node = TreeNode::new(tag);
        loop {
            self.skip_ws();
            let r = self.rest();
            if r.starts_with("/>") {
                self.pos += 2;
                return Ok((node, true));
            }
            if r.starts_with('>') {
                self.pos += 1;
                return Ok((node, false));
            }
            if r.is_empty() {
                return err(start, format!("unterminated <{}>", node.tag));
            }
            let at = self.pos;
            let name = self.name().to_ascii_lowercase();
            if name.is_empty() {
                return err(at, "malformed attribute");
            }
            self.skip_ws();
            let mut value = String::new();
            if self.rest().starts_with('=') {
                self.pos += 1;
                self.skip_ws();
                let r = self.rest();
                let q = r.chars().next();
                if let Some(q @ ('"' | '\'')) = q {
                    let Some(end) = r[1..].find(q) else { return err(self.pos, "unterminated attribute value") };
                    value = decode_entities(&r[1..1 + end]);
                    self.pos += end + 2;
                } else {
                    let n = r.find(|c: char| c.is_whitespace() || c == '>').unwrap_or(r.len());
                    value = decode_entities(&r[..n]);
                    self.pos += n;
                }
            }
            if KEPT_ATTRS.contains(&name.as_str()) {
                node.attributes.insert(name, value);
            }
        }
    }

    fn parse(mut self) -> Result<TreeNode, HtmlError> {
        // stack of (node, byte offset of its open tag)
        let mut stack: Vec<(TreeNode, usize)> = vec![(TreeNode::new("#document"), 0)];
        while !self.rest().is_empty() {
            let r = self.rest();
            let Some(lt) = r.find('<') else {
                push_text(&mut stack.last_mut().expect("document").0, r);
                break;
            };
            if lt > 0 {
                push_text(&mut stack.last_mut().expect("document").0, &r[..lt]);
                self.pos += lt;
                continue;
            }
            let start = self.pos;
            if r.starts_with("<!--") {
                self.skip_past("-->", "comment")?;
            } else if r.starts_with("<!") || r.starts_with("<?") {
                self.skip_past(">", "declaration")?;
            } else if r.starts_with("</") {
                self.pos += 2;
                let tag = self.name().to_ascii_lowercase();
                self.skip_ws();
                if !self.rest().starts_with('>') {
                    return err(start, format!("malformed closing tag </{tag}"));
                }
                self.pos += 1;
                if stack.len() == 1 || stack.last().expect("document").0.tag != tag {
                    let open = stack.last().map(|(n, _)| n.tag.clone()).unwrap_or_default();
                    return err(start, format!("closing </{tag}> does not match open <{open}>"));
                }
                let (node, _) = stack.pop().expect("checked");
                stack.last_mut().expect("document").0.children.push(node);
            } else {
                self.pos += 1;
                let (node, self_closed) = self.open_tag(start)?;
                if node.tag == "script" || node.tag == "style" {
                    if !self_closed {
                        self.skip_past(&format!("</{}", node.tag), "script or style element")?;
                        self.skip_past(">", "closing tag")?;
                    }
                } else if self_closed || VOID.contains(&node.tag.as_str()) {
                    stack.last_mut().expect("document").0.children.push(node);
                } else {
                    stack.push((node, start));
                }
            }
        }
        if stack.len() > 1 {
            let (node, at) = stack.pop().expect("len > 1");
            return err(at, format!("<{}> is never closed", node.tag));
        }
        let (mut doc, _) = stack.pop().expect("document");
        if doc.children.is_empty() {
            return err(0, "no elements");
        }
        if doc.children.len() == 1 && doc.own_text.is_empty() {
            return Ok(doc.children.pop().expect("one child"));
        }
        Ok(doc)
    }
}

/// Parses an HTML document. Several top-level elements are wrapped in a
/// `#document` root.
pub fn parse_html(src: &str) -> Result<TreeNode, HtmlError> {
    Parser { src, pos: 0 }.parse()
}
