//! Text expressions for function specifications.
//!
//! Approximating functions: `pow(v=0.6)`, `pow(v=1,c=0.5)`, `powlog(v=1,a=1)`,
//! `min(f,g)`, `max(f,g)`, `floor(f,e=0.6667)`, `scale(f,k=2)`, `table(path)`.
//! Dimension functions: `pow(s=0.9)`, `powlog(s=0.9,a=1)`, `id`, `table(path)`.
//! Table files are two-column CSV (`q,value` or `r,value`); a non-numeric
//! first line is treated as a header.

use std::path::Path;

use super::{ApproxFn, DimensionFn};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Call { name: String, args: Vec<Arg> },
}

#[derive(Debug, Clone, PartialEq)]
enum Arg {
    Named(String, f64),
    Expr(Node),
    Raw(String),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, reason: impl Into<String>) -> Error {
        Error::Parse { input: self.src.to_string(), reason: reason.into() }
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}` at offset {}", self.pos)))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.err(format!("expected a name at offset {}", self.pos)));
        }
        self.pos += len;
        Ok(rest[..len].to_ascii_lowercase())
    }

    fn node(&mut self) -> Result<Node> {
        let name = self.ident()?;
        let mut args = Vec::new();
        if self.peek() == Some('(') {
            self.expect('(')?;
            if name == "table" {
                let rest = &self.src[self.pos..];
                let close = rest.rfind(')').ok_or_else(|| self.err("unterminated table(...)"))?;
                args.push(Arg::Raw(rest[..close].trim().to_string()));
                self.pos += close;
            } else if self.peek() != Some(')') {
                loop {
                    args.push(self.arg()?);
                    if self.peek() == Some(',') {
                        self.expect(',')?;
                    } else {
                        break;
                    }
                }
            }
            self.expect(')')?;
        }
        Ok(Node::Call { name, args })
    }

    fn arg(&mut self) -> Result<Arg> {
        let save = self.pos;
        let name = self.ident()?;
        if self.peek() == Some('=') {
            self.expect('=')?;
            self.skip_ws();
            let rest = &self.src[self.pos..];
            let len = rest.find([',', ')']).unwrap_or(rest.len());
            let text = rest[..len].trim();
            let value = parse_number(text).ok_or_else(|| self.err(format!("`{text}` is not a number")))?;
            self.pos += len;
            Ok(Arg::Named(name, value))
        } else {
            self.pos = save;
            Ok(Arg::Expr(self.node()?))
        }
    }

    fn finish(mut self) -> Result<Node> {
        let node = self.node()?;
        if self.peek().is_some() {
            return Err(self.err(format!("trailing input at offset {}", self.pos)));
        }
        Ok(node)
    }
}

/// Parses a real number, also accepting `a/b` fractions.
pub fn parse_number(text: &str) -> Option<f64> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once('/') {
        let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return (b != 0.0).then(|| a / b);
    }
    text.parse().ok()
}

fn parse_tree(src: &str) -> Result<Node> {
    Parser { src, pos: 0 }.finish()
}

fn named(args: &[Arg], key: &str) -> Option<f64> {
    args.iter().find_map(|a| match a {
        Arg::Named(k, v) if k == key => Some(*v),
        _ => None,
    })
}

fn exprs(args: &[Arg]) -> Vec<&Node> {
    args.iter()
        .filter_map(|a| match a {
            Arg::Expr(n) => Some(n),
            _ => None,
        })
        .collect()
}

fn check_keys(src: &str, args: &[Arg], allowed: &[&str]) -> Result<()> {
    for a in args {
        if let Arg::Named(k, _) = a {
            if !allowed.contains(&k.as_str()) {
                return Err(Error::Parse { input: src.to_string(), reason: format!("unknown parameter `{k}`") });
            }
        }
    }
    Ok(())
}

fn require(src: &str, v: Option<f64>, key: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Parse { input: src.to_string(), reason: format!("missing parameter `{key}`") })
}

/// Reads two-column numeric CSV rows, skipping blank lines and a header.
pub fn read_two_column_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (a, b) = (cols.next().unwrap_or(""), cols.next().unwrap_or(""));
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(y)) => rows.push((x, y)),
            _ if rows.is_empty() && lineno == 0 => continue,
            _ => {
                return Err(Error::Parse {
                    input: path.display().to_string(),
                    reason: format!("line {} is not two numbers", lineno + 1),
                })
            }
        }
    }
    Ok(rows)
}

fn approx_from(src: &str, node: &Node) -> Result<ApproxFn> {
    let Node::Call { name, args } = node;
    let sub = |i: usize| -> Result<ApproxFn> {
        let e = exprs(args);
        let n = e.get(i).ok_or_else(|| Error::Parse {
            input: src.to_string(),
            reason: format!("`{name}` needs a function argument"),
        })?;
        approx_from(src, n)
    };
    match name.as_str() {
        "pow" => {
            check_keys(src, args, &["v", "c"])?;
            ApproxFn::power_scaled(require(src, named(args, "v"), "v")?, named(args, "c").unwrap_or(1.0))
        }
        "powlog" => {
            check_keys(src, args, &["v", "a", "c"])?;
            ApproxFn::power_log(
                require(src, named(args, "v"), "v")?,
                require(src, named(args, "a"), "a")?,
                named(args, "c").unwrap_or(1.0),
            )
        }
        "min" => Ok(ApproxFn::min_of(&sub(0)?, &sub(1)?)),
        "max" => Ok(ApproxFn::max_of(&sub(0)?, &sub(1)?)),
        "floor" => {
            check_keys(src, args, &["e"])?;
            sub(0)?.floored(require(src, named(args, "e"), "e")?)
        }
        "scale" => {
            check_keys(src, args, &["k"])?;
            sub(0)?.scaled(require(src, named(args, "k"), "k")?)
        }
        "table" => {
            let Some(Arg::Raw(path)) = args.first() else {
                return Err(Error::Parse { input: src.to_string(), reason: "table needs a path".into() });
            };
            let rows = read_two_column_csv(Path::new(path))?;
            let mut int_rows = Vec::with_capacity(rows.len());
            for (q, v) in rows {
                if q < 1.0 || q.fract() != 0.0 {
                    return Err(Error::Parse { input: path.clone(), reason: format!("q = {q} is not a positive integer") });
                }
                int_rows.push((q as u64, v));
            }
            ApproxFn::table_from_rows(&int_rows)
        }
        other => Err(Error::Parse { input: src.to_string(), reason: format!("unknown function `{other}`") }),
    }
}

pub fn parse_approx(src: &str) -> Result<ApproxFn> {
    approx_from(src, &parse_tree(src)?)
}

pub fn parse_dimension(src: &str) -> Result<DimensionFn> {
    let Node::Call { name, args } = parse_tree(src)?;
    match name.as_str() {
        "pow" => {
            check_keys(src, &args, &["s"])?;
            DimensionFn::power(require(src, named(&args, "s"), "s")?)
        }
        "powlog" => {
            check_keys(src, &args, &["s", "a"])?;
            DimensionFn::power_log(require(src, named(&args, "s"), "s")?, require(src, named(&args, "a"), "a")?)
        }
        "id" | "identity" => Ok(DimensionFn::identity()),
        "table" => {
            let Some(Arg::Raw(path)) = args.first() else {
                return Err(Error::Parse { input: src.to_string(), reason: "table needs a path".into() });
            };
            DimensionFn::table(read_two_column_csv(Path::new(path))?)
        }
        other => Err(Error::Parse { input: src.to_string(), reason: format!("unknown dimension function `{other}`") }),
    }
}
