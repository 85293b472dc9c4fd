//! Group files and element expressions.
//!
//! ```text
//! p = 2
//! a = s          # root permutation only
//! b = (a, c)     # sections only
//! c = (a, d); d = (1, b)
//! ```

use super::{Element, Group, Letter};
use crate::error::{Error, Result};
use crate::fp::is_prime;

struct Definition {
    line: usize,
    name: String,
    perm: Option<Vec<u8>>,
    sections: Option<Vec<String>>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn is_ident(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses a group file into a [`Group`].
pub fn parse_group(text: &str) -> Result<Group> {
    let mut d: Option<usize> = None;
    let mut field = false;
    let mut pending: Vec<(usize, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        for stmt in content.split(';') {
            let stmt = stmt.trim();
            if stmt.is_empty() {
                continue;
            }
            if stmt == "field" {
                field = true;
                continue;
            }
            let (lhs, rhs) = stmt
                .split_once('=')
                .ok_or_else(|| parse_err(line, format!("expected `name = ...`, got `{stmt}`")))?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            if lhs == "p" {
                if d.is_some() {
                    return Err(parse_err(line, "alphabet size declared twice"));
                }
                let v: usize = rhs
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad alphabet size `{rhs}`")))?;
                if !(2..=255).contains(&v) {
                    return Err(parse_err(line, "alphabet size must be in 2..=255"));
                }
                d = Some(v);
            } else {
                pending.push((line, stmt.to_string()));
            }
        }
    }
    let d = d.ok_or_else(|| parse_err(1, "missing `p = <int>` declaration"))?;
    if field && !is_prime(d as u64) {
        return Err(Error::NotPrime(d as u64));
    }
    let mut defs = Vec::new();
    for (line, stmt) in pending {
        defs.push(parse_definition(line, &stmt, d)?);
    }
    let names: Vec<String> = defs.iter().map(|def| def.name.clone()).collect();
    for (i, def) in defs.iter().enumerate() {
        if names[..i].contains(&def.name) {
            return Err(parse_err(def.line, format!("`{}` defined twice", def.name)));
        }
    }
    let mut perms = Vec::new();
    let mut sections = Vec::new();
    for def in &defs {
        perms.push(def.perm.clone().unwrap_or_else(|| (0..d as u8).collect()));
        let words = match &def.sections {
            None => vec![Vec::new(); d],
            Some(ws) => ws
                .iter()
                .map(|w| parse_word(w, &names).map_err(|e| relabel(e, def.line)))
                .collect::<Result<Vec<_>>>()?,
        };
        sections.push(words);
    }
    Group::new(d, names, perms, sections)
}

fn relabel(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { msg, .. } => Error::Parse { line, msg },
        other => other,
    }
}

fn parse_definition(line: usize, stmt: &str, d: usize) -> Result<Definition> {
    let (lhs, rhs) = stmt.split_once('=').expect("checked by caller");
    let name = lhs.trim().to_string();
    if !is_ident(&name) || name == "s" {
        return Err(parse_err(line, format!("invalid generator name `{name}`")));
    }
    let mut rest = rhs.trim();
    let mut perm = None;
    if let Some(after) = rest.strip_prefix('[') {
        let (inside, tail) = after
            .split_once(']')
            .ok_or_else(|| parse_err(line, "unterminated permutation"))?;
        let images: Vec<u8> = inside
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u8>().map_err(|_| parse_err(line, format!("bad image `{t}`"))))
            .collect::<Result<_>>()?;
        perm = Some(images);
        rest = tail.trim();
    } else if let Some(after) = rest.strip_prefix('s') {
        let after = after.trim_start();
        let (k, tail) = if let Some(exp) = after.strip_prefix('^') {
            let exp = exp.trim_start();
            let end = exp.find(|c: char| !c.is_ascii_digit()).unwrap_or(exp.len());
            let k: usize = exp[..end]
                .parse()
                .map_err(|_| parse_err(line, "bad exponent after `s^`"))?;
            (k, &exp[end..])
        } else {
            (1, after)
        };
        perm = Some((0..d).map(|x| ((x + k) % d) as u8).collect());
        rest = tail.trim();
    }
    if let Some(images) = &perm {
        let mut seen = vec![false; d];
        if images.len() != d || images.iter().any(|&y| (y as usize) >= d) {
            return Err(parse_err(line, "root action is not a permutation"));
        }
        for &y in images {
            if std::mem::replace(&mut seen[y as usize], true) {
                return Err(parse_err(line, "root action is not a permutation"));
            }
        }
    }
    let sections = if rest.is_empty() {
        None
    } else {
        let inside = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| parse_err(line, format!("expected `( w0, .. )`, got `{rest}`")))?;
        let parts: Vec<String> = inside.split(',').map(|w| w.trim().to_string()).collect();
        if parts.len() != d {
            return Err(parse_err(
                line,
                format!("expected {d} sections, got {}", parts.len()),
            ));
        }
        Some(parts)
    };
    if perm.is_none() && sections.is_none() {
        return Err(parse_err(line, format!("empty definition of `{name}`")));
    }
    Ok(Definition {
        line,
        name,
        perm,
        sections,
    })
}

/// Parses an element expression over the given generator names.
///
/// Names are juxtaposed (longest match first), `'` inverts the preceding
/// factor, `^k` raises it to a power, parentheses group and `1` is the identity.
pub fn parse_word(text: &str, names: &[String]) -> Result<Vec<Letter>> {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
    let mut pos = 0;
    let word = parse_product(&chars, &mut pos, names)?;
    if pos != chars.len() {
        return Err(parse_err(0, format!("unexpected `{}` in `{text}`", chars[pos])));
    }
    Ok(Element::from_letters(word).into_letters())
}

fn parse_product(chars: &[char], pos: &mut usize, names: &[String]) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    while *pos < chars.len() && chars[*pos] != ')' {
        let mut factor = parse_atom(chars, pos, names)?;
        loop {
            match chars.get(*pos) {
                Some('\'') => {
                    *pos += 1;
                    factor = Element::from_letters(factor).inverse().into_letters();
                }
                Some('^') => {
                    *pos += 1;
                    let start = *pos;
                    while *pos < chars.len() && chars[*pos].is_ascii_digit() {
                        *pos += 1;
                    }
                    let k: usize = chars[start..*pos]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| parse_err(0, "expected an exponent after `^`"))?;
                    factor = factor.repeat(k);
                }
                _ => break,
            }
        }
        out.extend(factor);
    }
    Ok(out)
}

fn parse_atom(chars: &[char], pos: &mut usize, names: &[String]) -> Result<Vec<Letter>> {
    match chars[*pos] {
        '(' => {
            *pos += 1;
            let inner = parse_product(chars, pos, names)?;
            if chars.get(*pos) != Some(&')') {
                return Err(parse_err(0, "unbalanced parentheses"));
            }
            *pos += 1;
            Ok(inner)
        }
        '1' => {
            *pos += 1;
            Ok(Vec::new())
        }
        c if c.is_ascii_alphabetic() || c == '_' => {
            let rest: String = chars[*pos..].iter().collect();
            let best = names
                .iter()
                .enumerate()
                .filter(|(_, n)| rest.starts_with(n.as_str()))
                .max_by_key(|(_, n)| n.len());
            match best {
                Some((gen, n)) => {
                    *pos += n.chars().count();
                    Ok(vec![Letter {
                        gen: gen as u32,
                        inv: false,
                    }])
                }
                None => {
                    let end = rest
                        .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                        .unwrap_or(rest.len());
                    Err(Error::UndefinedName(rest[..end].to_string()))
                }
            }
        }
        c => Err(parse_err(0, format!("unexpected character `{c}`"))),
    }
}
