//! Text syntax for groups, elements and step distributions.

use serde_json::Value;

use super::{ContinuousFamily, GroupElement, GroupError, GroupSpec, Lamps, Perm3, StepDistribution};

fn parse_err(what: &'static str, text: &str, reason: impl Into<String>) -> GroupError {
    GroupError::Parse { what, text: text.to_string(), reason: reason.into() }
}

pub(super) fn parse_group(text: &str) -> Result<GroupSpec, GroupError> {
    let t = text.trim().to_ascii_lowercase();
    let (head, rest) = match t.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (t.as_str(), None),
    };
    let num = |r: Option<&str>| -> Result<usize, GroupError> {
        r.ok_or_else(|| parse_err("group", text, "missing parameter"))?
            .trim()
            .parse::<usize>()
            .map_err(|e| parse_err("group", text, e.to_string()))
    };
    let spec = match head {
        "z2" => GroupSpec::Z2,
        "cycle" | "zl" => GroupSpec::cycle(num(rest)? as u32)?,
        "zd" | "lattice" => GroupSpec::Lattice(num(rest)?),
        "rd" | "euclidean" => GroupSpec::Euclidean(num(rest)?),
        "tree" => GroupSpec::regular_tree(num(rest)?)?,
        "free" => GroupSpec::free_group(num(rest)?)?,
        "freeprod" => {
            let r = rest.ok_or_else(|| parse_err("group", text, "expected freeprod:k:m"))?;
            let (k, m) = r.split_once(':').ok_or_else(|| parse_err("group", text, "expected freeprod:k:m"))?;
            let k = k.trim().parse().map_err(|_| parse_err("group", text, "bad free rank"))?;
            let m = m.trim().parse().map_err(|_| parse_err("group", text, "bad involution count"))?;
            GroupSpec::FreeProduct { free: k, involutions: m }
        }
        "lamplighter" => GroupSpec::Lamplighter,
        "s3xz" => GroupSpec::S3xZ,
        _ => return Err(parse_err("group", text, "unknown group")),
    };
    spec.validate()?;
    Ok(spec)
}

fn strip_parens(t: &str) -> Option<&str> {
    let t = t.trim();
    t.strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .or_else(|| t.strip_prefix('[').and_then(|s| s.strip_suffix(']')))
}

/// Splits at the first top-level comma.
fn split_top_comma(t: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in t.char_indices() {
        match c {
            '(' | '{' | '[' => depth += 1,
            ')' | '}' | ']' => depth -= 1,
            ',' if depth == 0 => return Some((&t[..i], &t[i + 1..])),
            _ => {}
        }
    }
    None
}

fn parse_vector<T: std::str::FromStr>(spec: &GroupSpec, text: &str, d: usize) -> Result<Vec<T>, GroupError> {
    let t = text.trim();
    if t == "e" {
        return Err(parse_err("element", text, "identity handled by caller"));
    }
    let inner = strip_parens(t).unwrap_or(t);
    let parts: Vec<&str> = inner.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if parts.len() != d {
        return Err(GroupError::DimensionMismatch { expected: d, found: parts.len() });
    }
    parts
        .iter()
        .map(|p| p.parse::<T>().map_err(|_| parse_err("element", text, format!("bad coordinate {p:?} for {spec}"))))
        .collect()
}

fn parse_word(spec: &GroupSpec, text: &str) -> Result<GroupElement, GroupError> {
    let (free, involutions) = match spec {
        GroupSpec::FreeProduct { free, involutions } => (*free, *involutions),
        _ => unreachable!(),
    };
    let letter_of = |c: char| -> Option<usize> {
        let i = if c.is_ascii_lowercase() {
            (c as u8 - b'a') as usize
        } else if c.is_ascii_uppercase() {
            26 + (c as u8 - b'A') as usize
        } else {
            return None;
        };
        (i < free + involutions).then_some(i)
    };
    let t = text.trim();
    let mut out = spec.identity();
    if t == "e" || t.is_empty() {
        return Ok(out);
    }
    let chars: Vec<char> = t.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == '*' || c == '.' || c == '·' {
            i += 1;
            continue;
        }
        let base = letter_of(c).ok_or_else(|| parse_err("element", text, format!("unknown generator {c:?}")))?;
        i += 1;
        let mut inverted = false;
        let rest: String = chars[i..].iter().collect();
        for suffix in ["^-1", "⁻¹", "'"] {
            if rest.starts_with(suffix) {
                inverted = true;
                i += suffix.chars().count();
                break;
            }
        }
        let letter = if base < free {
            2 * base + inverted as usize
        } else {
            2 * free + (base - free)
        };
        spec.mul_right(&mut out, &GroupElement::Word(vec![letter as u8]));
    }
    Ok(out)
}

fn parse_lamp(text: &str) -> Result<GroupElement, GroupError> {
    let t = text.trim();
    if t == "e" {
        return Ok(GroupElement::Lamp(Lamps::default()));
    }
    let inner = strip_parens(t).ok_or_else(|| parse_err("element", text, "expected ({lamps},marker)"))?;
    let (set, marker) = split_top_comma(inner).ok_or_else(|| parse_err("element", text, "expected ({lamps},marker)"))?;
    let set = set.trim();
    let set_inner = set
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| parse_err("element", text, "lamp set must be written {..}"))?;
    let mut lamps = Lamps::default();
    for p in set_inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let pos: i64 = p.parse().map_err(|_| parse_err("element", text, format!("bad lamp position {p:?}")))?;
        lamps.toggle(pos);
    }
    lamps.marker = marker.trim().parse().map_err(|_| parse_err("element", text, "bad marker"))?;
    Ok(GroupElement::Lamp(lamps))
}

fn parse_s3z(text: &str) -> Result<GroupElement, GroupError> {
    let t = text.trim();
    if t == "e" {
        return Ok(GroupElement::S3Z(Perm3::IDENTITY, 0));
    }
    let inner = strip_parens(t).ok_or_else(|| parse_err("element", text, "expected (perm,integer)"))?;
    let (perm, z) = split_top_comma(inner).ok_or_else(|| parse_err("element", text, "expected (perm,integer)"))?;
    let perm = Perm3::parse(perm).ok_or_else(|| parse_err("element", text, format!("bad permutation {perm:?}")))?;
    let z = z.trim().parse().map_err(|_| parse_err("element", text, "bad integer part"))?;
    Ok(GroupElement::S3Z(perm, z))
}

pub(super) fn parse_element(spec: &GroupSpec, text: &str) -> Result<GroupElement, GroupError> {
    let t = text.trim();
    let element = match spec {
        GroupSpec::Z2 | GroupSpec::Cycle(_) if t == "e" => spec.identity(),
        GroupSpec::Z2 => {
            let v: i64 = t.parse().map_err(|_| parse_err("element", text, "expected an integer"))?;
            GroupElement::Z2(v.rem_euclid(2) as u8)
        }
        GroupSpec::Cycle(l) => {
            let v: i64 = t.parse().map_err(|_| parse_err("element", text, "expected an integer"))?;
            GroupElement::Cycle(v.rem_euclid(*l as i64) as u32)
        }
        GroupSpec::Lattice(_) | GroupSpec::Euclidean(_) if t == "e" => spec.identity(),
        GroupSpec::Lattice(d) => GroupElement::Lattice(parse_vector(spec, t, *d)?),
        GroupSpec::Euclidean(d) => GroupElement::Real(parse_vector(spec, t, *d)?),
        GroupSpec::FreeProduct { .. } => parse_word(spec, t)?,
        GroupSpec::Lamplighter => parse_lamp(t)?,
        GroupSpec::S3xZ => parse_s3z(t)?,
    };
    spec.check(&element)?;
    Ok(element)
}

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub(super) fn format_element(spec: &GroupSpec, a: &GroupElement) -> String {
    match a {
        GroupElement::Word(w) if w.is_empty() => "e".to_string(),
        GroupElement::Word(w) => w.iter().map(|&l| spec.letter_name(l)).collect::<Vec<_>>().join(" "),
        other => format_untyped(other),
    }
}

/// Formatting that needs no group context; words print as letter indices.
pub(super) fn format_untyped(a: &GroupElement) -> String {
    match a {
        GroupElement::Z2(x) => x.to_string(),
        GroupElement::Cycle(x) => x.to_string(),
        GroupElement::Lattice(v) => format!("({})", join(v)),
        GroupElement::Real(v) => format!("({})", join(v)),
        GroupElement::Word(w) => format!("w[{}]", join(w)),
        GroupElement::Lamp(l) => format!("({{{}}},{})", join(&l.lit), l.marker),
        GroupElement::S3Z(p, z) => format!("({p},{z})"),
    }
}

fn element_from_json(spec: &GroupSpec, v: &Value, literal: &str) -> Result<GroupElement, GroupError> {
    match v {
        Value::String(s) => parse_element(spec, s),
        Value::Number(n) => parse_element(spec, &n.to_string()),
        Value::Array(items) => {
            let text = items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
            parse_element(spec, &format!("({text})"))
        }
        _ => Err(parse_err("mu", literal, format!("cannot read an element from {v}"))),
    }
}

/// Parses a step-distribution literal.
///
/// Either a keyword (`uniform`, `lazy`, `lazy:q`, and on `R^d` also
/// `gaussian`, `sphere`, `axes`) or a JSON list of `[element, weight]`
/// pairs, e.g. `[["a",0.5],["a^-1",0.5]]`. Elements are strings in the
/// group's element syntax; numbers and coordinate arrays are also accepted.
pub fn parse_mu(spec: &GroupSpec, literal: &str) -> Result<StepDistribution, GroupError> {
    let t = literal.trim();
    let keyword = t.to_ascii_lowercase();
    match keyword.as_str() {
        "uniform" => return StepDistribution::uniform(spec),
        "lazy" => return StepDistribution::lazy(spec, 0.5),
        "gaussian" => return StepDistribution::continuous(spec, ContinuousFamily::Gaussian),
        "sphere" => return StepDistribution::continuous(spec, ContinuousFamily::Sphere),
        "axes" => return StepDistribution::continuous(spec, ContinuousFamily::Axes),
        _ => {}
    }
    if let Some(q) = keyword.strip_prefix("lazy:") {
        let q: f64 = q.trim().parse().map_err(|_| parse_err("mu", literal, "bad lazy mass"))?;
        return StepDistribution::lazy(spec, q);
    }
    let value: Value = serde_json::from_str(t).map_err(|e| parse_err("mu", literal, e.to_string()))?;
    let pairs = value.as_array().ok_or_else(|| parse_err("mu", literal, "expected a list of [element, weight]"))?;
    let mut atoms = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let pair = pair
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| parse_err("mu", literal, format!("entry {pair} is not [element, weight]")))?;
        let x = element_from_json(spec, &pair[0], literal)?;
        let w = pair[1].as_f64().ok_or_else(|| parse_err("mu", literal, format!("weight {} is not a number", pair[1])))?;
        atoms.push((x, w));
    }
    StepDistribution::discrete(spec, atoms)
}
