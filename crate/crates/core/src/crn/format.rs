//! Text form of a [`Crn`].
//!
//! ```text
//! # chemical reaction network
//! species vin_p vin_m i_p i_m
//! # reactions: circuit
//! vin_p ->{0.99009900990099009} vin_p + i_p
//! i_p + i_m ->{100} 0
//! init vin_p 1
//! # diff i i_p i_m
//! ```
//!
//! Lines starting with `#` are comments except for the `# reactions:` and
//! `# diff` annotations.

use std::fmt::Write as _;

use super::{Crn, Reaction};
use crate::error::{Error, Result};
use crate::num_fmt::format_f64;

const HEADER: &str = "# chemical reaction network";
const SECTION: &str = "# reactions:";
const DIFF: &str = "# diff";

fn side(names: &[String]) -> String {
    if names.is_empty() {
        "0".to_string()
    } else {
        names.join(" + ")
    }
}

pub fn format_reaction(r: &Reaction) -> String {
    format!(
        "{} ->{{{}}} {}",
        side(&r.reactants),
        format_f64(r.rate),
        side(&r.products)
    )
}

pub fn serialize_crn(net: &Crn) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    if !net.species.is_empty() {
        let _ = writeln!(out, "species {}", net.species.join(" "));
    }
    let mut sections = net.sections.iter().peekable();
    for (k, r) in net.reactions.iter().enumerate() {
        while let Some((_, label)) = sections.next_if(|(start, _)| *start == k) {
            let _ = writeln!(out, "{SECTION} {label}");
        }
        out.push_str(&format_reaction(r));
        out.push('\n');
    }
    for (_, label) in sections {
        let _ = writeln!(out, "{SECTION} {label}");
    }
    for s in &net.species {
        if let Some(v) = net.init.get(s) {
            let _ = writeln!(out, "init {s} {}", format_f64(*v));
        }
    }
    for (o, p, m) in &net.diffs {
        let _ = writeln!(out, "{DIFF} {o} {p} {m}");
    }
    out
}

fn parse_side(text: &str, line: usize) -> Result<Vec<String>> {
    let text = text.trim();
    if text == "0" {
        return Ok(Vec::new());
    }
    text.split('+')
        .map(|s| {
            let s = s.trim();
            if s.is_empty() || s.contains(char::is_whitespace) || s == "0" {
                Err(Error::Parse {
                    line,
                    message: format!("malformed species list `{text}`"),
                })
            } else {
                Ok(s.to_string())
            }
        })
        .collect()
}

pub fn parse_crn(text: &str) -> Result<Crn> {
    let mut net = Crn::empty();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        let err = |message: String| Error::Parse { line, message };
        if body.is_empty() {
            continue;
        }
        if let Some(label) = body.strip_prefix(SECTION) {
            net.sections
                .push((net.reactions.len(), label.trim().to_string()));
            continue;
        }
        if let Some(rest) = body.strip_prefix(DIFF) {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() != 3 || !rest.starts_with(char::is_whitespace) {
                return Err(err("`# diff` takes <out> <plus> <minus>".into()));
            }
            net.diffs
                .push((toks[0].into(), toks[1].into(), toks[2].into()));
            continue;
        }
        if body.starts_with('#') {
            continue;
        }
        let mut toks = body.split_whitespace();
        match toks.next() {
            Some("species") => {
                net.species.extend(toks.map(str::to_string));
                continue;
            }
            Some("init") => {
                let rest: Vec<&str> = toks.collect();
                if rest.len() != 2 {
                    return Err(err("`init` takes <species> <value>".into()));
                }
                let v: f64 = rest[1]
                    .parse()
                    .map_err(|_| err(format!("bad initial value `{}`", rest[1])))?;
                if net.init.insert(rest[0].to_string(), v).is_some() {
                    return Err(err(format!("duplicate init for {}", rest[0])));
                }
                continue;
            }
            _ => {}
        }
        let (lhs, rest) = body
            .split_once("->{")
            .ok_or_else(|| err(format!("expected a reaction, found `{body}`")))?;
        let (rate, rhs) = rest
            .split_once('}')
            .ok_or_else(|| err("unterminated rate".into()))?;
        let rate: f64 = rate
            .trim()
            .parse()
            .map_err(|_| err(format!("bad rate `{rate}`")))?;
        net.reactions.push(Reaction {
            reactants: parse_side(lhs, line)?,
            products: parse_side(rhs, line)?,
            rate,
        });
    }
    net.validate()?;
    Ok(net)
}

/// Serialized reaction lines of the block labelled `label`, exactly as they
/// appear in `text`.
pub fn section_block(text: &str, label: &str) -> Option<String> {
    let marker = format!("{SECTION} {label}");
    let mut lines = text.lines().skip_while(|l| *l != marker);
    lines.next()?;
    let mut out = String::new();
    for l in lines {
        if l.starts_with(SECTION) || l.starts_with("init ") || l.starts_with(DIFF) {
            break;
        }
        out.push_str(l);
        out.push('\n');
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn single_reaction_line() {
        let net = Crn {
            species: vec!["vin_p".into(), "i_p".into()],
            reactions: vec![Reaction::new(["vin_p"], ["vin_p", "i_p"], 1.0 / 1.01)],
            init: BTreeMap::from([("vin_p".into(), 1.0)]),
            ..Crn::default()
        };
        let text = serialize_crn(&net);
        assert!(text.contains("vin_p ->{0.99009900990099009} vin_p + i_p\n"));
        assert!(text.contains("init vin_p 1\n"));
        assert_eq!(parse_crn(&text).unwrap(), net);
    }

    #[test]
    fn empty_net_is_header_only() {
        let text = serialize_crn(&Crn::empty());
        assert_eq!(text, format!("{HEADER}\n"));
        assert_eq!(parse_crn(&text).unwrap(), Crn::empty());
    }

    #[test]
    fn annihilation_line() {
        let r = Reaction::new(["i_p", "i_m"], [], 100.0);
        assert_eq!(format_reaction(&r), "i_p + i_m ->{100} 0");
    }

    #[test]
    fn sections_and_diffs_round_trip() {
        let net = Crn {
            species: vec!["a".into(), "b".into(), "c".into()],
            reactions: vec![
                Reaction::new(["a"], ["a", "b"], 0.5),
                Reaction::new([], ["c"], 2.0),
                Reaction::new(["a", "b"], [], 3.0),
            ],
            init: BTreeMap::from([("a".into(), 1.0), ("c".into(), 0.25)]),
            diffs: vec![("x".into(), "a".into(), "b".into())],
            sections: vec![(0, "circuit".into()), (2, "input".into())],
        };
        let text = serialize_crn(&net);
        assert_eq!(parse_crn(&text).unwrap(), net);
        assert_eq!(
            section_block(&text, "circuit").unwrap(),
            "a ->{0.5} a + b\n0 ->{2} c\n"
        );
        assert_eq!(section_block(&text, "input").unwrap(), "a + b ->{3} 0\n");
        assert!(section_block(&text, "missing").is_none());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("species a\na ->{x} a\n", 2),
            ("species a\na -> a\n", 2),
            ("species a\n# diff a\n", 2),
            ("species a\ninit a\n", 2),
            ("species a b\na + ->{1} b\n", 2),
        ];
        for (text, line) in cases {
            match parse_crn(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(matches!(
            parse_crn("species a\nb ->{1} a\n"),
            Err(Error::UnknownSpecies(_))
        ));
        assert!(matches!(
            parse_crn("species a\ninit a -1\n"),
            Err(Error::NegativeInit { .. })
        ));
    }
}
