//! Line-oriented netlist grammar.
//!
//! ```text
//! R|L|C <name> <node1> <node2> <value>
//! V|I   <name> <node+> <node-> DC <level>
//! V|I   <name> <node+> <node-> FOURIER <alpha> (<beta> <omega> <gamma>)*
//! OUT   <node+> [<node->]
//! ```
//!
//! `#` starts a comment; kinds and keywords are case-insensitive; the
//! ground node is `0`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use crate::dae::FourierTerm;
use crate::error::{Error, Result};
use crate::num_fmt::format_f64;

pub const GROUND: &str = "0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    Resistor,
    Inductor,
    Capacitor,
    VoltageSource,
    CurrentSource,
}

impl ComponentKind {
    pub fn letter(self) -> char {
        match self {
            ComponentKind::Resistor => 'R',
            ComponentKind::Inductor => 'L',
            ComponentKind::Capacitor => 'C',
            ComponentKind::VoltageSource => 'V',
            ComponentKind::CurrentSource => 'I',
        }
    }

    pub fn is_source(self) -> bool {
        matches!(
            self,
            ComponentKind::VoltageSource | ComponentKind::CurrentSource
        )
    }

    fn from_token(tok: &str) -> Option<Self> {
        match tok.to_ascii_uppercase().as_str() {
            "R" => Some(ComponentKind::Resistor),
            "L" => Some(ComponentKind::Inductor),
            "C" => Some(ComponentKind::Capacitor),
            "V" => Some(ComponentKind::VoltageSource),
            "I" => Some(ComponentKind::CurrentSource),
            _ => None,
        }
    }
}

/// Source signal `α + Σ β sin(ω t + γ)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Waveform {
    Dc(f64),
    Fourier { alpha: f64, terms: Vec<FourierTerm> },
}

impl Waveform {
    pub fn sine(amplitude: f64, omega: f64) -> Self {
        Waveform::Fourier {
            alpha: 0.0,
            terms: vec![FourierTerm::new(amplitude, omega, 0.0)],
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        match self {
            Waveform::Dc(v) => Waveform::Dc(c * v),
            Waveform::Fourier { alpha, terms } => Waveform::Fourier {
                alpha: c * alpha,
                terms: terms
                    .iter()
                    .map(|t| FourierTerm::new(c * t.beta, t.omega, t.gamma))
                    .collect(),
            },
        }
    }

    /// Value at time `t`.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Waveform::Dc(v) => *v,
            Waveform::Fourier { alpha, terms } => {
                alpha
                    + terms
                        .iter()
                        .map(|term| term.beta * (term.omega * t + term.gamma).sin())
                        .sum::<f64>()
            }
        }
    }
}

/// Passive value (ohm, henry, farad) or source waveform.
#[derive(Debug, Clone, PartialEq)]
pub enum ComponentValue {
    Passive(f64),
    Source(Waveform),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub kind: ComponentKind,
    pub name: String,
    pub nodes: (String, String),
    pub value: ComponentValue,
}

impl Component {
    pub fn passive(kind: ComponentKind, name: &str, n1: &str, n2: &str, value: f64) -> Self {
        Component {
            kind,
            name: name.to_string(),
            nodes: (n1.to_string(), n2.to_string()),
            value: ComponentValue::Passive(value),
        }
    }

    pub fn source(kind: ComponentKind, name: &str, np: &str, nn: &str, wave: Waveform) -> Self {
        Component {
            kind,
            name: name.to_string(),
            nodes: (np.to_string(), nn.to_string()),
            value: ComponentValue::Source(wave),
        }
    }

    pub fn waveform(&self) -> Option<&Waveform> {
        match &self.value {
            ComponentValue::Source(w) => Some(w),
            ComponentValue::Passive(_) => None,
        }
    }

    pub fn passive_value(&self) -> Option<f64> {
        match self.value {
            ComponentValue::Passive(v) => Some(v),
            ComponentValue::Source(_) => None,
        }
    }
}

/// A validated circuit with its designated output `v(node⁺) − v(node⁻)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    components: Vec<Component>,
    output: (String, String),
}

impl Netlist {
    pub fn new(components: Vec<Component>, output: (String, String)) -> Result<Self> {
        let net = Netlist { components, output };
        net.validate()?;
        Ok(net)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn output(&self) -> (&str, &str) {
        (&self.output.0, &self.output.1)
    }

    pub fn sources(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| c.kind.is_source())
    }

    pub fn source_waveforms(&self) -> BTreeMap<&str, &Waveform> {
        self.components
            .iter()
            .filter_map(|c| c.waveform().map(|w| (c.name.as_str(), w)))
            .collect()
    }

    /// Non-ground nodes in order of first appearance.
    pub fn nodes(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for c in &self.components {
            for n in [&c.nodes.0, &c.nodes.1] {
                if n != GROUND && seen.insert(n.as_str()) {
                    out.push(n.as_str());
                }
            }
        }
        out
    }

    /// Copy with the named source's waveform replaced.
    pub fn with_waveform(&self, source: &str, wave: Waveform) -> Result<Netlist> {
        let mut out = self.clone();
        let comp = out
            .components
            .iter_mut()
            .find(|c| c.name == source && c.kind.is_source())
            .ok_or_else(|| Error::Validation(format!("no source named {source}")))?;
        comp.value = ComponentValue::Source(wave);
        Ok(out)
    }

    /// Copy with every source amplitude multiplied by `c`.
    pub fn with_scaled_sources(&self, c: f64) -> Netlist {
        let mut out = self.clone();
        for comp in &mut out.components {
            if let ComponentValue::Source(w) = &comp.value {
                comp.value = ComponentValue::Source(w.scaled(c));
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::Validation("netlist has no components".into()));
        }
        let mut names = HashSet::new();
        for c in &self.components {
            if !names.insert(c.name.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate component name {}",
                    c.name
                )));
            }
            if c.nodes.0 == c.nodes.1 {
                return Err(Error::Validation(format!(
                    "{} connects node {} to itself",
                    c.name, c.nodes.0
                )));
            }
            match (&c.value, c.kind.is_source()) {
                (ComponentValue::Passive(v), false) => {
                    if !(*v > 0.0 && v.is_finite()) {
                        return Err(Error::Validation(format!(
                            "{} must have a positive value, got {v}",
                            c.name
                        )));
                    }
                }
                (ComponentValue::Source(w), true) => validate_waveform(&c.name, w)?,
                _ => {
                    return Err(Error::Validation(format!(
                        "{} has a value of the wrong kind",
                        c.name
                    )))
                }
            }
        }

        let mut adjacency: HashMap<&str, Vec<&str>> = HashMap::new();
        for c in &self.components {
            adjacency.entry(&c.nodes.0).or_default().push(&c.nodes.1);
            adjacency.entry(&c.nodes.1).or_default().push(&c.nodes.0);
        }
        if !adjacency.contains_key(GROUND) {
            return Err(Error::Validation(
                "no component touches ground node 0".into(),
            ));
        }
        let mut reached = HashSet::from([GROUND]);
        let mut stack = vec![GROUND];
        while let Some(n) = stack.pop() {
            for &m in &adjacency[n] {
                if reached.insert(m) {
                    stack.push(m);
                }
            }
        }
        if let Some(n) = self.nodes().into_iter().find(|n| !reached.contains(n)) {
            return Err(Error::Validation(format!(
                "node {n} is not connected to ground"
            )));
        }

        let (p, n) = (&self.output.0, &self.output.1);
        for node in [p, n] {
            if node != GROUND && !adjacency.contains_key(node.as_str()) {
                return Err(Error::Validation(format!(
                    "output node {node} does not exist"
                )));
            }
        }
        if p == n {
            return Err(Error::Validation("output nodes must differ".into()));
        }
        Ok(())
    }

    /// Text form accepted by [`parse_netlist`].
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for c in &self.components {
            let _ = write!(
                out,
                "{} {} {} {}",
                c.kind.letter(),
                c.name,
                c.nodes.0,
                c.nodes.1
            );
            match &c.value {
                ComponentValue::Passive(v) => {
                    let _ = write!(out, " {}", format_f64(*v));
                }
                ComponentValue::Source(Waveform::Dc(v)) => {
                    let _ = write!(out, " DC {}", format_f64(*v));
                }
                ComponentValue::Source(Waveform::Fourier { alpha, terms }) => {
                    let _ = write!(out, " FOURIER {}", format_f64(*alpha));
                    for t in terms {
                        let _ = write!(
                            out,
                            " {} {} {}",
                            format_f64(t.beta),
                            format_f64(t.omega),
                            format_f64(t.gamma)
                        );
                    }
                }
            }
            out.push('\n');
        }
        if self.output.1 == GROUND {
            let _ = writeln!(out, "OUT {}", self.output.0);
        } else {
            let _ = writeln!(out, "OUT {} {}", self.output.0, self.output.1);
        }
        out
    }
}

fn validate_waveform(name: &str, w: &Waveform) -> Result<()> {
    match w {
        Waveform::Dc(v) if !v.is_finite() => {
            Err(Error::Validation(format!("{name}: non-finite DC level")))
        }
        Waveform::Dc(_) => Ok(()),
        Waveform::Fourier { alpha, terms } => {
            if !alpha.is_finite() {
                return Err(Error::Validation(format!("{name}: non-finite offset")));
            }
            for t in terms {
                if !(t.omega > 0.0 && t.omega.is_finite()) {
                    return Err(Error::Validation(format!(
                        "{name}: Fourier frequency must be positive, got {}",
                        t.omega
                    )));
                }
                if !(t.beta.is_finite() && t.gamma.is_finite()) {
                    return Err(Error::Validation(format!(
                        "{name}: non-finite Fourier term"
                    )));
                }
            }
            Ok(())
        }
    }
}

fn parse_number(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            line,
            message: format!("expected a number, found `{tok}`"),
        })
}

fn is_identifier(tok: &str) -> bool {
    !tok.is_empty() && tok.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_netlist(text: &str) -> Result<Netlist> {
    let mut components = Vec::new();
    let mut output: Option<(String, String)> = None;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };
        let err = |message: String| Error::Parse { line, message };

        if head.eq_ignore_ascii_case("OUT") {
            if output.is_some() {
                return Err(err("duplicate OUT directive".into()));
            }
            let (p, n) = match toks.len() {
                2 => (toks[1], GROUND),
                3 => (toks[1], toks[2]),
                _ => return Err(err("OUT takes one or two nodes".into())),
            };
            for node in [p, n] {
                if !is_identifier(node) {
                    return Err(err(format!("invalid node `{node}`")));
                }
            }
            output = Some((p.to_string(), n.to_string()));
            continue;
        }

        let kind = ComponentKind::from_token(head)
            .ok_or_else(|| err(format!("unknown directive `{head}`")))?;
        if toks.len() < 4 {
            return Err(err(format!("{head} needs a name and two nodes")));
        }
        let (name, n1, n2) = (toks[1], toks[2], toks[3]);
        for tok in [name, n1, n2] {
            if !is_identifier(tok) {
                return Err(err(format!("invalid identifier `{tok}`")));
            }
        }
        let rest = &toks[4..];
        let value = if kind.is_source() {
            let Some(&keyword) = rest.first() else {
                return Err(err(format!("{name}: missing DC or FOURIER")));
            };
            let args = rest[1..]
                .iter()
                .map(|t| parse_number(t, line))
                .collect::<Result<Vec<f64>>>()?;
            if keyword.eq_ignore_ascii_case("DC") {
                if args.len() != 1 {
                    return Err(err(format!("{name}: DC takes exactly one level")));
                }
                ComponentValue::Source(Waveform::Dc(args[0]))
            } else if keyword.eq_ignore_ascii_case("FOURIER") {
                if args.is_empty() || (args.len() - 1) % 3 != 0 {
                    return Err(err(format!(
                        "{name}: FOURIER takes an offset then (beta omega gamma) triples"
                    )));
                }
                let terms = args[1..]
                    .chunks(3)
                    .map(|c| FourierTerm::new(c[0], c[1], c[2]))
                    .collect();
                ComponentValue::Source(Waveform::Fourier {
                    alpha: args[0],
                    terms,
                })
            } else {
                return Err(err(format!("{name}: unknown waveform `{keyword}`")));
            }
        } else {
            if rest.len() != 1 {
                return Err(err(format!("{name}: expected exactly one value")));
            }
            ComponentValue::Passive(parse_number(rest[0], line)?)
        };
        components.push(Component {
            kind,
            name: name.to_string(),
            nodes: (n1.to_string(), n2.to_string()),
            value,
        });
    }

    if components.is_empty() {
        return Err(Error::Parse {
            line: last_line.max(1),
            message: "netlist has no components".into(),
        });
    }
    let output = output.ok_or_else(|| Error::Validation("missing OUT directive".into()))?;
    Netlist::new(components, output)
}
