//! Mass-action chemical reaction networks.

mod format;

pub use format::{parse_crn, section_block, serialize_crn};

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::positivation::HungarizedSystem;

/// `reactants ->{rate} products` under mass action.
#[derive(Debug, Clone, PartialEq)]
pub struct Reaction {
    pub reactants: Vec<String>,
    pub products: Vec<String>,
    pub rate: f64,
}

impl Reaction {
    pub fn new<S: Into<String>>(
        reactants: impl IntoIterator<Item = S>,
        products: impl IntoIterator<Item = S>,
        rate: f64,
    ) -> Self {
        Reaction {
            reactants: reactants.into_iter().map(Into::into).collect(),
            products: products.into_iter().map(Into::into).collect(),
            rate,
        }
    }

    /// Same reaction with reactants and products sorted, for multiset
    /// comparisons.
    pub fn canonical(&self) -> Reaction {
        let mut r = self.clone();
        r.reactants.sort();
        r.products.sort();
        r
    }
}

/// Species, reactions, initial concentrations and rail-pair annotations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Crn {
    pub species: Vec<String>,
    pub reactions: Vec<Reaction>,
    pub init: BTreeMap<String, f64>,
    /// `(out, plus, minus)`: `out = plus − minus` is a recovered signal.
    pub diffs: Vec<(String, String, String)>,
    /// `(first reaction index, label)` for labelled reaction blocks.
    pub sections: Vec<(usize, String)>,
}

impl Crn {
    pub fn empty() -> Self {
        Crn::default()
    }

    /// Checks that every referenced species is declared and that rates and
    /// initial values are admissible.
    pub fn validate(&self) -> Result<()> {
        let known: HashSet<&str> = self.species.iter().map(String::as_str).collect();
        if known.len() != self.species.len() {
            return Err(Error::Validation("duplicate species".into()));
        }
        for r in &self.reactions {
            if !(r.rate > 0.0 && r.rate.is_finite()) {
                return Err(Error::Validation(format!(
                    "reaction rate must be positive, got {}",
                    r.rate
                )));
            }
            if let Some(s) = r
                .reactants
                .iter()
                .chain(&r.products)
                .find(|s| !known.contains(s.as_str()))
            {
                return Err(Error::UnknownSpecies(s.clone()));
            }
        }
        for (s, &v) in &self.init {
            if !known.contains(s.as_str()) {
                return Err(Error::UnknownSpecies(s.clone()));
            }
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::NegativeInit {
                    species: s.clone(),
                    value: v,
                });
            }
        }
        for (_, p, m) in &self.diffs {
            for s in [p, m] {
                if !known.contains(s.as_str()) {
                    return Err(Error::UnknownSpecies(s.clone()));
                }
            }
        }
        Ok(())
    }

    /// Initial concentrations in species order (missing entries are 0).
    pub fn initial_state(&self) -> Vec<f64> {
        self.species
            .iter()
            .map(|s| self.init.get(s).copied().unwrap_or(0.0))
            .collect()
    }

    /// Reactions of the block labelled `label`.
    pub fn section(&self, label: &str) -> Option<&[Reaction]> {
        let k = self.sections.iter().position(|(_, l)| l == label)?;
        let start = self.sections[k].0;
        let end = self
            .sections
            .get(k + 1)
            .map_or(self.reactions.len(), |(s, _)| *s);
        Some(&self.reactions[start..end])
    }

    /// Labels every reaction as one block.
    pub fn labelled(mut self, label: &str) -> Self {
        self.sections = vec![(0, label.to_string())];
        self
    }
}

/// Reactions of a dual-rail system: one catalytic reaction per positive
/// matrix entry and target rail, one production per positive offset, and one
/// annihilation per driven state when `γ > 0`. Zero rates are omitted.
///
/// Ordering is row-major: for each state `i`, productions first, then
/// columns `j` in order; annihilations come last.
pub fn emit_crn(hs: &HungarizedSystem, init_plus: &[f64], init_minus: &[f64]) -> Result<Crn> {
    let q = &hs.quad;
    let n = q.len();
    if init_plus.len() != n || init_minus.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "initial rails of length {}/{} for {n} states",
            init_plus.len(),
            init_minus.len()
        )));
    }
    let species = hs.rail_names.clone();
    let mut seen = HashSet::new();
    if let Some(dup) = species.iter().find(|s| !seen.insert(s.as_str())) {
        return Err(Error::Validation(format!(
            "species name {dup} is not unique"
        )));
    }
    let plus = |i: usize| species[2 * i].as_str();
    let minus = |i: usize| species[2 * i + 1].as_str();

    let mut reactions = Vec::new();
    for i in 0..n {
        if q.b_plus[i] > 0.0 {
            reactions.push(Reaction::new([], [plus(i)], q.b_plus[i]));
        }
        if q.b_minus[i] > 0.0 {
            reactions.push(Reaction::new([], [minus(i)], q.b_minus[i]));
        }
        for j in 0..n {
            let ap = q.a_plus[(i, j)];
            let am = q.a_minus[(i, j)];
            if ap > 0.0 {
                reactions.push(Reaction::new([plus(j)], [plus(j), plus(i)], ap));
                reactions.push(Reaction::new([minus(j)], [minus(j), minus(i)], ap));
            }
            if am > 0.0 {
                reactions.push(Reaction::new([minus(j)], [minus(j), plus(i)], am));
                reactions.push(Reaction::new([plus(j)], [plus(j), minus(i)], am));
            }
        }
    }
    if hs.gamma > 0.0 {
        for i in 0..q.driven {
            reactions.push(Reaction::new([plus(i), minus(i)], [], hs.gamma));
        }
    }

    let mut init = BTreeMap::new();
    for i in 0..n {
        for (name, v) in [(plus(i), init_plus[i]), (minus(i), init_minus[i])] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::NegativeInit {
                    species: name.to_string(),
                    value: v,
                });
            }
            init.insert(name.to_string(), v);
        }
    }
    Ok(Crn {
        species,
        reactions,
        init,
        diffs: hs.difference_pairs(),
        sections: Vec::new(),
    })
}

/// Composition sharing species by name: species of `a`, then the new ones
/// of `b`; reactions, diffs and sections concatenated (diffs deduplicated).
pub fn union(a: &Crn, b: &Crn) -> Result<Crn> {
    let mut out = a.clone();
    let mut known: HashSet<String> = a.species.iter().cloned().collect();
    for s in &b.species {
        if known.insert(s.clone()) {
            out.species.push(s.clone());
        }
    }
    for (s, &v) in &b.init {
        match a.init.get(s) {
            Some(&left) if left != v => {
                return Err(Error::InitConflict {
                    species: s.clone(),
                    left,
                    right: v,
                })
            }
            _ => {
                out.init.insert(s.clone(), v);
            }
        }
    }
    let offset = a.reactions.len();
    out.reactions.extend(b.reactions.iter().cloned());
    out.sections
        .extend(b.sections.iter().map(|(k, l)| (k + offset, l.clone())));
    for d in &b.diffs {
        if !out.diffs.iter().any(|e| e.0 == d.0) {
            out.diffs.push(d.clone());
        }
    }
    Ok(out)
}

/// Rate, reactant indices, and net change per affected species.
type KineticTerm = (f64, Vec<usize>, Vec<(usize, f64)>);

/// Mass-action kinetics `∂c_s = Σ_r k_r (ν_s,r) Π_{w ∈ reactants(r)} c_w`.
#[derive(Debug, Clone)]
pub struct MassActionField {
    names: Vec<String>,
    reactions: Vec<KineticTerm>,
}

pub fn mass_action_field(net: &Crn) -> Result<MassActionField> {
    let index: HashMap<&str, usize> = net
        .species
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let lookup = |s: &String| {
        index
            .get(s.as_str())
            .copied()
            .ok_or_else(|| Error::UnknownSpecies(s.clone()))
    };
    let mut reactions = Vec::with_capacity(net.reactions.len());
    for r in &net.reactions {
        let reactants = r.reactants.iter().map(lookup).collect::<Result<Vec<_>>>()?;
        let mut change: BTreeMap<usize, f64> = BTreeMap::new();
        for &k in &reactants {
            *change.entry(k).or_default() -= 1.0;
        }
        for s in &r.products {
            *change.entry(lookup(s)?).or_default() += 1.0;
        }
        let change = change.into_iter().filter(|(_, v)| *v != 0.0).collect();
        reactions.push((r.rate, reactants, change));
    }
    Ok(MassActionField {
        names: net.species.clone(),
        reactions,
    })
}

impl VectorField for MassActionField {
    fn names(&self) -> &[String] {
        &self.names
    }

    fn eval(&self, state: &[f64], deriv: &mut [f64]) {
        deriv.iter_mut().for_each(|d| *d = 0.0);
        for (rate, reactants, change) in &self.reactions {
            let flux = reactants.iter().fold(*rate, |f, &k| f * state[k]);
            for &(k, nu) in change {
                deriv[k] += nu * flux;
            }
        }
    }
}
