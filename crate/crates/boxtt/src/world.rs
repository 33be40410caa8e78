//! Reference-cell worlds: the concrete Kripke frame the evaluator runs
//! against. Worlds are immutable ordered lists of cells; every operation
//! returns a new world, and the extension order is decided structurally.

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::term::{ChoiceName, Term};

/// A choice is a natural number in this instance.
pub type Choice = BigUint;

pub(crate) mod nat_string {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        n.to_string().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Constraint on the choices a cell admits, with the default used at cell
/// creation. Only the numeric restriction exists in this instance; since
/// choices already are naturals its predicate is total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Restriction {
    #[serde(rename = "nat")]
    NatOnly,
}

impl Restriction {
    pub fn default_choice(&self) -> Choice {
        match self {
            Restriction::NatOnly => BigUint::zero(),
        }
    }

    pub fn satisfies(&self, _c: &Choice) -> bool {
        match self {
            Restriction::NatOnly => true,
        }
    }
}

/// One reference cell: name, restriction, current choice, mutability.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub name: ChoiceName,
    pub restriction: Restriction,
    #[serde(with = "nat_string")]
    pub value: Choice,
    pub mutable: bool,
}

/// A world: an ordered list of cells with pairwise-distinct names whose
/// values satisfy their restrictions.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RefWorld {
    pub cells: Vec<Cell>,
}

#[derive(Debug, thiserror::Error)]
pub enum WorldError {
    #[error("duplicate cell name {0}")]
    DuplicateName(ChoiceName),
    #[error("cell {0} violates its restriction")]
    RestrictionViolated(ChoiceName),
}

impl RefWorld {
    pub fn new() -> Self {
        RefWorld { cells: Vec::new() }
    }

    /// Build a world from raw cells, checking the invariants.
    pub fn from_cells(cells: Vec<Cell>) -> Result<Self, WorldError> {
        for (i, c) in cells.iter().enumerate() {
            if cells[..i].iter().any(|d| d.name == c.name) {
                return Err(WorldError::DuplicateName(c.name));
            }
            if !c.restriction.satisfies(&c.value) {
                return Err(WorldError::RestrictionViolated(c.name));
            }
        }
        Ok(RefWorld { cells })
    }

    fn cell(&self, k: ChoiceName) -> Option<&Cell> {
        self.cells.iter().find(|c| c.name == k)
    }

    /// The last choice made for `k`, if `k` has a cell. Read is partial:
    /// absence is a legal result.
    pub fn read(&self, k: ChoiceName) -> Option<&Choice> {
        self.cell(k).map(|c| &c.value)
    }

    /// Update `k`'s cell with `c` if present and mutable; otherwise return
    /// the world unchanged. Always an extension of `self`.
    pub fn write(&self, k: ChoiceName, c: Choice) -> RefWorld {
        let mut w = self.clone();
        if let Some(cell) = w.cells.iter_mut().find(|cl| cl.name == k) {
            if cell.mutable && cell.restriction.satisfies(&c) {
                cell.value = c;
            }
        }
        w
    }

    /// A name not used by any cell: 1 + the largest id, 0 for the empty
    /// world. Deterministic given the world.
    pub fn new_choice(&self) -> ChoiceName {
        let max = self.cells.iter().map(|c| c.name.0).max();
        match max {
            None => ChoiceName(0),
            Some(m) => match m.checked_add(1) {
                Some(n) => ChoiceName(n),
                // Id space saturated (only reachable from a hand-crafted
                // literal naming u64::MAX); fall back to the first free id.
                None => ChoiceName(
                    (0..).find(|i| !self.cells.iter().any(|c| c.name.0 == *i)).unwrap(),
                ),
            },
        }
    }

    /// Append a new mutable cell named `new_choice()`, initialized at the
    /// restriction's default.
    pub fn start_new_choice(&self, r: Restriction) -> RefWorld {
        let mut w = self.clone();
        w.cells.push(Cell {
            name: self.new_choice(),
            restriction: r,
            value: r.default_choice(),
            mutable: true,
        });
        w
    }

    /// A cell named `k` with restriction `r` exists and its current value
    /// satisfies `r`.
    pub fn compatible(&self, k: ChoiceName, r: Restriction) -> bool {
        match self.cell(k) {
            Some(c) => c.restriction == r && r.satisfies(&c.value),
            None => false,
        }
    }
}

/// Decide the extension order structurally: `ext` is reachable from `base`
/// by zero or more cell creations and mutable-cell updates. Concretely,
/// `base`'s name sequence is a prefix of `ext`'s, restrictions and
/// mutability flags agree on the prefix, changed values sit in mutable
/// cells with restriction-satisfying values, and cells only in `ext`
/// satisfy their restriction (immutable ones still hold the default, since
/// creation initializes at the default and they can never leave it).
pub fn extends(base: &RefWorld, ext: &RefWorld) -> bool {
    if base.cells.len() > ext.cells.len() {
        return false;
    }
    for (b, e) in base.cells.iter().zip(ext.cells.iter()) {
        if b.name != e.name || b.restriction != e.restriction || b.mutable != e.mutable {
            return false;
        }
        if b.value != e.value && !(b.mutable && b.restriction.satisfies(&e.value)) {
            return false;
        }
    }
    for c in &ext.cells[base.cells.len()..] {
        if !c.restriction.satisfies(&c.value) {
            return false;
        }
        if !c.mutable && c.value != c.restriction.default_choice() {
            return false;
        }
    }
    true
}

/// Coerce a term to a choice: numerals to their value, everything else to
/// 0. Coercing an embedded choice returns that choice.
pub fn coerce(t: &Term) -> Choice {
    match t {
        Term::Num(n) => n.clone(),
        _ => BigUint::zero(),
    }
}

/// A deterministic finite stand-in for quantification over all extensions:
/// `count` worlds, each reached from `w` by at most `depth` random
/// write/start_new_choice operations. The first element is `w` itself.
pub fn sample_extensions(w: &RefWorld, depth: u32, count: u32, seed: u64) -> Vec<RefWorld> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count as usize);
    out.push(w.clone());
    for _ in 1..count {
        let mut cur = w.clone();
        let ops = rng.gen_range(0..=depth);
        for _ in 0..ops {
            let mutable: Vec<ChoiceName> = cur
                .cells
                .iter()
                .filter(|c| c.mutable)
                .map(|c| c.name)
                .collect();
            if !mutable.is_empty() && rng.gen_bool(0.5) {
                let k = mutable[rng.gen_range(0..mutable.len())];
                let v = BigUint::from(rng.gen_range(0u64..10));
                cur = cur.write(k, v);
            } else {
                cur = cur.start_new_choice(Restriction::NatOnly);
            }
        }
        out.push(cur);
    }
    out
}
