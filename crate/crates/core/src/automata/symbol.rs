use std::collections::HashMap;
use std::fmt;

/// An interned alphabet symbol.
///
/// Symbols order by their interning id, which is also the tie-break order
/// used when enumerating witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(u32);

impl Symbol {
    pub const fn from_index(index: u32) -> Self {
        Symbol(index)
    }

    pub const fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// A transition label: a symbol, or `None` for epsilon.
pub type Label = Option<Symbol>;

/// The epsilon label.
pub const EPSILON: Label = None;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Location,
    Drop,
    /// Output-only placeholder introduced by the compiler; never part of a
    /// snapshot path and never part of the complement universe.
    Marker,
}

/// The reserved name of the drop symbol.
pub const DROP_NAME: &str = "drop";

/// A sorted, duplicate-free set of symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Alphabet(Vec<Symbol>);

impl Alphabet {
    pub fn new(mut symbols: Vec<Symbol>) -> Self {
        symbols.sort_unstable();
        symbols.dedup();
        Alphabet(symbols)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn contains(&self, symbol: Symbol) -> bool {
        self.0.binary_search(&symbol).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<Symbol> for Alphabet {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        Alphabet::new(iter.into_iter().collect())
    }
}

/// Interns symbol names and records their kind.
///
/// The drop symbol is always interned first, so it has index 0.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    names: Vec<String>,
    kinds: Vec<SymbolKind>,
    index: HashMap<String, Symbol>,
    markers: u32,
}

impl Default for SymbolTable {
    fn default() -> Self {
        Self::new()
    }
}

impl SymbolTable {
    pub fn new() -> Self {
        let mut table = SymbolTable {
            names: Vec::new(),
            kinds: Vec::new(),
            index: HashMap::new(),
            markers: 0,
        };
        table.push(DROP_NAME.to_string(), SymbolKind::Drop);
        table
    }

    fn push(&mut self, name: String, kind: SymbolKind) -> Symbol {
        let symbol = Symbol(self.names.len() as u32);
        self.index.insert(name.clone(), symbol);
        self.names.push(name);
        self.kinds.push(kind);
        symbol
    }

    /// Interns a location name, returning the existing symbol if present.
    ///
    /// Panics if `name` is already interned with a different kind.
    pub fn location(&mut self, name: &str) -> Symbol {
        match self.index.get(name) {
            Some(&symbol) => {
                assert_eq!(
                    self.kind(symbol),
                    SymbolKind::Location,
                    "`{name}` is not a location symbol"
                );
                symbol
            }
            None => self.push(name.to_string(), SymbolKind::Location),
        }
    }

    /// Allocates a fresh marker symbol named `#k`.
    pub fn fresh_marker(&mut self) -> Symbol {
        self.markers += 1;
        let mut name = format!("#{}", self.markers);
        while self.index.contains_key(&name) {
            self.markers += 1;
            name = format!("#{}", self.markers);
        }
        self.push(name, SymbolKind::Marker)
    }

    pub fn drop_symbol(&self) -> Symbol {
        Symbol(0)
    }

    pub fn get(&self, name: &str) -> Option<Symbol> {
        self.index.get(name).copied()
    }

    pub fn name(&self, symbol: Symbol) -> &str {
        &self.names[symbol.0 as usize]
    }

    pub fn kind(&self, symbol: Symbol) -> SymbolKind {
        self.kinds[symbol.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Symbol, &str, SymbolKind)> + '_ {
        self.names
            .iter()
            .zip(&self.kinds)
            .enumerate()
            .map(|(i, (name, &kind))| (Symbol(i as u32), name.as_str(), kind))
    }

    /// All location symbols, excluding drop and markers.
    pub fn locations(&self) -> Alphabet {
        self.iter()
            .filter(|&(_, _, kind)| kind == SymbolKind::Location)
            .map(|(s, _, _)| s)
            .collect()
    }

    /// The complement universe: every location plus drop. Markers are excluded.
    pub fn universe(&self) -> Alphabet {
        self.iter()
            .filter(|&(_, _, kind)| kind != SymbolKind::Marker)
            .map(|(s, _, _)| s)
            .collect()
    }

    /// Renders a word as space-separated symbol names.
    pub fn render(&self, word: &[Symbol]) -> String {
        let mut out = String::new();
        for (i, &s) in word.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(self.name(s));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drop_is_reserved_and_first() {
        let table = SymbolTable::new();
        assert_eq!(table.drop_symbol().index(), 0);
        assert_eq!(table.kind(table.drop_symbol()), SymbolKind::Drop);
        assert_eq!(table.get("drop"), Some(table.drop_symbol()));
    }

    #[test]
    fn markers_are_fresh_and_outside_universe() {
        let mut table = SymbolTable::new();
        let a = table.location("a");
        let m1 = table.fresh_marker();
        let m2 = table.fresh_marker();
        assert_ne!(m1, m2);
        assert_eq!(table.name(m1), "#1");
        let universe = table.universe();
        assert!(universe.contains(a));
        assert!(universe.contains(table.drop_symbol()));
        assert!(!universe.contains(m1));
        assert!(!table.locations().contains(table.drop_symbol()));
    }

    #[test]
    fn interning_is_idempotent() {
        let mut table = SymbolTable::new();
        let a = table.location("a");
        assert_eq!(table.location("a"), a);
        assert_eq!(table.len(), 2);
    }
}
