//! Object domains, fluent declarations and load-time grounding.

use alloc::string::String;
use alloc::vec::Vec;

use super::value::{SymbolId, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DomainId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FluentId(pub u32);

/// Index of a ground fluent inside a [`WorldState`](super::WorldState).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundFluentId(pub u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DomainKind {
    Bool,
    /// Inclusive integer range.
    Range(i64, i64),
    /// Unbounded integers; only legal for observed nominal parameters.
    Int,
    Symbols(Vec<SymbolId>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub name: String,
    pub kind: DomainKind,
}

impl Domain {
    pub fn is_finite(&self) -> bool {
        !matches!(self.kind, DomainKind::Int)
    }

    /// Number of elements; `None` for unbounded domains.
    pub fn size(&self) -> Option<usize> {
        match &self.kind {
            DomainKind::Bool => Some(2),
            DomainKind::Range(lo, hi) => Some(if hi < lo { 0 } else { (hi - lo) as usize + 1 }),
            DomainKind::Int => None,
            DomainKind::Symbols(s) => Some(s.len()),
        }
    }

    /// Position of `v` in declaration order, if `v` is a member.
    pub fn position(&self, v: &Value) -> Option<usize> {
        match (&self.kind, v) {
            (DomainKind::Bool, Value::Bool(b)) => Some(*b as usize),
            (DomainKind::Range(lo, hi), Value::Int(i)) if lo <= i && i <= hi => {
                Some((i - lo) as usize)
            }
            (DomainKind::Symbols(s), Value::Sym(id)) => s.iter().position(|x| x == id),
            _ => None,
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (&self.kind, v) {
            (DomainKind::Int, Value::Int(_)) => true,
            _ => self.position(v).is_some(),
        }
    }

    /// Element at `index` in declaration order.
    pub fn element(&self, index: usize) -> Option<Value> {
        match &self.kind {
            DomainKind::Bool if index < 2 => Some(Value::Bool(index == 1)),
            DomainKind::Range(lo, hi) => {
                let v = lo.checked_add(index as i64)?;
                (v <= *hi).then_some(Value::Int(v))
            }
            DomainKind::Symbols(s) => s.get(index).map(|id| Value::Sym(*id)),
            _ => None,
        }
    }

    /// Elements in declaration order (empty for unbounded domains).
    pub fn values(&self) -> impl Iterator<Item = Value> + '_ {
        (0..self.size().unwrap_or(0)).filter_map(move |i| self.element(i))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FluentDecl {
    pub name: String,
    pub params: Vec<(String, DomainId)>,
    pub range: DomainId,
}

/// Names and grounding tables shared by every layer above the value model.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub symbols: Vec<String>,
    pub domains: Vec<Domain>,
    pub fluents: Vec<FluentDecl>,
    /// First ground id of each fluent.
    offsets: Vec<u32>,
    /// `(fluent, arguments)` for each ground id.
    grounds: Vec<(FluentId, Vec<Value>)>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern_symbol(&mut self, name: &str) -> SymbolId {
        match self.symbols.iter().position(|s| s == name) {
            Some(i) => SymbolId(i as u32),
            None => {
                self.symbols.push(String::from(name));
                SymbolId(self.symbols.len() as u32 - 1)
            }
        }
    }

    pub fn symbol(&self, name: &str) -> Option<SymbolId> {
        self.symbols
            .iter()
            .position(|s| s == name)
            .map(|i| SymbolId(i as u32))
    }

    pub fn symbol_name(&self, id: SymbolId) -> &str {
        &self.symbols[id.0 as usize]
    }

    pub fn add_domain(&mut self, domain: Domain) -> DomainId {
        self.domains.push(domain);
        DomainId(self.domains.len() as u32 - 1)
    }

    pub fn domain(&self, id: DomainId) -> &Domain {
        &self.domains[id.0 as usize]
    }

    pub fn domain_by_name(&self, name: &str) -> Option<DomainId> {
        self.domains
            .iter()
            .position(|d| d.name == name)
            .map(|i| DomainId(i as u32))
    }

    pub fn fluent(&self, id: FluentId) -> &FluentDecl {
        &self.fluents[id.0 as usize]
    }

    pub fn fluent_by_name(&self, name: &str) -> Option<FluentId> {
        self.fluents
            .iter()
            .position(|f| f.name == name)
            .map(|i| FluentId(i as u32))
    }

    /// Adds a fluent and re-grounds. Parameter domains must be finite.
    pub fn add_fluent(&mut self, decl: FluentDecl) -> FluentId {
        self.fluents.push(decl);
        self.reground();
        FluentId(self.fluents.len() as u32 - 1)
    }

    fn reground(&mut self) {
        self.offsets.clear();
        self.grounds.clear();
        for (i, f) in self.fluents.iter().enumerate() {
            self.offsets.push(self.grounds.len() as u32);
            let domains: Vec<&Domain> = f.params.iter().map(|(_, d)| self.domain(*d)).collect();
            for args in cartesian(&domains) {
                self.grounds.push((FluentId(i as u32), args));
            }
        }
    }

    pub fn ground_count(&self) -> usize {
        self.grounds.len()
    }

    pub fn ground(&self, id: GroundFluentId) -> (FluentId, &[Value]) {
        let (f, args) = &self.grounds[id.0 as usize];
        (*f, args)
    }

    pub fn grounds_of(&self, fluent: FluentId) -> impl Iterator<Item = GroundFluentId> + '_ {
        let start = self.offsets[fluent.0 as usize];
        let end = self
            .offsets
            .get(fluent.0 as usize + 1)
            .copied()
            .unwrap_or(self.grounds.len() as u32);
        (start..end).map(GroundFluentId)
    }

    /// Ground id of `fluent(args)`; `None` when an argument is outside its domain.
    pub fn ground_id(&self, fluent: FluentId, args: &[Value]) -> Option<GroundFluentId> {
        let decl = self.fluent(fluent);
        if decl.params.len() != args.len() {
            return None;
        }
        let mut index = 0usize;
        for ((_, d), v) in decl.params.iter().zip(args) {
            let dom = self.domain(*d);
            index = index * dom.size()? + dom.position(v)?;
        }
        Some(GroundFluentId(
            self.offsets[fluent.0 as usize] + index as u32,
        ))
    }

    pub fn range_of(&self, id: GroundFluentId) -> &Domain {
        let (f, _) = self.ground(id);
        self.domain(self.fluent(f).range)
    }

    pub fn format_value(&self, v: &Value) -> String {
        match v {
            Value::Sym(s) => String::from(self.symbol_name(*s)),
            other => alloc::format!("{other}"),
        }
    }

    /// `Broken(A)` or `position`.
    pub fn ground_name(&self, id: GroundFluentId) -> String {
        let (f, args) = self.ground(id);
        let mut s = self.fluent(f).name.clone();
        if !args.is_empty() {
            s.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    s.push_str(", ");
                }
                s.push_str(&self.format_value(a));
            }
            s.push(')');
        }
        s
    }
}

/// All tuples over `domains` in lexicographic declaration order.
pub fn cartesian(domains: &[&Domain]) -> Vec<Vec<Value>> {
    let mut out: Vec<Vec<Value>> = alloc::vec![Vec::new()];
    for d in domains {
        let values: Vec<Value> = d.values().collect();
        let mut next = Vec::with_capacity(out.len() * values.len());
        for prefix in &out {
            for v in &values {
                let mut t = prefix.clone();
                t.push(v.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn objects() -> Vocabulary {
        let mut v = Vocabulary::new();
        let a = v.intern_symbol("A");
        let b = v.intern_symbol("B");
        let obj = v.add_domain(Domain {
            name: "Obj".into(),
            kind: DomainKind::Symbols(vec![a, b]),
        });
        let bool_d = v.add_domain(Domain {
            name: "bool".into(),
            kind: DomainKind::Bool,
        });
        let pos = v.add_domain(Domain {
            name: "Pos".into(),
            kind: DomainKind::Range(-2, 2),
        });
        v.add_fluent(FluentDecl {
            name: "position".into(),
            params: vec![],
            range: pos,
        });
        v.add_fluent(FluentDecl {
            name: "NextTo".into(),
            params: vec![("x".into(), obj), ("y".into(), obj)],
            range: bool_d,
        });
        v
    }

    #[test]
    fn grounding_is_dense_and_ordered() {
        let v = objects();
        assert_eq!(v.ground_count(), 5);
        let next_to = v.fluent_by_name("NextTo").unwrap();
        let (a, b) = (Value::Sym(SymbolId(0)), Value::Sym(SymbolId(1)));
        let id = v.ground_id(next_to, &[b.clone(), a.clone()]).unwrap();
        assert_eq!(id, GroundFluentId(3));
        assert_eq!(v.ground_name(id), "NextTo(B, A)");
        assert_eq!(v.grounds_of(next_to).count(), 4);
        assert!(v.ground_id(next_to, &[a, Value::Int(0)]).is_none());
    }

    #[test]
    fn ranges_enumerate_in_order() {
        let d = Domain {
            name: "R".into(),
            kind: DomainKind::Range(-1, 1),
        };
        let vals: Vec<Value> = d.values().collect();
        assert_eq!(vals, vec![Value::Int(-1), Value::Int(0), Value::Int(1)]);
        assert!(!d.contains(&Value::Int(2)));
        let unbounded = Domain {
            name: "int".into(),
            kind: DomainKind::Int,
        };
        assert!(!unbounded.is_finite());
        assert!(unbounded.contains(&Value::Int(1 << 40)));
    }
}
