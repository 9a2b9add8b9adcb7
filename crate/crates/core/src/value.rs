//! Finite symbolic values used as states, moves and strategies.
//!
//! Games built from compositions nest their carriers (pairs of pairs, function
//! tables over pairs), so every finite carrier is drawn from this one ordered
//! value type. The total order is what lets [`crate::dist::Dist`] keep a
//! canonical support.

use std::fmt;
use std::sync::Arc;

/// A finite, totally ordered symbolic value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    /// The single element of the one-point set.
    Unit,
    /// A named symbol such as `H` or `NE`.
    Atom(Arc<str>),
    /// An ordered pair.
    Pair(Arc<(Value, Value)>),
    /// A finite function given by its graph, sorted by argument.
    Table(Arc<[(Value, Value)]>),
}

impl Value {
    pub fn atom(name: &str) -> Value {
        Value::Atom(Arc::from(name))
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Arc::new((a, b)))
    }

    /// Builds a function table; entries are sorted by argument.
    pub fn table(mut entries: Vec<(Value, Value)>) -> Value {
        entries.sort();
        entries.dedup_by(|a, b| a.0 == b.0);
        Value::Table(Arc::from(entries))
    }

    pub fn atoms(names: &[&str]) -> Vec<Value> {
        names.iter().map(|n| Value::atom(n)).collect()
    }

    pub fn as_pair(&self) -> Option<(&Value, &Value)> {
        match self {
            Value::Pair(p) => Some((&p.0, &p.1)),
            _ => None,
        }
    }

    pub fn fst(&self) -> Option<&Value> {
        self.as_pair().map(|p| p.0)
    }

    pub fn snd(&self) -> Option<&Value> {
        self.as_pair().map(|p| p.1)
    }

    /// Applies a function table to an argument.
    pub fn apply(&self, arg: &Value) -> Option<&Value> {
        match self {
            Value::Table(entries) => entries
                .binary_search_by(|(k, _)| k.cmp(arg))
                .ok()
                .map(|i| &entries[i].1),
            _ => None,
        }
    }

    /// The explicit graph form of a table, `[a->b,c->d]`.
    pub fn table_graph(&self) -> Option<String> {
        match self {
            Value::Table(entries) => {
                let body: Vec<String> = entries.iter().map(|(k, v)| format!("{k}->{v}")).collect();
                Some(format!("[{}]", body.join(",")))
            }
            _ => None,
        }
    }

    /// Every textual name this value answers to: its display form plus, for
    /// tables, the explicit graph form.
    pub fn names(&self) -> Vec<String> {
        let mut out = vec![self.to_string()];
        if let Some(g) = self.table_graph() {
            if g != out[0] {
                out.push(g);
            }
        }
        out
    }
}

/// All pairs `(a, b)` with `a` from `left` and `b` from `right`, in order.
pub fn product(left: &[Value], right: &[Value]) -> Vec<Value> {
    let mut out = Vec::with_capacity(left.len() * right.len());
    for a in left {
        for b in right {
            out.push(Value::pair(a.clone(), b.clone()));
        }
    }
    out
}

/// All functions `domain -> codomain` as tables, in lexicographic order of
/// their images.
pub fn function_space(domain: &[Value], codomain: &[Value]) -> Vec<Value> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; domain.len()];
    if codomain.is_empty() {
        return out;
    }
    loop {
        out.push(Value::table(
            domain
                .iter()
                .zip(&idx)
                .map(|(d, &i)| (d.clone(), codomain[i].clone()))
                .collect(),
        ));
        // odometer, last position fastest
        let mut pos = domain.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < codomain.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => write!(f, "*"),
            Value::Atom(a) => write!(f, "{a}"),
            Value::Pair(p) => write!(f, "({}, {})", p.0, p.1),
            Value::Table(entries) => {
                if entries.iter().all(|(k, v)| k == v) {
                    return write!(f, "id");
                }
                if entries.len() == 2
                    && entries[0].0 == entries[1].1
                    && entries[1].0 == entries[0].1
                {
                    return write!(f, "swap");
                }
                if entries.len() > 1 && entries.iter().all(|(_, v)| *v == entries[0].1) {
                    if let Value::Atom(a) = &entries[0].1 {
                        return write!(f, "const_{a}");
                    }
                }
                write!(f, "{}", self.table_graph().unwrap_or_default())
            }
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_space_enumerates_all_tables() {
        let ys = Value::atoms(&["E", "NE"]);
        let fs = function_space(&ys, &ys);
        assert_eq!(fs.len(), 4);
        let names: Vec<String> = fs.iter().map(|f| f.to_string()).collect();
        assert_eq!(names, ["const_E", "id", "swap", "const_NE"]);
        let swap = &fs[2];
        assert_eq!(swap.apply(&Value::atom("E")), Some(&Value::atom("NE")));
    }

    #[test]
    fn function_space_of_empty_domain_is_a_singleton() {
        let fs = function_space(&[], &Value::atoms(&["a"]));
        assert_eq!(fs.len(), 1);
    }

    #[test]
    fn display_nests_pairs() {
        let v = Value::pair(Value::atom("H"), Value::pair(Value::Unit, Value::atom("T")));
        assert_eq!(v.to_string(), "(H, (*, T))");
    }

    #[test]
    fn tables_answer_to_graph_form() {
        let t = Value::table(vec![(Value::atom("a"), Value::atom("x")), (Value::atom("b"), Value::atom("y"))]);
        assert_eq!(t.names(), vec!["[a->x,b->y]".to_string()]);
        let s = function_space(&Value::atoms(&["E", "NE"]), &Value::atoms(&["E", "NE"]))[2].clone();
        assert_eq!(s.names(), vec!["swap".to_string(), "[E->NE,NE->E]".to_string()]);
    }
}
