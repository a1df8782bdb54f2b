//! Shared inputs for the criterion benches.

use gwp_core::descendents::{ClassMonomial, SymbolRef, SymbolTable};

/// A table with `n` alternating even/odd classes `x1..xn`.
pub fn classes(n: usize) -> (SymbolTable, Vec<ClassMonomial>) {
    let mut t = SymbolTable::new();
    let mut out = Vec::with_capacity(n);
    for j in 1..=n {
        let (deg, parity) = if j % 2 == 0 { (3, "odd") } else { (2, "even") };
        match t
            .declare_spec(&format!("x{j}:{deg}:{parity}"))
            .expect("fresh name")
        {
            SymbolRef::Class(f) => out.push(ClassMonomial::factor(f)),
            _ => unreachable!("class declarations have no arity"),
        }
    }
    (t, out)
}
