/// Groups of interchangeable names used by the renaming refactorings.
///
/// API entries are written qualified (`api.add`). Every name belongs to at
/// most one group and every group has at least two members.
#[derive(Debug, Clone, Copy)]
pub struct SynonymTable {
    groups: &'static [&'static [&'static str]],
}

const SHIPPED: &[&[&str]] = &[
    // variables and parameters
    &["number", "size", "amount"],
    &["total", "summation", "accumulator"],
    &["result", "answer", "outcome"],
    &["i", "j", "k"],
    &["value", "val", "item"],
    &["limit", "bound", "upper"],
    &["first", "left", "lhs"],
    &["second", "right", "rhs"],
    &["largest", "biggest", "maximum"],
    &["product", "prod", "mult"],
    &["base", "root", "radix"],
    &["exponent", "power", "degree"],
    &["flag", "marker", "indicator"],
    &["current", "cur", "now"],
    &["previous", "prev", "last"],
    &["temp", "tmp", "scratch"],
    &["digit", "figure", "numeral"],
    &["steps", "remaining", "counter"],
    &["n", "num", "x"],
    &["a", "p", "u"],
    &["b", "r", "w"],
    &["step", "delta", "increment"],
    &["remainder", "rest", "leftover"],
    // function names
    &["count", "compute", "calculate"],
    &["solve", "run", "execute"],
    &["is_even", "even_check", "check_parity"],
    &["factorial", "fact", "permutations"],
    &["gcd", "common_divisor", "hcf"],
    &["is_triangular", "triangular", "tri_check"],
    &["countdown", "count_down", "descend"],
    &["power_of", "pow_calc", "raise_to"],
    &["digit_sum", "sum_digits", "digits_total"],
    &["fib", "fibonacci", "fib_number"],
    &["max_of", "bigger_of", "pick_max"],
    &["sum_to", "sum_below", "add_up"],
    // builtin API
    &["api.add", "api.delete"],
    &["api.sub", "api.minus"],
    &["api.mul", "api.times"],
    &["api.max", "api.larger"],
    &["api.min", "api.smaller"],
    &["api.abs", "api.magnitude"],
];

impl Default for SynonymTable {
    fn default() -> Self {
        SynonymTable::shipped()
    }
}

impl SynonymTable {
    pub const fn shipped() -> SynonymTable {
        SynonymTable { groups: SHIPPED }
    }

    pub fn groups(&self) -> &'static [&'static [&'static str]] {
        self.groups
    }

    pub fn group_of(&self, name: &str) -> Option<&'static [&'static str]> {
        self.groups.iter().copied().find(|g| g.contains(&name))
    }

    /// Other members of `name`'s group, in table order.
    pub fn synonyms<'a>(&self, name: &'a str) -> impl Iterator<Item = &'static str> + 'a {
        self.group_of(name)
            .unwrap_or(&[])
            .iter()
            .copied()
            .filter(move |s| *s != name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    #[test]
    fn groups_are_disjoint_and_nontrivial() {
        let table = SynonymTable::shipped();
        let mut seen = BTreeSet::new();
        for g in table.groups() {
            assert!(g.len() >= 2, "{g:?}");
            for name in *g {
                assert!(seen.insert(*name), "{name} appears twice");
            }
        }
        assert!(table.groups().len() >= 30);
    }

    #[test]
    fn api_synonyms_exist_as_builtins() {
        for g in SynonymTable::shipped().groups() {
            for name in *g {
                if let Some(member) = name.strip_prefix("api.") {
                    assert!(crate::lang::interp::api_function("api", member).is_some());
                }
            }
        }
    }

    #[test]
    fn lookup() {
        let t = SynonymTable::shipped();
        let v: alloc::vec::Vec<_> = t.synonyms("number").collect();
        assert_eq!(v, ["size", "amount"]);
        assert_eq!(t.synonyms("nothing").count(), 0);
    }
}
