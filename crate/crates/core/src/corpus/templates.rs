//! Problem templates. Each one writes MiniPy source for a randomly chosen
//! surface form and knows the outputs every form must print on its probes.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

const PARAMS: &[&str] = &["n", "num", "x", "number", "size", "amount", "limit", "bound", "upper"];
const ACCUMULATORS: &[&str] = &["total", "summation", "accumulator", "result", "answer", "outcome"];
const PRODUCTS: &[&str] = &["product", "prod", "mult", "result", "answer", "outcome"];
const LOOP_VARS: &[&str] = &["i", "j", "k"];
const COUNTERS: &[&str] = &["steps", "remaining", "counter", "current", "cur", "now"];
const TEMPS: &[&str] = &["temp", "tmp", "scratch"];
const DIGITS: &[&str] = &["digit", "figure", "numeral"];
const FLAGS: &[&str] = &["flag", "marker", "indicator"];
const LARGEST: &[&str] = &["largest", "biggest", "maximum"];
const REMAINDERS: &[&str] = &["remainder", "rest", "leftover"];
const BASES: &[&str] = &["base", "root", "radix"];
const EXPONENTS: &[&str] = &["exponent", "power", "degree"];
const INPUT_VARS: &[&str] = &["value", "val", "item"];
const PAIRS: &[(&str, &str)] = &[
    ("first", "second"),
    ("left", "right"),
    ("lhs", "rhs"),
    ("a", "b"),
    ("p", "r"),
    ("u", "w"),
];
const FIB_PAIRS: &[(&str, &str)] = &[
    ("previous", "current"),
    ("prev", "cur"),
    ("first", "second"),
    ("a", "b"),
];
const GENERIC_FUNCTIONS: &[&str] = &["count", "compute", "calculate", "solve", "run", "execute"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Template {
    SumTo,
    MaxOfTwo,
    Parity,
    Factorial,
    TriangularCheck,
    Countdown,
    Gcd,
    Power,
    DigitSum,
    Fibonacci,
}

pub(crate) const TEMPLATES: [Template; 10] = [
    Template::SumTo,
    Template::MaxOfTwo,
    Template::Parity,
    Template::Factorial,
    Template::TriangularCheck,
    Template::Countdown,
    Template::Gcd,
    Template::Power,
    Template::DigitSum,
    Template::Fibonacci,
];

fn pick<'a, R: Rng + ?Sized>(rng: &mut R, options: &[&'a str]) -> &'a str {
    options[rng.random_range(0..options.len())]
}

fn pick_pair<R: Rng + ?Sized>(rng: &mut R, options: &[(&'static str, &'static str)]) -> (&'static str, &'static str) {
    options[rng.random_range(0..options.len())]
}

/// `return e`, optionally behind an always-taken `if True:` guard.
fn ret<R: Rng + ?Sized>(rng: &mut R, expr: &str) -> String {
    if rng.random_bool(0.25) {
        format!("    if True:\n        return {expr}\n    return 0\n")
    } else {
        format!("    return {expr}\n")
    }
}

fn add_to<R: Rng + ?Sized>(rng: &mut R, acc: &str, term: &str, indent: &str) -> String {
    match rng.random_range(0..3) {
        0 => format!("{indent}{acc} += {term}\n"),
        1 => format!("{indent}{acc} = {acc} + {term}\n"),
        _ => format!("{indent}{acc} = api.add({acc}, {term})\n"),
    }
}

fn mul_into<R: Rng + ?Sized>(rng: &mut R, acc: &str, factor: &str, indent: &str) -> String {
    match rng.random_range(0..3) {
        0 => format!("{indent}{acc} *= {factor}\n"),
        1 => format!("{indent}{acc} = {acc} * {factor}\n"),
        _ => format!("{indent}{acc} = api.mul({acc}, {factor})\n"),
    }
}

impl Template {
    pub(crate) fn name(self) -> &'static str {
        match self {
            Template::SumTo => "sum-to-n",
            Template::MaxOfTwo => "max-of-two",
            Template::Parity => "parity",
            Template::Factorial => "factorial",
            Template::TriangularCheck => "triangular-check",
            Template::Countdown => "countdown",
            Template::Gcd => "gcd",
            Template::Power => "power",
            Template::DigitSum => "digit-sum",
            Template::Fibonacci => "fibonacci",
        }
    }

    fn function_names(self) -> &'static [&'static str] {
        match self {
            Template::SumTo => &["sum_to", "sum_below", "add_up"],
            Template::MaxOfTwo => &["max_of", "bigger_of", "pick_max"],
            Template::Parity => &["is_even", "even_check", "check_parity"],
            Template::Factorial => &["factorial", "fact", "permutations"],
            Template::TriangularCheck => &["is_triangular", "triangular", "tri_check"],
            Template::Countdown => &["countdown", "count_down", "descend"],
            Template::Gcd => &["gcd", "common_divisor", "hcf"],
            Template::Power => &["power_of", "pow_calc", "raise_to"],
            Template::DigitSum => &["digit_sum", "sum_digits", "digits_total"],
            Template::Fibonacci => &["fib", "fibonacci", "fib_number"],
        }
    }

    /// Inputs fed to `input()` for each of the five probes.
    pub(crate) fn probes(self) -> Vec<Vec<i64>> {
        let one = |xs: [i64; 5]| xs.iter().map(|x| vec![*x]).collect();
        let two = |xs: [(i64, i64); 5]| xs.iter().map(|(a, b)| vec![*a, *b]).collect();
        match self {
            Template::SumTo => one([0, 1, 3, 7, 12]),
            Template::MaxOfTwo => two([(3, 5), (9, 2), (4, 4), (-1, -7), (0, 10)]),
            Template::Parity => one([0, 1, 2, 7, 10]),
            Template::Factorial => one([0, 1, 3, 5, 7]),
            Template::TriangularCheck => one([1, 2, 3, 6, 8]),
            Template::Countdown => one([0, 1, 3, 4, 6]),
            Template::Gcd => two([(12, 18), (7, 5), (100, 75), (21, 14), (8, 8)]),
            Template::Power => two([(2, 3), (3, 0), (5, 2), (1, 7), (2, 10)]),
            Template::DigitSum => one([0, 7, 45, 123, 9090]),
            Template::Fibonacci => one([0, 1, 2, 6, 10]),
        }
    }

    /// Lines every variant must print for `probe`.
    pub(crate) fn expected(self, probe: &[i64]) -> Vec<String> {
        let n = probe[0];
        let value = match self {
            Template::SumTo => (0..n).sum::<i64>(),
            Template::MaxOfTwo => n.max(probe[1]),
            Template::Parity => i64::from(n % 2 == 0),
            Template::Factorial => (1..=n).product::<i64>(),
            Template::TriangularCheck => i64::from((0..=n).any(|i| i * (i + 1) / 2 == n)),
            Template::Countdown => return (1..=n).rev().map(|i| i.to_string()).collect(),
            Template::Gcd => {
                let (mut a, mut b) = (n, probe[1]);
                while b != 0 {
                    (a, b) = (b, a % b);
                }
                a
            }
            Template::Power => n.pow(probe[1] as u32),
            Template::DigitSum => {
                let mut m = n;
                let mut s = 0;
                while m > 0 {
                    s += m % 10;
                    m /= 10;
                }
                s
            }
            Template::Fibonacci => {
                let (mut a, mut b) = (0i64, 1i64);
                for _ in 0..n {
                    (a, b) = (b, a + b);
                }
                a
            }
        };
        vec![value.to_string()]
    }

    /// Source text of one randomly chosen surface form.
    pub(crate) fn source<R: Rng + ?Sized>(self, rng: &mut R) -> String {
        let f = if rng.random_bool(0.75) {
            pick(rng, self.function_names())
        } else {
            pick(rng, GENERIC_FUNCTIONS)
        };
        let (def, body, call) = match self {
            Template::SumTo => self.sum_to(rng),
            Template::MaxOfTwo => self.max_of_two(rng),
            Template::Parity => self.parity(rng),
            Template::Factorial => self.factorial(rng),
            Template::TriangularCheck => self.triangular(rng),
            Template::Countdown => self.countdown(rng),
            Template::Gcd => self.gcd(rng),
            Template::Power => self.power(rng),
            Template::DigitSum => self.digit_sum(rng),
            Template::Fibonacci => self.fibonacci(rng),
        };
        let v = pick(rng, INPUT_VARS);
        let top = match (call, self) {
            (Arity::One, Template::Countdown) => format!("{v} = input()\n{f}({v})\n"),
            (Arity::One, _) => format!("{v} = input()\nprint({f}({v}))\n"),
            (Arity::Two, _) => {
                let (x, y) = pick_pair(rng, PAIRS);
                format!("{x} = input()\n{y} = input()\nprint({f}({x}, {y}))\n")
            }
        };
        format!("def {f}({def}):\n{body}{top}")
    }

    fn sum_to<R: Rng + ?Sized>(self, rng: &mut R) -> (String, String, Arity) {
        let p = pick(rng, PARAMS);
        let acc = pick(rng, ACCUMULATORS);
        let i = pick(rng, LOOP_VARS);
        let body = match rng.random_range(0..4) {
            0 | 1 => {
                let range = match rng.random_range(0..3) {
                    0 => p.to_string(),
                    1 => format!("0, {p}"),
                    _ => format!("1, {p}"),
                };
                format!(
                    "    {acc} = 0\n    for {i} in range({range}):\n{}{}",
                    add_to(rng, acc, i, "        "),
                    ret(rng, acc)
                )
            }
            2 => format!(
                "    {acc} = 0\n    {i} = 0\n    while {i} < {p}:\n{}        {i} += 1\n{}",
                add_to(rng, acc, i, "        "),
                ret(rng, acc)
            ),
            _ => ret(rng, &format!("{p} * ({p} - 1) // 2")),
        };
        (p.into(), body, Arity::One)
    }

    fn max_of_two<R: Rng + ?Sized>(self, rng: &mut R) -> (String, String, Arity) {
        let (a, b) = pick_pair(rng, PAIRS);
        let body = match rng.random_range(0..5) {
            0 => format!("    if {a} > {b}:\n        return {a}\n    else:\n        return {b}\n"),
            1 => ret(rng, &format!("{a} if {a} > {b} else {b}")),
            2 => {
                let api = pick(rng, &["max", "larger"]);
                ret(rng, &format!("api.{api}({a}, {b})"))
            }
            3 => {
                let m = pick(rng, LARGEST);
                format!("    {m} = {a}\n    if {b} > {m}:\n        {m} = {b}\n{}", ret(rng, m))
            }
            _ => format!("    if {a} >= {b}:\n        return {a}\n    return {b}\n"),
        };
        (format!("{a}, {b}"), body, Arity::Two)
    }

    fn parity<R: Rng + ?Sized>(self, rng: &mut R) -> (String, String, Arity) {
        let p = pick(rng, PARAMS);
        let r = pick(rng, REMAINDERS);
        let body = match rng.random_range(0..4) {
            0 => format!("    if {p} % 2 == 0:\n        return 1\n    return 0\n"),
            1 => ret(rng, &format!("1 - {p} % 2")),
            2 => format!("    {r} = {p} % 2\n    if {r} == 0:\n        return 1\n    else:\n        return 0\n"),
            _ => format!(
                "    {r} = {p}\n    while {r} >= 2:\n        {r} -= 2\n{}",
                ret(rng, &format!("1 - {r}"))
            ),
        };
        (p.into(), body, Arity::One)
    }

    fn factorial<R: Rng + ?Sized>(self, rng: &mut R) -> (String, String, Arity) {
        let p = pick(rng, PARAMS);
        let acc = pick(rng, PRODUCTS);
        let i = pick(rng, LOOP_VARS);
        let body = match rng.random_range(0..3) {
            0 => {
                let start = pick(rng, &["1", "2"]);
                format!(
                    "    {acc} = 1\n    for {i} in range({start}, {p} + 1):\n{}{}",
                    mul_into(rng, acc, i, "        "),
                    ret(rng, acc)
                )
            }
            1 => format!(
                "    {acc} = 1\n    {i} = 1\n    while {i} <= {p}:\n{}        {i} += 1\n{}",
                mul_into(rng, acc, i, "        "),
                ret(rng, acc)
            ),
            _ => format!(
                "    {acc} = 1\n    {i} = {p}\n    while {i} > 1:\n{}        {i} -= 1\n{}",
                mul_into(rng, acc, i, "        "),
                ret(rng, acc)
            ),
        };
        (p.into(), body, Arity::One)
    }

    fn triangular<R: Rng + ?Sized>(self, rng: &mut R) -> (String, String, Arity) {
        let p = pick(rng, PARAMS);
        let t = pick(rng, ACCUMULATORS);
        let i = pick(rng, LOOP_VARS);
        let body = match rng.random_range(0..3) {
            0 => format!(
                "    {t} = 0\n    {i} = 0\n    while {t} < {p}:\n        {i} += 1\n{}{}",
                add_to(rng, t, i, "        "),
                ret(rng, &format!("1 if {t} == {p} else 0"))
            ),
            1 => {
                let flag = pick(rng, FLAGS);
                format!(
                    "    {flag} = 0\n    for {i} in range({p} + 1):\n        if {i} * ({i} + 1) // 2 == {p}:\n            {flag} = 1\n{}",
                    ret(rng, flag)
                )
            }
            _ => format!(
                "    {t} = 0\n    {i} = 0\n    while {t} < {p}:\n        {i} += 1\n{}    if {t} == {p}:\n        return 1\n    else:\n        return 0\n",
                add_to(rng, t, i, "        ")
            ),
        };
        (p.into(), body, Arity::One)
    }

    fn countdown<R: Rng + ?Sized>(self, rng: &mut R) -> (String, String, Arity) {
        let p = pick(rng, PARAMS);
        let body = match rng.random_range(0..3) {
            0 => format!(
                "    while {p} > 0:\n        print({p})\n        {p} -= 1\n{}",
                ret(rng, "0")
            ),
            1 => {
                let i = pick(rng, LOOP_VARS);
                format!(
                    "    for {i} in range({p}):\n        print({p} - {i})\n{}",
                    ret(rng, "0")
                )
            }
            _ => {
                let c = pick(rng, COUNTERS);
                format!(
                    "    {c} = {p}\n    while {c} >= 1:\n        print({c})\n        {c} = {c} - 1\n{}",
                    ret(rng, "0")
                )
            }
        };
        (p.into(), body, Arity::One)
    }

    fn gcd<R: Rng + ?Sized>(self, rng: &mut R) -> (String, String, Arity) {
        let (a, b) = pick_pair(rng, PAIRS);
        let t = pick(rng, TEMPS);
        let body = match rng.random_range(0..3) {
            0 => format!(
                "    while {b} != 0:\n        {t} = {b}\n        {b} = {a} % {b}\n        {a} = {t}\n{}",
                ret(rng, a)
            ),
            1 => format!(
                "    while {a} != {b}:\n        if {a} > {b}:\n            {a} -= {b}\n        else:\n            {b} -= {a}\n{}",
                ret(rng, a)
            ),
            _ => format!(
                "    while {b} > 0:\n        {t} = {a} % {b}\n        {a} = {b}\n        {b} = {t}\n{}",
                ret(rng, a)
            ),
        };
        (format!("{a}, {b}"), body, Arity::Two)
    }

    fn power<R: Rng + ?Sized>(self, rng: &mut R) -> (String, String, Arity) {
        let b = pick(rng, BASES);
        let e = pick(rng, EXPONENTS);
        let acc = pick(rng, PRODUCTS);
        let body = match rng.random_range(0..3) {
            0 | 1 => {
                let i = pick(rng, LOOP_VARS);
                let range = if rng.random_bool(0.5) {
                    e.to_string()
                } else {
                    format!("0, {e}")
                };
                format!(
                    "    {acc} = 1\n    for {i} in range({range}):\n{}{}",
                    mul_into(rng, acc, b, "        "),
                    ret(rng, acc)
                )
            }
            _ => {
                let c = pick(rng, COUNTERS);
                format!(
                    "    {acc} = 1\n    {c} = {e}\n    while {c} > 0:\n{}        {c} -= 1\n{}",
                    mul_into(rng, acc, b, "        "),
                    ret(rng, acc)
                )
            }
        };
        (format!("{b}, {e}"), body, Arity::Two)
    }

    fn digit_sum<R: Rng + ?Sized>(self, rng: &mut R) -> (String, String, Arity) {
        let p = pick(rng, PARAMS);
        let s = pick(rng, ACCUMULATORS);
        let body = match rng.random_range(0..2) {
            0 => format!(
                "    {s} = 0\n    while {p} > 0:\n{}        {p} = {p} // 10\n{}",
                add_to(rng, s, &format!("{p} % 10"), "        "),
                ret(rng, s)
            ),
            _ => {
                let m = pick(rng, COUNTERS);
                let d = pick(rng, DIGITS);
                format!(
                    "    {s} = 0\n    {m} = {p}\n    while {m} != 0:\n        {d} = {m} % 10\n{}        {m} = {m} // 10\n{}",
                    add_to(rng, s, d, "        "),
                    ret(rng, s)
                )
            }
        };
        (p.into(), body, Arity::One)
    }

    fn fibonacci<R: Rng + ?Sized>(self, rng: &mut R) -> (String, String, Arity) {
        let p = pick(rng, PARAMS);
        let (a, b) = pick_pair(rng, FIB_PAIRS);
        let t = pick(rng, TEMPS);
        let sum = if rng.random_bool(0.3) {
            format!("api.add({a}, {b})")
        } else {
            format!("{a} + {b}")
        };
        let step = format!("        {t} = {sum}\n        {a} = {b}\n        {b} = {t}\n");
        let body = match rng.random_range(0..2) {
            0 => {
                let i = pick(rng, LOOP_VARS);
                format!(
                    "    {a} = 0\n    {b} = 1\n    for {i} in range({p}):\n{step}{}",
                    ret(rng, a)
                )
            }
            _ => {
                let c = pick(rng, &["steps", "counter", "done"]);
                format!(
                    "    {a} = 0\n    {b} = 1\n    {c} = 0\n    while {c} < {p}:\n{step}        {c} += 1\n{}",
                    ret(rng, a)
                )
            }
        };
        (p.into(), body, Arity::One)
    }
}

#[derive(Debug, Clone, Copy)]
enum Arity {
    One,
    Two,
}
