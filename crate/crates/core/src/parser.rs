//! Text syntax for group words.
//!
//! ```text
//! expr     := factor+                      products; '*' or whitespace joins
//! factor   := primary ('^' exponent)*     left associative
//! primary  := '1' | name | '(' expr ')' | '[' expr ',' expr ']'
//! exponent := int | name | '(' expexpr ')'
//! expexpr  := ['+'|'-'] term (('+'|'-') term)*
//! term     := int ['*'] conj* | conj+
//! conj     := factor                       name, parenthesis or bracket
//! ```
//!
//! `g^h` is the conjugate `h^-1 g h`, `[g, h]` the commutator
//! `g^-1 h^-1 g h`, and a sum in the exponent is read as a group-ring
//! element: `g^(2t - u)` means `(g^2)^t (g^-1)^u`, factors in the order the
//! terms are written. Names are `[A-Za-z][A-Za-z0-9_]*` and `1` is the
//! identity.

use crate::word::{Gen, GroupWord, ReduceMode, StateId};
use crate::Error;

/// Names for the letters words are written in, with the reduction rule they
/// carry. Independent of any automaton so that presentation text over
/// abstract generators parses with the same grammar.
#[derive(Clone, Debug)]
pub struct SymbolTable {
    names: Vec<String>,
    mode: ReduceMode,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl SymbolTable {
    pub fn new<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        mode: ReduceMode,
    ) -> Result<SymbolTable, Error> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if !valid_name(n) {
                return Err(Error::BadStateName(n.clone()));
            }
            if names[..i].contains(n) {
                return Err(Error::DuplicateState(n.clone()));
            }
        }
        if names.len() > u16::MAX as usize {
            return Err(Error::TooManyStates(names.len()));
        }
        Ok(SymbolTable { names, mode })
    }

    pub fn from_spec(spec: &crate::automaton::AutomatonSpec) -> SymbolTable {
        SymbolTable { names: spec.state_names(), mode: spec.mode() }
    }

    pub fn id(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name).map(|i| StateId(i as u16))
    }

    pub fn name(&self, id: StateId) -> &str {
        &self.names[id.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn mode(&self) -> ReduceMode {
        self.mode
    }
}

pub fn parse_word(text: &str, table: &SymbolTable) -> Result<GroupWord, Error> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0, table };
    p.skip_ws();
    if p.peek().is_none() {
        return Err(p.error("empty word"));
    }
    let w = p.parse_expr()?;
    p.skip_ws();
    match p.peek() {
        None => Ok(w),
        Some(c) => Err(p.error(&format!("unexpected `{}`", c as char))),
    }
}

pub fn format_word(w: &GroupWord, table: &SymbolTable) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    w.gens()
        .iter()
        .map(|g| {
            let name = table.name(g.state);
            if g.inverse {
                format!("{name}^-1")
            } else {
                name.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    table: &'a SymbolTable,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), Error> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn starts_factor(c: u8) -> bool {
        c.is_ascii_alphabetic() || c == b'(' || c == b'[' || c == b'1'
    }

    fn parse_expr(&mut self) -> Result<GroupWord, Error> {
        let mode = self.table.mode();
        let mut acc = self.parse_factor()?;
        loop {
            self.skip_ws();
            if self.eat(b'*') {
                self.skip_ws();
            }
            match self.peek() {
                Some(c) if Self::starts_factor(c) => {
                    acc = acc.concat(&self.parse_factor()?, mode);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<GroupWord, Error> {
        let mut base = self.parse_primary()?;
        loop {
            self.skip_ws();
            if self.eat(b'^') {
                base = self.parse_exponent(&base)?;
            } else {
                return Ok(base);
            }
        }
    }

    fn parse_primary(&mut self) -> Result<GroupWord, Error> {
        self.skip_ws();
        let mode = self.table.mode();
        match self.peek() {
            Some(b'1') => {
                self.pos += 1;
                Ok(GroupWord::identity())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parse_expr()?;
                self.skip_ws();
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b'[') => {
                self.pos += 1;
                let lhs = self.parse_expr()?;
                self.skip_ws();
                self.expect(b',')?;
                let rhs = self.parse_expr()?;
                self.skip_ws();
                self.expect(b']')?;
                Ok(GroupWord::commutator(&lhs, &rhs, mode))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.parse_name();
                match self.table.id(&name) {
                    Some(id) => Ok(GroupWord::single(Gen::plain(id), mode)),
                    None => Err(Error::UnknownGenerator(name)),
                }
            }
            _ => Err(self.error("expected a generator, `(`, `[` or `1`")),
        }
    }

    fn parse_name(&mut self) -> String {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned()
    }

    fn parse_uint(&mut self) -> Result<i64, Error> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<i64>().ok())
            .ok_or_else(|| self.error("exponent out of range"))
    }

    fn parse_exponent(&mut self, base: &GroupWord) -> Result<GroupWord, Error> {
        self.skip_ws();
        let mode = self.table.mode();
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                let k = self.parse_uint()?;
                Ok(base.pow(-k, mode))
            }
            Some(c) if c.is_ascii_digit() => Ok(base.pow(self.parse_uint()?, mode)),
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.parse_name();
                match self.table.id(&name) {
                    Some(id) => {
                        Ok(base.conjugated(&GroupWord::single(Gen::plain(id), mode), mode))
                    }
                    None => Err(Error::UnknownGenerator(name)),
                }
            }
            Some(b'(') => {
                self.pos += 1;
                let value = self.parse_exp_expr(base)?;
                self.skip_ws();
                self.expect(b')')?;
                Ok(value)
            }
            _ => Err(self.error("expected an integer, a generator or `(` after `^`")),
        }
    }

    fn parse_exp_expr(&mut self, base: &GroupWord) -> Result<GroupWord, Error> {
        let mode = self.table.mode();
        let mut acc = GroupWord::identity();
        self.skip_ws();
        let mut sign: i64 = if self.eat(b'-') {
            -1
        } else {
            self.eat(b'+');
            1
        };
        loop {
            let term = self.parse_exp_term(base, sign)?;
            acc = acc.concat(&term, mode);
            self.skip_ws();
            if self.eat(b'+') {
                sign = 1;
            } else if self.eat(b'-') {
                sign = -1;
            } else {
                return Ok(acc);
            }
        }
    }

    /// One group-ring summand `k * u`: the factor `(base^k)^u`.
    fn parse_exp_term(&mut self, base: &GroupWord, sign: i64) -> Result<GroupWord, Error> {
        let mode = self.table.mode();
        self.skip_ws();
        let mut coeff: i64 = 1;
        let mut saw_coeff = false;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            coeff = self.parse_uint()?;
            saw_coeff = true;
            self.skip_ws();
            self.eat(b'*');
        }
        let mut conj = GroupWord::identity();
        let mut saw_conj = false;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_ascii_alphabetic() || c == b'(' || c == b'[' => {
                    conj = conj.concat(&self.parse_factor()?, mode);
                    saw_conj = true;
                }
                _ => break,
            }
        }
        if !saw_coeff && !saw_conj {
            return Err(self.error("empty exponent term"));
        }
        let powered = base.pow(sign * coeff, mode);
        if saw_conj {
            Ok(powered.conjugated(&conj, mode))
        } else {
            Ok(powered)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> SymbolTable {
        SymbolTable::new(["a1", "a2"], ReduceMode::Signed).unwrap()
    }

    fn free() -> SymbolTable {
        SymbolTable::new(["a", "t"], ReduceMode::Signed).unwrap()
    }

    fn names(w: &GroupWord, t: &SymbolTable) -> String {
        format_word(w, t)
    }

    #[test]
    fn products_and_inverses() {
        let t = table();
        assert_eq!(names(&parse_word("a1 a2^-1", &t).unwrap(), &t), "a1 a2^-1");
        assert_eq!(names(&parse_word("a1*a2", &t).unwrap(), &t), "a1 a2");
        assert_eq!(names(&parse_word("a1 a1^-1", &t).unwrap(), &t), "1");
        assert_eq!(names(&parse_word("1", &t).unwrap(), &t), "1");
        assert_eq!(names(&parse_word("a1^3", &t).unwrap(), &t), "a1 a1 a1");
        assert_eq!(names(&parse_word("(a1 a2)^-1", &t).unwrap(), &t), "a2^-1 a1^-1");
    }

    #[test]
    fn conjugation_and_commutators() {
        let t = table();
        assert_eq!(names(&parse_word("a2^a1", &t).unwrap(), &t), "a1^-1 a2 a1");
        assert_eq!(
            names(&parse_word("[a1, a2]", &t).unwrap(), &t),
            "a1^-1 a2^-1 a1 a2"
        );
        assert_eq!(
            names(&parse_word("a2^(a1 a1)", &t).unwrap(), &t),
            "a1^-1 a1^-1 a2 a1 a1"
        );
        // Left associative towers: (a2^a1)^a1.
        assert_eq!(
            names(&parse_word("a2^a1^a1", &t).unwrap(), &t),
            "a1^-1 a1^-1 a2 a1 a1"
        );
    }

    #[test]
    fn group_ring_exponents() {
        let t = free();
        // a^t (a^2)^(t^2) a^-1 with the middle t t^-1 cancelled.
        assert_eq!(
            names(&parse_word("a^(t + 2*t^2 - 1)", &t).unwrap(), &t),
            "t^-1 a t^-1 a a t t a^-1"
        );
        assert_eq!(names(&parse_word("a^(2t)", &t).unwrap(), &t), "t^-1 a a t");
        assert_eq!(names(&parse_word("a^(-t + 2)", &t).unwrap(), &t), "t^-1 a^-1 t a a");
        assert_eq!(names(&parse_word("a^(t^2)", &t).unwrap(), &t), "t^-1 t^-1 a t t");
    }

    #[test]
    fn involutive_tables_collapse_squares() {
        let t = SymbolTable::new(["b1", "a1"], ReduceMode::Involutive).unwrap();
        assert_eq!(names(&parse_word("b1 b1", &t).unwrap(), &t), "1");
        assert_eq!(names(&parse_word("b1^-1", &t).unwrap(), &t), "b1");
        assert_eq!(names(&parse_word("(b1 a1)^2", &t).unwrap(), &t), "b1 a1 b1 a1");
    }

    #[test]
    fn errors_carry_a_position() {
        let t = table();
        match parse_word("a1 )", &t) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(parse_word("zz", &t), Err(Error::UnknownGenerator(n)) if n == "zz"));
        assert!(matches!(parse_word("", &t), Err(Error::Parse { .. })));
        assert!(matches!(parse_word("a1^", &t), Err(Error::Parse { .. })));
        assert!(matches!(parse_word("a1^()", &t), Err(Error::Parse { .. })));
        assert!(matches!(parse_word("[a1 a2]", &t), Err(Error::Parse { .. })));
    }

    #[test]
    fn format_round_trips_through_parse() {
        let t = table();
        for text in ["a1 a2 a1^-1", "a1 a1 a2^-1 a2^-1", "a2"] {
            let w = parse_word(text, &t).unwrap();
            assert_eq!(parse_word(&format_word(&w, &t), &t).unwrap(), w);
        }
    }

    #[test]
    fn symbol_table_rejects_bad_names() {
        assert!(matches!(
            SymbolTable::new(["1x"], ReduceMode::Signed),
            Err(Error::BadStateName(_))
        ));
        assert!(matches!(
            SymbolTable::new(["a", "a"], ReduceMode::Signed),
            Err(Error::DuplicateState(_))
        ));
    }
}
