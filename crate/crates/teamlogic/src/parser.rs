//! Lexer and recursive-descent parser for the ASCII formula grammar.
//!
//! Grammar, loosest binding last: `~F`, `F /\ F`, `F \/ F` (tensor),
//! `F || F`, `F -> F` (right-associative), `=(F, ..., F)` dependence atoms,
//! `bot`, `top`, parentheses. The UTF-8 aliases `¬ ∧ ⊗ ∨ →` are accepted on
//! input.

use crate::error::{Error, Result};
use crate::formula::{Formula, Fragment};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Bot,
    Top,
    Tilde,
    Wedge,
    TensorVee,
    OrBar,
    Arrow,
    DepEq,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("identifier `{name}`"),
            Token::Bot => "`bot`".into(),
            Token::Top => "`top`".into(),
            Token::Tilde => "`~`".into(),
            Token::Wedge => "`/\\`".into(),
            Token::TensorVee => "`\\/`".into(),
            Token::OrBar => "`||`".into(),
            Token::Arrow => "`->`".into(),
            Token::DepEq => "`=`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Comma => "`,`".into(),
            Token::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                chars.next();
            }
            '~' | '¬' => {
                chars.next();
                tokens.push((Token::Tilde, pos));
            }
            '∧' => {
                chars.next();
                tokens.push((Token::Wedge, pos));
            }
            '⊗' => {
                chars.next();
                tokens.push((Token::TensorVee, pos));
            }
            '∨' => {
                chars.next();
                tokens.push((Token::OrBar, pos));
            }
            '→' => {
                chars.next();
                tokens.push((Token::Arrow, pos));
            }
            '(' => {
                chars.next();
                tokens.push((Token::LParen, pos));
            }
            ')' => {
                chars.next();
                tokens.push((Token::RParen, pos));
            }
            ',' => {
                chars.next();
                tokens.push((Token::Comma, pos));
            }
            '=' => {
                chars.next();
                tokens.push((Token::DepEq, pos));
            }
            '/' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '\\')) => {
                        chars.next();
                        tokens.push((Token::Wedge, pos));
                    }
                    other => {
                        return Err(Error::Syntax {
                            position: pos,
                            expected: "`/\\`".into(),
                            found: found_char(other.map(|&(_, c)| c)),
                        })
                    }
                }
            }
            '\\' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '/')) => {
                        chars.next();
                        tokens.push((Token::TensorVee, pos));
                    }
                    other => {
                        return Err(Error::Syntax {
                            position: pos,
                            expected: "`\\/`".into(),
                            found: found_char(other.map(|&(_, c)| c)),
                        })
                    }
                }
            }
            '|' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '|')) => {
                        chars.next();
                        tokens.push((Token::OrBar, pos));
                    }
                    other => {
                        return Err(Error::Syntax {
                            position: pos,
                            expected: "`||`".into(),
                            found: found_char(other.map(|&(_, c)| c)),
                        })
                    }
                }
            }
            '-' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '>')) => {
                        chars.next();
                        tokens.push((Token::Arrow, pos));
                    }
                    other => {
                        return Err(Error::Syntax {
                            position: pos,
                            expected: "`->`".into(),
                            found: found_char(other.map(|&(_, c)| c)),
                        })
                    }
                }
            }
            c if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let token = match name.as_str() {
                    "bot" => Token::Bot,
                    "top" => Token::Top,
                    _ => Token::Ident(name),
                };
                tokens.push((token, pos));
            }
            other => {
                return Err(Error::Syntax {
                    position: pos,
                    expected: "a formula token".into(),
                    found: format!("`{other}`"),
                })
            }
        }
    }
    tokens.push((Token::Eof, text.len()));
    Ok(tokens)
}

fn found_char(c: Option<char>) -> String {
    match c {
        Some(c) => format!("`{c}`"),
        None => "end of input".into(),
    }
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> Error {
        let (token, position) = &self.tokens[self.pos];
        Error::Syntax {
            position: *position,
            expected: expected.into(),
            found: token.describe(),
        }
    }

    fn expect(&mut self, token: Token, expected: &str) -> Result<()> {
        if self.peek() == &token {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    // imp := or ('->' imp)?     right-associative
    fn imp(&mut self) -> Result<Formula> {
        let left = self.or()?;
        if self.peek() == &Token::Arrow {
            self.bump();
            let right = self.imp()?;
            Ok(Formula::imp(left, right))
        } else {
            Ok(left)
        }
    }

    // or := tensor ('||' tensor)*
    fn or(&mut self) -> Result<Formula> {
        let mut left = self.tensor()?;
        while self.peek() == &Token::OrBar {
            self.bump();
            let right = self.tensor()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    // tensor := conj ('\/' conj)*
    fn tensor(&mut self) -> Result<Formula> {
        let mut left = self.conj()?;
        while self.peek() == &Token::TensorVee {
            self.bump();
            let right = self.conj()?;
            left = Formula::tensor(left, right);
        }
        Ok(left)
    }

    // conj := unary ('/\' unary)*
    fn conj(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        while self.peek() == &Token::Wedge {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.peek() == &Token::Tilde {
            self.bump();
            let inner = self.unary()?;
            Ok(Formula::neg(inner))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Token::Ident(name) => {
                self.bump();
                Ok(Formula::Var(name))
            }
            Token::Bot => {
                self.bump();
                Ok(Formula::Bot)
            }
            Token::Top => {
                self.bump();
                Ok(Formula::Top)
            }
            Token::LParen => {
                self.bump();
                let inner = self.imp()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::DepEq => {
                self.bump();
                self.expect(Token::LParen, "`(` after `=`")?;
                let mut parts = vec![self.imp()?];
                while self.peek() == &Token::Comma {
                    self.bump();
                    parts.push(self.imp()?);
                }
                self.expect(Token::RParen, "`,` or `)`")?;
                let consequent = parts.pop().expect("at least one dep argument");
                Ok(Formula::dep(parts, consequent))
            }
            _ => Err(self.error("a variable, `bot`, `top`, `~`, `=(` or `(`")),
        }
    }
}

/// Parses a formula; with a fragment given, additionally checks membership
/// and fails with [`Error::Fragment`] on any violation.
pub fn parse(text: &str, fragment: Option<Fragment>) -> Result<Formula> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let formula = parser.imp()?;
    if parser.peek() != &Token::Eof {
        return Err(parser.error("end of input"));
    }
    if let Some(fragment) = fragment {
        let violations = formula.fragment_check(fragment);
        if !violations.is_empty() {
            return Err(Error::Fragment { violations });
        }
    }
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula as F;

    #[test]
    fn parses_basic_connectives() {
        assert_eq!(
            parse("p /\\ ~q", None).unwrap(),
            F::and(F::var("p"), F::neg(F::var("q")))
        );
        assert_eq!(
            parse("=(p, q)", None).unwrap(),
            F::dep(vec![F::var("p")], F::var("q"))
        );
        assert_eq!(parse("=(q)", None).unwrap(), F::dep(vec![], F::var("q")));
    }

    #[test]
    fn precedence_tightest_first() {
        // ~ binds tighter than /\ tighter than \/ tighter than || tighter than ->.
        assert_eq!(
            parse("~p /\\ q \\/ r || s -> t", None).unwrap(),
            F::imp(
                F::or(
                    F::tensor(F::and(F::neg(F::var("p")), F::var("q")), F::var("r")),
                    F::var("s")
                ),
                F::var("t")
            )
        );
    }

    #[test]
    fn implication_is_right_associative() {
        assert_eq!(
            parse("p -> q -> r", None).unwrap(),
            F::imp(F::var("p"), F::imp(F::var("q"), F::var("r")))
        );
    }

    #[test]
    fn utf8_aliases() {
        assert_eq!(parse("¬p ∧ q", None).unwrap(), parse("~p /\\ q", None).unwrap());
        assert_eq!(parse("p ⊗ q", None).unwrap(), parse("p \\/ q", None).unwrap());
        assert_eq!(parse("p ∨ q", None).unwrap(), parse("p || q", None).unwrap());
        assert_eq!(parse("p → q", None).unwrap(), parse("p -> q", None).unwrap());
    }

    #[test]
    fn keywords_are_not_identifiers() {
        assert_eq!(parse("bot", None).unwrap(), F::Bot);
        assert_eq!(parse("top", None).unwrap(), F::Top);
        // ...but identifiers may contain them.
        assert_eq!(parse("bottom", None).unwrap(), F::var("bottom"));
    }

    #[test]
    fn fragment_gate() {
        assert!(parse("~~p -> p", Some(Fragment::InqL)).is_ok());
        let err = parse("~~p -> p", Some(Fragment::Pd)).unwrap_err();
        assert!(matches!(err, Error::Fragment { .. }));
    }

    #[test]
    fn syntax_errors_carry_position_and_expectation() {
        match parse("p /\\", None) {
            Err(Error::Syntax { position, expected, .. }) => {
                assert_eq!(position, 4);
                assert!(expected.contains("variable"));
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(parse("p q", None).is_err());
        assert!(parse("=(", None).is_err());
        assert!(parse("", None).is_err());
    }

    #[test]
    fn dep_arguments_are_full_formulas() {
        assert_eq!(
            parse("=(p -> q, r)", None).unwrap(),
            F::dep(vec![F::imp(F::var("p"), F::var("q"))], F::var("r"))
        );
    }
}
