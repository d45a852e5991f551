//! Text grammar shared by polynomials, Weyl expressions and matrices.
//!
//! ```text
//! sum    := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := ('-' | '+') factor | atom ('^' integer)?
//! atom   := integer ('/' integer)? | variable | '(' sum ')'
//! matrix := '[' row (',' row)* ']' | sum
//! row    := '[' sum (',' sum)* ']'
//! ```
//! Whitespace is insignificant. Columns in errors are 1-based character
//! positions in the input.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{MatrixDV, PolyDV, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at column {}", self.message, self.column)
    }
}

/// Parsed expression tree; variables are single characters.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    Var(char),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, usize),
}

pub(crate) struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    vars: &'a [char],
}

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &str, vars: &'a [char]) -> Self {
        Parser {
            chars: src.chars().collect(),
            pos: 0,
            vars,
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    pub(crate) fn finish(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(']') => Err(self.err("unbalanced bracket: unexpected ']'")),
            Some(')') => Err(self.err("unbalanced parenthesis: unexpected ')'")),
            Some(c) => Err(self.err(format!("unexpected character '{c}'"))),
        }
    }

    pub(crate) fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some('-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.factor()
            }
            _ => {
                let base = self.atom()?;
                if self.peek() == Some('^') {
                    self.pos += 1;
                    self.skip_ws();
                    let e = self.integer()?;
                    let e: usize = e
                        .try_into()
                        .map_err(|_| self.err("exponent too large"))?;
                    Ok(Expr::Pow(Box::new(base), e))
                } else {
                    Ok(base)
                }
            }
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        Ok(s.parse().expect("digits parse as integer"))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                match self.peek() {
                    Some(')') => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => Err(self.err("unbalanced parenthesis: expected ')'")),
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                if self.chars.get(self.pos) == Some(&'/') {
                    self.pos += 1;
                    let den = self.integer()?;
                    if den.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    Ok(Expr::Num(Rational::new(num, den)))
                } else {
                    Ok(Expr::Num(Rational::from_integer(num)))
                }
            }
            Some(c) if self.vars.contains(&c) => {
                self.pos += 1;
                Ok(Expr::Var(c))
            }
            Some(c) => Err(self.err(format!("unexpected character '{c}'"))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    /// Parses a bracketed square matrix (or a bare 1x1 entry), handing each
    /// entry to `entry`.
    pub(crate) fn matrix<T>(
        &mut self,
        mut entry: impl FnMut(&Expr) -> T,
    ) -> Result<Vec<Vec<T>>, ParseError> {
        if self.peek() != Some('[') {
            let e = self.sum()?;
            return Ok(vec![vec![entry(&e)]]);
        }
        let outer_open = self.pos;
        self.pos += 1;
        let mut rows = Vec::new();
        loop {
            if self.peek() != Some('[') {
                return Err(self.err("expected '[' to open a matrix row"));
            }
            let row_open = self.pos;
            self.pos += 1;
            let mut row = Vec::new();
            loop {
                let e = self.sum()?;
                row.push(entry(&e));
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(']') => {
                        self.pos += 1;
                        break;
                    }
                    _ => {
                        return Err(ParseError {
                            column: self.pos + 1,
                            message: format!(
                                "unbalanced bracket: row opened at column {} is not closed",
                                row_open + 1
                            ),
                        })
                    }
                }
            }
            rows.push(row);
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(']') => {
                    self.pos += 1;
                    break;
                }
                _ => {
                    return Err(ParseError {
                        column: self.pos + 1,
                        message: format!(
                            "unbalanced bracket: matrix opened at column {} is not closed",
                            outer_open + 1
                        ),
                    })
                }
            }
        }
        let n = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(ParseError {
                column: outer_open + 1,
                message: format!(
                    "matrix is not square: row {} has {} entries, expected {}",
                    bad + 1,
                    rows[bad].len(),
                    n
                ),
            });
        }
        Ok(rows)
    }
}

fn eval_commutative(e: &Expr) -> PolyDV {
    match e {
        Expr::Num(q) => PolyDV::constant(q.clone()),
        Expr::Var('D') => PolyDV::d(),
        Expr::Var(_) => PolyDV::v(),
        Expr::Add(a, b) => eval_commutative(a) + eval_commutative(b),
        Expr::Sub(a, b) => eval_commutative(a) - eval_commutative(b),
        Expr::Mul(a, b) => eval_commutative(a) * eval_commutative(b),
        Expr::Neg(a) => -eval_commutative(a),
        Expr::Pow(a, k) => eval_commutative(a).pow(*k),
    }
}

const DV_VARS: &[char] = &['D', 'v'];

/// Parses a polynomial in `D` and `v`.
pub fn parse_poly(src: &str) -> Result<PolyDV, ParseError> {
    let mut p = Parser::new(src, DV_VARS);
    let e = p.sum()?;
    p.finish()?;
    Ok(eval_commutative(&e))
}

/// Parses `[[p11, p12],[p21, p22]]`; a bare polynomial is read as 1x1.
pub fn parse_matrix(src: &str) -> Result<MatrixDV, ParseError> {
    let mut p = Parser::new(src, DV_VARS);
    let rows = p.matrix(eval_commutative)?;
    p.finish()?;
    Ok(MatrixDV::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    #[test]
    fn literals_and_precedence() {
        let p = parse_poly("-5/2 + 2*v^2*D - (v - D)^2").unwrap();
        let expected = PolyDV::constant(ratio(-5, 2)) + PolyDV::monomial(1, 2, ratio(2, 1))
            - PolyDV::v_minus_d_pow(2);
        assert_eq!(p, expected);
    }

    #[test]
    fn whitespace_insignificant() {
        assert_eq!(parse_poly(" v ^ 2 +D").unwrap(), parse_poly("v^2+D").unwrap());
    }

    #[test]
    fn matrix_forms() {
        let m = parse_matrix("[[v, 1],[0, D]]").unwrap();
        assert_eq!(m.size(), 2);
        assert_eq!(m.get(1, 1), &PolyDV::d());
        assert_eq!(parse_matrix("v").unwrap(), parse_matrix("[[v]]").unwrap());
        assert_eq!(m.to_string(), "[[v, 1],[0, D]]");
    }

    #[test]
    fn unbalanced_bracket_reports_column() {
        let err = parse_matrix("[[v]").unwrap_err();
        assert!(err.message.contains("unbalanced bracket"), "{err}");
        assert_eq!(err.column, 5);
        let err = parse_matrix("[[v]]]").unwrap_err();
        assert!(err.message.contains("unbalanced bracket"));
        assert_eq!(err.column, 6);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_poly("v +").is_err());
        assert!(parse_poly("x").is_err());
        assert!(parse_poly("1/0").is_err());
        assert!(parse_matrix("[[v, 1],[0]]").is_err());
    }
}
