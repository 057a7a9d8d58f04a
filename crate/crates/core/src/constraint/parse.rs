use std::fmt;

use thiserror::Error;

use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty formula")]
    Empty,
    #[error("column {column}: illegal character '{ch}'")]
    Lexical { column: usize, ch: char },
    #[error("column {column}: expected {expected}, found {found}")]
    Syntax {
        column: usize,
        expected: &'static str,
        found: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "identifier \"{s}\""),
            Token::Not => f.write_str("'!'"),
            Token::And => f.write_str("'&'"),
            Token::Or => f.write_str("'|'"),
            Token::Implies => f.write_str("'->'"),
            Token::LParen => f.write_str("'('"),
            Token::RParen => f.write_str("')'"),
            Token::End => f.write_str("end of input"),
        }
    }
}

/// Tokens paired with their 1-based column.
fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    let column = |byte: usize| text[..byte].chars().count() + 1;
    while let Some(&(i, c)) = chars.peek() {
        let tok = match c {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '!' => Token::Not,
            '&' => Token::And,
            '|' => Token::Or,
            '(' => Token::LParen,
            ')' => Token::RParen,
            '-' => {
                chars.next();
                match chars.peek() {
                    Some(&(_, '>')) => Token::Implies,
                    _ => return Err(ParseError::Lexical { column: column(i), ch: '-' }),
                }
            }
            c if c.is_ascii_lowercase() || c == '_' => {
                let mut ident = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' {
                        ident.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push((Token::Ident(ident), column(i)));
                continue;
            }
            other => return Err(ParseError::Lexical { column: column(i), ch: other }),
        };
        chars.next();
        tokens.push((tok, column(i)));
    }
    tokens.push((Token::End, text.chars().count() + 1));
    Ok(tokens)
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
        let tok = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &'static str) -> ParseError {
        let (tok, column) = &self.tokens[self.pos];
        ParseError::Syntax {
            column: *column,
            expected,
            found: tok.to_string(),
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Token::Implies {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Token::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Token::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Token::Not => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Token::LParen => {
                self.bump();
                let inner = self.implication()?;
                if *self.peek() != Token::RParen {
                    return Err(self.error("')'"));
                }
                self.bump();
                Ok(inner)
            }
            Token::Ident(_) => match self.bump() {
                Token::Ident(id) => Ok(Formula::Var(id)),
                _ => unreachable!(),
            },
            _ => Err(self.error("identifier, '!' or '('")),
        }
    }
}

/// Parses one formula.
///
/// Precedence from tightest: `!`, `&`, `|`, `->`. `&` and `|` associate to
/// the left, `->` to the right.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let formula = parser.implication()?;
    if *parser.peek() != Token::End {
        return Err(parser.error("operator or end of input"));
    }
    Ok(formula)
}

/// A formula together with where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFormula {
    /// 1-based line in the constraint file; 0 when not read from a file.
    pub line: usize,
    pub text: String,
    pub formula: Formula,
}

impl From<Formula> for SourceFormula {
    fn from(formula: Formula) -> Self {
        SourceFormula {
            line: 0,
            text: formula.to_string(),
            formula,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {error}")]
pub struct ConstraintFileError {
    pub line: usize,
    pub error: ParseError,
}

/// Parses a constraint file: one formula per line, blank lines and lines
/// starting with `#` ignored.
pub fn parse_constraint_file(text: &str) -> Result<Vec<SourceFormula>, ConstraintFileError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let formula = parse_formula(trimmed).map_err(|error| ConstraintFileError { line: i + 1, error })?;
        out.push(SourceFormula {
            line: i + 1,
            text: trimmed.to_string(),
            formula,
        });
    }
    Ok(out)
}
