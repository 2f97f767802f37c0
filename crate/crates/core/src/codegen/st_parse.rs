//! Parser for the declaration subset produced by [`emit_st`](super::emit_st):
//! INTERFACE / FUNCTION_BLOCK headers, `name:TYPE;` members, and METHOD
//! declarations with an optional VAR_INPUT block. `(* ... *)` comments are
//! skipped.

use super::model::{BlockSpec, CodegenError, ComponentModel, ErrorKind, Location, Member, SourceLines};
use super::naming::is_keyword;
use crate::component::{InterfaceSpec, OperationSig, Param};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Colon,
    Semi,
    Comma,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(message: impl Into<String>, line: usize, col: usize) -> CodegenError {
    CodegenError::new(ErrorKind::Syntax, message, Location::at(line, col))
}

fn lex(text: &str) -> Result<Vec<Token>, CodegenError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        match c {
            c if c.is_whitespace() => advance(&mut i, &mut line, &mut col, c),
            '(' if chars.get(i + 1) == Some(&'*') => {
                advance(&mut i, &mut line, &mut col, '(');
                advance(&mut i, &mut line, &mut col, '*');
                loop {
                    match chars.get(i) {
                        None => return Err(syntax("unterminated comment", l0, c0)),
                        Some('*') if chars.get(i + 1) == Some(&')') => {
                            advance(&mut i, &mut line, &mut col, '*');
                            advance(&mut i, &mut line, &mut col, ')');
                            break;
                        }
                        Some(&ch) => advance(&mut i, &mut line, &mut col, ch),
                    }
                }
            }
            ':' | ';' | ',' => {
                let tok = match c {
                    ':' => Tok::Colon,
                    ';' => Tok::Semi,
                    _ => Tok::Comma,
                };
                out.push(Token { tok, line: l0, col: c0 });
                advance(&mut i, &mut line, &mut col, c);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(&ch) = chars.get(i) {
                    if ch.is_ascii_alphanumeric() || ch == '_' {
                        ident.push(ch);
                        advance(&mut i, &mut line, &mut col, ch);
                    } else {
                        break;
                    }
                }
                out.push(Token {
                    tok: Tok::Ident(ident),
                    line: l0,
                    col: c0,
                });
            }
            other => return Err(syntax(format!("unexpected character `{other}`"), l0, c0)),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map(|t| (t.line, t.col)).unwrap_or(self.end)
    }

    fn error(&self, message: impl Into<String>) -> CodegenError {
        let (l, c) = self.here();
        syntax(message, l, c)
    }

    fn peek_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Ident(s), .. }) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), CodegenError> {
        if self.peek_keyword(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {kw}")))
        }
    }

    fn punct(&mut self, want: Tok, what: &str) -> Result<(), CodegenError> {
        if self.peek().map(|t| &t.tok) == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{what}`")))
        }
    }

    fn name(&mut self) -> Result<String, CodegenError> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(s), .. }) if !is_keyword(s) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Some(Token { tok: Tok::Ident(s), .. }) => {
                Err(self.error(format!("expected a name, found {s}")))
            }
            _ => Err(self.error("expected a name")),
        }
    }

    /// `name : TYPE ;`
    fn typed(&mut self) -> Result<(String, String), CodegenError> {
        let name = self.name()?;
        self.punct(Tok::Colon, ":")?;
        let ty = self.name()?;
        self.punct(Tok::Semi, ";")?;
        Ok((name, ty))
    }

    fn method(&mut self) -> Result<OperationSig, CodegenError> {
        self.keyword("METHOD")?;
        let name = self.name()?;
        let mut params = Vec::new();
        if self.peek_keyword("VAR_INPUT") {
            self.pos += 1;
            while !self.peek_keyword("END_VAR") {
                let (name, type_name) = self.typed()?;
                params.push(Param { name, type_name });
            }
            self.keyword("END_VAR")?;
        }
        self.keyword("END_METHOD")?;
        Ok(OperationSig { name, params })
    }

    fn interface(&mut self) -> Result<InterfaceSpec, CodegenError> {
        self.keyword("INTERFACE")?;
        let name = self.name()?;
        let mut operations = Vec::new();
        while !self.peek_keyword("END_INTERFACE") {
            if self.peek().is_none() {
                return Err(self.error("expected END_INTERFACE"));
            }
            operations.push(self.method()?);
        }
        self.keyword("END_INTERFACE")?;
        Ok(InterfaceSpec { name, operations })
    }

    fn block(&mut self) -> Result<BlockSpec, CodegenError> {
        self.keyword("FUNCTION_BLOCK")?;
        let mut block = BlockSpec::new(&self.name()?);
        if self.peek_keyword("EXTENDS") {
            self.pos += 1;
            block.extends = Some(self.name()?);
        }
        if self.peek_keyword("IMPLEMENTS") {
            self.pos += 1;
            block.implements.push(self.name()?);
            while self.peek().map(|t| &t.tok) == Some(&Tok::Comma) {
                self.pos += 1;
                block.implements.push(self.name()?);
            }
        }
        loop {
            if self.peek_keyword("END_FUNCTION_BLOCK") {
                self.pos += 1;
                return Ok(block);
            }
            if self.peek().is_none() {
                return Err(self.error("expected END_FUNCTION_BLOCK"));
            }
            if self.peek_keyword("METHOD") {
                let at = self.here();
                let m = self.method()?;
                if !m.params.is_empty() {
                    return Err(syntax("block methods take no VAR_INPUT here", at.0, at.1));
                }
                block.methods.push(m.name);
            } else {
                let (name, type_name) = self.typed()?;
                block.members.push(Member { name, type_name });
            }
        }
    }
}

/// Parses declarations into a model, recording each declaration's line.
/// Names are taken verbatim; no validation beyond the grammar.
pub fn parse_st_raw(text: &str) -> Result<(ComponentModel, SourceLines), CodegenError> {
    let tokens = lex(text)?;
    let lines = text.lines().count().max(1);
    let mut p = Parser {
        tokens,
        pos: 0,
        end: (lines, text.lines().last().map_or(1, |l| l.len() + 1)),
    };
    let mut model = ComponentModel::default();
    let mut src = SourceLines::default();
    while let Some(tok) = p.peek() {
        let line = tok.line;
        if p.peek_keyword("INTERFACE") {
            model.interfaces.push(p.interface()?);
            src.interfaces.push(line);
        } else if p.peek_keyword("FUNCTION_BLOCK") {
            model.blocks.push(p.block()?);
            src.blocks.push(line);
        } else {
            return Err(p.error("expected INTERFACE or FUNCTION_BLOCK"));
        }
    }
    Ok((model, src))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_interface_parses_to_four_methods() {
        let text = "INTERFACE PROCESS2MHSILO_IF\n\
                    METHOD FILLING_COMPLETED END_METHOD\n\
                    METHOD POURING_COMPLETED END_METHOD\n\
                    METHOD HEATING_COMPLETED END_METHOD\n\
                    METHOD MIXING_COMPLETED END_METHOD\n\
                    END_INTERFACE\n";
        let (m, lines) = parse_st_raw(text).unwrap();
        assert_eq!(m.interfaces.len(), 1);
        assert_eq!(m.interfaces[0].operations.len(), 4);
        assert_eq!(lines.interfaces, [1]);
    }

    #[test]
    fn header_spanning_lines_and_comments() {
        let text = "(* port *)\nFUNCTION_BLOCK MHSILO_PROCESS_PORT EXTENDS\r\n\
                    CONTROLLER2PROCESS_PORT IMPLEMENTS MHSILO_IF, X_IF\n\
                    itsPROCESS : PROCESS2MHSILO_IF ;\nEND_FUNCTION_BLOCK";
        let (m, lines) = parse_st_raw(text).unwrap();
        let b = &m.blocks[0];
        assert_eq!(b.extends.as_deref(), Some("CONTROLLER2PROCESS_PORT"));
        assert_eq!(b.implements, ["MHSILO_IF", "X_IF"]);
        assert_eq!(b.members, [Member::new("itsPROCESS", "PROCESS2MHSILO_IF")]);
        assert_eq!(lines.blocks, [2]);
    }

    #[test]
    fn missing_semicolon_reports_position() {
        let text = "FUNCTION_BLOCK A\nitsPROCESS:PROCESS2MHSILO_IF\nEND_FUNCTION_BLOCK\n";
        let err = parse_st_raw(text).unwrap_err();
        assert_eq!(err.kind, ErrorKind::Syntax);
        assert_eq!((err.location.line, err.location.column), (Some(3), Some(1)));
    }

    #[test]
    fn garbage_is_syntax() {
        for text in ["FUNCTION_BLOCK", "INTERFACE A METHOD", "X", "FUNCTION_BLOCK A ... END_FUNCTION_BLOCK", "(* open"] {
            assert_eq!(parse_st_raw(text).unwrap_err().kind, ErrorKind::Syntax, "{text}");
        }
    }
}
