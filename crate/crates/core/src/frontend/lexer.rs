use super::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Name(String),
    Int(i64),
    Str(String),
    Op(&'static str),
    Newline,
    Indent,
    Dedent,
    Eof,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub column: u32,
}

const OPS2: [&str; 9] = ["==", "!=", "<=", ">=", "+=", "-=", "*=", "**", "//"];
const OPS1: [&str; 12] = ["(", ")", "[", "]", ",", ":", ".", "=", "+", "-", "*", "<"];
/// Python operators outside the subset.
const UNSUPPORTED_OPS: &str = "/%@&|^~{};";

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    indents: Vec<usize>,
    depth: usize,
    out: Vec<Token>,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut lx = Lexer {
        chars: src.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
        indents: vec![0],
        depth: 0,
        out: Vec::new(),
    };
    lx.run()?;
    Ok(lx.out)
}

impl Lexer {
    fn peek(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn syntax(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: self.col,
            message: message.into(),
        }
    }

    fn push(&mut self, tok: Tok, line: u32, column: u32) {
        self.out.push(Token { tok, line, column });
    }

    fn newline(&mut self) {
        if !matches!(self.out.last().map(|t| &t.tok), None | Some(Tok::Newline)) {
            let (l, c) = (self.line, self.col);
            self.push(Tok::Newline, l, c);
        }
    }

    /// Handles indentation at the start of a logical line. Returns false for
    /// blank and comment-only lines, which are consumed whole.
    fn line_start(&mut self) -> Result<bool, ParseError> {
        let mut width = 0;
        while let Some(c) = self.peek(0) {
            match c {
                ' ' => width += 1,
                '\t' => {
                    return Err(ParseError::Unsupported {
                        line: self.line,
                        column: self.col,
                        construct: "tab indentation".into(),
                    })
                }
                '\r' => {}
                _ => break,
            }
            self.bump();
        }
        match self.peek(0) {
            None => return Ok(false),
            Some('\n') => {
                self.bump();
                return Ok(false);
            }
            Some('#') => {
                while !matches!(self.peek(0), None | Some('\n')) {
                    self.bump();
                }
                self.bump();
                return Ok(false);
            }
            _ => {}
        }
        let top = *self.indents.last().expect("indent stack is never empty");
        if width > top {
            self.indents.push(width);
            let (l, c) = (self.line, self.col);
            self.push(Tok::Indent, l, c);
        } else {
            while width < *self.indents.last().unwrap() {
                self.indents.pop();
                let (l, c) = (self.line, self.col);
                self.push(Tok::Dedent, l, c);
            }
            if width != *self.indents.last().unwrap() {
                return Err(self.syntax("unindent does not match any outer indentation level"));
            }
        }
        Ok(true)
    }

    fn run(&mut self) -> Result<(), ParseError> {
        let mut at_line_start = true;
        loop {
            if at_line_start && self.depth == 0 {
                if self.peek(0).is_none() {
                    break;
                }
                if !self.line_start()? {
                    continue;
                }
                at_line_start = false;
            }
            let (line, column) = (self.line, self.col);
            let Some(c) = self.peek(0) else { break };
            match c {
                ' ' | '\t' | '\r' => {
                    self.bump();
                }
                '\\' if self.peek(1) == Some('\n') => {
                    self.bump();
                    self.bump();
                }
                '#' => {
                    while !matches!(self.peek(0), None | Some('\n')) {
                        self.bump();
                    }
                }
                '\n' => {
                    self.bump();
                    if self.depth == 0 {
                        self.newline();
                        at_line_start = true;
                    }
                }
                '0'..='9' => {
                    let mut text = String::new();
                    while let Some(d) = self
                        .peek(0)
                        .filter(|d| d.is_ascii_alphanumeric() || *d == '_' || *d == '.')
                    {
                        text.push(d);
                        self.bump();
                    }
                    let digits: String = text.chars().filter(|c| *c != '_').collect();
                    if digits.contains('.') || digits.contains('e') || digits.contains('x') {
                        return Err(ParseError::Unsupported {
                            line,
                            column,
                            construct: format!("numeric literal `{text}`"),
                        });
                    }
                    let v = digits.parse::<i64>().map_err(|_| ParseError::Syntax {
                        line,
                        column,
                        message: format!("invalid integer literal `{text}`"),
                    })?;
                    self.push(Tok::Int(v), line, column);
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut name = String::new();
                    while let Some(d) = self
                        .peek(0)
                        .filter(|d| d.is_ascii_alphanumeric() || *d == '_')
                    {
                        name.push(d);
                        self.bump();
                    }
                    if matches!(self.peek(0), Some('\'' | '"')) {
                        return Err(ParseError::Unsupported {
                            line,
                            column,
                            construct: format!("string prefix `{name}`"),
                        });
                    }
                    self.push(Tok::Name(name), line, column);
                }
                '\'' | '"' => {
                    let s = self.string(c)?;
                    self.push(Tok::Str(s), line, column);
                }
                _ => {
                    let two: String = self.chars[self.pos..].iter().take(2).collect();
                    if let Some(op) = OPS2.iter().find(|o| **o == two) {
                        if *op == "**" || *op == "//" {
                            return Err(ParseError::Unsupported {
                                line,
                                column,
                                construct: format!("operator `{op}`"),
                            });
                        }
                        self.bump();
                        self.bump();
                        self.push(Tok::Op(op), line, column);
                        continue;
                    }
                    let one = c.to_string();
                    if let Some(op) = OPS1.iter().find(|o| **o == one) {
                        self.bump();
                        match *op {
                            "(" | "[" => self.depth += 1,
                            ")" | "]" => self.depth = self.depth.saturating_sub(1),
                            _ => {}
                        }
                        self.push(Tok::Op(op), line, column);
                    } else if c == '>' {
                        self.bump();
                        self.push(Tok::Op(">"), line, column);
                    } else if UNSUPPORTED_OPS.contains(c) {
                        return Err(ParseError::Unsupported {
                            line,
                            column,
                            construct: format!("`{c}`"),
                        });
                    } else {
                        return Err(self.syntax(format!("unexpected character `{c}`")));
                    }
                }
            }
        }
        self.newline();
        let (l, c) = (self.line, self.col);
        while self.indents.len() > 1 {
            self.indents.pop();
            self.push(Tok::Dedent, l, c);
        }
        self.push(Tok::Eof, l, c);
        Ok(())
    }

    fn string(&mut self, quote: char) -> Result<String, ParseError> {
        let triple = self.peek(1) == Some(quote) && self.peek(2) == Some(quote);
        let n = if triple { 3 } else { 1 };
        for _ in 0..n {
            self.bump();
        }
        let mut s = String::new();
        loop {
            let Some(c) = self.peek(0) else {
                return Err(self.syntax("unterminated string literal"));
            };
            if c == quote
                && (!triple || (self.peek(1) == Some(quote) && self.peek(2) == Some(quote)))
            {
                for _ in 0..n {
                    self.bump();
                }
                return Ok(s);
            }
            if c == '\n' && !triple {
                return Err(self.syntax("unterminated string literal"));
            }
            self.bump();
            if c == '\\' {
                let e = self
                    .bump()
                    .ok_or_else(|| self.syntax("unterminated string literal"))?;
                match e {
                    'n' => s.push('\n'),
                    't' => s.push('\t'),
                    '\\' | '\'' | '"' => s.push(e),
                    '\n' => {}
                    other => {
                        s.push('\\');
                        s.push(other);
                    }
                }
            } else {
                s.push(c);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn indentation_produces_block_tokens() {
        let t = toks("def f():\n    return 1\n");
        assert_eq!(
            t,
            vec![
                Tok::Name("def".into()),
                Tok::Name("f".into()),
                Tok::Op("("),
                Tok::Op(")"),
                Tok::Op(":"),
                Tok::Newline,
                Tok::Indent,
                Tok::Name("return".into()),
                Tok::Int(1),
                Tok::Newline,
                Tok::Dedent,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn brackets_join_lines_and_comments_vanish() {
        let t = toks("x = f(1,\n      2)  # trailing\n\n# only comment\ny = 'a\\'b'\n");
        assert!(t.contains(&Tok::Str("a'b".into())));
        assert_eq!(t.iter().filter(|t| **t == Tok::Newline).count(), 2);
        assert!(!t.contains(&Tok::Indent));
    }

    #[test]
    fn rejects_bad_input_with_positions() {
        assert_eq!(
            tokenize("x = 1.5\n"),
            Err(ParseError::Unsupported {
                line: 1,
                column: 5,
                construct: "numeric literal `1.5`".into()
            })
        );
        assert!(matches!(
            tokenize("x = 'abc\n"),
            Err(ParseError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            tokenize("if x:\n    y\n  z\n"),
            Err(ParseError::Syntax { line: 3, .. })
        ));
        assert!(matches!(
            tokenize("x = {}\n"),
            Err(ParseError::Unsupported { .. })
        ));
        assert!(matches!(
            tokenize("x = $\n"),
            Err(ParseError::Syntax { .. })
        ));
    }
}
