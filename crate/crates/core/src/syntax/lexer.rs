use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Str(String),
    Number(String),
    /// `.decl`, `.input`, `.output`, ... (without the dot)
    Directive(String),
    Dot,
    Comma,
    Colon,
    LParen,
    RParen,
    If,
    At,
    Bang,
    And,
    Or,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Directive(s) => format!("directive `.{s}`"),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::If => "`:-`".into(),
            Tok::At => "`@`".into(),
            Tok::Bang => "`!`".into(),
            Tok::And => "`/\\`".into(),
            Tok::Or => "`\\/`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    Lexer {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
    }
    .run()
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Lexer {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia()?;
            let (line, column) = (self.line, self.column);
            let Some(c) = self.peek(0) else {
                out.push(Token {
                    tok: Tok::Eof,
                    line,
                    column,
                });
                return Ok(out);
            };
            let tok = match c {
                '.' if self.peek(1).is_some_and(|n| n.is_ascii_alphabetic()) => {
                    self.bump();
                    Tok::Directive(self.ident())
                }
                '.' => self.single(Tok::Dot),
                ',' => self.single(Tok::Comma),
                '(' => self.single(Tok::LParen),
                ')' => self.single(Tok::RParen),
                '@' => self.single(Tok::At),
                '!' => self.single(Tok::Bang),
                ':' if self.peek(1) == Some('-') => {
                    self.bump();
                    self.single(Tok::If)
                }
                ':' => self.single(Tok::Colon),
                '/' if self.peek(1) == Some('\\') => {
                    self.bump();
                    self.single(Tok::And)
                }
                '\\' if self.peek(1) == Some('/') => {
                    self.bump();
                    self.single(Tok::Or)
                }
                '"' => Tok::Str(self.string(line, column)?),
                c if c.is_ascii_digit() => {
                    let mut s = String::new();
                    while let Some(d) = self.peek(0).filter(|d| d.is_ascii_digit()) {
                        s.push(d);
                        self.bump();
                    }
                    Tok::Number(s)
                }
                c if c.is_alphabetic() || c == '_' => Tok::Ident(self.ident()),
                other => {
                    return Err(self.error(line, column, format!("unexpected character `{other}`")))
                }
            };
            out.push(Token { tok, line, column });
        }
    }

    fn single(&mut self, tok: Tok) -> Tok {
        self.bump();
        tok
    }

    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek(0).filter(|c| c.is_alphanumeric() || *c == '_') {
            s.push(c);
            self.bump();
        }
        s
    }

    fn string(&mut self, line: usize, column: usize) -> Result<String, ParseError> {
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(self.error(line, column, "unterminated string")),
                Some('"') => return Ok(s),
                Some('\\') => match self.bump() {
                    Some(c @ ('"' | '\\')) => s.push(c),
                    _ => {
                        return Err(self.error(
                            self.line,
                            self.column,
                            "unsupported escape in string",
                        ))
                    }
                },
                Some(c) => s.push(c),
            }
        }
    }

    fn skip_trivia(&mut self) -> Result<(), ParseError> {
        loop {
            match (self.peek(0), self.peek(1)) {
                (Some(c), _) if c.is_whitespace() => {
                    self.bump();
                }
                (Some('/'), Some('/')) => {
                    while self.peek(0).is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                (Some('/'), Some('*')) => {
                    let (line, column) = (self.line, self.column);
                    self.bump();
                    self.bump();
                    loop {
                        match (self.peek(0), self.peek(1)) {
                            (Some('*'), Some('/')) => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            (Some(_), _) => {
                                self.bump();
                            }
                            (None, _) => {
                                return Err(self.error(line, column, "unterminated block comment"))
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn pc_operators() {
        assert_eq!(
            toks("!A /\\ (B \\/ C)"),
            vec![
                Tok::Bang,
                Tok::Ident("A".into()),
                Tok::And,
                Tok::LParen,
                Tok::Ident("B".into()),
                Tok::Or,
                Tok::Ident("C".into()),
                Tok::RParen,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn directives_and_clause_end() {
        assert_eq!(
            toks(".decl E(a: symbol) // trailing\nE(X).\n/* block\n */"),
            vec![
                Tok::Directive("decl".into()),
                Tok::Ident("E".into()),
                Tok::LParen,
                Tok::Ident("a".into()),
                Tok::Colon,
                Tok::Ident("symbol".into()),
                Tok::RParen,
                Tok::Ident("E".into()),
                Tok::LParen,
                Tok::Ident("X".into()),
                Tok::RParen,
                Tok::Dot,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let t = tokenize("a\n  :- b").unwrap();
        assert_eq!((t[1].line, t[1].column), (2, 3));
    }

    #[test]
    fn bad_character() {
        let err = tokenize("P(x) # q").unwrap_err();
        assert_eq!(
            err,
            ParseError::Syntax {
                line: 1,
                column: 6,
                message: "unexpected character `#`".into()
            }
        );
    }
}
