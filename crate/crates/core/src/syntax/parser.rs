use std::collections::HashSet;

use super::ast::{Atom, Clause, PcExpr, Program, RelationDecl, Term};
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

/// Parses a program: `.decl`/`.input`/`.output` directives, facts and rules,
/// each clause optionally annotated with `@ PC` before its final period.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        anon: 0,
    };
    let mut program = Program::default();
    // directives may name relations declared further down
    let mut io: Vec<(String, bool, usize, usize)> = Vec::new();
    let mut clauses: Vec<(Clause, usize, usize)> = Vec::new();

    while p.peek() != &Tok::Eof {
        let start = p.current().clone();
        match &start.tok {
            Tok::Directive(d) => {
                p.advance();
                match d.as_str() {
                    "decl" => {
                        let decl = p.decl()?;
                        if program.decl(&decl.name).is_some() {
                            return Err(ParseError::DuplicateDeclaration {
                                name: decl.name,
                                line: start.line,
                            });
                        }
                        program.decls.push(decl);
                    }
                    "input" | "output" => {
                        let is_input = d == "input";
                        loop {
                            let tok = p.current().clone();
                            let name = p.ident()?;
                            io.push((name, is_input, tok.line, tok.column));
                            if p.peek() == &Tok::Comma {
                                p.advance();
                            } else {
                                break;
                            }
                        }
                    }
                    other => {
                        return Err(p.error_at(&start, format!("unknown directive `.{other}`")));
                    }
                }
            }
            _ => {
                let clause = p.clause()?;
                clauses.push((clause, start.line, start.column));
            }
        }
    }

    for (name, is_input, line, column) in io {
        let Some(decl) = program.decls.iter_mut().find(|d| d.name == name) else {
            return Err(ParseError::UndeclaredPredicate { name, line, column });
        };
        if is_input {
            decl.input = true;
        } else {
            decl.output = true;
        }
    }

    for (clause, line, column) in clauses {
        check_clause(&program, &clause, line, column)?;
        for f in clause.pc.features() {
            if !program.features.iter().any(|x| x == f) {
                program.features.push(f.to_owned());
            }
        }
        if clause.is_fact() {
            program.facts.push(clause);
        } else {
            program.rules.push(clause);
        }
    }
    program.minimise();
    Ok(program)
}

fn check_clause(
    program: &Program,
    clause: &Clause,
    line: usize,
    column: usize,
) -> Result<(), ParseError> {
    for atom in std::iter::once(&clause.head).chain(&clause.body) {
        let Some(decl) = program.decl(&atom.predicate) else {
            return Err(ParseError::UndeclaredPredicate {
                name: atom.predicate.clone(),
                line,
                column,
            });
        };
        if decl.arity() != atom.args.len() {
            return Err(ParseError::ArityMismatch {
                name: atom.predicate.clone(),
                expected: decl.arity(),
                found: atom.args.len(),
                line,
                column,
            });
        }
    }
    if clause.is_fact() {
        if let Some(v) = clause.head.variables().next() {
            return Err(ParseError::NonGroundFact {
                variable: v.to_owned(),
                line,
                column,
            });
        }
    } else {
        let bound: HashSet<&str> = clause.body.iter().flat_map(|a| a.variables()).collect();
        if let Some(v) = clause.head.variables().find(|v| !bound.contains(v)) {
            return Err(ParseError::UnboundHeadVariable {
                variable: v.to_owned(),
                line,
                column,
            });
        }
    }
    Ok(())
}

/// Parses a stand-alone presence condition. `!` binds tightest, then `/\`,
/// then `\/`; both binary operators associate to the left.
pub fn parse_pc(text: &str) -> Result<PcExpr, ParseError> {
    let tokens = tokenize(text)?;
    if tokens[0].tok == Tok::Eof {
        return Err(ParseError::Syntax {
            line: 1,
            column: 1,
            message: "empty presence condition".into(),
        });
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        anon: 0,
    };
    let e = p.pc()?;
    p.expect(Tok::Eof)?;
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    anon: usize,
}

impl Parser {
    fn current(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, tok: &Token, message: String) -> ParseError {
        ParseError::Syntax {
            line: tok.line,
            column: tok.column,
            message,
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let t = self.current();
        self.error_at(t, format!("expected {wanted}, found {}", t.tok.describe()))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn decl(&mut self) -> Result<RelationDecl, ParseError> {
        let name = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut attributes = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let attr = self.ident()?;
                self.expect(Tok::Colon)?;
                // every attribute is stored as a symbol whatever its type
                self.ident()?;
                attributes.push(attr);
                if *self.peek() == Tok::Comma {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        Ok(RelationDecl {
            name,
            attributes,
            input: false,
            output: false,
        })
    }

    fn clause(&mut self) -> Result<Clause, ParseError> {
        let head = self.atom()?;
        let mut body = Vec::new();
        if *self.peek() == Tok::If {
            self.advance();
            loop {
                body.push(self.atom()?);
                if *self.peek() == Tok::Comma {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        let pc = if *self.peek() == Tok::At {
            self.advance();
            self.pc()?
        } else {
            PcExpr::True
        };
        self.expect(Tok::Dot)?;
        Ok(Clause { head, body, pc })
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let predicate = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                args.push(self.term()?);
                if *self.peek() == Tok::Comma {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        Ok(Atom { predicate, args })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Str(s) | Tok::Number(s) => {
                self.advance();
                Ok(Term::Constant(s))
            }
            Tok::Ident(s) if s == "_" => {
                self.advance();
                self.anon += 1;
                Ok(Term::Variable(format!("_{}", self.anon)))
            }
            Tok::Ident(s) => {
                self.advance();
                if s.starts_with(|c: char| c.is_uppercase()) {
                    Ok(Term::Constant(s))
                } else {
                    Ok(Term::Variable(s))
                }
            }
            _ => Err(self.unexpected("a constant or variable")),
        }
    }

    fn pc(&mut self) -> Result<PcExpr, ParseError> {
        let mut lhs = self.pc_conj()?;
        while *self.peek() == Tok::Or {
            self.advance();
            let rhs = self.pc_conj()?;
            lhs = PcExpr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn pc_conj(&mut self) -> Result<PcExpr, ParseError> {
        let mut lhs = self.pc_unary()?;
        while *self.peek() == Tok::And {
            self.advance();
            let rhs = self.pc_unary()?;
            lhs = PcExpr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn pc_unary(&mut self) -> Result<PcExpr, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.advance();
                Ok(PcExpr::not(self.pc_unary()?))
            }
            Tok::LParen => {
                self.advance();
                let e = self.pc()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) => {
                self.advance();
                Ok(match s.as_str() {
                    "True" => PcExpr::True,
                    "False" => PcExpr::False,
                    _ => PcExpr::Id(s),
                })
            }
            _ => Err(self.unexpected("a presence condition")),
        }
    }
}
