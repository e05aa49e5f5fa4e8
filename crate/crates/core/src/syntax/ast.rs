use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Constant(String),
    Variable(String),
}

impl Term {
    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    pub fn text(&self) -> &str {
        match self {
            Term::Constant(s) | Term::Variable(s) => s,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable(v) => f.write_str(v),
            Term::Constant(c) if is_bare_constant(c) => f.write_str(c),
            Term::Constant(c) => write!(f, "\"{c}\""),
        }
    }
}

// Constants that lex back as constants without quoting.
fn is_bare_constant(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_uppercase() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        Some(c) if c.is_ascii_digit() => chars.all(|c| c.is_ascii_digit()),
        _ => false,
    }
    // reserved PC words are never atom arguments, so no clash here
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_variable())
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Variable(v) => Some(v.as_str()),
            Term::Constant(_) => None,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

/// A presence condition as written in source text.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PcExpr {
    True,
    False,
    Id(String),
    Not(Box<PcExpr>),
    And(Box<PcExpr>, Box<PcExpr>),
    Or(Box<PcExpr>, Box<PcExpr>),
}

impl PcExpr {
    pub fn id(name: impl Into<String>) -> Self {
        PcExpr::Id(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: PcExpr) -> Self {
        PcExpr::Not(Box::new(e))
    }

    pub fn and(a: PcExpr, b: PcExpr) -> Self {
        PcExpr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: PcExpr, b: PcExpr) -> Self {
        PcExpr::Or(Box::new(a), Box::new(b))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, PcExpr::True)
    }

    /// Evaluates the formula directly, looking features up through `value`.
    pub fn eval(&self, value: &impl Fn(&str) -> bool) -> bool {
        match self {
            PcExpr::True => true,
            PcExpr::False => false,
            PcExpr::Id(name) => value(name),
            PcExpr::Not(e) => !e.eval(value),
            PcExpr::And(a, b) => a.eval(value) && b.eval(value),
            PcExpr::Or(a, b) => a.eval(value) || b.eval(value),
        }
    }

    /// Feature names in order of first occurrence.
    pub fn features(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_features(&mut out);
        out
    }

    fn collect_features<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            PcExpr::True | PcExpr::False => {}
            PcExpr::Id(name) => {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
            PcExpr::Not(e) => e.collect_features(out),
            PcExpr::And(a, b) | PcExpr::Or(a, b) => {
                a.collect_features(out);
                b.collect_features(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            PcExpr::Or(..) => 1,
            PcExpr::And(..) => 2,
            PcExpr::Not(_) => 3,
            _ => 4,
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Prints with `!`, `/\` and `\/`, parenthesizing only where precedence or
/// left associativity would otherwise change the tree.
impl fmt::Display for PcExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PcExpr::True => f.write_str("True"),
            PcExpr::False => f.write_str("False"),
            PcExpr::Id(name) => f.write_str(name),
            PcExpr::Not(e) => {
                f.write_str("!")?;
                e.fmt_operand(f, 3)
            }
            PcExpr::And(a, b) => {
                a.fmt_operand(f, 2)?;
                f.write_str(" /\\ ")?;
                b.fmt_operand(f, 3)
            }
            PcExpr::Or(a, b) => {
                a.fmt_operand(f, 1)?;
                f.write_str(" \\/ ")?;
                b.fmt_operand(f, 2)
            }
        }
    }
}

/// A fact (empty body) or rule, with its presence condition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Atom>,
    pub pc: PcExpr,
}

impl Clause {
    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    /// The clause with variables renamed `_0`, `_1`, ... in order of first
    /// occurrence. Clauses that differ only by a variable renaming share a
    /// canonical form; the presence condition is kept as written.
    pub fn canonical(&self) -> Clause {
        let mut names: HashMap<String, String> = HashMap::new();
        let mut rename = |atom: &Atom| Atom {
            predicate: atom.predicate.clone(),
            args: atom
                .args
                .iter()
                .map(|t| match t {
                    Term::Variable(v) => {
                        let n = names.len();
                        Term::Variable(
                            names
                                .entry(v.clone())
                                .or_insert_with(|| format!("_{n}"))
                                .clone(),
                        )
                    }
                    c => c.clone(),
                })
                .collect(),
        };
        let head = rename(&self.head);
        let body = self.body.iter().map(&mut rename).collect();
        Clause {
            head,
            body,
            pc: self.pc.clone(),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            for (i, a) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
        }
        if !self.pc.is_true() {
            write!(f, " @ {}", self.pc)?;
        }
        f.write_str(".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationDecl {
    pub name: String,
    pub attributes: Vec<String>,
    pub input: bool,
    pub output: bool,
}

impl RelationDecl {
    pub fn arity(&self) -> usize {
        self.attributes.len()
    }
}

/// A parsed program: relation declarations, rules, and inline facts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub decls: Vec<RelationDecl>,
    pub rules: Vec<Clause>,
    pub facts: Vec<Clause>,
    /// Feature names in order of first appearance in any presence condition.
    pub features: Vec<String>,
}

impl Program {
    pub fn decl(&self, name: &str) -> Option<&RelationDecl> {
        self.decls.iter().find(|d| d.name == name)
    }

    pub fn inputs(&self) -> impl Iterator<Item = &RelationDecl> {
        self.decls.iter().filter(|d| d.input)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &RelationDecl> {
        self.decls.iter().filter(|d| d.output)
    }

    /// Drops clauses that repeat an earlier clause up to variable renaming.
    /// Clauses whose presence conditions differ syntactically are kept apart.
    pub fn minimise(&mut self) {
        fn dedup(clauses: &mut Vec<Clause>) {
            let mut seen = std::collections::HashSet::new();
            clauses.retain(|c| seen.insert(c.canonical()));
        }
        dedup(&mut self.rules);
        dedup(&mut self.facts);
    }

    /// Copy of the program with every presence condition replaced by `True`.
    pub fn without_pcs(&self) -> Program {
        let strip = |cs: &[Clause]| -> Vec<Clause> {
            cs.iter()
                .map(|c| Clause {
                    pc: PcExpr::True,
                    ..c.clone()
                })
                .collect()
        };
        Program {
            decls: self.decls.clone(),
            rules: strip(&self.rules),
            facts: strip(&self.facts),
            features: Vec::new(),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            let attrs: Vec<String> = d
                .attributes
                .iter()
                .map(|a| format!("{a}: symbol"))
                .collect();
            writeln!(f, ".decl {}({})", d.name, attrs.join(", "))?;
            if d.input {
                writeln!(f, ".input {}", d.name)?;
            }
            if d.output {
                writeln!(f, ".output {}", d.name)?;
            }
        }
        for c in self.facts.iter().chain(&self.rules) {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
