//! Surface syntax: Datalog clauses with optional `@ PC` annotations, and
//! stand-alone presence conditions as they appear in fact files.
//!
//! Feature names are kept out of the Datalog symbol space entirely. A program
//! records the features it mentions in [`Program::features`]; they only
//! become BDD variables when a presence condition is compiled with
//! [`pc_to_bdd`].

mod ast;
mod lexer;
mod parser;

pub use ast::{Atom, Clause, PcExpr, Program, RelationDecl, Term};
pub use parser::{parse_pc, parse_program};

use thiserror::Error;

use crate::pcbdd::{BddManager, PresenceCondition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: undeclared relation `{name}`")]
    UndeclaredPredicate {
        name: String,
        line: usize,
        column: usize,
    },
    #[error(
        "{line}:{column}: relation `{name}` has arity {expected}, used with {found} arguments"
    )]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
        line: usize,
        column: usize,
    },
    #[error("{line}:{column}: head variable `{variable}` does not occur in the rule body")]
    UnboundHeadVariable {
        variable: String,
        line: usize,
        column: usize,
    },
    #[error("{line}:{column}: fact contains variable `{variable}`")]
    NonGroundFact {
        variable: String,
        line: usize,
        column: usize,
    },
    #[error("line {line}: relation `{name}` declared twice")]
    DuplicateDeclaration { name: String, line: usize },
}

/// Compiles a syntactic presence condition into the manager, registering any
/// unseen feature names in order of occurrence.
pub fn pc_to_bdd(e: &PcExpr, mgr: &mut BddManager) -> PresenceCondition {
    match e {
        PcExpr::True => mgr.pc_true(),
        PcExpr::False => mgr.pc_false(),
        PcExpr::Id(name) => mgr.mk_var(name),
        PcExpr::Not(inner) => {
            let a = pc_to_bdd(inner, mgr);
            mgr.not(a)
        }
        PcExpr::And(a, b) => {
            let a = pc_to_bdd(a, mgr);
            let b = pc_to_bdd(b, mgr);
            mgr.and(a, b)
        }
        PcExpr::Or(a, b) => {
            let a = pc_to_bdd(a, mgr);
            let b = pc_to_bdd(b, mgr);
            mgr.or(a, b)
        }
    }
}

/// Registers every feature of the program with the manager, in text order.
pub fn register_features(program: &Program, mgr: &mut BddManager) {
    for f in &program.features {
        mgr.register_feature(f);
    }
}

/// Prints a presence condition as a sum of products over its BDD paths,
/// e.g. `Sea`, `!Land`, `Air /\ !Sea \/ Land`. Constants print as `True` and
/// `False`.
pub fn print_pc(pc: PresenceCondition, mgr: &BddManager) -> String {
    if pc.is_true() {
        return "True".into();
    }
    if pc.is_false() {
        return "False".into();
    }
    let features = mgr.features();
    mgr.cubes(pc)
        .iter()
        .map(|cube| {
            cube.iter()
                .map(|&(var, positive)| {
                    let name = features.name(var);
                    if positive {
                        name.to_owned()
                    } else {
                        format!("!{name}")
                    }
                })
                .collect::<Vec<_>>()
                .join(" /\\ ")
        })
        .collect::<Vec<_>>()
        .join(" \\/ ")
}

/// Prints a syntactic presence condition; the result parses back to the same
/// tree.
pub fn print_pc_expr(e: &PcExpr) -> String {
    e.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FEATURES: [&str; 4] = ["A", "B", "C", "D"];

    fn arb_pc() -> impl Strategy<Value = PcExpr> {
        let leaf = prop_oneof![
            Just(PcExpr::True),
            Just(PcExpr::False),
            (0..FEATURES.len()).prop_map(|i| PcExpr::id(FEATURES[i])),
        ];
        leaf.prop_recursive(5, 32, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(PcExpr::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| PcExpr::and(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| PcExpr::or(a, b)),
            ]
        })
    }

    #[test]
    fn compile_examples() {
        let mut m = BddManager::new();
        assert_eq!(pc_to_bdd(&PcExpr::True, &mut m), m.pc_true());
        let e = parse_pc("Land /\\ !Land").unwrap();
        assert_eq!(pc_to_bdd(&e, &mut m), m.pc_false());

        let fm = parse_pc(
            "(Air \\/ Land \\/ Sea) /\\ !(Air /\\ Land) /\\ !(Land /\\ Sea) /\\ !(Sea /\\ Air)",
        )
        .unwrap();
        let fm = pc_to_bdd(&fm, &mut m);
        assert_eq!(m.sat_count(fm), 3);
    }

    #[test]
    fn structurally_equal_exprs_share_handle() {
        let mut m = BddManager::new();
        let e = parse_pc("A /\\ (B \\/ !C)").unwrap();
        let a = pc_to_bdd(&e, &mut m);
        let b = pc_to_bdd(&e.clone(), &mut m);
        assert_eq!(a, b);
    }

    #[test]
    fn print_examples() {
        let mut m = BddManager::new();
        assert_eq!(print_pc(m.pc_true(), &m), "True");
        assert_eq!(print_pc(m.pc_false(), &m), "False");
        assert_eq!(print_pc_expr(&PcExpr::not(PcExpr::id("Land"))), "!Land");
        let land = m.mk_var("Land");
        let nl = m.not(land);
        assert_eq!(print_pc(nl, &m), "!Land");
        let sea = m.mk_var("Sea");
        let both = m.and(nl, sea);
        assert_eq!(print_pc(both, &m), "!Land /\\ Sea");
    }

    #[test]
    fn expr_printing_keeps_needed_parens() {
        for src in [
            "A \\/ B /\\ C",
            "(A \\/ B) /\\ C",
            "!(A /\\ B)",
            "A /\\ (B /\\ C)",
            "A \\/ (B \\/ C)",
            "!!A",
        ] {
            let e = parse_pc(src).unwrap();
            assert_eq!(parse_pc(&print_pc_expr(&e)).unwrap(), e, "{src}");
        }
        assert_eq!(
            print_pc_expr(&parse_pc("(A \\/ B) /\\ C").unwrap()),
            "(A \\/ B) /\\ C"
        );
        assert_eq!(
            print_pc_expr(&parse_pc("A \\/ B /\\ C").unwrap()),
            "A \\/ B /\\ C"
        );
    }

    proptest! {
        #[test]
        fn expr_round_trip_is_structural(e in arb_pc()) {
            prop_assert_eq!(parse_pc(&print_pc_expr(&e)).unwrap(), e);
        }

        #[test]
        fn bdd_print_round_trip_is_node_identical(e in arb_pc()) {
            let mut m = BddManager::new();
            for f in FEATURES {
                m.register_feature(f);
            }
            let pc = pc_to_bdd(&e, &mut m);
            let printed = print_pc(pc, &m);
            let reparsed = parse_pc(&printed).unwrap();
            prop_assert_eq!(pc_to_bdd(&reparsed, &mut m), pc);
            let via_expr = parse_pc(&print_pc_expr(&e)).unwrap();
            prop_assert_eq!(pc_to_bdd(&via_expr, &mut m), pc);
        }

        #[test]
        fn bdd_agrees_with_direct_evaluation(e in arb_pc(), bits in 0u32..16) {
            let mut m = BddManager::new();
            for f in FEATURES {
                m.register_feature(f);
            }
            let pc = pc_to_bdd(&e, &mut m);
            let values: Vec<bool> = (0..4).map(|i| bits >> i & 1 == 1).collect();
            let lookup = |name: &str| values[FEATURES.iter().position(|f| *f == name).unwrap()];
            let conf = crate::pcbdd::Configuration::from_values(values.clone());
            prop_assert_eq!(m.eval(pc, &conf), e.eval(&lookup));
        }
    }
}
