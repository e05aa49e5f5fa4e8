//! Parsing an annotated program and printing it back.

use vdatalog::syntax::{parse_pc, parse_program, print_pc_expr};

const SOURCE: &str = r#"
.decl Edge(from: symbol, to: symbol)
.decl Path(from: symbol, to: symbol)
.output Path

Edge(Athens, Rome) @ Sea.
Edge("new york", Athens) @ !Land.
Path(x, y) :- Edge(x, y).
Path(x, z) :- Edge(x, y), Path(y, z) @ !Air.
"#;

fn main() {
    let program = parse_program(SOURCE).unwrap();
    println!("features: {:?}", program.features);
    println!(
        "{} facts, {} rules",
        program.facts.len(),
        program.rules.len()
    );
    print!("{program}");

    let pc = parse_pc("A \\/ B /\\ !C").unwrap();
    println!("parsed: {pc:?}");
    println!("printed: {}", print_pc_expr(&pc));

    match parse_program(".decl E(a: symbol)\nE(x, y).") {
        Ok(_) => unreachable!(),
        Err(e) => println!("error: {e}"),
    }
    match parse_pc("A /\\ /\\ B") {
        Ok(_) => unreachable!(),
        Err(e) => println!("error: {e}"),
    }
}
