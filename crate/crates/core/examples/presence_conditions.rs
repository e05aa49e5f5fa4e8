//! Building, combining and inspecting presence conditions.

use vdatalog::pcbdd::BddManager;
use vdatalog::syntax::{parse_pc, pc_to_bdd, print_pc};

fn main() {
    let mut mgr = BddManager::new();
    let fm = parse_pc(
        "(Air \\/ Land \\/ Sea) /\\ !(Air /\\ Land) /\\ !(Land /\\ Sea) /\\ !(Sea /\\ Air)",
    )
    .unwrap();
    let fm = pc_to_bdd(&fm, &mut mgr);
    println!("feature model: {}", print_pc(fm, &mgr));
    println!("valid configurations: {}", mgr.sat_count(fm));
    for conf in mgr.enumerate_configurations(fm, 16).unwrap() {
        println!("  {}", conf.describe(mgr.features()));
    }

    let sea = mgr.mk_var("Sea");
    let air = mgr.mk_var("Air");
    let land = mgr.mk_var("Land");
    let not_land = mgr.not(land);

    // equal functions are the same node
    let a = mgr.and(not_land, sea);
    let b = mgr.and(sea, not_land);
    println!("!Land /\\ Sea == Sea /\\ !Land: {}", a == b);

    let sea_and_air = mgr.and(sea, air);
    let within = mgr.and(sea_and_air, fm);
    println!(
        "Sea /\\ Air satisfiable: {}, under the model: {}",
        mgr.sat(sea_and_air),
        mgr.sat(within)
    );
    let contradiction = mgr.and(land, not_land);
    println!("Land /\\ !Land: {}", print_pc(contradiction, &mgr));

    let sea_in_fm = mgr.and(sea, fm);
    println!(
        "!Land /\\ Sea and Sea agree under the model: {}",
        mgr.and(a, fm) == sea_in_fm
    );
    println!("BDD nodes: {}", mgr.node_count());
}
