// Solve the LP relaxation and bring the optimum into canonical form, where
// each client has at most one partially used facility and it is the
// farthest one it uses.

use ftfl::instance::Instance;
use ftfl::lp::{build_lp, canonicalize, solve_lp};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // three facilities on a triangle, each client next to two of them
    let inst = Instance::new(
        vec![2.0; 3],
        vec![vec![1.0, 1.0, 3.0], vec![3.0, 1.0, 1.0], vec![1.0, 3.0, 1.0]],
        vec![1, 1, 1],
    )?;
    let lp = build_lp(&inst);
    println!("{} variables, {} rows", lp.num_vars, lp.rows.len());
    let sol = solve_lp(&lp, 1e-9)?;
    println!("objective {}", sol.objective);
    println!("y = {:?}", sol.y);

    let canon = canonicalize(&sol, &inst)?;
    for (j, row) in canon.x.iter().enumerate() {
        println!("x[client {j}] = {row:?}");
    }
    if (sol.objective - 6.0).abs() > 1e-9 {
        return Err("the triangle LP should cost 6".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
