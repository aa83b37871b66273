// Run the full algorithm, once and as a seeded Monte Carlo experiment.

use ftfl::instance::{generate, GenMode};
use ftfl::oracle::ratio_report;
use ftfl::pipeline::run_alg;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let inst = generate(GenMode::Uniform, 8, 10, 3, 42)?;
    let (sol, diag) = run_alg(&inst, 0, None)?;
    sol.check(&inst)?;
    println!("open {:?}, cost {:.4}, lp {:.4}", sol.open, sol.cost, diag.lp_cost);
    println!("pre-opened {}, clusters {}", diag.preopened, diag.cluster_count);

    let rep = ratio_report(&inst, 500, 0, false)?;
    println!(
        "500 trials: mean {:.4} +- {:.4}, ratio to lp {:.4}, failures {}",
        rep.alg_mean, rep.alg_stderr, rep.ratio_to_lp, rep.feasibility_failures
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
