// Compare the algorithm with the exact optimum on small instances and
// write the reports as CSV.

use ftfl::instance::{generate, GenMode, Instance};
use ftfl::oracle::{exact_opt, ratio_report};
use ftfl::report::emit_csv;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let triangle = Instance::new(
        vec![2.0; 3],
        vec![vec![1.0, 1.0, 3.0], vec![3.0, 1.0, 1.0], vec![1.0, 3.0, 1.0]],
        vec![1, 1, 1],
    )?;
    let opt = exact_opt(&triangle)?;
    println!("triangle: opt {} with open {:?}", opt.cost, opt.open);

    let mut reports = Vec::new();
    for (name, inst) in [
        ("triangle", triangle),
        ("euclidean", generate(GenMode::Euclidean, 6, 6, 2, 3)?),
    ] {
        let mut rep = ratio_report(&inst, 300, 1, true)?;
        rep.instance = name.into();
        reports.push(rep);
    }
    emit_csv(&reports, std::io::stdout())?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
