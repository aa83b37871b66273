// The deterministic part of the pipeline: scaling, the close/distant split
// and the cluster family that guides rounding.

use ftfl::instance::Instance;
use ftfl::pipeline::Prepared;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let inst = Instance::new(
        vec![2.0; 3],
        vec![vec![1.0, 1.0, 3.0], vec![3.0, 1.0, 1.0], vec![1.0, 3.0, 1.0]],
        vec![1, 1, 1],
    )?;
    let prep = Prepared::new(&inst, None)?;
    println!("gamma {:.6}, lp cost {}", prep.gamma(), prep.lp_cost);
    println!("residual openings {:?}", prep.scaled.ybar);
    for split in prep.splits.iter().flatten() {
        println!(
            "client {}: close {:?} distant {:?} d_max {:.3} R {:.3}",
            split.client, split.close, split.distant, split.d_max, split.r_gap
        );
    }
    for (set, center) in prep.family().sets().iter().zip(&prep.clustering.centers) {
        println!("cluster {set:?} around client {center}");
    }
    println!("root {:?}", prep.family().sets().last().unwrap());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
