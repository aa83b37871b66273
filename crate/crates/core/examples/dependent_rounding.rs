// Dependent rounding along a laminar family versus independent rounding.

use ftfl::rng::trial_rng;
use ftfl::rounding::{dependent_round, estimate_min_k, FracVector, LaminarFamily, RoundingMode};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let v = FracVector::new(vec![0.6; 5])?;
    let fam = LaminarFamily::new(5, vec![vec![0, 1, 2]])?;

    let mut rng = trial_rng(1, 0);
    for _ in 0..5 {
        let out = dependent_round(&v, &fam, &mut rng)?;
        let bits: String = out.iter().map(|&b| if b { '1' } else { '0' }).collect();
        println!("{bits}");
    }

    let s = [0, 1, 2, 3, 4];
    let dep = estimate_min_k(&v, &s, 2, RoundingMode::Dependent(&fam), 20_000, 7)?;
    let ind = estimate_min_k(&v, &s, 2, RoundingMode::Independent, 20_000, 7)?;
    let bound = 2.0 * (1.0 - (-3.0f64 / 2.0).exp());
    println!("E[min(2, ones)]: dependent {:.4} +- {:.4}", dep.mean, dep.stderr);
    println!("                 independent {:.4} +- {:.4}", ind.mean, ind.stderr);
    println!("                 lower bound {bound:.4}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
