// The scaling constant: the fixed point of
// `g = (1/e + 2/e^g) * (1 + 1/(g - 1))` on (1, 2).

use ftfl::pipeline::{compute_gamma, gamma_map};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let g = compute_gamma(1e-12);
    println!("gamma           = {g:.15}");
    println!("map(gamma) - g  = {:.3e}", gamma_map(g) - g);
    println!("1 - exp(-gamma) = {:.6}", 1.0 - (-g).exp());
    if !(g > 1.724 && g <= 1.7245) {
        return Err(format!("unexpected gamma {g}").into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
