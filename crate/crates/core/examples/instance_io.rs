// Generate an instance, write it in the text format, read it back and
// check the bipartite triangle inequality.

use ftfl::instance::{generate, parse_instance, serialize_instance, validate_metric, GenMode, Instance};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let inst = generate(GenMode::Euclidean, 4, 3, 2, 7)?;
    let text = serialize_instance(&inst);
    println!("{text}");
    let back = parse_instance(&text)?;
    assert_eq!(back, inst);
    println!("metric: {}", validate_metric(&back, 1e-9).is_metric());

    // one long edge breaks the inequality
    let bad = Instance::new(vec![1.0, 1.0], vec![vec![1.0, 10.0], vec![1.0, 1.0]], vec![1, 1])?;
    for v in validate_metric(&bad, 1e-9).violations {
        println!(
            "c({}, {}) = {} > {} via facility {} and client {}",
            v.facility, v.client, v.direct, v.detour, v.via_facility, v.via_client
        );
    }

    match parse_instance("FTFL 1\n2 1\n1 1\n3 0 0\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => return Err("r_j > m should not parse".into()),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
