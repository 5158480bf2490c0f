//! Reading a measure from JSON and writing canonical reports.

use winf::io::{measure_file, parse_measure, to_canonical_json, WinfReport};
use winf::potentials::{kantorovich_pair, RhoConfig};

fn main() -> winf::Result<()> {
    let mu = parse_measure(r#"{"pieces": [{"a": 0.0, "b": 2.0, "density": 0.5}]}"#)?;
    let nu = parse_measure(r#"{"pieces": [{"a": 0.5, "b": 1.5, "density": 1.0}]}"#)?;
    let k = kantorovich_pair(&mu, &nu, &RhoConfig::default())?;
    print!("{}", to_canonical_json(&WinfReport::new(k.lambda, k.sets.as_ref()))?);
    print!("{}", to_canonical_json(&measure_file(&nu))?);

    match parse_measure(r#"{"pieces": [{"a": 0.0, "b": 1.0, "density": 0.7}]}"#) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
