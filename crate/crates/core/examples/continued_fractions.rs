//! Certified continued-fraction convergents of surds and decimals.

use ps_trident::numeric::{cf_convergents, HighPrecisionReal};

fn main() -> ps_trident::Result<()> {
    for text in ["sqrt:2", "sqrt:3", "3.14159265358979323846...", "355/113"] {
        let x = HighPrecisionReal::parse(text)?;
        match cf_convergents(&x, 8) {
            Ok(cs) => println!("{text}: {}", cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")),
            Err(e) => println!("{text}: {e}"),
        }
    }
    Ok(())
}
