//! Reading a problem from a flat key = value file.

use ps_trident::config::parse_config;

const PROBLEM: &str = "\
# lambda1 may be a certified surd
lambda1 = sqrt:2
lambda2 = 1
lambda3 = -1
eta     = 0.3
gamma   = 97/100
theta   = 0.05
lambda0 = 0.05
q0      = 64
";

fn main() -> ps_trident::Result<()> {
    let cfg = parse_config(PROBLEM)?;
    println!("echo: {:?}", cfg.echo);
    println!("gamma exact: {:?}, ratio irrational: {}", cfg.spec.gamma.exact(), cfg.spec.ratio_is_irrational());
    println!("{:?}", cfg.params()?);
    Ok(())
}
