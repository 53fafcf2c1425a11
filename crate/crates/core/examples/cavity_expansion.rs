//! Uniform radial expansion of a hollow cylinder: Cartesian and cylindrical
//! components of F, and the two routes to J.
//!
//!     cargo run --example cavity_expansion -- 1.25

use axifep::app_cli::cmd_cavity;

fn main() -> axifep::Result<()> {
    let alpha = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1.1);
    print!("{}", cmd_cavity(alpha)?);
    Ok(())
}
