//! Thick-walled cylinder benchmark: 5x10 Q8 mesh, 30 load steps, tracked corner
//! Gauss points. Pass `tl` for the total Lagrangian functional and an output
//! directory to also write CSV and VTK files.
//!
//!     cargo run --release --example thick_cylinder -- ul out/

use axifep::app_cli::{cmd_run, simulate, RunConfig};

fn main() -> axifep::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg = RunConfig::default();
    if let Some(f) = args.next() {
        cfg.formulation = f.parse()?;
    }
    let sim = match args.next() {
        Some(dir) => {
            cfg.out_dir = dir.into();
            cmd_run(&cfg)?
        }
        None => simulate(&cfg, |_, _, _| Ok(()))?,
    };

    println!("step  iters  {}", sim.tracked.iter().map(|t| format!("{:>9}", t.label)).collect::<String>());
    for s in &sim.steps {
        let its: Vec<String> = s.errors.iter().map(|e| e.len().to_string()).collect();
        let marks: String = s
            .track
            .iter()
            .map(|r| format!("{:>9}", if r.yielded { format!("{:.3}*", -r.p_sigma / 1e6) } else { format!("{:.3}", -r.p_sigma / 1e6) }))
            .collect();
        println!("{:>4}  {:>5}  {marks}", s.step, its.join("+"));
    }
    let st = sim.stats();
    println!("\n-p [MPa] at tracked points, * = yielded");
    println!("iterations: min {} max {} avg {:.3}", st.min, st.max, st.avg);
    if let Some(s) = sim.steps.iter().find(|s| s.track.iter().any(|r| r.label == "A" && r.yielded)) {
        println!("A first yields at step {} (inner-wall top displacement {:.3} m)", s.step, s.t_frac * cfg.ubar);
    }
    Ok(())
}
