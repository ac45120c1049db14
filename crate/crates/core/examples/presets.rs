//! Loading a bundled configuration, patching it, and running it end to end
//! through the same path as `pacabc run`.

use pacabc::cli::{execute, write_run, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = RunConfig::from_preset("toy-discrete", &["smc.n_particles=5000".into()])?;
    let outcome = execute(&config, config.seed)?;
    let s = &outcome.summary;
    println!("{}: {} steps to lambda {}, log Z {:.4}", s.name, s.steps, s.lambda_final, s.log_z);
    if let Some(e) = &s.enumerated {
        println!("TV to the enumerated posterior: {:.4}", e.total_variation);
    }
    if let Some(b) = s.empirical_bound {
        println!("empirical bound at the final lambda: {b:.4}");
    }
    let dir = std::env::temp_dir().join("pacabc-presets-example");
    write_run(&dir, &outcome)?;
    println!("wrote {}", dir.display());
    Ok(())
}
