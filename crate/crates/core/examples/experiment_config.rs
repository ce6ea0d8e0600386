//! Run a TOML experiment file through the library, as `simcli run` does.

use cpbsim::experiment::{parse_config, run_config};

const CONFIG: &str = r#"
[output]
directory = "example-results"

[[experiment]]
kind = "rabi"
name = "rabi-n3"
circuit = { n_qubits = 3, eta = 0.77 }
run = { t_end_ns = 3.0, n_traj = 20, master_seed = 4 }

[[experiment]]
kind = "level-stats"
circuit = { n_qubits = 6, eta = 0.08, disorder_lambda = 0.5 }
run = { n_traj = 5 }
"#;

fn main() -> cpbsim::Result<()> {
    let cfg = parse_config(CONFIG)?;
    let root = std::env::temp_dir().join("cpbsim-example");
    for outcome in run_config(&cfg, &root)? {
        println!("{} -> {} (config {})", outcome.name, outcome.directory.display(), &outcome.config_hash[..12]);
    }
    Ok(())
}
