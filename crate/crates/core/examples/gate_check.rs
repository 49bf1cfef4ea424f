//! Checks experiment metrics against gates read from TOML, the same way the
//! `--check` flag of the command line does.
//!
//! ```text
//! cargo run --release --example gate_check
//! ```

use pyramid_landing::evalbench::{check_gates, CliffExperiment, GateFile};
use pyramid_landing::{Error, Result};

fn main() -> Result<()> {
    let report = CliffExperiment::default().run()?;
    println!("{report}\n");
    let file: GateFile = toml::from_str(
        r#"
        [[gate]]
        name = "flat ground within 3 cm"
        metric = "cliff.rmse.flat"
        max = 0.03

        [[gate]]
        name = "cliff error above rock"
        metric = "cliff.order.cliff_over_rock"
        above = 0.0
        "#,
    )
    .map_err(|e| Error::Config(e.to_string()))?;
    let mut gates = file.gate;
    gates.extend(report.default_gates());
    for outcome in check_gates(&gates, &report.metrics()) {
        println!("{outcome}");
    }
    Ok(())
}
