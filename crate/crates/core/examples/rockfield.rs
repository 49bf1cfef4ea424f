//! Rock detection, false-positive and recall rates against rock diameter.
//!
//! ```text
//! cargo run --release --example rockfield -- [seeds] [diameter ...]
//! ```

use pyramid_landing::prelude::*;

fn main() -> Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut experiment = RockfieldExperiment::default();
    if let Some(seeds) = args.first() {
        experiment.seeds = seeds.parse().map_err(|_| Error::Config("seeds must be an integer".into()))?;
    }
    if args.len() > 1 {
        experiment.rock_diameters = args[1..]
            .iter()
            .map(|a| a.parse().map_err(|_| Error::Config(format!("bad diameter {a}"))))
            .collect::<Result<_>>()?;
    }
    let start = std::time::Instant::now();
    let report = experiment.run()?;
    println!("{report}");
    println!("elapsed {:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}
