//! Per-frame fusion and detection time for VGA frames at 20 m.
//!
//! ```text
//! cargo run --release --example benchmark
//! ```

use pyramid_landing::evalbench::{benchmark, BenchConfig};
use pyramid_landing::Result;

fn main() -> Result<()> {
    let report = benchmark(&BenchConfig::default())?;
    println!("{report}");
    Ok(())
}
