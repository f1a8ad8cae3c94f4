//! Regenerates the bundled synthetic storage-study dataset.
//!
//! ```text
//! cargo run --release --example generate_storage_data -- data/storage
//! ```

use std::path::PathBuf;

use adequacy_mlmc::storage::synthetic::{generate, SyntheticSpec};

fn main() -> anyhow::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("data/storage"));
    let spec = SyntheticSpec::default();
    let data = generate(&spec)?;
    data.write(&dir, "synthetic national system with storage")?;
    println!(
        "wrote {} demand years, {} wind years, {} thermal units, {} storage units to {}",
        data.demand.len(),
        data.wind.len(),
        data.portfolio.len(),
        data.fleet.len(),
        dir.display()
    );
    Ok(())
}
