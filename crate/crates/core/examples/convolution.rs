//! Exact single-node risk by convolving outage tables with demand: the
//! network's generation-only level and the storage study's fixed-pattern
//! level.
//!
//! ```text
//! cargo run --release --example convolution
//! ```

use std::path::Path;

use adequacy_mlmc::composite::{copt_convolve, CapacityOutageTable, NetworkDescription};
use adequacy_mlmc::experiment::default_data_dir;
use adequacy_mlmc::storage::{convolve_level0, StorageSystem};

fn main() -> anyhow::Result<()> {
    let data = default_data_dir();

    // Three 100 MW units with availability 0.9 against a 150 MW load.
    let table = CapacityOutageTable::new([(100.0, 0.9); 3], 1.0);
    let (lolp, epns) = table.shortfall(150.0);
    println!("toy system: LOLP {lolp:.4}, EPNS {epns:.3} MW");

    let network = NetworkDescription::load(data.join("rts/network.toml"))?;
    let r = copt_convolve(&network, 1.0);
    println!("RTS generation only: PLC {:.4e}, EPNS {:.4} MW", r.plc, r.epns);

    let system = StorageSystem::load(Path::new(&data).join("storage/system.toml"))?;
    for (name, pattern) in [("no storage", None), ("daily pattern", Some(system.profile.dispatch.as_slice()))] {
        let a = convolve_level0(&system.portfolio, &system.demand, &system.wind, pattern);
        println!("storage system, {name}: LOLE {:.3} h/yr, EENS {:.1} MWh/yr", a.lole, a.eens);
    }
    Ok(())
}
