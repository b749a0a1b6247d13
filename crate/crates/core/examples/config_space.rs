//! The full factorial configuration space and its id format.

use bugloc::models::{enumerate_configs, enumerate_family, parse_config_id, Family};

fn main() {
    let all = enumerate_configs();
    println!("{} configurations", all.len());
    for family in Family::ALL {
        let configs = enumerate_family(family);
        println!(
            "  {:<3} {:>5}  first {:<18} last {}",
            family.name(),
            configs.len(),
            configs[0].id(),
            configs[configs.len() - 1].id()
        );
    }
    for id in ["A1.B4.C5.D1.E1", "A3.B6.C7.F3.G256", "M2", "A9.B1.C0.D1.E1"] {
        match parse_config_id(id) {
            Ok(c) => println!("{id}: {:?}", c.levels()),
            Err(e) => println!("{id}: {e}"),
        }
    }
}
